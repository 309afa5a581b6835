//! Charge detection with a resonant-level single-electron transistor:
//! noise, response, and how close the device comes to the quantum limit
//! of continuous measurement.
//!
//! # Model
//!
//! A single level at energy `ε` is tunnel-coupled to two leads with
//! half-widths `γ₁` (source) and `γ₂` (collector); `γ = γ₁ + γ₂` is the
//! total level width and `eV = μ₁ − μ₂ ≥ 0` the bias. The measured
//! system couples to the island charge, so the detector is
//! characterized by four zero-frequency quantities (units
//! `e = ħ = k_B = 1`, spectral densities in the `1/2π` convention):
//!
//! * `S_Q` — backaction noise of the level occupation,
//! * `λ` — response coefficient `δ⟨I⟩/δφ`,
//! * `S_I` — output current noise,
//! * `S_IQ` — complex current–charge cross correlator.
//!
//! All four are energy integrals of Lorentzian kernels weighted by
//! lead occupation factors. Closed antiderivatives cover `T = 0`
//! exactly; finite temperature goes through adaptive quadrature. Two
//! figures of merit follow: the energy sensitivity
//! `ε_d = (2π/λ)·[S_I·S_Q − (Re S_IQ)²]^{1/2} ≥ ħ/2` and the
//! signal-to-noise ratio `R = λ²/(4π²·S_I·S_Q) ≤ 4` for weak continuous
//! qubit measurement.
//!
//! Per-energy kernels satisfy the quantum-limited-detector identities
//! `s_I(ν)·s_Q(ν) = |s_IQ(ν)|²` and `Im s_IQ(ν) = −λ(ν)/4π` exactly;
//! [`pointwise_quantum_limit`] exposes the residuals.
//!
//! # Deep-collector regime
//!
//! With the collector far below the level (`ε − μ₂ ≫ γ`) everything
//! collapses to closed forms in the single variable `z = (μ₁ − ε)/γ`
//! via `A(z) = π/2 + arctan z` and `B(z) = z/(1+z²)`. The cross
//! correlator's real part follows its defining kernel as
//! `Re S_IQ = (γ₂ − γ₁)·S_Q` at `T = 0`; an independent two-state
//! telegraph-process calculation confirms this sign in the large-bias
//! limit. [`sensitivity_sweep`] uses the closed forms.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::numerics::{self, NumericsError, QuadratureSpec};

/// Below `temp < T0_BRANCH_REL·γ` the solver switches to the exact
/// zero-temperature antiderivatives.
const T0_BRANCH_REL: f64 = 1e-6;

/// Finite-temperature quadrature window margin: `max(50γ, 40T)` beyond
/// the chemical potentials and the level, where every occupation factor
/// is suppressed below `e^{−40}`.
const WINDOW_GAMMA_MULT: f64 = 50.0;
const WINDOW_TEMP_MULT: f64 = 40.0;

/// Errors from the detector characterization.
#[derive(Debug, Error)]
pub enum DetectorError {
    /// Invalid parameter combination.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    /// Energy sensitivity is undefined at zero response (`λ = 0`).
    #[error("zero response coefficient: energy sensitivity undefined")]
    ZeroResponse,
    /// Signal-to-noise is undefined when a noise power vanishes.
    #[error("zero noise power: signal-to-noise ratio undefined")]
    ZeroNoise,
    /// Propagated quadrature failure.
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Resonant-level detector parameters (units `e = ħ = k_B = 1`).
#[derive(Debug, Clone, Copy)]
pub struct DetectorParams {
    /// Source-lead half tunnel rate (`> 0`).
    pub gamma1: f64,
    /// Collector-lead half tunnel rate (`> 0`).
    pub gamma2: f64,
    /// Resonant-level energy `ε`.
    pub eps_level: f64,
    /// Source chemical potential; `mu1 ≥ mu2`.
    pub mu1: f64,
    /// Collector chemical potential.
    pub mu2: f64,
    /// Temperature (`≥ 0`).
    pub temp: f64,
}

impl DetectorParams {
    pub fn new(
        gamma1: f64,
        gamma2: f64,
        eps_level: f64,
        mu1: f64,
        mu2: f64,
        temp: f64,
    ) -> Result<Self, DetectorError> {
        for (name, v) in [("gamma1", gamma1), ("gamma2", gamma2)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(DetectorError::InvalidParams(format!(
                    "{name} = {v} must be > 0"
                )));
            }
        }
        for (name, v) in [("eps_level", eps_level), ("mu1", mu1), ("mu2", mu2)] {
            if !v.is_finite() {
                return Err(DetectorError::InvalidParams(format!(
                    "{name} = {v} must be finite"
                )));
            }
        }
        if mu1 < mu2 {
            return Err(DetectorError::InvalidParams(format!(
                "mu1 = {mu1} < mu2 = {mu2}: bias must be nonnegative"
            )));
        }
        if !(temp >= 0.0) || !temp.is_finite() {
            return Err(DetectorError::InvalidParams(format!(
                "temp = {temp} must be ≥ 0"
            )));
        }
        Ok(Self { gamma1, gamma2, eps_level, mu1, mu2, temp })
    }

    /// Total level width `γ = γ₁ + γ₂`.
    pub fn gamma(&self) -> f64 {
        self.gamma1 + self.gamma2
    }

    /// Source distance from the level in level widths, `z = (μ₁ − ε)/γ`.
    pub fn z(&self) -> f64 {
        (self.mu1 - self.eps_level) / self.gamma()
    }

    /// Deep-collector configuration at `T = 0`: the level at the
    /// origin, the source at `μ₁ = zγ`, and the collector pushed 50
    /// level widths down — the convention used when cross-validating
    /// the closed forms against the integral pipeline.
    pub fn deep_collector(gamma1: f64, gamma2: f64, z: f64) -> Result<Self, DetectorError> {
        let gamma = gamma1 + gamma2;
        Self::new(gamma1, gamma2, 0.0, z * gamma, -50.0 * gamma, 0.0)
    }

    fn is_cold(&self) -> bool {
        self.temp < T0_BRANCH_REL * self.gamma()
    }

    /// Integration window for finite-temperature quadrature.
    fn window(&self) -> (f64, f64) {
        let w = (WINDOW_GAMMA_MULT * self.gamma()).max(WINDOW_TEMP_MULT * self.temp);
        (
            self.mu2.min(self.eps_level) - w,
            self.mu1.max(self.eps_level) + w,
        )
    }
}

/// The four zero-frequency detector quantities at one operating point.
#[derive(Debug, Clone, Copy)]
pub struct NoiseQuartet {
    /// Output current noise `S_I ≥ 0`.
    pub s_i: f64,
    /// Backaction charge noise `S_Q ≥ 0`.
    pub s_q: f64,
    /// Current–charge cross correlator.
    pub s_iq: C64,
    /// Response coefficient `λ = δ⟨I⟩/δφ`.
    pub lambda: f64,
}

/// Fermi occupation `1/(1 + e^{(ν−μ)/T})`, evaluated in the
/// overflow-safe branch; `T = 0` is the sharp step with value `1/2`
/// exactly at `ν = μ`.
pub fn fermi(nu: f64, mu: f64, temp: f64) -> f64 {
    if temp == 0.0 {
        return match nu.partial_cmp(&mu) {
            Some(std::cmp::Ordering::Less) => 1.0,
            Some(std::cmp::Ordering::Greater) => 0.0,
            _ => 0.5,
        };
    }
    let x = (nu - mu) / temp;
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

// ---------------------------------------------------------------------
// T = 0 antiderivatives, all in the shifted variable x = ν − ε.
// ---------------------------------------------------------------------

/// Antiderivative of `1/(x² + γ²)²`:
/// `(1/2γ³)[arctan(x/γ) + xγ/(x² + γ²)]`.
fn anti_lorentz_sq(x: f64, gamma: f64) -> f64 {
    ((x / gamma).atan() + x * gamma / (x * x + gamma * gamma)) / (2.0 * gamma.powi(3))
}

/// Antiderivative of `1/(x² + γ²)`: `(1/γ)·arctan(x/γ)`.
fn anti_lorentz(x: f64, gamma: f64) -> f64 {
    (x / gamma).atan() / gamma
}

/// Antiderivative of `−x/(x² + γ²)²`: `1/(2(x² + γ²))`.
fn anti_odd(x: f64, gamma: f64) -> f64 {
    0.5 / (x * x + gamma * gamma)
}

fn t0_window(p: &DetectorParams) -> (f64, f64) {
    (p.mu2 - p.eps_level, p.mu1 - p.eps_level)
}

// ---------------------------------------------------------------------
// The four quantities: closed T=0 route and quadrature route each.
// ---------------------------------------------------------------------

/// Backaction charge noise `S_Q`.
///
/// `S_Q = (e²/π²)∫dν (γ₁f₁ + γ₂f₂)(γ₁(1−f₁) + γ₂(1−f₂))/[(ε−ν)² + γ²]²`
/// — the product form of the double lead sum `Σ_{ij}γ_iγ_j f_i(1−f_j)`.
/// Cold detectors (`T < 1e−6·γ`) use the exact antiderivative: the
/// integrand collapses to `γ₁γ₂/[(ε−ν)²+γ²]²` on the bias window.
pub fn backaction_noise(p: &DetectorParams) -> Result<f64, DetectorError> {
    if p.is_cold() {
        let (lo, hi) = t0_window(p);
        let g = p.gamma();
        Ok(p.gamma1 * p.gamma2 / (PI * PI) * (anti_lorentz_sq(hi, g) - anti_lorentz_sq(lo, g)))
    } else {
        backaction_noise_quadrature(p, &QuadratureSpec::default())
    }
}

/// Quadrature route for [`backaction_noise`] (the independent check of
/// the closed forms; at `T = 0` it integrates the sharp-window kernel).
pub fn backaction_noise_quadrature(
    p: &DetectorParams,
    spec: &QuadratureSpec,
) -> Result<f64, DetectorError> {
    let g = p.gamma();
    let pref = 1.0 / (PI * PI);
    if p.temp == 0.0 {
        let (lo, hi) = (p.mu2, p.mu1);
        let (val, _) = numerics::integrate_adaptive(
            |nu| {
                let d = lorentz_sq(nu - p.eps_level, g);
                p.gamma1 * p.gamma2 / d
            },
            lo,
            hi,
            spec,
        )?;
        return Ok(pref * val);
    }
    let (lo, hi) = p.window();
    let (val, _) = numerics::integrate_adaptive(
        |nu| {
            let f1 = fermi(nu, p.mu1, p.temp);
            let f2 = fermi(nu, p.mu2, p.temp);
            let occ = p.gamma1 * f1 + p.gamma2 * f2;
            let emp = p.gamma1 * (1.0 - f1) + p.gamma2 * (1.0 - f2);
            occ * emp / lorentz_sq(nu - p.eps_level, g)
        },
        lo,
        hi,
        spec,
    )?;
    Ok(pref * val)
}

/// Response coefficient `λ = (4e²γ₁γ₂/π)∫dν (ε−ν)(f₁−f₂)/[(ε−ν)²+γ²]²`.
pub fn response_coefficient(p: &DetectorParams) -> Result<f64, DetectorError> {
    if p.is_cold() {
        let (lo, hi) = t0_window(p);
        let g = p.gamma();
        Ok(4.0 * p.gamma1 * p.gamma2 / PI * (anti_odd(hi, g) - anti_odd(lo, g)))
    } else {
        response_coefficient_quadrature(p, &QuadratureSpec::default())
    }
}

/// Quadrature route for [`response_coefficient`].
pub fn response_coefficient_quadrature(
    p: &DetectorParams,
    spec: &QuadratureSpec,
) -> Result<f64, DetectorError> {
    let g = p.gamma();
    let pref = 4.0 * p.gamma1 * p.gamma2 / PI;
    if p.temp == 0.0 {
        let (val, _) = numerics::integrate_adaptive(
            |nu| {
                let x = p.eps_level - nu;
                x / lorentz_sq(-x, g)
            },
            p.mu2,
            p.mu1,
            spec,
        )?;
        return Ok(pref * val);
    }
    let (lo, hi) = p.window();
    let (val, _) = numerics::integrate_adaptive(
        |nu| {
            let x = p.eps_level - nu;
            let df = fermi(nu, p.mu1, p.temp) - fermi(nu, p.mu2, p.temp);
            x * df / lorentz_sq(-x, g)
        },
        lo,
        hi,
        spec,
    )?;
    Ok(pref * val)
}

/// Output current noise `S_I`: thermal same-lead terms plus shot
/// cross-lead terms,
///
/// ```text
/// S_I = (e²γ₁γ₂/π²)∫dν {γ₁γ₂[f₁(1−f₁) + f₂(1−f₂)]
///        + [(ε−ν)² + (γ₁−γ₂)²][f₁(1−f₂) + (1−f₁)f₂]} / [(ε−ν)²+γ²]²
/// ```
///
/// At `T = 0` only the cross term survives on the bias window, with the
/// exact antiderivative `(1/γ)arctan(x/γ) − 4γ₁γ₂·J(x)` where `J` is
/// the `1/(x²+γ²)²` antiderivative.
pub fn current_noise(p: &DetectorParams) -> Result<f64, DetectorError> {
    if p.is_cold() {
        let (lo, hi) = t0_window(p);
        let g = p.gamma();
        let pref = p.gamma1 * p.gamma2 / (PI * PI);
        let smooth = anti_lorentz(hi, g) - anti_lorentz(lo, g);
        let sharp = anti_lorentz_sq(hi, g) - anti_lorentz_sq(lo, g);
        Ok(pref * (smooth - 4.0 * p.gamma1 * p.gamma2 * sharp))
    } else {
        current_noise_quadrature(p, &QuadratureSpec::default())
    }
}

/// Quadrature route for [`current_noise`].
pub fn current_noise_quadrature(
    p: &DetectorParams,
    spec: &QuadratureSpec,
) -> Result<f64, DetectorError> {
    let g = p.gamma();
    let b2 = (p.gamma1 - p.gamma2) * (p.gamma1 - p.gamma2);
    let pref = p.gamma1 * p.gamma2 / (PI * PI);
    if p.temp == 0.0 {
        let (val, _) = numerics::integrate_adaptive(
            |nu| {
                let x = nu - p.eps_level;
                (x * x + b2) / lorentz_sq(x, g)
            },
            p.mu2,
            p.mu1,
            spec,
        )?;
        return Ok(pref * val);
    }
    let (lo, hi) = p.window();
    let (val, _) = numerics::integrate_adaptive(
        |nu| {
            let x = nu - p.eps_level;
            let f1 = fermi(nu, p.mu1, p.temp);
            let f2 = fermi(nu, p.mu2, p.temp);
            let thermal = p.gamma1 * p.gamma2 * (f1 * (1.0 - f1) + f2 * (1.0 - f2));
            let shot = (x * x + b2) * (f1 * (1.0 - f2) + (1.0 - f1) * f2);
            (thermal + shot) / lorentz_sq(x, g)
        },
        lo,
        hi,
        spec,
    )?;
    Ok(pref * val)
}

/// Current–charge cross correlator
///
/// ```text
/// S_IQ = (e²γ₁γ₂/π²)∫dν {γ₁f₁(1−f₁) − γ₂f₂(1−f₂)
///         + (γ₂−γ₁−i(ε−ν))f₁(1−f₂)
///         + (γ₂−γ₁+i(ε−ν))(1−f₁)f₂} / [(ε−ν)²+γ²]²
/// ```
///
/// At `T = 0` the kernel reduces to `(γ₂−γ₁−i(ε−ν))/[(ε−ν)²+γ²]²` on
/// the bias window, giving `Re S_IQ = (γ₂−γ₁)·S_Q` and
/// `Im S_IQ = −λ/4π` exactly. (A once-printed closed-form row carries
/// the opposite real-part sign; the defining kernel and an independent
/// classical telegraph-process limit both give `γ₂−γ₁`, which is what
/// this crate computes. Downstream figures of merit use `(Re S_IQ)²`
/// and are unaffected.)
pub fn cross_correlator(p: &DetectorParams) -> Result<C64, DetectorError> {
    if p.is_cold() {
        let re = (p.gamma2 - p.gamma1) * backaction_noise(p)?;
        let im = -response_coefficient(p)? / (4.0 * PI);
        Ok(C64::new(re, im))
    } else {
        cross_correlator_quadrature(p, &QuadratureSpec::default())
    }
}

/// Quadrature route for [`cross_correlator`]: real and imaginary parts
/// integrated independently (so the `Im S_IQ = −λ/4π` identity is a
/// genuine numerical check, not a definition).
pub fn cross_correlator_quadrature(
    p: &DetectorParams,
    spec: &QuadratureSpec,
) -> Result<C64, DetectorError> {
    let g = p.gamma();
    let dg = p.gamma2 - p.gamma1;
    let pref = p.gamma1 * p.gamma2 / (PI * PI);
    if p.temp == 0.0 {
        let (re, _) = numerics::integrate_adaptive(
            |nu| dg / lorentz_sq(nu - p.eps_level, g),
            p.mu2,
            p.mu1,
            spec,
        )?;
        let (im, _) = numerics::integrate_adaptive(
            |nu| -(p.eps_level - nu) / lorentz_sq(nu - p.eps_level, g),
            p.mu2,
            p.mu1,
            spec,
        )?;
        return Ok(C64::new(pref * re, pref * im));
    }
    let (lo, hi) = p.window();
    let (re, _) = numerics::integrate_adaptive(
        |nu| {
            let f1 = fermi(nu, p.mu1, p.temp);
            let f2 = fermi(nu, p.mu2, p.temp);
            let thermal = p.gamma1 * f1 * (1.0 - f1) - p.gamma2 * f2 * (1.0 - f2);
            let shot = dg * (f1 * (1.0 - f2) + (1.0 - f1) * f2);
            (thermal + shot) / lorentz_sq(nu - p.eps_level, g)
        },
        lo,
        hi,
        spec,
    )?;
    let (im, _) = numerics::integrate_adaptive(
        |nu| {
            let x = p.eps_level - nu;
            let f1 = fermi(nu, p.mu1, p.temp);
            let f2 = fermi(nu, p.mu2, p.temp);
            -x * (f1 * (1.0 - f2) - (1.0 - f1) * f2) / lorentz_sq(-x, g)
        },
        lo,
        hi,
        spec,
    )?;
    Ok(C64::new(pref * re, pref * im))
}

/// Direct current through the level,
/// `⟨I⟩ = (e/2π)∫dν D(ν)(f₁ − f₂)` with the energy-dependent
/// transparency `D(ν) = 4γ₁γ₂/[(ε−ν)² + γ²]`; reaches `2eγ₁γ₂/γ` in
/// the wide-bias limit.
pub fn average_current(p: &DetectorParams) -> Result<f64, DetectorError> {
    if p.is_cold() {
        let (lo, hi) = t0_window(p);
        let g = p.gamma();
        Ok(4.0 * p.gamma1 * p.gamma2 / (2.0 * PI) * (anti_lorentz(hi, g) - anti_lorentz(lo, g)))
    } else {
        average_current_quadrature(p, &QuadratureSpec::default())
    }
}

/// Quadrature route for [`average_current`].
pub fn average_current_quadrature(
    p: &DetectorParams,
    spec: &QuadratureSpec,
) -> Result<f64, DetectorError> {
    let g = p.gamma();
    let pref = 4.0 * p.gamma1 * p.gamma2 / (2.0 * PI);
    if p.temp == 0.0 {
        let (val, _) = numerics::integrate_adaptive(
            |nu| {
                let x = nu - p.eps_level;
                1.0 / (x * x + g * g)
            },
            p.mu2,
            p.mu1,
            spec,
        )?;
        return Ok(pref * val);
    }
    let (lo, hi) = p.window();
    let (val, _) = numerics::integrate_adaptive(
        |nu| {
            let x = nu - p.eps_level;
            let df = fermi(nu, p.mu1, p.temp) - fermi(nu, p.mu2, p.temp);
            df / (x * x + g * g)
        },
        lo,
        hi,
        spec,
    )?;
    Ok(pref * val)
}

/// All four zero-frequency quantities at one operating point.
pub fn noise_quartet(p: &DetectorParams) -> Result<NoiseQuartet, DetectorError> {
    Ok(NoiseQuartet {
        s_i: current_noise(p)?,
        s_q: backaction_noise(p)?,
        s_iq: cross_correlator(p)?,
        lambda: response_coefficient(p)?,
    })
}

fn lorentz_sq(x: f64, gamma: f64) -> f64 {
    let d = x * x + gamma * gamma;
    d * d
}

// ---------------------------------------------------------------------
// Per-energy kernels and the quantum-limit identities.
// ---------------------------------------------------------------------

/// The four per-energy (`T = 0`) kernel densities at energy `ν`: the
/// integrands whose bias-window integrals give the four detector
/// quantities. Functions of `(γ₁, γ₂, ε, ν)` only.
#[derive(Debug, Clone, Copy)]
pub struct KernelQuartet {
    pub s_i: f64,
    pub s_q: f64,
    pub s_iq: C64,
    pub lambda: f64,
}

/// Evaluate the `T = 0` kernel densities at energy `ν`.
pub fn pointwise_kernels(p: &DetectorParams, nu: f64) -> KernelQuartet {
    let g = p.gamma();
    let x = p.eps_level - nu;
    let d = lorentz_sq(x, g);
    let pref = p.gamma1 * p.gamma2 / (PI * PI);
    let b = p.gamma1 - p.gamma2;
    KernelQuartet {
        s_i: pref * (x * x + b * b) / d,
        s_q: pref / d,
        s_iq: pref * C64::new(p.gamma2 - p.gamma1, -x) / d,
        lambda: 4.0 * p.gamma1 * p.gamma2 / PI * x / d,
    }
}

/// Relative residuals of the two quantum-limited-detector identities at
/// energy `ν`: `s_I·s_Q = |s_IQ|²` and `Im s_IQ = −λ/4π`. Both vanish
/// to machine precision for every parameter set.
#[derive(Debug, Clone, Copy)]
pub struct QuantumLimitResiduals {
    /// `|s_I·s_Q − |s_IQ|²| / (s_I·s_Q)`.
    pub product: f64,
    /// `|Im s_IQ + λ/4π| / |λ/4π|` (absolute residual when `λ = 0`).
    pub response: f64,
}

/// Evaluate both identity residuals at energy `ν` (kernels are the
/// `T = 0` densities).
pub fn pointwise_quantum_limit(p: &DetectorParams, nu: f64) -> QuantumLimitResiduals {
    let k = pointwise_kernels(p, nu);
    let prod = k.s_i * k.s_q;
    let product = (prod - k.s_iq.norm_sqr()).abs() / prod;
    let target = -k.lambda / (4.0 * PI);
    let response = if target == 0.0 {
        (k.s_iq.im - target).abs()
    } else {
        (k.s_iq.im - target).abs() / target.abs()
    };
    QuantumLimitResiduals { product, response }
}

// ---------------------------------------------------------------------
// Figures of merit.
// ---------------------------------------------------------------------

/// Energy sensitivity `ε_d = (2π/|λ|)·[S_I·S_Q − (Re S_IQ)²]^{1/2}`, in
/// units of `ħ`; bounded below by `ħ/2` for any linear detector.
pub fn energy_sensitivity(p: &DetectorParams) -> Result<f64, DetectorError> {
    let q = noise_quartet(p)?;
    if q.lambda == 0.0 {
        return Err(DetectorError::ZeroResponse);
    }
    let disc = (q.s_i * q.s_q - q.s_iq.re * q.s_iq.re).max(0.0);
    Ok(2.0 * PI / q.lambda.abs() * disc.sqrt())
}

/// Signal-to-noise ratio of weak continuous qubit measurement,
/// `R = λ²/(4π²·S_I·S_Q) ≤ 4`.
pub fn signal_to_noise(p: &DetectorParams) -> Result<f64, DetectorError> {
    let q = noise_quartet(p)?;
    let prod = q.s_i * q.s_q;
    if prod == 0.0 {
        return Err(DetectorError::ZeroNoise);
    }
    Ok(q.lambda * q.lambda / (4.0 * PI * PI * prod))
}

// ---------------------------------------------------------------------
// Deep-collector closed forms in z = (μ₁ − ε)/γ.
// ---------------------------------------------------------------------

fn deep_a(z: f64) -> f64 {
    PI / 2.0 + z.atan()
}

fn deep_b(z: f64) -> f64 {
    z / (1.0 + z * z)
}

/// Deep-collector backaction noise
/// `S_Q = e²γ₁γ₂·[A(z) + B(z)]/(2π²γ³)`.
pub fn deep_backaction_noise(gamma1: f64, gamma2: f64, z: f64) -> f64 {
    let g = gamma1 + gamma2;
    gamma1 * gamma2 * (deep_a(z) + deep_b(z)) / (2.0 * PI * PI * g.powi(3))
}

/// Deep-collector current noise
/// `S_I = e²γ₁γ₂·[(γ₁² + γ₂²)A(z) − 2γ₁γ₂B(z)]/(π²γ³)`.
pub fn deep_current_noise(gamma1: f64, gamma2: f64, z: f64) -> f64 {
    let g = gamma1 + gamma2;
    gamma1 * gamma2 * ((gamma1 * gamma1 + gamma2 * gamma2) * deep_a(z)
        - 2.0 * gamma1 * gamma2 * deep_b(z))
        / (PI * PI * g.powi(3))
}

/// Deep-collector response coefficient `λ = 2e²γ₁γ₂/(πγ²(1 + z²))`.
pub fn deep_response_coefficient(gamma1: f64, gamma2: f64, z: f64) -> f64 {
    let g = gamma1 + gamma2;
    2.0 * gamma1 * gamma2 / (PI * g * g * (1.0 + z * z))
}

/// Deep-collector cross correlator: `(γ₂−γ₁)·S_Q − i·λ/4π`.
pub fn deep_cross_correlator(gamma1: f64, gamma2: f64, z: f64) -> C64 {
    C64::new(
        (gamma2 - gamma1) * deep_backaction_noise(gamma1, gamma2, z),
        -deep_response_coefficient(gamma1, gamma2, z) / (4.0 * PI),
    )
}

/// Deep-collector energy sensitivity in units of `ħ`:
/// `ε_d/ħ = (1/2)·[(1 + z²)²A(z)² − z²]^{1/2}`. Independent of the
/// tunnel-rate asymmetry; `π/4` at `z = 0`, `1/√3` as `z → −∞`.
pub fn deep_energy_sensitivity(z: f64) -> f64 {
    let a = deep_a(z);
    let one_z2 = 1.0 + z * z;
    0.5 * (one_z2 * one_z2 * a * a - z * z).sqrt()
}

/// One row of [`sensitivity_sweep`]: the deep-collector operating point
/// at source position `z`. Spectral densities are in absolute units
/// `e = ħ = 1`; with `γ` normalized to 1 they read in units `e²/γ`.
#[derive(Debug, Clone, Copy)]
pub struct SensitivityRow {
    pub z: f64,
    pub s_i: f64,
    pub s_q: f64,
    pub re_s_iq: f64,
    pub lambda: f64,
    /// Energy sensitivity over `ħ`.
    pub eps_over_hbar: f64,
    /// Signal-to-noise ratio `R`.
    pub snr: f64,
}

/// Sweep-point worker: deep-collector closed forms at one `z`.
pub fn sensitivity_row(gamma1: f64, gamma2: f64, z: f64) -> Result<SensitivityRow, DetectorError> {
    for (name, v) in [("gamma1", gamma1), ("gamma2", gamma2)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(DetectorError::InvalidParams(format!(
                "{name} = {v} must be > 0"
            )));
        }
    }
    if !z.is_finite() {
        return Err(DetectorError::InvalidParams(format!("z = {z} must be finite")));
    }
    let s_i = deep_current_noise(gamma1, gamma2, z);
    let s_q = deep_backaction_noise(gamma1, gamma2, z);
    let lambda = deep_response_coefficient(gamma1, gamma2, z);
    let snr = lambda * lambda / (4.0 * PI * PI * s_i * s_q);
    Ok(SensitivityRow {
        z,
        s_i,
        s_q,
        re_s_iq: deep_cross_correlator(gamma1, gamma2, z).re,
        lambda,
        eps_over_hbar: deep_energy_sensitivity(z),
        snr,
    })
}

/// Deep-collector detector characterization over a grid of source
/// positions, in grid order.
pub fn sensitivity_sweep(
    gamma1: f64,
    gamma2: f64,
    z_grid: &[f64],
) -> Result<Vec<SensitivityRow>, DetectorError> {
    z_grid
        .iter()
        .map(|&z| sensitivity_row(gamma1, gamma2, z))
        .collect()
}

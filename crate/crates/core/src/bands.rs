//! Charge-basis junction Hamiltonian: energy bands, free energy, average
//! Cooper-pair number, and junction voltage as periodic functions of the
//! induced charge `q`.
//!
//! The junction is described in the Cooper-pair number representation. With
//! charging energy `E_C` and Josephson coupling `E_J`, the Hamiltonian is
//! tridiagonal: `E_C·(n − q)²` on the diagonal for `n ∈ [−n_max, n_max]`,
//! and `−E_J/2` coupling neighbouring charge states. Its eigenvalues form
//! bands that are periodic in `q` with period one; thermodynamic
//! derivatives of the free energy give the average charge on the junction
//! and the voltage across it:
//!
//! * `F(q, T) = −T·ln Σ_m exp(−ε_m/T)` (and `F = ε₀` at `T = 0`),
//! * `⟨n⟩ = q − (1/2E_C)·∂F/∂q`,
//! * `V·e = E_C·(⟨n⟩ − q)` in natural units `e = 1`.
//!
//! The charge-basis truncation `n_max` defaults to a rule sized for the
//! width of the charge distribution (which grows as `(E_J/E_C)^{1/4}`); a
//! doubling check in [`spectrum`] turns an under-truncated request into a
//! [`BandsError::Truncation`] instead of a silently wrong band.

use crate::numerics::{
    self, central_difference, eig_sym_tridiag, NumericsError, SymTridiag, DEFAULT_FD_STEP,
};
use thiserror::Error;

/// Relative Boltzmann weight below which a level no longer contributes to
/// the free-energy sum at the precision this crate promises.
const BOLTZMANN_CUTOFF: f64 = 1e-12;

/// Truncation-convergence requirement: doubling `n_max` must move the
/// ground energy by less than this multiple of `e_c`.
const TRUNCATION_TOL: f64 = 1e-10;

/// Errors from the band computations.
#[derive(Debug, Error)]
pub enum BandsError {
    /// The charge-basis truncation is too small for the requested quantity.
    #[error(
        "charge-basis truncation not converged ({detail}); \
         increase n_max beyond {n_max}"
    )]
    Truncation { n_max: usize, detail: String },
    /// Invalid parameter combination.
    #[error("invalid junction parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Charging energy, Josephson coupling, induced charge, and charge-basis
/// truncation for one junction.
#[derive(Debug, Clone, Copy)]
pub struct JunctionParams {
    /// Charging energy `E_C = (2e)²/2C` (energy units; `> 0`).
    pub e_c: f64,
    /// Josephson coupling energy `E_J` (`≥ 0`).
    pub e_j: f64,
    /// Induced (gate) charge in units of `2e`.
    pub q: f64,
    /// Charge-basis truncation: the basis is `n ∈ [−n_max, n_max]`.
    pub n_max: usize,
}

impl JunctionParams {
    /// Build parameters with the truncation sized automatically:
    /// `n_max = max(8, ceil(|q|) + ceil(4·√(e_j/e_c)) + 8)`.
    ///
    /// The `√` term tracks the width of the charge distribution in the
    /// wide-band (large `E_J/E_C`) regime; the constant floor keeps small
    /// systems comfortably converged. [`spectrum`] re-verifies convergence
    /// by doubling, so the rule is a starting point, not an article of
    /// faith.
    pub fn new(e_c: f64, e_j: f64, q: f64) -> Result<Self, BandsError> {
        if !(e_c > 0.0) || !e_c.is_finite() {
            return Err(BandsError::InvalidParams(format!("e_c = {e_c} must be > 0")));
        }
        if !(e_j >= 0.0) || !e_j.is_finite() {
            return Err(BandsError::InvalidParams(format!("e_j = {e_j} must be ≥ 0")));
        }
        if !q.is_finite() {
            return Err(BandsError::InvalidParams(format!("q = {q} must be finite")));
        }
        let n_max = Self::auto_truncation(e_c, e_j, q);
        Ok(Self { e_c, e_j, q, n_max })
    }

    /// The automatic truncation rule (see [`JunctionParams::new`]).
    pub fn auto_truncation(e_c: f64, e_j: f64, q: f64) -> usize {
        let band_width = (4.0 * (e_j / e_c).sqrt()).ceil() as usize;
        (q.abs().ceil() as usize + band_width + 8).max(8)
    }

    /// Override the truncation explicitly (convergence studies and small
    /// worked examples). [`spectrum`]'s doubling check still applies.
    pub fn with_n_max(mut self, n_max: usize) -> Self {
        assert!(n_max >= 1, "n_max must be ≥ 1");
        self.n_max = n_max;
        self
    }

    /// Same junction, different induced charge.
    pub fn at_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    /// Basis dimension `2·n_max + 1`.
    pub fn dim(&self) -> usize {
        2 * self.n_max + 1
    }

    /// Cooper-pair number of basis index `k` (`n = k − n_max`).
    fn n_of_index(&self, k: usize) -> f64 {
        k as f64 - self.n_max as f64
    }
}

/// Lowest band energies at one `q`, plus the ground-state vector over the
/// charge basis (index `k` ↔ `n = k − n_max`).
#[derive(Debug, Clone)]
pub struct BandResult {
    /// Ascending band energies `ε₀ ≤ ε₁ ≤ …` (as many as requested).
    pub energies: Vec<f64>,
    /// Unit-normalized ground-state amplitudes over the charge basis.
    pub ground_vector: Vec<f64>,
}

/// One row of [`band_sweep`].
#[derive(Debug, Clone)]
pub struct BandSweepRow {
    pub q: f64,
    /// Band energies `ε₀ … ε_{m−1}` at this `q`.
    pub energies: Vec<f64>,
    /// Average Cooper-pair number `⟨n⟩`.
    pub avg_n: f64,
    /// Junction voltage as `V·e` in energy units.
    pub voltage: f64,
}

/// The charge-basis Hamiltonian: `diag(k) = e_c·(n_k − q)²` for
/// `n_k = −n_max … n_max`, off-diagonal `−e_j/2`.
pub fn build_hamiltonian(p: &JunctionParams) -> SymTridiag {
    let dim = p.dim();
    let diag: Vec<f64> = (0..dim)
        .map(|k| {
            let n = p.n_of_index(k);
            p.e_c * (n - p.q) * (n - p.q)
        })
        .collect();
    let offdiag = vec![-p.e_j / 2.0; dim - 1];
    SymTridiag::new(diag, offdiag).expect("validated params produce a well-formed tridiagonal")
}

/// Full eigensolve at `p.n_max` with a truncation-convergence check: the
/// ground energy must move by `< 1e−10·e_c` when `n_max` is doubled.
fn solve_checked(p: &JunctionParams) -> Result<(Vec<f64>, Vec<Vec<f64>>), BandsError> {
    let (vals, vecs) = eig_sym_tridiag(&build_hamiltonian(p))?;
    let doubled = p.with_n_max(2 * p.n_max);
    let (vals2, _) = eig_sym_tridiag(&build_hamiltonian(&doubled))?;
    let shift = (vals[0] - vals2[0]).abs();
    if shift >= TRUNCATION_TOL * p.e_c {
        return Err(BandsError::Truncation {
            n_max: p.n_max,
            detail: format!(
                "doubling n_max moves ε₀ by {shift:.3e} ≥ {TRUNCATION_TOL:.0e}·e_c"
            ),
        });
    }
    Ok((vals, vecs))
}

/// The lowest `m_levels` band energies and the ground-state vector at one
/// `q`.
///
/// Fails with [`BandsError::Truncation`] when doubling `n_max` still moves
/// the ground energy by `≥ 1e−10·e_c`.
pub fn spectrum(p: &JunctionParams, m_levels: usize) -> Result<BandResult, BandsError> {
    if m_levels == 0 || m_levels > p.dim() {
        return Err(BandsError::InvalidParams(format!(
            "m_levels = {m_levels} outside 1..={}",
            p.dim()
        )));
    }
    let (vals, mut vecs) = solve_checked(p)?;
    Ok(BandResult {
        energies: vals[..m_levels].to_vec(),
        ground_vector: std::mem::take(&mut vecs[0]),
    })
}

/// Boltzmann-retained level energies relative to the ground state.
///
/// Returns `(ε₀, [ε_m − ε₀ for retained m], eigenvectors)`. Levels are kept
/// while their relative weight `exp(−(ε_m−ε₀)/t)` is at least `1e−12`; if
/// even the *highest available* level still carries that much weight the
/// truncated basis cannot represent the thermal state and a
/// [`BandsError::Truncation`] is returned.
fn thermal_levels(
    p: &JunctionParams,
    t: f64,
) -> Result<(f64, Vec<f64>, Vec<Vec<f64>>), BandsError> {
    let (vals, vecs) = solve_checked(p)?;
    let e0 = vals[0];
    let cut = -t * BOLTZMANN_CUTOFF.ln(); // ≈ 27.6·t
    let last_gap = vals[vals.len() - 1] - e0;
    if last_gap <= cut {
        return Err(BandsError::Truncation {
            n_max: p.n_max,
            detail: format!(
                "highest retained level still carries Boltzmann weight \
                 {:.1e} ≥ {BOLTZMANN_CUTOFF:.0e} at t = {t}",
                (-last_gap / t).exp()
            ),
        });
    }
    let retained: Vec<f64> = vals
        .iter()
        .map(|v| v - e0)
        .take_while(|gap| *gap <= cut)
        .collect();
    Ok((e0, retained, vecs))
}

/// Junction free energy `F = −T·ln Σ_m exp(−ε_m/T)`; exactly `ε₀` at
/// `t = 0`.
pub fn free_energy(p: &JunctionParams, t: f64) -> Result<f64, BandsError> {
    if !(t >= 0.0) {
        return Err(BandsError::InvalidParams(format!("t = {t} must be ≥ 0")));
    }
    if t == 0.0 {
        let (vals, _) = solve_checked(p)?;
        return Ok(vals[0]);
    }
    let (e0, gaps, _) = thermal_levels(p, t)?;
    // Ground-referenced log-sum-exp keeps the sum well-conditioned.
    let z: f64 = gaps.iter().map(|gap| (-gap / t).exp()).sum();
    Ok(e0 - t * z.ln())
}

/// Average Cooper-pair number `⟨n⟩`.
///
/// Primary route: the thermodynamic identity `⟨n⟩ = q − (1/2E_C)·∂F/∂q`
/// with a central difference (`h = 1e−5`). Within `1e−8` of a half-integer
/// `q` the derivative route is ill-conditioned (at `E_J = 0` the `T = 0`
/// free energy has a kink there), so the Boltzmann-weighted expectation
/// `Σ_m p_m·⟨m|n̂|m⟩` is used instead, averaging uniformly over any
/// degenerate ground multiplet at `t = 0`.
pub fn average_n(p: &JunctionParams, t: f64) -> Result<f64, BandsError> {
    if !(t >= 0.0) {
        return Err(BandsError::InvalidParams(format!("t = {t} must be ≥ 0")));
    }
    let nearest_half = (p.q - 0.5).round() + 0.5;
    if (p.q - nearest_half).abs() < 1e-8 {
        return direct_expectation(p, t);
    }
    let mut inner: Result<(), BandsError> = Ok(());
    let df = central_difference(
        |q| match free_energy(&p.at_q(q), t) {
            Ok(f) => f,
            Err(e) => {
                // Remember the physics error; surface NaN so the kernel
                // reports InvalidFunction if we don't get there first.
                if inner.is_ok() {
                    inner = Err(e);
                }
                f64::NAN
            }
        },
        p.q,
        DEFAULT_FD_STEP,
    );
    inner?;
    Ok(p.q - df? / (2.0 * p.e_c))
}

/// Direct Boltzmann-weighted expectation `Σ_m p_m·⟨m|n̂|m⟩` (the
/// Hellmann–Feynman cross-check of the derivative route, and the primary
/// route at degenerate points).
pub fn direct_expectation(p: &JunctionParams, t: f64) -> Result<f64, BandsError> {
    let expectation = |p: &JunctionParams, v: &[f64]| -> f64 {
        v.iter()
            .enumerate()
            .map(|(k, amp)| amp * amp * p.n_of_index(k))
            .sum()
    };
    if t == 0.0 {
        let (vals, vecs) = solve_checked(p)?;
        // Uniform average over the (near-)degenerate ground multiplet.
        let tol = numerics::DEGENERACY_REL_TOL * vals[0].abs().max(1.0);
        let multiplet: Vec<&Vec<f64>> = vals
            .iter()
            .zip(&vecs)
            .take_while(|(v, _)| (**v - vals[0]).abs() < tol)
            .map(|(_, vec)| vec)
            .collect();
        let sum: f64 = multiplet.iter().map(|v| expectation(p, v)).sum();
        return Ok(sum / multiplet.len() as f64);
    }
    let (_, gaps, vecs) = thermal_levels(p, t)?;
    let mut z = 0.0;
    let mut acc = 0.0;
    for (gap, vec) in gaps.iter().zip(&vecs) {
        let w = (-gap / t).exp();
        z += w;
        acc += w * expectation(p, vec);
    }
    Ok(acc / z)
}

/// Junction voltage reported as `V·e` in energy units:
/// `V·e = e_c·(⟨n⟩ − q)`.
pub fn junction_voltage(p: &JunctionParams, t: f64) -> Result<f64, BandsError> {
    Ok(p.e_c * (average_n(p, t)? - p.q))
}

/// One sweep row: bands, `⟨n⟩`, and voltage at a single `q`.
///
/// `n_max = None` applies the automatic truncation rule at each `q`. This
/// is the unit of work the CLI dispatches to its thread pool; computing a
/// row involves no shared state, so sweep results are identical however
/// the rows are scheduled.
pub fn band_row(
    e_c: f64,
    e_j: f64,
    n_max: Option<usize>,
    q: f64,
    t: f64,
    m_levels: usize,
) -> Result<BandSweepRow, BandsError> {
    let mut p = JunctionParams::new(e_c, e_j, q)?;
    if let Some(n) = n_max {
        p = p.with_n_max(n);
    }
    let band = spectrum(&p, m_levels)?;
    let avg_n = average_n(&p, t)?;
    let voltage = p.e_c * (avg_n - q);
    Ok(BandSweepRow {
        q,
        energies: band.energies,
        avg_n,
        voltage,
    })
}

/// Bands, `⟨n⟩`, and voltage over a grid of induced charges, in grid
/// order.
pub fn band_sweep(
    e_c: f64,
    e_j: f64,
    n_max: Option<usize>,
    q_grid: &[f64],
    t: f64,
    m_levels: usize,
) -> Result<Vec<BandSweepRow>, BandsError> {
    q_grid
        .iter()
        .map(|&q| band_row(e_c, e_j, n_max, q, t, m_levels))
        .collect()
}

//! Two-level reductions of the junction circuits: the charge-qubit gap
//! near a charge degeneracy, and the rf-SQUID flux qubit built from a
//! double-well potential.
//!
//! # Charge qubit
//!
//! Near `q = 1/2` the two charge states `n = 0, 1` are nearly degenerate
//! and the junction reduces to a two-state Hamiltonian with diagonal
//! splitting `2·E_C·(q − 1/2)` and tunneling matrix element `E_J/2`, so
//! the level gap is `2·√((E_C(q−1/2))² + (E_J/2)²)` — minimized at the
//! degeneracy point where it equals `E_J`.
//!
//! # rf-SQUID flux qubit
//!
//! A junction closed by a loop of inductance `L` sees the potential
//! `U(φ) = −E_J·cos φ + E_L·(φ − φ_e)²/2`, with `E_L = (Φ₀/2π)²/L` the
//! inductive energy and `φ_e = 2πΦ_e/Φ₀` the external flux phase. For
//! `β_L ≡ E_J/E_L > 1` and flux bias near half a flux quantum
//! (`φ_e ≈ π`) the potential develops two minima separated by a barrier;
//! the two well-bottom states form the flux qubit. This module locates
//! the wells, reports their geometry, the small-oscillation (plasma)
//! frequency `ω_p = √(2·E_C·U″(φ_min))`, and the flux-qubit bias
//! `ε = E_L·(φ_e − π)·Δφ` (with `Δφ` half the inter-minima distance of
//! the symmetric configuration; in flux units `ΔΦ = (Φ₀/2π)·Δφ`).

use thiserror::Error;

/// U′ at a reported stationary point is driven below this multiple of
/// `e_j`.
const ROOT_TOL: f64 = 1e-12;

/// Scan step for bracketing stationary points of the potential.
const SCAN_STEP: f64 = 1e-3;

/// Errors from the two-level reductions.
#[derive(Debug, Error)]
pub enum QubitError {
    /// The SQUID potential has no double well for these parameters
    /// (e.g. `β_L ≤ 1`, or the flux bias tilted one well away).
    #[error("no double well: {0}")]
    SingleWell(String),
    /// Invalid parameter combination.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Charge-qubit parameters near the `q = 1/2` degeneracy.
#[derive(Debug, Clone, Copy)]
pub struct ChargeQubitParams {
    /// Charging energy (`> 0`).
    pub e_c: f64,
    /// Josephson coupling (`≥ 0`).
    pub e_j: f64,
    /// Induced charge in units of `2e`, near `1/2`.
    pub q: f64,
}

/// rf-SQUID loop parameters.
#[derive(Debug, Clone, Copy)]
pub struct SquidParams {
    /// Josephson coupling (`≥ 0`).
    pub e_j: f64,
    /// Charging energy (`> 0`).
    pub e_c: f64,
    /// Inductive energy `(Φ₀/2π)²/L` (`> 0`).
    pub e_l: f64,
    /// External flux phase `2πΦ_e/Φ₀`.
    pub phi_e: f64,
}

impl SquidParams {
    pub fn new(e_j: f64, e_c: f64, e_l: f64, phi_e: f64) -> Result<Self, QubitError> {
        if !(e_j >= 0.0) || !e_j.is_finite() {
            return Err(QubitError::InvalidParams(format!("e_j = {e_j} must be ≥ 0")));
        }
        if !(e_c > 0.0) || !e_c.is_finite() {
            return Err(QubitError::InvalidParams(format!("e_c = {e_c} must be > 0")));
        }
        if !(e_l > 0.0) || !e_l.is_finite() {
            return Err(QubitError::InvalidParams(format!("e_l = {e_l} must be > 0")));
        }
        if !phi_e.is_finite() {
            return Err(QubitError::InvalidParams(format!(
                "phi_e = {phi_e} must be finite"
            )));
        }
        Ok(Self { e_j, e_c, e_l, phi_e })
    }

    /// Screening parameter `β_L = E_J/E_L`; the double well requires
    /// `β_L > 1`.
    pub fn beta_l(&self) -> f64 {
        self.e_j / self.e_l
    }

    /// With the same loop, a different external flux phase.
    pub fn at_phi_e(mut self, phi_e: f64) -> Self {
        self.phi_e = phi_e;
        self
    }
}

/// Geometry of a double-well SQUID potential.
#[derive(Debug, Clone, Copy)]
pub struct DoubleWell {
    /// Phase of the left minimum.
    pub phi_left: f64,
    /// Phase of the right minimum.
    pub phi_right: f64,
    /// Phase of the barrier top between them.
    pub barrier_phi: f64,
    /// Potential at the left minimum.
    pub u_left: f64,
    /// Potential at the right minimum.
    pub u_right: f64,
    /// Potential at the barrier top.
    pub u_barrier: f64,
    /// Half the inter-minima phase distance; in flux units
    /// `ΔΦ = (Φ₀/2π)·delta_phi`.
    pub delta_phi: f64,
}

/// Which minimum of a [`DoubleWell`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Well {
    Left,
    Right,
}

/// Level splitting of the two-state charge Hamiltonian:
/// `2·√((e_c(q−1/2))² + (e_j/2)²)`.
pub fn charge_qubit_gap(p: &ChargeQubitParams) -> f64 {
    let diag = p.e_c * (p.q - 0.5);
    let offdiag = p.e_j / 2.0;
    2.0 * diag.hypot(offdiag)
}

/// The SQUID potential `U(φ) = −e_j·cos φ + e_l·(φ − φ_e)²/2`.
pub fn squid_potential(p: &SquidParams, phi: f64) -> f64 {
    -p.e_j * phi.cos() + 0.5 * p.e_l * (phi - p.phi_e) * (phi - p.phi_e)
}

/// `U′(φ) = e_j·sin φ + e_l·(φ − φ_e)`.
fn potential_slope(p: &SquidParams, phi: f64) -> f64 {
    p.e_j * phi.sin() + p.e_l * (phi - p.phi_e)
}

/// `U″(φ) = e_j·cos φ + e_l`.
fn potential_curvature(p: &SquidParams, phi: f64) -> f64 {
    p.e_j * phi.cos() + p.e_l
}

/// Locate the double well of the SQUID potential.
///
/// Stationary points are bracketed by a `1e−3`-spaced scan of
/// `[φ_e − π, φ_e + π]` and refined by bisection on `U′` until
/// `|U′| < 1e−12·e_j`; minima and the barrier are told apart by the sign
/// of `U″`. Requires `φ_e ∈ [π/2, 3π/2]` (the search window is built
/// around half a flux quantum).
///
/// Fails with [`QubitError::SingleWell`] when `β_L ≤ 1 + 1e−9` (the
/// potential is effectively convex) or when the flux bias has tilted one
/// minimum out of existence.
pub fn find_double_well(p: &SquidParams) -> Result<DoubleWell, QubitError> {
    use std::f64::consts::PI;
    if !(PI / 2.0..=1.5 * PI).contains(&p.phi_e) {
        return Err(QubitError::InvalidParams(format!(
            "phi_e = {} outside the search window [π/2, 3π/2]",
            p.phi_e
        )));
    }
    if p.beta_l() <= 1.0 + 1e-9 {
        return Err(QubitError::SingleWell(format!(
            "β_L = {:.6} ≤ 1: inductive energy dominates, potential has a single minimum",
            p.beta_l()
        )));
    }

    // Bracket sign changes of U′ on a uniform scan.
    let lo = p.phi_e - PI;
    let steps = (2.0 * PI / SCAN_STEP).ceil() as usize;
    let mut roots: Vec<f64> = Vec::new();
    let mut prev_phi = lo;
    let mut prev_slope = potential_slope(p, lo);
    for k in 1..=steps {
        let phi = lo + 2.0 * PI * (k as f64) / (steps as f64);
        let slope = potential_slope(p, phi);
        if prev_slope == 0.0 {
            roots.push(prev_phi);
        } else if prev_slope * slope < 0.0 {
            roots.push(bisect_slope(p, prev_phi, phi)?);
        }
        prev_phi = phi;
        prev_slope = slope;
    }

    let minima: Vec<f64> = roots
        .iter()
        .copied()
        .filter(|&r| potential_curvature(p, r) > 0.0)
        .collect();
    let barriers: Vec<f64> = roots
        .iter()
        .copied()
        .filter(|&r| potential_curvature(p, r) < 0.0)
        .collect();
    if minima.len() != 2 || barriers.len() != 1 {
        return Err(QubitError::SingleWell(format!(
            "found {} minima and {} barriers in the search window \
             (flux bias has removed the second well)",
            minima.len(),
            barriers.len()
        )));
    }
    let (phi_left, phi_right) = (minima[0], minima[1]);
    let barrier_phi = barriers[0];
    if !(phi_left < barrier_phi && barrier_phi < phi_right) {
        return Err(QubitError::SingleWell(
            "barrier does not separate the two minima".into(),
        ));
    }
    Ok(DoubleWell {
        phi_left,
        phi_right,
        barrier_phi,
        u_left: squid_potential(p, phi_left),
        u_right: squid_potential(p, phi_right),
        u_barrier: squid_potential(p, barrier_phi),
        delta_phi: 0.5 * (phi_right - phi_left),
    })
}

/// Bisection on `U′` inside a sign-change bracket, to `|U′| < 1e−12·e_j`.
fn bisect_slope(p: &SquidParams, mut a: f64, mut b: f64) -> Result<f64, QubitError> {
    let tol = ROOT_TOL * p.e_j;
    let mut fa = potential_slope(p, a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = potential_slope(p, mid);
        if fm.abs() < tol {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
        if b - a <= f64::EPSILON * a.abs().max(b.abs()) {
            // Bracket at f64 resolution; accept the midpoint if the slope
            // is as small as the local curvature allows.
            let mid = 0.5 * (a + b);
            return Ok(mid);
        }
    }
    Err(QubitError::InvalidParams(
        "stationary-point bisection failed to converge".into(),
    ))
}

/// Small-oscillation (plasma) frequency about one minimum:
/// `ω_p = √(2·e_c·U″(φ_min))` in units `ħ = 1`.
pub fn plasma_frequency(p: &SquidParams, well: Well) -> Result<f64, QubitError> {
    let dw = find_double_well(p)?;
    let phi = match well {
        Well::Left => dw.phi_left,
        Well::Right => dw.phi_right,
    };
    Ok((2.0 * p.e_c * potential_curvature(p, phi)).sqrt())
}

/// Flux-qubit bias `ε = e_l·(φ_e − π)·Δφ`, the well-energy asymmetry per
/// unit state separation, with `Δφ` taken from the symmetric
/// (`φ_e = π`) configuration of the same loop.
///
/// Antisymmetric in `φ_e − π` and zero at the degeneracy point. In flux
/// units this is `(Φ_e − Φ₀/2)·ΔΦ/L`.
pub fn flux_qubit_bias(p: &SquidParams) -> Result<f64, QubitError> {
    let symmetric = find_double_well(&p.at_phi_e(std::f64::consts::PI))?;
    Ok(p.e_l * (p.phi_e - std::f64::consts::PI) * symmetric.delta_phi)
}

/// One row of [`squid_sweep`]: well geometry, plasma frequencies, and
/// flux-qubit bias at a single external flux phase.
#[derive(Debug, Clone, Copy)]
pub struct SquidSweepRow {
    pub phi_e: f64,
    pub well: DoubleWell,
    pub omega_p_left: f64,
    pub omega_p_right: f64,
    pub bias: f64,
}

/// Sweep-point worker: full double-well characterization at one `φ_e`.
pub fn squid_row(e_j: f64, e_c: f64, e_l: f64, phi_e: f64) -> Result<SquidSweepRow, QubitError> {
    let p = SquidParams::new(e_j, e_c, e_l, phi_e)?;
    let well = find_double_well(&p)?;
    Ok(SquidSweepRow {
        phi_e,
        well,
        omega_p_left: (2.0 * e_c * potential_curvature(&p, well.phi_left)).sqrt(),
        omega_p_right: (2.0 * e_c * potential_curvature(&p, well.phi_right)).sqrt(),
        bias: flux_qubit_bias(&p)?,
    })
}

/// Double-well characterization over a grid of external flux phases, in
/// grid order.
pub fn squid_sweep(
    e_j: f64,
    e_c: f64,
    e_l: f64,
    phi_e_grid: &[f64],
) -> Result<Vec<SquidSweepRow>, QubitError> {
    phi_e_grid
        .iter()
        .map(|&phi_e| squid_row(e_j, e_c, e_l, phi_e))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gap_at_degeneracy_is_tunneling_energy() {
        let p = ChargeQubitParams { e_c: 1.0, e_j: 0.3, q: 0.5 };
        assert_eq!(charge_qubit_gap(&p), 0.3);
    }

    #[test]
    fn gap_without_tunneling_is_diagonal_splitting() {
        let p = ChargeQubitParams { e_c: 2.0, e_j: 0.0, q: 0.4 };
        assert!((charge_qubit_gap(&p) - 2.0 * 2.0 * 0.1).abs() < 1e-15);
    }

    #[test]
    fn gap_minimized_at_half_charge() {
        let p = |q| ChargeQubitParams { e_c: 1.0, e_j: 0.2, q };
        let g_min = charge_qubit_gap(&p(0.5));
        assert_eq!(g_min, 0.2);
        for q in [0.41, 0.47, 0.53, 0.6] {
            assert!(charge_qubit_gap(&p(q)) > g_min);
        }
    }

    #[test]
    fn potential_values_and_symmetry() {
        let p = SquidParams::new(1.4, 0.1, 1.0, PI).unwrap();
        // At φ = φ_e with e_j = 0 the potential vanishes.
        let p0 = SquidParams::new(0.0, 0.1, 1.0, PI).unwrap();
        assert_eq!(squid_potential(&p0, PI), 0.0);
        // At φ = φ_e = π: U = +e_j.
        assert!((squid_potential(&p, PI) - 1.4).abs() < 1e-15);
        // Symmetric about π at half flux quantum.
        let d = 0.3;
        let diff = squid_potential(&p, PI + d) - squid_potential(&p, PI - d);
        assert!(diff.abs() < 1e-14);
    }

    #[test]
    fn convex_potential_is_single_well() {
        let p = SquidParams::new(0.8, 0.1, 1.0, PI).unwrap();
        assert!(matches!(
            find_double_well(&p),
            Err(QubitError::SingleWell(_))
        ));
    }

    #[test]
    fn shallow_double_well_matches_quartic_expansion() {
        // Just above threshold the wells sit at ±√(6(1 − 1/β_L)) from π;
        // the quartic expansion is accurate to O(delta_phi²) ≈ 3%.
        let p = SquidParams::new(1.05, 0.1, 1.0, PI).unwrap();
        let dw = find_double_well(&p).unwrap();
        let quartic = (6.0 * (1.0 - 1.0 / 1.05_f64)).sqrt();
        assert!(
            (dw.delta_phi - quartic).abs() < 0.03 * quartic,
            "delta_phi = {}, quartic estimate {}",
            dw.delta_phi,
            quartic
        );
    }

    #[test]
    fn symmetric_wells_are_degenerate() {
        let p = SquidParams::new(2.0, 0.1, 1.0, PI).unwrap();
        let dw = find_double_well(&p).unwrap();
        assert!(
            (dw.u_left - dw.u_right).abs() < 1e-12 * p.e_j,
            "wells differ by {:.3e}",
            dw.u_left - dw.u_right
        );
        assert!(dw.phi_left < dw.barrier_phi && dw.barrier_phi < dw.phi_right);
        assert!(dw.u_barrier >= dw.u_left.max(dw.u_right));
        // U′ driven to the contract tolerance at every stationary point.
        for phi in [dw.phi_left, dw.phi_right, dw.barrier_phi] {
            assert!(potential_slope(&p, phi).abs() < 1e-12 * p.e_j);
        }
    }

    #[test]
    fn plasma_frequency_symmetric_wells_match() {
        let p = SquidParams::new(2.0, 0.05, 1.0, PI).unwrap();
        let wl = plasma_frequency(&p, Well::Left).unwrap();
        let wr = plasma_frequency(&p, Well::Right).unwrap();
        assert!((wl - wr).abs() < 1e-12);
    }

    #[test]
    fn plasma_frequency_large_beta_limit() {
        // e_l → 0 analog: U″ at the minimum tends to e_j, so
        // ω_p → √(2·e_j·e_c). β_L = 2000 gets within ~0.1%.
        let p = SquidParams::new(2.0, 0.05, 0.001, PI).unwrap();
        let w = plasma_frequency(&p, Well::Left).unwrap();
        let limit = (2.0 * 2.0 * 0.05f64).sqrt();
        assert!((w - limit).abs() < 2e-3 * limit, "ω_p = {w}, limit {limit}");
    }

    #[test]
    fn bias_zero_at_degeneracy_and_odd() {
        let p = SquidParams::new(2.0, 0.1, 1.0, PI).unwrap();
        assert_eq!(flux_qubit_bias(&p).unwrap(), 0.0);
        let d = 0.07;
        let plus = flux_qubit_bias(&p.at_phi_e(PI + d)).unwrap();
        let minus = flux_qubit_bias(&p.at_phi_e(PI - d)).unwrap();
        assert!(plus > 0.0, "right well lowered for phi_e > π");
        assert!((plus + minus).abs() < 1e-12 * p.e_j);
    }

    #[test]
    fn bias_matches_well_depth_difference() {
        // Linear response: the well energies split by 2·ε under a small
        // tilt, so ε ≈ (u_left − u_right)/2.
        let p = SquidParams::new(2.0, 0.1, 1.0, PI + 0.01).unwrap();
        let eps = flux_qubit_bias(&p).unwrap();
        let dw = find_double_well(&p).unwrap();
        let half_depth_diff = 0.5 * (dw.u_left - dw.u_right);
        assert!(
            (eps - half_depth_diff).abs() < 0.1 * half_depth_diff.abs(),
            "ε = {eps}, (u_l − u_r)/2 = {half_depth_diff}"
        );
    }

    #[test]
    fn tilted_well_eventually_collapses() {
        // β_L barely above 1: a modest tilt removes the upper well.
        let p = SquidParams::new(1.02, 0.1, 1.0, PI + 0.3).unwrap();
        assert!(matches!(
            find_double_well(&p),
            Err(QubitError::SingleWell(_))
        ));
    }

    #[test]
    fn window_precondition_enforced() {
        let p = SquidParams::new(2.0, 0.1, 1.0, 0.1).unwrap();
        assert!(matches!(
            find_double_well(&p),
            Err(QubitError::InvalidParams(_))
        ));
    }
}

//! Independent oracles for the resonant-level detector: closed
//! antiderivative routes against adaptive quadrature, the classical
//! telegraph (sequential-tunneling) limit of every observable — which
//! independently fixes the sign of the current–charge cross
//! correlator — and full counting statistics of the two-state chain.

use mesojj::detector::{self, DetectorParams};
use mesojj::numerics::QuadratureSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn operating_point(gamma1: f64, gamma2: f64, z: f64, ev_over_gamma: f64) -> DetectorParams {
    let gamma = gamma1 + gamma2;
    let mu1 = z * gamma;
    DetectorParams::new(gamma1, gamma2, 0.0, mu1, mu1 - ev_over_gamma * gamma, 0.0).unwrap()
}

/// All five closed zero-temperature routes must agree with adaptive
/// quadrature of their defining integrands to 1e−8 relative.
#[test]
fn antiderivative_vs_quadrature_agreement() {
    let spec = QuadratureSpec::new(1e-14, 1e-12, 400).unwrap();
    let points = [
        (0.5, 0.5, 0.0, 1.0),
        (0.5, 0.5, -5.0, 20.0),
        (0.5, 0.5, 3.0, 10.0),
        (0.8, 0.2, -2.0, 6.0),
    ];
    for (g1, g2, z, ev) in points {
        let p = operating_point(g1, g2, z, ev);
        let pairs = [
            (
                detector::backaction_noise(&p).unwrap(),
                detector::backaction_noise_quadrature(&p, &spec).unwrap(),
                "S_Q",
            ),
            (
                detector::current_noise(&p).unwrap(),
                detector::current_noise_quadrature(&p, &spec).unwrap(),
                "S_I",
            ),
            (
                detector::response_coefficient(&p).unwrap(),
                detector::response_coefficient_quadrature(&p, &spec).unwrap(),
                "lambda",
            ),
            (
                detector::average_current(&p).unwrap(),
                detector::average_current_quadrature(&p, &spec).unwrap(),
                "current",
            ),
        ];
        for (closed, quad, name) in pairs {
            assert!(
                (closed - quad).abs() <= 1e-8 * closed.abs().max(1e-12),
                "{name} at z={z}, eV={ev}γ: closed {closed} vs quadrature {quad}"
            );
        }
        let s_closed = detector::cross_correlator(&p).unwrap();
        let s_quad = detector::cross_correlator_quadrature(&p, &spec).unwrap();
        assert!(
            (s_closed - s_quad).norm() <= 1e-8 * s_closed.norm().max(1e-12),
            "S_IQ at z={z}, eV={ev}γ: {s_closed} vs {s_quad}"
        );
    }
}

/// Classical telegraph oracle. In the wide-bias sequential-tunneling
/// limit the island charge is a two-state Markov process with entry
/// rate Γin = 2γ₁ and exit rate Γout = 2γ₂ (occupation p = γ₁/γ).
/// Standard telegraph algebra gives, in the 1/2π spectral convention:
///
///   ⟨I⟩   = e·ΓinΓout/Γtot                    = 2eγ₁γ₂/γ
///   S_Q   = p(1−p)/(π·Γtot)                   = e²γ₁γ₂/(2πγ³)
///   S_I   = Fano·e⟨I⟩/2π, Fano = (Γin²+Γout²)/Γtot² = (γ₁²+γ₂²)/γ²
///   S_IQ  = (e·Γout·p/2πΓtot)·[(1−p) − p]     = e²γ₁γ₂(γ₂−γ₁)/(2πγ³)
///
/// The S_IQ line integrates the asymmetric exit-event/occupation
/// correlation C(t) = e·Γout·p·e^{−Γtot|t|}[(1−p)θ(t) − p·θ(−t)]: the
/// classical route independently fixes Re S_IQ ∝ (γ₂ − γ₁).
#[test]
fn telegraph_limit_of_all_observables() {
    for (g1, g2) in [(0.3, 0.7), (0.65, 0.35), (0.5, 0.5)] {
        let gamma: f64 = g1 + g2;
        let p = operating_point(g1, g2, 2000.0, 4000.0);

        let i_cl = 2.0 * g1 * g2 / gamma;
        let i = detector::average_current(&p).unwrap();
        assert!((i - i_cl).abs() < 1e-3 * i_cl, "⟨I⟩ {i} vs telegraph {i_cl}");

        let sq_cl = g1 * g2 / (2.0 * PI * gamma.powi(3));
        let sq = detector::backaction_noise(&p).unwrap();
        assert!((sq - sq_cl).abs() < 1e-5 * sq_cl, "S_Q {sq} vs telegraph {sq_cl}");

        let fano_cl = (g1 * g1 + g2 * g2) / (gamma * gamma);
        let si_cl = fano_cl * i_cl / (2.0 * PI);
        let si = detector::current_noise(&p).unwrap();
        assert!((si - si_cl).abs() < 2e-3 * si_cl, "S_I {si} vs telegraph {si_cl}");

        let siq_cl = g1 * g2 * (g2 - g1) / (2.0 * PI * gamma.powi(3));
        let siq = detector::cross_correlator(&p).unwrap();
        assert!(
            (siq.re - siq_cl).abs() < 1e-5 * sq_cl,
            "Re S_IQ {} vs telegraph {siq_cl}",
            siq.re
        );
    }
}

/// Full counting statistics of the two-state chain: the dominant
/// eigenvalue of the tilted rate matrix is
/// `λ(s) = [−Γtot + √(Γtot² − 4ΓinΓout(1−e^s))]/2`; its first two
/// derivatives at s = 0 are the current and (2π×) the shot noise.
/// Differentiated numerically — no cumulant algebra shared with either
/// the telegraph formulas or the quantum integrals.
#[test]
fn counting_statistics_confirms_telegraph_cumulants() {
    for (g1, g2) in [(0.3, 0.7), (0.5, 0.5)] {
        let (gin, gout) = (2.0 * g1, 2.0 * g2);
        let gtot = gin + gout;
        let lam = |s: f64| (-gtot + (gtot * gtot - 4.0 * gin * gout * (1.0 - s.exp())).sqrt()) / 2.0;
        let h = 1e-4;
        let c1 = (lam(h) - lam(-h)) / (2.0 * h);
        let c2 = (lam(h) - 2.0 * lam(0.0) + lam(-h)) / (h * h);

        let c1_cl = gin * gout / gtot;
        assert!((c1 - c1_cl).abs() < 1e-7 * c1_cl, "c1 {c1} vs {c1_cl}");
        let fano_cl = (gin * gin + gout * gout) / (gtot * gtot);
        assert!(
            (c2 - fano_cl * c1_cl).abs() < 1e-5 * c1_cl,
            "c2 {c2} vs {}",
            fano_cl * c1_cl
        );

        // Tie to the quantum wide-bias values.
        let p = operating_point(g1, g2, 2000.0, 4000.0);
        let i = detector::average_current(&p).unwrap();
        assert!((i - c1).abs() < 1e-3 * c1);
        let si = detector::current_noise(&p).unwrap();
        assert!((si - c2 / (2.0 * PI)).abs() < 2e-3 * si);
    }
}

/// Per-energy quantum-limit identities on seeded random draws of every
/// kernel argument.
#[test]
fn randomized_pointwise_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xde7e_c70a);
    for trial in 0..100 {
        let g1 = rng.gen_range(0.05..2.0);
        let g2 = rng.gen_range(0.05..2.0);
        let eps = rng.gen_range(-3.0..3.0);
        let p = DetectorParams::new(g1, g2, eps, 1.0, -1.0, 0.0).unwrap();
        let nu = rng.gen_range(-6.0..6.0);
        let r = detector::pointwise_quantum_limit(&p, nu);
        assert!(r.product < 1e-12, "trial {trial}: product {}", r.product);
        assert!(r.response < 1e-12, "trial {trial}: response {}", r.response);
    }
}

/// The current-noise kernel equals the Landauer partition form
/// `(e²/4π²)·D(ν)(1−D(ν))` at seeded random energies.
#[test]
fn shot_noise_kernel_partition_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5407_0000);
    for trial in 0..100 {
        let g1 = rng.gen_range(0.05..1.5);
        let g2 = rng.gen_range(0.05..1.5);
        let eps = rng.gen_range(-2.0..2.0);
        let p = DetectorParams::new(g1, g2, eps, 1.0, -1.0, 0.0).unwrap();
        let nu = rng.gen_range(-5.0..5.0);
        let k = detector::pointwise_kernels(&p, nu);
        let gamma = g1 + g2;
        let x = nu - eps;
        let d = 4.0 * g1 * g2 / (x * x + gamma * gamma);
        let expect = d * (1.0 - d) / (4.0 * PI * PI);
        assert!(
            (k.s_i - expect).abs() < 1e-13 * expect.abs().max(1e-10),
            "trial {trial}: kernel {} vs D(1−D) form {expect}",
            k.s_i
        );
    }
}

/// The integrated energy sensitivity respects the ħ/2 quantum bound for
/// arbitrary windows and couplings (Cauchy–Schwarz on the kernels).
#[test]
fn sensitivity_never_beats_quantum_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb0c4_11ed);
    let mut checked = 0;
    for _ in 0..60 {
        let g1 = rng.gen_range(0.1..2.0);
        let g2 = rng.gen_range(0.1..2.0);
        let eps = rng.gen_range(-2.0..2.0);
        let mu2 = rng.gen_range(-8.0..2.0);
        let mu1 = mu2 + rng.gen_range(0.1..10.0);
        let p = DetectorParams::new(g1, g2, eps, mu1, mu2, 0.0).unwrap();
        match detector::energy_sensitivity(&p) {
            Ok(eps_d) => {
                assert!(eps_d >= 0.5 - 1e-9, "ε_d = {eps_d} beats ħ/2");
                checked += 1;
            }
            Err(detector::DetectorError::ZeroResponse) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }
    assert!(checked > 40, "only {checked} draws exercised the bound");
}

/// Deep-collector closed forms against the integral pipeline with the
/// collector pushed far enough (5000γ) that window-truncation tails sit
/// below the comparison tolerance.
#[test]
fn sweep_closed_forms_cross_validated() {
    for (g1, g2) in [(0.5, 0.5), (10.0 / 11.0, 1.0 / 11.0)] {
        let gamma: f64 = g1 + g2;
        for z in [-8.0, -2.0, 0.0, 1.5, 4.0] {
            let row = detector::sensitivity_row(g1, g2, z).unwrap();
            let p =
                DetectorParams::new(g1, g2, 0.0, z * gamma, -5000.0 * gamma, 0.0).unwrap();
            let sq = detector::backaction_noise(&p).unwrap();
            assert!((row.s_q - sq).abs() < 1e-6 * sq.abs().max(1e-9), "S_Q at z={z}");
            // S_I's 1/x² tail leaves ~2e−4 absolute (bracket units) at
            // 5000γ depth; far-negative z shrinks the bracket itself,
            // so the relative allowance must grow with |z|.
            let si = detector::current_noise(&p).unwrap();
            assert!((row.s_i - si).abs() < 4e-3 * si.abs(), "S_I at z={z}");
            let lam = detector::response_coefficient(&p).unwrap();
            assert!((row.lambda - lam).abs() < 1e-5 * lam.abs(), "λ at z={z}");
            let eps_d = detector::energy_sensitivity(&p).unwrap();
            assert!(
                (row.eps_over_hbar - eps_d).abs() < 2e-3 * eps_d,
                "ε at z={z}: closed {} vs pipeline {eps_d}",
                row.eps_over_hbar
            );
            let snr = detector::signal_to_noise(&p).unwrap();
            assert!((row.snr - snr).abs() < 5e-3 * snr, "R at z={z}");
        }
    }
}

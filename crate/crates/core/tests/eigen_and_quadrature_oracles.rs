//! Cross-solver and antiderivative oracles: the two eigensolvers are
//! checked against each other and against characteristic-polynomial
//! invariants; every closed antiderivative used by the detector module
//! is verified against differentiation and adaptive quadrature.

use mesojj::numerics::{
    central_difference, eig_hermitian, eig_sym_tridiag, integrate_adaptive, HermitianMatrix,
    QuadratureSpec, SymTridiag,
};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The implicit-QL tridiagonal path and the cyclic-Jacobi dense path
/// must agree on the same matrix: seeded random tridiagonals at the
/// largest dimension the dense solver accepts.
#[test]
fn tridiagonal_ql_matches_dense_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51de_c0de);
    for trial in 0..20 {
        let n = rng.gen_range(2..=16);
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let off: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();

        let tri = SymTridiag::new(diag.clone(), off.clone()).unwrap();
        let (ql_vals, ql_vecs) = eig_sym_tridiag(&tri).unwrap();

        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut row = vec![0.0; i + 1];
                row[i] = diag[i];
                if i > 0 {
                    row[i - 1] = off[i - 1];
                }
                row
            })
            .collect();
        let row_refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let dense = HermitianMatrix::from_real_lower(&row_refs).unwrap();
        let (jac_vals, jac_vecs) = eig_hermitian(&dense).unwrap();

        let scale = tri.norm_inf().max(1.0);
        for k in 0..n {
            assert!(
                (ql_vals[k] - jac_vals[k]).abs() <= 1e-12 * scale,
                "trial {trial}: eigenvalue {k}: QL {} vs Jacobi {}",
                ql_vals[k],
                jac_vals[k]
            );
        }
        // Eigenvectors agree up to sign; compare |overlap| when the
        // eigenvalue is simple.
        for k in 0..n {
            let simple = (k == 0 || ql_vals[k] - ql_vals[k - 1] > 1e-8 * scale)
                && (k + 1 == n || ql_vals[k + 1] - ql_vals[k] > 1e-8 * scale);
            if !simple {
                continue;
            }
            let overlap: C64 = (0..n)
                .map(|i| jac_vecs[k][i].conj() * C64::new(ql_vecs[k][i], 0.0))
                .sum();
            assert!(
                (overlap.norm() - 1.0).abs() < 1e-10,
                "trial {trial}: eigenvector {k} overlap {}",
                overlap.norm()
            );
        }
    }
}

/// Characteristic-polynomial oracle for 3×3 Hermitian matrices: the
/// computed eigenvalues must reproduce the trace, the sum of principal
/// 2×2 minors, and the determinant — coefficients evaluated directly
/// from the matrix entries, never touching the eigensolver.
#[test]
fn three_level_characteristic_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc4a3_11e5);
    for trial in 0..50 {
        let d: [f64; 3] = [
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        ];
        let lower: Vec<C64> = (0..3)
            .map(|_| C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
            .collect();
        let m = HermitianMatrix::from_lower(d.to_vec(), lower.clone()).unwrap();
        let (vals, _) = eig_hermitian(&m).unwrap();

        let a = |i: usize, j: usize| m.entry(i, j);
        let trace = d[0] + d[1] + d[2];
        let minor_sum = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)).re
            + (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)).re
            + (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)).re;
        let det = (a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
            - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)))
        .re;

        let scale = m.norm_inf().max(1.0);
        let s1 = vals[0] + vals[1] + vals[2];
        let s2 = vals[0] * vals[1] + vals[0] * vals[2] + vals[1] * vals[2];
        let s3 = vals[0] * vals[1] * vals[2];
        assert!((s1 - trace).abs() < 1e-12 * scale, "trial {trial}: trace");
        assert!(
            (s2 - minor_sum).abs() < 1e-11 * scale * scale,
            "trial {trial}: minor sum {s2} vs {minor_sum}"
        );
        assert!(
            (s3 - det).abs() < 1e-11 * scale * scale * scale,
            "trial {trial}: determinant {s3} vs {det}"
        );
    }
}

/// The three closed antiderivatives behind the zero-temperature
/// detector formulas, re-derived numerically: differentiating each one
/// recovers its integrand, and adaptive quadrature over random windows
/// reproduces the endpoint differences. The squared-Lorentzian form
/// `(1/2γ³)[arctan(x/γ) + xγ/(x²+γ²)]` carries the 1/2 prefactor this
/// check exists to pin down.
#[test]
fn detector_antiderivatives_verified() {
    let spec = QuadratureSpec::new(1e-13, 1e-12, 400).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xa27f_1234_5678);
    for _ in 0..25 {
        let gamma: f64 = rng.gen_range(0.3..2.5);
        let lo = rng.gen_range(-8.0..0.0) * gamma;
        let hi = lo + rng.gen_range(0.5..10.0) * gamma;

        let anti_sq =
            |x: f64| ((x / gamma).atan() + x * gamma / (x * x + gamma * gamma)) / (2.0 * gamma.powi(3));
        let anti_plain = |x: f64| (x / gamma).atan() / gamma;
        let anti_odd = |x: f64| 0.5 / (x * x + gamma * gamma);

        let f_sq = |x: f64| 1.0 / (x * x + gamma * gamma).powi(2);
        let f_plain = |x: f64| 1.0 / (x * x + gamma * gamma);
        let f_odd = |x: f64| -x / (x * x + gamma * gamma).powi(2);

        // Fundamental-theorem checks by quadrature.
        let (q_sq, _) = integrate_adaptive(f_sq, lo, hi, &spec).unwrap();
        assert!(
            (q_sq - (anti_sq(hi) - anti_sq(lo))).abs() < 1e-10 * q_sq.abs().max(1e-3),
            "γ = {gamma}: squared-Lorentzian antiderivative"
        );
        let (q_plain, _) = integrate_adaptive(f_plain, lo, hi, &spec).unwrap();
        assert!(
            (q_plain - (anti_plain(hi) - anti_plain(lo))).abs() < 1e-10 * q_plain.abs().max(1e-3)
        );
        let (q_odd, _) = integrate_adaptive(f_odd, lo, hi, &spec).unwrap();
        assert!((q_odd - (anti_odd(hi) - anti_odd(lo))).abs() < 1e-10 * q_odd.abs().max(1e-3));

        // Differentiation checks at interior points.
        for frac in [0.2, 0.5, 0.9] {
            let x = lo + frac * (hi - lo);
            let h = 1e-5 * gamma;
            let d_sq = central_difference(anti_sq, x, h).unwrap();
            assert!((d_sq - f_sq(x)).abs() < 1e-7 * f_sq(x).abs().max(1e-6));
            let d_odd = central_difference(anti_odd, x, h).unwrap();
            assert!((d_odd - f_odd(x)).abs() < 1e-7 * f_odd(x).abs().max(1e-6));
        }
    }
}

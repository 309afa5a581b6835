//! Shared numerical kernels: symmetric tridiagonal and small Hermitian
//! eigensolvers, complex dense linear solves, adaptive quadrature, and
//! central-difference differentiation.
//!
//! Everything here is a pure function of its inputs and is deterministic at
//! the bit level: pivot selection, subdivision order, and eigenvector phase
//! conventions all break ties by the first (lowest) index, so the same input
//! bits always produce the same output bits regardless of thread count.
//!
//! # Tolerances
//!
//! The contracts promised to callers (and enforced by the test suite):
//!
//! * eigenpairs: `‖H·v − λ·v‖∞ ≤ 1e−12 · max(1, ‖H‖∞)`, eigenvalues
//!   nondecreasing, eigenvector matrices orthonormal/unitary within `1e−12`;
//! * linear solves: `‖A·x − b‖∞ ≤ 1e−10 · max(1, ‖A‖∞·‖x‖∞)`, with a system
//!   declared singular when a pivot falls below `1e−14 · ‖A‖∞`;
//! * quadrature: `|value − true| ≤ max(abs_tol, rel_tol·|value|)` for smooth
//!   integrands, with the best estimate carried inside the error when the
//!   subdivision budget runs out.

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Default step for [`central_difference`] in the natural (dimensionless)
/// units used throughout the crate. `h = 1e−5` balances truncation error
/// (`~h² = 1e−10`) against f64 cancellation (`~1e−16/h = 1e−11`).
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Two eigenvalues are reported as degenerate when they differ by less than
/// this relative threshold (used by callers that must handle degenerate
/// subspaces, e.g. Boltzmann occupation at exact band crossings).
pub const DEGENERACY_REL_TOL: f64 = 1e-10;

/// Errors from the numerical kernels.
#[derive(Debug, Error)]
pub enum NumericsError {
    /// Matrix input contains NaN/inf entries, or has inconsistent shape.
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    /// A linear system's pivot fell below `1e−14 · ‖A‖∞`.
    #[error("numerically singular system: pivot {pivot:.3e} below threshold {threshold:.3e}")]
    SingularSystem { pivot: f64, threshold: f64 },
    /// Adaptive quadrature exhausted its subdivision budget before reaching
    /// the requested tolerance. The best estimate and its error bound are
    /// carried so callers can decide whether to accept or abort.
    #[error(
        "quadrature tolerance not met after {subdivisions} subdivisions: \
         value {value:.17e}, error estimate {err_estimate:.3e}"
    )]
    ToleranceNotMet {
        value: f64,
        err_estimate: f64,
        subdivisions: usize,
    },
    /// A user-supplied function returned NaN/inf where a finite value was
    /// required.
    #[error("function evaluation not finite at x = {at}")]
    InvalidFunction { at: f64 },
    /// An iterative eigensolver failed to converge (does not happen for
    /// well-formed finite input; guards against silent infinite loops).
    #[error("{op} iteration limit exceeded")]
    IterationLimit { op: &'static str },
}

// ───────────────────────────── matrix types ─────────────────────────────

/// Real symmetric tridiagonal matrix, stored as its diagonal and
/// off-diagonal. This is the shape of the junction Hamiltonian in the
/// charge representation: charging terms on the diagonal, Josephson
/// coupling `−E_J/2` linking neighbouring Cooper-pair numbers.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiag {
    /// Build from diagonal and off-diagonal entries.
    ///
    /// `offdiag` must have exactly `diag.len() − 1` entries, and every entry
    /// must be finite.
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self, NumericsError> {
        if diag.is_empty() {
            return Err(NumericsError::InvalidMatrix("empty diagonal".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(NumericsError::InvalidMatrix(format!(
                "offdiag length {} != diag length {} − 1",
                offdiag.len(),
                diag.len()
            )));
        }
        if !diag.iter().chain(offdiag.iter()).all(|x| x.is_finite()) {
            return Err(NumericsError::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Max row sum of absolute values (the ∞-norm).
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.offdiag[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.offdiag[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// `y = M·x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.offdiag[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}

/// Small dense Hermitian matrix stored as its lower triangle, so that
/// Hermiticity holds exactly by construction (there is no redundant upper
/// triangle to drift out of sync).
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    n: usize,
    /// Real diagonal.
    diag: Vec<f64>,
    /// Strict lower triangle in row-major packed order:
    /// `lower[i(i−1)/2 + j] = entry(i, j)` for `i > j`.
    lower: Vec<C64>,
}

impl HermitianMatrix {
    /// Maximum supported dimension; this kernel targets the small dense
    /// problems of the crate (3×3 flux Hamiltonians, few-level reductions).
    pub const MAX_DIM: usize = 16;

    /// Build from a real diagonal and packed strict lower triangle
    /// (`entry(i, j)` for `i > j`, row-major).
    pub fn from_lower(diag: Vec<f64>, lower: Vec<C64>) -> Result<Self, NumericsError> {
        let n = diag.len();
        if n == 0 || n > Self::MAX_DIM {
            return Err(NumericsError::InvalidMatrix(format!(
                "dimension {n} outside 1..={}",
                Self::MAX_DIM
            )));
        }
        if lower.len() != n * (n - 1) / 2 {
            return Err(NumericsError::InvalidMatrix(format!(
                "lower triangle length {} != n(n−1)/2 = {}",
                lower.len(),
                n * (n - 1) / 2
            )));
        }
        if !diag.iter().all(|x| x.is_finite())
            || !lower.iter().all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(NumericsError::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { n, diag, lower })
    }

    /// Build a real symmetric matrix from rows of its dense representation,
    /// reading only the diagonal and strict lower triangle.
    pub fn from_real_lower(rows: &[&[f64]]) -> Result<Self, NumericsError> {
        let n = rows.len();
        let diag = (0..n).map(|i| rows[i][i]).collect();
        let mut lower = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in 0..i {
                lower.push(C64::new(rows[i][j], 0.0));
            }
        }
        Self::from_lower(diag, lower)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)` of the full matrix (upper triangle by conjugation).
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => C64::new(self.diag[i], 0.0),
            Greater => self.lower[i * (i - 1) / 2 + j],
            Less => self.lower[j * (j - 1) / 2 + i].conj(),
        }
    }

    /// Dense row-major copy.
    pub fn dense(&self) -> Vec<C64> {
        let n = self.n;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.entry(i, j);
            }
        }
        out
    }

    /// Max row sum of absolute values (the ∞-norm).
    pub fn norm_inf(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Tolerance policy for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Absolute tolerance on the integral value.
    pub abs_tol: f64,
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Maximum number of interval bisections before giving up.
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    /// Build a spec, validating `abs_tol, rel_tol > 0` and
    /// `max_subdivisions ≥ 1`.
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self, NumericsError> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions == 0 {
            return Err(NumericsError::InvalidMatrix(
                "quadrature spec requires positive tolerances and ≥ 1 subdivision".into(),
            ));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }
}

impl Default for QuadratureSpec {
    /// `abs_tol = 1e−12`, `rel_tol = 1e−10`, 256 subdivisions: tight enough
    /// for every integral in this crate while keeping worst-case cost
    /// bounded.
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 256,
        }
    }
}

// ──────────────────────── symmetric tridiagonal QL ───────────────────────

/// Eigendecomposition of a real symmetric tridiagonal matrix by the
/// implicit-shift QL algorithm with eigenvector accumulation.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvalues sorted ascending
/// and `eigenvectors[k]` the unit eigenvector for `eigenvalues[k]`. Each
/// eigenvector's sign is fixed so its largest-magnitude component (first
/// such index on ties) is positive; equal eigenvalues keep the solver's
/// deterministic internal order, so the decomposition is reproducible
/// bit-for-bit.
pub fn eig_sym_tridiag(m: &SymTridiag) -> Result<(Vec<f64>, Vec<Vec<f64>>), NumericsError> {
    let n = m.dim();
    let mut d = m.diag.clone();
    // e[i] couples i and i+1; padded to length n for the QL sweep.
    let mut e: Vec<f64> = m.offdiag.iter().copied().chain(std::iter::once(0.0)).collect();
    // z[i][k]: component i of (unsorted) eigenvector k, accumulated from
    // the identity by the same plane rotations applied to the matrix.
    let mut z = vec![vec![0.0f64; n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    const MAX_SWEEPS: usize = 64;
    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a negligible off-diagonal element splitting the matrix.
            let mut msub = l;
            while msub + 1 < n {
                let dd = d[msub].abs() + d[msub + 1].abs();
                if e[msub].abs() <= f64::EPSILON * dd {
                    break;
                }
                msub += 1;
            }
            if msub == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(NumericsError::IterationLimit {
                    op: "tridiagonal QL",
                });
            }
            // Implicit Wilkinson shift from the leading 2×2.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[msub] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..msub).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Recover from underflow: skip the rest of this sweep.
                    d[i + 1] -= p;
                    e[msub] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for zrow in z.iter_mut() {
                    f = zrow[i + 1];
                    zrow[i + 1] = s * zrow[i] + c * f;
                    zrow[i] = c * zrow[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[msub] = 0.0;
        }
    }

    // Sort ascending; stable so exactly-degenerate eigenvalues keep the
    // deterministic QL output order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| (0..n).map(|i| z[i][k]).collect())
        .collect();
    for v in &mut eigenvectors {
        fix_sign_real(v);
    }
    Ok((eigenvalues, eigenvectors))
}

/// Flip `v` so its largest-magnitude component (first on ties) is positive.
fn fix_sign_real(v: &mut [f64]) {
    let mut k = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[k].abs() {
            k = i;
        }
    }
    if v[k] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

// ───────────────────────── Hermitian Jacobi ─────────────────────────

/// Eigendecomposition of a small dense Hermitian matrix by cyclic complex
/// Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvalues ascending and
/// `eigenvectors[k]` the unit eigenvector for `eigenvalues[k]`. The phase
/// of each eigenvector is fixed by rotating its largest-magnitude component
/// (first such index on ties) to the positive real axis, so downstream
/// basis transforms are reproducible.
pub fn eig_hermitian(m: &HermitianMatrix) -> Result<(Vec<f64>, Vec<Vec<C64>>), NumericsError> {
    let n = m.dim();
    let mut a = m.dense();
    // v[i*n + k]: component i of eigenvector k.
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }

    let norm = m.norm_inf().max(1.0);
    // Quadratic convergence makes the sweep cap generous; hitting it means
    // the input was malformed in a way construction should have caught.
    const MAX_SWEEPS: usize = 64;
    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * norm {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let beta = apq.norm();
                if beta <= f64::EPSILON * 1e-2 * norm {
                    continue;
                }
                // Phase-rotate column q so the (p,q) entry becomes real β,
                // then apply the classical real Jacobi rotation.
                let phase = apq / beta; // e^{iφ}
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Unitary: U_pp = c, U_pq = s, U_qp = −s·conj(phase),
                // U_qq = c·conj(phase); identity elsewhere.
                let upq = C64::new(s, 0.0);
                let upp = C64::new(c, 0.0);
                let uqp = -s * phase.conj();
                let uqq = c * phase.conj();
                // A ← A·U (columns p, q).
                for r in 0..n {
                    let t1 = a[r * n + p];
                    let t2 = a[r * n + q];
                    a[r * n + p] = t1 * upp + t2 * uqp;
                    a[r * n + q] = t1 * upq + t2 * uqq;
                }
                // A ← U†·A (rows p, q).
                for rcol in 0..n {
                    let t1 = a[p * n + rcol];
                    let t2 = a[q * n + rcol];
                    a[p * n + rcol] = upp.conj() * t1 + uqp.conj() * t2;
                    a[q * n + rcol] = upq.conj() * t1 + uqq.conj() * t2;
                }
                // V ← V·U.
                for r in 0..n {
                    let t1 = v[r * n + p];
                    let t2 = v[r * n + q];
                    v[r * n + p] = t1 * upp + t2 * uqp;
                    v[r * n + q] = t1 * upq + t2 * uqq;
                }
            }
        }
    }
    if !converged {
        // One final check: the cyclic pass may have converged exactly at
        // the cap without observing it.
        let off: f64 = (0..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off > 1e-15 * norm {
            return Err(NumericsError::IterationLimit {
                op: "Hermitian Jacobi",
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        a[x * n + x]
            .re
            .partial_cmp(&a[y * n + y].re)
            .expect("finite eigenvalues")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[k * n + k].re).collect();
    let mut eigenvectors: Vec<Vec<C64>> = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
        .collect();
    for w in &mut eigenvectors {
        fix_phase(w);
    }
    Ok((eigenvalues, eigenvectors))
}

/// Rotate `v` by a global phase so its largest-magnitude component (first
/// on ties) is real and positive.
fn fix_phase(v: &mut [C64]) {
    let mut k = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm_sqr() > v[k].norm_sqr() {
            k = i;
        }
    }
    let mag = v[k].norm();
    if mag > 0.0 {
        let rot = v[k].conj() / mag;
        for z in v.iter_mut() {
            *z *= rot;
        }
        // Kill the residual imaginary dust on the anchor component so the
        // convention is exact, not merely approximate.
        v[k] = C64::new(v[k].re.abs(), 0.0);
    }
}

// ───────────────────────── complex linear solve ─────────────────────────

/// Solve `A·x = b` for dense complex `A` by LU decomposition with partial
/// pivoting (largest-magnitude pivot, first index on ties — deterministic).
///
/// `a` is row-major with `b.len()²` entries. Dimensions above 64 are
/// rejected: this kernel serves the small superoperator systems of the
/// crate, not general sparse algebra.
pub fn solve_complex_linear(a: &[C64], b: &[C64]) -> Result<Vec<C64>, NumericsError> {
    let n = b.len();
    if n == 0 || a.len() != n * n {
        return Err(NumericsError::InvalidMatrix(format!(
            "matrix length {} does not match rhs dimension {n}",
            a.len()
        )));
    }
    if n > 64 {
        return Err(NumericsError::InvalidMatrix(format!(
            "dimension {n} exceeds the dense-solve limit of 64"
        )));
    }
    if !a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
        || !b.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    {
        return Err(NumericsError::InvalidMatrix("non-finite entry".into()));
    }

    let norm_inf = (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let threshold = 1e-14 * norm_inf;

    let mut lu = a.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        // Partial pivot: strictly-greater comparison keeps the first
        // maximal row, making the factorization deterministic.
        let mut piv = k;
        let mut piv_mag = lu[perm[k] * n + k].norm();
        for r in (k + 1)..n {
            let mag = lu[perm[r] * n + k].norm();
            if mag > piv_mag {
                piv = r;
                piv_mag = mag;
            }
        }
        if piv_mag < threshold || piv_mag == 0.0 {
            return Err(NumericsError::SingularSystem {
                pivot: piv_mag,
                threshold,
            });
        }
        perm.swap(k, piv);
        let pk = perm[k];
        let pivot = lu[pk * n + k];
        for r in (k + 1)..n {
            let pr = perm[r];
            let factor = lu[pr * n + k] / pivot;
            lu[pr * n + k] = factor;
            for c in (k + 1)..n {
                let sub = factor * lu[pk * n + c];
                lu[pr * n + c] -= sub;
            }
        }
    }

    // Forward substitution (L has unit diagonal), then back substitution.
    let mut y = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut s = b[perm[i]];
        for j in 0..i {
            s -= lu[perm[i] * n + j] * y[j];
        }
        y[i] = s;
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in (i + 1)..n {
            s -= lu[perm[i] * n + j] * x[j];
        }
        x[i] = s / lu[perm[i] * n + i];
    }
    Ok(x)
}

// ───────────────────────── adaptive quadrature ─────────────────────────

// 15-point Kronrod extension of the 7-point Gauss rule on [−1, 1]
// (positive abscissae; the rule is symmetric).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_82,
];
// 7-point Gauss weights, matching XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

/// Gauss–Kronrod 15(7) rule on one interval, returning the Kronrod value
/// and a QUADPACK-style rescaled error estimate.
fn gk15<F: FnMut(f64) -> Result<f64, NumericsError>>(
    f: &mut F,
    lo: f64,
    hi: f64,
) -> Result<(f64, f64), NumericsError> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let fc = f(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    for i in 0..7 {
        let x = half * XGK[i];
        let f1 = f(center - x)?;
        let f2 = f(center + x)?;
        fv[i] = f1;
        fv[14 - i] = f2;
        kronrod += WGK[i] * (f1 + f2);
        resabs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for i in 0..7 {
        resasc += WGK[i] * ((fv[i] - mean).abs() + (fv[14 - i] - mean).abs());
    }

    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    // Do not claim better than ~50 ulp of the magnitude actually summed.
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((value, err))
}

/// Globally adaptive quadrature of `f` over `[lo, hi]`: Gauss–Kronrod 15(7)
/// with worst-interval bisection.
///
/// Returns `(value, err_estimate)` once the summed error estimate is below
/// `max(abs_tol, rel_tol·|value|)`. If the subdivision budget is exhausted
/// first, returns [`NumericsError::ToleranceNotMet`] carrying the best
/// estimate. Subdivision picks the largest-error segment, breaking ties
/// toward the leftmost, so the evaluation sequence is deterministic.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64), NumericsError> {
    if !(lo <= hi) {
        return Err(NumericsError::InvalidMatrix(format!(
            "integration bounds inverted or NaN: [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok((0.0, 0.0));
    }
    let mut eval = |x: f64| -> Result<f64, NumericsError> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::InvalidFunction { at: x })
        }
    };

    let (v0, e0) = gk15(&mut eval, lo, hi)?;
    let mut segments = vec![Segment {
        lo,
        hi,
        value: v0,
        err: e0,
    }];
    let mut subdivisions = 0usize;
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.err).sum();
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if err <= target {
            return Ok((total, err));
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(NumericsError::ToleranceNotMet {
                value: total,
                err_estimate: err,
                subdivisions,
            });
        }
        // Worst segment, first index on ties.
        let mut worst = 0;
        for (i, s) in segments.iter().enumerate() {
            if s.err > segments[worst].err {
                worst = i;
            }
        }
        let Segment { lo: a, hi: b, .. } = segments[worst];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval at f64 resolution; cannot refine further.
            let total: f64 = segments.iter().map(|s| s.value).sum();
            let err: f64 = segments.iter().map(|s| s.err).sum();
            return Err(NumericsError::ToleranceNotMet {
                value: total,
                err_estimate: err,
                subdivisions,
            });
        }
        let (vl, el) = gk15(&mut eval, a, mid)?;
        let (vr, er) = gk15(&mut eval, mid, b)?;
        segments[worst] = Segment {
            lo: a,
            hi: mid,
            value: vl,
            err: el,
        };
        segments.push(Segment {
            lo: mid,
            hi: b,
            value: vr,
            err: er,
        });
        subdivisions += 1;
    }
}

// ───────────────────────── differentiation ─────────────────────────

/// Two-sided difference quotient `(f(x+h) − f(x−h)) / 2h`.
///
/// Truncation error is `O(h²·f‴)`; callers pick `h` (see
/// [`DEFAULT_FD_STEP`]). Non-finite evaluations are rejected rather than
/// propagated.
pub fn central_difference<F: FnMut(f64) -> f64>(
    mut f: F,
    x: f64,
    h: f64,
) -> Result<f64, NumericsError> {
    assert!(h > 0.0, "central_difference requires h > 0");
    let fp = f(x + h);
    if !fp.is_finite() {
        return Err(NumericsError::InvalidFunction { at: x + h });
    }
    let fm = f(x - h);
    if !fm.is_finite() {
        return Err(NumericsError::InvalidFunction { at: x - h });
    }
    Ok((fp - fm) / (2.0 * h))
}

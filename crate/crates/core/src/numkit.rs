//! Dense real/complex linear algebra used throughout the crate.
//!
//! Everything here is a pure function of its inputs. Matrices are
//! `nalgebra` dynamic matrices. LU, Schur and the symmetric and Hermitian
//! eigendecompositions come from `nalgebra`; the Lyapunov solver, the SVD
//! and the matrix exponential are implemented here.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;
pub type RealVector = DVector<f64>;

const MAX_ITERATIONS: usize = 100_000;

/// Numerical thresholds shared by every decision the crate makes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Singular values at or below `rank_rtol * sigma_max` count as zero.
    pub rank_rtol: f64,
    /// Absolute bound on residual norms (purity, Lyapunov, subspace distance).
    pub residual_atol: f64,
    /// Margin for classifying a real part as zero.
    pub eig_real_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rtol: 1e-10,
            residual_atol: 1e-9,
            eig_real_tol: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn new(rank_rtol: f64, residual_atol: f64, eig_real_tol: f64) -> Result<Self> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(rank_rtol) {
            return Err(Error::InvalidTolerance("rank_rtol"));
        }
        if !positive(residual_atol) {
            return Err(Error::InvalidTolerance("residual_atol"));
        }
        if !positive(eig_real_tol) {
            return Err(Error::InvalidTolerance("eig_real_tol"));
        }
        Ok(Tolerances {
            rank_rtol,
            residual_atol,
            eig_real_tol,
        })
    }
}

pub(crate) fn check_square<T: nalgebra::Scalar>(
    m: &DMatrix<T>,
    context: &'static str,
) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::dims(
            context,
            "square matrix",
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(m.nrows())
}

pub(crate) fn check_finite(m: &RealMatrix, what: &'static str) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite {
                    what,
                    row: i,
                    col: j,
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn check_finite_complex(m: &ComplexMatrix, what: &'static str) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite {
                    what,
                    row: i,
                    col: j,
                });
            }
        }
    }
    Ok(())
}

/// Rejects matrices whose asymmetry exceeds `atol * (1 + max|m_ij|)`,
/// naming the first offending entry.
pub(crate) fn check_symmetric(m: &RealMatrix, what: &'static str, atol: f64) -> Result<()> {
    check_square(m, what)?;
    let bound = atol * (1.0 + m.amax());
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > bound {
                return Err(Error::Asymmetric {
                    what,
                    row: i,
                    col: j,
                    value: m[(i, j)],
                    mirror: m[(j, i)],
                });
            }
        }
    }
    Ok(())
}

pub fn symmetrize(m: &RealMatrix) -> RealMatrix {
    (m + m.transpose()) * 0.5
}

pub fn antisymmetrize(m: &RealMatrix) -> RealMatrix {
    (m - m.transpose()) * 0.5
}

pub fn to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn real_part(m: &ComplexMatrix) -> RealMatrix {
    m.map(|z| z.re)
}

pub fn imag_part(m: &ComplexMatrix) -> RealMatrix {
    m.map(|z| z.im)
}

/// Eigenvalues of a real square matrix via the real Schur form.
pub fn eigenvalues(a: &RealMatrix) -> Result<Vec<Complex64>> {
    check_square(a, "eigenvalues")?;
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, MAX_ITERATIONS)
        .ok_or(Error::NoConvergence("Schur decomposition"))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Largest real part over the spectrum of `a`.
pub fn spectral_abscissa(a: &RealMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// True iff every eigenvalue has real part below `-eig_real_tol`.
pub fn is_hurwitz(a: &RealMatrix, tol: &Tolerances) -> Result<bool> {
    Ok(eigenvalues(a)?.iter().all(|l| l.re < -tol.eig_real_tol))
}

/// Solves `A V + V Aᵀ + D = 0` for symmetric `V`.
///
/// The equation is vectorized with `(I ⊗ A + A ⊗ I) vec(V) = -vec(D)` and
/// solved by dense LU with one round of iterative refinement. Uniqueness is
/// decided up front from the spectrum: the solution is unique iff no pair of
/// eigenvalues satisfies `λ_i + λ_j = 0`.
pub fn lyapunov_solve(a: &RealMatrix, d: &RealMatrix, tol: &Tolerances) -> Result<RealMatrix> {
    let n = check_square(a, "lyapunov_solve: A")?;
    if d.shape() != (n, n) {
        return Err(Error::dims(
            "lyapunov_solve: D",
            format!("{n}x{n}"),
            format!("{}x{}", d.nrows(), d.ncols()),
        ));
    }
    check_finite(a, "A")?;
    check_finite(d, "D")?;
    check_symmetric(d, "D", tol.residual_atol)?;
    if n == 0 {
        return Ok(RealMatrix::zeros(0, 0));
    }

    let spectrum = eigenvalues(a)?;
    for (i, li) in spectrum.iter().enumerate() {
        for lj in &spectrum[i..] {
            if (li + lj).norm() <= tol.eig_real_tol {
                return Err(Error::NoUniqueSolution(fmt_c(*li), fmt_c(*lj)));
            }
        }
    }

    let id = RealMatrix::identity(n, n);
    let kron = id.kronecker(a) + a.kronecker(&id);
    let rhs = -RealVector::from_column_slice(d.as_slice());
    let lu = kron.clone().lu();
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::NoUniqueSolution("singular".into(), "Kronecker system".into()))?;
    let correction = lu.solve(&(&rhs - &kron * &x));
    if let Some(dx) = correction {
        x += dx;
    }

    let v = symmetrize(&RealMatrix::from_column_slice(n, n, x.as_slice()));
    let residual = (a * &v + &v * a.transpose() + d).norm();
    let bound = tol.residual_atol * (1.0 + d.norm());
    if residual > bound {
        return Err(Error::InaccurateSolution { residual, bound });
    }
    Ok(v)
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

const JACOBI_SWEEPS: usize = 100;

/// `m = U diag(σ) V†` with `σ` descending. `u` has a unit column for every
/// nonzero singular value (zero columns otherwise) and `v` is a full
/// unitary matrix, also for wide `m`.
struct Svd {
    u: ComplexMatrix,
    sigma: Vec<f64>,
    v: ComplexMatrix,
}

// Rotates columns i and j of m by diag(1, conj(phase)) [[c, s], [-s, c]].
fn rotate_columns(m: &mut ComplexMatrix, i: usize, j: usize, c: f64, s: f64, phase: Complex64) {
    for k in 0..m.nrows() {
        let x = m[(k, i)];
        let y = m[(k, j)] * phase.conj();
        m[(k, i)] = x * c - y * s;
        m[(k, j)] = x * s + y * c;
    }
}

// One-sided Jacobi: orthogonalize the columns of m by plane rotations,
// accumulating the rotations in V. nalgebra's complex SVD was found to
// return factorizations that do not reconstruct some rank-deficient inputs.
fn svd(m: &ComplexMatrix) -> Result<Svd> {
    let (p, q) = m.shape();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(q, q);
    let eps = f64::EPSILON * q.max(1) as f64;
    // columns at rounding level are numerically zero; rotating them only cycles
    let negligible = (f64::EPSILON * m.norm()).powi(2);
    let mut converged = false;
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for i in 0..q {
            for j in (i + 1)..q {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dotc(&a.column(j));
                let g = gamma.norm();
                if alpha.min(beta) <= negligible || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut a, i, j, c, s, phase);
                rotate_columns(&mut v, i, j, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("SVD"));
    }

    let norms: Vec<f64> = (0..q).map(|k| a.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = ComplexMatrix::zeros(p, q);
    for (dst, &src) in order.iter().enumerate() {
        if norms[src] > 0.0 {
            u.set_column(dst, &(a.column(src) / Complex64::from(norms[src])));
        }
    }
    Ok(Svd {
        u,
        sigma: order.iter().map(|&k| norms[k]).collect(),
        v: v.select_columns(order.iter()),
    })
}

/// Singular values in descending order, `min(rows, cols)` of them.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut sv = svd(m)?.sigma;
    sv.truncate(m.nrows().min(m.ncols()));
    Ok(sv)
}

fn rank_threshold(sv: &[f64], tol: &Tolerances) -> f64 {
    tol.rank_rtol * sv.first().copied().unwrap_or(0.0)
}

/// Number of singular values strictly above `rank_rtol * sigma_max`.
pub fn numerical_rank(m: &ComplexMatrix, tol: &Tolerances) -> Result<usize> {
    let sv = singular_values(m)?;
    let thresh = rank_threshold(&sv, tol);
    Ok(sv.iter().filter(|&&s| s > thresh).count())
}

/// Orthonormal columns spanning the column space of `m`.
pub fn range_basis(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let dec = svd(m)?;
    let thresh = rank_threshold(&dec.sigma, tol);
    let rank = dec.sigma.iter().filter(|&&s| s > thresh).count();
    Ok(dec.u.columns(0, rank).into_owned())
}

/// Orthonormal columns spanning the null space of `m`.
pub fn kernel_basis(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let dec = svd(m)?;
    let thresh = rank_threshold(&dec.sigma, tol);
    let rank = dec.sigma.iter().filter(|&&s| s > thresh).count();
    Ok(dec.v.columns(rank, m.ncols() - rank).into_owned())
}

/// Frobenius distance between the orthogonal projectors onto the column
/// spans of `u` and `w`.
pub fn projector_distance(u: &ComplexMatrix, w: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    if u.nrows() != w.nrows() {
        return Err(Error::dims(
            "subspaces_equal",
            format!("{} rows", u.nrows()),
            format!("{} rows", w.nrows()),
        ));
    }
    let qu = range_basis(u, tol)?;
    let qw = range_basis(w, tol)?;
    let pu = &qu * qu.adjoint();
    let pw = &qw * qw.adjoint();
    Ok((pu - pw).norm())
}

/// Whether two matrices have the same column span.
pub fn subspaces_equal(u: &ComplexMatrix, w: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    Ok(projector_distance(u, w, tol)? < tol.residual_atol)
}

fn one_norm(a: &RealMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

// Padé coefficients and 1-norm thresholds, Higham (2005).
const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
// thresholds quoted to the digits they were published with
#[allow(clippy::excessive_precision)]
const THETA: [(f64, &[f64]); 4] = [
    (1.495585217958292e-2, &PADE3),
    (2.539398330063230e-1, &PADE5),
    (9.504178996162932e-1, &PADE7),
    (2.097847961257068e0, &PADE9),
];
const THETA13: f64 = 5.371920351148152;

/// `exp(A t)` by scaling and squaring with a diagonal Padé approximant.
pub fn matrix_exp(a: &RealMatrix, t: f64) -> Result<RealMatrix> {
    let n = check_square(a, "matrix_exp")?;
    if !t.is_finite() {
        return Err(Error::InvalidTimeGrid(format!("t = {t} is not finite")));
    }
    check_finite(a, "A")?;
    let at = a * t;
    let norm = one_norm(&at);
    let id = RealMatrix::identity(n, n);
    if norm == 0.0 {
        return Ok(id);
    }

    for (theta, coeffs) in THETA {
        if norm <= theta {
            return Ok(pade_low(&at, coeffs));
        }
    }

    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = &at * 2f64.powi(-s);
    let mut r = pade13(&scaled);
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn pade_solve(u: RealMatrix, v: RealMatrix) -> RealMatrix {
    let num = &v + &u;
    let den = v - u;
    den.lu()
        .solve(&num)
        .expect("Padé denominator is nonsingular within the scaling threshold")
}

fn pade_low(a: &RealMatrix, b: &[f64]) -> RealMatrix {
    let n = a.nrows();
    let a2 = a * a;
    let mut power = RealMatrix::identity(n, n);
    let mut odd = RealMatrix::zeros(n, n);
    let mut even = RealMatrix::zeros(n, n);
    for k in (0..b.len()).step_by(2) {
        even += &power * b[k];
        odd += &power * b[k + 1];
        power = &power * &a2;
    }
    pade_solve(a * odd, even)
}

fn pade13(a: &RealMatrix) -> RealMatrix {
    let b = &PADE13;
    let n = a.nrows();
    let id = RealMatrix::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = a * (inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let inner_v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    pade_solve(u, v)
}

/// Principal square root, inverse square root and inverse of a symmetric
/// positive definite matrix, all from one eigendecomposition.
#[derive(Debug, Clone)]
pub struct SpdRoots {
    pub sqrt: RealMatrix,
    pub inv_sqrt: RealMatrix,
    pub inv: RealMatrix,
}

pub fn spd_roots(y: &RealMatrix) -> Result<SpdRoots> {
    check_square(y, "spd_roots")?;
    let eig = symmetrize(y)
        .try_symmetric_eigen(f64::EPSILON, MAX_ITERATIONS)
        .ok_or(Error::NoConvergence("symmetric eigendecomposition"))?;
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::NonPositiveY {
            min_eigenvalue: min,
        });
    }
    let q = &eig.eigenvectors;
    let build = |f: &dyn Fn(f64) -> f64| {
        let diag = RealMatrix::from_diagonal(&eig.eigenvalues.map(f));
        symmetrize(&(q * diag * q.transpose()))
    };
    Ok(SpdRoots {
        sqrt: build(&f64::sqrt),
        inv_sqrt: build(&|l| 1.0 / l.sqrt()),
        inv: build(&|l| 1.0 / l),
    })
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &RealMatrix) -> Result<Vec<f64>> {
    check_square(m, "symmetric_eigenvalues")?;
    let eig = symmetrize(m)
        .try_symmetric_eigen(f64::EPSILON, MAX_ITERATIONS)
        .ok_or(Error::NoConvergence("symmetric eigendecomposition"))?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_square(m, "hermitian_eigenvalues")?;
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h
        .try_symmetric_eigen(f64::EPSILON, MAX_ITERATIONS)
        .ok_or(Error::NoConvergence("Hermitian eigendecomposition"))?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

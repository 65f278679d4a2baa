//! Phase-space data model for Gaussian dissipative systems.
//!
//! Quadratures are ordered `x = (q_1, …, q_n, p_1, …, p_n)`, `ħ = 1`, and the
//! vacuum covariance is `I/2`. The master equation with Hamiltonian
//! `H = xᵀ G x / 2` and channels `L_k = c_kᵀ x` drives the moments by
//!
//! ```text
//! d<x>/dt = A <x>,    dV/dt = A V + V Aᵀ + D,
//! A = Σ (G + Im(C†C)),    D = Σ Re(C†C) Σᵀ.
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkit::{
    self, antisymmetrize, check_finite, check_finite_complex, check_symmetric, imag_part,
    real_part, symmetrize, ComplexMatrix, RealMatrix, RealVector, Tolerances,
};

/// The canonical symplectic form `Σ = [[0, I], [-I, 0]]` on `n` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n: usize,
    matrix: RealMatrix,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        let mut matrix = RealMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            matrix[(i, n + i)] = 1.0;
            matrix[(n + i, i)] = -1.0;
        }
        SymplecticForm { n, matrix }
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn complex(&self) -> ComplexMatrix {
        numkit::to_complex(&self.matrix)
    }
}

/// Shorthand for `SymplecticForm::new(n).matrix().clone()`.
pub fn sigma(n: usize) -> RealMatrix {
    SymplecticForm::new(n).matrix
}

/// Permutation taking interleaved `(q_1, p_1, q_2, p_2, …)` indices to the
/// block ordering used everywhere in this crate: `perm[interleaved] = block`.
pub fn interleaved_to_block_permutation(n: usize) -> Vec<usize> {
    (0..2 * n)
        .map(|k| if k % 2 == 0 { k / 2 } else { n + k / 2 })
        .collect()
}

/// Reorders a vector given in interleaved ordering into block ordering.
pub fn vector_from_interleaved(v: &RealVector) -> RealVector {
    let n = v.len() / 2;
    let perm = interleaved_to_block_permutation(n);
    let mut out = RealVector::zeros(v.len());
    for (k, &b) in perm.iter().enumerate() {
        out[b] = v[k];
    }
    out
}

/// Reorders a `2n x 2n` matrix given in interleaved ordering into block ordering.
pub fn matrix_from_interleaved(m: &RealMatrix) -> RealMatrix {
    let n = m.nrows() / 2;
    let perm = interleaved_to_block_permutation(n);
    let mut out = RealMatrix::zeros(m.nrows(), m.ncols());
    for (i, &bi) in perm.iter().enumerate() {
        for (j, &bj) in perm.iter().enumerate() {
            out[(bi, bj)] = m[(i, j)];
        }
    }
    out
}

/// System matrices `(G, C)` of a Markovian Gaussian master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDynamics {
    n: usize,
    g: RealMatrix,
    c: ComplexMatrix,
}

impl GaussianDynamics {
    /// `g` must be `2n x 2n` and symmetric up to rounding; it is stored exactly
    /// symmetric. `c` is `m x 2n` with one row per dissipative channel.
    pub fn new(g: RealMatrix, c: ComplexMatrix) -> Result<Self> {
        let dim = g.nrows();
        if g.ncols() != dim || !dim.is_multiple_of(2) {
            return Err(Error::dims(
                "GaussianDynamics: G",
                "2n x 2n",
                format!("{}x{}", g.nrows(), g.ncols()),
            ));
        }
        if c.ncols() != dim {
            return Err(Error::dims(
                "GaussianDynamics: C",
                format!("m x {dim}"),
                format!("{}x{}", c.nrows(), c.ncols()),
            ));
        }
        check_finite(&g, "G")?;
        check_finite_complex(&c, "C")?;
        check_symmetric(&g, "G", Tolerances::default().residual_atol)?;
        Ok(GaussianDynamics {
            n: dim / 2,
            g: symmetrize(&g),
            c,
        })
    }

    /// Mode count `n`.
    pub fn modes(&self) -> usize {
        self.n
    }

    /// Channel count `m`.
    pub fn channels(&self) -> usize {
        self.c.nrows()
    }

    pub fn g(&self) -> &RealMatrix {
        &self.g
    }

    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }

    fn c_dagger_c(&self) -> ComplexMatrix {
        self.c.adjoint() * &self.c
    }

    /// `Re(C†C)` symmetrized.
    pub fn dissipation_real(&self) -> RealMatrix {
        symmetrize(&real_part(&self.c_dagger_c()))
    }

    /// `Im(C†C)` antisymmetrized.
    pub fn dissipation_imag(&self) -> RealMatrix {
        antisymmetrize(&imag_part(&self.c_dagger_c()))
    }

    /// Drift `A = Σ (G + Im(C†C))`.
    pub fn drift_matrix(&self) -> RealMatrix {
        sigma(self.n) * (&self.g + self.dissipation_imag())
    }

    /// Diffusion `D = Σ Re(C†C) Σᵀ`.
    pub fn diffusion_matrix(&self) -> RealMatrix {
        let s = sigma(self.n);
        symmetrize(&(&s * self.dissipation_real() * s.transpose()))
    }
}

/// A validated `2n x 2n` covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n: usize,
    v: RealMatrix,
}

impl CovarianceMatrix {
    /// Validates symmetry, positivity and the uncertainty relation
    /// `V + iΣ/2 ⪰ 0` (smallest eigenvalue at least `-residual_atol`).
    pub fn new(v: RealMatrix, tol: &Tolerances) -> Result<Self> {
        let dim = v.nrows();
        if v.ncols() != dim || !dim.is_multiple_of(2) {
            return Err(Error::dims(
                "CovarianceMatrix",
                "2n x 2n",
                format!("{}x{}", v.nrows(), v.ncols()),
            ));
        }
        check_finite(&v, "V")?;
        check_symmetric(&v, "V", tol.residual_atol)?;
        let cov = CovarianceMatrix {
            n: dim / 2,
            v: symmetrize(&v),
        };
        let min_v = numkit::symmetric_eigenvalues(&cov.v)?
            .first()
            .copied()
            .unwrap_or(f64::INFINITY);
        if !(min_v > 0.0) {
            return Err(Error::InvalidCovariance(format!(
                "not positive definite (smallest eigenvalue {min_v:e})"
            )));
        }
        let min_u = cov.uncertainty_min_eigenvalue()?;
        if min_u < -tol.residual_atol {
            return Err(Error::InvalidCovariance(format!(
                "violates V + iΣ/2 ≥ 0 (smallest eigenvalue {min_u:e})"
            )));
        }
        Ok(cov)
    }

    /// Skips validation; only for matrices known to be covariances up to
    /// integration error.
    pub(crate) fn from_matrix_unchecked(v: RealMatrix) -> Self {
        CovarianceMatrix {
            n: v.nrows() / 2,
            v,
        }
    }

    /// Vacuum `I/2`.
    pub fn vacuum(n: usize) -> Self {
        Self::scaled_identity(n, 0.5)
    }

    /// `scale * I`; a valid state for `scale >= 1/2`.
    pub fn scaled_identity(n: usize, scale: f64) -> Self {
        CovarianceMatrix {
            n,
            v: RealMatrix::identity(2 * n, 2 * n) * scale,
        }
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.v
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.v
    }

    /// Smallest eigenvalue of the Hermitian matrix `V + iΣ/2`.
    pub fn uncertainty_min_eigenvalue(&self) -> Result<f64> {
        let h = numkit::to_complex(&self.v)
            + SymplecticForm::new(self.n).complex() * Complex64::new(0.0, 0.5);
        Ok(numkit::hermitian_eigenvalues(&h)?
            .first()
            .copied()
            .unwrap_or(0.0))
    }

    /// `Tr ρ² = 1 / sqrt(2^{2n} det V)`.
    pub fn purity(&self) -> Result<f64> {
        let det = self.v.determinant();
        if !(det > 0.0) {
            return Err(Error::NonPositiveDeterminant(det));
        }
        Ok(1.0 / (4f64.powi(self.n as i32) * det).sqrt())
    }

    /// `‖Σ V Σ V + I/4‖_F`, zero exactly for pure states.
    pub fn purity_residual(&self) -> f64 {
        let s = sigma(self.n);
        let svsv = &s * &self.v * &s * &self.v;
        (svsv + RealMatrix::identity(2 * self.n, 2 * self.n) * 0.25).norm()
    }

    pub fn is_pure(&self, tol: &Tolerances) -> bool {
        self.purity_residual() <= tol.residual_atol
    }
}

/// First and second moments of a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub mean: RealVector,
    pub cov: CovarianceMatrix,
}

impl GaussianState {
    pub fn new(mean: RealVector, cov: CovarianceMatrix) -> Result<Self> {
        if mean.len() != 2 * cov.modes() {
            return Err(Error::dims(
                "GaussianState: mean",
                2 * cov.modes(),
                mean.len(),
            ));
        }
        if let Some(k) = mean.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                what: "mean",
                row: k,
                col: 0,
            });
        }
        Ok(GaussianState { mean, cov })
    }

    /// Zero-mean state with the given covariance.
    pub fn centered(cov: CovarianceMatrix) -> Self {
        GaussianState {
            mean: RealVector::zeros(2 * cov.modes()),
            cov,
        }
    }
}

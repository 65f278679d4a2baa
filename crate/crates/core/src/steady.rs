//! Steady-state analysis: uniqueness, purity and the equivalent algebraic
//! characterizations of a unique pure steady state.
//!
//! For a system with a unique steady covariance `Vs`, the following agree:
//!
//! 1. the steady state is pure,
//! 2. `(Vs + iΣ/2) Cᵀ = 0` and `Σ G Vs + Vs G Σᵀ = 0`,
//! 3. `K Σ Cᵀ = 0`, with `K` the stack of `C (ΣG)^k` for `k = 0..2n`.
//!
//! When they hold, `Vs = ½ Σᵀ Im(K†K) [Re(K†K)]⁻¹`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{sigma, CovarianceMatrix, GaussianDynamics};
use crate::numkit::{
    self, antisymmetrize, imag_part, real_part, symmetrize, to_complex, ComplexMatrix, RealMatrix,
    Tolerances,
};

/// Gram matrices with a condition number above this are treated as singular.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

/// The `2nm x 2n` stack `K = (C; C ΣG; C (ΣG)²; …; C (ΣG)^{2n-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct KMatrix {
    blocks: Vec<ComplexMatrix>,
}

impl KMatrix {
    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    /// The blocks stacked vertically.
    pub fn matrix(&self) -> ComplexMatrix {
        let rows: usize = self.blocks.iter().map(|b| b.nrows()).sum();
        let cols = self.blocks.first().map_or(0, |b| b.ncols());
        let mut out = ComplexMatrix::zeros(rows, cols);
        let mut r = 0;
        for b in &self.blocks {
            out.view_mut((r, 0), b.shape()).copy_from(b);
            r += b.nrows();
        }
        out
    }
}

pub fn build_k(sys: &GaussianDynamics) -> KMatrix {
    let n = sys.modes();
    let step = to_complex(&(sigma(n) * sys.g()));
    let mut blocks = Vec::with_capacity(2 * n);
    let mut current = sys.c().clone();
    for _ in 0..2 * n {
        let next = &current * &step;
        blocks.push(current);
        current = next;
    }
    KMatrix { blocks }
}

/// The stack `K Σ Cᵀ`, one `m x m` block per power.
pub fn k_sigma_c(sys: &GaussianDynamics) -> ComplexMatrix {
    let sc = to_complex(&sigma(sys.modes())) * sys.c().transpose();
    build_k(sys).matrix() * sc
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionIii {
    pub holds: bool,
    /// `‖K Σ Cᵀ‖_F`
    pub residual: f64,
}

pub fn condition_iii(sys: &GaussianDynamics, tol: &Tolerances) -> ConditionIii {
    let k = build_k(sys).matrix();
    let residual = k_sigma_c(sys).norm();
    let bound = tol.residual_atol * (1.0 + k.norm() * sys.c().norm());
    ConditionIii {
        holds: residual <= bound,
        residual,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionIi {
    pub holds: bool,
    /// `‖(Vs + iΣ/2) Cᵀ‖_F`
    pub dark_residual: f64,
    /// `‖Σ G Vs + Vs G Σᵀ‖_F`
    pub hamiltonian_residual: f64,
}

pub fn condition_ii(
    sys: &GaussianDynamics,
    vs: &CovarianceMatrix,
    tol: &Tolerances,
) -> Result<ConditionIi> {
    let n = sys.modes();
    if vs.modes() != n {
        return Err(Error::dims(
            "condition_ii: Vs",
            format!("{n} modes"),
            format!("{} modes", vs.modes()),
        ));
    }
    let s = sigma(n);
    let v = vs.matrix();
    let shifted = to_complex(v) + to_complex(&s) * Complex64::new(0.0, 0.5);
    let dark_residual = (shifted * sys.c().transpose()).norm();
    let hamiltonian_residual = (&s * sys.g() * v + v * sys.g() * s.transpose()).norm();
    let dark_bound = tol.residual_atol * (1.0 + v.norm() * sys.c().norm());
    let ham_bound = tol.residual_atol * (1.0 + v.norm() * sys.g().norm());
    Ok(ConditionIi {
        holds: dark_residual <= dark_bound && hamiltonian_residual <= ham_bound,
        dark_residual,
        hamiltonian_residual,
    })
}

/// Output of the closed-form pure steady covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct PureFormula {
    pub covariance: CovarianceMatrix,
    /// Condition number of `Re(K†K)` for an orthonormal basis of the rows of `K`.
    pub gram_condition: f64,
    /// `‖V - Vᵀ‖_F` before symmetrization.
    pub symmetry_residual: f64,
}

pub fn pure_vs_formula(sys: &GaussianDynamics, tol: &Tolerances) -> Result<PureFormula> {
    let check = condition_iii(sys, tol);
    if !check.holds {
        return Err(Error::ConditionViolated {
            residual: check.residual,
        });
    }
    // Any K' with the row space of K gives the same Vs; an orthonormal one
    // keeps the Gram matrix well conditioned when the powers of ΣG grow.
    let basis = numkit::range_basis(&build_k(sys).matrix().transpose(), tol)?;
    let gram = basis.conjugate() * basis.transpose();
    let re = symmetrize(&real_part(&gram));
    let im = antisymmetrize(&imag_part(&gram));

    let eig = re
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 100_000)
        .ok_or(Error::NoConvergence("Gram eigendecomposition"))?;
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let gram_condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(gram_condition <= GRAM_CONDITION_LIMIT) {
        return Err(Error::SingularGram {
            condition: gram_condition,
        });
    }
    // pseudo-inverse through the eigendecomposition; equals the inverse here
    let cutoff = max / GRAM_CONDITION_LIMIT;
    let inv_diag = eig
        .eigenvalues
        .map(|l| if l > cutoff { 1.0 / l } else { 0.0 });
    let re_inv =
        &eig.eigenvectors * RealMatrix::from_diagonal(&inv_diag) * eig.eigenvectors.transpose();

    let raw = sigma(sys.modes()).transpose() * im * re_inv * 0.5;
    let symmetry_residual = (&raw - raw.transpose()).norm();
    let v = symmetrize(&raw);
    if symmetry_residual > tol.residual_atol * (1.0 + v.norm()) {
        return Err(Error::FormulaNotPure {
            residual: symmetry_residual,
        });
    }
    let covariance = CovarianceMatrix::new(v, tol)?;
    if !covariance.is_pure(tol) {
        return Err(Error::FormulaNotPure {
            residual: covariance.purity_residual(),
        });
    }
    Ok(PureFormula {
        covariance,
        gram_condition,
        symmetry_residual,
    })
}

/// Analysis of a system whose steady state is unique.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyAnalysis {
    pub covariance: CovarianceMatrix,
    pub purity: f64,
    pub pure: bool,
    pub condition_ii: ConditionIi,
    pub condition_iii: ConditionIii,
    pub formula: Result<PureFormula, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Report {
    /// Whether the drift is Hurwitz, i.e. the steady state is unique.
    pub unique: bool,
    pub drift_eigenvalues: Vec<Complex64>,
    /// Present iff `unique`.
    pub steady: Option<SteadyAnalysis>,
}

impl Theorem1Report {
    pub fn pure(&self) -> bool {
        self.steady.as_ref().is_some_and(|s| s.pure)
    }

    pub fn steady_covariance(&self) -> Option<&CovarianceMatrix> {
        self.steady.as_ref().map(|s| &s.covariance)
    }

    /// Purity, condition (ii) and condition (iii) give the same verdict.
    /// Vacuously true when the steady state is not unique.
    pub fn conditions_agree(&self) -> bool {
        match &self.steady {
            None => true,
            Some(s) => s.pure == s.condition_ii.holds && s.pure == s.condition_iii.holds,
        }
    }
}

pub fn analyze(sys: &GaussianDynamics, tol: &Tolerances) -> Result<Theorem1Report> {
    let a = sys.drift_matrix();
    let drift_eigenvalues = numkit::eigenvalues(&a)?;
    let unique = drift_eigenvalues.iter().all(|l| l.re < -tol.eig_real_tol);
    if !unique {
        return Ok(Theorem1Report {
            unique,
            drift_eigenvalues,
            steady: None,
        });
    }
    let v = numkit::lyapunov_solve(&a, &sys.diffusion_matrix(), tol)?;
    let covariance = CovarianceMatrix::new(v, tol)?;
    let purity = covariance.purity()?;
    let pure = covariance.is_pure(tol);
    let condition_ii = condition_ii(sys, &covariance, tol)?;
    let condition_iii = condition_iii(sys, tol);
    let formula = pure_vs_formula(sys, tol);
    Ok(Theorem1Report {
        unique,
        drift_eigenvalues,
        steady: Some(SteadyAnalysis {
            covariance,
            purity,
            pure,
            condition_ii,
            condition_iii,
            formula,
        }),
    })
}

/// Logarithmic negativity of the bipartition `partition | rest`.
///
/// Partial transposition flips the momentum quadratures of the modes in
/// `partition`; the result is `Σ_k max(0, -ln 2ν_k)` over the symplectic
/// eigenvalues `ν_k` of the transposed covariance. Mode indices are 0-based.
pub fn log_negativity(cov: &CovarianceMatrix, partition: &[usize]) -> Result<f64> {
    let n = cov.modes();
    if partition.is_empty() {
        return Err(Error::InvalidPartition("partition is empty".into()));
    }
    let mut seen = vec![false; n];
    for &k in partition {
        if k >= n {
            return Err(Error::InvalidPartition(format!(
                "mode {k} out of range for {n} modes"
            )));
        }
        if seen[k] {
            return Err(Error::InvalidPartition(format!("mode {k} listed twice")));
        }
        seen[k] = true;
    }
    if partition.len() == n {
        return Err(Error::InvalidPartition(
            "partition must be a proper subset of the modes".into(),
        ));
    }

    let mut flip = RealMatrix::identity(2 * n, 2 * n);
    for &k in partition {
        flip[(n + k, n + k)] = -1.0;
    }
    let transposed = &flip * cov.matrix() * &flip;
    let mut moduli: Vec<f64> = numkit::eigenvalues(&(sigma(n) * transposed))?
        .iter()
        .map(|l| l.norm())
        .collect();
    moduli.sort_by(f64::total_cmp);
    // eigenvalues come in ±iν pairs
    Ok(moduli
        .chunks(2)
        .map(|pair| {
            let nu = pair.iter().sum::<f64>() / pair.len() as f64;
            (-(2.0 * nu).ln()).max(0.0)
        })
        .sum())
}

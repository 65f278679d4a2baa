//! Synthesis of dissipative systems with a prescribed unique pure steady state.
//!
//! A pure state is described by `Z = X + iY` (`X` symmetric, `Y` symmetric
//! positive definite), with covariance `½ S Sᵀ`,
//! `S = [[Y^{-1/2}, 0], [X Y^{-1/2}, Y^{1/2}]]`. Every system having it as a
//! steady state is parameterized by a complex `n x m` matrix `P`, a real
//! symmetric `R` and a real antisymmetric `Γ`:
//!
//! ```text
//! C  = Pᵀ (-Z, I)
//! G  = [[XRX + YRY - ΓY⁻¹X - XY⁻¹Γᵀ,  -XR + ΓY⁻¹],
//!       [-RX + Y⁻¹Γᵀ,                  R        ]]
//! ```
//!
//! The steady state is unique iff `(P, QP, …, Q^{n-1}P)` has rank `n`, where
//! `Q = -iRY - Y⁻¹Γᵀ`.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{sigma, CovarianceMatrix, GaussianDynamics};
use crate::numkit::{
    self, check_finite, check_finite_complex, check_symmetric, spd_roots, symmetrize, to_complex,
    ComplexMatrix, RealMatrix, SpdRoots, Tolerances,
};
use crate::steady::build_k;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Target pure Gaussian state as the pair `(X, Y)`.
#[derive(Debug, Clone)]
pub struct PureStateSpec {
    x: RealMatrix,
    y: RealMatrix,
    roots: SpdRoots,
}

impl PartialEq for PureStateSpec {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x && self.y == other.y
    }
}

impl PureStateSpec {
    pub fn new(x: RealMatrix, y: RealMatrix) -> Result<Self> {
        let atol = Tolerances::default().residual_atol;
        check_finite(&x, "X")?;
        check_finite(&y, "Y")?;
        check_symmetric(&x, "X", atol)?;
        check_symmetric(&y, "Y", atol)?;
        if x.shape() != y.shape() {
            return Err(Error::dims(
                "PureStateSpec",
                format!("Y {}x{}", x.nrows(), x.ncols()),
                format!("Y {}x{}", y.nrows(), y.ncols()),
            ));
        }
        let y = symmetrize(&y);
        let roots = spd_roots(&y)?;
        Ok(PureStateSpec {
            x: symmetrize(&x),
            y,
            roots,
        })
    }

    pub fn modes(&self) -> usize {
        self.x.nrows()
    }

    pub fn x(&self) -> &RealMatrix {
        &self.x
    }

    pub fn y(&self) -> &RealMatrix {
        &self.y
    }

    pub fn y_inv(&self) -> &RealMatrix {
        &self.roots.inv
    }

    /// `Z = X + iY`.
    pub fn z(&self) -> ComplexMatrix {
        self.x.zip_map(&self.y, Complex64::new)
    }

    /// `(-Z; I)`, whose columns span `ker(Vs + iΣ/2)`.
    pub fn kernel_basis(&self) -> ComplexMatrix {
        let n = self.modes();
        let mut out = ComplexMatrix::zeros(2 * n, n);
        out.view_mut((0, 0), (n, n)).copy_from(&(-self.z()));
        out.view_mut((n, 0), (n, n)).fill_with_identity();
        out
    }

    /// The symplectic matrix `S` with `Vs = ½ S Sᵀ`.
    pub fn symplectic(&self) -> RealMatrix {
        let n = self.modes();
        let mut s = RealMatrix::zeros(2 * n, 2 * n);
        s.view_mut((0, 0), (n, n)).copy_from(&self.roots.inv_sqrt);
        s.view_mut((n, 0), (n, n))
            .copy_from(&(&self.x * &self.roots.inv_sqrt));
        s.view_mut((n, n), (n, n)).copy_from(&self.roots.sqrt);
        s
    }
}

/// Covariance `½ S Sᵀ` of the target state. Fails if `S` is not symplectic
/// or the result is not pure to `residual_atol`.
pub fn target_covariance(spec: &PureStateSpec, tol: &Tolerances) -> Result<CovarianceMatrix> {
    let n = spec.modes();
    let s = spec.symplectic();
    let form = sigma(n);
    let defect = (&s * &form * s.transpose() - &form).norm();
    if defect > tol.residual_atol * (1.0 + s.norm_squared()) {
        return Err(Error::InvalidCovariance(format!(
            "S is not symplectic (defect {defect:e})"
        )));
    }
    let cov = CovarianceMatrix::new(symmetrize(&(&s * s.transpose() * 0.5)), tol)?;
    if !cov.is_pure(tol) {
        return Err(Error::InvalidCovariance(format!(
            "target is not pure (residual {:e})",
            cov.purity_residual()
        )));
    }
    Ok(cov)
}

/// The free parameters `(P, R, Γ)` of the synthesis.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineeringParameters {
    p: ComplexMatrix,
    r: RealMatrix,
    gamma: RealMatrix,
}

impl EngineeringParameters {
    pub fn new(p: ComplexMatrix, r: RealMatrix, gamma: RealMatrix) -> Result<Self> {
        let n = p.nrows();
        if p.ncols() == 0 {
            return Err(Error::dims(
                "EngineeringParameters: P",
                "at least one channel",
                "m = 0",
            ));
        }
        for (what, m) in [("R", &r), ("Gamma", &gamma)] {
            if m.shape() != (n, n) {
                return Err(Error::dims(
                    "EngineeringParameters",
                    format!("{what} {n}x{n}"),
                    format!("{what} {}x{}", m.nrows(), m.ncols()),
                ));
            }
        }
        check_finite_complex(&p, "P")?;
        check_finite(&r, "R")?;
        check_finite(&gamma, "Gamma")?;
        let atol = Tolerances::default().residual_atol;
        check_symmetric(&r, "R", atol)?;
        let bound = atol * (1.0 + gamma.amax());
        for i in 0..n {
            for j in i..n {
                if (gamma[(i, j)] + gamma[(j, i)]).abs() > bound {
                    return Err(Error::NotAntisymmetric {
                        what: "Gamma",
                        row: i,
                        col: j,
                    });
                }
            }
        }
        Ok(EngineeringParameters {
            p,
            r: symmetrize(&r),
            gamma: numkit::antisymmetrize(&gamma),
        })
    }

    /// `P = I`, `R = Γ = 0`: one channel per mode and no Hamiltonian.
    pub fn purely_dissipative(spec: &PureStateSpec) -> Self {
        let n = spec.modes();
        EngineeringParameters {
            p: ComplexMatrix::identity(n, n),
            r: RealMatrix::zeros(n, n),
            gamma: RealMatrix::zeros(n, n),
        }
    }

    pub fn p(&self) -> &ComplexMatrix {
        &self.p
    }

    pub fn r(&self) -> &RealMatrix {
        &self.r
    }

    pub fn gamma(&self) -> &RealMatrix {
        &self.gamma
    }

    pub fn channels(&self) -> usize {
        self.p.ncols()
    }
}

fn check_params(spec: &PureStateSpec, params: &EngineeringParameters) -> Result<()> {
    if params.p.nrows() != spec.modes() {
        return Err(Error::dims(
            "synthesize: P",
            format!("{} rows", spec.modes()),
            format!("{} rows", params.p.nrows()),
        ));
    }
    Ok(())
}

/// Builds `(G, C)` from the parameterization.
pub fn synthesize(
    spec: &PureStateSpec,
    params: &EngineeringParameters,
) -> Result<GaussianDynamics> {
    check_params(spec, params)?;
    let n = spec.modes();
    let (x, y, y_inv) = (&spec.x, &spec.y, &spec.roots.inv);
    let (r, gamma) = (&params.r, &params.gamma);

    let c = params.p.transpose() * spec.kernel_basis().transpose();

    let g1 = x * r * x + y * r * y - gamma * y_inv * x - x * y_inv * gamma.transpose();
    let g2 = -(x * r) + gamma * y_inv;
    let mut g = RealMatrix::zeros(2 * n, 2 * n);
    g.view_mut((0, 0), (n, n)).copy_from(&symmetrize(&g1));
    g.view_mut((0, n), (n, n)).copy_from(&g2);
    g.view_mut((n, 0), (n, n)).copy_from(&g2.transpose());
    g.view_mut((n, n), (n, n)).copy_from(r);
    GaussianDynamics::new(g, c)
}

/// `Q = -iRY - Y⁻¹Γᵀ`.
pub fn q_matrix(spec: &PureStateSpec, params: &EngineeringParameters) -> Result<ComplexMatrix> {
    check_params(spec, params)?;
    let ry = to_complex(&(&params.r * &spec.y));
    let yg = to_complex(&(&spec.roots.inv * params.gamma.transpose()));
    Ok(ry * (-I) - yg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankCondition {
    pub holds: bool,
    pub rank: usize,
}

/// Rank of `(P, QP, …, Q^{n-1}P)`; the condition holds iff it equals `n`.
pub fn rank_condition(
    p: &ComplexMatrix,
    q: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<RankCondition> {
    let n = p.nrows();
    if q.shape() != (n, n) {
        return Err(Error::dims(
            "rank_condition: Q",
            format!("{n}x{n}"),
            format!("{}x{}", q.nrows(), q.ncols()),
        ));
    }
    let m = p.ncols();
    let mut krylov = ComplexMatrix::zeros(n, n * m);
    let mut block = p.clone();
    for k in 0..n {
        krylov.view_mut((0, k * m), (n, m)).copy_from(&block);
        block = q * block;
    }
    let rank = numkit::numerical_rank(&krylov, tol)?;
    Ok(RankCondition {
        holds: rank == n,
        rank,
    })
}

/// Convenience: the rank condition for a parameter choice.
pub fn parameters_rank_condition(
    spec: &PureStateSpec,
    params: &EngineeringParameters,
    tol: &Tolerances,
) -> Result<RankCondition> {
    rank_condition(&params.p, &q_matrix(spec, params)?, tol)
}

/// Whether `ker(Vs + iΣ/2) = range(Kᵀ)`, i.e. the target is the unique
/// steady state of `sys`.
pub fn theorem2_check(
    spec: &PureStateSpec,
    sys: &GaussianDynamics,
    tol: &Tolerances,
) -> Result<bool> {
    if sys.modes() != spec.modes() {
        return Err(Error::dims(
            "theorem2_check",
            format!("{} modes", spec.modes()),
            format!("{} modes", sys.modes()),
        ));
    }
    let kt = build_k(sys).matrix().transpose();
    numkit::subspaces_equal(&spec.kernel_basis(), &kt, tol)
}

/// Which modes each channel and the Hamiltonian touch. Mode indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocalityProfile {
    pub channel_supports: Vec<BTreeSet<usize>>,
    /// Unordered pairs stored as `(i, j)` with `i < j`.
    pub hamiltonian_edges: BTreeSet<(usize, usize)>,
}

impl LocalityProfile {
    pub fn max_channel_support(&self) -> usize {
        self.channel_supports
            .iter()
            .map(|s| s.len())
            .max()
            .unwrap_or(0)
    }
}

pub fn locality_profile(sys: &GaussianDynamics, tol: &Tolerances) -> LocalityProfile {
    let n = sys.modes();
    let c = sys.c();
    let channel_supports = c
        .row_iter()
        .map(|row| {
            let scale = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let thresh = tol.rank_rtol * scale;
            (0..n)
                .filter(|&i| row[i].norm() > thresh || row[n + i].norm() > thresh)
                .collect()
        })
        .collect();

    let g = sys.g();
    let thresh = tol.rank_rtol * g.amax();
    let mut hamiltonian_edges = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let coupled = [g[(i, j)], g[(n + i, n + j)], g[(i, n + j)], g[(j, n + i)]]
                .iter()
                .any(|v| v.abs() > thresh);
            if coupled {
                hamiltonian_edges.insert((i, j));
            }
        }
    }
    LocalityProfile {
        channel_supports,
        hamiltonian_edges,
    }
}

//! Fixed-step integration of the first and second moment equations.

use crate::error::{Error, Result};
use crate::model::{CovarianceMatrix, GaussianDynamics, GaussianState};
use crate::numkit::{self, symmetrize, RealMatrix, RealVector, Tolerances};

/// Largest covariance eigenvalue tolerated before the run is declared divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Sampled trajectories are thinned to at most this many rows.
pub const MAX_SAMPLES: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub means: Vec<RealVector>,
    pub covs: Vec<CovarianceMatrix>,
    /// Fidelity to the unique steady state; `None` when it does not exist.
    pub fidelity: Option<Vec<f64>>,
    pub purity: Vec<f64>,
    /// Steady covariance the fidelity refers to.
    pub steady: Option<CovarianceMatrix>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `F = 1/sqrt(det(V + Vs))`, the fidelity between two zero-mean Gaussian
/// states when `Vs` is pure.
pub fn fidelity_to(v: &CovarianceMatrix, vs: &CovarianceMatrix) -> Result<f64> {
    if v.modes() != vs.modes() {
        return Err(Error::dims(
            "fidelity_to",
            format!("{} modes", vs.modes()),
            format!("{} modes", v.modes()),
        ));
    }
    let det = (v.matrix() + vs.matrix()).determinant();
    if !(det > 0.0) {
        return Err(Error::NonPositiveDeterminant(det));
    }
    Ok(1.0 / det.sqrt())
}

/// Default horizon and step for a Hurwitz drift: `40/|α|` and
/// `min(0.01/|α|, 0.1/ρ)`, with `α` the spectral abscissa and `ρ` the spectral
/// radius, so fast modes stay well inside the RK4 stability region. `None` if
/// the drift is not Hurwitz.
pub fn default_time_grid(sys: &GaussianDynamics, tol: &Tolerances) -> Result<Option<(f64, f64)>> {
    let spectrum = numkit::eigenvalues(&sys.drift_matrix())?;
    let abscissa = spectrum
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if abscissa < -tol.eig_real_tol {
        let rate = abscissa.abs();
        let radius = spectrum.iter().map(|l| l.norm()).fold(0.0, f64::max);
        Ok(Some((40.0 / rate, (0.01 / rate).min(0.1 / radius))))
    } else {
        Ok(None)
    }
}

/// Integrates `d<x>/dt = A<x>` and `dV/dt = AV + VAᵀ + D` with classical RK4.
///
/// The step is shrunk to `t_final / ceil(t_final / dt)` so the run ends
/// exactly at `t_final`. Rows are recorded every `k`-th step with `k` chosen
/// to keep at most [`MAX_SAMPLES`] rows; the first and last steps are always
/// kept.
pub fn evolve(
    sys: &GaussianDynamics,
    init: &GaussianState,
    t_final: f64,
    dt: f64,
    tol: &Tolerances,
) -> Result<Trajectory> {
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::InvalidTimeGrid(format!(
            "t_final = {t_final} must be positive"
        )));
    }
    if !(dt.is_finite() && dt > 0.0 && dt <= t_final) {
        return Err(Error::InvalidTimeGrid(format!(
            "dt = {dt} must lie in (0, t_final]"
        )));
    }
    if init.cov.modes() != sys.modes() {
        return Err(Error::dims(
            "evolve: initial state",
            format!("{} modes", sys.modes()),
            format!("{} modes", init.cov.modes()),
        ));
    }

    let a = sys.drift_matrix();
    let at = a.transpose();
    let d = sys.diffusion_matrix();
    let steady = if numkit::is_hurwitz(&a, tol)? {
        Some(CovarianceMatrix::new(
            numkit::lyapunov_solve(&a, &d, tol)?,
            tol,
        )?)
    } else {
        None
    };

    let steps = (t_final / dt).ceil() as usize;
    let h = t_final / steps as f64;
    let stride = steps.div_ceil(MAX_SAMPLES - 1).max(1);

    let cov_rate = |v: &RealMatrix| &a * v + v * &at + &d;

    let mut traj = Trajectory {
        times: Vec::new(),
        means: Vec::new(),
        covs: Vec::new(),
        fidelity: steady.as_ref().map(|_| Vec::new()),
        purity: Vec::new(),
        steady: steady.clone(),
    };
    let mut record = |t: f64, mean: &RealVector, v: &RealMatrix| -> Result<()> {
        let cov = CovarianceMatrix::from_matrix_unchecked(v.clone());
        traj.purity.push(cov.purity()?);
        if let (Some(f), Some(vs)) = (traj.fidelity.as_mut(), steady.as_ref()) {
            f.push(fidelity_to(&cov, vs)?);
        }
        traj.times.push(t);
        traj.means.push(mean.clone());
        traj.covs.push(cov);
        Ok(())
    };

    let mut mean = init.mean.clone();
    let mut v = init.cov.matrix().clone();
    record(0.0, &mean, &v)?;
    for step in 1..=steps {
        let k1 = &a * &mean;
        let k2 = &a * (&mean + &k1 * (h / 2.0));
        let k3 = &a * (&mean + &k2 * (h / 2.0));
        let k4 = &a * (&mean + &k3 * h);
        mean += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);

        let l1 = cov_rate(&v);
        let l2 = cov_rate(&(&v + &l1 * (h / 2.0)));
        let l3 = cov_rate(&(&v + &l2 * (h / 2.0)));
        let l4 = cov_rate(&(&v + &l3 * h));
        v = symmetrize(&(&v + (l1 + l2 * 2.0 + l3 * 2.0 + l4) * (h / 6.0)));

        let t = step as f64 * h;
        // λ_max ≤ tr V for V ≥ 0, so the spectrum is only needed past the limit
        let trace = v.trace();
        if !(trace <= DIVERGENCE_LIMIT) {
            let largest = numkit::symmetric_eigenvalues(&v)
                .map(|e| e.last().copied().unwrap_or(0.0))
                .unwrap_or(f64::NAN);
            if !(largest <= DIVERGENCE_LIMIT) {
                return Err(Error::UnstableStep {
                    t,
                    eigenvalue: largest,
                });
            }
        }
        if step % stride == 0 || step == steps {
            record(t, &mean, &v)?;
        }
    }
    Ok(traj)
}

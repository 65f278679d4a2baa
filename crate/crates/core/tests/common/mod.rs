//! Random instances and reference computations shared by the integration tests.
#![allow(dead_code)]

use gausseng::numkit;
use gausseng::{
    Complex64, ComplexMatrix, EngineeringParameters, GaussianDynamics, PureStateSpec, RealMatrix,
    Tolerances,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_real(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> RealMatrix {
    RealMatrix::from_fn(rows, cols, |_, _| rng.random_range(-scale..=scale))
}

pub fn uniform_complex(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(
            rng.random_range(-scale..=scale),
            rng.random_range(-scale..=scale),
        )
    })
}

pub fn uniform_symmetric(rng: &mut impl Rng, n: usize, scale: f64) -> RealMatrix {
    let m = uniform_real(rng, n, n, scale);
    RealMatrix::from_fn(n, n, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)] })
}

pub fn uniform_antisymmetric(rng: &mut impl Rng, n: usize, scale: f64) -> RealMatrix {
    let m = uniform_real(rng, n, n, scale);
    RealMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => m[(i, j)],
        std::cmp::Ordering::Greater => -m[(j, i)],
        std::cmp::Ordering::Equal => 0.0,
    })
}

/// `G` symmetric and `C` complex, all entries uniform in `[-1, 1]`.
pub fn random_system(rng: &mut impl Rng, n: usize, m: usize) -> GaussianDynamics {
    GaussianDynamics::new(
        uniform_symmetric(rng, 2 * n, 1.0),
        uniform_complex(rng, m, 2 * n, 1.0),
    )
    .unwrap()
}

/// Random `Z = X + iY` with `Y ≥ 0.3 I`.
pub fn random_spec(rng: &mut impl Rng, n: usize) -> PureStateSpec {
    let x = uniform_symmetric(rng, n, 1.0);
    let b = uniform_real(rng, n, n, 1.0);
    let y = &b * b.transpose() + RealMatrix::identity(n, n) * 0.3;
    PureStateSpec::new(x, y).unwrap()
}

pub fn random_params(rng: &mut impl Rng, n: usize, m: usize) -> EngineeringParameters {
    EngineeringParameters::new(
        uniform_complex(rng, n, m, 1.0),
        uniform_symmetric(rng, n, 1.0),
        uniform_antisymmetric(rng, n, 1.0),
    )
    .unwrap()
}

/// Random drift shifted so its spectral abscissa is `-margin`.
pub fn random_hurwitz(rng: &mut impl Rng, dim: usize, margin: f64) -> RealMatrix {
    let m = uniform_real(rng, dim, dim, 1.0);
    let shift = numkit::spectral_abscissa(&m).unwrap() + margin;
    m - RealMatrix::identity(dim, dim) * shift
}

pub fn random_psd(rng: &mut impl Rng, dim: usize) -> RealMatrix {
    let b = uniform_real(rng, dim, dim, 1.0);
    &b * b.transpose()
}

/// `e^{A}` by a Taylor series after scaling to norm below 1/2, then squaring.
pub fn expm_taylor(a: &RealMatrix) -> RealMatrix {
    let norm = a.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings as i32);
    let dim = a.nrows();
    let mut term = RealMatrix::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `V(t) = e^{At}(V₀ - Vs)e^{Aᵀt} + Vs`.
pub fn closed_form_cov(a: &RealMatrix, vs: &RealMatrix, v0: &RealMatrix, t: f64) -> RealMatrix {
    let e = expm_taylor(&(a * t));
    &e * (v0 - vs) * e.transpose() + vs
}

/// Composite Simpson rule for `∫₀ᵀ e^{At} D e^{Aᵀt} dt` on `intervals` (even) panels.
pub fn gramian_simpson(
    a: &RealMatrix,
    d: &RealMatrix,
    horizon: f64,
    intervals: usize,
) -> RealMatrix {
    assert!(intervals.is_multiple_of(2));
    let h = horizon / intervals as f64;
    let step = expm_taylor(&(a * h));
    let mut e = RealMatrix::identity(a.nrows(), a.ncols());
    let mut acc = RealMatrix::zeros(a.nrows(), a.ncols());
    for k in 0..=intervals {
        let weight = if k == 0 || k == intervals {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += (&e * d * e.transpose()) * weight;
        e = &step * e;
    }
    acc * (h / 3.0)
}

/// Steady covariance of the cascaded OPOs with pumps `(ε, -ε)`.
pub fn cascaded_steady(kappa: f64, eps: f64) -> RealMatrix {
    let (gm, gp) = (kappa - eps, kappa + eps);
    RealMatrix::from_row_slice(
        4,
        4,
        &[
            kappa / gm,
            -eps / gm,
            0.0,
            0.0,
            -eps / gm,
            kappa / gm,
            0.0,
            0.0,
            0.0,
            0.0,
            kappa / gp,
            eps / gp,
            0.0,
            0.0,
            eps / gp,
            kappa / gp,
        ],
    ) * 0.5
}

pub fn tol() -> Tolerances {
    Tolerances::default()
}

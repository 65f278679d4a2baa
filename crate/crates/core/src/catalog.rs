//! Named systems and target states.
//!
//! Rates and pump strengths are plain numbers (the reference cascaded-OPO
//! configuration uses κ = 6.0 and ε = 4.8, quoted in MHz in the literature).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::engineer::PureStateSpec;
use crate::error::{Error, Result};
use crate::model::GaussianDynamics;
use crate::numkit::{self, symmetrize, ComplexMatrix, RealMatrix};

/// Degenerate optical parametric oscillator with damping `kappa` and complex
/// pump `eps`: `G = [[Re ε, Im ε], [Im ε, -Re ε]]`, `C = √(κ/2) (1, i)`.
pub fn single_opo(kappa: f64, eps: Complex64) -> Result<GaussianDynamics> {
    if !(kappa > 0.0) {
        return Err(Error::NonPositiveRate(kappa));
    }
    let g = RealMatrix::from_row_slice(2, 2, &[eps.re, eps.im, eps.im, -eps.re]);
    let s = (kappa / 2.0).sqrt();
    let c = ComplexMatrix::from_row_slice(1, 2, &[Complex64::new(s, 0.0), Complex64::new(0.0, s)]);
    GaussianDynamics::new(g, c)
}

/// Series product of two single-channel systems: the output field of
/// `first` drives `second`.
///
/// `H = H₁ + H₂ + (L₂†L₁ - L₁†L₂)/2i`, `L = L₁ + L₂`, with the modes of
/// `first` placed before those of `second`.
pub fn cascade(first: &GaussianDynamics, second: &GaussianDynamics) -> Result<GaussianDynamics> {
    for sys in [first, second] {
        if sys.channels() != 1 {
            return Err(Error::NotSingleChannel(sys.channels()));
        }
    }
    let (n1, n2) = (first.modes(), second.modes());
    let n = n1 + n2;
    // block index of mode-local quadrature k (q's then p's) at mode offset
    let place = |k: usize, local_n: usize, offset: usize| {
        if k < local_n {
            offset + k
        } else {
            n + offset + (k - local_n)
        }
    };

    let mut g = RealMatrix::zeros(2 * n, 2 * n);
    let mut c1 = ComplexMatrix::zeros(1, 2 * n);
    let mut c2 = ComplexMatrix::zeros(1, 2 * n);
    for (sys, offset, c) in [(first, 0, &mut c1), (second, n1, &mut c2)] {
        let ln = sys.modes();
        for a in 0..2 * ln {
            c[(0, place(a, ln, offset))] = sys.c()[(0, a)];
            for b in 0..2 * ln {
                g[(place(a, ln, offset), place(b, ln, offset))] = sys.g()[(a, b)];
            }
        }
    }

    // (L₂†L₁ - L₁†L₂)/2i = xᵀ M x / 2i with M = c̄₂ c₁ᵀ - c̄₁ c₂ᵀ; its
    // symmetric part is purely imaginary and gives G_c = Im(M + Mᵀ)/2.
    let m = c2.adjoint() * &c1 - c1.adjoint() * &c2;
    let coupling = numkit::imag_part(&(&m + m.transpose())) * 0.5;
    g += coupling;
    GaussianDynamics::new(symmetrize(&g), c1 + c2)
}

/// Two OPOs with real pumps `eps1`, `eps2` cascaded through a unidirectional
/// field. Each OPO has `H_j = iε_j(a_j†² - a_j²)/4`, which is
/// `single_opo(κ, iε_j/2)` in the single-OPO parameterization.
pub fn cascaded_opos(kappa: f64, eps1: f64, eps2: f64) -> Result<GaussianDynamics> {
    let first = single_opo(kappa, Complex64::new(0.0, eps1 / 2.0))?;
    let second = single_opo(kappa, Complex64::new(0.0, eps2 / 2.0))?;
    cascade(&first, &second)
}

/// Canonical CV cluster state on graph `adjacency`: `Z = X + i e^{-2r} I`.
pub fn cv_cluster(adjacency: &RealMatrix, r: f64) -> Result<PureStateSpec> {
    if let Some((i, j)) = first_asymmetry(adjacency)? {
        return Err(Error::AsymmetricAdjacency(i, j));
    }
    let n = adjacency.nrows();
    PureStateSpec::new(
        adjacency.clone(),
        RealMatrix::identity(n, n) * (-2.0 * r).exp(),
    )
}

/// H-graph state `Z = i e^{-2αW}` for a symmetric graph matrix `W`.
pub fn h_graph(w: &RealMatrix, alpha: f64) -> Result<PureStateSpec> {
    if let Some((i, j)) = first_asymmetry(w)? {
        return Err(Error::AsymmetricW(i, j));
    }
    let n = w.nrows();
    let y = symmetrize(&numkit::matrix_exp(w, -2.0 * alpha)?);
    PureStateSpec::new(RealMatrix::zeros(n, n), y)
}

/// Two-mode squeezed state: the H-graph state of `W = [[0, 1], [1, 0]]`.
pub fn two_mode_squeezed(alpha: f64) -> Result<PureStateSpec> {
    h_graph(
        &RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        alpha,
    )
}

/// Adjacency matrix of the open chain `0 - 1 - … - (n-1)`.
pub fn chain_adjacency(n: usize) -> RealMatrix {
    RealMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 })
}

/// Adjacency matrix of the closed ring on `n` modes.
pub fn ring_adjacency(n: usize) -> RealMatrix {
    let mut x = chain_adjacency(n);
    if n > 2 {
        x[(0, n - 1)] = 1.0;
        x[(n - 1, 0)] = 1.0;
    }
    x
}

/// Equally weighted one-dimensional harmonic chain cluster state.
pub fn harmonic_chain(n: usize, r: f64) -> Result<PureStateSpec> {
    if n < 2 {
        return Err(Error::TooFewModes { min: 2, got: n });
    }
    cv_cluster(&chain_adjacency(n), r)
}

fn first_asymmetry(m: &RealMatrix) -> Result<Option<(usize, usize)>> {
    numkit::check_square(m, "graph matrix")?;
    let bound = 1e-12 * (1.0 + m.amax());
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > bound {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    System,
    StateSpec,
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryKind::System => "system",
            EntryKind::StateSpec => "state-spec",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub description: &'static str,
}

const fn param(name: &'static str, default: f64, description: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        default,
        description,
    }
}

/// A catalog item as built from its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogItem {
    System(GaussianDynamics),
    StateSpec(PureStateSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    pub summary: &'static str,
    pub parameters: Vec<ParamSpec>,
}

/// Every named entry, in display order.
pub fn entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "single_opo",
            kind: EntryKind::System,
            summary: "degenerate OPO coupled to vacuum through one mirror",
            parameters: vec![
                param("kappa", 6.0, "cavity damping rate (> 0)"),
                param("eps", 0.0, "real part of the pump"),
                param("eps_im", 0.0, "imaginary part of the pump"),
            ],
        },
        CatalogEntry {
            name: "cascaded_opos",
            kind: EntryKind::System,
            summary: "two OPOs cascaded through a unidirectional field",
            parameters: vec![
                param("kappa", 6.0, "cavity damping rate (> 0)"),
                param("eps", 4.8, "sets eps1 = eps and eps2 = -eps"),
                param("eps1", f64::NAN, "pump of the first OPO (overrides eps)"),
                param("eps2", f64::NAN, "pump of the second OPO (overrides eps)"),
            ],
        },
        CatalogEntry {
            name: "cv_cluster",
            kind: EntryKind::StateSpec,
            summary: "canonical CV cluster state on a ring graph",
            parameters: vec![
                param("n", 4.0, "number of modes (>= 2)"),
                param("r", 1.0, "squeezing parameter"),
            ],
        },
        CatalogEntry {
            name: "h_graph",
            kind: EntryKind::StateSpec,
            summary: "H-graph state with W the exchange (anti-diagonal) matrix",
            parameters: vec![
                param("n", 2.0, "number of modes (>= 1)"),
                param("alpha", 0.5, "interaction strength α = 2κt"),
            ],
        },
        CatalogEntry {
            name: "harmonic_chain",
            kind: EntryKind::StateSpec,
            summary: "equally weighted 1-D harmonic chain cluster state",
            parameters: vec![
                param("n", 4.0, "number of modes (>= 2)"),
                param("r", 1.0, "squeezing parameter"),
            ],
        },
        CatalogEntry {
            name: "two_mode_squeezed",
            kind: EntryKind::StateSpec,
            summary: "two-mode squeezed (approximate EPR) state",
            parameters: vec![param("alpha", 0.5, "squeezing α")],
        },
    ]
}

pub fn entry(name: &str) -> Result<CatalogEntry> {
    entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

fn mode_count(value: f64, min: usize) -> Result<usize> {
    if value.fract() != 0.0 || value < min as f64 || value > 64.0 {
        return Err(Error::InvalidParameter {
            param: "n".into(),
            value,
            reason: "must be an integer mode count within range",
        });
    }
    Ok(value as usize)
}

/// Builds entry `name`, overriding defaults with `overrides`.
pub fn build(name: &str, overrides: &BTreeMap<String, f64>) -> Result<CatalogItem> {
    let entry = entry(name)?;
    let mut values: BTreeMap<&str, f64> = entry
        .parameters
        .iter()
        .map(|p| (p.name, p.default))
        .collect();
    for (key, &value) in overrides {
        match values.get_mut(key.as_str()) {
            Some(slot) => *slot = value,
            None => {
                return Err(Error::UnknownParameter {
                    entry: name.to_string(),
                    param: key.clone(),
                })
            }
        }
        if !value.is_finite() {
            return Err(Error::InvalidParameter {
                param: key.clone(),
                value,
                reason: "must be finite",
            });
        }
    }
    let get = |k: &str| values[k];

    Ok(match entry.name {
        "single_opo" => CatalogItem::System(single_opo(
            get("kappa"),
            Complex64::new(get("eps"), get("eps_im")),
        )?),
        "cascaded_opos" => {
            let e1 = if get("eps1").is_nan() {
                get("eps")
            } else {
                get("eps1")
            };
            let e2 = if get("eps2").is_nan() {
                -get("eps")
            } else {
                get("eps2")
            };
            CatalogItem::System(cascaded_opos(get("kappa"), e1, e2)?)
        }
        "cv_cluster" => {
            let n = mode_count(get("n"), 2)?;
            CatalogItem::StateSpec(cv_cluster(&ring_adjacency(n), get("r"))?)
        }
        "h_graph" => {
            let n = mode_count(get("n"), 1)?;
            let w = RealMatrix::from_fn(n, n, |i, j| if i + j == n - 1 { 1.0 } else { 0.0 });
            CatalogItem::StateSpec(h_graph(&w, get("alpha"))?)
        }
        "harmonic_chain" => {
            CatalogItem::StateSpec(harmonic_chain(mode_count(get("n"), 2)?, get("r"))?)
        }
        "two_mode_squeezed" => CatalogItem::StateSpec(two_mode_squeezed(get("alpha"))?),
        other => unreachable!("catalog entry {other} has no builder"),
    })
}

//! Reports as JSON values and as text. Mode indices are 1-based here.

use std::fmt::Write;

use gausseng::engineer::{LocalityProfile, RankCondition};
use gausseng::{Complex64, ComplexMatrix, CovarianceMatrix, RealMatrix, Theorem1Report};
use serde_json::{json, Value};

use crate::io::real_rows;

/// Log-negativity across the cut `partition | rest`.
pub struct Negativity {
    /// 1-based.
    pub partition: Vec<usize>,
    pub rest: Vec<usize>,
    pub value: f64,
}

// -0.0 prints as "-0.000000"
fn clean(x: f64) -> f64 {
    x + 0.0
}

fn sorted_eigenvalues(report: &Theorem1Report) -> Vec<Complex64> {
    let mut eig = report.drift_eigenvalues.clone();
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    eig
}

pub fn verdict(report: &Theorem1Report) -> &'static str {
    match (report.unique, report.pure()) {
        (false, _) => "steady state not unique",
        (true, false) => "unique steady state, not pure",
        (true, true) => "unique pure steady state",
    }
}

pub fn analyze_json(report: &Theorem1Report, negativity: Option<&Negativity>) -> Value {
    let eigenvalues: Vec<[f64; 2]> = sorted_eigenvalues(report)
        .iter()
        .map(|l| [l.re, l.im])
        .collect();
    let steady = report.steady.as_ref().map(|s| {
        let formula = match &s.formula {
            Ok(f) => json!({
                "covariance_deviation": (f.covariance.matrix() - s.covariance.matrix()).amax(),
                "gram_condition": f.gram_condition,
                "symmetry_residual": f.symmetry_residual,
            }),
            Err(e) => json!({ "error": e.to_string() }),
        };
        json!({
            "covariance": real_rows(s.covariance.matrix()),
            "purity": s.purity,
            "pure": s.pure,
            "condition_ii": {
                "holds": s.condition_ii.holds,
                "dark_residual": s.condition_ii.dark_residual,
                "hamiltonian_residual": s.condition_ii.hamiltonian_residual,
            },
            "condition_iii": {
                "holds": s.condition_iii.holds,
                "residual": s.condition_iii.residual,
            },
            "formula": formula,
            "log_negativity": negativity.map(|e| json!({ "partition": e.partition, "value": e.value })),
        })
    });
    json!({
        "unique": report.unique,
        "pure": report.pure(),
        "conditions_agree": report.conditions_agree(),
        "drift_eigenvalues": eigenvalues,
        "steady": steady,
    })
}

pub fn analyze_text(
    report: &Theorem1Report,
    modes: usize,
    channels: usize,
    negativity: Option<&Negativity>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "modes: {modes}, channels: {channels}");
    let _ = writeln!(out, "verdict: {}", verdict(report));
    let _ = writeln!(out, "drift eigenvalues:");
    for l in sorted_eigenvalues(report) {
        let _ = writeln!(out, "  {}", complex(l));
    }
    let Some(s) = &report.steady else {
        let _ = writeln!(
            out,
            "the drift is not Hurwitz, so no unique steady state exists"
        );
        return out;
    };
    let holds = |b: bool| if b { "holds" } else { "fails" };
    let _ = writeln!(out, "purity: {:.10}", s.purity);
    let _ = writeln!(
        out,
        "condition (ii): {}  (dark residual {:.3e}, hamiltonian residual {:.3e})",
        holds(s.condition_ii.holds),
        s.condition_ii.dark_residual,
        s.condition_ii.hamiltonian_residual
    );
    let _ = writeln!(
        out,
        "condition (iii): {}  (residual {:.3e})",
        holds(s.condition_iii.holds),
        s.condition_iii.residual
    );
    match &s.formula {
        Ok(f) => {
            let _ = writeln!(
                out,
                "closed form: agrees with the Lyapunov solution to {:.3e} (Gram condition {:.3e})",
                (f.covariance.matrix() - s.covariance.matrix()).amax(),
                f.gram_condition
            );
        }
        Err(e) => {
            let _ = writeln!(out, "closed form: not applicable ({e})");
        }
    }
    if !report.conditions_agree() {
        let _ = writeln!(
            out,
            "warning: purity and conditions (ii), (iii) disagree; check the tolerances"
        );
    }
    if let Some(e) = negativity {
        let _ = writeln!(
            out,
            "log-negativity E({:?} | {:?}) = {:.4}",
            e.partition, e.rest, e.value
        );
    }
    let _ = writeln!(out, "Vs =");
    out.push_str(&real_matrix(s.covariance.matrix()));
    out
}

pub struct EngineerOutcome<'a> {
    pub modes: usize,
    pub channels: usize,
    pub rank: RankCondition,
    pub theorem2: bool,
    pub locality: &'a LocalityProfile,
    pub target: &'a CovarianceMatrix,
    pub written: Option<String>,
}

fn supports(locality: &LocalityProfile) -> Vec<Vec<usize>> {
    locality
        .channel_supports
        .iter()
        .map(|s| s.iter().map(|k| k + 1).collect())
        .collect()
}

fn edges(locality: &LocalityProfile) -> Vec<[usize; 2]> {
    locality
        .hamiltonian_edges
        .iter()
        .map(|&(i, j)| [i + 1, j + 1])
        .collect()
}

pub fn engineer_json(o: &EngineerOutcome) -> Value {
    json!({
        "modes": o.modes,
        "channels": o.channels,
        "rank_condition": { "holds": o.rank.holds, "rank": o.rank.rank, "required": o.modes },
        "theorem2_check": o.theorem2,
        "locality": {
            "channel_supports": supports(o.locality),
            "hamiltonian_edges": edges(o.locality),
            "max_channel_support": o.locality.max_channel_support(),
        },
        "target_covariance": real_rows(o.target.matrix()),
        "output": o.written,
    })
}

pub fn engineer_text(o: &EngineerOutcome) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "modes: {}, channels: {}", o.modes, o.channels);
    let _ = writeln!(
        out,
        "rank condition: {}  (rank {} of {})",
        if o.rank.holds { "holds" } else { "fails" },
        o.rank.rank,
        o.modes
    );
    let _ = writeln!(
        out,
        "target is the unique steady state: {}",
        if o.theorem2 { "yes" } else { "no" }
    );
    let _ = writeln!(out, "channel supports:");
    for (k, s) in supports(o.locality).iter().enumerate() {
        let _ = writeln!(out, "  channel {}: modes {:?}", k + 1, s);
    }
    let e = edges(o.locality);
    if e.is_empty() {
        let _ = writeln!(out, "hamiltonian couplings: none");
    } else {
        let list: Vec<String> = e.iter().map(|[i, j]| format!("{i}-{j}")).collect();
        let _ = writeln!(out, "hamiltonian couplings: {}", list.join(", "));
    }
    match &o.written {
        Some(path) => {
            let _ = writeln!(out, "wrote {path}");
        }
        None if !o.rank.holds => {
            let _ = writeln!(out, "no system written: the rank condition fails");
        }
        None => {}
    }
    out
}

pub fn complex(z: Complex64) -> String {
    let (re, im) = (clean(z.re), clean(z.im));
    if im < 0.0 {
        format!("{re:.10} - {:.10}i", -im)
    } else {
        format!("{re:.10} + {im:.10}i")
    }
}

pub fn real_matrix(m: &RealMatrix) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        for x in row.iter() {
            let _ = write!(out, " {:>12.6}", clean(*x));
        }
        out.push('\n');
    }
    out
}

pub fn complex_matrix(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        for z in row.iter() {
            let (re, im) = (clean(z.re), clean(z.im));
            let cell = format!(
                "{re:.4}{}{:.4}i",
                if im < 0.0 { "-" } else { "+" },
                im.abs()
            );
            let _ = write!(out, " {cell:>17}");
        }
        out.push('\n');
    }
    out
}

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use gausseng::catalog::{self, CatalogItem};
use gausseng::dynamics::{default_time_grid, evolve};
use gausseng::engineer::{
    locality_profile, parameters_rank_condition, synthesize, target_covariance, theorem2_check,
};
use gausseng::steady::{analyze as analyze_system, log_negativity};
use gausseng::{
    numkit, CovarianceMatrix, EngineeringParameters, GaussianDynamics, GaussianState,
    PureStateSpec, RealMatrix, Tolerances, Trajectory,
};

use crate::io::{self, ParamsFile, SpecFile, SystemFile};
use crate::report::{self, EngineerOutcome, Negativity};
use crate::{AnalyzeArgs, CatalogCommand, EngineerArgs, EntryArgs, SimulateArgs, Source};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_NOT_PURE: u8 = 2;
pub const EXIT_NOT_UNIQUE: u8 = 3;
pub const EXIT_RANK_FAILED: u8 = 4;

/// Parses `name=value` for `--set`.
pub fn parse_override(arg: &str) -> Result<(String, f64), String> {
    let (name, value) = arg
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{arg}`"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not a number"))?;
    Ok((name.trim().to_string(), value))
}

fn build_entry(name: &str, overrides: &[(String, f64)]) -> Result<CatalogItem> {
    let map: BTreeMap<String, f64> = overrides.iter().cloned().collect();
    Ok(catalog::build(name, &map)?)
}

fn load_system(source: &Source) -> Result<GaussianDynamics> {
    match (&source.catalog, &source.file) {
        (Some(name), _) => match build_entry(name, &source.overrides)? {
            CatalogItem::System(sys) => Ok(sys),
            CatalogItem::StateSpec(_) => {
                bail!("catalog entry `{name}` is a state spec, not a system; try `engineer --catalog {name}`")
            }
        },
        (None, Some(path)) => io::read::<SystemFile>(path)?
            .to_system()
            .with_context(|| format!("invalid system in {}", path.display())),
        (None, None) => bail!("no input given"),
    }
}

fn load_spec(source: &Source) -> Result<PureStateSpec> {
    match (&source.catalog, &source.file) {
        (Some(name), _) => match build_entry(name, &source.overrides)? {
            CatalogItem::StateSpec(spec) => Ok(spec),
            CatalogItem::System(_) => bail!("catalog entry `{name}` is a system, not a state spec"),
        },
        (None, Some(path)) => io::read::<SpecFile>(path)?
            .to_spec()
            .with_context(|| format!("invalid spec in {}", path.display())),
        (None, None) => bail!("no input given"),
    }
}

fn negativity(cov: &CovarianceMatrix, requested: &[usize]) -> Result<Option<Negativity>> {
    let n = cov.modes();
    let partition: Vec<usize> = if requested.is_empty() {
        if n < 2 {
            return Ok(None);
        }
        vec![1]
    } else {
        requested.to_vec()
    };
    if let Some(&bad) = partition.iter().find(|&&k| k == 0 || k > n) {
        bail!("partition mode {bad} is out of range 1..={n}");
    }
    let zero_based: Vec<usize> = partition.iter().map(|k| k - 1).collect();
    let value = log_negativity(cov, &zero_based)?;
    let rest = (1..=n).filter(|k| !partition.contains(k)).collect();
    Ok(Some(Negativity {
        partition,
        rest,
        value,
    }))
}

pub fn analyze(args: &AnalyzeArgs) -> Result<u8> {
    let tol = Tolerances::default();
    let sys = load_system(&args.source)?;
    let result = analyze_system(&sys, &tol)?;
    let e = match result.steady_covariance() {
        Some(vs) => negativity(vs, &args.partition)?,
        None => None,
    };
    if args.json {
        print!(
            "{}",
            io::to_canonical(&report::analyze_json(&result, e.as_ref()))?
        );
    } else {
        print!(
            "{}",
            report::analyze_text(&result, sys.modes(), sys.channels(), e.as_ref())
        );
    }
    Ok(match (result.unique, result.pure()) {
        (false, _) => EXIT_NOT_UNIQUE,
        (true, false) => EXIT_NOT_PURE,
        (true, true) => EXIT_OK,
    })
}

pub fn engineer(args: &EngineerArgs) -> Result<u8> {
    let tol = Tolerances::default();
    let spec = load_spec(&args.source)?;
    let params = match &args.params {
        Some(path) => io::read::<ParamsFile>(path)?
            .to_params(spec.modes())
            .with_context(|| format!("invalid parameters in {}", path.display()))?,
        None => EngineeringParameters::purely_dissipative(&spec),
    };
    let rank = parameters_rank_condition(&spec, &params, &tol)?;
    let sys = synthesize(&spec, &params)?;
    let theorem2 = theorem2_check(&spec, &sys, &tol)?;
    let locality = locality_profile(&sys, &tol);
    let target = target_covariance(&spec, &tol)?;

    let written = match (&args.output, rank.holds) {
        (Some(path), true) => {
            io::write_canonical(&SystemFile::from_system(&sys), path)?;
            Some(path.display().to_string())
        }
        _ => None,
    };
    let outcome = EngineerOutcome {
        modes: spec.modes(),
        channels: sys.channels(),
        rank,
        theorem2,
        locality: &locality,
        target: &target,
        written,
    };
    if args.json {
        print!("{}", io::to_canonical(&report::engineer_json(&outcome))?);
    } else {
        print!("{}", report::engineer_text(&outcome));
    }
    Ok(if rank.holds {
        EXIT_OK
    } else {
        EXIT_RANK_FAILED
    })
}

fn initial_state(init: &str, sys: &GaussianDynamics, tol: &Tolerances) -> Result<GaussianState> {
    let n = sys.modes();
    let cov = match init {
        "vacuum" => CovarianceMatrix::vacuum(n),
        "steady" => {
            let v = numkit::lyapunov_solve(&sys.drift_matrix(), &sys.diffusion_matrix(), tol)
                .context("--init steady needs a unique steady state")?;
            CovarianceMatrix::new(v, tol)?
        }
        other => {
            let scale: f64 = other.parse().map_err(|_| {
                anyhow!("--init must be `vacuum`, `steady` or a number, got `{other}`")
            })?;
            CovarianceMatrix::new(RealMatrix::identity(2 * n, 2 * n) * scale, tol)
                .with_context(|| format!("--init {other} is not a valid covariance"))?
        }
    };
    Ok(GaussianState::centered(cov))
}

fn quadrature_names(n: usize) -> Vec<String> {
    (1..=n)
        .map(|k| format!("q{k}"))
        .chain((1..=n).map(|k| format!("p{k}")))
        .collect()
}

fn csv_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Header plus one row per sample: `t, fidelity, purity`, the mean, then
/// the upper triangle of `V` row by row.
pub fn trajectory_csv(traj: &Trajectory, n: usize) -> String {
    let names = quadrature_names(n);
    let mut header = vec![
        "t".to_string(),
        "fidelity".to_string(),
        "purity".to_string(),
    ];
    header.extend(names.iter().map(|q| format!("mean_{q}")));
    for i in 0..2 * n {
        for j in i..2 * n {
            header.push(format!("V_{}_{}", names[i], names[j]));
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for k in 0..traj.len() {
        let fidelity = traj.fidelity.as_ref().map_or(f64::NAN, |f| f[k]);
        let mut row = vec![
            csv_float(traj.times[k]),
            csv_float(fidelity),
            csv_float(traj.purity[k]),
        ];
        row.extend(traj.means[k].iter().map(|&x| csv_float(x)));
        let v = traj.covs[k].matrix();
        for i in 0..2 * n {
            for j in i..2 * n {
                row.push(csv_float(v[(i, j)]));
            }
        }
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn simulate(args: &SimulateArgs) -> Result<u8> {
    let tol = Tolerances::default();
    let sys = load_system(&args.source)?;
    let grid = default_time_grid(&sys, &tol)?;
    if grid.is_none() && !args.force {
        let abscissa = numkit::spectral_abscissa(&sys.drift_matrix())?;
        eprintln!(
            "error: the drift is not Hurwitz (largest real part {abscissa:.6e}), so there is no unique steady state; \
             pass --force to integrate anyway"
        );
        return Ok(EXIT_NOT_UNIQUE);
    }
    let t_final = match (args.t_final, grid) {
        (Some(t), _) => t,
        (None, Some((t, _))) => t,
        (None, None) => bail!("--t-final is required when the drift is not Hurwitz"),
    };
    let dt = match (args.dt, grid) {
        (Some(dt), _) => dt,
        (None, Some((_, dt))) => dt.min(t_final),
        (None, None) => bail!("--dt is required when the drift is not Hurwitz"),
    };
    let init = initial_state(&args.init, &sys, &tol)?;
    let traj = evolve(&sys, &init, t_final, dt, &tol)?;
    let csv = trajectory_csv(&traj, sys.modes());

    let final_fidelity = traj.fidelity.as_ref().and_then(|f| f.last().copied());
    let summary = format!(
        "{} rows, t_final = {t_final}, dt = {dt}, final purity {:.10}{}",
        traj.len(),
        traj.purity.last().copied().unwrap_or(f64::NAN),
        final_fidelity.map_or(String::new(), |f| format!(", final fidelity {f:.10}")),
    );
    match &args.output {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?;
            println!("wrote {}: {summary}", path.display());
        }
        None => {
            std::io::stdout().write_all(csv.as_bytes())?;
            eprintln!("{summary}");
        }
    }
    Ok(EXIT_OK)
}

fn format_default(x: f64) -> String {
    if x.is_nan() {
        "unset".to_string()
    } else {
        x.to_string()
    }
}

pub fn catalog(cmd: &CatalogCommand) -> Result<u8> {
    match cmd {
        CatalogCommand::List => {
            for entry in catalog::entries() {
                println!("{} ({}): {}", entry.name, entry.kind, entry.summary);
                for p in &entry.parameters {
                    println!(
                        "    {:<8} default {:<6} {}",
                        p.name,
                        format_default(p.default),
                        p.description
                    );
                }
            }
        }
        CatalogCommand::Show(args) => print!("{}", show(args)?),
        CatalogCommand::Export(args) => {
            let text = match build_entry(&args.entry.name, &args.entry.overrides)? {
                CatalogItem::System(sys) => io::to_canonical(&SystemFile::from_system(&sys))?,
                CatalogItem::StateSpec(spec) => io::to_canonical(&SpecFile::from_spec(&spec))?,
            };
            match &args.output {
                Some(path) => fs::write(path, text)
                    .with_context(|| format!("cannot write {}", path.display()))?,
                None => print!("{text}"),
            }
        }
    }
    Ok(EXIT_OK)
}

fn show(args: &EntryArgs) -> Result<String> {
    let entry = catalog::entry(&args.name)?;
    let mut out = format!("{} ({}): {}\n", entry.name, entry.kind, entry.summary);
    match build_entry(&args.name, &args.overrides)? {
        CatalogItem::System(sys) => {
            let _ = writeln!(out, "modes: {}, channels: {}", sys.modes(), sys.channels());
            let _ = writeln!(out, "G =\n{}", report::real_matrix(sys.g()));
            let _ = write!(out, "C =\n{}", report::complex_matrix(sys.c()));
        }
        CatalogItem::StateSpec(spec) => {
            let _ = writeln!(out, "modes: {}", spec.modes());
            let _ = writeln!(out, "X =\n{}", report::real_matrix(spec.x()));
            let _ = write!(out, "Y =\n{}", report::real_matrix(spec.y()));
        }
    }
    Ok(out)
}

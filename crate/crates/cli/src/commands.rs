use std::fs;
use std::path::Path;

use equiproj::bench::{
    bench_decompositions_at, filter_panels, median, train_projected_mlp, O5Config, TrainConfig,
};
use equiproj::metrics::{verify_first_order, BoundKind, VerifyConfig};
use equiproj::numerics::{unvec, vec};
use equiproj::projector::{
    softness_to_cutoff, spec_for_kind, SchurProjector, SpectralBasis,
};
use equiproj::{Cutoff, DenseMatrix, GroupSpec, Projector, ProjectorKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::report::ReportFile;
use crate::{dmat, pgm, specfile, Command, KindArg, ProjectorArgs, RouteArg};

pub fn run(command: Command, seed: u64) -> CliResult<()> {
    match command {
        Command::BuildProjector {
            target,
            cutoff,
            softness,
            smooth_s,
            out,
            meta,
        } => build_projector(&target, cutoff, softness, smooth_s, &out, meta.as_deref()),
        Command::Project { projector, weights, out } => project(&projector, &weights, &out),
        Command::VerifyBound {
            target,
            cutoff,
            trials,
            t_values,
            slack,
            out,
        } => verify_bound(&target, cutoff, trials, t_values, slack, out.as_deref(), seed),
        Command::BenchDecomp {
            sizes,
            repeats,
            cutoff,
            out,
        } => bench_decomp(&sizes, repeats, cutoff, &out),
        Command::O5Bench {
            gamma,
            softness,
            seeds,
            epsilon,
            epochs,
            hidden,
            out,
        } => o5_bench(gamma, softness, &seeds, epsilon, epochs, hidden, &out),
        Command::DemoGrid {
            k,
            n_rot,
            softness,
            out_dir,
        } => demo_grid(k, n_rot, &softness, &out_dir, seed),
    }
}

fn kind_of(arg: KindArg) -> ProjectorKind {
    match arg {
        KindArg::Inv => ProjectorKind::Invariant,
        KindArg::Eq => ProjectorKind::Equivariant,
    }
}

fn route_name(arg: RouteArg) -> &'static str {
    match arg {
        RouteArg::Svd => "svd",
        RouteArg::Schur => "schur",
    }
}

fn kind_name(kind: ProjectorKind) -> &'static str {
    match kind {
        ProjectorKind::Invariant => "inv",
        ProjectorKind::Equivariant => "eq",
    }
}

fn load_target(target: &ProjectorArgs) -> CliResult<(GroupSpec, ProjectorKind)> {
    let kind = kind_of(target.kind);
    Ok((spec_for_kind(&specfile::read(&target.group)?, kind), kind))
}

/// Resolves the cutoff (from `softness` through the route's own spectrum
/// when given) and builds the dense projector.
fn resolve_projector(
    spec: &GroupSpec,
    kind: ProjectorKind,
    route: RouteArg,
    cutoff: Option<f64>,
    softness: Option<f64>,
    shape: Cutoff,
) -> CliResult<Projector> {
    let pick = |sigma: &[f64]| -> CliResult<f64> {
        match (cutoff, softness) {
            (Some(b), None) => Ok(b),
            (None, Some(s)) => Ok(softness_to_cutoff(sigma, s)?),
            _ => Err(CliError::Input("give exactly one of --cutoff and --softness".into())),
        }
    };
    Ok(match route {
        RouteArg::Svd => {
            let basis = SpectralBasis::for_kind(spec, kind)?;
            let b = pick(&basis.sigma)?;
            basis.projector(b, shape)?
        }
        RouteArg::Schur => {
            let probe = SchurProjector::new(spec, 0.0, shape)?;
            let sigma: Vec<f64> = probe.spectrum().iter().map(|e| e.sigma).collect();
            let b = pick(&sigma)?;
            SchurProjector::new(spec, b, shape)?.materialize()?
        }
    })
}

fn build_projector(
    target: &ProjectorArgs,
    cutoff: Option<f64>,
    softness: Option<f64>,
    smooth_s: Option<f64>,
    out: &Path,
    meta: Option<&Path>,
) -> CliResult<()> {
    let (spec, kind) = load_target(target)?;
    let shape = match smooth_s {
        Some(s) => Cutoff::Smooth { s },
        None => Cutoff::Hard,
    };
    let p = resolve_projector(&spec, kind, target.route, cutoff, softness, shape)?;
    dmat::write(out, &p.matrix)?;
    if let Some(meta) = meta {
        ReportFile {
            command: "build-projector".into(),
            group: spec.kind.name(),
            kind: kind_name(kind).into(),
            route: route_name(target.route).into(),
            cutoff_b: p.cutoff_b,
            softness,
            smooth_s,
            spectrum: p.spectrum.iter().map(|e| e.sigma).collect(),
            rank: Some(p.spectrum.iter().filter(|e| e.gamma == 1.0).count()),
            max_relative_error: None,
            bound_eta: None,
            fitted_quadratic: None,
            pass: None,
        }
        .write(meta)?;
    }
    Ok(())
}

fn project(projector: &Path, weights: &Path, out: &Path) -> CliResult<()> {
    let p = dmat::read(projector)?;
    let w = dmat::read(weights)?;
    if !p.is_square() || p.rows() != w.rows() * w.cols() {
        return Err(CliError::Input(format!(
            "projector is {}x{} but weights are {}x{}",
            p.rows(),
            p.cols(),
            w.rows(),
            w.cols()
        )));
    }
    let projected = p.matvec(&vec(&w))?;
    dmat::write(out, &unvec(&projected, w.rows(), w.cols())?)
}

fn verify_bound(
    target: &ProjectorArgs,
    cutoff: f64,
    trials: usize,
    t_values: Vec<f64>,
    slack: f64,
    out: Option<&Path>,
    seed: u64,
) -> CliResult<()> {
    let (spec, kind) = load_target(target)?;
    if !spec.continuous {
        return Err(CliError::Precondition(
            "verify-bound needs a continuous group; discrete groups use the Taylor check".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rows, cols) = match kind {
        ProjectorKind::Invariant => (1, spec.d_in()),
        ProjectorKind::Equivariant => (spec.d_out(), spec.d_in()),
    };
    let draws: Vec<DenseMatrix> = (0..trials.max(1))
        .map(|_| DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal)))
        .collect();
    let (weights, spectrum, bound_kind) = match target.route {
        RouteArg::Svd => {
            let p = SpectralBasis::for_kind(&spec, kind)?.projector(cutoff, Cutoff::Hard)?;
            let w = draws.iter().map(|t| p.apply(t)).collect::<Result<Vec<_>, _>>()?;
            let bk = match kind {
                ProjectorKind::Invariant => BoundKind::Invariant,
                ProjectorKind::Equivariant => BoundKind::EquivariantSvd,
            };
            (w, p.spectrum.iter().map(|e| e.sigma).collect::<Vec<_>>(), bk)
        }
        RouteArg::Schur => {
            let sp = SchurProjector::new(&spec, cutoff, Cutoff::Hard)?;
            let w = draws.iter().map(|t| sp.apply(t)).collect::<Result<Vec<_>, _>>()?;
            let bk = match kind {
                ProjectorKind::Invariant => BoundKind::Invariant,
                ProjectorKind::Equivariant => BoundKind::EquivariantSchur,
            };
            (w, sp.spectrum().iter().map(|e| e.sigma).collect(), bk)
        }
    };
    let config = VerifyConfig {
        trials,
        t_values,
        slack,
        ..VerifyConfig::default()
    };
    let result = verify_first_order(&spec, &weights, cutoff, bound_kind, &config, &mut rng)?;
    let report = ReportFile {
        command: "verify-bound".into(),
        group: spec.kind.name(),
        kind: kind_name(kind).into(),
        route: route_name(target.route).into(),
        cutoff_b: cutoff,
        softness: None,
        smooth_s: None,
        spectrum,
        rank: None,
        max_relative_error: Some(result.max_relative),
        bound_eta: Some(result.bound_eta),
        fitted_quadratic: Some(result.fitted_quadratic),
        pass: Some(result.pass),
    };
    match out {
        Some(path) => report.write(path)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    if result.pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "max relative error {:.3e} exceeds the bound (eta {:.4})",
            result.max_relative, result.bound_eta
        )))
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct DecompCsv {
    size: usize,
    svd_s: f64,
    schur_s: f64,
    ratio: f64,
    agreement: f64,
}

fn bench_decomp(sizes: &[usize], repeats: usize, cutoff: f64, out: &Path) -> CliResult<()> {
    let rows: Vec<DecompCsv> = bench_decompositions_at(sizes, repeats, cutoff)?
        .into_iter()
        .map(|r| DecompCsv {
            size: r.size,
            svd_s: r.svd_seconds,
            schur_s: r.schur_seconds,
            ratio: r.ratio,
            agreement: r.agreement,
        })
        .collect();
    write_csv(out, &rows)
}

#[derive(Serialize)]
struct O5Csv {
    model: &'static str,
    gamma: f64,
    softness: String,
    seed: String,
    rmse: f64,
    diverged: bool,
}

#[allow(clippy::too_many_arguments)]
fn o5_bench(
    gamma: f64,
    softness: f64,
    seeds: &[u64],
    epsilon: f64,
    epochs: usize,
    hidden: Vec<usize>,
    out: &Path,
) -> CliResult<()> {
    if seeds.is_empty() {
        return Err(CliError::Input("need at least one seed".into()));
    }
    let base = O5Config {
        gamma,
        epsilon_den: epsilon,
        hidden,
        train: TrainConfig {
            epochs,
            ..O5Config::default().train
        },
        ..O5Config::default()
    };
    let mut rows = Vec::new();
    for (model, soft) in [("plain", None), ("projected", Some(softness))] {
        let config = O5Config {
            softness: soft,
            ..base.clone()
        };
        let mut scores = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let r = train_projected_mlp(&config, seed)?;
            scores.push(r.relative_mse);
            rows.push(O5Csv {
                model,
                gamma,
                softness: soft.map_or_else(|| "none".into(), |s| s.to_string()),
                seed: seed.to_string(),
                rmse: r.relative_mse,
                diverged: r.diverged,
            });
        }
        rows.push(O5Csv {
            model,
            gamma,
            softness: soft.map_or_else(|| "none".into(), |s| s.to_string()),
            seed: "median".into(),
            rmse: median(&scores),
            diverged: scores.iter().any(|s| !s.is_finite()),
        });
    }
    write_csv(out, &rows)
}

#[derive(Serialize)]
struct PanelCsv {
    softness: f64,
    cutoff_b: f64,
    rotation: usize,
    max_error: f64,
    filter: String,
    heatmap: String,
}

fn demo_grid(k: usize, n_rot: usize, softness: &[f64], out_dir: &Path, seed: u64) -> CliResult<()> {
    if softness.is_empty() {
        return Err(CliError::Input("need at least one softness value".into()));
    }
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let panels = filter_panels(k, n_rot, softness, &mut rng)?;
    let mut rows = Vec::new();
    for p in &panels {
        let tag = format!("{:.3}", p.softness);
        let filter = format!("filter_s{tag}.pgm");
        pgm::write(&out_dir.join(&filter), &p.filter)?;
        for (j, map) in p.error_maps.iter().enumerate() {
            let heatmap = format!("error_s{tag}_r{}.pgm", j + 1);
            pgm::write(&out_dir.join(&heatmap), map)?;
            rows.push(PanelCsv {
                softness: p.softness,
                cutoff_b: p.cutoff_b,
                rotation: j + 1,
                max_error: map.max_abs(),
                filter: filter.clone(),
                heatmap,
            });
        }
    }
    write_csv(&out_dir.join("summary.csv"), &rows)
}

//! Command-line frontend: run orchestration and machine-readable output for
//! flows, inequality verification, symmetric-function sweeps and
//! quermassintegral tables.
//!
//! Exit codes: 0 success; 1 configuration or I/O error; 2 failed inequality
//! check; 3 flow abort.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use horoflow_core::error::Error as CoreError;
use horoflow_core::flow::{self, FlowConfig, SpeedLaw};
use horoflow_core::geometry::{GraphHypersurface, QuermassRoute};
use horoflow_core::io::{write_flow_csv, write_report_csv, write_report_json, Snapshot, SurfaceSpec};
use horoflow_core::scalar::{Scalar, Tolerances};
use horoflow_core::symfunc::build_sym_table;
use horoflow_core::verify::{self, samples::SampleGenerator, InequalityReport};
use horoflow_core::BigRational;

#[derive(Parser)]
#[command(name = "horoflow", version, about = "Curvature inequalities and inverse curvature flow on hyperbolic hypersurfaces", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the inverse curvature flow and emit a CSV time series.
    Flow(FlowArgs),
    /// Evaluate the named inequalities on a hypersurface.
    Verify(VerifyArgs),
    /// Sweep the symmetric-function sign suite on random curvature vectors.
    Symcheck(SymcheckArgs),
    /// Quermassintegrals of a hypersurface by all routes.
    Quermass(QuermassArgs),
}

#[derive(Parser)]
struct FlowArgs {
    /// Hypersurface definition file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Flow order k (speed p_{2k-1}/p_{2k}).
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Final flow time.
    #[arg(long, default_value_t = 2.0)]
    t_end: f64,
    /// Step size: a number for fixed steps, or `auto` for the adaptive
    /// controller.
    #[arg(long, default_value = "auto")]
    dt: String,
    /// Polar resolution override.
    #[arg(long)]
    resolution: Option<usize>,
    /// Diagnostics cadence in flow time.
    #[arg(long, default_value_t = 0.05)]
    record_every: f64,
    /// Speed law.
    #[arg(long, value_enum, default_value_t = SpeedArg::PRatio)]
    speed: SpeedArg,
    /// Stop when sup|h - I| falls below this (0 disables).
    #[arg(long, default_value_t = 1e-3)]
    stop_umbilicity: f64,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Seed recorded in the manifest (flows are deterministic regardless).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpeedArg {
    PRatio,
    InverseP1,
}

#[derive(Parser)]
struct VerifyArgs {
    /// Hypersurface definition file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Inequality to check: all, lk-sobolev, af-sigma-even, af-quermass-odd,
    /// af-sigma-one, sigma-moment-ratio, quermass-ratio, sigma-area-bound,
    /// conjecture; shorthand aliases 1.1, 1.2, 1.3, 6.1, 6.2 are accepted.
    #[arg(long, default_value = "all")]
    thm: String,
    /// Order k; when omitted every valid order is checked.
    #[arg(long)]
    k: Option<usize>,
    /// Polar resolution override.
    #[arg(long)]
    resolution: Option<usize>,
    /// Margin tolerance override (default: analytic or quadrature-tied).
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Parser)]
struct SymcheckArgs {
    /// Ambient dimension n (curvature vectors have n - 1 entries).
    #[arg(long)]
    n: usize,
    /// Order k of the margins.
    #[arg(long)]
    k: usize,
    /// Number of random curvature vectors.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Cone to sample: hconvex (kappa >= 1) or subconvex (0 < kappa <= 1).
    #[arg(long, default_value = "hconvex")]
    cone: String,
    /// Use exact rational arithmetic (zero tolerance).
    #[arg(long, default_value_t = false)]
    exact: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Parser)]
struct QuermassArgs {
    /// Hypersurface definition file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Route: all, recursion, tilde-sum, alternating-sigma.
    #[arg(long, default_value = "all")]
    route: String,
    /// Polar resolution override.
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'a str,
    subcommand: &'a str,
    resolved: serde_json::Value,
    threads: usize,
    outputs: Vec<String>,
}

fn write_manifest(
    out_dir: &Path,
    subcommand: &str,
    resolved: serde_json::Value,
    outputs: &[&Path],
) -> anyhow::Result<()> {
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        resolved,
        threads: rayon::current_num_threads(),
        outputs: outputs
            .iter()
            .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
            .collect(),
    };
    let path = out_dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

fn init_threads() {
    if let Ok(v) = std::env::var("HOROFLOW_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Flow(args) => run_flow(args),
        Command::Verify(args) => run_verify(args),
        Command::Symcheck(args) => run_symcheck(args),
        Command::Quermass(args) => run_quermass(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("horoflow: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run_flow(args: FlowArgs) -> anyhow::Result<ExitCode> {
    // The input is either a surface definition or a restart snapshot.
    let (spec_n, spec_resolution, surface) = match SurfaceSpec::load(&args.input) {
        Ok(spec) => {
            let mut surface = spec.build(args.resolution)?;
            // The flow needs samples; exact spheres get a default grid.
            if surface.radial_samples().is_none() {
                let res = args.resolution.or(spec.resolution).unwrap_or(48);
                surface = GraphHypersurface::axisym_from_profile(
                    spec.n,
                    res,
                    horoflow_core::geometry::profile::AxisymProfile::Constant {
                        radius: spec
                            .radius
                            .ok_or_else(|| anyhow::anyhow!("exact_sphere input needs a radius"))?,
                    },
                )?;
            }
            (spec.n, spec.resolution, surface)
        }
        Err(spec_err) => match Snapshot::load(&args.input) {
            Ok(snap) => {
                let surface = snap.build()?;
                (snap.n, Some(snap.resolution), surface)
            }
            Err(_) => return Err(spec_err.into()),
        },
    };

    let mut cfg = FlowConfig::<f64>::new(args.k)
        .with_t_end(args.t_end)
        .with_speed(match args.speed {
            SpeedArg::PRatio => SpeedLaw::PRatio,
            SpeedArg::InverseP1 => SpeedLaw::InverseP1,
        });
    cfg.record_every = args.record_every;
    cfg.stop_umbilicity = if args.stop_umbilicity > 0.0 {
        Some(args.stop_umbilicity)
    } else {
        None
    };
    let dt_resolved = if args.dt == "auto" {
        "auto".to_string()
    } else {
        let dt: f64 = args
            .dt
            .parse()
            .map_err(|_| anyhow::anyhow!("--dt must be a number or `auto`"))?;
        cfg = cfg.with_fixed_dt(dt);
        args.dt.clone()
    };

    std::fs::create_dir_all(&args.out_dir)?;
    let csv_path = args.out_dir.join("flow.csv");
    let snap_path = args.out_dir.join("snapshot.json");

    let result = flow::run(surface, &cfg);
    let code = match &result {
        Ok(_) => ExitCode::SUCCESS,
        Err(CoreError::MonotonicityViolated { .. })
        | Err(CoreError::StepRejected { .. })
        | Err(CoreError::DivisionBySmall { .. })
        | Err(CoreError::GraphDegenerate { .. }) => ExitCode::from(3),
        Err(_) => ExitCode::from(1),
    };
    match result {
        Ok(run_out) => {
            write_flow_csv(&csv_path, &run_out.state.history)?;
            Snapshot::of(run_out.state.t, &run_out.state.surface)?.save(&snap_path)?;
            write_manifest(
                &args.out_dir,
                "flow",
                serde_json::json!({
                    "input": args.input.display().to_string(),
                    "n": spec_n,
                    "k": args.k,
                    "t_end": args.t_end,
                    "dt": dt_resolved,
                    "resolution": args.resolution.or(spec_resolution),
                    "record_every": args.record_every,
                    "speed": cfg.speed.name(),
                    "stop_umbilicity": args.stop_umbilicity,
                    "spectral_filter": null,
                    "seed": args.seed,
                    "hconvex_warnings": run_out.state.hconvex_warnings,
                }),
                &[&csv_path, &snap_path],
            )?;
            println!(
                "flow: {} records to t = {:.4}, Q {:.9e} -> {:.9e}",
                run_out.state.history.len(),
                run_out.state.t,
                run_out.state.history.first().map(|r| r.q).unwrap_or(f64::NAN),
                run_out.state.history.last().map(|r| r.q).unwrap_or(f64::NAN),
            );
            Ok(code)
        }
        Err(e) => {
            eprintln!("horoflow: flow aborted: {e}");
            Ok(code)
        }
    }
}

fn thm_names(alias: &str) -> anyhow::Result<Vec<&'static str>> {
    Ok(match alias {
        "all" => vec![
            "lk-sobolev",
            "af-sigma-even",
            "af-quermass-odd",
            "af-sigma-one",
            "sigma-moment-ratio",
            "quermass-ratio",
            "sigma-area-bound",
            "conjecture",
        ],
        "lk-sobolev" | "1.1" => vec!["lk-sobolev"],
        "af-sigma-even" | "1.2" => vec!["af-sigma-even"],
        "af-quermass-odd" | "1.3" => vec!["af-quermass-odd"],
        "af-sigma-one" | "6.1" => vec!["af-sigma-one"],
        "sigma-moment-ratio" | "6.2" => vec!["sigma-moment-ratio"],
        "quermass-ratio" => vec!["quermass-ratio"],
        "sigma-area-bound" => vec!["sigma-area-bound"],
        "conjecture" => vec!["conjecture"],
        other => anyhow::bail!("unknown inequality name: {other}"),
    })
}

fn run_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let spec = SurfaceSpec::load(&args.input)?;
    let surface = spec.build(args.resolution)?;
    let tol = args
        .tolerance
        .unwrap_or_else(|| verify::default_tolerance(&surface));
    let names = thm_names(args.thm.as_str())?;
    let n = surface.ambient_dim();
    let m = n - 1;
    let ks = |lo: usize, hi: usize| -> Vec<usize> {
        match args.k {
            Some(k) => vec![k],
            None => (lo..=hi).collect(),
        }
    };

    let mut reports: Vec<InequalityReport> = Vec::new();
    for name in names {
        match name {
            "lk-sobolev" => {
                for k in ks(1, m / 2) {
                    reports.push(verify::check_lk_sobolev(&surface, k, tol)?);
                }
            }
            "af-sigma-even" => {
                for k in ks(1, m / 2) {
                    reports.push(verify::check_af_even_sigma(&surface, k, tol)?);
                }
            }
            "af-quermass-odd" => {
                for k in ks(0, m / 2) {
                    reports.push(verify::check_af_quermass(
                        &surface,
                        k,
                        QuermassRoute::TildeSum,
                        tol,
                    )?);
                }
            }
            "af-sigma-one" => reports.push(verify::check_af_sigma_one(&surface, tol)?),
            "sigma-moment-ratio" => {
                reports.push(verify::check_sigma_moment_ratio(&surface, tol)?)
            }
            "quermass-ratio" => {
                for r in 2..=n.min(m + 1) {
                    reports.push(verify::check_quermass_ratio(&surface, r, r - 2, tol)?);
                }
            }
            "sigma-area-bound" => {
                for k in ks(1, m) {
                    reports.push(verify::check_sigma_area_bound(&surface, k, tol)?);
                }
            }
            "conjecture" => {
                for k in ks(0, m.saturating_sub(2) / 2) {
                    if 2 * k + 2 <= m {
                        let (odd, adj) = verify::explore_conjecture(&surface, k, tol)?;
                        reports.push(odd);
                        reports.push(adj);
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    std::fs::create_dir_all(&args.out_dir)?;
    let mut outputs: Vec<PathBuf> = Vec::new();
    match args.format {
        FormatArg::Csv => {
            let path = args.out_dir.join("reports.csv");
            write_report_csv(&path, &reports, args.seed)?;
            outputs.push(path);
        }
        FormatArg::Json => {
            let path = args.out_dir.join("reports.jsonl");
            write_report_json(&path, &reports)?;
            outputs.push(path);
        }
    }
    let output_refs: Vec<&Path> = outputs.iter().map(|p| p.as_path()).collect();
    write_manifest(
        &args.out_dir,
        "verify",
        serde_json::json!({
            "input": args.input.display().to_string(),
            "thm": args.thm,
            "k": args.k,
            "n": n,
            "resolution": args.resolution.or(spec.resolution),
            "tolerance": tol,
            "format": match args.format { FormatArg::Csv => "csv", FormatArg::Json => "json" },
            "seed": args.seed,
        }),
        &output_refs,
    )?;

    let failed: Vec<&InequalityReport> = reports.iter().filter(|r| !r.pass).collect();
    for r in &reports {
        println!(
            "{}: n={} k={} margin={:.6e} rel={:.3e} {}{}",
            r.name,
            r.n,
            r.k.map(|k| k.to_string()).unwrap_or_else(|| "-".into()),
            r.margin,
            r.rel_margin,
            if r.pass { "pass" } else { "FAIL" },
            if r.equality { " (equality)" } else { "" },
        );
    }
    if failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("horoflow: {} inequality check(s) failed", failed.len());
        Ok(ExitCode::from(2))
    }
}

#[derive(Serialize)]
struct SweepRow {
    inequality: &'static str,
    n: usize,
    k: usize,
    cone: String,
    arithmetic: &'static str,
    samples: usize,
    violations: usize,
    min_margin: f64,
}

fn run_symcheck(args: SymcheckArgs) -> anyhow::Result<ExitCode> {
    use rayon::prelude::*;
    let n = args.n;
    let k = args.k;
    if n < 4 || 2 * k + 1 > n - 1 {
        anyhow::bail!("need n >= 4 and 2k+1 <= n-1 (got n = {n}, k = {k})");
    }
    let hconvex = match args.cone.as_str() {
        "hconvex" => true,
        "subconvex" => false,
        other => anyhow::bail!("unknown cone: {other} (expected hconvex or subconvex)"),
    };
    let arithmetic = if args.exact { "exact" } else { "f64" };

    // Per-sample margins: (flow-speed, p1-bound, top-ratio) on the convex
    // cone, or the reversed-sign triple on the subconvex cone.
    let eval_f64 = |seed: u64| -> [f64; 3] {
        let mut gen = SampleGenerator::new(seed);
        let tol = Tolerances::<f64>::default();
        if hconvex {
            let kappa = gen.hconvex_kappa(n, 3.0);
            let tbl = build_sym_table(&kappa);
            [
                tbl.flow_speed_margin(k, &tol).map(|m| m.value).unwrap_or(f64::NAN),
                tbl.p1_bound_margin(k, &tol).map(|m| m.value).unwrap_or(f64::NAN),
                tbl.top_ratio_margin(k, &tol).map(|m| m.value).unwrap_or(f64::NAN),
            ]
        } else {
            let kappa = gen.subconvex_kappa(n, 0.05);
            let tbl = build_sym_table(&kappa);
            let s = tbl.reversed_cone_signs(k, &tol).expect("cone by construction");
            [-s.s1, s.s2, s.s3]
        }
    };
    let eval_exact = |seed: u64| -> [f64; 3] {
        let mut gen = SampleGenerator::new(seed);
        let tol = Tolerances::<BigRational>::exact();
        if hconvex {
            let kappa = gen.hconvex_kappa_rational(n);
            let tbl = build_sym_table(&kappa);
            [
                tbl.flow_speed_margin(k, &tol)
                    .map(|m| m.value.approx_f64())
                    .unwrap_or(f64::NAN),
                tbl.p1_bound_margin(k, &tol)
                    .map(|m| m.value.approx_f64())
                    .unwrap_or(f64::NAN),
                tbl.top_ratio_margin(k, &tol)
                    .map(|m| m.value.approx_f64())
                    .unwrap_or(f64::NAN),
            ]
        } else {
            let kappa = gen.subconvex_kappa_rational(n);
            let tbl = build_sym_table(&kappa);
            let s = tbl.reversed_cone_signs(k, &tol).expect("cone by construction");
            [
                -s.s1.approx_f64(),
                s.s2.approx_f64(),
                s.s3.approx_f64(),
            ]
        }
    };

    let margins: Vec<[f64; 3]> = (0..args.samples as u64)
        .into_par_iter()
        .map(|i| {
            let seed = args.seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(i);
            if args.exact {
                eval_exact(seed)
            } else {
                eval_f64(seed)
            }
        })
        .collect();

    // Certification threshold: exact path is zero, float path is the scaled
    // sign tolerance.
    let float_tol = if args.exact { 0.0 } else { 1e-12 };
    let names = if hconvex {
        ["flow-speed", "p1-bound", "top-ratio"]
    } else {
        ["reversed-s1", "reversed-s2", "reversed-s3"]
    };
    let mut rows = Vec::new();
    let mut any_violation = false;
    for (idx, name) in names.iter().enumerate() {
        let mut min_margin = f64::INFINITY;
        let mut violations = 0usize;
        for m in &margins {
            let v = m[idx];
            min_margin = min_margin.min(v);
            if v.is_nan() || v < -float_tol * (1.0 + v.abs()) {
                violations += 1;
            }
        }
        any_violation |= violations > 0;
        rows.push(SweepRow {
            inequality: name,
            n,
            k,
            cone: args.cone.clone(),
            arithmetic,
            samples: args.samples,
            violations,
            min_margin,
        });
    }

    std::fs::create_dir_all(&args.out_dir)?;
    let path = args.out_dir.join("symcheck.csv");
    let mut csv = String::from("inequality,n,k,cone,arithmetic,samples,violations,min_margin\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{:.15e}\n",
            r.inequality, r.n, r.k, r.cone, r.arithmetic, r.samples, r.violations, r.min_margin
        ));
        println!(
            "{}: {} samples, {} violations, min margin {:.6e}",
            r.inequality, r.samples, r.violations, r.min_margin
        );
    }
    std::fs::write(&path, csv)?;
    write_manifest(
        &args.out_dir,
        "symcheck",
        serde_json::json!({
            "n": n, "k": k, "samples": args.samples, "cone": args.cone,
            "exact": args.exact, "seed": args.seed,
        }),
        &[&path],
    )?;
    Ok(if any_violation {
        eprintln!("horoflow: sign violations detected");
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_quermass(args: QuermassArgs) -> anyhow::Result<ExitCode> {
    let spec = SurfaceSpec::load(&args.input)?;
    let surface = spec.build(args.resolution)?;
    let routes: Vec<QuermassRoute> = match args.route.as_str() {
        "all" => QuermassRoute::ALL.to_vec(),
        "recursion" => vec![QuermassRoute::Recursion],
        "tilde-sum" => vec![QuermassRoute::TildeSum],
        "alternating-sigma" => vec![QuermassRoute::AlternatingSigma],
        other => anyhow::bail!("unknown route: {other}"),
    };
    let n = surface.ambient_dim();
    let vectors: Vec<_> = routes
        .iter()
        .map(|&r| surface.quermass(r).map(|q| (r, q)))
        .collect::<Result<_, _>>()?;

    let tol = 10.0 * verify::default_tolerance(&surface);
    let mut csv = String::from("r");
    for (route, _) in &vectors {
        csv.push_str(&format!(",{}", route.name()));
    }
    csv.push_str(",max_rel_spread\n");
    let mut agree = true;
    for r in 0..=n {
        let vals: Vec<Option<f64>> = vectors.iter().map(|(_, q)| q.w(r)).collect();
        let present: Vec<f64> = vals.iter().flatten().copied().collect();
        let spread = if present.len() > 1 {
            let lo = present.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = present.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (hi - lo) / hi.abs().max(1e-300)
        } else {
            0.0
        };
        if spread > tol {
            agree = false;
        }
        csv.push_str(&r.to_string());
        for v in vals {
            match v {
                Some(x) => csv.push_str(&format!(",{x:.15e}")),
                None => csv.push(','),
            }
        }
        csv.push_str(&format!(",{spread:.3e}\n"));
    }
    std::fs::create_dir_all(&args.out_dir)?;
    let path = args.out_dir.join("quermass.csv");
    std::fs::write(&path, &csv)?;
    print!("{csv}");
    write_manifest(
        &args.out_dir,
        "quermass",
        serde_json::json!({
            "input": args.input.display().to_string(),
            "route": args.route,
            "n": n,
            "resolution": args.resolution.or(spec.resolution),
            "agreement_tolerance": tol,
            "seed": args.seed,
        }),
        &[&path],
    )?;
    Ok(if agree {
        ExitCode::SUCCESS
    } else {
        eprintln!("horoflow: quermassintegral routes disagree beyond tolerance");
        ExitCode::from(2)
    })
}

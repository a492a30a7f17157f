//! Command-line front end: compute isochronous constants, center-manifold
//! approximations, invariant-plane checks and numeric period verification
//! for systems described by JSON files.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use isochron::expr::{parse_scalar, print_scalar};
use isochron::format::{
    manifold_block, ConditionRec, LoadedSystem, ReportFile, ScanBlock, ScanPointRec, SystemFile,
};
use isochron::gauss::GaussianRational;
use isochron::manifold::{compute_manifold, manifold_residual};
use isochron::nfengine::{
    apply_subs_chain, constants_report, vanishing_conditions, EngineError,
};
use isochron::numverify::{isochronicity_verdict, scan, NumError, NumSystem};
use isochron::params::ParamSet;
use isochron::series::TriPoly;
use isochron::sysmodel::ComplexSystemSpec;

#[derive(Parser)]
#[command(
    name = "isochron",
    about = "Isochronous constants of 3D polynomial systems on center manifolds",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// System description (JSON)
    #[arg(long)]
    input: PathBuf,
    /// Substitution step `name=expr[,name=expr...]`; may repeat, applied
    /// left to right
    #[arg(long)]
    subs: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the isochronous constants p'_m, q'_m through a given order
    Constants {
        #[command(flatten)]
        input: InputArgs,
        /// Highest order m to compute
        #[arg(long)]
        order: u32,
        /// Write the JSON report here
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Approximate the center manifold u = h(z, w) to a given degree
    Manifold {
        #[command(flatten)]
        input: InputArgs,
        /// Truncation degree of the manifold polynomial
        #[arg(long)]
        degree: u32,
        /// Write the JSON report here
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Integrate the real system and measure Poincaré return times
    VerifyPeriod {
        /// System description (JSON)
        #[arg(long)]
        input: PathBuf,
        /// Numeric parameter assignment `name=value[,name=value...]`
        #[arg(long)]
        params: Option<String>,
        /// Amplitude range `LO:HI:K` (K linearly spaced values)
        #[arg(long)]
        amplitudes: String,
        /// Returns to record per amplitude
        #[arg(long, default_value_t = 8)]
        returns: usize,
        /// Integrator tolerance
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Verdict threshold on |mean period − 2π|
        #[arg(long, default_value_t = 1e-8)]
        epsilon: f64,
        /// Write the per-return CSV here (defaults to stdout)
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the JSON verdict here
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check whether u = 0 is an invariant plane and print the cofactor
    CheckPlane {
        /// System description (JSON)
        #[arg(long)]
        input: PathBuf,
    },
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_DEGENERATE: u8 = 2;
const EXIT_INTEGRATION: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<EngineError>() {
            return match e {
                EngineError::Degenerate(..) => EXIT_DEGENERATE,
                _ => EXIT_VALIDATION,
            };
        }
        if let Some(e) = cause.downcast_ref::<NumError>() {
            return match e {
                NumError::NonRealParameter(_) => EXIT_VALIDATION,
                _ => EXIT_INTEGRATION,
            };
        }
    }
    EXIT_VALIDATION
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Constants {
            input,
            order,
            output,
        } => cmd_constants(&input, order, output.as_deref()),
        Command::Manifold {
            input,
            degree,
            output,
        } => cmd_manifold(&input, degree, output.as_deref()),
        Command::VerifyPeriod {
            input,
            params,
            amplitudes,
            returns,
            tol,
            epsilon,
            csv,
            output,
        } => cmd_verify_period(
            &input,
            params.as_deref(),
            &amplitudes,
            returns,
            tol,
            epsilon,
            csv.as_deref(),
            output.as_deref(),
        ),
        Command::CheckPlane { input } => cmd_check_plane(&input),
    }
}

fn load(path: &std::path::Path) -> Result<(Vec<u8>, LoadedSystem)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).context("system file is not UTF-8")?;
    let file = SystemFile::from_json(text)?;
    let system = file.into_system()?;
    Ok((bytes, system))
}

/// Each `--subs` occurrence is one substitution map `name=expr,...`.
fn parse_subs(steps: &[String]) -> Result<Vec<Vec<(String, String)>>> {
    let mut chain = Vec::with_capacity(steps.len());
    for step in steps {
        let mut map = Vec::new();
        for item in step.split(',') {
            let (name, expr) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("bad substitution {item:?}; expected name=expr"))?;
            map.push((name.trim().to_string(), expr.trim().to_string()));
        }
        chain.push(map);
    }
    Ok(chain)
}

fn write_or_print(report: &ReportFile, output: Option<&std::path::Path>) -> Result<()> {
    let text = report.to_json();
    match output {
        Some(path) => {
            // atomic: write a sibling temp file, then rename into place
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, &text).with_context(|| format!("writing {}", tmp.display()))?;
            std::fs::rename(&tmp, path)
                .with_context(|| format!("renaming into {}", path.display()))?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_constants(input: &InputArgs, order: u32, output: Option<&std::path::Path>) -> Result<()> {
    if order < 1 {
        bail!("--order must be at least 1");
    }
    let (bytes, system) = load(&input.input)?;
    let spec = system.complexified();
    let chain = parse_subs(&input.subs)?;
    let report = constants_report(&spec, order, &chain)?;

    println!("{:>3}  {:<40} {:<40}", "m", "p'_m", "q'_m");
    for rec in &report.records {
        println!(
            "{:>3}  {:<40} {:<40}",
            rec.m,
            print_scalar(&rec.p),
            print_scalar(&rec.q)
        );
    }
    println!("note: {}", report.caveat);

    let mut file = ReportFile::from_constants(&bytes, &report);
    // vanishing conditions are real-polynomial data; only meaningful when
    // every surviving parameter is declared real
    let (reduced, _) = apply_subs_chain(&spec, &chain)?;
    if reduced.params.all_real() {
        let conds = vanishing_conditions(&report, &reduced.params)?;
        file.conditions = Some(
            conds
                .into_iter()
                .map(|(m, polys)| ConditionRec {
                    m,
                    conditions: polys
                        .iter()
                        .map(isochron::expr::print_poly)
                        .collect(),
                })
                .collect(),
        );
    }
    write_or_print(&file, output)
}

fn print_tripoly(p: &TriPoly, vars: [&str; 3]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (&(k, j, l), c) in p.terms() {
        let mut term = format!("({})", print_scalar(c));
        for (e, v) in [(k, vars[0]), (j, vars[1]), (l, vars[2])] {
            match e {
                0 => {}
                1 => term.push_str(&format!("*{v}")),
                _ => term.push_str(&format!("*{v}^{e}")),
            }
        }
        parts.push(term);
    }
    parts.join(" + ")
}

fn cmd_manifold(input: &InputArgs, degree: u32, output: Option<&std::path::Path>) -> Result<()> {
    if degree < 2 {
        bail!("--degree must be at least 2");
    }
    let (bytes, system) = load(&input.input)?;
    let chain = parse_subs(&input.subs)?;
    let (spec, log) = apply_subs_chain(&system.complexified(), &chain)?;
    let h = compute_manifold(&spec, degree)?;
    let residual_zero = manifold_residual(&spec, &h).is_zero();
    if !residual_zero {
        bail!("internal error: manifold residual is nonzero");
    }
    let (invariant, cofactor) = spec.check_invariant_plane();

    if h.is_zero() {
        println!("manifold: u = 0 (zero polynomial through degree {degree})");
    } else {
        println!("manifold: u = h(z, w) through degree {degree}");
        for (&(a, b), c) in &h.coeffs {
            println!("  h[{a},{b}] = {}", print_scalar(c));
        }
    }
    let cof_str = cofactor.as_ref().map(|k| print_tripoly(k, ["z", "w", "u"]));
    if invariant {
        println!(
            "u = 0 is an invariant plane with cofactor {}",
            cof_str.as_deref().unwrap_or("0")
        );
    }

    let mut file = ReportFile {
        input_sha256: isochron::format::input_hash(&bytes),
        substitutions: log,
        constants: Vec::new(),
        caveat: String::new(),
        conditions: None,
        manifold: None,
        scan: None,
    };
    file.manifold = Some(manifold_block(
        &h,
        residual_zero,
        if invariant { cof_str } else { None },
    ));
    write_or_print(&file, output)
}

/// Parse `name=value,...` into per-parameter Gaussian-rational values.
fn numeric_assignment(params: &ParamSet, text: Option<&str>) -> Result<Vec<GaussianRational>> {
    let empty = ParamSet::empty();
    let mut values: Vec<Option<GaussianRational>> = vec![None; params.len()];
    if let Some(text) = text {
        for item in text.split(',') {
            let (name, expr) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("bad parameter assignment {item:?}"))?;
            let idx = params
                .index_of(name.trim())
                .ok_or_else(|| anyhow!("unknown parameter {name:?}"))?;
            let v = parse_scalar(expr.trim(), &empty)?
                .eval(&[])
                .map_err(|e| anyhow!("evaluating {expr:?}: {e}"))?;
            values[idx] = Some(v);
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| anyhow!("parameter {:?} is not assigned", params.name(i))))
        .collect()
}

fn parse_amplitudes(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("--amplitudes must be LO:HI:K");
    }
    let lo: f64 = parts[0].parse().context("amplitude LO")?;
    let hi: f64 = parts[1].parse().context("amplitude HI")?;
    let k: usize = parts[2].parse().context("amplitude count K")?;
    if !(lo > 0.0 && hi >= lo && k >= 1) {
        bail!("--amplitudes requires 0 < LO <= HI and K >= 1");
    }
    if k == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..k)
        .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify_period(
    input: &std::path::Path,
    params_text: Option<&str>,
    amplitudes: &str,
    returns: usize,
    tol: f64,
    epsilon: f64,
    csv: Option<&std::path::Path>,
    output: Option<&std::path::Path>,
) -> Result<()> {
    if returns < 2 {
        bail!("--returns must be at least 2");
    }
    if !(1e-13..=1e-6).contains(&tol) {
        bail!("--tol must lie in [1e-13, 1e-6]");
    }
    let (bytes, system) = load(input)?;
    let amps = parse_amplitudes(amplitudes)?;

    // reduce to a numeric real-form spec
    let params = system.params().clone();
    let values = numeric_assignment(&params, params_text)?;
    let empty = ParamSet::empty();
    let value_scalars: Vec<_> = values
        .iter()
        .map(|v| isochron::scalar::Scalar::from_gauss(&empty, v.clone()))
        .collect();
    let real_spec = match &system {
        LoadedSystem::Real(spec) => spec.substitute_params(&empty, &value_scalars)?,
        LoadedSystem::Complex(spec) => spec
            .substitute_params(&empty, &value_scalars)?
            .realify(1)
            .context("complex system has no real form at this parameter point")?,
    };

    // lift starts onto the quadratic+cubic manifold so transients are small
    let complex_spec: ComplexSystemSpec = real_spec.complexify();
    let h = compute_manifold(&complex_spec, 3)?;
    let sys = NumSystem::new(&real_spec, &[])?.with_manifold(&h, &[])?;

    let result = scan(&sys, &amps, returns, tol)?;
    let verdict = isochronicity_verdict(&result, epsilon);

    let mut csv_text = String::from("amplitude,return_index,return_time,gap\n");
    for point in &result.points {
        let mut prev = 0.0;
        for (idx, &t) in point.return_times.iter().enumerate() {
            csv_text.push_str(&format!(
                "{},{},{:.15e},{:.15e}\n",
                point.amplitude,
                idx + 1,
                t,
                t - prev
            ));
            prev = t;
        }
    }
    match csv {
        Some(path) => {
            std::fs::write(path, &csv_text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{csv_text}"),
    }

    for point in &result.points {
        println!(
            "amplitude {:>8}: mean period {:.12}, deviation {:.3e}",
            point.amplitude, point.mean_period, point.deviation
        );
    }
    println!("verdict: {verdict} (epsilon {epsilon:e})");

    let file = ReportFile {
        input_sha256: isochron::format::input_hash(&bytes),
        substitutions: params_text
            .map(|t| t.split(',').map(str::to_string).collect())
            .unwrap_or_default(),
        constants: Vec::new(),
        caveat: "numeric verdicts are evidence, not proof".to_string(),
        conditions: None,
        manifold: None,
        scan: Some(ScanBlock {
            verdict: verdict.to_string(),
            epsilon,
            points: result
                .points
                .iter()
                .map(|p| ScanPointRec {
                    amplitude: p.amplitude,
                    mean_period: p.mean_period,
                    deviation: p.deviation,
                })
                .collect(),
        }),
    };
    if output.is_some() {
        write_or_print(&file, output)?;
    }
    Ok(())
}

fn cmd_check_plane(input: &std::path::Path) -> Result<()> {
    let (_, system) = load(input)?;
    let spec = system.complexified();
    let (invariant, cofactor) = spec.check_invariant_plane();
    if invariant {
        println!("u = 0 is invariant");
        println!(
            "cofactor: {}",
            cofactor
                .as_ref()
                .map(|k| print_tripoly(k, ["z", "w", "u"]))
                .unwrap_or_else(|| "0".to_string())
        );
    } else {
        println!("u = 0 is not invariant");
    }
    Ok(())
}

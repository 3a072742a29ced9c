//! Subcommand implementations.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::json;

use hermite_lab::{
    expand as expand_spec, rank_report, run_experiment, scan_affine, scan_scale, scan_shift,
    AxisSpec, ExperimentReport, FgnModel, FgnSampler, FunctionSpec, HermiteExpansion,
    QuadratureRule, RankReport, RegimeExperiment, ScanGrid, ScanOptions, ZeroCell, ZeroSetReport,
};

use crate::output::{
    emit, parse_json, read_json_arg, to_json_string, write_file, CliError, Generator,
};
use crate::{ExpandArgs, FgnArgs, Format, PathFormat, RankArgs, RegimeArgs, ReportArgs, ScanArgs, ScanMode};

fn parse_spec(arg: &str) -> Result<FunctionSpec, CliError> {
    parse_json(&read_json_arg(arg)?, "function spec")
}

fn quadrature(spec: &FunctionSpec, nodes: Option<usize>) -> Result<QuadratureRule, CliError> {
    Ok(QuadratureRule::gauss_hermite(
        nodes.unwrap_or_else(|| spec.default_node_count()),
    )?)
}

#[derive(Serialize)]
struct ExpandOutput {
    generator: Generator,
    spec: FunctionSpec,
    expansion: HermiteExpansion,
    rank: RankReport,
}

fn expand_cmd_config(args: &ExpandArgs, nodes: usize) -> serde_json::Value {
    json!({
        "order": args.order,
        "nodes": nodes,
        "tol": args.tol,
        "format": match args.format { Format::Json => "json", Format::Csv => "csv" },
    })
}

pub fn expand(args: ExpandArgs) -> Result<(), CliError> {
    let spec = parse_spec(&args.spec.spec)?;
    let rule = quadrature(&spec, args.nodes)?;
    let expansion = expand_spec(&spec, args.order, &rule)?;
    let rank = rank_report(&spec, args.tol, args.order, &rule)?;
    let generator = Generator::new("expand", expand_cmd_config(&args, rule.len()));
    let content = match args.format {
        Format::Json => to_json_string(&ExpandOutput {
            generator,
            spec,
            expansion,
            rank,
        })?,
        Format::Csv => {
            let mut out = String::new();
            for line in generator.csv_lines() {
                out.push_str(&format!("# {line}\n"));
            }
            out.push_str("m,coefficient,l2_magnitude\n");
            let magnitudes = expansion.coefficient_magnitudes();
            for (m, (&c, mag)) in expansion
                .coefficients()
                .iter()
                .zip(&magnitudes)
                .enumerate()
            {
                out.push_str(&format!("{m},{c},{mag}\n"));
            }
            out.push_str(&format!("# l2_norm_sq: {}\n", expansion.l2_norm_sq()));
            out.push_str(&format!("# tail_mass: {}\n", expansion.tail_mass()));
            out.push_str(&format!("# hermite_rank: {}\n", rank.hermite_rank));
            out
        }
    };
    emit(args.out.as_deref(), &content)
}

#[derive(Serialize)]
struct RankOutput {
    generator: Generator,
    spec: FunctionSpec,
    report: RankReport,
}

pub fn rank(args: RankArgs) -> Result<(), CliError> {
    let spec = parse_spec(&args.spec.spec)?;
    let rule = quadrature(&spec, args.nodes)?;
    let report = rank_report(&spec, args.tol, args.order, &rule)?;
    if !report.ranks_coincide() {
        return Err(CliError::Numerical(format!(
            "hermite rank {} and power rank {} disagree",
            report.hermite_rank, report.power_rank
        )));
    }
    let generator = Generator::new(
        "rank",
        json!({ "tol": args.tol, "order": args.order, "nodes": rule.len() }),
    );
    let content = to_json_string(&RankOutput {
        generator,
        spec,
        report,
    })?;
    emit(args.out.as_deref(), &content)
}

#[derive(Serialize)]
struct ScanSummary {
    generator: Generator,
    spec: FunctionSpec,
    mode: &'static str,
    grid: ScanGrid,
    tol: f64,
    node_count: usize,
    zero_fraction: f64,
    zero_cell_count: usize,
    sign_change_cells: Vec<ZeroCell>,
    tangential_cells: Vec<ZeroCell>,
}

pub fn scan(args: ScanArgs) -> Result<(), CliError> {
    let spec = parse_spec(&args.spec.spec)?;
    let rule = quadrature(&spec, args.nodes)?;
    let axis1 = AxisSpec::new(args.lo, args.hi, args.steps)?;
    let opts = ScanOptions {
        tol: args.tol,
        ..ScanOptions::default()
    };
    let (mode, grid, report): (&'static str, ScanGrid, ZeroSetReport) = match args.mode {
        ScanMode::Shift => {
            let grid = ScanGrid::one_dim(axis1);
            ("shift", grid, scan_shift(&spec, &grid, &opts, &rule)?)
        }
        ScanMode::Scale => {
            let grid = ScanGrid::one_dim(axis1);
            ("scale", grid, scan_scale(&spec, &grid, &opts, &rule)?)
        }
        ScanMode::Affine => {
            let (lo2, hi2, steps2) = match (args.lo2, args.hi2, args.steps2) {
                (Some(lo2), Some(hi2), Some(steps2)) => (lo2, hi2, steps2),
                _ => {
                    return Err(CliError::Input(
                        "affine scans need --lo2, --hi2 and --steps2 for the scale axis".into(),
                    ))
                }
            };
            let grid = ScanGrid::two_dim(axis1, AxisSpec::new(lo2, hi2, steps2)?);
            ("affine", grid, scan_affine(&spec, &grid, &opts, &rule)?)
        }
    };

    let generator = Generator::new(
        "scan",
        json!({
            "mode": mode,
            "tol": args.tol,
            "nodes": rule.len(),
            "axis1": { "lo": args.lo, "hi": args.hi, "steps": args.steps },
            "axis2": args.steps2.map(|s| json!({ "lo": args.lo2, "hi": args.hi2, "steps": s })),
        }),
    );

    let mut csv = String::new();
    for line in generator.csv_lines() {
        csv.push_str(&format!("# {line}\n"));
    }
    csv.push_str("x,y,u,rank\n");
    for i in 0..report.xs.len() {
        for j in 0..report.ys.len() {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                report.xs[i],
                report.ys[j],
                report.u_at(i, j),
                report.rank_at(i, j)
            ));
        }
    }
    write_file(&suffixed(&args.out_prefix, "csv"), csv.as_bytes())?;

    let summary = ScanSummary {
        generator,
        spec,
        mode,
        grid,
        tol: args.tol,
        node_count: rule.len(),
        zero_fraction: report.zero_fraction,
        zero_cell_count: report.zero_cell_count(),
        sign_change_cells: report.sign_change_cells,
        tangential_cells: report.tangential_cells,
    };
    write_file(
        &suffixed(&args.out_prefix, "json"),
        to_json_string(&summary)?.as_bytes(),
    )
}

fn suffixed(prefix: &std::path::Path, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}.{suffix}", prefix.display()))
}

pub fn fgn(args: FgnArgs) -> Result<(), CliError> {
    if args.replicates == 0 {
        return Err(CliError::Input("--replicates must be at least 1".into()));
    }
    let model = FgnModel::new(args.hurst, args.length)?;
    let sampler = FgnSampler::new(model)?;
    if sampler.clamped_eigenvalues() > 0 {
        eprintln!(
            "warning: {} circulant eigenvalues clamped to zero",
            sampler.clamped_eigenvalues()
        );
    }
    let generator = Generator::new(
        "fgn",
        json!({
            "hurst": args.hurst,
            "length": args.length,
            "seed": args.seed,
            "replicates": args.replicates,
            "format": match args.format { PathFormat::Csv => "csv", PathFormat::Bin => "bin" },
        }),
    );
    let header = generator.csv_lines();
    for i in 0..args.replicates {
        let seed = args.seed + i as u64;
        let path = sampler.sample(seed);
        let stem = format!("{}.{seed}", args.out_prefix.display());
        match args.format {
            PathFormat::Csv => {
                let mut buf = Vec::new();
                path.write_csv(&mut buf, &header)
                    .map_err(|e| CliError::io(&stem, e))?;
                write_file(&PathBuf::from(format!("{stem}.csv")), &buf)?;
            }
            PathFormat::Bin => {
                let mut buf = Vec::new();
                path.write_binary(&mut buf)
                    .map_err(|e| CliError::io(&stem, e))?;
                write_file(&PathBuf::from(format!("{stem}.bin")), &buf)?;
                let sidecar = json!({
                    "generator": generator,
                    "path": path.sidecar(),
                });
                write_file(
                    &PathBuf::from(format!("{stem}.json")),
                    to_json_string(&sidecar)?.as_bytes(),
                )?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct RegimeOutput {
    generator: serde_json::Value,
    report: ExperimentReport,
}

pub fn regime(args: RegimeArgs) -> Result<(), CliError> {
    let experiment: RegimeExperiment =
        parse_json(&read_json_arg(&args.experiment)?, "experiment description")?;
    let rule = QuadratureRule::gauss_hermite(experiment.spec.default_node_count())?;
    let report = run_experiment(&experiment, &rule)?;

    let generator = Generator::new(
        "regime",
        serde_json::to_value(&experiment)
            .map_err(|e| CliError::Numerical(format!("serialization failed: {e}")))?,
    );

    // Results table.
    let mut csv = String::new();
    for line in generator.csv_lines() {
        csv.push_str(&format!("# {line}\n"));
    }
    csv.push_str(&format!(
        "# rank: {}, predicted case: {}, predicted exponent: {}\n",
        report.rank, report.prediction.case_label, report.prediction.fluctuation_exponent
    ));
    csv.push_str("n,sd,stderr,skewness,mean,rms,shift\n");
    for row in &report.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.n, row.sd, row.sd_stderr, row.skewness, row.mean, row.rms, row.shift
        ));
    }
    write_file(
        &PathBuf::from(format!("{}.results.csv", args.out_prefix.display())),
        csv.as_bytes(),
    )?;

    // Plot data: log2 N against log2 of the scale measure.
    let mut plot = String::new();
    plot.push_str("# log2N log2scale\n");
    for row in &report.rows {
        plot.push_str(&format!(
            "{} {}\n",
            (row.n as f64).log2(),
            report.scale_measure(row).log2()
        ));
    }
    write_file(&suffixed(&args.out_prefix, "plot"), plot.as_bytes())?;

    // Full report with prediction and shape classification.
    let generator_value = serde_json::to_value(&generator)
        .map_err(|e| CliError::Numerical(format!("serialization failed: {e}")))?;
    let output = RegimeOutput {
        generator: generator_value,
        report,
    };
    write_file(
        &suffixed(&args.out_prefix, "json"),
        to_json_string(&output)?.as_bytes(),
    )
}

pub fn report(args: ReportArgs) -> Result<(), CliError> {
    let entries = std::fs::read_dir(&args.directory)
        .map_err(|e| CliError::io(&args.directory.display().to_string(), e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();

    let mut rows = Vec::new();
    for file in files {
        let text =
            std::fs::read_to_string(&file).map_err(|e| CliError::io(&file.display().to_string(), e))?;
        let parsed: RegimeOutput = serde_json::from_str(&text).map_err(|e| {
            eprintln!("malformed result file: {}", file.display());
            CliError::Io(format!("cannot parse {}: {e}", file.display()))
        })?;
        let report = parsed.report;
        let predicted = report.prediction.fluctuation_exponent;
        let estimated = report.estimated_exponent;
        let delta = (estimated - predicted).abs();
        rows.push((
            file.file_name().unwrap().to_string_lossy().into_owned(),
            report.prediction.case_label.to_string(),
            predicted,
            estimated,
            delta,
            delta <= args.tol,
        ));
    }

    println!("| file | case | predicted α | estimated α | |Δ| | pass |");
    println!("|------|------|------------:|------------:|----:|------|");
    for (file, case, predicted, estimated, delta, pass) in rows {
        println!(
            "| {file} | {case} | {predicted:.4} | {estimated:.4} | {delta:.4} | {} |",
            if pass { "yes" } else { "no" }
        );
    }
    Ok(())
}

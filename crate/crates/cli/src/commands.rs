use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use log::{info, warn};
use tubersg_core::estimator::{sensitivity_profile, FrequencySelection};
use tubersg_core::io::{
    read_dataset, read_rows_from_path, render_summary, write_dataset, write_report_dir, write_rows,
    write_rows_to_path, FitReportRow, SgResultRow, WeightRow,
};
use tubersg_core::synth::default_sg_ranges;
use tubersg_core::types::{BAND_HI_GHZ, BAND_LO_GHZ, DEFAULT_GRID_POINTS};
use tubersg_core::{
    estimate_sg, fit_model, gen_inverse_model, gen_mixture, load_model, per_type_report,
    published_model, save_model, sensitivity, sg_buoyancy, sg_traditional, stratified_split,
    validate_sg, Error, FrequencyGrid, MixtureParams, PotatoType, Provenance, SgModel, SynthConfig,
    Verdict,
};

use crate::args::{Command, Generator, Global, SynthArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Input was processed but some records were rejected.
    Rejected(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Rejected(_) => 2,
            CliError::Core(e) if e.is_io() => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Rejected(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult = Result<(), CliError>;

fn not_found(path: &Path, what: &str) -> CliError {
    CliError::Core(Error::Io {
        path: path.to_owned(),
        source: io::Error::new(io::ErrorKind::NotFound, format!("{what} does not exist")),
    })
}

fn require_file(path: &Path) -> CliResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(not_found(path, "file"))
    }
}

fn require_dir(path: &Path) -> CliResult {
    if path.is_dir() {
        Ok(())
    } else {
        Err(not_found(path, "directory"))
    }
}

/// The directory an output will be written into must already exist.
fn require_parent(path: &Path) -> CliResult {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => require_dir(p),
        _ => Ok(()),
    }
}

fn model_or_default(path: Option<&Path>) -> Result<SgModel, CliError> {
    match path {
        Some(p) => {
            require_file(p)?;
            Ok(load_model(p)?)
        }
        None => Ok(published_model()),
    }
}

pub fn run(global: &Global, command: Command) -> CliResult {
    match command {
        Command::Sg { input, output } => cmd_sg(&input, output.as_deref()),
        Command::Fit {
            dataset,
            out,
            report,
            source,
            created_utc,
        } => cmd_fit(&dataset, &out, report.as_deref(), source, created_utc),
        Command::Estimate {
            model,
            eps,
            freq_ghz,
        } => cmd_estimate(model.as_deref(), eps, freq_ghz),
        Command::Validate {
            model,
            dataset,
            out_dir,
        } => cmd_validate(&model, &dataset, &out_dir, global.quiet),
        Command::Synth(args) => cmd_synth(global, args),
        Command::Split {
            dataset,
            train_out,
            test_out,
            train_per_type,
            test_per_type,
        } => cmd_split(
            global.seed,
            &dataset,
            &train_out,
            &test_out,
            train_per_type,
            test_per_type,
        ),
        Command::Sensitivity {
            model,
            delta_eps,
            freq_ghz,
            band,
            output,
        } => cmd_sensitivity(
            model.as_deref(),
            delta_eps,
            freq_ghz,
            band,
            output.as_deref(),
        ),
    }
}

fn sg_for_row(row: &WeightRow) -> Result<f64, String> {
    let sg = match (row.w_uww_g, row.f_float_g) {
        (Some(w_uww), None) => sg_traditional(row.w_air_g, w_uww),
        (None, Some(f_float)) => sg_buoyancy(row.w_air_g, f_float),
        (Some(_), Some(_)) => return Err("both w_uww_g and f_float_g given".into()),
        (None, None) => return Err("neither w_uww_g nor f_float_g given".into()),
    };
    sg.map_err(|e| e.to_string())
}

fn cmd_sg(input: &Path, output: Option<&Path>) -> CliResult {
    require_file(input)?;
    if let Some(out) = output {
        require_parent(out)?;
    }
    let rows: Vec<WeightRow> = read_rows_from_path(input)?;
    let mut results = Vec::with_capacity(rows.len());
    let mut rejected = 0usize;
    for row in &rows {
        let (sg, verdict) = match sg_for_row(row) {
            Ok(sg) => (Some(sg), validate_sg(sg)?),
            Err(reason) => (None, Verdict::Error(reason)),
        };
        match &verdict {
            Verdict::Ok => {}
            Verdict::Warning(m) => warn!("{}: {m}", row.id),
            Verdict::Error(m) => {
                warn!("{}: {m}", row.id);
                rejected += 1;
            }
        }
        results.push(SgResultRow {
            id: row.id.clone(),
            sg,
            verdict: verdict.label().to_owned(),
        });
    }
    match output {
        Some(out) => write_rows_to_path(out, &results)?,
        None => write_rows(io::stdout().lock(), &results, Path::new("<stdout>"))?,
    }
    if rejected > 0 {
        return Err(CliError::Rejected(format!(
            "{rejected} of {} rows have an Error verdict",
            rows.len()
        )));
    }
    Ok(())
}

fn cmd_fit(
    dataset: &Path,
    out: &Path,
    report: Option<&Path>,
    source: Option<String>,
    created_utc: Option<String>,
) -> CliResult {
    require_dir(dataset)?;
    require_parent(out)?;
    if let Some(r) = report {
        require_parent(r)?;
    }
    let ds = read_dataset(dataset)?;
    let provenance = Provenance {
        source: source.or_else(|| ds.id().map(str::to_owned)),
        n_train: Some(ds.len()),
        created_utc,
    };
    let (model, coeffs) = fit_model(&ds, provenance)?;
    for w in model.physical_warnings() {
        warn!("fitted model: {w}");
    }
    save_model(&model, out)?;
    info!(
        "fitted {} samples over {} frequencies",
        ds.len(),
        ds.grid().len()
    );
    if let Some(r) = report {
        let rows: Vec<FitReportRow> = coeffs
            .grid
            .points()
            .iter()
            .enumerate()
            .map(|(k, &f)| FitReportRow {
                f_ghz: f,
                c1: coeffs.c1[k],
                c2: coeffs.c2[k],
                r2: coeffs.r2[k],
                c1_fit: model.c1().eval_unchecked(f),
                c2_fit: model.c2().eval_unchecked(f),
            })
            .collect();
        write_rows_to_path(r, &rows)?;
    }
    Ok(())
}

fn cmd_estimate(model: Option<&Path>, eps: f64, f_ghz: f64) -> CliResult {
    let m = model_or_default(model)?;
    let est = estimate_sg(&m, eps, f_ghz)?;
    if let Verdict::Warning(msg) | Verdict::Error(msg) = &est.verdict {
        warn!("{msg}");
    }
    println!("{}", est.sg);
    Ok(())
}

fn cmd_validate(model: &Path, dataset: &Path, out_dir: &Path, quiet: bool) -> CliResult {
    require_file(model)?;
    require_dir(dataset)?;
    require_parent(out_dir)?;
    let m = load_model(model)?;
    let ds = read_dataset(dataset)?;
    let report = per_type_report(&m, &ds)?;
    write_report_dir(&report, out_dir)?;
    if !quiet {
        print!("{}", render_summary(&report));
    }
    Ok(())
}

fn synth_config(global: &Global, args: &SynthArgs) -> Result<SynthConfig, CliError> {
    let mut cfg = SynthConfig {
        n_per_type: args.n_per_type,
        ..SynthConfig::default().with_seed(global.seed)
    };
    if !args.types.is_empty() {
        let defaults = default_sg_ranges();
        let mut ranges = Vec::with_capacity(args.types.len());
        for name in &args.types {
            let t: PotatoType = name
                .parse()
                .map_err(|e: Error| CliError::Usage(format!("--types: {e}")))?;
            let range = match defaults.iter().find(|(d, _)| *d == t) {
                Some((_, r)) => *r,
                None if args.sg_range.is_some() => (0.0, 0.0),
                None => {
                    return Err(CliError::Usage(format!(
                        "--types: {t} has no default SG range; pass --sg-range"
                    )))
                }
            };
            if ranges.iter().any(|(d, _)| *d == t) {
                return Err(CliError::Usage(format!("--types: {t} listed twice")));
            }
            ranges.push((t, range));
        }
        cfg.sg_ranges = ranges;
    }
    if let Some(r) = args.sg_range {
        for (_, range) in &mut cfg.sg_ranges {
            *range = r;
        }
    }
    if let Some(v) = args.noise_eps_std {
        cfg.noise_eps_std = v;
    }
    if let Some(v) = args.bio_resid_std {
        cfg.bio_resid_std = v;
    }
    if let Some(v) = args.replicates {
        cfg.replicates = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_synth(global: &Global, args: SynthArgs) -> CliResult {
    require_parent(&args.out)?;
    let cfg = synth_config(global, &args)?;
    let ds = match args.generator {
        Generator::Inverse => {
            let m = model_or_default(args.model.as_deref())?;
            gen_inverse_model(&cfg, &m, &global.grid)?
        }
        Generator::Mixture => {
            if args.model.is_some() {
                return Err(CliError::Usage(
                    "--model applies to the inverse generator only".into(),
                ));
            }
            gen_mixture(&cfg, &MixtureParams::default(), &global.grid)?
        }
    };
    write_dataset(&ds, &args.out)?;
    info!("wrote {} samples to {}", ds.len(), args.out.display());
    Ok(())
}

fn cmd_split(
    seed: u64,
    dataset: &Path,
    train_out: &Path,
    test_out: &Path,
    train_per_type: usize,
    test_per_type: usize,
) -> CliResult {
    require_dir(dataset)?;
    require_parent(train_out)?;
    require_parent(test_out)?;
    if same_path(train_out, test_out) {
        return Err(CliError::Usage(
            "--train-out and --test-out must differ".into(),
        ));
    }
    let ds = read_dataset(dataset)?;
    let (train, test) = stratified_split(&ds, train_per_type, test_per_type, seed)?;
    write_dataset(&train, train_out)?;
    write_dataset(&test, test_out)?;
    Ok(())
}

fn same_path(a: &Path, b: &Path) -> bool {
    let canon = |p: &Path| -> PathBuf { p.canonicalize().unwrap_or_else(|_| p.to_owned()) };
    canon(a) == canon(b)
}

fn cmd_sensitivity(
    model: Option<&Path>,
    delta_eps: f64,
    freq_ghz: Option<f64>,
    band: Option<(f64, f64)>,
    output: Option<&Path>,
) -> CliResult {
    if freq_ghz.is_some() && output.is_some() {
        return Err(CliError::Usage(
            "--output needs a band, not --freq-ghz".into(),
        ));
    }
    if let Some(out) = output {
        require_parent(out)?;
    }
    let m = model_or_default(model)?;
    let at = match (freq_ghz, band) {
        (Some(f), _) => FrequencySelection::Single(f),
        (None, Some((lo, hi))) => FrequencySelection::Band(lo, hi),
        (None, None) => FrequencySelection::Band(BAND_LO_GHZ, BAND_HI_GHZ),
    };
    let bound = sensitivity(&m, delta_eps, at)?;
    println!("{} {}", bound.delta_sg, bound.at_frequency_ghz);
    if let (Some(out), FrequencySelection::Band(lo, hi)) = (output, at) {
        let n = if lo == hi { 1 } else { DEFAULT_GRID_POINTS };
        let grid = FrequencyGrid::uniform(lo, hi, n)?;
        write_rows_to_path(out, &sensitivity_profile(&m, delta_eps, &grid)?)?;
    }
    Ok(())
}

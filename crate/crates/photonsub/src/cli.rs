//! Deterministic command-line front end.
//!
//! Every command validates its parameters, runs a pure computation, and
//! renders the result as CSV or JSON. Identical invocations produce
//! byte-identical artifacts. When `--out` is given, a `<path>.meta.json`
//! sidecar records the command, its parameters, the truncation windows, the
//! tail target, and the tail-mass bounds of the states that were built.
//!
//! The `PHOTONSUB_TOL` environment variable overrides the default relative
//! tail target used by the automatic truncation heuristics; `--trunc`
//! overrides the window outright.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    bell_check, match_crossing_with_truncation, parity_joint_distribution,
    probability_sweep_with_truncation, sweep_to_csv, CatParity, InputFamily, SubtractedSpec,
};
use crate::beamsplitter::apply_50_50;
use crate::error::Error;
use crate::fock::FockAmplitudes;
use crate::states::{
    cat_even, cat_odd, cat_truncation_with_tail, coherent, coherent_truncation_with_tail,
    CoherentParam, SqueezingParam, AUTO_TAIL_TARGET,
};
use crate::subtraction::subtracted_state;
use crate::wigner::{wigner_field, PhaseSpaceGrid};

/// Upper bound on the number of sweep samples a range may expand to.
const MAX_SWEEP_SAMPLES: i128 = 100_000;
/// Extra window slack per subtracted photon, matching the automatic choice
/// of the analysis layer.
const SUBTRACT_SLACK: usize = 4;
/// Upper end of the crossing search bracket; the automatic window is sized
/// for this worst case.
const CROSSING_WINDOW_AT: f64 = 0.95;

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(
    name = "photonsub",
    version,
    about = "Conditional photon subtraction at a 50/50 beam splitter",
    propagate_version = true
)]
pub struct RunConfig {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Idler-count probability curves over a squeezing sweep
    ProbCurves(ProbCurvesArgs),
    /// Photon-number histogram of a subtracted state
    Histogram(HistogramArgs),
    /// Wigner distribution of a subtracted state on a phase-space grid
    Wigner(WignerArgs),
    /// Split a cat state and compare with the entangled cat-pair targets
    BellCheck(BellCheckArgs),
    /// Compute a subtracted state and serialize its amplitudes
    Subtract(SubtractArgs),
    /// Squeezing strength where two subtracted families weight a photon
    /// number equally
    Crossing(CrossingArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepFamilyArg {
    SqueezedVacuum,
    OddSqueezed,
}

impl From<SweepFamilyArg> for InputFamily {
    fn from(arg: SweepFamilyArg) -> Self {
        match arg {
            SweepFamilyArg::SqueezedVacuum => InputFamily::SqueezedVacuum,
            SweepFamilyArg::OddSqueezed => InputFamily::OddSqueezed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateKindArg {
    Coherent,
    SqueezedVacuum,
    OddSqueezed,
    CatEven,
    CatOdd,
}

impl StateKindArg {
    fn label(self) -> &'static str {
        match self {
            StateKindArg::Coherent => "coherent",
            StateKindArg::SqueezedVacuum => "squeezed_vacuum",
            StateKindArg::OddSqueezed => "odd_squeezed",
            StateKindArg::CatEven => "cat_even",
            StateKindArg::CatOdd => "cat_odd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BellStateArg {
    CatEven,
    CatOdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl FormatArg {
    fn label(self) -> &'static str {
        match self {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        }
    }
}

#[derive(Debug, Args)]
struct ProbCurvesArgs {
    /// Input family entering the splitter
    #[arg(long, value_enum)]
    state: SweepFamilyArg,
    /// Idler photon counts, e.g. `0,1,2`
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Squeezing samples: a range `start:end:step` or a comma list
    #[arg(long)]
    xi: String,
    /// Fixed truncation window for every sample
    #[arg(long)]
    trunc: Option<usize>,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

/// How the state entering the subtraction pipeline is specified.
#[derive(Debug, Args)]
struct SourceArgs {
    /// Named input state
    #[arg(long, value_enum, conflicts_with = "input")]
    state: Option<StateKindArg>,
    /// JSON amplitude file (as written by `subtract`) instead of `--state`
    #[arg(long)]
    input: Option<PathBuf>,
    /// Squeezing parameter `r[,phase]` for the squeezed families
    #[arg(long)]
    xi: Option<String>,
    /// Coherent amplitude `r[,phase]` for coherent and cat states
    #[arg(long)]
    z: Option<String>,
    /// Number of photons to subtract
    #[arg(long, default_value_t = 0)]
    subtract: usize,
    /// Truncation of the resulting state
    #[arg(long)]
    trunc: Option<usize>,
}

#[derive(Debug, Args)]
struct HistogramArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct WignerArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Phase-space window `remin:remax:nre,immin:immax:nim`
    #[arg(long)]
    grid: Option<String>,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct BellCheckArgs {
    /// Cat state entering the splitter
    #[arg(long, value_enum)]
    state: BellStateArg,
    /// Coherent amplitude `r[,phase]` of the cat
    #[arg(long)]
    z: String,
    /// Truncation override
    #[arg(long)]
    trunc: Option<usize>,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct SubtractArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct CrossingArgs {
    /// Photon number whose weights are matched
    #[arg(long)]
    target: usize,
    /// Two subtracted family specs, e.g. `vac1,odd0`
    #[arg(long)]
    pair: String,
    /// Fixed truncation window for every evaluation
    #[arg(long)]
    trunc: Option<usize>,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

/// Why a run stopped.
#[derive(Debug)]
enum RunFailure {
    /// A modelling precondition was violated or a series failed to converge.
    Model(Error),
    /// Reading or writing an artifact failed.
    Io(std::io::Error),
}

impl RunFailure {
    fn exit_code(&self) -> u8 {
        match self {
            RunFailure::Model(error) => error.exit_code(),
            RunFailure::Io(_) => 1,
        }
    }
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunFailure::Model(error) => error.fmt(f),
            RunFailure::Io(error) => error.fmt(f),
        }
    }
}

impl From<Error> for RunFailure {
    fn from(error: Error) -> Self {
        RunFailure::Model(error)
    }
}

impl From<std::io::Error> for RunFailure {
    fn from(error: std::io::Error) -> Self {
        RunFailure::Io(error)
    }
}

impl From<serde_json::Error> for RunFailure {
    fn from(error: serde_json::Error) -> Self {
        RunFailure::Io(std::io::Error::other(error))
    }
}

/// Parse the process arguments and run; the binary's whole body.
pub fn main_entry() -> ExitCode {
    run(RunConfig::parse())
}

/// Execute a parsed command, mapping failures to the documented exit codes:
/// `0` success, `1` I/O, `2` domain violations, `3` convergence failures.
pub fn run(config: RunConfig) -> ExitCode {
    match execute(config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

fn execute(config: RunConfig) -> Result<(), RunFailure> {
    let tail_target = tail_target_from_env()?;
    match config.command {
        Command::ProbCurves(args) => run_prob_curves(args, tail_target),
        Command::Histogram(args) => run_histogram(args, tail_target),
        Command::Wigner(args) => run_wigner(args, tail_target),
        Command::BellCheck(args) => run_bell_check(args, tail_target),
        Command::Subtract(args) => run_subtract(args, tail_target),
        Command::Crossing(args) => run_crossing(args, tail_target),
    }
}

/// The relative tail target, overridable through `PHOTONSUB_TOL`.
fn tail_target_from_env() -> Result<f64, RunFailure> {
    match std::env::var("PHOTONSUB_TOL") {
        Err(_) => Ok(AUTO_TAIL_TARGET),
        Ok(text) => {
            let value: f64 = text.trim().parse().map_err(|_| {
                Error::Domain(format!("PHOTONSUB_TOL must be a number, got {text:?}"))
            })?;
            if !value.is_finite() || value <= 0.0 || value > 0.1 {
                return Err(Error::Domain(format!(
                    "PHOTONSUB_TOL must lie in (0, 0.1], got {value}"
                ))
                .into());
            }
            Ok(value)
        }
    }
}

/// Metadata written next to every `--out` artifact.
#[derive(Debug, Serialize)]
struct Sidecar {
    command: &'static str,
    parameters: BTreeMap<String, String>,
    truncations: BTreeMap<String, usize>,
    tail_target: f64,
    tail_mass_bounds: BTreeMap<String, f64>,
    outputs: Vec<String>,
}

impl Sidecar {
    fn new(command: &'static str, tail_target: f64) -> Self {
        Sidecar {
            command,
            parameters: BTreeMap::new(),
            truncations: BTreeMap::new(),
            tail_mass_bounds: BTreeMap::new(),
            tail_target,
            outputs: Vec::new(),
        }
    }

    fn parameter(&mut self, key: &str, value: impl fmt::Display) {
        self.parameters.insert(key.to_string(), value.to_string());
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    PathBuf::from(format!("{}.meta.json", out.display()))
}

/// Write the artifact (and sidecar) to `--out`, or the artifact to stdout.
fn emit(out: Option<&Path>, artifact: &str, mut sidecar: Sidecar) -> Result<(), RunFailure> {
    match out {
        None => {
            print!("{artifact}");
            Ok(())
        }
        Some(path) => {
            fs::write(path, artifact)?;
            sidecar.outputs.push(path.display().to_string());
            let meta = format!("{}\n", serde_json::to_string_pretty(&sidecar)?);
            fs::write(sidecar_path(path), meta)?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CurveJson {
    n: usize,
    p: Vec<f64>,
}

#[derive(Serialize)]
struct ProbCurvesJson {
    xi: Vec<f64>,
    curves: Vec<CurveJson>,
}

fn run_prob_curves(args: ProbCurvesArgs, tail_target: f64) -> Result<(), RunFailure> {
    let samples = parse_xi_samples(&args.xi)?;
    if samples.is_empty() {
        return Err(Error::Domain("the sweep needs at least one sample".into()).into());
    }
    let family = InputFamily::from(args.state);
    let window = match args.trunc {
        Some(window) => window,
        None => {
            let top = samples.iter().copied().fold(0.0, f64::max);
            let xi = SqueezingParam::new(top, 0.0)?;
            family.parent_truncation(&xi, tail_target)
        }
    };

    let mut curves = Vec::with_capacity(args.n.len());
    for &count in &args.n {
        let sweep = probability_sweep_with_truncation(family, count, &samples, window)?;
        curves.push(CurveJson {
            n: count,
            p: sweep.into_iter().map(|(_, p)| p).collect(),
        });
    }

    let artifact = match args.format {
        FormatArg::Csv => {
            if let [single] = curves.as_slice() {
                let rows: Vec<(f64, f64)> = samples
                    .iter()
                    .zip(&single.p)
                    .map(|(&xi, &p)| (xi, p))
                    .collect();
                sweep_to_csv(&rows)
            } else {
                let mut out = String::from("xi");
                for curve in &curves {
                    out.push_str(&format!(",p{}", curve.n));
                }
                out.push('\n');
                for (i, xi) in samples.iter().enumerate() {
                    out.push_str(&format!("{xi}"));
                    for curve in &curves {
                        out.push_str(&format!(",{}", curve.p[i]));
                    }
                    out.push('\n');
                }
                out
            }
        }
        FormatArg::Json => {
            let body = ProbCurvesJson {
                xi: samples.clone(),
                curves,
            };
            format!("{}\n", serde_json::to_string_pretty(&body)?)
        }
    };

    let mut sidecar = Sidecar::new("prob-curves", tail_target);
    sidecar.parameter("state", family);
    sidecar.parameter(
        "n",
        args.n
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    sidecar.parameter("xi", &args.xi);
    sidecar.parameter("samples", samples.len());
    sidecar.parameter("format", args.format.label());
    sidecar.truncations.insert("input".into(), window);
    emit(args.out.as_deref(), &artifact, sidecar)
}

/// A subtracted state resolved from `--state`/`--input`, with bookkeeping
/// for the sidecar.
struct Prepared {
    state: FockAmplitudes,
    window: usize,
    parameters: BTreeMap<String, String>,
}

fn resolve_subtracted(source: &SourceArgs, tail_target: f64) -> Result<Prepared, RunFailure> {
    let mut parameters = BTreeMap::new();
    parameters.insert("subtract".into(), source.subtract.to_string());

    if let Some(path) = &source.input {
        if source.xi.is_some() || source.z.is_some() {
            return Err(Error::Domain(
                "--xi/--z do not apply to --input; the file fixes the state".into(),
            )
            .into());
        }
        let text = fs::read_to_string(path).map_err(|error| {
            std::io::Error::new(error.kind(), format!("cannot read {}: {error}", path.display()))
        })?;
        let parent: FockAmplitudes = serde_json::from_str(&text).map_err(|error| {
            Error::Domain(format!("cannot parse state file {}: {error}", path.display()))
        })?;
        let window = source
            .trunc
            .unwrap_or_else(|| parent.truncation().saturating_sub(source.subtract));
        let norm_sqr: f64 = parent.amps().iter().map(|amp| amp.norm_sqr()).sum();
        // Subtracting nothing from a normalized state on its own window is
        // the identity; skipping the numerical no-op keeps round trips
        // through `subtract` artifacts byte-identical downstream.
        let state = if source.subtract == 0
            && window == parent.truncation()
            && (norm_sqr - 1.0).abs() <= 1e-9
        {
            parent
        } else {
            subtracted_state(&parent, source.subtract, window)?.0
        };
        parameters.insert("input".into(), path.display().to_string());
        return Ok(Prepared {
            state,
            window,
            parameters,
        });
    }

    let kind = source.state.ok_or_else(|| {
        Error::Domain("either --state or --input must name the input state".into())
    })?;
    let label = kind.label().to_string();
    parameters.insert("state".into(), label.clone());

    match kind {
        StateKindArg::SqueezedVacuum | StateKindArg::OddSqueezed => {
            if source.z.is_some() {
                return Err(Error::Domain(format!(
                    "--z does not apply to {label}; use --xi r[,phase]"
                ))
                .into());
            }
            let (magnitude, phase) = parse_polar(
                source.xi.as_deref(),
                &format!("{label} needs --xi r[,phase]"),
            )?;
            let xi = SqueezingParam::new(magnitude, phase)?;
            let family = match kind {
                StateKindArg::SqueezedVacuum => InputFamily::SqueezedVacuum,
                _ => InputFamily::OddSqueezed,
            };
            let spec = SubtractedSpec::new(family, source.subtract);
            let window = source
                .trunc
                .unwrap_or_else(|| spec.auto_truncation(&xi, tail_target));
            let state = spec.state(&xi, window)?;
            parameters.insert("xi".into(), format!("{magnitude},{phase}"));
            Ok(Prepared {
                state,
                window,
                parameters,
            })
        }
        StateKindArg::Coherent | StateKindArg::CatEven | StateKindArg::CatOdd => {
            if source.xi.is_some() {
                return Err(Error::Domain(format!(
                    "--xi does not apply to {label}; use --z r[,phase]"
                ))
                .into());
            }
            let (magnitude, phase) =
                parse_polar(source.z.as_deref(), &format!("{label} needs --z r[,phase]"))?;
            let z = CoherentParam::new(magnitude, phase)?;
            let window = source.trunc.unwrap_or_else(|| {
                let base = match kind {
                    StateKindArg::Coherent => coherent_truncation_with_tail(&z, tail_target),
                    _ => cat_truncation_with_tail(&z, tail_target),
                };
                base + 2 * source.subtract + SUBTRACT_SLACK
            });
            let parent_window = window + source.subtract;
            let parent = match kind {
                StateKindArg::Coherent => coherent(&z, parent_window),
                StateKindArg::CatEven => cat_even(&z, parent_window),
                _ => cat_odd(&z, parent_window)?,
            };
            let (state, _) = subtracted_state(&parent, source.subtract, window)?;
            parameters.insert("z".into(), format!("{magnitude},{phase}"));
            Ok(Prepared {
                state,
                window,
                parameters,
            })
        }
    }
}

#[derive(Serialize)]
struct HistogramJson {
    truncation: usize,
    distribution: Vec<f64>,
}

fn run_histogram(args: HistogramArgs, tail_target: f64) -> Result<(), RunFailure> {
    let prepared = resolve_subtracted(&args.source, tail_target)?;
    let distribution = prepared.state.photon_distribution();
    let artifact = match args.format {
        FormatArg::Csv => {
            let mut out = String::from("n,p\n");
            for (n, p) in distribution.iter().enumerate() {
                out.push_str(&format!("{n},{p}\n"));
            }
            out
        }
        FormatArg::Json => {
            let body = HistogramJson {
                truncation: prepared.state.truncation(),
                distribution,
            };
            format!("{}\n", serde_json::to_string_pretty(&body)?)
        }
    };
    let mut sidecar = Sidecar::new("histogram", tail_target);
    sidecar.parameters = prepared.parameters;
    sidecar.parameter("format", args.format.label());
    sidecar.truncations.insert("state".into(), prepared.window);
    sidecar
        .tail_mass_bounds
        .insert("state".into(), prepared.state.tail_mass_bound());
    emit(args.out.as_deref(), &artifact, sidecar)
}

fn run_wigner(args: WignerArgs, tail_target: f64) -> Result<(), RunFailure> {
    let prepared = resolve_subtracted(&args.source, tail_target)?;
    let grid = match &args.grid {
        Some(text) => parse_grid(text)?,
        None => PhaseSpaceGrid::default_window(),
    };
    let field = wigner_field(&prepared.state, &grid);
    let artifact = match args.format {
        FormatArg::Csv => field.to_csv(),
        FormatArg::Json => format!("{}\n", serde_json::to_string_pretty(&field)?),
    };
    let mut sidecar = Sidecar::new("wigner", tail_target);
    sidecar.parameters = prepared.parameters;
    sidecar.parameter("format", args.format.label());
    sidecar.parameter(
        "grid",
        format!(
            "{}:{}:{},{}:{}:{}",
            grid.re_min, grid.re_max, grid.n_re, grid.im_min, grid.im_max, grid.n_im
        ),
    );
    sidecar.parameter("grid_adequate", field.grid_adequate);
    sidecar.truncations.insert("state".into(), prepared.window);
    sidecar
        .tail_mass_bounds
        .insert("state".into(), prepared.state.tail_mass_bound());
    emit(args.out.as_deref(), &artifact, sidecar)
}

#[derive(Serialize)]
struct BellCheckJson {
    fidelity_even: f64,
    fidelity_odd: f64,
    parity_agreement: f64,
    parity_table: [[f64; 2]; 2],
}

fn run_bell_check(args: BellCheckArgs, tail_target: f64) -> Result<(), RunFailure> {
    let (magnitude, phase) = parse_polar(Some(&args.z), "bell-check needs --z r[,phase]")?;
    let z = CoherentParam::new(magnitude, phase)?;
    let window = args
        .trunc
        .unwrap_or_else(|| cat_truncation_with_tail(&z, tail_target) + SUBTRACT_SLACK);
    let which = match args.state {
        BellStateArg::CatEven => CatParity::Even,
        BellStateArg::CatOdd => CatParity::Odd,
    };
    let report = bell_check(&z, which, window)?;
    let input = match which {
        CatParity::Even => cat_even(&z, window),
        CatParity::Odd => cat_odd(&z, window)?,
    };
    let split = apply_50_50(&input);
    let body = BellCheckJson {
        fidelity_even: report.fidelity_even,
        fidelity_odd: report.fidelity_odd,
        parity_agreement: report.parity_agreement,
        parity_table: parity_joint_distribution(&split),
    };
    let artifact = match args.format {
        FormatArg::Csv => {
            let mut out = String::from("metric,value\n");
            out.push_str(&format!("fidelity_even,{}\n", body.fidelity_even));
            out.push_str(&format!("fidelity_odd,{}\n", body.fidelity_odd));
            out.push_str(&format!("parity_agreement,{}\n", body.parity_agreement));
            for (row, parity_a) in ["even", "odd"].into_iter().enumerate() {
                for (col, parity_b) in ["even", "odd"].into_iter().enumerate() {
                    out.push_str(&format!(
                        "parity_{parity_a}_{parity_b},{}\n",
                        body.parity_table[row][col]
                    ));
                }
            }
            out
        }
        FormatArg::Json => format!("{}\n", serde_json::to_string_pretty(&body)?),
    };
    let mut sidecar = Sidecar::new("bell-check", tail_target);
    sidecar.parameter(
        "state",
        match which {
            CatParity::Even => "cat_even",
            CatParity::Odd => "cat_odd",
        },
    );
    sidecar.parameter("z", format!("{magnitude},{phase}"));
    sidecar.parameter("format", args.format.label());
    sidecar.truncations.insert("state".into(), window);
    sidecar
        .tail_mass_bounds
        .insert("state".into(), input.tail_mass_bound());
    emit(args.out.as_deref(), &artifact, sidecar)
}

fn run_subtract(args: SubtractArgs, tail_target: f64) -> Result<(), RunFailure> {
    let prepared = resolve_subtracted(&args.source, tail_target)?;
    let artifact = match args.format {
        FormatArg::Csv => {
            let mut out = String::from("n,re,im\n");
            for (n, amp) in prepared.state.amps().iter().enumerate() {
                out.push_str(&format!("{n},{},{}\n", amp.re, amp.im));
            }
            out
        }
        FormatArg::Json => format!("{}\n", serde_json::to_string_pretty(&prepared.state)?),
    };
    let mut sidecar = Sidecar::new("subtract", tail_target);
    sidecar.parameters = prepared.parameters;
    sidecar.parameter("format", args.format.label());
    sidecar.truncations.insert("state".into(), prepared.window);
    sidecar
        .tail_mass_bounds
        .insert("state".into(), prepared.state.tail_mass_bound());
    emit(args.out.as_deref(), &artifact, sidecar)
}

#[derive(Serialize)]
struct CrossingJson {
    target: usize,
    first: String,
    second: String,
    xi_star: f64,
    truncation: usize,
}

fn run_crossing(args: CrossingArgs, tail_target: f64) -> Result<(), RunFailure> {
    let (first, second) = parse_pair(&args.pair)?;
    let window = match args.trunc {
        Some(window) => window,
        None => {
            let worst = SqueezingParam::new(CROSSING_WINDOW_AT, 0.0)?;
            first
                .auto_truncation(&worst, tail_target)
                .max(second.auto_truncation(&worst, tail_target))
        }
    };
    let root = match_crossing_with_truncation(args.target, (first, second), window)?;
    let body = CrossingJson {
        target: args.target,
        first: first.to_string(),
        second: second.to_string(),
        xi_star: root,
        truncation: window,
    };
    let artifact = match args.format {
        FormatArg::Csv => format!(
            "target,first,second,xi_star\n{},{},{},{}\n",
            body.target, body.first, body.second, body.xi_star
        ),
        FormatArg::Json => format!("{}\n", serde_json::to_string_pretty(&body)?),
    };
    let mut sidecar = Sidecar::new("crossing", tail_target);
    sidecar.parameter("target", args.target);
    sidecar.parameter("pair", &args.pair);
    sidecar.parameter("format", args.format.label());
    sidecar.truncations.insert("search".into(), window);
    emit(args.out.as_deref(), &artifact, sidecar)
}

/// Parse `r` or `r,phase` into a polar pair.
fn parse_polar(text: Option<&str>, context: &str) -> Result<(f64, f64), Error> {
    let text = text.ok_or_else(|| Error::Domain(context.to_string()))?;
    let mut parts = text.split(',');
    let magnitude = parts
        .next()
        .and_then(|p| p.trim().parse::<f64>().ok())
        .ok_or_else(|| Error::Domain(format!("cannot parse magnitude in {text:?}; {context}")))?;
    let phase = match parts.next() {
        None => 0.0,
        Some(raw) => raw
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::Domain(format!("cannot parse phase in {text:?}; {context}")))?,
    };
    if parts.next().is_some() {
        return Err(Error::Domain(format!(
            "expected r[,phase], got extra fields in {text:?}"
        )));
    }
    Ok((magnitude, phase))
}

/// A decimal literal as an exact scaled integer: `(mantissa, fraction digits)`.
fn parse_decimal(text: &str) -> Result<(i128, u32), Error> {
    let trimmed = text.trim();
    let bad = || Error::Domain(format!("cannot parse decimal number {text:?}"));
    let (sign, digits) = match trimmed.strip_prefix('-') {
        Some(rest) => (-1i128, rest),
        None => (1i128, trimmed.strip_prefix('+').unwrap_or(trimmed)),
    };
    let (integer, fraction) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if integer.len() + fraction.len() == 0 || integer.len() > 12 || fraction.len() > 18 {
        return Err(bad());
    }
    if !integer.chars().chain(fraction.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut mantissa: i128 = 0;
    for c in integer.chars().chain(fraction.chars()) {
        mantissa = mantissa * 10 + i128::from(c as u8 - b'0');
    }
    Ok((sign * mantissa, fraction.len() as u32))
}

/// Expand `start:end:step` with exact decimal arithmetic, or split a comma
/// list of plain floats.
///
/// The range is inclusive at the start; the end is included exactly when
/// `start + k step` lands on it, so `0:0.95:0.05` ends at `0.95` while
/// `0:1:0.3` stops at `0.9`.
fn parse_xi_samples(text: &str) -> Result<Vec<f64>, Error> {
    if !text.contains(':') {
        return text
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Domain(format!("cannot parse sweep sample {part:?}")))
            })
            .collect();
    }
    let parts: Vec<&str> = text.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(Error::Domain(format!(
            "sweep range must be start:end:step, got {text:?}"
        )));
    };
    let (start, start_digits) = parse_decimal(start)?;
    let (end, end_digits) = parse_decimal(end)?;
    let (step, step_digits) = parse_decimal(step)?;
    let digits = start_digits.max(end_digits).max(step_digits);
    let rescale = |value: i128, own: u32| value * 10i128.pow(digits - own);
    let (start, end, step) = (
        rescale(start, start_digits),
        rescale(end, end_digits),
        rescale(step, step_digits),
    );
    if step <= 0 {
        return Err(Error::Domain(format!(
            "sweep step must be positive in {text:?}"
        )));
    }
    if end < start {
        return Err(Error::Domain(format!("sweep range {text:?} is empty")));
    }
    if (end - start) / step + 1 > MAX_SWEEP_SAMPLES {
        return Err(Error::Domain(format!(
            "sweep range {text:?} expands to more than {MAX_SWEEP_SAMPLES} samples"
        )));
    }
    let denominator = 10f64.powi(digits as i32);
    let mut samples = Vec::new();
    let mut value = start;
    while value <= end {
        samples.push(value as f64 / denominator);
        value += step;
    }
    Ok(samples)
}

/// Parse `remin:remax:nre,immin:immax:nim` into a phase-space grid.
fn parse_grid(text: &str) -> Result<PhaseSpaceGrid, Error> {
    let bad = || {
        Error::Domain(format!(
            "grid must be remin:remax:nre,immin:immax:nim, got {text:?}"
        ))
    };
    let (re_part, im_part) = text.split_once(',').ok_or_else(bad)?;
    let parse_axis = |part: &str| -> Result<(f64, f64, usize), Error> {
        let fields: Vec<&str> = part.split(':').collect();
        let [min, max, count] = fields.as_slice() else {
            return Err(bad());
        };
        Ok((
            min.trim().parse().map_err(|_| bad())?,
            max.trim().parse().map_err(|_| bad())?,
            count.trim().parse().map_err(|_| bad())?,
        ))
    };
    let (re_min, re_max, n_re) = parse_axis(re_part)?;
    let (im_min, im_max, n_im) = parse_axis(im_part)?;
    PhaseSpaceGrid::new(re_min, re_max, im_min, im_max, n_re, n_im)
}

/// Parse a pair like `vac1,odd0` into two subtracted family specs.
fn parse_pair(text: &str) -> Result<(SubtractedSpec, SubtractedSpec), Error> {
    let (first, second) = text.split_once(',').ok_or_else(|| {
        Error::Domain(format!(
            "pair must be two comma-separated specs like vac1,odd0, got {text:?}"
        ))
    })?;
    Ok((parse_spec(first)?, parse_spec(second)?))
}

fn parse_spec(token: &str) -> Result<SubtractedSpec, Error> {
    let token = token.trim();
    let (family, rest) = if let Some(rest) = token.strip_prefix("vac") {
        (InputFamily::SqueezedVacuum, rest)
    } else if let Some(rest) = token.strip_prefix("odd") {
        (InputFamily::OddSqueezed, rest)
    } else {
        return Err(Error::Domain(format!(
            "spec {token:?} must start with vac or odd"
        )));
    };
    let subtract: usize = rest.parse().map_err(|_| {
        Error::Domain(format!(
            "spec {token:?} must end with a subtraction count, like vac1"
        ))
    })?;
    Ok(SubtractedSpec::new(family, subtract))
}

//! Batch front end: each subcommand reads one JSON input (or a built-in preset)
//! and writes one canonical JSON report.

pub mod json;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use k3tau::hyperkahler::{FrameError, HKFrame, InvolutionAction, Tolerance};
use k3tau::lattice::{
    build_standard_lattice, eigenlattice, enriques_involution, IntMatrix, Lattice, LatticeError, LatticeIsometry,
    StandardLattice, SublatticeBasis,
};
use k3tau::period::{component_label, period_of, PeriodContext, PeriodError};
use k3tau::spectral::{
    borcherds_report, build_model_spectrum_for_tolerance, dolbeault_zeta, equivariant_determinant,
    equivariant_torsion, tau_iota, zeta_signed, CurveData, EquivariantSpectrum, ModelSpec, SpectralError,
    TorusCharacter, ZetaOptions,
};
use k3tau::ErrorKind;
use nalgebra::DVector;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "k3tau", version, about = "Lattices, periods and equivariant determinants for K3 surfaces with an involution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Target absolute accuracy for zeta-regularized quantities.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Largest number of explicit eigenvalue entries a preset spectrum may use.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_terms: usize,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Signature, determinant and discriminant form of a lattice.
    Lattice(Source),
    /// Eigenlattices of an involution of the K3 lattice.
    Involution(Source),
    /// Period points of a frame compatible with an involution.
    Period(Source),
    /// Signed zeta functions, determinant and torsion of an equivariant spectrum.
    Zeta(Source),
    /// The invariant tau of an involution from its spectrum and fixed curves.
    Tau(TauArgs),
    /// Norms implied by a value of tau.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct Source {
    /// JSON input file.
    pub input: Option<PathBuf>,
    /// Use a built-in preset instead of an input file.
    #[arg(long, conflicts_with = "input")]
    pub builtin: Option<String>,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    #[command(flatten)]
    pub source: Source,
    /// JSON file with the fixed curves (volume and scalar spectrum of each).
    #[arg(long)]
    pub curves: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// JSON file with `tau`, `nu` and optionally `constant`.
    pub input: Option<PathBuf>,
    /// Value of tau, when no input file is given.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub tau: Option<f64>,
    /// Weight of the automorphic form.
    #[arg(long, default_value_t = 1, conflicts_with = "input")]
    pub nu: u32,
    /// The undetermined proportionality constant, if a value is to be assumed.
    #[arg(long, conflicts_with = "input")]
    pub constant: Option<f64>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Period(#[from] PeriodError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl CliError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Self::Input(_) | Self::Io { .. } => ErrorKind::Input,
            Self::Lattice(e) => e.kind(),
            Self::Frame(e) => e.kind(),
            Self::Period(e) => e.kind(),
            Self::Spectral(e) => e.kind(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Input => 2,
            ErrorKind::Accuracy => 3,
            ErrorKind::Geometry => 4,
        }
    }

    /// Machine-readable error report.
    pub fn to_json(&self) -> Value {
        let kind = match self.kind() {
            ErrorKind::Input => "input",
            ErrorKind::Accuracy => "accuracy",
            ErrorKind::Geometry => "geometry",
        };
        let mut body = json!({ "kind": kind, "message": self.to_string() });
        if let Self::Spectral(SpectralError::Accuracy { requested, achievable }) = self {
            body["requested"] = json!(requested);
            body["achievable"] = if achievable.is_finite() { json!(achievable) } else { Value::Null };
        }
        json!({ "error": body })
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn options(cli: &Cli) -> Result<ZetaOptions, CliError> {
    Ok(ZetaOptions::new(cli.tol)?)
}

/// Runs the selected subcommand and returns its report.
pub fn run(cli: &Cli) -> Result<Value, CliError> {
    match &cli.command {
        Command::Lattice(src) => lattice_report(src),
        Command::Involution(src) => involution_report(src),
        Command::Period(src) => period_report(src),
        Command::Zeta(src) => zeta_report(cli, src),
        Command::Tau(args) => tau_report(cli, args),
        Command::Report(args) => norm_report(args),
    }
}

fn lattice_json(l: &Lattice) -> Result<Value, CliError> {
    let det = l.determinant();
    let disc = l.discriminant_info()?;
    Ok(json!({
        "rank": l.rank(),
        "signature": l.signature()?,
        "determinant": det.to_string().parse::<i64>().map_or_else(|_| json!(det.to_string()), |d| json!(d)),
        "unimodular": l.is_unimodular(),
        "discriminant": disc,
    }))
}

fn lattice_report(src: &Source) -> Result<Value, CliError> {
    let lattice = match (&src.input, &src.builtin) {
        (Some(path), _) => read_json::<Lattice>(path)?,
        (None, Some(name)) => build_standard_lattice(name)?,
        (None, None) => build_standard_lattice("K3")?,
    };
    lattice_json(&lattice)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InvolutionInput {
    matrix: IntMatrix,
    /// Gram matrix of the lattice; the K3 lattice when absent.
    #[serde(default)]
    lattice: Option<Lattice>,
}

fn load_involution(src: &Source) -> Result<LatticeIsometry, CliError> {
    match (&src.input, src.builtin.as_deref()) {
        (Some(path), _) => {
            let input: InvolutionInput = read_json(path)?;
            let domain = input.lattice.unwrap_or_else(|| Lattice::standard(StandardLattice::K3));
            let f = LatticeIsometry::new(input.matrix, domain)?;
            if !f.is_involution() {
                return Err(CliError::Input("matrix does not square to the identity".into()));
            }
            Ok(f)
        }
        (None, Some("enriques") | None) => Ok(enriques_involution()),
        (None, Some(other)) => Err(CliError::Input(format!("unknown involution preset `{other}`; known: enriques"))),
    }
}

fn eigenlattice_json(s: &SublatticeBasis) -> Result<Value, CliError> {
    let disc = s.discriminant_info()?;
    Ok(json!({
        "rank": s.rank(),
        "signature": s.signature()?,
        "elementary_divisors": disc.elementary_divisors,
        "a": disc.a_invariant,
        "two_elementary": disc.is_two_elementary,
        "hyperbolic": s.is_hyperbolic_type()?,
        "primitive": s.is_primitive(),
        "basis": s.vectors(),
    }))
}

fn involution_report(src: &Source) -> Result<Value, CliError> {
    let f = load_involution(src)?;
    let plus = eigenlattice(&f, 1)?;
    let minus = eigenlattice(&f, -1)?;
    let disc = plus.discriminant_info()?;
    Ok(json!({
        "r": plus.rank(),
        "a": disc.a_invariant,
        "hyperbolic": plus.is_hyperbolic_type()?,
        "invariant": eigenlattice_json(&plus)?,
        "anti_invariant": eigenlattice_json(&minus)?,
        "ranks_add_up": plus.rank() + minus.rank() == f.domain().rank(),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PeriodInput {
    frame: HKFrame,
    /// Integral involution of the K3 lattice; the Enriques involution when absent.
    #[serde(default)]
    involution: Option<IntMatrix>,
    /// Marking; the identity when absent.
    #[serde(default)]
    marking: Option<IntMatrix>,
    /// Two vectors `[re, im]` in `M^perp` coordinates fixing the component labels.
    #[serde(default)]
    reference: Option<[Vec<f64>; 2]>,
}

fn period_report(src: &Source) -> Result<Value, CliError> {
    let k3 = Lattice::standard(StandardLattice::K3);
    let (frame, f, alpha, reference) = match (&src.input, src.builtin.as_deref()) {
        (Some(path), _) => {
            let input: PeriodInput = read_json(path)?;
            let f = match input.involution {
                Some(m) => LatticeIsometry::new(m, k3.clone())?,
                None => enriques_involution(),
            };
            let alpha = match input.marking {
                Some(m) => LatticeIsometry::new(m, k3.clone())?,
                None => LatticeIsometry::identity(&k3),
            };
            (input.frame, f, alpha, input.reference)
        }
        (None, Some("enriques") | None) => (HKFrame::enriques_model(), enriques_involution(), LatticeIsometry::identity(&k3), None),
        (None, Some(other)) => return Err(CliError::Input(format!("unknown period preset `{other}`; known: enriques"))),
    };
    if !f.is_involution() {
        return Err(CliError::Input("involution matrix does not square to the identity".into()));
    }
    let t = InvolutionAction::from_isometry(&f)?;
    let ctx: Arc<PeriodContext> = PeriodContext::for_sublattice(eigenlattice(&f, 1)?)?;
    let tol = Tolerance::default();
    let pair = period_of(&frame, &t, &alpha, &ctx, tol)?;
    let reference = match reference {
        Some([re, im]) => {
            if re.len() != ctx.rank() || im.len() != ctx.rank() {
                return Err(CliError::Input(format!("reference vectors must have {} coordinates", ctx.rank())));
            }
            [DVector::from_vec(re), DVector::from_vec(im)]
        }
        None => [pair.plus.re().clone(), pair.plus.im().clone()],
    };
    Ok(json!({
        "plus": pair.plus,
        "minus": pair.minus,
        "labels": {
            "plus": component_label(&pair.plus, &reference)?,
            "minus": component_label(&pair.minus, &reference)?,
        },
        "isotropy": { "plus": pair.plus.isotropy_ratio(), "minus": pair.minus.isotropy_ratio() },
        "complement_rank": ctx.rank(),
    }))
}

fn preset_model(name: &str) -> Result<ModelSpec, CliError> {
    match name {
        "s2-antipodal" => Ok(ModelSpec::RoundSphere { radius: 1.0, parity_sign: -1 }),
        "t2-flat" => Ok(ModelSpec::FlatTorus {
            gram: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            character: TorusCharacter::HalfShift(0),
        }),
        other => Err(CliError::Input(format!("unknown spectrum preset `{other}`; known: s2-antipodal, t2-flat"))),
    }
}

fn load_spectrum(cli: &Cli, src: &Source) -> Result<(EquivariantSpectrum, String), CliError> {
    match (&src.input, &src.builtin) {
        (Some(path), _) => Ok((read_json(path)?, path.display().to_string())),
        (None, Some(name)) => {
            let s = build_model_spectrum_for_tolerance(&preset_model(name)?, options(cli)?, cli.max_terms)?;
            Ok((s, format!("builtin:{name}")))
        }
        (None, None) => Err(CliError::Input("give a spectrum file or --builtin".into())),
    }
}

fn spectrum_summary(s: &EquivariantSpectrum, source: &str) -> Value {
    json!({
        "source": source,
        "entries": s.entries().len(),
        "cutoff": if s.cutoff().is_finite() { json!(s.cutoff()) } else { Value::Null },
        "kernel": s.kernel(),
    })
}

fn zeta_report(cli: &Cli, src: &Source) -> Result<Value, CliError> {
    let opts = options(cli)?;
    let (s, source) = load_spectrum(cli, src)?;
    let det = equivariant_determinant(&s, opts)?;
    let torsion = equivariant_torsion(&s, opts)?;
    Ok(json!({
        "spectrum": spectrum_summary(&s, &source),
        "zeta_plus": zeta_signed(&s, 1, opts)?,
        "zeta_minus": zeta_signed(&s, -1, opts)?,
        "determinant": { "value": det.value, "log_value": det.log_value, "error_estimate": det.error_estimate },
        "torsion": torsion,
        "dolbeault": {
            "q0": dolbeault_zeta(&s, 0, opts)?,
            "q1": dolbeault_zeta(&s, 1, opts)?,
            "q2": dolbeault_zeta(&s, 2, opts)?,
        },
        "tolerance": opts.tol,
    }))
}

fn tau_report(cli: &Cli, args: &TauArgs) -> Result<Value, CliError> {
    let opts = options(cli)?;
    let (s, source) = load_spectrum(cli, &args.source)?;
    let curves: Option<CurveData> = args.curves.as_deref().map(read_json).transpose()?;
    let report = tau_iota(&s, curves.as_ref(), opts)?;
    let mut out = json!({
        "spectrum": spectrum_summary(&s, &source),
        "tau": report.tau,
        "log_tau": report.log_tau,
        "error_estimate": report.error_estimate,
        "determinant": { "value": report.determinant.value, "log_value": report.determinant.log_value,
                         "error_estimate": report.determinant.error_estimate },
        "curves": report.curves,
        "tolerance": opts.tol,
    });
    if curves.is_none() {
        // without fixed curves tau is the equivariant torsion itself
        let torsion = equivariant_torsion(&s, opts)?;
        out["torsion_check"] = json!({
            "torsion": torsion.tau,
            "log_difference": report.log_tau - torsion.log_tau,
            "combined_error": torsion.combined_error + report.error_estimate,
        });
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormInput {
    tau: f64,
    #[serde(default = "one")]
    nu: u32,
    #[serde(default)]
    constant: Option<f64>,
}

fn one() -> u32 {
    1
}

fn norm_report(args: &ReportArgs) -> Result<Value, CliError> {
    let input = match (&args.input, args.tau) {
        (Some(path), _) => read_json::<NormInput>(path)?,
        (None, Some(tau)) => NormInput { tau, nu: args.nu, constant: args.constant },
        (None, None) => return Err(CliError::Input("give --tau or an input file".into())),
    };
    serde_json::to_value(borcherds_report(input.tau, input.nu, input.constant)?)
        .map_err(|e| CliError::Input(e.to_string()))
}

/// Parses arguments, runs, writes the report and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = if cli.tol > 0.0 && cli.tol.is_finite() {
        run(&cli)
    } else {
        Err(CliError::Input(format!("--tol must be positive, got {}", cli.tol)))
    };
    match result {
        Ok(report) => {
            let text = json::canonical(&report);
            match &cli.out {
                Some(path) => match std::fs::write(path, text) {
                    Ok(()) => 0,
                    Err(source) => {
                        let e = CliError::Io { path: path.clone(), source };
                        eprint!("{}", json::canonical(&e.to_json()));
                        e.exit_code()
                    }
                },
                None => {
                    print!("{text}");
                    0
                }
            }
        }
        Err(e) => {
            eprint!("{}", json::canonical(&e.to_json()));
            e.exit_code()
        }
    }
}

//! `loftgen` command line.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage error, 3 provider
//! error.

use std::ffi::OsString;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use loftgen_core::expr::{extract_payload_detailed, PayloadKind};
use loftgen_core::genloop::{describe_preset, DesignSession, FailureReason, SessionConfig, SessionMode, SessionState};
use loftgen_core::geom::{
    export_obj, loft, parse_points, validate_section, Axis, ClosedSection, Degree, Mesh, Ring, SectionConstraints,
    SectionPlane,
};
use loftgen_core::llm::{ChatProvider, ProviderConfig};
use loftgen_core::prompt::Catalog;
use loftgen_core::scene::{build_room, repair_loop, scene_to_mesh, to_script, AttemptOutcome, RepairState, RoomParams};
use serde::Serialize;

use crate::api::{self, ServiceConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PROVIDER: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "loftgen", version, about = "Prompt-driven section lofting and scene repair")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a generation session headless.
    Generate(GenerateArgs),
    /// Validate a coordinates file; prints the report as JSON.
    Validate(ValidateArgs),
    /// Loft coordinate files (one section each) into an OBJ.
    Loft(LoftArgs),
    /// Run the scene generate/execute/repair loop.
    Repair(RepairArgs),
    /// Build a one-room scene.
    Room(RoomArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProviderChoice {
    Mock,
    Http,
}

#[derive(Debug, Clone, Args)]
pub struct ProviderArgs {
    #[arg(long, value_enum, default_value = "mock")]
    pub provider: ProviderChoice,
    /// JSON list of `{reply, expect?}` entries for the mock provider.
    #[arg(long, value_name = "PATH")]
    pub mock_script: Option<PathBuf>,
    /// Chat-completions URL for the http provider.
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// Name of the environment variable holding the API key.
    #[arg(long, value_name = "VAR", default_value = "LOFTGEN_API_KEY")]
    pub api_key_env: String,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    #[arg(long, default_value_t = 2)]
    pub max_retries: u32,
}

impl ProviderArgs {
    pub fn config(&self) -> Result<ProviderConfig, String> {
        let mut config = match self.provider {
            ProviderChoice::Mock => {
                let path = self.mock_script.as_ref().ok_or("--provider mock needs --mock-script")?;
                ProviderConfig::mock(path)
            }
            ProviderChoice::Http => {
                let endpoint = self.endpoint.as_ref().ok_or("--provider http needs --endpoint")?;
                ProviderConfig::http(endpoint, &self.api_key_env)
            }
        };
        config.model_name = self.model.clone();
        config.timeout = self.timeout;
        config.max_retries = self.max_retries;
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    CoordinateSections,
    EquationProfile,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "coordinate-sections")]
    pub mode: ModeArg,
    /// Sections to accept before lofting.
    #[arg(long)]
    pub sections: Option<usize>,
    /// Seconds between requests.
    #[arg(long)]
    pub interval: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<u64>,
    /// Interpolation degree: 0 (polyline) or 3 (closed cubic).
    #[arg(long, value_parser = parse_degree)]
    pub degree: Option<Degree>,
    /// Radius of the circle every section must contain.
    #[arg(long)]
    pub inner_radius: Option<f64>,
    /// Radius the section centroid must stay within.
    #[arg(long)]
    pub center_bound: Option<f64>,
    /// Shape description for equation sessions: placid or drastic.
    #[arg(long)]
    pub preset: Option<String>,
    /// JSON session config to start from.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub provider: ProviderArgs,
    #[arg(long, value_name = "PATH.obj")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "PATH.jsonl")]
    pub transcript: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SectionArgs {
    /// Axis normal to the section plane.
    #[arg(long, value_parser = parse_axis, default_value = "y")]
    pub axis: Axis,
    #[arg(long, value_parser = parse_degree, default_value = "0")]
    pub degree: Degree,
    #[arg(long, default_value_t = 8)]
    pub samples_per_span: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub section: SectionArgs,
    /// Also require convexity.
    #[arg(long)]
    pub convex: bool,
    #[arg(long)]
    pub inner_radius: Option<f64>,
    #[arg(long)]
    pub center_bound: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct LoftArgs {
    #[arg(required = true, num_args = 2..)]
    pub files: Vec<PathBuf>,
    #[command(flatten)]
    pub section: SectionArgs,
    /// Leave the ends open.
    #[arg(long)]
    pub no_caps: bool,
    #[arg(long, value_name = "PATH.obj")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RepairArgs {
    #[arg(long)]
    pub prompt: String,
    #[arg(long, default_value_t = 5)]
    pub budget: u32,
    #[command(flatten)]
    pub provider: ProviderArgs,
    #[arg(long, value_name = "PATH.obj")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RoomArgs {
    pub length: f64,
    pub width: f64,
    pub wall_height: f64,
    pub wall_thickness: f64,
    pub window_width: f64,
    pub window_height: f64,
    pub door_width: f64,
    pub door_height: f64,
    #[arg(default_value_t = 0.0)]
    pub level: f64,
    #[arg(long, value_name = "PATH.obj")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    /// Origin allowed to call the API from a browser; repeatable.
    #[arg(long, value_name = "ORIGIN")]
    pub allow_origin: Vec<String>,
    /// Directory for transcript JSONL files.
    #[arg(long, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
    #[command(flatten)]
    pub provider: ProviderArgs,
}

fn parse_degree(s: &str) -> Result<Degree, String> {
    let n: u32 = s.parse().map_err(|_| format!("{s:?} is not a degree"))?;
    Degree::try_from(n).map_err(|e| e.to_string())
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    match s {
        "x" => Ok(Axis::X),
        "y" => Ok(Axis::Y),
        "z" => Ok(Axis::Z),
        _ => Err(format!("axis must be x, y or z, got {s:?}")),
    }
}

/// A failed command: message for stderr plus exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INVALID, message: message.into() }
}

fn provider_failure(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_PROVIDER, message: message.into() }
}

fn print_json(value: &impl Serialize) {
    use std::io::Write;
    // a closed stdout (`| head`) is not worth a panic
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn write_obj(path: &Path, mesh: &Mesh) -> Result<(), Failure> {
    let obj = export_obj(mesh).map_err(|e| invalid(e.to_string()))?;
    fs::write(path, obj).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// Reads one section: the coordinate payload of the file, in the plane
/// normal to `axis` through its first point, sampled at `degree`.
pub fn read_section(path: &Path, args: &SectionArgs) -> Result<Ring, Failure> {
    let text = read_text(path)?;
    let fail = |e: &dyn std::fmt::Display| invalid(format!("{}: {e}", path.display()));
    let payload = extract_payload_detailed(&text, PayloadKind::Coordinates).map_err(|e| fail(&e))?.payload;
    let points = parse_points(&payload, None).map_err(|e| fail(&e))?;
    let first = *points.first().ok_or_else(|| fail(&"no points"))?;
    let plane = SectionPlane::new(args.axis, args.axis.of(first));
    let section = ClosedSection::new(points, args.degree, plane).map_err(|e| fail(&e))?;
    section.sample(args.samples_per_span).map_err(|e| fail(&e))
}

fn provider(args: &ProviderArgs) -> Result<std::sync::Arc<dyn ChatProvider>, Failure> {
    let config = args.config().map_err(usage)?;
    config.build().map_err(|e| usage(e.to_string()))
}

fn session_config(args: &GenerateArgs) -> Result<SessionConfig, Failure> {
    let mut config = match &args.config {
        Some(path) => serde_json::from_str(&read_text(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => match args.mode {
            ModeArg::CoordinateSections => SessionConfig::coordinate_sections(),
            ModeArg::EquationProfile => SessionConfig::equation_profile(),
        },
    };
    if args.config.is_some() {
        config.mode = match args.mode {
            ModeArg::CoordinateSections => SessionMode::CoordinateSections,
            ModeArg::EquationProfile => SessionMode::EquationProfile,
        };
    }
    if let Some(n) = args.sections {
        config.sections_target = n;
    }
    if let Some(s) = args.interval {
        config.trigger_interval = s;
    }
    if let Some(n) = args.max_iterations {
        config.max_iterations = n;
    }
    if let Some(d) = args.degree {
        config.degree = d;
    }
    if let Some(r) = args.inner_radius {
        config.constraints.inner_circle_radius = Some(r);
    }
    if let Some(r) = args.center_bound {
        config.constraints.center_bound_radius = Some(r);
    }
    if let Some(name) = &args.preset {
        config.base_prompt = Some(describe_preset(name).map_err(|e| usage(e.to_string()))?.to_string());
    }
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}

fn generate(args: &GenerateArgs) -> Result<(), Failure> {
    let config = session_config(args)?;
    let mut session = DesignSession::new("cli", config, Catalog::builtin(), provider(&args.provider)?)
        .map_err(|e| usage(e.to_string()))?;
    let state = session
        .run_to_completion(&Default::default(), |record, _| {
            let defects: Vec<&str> = record.defects.iter().map(|d| d.as_str()).collect();
            eprintln!(
                "iteration {}: {:?} [{}]{}",
                record.iteration,
                record.outcome,
                defects.join(", "),
                if record.added_clauses.is_empty() { String::new() } else { format!(" +{}", record.added_clauses.join(" +")) }
            );
        })
        .map_err(|e| provider_failure(e.to_string()))?;
    if let Some(path) = &args.transcript {
        session.transcript().save(path).map_err(|e| usage(e.to_string()))?;
    }
    print_json(&session.snapshot());
    match state {
        SessionState::Complete => {
            if let Some(path) = &args.out {
                let mesh = session.assemble_model().map_err(|e| invalid(e.to_string()))?;
                write_obj(path, &mesh)?;
            }
            Ok(())
        }
        SessionState::Failed(FailureReason::ProviderError) => Err(provider_failure("the provider failed")),
        other => Err(invalid(format!("session ended {other}"))),
    }
}

fn validate(args: &ValidateArgs) -> Result<(), Failure> {
    let ring = read_section(&args.file, &args.section)?;
    let constraints = SectionConstraints {
        require_convex: args.convex,
        inner_circle_radius: args.inner_radius,
        center_bound_radius: args.center_bound,
        ..SectionConstraints::default()
    };
    constraints.check().map_err(|e| usage(e.to_string()))?;
    let report = validate_section(&ring, &constraints);
    print_json(&report);
    if report.passed {
        Ok(())
    } else {
        let codes: Vec<&str> = report.codes().iter().map(|c| c.as_str()).collect();
        Err(invalid(format!("section fails: {}", codes.join(", "))))
    }
}

fn loft_files(args: &LoftArgs) -> Result<(), Failure> {
    let rings = args.files.iter().map(|f| read_section(f, &args.section)).collect::<Result<Vec<_>, _>>()?;
    let mesh = loft(&rings, !args.no_caps).map_err(|e| invalid(e.to_string()))?;
    write_obj(&args.out, &mesh)?;
    print_json(&mesh.check());
    Ok(())
}

fn repair(args: &RepairArgs) -> Result<(), Failure> {
    if args.budget < 1 {
        return Err(usage("--budget must be ≥ 1"));
    }
    let session = repair_loop("cli", args.prompt.clone(), provider(&args.provider)?, args.budget)
        .map_err(|e| provider_failure(e.to_string()))?;
    for attempt in session.attempts() {
        match &attempt.outcome {
            AttemptOutcome::Scene(_) => eprintln!("attempt {}: scene built", attempt.attempt),
            AttemptOutcome::Error(e) => eprintln!("attempt {}: {e}", attempt.attempt),
        }
    }
    print_json(&session.snapshot());
    match (session.state(), session.scene()) {
        (RepairState::Converged, Some(scene)) => {
            if let Some(path) = &args.out {
                write_obj(path, &scene_to_mesh(scene).map_err(|e| invalid(e.to_string()))?)?;
            }
            Ok(())
        }
        _ => Err(invalid(format!("no valid scene after {} attempts", session.attempts().len()))),
    }
}

fn room(args: &RoomArgs) -> Result<(), Failure> {
    let params = RoomParams::new(
        args.length,
        args.width,
        args.wall_height,
        args.wall_thickness,
        args.window_width,
        args.window_height,
        args.door_width,
        args.door_height,
        args.level,
    );
    let scene = build_room(&params).map_err(|e| invalid(format!("{}: {e}", e.code())))?;
    let _ = std::io::Write::write_all(&mut std::io::stdout(), to_script(&scene).as_bytes());
    if let Some(path) = &args.out {
        write_obj(path, &scene_to_mesh(&scene).map_err(|e| invalid(e.to_string()))?)?;
    }
    Ok(())
}

fn serve(args: &ServeArgs) -> Result<(), Failure> {
    let config = ServiceConfig {
        provider: args.provider.config().map_err(usage)?,
        data_dir: args.data_dir.clone(),
        allow_origins: args.allow_origin.clone(),
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| usage(e.to_string()))?;
    runtime.block_on(api::serve(args.bind, config)).map_err(|e| usage(format!("cannot serve on {}: {e}", args.bind)))
}

pub fn execute(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Validate(a) => validate(a),
        Command::Loft(a) => loft_files(a),
        Command::Repair(a) => repair(a),
        Command::Room(a) => room(a),
        Command::Serve(a) => serve(a),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("loftgen: {}", f.message);
            f.code
        }
    }
}

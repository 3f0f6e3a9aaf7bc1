use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use decomate_core::codegen::{emit_preview_html, write_bundle, AnimationBundle, BundleManifest};
use decomate_core::grouping::GroupingSpec;
use decomate_core::llm::{
    build_transport, LiveTransport, RecordingTransport, RepairError, Transport, TransportConfig, TransportError,
    TransportMode, DEFAULT_API_KEY_ENV, DEFAULT_ENDPOINT, DEFAULT_MODEL,
};
use decomate_core::motion::DslError;
use decomate_core::pipeline::{self, Pipeline, PipelineError};

const EXIT_INPUT: u8 = 2;
const EXIT_TRANSPORT: u8 = 3;
const EXIT_VALIDATION: u8 = 4;
const EXIT_OTHER: u8 = 1;

#[derive(Parser)]
#[command(name = "decomate", about = "Decompose SVGs into animatable parts and compile motion to HTML/CSS/JS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Group a drawing into semantic parts; writes grouped.svg and grouping.json.
    Decompose(DecomposeArgs),
    /// Compile motion for a grouped drawing; writes the bundle files.
    Animate(AnimateArgs),
    /// Inline a bundle directory into preview.html and print its path.
    Preview { dir: PathBuf },
    /// Run a step against the live model and save its responses as replay fixtures.
    RecordFixture {
        #[command(subcommand)]
        step: RecordStep,
    },
}

#[derive(Subcommand)]
enum RecordStep {
    Decompose(DecomposeArgs),
    Animate(AnimateArgs),
}

#[derive(Args, Clone)]
struct TransportArgs {
    /// replay (default), live, or scripted.
    #[arg(long, default_value = "replay")]
    transport: TransportMode,
    #[arg(long = "fixtures", env = "DECOMATE_FIXTURE_DIR", default_value = "fixtures/llm")]
    fixture_dir: PathBuf,
    /// JSON array of responses for the scripted transport.
    #[arg(long)]
    script: Option<PathBuf>,
    /// Environment variable holding the API key for live calls.
    #[arg(long, env = "DECOMATE_API_KEY_ENV", default_value = DEFAULT_API_KEY_ENV)]
    api_key_env: String,
    #[arg(long, env = "DECOMATE_ENDPOINT", default_value = DEFAULT_ENDPOINT)]
    endpoint: String,
    #[arg(long, env = "DECOMATE_MODEL", default_value = DEFAULT_MODEL)]
    model: String,
}

#[derive(Args, Clone)]
struct DecomposeArgs {
    input: PathBuf,
    #[arg(long)]
    object: String,
    /// Natural-language feedback applied after decomposition, in order.
    #[arg(long)]
    refine: Vec<String>,
    /// Output directory; defaults to $DECOMATE_DATA_DIR/out.
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
    #[command(flatten)]
    transport: TransportArgs,
}

#[derive(Args, Clone)]
struct AnimateArgs {
    grouped: PathBuf,
    #[arg(long)]
    grouping: PathBuf,
    /// Motion DSL file; no model call is made.
    #[arg(long, conflicts_with_all = ["prompt", "group_prompt"])]
    dsl: Option<PathBuf>,
    /// Instruction for the whole drawing.
    #[arg(long)]
    prompt: Option<String>,
    /// Instruction for one group, as GROUP=TEXT. Repeatable.
    #[arg(long = "group-prompt", value_parser = parse_group_prompt)]
    group_prompt: Vec<(String, String)>,
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
    #[command(flatten)]
    transport: TransportArgs,
}

fn parse_group_prompt(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(g, t)| (g.trim().to_string(), t.trim().to_string()))
        .ok_or_else(|| "expected GROUP=TEXT".to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn out_dir(out: &Option<PathBuf>) -> PathBuf {
    out.clone().unwrap_or_else(|| {
        std::env::var_os("DECOMATE_DATA_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
            .join("out")
    })
}

fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, text: &str) -> Outcome {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Failure::new(EXIT_OTHER, format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Failure::new(EXIT_OTHER, format!("cannot write {}: {e}", path.display())))
}

fn transport_failure(e: &TransportError, fixture_dir: &Path) -> Failure {
    let message = match e {
        TransportError::FixtureMissing(digest) => format!(
            "{e}\nrecord it with `decomate record-fixture ...` or save the response text to {}",
            fixture_dir.join(format!("{digest}.txt")).display()
        ),
        other => other.to_string(),
    };
    Failure::new(EXIT_TRANSPORT, message)
}

fn pipeline_failure(e: PipelineError, fixture_dir: &Path) -> Failure {
    match e {
        PipelineError::Svg(e) => Failure::new(EXIT_INPUT, format!("svg: {e}")),
        PipelineError::Dsl(DslError::Parse(p)) => Failure::new(EXIT_INPUT, format!("motion dsl: {p}")),
        PipelineError::Llm(RepairError::Transport(t)) => transport_failure(&t, fixture_dir),
        PipelineError::Dsl(DslError::Invalid(report)) => {
            let lines: Vec<String> = report.errors().map(|i| format!("{}: {}", i.code, i.message)).collect();
            Failure::new(EXIT_VALIDATION, format!("motion failed validation:\n{}", lines.join("\n")))
        }
        PipelineError::EmptyFeedback | PipelineError::EmptyPrompt => Failure::new(EXIT_INPUT, e.to_string()),
        other => Failure::new(EXIT_VALIDATION, other.to_string()),
    }
}

fn transport_for(args: &TransportArgs, record: bool) -> Result<Arc<dyn Transport>, Failure> {
    let script = match &args.script {
        Some(path) => serde_json::from_str::<Vec<String>>(&read_input(path)?)
            .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: expected a JSON array of strings: {e}", path.display())))?,
        None => Vec::new(),
    };
    let cfg = TransportConfig {
        mode: if record { TransportMode::Live } else { args.transport },
        endpoint_url: args.endpoint.clone(),
        api_key_env_name: args.api_key_env.clone(),
        model: args.model.clone(),
        fixture_dir: Some(args.fixture_dir.clone()),
        script,
        ..TransportConfig::default()
    };
    if record {
        let live = LiveTransport::from_config(&cfg).map_err(|e| transport_failure(&e, &args.fixture_dir))?;
        return Ok(Arc::new(RecordingTransport::new(live, args.fixture_dir.clone())));
    }
    build_transport(&cfg)
        .map(Arc::from)
        .map_err(|e| transport_failure(&e, &args.fixture_dir))
}

fn decompose(args: &DecomposeArgs, record: bool) -> Outcome {
    let fixtures = &args.transport.fixture_dir;
    let svg = read_input(&args.input)?;
    let flat = pipeline::load_flat(&svg).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", args.input.display())))?;
    let p = Pipeline::new(transport_for(&args.transport, record)?);
    let mut outcome = p.decompose(&flat, &args.object).map_err(|e| pipeline_failure(e, fixtures))?;
    for feedback in &args.refine {
        outcome = p
            .refine(&flat, &args.object, &outcome.grouping, feedback)
            .map_err(|e| pipeline_failure(e, fixtures))?;
    }
    let dir = out_dir(&args.out);
    write_output(&dir.join("grouped.svg"), &outcome.grouped_svg)?;
    let json = serde_json::to_string_pretty(&outcome.grouping).map_err(|e| Failure::new(EXIT_OTHER, e.to_string()))?;
    write_output(&dir.join("grouping.json"), &(json + "\n"))?;
    eprintln!(
        "decomate: {} groups ({}) written to {}",
        outcome.grouping.groups.len(),
        outcome.grouping.group_names().join(", "),
        dir.display()
    );
    Ok(())
}

fn animate(args: &AnimateArgs, record: bool) -> Outcome {
    let fixtures = &args.transport.fixture_dir;
    let grouping_text = read_input(&args.grouping)?;
    let grouping: GroupingSpec = serde_json::from_str(&grouping_text)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", args.grouping.display())))?;
    let grouped_text = read_input(&args.grouped)?;
    let grouped = pipeline::load_grouped(&grouped_text, &grouping).map_err(|e| match e {
        PipelineError::Svg(e) => Failure::new(EXIT_INPUT, format!("{}: {e}", args.grouped.display())),
        other => Failure::new(EXIT_VALIDATION, format!("{} does not match the grouping: {other}", args.grouped.display())),
    })?;

    let outcome = match &args.dsl {
        Some(path) => {
            let dsl = read_input(path)?;
            pipeline::animate_dsl(&grouped, &grouping, &dsl).map_err(|e| {
                let f = pipeline_failure(e, fixtures);
                Failure::new(f.code, format!("{}: {}", path.display(), f.message))
            })?
        }
        None => {
            let prompts: BTreeMap<String, String> = args.group_prompt.iter().cloned().collect();
            Pipeline::new(transport_for(&args.transport, record)?)
                .animate_prompts(&grouped, &grouping, &prompts, args.prompt.as_deref(), None)
                .map_err(|e| pipeline_failure(e, fixtures))?
        }
    };
    let dir = out_dir(&args.out);
    write_bundle(&outcome.bundle, &dir).map_err(|e| Failure::new(EXIT_OTHER, format!("{}: {e}", dir.display())))?;
    eprintln!(
        "decomate: {} tracks on {} groups written to {}",
        outcome.motion.tracks.len(),
        outcome.bundle.manifest.groups.len(),
        dir.display()
    );
    Ok(())
}

fn preview(dir: &Path) -> Outcome {
    let read = |name: &str| read_input(&dir.join(name));
    let manifest: BundleManifest = serde_json::from_str(&read("manifest.json")?)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", dir.join("manifest.json").display())))?;
    let bundle = AnimationBundle {
        html: read("index.html")?,
        css: read("style.css")?,
        js: read("anim.js")?,
        manifest,
    };
    let path = dir.join("preview.html");
    write_output(&path, &emit_preview_html(&bundle))?;
    println!("{}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Decompose(a) => decompose(a, false),
        Command::Animate(a) => {
            if a.dsl.is_none() && a.prompt.is_none() && a.group_prompt.is_empty() {
                Err(Failure::new(EXIT_INPUT, "animate needs --dsl FILE, --prompt TEXT, or --group-prompt GROUP=TEXT"))
            } else {
                animate(a, false)
            }
        }
        Command::Preview { dir } => preview(dir),
        Command::RecordFixture { step } => match step {
            RecordStep::Decompose(a) => decompose(a, true),
            RecordStep::Animate(a) => animate(a, true),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("decomate: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

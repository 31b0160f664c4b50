use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use seora::document::Format;
use seora::engine::{config_from_env, Analyzer, RuleConfig, SuppressionScope};
use seora::report::{exit_code, render, render_rules, FailOn, OutputFormat};
use seora::service::Service;

#[derive(Parser)]
#[command(name = "seora", version, about = "Design-rule analyzer for OpenAPI 3.1 descriptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FailOnArg {
    High,
    Medium,
    Low,
    None,
}

impl From<FailOnArg> for FailOn {
    fn from(f: FailOnArg) -> Self {
        match f {
            FailOnArg::High => FailOn::High,
            FailOnArg::Medium => FailOn::Medium,
            FailOnArg::Low => FailOn::Low,
            FailOnArg::None => FailOn::None,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one spec and exit 1 if anything at or above --fail-on is found.
    Check {
        spec: PathBuf,
        /// Config file (YAML or JSON); falls back to $SEORA_CONFIG.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long, value_enum, default_value = "high")]
        fail_on: FailOnArg,
        /// Disable a rule globally.
        #[arg(long, value_name = "RULE-ID")]
        disable: Vec<String>,
        /// Enable a rule the config disables globally.
        #[arg(long, value_name = "RULE-ID")]
        enable: Vec<String>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// ANSI colors in text output.
        #[arg(long)]
        color: bool,
    },
    /// Print the rule reference.
    Rules {
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Print the URI tree of a spec as JSON.
    Tree { spec: PathBuf },
    /// Run the governance service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Snapshot file restored at startup and rewritten on every change.
        #[arg(long)]
        state: Option<PathBuf>,
    },
}

type Failure = String;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check {
            spec,
            config,
            format,
            fail_on,
            disable,
            enable,
            out,
            color,
        } => check(&spec, config.as_deref(), format.into(), fail_on.into(), &disable, &enable, out.as_deref(), color),
        Command::Rules { format } => print(&render_rules(&catalog_metadata(), format.into()).body).map(|_| 0),
        Command::Tree { spec } => tree(&spec),
        Command::Serve { port, host, state } => serve(SocketAddr::new(host, port), state),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("seora: {message}");
            ExitCode::from(2)
        }
    }
}

fn catalog_metadata() -> Vec<seora::catalog::RuleMetadata> {
    seora::catalog::catalog().metadata().cloned().collect()
}

fn print(bytes: &[u8]) -> Result<(), Failure> {
    use std::io::Write;
    std::io::stdout().write_all(bytes).map_err(|e| e.to_string())
}

fn read_spec(path: &Path) -> Result<(String, Vec<u8>, Option<Format>), Failure> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((path.display().to_string(), bytes, Format::from_path(path)))
}

fn load_config(path: Option<&Path>) -> Result<RuleConfig, Failure> {
    let config = match path {
        Some(path) => RuleConfig::from_path(path),
        None => config_from_env().unwrap_or_else(|| Ok(RuleConfig::default())),
    };
    config.map_err(|e| format!("config: {e}"))
}

#[allow(clippy::too_many_arguments)]
fn check(
    spec: &Path,
    config: Option<&Path>,
    format: OutputFormat,
    fail_on: FailOn,
    disable: &[String],
    enable: &[String],
    out: Option<&Path>,
    color: bool,
) -> Result<u8, Failure> {
    let mut config = load_config(config)?;
    let catalog = seora::engine::catalog_for(&config).map_err(|e| format!("config: {e}"))?;
    for (ids, enabled) in [(enable, true), (disable, false)] {
        for id in ids {
            let scope = SuppressionScope::Global { rule_id: id.clone() };
            config.set_rule_state(&catalog, &scope, enabled).map_err(|e| e.to_string())?;
        }
    }
    let analyzer = Analyzer::new(config).map_err(|e| format!("config: {e}"))?;
    let (name, bytes, hint) = read_spec(spec)?;
    let analysis = analyzer.analyze(&name, &bytes, hint).map_err(|e| e.to_string())?;
    for warning in &analysis.spec.warnings {
        eprintln!("{warning}");
    }
    let rendered = render(&analysis.report, format, color);
    match out {
        Some(path) => std::fs::write(path, &rendered.body).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print(&rendered.body)?,
    }
    Ok(exit_code(&analysis.report, fail_on) as u8)
}

fn tree(spec: &Path) -> Result<u8, Failure> {
    let (name, bytes, hint) = read_spec(spec)?;
    let prepared = seora::engine::prepare(&name, &bytes, hint).map_err(|diags| {
        diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
    })?;
    print(prepared.tree.export_json().as_bytes())?;
    Ok(0)
}

fn serve(addr: SocketAddr, state: Option<PathBuf>) -> Result<u8, Failure> {
    let mut service = Service::new();
    if let Some(path) = state {
        service = service.with_state(path).map_err(|e| e.to_string())?;
    }
    let service = Arc::new(service);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| format!("{addr}: {e}"))?;
        eprintln!("seora: listening on http://{}", listener.local_addr().map_err(|e| e.to_string())?);
        seora::service::serve(service, listener).await.map_err(|e| e.to_string())
    })?;
    Ok(0)
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fermi_absorption::output::{serialize_file, serialize_lines};
use fermi_absorption::scenario::{preset, Broadening, Format, GridChoice, ScenarioConfig, PRESET_NAMES};
use fermi_absorption::{run_scenario, Error, Result};

#[derive(Parser)]
#[command(name = "fermi-absorption", version, about = "Absorption lineshapes of trapped Fermi gases")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file (run) or directory (preset); stdout when omitted for run.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Overrides the Monte Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the grid, "min:max:points" or "auto".
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,

    /// Overrides the broadening, "kernel:width".
    #[arg(long, global = true)]
    broaden: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Runs a scenario file.
    Run { config: PathBuf },
    /// Runs a built-in figure preset.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        name: String,
    },
    /// Checks a scenario file without running it.
    Validate { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn load(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config {
        field: "<file>".into(),
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    ScenarioConfig::from_toml_str(&text)
}

fn apply_overrides(cli: &Cli, cfg: &mut ScenarioConfig) -> Result<()> {
    if let Some(f) = cli.format {
        cfg.format = f.into();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(g) = &cli.grid {
        cfg.grid = GridChoice::parse(g).map_err(|message| Error::Config {
            field: "--grid".into(),
            message,
        })?;
    }
    if let Some(b) = &cli.broaden {
        cfg.broaden = Some(Broadening::parse(b).map_err(|message| Error::Config {
            field: "--broaden".into(),
            message,
        })?);
    }
    cfg.validate()
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, bytes)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.lines.csv"))
}

fn run_one(cfg: &ScenarioConfig, target: Option<&Path>) -> Result<()> {
    let file = run_scenario(cfg)?;
    let bytes = serialize_file(&file, cfg.format);
    match target {
        Some(path) => {
            write_bytes(path, &bytes)?;
            if let Some(lines) = &file.lines {
                write_bytes(&sidecar_path(path), &serialize_lines(lines))?;
            }
        }
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Validate { config } => {
            let mut cfg = load(config)?;
            apply_overrides(cli, &mut cfg)?;
            println!("{}: ok ({} route)", config.display(), cfg.route.name());
            Ok(())
        }
        Command::Run { config } => {
            let mut cfg = load(config)?;
            apply_overrides(cli, &mut cfg)?;
            let target = cli.out.clone().or_else(|| cfg.output.clone());
            run_one(&cfg, target.as_deref())
        }
        Command::Preset { name } => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            for (label, mut cfg) in preset(name)? {
                apply_overrides(cli, &mut cfg)?;
                let path = dir.join(format!("{label}.{}", cfg.format.extension()));
                run_one(&cfg, Some(&path))?;
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use subspec_cli::commands;
use subspec_cli::config::{ConfigError, ExperimentConfig, FlowSpec, MeasureSpec};

#[derive(Parser)]
#[command(name = "subspec", version, about = "Spectral experiments for subordinated composition semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral region of a flow's generator, or of C_{φ_t} with --t
    Region(Common),
    /// σ_min grid of an operator compression, with SVG contours
    Pseudospectrum(Common),
    /// Matrix of the subordinated operator for --flow and --measure
    Subordinate(Common),
    /// Local spectral radius trace ‖Aⁿx‖^{1/n}
    Localradius(Common),
    /// Run a verification suite and emit its report
    Verify {
        /// Suite name (same as --suite)
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Default)]
struct Common {
    /// Flow name: affine, hyp-auto, para-auto, elliptic-rot, elliptic-pow
    #[arg(long)]
    flow: Option<String>,
    /// Hardy space exponent
    #[arg(long)]
    p: Option<f64>,
    /// Semigroup time
    #[arg(long)]
    t: Option<f64>,
    /// Truncation order
    #[arg(long = "N")]
    order: Option<usize>,
    /// dirac:T, exp:RE[,IM], gamma:P,RE[,IM], inline JSON or a JSON file
    #[arg(long, allow_hyphen_values = true)]
    measure: Option<String>,
    /// x0,x1,y0,y1
    #[arg(long = "box", allow_hyphen_values = true)]
    bounds: Option<String>,
    /// nx,ny
    #[arg(long)]
    res: Option<String>,
    #[arg(long)]
    suite: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON experiment config; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// cesaro, identity, composition or subordinated
    #[arg(long)]
    operator: Option<String>,
    /// Starting vector: e<k> or ones
    #[arg(long)]
    x: Option<String>,
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    /// Pseudospectral level
    #[arg(long)]
    eps: Option<f64>,
}

fn list<T: std::str::FromStr, const K: usize>(flag: &str, s: &str) -> Result<[T; K], ConfigError> {
    let parts: Vec<T> = s
        .split(',')
        .map(|x| x.trim().parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| ConfigError(format!("--{flag} {s:?}: expected {K} comma-separated numbers")))?;
    parts
        .try_into()
        .map_err(|_| ConfigError(format!("--{flag} {s:?}: expected {K} comma-separated numbers")))
}

impl Common {
    fn merge(self, suite: Option<String>) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(f) = self.flow {
            cfg.flow = Some(FlowSpec::Name(f));
        }
        if let Some(m) = &self.measure {
            cfg.measure = Some(MeasureSpec::parse(m)?);
        }
        if let Some(b) = &self.bounds {
            cfg.bounds = Some(list::<f64, 4>("box", b)?);
        }
        if let Some(r) = &self.res {
            cfg.res = Some(list::<usize, 2>("res", r)?);
        }
        cfg.order = self.order.or(cfg.order);
        cfg.p = self.p.or(cfg.p);
        cfg.t = self.t.or(cfg.t);
        cfg.suite = suite.or(self.suite).or(cfg.suite);
        cfg.out = self.out.or(cfg.out);
        cfg.operator = self.operator.or(cfg.operator);
        cfg.x = self.x.or(cfg.x);
        cfg.n_max = self.n_max.or(cfg.n_max);
        cfg.eps = self.eps.or(cfg.eps);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn env_usize(name: &str) -> Result<Option<u64>, ConfigError> {
    match std::env::var(name) {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| ConfigError(format!("{name}={v:?} is not a nonnegative integer"))),
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    if let Some(n) = env_usize("SUBSPEC_THREADS")? {
        if n == 0 {
            return Err(ConfigError("SUBSPEC_THREADS must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global()?;
    }
    let seed = env_usize("SUBSPEC_SEED")?.unwrap_or(0);
    match cli.command {
        Command::Region(c) => commands::region(&c.merge(None)?),
        Command::Pseudospectrum(c) => commands::pseudospectrum(&c.merge(None)?),
        Command::Subordinate(c) => commands::subordinate(&c.merge(None)?),
        Command::Localradius(c) => commands::localradius(&c.merge(None)?),
        Command::Verify { name, common } => commands::verify(&common.merge(name)?, seed),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

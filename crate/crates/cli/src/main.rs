use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jd_core::diagram::enumerate::Constraints;
use jd_core::diagram::json::{from_json_str, parse_diagram, parse_vector, vector_to_string, DiagramJson};
use jd_core::lab::{Report, TreeIndex, Verdict, WeightSystem};
use jd_core::run::{DimsReport, OutputFormat, RunConfig, Runner, Suite};
use jd_core::{ContextSpec, DiagramVector, Error, RelationSet, Skeleton};

const EXIT_VERIFY: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "jd", version, about = "Exact computations with Jacobi diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Cache directory.
    #[arg(long, global = true, env = "JD_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Largest number of diagrams a context may index.
    #[arg(long, global = true)]
    budget_diagrams: Option<usize>,

    /// Rough memory bound for one context, in megabytes.
    #[arg(long, global = true)]
    memory_budget_mb: Option<usize>,

    /// Output format: json or text.
    #[arg(long, global = true, default_value = "json")]
    out: String,
}

#[derive(Args, Clone)]
struct ContextArgs {
    /// empty, C<m>, I<m> or O<m>.
    #[arg(long)]
    skeleton: Option<String>,
    #[arg(long)]
    degree: Option<usize>,
    /// Connected diagrams only.
    #[arg(long)]
    connected: bool,
    /// Diagrams without legs only.
    #[arg(long)]
    trivalent: bool,
    /// Relation set such as STU+FI or AS+IHX (default depends on the skeleton).
    #[arg(long)]
    relations: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension of a diagram space modulo relations.
    Dims {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Saturate from one generator instead of enumerating the class.
        #[arg(long)]
        saturate: bool,
    },
    /// Normal form of a diagram or vector file ("-" for stdin).
    Reduce {
        input: PathBuf,
        #[command(flatten)]
        ctx: ContextArgs,
    },
    /// Pairing element of two trees.
    Pairing {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        sigma2: String,
    },
    /// Runs a verification suite.
    Verify {
        /// left-inverse, placements, pairing, evenness, wheel, one-leg or form.
        suite: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sigma: Option<String>,
        /// Weight system file for the form suite.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Inspects the cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand, Clone, Copy)]
enum CacheAction {
    List,
    Clear,
    Verify,
}

enum Failure {
    Core(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<String, Failure>;

fn input_error(msg: String) -> Failure {
    Failure::Core(Error::Schema { path: "$".into(), message: msg })
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| input_error(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Core(Error::Io(format!("{}: {e}", path.display()))))
    }
}

fn spec_from(args: &ContextArgs, inferred: Option<(Skeleton, usize)>) -> Result<ContextSpec, Failure> {
    let skeleton = match &args.skeleton {
        Some(s) => s.parse::<Skeleton>()?,
        None => inferred.map(|x| x.0).ok_or_else(|| input_error("--skeleton is required".into()))?,
    };
    let degree = match args.degree.or(inferred.map(|x| x.1)) {
        Some(d) => d,
        None => return Err(input_error("--degree is required".into())),
    };
    let relations = match &args.relations {
        Some(r) => r.parse::<RelationSet>()?,
        None => RelationSet::default_for(skeleton),
    };
    let constraints = Constraints { connected_only: args.connected, trivalent_only: args.trivalent, ..Constraints::default() };
    Ok(ContextSpec::new(skeleton, degree, relations).with_constraints(constraints))
}

fn dims_text(d: &DimsReport) -> String {
    format!(
        "{}\n  mode {} ({})\n  generators {}\n  rank {}\n  dimension {}\n",
        d.context, d.mode, d.status, d.generators, d.rank, d.dimension
    )
}

fn vector_text(v: &DiagramVector) -> String {
    if v.is_zero() {
        return "0\n".into();
    }
    let mut s = String::new();
    for (c, x) in v.iter() {
        s.push_str(&format!("{x}\t{}\n", serde_json::to_string(&DiagramJson::from_diagram(c.diagram())).expect("serializable")));
    }
    s
}

fn report_out(r: &Report, format: OutputFormat) -> Outcome {
    let text = match format {
        OutputFormat::Json => r.to_json(),
        OutputFormat::Text => r.to_text(),
    };
    if r.status == Verdict::Fail {
        return Err(Failure::Verification(text));
    }
    Ok(text)
}

fn run(cli: Cli) -> Outcome {
    let format: OutputFormat = cli.out.parse()?;
    let mut config = RunConfig { cache_dir: cli.cache_dir.clone(), format, ..RunConfig::default() };
    if let Some(w) = cli.workers {
        config.workers = w;
    }
    config.budget_diagrams = cli.budget_diagrams;
    config.memory_budget_mb = cli.memory_budget_mb;
    let runner = Runner::new(config)?;
    match cli.command {
        Command::Dims { ctx, saturate } => {
            let spec = spec_from(&ctx, None)?;
            let d = if saturate { runner.dims_saturated(&spec)? } else { runner.dims(&spec)? };
            Ok(match format {
                OutputFormat::Json => serde_json::to_string_pretty(&d).expect("serializable") + "\n",
                OutputFormat::Text => dims_text(&d),
            })
        }
        Command::Reduce { input, ctx } => {
            let text = read_input(&input)?;
            let is_vector = match serde_json::from_str::<serde_json::Value>(&text) {
                Ok(v) => v.get("terms").is_some(),
                Err(_) => true,
            };
            let v = if is_vector { parse_vector(&text)? } else { DiagramVector::from_diagram(&parse_diagram(&text)?) };
            let inferred = v.support().next().map(|c| (c.skeleton(), c.degree()));
            let out = if ctx.skeleton.is_none() && ctx.degree.is_none() && inferred.is_none() {
                DiagramVector::zero()
            } else {
                runner.reduce(&spec_from(&ctx, inferred)?, &v)?
            };
            Ok(match format {
                OutputFormat::Json => vector_to_string(&out) + "\n",
                OutputFormat::Text => vector_text(&out),
            })
        }
        Command::Pairing { n, sigma, sigma2 } => {
            let a = TreeIndex::parse(n, &sigma)?;
            let b = TreeIndex::parse(n, &sigma2)?;
            let doc = runner.pairing(&a, &b)?;
            Ok(match format {
                OutputFormat::Json => doc,
                OutputFormat::Text => {
                    let value: serde_json::Value = from_json_str(&doc)?;
                    let v = parse_vector(&value["element"].to_string())?;
                    format!("pairing n={n} sigma={a} sigma2={b} reduced={}\n{}", value["reduced"], vector_text(&v))
                }
            })
        }
        Command::Verify { suite, n, sigma, weights } => {
            let suite: Suite = suite.parse()?;
            let sigma = sigma.map(|s| TreeIndex::parse(n, &s)).transpose()?;
            let weights = match weights {
                Some(p) => Some(WeightSystem::from_json(&read_input(&p)?)?),
                None => None,
            };
            let r = runner.verify(suite, n, sigma.as_ref(), weights.as_ref())?;
            report_out(&r, format)
        }
        Command::Cache { action } => {
            let cache = runner.cache().ok_or_else(|| input_error("no cache directory (use --cache-dir or JD_CACHE_DIR)".into()))?;
            match action {
                CacheAction::List => {
                    let mut s = String::new();
                    for e in cache.list()? {
                        s.push_str(&format!("{}\t{}\t{}\t{}\n", e.file, e.op, e.bytes, e.params));
                    }
                    Ok(s)
                }
                CacheAction::Clear => Ok(format!("removed {} entries\n", cache.clear()?)),
                CacheAction::Verify => {
                    let v = cache.verify()?;
                    let mut s = format!("{} entries ok, {} removed for rebuild\n", v.ok.len(), v.removed.len());
                    for (f, why) in &v.removed {
                        s.push_str(&format!("  {f}: {why}\n"));
                    }
                    if v.clean() {
                        Ok(s)
                    } else {
                        Err(Failure::Verification(s))
                    }
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(s) => {
            io::stdout().write_all(s.as_bytes()).ok();
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(s)) => {
            io::stdout().write_all(s.as_bytes()).ok();
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Core(e)) => {
            eprintln!("jd: {e}");
            if let Error::OutsideIndex { missing } = &e {
                for m in missing.iter().take(5) {
                    eprintln!("  {m}");
                }
            }
            ExitCode::from(match e {
                Error::Budget { .. } => EXIT_BUDGET,
                _ => EXIT_INPUT,
            })
        }
    }
}

//! Run configuration and the cached operations behind the command line.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cache::{Cache, CacheKey};
use crate::diagram::json::{from_json_str, DiagramJson, VectorJson};
use crate::diagram::{canonicalize, CanonicalDiagram};
use crate::error::{Error, Result};
use crate::lab::{self, pairing_element, pairing_spec, Report, TreeIndex, WeightSystem};
use crate::linalg::IntRow;
use crate::quotient::{Col, ContextSpec, Mode, QuotientContext, Status};
use crate::vector::DiagramVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<OutputFormat> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            _ => Err(Error::Schema { path: "out".into(), message: format!("expected json or text, got {s:?}") }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub cache_dir: Option<PathBuf>,
    pub workers: usize,
    /// Largest generator index a context may build.
    pub budget_diagrams: Option<usize>,
    /// Rough bound on the stored size of one context, in megabytes.
    pub memory_budget_mb: Option<usize>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cache_dir: None,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            budget_diagrams: None,
            memory_budget_mb: None,
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::pre("worker count must be at least 1"));
        }
        if self.budget_diagrams == Some(0) || self.memory_budget_mb == Some(0) {
            return Err(Error::pre("budgets must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    LeftInverse,
    Placements,
    Pairing,
    Evenness,
    Wheel,
    OneLeg,
    Form,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::LeftInverse, Suite::Placements, Suite::Pairing, Suite::Evenness, Suite::Wheel, Suite::OneLeg, Suite::Form];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::LeftInverse => "left-inverse",
            Suite::Placements => "placements",
            Suite::Pairing => "pairing",
            Suite::Evenness => "evenness",
            Suite::Wheel => "wheel",
            Suite::OneLeg => "one-leg",
            Suite::Form => "form",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL.into_iter().find(|x| x.to_string() == s).ok_or_else(|| {
            let names: Vec<String> = Suite::ALL.iter().map(|x| x.to_string()).collect();
            Error::Schema { path: "suite".into(), message: format!("unknown suite {s:?}; expected one of {}", names.join(", ")) }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimsReport {
    pub context: String,
    pub mode: String,
    pub status: String,
    pub generators: usize,
    pub rank: usize,
    pub dimension: usize,
    pub relations: usize,
}

#[derive(Serialize, Deserialize)]
struct StoredContext {
    context: String,
    mode: String,
    status: String,
    relations: usize,
    generators: Vec<DiagramJson>,
    rows: Vec<Vec<(usize, String)>>,
}

fn context_payload(ctx: &QuotientContext) -> String {
    let gens: Vec<&CanonicalDiagram> = ctx.generators().collect();
    let pos: std::collections::HashMap<&CanonicalDiagram, usize> = gens.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let stored = StoredContext {
        context: ctx.spec().describe(),
        mode: ctx.mode().to_string(),
        status: ctx.status().to_string(),
        relations: ctx.relation_count(),
        generators: gens.iter().map(|c| DiagramJson::from_diagram(c.diagram())).collect(),
        rows: ctx.rows().map(|r| r.iter().map(|(c, x)| (pos[&c.0], x.to_string())).collect()).collect(),
    };
    serde_json::to_string(&stored).expect("serializable") + "\n"
}

fn context_from_payload(spec: ContextSpec, s: &str) -> Result<QuotientContext> {
    let bad = |m: String| Error::Cache(format!("stored context: {m}"));
    let stored: StoredContext = from_json_str(s)?;
    if stored.context != spec.describe() {
        return Err(bad(format!("describes {:?}", stored.context)));
    }
    let mut gens = Vec::with_capacity(stored.generators.len());
    for (i, g) in stored.generators.iter().enumerate() {
        let c = canonicalize(&g.to_diagram(&format!("$.generators[{i}]"))?);
        if c.sign != 1 {
            return Err(bad(format!("generator {i} is not a canonical representative")));
        }
        gens.push(c.diagram);
    }
    let mut rows = Vec::with_capacity(stored.rows.len());
    for r in &stored.rows {
        let mut row: IntRow<Col> = Vec::with_capacity(r.len());
        for (i, x) in r {
            let c = gens.get(*i).ok_or_else(|| bad(format!("row refers to generator {i}")))?;
            let x: BigInt = x.parse().map_err(|_| bad(format!("bad integer {x:?}")))?;
            row.push((Col(c.clone()), x));
        }
        rows.push(row);
    }
    let mode = if stored.mode == "full" { Mode::Full } else { Mode::Saturation };
    let status = if stored.status == "complete" { Status::Complete } else { Status::Budgeted };
    Ok(QuotientContext::from_parts(spec, mode, status, gens, rows, stored.relations))
}

/// Executes operations under a [`RunConfig`], consulting the cache.
pub struct Runner {
    config: RunConfig,
    cache: Option<Cache>,
    pool: rayon::ThreadPool,
}

impl Runner {
    pub fn new(config: RunConfig) -> Result<Runner> {
        config.validate()?;
        let cache = config.cache_dir.as_ref().map(Cache::open).transpose()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::pre(format!("thread pool: {e}")))?;
        Ok(Runner { config, cache, pool })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn cache(&self) -> Option<&Cache> {
        self.cache.as_ref()
    }

    fn cached(&self, op: &str, params: &str, f: impl FnOnce() -> Result<String> + Send) -> Result<String> {
        let key = CacheKey::new(op, params);
        match &self.cache {
            Some(c) => c.get_or_compute(&key, || self.pool.install(f)).map(|(p, _)| p),
            None => self.pool.install(f),
        }
    }

    fn check_memory(&self, ctx: &QuotientContext) -> Result<()> {
        let Some(mb) = self.config.memory_budget_mb else { return Ok(()) };
        let entries: usize = ctx.rows().map(|r| r.len()).sum();
        let estimate = entries * 48 + ctx.generator_count() * 256;
        if estimate > mb << 20 {
            return Err(Error::Budget { what: format!("memory estimate for {} (bytes)", ctx.spec().describe()), count: estimate });
        }
        Ok(())
    }

    /// A full context, loaded from the cache when present.
    pub fn context(&self, spec: &ContextSpec) -> Result<QuotientContext> {
        let budget = self.config.budget_diagrams;
        let params = format!("{} budget {}", spec.describe(), budget.map_or("none".into(), |b| b.to_string()));
        let payload = self.cached("context", &params, || {
            let ctx = QuotientContext::full(spec.clone(), budget)?;
            self.check_memory(&ctx)?;
            Ok(context_payload(&ctx))
        })?;
        context_from_payload(spec.clone(), &payload)
    }

    fn dims_of(ctx: &QuotientContext) -> DimsReport {
        DimsReport {
            context: ctx.spec().describe(),
            mode: ctx.mode().to_string(),
            status: ctx.status().to_string(),
            generators: ctx.generator_count(),
            rank: ctx.rank(),
            dimension: ctx.dimension(),
            relations: ctx.relation_count(),
        }
    }

    pub fn dims(&self, spec: &ContextSpec) -> Result<DimsReport> {
        Ok(Runner::dims_of(&self.context(spec)?))
    }

    /// Dimension of the closure of the first generator under relations.
    pub fn dims_saturated(&self, spec: &ContextSpec) -> Result<DimsReport> {
        let budget = self.config.budget_diagrams;
        self.pool.install(|| {
            let seed = crate::diagram::enumerate::enumerate(spec.skeleton, spec.degree, &spec.constraints, budget)?;
            let ctx = QuotientContext::saturated(spec.clone(), &seed[..seed.len().min(1)], budget)?;
            if !ctx.is_definitive() {
                return Err(Error::Budget { what: format!("saturation of {}", spec.describe()), count: ctx.generator_count() });
            }
            Ok(Runner::dims_of(&ctx))
        })
    }

    pub fn reduce(&self, spec: &ContextSpec, v: &DiagramVector) -> Result<DiagramVector> {
        let ctx = self.context(spec)?;
        self.pool.install(|| ctx.reduce(v))
    }

    /// The pairing element as JSON: reduced in the full context for `n = 2`,
    /// unreduced above that.
    pub fn pairing(&self, a: &TreeIndex, b: &TreeIndex) -> Result<String> {
        let params = format!("n={} sigma={a} sigma2={b}", a.n());
        self.cached("pairing", &params, || {
            let v = pairing_element(a, b)?;
            let (reduced, context, out) = if a.n() == 2 {
                let spec = pairing_spec(2);
                let ctx = self.context(&spec)?;
                (true, spec.describe(), ctx.reduce(&v)?)
            } else {
                (false, pairing_spec(a.n()).describe(), v)
            };
            let doc = PairingDoc { n: a.n(), sigma: a.to_string(), sigma2: b.to_string(), reduced, context, element: VectorJson::from_vector(&out) };
            Ok(serde_json::to_string_pretty(&doc).expect("serializable") + "\n")
        })
    }

    pub fn verify(&self, suite: Suite, n: usize, sigma: Option<&TreeIndex>, weights: Option<&WeightSystem>) -> Result<Report> {
        let sigma_s = sigma.map_or("id".to_string(), |s| s.to_string());
        let params = format!("suite={suite} n={n} sigma={sigma_s} weights={}", weights.map_or("none".into(), weights_digest));
        let payload = self.cached("verify", &params, || {
            let r = match suite {
                Suite::LeftInverse => lab::verify_left_inverse(n, self.config.budget_diagrams)?,
                Suite::Placements => lab::verify_placements(n, &self.context(&pairing_spec(n))?)?,
                Suite::Pairing => lab::verify_pairing_structure(n)?,
                Suite::Evenness => {
                    let idx = match sigma {
                        Some(s) => s.clone(),
                        None => TreeIndex::identity(n)?,
                    };
                    lab::verify_evenness(&idx, &self.context(&pairing_spec(n))?)?
                }
                Suite::Wheel => {
                    if n != 2 {
                        return Err(Error::pre("the wheel suite is defined for n = 2"));
                    }
                    lab::verify_wheel_vanishing(&self.context(&pairing_spec(2))?)?
                }
                Suite::OneLeg => lab::verify_one_leg(3, n, false)?,
                Suite::Form => {
                    let w = weights.ok_or_else(|| Error::pre("the form suite needs --weights"))?;
                    if w.n() != n {
                        return Err(Error::pre(format!("weight system is for n={}, suite asked for n={n}", w.n())));
                    }
                    lab::verify_quadratic_form(w)?
                }
            };
            Ok(serde_json::to_string(&r).expect("serializable"))
        })?;
        from_json_str(&payload)
    }
}

fn weights_digest(w: &WeightSystem) -> String {
    let s = serde_json::to_string(&w.to_file()).expect("serializable");
    crate::cache::sha256_hex(s.as_bytes())[..16].to_string()
}

#[derive(Serialize, Deserialize)]
struct PairingDoc {
    n: usize,
    sigma: String,
    sigma2: String,
    reduced: bool,
    context: String,
    element: VectorJson,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Skeleton;

    #[test]
    fn stored_context_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig { cache_dir: Some(dir.path().to_path_buf()), workers: 2, ..RunConfig::default() };
        let r = Runner::new(cfg).unwrap();
        let spec = ContextSpec::standard(Skeleton::Circles(2), 2);
        let a = r.dims(&spec).unwrap();
        let b = r.dims(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dimension, 3);
        assert_eq!(r.cache().unwrap().list().unwrap().len(), 1);
    }

    #[test]
    fn config_rejects_zero_workers() {
        let cfg = RunConfig { workers: 0, ..RunConfig::default() };
        assert!(Runner::new(cfg).is_err());
    }

    #[test]
    fn suites_parse() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("prop".parse::<Suite>().is_err());
    }
}

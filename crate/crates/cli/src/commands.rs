use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cantor_spectra::certify::{
    beurling_density, classify_qb, spectrum_verdict, AlphaSequence, VerdictConfig,
};
use cantor_spectra::fourier::{compute_mask_constants, TruncationPolicy};
use cantor_spectra::growth::GrowthFn;
use cantor_spectra::treemap::{
    canonical_spec, enumerate, nonspectrum_spec, profile_stats, slow_growth_spec, sparse_spec, validate,
    TreeMappingSpec, ValidationReport,
};
use cantor_spectra::MeasureParams;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

/// Orthogonal exponentials and spectra of Cantor-type measures.
#[derive(Debug, Parser)]
#[command(name = "cantor-spectra", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orthogonal-set regime of mu_{q,b}.
    Classify {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        b: u32,
    },
    /// Write a mapping spec with its validation report.
    Build(BuildArgs),
    /// Orthogonality, growth criteria and Q grid for a spec.
    Certify(CertifyArgs),
    /// Sup-count over windows of radius R divided by g(R), as CSV.
    Density(DensityArgs),
    /// The first elements of Lambda(tau) as JSON lines.
    Enumerate {
        spec: PathBuf,
        #[arg(long, default_value_t = 16)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level statistics of N and N*.
    Stats {
        spec: PathBuf,
        #[arg(long, default_value_t = 12)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Canonical,
    Sparse,
    Slow,
    Nonspectrum,
    Custom,
}

#[derive(Debug, Args)]
struct BuildArgs {
    kind: Kind,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    b: Option<u32>,
    /// Growth function for `sparse`: log, ln, loglog, pow:<a>, table:<x:y,...>.
    #[arg(long, default_value = "log")]
    g: String,
    /// Number of listed sparse exponents.
    #[arg(long, default_value_t = 10)]
    window: u64,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    /// Grid resolution for the mask constants.
    #[arg(long, default_value_t = 1e-4)]
    resolution: f64,
    /// Input spec for `custom`.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    depth: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    spec: PathBuf,
    #[arg(long, default_value_t = 4096)]
    terms: usize,
    /// Truncation depth of the infinite product.
    #[arg(long, default_value_t = 40)]
    depth: u32,
    /// Comma separated xi values replacing the default grid.
    #[arg(long)]
    grid: Option<String>,
    /// Extra uniformly random xi in (0, 1/2].
    #[arg(long, default_value_t = 0)]
    random_xi: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// maxn, squares, or a comma separated list.
    #[arg(long, default_value = "maxn")]
    alpha: String,
    #[arg(long, default_value_t = 12)]
    horizon: usize,
    #[arg(long, default_value_t = 512)]
    bizero_prefix: usize,
    #[arg(long, default_value_t = 96)]
    stat_levels: usize,
    /// Write the Q grid as CSV.
    #[arg(long)]
    emit_q: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DensityArgs {
    spec: PathBuf,
    #[arg(long, default_value = "log")]
    g: String,
    /// Comma separated radii; empty gives an empty table.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    r: String,
    #[arg(long, default_value_t = 1024)]
    count: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Classify { q, b } => {
            let c = classify_qb(q, b)?;
            emit(None, &serde_json::to_string_pretty(&c)?)
        }
        Command::Build(a) => build(a),
        Command::Certify(a) => certify(a),
        Command::Density(a) => density(a),
        Command::Enumerate { spec, count, out } => {
            let spec = load_spec(&spec)?;
            let c = enumerate(&spec, count)?;
            let mut s = String::new();
            for (n, e) in c.entries.iter().enumerate() {
                s.push_str(&e.to_json_line(n));
                s.push('\n');
            }
            emit_raw(out.as_deref(), &s)
        }
        Command::Stats { spec, levels, out } => {
            let spec = load_spec(&spec)?;
            let st = profile_stats(&spec, levels);
            let rows: Vec<Value> = st
                .levels
                .iter()
                .enumerate()
                .map(|(n, l)| {
                    json!({
                        "level": n,
                        "Lstar": (l.min_nstar != u64::MAX).then_some(l.min_nstar),
                        "max_Nstar": l.max_nstar,
                        "max_N": l.max_n,
                        "M": st.m_max(n + 1).ok(),
                        "exact": l.exact,
                    })
                })
                .collect();
            let v = json!({ "q": st.q, "nstar_sup": st.nstar_sup, "levels": rows });
            emit(out.as_deref(), &serde_json::to_string_pretty(&v)?)
        }
    }
}

fn params(q: Option<u32>, b: Option<u32>) -> Result<MeasureParams> {
    match (q, b) {
        (Some(q), Some(b)) => Ok(MeasureParams::new(q, b)?),
        _ => bail!("--q and --b are required"),
    }
}

fn load_spec(path: &Path) -> Result<TreeMappingSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(TreeMappingSpec::from_json_str(&text).with_context(|| format!("parsing {}", path.display()))?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let mut t = text.to_string();
    t.push('\n');
    emit_raw(out, &t)
}

fn emit_raw(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ViolationOut {
    node: String,
    clause: String,
    message: String,
}

fn report_json(r: &ValidationReport) -> Value {
    let v: Vec<ViolationOut> = r
        .violations
        .iter()
        .map(|v| ViolationOut { node: v.node.to_string(), clause: format!("{:?}", v.clause), message: v.message.clone() })
        .collect();
    json!({
        "depth": r.depth,
        "nodes_checked": r.nodes_checked,
        "exhaustive": r.exhaustive,
        "clean": r.is_clean(),
        "violations": v,
    })
}

fn build(a: BuildArgs) -> Result<()> {
    let (spec, depth) = match a.kind {
        Kind::Custom => {
            let path = a.input.as_deref().context("build custom needs --in <spec.json>")?;
            let spec = load_spec(path)?;
            let deepest = spec.overrides().keys().map(|w| w.len()).max().unwrap_or(0);
            (spec, a.depth.max(deepest))
        }
        kind => {
            let p = params(a.q, a.b)?;
            let spec = match kind {
                Kind::Canonical => canonical_spec(&p)?,
                Kind::Sparse => sparse_spec(&p, &a.g.parse::<GrowthFn>()?, a.window)?,
                Kind::Slow => slow_growth_spec(&p, &compute_mask_constants(&p, a.resolution)?)?,
                Kind::Nonspectrum => nonspectrum_spec(&p, a.epsilon, &compute_mask_constants(&p, a.resolution)?)?,
                Kind::Custom => unreachable!(),
            };
            (spec, a.depth)
        }
    };
    let report = validate(&spec, depth.max(1));
    if let Some(v) = report.violations.first() {
        bail!("validation failed at node {} ({:?}): {}", v.node, v.clause, v.message);
    }
    let mut doc = spec.to_json();
    doc["validation"] = report_json(&report);
    emit(a.out.as_deref(), &serde_json::to_string_pretty(&doc)?)
}

fn parse_f64_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("{what}: {t:?} is not a number")))
        .collect()
}

fn certify(a: CertifyArgs) -> Result<()> {
    let spec = load_spec(&a.spec)?;
    let mut grid = match &a.grid {
        Some(g) => parse_f64_list(g, "--grid")?,
        None => VerdictConfig::default_grid(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    grid.extend((0..a.random_xi).map(|_| 0.5 - rng.gen_range(0.0..0.5)));
    let alpha = match a.alpha.as_str() {
        "maxn" => AlphaSequence::MaxNRecursion,
        "squares" => AlphaSequence::Squares,
        list => AlphaSequence::Explicit(
            list.split(',')
                .map(|t| t.trim().parse::<u64>().with_context(|| format!("--alpha: {t:?}")))
                .collect::<Result<_>>()?,
        ),
    };
    let cfg = VerdictConfig {
        terms: a.terms,
        truncation: TruncationPolicy::with_depth(a.depth)?,
        grid,
        alpha,
        horizon: a.horizon,
        bizero_prefix: a.bizero_prefix,
        stat_levels: a.stat_levels,
        ..VerdictConfig::default()
    };
    let v = spectrum_verdict(&spec, &cfg)?;
    if let Some(path) = &a.emit_q {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(["xi", "Q", "error_budget", "terms"])?;
        for p in &v.q_grid {
            w.write_record([p.xi.to_string(), p.q.to_string(), p.error_budget.to_string(), p.terms.to_string()])?;
        }
        w.flush()?;
    }
    emit(a.out.as_deref(), &serde_json::to_string_pretty(&v)?)
}

fn density(a: DensityArgs) -> Result<()> {
    let spec = load_spec(&a.spec)?;
    let g: GrowthFn = a.g.parse()?;
    let radii = parse_f64_list(&a.r, "--r")?;
    let c = enumerate(&spec, a.count)?;
    let rows = beurling_density(&c, &g, &radii)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["R", "max_count", "g", "ratio"])?;
    for r in rows {
        w.write_record([r.radius.to_string(), r.max_count.to_string(), r.g.to_string(), r.ratio.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    emit_raw(a.out.as_deref(), &String::from_utf8(bytes)?)
}

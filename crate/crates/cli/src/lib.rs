//! Front end for `mnov`: argument parsing, dispatch and report rendering.

mod render;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use morse_novikov::bounds::{self, BoundsError, KnotInput, Overrides};
use morse_novikov::braid::{bennequin_invariants, greedy_destabilize, parse_braid, BraidError};
use morse_novikov::calculus::{self, CalcError};
use morse_novikov::milnor::{self, MilnorError, SolverConfig, Verdict};
use morse_novikov::poly::{parse_rational_capped, PolyError, RationalMap};

pub use render::{normalize_floats, render_text};

#[derive(Debug, Parser)]
#[command(name = "mnov", version, about = "Milnor maps of rational functions and Morse-Novikov bounds for braid closures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print the machine-readable report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Exit with status 4 when a search reports itself incomplete.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Worker threads for the numerical searches (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Numerical analysis of the Milnor map of a rational function.
    Milnor {
        #[command(subcommand)]
        op: MilnorOp,
    },
    /// Diagram invariants of a braid closure.
    Braid {
        /// Braid word, "n: l1 l2 ...".
        #[arg(short, long, allow_hyphen_values = true)]
        braid: String,
    },
    /// Evaluate a construction expression.
    Calc {
        /// e.g. "msum(u,u,2)".
        expression: String,
    },
    /// Morse-Novikov upper bounds for a braid closure.
    Bounds(BoundsArgs),
}

#[derive(Debug, Subcommand)]
pub enum MilnorOp {
    /// Critical radii X(F) and m(F).
    Radii {
        #[command(flatten)]
        input: MapArgs,
    },
    /// Critical points on the sphere of radius r.
    Crit {
        #[command(flatten)]
        input: MapArgs,
        #[arg(short, long, allow_hyphen_values = true)]
        radius: f64,
    },
    /// Trace the link components on the sphere of radius r.
    Trace {
        #[command(flatten)]
        input: MapArgs,
        #[arg(short, long, allow_hyphen_values = true)]
        radius: f64,
    },
    /// Full report with verdict.
    Report {
        #[command(flatten)]
        input: MapArgs,
        #[arg(short, long, allow_hyphen_values = true)]
        radius: f64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct MapArgs {
    /// Rational function P/Q in z and w.
    #[arg(short = 'f', long = "function", allow_hyphen_values = true)]
    pub function: String,
    #[arg(long, default_value_t = 400)]
    pub seeds: usize,
    #[arg(long = "rng", default_value_t = 0)]
    pub rng_seed: u64,
    /// Run the brute-force grid oracle as a cross-check.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = 1e-12)]
    pub newton_tol: f64,
    #[arg(long, default_value_t = 80)]
    pub max_newton_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub dedup_dist: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub degeneracy_tol: f64,
    /// Oracle cells per angular dimension.
    #[arg(long, default_value_t = 48)]
    pub grid: usize,
    #[arg(long, default_value_t = 20_000)]
    pub max_trace_steps: usize,
    /// Skip the squarefree check on P and Q.
    #[arg(long)]
    pub assume_squarefree: bool,
    #[arg(long, default_value_t = 64)]
    pub degree_cap: u32,
}

impl MapArgs {
    fn solver(&self) -> SolverConfig {
        SolverConfig {
            seed_count: self.seeds,
            rng_seed: self.rng_seed,
            newton_tol: self.newton_tol,
            max_newton_iters: self.max_newton_iters,
            dedup_dist: self.dedup_dist,
            degeneracy_rel_tol: self.degeneracy_tol,
            grid_resolution: self.grid,
            max_trace_steps: self.max_trace_steps,
            assume_squarefree: self.assume_squarefree,
            oracle: self.oracle,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    /// Braid word, "n: l1 l2 ...".
    #[arg(short, long, allow_hyphen_values = true)]
    pub braid: String,
    /// Whitehead double "m:sign", e.g. "0:+".
    #[arg(long, allow_hyphen_values = true)]
    pub double: Option<String>,
    /// Upper bound for the braid index.
    #[arg(long)]
    pub bi: Option<u32>,
    /// Upper bound for the crossing number.
    #[arg(long)]
    pub cr: Option<u32>,
    /// Upper bound for the wrapping genus.
    #[arg(long)]
    pub wrap: Option<u32>,
    /// Upper bound for the layered wrapping genus.
    #[arg(long)]
    pub wlap: Option<u32>,
    /// Upper bound for the free rank.
    #[arg(long)]
    pub freerank: Option<u32>,
}

/// Top-level machine-readable report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub result: Value,
    pub assumptions: Vec<String>,
    pub warnings: Vec<String>,
}

impl Report {
    fn new(command: &str, config: Value, result: Value, assumptions: Vec<String>, warnings: Vec<String>) -> Self {
        Self {
            command: command.to_string(),
            config: normalize_floats(config),
            result: normalize_floats(result),
            assumptions,
            warnings,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Milnor(#[from] MilnorError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Milnor(MilnorError::Poly(_)) | CliError::Milnor(MilnorError::Config(_)) => 2,
            CliError::Milnor(MilnorError::InvalidRadius { .. }) => 3,
            CliError::Bounds(BoundsError::NotAKnot(_)) => 5,
            CliError::Bounds(BoundsError::Calc(_)) => 2,
            _ => 1,
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        CliError::Parse(format!("function: {e}"))
    }
}

impl From<BraidError> for CliError {
    fn from(e: BraidError) -> Self {
        CliError::Parse(format!("braid: {e}"))
    }
}

impl From<CalcError> for CliError {
    fn from(e: CalcError) -> Self {
        CliError::Parse(format!("expression: {e}"))
    }
}

/// A finished command: the report, and whether any search flagged itself
/// incomplete.
pub struct Outcome {
    pub report: Report,
    pub incomplete: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn load_map(a: &MapArgs) -> Result<RationalMap, CliError> {
    let mut f = parse_rational_capped(&a.function, a.degree_cap)?;
    if !a.assume_squarefree {
        f.check_squarefree();
    }
    Ok(f)
}

fn map_config(a: &MapArgs, radius: Option<f64>) -> Value {
    let mut c = json!({ "function": a.function, "degree_cap": a.degree_cap, "solver": to_value(&a.solver()) });
    if let Some(r) = radius {
        c["radius"] = json!(r);
    }
    c
}

fn squarefree_assumption(a: &MapArgs) -> String {
    if a.assume_squarefree {
        "P and Q are squarefree and coprime (asserted by --assume-squarefree)".into()
    } else {
        "P and Q are squarefree and coprime (heuristic check passed)".into()
    }
}

fn milnor_cmd(op: &MilnorOp) -> Result<Outcome, CliError> {
    let (name, input, radius) = match op {
        MilnorOp::Radii { input } => ("milnor radii", input, None),
        MilnorOp::Crit { input, radius } => ("milnor crit", input, Some(*radius)),
        MilnorOp::Trace { input, radius } => ("milnor trace", input, Some(*radius)),
        MilnorOp::Report { input, radius } => ("milnor report", input, Some(*radius)),
    };
    let f = load_map(input)?;
    let cfg = input.solver();
    cfg.validate()?;
    let config = map_config(input, radius);
    let assumptions = vec![squarefree_assumption(input)];
    let mut warnings = Vec::new();
    let (result, incomplete) = match op {
        MilnorOp::Radii { .. } => {
            let x = milnor::critical_radii(&f, &cfg)?;
            if x.incomplete {
                warnings.push(format!("critical radii incomplete: {} of {} seeds converged", x.converged_seeds, x.total_seeds));
            }
            (to_value(&x), x.incomplete)
        }
        MilnorOp::Crit { radius, .. } => {
            let s = milnor::milnor_critical_points(&f, *radius, &cfg)?;
            if s.incomplete {
                warnings.push(format!(
                    "critical point search incomplete: {} of {} seeds converged, {} unclassified",
                    s.converged_seeds, s.total_seeds, s.unclassified
                ));
            }
            let mut v = to_value(&s);
            if cfg.oracle {
                v["oracle"] = to_value(&milnor::brute_force_oracle(&f, *radius, &cfg)?);
            }
            (v, s.incomplete)
        }
        MilnorOp::Trace { radius, .. } => {
            let t = milnor::trace_link(&f, *radius, &cfg)?;
            if t.incomplete {
                warnings.push("a link component did not close within the step budget".into());
            }
            (to_value(&t), t.incomplete)
        }
        MilnorOp::Report { radius, .. } => {
            let rep = milnor::morse_report(&f, *radius, &cfg)?;
            warnings.extend(rep.warnings.iter().cloned());
            (to_value(&rep), rep.verdict == Verdict::Incomplete)
        }
    };
    Ok(Outcome { report: Report::new(name, config, result, assumptions, warnings), incomplete })
}

fn braid_cmd(text: &str) -> Result<Outcome, CliError> {
    let b = parse_braid(text)?;
    let reduced = greedy_destabilize(&b);
    let result = json!({
        "braid": b.to_string(),
        "invariants": to_value(&bennequin_invariants(&b)),
        "reduced": reduced.to_string(),
        "reduced_invariants": to_value(&bennequin_invariants(&reduced)),
    });
    let assumptions = vec![
        bounds::ASSUME_FREE_BENNEQUIN.to_string(),
        "strand and letter counts of the reduced word are upper bounds, not invariants".to_string(),
    ];
    Ok(Outcome { report: Report::new("braid", json!({ "braid": text }), result, assumptions, vec![]), incomplete: false })
}

fn calc_cmd(text: &str) -> Result<Outcome, CliError> {
    let e = calculus::parse_expr(text)?;
    let s = calculus::summarize(&e)?;
    let assumptions = s.assumptions.clone();
    Ok(Outcome {
        report: Report::new("calc", json!({ "expression": text }), to_value(&s), assumptions, vec![]),
        incomplete: false,
    })
}

fn parse_double(text: &str) -> Result<(i64, bool), CliError> {
    let bad = || CliError::Parse(format!("--double: expected \"m:sign\" such as \"0:+\", got {text:?}"));
    let (m, s) = text.rsplit_once(':').ok_or_else(bad)?;
    let m: i64 = m.trim().parse().map_err(|_| bad())?;
    let positive = match s.trim() {
        "+" => true,
        "-" => false,
        _ => return Err(bad()),
    };
    Ok((m, positive))
}

fn bounds_cmd(a: &BoundsArgs) -> Result<Outcome, CliError> {
    let braid = parse_braid(&a.braid)?;
    let double = a.double.as_deref().map(parse_double).transpose()?;
    let mut input = KnotInput::new(braid);
    input.overrides = Overrides {
        braid_index: a.bi,
        crossing_number: a.cr,
        wrapping_genus: a.wrap,
        layered_wrapping_genus: a.wlap,
        free_rank: a.freerank,
    };
    if let Some((m, positive)) = double {
        input.double_twist = m;
        input.clasp_positive = positive;
    }
    let config = json!({
        "braid": a.braid,
        "double": a.double,
        "overrides": to_value(&input.overrides),
    });
    let (result, assumptions) = match double {
        None => {
            let c = bounds::free_rank_bound(&input)?;
            let a = c.assumptions.clone();
            (json!({ "bound": to_value(&c) }), a)
        }
        Some(_) => {
            let t = bounds::best_double_bound(&input)?;
            let mut a: Vec<String> = Vec::new();
            for c in &t.table {
                for s in &c.assumptions {
                    if !a.contains(s) {
                        a.push(s.clone());
                    }
                }
            }
            (to_value(&t), a)
        }
    };
    Ok(Outcome { report: Report::new("bounds", config, result, assumptions, vec![]), incomplete: false })
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Milnor { op } => milnor_cmd(op),
        Command::Braid { braid } => braid_cmd(braid),
        Command::Calc { expression } => calc_cmd(expression),
        Command::Bounds(a) => bounds_cmd(a),
    }
}

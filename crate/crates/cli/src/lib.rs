//! Command implementations behind the `catassoc` binary. Each command takes
//! already-parsed flag values, returns the full output as a string (JSON or
//! CSV), and classifies failures as usage errors (exit 2) or internal
//! invariant failures (exit 1).

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use catassoc::bst::Bst;
use catassoc::caterpillar::{Caterpillar, VertexId};
use catassoc::oracle;
use catassoc::stg::{order_for_accesses, Stg};
use catassoc::transform::{self, PhaseLengths};
use catassoc::wilber;
use catassoc::{Error, Weights};

#[derive(Debug)]
pub enum CliError {
    /// Bad input: malformed JSON, out-of-range values, exhausted budgets.
    Usage(String),
    /// The tool itself produced something inconsistent.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "internal invariant failure: {m}"),
        }
    }
}

fn usage<E: fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn from_core(e: Error) -> CliError {
    match e {
        Error::ReplayMismatch | Error::SequenceStuck { .. } => CliError::Internal(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

#[derive(Serialize)]
struct Envelope {
    lower: usize,
    upper: usize,
}

#[derive(Serialize)]
struct BoundsReport {
    caterpillar: Caterpillar,
    n: usize,
    m: usize,
    entropy: f64,
    entropy_plus_one: f64,
    /// reference budget n + m * (H + 1)
    budget: f64,
    /// ceil of half the worst-case switch total
    wilber_lower_bound: usize,
    /// length of the verified trace between the worst-case tree pair
    constructive_upper_bound: usize,
    /// general diameter envelope for a connected graph on `n + m` vertices
    envelope: Envelope,
}

/// Worst-case tree pair for a caterpillar: the stacked and the bound tree
/// over the worst-case instance when there are legs, the two spine paths
/// otherwise. Returns the switch lower bound and the verified trace length.
fn demo_pair_bounds(cat: &Caterpillar) -> Result<(usize, usize), CliError> {
    if cat.m() >= 1 {
        let w = Weights::new(cat.leg_counts().to_vec()).map_err(usage)?;
        let (s, sigma) = wilber::worst_case_instance(&w).map_err(usage)?;
        let switches = wilber::report(&s, &sigma)
            .map_err(from_core)?
            .total_with_accesses;
        let order = order_for_accesses(cat, &sigma).map_err(from_core)?;
        let stacked = Stg::legs_above(cat, &s, &order).map_err(from_core)?;
        let bound = Stg::all_bound(cat, &s).map_err(from_core)?;
        let trace = transform::transform(&stacked, &bound).map_err(from_core)?;
        Ok((switches.div_ceil(2), trace.total()))
    } else {
        let t1 = Stg::all_bound(cat, &Bst::left_path(cat.n())).map_err(from_core)?;
        let t2 = Stg::all_bound(cat, &Bst::right_path(cat.n())).map_err(from_core)?;
        let trace = transform::transform(&t1, &t2).map_err(from_core)?;
        Ok((0, trace.total()))
    }
}

/// `bounds --caterpillar '{"legs":[...]}'`
pub fn cmd_bounds(caterpillar_json: &str) -> Result<String, CliError> {
    let cat: Caterpillar = serde_json::from_str(caterpillar_json).map_err(usage)?;
    let (wilber_lower_bound, constructive_upper_bound) = demo_pair_bounds(&cat)?;
    let total = cat.vertex_count();
    let report = BoundsReport {
        n: cat.n(),
        m: cat.m(),
        entropy: cat.entropy(),
        entropy_plus_one: cat.entropy_plus_one(),
        budget: cat.n() as f64 + cat.m() as f64 * cat.entropy_plus_one(),
        wilber_lower_bound,
        constructive_upper_bound,
        envelope: Envelope {
            lower: cat.edge_count().max((2 * total).saturating_sub(18)),
            upper: total * (total - 1) / 2,
        },
        caterpillar: cat,
    };
    Ok(serde_json::to_string_pretty(&report).expect("report serializes"))
}

#[derive(Deserialize)]
struct TreePair {
    t1: Stg,
    t2: Stg,
}

#[derive(Serialize)]
struct TraceReport {
    total: usize,
    bound_budget: f64,
    phase_lengths: PhaseLengths,
    rotations: Vec<(VertexId, VertexId)>,
}

/// `transform --in pair.json`; the pair file holds `{"t1": ..., "t2": ...}`.
pub fn cmd_transform(pair_json: &str) -> Result<String, CliError> {
    let pair: TreePair = serde_json::from_str(pair_json).map_err(usage)?;
    for (name, t) in [("t1", &pair.t1), ("t2", &pair.t2)] {
        if !t.is_valid() {
            return Err(CliError::Usage(format!(
                "{name} does not satisfy the search-tree condition"
            )));
        }
    }
    let trace = transform::transform(&pair.t1, &pair.t2).map_err(from_core)?;
    // fail closed: re-verify the emitted trace by replaying it
    match pair.t1.apply(&trace.rotations) {
        Ok(t) if t == pair.t2 => {}
        _ => {
            return Err(CliError::Internal(
                "emitted trace does not replay to the target".into(),
            ))
        }
    }
    let report = TraceReport {
        total: trace.total(),
        bound_budget: trace.bound_budget,
        phase_lengths: trace.phase_lengths,
        rotations: trace.rotations,
    };
    Ok(serde_json::to_string_pretty(&report).expect("trace serializes"))
}

#[derive(Serialize)]
struct WorstCaseReport {
    weights: Vec<usize>,
    bst: Bst,
    sigma: Vec<usize>,
    lambda_prime: usize,
    entropy_times_m: f64,
    /// lambda_prime / (H * m); absent when the entropy is zero
    ratio: Option<f64>,
}

/// `worst-case --weights '[m1,...,mn]'`
pub fn cmd_worst_case(weights_json: &str) -> Result<String, CliError> {
    let counts: Vec<usize> = serde_json::from_str(weights_json).map_err(usage)?;
    let w = Weights::new(counts.clone()).map_err(usage)?;
    let (bst, sigma) = wilber::worst_case_instance(&w).map_err(usage)?;
    let lambda_prime = wilber::report(&bst, &sigma)
        .map_err(from_core)?
        .total_with_accesses;
    let entropy_times_m = w.entropy() * w.total() as f64;
    let ratio = (entropy_times_m > 0.0).then(|| lambda_prime as f64 / entropy_times_m);
    let report = WorstCaseReport {
        weights: counts,
        bst,
        sigma,
        lambda_prime,
        entropy_times_m,
        ratio,
    };
    Ok(serde_json::to_string_pretty(&report).expect("report serializes"))
}

#[derive(Serialize)]
struct DiameterOut {
    diameter: usize,
    pair: (Stg, Stg),
    nodes: usize,
    edges: usize,
    millis: u128,
}

/// `oracle diameter --caterpillar '{"legs":[...]}'`. All-sources search;
/// runtime is quadratic in the number of trees, so budget accordingly.
pub fn cmd_oracle_diameter(caterpillar_json: &str, budget: u64) -> Result<String, CliError> {
    let cat: Caterpillar = serde_json::from_str(caterpillar_json).map_err(usage)?;
    let start = Instant::now();
    let report = oracle::diameter(&cat, budget).map_err(from_core)?;
    let out = DiameterOut {
        diameter: report.diameter,
        pair: report.witness,
        nodes: report.nodes,
        edges: report.edges,
        millis: start.elapsed().as_millis(),
    };
    Ok(serde_json::to_string_pretty(&out).expect("report serializes"))
}

/// Caterpillar families available to `experiment`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// no legs: C(0, ..., 0)
    Path,
    /// one leg per spine vertex: C(1, ..., 1)
    Uniform,
    /// all n legs on the first spine vertex: C(n, 0, ..., 0)
    Heavy,
    /// doubling legs: C(1, 2, 4, ..., 2^(n-1))
    Geometric,
}

impl Family {
    pub fn parse(name: &str) -> Result<Family, CliError> {
        match name {
            "path" => Ok(Family::Path),
            "uniform" => Ok(Family::Uniform),
            "heavy" => Ok(Family::Heavy),
            "geometric" => Ok(Family::Geometric),
            other => Err(CliError::Usage(format!(
                "unknown family {other:?}; expected path, uniform, heavy, or geometric"
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Family::Path => "path",
            Family::Uniform => "uniform",
            Family::Heavy => "heavy",
            Family::Geometric => "geometric",
        }
    }

    fn legs(self, n: usize) -> Vec<usize> {
        match self {
            Family::Path => vec![0; n],
            Family::Uniform => vec![1; n],
            Family::Heavy => {
                let mut v = vec![0; n];
                v[0] = n;
                v
            }
            Family::Geometric => (0..n).map(|i| 1usize << i).collect(),
        }
    }
}

struct Row {
    family: &'static str,
    legs: Vec<usize>,
    n: usize,
    m: usize,
    entropy: f64,
    h_plus_one: f64,
    upper_len: usize,
    wilber_lb: usize,
    oracle_diam: Option<usize>,
    ratio: f64,
}

fn compute_row(family: Family, n: usize, budget: u64) -> Result<(Row, Option<String>), CliError> {
    let legs = family.legs(n);
    let cat = Caterpillar::new(legs.clone()).map_err(usage)?;
    let (wilber_lb, upper_len) = demo_pair_bounds(&cat)?;
    let (oracle_diam, warning) = match oracle::diameter(&cat, budget) {
        Ok(report) => (Some(report.diameter), None),
        Err(Error::BudgetExceeded { count, budget }) => (
            None,
            Some(format!(
                "warning: skipping oracle for {}: {count} trees exceed the budget of {budget}",
                caterpillar_text(&legs)
            )),
        ),
        Err(e) => return Err(from_core(e)),
    };
    if let Some(d) = oracle_diam {
        if !(wilber_lb <= d && d <= upper_len) {
            return Err(CliError::Internal(format!(
                "row {} violates wilber_lb <= oracle_diam <= upper_len: {wilber_lb}, {d}, {upper_len}",
                caterpillar_text(&legs)
            )));
        }
    }
    let budget_value = cat.n() as f64 + cat.m() as f64 * cat.entropy_plus_one();
    let row = Row {
        family: family.name(),
        n: cat.n(),
        m: cat.m(),
        entropy: cat.entropy(),
        h_plus_one: cat.entropy_plus_one(),
        upper_len,
        wilber_lb,
        oracle_diam,
        ratio: upper_len as f64 / budget_value,
        legs,
    };
    Ok((row, warning))
}

fn caterpillar_text(legs: &[usize]) -> String {
    let inner: Vec<String> = legs.iter().map(ToString::to_string).collect();
    format!("C({})", inner.join(","))
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const EXPERIMENT_CSV_HEADER: &str =
    "family,caterpillar,n,m,entropy,h_plus_one,upper_len,wilber_lb,oracle_diam,ratio";

/// `experiment --family ... --n-min A --n-max B`: one row per (family, n),
/// written in input order no matter how many workers run. Returns the CSV
/// and any per-row warnings for standard error. The seed is accepted for
/// reproducibility bookkeeping; the sweep itself is deterministic.
pub fn cmd_experiment(
    families: &[String],
    n_min: usize,
    n_max: usize,
    seed: u64,
    jobs: usize,
    budget: u64,
) -> Result<(String, Vec<String>), CliError> {
    let _ = seed;
    if n_min < 1 || n_min > n_max {
        return Err(CliError::Usage(format!(
            "bad spine range {n_min}..={n_max}"
        )));
    }
    let parsed: Vec<Family> = families
        .iter()
        .map(|f| Family::parse(f))
        .collect::<Result<_, _>>()?;
    if parsed.is_empty() {
        return Err(CliError::Usage("at least one --family is required".into()));
    }
    let specs: Vec<(Family, usize)> = parsed
        .iter()
        .flat_map(|&f| (n_min..=n_max).map(move |n| (f, n)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let results: Result<Vec<(Row, Option<String>)>, CliError> = pool.install(|| {
        specs
            .par_iter()
            .map(|&(f, n)| compute_row(f, n, budget))
            .collect()
    });
    let results = results?;

    let mut csv = String::from(EXPERIMENT_CSV_HEADER);
    csv.push('\n');
    let mut warnings = Vec::new();
    for (row, warning) in results {
        let diam = row.oracle_diam.map(|d| d.to_string()).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{:.6},{:.6},{},{},{},{:.6}\n",
            row.family,
            csv_field(&caterpillar_text(&row.legs)),
            row.n,
            row.m,
            row.entropy,
            row.h_plus_one,
            row.upper_len,
            row.wilber_lb,
            diam,
            row.ratio,
        ));
        warnings.extend(warning);
    }
    Ok((csv, warnings))
}

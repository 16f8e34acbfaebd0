//! Monte Carlo simulation of attacked protocol rounds.
//!
//! Each round Alice picks a basis and a symbol uniformly, the attack isometry
//! acts on her state, and the joint Bob ⊗ Eve outcome is drawn from the exact
//! Born probabilities: Bob measures in Alice's basis, Eve measures her ancilla
//! in the coordinate basis `{block m, position k}` and guesses `k`.
//!
//! Eve's tallies are taken on computational-basis rounds only.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::attack::{build_isometry, AttackParams, ErrorLayout};
use crate::error::{Error, Result};
use crate::info::{guess_pair, guess_probability, i_ab, i_ae};
use crate::optimize::{maximize_w, DEFAULT_W_TOL};
use crate::protocol::ProtocolSpec;

/// How Eve's overlap parameter is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WChoice {
    /// The information-maximizing `w` for the given `D`.
    Auto,
    Value(f64),
}

impl WChoice {
    pub fn resolve(self, spec: &ProtocolSpec, disturbance: f64) -> Result<f64> {
        match self {
            WChoice::Auto => Ok(maximize_w(spec, disturbance, DEFAULT_W_TOL)?.w_opt),
            WChoice::Value(w) => Ok(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub spec: ProtocolSpec,
    pub disturbance: f64,
    pub w: WChoice,
    pub rounds: u64,
    pub seed: u64,
    pub shards: usize,
    pub layout: ErrorLayout,
}

impl SimConfig {
    pub fn new(spec: ProtocolSpec, disturbance: f64, w: WChoice, rounds: u64, seed: u64) -> Self {
        SimConfig {
            spec,
            disturbance,
            w,
            rounds,
            seed,
            shards: rayon::current_num_threads().max(1),
            layout: ErrorLayout::default(),
        }
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shards = shards;
        self
    }
}

/// Dense count table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn new(rows: usize, cols: usize) -> Self {
        Histogram {
            rows,
            cols,
            counts: vec![0; rows * cols],
        }
    }

    /// Build from row-major counts.
    pub fn from_counts(rows: usize, cols: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: counts.len(),
            });
        }
        Ok(Histogram { rows, cols, counts })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.counts[r * self.cols + c]
    }

    pub fn add(&mut self, r: usize, c: usize) {
        self.counts[r * self.cols + c] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn diagonal(&self) -> u64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// Side-by-side concatenation `[self | other]`.
    pub fn hconcat(&self, other: &Histogram) -> Result<Histogram> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let cols = self.cols + other.cols;
        let mut out = Histogram::new(self.rows, cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.counts[r * cols + c] = self.get(r, c);
            }
            for c in 0..other.cols {
                out.counts[r * cols + self.cols + c] = other.get(r, c);
            }
        }
        Ok(out)
    }
}

/// Plug-in Shannon mutual information of a joint count table, in log base `base`.
pub fn empirical_mutual_information(hist: &Histogram, base: usize) -> Result<f64> {
    Ok(mutual_information_with_error(hist, base)?.value)
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Plug-in mutual information and its delta-method standard error.
pub fn mutual_information_with_error(hist: &Histogram, base: usize) -> Result<Estimate> {
    let n = hist.total();
    if n == 0 {
        return Err(Error::EmptyHistogram);
    }
    if base < 2 {
        return Err(Error::InvalidDimension(base));
    }
    let nf = n as f64;
    let ln_base = (base as f64).ln();
    let row: Vec<f64> = (0..hist.rows)
        .map(|r| (0..hist.cols).map(|c| hist.get(r, c)).sum::<u64>() as f64 / nf)
        .collect();
    let col: Vec<f64> = (0..hist.cols)
        .map(|c| (0..hist.rows).map(|r| hist.get(r, c)).sum::<u64>() as f64 / nf)
        .collect();
    let (mut mi, mut second) = (0.0, 0.0);
    for (r, pr) in row.iter().enumerate() {
        for (c, pc) in col.iter().enumerate() {
            let count = hist.get(r, c);
            if count == 0 {
                continue;
            }
            let p = count as f64 / nf;
            let l = (p / (pr * pc)).ln() / ln_base;
            mi += p * l;
            second += p * l * l;
        }
    }
    let var = (second - mi * mi).max(0.0);
    Ok(Estimate {
        value: mi,
        std_error: (var / nf).sqrt(),
    })
}

/// First-order plug-in bias of mutual information: `(R-1)(C-1)/(2N ln base)`.
pub fn plug_in_bias(rows: usize, cols: usize, n: u64, base: usize) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    ((rows - 1) * (cols - 1)) as f64 / (2.0 * n as f64 * (base as f64).ln())
}

fn binomial(successes: u64, n: u64) -> Estimate {
    if n == 0 {
        return Estimate {
            value: f64::NAN,
            std_error: f64::NAN,
        };
    }
    let p = successes as f64 / n as f64;
    Estimate {
        value: p,
        std_error: (p * (1.0 - p) / n as f64).sqrt(),
    }
}

/// Eve's guess histograms split by whether Bob's outcome was correct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EveGivenBob {
    pub correct: Histogram,
    pub error: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derived {
    /// Pooled over all bases.
    pub disturbance: Estimate,
    pub p_eve_correct: Estimate,
    pub p_eve_correct_given_bob_correct: Estimate,
    pub p_eve_correct_given_bob_error: Estimate,
    pub i_ab: Estimate,
    /// Information between Alice's symbol and Eve's (guess, Bob-correct) pair.
    pub i_ae: Estimate,
}

/// Monte Carlo tallies of one simulated session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionStats {
    pub dim: usize,
    pub bases: usize,
    #[serde(rename = "D")]
    pub disturbance: f64,
    pub w: f64,
    pub s: f64,
    pub rounds: u64,
    pub seed: u64,
    pub shards: usize,
    pub basis_labels: Vec<String>,
    pub rounds_per_basis: Vec<u64>,
    pub bob_errors_per_basis: Vec<u64>,
    pub bob_error_rate: Vec<f64>,
    /// `(alice, bob)` counts per basis.
    pub bob_histograms: Vec<Histogram>,
    /// `(alice, eve_guess)` on computational-basis rounds.
    pub eve_joint_histogram: Histogram,
    pub eve_joint_given_bob: EveGivenBob,
    /// `(eve block, (bob - alice) mod d)` on computational-basis rounds.
    pub eve_block_vs_bob_shift: Histogram,
    /// Computational-basis rounds where Eve's block disagrees with the error set of `(alice, bob)`.
    pub partition_mismatches: u64,
    pub derived: Derived,
}

#[derive(Debug, Clone)]
struct Tally {
    rounds: Vec<u64>,
    errors: Vec<u64>,
    bob: Vec<Histogram>,
    eve: Histogram,
    eve_ok: Histogram,
    eve_err: Histogram,
    block_shift: Histogram,
    mismatches: u64,
}

impl Tally {
    fn new(d: usize, bases: usize) -> Self {
        Tally {
            rounds: vec![0; bases],
            errors: vec![0; bases],
            bob: vec![Histogram::new(d, d); bases],
            eve: Histogram::new(d, d),
            eve_ok: Histogram::new(d, d),
            eve_err: Histogram::new(d, d),
            block_shift: Histogram::new(d, d),
            mismatches: 0,
        }
    }

    fn merge(mut self, other: &Tally) -> Self {
        for b in 0..self.rounds.len() {
            self.rounds[b] += other.rounds[b];
            self.errors[b] += other.errors[b];
            self.bob[b].merge(&other.bob[b]);
        }
        self.eve.merge(&other.eve);
        self.eve_ok.merge(&other.eve_ok);
        self.eve_err.merge(&other.eve_err);
        self.block_shift.merge(&other.block_shift);
        self.mismatches += other.mismatches;
        self
    }
}

/// Cumulative outcome distributions, one per `(basis, symbol)`, over the
/// joint index `bob * d² + ancilla`.
fn outcome_tables(params: &AttackParams) -> Result<Vec<Vec<Vec<f64>>>> {
    let iso = build_isometry(params)?;
    let d = params.dim();
    let anc = d * d;
    let bases = params.spec().bases();
    bases
        .iter()
        .map(|basis| {
            basis
                .vectors()
                .iter()
                .map(|input| {
                    let joint = iso.apply(input)?;
                    let mut cdf = Vec::with_capacity(d * anc);
                    let mut acc = 0.0;
                    for bob in basis.vectors() {
                        for k in 0..anc {
                            let amp: Complex64 =
                                (0..d).map(|x| bob[x].conj() * joint[x * anc + k]).sum();
                            acc += amp.norm_sqr();
                            cdf.push(acc);
                        }
                    }
                    Ok(cdf)
                })
                .collect()
        })
        .collect()
}

fn run_shard(
    params: &AttackParams,
    tables: &[Vec<Vec<f64>>],
    partition: &std::collections::BTreeMap<(usize, usize), usize>,
    rounds: u64,
    seed: u64,
    shard: u64,
) -> Tally {
    let d = params.dim();
    let anc = d * d;
    let nb = tables.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    let mut t = Tally::new(d, nb);
    for _ in 0..rounds {
        let b = rng.random_range(0..nb);
        let a = rng.random_range(0..d);
        let cdf = &tables[b][a];
        let u = rng.random::<f64>() * cdf[cdf.len() - 1];
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        let (bob, k) = (idx / anc, idx % anc);

        t.rounds[b] += 1;
        t.bob[b].add(a, bob);
        if bob != a {
            t.errors[b] += 1;
        }
        if b == 0 {
            let (block, guess) = (k / d, k % d);
            t.eve.add(a, guess);
            if bob == a {
                t.eve_ok.add(a, guess);
            } else {
                t.eve_err.add(a, guess);
            }
            t.block_shift.add(block, (bob + d - a) % d);
            let expected = if bob == a { 0 } else { partition[&(a, bob)] };
            if block != expected {
                t.mismatches += 1;
            }
        }
    }
    t
}

/// Run the session. Identical `(seed, shards)` give identical results.
pub fn simulate(config: &SimConfig) -> Result<SessionStats> {
    if config.rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be >= 1".into()));
    }
    if config.shards == 0 {
        return Err(Error::InvalidArgument("shards must be >= 1".into()));
    }
    let spec = config.spec;
    let w = config.w.resolve(&spec, config.disturbance)?;
    let params = AttackParams::new(spec, config.disturbance, w)?.with_layout(config.layout);
    let tables = outcome_tables(&params)?;
    let partition = config.layout.partition(spec.dim())?;

    let shards = config.shards as u64;
    let base = config.rounds / shards;
    let extra = config.rounds % shards;
    let tallies: Vec<Tally> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let n = base + u64::from(s < extra);
            run_shard(&params, &tables, &partition, n, config.seed, s)
        })
        .collect();
    let d = spec.dim();
    let nb = spec.bases_count();
    let t = tallies
        .iter()
        .fold(Tally::new(d, nb), |acc, shard| acc.merge(shard));

    let total_rounds: u64 = t.rounds.iter().sum();
    let total_errors: u64 = t.errors.iter().sum();
    let mut pooled_bob = Histogram::new(d, d);
    for h in &t.bob {
        pooled_bob.merge(h);
    }
    let eve_with_regime = t.eve_ok.hconcat(&t.eve_err)?;
    let comp_rounds = t.rounds[0];
    let derived = Derived {
        disturbance: binomial(total_errors, total_rounds),
        p_eve_correct: binomial(t.eve.diagonal(), comp_rounds),
        p_eve_correct_given_bob_correct: binomial(t.eve_ok.diagonal(), t.eve_ok.total()),
        p_eve_correct_given_bob_error: binomial(t.eve_err.diagonal(), t.eve_err.total()),
        i_ab: mutual_information_with_error(&pooled_bob, d)?,
        i_ae: if comp_rounds > 0 {
            mutual_information_with_error(&eve_with_regime, d)?
        } else {
            Estimate {
                value: f64::NAN,
                std_error: f64::NAN,
            }
        },
    };

    Ok(SessionStats {
        dim: d,
        bases: nb,
        disturbance: config.disturbance,
        w,
        s: params.s(),
        rounds: config.rounds,
        seed: config.seed,
        shards: config.shards,
        basis_labels: spec.bases().iter().map(|b| b.label().to_owned()).collect(),
        bob_error_rate: t
            .rounds
            .iter()
            .zip(&t.errors)
            .map(|(&n, &e)| if n == 0 { 0.0 } else { e as f64 / n as f64 })
            .collect(),
        rounds_per_basis: t.rounds,
        bob_errors_per_basis: t.errors,
        bob_histograms: t.bob,
        eve_joint_histogram: t.eve,
        eve_joint_given_bob: EveGivenBob {
            correct: t.eve_ok,
            error: t.eve_err,
        },
        eve_block_vs_bob_shift: t.block_shift,
        partition_mismatches: t.mismatches,
        derived,
    })
}

/// Largest `|z|` accepted by [`compare_to_analytic`].
pub const Z_LIMIT: f64 = 4.0;
/// Absolute tolerance on plug-in mutual information, before the bias allowance.
pub const MI_ABS_TOL: f64 = 5e-3;

/// One statistical comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub std_error: f64,
    pub z: f64,
    /// Absolute tolerance, for the mutual-information checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tolerance: Option<f64>,
    pub pass: bool,
}

fn z_score(observed: f64, expected: f64, sigma: f64) -> f64 {
    let diff = observed - expected;
    if diff == 0.0 {
        0.0
    } else if sigma > 0.0 {
        diff / sigma
    } else {
        f64::INFINITY.copysign(diff)
    }
}

fn proportion_check(name: String, successes: u64, n: u64, expected: f64) -> Check {
    let observed = successes as f64 / n as f64;
    let sigma = (expected * (1.0 - expected) / n as f64).max(0.0).sqrt();
    let z = z_score(observed, expected, sigma);
    Check {
        name,
        observed,
        expected,
        std_error: sigma,
        z,
        abs_tolerance: None,
        pass: z.abs() <= Z_LIMIT,
    }
}

fn information_check(name: &str, est: Estimate, expected: f64, bias: f64) -> Check {
    let sigma = est.std_error.hypot(bias);
    let z = z_score(est.value, expected, sigma);
    let tol = MI_ABS_TOL + bias;
    Check {
        name: name.to_owned(),
        observed: est.value,
        expected,
        std_error: sigma,
        z,
        abs_tolerance: Some(tol),
        pass: z.abs() <= Z_LIMIT && (est.value - expected).abs() <= tol,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Verdict {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Compare simulated tallies with the closed forms at `(D, w)`.
pub fn compare_to_analytic(
    stats: &SessionStats,
    spec: &ProtocolSpec,
    disturbance: f64,
    w: f64,
) -> Result<Verdict> {
    if stats.dim != spec.dim() || stats.bases != spec.bases_count() {
        return Err(Error::ParameterMismatch(format!(
            "stats are for d = {} with {} bases, analysis asked for d = {} with {} bases",
            stats.dim,
            stats.bases,
            spec.dim(),
            spec.bases_count()
        )));
    }
    let d = spec.dim();
    let mut checks = Vec::new();
    for (b, label) in stats.basis_labels.iter().enumerate() {
        let n = stats.rounds_per_basis[b];
        if n > 0 {
            checks.push(proportion_check(
                format!("D[{label}]"),
                stats.bob_errors_per_basis[b],
                n,
                disturbance,
            ));
        }
    }
    let comp = stats.rounds_per_basis[0];
    if comp > 0 {
        checks.push(proportion_check(
            "P(E)".into(),
            stats.eve_joint_histogram.diagonal(),
            comp,
            guess_probability(spec, disturbance, w)?,
        ));
        let (g1, g2) = guess_pair(spec, disturbance, w)?;
        let ok = &stats.eve_joint_given_bob.correct;
        if ok.total() > 0 {
            checks.push(proportion_check(
                "P(E|bob correct)".into(),
                ok.diagonal(),
                ok.total(),
                g1,
            ));
        }
        let err = &stats.eve_joint_given_bob.error;
        if err.total() > 0 {
            checks.push(proportion_check(
                "P(E|bob error)".into(),
                err.diagonal(),
                err.total(),
                g2,
            ));
        }
        let bias = plug_in_bias(d, 2 * d, comp, d);
        checks.push(information_check(
            "I_AE",
            stats.derived.i_ae,
            i_ae(spec, disturbance, w)?,
            bias,
        ));
    }
    let total: u64 = stats.rounds_per_basis.iter().sum();
    checks.push(information_check(
        "I_AB",
        stats.derived.i_ab,
        i_ab(d, disturbance)?,
        plug_in_bias(d, d, total, d),
    ));
    let pass = checks.iter().all(|c| c.pass);
    Ok(Verdict { checks, pass })
}

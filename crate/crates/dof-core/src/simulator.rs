//! Noiseless linear simulation of transmission plans over random integer
//! channels, with exact decodability certificates.
//!
//! Small plans are run literally: every received row is expanded into a
//! linear form over the information symbols and each receiver's stacked
//! system is reduced exactly. Plans too large for that get a structural
//! certificate built from per-TS rank checks and equation counts.

use crate::durations::{corner_point, STEP_PAIRS};
use crate::error::{DofError, Result};
use crate::math::{bareiss_rank, int, rref_in_place, serde_rat_vec, Field, Fp, RatVector, Rational, P61, P61B};
use crate::regions::{order1_region_achievable, AntennaConfig};
use crate::scheme::{build_order1_scheme_with, build_order2_scheme, Order1Params, SchemeKind, SchemeLayout, SchemePlan, Term, MAX_PLAN_TERMS};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub const CHANNEL_RANGE: i64 = 1_000;
pub const SYMBOL_RANGE: i64 = 100_000;
pub const MAX_RESAMPLES: usize = 16;
/// Extra channel draws after a decode failure before it is reported.
pub const DECODE_RETRIES: usize = 2;
/// Literal runs are allowed while rows·cols·min(rows, cols) stays below this.
pub const LITERAL_BUDGET: u128 = 2_000_000_000;
/// Systems at most this size are reduced over the rationals.
const RATIONAL_LIMIT: usize = 48;

/// Channel coefficients `h[ts][rx][row][antenna]` over the active antennas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub seed: u64,
    pub resamples: usize,
    pub h: Vec<[Vec<Vec<i64>>; 3]>,
}

fn int_rank(rows: &[Vec<i64>], cols: usize) -> usize {
    let m = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    bareiss_rank(m, cols)
}

fn slot_is_generic(blocks: &[Vec<Vec<i64>>; 3], antennas: usize) -> bool {
    let mut all = Vec::new();
    for b in blocks {
        if int_rank(b, antennas) != b.len().min(antennas) {
            return false;
        }
        all.extend(b.iter().cloned());
    }
    int_rank(&all, antennas) == all.len().min(antennas)
}

pub fn draw_channels(plan: &SchemePlan, seed: u64) -> Result<ChannelRealization> {
    draw_channels_with(plan, seed, |rng, _| rng.gen_range(-CHANNEL_RANGE..=CHANNEL_RANGE))
}

/// Draws with a custom sampler (called with the RNG and the attempt number);
/// a draw whose per-TS blocks are not of full rank is discarded.
pub fn draw_channels_with<F>(plan: &SchemePlan, seed: u64, mut sample: F) -> Result<ChannelRealization>
where
    F: FnMut(&mut ChaCha8Rng, usize) -> i64,
{
    let n = plan.config().n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..=MAX_RESAMPLES {
        let mut h = Vec::with_capacity(plan.slots.len());
        let mut generic = true;
        for slot in &plan.slots {
            let blocks = [0, 1, 2].map(|i| (0..n[i]).map(|_| (0..slot.antennas).map(|_| sample(&mut rng, attempt)).collect()).collect());
            generic &= slot_is_generic(&blocks, slot.antennas);
            h.push(blocks);
        }
        if generic {
            return Ok(ChannelRealization { seed, resamples: attempt, h });
        }
    }
    Err(DofError::GenericityExhausted(MAX_RESAMPLES))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Literal run, reduced over the rationals.
    LiteralRational,
    /// Literal run, reduced modulo two independent 61-bit primes.
    LiteralPrimeField,
    /// Per-TS rank checks plus equation counts.
    Structural,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Auto,
    Literal,
    Structural,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceiverReport {
    /// 1-based.
    pub receiver: usize,
    pub unknowns: usize,
    pub delivered_equations: usize,
    pub rank: Option<usize>,
    pub interference_rank: Option<usize>,
    pub decoded: bool,
    pub reconstruction_matches: Option<bool>,
    /// Equations still lacking before the final phase, and what it delivers.
    pub phase3_lacking: usize,
    pub phase3_delivered: usize,
    pub note: Option<String>,
}

impl ReceiverReport {
    pub fn deficit(&self) -> usize {
        match (self.rank, self.interference_rank) {
            (Some(r), Some(ri)) => self.unknowns.saturating_sub(r - ri),
            _ => usize::from(!self.decoded),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodingReport {
    pub config: AntennaConfig,
    pub kind: SchemeKind,
    pub method: Method,
    pub seed: u64,
    pub resamples: usize,
    pub total_ts: usize,
    pub receivers: Vec<ReceiverReport>,
    pub success: bool,
    /// (d1, d2, d3) for order-1 plans, (d12, d23, d13) for order-2 plans.
    #[serde(with = "serde_rat_vec")]
    pub achieved: RatVector,
    pub warnings: Vec<String>,
}

impl DecodingReport {
    pub fn into_result(self) -> Result<Self> {
        if let Some(r) = self.receivers.iter().find(|r| !r.decoded || r.reconstruction_matches == Some(false)) {
            return Err(DofError::DecodeFailure { receiver: r.receiver, deficit: r.deficit().max(1) });
        }
        Ok(self)
    }
}

fn achieved(layout: &SchemeLayout, decoded: &[bool; 3]) -> RatVector {
    let total = int(layout.total_ts() as i64);
    let counts = layout.class_counts();
    (0..3)
        .map(|k| {
            let ok = match layout.kind {
                SchemeKind::Order1 => decoded[k],
                SchemeKind::Order2 => STEP_PAIRS[k].iter().all(|&i| decoded[i]),
            };
            if ok && layout.total_ts() > 0 {
                int(counts[k] as i64) / &total
            } else {
                Rational::from_integer(0.into())
            }
        })
        .collect()
}

/// Rebuilds the full plan a layout describes.
pub fn materialize(layout: &SchemeLayout) -> Result<SchemePlan> {
    match layout.kind {
        SchemeKind::Order2 => build_order2_scheme(&layout.config, &layout.durations),
        SchemeKind::Order1 => {
            let p = Order1Params { a: layout.a, b: layout.b, c: layout.c, case4_extras: layout.extra_rows.iter().any(|&e| e > 0) };
            build_order1_scheme_with(&layout.config, &layout.durations, &p)
        }
    }
}

/// Work estimate of the literal reduction, max over receivers.
pub fn literal_cost(layout: &SchemeLayout) -> u128 {
    let n = layout.original_symbol_count() as u128;
    layout
        .config
        .n()
        .iter()
        .map(|&ni| {
            let r = ni as u128 * layout.total_ts() as u128;
            r * n * r.min(n)
        })
        .max()
        .unwrap_or(0)
}

pub fn literal_feasible(layout: &SchemeLayout) -> bool {
    literal_cost(layout) <= LITERAL_BUDGET && layout.estimated_terms() <= MAX_PLAN_TERMS
}

struct Outcome {
    rank: usize,
    interference_rank: usize,
    matches: bool,
}

/// Expands every received row into a form over the information symbols.
struct Expander<'a, F: Field> {
    plan: &'a SchemePlan,
    ch: &'a ChannelRealization,
    column: Vec<Option<usize>>,
    n: usize,
    cache: HashMap<usize, Vec<F>>,
    /// Per-antenna forms of each summand for TSs with several summands.
    parts: HashMap<usize, Vec<Vec<Vec<F>>>>,
    /// obs[rx][ts][row]
    obs: [Vec<Vec<Vec<F>>>; 3],
}

impl<'a, F: Field> Expander<'a, F> {
    fn new(plan: &'a SchemePlan, ch: &'a ChannelRealization) -> Self {
        let mut column = vec![None; plan.symbols.len()];
        let mut n = 0;
        for s in plan.originals() {
            column[s.id] = Some(n);
            n += 1;
        }
        Expander { plan, ch, column, n, cache: HashMap::new(), parts: HashMap::new(), obs: Default::default() }
    }

    fn add_scaled(acc: &mut [F], c: &F, v: &[F]) {
        for (a, x) in acc.iter_mut().zip(v) {
            if !x.f_is_zero() {
                *a = a.f_add(&c.f_mul(x));
            }
        }
    }

    fn add_symbol(&mut self, acc: &mut [F], c: &F, id: usize) {
        if let Some(col) = self.column[id] {
            acc[col] = acc[col].f_add(c);
            return;
        }
        if !self.cache.contains_key(&id) {
            let v = self.expand_composite(id);
            self.cache.insert(id, v);
        }
        Self::add_scaled(acc, c, &self.cache[&id]);
    }

    fn expand_composite(&mut self, id: usize) -> Vec<F> {
        let plan = self.plan;
        let mut acc = vec![F::f_zero(); self.n];
        for &(coef, term) in plan.symbols[id].definition.iter().flatten() {
            let c = F::f_from_i64(coef);
            match term {
                Term::Sym(s) => self.add_symbol(&mut acc, &c, s),
                Term::Row { ts, rx, row, part: None } => {
                    let r = &self.obs[rx][ts][row];
                    Self::add_scaled(&mut acc, &c, r);
                }
                Term::Row { ts, rx, row, part: Some(p) } => {
                    let h = &self.ch.h[ts][rx][row];
                    let vs = &self.parts[&ts][p];
                    for (a, v) in vs.iter().enumerate() {
                        let k = c.f_mul(&F::f_from_i64(h[a]));
                        Self::add_scaled(&mut acc, &k, v);
                    }
                }
            }
        }
        acc
    }

    fn run(&mut self) {
        let plan = self.plan;
        let n_rx = plan.config().n();
        for slot in &plan.slots {
            let one = F::f_one();
            let mut part_vecs = Vec::with_capacity(slot.parts.len());
            for part in &slot.parts {
                let mut vs = Vec::with_capacity(slot.antennas);
                for id in part {
                    let mut v = vec![F::f_zero(); self.n];
                    if let Some(id) = id {
                        self.add_symbol(&mut v, &one, *id);
                    }
                    vs.push(v);
                }
                part_vecs.push(vs);
            }
            let mut total = part_vecs[0].clone();
            for p in &part_vecs[1..] {
                for (t, v) in total.iter_mut().zip(p) {
                    Self::add_scaled(t, &one, v);
                }
            }
            for rx in 0..3 {
                let rows = (0..n_rx[rx] as usize)
                    .map(|r| {
                        let mut acc = vec![F::f_zero(); self.n];
                        for (a, v) in total.iter().enumerate() {
                            let c = F::f_from_i64(self.ch.h[slot.index][rx][r][a]);
                            Self::add_scaled(&mut acc, &c, v);
                        }
                        acc
                    })
                    .collect();
                self.obs[rx].push(rows);
            }
            if part_vecs.len() > 1 {
                self.parts.insert(slot.index, part_vecs);
            }
        }
    }
}

fn desired_columns(plan: &SchemePlan, rx: usize) -> Vec<bool> {
    plan.originals().map(|s| s.receivers.contains(&rx)).collect()
}

fn decode_receiver<F: Field>(rows: &[Vec<F>], desired: &[bool], truth: &[i64]) -> Outcome {
    let order: Vec<usize> = (0..desired.len()).filter(|&j| !desired[j]).chain((0..desired.len()).filter(|&j| desired[j])).collect();
    let n_int = desired.iter().filter(|&&d| !d).count();
    let truth_f: Vec<F> = truth.iter().map(|&x| F::f_from_i64(x)).collect();
    let mut m: Vec<Vec<F>> = rows
        .iter()
        .map(|r| {
            let mut rhs = F::f_zero();
            for (x, t) in r.iter().zip(&truth_f) {
                rhs = rhs.f_add(&x.f_mul(t));
            }
            let mut v: Vec<F> = order.iter().map(|&j| r[j].clone()).collect();
            v.push(rhs);
            v
        })
        .collect();
    let cols = order.len();
    let pivots = rref_in_place(&mut m, cols);
    let interference_rank = pivots.iter().filter(|&&p| p < n_int).count();
    let mut matches = pivots.len() - interference_rank == cols - n_int;
    for (r, &p) in pivots.iter().enumerate() {
        if p >= n_int && m[r][cols] != truth_f[order[p]] {
            matches = false;
        }
    }
    Outcome { rank: pivots.len(), interference_rank, matches }
}

fn run_field<F: Field>(plan: &SchemePlan, ch: &ChannelRealization, truth: &[i64]) -> Vec<Outcome> {
    let mut ex: Expander<F> = Expander::new(plan, ch);
    ex.run();
    (0..3)
        .map(|rx| {
            let rows: Vec<Vec<F>> = ex.obs[rx].iter().flatten().cloned().collect();
            decode_receiver(&rows, &desired_columns(plan, rx), truth)
        })
        .collect()
}

fn ground_truth(plan: &SchemePlan, seed: u64) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7275_7468);
    plan.originals().map(|_| rng.gen_range(-SYMBOL_RANGE..=SYMBOL_RANGE)).collect()
}

/// Runs a plan over the given channels and certifies every receiver.
pub fn run(plan: &SchemePlan, ch: &ChannelRealization) -> Result<DecodingReport> {
    if ch.h.len() != plan.slots.len() {
        return Err(DofError::DimensionMismatch(plan.slots.len(), ch.h.len()));
    }
    let layout = &plan.layout;
    let truth = ground_truth(plan, ch.seed);
    let n = truth.len();
    let max_rows = layout.config.n().iter().map(|&x| x as usize).max().unwrap_or(0) * plan.total_ts();
    let (method, outcomes) = if n <= RATIONAL_LIMIT && max_rows <= RATIONAL_LIMIT {
        (Method::LiteralRational, run_field::<Rational>(plan, ch, &truth))
    } else {
        let a = run_field::<Fp<P61>>(plan, ch, &truth);
        let b = run_field::<Fp<P61B>>(plan, ch, &truth);
        let merged = a
            .into_iter()
            .zip(b)
            .map(|(x, y)| Outcome {
                rank: x.rank.min(y.rank),
                interference_rank: x.interference_rank.max(y.interference_rank),
                matches: x.matches && y.matches && x.rank == y.rank && x.interference_rank == y.interference_rank,
            })
            .collect();
        (Method::LiteralPrimeField, merged)
    };
    let audit = layout.phase3_audit();
    let cfg_n = layout.config.n();
    let receivers: Vec<ReceiverReport> = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let unknowns = layout.desired_count(i);
            let decoded = o.rank - o.interference_rank == unknowns;
            ReceiverReport {
                receiver: i + 1,
                unknowns,
                delivered_equations: cfg_n[i] as usize * plan.total_ts(),
                rank: Some(o.rank),
                interference_rank: Some(o.interference_rank),
                decoded,
                reconstruction_matches: Some(decoded && o.matches),
                phase3_lacking: audit[i].0,
                phase3_delivered: audit[i].1,
                note: None,
            }
        })
        .collect();
    let ok = [0, 1, 2].map(|i| receivers[i].decoded && receivers[i].reconstruction_matches == Some(true));
    Ok(DecodingReport {
        config: layout.config,
        kind: layout.kind,
        method,
        seed: ch.seed,
        resamples: ch.resamples,
        total_ts: plan.total_ts(),
        success: ok.iter().all(|&x| x),
        achieved: achieved(layout, &ok),
        receivers,
        warnings: layout.warnings.clone(),
    })
}

/// Literal run with fresh channel draws after a failure.
pub fn simulate_plan(plan: &SchemePlan, seed: u64) -> Result<DecodingReport> {
    let mut last = None;
    for retry in 0..=DECODE_RETRIES {
        let s = seed.wrapping_add((retry as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let ch = draw_channels(plan, s)?;
        let mut rep = run(plan, &ch)?;
        rep.seed = seed;
        rep.resamples += retry;
        if rep.success {
            return Ok(rep);
        }
        last = Some(rep);
    }
    Ok(last.expect("at least one attempt"))
}

/// Rank of `take` generic rows stacked from independent receivers, checked
/// on a random integer draw (redrawn on an unlucky draw).
fn generic_stack_rank(rng: &mut ChaCha8Rng, take: usize, cols: usize) -> usize {
    let mut best = 0;
    for _ in 0..MAX_RESAMPLES {
        let rows: Vec<Vec<i64>> = (0..take).map(|_| (0..cols).map(|_| rng.gen_range(-CHANNEL_RANGE..=CHANNEL_RANGE)).collect()).collect();
        best = best.max(int_rank(&rows, cols));
        if best == take.min(cols) {
            break;
        }
    }
    best
}

/// Structural certificate: per-TS local decodability of every order-2 slot
/// and Phase-I step, the extra-symbol alignment conditions, and the final
/// phase equation count.
pub fn certify(layout: &SchemeLayout, seed: u64) -> DecodingReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = layout.config.n().map(|x| x as usize);
    let c = &layout.counts;
    let mut notes: [Vec<String>; 3] = Default::default();

    // order-2 slots: own rows plus the piece rows of the non-member receiver
    for k in 0..3 {
        if c[3 + k] == 0 {
            continue;
        }
        let b = layout.b[k] as usize;
        for &j in &STEP_PAIRS[k] {
            let take = n[j] + layout.piece_rows[k];
            if generic_stack_rank(&mut rng, take, b) < b {
                notes[j].push(format!("order-2 slot {} not resolvable ({} rows for {} streams)", k + 1, take, b));
            }
        }
    }

    if layout.kind == SchemeKind::Order1 {
        let l = &layout.extra_lengths;
        let extras = layout.extra_rows.iter().any(|&e| e > 0);
        // rows of each extra source (step, receiver)
        let avail = [c[0] * n[2], c[1] * n[0], c[2] * n[1]];
        let mask = [0, 1, 2].map(|k| l[k].min(avail[(k + 1) % 3]));
        for (k, &[o1, o2]) in STEP_PAIRS.iter().enumerate() {
            if c[k] == 0 {
                continue;
            }
            let a = layout.a[k] as usize;
            let (under, full) = layout.block_rows[k];
            // receiver reading the extra rows directly, and the one using the
            // order-3 extra block
            let (direct, via_y0) = if k == 2 { (o2, o1) } else { (o1, o2) };
            let mut extra = [0usize; 3];
            if extras {
                let e = layout.extra_rows[k];
                let src_rows = [n[2], n[0], n[1]][k];
                let usable = if e > src_rows || l[k] > avail[k] { 0 } else { e };
                if usable < e {
                    notes[direct].push(format!("extra rows of step {} unavailable", k + 1));
                    notes[via_y0].push(format!("extra rows of step {} unavailable", k + 1));
                }
                extra[direct] = usable;
                let prev = (k + 2) % 3;
                if mask[prev] >= l[k] {
                    extra[via_y0] = usable;
                } else {
                    notes[via_y0].push(format!("order-3 extra block cannot isolate step-{} rows (mask length {} < {})", k + 1, mask[prev], l[k]));
                }
            }
            for (j, own) in [(o1, full), (o2, under)] {
                let take = own + if j == o1 { under } else { full } + extra[j];
                if generic_stack_rank(&mut rng, take, a) < a {
                    notes[j].push(format!("Phase-I step {} leaves {} of {} streams unresolved", k + 1, a - take.min(a), a));
                }
            }
        }
    }

    let audit = layout.phase3_audit();
    for i in 0..3 {
        if audit[i].0 > audit[i].1 {
            notes[i].push(format!("final phase delivers {} of {} lacking equations", audit[i].1, audit[i].0));
        }
    }
    let ok = [0, 1, 2].map(|i| notes[i].is_empty());
    let receivers = (0..3)
        .map(|i| ReceiverReport {
            receiver: i + 1,
            unknowns: layout.desired_count(i),
            delivered_equations: n[i] * layout.total_ts(),
            rank: None,
            interference_rank: None,
            decoded: ok[i],
            reconstruction_matches: None,
            phase3_lacking: audit[i].0,
            phase3_delivered: audit[i].1,
            note: (!ok[i]).then(|| notes[i].join("; ")),
        })
        .collect();
    DecodingReport {
        config: layout.config,
        kind: layout.kind,
        method: Method::Structural,
        seed,
        resamples: 0,
        total_ts: layout.total_ts(),
        receivers,
        success: ok.iter().all(|&x| x),
        achieved: achieved(layout, &ok),
        warnings: layout.warnings.clone(),
    }
}

pub fn simulate(layout: &SchemeLayout, seed: u64, tier: Tier) -> Result<DecodingReport> {
    let literal = match tier {
        Tier::Literal => true,
        Tier::Structural => false,
        Tier::Auto => literal_feasible(layout),
    };
    if literal {
        simulate_plan(&materialize(layout)?, seed)
    } else {
        Ok(certify(layout, seed))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchEntry {
    pub config: AntennaConfig,
    pub seed: u64,
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub method: Option<Method>,
    #[serde(with = "crate::math::serde_rat_vec")]
    pub achieved: RatVector,
    #[serde(with = "crate::math::serde_rat_vec")]
    pub expected: RatVector,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub entries: Vec<BatchEntry>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl BatchSummary {
    pub fn failures(&self) -> impl Iterator<Item = &BatchEntry> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fail)
    }
}

fn verify_one(cfg: &AntennaConfig, seeds: usize) -> Vec<BatchEntry> {
    let entry =
        |seed, verdict, reason: Option<String>, method, achieved, expected| BatchEntry { config: *cfg, seed, verdict, reason, method, achieved, expected };
    let all =
        |verdict, reason: String| -> Vec<BatchEntry> { (1..=seeds as u64).map(|s| entry(s, verdict, Some(reason.clone()), None, vec![], vec![])).collect() };
    let p0 = match corner_point(cfg) {
        Ok(p) => p,
        Err(e @ (DofError::NegativeDuration(_) | DofError::UnsupportedCase(_))) => return all(Verdict::Skip, e.to_string()),
        Err(e) => return all(Verdict::Fail, e.to_string()),
    };
    let layout = match crate::scheme::order1_layout_for(cfg) {
        Ok(l) => l,
        Err(e) => return all(Verdict::Fail, e.to_string()),
    };
    let region = order1_region_achievable(cfg);
    (1..=seeds as u64)
        .map(|seed| match simulate(&layout, seed, Tier::Auto) {
            Err(e) => entry(seed, Verdict::Fail, Some(e.to_string()), None, vec![], p0.clone()),
            Ok(rep) => {
                let mut why = Vec::new();
                if !rep.success {
                    why.extend(
                        rep.receivers
                            .iter()
                            .filter(|r| !r.decoded || r.reconstruction_matches == Some(false))
                            .map(|r| format!("receiver {} fails: {}", r.receiver, r.note.clone().unwrap_or_else(|| format!("deficit {}", r.deficit())))),
                    );
                } else if rep.achieved != p0 {
                    why.push("achieved tuple differs from the corner point".into());
                }
                match &region {
                    Ok(r) if rep.success && !r.contains(&rep.achieved).unwrap_or(false) => why.push("achieved tuple outside the region".into()),
                    Err(e) => why.push(format!("region: {e}")),
                    _ => {}
                }
                let verdict = if why.is_empty() { Verdict::Pass } else { Verdict::Fail };
                entry(seed, verdict, (!why.is_empty()).then(|| why.join("; ")), Some(rep.method), rep.achieved, p0.clone())
            }
        })
        .collect()
}

/// Runs the corner-point pipeline for every config and seed (seeds 1..=n).
pub fn batch_verify(configs: &[AntennaConfig], seeds: usize) -> BatchSummary {
    let entries: Vec<BatchEntry> = configs.par_iter().flat_map_iter(|c| verify_one(c, seeds)).collect();
    let count = |v| entries.iter().filter(|e| e.verdict == v).count();
    BatchSummary { passed: count(Verdict::Pass), failed: count(Verdict::Fail), skipped: count(Verdict::Skip), entries }
}

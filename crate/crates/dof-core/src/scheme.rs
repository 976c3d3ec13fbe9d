//! Transmission plans: which symbols go out on which antennas in which TS,
//! and how order-2/order-3 composites are built from earlier received rows.
//!
//! A plan is described twice: [`SchemeLayout`] holds only counts and is cheap
//! for any durations; [`SchemePlan`] is the materialized per-TS blueprint.

use crate::durations::{order1_slot_antennas, order2_antenna_params, phase1_antennas, slot_increments, solve_order1, PhaseDurations, STEP_PAIRS};
use crate::error::{DofError, Result};
use crate::regions::{AntennaConfig, Order1Case};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Seed of the deterministic Phase-III precoder.
pub const PRECODER_SEED: u64 = 0x5eed_0d0f;
/// Upper bound on definition terms a materialized plan may hold.
pub const MAX_PLAN_TERMS: usize = 20_000_000;
const PRECODER_RANGE: i64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Two-phase scheme for order-2 messages.
    Order2,
    /// Three-phase scheme for order-1 messages.
    Order1,
}

/// Order of the symbols a TS carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Order1,
    Order2,
    Order3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Order-3 sources go out one per antenna.
    Identity,
    /// Every antenna sends a generic combination of all sources.
    Dense,
}

/// A scalar the transmitter can form. `Row` is receiver `rx`'s (0-based)
/// `row`-th received value in TS `ts`, restricted to one summand of the
/// transmitted vector when `part` is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Sym(usize),
    Row { ts: usize, rx: usize, row: usize, part: Option<usize> },
}

pub type LinearForm = Vec<(i64, Term)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symbol {
    pub id: usize,
    pub name: String,
    pub block: String,
    pub order: u8,
    /// 0-based receivers that want the symbol.
    pub receivers: Vec<usize>,
    /// `None` for information symbols; an empty form is the zero symbol.
    pub definition: Option<LinearForm>,
}

impl Symbol {
    pub fn is_original(&self) -> bool {
        self.definition.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSlot {
    pub index: usize,
    pub phase: Phase,
    pub antennas: usize,
    /// `parts[p][antenna]`: the transmitted vector is the sum of its parts;
    /// `None` is a silent entry.
    pub parts: Vec<Vec<Option<usize>>>,
}

/// Antenna parameters of a three-phase order-1 plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order1Params {
    pub a: [u32; 3],
    pub b: [u32; 3],
    pub c: u32,
    /// Add the extra order-2/order-3 symbols that fill A_k = M.
    pub case4_extras: bool,
}

impl Order1Params {
    pub fn for_config(c: &AntennaConfig) -> Result<Order1Params> {
        Ok(Order1Params { a: phase1_antennas(c)?, b: order1_slot_antennas(c)?, c: c.n3, case4_extras: c.order1_case() == Order1Case::Case4 })
    }
}

/// Block names per Phase-I step: the two order-1 summands and the order-2 block.
const STEP_NAMES: [[&str; 3]; 3] = [["x_a1", "x_b1", "x_ab"], ["x_b2", "x_c1", "x_bc"], ["x_a2", "x_c2", "x_ac"]];
const SLOT_NAMES: [&str; 3] = ["x_ab", "x_bc", "x_ac"];

/// Case-4 row source k: (Phase-I step, receiver). Extra order-2 symbol k
/// takes its own-symbol rows from source k and its masking rows from
/// source k+1.
const EXTRA_SOURCES: [(usize, usize); 3] = [(0, 2), (1, 0), (2, 1)];
/// Which summand of the source step the masked rows project onto.
const EXTRA_PARTS: [usize; 3] = [0, 0, 1];

/// Source of the order-3 pieces u, v, w: (slot, receiver).
const PIECE_SOURCES: [(usize, usize); 3] = [(0, 2), (1, 0), (2, 1)];

/// Count-only description of a plan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeLayout {
    pub config: AntennaConfig,
    pub kind: SchemeKind,
    pub durations: PhaseDurations,
    /// T1, T2, T3, T12, T23, T13, T as TS counts.
    pub counts: [usize; 7],
    /// Phase-I antennas (zero for order-2 plans).
    pub a: [u32; 3],
    pub b: [u32; 3],
    pub c: u32,
    /// Per Phase-I TS: (underlined rows, full rows) of the step's order-2 block.
    pub block_rows: [(usize, usize); 3],
    /// Case-4 extra rows per Phase-I TS (e_k) and extra-symbol lengths (T_k·e_k).
    pub extra_rows: [usize; 3],
    pub extra_lengths: [usize; 3],
    /// Entries sent through each order-2 slot.
    pub slot_contents: [usize; 3],
    /// Rows per slot TS of the pieces u, v, w and their total lengths.
    pub piece_rows: [usize; 3],
    pub piece_lengths: [usize; 3],
    pub y0_length: usize,
    /// Number of order-3 source composites.
    pub source_length: usize,
    pub placement: Placement,
    pub warnings: Vec<String>,
}

fn ts_counts(d: &PhaseDurations) -> Result<[usize; 7]> {
    if !d.is_integral() || !d.is_nonnegative() {
        return Err(DofError::InvalidInput("durations must be nonnegative whole TS counts".into()));
    }
    Ok(d.counts())
}

impl SchemeLayout {
    pub fn total_ts(&self) -> usize {
        self.counts.iter().sum()
    }

    fn phase1_ts(&self) -> usize {
        self.counts[..3].iter().sum()
    }

    /// First TS of Phase-I step k.
    pub fn step_start(&self, k: usize) -> usize {
        self.counts[..k].iter().sum()
    }

    /// First TS of order-2 slot k.
    pub fn slot_start(&self, k: usize) -> usize {
        self.phase1_ts() + self.counts[3..3 + k].iter().sum::<usize>()
    }

    pub fn phase3_start(&self) -> usize {
        self.phase1_ts() + self.counts[3..6].iter().sum::<usize>()
    }

    /// Information symbols carried by the plan.
    pub fn original_symbol_count(&self) -> usize {
        match self.kind {
            SchemeKind::Order2 => self.slot_contents.iter().sum(),
            SchemeKind::Order1 => (0..3).map(|k| 2 * self.counts[k] * self.a[k] as usize).sum(),
        }
    }

    /// Information symbols desired by receiver `i` (0-based).
    pub fn desired_count(&self, i: usize) -> usize {
        (0..3)
            .filter(|&k| STEP_PAIRS[k].contains(&i))
            .map(|k| match self.kind {
                SchemeKind::Order2 => self.slot_contents[k],
                SchemeKind::Order1 => self.counts[k] * self.a[k] as usize,
            })
            .sum()
    }

    /// Symbols per message class: (d1, d2, d3) numerators for order-1 plans,
    /// (d12, d23, d13) numerators for order-2 plans.
    pub fn class_counts(&self) -> [usize; 3] {
        match self.kind {
            SchemeKind::Order2 => self.slot_contents,
            SchemeKind::Order1 => [0, 1, 2].map(|i| self.desired_count(i)),
        }
    }

    /// Per receiver: equations still lacking after the order-2 slots and the
    /// equations Phase III delivers.
    pub fn phase3_audit(&self) -> [(usize, usize); 3] {
        let n = self.config.n();
        let inc = slot_increments(n, self.b);
        let t = self.counts[6];
        [0, 1, 2].map(|i| {
            let lack: i64 = (0..3).map(|s| self.counts[3 + s] as i64 * inc[i][s]).sum::<i64>() + self.y0_length as i64;
            (lack as usize, t * n[i].min(self.c) as usize)
        })
    }

    /// Estimated definition terms of the materialized plan.
    pub fn estimated_terms(&self) -> usize {
        let x_abc = self.counts[6] * self.c as usize;
        let per_abc = match self.placement {
            Placement::Identity => 1,
            Placement::Dense => self.source_length.max(1),
        };
        self.original_symbol_count() + 2 * self.slot_contents.iter().sum::<usize>() + 3 * self.source_length + x_abc * per_abc
    }
}

fn check_antennas(cfg: &AntennaConfig, what: &str, n: u32) -> Result<()> {
    if n == 0 || n > cfg.m {
        return Err(DofError::InvalidInput(format!("{what} = {n} must lie in 1..=M ({})", cfg.m)));
    }
    Ok(())
}

fn pos(x: i64) -> usize {
    x.max(0) as usize
}

/// Fills in the pieces, order-3 sources and placement shared by both schemes.
fn finish_layout(mut l: SchemeLayout) -> Result<SchemeLayout> {
    let n = l.config.n();
    let b = l.b;
    let rows = [pos(b[0] as i64 - n[0] as i64), pos(b[1] as i64 - n[1] as i64), pos(b[2] as i64 - n[0] as i64)];
    for (k, &(slot, rx)) in PIECE_SOURCES.iter().enumerate() {
        if rows[k] > n[rx] as usize {
            return Err(DofError::SizeMismatch(format!(
                "piece {} needs {} rows per TS of receiver {} which has {}",
                ["u", "v", "w"][k],
                rows[k],
                rx + 1,
                n[rx]
            )));
        }
        l.piece_lengths[k] = rows[k] * l.counts[3 + slot];
    }
    l.piece_rows = rows;
    let [u, v, w] = l.piece_lengths;
    l.source_length = u.max(v) + w.max(v) + l.y0_length;
    let cap = l.counts[6] * l.c as usize;
    let min_n = *n.iter().min().expect("three receivers");
    l.placement = if l.c <= min_n && l.source_length <= cap { Placement::Identity } else { Placement::Dense };
    if l.counts[6] == 0 && l.source_length > 0 {
        l.warnings.push(format!("{} order-3 sources but no final-phase TS", l.source_length));
    }
    Ok(l)
}

pub fn order2_layout(cfg: &AntennaConfig, d: &PhaseDurations) -> Result<SchemeLayout> {
    let counts = ts_counts(d)?;
    if counts[..3].iter().any(|&x| x > 0) {
        return Err(DofError::InvalidInput("order-2 plans have no order-1 phase".into()));
    }
    let (b1, b2, b3, c) = order2_antenna_params(cfg)?;
    let b = [b1, b2, b3];
    let l = SchemeLayout {
        config: *cfg,
        kind: SchemeKind::Order2,
        durations: d.clone(),
        counts,
        a: [0; 3],
        b,
        c,
        block_rows: [(0, 0); 3],
        extra_rows: [0; 3],
        extra_lengths: [0; 3],
        slot_contents: [0, 1, 2].map(|k| counts[3 + k] * b[k] as usize),
        piece_rows: [0; 3],
        piece_lengths: [0; 3],
        y0_length: 0,
        source_length: 0,
        placement: Placement::Identity,
        warnings: Vec::new(),
    };
    finish_layout(l)
}

pub fn order1_layout(cfg: &AntennaConfig, d: &PhaseDurations, p: &Order1Params) -> Result<SchemeLayout> {
    let counts = ts_counts(d)?;
    let n = cfg.n();
    for k in 0..3 {
        check_antennas(cfg, &format!("A{}", k + 1), p.a[k])?;
        check_antennas(cfg, &format!("B{}", k + 1), p.b[k])?;
    }
    check_antennas(cfg, "C", p.c)?;
    let mut warnings = Vec::new();
    let mut block_rows = [(0, 0); 3];
    let mut extra_rows = [0; 3];
    let mut extra_lengths = [0; 3];
    let mut slot_contents = [0; 3];
    for (k, &[o1, o2]) in STEP_PAIRS.iter().enumerate() {
        let total = p.a[k].min(n[o1] + n[o2]) as usize;
        let full = n[o1] as usize;
        if total < full {
            return Err(DofError::SizeMismatch(format!("step {}: A{} = {} is below N{} = {}", k + 1, k + 1, p.a[k], o1 + 1, full)));
        }
        block_rows[k] = (total - full, full);
        let missing = p.a[k] as usize - total;
        if p.case4_extras {
            extra_rows[k] = missing;
            extra_lengths[k] = counts[k] * missing;
        } else if missing > 0 && counts[k] > 0 {
            warnings.push(format!("step {} sends {} more streams per TS than its order-2 block covers", k + 1, missing));
        }
        slot_contents[k] = counts[k] * total + extra_lengths[k];
        let capacity = counts[3 + k] * p.b[k] as usize;
        if slot_contents[k] != capacity {
            return Err(DofError::RelationViolated(format!(
                "slot {}: {} order-2 entries vs {} TS x {} antennas",
                SLOT_NAMES[k],
                slot_contents[k],
                counts[3 + k],
                p.b[k]
            )));
        }
    }
    if p.case4_extras {
        for (k, &(step, rx)) in EXTRA_SOURCES.iter().enumerate() {
            let per_ts = n[rx] as usize;
            let avail = counts[step] * per_ts;
            if extra_rows[k] > per_ts && counts[k] > 0 {
                warnings.push(format!("extra symbol {}: {} rows per TS requested from receiver {} which has {}", k + 1, extra_rows[k], rx + 1, per_ts));
            }
            // source k also masks extra symbol k-1
            let km = (k + 2) % 3;
            for (who, need) in [(k, extra_lengths[k]), (km, extra_lengths[km])] {
                if need > avail {
                    warnings.push(format!(
                        "extra symbol {} needs {} rows of receiver {} in step {}, only {} exist; zero-padded",
                        who + 1,
                        need,
                        rx + 1,
                        step + 1,
                        avail
                    ));
                }
            }
        }
        if extra_lengths.iter().any(|&x| x != extra_lengths[0]) {
            warnings.push(format!("extra symbol lengths differ: {:?}", extra_lengths));
        }
    }
    let l = SchemeLayout {
        config: *cfg,
        kind: SchemeKind::Order1,
        durations: d.clone(),
        counts,
        a: p.a,
        b: p.b,
        c: p.c,
        block_rows,
        extra_rows,
        extra_lengths,
        slot_contents,
        piece_rows: [0; 3],
        piece_lengths: [0; 3],
        y0_length: extra_lengths.iter().copied().max().unwrap_or(0),
        source_length: 0,
        placement: Placement::Identity,
        warnings,
    };
    finish_layout(l)
}

/// Layout of the corner-point scheme for a Case 2/3/4 config.
pub fn order1_layout_for(cfg: &AntennaConfig) -> Result<SchemeLayout> {
    let (d, _) = solve_order1(cfg)?;
    order1_layout(cfg, &d, &Order1Params::for_config(cfg)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemePlan {
    pub layout: SchemeLayout,
    pub symbols: Vec<Symbol>,
    pub slots: Vec<TimeSlot>,
}

struct Builder {
    symbols: Vec<Symbol>,
    slots: Vec<TimeSlot>,
}

impl Builder {
    fn add(&mut self, name: String, block: &str, order: u8, receivers: Vec<usize>, def: Option<LinearForm>) -> usize {
        let id = self.symbols.len();
        self.symbols.push(Symbol { id, name, block: block.into(), order, receivers, definition: def });
        id
    }

    fn add_block(&mut self, block: &str, order: u8, receivers: &[usize], defs: Vec<Option<LinearForm>>) -> Vec<usize> {
        defs.into_iter().enumerate().map(|(j, d)| self.add(format!("{block}[{j}]"), block, order, receivers.to_vec(), d)).collect()
    }

    fn push_slot(&mut self, phase: Phase, antennas: usize, parts: Vec<Vec<Option<usize>>>) {
        let index = self.slots.len();
        self.slots.push(TimeSlot { index, phase, antennas, parts });
    }

    /// Sends `content` through `count` TSs of `antennas` each.
    fn transmit(&mut self, phase: Phase, count: usize, antennas: usize, content: &[usize]) {
        for t in 0..count {
            let part = (0..antennas).map(|a| content.get(t * antennas + a).copied()).collect();
            self.push_slot(phase, antennas, vec![part]);
        }
    }
}

fn row(ts: usize, rx: usize, row: usize, part: Option<usize>) -> Term {
    Term::Row { ts, rx, row, part }
}

/// Received rows of `rx` over `count` TSs from `start`, taking `e` rows of
/// every TS before the remaining rows of any TS.
fn per_ts_first(start: usize, count: usize, n_rows: usize, e: usize) -> Vec<(usize, usize)> {
    let first = e.min(n_rows);
    let mut out = Vec::with_capacity(count * n_rows);
    for t in 0..count {
        out.extend((0..first).map(|r| (start + t, r)));
    }
    for t in 0..count {
        out.extend((first..n_rows).map(|r| (start + t, r)));
    }
    out
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Deterministic precoder coefficient for TS `t`, antenna `j`, source `a`.
pub fn precoder_coefficient(t: usize, j: usize, a: usize) -> i64 {
    let h = splitmix64(splitmix64(splitmix64(PRECODER_SEED ^ t as u64) ^ j as u64) ^ a as u64);
    (h % (2 * PRECODER_RANGE as u64 + 1)) as i64 - PRECODER_RANGE
}

fn guard(l: &SchemeLayout) -> Result<()> {
    let terms = l.estimated_terms();
    if terms > MAX_PLAN_TERMS {
        return Err(DofError::TooLarge(format!("{terms} definition terms exceed {MAX_PLAN_TERMS}")));
    }
    Ok(())
}

/// Order-2 slots (already holding `contents`) followed by the order-3 phase.
fn build_slots_and_final(b: &mut Builder, l: &SchemeLayout, contents: [Vec<usize>; 3], y0: &[usize]) {
    for k in 0..3 {
        b.transmit(Phase::Order2, l.counts[3 + k], l.b[k] as usize, &contents[k]);
    }
    let pieces: Vec<Vec<Term>> = PIECE_SOURCES
        .iter()
        .enumerate()
        .map(|(k, &(slot, rx))| {
            let start = l.slot_start(slot);
            (0..l.counts[3 + slot]).flat_map(|t| (0..l.piece_rows[k]).map(move |r| row(start + t, rx, r, None))).collect()
        })
        .collect();
    let (u, v, w) = (&pieces[0], &pieces[1], &pieces[2]);
    let sum = |x: &[Term], y: &[Term]| -> Vec<Option<LinearForm>> {
        (0..x.len().max(y.len())).map(|j| Some(x.get(j).into_iter().chain(y.get(j)).map(|&t| (1, t)).collect())).collect()
    };
    let mut defs = sum(u, v);
    defs.extend(sum(w, v));
    defs.extend(y0.iter().map(|&id| Some(vec![(1, Term::Sym(id))])));
    let sources = b.add_block("x_abc_src", 3, &[0, 1, 2], defs);
    let (t_count, c) = (l.counts[6], l.c as usize);
    let start = l.phase3_start();
    let x_abc: Vec<Option<LinearForm>> = (0..t_count * c)
        .map(|k| {
            Some(match l.placement {
                Placement::Identity => sources.get(k).map(|&s| vec![(1, Term::Sym(s))]).unwrap_or_default(),
                Placement::Dense => {
                    let (t, j) = (start + k / c, k % c);
                    sources.iter().enumerate().map(|(a, &s)| (precoder_coefficient(t, j, a), Term::Sym(s))).collect()
                }
            })
        })
        .collect();
    let x_abc = b.add_block("x_abc", 3, &[0, 1, 2], x_abc);
    b.transmit(Phase::Order3, t_count, c, &x_abc);
}

pub fn build_order2_scheme(cfg: &AntennaConfig, d: &PhaseDurations) -> Result<SchemePlan> {
    let l = order2_layout(cfg, d)?;
    guard(&l)?;
    let mut b = Builder { symbols: Vec::new(), slots: Vec::new() };
    let contents = [0, 1, 2].map(|k| {
        let defs = vec![None; l.slot_contents[k]];
        b.add_block(SLOT_NAMES[k], 2, &STEP_PAIRS[k], defs)
    });
    build_slots_and_final(&mut b, &l, contents, &[]);
    finish_plan(l, b)
}

/// Three-phase corner-point scheme for a Case 2/3/4 config.
pub fn build_order1_scheme(cfg: &AntennaConfig) -> Result<SchemePlan> {
    let (d, _) = solve_order1(cfg)?;
    build_order1_scheme_with(cfg, &d, &Order1Params::for_config(cfg)?)
}

pub fn build_order1_scheme_with(cfg: &AntennaConfig, d: &PhaseDurations, p: &Order1Params) -> Result<SchemePlan> {
    let l = order1_layout(cfg, d, p)?;
    guard(&l)?;
    let n = cfg.n();
    let mut b = Builder { symbols: Vec::new(), slots: Vec::new() };

    // Phase I: coded sums
    for (k, &[o1, o2]) in STEP_PAIRS.iter().enumerate() {
        let a = l.a[k] as usize;
        let [n1, n2, _] = STEP_NAMES[k];
        for t in 0..l.counts[k] {
            let first = (0..a).map(|j| Some(b.add(format!("{n1}[{}]", t * a + j), n1, 1, vec![o1], None))).collect();
            let second = (0..a).map(|j| Some(b.add(format!("{n2}[{}]", t * a + j), n2, 1, vec![o2], None))).collect();
            b.push_slot(Phase::Order1, a, vec![first, second]);
        }
    }

    // order-2 blocks: [underlined H_o2 x_o1 ; H_o1 x_o2]
    let mut contents: [Vec<usize>; 3] = Default::default();
    for (k, &[o1, o2]) in STEP_PAIRS.iter().enumerate() {
        let start = l.step_start(k);
        let (under, full) = l.block_rows[k];
        let mut defs = Vec::new();
        for t in 0..l.counts[k] {
            defs.extend((0..under).map(|r| Some(vec![(1, row(start + t, o2, r, Some(0)))])));
        }
        for t in 0..l.counts[k] {
            defs.extend((0..full).map(|r| Some(vec![(1, row(start + t, o1, r, Some(1)))])));
        }
        contents[k] = b.add_block(STEP_NAMES[k][2], 2, &[o1, o2], defs);
    }

    // Case-4 extras
    let mut y0 = Vec::new();
    if p.case4_extras {
        let sources: Vec<Vec<(usize, usize)>> = EXTRA_SOURCES
            .iter()
            .enumerate()
            .map(|(k, &(step, rx))| per_ts_first(l.step_start(step), l.counts[step], n[rx] as usize, l.extra_rows[k]))
            .collect();
        let mask = |k: usize, j: usize| -> Option<Term> {
            let s = (k + 1) % 3;
            sources[s].get(j).map(|&(ts, r)| row(ts, EXTRA_SOURCES[s].1, r, None))
        };
        for k in 0..3 {
            let defs = (0..l.extra_lengths[k])
                .map(|j| {
                    let own = sources[k].get(j).map(|&(ts, r)| row(ts, EXTRA_SOURCES[k].1, r, Some(EXTRA_PARTS[k])));
                    Some(own.into_iter().chain(mask(k, j)).map(|t| (1, t)).collect())
                })
                .collect();
            let ids = b.add_block(&format!("y0_{}", k + 1), 2, &STEP_PAIRS[k], defs);
            contents[k].extend(ids);
        }
        let defs = (0..l.y0_length).map(|j| Some((0..3).filter(|&k| j < l.extra_lengths[k]).filter_map(|k| mask(k, j)).map(|t| (1, t)).collect())).collect();
        y0 = b.add_block("y0", 3, &[0, 1, 2], defs);
    }
    for k in 0..3 {
        if contents[k].len() != l.slot_contents[k] {
            return Err(DofError::RelationViolated(format!("slot {} content mismatch", SLOT_NAMES[k])));
        }
    }
    build_slots_and_final(&mut b, &l, contents, &y0);
    finish_plan(l, b)
}

fn finish_plan(layout: SchemeLayout, b: Builder) -> Result<SchemePlan> {
    let plan = SchemePlan { layout, symbols: b.symbols, slots: b.slots };
    plan.validate()?;
    Ok(plan)
}

/// The two-phase (1,1,1,2) plan with one TS per slot and two final TSs.
pub fn toy_two_phase_plan() -> SchemePlan {
    let cfg = AntennaConfig::new(1, 1, 1, 2).expect("valid config");
    build_order2_scheme(&cfg, &PhaseDurations::from_ints([0, 0, 0, 1, 1, 1, 2])).expect("toy plan builds")
}

/// The three-phase (1,1,1,2) toy: one TS per Phase-I step on two antennas.
pub fn toy_three_phase_plan() -> SchemePlan {
    let cfg = AntennaConfig::new(1, 1, 1, 2).expect("valid config");
    let p = Order1Params { a: [2, 2, 2], b: [2, 2, 2], c: 1, case4_extras: false };
    build_order1_scheme_with(&cfg, &PhaseDurations::from_ints([1, 1, 1, 1, 1, 1, 2]), &p).expect("toy plan builds")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeEntry {
    pub symbol: usize,
    pub name: String,
    pub known: LinearForm,
    pub unknown: LinearForm,
}

impl SchemePlan {
    pub fn config(&self) -> &AntennaConfig {
        &self.layout.config
    }

    pub fn total_ts(&self) -> usize {
        self.slots.len()
    }

    pub fn symbol(&self, id: usize) -> &Symbol {
        &self.symbols[id]
    }

    pub fn symbols_in(&self, block: &str) -> Vec<&Symbol> {
        self.symbols.iter().filter(|s| s.block == block).collect()
    }

    pub fn originals(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter().filter(|s| s.is_original())
    }

    /// Symbol ids grouped by block.
    pub fn symbol_table(&self) -> BTreeMap<String, Vec<usize>> {
        let mut t: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for s in &self.symbols {
            t.entry(s.block.clone()).or_default().push(s.id);
        }
        t
    }

    /// Latest TS whose received rows the symbol depends on.
    fn latest_rows(&self) -> Vec<Option<usize>> {
        let mut out: Vec<Option<usize>> = vec![None; self.symbols.len()];
        // definitions only reference symbols created earlier
        for s in &self.symbols {
            let Some(def) = &s.definition else { continue };
            out[s.id] = def
                .iter()
                .filter_map(|(_, t)| match *t {
                    Term::Row { ts, .. } => Some(ts),
                    Term::Sym(id) => out[id],
                })
                .max();
        }
        out
    }

    /// Structural checks: sizes, antenna budget, term references and causality.
    pub fn validate(&self) -> Result<()> {
        let l = &self.layout;
        if self.slots.len() != l.total_ts() {
            return Err(DofError::RelationViolated(format!("{} TS vs {} expected", self.slots.len(), l.total_ts())));
        }
        let n = l.config.n();
        for s in &self.symbols {
            for (_, t) in s.definition.iter().flatten() {
                match *t {
                    Term::Sym(id) if id >= s.id => return Err(DofError::InvalidInput(format!("{} references a later symbol", s.name))),
                    Term::Row { ts, rx, row, part } => {
                        let slot = self.slots.get(ts).ok_or_else(|| DofError::InvalidInput(format!("{}: bad TS", s.name)))?;
                        if rx > 2 || row >= n[rx] as usize || part.is_some_and(|p| p >= slot.parts.len()) {
                            return Err(DofError::InvalidInput(format!("{}: bad row reference", s.name)));
                        }
                    }
                    _ => {}
                }
            }
        }
        let latest = self.latest_rows();
        for slot in &self.slots {
            if slot.antennas > l.config.m as usize {
                return Err(DofError::InvalidInput(format!("TS {} uses {} antennas", slot.index, slot.antennas)));
            }
            for id in slot.parts.iter().flatten().flatten() {
                if latest[*id].is_some_and(|ts| ts >= slot.index) {
                    return Err(DofError::InvalidInput(format!(
                        "TS {} sends {} which needs channel state of TS {}",
                        slot.index,
                        self.symbols[*id].name,
                        latest[*id].unwrap_or_default()
                    )));
                }
            }
        }
        Ok(())
    }

    /// For every composite, the terms receiver `receiver` (1-based) can form
    /// from its own past observations, and the rest.
    pub fn receiver_knowledge(&self, receiver: usize) -> Result<Vec<KnowledgeEntry>> {
        if !(1..=3).contains(&receiver) {
            return Err(DofError::InvalidInput(format!("receiver {receiver} is not 1, 2 or 3")));
        }
        let rx = receiver - 1;
        let mut fully_known = vec![false; self.symbols.len()];
        let mut out = Vec::new();
        for s in &self.symbols {
            let Some(def) = &s.definition else { continue };
            let (known, unknown): (LinearForm, LinearForm) = def.iter().partition(|(_, t)| match *t {
                Term::Row { rx: r, part: None, .. } => r == rx,
                Term::Row { .. } => false,
                Term::Sym(id) => fully_known[id],
            });
            fully_known[s.id] = unknown.is_empty();
            out.push(KnowledgeEntry { symbol: s.id, name: s.name.clone(), known, unknown });
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let slots: Vec<serde_json::Value> = self
            .slots
            .iter()
            .map(|s| {
                let map: Vec<serde_json::Value> = s
                    .parts
                    .iter()
                    .enumerate()
                    .flat_map(|(p, part)| {
                        part.iter().enumerate().filter_map(move |(a, id)| {
                            id.map(|id| serde_json::json!({"part": p, "antenna": a, "symbol_id": id, "coefficient_source": "identity"}))
                        })
                    })
                    .collect();
                serde_json::json!({"index": s.index, "phase": s.phase, "antennas": s.antennas, "transmit_map": map})
            })
            .collect();
        let composites: Vec<&Symbol> = self.symbols.iter().filter(|s| !s.is_original()).collect();
        let originals: Vec<serde_json::Value> =
            self.originals().map(|s| serde_json::json!({"id": s.id, "name": s.name, "block": s.block, "receivers": s.receivers})).collect();
        serde_json::json!({
            "config": self.layout.config.to_string(),
            "kind": self.layout.kind,
            "durations": self.layout.durations,
            "placement": self.layout.placement,
            "time_slots": slots,
            "symbols": originals,
            "composites": composites,
            "warnings": self.layout.warnings,
        })
    }
}

/// Counts composites whose definition mentions a row of each TS, used by tests
/// and diagnostics.
pub fn row_usage(plan: &SchemePlan) -> HashMap<usize, usize> {
    let mut m = HashMap::new();
    for s in &plan.symbols {
        for (_, t) in s.definition.iter().flatten() {
            if let Term::Row { ts, .. } = t {
                *m.entry(*ts).or_insert(0) += 1;
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a: u32, b: u32, c: u32, m: u32) -> AntennaConfig {
        AntennaConfig::new(a, b, c, m).unwrap()
    }

    #[test]
    fn per_ts_first_order() {
        assert_eq!(per_ts_first(4, 2, 3, 1), vec![(4, 0), (5, 0), (4, 1), (4, 2), (5, 1), (5, 2)]);
        assert_eq!(per_ts_first(0, 2, 1, 3), vec![(0, 0), (1, 0)]);
    }

    #[test]
    fn precoder_is_deterministic_and_bounded() {
        assert_eq!(precoder_coefficient(3, 1, 7), precoder_coefficient(3, 1, 7));
        assert_ne!(precoder_coefficient(3, 1, 7), precoder_coefficient(3, 1, 8));
        assert!((0..100).all(|a| precoder_coefficient(0, 0, a).abs() <= PRECODER_RANGE));
    }

    #[test]
    fn toy_two_phase_layout() {
        let p = toy_two_phase_plan();
        assert_eq!(p.total_ts(), 5);
        assert_eq!(p.layout.placement, Placement::Identity);
        assert_eq!(p.layout.source_length, 2);
    }

    #[test]
    fn case4_slots_fill_exactly() {
        let l = order1_layout_for(&cfg(1, 1, 1, 3)).unwrap();
        assert_eq!(l.counts, [2, 2, 2, 3, 3, 3, 8]);
        assert_eq!(l.slot_contents, [6, 6, 6]);
        assert_eq!(l.extra_lengths, [2, 2, 2]);
        assert!(l.warnings.is_empty(), "{:?}", l.warnings);
    }

    #[test]
    fn relation_violation_detected() {
        let c = cfg(3, 3, 4, 7);
        let p = Order1Params::for_config(&c).unwrap();
        let d = PhaseDurations::from_ints([0, 6, 6, 0, 7, 6, 7]);
        assert!(matches!(order1_layout(&c, &d, &p), Err(DofError::RelationViolated(_))));
    }
}

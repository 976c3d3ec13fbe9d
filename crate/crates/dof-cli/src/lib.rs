//! Command implementations behind the `dof` binary. Each command builds a
//! typed report; `render` turns it into JSON or CSV.

use clap::{Parser, Subcommand, ValueEnum};
use dof_core::durations::{
    corner_planes, corner_point, order2_durations_for_target, order2_tuple, solve_order1, verify_transformation, Branch, PhaseDurations,
};
use dof_core::geometry::{eliminate_redundant, set_equal, subset, Halfspace, Region};
use dof_core::math::{fmt_rat, parse_rat, serde_rat_vec, to_f64, RatVector, Rational};
use dof_core::regions::{
    condition_star, corollary_checks, order1_outer, order1_outer_genie, order1_region_achievable, order1_region_nocsit, order2_outer_full,
    order2_region_delayed, order2_region_nocsit, sum_dof, AntennaConfig, Order1Case, Star,
};
use dof_core::scheme::{order1_layout_for, order2_layout};
use dof_core::simulator::{simulate, DecodingReport, Tier};
use dof_core::DofError;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;
pub const EXIT_DECODE_FAILURE: i32 = 3;
pub const EXIT_INVALID_INPUT: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Messages {
    Order1,
    Order2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Delayed,
    Nocsit,
    Outer,
    Achievable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TierArg {
    Auto,
    Literal,
    Structural,
}

impl From<TierArg> for Tier {
    fn from(t: TierArg) -> Tier {
        match t {
            TierArg::Auto => Tier::Auto,
            TierArg::Literal => Tier::Literal,
            TierArg::Structural => Tier::Structural,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dof", version, about = "DoF regions and scheme checks for the three-user MIMO broadcast channel with delayed CSIT")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Halfspaces and vertices of one region.
    Region {
        #[arg(long)]
        config: AntennaConfig,
        #[arg(long, value_enum)]
        messages: Messages,
        #[arg(long, value_enum, default_value = "delayed")]
        variant: Variant,
    },
    /// Order-1 corner point P0 with its durations and defining planes.
    Corner {
        #[arg(long)]
        config: AntennaConfig,
    },
    /// Synthesize a plan and check that every receiver decodes.
    Simulate {
        #[arg(long)]
        config: AntennaConfig,
        #[arg(long, value_enum, default_value = "order1")]
        messages: Messages,
        /// Order-2 target d12,d23,d13 (rationals allowed); pushed onto the boundary.
        #[arg(long)]
        target: Option<String>,
        #[arg(long, value_enum, default_value = "auto")]
        tier: TierArg,
    },
    /// Delayed-CSIT, no-CSIT and outer regions side by side.
    Compare {
        #[arg(long)]
        config: AntennaConfig,
        #[arg(long, value_enum)]
        messages: Messages,
    },
    /// Sum-DoF along a one-parameter family, e.g. `--pattern 15,15,x,31`.
    Sweep {
        /// Four comma-separated fields, each an integer, `x`, or `x+k` / `x-k`.
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
        #[arg(long, value_enum, default_value = "order1")]
        messages: Messages,
    },
    /// Antenna triples where (*) holds with equality, with their M range.
    #[command(name = "scan-corollary1")]
    ScanCorollary1 {
        #[arg(long)]
        max: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_INVALID_INPUT, message: msg.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn exit_code(e: &DofError) -> i32 {
    match e {
        DofError::UnsupportedCase(_) | DofError::NegativeDuration(_) | DofError::TooLarge(_) => EXIT_UNSUPPORTED,
        DofError::DecodeFailure { .. } => EXIT_DECODE_FAILURE,
        DofError::InvalidInput(_) | DofError::TargetOutsideRegion(_) | DofError::ZeroTarget | DofError::DimensionMismatch(..) => EXIT_INVALID_INPUT,
        _ => EXIT_INTERNAL,
    }
}

impl From<DofError> for CliError {
    fn from(e: DofError) -> Self {
        CliError { code: exit_code(&e), message: e.to_string() }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError { code: EXIT_INTERNAL, message: e.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Decimal rendering of an exact column.
pub fn decimal(x: &Rational) -> String {
    format!("{:.9}", to_f64(x))
}

fn axis_names(m: Messages) -> [&'static str; 3] {
    match m {
        Messages::Order1 => ["d1", "d2", "d3"],
        Messages::Order2 => ["d12", "d23", "d13"],
    }
}

// ---------- region ----------

#[derive(Clone, Debug, Serialize)]
pub struct RegionReport {
    pub config: AntennaConfig,
    pub messages: Messages,
    pub variant: Variant,
    pub axes: [&'static str; 3],
    pub halfspaces: Vec<Halfspace>,
    pub rows: Vec<String>,
    #[serde(with = "dof_core::math::serde_rat_vecvec")]
    pub vertices: Vec<RatVector>,
    #[serde(with = "dof_core::math::serde_rat")]
    pub sum_dof: Rational,
}

/// The region itself, before redundancy elimination.
pub fn build_region(c: &AntennaConfig, messages: Messages, variant: Variant) -> CliResult<Region> {
    let r = match (messages, variant) {
        // the delayed-CSIT order-2 region is achieved by the two-phase scheme
        (Messages::Order2, Variant::Delayed | Variant::Achievable) => order2_region_delayed(c),
        (Messages::Order2, Variant::Outer) => order2_outer_full(c),
        (Messages::Order2, Variant::Nocsit) => order2_region_nocsit(c),
        (Messages::Order1, Variant::Delayed | Variant::Achievable) => order1_region_achievable(c)?,
        (Messages::Order1, Variant::Outer) => order1_outer(c)?,
        (Messages::Order1, Variant::Nocsit) => order1_region_nocsit(c),
    };
    Ok(r)
}

fn sorted_vertices(r: &Region) -> Vec<RatVector> {
    let mut v = r.vertices().to_vec();
    v.sort();
    v
}

pub fn region_report(c: &AntennaConfig, messages: Messages, variant: Variant) -> CliResult<RegionReport> {
    let r = eliminate_redundant(&build_region(c, messages, variant)?);
    Ok(RegionReport {
        config: *c,
        messages,
        variant,
        axes: axis_names(messages),
        rows: r.halfspaces.iter().map(Halfspace::describe).collect(),
        vertices: sorted_vertices(&r),
        sum_dof: sum_dof(&r)?,
        halfspaces: r.halfspaces,
    })
}

// ---------- corner ----------

#[derive(Clone, Debug, Serialize)]
pub struct PlaneReport {
    pub name: String,
    #[serde(with = "serde_rat_vec")]
    pub coef: RatVector,
    #[serde(with = "dof_core::math::serde_rat")]
    pub rhs: Rational,
    pub tight: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CornerReport {
    pub config: AntennaConfig,
    pub case: Order1Case,
    pub star: Star,
    pub branch: Branch,
    #[serde(with = "serde_rat_vec")]
    pub p0: RatVector,
    pub p0_decimal: Vec<String>,
    pub durations: PhaseDurations,
    #[serde(with = "dof_core::math::serde_rat")]
    pub alpha: Rational,
    pub planes: Vec<PlaneReport>,
    pub identities_hold: bool,
}

pub fn corner_report(c: &AntennaConfig) -> CliResult<CornerReport> {
    let (d, branch) = solve_order1(c)?;
    let p0 = corner_point(c)?;
    let planes = corner_planes(c, branch)?.into_iter().map(|p| PlaneReport { tight: p.eval(&p0) == p.rhs, name: p.name, coef: p.coef, rhs: p.rhs }).collect();
    Ok(CornerReport {
        config: *c,
        case: c.order1_case(),
        star: condition_star(c.n1, c.n2, c.n3),
        branch,
        p0_decimal: p0.iter().map(decimal).collect(),
        p0,
        alpha: d.alpha(),
        durations: d,
        planes,
        identities_hold: verify_transformation(c)?.all_hold(),
    })
}

// ---------- simulate ----------

#[derive(Clone, Debug, Serialize)]
pub struct SimulateReport {
    pub config: AntennaConfig,
    pub messages: Messages,
    /// Tuple the plan is built for: P0 for order-1, the boundary point for order-2.
    #[serde(with = "serde_rat_vec")]
    pub expected: RatVector,
    pub achieved_matches_expected: bool,
    pub durations: PhaseDurations,
    pub report: DecodingReport,
}

pub fn parse_target(s: &str) -> CliResult<RatVector> {
    let v = s.split(',').map(parse_rat).collect::<Result<Vec<_>, _>>()?;
    if v.len() != 3 {
        return Err(CliError::invalid(format!("target needs three components, got {}", v.len())));
    }
    Ok(v)
}

pub fn simulate_report(c: &AntennaConfig, messages: Messages, target: Option<&[Rational]>, seed: u64, tier: Tier) -> CliResult<SimulateReport> {
    let (layout, expected) = match messages {
        Messages::Order1 => {
            if target.is_some() {
                return Err(CliError::invalid("order-1 plans run at the corner point; --target applies to order-2 messages"));
            }
            (order1_layout_for(c)?, corner_point(c)?)
        }
        Messages::Order2 => {
            let ones = vec![Rational::from_integer(1.into()); 3];
            let d = order2_durations_for_target(c, target.unwrap_or(&ones))?;
            (order2_layout(c, &d)?, order2_tuple(c, &d)?)
        }
    };
    let report = simulate(&layout, seed, tier)?;
    Ok(SimulateReport { config: *c, messages, achieved_matches_expected: report.achieved == expected, expected, durations: layout.durations.clone(), report })
}

// ---------- compare ----------

#[derive(Clone, Debug, Serialize)]
pub struct NamedRegion {
    pub name: String,
    pub rows: Vec<String>,
    #[serde(with = "dof_core::math::serde_rat_vecvec")]
    pub vertices: Vec<RatVector>,
    #[serde(skip)]
    pub region: Option<Region>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictEntry {
    pub pair: String,
    pub verdict: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub config: AntennaConfig,
    pub messages: Messages,
    pub axes: [&'static str; 3],
    pub regions: Vec<NamedRegion>,
    /// Regions that could not be built, with the reason.
    pub unavailable: Vec<VerdictEntry>,
    pub verdicts: Vec<VerdictEntry>,
}

impl CompareReport {
    pub fn verdict(&self, pair: &str) -> Option<&str> {
        self.verdicts.iter().find(|v| v.pair == pair).map(|v| v.verdict.as_str())
    }
}

/// "equal", "<a> strictly inside", or "incomparable".
pub fn inclusion_verdict(inner_name: &str, inner: &Region, outer: &Region) -> CliResult<String> {
    Ok(if set_equal(inner, outer)? {
        "equal".into()
    } else if subset(inner, outer)? {
        format!("{inner_name} strictly inside")
    } else {
        "incomparable".into()
    })
}

fn named(name: &str, r: Region) -> NamedRegion {
    let r = eliminate_redundant(&r);
    NamedRegion { name: name.into(), rows: r.halfspaces.iter().map(Halfspace::describe).collect(), vertices: sorted_vertices(&r), region: Some(r) }
}

pub fn compare_report(c: &AntennaConfig, messages: Messages) -> CliResult<CompareReport> {
    let mut regions = Vec::new();
    let mut unavailable = Vec::new();
    let mut verdicts = Vec::new();
    let mut push_verdict = |pair: &str, v: String| verdicts.push(VerdictEntry { pair: pair.into(), verdict: v });
    match messages {
        Messages::Order2 => {
            let delayed = order2_region_delayed(c);
            let nocsit = order2_region_nocsit(c);
            push_verdict("nocsit_vs_delayed", inclusion_verdict("no-CSIT", &nocsit, &delayed)?);
            let outer = eliminate_redundant(&order2_outer_full(c));
            push_verdict("delayed_vs_outer", inclusion_verdict("delayed", &delayed, &outer)?);
            regions.push(named("delayed", delayed));
            regions.push(named("nocsit", nocsit));
            regions.push(named("outer", outer));
        }
        Messages::Order1 => {
            let nocsit = order1_region_nocsit(c);
            let genie = order1_outer_genie(c);
            let achievable = match order1_region_achievable(c) {
                Ok(r) => Some(r),
                Err(e @ (DofError::UnsupportedCase(_) | DofError::NegativeDuration(_))) => {
                    unavailable.push(VerdictEntry { pair: "achievable".into(), verdict: e.to_string() });
                    None
                }
                Err(e) => return Err(e.into()),
            };
            let outer = match order1_outer(c) {
                Ok(r) => Some(r),
                Err(e @ DofError::UnsupportedCase(_)) => {
                    unavailable.push(VerdictEntry { pair: "outer".into(), verdict: e.to_string() });
                    None
                }
                Err(e) => return Err(e.into()),
            };
            // When M ≤ N2 the degraded-genie bound meets the no-CSIT region,
            // which pins the delayed-CSIT region between them.
            let v = if set_equal(&nocsit, &genie)? {
                "equal".to_string()
            } else if let Some(a) = &achievable {
                inclusion_verdict("no-CSIT", &nocsit, a)?
            } else {
                "undetermined".to_string()
            };
            push_verdict("nocsit_vs_delayed", v);
            if let (Some(a), Some(o)) = (&achievable, &outer) {
                push_verdict("achievable_vs_outer", inclusion_verdict("achievable", a, o)?);
            }
            regions.push(named("nocsit", nocsit));
            if let Some(a) = achievable {
                regions.push(named("achievable", a));
            }
            if let Some(o) = outer {
                regions.push(named("outer", o));
            }
            regions.push(named("outer_genie", genie));
        }
    }
    Ok(CompareReport { config: *c, messages, axes: axis_names(messages), regions, unavailable, verdicts })
}

// ---------- sweep ----------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Fixed(u32),
    /// `x + offset`
    Free(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepSpec {
    pub fields: [Field; 4],
    pub from: u32,
    pub to: u32,
    pub messages: Messages,
}

impl SweepSpec {
    pub fn parse(pattern: &str, from: u32, to: u32, messages: Messages) -> CliResult<SweepSpec> {
        let parts: Vec<&str> = pattern.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(CliError::invalid(format!("pattern needs four fields: {pattern:?}")));
        }
        let mut fields = [Field::Fixed(0); 4];
        for (f, p) in fields.iter_mut().zip(&parts) {
            *f = parse_field(p).ok_or_else(|| CliError::invalid(format!("bad pattern field {p:?}")))?;
        }
        if !fields.iter().any(|f| matches!(f, Field::Free(_))) {
            return Err(CliError::invalid("pattern has no `x` field"));
        }
        if from > to {
            return Err(CliError::invalid(format!("empty range {from}..{to}")));
        }
        Ok(SweepSpec { fields, from, to, messages })
    }

    pub fn values_at(&self, x: u32) -> Option<[u32; 4]> {
        let mut out = [0u32; 4];
        for (o, f) in out.iter_mut().zip(&self.fields) {
            *o = match *f {
                Field::Fixed(v) => v,
                Field::Free(k) => u32::try_from(x as i64 + k).ok()?,
            };
        }
        Some(out)
    }
}

fn parse_field(s: &str) -> Option<Field> {
    if let Ok(v) = s.parse() {
        return Some(Field::Fixed(v));
    }
    let rest = s.strip_prefix('x')?;
    if rest.is_empty() {
        return Some(Field::Free(0));
    }
    let (sign, num) = match rest.as_bytes()[0] {
        b'+' => (1, &rest[1..]),
        b'-' => (-1, &rest[1..]),
        _ => return None,
    };
    Some(Field::Free(sign * num.parse::<i64>().ok()?))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub x: u32,
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub m: u32,
    pub case: String,
    pub status: String,
    pub reason: String,
    pub sum_dof_achievable: String,
    pub sum_dof_achievable_dec: String,
    /// d1+d2+d3 at the corner point, which need not be the region's maximum.
    pub sum_p0: String,
    pub sum_p0_dec: String,
    pub sum_dof_outer: String,
    pub sum_dof_outer_dec: String,
    pub gap: String,
    pub gap_dec: String,
}

impl SweepRow {
    fn skip(x: u32, v: [u32; 4], case: String, reason: String) -> SweepRow {
        SweepRow {
            x,
            n1: v[0],
            n2: v[1],
            n3: v[2],
            m: v[3],
            case,
            status: "SKIP".into(),
            reason,
            sum_dof_achievable: String::new(),
            sum_dof_achievable_dec: String::new(),
            sum_p0: String::new(),
            sum_p0_dec: String::new(),
            sum_dof_outer: String::new(),
            sum_dof_outer_dec: String::new(),
            gap: String::new(),
            gap_dec: String::new(),
        }
    }

    pub fn gap_value(&self) -> Option<Rational> {
        (!self.gap.is_empty()).then(|| parse_rat(&self.gap).expect("own rendering"))
    }

    pub fn achievable_value(&self) -> Option<Rational> {
        (!self.sum_dof_achievable.is_empty()).then(|| parse_rat(&self.sum_dof_achievable).expect("own rendering"))
    }
}

fn sweep_point(spec: &SweepSpec, x: u32) -> SweepRow {
    let Some(v) = spec.values_at(x) else {
        return SweepRow::skip(x, [0; 4], String::new(), "negative antenna count".into());
    };
    let c = match AntennaConfig::new(v[0], v[1], v[2], v[3]) {
        Ok(c) => c,
        Err(e) => return SweepRow::skip(x, v, String::new(), e.to_string()),
    };
    let case = format!("{:?}", c.order1_case());
    type Sums = (Rational, Option<Rational>, Option<Rational>);
    let sums: Result<Sums, DofError> = match spec.messages {
        Messages::Order1 => corollary_checks(&c).map(|r| {
            let outer = r.sum_dof_outer.as_deref().map(|s| parse_rat(s).expect("own rendering"));
            let p0_sum = r.p0.iter().sum();
            (r.sum_dof_achievable, Some(p0_sum), outer)
        }),
        Messages::Order2 => sum_dof(&order2_region_delayed(&c)).and_then(|a| Ok((a, None, Some(sum_dof(&eliminate_redundant(&order2_outer_full(&c)))?)))),
    };
    match sums {
        Ok((ach, p0_sum, outer)) => {
            let gap = outer.as_ref().map(|o| o - &ach);
            let s = |r: &Option<Rational>, f: fn(&Rational) -> String| r.as_ref().map(f).unwrap_or_default();
            SweepRow {
                x,
                n1: v[0],
                n2: v[1],
                n3: v[2],
                m: v[3],
                case,
                status: "OK".into(),
                reason: String::new(),
                sum_dof_achievable_dec: decimal(&ach),
                sum_dof_achievable: fmt_rat(&ach),
                sum_p0: s(&p0_sum, fmt_rat),
                sum_p0_dec: s(&p0_sum, decimal),
                sum_dof_outer: s(&outer, fmt_rat),
                sum_dof_outer_dec: s(&outer, decimal),
                gap: s(&gap, fmt_rat),
                gap_dec: s(&gap, decimal),
            }
        }
        Err(e) => SweepRow::skip(x, v, case, e.to_string()),
    }
}

pub fn sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    (spec.from..=spec.to).into_par_iter().map(|x| sweep_point(spec, x)).collect()
}

// ---------- scan ----------

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub m_from: u32,
    pub m_to: u32,
    /// Achievable and outer regions coincide for every M in the range.
    pub regions_equal: bool,
}

impl ScanRow {
    pub fn m_values(&self) -> std::ops::RangeInclusive<u32> {
        self.m_from..=self.m_to
    }
}

/// Triples with N3 ≤ max where (*) holds with equality, each with the full
/// Case-2 range max{N1+N2, N3} < M ≤ N1+N3.
pub fn scan_corollary1(max: u32) -> CliResult<Vec<ScanRow>> {
    let triples: Vec<(u32, u32, u32)> = (1..=max)
        .flat_map(|n3| (1..=n3).flat_map(move |n2| (1..=n2).map(move |n1| (n1, n2, n3))))
        .filter(|&(a, b, c)| condition_star(a, b, c) == Star::HoldsEquality)
        .filter(|&(a, b, c)| (a + b).max(c) < a + c)
        .collect();
    triples
        .into_par_iter()
        .map(|(n1, n2, n3)| {
            let (m_from, m_to) = ((n1 + n2).max(n3) + 1, n1 + n3);
            let mut equal = true;
            for m in m_from..=m_to {
                let r = corollary_checks(&AntennaConfig::new(n1, n2, n3, m)?)?;
                equal &= r.regions_equal == Some(true);
            }
            Ok(ScanRow { n1, n2, n3, m_from, m_to, regions_equal: equal })
        })
        .collect()
}

// ---------- rendering ----------

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError { code: EXIT_INTERNAL, message: e.to_string() })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn point_cells(p: &[Rational]) -> Vec<String> {
    p.iter().map(fmt_rat).chain(p.iter().map(decimal)).collect()
}

fn point_header<'a>(axes: [&'a str; 3], dec: &'a [String; 3]) -> Vec<&'a str> {
    let mut h = axes.to_vec();
    h.extend(dec.iter().map(String::as_str));
    h
}

fn dec_names(axes: [&str; 3]) -> [String; 3] {
    axes.map(|a| format!("{a}_dec"))
}

pub fn render_region(r: &RegionReport, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(json(r)),
        Format::Csv => {
            let dec = dec_names(r.axes);
            let mut header = vec!["kind", "index"];
            header.extend(point_header(r.axes, &dec));
            header.push("rhs");
            let mut rows = Vec::new();
            for (i, v) in r.vertices.iter().enumerate() {
                let mut row = vec!["vertex".to_string(), i.to_string()];
                row.extend(point_cells(v));
                row.push(String::new());
                rows.push(row);
            }
            for (i, h) in r.halfspaces.iter().enumerate() {
                let mut row = vec!["halfspace".to_string(), i.to_string()];
                row.extend(point_cells(&h.normal));
                row.push(fmt_rat(&h.offset));
                rows.push(row);
            }
            csv_string(&header, rows)
        }
    }
}

pub fn render_corner(r: &CornerReport, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(json(r)),
        Format::Csv => {
            let names = ["t1", "t2", "t3", "t12", "t23", "t13", "t"];
            let mut rows = vec![
                vec!["case".into(), format!("{:?}", r.case)],
                vec!["branch".into(), format!("{:?}", r.branch)],
                vec!["star".into(), format!("{:?}", r.star)],
            ];
            for (i, a) in ["d1", "d2", "d3"].iter().enumerate() {
                rows.push(vec![a.to_string(), fmt_rat(&r.p0[i])]);
            }
            for (n, v) in names.iter().zip(r.durations.as_array()) {
                rows.push(vec![n.to_string(), fmt_rat(&v)]);
            }
            rows.push(vec!["alpha".into(), fmt_rat(&r.alpha)]);
            for p in &r.planes {
                rows.push(vec![format!("plane:{}", p.name), format!("{} = {}", p.coef.iter().map(fmt_rat).collect::<Vec<_>>().join(" "), fmt_rat(&p.rhs))]);
            }
            csv_string(&["field", "value"], rows)
        }
    }
}

pub fn render_simulate(r: &SimulateReport, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(json(r)),
        Format::Csv => {
            let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
            let rows = r
                .report
                .receivers
                .iter()
                .map(|rr| {
                    vec![
                        rr.receiver.to_string(),
                        rr.unknowns.to_string(),
                        rr.delivered_equations.to_string(),
                        opt(rr.rank),
                        opt(rr.interference_rank),
                        rr.decoded.to_string(),
                        rr.note.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            csv_string(&["receiver", "unknowns", "delivered_equations", "rank", "interference_rank", "decoded", "note"], rows)
        }
    }
}

pub fn render_compare(r: &CompareReport, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(json(r)),
        Format::Csv => {
            let dec = dec_names(r.axes);
            let mut header = vec!["region", "index"];
            header.extend(point_header(r.axes, &dec));
            let mut rows = Vec::new();
            for reg in &r.regions {
                for (i, v) in reg.vertices.iter().enumerate() {
                    let mut row = vec![reg.name.clone(), i.to_string()];
                    row.extend(point_cells(v));
                    rows.push(row);
                }
            }
            csv_string(&header, rows)
        }
    }
}

pub fn render_sweep(rows: &[SweepRow], format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(json(&rows)),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError { code: EXIT_INTERNAL, message: e.to_string() })?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

pub fn render_scan(rows: &[ScanRow], format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(json(&rows)),
        Format::Csv => {
            let body = rows
                .iter()
                .map(|r| vec![r.n1.to_string(), r.n2.to_string(), r.n3.to_string(), r.m_from.to_string(), r.m_to.to_string(), r.regions_equal.to_string()])
                .collect();
            csv_string(&["n1", "n2", "n3", "m_from", "m_to", "regions_equal"], body)
        }
    }
}

/// Output text and exit code of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    let ok = |output| Ok(Outcome { output, code: EXIT_OK });
    match &cli.command {
        Command::Region { config, messages, variant } => ok(render_region(&region_report(config, *messages, *variant)?, cli.format)?),
        Command::Corner { config } => ok(render_corner(&corner_report(config)?, cli.format)?),
        Command::Simulate { config, messages, target, tier } => {
            let target = target.as_deref().map(parse_target).transpose()?;
            let r = simulate_report(config, *messages, target.as_deref(), cli.seed, (*tier).into())?;
            let code = if r.report.success { EXIT_OK } else { EXIT_DECODE_FAILURE };
            Ok(Outcome { output: render_simulate(&r, cli.format)?, code })
        }
        Command::Compare { config, messages } => ok(render_compare(&compare_report(config, *messages)?, cli.format)?),
        Command::Sweep { pattern, from, to, messages } => {
            let spec = SweepSpec::parse(pattern, *from, *to, *messages)?;
            ok(render_sweep(&sweep(&spec), cli.format)?)
        }
        Command::ScanCorollary1 { max } => ok(render_scan(&scan_corollary1(*max)?, cli.format)?),
    }
}

/// What the binary prints, and its exit status.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Invocation {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (program name first), runs the command and honours `--out`.
/// Parse errors map to the invalid-input exit code; `--help` and
/// `--version` exit 0.
pub fn run_args<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => return Invocation { stderr: e.to_string(), code: EXIT_INVALID_INPUT, ..Default::default() },
        Err(e) => return Invocation { stdout: e.to_string(), code: EXIT_OK, ..Default::default() },
    };
    match execute(&cli) {
        Ok(o) => match &cli.out {
            Some(path) => match std::fs::write(path, &o.output) {
                Ok(()) => Invocation { code: o.code, ..Default::default() },
                Err(e) => Invocation { stderr: format!("error: writing {}: {e}\n", path.display()), code: EXIT_INTERNAL, ..Default::default() },
            },
            None => Invocation { stdout: o.output, code: o.code, ..Default::default() },
        },
        Err(e) => Invocation { stderr: format!("error: {e}\n"), code: e.code, ..Default::default() },
    }
}

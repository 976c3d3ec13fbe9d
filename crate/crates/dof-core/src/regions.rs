//! Closed-form DoF regions for order-1 and order-2 messages.

use crate::durations;
use crate::error::{DofError, Result};
use crate::geometry::{convex_hull, maximize, maximizers, set_equal, Face, Halfspace, Region};
use crate::math::{int, rat, serde_rat, serde_rat_vec, RatVector, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AntennaConfig {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub m: u32,
}

impl AntennaConfig {
    pub fn new(n1: u32, n2: u32, n3: u32, m: u32) -> Result<Self> {
        if n1 == 0 || m == 0 {
            return Err(DofError::InvalidInput("antenna counts must be positive".into()));
        }
        if !(n1 <= n2 && n2 <= n3) {
            return Err(DofError::InvalidInput(format!("need N1 <= N2 <= N3, got ({n1},{n2},{n3})")));
        }
        Ok(AntennaConfig { n1, n2, n3, m })
    }

    pub fn n(&self) -> [u32; 3] {
        [self.n1, self.n2, self.n3]
    }

    /// Receive antennas of receiver `i` (0-based).
    pub fn ni(&self, i: usize) -> u32 {
        self.n()[i]
    }

    pub fn case(&self) -> CaseLabel {
        CaseLabel::of(self)
    }

    pub fn order1_case(&self) -> Order1Case {
        self.case().order1
    }
}

impl fmt::Display for AntennaConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.n1, self.n2, self.n3, self.m)
    }
}

impl FromStr for AntennaConfig {
    type Err = DofError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(DofError::InvalidInput(format!("config must be N1,N2,N3,M: {s:?}")));
        }
        let mut v = [0u32; 4];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| DofError::InvalidInput(format!("bad antenna count {p:?}")))?;
        }
        AntennaConfig::new(v[0], v[1], v[2], v[3])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order1Case {
    Case1,
    Case2,
    Case3,
    Case4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order2Case {
    /// M ≤ N2
    NoPhaseTwo,
    /// N2 < M ≤ N3
    Middle,
    /// N3 < M
    Large,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseLabel {
    pub order1: Order1Case,
    pub order2: Order2Case,
}

impl CaseLabel {
    pub fn of(c: &AntennaConfig) -> CaseLabel {
        let (n1, n2, n3, m) = (c.n1, c.n2, c.n3, c.m);
        let order1 = if m <= (n1 + n2).max(n3) {
            Order1Case::Case1
        } else if m <= n1 + n3 {
            Order1Case::Case2
        } else if m <= n2 + n3 {
            Order1Case::Case3
        } else {
            Order1Case::Case4
        };
        let order2 = if m <= n2 {
            Order2Case::NoPhaseTwo
        } else if m <= n3 {
            Order2Case::Middle
        } else {
            Order2Case::Large
        };
        CaseLabel { order1, order2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Star {
    HoldsStrict,
    HoldsEquality,
    Fails,
}

impl Star {
    pub fn holds(self) -> bool {
        self != Star::Fails
    }
}

/// Compares N1²(N3−N1) + N2²(N3−N2) against N1N2(N1+N2−N3).
pub fn condition_star(n1: u32, n2: u32, n3: u32) -> Star {
    let (a, b, c) = (n1 as i128, n2 as i128, n3 as i128);
    let lhs = a * a * (c - a) + b * b * (c - b);
    let rhs = a * b * (a + b - c);
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Less => Star::HoldsStrict,
        std::cmp::Ordering::Equal => Star::HoldsEquality,
        std::cmp::Ordering::Greater => Star::Fails,
    }
}

fn q(n: u32) -> Rational {
    int(n as i64)
}

fn inv(n: u32) -> Rational {
    rat(1, n as i64)
}

/// `(x_a + x_b)/p + x_c/r ≤ 1` on coordinates (d12, d23, d13).
fn pair_row(pair: [usize; 2], single: usize, p: u32, r: u32) -> Halfspace {
    let mut n = vec![Rational::zero(); 3];
    n[pair[0]] = inv(p);
    n[pair[1]] = inv(p);
    n[single] = inv(r);
    Halfspace::unit(n)
}

// coordinate order for order-2 tuples
const D12: usize = 0;
const D23: usize = 1;
const D13: usize = 2;

/// The three min-form rows over (d12, d23, d13).
pub fn order2_min_rows(c: &AntennaConfig) -> Vec<Halfspace> {
    let (n1, n2, n3, m) = (c.n1, c.n2, c.n3, c.m);
    vec![
        pair_row([D12, D13], D23, m.min(n1), m.min(n1 + n2)),
        pair_row([D12, D23], D13, m.min(n2), m.min(n1 + n2)),
        pair_row([D13, D23], D12, m.min(n3), m.min(n1 + n3)),
    ]
}

pub fn order2_region_min_form(c: &AntennaConfig) -> Region {
    Region::from_halfspaces(3, order2_min_rows(c)).expect("order-2 rows bound a polytope")
}

/// One row when M ≤ N2; otherwise two rows, plus a third when N3 < M.
pub fn order2_region_delayed(c: &AntennaConfig) -> Region {
    let (n1, n2, n3, m) = (c.n1, c.n2, c.n3, c.m);
    let rows = if m <= n2 {
        vec![pair_row([D12, D13], D23, m.min(n1), m)]
    } else {
        let mut rows = vec![pair_row([D12, D13], D23, n1, m.min(n1 + n2)), pair_row([D12, D23], D13, n2, m.min(n1 + n2))];
        if n3 < m {
            rows.push(pair_row([D13, D23], D12, n3, m.min(n1 + n3)));
        }
        rows
    };
    Region::from_halfspaces(3, rows).expect("order-2 rows bound a polytope")
}

/// The six genie rows, before redundancy elimination.
pub fn order2_outer_full(c: &AntennaConfig) -> Region {
    let (n1, n2, n3, m) = (c.n1, c.n2, c.n3, c.m);
    let rows = vec![
        pair_row([D12, D13], D23, m.min(n1), m.min(n1 + n2)),
        pair_row([D12, D13], D23, m.min(n1), m.min(n1 + n3)),
        pair_row([D12, D23], D13, m.min(n2), m.min(n1 + n2)),
        pair_row([D12, D23], D13, m.min(n2), m.min(n2 + n3)),
        pair_row([D13, D23], D12, m.min(n3), m.min(n1 + n3)),
        pair_row([D13, D23], D12, m.min(n3), m.min(n2 + n3)),
    ];
    Region::from_halfspaces(3, rows).expect("order-2 rows bound a polytope")
}

pub fn order2_region_nocsit(c: &AntennaConfig) -> Region {
    let row = pair_row([D12, D13], D23, c.m.min(c.n1), c.m.min(c.n2));
    Region::from_halfspaces(3, vec![row]).expect("single row bounds a polytope")
}

pub fn order1_region_nocsit(c: &AntennaConfig) -> Region {
    let row = Halfspace::unit(vec![inv(c.m.min(c.n1)), inv(c.m.min(c.n2)), inv(c.m.min(c.n3))]);
    Region::from_halfspaces(3, vec![row]).expect("single row bounds a polytope")
}

/// Degraded-genie bound for order-1 messages: for each receiver order π,
/// Σ_k d_π(k) / min{M, N_π(1) + … + N_π(k)} ≤ 1.
pub fn order1_outer_genie(c: &AntennaConfig) -> Region {
    let n = c.n();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let rows = perms
        .iter()
        .map(|p| {
            let mut coef = vec![Rational::zero(); 3];
            let mut acc = 0;
            for &i in p {
                acc += n[i];
                coef[i] = inv(c.m.min(acc));
            }
            Halfspace::unit(coef)
        })
        .collect();
    Region::from_halfspaces(3, rows).expect("genie rows bound a polytope")
}

fn row3(a: u32, b: u32, cc: u32) -> Halfspace {
    Halfspace::unit(vec![inv(a), inv(b), inv(cc)])
}

/// Outer region printed for Cases 2 (three rows) and 3 (four rows).
pub fn order1_outer(c: &AntennaConfig) -> Result<Region> {
    let (n1, n2, n3, m) = (c.n1, c.n2, c.n3, c.m);
    let rows = match c.order1_case() {
        Order1Case::Case2 => vec![row3(n1, n1 + n2, m), row3(n1 + n2, n2, m), row3(m, m, n3)],
        Order1Case::Case3 => vec![row3(n1, n1 + n2, m), row3(n1 + n2, n2, m), row3(n1 + n3, m, n3), row3(n1, m, n1 + n3)],
        other => return Err(DofError::UnsupportedCase(format!("no outer region for {other:?}"))),
    };
    Region::from_halfspaces(3, rows)
}

fn face(a: [u32; 2], b: [u32; 2], missing: usize) -> Face {
    let rows = vec![Halfspace::unit(vec![inv(a[0]), inv(a[1])]), Halfspace::unit(vec![inv(b[0]), inv(b[1])])];
    Face { region: Region::from_halfspaces(2, rows).expect("face rows bound a polygon"), missing }
}

/// Faces D¹ (d2,d3), D² (d1,d3), D³ (d1,d2).
pub fn order1_faces(c: &AntennaConfig) -> Result<[Face; 3]> {
    let (n1, n2, n3, m) = (c.n1, c.n2, c.n3, c.m);
    let d3 = face([n1, n1 + n2], [n1 + n2, n2], 2);
    match c.order1_case() {
        Order1Case::Case2 => Ok([face([n2, m], [m, n3], 0), face([n1, m], [m, n3], 1), d3]),
        Order1Case::Case3 => Ok([face([n2, m], [m, n3], 0), face([n1 + n3, n3], [n1, n1 + n3], 1), d3]),
        Order1Case::Case4 => Ok([face([n2, n2 + n3], [n2 + n3, n3], 0), face([n1 + n3, n3], [n1, n1 + n3], 1), d3]),
        Order1Case::Case1 => Err(DofError::UnsupportedCase("Case1 order-1 region is not constructed".into())),
    }
}

/// Convex hull of the three faces and the corner point.
pub fn order1_region_achievable(c: &AntennaConfig) -> Result<Region> {
    let faces = order1_faces(c)?;
    let p0 = durations::corner_point(c)?;
    Ok(convex_hull(&[p0], &faces)?.region)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub config: AntennaConfig,
    pub case: Order1Case,
    pub star: Star,
    #[serde(with = "serde_rat_vec")]
    pub p0: RatVector,
    #[serde(with = "serde_rat")]
    pub sum_dof_achievable: Rational,
    /// Absent for Case 4, whose outer region is not constructed.
    pub sum_dof_outer: Option<String>,
    pub gap: Option<String>,
    /// Mutual-subset verdict between the achievable and outer regions.
    pub regions_equal: Option<bool>,
    /// The corner point attains the achievable sum-DoF.
    pub p0_is_sum_argmax: bool,
    /// Case 2 with (*) at equality: the achievable and outer regions coincide.
    pub equality_claim_holds: Option<bool>,
}

impl CorollaryReport {
    pub fn gap_value(&self) -> Option<Rational> {
        self.gap.as_deref().map(|g| crate::math::parse_rat(g).expect("own rendering"))
    }
}

pub fn sum_dof(r: &Region) -> Result<Rational> {
    Ok(maximize(r, &[Rational::one(), Rational::one(), Rational::one()])?.0)
}

pub fn corollary_checks(c: &AntennaConfig) -> Result<CorollaryReport> {
    let case = c.order1_case();
    let star = condition_star(c.n1, c.n2, c.n3);
    let ach = order1_region_achievable(c)?;
    let p0 = durations::corner_point(c)?;
    let ones = vec![Rational::one(); 3];
    let sum_ach = sum_dof(&ach)?;
    let p0_is_sum_argmax = maximizers(&ach, &ones)?.contains(&p0);
    let (sum_outer, gap, equal) = match order1_outer(c) {
        Ok(outer) => {
            let so = sum_dof(&outer)?;
            let gap = &so - &sum_ach;
            (Some(so), Some(gap), Some(set_equal(&ach, &outer)?))
        }
        Err(DofError::UnsupportedCase(_)) => (None, None, None),
        Err(e) => return Err(e),
    };
    let equality_claim_holds = (case == Order1Case::Case2 && star == Star::HoldsEquality).then(|| equal == Some(true));
    Ok(CorollaryReport {
        config: *c,
        case,
        star,
        p0,
        sum_dof_achievable: sum_ach,
        sum_dof_outer: sum_outer.as_ref().map(crate::math::fmt_rat),
        gap: gap.as_ref().map(crate::math::fmt_rat),
        regions_equal: equal,
        p0_is_sum_argmax,
        equality_claim_holds,
    })
}

/// Gauge of an order-2 tuple against the delayed region: the largest row value.
pub fn order2_gauge(c: &AntennaConfig, t: &[Rational]) -> Rational {
    order2_region_delayed(c).halfspaces.iter().filter(|h| h.offset == Rational::one()).map(|h| h.eval(t)).max().unwrap_or_else(Rational::zero)
}

pub fn q_of(n: u32) -> Rational {
    q(n)
}

//! Phase-duration systems, corner points and the duration-to-DoF replay.

use crate::error::{DofError, Result};
use crate::math::{fmt_rat, int, primitive_integer_vector, rat, serde_rat, serde_rat_vec, RatMatrix, RatVector, Rational};
use crate::regions::{condition_star, order2_region_delayed, AntennaConfig, Order1Case, Star};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseDurations {
    #[serde(with = "serde_rat")]
    pub t1: Rational,
    #[serde(with = "serde_rat")]
    pub t2: Rational,
    #[serde(with = "serde_rat")]
    pub t3: Rational,
    #[serde(with = "serde_rat")]
    pub t12: Rational,
    #[serde(with = "serde_rat")]
    pub t23: Rational,
    #[serde(with = "serde_rat")]
    pub t13: Rational,
    #[serde(with = "serde_rat")]
    pub t: Rational,
}

impl PhaseDurations {
    pub fn from_array(v: [Rational; 7]) -> Self {
        let [t1, t2, t3, t12, t23, t13, t] = v;
        PhaseDurations { t1, t2, t3, t12, t23, t13, t }
    }

    pub fn from_ints(v: [i64; 7]) -> Self {
        Self::from_array(v.map(int))
    }

    pub fn as_array(&self) -> [Rational; 7] {
        [self.t1.clone(), self.t2.clone(), self.t3.clone(), self.t12.clone(), self.t23.clone(), self.t13.clone(), self.t.clone()]
    }

    pub fn phase1(&self) -> [Rational; 3] {
        [self.t1.clone(), self.t2.clone(), self.t3.clone()]
    }

    /// Slot durations in pair order (12, 23, 13).
    pub fn phase2(&self) -> [Rational; 3] {
        [self.t12.clone(), self.t23.clone(), self.t13.clone()]
    }

    pub fn alpha(&self) -> Rational {
        self.as_array().iter().fold(Rational::zero(), |a, x| a + x)
    }

    pub fn beta(&self) -> Rational {
        &self.t12 + &self.t23 + &self.t13 + &self.t
    }

    pub fn is_nonnegative(&self) -> bool {
        self.as_array().iter().all(|x| !x.is_negative())
    }

    /// Smallest integer vector on the same ray.
    pub fn normalized(&self) -> PhaseDurations {
        let v = primitive_integer_vector(&self.as_array());
        let r: Vec<Rational> = v.into_iter().map(Rational::from_integer).collect();
        Self::from_array(r.try_into().expect("seven entries"))
    }

    pub fn scaled(&self, s: &Rational) -> PhaseDurations {
        Self::from_array(self.as_array().map(|x| x * s))
    }

    pub fn is_integral(&self) -> bool {
        self.as_array().iter().all(|x| x.is_integer())
    }

    /// Integer view; panics on fractional entries.
    pub fn counts(&self) -> [usize; 7] {
        self.as_array().map(|x| {
            assert!(x.is_integer() && !x.is_negative(), "durations must be whole TS counts");
            x.to_integer().try_into().expect("duration fits in usize")
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Equality system solved with T12 free.
    Primary,
    /// T12 = 0 fallback used when condition (*) fails.
    Degenerate,
    /// Case 4 has a single system.
    Case4,
}

fn q(n: u32) -> Rational {
    int(n as i64)
}

/// (B1, B2, B3, C) for the two-phase order-2 scheme.
pub fn order2_antenna_params(c: &AntennaConfig) -> Result<(u32, u32, u32, u32)> {
    let (n1, n2, n3, m) = (c.n1, c.n2, c.n3, c.m);
    if m <= n2 {
        return Err(DofError::UnsupportedCase("M <= N2 needs no order-3 phase".into()));
    }
    let b23 = m.min(n1 + n2);
    if m <= n3 {
        Ok((m, b23, b23, n2))
    } else {
        Ok((m.min(n1 + n3), b23, b23, n3))
    }
}

/// Equations receiver i still lacks after the order-2 slots, per TS unit
/// of each slot: slot × receiver increments, using positive parts.
pub fn slot_increments(n: [u32; 3], b: [u32; 3]) -> [[i64; 3]; 3] {
    let pos = |x: i64| x.max(0);
    let (n1, n2, n3) = (n[0] as i64, n[1] as i64, n[2] as i64);
    let (b1, b2, b3) = (b[0] as i64, b[1] as i64, b[2] as i64);
    // rows: receiver; cols: slot (12, 23, 13)
    [[pos(b1 - n1), 0, pos(b3 - n1)], [pos(b1 - n2), pos(b2 - n2), 0], [0, pos(b2 - n3), pos(b3 - n3)]]
}

pub fn order2_lacking(c: &AntennaConfig, d: &PhaseDurations) -> Result<[Rational; 3]> {
    let (b1, b2, b3, _) = order2_antenna_params(c)?;
    let inc = slot_increments(c.n(), [b1, b2, b3]);
    let slots = d.phase2();
    Ok([0, 1, 2].map(|i| (0..3).fold(Rational::zero(), |a, s| a + &slots[s] * int(inc[i][s]))))
}

/// Durations serving `target` = (d12, d23, d13). Interior targets are pushed
/// radially onto the boundary.
pub fn order2_durations_for_target(c: &AntennaConfig, target: &[Rational]) -> Result<PhaseDurations> {
    if target.len() != 3 {
        return Err(DofError::DimensionMismatch(3, target.len()));
    }
    if target.iter().any(|x| x.is_negative()) {
        return Err(DofError::TargetOutsideRegion("negative component".into()));
    }
    if target.iter().all(|x| x.is_zero()) {
        return Err(DofError::ZeroTarget);
    }
    let (b1, b2, b3, cc) = order2_antenna_params(c)?;
    let gauge = crate::regions::order2_gauge(c, target);
    if gauge > Rational::one() {
        return Err(DofError::TargetOutsideRegion(fmt_rat(&gauge)));
    }
    let t12 = &target[0] / q(b1);
    let t23 = &target[1] / q(b2);
    let t13 = &target[2] / q(b3);
    let mut d = PhaseDurations::from_array([Rational::zero(), Rational::zero(), Rational::zero(), t12, t23, t13, Rational::zero()]);
    let lack = order2_lacking(c, &d)?;
    let n = c.n();
    d.t = (0..3).map(|i| &lack[i] / q(n[i].min(cc))).max().expect("three receivers");
    Ok(d.normalized())
}

/// (d12, d23, d13) delivered by an order-2 duration vector.
pub fn order2_tuple(c: &AntennaConfig, d: &PhaseDurations) -> Result<RatVector> {
    let (b1, b2, b3, _) = order2_antenna_params(c)?;
    let beta = d.beta();
    Ok(vec![&d.t12 * q(b1) / &beta, &d.t23 * q(b2) / &beta, &d.t13 * q(b3) / &beta])
}

/// Phase-I antenna counts (A1, A2, A3) per order-1 case.
pub fn phase1_antennas(c: &AntennaConfig) -> Result<[u32; 3]> {
    let (n1, n2, n3, m) = (c.n1, c.n2, c.n3, c.m);
    match c.order1_case() {
        Order1Case::Case2 => Ok([n1 + n2, m, m]),
        Order1Case::Case3 => Ok([n1 + n2, m, n1 + n3]),
        Order1Case::Case4 => Ok([m, m, m]),
        Order1Case::Case1 => Err(unsupported_case1()),
    }
}

/// Phase-II antenna counts (B1, B2, B3) used by the order-1 schemes.
pub fn order1_slot_antennas(c: &AntennaConfig) -> Result<[u32; 3]> {
    let (n1, n2, n3, m) = (c.n1, c.n2, c.n3, c.m);
    match c.order1_case() {
        Order1Case::Case2 => Ok([m, n1 + n2, n1 + n2]),
        Order1Case::Case3 | Order1Case::Case4 => Ok([n1 + n3, n1 + n2, n1 + n2]),
        Order1Case::Case1 => Err(unsupported_case1()),
    }
}

fn unsupported_case1() -> DofError {
    DofError::UnsupportedCase("Case1 (M <= max{N1+N2, N3}) has no three-phase scheme here".into())
}

/// Receivers (0-based) served by Phase-I step k.
pub const STEP_PAIRS: [[usize; 2]; 3] = [[0, 1], [1, 2], [0, 2]];

/// Achievable tuple of an order-1 duration vector: each receiver collects
/// T_k·A_k symbols from every step that serves it.
pub fn tuple_map(c: &AntennaConfig, d: &PhaseDurations) -> Result<RatVector> {
    let a = phase1_antennas(c)?;
    let t = d.phase1();
    let alpha = d.alpha();
    let mut out = vec![Rational::zero(); 3];
    for (k, pair) in STEP_PAIRS.iter().enumerate() {
        for &i in pair {
            out[i] += &t[k] * q(a[k]);
        }
    }
    Ok(out.into_iter().map(|x| x / &alpha).collect())
}

/// Residuals of the case's Phase-II/III equality system (zero when satisfied).
pub fn case_system_residual(c: &AntennaConfig, d: &PhaseDurations) -> Result<[Rational; 3]> {
    let (n1, n2, n3, m) = (q(c.n1), q(c.n2), q(c.n3), q(c.m));
    let PhaseDurations { t1, t2, t3, t12, t23, t13, t } = d;
    let s = &n1 + &n2 - &n3;
    Ok(match c.order1_case() {
        Order1Case::Case2 => [t12 * (&m - &n1) + t13 * &n2 - t * &n1, t12 * (&m - &n2) + t23 * &n1 - t * &n2, (t13 + t23) * &s - t * &n3],
        Order1Case::Case3 => [t12 * &n3 + t13 * &n2 - t * &n1, t12 * (&n1 + &n3 - &n2) + t23 * &n1 - t * &n2, (t13 + t23) * &s - t * &n3],
        Order1Case::Case4 => [
            t12 * &n3 + t13 * &n2 + t1 * (&m - &n1 - &n2) - t * &n1,
            t12 * (&n1 + &n3 - &n2) + t23 * &n1 + t2 * (&m - &n2 - &n3) - t * &n2,
            (t13 + t23) * &s + t3 * (&m - &n1 - &n3) - t * &n3,
        ],
        Order1Case::Case1 => return Err(unsupported_case1()),
    })
}

/// Phase-II/Phase-I duration relations; zero residual when satisfied.
pub fn relation_residual(c: &AntennaConfig, d: &PhaseDurations) -> Result<[Rational; 3]> {
    let a = phase1_antennas(c)?;
    let b = order1_slot_antennas(c)?;
    // every slot carries exactly T_k·M order-1 related entries in Case 4 and
    // T_k·(order-2 block size) otherwise; both reduce to T_ij·B_k = T_k·W_k
    let w = slot_payload_per_ts(c)?;
    let t = d.phase1();
    let s = d.phase2();
    let _ = a;
    Ok([0, 1, 2].map(|k| &s[k] * q(b[k]) - &t[k] * q(w[k])))
}

/// Entries each Phase-I TS of step k contributes to its Phase-II slot.
pub fn slot_payload_per_ts(c: &AntennaConfig) -> Result<[u32; 3]> {
    let a = phase1_antennas(c)?;
    let n = c.n();
    let mut w = [0u32; 3];
    for (k, [o1, o2]) in STEP_PAIRS.iter().enumerate() {
        // order-2 block rows plus, in Case 4, the extra rows that fill up to A_k
        let block = a[k].min(n[*o1] + n[*o2]);
        w[k] = if c.order1_case() == Order1Case::Case4 { a[k] } else { block };
    }
    Ok(w)
}

/// Phase-I durations implied by the slot durations.
fn phase1_from_slots(c: &AntennaConfig, s: &[Rational; 3]) -> Result<[Rational; 3]> {
    let b = order1_slot_antennas(c)?;
    let w = slot_payload_per_ts(c)?;
    Ok([0, 1, 2].map(|k| &s[k] * q(b[k]) / q(w[k])))
}

/// The case-2 closed form (T12, T23, T13, T).
pub fn case2_closed_form(c: &AntennaConfig) -> [Rational; 4] {
    let (n1, n2, n3, m) = (c.n1 as i64, c.n2 as i64, c.n3 as i64, c.m as i64);
    [
        int(n1 * n2 * (n1 + n2 - n3) - n1 * n1 * (n3 - n1) - n2 * n2 * (n3 - n2)),
        int(n2 * n2 * (m - n3) + m * n1 * (n3 - n1)),
        int(n1 * n1 * (m - n3) + m * n2 * (n3 - n2)),
        int((n1 + n2 - n3) * (m * n1 - n1 * n1 + m * n2 - n2 * n2)),
    ]
}

/// The case-3 closed form in its commonly printed shape. It does not solve the
/// case-3 system in general; kept for the residual comparison.
pub fn case3_printed_closed_form(c: &AntennaConfig) -> [Rational; 4] {
    let (n1, n2, n3, m) = (c.n1 as i64, c.n2 as i64, c.n3 as i64, c.m as i64);
    let s = n1 + n2 - n3;
    [
        int(n1 * n2 * s - n1 * n1 * (n3 - n1) - n2 * n2 * (n3 - n2)),
        int(n2 * n2 * (m - n3) + m * n1 * (n3 - n1)),
        int(n1 * n1 * (m - n3) + m * n2 * (n3 - n2)),
        int(s * n1 * n3 + s * s * n2),
    ]
}

/// Closed-form solution of the case-3 system (independent of M).
pub fn case3_closed_form(c: &AntennaConfig) -> [Rational; 4] {
    let (n1, n2, n3) = (c.n1 as i64, c.n2 as i64, c.n3 as i64);
    let s = n1 + n2 - n3;
    [
        int(n1 * n2 * s - n1 * n1 * (n3 - n1) - n2 * n2 * (n3 - n2)),
        int(n1 * (n2 * n2 + n3 * n3 - n1 * n1)),
        int(n1 * n1 * n1 - n1 * n2 * n2 + n1 * n2 * n3 - n2 * n2 * n3 + n2 * n3 * n3),
        int(s * (n1 * n2 + n1 * n3 - n2 * n2 + n2 * n3)),
    ]
}

fn with_slots(c: &AntennaConfig, slots: [Rational; 4]) -> Result<PhaseDurations> {
    let [t12, t23, t13, t] = slots;
    let [t1, t2, t3] = phase1_from_slots(c, &[t12.clone(), t23.clone(), t13.clone()])?;
    Ok(PhaseDurations::from_array([t1, t2, t3, t12, t23, t13, t]))
}

/// Solves the case-2/3 equality system with T = 1 by elimination.
fn solve_slot_system(c: &AntennaConfig) -> Result<[Rational; 4]> {
    let (n1, n2, n3, m) = (q(c.n1), q(c.n2), q(c.n3), q(c.m));
    let s = &n1 + &n2 - &n3;
    let z = Rational::zero;
    // unknowns (T12, T23, T13)
    let rows = match c.order1_case() {
        Order1Case::Case2 => vec![vec![&m - &n1, z(), n2.clone()], vec![&m - &n2, n1.clone(), z()], vec![z(), s.clone(), s.clone()]],
        Order1Case::Case3 => vec![vec![n3.clone(), z(), n2.clone()], vec![&n1 + &n3 - &n2, n1.clone(), z()], vec![z(), s.clone(), s.clone()]],
        _ => unreachable!("slot system exists for Cases 2 and 3"),
    };
    let a = RatMatrix::from_rows(rows)?;
    let x = a.solve_unique(&[n1, n2, n3]).map_err(|e| DofError::SingularSystem(format!("{c}: {e}")))?;
    Ok([x[0].clone(), x[1].clone(), x[2].clone(), Rational::one()])
}

fn degenerate_slots(c: &AntennaConfig) -> [Rational; 4] {
    let (n1, n2) = (c.n1 as i64, c.n2 as i64);
    [int(0), int(n2 * n2), int(n1 * n1), int(n1 * n2)]
}

fn solve_case23(c: &AntennaConfig, want: Order1Case) -> Result<(PhaseDurations, Branch)> {
    if c.order1_case() != want {
        return Err(DofError::UnsupportedCase(format!("{c} is {:?}, not {want:?}", c.order1_case())));
    }
    let (slots, branch) =
        if condition_star(c.n1, c.n2, c.n3) == Star::Fails { (degenerate_slots(c), Branch::Degenerate) } else { (solve_slot_system(c)?, Branch::Primary) };
    let d = with_slots(c, slots)?.normalized();
    if !d.is_nonnegative() {
        return Err(DofError::NegativeDuration(format!("{c}: {d:?}")));
    }
    let r = case_system_residual(c, &d)?;
    let ok = match branch {
        Branch::Degenerate => r[0].is_zero() && r[1].is_zero() && !r[2].is_positive(),
        _ => r.iter().all(|x| x.is_zero()),
    };
    if !ok || relation_residual(c, &d)?.iter().any(|x| !x.is_zero()) {
        return Err(DofError::IdentityViolated(format!("{c}: solved durations fail their system")));
    }
    Ok((d, branch))
}

pub fn solve_case2(c: &AntennaConfig) -> Result<(PhaseDurations, Branch)> {
    solve_case23(c, Order1Case::Case2)
}

pub fn solve_case3(c: &AntennaConfig) -> Result<(PhaseDurations, Branch)> {
    solve_case23(c, Order1Case::Case3)
}

pub fn solve_case4(c: &AntennaConfig) -> Result<PhaseDurations> {
    if c.order1_case() != Order1Case::Case4 {
        return Err(DofError::UnsupportedCase(format!("{c} is {:?}, not Case4", c.order1_case())));
    }
    let (n1, n2, n3, m) = (q(c.n1), q(c.n2), q(c.n3), q(c.m));
    let s = &n1 + &n2 - &n3;
    let r12 = &m / (&n1 + &n3);
    let r23 = &m / (&n1 + &n2);
    let z = Rational::zero;
    // unknowns (T1, T2, T3) with T = 1 after substituting the slot relations
    let rows = vec![
        vec![&r12 * &n3 + (&m - &n1 - &n2), z(), &r23 * &n2],
        vec![&r12 * (&n1 + &n3 - &n2), &r23 * &n1 + (&m - &n2 - &n3), z()],
        vec![z(), &r23 * &s, &r23 * &s + (&m - &n1 - &n3)],
    ];
    let a = RatMatrix::from_rows(rows)?;
    let x = a.solve_unique(&[n1, n2, n3]).map_err(|e| DofError::SingularSystem(format!("{c}: {e}")))?;
    let d = PhaseDurations::from_array([x[0].clone(), x[1].clone(), x[2].clone(), &r12 * &x[0], &r23 * &x[1], &r23 * &x[2], Rational::one()]);
    if !d.is_nonnegative() {
        return Err(DofError::NegativeDuration(format!("{c}: ({})", d.as_array().iter().map(fmt_rat).collect::<Vec<_>>().join(", "))));
    }
    let d = d.normalized();
    if case_system_residual(c, &d)?.iter().any(|x| !x.is_zero()) || relation_residual(c, &d)?.iter().any(|x| !x.is_zero()) {
        return Err(DofError::IdentityViolated(format!("{c}: solved durations fail their system")));
    }
    // the corner point must satisfy the three pairwise-sum gates
    let p = tuple_map(c, &d)?;
    let gates = [&p[0] + &p[1] - &p[2], &p[1] + &p[2] - &p[0], &p[0] + &p[2] - &p[1]];
    if gates.iter().any(|g| g.is_negative()) {
        return Err(DofError::NegativeDuration(format!("{c}: corner violates the pairwise gates")));
    }
    Ok(d)
}

pub fn solve_order1(c: &AntennaConfig) -> Result<(PhaseDurations, Branch)> {
    match c.order1_case() {
        Order1Case::Case2 => solve_case2(c),
        Order1Case::Case3 => solve_case3(c),
        Order1Case::Case4 => Ok((solve_case4(c)?, Branch::Case4)),
        Order1Case::Case1 => Err(unsupported_case1()),
    }
}

/// A plane `coef · d = rhs` defining the corner point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plane {
    pub name: String,
    #[serde(with = "serde_rat_vec")]
    pub coef: RatVector,
    #[serde(with = "serde_rat")]
    pub rhs: Rational,
}

impl Plane {
    fn new(name: &str, coef: RatVector, rhs: Rational) -> Plane {
        Plane { name: name.into(), coef, rhs }
    }

    pub fn eval(&self, p: &[Rational]) -> Rational {
        crate::math::dot(&self.coef, p)
    }
}

/// Coefficients of `base + (d_x + d_y − d_z)·k`.
fn plane_with_skew(base: [Rational; 3], skew: [i64; 3], k: Rational) -> RatVector {
    (0..3).map(|i| &base[i] + int(skew[i]) * &k).collect()
}

fn r(n: u32) -> Rational {
    rat(1, n as i64)
}

/// The three planes whose intersection is the corner point.
pub fn corner_planes(c: &AntennaConfig, branch: Branch) -> Result<Vec<Plane>> {
    let (n1, n2, n3, m) = (c.n1, c.n2, c.n3, c.m);
    let (fn1, fn2, fn3, fm) = (q(n1), q(n2), q(n3), q(m));
    let one = Rational::one;
    let sum_skew = |a: &Rational, b: &Rational| a / b; // readability helper
    let sym12 = [1, 1, -1]; // d1 + d2 − d3
    let sym13 = [1, -1, 1]; // d1 + d3 − d2
    let sym23 = [-1, 1, 1]; // d2 + d3 − d1
    let k12 = sum_skew(&(&fm - &fn1 - &fn2), &(int(2) * (&fn1 + &fn2) * &fm));
    let k13 = sum_skew(&(&fm - &fn1 - &fn3), &(int(2) * (&fn1 + &fn3) * &fm));
    let flat = Plane::new("d1+d2-d3=0", vec![int(1), int(1), int(-1)], Rational::zero());
    let planes = match c.order1_case() {
        Order1Case::Case2 => {
            let p1 = Plane::new("case2-plane-1", vec![r(n1), r(n1 + n2), r(m)], one());
            let p2 = Plane::new("case2-plane-2", vec![r(n1 + n2), r(n2), r(m)], one());
            let p3 = Plane::new("case2-plane-3", plane_with_skew([r(m), r(m), r(n3)], sym12, k12), one());
            vec![p1, p2, if branch == Branch::Degenerate { flat } else { p3 }]
        }
        Order1Case::Case3 => {
            let p1 = Plane::new("case3-plane-1", plane_with_skew([r(n1), r(n1 + n2), r(m)], sym13, k13.clone()), one());
            let p2 = Plane::new("case3-plane-2", plane_with_skew([r(n1 + n2), r(n2), r(m)], sym13, k13), one());
            let p3 = Plane::new("case3-plane-3", plane_with_skew([r(n1 + n3), r(m), r(n3)], sym12, k12), one());
            vec![p1, p2, if branch == Branch::Degenerate { flat } else { p3 }]
        }
        Order1Case::Case4 => {
            let k1 = (&fm * &fn2 - &fn1 * &fn2 - &fn2 * &fn2) / (int(2) * (&fn1 + &fn2) * &fn1 * &fm);
            let k2 = (&fm * &fn1 - &fn1 * &fn3 - &fn2 * &fn3) / (int(2) * (&fn1 + &fn2) * &fn2 * &fm);
            let k3 = (&fm * &fn1 - &fn1 * &fn3 - &fn1 * &fn1) / (int(2) * (&fn1 + &fn3) * &fn3 * &fm);
            vec![
                Plane::new("case4-plane-1", plane_with_skew([r(n1), r(n1 + n2), r(m)], sym12, k1), one()),
                Plane::new("case4-plane-2", plane_with_skew([r(m), r(n2), r(n1 + n2)], sym23, k2), one()),
                Plane::new("case4-plane-3", plane_with_skew([r(n1 + n3), r(m), r(n3)], sym13, k3), one()),
            ]
        }
        Order1Case::Case1 => return Err(unsupported_case1()),
    };
    Ok(planes)
}

pub fn intersect_planes(planes: &[Plane]) -> Result<RatVector> {
    let a = RatMatrix::from_rows(planes.iter().map(|p| p.coef.clone()).collect())?;
    let b: Vec<Rational> = planes.iter().map(|p| p.rhs.clone()).collect();
    a.solve_unique(&b)
}

/// Corner point P0, computed from the durations and from the planes; the two
/// must agree exactly.
pub fn corner_point(c: &AntennaConfig) -> Result<RatVector> {
    let (d, branch) = solve_order1(c)?;
    let from_durations = tuple_map(c, &d)?;
    let from_planes = intersect_planes(&corner_planes(c, branch)?)?;
    if from_durations != from_planes {
        return Err(DofError::InconsistentCorner(format!(
            "{c}: durations give ({}), planes give ({})",
            from_durations.iter().map(fmt_rat).collect::<Vec<_>>().join(", "),
            from_planes.iter().map(fmt_rat).collect::<Vec<_>>().join(", ")
        )));
    }
    Ok(from_durations)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    #[serde(with = "serde_rat")]
    pub lhs: Rational,
    #[serde(with = "serde_rat")]
    pub rhs: Rational,
    /// `equal` or `at_most`.
    pub relation: String,
    pub holds: bool,
}

impl IdentityCheck {
    fn eq(name: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        let holds = lhs == rhs;
        IdentityCheck { name: name.into(), lhs, rhs, relation: "equal".into(), holds }
    }

    fn le(name: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        let holds = lhs <= rhs;
        IdentityCheck { name: name.into(), lhs, rhs, relation: "at_most".into(), holds }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformationReport {
    pub config: AntennaConfig,
    pub branch: Option<Branch>,
    pub durations: PhaseDurations,
    #[serde(with = "serde_rat_vec")]
    pub tuple: RatVector,
    pub checks: Vec<IdentityCheck>,
}

impl TransformationReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn into_result(self) -> Result<Self> {
        if let Some(bad) = self.checks.iter().find(|c| !c.holds) {
            return Err(DofError::IdentityViolated(format!("{}: {} gives {} vs {}", self.config, bad.name, fmt_rat(&bad.lhs), fmt_rat(&bad.rhs))));
        }
        Ok(self)
    }
}

/// Replays the order-1 derivation: decoding system, the α-lifted rows, the
/// divided rows, the ratio identities and the corner planes.
pub fn verify_transformation(c: &AntennaConfig) -> Result<TransformationReport> {
    let (d, branch) = solve_order1(c)?;
    let case = c.order1_case();
    let (n1, n2, n3, m) = (q(c.n1), q(c.n2), q(c.n3), q(c.m));
    let nn = [n1.clone(), n2.clone(), n3.clone()];
    let PhaseDurations { t1, t2, t3, t12, t23, t13, t } = d.clone();
    let alpha = d.alpha();
    let p = tuple_map(c, &d)?;
    let degenerate = branch == Branch::Degenerate;
    let mut checks = Vec::new();
    let push = |checks: &mut Vec<IdentityCheck>, i: usize, name: String, lhs: Rational, rhs: Rational| {
        // receiver 3 keeps slack in the fallback branch
        if degenerate && i == 2 {
            checks.push(IdentityCheck::le(name, lhs, rhs));
        } else {
            checks.push(IdentityCheck::eq(name, lhs, rhs));
        }
    };

    let res = case_system_residual(c, &d)?;
    for (i, r) in res.iter().enumerate() {
        push(&mut checks, i, format!("decoding-system-row-{}", i + 1), r.clone(), Rational::zero());
    }
    for (k, r) in relation_residual(c, &d)?.iter().enumerate() {
        checks.push(IdentityCheck::eq(format!("slot-relation-{}", k + 1), r.clone(), Rational::zero()));
    }
    if degenerate {
        checks.push(IdentityCheck::eq("fallback-T12-zero", t12.clone(), Rational::zero()));
    }

    // α-lifted rows
    let sum1 = &t1 + &t2 + &t3;
    let lifted: [Rational; 3] = match case {
        Order1Case::Case2 => [
            &sum1 * &n1 + &t12 * &m + &t23 * &n1 + &t13 * (&n1 + &n2),
            &sum1 * &n2 + &t12 * &m + &t23 * (&n1 + &n2) + &t13 * &n2,
            &sum1 * &n3 + &t12 * &n3 + (&t23 + &t13) * (&n1 + &n2),
        ],
        Order1Case::Case3 => [
            &sum1 * &n1 + &t12 * (&n1 + &n3) + &t23 * &n1 + &t13 * (&n1 + &n2),
            &sum1 * &n2 + &t12 * (&n1 + &n3) + &t23 * (&n1 + &n2) + &t13 * &n2,
            &sum1 * &n3 + &t12 * &n3 + (&t23 + &t13) * (&n1 + &n2),
        ],
        Order1Case::Case4 => [
            &sum1 * &n1 + &t12 * (&n1 + &n3) + &t13 * (&n1 + &n2) + &t23 * &n1 + &t1 * (&m - &n1 - &n2),
            &sum1 * &n2 + &t12 * (&n1 + &n3) + &t23 * (&n1 + &n2) + &t13 * &n2 + &t2 * (&m - &n2 - &n3),
            &sum1 * &n3 + &t12 * &n3 + (&t23 + &t13) * (&n1 + &n2) + &t3 * (&m - &n1 - &n3),
        ],
        Order1Case::Case1 => unreachable!(),
    };
    for i in 0..3 {
        push(&mut checks, i, format!("lifted-row-{}", i + 1), lifted[i].clone(), &alpha * &nn[i]);
    }

    // divided rows with the slot relations substituted
    let a = &alpha;
    let n12 = &n1 + &n2;
    let n13 = &n1 + &n3;
    let divided: [Rational; 3] = match case {
        Order1Case::Case2 => {
            let x = &t1 * &n12 + &t3 * &m;
            let y = &t1 * &n12 + &t2 * &m;
            let z = (&t2 + &t3) * &m;
            [
                &x / (a * &n1) + &y / (a * &n12) + &z / (a * &m),
                &x / (a * &n12) + &y / (a * &n2) + &z / (a * &m),
                &x / (a * &m) + &y / (a * &m) + &z / (a * &n3) + &t1 / a * (&m - &n1 - &n2) / &m,
            ]
        }
        Order1Case::Case3 => {
            let x = &t1 * &n12 + &t3 * &n13;
            let y = &t1 * &n12 + &t2 * &m;
            let z = &t2 * &m + &t3 * &n13;
            [
                &x / (a * &n1) + &y / (a * &n12) + &z / (a * &m) + &t3 / a * (&m - &n1 - &n3) / &m,
                &x / (a * &n12) + &y / (a * &n2) + &z / (a * &m) + &t3 / a * (&m - &n1 - &n3) / &m,
                &x / (a * &n13) + &y / (a * &m) + &z / (a * &n3) + &t1 / a * (&m - &n1 - &n2) / &m,
            ]
        }
        Order1Case::Case4 => {
            let x = (&t1 + &t3) * &m;
            let y = (&t1 + &t2) * &m;
            let z = (&t2 + &t3) * &m;
            [
                &x / (a * &n1) + &y / (a * &n12) + &z / (a * &m) + &t1 / a * (&m * &n2 - &n1 * &n2 - &n2 * &n2) / (&n12 * &n1),
                &x / (a * &m) + &y / (a * &n2) + &z / (a * &n12) + &t2 / a * (&m * &n1 - &n1 * &n3 - &n2 * &n3) / (&n12 * &n2),
                &x / (a * &n13) + &y / (a * &m) + &z / (a * &n3) + &t3 / a * (&m * &n1 - &n1 * &n3 - &n1 * &n1) / (&n13 * &n3),
            ]
        }
        Order1Case::Case1 => unreachable!(),
    };
    for (i, v) in divided.iter().enumerate() {
        push(&mut checks, i, format!("divided-row-{}", i + 1), v.clone(), Rational::one());
    }

    // ratio identities linking Phase-I durations to the tuple
    let s12 = &p[0] + &p[1] - &p[2];
    let s13 = &p[0] + &p[2] - &p[1];
    let s23 = &p[1] + &p[2] - &p[0];
    match case {
        Order1Case::Case2 => {
            checks.push(IdentityCheck::eq("ratio-T1", &t1 / a, &s12 / (int(2) * &n12)));
        }
        Order1Case::Case3 => {
            checks.push(IdentityCheck::eq("ratio-T1", &t1 / a, &s12 / (int(2) * &n12)));
            checks.push(IdentityCheck::eq("ratio-T3", &t3 / a, &s13 / (int(2) * &n13)));
        }
        Order1Case::Case4 => {
            checks.push(IdentityCheck::eq("ratio-T1", &t1 / a, &s12 / (int(2) * &m)));
            checks.push(IdentityCheck::eq("ratio-T2", &t2 / a, &s23 / (int(2) * &m)));
            checks.push(IdentityCheck::eq("ratio-T3", &t3 / a, &s13 / (int(2) * &m)));
        }
        Order1Case::Case1 => unreachable!(),
    }

    for pl in corner_planes(c, branch)? {
        checks.push(IdentityCheck::eq(format!("corner-{}", pl.name), pl.eval(&p), pl.rhs.clone()));
    }
    let _ = t;
    Ok(TransformationReport { config: *c, branch: Some(branch), durations: d, tuple: p, checks })
}

/// Order-2 replay: per-receiver decoding condition, the β-lifted rows and the
/// region rows at the delivered tuple.
pub fn verify_transformation_order2(c: &AntennaConfig, target: &[Rational]) -> Result<TransformationReport> {
    let d = order2_durations_for_target(c, target)?;
    let (b1, b2, b3, cc) = order2_antenna_params(c)?;
    let n = c.n();
    let lack = order2_lacking(c, &d)?;
    let beta = d.beta();
    let mut checks = Vec::new();
    let budget: Vec<Rational> = (0..3).map(|i| &d.t * q(n[i].min(cc))).collect();
    for i in 0..3 {
        checks.push(IdentityCheck::le(format!("lacking-receiver-{}", i + 1), lack[i].clone(), budget[i].clone()));
    }
    let binding = (0..3).any(|i| lack[i] == budget[i]);
    checks.push(IdentityCheck::eq("some-receiver-binding", int(binding as i64), int(1)));
    let (fb1, fb2, fb3) = (q(b1), q(b2), q(b3));
    let (t12, t23, t13) = (&d.t12, &d.t23, &d.t13);
    let lifted = [t12 * &fb1 + t13 * &fb3 + t23 * q(n[0]), t12 * &fb1 + t23 * &fb2 + t13 * q(n[1]), t23 * &fb2 + t13 * &fb3 + t12 * q(n[2])];
    for i in 0..2 {
        checks.push(IdentityCheck::le(format!("lifted-row-{}", i + 1), lifted[i].clone(), &beta * q(n[i])));
    }
    let tuple = order2_tuple(c, &d)?;
    let region = order2_region_delayed(c);
    let rows: Vec<Rational> = region.halfspaces.iter().filter(|h| h.offset == Rational::one()).map(|h| h.eval(&tuple)).collect();
    for (i, v) in rows.iter().enumerate() {
        checks.push(IdentityCheck::le(format!("region-row-{}", i + 1), v.clone(), Rational::one()));
    }
    checks.push(IdentityCheck::eq("tuple-on-boundary", rows.iter().max().cloned().unwrap_or_else(Rational::zero), Rational::one()));
    Ok(TransformationReport { config: *c, branch: None, durations: d, tuple, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{intv, ratv};

    fn cfg(a: u32, b: u32, c: u32, m: u32) -> AntennaConfig {
        AntennaConfig::new(a, b, c, m).unwrap()
    }

    #[test]
    fn antenna_params() {
        assert_eq!(order2_antenna_params(&cfg(1, 2, 3, 3)).unwrap(), (3, 3, 3, 2));
        assert_eq!(order2_antenna_params(&cfg(1, 1, 1, 2)).unwrap(), (2, 2, 2, 1));
        assert_eq!(order2_antenna_params(&cfg(2, 3, 4, 9)).unwrap(), (6, 5, 5, 4));
        assert!(order2_antenna_params(&cfg(1, 2, 3, 2)).is_err());
    }

    #[test]
    fn order2_symmetric_target() {
        let d = order2_durations_for_target(&cfg(1, 1, 1, 2), &ratv(&[(2, 5), (2, 5), (2, 5)])).unwrap();
        assert_eq!(d, PhaseDurations::from_ints([0, 0, 0, 1, 1, 1, 2]));
    }

    #[test]
    fn order2_axis_target() {
        let c = cfg(1, 2, 3, 3);
        let d = order2_durations_for_target(&c, &intv(&[0, 2, 0])).unwrap();
        assert!(d.t12.is_zero() && d.t13.is_zero() && d.t23.is_positive());
        assert_eq!(order2_tuple(&c, &d).unwrap(), intv(&[0, 2, 0]));
        assert_eq!(d, PhaseDurations::from_ints([0, 0, 0, 0, 2, 0, 1]));
    }

    #[test]
    fn order2_target_errors() {
        let c = cfg(1, 1, 1, 2);
        assert_eq!(order2_durations_for_target(&c, &intv(&[0, 0, 0])), Err(DofError::ZeroTarget));
        assert!(matches!(order2_durations_for_target(&c, &intv(&[1, 1, 1])), Err(DofError::TargetOutsideRegion(_))));
    }

    #[test]
    fn case2_equality_config() {
        let (d, b) = solve_case2(&cfg(3, 3, 4, 7)).unwrap();
        assert_eq!(b, Branch::Primary);
        assert_eq!(d, PhaseDurations::from_ints([0, 6, 6, 0, 7, 7, 7]));
        // ratio T23 : T2 = M : (N1+N2)
        assert_eq!(&d.t23 * int(6), &d.t2 * int(7));
    }

    #[test]
    fn case2_fallback() {
        let (d, b) = solve_case2(&cfg(1, 1, 3, 4)).unwrap();
        assert_eq!(b, Branch::Degenerate);
        assert_eq!((d.t12.clone(), d.t23.clone(), d.t13.clone()), (int(0), d.t.clone(), d.t.clone()));
    }

    #[test]
    fn case4_symmetric_one() {
        let d = solve_case4(&cfg(1, 1, 1, 3)).unwrap();
        assert_eq!(d, PhaseDurations::from_ints([2, 2, 2, 3, 3, 3, 8]));
        assert_eq!(d.alpha(), int(23));
    }

    #[test]
    fn corner_examples() {
        assert_eq!(corner_point(&cfg(3, 3, 4, 7)).unwrap(), ratv(&[(14, 11), (14, 11), (28, 11)]));
        assert_eq!(corner_point(&cfg(1, 1, 1, 3)).unwrap(), ratv(&[(12, 23), (12, 23), (12, 23)]));
    }

    #[test]
    fn fallback_corner_is_flat() {
        let p = corner_point(&cfg(1, 1, 3, 4)).unwrap();
        assert_eq!(&p[0] + &p[1], p[2]);
    }

    #[test]
    fn transformation_symmetric_case4() {
        let rep = verify_transformation(&cfg(1, 1, 1, 3)).unwrap();
        assert!(rep.all_hold(), "{rep:?}");
        let plane1 = rep.checks.iter().find(|c| c.name == "corner-case4-plane-1").unwrap();
        assert_eq!(plane1.lhs, int(1));
    }

    #[test]
    fn transformation_order2_symmetric() {
        let rep = verify_transformation_order2(&cfg(1, 1, 1, 2), &ratv(&[(2, 5), (2, 5), (2, 5)])).unwrap();
        assert!(rep.all_hold(), "{rep:?}");
        assert_eq!(rep.tuple, ratv(&[(2, 5), (2, 5), (2, 5)]));
    }
}

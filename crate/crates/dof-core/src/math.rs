//! Exact rational scalars and matrices, plus a prime-field twin used by the
//! simulator when systems grow past what fraction arithmetic handles quickly.

use crate::error::{DofError, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

pub type Rational = BigRational;
pub type RatVector = Vec<Rational>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn ratv(xs: &[(i64, i64)]) -> RatVector {
    xs.iter().map(|&(n, d)| rat(n, d)).collect()
}

pub fn intv(xs: &[i64]) -> RatVector {
    xs.iter().map(|&n| int(n)).collect()
}

/// "p/q", or "p" when the denominator is one.
pub fn fmt_rat(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || DofError::InvalidInput(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Clears denominators and divides out the common gcd, keeping sign.
/// The zero vector maps to itself.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub mod serde_rat {
    use super::{fmt_rat, parse_rat, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rat_vec {
    use super::{fmt_rat, parse_rat, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(fmt_rat).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rat(s).map_err(serde::de::Error::custom)).collect()
    }
}

pub mod serde_rat_vecvec {
    use super::{fmt_rat, parse_rat, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|r| r.iter().map(fmt_rat).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let v = Vec::<Vec<String>>::deserialize(d)?;
        v.iter().map(|r| r.iter().map(|s| parse_rat(s).map_err(serde::de::Error::custom)).collect()).collect()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(fmt_rat).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(DofError::InvalidInput("ragged matrix rows".into()));
        }
        Ok(RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let v = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_rows(v).expect("rectangular literal")
    }

    pub fn from_i64_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, int(x));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<RatVector> {
        if x.len() != self.cols {
            return Err(DofError::DimensionMismatch(self.cols, x.len()));
        }
        Ok((0..self.rows).map(|r| dot(self.row(r), x)).collect())
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(DofError::DimensionMismatch(self.cols, other.rows));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    /// Rows scaled to integers, for fraction-free elimination.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| (x * &l).to_integer()).collect()
            })
            .collect()
    }

    /// Exact rank by Bareiss elimination.
    pub fn rank(&self) -> usize {
        bareiss_rank(self.integer_rows(), self.cols)
    }

    /// Reduced row echelon form over the rationals; returns pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut rows: Vec<Vec<Rational>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let pivots = rref_in_place(&mut rows, self.cols);
        let m = RatMatrix { rows: self.rows, cols: self.cols, data: rows.into_iter().flatten().collect() };
        (m, pivots)
    }

    pub fn solve_unique(&self, b: &[Rational]) -> Result<RatVector> {
        if b.len() != self.rows {
            return Err(DofError::DimensionMismatch(self.rows, b.len()));
        }
        let rank = self.rank();
        if rank < self.cols {
            return Err(DofError::RankDeficient { rank, cols: self.cols });
        }
        let mut rows: Vec<Vec<Rational>> = (0..self.rows)
            .map(|r| {
                let mut v = self.row(r).to_vec();
                v.push(b[r].clone());
                v
            })
            .collect();
        let pivots = rref_in_place(&mut rows, self.cols + 1);
        if pivots.contains(&self.cols) {
            return Err(DofError::Inconsistent);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = rows[i][self.cols].clone();
        }
        Ok(x)
    }

    /// Basis of the right null space.
    pub fn kernel(&self) -> Vec<RatVector> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    pub fn select_columns(&self, cols: &[usize]) -> RatMatrix {
        let mut m = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.set(r, j, self.get(r, c).clone());
            }
        }
        m
    }

    pub fn vstack(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.rows > 0 && other.rows > 0 && self.cols != other.cols {
            return Err(DofError::DimensionMismatch(self.cols, other.cols));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(RatMatrix { rows: self.rows + other.rows, cols, data })
    }
}

pub fn blkdiag(blocks: &[RatMatrix]) -> Result<RatMatrix> {
    if blocks.is_empty() {
        return Err(DofError::InvalidInput("blkdiag needs at least one block".into()));
    }
    let rows = blocks.iter().map(|b| b.rows).sum();
    let cols = blocks.iter().map(|b| b.cols).sum();
    let mut m = RatMatrix::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for r in 0..b.rows {
            for c in 0..b.cols {
                m.set(r0 + r, c0 + c, b.get(r, c).clone());
            }
        }
        r0 += b.rows;
        c0 += b.cols;
    }
    Ok(m)
}

/// Fraction-free elimination. Every intermediate entry is a minor of the
/// input, so division by the previous pivot is exact.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let nrows = m.len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let (head, tail) = m.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pv = pivot_row[c].clone();
        for row in tail.iter_mut() {
            let f = row[c].clone();
            for j in c..cols {
                let v = &pv * &row[j] - &f * &pivot_row[j];
                row[j] = v / &prev;
            }
            // columns left of c are already zero below the pivot rows
        }
        prev = pv;
        rank += 1;
    }
    rank
}

/// Exact determinant of a square matrix.
pub fn determinant(a: &RatMatrix) -> Result<Rational> {
    if a.rows != a.cols {
        return Err(DofError::DimensionMismatch(a.rows, a.cols));
    }
    let n = a.rows;
    let mut rows: Vec<Vec<Rational>> = (0..n).map(|r| a.row(r).to_vec()).collect();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !rows[r][c].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != c {
            rows.swap(p, c);
            det = -det;
        }
        let pv = rows[c][c].clone();
        det *= &pv;
        for r in c + 1..n {
            let f = &rows[r][c] / &pv;
            if f.is_zero() {
                continue;
            }
            for j in c..n {
                let v = &rows[r][j] - &f * &rows[c][j];
                rows[r][j] = v;
            }
        }
    }
    Ok(det)
}

/// Scalar field abstraction so the same elimination runs over the
/// rationals and over a prime field.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn f_zero() -> Self;
    fn f_one() -> Self;
    fn f_from_i64(v: i64) -> Self;
    fn f_is_zero(&self) -> bool;
    fn f_add(&self, o: &Self) -> Self;
    fn f_sub(&self, o: &Self) -> Self;
    fn f_mul(&self, o: &Self) -> Self;
    fn f_inv(&self) -> Self;
}

impl Field for Rational {
    fn f_zero() -> Self {
        Zero::zero()
    }
    fn f_one() -> Self {
        One::one()
    }
    fn f_from_i64(v: i64) -> Self {
        int(v)
    }
    fn f_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn f_add(&self, o: &Self) -> Self {
        self + o
    }
    fn f_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn f_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn f_inv(&self) -> Self {
        self.recip()
    }
}

/// Integer residues modulo the prime `P` (< 2^62).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Fp<const P: u64>(pub u64);

pub const P61: u64 = (1 << 61) - 1;
pub const P61B: u64 = 2_305_843_009_213_693_921;

impl<const P: u64> Fp<P> {
    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::<P>(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = Field::f_mul(&acc, &base);
            }
            base = Field::f_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        let r = v.mod_floor(&BigInt::from(P));
        Fp(r.to_u64().expect("reduced residue fits"))
    }
}

impl<const P: u64> Field for Fp<P> {
    fn f_zero() -> Self {
        Fp(0)
    }
    fn f_one() -> Self {
        Fp(1)
    }
    fn f_from_i64(v: i64) -> Self {
        Fp((v as i128).rem_euclid(P as i128) as u64)
    }
    fn f_is_zero(&self) -> bool {
        self.0 == 0
    }
    fn f_add(&self, o: &Self) -> Self {
        let s = self.0 + o.0;
        Fp(if s >= P { s - P } else { s })
    }
    fn f_sub(&self, o: &Self) -> Self {
        Fp(if self.0 >= o.0 { self.0 - o.0 } else { self.0 + P - o.0 })
    }
    fn f_mul(&self, o: &Self) -> Self {
        Fp(((self.0 as u128 * o.0 as u128) % P as u128) as u64)
    }
    fn f_inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero");
        self.pow(P - 2)
    }
}

/// Gauss-Jordan to reduced row echelon form; returns pivot columns in order.
/// Only the first `cols` entries of each row take part in pivoting, any
/// trailing entries (an augmented right-hand side) are carried along.
pub fn rref_in_place<F: Field>(rows: &mut [Vec<F>], cols: usize) -> Vec<usize> {
    let n = rows.len();
    let width = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| !rows[i][c].f_is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].f_inv();
        for j in c..width {
            rows[r][j] = rows[r][j].f_mul(&inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].f_is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in c..width {
                if !pivot_row[j].f_is_zero() {
                    row[j] = row[j].f_sub(&f.f_mul(&pivot_row[j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_over<F: Field>(mut rows: Vec<Vec<F>>, cols: usize) -> usize {
    rref_in_place(&mut rows, cols).len()
}

pub fn is_nonneg(x: &Rational) -> bool {
    !x.is_negative()
}

//! Dense matrices over the rationals with exact rank, nullspace,
//! characteristic polynomial and rational eigenvalues.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{convergents, fmt_q, to_f64, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Q::one())
    }

    pub fn scalar(n: usize, c: Q) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect())
                .collect(),
        )
    }

    /// Columns given as vectors.
    pub fn from_columns(n: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn trace(&self) -> Q {
        (0..self.rows.min(self.cols)).fold(Q::zero(), |s, i| s + &self[(i, i)])
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// `self + c·I`.
    pub fn shift(&self, c: &Q) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] += c;
        }
        m
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}×{} times {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Q::zero(), |s, (a, b)| s + a * b)
            })
            .collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Sub-block `[r0, r0+nr) × [c0, c0+nc)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        let mut b = Self::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                b[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        b
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::Dimension("vstack column mismatch".into()));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Self {
            rows: self.rows + other.rows,
            cols,
            data,
        })
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        Ok(self.transpose().vstack(&other.transpose())?.transpose())
    }

    /// `A ⊗ B`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        out[(i * other.rows + p, j * other.cols + q)] = a * &other[(p, q)];
                    }
                }
            }
        }
        out
    }

    /// Rank by fraction-free (Bareiss) elimination on integer rows.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows).map(|i| integer_row(self.row(i))).collect();
        bareiss_rank(&mut a, self.cols)
    }

    /// Rank modulo the prime `p < 2^63`, a lower bound for the rank over
    /// the rationals. `None` when some denominator is divisible by `p`.
    pub fn rank_mod_p(&self, p: u64) -> Option<usize> {
        let pb = BigInt::from(p);
        let reduce = |x: &BigInt| -> u64 {
            let r = x.mod_floor(&pb);
            r.to_u64_digits().1.first().copied().unwrap_or(0)
        };
        let mut a = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::with_capacity(self.cols);
            for x in self.row(i) {
                let d = reduce(x.denom());
                if d == 0 {
                    return None;
                }
                row.push(mul_mod(reduce(x.numer()), pow_mod(d, p - 2, p), p));
            }
            a.push(row);
        }
        let mut r = 0;
        for c in 0..self.cols {
            let Some(piv) = (r..a.len()).find(|&i| a[i][c] != 0) else {
                continue;
            };
            a.swap(r, piv);
            let inv = pow_mod(a[r][c], p - 2, p);
            let pivot_row = a[r].clone();
            for row in a.iter_mut().skip(r + 1) {
                if row[c] != 0 {
                    let f = mul_mod(row[c], inv, p);
                    for j in c..self.cols {
                        row[j] = (row[j] + p - mul_mod(f, pivot_row[j], p)) % p;
                    }
                }
            }
            r += 1;
            if r == a.len() {
                break;
            }
        }
        Some(r)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = &m[(r, j)] * &f;
                        m[(i, j)] -= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Basis of `{x : self·x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Basis of the column space, chosen among the columns.
    pub fn column_basis(&self) -> Vec<Vec<Q>> {
        let (_, pivots) = self.rref();
        pivots.iter().map(|&c| self.column(c)).collect()
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n))?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Degenerate("singular matrix".into()));
        }
        Ok(r.block(0, n, n, n))
    }

    /// Characteristic polynomial `det(x − A)` by Faddeev–LeVerrier,
    /// coefficients from the constant term up.
    pub fn char_poly(&self) -> Result<Poly> {
        if !self.is_square() {
            return Err(Error::Dimension("characteristic polynomial of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut c = vec![Q::zero(); n + 1];
        c[n] = Q::one();
        let mut m = Self::zeros(n, n);
        for k in 1..=n {
            m = (self * &m).shift(&c[n - k + 1]);
            let am = self * &m;
            c[n - k] = -am.trace() / Q::from_integer(BigInt::from(k));
        }
        Ok(Poly::new(c))
    }

    /// Rational eigenvalues with algebraic multiplicities; errors if the
    /// characteristic polynomial does not split over the rationals.
    pub fn rational_eigenvalues(&self) -> Result<Vec<(Q, usize)>> {
        let p = self.char_poly()?;
        let (roots, rest) = rational_roots(&p);
        if rest.degree() > 0 {
            return Err(Error::IrrationalEigenvalue);
        }
        Ok(roots)
    }

    /// Rational eigenvalues only, ignoring any irrational part of the spectrum.
    pub fn rational_spectrum(&self) -> Result<Vec<Q>> {
        let p = self.char_poly()?;
        Ok(rational_roots(&p).0.into_iter().map(|(r, _)| r).collect())
    }
}

fn integer_row(row: &[Q]) -> Vec<BigInt> {
    let den = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&den / x.denom()))
        .collect()
}

fn bareiss_rank(a: &mut [Vec<BigInt>], cols: usize) -> usize {
    let rows = a.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &RationalMatrix {
    type Output = RationalMatrix;
    fn add(self, o: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RationalMatrix {
    type Output = RationalMatrix;
    fn sub(self, o: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RationalMatrix {
    type Output = RationalMatrix;
    fn neg(self) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, o: &RationalMatrix) -> RationalMatrix {
        self.try_mul(o).expect("shape mismatch")
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(fmt_q).collect();
        let w = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{:>w$}", cells[i * self.cols + j])?;
            }
            f.write_str("]\n")?;
        }
        Ok(())
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(fmt_q).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Polynomial with rational coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Q::zero());
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * x + c)
    }

    fn eval_f64(&self, x: (f64, f64)) -> (f64, f64) {
        let mut acc = (0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = cmul(acc, x);
            acc.0 += to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::new(vec![Q::zero()]);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Q::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        let lead = self.coeffs.last().unwrap().clone();
        if lead.is_zero() {
            return self.clone();
        }
        Self::new(self.coeffs.iter().map(|c| c / &lead).collect())
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let lead = d.coeffs[dd].clone();
        if self.degree() < dd {
            return (Poly::new(vec![Q::zero()]), self.clone());
        }
        let mut q = vec![Q::zero(); self.degree() - dd + 1];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dd.max(1));
        (Poly::new(q), Poly::new(r))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

/// Approximate complex roots of a square-free polynomial (Durand–Kerner).
fn approximate_roots(p: &Poly) -> Vec<(f64, f64)> {
    let m = p.monic();
    let n = m.degree();
    if n == 0 {
        return Vec::new();
    }
    let bound = 1.0
        + m.coeffs[..n]
            .iter()
            .map(|c| to_f64(c).abs())
            .fold(0.0, f64::max);
    let mut z: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64 + 0.4;
            (bound * 0.5 * t.cos(), bound * 0.5 * t.sin())
        })
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = (1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den = cmul(den, (z[i].0 - z[j].0, z[i].1 - z[j].1));
                }
            }
            let step = cdiv(m.eval_f64(z[i]), den);
            z[i] = (z[i].0 - step.0, z[i].1 - step.1);
            delta = delta.max(step.0.abs().max(step.1.abs()) / (1.0 + z[i].0.abs() + z[i].1.abs()));
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

/// Newton iteration in exact arithmetic from a float guess, rounding to
/// 256-bit dyadics between steps, then a search of the continued-fraction
/// convergents of the limit.
fn refine_rational_root(p: &Poly, guess: f64) -> Option<Q> {
    let scale = BigInt::one() << 256usize;
    let round = |x: &Q| -> Q {
        let y = x * Q::from_integer(scale.clone());
        Q::new(y.round().to_integer(), scale.clone())
    };
    let mut x = Q::from_float(guess)?;
    let dp = p.derivative();
    for _ in 0..12 {
        let d = dp.eval(&x);
        if d.is_zero() {
            break;
        }
        x = round(&(&x - p.eval(&x) / d));
    }
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let limit = BigInt::one() << 100usize;
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > limit {
            break;
        }
        let c = Q::new(h2.clone(), k2.clone());
        if p.eval(&c).is_zero() {
            return Some(c);
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        num = std::mem::replace(&mut den, r);
    }
    None
}

/// Rational roots of `p` with multiplicities, plus the cofactor without
/// rational roots.
pub fn rational_roots(p: &Poly) -> (Vec<(Q, usize)>, Poly) {
    let mut rest = p.monic();
    let mut found: Vec<(Q, usize)> = Vec::new();
    if rest.degree() == 0 {
        return (found, rest);
    }
    let sqfree = rest.div_rem(&rest.gcd(&rest.derivative())).0;
    for (re, im) in approximate_roots(&sqfree) {
        if im.abs() > 1e-6 * (1.0 + re.abs()) {
            continue;
        }
        let hit = convergents(re, 1_000_000)
            .into_iter()
            .rev()
            .find(|c| sqfree.eval(c).is_zero())
            .or_else(|| refine_rational_root(&sqfree, re));
        let Some(r) = hit else { continue };
        if found.iter().any(|(x, _)| *x == r) {
            continue;
        }
        let lin = Poly::new(vec![-r.clone(), Q::one()]);
        let mut mult = 0;
        loop {
            let (q, rem) = rest.div_rem(&lin);
            if !rem.is_zero() {
                break;
            }
            rest = q;
            mult += 1;
        }
        found.push((r, mult));
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    (found, rest)
}

/// Sign of a rational as -1, 0, 1.
pub fn signum(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(p)) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

//! Tuples of partitions ("spectral types") and the bilinear index form.
//!
//! A tuple `m = (m_0, …, m_k)` stores only its nontrivial prefix: every
//! partition `j > k` is implicitly the one-part partition `(n)`. All
//! operations pad with such trivial partitions when two tuples of different
//! length meet, so `idx` and friends never depend on how many trivial
//! partitions happen to be stored.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Partition = Vec<u32>;

/// A tuple of partitions of a common order `n` with strictly positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpectralType {
    parts: Vec<Partition>,
    order: u32,
}

/// A column-aligned tuple whose entries may be zero.
///
/// Raw outputs of `∂_ℓ`, summands of rigid decompositions and sub-tuples in
/// the Deligne–Simpson search keep their positions because eigenvalues are
/// attached to positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlignedTuple {
    rows: Vec<Vec<u32>>,
    order: u32,
}

/// S∞-normal form: sorted partitions, descending-lex partition order,
/// trivial partitions removed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalForm(SpectralType);

fn check_sums(rows: &[Vec<u32>]) -> Result<u32> {
    let mut order: Option<u64> = None;
    for (index, row) in rows.iter().enumerate() {
        let s: u64 = row.iter().map(|&x| x as u64).sum();
        match order {
            None => order = Some(s),
            Some(expected) if expected != s => {
                return Err(Error::OrderMismatch {
                    index,
                    found: s,
                    expected,
                })
            }
            _ => {}
        }
    }
    let order = order.ok_or_else(|| Error::Parse("empty tuple".into()))?;
    u32::try_from(order).map_err(|_| Error::BoundExceeded("order exceeds u32".into()))
}

impl SpectralType {
    /// Builds a tuple, dropping zero parts and (when `n > 1`) trivial
    /// one-part partitions.
    pub fn new(parts: Vec<Partition>) -> Result<Self> {
        Self::build(parts, true)
    }

    /// Like [`SpectralType::new`] but keeps one-part partitions in place.
    pub fn untrimmed(parts: Vec<Partition>) -> Result<Self> {
        Self::build(parts, false)
    }

    fn build(parts: Vec<Partition>, trim: bool) -> Result<Self> {
        let parts: Vec<Partition> = parts
            .into_iter()
            .map(|p| p.into_iter().filter(|&x| x > 0).collect())
            .collect();
        let order = check_sums(&parts)?;
        if order == 0 {
            return Err(Error::Parse("tuple of order 0".into()));
        }
        let parts = if trim && order > 1 {
            parts.into_iter().filter(|p| p.len() > 1).collect()
        } else {
            parts
        };
        Ok(Self { parts, order })
    }

    /// The order-1 tuple `1`.
    pub fn one() -> Self {
        Self {
            parts: Vec::new(),
            order: 1,
        }
    }

    /// `n`-fold trivial tuple with no stored partition (used as a padding unit).
    pub(crate) fn from_raw_unchecked(parts: Vec<Partition>, order: u32) -> Self {
        Self { parts, order }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_rows(text, false)?)
    }

    pub fn parse_untrimmed(text: &str) -> Result<Self> {
        Self::untrimmed(parse_rows(text, false)?)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.parts
    }

    /// Number of stored partitions (`k + 1`).
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `m_{j,ν}` with 1-based `ν`; trivial partitions beyond the stored ones.
    pub fn part(&self, j: usize, nu: usize) -> u32 {
        part_of(&self.parts, self.order, j, nu)
    }

    pub fn is_monotone(&self) -> bool {
        self.parts
            .iter()
            .all(|p| p.windows(2).all(|w| w[0] >= w[1]))
    }

    pub fn to_aligned(&self) -> AlignedTuple {
        AlignedTuple {
            rows: self.parts.clone(),
            order: self.order,
        }
    }

    /// `idx m = idx(m, m)`.
    pub fn index_of_rigidity(&self) -> i64 {
        idx(self, self)
    }

    /// Applies `g = (σ, σ_0, σ_1, …)`: partition `j` of the result is
    /// partition `sigma[j]` of `self` with its parts permuted by `within[sigma[j]]`.
    pub fn permuted(&self, sigma: &[usize], within: &[Vec<usize>]) -> Result<Self> {
        if sigma.len() != self.parts.len() {
            return Err(Error::Precondition("permutation length mismatch".into()));
        }
        let mut parts = Vec::with_capacity(sigma.len());
        for &src in sigma {
            let p = self
                .parts
                .get(src)
                .ok_or_else(|| Error::Precondition("permutation index out of range".into()))?;
            let perm = &within[src];
            parts.push(perm.iter().map(|&i| p[i]).collect());
        }
        Self::untrimmed(parts)
    }
}

fn part_of(rows: &[Vec<u32>], order: u32, j: usize, nu: usize) -> u32 {
    assert!(nu >= 1, "partition positions are 1-based");
    match rows.get(j) {
        Some(p) => p.get(nu - 1).copied().unwrap_or(0),
        None if nu == 1 => order,
        None => 0,
    }
}

fn parse_rows(text: &str, allow_zero: bool) -> Result<Vec<Vec<u32>>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty input".into()));
    }
    let mut rows = Vec::new();
    for (j, token) in text.split(',').enumerate() {
        let token = token.trim();
        if token.is_empty() {
            return Err(Error::Parse(format!("partition {j} is empty")));
        }
        let row: Vec<u32> = if token.contains(char::is_whitespace) {
            token
                .split_whitespace()
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("non-numeric token {t:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            token
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::Parse(format!("non-numeric token {token:?}")))
                })
                .collect::<Result<_>>()?
        };
        if !allow_zero && row.contains(&0) {
            return Err(Error::Parse(format!("zero part in partition {j}")));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn write_rows(f: &mut fmt::Formatter<'_>, rows: &[Vec<u32>], order: u32) -> fmt::Result {
    if rows.is_empty() {
        return write!(f, "{order}");
    }
    let compact = rows.iter().flatten().all(|&x| x <= 9);
    for (j, row) in rows.iter().enumerate() {
        if j > 0 {
            f.write_str(",")?;
        }
        for (i, x) in row.iter().enumerate() {
            if !compact && i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
    }
    Ok(())
}

impl fmt::Display for SpectralType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, &self.parts, self.order)
    }
}

impl std::str::FromStr for SpectralType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for SpectralType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.parts.is_empty() {
            vec![vec![self.order]].serialize(s)
        } else {
            self.parts.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for SpectralType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<u32>>::deserialize(d)?;
        SpectralType::new(rows).map_err(serde::de::Error::custom)
    }
}

impl AlignedTuple {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let order = check_sums(&rows)?;
        Ok(Self { rows, order })
    }

    /// Empty row set of a given order (all partitions trivial).
    pub fn trivial(order: u32) -> Self {
        Self {
            rows: Vec::new(),
            order,
        }
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<u32>>, order: u32) -> Self {
        Self { rows, order }
    }

    /// Parses the compact notation, accepting zero entries (`01,10,10`).
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_rows(text, true)?)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn part(&self, j: usize, nu: usize) -> u32 {
        part_of(&self.rows, self.order, j, nu)
    }

    /// Drops zeros and trivial partitions.
    pub fn to_spectral(&self) -> Result<SpectralType> {
        SpectralType::new(self.rows.clone())
    }

    pub fn canonical(&self) -> Result<CanonicalForm> {
        Ok(canonicalize(&self.to_spectral()?))
    }

    pub fn index_of_rigidity(&self) -> i64 {
        idx_rows(&self.rows, self.order, &self.rows, self.order)
    }

    /// Componentwise difference; `None` if some entry would go negative or
    /// the shapes differ.
    pub fn checked_sub(&self, other: &AlignedTuple) -> Option<AlignedTuple> {
        if self.rows.len() != other.rows.len() {
            return None;
        }
        let mut rows = Vec::with_capacity(self.rows.len());
        for (a, b) in self.rows.iter().zip(&other.rows) {
            if a.len() != b.len() {
                return None;
            }
            let mut r = Vec::with_capacity(a.len());
            for (x, y) in a.iter().zip(b) {
                r.push(x.checked_sub(*y)?);
            }
            rows.push(r);
        }
        Some(AlignedTuple {
            rows,
            order: self.order.checked_sub(other.order)?,
        })
    }

    pub fn gcd(&self) -> u32 {
        self.rows
            .iter()
            .flatten()
            .fold(self.order, |g, &x| g.gcd(&x))
    }
}

impl fmt::Display for AlignedTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rows(f, &self.rows, self.order)
    }
}

impl Serialize for AlignedTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows.serialize(s)
    }
}

impl From<&SpectralType> for AlignedTuple {
    fn from(m: &SpectralType) -> Self {
        m.to_aligned()
    }
}

impl CanonicalForm {
    pub fn as_type(&self) -> &SpectralType {
        &self.0
    }

    pub fn into_type(self) -> SpectralType {
        self.0
    }

    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Deref for CanonicalForm {
    type Target = SpectralType;
    fn deref(&self) -> &SpectralType {
        &self.0
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for CanonicalForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Reports order by (order, partitions) with partitions descending.
impl Ord for CanonicalForm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .order
            .cmp(&other.0.order)
            .then_with(|| other.0.parts.cmp(&self.0.parts))
    }
}

impl PartialOrd for CanonicalForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn canonicalize(m: &SpectralType) -> CanonicalForm {
    canonicalize_rows(m.parts.clone(), m.order)
}

pub(crate) fn canonicalize_rows(rows: Vec<Vec<u32>>, order: u32) -> CanonicalForm {
    let mut parts: Vec<Partition> = rows
        .into_iter()
        .map(|mut p| {
            p.retain(|&x| x > 0);
            p.sort_unstable_by(|a, b| b.cmp(a));
            p
        })
        .filter(|p| p.len() > 1)
        .collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    CanonicalForm(SpectralType { parts, order })
}

/// `idx(m, m') = Σ m_{j,ν} m'_{j,ν} − (k−1) ord m · ord m'`, both padded to a
/// common `k` with trivial partitions.
pub fn idx(m: &SpectralType, m2: &SpectralType) -> i64 {
    idx_rows(&m.parts, m.order, &m2.parts, m2.order)
}

pub fn idx_aligned(m: &AlignedTuple, m2: &AlignedTuple) -> i64 {
    idx_rows(&m.rows, m.order, &m2.rows, m2.order)
}

pub(crate) fn idx_rows(a: &[Vec<u32>], na: u32, b: &[Vec<u32>], nb: u32) -> i64 {
    let len = a.len().max(b.len());
    let (na, nb) = (na as i64, nb as i64);
    let mut s = 0i64;
    for j in 0..len {
        s += match (a.get(j), b.get(j)) {
            (Some(p), Some(q)) => p
                .iter()
                .zip(q)
                .map(|(&x, &y)| x as i64 * y as i64)
                .sum::<i64>(),
            (Some(p), None) => p.first().copied().unwrap_or(0) as i64 * nb,
            (None, Some(q)) => na * q.first().copied().unwrap_or(0) as i64,
            (None, None) => unreachable!(),
        };
    }
    s - (len as i64 - 2) * na * nb
}

/// Componentwise `a·m + b·m2` on column-aligned tuples.
pub fn scale_add(a: u32, m: &AlignedTuple, b: u32, m2: &AlignedTuple) -> Result<SpectralType> {
    if a == 0 && b == 0 {
        return Err(Error::Precondition("both coefficients are zero".into()));
    }
    let scaled = |t: &AlignedTuple, c: u32| -> Vec<Vec<u32>> {
        t.rows
            .iter()
            .map(|r| r.iter().map(|&x| x * c).collect())
            .collect()
    };
    if b == 0 {
        return SpectralType::new(scaled(m, a)).or_else(|_| Ok(trivial_type(a * m.order)));
    }
    if a == 0 {
        return SpectralType::new(scaled(m2, b)).or_else(|_| Ok(trivial_type(b * m2.order)));
    }
    let len = m.rows.len().max(m2.rows.len());
    let pad = |t: &AlignedTuple, j: usize| -> Vec<u32> {
        t.rows.get(j).cloned().unwrap_or_else(|| vec![t.order])
    };
    let mut rows = Vec::with_capacity(len);
    for j in 0..len {
        let (p, q) = (pad(m, j), pad(m2, j));
        if p.len() != q.len() {
            return Err(Error::Misaligned(format!(
                "partition {j} has {} vs {} columns",
                p.len(),
                q.len()
            )));
        }
        rows.push(p.iter().zip(&q).map(|(&x, &y)| a * x + b * y).collect());
    }
    let order = a * m.order + b * m2.order;
    if rows.is_empty() {
        return Ok(trivial_type(order));
    }
    SpectralType::new(rows)
}

fn trivial_type(order: u32) -> SpectralType {
    SpectralType::from_raw_unchecked(Vec::new(), order)
}

/// gcd of all parts (and the order); `m` is indivisible iff this is 1.
pub fn gcd_of(m: &SpectralType) -> u32 {
    m.parts.iter().flatten().fold(m.order, |g, &x| g.gcd(&x))
}

/// Prefix-sum dominance `m_1+⋯+m_j ≤ m'_1+⋯+m'_j` for all `j`.
pub fn dominance_leq(m: &[u32], m2: &[u32]) -> Result<bool> {
    let (s1, s2): (u64, u64) = (
        m.iter().map(|&x| x as u64).sum(),
        m2.iter().map(|&x| x as u64).sum(),
    );
    if s1 != s2 {
        return Err(Error::UnequalSums(s1, s2));
    }
    let (mut a, mut b) = (0u64, 0u64);
    for i in 0..m.len().max(m2.len()) {
        a += m.get(i).copied().unwrap_or(0) as u64;
        b += m2.get(i).copied().unwrap_or(0) as u64;
        if a > b {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> SpectralType {
        SpectralType::parse(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        let m = st("11,11,11");
        assert_eq!(m.partitions(), &[vec![1, 1], vec![1, 1], vec![1, 1]]);
        assert_eq!(m.order(), 2);
        let m = st("411,411,42,33");
        assert_eq!((m.len(), m.order()), (4, 6));
        let m = st("10 1,10 1,2 2 2 2 2 1");
        assert_eq!(m.order(), 11);
        assert_eq!(m.partitions()[2], vec![2, 2, 2, 2, 2, 1]);
        assert_eq!(m.to_string(), "10 1,10 1,2 2 2 2 2 1");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(SpectralType::parse(""), Err(Error::Parse(_))));
        assert!(matches!(
            SpectralType::parse("21,1111"),
            Err(Error::OrderMismatch { index: 1, .. })
        ));
        assert!(matches!(SpectralType::parse("2x,11"), Err(Error::Parse(_))));
        assert!(matches!(SpectralType::parse("20,11"), Err(Error::Parse(_))));
        assert!(matches!(
            SpectralType::parse("11,,11"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn trimming_rules() {
        assert_eq!(st("111,111,21,3").len(), 3);
        assert_eq!(
            SpectralType::parse_untrimmed("111,111,21,3").unwrap().len(),
            4
        );
        // Length-one partitions survive at order one.
        assert_eq!(st("1,1,1").len(), 3);
    }

    #[test]
    fn canonicalize_examples() {
        let c = canonicalize(&SpectralType::parse_untrimmed("111,111,21,3").unwrap());
        assert_eq!(c.to_string(), "21,111,111");
        assert_eq!(c, canonicalize(&st("111,111,21")));
        assert_eq!(
            canonicalize(&st("1111,31,1111")).to_string(),
            "31,1111,1111"
        );
        let raw = AlignedTuple::parse("01,01,01").unwrap();
        let c = raw.canonical().unwrap();
        assert_eq!(c.to_string(), "1");
        assert_eq!(c.as_type(), &SpectralType::one());
    }

    #[test]
    fn idx_examples() {
        assert_eq!(idx(&st("11,11,11"), &st("11,11,11")), 2);
        assert_eq!(st("11,11,11,11,11").index_of_rigidity(), -2);
        assert_eq!(idx(&st("411,411,42,33"), &st("1,1,1,1")), 3);
        assert_eq!(idx(&SpectralType::one(), &SpectralType::one()), 2);
    }

    #[test]
    fn scale_add_examples() {
        let m = st("11,11,11").to_aligned();
        assert_eq!(scale_add(2, &m, 0, &m).unwrap().to_string(), "22,22,22");
        let a = AlignedTuple::parse("01,10,10").unwrap();
        let b = AlignedTuple::parse("10,01,01").unwrap();
        assert_eq!(a.index_of_rigidity(), 2);
        assert_eq!(b.index_of_rigidity(), 2);
        assert_eq!(scale_add(1, &a, 1, &b).unwrap().to_string(), "11,11,11");
        let other = st("211,22,31").to_aligned();
        assert_eq!(scale_add(1, &m, 0, &other).unwrap(), st("11,11,11"));
        assert!(matches!(
            scale_add(1, &m, 1, &other),
            Err(Error::Misaligned(_))
        ));
        assert!(scale_add(0, &m, 0, &m).is_err());
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd_of(&st("22,22,22")), 2);
        assert_eq!(gcd_of(&st("211,211,1111")), 1);
        assert_eq!(gcd_of(&SpectralType::one()), 1);
    }

    #[test]
    fn dominance_examples() {
        assert!(dominance_leq(&[2, 1, 1], &[3, 1]).unwrap());
        assert!(!dominance_leq(&[3, 1], &[2, 1, 1]).unwrap());
        assert!(dominance_leq(&[2, 2], &[2, 2]).unwrap());
        assert!(matches!(
            dominance_leq(&[2, 1], &[2, 2]),
            Err(Error::UnequalSums(3, 4))
        ));
    }

    #[test]
    fn json_rendering() {
        let m = st("21,111,111");
        assert_eq!(
            serde_json::to_string(&m).unwrap(),
            "[[2,1],[1,1,1],[1,1,1]]"
        );
        assert_eq!(
            serde_json::to_string(&SpectralType::one()).unwrap(),
            "[[1]]"
        );
        let back: SpectralType = serde_json::from_str("[[2,1],[1,1,1],[1,1,1]]").unwrap();
        assert_eq!(back, m);
    }
}

//! The root lattice of the star-shaped Kac–Moody diagram with central node
//! `α_0` and infinite legs `α_{j,1} ─ α_{j,2} ─ ⋯`.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{q, qi, Q};
use crate::spectype::{AlignedTuple, SpectralType};

/// A simple root: the central node or the node `ν ≥ 1` on leg `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleRoot {
    Zero,
    Leg { j: usize, nu: usize },
}

impl fmt::Display for SimpleRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleRoot::Zero => write!(f, "α0"),
            SimpleRoot::Leg { j, nu } => write!(f, "α{j},{nu}"),
        }
    }
}

/// Integer combination `a0·α_0 + Σ c_{j,ν} α_{j,ν}` kept with trailing zeros
/// trimmed, so equality is structural.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RootVector {
    a0: i64,
    legs: Vec<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootClass {
    RealPositive,
    RealNegative,
    ImaginaryPositive,
    ImaginaryNegative,
    NotARoot,
}

impl RootClass {
    pub fn is_root(self) -> bool {
        self != RootClass::NotARoot
    }

    pub fn is_real(self) -> bool {
        matches!(self, RootClass::RealPositive | RootClass::RealNegative)
    }

    pub fn is_imaginary(self) -> bool {
        matches!(
            self,
            RootClass::ImaginaryPositive | RootClass::ImaginaryNegative
        )
    }

    pub fn is_positive(self) -> bool {
        matches!(self, RootClass::RealPositive | RootClass::ImaginaryPositive)
    }

    fn negated(self) -> Self {
        match self {
            RootClass::RealPositive => RootClass::RealNegative,
            RootClass::RealNegative => RootClass::RealPositive,
            RootClass::ImaginaryPositive => RootClass::ImaginaryNegative,
            RootClass::ImaginaryNegative => RootClass::ImaginaryPositive,
            RootClass::NotARoot => RootClass::NotARoot,
        }
    }
}

impl fmt::Display for RootClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootClass::RealPositive => "positive real root",
            RootClass::RealNegative => "negative real root",
            RootClass::ImaginaryPositive => "positive imaginary root",
            RootClass::ImaginaryNegative => "negative imaginary root",
            RootClass::NotARoot => "not a root",
        })
    }
}

impl RootVector {
    pub fn new(a0: i64, legs: Vec<Vec<i64>>) -> Self {
        let mut v = Self { a0, legs };
        v.normalize();
        v
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn simple(i: SimpleRoot) -> Self {
        let mut v = Self::zero();
        v.set(i, 1);
        v
    }

    fn normalize(&mut self) {
        for leg in &mut self.legs {
            while leg.last() == Some(&0) {
                leg.pop();
            }
        }
        while self.legs.last().is_some_and(|l| l.is_empty()) {
            self.legs.pop();
        }
    }

    pub fn a0(&self) -> i64 {
        self.a0
    }

    pub fn legs(&self) -> &[Vec<i64>] {
        &self.legs
    }

    pub fn coeff(&self, i: SimpleRoot) -> i64 {
        match i {
            SimpleRoot::Zero => self.a0,
            SimpleRoot::Leg { j, nu } => self
                .legs
                .get(j)
                .and_then(|l| l.get(nu - 1))
                .copied()
                .unwrap_or(0),
        }
    }

    fn set(&mut self, i: SimpleRoot, c: i64) {
        match i {
            SimpleRoot::Zero => self.a0 = c,
            SimpleRoot::Leg { j, nu } => {
                if self.legs.len() <= j {
                    self.legs.resize(j + 1, Vec::new());
                }
                let leg = &mut self.legs[j];
                if leg.len() < nu {
                    leg.resize(nu, 0);
                }
                leg[nu - 1] = c;
            }
        }
        self.normalize();
    }

    pub fn is_zero(&self) -> bool {
        self.a0 == 0 && self.legs.is_empty()
    }

    fn coefficients(&self) -> impl Iterator<Item = i64> + '_ {
        std::iter::once(self.a0).chain(self.legs.iter().flatten().copied())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coefficients().all(|c| c >= 0)
    }

    pub fn height(&self) -> i64 {
        self.coefficients().sum()
    }

    /// Simple roots with nonzero coefficient.
    pub fn support(&self) -> Vec<SimpleRoot> {
        let mut s = Vec::new();
        if self.a0 != 0 {
            s.push(SimpleRoot::Zero);
        }
        for (j, leg) in self.legs.iter().enumerate() {
            for (i, &c) in leg.iter().enumerate() {
                if c != 0 {
                    s.push(SimpleRoot::Leg { j, nu: i + 1 });
                }
            }
        }
        s
    }

    /// Whether the support spans a connected subgraph of the star.
    pub fn support_connected(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        if self.a0 != 0 {
            // every leg must be supported on a prefix
            return self.legs.iter().all(|leg| {
                let t = leg.iter().take_while(|&&c| c != 0).count();
                leg[t..].iter().all(|&c| c == 0)
            });
        }
        let touched: Vec<&Vec<i64>> = self.legs.iter().filter(|l| !l.is_empty()).collect();
        if touched.len() != 1 {
            return false;
        }
        let leg = touched[0];
        let first = leg.iter().position(|&c| c != 0).unwrap();
        leg[first..].iter().all(|&c| c != 0)
    }

    pub fn scaled(&self, c: i64) -> Self {
        Self::new(
            self.a0 * c,
            self.legs
                .iter()
                .map(|l| l.iter().map(|&x| x * c).collect())
                .collect(),
        )
    }

    pub fn add_scaled(&self, c: i64, other: &RootVector) -> Self {
        let n = self.legs.len().max(other.legs.len());
        let mut legs = Vec::with_capacity(n);
        for j in 0..n {
            let (a, b) = (
                self.legs.get(j).map(Vec::as_slice).unwrap_or(&[]),
                other.legs.get(j).map(Vec::as_slice).unwrap_or(&[]),
            );
            let len = a.len().max(b.len());
            legs.push(
                (0..len)
                    .map(|i| a.get(i).copied().unwrap_or(0) + c * b.get(i).copied().unwrap_or(0))
                    .collect(),
            );
        }
        Self::new(self.a0 + c * other.a0, legs)
    }

    /// `(x | α_i)`.
    pub fn pair_simple(&self, i: SimpleRoot) -> i64 {
        match i {
            SimpleRoot::Zero => {
                2 * self.a0
                    - self
                        .legs
                        .iter()
                        .map(|l| l.first().copied().unwrap_or(0))
                        .sum::<i64>()
            }
            SimpleRoot::Leg { j, nu } => {
                let prev = if nu == 1 {
                    self.a0
                } else {
                    self.coeff(SimpleRoot::Leg { j, nu: nu - 1 })
                };
                let next = self.coeff(SimpleRoot::Leg { j, nu: nu + 1 });
                2 * self.coeff(i) - prev - next
            }
        }
    }

    /// Simple roots where `(x | α_i)` can be nonzero: the support and its
    /// neighbours.
    pub fn relevant_simple_roots(&self) -> Vec<SimpleRoot> {
        let mut out = vec![SimpleRoot::Zero];
        for (j, leg) in self.legs.iter().enumerate() {
            for nu in 1..=leg.len() + 1 {
                out.push(SimpleRoot::Leg { j, nu });
            }
        }
        out
    }

    /// `r_i(x) = x − (x|α_i) α_i`.
    pub fn reflect(&self, i: SimpleRoot) -> Self {
        let p = self.pair_simple(i);
        let mut v = self.clone();
        v.set(i, self.coeff(i) - p);
        v
    }

    /// Reads the tuple back from `α_m` (nonnegative entries allowed).
    pub fn to_tuple(&self) -> Result<AlignedTuple> {
        let n = self.a0;
        if n <= 0 {
            return Err(Error::NotATuple(format!("a0 = {n} is not positive")));
        }
        let mut rows = Vec::with_capacity(self.legs.len());
        for leg in &self.legs {
            let mut prev = n;
            let mut row = Vec::with_capacity(leg.len() + 1);
            for &c in leg.iter().chain(std::iter::once(&0)) {
                if c > prev || c < 0 {
                    return Err(Error::NotATuple(format!(
                        "coefficients along a leg must decrease from {n}"
                    )));
                }
                row.push((prev - c) as u32);
                prev = c;
            }
            rows.push(row);
        }
        AlignedTuple::new(rows).or_else(|_| Ok(AlignedTuple::trivial(n as u32)))
    }
}

impl fmt::Display for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        let mut term = |f: &mut fmt::Formatter<'_>, c: i64, name: String| -> fmt::Result {
            if c == 0 {
                return Ok(());
            }
            let sep = match (first, c < 0) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            first = false;
            let a = c.abs();
            if a == 1 {
                write!(f, "{sep}{name}")
            } else {
                write!(f, "{sep}{a}{name}")
            }
        };
        term(f, self.a0, SimpleRoot::Zero.to_string())?;
        for (j, leg) in self.legs.iter().enumerate() {
            for (i, &c) in leg.iter().enumerate() {
                term(f, c, SimpleRoot::Leg { j, nu: i + 1 }.to_string())?;
            }
        }
        Ok(())
    }
}

impl Serialize for RootVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: Vec<[i64; 3]> = self
            .legs
            .iter()
            .enumerate()
            .flat_map(|(j, leg)| {
                leg.iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(move |(i, &c)| [j as i64, i as i64 + 1, c])
            })
            .collect();
        let mut st = s.serialize_struct("RootVector", 2)?;
        st.serialize_field("a0", &self.a0)?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

/// `α_m = n α_0 + Σ (m_{j,ν+1} + m_{j,ν+2} + ⋯) α_{j,ν}`.
pub fn alpha_of(m: &SpectralType) -> RootVector {
    alpha_rows(m.partitions(), m.order())
}

pub fn alpha_aligned(m: &AlignedTuple) -> RootVector {
    alpha_rows(m.rows(), m.order())
}

fn alpha_rows(rows: &[Vec<u32>], order: u32) -> RootVector {
    let legs = rows
        .iter()
        .map(|p| {
            let mut tail: i64 = p.iter().map(|&x| x as i64).sum();
            p.iter()
                .take(p.len().saturating_sub(1))
                .map(|&x| {
                    tail -= x as i64;
                    tail
                })
                .collect()
        })
        .collect();
    RootVector::new(order as i64, legs)
}

/// The symmetric Cartan form.
pub fn inner(x: &RootVector, y: &RootVector) -> i64 {
    let mut s = 2 * x.a0 * y.a0;
    let n = x.legs.len().max(y.legs.len());
    let get = |v: &RootVector, j: usize, i: usize| -> i64 {
        v.legs.get(j).and_then(|l| l.get(i)).copied().unwrap_or(0)
    };
    for j in 0..n {
        let len = x
            .legs
            .get(j)
            .map_or(0, Vec::len)
            .max(y.legs.get(j).map_or(0, Vec::len));
        for i in 0..len {
            let (xi, yi) = (get(x, j, i), get(y, j, i));
            s += 2 * xi * yi;
            let (xp, yp) = if i == 0 {
                (x.a0, y.a0)
            } else {
                (get(x, j, i - 1), get(y, j, i - 1))
            };
            s -= xi * yp + xp * yi;
        }
    }
    s
}

/// Decides whether `x` is a real root, an imaginary root or neither.
///
/// Positive candidates are pushed down by simple reflections that decrease
/// the height. A vector that leaves the positive cone on the way is a root
/// only if it was the simple root itself; one that gets stuck with
/// `(x|α_i) ≤ 0` for every `i` is an imaginary root iff its support is
/// connected.
pub fn classify_root(x: &RootVector) -> RootClass {
    if x.is_zero() {
        return RootClass::NotARoot;
    }
    if x.is_nonnegative() {
        classify_positive(x.clone())
    } else if x.scaled(-1).is_nonnegative() {
        classify_positive(x.scaled(-1)).negated()
    } else {
        RootClass::NotARoot
    }
}

fn classify_positive(mut x: RootVector) -> RootClass {
    let cap = 10 * x.height().max(1);
    for _ in 0..cap {
        if !x.support_connected() {
            return RootClass::NotARoot;
        }
        let step = x.support().into_iter().find(|&i| x.pair_simple(i) > 0);
        let Some(i) = step else {
            return RootClass::ImaginaryPositive;
        };
        let next = x.reflect(i);
        if !next.is_nonnegative() || next.is_zero() {
            return if x == RootVector::simple(i) {
                RootClass::RealPositive
            } else {
                RootClass::NotARoot
            };
        }
        x = next;
    }
    RootClass::NotARoot
}

pub fn is_positive_root(x: &RootVector) -> bool {
    classify_root(x).is_positive()
}

/// `a − (a|b) b` for a real root `b`.
pub fn reflect_by(a: &RootVector, b: &RootVector) -> Result<RootVector> {
    let bb = inner(b, b);
    if bb != 2 {
        return Err(Error::NotRealNormalized(bb));
    }
    Ok(a.add_scaled(-inner(a, b), b))
}

/// Inverse of [`alpha_of`].
pub fn tuple_of(a: &RootVector) -> Result<SpectralType> {
    let t = a.to_tuple()?;
    if t.is_empty() {
        return Ok(SpectralType::from_raw_unchecked(Vec::new(), t.order()));
    }
    t.to_spectral()
}

/// `(α_0(ℓ) | α_0(ℓ)) = 1 − k + Σ_j 1/(ℓ_j + 1)` for `k + 1` entries.
pub fn norm_alpha0(ells: &[u32]) -> Result<Q> {
    if ells.is_empty() {
        return Err(Error::Precondition("empty ℓ".into()));
    }
    if ells.contains(&0) {
        return Err(Error::Precondition("ℓ entries must be at least 1".into()));
    }
    let k = ells.len() as i64 - 1;
    let mut s = qi(1 - k);
    for &l in ells {
        s += q(1, l as i64 + 1);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> SpectralType {
        SpectralType::parse(s).unwrap()
    }

    #[test]
    fn alpha_of_simple_types() {
        let a = alpha_of(&st("11,11,11"));
        assert_eq!(a, RootVector::new(2, vec![vec![1], vec![1], vec![1]]));
        assert_eq!(inner(&a, &a), 2);
        let a = alpha_of(&st("21,111,111"));
        assert_eq!(a, RootVector::new(3, vec![vec![1], vec![2, 1], vec![2, 1]]));
        assert_eq!(a.to_string(), "3α0 + α0,1 + 2α1,1 + α1,2 + 2α2,1 + α2,2");
    }

    #[test]
    fn pairing_matches_form() {
        let a = alpha_of(&st("411,411,42,33"));
        for i in a.relevant_simple_roots() {
            assert_eq!(a.pair_simple(i), inner(&a, &RootVector::simple(i)));
        }
        assert_eq!(a.pair_simple(SimpleRoot::Zero), 3);
    }

    #[test]
    fn reflection_round_trip() {
        let a = alpha_of(&st("211,211,1111"));
        let b = a.reflect(SimpleRoot::Zero);
        assert_eq!(b.reflect(SimpleRoot::Zero), a);
        assert_eq!(inner(&a, &a), inner(&b, &b));
        assert_eq!(b.to_tuple().unwrap().to_string(), "111,111,0111");
        assert_eq!(
            b.to_tuple().unwrap().canonical().unwrap().to_string(),
            "111,111,111"
        );
    }

    #[test]
    fn classification() {
        assert_eq!(
            classify_root(&alpha_of(&st("11,11,11"))),
            RootClass::RealPositive
        );
        assert_eq!(
            classify_root(&alpha_of(&st("21,111,111"))),
            RootClass::RealPositive
        );
        assert_eq!(
            classify_root(&alpha_of(&st("11,11,11,11"))),
            RootClass::ImaginaryPositive
        );
        assert_eq!(
            classify_root(&alpha_of(&st("22,22,1111"))),
            RootClass::NotARoot
        );
        assert_eq!(
            classify_root(&alpha_of(&st("22,22,22"))),
            RootClass::NotARoot
        );
        assert_eq!(
            classify_root(&alpha_of(&st("22,22,22,22"))),
            RootClass::ImaginaryPositive
        );
        assert_eq!(
            classify_root(&RootVector::simple(SimpleRoot::Zero)),
            RootClass::RealPositive
        );
        assert_eq!(
            classify_root(&RootVector::simple(SimpleRoot::Zero).scaled(2)),
            RootClass::NotARoot
        );
        assert_eq!(
            classify_root(&RootVector::simple(SimpleRoot::Leg { j: 3, nu: 2 }).scaled(-1)),
            RootClass::RealNegative
        );
        assert_eq!(
            classify_root(&RootVector::new(1, vec![vec![-1]])),
            RootClass::NotARoot
        );
    }

    #[test]
    fn dictionary_examples() {
        let a = RootVector::new(2, vec![vec![1], vec![1], vec![1]]);
        assert_eq!(tuple_of(&a).unwrap(), st("11,11,11"));
        assert_eq!(
            tuple_of(&RootVector::simple(SimpleRoot::Zero)).unwrap(),
            SpectralType::one()
        );
        assert!(tuple_of(&RootVector::new(1, vec![vec![2]])).is_err());
        assert_eq!(
            inner(
                &alpha_of(&st("211,1111,1111")),
                &alpha_of(&st("211,1111,1111"))
            ),
            -2
        );
        let a0 = RootVector::simple(SimpleRoot::Zero);
        let b = RootVector::simple(SimpleRoot::Leg { j: 3, nu: 1 });
        assert_eq!(inner(&a0, &a0), 2);
        assert_eq!(inner(&a0, &b), -1);
    }

    #[test]
    fn reflection_examples() {
        let a = alpha_of(&st("111,111,111"));
        assert_eq!(a.reflect(SimpleRoot::Zero), a);
        let a = alpha_of(&st("11,11,11"));
        assert_eq!(
            a.reflect(SimpleRoot::Zero),
            RootVector::new(1, vec![vec![1], vec![1], vec![1]])
        );
        let raw = AlignedTuple::parse("01,01,01").unwrap();
        assert_eq!(a.reflect(SimpleRoot::Zero), alpha_aligned(&raw));
        assert_eq!(reflect_by(&a, &a0()).unwrap(), a.reflect(SimpleRoot::Zero));
        assert!(reflect_by(&a, &a0().scaled(2)).is_err());
    }

    fn a0() -> RootVector {
        RootVector::simple(SimpleRoot::Zero)
    }

    #[test]
    fn norm_alpha0_examples() {
        assert_eq!(norm_alpha0(&[1, 1, 1, 1]).unwrap(), qi(0));
        assert_eq!(norm_alpha0(&[2, 2, 2]).unwrap(), qi(0));
        assert_eq!(norm_alpha0(&[3, 3, 1]).unwrap(), qi(0));
        assert_eq!(norm_alpha0(&[5, 2, 1]).unwrap(), qi(0));
        assert!(norm_alpha0(&[4, 2, 1]).unwrap() > qi(0));
    }

    #[test]
    fn support_connectivity() {
        assert!(RootVector::new(0, vec![vec![], vec![0, 1, 1]]).support_connected());
        assert!(!RootVector::new(0, vec![vec![1], vec![1]]).support_connected());
        assert!(!RootVector::new(1, vec![vec![0, 1]]).support_connected());
        assert!(RootVector::new(1, vec![vec![1, 1], vec![1]]).support_connected());
    }

    #[test]
    fn json_shape() {
        let a = alpha_of(&st("21,111,111"));
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            r#"{"a0":3,"coeffs":[[0,1,1],[1,1,2],[1,2,1],[2,1,2],[2,2,1]]}"#
        );
    }
}

//! Affine linear forms over the rationals in named parameters.
//!
//! Eigenvalues `λ_{j,ν}`, shift parameters and Fuchs values are all carried
//! symbolically as [`ParamForm`]s and only instantiated when a numeric or
//! matrix computation needs them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, to_f64, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ParamForm {
    coeffs: BTreeMap<String, Q>,
    constant: Q,
}

/// Canonical parameter name of the eigenvalue `λ_{j,ν}` (ν is 1-based).
pub fn eigen_name(j: usize, nu: usize) -> String {
    format!("l{j}_{nu}")
}

impl ParamForm {
    pub fn constant(c: Q) -> Self {
        Self {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Q::from_integer(c.into()))
    }

    pub fn var(name: impl Into<String>) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.into(), Q::one());
        Self {
            coeffs,
            constant: Q::zero(),
        }
    }

    /// The eigenvalue variable `λ_{j,ν}`.
    pub fn eigen(j: usize, nu: usize) -> Self {
        Self::var(eigen_name(j, nu))
    }

    pub fn constant_term(&self) -> &Q {
        &self.constant
    }

    pub fn coeff(&self, name: &str) -> Q {
        self.coeffs.get(name).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&str, &Q)> {
        self.coeffs.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn as_constant(&self) -> Option<&Q> {
        self.is_constant().then_some(&self.constant)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::default();
        }
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
            constant: &self.constant * c,
        }
    }

    fn add_scaled(&mut self, other: &ParamForm, c: &Q) {
        for (k, v) in &other.coeffs {
            let entry = self.coeffs.entry(k.clone()).or_insert_with(Q::zero);
            *entry += v * c;
            if entry.is_zero() {
                self.coeffs.remove(k);
            }
        }
        self.constant += &other.constant * c;
    }

    /// Replaces each parameter found in `subst` by its form.
    pub fn substitute(&self, subst: &BTreeMap<String, ParamForm>) -> ParamForm {
        let mut out = ParamForm::constant(self.constant.clone());
        for (k, v) in &self.coeffs {
            match subst.get(k) {
                Some(f) => out.add_scaled(f, v),
                None => out.add_scaled(&ParamForm::var(k.clone()), v),
            }
        }
        out
    }

    /// Evaluates exactly; every parameter must be assigned.
    pub fn eval(&self, assignment: &BTreeMap<String, Q>) -> Result<Q> {
        let mut acc = self.constant.clone();
        for (k, v) in &self.coeffs {
            let x = assignment
                .get(k)
                .ok_or_else(|| Error::Precondition(format!("parameter {k} is unassigned")))?;
            acc += v * x;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, assignment: &BTreeMap<String, f64>) -> Result<f64> {
        let mut acc = to_f64(&self.constant);
        for (k, v) in &self.coeffs {
            let x = assignment
                .get(k)
                .ok_or_else(|| Error::Precondition(format!("parameter {k} is unassigned")))?;
            acc += to_f64(v) * x;
        }
        Ok(acc)
    }

    /// Solves `self = 0` for `name` (which must occur) and returns its value form.
    pub fn solve_for(&self, name: &str) -> Option<ParamForm> {
        let c = self.coeffs.get(name)?.clone();
        let mut rest = self.clone();
        rest.coeffs.remove(name);
        Some(rest.scale(&(-Q::one() / c)))
    }

    /// LaTeX rendering; eigenvalue names `lJ_N` become `\lambda_{J,N}`.
    pub fn to_latex(&self) -> String {
        self.render(|name| {
            if let Some((j, nu)) = parse_eigen_name(name) {
                format!("\\lambda_{{{j},{nu}}}")
            } else {
                let mut chars = name.chars();
                match chars.next() {
                    Some(first) if name.len() > 1 && chars.all(|c| c.is_ascii_digit()) => {
                        format!("{first}_{{{}}}", &name[1..])
                    }
                    _ => name.to_string(),
                }
            }
        })
    }

    fn render(&self, name: impl Fn(&str) -> String) -> String {
        let mut out = String::new();
        for (k, v) in &self.coeffs {
            let neg = v.is_negative();
            let mag = v.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                out.push_str(&fmt_q(&mag));
                out.push('*');
            }
            out.push_str(&name(k));
        }
        if !self.constant.is_zero() || out.is_empty() {
            let neg = self.constant.is_negative();
            if out.is_empty() {
                out.push_str(&fmt_q(&self.constant));
            } else {
                out.push_str(if neg { " - " } else { " + " });
                out.push_str(&fmt_q(&self.constant.abs()));
            }
        }
        out
    }
}

fn parse_eigen_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix('l')?;
    let (j, nu) = rest.split_once('_')?;
    Some((j.parse().ok()?, nu.parse().ok()?))
}

impl fmt::Display for ParamForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|s| s.to_string()))
    }
}

impl Serialize for ParamForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl std::str::FromStr for ParamForm {
    type Err = Error;

    /// Parses sums of terms `c`, `name`, `c*name` (c rational), e.g. `l0_2 - 1/2*a + 1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = ParamForm::default();
        let cleaned = s.replace(' ', "");
        if cleaned.is_empty() {
            return Err(Error::Parse("empty linear form".into()));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.is_empty() {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && cur.is_empty() {
                neg ^= ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(Error::Parse(format!("dangling sign in {s:?}")));
        }
        terms.push((neg, cur));
        for (neg, term) in terms {
            let sign = if neg { -Q::one() } else { Q::one() };
            let (coef, name) = match term.split_once('*') {
                Some((c, n)) => (parse_q(c)?, Some(n.to_string())),
                None if term.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') => {
                    (Q::one(), Some(term))
                }
                None => (parse_q(&term)?, None),
            };
            match name {
                Some(n) => {
                    if !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                        return Err(Error::Parse(format!("bad parameter name {n:?}")));
                    }
                    out.add_scaled(&ParamForm::var(n), &(coef * sign));
                }
                None => out.constant += coef * sign,
            }
        }
        Ok(out)
    }
}

impl Add for &ParamForm {
    type Output = ParamForm;
    fn add(self, rhs: &ParamForm) -> ParamForm {
        let mut out = self.clone();
        out.add_scaled(rhs, &Q::one());
        out
    }
}

impl Add for ParamForm {
    type Output = ParamForm;
    fn add(self, rhs: ParamForm) -> ParamForm {
        &self + &rhs
    }
}

impl Sub for &ParamForm {
    type Output = ParamForm;
    fn sub(self, rhs: &ParamForm) -> ParamForm {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Q::one());
        out
    }
}

impl Sub for ParamForm {
    type Output = ParamForm;
    fn sub(self, rhs: ParamForm) -> ParamForm {
        &self - &rhs
    }
}

impl Neg for &ParamForm {
    type Output = ParamForm;
    fn neg(self) -> ParamForm {
        self.scale(&-Q::one())
    }
}

impl Neg for ParamForm {
    type Output = ParamForm;
    fn neg(self) -> ParamForm {
        -&self
    }
}

impl Mul<&Q> for &ParamForm {
    type Output = ParamForm;
    fn mul(self, rhs: &Q) -> ParamForm {
        self.scale(rhs)
    }
}

impl Add<&Q> for &ParamForm {
    type Output = ParamForm;
    fn add(self, rhs: &Q) -> ParamForm {
        let mut out = self.clone();
        out.constant += rhs;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn arithmetic_and_display() {
        let a = ParamForm::eigen(0, 2);
        let b = ParamForm::eigen(0, 1);
        let f = &(&a - &b) + &qi(1);
        assert_eq!(f.to_string(), "-l0_1 + l0_2 + 1");
        assert_eq!(f.to_latex(), "-\\lambda_{0,1} + \\lambda_{0,2} + 1");
        assert!((&f - &f).is_zero());
        assert_eq!(ParamForm::default().to_string(), "0");
    }

    #[test]
    fn parse_roundtrip() {
        let f: ParamForm = "l0_2 - 1/2*a + 3 - l0_2 + b".parse().unwrap();
        assert_eq!(f.coeff("a"), q(-1, 2));
        assert_eq!(f.coeff("l0_2"), qi(0));
        assert_eq!(f.to_string().parse::<ParamForm>().unwrap(), f);
        assert!("1/0*a".parse::<ParamForm>().is_err());
    }

    #[test]
    fn substitution_and_solve() {
        let f: ParamForm = "a + 2*b - 1".parse().unwrap();
        let mut sub = BTreeMap::new();
        sub.insert("b".to_string(), "c + 1/2".parse().unwrap());
        assert_eq!(f.substitute(&sub), "a + 2*c".parse().unwrap());
        let a = f.solve_for("a").unwrap();
        assert_eq!(a, "-2*b + 1".parse().unwrap());
    }
}

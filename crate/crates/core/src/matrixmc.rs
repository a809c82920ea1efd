//! Middle convolution on tuples of rational matrices, spectral data and
//! centralizer dimensions.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::katz::{max_positions, random_generic_scheme, reduce, Scheme, Verdict};
use crate::linalg::RationalMatrix;
use crate::rational::{fmt_q, Q};
use crate::spectype::{Partition, SpectralType};

/// Largest size accepted by the centralizer computations.
pub const CENTRALIZER_BOUND: usize = 16;

/// `(A_0, …, A_k)` of equal-size square matrices summing to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixTuple {
    matrices: Vec<RationalMatrix>,
}

impl MatrixTuple {
    pub fn new(matrices: Vec<RationalMatrix>) -> Result<Self> {
        if matrices.len() < 2 {
            return Err(Error::Dimension("a tuple needs at least two matrices".into()));
        }
        let n = matrices[0].rows();
        if matrices.iter().any(|a| a.rows() != n || a.cols() != n) {
            return Err(Error::Dimension("matrices must be square of equal size".into()));
        }
        let t = Self { matrices };
        if !t.sum().is_zero() {
            return Err(Error::Precondition("matrices do not sum to zero".into()));
        }
        Ok(t)
    }

    /// Takes `A_1, …, A_k` and sets `A_0 = −ΣA_j`.
    pub fn from_residues(rest: Vec<RationalMatrix>) -> Result<Self> {
        let n = rest.first().map_or(0, RationalMatrix::rows);
        let a0 = rest
            .iter()
            .fold(RationalMatrix::zeros(n, n), |s, a| &s - a);
        let mut m = vec![a0];
        m.extend(rest);
        Self::new(m)
    }

    /// Order-one tuple of scalars.
    pub fn scalars(values: &[Q]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|v| RationalMatrix::scalar(1, v.clone()))
                .collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.matrices[0].rows()
    }

    /// Number of matrices minus one.
    pub fn k(&self) -> usize {
        self.matrices.len() - 1
    }

    pub fn matrices(&self) -> &[RationalMatrix] {
        &self.matrices
    }

    pub fn get(&self, j: usize) -> &RationalMatrix {
        &self.matrices[j]
    }

    fn sum(&self) -> RationalMatrix {
        let n = self.size();
        self.matrices
            .iter()
            .fold(RationalMatrix::zeros(n, n), |s, a| &s + a)
    }

    /// `g A_j g⁻¹` for every `j`.
    pub fn conjugate(&self, g: &RationalMatrix) -> Result<Self> {
        let gi = g.inverse()?;
        Ok(Self {
            matrices: self.matrices.iter().map(|a| &(g * a) * &gi).collect(),
        })
    }
}

impl Serialize for MatrixTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrices.serialize(s)
    }
}

impl fmt::Display for MatrixTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, a) in self.matrices.iter().enumerate() {
            writeln!(f, "A_{j} =")?;
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Block bidiagonal `L(m; λ)`: `λ_i I_{m_i}` on the diagonal and
/// `I_{m_i, m_{i+1}}` above it. Non-monotone `m` is sorted first,
/// carrying the eigenvalues along.
pub fn build_l(m: &[u32], lambda: &[Q]) -> Result<RationalMatrix> {
    if m.len() != lambda.len() {
        return Err(Error::Dimension(format!(
            "{} parts but {} eigenvalues",
            m.len(),
            lambda.len()
        )));
    }
    if m.contains(&0) {
        return Err(Error::Parse("parts of L(m; λ) must be positive".into()));
    }
    let mut slots: Vec<(u32, &Q)> = m.iter().copied().zip(lambda).collect();
    slots.sort_by_key(|s| std::cmp::Reverse(s.0));
    let n: usize = m.iter().map(|&x| x as usize).sum();
    let mut a = RationalMatrix::zeros(n, n);
    let mut off = 0;
    for (i, (mi, l)) in slots.iter().enumerate() {
        let mi = *mi as usize;
        for r in 0..mi {
            a[(off + r, off + r)] = (*l).clone();
        }
        if let Some((next, _)) = slots.get(i + 1) {
            for r in 0..*next as usize {
                a[(off + r, off + mi + r)] = Q::one();
            }
        }
        off += mi;
    }
    Ok(a)
}

/// Jordan cell `J(k, μ) = L(1^k; μ)`.
pub fn jordan(k: usize, mu: &Q) -> RationalMatrix {
    build_l(&vec![1; k], &vec![mu.clone(); k]).expect("valid Jordan data")
}

/// Partition of `A` at `μ`: `m_k = rank(A−μ)^{k−1} − rank(A−μ)^k`.
pub fn partition_at(a: &RationalMatrix, mu: &Q) -> Partition {
    let n = a.rows();
    let b = a.shift(&-mu.clone());
    let mut out = Vec::new();
    let mut prev = n;
    let mut p = RationalMatrix::identity(n);
    loop {
        p = &p * &b;
        let r = p.rank();
        if r == prev {
            break;
        }
        out.push((prev - r) as u32);
        prev = r;
    }
    out
}

/// Eigenvalues of one matrix, ascending, each with its partition.
pub type Eigenspectrum = Vec<(Q, Partition)>;

/// Spectral data of a single matrix; errors when the spectrum is not rational.
pub fn spectral_data_of(a: &RationalMatrix) -> Result<Eigenspectrum> {
    a.rational_eigenvalues()?
        .into_iter()
        .map(|(mu, _)| {
            let p = partition_at(a, &mu);
            Ok((mu, p))
        })
        .collect()
}

/// Spectral data of every matrix in a tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralData {
    matrices: Vec<Eigenspectrum>,
}

impl SpectralData {
    pub fn of(t: &MatrixTuple) -> Result<Self> {
        Ok(Self {
            matrices: t
                .matrices()
                .iter()
                .map(spectral_data_of)
                .collect::<Result<_>>()?,
        })
    }

    /// Data of `L(m_j; λ_j)` for a scheme with constant eigenvalues:
    /// slots sharing an eigenvalue merge into one partition.
    pub fn from_scheme(s: &Scheme) -> Result<Self> {
        let vals = s.constant_eigenvalues()?;
        let matrices = s
            .shape()
            .partitions()
            .iter()
            .zip(&vals)
            .map(|(p, e)| group_slots(p.iter().copied().zip(e.iter().cloned())))
            .collect();
        Ok(Self { matrices })
    }

    pub fn matrices(&self) -> &[Eigenspectrum] {
        &self.matrices
    }

    pub fn order(&self) -> u32 {
        self.matrices
            .first()
            .map_or(0, |m| m.iter().flat_map(|(_, p)| p).sum())
    }

    /// Untrimmed shape and eigenvalues, one slot per part.
    pub fn to_scheme(&self) -> Result<Scheme> {
        let mut parts = Vec::new();
        let mut vals = Vec::new();
        for m in &self.matrices {
            let (p, v): (Vec<u32>, Vec<Q>) = m
                .iter()
                .flat_map(|(mu, p)| p.iter().map(move |&x| (x, mu.clone())))
                .unzip();
            parts.push(p);
            vals.push(v);
        }
        Scheme::from_constants(SpectralType::untrimmed(parts)?, vals)
    }

    /// Spectral type with one partition per matrix.
    pub fn spectral_type(&self) -> Result<SpectralType> {
        Ok(self.to_scheme()?.shape().clone())
    }
}

fn group_slots(slots: impl IntoIterator<Item = (u32, Q)>) -> Eigenspectrum {
    let mut g: BTreeMap<Q, Partition> = BTreeMap::new();
    for (m, l) in slots {
        if m > 0 {
            g.entry(l).or_default().push(m);
        }
    }
    g.into_iter()
        .map(|(l, mut p)| {
            p.sort_unstable_by(|a, b| b.cmp(a));
            (l, p)
        })
        .collect()
}

impl Serialize for SpectralData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            eigenvalue: String,
            partition: &'a Partition,
        }
        let mut seq = s.serialize_seq(Some(self.matrices.len()))?;
        for m in &self.matrices {
            let row: Vec<Entry> = m
                .iter()
                .map(|(l, p)| Entry {
                    eigenvalue: fmt_q(l),
                    partition: p,
                })
                .collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl fmt::Display for SpectralData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, m) in self.matrices.iter().enumerate() {
            let cells: Vec<String> = m
                .iter()
                .map(|(l, p)| {
                    let ps: Vec<String> = p.iter().map(u32::to_string).collect();
                    format!("{}^({})", fmt_q(l), ps.join(","))
                })
                .collect();
            writeln!(f, "A_{j}: {}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Spectral data of `mc_μ(A)` predicted from that of `A`, valid when
/// `|μ| ≠ 0` and the eigenvalues are generic.
pub fn predict_mc(data: &SpectralData, mu: &[Q]) -> Result<SpectralData> {
    let k1 = data.matrices.len();
    if mu.len() != k1 {
        return Err(Error::Dimension(format!("{} parameters for {k1} matrices", mu.len())));
    }
    let n = i64::from(data.order());
    let total: Q = mu.iter().sum();
    let ell_part = |j: usize| -> i64 {
        data.matrices[j]
            .iter()
            .find(|(l, _)| *l == mu[j])
            .map_or(0, |(_, p)| i64::from(p[0]))
    };
    let d: i64 = (0..k1).map(ell_part).sum::<i64>() - (k1 as i64 - 2) * n;
    let two = Q::from_integer(2.into());
    let matrices = data
        .matrices
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let shift = &total - &two * &mu[j];
            let mut slots: Vec<(u32, Q)> = Vec::new();
            let mut ell_mult = -d;
            for (l, p) in m {
                for (i, &x) in p.iter().enumerate() {
                    if *l == mu[j] && i == 0 {
                        ell_mult += i64::from(x);
                    } else {
                        slots.push((x, l + &shift));
                    }
                }
            }
            if ell_mult < 0 {
                return Err(Error::Degenerate(format!(
                    "negative multiplicity at matrix {j}"
                )));
            }
            slots.push((ell_mult as u32, -mu[j].clone()));
            Ok(group_slots(slots))
        })
        .collect::<Result<_>>()?;
    Ok(SpectralData { matrices })
}

fn commutator_operator(a: &RationalMatrix) -> RationalMatrix {
    let n = a.rows();
    let id = RationalMatrix::identity(n);
    &id.kron(a) - &a.transpose().kron(&id)
}

fn check_bound(n: usize, bound: usize) -> Result<()> {
    if n > bound {
        return Err(Error::BoundExceeded(format!(
            "size {n} exceeds the centralizer bound {bound}"
        )));
    }
    Ok(())
}

/// `dim {X : AX = XA}`.
pub fn centralizer_dim(a: &RationalMatrix) -> Result<usize> {
    centralizer_dim_bounded(a, CENTRALIZER_BOUND)
}

pub fn centralizer_dim_bounded(a: &RationalMatrix, bound: usize) -> Result<usize> {
    check_bound(a.rows(), bound)?;
    let n = a.rows();
    Ok(n * n - commutator_operator(a).rank())
}

/// Large primes for modular rank shortcuts.
const PRIMES: [u64; 2] = [2_305_843_009_213_693_951, 4_611_686_018_427_387_847];

/// Dimension of the joint centralizer of a tuple.
pub fn joint_centralizer_dim(t: &MatrixTuple) -> Result<usize> {
    let n = t.size();
    check_bound(n, CENTRALIZER_BOUND)?;
    let mut stacked = RationalMatrix::zeros(0, n * n);
    // A_0 is determined by the others.
    for a in &t.matrices()[1..] {
        stacked = stacked.vstack(&commutator_operator(a))?;
    }
    // The modular rank bounds the true rank from below and scalars always
    // commute, so a modular nullity of one is exact.
    for p in PRIMES {
        if stacked.rank_mod_p(p) == Some(n * n - 1) {
            return Ok(1);
        }
    }
    Ok(n * n - stacked.rank())
}

/// `dim Z(A)` from the eigenvalue partitions, falling back to the
/// commutator operator when the spectrum is not rational.
fn centralizer_dim_spectral(a: &RationalMatrix) -> Result<usize> {
    match spectral_data_of(a) {
        Ok(spec) => Ok(spec
            .iter()
            .flat_map(|(_, m)| m.iter())
            .map(|&x| (x * x) as usize)
            .sum()),
        Err(Error::IrrationalEigenvalue) => centralizer_dim(a),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitDims {
    pub n: usize,
    pub k: usize,
    /// `dim Z(A)` of the joint centralizer.
    pub dim_z: usize,
    /// `dim Z(A_j)` for each matrix.
    pub dim_z_each: Vec<usize>,
    pub idx: i64,
    pub pidx: i64,
    pub dim_orbit: i64,
    pub dim_orbit_tilde: i64,
}

pub fn orbit_dims(t: &MatrixTuple) -> Result<OrbitDims> {
    let n = t.size();
    let k = t.k();
    let dim_z = joint_centralizer_dim(t)?;
    let dim_z_each: Vec<usize> = t
        .matrices()
        .iter()
        .map(centralizer_dim_spectral)
        .collect::<Result<_>>()?;
    let n2 = (n * n) as i64;
    let sum_z: i64 = dim_z_each.iter().map(|&x| x as i64).sum();
    let idx = sum_z - (k as i64 - 1) * n2;
    if idx % 2 != 0 {
        return Err(Error::Degenerate(format!("odd index of rigidity {idx}")));
    }
    let pidx = dim_z as i64 - idx / 2;
    if pidx < 0 {
        return Err(Error::Degenerate(format!("negative Pidx {pidx}")));
    }
    Ok(OrbitDims {
        n,
        k,
        dim_z,
        dim_z_each,
        idx,
        pidx,
        dim_orbit: n2 - dim_z as i64,
        dim_orbit_tilde: k as i64 * n2 + dim_z as i64 - sum_z,
    })
}

/// `(A_0 − Σμ′, A_1 + μ′_1, …, A_k + μ′_k)`.
pub fn addition(t: &MatrixTuple, mu: &[Q]) -> Result<MatrixTuple> {
    if mu.len() != t.k() {
        return Err(Error::Dimension(format!("{} shifts for k = {}", mu.len(), t.k())));
    }
    let total: Q = mu.iter().sum();
    let mut m = vec![t.get(0).shift(&-total)];
    m.extend(t.matrices()[1..].iter().zip(mu).map(|(a, x)| a.shift(x)));
    Ok(MatrixTuple { matrices: m })
}

/// `(G_0, …, G_k)` of size `kn`: block row `j` of `G_j` is
/// `(A_1, …, A_j + λ, …, A_k)`.
pub fn convolution(t: &MatrixTuple, lambda: &Q) -> MatrixTuple {
    let n = t.size();
    let k = t.k();
    let mut gs = Vec::with_capacity(k + 1);
    let mut g0 = RationalMatrix::zeros(k * n, k * n);
    for j in 1..=k {
        let mut g = RationalMatrix::zeros(k * n, k * n);
        for q in 1..=k {
            let b = if q == j {
                t.get(q).shift(lambda)
            } else {
                t.get(q).clone()
            };
            g.set_block((j - 1) * n, (q - 1) * n, &b);
        }
        g0 = &g0 - &g;
        gs.push(g);
    }
    gs.insert(0, g0);
    MatrixTuple { matrices: gs }
}

/// Action of the convolution on `ℂ^{kn}/(𝒦 + ℒ)`.
pub fn mc_lambda(t: &MatrixTuple, lambda: &Q) -> Result<MatrixTuple> {
    let n = t.size();
    let k = t.k();
    let g = convolution(t, lambda);
    let dim = k * n;
    let mut span: Vec<Vec<Q>> = Vec::new();
    for j in 1..=k {
        for v in t.get(j).nullspace() {
            let mut w = vec![Q::zero(); dim];
            w[(j - 1) * n..j * n].clone_from_slice(&v);
            span.push(w);
        }
    }
    span.extend(g.get(0).nullspace());
    let (r, pivots) = if span.is_empty() {
        (RationalMatrix::zeros(0, dim), Vec::new())
    } else {
        RationalMatrix::from_rows(span)?.rref()
    };
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    // Coordinates of v modulo the row space of r, read off the free columns.
    let project = |v: &[Q]| -> Vec<Q> {
        free.iter()
            .map(|&c| {
                pivots
                    .iter()
                    .enumerate()
                    .fold(v[c].clone(), |s, (i, &p)| s - &v[p] * &r[(i, c)])
            })
            .collect()
    };
    let nn = free.len();
    let matrices = g
        .matrices()
        .iter()
        .map(|gj| {
            let cols: Vec<Vec<Q>> = free.iter().map(|&c| project(&gj.column(c))).collect();
            RationalMatrix::from_columns(nn, &cols)
        })
        .collect();
    Ok(MatrixTuple { matrices })
}

fn mc_raw(t: &MatrixTuple, mu: &[Q]) -> Result<MatrixTuple> {
    if mu.len() != t.k() + 1 {
        return Err(Error::Dimension(format!(
            "{} parameters for {} matrices",
            mu.len(),
            t.k() + 1
        )));
    }
    let neg: Vec<Q> = mu[1..].iter().map(|x| -x.clone()).collect();
    let total: Q = mu.iter().sum();
    let shifted = addition(t, &neg)?;
    let c = mc_lambda(&shifted, &total)?;
    addition(&c, &neg)
}

/// `mc_μ = M_{−μ′} ∘ mc_{|μ|} ∘ M_{−μ′}` with `μ = (μ_0, …, μ_k)`, after
/// checking the kernel and image conditions.
pub fn middle_convolution(t: &MatrixTuple, mu: &[Q]) -> Result<MatrixTuple> {
    let report = check_mc_assumptions(t, mu)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::McAssumption(v.to_string()));
    }
    mc_raw(t, mu)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum McCondition {
    /// `∩_{j≠i} ker(A_j − μ_j) ∩ ker(A_0 − τ) = 0`.
    KernelIntersection,
    /// `Σ_{j≠i} Im(A_j − μ_j) + Im(A_0 − τ) = ℂⁿ`.
    ImageSum,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct McViolation {
    pub condition: McCondition,
    pub i: usize,
    #[serde(serialize_with = "ser_q")]
    pub tau: Q,
}

fn ser_q<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

impl fmt::Display for McViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.condition {
            McCondition::KernelIntersection => "kernel intersection is nonzero",
            McCondition::ImageSum => "image sum is not the whole space",
        };
        write!(f, "{what} for i = {}, τ = {}", self.i, fmt_q(&self.tau))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct McAssumptionReport {
    /// Rational eigenvalues of `A_0` that were tested.
    #[serde(serialize_with = "ser_qs")]
    pub taus: Vec<Q>,
    pub violations: Vec<McViolation>,
}

fn ser_qs<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<String> = xs.iter().map(fmt_q).collect();
    v.serialize(s)
}

impl McAssumptionReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tests both conditions for every `i` and every rational eigenvalue `τ`
/// of `A_0`. Other `τ` are skipped since then `ker(A_0 − τ) = 0` and
/// `Im(A_0 − τ) = ℂⁿ`.
pub fn check_mc_assumptions(t: &MatrixTuple, mu: &[Q]) -> Result<McAssumptionReport> {
    let k = t.k();
    if mu.len() != k + 1 {
        return Err(Error::Dimension(format!(
            "{} parameters for {} matrices",
            mu.len(),
            k + 1
        )));
    }
    let n = t.size();
    let taus = t.get(0).rational_spectrum()?;
    let shifted: Vec<RationalMatrix> = (1..=k).map(|j| t.get(j).shift(&-mu[j].clone())).collect();
    let mut violations = Vec::new();
    for tau in &taus {
        let b0 = t.get(0).shift(&-tau.clone());
        for i in 1..=k {
            let others = shifted
                .iter()
                .enumerate()
                .filter(|(j, _)| j + 1 != i)
                .map(|(_, a)| a);
            let mut stacked = b0.clone();
            let mut side = b0.clone();
            for a in others {
                stacked = stacked.vstack(a)?;
                side = side.hstack(a)?;
            }
            if stacked.rank() < n {
                violations.push(McViolation {
                    condition: McCondition::KernelIntersection,
                    i,
                    tau: tau.clone(),
                });
            }
            if side.rank() < n {
                violations.push(McViolation {
                    condition: McCondition::ImageSum,
                    i,
                    tau: tau.clone(),
                });
            }
        }
    }
    Ok(McAssumptionReport { taus, violations })
}

/// Irreducible rigid tuple realizing a scheme with constant, generic
/// eigenvalues, built by replaying the reduction backwards from order one.
pub fn construct_rigid(s: &Scheme) -> Result<MatrixTuple> {
    if reduce(s.shape()).verdict != Verdict::Rigid {
        return Err(Error::Precondition(format!("{} is not rigid", s.shape())));
    }
    let vals = s.constant_eigenvalues()?;
    let rows: Vec<Vec<u32>> = s.shape().partitions().to_vec();
    let t = build_rigid(rows, vals)?;
    let expected = SpectralData::from_scheme(s)?;
    if SpectralData::of(&t)? != expected {
        return Err(Error::Degenerate(
            "constructed tuple has the wrong spectral data".into(),
        ));
    }
    Ok(t)
}

fn build_rigid(rows: Vec<Vec<u32>>, vals: Vec<Vec<Q>>) -> Result<MatrixTuple> {
    for r in &vals {
        for (a, x) in r.iter().enumerate() {
            if r[..a].contains(x) {
                return Err(Error::Degenerate(format!(
                    "eigenvalue {} repeats within one matrix",
                    fmt_q(x)
                )));
            }
        }
    }
    let n: u32 = rows[0].iter().sum();
    if n == 1 {
        let scalars: Vec<Q> = rows
            .iter()
            .zip(&vals)
            .map(|(r, v)| v[r.iter().position(|&x| x == 1).expect("order one")].clone())
            .collect();
        return MatrixTuple::scalars(&scalars);
    }
    let shape = SpectralType::untrimmed(rows.clone())?;
    let ell = max_positions(&shape);
    let mu: Vec<Q> = ell.iter().zip(&vals).map(|(&l, v)| v[l - 1].clone()).collect();
    let total: Q = mu.iter().sum();
    if total.is_zero() {
        return Err(Error::Degenerate("sum of the reduction parameters vanishes".into()));
    }
    let k = rows.len() as i64 - 1;
    let d = ell.iter().zip(&rows).map(|(&l, r)| i64::from(r[l - 1])).sum::<i64>() - (k - 1) * i64::from(n);
    let two = Q::from_integer(2.into());
    let mut next_rows = Vec::with_capacity(rows.len());
    let mut next_vals = Vec::with_capacity(rows.len());
    for (j, (r, v)) in rows.iter().zip(&vals).enumerate() {
        let shift = &total - &two * &mu[j];
        let mut nr = Vec::new();
        let mut nv = Vec::new();
        for (nu, (&m, l)) in r.iter().zip(v).enumerate() {
            let (m2, l2) = if nu + 1 == ell[j] {
                (i64::from(m) - d, -mu[j].clone())
            } else {
                (i64::from(m), l + &shift)
            };
            if m2 < 0 {
                return Err(Error::Precondition("reduction leaves a negative part".into()));
            }
            if m2 > 0 {
                nr.push(m2 as u32);
                nv.push(l2);
            }
        }
        next_rows.push(nr);
        next_vals.push(nv);
    }
    let inner = build_rigid(next_rows, next_vals)?;
    let neg: Vec<Q> = mu.iter().map(|x| -x.clone()).collect();
    let out = mc_raw(&inner, &neg)?;
    if out.size() != n as usize {
        return Err(Error::Degenerate(format!(
            "convolution produced size {} instead of {n}",
            out.size()
        )));
    }
    Ok(out)
}

/// Samples generic eigenvalues for a rigid shape and builds the tuple,
/// resampling up to five times.
pub fn construct_rigid_random<R: Rng + ?Sized>(
    shape: &SpectralType,
    rng: &mut R,
) -> Result<(Scheme, MatrixTuple)> {
    let untrimmed = SpectralType::untrimmed(shape.partitions().to_vec())?;
    let mut last = Error::Degenerate("no attempt made".into());
    for _ in 0..5 {
        let s = random_generic_scheme(&untrimmed, rng)?;
        match construct_rigid(&s) {
            Ok(t) => return Ok((s, t)),
            Err(e @ Error::Degenerate(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn h1(l1: Q, l2: Q) -> MatrixTuple {
        MatrixTuple::scalars(&[-(&l1 + &l2), l1, l2]).unwrap()
    }

    #[test]
    fn build_l_example() {
        let a = build_l(&[2, 1, 1], &[qi(5), qi(6), qi(7)]).unwrap();
        let want = RationalMatrix::from_i64(&[
            &[5, 0, 1, 0],
            &[0, 5, 0, 0],
            &[0, 0, 6, 1],
            &[0, 0, 0, 7],
        ])
        .unwrap();
        assert_eq!(a, want);
        assert_eq!(
            build_l(&[1, 1], &[qi(1), qi(2)]).unwrap(),
            RationalMatrix::from_i64(&[&[1, 1], &[0, 2]]).unwrap()
        );
        assert_eq!(build_l(&[3], &[qi(4)]).unwrap(), RationalMatrix::scalar(3, qi(4)));
        assert!(build_l(&[1, 1], &[qi(1)]).is_err());
        assert!(build_l(&[1, 0], &[qi(1), qi(2)]).is_err());
    }

    #[test]
    fn partition_of_l() {
        let a = build_l(&[2, 1, 1], &vec![qi(3); 3]).unwrap();
        assert_eq!(spectral_data_of(&a).unwrap(), vec![(qi(3), vec![2, 1, 1])]);
        let j = jordan(3, &qi(0));
        assert_eq!(partition_at(&j, &qi(0)), vec![1, 1, 1]);
        let d = build_l(&[1, 1, 1], &[qi(2), qi(2), qi(5)]).unwrap();
        // L(1,1;2,2) is a single Jordan cell, so use a diagonal instead.
        let mut diag = RationalMatrix::zeros(3, 3);
        diag[(0, 0)] = qi(2);
        diag[(1, 1)] = qi(2);
        diag[(2, 2)] = qi(5);
        assert_eq!(
            spectral_data_of(&diag).unwrap(),
            vec![(qi(2), vec![2]), (qi(5), vec![1])]
        );
        assert_eq!(
            spectral_data_of(&d).unwrap(),
            vec![(qi(2), vec![1, 1]), (qi(5), vec![1])]
        );
    }

    #[test]
    fn centralizer_examples() {
        let a = build_l(&[2, 1, 1], &[qi(1), qi(2), qi(3)]).unwrap();
        assert_eq!(centralizer_dim(&a).unwrap(), 6);
        assert_eq!(centralizer_dim(&RationalMatrix::identity(3)).unwrap(), 9);
        assert_eq!(centralizer_dim(&jordan(3, &qi(0))).unwrap(), 3);
        assert!(centralizer_dim_bounded(&RationalMatrix::identity(3), 2).is_err());
    }

    #[test]
    fn addition_and_convolution_shapes() {
        let t = h1(qi(2), qi(3));
        let a = addition(&t, &[qi(1), qi(-4)]).unwrap();
        assert_eq!(a.get(0)[(0, 0)], qi(-2));
        assert_eq!(a.get(1)[(0, 0)], qi(3));
        assert_eq!(a.get(2)[(0, 0)], qi(-1));
        assert_eq!(addition(&a, &[qi(-1), qi(4)]).unwrap(), t);
        let g = convolution(&t, &qi(10));
        assert_eq!(g.size(), 2);
        assert!(g.get(1).row(1).iter().all(Zero::is_zero));
        assert_eq!(g.get(1).row(0), &[qi(12), qi(3)]);
    }

    #[test]
    fn h2_from_h1() {
        let (l1, l2) = (q(1, 3), q(2, 7));
        let mu = [q(1, 5), q(3, 11), q(-5, 13)];
        let t = h1(l1.clone(), l2.clone());
        let a = middle_convolution(&t, &mu).unwrap();
        assert_eq!(a.size(), 2);
        let total: Q = mu.iter().sum();
        let got = SpectralData::of(&a).unwrap();
        let pred = predict_mc(&SpectralData::of(&t).unwrap(), &mu).unwrap();
        assert_eq!(got, pred);
        let two = qi(2);
        let want1 = group_slots([(1, &l1 + &total - &two * &mu[1]), (1, -mu[1].clone())]);
        assert_eq!(got.matrices()[1], want1);
        let dims = orbit_dims(&a).unwrap();
        assert_eq!((dims.idx, dims.dim_z), (2, 1));
        assert_eq!(dims.dim_orbit, dims.dim_orbit_tilde);
        let back = mc_raw(&a, &mu.iter().map(|x| -x.clone()).collect::<Vec<_>>()).unwrap();
        assert_eq!(SpectralData::of(&back).unwrap(), SpectralData::of(&t).unwrap());
    }

    #[test]
    fn mu_zero_keeps_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let shape = SpectralType::parse("111,111,21").unwrap();
        let (_, t) = construct_rigid_random(&shape, &mut rng).unwrap();
        let z = mc_raw(&t, &[qi(0), qi(0), qi(0)]).unwrap();
        assert_eq!(SpectralData::of(&z).unwrap(), SpectralData::of(&t).unwrap());
    }

    #[test]
    fn construct_h3_and_others() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in ["11,11,11", "111,111,21", "211,211,211", "21,21,21,21", "22,211,1111"] {
            let shape = SpectralType::parse(s).unwrap();
            let (sch, t) = construct_rigid_random(&shape, &mut rng).unwrap();
            assert_eq!(t.size() as u32, shape.order(), "{s}");
            assert_eq!(SpectralData::of(&t).unwrap(), SpectralData::from_scheme(&sch).unwrap());
            if t.size() > 1 {
                let d = orbit_dims(&t).unwrap();
                assert_eq!((d.dim_z, d.idx), (1, 2), "{s}");
            }
        }
        let one = SpectralType::parse_untrimmed("1,1,1").unwrap();
        let sch = Scheme::from_constants(one, vec![vec![qi(-3)], vec![qi(1)], vec![qi(2)]]).unwrap();
        assert_eq!(construct_rigid(&sch).unwrap(), h1(qi(1), qi(2)));
        assert!(construct_rigid(&Scheme::symbolic(SpectralType::parse("22,22,1111").unwrap())).is_err());
    }

    #[test]
    fn assumption_violation_named() {
        // A common eigenvector e_1 of every matrix makes the kernel
        // condition fail at τ = A_0's eigenvalue on e_1.
        let a1 = RationalMatrix::from_i64(&[&[1, 0], &[0, 2]]).unwrap();
        let a2 = RationalMatrix::from_i64(&[&[3, 1], &[0, 5]]).unwrap();
        let t = MatrixTuple::from_residues(vec![a1, a2]).unwrap();
        let r = check_mc_assumptions(&t, &[qi(0), qi(1), qi(3)]).unwrap();
        assert!(!r.ok());
        assert!(r
            .violations
            .iter()
            .any(|v| v.condition == McCondition::KernelIntersection && v.tau == qi(-4)));
        assert!(matches!(
            middle_convolution(&t, &[qi(0), qi(1), qi(3)]),
            Err(Error::McAssumption(_))
        ));
    }

    #[test]
    fn scalars_have_index_two() {
        let d = orbit_dims(&h1(qi(1), qi(2))).unwrap();
        assert_eq!((d.idx, d.dim_z), (2, 1));
        let mut a1 = RationalMatrix::zeros(2, 2);
        a1[(0, 0)] = qi(1);
        a1[(1, 1)] = qi(2);
        let mut a2 = RationalMatrix::zeros(2, 2);
        a2[(0, 0)] = qi(3);
        a2[(1, 1)] = qi(-7);
        let t = MatrixTuple::from_residues(vec![a1, a2]).unwrap();
        let d = orbit_dims(&t).unwrap();
        assert_eq!(d.dim_z, 2);
        assert_eq!(d.pidx, 2 - d.idx / 2);
    }
}

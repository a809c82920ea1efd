//! Katz's reduction calculus on spectral types and the realizability
//! predicates built on it.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::paramform::ParamForm;
use crate::rational::{common_denominator, Q};
use crate::rootlattice::{alpha_aligned, alpha_of, classify_root, RootClass};
use crate::spectype::{canonicalize, gcd_of, idx, AlignedTuple, CanonicalForm, SpectralType};

/// A spectral type together with an eigenvalue form for every slot.
///
/// The shape is kept untrimmed so that points with a single eigenvalue still
/// carry their `λ_{j,1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scheme {
    shape: SpectralType,
    eigenvalues: Vec<Vec<ParamForm>>,
}

impl Scheme {
    pub fn new(shape: SpectralType, eigenvalues: Vec<Vec<ParamForm>>) -> Result<Self> {
        if shape.len() != eigenvalues.len() {
            return Err(Error::Dimension(format!(
                "{} partitions but {} eigenvalue rows",
                shape.len(),
                eigenvalues.len()
            )));
        }
        for (j, (p, e)) in shape.partitions().iter().zip(&eigenvalues).enumerate() {
            if p.len() != e.len() {
                return Err(Error::Dimension(format!(
                    "partition {j} has {} parts but {} eigenvalues",
                    p.len(),
                    e.len()
                )));
            }
        }
        Ok(Self { shape, eigenvalues })
    }

    /// Eigenvalues named `l{j}_{ν}` for every slot.
    pub fn symbolic(shape: SpectralType) -> Self {
        let eigenvalues = shape
            .partitions()
            .iter()
            .enumerate()
            .map(|(j, p)| (1..=p.len()).map(|nu| ParamForm::eigen(j, nu)).collect())
            .collect();
        Self { shape, eigenvalues }
    }

    pub fn from_constants(shape: SpectralType, values: Vec<Vec<Q>>) -> Result<Self> {
        let eig = values
            .into_iter()
            .map(|r| r.into_iter().map(ParamForm::constant).collect())
            .collect();
        Self::new(shape, eig)
    }

    pub fn shape(&self) -> &SpectralType {
        &self.shape
    }

    pub fn eigenvalues(&self) -> &[Vec<ParamForm>] {
        &self.eigenvalues
    }

    /// `λ_{j,ν}` with 1-based `ν`.
    pub fn eigenvalue(&self, j: usize, nu: usize) -> &ParamForm {
        &self.eigenvalues[j][nu - 1]
    }

    /// `Σ m_{j,ν} λ_{j,ν}`.
    pub fn trace_form(&self) -> ParamForm {
        self.weighted_sum(&self.shape.to_aligned())
    }

    /// `Σ m'_{j,ν} λ_{j,ν}` for a tuple aligned with the shape.
    pub fn weighted_sum(&self, m: &AlignedTuple) -> ParamForm {
        let mut s = ParamForm::default();
        for (row, eig) in m.rows().iter().zip(&self.eigenvalues) {
            for (&c, l) in row.iter().zip(eig) {
                if c != 0 {
                    s = &s + &l.scale(&Q::from_integer(c.into()));
                }
            }
        }
        s
    }

    pub fn substitute(&self, subst: &BTreeMap<String, ParamForm>) -> Self {
        Self {
            shape: self.shape.clone(),
            eigenvalues: self
                .eigenvalues
                .iter()
                .map(|r| r.iter().map(|f| f.substitute(subst)).collect())
                .collect(),
        }
    }

    pub fn evaluate(&self, values: &BTreeMap<String, Q>) -> Result<Self> {
        let eig = self
            .eigenvalues
            .iter()
            .map(|r| {
                r.iter()
                    .map(|f| f.eval(values).map(ParamForm::constant))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            shape: self.shape.clone(),
            eigenvalues: eig,
        })
    }

    pub fn constant_eigenvalues(&self) -> Result<Vec<Vec<Q>>> {
        self.eigenvalues
            .iter()
            .map(|r| {
                r.iter()
                    .map(|f| {
                        f.as_constant().cloned().ok_or_else(|| {
                            Error::Precondition(format!("eigenvalue {f} is not a constant"))
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

/// `d_ℓ(m) = m_{0,ℓ_0} + ⋯ + m_{k,ℓ_k} − (k−1) ord m`; missing `ℓ_j` read as 1.
pub fn d_ell(m: &SpectralType, ells: &[usize]) -> i64 {
    d_ell_aligned(&m.to_aligned(), ells)
}

pub fn d_ell_aligned(m: &AlignedTuple, ells: &[usize]) -> i64 {
    let k1 = m.len().max(ells.len());
    let n = m.order() as i64;
    let mut s = 0i64;
    for j in 0..k1 {
        let l = ells.get(j).copied().unwrap_or(1);
        s += m.part(j, l) as i64;
    }
    s - (k1 as i64 - 2) * n
}

/// `∂_ℓ` without canonicalization: positions are kept so that applying the
/// same `ℓ` again returns the input.
pub fn partial_ell_aligned(m: &AlignedTuple, ells: &[usize]) -> Result<AlignedTuple> {
    if ells.contains(&0) {
        return Err(Error::Precondition("ℓ entries are 1-based".into()));
    }
    let d = d_ell_aligned(m, ells);
    let n = m.order() as i64;
    // Padding up to three rows so that order-one input without stored
    // partitions is checked against its implicit trivial partitions.
    let k1 = m.len().max(ells.len()).max(3);
    let mut rows = Vec::with_capacity(m.len().max(ells.len()));
    for j in 0..k1 {
        let l = ells.get(j).copied().unwrap_or(1);
        let part = m.part(j, l) as i64;
        if part < d {
            return Err(Error::WellDefinedness { j, ell: l, part, d });
        }
        if j >= m.len().max(ells.len()) {
            continue;
        }
        let mut row: Vec<u32> = match m.rows().get(j) {
            Some(r) => r.clone(),
            None => vec![m.order()],
        };
        if row.len() < l {
            row.resize(l, 0);
        }
        row[l - 1] = (row[l - 1] as i64 - d) as u32;
        rows.push(row);
    }
    let order = n - d;
    if order <= 0 {
        return Err(Error::Precondition(
            "reduction leaves an empty tuple".into(),
        ));
    }
    Ok(AlignedTuple::from_rows_unchecked(rows, order as u32))
}

/// `∂_ℓ(m)`, zeros removed and canonicalized.
pub fn partial_ell(m: &SpectralType, ells: &[usize]) -> Result<CanonicalForm> {
    partial_ell_aligned(&m.to_aligned(), ells)?.canonical()
}

/// `ℓ_j` = the first position attaining the maximum of partition `j`.
pub fn max_positions(m: &SpectralType) -> Vec<usize> {
    m.partitions()
        .iter()
        .map(|p| {
            let mx = p.iter().copied().max().unwrap_or(0);
            p.iter().position(|&x| x == mx).map_or(1, |i| i + 1)
        })
        .collect()
}

/// One step of `∂_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionStep {
    #[serde(rename = "m")]
    pub input: SpectralType,
    pub ell: Vec<usize>,
    pub d: i64,
    /// Pre-canonical output with positions preserved.
    pub raw: Option<AlignedTuple>,
    #[serde(rename = "out")]
    pub output: Option<CanonicalForm>,
}

/// `∂_max(m)`: returns the step taken. When `d ≤ 0` (or `m` has order 1)
/// the output is `m` itself.
pub fn partial_max(m: &SpectralType) -> Result<ReductionStep> {
    let ell = max_positions(m);
    let d = d_ell(m, &ell);
    if m.order() == 1 || d <= 0 {
        return Ok(ReductionStep {
            input: m.clone(),
            ell,
            d,
            raw: Some(m.to_aligned()),
            output: Some(canonicalize(m)),
        });
    }
    let raw = partial_ell_aligned(&m.to_aligned(), &ell)?;
    let output = raw.canonical()?;
    Ok(ReductionStep {
        input: m.clone(),
        ell,
        d,
        raw: Some(raw),
        output: Some(output),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Rigid,
    RealizableNotRigid,
    NotRealizable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Rigid => "rigid",
            Verdict::RealizableNotRigid => "realizable, not rigid",
            Verdict::NotRealizable => "not realizable",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub verdict: Verdict,
    /// Order-one tuple, basic fixed point, or the tuple where `∂_max` failed.
    pub terminal: SpectralType,
    /// Set when the chain stopped at an ill-defined `∂_max`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl ReductionTrace {
    /// Renders the chain as `411,411,42,33 -(3)-> 111,111,21 -(1)-> …`.
    pub fn chain_text(&self) -> String {
        let mut s = match self.steps.first() {
            Some(st) => st.input.to_string(),
            None => self.terminal.to_string(),
        };
        for st in &self.steps {
            match &st.output {
                Some(out) => s.push_str(&format!(" -({})-> {}", st.d, out)),
                None => s.push_str(&format!(" -({})-> ×", st.d)),
            }
        }
        s
    }
}

/// Iterates `canonicalize ∘ ∂_max` until order one, a fixed point, or a
/// well-definedness failure.
pub fn reduce(m: &SpectralType) -> ReductionTrace {
    let mut cur = canonicalize(m).into_type();
    let mut steps = Vec::new();
    loop {
        if cur.order() == 1 {
            return ReductionTrace {
                steps,
                verdict: Verdict::Rigid,
                terminal: cur,
                failure: None,
            };
        }
        let ell = max_positions(&cur);
        let d = d_ell(&cur, &ell);
        if d <= 0 {
            // ∂_max does not lower the order here; record its image anyway.
            let raw = partial_ell_aligned(&cur.to_aligned(), &ell).ok();
            let output = raw.as_ref().and_then(|r| r.canonical().ok());
            steps.push(ReductionStep {
                input: cur.clone(),
                ell,
                d,
                raw,
                output,
            });
            return ReductionTrace {
                steps,
                verdict: Verdict::RealizableNotRigid,
                terminal: cur,
                failure: None,
            };
        }
        match partial_ell_aligned(&cur.to_aligned(), &ell) {
            Ok(raw) => {
                let out = raw
                    .canonical()
                    .expect("reduction output has positive order");
                steps.push(ReductionStep {
                    input: cur.clone(),
                    ell,
                    d,
                    raw: Some(raw),
                    output: Some(out.clone()),
                });
                cur = out.into_type();
            }
            Err(e) => {
                steps.push(ReductionStep {
                    input: cur.clone(),
                    ell,
                    d,
                    raw: None,
                    output: None,
                });
                return ReductionTrace {
                    steps,
                    verdict: Verdict::NotRealizable,
                    terminal: cur,
                    failure: Some(e.to_string()),
                };
            }
        }
    }
}

/// `Pidx m = 1 − idx m / 2`.
pub fn pidx(m: &SpectralType) -> i64 {
    1 - m.index_of_rigidity() / 2
}

pub fn pidx_aligned(m: &AlignedTuple) -> i64 {
    1 - m.index_of_rigidity() / 2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub order: u32,
    pub idx: i64,
    pub pidx: i64,
    pub gcd: u32,
    pub indivisible: bool,
    pub rigid: bool,
    pub irreducibly_realizable: bool,
    pub basic: bool,
    pub fundamental: bool,
    pub root_class: RootClass,
}

/// `m / gcd`.
pub fn primitive_part(m: &SpectralType) -> SpectralType {
    let g = gcd_of(m);
    if g == 1 {
        return m.clone();
    }
    let parts = m
        .partitions()
        .iter()
        .map(|p| p.iter().map(|&x| x / g).collect())
        .collect();
    SpectralType::untrimmed(parts).unwrap_or_else(|_| SpectralType::one())
}

fn is_basic_indivisible(m: &SpectralType) -> bool {
    if m.order() == 1 {
        return false;
    }
    let ell = max_positions(m);
    d_ell(m, &ell) <= 0
}

pub fn classify(m: &SpectralType) -> Classification {
    let g = gcd_of(m);
    let indivisible = g == 1;
    let i = m.index_of_rigidity();
    let (irreducibly_realizable, basic, fundamental) = if indivisible {
        let ok = reduce(m).verdict != Verdict::NotRealizable;
        let basic = is_basic_indivisible(m);
        (ok, basic, basic)
    } else {
        let bar = primitive_part(m);
        let bar_ok = reduce(&bar).verdict != Verdict::NotRealizable;
        let bar_basic = is_basic_indivisible(&bar);
        let bar_idx = bar.index_of_rigidity();
        (bar_ok && i < 0, false, bar_basic && bar_idx < 0)
    };
    Classification {
        order: m.order(),
        idx: i,
        pidx: 1 - i / 2,
        gcd: g,
        indivisible,
        rigid: irreducibly_realizable && i == 2,
        irreducibly_realizable,
        basic,
        fundamental,
        root_class: classify_root(&alpha_of(m)),
    }
}

/// `m − idx(m, m_r)·m_r` with columns aligned by position.
pub fn reflect_by_rigid(m: &SpectralType, mr: &SpectralType) -> Result<SpectralType> {
    let cr = classify(mr);
    if !cr.rigid {
        return Err(Error::Precondition(format!("{mr} is not rigid")));
    }
    if !classify(m).irreducibly_realizable {
        return Err(Error::Precondition(format!(
            "{m} is not irreducibly realizable"
        )));
    }
    let c = idx(m, mr);
    let (n, nr) = (m.order() as i64, mr.order() as i64);
    if n <= c * nr {
        return Err(Error::Precondition(format!(
            "ord m = {n} ≤ idx(m, m') · ord m' = {}",
            c * nr
        )));
    }
    let len = m.len().max(mr.len());
    let mut rows = Vec::with_capacity(len);
    for j in 0..len {
        let width = m
            .partitions()
            .get(j)
            .map_or(1, Vec::len)
            .max(mr.partitions().get(j).map_or(1, Vec::len));
        let mut row = Vec::with_capacity(width);
        for nu in 1..=width {
            let v = m.part(j, nu) as i64 - c * mr.part(j, nu) as i64;
            if v < 0 {
                return Err(Error::Precondition(format!(
                    "entry ({j},{nu}) becomes negative"
                )));
            }
            row.push(v as u32);
        }
        rows.push(row);
    }
    let out = SpectralType::new(rows)?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SpecialKind {
    D4,
    E6,
    E7,
    E8,
}

impl SpecialKind {
    pub const ALL: [SpecialKind; 4] = [
        SpecialKind::D4,
        SpecialKind::E6,
        SpecialKind::E7,
        SpecialKind::E8,
    ];

    /// Order of the `m = 1` member.
    pub fn base_order(self) -> u32 {
        match self {
            SpecialKind::D4 => 2,
            SpecialKind::E6 => 3,
            SpecialKind::E7 => 4,
            SpecialKind::E8 => 6,
        }
    }
}

impl fmt::Display for SpecialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpecialKind::D4 => "D4",
            SpecialKind::E6 => "E6",
            SpecialKind::E7 => "E7",
            SpecialKind::E8 => "E8",
        })
    }
}

impl std::str::FromStr for SpecialKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "D4" => Ok(SpecialKind::D4),
            "E6" => Ok(SpecialKind::E6),
            "E7" => Ok(SpecialKind::E7),
            "E8" => Ok(SpecialKind::E8),
            _ => Err(Error::Parse(format!("unknown family {s:?}"))),
        }
    }
}

/// The four special families, each with a first partition `m…m (m−1) 1`.
pub fn special_family(kind: SpecialKind, m: u32) -> Result<SpectralType> {
    if m == 0 {
        return Err(Error::Precondition("family index must be ≥ 1".into()));
    }
    let head = |copies: usize| {
        let mut p = vec![m; copies];
        p.extend([m - 1, 1]);
        p
    };
    let parts = match kind {
        SpecialKind::D4 => vec![head(1), vec![m; 2], vec![m; 2], vec![m; 2]],
        SpecialKind::E6 => vec![head(2), vec![m; 3], vec![m; 3]],
        SpecialKind::E7 => vec![head(3), vec![m; 4], vec![2 * m; 2]],
        SpecialKind::E8 => vec![head(5), vec![2 * m; 3], vec![3 * m; 2]],
    };
    SpectralType::new(parts)
}

/// Which special family (if any) `m` belongs to, up to S∞.
pub fn special_member(m: &SpectralType) -> Option<(SpecialKind, u32)> {
    let c = canonicalize(m);
    SpecialKind::ALL.into_iter().find_map(|kind| {
        let b = kind.base_order();
        if !m.order().is_multiple_of(b) {
            return None;
        }
        let k = m.order() / b;
        let s = special_family(kind, k).ok()?;
        (canonicalize(&s) == c).then_some((kind, k))
    })
}

/// Realizability with all eigenvalues zero.
pub fn nilpotent_realizable(m: &SpectralType) -> bool {
    if m.order() == 1 {
        return true;
    }
    classify(m).fundamental && !matches!(special_member(m), Some((_, k)) if k >= 2)
}

/// Default order bound for [`ds_existence`].
pub const DS_DEFAULT_BOUND: u32 = 12;

/// Crawley-Boevey's existence test for concrete rational eigenvalues.
pub fn ds_existence(s: &Scheme) -> Result<bool> {
    ds_existence_bounded(s, DS_DEFAULT_BOUND)
}

pub fn ds_existence_bounded(s: &Scheme, bound: u32) -> Result<bool> {
    let m = s.shape();
    if m.order() > bound {
        return Err(Error::BoundExceeded(format!(
            "order {} exceeds {bound}",
            m.order()
        )));
    }
    let lambda = s.constant_eigenvalues()?;
    let tr = s.trace_form();
    if !tr.is_zero() {
        return Err(Error::TraceCondition(tr.to_string()));
    }
    let whole = m.to_aligned();
    if !classify_root(&alpha_aligned(&whole)).is_positive() {
        return Ok(false);
    }
    let weights = scaled_weights(&lambda)?;
    let candidates: Vec<(AlignedTuple, i64)> = zero_form_subtuples(&whole, &weights)
        .into_iter()
        .filter(|c| classify_root(&alpha_aligned(c)).is_positive())
        .map(|c| {
            let p = pidx_aligned(&c);
            (c, p)
        })
        .collect();
    let candidate_set: HashSet<AlignedTuple> = candidates.iter().map(|(c, _)| c.clone()).collect();
    let mut memo = HashMap::new();
    let target = pidx_aligned(&whole);
    for (c, p) in &candidates {
        if let Some(rest) = whole.checked_sub(c) {
            if let Some(b) = best_split(&rest, &candidates, &candidate_set, &mut memo) {
                if p + b >= target {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Largest `Σ Pidx` over decompositions of `r` into candidate parts.
fn best_split(
    r: &AlignedTuple,
    candidates: &[(AlignedTuple, i64)],
    set: &HashSet<AlignedTuple>,
    memo: &mut HashMap<AlignedTuple, Option<i64>>,
) -> Option<i64> {
    if let Some(v) = memo.get(r) {
        return *v;
    }
    let mut best = set.contains(r).then(|| pidx_aligned(r));
    for (c, p) in candidates {
        if c.order() >= r.order() {
            continue;
        }
        if let Some(rest) = r.checked_sub(c) {
            if let Some(b) = best_split(&rest, candidates, set, memo) {
                best = Some(best.map_or(p + b, |x| x.max(p + b)));
            }
        }
    }
    memo.insert(r.clone(), best);
    best
}

/// Eigenvalues scaled by their common denominator to machine integers.
fn scaled_weights(lambda: &[Vec<Q>]) -> Result<Vec<Vec<i128>>> {
    let den = common_denominator(lambda.iter().flatten());
    lambda
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let v: BigInt = (x * Q::from_integer(den.clone())).to_integer();
                    v.to_i128().ok_or_else(|| {
                        Error::BoundExceeded("eigenvalue numerators too large".into())
                    })
                })
                .collect()
        })
        .collect()
}

/// All proper nonzero sub-tuples `0 ≤ m' ≤ m` with equal row sums and
/// `Σ m'_{j,ν} λ_{j,ν} = 0`, found by meeting in the middle on the rows.
pub(crate) fn zero_form_subtuples(m: &AlignedTuple, w: &[Vec<i128>]) -> Vec<AlignedTuple> {
    let n = m.order();
    let rows = m.rows();
    let mut out = Vec::new();
    if rows.is_empty() {
        return out;
    }
    for sub in 1..n {
        let per_row: Vec<Vec<(Vec<u32>, i128)>> = rows
            .iter()
            .zip(w)
            .map(|(r, wr)| bounded_compositions(r, wr, sub))
            .collect();
        let h = rows.len() / 2;
        let left = combine(&per_row[..h]);
        let right = combine(&per_row[h..]);
        let mut index: HashMap<i128, Vec<usize>> = HashMap::new();
        for (i, (_, s)) in right.iter().enumerate() {
            index.entry(*s).or_default().push(i);
        }
        for (lrows, ls) in &left {
            if let Some(hits) = index.get(&-ls) {
                for &i in hits {
                    let mut all = lrows.clone();
                    all.extend(right[i].0.iter().cloned());
                    out.push(AlignedTuple::from_rows_unchecked(all, sub));
                }
            }
        }
    }
    out
}

fn combine(rows: &[Vec<(Vec<u32>, i128)>]) -> Vec<(Vec<Vec<u32>>, i128)> {
    let mut acc: Vec<(Vec<Vec<u32>>, i128)> = vec![(Vec::new(), 0)];
    for opts in rows {
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for (prefix, s) in &acc {
            for (v, c) in opts {
                let mut p = prefix.clone();
                p.push(v.clone());
                next.push((p, s + c));
            }
        }
        acc = next;
    }
    acc
}

/// Vectors `v ≤ bound` with `Σ v = total`, paired with `Σ v·w`.
fn bounded_compositions(bound: &[u32], w: &[i128], total: u32) -> Vec<(Vec<u32>, i128)> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        bound: &[u32],
        w: &[i128],
        i: usize,
        left: u32,
        cap_after: &[u32],
        cur: &mut Vec<u32>,
        s: i128,
        out: &mut Vec<(Vec<u32>, i128)>,
    ) {
        if i == bound.len() {
            if left == 0 {
                out.push((cur.clone(), s));
            }
            return;
        }
        let lo = left.saturating_sub(cap_after[i + 1]);
        let hi = bound[i].min(left);
        for x in lo..=hi {
            cur.push(x);
            rec(
                bound,
                w,
                i + 1,
                left - x,
                cap_after,
                cur,
                s + x as i128 * w[i],
                out,
            );
            cur.pop();
        }
    }
    let mut cap_after = vec![0u32; bound.len() + 1];
    for i in (0..bound.len()).rev() {
        cap_after[i] = cap_after[i + 1] + bound[i];
    }
    let mut out = Vec::new();
    rec(bound, w, 0, total, &cap_after, &mut Vec::new(), 0, &mut out);
    out
}

/// Random rational eigenvalues for `shape` satisfying the trace condition,
/// resampled until no sub-tuple other than a multiple of the primitive part
/// has a vanishing linear form.
pub fn random_generic_scheme<R: Rng + ?Sized>(shape: &SpectralType, rng: &mut R) -> Result<Scheme> {
    let untrimmed = shape.clone();
    if untrimmed.is_empty() {
        return Err(Error::Precondition("shape has no stored partitions".into()));
    }
    for _ in 0..5 {
        let den: i64 = rng.random_range(1..=1000);
        let mut vals: Vec<Vec<Q>> = untrimmed
            .partitions()
            .iter()
            .map(|p| {
                p.iter()
                    .map(|_| {
                        Q::new(
                            rng.random_range(-1_000_000..=1_000_000i64).into(),
                            den.into(),
                        )
                    })
                    .collect()
            })
            .collect();
        // Solve the trace condition for λ_{0,1}.
        let mut rest = Q::zero();
        for (j, (p, r)) in untrimmed.partitions().iter().zip(&vals).enumerate() {
            for (nu, (&c, x)) in p.iter().zip(r).enumerate() {
                if j == 0 && nu == 0 {
                    continue;
                }
                rest += x * Q::from_integer(c.into());
            }
        }
        let c0 = untrimmed.partitions()[0][0];
        vals[0][0] = -rest / Q::from_integer(c0.into());
        let scheme = Scheme::from_constants(untrimmed.clone(), vals)?;
        let w = scaled_weights(&scheme.constant_eigenvalues()?)?;
        let whole = untrimmed.to_aligned();
        let n = whole.order();
        let accidental = zero_form_subtuples(&whole, &w).into_iter().any(|c| {
            c.rows()
                .iter()
                .zip(whole.rows())
                .any(|(a, b)| a.iter().zip(b).any(|(&x, &y)| x * n != y * c.order()))
        });
        if !accidental {
            return Ok(scheme);
        }
    }
    Err(Error::Degenerate(
        "could not sample generic eigenvalues in 5 attempts".into(),
    ))
}

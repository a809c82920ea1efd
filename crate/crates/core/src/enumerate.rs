//! Exhaustive enumeration of rigid tuples of a given order and basic tuples
//! of a given index.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::katz::{reduce, Verdict};
use crate::spectype::{gcd_of, CanonicalForm, Partition, SpectralType};

/// Default ceiling on `n` for [`enumerate_rigid`].
pub const DEFAULT_MAX_ORDER: u32 = 14;

#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    /// Worker threads; `Some(1)` runs sequentially, `None` uses the global pool.
    pub threads: Option<usize>,
    pub max_order: u32,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self {
            threads: None,
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Order(u32),
    Index(i64),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub total: usize,
    /// Number of items keyed by their number of partitions.
    pub by_length: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationReport {
    pub parameter: Parameter,
    pub items: Vec<CanonicalForm>,
    pub counts: Counts,
}

impl EnumerationReport {
    fn new(parameter: Parameter, mut items: Vec<CanonicalForm>) -> Self {
        items.sort();
        items.dedup();
        let mut counts = Counts {
            total: items.len(),
            ..Counts::default()
        };
        for it in &items {
            *counts.by_length.entry(it.len()).or_default() += 1;
        }
        Self {
            parameter,
            items,
            counts,
        }
    }

    pub fn triplets(&self) -> usize {
        self.counts.by_length.get(&3).copied().unwrap_or(0)
    }

    pub fn four_tuples(&self) -> usize {
        self.counts.by_length.get(&4).copied().unwrap_or(0)
    }

    /// One `n:tuple` line per item.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for it in &self.items {
            let _ = writeln!(s, "{}:{}", it.order(), it);
        }
        s
    }
}

/// All partitions of `n` in descending-lex order.
pub fn partitions(n: u32) -> Vec<Partition> {
    fn rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for x in (1..=left.min(max)).rev() {
            cur.push(x);
            rec(left - x, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// How the running sum of `n − m_{j,1}` constrains a candidate.
#[derive(Clone, Copy)]
enum GapRule {
    /// Σ (n − m_{j,1}) < 2n, i.e. `d > 0` at the first reduction step.
    Below,
    /// Σ (n − m_{j,1}) ≥ 2n, i.e. `ord ∂_max m ≥ ord m`.
    AtLeast,
}

struct Search<'a> {
    n: u32,
    parts: &'a [Partition],
    defect: Vec<i64>,
    gap: Vec<u32>,
    min_defect: i64,
    by_defect: HashMap<i64, Vec<usize>>,
    rule: GapRule,
    max_len: usize,
}

impl<'a> Search<'a> {
    fn new(n: u32, parts: &'a [Partition], rule: GapRule, max_len: usize) -> Self {
        let nn = (n as i64) * (n as i64);
        let defect: Vec<i64> = parts
            .iter()
            .map(|p| nn - p.iter().map(|&x| (x as i64) * (x as i64)).sum::<i64>())
            .collect();
        let gap = parts.iter().map(|p| n - p[0]).collect();
        let min_defect = defect.iter().copied().min().unwrap_or(i64::MAX);
        let mut by_defect: HashMap<i64, Vec<usize>> = HashMap::new();
        for (i, &d) in defect.iter().enumerate() {
            by_defect.entry(d).or_default().push(i);
        }
        Self {
            n,
            parts,
            defect,
            gap,
            min_defect,
            by_defect,
            rule,
            max_len,
        }
    }

    fn gap_ok_partial(&self, gap: u32) -> bool {
        match self.rule {
            GapRule::Below => gap < 2 * self.n,
            GapRule::AtLeast => true,
        }
    }

    fn gap_ok_final(&self, gap: u32) -> bool {
        match self.rule {
            GapRule::Below => gap < 2 * self.n,
            GapRule::AtLeast => gap >= 2 * self.n,
        }
    }

    /// Candidates whose first partition has index `first`.
    fn run_from(&self, first: usize, target: i64) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let d = self.defect[first];
        if d <= target {
            let mut chosen = vec![first];
            self.dfs(first, target - d, self.gap[first], &mut chosen, &mut out);
        }
        out
    }

    fn dfs(
        &self,
        i_min: usize,
        left: i64,
        gap: u32,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            if self.gap_ok_final(gap) {
                out.push(chosen.clone());
            }
            return;
        }
        if chosen.len() >= self.max_len {
            return;
        }
        if let Some(last) = self.by_defect.get(&left) {
            for &i in last.iter().filter(|&&i| i >= i_min) {
                if self.gap_ok_final(gap + self.gap[i]) {
                    let mut c = chosen.clone();
                    c.push(i);
                    out.push(c);
                }
            }
        }
        if chosen.len() + 2 > self.max_len {
            return;
        }
        for i in i_min..self.parts.len() {
            let rest = left - self.defect[i];
            if rest < self.min_defect {
                continue;
            }
            // At least one more partition follows, adding at least 1 to the gap.
            if !self.gap_ok_partial(gap + self.gap[i] + 1) {
                continue;
            }
            chosen.push(i);
            self.dfs(i, rest, gap + self.gap[i], chosen, out);
            chosen.pop();
        }
    }

    fn to_type(&self, idxs: &[usize]) -> SpectralType {
        let rows = idxs.iter().map(|&i| self.parts[i].clone()).collect();
        SpectralType::new(rows).expect("partitions of a common order")
    }
}

fn run_parallel<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(t) if t > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        _ => Ok(f()),
    }
}

/// Collects candidates for every first partition, in parallel unless a
/// single thread was requested.
fn collect(
    search: &Search<'_>,
    target: i64,
    threads: Option<usize>,
    keep: impl Fn(&SpectralType) -> bool + Sync,
) -> Result<Vec<CanonicalForm>> {
    let per_first = |first: usize| -> Vec<CanonicalForm> {
        search
            .run_from(first, target)
            .into_iter()
            .map(|idxs| search.to_type(&idxs))
            .filter(|m| keep(m))
            .map(|m| crate::spectype::canonicalize(&m))
            .collect()
    };
    let firsts = 0..search.parts.len();
    if threads == Some(1) {
        return Ok(firsts.flat_map(per_first).collect());
    }
    run_parallel(threads, || {
        firsts
            .into_par_iter()
            .flat_map_iter(per_first)
            .collect::<Vec<_>>()
    })
}

pub fn enumerate_rigid(n: u32) -> Result<EnumerationReport> {
    enumerate_rigid_with(n, &EnumerateOptions::default())
}

/// Rigid tuples of order `n` up to S∞.
pub fn enumerate_rigid_with(n: u32, opts: &EnumerateOptions) -> Result<EnumerationReport> {
    if n == 0 {
        return Err(Error::Precondition("order must be positive".into()));
    }
    if n > opts.max_order {
        return Err(Error::BoundExceeded(format!(
            "order {n} exceeds the configured bound {}",
            opts.max_order
        )));
    }
    if n == 1 {
        let one = crate::spectype::canonicalize(&SpectralType::one());
        return Ok(EnumerationReport::new(Parameter::Order(1), vec![one]));
    }
    let parts: Vec<Partition> = partitions(n).into_iter().filter(|p| p.len() > 1).collect();
    let n2 = (n as i64) * (n as i64);
    let target = 2 * n2 - 2;
    let max_len = (target / (2 * n as i64 - 2)) as usize;
    let search = Search::new(n, &parts, GapRule::Below, max_len);
    let items = collect(&search, target, opts.threads, |m| {
        reduce(m).verdict == Verdict::Rigid
    })?;
    Ok(EnumerationReport::new(Parameter::Order(n), items))
}

pub fn enumerate_basic(p: i64) -> Result<EnumerationReport> {
    enumerate_basic_with(p, &EnumerateOptions::default())
}

/// Basic tuples with `idx m = p` up to S∞.
pub fn enumerate_basic_with(p: i64, opts: &EnumerateOptions) -> Result<EnumerationReport> {
    if p > 0 || p % 2 != 0 {
        return Err(Error::Precondition(format!(
            "index {p} must be even and non-positive"
        )));
    }
    let max_n = (6 - 3 * p) as u32;
    let mut items = Vec::new();
    for n in 2..=max_n {
        let parts: Vec<Partition> = partitions(n).into_iter().filter(|q| q.len() > 1).collect();
        let n2 = (n as i64) * (n as i64);
        let target = 2 * n2 - p;
        // Tuples with four or more partitions satisfy ord + idx ≤ 2.
        let max_len = if n as i64 <= 2 - p {
            (target / (2 * n as i64 - 2)) as usize
        } else {
            3
        };
        let search = Search::new(n, &parts, GapRule::AtLeast, max_len);
        items.extend(collect(&search, target, opts.threads, |m| {
            m.len() >= 3 && gcd_of(m) == 1
        })?);
    }
    Ok(EnumerationReport::new(Parameter::Index(p), items))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RigidCountRow {
    pub n: u32,
    pub triplets: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasicCountRow {
    pub p: i64,
    pub total: usize,
    pub triplets: usize,
    pub four_tuples: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub rigid: Vec<RigidCountRow>,
    pub basic: Vec<BasicCountRow>,
}

/// Rows for `2 ≤ n ≤ max_n` and `0 ≥ p ≥ max_p` (even `p`).
pub fn count_table(max_n: u32, max_p: i64, opts: &EnumerateOptions) -> Result<CountTable> {
    let mut t = CountTable::default();
    for n in 2..=max_n {
        let r = enumerate_rigid_with(n, opts)?;
        t.rigid.push(RigidCountRow {
            n,
            triplets: r.triplets(),
            total: r.counts.total,
        });
    }
    let mut p = 0;
    while p >= max_p {
        let r = enumerate_basic_with(p, opts)?;
        t.basic.push(BasicCountRow {
            p,
            total: r.counts.total,
            triplets: r.triplets(),
            four_tuples: r.four_tuples(),
        });
        p -= 2;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_lists() {
        assert_eq!(
            partitions(4),
            vec![
                vec![4],
                vec![3, 1],
                vec![2, 2],
                vec![2, 1, 1],
                vec![1, 1, 1, 1]
            ]
        );
        assert_eq!(partitions(12).len(), 77);
    }

    #[test]
    fn small_rigid_lists() {
        let r = enumerate_rigid(2).unwrap();
        assert_eq!(r.to_text(), "2:11,11,11\n");
        let r = enumerate_rigid(4).unwrap();
        let text = r.to_text();
        assert_eq!(r.counts.total, 6);
        assert_eq!(r.triplets(), 3);
        assert!(text.contains("4:22,211,1111\n"));
        assert!(text.contains("4:31,31,31,31,31\n"));
        assert_eq!(enumerate_rigid(1).unwrap().items.len(), 1);
    }

    #[test]
    fn sequential_matches_parallel() {
        let seq = enumerate_rigid_with(
            6,
            &EnumerateOptions {
                threads: Some(1),
                ..Default::default()
            },
        )
        .unwrap();
        let par = enumerate_rigid_with(
            6,
            &EnumerateOptions {
                threads: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn basic_zero() {
        let r = enumerate_basic(0).unwrap();
        let names: Vec<String> = r.items.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            names,
            vec![
                "11,11,11,11",
                "111,111,111",
                "22,1111,1111",
                "33,222,111111"
            ]
        );
        assert!(enumerate_basic(1).is_err());
        assert!(enumerate_basic(2).is_err());
    }

    #[test]
    fn bound_enforced() {
        assert!(matches!(enumerate_rigid(15), Err(Error::BoundExceeded(_))));
    }
}

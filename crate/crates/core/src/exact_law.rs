//! Exact probability tables over strings of fixed length and the comparisons between them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::model::{Alphabet, Symbol};
use crate::{Error, Result};

/// A table is stored sparsely once more than this fraction of its entries are zero.
pub const SPARSE_ZERO_FRACTION: f64 = 0.25;

#[derive(Clone, Debug, PartialEq)]
enum Table {
    Dense(Vec<f64>),
    Sparse(BTreeMap<u64, f64>),
}

/// Probability of every string `y_{first}..y_horizon` over an alphabet.
///
/// Strings are indexed lexicographically: the string `s` has index `Σ s[i]·k^(L-1-i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteLaw {
    alphabet: Alphabet,
    first_index: usize,
    horizon: usize,
    table: Table,
}

impl FiniteLaw {
    /// Builds a law from a dense table, choosing the storage layout.
    pub fn from_dense(alphabet: Alphabet, first_index: usize, horizon: usize, dense: Vec<f64>) -> Self {
        assert!(first_index <= horizon + 1);
        let len = horizon + 1 - first_index;
        assert_eq!(dense.len() as u128, (alphabet.len() as u128).pow(len as u32));
        let zeros = dense.iter().filter(|&&p| p == 0.0).count();
        let table = if !dense.is_empty() && zeros as f64 > SPARSE_ZERO_FRACTION * dense.len() as f64 {
            Table::Sparse(
                dense
                    .into_iter()
                    .enumerate()
                    .filter(|(_, p)| *p != 0.0)
                    .map(|(i, p)| (i as u64, p))
                    .collect(),
            )
        } else {
            Table::Dense(dense)
        };
        FiniteLaw { alphabet, first_index, horizon, table }
    }

    pub fn from_sparse(alphabet: Alphabet, first_index: usize, horizon: usize, entries: BTreeMap<u64, f64>) -> Self {
        let law = FiniteLaw { alphabet, first_index, horizon, table: Table::Sparse(entries) };
        if law.dense_fraction() >= 1.0 - SPARSE_ZERO_FRACTION {
            let dense = (0..law.n_strings()).map(|i| law.prob_at(i)).collect();
            FiniteLaw { table: Table::Dense(dense), ..law }
        } else {
            law
        }
    }

    /// Fills a dense table by depth-first extension of prefixes.
    ///
    /// `step(state, position, symbol)` extends a prefix state by one symbol and returns `None`
    /// when the extended prefix has probability zero, which prunes its subtree. `leaf` maps a
    /// full-length state to the string's probability. Subtrees under distinct first symbols are
    /// filled in parallel into disjoint slices, so the result does not depend on scheduling.
    pub(crate) fn enumerate<S, F, G>(
        alphabet: Alphabet,
        first_index: usize,
        horizon: usize,
        budget: usize,
        extra_cost: usize,
        root: S,
        step: F,
        leaf: G,
    ) -> Result<FiniteLaw>
    where
        S: Sync + Send,
        F: Fn(&S, usize, Symbol) -> Option<S> + Sync,
        G: Fn(&S) -> f64 + Sync,
    {
        if horizon < first_index.max(1) {
            return Err(Error::HorizonTooSmall { min: first_index.max(1), got: horizon });
        }
        let k = alphabet.len();
        let len = horizon + 1 - first_index;
        let required = (k as f64).powi(len as i32) * extra_cost.max(1) as f64;
        if required > budget as f64 {
            return Err(Error::EnumerationTooLarge { required, budget });
        }
        let size = k.pow(len as u32);
        let mut table = vec![0.0; size];
        let chunk = size / k;
        table.par_chunks_mut(chunk).enumerate().for_each(|(s, out)| {
            if let Some(state) = step(&root, 0, s) {
                fill(out, state, 1, len, k, &step, &leaf);
            }
        });
        Ok(FiniteLaw::from_dense(alphabet, first_index, horizon, table))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn first_index(&self) -> usize {
        self.first_index
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn string_len(&self) -> usize {
        self.horizon + 1 - self.first_index
    }

    pub fn n_strings(&self) -> u64 {
        (self.alphabet.len() as u64).pow(self.string_len() as u32)
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.table, Table::Sparse(_))
    }

    fn dense_fraction(&self) -> f64 {
        match &self.table {
            Table::Dense(v) => v.iter().filter(|&&p| p != 0.0).count() as f64 / v.len() as f64,
            Table::Sparse(m) => m.len() as f64 / self.n_strings() as f64,
        }
    }

    pub fn encode(&self, s: &[Symbol]) -> u64 {
        assert_eq!(s.len(), self.string_len());
        let k = self.alphabet.len() as u64;
        s.iter().fold(0, |acc, &y| acc * k + y as u64)
    }

    pub fn decode(&self, mut index: u64) -> Vec<Symbol> {
        let k = self.alphabet.len() as u64;
        let mut s = vec![0; self.string_len()];
        for slot in s.iter_mut().rev() {
            *slot = (index % k) as Symbol;
            index /= k;
        }
        s
    }

    pub fn prob_at(&self, index: u64) -> f64 {
        match &self.table {
            Table::Dense(v) => v[index as usize],
            Table::Sparse(m) => m.get(&index).copied().unwrap_or(0.0),
        }
    }

    pub fn prob(&self, s: &[Symbol]) -> f64 {
        self.prob_at(self.encode(s))
    }

    /// Probability of a string given by labels.
    pub fn prob_of(&self, labels: &[&str]) -> f64 {
        let s: Vec<Symbol> = labels
            .iter()
            .map(|l| self.alphabet.index(l).unwrap_or_else(|| panic!("unknown label {l}")))
            .collect();
        self.prob(&s)
    }

    /// Stored entries in index order (for dense tables this includes zeros).
    pub fn entries(&self) -> Box<dyn Iterator<Item = (u64, f64)> + '_> {
        match &self.table {
            Table::Dense(v) => Box::new(v.iter().enumerate().map(|(i, &p)| (i as u64, p))),
            Table::Sparse(m) => Box::new(m.iter().map(|(&i, &p)| (i, p))),
        }
    }

    pub fn total(&self) -> f64 {
        self.entries().map(|(_, p)| p).sum()
    }

    /// `"y_1 y_2 ... <TAB> probability"` lines for every positive entry, in index order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.entries().filter(|(_, p)| *p != 0.0) {
            let s = self.decode(i);
            let labels: Vec<&str> = s.iter().map(|&y| self.alphabet.label(y)).collect();
            out.push_str(&labels.join(" "));
            out.push('\t');
            out.push_str(&p.to_string());
            out.push('\n');
        }
        out
    }

    fn check_compatible(&self, other: &FiniteLaw) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::LawMismatch("alphabets differ".into()));
        }
        if self.horizon != other.horizon || self.first_index != other.first_index {
            return Err(Error::LawMismatch(format!(
                "index ranges differ: {}..={} vs {}..={}",
                self.first_index, self.horizon, other.first_index, other.horizon
            )));
        }
        Ok(())
    }

    /// Visits `|a_i - b_i|` for every index where either side has a stored entry.
    fn for_each_gap(&self, other: &FiniteLaw, mut f: impl FnMut(u64, f64)) {
        for (i, p) in self.entries() {
            f(i, (p - other.prob_at(i)).abs());
        }
        for (i, q) in other.entries() {
            if self.prob_at(i) == 0.0 && q != 0.0 && !self.stores(i) {
                f(i, q.abs());
            }
        }
    }

    fn stores(&self, index: u64) -> bool {
        match &self.table {
            Table::Dense(_) => true,
            Table::Sparse(m) => m.contains_key(&index),
        }
    }

    fn map_strings(&self, first_index: usize, horizon: usize, project: impl Fn(u64) -> u64) -> FiniteLaw {
        let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
        for (i, p) in self.entries() {
            if p != 0.0 {
                *acc.entry(project(i)).or_insert(0.0) += p;
            }
        }
        FiniteLaw::from_sparse(self.alphabet.clone(), first_index, horizon, acc)
    }
}

fn fill<S, F, G>(out: &mut [f64], state: S, depth: usize, len: usize, k: usize, step: &F, leaf: &G)
where
    F: Fn(&S, usize, Symbol) -> Option<S>,
    G: Fn(&S) -> f64,
{
    if depth == len {
        out[0] = leaf(&state);
        return;
    }
    let sub = out.len() / k;
    for (s, chunk) in out.chunks_mut(sub).enumerate() {
        if let Some(next) = step(&state, depth, s) {
            fill(chunk, next, depth + 1, len, k, step, leaf);
        }
    }
}

/// ½ Σ |a − b| over the common string set.
pub fn total_variation(a: &FiniteLaw, b: &FiniteLaw) -> Result<f64> {
    a.check_compatible(b)?;
    let mut sum = 0.0;
    a.for_each_gap(b, |_, g| sum += g);
    Ok((0.5 * sum).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawComparison {
    pub equal: bool,
    pub max_gap: f64,
    /// String attaining the largest gap, when the gap is positive.
    pub argmax: Option<Vec<Symbol>>,
    pub total_variation: f64,
}

pub fn laws_equal(a: &FiniteLaw, b: &FiniteLaw, tol: f64) -> Result<LawComparison> {
    a.check_compatible(b)?;
    let mut max_gap = 0.0;
    let mut argmax = None;
    let mut sum = 0.0;
    a.for_each_gap(b, |i, g| {
        sum += g;
        if g > max_gap {
            max_gap = g;
            argmax = Some(i);
        }
    });
    Ok(LawComparison {
        equal: max_gap <= tol,
        max_gap,
        argmax: argmax.map(|i| a.decode(i)),
        total_variation: (0.5 * sum).min(1.0),
    })
}

/// Sums out the final symbol.
pub fn marginalize_last(a: &FiniteLaw) -> Result<FiniteLaw> {
    if a.string_len() < 2 {
        return Err(Error::HorizonTooSmall { min: a.first_index + 1, got: a.horizon });
    }
    let k = a.alphabet.len() as u64;
    Ok(a.map_strings(a.first_index, a.horizon - 1, |i| i / k))
}

/// Sums out the first symbol, turning a law of `y_f..y_N` into a law of `y_{f+1}..y_N`.
pub fn marginalize_first(a: &FiniteLaw) -> Result<FiniteLaw> {
    if a.string_len() < 2 {
        return Err(Error::HorizonTooSmall { min: a.first_index + 1, got: a.horizon });
    }
    let rest = (a.alphabet.len() as u64).pow(a.string_len() as u32 - 1);
    Ok(a.map_strings(a.first_index + 1, a.horizon, |i| i % rest))
}

/// Marginalizes leading coordinates until both laws describe the same window y_f..y_N.
pub fn common_window(a: &FiniteLaw, b: &FiniteLaw) -> Result<(FiniteLaw, FiniteLaw)> {
    let (mut a, mut b) = (a.clone(), b.clone());
    while a.first_index < b.first_index {
        a = marginalize_first(&a)?;
    }
    while b.first_index < a.first_index {
        b = marginalize_first(&b)?;
    }
    Ok((a, b))
}

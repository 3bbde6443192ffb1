//! Recovery of the mixing measure from independent trajectories and permutation tests for
//! exchangeability of successors-array rows.
//!
//! A mixture fixes its random transition matrix once per realization, so one trajectory only
//! ever identifies one support point. Recovering the weights needs many independent
//! trajectories: [`lln_recover`] estimates a matrix per trajectory and clusters them.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::model::{Alphabet, Distribution, MarkovMixtureModel, StochasticMatrix, Symbol};
use crate::sim::Trajectory;
use crate::successors::{extract, SuccessorsArray};
use crate::{Error, RandomSource, Result};

/// Shortest row the permutation test accepts.
pub const MIN_TEST_ROW_LEN: usize = 20;

pub const DEFAULT_PERMUTATIONS: usize = 1999;

fn histogram(row: &[Symbol], k: usize) -> Distribution {
    let mut counts = vec![0.0; k];
    for &y in row {
        counts[y] += 1.0;
    }
    Distribution::normalized(counts)
}

/// Empirical law of the successors of `row_key` along one trajectory.
pub fn lln_row_estimate(t: &Trajectory, alphabet: &Alphabet, row_key: Symbol, min_count: usize) -> Result<Distribution> {
    let arr = extract(t, alphabet)?;
    let row = arr.row(row_key);
    if row.len() < min_count.max(1) {
        return Err(Error::InsufficientVisits { row: alphabet.label(row_key).to_string(), count: row.len(), min: min_count });
    }
    Ok(histogram(row, alphabet.len()))
}

/// Estimated transition matrix with rows below the minimum count left unobserved.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveredMatrix {
    pub rows: Vec<Option<Distribution>>,
}

impl RecoveredMatrix {
    /// Largest row-wise TV distance over rows observed in both; `None` without common rows.
    pub fn distance(&self, other: &RecoveredMatrix) -> Option<f64> {
        self.rows
            .iter()
            .zip(&other.rows)
            .filter_map(|(a, b)| Some(a.as_ref()?.total_variation(b.as_ref()?)))
            .reduce(f64::max)
    }

    pub fn to_matrix(&self) -> Option<StochasticMatrix> {
        Some(StochasticMatrix::from_rows(self.rows.iter().cloned().collect::<Option<Vec<_>>>()?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterDiagnostics {
    pub members: usize,
    /// Successor counts per row summed over the cluster's trajectories.
    pub row_counts: Vec<usize>,
    /// ½ Σ_y sqrt(p_y (1 − p_y) / n): a standard-error scale for the row's TV error.
    pub row_tv_error: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveredMixingMeasure {
    pub alphabet: Alphabet,
    pub support: Vec<RecoveredMatrix>,
    pub weights: Vec<f64>,
    pub diagnostics: Vec<ClusterDiagnostics>,
}

impl RecoveredMixingMeasure {
    /// The recovered measure as a Markov mixture, when every row of every centroid was observed.
    pub fn to_markov_mixture(&self, y0: Symbol) -> Option<MarkovMixtureModel> {
        Some(MarkovMixtureModel {
            alphabet: self.alphabet.clone(),
            weights: Distribution::new(self.weights.clone()),
            components: self.support.iter().map(RecoveredMatrix::to_matrix).collect::<Option<Vec<_>>>()?,
            y0,
        })
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Per trajectory, estimates P̂ from the successors rows; groups the estimates by
/// single-linkage on max-row TV at threshold `cluster_tol`; centroids are entrywise means of
/// the members' observed rows and weights are cluster frequencies.
pub fn lln_recover(trajectories: &[Trajectory], alphabet: &Alphabet, cluster_tol: f64, min_row_count: usize) -> Result<RecoveredMixingMeasure> {
    if trajectories.is_empty() {
        return Err(Error::EmptyInput("no trajectories".into()));
    }
    let k = alphabet.len();
    let mut estimates = Vec::with_capacity(trajectories.len());
    let mut counts = Vec::with_capacity(trajectories.len());
    for t in trajectories {
        let arr = extract(t, alphabet)?;
        let rows: Vec<Option<Distribution>> =
            arr.rows.iter().map(|r| (r.len() >= min_row_count.max(1)).then(|| histogram(r, k))).collect();
        if rows.iter().all(Option::is_none) {
            let (best, row) = arr.rows.iter().enumerate().max_by_key(|(_, r)| r.len()).expect("alphabet is not empty");
            return Err(Error::InsufficientVisits { row: alphabet.label(best).to_string(), count: row.len(), min: min_row_count });
        }
        counts.push(arr.rows.iter().map(Vec::len).collect::<Vec<_>>());
        estimates.push(RecoveredMatrix { rows });
    }

    let n = estimates.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if estimates[i].distance(&estimates[j]).is_some_and(|d| d <= cluster_tol) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    // clusters in order of their first member
    let mut cluster_of_root = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        if cluster_of_root[r] == usize::MAX {
            cluster_of_root[r] = members.len();
            members.push(Vec::new());
        }
        members[cluster_of_root[r]].push(i);
    }

    let mut support = Vec::new();
    let mut diagnostics = Vec::new();
    for group in &members {
        let mut rows = Vec::with_capacity(k);
        let mut row_counts = Vec::with_capacity(k);
        let mut row_tv_error = Vec::with_capacity(k);
        for y in 0..k {
            let observed: Vec<&Distribution> = group.iter().filter_map(|&i| estimates[i].rows[y].as_ref()).collect();
            let total: usize = group.iter().map(|&i| counts[i][y]).sum();
            row_counts.push(total);
            if observed.is_empty() {
                rows.push(None);
                row_tv_error.push(None);
                continue;
            }
            let mut mean = vec![0.0; k];
            for d in &observed {
                for (m, w) in mean.iter_mut().zip(d.weights()) {
                    *m += w / observed.len() as f64;
                }
            }
            let mean = Distribution::normalized(mean);
            let err = 0.5 * mean.weights().iter().map(|&p| (p * (1.0 - p) / total as f64).sqrt()).sum::<f64>();
            row_tv_error.push(Some(err));
            rows.push(Some(mean));
        }
        support.push(RecoveredMatrix { rows });
        diagnostics.push(ClusterDiagnostics { members: group.len(), row_counts, row_tv_error });
    }
    let weights = members.iter().map(|g| g.len() as f64 / n as f64).collect();
    Ok(RecoveredMixingMeasure { alphabet: alphabet.clone(), support, weights, diagnostics })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowTest {
    pub key: usize,
    pub length: usize,
    /// Number of adjacent equal pairs.
    pub statistic: usize,
    /// Exact expectation of the statistic under uniformly random reordering.
    pub null_mean: f64,
    pub p_value: f64,
    pub reject: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExchangeabilityReport {
    pub rows: Vec<RowTest>,
    /// Rows too short to test.
    pub skipped: Vec<usize>,
    pub level: f64,
    /// Per-row level after Bonferroni correction.
    pub corrected_level: f64,
    pub reject: bool,
}

fn adjacent_equal(row: &[Symbol]) -> usize {
    row.windows(2).filter(|w| w[0] == w[1]).count()
}

/// Two-sided permutation test of exchangeability for one row.
///
/// Conditional on the symbol counts every ordering of an exchangeable row is equally likely,
/// so the reference distribution is obtained by reshuffling the row. The p-value counts
/// reshuffles at least as far from the null mean as the observed statistic, with add-one
/// smoothing.
pub fn test_row_exchangeability(row: &[Symbol], permutations: usize, src: RandomSource, level: f64) -> Result<RowTest> {
    if row.len() < MIN_TEST_ROW_LEN {
        return Err(Error::RowTooShort { len: row.len(), min: MIN_TEST_ROW_LEN });
    }
    let len = row.len() as f64;
    let k = row.iter().copied().max().unwrap_or(0) + 1;
    let mut counts = vec![0usize; k];
    for &y in row {
        counts[y] += 1;
    }
    let null_mean = counts.iter().map(|&c| (c * c.saturating_sub(1)) as f64).sum::<f64>() / len;
    let statistic = adjacent_equal(row);
    let observed = (statistic as f64 - null_mean).abs();

    let mut rng = src.rng();
    let mut work = row.to_vec();
    let mut extreme = 0usize;
    for _ in 0..permutations {
        work.shuffle(&mut rng);
        if (adjacent_equal(&work) as f64 - null_mean).abs() >= observed - 1e-9 {
            extreme += 1;
        }
    }
    let p_value = (1 + extreme) as f64 / (1 + permutations) as f64;
    Ok(RowTest { key: 0, length: row.len(), statistic, null_mean, p_value, reject: p_value <= level })
}

/// Tests every row with at least [`MIN_TEST_ROW_LEN`] entries, Bonferroni-corrected across
/// rows. Row `key` draws from stream `src.stream + key`.
pub fn test_partial_exchangeability(arr: &SuccessorsArray, level: f64, permutations: usize, src: RandomSource) -> Result<ExchangeabilityReport> {
    let testable: Vec<usize> = (0..arr.rows.len()).filter(|&y| arr.rows[y].len() >= MIN_TEST_ROW_LEN).collect();
    if testable.is_empty() {
        return Err(Error::NoTestableRows { min: MIN_TEST_ROW_LEN });
    }
    let corrected_level = level / testable.len() as f64;
    let mut rows = Vec::with_capacity(testable.len());
    for &y in &testable {
        let stream = src.stream.wrapping_add(y as u64);
        let mut r = test_row_exchangeability(&arr.rows[y], permutations, src.with_stream(stream), corrected_level)?;
        r.key = y;
        rows.push(r);
    }
    let skipped = (0..arr.rows.len()).filter(|y| !testable.contains(y)).collect();
    let reject = rows.iter().any(|r| r.reject);
    Ok(ExchangeabilityReport { rows, skipped, level, corrected_level, reject })
}

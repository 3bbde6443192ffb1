//! Domain types for the four model classes and their validation.
//!
//! Symbols are indexed `0..alphabet.len()` over the emitting symbols only. The fictitious
//! symbol ∂ (spelled `@del` in files) is reserved: it is never a member of a model alphabet
//! and never carries emission mass.

mod format;
mod laws;

pub use format::{load_model, model_from_json, model_to_json, ModelFile};
pub use laws::{hmm_law, iid_mixture_law, markov_mixture_law, partitioned_mixture_law};

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain;

/// Label of the fictitious symbol ∂.
pub const DEL_LABEL: &str = "@del";

/// Row sums must match 1 within this tolerance.
pub const STOCHASTIC_TOL: f64 = 1e-12;

pub type Symbol = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alphabet(pub Vec<String>);

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Alphabet(labels.into_iter().map(Into::into).collect())
    }

    /// Alphabet with labels `"1"`, `"2"`, ... `"n"`.
    pub fn numbered(n: usize) -> Self {
        Alphabet((1..=n).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn label(&self, s: Symbol) -> &str {
        &self.0[s]
    }

    pub fn index(&self, label: &str) -> Option<Symbol> {
        self.0.iter().position(|l| l == label)
    }

    pub fn labels(&self) -> &[String] {
        &self.0
    }

    fn violations(&self, field: &str, out: &mut Vec<Violation>) {
        if self.0.is_empty() {
            out.push(Violation::new(field, "alphabet is empty"));
        }
        let mut seen = HashSet::new();
        for label in &self.0 {
            if label == DEL_LABEL {
                out.push(Violation::new(field, format!("{DEL_LABEL} is reserved for the fictitious symbol")));
            }
            if label.is_empty() || label.chars().any(char::is_whitespace) {
                out.push(Violation::new(field, format!("label {label:?} is empty or contains whitespace")));
            }
            if !seen.insert(label) {
                out.push(Violation::new(field, format!("label {label:?} is duplicated")));
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Distribution(pub Vec<f64>);

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Self {
        Distribution(weights)
    }

    pub fn point(n: usize, at: usize) -> Self {
        let mut w = vec![0.0; n];
        w[at] = 1.0;
        Distribution(w)
    }

    pub fn uniform(n: usize) -> Self {
        Distribution(vec![1.0 / n as f64; n])
    }

    /// Normalizes nonnegative weights to sum to one.
    pub fn normalized(mut weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Distribution(weights)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn total_variation(&self, other: &Distribution) -> f64 {
        0.5 * self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> usize {
        crate::rng::sample_index(&self.0, rng)
    }

    pub(crate) fn violations(&self, field: &str, len: usize, out: &mut Vec<Violation>) {
        if self.0.len() != len {
            out.push(Violation::new(field, format!("has {} entries, expected {len}", self.0.len())));
            return;
        }
        for (i, &w) in self.0.iter().enumerate() {
            if !(w >= 0.0 && w.is_finite()) {
                out.push(Violation::new(field, format!("entry {i} = {w} is not a nonnegative number")));
            }
        }
        let total: f64 = self.0.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            out.push(Violation::new(field, format!("sums to {total}")));
        }
    }
}

/// Row-stochastic square matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StochasticMatrix(pub Vec<Vec<f64>>);

impl StochasticMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Self {
        StochasticMatrix(rows)
    }

    pub fn identity(n: usize) -> Self {
        StochasticMatrix((0..n).map(|i| Distribution::point(n, i).0).collect())
    }

    pub fn from_rows(rows: Vec<Distribution>) -> Self {
        StochasticMatrix(rows.into_iter().map(|d| d.0).collect())
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.0[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn mul(&self, other: &StochasticMatrix) -> StochasticMatrix {
        let n = self.size();
        let mut out = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                let a = self.0[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += a * other.0[k][j];
                }
            }
        }
        StochasticMatrix(out)
    }

    pub fn max_abs_diff(&self, other: &StochasticMatrix) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Block-diagonal assembly of `blocks` in order.
    pub fn direct_sum(blocks: &[StochasticMatrix]) -> StochasticMatrix {
        let n: usize = blocks.iter().map(StochasticMatrix::size).sum();
        let mut out = vec![vec![0.0; n]; n];
        let mut offset = 0;
        for b in blocks {
            for (i, row) in b.0.iter().enumerate() {
                out[offset + i][offset..offset + b.size()].copy_from_slice(row);
            }
            offset += b.size();
        }
        StochasticMatrix(out)
    }

    fn violations(&self, field: &str, out: &mut Vec<Violation>) {
        let n = self.0.len();
        if n == 0 {
            out.push(Violation::new(field, "matrix is empty"));
        }
        for (i, row) in self.0.iter().enumerate() {
            Distribution(row.clone()).violations(&format!("{field} row {i}"), n, out);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HmmModel {
    pub hidden_states: Vec<String>,
    pub alphabet: Alphabet,
    pub initial: Distribution,
    pub transition: StochasticMatrix,
    /// `readout[x]` is the emission law f_x over the alphabet.
    pub readout: Vec<Distribution>,
}

impl HmmModel {
    pub fn n_hidden(&self) -> usize {
        self.hidden_states.len()
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        self.alphabet.violations("alphabet", &mut out);
        let n = self.hidden_states.len();
        if n == 0 {
            out.push(Violation::new("hidden_states", "no hidden states"));
        }
        if self.hidden_states.iter().collect::<HashSet<_>>().len() != n {
            out.push(Violation::new("hidden_states", "labels are not unique"));
        }
        self.initial.violations("initial", n, &mut out);
        if self.transition.size() != n {
            out.push(Violation::new("transition", format!("is {0}x{0}, expected {n}x{n}", self.transition.size())));
        } else {
            self.transition.violations("transition", &mut out);
        }
        if self.readout.len() != n {
            out.push(Violation::new("readout", format!("has {} rows, expected {n}", self.readout.len())));
        }
        for (x, f) in self.readout.iter().enumerate() {
            f.violations(&format!("readout row {x}"), self.alphabet.len(), &mut out);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkovMixtureModel {
    pub alphabet: Alphabet,
    pub weights: Distribution,
    pub components: Vec<StochasticMatrix>,
    pub y0: Symbol,
}

impl MarkovMixtureModel {
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        self.alphabet.violations("alphabet", &mut out);
        let k = self.alphabet.len();
        self.weights.violations("weights", self.components.len(), &mut out);
        positive_weights(&self.weights, &mut out);
        if self.y0 >= k {
            out.push(Violation::new("y0", "start symbol outside the alphabet"));
        }
        for (h, p) in self.components.iter().enumerate() {
            let field = format!("component {h}");
            if p.size() != k {
                out.push(Violation::new(&field, format!("is {0}x{0}, expected {k}x{k}", p.size())));
                continue;
            }
            let before = out.len();
            p.violations(&field, &mut out);
            if out.len() == before && self.y0 < k && !chain::is_recurrent(p, &[self.y0]) {
                out.push(Violation::new(&field, "has transient states reachable from y0"));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IidMixtureModel {
    pub alphabet: Alphabet,
    pub weights: Distribution,
    pub components: Vec<Distribution>,
}

impl IidMixtureModel {
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        self.alphabet.violations("alphabet", &mut out);
        self.weights.violations("weights", self.components.len(), &mut out);
        positive_weights(&self.weights, &mut out);
        for (h, p) in self.components.iter().enumerate() {
            p.violations(&format!("component {h}"), self.alphabet.len(), &mut out);
        }
        out
    }
}

/// Mixture of Markov chains on a finite fine alphabet whose kernels depend on the current
/// symbol only through the partition cell containing it.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionedKernelMixture {
    pub alphabet: Alphabet,
    /// Cells E_1, E_2, ... (E_0 = {∂} is implicit). `cells[0]` must contain `y0`.
    pub cells: Vec<Vec<Symbol>>,
    pub weights: Distribution,
    /// `kernels[h][j]` is t_h(j+1, ·) over the fine alphabet.
    pub kernels: Vec<Vec<Distribution>>,
    pub y0: Symbol,
}

impl PartitionedKernelMixture {
    /// Cell position (0-based, i.e. E_{j+1}) of every symbol. Panics on an invalid partition.
    pub fn cell_of(&self) -> Vec<usize> {
        let mut cell = vec![usize::MAX; self.alphabet.len()];
        for (j, members) in self.cells.iter().enumerate() {
            for &s in members {
                cell[s] = j;
            }
        }
        cell
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        self.alphabet.violations("alphabet", &mut out);
        let k = self.alphabet.len();
        let mut count = vec![0usize; k];
        for (j, members) in self.cells.iter().enumerate() {
            if members.is_empty() {
                out.push(Violation::new("cells", format!("cell {} is empty", j + 1)));
            }
            for &s in members {
                if s >= k {
                    out.push(Violation::new("cells", format!("cell {} has symbol {s} outside the alphabet", j + 1)));
                } else {
                    count[s] += 1;
                }
            }
        }
        for (s, &c) in count.iter().enumerate() {
            if c != 1 {
                out.push(Violation::new("cells", format!("symbol {} is covered {c} times", self.alphabet.0[s])));
            }
        }
        if self.y0 >= k || !self.cells.first().is_some_and(|c| c.contains(&self.y0)) {
            out.push(Violation::new("y0", "start symbol is not in the first cell"));
        }
        self.weights.violations("weights", self.kernels.len(), &mut out);
        positive_weights(&self.weights, &mut out);
        for (h, table) in self.kernels.iter().enumerate() {
            if table.len() != self.cells.len() {
                out.push(Violation::new(
                    format!("kernel {h}"),
                    format!("has {} rows, expected one per cell ({})", table.len(), self.cells.len()),
                ));
            }
            for (j, t) in table.iter().enumerate() {
                t.violations(&format!("kernel {h} cell {}", j + 1), k, &mut out);
            }
        }
        out
    }
}

fn positive_weights(weights: &Distribution, out: &mut Vec<Violation>) {
    for (h, &w) in weights.0.iter().enumerate() {
        if w <= 0.0 {
            out.push(Violation::new("weights", format!("weight {h} not strictly positive")));
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Hmm(HmmModel),
    MarkovMixture(MarkovMixtureModel),
    IidMixture(IidMixtureModel),
    Partitioned(PartitionedKernelMixture),
}

impl Model {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            Model::Hmm(m) => &m.alphabet,
            Model::MarkovMixture(m) => &m.alphabet,
            Model::IidMixture(m) => &m.alphabet,
            Model::Partitioned(m) => &m.alphabet,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Hmm(_) => "hmm",
            Model::MarkovMixture(_) => "markov_mixture",
            Model::IidMixture(_) => "iid_mixture",
            Model::Partitioned(_) => "partitioned_kernel_mixture",
        }
    }

    /// Index of the first time covered by this model's finite-dimensional laws: 0 for models
    /// with a random Y_0, 1 for models started at a fixed y0.
    pub fn law_first_index(&self) -> usize {
        match self {
            Model::Hmm(_) | Model::IidMixture(_) => 0,
            Model::MarkovMixture(_) | Model::Partitioned(_) => 1,
        }
    }

    pub fn law(&self, horizon: usize, budget: usize) -> crate::Result<crate::FiniteLaw> {
        match self {
            Model::Hmm(m) => hmm_law(m, horizon, budget),
            Model::MarkovMixture(m) => markov_mixture_law(m, horizon, budget),
            Model::IidMixture(m) => iid_mixture_law(m, horizon, budget),
            Model::Partitioned(m) => partitioned_mixture_law(m, horizon, budget),
        }
    }
}

/// One failed invariant, naming the field it concerns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.field, self.message)
    }
}

pub fn validate_model(model: &Model) -> Vec<Violation> {
    match model {
        Model::Hmm(m) => m.violations(),
        Model::MarkovMixture(m) => m.violations(),
        Model::IidMixture(m) => m.violations(),
        Model::Partitioned(m) => m.violations(),
    }
}

pub(crate) fn ensure_valid(violations: Vec<Violation>) -> crate::Result<()> {
    if violations.is_empty() {
        Ok(())
    } else {
        Err(crate::Error::InvalidModel(violations.iter().map(ToString::to_string).collect()))
    }
}

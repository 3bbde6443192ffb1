use super::{ensure_valid, HmmModel, IidMixtureModel, MarkovMixtureModel, PartitionedKernelMixture};
use crate::{FiniteLaw, Result};

/// Per-component weights of a prefix together with its last symbol.
struct MixturePrefix {
    weights: Vec<f64>,
    last: usize,
}

fn scaled(weights: &[f64], factor: impl Fn(usize) -> f64) -> Option<Vec<f64>> {
    let next: Vec<f64> = weights.iter().enumerate().map(|(h, &w)| if w == 0.0 { 0.0 } else { w * factor(h) }).collect();
    next.iter().any(|&w| w != 0.0).then_some(next)
}

/// Law of `y_0..y_N`: Σ_h μ_h Π_n p_h(y_n).
pub fn iid_mixture_law(m: &IidMixtureModel, horizon: usize, budget: usize) -> Result<FiniteLaw> {
    ensure_valid(m.violations())?;
    FiniteLaw::enumerate(
        m.alphabet.clone(),
        0,
        horizon,
        budget,
        1,
        m.weights.0.clone(),
        |w, _, y| scaled(w, |h| m.components[h].0[y]),
        |w| w.iter().sum(),
    )
}

/// Law of `y_1..y_N` given Y_0 = y0: Σ_h μ_h P^h(y0,y1) ... P^h(y_{N-1},y_N).
pub fn markov_mixture_law(m: &MarkovMixtureModel, horizon: usize, budget: usize) -> Result<FiniteLaw> {
    ensure_valid(m.violations())?;
    FiniteLaw::enumerate(
        m.alphabet.clone(),
        1,
        horizon,
        budget,
        1,
        MixturePrefix { weights: m.weights.0.clone(), last: m.y0 },
        |p, _, y| {
            scaled(&p.weights, |h| m.components[h].get(p.last, y)).map(|weights| MixturePrefix { weights, last: y })
        },
        |p| p.weights.iter().sum(),
    )
}

/// Law of `y_1..y_N` given Y_0 = y0 for cell-indexed kernels:
/// Σ_h μ_h t_h(1, y_1) t_h(cell(y_1), y_2) ... t_h(cell(y_{N-1}), y_N).
pub fn partitioned_mixture_law(m: &PartitionedKernelMixture, horizon: usize, budget: usize) -> Result<FiniteLaw> {
    ensure_valid(m.violations())?;
    let cell = m.cell_of();
    FiniteLaw::enumerate(
        m.alphabet.clone(),
        1,
        horizon,
        budget,
        1,
        MixturePrefix { weights: m.weights.0.clone(), last: m.y0 },
        |p, _, y| {
            let j = cell[p.last];
            scaled(&p.weights, |h| m.kernels[h][j].0[y]).map(|weights| MixturePrefix { weights, last: y })
        },
        |p| p.weights.iter().sum(),
    )
}

/// Law of `y_0..y_N` by the forward recursion: the prefix state is the vector
/// α_x = P(y_0..y_n, X_n = x).
pub fn hmm_law(m: &HmmModel, horizon: usize, budget: usize) -> Result<FiniteLaw> {
    ensure_valid(m.violations())?;
    let n = m.n_hidden();
    let p = &m.transition;
    FiniteLaw::enumerate(
        m.alphabet.clone(),
        0,
        horizon,
        budget,
        n,
        Vec::new(),
        |alpha: &Vec<f64>, depth, y| {
            let next: Vec<f64> = if depth == 0 {
                (0..n).map(|x| m.initial.0[x] * m.readout[x].0[y]).collect()
            } else {
                (0..n)
                    .map(|x| {
                        let f = m.readout[x].0[y];
                        if f == 0.0 {
                            return 0.0;
                        }
                        f * alpha.iter().enumerate().map(|(z, &a)| a * p.get(z, x)).sum::<f64>()
                    })
                    .collect()
            };
            next.iter().any(|&a| a != 0.0).then_some(next)
        },
        |alpha| alpha.iter().sum(),
    )
}

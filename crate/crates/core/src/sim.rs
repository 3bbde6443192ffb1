//! Seeded sampling of trajectories from any model class.

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;

use crate::model::{
    ensure_valid, validate_model, Alphabet, HmmModel, IidMixtureModel, MarkovMixtureModel, Model,
    PartitionedKernelMixture, Symbol,
};
use crate::{Error, FiniteLaw, RandomSource, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub symbols: Vec<Symbol>,
    /// Hidden states aligned with `symbols`, when requested from an HMM.
    pub hidden: Option<Vec<usize>>,
    pub seed: u64,
}

impl Trajectory {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Trajectory { symbols, hidden: None, seed: 0 }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Draws one trajectory of `length` symbols `Y_0..Y_{length-1}`.
///
/// Mixtures draw the component once per trajectory and then run it; Markov and partitioned
/// mixtures start at `y0`.
pub fn sample(model: &Model, length: usize, src: RandomSource, trace_hidden: bool) -> Result<Trajectory> {
    ensure_valid(validate_model(model))?;
    if length == 0 {
        return Err(Error::TrajectoryTooShort { min: 1, got: 0 });
    }
    Ok(sample_unchecked(model, length, src, trace_hidden))
}

/// Trajectory `i` of the batch uses stream `src.stream + i`.
pub fn sample_batch(model: &Model, length: usize, count: usize, src: RandomSource, trace_hidden: bool) -> Result<Vec<Trajectory>> {
    ensure_valid(validate_model(model))?;
    if length == 0 {
        return Err(Error::TrajectoryTooShort { min: 1, got: 0 });
    }
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| sample_unchecked(model, length, src.with_stream(src.stream.wrapping_add(i)), trace_hidden))
        .collect())
}

pub(crate) fn sample_unchecked(model: &Model, length: usize, src: RandomSource, trace_hidden: bool) -> Trajectory {
    let mut rng = src.rng();
    let (symbols, hidden) = match model {
        Model::Hmm(m) => {
            let (ys, xs) = sample_hmm(m, length, &mut rng);
            (ys, trace_hidden.then_some(xs))
        }
        Model::MarkovMixture(m) => (sample_markov(m, length, &mut rng), None),
        Model::IidMixture(m) => (sample_iid(m, length, &mut rng), None),
        Model::Partitioned(m) => (sample_partitioned(m, length, &mut rng), None),
    };
    Trajectory { symbols, hidden, seed: src.seed }
}

pub(crate) fn sample_hmm<R: Rng + ?Sized>(m: &HmmModel, length: usize, rng: &mut R) -> (Vec<Symbol>, Vec<usize>) {
    let mut xs = Vec::with_capacity(length);
    let mut ys = Vec::with_capacity(length);
    let mut x = m.initial.sample(rng);
    for t in 0..length {
        if t > 0 {
            x = crate::rng::sample_index(m.transition.row(x), rng);
        }
        xs.push(x);
        ys.push(m.readout[x].sample(rng));
    }
    (ys, xs)
}

fn sample_markov<R: Rng + ?Sized>(m: &MarkovMixtureModel, length: usize, rng: &mut R) -> Vec<Symbol> {
    let p = &m.components[m.weights.sample(rng)];
    let mut ys = Vec::with_capacity(length);
    let mut y = m.y0;
    ys.push(y);
    while ys.len() < length {
        y = crate::rng::sample_index(p.row(y), rng);
        ys.push(y);
    }
    ys
}

fn sample_iid<R: Rng + ?Sized>(m: &IidMixtureModel, length: usize, rng: &mut R) -> Vec<Symbol> {
    let p = &m.components[m.weights.sample(rng)];
    (0..length).map(|_| p.sample(rng)).collect()
}

fn sample_partitioned<R: Rng + ?Sized>(m: &PartitionedKernelMixture, length: usize, rng: &mut R) -> Vec<Symbol> {
    let cell = m.cell_of();
    let t = &m.kernels[m.weights.sample(rng)];
    let mut ys = Vec::with_capacity(length);
    let mut y = m.y0;
    ys.push(y);
    while ys.len() < length {
        y = t[cell[y]].sample(rng);
        ys.push(y);
    }
    ys
}

/// Relative frequencies of the strings `y_first..y_horizon` across trajectories.
pub fn empirical_law(trajectories: &[Trajectory], alphabet: &Alphabet, first_index: usize, horizon: usize) -> Result<FiniteLaw> {
    if trajectories.is_empty() {
        return Err(Error::EmptyInput("no trajectories".into()));
    }
    if horizon < first_index.max(1) {
        return Err(Error::HorizonTooSmall { min: first_index.max(1), got: horizon });
    }
    let k = alphabet.len() as u64;
    let mut counts = std::collections::BTreeMap::new();
    for t in trajectories {
        if t.len() < horizon + 1 {
            return Err(Error::TrajectoryTooShort { min: horizon + 1, got: t.len() });
        }
        let idx = t.symbols[first_index..=horizon].iter().fold(0u64, |acc, &y| acc * k + y as u64);
        *counts.entry(idx).or_insert(0usize) += 1;
    }
    let n = trajectories.len() as f64;
    let table = counts.into_iter().map(|(i, c)| (i, c as f64 / n)).collect();
    Ok(FiniteLaw::from_sparse(alphabet.clone(), first_index, horizon, table))
}

/// One line of space-separated labels per trajectory; a traced hidden path follows on a line
/// starting with `# hidden:`.
pub fn format_trajectories(trajectories: &[Trajectory], alphabet: &Alphabet, hidden_labels: Option<&[String]>) -> String {
    let mut out = String::new();
    for t in trajectories {
        let line: Vec<&str> = t.symbols.iter().map(|&y| alphabet.label(y)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
        if let (Some(xs), Some(labels)) = (&t.hidden, hidden_labels) {
            let line: Vec<&str> = xs.iter().map(|&x| labels[x].as_str()).collect();
            out.push_str("# hidden: ");
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Parses trajectory lines. Without an alphabet, the sorted set of labels seen is used.
pub fn parse_trajectories(text: &str, alphabet: Option<&Alphabet>) -> Result<(Alphabet, Vec<Trajectory>)> {
    let lines: Vec<Vec<&str>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().collect())
        .collect();
    let alphabet = match alphabet {
        Some(a) => a.clone(),
        None => {
            let labels: BTreeSet<&str> = lines.iter().flatten().copied().collect();
            Alphabet::new(labels)
        }
    };
    let trajectories = lines
        .iter()
        .map(|l| {
            l.iter()
                .map(|s| alphabet.index(s).ok_or_else(|| Error::UnknownSymbol(s.to_string())))
                .collect::<Result<Vec<_>>>()
                .map(Trajectory::new)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((alphabet, trajectories))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_law::total_variation;
    use crate::model::{hmm_law, Distribution, StochasticMatrix};

    fn chain_hmm(p: Vec<Vec<f64>>, readout: Vec<Distribution>, initial: Distribution) -> HmmModel {
        let n = p.len();
        HmmModel {
            hidden_states: (1..=n).map(|i| i.to_string()).collect(),
            alphabet: Alphabet::new(["a", "b"]),
            initial,
            transition: StochasticMatrix::new(p),
            readout,
        }
    }

    #[test]
    fn deterministic_single_state() {
        let m = Model::Hmm(chain_hmm(vec![vec![1.0]], vec![Distribution::point(2, 0)], Distribution::point(1, 0)));
        let t = sample(&m, 5, RandomSource::new(1, 0), false).unwrap();
        assert_eq!(t.symbols, vec![0; 5]);
    }

    #[test]
    fn two_cycle_alternates() {
        let m = Model::Hmm(chain_hmm(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![Distribution::point(2, 0), Distribution::point(2, 1)],
            Distribution::point(2, 0),
        ));
        let t = sample(&m, 6, RandomSource::new(9, 0), true).unwrap();
        assert_eq!(t.symbols, vec![0, 1, 0, 1, 0, 1]);
        assert_eq!(t.hidden.as_ref().unwrap().len(), 6);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let m = Model::Hmm(chain_hmm(
            vec![vec![0.7, 0.3], vec![0.4, 0.6]],
            vec![Distribution::new(vec![0.9, 0.1]), Distribution::new(vec![0.2, 0.8])],
            Distribution::uniform(2),
        ));
        let a = sample(&m, 200, RandomSource::new(42, 3), true).unwrap();
        let b = sample(&m, 200, RandomSource::new(42, 3), true).unwrap();
        assert_eq!(a, b);
        let c = sample(&m, 200, RandomSource::new(42, 4), true).unwrap();
        assert_ne!(a.symbols, c.symbols);
    }

    #[test]
    fn empirical_single_string() {
        let law = empirical_law(&[Trajectory::new(vec![0, 0])], &Alphabet::new(["a", "b"]), 0, 1).unwrap();
        assert_eq!(law.prob_of(&["a", "a"]), 1.0);
        assert!(empirical_law(&[], &Alphabet::new(["a"]), 0, 1).is_err());
    }

    #[test]
    fn fair_coin_frequencies() {
        let m = Model::IidMixture(IidMixtureModel {
            alphabet: Alphabet::new(["h", "t"]),
            weights: Distribution::new(vec![1.0]),
            components: vec![Distribution::uniform(2)],
        });
        let ts = sample_batch(&m, 2, 100_000, RandomSource::new(5, 0), false).unwrap();
        let law = empirical_law(&ts, m.alphabet(), 0, 1).unwrap();
        let first = crate::exact_law::marginalize_last(&law).unwrap();
        assert!((first.prob(&[0]) - 0.5).abs() < 0.01);
        assert!((law.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_hmm_law_is_close_to_exact() {
        let hmm = chain_hmm(
            vec![vec![0.7, 0.3], vec![0.4, 0.6]],
            vec![Distribution::new(vec![0.9, 0.1]), Distribution::new(vec![0.2, 0.8])],
            Distribution::new(vec![0.5, 0.5]),
        );
        let exact = hmm_law(&hmm, 3, 1 << 20).unwrap();
        let m = Model::Hmm(hmm);
        let samples = 100_000;
        let ts = sample_batch(&m, 4, samples, RandomSource::new(11, 0), false).unwrap();
        let emp = empirical_law(&ts, m.alphabet(), 0, 3).unwrap();
        let tv = total_variation(&exact, &emp).unwrap();
        let bound = 3.0 * (exact.n_strings() as f64 / samples as f64).sqrt();
        assert!(tv <= bound.min(0.02), "tv {tv}");
    }

    #[test]
    fn trajectory_text_roundtrip() {
        let a = Alphabet::new(["x", "y"]);
        let mut t = Trajectory::new(vec![0, 1, 1]);
        t.hidden = Some(vec![1, 0, 0]);
        let text = format_trajectories(&[t.clone()], &a, Some(&["s".into(), "u".into()]));
        assert_eq!(text, "x y y\n# hidden: u s s\n");
        let (alpha, parsed) = parse_trajectories(&text, None).unwrap();
        assert_eq!(alpha, a);
        assert_eq!(parsed[0].symbols, t.symbols);
    }
}

use std::collections::BTreeMap;

use markmix_core::model::{Alphabet, Distribution, HmmModel, Model, StochasticMatrix};
use markmix_core::sim::sample_batch;
use markmix_core::stopping::{check_splitting, check_strong_splitting, HittingTimeSpec};
use markmix_core::{Config, RandomSource};
use proptest::prelude::*;

/// Two recurrence classes {0, 1} and {2}; symbol c is only emitted from state 2.
fn two_class() -> HmmModel {
    HmmModel {
        hidden_states: vec!["0".into(), "1".into(), "2".into()],
        alphabet: Alphabet::new(["a", "b", "c"]),
        initial: Distribution::new(vec![0.4, 0.3, 0.3]),
        transition: StochasticMatrix::new(vec![vec![0.6, 0.4, 0.0], vec![0.5, 0.5, 0.0], vec![0.0, 0.0, 1.0]]),
        readout: vec![
            Distribution::new(vec![0.8, 0.2, 0.0]),
            Distribution::new(vec![0.1, 0.9, 0.0]),
            Distribution::new(vec![0.3, 0.3, 0.4]),
        ],
    }
}

#[test]
fn visited_symbols_keep_recurring() {
    let m = Model::Hmm(two_class());
    let runs = sample_batch(&m, 2000, 300, RandomSource::new(41, 0), false).unwrap();
    let (mut seen, mut recurred) = (0usize, 0usize);
    for t in &runs {
        let (first, second) = t.symbols.split_at(1000);
        for y in 0..3 {
            if first.contains(&y) {
                seen += 1;
                recurred += usize::from(second.contains(&y));
            }
        }
    }
    assert!(seen > 500);
    assert!(recurred as f64 / seen as f64 >= 1.0 - 1e-3, "{recurred}/{seen}");
}

#[test]
fn states_after_visits_form_a_markov_chain() {
    let mut hmm = two_class();
    hmm.initial = Distribution::new(vec![0.5, 0.5, 0.0]);
    let m = Model::Hmm(hmm);
    let t = &sample_batch(&m, 400_000, 1, RandomSource::new(9, 0), true).unwrap()[0];
    let xs = t.hidden.as_ref().unwrap();
    for y in 0..2 {
        let w: Vec<usize> = (0..t.len() - 1).filter(|&i| t.symbols[i] == y).map(|i| xs[i + 1]).collect();
        let mut one: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut two: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
        for s in w.windows(3) {
            *one.entry((s[1], s[2])).or_insert(0) += 1;
            *two.entry((s[0], s[1], s[2])).or_insert(0) += 1;
        }
        let from = |map: &BTreeMap<(usize, usize), usize>, a: usize| -> usize { map.iter().filter(|((x, _), _)| *x == a).map(|(_, c)| c).sum() };
        for a in 0..2 {
            for b in 0..2 {
                let n2: usize = two.iter().filter(|((p, q, _), _)| *p == a && *q == b).map(|(_, c)| c).sum();
                let n1 = from(&one, b);
                if n2 < 50 {
                    continue;
                }
                for c in 0..2 {
                    let p2 = *two.get(&(a, b, c)).unwrap_or(&0) as f64 / n2 as f64;
                    let p1 = *one.get(&(b, c)).unwrap_or(&0) as f64 / n1 as f64;
                    let pooled = (p2 * n2 as f64 + p1 * n1 as f64) / (n1 + n2) as f64;
                    let se = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
                    assert!((p2 - p1).abs() <= 3.0 * se, "y={y} history ({a},{b}) → {c}: {p2} vs {p1}");
                }
            }
        }
    }
}

#[test]
fn strong_splitting_on_two_classes() {
    let spec = HittingTimeSpec::symbols(vec![0, 2]);
    let rs = check_strong_splitting(&two_class(), &spec, 2, 8, &Config::default()).unwrap();
    assert!(rs.iter().all(|r| r.pass));
}

fn row(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, n).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn splitting_holds_for_random_hmms(
        p in prop::collection::vec(row(2), 2),
        f in prop::collection::vec(row(3), 2),
        pi in row(2),
    ) {
        let m = HmmModel {
            hidden_states: vec!["u".into(), "v".into()],
            alphabet: Alphabet::new(["a", "b", "c"]),
            initial: Distribution::new(pi),
            transition: StochasticMatrix::new(p),
            readout: f.into_iter().map(Distribution::new).collect(),
        };
        let r = check_splitting(&m, 3, &Config::default()).unwrap();
        prop_assert!(r.pass);
        prop_assert!(r.max_gap <= 1e-12);
    }
}

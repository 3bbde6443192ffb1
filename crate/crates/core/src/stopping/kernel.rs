//! Joint one-step kernels of (hidden state, symbol) pairs.

use crate::model::{Alphabet, HmmModel, StochasticMatrix, Symbol};

/// A Markov chain on pairs (x, y) given by its initial law and one-step kernel.
///
/// Every HMM is one. Kernels that are not HMMs serve as negative controls for the checks.
pub trait JointKernel: Sync {
    fn n_hidden(&self) -> usize;
    fn alphabet(&self) -> &Alphabet;
    fn hidden_label(&self, x: usize) -> &str;
    fn initial(&self, x: usize, y: Symbol) -> f64;
    fn step(&self, x: usize, y: Symbol, x2: usize, y2: Symbol) -> f64;

    fn n_pairs(&self) -> usize {
        self.n_hidden() * self.alphabet().len()
    }

    /// Pair index x·|alphabet| + y.
    fn pair(&self, x: usize, y: Symbol) -> usize {
        x * self.alphabet().len() + y
    }

    fn unpair(&self, z: usize) -> (usize, Symbol) {
        (z / self.alphabet().len(), z % self.alphabet().len())
    }
}

impl JointKernel for HmmModel {
    fn n_hidden(&self) -> usize {
        self.hidden_states.len()
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn hidden_label(&self, x: usize) -> &str {
        &self.hidden_states[x]
    }

    fn initial(&self, x: usize, y: Symbol) -> f64 {
        self.initial.0[x] * self.readout[x].0[y]
    }

    fn step(&self, x: usize, _y: Symbol, x2: usize, y2: Symbol) -> f64 {
        self.transition.get(x, x2) * self.readout[x2].0[y2]
    }
}

/// Hidden chain of an HMM whose emission at each step also depends on the previously
/// emitted symbol: from time 1 on, Y_t is drawn from `readouts[Y_{t-1}]` row X_t.
///
/// The pair process stays Markov but the observations are no longer conditionally
/// independent given the hidden path, so the splitting identity fails.
#[derive(Clone, Debug)]
pub struct SymbolFeedbackKernel {
    pub base: HmmModel,
    /// `readouts[y]` has one row per hidden state.
    pub readouts: Vec<StochasticMatrix>,
}

impl SymbolFeedbackKernel {
    /// Two hidden states, symbols {a, b}; the read-out flips toward the last symbol seen.
    pub fn standard() -> Self {
        let base = HmmModel {
            hidden_states: vec!["0".into(), "1".into()],
            alphabet: Alphabet::new(["a", "b"]),
            initial: crate::model::Distribution::new(vec![0.5, 0.5]),
            transition: StochasticMatrix::new(vec![vec![0.7, 0.3], vec![0.4, 0.6]]),
            readout: vec![crate::model::Distribution::new(vec![0.6, 0.4]), crate::model::Distribution::new(vec![0.3, 0.7])],
        };
        let readouts = vec![
            StochasticMatrix::new(vec![vec![0.9, 0.1], vec![0.6, 0.4]]),
            StochasticMatrix::new(vec![vec![0.2, 0.8], vec![0.1, 0.9]]),
        ];
        SymbolFeedbackKernel { base, readouts }
    }
}

impl JointKernel for SymbolFeedbackKernel {
    fn n_hidden(&self) -> usize {
        self.base.hidden_states.len()
    }

    fn alphabet(&self) -> &Alphabet {
        &self.base.alphabet
    }

    fn hidden_label(&self, x: usize) -> &str {
        &self.base.hidden_states[x]
    }

    fn initial(&self, x: usize, y: Symbol) -> f64 {
        self.base.initial(x, y)
    }

    fn step(&self, x: usize, y: Symbol, x2: usize, y2: Symbol) -> f64 {
        self.base.transition.get(x, x2) * self.readouts[y].get(x2, y2)
    }
}

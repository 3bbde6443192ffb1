//! Conversions between mixtures and hidden Markov models.
//!
//! | from | to | underlying chain |
//! |------|----|------------------|
//! | i.i.d. mixture | HMM | identity on the component index |
//! | Markov mixture | HMM | direct sum of the components on S × H, δ read-outs |
//! | HMM (recurrent) | i.i.d. mixture | one component per recurrence class |
//! | partitioned kernel mixture | HMM | states (h, i, j): component, previous cell, current cell |
//! | HMM in the image of the Markov construction | Markov mixture | blocks of the direct sum |

use log::warn;

use crate::chain::{self, EDGE_THRESHOLD};
use crate::model::{
    ensure_valid, Distribution, HmmModel, IidMixtureModel, MarkovMixtureModel, PartitionedKernelMixture,
    StochasticMatrix,
};
use crate::{Error, Result};

/// Read-out entries must lie within this distance of 0 or 1 to count as a Kronecker delta.
pub const DELTA_TOL: f64 = 1e-12;

/// Hidden chain on the component index with identity transitions; π = weights, f_h = p_h.
pub fn iid_mixture_to_hmm(m: &IidMixtureModel) -> Result<HmmModel> {
    ensure_valid(m.violations())?;
    let n = m.components.len();
    Ok(HmmModel {
        hidden_states: (1..=n).map(|h| h.to_string()).collect(),
        alphabet: m.alphabet.clone(),
        initial: m.weights.clone(),
        transition: StochasticMatrix::identity(n),
        readout: m.components.clone(),
    })
}

/// Hidden state `h·|S| + y` stands for the pair (y, h): the first coordinate varies fastest.
pub fn markov_mixture_to_hmm(m: &MarkovMixtureModel) -> Result<HmmModel> {
    let k = m.alphabet.len();
    for (h, p) in m.components.iter().enumerate() {
        if p.size() == k && m.y0 < k && !chain::is_recurrent(p, &[m.y0]) {
            return Err(Error::NonRecurrentComponent { component: h });
        }
    }
    ensure_valid(m.violations())?;
    let n_comp = m.components.len();
    let mut hidden_states = Vec::with_capacity(k * n_comp);
    let mut initial = vec![0.0; k * n_comp];
    let mut readout = Vec::with_capacity(k * n_comp);
    for h in 0..n_comp {
        for y in 0..k {
            hidden_states.push(format!("({},{})", m.alphabet.label(y), h + 1));
            readout.push(Distribution::point(k, y));
        }
        initial[h * k + m.y0] = m.weights.0[h];
    }
    Ok(HmmModel {
        hidden_states,
        alphabet: m.alphabet.clone(),
        initial: Distribution::new(initial),
        transition: StochasticMatrix::direct_sum(&m.components),
        readout,
    })
}

/// Lumps each recurrence class C_h into F_h = Σ_{x∈C_h} p^h_x f_x with weight π(C_h).
///
/// The output has the same law as the input whenever the input's output process is
/// exchangeable; this holds unconditionally when the chain has identical rows within each
/// class and π restricted to a class is proportional to that class's stationary law.
pub fn hmm_to_iid_mixture(m: &HmmModel) -> Result<IidMixtureModel> {
    ensure_valid(m.violations())?;
    let d = chain::decompose(&m.transition);
    if !d.transient.is_empty() {
        return Err(Error::TransientStates(d.transient));
    }
    let k = m.alphabet.len();
    let mut weights = Vec::new();
    let mut components = Vec::new();
    for (h, (class, pi)) in d.classes.iter().zip(&d.stationary).enumerate() {
        let mass: f64 = class.iter().map(|&x| m.initial.0[x]).sum();
        if mass <= 0.0 {
            warn!("recurrence class {h} carries no initial mass; dropped");
            continue;
        }
        let mut f = vec![0.0; k];
        for (&x, &w) in class.iter().zip(pi.weights()) {
            for (fy, &r) in f.iter_mut().zip(m.readout[x].weights()) {
                *fy += w * r;
            }
        }
        weights.push(mass);
        components.push(Distribution::normalized(f));
    }
    Ok(IidMixtureModel { alphabet: m.alphabet.clone(), weights: Distribution::normalized(weights), components })
}

/// Hidden states (h, i, j): component h, cell i of the previous symbol, cell j of the current
/// symbol, indexed `(h·c + i)·c + j` for `c` cells before pruning.
///
/// The initial law is μ_h · i0_law(i) · δ_{j,1}; transitions are
/// δ_{h,h'} δ_{i',j} t_h(i', E_{j'}); the read-out of (h, i, j) is t_h(i, ·) restricted to E_j
/// and renormalized. Initial states with t_h(i, E_1) = 0 read out y0. States unreachable from
/// the initial support are pruned.
pub fn partitioned_mixture_to_hmm(m: &PartitionedKernelMixture, i0_law: &Distribution) -> Result<HmmModel> {
    if !m.cells.first().is_some_and(|c| c.contains(&m.y0)) {
        return Err(Error::StartNotInFirstCell);
    }
    ensure_valid(m.violations())?;
    let c = m.cells.len();
    if i0_law.len() != c {
        return Err(Error::InvalidModel(vec![format!("i0_law has {} entries, expected {c}", i0_law.len())]));
    }
    ensure_valid({
        let mut v = Vec::new();
        i0_law.violations("i0_law", c, &mut v);
        v
    })?;
    let k = m.alphabet.len();
    let n_comp = m.kernels.len();
    let n = n_comp * c * c;
    let index = |h: usize, i: usize, j: usize| (h * c + i) * c + j;
    // t_h(i, E_j)
    let cell_mass = |h: usize, i: usize, j: usize| m.cells[j].iter().map(|&y| m.kernels[h][i].0[y]).sum::<f64>();

    let mut initial = vec![0.0; n];
    let mut transition = vec![vec![0.0; n]; n];
    let mut readout = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for h in 0..n_comp {
        for i in 0..c {
            initial[index(h, i, 0)] = m.weights.0[h] * i0_law.0[i];
            for j in 0..c {
                let x = index(h, i, j);
                labels.push(format!("({},{},{})", h + 1, i + 1, j + 1));
                for j2 in 0..c {
                    transition[x][index(h, j, j2)] = cell_mass(h, j, j2);
                }
                let mass = cell_mass(h, i, j);
                let mut f = vec![0.0; k];
                if mass > 0.0 {
                    for &y in &m.cells[j] {
                        f[y] = m.kernels[h][i].0[y] / mass;
                    }
                } else {
                    f[m.y0] = 1.0;
                }
                readout.push(Distribution::new(f));
            }
        }
    }
    let full = HmmModel {
        hidden_states: labels,
        alphabet: m.alphabet.clone(),
        initial: Distribution::new(initial),
        transition: StochasticMatrix::new(transition),
        readout,
    };
    Ok(prune_unreachable(&full))
}

/// Drops hidden states that cannot be visited from the initial support.
pub fn prune_unreachable(m: &HmmModel) -> HmmModel {
    let support: Vec<usize> = (0..m.n_hidden()).filter(|&x| m.initial.0[x] > 0.0).collect();
    let keep: Vec<usize> = chain::reachable_from(&m.transition, &support)
        .into_iter()
        .enumerate()
        .filter_map(|(x, r)| r.then_some(x))
        .collect();
    HmmModel {
        hidden_states: keep.iter().map(|&x| m.hidden_states[x].clone()).collect(),
        alphabet: m.alphabet.clone(),
        initial: Distribution::new(keep.iter().map(|&x| m.initial.0[x]).collect()),
        transition: chain::restrict(&m.transition, &keep),
        readout: keep.iter().map(|&x| m.readout[x].clone()).collect(),
    }
}

/// Inverts [`markov_mixture_to_hmm`]: detects the S × H product layout with δ read-outs and a
/// block-diagonal chain and reads the components off the blocks.
pub fn hmm_to_markov_mixture_exact(m: &HmmModel) -> Result<MarkovMixtureModel> {
    ensure_valid(m.violations())?;
    let k = m.alphabet.len();
    let n = m.n_hidden();
    let not_detected = |why: String| Error::StructureNotDetected(why);
    if n % k != 0 {
        return Err(not_detected(format!("{n} hidden states is not a multiple of {k} symbols")));
    }
    for (x, f) in m.readout.iter().enumerate() {
        let expected = x % k;
        for (y, &w) in f.weights().iter().enumerate() {
            let target = if y == expected { 1.0 } else { 0.0 };
            if (w - target).abs() > DELTA_TOL {
                return Err(not_detected(format!("read-out of hidden state {x} is not a delta on symbol {expected}")));
            }
        }
    }
    let n_comp = n / k;
    for x in 0..n {
        let block = x / k;
        let off: f64 = (0..n).filter(|z| z / k != block).map(|z| m.transition.get(x, z)).sum();
        if off >= EDGE_THRESHOLD {
            return Err(not_detected(format!("hidden state {x} leaves its block with mass {off:e}")));
        }
    }
    let support: Vec<usize> = (0..n).filter(|&x| m.initial.0[x] > EDGE_THRESHOLD).collect();
    let y0 = support.first().map(|x| x % k).ok_or_else(|| not_detected("empty initial support".into()))?;
    if support.iter().any(|x| x % k != y0) {
        return Err(not_detected("initial law is not concentrated on a single start symbol".into()));
    }
    let mut weights = Vec::new();
    let mut components = Vec::new();
    for h in 0..n_comp {
        let mass = m.initial.0[h * k + y0];
        if mass <= EDGE_THRESHOLD {
            warn!("block {h} carries no initial mass; dropped");
            continue;
        }
        weights.push(mass);
        components.push(StochasticMatrix::from_rows(
            (0..k)
                .map(|y| Distribution::normalized((0..k).map(|z| m.transition.get(h * k + y, h * k + z)).collect()))
                .collect(),
        ));
    }
    let out = MarkovMixtureModel { alphabet: m.alphabet.clone(), weights: Distribution::normalized(weights), components, y0 };
    ensure_valid(out.violations())?;
    Ok(out)
}

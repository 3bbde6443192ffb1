//! Laws of (X, Y) values recorded at fixed and hitting times, exactly by forward enumeration
//! over the pair chain and empirically by simulation, plus a brute-force path oracle.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::kernel::JointKernel;
use crate::model::Symbol;
use crate::rng::sample_index;
use crate::{Error, RandomSource, Result};

/// When a slot records the pair (X_t, Y_t). Occurrences count from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    Fixed(usize),
    /// Time γ_occurrence + offset.
    Hit { occurrence: usize, offset: usize },
    /// Time γ_occurrence ∧ n.
    HitOrFixed { occurrence: usize, n: usize },
}

impl SlotKind {
    pub fn label(&self) -> String {
        match *self {
            SlotKind::Fixed(t) => t.to_string(),
            SlotKind::Hit { occurrence, offset: 0 } => format!("γ{occurrence}"),
            SlotKind::Hit { occurrence, offset } => format!("γ{occurrence}+{offset}"),
            SlotKind::HitOrFixed { occurrence, n } => format!("γ{occurrence}∧{n}"),
        }
    }

    fn occurrence(&self) -> usize {
        match *self {
            SlotKind::Fixed(_) => 0,
            SlotKind::Hit { occurrence, .. } | SlotKind::HitOrFixed { occurrence, .. } => occurrence,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum SlotState {
    Waiting,
    Pending(u32),
    Filled(u32),
}

/// Progress of the slots along one path prefix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Recorder {
    hits: u32,
    slots: Vec<SlotState>,
}

impl Recorder {
    pub(crate) fn new(n: usize) -> Self {
        Recorder { hits: 0, slots: vec![SlotState::Waiting; n] }
    }

    /// Records time `t` with current pair `z`; `hit` tells whether z lies in the target.
    pub(crate) fn advance(&mut self, kinds: &[SlotKind], max_occurrence: usize, t: usize, z: u32, hit: bool) {
        for s in &mut self.slots {
            if let SlotState::Pending(r) = *s {
                *s = if r == 1 { SlotState::Filled(z) } else { SlotState::Pending(r - 1) };
            }
        }
        let mut now = 0;
        if hit && (self.hits as usize) < max_occurrence {
            self.hits += 1;
            now = self.hits as usize;
        }
        for (s, kind) in self.slots.iter_mut().zip(kinds) {
            if *s != SlotState::Waiting {
                continue;
            }
            *s = match *kind {
                SlotKind::Fixed(t0) if t == t0 => SlotState::Filled(z),
                SlotKind::Hit { occurrence, offset } if now == occurrence => {
                    if offset == 0 {
                        SlotState::Filled(z)
                    } else {
                        SlotState::Pending(offset as u32)
                    }
                }
                SlotKind::HitOrFixed { occurrence, n } if (now == occurrence && t <= n) || t == n => SlotState::Filled(z),
                _ => SlotState::Waiting,
            };
        }
    }

    pub(crate) fn done(&self) -> bool {
        self.slots.iter().all(|s| matches!(s, SlotState::Filled(_)))
    }

    fn complete(&self) -> Vec<u32> {
        self.slots.iter().map(|s| if let SlotState::Filled(z) = s { *z } else { unreachable!() }).collect()
    }

    fn partial(&self) -> Vec<Option<u32>> {
        self.slots.iter().map(|s| if let SlotState::Filled(z) = s { Some(*z) } else { None }).collect()
    }
}

pub(crate) fn max_occurrence(kinds: &[SlotKind]) -> usize {
    kinds.iter().map(SlotKind::occurrence).max().unwrap_or(0)
}

/// Joint law of the pairs recorded by a list of slots.
///
/// `complete` holds paths on which every slot was recorded; `partial` holds the remaining
/// mass keyed by the slots recorded so far.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotLaw {
    pub kinds: Vec<SlotKind>,
    pub complete: Vec<(Vec<u32>, f64)>,
    pub partial: Vec<(Vec<Option<u32>>, f64)>,
    /// Sample count when the masses are empirical frequencies.
    pub samples: Option<usize>,
}

impl SlotLaw {
    pub fn complete_mass(&self) -> f64 {
        self.complete.iter().map(|(_, p)| p).sum()
    }

    pub fn residual(&self) -> f64 {
        self.partial.iter().map(|(_, p)| p).sum()
    }
}

fn step_table(k: &dyn JointKernel) -> Vec<Vec<(u32, f64)>> {
    let (nx, ny) = (k.n_hidden(), k.alphabet().len());
    (0..nx * ny)
        .map(|z| {
            let (x, y) = k.unpair(z);
            (0..nx * ny)
                .filter_map(|z2| {
                    let (x2, y2) = k.unpair(z2);
                    let w = k.step(x, y, x2, y2);
                    (w > 0.0).then_some((z2 as u32, w))
                })
                .collect()
        })
        .collect()
}

/// Exact law of the slots over paths of times 0..=horizon, by forward recursion on
/// (pair, recorder) states. Paths stop once every slot is recorded.
pub fn slot_law(k: &dyn JointKernel, in_target: &[bool], kinds: &[SlotKind], horizon: usize, budget: usize) -> Result<SlotLaw> {
    let max_occ = max_occurrence(kinds);
    let steps = step_table(k);
    let mut current: BTreeMap<(u32, Recorder), f64> = BTreeMap::new();
    for z in 0..k.n_pairs() {
        let (x, y) = k.unpair(z);
        let p = k.initial(x, y);
        if p > 0.0 {
            let mut rec = Recorder::new(kinds.len());
            rec.advance(kinds, max_occ, 0, z as u32, in_target[z]);
            *current.entry((z as u32, rec)).or_insert(0.0) += p;
        }
    }
    let mut complete: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    let mut partial: BTreeMap<Vec<Option<u32>>, f64> = BTreeMap::new();
    for t in 0..=horizon {
        let mut next: BTreeMap<(u32, Recorder), f64> = BTreeMap::new();
        for ((z, rec), p) in current {
            if rec.done() {
                *complete.entry(rec.complete()).or_insert(0.0) += p;
            } else if t == horizon {
                *partial.entry(rec.partial()).or_insert(0.0) += p;
            } else {
                for &(z2, w) in &steps[z as usize] {
                    let mut r2 = rec.clone();
                    r2.advance(kinds, max_occ, t + 1, z2, in_target[z2 as usize]);
                    *next.entry((z2, r2)).or_insert(0.0) += p * w;
                }
            }
        }
        if next.len() > budget {
            return Err(Error::EnumerationTooLarge { required: next.len() as f64, budget });
        }
        current = next;
    }
    Ok(SlotLaw { kinds: kinds.to_vec(), complete: complete.into_iter().collect(), partial: partial.into_iter().collect(), samples: None })
}

/// Empirical slot laws from `samples` simulated paths, each run until all slots of every
/// list are recorded or `max_steps` steps have elapsed. Sample i uses stream `src.stream + i`.
pub fn sample_slot_laws(
    k: &dyn JointKernel,
    in_target: &[bool],
    laws: &[Vec<SlotKind>],
    samples: usize,
    src: RandomSource,
    max_steps: usize,
) -> Vec<SlotLaw> {
    let n = k.n_pairs();
    let init: Vec<f64> = (0..n).map(|z| { let (x, y) = k.unpair(z); k.initial(x, y) }).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|z| {
            let (x, y) = k.unpair(z);
            (0..n).map(|z2| { let (x2, y2) = k.unpair(z2); k.step(x, y, x2, y2) }).collect()
        })
        .collect();
    let occ: Vec<usize> = laws.iter().map(|l| max_occurrence(l)).collect();
    let paths: Vec<Vec<Recorder>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = src.with_stream(src.stream.wrapping_add(i as u64)).rng();
            let mut recs: Vec<Recorder> = laws.iter().map(|l| Recorder::new(l.len())).collect();
            let mut z = sample_index(&init, &mut rng);
            let mut t = 0;
            loop {
                for ((r, l), &m) in recs.iter_mut().zip(laws).zip(&occ) {
                    r.advance(l, m, t, z as u32, in_target[z]);
                }
                if t == max_steps || recs.iter().all(Recorder::done) {
                    break recs;
                }
                z = sample_index(&rows[z], &mut rng);
                t += 1;
            }
        })
        .collect();
    let w = 1.0 / samples as f64;
    laws.iter()
        .enumerate()
        .map(|(j, kinds)| {
            let mut complete: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
            let mut partial: BTreeMap<Vec<Option<u32>>, f64> = BTreeMap::new();
            for recs in &paths {
                if recs[j].done() {
                    *complete.entry(recs[j].complete()).or_insert(0.0) += w;
                } else {
                    *partial.entry(recs[j].partial()).or_insert(0.0) += w;
                }
            }
            SlotLaw { kinds: kinds.clone(), complete: complete.into_iter().collect(), partial: partial.into_iter().collect(), samples: Some(samples) }
        })
        .collect()
}

/// Probability that the joint path (x_0^T, y_0^T) satisfies `event`, summing every path.
pub fn event_probability(
    k: &dyn JointKernel,
    horizon: usize,
    budget: usize,
    event: &(dyn Fn(&[usize], &[Symbol]) -> bool + Sync),
) -> Result<f64> {
    let n = k.n_pairs();
    let required = (n as f64).powi(horizon as i32 + 1);
    if required > budget as f64 {
        return Err(Error::EnumerationTooLarge { required, budget });
    }
    fn walk(
        k: &dyn JointKernel,
        horizon: usize,
        xs: &mut Vec<usize>,
        ys: &mut Vec<Symbol>,
        p: f64,
        event: &(dyn Fn(&[usize], &[Symbol]) -> bool + Sync),
    ) -> f64 {
        if xs.len() == horizon + 1 {
            return if event(xs, ys) { p } else { 0.0 };
        }
        let (x, y) = (*xs.last().unwrap(), *ys.last().unwrap());
        let mut total = 0.0;
        for z2 in 0..k.n_pairs() {
            let (x2, y2) = k.unpair(z2);
            let q = p * k.step(x, y, x2, y2);
            if q > 0.0 {
                xs.push(x2);
                ys.push(y2);
                total += walk(k, horizon, xs, ys, q, event);
                xs.pop();
                ys.pop();
            }
        }
        total
    }
    let parts: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|z| {
            let (x, y) = k.unpair(z);
            let p = k.initial(x, y);
            if p <= 0.0 {
                return 0.0;
            }
            walk(k, horizon, &mut vec![x], &mut vec![y], p, event)
        })
        .collect();
    Ok(parts.iter().sum())
}

//! Executable checks of the splitting and hitting-time identities satisfied by HMMs.
//!
//! Each check reduces an identity between conditional probabilities to the joint law of the
//! pairs (X, Y) recorded at a few fixed or hitting times. Exact mode computes that law by
//! enumeration up to a horizon; paths on which some hitting time falls beyond the horizon
//! form a residual whose mass widens the tolerance of every instance. Monte Carlo mode
//! estimates the same laws by simulation and compares at three binomial standard errors.
//!
//! Set-valued events Y ∈ S range over the singletons and the whole alphabet.

mod enumerate;
mod kernel;

use rayon::prelude::*;
use serde::Serialize;

pub use enumerate::{event_probability, sample_slot_laws, slot_law, SlotKind, SlotLaw};
pub use kernel::{JointKernel, SymbolFeedbackKernel};

use crate::model::{ensure_valid, HmmModel, Symbol};
use crate::{Config, Error, RandomSource, Result};

/// Minimum number of samples for Monte Carlo mode.
pub const MC_MIN_SAMPLES: usize = 10_000;
/// Monte Carlo instances whose conditioning events were sampled fewer times are skipped.
pub const MC_MIN_COUNT: usize = 30;
/// Simulated paths stop after this many steps even if some slot is still unrecorded.
pub const MC_MAX_STEPS: usize = 10_000;
/// Length of the fixed-time window checked by Monte Carlo mode.
pub const MC_SPLITTING_STEPS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Target {
    /// Times at which Y lies in the set.
    Symbols(Vec<Symbol>),
    /// Times at which (X, Y) is one of the pairs.
    Pairs(Vec<(usize, Symbol)>),
}

/// Target set A of the hitting times γ_1 < γ_2 < …, and the occurrence index used by the
/// single-stopping-time check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HittingTimeSpec {
    pub target: Target,
    pub occurrence: usize,
}

impl HittingTimeSpec {
    pub fn symbols(symbols: Vec<Symbol>) -> Self {
        HittingTimeSpec { target: Target::Symbols(symbols), occurrence: 1 }
    }

    pub fn pairs(pairs: Vec<(usize, Symbol)>) -> Self {
        HittingTimeSpec { target: Target::Pairs(pairs), occurrence: 1 }
    }

    pub fn contains(&self, x: usize, y: Symbol) -> bool {
        match &self.target {
            Target::Symbols(s) => s.contains(&y),
            Target::Pairs(ps) => ps.contains(&(x, y)),
        }
    }

    pub fn is_symbol_only(&self) -> bool {
        matches!(self.target, Target::Symbols(_))
    }

    fn in_target(&self, k: &dyn JointKernel) -> Vec<bool> {
        (0..k.n_pairs()).map(|z| { let (x, y) = k.unpair(z); self.contains(x, y) }).collect()
    }

    /// Errors unless some pair reachable by the chain lies in the target.
    pub fn validate(&self, k: &dyn JointKernel) -> Result<()> {
        if self.occurrence == 0 {
            return Err(Error::InvalidArgument("occurrences count from 1".into()));
        }
        let inside = self.in_target(k);
        if reachable_pairs(k).iter().zip(&inside).any(|(&r, &a)| r && a) {
            Ok(())
        } else {
            Err(Error::EmptyTarget)
        }
    }
}

fn reachable_pairs(k: &dyn JointKernel) -> Vec<bool> {
    let n = k.n_pairs();
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&z| { let (x, y) = k.unpair(z); k.initial(x, y) > 0.0 }).collect();
    for &z in &stack {
        seen[z] = true;
    }
    while let Some(z) = stack.pop() {
        let (x, y) = k.unpair(z);
        for z2 in 0..n {
            let (x2, y2) = k.unpair(z2);
            if !seen[z2] && k.step(x, y, x2, y2) > 0.0 {
                seen[z2] = true;
                stack.push(z2);
            }
        }
    }
    seen
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceCheck {
    pub event: String,
    pub given: String,
    pub rhs_given: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkippedInstance {
    pub event: String,
    pub given: String,
    /// Smallest conditioning-event sample count, in Monte Carlo mode.
    pub count: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCheckResult {
    pub lemma: String,
    pub parameters: String,
    pub mode: String,
    pub horizon: Option<usize>,
    pub samples: Option<usize>,
    /// Mass of paths on which some recorded time was not reached.
    pub residual: f64,
    pub max_gap: f64,
    pub instances: Vec<InstanceCheck>,
    pub skipped: Vec<SkippedInstance>,
    pub pass: bool,
}

/// X at a slot equals `x` and Y lies in `set` (`None` leaves the coordinate free).
#[derive(Clone, Copy, Debug)]
struct Constraint {
    slot: usize,
    x: Option<usize>,
    set: Option<u64>,
}

impl Constraint {
    fn holds(&self, z: u32, ny: usize) -> bool {
        let (x, y) = (z as usize / ny, z as usize % ny);
        self.x.is_none_or(|c| c == x) && self.set.is_none_or(|s| s >> y & 1 == 1)
    }
}

#[derive(Clone, Debug)]
struct Cond {
    law: usize,
    event: Vec<Constraint>,
    given: Vec<Constraint>,
}

#[derive(Clone, Debug)]
enum Rhs {
    Cond(Cond),
    Value(f64),
    Product(Vec<Cond>),
}

#[derive(Clone, Debug)]
struct Identity {
    lhs: Cond,
    rhs: Rhs,
}

struct Evaluated {
    value: f64,
    given_mass: f64,
    /// Unfinished mass not ruled out by the conditioning event.
    rho: f64,
    count: Option<usize>,
}

fn evaluate(c: &Cond, laws: &[SlotLaw], ny: usize) -> Evaluated {
    let law = &laws[c.law];
    let (mut given_mass, mut joint) = (0.0, 0.0);
    for (tuple, p) in &law.complete {
        if c.given.iter().all(|g| g.holds(tuple[g.slot], ny)) {
            given_mass += p;
            if c.event.iter().all(|e| e.holds(tuple[e.slot], ny)) {
                joint += p;
            }
        }
    }
    let rho = law
        .partial
        .iter()
        .filter(|(tuple, _)| c.given.iter().all(|g| tuple[g.slot].is_none_or(|z| g.holds(z, ny))))
        .map(|(_, p)| p)
        .sum();
    let count = law.samples.map(|s| (given_mass * s as f64).round() as usize);
    Evaluated { value: if given_mass > 0.0 { joint / given_mass } else { f64::NAN }, given_mass, rho, count }
}

enum Mode {
    Exact { tol: f64 },
    MonteCarlo,
}

fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

struct Describe<'a> {
    k: &'a dyn JointKernel,
    laws: &'a [SlotLaw],
}

impl Describe<'_> {
    fn constraints(&self, law: usize, cs: &[Constraint]) -> String {
        let labels = self.k.alphabet();
        let mut parts = Vec::new();
        for c in cs {
            let at = self.laws[law].kinds[c.slot].label();
            if let Some(x) = c.x {
                parts.push(format!("X[{at}]={}", self.k.hidden_label(x)));
            }
            if let Some(set) = c.set {
                let members: Vec<&str> = (0..labels.len()).filter(|y| set >> y & 1 == 1).map(|y| labels.label(y)).collect();
                parts.push(format!("Y[{at}]∈{{{}}}", members.join(",")));
            }
        }
        if parts.is_empty() {
            "Ω".into()
        } else {
            parts.join(" ")
        }
    }

    fn rhs(&self, rhs: &Rhs) -> String {
        match rhs {
            Rhs::Cond(c) => self.constraints(c.law, &c.given),
            Rhs::Value(_) => "read-out".into(),
            Rhs::Product(cs) => cs
                .iter()
                .map(|c| format!("P({} | {})", self.constraints(c.law, &c.event), self.constraints(c.law, &c.given)))
                .collect::<Vec<_>>()
                .join(" · "),
        }
    }
}

fn run_identities(
    lemma: &str,
    parameters: String,
    k: &dyn JointKernel,
    laws: &[SlotLaw],
    identities: &[Identity],
    mode: &Mode,
    horizon: Option<usize>,
) -> LemmaCheckResult {
    let ny = k.alphabet().len();
    let describe = Describe { k, laws };
    let evaluated: Vec<Option<InstanceCheck>> = identities
        .par_iter()
        .map(|id| {
            let lhs = evaluate(&id.lhs, laws, ny);
            let mut sides = vec![&lhs];
            let (rhs_value, rhs_evals): (f64, Vec<Evaluated>) = match &id.rhs {
                Rhs::Cond(c) => {
                    let e = evaluate(c, laws, ny);
                    (e.value, vec![e])
                }
                Rhs::Value(v) => (*v, Vec::new()),
                Rhs::Product(cs) => {
                    let es: Vec<Evaluated> = cs.iter().map(|c| evaluate(c, laws, ny)).collect();
                    (es.iter().map(|e| e.value).product(), es)
                }
            };
            sides.extend(rhs_evals.iter());
            let usable = match mode {
                Mode::Exact { .. } => sides.iter().all(|e| e.given_mass > 0.0),
                Mode::MonteCarlo => sides.iter().all(|e| e.count.unwrap_or(0) >= MC_MIN_COUNT),
            };
            if !usable {
                return None;
            }
            let tolerance = match mode {
                Mode::Exact { tol } => tol + sides.iter().map(|e| e.rho / e.given_mass).sum::<f64>(),
                Mode::MonteCarlo => {
                    let n_l = lhs.count.unwrap();
                    let se = match &id.rhs {
                        Rhs::Cond(_) => {
                            let n_r = rhs_evals[0].count.unwrap();
                            let pooled = (lhs.value * n_l as f64 + rhs_value * n_r as f64) / (n_l + n_r) as f64;
                            (pooled * (1.0 - pooled) * (1.0 / n_l as f64 + 1.0 / n_r as f64)).max(0.0).sqrt()
                        }
                        Rhs::Value(v) => binomial_se(*v, n_l),
                        Rhs::Product(_) => {
                            binomial_se(lhs.value, n_l) + rhs_evals.iter().map(|e| binomial_se(e.value, e.count.unwrap())).sum::<f64>()
                        }
                    };
                    3.0 * se
                }
            };
            let gap = (lhs.value - rhs_value).abs();
            Some(InstanceCheck {
                event: describe.constraints(id.lhs.law, &id.lhs.event),
                given: describe.constraints(id.lhs.law, &id.lhs.given),
                rhs_given: describe.rhs(&id.rhs),
                lhs: lhs.value,
                rhs: rhs_value,
                gap,
                tolerance,
                pass: gap <= tolerance,
            })
        })
        .collect();

    let mut instances = Vec::new();
    let mut skipped = Vec::new();
    for (id, e) in identities.iter().zip(evaluated) {
        match e {
            Some(c) => instances.push(c),
            None => {
                let count = match mode {
                    Mode::Exact { .. } => None,
                    Mode::MonteCarlo => {
                        let mut conds = vec![&id.lhs];
                        match &id.rhs {
                            Rhs::Cond(c) => conds.push(c),
                            Rhs::Product(cs) => conds.extend(cs.iter()),
                            Rhs::Value(_) => {}
                        }
                        conds.iter().filter_map(|c| evaluate(c, laws, ny).count).min()
                    }
                };
                skipped.push(SkippedInstance {
                    event: describe.constraints(id.lhs.law, &id.lhs.event),
                    given: describe.constraints(id.lhs.law, &id.lhs.given),
                    count,
                });
            }
        }
    }
    let used: Vec<usize> = {
        let mut v: Vec<usize> = identities.iter().map(|id| id.lhs.law).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let residual = used.iter().map(|&l| laws[l].residual()).fold(0.0, f64::max);
    let max_gap = instances.iter().map(|c| c.gap).fold(0.0, f64::max);
    let pass = instances.iter().all(|c| c.pass);
    LemmaCheckResult {
        lemma: lemma.into(),
        parameters,
        mode: match mode {
            Mode::Exact { .. } => "exact".into(),
            Mode::MonteCarlo => "monte_carlo".into(),
        },
        horizon,
        samples: laws.first().and_then(|l| l.samples),
        residual,
        max_gap,
        instances,
        skipped,
        pass,
    }
}

/// (x, S) choices: every hidden state with every singleton and the whole alphabet.
fn choices(nx: usize, ny: usize) -> Vec<(usize, Option<u64>)> {
    let sets: Vec<Option<u64>> = std::iter::once(None).chain((0..ny).map(|y| Some(1u64 << y))).collect();
    (0..nx).flat_map(|x| sets.iter().map(move |&s| (x, s))).collect()
}

fn singletons(ny: usize) -> Vec<u64> {
    (0..ny).map(|y| 1u64 << y).collect()
}

fn tuples<T: Clone>(items: &[T], n: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|t| items.iter().map(move |i| { let mut t = t.clone(); t.push(i.clone()); t })).collect();
    }
    out
}

/// P(slot n−1 | slots 0..n−1) against P(slot n−1 | X at slot n−2), or against the full
/// pair at slot n−2 when `keep_symbol`.
fn chain_identities(law: usize, n: usize, choices: &[(usize, Option<u64>)], keep_symbol: bool) -> Vec<Identity> {
    tuples(choices, n)
        .into_iter()
        .map(|t| {
            let c = |j: usize| Constraint { slot: j, x: Some(t[j].0), set: t[j].1 };
            let event = vec![c(n - 1)];
            let given: Vec<Constraint> = (0..n - 1).map(c).collect();
            let prev = Constraint { set: if keep_symbol { t[n - 2].1 } else { None }, ..c(n - 2) };
            Identity { lhs: Cond { law, event: event.clone(), given }, rhs: Rhs::Cond(Cond { law, event, given: vec![prev] }) }
        })
        .collect()
}

fn splitting_identities(nx: usize, ny: usize, n: usize) -> Vec<Identity> {
    let mut ids = chain_identities(0, n, &choices(nx, ny), false);
    let pairs: Vec<(usize, Option<u64>)> = (0..nx).flat_map(|x| (0..ny).map(move |y| (x, Some(1u64 << y)))).collect();
    ids.extend(chain_identities(0, n, &pairs, true));
    ids
}

fn check_alphabet(k: &dyn JointKernel) -> Result<()> {
    if k.alphabet().len() > 64 {
        return Err(Error::InvalidArgument("lemma checks support at most 64 symbols".into()));
    }
    Ok(())
}

fn floor_check(law: &SlotLaw, horizon: usize, floor: f64) -> Result<()> {
    let reached = law.complete_mass();
    if reached < floor {
        return Err(Error::Truncation { horizon, reached, floor });
    }
    Ok(())
}

/// Splitting identity at step `n`: conditioning the pair at time n on the hidden states and
/// symbol sets at times 1..n−1 is the same as conditioning on X_{n−1}. The same result also
/// carries the Markov property of the pair chain at step n.
pub fn check_splitting(m: &HmmModel, n: usize, cfg: &Config) -> Result<LemmaCheckResult> {
    ensure_valid(m.violations())?;
    check_splitting_kernel(m, n, cfg)
}

/// [`check_splitting`] for any joint kernel, including ones that are not HMMs.
pub fn check_splitting_kernel(k: &dyn JointKernel, n: usize, cfg: &Config) -> Result<LemmaCheckResult> {
    check_alphabet(k)?;
    if n < 2 {
        return Err(Error::HorizonTooSmall { min: 2, got: n });
    }
    let kinds: Vec<SlotKind> = (1..=n).map(SlotKind::Fixed).collect();
    let law = slot_law(k, &vec![false; k.n_pairs()], &kinds, n, cfg.enum_budget)?;
    let ids = splitting_identities(k.n_hidden(), k.alphabet().len(), n);
    Ok(run_identities("splitting", format!("N={n}"), k, &[law], &ids, &Mode::Exact { tol: cfg.tol_exact }, Some(n)))
}

fn strong_splitting_parts(occ: usize, n: usize, lag: usize, nx: usize, ny: usize) -> (Vec<SlotKind>, Vec<Identity>) {
    let kinds = vec![
        SlotKind::Hit { occurrence: occ, offset: 0 },
        SlotKind::HitOrFixed { occurrence: occ, n },
        SlotKind::Hit { occurrence: occ, offset: lag },
    ];
    let ch = choices(nx, ny);
    let ids = tuples(&ch, 3)
        .into_iter()
        .map(|t| {
            let c = |slot: usize, (x, set): (usize, Option<u64>)| Constraint { slot, x: Some(x), set };
            let event = vec![c(2, t[2])];
            Identity {
                lhs: Cond { law: 0, event: event.clone(), given: vec![c(0, t[0]), c(1, t[1])] },
                rhs: Rhs::Cond(Cond { law: 0, event, given: vec![Constraint { set: None, ..c(0, t[0]) }] }),
            }
        })
        .collect();
    (kinds, ids)
}

/// Strong splitting at γ = γ_{spec.occurrence} with lag k, one result per n in 1..=horizon
/// for the extra conditioning on the pair at γ ∧ n.
pub fn check_strong_splitting(m: &HmmModel, spec: &HittingTimeSpec, lag: usize, horizon: usize, cfg: &Config) -> Result<Vec<LemmaCheckResult>> {
    ensure_valid(m.violations())?;
    check_alphabet(m)?;
    spec.validate(m)?;
    let inside = spec.in_target(m);
    (1..=horizon)
        .into_par_iter()
        .map(|n| {
            let (kinds, ids) = strong_splitting_parts(spec.occurrence, n, lag, m.n_hidden(), m.alphabet.len());
            let law = slot_law(m, &inside, &kinds, horizon, cfg.enum_budget)?;
            floor_check(&law, horizon, cfg.horizon_floor)?;
            Ok(run_identities("strong_splitting", format!("n={n} k={lag}"), m, &[law], &ids, &Mode::Exact { tol: cfg.tol_exact }, Some(horizon)))
        })
        .collect()
}

/// Slot lists used by the hitting-time identities: the hits, the hits shifted by one, and
/// each shifted hit alone.
fn hitting_kinds(n: usize) -> Vec<Vec<SlotKind>> {
    let mut laws = vec![
        (1..=n).map(|j| SlotKind::Hit { occurrence: j, offset: 0 }).collect::<Vec<_>>(),
        (1..=n).map(|j| SlotKind::Hit { occurrence: j, offset: 1 }).collect(),
    ];
    laws.extend((1..=n).map(|j| vec![SlotKind::Hit { occurrence: j, offset: 1 }]));
    laws
}

/// Identities per lemma over the laws of [`hitting_kinds`] (offset by `base` in the law list).
fn hitting_identities(m: &HmmModel, n: usize, symbol_only: bool, base: usize) -> Vec<(&'static str, Vec<Identity>)> {
    let (nx, ny) = (m.n_hidden(), m.alphabet.len());
    let (hit, shifted) = (base, base + 1);
    let ch = choices(nx, ny);
    let mut out = vec![
        ("generalized_strong_splitting", chain_identities(hit, n, &ch, false)),
        ("shifted_strong_splitting", chain_identities(shifted, n, &ch, false)),
    ];

    let last = n - 1;
    let mut readout = Vec::new();
    let mut strong_readout = Vec::new();
    for x2 in 0..nx {
        for set in singletons(ny) {
            let f: f64 = (0..ny).filter(|y| set >> y & 1 == 1).map(|y| m.readout[x2].0[y]).sum();
            let event = vec![Constraint { slot: last, x: None, set: Some(set) }];
            let at_tau = Constraint { slot: last, x: Some(x2), set: None };
            readout.push(Identity { lhs: Cond { law: shifted, event: event.clone(), given: vec![at_tau] }, rhs: Rhs::Value(f) });
            for j in 0..last {
                for x1 in 0..nx {
                    let at_sigma = Constraint { slot: j, x: Some(x1), set: None };
                    strong_readout.push(Identity {
                        lhs: Cond { law: shifted, event: event.clone(), given: vec![at_tau, at_sigma] },
                        rhs: Rhs::Cond(Cond { law: shifted, event: event.clone(), given: vec![at_tau] }),
                    });
                }
            }
        }
    }
    out.push(("readout_at_stopping_time", readout));
    out.push(("strong_readout", strong_readout));

    if symbol_only {
        let sets: Vec<Option<u64>> = std::iter::once(None).chain(singletons(ny).into_iter().map(Some)).collect();
        let xs: Vec<usize> = (0..nx).collect();
        let mut ci = Vec::new();
        for hidden in tuples(&xs, n) {
            for s in tuples(&sets, n) {
                if s.iter().all(Option::is_none) {
                    continue;
                }
                let event: Vec<Constraint> = (0..n).filter(|&j| s[j].is_some()).map(|j| Constraint { slot: j, x: None, set: s[j] }).collect();
                let given: Vec<Constraint> = (0..n).map(|j| Constraint { slot: j, x: Some(hidden[j]), set: None }).collect();
                let factors = (0..n)
                    .filter(|&j| s[j].is_some())
                    .map(|j| Cond {
                        law: base + 2 + j,
                        event: vec![Constraint { slot: 0, x: None, set: s[j] }],
                        given: vec![Constraint { slot: 0, x: Some(hidden[j]), set: None }],
                    })
                    .collect();
                ci.push(Identity { lhs: Cond { law: shifted, event, given }, rhs: Rhs::Product(factors) });
            }
        }
        out.push(("conditional_independence", ci));
    }
    out
}

/// Generalized strong splitting, its shifted variant, the read-out identities at stopping
/// times (σ = γ_j, τ = γ_N for j < N) and, for symbol-only targets, the product form of the
/// observations after the first N hits. One result per identity.
pub fn check_hitting_time_lemmas(m: &HmmModel, spec: &HittingTimeSpec, n: usize, horizon: usize, cfg: &Config) -> Result<Vec<LemmaCheckResult>> {
    ensure_valid(m.violations())?;
    check_alphabet(m)?;
    spec.validate(m)?;
    if n < 2 {
        return Err(Error::InvalidArgument(format!("at least 2 occurrences required, got {n}")));
    }
    let inside = spec.in_target(m);
    let kinds = hitting_kinds(n);
    let laws: Vec<SlotLaw> = kinds.par_iter().map(|k| slot_law(m, &inside, k, horizon, cfg.enum_budget)).collect::<Result<_>>()?;
    for law in &laws {
        floor_check(law, horizon, cfg.horizon_floor)?;
    }
    let mode = Mode::Exact { tol: cfg.tol_exact };
    Ok(hitting_identities(m, n, spec.is_symbol_only(), 0)
        .into_iter()
        .map(|(name, ids)| run_identities(name, format!("N={n}"), m, &laws, &ids, &mode, Some(horizon)))
        .collect())
}

/// Monte Carlo version of the splitting, strong splitting (n = 2, k = 1) and hitting-time
/// checks, for models too large to enumerate.
pub fn check_lemmas_mc(m: &HmmModel, spec: &HittingTimeSpec, n: usize, samples: usize, src: RandomSource) -> Result<Vec<LemmaCheckResult>> {
    ensure_valid(m.violations())?;
    check_alphabet(m)?;
    spec.validate(m)?;
    if samples < MC_MIN_SAMPLES {
        return Err(Error::TooFewSamples { min: MC_MIN_SAMPLES, got: samples });
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("at least 2 occurrences required, got {n}")));
    }
    let (nx, ny) = (m.n_hidden(), m.alphabet.len());
    let (strong_kinds, strong_ids) = strong_splitting_parts(spec.occurrence, 2, 1, nx, ny);
    let mut kinds = vec![(1..=MC_SPLITTING_STEPS).map(SlotKind::Fixed).collect::<Vec<_>>(), strong_kinds];
    kinds.extend(hitting_kinds(n));
    let laws = sample_slot_laws(m, &spec.in_target(m), &kinds, samples, src, MC_MAX_STEPS);

    let shift = |ids: Vec<Identity>, by: usize| -> Vec<Identity> {
        ids.into_iter()
            .map(|mut id| {
                id.lhs.law += by;
                match &mut id.rhs {
                    Rhs::Cond(c) => c.law += by,
                    Rhs::Product(cs) => cs.iter_mut().for_each(|c| c.law += by),
                    Rhs::Value(_) => {}
                }
                id
            })
            .collect()
    };
    let mut families = vec![
        ("splitting", format!("N={MC_SPLITTING_STEPS}"), splitting_identities(nx, ny, MC_SPLITTING_STEPS)),
        ("strong_splitting", "n=2 k=1".to_string(), shift(strong_ids, 1)),
    ];
    families.extend(hitting_identities(m, n, spec.is_symbol_only(), 2).into_iter().map(|(name, ids)| (name, format!("N={n}"), ids)));
    Ok(families
        .into_iter()
        .map(|(name, params, ids)| run_identities(name, params, m, &laws, &ids, &Mode::MonteCarlo, None))
        .collect())
}

#[cfg(test)]
mod tests;

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use markmix_core::chain::{cesaro_limit, decompose};
use markmix_core::constructions::{
    hmm_to_iid_mixture, hmm_to_markov_mixture_exact, iid_mixture_to_hmm, markov_mixture_to_hmm, partitioned_mixture_to_hmm,
};
use markmix_core::exact_law::{common_window, laws_equal};
use markmix_core::model::{load_model, validate_model, Alphabet, Distribution, HmmModel, Model, ModelFile, StochasticMatrix, Symbol};
use markmix_core::recovery::{lln_recover, test_partial_exchangeability};
use markmix_core::sim::{format_trajectories, parse_trajectories, sample_batch, Trajectory};
use markmix_core::stopping::{
    check_hitting_time_lemmas, check_lemmas_mc, check_splitting, check_strong_splitting, HittingTimeSpec, LemmaCheckResult,
};
use markmix_core::successors::{extract, extract_partitioned, format_successors};
use markmix_core::{Config, Error, RandomSource};

use crate::{Cli, Command, ConvertArgs, ExchangeabilityArgs, LemmaArgs, RecoverArgs, SimulateArgs, SuccessorsArgs, TargetClass};

const HITTING_LEMMAS: [&str; 5] =
    ["generalized_strong_splitting", "shifted_strong_splitting", "readout_at_stopping_time", "strong_readout", "conditional_independence"];

pub fn run(cli: &Cli) -> Result<bool> {
    let cfg = match &cli.config {
        Some(p) => Config::from_json(&read(p)?).with_context(|| format!("config {}", p.display()))?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Validate { model } => validate(model),
        Command::Simulate(a) => simulate(a, cli.seed),
        Command::Law { model, horizon } => {
            emit(&load(model)?.law(*horizon, cfg.enum_budget)?.dump())?;
            Ok(true)
        }
        Command::Compare { first, second, horizon } => compare(first, second, *horizon, &cfg),
        Command::Convert(a) => convert(a, &cfg),
        Command::Analyze { model } => analyze(model),
        Command::Successors(a) => successors(a),
        Command::Recover(a) => recover(a, &cfg),
        Command::TestExchangeability(a) => exchangeability(a, cli.seed, &cfg),
        Command::VerifyLemmas(a) => verify_lemmas(a, cli.seed, &cfg),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path) -> Result<Model> {
    load_model(path).with_context(|| format!("model {}", path.display()))
}

/// Writes to stdout; a closed pipe downstream is not an error.
fn emit(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn validate(path: &Path) -> Result<bool> {
    let model = load(path)?;
    let violations = validate_model(&model);
    if violations.is_empty() {
        emit(&format!("valid {}\n", model.kind()))?;
        return Ok(true);
    }
    emit(&violations.iter().map(|v| format!("invalid: {v}\n")).collect::<String>())?;
    Ok(false)
}

fn simulate(a: &SimulateArgs, seed: u64) -> Result<bool> {
    let model = load(&a.model)?;
    let hidden = match (&model, a.trace_hidden) {
        (Model::Hmm(m), true) => Some(m.hidden_states.clone()),
        (_, true) => bail!("--trace-hidden needs an hmm model, got {}", model.kind()),
        _ => None,
    };
    let ts = sample_batch(&model, a.length, a.count, RandomSource::new(seed, 0), a.trace_hidden)?;
    emit(&format_trajectories(&ts, model.alphabet(), hidden.as_deref()))?;
    Ok(true)
}

fn compare(first: &Path, second: &Path, horizon: usize, cfg: &Config) -> Result<bool> {
    let a = load(first)?.law(horizon, cfg.enum_budget)?;
    let b = load(second)?.law(horizon, cfg.enum_budget)?;
    let (a, b) = common_window(&a, &b)?;
    let c = laws_equal(&a, &b, cfg.tol_exact)?;
    let argmax = c.argmax.as_ref().map(|s| s.iter().map(|&y| a.alphabet().label(y).to_string()).collect::<Vec<_>>());
    print_json(&json!({
        "window": [a.first_index(), a.horizon()],
        "total_variation": c.total_variation,
        "max_gap": c.max_gap,
        "argmax": argmax,
        "tolerance": cfg.tol_exact,
        "equal": c.equal,
    }))?;
    Ok(c.equal)
}

fn to_hmm(model: &Model, i0: Option<&[f64]>) -> Result<HmmModel> {
    Ok(match model {
        Model::Hmm(m) => m.clone(),
        Model::IidMixture(m) => iid_mixture_to_hmm(m)?,
        Model::MarkovMixture(m) => markov_mixture_to_hmm(m)?,
        Model::Partitioned(m) => {
            let i0 = match i0 {
                Some(w) => Distribution::new(w.to_vec()),
                None => Distribution::uniform(m.cells.len()),
            };
            partitioned_mixture_to_hmm(m, &i0)?
        }
    })
}

fn convert(a: &ConvertArgs, cfg: &Config) -> Result<bool> {
    let input = load(&a.from)?;
    let i0 = a.i0.as_deref();
    let output = match (a.to, &input) {
        (TargetClass::IidMixture, Model::IidMixture(m)) => Model::IidMixture(m.clone()),
        (TargetClass::MarkovMixture, Model::MarkovMixture(m)) => Model::MarkovMixture(m.clone()),
        (TargetClass::Hmm, m) => Model::Hmm(to_hmm(m, i0)?),
        (TargetClass::IidMixture, m) => Model::IidMixture(hmm_to_iid_mixture(&to_hmm(m, i0)?)?),
        (TargetClass::MarkovMixture, m) => Model::MarkovMixture(hmm_to_markov_mixture_exact(&to_hmm(m, i0)?)?),
    };
    print_json(&ModelFile::from_model(&output))?;
    let Some(horizon) = a.check else { return Ok(true) };
    let (x, y) = common_window(&input.law(horizon, cfg.enum_budget)?, &output.law(horizon, cfg.enum_budget)?)?;
    let c = laws_equal(&x, &y, cfg.tol_exact)?;
    eprintln!("check horizon {horizon}: total variation {:e}, max gap {:e}, equal {}", c.total_variation, c.max_gap, c.equal);
    Ok(c.equal)
}

#[derive(Serialize)]
struct ChainReport {
    matrix: String,
    states: Vec<String>,
    classes: Vec<Vec<String>>,
    transient: Vec<String>,
    stationary: Vec<Vec<f64>>,
    cesaro_limit: Option<Vec<Vec<f64>>>,
}

fn chain_report(name: String, p: &StochasticMatrix, labels: &[String]) -> ChainReport {
    let d = decompose(p);
    let names = |v: &[usize]| v.iter().map(|&i| labels[i].clone()).collect::<Vec<_>>();
    ChainReport {
        matrix: name,
        states: labels.to_vec(),
        classes: d.classes.iter().map(|c| names(c)).collect(),
        transient: names(&d.transient),
        stationary: d.stationary.iter().map(|s| s.0.clone()).collect(),
        cesaro_limit: cesaro_limit(p).ok().map(|m| m.0),
    }
}

fn analyze(path: &Path) -> Result<bool> {
    let model = load(path)?;
    if let Some(v) = validate_model(&model).first() {
        bail!("invalid model: {v}");
    }
    let reports = match &model {
        Model::MarkovMixture(m) => m
            .components
            .iter()
            .enumerate()
            .map(|(h, p)| chain_report(format!("component {h}"), p, m.alphabet.labels()))
            .collect(),
        Model::Hmm(m) => vec![chain_report("transition".into(), &m.transition, &m.hidden_states)],
        other => {
            let h = to_hmm(other, None)?;
            vec![chain_report("transition of the constructed hmm".into(), &h.transition, &h.hidden_states)]
        }
    };
    print_json(&reports)?;
    Ok(true)
}

fn alphabet_from(model: Option<&Path>) -> Result<Option<Alphabet>> {
    model.map(|m| Ok(load(m)?.alphabet().clone())).transpose()
}

fn read_trajectories(paths: &[&Path], model: Option<&Path>) -> Result<(Alphabet, Vec<Trajectory>)> {
    let mut text = String::new();
    for p in paths {
        text.push_str(&read(p)?);
        text.push('\n');
    }
    let alphabet = alphabet_from(model)?;
    let (alphabet, ts) = parse_trajectories(&text, alphabet.as_ref())?;
    if ts.is_empty() {
        return Err(Error::EmptyInput("no trajectories in input".into()).into());
    }
    Ok((alphabet, ts))
}

fn read_partition(path: &Path, alphabet: &Alphabet) -> Result<Vec<Vec<Symbol>>> {
    read(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|s| alphabet.index(s).ok_or_else(|| Error::UnknownSymbol(s.into()).into())).collect())
        .collect()
}

fn successors(a: &SuccessorsArgs) -> Result<bool> {
    let (alphabet, ts) = read_trajectories(&[&a.trajectories], a.model.as_deref())?;
    let cells = a.partition.as_deref().map(|p| read_partition(p, &alphabet)).transpose()?;
    for (i, t) in ts.iter().enumerate() {
        let arr = match &cells {
            Some(c) => extract_partitioned(t, &alphabet, c)?,
            None => extract(t, &alphabet)?,
        };
        emit(&format!("# trajectory {i}\n{}", format_successors(&arr, &alphabet)))?;
    }
    Ok(true)
}

fn recover(a: &RecoverArgs, cfg: &Config) -> Result<bool> {
    let paths: Vec<&Path> = a.trajectories.iter().map(|p| p.as_path()).collect();
    let (alphabet, ts) = read_trajectories(&paths, a.model.as_deref())?;
    let measure = lln_recover(&ts, &alphabet, cfg.cluster_tol, cfg.min_row_count)?;
    let y0 = match &a.y0 {
        Some(l) => alphabet.index(l).ok_or_else(|| Error::UnknownSymbol(l.clone()))?,
        None => ts[0].symbols[0],
    };
    let model = measure.to_markov_mixture(y0).map(|m| ModelFile::from_model(&Model::MarkovMixture(m)));
    print_json(&json!({ "measure": measure, "model": model }))?;
    match (&a.model_out, &model) {
        (Some(out), Some(m)) => {
            fs::write(out, serde_json::to_string_pretty(m)? + "\n").with_context(|| format!("writing {}", out.display()))?;
            Ok(true)
        }
        (Some(_), None) => {
            eprintln!("some rows were never observed often enough; no model written");
            Ok(false)
        }
        (None, _) => Ok(true),
    }
}

fn exchangeability(a: &ExchangeabilityArgs, seed: u64, cfg: &Config) -> Result<bool> {
    let (alphabet, ts) = read_trajectories(&[&a.trajectories], a.model.as_deref())?;
    let Some(t) = ts.get(a.trajectory) else {
        bail!("trajectory {} requested, file has {}", a.trajectory, ts.len());
    };
    let arr = match a.partition.as_deref() {
        Some(p) => extract_partitioned(t, &alphabet, &read_partition(p, &alphabet)?)?,
        None => extract(t, &alphabet)?,
    };
    let report = test_partial_exchangeability(&arr, a.alpha.unwrap_or(cfg.alpha), a.permutations, RandomSource::new(seed, 0))?;
    print_json(&report)?;
    Ok(!report.reject)
}

fn target_spec(a: &LemmaArgs, m: &HmmModel) -> Result<HittingTimeSpec> {
    let symbol = |l: &str| m.alphabet.index(l).ok_or_else(|| Error::UnknownSymbol(l.into()));
    if let Some(pairs) = &a.target_pairs {
        let parsed = pairs
            .iter()
            .map(|p| {
                let (x, y) = p.split_once(':').with_context(|| format!("target pair {p:?} is not hidden:symbol"))?;
                let x = m.hidden_states.iter().position(|h| h == x).with_context(|| format!("unknown hidden state {x:?}"))?;
                Ok((x, symbol(y)?))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(HittingTimeSpec::pairs(parsed));
    }
    let symbols = match &a.target {
        Some(ls) => ls.iter().map(|l| symbol(l)).collect::<std::result::Result<Vec<_>, _>>()?,
        None => vec![0],
    };
    Ok(HittingTimeSpec::symbols(symbols))
}

fn verify_lemmas(a: &LemmaArgs, seed: u64, cfg: &Config) -> Result<bool> {
    let known = a.lemma == "all" || a.lemma == "splitting" || a.lemma == "strong_splitting" || HITTING_LEMMAS.contains(&a.lemma.as_str());
    if !known {
        bail!("unknown lemma {:?}", a.lemma);
    }
    let m = to_hmm(&load(&a.model)?, None)?;
    let spec = target_spec(a, &m)?;
    let wanted = |id: &str| a.lemma == "all" || a.lemma == id;
    let hint = || "rerun with --mc, a longer --horizon or a more frequent --target";
    let mut results: Vec<LemmaCheckResult> = Vec::new();
    if a.mc {
        let samples = a.samples.unwrap_or(cfg.mc_samples);
        results = check_lemmas_mc(&m, &spec, a.occurrences, samples, RandomSource::new(seed, 0))?;
        results.retain(|r| wanted(&r.lemma));
    } else {
        if wanted("splitting") {
            results.push(check_splitting(&m, a.steps, cfg)?);
        }
        if wanted("strong_splitting") {
            results.extend(check_strong_splitting(&m, &spec, a.lag, a.horizon, cfg).with_context(hint)?);
        }
        if HITTING_LEMMAS.iter().any(|l| wanted(l)) {
            let rs = check_hitting_time_lemmas(&m, &spec, a.occurrences, a.horizon, cfg).with_context(hint)?;
            results.extend(rs.into_iter().filter(|r| wanted(&r.lemma)));
        }
    }
    print_json(&results)?;
    for r in &results {
        let failed = r.instances.iter().filter(|c| !c.pass).count();
        eprintln!(
            "{} [{}]: {} ({} checked, {} failed, {} skipped, max gap {:e})",
            r.lemma,
            r.parameters,
            if r.pass { "pass" } else { "FAIL" },
            r.instances.len(),
            failed,
            r.skipped.len(),
            r.max_gap
        );
    }
    Ok(results.iter().all(|r| r.pass))
}

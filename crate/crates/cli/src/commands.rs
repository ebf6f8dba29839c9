use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nestcast::belief::{filter_check, FilterDeviation};
use nestcast::evaluate::{exact_cost, first_episodes, monte_carlo_cost, CostReport, CSV_HEADER};
use nestcast::model::{build_special_case, ScenarioChannel, SystemModel};
use nestcast::par::Workers;
use nestcast::random::atom_consistent_markov_strategy;
use nestcast::search::{
    brute_force_markov, coordinator_dp, falsify_structural, markov_class_size, BruteOptions, DpOptions, FalsifyOptions,
    SearchResult, Verdict,
};
use nestcast::strategy::{AnyStrategy, StrategyFile};
use nestcast::{Exact, Prob};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::manifest::RunManifest;
use crate::report::{Report, Status};
use crate::{Cli, Command, Global, MethodArg, Mode};

pub fn dispatch(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Validate { model } => validate(g, model),
        Command::FilterCheck { model, trials } => {
            let (m, manifest) = load(g, "filter-check", model, Mode::Rational)?;
            let manifest = manifest.param("trials", trials).cap("trajectories", g.cap_trajectories);
            match mode(g, Mode::Rational) {
                Mode::Rational => filter_suite::<Exact>(g, &m, *trials, manifest),
                Mode::Float => filter_suite::<f64>(g, &m, *trials, manifest),
            }
        }
        Command::Solve { model, method, save } => {
            let (m, manifest) = load(g, "solve", model, Mode::Rational)?;
            let manifest = search_caps(g, manifest.param("method", format!("{method:?}").to_lowercase()));
            match mode(g, Mode::Rational) {
                Mode::Rational => solve(g, &m, *method, save.as_deref(), manifest),
                Mode::Float => solve(g, &m.convert::<f64>(), *method, save.as_deref(), manifest),
            }
        }
        Command::Simulate { model, strategy, samples, trace, exact } => {
            let (m, manifest) = load(g, "simulate", model, Mode::Float)?;
            let file = read_strategy(strategy)?;
            let mut manifest = manifest.param("samples", samples).param("trace", trace).param("exact", exact);
            manifest.strategy_hashes.push(file.content_hash());
            manifest.seeds.push(g.seed);
            if *exact {
                manifest = manifest.cap("trajectories", g.cap_trajectories);
            }
            let opts = SimulateOptions { samples: *samples, trace: *trace, exact: *exact };
            match mode(g, Mode::Float) {
                Mode::Rational => simulate(g, &m, &m, file, opts, manifest),
                Mode::Float => simulate(g, &m, &m.convert::<f64>(), file, opts, manifest),
            }
        }
        Command::Falsify { model, samples, plant, counterexample } => {
            let (m, manifest) = load(g, "falsify", model, Mode::Rational)?;
            let mut manifest = search_caps(g, manifest.param("samples", samples).param("plant", plant));
            manifest.seeds.push(g.seed);
            let opts = (*samples, *plant, counterexample.as_deref());
            match mode(g, Mode::Rational) {
                Mode::Rational => falsify(g, &m, opts, manifest),
                Mode::Float => falsify(g, &m.convert::<f64>(), opts, manifest),
            }
        }
        Command::Scenario { u, v, x, horizon, inner, outer } => scenario(g, *u, *v, *x, *horizon, inner, outer),
    }
}

fn mode(g: &Global, default: Mode) -> Mode {
    g.mode.unwrap_or(default)
}

fn workers(g: &Global) -> Workers {
    Workers(g.workers)
}

fn read_model(path: &Path) -> Result<SystemModel<Exact>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(SystemModel::from_toml(&text)?)
}

fn read_strategy(path: &Path) -> Result<StrategyFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(StrategyFile::from_json(&text)?)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load(g: &Global, name: &str, path: &Path, default: Mode) -> Result<(SystemModel<Exact>, RunManifest)> {
    let m = read_model(path)?;
    let mut manifest = RunManifest::new(name, g.timestamp.clone());
    manifest.model_hash = Some(m.content_hash());
    manifest.mode = Some(mode(g, default).name().into());
    Ok((m, manifest))
}

fn search_caps(g: &Global, manifest: RunManifest) -> RunManifest {
    manifest
        .cap("encoders", g.cap_encoders)
        .cap("actions", g.cap_actions)
        .cap("nodes", g.cap_nodes)
        .cap("trajectories", g.cap_trajectories)
}

/// `p/q (decimal)` in rational mode, the decimal alone in float mode.
fn show<S: Prob>(x: &S) -> String {
    if S::EXACT {
        format!("{x} ({:.12})", x.to_f64())
    } else {
        format!("{:.12}", x.to_f64())
    }
}

fn same<S: Prob>(a: &S, b: &S) -> bool {
    a.abs_diff(b) <= S::tolerance()
}

fn validate(g: &Global, path: &Path) -> Result<Report> {
    let m = read_model(path)?;
    let a = m.alphabets;
    let mut manifest = RunManifest::new("validate", g.timestamp.clone());
    manifest.model_hash = Some(m.content_hash());
    let class = markov_class_size(&m).map_or_else(|| "more than 2^128".into(), |n| n.to_string());
    let mut r = Report::new(manifest);
    r.text.push(format!("valid: horizon {}", m.horizon));
    r.text.push(format!(
        "alphabets: u={} v={} x={} y={} z={} u_hat={} v_hat={}",
        a.u, a.v, a.x, a.y, a.z, a.u_hat, a.v_hat
    ));
    r.text.push(format!("markov encoder class: {class}"));
    r.csv = vec!["horizon,u,v,x,y,z,u_hat,v_hat,markov_class".into()];
    r.csv.push(format!("{},{},{},{},{},{},{},{},{class}", m.horizon, a.u, a.v, a.x, a.y, a.z, a.u_hat, a.v_hat));
    r.body = json!({ "valid": true, "horizon": m.horizon, "alphabets": {
        "u": a.u, "v": a.v, "x": a.x, "y": a.y, "z": a.z, "u_hat": a.u_hat, "v_hat": a.v_hat,
    }, "markov_class": class });
    Ok(r)
}

fn deviation_row(label: &str, d: &FilterDeviation) -> (String, String, Value) {
    let text = format!(
        "{label}: histories {} xi {:e} pi {:e} theta_u {:e} theta_v {:e}",
        d.histories, d.xi, d.pi, d.theta_u, d.theta_v
    );
    let csv = format!("{label},{},{:e},{:e},{:e},{:e},{}", d.histories, d.xi, d.pi, d.theta_u, d.theta_v, d.exact);
    let value = json!({
        "label": label, "histories": d.histories, "xi": d.xi, "pi": d.pi,
        "theta_u": d.theta_u, "theta_v": d.theta_v, "exact": d.exact,
    });
    (text, csv, value)
}

fn filter_suite<S: Prob>(g: &Global, m: &SystemModel<Exact>, trials: u64, mut manifest: RunManifest) -> Result<Report> {
    manifest.seeds.push(g.seed);
    let results = workers(g).map(trials as usize, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
        rng.set_stream(i as u64);
        let s = atom_consistent_markov_strategy(&mut rng, m);
        filter_check::<S>(m, &s, g.cap_trajectories)
    });
    let mut r = Report::new(manifest);
    r.csv.push("trial,histories,xi,pi,theta_u,theta_v,exact".into());
    let mut rows = Vec::new();
    let mut worst = FilterDeviation::default();
    for (i, d) in results.into_iter().enumerate() {
        let d = d?;
        worst.merge(&d);
        let (text, csv, value) = deviation_row(&format!("trial {i}"), &d);
        r.text.push(text);
        r.csv.push(csv);
        rows.push(value);
    }
    let pass = if S::EXACT { trials == 0 || worst.exact } else { worst.max() <= 1e-9 };
    let verdict = if pass { "PASS" } else { "FAIL" };
    if trials == 0 {
        r.text.push("no trials".into());
    } else {
        let (text, csv, _) = deviation_row("max", &worst);
        r.text.push(text);
        r.csv.push(csv);
    }
    r.text.push(format!("verdict: {verdict}"));
    r.body = json!({ "trials": rows, "max": deviation_row("max", &worst).2, "verdict": verdict });
    if !pass {
        r.status = Status::Failed;
    }
    Ok(r)
}

struct Solved<S> {
    result: SearchResult<S>,
    file: StrategyFile,
    states: Option<usize>,
    recheck: S,
}

fn solve<S: Prob>(
    g: &Global,
    m: &SystemModel<S>,
    method: MethodArg,
    save: Option<&Path>,
    manifest: RunManifest,
) -> Result<Report> {
    let mut solved = Vec::new();
    if matches!(method, MethodArg::Brute | MethodArg::Both) {
        let result = brute_force_markov(m, &BruteOptions { cap: g.cap_encoders, workers: workers(g) })?;
        let recheck = exact_cost(m, &result.best, g.cap_trajectories)?.total;
        let file = StrategyFile::Markov(result.best.clone());
        solved.push(Solved { result, file, states: None, recheck });
    }
    if matches!(method, MethodArg::Dp | MethodArg::Both) {
        let dp = coordinator_dp(m, &DpOptions { action_cap: g.cap_actions, node_cap: g.cap_nodes })?;
        let recheck = exact_cost(m, &dp.structured, g.cap_trajectories)?.total;
        let file = StrategyFile::Structured(dp.structured.to_file());
        solved.push(Solved { result: dp.result, file, states: Some(dp.states), recheck });
    }

    let mut r = Report::new(manifest);
    r.csv.push("method,best_cost,best_cost_decimal,enumerated,states,strategy_hash,recheck".into());
    let mut methods = Vec::new();
    for s in &solved {
        let res = &s.result;
        let hash = s.file.content_hash();
        let recheck_ok = same(&s.recheck, &res.best_cost);
        if !recheck_ok {
            r.status = Status::Failed;
        }
        let recheck = if recheck_ok { "ok" } else { "MISMATCH" };
        let states = s.states.map_or_else(String::new, |n| n.to_string());
        let mut line = format!("{}: J* = {} enumerated {}", res.method, show(&res.best_cost), res.enumerated);
        if let Some(n) = s.states {
            line.push_str(&format!(" states {n}"));
        }
        line.push_str(&format!(" strategy {hash} recheck {recheck}"));
        r.text.push(line);
        r.csv.push(format!(
            "{},{},{:.12},{},{states},{hash},{recheck}",
            res.method,
            res.best_cost,
            res.best_cost.to_f64(),
            res.enumerated
        ));
        let mut entry = json!({
            "method": res.method.to_string(),
            "best_cost": res.best_cost.to_string(),
            "best_cost_decimal": res.best_cost.to_f64(),
            "enumerated": res.enumerated.to_string(),
            "strategy_hash": hash,
            "recheck": recheck,
        });
        if let Some(n) = s.states {
            entry["states"] = json!(n);
        }
        if let Some(prefix) = save {
            let path = PathBuf::from(format!("{}.{}.json", prefix.display(), res.method));
            write_file(&path, &(s.file.to_json() + "\n"))?;
            entry["strategy_file"] = json!(path.display().to_string());
            r.text.push(format!("  saved {}", path.display()));
        }
        methods.push(entry);
    }
    r.body = json!({ "methods": methods });
    if let [a, b] = &solved[..] {
        let verdict = if same(&a.result.best_cost, &b.result.best_cost) { "EQUAL" } else { "UNEQUAL" };
        if verdict == "UNEQUAL" {
            r.status = Status::Failed;
        }
        r.text.push(format!("verdict: {verdict}"));
        r.body["verdict"] = json!(verdict);
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy)]
struct SimulateOptions {
    samples: u64,
    trace: u64,
    exact: bool,
}

fn simulate<S: Prob>(
    g: &Global,
    exact_model: &SystemModel<Exact>,
    m: &SystemModel<S>,
    file: StrategyFile,
    opts: SimulateOptions,
    manifest: RunManifest,
) -> Result<Report> {
    let model_hash = manifest.model_hash.clone().unwrap_or_default();
    let strategy_hash = file.content_hash();
    let strategy: AnyStrategy<S> = file.clone().into_strategy(m)?;
    let mc = monte_carlo_cost(m, &strategy, opts.samples, g.seed, workers(g))?;
    let mut r = Report::new(manifest);
    r.csv.push(CSV_HEADER.into());
    r.csv.push(mc.csv_row(&model_hash, &strategy_hash));
    let se = match mc.mode {
        nestcast::evaluate::CostMode::MonteCarlo { std_error, .. } => std_error,
        nestcast::evaluate::CostMode::Exact => 0.0,
    };
    r.text.push(format!("estimate: {:.12} std_error {:.12} samples {}", mc.total, se, opts.samples));
    push_stages(&mut r.text, &mc);
    r.body = json!({ "estimate": mc.summary() });

    if opts.exact {
        let exact_strategy: AnyStrategy<Exact> = file.into_strategy(exact_model)?;
        let ex = exact_cost(exact_model, &exact_strategy, g.cap_trajectories)?;
        r.csv.push(ex.csv_row(&model_hash, &strategy_hash));
        let gap = (mc.total - ex.total.to_f64()).abs();
        let z = if se > 0.0 { format!("{:.3}", gap / se) } else { "n/a".into() };
        r.text.push(format!("exact: {} |estimate - exact| / std_error = {z}", show(&ex.total)));
        r.body["exact"] = serde_json::to_value(ex.summary())?;
    }

    if opts.trace > 0 {
        let episodes = first_episodes(m, &strategy, opts.trace, g.seed)?;
        for (i, ep) in episodes.iter().enumerate() {
            r.text.push(format!(
                "episode {i}: u {:?} v {:?} x {:?} y {:?} z {:?} u_hat {:?} v_hat {:?} distortion {}",
                ep.u,
                ep.v,
                ep.x,
                ep.y,
                ep.z,
                ep.u_hat,
                ep.v_hat,
                ep.total()
            ));
        }
        r.body["episodes"] = serde_json::to_value(&episodes)?;
    }
    Ok(r)
}

fn push_stages<S: Prob>(text: &mut Vec<String>, report: &CostReport<S>) {
    for (t, st) in report.per_stage.iter().enumerate() {
        text.push(format!("  stage {}: inner {} outer {}", t + 1, st.inner, st.outer));
    }
}

fn falsify<S: Prob>(
    g: &Global,
    m: &SystemModel<S>,
    (samples, plant, counterexample): (u64, bool, Option<&Path>),
    manifest: RunManifest,
) -> Result<Report> {
    let dp = coordinator_dp(m, &DpOptions { action_cap: g.cap_actions, node_cap: g.cap_nodes })?;
    let optimum = dp.result.best_cost.clone();
    let opts = FalsifyOptions {
        samples,
        seed: g.seed,
        cap: g.cap_trajectories,
        workers: workers(g),
        plant: plant.then(|| dp.result.best.clone()),
    };
    let report = falsify_structural(m, &optimum, &opts)?;
    let mut r = Report::new(manifest);
    r.csv.push("optimum,samples,best_sample,planted,verdict".into());
    r.text.push(format!("structured optimum: {}", show(&optimum)));
    r.text.push(format!("samples: {samples}"));
    match &report.best_sample {
        Some(b) => r.text.push(format!("best sample: {}", show(b))),
        None => r.text.push("best sample: none".into()),
    }
    if let Some(p) = &report.planted {
        let relation = if same(p, &optimum) { "equal to" } else if *p < optimum { "below" } else { "above" };
        r.text.push(format!("planted optimum: {} ({relation} the structured optimum)", show(p)));
    }
    let opt_str = |x: &Option<S>| x.as_ref().map_or_else(String::new, ToString::to_string);
    let mut body = json!({
        "optimum": optimum.to_string(),
        "samples": samples,
        "best_sample": report.best_sample.as_ref().map(ToString::to_string),
        "planted": report.planted.as_ref().map(ToString::to_string),
    });
    let verdict = match &report.verdict {
        Verdict::NotFalsified => "NOT_FALSIFIED",
        Verdict::Falsified { sample, cost, strategy } => {
            r.status = Status::Falsified;
            r.text.push(format!("counterexample: sample {sample} cost {}", show(cost)));
            body["counterexample"] = json!({ "sample": sample, "cost": cost.to_string() });
            if let Some(path) = counterexample {
                write_file(path, &(StrategyFile::General(strategy.clone()).to_json() + "\n"))?;
                r.text.push(format!("  saved {}", path.display()));
            }
            "FALSIFIED"
        }
    };
    r.text.push(format!("verdict: {verdict}"));
    body["verdict"] = json!(verdict);
    r.csv.push(format!("{optimum},{samples},{},{},{verdict}", opt_str(&report.best_sample), opt_str(&report.planted)));
    r.body = body;
    Ok(r)
}

fn parse_probability(name: &str, text: &Option<String>) -> Result<Exact> {
    let Some(text) = text else { return Ok(Exact::from_integer(0)) };
    match text.parse::<Exact>() {
        Ok(p) if !p.is_negative() && p <= Exact::from_integer(1) => Ok(p),
        _ => bail!("--{name} must be a probability, got {text:?}"),
    }
}

fn scenario(
    g: &Global,
    u: usize,
    v: usize,
    x: Option<usize>,
    horizon: usize,
    inner: &Option<String>,
    outer: &Option<String>,
) -> Result<Report> {
    let x = x.unwrap_or(u * v);
    let channel = if inner.is_none() && outer.is_none() {
        ScenarioChannel::Noiseless
    } else {
        ScenarioChannel::Symmetric { inner: parse_probability("inner", inner)?, outer: parse_probability("outer", outer)? }
    };
    let mut manifest = RunManifest::new("scenario", g.timestamp.clone())
        .param("u", u)
        .param("v", v)
        .param("x", x)
        .param("horizon", horizon);
    if let ScenarioChannel::Symmetric { inner, outer } = &channel {
        manifest = manifest.param("inner", inner).param("outer", outer);
    }
    let m = build_special_case(u, v, x, horizon, channel)?;
    manifest.model_hash = Some(m.content_hash());
    let mut raw = String::new();
    for line in manifest.text_lines() {
        raw.push_str(&format!("# {line}\n"));
    }
    raw.push_str(&m.to_toml());
    let mut r = Report::new(manifest);
    r.raw = Some(raw);
    Ok(r)
}


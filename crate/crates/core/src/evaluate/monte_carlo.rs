use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{CostMode, CostReport, StageCost};
use crate::error::Result;
use crate::model::SystemModel;
use crate::par::Workers;
use crate::prob::Prob;
use crate::strategy::{Executable, StageRunner};

/// Episodes per random stream. Batch `b` draws from stream `b` of the
/// seeded generator, so results do not depend on scheduling.
const BATCH: u64 = 4096;

/// One realization of the process.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Episode {
    pub seed: u64,
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
    pub u_hat: Vec<usize>,
    pub v_hat: Vec<usize>,
    /// `(ρ_{1,t}, ρ_{2,t})` realized at each stage.
    pub distortion: Vec<(f64, f64)>,
}

impl Episode {
    pub fn total(&self) -> f64 {
        self.distortion.iter().map(|(a, b)| a + b).sum()
    }
}

/// Cumulative rows of every kernel, for inverse-transform sampling in
/// symbol order.
#[derive(Debug, Clone)]
pub struct Sampler {
    initial: Vec<f64>,
    transition: Vec<Vec<f64>>,
    inner: Vec<Vec<f64>>,
    outer: Vec<Vec<f64>>,
}

fn cumulative<S: Prob>(row: &[S]) -> Vec<f64> {
    let mut acc = 0.0;
    row.iter()
        .map(|p| {
            acc += p.to_f64();
            acc
        })
        .collect()
}

/// Smallest index whose cumulative mass exceeds `r`; zero-probability
/// symbols are never returned.
fn invert(cdf: &[f64], r: f64) -> usize {
    match cdf.iter().position(|&c| c > r) {
        Some(i) => i,
        None => {
            let total = *cdf.last().expect("nonempty row");
            cdf.iter().position(|&c| c >= total).expect("row has positive mass")
        }
    }
}

impl Sampler {
    pub fn new<S: Prob>(model: &SystemModel<S>) -> Self {
        Sampler {
            initial: cumulative(&model.source.initial),
            transition: model.source.transition.iter().map(|r| cumulative(r)).collect(),
            inner: model.channel.inner.iter().map(|r| cumulative(r)).collect(),
            outer: model.channel.outer.iter().map(|r| cumulative(r)).collect(),
        }
    }

    pub fn source(&self, prev: Option<usize>, r: f64) -> usize {
        match prev {
            None => invert(&self.initial, r),
            Some(s) => invert(&self.transition[s], r),
        }
    }

    pub fn inner(&self, x: usize, r: f64) -> usize {
        invert(&self.inner[x], r)
    }

    pub fn outer(&self, y: usize, r: f64) -> usize {
        invert(&self.outer[y], r)
    }
}

fn run_episode<S: Prob, R: StageRunner>(
    model: &SystemModel<S>,
    sampler: &Sampler,
    mut runner: R,
    rng: &mut impl Rng,
    seed: u64,
) -> Result<Episode> {
    let a = model.alphabets;
    let n = model.horizon;
    let mut ep = Episode {
        seed,
        u: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        x: Vec::with_capacity(n),
        y: Vec::with_capacity(n),
        z: Vec::with_capacity(n),
        u_hat: Vec::with_capacity(n),
        v_hat: Vec::with_capacity(n),
        distortion: Vec::with_capacity(n),
    };
    let mut prev = None;
    for t in 1..=n {
        let s = sampler.source(prev, rng.random());
        prev = Some(s);
        let (u, v) = a.split(s);
        let x = runner.encode(u, v)?;
        let y = sampler.inner(x, rng.random());
        let z = sampler.outer(y, rng.random());
        let u_hat = runner.decode_inner(y)?;
        let v_hat = runner.decode_outer(z)?;
        ep.distortion.push((model.rho1(t)[u][u_hat].to_f64(), model.rho2(t)[v][v_hat].to_f64()));
        ep.u.push(u);
        ep.v.push(v);
        ep.x.push(x);
        ep.y.push(y);
        ep.z.push(z);
        ep.u_hat.push(u_hat);
        ep.v_hat.push(v_hat);
    }
    Ok(ep)
}

/// One realization drawn from `seed`. Each stage consumes three uniforms in
/// the order source, inner channel, outer channel.
pub fn simulate_episode<S: Prob, E: Executable<S>>(model: &SystemModel<S>, strategy: &E, seed: u64) -> Result<Episode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_episode(model, &Sampler::new(model), strategy.runner(model), &mut rng, seed)
}

/// The first `k` episodes of the [`monte_carlo_cost`] run with the same
/// seed, in order.
pub fn first_episodes<S: Prob, E: Executable<S>>(model: &SystemModel<S>, strategy: &E, k: u64, seed: u64) -> Result<Vec<Episode>> {
    let sampler = Sampler::new(model);
    let mut out = Vec::with_capacity(k as usize);
    for b in 0..k.div_ceil(BATCH) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b);
        for _ in 0..BATCH.min(k - b * BATCH) {
            out.push(run_episode(model, &sampler, strategy.runner(model), &mut rng, seed)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
struct Moments {
    n: u64,
    sum: f64,
    sum_sq: f64,
    stages: Vec<(f64, f64)>,
}

/// Sample mean of the total distortion over `n` seeded episodes, with its
/// standard error. Deterministic in `(model, strategy, n, seed)` for any
/// number of workers.
pub fn monte_carlo_cost<S: Prob, E: Executable<S> + Sync>(
    model: &SystemModel<S>,
    strategy: &E,
    n: u64,
    seed: u64,
    workers: Workers,
) -> Result<CostReport<f64>> {
    let sampler = Sampler::new(model);
    let batches = n.div_ceil(BATCH);
    let parts = workers.map(batches as usize, |b| -> Result<Moments> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let count = BATCH.min(n - b as u64 * BATCH);
        let mut m = Moments { n: count, sum: 0.0, sum_sq: 0.0, stages: vec![(0.0, 0.0); model.horizon] };
        for _ in 0..count {
            let ep = run_episode(model, &sampler, strategy.runner(model), &mut rng, seed)?;
            let total = ep.total();
            m.sum += total;
            m.sum_sq += total * total;
            for (acc, d) in m.stages.iter_mut().zip(&ep.distortion) {
                acc.0 += d.0;
                acc.1 += d.1;
            }
        }
        Ok(m)
    });
    let mut all = Moments { n: 0, sum: 0.0, sum_sq: 0.0, stages: vec![(0.0, 0.0); model.horizon] };
    for part in parts {
        let part = part?;
        all.n += part.n;
        all.sum += part.sum;
        all.sum_sq += part.sum_sq;
        for (acc, d) in all.stages.iter_mut().zip(&part.stages) {
            acc.0 += d.0;
            acc.1 += d.1;
        }
    }
    let count = all.n.max(1) as f64;
    let mean = all.sum / count;
    let std_error = if all.n > 1 {
        let var = ((all.sum_sq - count * mean * mean) / (count - 1.0)).max(0.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    let per_stage = all.stages.iter().map(|&(i, o)| StageCost { inner: i / count, outer: o / count }).collect();
    Ok(CostReport { total: mean, per_stage, mode: CostMode::MonteCarlo { samples: n, std_error, seed } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::exact_cost;
    use crate::exact::Exact;
    use crate::model::{build_special_case, ScenarioChannel, DEFAULT_TRAJECTORY_CAP};
    use crate::random::{random_markov_strategy, random_model, RandomModelSpec};
    use crate::strategy::MarkovStrategy;

    #[test]
    fn noiseless_channels_copy_symbols_and_the_source_is_frozen() {
        let m = build_special_case(2, 2, 4, 3, ScenarioChannel::Noiseless).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(80);
        let s = random_markov_strategy(&mut rng, &m.alphabets, 3);
        for seed in 0..50 {
            let ep = simulate_episode(&m, &s, seed).unwrap();
            assert_eq!(ep.x, ep.y);
            assert_eq!(ep.y, ep.z);
            assert!(ep.u.iter().all(|&u| u == ep.u[0]));
            assert!(ep.v.iter().all(|&v| v == ep.v[0]));
        }
    }

    #[test]
    fn deterministic_system_estimate_is_exact() {
        let mut m = build_special_case(2, 2, 4, 2, ScenarioChannel::Noiseless).unwrap();
        m.source.initial = vec![Exact::from_integer(0), Exact::from_integer(0), Exact::from_integer(1), Exact::from_integer(0)];
        let s = MarkovStrategy::constant(&m.alphabets, 2);
        let exact = exact_cost(&m, &s, DEFAULT_TRAJECTORY_CAP).unwrap().total.to_f64();
        for n in [1, 7, 5000] {
            let mc = monte_carlo_cost(&m, &s, n, 3, Workers::default()).unwrap();
            assert_eq!(mc.total, exact);
        }
    }

    #[test]
    fn same_seed_same_report_for_any_worker_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        let m = random_model(&mut rng, &RandomModelSpec::noisy_binary(2)).convert::<f64>();
        let s = random_markov_strategy(&mut rng, &m.alphabets, 2);
        let a = monte_carlo_cost(&m, &s, 10_000, 9, Workers::SEQUENTIAL).unwrap();
        let b = monte_carlo_cost(&m, &s, 10_000, 9, Workers(4)).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_cost(&m, &s, 10_000, 10, Workers::SEQUENTIAL).unwrap();
        assert_ne!(a.total, c.total);
    }

    #[test]
    fn inner_channel_frequencies_match_the_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        let mut spec = RandomModelSpec::noisy_binary(1);
        spec.x = 3;
        spec.y = 3;
        let m = random_model(&mut rng, &spec);
        let sampler = Sampler::new(&m);
        let mut draws = ChaCha8Rng::seed_from_u64(83);
        let n = 100_000;
        for x in 0..3 {
            let mut counts = [0u32; 3];
            for _ in 0..n {
                counts[sampler.inner(x, draws.random())] += 1;
            }
            for (y, &c) in counts.iter().enumerate() {
                let p = m.channel.inner[x][y].to_f64();
                let se = (p * (1.0 - p) / n as f64).sqrt();
                assert!((c as f64 / n as f64 - p).abs() <= 4.0 * se, "x={x} y={y}");
            }
        }
    }

    #[test]
    fn zero_probability_symbols_are_never_drawn() {
        assert_eq!(invert(&[0.0, 0.5, 0.5, 1.0], 0.0), 1);
        assert_eq!(invert(&[0.5, 1.0 - 1e-17, 1.0 - 1e-17], 0.9999999999), 1);
        assert_eq!(invert(&[0.3, 0.3, 0.9999999], 0.99999995), 2);
    }

    #[test]
    fn traced_episodes_are_the_ones_averaged() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let m = random_model(&mut rng, &RandomModelSpec::noisy_binary(2)).convert::<f64>();
        let s = random_markov_strategy(&mut rng, &m.alphabets, 2);
        let eps = first_episodes(&m, &s, 300, 5).unwrap();
        let mean = eps.iter().map(Episode::total).sum::<f64>() / 300.0;
        let report = monte_carlo_cost(&m, &s, 300, 5, Workers::SEQUENTIAL).unwrap();
        assert!((mean - report.total).abs() < 1e-12);
    }
}

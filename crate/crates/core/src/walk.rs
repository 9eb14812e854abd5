//! Random transposition walk, realized as the embedded discrete-time chain
//! with one-step operator `T = I − L / C(N,2)`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::composition::{binomial2, Composition};
use crate::error::{Error, Result};
use crate::multislice::Multislice;
use crate::operators::{apply_laplacian, laplacian, VertexFunction};
use crate::scalar::{Rational, Scalar};
use crate::limits::Limits;
use crate::spectral::{gap_eigenbasis, kspace_basis};
use crate::vertex::{self, rank_levels, Vertex};

/// Generator identifier stored with every run. Chain `c` of a run seeded with
/// `s` uses `ChaCha8Rng::seed_from_u64(s)` switched to stream `c`.
pub const RNG_ALGORITHM: &str = "chacha8/rand_chacha-0.9/seed_from_u64+stream";

/// Function of the state recorded along the trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    /// `g_j(x_ℓ)` for the K-space generator `g_j`; evaluated without
    /// enumerating the slice.
    GapMember { generator: usize, position: usize },
    /// Values indexed by vertex rank.
    Values { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub composition: Composition,
    /// Total steps, burn-in included.
    pub steps: u64,
    pub seed: u64,
    pub burn_in: u64,
    pub observable: Observable,
    /// Largest autocorrelation lag.
    pub max_lag: usize,
    /// Batches per chain for standard errors.
    pub batches: usize,
    /// Independent chains, each on its own generator stream.
    pub chains: usize,
    /// Occupation counts are kept only for slices up to this size.
    pub occupation_budget: u64,
    /// Leading observable values kept for export; 0 keeps none.
    pub trajectory_limit: usize,
}

impl WalkConfig {
    pub fn new(composition: Composition, steps: u64, seed: u64) -> Self {
        WalkConfig {
            composition,
            steps,
            seed,
            burn_in: 0,
            observable: Observable::GapMember { generator: 0, position: 0 },
            max_lag: 4,
            batches: 20,
            chains: 1,
            occupation_budget: 100_000,
            trajectory_limit: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidWalkConfig(m));
        if self.steps <= self.burn_in {
            return bad(format!("steps {} must exceed burn-in {}", self.steps, self.burn_in));
        }
        if self.max_lag == 0 || self.batches == 0 || self.chains == 0 {
            return bad("max_lag, batches and chains must be positive".into());
        }
        let per_batch = (self.steps - self.burn_in) / self.batches as u64;
        if per_batch <= self.max_lag as u64 {
            return bad(format!("batches of {per_batch} steps are too short for lag {}", self.max_lag));
        }
        if self.composition.n() < 2 || self.composition.is_trivial() {
            return Err(Error::TrivialComposition(self.composition.to_string()));
        }
        Ok(())
    }
}

/// Autocorrelation at one lag with its batch-means standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagEstimate {
    pub lag: usize,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    /// Least squares of `log ρ_h = h log θ` over the positive lags.
    LogLinear,
    /// `θ = ρ_1`, used when `ρ_1 ≤ 0` (no geometric fit exists).
    LagOne,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxationEstimate {
    pub ratio: f64,
    pub stderr: f64,
    pub method: FitMethod,
    pub lags_used: usize,
}

impl RelaxationEstimate {
    /// `|ratio − target| ≤ sigmas · stderr`.
    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.ratio - target).abs() <= sigmas * self.stderr
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkStats {
    pub composition: Composition,
    pub rng: String,
    pub seed: u64,
    pub steps: u64,
    pub burn_in: u64,
    pub chains: usize,
    /// Visits per vertex rank after burn-in, pooled over chains.
    pub occupation: Option<Vec<u64>>,
    pub distribution: Option<Vec<f64>>,
    pub mean: f64,
    pub variance: f64,
    pub autocorrelation: Vec<LagEstimate>,
    /// `ρ_1..ρ_L` for each batch of each chain.
    pub batch_autocorrelation: Vec<Vec<f64>>,
    pub relaxation: Option<RelaxationEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<f64>>,
}

fn pair_table(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(binomial2(n) as usize);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// One step: a uniform pair `i < j` is drawn and swapped; equal entries give
/// a self-loop.
pub fn step<R: Rng>(x: &Vertex, rng: &mut R) -> Vertex {
    let n = x.len();
    if n < 2 {
        return x.clone();
    }
    let p = rng.random_range(0..binomial2(n) as usize);
    let (i, j) = pair_table(n)[p];
    let mut levels = x.levels().to_vec();
    levels.swap(i, j);
    Vertex::from_raw(levels)
}

/// `1 − Γ / C(N,2) = 1 − 2/(N−1)`: the `T`-eigenvalue of the gap eigenspace,
/// with `Γ = N`.
pub fn decay_target(k: &Composition) -> Result<Rational> {
    let n = k.n() as i64;
    if n < 2 {
        return Err(Error::TooFewParticles { required: 2, found: k.n() });
    }
    Ok(Rational::from(1) - Rational::new(2, n - 1))
}

enum Evaluator {
    Level(Vec<f64>, usize),
    Ranked(Vec<f64>),
}

impl Evaluator {
    fn new(cfg: &WalkConfig, card: Option<u64>) -> Result<Self> {
        let k = &cfg.composition;
        match &cfg.observable {
            Observable::GapMember { generator, position } => {
                let basis = kspace_basis(k)?;
                let g = basis.get(*generator).ok_or(Error::DimensionMismatch { expected: basis.len(), found: generator + 1 })?;
                if *position >= k.n() {
                    return Err(Error::PositionOutOfRange { position: *position, n: k.n() });
                }
                Ok(Evaluator::Level(g.values().iter().map(Rational::to_f64).collect(), *position))
            }
            Observable::Values { values } => {
                let card = card.ok_or_else(|| Error::BudgetExceeded {
                    cardinality: k.cardinality().to_string(),
                    budget: cfg.occupation_budget,
                })?;
                if values.len() as u64 != card {
                    return Err(Error::DimensionMismatch { expected: card as usize, found: values.len() });
                }
                Ok(Evaluator::Ranked(values.clone()))
            }
        }
    }

    fn needs_rank(&self) -> bool {
        matches!(self, Evaluator::Ranked(_))
    }

    fn eval(&self, levels: &[u8], rank: u64) -> f64 {
        match self {
            Evaluator::Level(g, pos) => g[levels[*pos] as usize],
            Evaluator::Ranked(v) => v[rank as usize],
        }
    }
}

struct ChainRun {
    occupation: Option<Vec<u64>>,
    trajectory: Vec<f64>,
}

fn run_chain(cfg: &WalkConfig, eval: &Evaluator, card: Option<u64>, chain: usize) -> ChainRun {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(chain as u64);
    let k = &cfg.composition;
    let pairs = pair_table(k.n());
    let mut x = vertex::first_levels(k);
    let track = card.is_some();
    let need_rank = track || eval.needs_rank();
    let mut occupation = card.map(|c| vec![0u64; c as usize]);
    let mut trajectory = Vec::with_capacity((cfg.steps - cfg.burn_in + 1) as usize);
    let rank_of = |x: &[u8]| if need_rank { rank_levels(x, k.counts(), card.unwrap_or(0)) } else { 0 };
    let mut record = |x: &[u8], occupation: &mut Option<Vec<u64>>| {
        let r = rank_of(x);
        if let Some(o) = occupation {
            o[r as usize] += 1;
        }
        trajectory.push(eval.eval(x, r));
    };
    if cfg.burn_in == 0 {
        record(&x, &mut occupation);
    }
    for t in 1..=cfg.steps {
        let (i, j) = pairs[rng.random_range(0..pairs.len())];
        x.swap(i, j);
        if t >= cfg.burn_in {
            record(&x, &mut occupation);
        }
    }
    ChainRun { occupation, trajectory }
}

/// Raw moments of the pairs `(y_t, y_{t+h})`; merging is associative, so
/// chains and batches combine freely.
#[derive(Debug, Clone, Copy, Default)]
struct LagMoments {
    n: f64,
    sx: f64,
    sz: f64,
    sxx: f64,
    szz: f64,
    sxz: f64,
}

impl LagMoments {
    fn of(y: &[f64], h: usize, shift: f64) -> Self {
        let mut m = LagMoments::default();
        for (a, b) in y.iter().zip(y.get(h..).unwrap_or(&[])) {
            let (x, z) = (a - shift, b - shift);
            m.n += 1.0;
            m.sx += x;
            m.sz += z;
            m.sxx += x * x;
            m.szz += z * z;
            m.sxz += x * z;
        }
        m
    }

    fn merge(self, o: Self) -> Self {
        LagMoments {
            n: self.n + o.n,
            sx: self.sx + o.sx,
            sz: self.sz + o.sz,
            sxx: self.sxx + o.sxx,
            szz: self.szz + o.szz,
            sxz: self.sxz + o.sxz,
        }
    }

    /// Pearson correlation of `y_t` with `y_{t+h}`.
    fn correlation(&self) -> f64 {
        let cxx = self.sxx - self.sx * self.sx / self.n;
        let czz = self.szz - self.sz * self.sz / self.n;
        let cxz = self.sxz - self.sx * self.sz / self.n;
        cxz / (cxx * czz).sqrt()
    }
}

fn autocorrelations(y: &[f64], max_lag: usize) -> Vec<f64> {
    let shift = y.first().copied().unwrap_or(0.0);
    (1..=max_lag).map(|h| LagMoments::of(y, h, shift).correlation()).collect()
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let b = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / b;
    if xs.len() < 2 {
        return (m, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (b - 1.0);
    (m, (var / b).sqrt())
}

/// Runs the configured chains from the rank-0 vertex. Identical configs give
/// identical statistics.
pub fn simulate(cfg: &WalkConfig) -> Result<WalkStats> {
    cfg.validate()?;
    let k = &cfg.composition;
    let card = k.cardinality_u64().filter(|&c| c <= cfg.occupation_budget);
    let eval = Evaluator::new(cfg, card)?;
    let runs: Vec<ChainRun> = (0..cfg.chains).into_par_iter().map(|c| run_chain(cfg, &eval, card, c)).collect();

    let total: usize = runs.iter().map(|r| r.trajectory.len()).sum();
    let shift = runs[0].trajectory[0];
    let zero = LagMoments::of(&[], 0, 0.0);
    let moments: Vec<LagMoments> = (0..=cfg.max_lag)
        .map(|h| runs.iter().fold(zero, |acc, r| acc.merge(LagMoments::of(&r.trajectory, h, shift))))
        .collect();
    let mean = moments[0].sx / total as f64 + shift;
    let variance = (moments[0].sxx - moments[0].sx * moments[0].sx / total as f64) / total as f64;

    let mut batch_autocorrelation = Vec::with_capacity(cfg.chains * cfg.batches);
    for r in &runs {
        let len = r.trajectory.len() / cfg.batches;
        for b in 0..cfg.batches {
            let batch = &r.trajectory[b * len..(b + 1) * len];
            batch_autocorrelation.push(autocorrelations(batch, cfg.max_lag));
        }
    }
    let autocorrelation = (1..=cfg.max_lag)
        .map(|h| {
            let per_batch: Vec<f64> = batch_autocorrelation.iter().map(|a| a[h - 1]).collect();
            LagEstimate { lag: h, value: moments[h].correlation(), stderr: mean_and_stderr(&per_batch).1 }
        })
        .collect();

    let occupation = card.map(|c| {
        let mut o = vec![0u64; c as usize];
        for r in &runs {
            for (a, b) in o.iter_mut().zip(r.occupation.as_ref().expect("tracked")) {
                *a += b;
            }
        }
        o
    });
    let distribution = occupation.as_ref().map(|o| {
        let s: u64 = o.iter().sum();
        o.iter().map(|&c| c as f64 / s as f64).collect()
    });
    let trajectory =
        (cfg.trajectory_limit > 0).then(|| runs[0].trajectory.iter().take(cfg.trajectory_limit).copied().collect());

    let mut stats = WalkStats {
        composition: k.clone(),
        rng: RNG_ALGORITHM.to_string(),
        seed: cfg.seed,
        steps: cfg.steps,
        burn_in: cfg.burn_in,
        chains: cfg.chains,
        occupation,
        distribution,
        mean,
        variance,
        autocorrelation,
        batch_autocorrelation,
        relaxation: None,
        trajectory,
    };
    stats.relaxation = relaxation_estimate(&stats).ok();
    Ok(stats)
}

// Slope of `log ρ_h` against `h` through the origin, over the given lags.
fn log_fit(rho: &[f64], lags: usize) -> Option<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &r) in rho.iter().take(lags).enumerate() {
        if r > 0.0 {
            let h = (i + 1) as f64;
            num += h * r.ln();
            den += h * h;
        }
    }
    (den > 0.0).then(|| (num / den).exp())
}

/// Geometric decay ratio `θ` with `ρ_h ≈ θ^h`. The fit runs over the leading
/// lags whose autocorrelation is positive and at least two standard errors
/// from zero; `ρ_0 = 1` pins the line through the origin.
pub fn relaxation_estimate(stats: &WalkStats) -> Result<RelaxationEstimate> {
    if !(stats.variance > 0.0) {
        return Err(Error::DegenerateObservable);
    }
    let rho: Vec<f64> = stats.autocorrelation.iter().map(|e| e.value).collect();
    let lags = stats
        .autocorrelation
        .iter()
        .take_while(|e| e.value > 0.0 && (e.value > 2.0 * e.stderr || e.stderr.is_nan()))
        .count();
    if lags == 0 {
        let per_batch: Vec<f64> = stats.batch_autocorrelation.iter().map(|a| a[0]).collect();
        let stderr = mean_and_stderr(&per_batch).1;
        return Ok(RelaxationEstimate { ratio: rho[0], stderr, method: FitMethod::LagOne, lags_used: 1 });
    }
    let ratio = log_fit(&rho, lags).expect("positive leading lags");
    let per_batch: Vec<f64> = stats.batch_autocorrelation.iter().filter_map(|a| log_fit(a, lags)).collect();
    let stderr = mean_and_stderr(&per_batch).1;
    Ok(RelaxationEstimate { ratio, stderr, method: FitMethod::LogLinear, lags_used: lags })
}

/// Goodness of fit of the occupation counts to the uniform measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub composition: Composition,
    pub samples: u64,
    pub stride: u64,
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub critical_value: f64,
    pub p_value: f64,
    pub pass: bool,
}

/// Chi-square test of uniformity at the given confidence level, on states
/// thinned to every `stride`-th step so successive samples are close to
/// independent.
pub fn stationarity_test(k: &Composition, samples: u64, stride: u64, seed: u64, level: f64) -> Result<ChiSquareTest> {
    let card = k.cardinality_u64().filter(|&c| c >= 2 && c <= 100_000).ok_or_else(|| {
        Error::InvalidWalkConfig(format!("chi-square test needs 2..=100000 vertices, {k} has {}", k.cardinality()))
    })?;
    if stride == 0 || samples == 0 {
        return Err(Error::InvalidWalkConfig("samples and stride must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = pair_table(k.n());
    let mut x = vertex::first_levels(k);
    let mut counts = vec![0u64; card as usize];
    for _ in 0..samples {
        for _ in 0..stride {
            let (i, j) = pairs[rng.random_range(0..pairs.len())];
            x.swap(i, j);
        }
        counts[rank_levels(&x, k.counts(), card) as usize] += 1;
    }
    let expected = samples as f64 / card as f64;
    let statistic = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let df = card as usize - 1;
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::InvalidWalkConfig(e.to_string()))?;
    let critical_value = dist.inverse_cdf(level);
    Ok(ChiSquareTest {
        composition: k.clone(),
        samples,
        stride,
        statistic,
        degrees_of_freedom: df,
        critical_value,
        p_value: 1.0 - dist.cdf(statistic),
        pass: statistic <= critical_value,
    })
}

/// Empirical one-step kernel against `T = I − L/C(N,2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelCheck {
    pub composition: Composition,
    pub draws_per_row: u64,
    /// Largest `|p̂ − T| / σ` over entries with `0 < T < 1`.
    pub max_z: f64,
    /// Transitions observed where `T` is zero.
    pub impossible: u64,
    pub pass: bool,
}

pub fn kernel_check(k: &Composition, draws: u64, seed: u64, sigmas: f64, limits: &Limits) -> Result<KernelCheck> {
    let g = Multislice::new(k, limits.enumeration_budget)?;
    if g.n() < 2 {
        return Err(Error::TooFewParticles { required: 2, found: g.n() });
    }
    let lap = laplacian(&g, limits);
    let c = binomial2(g.n()) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut max_z, mut impossible) = (0.0f64, 0u64);
    for v in 0..g.len() {
        let mut counts = vec![0u64; g.len()];
        for _ in 0..draws {
            let y = step(&g.vertex(v), &mut rng);
            counts[g.rank_of(&y)?] += 1;
        }
        for (w, &cnt) in counts.iter().enumerate() {
            let t = (v == w) as i64 as f64 - lap.entry(v, w) as f64 / c;
            let p = cnt as f64 / draws as f64;
            if t <= 0.0 || t >= 1.0 {
                impossible += (t <= 0.0 && cnt > 0) as u64 + (t >= 1.0 && cnt < draws) as u64;
                continue;
            }
            let sigma = (t * (1.0 - t) / draws as f64).sqrt();
            max_z = max_z.max((p - t).abs() / sigma);
        }
    }
    Ok(KernelCheck { composition: k.clone(), draws_per_row: draws, max_z, impossible, pass: impossible == 0 && max_z <= sigmas })
}

/// Checks `T f = (1 − 2/(N−1)) f` exactly for every gap eigenbasis member.
pub fn kernel_eigen_check(g: &Multislice) -> Result<bool> {
    let theta = decay_target(g.composition())?;
    let c = Rational::from(binomial2(g.n()) as i64);
    for member in gap_eigenbasis(g)?.members() {
        let f = &member.function;
        let tf: VertexFunction<Rational> = f.sub(&apply_laplacian(g, f)?.scale(&c.recip()))?;
        if tf != f.scale(&theta) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// CSV table `lag,autocorrelation,stderr`.
pub fn write_autocorrelation_csv<W: Write>(stats: &WalkStats, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lag", "autocorrelation", "stderr"]).map_err(io)?;
    for e in &stats.autocorrelation {
        w.write_record([e.lag.to_string(), e.value.to_string(), e.stderr.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

fn io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(v: &[usize]) -> Composition {
        Composition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn step_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = Vertex::new(vec![0, 1]).unwrap();
        for _ in 0..10 {
            assert_eq!(step(&x, &mut rng), Vertex::new(vec![1, 0]).unwrap());
        }
        let y = Vertex::new(vec![0, 0, 0]).unwrap();
        assert_eq!(step(&y, &mut rng), y);
        let z = Vertex::new(vec![2, 0, 1, 1]).unwrap();
        for _ in 0..20 {
            assert!(step(&z, &mut rng).realizes(&k(&[1, 2, 1])));
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = WalkConfig::new(k(&[2, 1]), 100, 1);
        assert!(cfg.validate().is_ok());
        cfg.burn_in = 100;
        assert!(matches!(cfg.validate(), Err(Error::InvalidWalkConfig(_))));
        let cfg = WalkConfig::new(k(&[3]), 100, 1);
        assert!(matches!(simulate(&cfg), Err(Error::TrivialComposition(_))));
        let mut cfg = WalkConfig::new(k(&[2, 1]), 100, 1);
        cfg.observable = Observable::Values { values: vec![1.0; 2] };
        assert!(matches!(simulate(&cfg), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn deterministic_and_normalized() {
        let mut cfg = WalkConfig::new(k(&[2, 2]), 20_000, 42);
        cfg.burn_in = 10;
        cfg.chains = 3;
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a, b);
        let total: f64 = a.distribution.as_ref().unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(a.occupation.as_ref().unwrap().iter().sum::<u64>(), 3 * (20_000 - 10 + 1));
        cfg.seed = 43;
        assert_ne!(simulate(&cfg).unwrap(), a);
    }

    #[test]
    fn two_vertex_alternation() {
        let stats = simulate(&WalkConfig::new(k(&[1, 1]), 1_000, 5)).unwrap();
        let est = stats.relaxation.unwrap();
        assert_eq!(est.method, FitMethod::LagOne);
        assert!((est.ratio + 1.0).abs() < 1e-12);
        assert_eq!(decay_target(&k(&[1, 1])).unwrap(), Rational::from(-1));
    }

    #[test]
    fn constant_observable_is_degenerate() {
        let mut cfg = WalkConfig::new(k(&[2, 1]), 1_000, 5);
        cfg.observable = Observable::Values { values: vec![2.0; 3] };
        let stats = simulate(&cfg).unwrap();
        assert!(stats.relaxation.is_none());
        assert_eq!(relaxation_estimate(&stats), Err(Error::DegenerateObservable));
    }

    #[test]
    fn occupation_is_dropped_above_budget() {
        let mut cfg = WalkConfig::new(k(&[2, 2, 2]), 1_000, 5);
        cfg.occupation_budget = 10;
        let stats = simulate(&cfg).unwrap();
        assert!(stats.occupation.is_none() && stats.distribution.is_none());
        cfg.observable = Observable::Values { values: vec![0.0; 90] };
        assert!(matches!(simulate(&cfg), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn decay_near_target_on_small_run() {
        let stats = simulate(&WalkConfig::new(k(&[2, 2]), 200_000, 11)).unwrap();
        let est = stats.relaxation.unwrap();
        let target = decay_target(&k(&[2, 2])).unwrap().to_f64();
        assert!((target - 1.0 / 3.0).abs() < 1e-15);
        assert!(est.within(target, 4.0), "{est:?}");
    }

    #[test]
    fn exact_kernel_eigenvalue() {
        for v in [&[1, 1][..], &[2, 1], &[2, 2, 1], &[1, 1, 1, 1]] {
            let g = Multislice::new(&k(v), 1000).unwrap();
            assert!(kernel_eigen_check(&g).unwrap());
        }
    }

    #[test]
    fn kernel_and_chi_square_small() {
        let limits = Limits::default();
        let kc = kernel_check(&k(&[2, 1]), 20_000, 3, 4.0, &limits).unwrap();
        assert!(kc.pass, "{kc:?}");
        let t = stationarity_test(&k(&[2, 1]), 20_000, 10, 3, 0.99).unwrap();
        assert_eq!(t.degrees_of_freedom, 2);
        assert!((t.critical_value - 9.2103).abs() < 1e-3);
        assert!(stationarity_test(&k(&[3]), 10, 1, 0, 0.99).is_err());
    }

    #[test]
    fn csv_export() {
        let stats = simulate(&WalkConfig::new(k(&[2, 1, 1]), 5_000, 1)).unwrap();
        let mut buf = Vec::new();
        write_autocorrelation_csv(&stats, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("lag,autocorrelation,stderr\n1,"));
        assert_eq!(text.lines().count(), 5);
    }
}

//! Monte Carlo studies: concentration of the mass of a random half of a
//! near-uniform distribution, and leak statistics of random one-bit reductions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scheme::Scheme;
use crate::transform::search_splitting;

/// Compensated (Neumaier) summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Probability weights over `0..len()`, stored or computed on demand.
pub trait WeightSource {
    fn len(&self) -> usize;
    fn weight(&self, x: usize) -> f64;
}

impl WeightSource for [f64] {
    fn len(&self) -> usize {
        <[f64]>::len(self)
    }

    fn weight(&self, x: usize) -> f64 {
        self[x]
    }
}

impl WeightSource for Vec<f64> {
    fn len(&self) -> usize {
        Vec::len(self)
    }

    fn weight(&self, x: usize) -> f64 {
        self[x]
    }
}

/// Weights given by a closure.
pub struct FnWeights<F: Fn(usize) -> f64> {
    pub len: usize,
    pub f: F,
}

impl<F: Fn(usize) -> f64> WeightSource for FnWeights<F> {
    fn len(&self) -> usize {
        self.len
    }

    fn weight(&self, x: usize) -> f64 {
        (self.f)(x)
    }
}

/// Procedural test distributions on `0..k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// 3/(2k) on even points, 1/(2k) on odd points; entropy log2 k - 0.1887.
    NearUniform,
    Uniform,
    /// 1/2 on point 0, the rest spread uniformly.
    Spike,
}

impl Family {
    pub fn weights(self, k: usize) -> FnWeights<impl Fn(usize) -> f64> {
        let kf = k as f64;
        FnWeights {
            len: k,
            f: move |x: usize| match self {
                Family::NearUniform => {
                    if x.is_multiple_of(2) {
                        1.5 / kf
                    } else {
                        0.5 / kf
                    }
                }
                Family::Uniform => 1.0 / kf,
                Family::Spike => {
                    if x == 0 {
                        0.5
                    } else {
                        0.5 / (kf - 1.0)
                    }
                }
            },
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "near-uniform" => Ok(Family::NearUniform),
            "uniform" => Ok(Family::Uniform),
            "spike" => Ok(Family::Spike),
            _ => Err(Error::InvalidParameter(format!(
                "unknown distribution `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitLemmaParams {
    pub k: usize,
    pub delta: f64,
    pub gamma: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SplitLemmaParams {
    /// `gamma = None` selects k^(-3/4).
    pub fn new(k: usize, delta: f64, gamma: Option<f64>, trials: u64, seed: u64) -> Result<Self> {
        if k % 2 == 1 {
            return Err(Error::OddK(k));
        }
        if k < 2 || k > u32::MAX as usize {
            return Err(Error::OutOfRange(format!("k = {k} not in 2..=2^32-1")));
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta = {delta} must be >= 0"
            )));
        }
        let gamma = gamma.unwrap_or_else(|| (k as f64).powf(-0.75));
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma = {gamma} not in (0,1)"
            )));
        }
        if gamma * k as f64 <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma * k = {} must exceed 1",
                gamma * k as f64
            )));
        }
        if trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        Ok(SplitLemmaParams {
            k,
            delta,
            gamma,
            trials,
            seed,
        })
    }

    /// τ = (1 + δ) / (2 log2(γ k))
    pub fn tau(&self) -> f64 {
        (1.0 + self.delta) / (2.0 * (self.gamma * self.k as f64).log2())
    }

    /// 1 - 2 exp(-4τ² / (k γ²)); may be negative.
    pub fn bound(&self) -> f64 {
        let tau = self.tau();
        1.0 - 2.0 * (-4.0 * tau * tau / (self.k as f64 * self.gamma * self.gamma)).exp()
    }

    /// (1 + δ) / log2(γ k)
    pub fn heavy_mass_bound(&self) -> f64 {
        (1.0 + self.delta) / (self.gamma * self.k as f64).log2()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub params: SplitLemmaParams,
    pub tau: f64,
    pub bound: f64,
    pub entropy: f64,
    /// Σ of the weights above γ
    pub p_gamma: f64,
    pub heavy_mass_bound: f64,
    /// |Pr[X ∈ B] - 1/2| per trial
    pub deviations: Vec<f64>,
    /// |Pr[X ∉ B] - 1/2| per trial
    pub complement_deviations: Vec<f64>,
    pub successes: Vec<bool>,
    pub empirical_success_rate: f64,
}

/// Samples uniformly random halves B of `0..k` and measures Pr[X ∈ B].
pub fn splitting_concentration<W: WeightSource + ?Sized>(
    x: &W,
    params: &SplitLemmaParams,
) -> Result<ConcentrationReport> {
    let k = params.k;
    if x.len() != k {
        return Err(Error::InvalidParameter(format!(
            "weight source has {} points, k = {k}",
            x.len()
        )));
    }
    if let Some(i) = (0..k).find(|&i| !(x.weight(i) >= 0.0)) {
        return Err(Error::InvalidDistribution(format!(
            "weight {i} is negative"
        )));
    }
    let total = neumaier_sum((0..k).map(|i| x.weight(i)));
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDistribution(format!(
            "weights sum to {total}"
        )));
    }
    let entropy = neumaier_sum((0..k).map(|i| {
        let p = x.weight(i);
        if p > 0.0 {
            -p * p.log2()
        } else {
            0.0
        }
    }));
    let required = (k as f64).log2() - params.delta;
    if entropy < required - 1e-12 {
        return Err(Error::EntropyDeficitViolated { entropy, required });
    }
    let p_gamma = neumaier_sum((0..k).map(|i| x.weight(i)).filter(|&p| p > params.gamma));
    let heavy = params.heavy_mass_bound();
    if p_gamma > heavy + 1e-9 {
        return Err(Error::HeavyMassBoundViolated {
            p_gamma,
            bound: heavy,
        });
    }

    let tau = params.tau();
    let half = k / 2;
    let mut buf: Vec<u32> = Vec::with_capacity(k);
    let mut deviations = Vec::with_capacity(params.trials as usize);
    let mut complement = Vec::with_capacity(params.trials as usize);
    let mut successes = Vec::with_capacity(params.trials as usize);
    for trial in 0..params.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(trial);
        buf.clear();
        buf.extend(0..k as u32);
        for i in 0..half {
            let j = rng.gen_range(i..k);
            buf.swap(i, j);
        }
        let inside = neumaier_sum(buf[..half].iter().map(|&i| x.weight(i as usize)));
        let outside = neumaier_sum(buf[half..].iter().map(|&i| x.weight(i as usize)));
        let dev = (inside - 0.5).abs();
        deviations.push(dev);
        complement.push((outside - 0.5).abs());
        successes.push(dev <= 2.0 * tau);
    }
    let rate = successes.iter().filter(|&&s| s).count() as f64 / successes.len() as f64;
    Ok(ConcentrationReport {
        params: *params,
        tau,
        bound: params.bound(),
        entropy,
        p_gamma,
        heavy_mass_bound: heavy,
        deviations,
        complement_deviations: complement,
        successes,
        empirical_success_rate: rate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeakStats {
    pub epsilon: f64,
    pub bound: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub fraction_within_bound: f64,
    pub data_processing_holds: bool,
    pub eps_primes: Vec<f64>,
}

/// Statistics of ε′ over `trials` seeded random splittings.
pub fn leak_distribution(s: &Scheme, trials: u64, seed: u64) -> Result<LeakStats> {
    let search = search_splitting(s, trials, seed)?;
    let eps: Vec<f64> = search.trials.iter().map(|t| t.eps_prime).collect();
    let mut sorted = eps.clone();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let median = if m % 2 == 1 {
        sorted[m / 2]
    } else {
        (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0
    };
    Ok(LeakStats {
        epsilon: search.epsilon,
        bound: search.bound,
        min: sorted[0],
        median,
        max: sorted[m - 1],
        fraction_within_bound: search.fraction_within_bound,
        data_processing_holds: search.trials.iter().all(|t| t.data_processing_holds),
        eps_primes: eps,
    })
}

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::access::{lex_cmp, Subset};
use crate::audit::audit;
use crate::dist::Projector;
use crate::error::{Error, Result};
use crate::scheme::Scheme;

use super::check_reducible;

/// The half K₀ of a fair bipartition of the secret support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    k0: Vec<i64>,
}

impl Splitting {
    pub fn new(mut k0: Vec<i64>) -> Self {
        k0.sort_unstable();
        Splitting { k0 }
    }

    /// First half of a Fisher-Yates shuffle of the sorted support.
    pub fn random(support: &[i64], rng: &mut impl rand::Rng) -> Self {
        let mut v = support.to_vec();
        v.sort_unstable();
        v.shuffle(rng);
        v.truncate(support.len() / 2);
        Splitting::new(v)
    }

    /// Seeded splitting for trial `trial`: stream `trial` of ChaCha8 seeded by `seed`.
    pub fn for_trial(support: &[i64], seed: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        Splitting::random(support, &mut rng)
    }

    pub fn k0(&self) -> &[i64] {
        &self.k0
    }

    pub fn contains(&self, v: i64) -> bool {
        self.k0.binary_search(&v).is_ok()
    }

    /// `support` must be sorted.
    pub fn check(&self, support: &[i64]) -> Result<()> {
        if self.k0.len() * 2 != support.len() {
            return Err(Error::InvalidSplitting(format!(
                "K0 has {} values, expected {}",
                self.k0.len(),
                support.len() / 2
            )));
        }
        if self.k0.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSplitting("K0 has repeated values".into()));
        }
        if let Some(v) = self.k0.iter().find(|v| support.binary_search(v).is_err()) {
            return Err(Error::InvalidSplitting(format!(
                "{v} is not a secret value"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitTrial {
    pub index: u64,
    pub splitting: Splitting,
    /// max over forbidden B of I(ξ : σ_B)
    pub eps_prime: f64,
    pub worst_forbidden: Subset,
    /// I(ξ : σ_B) ≤ I(κ : σ_B) + 1e-9 for every checked B
    pub data_processing_holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSearch {
    /// max(ε₁, ε₂) of the input scheme
    pub epsilon: f64,
    /// 8 ε^(2/3)
    pub bound: f64,
    pub trials: Vec<SplitTrial>,
    pub best: usize,
    pub fraction_within_bound: f64,
}

impl SplitSearch {
    pub fn best_trial(&self) -> &SplitTrial {
        &self.trials[self.best]
    }
}

/// Weights of (σ_B value, κ value) pairs for one group B.
struct LeakTable {
    group: Subset,
    forbidden: bool,
    b_mass: Vec<u128>,
    entries: Vec<(u32, u32, u128)>,
    kappa_information: f64,
}

impl LeakTable {
    fn new(s: &Scheme, group: Subset, support: &[i64]) -> Result<Self> {
        let d = s.dist();
        let proj = Projector::new(d, s.share_set(group));
        let kv = s.secret_var();
        let mut b_index = FxHashMap::default();
        let mut b_mass: Vec<u128> = Vec::new();
        let mut pairs: FxHashMap<(u32, u32), u128> = FxHashMap::default();
        for (row, w) in d.atoms() {
            let next = b_index.len() as u32;
            let b = *b_index.entry(proj.key(row)).or_insert(next);
            if b as usize == b_mass.len() {
                b_mass.push(0);
            }
            b_mass[b as usize] += w;
            let k = support.binary_search(&row[kv]).expect("in support") as u32;
            *pairs.entry((b, k)).or_insert(0) += w;
        }
        let mut entries: Vec<(u32, u32, u128)> =
            pairs.into_iter().map(|((b, k), w)| (b, k, w)).collect();
        entries.sort_unstable();
        Ok(LeakTable {
            group,
            forbidden: !s.access().is_authorized(group),
            b_mass,
            entries,
            kappa_information: d.mutual_information(s.secret_set(), s.share_set(group))?,
        })
    }

    /// I(ξ : σ_B) for ξ uniform, 0 iff κ ∈ K₀.
    fn xi_information(&self, in_k0: &[bool], total: u128, mass0: &mut Vec<u128>) -> f64 {
        mass0.clear();
        mass0.resize(self.b_mass.len(), 0);
        for &(b, k, w) in &self.entries {
            if in_k0[k as usize] {
                mass0[b as usize] += w;
            }
        }
        if mass0.iter().zip(&self.b_mass).all(|(&m0, &m)| 2 * m0 == m) {
            return 0.0;
        }
        let t = total as f64;
        let cond: f64 = mass0
            .iter()
            .zip(&self.b_mass)
            .map(|(&m0, &m)| {
                let p = m0 as f64 / m as f64;
                m as f64 / t * binary_entropy(p)
            })
            .sum();
        (1.0 - cond).max(0.0)
    }
}

fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Table budget above which the data-processing check covers forbidden groups only.
const ALL_GROUPS_BUDGET: u128 = 1 << 25;

/// Evaluates `trials` seeded random splittings of a uniform secret with even
/// support.
pub fn search_splitting(s: &Scheme, trials: u64, seed: u64) -> Result<SplitSearch> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let support = check_reducible(s)?;
    let report = audit(s)?;
    let epsilon = report.epsilon1.max(report.epsilon2);
    let bound = 8.0 * epsilon.powf(2.0 / 3.0);

    let n = s.n_participants();
    let all_groups = (s.dist().len() as u128) << n <= ALL_GROUPS_BUDGET;
    let tables: Vec<LeakTable> = (0u32..1 << n)
        .map(Subset)
        .filter(|&g| all_groups || !s.access().is_authorized(g))
        .map(|g| LeakTable::new(s, g, &support))
        .collect::<Result<_>>()?;

    let total = s.dist().total();
    let mut mass0 = Vec::new();
    let mut in_k0 = vec![false; support.len()];
    let mut out = Vec::with_capacity(trials as usize);
    for index in 0..trials {
        let splitting = Splitting::for_trial(&support, seed, index);
        for (flag, v) in in_k0.iter_mut().zip(&support) {
            *flag = splitting.contains(*v);
        }
        let mut eps_prime = 0.0f64;
        let mut worst = Subset::EMPTY;
        let mut dp = true;
        for t in &tables {
            let i = t.xi_information(&in_k0, total, &mut mass0);
            if i > t.kappa_information + 1e-9 {
                dp = false;
            }
            if t.forbidden
                && (i > eps_prime + 1e-12
                    || ((i - eps_prime).abs() <= 1e-12 && lex_cmp(t.group, worst).is_lt()))
            {
                eps_prime = eps_prime.max(i);
                worst = t.group;
            }
        }
        out.push(SplitTrial {
            index,
            splitting,
            eps_prime,
            worst_forbidden: worst,
            data_processing_holds: dp,
        });
    }
    let best = out.iter().enumerate().fold(
        0,
        |b, (i, t)| if t.eps_prime < out[b].eps_prime { i } else { b },
    );
    let within = out.iter().filter(|t| t.eps_prime <= bound).count();
    Ok(SplitSearch {
        epsilon,
        bound,
        best,
        fraction_within_bound: within as f64 / out.len() as f64,
        trials: out,
    })
}

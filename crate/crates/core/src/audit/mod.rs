//! Exact audit of a scheme: secret and share entropies, rate, the worst
//! missing-information and leak ratios over all groups, and the structural
//! perfect/ideal flags.

mod blocks;

use rustc_hash::FxHashMap;

use crate::access::{lex_cmp, Subset, MAX_PARTICIPANTS};
use crate::dist::{entropy_of_weights, products_equal, VarSet};
use crate::error::{Error, Result};
use crate::scheme::Scheme;

/// Exact facts about one group A.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupEval {
    pub group: Subset,
    pub authorized: bool,
    /// H(κ | σ_A), exactly 0 when `determined`
    pub missing: f64,
    /// I(κ : σ_A), exactly 0 when `independent`
    pub leak: f64,
    pub determined: bool,
    pub independent: bool,
}

impl GroupEval {
    fn new(
        group: Subset,
        authorized: bool,
        n_bits: f64,
        cond: f64,
        determined: bool,
        independent: bool,
    ) -> Self {
        let cond = cond.clamp(0.0, n_bits);
        let missing = if determined { 0.0 } else { cond };
        let leak = if independent { 0.0 } else { n_bits - cond };
        GroupEval {
            group,
            authorized,
            missing,
            leak,
            determined,
            independent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Factorize over access-structure components when the scheme is large.
    #[default]
    Auto,
    /// Group atoms separately for every one of the 2^n groups.
    Exhaustive,
    /// Factorize whenever the components are independent given κ.
    Factorized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exhaustive,
    Factorized,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AuditOptions {
    pub strategy: Strategy,
    pub detail: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    /// N = H(κ)
    pub secret_entropy: f64,
    pub share_entropies: Vec<f64>,
    /// S = max_p H(σ_p)
    pub max_share_entropy: f64,
    /// ρ = N / S
    pub rate: f64,
    /// max over authorized A of H(κ|σ_A) / N
    pub epsilon1: f64,
    /// max over forbidden B of I(κ:σ_B) / N
    pub epsilon2: f64,
    pub perfect: bool,
    pub ideal: bool,
    pub worst_authorized: Subset,
    pub worst_forbidden: Subset,
    pub secret_alphabet: usize,
    pub share_alphabets: Vec<usize>,
    pub method: Method,
    /// Every group in ascending bitmask order, when requested.
    pub detail: Option<Vec<GroupEval>>,
}

pub fn audit(s: &Scheme) -> Result<AuditReport> {
    audit_with(s, AuditOptions::default())
}

pub fn is_perfect(s: &Scheme) -> Result<bool> {
    Ok(audit(s)?.perfect)
}

/// Every essential participant's share alphabet has the secret's size.
pub fn is_ideal(s: &Scheme) -> bool {
    let k = s.secret_support().len();
    s.access()
        .essential_participants()
        .members()
        .iter()
        .all(|&p| s.dist().alphabet(s.share_var(p)).len() == k)
}

/// Above this many atom-group visits, `Strategy::Auto` tries factorizing.
const FACTORIZE_THRESHOLD: u128 = 1 << 24;

pub fn audit_with(s: &Scheme, options: AuditOptions) -> Result<AuditReport> {
    let n = s.n_participants();
    if n > MAX_PARTICIPANTS {
        return Err(Error::TooManyParticipants {
            found: n,
            limit: MAX_PARTICIPANTS,
        });
    }
    let d = s.dist();
    let n_bits = d.entropy(s.secret_set())?;
    let share_entropies = (1..=n)
        .map(|p| d.entropy(VarSet::single(s.share_var(p))))
        .collect::<Result<Vec<f64>>>()?;
    let max_share = share_entropies.iter().copied().fold(0.0, f64::max);

    let try_blocks = match options.strategy {
        Strategy::Exhaustive => false,
        Strategy::Factorized => true,
        Strategy::Auto => (d.len() as u128) << n > FACTORIZE_THRESHOLD,
    };
    let mut evals = None;
    let mut method = Method::Exhaustive;
    if try_blocks {
        if let Some(e) = blocks::evaluate(s, n_bits)? {
            evals = Some(e);
            method = Method::Factorized;
        }
    }
    let evals = match evals {
        Some(e) => e,
        None => exhaustive(s, n_bits)?,
    };

    let pick = |authorized: bool, value: fn(&GroupEval) -> f64| {
        let max = evals
            .iter()
            .filter(|e| e.authorized == authorized)
            .map(value)
            .fold(0.0, f64::max);
        let worst = evals
            .iter()
            .filter(|e| e.authorized == authorized && value(e) >= max - 1e-12)
            .map(|e| e.group)
            .min_by(|a, b| lex_cmp(*a, *b))
            .unwrap_or(Subset::EMPTY);
        (max, worst)
    };
    let (max_missing, worst_authorized) = pick(true, |e| e.missing);
    let (max_leak, worst_forbidden) = pick(false, |e| e.leak);
    let perfect = evals.iter().all(|e| {
        if e.authorized {
            e.determined
        } else {
            e.independent
        }
    });

    Ok(AuditReport {
        secret_entropy: n_bits,
        rate: n_bits / max_share,
        max_share_entropy: max_share,
        share_entropies,
        epsilon1: max_missing / n_bits,
        epsilon2: max_leak / n_bits,
        perfect,
        ideal: is_ideal(s),
        worst_authorized,
        worst_forbidden,
        secret_alphabet: s.secret_support().len(),
        share_alphabets: (1..=n).map(|p| d.alphabet(s.share_var(p)).len()).collect(),
        method,
        detail: options.detail.then_some(evals),
    })
}

/// Dense per-atom codes packed into one `u128`: κ in the low bits, then one
/// field per participant.
struct PackedCodes {
    keys: Vec<u128>,
    secret_mask: u128,
    participant_masks: Vec<u128>,
    secret_codes: usize,
}

impl PackedCodes {
    fn new(s: &Scheme) -> Option<Self> {
        let d = s.dist();
        let vars: Vec<usize> = std::iter::once(s.secret_var())
            .chain(s.share_vars().iter().copied())
            .collect();
        let alphabets: Vec<Vec<i64>> = vars.iter().map(|&v| d.alphabet(v)).collect();
        let widths: Vec<u32> = alphabets
            .iter()
            .map(|a| usize::BITS - (a.len() - 1).leading_zeros())
            .collect();
        if widths.iter().sum::<u32>() > 128 {
            return None;
        }
        let mut masks = Vec::with_capacity(vars.len());
        let mut offsets = Vec::with_capacity(vars.len());
        let mut off = 0u32;
        for &w in &widths {
            offsets.push(off);
            masks.push(if w == 0 {
                0
            } else {
                (u128::MAX >> (128 - w)) << off
            });
            off += w;
        }
        let keys = d
            .atoms()
            .map(|(row, _)| {
                vars.iter().enumerate().fold(0u128, |k, (i, &v)| {
                    let code = alphabets[i].binary_search(&row[v]).expect("in alphabet");
                    k | (code as u128) << offsets[i]
                })
            })
            .collect();
        Some(PackedCodes {
            keys,
            secret_mask: masks[0],
            participant_masks: masks[1..].to_vec(),
            secret_codes: alphabets[0].len(),
        })
    }

    fn group_mask(&self, g: Subset) -> u128 {
        g.members()
            .iter()
            .fold(0, |m, &p| m | self.participant_masks[p - 1])
    }
}

fn exhaustive(s: &Scheme, n_bits: f64) -> Result<Vec<GroupEval>> {
    let n = s.n_participants();
    let groups = (0u32..1 << n).map(Subset);
    match PackedCodes::new(s) {
        Some(codes) => Ok(groups.map(|g| packed_eval(s, &codes, g, n_bits)).collect()),
        None => groups.map(|g| generic_eval(s, g, n_bits)).collect(),
    }
}

pub(crate) fn generic_eval(s: &Scheme, g: Subset, n_bits: f64) -> Result<GroupEval> {
    let d = s.dist();
    let (k, a) = (s.secret_set(), s.share_set(g));
    let cond = d.entropy(k.union(a))? - d.entropy(a)?;
    Ok(GroupEval::new(
        g,
        s.access().is_authorized(g),
        n_bits,
        cond,
        d.is_determined(k, a)?,
        d.is_independent(k, a)?,
    ))
}

fn packed_eval(s: &Scheme, codes: &PackedCodes, g: Subset, n_bits: f64) -> GroupEval {
    let d = s.dist();
    let group_mask = codes.group_mask(g);
    let pair_mask = group_mask | codes.secret_mask;
    let mut pairs: FxHashMap<u128, u128> = FxHashMap::default();
    for (key, &w) in codes.keys.iter().zip(d.weights()) {
        *pairs.entry(key & pair_mask).or_insert(0) += w;
    }
    let mut secret_w = vec![0u128; codes.secret_codes];
    let mut groups: FxHashMap<u128, (u128, u32)> = FxHashMap::default();
    for (&key, &w) in &pairs {
        secret_w[(key & codes.secret_mask) as usize] += w;
        let e = groups.entry(key & group_mask).or_insert((0, 0));
        e.0 += w;
        e.1 += 1;
    }
    let determined = groups.values().all(|e| e.1 == 1);
    let independent = pairs.len() as u128 == groups.len() as u128 * codes.secret_codes as u128
        && pairs.iter().all(|(&key, &w)| {
            products_equal(
                w,
                d.total(),
                groups[&(key & group_mask)].0,
                secret_w[(key & codes.secret_mask) as usize],
            )
        });
    let pair_weights: Vec<u128> = pairs.into_values().collect();
    let group_weights: Vec<u128> = groups.into_values().map(|e| e.0).collect();
    let cond = entropy_of_weights(&pair_weights, d.total())
        - entropy_of_weights(&group_weights, d.total());
    GroupEval::new(
        g,
        s.access().is_authorized(g),
        n_bits,
        cond,
        determined,
        independent,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::AccessStructure;
    use crate::construct::{
        fano_scheme, leaky_shamir, nearly_ideal_scheme, nonfano_scheme, replicated_scheme, shamir,
        xor_scheme,
    };
    use crate::field::FieldSpec;

    #[test]
    fn xor_is_perfect_and_ideal() {
        let r = audit(&xor_scheme(1).unwrap()).unwrap();
        assert_eq!(r.secret_entropy, 1.0);
        assert_eq!(r.max_share_entropy, 1.0);
        assert_eq!(r.rate, 1.0);
        assert_eq!((r.epsilon1, r.epsilon2), (0.0, 0.0));
        assert!(r.perfect && r.ideal);
    }

    #[test]
    fn shamir_perfect_ideal() {
        let r = audit(&shamir(2, 3, &FieldSpec::prime(5).unwrap(), None).unwrap()).unwrap();
        assert!(r.perfect && r.ideal);
        assert_eq!(r.rate, 1.0);
    }

    #[test]
    fn leaky_shamir_epsilon2() {
        let s = leaky_shamir(2, 3, &FieldSpec::prime(257).unwrap(), 1).unwrap();
        let r = audit_with(
            &s,
            AuditOptions {
                detail: true,
                ..Default::default()
            },
        )
        .unwrap();
        // the leaked parity is 0 on 129 of the 257 secrets
        let p: f64 = 128.0 / 257.0;
        let parity = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert_eq!(r.epsilon1, 0.0);
        assert!((r.epsilon2 - parity / 257f64.log2()).abs() < 1e-9);
        assert!((r.epsilon2 - 0.1249).abs() < 5e-5);
        assert!(!r.perfect);
        assert_eq!(r.worst_forbidden, Subset::from_members(&[1]));
        let single = &r.detail.unwrap()[1];
        assert!((single.leak - parity).abs() < 1e-9);
    }

    #[test]
    fn replicated_threshold_not_ideal() {
        let s = replicated_scheme(&AccessStructure::threshold(2, 3).unwrap(), 1).unwrap();
        let r = audit(&s).unwrap();
        assert!(r.perfect);
        assert!(!r.ideal);
        assert!(r.share_entropies.iter().all(|&h| h <= 3.0 + 1e-9));
    }

    #[test]
    fn matroid_ports_perfect_and_ideal() {
        for s in [
            fano_scheme(1).unwrap(),
            fano_scheme(2).unwrap(),
            nonfano_scheme(3).unwrap(),
        ] {
            let r = audit(&s).unwrap();
            assert!(r.perfect && r.ideal, "{r:?}");
        }
        let r = audit(&fano_scheme(2).unwrap()).unwrap();
        assert_eq!(r.secret_entropy, 2.0);
        assert!(r.share_entropies.iter().all(|&h| h == 2.0));
    }

    #[test]
    fn factorized_matches_exhaustive() {
        for n_bits in [1, 2] {
            let s = nearly_ideal_scheme(n_bits).unwrap();
            let opts = |strategy| AuditOptions {
                strategy,
                detail: true,
            };
            let a = audit_with(&s, opts(Strategy::Exhaustive)).unwrap();
            let b = audit_with(&s, opts(Strategy::Factorized)).unwrap();
            assert_eq!(a.method, Method::Exhaustive);
            assert_eq!(b.method, Method::Factorized);
            assert_eq!(a.perfect, b.perfect);
            assert_eq!(a.worst_authorized, b.worst_authorized);
            assert_eq!(a.worst_forbidden, b.worst_forbidden);
            for (x, y) in a.detail.unwrap().iter().zip(b.detail.unwrap().iter()) {
                assert_eq!(x.group, y.group);
                assert_eq!((x.determined, x.independent), (y.determined, y.independent));
                assert!((x.missing - y.missing).abs() < 1e-9, "{x:?} {y:?}");
                assert!((x.leak - y.leak).abs() < 1e-9, "{x:?} {y:?}");
            }
        }
    }

    #[test]
    fn factorization_rejected_for_dependent_components() {
        // both participants see the same pad: components are not independent given κ
        let rows: Vec<Vec<i64>> = (0..4).map(|i| vec![i >> 1, i & 1, i & 1]).collect();
        let g = AccessStructure::threshold(1, 2).unwrap();
        let s = crate::construct::uniform_scheme(&rows, g).unwrap();
        let r = audit_with(
            &s,
            AuditOptions {
                strategy: Strategy::Factorized,
                detail: false,
            },
        )
        .unwrap();
        assert_eq!(r.method, Method::Exhaustive);
    }
}

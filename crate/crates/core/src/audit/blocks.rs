//! Audit by factorization over the components of the access structure.
//!
//! When the share blocks of the components are mutually independent given κ,
//! P(σ_A | κ) is the product of the block conditionals. Within a block, share
//! values of a sub-group with the same joint weight vector over κ are
//! interchangeable, so each (block, sub-group) pair reduces to a short list of
//! classes with multiplicities, and every global group is evaluated from
//! products of classes instead of a pass over all atoms.

use rustc_hash::FxHashMap;

use super::{generic_eval, GroupEval};
use crate::access::Subset;
use crate::dist::{JointDistribution, Projector, VarSet};
use crate::error::Result;
use crate::scheme::Scheme;

const MAX_SECRETS: usize = 4096;
const MAX_COMBINATIONS: u128 = 1 << 18;

struct Class {
    count: u64,
    /// P(σ_T = a | κ = k) for one representative a
    cond: Vec<f64>,
    support: Vec<u64>,
}

struct Block {
    members: Vec<usize>,
    /// indexed by local sub-group mask
    classes: Vec<Vec<Class>>,
    independent: Vec<bool>,
}

/// Position of global variable `v` among the variables of `set`.
fn local_index(set: VarSet, v: usize) -> usize {
    (set.0 & ((1u64 << v) - 1)).count_ones() as usize
}

fn bitset_words(k: usize) -> usize {
    k.div_ceil(64)
}

impl Block {
    fn new(s: &Scheme, members: Vec<usize>, support: &[i64]) -> Result<Block> {
        let d = s.dist();
        let global: Vec<usize> = members.iter().map(|&p| s.share_var(p)).collect();
        let vars = VarSet::of(&global).union(s.secret_set());
        let m = d.marginal(vars)?;
        let kv = local_index(vars, s.secret_var());
        let locals: Vec<usize> = global.iter().map(|&v| local_index(vars, v)).collect();
        let secret_w: Vec<u128> = {
            let mut w = vec![0u128; support.len()];
            for (row, x) in m.atoms() {
                w[support.binary_search(&row[kv]).expect("in support")] += x;
            }
            w
        };
        let mut classes = Vec::with_capacity(1 << members.len());
        let mut independent = Vec::with_capacity(1 << members.len());
        for t in 0u32..1 << members.len() {
            let local = VarSet::of(
                &(0..members.len())
                    .filter(|i| t >> i & 1 == 1)
                    .map(|i| locals[i])
                    .collect::<Vec<_>>(),
            );
            classes.push(class_table(&m, local, kv, support, &secret_w));
            independent.push(m.is_independent(VarSet::single(kv), local)?);
        }
        Ok(Block {
            members,
            classes,
            independent,
        })
    }

    fn local_mask(&self, g: Subset) -> usize {
        self.members
            .iter()
            .enumerate()
            .filter(|&(_, &p)| g.contains(p))
            .fold(0, |m, (i, _)| m | 1 << i)
    }
}

fn class_table(
    m: &JointDistribution,
    local: VarSet,
    kv: usize,
    support: &[i64],
    secret_w: &[u128],
) -> Vec<Class> {
    let proj = Projector::new(m, local);
    let mut by_value: FxHashMap<_, Vec<(u32, u128)>> = FxHashMap::default();
    for (row, w) in m.atoms() {
        let k = support.binary_search(&row[kv]).expect("in support") as u32;
        let v = by_value.entry(proj.key(row)).or_default();
        match v.iter_mut().find(|e| e.0 == k) {
            Some(e) => e.1 += w,
            None => v.push((k, w)),
        }
    }
    let mut counts: FxHashMap<Vec<(u32, u128)>, u64> = FxHashMap::default();
    for (_, mut v) in by_value {
        v.sort_unstable();
        *counts.entry(v).or_insert(0) += 1;
    }
    let mut keyed: Vec<(Vec<(u32, u128)>, u64)> = counts.into_iter().collect();
    keyed.sort_unstable();
    keyed
        .into_iter()
        .map(|(v, count)| {
            let mut cond = vec![0.0; support.len()];
            let mut bits = vec![0u64; bitset_words(support.len())];
            for (k, w) in v {
                cond[k as usize] = w as f64 / secret_w[k as usize] as f64;
                bits[k as usize / 64] |= 1 << (k % 64);
            }
            Class {
                count,
                cond,
                support: bits,
            }
        })
        .collect()
}

/// Evaluations of every group in ascending bitmask order, or `None` when the
/// scheme does not factorize.
pub(super) fn evaluate(s: &Scheme, n_bits: f64) -> Result<Option<Vec<GroupEval>>> {
    let comps = s.access().components();
    let support = s.secret_support();
    if comps.len() < 2 || support.len() > MAX_SECRETS {
        return Ok(None);
    }
    let d = s.dist();
    for j in 0..comps.len() - 1 {
        let rest = comps[j + 1..]
            .iter()
            .fold(Subset::EMPTY, |acc, &c| acc.union(c));
        if !d.is_cond_independent(s.share_set(comps[j]), s.share_set(rest), s.secret_set())? {
            return Ok(None);
        }
    }
    let blocks = comps
        .iter()
        .map(|c| Block::new(s, c.members(), &support))
        .collect::<Result<Vec<_>>>()?;
    let secret_p: Vec<f64> = {
        let mut w = vec![0u128; support.len()];
        for (v, x) in s.secret_weights() {
            w[support.binary_search(&v).expect("in support")] += x;
        }
        w.iter().map(|&x| x as f64 / d.total() as f64).collect()
    };

    let n = s.n_participants();
    let mut out = Vec::with_capacity(1 << n);
    for g in (0u32..1 << n).map(Subset) {
        let tables: Vec<&[Class]> = blocks
            .iter()
            .map(|b| b.classes[b.local_mask(g)].as_slice())
            .collect();
        let combos = tables
            .iter()
            .try_fold(1u128, |acc, t| acc.checked_mul(t.len() as u128))
            .unwrap_or(u128::MAX);
        if combos > MAX_COMBINATIONS {
            out.push(generic_eval(s, g, n_bits)?);
            continue;
        }
        let independent = blocks.iter().all(|b| b.independent[b.local_mask(g)]);
        let (cond, determined) = combine(&tables, &secret_p);
        out.push(GroupEval::new(
            g,
            s.access().is_authorized(g),
            n_bits,
            cond,
            determined,
            independent,
        ));
    }
    Ok(Some(out))
}

/// H(κ | σ_A) and whether every joint share value fixes κ, over all class
/// combinations of the blocks.
fn combine(tables: &[&[Class]], secret_p: &[f64]) -> (f64, bool) {
    let k = secret_p.len();
    let mut idx = vec![0usize; tables.len()];
    let mut cond = 0.0;
    let mut determined = true;
    let mut joint = vec![0.0; k];
    let mut support = vec![0u64; bitset_words(k)];
    loop {
        let mut mult = 1.0;
        joint.copy_from_slice(secret_p);
        support.iter_mut().for_each(|w| *w = u64::MAX);
        for (t, &i) in tables.iter().zip(&idx) {
            let c = &t[i];
            mult *= c.count as f64;
            for (j, x) in joint.iter_mut().enumerate() {
                *x *= c.cond[j];
            }
            for (w, b) in support.iter_mut().zip(&c.support) {
                *w &= b;
            }
        }
        let size: u32 = support.iter().map(|w| w.count_ones()).sum();
        if size > 0 {
            if size > 1 {
                determined = false;
            }
            let pa: f64 = joint.iter().sum();
            let h: f64 = joint
                .iter()
                .filter(|&&x| x > 0.0)
                .map(|&x| x * (pa / x).log2())
                .sum();
            cond += mult * h;
        }
        let mut level = idx.len();
        loop {
            if level == 0 {
                return (cond, determined);
            }
            level -= 1;
            idx[level] += 1;
            if idx[level] < tables[level].len() {
                break;
            }
            idx[level] = 0;
        }
    }
}

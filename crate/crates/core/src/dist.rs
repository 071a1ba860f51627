//! Exact finite joint distributions over named integer-valued variables.
//!
//! Probabilities are stored as `u128` numerators over one common denominator
//! (`total`), reduced so that the numerators and the denominator are coprime.
//! Structural questions (determination, independence) are answered in exact
//! integer arithmetic; entropies are binary64 values in bits.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigUint;
use num_integer::Integer;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

/// Default hard limit on the number of atoms a distribution may hold.
pub const DEFAULT_ATOM_CAP: usize = 50_000_000;

static ATOM_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_ATOM_CAP);

pub fn atom_cap() -> usize {
    ATOM_CAP.load(Ordering::Relaxed)
}

/// Overrides the atom cap for the whole process.
pub fn set_atom_cap(cap: usize) {
    ATOM_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// Fails with [`Error::AtomOverflow`] when `count` exceeds the cap.
pub fn check_atom_count(count: u128) -> Result<()> {
    let cap = atom_cap();
    if count > cap as u128 {
        return Err(Error::AtomOverflow { count, cap });
    }
    Ok(())
}

pub const MAX_VARIABLES: usize = 64;
pub const MAX_PROFILE_VARIABLES: usize = 16;

/// Set of variable indices as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct VarSet(pub u64);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn single(i: usize) -> VarSet {
        VarSet(1 << i)
    }

    pub fn of(indices: &[usize]) -> VarSet {
        VarSet(indices.iter().fold(0, |m, &i| m | 1 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VarSet) -> VarSet {
        VarSet(self.0 & other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(self) -> Vec<usize> {
        (0..64).filter(|&i| self.contains(i)).collect()
    }
}

/// `a * b == c * d` without overflow.
pub(crate) fn products_equal(a: u128, b: u128, c: u128, d: u128) -> bool {
    match (a.checked_mul(b), c.checked_mul(d)) {
        (Some(x), Some(y)) => x == y,
        _ => BigUint::from(a) * BigUint::from(b) == BigUint::from(c) * BigUint::from(d),
    }
}

/// Shannon entropy in bits of the weights `w / total`.
pub(crate) fn entropy_of_weights(weights: &[u128], total: u128) -> f64 {
    if weights.len() <= 1 {
        return 0.0;
    }
    if weights.iter().all(|&w| w == weights[0]) {
        return (weights.len() as f64).log2();
    }
    let t = total as f64;
    -weights
        .iter()
        .map(|&w| {
            let p = w as f64 / t;
            p * p.log2()
        })
        .sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Key {
    Packed(u128),
    Wide(Vec<i64>),
}

/// Projects rows onto a subset of columns, packing into one `u128` when every
/// projected column is non-negative and the bit widths fit.
pub(crate) struct Projector {
    cols: Vec<usize>,
    shifts: Option<Vec<u32>>,
}

impl Projector {
    pub(crate) fn new(d: &JointDistribution, vars: VarSet) -> Projector {
        let cols = vars.indices();
        let mut shifts = Vec::with_capacity(cols.len());
        let mut offset = 0u32;
        let mut packable = true;
        for &c in &cols {
            let (min, max) = d.column_range(c);
            if min < 0 {
                packable = false;
                break;
            }
            let width = 64 - (max as u64).leading_zeros();
            shifts.push(offset);
            offset += width;
            if offset > 128 {
                packable = false;
                break;
            }
        }
        Projector {
            cols,
            shifts: packable.then_some(shifts),
        }
    }

    pub(crate) fn key(&self, row: &[i64]) -> Key {
        match &self.shifts {
            Some(shifts) => Key::Packed(
                self.cols
                    .iter()
                    .zip(shifts)
                    .fold(0u128, |k, (&c, &s)| k | (row[c] as u128) << s),
            ),
            None => Key::Wide(self.cols.iter().map(|&c| row[c]).collect()),
        }
    }
}

/// Accumulates weighted rows, merging duplicates when built.
#[derive(Debug, Clone)]
pub struct DistBuilder {
    names: Vec<String>,
    rows: Vec<i64>,
    weights: Vec<u128>,
}

impl DistBuilder {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        DistBuilder {
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn with_capacity<S: AsRef<str>>(names: &[S], atoms: usize) -> Self {
        let mut b = Self::new(names);
        b.rows.reserve(atoms * names.len());
        b.weights.reserve(atoms);
        b
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn push(&mut self, values: &[i64], weight: u128) {
        assert_eq!(values.len(), self.names.len(), "row arity");
        self.rows.extend_from_slice(values);
        self.weights.push(weight);
    }

    /// Builds with the sum of pushed weights as the denominator.
    pub fn build(self) -> Result<JointDistribution> {
        let total = self
            .weights
            .iter()
            .try_fold(0u128, |acc, &w| acc.checked_add(w))
            .ok_or(Error::WeightOverflow)?;
        self.build_with_total(total)
    }

    /// Builds and checks that the weights sum to exactly `total`.
    pub fn build_with_total(self, total: u128) -> Result<JointDistribution> {
        let arity = self.names.len();
        if arity == 0 {
            return Err(Error::InvalidDistribution("no variables".into()));
        }
        if arity > MAX_VARIABLES {
            return Err(Error::TooManyVariables {
                found: arity,
                limit: MAX_VARIABLES,
            });
        }
        for (i, n) in self.names.iter().enumerate() {
            if n.is_empty() {
                return Err(Error::InvalidDistribution("empty variable name".into()));
            }
            if self.names[..i].contains(n) {
                return Err(Error::DuplicateVariable(n.clone()));
            }
        }
        let rows = &self.rows;
        let row = |i: usize| &rows[i * arity..(i + 1) * arity];
        let mut order: Vec<usize> = (0..self.weights.len())
            .filter(|&i| self.weights[i] > 0)
            .collect();
        order.sort_unstable_by(|&a, &b| row(a).cmp(row(b)));

        let mut data = Vec::with_capacity(order.len() * arity);
        let mut weights: Vec<u128> = Vec::with_capacity(order.len());
        let mut last: Option<usize> = None;
        for i in order {
            match last {
                Some(j) if row(j) == row(i) => {
                    let w = weights.last_mut().expect("merged atom");
                    *w = w
                        .checked_add(self.weights[i])
                        .ok_or(Error::WeightOverflow)?;
                }
                _ => {
                    data.extend_from_slice(row(i));
                    weights.push(self.weights[i]);
                    last = Some(i);
                }
            }
        }
        if weights.is_empty() {
            return Err(Error::InvalidDistribution(
                "no atoms of positive weight".into(),
            ));
        }
        check_atom_count(weights.len() as u128)?;
        let sum = weights
            .iter()
            .try_fold(0u128, |acc, &w| acc.checked_add(w))
            .ok_or(Error::WeightOverflow)?;
        if sum != total {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {sum}/{total}, not 1"
            )));
        }
        let g = weights.iter().fold(total, |g, &w| g.gcd(&w));
        if g > 1 {
            weights.iter_mut().for_each(|w| *w /= g);
        }
        Ok(JointDistribution {
            names: self.names,
            data,
            weights,
            total: total / g,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    names: Vec<String>,
    data: Vec<i64>,
    weights: Vec<u128>,
    total: u128,
}

impl JointDistribution {
    /// Builds from atoms carrying rational probabilities `(numerator, denominator)`.
    pub fn from_rationals<S: AsRef<str>>(
        names: &[S],
        atoms: &[(Vec<i64>, (u128, u128))],
    ) -> Result<Self> {
        let mut denom = 1u128;
        for (_, (n, d)) in atoms {
            if *d == 0 {
                return Err(Error::InvalidDistribution("zero denominator".into()));
            }
            let g = n.gcd(d);
            let d = d / g;
            denom = (denom / denom.gcd(&d))
                .checked_mul(d)
                .ok_or(Error::WeightOverflow)?;
        }
        let mut b = DistBuilder::with_capacity(names, atoms.len());
        for (v, (n, d)) in atoms {
            if v.len() != names.len() {
                return Err(Error::InvalidDistribution(format!(
                    "atom has {} values for {} variables",
                    v.len(),
                    names.len()
                )));
            }
            let w = n.checked_mul(denom / d).ok_or(Error::WeightOverflow)?;
            b.push(v, w);
        }
        b.build_with_total(denom)
    }

    /// Uniform distribution over the given distinct rows.
    pub fn uniform<S: AsRef<str>>(names: &[S], rows: &[Vec<i64>]) -> Result<Self> {
        let mut b = DistBuilder::with_capacity(names, rows.len());
        for r in rows {
            if r.len() != names.len() {
                return Err(Error::InvalidDistribution("row arity mismatch".into()));
            }
            b.push(r, 1);
        }
        b.build()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn atom(&self, i: usize) -> &[i64] {
        let a = self.arity();
        &self.data[i * a..(i + 1) * a]
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[i64], u128)> + '_ {
        self.data
            .chunks_exact(self.arity())
            .zip(self.weights.iter().copied())
    }

    pub fn weight(&self, i: usize) -> u128 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[u128] {
        &self.weights
    }

    /// Common denominator of all atom weights.
    pub fn total(&self) -> u128 {
        self.total
    }

    /// Probability of atom `i` in lowest terms.
    pub fn probability(&self, i: usize) -> (u128, u128) {
        let w = self.weights[i];
        let g = w.gcd(&self.total);
        (w / g, self.total / g)
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn var_set<S: AsRef<str>>(&self, names: &[S]) -> Result<VarSet> {
        names.iter().try_fold(VarSet::EMPTY, |s, n| {
            Ok(s.union(VarSet::single(self.var_index(n.as_ref())?)))
        })
    }

    pub fn all_vars(&self) -> VarSet {
        VarSet(if self.arity() == 64 {
            u64::MAX
        } else {
            (1u64 << self.arity()) - 1
        })
    }

    fn check_vars(&self, vars: VarSet) -> Result<()> {
        if !vars.intersection(VarSet(!self.all_vars().0)).is_empty() {
            let bad = vars
                .indices()
                .into_iter()
                .find(|&i| i >= self.arity())
                .unwrap_or(0);
            return Err(Error::UnknownVariable(format!("#{bad}")));
        }
        Ok(())
    }

    pub(crate) fn column_range(&self, c: usize) -> (i64, i64) {
        let a = self.arity();
        self.data
            .iter()
            .skip(c)
            .step_by(a)
            .fold((i64::MAX, i64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Sorted distinct values taken by variable `var`.
    pub fn alphabet(&self, var: usize) -> Vec<i64> {
        let a = self.arity();
        let mut v: Vec<i64> = self.data.iter().skip(var).step_by(a).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Marginal weights keyed by projected value.
    pub(crate) fn group(&self, vars: VarSet) -> FxHashMap<Key, u128> {
        let proj = Projector::new(self, vars);
        let mut map: FxHashMap<Key, u128> = FxHashMap::default();
        for (row, w) in self.atoms() {
            *map.entry(proj.key(row)).or_insert(0) += w;
        }
        map
    }

    /// Projection onto `vars`, keeping the original variable order.
    pub fn marginal(&self, vars: VarSet) -> Result<JointDistribution> {
        self.check_vars(vars)?;
        if vars.is_empty() {
            return Err(Error::InvalidParameter("marginal onto no variables".into()));
        }
        let cols = vars.indices();
        let names: Vec<&str> = cols.iter().map(|&c| self.names[c].as_str()).collect();
        let mut b = DistBuilder::with_capacity(&names, self.len());
        let mut buf = vec![0i64; cols.len()];
        for (row, w) in self.atoms() {
            for (slot, &c) in buf.iter_mut().zip(&cols) {
                *slot = row[c];
            }
            b.push(&buf, w);
        }
        b.build_with_total(self.total)
    }

    /// Joint entropy of `vars` in bits; the empty set has entropy 0.
    pub fn entropy(&self, vars: VarSet) -> Result<f64> {
        self.check_vars(vars)?;
        if vars.is_empty() {
            return Ok(0.0);
        }
        let weights: Vec<u128> = self.group(vars).into_values().collect();
        Ok(entropy_of_weights(&weights, self.total))
    }

    /// H(U | V) = H(U ∪ V) - H(V).
    pub fn cond_entropy(&self, u: VarSet, v: VarSet) -> Result<f64> {
        let h = self.entropy(u.union(v))? - self.entropy(v)?;
        Ok(if h.abs() <= 1e-9 { 0.0_f64.max(h) } else { h })
    }

    /// I(U : V), clamped to zero when within 1e-9 of it.
    pub fn mutual_information(&self, u: VarSet, v: VarSet) -> Result<f64> {
        let i = self.entropy(u)? + self.entropy(v)? - self.entropy(u.union(v))?;
        Ok(if i.abs() <= 1e-9 { 0.0 } else { i })
    }

    /// True iff every value of `given` co-occurs with exactly one value of `target`.
    pub fn is_determined(&self, target: VarSet, given: VarSet) -> Result<bool> {
        self.check_vars(target.union(given))?;
        let pt = Projector::new(self, target);
        let pg = Projector::new(self, given);
        let mut seen: FxHashMap<Key, Key> = FxHashMap::default();
        for (row, _) in self.atoms() {
            let t = pt.key(row);
            match seen.entry(pg.key(row)) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    if *e.get() != t {
                        return Ok(false);
                    }
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(t);
                }
            }
        }
        Ok(true)
    }

    /// Exact product test P(U=u, V=v) = P(U=u) P(V=v) for all value pairs.
    pub fn is_independent(&self, u: VarSet, v: VarSet) -> Result<bool> {
        self.check_vars(u.union(v))?;
        let pu = Projector::new(self, u);
        let pv = Projector::new(self, v);
        let mut joint: FxHashMap<(Key, Key), u128> = FxHashMap::default();
        let mut mu: FxHashMap<Key, u128> = FxHashMap::default();
        let mut mv: FxHashMap<Key, u128> = FxHashMap::default();
        for (row, w) in self.atoms() {
            let (ku, kv) = (pu.key(row), pv.key(row));
            *mu.entry(ku.clone()).or_insert(0) += w;
            *mv.entry(kv.clone()).or_insert(0) += w;
            *joint.entry((ku, kv)).or_insert(0) += w;
        }
        if joint.len() as u128 != mu.len() as u128 * mv.len() as u128 {
            return Ok(false);
        }
        Ok(joint
            .iter()
            .all(|((ku, kv), &w)| products_equal(w, self.total, mu[ku], mv[kv])))
    }

    /// Exact conditional independence X ⊥ Y | Z for disjoint X, Y, Z:
    /// P(x,y,z) P(z) = P(x,z) P(y,z) on the full conditional product support.
    pub fn is_cond_independent(&self, x: VarSet, y: VarSet, z: VarSet) -> Result<bool> {
        self.check_vars(x.union(y).union(z))?;
        let (px, py, pz) = (
            Projector::new(self, x),
            Projector::new(self, y),
            Projector::new(self, z),
        );
        let mut xyz: FxHashMap<(Key, Key, Key), u128> = FxHashMap::default();
        let mut xz: FxHashMap<(Key, Key), u128> = FxHashMap::default();
        let mut yz: FxHashMap<(Key, Key), u128> = FxHashMap::default();
        let mut zs: FxHashMap<Key, (u128, u128, u128)> = FxHashMap::default();
        for (row, w) in self.atoms() {
            let (kx, ky, kz) = (px.key(row), py.key(row), pz.key(row));
            *xz.entry((kx.clone(), kz.clone())).or_insert(0) += w;
            *yz.entry((ky.clone(), kz.clone())).or_insert(0) += w;
            zs.entry(kz.clone()).or_insert((0, 0, 0)).0 += w;
            *xyz.entry((kx, ky, kz)).or_insert(0) += w;
        }
        for (_, kz) in xz.keys() {
            zs.get_mut(kz).expect("seen").1 += 1;
        }
        for (_, kz) in yz.keys() {
            zs.get_mut(kz).expect("seen").2 += 1;
        }
        let product_support: u128 = zs.values().map(|&(_, nx, ny)| nx * ny).sum();
        if xyz.len() as u128 != product_support {
            return Ok(false);
        }
        Ok(xyz.iter().all(|((kx, ky, kz), &w)| {
            let wxz = xz[&(kx.clone(), kz.clone())];
            let wyz = yz[&(ky.clone(), kz.clone())];
            products_equal(w, zs[kz].0, wxz, wyz)
        }))
    }

    /// Joint entropies of every nonempty variable subset, indexed by `mask - 1`.
    pub fn entropy_profile(&self) -> Result<Vec<f64>> {
        if self.arity() > MAX_PROFILE_VARIABLES {
            return Err(Error::TooManyVariables {
                found: self.arity(),
                limit: MAX_PROFILE_VARIABLES,
            });
        }
        (1u64..1 << self.arity())
            .map(|m| self.entropy(VarSet(m)))
            .collect()
    }

    /// Rebuilds the distribution through a row map; colliding rows merge.
    pub fn map_rows<S: AsRef<str>>(
        &self,
        names: &[S],
        mut f: impl FnMut(&[i64], &mut Vec<i64>),
    ) -> Result<JointDistribution> {
        let mut b = DistBuilder::with_capacity(names, self.len());
        let mut out = Vec::with_capacity(names.len());
        for (row, w) in self.atoms() {
            out.clear();
            f(row, &mut out);
            b.push(&out, w);
        }
        b.build_with_total(self.total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform2() -> JointDistribution {
        JointDistribution::uniform(
            &["X", "Y"],
            &[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
        )
        .unwrap()
    }

    fn copy_bit() -> JointDistribution {
        JointDistribution::uniform(&["X", "Y"], &[vec![0, 0], vec![1, 1]]).unwrap()
    }

    fn xor_joint() -> JointDistribution {
        let rows: Vec<Vec<i64>> = (0..4)
            .map(|i| {
                let (k, r) = (i >> 1, i & 1);
                vec![k, r, r ^ k]
            })
            .collect();
        JointDistribution::uniform(&["k", "s1", "s2"], &rows).unwrap()
    }

    #[test]
    fn marginal_of_uniform_pair() {
        let d = uniform2();
        let m = d.marginal(VarSet::single(0)).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.probability(0), (1, 2));
        assert_eq!(d.marginal(d.all_vars()).unwrap(), d);
    }

    #[test]
    fn xor_share_is_uniform() {
        let m = xor_joint().marginal(VarSet::single(2)).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.weights(), &[1, 1]);
    }

    #[test]
    fn basic_entropies() {
        assert_eq!(uniform2().entropy(VarSet(0b11)).unwrap(), 2.0);
        let d = JointDistribution::from_rationals(
            &["X"],
            &[(vec![0], (1, 2)), (vec![1], (1, 4)), (vec![2], (1, 4))],
        )
        .unwrap();
        assert!((d.entropy(VarSet(1)).unwrap() - 1.5).abs() < 1e-12);
        let rows: Vec<Vec<i64>> = (0..5).map(|i| vec![i]).collect();
        let g5 = JointDistribution::uniform(&["X"], &rows).unwrap();
        assert!((g5.entropy(VarSet(1)).unwrap() - 5f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn conditional_and_mutual() {
        let d = uniform2();
        let (x, y) = (VarSet(1), VarSet(2));
        assert_eq!(d.cond_entropy(x, x).unwrap(), 0.0);
        assert_eq!(d.cond_entropy(x, y).unwrap(), 1.0);
        assert_eq!(d.mutual_information(x, y).unwrap(), 0.0);
        assert_eq!(copy_bit().mutual_information(x, y).unwrap(), 1.0);
        let xo = xor_joint();
        assert_eq!(xo.cond_entropy(VarSet(1), VarSet(2)).unwrap(), 1.0);
        assert_eq!(xo.mutual_information(VarSet(1), VarSet(4)).unwrap(), 0.0);
    }

    #[test]
    fn structural_tests() {
        let xo = xor_joint();
        assert!(xo.is_determined(VarSet(1), VarSet(1)).unwrap());
        assert!(xo.is_determined(VarSet(1), VarSet(0b110)).unwrap());
        assert!(!xo.is_determined(VarSet(1), VarSet(0b010)).unwrap());
        assert!(uniform2().is_independent(VarSet(1), VarSet(2)).unwrap());
        assert!(!copy_bit().is_independent(VarSet(1), VarSet(2)).unwrap());
        assert!(xo.is_independent(VarSet(1), VarSet(4)).unwrap());
        assert!(!xo.is_independent(VarSet(1), VarSet(6)).unwrap());
    }

    #[test]
    fn profiles() {
        assert_eq!(copy_bit().entropy_profile().unwrap(), vec![1.0, 1.0, 1.0]);
        assert_eq!(uniform2().entropy_profile().unwrap(), vec![1.0, 1.0, 2.0]);
        assert_eq!(
            xor_joint().entropy_profile().unwrap(),
            vec![1.0, 1.0, 2.0, 1.0, 2.0, 2.0, 2.0]
        );
    }

    #[test]
    fn unknown_variable() {
        let d = uniform2();
        assert_eq!(d.var_set(&["Z"]), Err(Error::UnknownVariable("Z".into())));
        assert!(matches!(
            d.entropy(VarSet(0b100)),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn builder_merges_and_reduces() {
        let mut b = DistBuilder::new(&["X"]);
        b.push(&[1], 2);
        b.push(&[0], 1);
        b.push(&[1], 1);
        b.push(&[5], 0);
        let d = b.build_with_total(4).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.atom(0), &[0]);
        assert_eq!(d.weights(), &[1, 3]);
        assert_eq!(d.total(), 4);
        let mut b = DistBuilder::new(&["X"]);
        b.push(&[0], 2);
        b.push(&[1], 2);
        assert_eq!(b.build().unwrap().total(), 2);
    }

    #[test]
    fn builder_rejects_bad_input() {
        let mut b = DistBuilder::new(&["X"]);
        b.push(&[0], 1);
        assert!(matches!(
            b.build_with_total(2),
            Err(Error::InvalidDistribution(_))
        ));
        let mut b = DistBuilder::new(&["X", "X"]);
        b.push(&[0, 0], 1);
        assert_eq!(b.build(), Err(Error::DuplicateVariable("X".into())));
        assert!(matches!(
            JointDistribution::from_rationals(&["X"], &[(vec![0], (1, 3))]),
            Err(Error::InvalidDistribution(_))
        ));
    }

    #[test]
    fn negative_and_wide_values_use_unpacked_keys() {
        let d = JointDistribution::uniform(
            &["X", "Y"],
            &[vec![-1, i64::MAX], vec![2, i64::MAX], vec![-1, 0]],
        )
        .unwrap();
        assert_eq!(d.marginal(VarSet(1)).unwrap().len(), 2);
        assert!(!d.is_independent(VarSet(1), VarSet(2)).unwrap());
    }

    #[test]
    fn overflow_safe_products() {
        assert!(products_equal(u128::MAX, 2, 2, u128::MAX));
        assert!(!products_equal(u128::MAX, 3, 2, u128::MAX));
    }

    #[test]
    fn atom_cap_enforced() {
        assert!(check_atom_count(DEFAULT_ATOM_CAP as u128).is_ok());
        assert!(matches!(
            check_atom_count(DEFAULT_ATOM_CAP as u128 + 1),
            Err(Error::AtomOverflow { .. })
        ));
    }
}

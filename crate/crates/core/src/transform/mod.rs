//! Scheme-to-scheme operations: secret restriction, parallel composition,
//! completion of missing information and the one-bit reduction.

mod descriptor;
mod splitting;
mod table;

pub use descriptor::{huffman_code, prefix_free_expand, BitString, ConditionalDescriptor};
pub use splitting::{search_splitting, SplitSearch, SplitTrial, Splitting};
pub use table::{materialize_table, Table};

use num_integer::Integer;

use crate::access::Subset;
use crate::dist::{check_atom_count, DistBuilder};
use crate::error::{Error, Result};
use crate::scheme::Scheme;

/// Keeps the `2^bits` smallest secret values and makes the secret uniform on
/// them, keeping each conditional law of the shares given κ.
pub fn restrict_secret(s: &Scheme, bits: u32) -> Result<Scheme> {
    let marginal = s.secret_weights();
    let requested = 1u128.checked_shl(bits).unwrap_or(u128::MAX);
    if bits == 0 || bits >= 64 || requested > marginal.len() as u128 {
        return Err(Error::TooFewSecrets {
            support: marginal.len(),
            requested,
        });
    }
    let kept = &marginal[..requested as usize];
    let l = kept.iter().fold(1u128, |l, &(_, w)| l.lcm(&w));
    let total = l.checked_mul(requested).ok_or(Error::WeightOverflow)?;
    let d = s.dist();
    let kv = s.secret_var();
    let mut b = DistBuilder::with_capacity(d.names(), d.len());
    for (row, w) in d.atoms() {
        if let Ok(i) = kept.binary_search_by_key(&row[kv], |p| p.0) {
            b.push(
                row,
                w.checked_mul(l / kept[i].1).ok_or(Error::WeightOverflow)?,
            );
        }
    }
    s.with_dist(b.build_with_total(total)?)
}

/// `q` independent copies. Each variable's copy tuple is encoded by the
/// mixed-radix rank of its values in that variable's sorted alphabet, first
/// copy most significant.
pub fn parallel_compose(s: &Scheme, q: u32) -> Result<Scheme> {
    if q == 0 {
        return Err(Error::InvalidParameter("q must be at least 1".into()));
    }
    if q == 1 {
        return Ok(s.clone());
    }
    let d = s.dist();
    let count = (d.len() as u128).checked_pow(q).unwrap_or(u128::MAX);
    check_atom_count(count)?;
    let total = d.total().checked_pow(q).ok_or(Error::WeightOverflow)?;
    let alphabets: Vec<Vec<i64>> = (0..d.arity()).map(|v| d.alphabet(v)).collect();
    for a in &alphabets {
        if (a.len() as u128)
            .checked_pow(q)
            .is_none_or(|x| x > i64::MAX as u128)
        {
            return Err(Error::OutOfRange(format!(
                "an alphabet of {} values does not fit {q} copies",
                a.len()
            )));
        }
    }
    // per-atom value ranks
    let ranks: Vec<Vec<i64>> = d
        .atoms()
        .map(|(row, _)| {
            row.iter()
                .zip(&alphabets)
                .map(|(x, a)| a.binary_search(x).expect("in alphabet") as i64)
                .collect()
        })
        .collect();
    let mut b = DistBuilder::with_capacity(d.names(), count as usize);
    let mut idx = vec![0usize; q as usize];
    let mut row = vec![0i64; d.arity()];
    loop {
        let mut w = 1u128;
        row.iter_mut().for_each(|x| *x = 0);
        for &i in &idx {
            w = w.checked_mul(d.weight(i)).ok_or(Error::WeightOverflow)?;
            for (v, x) in row.iter_mut().enumerate() {
                *x = *x * alphabets[v].len() as i64 + ranks[i][v];
            }
        }
        b.push(&row, w);
        let mut j = idx.len();
        loop {
            if j == 0 {
                return s.with_dist(b.build_with_total(total)?);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < d.len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// One descriptor added by [`complete_scheme`].
#[derive(Debug, Clone)]
pub struct AddedDescriptor {
    pub group: Subset,
    pub recipient: usize,
    pub gamma_entropy: f64,
    pub descriptor: ConditionalDescriptor,
}

#[derive(Debug, Clone)]
pub struct Completion {
    pub scheme: Scheme,
    pub descriptors: Vec<AddedDescriptor>,
}

impl Completion {
    /// Σ H(γ_A) over all added descriptors.
    pub fn total_gamma_entropy(&self) -> f64 {
        self.descriptors.iter().map(|d| d.gamma_entropy).sum()
    }
}

/// For each minimal authorized group A (ascending by bitmask), a descriptor of
/// κ given σ_A is computed on the input distribution and handed to the
/// lowest-indexed member of A. A share that receives a non-constant
/// descriptor is re-encoded as the dense rank of (old value, γ, ...).
pub fn complete_scheme(s: &Scheme) -> Result<Completion> {
    let d = s.dist();
    let n = s.n_participants();
    let mut extra: Vec<Vec<Vec<i64>>> = vec![Vec::new(); n + 1];
    let mut descriptors = Vec::new();
    for &group in s.access().minimal_sets() {
        let desc = ConditionalDescriptor::new(d, s.secret_set(), s.share_set(group))?;
        let recipient = group.first().expect("minimal sets are non-empty");
        let gamma = desc.gamma_column(d)?;
        if gamma.iter().any(|&g| g != gamma[0]) {
            extra[recipient].push(gamma);
        }
        descriptors.push(AddedDescriptor {
            group,
            recipient,
            gamma_entropy: desc.gamma_entropy(d)?,
            descriptor: desc,
        });
    }
    let mut columns: Vec<Option<Vec<i64>>> = vec![None; n + 1];
    for p in 1..=n {
        if extra[p].is_empty() {
            continue;
        }
        let var = s.share_var(p);
        let keys: Vec<Vec<i64>> = (0..d.len())
            .map(|i| {
                std::iter::once(d.atom(i)[var])
                    .chain(extra[p].iter().map(|g| g[i]))
                    .collect()
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        sorted.dedup();
        columns[p] = Some(
            keys.iter()
                .map(|k| sorted.binary_search(k).expect("present") as i64)
                .collect(),
        );
    }
    let mut b = DistBuilder::with_capacity(d.names(), d.len());
    let mut row = Vec::with_capacity(d.arity());
    for (i, (r, w)) in d.atoms().enumerate() {
        row.clear();
        row.extend_from_slice(r);
        for p in 1..=n {
            if let Some(col) = &columns[p] {
                row[s.share_var(p)] = col[i];
            }
        }
        b.push(&row, w);
    }
    Ok(Completion {
        scheme: s.with_dist(b.build_with_total(d.total())?)?,
        descriptors,
    })
}

/// Replaces κ by the bit ξ, 0 iff κ ∈ K₀; shares are untouched.
pub fn one_bit_reduction(s: &Scheme, split: &Splitting) -> Result<Scheme> {
    let support = check_reducible(s)?;
    split.check(&support)?;
    let kv = s.secret_var();
    let dist = s.dist().map_rows(s.dist().names(), |row, out| {
        out.extend_from_slice(row);
        out[kv] = i64::from(!split.contains(row[kv]));
    })?;
    s.with_dist(dist)
}

/// Sorted secret support, provided it has even size and the secret is uniform.
pub(crate) fn check_reducible(s: &Scheme) -> Result<Vec<i64>> {
    let support = s.secret_support();
    if support.len() % 2 == 1 {
        return Err(Error::OddSupport(support.len()));
    }
    if !s.secret_is_uniform() {
        return Err(Error::NonUniformSecret);
    }
    Ok(support)
}

//! Concrete schemes, built by exact enumeration of their randomness.

use crate::access::{circuits_of_matrix, induced_by_matroid, AccessStructure};
use crate::dist::{check_atom_count, DistBuilder, JointDistribution};
use crate::error::{Error, Result};
use crate::field::{is_prime, FieldSpec, MAX_PRIME};
use crate::scheme::{standard_names, Scheme};
use crate::transform::restrict_secret;

/// Calls `f` on every vector of `len` digits in `0..radix`, last digit fastest.
fn for_each_vector(radix: u32, len: usize, mut f: impl FnMut(&[u32])) {
    let mut v = vec![0u32; len];
    loop {
        f(&v);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            v[i] += 1;
            if v[i] < radix {
                break;
            }
            v[i] = 0;
        }
    }
}

fn space_size(q: u32, dim: usize) -> u128 {
    (q as u128).checked_pow(dim as u32).unwrap_or(u128::MAX)
}

/// One-time pad on `bits`-bit secrets: σ1 = r, σ2 = r xor κ.
pub fn xor_scheme(bits: u32) -> Result<Scheme> {
    if !(1..=20).contains(&bits) {
        return Err(Error::OutOfRange(format!("bits {bits} not in 1..=20")));
    }
    let m = 1i64 << bits;
    check_atom_count((m * m) as u128)?;
    let names = standard_names(2);
    let mut b = DistBuilder::with_capacity(&names, (m * m) as usize);
    for k in 0..m {
        for r in 0..m {
            b.push(&[k, r, r ^ k], 1);
        }
    }
    Scheme::standard(b.build()?, AccessStructure::from_minimal(2, &[vec![1, 2]])?)
}

fn check_points(field: &FieldSpec, n: usize, points: Option<&[u32]>) -> Result<Vec<u32>> {
    if field.order() as usize <= n {
        return Err(Error::FieldTooSmall {
            order: field.order(),
            participants: n,
        });
    }
    let pts: Vec<u32> = match points {
        Some(p) => p.to_vec(),
        None => (1..=n as u32).collect(),
    };
    if pts.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{} evaluation points for {n} participants",
            pts.len()
        )));
    }
    for (i, &x) in pts.iter().enumerate() {
        field.check_element(x)?;
        if x == 0 || pts[..i].contains(&x) {
            return Err(Error::DuplicatePoint(x));
        }
    }
    Ok(pts)
}

fn eval_poly(field: &FieldSpec, coeffs: &[u32], x: u32) -> u32 {
    coeffs
        .iter()
        .rev()
        .fold(0, |acc, &c| field.add(field.mul(acc, x), c))
}

fn polynomial_scheme(
    t: usize,
    n: usize,
    field: &FieldSpec,
    points: Option<&[u32]>,
    leaked_bits: u32,
) -> Result<Scheme> {
    if t == 0 || t > n {
        return Err(Error::OutOfRange(format!("threshold {t} not in 1..={n}")));
    }
    let access = AccessStructure::threshold(t, n)?;
    let pts = check_points(field, n, points)?;
    if leaked_bits >= 32 || 1u64 << leaked_bits > field.order() as u64 {
        return Err(Error::OutOfRange(format!(
            "2^{leaked_bits} exceeds the field order {}",
            field.order()
        )));
    }
    let count = space_size(field.order(), t);
    check_atom_count(count)?;
    let names = standard_names(n);
    let mut b = DistBuilder::with_capacity(&names, count as usize);
    let mask = (1i64 << leaked_bits) - 1;
    let mut row = vec![0i64; n + 1];
    for_each_vector(field.order(), t, |coeffs| {
        let k = coeffs[0] as i64;
        row[0] = k;
        for (slot, &x) in row[1..].iter_mut().zip(&pts) {
            *slot = ((eval_poly(field, coeffs, x) as i64) << leaked_bits) | (k & mask);
        }
        b.push(&row, 1);
    });
    Scheme::standard(b.build()?, access)
}

/// Shamir's threshold scheme: shares are P(x_p) for a uniformly random
/// polynomial P of degree below `t` with P(0) = κ.
pub fn shamir(t: usize, n: usize, field: &FieldSpec, points: Option<&[u32]>) -> Result<Scheme> {
    polynomial_scheme(t, n, field, points, 0)
}

/// Shamir's scheme with every share extended by the low `leaked_bits` bits of
/// κ: share = P(x_p) * 2^leaked_bits + (κ mod 2^leaked_bits).
pub fn leaky_shamir(t: usize, n: usize, field: &FieldSpec, leaked_bits: u32) -> Result<Scheme> {
    polynomial_scheme(t, n, field, None, leaked_bits)
}

fn check_columns(field: &FieldSpec, columns: &[Vec<u32>]) -> Result<usize> {
    let dim = columns.first().map_or(0, Vec::len);
    for (index, c) in columns.iter().enumerate() {
        if c.len() != dim {
            return Err(Error::DimensionMismatch {
                index: index + 1,
                expected: dim,
                found: c.len(),
            });
        }
        for &x in c {
            field.check_element(x)?;
        }
    }
    Ok(dim)
}

/// Linear scheme: u uniform in F^r, κ = <u, v_s>, σ_p = <u, v_p> where the
/// participant columns are the non-secret columns in order.
pub fn linear_scheme(
    field: &FieldSpec,
    columns: &[Vec<u32>],
    secret_index: usize,
    access: AccessStructure,
) -> Result<Scheme> {
    if secret_index == 0 || secret_index > columns.len() {
        return Err(Error::OutOfRange(format!(
            "secret column {secret_index} not in 1..={}",
            columns.len()
        )));
    }
    let dim = check_columns(field, columns)?;
    let secret = &columns[secret_index - 1];
    if secret.iter().all(|&x| x == 0) {
        return Err(Error::ZeroSecretColumn);
    }
    let others: Vec<&Vec<u32>> = columns
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != secret_index - 1)
        .map(|(_, c)| c)
        .collect();
    if others.len() != access.n_participants() {
        return Err(Error::InvalidScheme(format!(
            "{} participant columns for {} participants",
            others.len(),
            access.n_participants()
        )));
    }
    let count = space_size(field.order(), dim);
    check_atom_count(count)?;
    let names = standard_names(others.len());
    let mut b = DistBuilder::with_capacity(&names, count as usize);
    let mut row = vec![0i64; others.len() + 1];
    for_each_vector(field.order(), dim, |u| {
        row[0] = field.dot(u, secret) as i64;
        for (slot, c) in row[1..].iter_mut().zip(&others) {
            *slot = field.dot(u, c) as i64;
        }
        b.push(&row, 1);
    });
    Scheme::standard(b.build()?, access)
}

/// The seven nonzero 0/1 vectors of dimension 3, ordered by their 3-bit value.
pub fn fano_columns() -> Vec<Vec<u32>> {
    (1u32..8)
        .map(|v| vec![v >> 2 & 1, v >> 1 & 1, v & 1])
        .collect()
}

/// Ideal scheme for the structure induced by the 0/1 representation through
/// column 7, over `field`.
fn matroid_port_scheme(field: &FieldSpec) -> Result<Scheme> {
    let cols = fano_columns();
    let circuits = circuits_of_matrix(field, &cols)?;
    let access = induced_by_matroid(7, &circuits, 7)?;
    linear_scheme(field, &cols, 7, access)
}

/// Fano-matroid port scheme over GF(2^m).
pub fn fano_scheme(m: u32) -> Result<Scheme> {
    matroid_port_scheme(&FieldSpec::binary(m)?)
}

/// Non-Fano-matroid port scheme over GF(p), p an odd prime.
pub fn nonfano_scheme(p: u32) -> Result<Scheme> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if p == 2 || p > MAX_PRIME {
        return Err(Error::OutOfRange(format!(
            "p = {p} is not an odd prime at most {MAX_PRIME}"
        )));
    }
    matroid_port_scheme(&FieldSpec::prime(p)?)
}

/// Replicated sharing: one `bits`-wide pad per maximal forbidden group B_i,
/// the last pad fixed so that all pads xor to κ. Participant p holds the pads
/// of the groups it is not in, packed low-to-high in ascending group order.
pub fn replicated_scheme(access: &AccessStructure, bits: u32) -> Result<Scheme> {
    if !(1..=20).contains(&bits) {
        return Err(Error::OutOfRange(format!("bits {bits} not in 1..=20")));
    }
    let n = access.n_participants();
    let forbidden = access.maximal_forbidden();
    let m = forbidden.len();
    let holders: Vec<Vec<usize>> = (1..=n)
        .map(|p| (0..m).filter(|&i| !forbidden[i].contains(p)).collect())
        .collect();
    if let Some(h) = holders.iter().find(|h| h.len() * bits as usize > 62) {
        return Err(Error::OutOfRange(format!(
            "a share would hold {} bits",
            h.len() * bits as usize
        )));
    }
    let free = m as u32 * bits;
    if free > 62 {
        return Err(Error::AtomOverflow {
            count: 1u128 << free,
            cap: crate::dist::atom_cap(),
        });
    }
    check_atom_count(1u128 << free)?;
    let names = standard_names(n);
    let mut b = DistBuilder::with_capacity(&names, 1 << free);
    let width = 1i64 << bits;
    let mut pads = vec![0i64; m];
    let mut row = vec![0i64; n + 1];
    for_each_vector(width as u32, m, |v| {
        // v[0] is κ, v[1..] the free pads r_1..r_{m-1}
        let k = v[0] as i64;
        let mut acc = k;
        for i in 0..m - 1 {
            pads[i] = v[i + 1] as i64;
            acc ^= pads[i];
        }
        pads[m - 1] = acc;
        row[0] = k;
        for (slot, h) in row[1..].iter_mut().zip(&holders) {
            *slot = h
                .iter()
                .enumerate()
                .fold(0, |s, (j, &i)| s | pads[i] << (j as u32 * bits));
        }
        b.push(&row, 1);
    });
    Scheme::standard(b.build()?, access.clone())
}

/// Replaces share value `from` by `to` for participant `p`; colliding atoms merge.
pub fn puncture_share_value(s: &Scheme, p: usize, from: i64, to: i64) -> Result<Scheme> {
    if p == 0 || p > s.n_participants() {
        return Err(Error::UnknownParticipant(p));
    }
    let var = s.share_var(p);
    let dist = s.dist().map_rows(s.dist().names(), |row, out| {
        out.extend_from_slice(row);
        if out[var] == from {
            out[var] = to;
        }
    })?;
    s.with_dist(dist)
}

/// Two schemes on one secret: given κ, the second scheme's shares are drawn
/// independently of the first's. Both secrets must be uniform on the same
/// support. Participants of `b` follow those of `a`.
pub fn join_on_secret(a: &Scheme, b: &Scheme) -> Result<Scheme> {
    let support = a.secret_support();
    if !a.secret_is_uniform() || !b.secret_is_uniform() || b.secret_support() != support {
        return Err(Error::InvalidScheme(
            "joined schemes need the same uniform secret".into(),
        ));
    }
    let access = a.access().disjoint_union(b.access())?;
    let n = access.n_participants();
    let (da, db) = (a.dist(), b.dist());
    let mut by_secret_b: Vec<Vec<(Vec<i64>, u128)>> = vec![Vec::new(); support.len()];
    for (row, w) in db.atoms() {
        let i = support
            .binary_search(&row[b.secret_var()])
            .expect("in support");
        let shares: Vec<i64> = b.share_vars().iter().map(|&v| row[v]).collect();
        by_secret_b[i].push((shares, w));
    }
    let count: u128 = da
        .atoms()
        .map(|(row, _)| {
            let i = support
                .binary_search(&row[a.secret_var()])
                .expect("in support");
            by_secret_b[i].len() as u128
        })
        .sum();
    check_atom_count(count)?;
    let m = support.len() as u128;
    let total = da
        .total()
        .checked_mul(db.total())
        .ok_or(Error::WeightOverflow)?;
    let names = standard_names(n);
    let mut out = DistBuilder::with_capacity(&names, count as usize);
    let mut row_out = vec![0i64; n + 1];
    for (row, wa) in da.atoms() {
        let k = row[a.secret_var()];
        let i = support.binary_search(&k).expect("in support");
        row_out[0] = k;
        for (slot, &v) in row_out[1..].iter_mut().zip(a.share_vars()) {
            *slot = row[v];
        }
        for (shares, wb) in &by_secret_b[i] {
            row_out[1 + a.n_participants()..].copy_from_slice(shares);
            let w = wa
                .checked_mul(*wb)
                .and_then(|w| w.checked_mul(m))
                .ok_or(Error::WeightOverflow)?;
            out.push(&row_out, w);
        }
    }
    Scheme::standard(out.build_with_total(total)?, access)
}

/// Fano scheme over GF(2^N) joined with the non-Fano scheme over GF(2^N + 1),
/// the latter restricted to the secrets 0..2^N and with share value 2^N
/// replaced by 0 on every share.
pub fn nearly_ideal_scheme(n_bits: u32) -> Result<Scheme> {
    if !(1..=8).contains(&n_bits) {
        return Err(Error::OutOfRange(format!("N = {n_bits} not in 1..=8")));
    }
    let p = (1u32 << n_bits) + 1;
    if !is_prime(p as u64) {
        return Err(Error::NotFermatPrime(n_bits));
    }
    // κ, two free Fano coordinates, two free non-Fano coordinates given κ
    let q = 1u128 << n_bits;
    check_atom_count(q * q * q * (p as u128) * (p as u128))?;
    let fano = fano_scheme(n_bits)?;
    let mut nonfano = restrict_secret(&nonfano_scheme(p)?, n_bits)?;
    for participant in 1..=nonfano.n_participants() {
        nonfano = puncture_share_value(&nonfano, participant, 1 << n_bits, 0)?;
    }
    join_on_secret(&fano, &nonfano)
}

/// Uniform distribution builder helper for tests and tools.
pub fn uniform_scheme(rows: &[Vec<i64>], access: AccessStructure) -> Result<Scheme> {
    let names = standard_names(access.n_participants());
    Scheme::standard(JointDistribution::uniform(&names, rows)?, access)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::Subset;
    use crate::dist::VarSet;

    fn gf(q: u32) -> FieldSpec {
        FieldSpec::from_order(q).unwrap()
    }

    #[test]
    fn xor_counts() {
        let s = xor_scheme(1).unwrap();
        assert_eq!(s.dist().len(), 4);
        assert_eq!(s.dist().total(), 4);
        assert_eq!(xor_scheme(2).unwrap().dist().len(), 16);
        assert!(xor_scheme(0).is_err());
        assert!(xor_scheme(21).is_err());
    }

    #[test]
    fn shamir_2_3_5() {
        let s = shamir(2, 3, &gf(5), None).unwrap();
        let d = s.dist();
        assert_eq!(d.len(), 25);
        for p in 1..=3 {
            let m = d.marginal(VarSet::single(s.share_var(p))).unwrap();
            assert_eq!(m.len(), 5);
            assert!(m.weights().iter().all(|&w| w == 1));
            assert!(d
                .is_independent(s.secret_set(), s.share_set(Subset::singleton(p)))
                .unwrap());
        }
        for pair in [0b011, 0b101, 0b110] {
            assert!(d
                .is_determined(s.secret_set(), s.share_set(Subset(pair)))
                .unwrap());
        }
    }

    #[test]
    fn shamir_errors() {
        assert!(matches!(
            shamir(2, 5, &gf(5), None),
            Err(Error::FieldTooSmall {
                order: 5,
                participants: 5
            })
        ));
        assert_eq!(
            shamir(2, 3, &gf(5), Some(&[1, 2, 1])),
            Err(Error::DuplicatePoint(1))
        );
        assert_eq!(
            shamir(2, 3, &gf(5), Some(&[0, 2, 3])),
            Err(Error::DuplicatePoint(0))
        );
    }

    #[test]
    fn shamir_equals_vandermonde_linear_scheme() {
        let f = gf(5);
        let cols: Vec<Vec<u32>> = (0..4).map(|x| vec![1, x]).collect();
        let lin = linear_scheme(&f, &cols, 1, AccessStructure::threshold(2, 3).unwrap()).unwrap();
        assert_eq!(lin, shamir(2, 3, &f, None).unwrap());
    }

    #[test]
    fn linear_identity_scheme() {
        let f = gf(2);
        let g = AccessStructure::from_minimal(1, &[vec![1]]).unwrap();
        let s = linear_scheme(&f, &[vec![1], vec![1]], 1, g.clone()).unwrap();
        assert!(s.dist().atoms().all(|(r, _)| r[0] == r[1]));
        assert_eq!(
            linear_scheme(&f, &[vec![0], vec![1]], 1, g),
            Err(Error::ZeroSecretColumn)
        );
    }

    #[test]
    fn fano_and_nonfano_sizes() {
        let f = fano_scheme(1).unwrap();
        assert_eq!(f.dist().len(), 8);
        assert_eq!(f.n_participants(), 6);
        let nf = nonfano_scheme(3).unwrap();
        assert_eq!(nf.dist().len(), 27);
        assert_eq!(nf.secret_support().len(), 3);
        assert_eq!(nonfano_scheme(4), Err(Error::NotPrime(4)));
        assert!(matches!(nonfano_scheme(2), Err(Error::OutOfRange(_))));
        assert!(matches!(fano_scheme(9), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn fano_and_nonfano_structures_differ() {
        let f = fano_scheme(1).unwrap();
        let nf = nonfano_scheme(3).unwrap();
        assert!(f.access().is_authorized(Subset::from_members(&[1, 6])));
        assert_ne!(f.access(), nf.access());
    }

    #[test]
    fn leaky_shamir_appends_low_bits() {
        let s = leaky_shamir(2, 3, &gf(257), 1).unwrap();
        assert!(s
            .dist()
            .atoms()
            .all(|(r, _)| r[1..].iter().all(|&v| v & 1 == r[0] & 1)));
        assert_eq!(
            leaky_shamir(2, 3, &gf(5), 0).unwrap(),
            shamir(2, 3, &gf(5), None).unwrap()
        );
        assert!(leaky_shamir(2, 3, &gf(5), 3).is_err());
    }

    #[test]
    fn replicated_two_party() {
        let g = AccessStructure::from_minimal(2, &[vec![1, 2]]).unwrap();
        let s = replicated_scheme(&g, 1).unwrap();
        assert_eq!(s.dist().len(), 4);
        let d = s.dist();
        assert!(d
            .is_determined(s.secret_set(), s.share_set(Subset(0b11)))
            .unwrap());
        assert!(d
            .is_independent(s.secret_set(), s.share_set(Subset(0b01)))
            .unwrap());
    }

    #[test]
    fn puncture_unused_value_is_identity() {
        let s = shamir(2, 3, &gf(5), None).unwrap();
        assert_eq!(puncture_share_value(&s, 1, 99, 0).unwrap(), s);
        assert_eq!(
            puncture_share_value(&s, 4, 1, 0),
            Err(Error::UnknownParticipant(4))
        );
    }

    #[test]
    fn puncture_shrinks_alphabets() {
        let mut s = restrict_secret(&nonfano_scheme(5).unwrap(), 2).unwrap();
        for p in 1..=6 {
            s = puncture_share_value(&s, p, 4, 0).unwrap();
            assert_eq!(s.dist().alphabet(s.share_var(p)).len(), 4);
        }
        let sum: u128 = s.dist().weights().iter().sum();
        assert_eq!(sum, s.dist().total());
    }

    #[test]
    fn nearly_ideal_parameters_checked() {
        assert_eq!(nearly_ideal_scheme(3), Err(Error::NotFermatPrime(3)));
        assert!(matches!(nearly_ideal_scheme(9), Err(Error::OutOfRange(_))));
        assert!(matches!(
            nearly_ideal_scheme(8),
            Err(Error::AtomOverflow { .. })
        ));
        let s = nearly_ideal_scheme(1).unwrap();
        assert_eq!(s.n_participants(), 12);
        assert_eq!(s.dist().len(), 2 * 4 * 9);
    }
}

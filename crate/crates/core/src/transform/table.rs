use num_bigint::BigUint;

use crate::dist::JointDistribution;
use crate::error::{Error, Result};

/// A frequency table: `M` columns, one row string per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    /// Column count per atom, in atom order.
    pub counts: Vec<u64>,
    /// Bits per symbol for each variable.
    pub widths: Vec<u32>,
    pub rows: Vec<String>,
}

/// floor(w * m / total) and the remainder, exactly.
fn apportion(w: u128, m: u64, total: u128) -> (u64, BigUint) {
    match w.checked_mul(m as u128) {
        Some(x) => ((x / total) as u64, BigUint::from(x % total)),
        None => {
            let x = BigUint::from(w) * BigUint::from(m);
            let t = BigUint::from(total);
            let q = &x / &t;
            (u64::try_from(q).expect("quotient at most m"), x % t)
        }
    }
}

/// Lays out `m` columns so that atom `a` fills floor(p_a m) or ceil(p_a m) of
/// them (largest remainders first, ties by atom order); columns are in atom
/// order and every symbol is written in fixed-width binary.
pub fn materialize_table(d: &JointDistribution, m: u64) -> Result<Table> {
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    let mut widths = Vec::with_capacity(d.arity());
    for v in 0..d.arity() {
        let alphabet = d.alphabet(v);
        if let Some(&bad) = alphabet.iter().find(|&&x| !(0..1 << 32).contains(&x)) {
            return Err(Error::NonBinary(bad));
        }
        let max = *alphabet.last().expect("non-empty") as u64;
        widths.push((64 - max.leading_zeros()).max(1));
    }

    let (mut counts, rems): (Vec<u64>, Vec<BigUint>) = d
        .weights()
        .iter()
        .map(|&w| apportion(w, m, d.total()))
        .unzip();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| rems[b].cmp(&rems[a]).then(a.cmp(&b)));
    for &i in order.iter().take((m - assigned) as usize) {
        counts[i] += 1;
    }

    let mut rows: Vec<String> = widths
        .iter()
        .map(|&w| String::with_capacity(m as usize * w as usize))
        .collect();
    for (i, &c) in counts.iter().enumerate() {
        for (v, row) in rows.iter_mut().enumerate() {
            let sym = format!("{:0width$b}", d.atom(i)[v], width = widths[v] as usize);
            for _ in 0..c {
                row.push_str(&sym);
            }
        }
    }
    Ok(Table {
        counts,
        widths,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_bit() {
        let d = JointDistribution::uniform(&["x"], &[vec![0], vec![1]]).unwrap();
        assert_eq!(materialize_table(&d, 4).unwrap().rows, vec!["0011"]);
    }

    #[test]
    fn three_quarters() {
        let d = JointDistribution::from_rationals(&["x"], &[(vec![0], (3, 4)), (vec![1], (1, 4))])
            .unwrap();
        let t = materialize_table(&d, 4).unwrap();
        assert_eq!(t.rows, vec!["0001"]);
        assert_eq!(t.counts, vec![3, 1]);
    }

    #[test]
    fn ties_go_to_earlier_atoms() {
        let rows: Vec<Vec<i64>> = (0..3).map(|x| vec![x]).collect();
        let d = JointDistribution::uniform(&["x"], &rows).unwrap();
        let t = materialize_table(&d, 4).unwrap();
        assert_eq!(t.counts, vec![2, 1, 1]);
        assert_eq!(t.widths, vec![2]);
        assert_eq!(t.rows[0], "00000110");
    }

    #[test]
    fn rejects_negative_values() {
        let d = JointDistribution::uniform(&["x"], &[vec![-1], vec![1]]).unwrap();
        assert_eq!(materialize_table(&d, 4), Err(Error::NonBinary(-1)));
    }
}

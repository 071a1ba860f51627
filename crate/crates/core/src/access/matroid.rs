use super::{AccessStructure, Subset, MAX_PARTICIPANTS};
use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// Minimal linearly dependent subsets of `columns`, as sorted 1-based column
/// lists in lexicographic order.
pub fn circuits_of_matrix(field: &FieldSpec, columns: &[Vec<u32>]) -> Result<Vec<Vec<usize>>> {
    let n = columns.len();
    if n > MAX_PARTICIPANTS {
        return Err(Error::OutOfRange(format!(
            "{n} columns exceed the limit of {MAX_PARTICIPANTS}"
        )));
    }
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

    let independent: Vec<bool> = (0u32..1 << n)
        .map(|mask| {
            let cols: Vec<&[u32]> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| columns[i].as_slice())
                .collect();
            field.rank(&cols) == cols.len()
        })
        .collect();

    let mut circuits: Vec<Vec<usize>> = (1u32..1 << n)
        .filter(|&mask| !independent[mask as usize])
        .filter(|&mask| {
            (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .all(|i| independent[(mask & !(1 << i)) as usize])
        })
        .map(|mask| Subset(mask).members())
        .collect();
    circuits.sort();
    Ok(circuits)
}

/// Access structure induced through point `secret_point` on the remaining
/// `n_points - 1` points, relabelled 1.. in increasing order.
pub fn induced_by_matroid(
    n_points: usize,
    circuits: &[Vec<usize>],
    secret_point: usize,
) -> Result<AccessStructure> {
    if secret_point == 0 || secret_point > n_points {
        return Err(Error::OutOfRange(format!(
            "secret point {secret_point} not in 1..={n_points}"
        )));
    }
    let relabel = |p: usize| if p > secret_point { p - 1 } else { p };
    let mut sets = Vec::new();
    for c in circuits {
        if let Some(&bad) = c.iter().find(|&&p| p == 0 || p > n_points) {
            return Err(Error::OutOfRange(format!(
                "circuit point {bad} not in 1..={n_points}"
            )));
        }
        if c.contains(&secret_point) {
            let rest: Vec<usize> = c
                .iter()
                .filter(|&&p| p != secret_point)
                .map(|&p| relabel(p))
                .collect();
            if rest.is_empty() {
                return Err(Error::EmptyAuthorizedSet);
            }
            sets.push(rest);
        }
    }
    if sets.is_empty() {
        return Err(Error::PointUnused(secret_point));
    }
    AccessStructure::from_minimal(n_points - 1, &sets)
}

use crate::access::{AccessStructure, Subset};
use crate::dist::{JointDistribution, VarSet};
use crate::error::{Error, Result};

/// A joint distribution with one secret variable and one share variable per
/// participant of `access`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    dist: JointDistribution,
    secret: usize,
    shares: Vec<usize>,
    access: AccessStructure,
}

/// Conventional variable names: `k` for the secret, `s1..sn` for the shares.
pub fn standard_names(n: usize) -> Vec<String> {
    std::iter::once("k".to_string())
        .chain((1..=n).map(|p| format!("s{p}")))
        .collect()
}

impl Scheme {
    pub fn new<S: AsRef<str>>(
        dist: JointDistribution,
        secret: &str,
        shares: &[S],
        access: AccessStructure,
    ) -> Result<Self> {
        let secret = dist.var_index(secret)?;
        let shares = shares
            .iter()
            .map(|s| dist.var_index(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        if shares.len() != access.n_participants() {
            return Err(Error::InvalidScheme(format!(
                "{} share variables for {} participants",
                shares.len(),
                access.n_participants()
            )));
        }
        let mut used = VarSet::single(secret);
        for &v in &shares {
            if used.contains(v) {
                return Err(Error::InvalidScheme(format!(
                    "variable `{}` used twice",
                    dist.names()[v]
                )));
            }
            used = used.union(VarSet::single(v));
        }
        if used != dist.all_vars() {
            return Err(Error::InvalidScheme(
                "distribution has variables that are neither secret nor share".into(),
            ));
        }
        if dist.alphabet(secret).len() < 2 {
            return Err(Error::InvalidScheme(
                "secret takes fewer than 2 values".into(),
            ));
        }
        Ok(Scheme {
            dist,
            secret,
            shares,
            access,
        })
    }

    /// Scheme over a distribution whose variables are `k, s1, .., sn` in order.
    pub fn standard(dist: JointDistribution, access: AccessStructure) -> Result<Self> {
        let names = standard_names(access.n_participants());
        Scheme::new(dist, &names[0], &names[1..], access)
    }

    pub fn dist(&self) -> &JointDistribution {
        &self.dist
    }

    pub fn access(&self) -> &AccessStructure {
        &self.access
    }

    pub fn n_participants(&self) -> usize {
        self.shares.len()
    }

    pub fn secret_var(&self) -> usize {
        self.secret
    }

    pub fn secret_name(&self) -> &str {
        &self.dist.names()[self.secret]
    }

    /// Variable index of participant `p` (1-based).
    pub fn share_var(&self, p: usize) -> usize {
        self.shares[p - 1]
    }

    pub fn share_vars(&self) -> &[usize] {
        &self.shares
    }

    pub fn share_names(&self) -> Vec<&str> {
        self.shares
            .iter()
            .map(|&v| self.dist.names()[v].as_str())
            .collect()
    }

    pub fn secret_set(&self) -> VarSet {
        VarSet::single(self.secret)
    }

    /// Share variables of the participants in `group`.
    pub fn share_set(&self, group: Subset) -> VarSet {
        group.members().iter().fold(VarSet::EMPTY, |s, &p| {
            s.union(VarSet::single(self.share_var(p)))
        })
    }

    /// Sorted secret support.
    pub fn secret_support(&self) -> Vec<i64> {
        self.dist.alphabet(self.secret)
    }

    /// Secret marginal as `(value, weight)` pairs over `dist().total()`.
    pub fn secret_weights(&self) -> Vec<(i64, u128)> {
        let mut out: Vec<(i64, u128)> = Vec::new();
        let mut pairs: Vec<(i64, u128)> = self
            .dist
            .atoms()
            .map(|(row, w)| (row[self.secret], w))
            .collect();
        pairs.sort_unstable_by_key(|p| p.0);
        for (v, w) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += w,
                _ => out.push((v, w)),
            }
        }
        out
    }

    pub fn secret_is_uniform(&self) -> bool {
        let w = self.secret_weights();
        w.iter().all(|p| p.1 == w[0].1)
    }

    pub(crate) fn with_dist(&self, dist: JointDistribution) -> Result<Scheme> {
        let names: Vec<String> = self.share_names().iter().map(|s| s.to_string()).collect();
        Scheme::new(dist, self.secret_name(), &names, self.access.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_stray_variables() {
        let d =
            JointDistribution::uniform(&["k", "s1", "x"], &[vec![0, 0, 0], vec![1, 1, 0]]).unwrap();
        let g = AccessStructure::from_minimal(1, &[vec![1]]).unwrap();
        assert!(matches!(
            Scheme::new(d, "k", &["s1"], g),
            Err(Error::InvalidScheme(_))
        ));
    }

    #[test]
    fn rejects_constant_secret() {
        let d = JointDistribution::uniform(&["k", "s1"], &[vec![0, 0], vec![0, 1]]).unwrap();
        let g = AccessStructure::from_minimal(1, &[vec![1]]).unwrap();
        assert!(matches!(
            Scheme::standard(d, g),
            Err(Error::InvalidScheme(_))
        ));
    }

    #[test]
    fn share_sets_follow_participants() {
        let d = JointDistribution::uniform(&["k", "s1", "s2"], &[vec![0, 0, 0], vec![1, 1, 1]])
            .unwrap();
        let g = AccessStructure::threshold(1, 2).unwrap();
        let s = Scheme::standard(d, g).unwrap();
        assert_eq!(s.share_set(Subset(0b10)), VarSet(0b100));
        assert_eq!(s.share_names(), vec!["s1", "s2"]);
        assert!(s.secret_is_uniform());
    }
}

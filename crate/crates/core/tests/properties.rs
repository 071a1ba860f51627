use std::collections::BTreeMap;

use proptest::prelude::*;

use npslab::access::{AccessStructure, Subset};
use npslab::construct::replicated_scheme;
use npslab::json::{dist_from_json, dist_to_json};
use npslab::transform::{
    huffman_code, materialize_table, parallel_compose, prefix_free_expand, BitString,
};
use npslab::{audit, DistBuilder, JointDistribution, Scheme, VarSet};

const EPS: f64 = 1e-9;

fn dist_strategy(max_arity: usize) -> impl Strategy<Value = JointDistribution> {
    (1..=max_arity).prop_flat_map(|arity| {
        prop::collection::vec((prop::collection::vec(0i64..4, arity), 1u128..30), 1..25).prop_map(
            move |rows| {
                let names: Vec<String> = (0..arity).map(|i| format!("x{i}")).collect();
                let mut b = DistBuilder::new(&names);
                for (r, w) in &rows {
                    b.push(r, *w);
                }
                b.build().unwrap()
            },
        )
    })
}

/// Weights of the projection of `d` on `vars`, by value tuple.
fn oracle_marginal(d: &JointDistribution, vars: &[usize]) -> BTreeMap<Vec<i64>, u128> {
    let mut m = BTreeMap::new();
    for (row, w) in d.atoms() {
        *m.entry(vars.iter().map(|&v| row[v]).collect()).or_insert(0) += w;
    }
    m
}

fn oracle_entropy(d: &JointDistribution, vars: &[usize]) -> f64 {
    let t = d.total() as f64;
    oracle_marginal(d, vars)
        .values()
        .map(|&w| {
            let p = w as f64 / t;
            -p * p.log2()
        })
        .sum()
}

fn access_strategy(max_n: usize) -> impl Strategy<Value = AccessStructure> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(1u32..(1 << n), 1..5).prop_map(move |masks| {
            AccessStructure::from_subsets(n, masks.into_iter().map(Subset).collect()).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn entropy_matches_float_oracle(d in dist_strategy(4)) {
        for mask in 1u64..(1 << d.arity()) {
            let vars = VarSet(mask);
            let h = d.entropy(vars).unwrap();
            prop_assert!((h - oracle_entropy(&d, &vars.indices())).abs() < EPS);
        }
    }

    #[test]
    fn profile_is_a_polymatroid(d in dist_strategy(4)) {
        let h = d.entropy_profile().unwrap();
        let at = |m: u64| if m == 0 { 0.0 } else { h[m as usize - 1] };
        let full = (1u64 << d.arity()) - 1;
        for a in 0..=full {
            for b in 0..=full {
                prop_assert!(at(a) + at(b) + EPS >= at(a | b) + at(a & b));
                if a & b == a {
                    prop_assert!(at(a) <= at(b) + EPS);
                }
            }
        }
    }

    #[test]
    fn chain_rule_and_mutual_information(d in dist_strategy(3)) {
        let full = (1u64 << d.arity()) - 1;
        for a in 1..=full {
            for b in 1..=full {
                let (x, y) = (VarSet(a), VarSet(b));
                let hxy = d.entropy(x.union(y)).unwrap();
                let hy = d.entropy(y).unwrap();
                prop_assert!((d.cond_entropy(x, y).unwrap() - (hxy - hy)).abs() < EPS);
                let i = d.mutual_information(x, y).unwrap();
                prop_assert!(i >= 0.0);
                prop_assert!((i - (d.entropy(x).unwrap() + hy - hxy)).abs() < EPS);
            }
        }
    }

    #[test]
    fn determination_matches_functional_oracle(d in dist_strategy(3)) {
        let full = (1u64 << d.arity()) - 1;
        for a in 1..=full {
            for b in 0..=full {
                let (ai, bi) = (VarSet(a).indices(), VarSet(b).indices());
                let mut seen: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::new();
                let functional = d.atoms().all(|(row, _)| {
                    let key: Vec<i64> = bi.iter().map(|&v| row[v]).collect();
                    let val: Vec<i64> = ai.iter().map(|&v| row[v]).collect();
                    seen.entry(key).or_insert_with(|| val.clone()) == &val
                });
                prop_assert_eq!(d.is_determined(VarSet(a), VarSet(b)).unwrap(), functional);
            }
        }
    }

    #[test]
    fn independence_matches_product_oracle(d in dist_strategy(3)) {
        let full = (1u64 << d.arity()) - 1;
        let t = d.total();
        for a in 1..=full {
            for b in 1..=full {
                if a & b != 0 {
                    continue;
                }
                let (ai, bi) = (VarSet(a).indices(), VarSet(b).indices());
                let (ma, mb) = (oracle_marginal(&d, &ai), oracle_marginal(&d, &bi));
                let joint = oracle_marginal(&d, &[ai.clone(), bi.clone()].concat());
                let product = ma.iter().all(|(x, &wx)| {
                    mb.iter().all(|(y, &wy)| {
                        let w = joint.get(&[x.clone(), y.clone()].concat()).copied().unwrap_or(0);
                        w * t == wx * wy
                    })
                });
                prop_assert_eq!(d.is_independent(VarSet(a), VarSet(b)).unwrap(), product);
            }
        }
    }

    #[test]
    fn access_structures_are_monotone_antichains(g in access_strategy(6)) {
        let n = g.n_participants();
        let min = g.minimal_sets();
        for &a in min {
            for &b in min {
                prop_assert!(a == b || !a.is_subset_of(b));
            }
        }
        for m in 0u32..(1 << n) {
            let a = Subset(m);
            prop_assert_eq!(g.is_authorized(a), min.iter().any(|s| s.is_subset_of(a)));
            for p in 1..=n {
                if g.is_authorized(a) {
                    prop_assert!(g.is_authorized(Subset(m | 1 << (p - 1))));
                }
            }
        }
    }

    #[test]
    fn replicated_schemes_are_perfect(g in access_strategy(5)) {
        let r = audit(&replicated_scheme(&g, 1).unwrap()).unwrap();
        prop_assert!(r.perfect);
        prop_assert_eq!(r.epsilon1, 0.0);
        prop_assert_eq!(r.epsilon2, 0.0);
    }

    #[test]
    fn perfect_shares_are_at_least_as_large_as_the_secret(g in access_strategy(5), bits in 1u32..3) {
        let s = replicated_scheme(&g, bits).unwrap();
        let r = audit(&s).unwrap();
        for p in g.essential_participants().members() {
            prop_assert!(r.share_alphabets[p - 1] >= r.secret_alphabet);
            prop_assert!(r.share_entropies[p - 1] + EPS >= r.secret_entropy);
        }
    }

    #[test]
    fn composition_scales_the_profile(d in dist_strategy(3), q in 2u32..4) {
        let names = d.names().to_vec();
        let n = names.len() - 1;
        prop_assume!(n >= 1 && d.alphabet(0).len() >= 2);
        let g = AccessStructure::threshold(n, n).unwrap();
        let s = Scheme::new(d, &names[0], &names[1..], g).unwrap();
        let c = parallel_compose(&s, q).unwrap();
        let (h, hq) = (s.dist().entropy_profile().unwrap(), c.dist().entropy_profile().unwrap());
        for (x, y) in h.iter().zip(&hq) {
            prop_assert!((y - q as f64 * x).abs() <= 1e-6 * y.abs().max(1.0));
        }
    }

    #[test]
    fn huffman_codes_are_prefix_free_and_short(weights in prop::collection::vec(1u128..100, 1..20)) {
        let codes = huffman_code(&weights);
        prop_assert_eq!(codes.len(), weights.len());
        let kraft: f64 = codes.iter().map(|c| 2f64.powi(-(c.len() as i32))).sum();
        prop_assert!(kraft <= 1.0 + EPS);
        for (i, a) in codes.iter().enumerate() {
            for (j, b) in codes.iter().enumerate() {
                prop_assert!(i == j || !a.is_prefix_of(b));
            }
        }
        let t: u128 = weights.iter().sum();
        let h: f64 = weights.iter().map(|&w| { let p = w as f64 / t as f64; -p * p.log2() }).sum();
        let avg: f64 = weights.iter().zip(&codes).map(|(&w, c)| w as f64 / t as f64 * c.len() as f64).sum();
        prop_assert!(avg < h + 1.0 + EPS);
        prop_assert!(avg + EPS >= h);
    }

    #[test]
    fn expansion_is_prefix_free(a in prop::collection::vec(any::<bool>(), 0..8), b in prop::collection::vec(any::<bool>(), 0..8)) {
        let (a, b) = (BitString(a), BitString(b));
        let (ea, eb) = (prefix_free_expand(&a), prefix_free_expand(&b));
        prop_assert_eq!(ea.len(), 2 * a.len() + 2);
        if a != b {
            prop_assert!(!ea.is_prefix_of(&eb));
        }
    }

    #[test]
    fn tables_apportion_within_one(d in dist_strategy(3), m in 1u64..2000) {
        let t = materialize_table(&d, m).unwrap();
        prop_assert_eq!(t.counts.iter().sum::<u64>(), m);
        for (&c, &w) in t.counts.iter().zip(d.weights()) {
            prop_assert!((c as u128 * d.total()).abs_diff(w * m as u128) < d.total());
        }
    }

    #[test]
    fn json_round_trip(d in dist_strategy(4)) {
        let text = serde_json::to_string(&dist_to_json(&d)).unwrap();
        prop_assert_eq!(dist_from_json(&serde_json::from_str(&text).unwrap()).unwrap(), d);
    }
}

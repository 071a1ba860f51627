use npslab::access::{circuits_of_matrix, induced_by_matroid, AccessStructure};
use npslab::construct::{
    fano_columns, fano_scheme, leaky_shamir, linear_scheme, nearly_ideal_scheme, nonfano_scheme,
    replicated_scheme, shamir,
};
use npslab::transform::{one_bit_reduction, restrict_secret, Splitting};
use npslab::{audit, FieldSpec, Subset};

fn binary_entropy(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

#[test]
fn matroid_ports_are_perfect_and_ideal() {
    for s in [
        fano_scheme(1).unwrap(),
        fano_scheme(2).unwrap(),
        nonfano_scheme(3).unwrap(),
        nonfano_scheme(5).unwrap(),
    ] {
        let r = audit(&s).unwrap();
        assert!(r.perfect && r.ideal);
        assert_eq!(r.rate, 1.0);
        assert_eq!(s.n_participants(), 6);
    }
}

#[test]
fn fano_and_nonfano_differ_on_one_minimal_set() {
    let f = fano_scheme(1).unwrap();
    let nf = nonfano_scheme(3).unwrap();
    let extra: Vec<Subset> = nf
        .access()
        .minimal_sets()
        .iter()
        .copied()
        .filter(|m| !f.access().minimal_sets().contains(m))
        .collect();
    assert_eq!(extra, vec![Subset::from_members(&[3, 5, 6])]);
    assert_eq!(
        nf.access().minimal_sets().len(),
        f.access().minimal_sets().len() + 1
    );
}

#[test]
fn shamir_thresholds_exactly() {
    let s = shamir(3, 5, &FieldSpec::from_order(8).unwrap(), None).unwrap();
    for m in 1u32..32 {
        let g = Subset(m);
        let authorized = g.len() >= 3;
        assert_eq!(s.access().is_authorized(g), authorized);
        assert_eq!(
            s.dist()
                .is_determined(s.secret_set(), s.share_set(g))
                .unwrap(),
            authorized
        );
        assert_eq!(
            s.dist()
                .is_independent(s.secret_set(), s.share_set(g))
                .unwrap(),
            !authorized
        );
    }
}

#[test]
fn leaky_shamir_leaks_the_parity() {
    let s = leaky_shamir(2, 3, &FieldSpec::prime(257).unwrap(), 1).unwrap();
    let r = audit(&s).unwrap();
    let leak = binary_entropy(128.0 / 257.0);
    assert_eq!(r.epsilon1, 0.0);
    assert!((r.epsilon2 - leak / 257f64.log2()).abs() < 1e-12);
    assert!(!r.perfect);

    let restricted = restrict_secret(&s, 8).unwrap();
    let r = audit(&restricted).unwrap();
    assert!((r.epsilon2 - 1.0 / 8.0).abs() < 1e-12);
}

#[test]
fn splitting_on_the_leaked_bit() {
    let s = restrict_secret(
        &leaky_shamir(2, 3, &FieldSpec::prime(257).unwrap(), 1).unwrap(),
        8,
    )
    .unwrap();
    let odd = Splitting::new((1..256).step_by(2).collect());
    let r = audit(&one_bit_reduction(&s, &odd).unwrap()).unwrap();
    assert_eq!(r.epsilon2, 1.0);
    assert_eq!(r.secret_entropy, 1.0);
}

#[test]
fn path_structure_needs_large_middle_shares() {
    let g = AccessStructure::from_minimal(4, &[vec![1, 2], vec![2, 3], vec![3, 4]]).unwrap();
    let r = audit(&replicated_scheme(&g, 2).unwrap()).unwrap();
    assert!(r.perfect);
    assert!(r.share_entropies[1] + r.share_entropies[2] >= 3.0 * r.secret_entropy - 1e-9);
    assert!(r.rate < 1.0);
}

#[test]
fn nearly_ideal_small_cases() {
    for n in [1u32, 2] {
        let r = audit(&nearly_ideal_scheme(n).unwrap()).unwrap();
        assert_eq!(r.rate, 1.0);
        assert_eq!(r.epsilon2, 0.0);
        assert!(r.epsilon1 <= 3.0 / n as f64);
        assert_eq!(r.secret_entropy, n as f64);
    }
    assert!(nearly_ideal_scheme(3).is_err());
}

#[test]
fn fano_port_through_unit_vector() {
    let field = FieldSpec::prime(2).unwrap();
    let cols = fano_columns();
    let circuits = circuits_of_matrix(&field, &cols).unwrap();
    let access = induced_by_matroid(7, &circuits, 1).unwrap();
    let s = linear_scheme(&field, &cols, 1, access).unwrap();
    let r = audit(&s).unwrap();
    assert!(r.perfect && r.ideal);
    assert_eq!(r.secret_alphabet, 2);
}

mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use splitcrit::default_context;
use splitcrit::units::{
    brute_force_eigenclasses, extract_normal_form, is_pth_power_class, verify_galois_eigen, EigenNormalForm,
    GaloisCharacter, UnitClass, UnitError,
};
use splitcrit::CycloElement;

#[test]
fn normal_form_round_trip_is_exhaustive() {
    for p in [3u64, 5] {
        for n in [1, 2] {
            let ctx = default_context(p, n).unwrap();
            for s in 0..p {
                for t in 0..p {
                    let ext = extract_normal_form(&normal_form_element(&ctx, s, t)).unwrap();
                    assert!(ext.admissible());
                    assert_eq!((ext.form.s(), ext.form.t()), (s, t));
                }
            }
        }
    }
}

#[test]
fn inadmissible_inputs_name_a_position() {
    let ctx = default_context(5, 1).unwrap();
    let one = CycloElement::one(&ctx);
    let ext = extract_normal_form(&(&one + &CycloElement::pi_pow(&ctx, 2))).unwrap();
    assert_eq!(ext.failing_position, Some(2));
    let two = CycloElement::from_int(&ctx, 2);
    assert!(matches!(extract_normal_form(&two), Err(UnitError::NotAOneUnit)));
}

#[test]
fn dlog_and_log_read_off_s_and_t() {
    for p in [3u64, 5, 7] {
        let ctx = default_context(p, 1).unwrap();
        let field = ctx.residue_field();
        for s in 0..p {
            for t in 0..p {
                let q = normal_form_element(&ctx, s, t);
                assert_eq!(q.dlog_mod_pi().unwrap(), field.from_i64(-(s as i64)));
                if s == 0 {
                    let l = q.log_one_unit().unwrap();
                    assert_eq!(field.prime_field_value(&l.digit(p as usize)), Some(t));
                }
            }
        }
    }
}

#[test]
fn eigenclasses_form_a_subgroup_of_order_p_squared() {
    for (p, n) in [(3u64, 1usize), (3, 2), (5, 1)] {
        let ctx = default_context(p, n).unwrap();
        let classes = brute_force_eigenclasses(&ctx, 1).unwrap();
        assert_eq!(classes.len(), (p * p) as usize);
        let set: BTreeSet<_> = classes.iter().cloned().collect();
        for a in &classes {
            let inv = UnitClass::of(&a.to_element().inverse().unwrap()).unwrap();
            assert!(set.contains(&inv));
            for b in &classes {
                assert!(set.contains(&UnitClass::of(&(&a.to_element() * &b.to_element())).unwrap()));
            }
        }
    }
}

#[test]
fn pth_power_class_matches_exhaustive_search() {
    for n in [1, 2] {
        let small = small_context(3, n);
        let powers = pth_powers(&small);
        for s in 0..3 {
            for t in 0..3 {
                let nf = EigenNormalForm::new(3, s, t);
                let searched = powers.contains(&key(&normal_form_element(&small, s as u64, t as u64), 3));
                assert_eq!(is_pth_power_class(&nf), searched, "n={n} (s,t)=({s},{t})");
            }
        }
    }
}

#[test]
fn galois_eigen_check_depends_on_c_gamma() {
    let ctx = default_context(3, 3).unwrap();
    let q = normal_form_element(&ctx, 1, 2);
    assert!(verify_galois_eigen(&q, 1).unwrap());
    assert!(verify_galois_eigen(&q, 4).unwrap());
    assert!(verify_galois_eigen(&q, 2).is_err());
    let off = &q * &(&CycloElement::one(&ctx) + &CycloElement::pi_pow(&ctx, 2));
    assert!(!verify_galois_eigen(&off, 1).unwrap());
}

#[test]
fn enumeration_refuses_huge_spaces() {
    let ctx = default_context(7, 3).unwrap();
    assert!(matches!(brute_force_eigenclasses(&ctx, 1), Err(UnitError::EnumerationTooLarge { .. })));
}

#[test]
fn unit_class_equality_is_digit_equality() {
    let ctx = default_context(3, 2).unwrap();
    let a = UnitClass::of(&normal_form_element(&ctx, 1, 1)).unwrap();
    let b = UnitClass::from_digits(&ctx, a.digits().to_vec()).unwrap();
    assert_eq!(a, b);
    let c = UnitClass::of(&normal_form_element(&ctx, 1, 2)).unwrap();
    assert_ne!(a, c);
    assert!(UnitClass::from_digits(&ctx, vec![]).is_err());
}

proptest! {
    #[test]
    fn normal_form_is_canonical(p in prop::sample::select(vec![3u64, 5, 7]), s in -50i64..50, t in -50i64..50) {
        let nf = EigenNormalForm::new(p, s, t);
        prop_assert!(nf.s() < p && nf.t() < p);
        prop_assert_eq!(nf.s() as i64, s.rem_euclid(p as i64));
        prop_assert_eq!(nf.t() as i64, t.rem_euclid(p as i64));
    }

    #[test]
    fn galois_characters_are_multiplicative(
        p in prop::sample::select(vec![3u64, 5, 7]),
        alpha in 1u64..7,
        i in 0i64..7,
        j1 in 0u64..20,
        j2 in 0u64..20,
        u1 in 1u64..7,
        u2 in 1u64..7,
    ) {
        prop_assume!(alpha % p != 0 && u1 % p != 0 && u2 % p != 0);
        let ctx = default_context(p, 1).unwrap();
        let chi = GaloisCharacter::new(&ctx, alpha, i).unwrap();
        let m = ctx.coefficient_modulus() as u128;
        let lhs = chi.evaluate(j1 + j2, u1 * u2 % p);
        let rhs = (chi.evaluate(j1, u1) as u128 * chi.evaluate(j2, u2) as u128 % m) as u64;
        prop_assert_eq!(lhs, rhs);
    }
}

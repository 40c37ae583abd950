//! Algebraic invariants on random inputs.

mod common;

use affine_hecke::arith::{int, lcm, rat, Rat};
use affine_hecke::boundary::{
    escape_witness, factor_ideal, minimal_norm_ideals, omega_membership, s_zero, zeta_class_partial, zeta_partial,
    AdelePoint,
};
use affine_hecke::hecke::{HeckeAlgebra, HeckeElement};
use affine_hecke::number_field::residue::units_mod;
use affine_hecke::number_field::{
    ideals_up_to, make_field, primes_above, Field, FieldElement, FractionalIdeal, Ideal, NumberField,
};
use affine_hecke::scalar::Surd;
use affine_hecke::states::weil_identity_check;
use proptest::prelude::*;

use common::TEST_FIELDS;

fn generators(alg: &HeckeAlgebra) -> Vec<HeckeElement<Surd>> {
    let f = &alg.field;
    let mut mult = vec![FieldElement::from_int(2), FieldElement::from_int(3)];
    let mut shifts = vec![FieldElement::from_rat(rat(1, 2)), FieldElement::from_rat(rat(1, 3))];
    if !f.is_rational() {
        let x = f.elem(2, 1);
        if f.is_totally_positive(&x).unwrap() {
            mult.push(x);
        }
        shifts.push(FieldElement::omega().scale(&rat(1, 2)));
    }
    let mut out = Vec::new();
    for a in &mult {
        out.push(alg.mu(a).unwrap());
        out.push(alg.mu_star(a).unwrap());
    }
    for r in &shifts {
        out.push(alg.e(r).to_surd());
    }
    out
}

fn word(alg: &HeckeAlgebra, gens: &[HeckeElement<Surd>], idx: &[usize]) -> HeckeElement<Surd> {
    idx.iter().fold(alg.identity(), |acc, &i| alg.convolve(&acc, &gens[i % gens.len()]))
}

fn field_strategy() -> impl Strategy<Value = i128> {
    prop::sample::select(TEST_FIELDS.to_vec())
}

fn word_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..16, 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coset_counts_and_modular_function(d in field_strategy(), w in word_strategy()) {
        let alg = HeckeAlgebra::new(make_field(d).unwrap());
        let h = word(&alg, &generators(&alg), &w);
        for c in h.coeffs.keys() {
            prop_assert_eq!(alg.left_coset_reps(c).len() as i128, c.left);
            prop_assert_eq!(alg.right_coset_reps(c).len() as i128, c.right);
            prop_assert_eq!(c.delta(), Rat::from_integer(1) / alg.field.norm(&c.x));
        }
    }

    #[test]
    fn involution_reverses_products(d in field_strategy(), a in word_strategy(), b in word_strategy()) {
        let alg = HeckeAlgebra::new(make_field(d).unwrap());
        let g = generators(&alg);
        let (x, y) = (word(&alg, &g, &a), word(&alg, &g, &b));
        prop_assert_eq!(alg.involution(&alg.involution(&x)), x.clone());
        prop_assert_eq!(
            alg.involution(&alg.convolve(&x, &y)),
            alg.convolve(&alg.involution(&y), &alg.involution(&x))
        );
    }

    #[test]
    fn convolution_is_associative(d in field_strategy(), a in word_strategy(), b in word_strategy(), c in 0usize..16) {
        let alg = HeckeAlgebra::new(make_field(d).unwrap());
        let g = generators(&alg);
        let (x, y, z) = (word(&alg, &g, &a), word(&alg, &g, &b), word(&alg, &g, &[c]));
        prop_assert_eq!(
            alg.convolve(&alg.convolve(&x, &y), &z),
            alg.convolve(&x, &alg.convolve(&y, &z))
        );
    }

    #[test]
    fn symmetries_are_homomorphisms(d in field_strategy(), a in word_strategy(), b in word_strategy(), pick in 0usize..64) {
        let alg = HeckeAlgebra::new(make_field(d).unwrap());
        let g = generators(&alg);
        let (x, y) = (word(&alg, &g, &a), word(&alg, &g, &b));
        let xy = alg.convolve(&x, &y);
        let m = lcm(lcm(alg.required_level(&x), alg.required_level(&y)), alg.required_level(&xy));
        let units = units_mod(&alg.field, m);
        let u = &units[pick % units.len()];
        let lhs = alg.tau_u(&xy, u, m).unwrap();
        let rhs = alg.convolve(&alg.tau_u(&x, u, m).unwrap(), &alg.tau_u(&y, u, m).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn time_evolution_group_law(d in field_strategy(), a in word_strategy(), s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let alg = HeckeAlgebra::new(make_field(d).unwrap());
        let x = word(&alg, &generators(&alg), &a).to_complex();
        let two_step = alg.sigma_t(&alg.sigma_t(&x, s), t);
        prop_assert!(two_step.distance(&alg.sigma_t(&x, s + t)) < 1e-9);
        prop_assert!(alg.sigma_t(&x, 0.0).distance(&x) < 1e-12);
    }

    #[test]
    fn analytic_continuation_is_multiplicative(d in field_strategy(), a in word_strategy(), b in word_strategy(), k in 1i128..4) {
        let alg = HeckeAlgebra::new(make_field(d).unwrap());
        let g = generators(&alg);
        let (x, y) = (word(&alg, &g, &a), word(&alg, &g, &b));
        let beta = int(k);
        let lhs = alg.sigma_analytic(&alg.convolve(&x, &y), &beta).unwrap();
        let rhs = alg.convolve(&alg.sigma_analytic(&x, &beta).unwrap(), &alg.sigma_analytic(&y, &beta).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn zeta_partials_grow_and_split_by_class(d in field_strategy(), b1 in 1i128..200, extra in 1i128..200, beta in 1.5f64..4.0) {
        let nf = NumberField::new(d).unwrap();
        let small = zeta_partial(&nf.field, beta, b1);
        let large = zeta_partial(&nf.field, beta, b1 + extra);
        prop_assert!(small.value <= large.value);
        let by_class: f64 = (0..nf.h_plus()).map(|c| zeta_class_partial(&nf, c, beta, b1).unwrap().value).sum();
        prop_assert!((by_class - small.value).abs() <= 1e-12 * small.value);
    }

    #[test]
    fn ground_cells_are_disjoint(d in field_strategy(), n in 1usize..400, pick in 0usize..64, m in prop::sample::select(vec![4i128, 6, 10])) {
        let nf = NumberField::new(d).unwrap();
        let f = &nf.field;
        let t = minimal_norm_ideals(&nf);
        let ideals = ideals_up_to(120, f);
        let a = &ideals[n % ideals.len()];
        let units = units_mod(f, m);
        let p = AdelePoint::from_ideal(f, a, units[pick % units.len()].clone(), m, 120).unwrap();
        match omega_membership(f, &p, &t).unwrap() {
            Some(cell) => prop_assert_eq!(t.cell_of(a), Some(cell)),
            None => prop_assert_eq!(t.cell_of(a), None),
        }
    }

    #[test]
    fn weil_identity_random(d in field_strategy(), m in 2i128..30, pick in 0usize..400, a in 0i128..30, b in 0i128..30) {
        let f = make_field(d).unwrap();
        let units = units_mod(&f, m);
        let u = &units[pick % units.len()];
        let z = f.elem(a % m, if f.is_rational() { 0 } else { b % m }).scale(&rat(1, m));
        prop_assert!(weil_identity_check(&f, u, &z, m).unwrap());
    }
}

#[test]
fn s_zero_is_a_norm_one_inverse_closed_set() {
    for d in TEST_FIELDS {
        let nf = NumberField::new(d).unwrap();
        let f = &nf.field;
        let s = s_zero(f, &minimal_norm_ideals(&nf)).unwrap();
        assert!(s.contains(&FractionalIdeal::unit(f)), "d={d}");
        for e in &s.elements {
            assert_eq!(e.ideal.norm(), int(1), "d={d}");
            assert!(s.contains(&e.ideal.inv(f)), "d={d}");
            assert!(f.is_totally_positive(&e.generator).unwrap());
            assert_eq!(FractionalIdeal::principal(f, &e.generator).unwrap(), e.ideal);
        }
    }
}

fn check_escape(nf: &NumberField, f: &Field, p: &Ideal) {
    let h = nf.h_plus() as u32;
    let x = escape_witness(nf, p).unwrap();
    assert!(f.is_totally_positive(&x).unwrap());
    assert_eq!(f.norm(&x), Rat::from_integer(p.norm().pow(h)));
    assert!(p.norm().pow(h) > 1);
    let principal = Ideal::principal(f, &x).unwrap();
    assert_eq!(factor_ideal(f, &principal).unwrap(), vec![(p.clone(), h)]);
}

#[test]
fn escape_witnesses_generate_prime_powers() {
    for d in TEST_FIELDS {
        let nf = NumberField::new(d).unwrap();
        let f = &nf.field;
        for q in [2i128, 3, 5, 7, 11, 13, 17, 19, 23, 29] {
            for pr in primes_above(q, f).unwrap() {
                check_escape(&nf, f, &pr.ideal);
            }
        }
    }
}

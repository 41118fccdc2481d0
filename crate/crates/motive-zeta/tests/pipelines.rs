//! Cross-module consistency: algebraic laws of the class ring under
//! randomized inputs, count multiplicativity against real enumeration,
//! round trips between the local solvers and their generating quotients,
//! and agreement between the expression language and the typed operations.

use motive_zeta::dirichlet::{solve_shift_equation, DirichletSeries};
use motive_zeta::expr::{elaborate, parse_expr};
use motive_zeta::field::make_field;
use motive_zeta::lfun::{
    elliptic_global_lnear, lnear_good_reduction, ltot_from_good_model, solve_local_near,
};
use motive_zeta::motive::VirtualMotive;
use motive_zeta::poly::PolyQ;
use motive_zeta::ratfunc::RatFuncQ;
use motive_zeta::series::PowerSeriesQ;
use motive_zeta::variety::{count_tower, VarietySpec, WeierstrassCurve};
use num::{BigInt, BigRational, One, Zero};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Atom pool: distinct irreducible polynomials with constant term 1, so
/// any selection is automatically pairwise coprime.
fn atom_poly() -> impl Strategy<Value = PolyQ> {
    prop_oneof![
        Just(PolyQ::from_i64(&[1, -1])),
        Just(PolyQ::from_i64(&[1, 1])),
        Just(PolyQ::from_i64(&[1, -2])),
        Just(PolyQ::from_i64(&[1, 2])),
        Just(PolyQ::from_i64(&[1, -3])),
        Just(PolyQ::from_i64(&[1, -5])),
        Just(PolyQ::from_i64(&[1, -1, 2])),
        Just(PolyQ::from_i64(&[1, 1, 3])),
    ]
}

fn motive(q: u64) -> impl Strategy<Value = VirtualMotive> {
    prop::collection::vec((atom_poly(), -2i64..=2), 0..4).prop_map(move |factors| {
        let factors: Vec<_> = factors.into_iter().filter(|(_, m)| *m != 0).collect();
        VirtualMotive::from_factors(q, factors).unwrap()
    })
}

fn any_motive() -> impl Strategy<Value = VirtualMotive> {
    prop_oneof![Just(2u64), Just(5u64)].prop_flat_map(motive)
}

/// Compare classes through their canonical rational form.
fn same(a: &VirtualMotive, b: &VirtualMotive) -> bool {
    a.q() == b.q() && a.z_function() == b.z_function()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn addition_laws(pair in prop_oneof![Just(2u64), Just(5u64)]
        .prop_flat_map(|q| (motive(q), motive(q), motive(q)))) {
        let (a, b, c) = pair;
        prop_assert!(same(&a.add(&b).unwrap(), &b.add(&a).unwrap()));
        prop_assert!(same(
            &a.add(&b).unwrap().add(&c).unwrap(),
            &a.add(&b.add(&c).unwrap()).unwrap()
        ));
        // a - a = 0, and 0 is neutral.
        prop_assert!(a.sub(&a).unwrap().is_zero());
        prop_assert!(same(&a.add(&VirtualMotive::zero(a.q())).unwrap(), &a));
    }

    #[test]
    fn tensor_laws(pair in prop_oneof![Just(2u64), Just(5u64)]
        .prop_flat_map(|q| (motive(q), motive(q), motive(q)))) {
        let (a, b, c) = pair;
        let q = a.q();
        prop_assert!(same(&a.tensor(&b).unwrap(), &b.tensor(&a).unwrap()));
        prop_assert!(same(
            &a.tensor(&b).unwrap().tensor(&c).unwrap(),
            &a.tensor(&b.tensor(&c).unwrap()).unwrap()
        ));
        // point is the unit; distributes over addition.
        prop_assert!(same(&a.tensor(&VirtualMotive::point(q)).unwrap(), &a));
        prop_assert!(same(
            &a.tensor(&b.add(&c).unwrap()).unwrap(),
            &a.tensor(&b).unwrap().add(&a.tensor(&c).unwrap()).unwrap()
        ));
    }

    #[test]
    fn tensor_counts_multiply(pair in prop_oneof![Just(2u64), Just(5u64)]
        .prop_flat_map(|q| (motive(q), motive(q)))) {
        let (a, b) = pair;
        let t = a.tensor(&b).unwrap();
        for n in 1..=4usize {
            prop_assert_eq!(t.count_at(n), a.count_at(n) * b.count_at(n));
        }
    }

    #[test]
    fn duality_and_twists(a in any_motive(), r in -2i64..=2, s in -2i64..=2) {
        let q = a.q();
        prop_assert!(same(&a.dual().dual(), &a));
        prop_assert!(same(
            &a.tate_twist(r).unwrap().tate_twist(s).unwrap(),
            &a.tate_twist(r + s).unwrap()
        ));
        // Tensoring with the Lefschetz class is the (-1)-twist.
        prop_assert!(same(
            &a.tensor(&VirtualMotive::lefschetz(q)).unwrap(),
            &a.tate_twist(-1).unwrap()
        ));
        // Twisting scales counts by q^{-rn}.
        let tw = a.tate_twist(r).unwrap();
        let qr = BigRational::from_integer(BigInt::from(q)).pow(i32::try_from(r).unwrap());
        for n in 1..=3usize {
            prop_assert_eq!(tw.count_at(n), a.count_at(n) / qr.pow(i32::try_from(n).unwrap()));
        }
    }

    #[test]
    fn shift_is_a_sign(a in any_motive(), k in 0i64..=4) {
        let shifted = a.shift(k);
        for n in 1..=3usize {
            let expected = if k % 2 == 0 { a.count_at(n) } else { -a.count_at(n) };
            prop_assert_eq!(shifted.count_at(n), expected);
        }
        prop_assert!(same(&a.shift(1).shift(1), &a));
    }

    #[test]
    fn functional_equation_is_universal(a in any_motive()) {
        prop_assert!(a.functional_equation().holds);
    }

    #[test]
    fn nearby_solver_round_trips(factors in prop::collection::vec(
        (prop_oneof![Just(1i64), Just(2), Just(3), Just(4), Just(5)], -2i64..=2), 1..4)) {
        // Random rational S with S(0) = 1; its good-model quotient must
        // come back to S exactly (the solution is unique).
        let qv = 2u64;
        let mut s = RatFuncQ::one();
        for (root, e) in factors {
            let atom = RatFuncQ::from_den(PolyQ::from_i64(&[1, -root])).unwrap();
            s = s.mul(&atom.powi(e));
        }
        let r = ltot_from_good_model(&s, qv);
        let back = solve_local_near(&r, qv).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn shift_solver_satisfies_its_equation(tail in prop::collection::vec(-3i64..=3, 15)) {
        // Random f with a_1 = 1; the solution g must satisfy
        // g(s) = f(s) * g(s+1) through the cutoff.
        let mut coeffs = vec![BigRational::one()];
        coeffs.extend(tail.into_iter().map(rat));
        let f = DirichletSeries::new(coeffs);
        let g = solve_shift_equation(&f).unwrap();
        let rhs = f.mul(&g.shift_argument(1));
        for n in 1..=f.cutoff() {
            prop_assert_eq!(g.coeff(n), rhs.coeff(n));
        }
    }

    #[test]
    fn dirichlet_group_laws(tail_a in prop::collection::vec(-3i64..=3, 11),
                            tail_b in prop::collection::vec(-3i64..=3, 11)) {
        let mk = |tail: Vec<i64>| {
            let mut coeffs = vec![BigRational::one()];
            coeffs.extend(tail.into_iter().map(rat));
            DirichletSeries::new(coeffs)
        };
        let (a, b) = (mk(tail_a), mk(tail_b));
        let (ab, ba) = (a.mul(&b), b.mul(&a));
        prop_assert_eq!(ab.coeffs(), ba.coeffs());
        let ident = a.mul(&a.inv().unwrap());
        prop_assert_eq!(ident.coeff(1), BigRational::one());
        for n in 2..=a.cutoff() {
            prop_assert_eq!(ident.coeff(n), BigRational::zero());
        }
        // Argument shifts compose additively.
        let (two_step, one_step) = (a.shift_argument(1).shift_argument(2), a.shift_argument(3));
        prop_assert_eq!(two_step.coeffs(), one_step.coeffs());
    }
}

#[test]
fn product_variety_matches_tensor_class() {
    // {xy = 1} x {xy = 1} enumerated as one four-variable variety agrees
    // with the tensor square of the one-factor class. Base 2 keeps the
    // four-variable enumeration at depth 5 under the size cap.
    let q = 2u64;
    let f = make_field(q, 1).unwrap();
    let one_factor =
        VarietySpec::from_json_str(r#"{"vars":["x","y"],"kind":"affine","eqs":["x*y - 1"]}"#)
            .unwrap();
    let product = VarietySpec::from_json_str(
        r#"{"vars":["x","y","u","v"],"kind":"affine","eqs":["x*y - 1","u*v - 1"]}"#,
    )
    .unwrap();
    let counts1 = count_tower(&one_factor, &f, 5).unwrap();
    let counts2 = count_tower(&product, &f, 5).unwrap();
    for (c1, c2) in counts1.iter().zip(&counts2) {
        assert_eq!(c1 * c1, *c2);
    }
    let m1 = VirtualMotive::from_counts(q, &counts1, 1, 1).unwrap();
    let m2 = VirtualMotive::from_counts(q, &counts2, 2, 2).unwrap();
    assert_eq!(m1.tensor(&m1).unwrap().z_function(), m2.z_function());
}

#[test]
fn expression_language_agrees_with_typed_operations() {
    let env: BTreeMap<String, VirtualMotive> = BTreeMap::new();
    let bound = |_: &str| false;
    let run = |text: &str, q: u64| elaborate(&parse_expr(text, &bound).unwrap(), q, &env).unwrap();

    // point + lefschetz is the projective line, here recovered from
    // actual enumeration.
    let f = make_field(3, 1).unwrap();
    let line =
        VarietySpec::from_json_str(r#"{"vars":["x","y"],"kind":"projective","eqs":[]}"#).unwrap();
    let counts = count_tower(&line, &f, 4).unwrap();
    let enumerated = VirtualMotive::from_counts(3, &counts, 0, 2).unwrap();
    assert_eq!(
        run("point + lefschetz", 3).z_function(),
        enumerated.z_function()
    );

    // Operator expressions against the direct calls.
    let l = VirtualMotive::lefschetz(5);
    assert_eq!(
        run("dual(lefschetz)", 5).z_function(),
        l.dual().z_function()
    );
    assert_eq!(
        run("twist(lefschetz, 1)", 5).z_function(),
        l.tate_twist(1).unwrap().z_function()
    );
    assert_eq!(
        run("lefschetz * lefschetz", 5).z_function(),
        l.tensor(&l).unwrap().z_function()
    );

    // Scalar pushforward halves the base: over context base 2 the inner
    // expression lives over 4, and the result expands the variable.
    let pushed = run("push(point, 2)", 2);
    let expected = RatFuncQ::from_den(PolyQ::from_i64(&[1, 0, -1])).unwrap();
    assert_eq!(pushed.z_function(), expected);
}

#[test]
fn elliptic_series_is_the_euler_product_of_its_ledger() {
    let e = WeierstrassCurve::new(0, 0, 0, -1, 1).unwrap();
    let (series, ledger) = elliptic_global_lnear(&e, 30, 40).unwrap();
    let direct = DirichletSeries::euler_product(
        ledger
            .iter()
            .filter(|p| p.provenance != "skipped")
            .map(|p| (p.norm, &p.local_factor)),
        40,
    )
    .unwrap();
    assert_eq!(series.coeffs(), direct.coeffs());
}

#[test]
fn good_reduction_nearby_factor_is_the_local_zeta() {
    // For good reduction the nearby factor is the local zeta itself, and
    // the solver recovers it from the total quotient.
    let zeta_v = RatFuncQ::new(
        PolyQ::from_i64(&[1, -2, 5]),
        &PolyQ::from_i64(&[1, -1]) * &PolyQ::from_i64(&[1, -5]),
    )
    .unwrap();
    assert_eq!(lnear_good_reduction(&zeta_v, 5), zeta_v);
    let r = ltot_from_good_model(&zeta_v, 5);
    assert_eq!(solve_local_near(&r, 5).unwrap(), zeta_v);
}

#[test]
fn solver_output_expands_to_the_oracle_series() {
    // Independent check of the nearby solver: the power-series
    // coefficients of the solution satisfy the convolution recursion
    // s_n (1 - q^{-n}) = sum_{j>=1} r_j s_{n-j} q^{-(n-j)}, s_0 = 1,
    // derived directly from S(u) = R(u) S(u/q).
    let qv = 5u64;
    let r = RatFuncQ::new(
        PolyQ::new(vec![rat(1), -rat(1) / rat(5)]),
        PolyQ::from_i64(&[1, -5]),
    )
    .unwrap();
    let s = solve_local_near(&r, qv).unwrap();

    let depth = 12usize;
    let r_series = PowerSeriesQ::from_ratfunc(&r, depth);
    let s_series = PowerSeriesQ::from_ratfunc(&s, depth);
    let qr = rat(5);
    for n in 1..=depth {
        let lhs = s_series.coeff(n) * (BigRational::one() - qr.pow(-(i32::try_from(n).unwrap())));
        let mut rhs = BigRational::zero();
        for j in 1..=n {
            rhs += r_series.coeff(j)
                * s_series.coeff(n - j)
                * qr.pow(-(i32::try_from(n - j).unwrap()));
        }
        assert_eq!(lhs, rhs, "recursion fails at n={n}");
    }
}

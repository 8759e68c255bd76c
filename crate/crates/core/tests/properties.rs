use asmbridge::bridge::{build_map, MapKind};
use asmbridge::fdb::{enumerate_dio, fdb_qderiv_at0};
use asmbridge::sample::random_pde;
use asmbridge::seriesgen::{check_linearity, generate_ahsm_rearranged, qderiv_at0};
use asmbridge::symcore::atom::IndepVar;
use asmbridge::symcore::{diff_total, eval_exact, normalize, parse, substitute, Atom, Bindings, Expr, FuncTable, Point};
use asmbridge::Rational;
use proptest::prelude::*;

/// Small expressions in x, t and a, with denominators bounded away from
/// zero on the sampled points.
fn expr_src() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("t".to_string()),
        Just("a".to_string()),
        (-4i64..=4).prop_map(|n| format!("({n})")),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| format!("({l} + {r})")),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| format!("({l} - {r})")),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| format!("({l} * {r})")),
            (inner.clone(), 0u32..=3).prop_map(|(b, k)| format!("({b})^{k}")),
            (inner.clone(), inner).prop_map(|(l, r)| format!("({l}) / (3 + ({r})^2)")),
        ]
    })
}

fn point(x: i64, t: i64, a: i64) -> Point {
    [
        (Atom::var("x"), Rational::from_integer(x.into())),
        (Atom::var("t"), Rational::from_integer(t.into())),
        (Atom::param("a"), Rational::from_integer(a.into())),
    ]
    .into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normalize_is_idempotent(src in expr_src()) {
        let nf = normalize(&parse(&src).unwrap()).unwrap();
        let again = normalize(&nf.to_expr()).unwrap();
        prop_assert_eq!(nf.to_string(), again.to_string());
    }

    #[test]
    fn difference_with_itself_is_zero(src in expr_src()) {
        let e = parse(&src).unwrap();
        prop_assert!(normalize(&(e.clone() - e)).unwrap().is_zero());
    }

    #[test]
    fn normal_form_preserves_value(src in expr_src(), x in -3i64..=3, t in -3i64..=3, a in -3i64..=3) {
        let e = parse(&src).unwrap();
        let p = point(x, t, a);
        let funcs = FuncTable::new();
        let direct = eval_exact(&e, &p, &funcs).unwrap();
        let via_nf = eval_exact(&normalize(&e).unwrap().to_expr(), &p, &funcs).unwrap();
        prop_assert_eq!(direct, via_nf);
    }

    #[test]
    fn mixed_partials_commute(src in expr_src()) {
        let e = parse(&src).unwrap();
        let x = IndepVar::from_name("x").unwrap();
        let t = IndepVar::from_name("t").unwrap();
        let xt = diff_total(&diff_total(&e, x, 1), t, 1);
        let tx = diff_total(&diff_total(&e, t, 1), x, 1);
        prop_assert_eq!(normalize(&xt).unwrap(), normalize(&tx).unwrap());
    }

    #[test]
    fn leibniz_rule(f in expr_src(), g in expr_src()) {
        let (f, g) = (parse(&f).unwrap(), parse(&g).unwrap());
        let x = IndepVar::from_name("x").unwrap();
        let lhs = diff_total(&(f.clone() * g.clone()), x, 1);
        let rhs = diff_total(&f, x, 1) * g.clone() + f * diff_total(&g, x, 1);
        prop_assert_eq!(normalize(&lhs).unwrap(), normalize(&rhs).unwrap());
    }

    /// Exact difference quotients of polynomials of degree <= 2 in x have
    /// the closed form f'(x) + f''(x) h / 2.
    #[test]
    fn difference_quotient_matches_derivative(c0 in -5i64..=5, c1 in -5i64..=5, c2 in -5i64..=5, x0 in -4i64..=4, h in 1i64..=5) {
        let e = parse(&format!("({c0}) + ({c1})*x + ({c2})*x^2")).unwrap();
        let xv = IndepVar::from_name("x").unwrap();
        let funcs = FuncTable::new();
        let at = |v: Rational| eval_exact(&e, &[(Atom::var("x"), v)].into(), &funcs).unwrap();
        let r = |n: i64| Rational::from_integer(n.into());
        let quotient = (at(r(x0 + h)) - at(r(x0))) / r(h);
        let d1 = eval_exact(&diff_total(&e, xv, 1), &[(Atom::var("x"), r(x0))].into(), &funcs).unwrap();
        let d2 = eval_exact(&diff_total(&e, xv, 2), &[(Atom::var("x"), r(x0))].into(), &funcs).unwrap();
        prop_assert_eq!(quotient, d1 + d2 * r(h) / r(2));
    }

    #[test]
    fn random_models_are_linear_and_match_oracle(seed in 0u64..10_000) {
        let pde = random_pde(seed);
        let h = generate_ahsm_rearranged(&pde, 3, false).unwrap();
        for n in 1..=3 {
            prop_assert!(check_linearity(&h, n).unwrap().linear);
        }
        let direct = qderiv_at0(&pde.e0, 3).unwrap();
        for n in 1..=3 {
            prop_assert_eq!(&normalize(&fdb_qderiv_at0(&pde.e0, n as u32).unwrap()).unwrap(), &direct[n]);
        }
    }

    #[test]
    fn theorem1_map_inverts(l in 0usize..=4, th in 0i64..=9) {
        let map = build_map(MapKind::Theorem1, 4);
        let inv = map.inverse().unwrap();
        let b = Bindings::new().param("theta", Expr::num(Rational::new(th.into(), 10.into())));
        let round = substitute(&map.apply(&inv.image(l)).unwrap(), &b).unwrap();
        prop_assert_eq!(normalize(&round).unwrap(), normalize(&parse(&format!("utilde{l}")).unwrap()).unwrap());
    }
}

#[test]
fn dio_counts_grow_with_slots() {
    for n in 1..=4 {
        for k in 0..3 {
            assert!(enumerate_dio(n, k).len() <= enumerate_dio(n, k + 1).len());
        }
    }
}

use num_rational::BigRational;
use num_traits::Zero;
use presym::{ChartContext, DiffExpr, Error, Poly};
use proptest::prelude::*;

fn ctx() -> ChartContext {
    ChartContext::new(&["x", "y"], &["f", "g"]).unwrap()
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// A polynomial in the chart coordinates, read through the context.
fn poly(ctx: &ChartContext, text: &str) -> Poly {
    ctx.parse(text).unwrap().numer().clone()
}

#[test]
fn parse_examples() {
    let c = ctx();
    assert_eq!(c.print(&c.parse("x + x").unwrap()), "2*x");
    assert!(c.parse("d(f,x)*y - y*d(f,x)").unwrap().is_zero());
    assert_eq!(c.print(&c.parse("(x^2 - y^2)/(x - y)").unwrap()), "x + y");
}

#[test]
fn parse_errors() {
    let c = ctx();
    assert!(matches!(c.parse("x +"), Err(Error::Syntax { .. })));
    assert!(matches!(c.parse("z"), Err(Error::UnknownIdentifier { .. })));
    assert!(matches!(
        c.parse("d3(f,x,x,y)"),
        Err(Error::DerivativeOrder { .. })
    ));
}

#[test]
fn differentiate_examples() {
    let c = ctx();
    let e = c.parse("x^2*f").unwrap();
    assert_eq!(
        c.differentiate(&e, 0).unwrap(),
        c.parse("2*x*f + x^2*d(f,x)").unwrap()
    );
    let fx = c.parse("d(f,x)").unwrap();
    assert_eq!(c.print(&c.differentiate(&fx, 1).unwrap()), "d2(f,x,y)");
    let f = c.parse("f").unwrap();
    let xy = c
        .differentiate(&c.differentiate(&f, 0).unwrap(), 1)
        .unwrap();
    let yx = c
        .differentiate(&c.differentiate(&f, 1).unwrap(), 0)
        .unwrap();
    assert!((&xy - &yx).is_zero());
}

#[test]
fn derivative_order_overflow() {
    let c = ctx();
    let e = c.parse("d2(f,x,y)").unwrap();
    assert!(matches!(
        c.differentiate(&e, 0),
        Err(Error::DerivativeOrder { .. })
    ));
}

#[test]
fn is_zero_examples() {
    let c = ctx();
    assert!(DiffExpr::zero().is_zero());
    assert!(c.parse("f*g - g*f").unwrap().is_zero());
    let e = c.parse("x*f - f").unwrap();
    assert!(!e.is_zero());
    // Random-point certificate: f -> 1 + y at (2, 3) gives 2*4 - 4 = 4.
    let v = c
        .eval(&e, &[q(2), q(3)], &[poly(&c, "1 + y")])
        .unwrap()
        .unwrap();
    assert_eq!(v, q(4));
}

/// Terms `coef * x^a * y^b * atom` rendered as text.
fn term() -> impl Strategy<Value = String> {
    let atoms = prop::sample::select(vec!["1", "f", "g", "d(f,x)", "d(g,y)", "d2(f,x,y)", "f*g"]);
    (-4i64..=4, 0u32..3, 0u32..3, atoms)
        .prop_map(|(c, a, b, atom)| format!("({c})*x^{a}*y^{b}*{atom}"))
}

fn expr_text() -> impl Strategy<Value = (Vec<String>, Option<&'static str>)> {
    (
        prop::collection::vec(term(), 1..5),
        prop::option::of(prop::sample::select(vec!["1 + x^2", "x - y", "y"])),
    )
}

/// Smaller polynomial terms for the properties that multiply or substitute,
/// where fraction arithmetic on the full generator gets slow.
fn small_text() -> impl Strategy<Value = Vec<String>> {
    let atoms = prop::sample::select(vec!["1", "f", "g", "d(f,x)", "d(g,y)"]);
    let term = (-3i64..=3, 0u32..2, 0u32..2, atoms)
        .prop_map(|(c, a, b, atom)| format!("({c})*x^{a}*y^{b}*{atom}"));
    prop::collection::vec(term, 1..4)
}

fn build(terms: &[String], den: Option<&str>) -> String {
    let num = terms.join(" + ");
    match den {
        Some(d) => format!("({num})/({d})"),
        None => num,
    }
}

fn random_funcs(c: &ChartContext, a: i64, b: i64) -> Vec<Poly> {
    vec![
        poly(c, &format!("{a}*x^3 + y^2 - {b}*x*y + 1")),
        poly(c, &format!("x^2*y + {b}*y^3 - {a}")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn differentiation_is_linear_and_leibniz(t1 in small_text(), t2 in small_text(), d in prop::option::of(Just("1 + x^2")), i in 0usize..2) {
        let c = ctx();
        let a = c.parse(&build(&t1, d)).unwrap();
        let b = c.parse(&build(&t2, None)).unwrap();
        let da = c.differentiate(&a, i).unwrap();
        let db = c.differentiate(&b, i).unwrap();
        prop_assert!((&(&c.differentiate(&(&a + &b), i).unwrap() - &da) - &db).is_zero());
        let prod = c.differentiate(&(&a * &b), i).unwrap();
        prop_assert!((&(&prod - &(&da * &b)) - &(&a * &db)).is_zero());
    }

    #[test]
    fn mixed_partials_commute((t, d) in expr_text()) {
        let c = ctx();
        let t: Vec<String> = t.iter().map(|s| s.replace("d2(f,x,y)", "f").replace("d(f,x)", "f").replace("d(g,y)", "g")).collect();
        let e = c.parse(&build(&t, d)).unwrap();
        let xy = c.differentiate(&c.differentiate(&e, 0).unwrap(), 1).unwrap();
        let yx = c.differentiate(&c.differentiate(&e, 1).unwrap(), 0).unwrap();
        prop_assert!((&xy - &yx).is_zero());
    }

    #[test]
    fn canonical_under_reordering((t, d) in expr_text(), seed in any::<u64>()) {
        let c = ctx();
        let mut shuffled = t.clone();
        let n = shuffled.len();
        for k in 0..n {
            shuffled.swap(k, (seed as usize).wrapping_add(k * 7) % n);
        }
        let a = c.parse(&build(&t, d)).unwrap();
        let b = c.parse(&build(&shuffled, d)).unwrap();
        prop_assert!((&a - &b).is_zero());
        prop_assert_eq!(c.print(&a), c.print(&b));
        prop_assert_eq!(c.parse(&c.print(&a)).unwrap(), a);
    }

    #[test]
    fn random_point_evaluation_is_sound((t, d) in expr_text(), px in -5i64..5, py in -5i64..5, fa in -3i64..3, fb in -3i64..3) {
        let c = ctx();
        let e = c.parse(&build(&t, d)).unwrap();
        let funcs = random_funcs(&c, fa, fb);
        if let Some(v) = c.eval(&e, &[q(px), q(py)], &funcs).unwrap() {
            if !v.is_zero() {
                prop_assert!(!e.is_zero());
            }
        }
        if e.is_zero() {
            let v = c.eval(&e, &[q(px), q(py)], &funcs).unwrap();
            prop_assert!(v.map_or(true, |v| v.is_zero()));
        }
    }

    #[test]
    fn instantiation_commutes_with_differentiation(t in small_text(), d in prop::option::of(Just("y")), fa in -3i64..3, fb in -3i64..3, i in 0usize..2) {
        // Differentiating formally and then substituting a concrete f equals
        // substituting first.
        let c = ctx();
        let e = c.parse(&build(&t, d)).unwrap();
        let fval = DiffExpr::from_poly(random_funcs(&c, fa, fb)[0].clone());
        let lhs = c.instantiate(&c.differentiate(&e, i).unwrap(), 0, &fval).unwrap();
        let rhs = c.differentiate(&c.instantiate(&e, 0, &fval).unwrap(), i).unwrap();
        prop_assert!((&lhs - &rhs).is_zero());
    }
}

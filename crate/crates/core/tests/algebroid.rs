use std::sync::Arc;

use presym::algebroid::{
    check_2cocycle, check_left_symmetric_algebroid, check_lie_algebroid, de_rham_d,
    lie_derivative_along, sections, ChartAlgebroid, FormField,
};
use presym::defs::Definition;
use presym::exact::FlatConnection;
use presym::{fixtures, ChartContext, DiffExpr};
use proptest::prelude::*;

fn sphere() -> ChartAlgebroid {
    Definition::parse(&fixtures::get("sphere").unwrap())
        .unwrap()
        .lie_algebroid()
        .unwrap()
        .unwrap()
}

fn affine_text(c: &[i64], names: &[&str]) -> String {
    let mut s = format!("{}", c[0]);
    for (k, n) in names.iter().enumerate() {
        s.push_str(&format!(" + ({})*{n}^2", c[(k + 1) % c.len()]));
    }
    s
}

#[test]
fn fixtures_are_lie_algebroids() {
    for name in ["sphere", "prolongation-so3", "bisection"] {
        let l = Definition::parse(&fixtures::get(name).unwrap())
            .unwrap()
            .lie_algebroid()
            .unwrap()
            .unwrap();
        let rep = check_lie_algebroid(&l).unwrap();
        assert!(rep.passed(), "{name}\n{}", rep.to_text(false));
    }
}

#[test]
fn sphere_form_is_a_cocycle_and_a_perturbation_is_not() {
    let l = sphere();
    let y = l.ctx().parse("y").unwrap();
    assert!(check_2cocycle(&l, &FormField::from_fn(2, 2, |_| y.clone()))
        .unwrap()
        .passed());
    // Every 2-form on a rank-2 algebroid is closed.
    let x = l.ctx().parse("x^2 + z").unwrap();
    assert!(check_2cocycle(&l, &FormField::from_fn(2, 2, |_| x.clone()))
        .unwrap()
        .passed());
    let prol = Definition::parse(&fixtures::get("prolongation-so3").unwrap()).unwrap();
    let (pl, w) = prol.symplectic().unwrap().unwrap();
    assert!(check_2cocycle(&pl, &w).unwrap().passed());
    let mut m = w.to_matrix();
    m.set(0, 1, pl.ctx().parse("2*y3").unwrap());
    m.set(1, 0, pl.ctx().parse("-2*y3").unwrap());
    assert!(!check_2cocycle(&pl, &FormField::from_matrix(&m).unwrap())
        .unwrap()
        .passed());
}

#[test]
fn left_symmetric_algebroid_has_lie_commutator() {
    let text = "[chart]\ncoords = x, y\n\n[connection]\nx, x = p_x\n";
    let nabla: FlatConnection = Definition::parse(text)
        .unwrap()
        .connection()
        .unwrap()
        .unwrap();
    let a = nabla.to_algebroid().unwrap();
    assert!(check_left_symmetric_algebroid(&a).unwrap().passed());
    assert!(check_lie_algebroid(&a.subadjacent()).unwrap().passed());
}

#[test]
fn lie_derivative_satisfies_leibniz_on_pairings() {
    // a(u)<xi, v> = <L_u xi, v> + <xi, [u, v]>
    let ctx = Arc::new(ChartContext::new(&["x", "y"], &["f", "g"]).unwrap());
    let l = ChartAlgebroid::tangent(ctx.clone());
    let p = |s: &str| ctx.parse(s).unwrap();
    let u = vec![p("f"), p("x*y")];
    let v = vec![p("y^2"), p("1 + x")];
    let xi = vec![p("g"), p("x")];
    let pair =
        |a: &[DiffExpr], b: &[DiffExpr]| -> DiffExpr { a.iter().zip(b).map(|(s, t)| s * t).sum() };
    let lhs = l.apply_anchor(&u, &pair(&xi, &v)).unwrap();
    let rhs = &pair(&lie_derivative_along(&l, &u, &xi).unwrap(), &v)
        + &pair(&xi, &l.bracket(&u, &v).unwrap());
    assert!((&lhs - &rhs).is_zero());
    assert!(sections::is_zero(&sections::sub(
        &l.bracket(&u, &u).unwrap(),
        &sections::zero(2)
    )));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn differential_squares_to_zero(c in prop::collection::vec(-3i64..=3, 3..6), degree in 0usize..2) {
        for l in [sphere(), ChartAlgebroid::tangent(Arc::new(ChartContext::new(&["x", "y", "z"], &[]).unwrap()))] {
            let ctx = l.ctx().clone();
            let names: Vec<&str> = ctx.coords().iter().map(String::as_str).collect();
            let r = l.rank();
            if degree + 2 > r {
                continue;
            }
            let w = FormField::from_fn(degree, r, |idx| {
                let shift: usize = idx.iter().sum();
                let cs: Vec<i64> = (0..c.len()).map(|k| c[(k + shift) % c.len()]).collect();
                ctx.parse(&affine_text(&cs, &names)).unwrap()
            });
            let dd = de_rham_d(&l, &de_rham_d(&l, &w).unwrap()).unwrap();
            prop_assert!(dd.is_zero());
        }
    }
}

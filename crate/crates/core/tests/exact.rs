use std::sync::Arc;

use presym::defs::Definition;
use presym::exact::{
    check_exact, check_phi, check_splitting, check_twist, delta_theta, extract_phi,
    splitting_equivalence, twisted_product, FlatConnection, PhiTensor, Splitting,
};
use presym::pipeline::poly_lsa;
use presym::presym::{check_presymplectic, pseudo_semidirect};
use presym::{fixtures, ChartContext, DiffExpr, ExprMatrix, Poly};
use proptest::prelude::*;

fn twist_r2() -> Definition {
    Definition::parse(&fixtures::get("twist-r2").unwrap()).unwrap()
}

fn plane() -> FlatConnection {
    FlatConnection::trivial(Arc::new(ChartContext::new(&["x", "y"], &[]).unwrap()))
}

fn space() -> FlatConnection {
    FlatConnection::trivial(Arc::new(ChartContext::new(&["x", "y", "z"], &[]).unwrap()))
}

/// A random polynomial of degree at most 1 (or 2) from integer coefficients.
fn poly_text(c: &[i64], names: &[&str]) -> String {
    let mut s = format!("{}", c[0]);
    for (k, name) in names.iter().enumerate() {
        s.push_str(&format!(" + ({})*{name}", c[1 + k]));
    }
    s
}

/// An admissible twisting tensor: `phi~` skew in its first two slots with
/// vanishing cyclic sum, coefficients affine in the coordinates.
fn admissible(nabla: &FlatConnection, coeffs: &[i64]) -> PhiTensor {
    let ctx = nabla.ctx().clone();
    let n = nabla.dim();
    let names: Vec<&str> = ctx.coords().iter().map(String::as_str).collect();
    let stride = n + 1;
    let t = |a: usize, b: usize, c: usize| -> DiffExpr {
        let off = ((a * n + b) * n + c) * stride % coeffs.len().max(1);
        let cs: Vec<i64> = (0..stride)
            .map(|k| coeffs[(off + k) % coeffs.len()])
            .collect();
        ctx.parse(&poly_text(&cs, &names)).unwrap()
    };
    let s = |a: usize, b: usize, c: usize| &t(a, b, c) - &t(b, a, c);
    let third = DiffExpr::ratio(1, 3);
    let tilde = PhiTensor::from_fn(n, |a, b, c| {
        let cyc = &(&s(a, b, c) + &s(b, c, a)) + &s(c, a, b);
        &s(a, b, c) - &(&third * &cyc)
    });
    PhiTensor::from_tilde(&tilde)
}

#[test]
fn twist_fixture_is_exact_and_untwists() {
    let def = twist_r2();
    let nabla = def.connection().unwrap().unwrap();
    let phi = def.phi_tensor().unwrap().unwrap();
    assert!(check_phi(&nabla, &phi).unwrap().passed());
    let (e, rep) = check_twist(&nabla, &phi).unwrap();
    assert!(rep.passed(), "{}", rep.to_text(false));
    assert!(check_exact(&e, &nabla).unwrap().passed());
    let sigma = Splitting::new(def.splitting.clone().unwrap());
    assert!(check_splitting(&e, &sigma).unwrap().passed());
    let (untwisted, rep) = extract_phi(&e, &nabla, &sigma).unwrap();
    assert!(rep.passed());
    assert!(untwisted.is_zero());
}

#[test]
fn non_admissible_phi_on_the_plane_fails() {
    let def = twist_r2();
    let nabla = def.connection().unwrap().unwrap();
    let ctx = nabla.ctx().clone();
    // Drop one entry of the fixture's phi: the 13-skew identity breaks.
    let phi = def.phi_tensor().unwrap().unwrap();
    let broken = PhiTensor::from_fn(2, |i, j, k| {
        if (i, j, k) == (1, 0, 0) {
            DiffExpr::zero()
        } else {
            phi.get(i, j, k).clone()
        }
    });
    let rep = check_phi(&nabla, &broken).unwrap();
    assert!(rep.failed_ids().contains(&"exact.phi_13skew"));
    let e = twisted_product(&nabla, &broken).unwrap();
    assert!(!check_presymplectic(&e).unwrap().passed());
    // delta phi~ has no room on the plane: 4-cochains skew in three slots vanish.
    assert_eq!(ctx.dim(), 2);
}

#[test]
fn non_closed_phi_fails_in_space() {
    let nabla = space();
    let x = nabla.ctx().parse("x").unwrap();
    let mut tilde = vec![vec![vec![DiffExpr::zero(); 3]; 3]; 3];
    for (i, j, k, s) in [(1, 2, 0, 1), (2, 1, 0, -1), (2, 0, 1, -1), (0, 2, 1, 1)] {
        tilde[i][j][k] = &x * &DiffExpr::from_int(s);
    }
    let phi = PhiTensor::from_tilde(&PhiTensor::new(tilde).unwrap());
    assert_eq!(
        check_phi(&nabla, &phi).unwrap().failed_ids(),
        vec!["exact.phi_closed"]
    );
    let (_, rep) = check_twist(&nabla, &phi).unwrap();
    assert!(!rep.passed());
}

#[test]
fn splitting_change_on_nontrivial_connection() {
    // nabla_{p_x} p_x = p_x is flat and torsion-free.
    let text = "[chart]\ncoords = x, y\n\n[connection]\nx, x = p_x\n";
    let def = Definition::parse(text).unwrap();
    let nabla = def.connection().unwrap().unwrap();
    assert!(nabla.check().unwrap().passed());
    let ctx = nabla.ctx().clone();
    let p = |s: &str| ctx.parse(s).unwrap();
    let theta = ExprMatrix::from_rows(vec![vec![p("x*y"), p("y^2")], vec![p("y^2"), p("x")]]);
    let e = pseudo_semidirect(&nabla.to_algebroid().unwrap()).unwrap();
    let (phi, rep) = extract_phi(&e, &nabla, &Splitting::from_theta(&theta)).unwrap();
    assert!(rep.passed(), "{}", rep.to_text(false));
    assert_eq!(phi.reshuffle(), delta_theta(&nabla, &theta).unwrap());
    let twisted = twisted_product(&nabla, &phi).unwrap();
    assert!(splitting_equivalence(&twisted, &e, &theta)
        .unwrap()
        .passed());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn twisted_product_passes_iff_phi_closed(coeffs in prop::collection::vec(-2i64..=2, 5..12), three in any::<bool>()) {
        let nabla = if three { space() } else { plane() };
        let phi = admissible(&nabla, &coeffs);
        let phi_rep = check_phi(&nabla, &phi).unwrap();
        for id in ["exact.phi_13skew", "exact.phi_ii", "exact.phi_cyclic"] {
            prop_assert!(!phi_rep.failed_ids().contains(&id), "{}", phi_rep.to_text(false));
        }
        let closed = phi_rep.passed();
        let e = twisted_product(&nabla, &phi).unwrap();
        prop_assert_eq!(check_presymplectic(&e).unwrap().passed(), closed);
        if !three {
            prop_assert!(closed);
        }
    }

    #[test]
    fn symmetric_theta_shifts_phi_by_delta_theta(c in prop::collection::vec(-3i64..=3, 9), base in prop::collection::vec(-2i64..=2, 6)) {
        let nabla = plane();
        let ctx = nabla.ctx().clone();
        let quad = |k: usize| ctx.parse(&format!("{}*x^2 + {}*x*y + {}*y^2", c[k], c[k + 1], c[k + 2])).unwrap();
        let (a, b, d) = (quad(0), quad(3), quad(6));
        let theta = ExprMatrix::from_rows(vec![vec![a, b.clone()], vec![b, d]]);
        let phi0 = admissible(&nabla, &base);
        let e = twisted_product(&nabla, &phi0).unwrap();
        let (phi, rep) = extract_phi(&e, &nabla, &Splitting::from_theta(&theta)).unwrap();
        prop_assert!(rep.passed(), "{}", rep.to_text(false));
        let shift = phi.reshuffle().sub(&phi0.reshuffle());
        prop_assert_eq!(shift, delta_theta(&nabla, &theta).unwrap());
        let moved = twisted_product(&nabla, &phi).unwrap();
        prop_assert!(splitting_equivalence(&moved, &e, &theta).unwrap().passed());
    }

    #[test]
    fn chart_coboundary_is_a_differential(coeffs in prop::collection::vec(-3i64..=3, 1..10), n in 1usize..3) {
        let text = "[chart]\ncoords = x, y\n\n[connection]\nx, x = p_x\n";
        for def in [twist_r2(), Definition::parse(text).unwrap()] {
            let p = poly_lsa(&def).unwrap();
            let basis = p.restricted_basis(n, 1, 1);
            prop_assume!(!basis.is_empty());
            let mut phi = vec![Poly::zero(); basis[0].len()];
            for (b, &c) in basis.iter().zip(coeffs.iter().cycle()) {
                for (o, x) in phi.iter_mut().zip(b) {
                    *o = &*o + &(x * &Poly::integer(c));
                }
            }
            let d = p.coboundary(n, 1, &phi);
            prop_assert!(p.restriction_residuals(n + 1, 1, &d).iter().all(Poly::is_zero));
            prop_assert!(p.coboundary(n + 1, 1, &d).iter().all(Poly::is_zero));
        }
    }
}

use num_rational::BigRational;
use num_traits::Zero;
use presym::cohomology::PolyLsa;
use presym::lsa::{
    check_form_closed, check_invariant_form, check_left_symmetric, check_lie,
    lsa_from_symplectic_lie, restricted_cohomology_dims, subadjacent_lie, AlgebraKind,
    FiniteAlgebra, SkewForm,
};
use presym::{Poly, QMatrix};
use proptest::prelude::*;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn lsa2() -> FiniteAlgebra {
    FiniteAlgebra::from_products(2, &[(0, 1, &[0, 1])]).unwrap()
}

/// h3 + R: [e1,e2] = e3.
fn heisenberg_r() -> FiniteAlgebra {
    FiniteAlgebra::from_products(4, &[(0, 1, &[0, 0, 1, 0]), (1, 0, &[0, 0, -1, 0])]).unwrap()
}

/// Gauss-Jordan rank pivoting on the last nonzero row, for cross-checking.
fn oracle_rank(m: &QMatrix) -> usize {
    let mut rows: Vec<Vec<BigRational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let mut rank = 0;
    for col in 0..m.cols() {
        let Some(p) = (rank..rows.len()).rev().find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        let pivot_row: Vec<BigRational> = rows[rank].iter().map(|v| v / &pivot).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= &factor * p;
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

fn vector(dim: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec(-3i64..=3, dim).prop_map(|v| v.into_iter().map(q).collect())
}

#[test]
fn examples() {
    assert_eq!(
        lsa2().into_left_symmetric().unwrap().kind(),
        AlgebraKind::LeftSymmetric
    );
    let bad = FiniteAlgebra::from_products(2, &[(0, 0, &[0, 1]), (1, 0, &[1, 0])]).unwrap();
    let rep = check_left_symmetric(&bad);
    assert_eq!(rep.failed_ids(), vec!["lsa.left_symmetric"]);
    assert!(bad.into_left_symmetric().is_err());
    assert!(check_lie(&heisenberg_r()).passed());
    assert!(!check_lie(&lsa2()).passed());
}

#[test]
fn symplectic_lie_round_trip() {
    // aff(1) with e1* ^ e2*, and h3 + R with e14 + e23.
    let aff = subadjacent_lie(&lsa2()).unwrap().0;
    let cases = [
        (aff, SkewForm::from_entries(2, &[(0, 1, q(1))]).unwrap()),
        (
            heisenberg_r(),
            SkewForm::from_entries(4, &[(0, 3, q(1)), (1, 2, q(1))]).unwrap(),
        ),
    ];
    for (g, w) in cases {
        assert!(check_form_closed(&g, &w).passed());
        let a = lsa_from_symplectic_lie(&g, &w).unwrap();
        assert!(check_left_symmetric(&a).passed());
        let (h, rep) = subadjacent_lie(&a).unwrap();
        assert!(rep.passed());
        assert_eq!(h.constants(), g.constants());
        // w(x.y, z) = -w(y, [x,z]) on the basis.
        let n = g.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (x, y, z) = (g.basis(i), g.basis(j), g.basis(k));
                    assert_eq!(w.eval(&a.mul(&x, &y), &z), -w.eval(&y, &g.mul(&x, &z)));
                }
            }
        }
    }
}

#[test]
fn non_closed_form_is_rejected() {
    let w = SkewForm::from_entries(4, &[(0, 1, q(1)), (2, 3, q(1))]).unwrap();
    assert!(!check_form_closed(&heisenberg_r(), &w).passed());
    assert!(lsa_from_symplectic_lie(&heisenberg_r(), &w).is_err());
    // Invariance of w under lsa2 fails; the form is not quadratic.
    let w2 = SkewForm::from_entries(2, &[(0, 1, q(1))]).unwrap();
    assert!(!check_invariant_form(&lsa2(), &w2).unwrap().passed());
}

#[test]
fn abelian_plane_dims() {
    let d = restricted_cohomology_dims(&FiniteAlgebra::abelian(2), 2, 2).unwrap();
    assert_eq!((d.kernel, d.image, d.cohomology), (6, 0, 6));
}

#[test]
fn lsa2_dims_agree_between_oracles() {
    let p = lsa2().to_poly_lsa();
    let mut got = Vec::new();
    for n in 1..=3 {
        let a = p.restricted_dims(n, 2, 0);
        let b = p.restricted_dims_with(n, 2, 0, &oracle_rank);
        assert_eq!(a, b, "degree {n}");
        assert!(a.subcomplex);
        got.push((a.cochains, a.kernel, a.image, a.cohomology));
    }
    // im in degree n is the rank of delta on degree n-1.
    for w in got.windows(2) {
        assert_eq!(w[1].2, w[0].0 - w[0].1);
    }
    assert_eq!(got, vec![(2, 2, 0, 2), (6, 2, 0, 2), (4, 4, 4, 0)]);
}

#[test]
fn degree_zero_truncation_is_the_point_case() {
    let point = lsa2().to_poly_lsa();
    let chart = PolyLsa {
        rank: 2,
        coords: 2,
        product: point.product.clone(),
        anchor: vec![vec![Poly::zero(); 2]; 2],
    };
    for n in 1..=3 {
        let a = point.restricted_dims(n, 2, 0);
        let b = chart.restricted_dims(n, 2, 0);
        assert_eq!(a, b, "degree {n}");
    }
}

/// Random combination of a basis of the restricted cochains.
fn combine(basis: &[Vec<Poly>], coeffs: &[i64]) -> Vec<Poly> {
    let mut out = vec![Poly::zero(); basis[0].len()];
    for (b, &c) in basis.iter().zip(coeffs.iter().cycle()) {
        for (o, x) in out.iter_mut().zip(b) {
            *o = &*o + &(x * &Poly::integer(c));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn left_symmetry_on_random_vectors(x in vector(2), y in vector(2), z in vector(2)) {
        let a = lsa2();
        let lhs = a.associator(&x, &y, &z);
        let rhs = a.associator(&y, &x, &z);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_is_bilinear(x in vector(2), y in vector(2), z in vector(2), c in -3i64..=3) {
        let a = lsa2();
        let xz: Vec<BigRational> = x.iter().zip(&z).map(|(u, v)| u + &(v * q(c))).collect();
        let lhs = a.mul(&xz, &y);
        let rhs: Vec<BigRational> = a.mul(&x, &y).iter().zip(a.mul(&z, &y)).map(|(u, v)| u + &(v * q(c))).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn subadjacent_jacobi(x in vector(4), y in vector(4), z in vector(4)) {
        let g = lsa_from_symplectic_lie(
            &heisenberg_r(),
            &SkewForm::from_entries(4, &[(0, 3, q(1)), (1, 2, q(1))]).unwrap(),
        ).unwrap();
        let b = |u: &[BigRational], v: &[BigRational]| g.commutator(u, v);
        let s: Vec<BigRational> = b(&x, &b(&y, &z)).iter()
            .zip(b(&y, &b(&z, &x)))
            .zip(b(&z, &b(&x, &y)))
            .map(|((p, q), r)| p + &q + &r)
            .collect();
        prop_assert!(s.iter().all(Zero::is_zero));
    }

    #[test]
    fn coboundary_squares_to_zero_and_preserves_restriction(
        coeffs in prop::collection::vec(-3i64..=3, 1..8),
        n in 1usize..3,
    ) {
        for p in [lsa2().to_poly_lsa(), FiniteAlgebra::abelian(2).to_poly_lsa()] {
            let basis = p.restricted_basis(n, 1, 0);
            prop_assume!(!basis.is_empty());
            let phi = combine(&basis, &coeffs);
            let d = p.coboundary(n, 1, &phi);
            prop_assert!(p.restriction_residuals(n + 1, 1, &d).iter().all(Poly::is_zero));
            prop_assert!(p.coboundary(n + 1, 1, &d).iter().all(Poly::is_zero));
        }
    }
}

use num_rational::BigRational;
use num_traits::{One, Zero};
use presym::defs::Definition;
use presym::lsa::FiniteAlgebra;
use presym::parakahler::{
    check_levi_civita, check_parakahler, levi_civita, metric_from, EConnection,
};
use presym::pipeline::structure_of;
use presym::presym::{
    check_dirac, pseudo_semidirect, symplectic_from_presym, PreSymStructure, Subbundle,
};
use presym::{fixtures, DiffExpr, ExprMatrix, QMatrix};

fn lsa2_double() -> PreSymStructure {
    let a = FiniteAlgebra::from_products(2, &[(0, 1, &[0, 1])]).unwrap();
    pseudo_semidirect(&a.to_algebroid()).unwrap()
}

/// `P(x + xi) = x - xi`.
fn canonical_p() -> ExprMatrix {
    ExprMatrix::from_fn(4, 4, |i, j| match (i == j, i < 2) {
        (false, _) => DiffExpr::zero(),
        (true, true) => DiffExpr::one(),
        (true, false) => DiffExpr::from_int(-1),
    })
}

fn constant(e: &DiffExpr) -> BigRational {
    e.constant_value().expect("point data")
}

/// Solves metric compatibility and torsion-freeness as one linear system
/// in the unknowns `gamma[a][b][d]`, at a point (zero anchor).
fn linear_solve_levi_civita(
    br: &[Vec<Vec<DiffExpr>>],
    g: &ExprMatrix,
) -> Vec<Vec<Vec<BigRational>>> {
    let r = g.rows();
    let unknown = |a: usize, b: usize, d: usize| (a * r + b) * r + d;
    let cols = r * r * r + 1;
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                let mut row = vec![BigRational::zero(); cols];
                for d in 0..r {
                    row[unknown(a, b, d)] += constant(g.get(d, c));
                    row[unknown(a, c, d)] += constant(g.get(b, d));
                }
                rows.push(row);
            }
            for d in 0..r {
                let mut row = vec![BigRational::zero(); cols];
                row[unknown(a, b, d)] += BigRational::one();
                row[unknown(b, a, d)] -= BigRational::one();
                row[cols - 1] = -constant(&br[a][b][d]);
                rows.push(row);
            }
        }
    }
    let ker = QMatrix::from_rows(rows).kernel_basis();
    assert_eq!(ker.len(), 1, "the connection is unique");
    let v = &ker[0];
    let last = v[cols - 1].clone();
    assert!(!last.is_zero());
    (0..r)
        .map(|a| {
            (0..r)
                .map(|b| (0..r).map(|d| &v[unknown(a, b, d)] / &last).collect())
                .collect()
        })
        .collect()
}

#[test]
fn koszul_agrees_with_linear_solve() {
    let e = lsa2_double();
    let g = metric_from(&e, &canonical_p()).unwrap();
    let (l, _) = symplectic_from_presym(&e).unwrap();
    let nabla = levi_civita(&l, &g).unwrap();
    let oracle = linear_solve_levi_civita(&l.bracket_table(), &g);
    for a in 0..4 {
        for b in 0..4 {
            for d in 0..4 {
                assert_eq!(
                    constant(&nabla.gamma[a][b][d]),
                    oracle[a][b][d],
                    "({a},{b},{d})"
                );
            }
        }
    }
    assert!(check_levi_civita(&l, &g, &nabla).unwrap().passed());
}

#[test]
fn perturbed_connection_fails() {
    let e = lsa2_double();
    let g = metric_from(&e, &canonical_p()).unwrap();
    let (l, _) = symplectic_from_presym(&e).unwrap();
    let mut nabla = levi_civita(&l, &g).unwrap();
    nabla.gamma[0][1][2] += &DiffExpr::one();
    let bumped = EConnection { gamma: nabla.gamma };
    assert!(!check_levi_civita(&l, &g, &bumped).unwrap().passed());
}

#[test]
fn lsa2_double_is_para_kahler() {
    let rep = check_parakahler(&lsa2_double(), &canonical_p()).unwrap();
    assert!(rep.passed(), "{}", rep.to_text(false));
    let g = metric_from(&lsa2_double(), &canonical_p()).unwrap();
    assert_eq!(g, g.transpose());
    let p = canonical_p();
    assert_eq!(p.transpose().mul(&g).mul(&p), g.map(|x| -x.clone()));
}

/// Eigenbundle of a constant `P` for `sign`, as a kernel of `P - sign*I`.
fn eigenbundle(p: &ExprMatrix, sign: i64) -> Subbundle {
    let m = QMatrix::from_rows(
        (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        let d = if i == j {
                            BigRational::from_integer(sign.into())
                        } else {
                            BigRational::zero()
                        };
                        constant(p.get(i, j)) - d
                    })
                    .collect()
            })
            .collect(),
    );
    Subbundle::new(
        m.kernel_basis()
            .into_iter()
            .map(|v| v.into_iter().map(DiffExpr::from_rational).collect())
            .collect(),
    )
}

#[test]
fn off_diagonal_perturbations_follow_the_dirac_criterion() {
    // P is para-Kahler exactly when it is an involution whose two
    // eigenbundles are transversal Dirac structures.
    let e = lsa2_double();
    let mut passing = Vec::new();
    for i in 0..4 {
        for j in (0..4).filter(|&j| j != i) {
            let mut p = canonical_p();
            p.set(i, j, DiffExpr::one());
            let rep = check_parakahler(&e, &p).unwrap();
            let involution = p.mul(&p) == ExprMatrix::identity(4);
            let oracle = involution
                && [1, -1].iter().all(|&s| {
                    let sub = eigenbundle(&p, s);
                    sub.rank() == 2 && check_dirac(&e, &sub).unwrap().0.passed()
                });
            assert_eq!(
                rep.passed(),
                oracle,
                "P[{i}][{j}] = 1: {:?}",
                rep.failed_ids()
            );
            if !involution {
                assert!(rep.failed_ids().contains(&"pk.involution"));
            }
            if rep.passed() {
                passing.push((i, j));
            }
        }
    }
    assert_eq!(passing, vec![(0, 2), (1, 3), (2, 0)]);
}

#[test]
fn fixture_paracomplex_matches_canonical() {
    let def = Definition::parse(&fixtures::get("parakahler-lsa2").unwrap()).unwrap();
    let e = structure_of(&def).unwrap().unwrap();
    assert_eq!(e.star_table(), lsa2_double().star_table());
    let p = def.paracomplex.clone().unwrap();
    assert_eq!(p, canonical_p());
    assert!(check_parakahler(&e, &p).unwrap().passed());
}

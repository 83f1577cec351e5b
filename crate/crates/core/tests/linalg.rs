use num_rational::BigRational;
use num_traits::Zero;
use presym::lsa::{coboundary, Cochain, FiniteAlgebra};
use presym::{ChartContext, DiffExpr, Error, ExprMatrix, QMatrix};
use proptest::prelude::*;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Rank by plain Gauss-Jordan, pivoting on the last nonzero entry of each
/// column; shares no code with the library's elimination.
fn oracle_rank(m: &QMatrix) -> usize {
    let mut rows: Vec<Vec<BigRational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let mut rank = 0;
    for col in 0..m.cols() {
        let Some(p) = (rank..rows.len()).rev().find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for v in rows[rank].iter_mut() {
            *v = &*v / &pivot;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..m.cols() {
                    let sub = &factor * &rows[rank][c];
                    rows[r][c] = &rows[r][c] - &sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn invert_examples() {
    let id = ExprMatrix::identity(2);
    assert_eq!(id.invert().unwrap(), id);
    let j = ExprMatrix::from_rows(vec![
        vec![DiffExpr::zero(), DiffExpr::one()],
        vec![DiffExpr::from_int(-1), DiffExpr::zero()],
    ]);
    assert_eq!(j.invert().unwrap(), j.map(|e| -e.clone()));
    let ctx = ChartContext::new(&["x", "y", "z"], &[]).unwrap();
    let y = ctx.parse("y").unwrap();
    let w = ExprMatrix::from_rows(vec![
        vec![DiffExpr::zero(), y.clone()],
        vec![-y, DiffExpr::zero()],
    ]);
    let inv = w.invert().unwrap();
    assert_eq!(ctx.print(inv.get(0, 1)), "-1/y");
    assert_eq!(ctx.print(inv.get(1, 0)), "1/y");
    assert_eq!(w.mul(&inv), ExprMatrix::identity(2));
}

#[test]
fn singular_reports_determinant() {
    let ctx = ChartContext::new(&["x"], &[]).unwrap();
    let x = ctx.parse("x").unwrap();
    let m = ExprMatrix::from_rows(vec![vec![x.clone(), x.clone()], vec![x.clone(), x]]);
    assert!(matches!(m.invert(), Err(Error::Singular { det }) if det == "0"));
}

#[test]
fn rank_and_kernel_examples() {
    let z = QMatrix::zeros(3, 3);
    assert_eq!(z.rank(), 0);
    assert_eq!(z.kernel_basis().len(), 3);
    let id = QMatrix::identity(3);
    assert_eq!(id.rank(), 3);
    assert!(id.kernel_basis().is_empty());
}

/// Matrix of the coboundary on 2-cochains of lsa2: column `t` is
/// `delta` of the cochain that is 1 on the index pair `t` and 0 elsewhere.
fn lsa2_delta2() -> QMatrix {
    let a = FiniteAlgebra::from_products(2, &[(0, 1, &[0, 1])]).unwrap();
    let n = 2;
    let mut m = QMatrix::zeros(n * n * n, n * n);
    for t in 0..n * n {
        let phi = Cochain::from_fn(
            2,
            n,
            |idx| if idx[0] * n + idx[1] == t { q(1) } else { q(0) },
        );
        let d = coboundary(&a, &phi).unwrap();
        for r in 0..n * n * n {
            m.set(r, t, d.get(&[r / (n * n), (r / n) % n, r % n]).clone());
        }
    }
    m
}

#[test]
fn lsa2_coboundary_rank_agrees_with_oracle() {
    let m = lsa2_delta2();
    assert_eq!(m.rank(), oracle_rank(&m));
    assert_eq!(m.rank() + m.kernel_basis().len(), m.cols());
}

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, cols), rows).prop_map(|r| {
        QMatrix::from_rows(
            r.into_iter()
                .map(|row| row.into_iter().map(q).collect())
                .collect(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_of_transpose(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| small_matrix(r, c))) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert_eq!(m.rank(), oracle_rank(&m));
    }

    #[test]
    fn kernel_vectors_are_annihilated(m in (1usize..5, 1usize..6).prop_flat_map(|(r, c)| small_matrix(r, c))) {
        let ker = m.kernel_basis();
        prop_assert_eq!(ker.len() + m.rank(), m.cols());
        for v in &ker {
            prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
        if !ker.is_empty() {
            let k = QMatrix::from_rows(ker.clone());
            prop_assert_eq!(k.rank(), ker.len());
        }
    }

    #[test]
    fn inversion_is_involutive(m in (1usize..5).prop_flat_map(|n| small_matrix(n, n))) {
        if let Some(inv) = m.invert() {
            prop_assert_eq!(inv.invert().unwrap(), m.clone());
            prop_assert_eq!(m.mul(&inv), QMatrix::identity(m.rows()));
        } else {
            prop_assert!(m.determinant().is_zero());
        }
    }

    #[test]
    fn expr_inversion_is_involutive(a in -3i64..=3, b in -3i64..=3, c in 1i64..=3) {
        let ctx = ChartContext::new(&["x", "y"], &[]).unwrap();
        let e = |s: String| ctx.parse(&s).unwrap();
        let m = ExprMatrix::from_rows(vec![
            vec![e(format!("{c} + x^2")), e(format!("{a}*y")), DiffExpr::zero()],
            vec![e(format!("{b}*x")), DiffExpr::one(), e("y".into())],
            vec![DiffExpr::zero(), e(format!("{a} - x")), e(format!("{c}"))],
        ]);
        if let Ok(inv) = m.invert() {
            prop_assert_eq!(inv.invert().unwrap(), m.clone());
            prop_assert_eq!(m.mul(&inv), ExprMatrix::identity(3));
        }
    }
}

//! Finite-dimensional algebras over a point: left-symmetric and Lie
//! structure constants, invariant skew forms, representations and the
//! trivial-coefficient cochain complex.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebroid::{ChartAlgebroid, Law};
use crate::cohomology::{tuple_index, CohomologyDims, PolyLsa};
use crate::error::{Error, Result};
use crate::expr::{ChartContext, DiffExpr, Poly};
use crate::linalg::{ExprMatrix, QMatrix, QVector};
use crate::report::{combination, CheckReport, Tally};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraKind {
    LeftSymmetric,
    Lie,
    Unverified,
}

/// Structure constants `c[i][j][k]` with `e_i . e_j = sum_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    dim: usize,
    c: Vec<Vec<QVector>>,
    kind: AlgebraKind,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn zero_vec(n: usize) -> QVector {
    vec![BigRational::zero(); n]
}

pub(crate) fn fmt_qvec(v: &[BigRational]) -> String {
    combination(
        v.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (c.to_string(), format!("e{}", i + 1)))
            .collect(),
    )
}

fn loc(idx: &[usize]) -> String {
    let parts: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    format!("({})", parts.join(","))
}

impl FiniteAlgebra {
    pub fn new(dim: usize, c: Vec<Vec<QVector>>) -> Result<Self> {
        let ok = c.len() == dim
            && c.iter()
                .all(|row| row.len() == dim && row.iter().all(|v| v.len() == dim));
        if !ok {
            return Err(Error::Shape(format!(
                "structure constants must be {dim} x {dim} x {dim}"
            )));
        }
        Ok(FiniteAlgebra {
            dim,
            c,
            kind: AlgebraKind::Unverified,
        })
    }

    pub fn abelian(dim: usize) -> Self {
        FiniteAlgebra {
            dim,
            c: vec![vec![zero_vec(dim); dim]; dim],
            kind: AlgebraKind::Unverified,
        }
    }

    /// Builds from sparse integer products `(i, j, coefficients of e_i . e_j)`, 0-based.
    pub fn from_products(dim: usize, products: &[(usize, usize, &[i64])]) -> Result<Self> {
        let mut a = FiniteAlgebra::abelian(dim);
        for &(i, j, v) in products {
            if i >= dim || j >= dim || v.len() != dim {
                return Err(Error::Shape(format!("product ({i},{j}) out of range")));
            }
            a.c[i][j] = v.iter().map(|&x| q(x)).collect();
        }
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn constants(&self) -> &[Vec<QVector>] {
        &self.c
    }

    pub fn product(&self, i: usize, j: usize) -> &[BigRational] {
        &self.c[i][j]
    }

    /// Bilinear extension of the product.
    pub fn mul(&self, x: &[BigRational], y: &[BigRational]) -> QVector {
        let mut out = zero_vec(self.dim);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let s = xi * yj;
                for (o, c) in out.iter_mut().zip(&self.c[i][j]) {
                    if !c.is_zero() {
                        *o += &s * c;
                    }
                }
            }
        }
        out
    }

    /// Commutator `x.y - y.x`.
    pub fn commutator(&self, x: &[BigRational], y: &[BigRational]) -> QVector {
        let a = self.mul(x, y);
        let b = self.mul(y, x);
        a.iter().zip(&b).map(|(p, q)| p - q).collect()
    }

    pub fn basis(&self, i: usize) -> QVector {
        let mut e = zero_vec(self.dim);
        e[i] = BigRational::one();
        e
    }

    pub fn associator(&self, x: &[BigRational], y: &[BigRational], z: &[BigRational]) -> QVector {
        let a = self.mul(x, &self.mul(y, z));
        let b = self.mul(&self.mul(x, y), z);
        a.iter().zip(&b).map(|(p, q)| p - q).collect()
    }

    /// Runs [`check_left_symmetric`] and tags the algebra on success.
    pub fn into_left_symmetric(mut self) -> std::result::Result<Self, CheckReport> {
        let r = check_left_symmetric(&self);
        if r.passed() {
            self.kind = AlgebraKind::LeftSymmetric;
            Ok(self)
        } else {
            Err(r)
        }
    }

    /// Runs [`check_lie`] and tags the algebra on success.
    pub fn into_lie(mut self) -> std::result::Result<Self, CheckReport> {
        let r = check_lie(&self);
        if r.passed() {
            self.kind = AlgebraKind::Lie;
            Ok(self)
        } else {
            Err(r)
        }
    }

    fn require_left_symmetric(&self) -> Result<()> {
        if self.kind == AlgebraKind::LeftSymmetric || check_left_symmetric(self).passed() {
            Ok(())
        } else {
            Err(Error::Precondition("algebra is not left-symmetric".into()))
        }
    }

    /// Left multiplication matrices: column `j` of `L_i` is `e_i . e_j`.
    pub fn left_multiplications(&self) -> Vec<QMatrix> {
        (0..self.dim)
            .map(|i| {
                let mut m = QMatrix::zeros(self.dim, self.dim);
                for j in 0..self.dim {
                    for k in 0..self.dim {
                        m.set(k, j, self.c[i][j][k].clone());
                    }
                }
                m
            })
            .collect()
    }

    /// Right multiplication matrices: column `j` of `R_i` is `e_j . e_i`.
    pub fn right_multiplications(&self) -> Vec<QMatrix> {
        (0..self.dim)
            .map(|i| {
                let mut m = QMatrix::zeros(self.dim, self.dim);
                for j in 0..self.dim {
                    for k in 0..self.dim {
                        m.set(k, j, self.c[j][i][k].clone());
                    }
                }
                m
            })
            .collect()
    }

    /// The same constants viewed as polynomial data over a point.
    /// The algebra as a left-symmetric algebroid over a point, frame `e1..en`.
    pub fn to_algebroid(&self) -> ChartAlgebroid {
        let n = self.dim;
        let structure = self
            .c
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        v.iter()
                            .map(|x| DiffExpr::from_rational(x.clone()))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ChartAlgebroid::new(
            Arc::new(ChartContext::point()),
            (1..=n).map(|i| format!("e{i}")).collect(),
            ExprMatrix::zeros(n, 0),
            structure,
            Law::Product,
        )
        .expect("point algebroid data is well formed")
    }

    pub fn to_poly_lsa(&self) -> PolyLsa {
        PolyLsa::point(
            self.dim,
            self.c
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| v.iter().map(|x| Poly::constant(x.clone())).collect())
                        .collect()
                })
                .collect(),
        )
    }
}

/// Associator symmetry in the first two slots on every basis triple.
pub fn check_left_symmetric(a: &FiniteAlgebra) -> CheckReport {
    let mut rep = CheckReport::new("left-symmetric algebra");
    let mut t = Tally::new("lsa.left_symmetric");
    let n = a.dim;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (x, y, z) = (a.basis(i), a.basis(j), a.basis(k));
                let l = a.associator(&x, &y, &z);
                let r = a.associator(&y, &x, &z);
                let res: QVector = l.iter().zip(&r).map(|(p, q)| p - q).collect();
                t.expect(
                    res.iter().all(Zero::is_zero),
                    || loc(&[i, j, k]),
                    || fmt_qvec(&res),
                );
            }
        }
    }
    rep.push_tally(t);
    rep
}

/// Skew-symmetry and Jacobi on basis elements, reading the constants as a bracket.
pub fn check_lie(g: &FiniteAlgebra) -> CheckReport {
    let mut rep = CheckReport::new("Lie algebra");
    let n = g.dim;
    let mut skew = Tally::new("lsa.subadjacent_skew");
    for i in 0..n {
        for j in i..n {
            let s: QVector = g.c[i][j]
                .iter()
                .zip(&g.c[j][i])
                .map(|(a, b)| a + b)
                .collect();
            skew.expect(
                s.iter().all(Zero::is_zero),
                || loc(&[i, j]),
                || fmt_qvec(&s),
            );
        }
    }
    rep.push_tally(skew);
    let mut jac = Tally::new("lsa.subadjacent_jacobi");
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (x, y, z) = (g.basis(i), g.basis(j), g.basis(k));
                let a = g.mul(&x, &g.mul(&y, &z));
                let b = g.mul(&y, &g.mul(&z, &x));
                let c = g.mul(&z, &g.mul(&x, &y));
                let s: QVector = (0..n).map(|m| &a[m] + &b[m] + &c[m]).collect();
                jac.expect(
                    s.iter().all(Zero::is_zero),
                    || loc(&[i, j, k]),
                    || fmt_qvec(&s),
                );
            }
        }
    }
    rep.push_tally(jac);
    rep
}

/// The commutator algebra, with its Lie axioms and the representation
/// property of left multiplication verified.
pub fn subadjacent_lie(a: &FiniteAlgebra) -> Result<(FiniteAlgebra, CheckReport)> {
    a.require_left_symmetric()?;
    let n = a.dim;
    let mut g = FiniteAlgebra::abelian(n);
    for i in 0..n {
        for j in 0..n {
            g.c[i][j] = a.commutator(&a.basis(i), &a.basis(j));
        }
    }
    let mut rep = check_lie(&g);
    rep.artifact = "sub-adjacent Lie algebra".into();
    let l = a.left_multiplications();
    let mut t = Tally::new("lsa.left_representation");
    for i in 0..n {
        for j in 0..n {
            let lhs = combine_mats(&l, &g.c[i][j], n);
            let rhs = l[i].mul(&l[j]).sub(&l[j].mul(&l[i]));
            let res = lhs.sub(&rhs);
            t.expect(
                res.is_zero(),
                || loc(&[i, j]),
                || format!("{}", res).trim().replace('\n', " "),
            );
        }
    }
    rep.push_tally(t);
    if rep.passed() {
        g.kind = AlgebraKind::Lie;
    }
    Ok((g, rep))
}

fn combine_mats(ms: &[QMatrix], coeffs: &[BigRational], n: usize) -> QMatrix {
    let mut out = QMatrix::zeros(n, n);
    for (m, c) in ms.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for r in 0..n {
            for s in 0..n {
                let v = out.get(r, s) + c * m.get(r, s);
                out.set(r, s, v);
            }
        }
    }
    out
}

/// A skew bilinear form on a point algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewForm {
    m: QMatrix,
}

impl SkewForm {
    pub fn new(m: QMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::Shape("form must be square".into()));
        }
        if !m.add(&m.transpose()).is_zero() {
            return Err(Error::Shape("form is not skew".into()));
        }
        Ok(SkewForm { m })
    }

    /// The form with `w(e_i, e_j) = v` for each listed `(i, j, v)` and skew completion.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, BigRational)]) -> Result<Self> {
        let mut m = QMatrix::zeros(dim, dim);
        for (i, j, v) in entries {
            m.set(*i, *j, v.clone());
            m.set(*j, *i, -v.clone());
        }
        SkewForm::new(m)
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn eval(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let my = self.m.mul_vec(y);
        x.iter()
            .zip(&my)
            .map(|(a, b)| a * b)
            .fold(BigRational::zero(), |s, t| s + t)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.m.rank() == self.m.rows()
    }
}

/// Nondegeneracy plus `(a.b, c) + (b, [a,c]) = 0` on basis triples.
pub fn check_invariant_form(a: &FiniteAlgebra, w: &SkewForm) -> Result<CheckReport> {
    if w.dim() != a.dim {
        return Err(Error::Shape("form and algebra dimensions differ".into()));
    }
    let mut rep = CheckReport::new("quadratic left-symmetric algebra");
    let mut nd = Tally::new("lsa.form_nondegenerate");
    if !w.is_nondegenerate() {
        nd.fail("det", "0");
    }
    rep.push_tally(nd);
    let n = a.dim;
    let mut t = Tally::new("lsa.invariant_form");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (x, y, z) = (a.basis(i), a.basis(j), a.basis(k));
                let v = w.eval(&a.mul(&x, &y), &z) + w.eval(&y, &a.commutator(&x, &z));
                t.expect(v.is_zero(), || loc(&[i, j, k]), || v.to_string());
            }
        }
    }
    rep.push_tally(t);
    Ok(rep)
}

/// `w([x,y],z) + c.p. = 0` for the bracket given by `g`'s constants.
pub fn check_form_closed(g: &FiniteAlgebra, w: &SkewForm) -> CheckReport {
    let mut rep = CheckReport::new("closed 2-form");
    let mut t = Tally::new("lsa.form_closed");
    let n = g.dim;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (x, y, z) = (g.basis(i), g.basis(j), g.basis(k));
                let v = w.eval(&g.mul(&x, &y), &z)
                    + w.eval(&g.mul(&y, &z), &x)
                    + w.eval(&g.mul(&z, &x), &y);
                t.expect(v.is_zero(), || loc(&[i, j, k]), || v.to_string());
            }
        }
    }
    rep.push_tally(t);
    rep
}

/// The product `x.y = (w#)^-1 ad*_x w#(y)` on a symplectic Lie algebra,
/// i.e. the unique solution of `w(x.y, z) = -w(y, [x,z])`.
pub fn lsa_from_symplectic_lie(g: &FiniteAlgebra, w: &SkewForm) -> Result<FiniteAlgebra> {
    if w.dim() != g.dim {
        return Err(Error::Shape("form and algebra dimensions differ".into()));
    }
    if g.kind != AlgebraKind::Lie && !check_lie(g).passed() {
        return Err(Error::Precondition("input is not a Lie algebra".into()));
    }
    let wt_inv = w
        .matrix()
        .transpose()
        .invert()
        .ok_or_else(|| Error::Degenerate("symplectic form is degenerate".into()))?;
    if !check_form_closed(g, w).passed() {
        return Err(Error::Precondition("form is not closed".into()));
    }
    let n = g.dim;
    let mut a = FiniteAlgebra::abelian(n);
    for i in 0..n {
        for j in 0..n {
            // rhs_l = w(x.y, e_l) = -w(e_j, [e_i, e_l])
            let rhs: QVector = (0..n)
                .map(|l| -w.eval(&g.basis(j), &g.mul(&g.basis(i), &g.basis(l))))
                .collect();
            a.c[i][j] = wt_inv.mul_vec(&rhs);
        }
    }
    match a.into_left_symmetric() {
        Ok(a) => Ok(a),
        Err(_) => Err(Error::Precondition(
            "derived product is not left-symmetric".into(),
        )),
    }
}

/// A pair `(rho, mu)` of maps from the algebra into `gl(m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationData {
    pub carrier: usize,
    pub rho: Vec<QMatrix>,
    pub mu: Vec<QMatrix>,
}

impl RepresentationData {
    /// `(L, R)` on the algebra itself.
    pub fn regular(a: &FiniteAlgebra) -> Self {
        RepresentationData {
            carrier: a.dim,
            rho: a.left_multiplications(),
            mu: a.right_multiplications(),
        }
    }

    /// `(L, 0)`.
    pub fn trivial(a: &FiniteAlgebra) -> Self {
        RepresentationData {
            carrier: a.dim,
            rho: a.left_multiplications(),
            mu: vec![QMatrix::zeros(a.dim, a.dim); a.dim],
        }
    }
}

pub fn check_representation(
    a: &FiniteAlgebra,
    rep_data: &RepresentationData,
) -> Result<CheckReport> {
    let n = a.dim;
    let m = rep_data.carrier;
    let shaped = |v: &[QMatrix]| v.len() == n && v.iter().all(|x| x.rows() == m && x.cols() == m);
    if !shaped(&rep_data.rho) || !shaped(&rep_data.mu) {
        return Err(Error::Shape(format!(
            "representation needs {n} matrices of size {m} x {m}"
        )));
    }
    let (rho, mu) = (&rep_data.rho, &rep_data.mu);
    let mut rep = CheckReport::new("representation");
    let mut lie = Tally::new("lsa.rep_lie");
    let mut compat = Tally::new("lsa.rep_compat");
    for i in 0..n {
        for j in 0..n {
            let br = a.commutator(&a.basis(i), &a.basis(j));
            let res = combine_mats(rho, &br, m).sub(&rho[i].mul(&rho[j]).sub(&rho[j].mul(&rho[i])));
            lie.expect(res.is_zero(), || loc(&[i, j]), || flat(&res));
            let prod = a.mul(&a.basis(i), &a.basis(j));
            let lhs = rho[i].mul(&mu[j]).sub(&mu[j].mul(&rho[i]));
            let rhs = combine_mats(mu, &prod, m).sub(&mu[j].mul(&mu[i]));
            let res = lhs.sub(&rhs);
            compat.expect(res.is_zero(), || loc(&[i, j]), || flat(&res));
        }
    }
    rep.push_tally(lie);
    rep.push_tally(compat);
    Ok(rep)
}

fn flat(m: &QMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let r: Vec<String> = m.row(i).iter().map(ToString::to_string).collect();
            format!("[{}]", r.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// A scalar-valued `n`-cochain stored on all index tuples, expected to be
/// antisymmetric in its first `n - 1` slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    dim: usize,
    data: Vec<BigRational>,
}

impl Cochain {
    pub fn zero(degree: usize, dim: usize) -> Self {
        assert!(degree >= 1);
        Cochain {
            degree,
            dim,
            data: zero_vec(dim.pow(degree as u32)),
        }
    }

    pub fn from_fn(degree: usize, dim: usize, f: impl Fn(&[usize]) -> BigRational) -> Self {
        let mut c = Cochain::zero(degree, dim);
        for idx in 0..c.data.len() {
            let t = crate::cohomology::tuple_of(idx, degree, dim);
            c.data[idx] = f(&t);
        }
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, idx: &[usize]) -> &BigRational {
        &self.data[tuple_index(idx, self.dim)]
    }

    pub fn set(&mut self, idx: &[usize], v: BigRational) {
        let i = tuple_index(idx, self.dim);
        self.data[i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Antisymmetry in the first `n - 1` slots.
    pub fn is_well_shaped(&self) -> bool {
        let n = self.degree;
        (0..self.data.len()).all(|idx| {
            let t = crate::cohomology::tuple_of(idx, n, self.dim);
            (0..n.saturating_sub(2)).all(|p| {
                let mut s = t.clone();
                s.swap(p, p + 1);
                (&self.data[idx] + self.get(&s)).is_zero()
            })
        })
    }

    /// Membership in the restricted subcomplex.
    pub fn is_restricted(&self, a: &FiniteAlgebra) -> bool {
        let phi: Vec<Poly> = self
            .data
            .iter()
            .map(|x| Poly::constant(x.clone()))
            .collect();
        a.to_poly_lsa()
            .restriction_residuals(self.degree, 1, &phi)
            .iter()
            .all(Poly::is_zero)
    }
}

/// Coboundary with trivial coefficients over a point.
pub fn coboundary(a: &FiniteAlgebra, phi: &Cochain) -> Result<Cochain> {
    if phi.dim != a.dim {
        return Err(Error::Shape("cochain and algebra dimensions differ".into()));
    }
    if !phi.is_well_shaped() {
        return Err(Error::Shape(
            "cochain is not antisymmetric in its leading slots".into(),
        ));
    }
    let p: Vec<Poly> = phi.data.iter().map(|x| Poly::constant(x.clone())).collect();
    let d = a.to_poly_lsa().coboundary(phi.degree, 1, &p);
    Ok(Cochain {
        degree: phi.degree + 1,
        dim: a.dim,
        data: d
            .iter()
            .map(|x| x.constant_value().expect("point data is constant"))
            .collect(),
    })
}

/// Kernel, image and cohomology dimensions of the restricted complex in
/// degree `n` with values in a trivial module of dimension `values`.
pub fn restricted_cohomology_dims(
    a: &FiniteAlgebra,
    n: usize,
    values: usize,
) -> Result<CohomologyDims> {
    a.require_left_symmetric()?;
    if n == 0 {
        return Err(Error::Precondition("cochains start in degree 1".into()));
    }
    Ok(a.to_poly_lsa().restricted_dims(n, values, 0))
}

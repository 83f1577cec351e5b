//! Trivial-coefficient cochain complex of a left-symmetric algebroid whose
//! structure functions are polynomials, with cochain coefficients truncated
//! to total degree at most `d`. A point algebra is the case of zero
//! coordinates.
//!
//! A cochain of degree `n` with values in a `k`-dimensional space is stored
//! densely: slot `tuple_index(t) * k + v` holds the `v`-th value component of
//! `phi(e_t1, ..., e_tn)`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::expr::{Monomial, Poly};
use crate::linalg::{QMatrix, QVector};

/// Left-symmetric product and anchor with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyLsa {
    pub rank: usize,
    /// Number of chart coordinates; coordinate `c` is polynomial variable `c`.
    pub coords: usize,
    /// `product[i][j][m]`: coefficient of `e_m` in `e_i . e_j`.
    pub product: Vec<Vec<Vec<Poly>>>,
    /// `anchor[i][c]`: component of `a(e_i)` along coordinate `c`.
    pub anchor: Vec<Vec<Poly>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CohomologyDims {
    pub degree: usize,
    /// Dimension of the (truncated) restricted cochain space.
    pub cochains: usize,
    pub kernel: usize,
    pub image: usize,
    pub cohomology: usize,
    /// Whether the coboundary maps the restricted space into the next one.
    pub subcomplex: bool,
}

pub(crate) fn tuple_index(t: &[usize], rank: usize) -> usize {
    t.iter().fold(0, |acc, &i| acc * rank + i)
}

pub(crate) fn tuple_of(mut idx: usize, n: usize, rank: usize) -> Vec<usize> {
    let mut t = vec![0; n];
    for slot in t.iter_mut().rev() {
        *slot = idx % rank;
        idx /= rank;
    }
    t
}

/// Every monomial in `vars` variables of total degree at most `d`.
pub fn monomials_up_to(vars: usize, d: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut frontier = vec![Monomial::one()];
    for _ in 0..d {
        let mut next = Vec::new();
        for m in &frontier {
            // Only multiply by variables at or after the last one used, so
            // each monomial is produced once.
            let start = m.max_var().unwrap_or(0);
            for v in start..vars as u32 {
                next.push(m.mul(&Monomial::var(v)));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort();
    out
}

impl PolyLsa {
    pub fn point(rank: usize, product: Vec<Vec<Vec<Poly>>>) -> Self {
        PolyLsa {
            rank,
            coords: 0,
            product,
            anchor: vec![Vec::new(); rank],
        }
    }

    fn bracket(&self, i: usize, j: usize) -> Vec<Poly> {
        (0..self.rank)
            .map(|m| &self.product[i][j][m] - &self.product[j][i][m])
            .collect()
    }

    fn anchor_apply(&self, i: usize, p: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (c, a) in self.anchor[i].iter().enumerate() {
            if !a.is_zero() && p.contains_var(c as u32) {
                out = &out + &(a * &p.derivative(c as u32));
            }
        }
        out
    }

    fn slots(&self, n: usize, k: usize) -> usize {
        self.rank.pow(n as u32) * k
    }

    /// Coboundary of an `n`-cochain.
    pub fn coboundary(&self, n: usize, k: usize, phi: &[Poly]) -> Vec<Poly> {
        assert!(n >= 1);
        assert_eq!(phi.len(), self.slots(n, k), "cochain shape");
        let r = self.rank;
        let at = |t: &[usize], v: usize| &phi[tuple_index(t, r) * k + v];
        let brackets: Vec<Vec<Vec<Poly>>> = (0..r)
            .map(|i| (0..r).map(|j| self.bracket(i, j)).collect())
            .collect();
        let mut out = vec![Poly::zero(); self.slots(n + 1, k)];
        for idx in 0..r.pow(n as u32 + 1) {
            let x = tuple_of(idx, n + 1, r);
            let last = x[n];
            for v in 0..k {
                let mut acc = Poly::zero();
                for i in 0..n {
                    let even = i % 2 == 0;
                    let mut rest: Vec<usize> = x.clone();
                    rest.remove(i);
                    let t = self.anchor_apply(x[i], at(&rest, v));
                    acc = if even { &acc + &t } else { &acc - &t };
                    // -phi(..., x_i . x_{n+1})
                    let mut head: Vec<usize> = x[..n].to_vec();
                    head.remove(i);
                    head.push(0);
                    for m in 0..r {
                        let c = &self.product[x[i]][last][m];
                        if c.is_zero() {
                            continue;
                        }
                        *head.last_mut().unwrap() = m;
                        let t = c * at(&head, v);
                        acc = if even { &acc - &t } else { &acc + &t };
                    }
                }
                for i in 0..n {
                    for j in i + 1..n {
                        let even = (i + j) % 2 == 0;
                        let mut tail: Vec<usize> = Vec::with_capacity(n);
                        tail.push(0);
                        tail.extend(
                            x.iter()
                                .enumerate()
                                .filter(|&(p, _)| p != i && p != j)
                                .map(|(_, &e)| e),
                        );
                        for m in 0..r {
                            let c = &brackets[x[i]][x[j]][m];
                            if c.is_zero() {
                                continue;
                            }
                            tail[0] = m;
                            let t = c * at(&tail, v);
                            acc = if even { &acc + &t } else { &acc - &t };
                        }
                    }
                }
                out[idx * k + v] = acc;
            }
        }
        out
    }

    /// Residuals whose vanishing cuts out the restricted cochains: the
    /// antisymmetry of the first `n - 1` slots, plus the degree-specific
    /// condition (closedness in degree 1, symmetry in degree 2, vanishing
    /// cyclic sum in degree 3).
    pub fn restriction_residuals(&self, n: usize, k: usize, phi: &[Poly]) -> Vec<Poly> {
        let r = self.rank;
        let at = |t: &[usize], v: usize| &phi[tuple_index(t, r) * k + v];
        let mut out = Vec::new();
        for idx in 0..r.pow(n as u32) {
            let t = tuple_of(idx, n, r);
            for p in 0..n.saturating_sub(2) {
                let mut s = t.clone();
                s.swap(p, p + 1);
                for v in 0..k {
                    out.push(at(&t, v) + at(&s, v));
                }
            }
        }
        match n {
            1 => {
                for i in 0..r {
                    for j in i + 1..r {
                        let b = self.bracket(i, j);
                        for v in 0..k {
                            let mut acc = Poly::zero();
                            for (m, c) in b.iter().enumerate() {
                                acc = &acc + &(c * at(&[m], v));
                            }
                            acc = &acc - &self.anchor_apply(i, at(&[j], v));
                            acc = &acc + &self.anchor_apply(j, at(&[i], v));
                            out.push(acc);
                        }
                    }
                }
            }
            2 => {
                for i in 0..r {
                    for j in 0..r {
                        for v in 0..k {
                            out.push(at(&[i, j], v) - at(&[j, i], v));
                        }
                    }
                }
            }
            3 => {
                for idx in 0..r.pow(3) {
                    let t = tuple_of(idx, 3, r);
                    let (a, b, c) = (t[0], t[1], t[2]);
                    for v in 0..k {
                        out.push(&(at(&[a, b, c], v) + at(&[b, c, a], v)) + at(&[c, a, b], v));
                    }
                }
            }
            _ => {}
        }
        out
    }

    /// Basis of the truncated restricted cochains of degree `n`, each
    /// returned as a dense cochain.
    pub fn restricted_basis(&self, n: usize, k: usize, d: u32) -> Vec<Vec<Poly>> {
        let monos = monomials_up_to(self.coords, d);
        let slots = self.slots(n, k);
        let unknowns = slots * monos.len();
        let unit = |u: usize| -> Vec<Poly> {
            let mut phi = vec![Poly::zero(); slots];
            phi[u / monos.len()] = Poly::term(monos[u % monos.len()].clone(), BigRational::one());
            phi
        };
        let columns: Vec<Vec<Poly>> = (0..unknowns)
            .map(|u| self.restriction_residuals(n, k, &unit(u)))
            .collect();
        let constraints = keyed_matrix(&columns.iter().collect::<Vec<_>>()).0;
        let kernel = if constraints.rows() == 0 {
            (0..unknowns)
                .map(|u| {
                    let mut e = vec![BigRational::zero(); unknowns];
                    e[u] = BigRational::one();
                    e
                })
                .collect()
        } else {
            constraints.kernel_basis()
        };
        kernel
            .into_iter()
            .map(|vec| {
                let mut phi = vec![Poly::zero(); slots];
                for (u, c) in vec.iter().enumerate() {
                    if !c.is_zero() {
                        let t = Poly::term(monos[u % monos.len()].clone(), c.clone());
                        phi[u / monos.len()] = &phi[u / monos.len()] + &t;
                    }
                }
                phi
            })
            .collect()
    }

    /// Dimensions of kernel, image and cohomology of the restricted complex
    /// in degree `n`, with values in a `k`-dimensional trivial module and
    /// coefficients of degree at most `d`.
    pub fn restricted_dims(&self, n: usize, k: usize, d: u32) -> CohomologyDims {
        self.restricted_dims_with(n, k, d, &|m: &QMatrix| m.rank())
    }

    /// As [`restricted_dims`](Self::restricted_dims) with a caller-supplied rank routine.
    pub fn restricted_dims_with(
        &self,
        n: usize,
        k: usize,
        d: u32,
        rank: &dyn Fn(&QMatrix) -> usize,
    ) -> CohomologyDims {
        assert!(n >= 1, "cochains start in degree 1");
        let basis = self.restricted_basis(n, k, d);
        let images: Vec<Vec<Poly>> = basis.iter().map(|phi| self.coboundary(n, k, phi)).collect();
        let subcomplex = images.iter().all(|dphi| {
            self.restriction_residuals(n + 1, k, dphi)
                .iter()
                .all(Poly::is_zero)
        });

        let dmat = keyed_matrix(&images.iter().collect::<Vec<_>>()).0;
        let kernel_coeffs = null_space(&dmat, basis.len());
        let kernel = kernel_coeffs.len();
        let cocycles: Vec<Vec<Poly>> = kernel_coeffs.iter().map(|c| combine(&basis, c)).collect();

        let image = if n == 1 {
            0
        } else {
            let prev = self.restricted_basis(n - 1, k, d);
            let bounds: Vec<Vec<Poly>> = prev
                .iter()
                .map(|phi| self.coboundary(n - 1, k, phi))
                .collect();
            let u = keyed_matrix(&bounds.iter().collect::<Vec<_>>()).0;
            let z = keyed_matrix(&cocycles.iter().collect::<Vec<_>>()).0;
            let both: Vec<&Vec<Poly>> = bounds.iter().chain(cocycles.iter()).collect();
            let uz = keyed_matrix(&both).0;
            rank(&u) + rank(&z) - rank(&uz)
        };
        CohomologyDims {
            degree: n,
            cochains: basis.len(),
            kernel,
            image,
            cohomology: kernel - image,
            subcomplex,
        }
    }
}

fn combine(basis: &[Vec<Poly>], coeffs: &QVector) -> Vec<Poly> {
    let len = basis.first().map_or(0, Vec::len);
    let mut out = vec![Poly::zero(); len];
    for (b, c) in basis.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, p) in out.iter_mut().zip(b) {
            *o = &*o + &p.scale(c);
        }
    }
    out
}

fn null_space(m: &QMatrix, cols: usize) -> Vec<QVector> {
    if m.rows() == 0 {
        return (0..cols)
            .map(|i| {
                let mut e = vec![BigRational::zero(); cols];
                e[i] = BigRational::one();
                e
            })
            .collect();
    }
    m.kernel_basis()
}

/// Matrix whose columns are the given polynomial vectors, expanded in the
/// monomial basis. Rows are keyed by (slot, monomial) in sorted order.
fn keyed_matrix(columns: &[&Vec<Poly>]) -> (QMatrix, Vec<(usize, Monomial)>) {
    let mut keys: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    for col in columns {
        for (s, p) in col.iter().enumerate() {
            for (m, _) in p.terms() {
                keys.entry((s, m.clone())).or_insert(0);
            }
        }
    }
    for (i, v) in keys.values_mut().enumerate() {
        *v = i;
    }
    let mut mat = QMatrix::zeros(keys.len(), columns.len());
    for (j, col) in columns.iter().enumerate() {
        for (s, p) in col.iter().enumerate() {
            for (m, c) in p.terms() {
                mat.set(keys[&(s, m.clone())], j, c.clone());
            }
        }
    }
    let ordered = keys.into_keys().collect();
    (mat, ordered)
}

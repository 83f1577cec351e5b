//! Pre-symplectic algebroids: a frame product table `e_a * e_b`, an anchor
//! and a skew nondegenerate pairing `(.,.)_-`.
//!
//! Only the frame table is stored. On function multiples the product is
//! extended by
//!
//! ```text
//! u * v = sum u^a v^b (e_a * e_b) + sum_b rho(u)(v^b) e_b
//!         + 1/2 sum (e_a, e_b)_- (u^a D(v^b) - v^b D(u^a))
//! ```
//!
//! which is the only extension compatible with the axioms.

use std::sync::Arc;

use crate::algebroid::{
    check_2cocycle, label, sections, triples, validate_frame, validate_table, Arg, ChartAlgebroid,
    FormField, Law, Section,
};
use crate::error::{Error, Result};
use crate::expr::{ChartContext, DiffExpr};
use crate::linalg::ExprMatrix;
use crate::report::{CheckReport, Tally};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreSymStructure {
    ctx: Arc<ChartContext>,
    frame: Vec<String>,
    anchor: ExprMatrix,
    star: Vec<Vec<Section>>,
    pairing: ExprMatrix,
    pairing_inv: ExprMatrix,
}

fn half() -> DiffExpr {
    DiffExpr::ratio(1, 2)
}

impl PreSymStructure {
    /// `anchor` is `rank x dim`; `star[a][b]` holds the frame coefficients
    /// of `e_a * e_b`; `pairing` is the matrix of `(e_a, e_b)_-`.
    pub fn new(
        ctx: Arc<ChartContext>,
        frame: Vec<String>,
        anchor: ExprMatrix,
        star: Vec<Vec<Section>>,
        pairing: ExprMatrix,
    ) -> Result<Self> {
        let r = frame.len();
        validate_frame(&ctx, &frame)?;
        if anchor.rows() != r || anchor.cols() != ctx.dim() {
            return Err(Error::Shape(format!("anchor must be {r} x {}", ctx.dim())));
        }
        validate_table(&star, r, "star")?;
        if pairing.rows() != r || pairing.cols() != r {
            return Err(Error::Shape(format!("pairing must be {r} x {r}")));
        }
        if !pairing.add(&pairing.transpose()).is_zero() {
            return Err(Error::Shape("pairing is not skew".into()));
        }
        let pairing_inv = match pairing.invert() {
            Ok(m) => m,
            Err(Error::Singular { det }) => {
                return Err(Error::Degenerate(format!("determinant {det}")))
            }
            Err(e) => return Err(e),
        };
        Ok(PreSymStructure {
            ctx,
            frame,
            anchor,
            star,
            pairing,
            pairing_inv,
        })
    }

    pub fn ctx(&self) -> &Arc<ChartContext> {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.frame.len()
    }

    pub fn frame(&self) -> &[String] {
        &self.frame
    }

    pub fn anchor(&self) -> &ExprMatrix {
        &self.anchor
    }

    pub fn star_table(&self) -> &[Vec<Section>] {
        &self.star
    }

    pub fn pairing(&self) -> &ExprMatrix {
        &self.pairing
    }

    pub fn unit(&self, a: usize) -> Section {
        sections::unit(self.rank(), a)
    }

    pub fn format(&self, u: &[DiffExpr]) -> String {
        sections::format(&self.ctx, &self.frame, u)
    }

    /// `rho(u)(f)`.
    pub fn rho(&self, u: &[DiffExpr], f: &DiffExpr) -> Result<DiffExpr> {
        sections::apply_anchor(&self.ctx, &self.anchor, u, f)
    }

    pub fn vector_field(&self, u: &[DiffExpr]) -> Vec<DiffExpr> {
        sections::vector_field(&self.anchor, u)
    }

    /// `(u, v)_-`.
    pub fn pair(&self, u: &[DiffExpr], v: &[DiffExpr]) -> DiffExpr {
        let mut acc = DiffExpr::zero();
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                let w = self.pairing.get(a, b);
                if vb.is_zero() || w.is_zero() {
                    continue;
                }
                acc += &(&(ua * w) * vb);
            }
        }
        acc
    }

    /// The section `Df` with `(Df, e)_- = rho(e)(f)` for every `e`.
    pub fn d_op(&self, f: &DiffExpr) -> Result<Section> {
        let r = self.rank();
        if f.max_var().is_none() {
            return Ok(sections::zero(r));
        }
        let rf: Vec<DiffExpr> = (0..r)
            .map(|b| self.rho(&self.unit(b), f))
            .collect::<Result<_>>()?;
        Ok((0..r)
            .map(|a| {
                (0..r)
                    .filter(|&b| !rf[b].is_zero())
                    .map(|b| self.pairing_inv.get(b, a) * &rf[b])
                    .sum()
            })
            .collect())
    }

    /// `rho^* xi`, defined by `(rho^* xi, e)_- = <xi, rho(e)>`.
    pub fn rho_star(&self, xi: &[DiffExpr]) -> Section {
        let r = self.rank();
        let paired: Vec<DiffExpr> = (0..r)
            .map(|b| self.anchor.row(b).iter().zip(xi).map(|(a, x)| a * x).sum())
            .collect();
        (0..r)
            .map(|a| {
                (0..r)
                    .filter(|&b| !paired[b].is_zero())
                    .map(|b| self.pairing_inv.get(b, a) * &paired[b])
                    .sum()
            })
            .collect()
    }

    /// `u * v` on general sections.
    pub fn star(&self, u: &[DiffExpr], v: &[DiffExpr]) -> Result<Section> {
        let mut out = sections::bilinear(&self.star, u, v);
        let x = self.vector_field(u);
        for (b, vb) in v.iter().enumerate() {
            out[b] += &sections::apply_field(&self.ctx, &x, vb)?;
        }
        let mut dv: Vec<Option<Section>> = vec![None; v.len()];
        let mut du: Vec<Option<Section>> = vec![None; u.len()];
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                let w = self.pairing.get(a, b);
                if vb.is_zero() || w.is_zero() {
                    continue;
                }
                let hw = &half() * w;
                if vb.max_var().is_some() {
                    if dv[b].is_none() {
                        dv[b] = Some(self.d_op(vb)?);
                    }
                    sections::axpy(&mut out, &(&hw * ua), dv[b].as_ref().expect("set"));
                }
                if ua.max_var().is_some() {
                    if du[a].is_none() {
                        du[a] = Some(self.d_op(ua)?);
                    }
                    sections::axpy(&mut out, &-(&hw * vb), du[a].as_ref().expect("set"));
                }
            }
        }
        Ok(out)
    }

    /// `[u, v]_E = u * v - v * u`.
    pub fn bracket(&self, u: &[DiffExpr], v: &[DiffExpr]) -> Result<Section> {
        Ok(sections::sub(&self.star(u, v)?, &self.star(v, u)?))
    }

    /// Frame table of `[.,.]_E`.
    pub fn bracket_table(&self) -> Vec<Vec<Section>> {
        let r = self.rank();
        (0..r)
            .map(|a| {
                (0..r)
                    .map(|b| sections::sub(&self.star[a][b], &self.star[b][a]))
                    .collect()
            })
            .collect()
    }

    /// `T(u,v,w) = (u*v, w) + (u, v*w) - (v*u, w) - (v, u*w)`.
    pub fn t_sections(&self, u: &[DiffExpr], v: &[DiffExpr], w: &[DiffExpr]) -> Result<DiffExpr> {
        let a = self.pair(&self.star(u, v)?, w);
        let b = self.pair(u, &self.star(v, w)?);
        let c = self.pair(&self.star(v, u)?, w);
        let d = self.pair(v, &self.star(u, w)?);
        Ok(&(&a + &b) - &(&c + &d))
    }

    pub fn tensor_t(&self, a: usize, b: usize, c: usize) -> Result<DiffExpr> {
        self.t_sections(&self.unit(a), &self.unit(b), &self.unit(c))
    }

    /// `u * (v * w) - (u * v) * w`.
    pub fn associator(&self, u: &[DiffExpr], v: &[DiffExpr], w: &[DiffExpr]) -> Result<Section> {
        Ok(sections::sub(
            &self.star(u, &self.star(v, w)?)?,
            &self.star(&self.star(u, v)?, w)?,
        ))
    }

    /// The commutator bracket as a Lie-algebroid candidate and the pairing as a 2-form.
    pub(crate) fn commutator_data(&self) -> Result<(ChartAlgebroid, FormField)> {
        let l = ChartAlgebroid::new(
            self.ctx.clone(),
            self.frame.clone(),
            self.anchor.clone(),
            self.bracket_table(),
            Law::Bracket,
        )?;
        Ok((l, FormField::from_matrix(&self.pairing)?))
    }
}

/// Both defining conditions on frame triples with probe multiples, and
/// the derived identities.
pub fn check_presymplectic(e: &PreSymStructure) -> Result<CheckReport> {
    let ctx = e.ctx.clone();
    let frame = &e.frame;
    let r = e.rank();
    let f = ctx.probe(0);
    let g = ctx.probe(1);
    let mut rep = CheckReport::new("pre-symplectic algebroid");
    // Skewness and invertibility are enforced at construction.
    rep.push_tally(Tally::new("presym.pairing"));

    let mut dual = Tally::new("presym.d_duality");
    let df = e.d_op(&f)?;
    for a in 0..r {
        let res = &e.pair(&df, &e.unit(a)) - &e.rho(&e.unit(a), &f)?;
        dual.expect(
            res.is_zero(),
            || format!("({})", frame[a]),
            || ctx.print(&res),
        );
    }
    rep.push_tally(dual);

    let mut dl = Tally::new("presym.d_leibniz");
    let fg = &f * &g;
    let res = sections::sub(
        &e.d_op(&fg)?,
        &sections::add(
            &sections::scale(&f, &e.d_op(&g)?),
            &sections::scale(&g, &df),
        ),
    );
    dl.expect(
        sections::is_zero(&res),
        || "(f,g)".into(),
        || e.format(&res),
    );
    rep.push_tally(dl);

    let sixth = DiffExpr::ratio(1, 6);
    let mut def_i = Tally::new("presym.def_i");
    for t in triples(r, &[0, 1, 2], |a, b, _| a > b) {
        let [u, v, w] = t.map(|s| s.section(&ctx, r));
        let lhs = sections::sub(&e.associator(&u, &v, &w)?, &e.associator(&v, &u, &w)?);
        let dt = e.d_op(&e.t_sections(&u, &v, &w)?)?;
        let res = sections::sub(&lhs, &sections::scale(&sixth, &dt));
        def_i.expect(
            sections::is_zero(&res),
            || label(&ctx, frame, &t),
            || e.format(&res),
        );
    }
    rep.push_tally(def_i);

    let mut def_ii = Tally::new("presym.def_ii");
    for t in triples(r, &[0, 1, 2], |_, _, _| false) {
        let [u, v, w] = t.map(|s| s.section(&ctx, r));
        let lhs = e.rho(&u, &e.pair(&v, &w))?;
        let shifted = sections::sub(
            &e.star(&u, &v)?,
            &sections::scale(&half(), &e.d_op(&e.pair(&u, &v))?),
        );
        let rhs = &e.pair(&shifted, &w) + &e.pair(&v, &e.bracket(&u, &w)?);
        let res = &lhs - &rhs;
        def_ii.expect(res.is_zero(), || label(&ctx, frame, &t), || ctx.print(&res));
    }
    rep.push_tally(def_ii);

    let mut right = Tally::new("presym.leibniz_right");
    let mut brk = Tally::new("presym.leibniz_bracket");
    let mut left = Tally::new("presym.leibniz_left");
    for a in 0..r {
        for b in 0..r {
            let (x, y) = (e.unit(a), e.unit(b));
            let fy = sections::scale(&f, &y);
            let fx = sections::scale(&f, &x);
            let xy = e.star(&x, &y)?;
            let w = e.pair(&x, &y);
            let rf = e.rho(&x, &f)?;
            let at = |sa: bool, sb: bool| {
                label(
                    &ctx,
                    frame,
                    &[
                        Arg {
                            index: a,
                            scaled: sa,
                        },
                        Arg {
                            index: b,
                            scaled: sb,
                        },
                    ],
                )
            };

            let mut rhs = sections::scale(&f, &xy);
            sections::axpy(&mut rhs, &rf, &y);
            sections::axpy(&mut rhs, &(&half() * &w), &df);
            let res = sections::sub(&e.star(&x, &fy)?, &rhs);
            right.expect(
                sections::is_zero(&res),
                || at(false, true),
                || e.format(&res),
            );

            let mut rhs = sections::scale(&f, &e.bracket(&x, &y)?);
            sections::axpy(&mut rhs, &rf, &y);
            let res = sections::sub(&e.bracket(&x, &fy)?, &rhs);
            brk.expect(
                sections::is_zero(&res),
                || at(false, true),
                || e.format(&res),
            );

            let mut rhs = sections::scale(&f, &xy);
            sections::axpy(&mut rhs, &-(&half() * &w), &df);
            let res = sections::sub(&e.star(&fx, &y)?, &rhs);
            left.expect(
                sections::is_zero(&res),
                || at(true, false),
                || e.format(&res),
            );
        }
    }
    rep.push_tally(right);
    rep.push_tally(brk);
    rep.push_tally(left);

    let mut cyc = Tally::new("presym.cyclic_t");
    for t in triples(r, &[0], |_, _, _| false) {
        let [u, v, w] = t.map(|s| s.section(&ctx, r));
        let s = &(&e.t_sections(&u, &v, &w)? + &e.t_sections(&v, &w, &u)?)
            + &e.t_sections(&w, &u, &v)?;
        cyc.expect(s.is_zero(), || label(&ctx, frame, &t), || ctx.print(&s));
    }
    rep.push_tally(cyc);

    let mut closed = Tally::new("presym.t_closed_form");
    let bt = e.bracket_table();
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                let t = e.tensor_t(a, b, c)?;
                let three = DiffExpr::from_int(3);
                let thalf = DiffExpr::ratio(3, 2);
                let form = &(&three * &e.pair(&bt[a][b], &e.unit(c)))
                    + &(&(&thalf * &e.rho(&e.unit(b), e.pairing.get(a, c))?)
                        - &(&thalf * &e.rho(&e.unit(a), e.pairing.get(b, c))?));
                let res = &t - &form;
                closed.expect(
                    res.is_zero(),
                    || label(&ctx, frame, &[Arg::plain(a), Arg::plain(b), Arg::plain(c)]),
                    || ctx.print(&res),
                );
            }
        }
    }
    rep.push_tally(closed);

    let mut sdf = Tally::new("presym.star_df");
    for a in 0..r {
        let x = e.unit(a);
        let lhs = e.star(&x, &df)?;
        let rhs = sections::scale(&half(), &e.d_op(&e.pair(&df, &x))?);
        let res = sections::sub(&lhs, &rhs);
        sdf.expect(
            sections::is_zero(&res),
            || format!("({},Df)", frame[a]),
            || e.format(&res),
        );
    }
    rep.push_tally(sdf);
    Ok(rep)
}

/// The commutator Lie algebroid and the pairing as its symplectic form.
pub fn symplectic_from_presym(e: &PreSymStructure) -> Result<(ChartAlgebroid, FormField)> {
    if !check_presymplectic(e)?.passed() {
        return Err(Error::Precondition(
            "structure fails the pre-symplectic axioms".into(),
        ));
    }
    e.commutator_data()
}

/// The unique product with
/// `w(e_a * e_b, e_c) = rho(e_a) w(e_b,e_c) + 1/2 rho(e_c) w(e_a,e_b) - w(e_b, [e_a,e_c])`,
/// solved with the inverse of the form.
pub fn presym_from_symplectic(l: &ChartAlgebroid, w: &FormField) -> Result<PreSymStructure> {
    if w.degree() != 2 || w.rank() != l.rank() {
        return Err(Error::Shape(
            "expected a 2-form of the algebroid's rank".into(),
        ));
    }
    l.require_lie()?;
    let wm = w.to_matrix();
    let wt_inv = match wm.transpose().invert() {
        Ok(m) => m,
        Err(Error::Singular { det }) => {
            return Err(Error::Degenerate(format!("determinant {det}")))
        }
        Err(e) => return Err(e),
    };
    if !check_2cocycle(l, w)?.passed() {
        return Err(Error::Precondition("form is not closed".into()));
    }
    let r = l.rank();
    let table = l.bracket_table();
    let mut star = vec![vec![sections::zero(r); r]; r];
    for a in 0..r {
        for b in 0..r {
            let kappa: Vec<DiffExpr> = (0..r)
                .map(|c| -> Result<DiffExpr> {
                    let mut k = l.apply_anchor(&l.unit(a), wm.get(b, c))?;
                    for (d, coef) in table[a][c].iter().enumerate() {
                        if !coef.is_zero() {
                            k -= &(coef * wm.get(b, d));
                        }
                    }
                    k += &(&half() * &l.apply_anchor(&l.unit(c), wm.get(a, b))?);
                    Ok(k)
                })
                .collect::<Result<_>>()?;
            star[a][b] = wt_inv.mul_vec(&kappa);
        }
    }
    PreSymStructure::new(
        l.ctx().clone(),
        l.frame().to_vec(),
        l.anchor().clone(),
        star,
        wm,
    )
}

/// Name of the dual frame element.
pub fn dual_name(name: &str) -> String {
    match name.strip_prefix("p_") {
        Some(rest) => format!("d{rest}"),
        None => format!("{name}_dual"),
    }
}

/// The pseudo-semidirect product on `A + A*`: frame `e_1..e_r` followed by
/// the dual frame.
pub fn pseudo_semidirect(a: &ChartAlgebroid) -> Result<PreSymStructure> {
    if a.law() != Law::Product {
        return Err(Error::Precondition("needs a left-symmetric product".into()));
    }
    a.require_left_symmetric()?;
    let r = a.rank();
    let n = 2 * r;
    let s = a.structure();
    let br = a.bracket_table();
    let mut star = vec![vec![sections::zero(n); n]; n];
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                star[i][j][k] = s[i][j][k].clone();
                // e_i * e^j = L_{e_i} e^j = -sum_k [e_i, e_k]^j e^k
                star[i][r + j][r + k] = -br[i][k][j].clone();
                // e^i * e_j = -R*_{e_j} e^i = sum_k (e_k . e_j)^i e^k
                star[r + i][j][r + k] = s[k][j][i].clone();
            }
        }
    }
    let mut anchor = ExprMatrix::zeros(n, a.ctx().dim());
    for i in 0..r {
        for c in 0..a.ctx().dim() {
            anchor.set(i, c, a.anchor().get(i, c).clone());
        }
    }
    let mut pairing = ExprMatrix::zeros(n, n);
    for i in 0..r {
        pairing.set(i, r + i, DiffExpr::from_int(-1));
        pairing.set(r + i, i, DiffExpr::one());
    }
    let mut frame = a.frame().to_vec();
    frame.extend(a.frame().iter().map(|f| dual_name(f)));
    PreSymStructure::new(a.ctx().clone(), frame, anchor, star, pairing)
}

/// A subbundle given by spanning sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subbundle {
    pub sections: Vec<Section>,
}

impl Subbundle {
    pub fn new(sections: Vec<Section>) -> Self {
        Subbundle { sections }
    }

    /// Span of the frame elements with the given indices.
    pub fn frame_span(rank: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        Subbundle {
            sections: indices
                .into_iter()
                .map(|i| sections::unit(rank, i))
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.sections.len()
    }
}

/// Coefficients `c` with `sum_i c_i s_i = v`, when they exist.
fn solve_in_span(m: &ExprMatrix, v: &[DiffExpr]) -> Option<Vec<DiffExpr>> {
    let mt = m.transpose();
    let gram = mt.mul(m);
    let c = gram.solve(&mt.mul_vec(v)).ok()?;
    let back = m.mul_vec(&c);
    if back.iter().zip(v).all(|(a, b)| a == b) {
        Some(c)
    } else {
        None
    }
}

/// Maximal isotropy and closure under the product. When every check
/// passes, the induced left-symmetric algebroid on `F` is returned.
pub fn check_dirac(
    e: &PreSymStructure,
    sub: &Subbundle,
) -> Result<(CheckReport, Option<ChartAlgebroid>)> {
    let ctx = e.ctx.clone();
    let r = e.rank();
    let k = sub.rank();
    if sub.sections.iter().any(|s| s.len() != r) {
        return Err(Error::Shape(format!("sections must have {r} components")));
    }
    let mut rep = CheckReport::new("Dirac structure");
    let mut rank = Tally::new("dirac.rank");
    if 2 * k != r {
        rank.fail(format!("rank {k}"), format!("expected {}", r / 2));
    }
    rep.push_tally(rank);

    let m = ExprMatrix::from_fn(r, k, |i, j| sub.sections[j][i].clone());
    let mut ind = Tally::new("dirac.independent");
    let mrank = m.rank();
    if mrank != k {
        ind.fail(format!("{k} sections"), format!("span has rank {mrank}"));
    }
    let independent = ind.is_clean();
    rep.push_tally(ind);

    let names: Vec<String> = sub
        .sections
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let unit =
                s.iter().filter(|c| !c.is_zero()).count() == 1 && s.iter().any(|c| c.is_one());
            if unit {
                e.frame[s.iter().position(|c| c.is_one()).expect("unit")].clone()
            } else {
                format!("s{}", i + 1)
            }
        })
        .collect();

    let mut iso = Tally::new("dirac.isotropic");
    for i in 0..k {
        for j in i + 1..k {
            let p = e.pair(&sub.sections[i], &sub.sections[j]);
            iso.expect(
                p.is_zero(),
                || format!("({},{})", names[i], names[j]),
                || ctx.print(&p),
            );
        }
    }
    rep.push_tally(iso);

    let mut integ = Tally::new("dirac.integrable");
    let mut table = vec![vec![sections::zero(k); k]; k];
    for i in 0..k {
        for j in 0..k {
            let v = e.star(&sub.sections[i], &sub.sections[j])?;
            match independent.then(|| solve_in_span(&m, &v)).flatten() {
                Some(c) => table[i][j] = c,
                None => integ.fail(format!("({},{})", names[i], names[j]), e.format(&v)),
            }
        }
    }
    rep.push_tally(integ);

    if !rep.passed() {
        rep.skip("dirac.induced", "not a Dirac structure");
        return Ok((rep, None));
    }
    let anchor = ExprMatrix::from_rows(sub.sections.iter().map(|s| e.vector_field(s)).collect());
    let anchor = if k == 0 {
        ExprMatrix::zeros(0, ctx.dim())
    } else {
        anchor
    };
    let induced = ChartAlgebroid::new(ctx.clone(), names, anchor, table, Law::Product)?;
    let sub_rep = crate::algebroid::check_left_symmetric_algebroid(&induced)?;
    let mut t = Tally::new("dirac.induced");
    for id in sub_rep.failed_ids() {
        t.fail(id, "fails");
    }
    rep.push_tally(t);
    let ok = rep.passed();
    Ok((rep, ok.then_some(induced)))
}

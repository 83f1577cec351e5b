//! Para-complex structures on pre-symplectic algebroids, the metric
//! `g(e1, e2) = w(e1, P e2)` and its Levi-Civita connection.
//!
//! `P` acts on frame coefficient columns: `P(e_b) = sum_a P[a][b] e_a`.

use crate::algebroid::{check_2cocycle, label, sections, Arg, ChartAlgebroid, FormField, Section};
use crate::error::{Error, Result};
use crate::expr::DiffExpr;
use crate::linalg::ExprMatrix;
use crate::presym::{check_dirac, PreSymStructure, Subbundle};
use crate::report::{CheckReport, Tally};

fn pair_label(frame: &[String], a: usize, b: usize) -> String {
    format!("({},{})", frame[a], frame[b])
}

fn bilinear(m: &ExprMatrix, u: &[DiffExpr], v: &[DiffExpr]) -> DiffExpr {
    let mv = m.mul_vec(v);
    u.iter()
        .zip(&mv)
        .filter(|(a, _)| !a.is_zero())
        .map(|(a, b)| a * b)
        .sum()
}

/// The `+1` and `-1` eigenbundles, spanned by kernel bases of `P -+ id`.
pub fn eigenbundles(p: &ExprMatrix) -> (Subbundle, Subbundle) {
    let id = ExprMatrix::identity(p.rows());
    (
        Subbundle::new(p.sub(&id).kernel_basis()),
        Subbundle::new(p.add(&id).kernel_basis()),
    )
}

/// The algebraic and integrability conditions on `P`, the para-Kähler
/// compatibility of the commutator structure, and the Dirac property of
/// both eigenbundles.
pub fn check_paracomplex(
    e: &PreSymStructure,
    p: &ExprMatrix,
) -> Result<(CheckReport, Option<(Subbundle, Subbundle)>)> {
    let r = e.rank();
    if p.rows() != r || p.cols() != r {
        return Err(Error::Shape(format!("P must be {r} x {r}")));
    }
    let ctx = e.ctx().clone();
    let frame = e.frame();
    let mut rep = CheckReport::new("para-complex structure");

    let mut inv = Tally::new("pk.involution");
    let sq = p.mul(p).sub(&ExprMatrix::identity(r));
    for a in 0..r {
        for b in 0..r {
            let v = sq.get(a, b);
            inv.expect(v.is_zero(), || pair_label(frame, a, b), || ctx.print(v));
        }
    }
    let involutive = inv.is_clean();
    rep.push_tally(inv);

    let mut anti = Tally::new("pk.anti_invariance");
    let mut compat = Tally::new("pk.para_kahler");
    let w = e.pairing();
    let pwp = p.transpose().mul(w).mul(p).add(w);
    let wp = p.transpose().mul(w).add(&w.mul(p));
    for a in 0..r {
        for b in 0..r {
            let v = pwp.get(a, b);
            anti.expect(v.is_zero(), || pair_label(frame, a, b), || ctx.print(v));
            let v = wp.get(a, b);
            compat.expect(v.is_zero(), || pair_label(frame, a, b), || ctx.print(v));
        }
    }
    rep.push_tally(anti);
    rep.push_tally(compat);

    let pc = |u: &[DiffExpr]| p.mul_vec(u);
    let mut integ = Tally::new("pk.integrability");
    let mut brk = Tally::new("pk.bracket_integrability");
    let f = ctx.probe(0);
    for a in 0..r {
        for b in 0..r {
            for scaled in [false, true] {
                let x = e.unit(a);
                let mut y = e.unit(b);
                if scaled {
                    y[b] = f.clone();
                }
                let at = || label(&ctx, frame, &[Arg::plain(a), Arg { index: b, scaled }]);
                let (px, py) = (pc(&x), pc(&y));
                let lhs = pc(&e.star(&x, &y)?);
                let mut rhs = sections::add(&e.star(&px, &y)?, &e.star(&x, &py)?);
                rhs = sections::sub(&rhs, &pc(&e.star(&px, &py)?));
                let res = sections::sub(&lhs, &rhs);
                integ.expect(sections::is_zero(&res), at, || e.format(&res));

                let lhs = pc(&e.bracket(&x, &y)?);
                let mut rhs = sections::add(&e.bracket(&px, &y)?, &e.bracket(&x, &py)?);
                rhs = sections::sub(&rhs, &pc(&e.bracket(&px, &py)?));
                let res = sections::sub(&lhs, &rhs);
                brk.expect(sections::is_zero(&res), at, || e.format(&res));
            }
        }
    }
    rep.push_tally(integ);
    rep.push_tally(brk);

    if !involutive {
        rep.skip("pk.dirac_plus", "P is not an involution");
        rep.skip("pk.dirac_minus", "P is not an involution");
        return Ok((rep, None));
    }
    let (plus, minus) = eigenbundles(p);
    for (id, sub) in [("pk.dirac_plus", &plus), ("pk.dirac_minus", &minus)] {
        let (d, _) = check_dirac(e, sub)?;
        let mut t = Tally::new(id);
        for fid in d.failed_ids() {
            let w = d
                .get(fid)
                .and_then(|c| c.witness_text())
                .unwrap_or_default();
            t.fail(fid, w);
        }
        rep.push_tally(t);
    }
    Ok((rep, Some((plus, minus))))
}

/// `g_ab = w(e_a, P e_b)`.
pub fn metric_from(e: &PreSymStructure, p: &ExprMatrix) -> Result<ExprMatrix> {
    let (rep, _) = check_paracomplex(e, p)?;
    if !rep.passed() {
        return Err(Error::Precondition(format!(
            "P is not para-complex: {}",
            rep.failed_ids().join(", ")
        )));
    }
    Ok(e.pairing().mul(p))
}

/// Symmetry, nondegeneracy, anti-invariance and isotropy of the eigenbundles,
/// and recovery of the form as `w(e1, e2) = g(e1, P e2)`.
pub fn check_metric(e: &PreSymStructure, p: &ExprMatrix, g: &ExprMatrix) -> Result<CheckReport> {
    let ctx = e.ctx().clone();
    let frame = e.frame();
    let r = e.rank();
    let mut rep = CheckReport::new("pseudo-Riemannian metric");
    let mut sym = Tally::new("pk.metric_symmetric");
    let asym = g.sub(&g.transpose());
    let anti_m = p.transpose().mul(g).mul(p).add(g);
    let back = g.mul(p).sub(e.pairing());
    let mut anti = Tally::new("pk.metric_anti_invariance");
    let mut round = Tally::new("pk.metric_roundtrip");
    for a in 0..r {
        for b in 0..r {
            let v = asym.get(a, b);
            sym.expect(v.is_zero(), || pair_label(frame, a, b), || ctx.print(v));
            let v = anti_m.get(a, b);
            anti.expect(v.is_zero(), || pair_label(frame, a, b), || ctx.print(v));
            let v = back.get(a, b);
            round.expect(v.is_zero(), || pair_label(frame, a, b), || ctx.print(v));
        }
    }
    rep.push_tally(sym);
    rep.push_tally(anti);
    rep.push_tally(round);

    let mut nd = Tally::new("pk.metric_nondegenerate");
    let det = g.det()?;
    if det.is_zero() {
        nd.fail("det g", "0");
    }
    rep.push_tally(nd);

    let mut iso = Tally::new("pk.eigen_isotropic");
    let (plus, minus) = eigenbundles(p);
    for (sign, sub) in [("+", &plus), ("-", &minus)] {
        for (i, u) in sub.sections.iter().enumerate() {
            for (j, v) in sub.sections.iter().enumerate() {
                let val = bilinear(g, u, v);
                iso.expect(
                    val.is_zero(),
                    || format!("E{sign}({},{})", i + 1, j + 1),
                    || ctx.print(&val),
                );
            }
        }
    }
    rep.push_tally(iso);
    Ok(rep)
}

/// `nabla_{e_a} e_b = sum_d gamma[a][b][d] e_d` over a Lie algebroid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EConnection {
    pub gamma: Vec<Vec<Section>>,
}

impl EConnection {
    /// `nabla_u v` on general sections.
    pub fn covariant(&self, l: &ChartAlgebroid, u: &[DiffExpr], v: &[DiffExpr]) -> Result<Section> {
        let r = l.rank();
        let mut out = sections::zero(r);
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            let ea = l.unit(a);
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                out[b] += &(ua * &l.apply_anchor(&ea, vb)?);
                sections::axpy(&mut out, &(ua * vb), &self.gamma[a][b]);
            }
        }
        Ok(out)
    }
}

/// The Koszul formula solved with the exact inverse of `g`.
pub fn levi_civita(l: &ChartAlgebroid, g: &ExprMatrix) -> Result<EConnection> {
    let r = l.rank();
    if g.rows() != r || g.cols() != r {
        return Err(Error::Shape(format!("metric must be {r} x {r}")));
    }
    let g_inv = match g.invert() {
        Ok(m) => m,
        Err(Error::Singular { det }) => {
            return Err(Error::Degenerate(format!("determinant {det}")))
        }
        Err(e) => return Err(e),
    };
    let br = l.bracket_table();
    let rho = |a: usize, f: &DiffExpr| l.apply_anchor(&l.unit(a), f);
    let gp = |u: &[DiffExpr], c: usize| -> DiffExpr {
        u.iter().enumerate().map(|(d, x)| x * g.get(d, c)).sum()
    };
    let half = DiffExpr::ratio(1, 2);
    let mut gamma = vec![vec![sections::zero(r); r]; r];
    for a in 0..r {
        for b in 0..r {
            let k: Vec<DiffExpr> = (0..r)
                .map(|c| -> Result<DiffExpr> {
                    let mut s =
                        &(&rho(a, g.get(b, c))? + &rho(b, g.get(a, c))?) - &rho(c, g.get(a, b))?;
                    s += &gp(&br[c][a], b);
                    s += &gp(&br[c][b], a);
                    s += &gp(&br[a][b], c);
                    Ok(&half * &s)
                })
                .collect::<Result<_>>()?;
            gamma[a][b] = g_inv.mul_vec(&k);
        }
    }
    Ok(EConnection { gamma })
}

/// Metric and torsion residuals of a connection.
pub fn check_levi_civita(
    l: &ChartAlgebroid,
    g: &ExprMatrix,
    nabla: &EConnection,
) -> Result<CheckReport> {
    let ctx = l.ctx().clone();
    let frame = l.frame();
    let r = l.rank();
    let mut rep = CheckReport::new("Levi-Civita connection");
    let mut met = Tally::new("pk.levi_civita_metric");
    let mut tor = Tally::new("pk.levi_civita_torsion");
    let br = l.bracket_table();
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                let mut res = l.apply_anchor(&l.unit(a), g.get(b, c))?;
                for d in 0..r {
                    res -= &(&nabla.gamma[a][b][d] * g.get(d, c));
                    res -= &(&nabla.gamma[a][c][d] * g.get(b, d));
                }
                met.expect(
                    res.is_zero(),
                    || label(&ctx, frame, &[Arg::plain(a), Arg::plain(b), Arg::plain(c)]),
                    || ctx.print(&res),
                );
            }
            let res = sections::sub(
                &br[a][b],
                &sections::sub(&nabla.gamma[a][b], &nabla.gamma[b][a]),
            );
            tor.expect(
                sections::is_zero(&res),
                || pair_label(frame, a, b),
                || sections::format(&ctx, frame, &res),
            );
        }
    }
    rep.push_tally(met);
    rep.push_tally(tor);
    Ok(rep)
}

fn check_nabla_p(l: &ChartAlgebroid, p: &ExprMatrix, nabla: &EConnection) -> Result<Tally> {
    let frame = l.frame();
    let r = l.rank();
    let mut t = Tally::new("pk.nabla_p");
    for a in 0..r {
        for b in 0..r {
            let ea = l.unit(a);
            let lhs = nabla.covariant(l, &ea, &p.column(b))?;
            let rhs = p.mul_vec(&nabla.covariant(l, &ea, &l.unit(b))?);
            let res = sections::sub(&lhs, &rhs);
            t.expect(
                sections::is_zero(&res),
                || pair_label(frame, a, b),
                || l.format(&res),
            );
        }
    }
    Ok(t)
}

/// The metric, its Levi-Civita connection, `nabla P = P nabla`, and
/// agreement of `nabla` with the product on both eigenbundles.
pub fn check_star_equals_nabla(e: &PreSymStructure, p: &ExprMatrix) -> Result<CheckReport> {
    let g = metric_from(e, p)?;
    let (l, _) = e.commutator_data()?;
    let nabla = levi_civita(&l, &g)?;
    let mut rep = check_metric(e, p, &g)?;
    rep.artifact = "para-Kähler structure".into();
    rep.extend(check_levi_civita(&l, &g, &nabla)?);
    rep.push_tally(check_nabla_p(&l, p, &nabla)?);
    let (plus, minus) = eigenbundles(p);
    for (id, sub) in [
        ("pk.star_nabla_plus", &plus),
        ("pk.star_nabla_minus", &minus),
    ] {
        let mut t = Tally::new(id);
        for x in &sub.sections {
            for y in &sub.sections {
                let res = sections::sub(&nabla.covariant(&l, x, y)?, &e.star(x, y)?);
                t.expect(
                    sections::is_zero(&res),
                    || format!("({},{})", e.format(x), e.format(y)),
                    || e.format(&res),
                );
            }
        }
        rep.push_tally(t);
    }
    Ok(rep)
}

/// From a metric and an involution compatible with its Levi-Civita
/// connection, the form `w(e1, e2) = g(e1, P e2)` is a closed
/// nondegenerate 2-form and recovers `g`.
pub fn check_converse(l: &ChartAlgebroid, g: &ExprMatrix, p: &ExprMatrix) -> Result<CheckReport> {
    let ctx = l.ctx().clone();
    let frame = l.frame();
    let r = l.rank();
    if p.rows() != r || p.cols() != r {
        return Err(Error::Shape(format!("P must be {r} x {r}")));
    }
    let nabla = levi_civita(l, g)?;
    let mut rep = CheckReport::new("metric para-complex structure");
    let mut inv = Tally::new("pk.involution");
    let sq = p.mul(p).sub(&ExprMatrix::identity(r));
    let mut anti = Tally::new("pk.metric_anti_invariance");
    let am = p.transpose().mul(g).mul(p).add(g);
    for a in 0..r {
        for b in 0..r {
            inv.expect(
                sq.get(a, b).is_zero(),
                || pair_label(frame, a, b),
                || ctx.print(sq.get(a, b)),
            );
            anti.expect(
                am.get(a, b).is_zero(),
                || pair_label(frame, a, b),
                || ctx.print(am.get(a, b)),
            );
        }
    }
    rep.push_tally(inv);
    rep.push_tally(anti);
    rep.extend(check_levi_civita(l, g, &nabla)?);
    rep.push_tally(check_nabla_p(l, p, &nabla)?);

    let w = g.mul(p);
    let mut closed = Tally::new("pk.converse_closed");
    match FormField::from_matrix(&w) {
        Ok(form) => {
            if w.det()?.is_zero() {
                closed.fail("det w", "0");
            }
            let c = check_2cocycle(l, &form)?;
            for id in c.failed_ids() {
                closed.fail(
                    id,
                    c.get(id).and_then(|c| c.witness_text()).unwrap_or_default(),
                );
            }
        }
        Err(_) => closed.fail("w", "not skew"),
    }
    rep.push_tally(closed);
    let mut round = Tally::new("pk.converse_roundtrip");
    let back = w.mul(p).sub(g);
    for a in 0..r {
        for b in 0..r {
            round.expect(
                back.get(a, b).is_zero(),
                || pair_label(frame, a, b),
                || ctx.print(back.get(a, b)),
            );
        }
    }
    rep.push_tally(round);
    Ok(rep)
}

/// Every para-Kähler check on a pre-symplectic algebroid with `P`.
pub fn check_parakahler(e: &PreSymStructure, p: &ExprMatrix) -> Result<CheckReport> {
    let (mut rep, _) = check_paracomplex(e, p)?;
    if rep.passed() {
        rep.extend(check_star_equals_nabla(e, p)?);
        let g = e.pairing().mul(p);
        let (l, _) = e.commutator_data()?;
        rep.extend(check_converse(&l, &g, p)?);
    } else {
        for id in [
            "pk.metric_symmetric",
            "pk.metric_nondegenerate",
            "pk.metric_anti_invariance",
            "pk.metric_roundtrip",
            "pk.eigen_isotropic",
            "pk.levi_civita_metric",
            "pk.levi_civita_torsion",
            "pk.nabla_p",
            "pk.star_nabla_plus",
            "pk.star_nabla_minus",
            "pk.converse_closed",
            "pk.converse_roundtrip",
        ] {
            rep.skip(id, "P is not para-complex");
        }
    }
    Ok(rep)
}

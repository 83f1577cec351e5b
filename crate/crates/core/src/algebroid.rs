//! Lie algebroids and left-symmetric algebroids given by an anchored frame
//! over one chart.
//!
//! Sections are coefficient vectors in the frame. Operations on general
//! sections are extended from the frame tables by the Leibniz rule of the
//! structure's law, so evaluating an axiom on `f * e_a` with the formal probe
//! `f` checks it for every coefficient function in the ring.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cohomology::{tuple_index, tuple_of};
use crate::error::{Error, Result};
use crate::expr::{ChartContext, DiffExpr};
use crate::linalg::ExprMatrix;
use crate::report::{CheckReport, Tally};

pub type Section = Vec<DiffExpr>;

/// How the frame table extends to general sections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Law {
    /// Skew bracket: Leibniz in both arguments.
    Bracket,
    /// Left-symmetric product: tensorial in the first argument, Leibniz in the second.
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebroidKind {
    Lie,
    LeftSymmetric,
    Unverified,
}

pub mod sections {
    use super::Section;
    use crate::error::Result;
    use crate::expr::{ChartContext, DiffExpr};
    use crate::linalg::ExprMatrix;
    use crate::report::combination;

    pub fn zero(r: usize) -> Section {
        vec![DiffExpr::zero(); r]
    }

    pub fn unit(r: usize, a: usize) -> Section {
        let mut u = zero(r);
        u[a] = DiffExpr::one();
        u
    }

    pub fn add(u: &[DiffExpr], v: &[DiffExpr]) -> Section {
        u.iter().zip(v).map(|(a, b)| a + b).collect()
    }

    pub fn sub(u: &[DiffExpr], v: &[DiffExpr]) -> Section {
        u.iter().zip(v).map(|(a, b)| a - b).collect()
    }

    pub fn scale(f: &DiffExpr, u: &[DiffExpr]) -> Section {
        u.iter().map(|a| f * a).collect()
    }

    pub fn is_zero(u: &[DiffExpr]) -> bool {
        u.iter().all(DiffExpr::is_zero)
    }

    pub fn axpy(acc: &mut Section, f: &DiffExpr, u: &[DiffExpr]) {
        if f.is_zero() {
            return;
        }
        for (a, b) in acc.iter_mut().zip(u) {
            if !b.is_zero() {
                *a += &(f * b);
            }
        }
    }

    /// `sum_ab u^a v^b table[a][b]`.
    pub fn bilinear(table: &[Vec<Section>], u: &[DiffExpr], v: &[DiffExpr]) -> Section {
        let r = u.len();
        let mut out = zero(r);
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                let s = &table[a][b];
                if is_zero(s) {
                    continue;
                }
                axpy(&mut out, &(ua * vb), s);
            }
        }
        out
    }

    /// Components of the vector field `rho(u)`.
    pub fn vector_field(anchor: &ExprMatrix, u: &[DiffExpr]) -> Vec<DiffExpr> {
        (0..anchor.cols())
            .map(|i| {
                u.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(a, c)| c * anchor.get(a, i))
                    .sum()
            })
            .collect()
    }

    /// `X(f)` for a vector field with components `x`.
    pub fn apply_field(ctx: &ChartContext, x: &[DiffExpr], f: &DiffExpr) -> Result<DiffExpr> {
        if f.max_var().is_none() {
            return Ok(DiffExpr::zero());
        }
        let mut out = DiffExpr::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let d = ctx.differentiate(f, i)?;
            if !d.is_zero() {
                out += &(xi * &d);
            }
        }
        Ok(out)
    }

    /// `rho(u)(f)`.
    pub fn apply_anchor(
        ctx: &ChartContext,
        anchor: &ExprMatrix,
        u: &[DiffExpr],
        f: &DiffExpr,
    ) -> Result<DiffExpr> {
        if f.max_var().is_none() {
            return Ok(DiffExpr::zero());
        }
        apply_field(ctx, &vector_field(anchor, u), f)
    }

    pub fn format(ctx: &ChartContext, frame: &[String], u: &[DiffExpr]) -> String {
        combination(
            u.iter()
                .zip(frame)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, n)| (ctx.print(c), n.clone()))
                .collect(),
        )
    }
}

/// A frame argument, possibly multiplied by the first probe function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Arg {
    pub index: usize,
    pub scaled: bool,
}

impl Arg {
    pub fn plain(index: usize) -> Self {
        Arg {
            index,
            scaled: false,
        }
    }

    pub fn section(&self, ctx: &ChartContext, rank: usize) -> Section {
        let mut u = sections::unit(rank, self.index);
        if self.scaled {
            u[self.index] = ctx.probe(0);
        }
        u
    }

    pub fn label(&self, ctx: &ChartContext, frame: &[String]) -> String {
        if self.scaled {
            format!(
                "{}*{}",
                ctx.func_name(ctx.probe_index(0)),
                frame[self.index]
            )
        } else {
            frame[self.index].clone()
        }
    }
}

pub(crate) fn label(ctx: &ChartContext, frame: &[String], args: &[Arg]) -> String {
    let parts: Vec<String> = args.iter().map(|a| a.label(ctx, frame)).collect();
    format!("({})", parts.join(","))
}

/// Frame triples, each once plain and once with the probe in each listed slot.
pub(crate) fn triples(
    rank: usize,
    scaled_slots: &[usize],
    skip: impl Fn(usize, usize, usize) -> bool,
) -> Vec<[Arg; 3]> {
    let mut out = Vec::new();
    for a in 0..rank {
        for b in 0..rank {
            for c in 0..rank {
                if skip(a, b, c) {
                    continue;
                }
                let base = [Arg::plain(a), Arg::plain(b), Arg::plain(c)];
                out.push(base);
                for &s in scaled_slots {
                    let mut t = base;
                    t[s].scaled = true;
                    out.push(t);
                }
            }
        }
    }
    out
}

pub(crate) fn validate_frame(ctx: &ChartContext, frame: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for n in frame {
        if ctx.coord_index(n).is_some() || ctx.func_index(n).is_some() {
            return Err(Error::DuplicateName(n.clone()));
        }
        if !seen.insert(n.as_str()) {
            return Err(Error::DuplicateName(n.clone()));
        }
    }
    Ok(())
}

pub(crate) fn validate_table(table: &[Vec<Section>], r: usize, what: &str) -> Result<()> {
    let ok = table.len() == r
        && table
            .iter()
            .all(|row| row.len() == r && row.iter().all(|s| s.len() == r));
    if ok {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "{what} table must be {r} x {r} sections of length {r}"
        )))
    }
}

/// Anchored frame data with a bracket or left-symmetric product table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartAlgebroid {
    ctx: Arc<ChartContext>,
    frame: Vec<String>,
    anchor: ExprMatrix,
    structure: Vec<Vec<Section>>,
    law: Law,
    kind: AlgebroidKind,
}

impl ChartAlgebroid {
    /// `anchor` is `rank x dim` with row `a` the components of `rho(e_a)`;
    /// `structure[a][b]` holds the frame coefficients of `e_a o e_b`.
    pub fn new(
        ctx: Arc<ChartContext>,
        frame: Vec<String>,
        anchor: ExprMatrix,
        structure: Vec<Vec<Section>>,
        law: Law,
    ) -> Result<Self> {
        let r = frame.len();
        validate_frame(&ctx, &frame)?;
        if anchor.rows() != r || anchor.cols() != ctx.dim() {
            return Err(Error::Shape(format!("anchor must be {r} x {}", ctx.dim())));
        }
        validate_table(&structure, r, "structure")?;
        Ok(ChartAlgebroid {
            ctx,
            frame,
            anchor,
            structure,
            law,
            kind: AlgebroidKind::Unverified,
        })
    }

    /// The tangent algebroid `T R^n` (or `T_nabla M` when `gamma` is given as a product).
    pub fn tangent(ctx: Arc<ChartContext>) -> Self {
        let n = ctx.dim();
        let frame = ctx.coords().iter().map(|c| format!("p_{c}")).collect();
        ChartAlgebroid {
            frame,
            anchor: ExprMatrix::identity(n),
            structure: vec![vec![sections::zero(n); n]; n],
            law: Law::Bracket,
            kind: AlgebroidKind::Unverified,
            ctx,
        }
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

    pub fn structure(&self) -> &[Vec<Section>] {
        &self.structure
    }

    pub fn law(&self) -> Law {
        self.law
    }

    pub fn kind(&self) -> AlgebroidKind {
        self.kind
    }

    pub fn with_law(mut self, law: Law) -> Self {
        self.law = law;
        self.kind = AlgebroidKind::Unverified;
        self
    }

    pub fn unit(&self, a: usize) -> Section {
        sections::unit(self.rank(), a)
    }

    pub fn apply_anchor(&self, u: &[DiffExpr], f: &DiffExpr) -> Result<DiffExpr> {
        sections::apply_anchor(&self.ctx, &self.anchor, u, f)
    }

    pub fn vector_field(&self, u: &[DiffExpr]) -> Vec<DiffExpr> {
        sections::vector_field(&self.anchor, u)
    }

    pub fn format(&self, u: &[DiffExpr]) -> String {
        sections::format(&self.ctx, &self.frame, u)
    }

    /// `u o v` extended from the frame by this structure's law.
    pub fn op(&self, u: &[DiffExpr], v: &[DiffExpr]) -> Result<Section> {
        let mut out = sections::bilinear(&self.structure, u, v);
        let rv: Vec<DiffExpr> = self.vector_field(u);
        for (b, vb) in v.iter().enumerate() {
            let t = sections::apply_field(&self.ctx, &rv, vb)?;
            out[b] += &t;
        }
        if self.law == Law::Bracket {
            let rv: Vec<DiffExpr> = self.vector_field(v);
            for (b, ub) in u.iter().enumerate() {
                let t = sections::apply_field(&self.ctx, &rv, ub)?;
                out[b] -= &t;
            }
        }
        Ok(out)
    }

    /// The bracket: `op` itself for a bracket law, its commutator for a product.
    pub fn bracket(&self, u: &[DiffExpr], v: &[DiffExpr]) -> Result<Section> {
        match self.law {
            Law::Bracket => self.op(u, v),
            Law::Product => Ok(sections::sub(&self.op(u, v)?, &self.op(v, u)?)),
        }
    }

    /// Frame table of the bracket.
    pub fn bracket_table(&self) -> Vec<Vec<Section>> {
        let r = self.rank();
        (0..r)
            .map(|a| {
                (0..r)
                    .map(|b| match self.law {
                        Law::Bracket => self.structure[a][b].clone(),
                        Law::Product => sections::sub(&self.structure[a][b], &self.structure[b][a]),
                    })
                    .collect()
            })
            .collect()
    }

    /// The commutator structure as a bracket-law algebroid.
    pub fn subadjacent(&self) -> ChartAlgebroid {
        ChartAlgebroid {
            ctx: self.ctx.clone(),
            frame: self.frame.clone(),
            anchor: self.anchor.clone(),
            structure: self.bracket_table(),
            law: Law::Bracket,
            kind: AlgebroidKind::Unverified,
        }
    }

    /// Runs [`check_lie_algebroid`] and tags on success.
    pub fn into_lie(mut self) -> Result<std::result::Result<Self, CheckReport>> {
        let r = check_lie_algebroid(&self)?;
        Ok(if r.passed() {
            self.kind = AlgebroidKind::Lie;
            Ok(self)
        } else {
            Err(r)
        })
    }

    /// Runs [`check_left_symmetric_algebroid`] and tags on success.
    pub fn into_left_symmetric(mut self) -> Result<std::result::Result<Self, CheckReport>> {
        let r = check_left_symmetric_algebroid(&self)?;
        Ok(if r.passed() {
            self.kind = AlgebroidKind::LeftSymmetric;
            Ok(self)
        } else {
            Err(r)
        })
    }

    pub(crate) fn require_lie(&self) -> Result<()> {
        if self.kind == AlgebroidKind::Lie || check_lie_algebroid(self)?.passed() {
            Ok(())
        } else {
            Err(Error::Precondition("not a Lie algebroid".into()))
        }
    }

    pub(crate) fn require_left_symmetric(&self) -> Result<()> {
        if self.kind == AlgebroidKind::LeftSymmetric
            || check_left_symmetric_algebroid(self)?.passed()
        {
            Ok(())
        } else {
            Err(Error::Precondition("not a left-symmetric algebroid".into()))
        }
    }
}

/// Skew-symmetry, Jacobi on `(e_a, e_b, f e_c)`, Leibniz and the anchor
/// morphism property of the bracket.
pub fn check_lie_algebroid(l: &ChartAlgebroid) -> Result<CheckReport> {
    let ctx = &l.ctx;
    let r = l.rank();
    let table = l.bracket_table();
    let mut rep = CheckReport::new("Lie algebroid");

    let mut skew = Tally::new("algebroid.skew");
    for a in 0..r {
        for b in a..r {
            let s = sections::add(&table[a][b], &table[b][a]);
            skew.expect(
                sections::is_zero(&s),
                || label(ctx, &l.frame, &[Arg::plain(a), Arg::plain(b)]),
                || l.format(&s),
            );
        }
    }
    rep.push_tally(skew);

    let f = ctx.probe(0);
    let mut jac = Tally::new("algebroid.jacobi");
    for t in triples(r, &[2], |a, b, _| a >= b) {
        let [x, y, z] = t.map(|a| a.section(ctx, r));
        let j1 = l.bracket(&x, &l.bracket(&y, &z)?)?;
        let j2 = l.bracket(&y, &l.bracket(&z, &x)?)?;
        let j3 = l.bracket(&z, &l.bracket(&x, &y)?)?;
        let s = sections::add(&sections::add(&j1, &j2), &j3);
        jac.expect(
            sections::is_zero(&s),
            || label(ctx, &l.frame, &t),
            || l.format(&s),
        );
    }
    rep.push_tally(jac);

    let mut leib = Tally::new("algebroid.leibniz");
    for a in 0..r {
        for b in 0..r {
            let x = l.unit(a);
            let y = l.unit(b);
            let lhs = l.bracket(&x, &sections::scale(&f, &y))?;
            let mut rhs = sections::scale(&f, &l.bracket(&x, &y)?);
            sections::axpy(&mut rhs, &l.apply_anchor(&x, &f)?, &y);
            let s = sections::sub(&lhs, &rhs);
            leib.expect(
                sections::is_zero(&s),
                || {
                    label(
                        ctx,
                        &l.frame,
                        &[
                            Arg::plain(a),
                            Arg {
                                index: b,
                                scaled: true,
                            },
                        ],
                    )
                },
                || l.format(&s),
            );
        }
    }
    rep.push_tally(leib);

    let mut morph = Tally::new("algebroid.anchor_morphism");
    for a in 0..r {
        for b in a + 1..r {
            let br = l.bracket(&l.unit(a), &l.unit(b))?;
            let lhs = l.vector_field(&br);
            let xa = l.vector_field(&l.unit(a));
            let xb = l.vector_field(&l.unit(b));
            let mut res = Vec::with_capacity(ctx.dim());
            for i in 0..ctx.dim() {
                let comm = &sections::apply_field(ctx, &xa, &xb[i])?
                    - &sections::apply_field(ctx, &xb, &xa[i])?;
                res.push(&lhs[i] - &comm);
            }
            morph.expect(
                sections::is_zero(&res),
                || label(ctx, &l.frame, &[Arg::plain(a), Arg::plain(b)]),
                || {
                    let names: Vec<String> =
                        ctx.coords().iter().map(|c| format!("p_{c}")).collect();
                    sections::format(ctx, &names, &res)
                },
            );
        }
    }
    rep.push_tally(morph);
    Ok(rep)
}

/// Conditions of a left-symmetric algebroid evaluated with the structure's
/// own law: Leibniz in the second slot, tensoriality in the first, and
/// associator symmetry on frame triples with probe multiples.
pub fn check_left_symmetric_algebroid(a: &ChartAlgebroid) -> Result<CheckReport> {
    let ctx = &a.ctx;
    let r = a.rank();
    let f = ctx.probe(0);
    let mut rep = CheckReport::new("left-symmetric algebroid");

    let mut left = Tally::new("lsalgebroid.left_leibniz");
    let mut lin = Tally::new("lsalgebroid.left_linear");
    for i in 0..r {
        for j in 0..r {
            let x = a.unit(i);
            let y = a.unit(j);
            let xy = a.op(&x, &y)?;
            let lhs = a.op(&x, &sections::scale(&f, &y))?;
            let mut rhs = sections::scale(&f, &xy);
            sections::axpy(&mut rhs, &a.apply_anchor(&x, &f)?, &y);
            let s = sections::sub(&lhs, &rhs);
            left.expect(
                sections::is_zero(&s),
                || {
                    label(
                        ctx,
                        &a.frame,
                        &[
                            Arg::plain(i),
                            Arg {
                                index: j,
                                scaled: true,
                            },
                        ],
                    )
                },
                || a.format(&s),
            );
            let s = sections::sub(
                &a.op(&sections::scale(&f, &x), &y)?,
                &sections::scale(&f, &xy),
            );
            lin.expect(
                sections::is_zero(&s),
                || {
                    label(
                        ctx,
                        &a.frame,
                        &[
                            Arg {
                                index: i,
                                scaled: true,
                            },
                            Arg::plain(j),
                        ],
                    )
                },
                || a.format(&s),
            );
        }
    }
    rep.push_tally(left);
    rep.push_tally(lin);

    let mut assoc = Tally::new("lsalgebroid.associator");
    for t in triples(r, &[0, 2], |p, q, _| p >= q) {
        let [x, y, z] = t.map(|s| s.section(ctx, r));
        let l1 = sections::sub(&a.op(&x, &a.op(&y, &z)?)?, &a.op(&a.op(&x, &y)?, &z)?);
        let l2 = sections::sub(&a.op(&y, &a.op(&x, &z)?)?, &a.op(&a.op(&y, &x)?, &z)?);
        let s = sections::sub(&l1, &l2);
        assoc.expect(
            sections::is_zero(&s),
            || label(ctx, &a.frame, &t),
            || a.format(&s),
        );
    }
    rep.push_tally(assoc);
    Ok(rep)
}

/// An antisymmetric form of degree `k`, stored on strictly increasing index tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormField {
    degree: usize,
    rank: usize,
    comps: BTreeMap<Vec<usize>, DiffExpr>,
}

fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut neg = false;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                neg = !neg;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, neg))
}

impl FormField {
    pub fn zero(degree: usize, rank: usize) -> Self {
        FormField {
            degree,
            rank,
            comps: BTreeMap::new(),
        }
    }

    /// Builds from values on increasing index tuples.
    pub fn from_fn(degree: usize, rank: usize, f: impl Fn(&[usize]) -> DiffExpr) -> Self {
        let mut w = FormField::zero(degree, rank);
        for idx in 0..rank.pow(degree as u32) {
            let t = tuple_of(idx, degree, rank);
            if t.windows(2).all(|p| p[0] < p[1]) {
                let v = f(&t);
                if !v.is_zero() {
                    w.comps.insert(t, v);
                }
            }
        }
        w
    }

    pub fn from_covector(xi: &[DiffExpr]) -> Self {
        FormField::from_fn(1, xi.len(), |t| xi[t[0]].clone())
    }

    /// A 2-form from the upper triangle of `m`; `m` must be skew.
    pub fn from_matrix(m: &ExprMatrix) -> Result<Self> {
        if !m.is_square() || !m.add(&m.transpose()).is_zero() {
            return Err(Error::Shape("2-form matrix must be square and skew".into()));
        }
        Ok(FormField::from_fn(2, m.rows(), |t| {
            m.get(t[0], t[1]).clone()
        }))
    }

    pub fn to_matrix(&self) -> ExprMatrix {
        assert_eq!(self.degree, 2);
        ExprMatrix::from_fn(self.rank, self.rank, |a, b| self.get(&[a, b]))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, idx: &[usize]) -> DiffExpr {
        assert_eq!(idx.len(), self.degree);
        match sort_sign(idx) {
            None => DiffExpr::zero(),
            Some((k, neg)) => {
                let v = self.comps.get(&k).cloned().unwrap_or_default();
                if neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(DiffExpr::is_zero)
    }

    /// Nonzero components on increasing tuples.
    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &DiffExpr)> {
        self.comps.iter()
    }
}

/// The algebroid differential.
pub fn de_rham_d(l: &ChartAlgebroid, w: &FormField) -> Result<FormField> {
    let r = l.rank();
    if w.rank != r {
        return Err(Error::Shape("form rank differs from algebroid rank".into()));
    }
    let k = w.degree;
    if k + 1 > r {
        return Err(Error::Shape(format!(
            "degree {} exceeds the rank {r}",
            k + 1
        )));
    }
    let table = l.bracket_table();
    let mut out = FormField::zero(k + 1, r);
    for idx in 0..r.pow(k as u32 + 1) {
        let x = tuple_of(idx, k + 1, r);
        if !x.windows(2).all(|p| p[0] < p[1]) {
            continue;
        }
        let mut acc = DiffExpr::zero();
        for p in 0..=k {
            let mut rest = x.clone();
            rest.remove(p);
            let t = l.apply_anchor(&l.unit(x[p]), &w.get(&rest))?;
            if p % 2 == 0 {
                acc += &t;
            } else {
                acc -= &t;
            }
        }
        for p in 0..=k {
            for q in p + 1..=k {
                let mut rest = vec![0];
                rest.extend(
                    x.iter()
                        .enumerate()
                        .filter(|&(s, _)| s != p && s != q)
                        .map(|(_, &e)| e),
                );
                for (c, coef) in table[x[p]][x[q]].iter().enumerate() {
                    if coef.is_zero() {
                        continue;
                    }
                    rest[0] = c;
                    let t = coef * &w.get(&rest);
                    if (p + q) % 2 == 0 {
                        acc += &t;
                    } else {
                        acc -= &t;
                    }
                }
            }
        }
        if !acc.is_zero() {
            out.comps.insert(x, acc);
        }
    }
    Ok(out)
}

/// `d w = 0` for a 2-form.
pub fn check_2cocycle(l: &ChartAlgebroid, w: &FormField) -> Result<CheckReport> {
    if w.degree != 2 {
        return Err(Error::Shape("a 2-cocycle has degree 2".into()));
    }
    let mut rep = CheckReport::new("2-cocycle");
    let mut t = Tally::new("algebroid.cocycle");
    if l.rank() >= 3 {
        let dw = de_rham_d(l, w)?;
        for (idx, v) in dw.components() {
            let args: Vec<Arg> = idx.iter().map(|&i| Arg::plain(i)).collect();
            t.fail(label(&l.ctx, &l.frame, &args), l.ctx.print(v));
        }
    }
    rep.push_tally(t);
    Ok(rep)
}

/// `<L_{e_a} xi, e_b> = rho(e_a)<xi, e_b> - <xi, [e_a, e_b]>`.
pub fn lie_derivative(l: &ChartAlgebroid, a: usize, xi: &[DiffExpr]) -> Result<Vec<DiffExpr>> {
    lie_derivative_along(l, &l.unit(a), xi)
}

/// Lie derivative along a general section.
pub fn lie_derivative_along(
    l: &ChartAlgebroid,
    u: &[DiffExpr],
    xi: &[DiffExpr],
) -> Result<Vec<DiffExpr>> {
    let r = l.rank();
    if xi.len() != r || u.len() != r {
        return Err(Error::Shape("covector length differs from rank".into()));
    }
    (0..r)
        .map(|b| {
            let br = l.bracket(u, &l.unit(b))?;
            let pair: DiffExpr = xi.iter().zip(&br).map(|(p, q)| p * q).sum();
            Ok(&l.apply_anchor(u, &xi[b])? - &pair)
        })
        .collect()
}

/// Scalar cochain of a left-symmetric algebroid with coefficients in the
/// expression ring, stored on all index tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartCochain {
    degree: usize,
    rank: usize,
    data: Vec<DiffExpr>,
}

impl ChartCochain {
    pub fn from_fn(degree: usize, rank: usize, f: impl Fn(&[usize]) -> DiffExpr) -> Self {
        ChartCochain {
            degree,
            rank,
            data: (0..rank.pow(degree as u32))
                .map(|i| f(&tuple_of(i, degree, rank)))
                .collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, idx: &[usize]) -> &DiffExpr {
        &self.data[tuple_index(idx, self.rank)]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(DiffExpr::is_zero)
    }

    /// Nonzero entries with their index tuples.
    pub fn nonzero(&self) -> Vec<(Vec<usize>, &DiffExpr)> {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (tuple_of(i, self.degree, self.rank), v))
            .collect()
    }
}

/// Trivial-coefficient coboundary of a left-symmetric algebroid, read from
/// the frame product table and anchor.
pub fn lsa_coboundary(a: &ChartAlgebroid, phi: &ChartCochain) -> Result<ChartCochain> {
    let r = a.rank();
    if phi.rank != r || phi.degree == 0 {
        return Err(Error::Shape("cochain shape differs from algebroid".into()));
    }
    if a.law != Law::Product {
        return Err(Error::Precondition(
            "coboundary needs a product table".into(),
        ));
    }
    let n = phi.degree;
    let br = a.bracket_table();
    let mut data = Vec::with_capacity(r.pow(n as u32 + 1));
    for idx in 0..r.pow(n as u32 + 1) {
        let x = tuple_of(idx, n + 1, r);
        let last = x[n];
        let mut acc = DiffExpr::zero();
        for i in 0..n {
            let sign_pos = i % 2 == 0;
            let mut rest = x.clone();
            rest.remove(i);
            let t = a.apply_anchor(&a.unit(x[i]), phi.get(&rest))?;
            if sign_pos {
                acc += &t;
            } else {
                acc -= &t;
            }
            let mut head: Vec<usize> = x[..n].to_vec();
            head.remove(i);
            head.push(0);
            for (m, c) in a.structure[x[i]][last].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                *head.last_mut().expect("nonempty") = m;
                let t = c * phi.get(&head);
                if sign_pos {
                    acc -= &t;
                } else {
                    acc += &t;
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let mut tail = vec![0];
                tail.extend(
                    x.iter()
                        .enumerate()
                        .filter(|&(p, _)| p != i && p != j)
                        .map(|(_, &e)| e),
                );
                for (m, c) in br[x[i]][x[j]].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    tail[0] = m;
                    let t = c * phi.get(&tail);
                    if (i + j) % 2 == 0 {
                        acc += &t;
                    } else {
                        acc -= &t;
                    }
                }
            }
        }
        data.push(acc);
    }
    Ok(ChartCochain {
        degree: n + 1,
        rank: r,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> ChartAlgebroid {
        let ctx = Arc::new(ChartContext::new(&["x", "y", "z"], &[]).unwrap());
        let p = |s: &str| ctx.parse(s).unwrap();
        let anchor = ExprMatrix::from_rows(vec![
            vec![p("y"), p("-x"), p("0")],
            vec![p("0"), p("z"), p("-y")],
        ]);
        let c12 = vec![p("-z/y"), p("-x/y")];
        let c21 = vec![p("z/y"), p("x/y")];
        let z = vec![p("0"), p("0")];
        ChartAlgebroid::new(
            ctx.clone(),
            vec!["e1".into(), "e2".into()],
            anchor,
            vec![vec![z.clone(), c12], vec![c21, z]],
            Law::Bracket,
        )
        .unwrap()
    }

    #[test]
    fn sphere_is_lie_and_form_closed() {
        let l = sphere();
        assert!(check_lie_algebroid(&l).unwrap().passed());
        let y = l.ctx().parse("y").unwrap();
        let w = FormField::from_fn(2, 2, |_| y.clone());
        assert!(check_2cocycle(&l, &w).unwrap().passed());
    }

    #[test]
    fn perturbed_sphere_fails() {
        let l = sphere();
        let ctx = l.ctx().clone();
        let mut s = l.structure().to_vec();
        s[0][1][0] = ctx.parse("-(z+1)/y").unwrap();
        s[1][0][0] = ctx.parse("(z+1)/y").unwrap();
        let bad = ChartAlgebroid::new(ctx, l.frame().to_vec(), l.anchor().clone(), s, Law::Bracket)
            .unwrap();
        let r = check_lie_algebroid(&bad).unwrap();
        assert!(!r.passed());
        assert!(r.failed_ids().contains(&"algebroid.anchor_morphism"));
    }

    #[test]
    fn one_form_differential() {
        let ctx = Arc::new(ChartContext::new(&["x", "y"], &[]).unwrap());
        let l = ChartAlgebroid::tangent(ctx.clone());
        let f = ctx.probe(0);
        let w = FormField::from_covector(&[f, DiffExpr::zero()]);
        let dw = de_rham_d(&l, &w).unwrap();
        // d(f dx) = -f_y dx^dy
        assert_eq!(ctx.print(&dw.get(&[0, 1])), "-d(f,y)");
    }

    #[test]
    fn lie_derivative_along_coordinate() {
        let ctx = Arc::new(ChartContext::new(&["x", "y"], &["g"]).unwrap());
        let l = ChartAlgebroid::tangent(ctx.clone());
        let g = ctx.parse("g").unwrap();
        let out = lie_derivative(&l, 0, &[g, DiffExpr::zero()]).unwrap();
        assert_eq!(out[0], ctx.parse("d(g,x)").unwrap());
        assert!(out[1].is_zero());
    }
}

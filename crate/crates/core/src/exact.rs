//! Exact pre-symplectic algebroids over a flat chart `(M, nabla)`.
//!
//! Frames follow the pseudo-semidirect layout: `p_x1..p_xn` for `TM`
//! followed by `dx1..dxn` for `T*M`.

use std::sync::Arc;

use crate::algebroid::{
    label, lsa_coboundary, sections, Arg, ChartAlgebroid, ChartCochain, Law, Section,
};
use crate::error::{Error, Result};
use crate::expr::{ChartContext, DiffExpr};
use crate::linalg::ExprMatrix;
use crate::presym::{check_presymplectic, pseudo_semidirect, PreSymStructure};
use crate::report::{CheckReport, Tally};

type Tensor3 = Vec<Vec<Vec<DiffExpr>>>;

fn zeros3(n: usize) -> Tensor3 {
    vec![vec![vec![DiffExpr::zero(); n]; n]; n]
}

fn coord_label(ctx: &ChartContext, idx: &[usize]) -> String {
    let names: Vec<&str> = idx.iter().map(|&i| ctx.coords()[i].as_str()).collect();
    format!("({})", names.join(","))
}

/// A torsion-free flat connection in coordinates:
/// `nabla_{p_i} p_j = sum_k gamma[i][j][k] p_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatConnection {
    ctx: Arc<ChartContext>,
    gamma: Tensor3,
}

impl FlatConnection {
    pub fn new(ctx: Arc<ChartContext>, gamma: Tensor3) -> Result<Self> {
        let n = ctx.dim();
        if gamma.len() != n
            || gamma
                .iter()
                .any(|r| r.len() != n || r.iter().any(|s| s.len() != n))
        {
            return Err(Error::Shape(format!(
                "Christoffel symbols must be {n} x {n} x {n}"
            )));
        }
        Ok(FlatConnection { ctx, gamma })
    }

    /// The coordinate connection, all symbols zero.
    pub fn trivial(ctx: Arc<ChartContext>) -> Self {
        let n = ctx.dim();
        FlatConnection {
            ctx,
            gamma: zeros3(n),
        }
    }

    pub fn ctx(&self) -> &Arc<ChartContext> {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &DiffExpr {
        &self.gamma[i][j][k]
    }

    /// `nabla_u v` for vector fields in coordinate components.
    pub fn covariant(&self, u: &[DiffExpr], v: &[DiffExpr]) -> Result<Vec<DiffExpr>> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = sections::apply_field(&self.ctx, u, &v[k])?;
            for i in 0..n {
                if u[i].is_zero() {
                    continue;
                }
                for j in 0..n {
                    if !v[j].is_zero() && !self.gamma[i][j][k].is_zero() {
                        acc += &(&(&u[i] * &v[j]) * &self.gamma[i][j][k]);
                    }
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Torsion and curvature residuals.
    pub fn check(&self) -> Result<CheckReport> {
        let ctx = &self.ctx;
        let n = self.dim();
        let g = &self.gamma;
        let mut rep = CheckReport::new("flat connection");
        let mut tor = Tally::new("exact.connection_torsion");
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let res = &g[i][j][k] - &g[j][i][k];
                    tor.expect(
                        res.is_zero(),
                        || coord_label(ctx, &[i, j, k]),
                        || ctx.print(&res),
                    );
                }
            }
        }
        rep.push_tally(tor);
        let mut flat = Tally::new("exact.connection_flat");
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut res = &ctx.differentiate(&g[j][k][l], i)?
                            - &ctx.differentiate(&g[i][k][l], j)?;
                        for m in 0..n {
                            res += &(&g[j][k][m] * &g[i][m][l]);
                            res -= &(&g[i][k][m] * &g[j][m][l]);
                        }
                        flat.expect(
                            res.is_zero(),
                            || coord_label(ctx, &[i, j, k, l]),
                            || ctx.print(&res),
                        );
                    }
                }
            }
        }
        rep.push_tally(flat);
        Ok(rep)
    }

    /// `T_nabla M` with frame `p_x..` and the connection as product.
    pub fn to_algebroid(&self) -> Result<ChartAlgebroid> {
        let t = ChartAlgebroid::tangent(self.ctx.clone());
        ChartAlgebroid::new(
            self.ctx.clone(),
            t.frame().to_vec(),
            ExprMatrix::identity(self.dim()),
            self.gamma.clone(),
            Law::Product,
        )
    }
}

/// `phi(p_i, p_j)(p_k)`, stored without symmetry assumptions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiTensor {
    comps: Tensor3,
}

impl PhiTensor {
    pub fn new(comps: Tensor3) -> Result<Self> {
        let n = comps.len();
        if comps
            .iter()
            .any(|r| r.len() != n || r.iter().any(|s| s.len() != n))
        {
            return Err(Error::Shape("phi must be a cube of components".into()));
        }
        Ok(PhiTensor { comps })
    }

    pub fn zero(n: usize) -> Self {
        PhiTensor { comps: zeros3(n) }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> DiffExpr) -> Self {
        PhiTensor {
            comps: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| f(i, j, k)).collect())
                        .collect()
                })
                .collect(),
        }
    }

    /// The tensor with `phi~(x,y,z) = phi(x,z,y)`; the map is an involution.
    pub fn from_tilde(tilde: &PhiTensor) -> Self {
        tilde.reshuffle()
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &DiffExpr {
        &self.comps[i][j][k]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().flatten().flatten().all(DiffExpr::is_zero)
    }

    /// `phi~(x,y,z) = phi(x,z,y)`.
    pub fn reshuffle(&self) -> PhiTensor {
        let n = self.dim();
        PhiTensor::from_fn(n, |i, j, k| self.comps[i][k][j].clone())
    }

    pub fn sub(&self, other: &PhiTensor) -> PhiTensor {
        let n = self.dim();
        PhiTensor::from_fn(n, |i, j, k| &self.comps[i][j][k] - &other.comps[i][j][k])
    }

    pub fn to_cochain(&self) -> ChartCochain {
        ChartCochain::from_fn(3, self.dim(), |idx| {
            self.comps[idx[0]][idx[1]][idx[2]].clone()
        })
    }

    pub fn from_cochain(c: &ChartCochain) -> Result<Self> {
        if c.degree() != 3 {
            return Err(Error::Shape("expected a 3-cochain".into()));
        }
        let n = c.rank();
        Ok(PhiTensor::from_fn(n, |i, j, k| c.get(&[i, j, k]).clone()))
    }
}

/// `delta phi~` as a 4-tensor, expanded directly in coordinates.
///
/// Coordinate fields commute, so only the anchor and product terms appear:
/// `sum_{i<=3} (-1)^{i+1} (p_i psi(..^i.., p_4) - psi(..^i.., nabla_i p_4))`.
pub fn delta_tilde(
    nabla: &FlatConnection,
    phi: &PhiTensor,
) -> Result<Vec<((usize, usize, usize, usize), DiffExpr)>> {
    let ctx = &nabla.ctx;
    let n = nabla.dim();
    let psi = phi.reshuffle();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut acc = DiffExpr::zero();
                    let slots = [(a, [b, c]), (b, [a, c]), (c, [a, b])];
                    for (s, (i, rest)) in slots.into_iter().enumerate() {
                        let mut term = ctx.differentiate(psi.get(rest[0], rest[1], d), i)?;
                        for m in 0..n {
                            let gm = nabla.gamma(i, d, m);
                            if !gm.is_zero() {
                                term -= &(psi.get(rest[0], rest[1], m) * gm);
                            }
                        }
                        if s % 2 == 0 {
                            acc += &term;
                        } else {
                            acc -= &term;
                        }
                    }
                    out.push(((a, b, c, d), acc));
                }
            }
        }
    }
    Ok(out)
}

/// `delta theta` for a 2-tensor, via the algebroid coboundary.
pub fn delta_theta(nabla: &FlatConnection, theta: &ExprMatrix) -> Result<PhiTensor> {
    let n = nabla.dim();
    let a = nabla.to_algebroid()?;
    let c = ChartCochain::from_fn(2, n, |idx| theta.get(idx[0], idx[1]).clone());
    PhiTensor::from_cochain(&lsa_coboundary(&a, &c)?)
}

/// Identities required of `phi` and the closedness of `phi~`.
pub fn check_phi(nabla: &FlatConnection, phi: &PhiTensor) -> Result<CheckReport> {
    let ctx = &nabla.ctx;
    let n = nabla.dim();
    if phi.dim() != n {
        return Err(Error::Shape(format!("phi must have dimension {n}")));
    }
    let mut rep = CheckReport::new("twisting tensor");
    let mut skew = Tally::new("exact.phi_13skew");
    let mut ii = Tally::new("exact.phi_ii");
    let mut cyc = Tally::new("exact.phi_cyclic");
    let psi = phi.reshuffle();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let at = || coord_label(ctx, &[i, j, k]);
                let res = phi.get(i, j, k) + phi.get(k, j, i);
                skew.expect(res.is_zero(), at, || ctx.print(&res));
                let res = &(phi.get(i, j, k) - phi.get(i, k, j)) + phi.get(k, i, j);
                ii.expect(res.is_zero(), at, || ctx.print(&res));
                let res = &(psi.get(i, j, k) + psi.get(j, k, i)) + psi.get(k, i, j);
                cyc.expect(res.is_zero(), at, || ctx.print(&res));
            }
        }
    }
    rep.push_tally(skew);
    rep.push_tally(ii);
    rep.push_tally(cyc);

    // Two independent routes to delta phi~ must agree and vanish.
    let mut closed = Tally::new("exact.phi_closed");
    let direct = delta_tilde(nabla, phi)?;
    let via = lsa_coboundary(&nabla.to_algebroid()?, &psi.to_cochain())?;
    for ((a, b, c, d), v) in direct {
        let other = via.get(&[a, b, c, d]);
        if &v != other {
            closed.fail(
                coord_label(ctx, &[a, b, c, d]),
                format!("routes disagree: {} vs {}", ctx.print(&v), ctx.print(other)),
            );
        } else {
            closed.expect(
                v.is_zero(),
                || coord_label(ctx, &[a, b, c, d]),
                || ctx.print(&v),
            );
        }
    }
    rep.push_tally(closed);
    Ok(rep)
}

/// The pseudo-semidirect product of `T_nabla M` twisted by `phi`.
pub fn twisted_product(nabla: &FlatConnection, phi: &PhiTensor) -> Result<PreSymStructure> {
    let n = nabla.dim();
    if phi.dim() != n {
        return Err(Error::Shape(format!("phi must have dimension {n}")));
    }
    let base = pseudo_semidirect(&nabla.to_algebroid()?)?;
    if phi.is_zero() {
        return Ok(base);
    }
    let mut star = base.star_table().to_vec();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                star[i][j][n + k] += phi.get(i, j, k);
            }
        }
    }
    PreSymStructure::new(
        base.ctx().clone(),
        base.frame().to_vec(),
        base.anchor().clone(),
        star,
        base.pairing().clone(),
    )
}

/// An isotropic splitting: row `i` holds `sigma(p_i)` in the frame of `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub sigma: ExprMatrix,
}

impl Splitting {
    pub fn new(sigma: ExprMatrix) -> Self {
        Splitting { sigma }
    }

    /// `sigma(p_i) = p_i + sum_k theta[i][k] dx_k` in the pseudo-semidirect layout.
    pub fn from_theta(theta: &ExprMatrix) -> Self {
        let n = theta.rows();
        Splitting {
            sigma: ExprMatrix::from_fn(n, 2 * n, |i, c| {
                if c < n {
                    if c == i {
                        DiffExpr::one()
                    } else {
                        DiffExpr::zero()
                    }
                } else {
                    theta.get(i, c - n).clone()
                }
            }),
        }
    }

    pub fn canonical(n: usize) -> Self {
        Self::from_theta(&ExprMatrix::zeros(n, n))
    }

    /// `sigma` of a vector field.
    pub fn apply(&self, v: &[DiffExpr]) -> Section {
        self.sigma.transpose().mul_vec(v)
    }

    fn row(&self, i: usize) -> Section {
        self.sigma.row(i).to_vec()
    }
}

fn covector_label(ctx: &ChartContext, xi: &[DiffExpr]) -> String {
    let names: Vec<String> = ctx.coords().iter().map(|c| format!("d{c}")).collect();
    sections::format(ctx, &names, xi)
}

/// Exactness of the anchor sequence and compatibility of `rho` with `nabla`.
pub fn check_exact(e: &PreSymStructure, nabla: &FlatConnection) -> Result<CheckReport> {
    let ctx = e.ctx().clone();
    let n = nabla.dim();
    let r = e.rank();
    let mut rep = nabla.check()?;
    rep.artifact = "exact pre-symplectic algebroid".into();
    let mut rank = Tally::new("exact.rank");
    if r != 2 * n {
        rank.fail(format!("rank {r}"), format!("expected {}", 2 * n));
    }
    rep.push_tally(rank);

    let mut surj = Tally::new("exact.anchor_surjective");
    let arank = e.anchor().rank();
    if arank != n {
        surj.fail("anchor", format!("rank {arank}, expected {n}"));
    }
    rep.push_tally(surj);

    let mut ki = Tally::new("exact.kernel_image");
    let images: Vec<Section> = (0..n).map(|k| e.rho_star(&sections::unit(n, k))).collect();
    for (k, s) in images.iter().enumerate() {
        let v = e.vector_field(s);
        ki.expect(
            sections::is_zero(&v),
            || format!("(d{})", ctx.coords()[k]),
            || covector_label(&ctx, &v),
        );
    }
    let irank = ExprMatrix::from_fn(r, n, |i, j| images[j][i].clone()).rank();
    if irank + n != r {
        ki.fail(
            "rho*",
            format!("image rank {irank}, kernel rank {}", r - arank),
        );
    }
    rep.push_tally(ki);

    let mut conn = Tally::new("exact.anchor_connection");
    for t in triples_2(r) {
        let [u, v] = t.map(|s| s.section(&ctx, r));
        let lhs = e.vector_field(&e.star(&u, &v)?);
        let rhs = nabla.covariant(&e.vector_field(&u), &e.vector_field(&v))?;
        let res = sections::sub(&lhs, &rhs);
        conn.expect(
            sections::is_zero(&res),
            || label(&ctx, e.frame(), &t),
            || covector_label(&ctx, &res),
        );
    }
    rep.push_tally(conn);
    Ok(rep)
}

fn triples_2(r: usize) -> Vec<[Arg; 2]> {
    let mut out = Vec::new();
    for a in 0..r {
        for b in 0..r {
            let base = [Arg::plain(a), Arg::plain(b)];
            out.push(base);
            for s in 0..2 {
                let mut t = base;
                t[s].scaled = true;
                out.push(t);
            }
        }
    }
    out
}

/// Splitting conditions: `rho o sigma = id` and isotropy.
pub fn check_splitting(e: &PreSymStructure, sigma: &Splitting) -> Result<CheckReport> {
    let ctx = e.ctx().clone();
    let n = ctx.dim();
    if sigma.sigma.rows() != n || sigma.sigma.cols() != e.rank() {
        return Err(Error::Shape(format!(
            "splitting must be {n} x {}",
            e.rank()
        )));
    }
    let mut rep = CheckReport::new("splitting");
    let mut split = Tally::new("exact.splitting");
    let mut iso = Tally::new("exact.splitting_isotropic");
    for i in 0..n {
        let v = sections::sub(&e.vector_field(&sigma.row(i)), &sections::unit(n, i));
        split.expect(
            sections::is_zero(&v),
            || coord_label(&ctx, &[i]),
            || covector_label(&ctx, &v),
        );
        for j in i + 1..n {
            let p = e.pair(&sigma.row(i), &sigma.row(j));
            iso.expect(p.is_zero(), || coord_label(&ctx, &[i, j]), || ctx.print(&p));
        }
    }
    rep.push_tally(split);
    rep.push_tally(iso);
    Ok(rep)
}

/// `phi(u, v)(p_m) = (sigma(u) * sigma(v) - sigma(nabla_u v), sigma(p_m))_-` on vector fields.
fn phi_on_fields(
    e: &PreSymStructure,
    nabla: &FlatConnection,
    sigma: &Splitting,
    u: &[DiffExpr],
    v: &[DiffExpr],
) -> Result<(Section, Vec<DiffExpr>)> {
    let n = nabla.dim();
    let lhs = sections::sub(
        &e.star(&sigma.apply(u), &sigma.apply(v))?,
        &sigma.apply(&nabla.covariant(u, v)?),
    );
    let comps = (0..n).map(|m| e.pair(&lhs, &sigma.row(m))).collect();
    Ok((lhs, comps))
}

/// Recovers the twisting tensor of an exact structure from an isotropic
/// splitting, together with the checks that justify it.
pub fn extract_phi(
    e: &PreSymStructure,
    nabla: &FlatConnection,
    sigma: &Splitting,
) -> Result<(PhiTensor, CheckReport)> {
    let ctx = e.ctx().clone();
    let n = nabla.dim();
    let split = check_splitting(e, sigma)?;
    if let Some(id) = split.failed_ids().first() {
        return Err(Error::Precondition(match *id {
            "exact.splitting" => "sigma is not a splitting of the anchor".into(),
            _ => "sigma is not isotropic".into(),
        }));
    }
    let mut comps = zeros3(n);
    let mut image = Tally::new("exact.phi_image");
    for i in 0..n {
        for j in 0..n {
            let (lhs, c) = phi_on_fields(
                e,
                nabla,
                sigma,
                &sections::unit(n, i),
                &sections::unit(n, j),
            )?;
            let res = sections::sub(&lhs, &e.rho_star(&c));
            image.expect(
                sections::is_zero(&res),
                || coord_label(&ctx, &[i, j]),
                || e.format(&res),
            );
            comps[i][j] = c;
        }
    }
    let phi = PhiTensor { comps };
    let mut rep = CheckReport::new("extracted twisting tensor");
    rep.push_tally(image);

    let f = ctx.probe(0);
    let mut tens = Tally::new("exact.phi_tensorial");
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (sections::unit(n, i), sections::unit(n, j));
            let expect: Vec<DiffExpr> = (0..n).map(|m| &f * phi.get(i, j, m)).collect();
            for (sa, sb) in [(true, false), (false, true)] {
                let u = if sa {
                    sections::scale(&f, &x)
                } else {
                    x.clone()
                };
                let v = if sb {
                    sections::scale(&f, &y)
                } else {
                    y.clone()
                };
                let (_, got) = phi_on_fields(e, nabla, sigma, &u, &v)?;
                let res = sections::sub(&got, &expect);
                tens.expect(
                    sections::is_zero(&res),
                    || {
                        let t = [
                            Arg {
                                index: i,
                                scaled: sa,
                            },
                            Arg {
                                index: j,
                                scaled: sb,
                            },
                        ];
                        label(&ctx, ctx.coords(), &t)
                    },
                    || covector_label(&ctx, &res),
                );
            }
        }
    }
    rep.push_tally(tens);
    rep.extend(check_phi(nabla, &phi)?);
    Ok((phi, rep))
}

/// Whether `x + xi -> x + theta(x) + xi` is an isomorphism from `e1` to `e2`.
pub fn splitting_equivalence(
    e1: &PreSymStructure,
    e2: &PreSymStructure,
    theta: &ExprMatrix,
) -> Result<CheckReport> {
    let ctx = e1.ctx().clone();
    let n = ctx.dim();
    let r = 2 * n;
    if e1.rank() != r || e2.rank() != r || theta.rows() != n || theta.cols() != n {
        return Err(Error::Shape(format!(
            "expected rank {r} structures and an {n} x {n} tensor"
        )));
    }
    if !theta.sub(&theta.transpose()).is_zero() {
        return Err(Error::Precondition("theta is not symmetric".into()));
    }
    let mut rep = CheckReport::new("splitting equivalence");
    rep.push_tally(Tally::new("exact.theta_symmetric"));
    let psi = |u: &[DiffExpr]| -> Section {
        let mut out = u.to_vec();
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for k in 0..n {
                if !theta.get(i, k).is_zero() {
                    out[n + k] += &(&u[i] * theta.get(i, k));
                }
            }
        }
        out
    };
    let mut anchor = Tally::new("exact.equiv_anchor");
    let mut pairing = Tally::new("exact.equiv_pairing");
    let mut star = Tally::new("exact.equiv_star");
    for a in 0..r {
        let ua = e1.unit(a);
        let res = sections::sub(&e2.vector_field(&psi(&ua)), &e1.vector_field(&ua));
        anchor.expect(
            sections::is_zero(&res),
            || format!("({})", e1.frame()[a]),
            || covector_label(&ctx, &res),
        );
        for b in 0..r {
            let ub = e1.unit(b);
            let res = &e2.pair(&psi(&ua), &psi(&ub)) - &e1.pair(&ua, &ub);
            pairing.expect(
                res.is_zero(),
                || label(&ctx, e1.frame(), &[Arg::plain(a), Arg::plain(b)]),
                || ctx.print(&res),
            );
            let res = sections::sub(&psi(&e1.star(&ua, &ub)?), &e2.star(&psi(&ua), &psi(&ub))?);
            star.expect(
                sections::is_zero(&res),
                || label(&ctx, e1.frame(), &[Arg::plain(a), Arg::plain(b)]),
                || e2.format(&res),
            );
        }
    }
    rep.push_tally(anchor);
    rep.push_tally(pairing);
    rep.push_tally(star);
    Ok(rep)
}

/// Full exactness suite for a twist: the tensor identities, the
/// pre-symplectic axioms of the twisted product and its exactness.
pub fn check_twist(
    nabla: &FlatConnection,
    phi: &PhiTensor,
) -> Result<(PreSymStructure, CheckReport)> {
    let e = twisted_product(nabla, phi)?;
    let mut rep = check_phi(nabla, phi)?;
    rep.extend(check_presymplectic(&e)?);
    rep.extend(check_exact(&e, nabla)?);
    Ok((e, rep))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> FlatConnection {
        FlatConnection::trivial(Arc::new(ChartContext::new(&["x", "y"], &[]).unwrap()))
    }

    #[test]
    fn canonical_splitting_gives_zero() {
        let nabla = plane();
        let e = twisted_product(&nabla, &PhiTensor::zero(2)).unwrap();
        let (phi, rep) = extract_phi(&e, &nabla, &Splitting::canonical(2)).unwrap();
        assert!(phi.is_zero());
        assert!(rep.passed(), "{}", rep.to_text(false));
        assert!(check_exact(&e, &nabla).unwrap().passed());
    }

    #[test]
    fn shifted_splitting_shifts_by_delta_theta() {
        let nabla = plane();
        let ctx = nabla.ctx().clone();
        let p = |s: &str| ctx.parse(s).unwrap();
        let theta =
            ExprMatrix::from_rows(vec![vec![p("x^2*y"), p("x*y")], vec![p("x*y"), p("y^3")]]);
        let e = pseudo_semidirect(&nabla.to_algebroid().unwrap()).unwrap();
        let (phi, rep) = extract_phi(&e, &nabla, &Splitting::from_theta(&theta)).unwrap();
        assert!(rep.passed(), "{}", rep.to_text(false));
        assert_eq!(phi.reshuffle(), delta_theta(&nabla, &theta).unwrap());
        // phi~_ijk = d_i theta_jk - d_j theta_ik on flat coordinates
        assert_eq!(ctx.print(phi.reshuffle().get(0, 1, 0)), "-x^2 + y");

        let twisted = twisted_product(&nabla, &phi).unwrap();
        assert!(check_presymplectic(&twisted).unwrap().passed());
        assert!(splitting_equivalence(&twisted, &e, &theta)
            .unwrap()
            .passed());
        let wrong =
            splitting_equivalence(&twisted, &e, &theta.map(|t| t * DiffExpr::from_int(2))).unwrap();
        assert!(!wrong.passed());
    }

    #[test]
    fn non_closed_twist_fails_in_dimension_three() {
        let ctx = Arc::new(ChartContext::new(&["x", "y", "z"], &[]).unwrap());
        let nabla = FlatConnection::trivial(ctx.clone());
        let x = ctx.parse("x").unwrap();
        let mut tilde = PhiTensor::zero(3);
        for (i, j, k, s) in [(1, 2, 0, 1), (2, 1, 0, -1), (2, 0, 1, -1), (0, 2, 1, 1)] {
            tilde.comps[i][j][k] = &x * &DiffExpr::from_int(s);
        }
        let phi = PhiTensor::from_tilde(&tilde);
        let rep = check_phi(&nabla, &phi).unwrap();
        assert_eq!(rep.failed_ids(), vec!["exact.phi_closed"]);
        let e = twisted_product(&nabla, &phi).unwrap();
        let rep = check_presymplectic(&e).unwrap();
        assert_eq!(rep.failed_ids(), vec!["presym.def_i"]);
    }

    #[test]
    fn curved_connection_is_rejected() {
        let ctx = Arc::new(ChartContext::new(&["x", "y"], &[]).unwrap());
        let mut g = zeros3(2);
        g[0][0][1] = ctx.parse("y").unwrap();
        let rep = FlatConnection::new(ctx, g).unwrap().check().unwrap();
        assert_eq!(rep.failed_ids(), vec!["exact.connection_flat"]);
    }
}

//! Verification suites over a parsed definition, and derivations between
//! its equivalent descriptions.

use std::fmt;
use std::str::FromStr;

use crate::algebroid::{
    check_2cocycle, check_left_symmetric_algebroid, check_lie_algebroid, sections, ChartAlgebroid,
    FormField, Section,
};
use crate::cohomology::PolyLsa;
use crate::defs::Definition;
use crate::error::{Error, Result};
use crate::exact::{
    check_phi, check_splitting, check_twist, extract_phi, splitting_equivalence, twisted_product,
    FlatConnection, PhiTensor, Splitting,
};
use crate::expr::{ChartContext, DiffExpr, Poly};
use crate::linalg::ExprMatrix;
use crate::lsa::{check_left_symmetric, subadjacent_lie};
use crate::parakahler::{check_converse, check_parakahler, metric_from};
use crate::presym::{
    check_dirac, check_presymplectic, presym_from_symplectic, pseudo_semidirect, PreSymStructure,
    Subbundle,
};
use crate::report::{CheckReport, Tally};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lsa,
    Algebroid,
    Presym,
    Exact,
    Parakahler,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lsa" => Suite::Lsa,
            "algebroid" => Suite::Algebroid,
            "presym" => Suite::Presym,
            "exact" => Suite::Exact,
            "parakahler" => Suite::Parakahler,
            "all" => Suite::All,
            _ => return Err(Error::Precondition(format!("unknown suite `{s}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    ToStar,
    ToBracket,
    PseudoSemidirect,
    Twist,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "to-star" => Direction::ToStar,
            "to-bracket" => Direction::ToBracket,
            "pseudo-semidirect" => Direction::PseudoSemidirect,
            "twist" => Direction::Twist,
            _ => return Err(Error::Precondition(format!("unknown direction `{s}`"))),
        })
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::ToStar => "to-star",
            Direction::ToBracket => "to-bracket",
            Direction::PseudoSemidirect => "pseudo-semidirect",
            Direction::Twist => "twist",
        })
    }
}

fn compare_tables(
    id: &str,
    ctx: &ChartContext,
    frame: &[String],
    got: &[Vec<Section>],
    want: &[Vec<Section>],
) -> Tally {
    let mut t = Tally::new(id);
    for (a, row) in got.iter().enumerate() {
        for (b, u) in row.iter().enumerate() {
            let diff = sections::sub(u, &want[a][b]);
            t.expect(
                sections::is_zero(&diff),
                || format!("({},{})", frame[a], frame[b]),
                || sections::format(ctx, frame, &diff),
            );
        }
    }
    t
}

fn compare_matrices(
    t: &mut Tally,
    ctx: &ChartContext,
    label: &str,
    got: &ExprMatrix,
    want: &ExprMatrix,
) {
    if got.rows() != want.rows() || got.cols() != want.cols() {
        t.fail(label, "shape mismatch");
        return;
    }
    for i in 0..got.rows() {
        for j in 0..got.cols() {
            let d = got.get(i, j) - want.get(i, j);
            t.expect(
                d.is_zero(),
                || format!("{label}[{},{}]", i + 1, j + 1),
                || ctx.print(&d),
            );
        }
    }
}

/// Turns a failed precondition into a failing check so that the report,
/// not an error, carries it.
fn guard<T>(rep: &mut CheckReport, r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Precondition(msg) | Error::Degenerate(msg)) => {
            let mut t = Tally::new("input.preconditions");
            t.fail("input", msg);
            rep.push_tally(t);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn phi_or_zero(def: &Definition) -> Result<PhiTensor> {
    match def.phi_tensor() {
        Some(p) => p,
        None => Ok(PhiTensor::zero(def.ctx.dim())),
    }
}

/// The pre-symplectic structure a definition describes: its [star] table,
/// or the one derived from [bracket]+[form], from a left-symmetric product
/// (pseudo-semidirect product), or from a [connection] (twisted product).
pub fn structure_of(def: &Definition) -> Result<Option<PreSymStructure>> {
    if let Some(e) = def.presym() {
        return e.map(Some);
    }
    if let Some(s) = def.symplectic() {
        let (l, w) = s?;
        return presym_from_symplectic(&l, &w).map(Some);
    }
    if let Some(a) = def.left_symmetric() {
        return pseudo_semidirect(&a?).map(Some);
    }
    if let Some(c) = def.connection() {
        return twisted_product(&c?, &phi_or_zero(def)?).map(Some);
    }
    Ok(None)
}

pub fn run(def: &Definition, suite: Suite) -> Result<CheckReport> {
    let mut rep = CheckReport::new(def.name.clone());
    let all = suite == Suite::All;
    if all || suite == Suite::Lsa {
        lsa_suite(def, &mut rep)?;
    }
    if all || suite == Suite::Algebroid {
        algebroid_suite(def, &mut rep)?;
    }
    if all || suite == Suite::Presym {
        presym_suite(def, &mut rep)?;
    }
    if all || suite == Suite::Exact {
        exact_suite(def, &mut rep)?;
    }
    if all || suite == Suite::Parakahler {
        parakahler_suite(def, &mut rep)?;
    }
    Ok(rep)
}

fn lsa_suite(def: &Definition, rep: &mut CheckReport) -> Result<()> {
    let mut any = false;
    if let Some(fa) = def.finite_algebra() {
        any = true;
        let fa = fa?;
        let r = check_left_symmetric(&fa);
        let ok = r.passed();
        rep.extend(r);
        if ok {
            rep.extend(subadjacent_lie(&fa)?.1);
        }
    }
    if def.product.is_some() {
        if let Some(a) = def.left_symmetric() {
            any = true;
            rep.extend(check_left_symmetric_algebroid(&a?)?);
        }
    }
    if let Some(c) = def.connection() {
        any = true;
        let c = c?;
        rep.extend(c.check()?);
        rep.extend(check_left_symmetric_algebroid(&c.to_algebroid()?)?);
    }
    if !any {
        rep.skip(
            "lsa.left_symmetric",
            "no [algebra], [product] or [connection] section",
        );
    }
    Ok(())
}

fn symplectic_checks(l: &ChartAlgebroid, w: &FormField, rep: &mut CheckReport) -> Result<()> {
    rep.extend(check_lie_algebroid(l)?);
    rep.extend(check_2cocycle(l, w)?);
    let mut t = Tally::new("algebroid.form_nondegenerate");
    if let Err(Error::Singular { det }) = w.to_matrix().invert() {
        t.fail("w", format!("determinant {det}"));
    }
    rep.push_tally(t);
    Ok(())
}

fn algebroid_suite(def: &Definition, rep: &mut CheckReport) -> Result<()> {
    let mut any = false;
    if let Some(l) = def.lie_algebroid() {
        any = true;
        let l = l?;
        match &def.form {
            Some(w) => symplectic_checks(&l, &FormField::from_matrix(w)?, rep)?,
            None => rep.extend(check_lie_algebroid(&l)?),
        }
    }
    if let Some(e) = def.presym() {
        any = true;
        let (l, w) = e?.commutator_data()?;
        symplectic_checks(&l, &w, rep)?;
    }
    if let Some(a) = def.left_symmetric() {
        any = true;
        let a = a?;
        if guard(rep, a.require_left_symmetric())?.is_some() {
            rep.extend(check_lie_algebroid(&a.subadjacent())?);
        }
    }
    if !any {
        rep.skip("algebroid.jacobi", "no algebroid in the definition");
    }
    Ok(())
}

fn presym_suite(def: &Definition, rep: &mut CheckReport) -> Result<()> {
    let Some(e) = guard(rep, structure_of(def))? else {
        return Ok(());
    };
    let Some(e) = e else {
        rep.skip("presym.def_i", "no pre-symplectic data in the definition");
        return Ok(());
    };
    let checked = check_presymplectic(&e)?;
    let ok = checked.passed();
    rep.extend(checked);

    let ctx = e.ctx();
    let frame = e.frame();
    let file_sym = match def.symplectic() {
        Some(s) => Some(s?),
        None => None,
    };
    if let (Some((l, w)), true) = (&file_sym, def.star.is_some()) {
        rep.push_tally(compare_tables(
            "presym.bracket_matches",
            ctx,
            frame,
            &e.bracket_table(),
            &l.bracket_table(),
        ));
        let mut t = Tally::new("presym.pairing_matches");
        compare_matrices(&mut t, ctx, "w", e.pairing(), &w.to_matrix());
        rep.push_tally(t);
        if let Some(derived) = guard(rep, presym_from_symplectic(l, w))? {
            rep.push_tally(compare_tables(
                "presym.star_matches",
                ctx,
                frame,
                derived.star_table(),
                e.star_table(),
            ));
        }
    }
    if !ok {
        return Ok(());
    }

    // presym -> symplectic -> presym
    let (l2, w2) = e.commutator_data()?;
    if let Some(back) = guard(rep, presym_from_symplectic(&l2, &w2))? {
        let mut t = compare_tables(
            "presym.roundtrip_star",
            ctx,
            frame,
            back.star_table(),
            e.star_table(),
        );
        compare_matrices(&mut t, ctx, "pairing", back.pairing(), e.pairing());
        compare_matrices(&mut t, ctx, "anchor", back.anchor(), e.anchor());
        rep.push_tally(t);
    }
    // symplectic -> presym -> symplectic, starting from the file's data when present
    let (l, w) = file_sym.unwrap_or((l2, w2));
    if let Some(mid) = guard(rep, presym_from_symplectic(&l, &w))? {
        let (l3, w3) = mid.commutator_data()?;
        let mut t = compare_tables(
            "presym.roundtrip_bracket",
            ctx,
            frame,
            &l3.bracket_table(),
            &l.bracket_table(),
        );
        compare_matrices(&mut t, ctx, "w", &w3.to_matrix(), &w.to_matrix());
        compare_matrices(&mut t, ctx, "anchor", l3.anchor(), l.anchor());
        rep.push_tally(t);
    }

    if let Some(a) = def.left_symmetric() {
        let a = a?;
        let r = a.rank();
        let (dirac_a, induced) = check_dirac(&e, &Subbundle::frame_span(2 * r, 0..r))?;
        rep.extend(dirac_a);
        let (dirac_dual, _) = check_dirac(&e, &Subbundle::frame_span(2 * r, r..2 * r))?;
        rep.extend(dirac_dual);
        let mut t = Tally::new("presym.induced_matches");
        match induced {
            Some(ind) => {
                t = compare_tables(
                    "presym.induced_matches",
                    ctx,
                    a.frame(),
                    ind.structure(),
                    a.structure(),
                );
                let mut m = Tally::new("presym.induced_matches");
                compare_matrices(&mut m, ctx, "anchor", ind.anchor(), a.anchor());
                rep.push_tally(m);
            }
            None => t.fail("A", "no induced structure"),
        }
        rep.push_tally(t);
    }
    Ok(())
}

/// The symmetric tensor of a splitting `sigma(p_i) = p_i + theta(p_i)`.
fn splitting_theta(sigma: &ExprMatrix, n: usize) -> ExprMatrix {
    ExprMatrix::from_fn(n, n, |i, k| sigma.get(i, n + k).clone())
}

fn exact_suite(def: &Definition, rep: &mut CheckReport) -> Result<()> {
    let Some(c) = def.connection() else {
        rep.skip("exact.rank", "no [connection] section");
        return Ok(());
    };
    let nabla: FlatConnection = c?;
    let phi = phi_or_zero(def)?;
    let (e, checked) = check_twist(&nabla, &phi)?;
    rep.extend(checked);

    let n = nabla.dim();
    let (back, _) = extract_phi(&e, &nabla, &Splitting::canonical(n))?;
    let mut t = Tally::new("exact.phi_roundtrip");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let d = back.get(i, j, k) - phi.get(i, j, k);
                t.expect(
                    d.is_zero(),
                    || format!("({},{},{})", i + 1, j + 1, k + 1),
                    || e.ctx().print(&d),
                );
            }
        }
    }
    rep.push_tally(t);

    if let Some(s) = &def.splitting {
        let sigma = Splitting::new(s.clone());
        let split = check_splitting(&e, &sigma)?;
        let ok = split.passed();
        rep.extend(split);
        if ok {
            let (phi_s, r) = extract_phi(&e, &nabla, &sigma)?;
            rep.extend(r);
            let model = twisted_product(&nabla, &phi_s)?;
            if let Some(eq) = guard(
                rep,
                splitting_equivalence(&model, &e, &splitting_theta(s, n)),
            )? {
                rep.extend(eq);
            }
        }
    }
    Ok(())
}

fn parakahler_suite(def: &Definition, rep: &mut CheckReport) -> Result<()> {
    let Some(p) = &def.paracomplex else {
        rep.skip("pk.involution", "no [paracomplex] section");
        return Ok(());
    };
    let Some(Some(e)) = guard(rep, structure_of(def))? else {
        return Ok(());
    };
    let checked = check_parakahler(&e, p)?;
    let ok = checked.passed();
    rep.extend(checked);
    if ok {
        let g = metric_from(&e, p)?;
        let (l, _) = e.commutator_data()?;
        rep.extend(check_converse(&l, &g, p)?);
    }
    Ok(())
}

/// Polynomial structure data for the cohomology complex: an [algebra], a
/// [product] with polynomial coefficients, or the connection of [connection].
pub fn poly_lsa(def: &Definition) -> Result<PolyLsa> {
    let a = match (def.left_symmetric(), def.connection()) {
        (Some(a), _) => a?,
        (None, Some(c)) => c?.to_algebroid()?,
        _ => {
            return Err(Error::Precondition(
                "needs [algebra], [product] or [connection]".into(),
            ))
        }
    };
    a.require_left_symmetric()?;
    let n = def.ctx.dim() as u32;
    let poly = |e: &DiffExpr| -> Result<Poly> {
        if !e.is_polynomial() || e.max_var().is_some_and(|v| v >= n) {
            return Err(Error::Precondition(format!(
                "coefficient `{}` is not a polynomial in the coordinates",
                def.ctx.print(e)
            )));
        }
        Ok(e.numer().clone())
    };
    let r = a.rank();
    let mut product = vec![vec![Vec::with_capacity(r); r]; r];
    for (i, row) in a.structure().iter().enumerate() {
        for (j, u) in row.iter().enumerate() {
            product[i][j] = u.iter().map(&poly).collect::<Result<_>>()?;
        }
    }
    let anchor = (0..r)
        .map(|i| a.anchor().row(i).iter().map(&poly).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    Ok(PolyLsa {
        rank: r,
        coords: n as usize,
        product,
        anchor,
    })
}

/// Whether the definition has the sections a direction starts from.
pub fn applicable(def: &Definition, dir: Direction) -> bool {
    match dir {
        Direction::ToStar => def.bracket.is_some() && def.form.is_some(),
        Direction::ToBracket => def.star.is_some(),
        Direction::PseudoSemidirect => def.algebra.is_some() || def.product.is_some(),
        Direction::Twist => def.connection.is_some(),
    }
}

/// Rewrites a definition into another description of its structure. The
/// result carries the input's name and para-complex structure.
pub fn derive(def: &Definition, dir: Direction) -> Result<Definition> {
    let need = |what: &str| Error::Precondition(format!("direction {dir} needs {what}"));
    let mut out = match dir {
        Direction::ToStar => {
            let (l, w) = def
                .symplectic()
                .ok_or_else(|| need("[bracket] and [form]"))??;
            Definition::from_presym(&def.name, &presym_from_symplectic(&l, &w)?)
        }
        Direction::ToBracket => {
            let e = def.presym().ok_or_else(|| need("[star] and [pairing]"))??;
            let (l, w) = crate::presym::symplectic_from_presym(&e)?;
            Definition::from_symplectic(&def.name, &l, &w)
        }
        Direction::PseudoSemidirect => {
            let a = def
                .left_symmetric()
                .ok_or_else(|| need("[algebra] or [product]"))??;
            Definition::from_presym(&def.name, &pseudo_semidirect(&a)?)
        }
        Direction::Twist => {
            let c = def.connection().ok_or_else(|| need("[connection]"))??;
            let phi = phi_or_zero(def)?;
            if !c.check()?.passed() || !check_phi(&c, &phi)?.passed() {
                return Err(Error::Precondition(
                    "the connection or the twisting tensor fails its checks".into(),
                ));
            }
            Definition::from_presym(&def.name, &twisted_product(&c, &phi)?)
        }
    };
    if out.frame == def.frame {
        out.paracomplex = def.paracomplex.clone();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn fixture(name: &str) -> Definition {
        Definition::parse(&fixtures::get(name).unwrap()).unwrap()
    }

    #[test]
    fn every_fixture_passes_all_suites() {
        for name in fixtures::NAMES {
            let rep = run(&fixture(name), Suite::All).unwrap();
            assert!(rep.passed(), "{name}\n{}", rep.to_text(false));
        }
    }

    #[test]
    fn broken_sphere_fails_with_witness() {
        let d = Definition::parse(&fixtures::broken_sphere()).unwrap();
        let rep = run(&d, Suite::All).unwrap();
        assert!(!rep.passed());
        let failed = rep.failed_ids();
        assert!(failed.contains(&"algebroid.anchor_morphism"), "{failed:?}");
        assert!(rep.checks.iter().any(|c| !c.witnesses.is_empty()));
    }

    #[test]
    fn twist_splitting_untwists() {
        let d = fixture("twist-r2");
        let nabla = d.connection().unwrap().unwrap();
        let e = twisted_product(&nabla, &d.phi_tensor().unwrap().unwrap()).unwrap();
        let sigma = Splitting::new(d.splitting.clone().unwrap());
        let (phi, _) = extract_phi(&e, &nabla, &sigma).unwrap();
        assert!(phi.is_zero());
    }

    #[test]
    fn derivations_stabilize() {
        let sphere = fixture("sphere");
        let star = derive(&sphere, Direction::ToStar).unwrap();
        let bracket = derive(&star, Direction::ToBracket).unwrap();
        assert_eq!(
            derive(&bracket, Direction::ToStar).unwrap().to_psa(),
            star.to_psa()
        );
        assert_eq!(bracket.bracket, sphere.bracket);
        assert_eq!(star.star, sphere.star);

        let semi = derive(&fixture("lsa2"), Direction::PseudoSemidirect).unwrap();
        let file = fixture("semidirect-lsa2");
        assert_eq!(semi.star, file.star);
        assert_eq!(semi.pairing, file.pairing);
        assert!(matches!(
            derive(&fixture("lsa2"), Direction::Twist),
            Err(Error::Precondition(_))
        ));
    }
}

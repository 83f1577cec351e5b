//! The `.psa` definition-file format.
//!
//! ```text
//! # comment
//! [meta]
//! name = sphere
//! [chart]
//! coords = x, y, z
//! funcs = h            # optional symbolic functions
//! max_order = 3        # optional, default 2
//! [frame]
//! names = e1, e2
//! [anchor]
//! e1 = y*p_x - x*p_y   # vector fields over p_<coord>
//! [bracket]
//! e1, e2 = -z/y*e1 - x/y*e2
//! [form]
//! e1, e2 = y
//! ```
//!
//! Tables ([bracket], [product], [star], [algebra]) map a pair of frame
//! names to a linear combination of frame names; missing entries are zero.
//! [bracket], [pairing] and [form] are completed by skew-symmetry.
//! [connection] maps coordinate pairs to combinations of `p_<coord>`,
//! [phi] maps coordinate pairs to combinations of `d<coord>`, [splitting]
//! maps a coordinate to a section, and [paracomplex] maps a frame name to
//! its image. When [frame] is absent and [connection] is present, the frame
//! is `p_<coord>..` followed by `d<coord>..`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::algebroid::{sections, ChartAlgebroid, FormField, Law, Section};
use crate::error::{Error, Result};
use crate::exact::{FlatConnection, PhiTensor};
use crate::expr::{ChartContext, DiffExpr};
use crate::expr::{Var, DEFAULT_MAX_ORDER};
use crate::linalg::ExprMatrix;
use crate::lsa::FiniteAlgebra;
use crate::presym::PreSymStructure;

pub type Table = Vec<Vec<Section>>;

const SECTIONS: [&str; 15] = [
    "meta",
    "chart",
    "frame",
    "anchor",
    "bracket",
    "product",
    "star",
    "pairing",
    "form",
    "connection",
    "phi",
    "splitting",
    "paracomplex",
    "algebra",
    "notes",
];

/// Parsed contents of a definition file. Every section is optional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub ctx: Arc<ChartContext>,
    pub frame: Vec<String>,
    pub anchor: Option<ExprMatrix>,
    pub bracket: Option<Table>,
    pub product: Option<Table>,
    pub star: Option<Table>,
    pub pairing: Option<ExprMatrix>,
    pub form: Option<ExprMatrix>,
    pub connection: Option<Vec<Vec<Vec<DiffExpr>>>>,
    pub phi: Option<Vec<Vec<Vec<DiffExpr>>>>,
    pub splitting: Option<ExprMatrix>,
    pub paracomplex: Option<ExprMatrix>,
    pub algebra: Option<Table>,
}

fn tangent_names(ctx: &ChartContext) -> Vec<String> {
    ctx.coords().iter().map(|c| format!("p_{c}")).collect()
}

fn cotangent_names(ctx: &ChartContext) -> Vec<String> {
    ctx.coords().iter().map(|c| format!("d{c}")).collect()
}

fn def_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Definition {
        line,
        msg: msg.into(),
    }
}

fn list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Parses linear combinations of named basis elements over a chart by
/// treating the names as extra coordinates.
struct CombParser<'a> {
    ctx: &'a ChartContext,
    ext: ChartContext,
    basis: Vec<String>,
}

impl<'a> CombParser<'a> {
    fn new(ctx: &'a ChartContext, basis: &[String]) -> Result<Self> {
        let mut coords: Vec<&str> = ctx.coords().iter().map(String::as_str).collect();
        coords.extend(basis.iter().map(String::as_str));
        let funcs: Vec<&str> = ctx.declared_funcs().iter().map(String::as_str).collect();
        let ext = ChartContext::with_max_order(&coords, &funcs, ctx.max_order())?;
        Ok(CombParser {
            ctx,
            ext,
            basis: basis.to_vec(),
        })
    }

    fn to_base(&self, e: &DiffExpr, line: usize) -> Result<DiffExpr> {
        let n = self.ctx.dim();
        let mut bad = None;
        let mapped = e.substitute(&|v| match self.ext.var(v) {
            Var::Coord(i) => Some(self.ctx.coord(*i)),
            Var::Func { func, partials } => {
                if partials.iter().any(|&p| p >= n) {
                    return None;
                }
                self.ctx.partial(*func, partials).ok()
            }
        });
        for v in e.numer().vars().into_iter().chain(e.denom().vars()) {
            if let Var::Func { partials, .. } = self.ext.var(v) {
                if partials.iter().any(|&p| p >= n) {
                    bad = Some(self.ext.var_name(v));
                }
            }
        }
        if let Some(name) = bad {
            return Err(def_err(
                line,
                format!("cannot differentiate along a frame element in `{name}`"),
            ));
        }
        mapped.ok_or_else(|| def_err(line, "division by zero"))
    }

    fn parse(&self, text: &str, line: usize) -> Result<Section> {
        let n = self.ctx.dim();
        let e = self
            .ext
            .parse(text)
            .map_err(|e| def_err(line, e.to_string()))?;
        let mut rest = e.clone();
        let mut out = Vec::with_capacity(self.basis.len());
        for k in 0..self.basis.len() {
            let v = (n + k) as u32;
            let c = e.derivative_raw(v);
            rest -= &(&c * &DiffExpr::var(v));
            if (0..self.basis.len()).any(|j| c.contains_var((n + j) as u32)) {
                return Err(def_err(
                    line,
                    format!("`{text}` is not linear in {}", self.basis.join(", ")),
                ));
            }
            out.push(self.to_base(&c, line)?);
        }
        if !rest.is_zero() {
            return Err(def_err(
                line,
                format!(
                    "`{text}` is not a linear combination of {}",
                    self.basis.join(", ")
                ),
            ));
        }
        for c in &out {
            check_no_probe(self.ctx, c, line)?;
        }
        Ok(out)
    }
}

fn check_no_probe(ctx: &ChartContext, e: &DiffExpr, line: usize) -> Result<()> {
    for v in e.numer().vars().into_iter().chain(e.denom().vars()) {
        if let Var::Func { func, .. } = ctx.var(v) {
            if *func >= ctx.declared_funcs().len() {
                return Err(def_err(
                    line,
                    format!(
                        "`{}` is reserved for verification; declare functions in [chart]",
                        ctx.var_name(v)
                    ),
                ));
            }
        }
    }
    Ok(())
}

fn scalar(ctx: &ChartContext, text: &str, line: usize) -> Result<DiffExpr> {
    let e = ctx.parse(text).map_err(|e| def_err(line, e.to_string()))?;
    check_no_probe(ctx, &e, line)?;
    Ok(e)
}

fn lookup(names: &[String], key: &str, line: usize, what: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == key)
        .ok_or_else(|| def_err(line, format!("unknown {what} `{key}`")))
}

fn pair_key(names: &[String], key: &str, line: usize, what: &str) -> Result<(usize, usize)> {
    let parts = list(key);
    if parts.len() != 2 {
        return Err(def_err(
            line,
            format!("expected `a, b` on the left, got `{key}`"),
        ));
    }
    Ok((
        lookup(names, &parts[0], line, what)?,
        lookup(names, &parts[1], line, what)?,
    ))
}

type Entries = Vec<(usize, String, String)>;

fn skew_matrix(ctx: &ChartContext, frame: &[String], entries: &Entries) -> Result<ExprMatrix> {
    let r = frame.len();
    let mut given: BTreeMap<(usize, usize), (usize, DiffExpr)> = BTreeMap::new();
    for (line, key, value) in entries {
        let (a, b) = pair_key(frame, key, *line, "frame element")?;
        let v = scalar(ctx, value, *line)?;
        if a == b && !v.is_zero() {
            return Err(def_err(
                *line,
                "diagonal entries of a skew form must vanish",
            ));
        }
        if given.insert((a, b), (*line, v)).is_some() {
            return Err(def_err(*line, format!("duplicate entry `{key}`")));
        }
    }
    let mut m = ExprMatrix::zeros(r, r);
    for (&(a, b), (line, v)) in &given {
        if let Some((_, w)) = given.get(&(b, a)) {
            if &-w.clone() != v {
                return Err(def_err(*line, "entries are not skew-symmetric"));
            }
        }
        m.set(a, b, v.clone());
        m.set(b, a, -v.clone());
    }
    Ok(m)
}

fn table(ctx: &ChartContext, frame: &[String], entries: &Entries, skew: bool) -> Result<Table> {
    let r = frame.len();
    let p = CombParser::new(ctx, frame)?;
    let mut t = vec![vec![sections::zero(r); r]; r];
    let mut given: BTreeMap<(usize, usize), (usize, Section)> = BTreeMap::new();
    for (line, key, value) in entries {
        let (a, b) = pair_key(frame, key, *line, "frame element")?;
        let v = p.parse(value, *line)?;
        if skew && a == b && !sections::is_zero(&v) {
            return Err(def_err(*line, "a bracket vanishes on the diagonal"));
        }
        if given.insert((a, b), (*line, v)).is_some() {
            return Err(def_err(*line, format!("duplicate entry `{key}`")));
        }
    }
    for (&(a, b), (line, v)) in &given {
        if skew {
            if let Some((_, w)) = given.get(&(b, a)) {
                if !sections::is_zero(&sections::add(v, w)) {
                    return Err(def_err(*line, "bracket entries are not skew-symmetric"));
                }
            }
            t[b][a] = sections::scale(&DiffExpr::from_int(-1), v);
        }
        t[a][b] = v.clone();
    }
    Ok(t)
}

impl Definition {
    pub fn empty(name: &str, ctx: Arc<ChartContext>, frame: Vec<String>) -> Self {
        Definition {
            name: name.to_string(),
            ctx,
            frame,
            anchor: None,
            bracket: None,
            product: None,
            star: None,
            pairing: None,
            form: None,
            connection: None,
            phi: None,
            splitting: None,
            paracomplex: None,
            algebra: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, (usize, Entries)> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
                let name = name.trim().to_string();
                if !SECTIONS.contains(&name.as_str()) {
                    return Err(def_err(line, format!("unknown section [{name}]")));
                }
                if sections.contains_key(&name) {
                    return Err(def_err(line, format!("duplicate section [{name}]")));
                }
                sections.insert(name.clone(), (line, Vec::new()));
                current = Some(name);
                continue;
            }
            let Some(sec) = &current else {
                return Err(def_err(line, "entry outside of a section"));
            };
            let Some((k, v)) = body.split_once('=') else {
                return Err(def_err(line, "expected `key = value`"));
            };
            let entries = &mut sections.get_mut(sec).expect("section exists").1;
            entries.push((line, k.trim().to_string(), v.trim().to_string()));
        }
        let get = |name: &str| sections.get(name).map(|(_, e)| e);
        let field = |name: &str, key: &str| -> Option<(usize, String)> {
            get(name)?
                .iter()
                .find(|(_, k, _)| k == key)
                .map(|(l, _, v)| (*l, v.clone()))
        };
        for (name, (_, entries)) in &sections {
            let allowed: &[&str] = match name.as_str() {
                "meta" => &["name"],
                "chart" => &["coords", "funcs", "max_order"],
                "frame" => &["names"],
                _ => continue,
            };
            if let Some((line, k, _)) = entries
                .iter()
                .find(|(_, k, _)| !allowed.contains(&k.as_str()))
            {
                return Err(def_err(*line, format!("unknown key `{k}` in [{name}]")));
            }
        }

        let name = field("meta", "name")
            .map(|(_, v)| v)
            .unwrap_or_else(|| "unnamed".into());
        let coords = field("chart", "coords")
            .map(|(_, v)| list(&v))
            .unwrap_or_default();
        let funcs = field("chart", "funcs")
            .map(|(_, v)| list(&v))
            .unwrap_or_default();
        let max_order = match field("chart", "max_order") {
            Some((line, v)) => v
                .parse::<usize>()
                .map_err(|_| def_err(line, "max_order must be a number"))?,
            None => DEFAULT_MAX_ORDER,
        };
        let chart_line = sections.get("chart").map(|(l, _)| *l).unwrap_or(0);
        let cr: Vec<&str> = coords.iter().map(String::as_str).collect();
        let fr: Vec<&str> = funcs.iter().map(String::as_str).collect();
        let ctx = ChartContext::with_max_order(&cr, &fr, max_order)
            .map_err(|e| def_err(chart_line, e.to_string()))?;
        let ctx = Arc::new(ctx);
        let n = ctx.dim();

        let frame = match field("frame", "names") {
            Some((_, v)) => list(&v),
            None if get("connection").is_some() => {
                let mut f = tangent_names(&ctx);
                f.extend(cotangent_names(&ctx));
                f
            }
            None => Vec::new(),
        };
        if !frame.is_empty() {
            let line = sections.get("frame").map(|(l, _)| *l).unwrap_or(0);
            crate::algebroid::validate_frame(&ctx, &frame)
                .map_err(|e| def_err(line, e.to_string()))?;
        }
        let r = frame.len();
        let mut def = Definition::empty(&name, ctx.clone(), frame.clone());

        for sec in [
            "anchor",
            "bracket",
            "product",
            "star",
            "pairing",
            "form",
            "paracomplex",
            "algebra",
        ] {
            if let Some((line, _)) = sections.get(sec) {
                if r == 0 {
                    return Err(def_err(*line, format!("[{sec}] needs a [frame]")));
                }
            }
        }
        if let Some(entries) = get("anchor") {
            let p = CombParser::new(&ctx, &tangent_names(&ctx))?;
            let mut m = ExprMatrix::zeros(r, n);
            for (line, key, value) in entries {
                let a = lookup(&frame, key, *line, "frame element")?;
                for (c, v) in p.parse(value, *line)?.into_iter().enumerate() {
                    m.set(a, c, v);
                }
            }
            def.anchor = Some(m);
        }
        if let Some(e) = get("bracket") {
            def.bracket = Some(table(&ctx, &frame, e, true)?);
        }
        if let Some(e) = get("product") {
            def.product = Some(table(&ctx, &frame, e, false)?);
        }
        if let Some(e) = get("star") {
            def.star = Some(table(&ctx, &frame, e, false)?);
        }
        if let Some(e) = get("algebra") {
            if n != 0 {
                let line = sections["algebra"].0;
                return Err(def_err(
                    line,
                    "[algebra] describes an algebra over a point; use [product] on a chart",
                ));
            }
            def.algebra = Some(table(&ctx, &frame, e, false)?);
        }
        if let Some(e) = get("pairing") {
            def.pairing = Some(skew_matrix(&ctx, &frame, e)?);
        }
        if let Some(e) = get("form") {
            def.form = Some(skew_matrix(&ctx, &frame, e)?);
        }
        if let Some(entries) = get("connection") {
            let p = CombParser::new(&ctx, &tangent_names(&ctx))?;
            let mut g = vec![vec![vec![DiffExpr::zero(); n]; n]; n];
            for (line, key, value) in entries {
                let (i, j) = pair_key(ctx.coords(), key, *line, "coordinate")?;
                g[i][j] = p.parse(value, *line)?;
            }
            def.connection = Some(g);
        }
        if let Some(entries) = get("phi") {
            let p = CombParser::new(&ctx, &cotangent_names(&ctx))?;
            let mut g = vec![vec![vec![DiffExpr::zero(); n]; n]; n];
            for (line, key, value) in entries {
                let (i, j) = pair_key(ctx.coords(), key, *line, "coordinate")?;
                g[i][j] = p.parse(value, *line)?;
            }
            def.phi = Some(g);
        }
        if let Some(entries) = get("splitting") {
            let p = CombParser::new(&ctx, &frame)?;
            let mut m = ExprMatrix::zeros(n, r);
            let mut seen = vec![false; n];
            for (line, key, value) in entries {
                let i = lookup(ctx.coords(), key, *line, "coordinate")?;
                seen[i] = true;
                for (c, v) in p.parse(value, *line)?.into_iter().enumerate() {
                    m.set(i, c, v);
                }
            }
            if let Some(i) = seen.iter().position(|s| !s) {
                let line = sections["splitting"].0;
                return Err(def_err(
                    line,
                    format!("[splitting] has no entry for `{}`", ctx.coords()[i]),
                ));
            }
            def.splitting = Some(m);
        }
        if let Some(entries) = get("paracomplex") {
            let p = CombParser::new(&ctx, &frame)?;
            let mut m = ExprMatrix::identity(r);
            for (line, key, value) in entries {
                let b = lookup(&frame, key, *line, "frame element")?;
                for (a, v) in p.parse(value, *line)?.into_iter().enumerate() {
                    m.set(a, b, v);
                }
            }
            def.paracomplex = Some(m);
        }

        let need = |sec: &str, deps: &[&str]| -> Result<()> {
            if let Some((line, _)) = sections.get(sec) {
                if !deps.iter().any(|d| sections.contains_key(*d)) {
                    return Err(def_err(
                        *line,
                        format!("[{sec}] requires [{}]", deps.join("] or [")),
                    ));
                }
            }
            Ok(())
        };
        need("star", &["pairing"])?;
        need("pairing", &["star"])?;
        need("form", &["bracket", "algebra"])?;
        need("phi", &["connection"])?;
        need("splitting", &["connection"])?;
        need(
            "paracomplex",
            &["star", "bracket", "algebra", "product", "connection"],
        )?;
        Ok(def)
    }

    /// The anchor, zero when the file gives none.
    pub fn anchor_or_zero(&self) -> ExprMatrix {
        self.anchor
            .clone()
            .unwrap_or_else(|| ExprMatrix::zeros(self.frame.len(), self.ctx.dim()))
    }

    pub fn lie_algebroid(&self) -> Option<Result<ChartAlgebroid>> {
        let b = self.bracket.as_ref()?;
        Some(ChartAlgebroid::new(
            self.ctx.clone(),
            self.frame.clone(),
            self.anchor_or_zero(),
            b.clone(),
            Law::Bracket,
        ))
    }

    /// A left-symmetric product: [product] on a chart or [algebra] over a point.
    pub fn left_symmetric(&self) -> Option<Result<ChartAlgebroid>> {
        let p = self.product.as_ref().or(self.algebra.as_ref())?;
        Some(ChartAlgebroid::new(
            self.ctx.clone(),
            self.frame.clone(),
            self.anchor_or_zero(),
            p.clone(),
            Law::Product,
        ))
    }

    pub fn finite_algebra(&self) -> Option<Result<FiniteAlgebra>> {
        let t = self.algebra.as_ref()?;
        let r = self.frame.len();
        let mut c = vec![vec![vec![]; r]; r];
        for a in 0..r {
            for b in 0..r {
                let mut v = Vec::with_capacity(r);
                for x in &t[a][b] {
                    match x.constant_value() {
                        Some(q) => v.push(q),
                        None => {
                            return Some(Err(Error::Precondition(
                                "algebra constants must be rational".into(),
                            )))
                        }
                    }
                }
                c[a][b] = v;
            }
        }
        Some(FiniteAlgebra::new(r, c))
    }

    pub fn symplectic(&self) -> Option<Result<(ChartAlgebroid, FormField)>> {
        let w = self.form.as_ref()?;
        let l = self.lie_algebroid()?;
        Some(l.and_then(|l| Ok((l, FormField::from_matrix(w)?))))
    }

    pub fn presym(&self) -> Option<Result<PreSymStructure>> {
        let s = self.star.as_ref()?;
        let w = self.pairing.as_ref()?;
        Some(PreSymStructure::new(
            self.ctx.clone(),
            self.frame.clone(),
            self.anchor_or_zero(),
            s.clone(),
            w.clone(),
        ))
    }

    pub fn connection(&self) -> Option<Result<FlatConnection>> {
        let g = self.connection.as_ref()?;
        Some(FlatConnection::new(self.ctx.clone(), g.clone()))
    }

    pub fn phi_tensor(&self) -> Option<Result<PhiTensor>> {
        Some(PhiTensor::new(self.phi.clone()?))
    }

    pub fn from_presym(name: &str, e: &PreSymStructure) -> Self {
        let mut d = Definition::empty(name, e.ctx().clone(), e.frame().to_vec());
        d.anchor = Some(e.anchor().clone());
        d.star = Some(e.star_table().to_vec());
        d.pairing = Some(e.pairing().clone());
        d
    }

    pub fn from_symplectic(name: &str, l: &ChartAlgebroid, w: &FormField) -> Self {
        let mut d = Definition::empty(name, l.ctx().clone(), l.frame().to_vec());
        d.anchor = Some(l.anchor().clone());
        d.bracket = Some(l.bracket_table());
        d.form = Some(w.to_matrix());
        d
    }

    /// Renders the definition; parsing the output gives back an equal value.
    pub fn to_psa(&self) -> String {
        let ctx = &self.ctx;
        let frame = &self.frame;
        let mut out = String::new();
        let _ = writeln!(out, "[meta]\nname = {}", self.name);
        if ctx.dim() > 0 || !ctx.declared_funcs().is_empty() {
            let _ = writeln!(out, "\n[chart]\ncoords = {}", ctx.coords().join(", "));
            if !ctx.declared_funcs().is_empty() {
                let _ = writeln!(out, "funcs = {}", ctx.declared_funcs().join(", "));
            }
            if ctx.max_order() != DEFAULT_MAX_ORDER {
                let _ = writeln!(out, "max_order = {}", ctx.max_order());
            }
        }
        if !frame.is_empty() {
            let _ = writeln!(out, "\n[frame]\nnames = {}", frame.join(", "));
        }
        let comb = |u: &[DiffExpr], names: &[String]| sections::format(ctx, names, u);
        if let Some(m) = &self.anchor {
            if !m.is_zero() {
                out.push_str("\n[anchor]\n");
                for (a, name) in frame.iter().enumerate() {
                    if m.row(a).iter().any(|x| !x.is_zero()) {
                        let _ = writeln!(out, "{name} = {}", comb(m.row(a), &tangent_names(ctx)));
                    }
                }
            }
        }
        let tables = [
            ("algebra", &self.algebra, false),
            ("bracket", &self.bracket, true),
            ("product", &self.product, false),
            ("star", &self.star, false),
        ];
        for (sec, t, skew) in tables {
            let Some(t) = t else { continue };
            let _ = writeln!(out, "\n[{sec}]");
            for a in 0..frame.len() {
                for b in 0..frame.len() {
                    if (skew && b <= a) || sections::is_zero(&t[a][b]) {
                        continue;
                    }
                    let _ = writeln!(
                        out,
                        "{}, {} = {}",
                        frame[a],
                        frame[b],
                        comb(&t[a][b], frame)
                    );
                }
            }
        }
        for (sec, m) in [("pairing", &self.pairing), ("form", &self.form)] {
            let Some(m) = m else { continue };
            let _ = writeln!(out, "\n[{sec}]");
            for a in 0..frame.len() {
                for b in a + 1..frame.len() {
                    if !m.get(a, b).is_zero() {
                        let _ = writeln!(
                            out,
                            "{}, {} = {}",
                            frame[a],
                            frame[b],
                            ctx.print(m.get(a, b))
                        );
                    }
                }
            }
        }
        let coords = ctx.coords();
        for (sec, t, names) in [
            ("connection", &self.connection, tangent_names(ctx)),
            ("phi", &self.phi, cotangent_names(ctx)),
        ] {
            let Some(t) = t else { continue };
            let _ = writeln!(out, "\n[{sec}]");
            for i in 0..coords.len() {
                for j in 0..coords.len() {
                    if !sections::is_zero(&t[i][j]) {
                        let _ = writeln!(
                            out,
                            "{}, {} = {}",
                            coords[i],
                            coords[j],
                            comb(&t[i][j], &names)
                        );
                    }
                }
            }
        }
        if let Some(m) = &self.splitting {
            out.push_str("\n[splitting]\n");
            for (i, c) in coords.iter().enumerate() {
                let _ = writeln!(out, "{c} = {}", comb(m.row(i), frame));
            }
        }
        if let Some(p) = &self.paracomplex {
            out.push_str("\n[paracomplex]\n");
            for (b, name) in frame.iter().enumerate() {
                let col = p.column(b);
                if col != sections::unit(frame.len(), b) {
                    let _ = writeln!(out, "{name} = {}", comb(&col, frame));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE: &str = "
[meta]
name = sphere
[chart]
coords = x, y, z
[frame]
names = e1, e2
[anchor]
e1 = y*p_x - x*p_y
e2 = z*p_y - y*p_z
[bracket]
e1, e2 = -z/y*e1 - x/y*e2
[form]
e1, e2 = y
";

    #[test]
    fn parses_and_round_trips() {
        let d = Definition::parse(SPHERE).unwrap();
        let b = d.bracket.as_ref().unwrap();
        assert_eq!(
            sections::format(&d.ctx, &d.frame, &b[1][0]),
            "z/y*e1 + x/y*e2"
        );
        assert_eq!(d.ctx.print(d.form.as_ref().unwrap().get(1, 0)), "-y");
        let again = Definition::parse(&d.to_psa()).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn reports_line_numbers() {
        let text = "[frame]\nnames = e1, e2\n[bracket]\ne1, e2 = e1*e2\n";
        match Definition::parse(text) {
            Err(Error::Definition { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let text = "[frame]\nnames = e1\n[star]\ne1, e1 = e1\n";
        assert!(matches!(
            Definition::parse(text),
            Err(Error::Definition { line: 3, .. })
        ));
        let text = "[chart]\ncoords = x\n[frame]\nnames = e1\n[anchor]\ne1 = f*p_x\n";
        assert!(matches!(
            Definition::parse(text),
            Err(Error::Definition { line: 6, .. })
        ));
    }
}

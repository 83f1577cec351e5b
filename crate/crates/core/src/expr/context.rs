use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::diffexpr::DiffExpr;
use super::poly::Poly;
use crate::error::{Error, Result};

/// Meaning of a variable index inside a [`ChartContext`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Coord(usize),
    /// Function symbol `func` differentiated by the sorted coordinate list `partials`.
    Func {
        func: usize,
        partials: Vec<usize>,
    },
}

/// Coordinates, function symbols and their formal partials on one chart.
///
/// Variable indices are laid out as: coordinates, then for each function
/// symbol its value followed by its partials of order `1..=max_order`.
/// Two probe symbols are always appended after the declared functions; the
/// verification routines use them as the arbitrary test functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartContext {
    coords: Vec<String>,
    funcs: Vec<String>,
    declared_funcs: usize,
    max_order: usize,
    vars: Vec<Var>,
    index: HashMap<Var, u32>,
}

pub const DEFAULT_MAX_ORDER: usize = 2;

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return false;
    }
    // `d`, `d2`, `d3`... are derivative operators.
    !(s.starts_with('d') && s[1..].chars().all(|c| c.is_ascii_digit()))
}

impl ChartContext {
    pub fn new(coords: &[&str], funcs: &[&str]) -> Result<Self> {
        Self::with_max_order(coords, funcs, DEFAULT_MAX_ORDER)
    }

    /// A chart with no coordinates: data over a single point.
    pub fn point() -> Self {
        Self::new(&[], &[]).expect("empty chart is valid")
    }

    pub fn with_max_order(coords: &[&str], funcs: &[&str], max_order: usize) -> Result<Self> {
        if max_order < 2 {
            return Err(Error::Precondition(format!(
                "max derivative order must be at least 2, got {max_order}"
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for name in coords.iter().chain(funcs) {
            if !valid_ident(name) {
                return Err(Error::InvalidName(name.to_string()));
            }
            if !seen.insert(*name) {
                return Err(Error::DuplicateName(name.to_string()));
            }
        }
        let mut all_funcs: Vec<String> = funcs.iter().map(|s| s.to_string()).collect();
        for base in ["f", "g"] {
            let mut name = base.to_string();
            let mut k = 1;
            while seen.contains(name.as_str()) || all_funcs.contains(&name) {
                name = format!("{base}_{k}");
                k += 1;
            }
            all_funcs.push(name);
        }
        let n = coords.len();
        let mut vars: Vec<Var> = (0..n).map(Var::Coord).collect();
        for func in 0..all_funcs.len() {
            vars.push(Var::Func {
                func,
                partials: vec![],
            });
            for order in 1..=max_order {
                for p in multisets(n, order) {
                    vars.push(Var::Func { func, partials: p });
                }
            }
        }
        let index = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i as u32))
            .collect();
        Ok(ChartContext {
            coords: coords.iter().map(|s| s.to_string()).collect(),
            funcs: all_funcs,
            declared_funcs: funcs.len(),
            max_order,
            vars,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    /// Function symbols declared by the user (probes excluded).
    pub fn declared_funcs(&self) -> &[String] {
        &self.funcs[..self.declared_funcs]
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn func_index(&self, name: &str) -> Option<usize> {
        self.funcs.iter().position(|c| c == name)
    }

    pub fn func_name(&self, func: usize) -> &str {
        &self.funcs[func]
    }

    pub fn coord(&self, i: usize) -> DiffExpr {
        DiffExpr::var(i as u32)
    }

    pub fn func(&self, func: usize) -> DiffExpr {
        self.partial(func, &[])
            .expect("order 0 is always available")
    }

    /// Index of the first probe function (`f` unless that name is taken).
    pub fn probe_index(&self, which: usize) -> usize {
        assert!(which < 2, "there are two probe functions");
        self.declared_funcs + which
    }

    pub fn probe(&self, which: usize) -> DiffExpr {
        self.func(self.probe_index(which))
    }

    pub fn partial(&self, func: usize, partials: &[usize]) -> Result<DiffExpr> {
        Ok(DiffExpr::var(self.partial_var(func, partials)?))
    }

    fn partial_var(&self, func: usize, partials: &[usize]) -> Result<u32> {
        if partials.len() > self.max_order {
            return Err(Error::DerivativeOrder {
                func: self.funcs[func].clone(),
                order: partials.len(),
                max: self.max_order,
            });
        }
        let mut p = partials.to_vec();
        p.sort_unstable();
        let key = Var::Func { func, partials: p };
        self.index
            .get(&key)
            .copied()
            .ok_or_else(|| Error::Precondition(format!("no variable {key:?}")))
    }

    pub fn var(&self, v: u32) -> &Var {
        &self.vars[v as usize]
    }

    pub fn var_name(&self, v: u32) -> String {
        match &self.vars[v as usize] {
            Var::Coord(i) => self.coords[*i].clone(),
            Var::Func { func, partials } => {
                let f = &self.funcs[*func];
                if partials.is_empty() {
                    return f.clone();
                }
                let op = if partials.len() == 1 {
                    "d".to_string()
                } else {
                    format!("d{}", partials.len())
                };
                let xs: Vec<&str> = partials.iter().map(|&i| self.coords[i].as_str()).collect();
                format!("{op}({f},{})", xs.join(","))
            }
        }
    }

    /// Derivative of a raw variable along coordinate `i`.
    fn var_derivative(&self, v: u32, i: usize) -> Result<Option<u32>> {
        match &self.vars[v as usize] {
            Var::Coord(_) => Ok(None),
            Var::Func { func, partials } => {
                let mut p = partials.clone();
                p.push(i);
                self.partial_var(*func, &p).map(Some)
            }
        }
    }

    /// Total derivative along coordinate `i`, applying the chain rule
    /// through every formal partial.
    pub fn differentiate(&self, e: &DiffExpr, i: usize) -> Result<DiffExpr> {
        assert!(i < self.dim(), "coordinate index out of range");
        let num = self.differentiate_poly(e.numer(), i)?;
        if e.is_polynomial() {
            return Ok(DiffExpr::from_poly(num));
        }
        let den = self.differentiate_poly(e.denom(), i)?;
        let top = &(&num * e.denom()) - &(e.numer() * &den);
        Ok(DiffExpr::fraction(top, e.denom() * e.denom()).expect("nonzero denominator"))
    }

    pub fn differentiate_by_name(&self, e: &DiffExpr, coord: &str) -> Result<DiffExpr> {
        let i = self
            .coord_index(coord)
            .ok_or_else(|| Error::UnknownIdentifier {
                name: coord.to_string(),
                pos: 0,
            })?;
        self.differentiate(e, i)
    }

    fn differentiate_poly(&self, p: &Poly, i: usize) -> Result<Poly> {
        let mut out = Poly::zero();
        for v in p.vars() {
            let dv = match &self.vars[v as usize] {
                Var::Coord(j) if *j == i => Poly::one(),
                Var::Coord(_) => continue,
                Var::Func { .. } => match self.var_derivative(v, i)? {
                    Some(w) => Poly::var(w),
                    None => continue,
                },
            };
            out = &out + &(&p.derivative(v) * &dv);
        }
        Ok(out)
    }

    /// Replaces function symbol `func` (and all its partials) by a concrete
    /// expression in the coordinates.
    pub fn instantiate(&self, e: &DiffExpr, func: usize, value: &DiffExpr) -> Result<DiffExpr> {
        let mut cache: HashMap<u32, DiffExpr> = HashMap::new();
        for v in e.numer().vars().into_iter().chain(e.denom().vars()) {
            if let Var::Func { func: k, partials } = &self.vars[v as usize] {
                if *k == func && !cache.contains_key(&v) {
                    let mut d = value.clone();
                    for &i in partials {
                        d = self.differentiate(&d, i)?;
                    }
                    cache.insert(v, d);
                }
            }
        }
        e.substitute(&|v| cache.get(&v).cloned())
            .ok_or(Error::DivisionByZero)
    }

    /// Evaluates with coordinates set to `point` and every function symbol
    /// replaced by the polynomial `funcs[k]` (missing entries count as zero).
    pub fn eval(
        &self,
        e: &DiffExpr,
        point: &[BigRational],
        funcs: &[Poly],
    ) -> Result<Option<BigRational>> {
        let mut values: HashMap<u32, BigRational> = HashMap::new();
        for v in e.numer().vars().into_iter().chain(e.denom().vars()) {
            let val = match &self.vars[v as usize] {
                Var::Coord(i) => point[*i].clone(),
                Var::Func { func, partials } => match funcs.get(*func) {
                    None => BigRational::zero(),
                    Some(p) => {
                        let mut d = p.clone();
                        for &i in partials {
                            d = d.derivative(i as u32);
                        }
                        d.eval(&|w| point[w as usize].clone())
                    }
                },
            };
            values.insert(v, val);
        }
        Ok(e.eval(&|v| values[&v].clone()))
    }

    pub fn parse(&self, text: &str) -> Result<DiffExpr> {
        super::parser::parse(text, self)
    }

    /// Canonical text form, readable back by [`ChartContext::parse`].
    pub fn print(&self, e: &DiffExpr) -> String {
        let mut s = String::new();
        e.write_with(&mut s, &|v| self.var_name(v))
            .expect("writing to a String cannot fail");
        s
    }
}

/// Non-decreasing index sequences of length `k` over `0..n`.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, 0, &mut Vec::new(), &mut out);
    out
}

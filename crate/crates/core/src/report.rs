//! Structured verification outcomes.

use std::fmt;
use std::time::Duration;

use serde::Serialize;

/// Maximum number of witnesses kept per check.
pub const WITNESS_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        })
    }
}

/// A counterexample: where the identity was evaluated and what was left over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// 1-based frame indices, possibly decorated with the probe function, e.g. `(f*e1,e2,e1)`.
    pub location: String,
    /// Canonical form of the nonzero residual.
    pub residual: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.residual)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub witnesses: Vec<Witness>,
    /// Number of failing evaluations (may exceed the stored witnesses).
    pub failures: usize,
    pub note: Option<String>,
    pub elapsed: Duration,
}

impl Check {
    pub fn witness_text(&self) -> Option<String> {
        if let Some(first) = self.witnesses.first() {
            let more = self.failures.saturating_sub(1);
            if more > 0 {
                return Some(format!("{first} (+{more} more)"));
            }
            return Some(first.to_string());
        }
        self.note.clone().filter(|_| self.status == Status::Fail)
    }
}

/// Incremental builder for a single check.
#[derive(Debug)]
pub struct Tally {
    id: String,
    witnesses: Vec<Witness>,
    failures: usize,
    note: Option<String>,
    started: std::time::Instant,
}

impl Tally {
    pub fn new(id: &str) -> Self {
        Tally {
            id: id.to_string(),
            witnesses: Vec::new(),
            failures: 0,
            note: None,
            started: std::time::Instant::now(),
        }
    }

    pub fn fail(&mut self, location: impl Into<String>, residual: impl Into<String>) {
        self.failures += 1;
        if self.witnesses.len() < WITNESS_CAP {
            self.witnesses.push(Witness {
                location: location.into(),
                residual: residual.into(),
            });
        }
    }

    /// Records a failure when `ok` is false.
    pub fn expect(
        &mut self,
        ok: bool,
        location: impl FnOnce() -> String,
        residual: impl FnOnce() -> String,
    ) {
        if !ok {
            self.fail(location(), residual());
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.note = Some(note.into());
    }

    pub fn is_clean(&self) -> bool {
        self.failures == 0
    }

    pub fn finish(self) -> Check {
        Check {
            anchor: anchor(&self.id).to_string(),
            status: if self.failures == 0 {
                Status::Pass
            } else {
                Status::Fail
            },
            id: self.id,
            witnesses: self.witnesses,
            failures: self.failures,
            note: self.note,
            elapsed: self.started.elapsed(),
        }
    }
}

/// A named collection of checks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub artifact: String,
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn new(artifact: impl Into<String>) -> Self {
        CheckReport {
            artifact: artifact.into(),
            checks: Vec::new(),
        }
    }

    /// Adds a check; a check with an id already present is merged into it.
    pub fn push(&mut self, check: Check) {
        let Some(old) = self.checks.iter_mut().find(|c| c.id == check.id) else {
            self.checks.push(check);
            return;
        };
        old.status = match (old.status, check.status) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Pass, _) | (_, Status::Pass) => Status::Pass,
            _ => Status::Skipped,
        };
        // The same identity evaluated twice reports each counterexample once.
        let mut repeats = 0;
        for w in check.witnesses {
            if old.witnesses.contains(&w) {
                repeats += 1;
            } else if old.witnesses.len() < WITNESS_CAP {
                old.witnesses.push(w);
            }
        }
        old.failures += check.failures - repeats;
        old.note = old.note.take().or(check.note);
        old.elapsed += check.elapsed;
    }

    pub fn push_tally(&mut self, tally: Tally) {
        self.push(tally.finish());
    }

    pub fn skip(&mut self, id: &str, reason: &str) {
        self.push(Check {
            id: id.to_string(),
            anchor: anchor(id).to_string(),
            status: Status::Skipped,
            witnesses: Vec::new(),
            failures: 0,
            note: Some(reason.to_string()),
            elapsed: Duration::ZERO,
        });
    }

    pub fn extend(&mut self, other: CheckReport) {
        for c in other.checks {
            self.push(c);
        }
    }

    /// True when no check failed (skipped checks do not count against).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn status(&self, id: &str) -> Option<Status> {
        self.get(id).map(|c| c.status)
    }

    pub fn failed_ids(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .map(|c| c.id.as_str())
            .collect()
    }

    /// Checks sorted by id; the order used for every rendering.
    pub fn sorted(&self) -> Vec<&Check> {
        let mut v: Vec<&Check> = self.checks.iter().collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }

    pub fn to_json(&self, timings: bool) -> String {
        #[derive(Serialize)]
        struct JCheck<'a> {
            id: &'a str,
            anchor: &'a str,
            status: Status,
            witness: Option<String>,
            #[serde(skip_serializing_if = "Option::is_none")]
            seconds: Option<f64>,
        }
        #[derive(Serialize)]
        struct JReport<'a> {
            artifact: &'a str,
            checks: Vec<JCheck<'a>>,
        }
        let j = JReport {
            artifact: &self.artifact,
            checks: self
                .sorted()
                .into_iter()
                .map(|c| JCheck {
                    id: &c.id,
                    anchor: &c.anchor,
                    status: c.status,
                    witness: c.witness_text(),
                    seconds: timings.then(|| c.elapsed.as_secs_f64()),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&j).expect("report serializes")
    }

    pub fn to_text(&self, timings: bool) -> String {
        let mut out = format!("artifact: {}\n", self.artifact);
        for c in self.sorted() {
            out.push_str(&format!("  [{:>7}] {}", c.status, c.id));
            if timings {
                out.push_str(&format!(" ({:.3}s)", c.elapsed.as_secs_f64()));
            }
            out.push('\n');
            out.push_str(&format!("            {}\n", c.anchor));
            if c.status == Status::Skipped {
                if let Some(n) = &c.note {
                    out.push_str(&format!("            skipped: {n}\n"));
                }
            }
            for w in &c.witnesses {
                out.push_str(&format!("            witness {w}\n"));
            }
            if c.failures > c.witnesses.len() {
                out.push_str(&format!(
                    "            ... {} failing evaluations in total\n",
                    c.failures
                ));
            }
            if c.status == Status::Fail && c.witnesses.is_empty() {
                if let Some(n) = &c.note {
                    out.push_str(&format!("            {n}\n"));
                }
            }
        }
        let failed = self.failed_ids().len();
        out.push_str(&format!(
            "{} checks, {} failed\n",
            self.checks.len(),
            failed
        ));
        out
    }
}

/// Renders `sum c_i * name_i` from already printed nonzero coefficients.
pub(crate) fn combination(parts: Vec<(String, String)>) -> String {
    let mut out = String::new();
    for (c, name) in parts {
        let (neg, mag) = match c.strip_prefix('-') {
            Some(rest) if !rest.contains(' ') => (true, rest.to_string()),
            _ => (false, c),
        };
        let term = if mag == "1" {
            name
        } else if mag.contains(' ') {
            format!("({mag})*{name}")
        } else {
            format!("{mag}*{name}")
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// The defining identity behind each check id. Unknown ids map to "".
pub fn anchor(id: &str) -> &'static str {
    ANCHORS
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(_, v)| *v)
        .unwrap_or("")
}

const ANCHORS: &[(&str, &str)] = &[
    (
        "input.preconditions",
        "input satisfies the hypotheses of the construction",
    ),
    (
        "lsa.left_symmetric",
        "(x,y,z) = (y,x,z), (x,y,z) = x(yz) - (xy)z",
    ),
    ("lsa.subadjacent_skew", "[x,y] = xy - yx is skew"),
    ("lsa.subadjacent_jacobi", "[x,[y,z]] + c.p. = 0"),
    ("lsa.left_representation", "L_[x,y] = [L_x, L_y]"),
    ("lsa.form_skew", "w(x,y) = -w(y,x)"),
    ("lsa.form_nondegenerate", "det w != 0"),
    ("lsa.invariant_form", "(a.b, c) + (b, [a,c]) = 0"),
    ("lsa.form_closed", "w([x,y],z) + c.p. = 0"),
    ("lsa.rep_lie", "rho([x,y]) = [rho(x), rho(y)]"),
    (
        "lsa.rep_compat",
        "rho(x)mu(y) - mu(y)rho(x) = mu(x.y) - mu(y)mu(x)",
    ),
    (
        "lsa.symplectic_lie_roundtrip",
        "[x,y]_g = x.y - y.x for x.y = (w#)^-1 ad*_x w#(y)",
    ),
    ("lsa.coboundary_square", "delta(delta(phi)) = 0"),
    ("lsa.subcomplex", "delta(C~^n) in C~^(n+1)"),
    ("algebroid.skew", "[e_a,e_b] = -[e_b,e_a]"),
    ("algebroid.jacobi", "[x,[y,f z]] + c.p. = 0"),
    ("algebroid.leibniz", "[x,f y] = f[x,y] + a(x)(f) y"),
    ("algebroid.anchor_morphism", "a([x,y]) = [a(x), a(y)]"),
    ("lsalgebroid.left_leibniz", "x.(f y) = f(x.y) + a(x)(f) y"),
    ("lsalgebroid.left_linear", "(f x).y = f(x.y)"),
    ("lsalgebroid.associator", "(x,y,z) = (y,x,z)"),
    ("algebroid.cocycle", "d w(x,y,z) = 0"),
    ("algebroid.form_nondegenerate", "det w != 0"),
    ("algebroid.d_squared", "d(d w) = 0"),
    (
        "algebroid.lie_derivative",
        "<L_x xi, y> = a(x)<xi,y> - <xi,[x,y]>",
    ),
    ("presym.pairing", "(x,y)_- skew and nondegenerate"),
    (
        "presym.def_i",
        "(e1,e2,e3) - (e2,e1,e3) = 1/6 D T(e1,e2,e3)",
    ),
    (
        "presym.def_ii",
        "rho(e1)(e2,e3) = (e1*e2 - 1/2 D(e1,e2), e3) + (e2, [e1,e3])",
    ),
    (
        "presym.leibniz_right",
        "e1*(f e2) = f(e1*e2) + rho(e1)(f) e2 + 1/2 (e1,e2) Df",
    ),
    (
        "presym.leibniz_bracket",
        "[e1,f e2] = f[e1,e2] + rho(e1)(f) e2",
    ),
    (
        "presym.leibniz_left",
        "(f e1)*e2 = f(e1*e2) - 1/2 (e1,e2) Df",
    ),
    ("presym.cyclic_t", "T(e1,e2,e3) + c.p. = 0"),
    ("presym.star_df", "e*Df = 1/2 D(Df,e)"),
    ("presym.d_leibniz", "D(fg) = f Dg + g Df"),
    ("presym.d_duality", "(Df, e) = rho(e)(f)"),
    (
        "presym.t_closed_form",
        "T(e1,e2,e3) = 3([e1,e2],e3) + 3/2 rho(e2)(e1,e3) - 3/2 rho(e1)(e2,e3)",
    ),
    ("presym.bracket_matches", "e1*e2 - e2*e1 = [e1,e2]"),
    ("presym.pairing_matches", "(x,y)_- = w(x,y)"),
    (
        "presym.roundtrip_star",
        "star from (bracket, w) equals the original star",
    ),
    (
        "presym.star_matches",
        "star from (bracket, w) equals the stated star",
    ),
    (
        "presym.induced_matches",
        "product induced on A equals the product of A",
    ),
    (
        "presym.roundtrip_bracket",
        "bracket from the derived star equals the original bracket",
    ),
    ("dirac.rank", "rank F = rank E / 2"),
    ("dirac.independent", "spanning sections independent"),
    ("dirac.isotropic", "(F, F)_- = 0"),
    ("dirac.integrable", "Gamma(F) * Gamma(F) in Gamma(F)"),
    (
        "dirac.induced",
        "induced product is a left-symmetric algebroid",
    ),
    ("exact.rank", "rank E = 2 dim M"),
    ("exact.anchor_surjective", "rank rho = dim M"),
    (
        "exact.kernel_image",
        "ker rho = im rho*, (rho*(xi), e) = <xi, rho(e)>",
    ),
    (
        "exact.anchor_connection",
        "rho(e1*e2) = nabla_rho(e1) rho(e2)",
    ),
    ("exact.connection_torsion", "Gamma^k_ij = Gamma^k_ji"),
    ("exact.connection_flat", "R(d_i,d_j) d_k = 0"),
    ("exact.splitting", "rho(sigma(x)) = x"),
    ("exact.splitting_isotropic", "(sigma(x), sigma(y))_- = 0"),
    (
        "exact.phi_image",
        "sigma(x)*sigma(y) - sigma(nabla_x y) in im rho*",
    ),
    (
        "exact.phi_tensorial",
        "phi(f x, y) = f phi(x,y) = phi(x, f y)",
    ),
    ("exact.phi_ii", "phi(x,y,z) = phi(x,z,y) - phi(z,x,y)"),
    ("exact.phi_13skew", "phi(x,y,z) = -phi(z,y,x)"),
    (
        "exact.phi_cyclic",
        "phi~(x,y,z) + c.p. = 0, phi~(x,y,z) = phi(x,z,y)",
    ),
    ("exact.phi_closed", "delta phi~ = 0"),
    (
        "exact.phi_roundtrip",
        "phi from the canonical splitting equals the twisting tensor",
    ),
    ("exact.theta_symmetric", "theta(x,y) = theta(y,x)"),
    (
        "exact.equiv_anchor",
        "rho2(Psi(e)) = rho1(e), Psi(x+xi) = x + theta(x) + xi",
    ),
    ("exact.equiv_pairing", "(Psi e1, Psi e2)_2 = (e1, e2)_1"),
    ("exact.equiv_star", "Psi(e1 *1 e2) = Psi(e1) *2 Psi(e2)"),
    ("pk.involution", "P^2 = id"),
    ("pk.anti_invariance", "(P x, P y)_- = -(x,y)_-"),
    (
        "pk.integrability",
        "P(e1*e2) = P(e1)*e2 + e1*P(e2) - P(P(e1)*P(e2))",
    ),
    (
        "pk.bracket_integrability",
        "P[e1,e2] = [Pe1,e2] + [e1,Pe2] - P[Pe1,Pe2]",
    ),
    ("pk.para_kahler", "w(P e1, e2) + w(e1, P e2) = 0"),
    ("pk.dirac_plus", "E+ is a Dirac structure"),
    ("pk.dirac_minus", "E- is a Dirac structure"),
    ("pk.metric_symmetric", "g(e1,e2) = w(e1,P e2) is symmetric"),
    ("pk.metric_nondegenerate", "det g != 0"),
    ("pk.metric_anti_invariance", "g(P e1, P e2) = -g(e1,e2)"),
    ("pk.metric_roundtrip", "w(e1,e2) = g(e1, P e2)"),
    ("pk.eigen_isotropic", "g(E+,E+) = 0 = g(E-,E-)"),
    (
        "pk.levi_civita_metric",
        "rho(e1) g(e2,e3) = g(nabla_e1 e2, e3) + g(e2, nabla_e1 e3)",
    ),
    (
        "pk.levi_civita_torsion",
        "[e1,e2] = nabla_e1 e2 - nabla_e2 e1",
    ),
    ("pk.nabla_p", "nabla_e1 P(e2) = P(nabla_e1 e2)"),
    ("pk.star_nabla_plus", "nabla_x y = x*y on E+"),
    ("pk.star_nabla_minus", "nabla_xi eta = xi*eta on E-"),
    ("pk.converse_closed", "w(e1,e2) = g(e1,P e2) is closed"),
    ("pk.converse_roundtrip", "w -> g -> w is the identity"),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_sorted_and_stable() {
        let mut r = CheckReport::new("demo");
        let mut t = Tally::new("presym.def_ii");
        t.fail("(1,2,1)", "-1");
        r.push_tally(t);
        r.push_tally(Tally::new("presym.def_i"));
        r.skip("pk.involution", "no para-complex structure");
        let a = r.to_json(false);
        assert_eq!(a, r.to_json(false));
        let i = a.find("presym.def_i\"").unwrap();
        let ii = a.find("presym.def_ii").unwrap();
        assert!(i < ii);
        assert!(a.contains("\"witness\": \"(1,2,1): -1\""));
        assert!(!a.contains("seconds"));
        assert!(!r.passed());
    }

    #[test]
    fn every_anchor_is_unique() {
        let mut ids: Vec<&str> = ANCHORS.iter().map(|(k, _)| *k).collect();
        ids.sort_unstable();
        let n = ids.len();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }
}

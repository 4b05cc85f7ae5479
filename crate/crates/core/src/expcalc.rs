//! Exact rational calculus over error-term monomials.
//!
//! A term is N^{eN} t^{et} T^{eT} Q^{eQ} R^{eR} X^{eX} · p^{a + b·k + c·λ}.
//! Substitution rewrites Q, R, X away; balancing sets T = t^θ, λ = ρ·k,
//! saturates N = (p^k t)^{3/2}, and reads off the exponent of (p^k·t) that
//! dominates, together with the residual pure-p offset.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub type Rat = Rational64;

#[derive(Debug, Error, PartialEq)]
pub enum ExpCalcError {
    #[error("unknown symbol `{0}` in monomial")]
    UnknownSymbol(String),
    #[error("empty ledger")]
    EmptyLedger,
    #[error("parse error in `{0}`: {1}")]
    Parse(String, String),
}

/// Affine form a + b·k + c·λ for the exponent of p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PAffine {
    pub constant: Rat,
    pub k_coeff: Rat,
    pub lambda_coeff: Rat,
}

impl PAffine {
    pub fn add(&self, other: &PAffine) -> PAffine {
        PAffine {
            constant: self.constant + other.constant,
            k_coeff: self.k_coeff + other.k_coeff,
            lambda_coeff: self.lambda_coeff + other.lambda_coeff,
        }
    }

    pub fn scale(&self, s: Rat) -> PAffine {
        PAffine {
            constant: self.constant * s,
            k_coeff: self.k_coeff * s,
            lambda_coeff: self.lambda_coeff * s,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.k_coeff.is_zero() && self.lambda_coeff.is_zero()
    }
}

impl fmt::Display for PAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.constant.is_zero() {
            parts.push(format!("{}", self.constant));
        }
        if !self.k_coeff.is_zero() {
            parts.push(format!("{}k", self.k_coeff));
        }
        if !self.lambda_coeff.is_zero() {
            parts.push(format!("{}λ", self.lambda_coeff));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Symbols a monomial may carry besides p.
pub const SYMBOLS: [&str; 6] = ["N", "t", "T", "Q", "R", "X"];

/// One ledger entry: a provenance label, rational exponents for the six
/// symbols, and an affine p-exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentTerm {
    pub label: String,
    pub exps: BTreeMap<&'static str, Rat>,
    pub p_exp: PAffine,
}

impl ExponentTerm {
    pub fn new(label: &str) -> Self {
        Self { label: label.to_string(), exps: BTreeMap::new(), p_exp: PAffine::default() }
    }

    pub fn with(mut self, sym: &'static str, num: i64, den: i64) -> Self {
        *self.exps.entry(sym).or_insert_with(Rat::zero) += Rat::new(num, den);
        self
    }

    pub fn with_p(mut self, constant: Rat, k_coeff: Rat, lambda_coeff: Rat) -> Self {
        self.p_exp = PAffine { constant, k_coeff, lambda_coeff };
        self
    }

    pub fn exp(&self, sym: &str) -> Rat {
        self.exps.get(sym).copied().unwrap_or_else(Rat::zero)
    }

    /// Product of two terms adds exponents; labels join.
    pub fn mul(&self, other: &ExponentTerm) -> ExponentTerm {
        let mut out = self.clone();
        out.label = format!("{}*{}", self.label, other.label);
        for (sym, e) in &other.exps {
            *out.exps.entry(sym).or_insert_with(Rat::zero) += *e;
        }
        out.p_exp = out.p_exp.add(&other.p_exp);
        out
    }

    pub fn monomial_string(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for sym in SYMBOLS {
            let e = self.exp(sym);
            if !e.is_zero() {
                parts.push(format!("{sym}^{{{e}}}"));
            }
        }
        if !self.p_exp.is_zero() {
            parts.push(format!("p^{{{}}}", self.p_exp));
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }
}

/// The saturation rules applied before balancing:
/// R → Q, X → 1, Q → N^{1/2} p^{−λ/2} T^{−1}.
#[derive(Debug, Clone, Copy, Default)]
pub struct SubstitutionRules;

impl SubstitutionRules {
    /// Rewrite a term over the basis (N, t, T, p^{a+bk+cλ}).
    pub fn apply(&self, term: &ExponentTerm) -> Result<ExponentTerm, ExpCalcError> {
        for sym in term.exps.keys() {
            if !SYMBOLS.contains(sym) {
                return Err(ExpCalcError::UnknownSymbol(sym.to_string()));
            }
        }
        let mut out = term.clone();
        // R saturates at Q
        let e_r = out.exps.remove("R").unwrap_or_else(Rat::zero);
        *out.exps.entry("Q").or_insert_with(Rat::zero) += e_r;
        // X saturates at 1
        out.exps.remove("X");
        // Q = N^{1/2} p^{-λ/2} T^{-1}
        let e_q = out.exps.remove("Q").unwrap_or_else(Rat::zero);
        if !e_q.is_zero() {
            *out.exps.entry("N").or_insert_with(Rat::zero) += e_q * Rat::new(1, 2);
            *out.exps.entry("T").or_insert_with(Rat::zero) -= e_q;
            out.p_exp.lambda_coeff -= e_q * Rat::new(1, 2);
        }
        out.exps.retain(|_, v| !v.is_zero());
        Ok(out)
    }
}

pub fn substitute(term: &ExponentTerm, rules: &SubstitutionRules) -> Result<ExponentTerm, ExpCalcError> {
    rules.apply(term)
}

/// Exponent pair of one substituted term at (θ, ρ) after dividing by N^{1/2}
/// and saturating N = (p^k t)^{3/2}: the t-exponent and the p^k-exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TermExponents {
    pub t_exp: Rat,
    pub q_exp: Rat,
}

impl TermExponents {
    /// Worst of the two directions; bounds the term by (p^k t)^max.
    pub fn joint(&self) -> Rat {
        self.t_exp.max(self.q_exp)
    }
}

/// Evaluate a substituted term (symbols N, t, T and p-affine only).
pub fn term_exponents(term: &ExponentTerm, theta: Rat, rho: Rat) -> Result<TermExponents, ExpCalcError> {
    for sym in term.exps.keys() {
        if !["N", "t", "T"].contains(sym) {
            return Err(ExpCalcError::UnknownSymbol(format!("{sym} (substitute first)")));
        }
    }
    let a = term.exp("N") - Rat::new(1, 2); // the S(N)/sqrt(N) normalization
    let n_contrib = a * Rat::new(3, 2);
    let t_exp = n_contrib + term.exp("T") * theta + term.exp("t");
    let q_exp = n_contrib + term.p_exp.k_coeff + term.p_exp.lambda_coeff * rho;
    Ok(TermExponents { t_exp, q_exp })
}

#[derive(Debug, Clone, Serialize)]
pub struct BalanceReport {
    /// max over terms of max(t-exponent, p^k-exponent) at (θ, ρ).
    pub qt_exponent: String,
    pub qt_exponent_f64: f64,
    /// Residual pure-p offset max over active terms.
    pub p_slack: String,
    pub p_slack_f64: f64,
    /// Extra p-power a unit shift of λ can contribute, max over active terms.
    pub floor_slack: String,
    /// Labels of the terms attaining the maximum.
    pub active: Vec<String>,
    pub dominating: String,
}

/// Evaluate the ledger at T = t^θ, λ = ρ·k, N = (p^k t)^{3/2}; report the
/// dominating exponent of (p^k·t), the active set, and the p offsets.
pub fn balance(terms: &[ExponentTerm], theta: Rat, rho: Rat) -> Result<BalanceReport, ExpCalcError> {
    if terms.is_empty() {
        return Err(ExpCalcError::EmptyLedger);
    }
    let evaluated: Vec<(usize, TermExponents)> = terms
        .iter()
        .enumerate()
        .map(|(i, t)| Ok((i, term_exponents(t, theta, rho)?)))
        .collect::<Result<_, ExpCalcError>>()?;
    let max_exp = evaluated.iter().map(|(_, e)| e.joint()).max().unwrap();
    let active: Vec<usize> =
        evaluated.iter().filter(|(_, e)| e.joint() == max_exp).map(|(i, _)| *i).collect();
    let p_slack = active
        .iter()
        .map(|&i| terms[i].p_exp.constant)
        .max()
        .unwrap_or_else(Rat::zero);
    let floor_slack = active
        .iter()
        .map(|&i| terms[i].p_exp.lambda_coeff.max(Rat::zero()))
        .max()
        .unwrap_or_else(Rat::zero);
    Ok(BalanceReport {
        qt_exponent: max_exp.to_string(),
        qt_exponent_f64: rat_f64(max_exp),
        p_slack: p_slack.to_string(),
        p_slack_f64: rat_f64(p_slack),
        floor_slack: floor_slack.to_string(),
        active: active.iter().map(|&i| terms[i].label.clone()).collect(),
        dominating: terms[active[0]].label.clone(),
    })
}

pub fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeReport {
    pub theta: f64,
    pub rho: f64,
    pub theta_exact: Option<String>,
    pub rho_exact: Option<String>,
    pub exponent: String,
    pub exponent_f64: f64,
    pub active: Vec<String>,
}

/// Minimax over (θ, ρ) by coarse grid, local refinement, and a final snap of
/// the refined point to small-denominator rationals (kept only when it does
/// not increase the objective).
pub fn optimize(terms: &[ExponentTerm]) -> Result<OptimizeReport, ExpCalcError> {
    if terms.is_empty() {
        return Err(ExpCalcError::EmptyLedger);
    }
    let objective = |th: Rat, rh: Rat| -> Rat {
        terms
            .iter()
            .map(|t| term_exponents(t, th, rh).expect("substituted ledger").joint())
            .max()
            .unwrap()
    };
    // coarse pass on a 1/100 lattice over [0,1] x [0,2/3]
    let mut best = (Rat::zero(), Rat::zero(), objective(Rat::zero(), Rat::zero()));
    for i in 0..=100i64 {
        for j in 0..=66i64 {
            let th = Rat::new(i, 100);
            let rh = Rat::new(j, 100);
            let v = objective(th, rh);
            if v < best.2 {
                best = (th, rh, v);
            }
        }
    }
    // refinement to 1/8000 resolution around the incumbent
    for scale in [1000i64, 8000] {
        let (tc, rc, _) = best;
        let span = 2 * scale / 100;
        let t0 = (tc * Rat::new(scale, 1)).to_integer();
        let r0 = (rc * Rat::new(scale, 1)).to_integer();
        for di in -span..=span {
            for dj in -span..=span {
                let ti = t0 + di;
                let rj = r0 + dj;
                if ti < 0 || rj < 0 || ti > scale || 3 * rj > 2 * scale {
                    continue;
                }
                let th = Rat::new(ti, scale);
                let rh = Rat::new(rj, scale);
                let v = objective(th, rh);
                if v < best.2 {
                    best = (th, rh, v);
                }
            }
        }
    }
    // snap to the nicest nearby rational that does not hurt the objective
    let snap = |x: Rat| -> Option<Rat> {
        for den in 1..=40i64 {
            let num = (rat_f64(x) * den as f64).round() as i64;
            let cand = Rat::new(num, den);
            if (rat_f64(cand) - rat_f64(x)).abs() < 2e-3 {
                return Some(cand);
            }
        }
        None
    };
    let (mut th, mut rh, mut val) = best;
    let mut th_exact = None;
    let mut rh_exact = None;
    if let (Some(ts), Some(rs)) = (snap(th), snap(rh)) {
        let v = objective(ts, rs);
        if v <= val {
            th = ts;
            rh = rs;
            val = v;
            th_exact = Some(ts.to_string());
            rh_exact = Some(rs.to_string());
        }
    }
    let report = balance(terms, th, rh)?;
    Ok(OptimizeReport {
        theta: rat_f64(th),
        rho: rat_f64(rh),
        theta_exact: th_exact,
        rho_exact: rh_exact,
        exponent: val.to_string(),
        exponent_f64: rat_f64(val),
        active: report.active,
    })
}

/// Parse one ledger line: `label | monomial | p-affine`, e.g.
/// `sec9 term 1 | N^{3/4} T^{3/4} | 3λ/4`. The p-affine field may be empty
/// or `0`; the monomial `1` means the empty product.
pub fn parse_ledger_line(line: &str) -> Result<ExponentTerm, ExpCalcError> {
    let mk_err = |msg: &str| ExpCalcError::Parse(line.to_string(), msg.to_string());
    let fields: Vec<&str> = line.split('|').map(str::trim).collect();
    if fields.len() != 3 {
        return Err(mk_err("expected `label | monomial | p-affine`"));
    }
    let mut term = ExponentTerm::new(fields[0]);
    if fields[1] != "1" && !fields[1].is_empty() {
        for factor in fields[1].split_whitespace() {
            let (sym, exp) = parse_factor(factor).map_err(|m| mk_err(&m))?;
            let sym_static = SYMBOLS
                .iter()
                .find(|s| **s == sym)
                .ok_or_else(|| ExpCalcError::UnknownSymbol(sym.clone()))?;
            *term.exps.entry(sym_static).or_insert_with(Rat::zero) += exp;
        }
    }
    term.p_exp = parse_affine(fields[2]).map_err(|m| mk_err(&m))?;
    Ok(term)
}

/// `N^{3/2}` or `Q^{-2}` or bare `X`.
fn parse_factor(tok: &str) -> Result<(String, Rat), String> {
    match tok.split_once('^') {
        None => Ok((tok.to_string(), Rat::new(1, 1))),
        Some((sym, exp)) => {
            let cleaned = exp.trim_start_matches('{').trim_end_matches('}');
            Ok((sym.to_string(), parse_rat(cleaned)?))
        }
    }
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        None => (s, "1"),
        Some((n, d)) => (n, d),
    };
    let n: i64 = num.trim().parse().map_err(|_| format!("bad rational `{s}`"))?;
    let d: i64 = den.trim().parse().map_err(|_| format!("bad rational `{s}`"))?;
    if d == 0 {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rat::new(n, d))
}

/// Affine p-exponent: terms like `3λ/4`, `k/2`, `1/4`, joined by `+`/`-`.
fn parse_affine(s: &str) -> Result<PAffine, String> {
    let s = s.trim();
    if s.is_empty() || s == "0" {
        return Ok(PAffine::default());
    }
    let mut out = PAffine::default();
    // split into signed chunks
    let normalized = s.replace(" - ", " + -").replace('−', "-");
    for chunk in normalized.split('+') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let (neg, body) = match chunk.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, chunk),
        };
        let (has_l, has_k) = (body.contains('λ') || body.contains("lambda"), body.contains('k'));
        let cleaned: String =
            body.replace('λ', "").replace("lambda", "").replace('k', "").replace('*', "");
        let cleaned = cleaned.trim();
        let mag = if cleaned.is_empty() || cleaned == "/" {
            Rat::new(1, 1)
        } else if let Some(stripped) = cleaned.strip_prefix('/') {
            Rat::new(1, stripped.trim().parse::<i64>().map_err(|_| format!("bad `{chunk}`"))?)
        } else if let Some(stripped) = cleaned.strip_suffix('/') {
            let n: i64 = stripped.trim().parse().map_err(|_| format!("bad `{chunk}`"))?;
            Rat::new(n, 1)
        } else {
            parse_rat(cleaned)?
        };
        let val = if neg { -mag } else { mag };
        if has_l && has_k {
            return Err(format!("chunk `{chunk}` mixes k and λ"));
        } else if has_l {
            out.lambda_coeff += val;
        } else if has_k {
            out.k_coeff += val;
        } else {
            out.constant += val;
        }
    }
    Ok(out)
}

/// Parse a whole ledger file; `#` starts a comment, blank lines skipped.
pub fn parse_ledger(text: &str) -> Result<Vec<ExponentTerm>, ExpCalcError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_ledger_line)
        .collect()
}

/// The nine final balancing terms, stored verbatim as the primary dataset.
pub const FINAL_LEDGER: &str = include_str!("../data/final_terms.ledger");
/// The upstream per-case bounds feeding the second derivation path.
pub const UPSTREAM_LEDGER: &str = include_str!("../data/upstream_terms.ledger");

pub fn final_ledger() -> Vec<ExponentTerm> {
    parse_ledger(FINAL_LEDGER).expect("embedded ledger parses")
}

pub fn upstream_ledger() -> Vec<ExponentTerm> {
    parse_ledger(UPSTREAM_LEDGER).expect("embedded ledger parses")
}

/// One row of the substitute-then-collect cross-check: an upstream term,
/// its substituted image, and the closest final-ledger entry (if any)
/// together with the mismatch in exponents.
#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckRow {
    pub upstream: String,
    pub substituted: String,
    pub closest_final: Option<String>,
    pub matches: bool,
    pub mismatch: Option<String>,
}

/// Substitute every upstream term and report whether it lands on a final
/// ledger entry. Mismatches are surfaced with both values; nothing is
/// corrected silently.
pub fn cross_check() -> Result<Vec<CrossCheckRow>, ExpCalcError> {
    let rules = SubstitutionRules;
    let finals = final_ledger();
    let mut rows = Vec::new();
    for up in upstream_ledger() {
        let sub = rules.apply(&up)?;
        // distance over (N, t, T, p) exponents at a reference direction
        let dist = |f: &ExponentTerm| -> Rat {
            let mut d = Rat::zero();
            for sym in ["N", "t", "T"] {
                d += (sub.exp(sym) - f.exp(sym)).abs();
            }
            d += (sub.p_exp.constant - f.p_exp.constant).abs();
            d += (sub.p_exp.k_coeff - f.p_exp.k_coeff).abs();
            d += (sub.p_exp.lambda_coeff - f.p_exp.lambda_coeff).abs();
            d
        };
        let closest = finals.iter().min_by_key(|f| dist(f));
        match closest {
            None => rows.push(CrossCheckRow {
                upstream: up.label.clone(),
                substituted: sub.monomial_string(),
                closest_final: None,
                matches: false,
                mismatch: Some("empty final ledger".into()),
            }),
            Some(f) => {
                let d = dist(f);
                let matches = d.is_zero();
                rows.push(CrossCheckRow {
                    upstream: up.label.clone(),
                    substituted: sub.monomial_string(),
                    closest_final: Some(format!("{} = {}", f.label, f.monomial_string())),
                    matches,
                    mismatch: if matches { None } else { Some(format!("exponent distance {d}")) },
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_examples() {
        let rules = SubstitutionRules;
        // N^{3/2} X^2 R^{1/2} Q^{-2} → N^{3/4} T^{3/2} p^{3λ/4}
        let t = ExponentTerm::new("zero freq leading")
            .with("N", 3, 2)
            .with("X", 2, 1)
            .with("R", 1, 2)
            .with("Q", -2, 1);
        let s = rules.apply(&t).unwrap();
        assert_eq!(s.exp("N"), Rat::new(3, 4));
        assert_eq!(s.exp("T"), Rat::new(3, 2));
        assert_eq!(s.p_exp.lambda_coeff, Rat::new(3, 4));
        // identity on terms without Q, R, X
        let t2 = ExponentTerm::new("pure").with("N", 1, 4).with("t", 1, 2);
        assert_eq!(rules.apply(&t2).unwrap().exps, t2.exps);
        let t3 = ExponentTerm::new("unknown");
        let mut t3 = t3;
        t3.exps.insert("Q", Rat::zero());
        assert!(rules.apply(&t3).is_ok());
    }

    #[test]
    fn substitution_is_multiplicative() {
        let rules = SubstitutionRules;
        let t1 = ExponentTerm::new("a").with("N", 1, 2).with("Q", -1, 1).with("R", 2, 1);
        let t2 = ExponentTerm::new("b").with("X", 1, 1).with("Q", 1, 2).with_p(
            Rat::new(1, 4),
            Rat::new(1, 2),
            Rat::zero(),
        );
        let lhs = rules.apply(&t1.mul(&t2)).unwrap();
        let rhs = rules.apply(&t1).unwrap().mul(&rules.apply(&t2).unwrap());
        assert_eq!(lhs.exps, rhs.exps);
        assert_eq!(lhs.p_exp, rhs.p_exp);
    }

    #[test]
    fn final_ledger_balances_to_advertised_exponent() {
        let terms = final_ledger();
        assert_eq!(terms.len(), 9);
        let report = balance(&terms, Rat::new(2, 5), Rat::new(2, 5)).unwrap();
        assert_eq!(report.qt_exponent, "27/40");
        assert_eq!(report.p_slack, "3/4");
        assert!(report.active.len() >= 2, "active: {:?}", report.active);
    }

    #[test]
    fn single_term_monotone_in_theta() {
        let t = ExponentTerm::new("single").with("T", 3, 4); // t^{3θ/4} after T = t^θ
        let lo = balance(std::slice::from_ref(&t), Rat::new(0, 1), Rat::new(1, 5)).unwrap();
        let hi = balance(std::slice::from_ref(&t), Rat::new(1, 2), Rat::new(1, 5)).unwrap();
        assert!(lo.qt_exponent_f64 < hi.qt_exponent_f64);
    }

    #[test]
    fn symmetric_crossing_optimum() {
        // two terms t^θ and t^{1-θ} cross at θ = 1/2
        let t1 = ExponentTerm::new("up").with("T", 1, 1);
        let t2 = ExponentTerm::new("down").with("T", -1, 1).with("t", 1, 1);
        let rep = optimize(&[t1, t2]).unwrap();
        assert!((rep.theta - 0.5).abs() < 2e-3, "theta = {}", rep.theta);
    }

    #[test]
    fn optimizer_recovers_two_fifths() {
        let rep = optimize(&final_ledger()).unwrap();
        assert!((rep.theta - 0.4).abs() < 1e-3);
        assert!((rep.rho - 0.4).abs() < 1e-3);
        assert_eq!(rep.theta_exact.as_deref(), Some("2/5"));
        assert_eq!(rep.rho_exact.as_deref(), Some("2/5"));
        assert!((rep.exponent_f64 - 27.0 / 40.0).abs() < 1e-9);
        assert!(rep.active.len() >= 2);
    }

    #[test]
    fn perturbation_certificate() {
        let terms = final_ledger();
        let base = balance(&terms, Rat::new(2, 5), Rat::new(2, 5)).unwrap().qt_exponent_f64;
        let eps = Rat::new(1, 1000);
        let up_t = balance(&terms, Rat::new(2, 5) + eps, Rat::new(2, 5)).unwrap().qt_exponent_f64;
        let down_t = balance(&terms, Rat::new(2, 5) - eps, Rat::new(2, 5)).unwrap().qt_exponent_f64;
        assert!(up_t > base && down_t > base);
        let up_r = balance(&terms, Rat::new(2, 5), Rat::new(2, 5) + eps).unwrap().qt_exponent_f64;
        let down_r = balance(&terms, Rat::new(2, 5), Rat::new(2, 5) - eps).unwrap().qt_exponent_f64;
        assert!(up_r > base || down_r > base);
    }

    #[test]
    fn ledger_roundtrip() {
        let line = "test term | N^{3/4} T^{-1/2} X | k/2 + 3λ/4 - 1/4";
        let t = parse_ledger_line(line).unwrap();
        assert_eq!(t.exp("N"), Rat::new(3, 4));
        assert_eq!(t.exp("T"), Rat::new(-1, 2));
        assert_eq!(t.exp("X"), Rat::new(1, 1));
        assert_eq!(t.p_exp.k_coeff, Rat::new(1, 2));
        assert_eq!(t.p_exp.lambda_coeff, Rat::new(3, 4));
        assert_eq!(t.p_exp.constant, Rat::new(-1, 4));
        assert!(parse_ledger_line("oops | Z^{1} | 0").is_err());
    }

    #[test]
    fn cross_check_reports_known_mismatches() {
        let rows = cross_check().unwrap();
        assert!(!rows.is_empty());
        // the leading zero-frequency contribution is known to land off the
        // final list (T-power bookkeeping); assert we surface it rather than
        // silently matching everything
        assert!(rows.iter().any(|r| !r.matches));
        for r in rows.iter().filter(|r| !r.matches) {
            assert!(r.mismatch.is_some());
        }
    }
}

//! Exact rational linear systems and Fourier-Motzkin elimination.
//!
//! Strict inequalities are represented by their closures (`<=`). Rows are
//! kept normalised (first nonzero coefficient scaled to magnitude one) so
//! duplicate detection is syntactic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, One, Signed, Zero};
use thiserror::Error;

use crate::lp::{self, LpOutcome, LpRow, RowKind};
use crate::region::{ConvexPolygon, HalfPlane, RatePoint, RateRegion2D};

pub use crate::lp::Rational;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("expected a system over exactly R1 and R2, found [{0}]")]
    NotPlanar(String),
    #[error("projected region is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Le,
    Eq,
}

/// `sum coeffs[v] * v  (<= | =)  rhs`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinIneq {
    coeffs: BTreeMap<String, Rational>,
    rhs: Rational,
    relation: Relation,
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Rounds `x` to 12 decimal digits and returns it as an exact rational.
pub fn to_rational_12(x: f64) -> Rational {
    assert!(x.is_finite(), "cannot convert non-finite value {x}");
    let scaled = (x * 1e12).round() as i128;
    Rational::new(BigInt::from(scaled), BigInt::from(1_000_000_000_000i64))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

impl LinIneq {
    pub fn new<S: Into<String>>(
        terms: impl IntoIterator<Item = (S, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> Self {
        let mut coeffs: BTreeMap<String, Rational> = BTreeMap::new();
        for (v, c) in terms {
            *coeffs.entry(v.into()).or_insert_with(Rational::zero) += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        LinIneq { coeffs, rhs, relation }
    }

    pub fn le<S: Into<String>>(terms: impl IntoIterator<Item = (S, Rational)>, rhs: Rational) -> Self {
        Self::new(terms, Relation::Le, rhs)
    }

    /// `terms >= rhs`, stored as `-terms <= -rhs`.
    pub fn ge<S: Into<String>>(terms: impl IntoIterator<Item = (S, Rational)>, rhs: Rational) -> Self {
        Self::new(terms.into_iter().map(|(v, c)| (v, -c)), Relation::Le, -rhs)
    }

    pub fn eq<S: Into<String>>(terms: impl IntoIterator<Item = (S, Rational)>, rhs: Rational) -> Self {
        Self::new(terms, Relation::Eq, rhs)
    }

    /// The infeasibility marker `0 <= -1`.
    pub fn contradiction() -> Self {
        LinIneq { coeffs: BTreeMap::new(), rhs: int(-1), relation: Relation::Le }
    }

    pub fn coeffs(&self) -> &BTreeMap<String, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, var: &str) -> Rational {
        self.coeffs.get(var).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn rhs(&self) -> &Rational {
        &self.rhs
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    /// No variables and always satisfied.
    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty()
            && match self.relation {
                Relation::Le => !self.rhs.is_negative(),
                Relation::Eq => self.rhs.is_zero(),
            }
    }

    /// No variables and never satisfied.
    pub fn is_contradiction(&self) -> bool {
        self.coeffs.is_empty() && !self.is_trivial()
    }

    pub fn lhs_at(&self, point: &BTreeMap<String, Rational>) -> Rational {
        self.coeffs.iter().fold(Rational::zero(), |acc, (v, c)| {
            acc + c * point.get(v).cloned().unwrap_or_else(Rational::zero)
        })
    }

    /// Missing variables are read as zero.
    pub fn satisfied_by(&self, point: &BTreeMap<String, Rational>) -> bool {
        let l = self.lhs_at(point);
        match self.relation {
            Relation::Le => l <= self.rhs,
            Relation::Eq => l == self.rhs,
        }
    }

    fn scaled(&self, k: &Rational) -> LinIneq {
        LinIneq {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            rhs: &self.rhs * k,
            relation: self.relation,
        }
    }

    fn plus(&self, other: &LinIneq) -> LinIneq {
        let relation = if self.relation == Relation::Eq && other.relation == Relation::Eq {
            Relation::Eq
        } else {
            Relation::Le
        };
        LinIneq::new(
            self.coeffs.iter().chain(other.coeffs.iter()).map(|(v, c)| (v.clone(), c.clone())),
            relation,
            &self.rhs + &other.rhs,
        )
    }

    /// Scales so the first coefficient has magnitude one (and, for
    /// equalities, is positive). Variable-free rows become `0 <= 0`,
    /// `0 <= -1` or `0 = 0`.
    pub fn normalized(&self) -> LinIneq {
        match self.coeffs.values().next() {
            None => {
                if self.is_trivial() {
                    LinIneq { coeffs: BTreeMap::new(), rhs: Rational::zero(), relation: self.relation }
                } else {
                    LinIneq::contradiction()
                }
            }
            Some(first) => {
                let k = match self.relation {
                    Relation::Le => first.abs().recip(),
                    Relation::Eq => first.recip(),
                };
                self.scaled(&k)
            }
        }
    }

    /// Substitutes `var = (eq.rhs - rest) / eq.coeff(var)`.
    fn substitute(&self, var: &str, eq: &LinIneq) -> LinIneq {
        let k = self.coeff(var);
        if k.is_zero() {
            return self.clone();
        }
        let f = -(&k / eq.coeff(var));
        let mut out = self.plus(&eq.scaled(&f));
        out.relation = self.relation;
        out
    }
}

impl fmt::Display for LinIneq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (k, (v, c)) in self.coeffs.iter().enumerate() {
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            match (k, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            if mag.is_one() {
                write!(f, "{v}")?;
            } else {
                write!(f, "{mag}*{v}")?;
            }
        }
        let rel = match self.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
        };
        write!(f, " {rel} {}", self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinSystem {
    vars: Vec<String>,
    ineqs: Vec<LinIneq>,
}

impl LinSystem {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Self {
        let mut seen = BTreeSet::new();
        let vars = vars.into_iter().map(Into::into).filter(|v: &String| seen.insert(v.clone())).collect();
        LinSystem { vars, ineqs: Vec::new() }
    }

    pub fn with_ineqs<S: Into<String>>(
        vars: impl IntoIterator<Item = S>,
        ineqs: impl IntoIterator<Item = LinIneq>,
    ) -> Result<Self, PolyError> {
        let mut s = Self::new(vars);
        for i in ineqs {
            s.push(i)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, ineq: LinIneq) -> Result<(), PolyError> {
        if let Some(v) = ineq.coeffs.keys().find(|v| !self.vars.contains(v)) {
            return Err(PolyError::UnknownVariable(v.clone()));
        }
        self.ineqs.push(ineq);
        Ok(())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn ineqs(&self) -> &[LinIneq] {
        &self.ineqs
    }

    pub fn len(&self) -> usize {
        self.ineqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ineqs.is_empty()
    }

    pub fn is_contradictory(&self) -> bool {
        self.ineqs.iter().any(LinIneq::is_contradiction)
    }

    pub fn contains_point(&self, point: &BTreeMap<String, Rational>) -> bool {
        self.ineqs.iter().all(|i| i.satisfied_by(point))
    }

    fn contradiction_over(vars: &[String]) -> Self {
        LinSystem { vars: vars.to_vec(), ineqs: vec![LinIneq::contradiction()] }
    }

    /// Plain-text form: a `# vars:` header, then one row per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("# vars: {}\n", self.vars.join(" "));
        for i in &self.ineqs {
            s.push_str(&i.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses [`LinSystem::to_text`] output. Without a `# vars:` header the
    /// variables are taken in order of first appearance.
    pub fn parse(text: &str) -> Result<Self, PolyError> {
        let mut declared: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        let mut order: Vec<String> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(c) = t.strip_prefix('#') {
                if let Some(vs) = c.trim().strip_prefix("vars:") {
                    declared = Some(vs.split_whitespace().map(String::from).collect());
                }
                continue;
            }
            let row = parse_row(line, ln + 1)?;
            for v in row.coeffs.keys() {
                if !order.contains(v) {
                    order.push(v.clone());
                }
            }
            rows.push(row);
        }
        let vars = declared.unwrap_or(order);
        Self::with_ineqs(vars, rows)
    }
}

impl fmt::Display for LinSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
}

impl Cursor<'_> {
    fn err(&self, message: impl Into<String>) -> PolyError {
        PolyError::Parse { line: self.line, column: self.pos + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    /// Unsigned `p`, `p/q` or decimal `a.b`.
    fn number(&mut self) -> Result<Option<Rational>, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == b'.') {
            self.pos += 1;
        }
        if self.pos == start {
            return Ok(None);
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        let mut value = parse_decimal(text).ok_or_else(|| PolyError::Parse {
            line: self.line,
            column: start + 1,
            message: format!("bad number `{text}`"),
        })?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let dstart = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let d = std::str::from_utf8(&self.s[dstart..self.pos]).unwrap_or("");
            let d: BigInt = d.parse().map_err(|_| self.err("bad denominator"))?;
            if d.is_zero() {
                return Err(self.err("zero denominator"));
            }
            value /= Rational::from_integer(d);
        }
        Ok(Some(value))
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == b'_') {
            return None;
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        Some(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }
}

fn parse_decimal(t: &str) -> Option<Rational> {
    match t.split_once('.') {
        None => t.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((a, b)) => {
            if b.contains('.') || (a.is_empty() && b.is_empty()) {
                return None;
            }
            let digits = format!("{a}{b}");
            let n: BigInt = digits.parse().ok()?;
            Some(Rational::new(n, num::pow(BigInt::from(10), b.len())))
        }
    }
}

fn parse_row(line: &str, ln: usize) -> Result<LinIneq, PolyError> {
    let mut c = Cursor { s: line.as_bytes(), pos: 0, line: ln };
    let mut terms: Vec<(String, Rational)> = Vec::new();
    let mut first = true;
    loop {
        c.skip_ws();
        let mut sign = int(1);
        if c.eat("-") {
            sign = int(-1);
        } else if !first && !c.eat("+") {
            break;
        }
        first = false;
        let coef = c.number()?;
        let var = if coef.is_some() {
            if c.eat("*") {
                Some(c.ident().ok_or_else(|| c.err("expected variable after `*`"))?)
            } else {
                c.ident()
            }
        } else {
            Some(c.ident().ok_or_else(|| c.err("expected coefficient or variable"))?)
        };
        let k = coef.unwrap_or_else(|| int(1)) * sign;
        match var {
            Some(v) => terms.push((v, k)),
            None if k.is_zero() => {}
            None => return Err(c.err("constant terms are only allowed on the right-hand side")),
        }
    }
    let (relation, flip) = if c.eat("<=") {
        (Relation::Le, false)
    } else if c.eat(">=") {
        (Relation::Le, true)
    } else if c.eat("=") {
        (Relation::Eq, false)
    } else {
        return Err(c.err("expected `<=`, `>=` or `=`"));
    };
    c.skip_ws();
    let neg = c.eat("-");
    let rhs = c.number()?.ok_or_else(|| c.err("expected right-hand side number"))?;
    let rhs = if neg { -rhs } else { rhs };
    c.skip_ws();
    if c.pos != c.s.len() {
        return Err(c.err("unexpected trailing input"));
    }
    Ok(if flip { LinIneq::ge(terms, rhs) } else { LinIneq::new(terms, relation, rhs) })
}

// ---------------------------------------------------------------------------
// elimination

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepMethod {
    Substitution,
    FourierMotzkin { lower: usize, upper: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationStep {
    pub variable: String,
    pub method: StepMethod,
    pub rows_before: usize,
    pub rows_generated: usize,
    /// System after pruning.
    pub system: LinSystem,
}

impl EliminationStep {
    pub fn describe(&self) -> String {
        let how = match self.method {
            StepMethod::Substitution => "substitution".to_string(),
            StepMethod::FourierMotzkin { lower, upper } => format!("fourier-motzkin {lower}x{upper}"),
        };
        format!(
            "eliminate {} by {how}: {} rows -> {} generated -> {} after pruning",
            self.variable,
            self.rows_before,
            self.rows_generated,
            self.system.len()
        )
    }
}

/// Projects out `var`. An equality containing `var` is substituted;
/// otherwise every lower bound is paired with every upper bound.
pub fn eliminate(sys: &LinSystem, var: &str) -> Result<LinSystem, PolyError> {
    eliminate_step(sys, var).map(|(s, _)| s)
}

fn eliminate_step(sys: &LinSystem, var: &str) -> Result<(LinSystem, StepMethod), PolyError> {
    if !sys.vars.iter().any(|v| v == var) {
        return Err(PolyError::UnknownVariable(var.to_string()));
    }
    let vars: Vec<String> = sys.vars.iter().filter(|v| *v != var).cloned().collect();
    let mut out: Vec<LinIneq> = Vec::new();
    let method;
    if let Some(k) = sys
        .ineqs
        .iter()
        .position(|i| i.relation == Relation::Eq && !i.coeff(var).is_zero())
    {
        let eq = &sys.ineqs[k];
        for (j, i) in sys.ineqs.iter().enumerate() {
            if j != k {
                out.push(i.substitute(var, eq));
            }
        }
        method = StepMethod::Substitution;
    } else {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for i in &sys.ineqs {
            let c = i.coeff(var);
            if c.is_zero() {
                out.push(i.clone());
            } else if c.is_positive() {
                upper.push(i.scaled(&c.recip()));
            } else {
                lower.push(i.scaled(&c.abs().recip()));
            }
        }
        for lo in &lower {
            for up in &upper {
                out.push(lo.plus(up));
            }
        }
        method = StepMethod::FourierMotzkin { lower: lower.len(), upper: upper.len() };
    }
    let ineqs = tidy(out);
    Ok((LinSystem { vars, ineqs }, method))
}

/// Normalises, drops trivial rows and syntactic duplicates, and collapses
/// to `0 <= -1` on any contradiction.
fn tidy(rows: Vec<LinIneq>) -> Vec<LinIneq> {
    let mut le: BTreeMap<BTreeMap<String, Rational>, Rational> = BTreeMap::new();
    let mut eq: BTreeMap<BTreeMap<String, Rational>, Rational> = BTreeMap::new();
    let mut order: Vec<(Relation, BTreeMap<String, Rational>)> = Vec::new();
    for r in rows {
        let n = r.normalized();
        if n.is_trivial() {
            continue;
        }
        if n.is_contradiction() {
            return vec![LinIneq::contradiction()];
        }
        match n.relation {
            Relation::Le => match le.get_mut(&n.coeffs) {
                Some(b) => {
                    if n.rhs < *b {
                        *b = n.rhs;
                    }
                }
                None => {
                    order.push((Relation::Le, n.coeffs.clone()));
                    le.insert(n.coeffs, n.rhs);
                }
            },
            Relation::Eq => match eq.get(&n.coeffs) {
                Some(b) => {
                    if *b != n.rhs {
                        return vec![LinIneq::contradiction()];
                    }
                }
                None => {
                    order.push((Relation::Eq, n.coeffs.clone()));
                    eq.insert(n.coeffs, n.rhs);
                }
            },
        }
    }
    order
        .into_iter()
        .map(|(rel, coeffs)| {
            let rhs = match rel {
                Relation::Le => le[&coeffs].clone(),
                Relation::Eq => eq[&coeffs].clone(),
            };
            LinIneq { coeffs, rhs, relation: rel }
        })
        .collect()
}

/// Number of new rows FM would create for `var` (zero when an equality can
/// be substituted).
fn pairing_cost(sys: &LinSystem, var: &str) -> usize {
    let mut lo = 0;
    let mut up = 0;
    for i in &sys.ineqs {
        let c = i.coeff(var);
        if c.is_zero() {
            continue;
        }
        if i.relation == Relation::Eq {
            return 0;
        }
        if c.is_positive() {
            up += 1;
        } else {
            lo += 1;
        }
    }
    lo * up
}

/// Eliminates `vars_to_remove`, pruning after each step; at every step the
/// variable with the fewest lower-times-upper pairings goes first.
pub fn eliminate_all(sys: &LinSystem, vars_to_remove: &[&str]) -> Result<LinSystem, PolyError> {
    eliminate_all_traced(sys, vars_to_remove).map(|(s, _)| s)
}

pub fn eliminate_all_traced(
    sys: &LinSystem,
    vars_to_remove: &[&str],
) -> Result<(LinSystem, Vec<EliminationStep>), PolyError> {
    for v in vars_to_remove {
        if !sys.vars.iter().any(|w| w == v) {
            return Err(PolyError::UnknownVariable(v.to_string()));
        }
    }
    let mut pending: Vec<&str> = Vec::new();
    for v in vars_to_remove {
        if !pending.contains(v) {
            pending.push(v);
        }
    }
    let mut cur = sys.clone();
    if !pending.is_empty() {
        cur = remove_redundant(&cur);
    }
    let mut trace = Vec::new();
    while !pending.is_empty() {
        let (k, _) = pending
            .iter()
            .enumerate()
            .min_by_key(|(k, v)| (pairing_cost(&cur, v), *k))
            .expect("pending is non-empty");
        let var = pending.remove(k);
        let rows_before = cur.len();
        let (next, method) = eliminate_step(&cur, var)?;
        let rows_generated = next.len();
        cur = remove_redundant(&next);
        trace.push(EliminationStep {
            variable: var.to_string(),
            method,
            rows_before,
            rows_generated,
            system: cur.clone(),
        });
    }
    Ok((cur, trace))
}

// ---------------------------------------------------------------------------
// LP-backed queries

struct LpView {
    index: BTreeMap<String, usize>,
    n: usize,
}

impl LpView {
    fn new(vars: &[String]) -> Self {
        LpView { index: vars.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect(), n: vars.len() }
    }

    fn dense(&self, i: &LinIneq) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.n];
        for (name, c) in &i.coeffs {
            v[self.index[name]] = c.clone();
        }
        v
    }

    fn row(&self, i: &LinIneq) -> LpRow {
        LpRow {
            coeffs: self.dense(i),
            kind: match i.relation {
                Relation::Le => RowKind::Le,
                Relation::Eq => RowKind::Eq,
            },
            rhs: i.rhs.clone(),
        }
    }

    /// Index of the variable a normalised `-x <= 0` row constrains.
    fn sign_var(&self, i: &LinIneq) -> Option<usize> {
        if i.relation != Relation::Le || !i.rhs.is_zero() || i.coeffs.len() != 1 {
            return None;
        }
        let (v, c) = i.coeffs.iter().next()?;
        (c.is_negative()).then(|| self.index[v])
    }

    /// LP rows and sign flags for `rows`, skipping row `skip`.
    fn problem(&self, rows: &[&LinIneq], skip: Option<usize>) -> (Vec<LpRow>, Vec<bool>) {
        let mut nonneg = vec![false; self.n];
        let mut out = Vec::with_capacity(rows.len());
        for (k, r) in rows.iter().enumerate() {
            if Some(k) == skip {
                continue;
            }
            match self.sign_var(r) {
                Some(j) => nonneg[j] = true,
                None => out.push(self.row(r)),
            }
        }
        (out, nonneg)
    }
}

/// Whether `sys` has a solution.
pub fn is_feasible(sys: &LinSystem) -> bool {
    if sys.is_contradictory() {
        return false;
    }
    let view = LpView::new(&sys.vars);
    let rows: Vec<&LinIneq> = sys.ineqs.iter().collect();
    let (r, nn) = view.problem(&rows, None);
    lp::find_feasible(&r, &nn).is_some()
}

/// Whether `sys` has a solution with the variables in `fixed` pinned to the
/// given values (the lifted-feasibility test for projections).
pub fn lift_feasible(sys: &LinSystem, fixed: &BTreeMap<String, Rational>) -> bool {
    let free: Vec<String> = sys.vars.iter().filter(|v| !fixed.contains_key(*v)).cloned().collect();
    let mut reduced = LinSystem::new(free);
    for i in &sys.ineqs {
        let mut rhs = i.rhs.clone();
        let mut terms = Vec::new();
        for (v, c) in &i.coeffs {
            match fixed.get(v) {
                Some(x) => rhs -= c * x,
                None => terms.push((v.clone(), c.clone())),
            }
        }
        reduced.ineqs.push(LinIneq::new(terms, i.relation, rhs));
    }
    is_feasible(&reduced)
}

/// Maximum of `objective` over `sys` (exact).
pub fn maximize(sys: &LinSystem, objective: &LinIneq) -> LpOutcome {
    if sys.is_contradictory() {
        return LpOutcome::Infeasible;
    }
    let view = LpView::new(&sys.vars);
    let rows: Vec<&LinIneq> = sys.ineqs.iter().collect();
    let (r, nn) = view.problem(&rows, None);
    lp::maximize(&view.dense(objective), &r, &nn)
}

/// Drops every row implied by the remaining ones. Implication is decided by
/// maximising (and for equalities also minimising) the row's left side
/// subject to the others. Infeasible systems collapse to `0 <= -1`.
pub fn remove_redundant(sys: &LinSystem) -> LinSystem {
    let rows = tidy(sys.ineqs.clone());
    if rows.iter().any(LinIneq::is_contradiction) {
        return LinSystem::contradiction_over(&sys.vars);
    }
    let view = LpView::new(&sys.vars);
    {
        let all: Vec<&LinIneq> = rows.iter().collect();
        let (r, nn) = view.problem(&all, None);
        if lp::find_feasible(&r, &nn).is_none() {
            return LinSystem::contradiction_over(&sys.vars);
        }
    }
    let mut keep = vec![true; rows.len()];
    for k in 0..rows.len() {
        let others: Vec<&LinIneq> = rows
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k && keep[*j])
            .map(|(_, r)| r)
            .collect();
        let (r, nn) = view.problem(&others, None);
        let obj = view.dense(&rows[k]);
        let le_implied = match lp::maximize(&obj, &r, &nn) {
            LpOutcome::Optimal { value, .. } => value <= rows[k].rhs,
            _ => false,
        };
        let implied = le_implied
            && match rows[k].relation {
                Relation::Le => true,
                Relation::Eq => {
                    let neg: Vec<Rational> = obj.iter().map(|c| -c).collect();
                    match lp::maximize(&neg, &r, &nn) {
                        LpOutcome::Optimal { value, .. } => -value >= rows[k].rhs,
                        _ => false,
                    }
                }
            };
        if implied {
            keep[k] = false;
        }
    }
    LinSystem {
        vars: sys.vars.clone(),
        ineqs: rows.into_iter().zip(keep).filter(|(_, k)| *k).map(|(r, _)| r).collect(),
    }
}

// ---------------------------------------------------------------------------
// planar projection

fn planar_names(sys: &LinSystem) -> Result<(), PolyError> {
    let set: BTreeSet<&str> = sys.vars.iter().map(String::as_str).collect();
    if set != BTreeSet::from(["R1", "R2"]) {
        return Err(PolyError::NotPlanar(sys.vars.join(", ")));
    }
    Ok(())
}

fn with_quadrant(sys: &LinSystem) -> LinSystem {
    let mut s = sys.clone();
    s.ineqs.push(LinIneq::ge([("R1", int(1))], int(0)));
    s.ineqs.push(LinIneq::ge([("R2", int(1))], int(0)));
    s
}

/// Exact vertices of `sys ∩ R²₊` for a system over `{R1, R2}`, lexicographically
/// sorted. Empty when infeasible.
pub fn exact_vertices(sys: &LinSystem) -> Result<Vec<(Rational, Rational)>, PolyError> {
    planar_names(sys)?;
    let s = with_quadrant(sys);
    if !is_feasible(&s) {
        return Ok(vec![]);
    }
    let sum = LinIneq::le([("R1", int(1)), ("R2", int(1))], int(0));
    if maximize(&s, &sum) == LpOutcome::Unbounded {
        return Err(PolyError::Unbounded);
    }
    let lines: Vec<(Rational, Rational, Rational)> = s
        .ineqs
        .iter()
        .filter(|i| !i.coeffs.is_empty())
        .map(|i| (i.coeff("R1"), i.coeff("R2"), i.rhs.clone()))
        .collect();
    let mut out: BTreeSet<(Rational, Rational)> = BTreeSet::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a1, b1, c1) = &lines[i];
            let (a2, b2, c2) = &lines[j];
            let det = a1 * b2 - b1 * a2;
            if det.is_zero() {
                continue;
            }
            let x = (c1 * b2 - b1 * c2) / &det;
            let y = (a1 * c2 - c1 * a2) / &det;
            let p = BTreeMap::from([("R1".to_string(), x.clone()), ("R2".to_string(), y.clone())]);
            if s.contains_point(&p) {
                out.insert((x, y));
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Converts a system over `{R1, R2}` into a planar region (intersected with
/// the quadrant). Infeasible systems give the empty region.
pub fn project_to_region(sys: &LinSystem) -> Result<RateRegion2D, PolyError> {
    let verts = exact_vertices(sys)?;
    if verts.is_empty() {
        return Ok(RateRegion2D::empty());
    }
    let mut hps = Vec::new();
    for i in &with_quadrant(sys).ineqs {
        if i.coeffs.is_empty() {
            continue;
        }
        let (a, b, c) = (
            rational_to_f64(&i.coeff("R1")),
            rational_to_f64(&i.coeff("R2")),
            rational_to_f64(&i.rhs),
        );
        hps.push(HalfPlane::new(a, b, c));
        if i.relation == Relation::Eq {
            hps.push(HalfPlane::new(-a, -b, -c));
        }
    }
    let pts: Vec<RatePoint> = verts
        .iter()
        .map(|(x, y)| RatePoint::new(rational_to_f64(x), rational_to_f64(y)))
        .collect();
    Ok(RateRegion2D::from_polygon(ConvexPolygon::from_parts(hps, &pts)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(text: &str) -> LinSystem {
        LinSystem::parse(text).unwrap()
    }

    #[test]
    fn single_pairing() {
        let s = sys("# vars: x y\n-y <= 0\nx + y <= 2\n");
        let e = eliminate(&s, "y").unwrap();
        assert_eq!(e.vars(), ["x"]);
        assert_eq!(e.to_text(), "# vars: x\nx <= 2\n");
    }

    #[test]
    fn contradiction_marker() {
        let s = sys("y >= 1\ny <= 0\n");
        let e = eliminate(&s, "y").unwrap();
        assert_eq!(e.ineqs(), [LinIneq::contradiction()]);
        assert_eq!(e.ineqs()[0].to_string(), "0 <= -1");
        assert!(!is_feasible(&s));
    }

    #[test]
    fn equality_substitution() {
        // x = y + 1, y >= 0, x <= 3  -> eliminate x: 0 <= y <= 2
        let s = sys("x - y = 1\n-y <= 0\nx <= 3\n");
        let e = eliminate(&s, "x").unwrap();
        let r = remove_redundant(&e);
        assert_eq!(r.to_text(), "# vars: y\n-y <= 0\ny <= 2\n");
    }

    #[test]
    fn eliminate_nothing_and_everything() {
        let s = sys("x + y <= 1\n-x <= 0\n");
        assert_eq!(eliminate_all(&s, &[]).unwrap(), s);
        let e = eliminate_all(&s, &["x", "y"]).unwrap();
        assert!(e.is_empty() && e.vars().is_empty());
        assert_eq!(eliminate(&s, "z"), Err(PolyError::UnknownVariable("z".into())));
    }

    #[test]
    fn redundancy_examples() {
        let r = remove_redundant(&sys("x <= 1\nx <= 2\n"));
        assert_eq!(r.to_text(), "# vars: x\nx <= 1\n");
        let r = remove_redundant(&sys("x <= 1\ny <= 1\nx + y <= 3\n"));
        assert_eq!(r.to_text(), "# vars: x y\nx <= 1\ny <= 1\n");
        // both bounds follow from the equality
        let r = remove_redundant(&sys("x <= 1\n-x <= -1\nx = 1\n"));
        assert_eq!(r.to_text(), "# vars: x\nx = 1\n");
    }

    #[test]
    fn text_round_trip_and_errors() {
        let s = sys("# vars: R1 R2 Rd\n2*R1 - 1/2*R2 + Rd <= 3/2\n-R1 >= -0.25\nR2 = 0\n");
        assert_eq!(LinSystem::parse(&s.to_text()).unwrap(), s);
        assert_eq!(s.ineqs()[1].to_string(), "R1 <= 1/4");
        match LinSystem::parse("x + y <= 1\nx + * y <= 2\n") {
            Err(PolyError::Parse { line: 2, column, .. }) => assert!(column >= 4),
            other => panic!("{other:?}"),
        }
        assert!(LinSystem::parse("x + 2 <= 1").is_err());
        assert!(LinSystem::parse("x <= 1/0").is_err());
        assert!(matches!(LinSystem::parse("# vars: x\ny <= 1"), Err(PolyError::UnknownVariable(_))));
    }

    #[test]
    fn planar_projection_examples() {
        let sq = project_to_region(&sys("# vars: R1 R2\nR1 <= 1\nR2 <= 1\n")).unwrap();
        let v: Vec<(f64, f64)> = sq.vertices().iter().map(|p| (p.r1, p.r2)).collect();
        assert_eq!(v, [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let o = project_to_region(&sys("# vars: R1 R2\nR1 <= 0\nR2 <= 0\n")).unwrap();
        assert_eq!(o.vertices(), [RatePoint::origin()]);
        let p = project_to_region(&sys("# vars: R1 R2\nR1 <= 1\nR2 <= 2\nR1 + R2 <= 2\n")).unwrap();
        let v: Vec<(f64, f64)> = p.vertices().iter().map(|p| (p.r1, p.r2)).collect();
        assert_eq!(v, [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 2.0)]);
        assert_eq!(project_to_region(&sys("# vars: R1 R2\nR1 <= 1\n")), Err(PolyError::Unbounded));
        assert!(matches!(project_to_region(&sys("x <= 1")), Err(PolyError::NotPlanar(_))));
        assert!(project_to_region(&sys("# vars: R1 R2\nR1 + R2 <= -1\n")).unwrap().is_empty());
    }

    #[test]
    fn rational_rounding() {
        assert_eq!(to_rational_12(0.5), ratio(1, 2));
        assert_eq!(to_rational_12(1.0 / 3.0), ratio(333_333_333_333, 1_000_000_000_000));
        assert_eq!(to_rational_12(-2e-13), int(0));
    }

    #[test]
    fn traced_elimination_records_steps() {
        let s = sys("# vars: R1 a b\nR1 - a <= 0\na - b <= 1\nb <= 2\n-a <= 0\n-b <= 0\n-R1 <= 0\n");
        let (out, trace) = eliminate_all_traced(&s, &["a", "b"]).unwrap();
        assert_eq!(out.vars(), ["R1"]);
        assert_eq!(trace.len(), 2);
        assert_eq!(trace.last().unwrap().system, out);
        assert!(trace[0].describe().starts_with("eliminate "));
        assert_eq!(out.to_text(), "# vars: R1\n-R1 <= 0\nR1 <= 3\n");
    }
}

//! Exact rational linear programming (dense two-phase simplex).
//!
//! Used for implication tests during redundancy pruning and as the
//! feasibility oracle for projections. Problem sizes are tiny (tens of rows),
//! so a dense tableau with sparse row updates is sufficient.

use num::{BigRational, Signed, Zero};

pub type Rational = BigRational;

/// Row relation; `Le` means `a . x <= b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowKind {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<Rational>,
    pub kind: RowKind,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Unbounded,
    Infeasible,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Degenerate pivots tolerated under Dantzig's rule before switching to
/// Bland's rule, which cannot cycle.
const DEGENERATE_STREAK: usize = 32;

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
    banned: Vec<bool>,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, e: usize, obj: &mut [Rational]) {
        let inv = self.rows[r][e].recip();
        let nz: Vec<usize> = (0..=self.ncols)
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        for &j in &nz {
            self.rows[r][j] = &self.rows[r][j] * &inv;
        }
        let pivot_row: Vec<(usize, Rational)> =
            nz.iter().map(|&j| (j, self.rows[r][j].clone())).collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][e].is_zero() {
                continue;
            }
            let f = self.rows[i][e].clone();
            for (j, v) in &pivot_row {
                self.rows[i][*j] -= &f * v;
            }
        }
        if !obj[e].is_zero() {
            let f = obj[e].clone();
            for (j, v) in &pivot_row {
                obj[*j] -= &f * v;
            }
        }
        self.basis[r] = e;
    }

    /// Maximizes the objective whose reduced-cost row is `obj`
    /// (`obj[ncols]` holds minus the current value).
    /// Returns false when unbounded.
    fn optimize(&mut self, obj: &mut [Rational]) -> bool {
        let mut streak = 0usize;
        loop {
            let bland = streak >= DEGENERATE_STREAK;
            let entering = if bland {
                (0..self.ncols).find(|&j| !self.banned[j] && obj[j].is_positive())
            } else {
                (0..self.ncols)
                    .filter(|&j| !self.banned[j] && obj[j].is_positive())
                    .max_by(|&a, &b| obj[a].cmp(&obj[b]).then(b.cmp(&a)))
            };
            let Some(e) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else {
                return false;
            };
            if ratio.is_zero() {
                streak += 1;
            } else {
                streak = 0;
            }
            self.pivot(r, e, obj);
        }
    }
}

/// Maximizes `objective . x` subject to `rows`. Variables flagged in
/// `nonneg` are constrained to be non-negative, the rest are free.
pub fn maximize(objective: &[Rational], rows: &[LpRow], nonneg: &[bool]) -> LpOutcome {
    let n = objective.len();
    assert_eq!(nonneg.len(), n, "nonneg flags must match variable count");
    assert!(rows.iter().all(|r| r.coeffs.len() == n), "row width mismatch");

    // structural columns: x_j (or x_j+ and x_j-)
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut nstruct = 0;
    for &nn in nonneg {
        if nn {
            col_of.push((nstruct, None));
            nstruct += 1;
        } else {
            col_of.push((nstruct, Some(nstruct + 1)));
            nstruct += 2;
        }
    }
    let nslack = rows.iter().filter(|r| r.kind == RowKind::Le).count();
    // a row needs an artificial when its slack cannot start basic
    let needs_art: Vec<bool> = rows
        .iter()
        .map(|r| r.kind == RowKind::Eq || r.rhs.is_negative())
        .collect();
    let nart = needs_art.iter().filter(|&&b| b).count();
    let ncols = nstruct + nslack + nart;

    let m = rows.len();
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        basis: vec![0; m],
        ncols,
        banned: vec![false; ncols],
    };
    let mut slack = nstruct;
    let mut art = nstruct + nslack;
    for (i, row) in rows.iter().enumerate() {
        let mut line = vec![Rational::zero(); ncols + 1];
        let sign = if row.rhs.is_negative() { -Rational::from_integer(1.into()) } else { Rational::from_integer(1.into()) };
        for (j, a) in row.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let (p, q) = col_of[j];
            line[p] = a * &sign;
            if let Some(q) = q {
                line[q] = -(a * &sign);
            }
        }
        line[ncols] = &row.rhs * &sign;
        if row.kind == RowKind::Le {
            line[slack] = sign.clone();
            if !needs_art[i] {
                t.basis[i] = slack;
            }
            slack += 1;
        }
        if needs_art[i] {
            line[art] = Rational::from_integer(1.into());
            t.basis[i] = art;
            art += 1;
        }
        t.rows.push(line);
    }

    if nart > 0 {
        // phase 1: maximize -sum(artificials)
        let mut obj = vec![Rational::zero(); ncols + 1];
        for j in nstruct + nslack..ncols {
            obj[j] = -Rational::from_integer(1.into());
        }
        for i in 0..m {
            if needs_art[i] {
                for j in 0..=ncols {
                    if !t.rows[i][j].is_zero() {
                        obj[j] += &t.rows[i][j];
                    }
                }
            }
        }
        t.optimize(&mut obj);
        // obj[ncols] = -(current value); value = -sum(art) <= 0
        if obj[ncols].is_positive() {
            return LpOutcome::Infeasible;
        }
        // drive remaining artificials out of the basis
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= nstruct + nslack {
                match (0..nstruct + nslack).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(e) => {
                        t.pivot(i, e, &mut obj);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for j in nstruct + nslack..ncols {
            t.banned[j] = true;
        }
    }

    // phase 2
    let mut cost = vec![Rational::zero(); ncols];
    for (j, c) in objective.iter().enumerate() {
        let (p, q) = col_of[j];
        cost[p] = c.clone();
        if let Some(q) = q {
            cost[q] = -c.clone();
        }
    }
    let mut obj = vec![Rational::zero(); ncols + 1];
    obj[..ncols].clone_from_slice(&cost);
    for i in 0..t.rows.len() {
        let cb = &cost[t.basis[i]];
        if cb.is_zero() {
            continue;
        }
        for j in 0..=ncols {
            if !t.rows[i][j].is_zero() {
                obj[j] -= cb * &t.rows[i][j];
            }
        }
    }
    if !t.optimize(&mut obj) {
        return LpOutcome::Unbounded;
    }
    let mut values = vec![Rational::zero(); ncols];
    for (i, &b) in t.basis.iter().enumerate() {
        values[b] = t.rhs(i).clone();
    }
    let point: Vec<Rational> = col_of
        .iter()
        .map(|&(p, q)| match q {
            Some(q) => &values[p] - &values[q],
            None => values[p].clone(),
        })
        .collect();
    let value = objective
        .iter()
        .zip(&point)
        .fold(Rational::zero(), |acc, (c, x)| acc + c * x);
    LpOutcome::Optimal { value, point }
}

/// A feasible point of `rows`, if one exists.
pub fn find_feasible(rows: &[LpRow], nonneg: &[bool]) -> Option<Vec<Rational>> {
    let zero = vec![Rational::zero(); nonneg.len()];
    match maximize(&zero, rows, nonneg) {
        LpOutcome::Optimal { point, .. } => Some(point),
        _ => None,
    }
}

//! Finite probability tables and information measures, all in bits.

use std::collections::HashMap;
use std::sync::Mutex;

use thiserror::Error;

/// Tolerance on the total mass of a distribution.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Entries at or below this value contribute nothing to `p log p`.
pub const LOG_FLOOR: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbabilityError {
    #[error("probability entry {index} is {value}, expected a finite non-negative number")]
    NegativeEntry { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1")]
    BadSum { sum: f64 },
    #[error("distribution has no symbols")]
    EmptyAlphabet,
    #[error("conditional row {row}: {source}")]
    BadRow {
        row: usize,
        #[source]
        source: Box<ProbabilityError>,
    },
    #[error("row {row} has {found} entries, expected {expected}")]
    RowLength {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` listed twice")]
    DuplicateVariable(String),
    #[error("variable sets overlap on `{0}`")]
    OverlappingSets(String),
    #[error("table has {found} entries, variables require {expected}")]
    TableSize { found: usize, expected: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

fn validate(probs: &[f64]) -> Result<(), ProbabilityError> {
    if probs.is_empty() {
        return Err(ProbabilityError::EmptyAlphabet);
    }
    for (index, &value) in probs.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(ProbabilityError::NegativeEntry { index, value });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(ProbabilityError::BadSum { sum });
    }
    Ok(())
}

/// A probability mass function over `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self, ProbabilityError> {
        validate(&probs)?;
        Ok(Self { probs })
    }

    /// Rescales non-negative weights to unit mass.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self, ProbabilityError> {
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(ProbabilityError::NegativeEntry { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if weights.is_empty() {
            return Err(ProbabilityError::EmptyAlphabet);
        }
        if sum <= 0.0 {
            return Err(ProbabilityError::BadSum { sum });
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(size: usize) -> Self {
        assert!(size > 0, "uniform pmf needs at least one symbol");
        Self {
            probs: vec![1.0 / size as f64; size],
        }
    }

    pub fn point_mass(size: usize, symbol: usize) -> Self {
        assert!(symbol < size, "point mass symbol out of range");
        let mut probs = vec![0.0; size];
        probs[symbol] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn get(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }

    /// Probability of the most likely symbol and the symbol itself.
    pub fn mode(&self) -> (usize, f64) {
        self.probs
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, p)| if p > best.1 { (i, p) } else { best })
    }
}

/// A stochastic matrix: one [`Pmf`] per conditioning symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPmf {
    rows: Vec<Pmf>,
    out_size: usize,
}

impl ConditionalPmf {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ProbabilityError> {
        let Some(first) = rows.first() else {
            return Err(ProbabilityError::EmptyAlphabet);
        };
        let out_size = first.len();
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(row, probs)| {
                if probs.len() != out_size {
                    return Err(ProbabilityError::RowLength {
                        row,
                        found: probs.len(),
                        expected: out_size,
                    });
                }
                Pmf::new(probs).map_err(|e| ProbabilityError::BadRow {
                    row,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { rows, out_size })
    }

    pub fn from_rows(rows: Vec<Pmf>) -> Result<Self, ProbabilityError> {
        let Some(first) = rows.first() else {
            return Err(ProbabilityError::EmptyAlphabet);
        };
        let out_size = first.alphabet_size();
        if let Some((row, p)) = rows
            .iter()
            .enumerate()
            .find(|(_, p)| p.alphabet_size() != out_size)
        {
            return Err(ProbabilityError::RowLength {
                row,
                found: p.alphabet_size(),
                expected: out_size,
            });
        }
        Ok(Self { rows, out_size })
    }

    /// Deterministic map `input -> map[input]`.
    pub fn deterministic(map: &[usize], out_size: usize) -> Result<Self, ProbabilityError> {
        if map.is_empty() {
            return Err(ProbabilityError::EmptyAlphabet);
        }
        let rows = map
            .iter()
            .enumerate()
            .map(|(row, &y)| {
                if y >= out_size {
                    Err(ProbabilityError::Dimension(format!(
                        "row {row} maps to {y}, output alphabet has {out_size} symbols"
                    )))
                } else {
                    Ok(Pmf::point_mass(out_size, y))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { rows, out_size })
    }

    pub fn identity(size: usize) -> Self {
        let map: Vec<usize> = (0..size).collect();
        Self::deterministic(&map, size).expect("identity map is in range")
    }

    pub fn in_size(&self) -> usize {
        self.rows.len()
    }

    pub fn out_size(&self) -> usize {
        self.out_size
    }

    pub fn row(&self, input: usize) -> &Pmf {
        &self.rows[input]
    }

    pub fn rows(&self) -> &[Pmf] {
        &self.rows
    }

    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.rows[input].probs[output]
    }
}

/// Named finite random variable inside a [`JointPmf`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub card: usize,
}

impl Variable {
    pub fn new(name: impl Into<String>, card: usize) -> Self {
        Self {
            name: name.into(),
            card,
        }
    }
}

/// Joint distribution over an ordered list of named variables.
///
/// The table is row-major: the last variable varies fastest.
#[derive(Debug)]
pub struct JointPmf {
    vars: Vec<Variable>,
    table: Vec<f64>,
    entropy_memo: Mutex<HashMap<u64, f64>>,
}

impl Clone for JointPmf {
    fn clone(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            table: self.table.clone(),
            entropy_memo: Mutex::new(HashMap::new()),
        }
    }
}

impl PartialEq for JointPmf {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.table == other.table
    }
}

impl JointPmf {
    pub fn new(vars: Vec<Variable>, table: Vec<f64>) -> Result<Self, ProbabilityError> {
        if vars.is_empty() {
            return Err(ProbabilityError::EmptyAlphabet);
        }
        if vars.len() > 64 {
            return Err(ProbabilityError::Dimension("at most 64 variables".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            if v.card == 0 {
                return Err(ProbabilityError::EmptyAlphabet);
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(ProbabilityError::DuplicateVariable(v.name.clone()));
            }
        }
        let expected: usize = vars.iter().map(|v| v.card).product();
        if table.len() != expected {
            return Err(ProbabilityError::TableSize {
                found: table.len(),
                expected,
            });
        }
        validate(&table)?;
        Ok(Self {
            vars,
            table,
            entropy_memo: Mutex::new(HashMap::new()),
        })
    }

    /// Product distribution of independent marginals.
    pub fn independent(parts: &[(&str, &Pmf)]) -> Result<Self, ProbabilityError> {
        let mut vars = Vec::with_capacity(parts.len());
        let mut table = vec![1.0];
        for (name, pmf) in parts {
            vars.push(Variable::new(*name, pmf.alphabet_size()));
            table = table
                .iter()
                .flat_map(|&a| pmf.probs().iter().map(move |&b| a * b))
                .collect();
        }
        Self::new(vars, table)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn var_index(&self, name: &str) -> Result<usize, ProbabilityError> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| ProbabilityError::UnknownVariable(name.to_string()))
    }

    fn mask_of(&self, names: &[&str]) -> Result<u64, ProbabilityError> {
        let mut mask = 0u64;
        for name in names {
            let bit = 1u64 << self.var_index(name)?;
            if mask & bit != 0 {
                return Err(ProbabilityError::DuplicateVariable(name.to_string()));
            }
            mask |= bit;
        }
        Ok(mask)
    }

    /// Marginal table over the variables in `mask`, in joint order.
    fn marginal_table(&self, mask: u64) -> Vec<f64> {
        let kept: Vec<usize> = (0..self.vars.len()).filter(|i| mask >> i & 1 == 1).collect();
        let out_len: usize = kept.iter().map(|&i| self.vars[i].card).product();
        // out stride per joint variable (0 when summed out)
        let mut out_stride = vec![0usize; self.vars.len()];
        let mut s = 1;
        for &i in kept.iter().rev() {
            out_stride[i] = s;
            s *= self.vars[i].card;
        }
        let mut out = vec![0.0; out_len];
        let mut digits = vec![0usize; self.vars.len()];
        let mut pos = 0usize;
        for &p in &self.table {
            out[pos] += p;
            // increment mixed-radix counter, last variable fastest
            for k in (0..self.vars.len()).rev() {
                digits[k] += 1;
                pos += out_stride[k];
                if digits[k] < self.vars[k].card {
                    break;
                }
                pos -= out_stride[k] * digits[k];
                digits[k] = 0;
            }
        }
        out
    }

    /// Sums out every variable not in `keep`. Variable order follows `self`.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf, ProbabilityError> {
        if keep.is_empty() {
            return Err(ProbabilityError::Dimension(
                "marginal needs at least one variable".into(),
            ));
        }
        let mask = self.mask_of(keep)?;
        let vars = (0..self.vars.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.vars[i].clone())
            .collect();
        let mut table = self.marginal_table(mask);
        let sum: f64 = table.iter().sum();
        table.iter_mut().for_each(|p| *p /= sum);
        JointPmf::new(vars, table)
    }

    fn entropy_mask(&self, mask: u64) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        if let Some(&h) = self.entropy_memo.lock().expect("memo lock").get(&mask) {
            return h;
        }
        let h = entropy_of_slice(&self.marginal_table(mask));
        self.entropy_memo.lock().expect("memo lock").insert(mask, h);
        h
    }

    /// Joint entropy `H(names)`; the empty set has entropy 0.
    pub fn entropy_of(&self, names: &[&str]) -> Result<f64, ProbabilityError> {
        Ok(self.entropy_mask(self.mask_of(names)?))
    }

    /// `H(a | given)`.
    pub fn conditional_entropy(&self, a: &[&str], given: &[&str]) -> Result<f64, ProbabilityError> {
        let ma = self.mask_of(a)?;
        let mc = self.mask_of(given)?;
        check_disjoint(self, ma, mc)?;
        Ok((self.entropy_mask(ma | mc) - self.entropy_mask(mc)).max(0.0))
    }

    /// `I(a; b | given)`, clamped at zero.
    pub fn mutual_information(
        &self,
        a: &[&str],
        b: &[&str],
        given: &[&str],
    ) -> Result<f64, ProbabilityError> {
        let ma = self.mask_of(a)?;
        let mb = self.mask_of(b)?;
        let mc = self.mask_of(given)?;
        check_disjoint(self, ma, mb)?;
        check_disjoint(self, ma, mc)?;
        check_disjoint(self, mb, mc)?;
        let i = self.entropy_mask(ma | mc) + self.entropy_mask(mb | mc)
            - self.entropy_mask(ma | mb | mc)
            - self.entropy_mask(mc);
        debug_assert!(i >= -1e-9, "mutual information {i} is negative");
        Ok(i.max(0.0))
    }

    /// Probability of one full assignment, indices in variable order.
    pub fn prob(&self, assignment: &[usize]) -> f64 {
        assert_eq!(assignment.len(), self.vars.len());
        let mut pos = 0;
        for (v, &a) in self.vars.iter().zip(assignment) {
            pos = pos * v.card + a;
        }
        self.table[pos]
    }
}

fn check_disjoint(j: &JointPmf, a: u64, b: u64) -> Result<(), ProbabilityError> {
    let both = a & b;
    if both != 0 {
        let i = both.trailing_zeros() as usize;
        return Err(ProbabilityError::OverlappingSets(j.vars[i].name.clone()));
    }
    Ok(())
}

fn entropy_of_slice(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > LOG_FLOOR)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_of_slice(p.probs())
}

/// Joint law of the layered auxiliary cascade and the channel:
/// `p(u) p(v|u) p(v1,v2|v) p(x|v1,v2) p(y1,y2,z|x)`.
///
/// `v1v2` gives the private alphabet sizes so the `(v1, v2)` factor can be
/// split, `outputs` the sizes `(|Y1|, |Y2|, |Z|)` of the channel factor's
/// product alphabet. Both products are read lexicographically.
/// The resulting variables are `U, V, V1, V2, X, Y1, Y2, Z`.
pub fn chain_compose(
    p_u: &Pmf,
    p_v_u: &ConditionalPmf,
    p_v1v2_v: &ConditionalPmf,
    v1v2: (usize, usize),
    p_x_v1v2: &ConditionalPmf,
    kernel: &ConditionalPmf,
    outputs: (usize, usize, usize),
) -> Result<JointPmf, ProbabilityError> {
    let cu = p_u.alphabet_size();
    let cv = p_v_u.out_size();
    let (cv1, cv2) = v1v2;
    let cx = p_x_v1v2.out_size();
    let (cy1, cy2, cz) = outputs;
    let dim = |what: String| Err(ProbabilityError::Dimension(what));
    if p_v_u.in_size() != cu {
        return dim(format!("p(v|u) has {} rows, |U| = {cu}", p_v_u.in_size()));
    }
    if p_v1v2_v.in_size() != cv {
        return dim(format!("p(v1,v2|v) has {} rows, |V| = {cv}", p_v1v2_v.in_size()));
    }
    if p_v1v2_v.out_size() != cv1 * cv2 {
        return dim(format!(
            "p(v1,v2|v) has {} columns, |V1||V2| = {}",
            p_v1v2_v.out_size(),
            cv1 * cv2
        ));
    }
    if p_x_v1v2.in_size() != cv1 * cv2 {
        return dim(format!(
            "p(x|v1,v2) has {} rows, |V1||V2| = {}",
            p_x_v1v2.in_size(),
            cv1 * cv2
        ));
    }
    if kernel.in_size() != cx {
        return dim(format!("channel has {} inputs, |X| = {cx}", kernel.in_size()));
    }
    if kernel.out_size() != cy1 * cy2 * cz {
        return dim(format!(
            "channel has {} outputs, |Y1||Y2||Z| = {}",
            kernel.out_size(),
            cy1 * cy2 * cz
        ));
    }
    let n_out = cy1 * cy2 * cz;
    let mut table = Vec::with_capacity(cu * cv * cv1 * cv2 * cx * n_out);
    for u in 0..cu {
        let pu = p_u.get(u);
        for v in 0..cv {
            let puv = pu * p_v_u.prob(u, v);
            for w in 0..cv1 * cv2 {
                let puvw = puv * p_v1v2_v.prob(v, w);
                for x in 0..cx {
                    let pux = puvw * p_x_v1v2.prob(w, x);
                    table.extend(kernel.row(x).probs().iter().map(|&k| pux * k));
                }
            }
        }
    }
    let sum: f64 = table.iter().sum();
    table.iter_mut().for_each(|p| *p /= sum);
    let vars = vec![
        Variable::new("U", cu),
        Variable::new("V", cv),
        Variable::new("V1", cv1),
        Variable::new("V2", cv2),
        Variable::new("X", cx),
        Variable::new("Y1", cy1),
        Variable::new("Y2", cy2),
        Variable::new("Z", cz),
    ];
    JointPmf::new(vars, table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(table: Vec<f64>, ca: usize, cb: usize) -> JointPmf {
        JointPmf::new(vec![Variable::new("A", ca), Variable::new("B", cb)], table).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy(&Pmf::uniform(4)) - 2.0).abs() < 1e-15);
        assert_eq!(entropy(&Pmf::point_mass(3, 1)), 0.0);
        let p = Pmf::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert!((entropy(&p) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_pmfs_rejected() {
        assert!(matches!(
            Pmf::new(vec![0.5, -0.1, 0.6]),
            Err(ProbabilityError::NegativeEntry { index: 1, .. })
        ));
        assert!(matches!(Pmf::new(vec![0.5, 0.4]), Err(ProbabilityError::BadSum { .. })));
        assert!(matches!(Pmf::new(vec![]), Err(ProbabilityError::EmptyAlphabet)));
        assert!(ConditionalPmf::new(vec![vec![1.0], vec![0.5, 0.5]]).is_err());
    }

    #[test]
    fn marginalize_examples() {
        let j = JointPmf::independent(&[("A", &Pmf::uniform(2)), ("B", &Pmf::uniform(2))]).unwrap();
        let m = j.marginalize(&["A"]).unwrap();
        assert_eq!(m.table(), &[0.5, 0.5]);
        assert_eq!(j.marginalize(&["A", "B"]).unwrap(), j);
        assert_eq!(j.marginalize(&["B", "A"]).unwrap(), j);

        let corr = pair(vec![0.5, 0.0, 0.0, 0.5], 2, 2);
        assert_eq!(corr.marginalize(&["B"]).unwrap().table(), &[0.5, 0.5]);
        assert!(matches!(
            corr.marginalize(&["C"]),
            Err(ProbabilityError::UnknownVariable(_))
        ));
    }

    #[test]
    fn marginal_of_middle_variable() {
        // A uniform on 2, B = A, C uniform on 3 independent.
        let mut table = vec![];
        for a in 0..2 {
            for b in 0..2 {
                for _c in 0..3 {
                    table.push(if a == b { 1.0 / 6.0 } else { 0.0 });
                }
            }
        }
        let j = JointPmf::new(
            vec![Variable::new("A", 2), Variable::new("B", 2), Variable::new("C", 3)],
            table,
        )
        .unwrap();
        let bc = j.marginalize(&["B", "C"]).unwrap();
        for p in bc.table() {
            assert!((p - 1.0 / 6.0).abs() < 1e-15);
        }
        assert!((j.mutual_information(&["A"], &["B"], &[]).unwrap() - 1.0).abs() < 1e-12);
        assert!(j.mutual_information(&["A"], &["C"], &["B"]).unwrap() < 1e-12);
    }

    #[test]
    fn mutual_information_examples() {
        let ident = pair(vec![0.5, 0.0, 0.0, 0.5], 2, 2);
        assert!((ident.mutual_information(&["A"], &["B"], &[]).unwrap() - 1.0).abs() < 1e-15);

        let constant = pair(vec![0.5, 0.5], 2, 1);
        assert_eq!(constant.mutual_information(&["A"], &["B"], &[]).unwrap(), 0.0);

        // A uniform on {0..3}, B = A mod 2
        let mut table = vec![0.0; 8];
        for a in 0..4 {
            table[a * 2 + a % 2] = 0.25;
        }
        let j = pair(table, 4, 2);
        assert!((j.mutual_information(&["A"], &["B"], &[]).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            j.mutual_information(&["A"], &["A"], &[]),
            Err(ProbabilityError::OverlappingSets(_))
        ));
        assert!(j.mutual_information(&["A"], &["B"], &["B"]).is_err());
    }

    #[test]
    fn chain_compose_identities_is_diagonal() {
        let id = ConditionalPmf::identity(2);
        // (v1, v2) = (v, 0); x = v1 from |V1||V2| = 2 rows
        let p_v1v2 = ConditionalPmf::deterministic(&[0, 2], 4).unwrap();
        let p_x = ConditionalPmf::deterministic(&[0, 0, 1, 1], 2).unwrap();
        // y1 = y2 = z = x
        let kernel = ConditionalPmf::deterministic(&[0, 7], 8).unwrap();
        let j = chain_compose(&Pmf::uniform(2), &id, &p_v1v2, (2, 2), &p_x, &kernel, (2, 2, 2))
            .unwrap();
        let support: Vec<usize> = (0..j.table().len()).filter(|&i| j.table()[i] > 0.0).collect();
        assert_eq!(support.len(), 2);
        assert_eq!(j.prob(&[0, 0, 0, 0, 0, 0, 0, 0]), 0.5);
        assert_eq!(j.prob(&[1, 1, 1, 0, 1, 1, 1, 1]), 0.5);
    }

    #[test]
    fn chain_compose_point_mass_u() {
        let p_v_u = ConditionalPmf::new(vec![vec![0.3, 0.7], vec![0.9, 0.1]]).unwrap();
        let p_v1v2 = ConditionalPmf::new(vec![vec![0.25; 4], vec![0.1, 0.2, 0.3, 0.4]]).unwrap();
        let p_x = ConditionalPmf::identity(4);
        let kernel = ConditionalPmf::identity(4);
        let with_u = chain_compose(
            &Pmf::point_mass(2, 1),
            &p_v_u,
            &p_v1v2,
            (2, 2),
            &p_x,
            &kernel,
            (4, 1, 1),
        )
        .unwrap();
        let direct = chain_compose(
            &Pmf::point_mass(1, 0),
            &ConditionalPmf::new(vec![vec![0.9, 0.1]]).unwrap(),
            &p_v1v2,
            (2, 2),
            &p_x,
            &kernel,
            (4, 1, 1),
        )
        .unwrap();
        let names = ["V", "V1", "V2", "X", "Y1", "Y2", "Z"];
        let a = with_u.marginalize(&names).unwrap();
        let b = direct.marginalize(&names).unwrap();
        for (x, y) in a.table().iter().zip(b.table()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn chain_compose_dimension_errors() {
        let id2 = ConditionalPmf::identity(2);
        let r = chain_compose(
            &Pmf::uniform(3),
            &id2,
            &ConditionalPmf::identity(4),
            (2, 2),
            &ConditionalPmf::identity(4),
            &ConditionalPmf::identity(4),
            (4, 1, 1),
        );
        assert!(matches!(r, Err(ProbabilityError::Dimension(_))));
    }

    #[test]
    fn deterministic_function_has_zero_conditional_entropy() {
        let mut table = vec![0.0; 5 * 3];
        let px = [0.1, 0.2, 0.3, 0.15, 0.25];
        for (x, p) in px.iter().enumerate() {
            table[x * 3 + (x * x) % 3] = *p;
        }
        let j = pair(table, 5, 3);
        assert!(j.conditional_entropy(&["B"], &["A"]).unwrap() <= 1e-12);
    }
}

//! The broadcast channel `p(y1, y2, z | x)` and its structural checks.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::probability::{ConditionalPmf, JointPmf, Pmf, ProbabilityError, Variable};

/// Tolerance for kernel comparisons in degradedness checks.
pub const CHANNEL_TOLERANCE: f64 = 1e-9;

/// A symbol is considered the single support point when it carries at least
/// `1 - DETERMINISM_TOLERANCE` of the row mass.
pub const DETERMINISM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("alphabet `{0}` must have at least one symbol")]
    EmptyAlphabet(&'static str),
    #[error("kernel has {found} rows, |X| = {expected}")]
    KernelRows { found: usize, expected: usize },
    #[error("kernel has {found} columns, |Y1|*|Y2|*|Z| = {expected}")]
    KernelColumns { found: usize, expected: usize },
    #[error("map `{map}` has {found} entries, |X| = {expected}")]
    MapLength {
        map: &'static str,
        found: usize,
        expected: usize,
    },
    #[error("map `{map}` sends x = {x} to {value}, alphabet size is {card}")]
    MapRange {
        map: &'static str,
        x: usize,
        value: usize,
        card: usize,
    },
    #[error("input distribution has {found} symbols, |X| = {expected}")]
    InputSize { found: usize, expected: usize },
    #[error(transparent)]
    Probability(#[from] ProbabilityError),
}

/// One of the three channel outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Output {
    Y1,
    Y2,
    Z,
}

impl Output {
    pub const ALL: [Output; 3] = [Output::Y1, Output::Y2, Output::Z];

    pub fn name(self) -> &'static str {
        match self {
            Output::Y1 => "Y1",
            Output::Y2 => "Y2",
            Output::Z => "Z",
        }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A claimed Markov chain `X -> first -> second -> third`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DegradednessOrder {
    Y2Y1Z,
    Y2ZY1,
    ZY2Y1,
    Y1Y2Z,
    Y1ZY2,
    ZY1Y2,
}

impl DegradednessOrder {
    pub const ALL: [DegradednessOrder; 6] = [
        DegradednessOrder::Y2Y1Z,
        DegradednessOrder::Y2ZY1,
        DegradednessOrder::ZY2Y1,
        DegradednessOrder::Y1Y2Z,
        DegradednessOrder::Y1ZY2,
        DegradednessOrder::ZY1Y2,
    ];

    /// Chains under which receiver 1 (the side-information holder) is the
    /// weaker legitimate receiver.
    pub const WEAK_SIDE_INFO: [DegradednessOrder; 3] = [
        DegradednessOrder::Y2Y1Z,
        DegradednessOrder::Y2ZY1,
        DegradednessOrder::ZY2Y1,
    ];

    /// Chains under which receiver 1 is the stronger legitimate receiver.
    pub const STRONG_SIDE_INFO: [DegradednessOrder; 3] = [
        DegradednessOrder::Y1Y2Z,
        DegradednessOrder::Y1ZY2,
        DegradednessOrder::ZY1Y2,
    ];

    pub fn chain(self) -> [Output; 3] {
        use Output::*;
        match self {
            DegradednessOrder::Y2Y1Z => [Y2, Y1, Z],
            DegradednessOrder::Y2ZY1 => [Y2, Z, Y1],
            DegradednessOrder::ZY2Y1 => [Z, Y2, Y1],
            DegradednessOrder::Y1Y2Z => [Y1, Y2, Z],
            DegradednessOrder::Y1ZY2 => [Y1, Z, Y2],
            DegradednessOrder::ZY1Y2 => [Z, Y1, Y2],
        }
    }

    /// Short tag such as `Y2-Y1-Z`.
    pub fn tag(self) -> String {
        let [a, b, c] = self.chain();
        format!("{a}-{b}-{c}")
    }
}

impl fmt::Display for DegradednessOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.chain();
        write!(f, "X->{a}->{b}->{c}")
    }
}

impl FromStr for DegradednessOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().trim_start_matches("X->").replace("->", "-");
        DegradednessOrder::ALL
            .into_iter()
            .find(|o| o.tag().eq_ignore_ascii_case(&norm))
            .ok_or_else(|| format!("unknown degradedness order `{s}`"))
    }
}

/// Memoryless broadcast channel with two legitimate receivers and an
/// eavesdropper. Kernel columns are lexicographic in `(y1, y2, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastChannel {
    card_x: usize,
    card_y1: usize,
    card_y2: usize,
    card_z: usize,
    kernel: ConditionalPmf,
}

impl BroadcastChannel {
    pub fn new(
        card_x: usize,
        card_y1: usize,
        card_y2: usize,
        card_z: usize,
        kernel: ConditionalPmf,
    ) -> Result<Self, ChannelError> {
        for (name, c) in [("x", card_x), ("y1", card_y1), ("y2", card_y2), ("z", card_z)] {
            if c == 0 {
                return Err(ChannelError::EmptyAlphabet(name));
            }
        }
        if kernel.in_size() != card_x {
            return Err(ChannelError::KernelRows {
                found: kernel.in_size(),
                expected: card_x,
            });
        }
        let cols = card_y1 * card_y2 * card_z;
        if kernel.out_size() != cols {
            return Err(ChannelError::KernelColumns {
                found: kernel.out_size(),
                expected: cols,
            });
        }
        Ok(Self {
            card_x,
            card_y1,
            card_y2,
            card_z,
            kernel,
        })
    }

    /// Channel whose outputs are deterministic functions of the input.
    pub fn deterministic(
        y1: &[usize],
        y2: &[usize],
        z: &[usize],
        cards: (usize, usize, usize),
    ) -> Result<Self, ChannelError> {
        let card_x = y1.len();
        let (c1, c2, cz) = cards;
        for (map, values, card) in [("y1", y1, c1), ("y2", y2, c2), ("z", z, cz)] {
            if values.len() != card_x {
                return Err(ChannelError::MapLength {
                    map,
                    found: values.len(),
                    expected: card_x,
                });
            }
            if let Some((x, &value)) = values.iter().enumerate().find(|(_, &v)| v >= card) {
                return Err(ChannelError::MapRange { map, x, value, card });
            }
        }
        let cols: Vec<usize> = (0..card_x)
            .map(|x| (y1[x] * c2 + y2[x]) * cz + z[x])
            .collect();
        let kernel = ConditionalPmf::deterministic(&cols, c1 * c2 * cz)?;
        Self::new(card_x, c1, c2, cz, kernel)
    }

    /// Channel built from independent per-output kernels
    /// `p(y1|x) p(y2|x) p(z|x)`.
    pub fn from_marginals(
        y1: &ConditionalPmf,
        y2: &ConditionalPmf,
        z: &ConditionalPmf,
    ) -> Result<Self, ChannelError> {
        let card_x = y1.in_size();
        for k in [y2, z] {
            if k.in_size() != card_x {
                return Err(ChannelError::KernelRows {
                    found: k.in_size(),
                    expected: card_x,
                });
            }
        }
        let rows = (0..card_x)
            .map(|x| {
                let mut row = Vec::with_capacity(y1.out_size() * y2.out_size() * z.out_size());
                for &a in y1.row(x).probs() {
                    for &b in y2.row(x).probs() {
                        for &c in z.row(x).probs() {
                            row.push(a * b * c);
                        }
                    }
                }
                Pmf::from_weights(row)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let kernel = ConditionalPmf::from_rows(rows)?;
        Self::new(card_x, y1.out_size(), y2.out_size(), z.out_size(), kernel)
    }

    pub fn card_x(&self) -> usize {
        self.card_x
    }
    pub fn card_y1(&self) -> usize {
        self.card_y1
    }
    pub fn card_y2(&self) -> usize {
        self.card_y2
    }
    pub fn card_z(&self) -> usize {
        self.card_z
    }
    pub fn kernel(&self) -> &ConditionalPmf {
        &self.kernel
    }

    pub fn card(&self, output: Output) -> usize {
        match output {
            Output::Y1 => self.card_y1,
            Output::Y2 => self.card_y2,
            Output::Z => self.card_z,
        }
    }

    /// `(y1, y2, z)` of a kernel column.
    pub fn split_column(&self, col: usize) -> (usize, usize, usize) {
        let z = col % self.card_z;
        let rest = col / self.card_z;
        (rest / self.card_y2, rest % self.card_y2, z)
    }

    /// Marginal `p(output | x)`.
    pub fn output_marginal(&self, x: usize, output: Output) -> Vec<f64> {
        let mut out = vec![0.0; self.card(output)];
        for (col, &p) in self.kernel.row(x).probs().iter().enumerate() {
            let (a, b, c) = self.split_column(col);
            let sym = match output {
                Output::Y1 => a,
                Output::Y2 => b,
                Output::Z => c,
            };
            out[sym] += p;
        }
        out
    }

    /// Deterministic map of one output, when it is a function of `x`.
    pub fn output_function(&self, output: Output) -> Option<Vec<usize>> {
        (0..self.card_x)
            .map(|x| {
                let row = self.output_marginal(x, output);
                row.iter()
                    .position(|&p| p >= 1.0 - DETERMINISM_TOLERANCE)
            })
            .collect()
    }
}

/// True iff every row of `p(output | x)` is a point mass.
pub fn is_deterministic(ch: &BroadcastChannel, output: Output) -> bool {
    ch.output_function(output).is_some()
}

/// True iff all three outputs are functions of the input.
pub fn is_fully_deterministic(ch: &BroadcastChannel) -> bool {
    Output::ALL.into_iter().all(|o| is_deterministic(ch, o))
}

/// Physical degradedness test for `X -> first -> second -> third`.
///
/// Under the uniform input, `p(second | x, first)` must not depend on `x`
/// and `p(third | x, first, second)` must not depend on `(x, first)`.
/// Conditioning events of zero probability are skipped.
pub fn check_degradedness(ch: &BroadcastChannel, order: DegradednessOrder) -> bool {
    let [first, second, third] = order.chain();
    let (c1, c2, c3) = (ch.card(first), ch.card(second), ch.card(third));
    // p(x, a, b, c) with a, b, c the chain outputs, uniform x
    let px = 1.0 / ch.card_x as f64;
    let mut joint = vec![0.0; ch.card_x * c1 * c2 * c3];
    for x in 0..ch.card_x {
        for (col, &p) in ch.kernel.row(x).probs().iter().enumerate() {
            let (y1, y2, z) = ch.split_column(col);
            let pick = |o: Output| match o {
                Output::Y1 => y1,
                Output::Y2 => y2,
                Output::Z => z,
            };
            let (a, b, c) = (pick(first), pick(second), pick(third));
            joint[((x * c1 + a) * c2 + b) * c3 + c] += px * p;
        }
    }
    let at = |x: usize, a: usize, b: usize, c: usize| joint[((x * c1 + a) * c2 + b) * c3 + c];

    // stage 1: p(b | x, a) constant in x for each a
    for a in 0..c1 {
        let mut reference: Option<Vec<f64>> = None;
        for x in 0..ch.card_x {
            let pxa: f64 = (0..c2).flat_map(|b| (0..c3).map(move |c| (b, c))).map(|(b, c)| at(x, a, b, c)).sum();
            if pxa <= 0.0 {
                continue;
            }
            let cond: Vec<f64> = (0..c2)
                .map(|b| (0..c3).map(|c| at(x, a, b, c)).sum::<f64>() / pxa)
                .collect();
            match &reference {
                None => reference = Some(cond),
                Some(r) => {
                    if r.iter().zip(&cond).any(|(p, q)| (p - q).abs() > CHANNEL_TOLERANCE) {
                        return false;
                    }
                }
            }
        }
    }

    // stage 2: p(c | x, a, b) constant in (x, a) for each b
    for b in 0..c2 {
        let mut reference: Option<Vec<f64>> = None;
        for x in 0..ch.card_x {
            for a in 0..c1 {
                let pxab: f64 = (0..c3).map(|c| at(x, a, b, c)).sum();
                if pxab <= 0.0 {
                    continue;
                }
                let cond: Vec<f64> = (0..c3).map(|c| at(x, a, b, c) / pxab).collect();
                match &reference {
                    None => reference = Some(cond),
                    Some(r) => {
                        if r.iter().zip(&cond).any(|(p, q)| (p - q).abs() > CHANNEL_TOLERANCE) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// Every order among the six for which [`check_degradedness`] holds.
pub fn degradedness_orders(ch: &BroadcastChannel) -> Vec<DegradednessOrder> {
    DegradednessOrder::ALL
        .into_iter()
        .filter(|&o| check_degradedness(ch, o))
        .collect()
}

/// Joint law of `(X, Y1, Y2, Z)` for input distribution `p_x`.
pub fn induced_joint(ch: &BroadcastChannel, p_x: &Pmf) -> Result<JointPmf, ChannelError> {
    if p_x.alphabet_size() != ch.card_x {
        return Err(ChannelError::InputSize {
            found: p_x.alphabet_size(),
            expected: ch.card_x,
        });
    }
    let table: Vec<f64> = (0..ch.card_x)
        .flat_map(|x| {
            let px = p_x.get(x);
            ch.kernel.row(x).probs().iter().map(move |&k| px * k)
        })
        .collect();
    let sum: f64 = table.iter().sum();
    let table = table.into_iter().map(|p| p / sum).collect();
    Ok(JointPmf::new(
        vec![
            Variable::new("X", ch.card_x),
            Variable::new("Y1", ch.card_y1),
            Variable::new("Y2", ch.card_y2),
            Variable::new("Z", ch.card_z),
        ],
        table,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::entropy;

    fn floor_half() -> BroadcastChannel {
        // Y2 = X, Y1 = floor(X / 2), Z constant
        BroadcastChannel::deterministic(&[0, 0, 1, 1], &[0, 1, 2, 3], &[0, 0, 0, 0], (2, 4, 1))
            .unwrap()
    }

    fn bsc(p: f64) -> ConditionalPmf {
        ConditionalPmf::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]]).unwrap()
    }

    #[test]
    fn determinism_examples() {
        let ch = BroadcastChannel::deterministic(&[0, 1, 0, 1], &[0, 1, 2, 3], &[0; 4], (2, 4, 1))
            .unwrap();
        assert!(is_deterministic(&ch, Output::Y1));
        assert!(is_deterministic(&ch, Output::Z));

        let noisy = BroadcastChannel::from_marginals(
            &bsc(0.1),
            &ConditionalPmf::identity(2),
            &ConditionalPmf::deterministic(&[0, 0], 1).unwrap(),
        )
        .unwrap();
        assert!(!is_deterministic(&noisy, Output::Y1));
        assert!(is_deterministic(&noisy, Output::Y2));
        assert!(is_deterministic(&noisy, Output::Z));
    }

    #[test]
    fn floor_channel_orders() {
        let ch = floor_half();
        assert!(check_degradedness(&ch, DegradednessOrder::Y2Y1Z));
        // Y1 does not determine Y2
        assert!(!check_degradedness(&ch, DegradednessOrder::Y1Y2Z));
        // constant Z is degraded w.r.t. anything, but Y1 is not a function of Z
        assert!(!check_degradedness(&ch, DegradednessOrder::Y2ZY1));
        assert!(!check_degradedness(&ch, DegradednessOrder::ZY2Y1));
    }

    #[test]
    fn brute_force_factorisation_oracle() {
        // A chain X -> A -> B -> C of deterministic maps holds iff B = g(A)
        // and C = h(B) for some g, h; enumerate all candidate g, h.
        let ch = floor_half();
        let f = |o: Output| ch.output_function(o).unwrap();
        for order in DegradednessOrder::ALL {
            let [a, b, c] = order.chain();
            let (fa, fb, fc) = (f(a), f(b), f(c));
            let factors = |from: &Vec<usize>, to: &Vec<usize>| {
                (0..ch.card_x()).all(|x| {
                    (0..ch.card_x()).all(|x2| from[x] != from[x2] || to[x] == to[x2])
                })
            };
            let expected = factors(&fa, &fb) && factors(&fb, &fc);
            assert_eq!(check_degradedness(&ch, order), expected, "{order}");
        }
    }

    #[test]
    fn equal_outputs_both_orders() {
        let ch = BroadcastChannel::deterministic(&[0, 1, 2], &[0, 1, 2], &[0, 1, 1], (3, 3, 2))
            .unwrap();
        assert!(check_degradedness(&ch, DegradednessOrder::Y1Y2Z));
        assert!(check_degradedness(&ch, DegradednessOrder::Y2Y1Z));
    }

    #[test]
    fn independent_bits_never_degraded() {
        let ch = BroadcastChannel::deterministic(&[0, 1, 0, 1], &[0, 0, 1, 1], &[0; 4], (2, 2, 1))
            .unwrap();
        for order in [DegradednessOrder::Y1Y2Z, DegradednessOrder::Y2Y1Z] {
            assert!(!check_degradedness(&ch, order));
        }
        // orders with Z first need Y1 and Y2 to be functions of a constant
        assert!(degradedness_orders(&ch).is_empty());
    }

    #[test]
    fn stochastic_degraded_cascade() {
        // Y1 = BSC(0.1)(X), Z = BSC(0.2)(Y1), Y2 = X: X -> Y2 -> Y1 -> Z
        let mut rows = vec![];
        for x in 0..2 {
            let mut row = vec![0.0; 8];
            for y1 in 0..2 {
                let p1 = if y1 == x { 0.9 } else { 0.1 };
                for z in 0..2 {
                    let pz = if z == y1 { 0.8 } else { 0.2 };
                    row[(y1 * 2 + x) * 2 + z] += p1 * pz;
                }
            }
            rows.push(row);
        }
        let ch = BroadcastChannel::new(2, 2, 2, 2, ConditionalPmf::new(rows).unwrap()).unwrap();
        assert!(check_degradedness(&ch, DegradednessOrder::Y2Y1Z));
        assert!(!check_degradedness(&ch, DegradednessOrder::Y2ZY1));
        assert!(!check_degradedness(&ch, DegradednessOrder::Y1Y2Z));
    }

    #[test]
    fn induced_joint_examples() {
        let ch = floor_half();
        let j = induced_joint(&ch, &Pmf::point_mass(4, 2)).unwrap();
        assert_eq!(j.prob(&[2, 1, 2, 0]), 1.0);
        let j = induced_joint(&ch, &Pmf::uniform(4)).unwrap();
        assert!((j.entropy_of(&["Y2"]).unwrap() - 2.0).abs() < 1e-12);
        let px = Pmf::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let j = induced_joint(&ch, &px).unwrap();
        let mx = j.marginalize(&["X"]).unwrap();
        for (a, b) in mx.table().iter().zip(px.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(induced_joint(&ch, &Pmf::uniform(3)).is_err());
    }

    #[test]
    fn marginal_consistency() {
        let ch = BroadcastChannel::from_marginals(
            &ConditionalPmf::new(vec![vec![0.7, 0.3], vec![0.2, 0.8], vec![0.5, 0.5]]).unwrap(),
            &ConditionalPmf::new(vec![vec![1.0, 0.0, 0.0], vec![0.1, 0.6, 0.3], vec![0.0, 0.5, 0.5]])
                .unwrap(),
            &ConditionalPmf::identity(3),
        )
        .unwrap();
        let px = Pmf::new(vec![0.2, 0.5, 0.3]).unwrap();
        let j = induced_joint(&ch, &px).unwrap();
        let m = j.marginalize(&["Y2"]).unwrap();
        let direct: Vec<f64> = (0..3)
            .map(|y| (0..3).map(|x| px.get(x) * ch.output_marginal(x, Output::Y2)[y]).sum())
            .collect();
        for (a, b) in m.table().iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(entropy(&Pmf::new(direct).unwrap()) > 0.0);
    }

    #[test]
    fn order_parsing() {
        assert_eq!("Y2-Y1-Z".parse::<DegradednessOrder>().unwrap(), DegradednessOrder::Y2Y1Z);
        assert_eq!("X->Z->Y1->Y2".parse::<DegradednessOrder>().unwrap(), DegradednessOrder::ZY1Y2);
        assert!("Y1-Y1-Z".parse::<DegradednessOrder>().is_err());
    }
}

//! Rate regions: the superposition-Marton inner bound for a fixed auxiliary
//! cascade, the layered rate-splitting system it is projected from, and the
//! closed-form capacity regions of deterministic degraded channels.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{
    degradedness_orders, induced_joint, is_deterministic, BroadcastChannel, ChannelError,
    DegradednessOrder, Output,
};
use crate::polyhedral::{
    self, eliminate_all_traced, int, project_to_region, to_rational_12, EliminationStep, LinIneq,
    LinSystem, PolyError, Rational,
};
use crate::probability::{chain_compose, ConditionalPmf, JointPmf, Pmf, ProbabilityError};
use crate::region::{HalfPlane, RateRegion2D, RegionError};

/// Slack for the strict conditions and entropy case distinctions.
pub const STRICT_TOLERANCE: f64 = 1e-12;
/// Default number of input distributions in a p(x) grid.
pub const DEFAULT_GRID: usize = 2000;

#[derive(Debug, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Probability(#[from] ProbabilityError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("output {0} is not a deterministic function of the input")]
    NotDeterministic(Output),
    #[error("channel satisfies none of the degradedness orders {expected}; it satisfies [{found}]")]
    WrongOrder { expected: String, found: String },
}

// ---------------------------------------------------------------------------
// auxiliary cascades

/// `p(u) p(v|u) p(v1,v2|v) p(x|v1,v2)`; the pair `(v1, v2)` is flattened as
/// `v1 * |V2| + v2`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryCascade {
    p_u: Pmf,
    p_v_given_u: ConditionalPmf,
    p_v1v2_given_v: ConditionalPmf,
    card_v1: usize,
    card_v2: usize,
    p_x_given_v1v2: ConditionalPmf,
}

/// Alphabet sizes `(|U|, |V|, |V1|, |V2|)`.
pub type AuxSizes = (usize, usize, usize, usize);

fn dirichlet_row(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn random_conditional(rng: &mut impl Rng, rows: usize, cols: usize) -> ConditionalPmf {
    let rows: Vec<Pmf> = (0..rows)
        .map(|_| Pmf::from_weights(dirichlet_row(rng, cols)).expect("positive weights"))
        .collect();
    ConditionalPmf::from_rows(rows).expect("rows share one width")
}

/// Builds a conditional `p(b|a)` from joint counts, with uniform rows where
/// `a` has zero mass.
fn conditional_from_joint(joint: &[Vec<f64>], cols: usize) -> ConditionalPmf {
    let rows: Vec<Pmf> = joint
        .iter()
        .map(|r| {
            let s: f64 = r.iter().sum();
            if s > 0.0 {
                Pmf::from_weights(r.clone()).expect("non-negative")
            } else {
                Pmf::uniform(cols)
            }
        })
        .collect();
    ConditionalPmf::from_rows(rows).expect("rows share one width")
}

impl AuxiliaryCascade {
    pub fn new(
        p_u: Pmf,
        p_v_given_u: ConditionalPmf,
        p_v1v2_given_v: ConditionalPmf,
        v1v2: (usize, usize),
        p_x_given_v1v2: ConditionalPmf,
    ) -> Result<Self, TheoremError> {
        let (card_v1, card_v2) = v1v2;
        let dim = |m: String| Err(TheoremError::Dimension(m));
        if p_v_given_u.in_size() != p_u.alphabet_size() {
            return dim(format!("p(v|u) has {} rows, |U| = {}", p_v_given_u.in_size(), p_u.alphabet_size()));
        }
        if p_v1v2_given_v.in_size() != p_v_given_u.out_size() {
            return dim(format!(
                "p(v1,v2|v) has {} rows, |V| = {}",
                p_v1v2_given_v.in_size(),
                p_v_given_u.out_size()
            ));
        }
        if card_v1 == 0 || card_v2 == 0 || p_v1v2_given_v.out_size() != card_v1 * card_v2 {
            return dim(format!(
                "p(v1,v2|v) has {} columns, |V1||V2| = {}",
                p_v1v2_given_v.out_size(),
                card_v1 * card_v2
            ));
        }
        if p_x_given_v1v2.in_size() != card_v1 * card_v2 {
            return dim(format!(
                "p(x|v1,v2) has {} rows, |V1||V2| = {}",
                p_x_given_v1v2.in_size(),
                card_v1 * card_v2
            ));
        }
        Ok(AuxiliaryCascade { p_u, p_v_given_u, p_v1v2_given_v, card_v1, card_v2, p_x_given_v1v2 })
    }

    /// All auxiliaries constant, `X ~ p_x`.
    pub fn degenerate(p_x: &Pmf) -> Self {
        let rows = ConditionalPmf::from_rows(vec![p_x.clone()]).expect("single row");
        AuxiliaryCascade {
            p_u: Pmf::point_mass(1, 0),
            p_v_given_u: ConditionalPmf::identity(1),
            p_v1v2_given_v: ConditionalPmf::identity(1),
            card_v1: 1,
            card_v2: 1,
            p_x_given_v1v2: rows,
        }
    }

    /// Every factor row drawn uniformly from its simplex.
    pub fn random(sizes: AuxSizes, card_x: usize, rng: &mut impl Rng) -> Self {
        let (cu, cv, cv1, cv2) = sizes;
        let p_u = Pmf::from_weights(dirichlet_row(rng, cu)).expect("positive weights");
        let p_v_given_u = random_conditional(rng, cu, cv);
        let p_v1v2_given_v = random_conditional(rng, cv, cv1 * cv2);
        let p_x = random_conditional(rng, cv1 * cv2, card_x);
        AuxiliaryCascade { p_u, p_v_given_u, p_v1v2_given_v, card_v1: cv1, card_v2: cv2, p_x_given_v1v2: p_x }
    }

    /// Cascade obtained by setting each auxiliary to a function of `X`
    /// (`maps[k][x]`, alphabet `cards[k]`, in the order U, V, V1, V2) with
    /// `X ~ p_x`, factorised along the chain. The factorisation reproduces
    /// the joint law when each map refines the previous one.
    pub fn from_identification(p_x: &Pmf, maps: [&[usize]; 4], cards: [usize; 4]) -> Result<Self, TheoremError> {
        let cx = p_x.alphabet_size();
        for (k, m) in maps.iter().enumerate() {
            if m.len() != cx || m.iter().any(|&s| s >= cards[k]) {
                return Err(TheoremError::Dimension(format!("identification map {k} does not fit |X| = {cx}")));
            }
        }
        let [cu, cv, cv1, cv2] = cards;
        let mut pu = vec![0.0; cu];
        let mut puv = vec![vec![0.0; cv]; cu];
        let mut pvw = vec![vec![0.0; cv1 * cv2]; cv];
        let mut pwx = vec![vec![0.0; cx]; cv1 * cv2];
        for x in 0..cx {
            let p = p_x.get(x);
            let (u, v, w) = (maps[0][x], maps[1][x], maps[2][x] * cv2 + maps[3][x]);
            pu[u] += p;
            puv[u][v] += p;
            pvw[v][w] += p;
            pwx[w][x] += p;
        }
        Self::new(
            Pmf::from_weights(pu)?,
            conditional_from_joint(&puv, cv),
            conditional_from_joint(&pvw, cv1 * cv2),
            (cv1, cv2),
            conditional_from_joint(&pwx, cx),
        )
    }

    pub fn sizes(&self) -> AuxSizes {
        (self.p_u.alphabet_size(), self.p_v_given_u.out_size(), self.card_v1, self.card_v2)
    }

    pub fn card_x(&self) -> usize {
        self.p_x_given_v1v2.out_size()
    }

    pub fn p_u(&self) -> &Pmf {
        &self.p_u
    }

    pub fn p_v_given_u(&self) -> &ConditionalPmf {
        &self.p_v_given_u
    }

    pub fn p_v1v2_given_v(&self) -> &ConditionalPmf {
        &self.p_v1v2_given_v
    }

    pub fn p_x_given_v1v2(&self) -> &ConditionalPmf {
        &self.p_x_given_v1v2
    }

    /// `p(v1|v)`, the first marginal of `p(v1,v2|v)`.
    pub fn p_v1_given_v(&self) -> ConditionalPmf {
        self.private_marginal(true)
    }

    /// `p(v2|v)`.
    pub fn p_v2_given_v(&self) -> ConditionalPmf {
        self.private_marginal(false)
    }

    fn private_marginal(&self, first: bool) -> ConditionalPmf {
        let (c1, c2) = (self.card_v1, self.card_v2);
        let rows = self
            .p_v1v2_given_v
            .rows()
            .iter()
            .map(|r| {
                let mut m = vec![0.0; if first { c1 } else { c2 }];
                for (w, &p) in r.probs().iter().enumerate() {
                    m[if first { w / c2 } else { w % c2 }] += p;
                }
                Pmf::from_weights(m).expect("marginal of a distribution")
            })
            .collect();
        ConditionalPmf::from_rows(rows).expect("rows share one width")
    }

    /// Joint law over `U, V, V1, V2, X, Y1, Y2, Z`.
    pub fn joint(&self, ch: &BroadcastChannel) -> Result<JointPmf, TheoremError> {
        if self.card_x() != ch.card_x() {
            return Err(TheoremError::Dimension(format!(
                "cascade emits |X| = {}, channel expects {}",
                self.card_x(),
                ch.card_x()
            )));
        }
        Ok(chain_compose(
            &self.p_u,
            &self.p_v_given_u,
            &self.p_v1v2_given_v,
            (self.card_v1, self.card_v2),
            &self.p_x_given_v1v2,
            ch.kernel(),
            (ch.card_y1(), ch.card_y2(), ch.card_z()),
        )?)
    }
}

// ---------------------------------------------------------------------------
// the inner bound for one cascade

/// Information terms of the inner bound (bits) and the derived offsets.
/// Terms conditioned on `(U, V)` are evaluated as conditioned on `V`,
/// which is equivalent under the Markov chain `U - V - (V1, V2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Theorem1Terms {
    pub i_v1_y1_given_v: f64,
    pub i_v1_z_given_v: f64,
    pub i_v_y2_given_u: f64,
    pub i_v_z_given_u: f64,
    pub i_uvv1_y1: f64,
    pub i_vv1_y1_given_u: f64,
    pub i_vv1_z_given_u: f64,
    pub i_vv2_y2_given_u: f64,
    pub i_vv2_z_given_u: f64,
    pub i_uvv2_y2: f64,
    pub i_v_y1_given_u: f64,
    pub i_u_y1: f64,
    pub i_u_y2: f64,
    pub i_v1_v2_given_v: f64,
    pub i_v2_y2_given_v: f64,
    pub i_v2_z_given_v: f64,
    pub rn1: f64,
    pub rn2: f64,
    pub rn3: f64,
    pub rn4: f64,
    pub rn5: f64,
}

impl Theorem1Terms {
    pub fn from_joint(j: &JointPmf) -> Result<Self, TheoremError> {
        let mi = |a: &[&str], b: &[&str], c: &[&str]| j.mutual_information(a, b, c);
        let t = Theorem1Terms {
            i_v1_y1_given_v: mi(&["V1"], &["Y1"], &["V"])?,
            i_v1_z_given_v: mi(&["V1"], &["Z"], &["V"])?,
            i_v_y2_given_u: mi(&["V"], &["Y2"], &["U"])?,
            i_v_z_given_u: mi(&["V"], &["Z"], &["U"])?,
            i_uvv1_y1: mi(&["U", "V", "V1"], &["Y1"], &[])?,
            i_vv1_y1_given_u: mi(&["V", "V1"], &["Y1"], &["U"])?,
            i_vv1_z_given_u: mi(&["V", "V1"], &["Z"], &["U"])?,
            i_vv2_y2_given_u: mi(&["V", "V2"], &["Y2"], &["U"])?,
            i_vv2_z_given_u: mi(&["V", "V2"], &["Z"], &["U"])?,
            i_uvv2_y2: mi(&["U", "V", "V2"], &["Y2"], &[])?,
            i_v_y1_given_u: mi(&["V"], &["Y1"], &["U"])?,
            i_u_y1: mi(&["U"], &["Y1"], &[])?,
            i_u_y2: mi(&["U"], &["Y2"], &[])?,
            i_v1_v2_given_v: mi(&["V1"], &["V2"], &["V"])?,
            i_v2_y2_given_v: mi(&["V2"], &["Y2"], &["V"])?,
            i_v2_z_given_v: mi(&["V2"], &["Z"], &["V"])?,
            ..Default::default()
        };
        Ok(t.with_derived())
    }

    pub fn from_cascade(ch: &BroadcastChannel, aux: &AuxiliaryCascade) -> Result<Self, TheoremError> {
        Self::from_joint(&aux.joint(ch)?)
    }

    /// Recomputes `rn1..rn5` from the information terms.
    pub fn with_derived(mut self) -> Self {
        self.rn1 = self.i_v2_y2_given_v - self.i_v2_z_given_v - self.i_v1_v2_given_v;
        self.rn2 = (self.i_v_y1_given_u - self.i_v_z_given_u).min(0.0);
        self.rn3 = self.rn1.min(0.0);
        self.rn4 = self.i_v1_y1_given_v - self.i_v1_z_given_v - self.i_v1_v2_given_v;
        self.rn5 = (self.i_v_y1_given_u + self.i_u_y1 - self.i_u_y2)
            .min(self.i_v_y1_given_u)
            .min(self.i_v_z_given_u);
        self
    }

    /// The three strict side conditions, each tested as `lhs - rhs > 1e-12`.
    pub fn conditions(&self) -> [bool; 3] {
        [
            self.i_vv1_y1_given_u + self.rn3 - self.i_vv1_z_given_u > STRICT_TOLERANCE,
            self.i_v1_y1_given_v + self.rn3 - self.i_v1_z_given_v > STRICT_TOLERANCE,
            self.i_v2_y2_given_v - self.i_v2_z_given_v > STRICT_TOLERANCE,
        ]
    }

    pub fn conditions_hold(&self) -> bool {
        self.conditions().iter().all(|&c| c)
    }

    /// The five rate constraints as half-planes `a R1 + b R2 <= c`.
    pub fn halfplanes(&self) -> [HalfPlane; 5] {
        let t = self;
        [
            HalfPlane::new(
                1.0,
                0.0,
                t.i_v1_y1_given_v - t.i_v1_z_given_v + t.i_v_y2_given_u - t.i_v_z_given_u + t.rn1 + t.rn2,
            ),
            HalfPlane::new(1.0, 0.0, t.i_uvv1_y1 - t.i_v1_z_given_v + t.rn3),
            HalfPlane::new(1.0, -1.0, t.i_vv1_y1_given_u - t.i_vv1_z_given_u + t.rn3),
            HalfPlane::new(0.0, 1.0, t.i_vv2_y2_given_u - t.i_vv2_z_given_u + (t.rn2 + t.rn4).min(0.0)),
            HalfPlane::new(1.0, 1.0, t.i_uvv2_y2 - t.i_vv2_z_given_u + t.rn4 + t.rn5),
        ]
    }
}

/// The zero-rate pair is always achievable, so an empty polygon is reported
/// as `{(0, 0)}`.
fn or_origin(r: RateRegion2D) -> RateRegion2D {
    if r.is_empty() {
        RateRegion2D::origin()
    } else {
        r
    }
}

/// The inner bound for fixed terms: `{(0, 0)}` unless all side conditions
/// hold, else the closure of the five constraints in the quadrant.
pub fn theorem1_region(t: &Theorem1Terms) -> Result<RateRegion2D, TheoremError> {
    if !t.conditions_hold() {
        return Ok(RateRegion2D::origin());
    }
    Ok(or_origin(RateRegion2D::from_halfplanes(&t.halfplanes())?))
}

pub fn eval_theorem1(ch: &BroadcastChannel, aux: &AuxiliaryCascade) -> Result<RateRegion2D, TheoremError> {
    theorem1_region(&Theorem1Terms::from_cascade(ch, aux)?)
}

// ---------------------------------------------------------------------------
// layered rate-splitting system

/// Rate variables of the layered scheme, rates of interest first.
pub const SPLIT_VARIABLES: [&str; 16] = [
    "R1", "R2", "Ra", "R1a", "R1b", "R1c", "R2a", "R2a1", "R2a2", "R2b", "R2c", "Rd", "Rd1", "Rd2", "Rl1", "Rl2",
];

/// Variables projected out to reach the `(R1, R2)` region.
pub const AUXILIARY_RATES: [&str; 14] =
    ["Ra", "R1a", "R1b", "R1c", "R2a", "R2a1", "R2a2", "R2b", "R2c", "Rd", "Rd1", "Rd2", "Rl1", "Rl2"];

/// Rate splitting, covering, packing and secrecy constraints of the layered
/// code with the information terms rounded to 12 decimals. With
/// `include_redundant` the two implied secrecy constraints on
/// `R1b + R2b + Rd` and `R2c + Rd2` are added.
pub fn build_layered_system(t: &Theorem1Terms, include_redundant: bool) -> LinSystem {
    let q = to_rational_12;
    let one = || int(1);
    let neg = || int(-1);
    let terms = |vs: &[&'static str]| -> Vec<(&'static str, Rational)> { vs.iter().map(|v| (*v, one())).collect() };
    let mut rows: Vec<LinIneq> = SPLIT_VARIABLES.iter().map(|v| LinIneq::ge([(*v, one())], int(0))).collect();

    rows.push(LinIneq::eq([("R1", one()), ("R1a", neg()), ("R1b", neg()), ("R1c", neg())], int(0)));
    rows.push(LinIneq::eq([("R2", one()), ("R2a", neg()), ("R2b", neg()), ("R2c", neg())], int(0)));
    rows.push(LinIneq::eq([("Ra", one()), ("R1a", neg())], int(0)));
    rows.push(LinIneq::eq([("Ra", one()), ("R2a", neg())], int(0)));
    rows.push(LinIneq::eq([("R2a", one()), ("R2a1", neg()), ("R2a2", neg())], int(0)));

    // Marton covering
    rows.push(LinIneq::ge(terms(&["Rl1", "Rl2"]), q(t.i_v1_v2_given_v)));
    // receiver 1 packing (knows M2)
    rows.push(LinIneq::le(terms(&["R1", "Rd", "Rd1", "Rl1"]), q(t.i_uvv1_y1)));
    rows.push(LinIneq::le(
        [("R1", one()), ("Ra", neg()), ("Rd", one()), ("Rd1", one()), ("Rl1", one())],
        q(t.i_vv1_y1_given_u),
    ));
    rows.push(LinIneq::le(terms(&["R1c", "Rd1", "Rl1"]), q(t.i_v1_y1_given_v)));
    // receiver 2 packing
    rows.push(LinIneq::le(terms(&["R2", "R1b", "Rd", "R2a", "Rd2", "Rl2"]), q(t.i_uvv2_y2)));
    rows.push(LinIneq::le(
        [("R2", one()), ("Ra", neg()), ("R1b", one()), ("Rd", one()), ("R2a", one()), ("Rd2", one()), ("Rl2", one())],
        q(t.i_vv2_y2_given_u),
    ));
    rows.push(LinIneq::le(terms(&["R2a2", "R2c", "Rd2", "Rl2"]), q(t.i_v2_y2_given_v)));
    // individual secrecy
    rows.push(LinIneq::ge(terms(&["R2b", "Rd"]), q(t.i_v_z_given_u)));
    rows.push(LinIneq::ge(terms(&["Rd1"]), q(t.i_v1_z_given_v)));
    rows.push(LinIneq::ge(terms(&["R1b", "Rd"]), q(t.i_v_z_given_u)));
    rows.push(LinIneq::ge(terms(&["Rd2"]), q(t.i_v2_z_given_v)));
    if include_redundant {
        rows.push(LinIneq::ge(terms(&["R1b", "R2b", "Rd"]), q(t.i_v_z_given_u)));
        rows.push(LinIneq::ge(terms(&["R2c", "Rd2"]), q(t.i_v2_z_given_v)));
    }
    LinSystem::with_ineqs(SPLIT_VARIABLES, rows).expect("all rows use declared variables")
}

/// Result of projecting the layered system onto `(R1, R2)`.
#[derive(Debug, Clone)]
pub struct FmDerivation {
    pub system: LinSystem,
    pub projected: LinSystem,
    pub trace: Vec<EliminationStep>,
    pub region: RateRegion2D,
}

/// Builds the layered system, eliminates every auxiliary rate and projects.
/// An infeasible system gives `{(0, 0)}`.
pub fn derive_via_fm(t: &Theorem1Terms, include_redundant: bool) -> Result<FmDerivation, TheoremError> {
    let system = build_layered_system(t, include_redundant);
    let (projected, trace) = eliminate_all_traced(&system, &AUXILIARY_RATES)?;
    let region = or_origin(project_to_region(&projected)?);
    Ok(FmDerivation { system, projected, trace, region })
}

/// Exact vertices of a projected `(R1, R2)` system, `(0, 0)` when infeasible.
pub fn exact_projected_vertices(projected: &LinSystem) -> Result<Vec<(Rational, Rational)>, TheoremError> {
    let v = polyhedral::exact_vertices(projected)?;
    Ok(if v.is_empty() { vec![(int(0), int(0))] } else { v })
}

// ---------------------------------------------------------------------------
// deterministic degraded channels

/// Which closed-form family a channel belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Receiver 2 strongest; the side-information holder is the weaker one.
    Receiver2First,
    /// Receiver 1 strongest.
    Receiver1First,
}

impl Family {
    fn orders(self) -> [DegradednessOrder; 3] {
        match self {
            Family::Receiver2First => DegradednessOrder::WEAK_SIDE_INFO,
            Family::Receiver1First => DegradednessOrder::STRONG_SIDE_INFO,
        }
    }
}

fn require_family(ch: &BroadcastChannel, family: Family) -> Result<(), TheoremError> {
    for o in Output::ALL {
        if !is_deterministic(ch, o) {
            return Err(TheoremError::NotDeterministic(o));
        }
    }
    let found = degradedness_orders(ch);
    if family.orders().iter().any(|o| found.contains(o)) {
        return Ok(());
    }
    let names = |os: &[DegradednessOrder]| os.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(", ");
    Err(TheoremError::WrongOrder { expected: names(&family.orders()), found: names(&found) })
}

/// Output entropies under one input distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputEntropies {
    pub h_y1: f64,
    pub h_y2: f64,
    pub h_z: f64,
    pub h_y1_given_z: f64,
    pub h_y2_given_z: f64,
    pub h_y1_given_y2: f64,
    pub h_y2_given_y1: f64,
}

impl OutputEntropies {
    pub fn new(ch: &BroadcastChannel, p_x: &Pmf) -> Result<Self, TheoremError> {
        let j = induced_joint(ch, p_x)?;
        let h = |a: &[&str]| j.entropy_of(a);
        let c = |a: &[&str], b: &[&str]| j.conditional_entropy(a, b);
        Ok(OutputEntropies {
            h_y1: h(&["Y1"])?,
            h_y2: h(&["Y2"])?,
            h_z: h(&["Z"])?,
            h_y1_given_z: c(&["Y1"], &["Z"])?,
            h_y2_given_z: c(&["Y2"], &["Z"])?,
            h_y1_given_y2: c(&["Y1"], &["Y2"])?,
            h_y2_given_y1: c(&["Y2"], &["Y1"])?,
        })
    }
}

fn gt(a: f64, b: f64) -> bool {
    a - b > STRICT_TOLERANCE
}

fn hp(a: f64, b: f64, c: f64) -> HalfPlane {
    HalfPlane::new(a, b, c)
}

fn thm2_halfplanes(e: &OutputEntropies) -> Vec<HalfPlane> {
    vec![
        hp(1.0, 0.0, e.h_y1),
        hp(1.0, 0.0, e.h_y2_given_z),
        hp(1.0, -1.0, e.h_y1_given_z),
        hp(0.0, 1.0, e.h_y2_given_z),
        hp(1.0, 1.0, e.h_y2),
    ]
}

fn thm3_halfplanes(e: &OutputEntropies) -> Vec<HalfPlane> {
    vec![hp(1.0, 0.0, e.h_y1_given_z), hp(0.0, 1.0, e.h_y2_given_z), hp(1.0, 1.0, e.h_y1)]
}

fn union_over_grid<F>(grid: &[Pmf], f: F) -> Result<RateRegion2D, TheoremError>
where
    F: Fn(&Pmf) -> Result<RateRegion2D, TheoremError> + Sync + Send,
{
    let parts: Vec<RateRegion2D> = grid.par_iter().map(f).collect::<Result<_, _>>()?;
    Ok(or_origin(RateRegion2D::union(parts.iter())))
}

/// Capacity region when receiver 2 is strongest (`X -> Y2 -> ...`), as the
/// union over `px_grid`.
pub fn capacity_region_thm2(ch: &BroadcastChannel, px_grid: &[Pmf]) -> Result<RateRegion2D, TheoremError> {
    require_family(ch, Family::Receiver2First)?;
    union_over_grid(px_grid, |p| {
        let e = OutputEntropies::new(ch, p)?;
        Ok(RateRegion2D::from_halfplanes(&thm2_halfplanes(&e))?)
    })
}

/// Capacity region when receiver 1 is strongest.
pub fn capacity_region_thm3(ch: &BroadcastChannel, px_grid: &[Pmf]) -> Result<RateRegion2D, TheoremError> {
    require_family(ch, Family::Receiver1First)?;
    union_over_grid(px_grid, |p| {
        let e = OutputEntropies::new(ch, p)?;
        Ok(RateRegion2D::from_halfplanes(&thm3_halfplanes(&e))?)
    })
}

/// The specialised achievable regions whose union gives each capacity
/// region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubRegion {
    R1a,
    R1b,
    R1c,
    R1d,
    R2a,
    R2b,
    R2c,
    R2d,
}

impl SubRegion {
    pub const RECEIVER2_FIRST: [SubRegion; 4] = [SubRegion::R1a, SubRegion::R1b, SubRegion::R1c, SubRegion::R1d];
    pub const RECEIVER1_FIRST: [SubRegion; 4] = [SubRegion::R2a, SubRegion::R2b, SubRegion::R2c, SubRegion::R2d];

    pub fn family(self) -> Family {
        match self {
            SubRegion::R1a | SubRegion::R1b | SubRegion::R1c | SubRegion::R1d => Family::Receiver2First,
            _ => Family::Receiver1First,
        }
    }

    /// Auxiliary identification that specialises the layered scheme
    /// (`∅` is a constant).
    pub fn identification(self) -> &'static str {
        match self {
            SubRegion::R1a => "U=∅, V1=V=Y1, V2=Y2",
            SubRegion::R1b => "U=∅, V1=V2=V=Y1=Y2",
            SubRegion::R1c => "V1=V=U=Y1, V2=Y2",
            SubRegion::R1d | SubRegion::R2d => "V1=V2=V=U=∅",
            SubRegion::R2a => "U=∅, V1=Y1, V2=V=Y2",
            SubRegion::R2b => "U=∅, V2=V1=V=Y2=Y1",
            SubRegion::R2c => "V1=Y1, V2=V=U=∅",
        }
    }

    /// Entropy case in which this region applies.
    pub fn applies(self, e: &OutputEntropies) -> bool {
        let tie = |a: f64, b: f64| (a - b).abs() <= STRICT_TOLERANCE;
        match self {
            SubRegion::R1a => gt(e.h_y2, e.h_y1) && gt(e.h_y1, e.h_z),
            SubRegion::R1b => tie(e.h_y2, e.h_y1) && gt(e.h_y1, e.h_z),
            SubRegion::R1c => gt(e.h_y2, e.h_z) && !gt(e.h_y1, e.h_z),
            SubRegion::R1d => !gt(e.h_y2, e.h_z),
            SubRegion::R2a => gt(e.h_y1, e.h_y2) && gt(e.h_y2, e.h_z),
            SubRegion::R2b => tie(e.h_y1, e.h_y2) && gt(e.h_y2, e.h_z),
            SubRegion::R2c => gt(e.h_y1, e.h_z) && !gt(e.h_y2, e.h_z),
            SubRegion::R2d => !gt(e.h_y1, e.h_z),
        }
    }

    /// Side conditions attached to the region.
    pub fn side_conditions(self, e: &OutputEntropies) -> bool {
        match self {
            SubRegion::R1a => gt(e.h_y1_given_z, 0.0) && gt(e.h_y2_given_y1, 0.0),
            SubRegion::R1b => gt(e.h_y1_given_z, 0.0),
            SubRegion::R2a => gt(e.h_y1_given_z, 0.0) && gt(e.h_y1_given_y2, 0.0),
            SubRegion::R2b => gt(e.h_y2_given_z, 0.0),
            _ => true,
        }
    }

    /// Polygon constraints (before the case and side checks).
    pub fn halfplanes(self, e: &OutputEntropies) -> Vec<HalfPlane> {
        match self {
            SubRegion::R1a => thm2_halfplanes(e),
            SubRegion::R1b => vec![hp(1.0, 0.0, e.h_y2_given_z), hp(0.0, 1.0, e.h_y2_given_z), hp(1.0, 1.0, e.h_y2)],
            SubRegion::R1c => vec![
                hp(1.0, 0.0, e.h_y1),
                hp(1.0, -1.0, 0.0),
                hp(0.0, 1.0, e.h_y2_given_z),
                hp(1.0, 1.0, e.h_y2),
            ],
            SubRegion::R2a | SubRegion::R2b => thm3_halfplanes(e),
            SubRegion::R2c => vec![hp(1.0, 0.0, e.h_y1_given_z), hp(0.0, 1.0, 0.0)],
            SubRegion::R1d | SubRegion::R2d => vec![hp(1.0, 0.0, 0.0), hp(0.0, 1.0, 0.0)],
        }
    }

    /// Region under fixed output entropies.
    pub fn region_for(self, e: &OutputEntropies) -> Result<RateRegion2D, TheoremError> {
        if !self.applies(e) || !self.side_conditions(e) {
            return Ok(RateRegion2D::origin());
        }
        Ok(or_origin(RateRegion2D::from_halfplanes(&self.halfplanes(e))?))
    }
}

impl fmt::Display for SubRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for SubRegion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let all = SubRegion::RECEIVER2_FIRST.into_iter().chain(SubRegion::RECEIVER1_FIRST);
        all.into_iter()
            .find(|r| r.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown sub-region `{s}`"))
    }
}

pub fn subregion(ch: &BroadcastChannel, p_x: &Pmf, which: SubRegion) -> Result<RateRegion2D, TheoremError> {
    require_family(ch, which.family())?;
    which.region_for(&OutputEntropies::new(ch, p_x)?)
}

/// Union of a family's four sub-regions over `px_grid`.
pub fn subregion_union(ch: &BroadcastChannel, px_grid: &[Pmf], family: Family) -> Result<RateRegion2D, TheoremError> {
    require_family(ch, family)?;
    let which = match family {
        Family::Receiver2First => SubRegion::RECEIVER2_FIRST,
        Family::Receiver1First => SubRegion::RECEIVER1_FIRST,
    };
    union_over_grid(px_grid, |p| {
        let e = OutputEntropies::new(ch, p)?;
        let parts: Vec<RateRegion2D> = which.iter().map(|w| w.region_for(&e)).collect::<Result<_, _>>()?;
        Ok(RateRegion2D::union(parts.iter()))
    })
}

/// Input distributions: simplex corners, edge midpoints, the barycentre,
/// then uniform Dirichlet samples, truncated to `size`.
pub fn px_grid(card_x: usize, size: usize, seed: u64) -> Vec<Pmf> {
    let mut out = Vec::with_capacity(size);
    for i in 0..card_x {
        out.push(Pmf::point_mass(card_x, i));
    }
    for i in 0..card_x {
        for j in i + 1..card_x {
            let mut w = vec![0.0; card_x];
            w[i] = 0.5;
            w[j] = 0.5;
            out.push(Pmf::new(w).expect("valid midpoint"));
        }
    }
    if card_x > 2 {
        out.push(Pmf::uniform(card_x));
    }
    out.truncate(size);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < size {
        out.push(Pmf::from_weights(dirichlet_row(&mut rng, card_x)).expect("positive weights"));
    }
    out
}

// ---------------------------------------------------------------------------
// union over cascades

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Const,
    X,
    Out(Output),
    /// Rank of `x` among the inputs sharing its output value, so that
    /// `(Out(o), Rest(o))` is a bijective split of `X`.
    Rest(Output),
}

fn residual_map(f: &[usize]) -> (Vec<usize>, usize) {
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let map: Vec<usize> = f
        .iter()
        .map(|&y| {
            let r = seen.entry(y).or_insert(0);
            *r += 1;
            *r - 1
        })
        .collect();
    let card = seen.values().copied().max().unwrap_or(1);
    (map, card)
}

/// Identification patterns tried before random sampling, in the order
/// U, V, V1, V2.
const SEED_PATTERNS: [[Source; 4]; 16] = {
    use Output::{Y1, Y2};
    use Source::{Const as C, Out, Rest, X};
    [
        [C, C, X, X],
        [C, C, X, C],
        [C, C, C, X],
        [C, X, X, X],
        [C, Out(Y1), Out(Y1), Out(Y2)],
        [C, Out(Y1), Out(Y1), Out(Y1)],
        [C, Out(Y2), Out(Y2), Out(Y2)],
        [Out(Y1), Out(Y1), Out(Y1), Out(Y2)],
        [C, Out(Y2), Out(Y1), Out(Y2)],
        [C, C, Out(Y1), C],
        [C, C, Out(Y1), Out(Y2)],
        [C, C, Out(Y2), Out(Y1)],
        [C, C, Out(Y1), Rest(Y1)],
        [C, C, Rest(Y1), Out(Y1)],
        [C, C, Out(Y2), Rest(Y2)],
        [C, C, Rest(Y2), Out(Y2)],
    ]
};

const SEED_GRID: usize = 16;

fn seeded_cascades(ch: &BroadcastChannel, sizes: AuxSizes, seed: u64) -> Vec<AuxiliaryCascade> {
    let cx = ch.card_x();
    let limits = [sizes.0, sizes.1, sizes.2, sizes.3];
    let const_map = vec![0usize; cx];
    let x_map: Vec<usize> = (0..cx).collect();
    let mut out = Vec::new();
    for pattern in SEED_PATTERNS {
        let mut maps: Vec<Vec<usize>> = Vec::with_capacity(4);
        let mut cards = [0usize; 4];
        let mut ok = true;
        for (k, s) in pattern.iter().enumerate() {
            let (m, c) = match s {
                Source::Const => (const_map.clone(), 1),
                Source::X => (x_map.clone(), cx),
                Source::Out(o) | Source::Rest(o) => match ch.output_function(*o) {
                    Some(f) if matches!(s, Source::Out(_)) => (f, ch.card(*o)),
                    Some(f) => residual_map(&f),
                    None => {
                        ok = false;
                        break;
                    }
                },
            };
            if c > limits[k] {
                ok = false;
                break;
            }
            maps.push(m);
            cards[k] = c;
        }
        if !ok {
            continue;
        }
        for p in px_grid(cx, SEED_GRID, seed) {
            let m = [&maps[0][..], &maps[1][..], &maps[2][..], &maps[3][..]];
            if let Ok(c) = AuxiliaryCascade::from_identification(&p, m, cards) {
                out.push(c);
            }
        }
    }
    out
}

/// Random cascade number `index` of the search stream for `seed`.
pub fn sampled_cascade(sizes: AuxSizes, card_x: usize, seed: u64, index: u64) -> AuxiliaryCascade {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    AuxiliaryCascade::random(sizes, card_x, &mut rng)
}

/// Union of the inner bound over seeded identification cascades (those that
/// fit `sizes`) and `budget` random cascades. Deterministic given `seed`,
/// independent of the thread count.
pub fn inner_bound_search(
    ch: &BroadcastChannel,
    budget: usize,
    sizes: AuxSizes,
    seed: u64,
) -> Result<RateRegion2D, TheoremError> {
    if [sizes.0, sizes.1, sizes.2, sizes.3].contains(&0) {
        return Err(TheoremError::Dimension("auxiliary alphabet sizes must be positive".into()));
    }
    let seeds = seeded_cascades(ch, sizes, seed);
    let seeded: Vec<RateRegion2D> = seeds.par_iter().map(|c| eval_theorem1(ch, c)).collect::<Result<_, _>>()?;
    let sampled: Vec<RateRegion2D> = (0..budget as u64)
        .into_par_iter()
        .map(|i| eval_theorem1(ch, &sampled_cascade(sizes, ch.card_x(), seed, i)))
        .collect::<Result<_, _>>()?;
    Ok(or_origin(RateRegion2D::union(seeded.iter().chain(sampled.iter()))))
}

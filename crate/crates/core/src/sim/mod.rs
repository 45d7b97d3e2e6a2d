//! Monte-Carlo simulation of the layered secrecy code at small blocklength.
//!
//! Message layout: receiver 1's message is `(m1a, m1b, m1c)`, receiver 2's
//! is `(m2a1, m2a2, m2b, m2c)` with `m2a = m2a1 * N2a2 + m2a2`. The cloud
//! index `m_a = m1a + m2a (mod N_a)` pads one message with the other.

mod codebook;
mod coding;
mod trials;
mod typicality;

pub use codebook::{generate_codebook, otp_combine, recombine_m2a, split_m2a, Codebook};
pub use coding::{
    decode_rx1, decode_rx2, encode, transmit, DecodeFailure, Encoded, Message1, Message2, Rx1Estimate,
    Rx2Estimate, Scheme,
};
pub use trials::{run_trials, RunOptions, SimulationReport, EVENT_NAMES};
pub use typicality::{typicality_check, TypicalityTester};

use thiserror::Error;

use crate::channel::BroadcastChannel;
use crate::theorems::{AuxiliaryCascade, TheoremError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("sequence lengths differ: {0:?}")]
    LengthMismatch(Vec<usize>),
    #[error("expected {expected} sequences, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("index {index} out of range for cardinality {card}")]
    IndexRange { index: usize, card: usize },
    #[error(transparent)]
    Theorem(#[from] TheoremError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Index-set sizes of every message, randomisation and Marton layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cardinalities {
    pub na: usize,
    pub n1b: usize,
    pub n1c: usize,
    pub n2b: usize,
    pub n2c: usize,
    pub n2a1: usize,
    pub n2a2: usize,
    pub nd: usize,
    pub nd1: usize,
    pub nd2: usize,
    pub nl1: usize,
    pub nl2: usize,
}

impl Default for Cardinalities {
    fn default() -> Self {
        Cardinalities { na: 1, n1b: 1, n1c: 1, n2b: 1, n2c: 1, n2a1: 1, n2a2: 1, nd: 1, nd1: 1, nd2: 1, nl1: 1, nl2: 1 }
    }
}

impl Cardinalities {
    pub const NAMES: [&'static str; 12] =
        ["Na", "N1b", "N1c", "N2b", "N2c", "N2a1", "N2a2", "Nd", "Nd1", "Nd2", "Nl1", "Nl2"];

    pub fn values(&self) -> [usize; 12] {
        [
            self.na, self.n1b, self.n1c, self.n2b, self.n2c, self.n2a1, self.n2a2, self.nd, self.nd1, self.nd2,
            self.nl1, self.nl2,
        ]
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut usize> {
        Some(match name {
            "Na" => &mut self.na,
            "N1b" => &mut self.n1b,
            "N1c" => &mut self.n1c,
            "N2b" => &mut self.n2b,
            "N2c" => &mut self.n2c,
            "N2a1" => &mut self.n2a1,
            "N2a2" => &mut self.n2a2,
            "Nd" => &mut self.nd,
            "Nd1" => &mut self.nd1,
            "Nd2" => &mut self.nd2,
            "Nl1" => &mut self.nl1,
            "Nl2" => &mut self.nl2,
            _ => return None,
        })
    }

    /// Number of `v` codewords: `(m_a, m1b, m2b, m2a1, d)`.
    pub fn v_count(&self) -> usize {
        self.na * self.n1b * self.n2b * self.n2a1 * self.nd
    }

    pub fn v1_count(&self) -> usize {
        self.v_count() * self.n1c * self.nd1 * self.nl1
    }

    pub fn v2_count(&self) -> usize {
        self.v_count() * self.n2a2 * self.n2c * self.nd2 * self.nl2
    }

    pub fn message1_count(&self) -> usize {
        self.na * self.n1b * self.n1c
    }

    pub fn message2_count(&self) -> usize {
        self.na * self.n2b * self.n2c
    }
}

/// Everything needed to build and run one code.
#[derive(Debug, Clone)]
pub struct CodeParams {
    pub n: usize,
    pub cards: Cardinalities,
    pub eps: f64,
    pub eps_prime: f64,
    pub cascade: AuxiliaryCascade,
    pub channel: BroadcastChannel,
}

/// Upper bound on the number of stored codeword symbols.
const MAX_CODEBOOK_SYMBOLS: usize = 1 << 26;

impl CodeParams {
    /// All cardinalities one, slacks `eps = 0.2`, `eps' = 0.1`.
    pub fn new(n: usize, cascade: AuxiliaryCascade, channel: BroadcastChannel) -> Self {
        CodeParams { n, cards: Cardinalities::default(), eps: 0.2, eps_prime: 0.1, cascade, channel }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidParams(m));
        if self.n == 0 {
            return bad("blocklength n must be at least 1".into());
        }
        for (name, v) in Cardinalities::NAMES.iter().zip(self.cards.values()) {
            if v == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if self.cards.n2a1 * self.cards.n2a2 != self.cards.na {
            return bad(format!(
                "N2a1 * N2a2 = {} must equal Na = {}",
                self.cards.n2a1 * self.cards.n2a2,
                self.cards.na
            ));
        }
        if !(self.eps > self.eps_prime && self.eps_prime > 0.0) || !self.eps.is_finite() {
            return bad(format!("need eps > eps' > 0, got eps = {}, eps' = {}", self.eps, self.eps_prime));
        }
        if self.cascade.card_x() != self.channel.card_x() {
            return bad(format!(
                "cascade emits |X| = {}, channel expects {}",
                self.cascade.card_x(),
                self.channel.card_x()
            ));
        }
        let (cu, cv, cv1, cv2) = self.cascade.sizes();
        let alphabets = [cu, cv, cv1, cv2, self.channel.card_x(), self.channel.card_y1(), self.channel.card_y2(), self.channel.card_z()];
        if alphabets.iter().any(|&a| a > u16::MAX as usize + 1) {
            return bad("alphabets larger than 65536 symbols are not supported".into());
        }
        let c = &self.cards;
        let symbols = (c.na + c.v_count() + c.v1_count() + c.v2_count()).saturating_mul(self.n);
        if symbols > MAX_CODEBOOK_SYMBOLS {
            return bad(format!("codebook would hold {symbols} symbols, limit is {MAX_CODEBOOK_SYMBOLS}"));
        }
        Ok(())
    }

    /// `log2(N) / n` for a cardinality name such as `N1c`.
    pub fn rate(&self, name: &str) -> Option<f64> {
        let mut c = self.cards;
        c.get_mut(name).map(|v| (*v as f64).log2() / self.n as f64)
    }

    /// `(R1, R2)` implied by the message cardinalities.
    pub fn message_rates(&self) -> (f64, f64) {
        let n = self.n as f64;
        ((self.cards.message1_count() as f64).log2() / n, (self.cards.message2_count() as f64).log2() / n)
    }
}

use super::SimError;
use crate::probability::{JointPmf, LOG_FLOOR};

/// Robust typicality against a fixed design joint: every tuple `a` must
/// satisfy `|count(a)/n - p(a)| <= eps * p(a)`, so zero-probability tuples
/// may not occur at all.
#[derive(Debug, Clone)]
pub struct TypicalityTester {
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl TypicalityTester {
    /// Sequences are expected in the design's variable order.
    pub fn new(design: &JointPmf) -> Self {
        TypicalityTester {
            cards: design.variables().iter().map(|v| v.card).collect(),
            probs: design.table().to_vec(),
        }
    }

    pub fn arity(&self) -> usize {
        self.cards.len()
    }

    /// Callers guarantee equal lengths and arity.
    pub fn check(&self, seqs: &[&[u16]], eps: f64) -> bool {
        let n = seqs[0].len();
        let mut counts = vec![0u32; self.probs.len()];
        for i in 0..n {
            let mut idx = 0;
            for (s, &card) in seqs.iter().zip(&self.cards) {
                idx = idx * card + s[i] as usize;
            }
            if self.probs[idx] <= LOG_FLOOR {
                return false;
            }
            counts[idx] += 1;
        }
        let nf = n as f64;
        self.probs
            .iter()
            .zip(&counts)
            .all(|(&p, &c)| p <= LOG_FLOOR || (c as f64 / nf - p).abs() <= eps * p)
    }
}

/// Checks `seqs` (one per variable of `design`, in order) for robust
/// `eps`-typicality.
pub fn typicality_check(seqs: &[&[u16]], design: &JointPmf, eps: f64) -> Result<bool, SimError> {
    let t = TypicalityTester::new(design);
    if seqs.len() != t.arity() {
        return Err(SimError::Arity { expected: t.arity(), found: seqs.len() });
    }
    let lens: Vec<usize> = seqs.iter().map(|s| s.len()).collect();
    if lens.iter().any(|&l| l != lens[0]) {
        return Err(SimError::LengthMismatch(lens));
    }
    for (s, &card) in seqs.iter().zip(&t.cards) {
        if let Some(&bad) = s.iter().find(|&&x| x as usize >= card) {
            return Err(SimError::IndexRange { index: bad as usize, card });
        }
    }
    if lens[0] == 0 {
        return Ok(t.probs.iter().all(|&p| p <= LOG_FLOOR || eps >= 1.0));
    }
    Ok(t.check(seqs, eps))
}

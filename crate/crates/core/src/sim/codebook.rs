use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CodeParams, SimError};
use crate::probability::{ConditionalPmf, Pmf};

/// `(m1a + m2a) mod na`.
pub fn otp_combine(m1a: usize, m2a: usize, na: usize) -> Result<usize, SimError> {
    for m in [m1a, m2a] {
        if m >= na {
            return Err(SimError::IndexRange { index: m, card: na });
        }
    }
    Ok((m1a + m2a) % na)
}

/// `m2a = m2a1 * n2a2 + m2a2`.
pub fn recombine_m2a(m2a1: usize, m2a2: usize, n2a2: usize) -> usize {
    m2a1 * n2a2 + m2a2
}

pub fn split_m2a(m2a: usize, n2a2: usize) -> (usize, usize) {
    (m2a / n2a2, m2a % n2a2)
}

/// Cumulative rows for inverse-CDF sampling.
#[derive(Debug, Clone)]
pub(crate) struct Sampler {
    cdf: Vec<Vec<f64>>,
}

impl Sampler {
    pub(crate) fn new(k: &ConditionalPmf) -> Self {
        Self::from_rows(k.rows())
    }

    pub(crate) fn from_pmf(p: &Pmf) -> Self {
        Self::from_rows(std::slice::from_ref(p))
    }

    fn from_rows(rows: &[Pmf]) -> Self {
        let cdf = rows
            .iter()
            .map(|r| {
                let mut acc = 0.0;
                r.probs()
                    .iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect()
            })
            .collect();
        Sampler { cdf }
    }

    pub(crate) fn draw(&self, row: usize, rng: &mut impl Rng) -> u16 {
        let c = &self.cdf[row];
        let t: f64 = rng.random::<f64>() * c[c.len() - 1];
        // skip zero-probability symbols at the boundary
        let k = c.partition_point(|&x| x <= t);
        k.min(c.len() - 1) as u16
    }
}

/// Random superposition-Marton codebook. Codewords are stored flat, `n`
/// symbols each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    pub(crate) n: usize,
    pub(crate) u: Vec<u16>,
    pub(crate) v: Vec<u16>,
    pub(crate) v1: Vec<u16>,
    pub(crate) v2: Vec<u16>,
    seed: u64,
}

impl Codebook {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn u(&self, ma: usize) -> &[u16] {
        &self.u[ma * self.n..(ma + 1) * self.n]
    }

    pub fn v(&self, idx: usize) -> &[u16] {
        &self.v[idx * self.n..(idx + 1) * self.n]
    }

    pub fn v1(&self, idx: usize) -> &[u16] {
        &self.v1[idx * self.n..(idx + 1) * self.n]
    }

    pub fn v2(&self, idx: usize) -> &[u16] {
        &self.v2[idx * self.n..(idx + 1) * self.n]
    }

    /// Hand-built codebook; each layer is the flat concatenation of its
    /// codewords in index order.
    pub fn from_parts(
        params: &CodeParams,
        u: Vec<u16>,
        v: Vec<u16>,
        v1: Vec<u16>,
        v2: Vec<u16>,
    ) -> Result<Self, SimError> {
        params.validate()?;
        let c = &params.cards;
        let n = params.n;
        let (cu, cv, cv1, cv2) = params.cascade.sizes();
        for (layer, count, card) in [(&u, c.na, cu), (&v, c.v_count(), cv), (&v1, c.v1_count(), cv1), (&v2, c.v2_count(), cv2)] {
            if layer.len() != count * n {
                return Err(SimError::InvalidParams(format!(
                    "layer holds {} symbols, expected {count} codewords of length {n}",
                    layer.len()
                )));
            }
            if let Some(&s) = layer.iter().find(|&&s| s as usize >= card) {
                return Err(SimError::IndexRange { index: s as usize, card });
            }
        }
        Ok(Codebook { n, u, v, v1, v2, seed: 0 })
    }

    pub fn counts(&self) -> (usize, usize, usize, usize) {
        (self.u.len() / self.n, self.v.len() / self.n, self.v1.len() / self.n, self.v2.len() / self.n)
    }
}

/// Index arithmetic shared by the encoder and decoders.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub c: super::Cardinalities,
}

impl Layout {
    pub fn v_index(&self, ma: usize, m1b: usize, m2b: usize, m2a1: usize, d: usize) -> usize {
        let c = &self.c;
        (((ma * c.n1b + m1b) * c.n2b + m2b) * c.n2a1 + m2a1) * c.nd + d
    }

    /// `m_a` of a `v` index.
    pub fn v_cloud(&self, vidx: usize) -> usize {
        let c = &self.c;
        vidx / (c.n1b * c.n2b * c.n2a1 * c.nd)
    }

    pub fn v1_index(&self, vidx: usize, m1c: usize, d1: usize, l1: usize) -> usize {
        let c = &self.c;
        ((vidx * c.n1c + m1c) * c.nd1 + d1) * c.nl1 + l1
    }

    pub fn v1_parent(&self, idx: usize) -> usize {
        let c = &self.c;
        idx / (c.n1c * c.nd1 * c.nl1)
    }

    pub fn v2_index(&self, vidx: usize, m2a2: usize, m2c: usize, d2: usize, l2: usize) -> usize {
        let c = &self.c;
        (((vidx * c.n2a2 + m2a2) * c.n2c + m2c) * c.nd2 + d2) * c.nl2 + l2
    }

    pub fn v2_parent(&self, idx: usize) -> usize {
        let c = &self.c;
        idx / (c.n2a2 * c.n2c * c.nd2 * c.nl2)
    }
}

/// Codebook generation: `u` i.i.d. from `p(u)`, each `v` symbol-wise from
/// `p(v|u)` over its cloud centre, `v1` and `v2` symbol-wise from the
/// marginals `p(v1|v)` and `p(v2|v)`. Deterministic given `seed`.
pub fn generate_codebook(params: &CodeParams, seed: u64) -> Result<Codebook, SimError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(generate_with(params, &mut rng, seed))
}

pub(crate) fn generate_with(params: &CodeParams, rng: &mut impl Rng, seed: u64) -> Codebook {
    let n = params.n;
    let lay = Layout { c: params.cards };
    let c = &params.cards;
    let su = Sampler::from_pmf(params.cascade.p_u());
    let sv = Sampler::new(params.cascade.p_v_given_u());
    let sv1 = Sampler::new(&params.cascade.p_v1_given_v());
    let sv2 = Sampler::new(&params.cascade.p_v2_given_v());

    let u: Vec<u16> = (0..c.na * n).map(|_| su.draw(0, rng)).collect();
    let mut v = Vec::with_capacity(c.v_count() * n);
    for idx in 0..c.v_count() {
        let ma = lay.v_cloud(idx);
        for i in 0..n {
            v.push(sv.draw(u[ma * n + i] as usize, rng));
        }
    }
    let mut v1 = Vec::with_capacity(c.v1_count() * n);
    for idx in 0..c.v1_count() {
        let p = lay.v1_parent(idx);
        for i in 0..n {
            v1.push(sv1.draw(v[p * n + i] as usize, rng));
        }
    }
    let mut v2 = Vec::with_capacity(c.v2_count() * n);
    for idx in 0..c.v2_count() {
        let p = lay.v2_parent(idx);
        for i in 0..n {
            v2.push(sv2.draw(v[p * n + i] as usize, rng));
        }
    }
    Codebook { n, u, v, v1, v2, seed }
}

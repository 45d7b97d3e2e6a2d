use rand::Rng;

use super::codebook::{Layout, Sampler};
use super::{otp_combine, recombine_m2a, Codebook, CodeParams, SimError, TypicalityTester};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Message1 {
    pub m1a: usize,
    pub m1b: usize,
    pub m1c: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Message2 {
    pub m2a1: usize,
    pub m2a2: usize,
    pub m2b: usize,
    pub m2c: usize,
}

impl Message1 {
    pub fn index(&self, p: &CodeParams) -> usize {
        (self.m1a * p.cards.n1b + self.m1b) * p.cards.n1c + self.m1c
    }

    pub fn random(p: &CodeParams, rng: &mut impl Rng) -> Self {
        let c = &p.cards;
        Message1 { m1a: rng.random_range(0..c.na), m1b: rng.random_range(0..c.n1b), m1c: rng.random_range(0..c.n1c) }
    }

    fn check(&self, p: &CodeParams) -> Result<(), SimError> {
        let c = &p.cards;
        check_all(&[(self.m1a, c.na), (self.m1b, c.n1b), (self.m1c, c.n1c)])
    }
}

impl Message2 {
    pub fn m2a(&self, p: &CodeParams) -> usize {
        recombine_m2a(self.m2a1, self.m2a2, p.cards.n2a2)
    }

    pub fn index(&self, p: &CodeParams) -> usize {
        (self.m2a(p) * p.cards.n2b + self.m2b) * p.cards.n2c + self.m2c
    }

    pub fn random(p: &CodeParams, rng: &mut impl Rng) -> Self {
        let c = &p.cards;
        Message2 {
            m2a1: rng.random_range(0..c.n2a1),
            m2a2: rng.random_range(0..c.n2a2),
            m2b: rng.random_range(0..c.n2b),
            m2c: rng.random_range(0..c.n2c),
        }
    }

    fn check(&self, p: &CodeParams) -> Result<(), SimError> {
        let c = &p.cards;
        check_all(&[(self.m2a1, c.n2a1), (self.m2a2, c.n2a2), (self.m2b, c.n2b), (self.m2c, c.n2c)])
    }
}

fn check_all(pairs: &[(usize, usize)]) -> Result<(), SimError> {
    match pairs.iter().find(|(m, c)| m >= c) {
        Some(&(index, card)) => Err(SimError::IndexRange { index, card }),
        None => Ok(()),
    }
}

/// A validated code with its samplers and typicality testers.
#[derive(Debug, Clone)]
pub struct Scheme {
    params: CodeParams,
    pub(crate) lay: Layout,
    enc: TypicalityTester,
    rx1: TypicalityTester,
    rx2: TypicalityTester,
    x_sampler: Sampler,
    channel_sampler: Sampler,
}

impl Scheme {
    pub fn new(params: CodeParams) -> Result<Self, SimError> {
        params.validate()?;
        let joint = params.cascade.joint(&params.channel)?;
        let tester = |keep: &[&str]| -> Result<TypicalityTester, SimError> {
            let m = joint.marginalize(keep).map_err(crate::theorems::TheoremError::from)?;
            Ok(TypicalityTester::new(&m))
        };
        Ok(Scheme {
            lay: Layout { c: params.cards },
            enc: tester(&["U", "V", "V1", "V2"])?,
            rx1: tester(&["U", "V", "V1", "Y1"])?,
            rx2: tester(&["U", "V", "V2", "Y2"])?,
            x_sampler: Sampler::new(params.cascade.p_x_given_v1v2()),
            channel_sampler: Sampler::new(params.channel.kernel()),
            params,
        })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    pub ma: usize,
    pub d: usize,
    pub d1: usize,
    pub d2: usize,
    pub l1: usize,
    pub l2: usize,
    pub v_index: usize,
    pub v1_index: usize,
    pub v2_index: usize,
    /// No `(l1, l2)` passed the `eps'` test; `(0, 0)` was sent instead.
    pub fallback: bool,
    pub x: Vec<u16>,
}

/// Pads `m1a` with `m2a`, draws the randomisation indices, scans the Marton
/// indices `(l1, l2)` in lexicographic order for the first jointly
/// `eps'`-typical pair and passes the chosen codewords through `p(x|v1,v2)`.
pub fn encode(
    s: &Scheme,
    cb: &Codebook,
    m1: &Message1,
    m2: &Message2,
    rng: &mut impl Rng,
) -> Result<Encoded, SimError> {
    let p = &s.params;
    let c = &p.cards;
    m1.check(p)?;
    m2.check(p)?;
    let ma = otp_combine(m1.m1a, m2.m2a(p), c.na)?;
    let d = rng.random_range(0..c.nd);
    let d1 = rng.random_range(0..c.nd1);
    let d2 = rng.random_range(0..c.nd2);
    let vidx = s.lay.v_index(ma, m1.m1b, m2.m2b, m2.m2a1, d);
    let (u, v) = (cb.u(ma), cb.v(vidx));

    let mut chosen = None;
    'scan: for l1 in 0..c.nl1 {
        let w1 = cb.v1(s.lay.v1_index(vidx, m1.m1c, d1, l1));
        for l2 in 0..c.nl2 {
            let w2 = cb.v2(s.lay.v2_index(vidx, m2.m2a2, m2.m2c, d2, l2));
            if s.enc.check(&[u, v, w1, w2], p.eps_prime) {
                chosen = Some((l1, l2));
                break 'scan;
            }
        }
    }
    let fallback = chosen.is_none();
    let (l1, l2) = chosen.unwrap_or((0, 0));
    let v1_index = s.lay.v1_index(vidx, m1.m1c, d1, l1);
    let v2_index = s.lay.v2_index(vidx, m2.m2a2, m2.m2c, d2, l2);
    let cv2 = p.cascade.sizes().3;
    let x = cb
        .v1(v1_index)
        .iter()
        .zip(cb.v2(v2_index))
        .map(|(&a, &b)| s.x_sampler.draw(a as usize * cv2 + b as usize, rng))
        .collect();
    Ok(Encoded { ma, d, d1, d2, l1, l2, v_index: vidx, v1_index, v2_index, fallback, x })
}

/// One use of the broadcast channel per symbol: `(y1, y2, z)`.
pub fn transmit(s: &Scheme, x: &[u16], rng: &mut impl Rng) -> (Vec<u16>, Vec<u16>, Vec<u16>) {
    let ch = &s.params.channel;
    let mut out = (Vec::with_capacity(x.len()), Vec::with_capacity(x.len()), Vec::with_capacity(x.len()));
    for &xi in x {
        let col = s.channel_sampler.draw(xi as usize, rng) as usize;
        let (a, b, z) = ch.split_column(col);
        out.0.push(a as u16);
        out.1.push(b as u16);
        out.2.push(z as u16);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeFailure {
    NoCandidate,
    /// Number of distinct message tuples that passed.
    Ambiguous(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rx1Estimate {
    pub ma: usize,
    pub m1: Message1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rx2Estimate {
    pub ma: usize,
    pub m2: Message2,
}

/// Tracks the distinct message tuples seen by a decoder.
struct Hits<T> {
    first: Option<T>,
    distinct: Vec<T>,
}

impl<T: PartialEq + Copy> Hits<T> {
    fn new() -> Self {
        Hits { first: None, distinct: Vec::new() }
    }

    fn add(&mut self, t: T) {
        if self.first.is_none() {
            self.first = Some(t);
        }
        if !self.distinct.contains(&t) {
            self.distinct.push(t);
        }
    }

    fn result(&self) -> Result<T, DecodeFailure> {
        match self.distinct.len() {
            0 => Err(DecodeFailure::NoCandidate),
            1 => Ok(self.distinct[0]),
            k => Err(DecodeFailure::Ambiguous(k)),
        }
    }
}

/// Known transmitter state, used to classify error events.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Truth {
    pub m1: Message1,
    pub m2: Message2,
    pub ma: usize,
    pub d: usize,
    pub d1: usize,
    pub d2: usize,
    pub l1: usize,
    pub l2: usize,
}

/// Events `[E11, E12, E13, E14]` or `[E21, E22, E23, E24]`.
pub(crate) type Events4 = [bool; 4];

/// Receiver 1 knows `m2`. Candidate tuples are `(m_a, m1b, m1c)`; the
/// indices `d, d1, l1` are nuisance.
pub fn decode_rx1(s: &Scheme, cb: &Codebook, y1: &[u16], m2: &Message2) -> Result<Rx1Estimate, DecodeFailure> {
    scan_rx1(s, cb, y1, m2, None).0
}

pub(crate) fn scan_rx1(
    s: &Scheme,
    cb: &Codebook,
    y1: &[u16],
    m2: &Message2,
    truth: Option<&Truth>,
) -> (Result<Rx1Estimate, DecodeFailure>, Events4) {
    let p = &s.params;
    let c = &p.cards;
    let eps = p.eps;
    let mut hits = Hits::new();
    let mut ev = [false; 4];
    if let Some(t) = truth {
        let vidx = s.lay.v_index(t.ma, t.m1.m1b, t.m2.m2b, t.m2.m2a1, t.d);
        let w = cb.v1(s.lay.v1_index(vidx, t.m1.m1c, t.d1, t.l1));
        ev[0] = !s.rx1.check(&[cb.u(t.ma), cb.v(vidx), w, y1], eps);
    }
    for ma in 0..c.na {
        let u = cb.u(ma);
        for m1b in 0..c.n1b {
            for d in 0..c.nd {
                let vidx = s.lay.v_index(ma, m1b, m2.m2b, m2.m2a1, d);
                let v = cb.v(vidx);
                for m1c in 0..c.n1c {
                    let found = (0..c.nd1).any(|d1| {
                        (0..c.nl1).any(|l1| s.rx1.check(&[u, v, cb.v1(s.lay.v1_index(vidx, m1c, d1, l1)), y1], eps))
                    });
                    if !found {
                        continue;
                    }
                    hits.add((ma, m1b, m1c));
                    if let Some(t) = truth {
                        if (ma, m1b, m1c) == (t.ma, t.m1.m1b, t.m1.m1c) {
                            continue;
                        }
                        if ma != t.ma {
                            ev[3] = true;
                        } else if (m1b, d) != (t.m1.m1b, t.d) {
                            ev[2] = true;
                        } else {
                            ev[1] = true;
                        }
                    }
                }
            }
        }
    }
    let m2a = m2.m2a(p);
    let out = hits.result().map(|(ma, m1b, m1c)| Rx1Estimate {
        ma,
        m1: Message1 { m1a: (ma + c.na - m2a) % c.na, m1b, m1c },
    });
    (out, ev)
}

/// Receiver 2 decodes `(m_a, m2b, m2a1, m2a2, m2c)`; `m1b, d, d2, l2` are
/// nuisance.
pub fn decode_rx2(s: &Scheme, cb: &Codebook, y2: &[u16]) -> Result<Rx2Estimate, DecodeFailure> {
    scan_rx2(s, cb, y2, None).0
}

pub(crate) fn scan_rx2(
    s: &Scheme,
    cb: &Codebook,
    y2: &[u16],
    truth: Option<&Truth>,
) -> (Result<Rx2Estimate, DecodeFailure>, Events4) {
    let p = &s.params;
    let c = &p.cards;
    let eps = p.eps;
    let mut hits = Hits::new();
    let mut ev = [false; 4];
    if let Some(t) = truth {
        let vidx = s.lay.v_index(t.ma, t.m1.m1b, t.m2.m2b, t.m2.m2a1, t.d);
        let w = cb.v2(s.lay.v2_index(vidx, t.m2.m2a2, t.m2.m2c, t.d2, t.l2));
        ev[0] = !s.rx2.check(&[cb.u(t.ma), cb.v(vidx), w, y2], eps);
    }
    for ma in 0..c.na {
        let u = cb.u(ma);
        for m1b in 0..c.n1b {
            for m2b in 0..c.n2b {
                for m2a1 in 0..c.n2a1 {
                    for d in 0..c.nd {
                        let vidx = s.lay.v_index(ma, m1b, m2b, m2a1, d);
                        let v = cb.v(vidx);
                        for m2a2 in 0..c.n2a2 {
                            for m2c in 0..c.n2c {
                                let found = (0..c.nd2).any(|d2| {
                                    (0..c.nl2).any(|l2| {
                                        let w = cb.v2(s.lay.v2_index(vidx, m2a2, m2c, d2, l2));
                                        s.rx2.check(&[u, v, w, y2], eps)
                                    })
                                });
                                if !found {
                                    continue;
                                }
                                let m2 = Message2 { m2a1, m2a2, m2b, m2c };
                                hits.add((ma, m2));
                                if let Some(t) = truth {
                                    if (ma, m2) == (t.ma, t.m2) {
                                        continue;
                                    }
                                    if ma != t.ma {
                                        ev[3] = true;
                                    } else if (m1b, m2b, m2a1, d) != (t.m1.m1b, t.m2.m2b, t.m2.m2a1, t.d) {
                                        ev[2] = true;
                                    } else {
                                        ev[1] = true;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    (hits.result().map(|(ma, m2)| Rx2Estimate { ma, m2 }), ev)
}

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::codebook::generate_with;
use super::coding::{scan_rx1, scan_rx2, Truth};
use super::{encode, transmit, Codebook, CodeParams, Message1, Message2, Scheme, SimError};
use crate::region::fmt_sig12;

pub const EVENT_NAMES: [&str; 9] = ["E0", "E11", "E12", "E13", "E14", "E21", "E22", "E23", "E24"];

/// Leakage is only estimated while `n log2 |Z| <= 16`, i.e. at most 65536
/// possible eavesdropper observations.
const LEAK_GATE_BITS: f64 = 16.0;

/// High bit of the stream id marks codebook streams, trials use the rest.
const CODEBOOK_STREAM: u64 = 1 << 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Fresh codebook every this many trials; 0 keeps one for the whole run.
    pub regen_every: usize,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
}


#[derive(Debug, Clone)]
struct TrialOutcome {
    err1: bool,
    err2: bool,
    events: [bool; 9],
    m1: usize,
    m2: usize,
    z: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub codebooks: usize,
    pub rates: (f64, f64),
    pub err1: f64,
    pub err2: f64,
    /// Trial counts per event, in `EVENT_NAMES` order.
    pub events: [u64; 9],
    /// Plug-in `I(M_i; Z^n)` in bits; `None` when the gate is exceeded.
    pub leak1: Option<f64>,
    pub leak2: Option<f64>,
}

impl SimulationReport {
    pub fn event(&self, name: &str) -> Option<u64> {
        EVENT_NAMES.iter().position(|&e| e == name).map(|i| self.events[i])
    }

    pub fn encoder_fallbacks(&self) -> u64 {
        self.events[0]
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let leak = |l: Option<f64>| l.map_or_else(|| "not_estimated".to_string(), fmt_sig12);
        let per_symbol = |l: Option<f64>| l.map_or_else(|| "not_estimated".to_string(), |v| fmt_sig12(v / self.n as f64));
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "codebooks = {}", self.codebooks);
        let _ = writeln!(s, "R1 = {}", fmt_sig12(self.rates.0));
        let _ = writeln!(s, "R2 = {}", fmt_sig12(self.rates.1));
        let _ = writeln!(s, "err1 = {}", fmt_sig12(self.err1));
        let _ = writeln!(s, "err2 = {}", fmt_sig12(self.err2));
        for (name, c) in EVENT_NAMES.iter().zip(self.events) {
            let _ = writeln!(s, "{name} = {c}");
        }
        let _ = writeln!(s, "leak1 = {}", leak(self.leak1));
        let _ = writeln!(s, "leak1_per_symbol = {}", per_symbol(self.leak1));
        let _ = writeln!(s, "leak2 = {}", leak(self.leak2));
        let _ = writeln!(s, "leak2_per_symbol = {}", per_symbol(self.leak2));
        s
    }

    pub fn events_csv(&self) -> String {
        let mut s = String::from("event,count,frequency\n");
        for (name, c) in EVENT_NAMES.iter().zip(self.events) {
            let _ = writeln!(s, "{name},{c},{}", fmt_sig12(c as f64 / self.trials.max(1) as f64));
        }
        s
    }
}

/// Runs `trials` independent transmissions. Results depend only on
/// `(params, trials, seed, regen_every)`, never on the thread count.
pub fn run_trials(
    params: &CodeParams,
    trials: usize,
    seed: u64,
    opts: RunOptions,
) -> Result<SimulationReport, SimError> {
    let scheme = Scheme::new(params.clone())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| SimError::ThreadPool(e.to_string()))?;
    let block = if opts.regen_every == 0 { trials.max(1) } else { opts.regen_every };
    let card_z = params.channel.card_z();
    let gate = params.n as f64 * (card_z as f64).log2() <= LEAK_GATE_BITS;

    let mut outcomes = Vec::with_capacity(trials);
    let mut codebooks = 0;
    let mut start = 0;
    while start < trials {
        let end = (start + block).min(trials);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(CODEBOOK_STREAM | codebooks as u64);
        let cb = generate_with(params, &mut rng, seed);
        codebooks += 1;
        let chunk: Vec<TrialOutcome> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|t| run_one(&scheme, &cb, seed, t as u64, gate.then_some(card_z)))
                .collect::<Result<_, _>>()
        })?;
        outcomes.extend(chunk);
        start = end;
    }

    let mut events = [0u64; 9];
    let (mut e1, mut e2) = (0usize, 0usize);
    for o in &outcomes {
        e1 += o.err1 as usize;
        e2 += o.err2 as usize;
        for (acc, &f) in events.iter_mut().zip(&o.events) {
            *acc += f as u64;
        }
    }
    let tf = trials.max(1) as f64;
    let (leak1, leak2) = if gate {
        let z: Vec<u64> = outcomes.iter().map(|o| o.z.expect("gated")).collect();
        let m1: Vec<usize> = outcomes.iter().map(|o| o.m1).collect();
        let m2: Vec<usize> = outcomes.iter().map(|o| o.m2).collect();
        (Some(plugin_mi(&m1, &z)), Some(plugin_mi(&m2, &z)))
    } else {
        (None, None)
    };
    Ok(SimulationReport {
        n: params.n,
        trials,
        seed,
        codebooks,
        rates: params.message_rates(),
        err1: e1 as f64 / tf,
        err2: e2 as f64 / tf,
        events,
        leak1,
        leak2,
    })
}

fn run_one(s: &Scheme, cb: &Codebook, seed: u64, trial: u64, z_card: Option<usize>) -> Result<TrialOutcome, SimError> {
    let p = s.params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let m1 = Message1::random(p, &mut rng);
    let m2 = Message2::random(p, &mut rng);
    let e = encode(s, cb, &m1, &m2, &mut rng)?;
    let (y1, y2, z) = transmit(s, &e.x, &mut rng);
    let truth = Truth { m1, m2, ma: e.ma, d: e.d, d1: e.d1, d2: e.d2, l1: e.l1, l2: e.l2 };
    let (r1, ev1) = scan_rx1(s, cb, &y1, &m2, Some(&truth));
    let (r2, ev2) = scan_rx2(s, cb, &y2, Some(&truth));
    let mut events = [false; 9];
    events[0] = e.fallback;
    events[1..5].copy_from_slice(&ev1);
    events[5..9].copy_from_slice(&ev2);
    let z_index = z_card.map(|card| z.iter().fold(0u64, |acc, &s| acc * card as u64 + s as u64));
    Ok(TrialOutcome {
        err1: r1.map_or(true, |r| r.m1 != m1),
        err2: r2.map_or(true, |r| r.m2 != m2),
        events,
        m1: m1.index(p),
        m2: m2.index(p),
        z: z_index,
    })
}

/// Plug-in mutual information of paired samples, in bits.
pub(crate) fn plugin_mi(a: &[usize], b: &[u64]) -> f64 {
    let t = a.len() as f64;
    if a.is_empty() {
        return 0.0;
    }
    let mut joint: BTreeMap<(usize, u64), u64> = BTreeMap::new();
    let mut pa: BTreeMap<usize, u64> = BTreeMap::new();
    let mut pb: BTreeMap<u64, u64> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *pa.entry(x).or_default() += 1;
        *pb.entry(y).or_default() += 1;
    }
    let mi: f64 = joint
        .iter()
        .map(|(&(x, y), &c)| {
            let c = c as f64;
            c / t * (c * t / (pa[&x] as f64 * pb[&y] as f64)).log2()
        })
        .sum();
    mi.max(0.0)
}

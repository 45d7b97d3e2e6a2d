#![allow(dead_code)]

use secrecy_core::probability::{ConditionalPmf, Pmf};
use secrecy_core::sim::{Cardinalities, CodeParams};
use secrecy_core::{AuxiliaryCascade, BroadcastChannel};

/// Symmetric 4-ary noise: correct with probability `correct`, otherwise
/// uniform over the other three symbols.
pub fn noisy(correct: f64) -> ConditionalPmf {
    let off = (1.0 - correct) / 3.0;
    ConditionalPmf::new((0..4).map(|x| (0..4).map(|y| if x == y { correct } else { off }).collect()).collect())
        .unwrap()
}

/// Independent noisy outputs; receiver 1 best, eavesdropper worst.
pub fn noisy_channel() -> BroadcastChannel {
    BroadcastChannel::from_marginals(&noisy(0.95), &noisy(0.85), &noisy(0.4)).unwrap()
}

/// `Y2 = X`, `Y1 = floor(X/2)`, `Z` constant.
pub fn receiver2_stronger() -> BroadcastChannel {
    BroadcastChannel::deterministic(&[0, 0, 1, 1], &[0, 1, 2, 3], &[0, 0, 0, 0], (2, 4, 1)).unwrap()
}

/// `Y1 = X`, `Y2 = floor(X/2)`, `Z` constant.
pub fn receiver1_stronger() -> BroadcastChannel {
    BroadcastChannel::deterministic(&[0, 1, 2, 3], &[0, 0, 1, 1], &[0, 0, 0, 0], (4, 2, 1)).unwrap()
}

pub fn noiseless_channel() -> BroadcastChannel {
    BroadcastChannel::deterministic(&[0, 1, 2, 3], &[0, 1, 2, 3], &[0, 0, 0, 0], (4, 4, 1)).unwrap()
}

/// Trivial `U, V`; `V1, V2` independent bits; `X = 2 V1 + V2`.
pub fn bit_pair_cascade(p1: f64, p2: f64) -> AuxiliaryCascade {
    let w = |a: usize, b: usize| (if a == 1 { p1 } else { 1.0 - p1 }) * (if b == 1 { p2 } else { 1.0 - p2 });
    AuxiliaryCascade::new(
        Pmf::point_mass(1, 0),
        ConditionalPmf::identity(1),
        ConditionalPmf::new(vec![vec![w(0, 0), w(0, 1), w(1, 0), w(1, 1)]]).unwrap(),
        (2, 2),
        ConditionalPmf::identity(4),
    )
    .unwrap()
}

/// Noiseless private layers only, `N1c = N2c = n1c`, support-only typicality.
pub fn private_layer_params(n: usize, n1c: usize) -> CodeParams {
    let mut p = CodeParams::new(n, bit_pair_cascade(0.5, 0.5), noiseless_channel());
    p.cards.n1c = n1c;
    p.cards.n2c = n1c;
    p.eps = 3.0;
    p.eps_prime = 2.0;
    p
}

/// Every output equals `X` and every auxiliary equals `X`; only the padded
/// cloud index carries information.
pub fn pad_only_params(n: usize) -> CodeParams {
    let ch = BroadcastChannel::deterministic(&[0, 1, 2, 3], &[0, 1, 2, 3], &[0, 1, 2, 3], (4, 4, 4)).unwrap();
    let diag: Vec<Vec<f64>> = (0..4).map(|v| (0..16).map(|w| if w == v * 4 + v { 1.0 } else { 0.0 }).collect()).collect();
    let aux = AuxiliaryCascade::new(
        Pmf::uniform(4),
        ConditionalPmf::identity(4),
        ConditionalPmf::new(diag).unwrap(),
        (4, 4),
        ConditionalPmf::deterministic(&(0..16).map(|w| w / 4).collect::<Vec<_>>(), 4).unwrap(),
    )
    .unwrap();
    let mut p = CodeParams::new(n, aux, ch);
    p.cards = Cardinalities { na: 4, n2a1: 2, n2a2: 2, ..Default::default() };
    p.eps = 3.0;
    p.eps_prime = 2.0;
    p
}

//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fail.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secrecy_core::lp::Rational;
use secrecy_core::polyhedral::{eliminate_all, int, lift_feasible, ratio};
use secrecy_core::probability::{JointPmf, Variable};
use secrecy_core::sim::{run_trials, RunOptions};
use secrecy_core::theorems::*;
use secrecy_core::{BroadcastChannel, LinIneq, LinSystem, RateRegion2D, Relation};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn vertices_match(r: &RateRegion2D, want: &[(f64, f64)], tol: f64) -> bool {
    let got = r.vertices();
    got.len() == want.len()
        && want.iter().all(|&(a, b)| got.iter().any(|p| (p.r1 - a).abs() <= tol && (p.r2 - b).abs() <= tol))
}

fn fmt_vertices(r: &RateRegion2D) -> String {
    let v: Vec<String> = r.vertices().iter().map(|p| format!("({:.6},{:.6})", p.r1, p.r2)).collect();
    v.join(" ")
}

/// The first five sampled cascades on the noisy channel that meet the strict
/// side conditions.
fn qualifying_cascades() -> Vec<Theorem1Terms> {
    let ch = noisy_channel();
    let mut out = Vec::new();
    let mut i = 0;
    while out.len() < 5 {
        let t = Theorem1Terms::from_cascade(&ch, &sampled_cascade((2, 2, 2, 2), 4, 42, i)).unwrap();
        if t.conditions_hold() {
            out.push(t);
        }
        i += 1;
    }
    out
}

fn criterion_1(cascades: &[Theorem1Terms]) -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for t in cascades {
        let fm = derive_via_fm(t, false).unwrap();
        let direct = theorem1_region(t).unwrap();
        worst = worst.max(fm.region.hausdorff(&direct));
    }
    let el = start.elapsed();
    outcome(
        worst <= 1e-6 && el <= Duration::from_secs(120),
        format!("{} cascades, max Hausdorff {worst:.3e} (tol 1e-6), {:.1}s (limit 120s)", cascades.len(), el.as_secs_f64()),
    )
}

fn criterion_2(cascades: &[Theorem1Terms]) -> Outcome {
    let mut same = 0;
    for t in cascades {
        let base = derive_via_fm(t, false).unwrap();
        let more = derive_via_fm(t, true).unwrap();
        let a = exact_projected_vertices(&base.projected).unwrap();
        let b = exact_projected_vertices(&more.projected).unwrap();
        same += (a == b) as usize;
    }
    outcome(same == cascades.len(), format!("exact vertex sets equal for {same}/{} cascades", cascades.len()))
}

fn criterion_3(grid: &[secrecy_core::Pmf]) -> Outcome {
    let start = Instant::now();
    let ch = receiver2_stronger();
    let cap = capacity_region_thm2(&ch, grid).unwrap();
    let union = subregion_union(&ch, grid, Family::Receiver2First).unwrap();
    let h = cap.hausdorff(&union);
    let ok_v = vertices_match(&cap, &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 2.0)], 1e-9);
    let el = start.elapsed();
    outcome(
        ok_v && h <= 0.02 && el <= Duration::from_secs(60),
        format!(
            "vertices {} (tol 1e-9), sub-region union Hausdorff {h:.3e} (tol 0.02), {:.1}s (limit 60s)",
            fmt_vertices(&cap),
            el.as_secs_f64()
        ),
    )
}

fn criterion_4(grid: &[secrecy_core::Pmf]) -> Outcome {
    let ch = receiver1_stronger();
    let cap = capacity_region_thm3(&ch, grid).unwrap();
    let union = subregion_union(&ch, grid, Family::Receiver1First).unwrap();
    let h = cap.hausdorff(&union);
    let ok_v = vertices_match(&cap, &[(0.0, 0.0), (2.0, 0.0), (1.0, 1.0), (0.0, 1.0)], 1e-9);
    // eavesdropper sees Y2: only R1 <= max H(Y1|Z) = 1 survives
    let seen = BroadcastChannel::deterministic(&[0, 1, 2, 3], &[0, 0, 1, 1], &[0, 0, 1, 1], (4, 2, 2)).unwrap();
    let seg = capacity_region_thm3(&seen, grid).unwrap();
    let ok_seg = vertices_match(&seg, &[(0.0, 0.0), (1.0, 0.0)], 1e-9);
    outcome(
        ok_v && h <= 0.02 && ok_seg,
        format!(
            "vertices {} (tol 1e-9), union Hausdorff {h:.3e} (tol 0.02), Z=Y2 region {}",
            fmt_vertices(&cap),
            fmt_vertices(&seg)
        ),
    )
}

fn criterion_5(grid: &[secrecy_core::Pmf]) -> Outcome {
    // receiver 2 strongest with Z = Y1
    let a = BroadcastChannel::deterministic(&[0, 0, 1, 1], &[0, 1, 2, 3], &[0, 0, 1, 1], (2, 4, 2)).unwrap();
    let ra = capacity_region_thm2(&a, grid).unwrap();
    let r1_max = ra.support(1.0, 0.0);
    // receiver 1 strongest with Z = Y2
    let b = BroadcastChannel::deterministic(&[0, 1, 2, 3], &[0, 0, 1, 1], &[0, 0, 1, 1], (4, 2, 2)).unwrap();
    let rb = capacity_region_thm3(&b, grid).unwrap();
    let r2_max = rb.support(0.0, 1.0);
    outcome(
        r1_max > 1e-9 && r2_max.abs() <= 1e-12,
        format!("Z=Y1 family: max R1 = {r1_max:.6} (> 0); mirrored Z=Y2: max R2 = {r2_max:.3e} (= 0)"),
    )
}

fn criterion_6(grid: &[secrecy_core::Pmf]) -> Outcome {
    let mut lines = Vec::new();
    let mut all = true;
    for (name, ch, thm2) in [("Y2=X", receiver2_stronger(), true), ("Y1=X", receiver1_stronger(), false)] {
        let cap = if thm2 { capacity_region_thm2(&ch, grid) } else { capacity_region_thm3(&ch, grid) }.unwrap();
        for seed in [1u64, 2, 3] {
            let inner = inner_bound_search(&ch, 5000, (2, 2, 2, 2), seed).unwrap();
            let excess = inner.directed_hausdorff(&cap);
            let ok = inner.is_subset_of(&cap, 1e-6);
            all &= ok;
            lines.push(format!("{name} seed {seed}: excess {excess:.2e}"));
        }
    }
    outcome(all, format!("{} (tol 1e-6)", lines.join(", ")))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let a = run_trials(&private_layer_params(8, 4), 1000, 2024, RunOptions::default()).unwrap();
    let ok_a = a.err1 <= 0.05 && a.err2 <= 0.05 && a.leak1 == Some(0.0) && a.leak2 == Some(0.0);
    let b = run_trials(&pad_only_params(8), 1000, 2024, RunOptions::default()).unwrap();
    let leak1 = b.leak1.unwrap_or(f64::INFINITY);
    let ok_b = leak1 <= 0.05;
    let one = run_trials(&private_layer_params(8, 4), 1000, 77, RunOptions { regen_every: 0, threads: 1 }).unwrap();
    let eight = run_trials(&private_layer_params(8, 4), 1000, 77, RunOptions { regen_every: 0, threads: 8 }).unwrap();
    let ok_c = one.to_text() == eight.to_text() && one.events_csv() == eight.events_csv();
    let el = start.elapsed();
    let show = |l: Option<f64>| l.map_or_else(|| "not estimated".to_string(), |v| format!("{v:.3e}"));
    outcome(
        ok_a && ok_b && ok_c && el <= Duration::from_secs(120),
        format!(
            "(a) err1 {:.3} err2 {:.3} (tol 0.05) leak {}/{} (= 0); (b) leak1 {leak1:.4} bits (tol 0.05); (c) 1 vs 8 threads identical: {ok_c}; {:.1}s (limit 120s)",
            a.err1,
            a.err2,
            show(a.leak1),
            show(a.leak2),
            el.as_secs_f64()
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let cards = [rng.random_range(1..=4), rng.random_range(1..=4), rng.random_range(1..=3)];
        let mut t: Vec<f64> = (0..cards.iter().product::<usize>())
            .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() })
            .collect();
        t[0] += 1e-3;
        let s: f64 = t.iter().sum();
        t.iter_mut().for_each(|x| *x /= s);
        let j = JointPmf::new(
            vec![Variable::new("A", cards[0]), Variable::new("B", cards[1]), Variable::new("C", cards[2])],
            t,
        )
        .unwrap();
        let h = |n: &[&str]| j.entropy_of(n).unwrap();
        let hc = |a: &[&str], g: &[&str]| j.conditional_entropy(a, g).unwrap();
        let mi = |a: &[&str], b: &[&str], g: &[&str]| j.mutual_information(a, b, g).unwrap();
        let gaps = [
            (h(&["A", "B", "C"]) - h(&["A"]) - hc(&["B"], &["A"]) - hc(&["C"], &["A", "B"])).abs(),
            (mi(&["A"], &["B", "C"], &[]) - mi(&["A"], &["B"], &[]) - mi(&["A"], &["C"], &["B"])).abs(),
            (-h(&["A", "B"])).max(0.0),
            (-mi(&["A"], &["B"], &["C"])).max(0.0),
            (mi(&["A"], &["B"], &[]) - h(&["A"]).min(h(&["B"]))).max(0.0),
            (mi(&["A"], &["C"], &["B"]) - hc(&["A"], &["B"]).min(hc(&["C"], &["B"]))).max(0.0),
        ];
        worst = gaps.iter().fold(worst, |m, &g| m.max(g));
    }
    outcome(worst <= 1e-10, format!("1000 joints, worst violation {worst:.3e} (tol 1e-10)"))
}

fn criterion_9() -> Outcome {
    let vars = ["x", "y", "a", "b", "c"];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut disagreements = 0;
    let mut checked = 0;
    for _ in 0..200 {
        let mut sys = LinSystem::new(vars);
        for _ in 0..rng.random_range(3..9) {
            let terms: Vec<(&str, Rational)> = vars
                .iter()
                .filter_map(|&v| {
                    let c: i64 = rng.random_range(-3..=3);
                    (c != 0 && rng.random_bool(0.6)).then(|| (v, int(c)))
                })
                .collect();
            let rel = if rng.random_bool(0.1) { Relation::Eq } else { Relation::Le };
            sys.push(LinIneq::new(terms, rel, int(rng.random_range(-4..=10)))).unwrap();
        }
        for v in ["x", "y"] {
            sys.push(LinIneq::le([(v, int(1))], int(6))).unwrap();
            sys.push(LinIneq::ge([(v, int(1))], int(-6))).unwrap();
        }
        let proj = eliminate_all(&sys, &["a", "b", "c"]).unwrap();
        for _ in 0..50 {
            let p: BTreeMap<String, Rational> = ["x", "y"]
                .iter()
                .map(|v| (v.to_string(), ratio(rng.random_range(-28..=28), rng.random_range(1..=4))))
                .collect();
            disagreements += (proj.contains_point(&p) != lift_feasible(&sys, &p)) as usize;
            checked += 1;
        }
    }
    outcome(disagreements == 0, format!("{checked} point checks, {disagreements} disagreements"))
}

fn main() {
    let cascades = qualifying_cascades();
    let grid = px_grid(4, DEFAULT_GRID, 0);
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("elimination route equals direct inner bound", Box::new(|| criterion_1(&cascades))),
        ("redundant secrecy rows leave the projection unchanged", Box::new(|| criterion_2(&cascades))),
        ("receiver-2-strongest capacity region and sub-regions", Box::new(|| criterion_3(&grid))),
        ("receiver-1-strongest capacity region and sub-regions", Box::new(|| criterion_4(&grid))),
        ("side-information asymmetry", Box::new(|| criterion_5(&grid))),
        ("inner bound search inside capacity", Box::new(|| criterion_6(&grid))),
        ("simulator soundness", Box::new(criterion_7)),
        ("information-measure identities", Box::new(criterion_8)),
        ("elimination soundness against lifted LP", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += !o.pass as usize;
        println!("{} criterion {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

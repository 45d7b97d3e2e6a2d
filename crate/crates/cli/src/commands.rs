use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use secrecy_core::channel::{check_degradedness, is_deterministic};
use secrecy_core::sim::{run_trials, CodeParams, RunOptions};
use secrecy_core::theorems::{
    capacity_region_thm2, capacity_region_thm3, derive_via_fm, eval_theorem1, exact_projected_vertices,
    inner_bound_search, px_grid, subregion, AuxSizes, Family, SubRegion, Theorem1Terms, TheoremError,
};
use secrecy_core::{BroadcastChannel, DegradednessOrder, Output, RateRegion2D};

use crate::error::CliError;
use crate::input::{load_cascade, load_channel, load_sim_config};

/// Tolerance for the union being inside the capacity region.
const INSIDE_TOLERANCE: f64 = 1e-6;
/// Grid-resolution tolerance for the capacity region being covered.
const COVER_TOLERANCE: f64 = 0.02;

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: cannot write: {e}", path.display())))
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: cannot create: {e}", dir.display())))
}

/// Writes `{stem}.csv` and `{stem}.halfplanes.txt`, returning the CSV path.
fn write_region(dir: &Path, stem: &str, r: &RateRegion2D) -> Result<PathBuf, CliError> {
    let csv = dir.join(format!("{stem}.csv"));
    write_file(&csv, &r.to_csv())?;
    write_file(&dir.join(format!("{stem}.halfplanes.txt")), &r.halfplane_sidecar())?;
    Ok(csv)
}

fn describe_vertices(r: &RateRegion2D) -> String {
    let v: Vec<String> = r.vertices().iter().map(|p| format!("({:.6}, {:.6})", p.r1, p.r2)).collect();
    v.join(" ")
}

pub fn channel_check(spec: &Path) -> Result<String, CliError> {
    let ch = load_channel(spec)?;
    let mut s = String::new();
    let _ = writeln!(s, "alphabet: x={} y1={} y2={} z={}", ch.card_x(), ch.card_y1(), ch.card_y2(), ch.card_z());
    for o in Output::ALL {
        let _ = writeln!(s, "deterministic {o}: {}", yes_no(is_deterministic(&ch, o)));
    }
    for o in DegradednessOrder::ALL {
        let _ = writeln!(s, "order {o}: {}", yes_no(check_degradedness(&ch, o)));
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RegionMode {
    #[value(name = "thm1-single-cascade")]
    Thm1SingleCascade,
    #[value(name = "thm1-search")]
    Thm1Search,
    Thm2,
    Thm3,
    Subregions,
}

impl RegionMode {
    fn stem(self) -> &'static str {
        match self {
            RegionMode::Thm1SingleCascade => "thm1-single-cascade",
            RegionMode::Thm1Search => "thm1-search",
            RegionMode::Thm2 => "thm2",
            RegionMode::Thm3 => "thm3",
            RegionMode::Subregions => "subregions",
        }
    }
}

pub struct RegionArgs {
    pub mode: RegionMode,
    pub cascade: Option<PathBuf>,
    pub seed: u64,
    pub budget: usize,
    pub grid: usize,
    pub sizes: AuxSizes,
    pub out: PathBuf,
    pub convexify: bool,
}

fn finish(r: RateRegion2D, convexify: bool) -> RateRegion2D {
    if convexify {
        r.convex_hull()
    } else {
        r
    }
}

/// The closed-form family the channel belongs to, preferring the
/// receiver-2-first family when both apply.
fn family_of(ch: &BroadcastChannel) -> Result<Family, CliError> {
    let orders: Vec<DegradednessOrder> =
        DegradednessOrder::ALL.into_iter().filter(|&o| check_degradedness(ch, o)).collect();
    if let Some(o) = Output::ALL.into_iter().find(|&o| !is_deterministic(ch, o)) {
        return Err(TheoremError::NotDeterministic(o).into());
    }
    if DegradednessOrder::WEAK_SIDE_INFO.iter().any(|o| orders.contains(o)) {
        Ok(Family::Receiver2First)
    } else if DegradednessOrder::STRONG_SIDE_INFO.iter().any(|o| orders.contains(o)) {
        Ok(Family::Receiver1First)
    } else {
        Err(CliError::Input("channel is not physically degraded in any order; no closed-form region applies".into()))
    }
}

pub fn region(spec: &Path, a: &RegionArgs) -> Result<String, CliError> {
    let ch = load_channel(spec)?;
    if a.grid == 0 {
        return Err(CliError::Input("--grid must be at least 1".into()));
    }
    prepare_out(&a.out)?;
    let grid = || px_grid(ch.card_x(), a.grid, a.seed);
    let mut report = String::new();
    let region = match a.mode {
        RegionMode::Thm1SingleCascade => {
            let path = a
                .cascade
                .as_deref()
                .ok_or_else(|| CliError::Input("mode thm1-single-cascade needs --cascade FILE".into()))?;
            let aux = load_cascade(path, ch.card_x())?;
            eval_theorem1(&ch, &aux)?
        }
        RegionMode::Thm1Search => inner_bound_search(&ch, a.budget, a.sizes, a.seed)?,
        RegionMode::Thm2 => capacity_region_thm2(&ch, &grid())?,
        RegionMode::Thm3 => capacity_region_thm3(&ch, &grid())?,
        RegionMode::Subregions => {
            let family = family_of(&ch)?;
            let grid = grid();
            let (which, cap) = match family {
                Family::Receiver2First => (SubRegion::RECEIVER2_FIRST, capacity_region_thm2(&ch, &grid)?),
                Family::Receiver1First => (SubRegion::RECEIVER1_FIRST, capacity_region_thm3(&ch, &grid)?),
            };
            let mut parts = Vec::new();
            for w in which {
                let per_px: Vec<RateRegion2D> =
                    grid.par_iter().map(|p| subregion(&ch, p, w)).collect::<Result<_, _>>()?;
                let r = finish(RateRegion2D::union(per_px.iter()), a.convexify);
                let path = write_region(&a.out, &format!("subregions-{w}"), &r)?;
                let _ = writeln!(report, "{w} ({}): {}", w.identification(), describe_vertices(&r));
                let _ = writeln!(report, "wrote {}", path.display());
                parts.push(r);
            }
            let union = finish(RateRegion2D::union(parts.iter()), a.convexify);
            let cap = finish(cap, a.convexify);
            let path = write_region(&a.out, "subregions-capacity", &cap)?;
            let _ = writeln!(report, "capacity: {}", describe_vertices(&cap));
            let _ = writeln!(report, "wrote {}", path.display());
            let pass = |b: bool| if b { "PASS" } else { "FAIL" };
            let inside = union.is_subset_of(&cap, INSIDE_TOLERANCE);
            let covered = cap.is_subset_of(&union, COVER_TOLERANCE);
            let _ = writeln!(
                report,
                "union ⊆ capacity: {}, capacity ⊆ union (within {COVER_TOLERANCE}): {}",
                pass(inside),
                pass(covered)
            );
            union
        }
    };
    let region = finish(region, a.convexify);
    let stem = match a.mode {
        RegionMode::Subregions => "subregions-union",
        m => m.stem(),
    };
    let path = write_region(&a.out, stem, &region)?;
    // the verdict line stays last
    let mut head = format!("{stem}: {}\nwrote {}\n", describe_vertices(&region), path.display());
    head.push_str(&report);
    Ok(head)
}

pub fn fm_derive(spec: &Path, cascade: &Path, include_redundant: bool, out: &Path) -> Result<String, CliError> {
    let ch = load_channel(spec)?;
    let aux = load_cascade(cascade, ch.card_x())?;
    let terms = Theorem1Terms::from_cascade(&ch, &aux)?;
    prepare_out(out)?;
    let base = derive_via_fm(&terms, false)?;
    let used = if include_redundant { derive_via_fm(&terms, true)? } else { base.clone() };

    write_file(&out.join("fm_system.txt"), &used.system.to_text())?;
    write_file(&out.join("fm_projected.txt"), &used.projected.to_text())?;
    let mut trace = String::new();
    for step in &used.trace {
        let _ = writeln!(trace, "{}", step.describe());
        for row in step.system.ineqs() {
            let _ = writeln!(trace, "  {row}");
        }
    }
    let _ = writeln!(trace, "final variables: {}", used.projected.vars().join(", "));
    write_file(&out.join("fm_trace.txt"), &trace)?;
    let path = write_region(out, "fm_region", &used.region)?;

    let mut s = String::new();
    let _ = writeln!(s, "system: {} rows over {} variables", used.system.len(), used.system.vars().len());
    let _ = writeln!(s, "eliminated {} variables; {} rows remain", used.trace.len(), used.projected.len());
    let _ = writeln!(s, "final variables: {}", used.projected.vars().join(", "));
    let _ = writeln!(s, "region: {}", describe_vertices(&used.region));
    // the constraint system does not encode the strict side conditions
    let _ = writeln!(s, "side conditions hold: {}", terms.conditions_hold());
    let _ = writeln!(s, "wrote {}", path.display());
    if include_redundant {
        let mut a = exact_projected_vertices(&base.projected)?;
        let mut b = exact_projected_vertices(&used.projected)?;
        a.sort();
        b.sort();
        let _ = writeln!(s, "region unchanged: {}", a == b);
    }
    Ok(s)
}

pub struct SimulateArgs {
    pub config: Option<PathBuf>,
    pub n: Option<usize>,
    pub trials: Option<usize>,
    pub eps: Option<f64>,
    pub eps_prime: Option<f64>,
    pub seed: Option<u64>,
    pub regen_every: Option<usize>,
    pub out: PathBuf,
    pub threads: usize,
}

pub fn simulate(spec: &Path, cascade: &Path, a: &SimulateArgs) -> Result<String, CliError> {
    let ch = load_channel(spec)?;
    let aux = load_cascade(cascade, ch.card_x())?;
    let (cfg, cards) = match &a.config {
        Some(p) => load_sim_config(p)?,
        None => Default::default(),
    };
    // flags override the config file
    let n = a.n.or(cfg.n).unwrap_or(8);
    let trials = a.trials.or(cfg.trials).unwrap_or(1000);
    let seed = a.seed.or(cfg.seed).unwrap_or(0);
    let mut params = CodeParams::new(n, aux, ch);
    params.cards = cards;
    params.eps = a.eps.or(cfg.eps).unwrap_or(params.eps);
    params.eps_prime = a.eps_prime.or(cfg.eps_prime).unwrap_or(params.eps_prime);
    if trials == 0 {
        return Err(CliError::Input("trials must be at least 1".into()));
    }
    params.validate()?;
    let opts = RunOptions { regen_every: a.regen_every.or(cfg.regen_every).unwrap_or(0), threads: a.threads };
    let report = run_trials(&params, trials, seed, opts)?;
    prepare_out(&a.out)?;
    let text = report.to_text();
    write_file(&a.out.join("report.txt"), &text)?;
    write_file(&a.out.join("events.csv"), &report.events_csv())?;
    Ok(text)
}

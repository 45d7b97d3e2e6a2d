mod common;

use std::collections::HashMap;

use common::*;
use secrecy_core::region::RatePoint;
use secrecy_core::theorems::*;
use secrecy_core::{AuxiliaryCascade, BroadcastChannel, HalfPlane, Pmf, RateRegion2D};

// Variable positions in the hand-built joint.
const U: usize = 0;
const V: usize = 1;
const V1: usize = 2;
const V2: usize = 3;
const Y1: usize = 5;
const Y2: usize = 6;
const Z: usize = 7;

/// Full joint over `(u, v, v1, v2, x, y1, y2, z)` as a sparse list, built by
/// explicit summation over the cascade factors.
fn direct_joint(ch: &BroadcastChannel, aux: &AuxiliaryCascade) -> Vec<([usize; 8], f64)> {
    let (cu, cv, cv1, cv2) = aux.sizes();
    let mut out = Vec::new();
    for u in 0..cu {
        for v in 0..cv {
            for v1 in 0..cv1 {
                for v2 in 0..cv2 {
                    let w = v1 * cv2 + v2;
                    let pw = aux.p_u().get(u) * aux.p_v_given_u().prob(u, v) * aux.p_v1v2_given_v().prob(v, w);
                    for x in 0..ch.card_x() {
                        let px = pw * aux.p_x_given_v1v2().prob(w, x);
                        for col in 0..ch.card_y1() * ch.card_y2() * ch.card_z() {
                            let p = px * ch.kernel().prob(x, col);
                            if p > 0.0 {
                                let (y1, y2, z) = ch.split_column(col);
                                out.push(([u, v, v1, v2, x, y1, y2, z], p));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn marginal(j: &[([usize; 8], f64)], vars: &[usize]) -> HashMap<Vec<usize>, f64> {
    let mut m = HashMap::new();
    for (a, p) in j {
        *m.entry(vars.iter().map(|&i| a[i]).collect()).or_insert(0.0) += p;
    }
    m
}

/// `I(A; B | C)` as `sum p(a,b,c) log2 [p(a,b,c) p(c) / (p(a,c) p(b,c))]`.
fn mi(j: &[([usize; 8], f64)], a: &[usize], b: &[usize], c: &[usize]) -> f64 {
    let cat = |xs: &[&[usize]]| xs.concat();
    let abc = marginal(j, &cat(&[a, b, c]));
    let ac = marginal(j, &cat(&[a, c]));
    let bc = marginal(j, &cat(&[b, c]));
    let cc = marginal(j, c);
    let mut s = 0.0;
    for (k, &p) in &abc {
        let (ka, rest) = k.split_at(a.len());
        let (kb, kc) = rest.split_at(b.len());
        let pac = ac[&[ka, kc].concat()];
        let pbc = bc[&[kb, kc].concat()];
        s += p * (p * cc[kc] / (pac * pbc)).log2();
    }
    s
}

/// The inner bound written out term by term from the hand-built joint.
fn direct_region(ch: &BroadcastChannel, aux: &AuxiliaryCascade) -> (Theorem1Terms, RateRegion2D) {
    let j = direct_joint(ch, aux);
    let t = Theorem1Terms {
        i_v1_y1_given_v: mi(&j, &[V1], &[Y1], &[V]),
        i_v1_z_given_v: mi(&j, &[V1], &[Z], &[V]),
        i_v_y2_given_u: mi(&j, &[V], &[Y2], &[U]),
        i_v_z_given_u: mi(&j, &[V], &[Z], &[U]),
        i_uvv1_y1: mi(&j, &[U, V, V1], &[Y1], &[]),
        i_vv1_y1_given_u: mi(&j, &[V, V1], &[Y1], &[U]),
        i_vv1_z_given_u: mi(&j, &[V, V1], &[Z], &[U]),
        i_vv2_y2_given_u: mi(&j, &[V, V2], &[Y2], &[U]),
        i_vv2_z_given_u: mi(&j, &[V, V2], &[Z], &[U]),
        i_uvv2_y2: mi(&j, &[U, V, V2], &[Y2], &[]),
        i_v_y1_given_u: mi(&j, &[V], &[Y1], &[U]),
        i_u_y1: mi(&j, &[U], &[Y1], &[]),
        i_u_y2: mi(&j, &[U], &[Y2], &[]),
        i_v1_v2_given_v: mi(&j, &[V1], &[V2], &[V]),
        i_v2_y2_given_v: mi(&j, &[V2], &[Y2], &[V]),
        i_v2_z_given_v: mi(&j, &[V2], &[Z], &[V]),
        ..Default::default()
    };
    // offsets and conditions spelled out again rather than reusing the library
    let rn1 = t.i_v2_y2_given_v - t.i_v2_z_given_v - t.i_v1_v2_given_v;
    let rn2 = (t.i_v_y1_given_u - t.i_v_z_given_u).min(0.0);
    let rn3 = rn1.min(0.0);
    let rn4 = t.i_v1_y1_given_v - t.i_v1_z_given_v - t.i_v1_v2_given_v;
    let rn5 = (t.i_v_y1_given_u + t.i_u_y1 - t.i_u_y2).min(t.i_v_y1_given_u).min(t.i_v_z_given_u);
    let ok = t.i_vv1_y1_given_u + rn3 - t.i_vv1_z_given_u > 1e-12
        && t.i_v1_y1_given_v + rn3 - t.i_v1_z_given_v > 1e-12
        && t.i_v2_y2_given_v - t.i_v2_z_given_v > 1e-12;
    let region = if ok {
        let hps = [
            HalfPlane::new(1.0, 0.0, t.i_v1_y1_given_v - t.i_v1_z_given_v + t.i_v_y2_given_u - t.i_v_z_given_u + rn1 + rn2),
            HalfPlane::new(1.0, 0.0, t.i_uvv1_y1 - t.i_v1_z_given_v + rn3),
            HalfPlane::new(1.0, -1.0, t.i_vv1_y1_given_u - t.i_vv1_z_given_u + rn3),
            HalfPlane::new(0.0, 1.0, t.i_vv2_y2_given_u - t.i_vv2_z_given_u + (rn2 + rn4).min(0.0)),
            HalfPlane::new(1.0, 1.0, t.i_uvv2_y2 - t.i_vv2_z_given_u + rn4 + rn5),
        ];
        let r = RateRegion2D::from_halfplanes(&hps).unwrap();
        if r.is_empty() {
            RateRegion2D::origin()
        } else {
            r
        }
    } else {
        RateRegion2D::origin()
    };
    (t.with_derived(), region)
}

#[test]
fn terms_match_direct_summation() {
    let ch = noisy_channel();
    let mut satisfied = 0;
    for i in 0..30 {
        let sizes = if i % 2 == 0 { (2, 2, 2, 2) } else { (1, 3, 2, 3) };
        let aux = sampled_cascade(sizes, 4, 5, i);
        let lib = Theorem1Terms::from_cascade(&ch, &aux).unwrap();
        let (direct, region) = direct_region(&ch, &aux);
        let pairs = [
            (lib.i_v1_y1_given_v, direct.i_v1_y1_given_v),
            (lib.i_v1_z_given_v, direct.i_v1_z_given_v),
            (lib.i_v_y2_given_u, direct.i_v_y2_given_u),
            (lib.i_v_z_given_u, direct.i_v_z_given_u),
            (lib.i_uvv1_y1, direct.i_uvv1_y1),
            (lib.i_vv1_y1_given_u, direct.i_vv1_y1_given_u),
            (lib.i_vv1_z_given_u, direct.i_vv1_z_given_u),
            (lib.i_vv2_y2_given_u, direct.i_vv2_y2_given_u),
            (lib.i_vv2_z_given_u, direct.i_vv2_z_given_u),
            (lib.i_uvv2_y2, direct.i_uvv2_y2),
            (lib.i_v_y1_given_u, direct.i_v_y1_given_u),
            (lib.i_u_y1, direct.i_u_y1),
            (lib.i_u_y2, direct.i_u_y2),
            (lib.i_v1_v2_given_v, direct.i_v1_v2_given_v),
            (lib.i_v2_y2_given_v, direct.i_v2_y2_given_v),
            (lib.i_v2_z_given_v, direct.i_v2_z_given_v),
            (lib.rn5, direct.rn5),
        ];
        for (k, (a, b)) in pairs.iter().enumerate() {
            assert!((a - b).abs() < 1e-10, "cascade {i} term {k}: {a} vs {b}");
        }
        let r = eval_theorem1(&ch, &aux).unwrap();
        assert!(r.hausdorff(&region) < 1e-9, "cascade {i}");
        satisfied += lib.conditions_hold() as usize;
    }
    // both branches are exercised
    assert!(satisfied > 3 && satisfied < 27, "{satisfied}");
}

#[test]
fn fm_route_matches_direct_on_every_cascade() {
    let ch = noisy_channel();
    for i in 0..10 {
        let aux = sampled_cascade((2, 2, 2, 2), 4, 42, i);
        let t = Theorem1Terms::from_cascade(&ch, &aux).unwrap();
        let fm = derive_via_fm(&t, false).unwrap();
        let direct = theorem1_region(&t).unwrap();
        assert!(fm.region.hausdorff(&direct) <= 1e-6, "cascade {i}: {:?} vs {:?}", fm.region.vertices(), direct.vertices());
        assert_eq!(fm.projected.vars(), &["R1".to_string(), "R2".to_string()]);
        assert_eq!(fm.trace.len(), AUXILIARY_RATES.len());
    }
}

/// Unit vector of integer and corner-oriented support directions.
fn support_check(inner: &RateRegion2D, outer: &RateRegion2D, tol: f64) {
    for k in 0..64 {
        let th = k as f64 * std::f64::consts::PI / 2.0 / 63.0;
        let (a, b) = (th.cos(), th.sin());
        assert!(inner.support(a, b) <= outer.support(a, b) + tol, "direction ({a}, {b})");
    }
}

#[test]
fn worked_capacity_regions_on_a_coarse_grid() {
    let grid = px_grid(4, 300, 1);
    let c2 = capacity_region_thm2(&receiver2_stronger(), &grid).unwrap();
    let want2 =
        RateRegion2D::from_halfplanes(&[HalfPlane::new(1.0, 0.0, 1.0), HalfPlane::new(1.0, 1.0, 2.0)]).unwrap();
    assert!(c2.hausdorff(&want2) < 1e-9);
    let c3 = capacity_region_thm3(&receiver1_stronger(), &grid).unwrap();
    let want3 =
        RateRegion2D::from_halfplanes(&[HalfPlane::new(0.0, 1.0, 1.0), HalfPlane::new(1.0, 1.0, 2.0)]).unwrap();
    assert!(c3.hausdorff(&want3) < 1e-9);

    // wrong family is refused
    assert!(capacity_region_thm2(&receiver1_stronger(), &grid).is_err());
    assert!(capacity_region_thm3(&noisy_channel(), &grid).is_err());
}

#[test]
fn subregion_unions_sit_inside_capacity() {
    let grid = px_grid(4, 300, 2);
    for (ch, fam) in [(receiver2_stronger(), Family::Receiver2First), (receiver1_stronger(), Family::Receiver1First)] {
        let cap = match fam {
            Family::Receiver2First => capacity_region_thm2(&ch, &grid).unwrap(),
            Family::Receiver1First => capacity_region_thm3(&ch, &grid).unwrap(),
        };
        let u = subregion_union(&ch, &grid, fam).unwrap();
        assert!(u.is_subset_of(&cap, 1e-9));
        assert!(cap.directed_hausdorff(&u) <= 0.05, "{fam:?}");
    }
}

#[test]
fn weak_eavesdropper_side_information_asymmetry() {
    let grid = px_grid(4, 200, 3);
    // receiver 2 strongest, Z = Y1: the pad keeps R1 positive
    let a = BroadcastChannel::deterministic(&[0, 0, 1, 1], &[0, 1, 2, 3], &[0, 0, 1, 1], (2, 4, 2)).unwrap();
    let ca = capacity_region_thm2(&a, &grid).unwrap();
    assert!(ca.vertices().iter().any(|p| p.r1 > 0.5));
    let pad = subregion(&a, &Pmf::uniform(4), SubRegion::R1c).unwrap();
    assert!(pad.contains(RatePoint::new(1.0, 1.0), 1e-9));
    // receiver 1 strongest, Z = Y2: nothing for receiver 2
    let b = BroadcastChannel::deterministic(&[0, 1, 2, 3], &[0, 0, 1, 1], &[0, 0, 1, 1], (4, 2, 2)).unwrap();
    let cb = capacity_region_thm3(&b, &grid).unwrap();
    assert!(cb.vertices().iter().all(|p| p.r2.abs() < 1e-12));
    assert!(cb.support(1.0, 0.0) > 0.9);
}

#[test]
fn inner_bound_search_is_contained_and_deterministic() {
    let grid = px_grid(4, 300, 4);
    let ch = receiver2_stronger();
    let cap = capacity_region_thm2(&ch, &grid).unwrap();
    let inner = inner_bound_search(&ch, 300, (2, 2, 2, 2), 9).unwrap();
    assert!(inner.is_subset_of(&cap, 1e-6));
    support_check(&inner, &cap, 1e-6);
    // seeded identifications reach the corner (1, 1)
    assert!(inner.contains(RatePoint::new(1.0, 1.0), 1e-6));
    let again = inner_bound_search(&ch, 300, (2, 2, 2, 2), 9).unwrap();
    assert_eq!(inner.vertices(), again.vertices());
}

#[test]
fn grid_is_reproducible_and_normalised() {
    let a = px_grid(3, 50, 7);
    assert_eq!(a.len(), 50);
    assert_eq!(a, px_grid(3, 50, 7));
    for p in &a {
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
    // corners first
    assert_eq!(a[0], Pmf::point_mass(3, 0));
}

//! Planar rate regions in the non-negative quadrant.
//!
//! A [`RateRegion2D`] is a finite union of convex polygons ("pieces"). Every
//! region produced by this crate contains the origin and is star-shaped about
//! it, so the union boundary is computed from the radial function
//! `rho(theta) = max { r : r (cos theta, sin theta) in region }` on
//! `[0, pi/2]`. Pieces that miss the origin are represented by their star hull
//! (the union of segments joining the origin to the piece) for boundary
//! purposes; membership and distances always use the exact pieces.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use thiserror::Error;

/// Tolerance for "vertex satisfies half-plane" checks on reported vertices.
pub const VERTEX_TOLERANCE: f64 = 1e-9;
/// Geometric snapping tolerance for deduplication and collinearity.
const EPS: f64 = 1e-12;
/// Target gap between the upper and lower bound of a Hausdorff search.
const HAUSDORFF_EPS: f64 = 1e-9;
const HAUSDORFF_MAX_SPLITS: usize = 200_000;

#[derive(Debug, Error, PartialEq)]
pub enum RegionError {
    #[error("half-plane intersection is unbounded")]
    Unbounded,
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
}

/// The half-plane `a*R1 + b*R2 <= c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HalfPlane {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        HalfPlane { a, b, c }
    }

    pub fn slack(&self, p: RatePoint) -> f64 {
        self.c - self.a * p.r1 - self.b * p.r2
    }

    pub fn contains(&self, p: RatePoint, tol: f64) -> bool {
        self.slack(p) >= -tol
    }

    fn norm(&self) -> f64 {
        self.a.hypot(self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Self {
        RatePoint { r1, r2 }
    }

    pub fn origin() -> Self {
        RatePoint { r1: 0.0, r2: 0.0 }
    }

    pub fn dist(&self, o: RatePoint) -> f64 {
        (self.r1 - o.r1).hypot(self.r2 - o.r2)
    }

    fn sub(self, o: RatePoint) -> RatePoint {
        RatePoint::new(self.r1 - o.r1, self.r2 - o.r2)
    }

    fn lerp(self, o: RatePoint, t: f64) -> RatePoint {
        RatePoint::new(self.r1 + t * (o.r1 - self.r1), self.r2 + t * (o.r2 - self.r2))
    }

    fn norm(self) -> f64 {
        self.r1.hypot(self.r2)
    }

    fn angle(self) -> f64 {
        self.r2.atan2(self.r1)
    }
}

fn cross(a: RatePoint, b: RatePoint) -> f64 {
    a.r1 * b.r2 - a.r2 * b.r1
}

fn dot(a: RatePoint, b: RatePoint) -> f64 {
    a.r1 * b.r1 + a.r2 * b.r2
}

fn is_origin(p: RatePoint) -> bool {
    p.norm() <= EPS
}

/// A convex polygon with its describing half-planes. Vertices are ordered
/// counter-clockwise, starting at the origin when the origin is a vertex.
/// Points and segments are valid (degenerate) polygons.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    halfplanes: Vec<HalfPlane>,
    vertices: Vec<RatePoint>,
}

impl ConvexPolygon {
    /// Intersects `hps` with the quadrant. Returns `Ok(None)` when the
    /// intersection is empty.
    pub fn from_halfplanes(hps: &[HalfPlane]) -> Result<Option<Self>, RegionError> {
        let mut all: Vec<HalfPlane> = Vec::with_capacity(hps.len() + 2);
        for h in hps {
            if h.norm() == 0.0 {
                if h.c < 0.0 {
                    return Ok(None);
                }
                continue;
            }
            all.push(*h);
        }
        all.push(HalfPlane::new(-1.0, 0.0, 0.0));
        all.push(HalfPlane::new(0.0, -1.0, 0.0));

        let mut pts = Vec::new();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                let (h, g) = (all[i], all[j]);
                let det = h.a * g.b - h.b * g.a;
                if det.abs() <= 1e-14 * h.norm() * g.norm() {
                    continue;
                }
                let p = RatePoint::new((h.c * g.b - h.b * g.c) / det, (h.a * g.c - h.c * g.a) / det);
                if all.iter().all(|k| k.contains(p, 1e-10 * (1.0 + k.c.abs()))) {
                    pts.push(RatePoint::new(p.r1.max(0.0), p.r2.max(0.0)));
                }
            }
        }
        if pts.is_empty() {
            return Ok(None);
        }
        // recession cone: extreme rays lie on the boundary lines
        for h in &all {
            let n = h.norm();
            for s in [1.0, -1.0] {
                let d = RatePoint::new(-h.b * s / n, h.a * s / n);
                if all.iter().all(|k| k.a * d.r1 + k.b * d.r2 <= 1e-12 * k.norm()) {
                    return Err(RegionError::Unbounded);
                }
            }
        }
        let vertices = convex_hull_points(&pts);
        Ok(Some(ConvexPolygon { halfplanes: all, vertices }))
    }

    /// Builds a polygon from known half-planes and vertices (for instance
    /// exact vertices from rational arithmetic). Vertices are re-ordered.
    pub fn from_parts(halfplanes: Vec<HalfPlane>, vertices: &[RatePoint]) -> Self {
        ConvexPolygon { halfplanes, vertices: convex_hull_points(vertices) }
    }

    /// Convex hull of `pts`, with half-planes derived from the hull edges.
    pub fn hull_of(pts: &[RatePoint]) -> Self {
        let vertices = convex_hull_points(pts);
        ConvexPolygon { halfplanes: halfplanes_of_hull(&vertices), vertices }
    }

    pub fn halfplanes(&self) -> &[HalfPlane] {
        &self.halfplanes
    }

    pub fn vertices(&self) -> &[RatePoint] {
        &self.vertices
    }

    pub fn contains(&self, p: RatePoint, tol: f64) -> bool {
        self.halfplanes.iter().all(|h| h.contains(p, tol * h.norm().max(1.0)))
    }

    pub fn contains_polygon(&self, other: &ConvexPolygon, tol: f64) -> bool {
        other.vertices.iter().all(|&v| self.contains(v, tol))
    }

    /// Euclidean distance from `p` to the polygon (zero inside).
    pub fn distance(&self, p: RatePoint) -> f64 {
        distance_to_convex(&self.vertices, p)
    }

    fn bbox(&self) -> BBox {
        BBox::of(&self.vertices)
    }
}

fn distance_to_convex(vs: &[RatePoint], p: RatePoint) -> f64 {
    match vs.len() {
        0 => f64::INFINITY,
        1 => p.dist(vs[0]),
        2 => segment_distance(p, vs[0], vs[1]),
        n => {
            let inside = (0..n).all(|i| cross(vs[(i + 1) % n].sub(vs[i]), p.sub(vs[i])) >= 0.0);
            if inside {
                return 0.0;
            }
            (0..n)
                .map(|i| segment_distance(p, vs[i], vs[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

fn segment_distance(p: RatePoint, a: RatePoint, b: RatePoint) -> f64 {
    let d = b.sub(a);
    let len2 = dot(d, d);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (dot(p.sub(a), d) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}

#[derive(Debug, Clone, Copy)]
struct BBox {
    lo: RatePoint,
    hi: RatePoint,
}

impl BBox {
    fn of(vs: &[RatePoint]) -> BBox {
        let mut lo = RatePoint::new(f64::INFINITY, f64::INFINITY);
        let mut hi = RatePoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in vs {
            lo = RatePoint::new(lo.r1.min(v.r1), lo.r2.min(v.r2));
            hi = RatePoint::new(hi.r1.max(v.r1), hi.r2.max(v.r2));
        }
        BBox { lo, hi }
    }

    fn disjoint(&self, o: &BBox, tol: f64) -> bool {
        self.hi.r1 < o.lo.r1 - tol
            || o.hi.r1 < self.lo.r1 - tol
            || self.hi.r2 < o.lo.r2 - tol
            || o.hi.r2 < self.lo.r2 - tol
    }
}

/// Counter-clockwise convex hull without collinear points, rotated to start
/// at the origin if present, else at the point closest to it.
fn convex_hull_points(pts: &[RatePoint]) -> Vec<RatePoint> {
    let mut p: Vec<RatePoint> = pts.to_vec();
    p.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(a.r2.total_cmp(&b.r2)));
    let mut uniq: Vec<RatePoint> = Vec::with_capacity(p.len());
    for q in p {
        if !uniq.iter().any(|u| u.dist(q) <= EPS) {
            uniq.push(q);
        }
    }
    let p = uniq;
    if p.len() <= 2 {
        return rotate_to_origin(p);
    }
    let turn = |o: RatePoint, a: RatePoint, b: RatePoint| cross(a.sub(o), b.sub(o));
    let scale = p.iter().map(|q| q.norm()).fold(1.0, f64::max);
    let tol = EPS * scale * scale;
    let mut hull: Vec<RatePoint> = Vec::with_capacity(2 * p.len());
    for &q in &p {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], q) <= tol {
            hull.pop();
        }
        hull.push(q);
    }
    let lower = hull.len() + 1;
    for &q in p.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], q) <= tol {
            hull.pop();
        }
        hull.push(q);
    }
    hull.pop();
    rotate_to_origin(hull)
}

fn rotate_to_origin(mut v: Vec<RatePoint>) -> Vec<RatePoint> {
    if let Some(k) = (0..v.len()).min_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm())) {
        v.rotate_left(k);
        if is_origin(v[0]) {
            v[0] = RatePoint::origin();
        }
    }
    v
}

fn halfplanes_of_hull(vs: &[RatePoint]) -> Vec<HalfPlane> {
    let mut out = Vec::new();
    match vs.len() {
        0 => out.push(HalfPlane::new(0.0, 0.0, -1.0)),
        1 => {
            let p = vs[0];
            out.push(HalfPlane::new(1.0, 0.0, p.r1));
            out.push(HalfPlane::new(-1.0, 0.0, -p.r1));
            out.push(HalfPlane::new(0.0, 1.0, p.r2));
            out.push(HalfPlane::new(0.0, -1.0, -p.r2));
        }
        2 => {
            let (p, q) = (vs[0], vs[1]);
            let d = q.sub(p);
            let (a, b) = (d.r2, -d.r1);
            out.push(HalfPlane::new(a, b, a * p.r1 + b * p.r2));
            out.push(HalfPlane::new(-a, -b, -(a * p.r1 + b * p.r2)));
            out.push(HalfPlane::new(d.r1, d.r2, dot(d, q)));
            out.push(HalfPlane::new(-d.r1, -d.r2, -dot(d, p)));
        }
        n => {
            for i in 0..n {
                let (p, q) = (vs[i], vs[(i + 1) % n]);
                let d = q.sub(p);
                let (a, b) = (d.r2, -d.r1);
                out.push(HalfPlane::new(a, b, a * p.r1 + b * p.r2));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// radial profile

/// Boundary samples at one critical angle: the left limit, the farthest
/// point on the ray, and the right limit.
#[derive(Debug, Clone, Copy)]
struct Group {
    theta: f64,
    p_in: RatePoint,
    p_max: RatePoint,
    p_out: RatePoint,
}

/// Radial function as breakpoints; between consecutive groups the boundary
/// is the segment `groups[g].p_out -> groups[g + 1].p_in`.
#[derive(Debug, Clone)]
struct Profile {
    groups: Vec<Group>,
}

fn ray(theta: f64) -> RatePoint {
    if theta == FRAC_PI_2 {
        RatePoint::new(0.0, 1.0)
    } else if theta == 0.0 {
        RatePoint::new(1.0, 0.0)
    } else {
        RatePoint::new(theta.cos(), theta.sin())
    }
}

/// Intersection of ray `theta` with the line through `p` and `q`, assuming
/// the ray meets the segment; a segment collinear with the origin yields
/// the origin.
fn ray_hit(p: RatePoint, q: RatePoint, theta: f64) -> RatePoint {
    let num = cross(p, q);
    let scale = p.norm().max(q.norm()).max(1.0);
    if num.abs() <= EPS * scale * scale {
        return RatePoint::origin();
    }
    let u = ray(theta);
    let den = cross(u, q.sub(p));
    if den.abs() <= f64::MIN_POSITIVE {
        return RatePoint::origin();
    }
    let s = (num / den).max(0.0);
    RatePoint::new(s * u.r1, s * u.r2)
}

fn farther(a: RatePoint, b: RatePoint) -> RatePoint {
    if b.norm() > a.norm() {
        b
    } else {
        a
    }
}

fn sorted_angles(mut a: Vec<f64>) -> Vec<f64> {
    a.push(0.0);
    a.push(FRAC_PI_2);
    a.retain(|t| (0.0..=FRAC_PI_2).contains(t));
    a.sort_by(f64::total_cmp);
    a.dedup();
    a
}

impl Profile {
    fn of_polygon(poly: &ConvexPolygon) -> Profile {
        let vs = &poly.vertices;
        let tagged: Vec<(RatePoint, f64)> = vs
            .iter()
            .map(|&v| (v, if is_origin(v) { f64::NAN } else { v.angle().clamp(0.0, FRAC_PI_2) }))
            .collect();
        let angles = sorted_angles(tagged.iter().filter(|t| !t.1.is_nan()).map(|t| t.1).collect());
        let n = vs.len();
        let edges: Vec<(usize, usize)> = if n >= 2 { (0..n).map(|i| (i, (i + 1) % n)).collect() } else { vec![] };

        // farthest point exactly on each critical ray
        let exact = |theta: f64| -> RatePoint {
            let mut best = RatePoint::origin();
            for &(v, t) in &tagged {
                if t == theta {
                    best = farther(best, v);
                }
            }
            for &(i, j) in &edges {
                let (ti, tj) = (tagged[i].1, tagged[j].1);
                if ti.is_nan() || tj.is_nan() {
                    continue;
                }
                if ti.min(tj) < theta && theta < ti.max(tj) {
                    best = farther(best, ray_hit(vs[i], vs[j], theta));
                }
            }
            best
        };
        // far boundary edge over an open interval, evaluated at its endpoints
        let span = |lo: f64, hi: f64| -> (RatePoint, RatePoint) {
            let mid = 0.5 * (lo + hi);
            let mut best: Option<(f64, usize, usize)> = None;
            for &(i, j) in &edges {
                let (ti, tj) = (tagged[i].1, tagged[j].1);
                if ti.is_nan() || tj.is_nan() {
                    continue;
                }
                if ti.min(tj) <= lo && hi <= ti.max(tj) && ti != tj {
                    let r = ray_hit(vs[i], vs[j], mid).norm();
                    if best.is_none_or(|b| r > b.0) {
                        best = Some((r, i, j));
                    }
                }
            }
            match best {
                None => (RatePoint::origin(), RatePoint::origin()),
                Some((_, i, j)) => {
                    let at = |theta: f64| {
                        if tagged[i].1 == theta {
                            vs[i]
                        } else if tagged[j].1 == theta {
                            vs[j]
                        } else {
                            ray_hit(vs[i], vs[j], theta)
                        }
                    };
                    (at(lo), at(hi))
                }
            }
        };

        let mut groups: Vec<Group> = angles
            .iter()
            .map(|&t| {
                let m = exact(t);
                Group { theta: t, p_in: m, p_max: m, p_out: m }
            })
            .collect();
        for g in 0..groups.len().saturating_sub(1) {
            let (a, b) = span(groups[g].theta, groups[g + 1].theta);
            groups[g].p_out = a;
            groups[g + 1].p_in = b;
        }
        Profile { groups }
    }

    /// Index of the interval `[theta_g, theta_{g+1}]` containing `theta`.
    fn interval(&self, theta: f64) -> usize {
        let k = self.groups.partition_point(|g| g.theta <= theta);
        k.saturating_sub(1).min(self.groups.len().saturating_sub(2))
    }

    fn segment(&self, g: usize) -> (RatePoint, RatePoint) {
        (self.groups[g].p_out, self.groups[g + 1].p_in)
    }

    /// (left limit, exact, right limit) at `theta`.
    fn sample(&self, theta: f64) -> (RatePoint, RatePoint, RatePoint) {
        if let Ok(k) = self.groups.binary_search_by(|g| g.theta.total_cmp(&theta)) {
            let g = self.groups[k];
            return (g.p_in, g.p_max, g.p_out);
        }
        let (p, q) = self.segment(self.interval(theta));
        let h = ray_hit(p, q, theta);
        (h, h, h)
    }

    fn merge(&self, other: &Profile) -> Profile {
        let mut angles: Vec<f64> = self.groups.iter().chain(&other.groups).map(|g| g.theta).collect();
        angles = sorted_angles(angles);
        let mut extra = Vec::new();
        for w in angles.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mid = 0.5 * (lo + hi);
            let (p1, q1) = self.segment(self.interval(mid));
            let (p2, q2) = other.segment(other.interval(mid));
            if let Some(x) = line_intersection(p1, q1, p2, q2) {
                if is_origin(x) {
                    continue;
                }
                let t = x.angle();
                if t > lo + 1e-13 && t < hi - 1e-13 {
                    extra.push(t);
                }
            }
        }
        angles.extend(extra);
        let angles = sorted_angles(angles);
        let groups = angles
            .into_iter()
            .map(|t| {
                let (a_in, a_max, a_out) = self.sample(t);
                let (b_in, b_max, b_out) = other.sample(t);
                Group {
                    theta: t,
                    p_in: farther(a_in, b_in),
                    p_max: farther(a_max, b_max),
                    p_out: farther(a_out, b_out),
                }
            })
            .collect();
        Profile { groups }
    }

    /// Boundary vertex list: origin first, counter-clockwise.
    fn vertices(&self) -> Vec<RatePoint> {
        let mut raw = vec![RatePoint::origin()];
        let last = self.groups.len() - 1;
        for (k, g) in self.groups.iter().enumerate() {
            if k > 0 {
                raw.push(g.p_in);
            }
            raw.push(g.p_max);
            if k < last {
                raw.push(g.p_out);
            }
        }
        simplify_cycle(raw)
    }
}

fn line_intersection(p1: RatePoint, q1: RatePoint, p2: RatePoint, q2: RatePoint) -> Option<RatePoint> {
    let d1 = q1.sub(p1);
    let d2 = q2.sub(p2);
    let den = cross(d1, d2);
    if den.abs() <= 1e-18 || d1.norm() <= EPS || d2.norm() <= EPS {
        return None;
    }
    let t = cross(p2.sub(p1), d2) / den;
    Some(p1.lerp(q1, t))
}

/// Removes repeated and collinear pass-through points from a closed chain
/// whose first point is kept fixed.
fn simplify_cycle(raw: Vec<RatePoint>) -> Vec<RatePoint> {
    let mut pts: Vec<RatePoint> = Vec::with_capacity(raw.len());
    for p in raw {
        if pts.last().is_none_or(|l| l.dist(p) > EPS) {
            pts.push(p);
        }
    }
    while pts.len() > 1 && pts[pts.len() - 1].dist(pts[0]) <= EPS {
        pts.pop();
    }
    let scale = pts.iter().map(|q| q.norm()).fold(1.0, f64::max);
    loop {
        let n = pts.len();
        if n <= 2 {
            break;
        }
        let mut removed = false;
        for i in 1..n {
            let a = pts[i - 1];
            let b = pts[i];
            let c = pts[(i + 1) % n];
            let (u, v) = (b.sub(a), c.sub(b));
            if cross(u, v).abs() <= EPS * scale * scale && dot(u, v) >= 0.0 {
                pts.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            break;
        }
    }
    pts
}

// ---------------------------------------------------------------------------
// regions

#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion2D {
    pieces: Vec<ConvexPolygon>,
    vertices: Vec<RatePoint>,
}

impl RateRegion2D {
    pub fn empty() -> Self {
        RateRegion2D { pieces: vec![], vertices: vec![] }
    }

    /// The single-point region `{(0, 0)}`.
    pub fn origin() -> Self {
        Self::from_polygon(ConvexPolygon::hull_of(&[RatePoint::origin()]))
    }

    /// `hps` intersected with the quadrant; empty intersections give the
    /// empty region.
    pub fn from_halfplanes(hps: &[HalfPlane]) -> Result<Self, RegionError> {
        Ok(match ConvexPolygon::from_halfplanes(hps)? {
            Some(p) => Self::from_polygon(p),
            None => Self::empty(),
        })
    }

    pub fn from_polygon(p: ConvexPolygon) -> Self {
        let vertices = Profile::of_polygon(&p).vertices();
        RateRegion2D { pieces: vec![p], vertices }
    }

    /// Union of regions. Pieces contained in another piece are dropped.
    pub fn union<'a>(regions: impl IntoIterator<Item = &'a RateRegion2D>) -> Self {
        let mut kept: Vec<ConvexPolygon> = Vec::new();
        for r in regions {
            for p in &r.pieces {
                if kept.iter().any(|k| k.contains_polygon(p, EPS)) {
                    continue;
                }
                kept.retain(|k| !p.contains_polygon(k, EPS));
                kept.push(p.clone());
            }
        }
        Self::from_pieces(kept)
    }

    pub fn union_with(&self, other: &RateRegion2D) -> Self {
        Self::union([self, other])
    }

    fn from_pieces(pieces: Vec<ConvexPolygon>) -> Self {
        let vertices = match pieces.split_first() {
            None => vec![],
            Some((first, rest)) => rest
                .iter()
                .fold(Profile::of_polygon(first), |acc, p| acc.merge(&Profile::of_polygon(p)))
                .vertices(),
        };
        RateRegion2D { pieces, vertices }
    }

    /// The convex hull as a single-piece region.
    pub fn convex_hull(&self) -> Self {
        if self.is_empty() {
            return Self::empty();
        }
        let pts: Vec<RatePoint> = self.pieces.iter().flat_map(|p| p.vertices.iter().copied()).collect();
        Self::from_polygon(ConvexPolygon::hull_of(&pts))
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn pieces(&self) -> &[ConvexPolygon] {
        &self.pieces
    }

    /// Boundary vertices, counter-clockwise from the origin.
    pub fn vertices(&self) -> &[RatePoint] {
        &self.vertices
    }

    /// Half-planes of every piece.
    pub fn halfplanes(&self) -> Vec<HalfPlane> {
        self.pieces.iter().flat_map(|p| p.halfplanes.iter().copied()).collect()
    }

    pub fn contains(&self, p: RatePoint, tol: f64) -> bool {
        self.pieces.iter().any(|q| q.contains(p, tol))
    }

    pub fn distance(&self, p: RatePoint) -> f64 {
        self.pieces.iter().map(|q| q.distance(p)).fold(f64::INFINITY, f64::min)
    }

    /// Largest coordinate-wise value of `a*R1 + b*R2` over the region.
    pub fn support(&self, a: f64, b: f64) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| p.vertices.iter())
            .map(|v| a * v.r1 + b * v.r2)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `sup_{x in self} dist(x, other)`, computed to within about 1e-9 as a
    /// guaranteed upper bound.
    pub fn directed_hausdorff(&self, other: &RateRegion2D) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        if other.is_empty() {
            return f64::INFINITY;
        }
        let mut frags: Vec<Vec<RatePoint>> = self.pieces.iter().map(|p| p.vertices.clone()).collect();
        for piece in &other.pieces {
            let bb = piece.bbox();
            let mut next = Vec::with_capacity(frags.len());
            for f in frags {
                if BBox::of(&f).disjoint(&bb, EPS) {
                    next.push(f);
                } else {
                    next.extend(subtract_convex(f, piece));
                }
            }
            frags = next;
            if frags.is_empty() {
                return 0.0;
            }
        }
        branch_and_bound(&frags, &other.pieces)
    }

    pub fn hausdorff(&self, other: &RateRegion2D) -> f64 {
        self.directed_hausdorff(other).max(other.directed_hausdorff(self))
    }

    /// `self ⊆ other` up to Hausdorff slack `tol`.
    pub fn is_subset_of(&self, other: &RateRegion2D, tol: f64) -> bool {
        self.directed_hausdorff(other) <= tol
    }

    /// Vertex CSV with header `R1,R2`, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("R1,R2\n");
        for v in &self.vertices {
            let _ = writeln!(s, "{},{}", fmt_sig12(v.r1), fmt_sig12(v.r2));
        }
        s
    }

    /// Half-plane listing, one piece per block.
    pub fn halfplane_sidecar(&self) -> String {
        let mut s = String::new();
        for (k, p) in self.pieces.iter().enumerate() {
            let _ = writeln!(s, "# piece {k}");
            for h in &p.halfplanes {
                let _ = writeln!(s, "{}*R1 + {}*R2 <= {}", fmt_sig12(h.a), fmt_sig12(h.b), fmt_sig12(h.c));
            }
        }
        s
    }
}

/// Formats with 12 significant digits, shortest form.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { format!("{x}") };
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        "0".into()
    } else {
        format!("{rounded}")
    }
}

/// Parses a vertex CSV written by [`RateRegion2D::to_csv`].
pub fn parse_vertex_csv(text: &str) -> Result<Vec<RatePoint>, RegionError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == "R1,R2" => {}
        Some((i, _)) => return Err(RegionError::Csv { line: i + 1, message: "expected header R1,R2".into() }),
        None => return Err(RegionError::Csv { line: 1, message: "missing header".into() }),
    }
    let mut out = Vec::new();
    for (i, l) in lines {
        let err = |m: &str| RegionError::Csv { line: i + 1, message: m.into() };
        let (a, b) = l.trim().split_once(',').ok_or_else(|| err("expected two fields"))?;
        let r1 = a.trim().parse::<f64>().map_err(|_| err("bad R1 value"))?;
        let r2 = b.trim().parse::<f64>().map_err(|_| err("bad R2 value"))?;
        out.push(RatePoint::new(r1, r2));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Hausdorff machinery

/// Keeps the part of convex `poly` with `a*x + b*y >= c` (if `outside`)
/// or `<= c`.
fn clip(poly: &[RatePoint], h: &HalfPlane, outside: bool) -> Vec<RatePoint> {
    let n = h.norm();
    let shift = if outside { EPS } else { 0.0 };
    let f = |p: RatePoint| {
        let s = (h.c - h.a * p.r1 - h.b * p.r2) / n;
        if outside {
            -s - shift
        } else {
            s
        }
    };
    let mut out = Vec::new();
    let m = poly.len();
    if m == 0 {
        return out;
    }
    if m == 1 {
        if f(poly[0]) >= 0.0 {
            out.push(poly[0]);
        }
        return out;
    }
    let edges = if m == 2 { 1 } else { m };
    for i in 0..edges {
        let p = poly[i];
        let q = poly[(i + 1) % m];
        let (fp, fq) = (f(p), f(q));
        if fp >= 0.0 {
            out.push(p);
        }
        if (fp >= 0.0) != (fq >= 0.0) {
            out.push(p.lerp(q, fp / (fp - fq)));
        }
        if m == 2 && fq >= 0.0 {
            out.push(q);
        }
    }
    let mut d: Vec<RatePoint> = Vec::with_capacity(out.len());
    for p in out {
        if d.last().is_none_or(|l| l.dist(p) > 0.0) {
            d.push(p);
        }
    }
    while d.len() > 1 && d[0].dist(d[d.len() - 1]) == 0.0 {
        d.pop();
    }
    d
}

/// Convex decomposition of `poly` minus `piece`.
fn subtract_convex(poly: Vec<RatePoint>, piece: &ConvexPolygon) -> Vec<Vec<RatePoint>> {
    if poly.iter().all(|&v| piece.contains(v, EPS)) {
        return vec![];
    }
    let mut out = Vec::new();
    let mut rest = poly;
    for h in &piece.halfplanes {
        if h.norm() == 0.0 {
            continue;
        }
        let o = clip(&rest, h, true);
        if !o.is_empty() {
            out.push(o);
        }
        rest = clip(&rest, h, false);
        if rest.is_empty() {
            break;
        }
    }
    out
}

#[derive(Debug)]
struct Tri {
    ub: f64,
    v: [RatePoint; 3],
}

impl PartialEq for Tri {
    fn eq(&self, o: &Self) -> bool {
        self.ub == o.ub
    }
}
impl Eq for Tri {}
impl PartialOrd for Tri {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Tri {
    fn cmp(&self, o: &Self) -> Ordering {
        self.ub.total_cmp(&o.ub)
    }
}

/// Maximizes `min_i dist(x, pieces_i)` over the fragments. Distance to a
/// convex piece is convex, so its maximum over a triangle sits at a vertex;
/// that yields the upper bound `min_i max_v` and lower bound `max_v min_i`.
fn branch_and_bound(frags: &[Vec<RatePoint>], pieces: &[ConvexPolygon]) -> f64 {
    let bounds = |v: &[RatePoint; 3]| -> (f64, f64) {
        let mut ub = f64::INFINITY;
        let mut per_vertex = [f64::INFINITY; 3];
        for p in pieces {
            let d = [p.distance(v[0]), p.distance(v[1]), p.distance(v[2])];
            ub = ub.min(d[0].max(d[1]).max(d[2]));
            for k in 0..3 {
                per_vertex[k] = per_vertex[k].min(d[k]);
            }
        }
        (ub, per_vertex[0].max(per_vertex[1]).max(per_vertex[2]))
    };
    let mut heap = BinaryHeap::new();
    let mut lb = 0.0f64;
    for f in frags {
        let tris: Vec<[RatePoint; 3]> = match f.len() {
            0 => vec![],
            1 => vec![[f[0], f[0], f[0]]],
            2 => vec![[f[0], f[1], f[1]]],
            n => (1..n - 1).map(|i| [f[0], f[i], f[i + 1]]).collect(),
        };
        for v in tris {
            let (ub, l) = bounds(&v);
            lb = lb.max(l);
            heap.push(Tri { ub, v });
        }
    }
    let mut splits = 0;
    while let Some(t) = heap.pop() {
        if t.ub - lb <= HAUSDORFF_EPS || splits >= HAUSDORFF_MAX_SPLITS {
            return t.ub;
        }
        splits += 1;
        let v = t.v;
        let e = [v[0].dist(v[1]), v[1].dist(v[2]), v[2].dist(v[0])];
        let k = (0..3).max_by(|&a, &b| e[a].total_cmp(&e[b])).unwrap_or(0);
        let (a, b, c) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
        let m = a.lerp(b, 0.5);
        for child in [[a, m, c], [m, b, c]] {
            let (ub, l) = bounds(&child);
            lb = lb.max(l);
            heap.push(Tri { ub, v: child });
        }
    }
    lb
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<RatePoint> {
        v.iter().map(|&(a, b)| RatePoint::new(a, b)).collect()
    }

    fn assert_vertices(r: &RateRegion2D, want: &[(f64, f64)]) {
        let got = r.vertices();
        assert_eq!(got.len(), want.len(), "got {got:?}");
        for (g, w) in got.iter().zip(pts(want)) {
            assert!(g.dist(w) <= 1e-9, "got {got:?}, want {want:?}");
        }
    }

    fn hp(a: f64, b: f64, c: f64) -> HalfPlane {
        HalfPlane::new(a, b, c)
    }

    #[test]
    fn unit_square_and_origin() {
        let sq = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 1.0), hp(0.0, 1.0, 1.0)]).unwrap();
        assert_vertices(&sq, &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let o = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 0.0), hp(0.0, 1.0, 0.0)]).unwrap();
        assert_vertices(&o, &[(0.0, 0.0)]);
        assert_eq!(RateRegion2D::origin().vertices(), o.vertices());
    }

    #[test]
    fn pentagon_shape() {
        let r = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 1.0), hp(0.0, 1.0, 2.0), hp(1.0, 1.0, 2.0)]).unwrap();
        assert_vertices(&r, &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 2.0)]);
        for v in r.vertices() {
            for h in r.halfplanes() {
                assert!(h.contains(*v, VERTEX_TOLERANCE));
            }
        }
    }

    #[test]
    fn unbounded_and_empty() {
        assert_eq!(RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 1.0)]), Err(RegionError::Unbounded));
        assert_eq!(RateRegion2D::from_halfplanes(&[hp(1.0, -1.0, 1.0), hp(-1.0, 1.0, 1.0)]), Err(RegionError::Unbounded));
        let e = RateRegion2D::from_halfplanes(&[hp(1.0, 1.0, -1.0)]).unwrap();
        assert!(e.is_empty());
        assert!(e.vertices().is_empty());
    }

    #[test]
    fn segment_regions() {
        // R2 = 0, R1 <= 2
        let s = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 2.0), hp(0.0, 1.0, 0.0)]).unwrap();
        assert_vertices(&s, &[(0.0, 0.0), (2.0, 0.0)]);
        // R1 <= min(1, R2), R2 <= 1
        let c = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 1.0), hp(1.0, -1.0, 0.0), hp(0.0, 1.0, 1.0)]).unwrap();
        assert_vertices(&c, &[(0.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
    }

    #[test]
    fn nonconvex_union_boundary() {
        let a = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 2.0), hp(0.0, 1.0, 1.0)]).unwrap();
        let b = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 1.0), hp(0.0, 1.0, 2.0)]).unwrap();
        let u = a.union_with(&b);
        assert_eq!(u.pieces().len(), 2);
        assert_vertices(&u, &[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)]);
        let hull = u.convex_hull();
        assert_vertices(&hull, &[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 2.0), (0.0, 2.0)]);
        assert!(u.is_subset_of(&hull, 1e-12));
        let d = hull.directed_hausdorff(&u);
        // farthest hull point from the L-shape is (1.5, 1.5)
        assert!((d - 0.5).abs() < 1e-9, "{d}");
    }

    #[test]
    fn union_with_segment_spike() {
        let sq = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 1.0), hp(0.0, 1.0, 1.0)]).unwrap();
        let seg = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 3.0), hp(0.0, 1.0, 0.0)]).unwrap();
        let u = sq.union_with(&seg);
        assert_vertices(&u, &[(0.0, 0.0), (3.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert!(seg.is_subset_of(&u, 0.0));
        assert!((u.directed_hausdorff(&sq) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn contained_pieces_are_pruned() {
        let big = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 2.0), hp(0.0, 1.0, 2.0)]).unwrap();
        let small = RateRegion2D::from_halfplanes(&[hp(1.0, 1.0, 1.0)]).unwrap();
        let u = RateRegion2D::union([&small, &big, &small]);
        assert_eq!(u.pieces().len(), 1);
        assert_eq!(u.vertices(), big.vertices());
    }

    #[test]
    fn hausdorff_between_squares() {
        let a = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 1.0), hp(0.0, 1.0, 1.0)]).unwrap();
        let b = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 1.5), hp(0.0, 1.0, 1.0)]).unwrap();
        assert!(a.directed_hausdorff(&b) <= 1e-12);
        assert!((b.directed_hausdorff(&a) - 0.5).abs() <= 1e-9);
        assert!((a.hausdorff(&b) - 0.5).abs() <= 1e-9);
        assert!(a.is_subset_of(&b, 0.0));
        assert!(!b.is_subset_of(&a, 0.4));
    }

    #[test]
    fn hausdorff_across_piece_seam() {
        // square covered exactly by two rectangles: distance must be ~0
        let sq = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 2.0), hp(0.0, 1.0, 2.0)]).unwrap();
        let l = RateRegion2D::from_halfplanes(&[hp(1.0, 0.0, 1.0), hp(0.0, 1.0, 2.0)]).unwrap();
        let r = RateRegion2D::from_polygon(ConvexPolygon::hull_of(&pts(&[(1.0, 0.0), (2.0, 0.0), (2.0, 2.0), (1.0, 2.0)])));
        let u = RateRegion2D::union([&l, &r]);
        assert!(sq.directed_hausdorff(&u) <= 1e-9);
    }

    #[test]
    fn csv_round_trip() {
        let r = RateRegion2D::from_halfplanes(&[hp(3.0, 0.0, 1.0), hp(0.0, 7.0, 2.0)]).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("R1,R2\n0,0\n0.333333333333,0\n"));
        let back = parse_vertex_csv(&csv).unwrap();
        let mut again = String::from("R1,R2\n");
        for p in &back {
            again.push_str(&format!("{},{}\n", fmt_sig12(p.r1), fmt_sig12(p.r2)));
        }
        assert_eq!(csv, again);
        assert!(parse_vertex_csv("x,y\n").is_err());
        assert!(matches!(parse_vertex_csv("R1,R2\n1;2\n"), Err(RegionError::Csv { line: 2, .. })));
        assert!(r.halfplane_sidecar().contains("<="));
    }

    #[test]
    fn fmt_sig12_cases() {
        assert_eq!(fmt_sig12(1.0), "1");
        assert_eq!(fmt_sig12(-0.0), "0");
        assert_eq!(fmt_sig12(1.999_999_999_999_9), "2");
        assert_eq!(fmt_sig12(0.125), "0.125");
        assert_eq!(fmt_sig12(1e-20), "0.00000000000000000001");
    }
}

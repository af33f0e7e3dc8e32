//! Polygonal curves in 3-space: validation, distances, opening and sampling.
//!
//! A `PolyCurve` is an ordered vertex list, closed or open, that passes the
//! embedding checks: consecutive vertices distinct, no backtracking corner,
//! and no two non-adjacent edges closer than the degeneracy tolerance. All
//! geometric predicates are scaled by the curve diameter.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::geom::{point_seg, seg_seg, v3, Vec3};
use crate::rng;
use crate::{Error, Result};

/// Relative tolerance: features below this fraction of the diameter are
/// treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Jitter attempts before `sample_neighborhood` gives up.
const SAMPLE_RETRY_BUDGET: u32 = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct PolyCurve {
    vertices: Vec<Vec3>,
    closed: bool,
    label: String,
    diameter: f64,
    min_edge: f64,
}

impl PolyCurve {
    /// Validating constructor; the only public way to build a curve.
    pub fn new(vertices: Vec<Vec3>, closed: bool, label: &str) -> Result<PolyCurve> {
        let need = if closed { 3 } else { 2 };
        if vertices.len() < need {
            return Err(Error::InvalidCurve(format!(
                "{label}: needs at least {need} vertices, got {}",
                vertices.len()
            )));
        }
        for v in &vertices {
            for c in [v.x, v.y, v.z] {
                if !c.is_finite() {
                    return Err(Error::InvalidCurve(format!("{label}: non-finite coordinate")));
                }
            }
        }
        let mut c = PolyCurve {
            vertices,
            closed,
            label: String::from(label),
            diameter: 0.0,
            min_edge: 0.0,
        };
        c.refresh_metrics();
        c.check_embedding()?;
        Ok(c)
    }

    fn refresh_metrics(&mut self) {
        let vs = &self.vertices;
        let mut diam = 0.0f64;
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                diam = diam.max(vs[i].dist(vs[j]));
            }
        }
        self.diameter = diam;
        let mut me = f64::INFINITY;
        for i in 0..self.edge_count() {
            let (a, b) = self.edge(i);
            me = me.min(a.dist(b));
        }
        self.min_edge = me;
    }

    fn check_embedding(&self) -> Result<()> {
        let tol = DEGENERACY_TOL * self.diameter;
        let label = &self.label;
        if !(self.diameter > 0.0) {
            return Err(Error::InvalidCurve(format!("{label}: all vertices coincide")));
        }
        if self.min_edge <= tol {
            return Err(Error::InvalidCurve(format!(
                "{label}: edge shorter than degeneracy tolerance"
            )));
        }
        // Backtracking corner: consecutive edges folding onto each other.
        let ne = self.edge_count();
        let corners = if self.closed { ne } else { ne - 1 };
        for i in 0..corners {
            let (a, b) = self.edge(i);
            let (_, c) = self.edge((i + 1) % ne);
            let d1 = b - a;
            let d2 = c - b;
            let sin_area = d1.cross(d2).norm();
            if d1.dot(d2) < 0.0 && sin_area <= tol * d1.norm().max(d2.norm()) {
                return Err(Error::InvalidCurve(format!(
                    "{label}: backtracking corner at vertex {}",
                    (i + 1) % self.vertices.len()
                )));
            }
        }
        // Simplicity: every non-adjacent edge pair keeps clear distance.
        for i in 0..ne {
            for j in i + 1..ne {
                if self.edges_adjacent(i, j) {
                    continue;
                }
                let (a, b) = self.edge(i);
                let (c, d) = self.edge(j);
                let (_, _, dist) = seg_seg(a, b, c, d);
                if dist <= tol {
                    return Err(Error::InvalidCurve(format!(
                        "{label}: edges {i} and {j} nearly intersect (distance {dist:.3e})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: &str) {
        self.label = String::from(label);
    }

    /// Max pairwise vertex distance; the scale for all tolerances.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn min_edge_len(&self) -> f64 {
        self.min_edge
    }

    pub fn edge_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    /// Edge i runs from vertex i to vertex i+1 (wrapping when closed).
    pub fn edge(&self, i: usize) -> (Vec3, Vec3) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    /// True when edges share a vertex (cyclically for closed curves).
    pub fn edges_adjacent(&self, i: usize, j: usize) -> bool {
        if i == j {
            return true;
        }
        let ne = self.edge_count();
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        hi - lo == 1 || (self.closed && lo == 0 && hi == ne - 1)
    }

    /// Half the smallest distance between non-adjacent edges; infinite when no
    /// such pair exists. Radius of an embedded tube around the curve.
    pub fn tube_radius(&self) -> f64 {
        let ne = self.edge_count();
        let mut min_d = f64::INFINITY;
        for i in 0..ne {
            for j in i + 1..ne {
                if self.edges_adjacent(i, j) {
                    continue;
                }
                let (a, b) = self.edge(i);
                let (c, d) = self.edge(j);
                min_d = min_d.min(seg_seg(a, b, c, d).2);
            }
        }
        min_d / 2.0
    }

    /// Distance from a point to the curve.
    pub fn dist_to_point(&self, p: Vec3) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.edge_count() {
            let (a, b) = self.edge(i);
            best = best.min(point_seg(p, a, b).0);
        }
        best
    }
}

/// Record of how an open curve arose from a closed one.
#[derive(Debug, Clone, PartialEq)]
pub struct Opening {
    pub source_label: String,
    /// Vertex of the source curve whose incoming edge was deleted.
    pub base: usize,
    /// Deleted edge, oriented tail -> head = terminal -> leg of the open curve.
    pub arc_tail: Vec3,
    pub arc_head: Vec3,
}

/// Open polygonal curve, possibly tagged with its opening provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenCurve {
    pub curve: PolyCurve,
    pub opening: Option<Opening>,
}

impl OpenCurve {
    pub fn new(curve: PolyCurve) -> Result<OpenCurve> {
        if curve.is_closed() {
            return Err(Error::InvalidParameter(format!(
                "{}: expected an open curve",
                curve.label()
            )));
        }
        Ok(OpenCurve { curve, opening: None })
    }
}

/// Delete the edge coming into vertex `base` of a closed curve.
///
/// The result starts at `base` (the leg end) and terminates at the previous
/// vertex; the deleted edge is recorded as the preferred closure arc.
pub fn open_at(curve: &PolyCurve, base: usize) -> Result<OpenCurve> {
    if !curve.is_closed() {
        return Err(Error::InvalidParameter(format!(
            "{}: open_at needs a closed curve",
            curve.label()
        )));
    }
    let n = curve.vertices().len();
    if base >= n {
        return Err(Error::InvalidParameter(format!(
            "vertex {base} out of range for {n}-gon"
        )));
    }
    let mut vs = Vec::with_capacity(n);
    for k in 0..n {
        vs.push(curve.vertices()[(base + k) % n]);
    }
    let label = format!("{}@{}", curve.label(), base);
    let open = PolyCurve::new(vs, false, &label)?;
    let prev = (base + n - 1) % n;
    Ok(OpenCurve {
        curve: open,
        opening: Some(Opening {
            source_label: String::from(curve.label()),
            base,
            arc_tail: curve.vertices()[prev],
            arc_head: curve.vertices()[base],
        }),
    })
}

// ---- Hausdorff distance ----

/// Hausdorff distance between the point sets of two polygonal curves.
///
/// One-sided distances are maximized by adaptive bisection of each edge.
/// Two upper bounds prune the recursion: the Lipschitz bound
/// (d(p) + d(q) + |pq|)/2 and, since distance to a single segment is convex,
/// min over target segments of max(d(p, s), d(q, s)).
pub fn hausdorff(a: &PolyCurve, b: &PolyCurve) -> f64 {
    let scale = a.diameter().max(b.diameter());
    let tol = 1e-10 * scale;
    one_sided(a, b, tol).max(one_sided(b, a, tol))
}

fn one_sided(a: &PolyCurve, b: &PolyCurve, tol: f64) -> f64 {
    let mut best = 0.0f64;
    for v in a.vertices() {
        best = best.max(b.dist_to_point(*v));
    }
    for i in 0..a.edge_count() {
        let (p, q) = a.edge(i);
        let dp = b.dist_to_point(p);
        let dq = b.dist_to_point(q);
        refine(p, q, dp, dq, b, tol, &mut best);
    }
    best
}

fn refine(p: Vec3, q: Vec3, dp: f64, dq: f64, b: &PolyCurve, tol: f64, best: &mut f64) {
    let len = p.dist(q);
    let lipschitz = (dp + dq + len) / 2.0;
    if lipschitz <= *best + tol {
        return;
    }
    let mut minmax = f64::INFINITY;
    for i in 0..b.edge_count() {
        let (sa, sb) = b.edge(i);
        let bound = point_seg(p, sa, sb).0.max(point_seg(q, sa, sb).0);
        minmax = minmax.min(bound);
    }
    if minmax.min(lipschitz) <= *best + tol {
        return;
    }
    let m = (p + q) * 0.5;
    let dm = b.dist_to_point(m);
    *best = best.max(dm);
    refine(p, m, dp, dm, b, tol, best);
    refine(m, q, dm, dq, b, tol, best);
}

// ---- Neighborhood sampling ----

/// Random curve in the radius-h neighborhood of an open curve.
///
/// Each vertex is displaced by a uniform draw from the cube
/// [-h/sqrt(3), h/sqrt(3)]^3, so every displacement stays below h and the
/// Hausdorff distance to the original is below h by construction. Together
/// with h below the tube radius this keeps the sample isotopic to the
/// original away from the closure arc. Samples failing the embedding checks
/// are rejected and redrawn with a derived retry seed.
pub fn sample_neighborhood(open: &OpenCurve, h: f64, seed: u64) -> Result<OpenCurve> {
    let base = &open.curve;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("h = {h} must be positive")));
    }
    let tr = base.tube_radius();
    if h >= tr {
        return Err(Error::InvalidParameter(format!(
            "h = {h} not below tube radius {tr}"
        )));
    }
    let half = h / libm::sqrt(3.0);
    for attempt in 0..SAMPLE_RETRY_BUDGET {
        let mut rng = rng::stream(rng::derive(seed, "jitter-attempt", attempt as u64));
        let mut vs = Vec::with_capacity(base.vertices().len());
        for v in base.vertices() {
            vs.push(v3(
                v.x + rng::range_f64(&mut rng, -half, half),
                v.y + rng::range_f64(&mut rng, -half, half),
                v.z + rng::range_f64(&mut rng, -half, half),
            ));
        }
        if let Ok(curve) = PolyCurve::new(vs, false, base.label()) {
            if hausdorff(&curve, base) < h {
                return Ok(OpenCurve {
                    curve,
                    opening: open.opening.clone(),
                });
            }
        }
    }
    Err(Error::Internal(format!(
        "neighborhood sampling failed {SAMPLE_RETRY_BUDGET} times for {} at h = {h}",
        base.label()
    )))
}

// ---- Generators ----

/// Regular n-gon of circumradius 1 in the z = 0 plane.
pub fn planar_ngon(n: usize) -> Result<PolyCurve> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("ngon needs n >= 3, got {n}")));
    }
    let mut vs = Vec::with_capacity(n);
    for k in 0..n {
        let t = 2.0 * core::f64::consts::PI * k as f64 / n as f64;
        vs.push(v3(libm::cos(t), libm::sin(t), 0.0));
    }
    PolyCurve::new(vs, true, &format!("ngon-{n}"))
}

/// (p, q) torus knot sampled at n vertices on the torus with radii (2, 1).
pub fn torus_knot(p: u32, q: u32, n: usize) -> Result<PolyCurve> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidParameter(String::from("torus knot needs p, q >= 1")));
    }
    if gcd(p, q) != 1 {
        return Err(Error::InvalidParameter(format!(
            "torus parameters ({p}, {q}) share a factor; that traces a link"
        )));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need n >= 3 vertices, got {n}")));
    }
    let mut vs = Vec::with_capacity(n);
    for k in 0..n {
        let t = 2.0 * core::f64::consts::PI * k as f64 / n as f64;
        let (pt, qt) = (p as f64 * t, q as f64 * t);
        let rad = 2.0 + libm::cos(qt);
        vs.push(v3(rad * libm::cos(pt), rad * libm::sin(pt), libm::sin(qt)));
    }
    PolyCurve::new(vs, true, &format!("torus-{p}-{q}-{n}"))
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PolyCurve {
        PolyCurve::new(
            alloc::vec![
                v3(0.0, 0.0, 0.0),
                v3(1.0, 0.0, 0.0),
                v3(1.0, 1.0, 0.0),
                v3(0.0, 1.0, 0.0),
            ],
            true,
            "square",
        )
        .unwrap()
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(PolyCurve::new(alloc::vec![v3(0.0, 0.0, 0.0)], false, "pt").is_err());
        // Repeated vertex.
        assert!(PolyCurve::new(
            alloc::vec![v3(0.0, 0.0, 0.0), v3(0.0, 0.0, 0.0), v3(1.0, 0.0, 0.0)],
            false,
            "rep"
        )
        .is_err());
        // Backtracking corner.
        assert!(PolyCurve::new(
            alloc::vec![v3(0.0, 0.0, 0.0), v3(2.0, 0.0, 0.0), v3(1.0, 0.0, 0.0)],
            false,
            "back"
        )
        .is_err());
        // Self-crossing closed quadrilateral (bowtie).
        assert!(PolyCurve::new(
            alloc::vec![
                v3(0.0, 0.0, 0.0),
                v3(1.0, 1.0, 0.0),
                v3(1.0, 0.0, 0.0),
                v3(0.0, 1.0, 0.0)
            ],
            true,
            "bowtie"
        )
        .is_err());
    }

    #[test]
    fn square_metrics() {
        let s = square();
        assert_eq!(s.edge_count(), 4);
        assert!((s.diameter() - libm::sqrt(2.0)).abs() < 1e-12);
        assert!((s.min_edge_len() - 1.0).abs() < 1e-12);
        // Opposite edges at distance 1, so the tube radius is 1/2.
        assert!((s.tube_radius() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ngon_and_torus_generators() {
        let g = planar_ngon(16).unwrap();
        assert_eq!(g.vertices().len(), 16);
        assert!(g.is_closed());
        let t = torus_knot(2, 3, 32).unwrap();
        assert_eq!(t.vertices().len(), 32);
        assert!(torus_knot(2, 4, 32).is_err());
        assert!(planar_ngon(2).is_err());
    }

    #[test]
    fn open_at_rotates_and_records_arc() {
        let s = square();
        let o = open_at(&s, 2).unwrap();
        assert!(!o.curve.is_closed());
        assert_eq!(o.curve.vertices().len(), 4);
        assert_eq!(o.curve.vertices()[0], v3(1.0, 1.0, 0.0));
        assert_eq!(o.curve.vertices()[3], v3(1.0, 0.0, 0.0));
        let op = o.opening.unwrap();
        assert_eq!(op.base, 2);
        // Deleted edge runs from vertex 1 to vertex 2 of the source.
        assert_eq!(op.arc_tail, v3(1.0, 0.0, 0.0));
        assert_eq!(op.arc_head, v3(1.0, 1.0, 0.0));
        assert!(open_at(&s, 4).is_err());
    }

    #[test]
    fn hausdorff_basics() {
        let s = square();
        assert_eq!(hausdorff(&s, &s), 0.0);
        // Translate by (0, 0, d): distance d.
        let mut vs = s.vertices().to_vec();
        for v in &mut vs {
            v.z += 0.25;
        }
        let t = PolyCurve::new(vs, true, "shifted").unwrap();
        assert!((hausdorff(&s, &t) - 0.25).abs() < 1e-9);
        // Segment against a detour spike: max attained mid-edge.
        let base = PolyCurve::new(
            alloc::vec![v3(0.0, 0.0, 0.0), v3(2.0, 0.0, 0.0)],
            false,
            "seg",
        )
        .unwrap();
        let spike = PolyCurve::new(
            alloc::vec![v3(0.0, 0.0, 0.0), v3(1.0, 0.7, 0.0), v3(2.0, 0.0, 0.0)],
            false,
            "spike",
        )
        .unwrap();
        assert!((hausdorff(&base, &spike) - 0.7).abs() < 1e-9);
    }

    #[test]
    fn neighborhood_samples_stay_close() {
        let t = torus_knot(2, 3, 32).unwrap();
        let o = open_at(&t, 0).unwrap();
        let tr = o.curve.tube_radius();
        let h = 0.1 * tr;
        let s1 = sample_neighborhood(&o, h, 7).unwrap();
        let s2 = sample_neighborhood(&o, h, 7).unwrap();
        let s3 = sample_neighborhood(&o, h, 8).unwrap();
        assert_eq!(s1.curve.vertices(), s2.curve.vertices());
        assert_ne!(s1.curve.vertices(), s3.curve.vertices());
        assert!(hausdorff(&s1.curve, &o.curve) < h);
        assert!(sample_neighborhood(&o, tr * 2.0, 7).is_err());
    }
}

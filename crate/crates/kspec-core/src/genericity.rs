//! General-position checks for polygonal curves.
//!
//! Secant enumeration and projection statistics assume the curve sits in
//! general position. Three conditions capture that, each scored by the
//! smallest margin found so a pass carries quantitative weight:
//!
//! - no vertex lies on the doubly ruled surface spanned by three pairwise
//!   skew edges (other than the endpoints of those edges);
//! - no line meets the curve in five or more points;
//! - no line through a vertex lies in the plane of its two edges while
//!   meeting the curve in two further points.
//!
//! Margins are distances divided by the curve diameter, so they compare
//! directly against the relative tolerance: a condition passes exactly when
//! its margin exceeds the tolerance. Outright violations score zero; a
//! condition with no applicable configuration scores infinity.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::curve::PolyCurve;
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::secants::{line_hits_segment, solve_quadrisecants, VERTEX_MARGIN};

/// Outcome of one condition. `pass` holds exactly when `residual` exceeds
/// the tolerance the report was built with.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub pass: bool,
    /// Smallest margin observed, as a fraction of the curve diameter.
    /// Zero on an outright violation, infinite when nothing applied.
    pub residual: f64,
    /// Indices of the tightest configuration; the layout per condition is
    /// documented on the report fields.
    pub offenders: Vec<usize>,
    /// Account of the tightest configuration.
    pub detail: String,
}

/// General-position report for a curve at a relative tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    pub tol: f64,
    /// No vertex on the ruled surface of three pairwise skew edges.
    /// Offenders: the three edges, then the vertex.
    pub ruled_surface: ConditionReport,
    /// No line meeting the curve in five or more points. Offenders: the
    /// edges met by the worst line.
    pub secant_order: ConditionReport,
    /// No trisecant through a vertex inside the plane of its two edges.
    /// Offenders: the vertex, then the two edges met.
    pub corner_plane: ConditionReport,
    /// Diagnostics that do not decide a condition: near-vertex secant
    /// candidates, straight corners, edges contained in corner planes.
    pub notes: Vec<String>,
}

impl GenericityReport {
    /// True when all three conditions pass.
    pub fn pass(&self) -> bool {
        self.ruled_surface.pass && self.secant_order.pass && self.corner_plane.pass
    }
}

// ---- Margin bookkeeping ----

struct Worst {
    residual: f64,
    offenders: Vec<usize>,
    detail: String,
}

impl Worst {
    fn new() -> Worst {
        Worst { residual: f64::INFINITY, offenders: Vec::new(), detail: String::new() }
    }

    fn observe(&mut self, residual: f64, offenders: &[usize], detail: impl FnOnce() -> String) {
        if residual < self.residual {
            self.residual = residual;
            self.offenders = offenders.to_vec();
            self.detail = detail();
        }
    }

    fn report(mut self, tol: f64) -> ConditionReport {
        if self.residual.is_infinite() && self.detail.is_empty() {
            self.detail = String::from("no applicable configurations");
        }
        ConditionReport {
            pass: self.residual > tol,
            residual: self.residual,
            offenders: self.offenders,
            detail: self.detail,
        }
    }
}

// ---- Small geometry helpers ----

/// Distance from point `q` to the line `(p, dir)`; `dir` must be unit.
fn point_line_gap(p: Vec3, dir: Vec3, q: Vec3) -> f64 {
    let w = q - p;
    (w - dir * w.dot(dir)).norm()
}

/// Distance between the lines `(p, dp)` and `(q, dq)`; directions unit.
fn line_line_gap(p: Vec3, dp: Vec3, q: Vec3, dq: Vec3) -> f64 {
    let cr = dp.cross(dq);
    let n = cr.norm();
    if n <= 1e-12 {
        return point_line_gap(p, dp, q);
    }
    ((q - p).dot(cr) / n).abs()
}

/// Distance from the line `(p, dir)` to the segment `(c, d)`, clamping the
/// closest approach to the segment.
fn line_segment_gap(p: Vec3, dir: Vec3, c: Vec3, d: Vec3) -> f64 {
    match line_hits_segment(p, dir, c, d) {
        Some((u, _, gap)) if (0.0..=1.0).contains(&u) => gap,
        Some((u, _, _)) => point_line_gap(p, dir, if u < 0.0 { c } else { d }),
        None => point_line_gap(p, dir, c),
    }
}

fn vertex_on_edge(k: &PolyCurve, v: usize, e: usize) -> bool {
    if k.is_closed() {
        v == e || v == (e + 1) % k.vertices().len()
    } else {
        v == e || v == e + 1
    }
}

fn vertices_adjacent(k: &PolyCurve, i: usize, j: usize) -> bool {
    let d = if i > j { i - j } else { j - i };
    d == 1 || (k.is_closed() && d == k.vertices().len() - 1)
}

// ---- Condition: ruled surface through three skew edges ----

/// A point lies on the doubly ruled surface of three pairwise skew lines
/// exactly when the transversal through it meeting the first two lines
/// also meets the third, so the margin is that transversal's distance to
/// the third line.
fn ruled_surface_margin(k: &PolyCurve, worst: &mut Worst) {
    let ne = k.edge_count();
    let nv = k.vertices().len();
    let diam = k.diameter();
    let mut lines: Vec<(Vec3, Vec3)> = Vec::with_capacity(ne);
    for e in 0..ne {
        let (a, b) = k.edge(e);
        lines.push((a, (b - a).normalized()));
    }
    let mut skew = alloc::vec![false; ne * ne];
    for a in 0..ne {
        for b in a + 1..ne {
            let (pa, da) = lines[a];
            let (pb, db) = lines[b];
            let cr = da.cross(db);
            let n = cr.norm();
            let s = n > 1e-9 && ((pb - pa).dot(cr) / n).abs() > 1e-12 * diam;
            skew[a * ne + b] = s;
            skew[b * ne + a] = s;
        }
    }
    for e1 in 0..ne {
        for e2 in e1 + 1..ne {
            if !skew[e1 * ne + e2] {
                continue;
            }
            for e3 in e2 + 1..ne {
                if !skew[e1 * ne + e3] || !skew[e2 * ne + e3] {
                    continue;
                }
                for v in 0..nv {
                    if vertex_on_edge(k, v, e1)
                        || vertex_on_edge(k, v, e2)
                        || vertex_on_edge(k, v, e3)
                    {
                        continue;
                    }
                    let p = k.vertices()[v];
                    let n1 = (lines[e1].0 - p).cross(lines[e1].1);
                    let n2 = (lines[e2].0 - p).cross(lines[e2].1);
                    let w = n1.cross(n2);
                    let wn = w.norm();
                    if wn <= 1e-12 * n1.norm() * n2.norm() {
                        continue;
                    }
                    let gap = line_line_gap(p, w * (1.0 / wn), lines[e3].0, lines[e3].1);
                    worst.observe(gap / diam, &[e1, e2, e3, v], || {
                        format!(
                            "vertex {v} sits within {gap:.3e} of the ruled surface \
                             of edges {e1}, {e2}, {e3}"
                        )
                    });
                }
            }
        }
    }
}

// ---- Condition: no five point lines ----

/// Hits of a line on the curve: distinct contact points (edge hits merged
/// within `cluster` along the line), the edges involved, and the clamped
/// distance to the nearest edge not hit.
fn scan_line(
    k: &PolyCurve,
    p: Vec3,
    dir: Vec3,
    world: f64,
    cluster: f64,
) -> (usize, Vec<usize>, f64) {
    let ne = k.edge_count();
    let mut hits: Vec<(f64, usize)> = Vec::new();
    let mut margin = f64::INFINITY;
    for e in 0..ne {
        let (c, d) = k.edge(e);
        let hit = match line_hits_segment(p, dir, c, d) {
            Some((u, x, gap))
                if gap <= world && (-VERTEX_MARGIN..=1.0 + VERTEX_MARGIN).contains(&u) =>
            {
                Some(x)
            }
            _ => None,
        };
        match hit {
            Some(x) => hits.push((x, e)),
            None => margin = margin.min(line_segment_gap(p, dir, c, d)),
        }
    }
    hits.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut points = 0usize;
    let mut last = f64::NEG_INFINITY;
    let mut edges: Vec<usize> = Vec::new();
    for (x, e) in hits {
        if x - last > cluster {
            points += 1;
        }
        last = x;
        edges.push(e);
    }
    edges.sort_unstable();
    edges.dedup();
    (points, edges, margin)
}

// ---- Condition: trisecants in a corner plane ----

fn corner_plane_margin(k: &PolyCurve, worst: &mut Worst, notes: &mut Vec<String>) {
    let ne = k.edge_count();
    let nv = k.vertices().len();
    let diam = k.diameter();
    let verts = k.vertices();
    let eps = 1e-12 * diam;
    let near = 1e-9 * diam;
    let mut straight = 0usize;
    let mut contained = 0usize;
    let range = if k.is_closed() { 0..nv } else { 1..nv - 1 };
    for v in range {
        let p = verts[v];
        let eprev = if k.is_closed() { (v + ne - 1) % ne } else { v - 1 };
        let enext = if k.is_closed() { v % ne } else { v };
        let (a0, a1) = k.edge(eprev);
        let (b0, b1) = k.edge(enext);
        let nrm = (a1 - a0).cross(b1 - b0);
        if nrm.norm() <= 1e-12 {
            straight += 1;
            continue;
        }
        let nh = nrm.normalized();
        // Where the rest of the curve pierces the corner plane. Each
        // vertex belongs to exactly one edge as its start, so touches are
        // counted once; edges inside the plane have no isolated pierce
        // point and are skipped.
        let mut pts: Vec<(Vec3, usize)> = Vec::new();
        for e in 0..ne {
            if e == eprev || e == enext {
                continue;
            }
            let (c, d) = k.edge(e);
            let hc = (c - p).dot(nh);
            let hd = (d - p).dot(nh);
            if hc.abs() <= eps && hd.abs() <= eps {
                contained += 1;
                continue;
            }
            if hc.abs() <= eps {
                pts.push((c, e));
            } else if (hc > eps && hd < -eps) || (hc < -eps && hd > eps) {
                let t = hc / (hc - hd);
                pts.push((c + (d - c) * t, e));
            }
        }
        if !k.is_closed() {
            let (c, d) = k.edge(ne - 1);
            if ne - 1 != eprev && ne - 1 != enext {
                let hc = (c - p).dot(nh);
                let hd = (d - p).dot(nh);
                if hd.abs() <= eps && hc.abs() > eps {
                    pts.push((d, ne - 1));
                }
            }
        }
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let (q, eq) = pts[i];
                let (r, er) = pts[j];
                let uq = q - p;
                let ur = r - p;
                if uq.norm() <= near || ur.norm() <= near || (q - r).norm() <= near {
                    continue;
                }
                let d1 = point_line_gap(p, uq.normalized(), r);
                let d2 = point_line_gap(p, ur.normalized(), q);
                let gap = d1.min(d2);
                worst.observe(gap / diam, &[v, eq, er], || {
                    format!(
                        "pierce points of edges {eq} and {er} through the corner \
                         plane of vertex {v} are within {gap:.3e} of a line \
                         through the vertex"
                    )
                });
            }
        }
    }
    if straight > 0 {
        notes.push(format!("{straight} corners are straight; their planes are undefined"));
    }
    if contained > 0 {
        notes.push(format!("{contained} edge/corner pairs have the edge inside the corner plane"));
    }
}

// ---- Driver ----

/// Score the three general-position conditions for a curve. `tol` is
/// relative to the curve diameter, as for secant enumeration; each
/// condition passes exactly when its margin exceeds `tol`.
pub fn genericity_check(k: &PolyCurve, tol: f64) -> Result<GenericityReport> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let ne = k.edge_count();
    let nv = k.vertices().len();
    let diam = k.diameter();
    let world = tol * diam;
    let cluster = world.max(1e-12 * diam);
    let mut notes: Vec<String> = Vec::new();

    let corners = if k.is_closed() { ne } else { ne - 1 };
    for i in 0..corners {
        let (a, b) = k.edge(i);
        let (_, c) = k.edge((i + 1) % ne);
        let (d1, d2) = (b - a, c - b);
        if d1.cross(d2).norm() <= 1e-9 * d1.norm() * d2.norm() {
            notes.push(format!("edges {i} and {} are nearly collinear", (i + 1) % ne));
        }
    }

    let mut surface = Worst::new();
    ruled_surface_margin(k, &mut surface);

    let mut order = Worst::new();
    let solve = solve_quadrisecants(k, tol)?;
    if solve.flat_subsets > 0 {
        let offenders: Vec<usize> = solve.flat_example.map(|e| e.to_vec()).unwrap_or_default();
        order.observe(0.0, &offenders, || {
            format!(
                "{} edge subsets are coplanar with a carrier pair, so secant \
                 lines through them are not isolated",
                solve.flat_subsets
            )
        });
    }
    if solve.ambiguous {
        order.observe(0.0, &[], || {
            String::from("secant lines through different edge sets coincide within tolerance")
        });
    }
    let mut lines: Vec<(Vec3, Vec3, String)> = Vec::new();
    for q in &solve.secants {
        lines.push((q.point, q.dir, format!("the secant line through edges {:?}", q.edges)));
    }
    for i in 0..nv {
        for j in i + 1..nv {
            if vertices_adjacent(k, i, j) {
                continue;
            }
            let dir = (verts_dir(k, i, j)).normalized();
            lines.push((k.vertices()[i], dir, format!("the line through vertices {i} and {j}")));
        }
    }
    for (p, dir, what) in &lines {
        let (points, edges, margin) = scan_line(k, *p, *dir, world, cluster);
        if points >= 5 {
            order.observe(0.0, &edges, || format!("{what} meets the curve in {points} points"));
        } else if points == 4 {
            order.observe(margin / diam, &edges, || {
                format!("{what} passes within {margin:.3e} of a fifth edge")
            });
        }
    }
    notes.extend(solve.warnings);

    let mut corner = Worst::new();
    corner_plane_margin(k, &mut corner, &mut notes);

    Ok(GenericityReport {
        tol,
        ruled_surface: surface.report(tol),
        secant_order: order.report(tol),
        corner_plane: corner.report(tol),
        notes,
    })
}

fn verts_dir(k: &PolyCurve, i: usize, j: usize) -> Vec3 {
    k.vertices()[j] - k.vertices()[i]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{planar_ngon, torus_knot};
    use crate::geom::v3;
    use crate::rng::{derive, range_f64, stream};
    use alloc::vec::Vec;

    fn jittered_trefoil() -> PolyCurve {
        let base = torus_knot(2, 3, 32).unwrap();
        let h = 0.01 * base.diameter();
        let mut rng = stream(derive(41, "genericity-jitter", 0));
        let vs: Vec<Vec3> = base
            .vertices()
            .iter()
            .map(|v| {
                v3(
                    v.x + range_f64(&mut rng, -h, h),
                    v.y + range_f64(&mut rng, -h, h),
                    v.z + range_f64(&mut rng, -h, h),
                )
            })
            .collect();
        PolyCurve::new(vs, true, "trefoil-jittered").unwrap()
    }

    #[test]
    fn jittered_trefoil_passes_every_condition() {
        let k = jittered_trefoil();
        let rep = genericity_check(&k, 1e-9).unwrap();
        assert!(rep.pass(), "{rep:?}");
        for c in [&rep.ruled_surface, &rep.secant_order, &rep.corner_plane] {
            assert!(c.residual > 1e-9);
            assert_eq!(c.pass, c.residual > rep.tol);
        }
        assert!(rep.ruled_surface.residual.is_finite());
        assert!(rep.secant_order.residual.is_finite());
        assert!(rep.corner_plane.residual.is_finite());
    }

    #[test]
    fn five_collinear_points_break_the_order_condition() {
        // Even vertices on the x axis, odd vertices bumped off it: the
        // axis meets the curve in five isolated points.
        let bumps = [0.3, -0.2, 0.25, -0.31];
        let mut vs = Vec::new();
        for i in 0..5 {
            vs.push(v3(i as f64, 0.0, 0.0));
            if i < 4 {
                vs.push(v3(i as f64 + 0.5, 1.0, bumps[i]));
            }
        }
        let k = PolyCurve::new(vs, false, "five-collinear").unwrap();
        let rep = genericity_check(&k, 1e-9).unwrap();
        assert!(!rep.secant_order.pass);
        assert_eq!(rep.secant_order.residual, 0.0);
        assert!(rep.secant_order.detail.contains("points"));
        assert!(!rep.secant_order.offenders.is_empty());
        assert!(!rep.pass());
    }

    #[test]
    fn planar_polygon_breaks_the_order_condition() {
        // Every carrier plane of a planar curve contains every edge, so
        // secant lines are never isolated; the other conditions have
        // nothing to latch onto (no skew edges, empty corner planes).
        let k = planar_ngon(16).unwrap();
        let rep = genericity_check(&k, 1e-9).unwrap();
        assert!(!rep.secant_order.pass);
        assert_eq!(rep.secant_order.residual, 0.0);
        assert!(rep.secant_order.detail.contains("coplanar"));
        assert!(rep.ruled_surface.pass);
        assert!(rep.ruled_surface.residual.is_infinite());
        assert!(rep.corner_plane.pass);
        assert!(!rep.pass());
    }

    #[test]
    fn margins_match_the_pass_flags_across_tolerances() {
        let k = jittered_trefoil();
        let loose = genericity_check(&k, 1e-3).unwrap();
        for c in [&loose.ruled_surface, &loose.secant_order, &loose.corner_plane] {
            assert!(c.residual >= 0.0);
            assert_eq!(c.pass, c.residual > 1e-3);
        }
        assert!(genericity_check(&k, -1.0).is_err());
        assert!(genericity_check(&k, f64::NAN).is_err());
    }
}

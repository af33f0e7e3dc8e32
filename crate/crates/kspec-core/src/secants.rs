//! Quadrisecant enumeration and alternation classification.
//!
//! A quadrisecant is a line meeting the curve in four points on four
//! pairwise non-adjacent edges. Candidate lines are parametrized by a
//! point on each of two carrier edges; meeting a further edge is one
//! scalar equation, bilinear in the two carrier parameters, so each
//! four-edge subset reduces to a pair of bilinear equations on the unit
//! square. Bilinear functions take their extrema at box corners, which
//! makes corner sign tests an exact pruning rule for the subdivision
//! search; a Newton polish finishes each surviving box.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::curve::PolyCurve;
use crate::diagram::Diagram;
use crate::geom::{orthonormal_basis, Vec3};
use crate::projection::project;
use crate::rng::{derive2, range_f64, stream};
use crate::{Error, Result};

/// Boxes at or below this edge length go to Newton.
const SUBDIV_SIZE: f64 = 1.0 / 256.0;

/// Parameter-space distance treated as one root.
const ROOT_EPS: f64 = 1e-7;

/// Relative line-proximity factor for deduplication, in units of `tol`.
const DEDUP_FACTOR: f64 = 1e3;

/// Intersections closer than this (in edge parameter) to a vertex are
/// treated as non-generic and skipped.
pub(crate) const VERTEX_MARGIN: f64 = 1e-6;

/// Degenerate cone draws are redrawn at most this many times.
const CONE_RETRY: u64 = 10;

// ---- Types ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlternationClass {
    Simple,
    Flipped,
    Alternating,
}

impl AlternationClass {
    pub fn name(self) -> &'static str {
        match self {
            AlternationClass::Simple => "simple",
            AlternationClass::Flipped => "flipped",
            AlternationClass::Alternating => "alternating",
        }
    }
}

/// A line meeting the curve in four points, with both orderings of the
/// points: along the curve (the storage order) and along the line.
#[derive(Debug, Clone)]
pub struct Quadrisecant {
    /// First intersection point in curve order; origin for line parameters.
    pub point: Vec3,
    /// Unit direction, sign-canonicalized.
    pub dir: Vec3,
    /// Pairwise non-adjacent, sorted along the curve.
    pub edges: [usize; 4],
    /// Parameter within each edge, (0, 1) strictly, in `edges` order.
    pub params: [f64; 4],
    /// Signed position of each point along `dir`, in `edges` order.
    pub line_params: [f64; 4],
    pub class: AlternationClass,
}

// ---- Alternation ----

/// Class of the permutation `line_order`, the curve-order labels 0..4 read
/// off along the line. Canonical under dihedral relabeling of the cyclic
/// curve order and under line reversal; open curves inherit the closed
/// convention.
pub fn alternation_class(line_order: [u8; 4]) -> AlternationClass {
    let mut best = [9u8; 4];
    for rot in 0..4u8 {
        for refl in [false, true] {
            for rev in [false, true] {
                let mut seq = [0u8; 4];
                for (pos, &lab) in line_order.iter().enumerate() {
                    let relab = if refl { (4 - lab) % 4 } else { lab };
                    let relab = (relab + rot) % 4;
                    let p = if rev { 3 - pos } else { pos };
                    seq[p] = relab;
                }
                if seq < best {
                    best = seq;
                }
            }
        }
    }
    match best {
        [0, 1, 2, 3] => AlternationClass::Simple,
        [0, 1, 3, 2] => AlternationClass::Flipped,
        [0, 2, 1, 3] => AlternationClass::Alternating,
        other => unreachable!("non-canonical order {other:?}"),
    }
}

// ---- Bilinear system solver ----

/// Coefficients of F(s, t) = det[Q(t)-P(s), C-P(s), D-P(s)]: the signed
/// volume condition for the carrier line through P(s), Q(t) to meet the
/// line of segment CD. Bilinear because the quadratic terms pair two
/// columns parallel to the same carrier edge.
fn bilinear_coeffs(p0: Vec3, p1: Vec3, q0: Vec3, q1: Vec3, c: Vec3, d: Vec3) -> [f64; 4] {
    let f = |s: f64, t: f64| -> f64 {
        let p = p0 + (p1 - p0) * s;
        let q = q0 + (q1 - q0) * t;
        (q - p).dot((c - p).cross(d - p))
    };
    let (f00, f10, f01, f11) = (f(0.0, 0.0), f(1.0, 0.0), f(0.0, 1.0), f(1.0, 1.0));
    [f00, f10 - f00, f01 - f00, f11 - f10 - f01 + f00]
}

fn bl(c: &[f64; 4], s: f64, t: f64) -> f64 {
    c[0] + c[1] * s + c[2] * t + c[3] * s * t
}

fn world_cube(d: f64) -> f64 {
    d * d * d
}

/// All four corners strictly one sign: no zero anywhere in the box.
fn box_excludes(c: &[f64; 4], s0: f64, s1: f64, t0: f64, t1: f64) -> bool {
    let vals = [bl(c, s0, t0), bl(c, s1, t0), bl(c, s0, t1), bl(c, s1, t1)];
    vals.iter().all(|v| *v > 0.0) || vals.iter().all(|v| *v < 0.0)
}

fn newton(f: &[f64; 4], g: &[f64; 4], mut s: f64, mut t: f64) -> Option<(f64, f64)> {
    for _ in 0..16 {
        let (fv, gv) = (bl(f, s, t), bl(g, s, t));
        let (fs, ft) = (f[1] + f[3] * t, f[2] + f[3] * s);
        let (gs, gt) = (g[1] + g[3] * t, g[2] + g[3] * s);
        let det = fs * gt - ft * gs;
        if det == 0.0 {
            return None;
        }
        let (ds, dt) = ((fv * gt - gv * ft) / det, (fs * gv - gs * fv) / det);
        s -= ds;
        t -= dt;
        if !s.is_finite() || !t.is_finite() || s < -0.5 || s > 1.5 || t < -0.5 || t > 1.5 {
            return None;
        }
        if ds.abs() + dt.abs() < 1e-14 {
            return Some((s, t));
        }
    }
    Some((s, t))
}

/// Common roots of two bilinear equations on the unit square.
fn roots_on_square(f: &[f64; 4], g: &[f64; 4]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut stack = alloc::vec![(0.0f64, 1.0f64, 0.0f64, 1.0f64)];
    while let Some((s0, s1, t0, t1)) = stack.pop() {
        if box_excludes(f, s0, s1, t0, t1) || box_excludes(g, s0, s1, t0, t1) {
            continue;
        }
        let (ws, wt) = (s1 - s0, t1 - t0);
        if ws.max(wt) <= SUBDIV_SIZE {
            if let Some((s, t)) = newton(f, g, 0.5 * (s0 + s1), 0.5 * (t0 + t1)) {
                if (-ROOT_EPS..=1.0 + ROOT_EPS).contains(&s)
                    && (-ROOT_EPS..=1.0 + ROOT_EPS).contains(&t)
                    && !out
                        .iter()
                        .any(|(a, b)| (a - s).abs() + (b - t).abs() < ROOT_EPS)
                {
                    out.push((s, t));
                }
            }
            continue;
        }
        if ws >= wt {
            let m = 0.5 * (s0 + s1);
            stack.push((s0, m, t0, t1));
            stack.push((m, s1, t0, t1));
        } else {
            let m = 0.5 * (t0 + t1);
            stack.push((s0, s1, t0, m));
            stack.push((s0, s1, m, t1));
        }
    }
    out
}

// ---- Line fitting and verification ----

/// Unclamped parameter of the closest point of segment (c, d) to the line,
/// with the line parameter and the gap at closest approach.
pub(crate) fn line_hits_segment(p: Vec3, dir: Vec3, c: Vec3, d: Vec3) -> Option<(f64, f64, f64)> {
    let e = d - c;
    let w = c - p;
    let b = dir.dot(e);
    let cc = e.norm2();
    let denom = cc - b * b;
    if denom <= 1e-12 * cc {
        return None;
    }
    let u = (b * dir.dot(w) - e.dot(w)) / denom;
    let x = dir.dot(w) + b * u;
    let gap = (p + dir * x).dist(c + e * u);
    Some((u, x, gap))
}

fn canonical_dir(d: Vec3) -> Vec3 {
    let comps = [d.x, d.y, d.z];
    let mut lead = 0;
    for i in 1..3 {
        if comps[i].abs() > comps[lead].abs() {
            lead = i;
        }
    }
    if comps[lead] < 0.0 {
        -d
    } else {
        d
    }
}

fn lines_close(a: &Quadrisecant, b: &Quadrisecant, world_eps: f64) -> bool {
    if a.dir.cross(b.dir).norm() > 1e-6 {
        return false;
    }
    let off = b.point - a.point;
    (off - a.dir * off.dot(a.dir)).norm() <= world_eps
}

/// Re-verify the defining properties of a quadrisecant against its curve.
pub fn verify(k: &PolyCurve, q: &Quadrisecant, tol: f64) -> Result<()> {
    let world = tol * k.diameter();
    for w in 0..4 {
        for x in w + 1..4 {
            if k.edges_adjacent(q.edges[w], q.edges[x]) {
                return Err(Error::InvalidParameter(format!(
                    "edges {} and {} are adjacent",
                    q.edges[w], q.edges[x]
                )));
            }
        }
    }
    for w in 0..4 {
        let u = q.params[w];
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "parameter {u} not strictly inside edge {}",
                q.edges[w]
            )));
        }
        let (a, b) = k.edge(q.edges[w]);
        let pt = a + (b - a) * u;
        let off = pt - q.point;
        let gap = (off - q.dir * off.dot(q.dir)).norm();
        if gap > world {
            return Err(Error::InvalidParameter(format!(
                "point on edge {} misses the line by {gap:.3e}",
                q.edges[w]
            )));
        }
    }
    Ok(())
}

// ---- Enumeration ----

pub(crate) struct Solve {
    pub(crate) secants: Vec<Quadrisecant>,
    pub(crate) warnings: Vec<String>,
    pub(crate) ambiguous: bool,
    pub(crate) flat_subsets: usize,
    pub(crate) flat_example: Option<[usize; 4]>,
}

pub(crate) fn solve_quadrisecants(k: &PolyCurve, tol: f64) -> Result<Solve> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let ne = k.edge_count();
    let world = tol * k.diameter();
    let dedup = DEDUP_FACTOR * world;
    // A coefficient block this small means the carrier plane contains the
    // target edge: the equation vanishes identically and roots are not
    // isolated. Planar curves hit this for every subset.
    let flat = 1e-12 * world_cube(k.diameter());
    let mut flat_subsets = 0usize;
    let mut flat_example: Option<[usize; 4]> = None;
    let mut out: Vec<Quadrisecant> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let mut ambiguous = false;
    let mut coeffs: Vec<[f64; 4]> = alloc::vec![[0.0; 4]; ne];
    for i in 0..ne {
        for j in i + 1..ne {
            if k.edges_adjacent(i, j) {
                continue;
            }
            let (p0, p1) = k.edge(i);
            let (q0, q1) = k.edge(j);
            for m in j + 1..ne {
                let (c, d) = k.edge(m);
                coeffs[m] = bilinear_coeffs(p0, p1, q0, q1, c, d);
            }
            for e3 in j + 1..ne {
                if k.edges_adjacent(i, e3) || k.edges_adjacent(j, e3) {
                    continue;
                }
                for e4 in e3 + 1..ne {
                    if k.edges_adjacent(i, e4)
                        || k.edges_adjacent(j, e4)
                        || k.edges_adjacent(e3, e4)
                    {
                        continue;
                    }
                    if coeffs[e3].iter().all(|c| c.abs() <= flat)
                        || coeffs[e4].iter().all(|c| c.abs() <= flat)
                    {
                        flat_subsets += 1;
                        flat_example.get_or_insert([i, j, e3, e4]);
                        continue;
                    }
                    for (s, t) in roots_on_square(&coeffs[e3], &coeffs[e4]) {
                        match assemble(k, world, [i, j, e3, e4], s, t) {
                            Hit::Secant(q) => {
                                place(&mut out, q, dedup, &mut warnings, &mut ambiguous)
                            }
                            Hit::NearVertex(edge) => warnings.push(format!(
                                "secant candidate through edges {i},{j},{e3},{e4} passes within \
                                 the vertex margin on edge {edge}"
                            )),
                            Hit::Miss => {}
                        }
                    }
                }
            }
        }
    }
    if flat_subsets > 0 {
        warnings.push(format!(
            "{flat_subsets} edge subsets are coplanar with a carrier pair; secants \
             through them are not isolated and were skipped"
        ));
    }
    out.sort_by(|a, b| a.edges.cmp(&b.edges));
    Ok(Solve { secants: out, warnings, ambiguous, flat_subsets, flat_example })
}

enum Hit {
    Secant(Quadrisecant),
    NearVertex(usize),
    Miss,
}

/// Build and verify the quadrisecant for carrier parameters (s, t).
fn assemble(k: &PolyCurve, world: f64, edges: [usize; 4], s: f64, t: f64) -> Hit {
    let (p0, p1) = k.edge(edges[0]);
    let (q0, q1) = k.edge(edges[1]);
    let p = p0 + (p1 - p0) * s;
    let q = q0 + (q1 - q0) * t;
    let dir = canonical_dir((q - p).normalized());
    if dir == Vec3::ZERO {
        return Hit::Miss;
    }
    let mut params = [s, t, 0.0, 0.0];
    for w in 2..4 {
        let (c, d) = k.edge(edges[w]);
        match line_hits_segment(p, dir, c, d) {
            None => return Hit::Miss,
            Some((u, _, gap)) => {
                if gap > world || !(-0.5..=1.5).contains(&u) {
                    return Hit::Miss;
                }
                params[w] = u;
            }
        }
    }
    for w in 0..4 {
        if params[w] < VERTEX_MARGIN || params[w] > 1.0 - VERTEX_MARGIN {
            let inside = params[w] > -0.1 && params[w] < 1.1;
            return if inside { Hit::NearVertex(edges[w]) } else { Hit::Miss };
        }
    }
    // Sort the four hits along the curve, then read their order along the
    // line to classify.
    let mut idx = [0usize, 1, 2, 3];
    idx.sort_by(|&a, &b| (edges[a], params[a]).partial_cmp(&(edges[b], params[b])).unwrap());
    let pt_of = |w: usize| -> Vec3 {
        let (a, b) = k.edge(edges[w]);
        a + (b - a) * params[w]
    };
    let origin = pt_of(idx[0]);
    let mut sedges = [0usize; 4];
    let mut sparams = [0.0f64; 4];
    let mut lp = [0.0f64; 4];
    for (pos, &w) in idx.iter().enumerate() {
        sedges[pos] = edges[w];
        sparams[pos] = params[w];
        lp[pos] = (pt_of(w) - origin).dot(dir);
    }
    let mut rank = [0u8, 1, 2, 3];
    rank.sort_by(|&a, &b| lp[a as usize].partial_cmp(&lp[b as usize]).unwrap());
    let class = alternation_class(rank);
    Hit::Secant(Quadrisecant {
        point: origin,
        dir,
        edges: sedges,
        params: sparams,
        line_params: lp,
        class,
    })
}

fn place(
    out: &mut Vec<Quadrisecant>,
    q: Quadrisecant,
    dedup: f64,
    warnings: &mut Vec<String>,
    ambiguous: &mut bool,
) {
    for have in out.iter() {
        if lines_close(have, &q, dedup) {
            if have.edges != q.edges {
                warnings.push(format!(
                    "lines through edges {:?} and {:?} coincide within the merge \
                     tolerance: quintisecant or tolerance too coarse",
                    have.edges, q.edges
                ));
                *ambiguous = true;
            }
            return;
        }
    }
    out.push(q);
}

/// Every isolated quadrisecant of the curve, sorted by edge tuple. `tol`
/// is relative to the curve diameter.
pub fn quadrisecants(k: &PolyCurve, tol: f64) -> Result<Vec<Quadrisecant>> {
    let solve = solve_quadrisecants(k, tol)?;
    if solve.ambiguous {
        return Err(Error::InvalidParameter(format!(
            "quadrisecant deduplication is ambiguous at tolerance {tol}: {}",
            solve.warnings.join("; ")
        )));
    }
    Ok(solve.secants)
}

// ---- Cone survey near a quadrisecant ----

/// Closure-arc statistics for directions in a cone around a secant.
///
/// Two counts per direction: how many strands the straight closure
/// connector crosses (the virtual-crossing count of the naive closure),
/// and the diagrammatic height of the raw diagram (the minimum over all
/// connector routes). The straight count witnesses the secant: it stays
/// at three as the cone shrinks, while the minimizing route may dodge
/// the pattern entirely.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSurvey {
    pub cone_angle: f64,
    /// Carrier edge split by the opening.
    pub edge: usize,
    /// The secant point the curve was opened at.
    pub basepoint: Vec3,
    /// Straight-connector crossing count -> direction count.
    pub arc_counts: BTreeMap<u32, u64>,
    /// Raw diagrammatic height -> direction count.
    pub height_counts: BTreeMap<u32, u64>,
    /// Degenerate redraw events.
    pub degenerate: u64,
    /// Directions abandoned after every redraw stayed degenerate.
    pub exhausted: u64,
}

impl ConeSurvey {
    pub fn max_arc_crossings(&self) -> Option<u32> {
        self.arc_counts.keys().next_back().copied()
    }

    pub fn arc_fraction(&self, h: u32) -> f64 {
        let total: u64 = self.arc_counts.values().sum();
        if total == 0 {
            return 0.0;
        }
        self.arc_counts.get(&h).copied().unwrap_or(0) as f64 / total as f64
    }
}

/// Transversal interior crossings of the straight head-to-leg connector
/// with the projected curve. `None` when an intersection sits too close
/// to a segment end or the connector degenerates: redraw that direction.
fn straight_arc_crossings(shadow: &crate::projection::Shadow, world: f64) -> Option<u32> {
    let n = shadow.verts.len();
    let (h, l) = (shadow.verts[0], shadow.verts[n - 1]);
    let d1 = l - h;
    if d1.norm() <= world {
        return None;
    }
    let mut count = 0u32;
    for m in 0..n - 1 {
        let (c, d) = (shadow.verts[m], shadow.verts[m + 1]);
        let d2 = d - c;
        let denom = d1.cross(d2);
        if libm::fabs(denom) <= 1e-12 * d1.norm() * d2.norm() {
            continue;
        }
        let r = c - h;
        let s = r.cross(d2) / denom;
        let t = r.cross(d1) / denom;
        let (ms, mt) = (world / d1.norm(), world / d2.norm());
        let near = s > -ms && s < 1.0 + ms && t > -mt && t < 1.0 + mt;
        if !near {
            continue;
        }
        let inside = s > ms && s < 1.0 - ms && t > mt && t < 1.0 - mt;
        if !inside {
            // Endpoint contact of the incident edges is exact, everything
            // else within the margin is a degeneracy.
            let endpoint_touch = (m == 0 && s < ms && t < mt)
                || (m == n - 2 && s > 1.0 - ms && t > 1.0 - mt);
            if endpoint_touch {
                continue;
            }
            return None;
        }
        count += 1;
    }
    Some(count)
}

/// Fraction of the distance to the nearest carrier-edge endpoint removed
/// on each side of the basepoint when opening at a secant point.
const OPEN_GAP_FRACTION: f64 = 0.25;

/// The knot opened at the first secant point of `q`: the carrier edge is
/// split around the point, removing a short arc centred on it, so the two
/// endpoints straddle the secant.
pub fn open_at_secant(k: &PolyCurve, q: &Quadrisecant) -> Result<PolyCurve> {
    let (a, b) = k.edge(q.edges[0]);
    let p = q.params[0];
    let g = OPEN_GAP_FRACTION * p.min(1.0 - p);
    let n = k.vertices().len();
    let mut vs = Vec::with_capacity(n + 2);
    vs.push(a + (b - a) * (p + g));
    for w in 1..=n {
        vs.push(k.vertices()[(q.edges[0] + w) % n]);
    }
    vs.push(a + (b - a) * (p - g));
    PolyCurve::new(vs, false, &format!("{}-cut", k.label()))
}

/// Open the knot at the first secant point of `q` and survey raw diagram
/// heights for directions in a `cone_angle` cone around the secant line.
/// Projecting exactly along the secant is degenerate by construction; the
/// cone directions land beside it, where the closure arc threads the
/// three remaining secant strands and can cross at most those three.
pub fn height3_link(
    k: &PolyCurve,
    q: &Quadrisecant,
    cone_angle: f64,
    n_dirs_local: u64,
    seed: u64,
) -> Result<ConeSurvey> {
    if !k.is_closed() {
        return Err(Error::InvalidParameter(format!(
            "{}: cone survey needs a closed curve",
            k.label()
        )));
    }
    if !(cone_angle > 0.0) || cone_angle > 0.5 {
        return Err(Error::InvalidParameter(format!(
            "cone angle {cone_angle} outside (0, 0.5] radians"
        )));
    }
    if n_dirs_local == 0 {
        return Err(Error::InvalidParameter(format!("need at least one direction")));
    }
    verify(k, q, 1e-5)?;
    let opened = open_at_secant(k, q)?;
    let (a, b) = k.edge(q.edges[0]);
    let basepoint = a + (b - a) * q.params[0];
    let world = 1e-9 * opened.diameter();
    let (u, v) = orthonormal_basis(q.dir);
    let cos_cap = libm::cos(cone_angle);
    let mut arc_counts: BTreeMap<u32, u64> = BTreeMap::new();
    let mut height_counts: BTreeMap<u32, u64> = BTreeMap::new();
    let (mut degenerate, mut exhausted) = (0u64, 0u64);
    for i in 0..n_dirs_local {
        let mut done = false;
        for attempt in 0..=CONE_RETRY {
            let mut rng = stream(derive2(seed, "cone", i, attempt));
            let z = range_f64(&mut rng, cos_cap, 1.0);
            let r = libm::sqrt((1.0 - z * z).max(0.0));
            let phi = range_f64(&mut rng, 0.0, 2.0 * core::f64::consts::PI);
            let xi = q.dir * z + u * (r * libm::cos(phi)) + v * (r * libm::sin(phi));
            match project(&opened, xi) {
                Ok(shadow) => {
                    let arc = match straight_arc_crossings(&shadow, world) {
                        Some(c) => c,
                        None => {
                            degenerate += 1;
                            continue;
                        }
                    };
                    let d = Diagram::from_shadow(&shadow)?;
                    let h = d.height()?;
                    // The straight route is one admissible connector.
                    debug_assert!(h <= arc);
                    *arc_counts.entry(arc).or_insert(0) += 1;
                    *height_counts.entry(h).or_insert(0) += 1;
                    done = true;
                    break;
                }
                Err(Error::DegenerateProjection(_)) => degenerate += 1,
                Err(e) => return Err(e),
            }
        }
        if !done {
            exhausted += 1;
        }
    }
    Ok(ConeSurvey {
        cone_angle,
        edge: q.edges[0],
        basepoint,
        arc_counts,
        height_counts,
        degenerate,
        exhausted,
    })
}

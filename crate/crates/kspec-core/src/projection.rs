//! Projection directions and generic shadows of polygonal curves.
//!
//! A direction is generic for a curve when the projected diagram is a proper
//! immersion: no edge collapses, no crossing sits near a vertex or an
//! endpoint, no two crossings coincide, and crossing depths separate cleanly.
//! Violations surface as `Error::DegenerateProjection` so callers can redraw
//! the direction; all thresholds scale with the curve diameter.

use alloc::format;
use alloc::vec::Vec;

use crate::curve::{PolyCurve, DEGENERACY_TOL};
use crate::geom::{orthonormal_basis, v2, Vec2, Vec3};
use crate::rng;
use crate::{Error, Result};

/// Projection direction with its sampling provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub unit: Vec3,
    pub index: u64,
    /// 0 for the first draw; redraws after degeneracy bump this.
    pub attempt: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Independent uniform draws on the sphere, one derived stream per index.
    Uniform,
    /// Quasi-uniform golden-spiral lattice; seed-independent.
    Fibonacci,
}

fn uniform_unit(seed: u64) -> Vec3 {
    let mut rng = rng::stream(seed);
    let z = rng::range_f64(&mut rng, -1.0, 1.0);
    let phi = rng::range_f64(&mut rng, 0.0, 2.0 * core::f64::consts::PI);
    let r = libm::sqrt((1.0 - z * z).max(0.0));
    Vec3 {
        x: r * libm::cos(phi),
        y: r * libm::sin(phi),
        z,
    }
}

/// Direction for one sample index (uniform scheme), attempt 0.
pub fn direction_at(seed: u64, index: u64) -> Direction {
    Direction {
        unit: uniform_unit(rng::derive(seed, "direction", index)),
        index,
        attempt: 0,
    }
}

/// Fresh uniform direction after `attempt` degenerate draws at this index.
pub fn retry_direction(seed: u64, index: u64, attempt: u32) -> Direction {
    Direction {
        unit: uniform_unit(rng::derive(rng::derive(seed, "direction", index), "retry", attempt as u64)),
        index,
        attempt,
    }
}

/// Direction batch under a scheme. Fibonacci ignores the seed.
pub fn directions(scheme: Scheme, n: u64, seed: u64) -> Vec<Direction> {
    let mut out = Vec::with_capacity(n as usize);
    match scheme {
        Scheme::Uniform => {
            for i in 0..n {
                out.push(direction_at(seed, i));
            }
        }
        Scheme::Fibonacci => {
            let golden = 2.0 * core::f64::consts::PI * (1.0 - 1.0 / ((1.0 + libm::sqrt(5.0)) / 2.0));
            for i in 0..n {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                let r = libm::sqrt((1.0 - z * z).max(0.0));
                let phi = golden * i as f64;
                out.push(Direction {
                    unit: Vec3 {
                        x: r * libm::cos(phi),
                        y: r * libm::sin(phi),
                        z,
                    },
                    index: i,
                    attempt: 0,
                });
            }
        }
    }
    out
}

/// One crossing of a projected shadow, in geometric terms.
#[derive(Debug, Clone, Copy)]
pub struct ShadowCrossing {
    pub over_edge: usize,
    pub over_param: f64,
    pub under_edge: usize,
    pub under_param: f64,
    /// +1 when the under direction is counterclockwise from the over direction.
    pub sign: i8,
    pub pos: Vec2,
}

/// Passage of the strand through one crossing, ordered along the curve.
#[derive(Debug, Clone, Copy)]
pub struct StrandEvent {
    pub edge: usize,
    pub param: f64,
    /// Index into `Shadow::crossings`, renumbered by first visit.
    pub crossing: usize,
    pub over: bool,
}

/// Generic projection of a curve: crossings plus the strand event sequence.
#[derive(Debug, Clone)]
pub struct Shadow {
    pub closed: bool,
    pub crossings: Vec<ShadowCrossing>,
    pub events: Vec<StrandEvent>,
    pub verts: Vec<Vec2>,
}

fn degenerate(reason: &str) -> Error {
    Error::DegenerateProjection(format!("{reason}"))
}

/// Project a curve along a unit direction onto its orthogonal plane.
pub fn project(curve: &PolyCurve, dir: Vec3) -> Result<Shadow> {
    let xi = dir.normalized();
    if xi == Vec3::ZERO {
        return Err(Error::InvalidParameter(format!("zero projection direction")));
    }
    let (u, v) = orthonormal_basis(xi);
    let tol = DEGENERACY_TOL * curve.diameter();

    let verts: Vec<Vec2> = curve
        .vertices()
        .iter()
        .map(|p| v2(p.dot(u), p.dot(v)))
        .collect();
    let depth: Vec<f64> = curve.vertices().iter().map(|p| p.dot(xi)).collect();

    let n = verts.len();
    let ne = curve.edge_count();
    let p2 = |e: usize| (verts[e], verts[(e + 1) % n]);

    for e in 0..ne {
        let (a, b) = p2(e);
        if a.dist(b) <= tol {
            return Err(degenerate("edge projects to a point"));
        }
    }
    // Projected backtracking at a corner folds two edges onto each other.
    let corners = if curve.is_closed() { ne } else { ne - 1 };
    for i in 0..corners {
        let (a, b) = p2(i);
        let (_, c) = p2((i + 1) % ne);
        let d1 = b - a;
        let d2 = c - b;
        if d1.dot(d2) < 0.0 && libm::fabs(d1.cross(d2)) <= tol * d1.norm().max(d2.norm()) {
            return Err(degenerate("projected corner backtracks"));
        }
    }
    if !curve.is_closed() {
        // Endpoints must stay clear of every other projected edge.
        for (pt, adj) in [(verts[0], 0usize), (verts[n - 1], ne - 1)] {
            for e in 0..ne {
                if e == adj {
                    continue;
                }
                let (a, b) = p2(e);
                if point_seg2(pt, a, b) <= tol {
                    return Err(degenerate("endpoint touches another strand"));
                }
            }
        }
    }

    let mut crossings: Vec<ShadowCrossing> = Vec::new();
    for i in 0..ne {
        for j in i + 1..ne {
            if curve.edges_adjacent(i, j) {
                continue;
            }
            let (a, b) = p2(i);
            let (c, d) = p2(j);
            let d1 = b - a;
            let d2 = d - c;
            let denom = d1.cross(d2);
            let len1 = d1.norm();
            let len2 = d2.norm();
            if libm::fabs(denom) <= 1e-12 * len1 * len2 {
                // Near-parallel: reject only if the segments come close.
                if seg_seg2(a, b, c, d) <= tol {
                    return Err(degenerate("parallel overlap between edges"));
                }
                continue;
            }
            let r = c - a;
            let s = r.cross(d2) / denom;
            let t = r.cross(d1) / denom;
            let (mi, mj) = (tol / len1, tol / len2);
            let near_i = (-mi..=1.0 + mi).contains(&s);
            let near_j = (-mj..=1.0 + mj).contains(&t);
            let inside_i = (mi..=1.0 - mi).contains(&s);
            let inside_j = (mj..=1.0 - mj).contains(&t);
            if near_i && near_j {
                if !(inside_i && inside_j) {
                    return Err(degenerate("crossing too close to a vertex"));
                }
                let zi = depth[i] * (1.0 - s) + depth[(i + 1) % n] * s;
                let zj = depth[j] * (1.0 - t) + depth[(j + 1) % n] * t;
                if libm::fabs(zi - zj) <= tol {
                    return Err(degenerate("crossing depths not separated"));
                }
                let pos = a + d1 * s;
                let i_over = zi > zj;
                let (oe, op, od, ue, up, ud) = if i_over {
                    (i, s, d1, j, t, d2)
                } else {
                    (j, t, d2, i, s, d1)
                };
                let sign = if od.cross(ud) > 0.0 { 1 } else { -1 };
                crossings.push(ShadowCrossing {
                    over_edge: oe,
                    over_param: op,
                    under_edge: ue,
                    under_param: up,
                    sign,
                    pos,
                });
            }
        }
    }

    for i in 0..crossings.len() {
        for j in i + 1..crossings.len() {
            if crossings[i].pos.dist(crossings[j].pos) <= tol {
                return Err(degenerate("two crossings coincide"));
            }
        }
    }

    // Strand order: sort passages by (edge, param), then renumber crossings by
    // first visit so ids are a function of the diagram alone.
    let mut events: Vec<StrandEvent> = Vec::with_capacity(2 * crossings.len());
    for (cid, c) in crossings.iter().enumerate() {
        events.push(StrandEvent {
            edge: c.over_edge,
            param: c.over_param,
            crossing: cid,
            over: true,
        });
        events.push(StrandEvent {
            edge: c.under_edge,
            param: c.under_param,
            crossing: cid,
            over: false,
        });
    }
    events.sort_by(|a, b| {
        (a.edge, a.param)
            .partial_cmp(&(b.edge, b.param))
            .expect("params are finite")
    });
    let mut order: Vec<usize> = alloc::vec![usize::MAX; crossings.len()];
    let mut next_id = 0;
    for ev in &events {
        if order[ev.crossing] == usize::MAX {
            order[ev.crossing] = next_id;
            next_id += 1;
        }
    }
    let mut renumbered: Vec<ShadowCrossing> = crossings.clone();
    for (old, &new) in order.iter().enumerate() {
        renumbered[new] = crossings[old];
    }
    for ev in &mut events {
        ev.crossing = order[ev.crossing];
    }

    Ok(Shadow {
        closed: curve.is_closed(),
        crossings: renumbered,
        events,
        verts,
    })
}

fn point_seg2(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

fn seg_seg2(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> f64 {
    point_seg2(a, c, d)
        .min(point_seg2(b, c, d))
        .min(point_seg2(c, a, b))
        .min(point_seg2(d, a, b))
}

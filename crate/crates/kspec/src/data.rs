//! Bundled curve fixtures and the tangle construction kit that generates
//! them.
//!
//! Tangles live in the square [-1,1]^2 with strand ends at the four
//! corners and crossings realized as z-plateaus, so projecting along z
//! reads off exactly the designed diagram. Every coordinate the kit
//! produces is a dyadic rational, which keeps the arithmetic exact: the
//! mutation operator can cut, rotate and restitch a curve by literal
//! coordinate equality.

use std::collections::HashMap;
use std::path::Path;

use kspec_core::curve::PolyCurve;
use kspec_core::geom::{v3, Vec3};
use kspec_core::{Error, Result};

/// Height of a crossing plateau above and below the diagram plane.
const DELTA: f64 = 1.0 / 32.0;

/// Corner ports in index order.
const NW: usize = 0;
const NE: usize = 1;
const SW: usize = 2;
const SE: usize = 3;

fn port_coord(p: usize) -> Vec3 {
    match p {
        NW => v3(-1.0, 1.0, 0.0),
        NE => v3(1.0, 1.0, 0.0),
        SW => v3(-1.0, -1.0, 0.0),
        SE => v3(1.0, -1.0, 0.0),
        _ => unreachable!("port index"),
    }
}

/// Which corners the two strands of a tangle pair up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// NW-NE and SW-SE.
    Horizontal,
    /// NW-SW and NE-SE.
    Vertical,
    /// NW-SE and NE-SW.
    Crossed,
}

/// A two-strand tangle under construction. Strand endpoints sit exactly
/// on the four corner ports; everything else stays strictly inside the
/// open box except where construction placed it on an edge.
#[derive(Debug, Clone)]
pub struct Tangle {
    strands: [Vec<Vec3>; 2],
    crossings: usize,
}

fn key(v: Vec3) -> (u64, u64, u64) {
    // Canonicalize -0.0 so negation-symmetric points share a key.
    let c = |x: f64| (x + 0.0).to_bits();
    (c(v.x), c(v.y), c(v.z))
}

impl Tangle {
    /// The crossingless horizontal tangle: NW-NE over the top half,
    /// SW-SE under the bottom half.
    pub fn zero() -> Tangle {
        Tangle {
            strands: [
                vec![port_coord(NW), v3(-0.5, 0.5, 0.0), v3(0.5, 0.5, 0.0), port_coord(NE)],
                vec![port_coord(SW), v3(-0.5, -0.5, 0.0), v3(0.5, -0.5, 0.0), port_coord(SE)],
            ],
            crossings: 0,
        }
    }

    pub fn crossings(&self) -> usize {
        self.crossings
    }

    /// Strand index and orientation whose endpoint sits at `at`; reverses
    /// the strand if needed so the endpoint comes last.
    fn strand_ending_at(&mut self, at: Vec3) -> usize {
        for s in 0..2 {
            if key(*self.strands[s].last().unwrap()) == key(at) {
                return s;
            }
            if key(self.strands[s][0]) == key(at) {
                self.strands[s].reverse();
                return s;
            }
        }
        unreachable!("no strand endpoint at the requested port");
    }

    fn port_of(&self, s: usize, start: bool) -> usize {
        let v = if start { self.strands[s][0] } else { *self.strands[s].last().unwrap() };
        for p in 0..4 {
            if key(v) == key(port_coord(p)) {
                return p;
            }
        }
        unreachable!("strand endpoint off the corner ports");
    }

    pub fn pairing(&self) -> Pairing {
        let mut mate = [usize::MAX; 4];
        for s in 0..2 {
            let a = self.port_of(s, true);
            let b = self.port_of(s, false);
            mate[a] = b;
            mate[b] = a;
        }
        match mate[NW] {
            p if p == NE => Pairing::Horizontal,
            p if p == SW => Pairing::Vertical,
            p if p == SE => Pairing::Crossed,
            _ => unreachable!("incoherent pairing"),
        }
    }

    /// Quarter turn clockwise: NW -> NE -> SE -> SW -> NW. Projection
    /// handedness survives because z is untouched.
    pub fn rot90(mut self) -> Tangle {
        for s in &mut self.strands {
            for v in s.iter_mut() {
                *v = v3(v.y + 0.0, -v.x + 0.0, v.z);
            }
        }
        self
    }

    /// Squeeze the tangle into the upper half of the box and add one
    /// crossing between the two bottom ports. `sign > 0` sends the strand
    /// leaving the old SW port over the other one.
    pub fn bottom_twist(mut self, sign: i8) -> Tangle {
        for s in &mut self.strands {
            for v in s.iter_mut() {
                *v = v3(v.x, (v.y + 1.0) / 2.0, v.z);
            }
        }
        let za = if sign > 0 { DELTA } else { -DELTA };
        let zb = -za;
        let old_sw = v3(-1.0, 0.0, 0.0);
        let old_se = v3(1.0, 0.0, 0.0);
        let a = self.strand_ending_at(old_sw);
        self.strands[a].extend([
            v3(-0.5, -0.25, za),
            v3(0.5, -0.75, za),
            port_coord(SE),
        ]);
        let b = self.strand_ending_at(old_se);
        self.strands[b].extend([
            v3(0.5, -0.25, zb),
            v3(-0.5, -0.75, zb),
            port_coord(SW),
        ]);
        self.crossings += 1;
        self
    }

    /// Tangle sum: `self` squeezed into [-1,-1/2], `other` into [0,1],
    /// joined by horizontal connectors along y = 1 and y = -1. The gap
    /// between the halves is where the mutation plane cuts.
    pub fn sum(self, other: Tangle) -> Result<Tangle> {
        let map_a = |v: Vec3| v3((v.x - 3.0) / 4.0, v.y, v.z);
        let map_b = |v: Vec3| v3((v.x + 1.0) / 2.0, v.y, v.z);
        let mut fragments: Vec<Vec<Vec3>> = Vec::with_capacity(4);
        for s in &self.strands {
            fragments.push(s.iter().map(|&v| map_a(v)).collect());
        }
        for s in &other.strands {
            fragments.push(s.iter().map(|&v| map_b(v)).collect());
        }
        // Joint coordinates: a's right ports meet b's left ports through
        // unit-length connectors.
        let joints: [(Vec3, Vec3); 2] = [
            (v3(-0.5, 1.0, 0.0), v3(0.0, 1.0, 0.0)),
            (v3(-0.5, -1.0, 0.0), v3(0.0, -1.0, 0.0)),
        ];
        let mut link: HashMap<(u64, u64, u64), Vec3> = HashMap::new();
        for (l, r) in joints {
            link.insert(key(l), r);
            link.insert(key(r), l);
        }
        let outer: Vec<(u64, u64, u64)> = (0..4).map(|p| key(port_coord(p))).collect();
        let mut used = [false; 4];
        let mut strands: Vec<Vec<Vec3>> = Vec::new();
        loop {
            // Open a new strand at an unused fragment whose end is an
            // outer port.
            let seed = (0..4).find(|&f| {
                !used[f]
                    && (outer.contains(&key(fragments[f][0]))
                        || outer.contains(&key(*fragments[f].last().unwrap())))
            });
            let Some(f0) = seed else { break };
            used[f0] = true;
            let mut path = fragments[f0].clone();
            if !outer.contains(&key(path[0])) {
                path.reverse();
            }
            loop {
                let end = *path.last().unwrap();
                if outer.contains(&key(end)) {
                    break;
                }
                let far = *link
                    .get(&key(end))
                    .ok_or_else(|| Error::Internal("tangle sum lost a strand end".to_string()))?;
                let next = (0..4).find(|&f| {
                    !used[f]
                        && (key(fragments[f][0]) == key(far)
                            || key(*fragments[f].last().unwrap()) == key(far))
                });
                let Some(nf) = next else {
                    return Err(Error::Internal("tangle sum lost a fragment".to_string()));
                };
                used[nf] = true;
                let mut frag = fragments[nf].clone();
                if key(frag[0]) != key(far) {
                    frag.reverse();
                }
                path.extend(frag);
            }
            strands.push(path);
        }
        if used.iter().any(|&u| !u) || strands.len() != 2 {
            return Err(Error::InvalidParameter(
                "tangle sum closes a free loop".to_string(),
            ));
        }
        let mut it = strands.into_iter();
        Ok(Tangle {
            strands: [it.next().unwrap(), it.next().unwrap()],
            crossings: self.crossings + other.crossings,
        })
    }

    /// Close top ports together and bottom ports together, routing both
    /// closure arcs around the outside of the box. Rejects the horizontal
    /// pairing, whose closure is a two-component link.
    pub fn numerator(&self, label: &str) -> Result<PolyCurve> {
        if self.pairing() == Pairing::Horizontal {
            return Err(Error::InvalidParameter(format!(
                "{label}: closure of a horizontal tangle is a link, not a knot"
            )));
        }
        // Waypoints strictly between the ports they connect.
        let top: Vec<Vec3> = vec![
            v3(1.25, 1.0, 0.0),
            v3(1.25, 1.5, 0.0),
            v3(-1.25, 1.5, 0.0),
            v3(-1.25, 1.0, 0.0),
        ];
        let bottom: Vec<Vec3> = top.iter().map(|v| v3(v.x, -v.y, v.z)).collect();
        let mut verts: Vec<Vec3> = Vec::new();
        let mut t = self.clone();
        let s0 = t.strand_ending_at(port_coord(NE));
        verts.extend(t.strands[s0].iter());
        verts.extend(top.iter());
        // The arc lands on NW; continue along the other strand.
        let s1 = 1 - s0;
        if key(t.strands[s1][0]) != key(port_coord(NW)) {
            t.strands[s1].reverse();
        }
        if key(t.strands[s1][0]) != key(port_coord(NW)) {
            return Err(Error::Internal(format!("{label}: strand missing the NW port")));
        }
        verts.extend(t.strands[s1].iter());
        // The second strand ends at SE or SW; route the bottom arc from
        // SE to SW, so a strand ending at SW walks the arc backwards.
        let end = t.port_of(s1, false);
        match end {
            p if p == SE => verts.extend(bottom.iter()),
            p if p == SW => verts.extend(bottom.iter().rev()),
            _ => return Err(Error::Internal(format!("{label}: strand missing a bottom port"))),
        }
        // The walk returns to the first strand's start; the cycle closes
        // there. Verify instead of trusting the pairing table.
        let back = if end == SE { port_coord(SW) } else { port_coord(SE) };
        if key(t.strands[s0][0]) != key(back) {
            return Err(Error::Internal(format!("{label}: closure does not return to start")));
        }
        PolyCurve::new(tidy_cycle(verts), true, label)
    }
}

/// Drop exact duplicates and exactly-collinear interior vertices from a
/// closed vertex cycle.
fn tidy_cycle(verts: Vec<Vec3>) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::with_capacity(verts.len());
    for v in verts {
        if out.last().map(|&l| key(l) == key(v)) != Some(true) {
            out.push(v);
        }
    }
    while out.len() > 1 && key(out[0]) == key(*out.last().unwrap()) {
        out.pop();
    }
    let mut i = 0;
    while i < out.len() && out.len() > 3 {
        let n = out.len();
        let a = out[(i + n - 1) % n];
        let b = out[i];
        let c = out[(i + 1) % n];
        let ab = b - a;
        let bc = c - b;
        if ab.cross(bc).norm() == 0.0 && ab.dot(bc) > 0.0 {
            out.remove(i);
            // Recheck the same index: its neighborhood changed.
            if i > 0 {
                i -= 1;
            }
        } else {
            i += 1;
        }
    }
    out
}

// ---- Recipes ----

/// Construction plan for a tangle; the bundled fixtures freeze these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recipe {
    Zero,
    Rot(Box<Recipe>),
    /// `count` bottom twists of one handedness.
    Twist(Box<Recipe>, i8, u8),
    Sum(Box<Recipe>, Box<Recipe>),
}

impl Recipe {
    pub fn build(&self) -> Result<Tangle> {
        match self {
            Recipe::Zero => Ok(Tangle::zero()),
            Recipe::Rot(r) => Ok(r.build()?.rot90()),
            Recipe::Twist(r, sign, count) => {
                let mut t = r.build()?;
                for _ in 0..*count {
                    t = t.bottom_twist(*sign);
                }
                Ok(t)
            }
            Recipe::Sum(a, b) => a.build()?.sum(b.build()?),
        }
    }
}

pub fn rot(r: Recipe) -> Recipe {
    Recipe::Rot(Box::new(r))
}

pub fn twist(r: Recipe, sign: i8, count: u8) -> Recipe {
    Recipe::Twist(Box::new(r), sign, count)
}

pub fn tangle_sum(a: Recipe, b: Recipe) -> Recipe {
    Recipe::Sum(Box::new(a), Box::new(b))
}

/// Alternating-rotation twist composition: quarter turn, then a signed
/// chain of bottom twists, repeated. Twisting only makes genuine
/// crossings when the bottom ports belong to different strands, so a
/// chain whose quarter turn lands on the horizontal pairing rotates a
/// second time.
pub fn rational(chains: &[i8]) -> Recipe {
    let mut r = Recipe::Zero;
    let mut p = Pairing::Horizontal;
    for &c in chains {
        r = rot(r);
        p = match p {
            Pairing::Horizontal => Pairing::Vertical,
            Pairing::Vertical => Pairing::Horizontal,
            Pairing::Crossed => Pairing::Crossed,
        };
        if p == Pairing::Horizontal {
            r = rot(r);
            p = Pairing::Vertical;
        }
        let sign = if c < 0 { -1 } else { 1 };
        let count = c.unsigned_abs();
        r = twist(r, sign, count);
        if count % 2 == 1 {
            p = match p {
                Pairing::Vertical => Pairing::Crossed,
                Pairing::Crossed => Pairing::Vertical,
                Pairing::Horizontal => Pairing::Horizontal,
            };
        }
    }
    r
}

// ---- Mutation ----

/// The plane a top-level tangle sum leaves free between its halves.
pub const MUTATION_PLANE: f64 = -0.25;

/// Mutant partner: cut along the plane x = `xm`, rotate the left piece a
/// half turn about the x-axis, and restitch. The plane must meet the
/// curve in exactly four points arranged symmetrically under that
/// rotation; curves built by `numerator` of a top-level `sum` satisfy
/// this at [`MUTATION_PLANE`].
pub fn mutant_partner(k: &PolyCurve, xm: f64, label: &str) -> Result<PolyCurve> {
    if !k.is_closed() {
        return Err(Error::InvalidParameter(format!(
            "{label}: mutation needs a closed curve"
        )));
    }
    // Insert explicit vertices where edges cross the plane.
    let vs = k.vertices();
    let n = vs.len();
    let mut cycle: Vec<Vec3> = Vec::with_capacity(n + 4);
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        cycle.push(a);
        let (da, db) = (a.x - xm, b.x - xm);
        if da == 0.0 || db == 0.0 {
            continue;
        }
        if (da < 0.0) != (db < 0.0) {
            let t = da / (a.x - b.x);
            let w = a + (b - a) * t;
            cycle.push(v3(xm, w.y + 0.0, w.z + 0.0));
        }
    }
    // Rotate the cycle to begin at an interface vertex, then cut into
    // alternating paths between interface vertices.
    let start = cycle
        .iter()
        .position(|v| v.x == xm)
        .ok_or_else(|| Error::InvalidParameter(format!("{label}: plane misses the curve")))?;
    cycle.rotate_left(start);
    let mut paths: Vec<Vec<Vec3>> = Vec::new();
    let mut current: Vec<Vec3> = vec![cycle[0]];
    for &v in cycle.iter().skip(1).chain([cycle[0]].iter()) {
        current.push(v);
        if v.x == xm {
            paths.push(std::mem::take(&mut current));
            current.push(v);
        }
    }
    let boundary: Vec<Vec3> = paths.iter().map(|p| p[0]).collect();
    if boundary.len() != 4 {
        return Err(Error::InvalidParameter(format!(
            "{label}: plane meets the curve in {} points, mutation needs 4",
            boundary.len()
        )));
    }
    let rho = |v: Vec3| v3(v.x + 0.0, -v.y + 0.0, -v.z + 0.0);
    for b in &boundary {
        if !boundary.iter().any(|c| key(*c) == key(rho(*b))) {
            return Err(Error::InvalidParameter(format!(
                "{label}: interface points are not symmetric under the half turn"
            )));
        }
    }
    // Classify each path by side and rotate the left ones.
    let mut pieces: Vec<Vec<Vec3>> = Vec::with_capacity(4);
    for p in &paths {
        let interior = &p[1..p.len() - 1];
        let left = interior.iter().all(|v| v.x < xm);
        let right = interior.iter().all(|v| v.x > xm);
        if interior.is_empty() || (!left && !right) {
            return Err(Error::InvalidParameter(format!(
                "{label}: a path touches the plane away from the interface"
            )));
        }
        if left {
            pieces.push(p.iter().map(|&v| rho(v)).collect());
        } else {
            pieces.push(p.clone());
        }
    }
    // Restitch by endpoint coordinates: each interface point now ends
    // exactly one left piece and one right piece.
    let mut used = [false; 4];
    let mut verts: Vec<Vec3> = Vec::new();
    used[0] = true;
    verts.extend(pieces[0].iter());
    for _ in 0..3 {
        let end = *verts.last().unwrap();
        let next = (0..4).find(|&i| {
            !used[i]
                && (key(pieces[i][0]) == key(end)
                    || key(*pieces[i].last().unwrap()) == key(end))
        });
        let Some(i) = next else {
            return Err(Error::InvalidParameter(format!(
                "{label}: mutation split the curve into several loops"
            )));
        };
        used[i] = true;
        let mut piece = pieces[i].clone();
        if key(piece[0]) != key(end) {
            piece.reverse();
        }
        verts.extend(piece[1..].iter());
    }
    let first = verts[0];
    if key(*verts.last().unwrap()) != key(first) {
        return Err(Error::Internal(format!("{label}: mutation failed to close the cycle")));
    }
    verts.pop();
    PolyCurve::new(tidy_cycle(verts), true, label)
}

// ---- Bundled fixtures ----

pub const NAMES: [&str; 5] = ["3_1", "4_1", "5_2", "kt", "conway"];

/// Figure-eight knot: alternating twist-and-turn word found by the
/// recorded search, certified by its Alexander polynomial in the tests.
fn recipe_4_1() -> Recipe {
    rot(twist(rot(twist(rot(twist(rot(Recipe::Zero), 1, 1)), -1, 1)), 1, 2))
}

/// 5_2 twist knot: same word with one more twist in the last chain.
fn recipe_5_2() -> Recipe {
    rot(twist(rot(twist(rot(twist(rot(Recipe::Zero), 1, 1)), -1, 1)), 1, 3))
}

/// Left half of the bundled mutant pair: a clasp sum with an extra
/// half-twist chain. Found by the recorded search over small tangle
/// sums; certified by the invariant battery in the tests.
fn recipe_mutant_left() -> Recipe {
    tangle_sum(rot(twist(Recipe::Zero, 1, 3)), rot(twist(Recipe::Zero, -1, 2)))
}

/// Right half of the bundled mutant pair.
fn recipe_mutant_right() -> Recipe {
    twist(rot(twist(Recipe::Zero, 1, 2)), 1, 2)
}

/// Closure of the two halves; one of the bundled mutant knots.
fn mutant_base(label: &str) -> Result<PolyCurve> {
    tangle_sum(recipe_mutant_left(), recipe_mutant_right())
        .build()?
        .numerator(label)
}

/// Generate a bundled fixture from its construction plan.
pub fn generate(name: &str) -> Result<PolyCurve> {
    match name {
        "3_1" => {
            let mut k = kspec_core::curve::torus_knot(2, 3, 32)?;
            k.set_label("3_1");
            Ok(k)
        }
        "4_1" => recipe_4_1().build()?.numerator("4_1"),
        "5_2" => recipe_5_2().build()?.numerator("5_2"),
        "kt" => mutant_base("kt"),
        "conway" => mutant_partner(&mutant_base("kt")?, MUTATION_PLANE, "conway"),
        other => Err(Error::InvalidParameter(format!("unknown bundled curve {other:?}"))),
    }
}

fn embedded_text(name: &str) -> Option<&'static str> {
    match name {
        "3_1" => Some(include_str!("../data/3_1.txt")),
        "4_1" => Some(include_str!("../data/4_1.txt")),
        "5_2" => Some(include_str!("../data/5_2.txt")),
        "kt" => Some(include_str!("../data/kt.txt")),
        "conway" => Some(include_str!("../data/conway.txt")),
        _ => None,
    }
}

/// Load a bundled curve: an explicit data directory wins, then the
/// `KSPEC_DATA_DIR` environment variable, then the embedded copies.
pub fn named_curve(name: &str, data_dir: Option<&Path>) -> Result<PolyCurve> {
    let from_dir = |dir: &Path| -> Option<Result<PolyCurve>> {
        let path = dir.join(format!("{name}.txt"));
        path.exists().then(|| crate::formats::load_curve(&path))
    };
    if let Some(dir) = data_dir {
        if let Some(r) = from_dir(dir) {
            return r;
        }
        return Err(Error::Parse(format!(
            "no {name}.txt under {}",
            dir.display()
        )));
    }
    if let Ok(dir) = std::env::var("KSPEC_DATA_DIR") {
        if let Some(r) = from_dir(Path::new(&dir)) {
            return r;
        }
        return Err(Error::Parse(format!("no {name}.txt under {dir}")));
    }
    match embedded_text(name) {
        Some(text) => crate::formats::parse_curve(text, name),
        None => Err(Error::InvalidParameter(format!("unknown bundled curve {name:?}"))),
    }
}


#[cfg(test)]
mod probe {
    use super::*;
    use kspec_core::projection::project;
    use kspec_core::diagram::Diagram;

    #[test]
    #[ignore]
    fn probe_failing_vector() {
        for v in [vec![2i8, 1], vec![2, 2], vec![1, 1, 1], vec![2, -2]] {
            let r = rational(&v);
            let t = match r.build() {
                Ok(t) => t,
                Err(e) => { println!("{v:?}: tangle build: {e:?}"); continue; }
            };
            let k = match t.numerator("probe") {
                Ok(k) => k,
                Err(e) => { println!("{v:?}: numerator: {e:?}"); continue; }
            };
            let sh = match project(&k, v3(0.0, 0.0, 1.0)) {
                Ok(s) => s,
                Err(e) => { println!("{v:?}: projection: {e:?}"); continue; }
            };
            match Diagram::from_shadow(&sh) {
                Ok(d) => println!("{v:?}: ok, {} crossings", d.crossing_count()),
                Err(e) => println!("{v:?}: from_shadow: {e:?}"),
            }
        }
    }
}

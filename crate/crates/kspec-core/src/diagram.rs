//! Knotoid and knot diagrams as combinatorial maps.
//!
//! A diagram is stored as a set of darts (arc ends) glued to sites: crossing
//! ports or the two endpoints of an open strand. Ports 0..3 run
//! counterclockwise around a crossing, the strand passes straight through on
//! the two diagonals (0,2) and (1,3), and `over_diag` names the diagonal that
//! carries the over strand. Crossing-free closed loop components carry no
//! darts and are counted in `free_loops`.
//!
//! Crossing signs are not stored: they are recovered from the rotation
//! system and strand orientation, which keeps the invariant "sign data
//! matches the embedding" true by construction. Realizability of input codes
//! reduces to the Euler check V - E + F = 2 on the traced faces.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::projection::Shadow;
use crate::{Error, Result};

pub type DartId = usize;
pub type CrossId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    /// Attached at a crossing port (0..3, counterclockwise).
    Cross(CrossId, u8),
    /// First endpoint of an open strand (the strand is oriented leg to head).
    Leg,
    /// Terminal endpoint of an open strand.
    Head,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    pub ports: [DartId; 4],
    /// 0 when the pass through ports (0,2) is over, 1 for ports (1,3).
    pub over_diag: u8,
}

/// One passage of the strand through a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Passage {
    pub crossing: CrossId,
    pub over: bool,
    pub entry_port: u8,
}

/// Parsed code token: one passage with its claimed sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeEvent {
    pub id: usize,
    pub over: bool,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    pub(crate) sites: Vec<Site>,
    pub(crate) twin: Vec<DartId>,
    pub(crate) crossings: Vec<Crossing>,
    pub(crate) closed: bool,
    pub(crate) free_loops: usize,
}

/// Face structure from orbit tracing.
#[derive(Debug, Clone)]
pub struct Faces {
    /// Dart to face id; ids numbered by smallest member dart.
    pub face_of: Vec<usize>,
    pub count: usize,
}

impl Diagram {
    /// Open diagram with no crossings: a single leg-to-head arc.
    pub fn empty_open() -> Diagram {
        Diagram {
            sites: alloc::vec![Site::Leg, Site::Head],
            twin: alloc::vec![1, 0],
            crossings: Vec::new(),
            closed: false,
            free_loops: 0,
        }
    }

    /// Closed crossing-free loop.
    pub fn unknot_loop() -> Diagram {
        Diagram {
            sites: Vec::new(),
            twin: Vec::new(),
            crossings: Vec::new(),
            closed: true,
            free_loops: 1,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn arc_count(&self) -> usize {
        self.twin.len() / 2
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn add_free_loop(&mut self) {
        self.free_loops += 1;
    }

    /// Swap over and under strands everywhere (mirror diagram).
    pub fn mirror(&self) -> Diagram {
        let mut out = self.clone();
        for c in &mut out.crossings {
            c.over_diag ^= 1;
        }
        out
    }

    // ---- Construction ----

    /// Build from an ordered passage list with claimed signs.
    ///
    /// Ids must be 0-based and appear exactly twice, once over and once
    /// under, with a consistent sign. The claimed signs fix the rotation at
    /// each crossing; the Euler check then rejects codes with no planar
    /// realization.
    pub fn from_events(closed: bool, events: &[CodeEvent]) -> Result<Diagram> {
        let m = events.len() / 2;
        if events.len() % 2 != 0 {
            return Err(Error::Parse(format!("odd number of passages")));
        }
        if closed && m == 0 {
            return Err(Error::Parse(format!(
                "closed diagram needs at least one crossing; use the free-loop form"
            )));
        }
        let mut seen: BTreeMap<usize, (bool, i8)> = BTreeMap::new();
        for ev in events {
            if ev.id >= m {
                return Err(Error::Parse(format!("crossing id {} out of range", ev.id)));
            }
            if ev.sign != 1 && ev.sign != -1 {
                return Err(Error::Parse(format!("sign must be +1 or -1")));
            }
            match seen.get(&ev.id) {
                None => {
                    seen.insert(ev.id, (ev.over, ev.sign));
                }
                Some(&(over0, sign0)) => {
                    if over0 == ev.over {
                        return Err(Error::Parse(format!(
                            "crossing {} passed twice on the same level",
                            ev.id
                        )));
                    }
                    if sign0 != ev.sign {
                        return Err(Error::Parse(format!(
                            "crossing {} has conflicting signs",
                            ev.id
                        )));
                    }
                }
            }
        }
        if seen.len() != m {
            return Err(Error::Parse(format!("crossing ids must cover 0..{m}")));
        }

        // Entry port per passage; over enters 0, under enters 1 (positive) or
        // 3 (negative); exits are diagonal.
        let entry = |ev: &CodeEvent| -> u8 {
            if ev.over {
                0
            } else if ev.sign > 0 {
                1
            } else {
                3
            }
        };

        let n_arcs = if closed { 2 * m } else { 2 * m + 1 };
        let n_darts = 2 * n_arcs;
        let mut sites: Vec<Option<Site>> = alloc::vec![None; n_darts];
        let mut twin: Vec<DartId> = alloc::vec![usize::MAX; n_darts];
        for k in 0..n_arcs {
            twin[2 * k] = 2 * k + 1;
            twin[2 * k + 1] = 2 * k;
        }
        let mut ports: Vec<[Option<DartId>; 4]> = alloc::vec![[None; 4]; m];

        let mut attach = |dart: DartId, c: usize, p: u8, sites: &mut Vec<Option<Site>>| -> Result<()> {
            if ports[c][p as usize].is_some() {
                return Err(Error::Parse(format!("port {p} of crossing {c} claimed twice")));
            }
            ports[c][p as usize] = Some(dart);
            sites[dart] = Some(Site::Cross(c, p));
            Ok(())
        };

        if closed {
            // Arc e runs from the exit of event e to the entry of event e+1.
            for (e, ev) in events.iter().enumerate() {
                let p_in = entry(ev);
                let p_out = (p_in + 2) % 4;
                attach(2 * e, ev.id, p_out, &mut sites)?;
                let prev_arc = (e + events.len() - 1) % events.len();
                attach(2 * prev_arc + 1, ev.id, p_in, &mut sites)?;
            }
        } else {
            sites[0] = Some(Site::Leg);
            for (e, ev) in events.iter().enumerate() {
                let p_in = entry(ev);
                let p_out = (p_in + 2) % 4;
                attach(2 * e + 1, ev.id, p_in, &mut sites)?;
                attach(2 * (e + 1), ev.id, p_out, &mut sites)?;
            }
            sites[n_darts - 1] = Some(Site::Head);
        }

        let sites: Vec<Site> = sites
            .into_iter()
            .map(|s| s.ok_or_else(|| Error::Internal(format!("unattached dart"))))
            .collect::<Result<_>>()?;
        let crossings: Vec<Crossing> = ports
            .into_iter()
            .map(|p| {
                Ok(Crossing {
                    ports: [
                        p[0].ok_or_else(|| Error::Parse(format!("open port")))?,
                        p[1].ok_or_else(|| Error::Parse(format!("open port")))?,
                        p[2].ok_or_else(|| Error::Parse(format!("open port")))?,
                        p[3].ok_or_else(|| Error::Parse(format!("open port")))?,
                    ],
                    over_diag: 0,
                })
            })
            .collect::<Result<_>>()?;

        let d = Diagram {
            sites,
            twin,
            crossings,
            closed,
            free_loops: 0,
        };
        d.check()?;
        Ok(d)
    }

    /// Build from a projected shadow.
    pub fn from_shadow(shadow: &Shadow) -> Result<Diagram> {
        let events: Vec<CodeEvent> = shadow
            .events
            .iter()
            .map(|ev| CodeEvent {
                id: ev.crossing,
                over: ev.over,
                sign: shadow.crossings[ev.crossing].sign,
            })
            .collect();
        if shadow.closed && events.is_empty() {
            return Ok(Diagram::unknot_loop());
        }
        let d = Diagram::from_events(shadow.closed, &events)?;
        // Geometric signs must agree with map-derived signs.
        let derived = d.signs()?;
        for (cid, c) in shadow.crossings.iter().enumerate() {
            if derived[cid] != c.sign {
                return Err(Error::Internal(format!(
                    "sign mismatch at crossing {cid}: shadow {} vs map {}",
                    c.sign, derived[cid]
                )));
            }
        }
        Ok(d)
    }

    // ---- Traversal ----

    pub(crate) fn leg_dart(&self) -> Option<DartId> {
        self.sites.iter().position(|s| *s == Site::Leg)
    }

    pub(crate) fn head_dart(&self) -> Option<DartId> {
        self.sites.iter().position(|s| *s == Site::Head)
    }

    /// Strand passages in order. Open diagrams walk leg to head; closed ones
    /// start at the lowest dart. Errors if the strand fails to cover the
    /// whole diagram (more than one component).
    pub fn traversal(&self) -> Result<Vec<Passage>> {
        if self.twin.is_empty() {
            return Ok(Vec::new());
        }
        let start = if self.closed {
            0
        } else {
            self.leg_dart()
                .ok_or_else(|| Error::Internal(format!("open diagram without a leg")))?
        };
        let mut out = Vec::with_capacity(2 * self.crossings.len());
        let mut cur = start;
        let mut arcs_walked = 0usize;
        loop {
            let e = self.twin[cur];
            arcs_walked += 1;
            if arcs_walked > self.arc_count() {
                return Err(Error::Internal(format!("strand walk does not terminate")));
            }
            match self.sites[e] {
                Site::Cross(c, p) => {
                    out.push(Passage {
                        crossing: c,
                        over: (p & 1) == self.crossings[c].over_diag,
                        entry_port: p,
                    });
                    cur = self.crossings[c].ports[((p + 2) % 4) as usize];
                    if self.closed && cur == start {
                        break;
                    }
                }
                Site::Head => break,
                Site::Leg => {
                    return Err(Error::Internal(format!("strand ran into the leg")));
                }
            }
        }
        if arcs_walked != self.arc_count() {
            return Err(Error::Internal(format!(
                "strand covers {arcs_walked} of {} arcs: extra components",
                self.arc_count()
            )));
        }
        Ok(out)
    }

    /// Crossing signs recovered from rotation and orientation.
    pub fn signs(&self) -> Result<Vec<i8>> {
        let trav = self.traversal()?;
        let mut entries: Vec<[Option<u8>; 2]> = alloc::vec![[None; 2]; self.crossings.len()];
        for p in &trav {
            entries[p.crossing][p.over as usize] = Some(p.entry_port);
        }
        let mut out = Vec::with_capacity(self.crossings.len());
        for (c, e) in entries.iter().enumerate() {
            let (pu, po) = match (e[0], e[1]) {
                (Some(u), Some(o)) => (u, o),
                _ => {
                    return Err(Error::Internal(format!("crossing {c} not visited on both levels")))
                }
            };
            if (po + 1) % 4 == pu {
                out.push(1);
            } else if (po + 3) % 4 == pu {
                out.push(-1);
            } else {
                return Err(Error::Internal(format!(
                    "crossing {c} entry ports {po},{pu} not transversal"
                )));
            }
        }
        Ok(out)
    }

    pub fn writhe(&self) -> Result<i64> {
        Ok(self.signs()?.iter().map(|&s| s as i64).sum())
    }

    // ---- Faces ----

    /// Next dart counterclockwise around the face to the left of `d`.
    pub(crate) fn face_next(&self, d: DartId) -> DartId {
        let e = self.twin[d];
        match self.sites[e] {
            Site::Cross(c, p) => self.crossings[c].ports[((p + 3) % 4) as usize],
            // The walk pivots around an endpoint: faces never cross the slit.
            Site::Leg | Site::Head => e,
        }
    }

    /// Face boundary orbits in walk order, each starting at its smallest
    /// dart, listed by that starter.
    pub(crate) fn orbits(&self) -> Vec<Vec<DartId>> {
        let n = self.twin.len();
        let mut seen = alloc::vec![false; n];
        let mut out = Vec::new();
        for d0 in 0..n {
            if seen[d0] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut d = d0;
            loop {
                seen[d] = true;
                orbit.push(d);
                d = self.face_next(d);
                if d == d0 {
                    break;
                }
            }
            out.push(orbit);
        }
        out
    }

    /// Whether the pass carrying dart `d` goes over its crossing; None at
    /// endpoints.
    pub(crate) fn pass_over(&self, d: DartId) -> Option<bool> {
        match self.sites[d] {
            Site::Cross(c, p) => Some((p & 1) == self.crossings[c].over_diag),
            _ => None,
        }
    }

    /// Canonical arc representative: the smaller of a dart and its twin.
    pub(crate) fn arc_rep(&self, d: DartId) -> DartId {
        core::cmp::min(d, self.twin[d])
    }

    pub fn faces(&self) -> Faces {
        let n = self.twin.len();
        let mut face_of = alloc::vec![usize::MAX; n];
        let mut count = 0;
        for d0 in 0..n {
            if face_of[d0] != usize::MAX {
                continue;
            }
            let mut d = d0;
            loop {
                face_of[d] = count;
                d = self.face_next(d);
                if d == d0 {
                    break;
                }
            }
            count += 1;
        }
        Faces { face_of, count }
    }

    /// Face enclosing the leg (open diagrams).
    pub fn leg_face(&self, faces: &Faces) -> Result<usize> {
        let d = self
            .leg_dart()
            .ok_or_else(|| Error::Internal(format!("no leg endpoint")))?;
        Ok(faces.face_of[d])
    }

    /// Face enclosing the head (open diagrams).
    pub fn head_face(&self, faces: &Faces) -> Result<usize> {
        let d = self
            .head_dart()
            .ok_or_else(|| Error::Internal(format!("no head endpoint")))?;
        Ok(faces.face_of[d])
    }

    /// Fewest strand arcs a head-to-leg connection must cross in this
    /// diagram: breadth-first distance between the end faces in the dual.
    pub fn height(&self) -> Result<u32> {
        if self.closed {
            return Err(Error::InvalidParameter(format!(
                "height is defined for open diagrams"
            )));
        }
        let faces = self.faces();
        let (path, _) = self.dual_path(&faces)?;
        Ok(path.len() as u32)
    }

    /// Shortest dual path from the head face to the leg face.
    ///
    /// Returns the arcs crossed, in order, each as the dart whose left face
    /// the connection enters it from; deterministic under ties (smallest
    /// face, then smallest dart).
    pub(crate) fn dual_path(&self, faces: &Faces) -> Result<(Vec<DartId>, Vec<usize>)> {
        let from = self.head_face(faces)?;
        let to = self.leg_face(faces)?;
        // Arc d/twin joins the faces on its two sides.
        let mut adj: BTreeMap<usize, Vec<(usize, DartId)>> = BTreeMap::new();
        for d in 0..self.twin.len() {
            let t = self.twin[d];
            if d < t {
                let (f, g) = (faces.face_of[d], faces.face_of[t]);
                if f != g {
                    // Crossing the arc from side f enters via dart d.
                    adj.entry(f).or_default().push((g, d));
                    adj.entry(g).or_default().push((f, t));
                }
            }
        }
        for v in adj.values_mut() {
            v.sort();
        }
        let mut dist: BTreeMap<usize, u32> = BTreeMap::new();
        let mut prev: BTreeMap<usize, (usize, DartId)> = BTreeMap::new();
        dist.insert(from, 0);
        let mut frontier = alloc::vec![from];
        while !frontier.is_empty() && !dist.contains_key(&to) {
            let mut next_frontier = Vec::new();
            for &f in &frontier {
                let df = dist[&f];
                if let Some(nbrs) = adj.get(&f) {
                    for &(g, d) in nbrs {
                        if let alloc::collections::btree_map::Entry::Vacant(e) = dist.entry(g) {
                            e.insert(df + 1);
                            prev.insert(g, (f, d));
                            next_frontier.push(g);
                        }
                    }
                }
            }
            frontier = next_frontier;
        }
        if !dist.contains_key(&to) {
            return Err(Error::Internal(format!("end faces not connected in the dual")));
        }
        let mut arcs = Vec::new();
        let mut face_seq = alloc::vec![to];
        let mut f = to;
        while f != from {
            let (g, d) = prev[&f];
            arcs.push(d);
            face_seq.push(g);
            f = g;
        }
        arcs.reverse();
        face_seq.reverse();
        Ok((arcs, face_seq))
    }

    // ---- Codes ----

    /// Canonical signed code.
    ///
    /// Grammar: `k:` or `c:`, then one token `O<id><+|->` or `U<id><+|->`
    /// per passage (ids 1-based, numbered by first visit), then `|L<n>` when
    /// crossing-free loops are present. Closed diagrams minimize over start
    /// and direction, so the code is a class function of the map.
    pub fn code(&self) -> String {
        let trav = match self.traversal() {
            Ok(t) => t,
            Err(_) => return String::from("<invalid>"),
        };
        let signs = match self.signs() {
            Ok(s) => s,
            Err(_) => return String::from("<invalid>"),
        };
        let seq: Vec<(CrossId, bool)> = trav.iter().map(|p| (p.crossing, p.over)).collect();
        let body = if self.closed {
            let mut best: Option<String> = None;
            for dir in 0..2 {
                let s: Vec<(CrossId, bool)> = if dir == 0 {
                    seq.clone()
                } else {
                    seq.iter().rev().copied().collect()
                };
                for rot in 0..s.len().max(1) {
                    let rotated: Vec<(CrossId, bool)> =
                        s[rot..].iter().chain(s[..rot].iter()).copied().collect();
                    let cand = render_tokens(&rotated, &signs);
                    if best.as_ref().map_or(true, |b| cand < *b) {
                        best = Some(cand);
                    }
                }
            }
            best.unwrap_or_default()
        } else {
            render_tokens(&seq, &signs)
        };
        let mut out = String::from(if self.closed { "c:" } else { "k:" });
        out.push_str(&body);
        if self.free_loops > 0 {
            out.push_str(&format!("|L{}", self.free_loops));
        }
        out
    }

    /// Parse a code produced by `code`, or any equivalent signed code.
    pub fn from_code(text: &str) -> Result<Diagram> {
        let text = text.trim();
        let (closed, rest) = if let Some(r) = text.strip_prefix("k:") {
            (false, r)
        } else if let Some(r) = text.strip_prefix("c:") {
            (true, r)
        } else {
            return Err(Error::Parse(format!("code must start with 'k:' or 'c:'")));
        };
        let (body, loops) = match rest.split_once("|L") {
            Some((b, l)) => {
                let n: usize = l
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad loop count {l:?}")))?;
                (b, n)
            }
            None => (rest, 0),
        };
        let mut events: Vec<CodeEvent> = Vec::new();
        let mut ids: BTreeMap<u64, usize> = BTreeMap::new();
        let mut chars = body.chars().peekable();
        while let Some(kind) = chars.next() {
            let over = match kind {
                'O' => true,
                'U' => false,
                'V' => {
                    return Err(Error::Parse(format!(
                        "virtual passages cannot be realized as a diagram"
                    )))
                }
                c => return Err(Error::Parse(format!("unexpected {c:?} in code"))),
            };
            let mut id: u64 = 0;
            let mut got_digit = false;
            while let Some(c) = chars.peek() {
                if let Some(d) = c.to_digit(10) {
                    id = id * 10 + d as u64;
                    got_digit = true;
                    chars.next();
                } else {
                    break;
                }
            }
            if !got_digit {
                return Err(Error::Parse(format!("missing crossing id")));
            }
            let sign = match chars.next() {
                Some('+') => 1,
                Some('-') => -1,
                other => return Err(Error::Parse(format!("missing sign, got {other:?}"))),
            };
            let next = ids.len();
            let idx = *ids.entry(id).or_insert(next);
            events.push(CodeEvent { id: idx, over, sign });
        }
        let mut d = if events.is_empty() {
            if closed {
                if loops == 0 {
                    return Err(Error::Parse(format!(
                        "closed code needs passages or a loop count"
                    )));
                }
                Diagram::unknot_loop()
            } else {
                Diagram::empty_open()
            }
        } else {
            Diagram::from_events(closed, &events)?
        };
        d.free_loops += if d.closed && events.is_empty() {
            loops - 1
        } else {
            loops
        };
        Ok(d)
    }

    // ---- Validation ----

    /// Structural checks plus the sphere condition V - E + F = 2.
    pub fn check(&self) -> Result<()> {
        let n = self.twin.len();
        if self.sites.len() != n {
            return Err(Error::Internal(format!("site and twin tables disagree")));
        }
        if n % 2 != 0 {
            return Err(Error::Internal(format!("odd dart count")));
        }
        for d in 0..n {
            let t = self.twin[d];
            if t >= n || t == d || self.twin[t] != d {
                return Err(Error::Internal(format!("twin table broken at dart {d}")));
            }
        }
        let mut legs = 0;
        let mut heads = 0;
        let mut port_seen: BTreeSet<(CrossId, u8)> = BTreeSet::new();
        for (d, s) in self.sites.iter().enumerate() {
            match *s {
                Site::Cross(c, p) => {
                    if c >= self.crossings.len() || p > 3 {
                        return Err(Error::Internal(format!("dart {d} at bad site")));
                    }
                    if self.crossings[c].ports[p as usize] != d {
                        return Err(Error::Internal(format!(
                            "port table disagrees with dart {d} at crossing {c}"
                        )));
                    }
                    if !port_seen.insert((c, p)) {
                        return Err(Error::Internal(format!("port ({c},{p}) multiply used")));
                    }
                }
                Site::Leg => legs += 1,
                Site::Head => heads += 1,
            }
        }
        if port_seen.len() != 4 * self.crossings.len() {
            return Err(Error::Internal(format!("unfilled crossing port")));
        }
        if self.closed {
            if legs != 0 || heads != 0 {
                return Err(Error::Internal(format!("closed diagram with endpoints")));
            }
            if self.crossings.is_empty() && (n != 0 || self.free_loops == 0) {
                return Err(Error::Internal(format!(
                    "closed diagram without crossings must be free loops"
                )));
            }
        } else if legs != 1 || heads != 1 {
            return Err(Error::Internal(format!(
                "open diagram needs exactly one leg and one head, got {legs}/{heads}"
            )));
        }
        if n == 0 {
            return Ok(());
        }
        // Single strand component, transversal passes, derivable signs.
        self.signs()?;
        // Sphere condition.
        let endpoints = if self.closed { 0 } else { 2 };
        let v = self.crossings.len() + endpoints;
        let e = self.arc_count();
        let f = self.faces().count;
        let chi = v as i64 - e as i64 + f as i64;
        if chi != 2 {
            return Err(Error::Parse(format!(
                "code is not realizable in the plane (Euler characteristic {chi})"
            )));
        }
        Ok(())
    }
}

fn render_tokens(seq: &[(CrossId, bool)], signs: &[i8]) -> String {
    let mut first_visit: BTreeMap<CrossId, usize> = BTreeMap::new();
    for &(c, _) in seq {
        let next = first_visit.len();
        first_visit.entry(c).or_insert(next);
    }
    let mut out = String::new();
    for &(c, over) in seq {
        out.push(if over { 'O' } else { 'U' });
        out.push_str(&format!("{}", first_visit[&c] + 1));
        out.push(if signs[c] > 0 { '+' } else { '-' });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{open_at, torus_knot};
    use crate::geom::v3;
    use crate::projection::project;

    #[test]
    fn empty_diagrams_validate() {
        let d = Diagram::empty_open();
        d.check().unwrap();
        assert_eq!(d.code(), "k:");
        assert_eq!(d.height().unwrap(), 0);
        let u = Diagram::unknot_loop();
        u.check().unwrap();
        assert_eq!(u.code(), "c:|L1");
    }

    #[test]
    fn trefoil_code_roundtrip() {
        // Standard alternating trefoil, all positive.
        let d = Diagram::from_code("c:O1+U2+O3+U1+O2+U3+").unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.writhe().unwrap(), 3);
        let code = d.code();
        let d2 = Diagram::from_code(&code).unwrap();
        assert_eq!(d2.code(), code);
        // Mirror negates signs.
        assert_eq!(d.mirror().writhe().unwrap(), -3);
    }

    #[test]
    fn closed_code_is_rotation_invariant() {
        let a = Diagram::from_code("c:O1+U2+O3+U1+O2+U3+").unwrap();
        let b = Diagram::from_code("c:U1+O2+U3+O1+U2+O3+").unwrap();
        assert_eq!(a.code(), b.code());
    }

    #[test]
    fn unrealizable_code_rejected() {
        // Genus-one signed sequence: no planar diagram.
        let r = Diagram::from_code("c:O1+O2+U1+U2+");
        match r {
            Err(Error::Parse(m)) => assert!(m.contains("realizable")),
            other => panic!("expected realizability rejection, got {other:?}"),
        }
    }

    #[test]
    fn malformed_codes_rejected() {
        assert!(Diagram::from_code("x:O1+U1+").is_err());
        assert!(Diagram::from_code("k:O1+").is_err());
        assert!(Diagram::from_code("k:O1+O1-U1+").is_err());
        assert!(Diagram::from_code("k:O1+U1").is_err());
        assert!(Diagram::from_code("c:V1O1+U1+").is_err());
        // Same level twice.
        assert!(Diagram::from_code("k:O1+O1+").is_err());
    }

    #[test]
    fn open_kink_heights() {
        // One-crossing open kink: endpoints in neighboring faces of a curl.
        let d = Diagram::from_code("k:O1+U1+").unwrap();
        d.check().unwrap();
        assert_eq!(d.crossing_count(), 1);
        // Leg and head sit in the same outer region: the curl is nugatory.
        assert_eq!(d.height().unwrap(), 0);
    }

    #[test]
    fn projected_trefoil_diagram_matches_shadow() {
        let t = torus_knot(2, 3, 62).unwrap();
        let s = project(&t, v3(0.0, 0.0, 1.0)).unwrap();
        let d = Diagram::from_shadow(&s).unwrap();
        d.check().unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.writhe().unwrap().abs(), 3);
        // Faces of a closed 3-crossing diagram: V=3, E=6, F=5.
        assert_eq!(d.faces().count, 5);

        let o = open_at(&t, 0).unwrap();
        let so = project(&o.curve, v3(0.0, 0.0, 1.0)).unwrap();
        let od = Diagram::from_shadow(&so).unwrap();
        od.check().unwrap();
        assert_eq!(od.crossing_count(), 3);
        // Cutting the outer strand of the trefoil shadow leaves a knot-type
        // diagram: both endpoints in the outer face.
        assert_eq!(od.height().unwrap(), 0);
    }

    #[test]
    fn faces_count_euler_for_open_diagrams() {
        let d = Diagram::from_code("k:O1+U1+").unwrap();
        // V = 1 crossing + 2 endpoints, E = 3 arcs, so F = 2 on the sphere.
        assert_eq!(d.faces().count, 2);
    }
}

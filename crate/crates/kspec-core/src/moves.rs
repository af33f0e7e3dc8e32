//! Diagram moves that preserve the knotoid or knot class.
//!
//! Deletions and insertions run through a scratch graph (`Soup`) that allows
//! dangling state mid-surgery and is compacted and re-validated at the end.
//! The slide move rewires ports in place. Every apply ends in a full
//! structural check, so a bad rewiring dies loudly instead of corrupting
//! later invariants.

use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha12Rng;
use rand_core::RngCore;

use crate::diagram::{Crossing, CrossId, DartId, Diagram, Site};
use crate::{Error, Result};

/// One applicable move, addressed by darts of the current diagram. Moves do
/// not survive an apply: re-enumerate on the new diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Move {
    /// Remove the kink whose loop bounds the monogon left of `dart`.
    R1Delete { dart: DartId },
    /// Remove the crossing pair of the bigon bounded by `d1`, `d2`.
    R2Delete { d1: DartId, d2: DartId },
    /// Slide the strand of `dart` across the opposite crossing of its
    /// triangle face.
    R3 { dart: DartId },
    /// Add a kink on the arc of `dart`; `over_first` and `positive` pick
    /// the level of the first passage and the crossing sign.
    R1Insert { dart: DartId, over_first: bool, positive: bool },
    /// Push the arc of `da` across the arc of `db` through their shared
    /// face, the finger passing over or under both new crossings.
    R2Insert { da: DartId, db: DartId, over: bool },
}

// ---- Scratch graph ----

/// Mutable diagram under surgery: darts may be dead (site None) or pending
/// (allocated, site not yet assigned), crossings may be dead.
pub(crate) struct Soup {
    sites: Vec<Option<Site>>,
    twin: Vec<DartId>,
    ports: Vec<[DartId; 4]>,
    over_diag: Vec<Option<u8>>,
    closed: bool,
    free_loops: usize,
}

const UNSET: DartId = usize::MAX;

impl Soup {
    pub(crate) fn of(d: &Diagram) -> Soup {
        Soup {
            sites: d.sites.iter().map(|&s| Some(s)).collect(),
            twin: d.twin.clone(),
            ports: d.crossings.iter().map(|c| c.ports).collect(),
            over_diag: d.crossings.iter().map(|c| Some(c.over_diag)).collect(),
            closed: d.closed,
            free_loops: d.free_loops,
        }
    }

    pub(crate) fn set_closed(&mut self) {
        self.closed = true;
    }

    pub(crate) fn add_free_loop(&mut self) {
        self.free_loops += 1;
    }

    pub(crate) fn new_crossing(&mut self, over_diag: u8) -> CrossId {
        self.ports.push([UNSET; 4]);
        self.over_diag.push(Some(over_diag));
        self.over_diag.len() - 1
    }

    /// Allocate a dart with no site yet; `set_site` must run before finish.
    pub(crate) fn new_dart(&mut self) -> DartId {
        self.sites.push(None);
        self.twin.push(UNSET);
        self.sites.len() - 1
    }

    pub(crate) fn set_site(&mut self, d: DartId, site: Site) {
        if let Some(Site::Cross(c, p)) = self.sites[d] {
            if self.ports[c][p as usize] == d {
                self.ports[c][p as usize] = UNSET;
            }
        }
        self.sites[d] = Some(site);
        if let Site::Cross(c, p) = site {
            self.ports[c][p as usize] = d;
        }
    }

    pub(crate) fn link(&mut self, a: DartId, b: DartId) {
        self.twin[a] = b;
        self.twin[b] = a;
    }

    pub(crate) fn twin_of(&self, d: DartId) -> DartId {
        self.twin[d]
    }

    pub(crate) fn kill_dart(&mut self, d: DartId) {
        if let Some(Site::Cross(c, p)) = self.sites[d] {
            self.ports[c][p as usize] = UNSET;
        }
        self.sites[d] = None;
        self.twin[d] = UNSET;
    }

    /// Delete a crossing, letting both passes run straight through.
    /// A pair whose two ends belong to one arc closes a loop component.
    pub(crate) fn splice_out(&mut self, c: CrossId) {
        for (p, q) in [(0usize, 2usize), (1, 3)] {
            let a = self.ports[c][p];
            let b = self.ports[c][q];
            let ta = self.twin[a];
            let tb = self.twin[b];
            self.kill_dart(a);
            self.kill_dart(b);
            if ta == b {
                self.free_loops += 1;
            } else {
                self.link(ta, tb);
            }
        }
        self.over_diag[c] = None;
    }

    /// Split the arc of `td` with a new crossing; the split strand runs
    /// along the direction of `td` through ports 2 to 0, and a strand
    /// crossing it from the face left of `td` takes ports 1 to 3.
    /// Those two routed ports are left for the caller to fill.
    pub(crate) fn puncture(&mut self, td: DartId, routed_over: bool) -> CrossId {
        let c = self.new_crossing(if routed_over { 1 } else { 0 });
        let tw = self.twin[td];
        let n_sin = self.new_dart();
        self.set_site(n_sin, Site::Cross(c, 2));
        let n_sout = self.new_dart();
        self.set_site(n_sout, Site::Cross(c, 0));
        self.link(td, n_sin);
        self.link(n_sout, tw);
        c
    }

    /// Compact live darts and crossings into a validated diagram.
    pub(crate) fn finish(self) -> Result<Diagram> {
        let mut dart_map = alloc::vec![UNSET; self.sites.len()];
        let mut live = 0usize;
        for (d, s) in self.sites.iter().enumerate() {
            if s.is_some() {
                dart_map[d] = live;
                live += 1;
            }
        }
        let mut cross_map = alloc::vec![usize::MAX; self.over_diag.len()];
        let mut live_c = 0usize;
        for (c, o) in self.over_diag.iter().enumerate() {
            if o.is_some() {
                cross_map[c] = live_c;
                live_c += 1;
            }
        }
        let mut sites = Vec::with_capacity(live);
        let mut twin = Vec::with_capacity(live);
        for (d, s) in self.sites.iter().enumerate() {
            let Some(site) = s else { continue };
            let t = self.twin[d];
            if t == UNSET || dart_map[t] == UNSET {
                return Err(Error::Internal(format!("dangling dart after surgery")));
            }
            twin.push(dart_map[t]);
            sites.push(match *site {
                Site::Cross(c, p) => {
                    if cross_map[c] == usize::MAX {
                        return Err(Error::Internal(format!("dart on deleted crossing")));
                    }
                    Site::Cross(cross_map[c], p)
                }
                s => s,
            });
        }
        let mut crossings = Vec::with_capacity(live_c);
        for (c, o) in self.over_diag.iter().enumerate() {
            let Some(od) = o else { continue };
            let p = self.ports[c];
            if p.iter().any(|&d| d == UNSET || dart_map[d] == UNSET) {
                return Err(Error::Internal(format!("open port after surgery")));
            }
            crossings.push(Crossing {
                ports: [
                    dart_map[p[0]],
                    dart_map[p[1]],
                    dart_map[p[2]],
                    dart_map[p[3]],
                ],
                over_diag: *od,
            });
        }
        let out = Diagram {
            sites,
            twin,
            crossings,
            closed: self.closed,
            free_loops: self.free_loops,
        };
        out.check()?;
        Ok(out)
    }
}

// ---- Candidate enumeration ----

fn crossing_at(d: &Diagram, dart: DartId) -> Option<CrossId> {
    match d.sites[dart] {
        Site::Cross(c, _) => Some(c),
        _ => None,
    }
}

/// Crossing-removing moves, in canonical order.
pub fn reductions(d: &Diagram) -> Vec<Move> {
    let mut out = Vec::new();
    for orbit in d.orbits() {
        match orbit.len() {
            1 => out.push(Move::R1Delete { dart: orbit[0] }),
            2 => {
                let (d1, d2) = (orbit[0], orbit[1]);
                if bigon(d, d1, d2).is_some() {
                    out.push(Move::R2Delete { d1, d2 });
                }
            }
            _ => {}
        }
    }
    out
}

/// The bigon's crossing pair when `d1`, `d2` bound a deletable bigon.
fn bigon(d: &Diagram, d1: DartId, d2: DartId) -> Option<(CrossId, CrossId)> {
    if d.arc_rep(d1) == d.arc_rep(d2) {
        return None;
    }
    let ca = crossing_at(d, d.twin[d1])?;
    let cb = crossing_at(d, d.twin[d2])?;
    if ca == cb {
        return None;
    }
    // One strand must run over at both corners; its partner then runs
    // under at both, which is the same condition seen from either arc.
    if d.pass_over(d.twin[d1]) != d.pass_over(d1) {
        return None;
    }
    Some((ca, cb))
}

/// Triangle sides for the slide driven by `dm`, each as its two end darts.
struct Slide {
    sides: [DartId; 3],
}

fn slide(d: &Diagram, dm: DartId) -> Option<Slide> {
    let dx = d.face_next(dm);
    let dy = d.face_next(dx);
    if d.face_next(dy) != dm || dx == dm || dy == dm {
        return None;
    }
    let reps = [d.arc_rep(dm), d.arc_rep(dx), d.arc_rep(dy)];
    if reps[0] == reps[1] || reps[0] == reps[2] || reps[1] == reps[2] {
        return None;
    }
    // Corners: dm meets dy's arc at c1, dx's arc at c2; the far corner c3
    // joins the other two sides.
    let c1 = crossing_at(d, d.twin[dy])?;
    let c2 = crossing_at(d, d.twin[dm])?;
    let c3 = crossing_at(d, d.twin[dx])?;
    if c1 == c2 || c1 == c3 || c2 == c3 {
        return None;
    }
    // The moving strand must pass the triangle entirely over or entirely
    // under the other two.
    if d.pass_over(dm) != d.pass_over(d.twin[dm]) {
        return None;
    }
    Some(Slide {
        sides: [dm, dx, dy],
    })
}

/// Slide moves, one per triangle side that passes its two corners on one
/// level.
pub fn slides(d: &Diagram) -> Vec<Move> {
    let mut out = Vec::new();
    for orbit in d.orbits() {
        if orbit.len() != 3 {
            continue;
        }
        for &dm in &orbit {
            if slide(d, dm).is_some() {
                out.push(Move::R3 { dart: dm });
            }
        }
    }
    out
}

/// Crossing-adding moves.
pub fn insertions(d: &Diagram) -> Vec<Move> {
    let mut out = Vec::new();
    for dart in 0..d.twin.len() {
        if dart > d.twin[dart] {
            continue;
        }
        for over_first in [false, true] {
            for positive in [false, true] {
                out.push(Move::R1Insert {
                    dart,
                    over_first,
                    positive,
                });
            }
        }
    }
    for orbit in d.orbits() {
        for &da in &orbit {
            for &db in &orbit {
                if da == db || d.arc_rep(da) == d.arc_rep(db) {
                    continue;
                }
                for over in [false, true] {
                    out.push(Move::R2Insert { da, db, over });
                }
            }
        }
    }
    out
}

pub fn moves(d: &Diagram) -> Vec<Move> {
    let mut out = reductions(d);
    out.extend(slides(d));
    out.extend(insertions(d));
    out
}

// ---- Application ----

pub fn apply(d: &Diagram, mv: &Move) -> Result<Diagram> {
    match *mv {
        Move::R1Delete { dart } => {
            if d.face_next(dart) != dart {
                return Err(Error::InvalidParameter(format!("dart does not bound a monogon")));
            }
            let c = crossing_at(d, d.twin[dart])
                .ok_or_else(|| Error::InvalidParameter(format!("kink without a crossing")))?;
            let mut s = Soup::of(d);
            s.splice_out(c);
            s.finish()
        }
        Move::R2Delete { d1, d2 } => {
            if d.face_next(d1) != d2 || d.face_next(d2) != d1 {
                return Err(Error::InvalidParameter(format!("darts do not bound a bigon")));
            }
            let (ca, cb) = bigon(d, d1, d2)
                .ok_or_else(|| Error::InvalidParameter(format!("bigon is not deletable")))?;
            let mut s = Soup::of(d);
            s.splice_out(ca);
            s.splice_out(cb);
            s.finish()
        }
        Move::R3 { dart } => {
            let sl = slide(d, dart)
                .ok_or_else(|| Error::InvalidParameter(format!("dart does not drive a slide")))?;
            let mut out = d.clone();
            // Each side arc flips to the opposite ports of its two corner
            // crossings, and the outer darts that held those ports trade
            // corners. Applied to all three sides at once this carries
            // every strand across the far corner of the triangle.
            for ea in sl.sides {
                let eb = d.twin[ea];
                let ((ca, p), (cb, q)) = match (d.sites[ea], d.sites[eb]) {
                    (Site::Cross(ca, p), Site::Cross(cb, q)) => ((ca, p), (cb, q)),
                    _ => return Err(Error::Internal(format!("triangle end off its corner"))),
                };
                let (po, qo) = ((p + 2) % 4, (q + 2) % 4);
                let outer_a = d.crossings[ca].ports[po as usize];
                let outer_b = d.crossings[cb].ports[qo as usize];
                out.crossings[ca].ports[p as usize] = outer_b;
                out.crossings[ca].ports[po as usize] = ea;
                out.crossings[cb].ports[q as usize] = outer_a;
                out.crossings[cb].ports[qo as usize] = eb;
                out.sites[outer_b] = Site::Cross(ca, p);
                out.sites[ea] = Site::Cross(ca, po);
                out.sites[outer_a] = Site::Cross(cb, q);
                out.sites[eb] = Site::Cross(cb, qo);
            }
            out.check()?;
            Ok(out)
        }
        Move::R1Insert {
            dart,
            over_first,
            positive,
        } => {
            if dart >= d.twin.len() {
                return Err(Error::InvalidParameter(format!("no such dart")));
            }
            let mut s = Soup::of(d);
            let a1 = s.twin_of(dart);
            let c = s.new_crossing(0);
            let under_in = if positive { 1 } else { 3 };
            let (p1_in, p2_in) = if over_first { (0, under_in) } else { (under_in, 0) };
            let x = s.new_dart();
            s.set_site(x, Site::Cross(c, p1_in));
            let y = s.new_dart();
            s.set_site(y, Site::Cross(c, (p1_in + 2) % 4));
            let z = s.new_dart();
            s.set_site(z, Site::Cross(c, p2_in));
            let w = s.new_dart();
            s.set_site(w, Site::Cross(c, (p2_in + 2) % 4));
            s.link(dart, x);
            s.link(y, z);
            s.link(w, a1);
            s.finish()
        }
        Move::R2Insert { da, db, over } => {
            let faces = d.faces();
            if da >= d.twin.len() || db >= d.twin.len() || d.arc_rep(da) == d.arc_rep(db) {
                return Err(Error::InvalidParameter(format!("bad finger arcs")));
            }
            if faces.face_of[da] != faces.face_of[db] {
                return Err(Error::InvalidParameter(format!("finger arcs not on one face")));
            }
            let mut s = Soup::of(d);
            let a1 = s.twin_of(da);
            let c1 = s.puncture(db, over);
            // The tip turns straight back: the return pass crosses the
            // piece between c1 and the entry dart, entered from the far
            // region, so the two finger corridors never meet.
            let near = s.twin_of(db);
            let c2 = s.puncture(near, over);
            let rin1 = s.new_dart();
            s.set_site(rin1, Site::Cross(c1, 1));
            let rout1 = s.new_dart();
            s.set_site(rout1, Site::Cross(c1, 3));
            let rin2 = s.new_dart();
            s.set_site(rin2, Site::Cross(c2, 1));
            let rout2 = s.new_dart();
            s.set_site(rout2, Site::Cross(c2, 3));
            s.link(da, rin1);
            s.link(rout1, rin2);
            s.link(rout2, a1);
            s.finish()
        }
    }
}

// ---- Random walks and simplification ----

/// Seeded uniform move choice; insertions are withheld once the diagram
/// reaches `cap` crossings.
pub fn random_move(d: &Diagram, rng: &mut ChaCha12Rng, cap: usize) -> Option<Move> {
    let mut pool = reductions(d);
    pool.extend(slides(d));
    if d.crossing_count() < cap {
        pool.extend(insertions(d));
    }
    if pool.is_empty() {
        return None;
    }
    let k = (rng.next_u64() % pool.len() as u64) as usize;
    Some(pool[k])
}

#[derive(Debug, Clone)]
pub struct SimplifyOutcome {
    pub diagram: Diagram,
    /// Least diagrammatic height seen anywhere along the search, open
    /// diagrams only.
    pub height_bound: Option<u32>,
    /// Diagrams examined.
    pub visited: usize,
}

/// Depth of slide exploration between reductions.
const SLIDE_DEPTH: u32 = 3;

/// Greedy reduction with bounded slide search.
///
/// Deletions apply eagerly; when none remain, breadth-first slide
/// combinations up to depth three look for a diagram that unlocks another
/// deletion. `budget` caps the total diagrams examined. Returns the
/// smallest diagram found (fewest crossings, then least code).
pub fn simplify(d: &Diagram, budget: usize) -> Result<SimplifyOutcome> {
    let mut visited = 0usize;
    let mut height_bound: Option<u32> = None;
    let note = |dg: &Diagram, visited: &mut usize, hb: &mut Option<u32>| -> Result<()> {
        *visited += 1;
        if !dg.is_closed() {
            let h = dg.height()?;
            *hb = Some(hb.map_or(h, |b| core::cmp::min(b, h)));
        }
        Ok(())
    };

    let mut cur = d.clone();
    note(&cur, &mut visited, &mut height_bound)?;
    let mut best = cur.clone();
    'outer: loop {
        // Eager deletions.
        loop {
            let rs = reductions(&cur);
            match rs.first() {
                Some(mv) => {
                    cur = apply(&cur, mv)?;
                    note(&cur, &mut visited, &mut height_bound)?;
                }
                None => break,
            }
        }
        if cur.crossing_count() < best.crossing_count()
            || (cur.crossing_count() == best.crossing_count() && cur.code() < best.code())
        {
            best = cur.clone();
        }
        if visited >= budget {
            break;
        }
        // Slide search for a new deletion.
        let mut seen = alloc::collections::BTreeSet::new();
        seen.insert(cur.code());
        let mut frontier = alloc::vec![cur.clone()];
        for _depth in 0..SLIDE_DEPTH {
            let mut next = Vec::new();
            for dg in &frontier {
                for mv in slides(dg) {
                    if visited >= budget {
                        break 'outer;
                    }
                    let cand = apply(dg, &mv)?;
                    if !seen.insert(cand.code()) {
                        continue;
                    }
                    note(&cand, &mut visited, &mut height_bound)?;
                    if !reductions(&cand).is_empty() {
                        cur = cand;
                        continue 'outer;
                    }
                    next.push(cand);
                }
            }
            frontier = next;
        }
        break;
    }
    Ok(SimplifyOutcome {
        diagram: best,
        height_bound,
        visited,
    })
}

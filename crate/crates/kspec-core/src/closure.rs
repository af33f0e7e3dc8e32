//! Over, under, and virtual closures of open diagrams.
//!
//! The end-to-end connection follows a shortest dual path between the end
//! faces, so the number of strands it crosses always equals the
//! diagrammatic height. Over and under closures realize the connection as
//! classical crossings and return a closed diagram; the virtual closure
//! keeps the crossed strands as V passages and exists only as a code.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::diagram::{DartId, Diagram, Site};
use crate::moves::Soup;
use crate::{Error, Result};

/// How the end-to-end connection treats the strands it crosses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosureKind {
    Over,
    Under,
    Virtual,
}

impl ClosureKind {
    pub fn name(self) -> &'static str {
        match self {
            ClosureKind::Over => "over",
            ClosureKind::Under => "under",
            ClosureKind::Virtual => "virtual",
        }
    }
}

/// A closed-up open diagram.
#[derive(Debug, Clone)]
pub struct ClosureResult {
    pub kind: ClosureKind,
    /// Strands the closure arc crosses: the diagrammatic height, and for
    /// the virtual kind the diagrammatic virtual crossing count.
    pub crossings_added: usize,
    /// Canonical closed code; only virtual closures carry V tokens.
    pub code: String,
    /// The closed diagram; absent when virtual passages keep it off the
    /// plane.
    pub diagram: Option<Diagram>,
}

/// Close the strand end-to-end along a shortest dual path.
pub fn closure(d: &Diagram, kind: ClosureKind) -> Result<ClosureResult> {
    if d.is_closed() {
        return Err(Error::InvalidParameter(format!(
            "closure applies to open diagrams"
        )));
    }
    let faces = d.faces();
    let (arcs, _) = d.dual_path(&faces)?;
    if kind == ClosureKind::Virtual && !arcs.is_empty() {
        return virtual_closure(d, &arcs);
    }
    classical_closure(d, kind, &arcs)
}

/// Realize the closure arc with classical crossings, over or under
/// everything it meets. With nothing to cross this is the plain end fusion
/// every kind shares.
fn classical_closure(d: &Diagram, kind: ClosureKind, arcs: &[DartId]) -> Result<ClosureResult> {
    let over = kind == ClosureKind::Over;
    let leg = d
        .leg_dart()
        .ok_or_else(|| Error::Internal(format!("open diagram without a leg")))?;
    let head = d
        .head_dart()
        .ok_or_else(|| Error::Internal(format!("open diagram without a head")))?;
    let mut s = Soup::of(d);
    // Each crossed arc is entered from its left, matching the puncture
    // convention, in path order head to leg.
    let mut routers = Vec::with_capacity(arcs.len());
    for &td in arcs {
        let c = s.puncture(td, over);
        let rin = s.new_dart();
        s.set_site(rin, Site::Cross(c, 1));
        let rout = s.new_dart();
        s.set_site(rout, Site::Cross(c, 3));
        routers.push((rin, rout));
    }
    let a = s.twin_of(head);
    let b = s.twin_of(leg);
    s.kill_dart(head);
    s.kill_dart(leg);
    if a == leg {
        // One bare arc: fusing the ends leaves a crossing-free loop.
        if !arcs.is_empty() {
            return Err(Error::Internal(format!("bare strand with a crossed path")));
        }
        s.add_free_loop();
    } else {
        let mut cur = a;
        for &(rin, rout) in &routers {
            s.link(cur, rin);
            cur = rout;
        }
        s.link(cur, b);
    }
    s.set_closed();
    let dg = s.finish()?;
    Ok(ClosureResult {
        kind,
        crossings_added: arcs.len(),
        code: dg.code(),
        diagram: Some(dg),
    })
}

/// One passage of the closed-up virtual code.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Tok {
    /// Classical passage: crossing key, over flag, sign.
    C(usize, bool, i8),
    /// Virtual passage: closure-crossing key.
    V(usize),
}

/// Close with V passages at every crossed strand; code only.
fn virtual_closure(d: &Diagram, arcs: &[DartId]) -> Result<ClosureResult> {
    let trav = d.traversal()?;
    let signs = d.signs()?;
    // Arc representatives gap by gap along the strand; gap g precedes
    // passage g, the last gap is the head arc.
    let mut gap_reps = Vec::with_capacity(trav.len() + 1);
    let mut cur = d
        .leg_dart()
        .ok_or_else(|| Error::Internal(format!("open diagram without a leg")))?;
    loop {
        gap_reps.push(d.arc_rep(cur));
        let e = d.twin[cur];
        match d.sites[e] {
            Site::Cross(c, p) => cur = d.crossings[c].ports[((p + 2) % 4) as usize],
            Site::Head => break,
            Site::Leg => return Err(Error::Internal(format!("strand ran into the leg"))),
        }
    }
    // A shortest path crosses an arc at most once, so a gap holds at most
    // one V passage.
    let mut v_at: alloc::collections::BTreeMap<DartId, usize> = Default::default();
    for (i, &td) in arcs.iter().enumerate() {
        if v_at.insert(d.arc_rep(td), i).is_some() {
            return Err(Error::Internal(format!("dual path reuses an arc")));
        }
    }
    let mut cyc: Vec<Tok> = Vec::with_capacity(trav.len() + 2 * arcs.len());
    for (g, rep) in gap_reps.iter().enumerate() {
        if let Some(&i) = v_at.get(rep) {
            cyc.push(Tok::V(i));
        }
        if let Some(p) = trav.get(g) {
            cyc.push(Tok::C(p.crossing, p.over, signs[p.crossing]));
        }
    }
    // The closure arc itself, head to leg.
    for i in 0..arcs.len() {
        cyc.push(Tok::V(i));
    }
    let mut code = canonical_cycle(&cyc);
    if d.free_loops() > 0 {
        code.push_str(&format!("|L{}", d.free_loops()));
    }
    Ok(ClosureResult {
        kind: ClosureKind::Virtual,
        crossings_added: arcs.len(),
        code,
        diagram: None,
    })
}

/// Minimal rendering of a closed token cycle over starts and directions.
/// Signs and levels are direction-stable on a single closed strand.
fn canonical_cycle(cyc: &[Tok]) -> String {
    let mut best: Option<String> = None;
    for dir in 0..2 {
        let s: Vec<Tok> = if dir == 0 {
            cyc.to_vec()
        } else {
            cyc.iter().rev().copied().collect()
        };
        for rot in 0..s.len().max(1) {
            let rotated: Vec<Tok> = s[rot..].iter().chain(s[..rot].iter()).copied().collect();
            let cand = render_cycle(&rotated);
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    let mut out = String::from("c:");
    out.push_str(&best.unwrap_or_default());
    out
}

fn render_cycle(cyc: &[Tok]) -> String {
    // Classical and virtual passages share the 1-based first-visit ids.
    let mut ids: alloc::collections::BTreeMap<(u8, usize), usize> = Default::default();
    let mut out = String::new();
    for t in cyc {
        let (key, tag) = match *t {
            Tok::C(c, over, _) => ((0u8, c), if over { 'O' } else { 'U' }),
            Tok::V(v) => ((1u8, v), 'V'),
        };
        let next = ids.len() + 1;
        let id = *ids.entry(key).or_insert(next);
        out.push(tag);
        out.push_str(&format!("{id}"));
        if let Tok::C(_, _, sign) = *t {
            out.push(if sign > 0 { '+' } else { '-' });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::{apply, random_move, simplify};
    use crate::rng::stream;

    fn close(code: &str, kind: ClosureKind) -> ClosureResult {
        closure(&Diagram::from_code(code).unwrap(), kind).unwrap()
    }

    #[test]
    fn knot_type_ends_fuse_the_same_way_for_every_kind() {
        // Height 0: the connection crosses nothing, so all kinds agree.
        for code in ["k:", "k:O1+U1+", "k:O1+U2+O3+U1+O2+U3+"] {
            let over = close(code, ClosureKind::Over);
            let under = close(code, ClosureKind::Under);
            let virt = close(code, ClosureKind::Virtual);
            assert_eq!(over.crossings_added, 0);
            assert_eq!(under.crossings_added, 0);
            assert_eq!(virt.crossings_added, 0);
            assert_eq!(over.code, under.code);
            assert_eq!(over.code, virt.code);
            assert!(!over.code.contains('V'));
            let dg = over.diagram.unwrap();
            assert!(dg.is_closed());
            assert_eq!(
                dg.crossing_count(),
                Diagram::from_code(code).unwrap().crossing_count()
            );
        }
        assert_eq!(close("k:", ClosureKind::Over).code, "c:|L1");
    }

    #[test]
    fn cut_trefoil_closures_split_into_trefoil_and_unknot() {
        // Cutting the under-strand at one trefoil crossing leaves this
        // 2-crossing diagram; closing under restores the trefoil, while
        // closing over switches that crossing and undoes the knot.
        let d = Diagram::from_code("k:O1+U2+U1+O2+").unwrap();
        assert_eq!(d.height().unwrap(), 1);

        let under = closure(&d, ClosureKind::Under).unwrap();
        assert_eq!(under.crossings_added, 1);
        let trefoil = Diagram::from_code("c:O1+U2+O3+U1+O2+U3+").unwrap();
        assert_eq!(under.code, trefoil.code());

        let over = closure(&d, ClosureKind::Over).unwrap();
        assert_eq!(over.crossings_added, 1);
        assert_ne!(over.code, under.code);
        let reduced = simplify(&over.diagram.unwrap(), 500).unwrap();
        assert_eq!(reduced.diagram.code(), "c:|L1");

        let virt = closure(&d, ClosureKind::Virtual).unwrap();
        assert_eq!(virt.crossings_added, 1);
        assert!(virt.diagram.is_none());
        assert_eq!(virt.code.matches('V').count(), 2);
    }

    #[test]
    fn closure_arc_crossings_equal_height_everywhere() {
        // Random open diagrams: every kind adds exactly height crossings,
        // classical results stay valid closed diagrams, virtual codes
        // carry two V passages per crossed strand.
        let mut rng = stream(0xc105_0001);
        let mut d = Diagram::from_code("k:").unwrap();
        for _ in 0..80 {
            if let Some(mv) = random_move(&d, &mut rng, 7) {
                d = apply(&d, &mv).unwrap();
            }
            let h = d.height().unwrap() as usize;
            for kind in [ClosureKind::Over, ClosureKind::Under, ClosureKind::Virtual] {
                let res = closure(&d, kind).unwrap();
                assert_eq!(res.crossings_added, h, "kind {:?} on {}", kind, d.code());
                match res.diagram {
                    Some(dg) => {
                        assert!(dg.is_closed());
                        assert_eq!(dg.crossing_count(), d.crossing_count() + h);
                        assert!(!res.code.contains('V'));
                    }
                    None => {
                        assert_eq!(res.code.matches('V').count(), 2 * h);
                    }
                }
            }
        }
    }

    #[test]
    fn virtual_codes_are_rotation_invariant() {
        let d = Diagram::from_code("k:O1+U2+U1+O2+").unwrap();
        let virt = closure(&d, ClosureKind::Virtual).unwrap();
        // Renumbering from any start and direction lands on the same code.
        assert!(virt.code.starts_with("c:"));
        let toks = [
            Tok::C(0, true, 1),
            Tok::C(1, false, 1),
            Tok::V(0),
            Tok::C(0, false, 1),
            Tok::C(1, true, 1),
            Tok::V(0),
        ];
        let base = canonical_cycle(&toks);
        for rot in 0..toks.len() {
            let rotated: Vec<Tok> = toks[rot..]
                .iter()
                .chain(toks[..rot].iter())
                .copied()
                .collect();
            assert_eq!(canonical_cycle(&rotated), base);
        }
        assert_eq!(virt.code, base);
    }
}

//! Kauffman bracket, writhe-normalized Jones, and the class fingerprint.
//!
//! The bracket is the plain 2^c state sum: every crossing is smoothed both
//! ways, loops contribute -A^2 - A^-2 each beyond the first component, and
//! on open diagrams the strand itself is that first component, so the
//! trivial knotoid comes out at exactly 1. Everything is exact integer
//! Laurent arithmetic; there is no rounding anywhere.

use alloc::format;
use alloc::vec::Vec;

use crate::closure::{closure, ClosureKind};
use crate::diagram::Diagram;
use crate::laurent::Laurent;
use crate::moves::simplify;
use crate::{Error, Result};

/// State sums refuse diagrams above this many crossings by default; callers
/// simplify first and report what stays above as unresolved.
pub const BRACKET_CAP: usize = 24;

/// Loop factor -A^2 - A^-2.
pub fn loop_factor() -> Laurent {
    Laurent::from_pairs(&[(2, -1), (-2, -1)])
}

// ---- State sum ----

/// Port pairs joined when a crossing is smoothed. The A smoothing turns the
/// over strand counterclockwise onto the under strand, which in port terms
/// joins each port on the over diagonal to its clockwise neighbor.
fn smoothing_pairs(over_diag: u8, a_state: bool) -> [(usize, usize); 2] {
    let o = over_diag as usize;
    if a_state {
        [((o + 1) % 4, (o + 2) % 4), ((o + 3) % 4, o)]
    } else {
        [(o, (o + 1) % 4), ((o + 2) % 4, (o + 3) % 4)]
    }
}

fn uf_find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let g = parent[parent[x as usize] as usize];
        parent[x as usize] = g;
        x = g;
    }
    x
}

fn uf_union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (uf_find(parent, a), uf_find(parent, b));
    if ra != rb {
        parent[ra as usize] = rb;
    }
}

/// Kauffman bracket by exhaustive smoothing, capped at `cap` crossings.
pub fn bracket(d: &Diagram, cap: usize) -> Result<Laurent> {
    let c = d.crossing_count();
    if c > cap {
        return Err(Error::TooManyCrossings { crossings: c, cap });
    }
    let n = d.twin.len();
    // Arcs never change between states; crossings re-pair per state.
    let mut base: Vec<u32> = (0..n as u32).collect();
    for a in 0..n {
        uf_union(&mut base, a as u32, d.twin[a] as u32);
    }
    // Highest possible component count: one per crossing plus the strand.
    let mut delta_pow = Vec::with_capacity(c + 2 + d.free_loops());
    delta_pow.push(Laurent::one());
    for k in 1..c + 2 + d.free_loops() {
        delta_pow.push(&delta_pow[k - 1] * &loop_factor());
    }
    let mut out = Laurent::zero();
    let mut parent = base.clone();
    for state in 0u64..1 << c {
        parent.copy_from_slice(&base);
        let mut exp = 0i64;
        for (k, cr) in d.crossings.iter().enumerate() {
            let a_state = state >> k & 1 == 0;
            exp += if a_state { 1 } else { -1 };
            for (p, q) in smoothing_pairs(cr.over_diag, a_state) {
                uf_union(&mut parent, cr.ports[p] as u32, cr.ports[q] as u32);
            }
        }
        let mut comp = d.free_loops();
        for x in 0..n as u32 {
            if uf_find(&mut parent, x) == x {
                comp += 1;
            }
        }
        if comp == 0 {
            comp = 1;
        }
        out = &out + &delta_pow[comp - 1].mul_monomial(1, exp);
    }
    Ok(out)
}

/// Bracket times (-A^3)^(-writhe): invariant under all three moves, on
/// closed diagrams and endpoint-respecting on open ones.
pub fn jones_normalized(d: &Diagram, cap: usize) -> Result<Laurent> {
    let b = bracket(d, cap)?;
    let k = -d.writhe()?;
    let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(b.mul_monomial(sign, 3 * k))
}

// ---- Fingerprint ----

/// The bucketing identity of a knotoid class: equal fingerprints may still
/// be different knotoids, but distinct fingerprints certify distinct
/// classes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fingerprint {
    pub knotoid_jones: Laurent,
    pub under_jones: Laurent,
    pub over_jones: Laurent,
    /// Least diagrammatic height seen while simplifying: an upper bound for
    /// the knotoid's height.
    pub height_bound: u32,
    /// Height bound reached 0: the class carries a well-defined knot type.
    pub knot_type: bool,
}

/// Outcome of classifying one open diagram.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Classification {
    Resolved(Fingerprint),
    /// Still above the bracket cap after simplification; spectra count
    /// this mass separately instead of dropping it.
    Unresolved { crossings: usize },
}

/// Simplify, then fingerprint by the knotoid Jones, both closure Jones,
/// and the height bound.
pub fn fingerprint(d: &Diagram, budget: usize, cap: usize) -> Result<Classification> {
    if d.is_closed() {
        return Err(Error::InvalidParameter(format!(
            "fingerprints classify open diagrams"
        )));
    }
    let s = simplify(d, budget)?;
    let height_bound = s
        .height_bound
        .ok_or_else(|| Error::Internal(format!("open simplify without a height bound")))?;
    classify_simplified(&s.diagram, height_bound, budget, cap)
}

/// Fingerprint an already-simplified open diagram; `budget` only drives the
/// closure simplifications.
pub fn classify_simplified(
    dd: &Diagram,
    height_bound: u32,
    budget: usize,
    cap: usize,
) -> Result<Classification> {
    if dd.crossing_count() > cap {
        return Ok(Classification::Unresolved {
            crossings: dd.crossing_count(),
        });
    }
    let knotoid_jones = jones_normalized(dd, cap)?;
    let closed_jones = |kind: ClosureKind| -> Result<core::result::Result<Laurent, usize>> {
        let res = closure(dd, kind)?;
        let cd = res
            .diagram
            .ok_or_else(|| Error::Internal(format!("classical closure without a diagram")))?;
        let sc = simplify(&cd, budget)?;
        if sc.diagram.crossing_count() > cap {
            return Ok(Err(sc.diagram.crossing_count()));
        }
        Ok(Ok(jones_normalized(&sc.diagram, cap)?))
    };
    let under_jones = match closed_jones(ClosureKind::Under)? {
        Ok(p) => p,
        Err(crossings) => return Ok(Classification::Unresolved { crossings }),
    };
    let over_jones = match closed_jones(ClosureKind::Over)? {
        Ok(p) => p,
        Err(crossings) => return Ok(Classification::Unresolved { crossings }),
    };
    Ok(Classification::Resolved(Fingerprint {
        knotoid_jones,
        under_jones,
        over_jones,
        height_bound,
        knot_type: height_bound == 0,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::{apply, random_move};
    use crate::rng::stream;

    /// Same state enumeration, independent mechanics: neighbor links walked
    /// dart by dart instead of union-find.
    fn oracle_bracket(d: &Diagram) -> Laurent {
        let c = d.crossing_count();
        let n = d.twin.len();
        let mut out = Laurent::zero();
        for state in 0u64..1 << c {
            let mut nbr: Vec<[usize; 2]> = (0..n).map(|a| [d.twin[a], usize::MAX]).collect();
            let mut exp = 0i64;
            for (k, cr) in d.crossings.iter().enumerate() {
                let a_state = state >> k & 1 == 0;
                exp += if a_state { 1 } else { -1 };
                for (p, q) in smoothing_pairs(cr.over_diag, a_state) {
                    let (x, y) = (cr.ports[p], cr.ports[q]);
                    nbr[x][1] = y;
                    nbr[y][1] = x;
                }
            }
            let mut seen = alloc::vec![false; n];
            let mut comp = d.free_loops();
            for start in 0..n {
                if seen[start] {
                    continue;
                }
                comp += 1;
                let mut stack = alloc::vec![start];
                while let Some(x) = stack.pop() {
                    if seen[x] {
                        continue;
                    }
                    seen[x] = true;
                    stack.push(nbr[x][0]);
                    if nbr[x][1] != usize::MAX {
                        stack.push(nbr[x][1]);
                    }
                }
            }
            let weight = Laurent::monomial(1, exp);
            let mut term = weight;
            for _ in 1..comp.max(1) {
                term = &term * &loop_factor();
            }
            out = &out + &term;
        }
        out
    }

    fn dg(code: &str) -> Diagram {
        Diagram::from_code(code).unwrap()
    }

    #[test]
    fn trivial_diagrams_have_unit_bracket() {
        assert!(bracket(&dg("k:"), BRACKET_CAP).unwrap().is_one());
        assert!(bracket(&dg("c:|L1"), BRACKET_CAP).unwrap().is_one());
        // A distant split loop multiplies by the loop factor.
        let mut with_loop = dg("k:O1+U1+");
        let plain = bracket(&with_loop, BRACKET_CAP).unwrap();
        with_loop.add_free_loop();
        assert_eq!(
            bracket(&with_loop, BRACKET_CAP).unwrap(),
            &plain * &loop_factor()
        );
    }

    #[test]
    fn kinks_pin_the_skein_weights() {
        // Positive kink: A * (strand + loop) + A^-1 * strand = -A^3.
        assert_eq!(
            bracket(&dg("k:O1+U1+"), BRACKET_CAP).unwrap(),
            Laurent::monomial(-1, 3)
        );
        assert_eq!(
            bracket(&dg("k:O1-U1-"), BRACKET_CAP).unwrap(),
            Laurent::monomial(-1, -3)
        );
        // Writhe normalization eats the kink.
        assert!(jones_normalized(&dg("k:O1+U1+"), BRACKET_CAP).unwrap().is_one());
        assert!(jones_normalized(&dg("k:O1-U1-"), BRACKET_CAP).unwrap().is_one());
    }

    #[test]
    fn trefoil_jones_matches_the_table() {
        // All-positive trefoil: bracket -A^5 - A^-3 + A^-7 (closing the
        // 2-braid s^3 with s = A + A^-1 e, e^2 = de), then (-A^3)^-3
        // normalization gives V = -t^4 + t^3 + t at t = A^-4.
        let tre = dg("c:O1+U2+O3+U1+O2+U3+");
        let jones = jones_normalized(&tre, BRACKET_CAP).unwrap();
        assert_eq!(jones, Laurent::from_pairs(&[(-16, -1), (-12, 1), (-4, 1)]));
        // Mirroring inverts the variable.
        let mirror_jones = jones_normalized(&tre.mirror(), BRACKET_CAP).unwrap();
        assert_eq!(mirror_jones, jones.invert_var());
    }

    #[test]
    fn state_sum_matches_the_walking_oracle() {
        for code in [
            "k:",
            "k:O1+U1+",
            "k:O1+U2+U1+O2+",
            "c:O1+U2+O3+U1+O2+U3+",
            "c:O1-U2-O3-U1-O2-U3-",
            "k:O1+U2+O3+U1+O2+U3+",
        ] {
            let d = dg(code);
            assert_eq!(
                bracket(&d, BRACKET_CAP).unwrap(),
                oracle_bracket(&d),
                "state sums disagree on {code}"
            );
        }
        // And across random storms on both kinds of diagram.
        let mut rng = stream(0xb4ac_0001);
        for start in ["k:", "c:O1+U1+"] {
            let mut d = dg(start);
            for _ in 0..40 {
                if let Some(mv) = random_move(&d, &mut rng, 6) {
                    d = apply(&d, &mv).unwrap();
                }
                assert_eq!(
                    bracket(&d, BRACKET_CAP).unwrap(),
                    oracle_bracket(&d),
                    "state sums disagree on {}",
                    d.code()
                );
            }
        }
    }

    #[test]
    fn jones_survives_ten_thousand_random_moves() {
        let mut rng = stream(0x10e5_0001);
        let mut applications = 0usize;
        for walk in 0..50 {
            let start = if walk % 2 == 0 { "k:" } else { "c:O1+U1+" };
            let mut d = dg(start);
            let reference = jones_normalized(&d, BRACKET_CAP).unwrap();
            for _ in 0..100 {
                if let Some(mv) = random_move(&d, &mut rng, 7) {
                    d = apply(&d, &mv).unwrap();
                    applications += 1;
                }
                assert_eq!(
                    jones_normalized(&d, BRACKET_CAP).unwrap(),
                    reference,
                    "walk {walk} diverged at {}",
                    d.code()
                );
            }
        }
        assert!(applications >= 4_000, "storm too quiet: {applications}");
    }

    #[test]
    fn fingerprints_classify_the_cut_trefoil_and_its_parent() {
        // Trivial knotoid: all ones, height 0, knot type.
        let triv = match fingerprint(&dg("k:"), 500, BRACKET_CAP).unwrap() {
            Classification::Resolved(f) => f,
            other => panic!("unexpected {other:?}"),
        };
        assert!(triv.knotoid_jones.is_one());
        assert!(triv.under_jones.is_one());
        assert!(triv.over_jones.is_one());
        assert_eq!(triv.height_bound, 0);
        assert!(triv.knot_type);

        // Knot-type trefoil knotoid: both closures carry the trefoil Jones.
        let tri = match fingerprint(&dg("k:O1+U2+O3+U1+O2+U3+"), 500, BRACKET_CAP).unwrap() {
            Classification::Resolved(f) => f,
            other => panic!("unexpected {other:?}"),
        };
        assert!(tri.knot_type);
        assert_eq!(tri.under_jones, tri.over_jones);
        assert_eq!(
            tri.under_jones,
            Laurent::from_pairs(&[(-16, -1), (-12, 1), (-4, 1)])
        );

        // Cut trefoil: closures split into trefoil and unknot, so the flag
        // drops and the bound is 1.
        let cut = match fingerprint(&dg("k:O1+U2+U1+O2+"), 500, BRACKET_CAP).unwrap() {
            Classification::Resolved(f) => f,
            other => panic!("unexpected {other:?}"),
        };
        assert!(!cut.knot_type);
        assert_eq!(cut.height_bound, 1);
        assert_ne!(cut.under_jones, cut.over_jones);
        assert_eq!(
            cut.under_jones,
            Laurent::from_pairs(&[(-16, -1), (-12, 1), (-4, 1)])
        );
        assert!(cut.over_jones.is_one());
    }

    #[test]
    fn oversized_diagrams_are_refused_or_unresolved() {
        let tre = dg("c:O1+U2+O3+U1+O2+U3+");
        assert!(matches!(
            bracket(&tre, 2),
            Err(Error::TooManyCrossings { crossings: 3, cap: 2 })
        ));
        // The trefoil knotoid cannot simplify below 3 crossings, so a cap
        // of 2 leaves it unresolved rather than wrong.
        match fingerprint(&dg("k:O1+U2+O3+U1+O2+U3+"), 500, 2).unwrap() {
            Classification::Unresolved { crossings } => assert_eq!(crossings, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}

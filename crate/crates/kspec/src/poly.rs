//! Integer polynomials in one variable and the Alexander polynomial of a
//! closed diagram. Complements the Laurent bracket arithmetic in the core
//! crate: the bracket certifies chirality, the determinant here certifies
//! knot types whose Jones polynomials we do not want to trust blindly.

use kspec_core::diagram::Diagram;
use kspec_core::{Error, Result};

// ---- Dense integer polynomials ----

/// Polynomial over the integers, dense, lowest degree first. The empty
/// coefficient vector is the zero polynomial; a trailing zero never
/// survives `trim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<i128>,
}

impl IntPoly {
    pub fn zero() -> IntPoly {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> IntPoly {
        IntPoly { coeffs: vec![1] }
    }

    pub fn constant(c: i128) -> IntPoly {
        IntPoly { coeffs: vec![c] }.trim()
    }

    /// Coefficients lowest degree first.
    pub fn from_coeffs(coeffs: &[i128]) -> IntPoly {
        IntPoly { coeffs: coeffs.to_vec() }.trim()
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    fn trim(mut self) -> IntPoly {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        self
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0i128; n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        IntPoly { coeffs: out }.trim()
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j]
                    .checked_add(a.checked_mul(*b).expect("coefficient overflow"))
                    .expect("coefficient overflow");
            }
        }
        IntPoly { coeffs: out }.trim()
    }

    /// Quotient of an exact division; panics if the division leaves a
    /// remainder, which can only happen on a caller bug.
    pub fn div_exact(&self, divisor: &IntPoly) -> IntPoly {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut rem = self.coeffs.clone();
        let d = divisor.coeffs.len();
        assert!(rem.len() >= d, "exact division with too-small dividend");
        let lead = divisor.coeffs[d - 1];
        let mut quot = vec![0i128; rem.len() - d + 1];
        for k in (0..quot.len()).rev() {
            let top = rem[k + d - 1];
            assert!(top % lead == 0, "inexact polynomial division");
            let q = top / lead;
            quot[k] = q;
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * dc;
            }
        }
        assert!(rem.iter().all(|&c| c == 0), "inexact polynomial division");
        IntPoly { coeffs: quot }.trim()
    }

    /// Render as `c0 + c1*t + ...` in ascending degree, skipping zeros.
    pub fn display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        let mut first = true;
        for (e, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if first {
                if c < 0 {
                    s.push('-');
                }
                first = false;
            } else if c < 0 {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            let a = c.unsigned_abs();
            if a != 1 || e == 0 {
                s.push_str(&a.to_string());
            }
            if e == 1 {
                s.push_str(var);
            } else if e > 1 {
                if a != 1 {
                    s.push('*');
                }
                s.push_str(&format!("{var}^{e}"));
            }
        }
        s
    }
}

// ---- Determinants ----

/// Fraction-free Bareiss determinant over Z[t]. Every intermediate
/// division is exact, so no rational arithmetic is needed.
pub fn determinant(mut m: Vec<Vec<IntPoly>>) -> IntPoly {
    let n = m.len();
    for row in &m {
        assert!(row.len() == n, "determinant of a non-square matrix");
    }
    if n == 0 {
        return IntPoly::one();
    }
    let mut sign = 1i128;
    let mut prev = IntPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !m[r][k].is_zero());
            match swap {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return IntPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.div_exact(&prev);
            }
            m[i][k] = IntPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        det.neg()
    } else {
        det
    }
}

// ---- Alexander polynomial ----

/// Alexander polynomial of the knot presented by a closed diagram,
/// normalized to have no factor of t and a positive constant term. The
/// matrix comes from the abelianized crossing relations: one row per
/// crossing, one column per arc between consecutive under-passages, with
/// one row and column deleted before the determinant.
pub fn alexander(d: &Diagram) -> Result<IntPoly> {
    if !d.is_closed() {
        return Err(Error::InvalidParameter(
            "Alexander polynomial needs a closed diagram".to_string(),
        ));
    }
    let strand_components = if d.arc_count() == 0 { 0 } else { 1 };
    if d.free_loops() + strand_components != 1 {
        return Err(Error::InvalidParameter(
            "Alexander polynomial of a split diagram is not supported".to_string(),
        ));
    }
    let n = d.crossing_count();
    if n <= 1 {
        // A closed one-crossing diagram is a kinked unknot.
        return Ok(IntPoly::one());
    }
    let passages = d.traversal()?;
    let signs = d.signs()?;

    // Arc label of a passage: under-passages seen strictly before it,
    // mod n. The walk starts mid-arc, so label 0 and label n coincide.
    let mut labels = vec![0usize; passages.len()];
    let mut under_seen = 0usize;
    for (i, p) in passages.iter().enumerate() {
        labels[i] = under_seen % n;
        if !p.over {
            under_seen += 1;
        }
    }
    if under_seen != n {
        return Err(Error::Internal(format!(
            "traversal saw {under_seen} under-passages on {n} crossings"
        )));
    }
    let mut over_label = vec![usize::MAX; n];
    for (i, p) in passages.iter().enumerate() {
        if p.over {
            over_label[p.crossing] = labels[i];
        }
    }

    let one_minus_t = IntPoly::from_coeffs(&[1, -1]);
    let t = IntPoly::from_coeffs(&[0, 1]);
    let mut mat = vec![vec![IntPoly::zero(); n]; n];
    for (i, p) in passages.iter().enumerate() {
        if p.over {
            continue;
        }
        let c = p.crossing;
        let over = over_label[c];
        let incoming = labels[i];
        let outgoing = (labels[i] + 1) % n;
        // Abelianized Wirtinger relation, rows scaled to Z[t].
        let (w_over, w_in, w_out) = if signs[c] > 0 {
            (one_minus_t.clone(), t.clone(), IntPoly::constant(-1))
        } else {
            (one_minus_t.neg(), IntPoly::one(), t.neg())
        };
        mat[c][over] = mat[c][over].add(&w_over);
        mat[c][incoming] = mat[c][incoming].add(&w_in);
        mat[c][outgoing] = mat[c][outgoing].add(&w_out);
    }

    // Any (n-1)-minor works; drop the last row and column.
    let minor: Vec<Vec<IntPoly>> = mat[..n - 1]
        .iter()
        .map(|row| row[..n - 1].to_vec())
        .collect();
    Ok(normalize_alexander(determinant(minor)))
}

/// Strip the t-power and the overall sign: the Alexander polynomial is
/// defined up to units of Z[t, 1/t].
fn normalize_alexander(p: IntPoly) -> IntPoly {
    if p.is_zero() {
        return p;
    }
    let shift = p.coeffs.iter().position(|&c| c != 0).unwrap();
    let coeffs: Vec<i128> = p.coeffs[shift..].to_vec();
    let flipped = if coeffs[0] < 0 {
        coeffs.iter().map(|c| -c).collect()
    } else {
        coeffs
    };
    IntPoly { coeffs: flipped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kspec_core::curve::torus_knot;
    use kspec_core::geom::v3;
    use kspec_core::projection::project;

    fn diagram_along(curve: &kspec_core::curve::PolyCurve, dir: kspec_core::geom::Vec3) -> Diagram {
        Diagram::from_shadow(&project(curve, dir).expect("generic direction")).expect("shadow")
    }

    #[test]
    fn polynomial_arithmetic_round_trips() {
        let a = IntPoly::from_coeffs(&[1, -3, 1]);
        let b = IntPoly::from_coeffs(&[2, 0, -1, 4]);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a), b);
        assert_eq!(prod.div_exact(&b), a);
        assert_eq!(a.sub(&a), IntPoly::zero());
        assert_eq!(a.display("t"), "1 - 3t + t^2");
        assert_eq!(IntPoly::zero().display("t"), "0");
        assert_eq!(IntPoly::from_coeffs(&[0, 0, -2]).display("t"), "-2*t^2");
    }

    #[test]
    fn determinant_matches_hand_values() {
        let t = IntPoly::from_coeffs(&[0, 1]);
        let c = IntPoly::constant;
        // det [[t, 1], [2, t]] = t^2 - 2.
        let m = vec![vec![t.clone(), c(1)], vec![c(2), t.clone()]];
        assert_eq!(determinant(m), IntPoly::from_coeffs(&[-2, 0, 1]));
        // A singular integer matrix.
        let s = vec![vec![c(1), c(2)], vec![c(2), c(4)]];
        assert_eq!(determinant(s), IntPoly::zero());
        // Pivoting through a zero corner: det [[0, 1], [1, 0]] = -1.
        let p = vec![vec![c(0), c(1)], vec![c(1), c(0)]];
        assert_eq!(determinant(p), IntPoly::constant(-1));
        assert_eq!(determinant(Vec::new()), IntPoly::one());
    }

    #[test]
    fn trefoil_projection_has_the_trefoil_alexander_polynomial() {
        let k = torus_knot(2, 3, 32).unwrap();
        let d = diagram_along(&k, v3(0.11, 0.07, 0.99).normalized());
        let delta = alexander(&d).unwrap();
        assert_eq!(delta, IntPoly::from_coeffs(&[1, -1, 1]));
    }

    #[test]
    fn unknot_diagrams_have_unit_alexander_polynomial() {
        let d = Diagram::unknot_loop();
        assert_eq!(alexander(&d).unwrap(), IntPoly::one());
        let planar = kspec_core::curve::planar_ngon(16).unwrap();
        let d = diagram_along(&planar, v3(0.05, -0.03, 0.998).normalized());
        assert_eq!(alexander(&d).unwrap(), IntPoly::one());
    }

    #[test]
    fn open_diagrams_are_rejected() {
        let d = Diagram::empty_open();
        assert!(matches!(alexander(&d), Err(Error::InvalidParameter(_))));
    }
}

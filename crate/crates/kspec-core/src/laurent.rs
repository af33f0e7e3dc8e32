//! Integer Laurent polynomials in the bracket variable A.
//!
//! Canonical form: a sorted exponent-to-coefficient map with no zero entries,
//! so equality, ordering and hashing of polynomial values are structural.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;
use core::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Laurent {
    terms: BTreeMap<i64, i64>,
}

impl Laurent {
    pub fn zero() -> Laurent {
        Laurent::default()
    }

    pub fn one() -> Laurent {
        Laurent::monomial(1, 0)
    }

    pub fn monomial(coeff: i64, exp: i64) -> Laurent {
        let mut terms = BTreeMap::new();
        if coeff != 0 {
            terms.insert(exp, coeff);
        }
        Laurent { terms }
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Laurent {
        let mut p = Laurent::zero();
        for &(exp, coeff) in pairs {
            p.add_term(exp, coeff);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0) == Some(&1)
    }

    /// (exponent, coefficient) pairs, ascending in exponent.
    pub fn pairs(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn coeff(&self, exp: i64) -> i64 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// max_exp - min_exp; zero for constants and the zero polynomial.
    pub fn span(&self) -> i64 {
        match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0,
        }
    }

    pub fn add_term(&mut self, exp: i64, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let slot = self.terms.entry(exp).or_insert(0);
        *slot += coeff;
        if *slot == 0 {
            self.terms.remove(&exp);
        }
    }

    pub fn scale(&self, k: i64) -> Laurent {
        let mut out = Laurent::zero();
        if k != 0 {
            for (&e, &c) in &self.terms {
                out.terms.insert(e, c * k);
            }
        }
        out
    }

    /// Multiply by c * A^e.
    pub fn mul_monomial(&self, coeff: i64, exp: i64) -> Laurent {
        let mut out = Laurent::zero();
        if coeff != 0 {
            for (&e, &c) in &self.terms {
                out.terms.insert(e + exp, c * coeff);
            }
        }
        out
    }

    /// Substitute A -> A^-1.
    pub fn invert_var(&self) -> Laurent {
        let mut out = Laurent::zero();
        for (&e, &c) in &self.terms {
            out.terms.insert(-e, c);
        }
        out
    }

    /// Reinterpret a closed-diagram polynomial in t = A^-4.
    ///
    /// Defined only when every exponent is a multiple of 4; open-ended
    /// diagrams produce other exponents and fall outside this map.
    pub fn substitute_t(&self) -> Option<Laurent> {
        let mut out = Laurent::zero();
        for (&e, &c) in &self.terms {
            if e % 4 != 0 {
                return None;
            }
            out.terms.insert(-e / 4, c);
        }
        Some(out)
    }

    /// Evaluate at the variable equal to -1. Exact in i64 for the sizes here.
    pub fn eval_minus_one(&self) -> i64 {
        let mut acc = 0i64;
        for (&e, &c) in &self.terms {
            acc += if e % 2 == 0 { c } else { -c };
        }
        acc
    }

    /// Evaluate at the variable equal to 1.
    pub fn eval_one(&self) -> i64 {
        self.terms.values().sum()
    }
}

impl Add<&Laurent> for &Laurent {
    type Output = Laurent;
    fn add(self, o: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (&e, &c) in &o.terms {
            out.add_term(e, c);
        }
        out
    }
}

impl Sub<&Laurent> for &Laurent {
    type Output = Laurent;
    fn sub(self, o: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (&e, &c) in &o.terms {
            out.add_term(e, -c);
        }
        out
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        self.scale(-1)
    }
}

impl Mul<&Laurent> for &Laurent {
    type Output = Laurent;
    fn mul(self, o: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (&e1, &c1) in &self.terms {
            for (&e2, &c2) in &o.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for Laurent {
    /// Descending exponents, e.g. `-A^16 + A^12 + A^4` or `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&e, &c) in self.terms.iter().rev() {
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
                first = false;
            } else if c < 0 {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let a = c.unsigned_abs();
            if a != 1 || e == 0 {
                write!(f, "{a}")?;
            }
            if e == 1 {
                f.write_str("A")?;
            } else if e != 0 {
                if a != 1 {
                    f.write_str("*")?;
                }
                write!(f, "A^{e}")?;
            }
        }
        Ok(())
    }
}

/// Render with an arbitrary variable name (used for polynomials in t).
pub fn display_in_var(p: &Laurent, var: &str) -> String {
    let mut s = String::new();
    if p.is_zero() {
        s.push('0');
        return s;
    }
    let pairs: Vec<(i64, i64)> = p.pairs().collect();
    for (i, &(e, c)) in pairs.iter().rev().enumerate() {
        if i == 0 {
            if c < 0 {
                s.push('-');
            }
        } else if c < 0 {
            s.push_str(" - ");
        } else {
            s.push_str(" + ");
        }
        let a = c.unsigned_abs();
        if a != 1 || e == 0 {
            let _ = write!(s, "{a}");
        }
        if e == 1 {
            s.push_str(var);
        } else if e != 0 {
            if a != 1 {
                s.push('*');
            }
            let _ = write!(s, "{var}^{e}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_drops_zeros() {
        let mut p = Laurent::monomial(3, 2);
        p.add_term(2, -3);
        assert!(p.is_zero());
        assert_eq!(Laurent::from_pairs(&[(1, 2), (1, -2), (0, 1)]), Laurent::one());
    }

    #[test]
    fn arithmetic() {
        let a = Laurent::from_pairs(&[(0, 1), (2, 1)]); // 1 + A^2
        let b = Laurent::from_pairs(&[(0, 1), (-2, -1)]); // 1 - A^-2
        let prod = &a * &b;
        // (1 + A^2)(1 - A^-2) = A^2 - A^-2
        assert_eq!(prod, Laurent::from_pairs(&[(2, 1), (-2, -1)]));
        assert_eq!(&(&a + &b) - &a, b);
        assert_eq!(a.mul_monomial(-1, 3), Laurent::from_pairs(&[(3, -1), (5, -1)]));
    }

    #[test]
    fn variable_inversion_and_t_substitution() {
        let p = Laurent::from_pairs(&[(4, 1), (12, 1), (16, -1)]);
        assert_eq!(p.invert_var(), Laurent::from_pairs(&[(-4, 1), (-12, 1), (-16, -1)]));
        let t = p.substitute_t().unwrap();
        assert_eq!(t, Laurent::from_pairs(&[(-1, 1), (-3, 1), (-4, -1)]));
        assert!(Laurent::monomial(1, 2).substitute_t().is_none());
        // |V(-1)| of the trefoil is 3.
        assert_eq!(t.eval_minus_one().abs(), 3);
    }

    #[test]
    fn display_forms() {
        let p = Laurent::from_pairs(&[(4, 1), (12, 1), (16, -1)]);
        assert_eq!(alloc::format!("{p}"), "-A^16 + A^12 + A^4");
        let q = Laurent::from_pairs(&[(0, -2), (1, 1), (-3, 5)]);
        assert_eq!(alloc::format!("{q}"), "A - 2 + 5*A^-3");
        assert_eq!(alloc::format!("{}", Laurent::zero()), "0");
        assert_eq!(display_in_var(&q, "t"), "t - 2 + 5*t^-3");
    }

    #[test]
    fn ordering_is_total_and_structural() {
        let a = Laurent::from_pairs(&[(0, 1)]);
        let b = Laurent::from_pairs(&[(0, 2)]);
        assert!(a < b);
        assert_eq!(a.cmp(&a), core::cmp::Ordering::Equal);
    }
}

//! Small fixed-dimension vector types and segment distance primitives.

use core::ops::{Add, Div, Mul, Neg, Sub};

/// Point or vector in 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const fn v3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3 { x, y, z }
}

impl Vec3 {
    pub const ZERO: Vec3 = v3(0.0, 0.0, 0.0);

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        v3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        libm::sqrt(self.norm2())
    }

    #[inline]
    pub fn dist(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction; zero input returns zero.
    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        if n == 0.0 {
            Vec3::ZERO
        } else {
            self / n
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        v3(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        v3(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        v3(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        v3(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn div(self, s: f64) -> Vec3 {
        v3(self.x / s, self.y / s, self.z / s)
    }
}

/// Point or vector in the projection plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub const fn v2(x: f64, y: f64) -> Vec2 {
    Vec2 { x, y }
}

impl Vec2 {
    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// Signed area form; positive when `o` is counterclockwise from `self`.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        v2(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        v2(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        v2(self.x * s, self.y * s)
    }
}

/// Scalar triple product a . (b x c).
#[inline]
pub fn triple(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    a.dot(b.cross(c))
}

/// Right-handed orthonormal frame (u, v) completing a unit normal: u x v = n.
pub fn orthonormal_basis(n: Vec3) -> (Vec3, Vec3) {
    let ax = libm::fabs(n.x);
    let ay = libm::fabs(n.y);
    let az = libm::fabs(n.z);
    // Seed axis least aligned with n keeps the cross product well conditioned.
    let seed = if ax <= ay && ax <= az {
        v3(1.0, 0.0, 0.0)
    } else if ay <= az {
        v3(0.0, 1.0, 0.0)
    } else {
        v3(0.0, 0.0, 1.0)
    };
    let u = seed.cross(n).normalized();
    let v = n.cross(u);
    (u, v)
}

/// Distance from point p to segment [a, b], and the parameter of the foot.
pub fn point_seg(p: Vec3, a: Vec3, b: Vec3) -> (f64, f64) {
    let ab = b - a;
    let len2 = ab.norm2();
    if len2 == 0.0 {
        return (p.dist(a), 0.0);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (p.dist(a + ab * t), t)
}

/// Closest approach of segments [p1,q1] and [p2,q2]: (s, t, distance).
///
/// Clamped closest-point computation; robust for degenerate (point) segments
/// and near-parallel pairs.
pub fn seg_seg(p1: Vec3, q1: Vec3, p2: Vec3, q2: Vec3) -> (f64, f64, f64) {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm2();
    let e = d2.norm2();
    let f = d2.dot(r);

    let (mut s, mut t);
    if a == 0.0 && e == 0.0 {
        return (0.0, 0.0, p1.dist(p2));
    }
    if a == 0.0 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(r);
        if e == 0.0 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            s = if denom != 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
        }
    }
    let cp1 = p1 + d1 * s;
    let cp2 = p2 + d2 * t;
    (s, t, cp1.dist(cp2))
}

/// Closest approach of the infinite line through o with unit direction d and
/// the segment [a, b]: (line parameter, segment parameter in [0,1], distance).
pub fn line_seg(o: Vec3, d: Vec3, a: Vec3, b: Vec3) -> (f64, f64, f64) {
    let e = b - a;
    let r = a - o;
    let ee = e.norm2();
    if ee == 0.0 {
        let lam = d.dot(r);
        return (lam, 0.0, (r - d * lam).norm());
    }
    let de = d.dot(e);
    // Minimize |o + lam d - a - u e|^2 over lam free, u in [0,1].
    let denom = ee - de * de; // |d|=1
    let mut u = if denom > ee * 1e-14 {
        (d.dot(r) * de - r.dot(e)) / denom
    } else {
        0.0
    };
    u = u.clamp(0.0, 1.0);
    let lam = d.dot(r + e * u);
    let p = a + e * u;
    (lam, u, (o + d * lam).dist(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_is_right_handed() {
        let e1 = v3(1.0, 0.0, 0.0);
        let e2 = v3(0.0, 1.0, 0.0);
        assert_eq!(e1.cross(e2), v3(0.0, 0.0, 1.0));
        assert_eq!(triple(e1, e2, v3(0.0, 0.0, 1.0)), 1.0);
    }

    #[test]
    fn basis_is_orthonormal_right_handed() {
        for n in [
            v3(0.0, 0.0, 1.0),
            v3(1.0, 0.0, 0.0),
            v3(0.6, -0.8, 0.0),
            v3(0.267261, 0.534522, 0.801784),
        ] {
            let n = n.normalized();
            let (u, v) = orthonormal_basis(n);
            assert!(libm::fabs(u.norm() - 1.0) < 1e-12);
            assert!(libm::fabs(v.norm() - 1.0) < 1e-12);
            assert!(libm::fabs(u.dot(n)) < 1e-12);
            assert!(libm::fabs(v.dot(n)) < 1e-12);
            assert!((u.cross(v) - n).norm() < 1e-12);
        }
    }

    #[test]
    fn segment_distances() {
        let (s, t, d) = seg_seg(
            v3(0.0, 0.0, 0.0),
            v3(1.0, 0.0, 0.0),
            v3(0.5, 1.0, 1.0),
            v3(0.5, -1.0, 1.0),
        );
        assert!((d - 1.0).abs() < 1e-12);
        assert!((s - 0.5).abs() < 1e-12);
        assert!((t - 0.5).abs() < 1e-12);

        // Parallel segments.
        let (_, _, d) = seg_seg(
            v3(0.0, 0.0, 0.0),
            v3(1.0, 0.0, 0.0),
            v3(0.0, 2.0, 0.0),
            v3(1.0, 2.0, 0.0),
        );
        assert!((d - 2.0).abs() < 1e-12);

        // Disjoint at endpoints.
        let (s, t, d) = seg_seg(
            v3(0.0, 0.0, 0.0),
            v3(1.0, 0.0, 0.0),
            v3(2.0, 0.0, 0.0),
            v3(3.0, 0.0, 0.0),
        );
        assert!((d - 1.0).abs() < 1e-12);
        assert_eq!((s, t), (1.0, 0.0));
    }

    #[test]
    fn point_to_segment() {
        let (d, t) = point_seg(v3(0.5, 2.0, 0.0), v3(0.0, 0.0, 0.0), v3(1.0, 0.0, 0.0));
        assert!((d - 2.0).abs() < 1e-12 && (t - 0.5).abs() < 1e-12);
        let (d, t) = point_seg(v3(-3.0, 4.0, 0.0), v3(0.0, 0.0, 0.0), v3(1.0, 0.0, 0.0));
        assert!((d - 5.0).abs() < 1e-12 && t == 0.0);
    }

    #[test]
    fn line_to_segment() {
        let (lam, u, d) = line_seg(
            v3(0.0, 0.0, 1.0),
            v3(1.0, 0.0, 0.0),
            v3(5.0, -1.0, 0.0),
            v3(5.0, 1.0, 0.0),
        );
        assert!((lam - 5.0).abs() < 1e-12);
        assert!((u - 0.5).abs() < 1e-12);
        assert!((d - 1.0).abs() < 1e-12);
    }
}

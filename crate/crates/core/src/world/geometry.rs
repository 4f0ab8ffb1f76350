use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Vec2 { x: c, y: s }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Vec2 {
        Vec2 {
            x: -self.y,
            y: self.x,
        }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = a.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

/// Rectangle with arbitrary orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    pub center: Vec2,
    pub heading: f64,
    pub length: f64,
    pub width: f64,
}

impl OrientedRect {
    pub fn axes(&self) -> [Vec2; 2] {
        let fwd = Vec2::from_angle(self.heading);
        [fwd, fwd.perp()]
    }

    /// Corners in counter-clockwise order starting front-left.
    pub fn corners(&self) -> [Vec2; 4] {
        let [fwd, left] = self.axes();
        let f = fwd * (self.length / 2.0);
        let l = left * (self.width / 2.0);
        [
            self.center + f + l,
            self.center - f + l,
            self.center - f - l,
            self.center + f - l,
        ]
    }

    fn project(&self, axis: Vec2) -> (f64, f64) {
        let c = self.corners();
        c.iter()
            .map(|p| p.dot(axis))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn diagonal(&self) -> f64 {
        self.length.hypot(self.width)
    }

    /// Separating-axis test. Touching edges count as overlap.
    pub fn overlaps(&self, other: &OrientedRect) -> bool {
        if self.center.distance(other.center) > (self.diagonal() + other.diagonal()) / 2.0 {
            return false;
        }
        let [a0, a1] = self.axes();
        let [b0, b1] = other.axes();
        for axis in [a0, a1, b0, b1] {
            let (lo1, hi1) = self.project(axis);
            let (lo2, hi2) = other.project(axis);
            if hi1 < lo2 || hi2 < lo1 {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn car(x: f64, y: f64, heading: f64) -> OrientedRect {
        OrientedRect {
            center: Vec2::new(x, y),
            heading,
            length: 4.5,
            width: 2.0,
        }
    }

    #[test]
    fn far_apart_cars_do_not_collide() {
        assert!(!car(0.0, 0.0, 0.0).overlaps(&car(30.0, 0.0, 0.0)));
    }

    #[test]
    fn identical_poses_collide() {
        assert!(car(5.0, 1.0, 0.3).overlaps(&car(5.0, 1.0, 0.3)));
    }

    #[test]
    fn rotated_rectangles_use_all_axes() {
        // Axis-aligned boxes would overlap here; the rotated footprint does not.
        let a = car(0.0, 0.0, std::f64::consts::FRAC_PI_4);
        let b = car(3.2, -3.2, std::f64::consts::FRAC_PI_4);
        assert!(!a.overlaps(&b));
        let c = car(2.0, 1.0, 0.0);
        assert!(a.overlaps(&c));
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
        assert!((wrap_angle(7.0) - (7.0 - std::f64::consts::TAU)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn overlap_is_symmetric(
            x in -10.0f64..10.0, y in -10.0f64..10.0,
            h1 in -3.2f64..3.2, h2 in -3.2f64..3.2,
        ) {
            let a = car(0.0, 0.0, h1);
            let b = car(x, y, h2);
            prop_assert_eq!(a.overlaps(&b), b.overlaps(&a));
            if (x * x + y * y).sqrt() > (a.diagonal() + b.diagonal()) / 2.0 {
                prop_assert!(!a.overlaps(&b));
            }
        }
    }
}

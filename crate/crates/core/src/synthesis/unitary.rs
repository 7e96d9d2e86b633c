use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::Mul;

use num_complex::Complex64;

/// A 2×2 unitary, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2(pub [[Complex64; 2]; 2]);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Unitary2 {
    pub fn identity() -> Self {
        Self([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]])
    }

    pub fn h() -> Self {
        let h = c(FRAC_1_SQRT_2, 0.0);
        Self([[h, h], [h, -h]])
    }

    pub fn x() -> Self {
        Self([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
    }

    pub fn y() -> Self {
        Self([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
    }

    /// `diag(1, e^{iθ})`.
    pub fn phase(theta: f64) -> Self {
        Self([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, theta)]])
    }

    /// `diag(1, e^{iπk/4})`, i.e. `T^k`, with exact entries for every `k`.
    pub fn t_power(k: u8) -> Self {
        let s = FRAC_1_SQRT_2;
        let entry = match k % 8 {
            0 => c(1.0, 0.0),
            1 => c(s, s),
            2 => c(0.0, 1.0),
            3 => c(-s, s),
            4 => c(-1.0, 0.0),
            5 => c(-s, -s),
            6 => c(0.0, -1.0),
            _ => c(s, -s),
        };
        Self([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), entry]])
    }

    /// `exp(-iθZ/2)`.
    pub fn rz(theta: f64) -> Self {
        Self([
            [Complex64::from_polar(1.0, -theta / 2.0), c(0.0, 0.0)],
            [c(0.0, 0.0), Complex64::from_polar(1.0, theta / 2.0)],
        ])
    }

    /// `exp(-iθY/2)`.
    pub fn ry(theta: f64) -> Self {
        let (s, co) = (theta / 2.0).sin_cos();
        Self([[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
    }

    /// `exp(-iθX/2)`.
    pub fn rx(theta: f64) -> Self {
        let (s, co) = (theta / 2.0).sin_cos();
        Self([[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]])
    }

    /// `cos(θ/2) I - i sin(θ/2) n·σ` for a unit axis `n`.
    pub fn rotation(axis: [f64; 3], theta: f64) -> Self {
        let (s, co) = (theta / 2.0).sin_cos();
        Self::from_quaternion([co, -s * axis[2], -s * axis[1], -s * axis[0]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let m = &self.0;
        Self([[m[0][0] * z, m[0][1] * z], [m[1][0] * z, m[1][1] * z]])
    }

    /// Frobenius distance `‖U†U - I‖`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint() * *self;
        let i = Self::identity();
        (0..2)
            .flat_map(|r| (0..2).map(move |col| (r, col)))
            .map(|(r, col)| (p.0[r][col] - i.0[r][col]).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// The SU(2) representative `[[α, β], [-β̄, ᾱ]]` as `(Re α, Im α, Re β, Im β)`,
    /// defined up to overall sign.
    pub fn to_quaternion(&self) -> [f64; 4] {
        let phase = self.det().sqrt();
        let su = self.scale(phase.inv());
        let (a, b) = (su.0[0][0], su.0[0][1]);
        let q = [a.re, a.im, b.re, b.im];
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        q.map(|v| v / n)
    }

    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let a = c(q[0], q[1]);
        let b = c(q[2], q[3]);
        Self([[a, b], [-b.conj(), a.conj()]])
    }

    /// Quaternion with the sign fixed by making the first non-negligible component positive.
    pub fn canonical_quaternion(&self) -> [f64; 4] {
        let q = self.to_quaternion();
        let lead = q.iter().copied().find(|v| v.abs() > 1e-9).unwrap_or(1.0);
        if lead < 0.0 {
            q.map(|v| -v)
        } else {
            q
        }
    }

    /// Rotation angle in `[0, π]` and unit axis `(x, y, z)` of the SO(3) image.
    pub fn axis_angle(&self) -> ([f64; 3], f64) {
        let mut q = self.to_quaternion();
        if q[0] < 0.0 {
            q = q.map(|v| -v);
        }
        // q = (cos(θ/2), -sin(θ/2) n_z, -sin(θ/2) n_y, -sin(θ/2) n_x)
        let v = [-q[3], -q[2], -q[1]];
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let theta = 2.0 * s.atan2(q[0]);
        if s < 1e-15 {
            return ([0.0, 0.0, 1.0], 0.0);
        }
        (v.map(|x| x / s), theta)
    }

    /// Projective operator-norm distance `min_φ ‖U - e^{iφ} V‖`.
    pub fn distance(&self, other: &Unitary2) -> f64 {
        quaternion_distance(&self.to_quaternion(), &other.to_quaternion())
    }
}

/// Projective operator-norm distance between SU(2) elements given as quaternions: `min ‖p ∓ q‖`.
pub fn quaternion_distance(p: &[f64; 4], q: &[f64; 4]) -> f64 {
    let minus: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
    let plus: f64 = p.iter().zip(q).map(|(a, b)| (a + b) * (a + b)).sum();
    minus.min(plus).sqrt()
}

impl Mul for Unitary2 {
    type Output = Unitary2;

    fn mul(self, rhs: Unitary2) -> Unitary2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (col, v) in row.iter_mut().enumerate() {
                *v = a[r][0] * b[0][col] + a[r][1] * b[1][col];
            }
        }
        Unitary2(out)
    }
}

pub(crate) fn wrap_angle(theta: f64) -> f64 {
    (theta + PI).rem_euclid(2.0 * PI) - PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;
    use proptest::prelude::*;

    /// Independent route: largest singular value of `U - e^{iφ}V` minimised over a fine φ grid,
    /// then polished by golden-section search.
    fn brute_distance(u: &Unitary2, v: &Unitary2) -> f64 {
        let to_na = |m: &Unitary2| Matrix2::new(m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]);
        let (mu, mv) = (to_na(u), to_na(v));
        let f = |phi: f64| {
            let d = mu - mv * Complex64::from_polar(1.0, phi);
            d.svd(false, false).singular_values.max()
        };
        let steps = 2000;
        let best =
            (0..steps).map(|i| 2.0 * PI * i as f64 / steps as f64).min_by(|a, b| f(*a).total_cmp(&f(*b))).unwrap();
        let (mut lo, mut hi) = (best - 2.0 * PI / steps as f64, best + 2.0 * PI / steps as f64);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if f(m1) < f(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        f(0.5 * (lo + hi))
    }

    fn random_unitary(a: f64, b: f64, cc: f64, phase: f64) -> Unitary2 {
        (Unitary2::rz(a) * Unitary2::ry(b) * Unitary2::rz(cc)).scale(Complex64::from_polar(1.0, phase))
    }

    #[test]
    fn t_powers_are_exact() {
        let t = Unitary2::phase(PI / 4.0);
        let mut acc = Unitary2::identity();
        for k in 0..8u8 {
            assert!(acc.distance(&Unitary2::t_power(k)) < 1e-15);
            let exact = Unitary2::t_power(k);
            for r in 0..2 {
                for col in 0..2 {
                    assert!((acc.0[r][col] - exact.0[r][col]).norm() < 1e-15);
                }
            }
            acc = t * acc;
        }
    }

    #[test]
    fn distance_ignores_global_phase() {
        let u = random_unitary(0.3, 1.1, -0.4, 0.0);
        assert!(u.distance(&u.scale(Complex64::from_polar(1.0, 2.2))) < 1e-15);
        assert!((Unitary2::identity().distance(&Unitary2::x()) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn axis_angle_roundtrip() {
        let axis = [0.48, -0.6, 0.64];
        let u = Unitary2::rotation(axis, 1.3);
        let (a, t) = u.axis_angle();
        assert!((t - 1.3).abs() < 1e-14);
        assert!(a.iter().zip(axis).all(|(x, y)| (x - y).abs() < 1e-14));
        let (ax, tx) = Unitary2::rx(0.7).axis_angle();
        assert!((tx - 0.7).abs() < 1e-14 && (ax[0] - 1.0).abs() < 1e-14);
        let (az, tz) = Unitary2::rz(0.7).axis_angle();
        assert!((tz - 0.7).abs() < 1e-14 && (az[2] - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn distance_matches_singular_value_route(
            a in -PI..PI, b in -PI..PI, cc in -PI..PI, p in -PI..PI,
            d in -PI..PI, e in -PI..PI, f in -PI..PI, q in -PI..PI,
        ) {
            let u = random_unitary(a, b, cc, p);
            let v = random_unitary(d, e, f, q);
            prop_assert!((u.distance(&v) - brute_distance(&u, &v)).abs() < 1e-9);
        }

        #[test]
        fn products_stay_unitary(a in -PI..PI, b in -PI..PI, cc in -PI..PI) {
            let u = random_unitary(a, b, cc, 0.3) * Unitary2::h() * Unitary2::t_power(3);
            prop_assert!(u.unitarity_defect() < 1e-12);
        }
    }
}

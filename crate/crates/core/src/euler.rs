//! Group elements as z-y-z Euler angles, with composition and inversion
//! carried out through the unit-quaternion double cover.
//!
//! The quaternion q = (w, x, y, z) corresponds to the 2x2 unitary
//! U = w*I - i*(x*sx + y*sy + z*sz), so U(q1*q2) = U(q1)*U(q2) and the
//! rotation-matrix trace is recovered from the scalar part.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

/// A rotation g = (alpha, beta, gamma) in the z-y-z convention.
/// Canonical ranges: alpha, gamma in [0, 2*pi), beta in [0, pi].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub const IDENTITY: EulerAngles = EulerAngles { alpha: 0.0, beta: 0.0, gamma: 0.0 };

    /// Store the triple, wrapping into the canonical ranges when any
    /// component falls outside them. In-range inputs are kept bit-exact.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        let g = EulerAngles { alpha, beta, gamma };
        if g.in_ranges() {
            g
        } else {
            g.canonical()
        }
    }

    fn in_ranges(&self) -> bool {
        (0.0..TAU).contains(&self.alpha)
            && (0.0..=PI).contains(&self.beta)
            && (0.0..TAU).contains(&self.gamma)
    }

    /// Canonical representative: ranges as above, and gamma folded to 0
    /// when beta = 0 or pi (the gimbal-degenerate configurations).
    pub fn canonical(&self) -> EulerAngles {
        Quaternion::from_euler(self).to_euler()
    }

    /// Equality as rotations: quaternions compared up to global sign.
    pub fn approx_eq(&self, other: &EulerAngles, tol: f64) -> bool {
        let p = Quaternion::from_euler(self);
        let q = Quaternion::from_euler(other);
        p.dist_up_to_sign(&q) <= tol
    }
}

/// g1 . g2, meaning "apply g2 first, then g1":
/// D^j(compose(g1, g2)) = D^j(g1) D^j(g2) for every spin j.
pub fn compose(g1: &EulerAngles, g2: &EulerAngles) -> EulerAngles {
    Quaternion::from_euler(g1)
        .mul(&Quaternion::from_euler(g2))
        .to_euler()
}

/// Inverse rotation; compose(g, inverse(g)) is the identity up to
/// canonicalization.
pub fn inverse(g: &EulerAngles) -> EulerAngles {
    Quaternion::from_euler(g).conj().to_euler()
}

/// Draw a Haar-distributed rotation: alpha, gamma uniform on [0, 2*pi),
/// cos(beta) uniform on [-1, 1].
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> EulerAngles {
    let alpha = TAU * rng.gen::<f64>();
    let cos_beta: f64 = 1.0 - 2.0 * rng.gen::<f64>();
    let gamma = TAU * rng.gen::<f64>();
    EulerAngles::new(alpha, cos_beta.clamp(-1.0, 1.0).acos(), gamma)
}

/// Unit quaternion; the double cover of the rotation group.
#[derive(Clone, Copy, Debug)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub fn from_euler(g: &EulerAngles) -> Quaternion {
        let (ha, hb, hg) = (g.alpha / 2.0, g.beta / 2.0, g.gamma / 2.0);
        let (cb, sb) = (hb.cos(), hb.sin());
        Quaternion {
            w: cb * (ha + hg).cos(),
            x: -sb * (ha - hg).sin(),
            y: sb * (ha - hg).cos(),
            z: cb * (ha + hg).sin(),
        }
    }

    pub fn to_euler(&self) -> EulerAngles {
        let cb = self.w.hypot(self.z); // cos(beta/2)
        let sb = self.x.hypot(self.y); // sin(beta/2)
        let beta = 2.0 * sb.atan2(cb);
        if sb <= 1e-15 {
            // beta = 0: only alpha + gamma matters; fold into alpha.
            return EulerAngles { alpha: wrap_tau(2.0 * self.z.atan2(self.w)), beta: 0.0, gamma: 0.0 };
        }
        if cb <= 1e-15 {
            // beta = pi: only alpha - gamma matters; fold into alpha.
            return EulerAngles { alpha: wrap_tau(2.0 * (-self.x).atan2(self.y)), beta: PI, gamma: 0.0 };
        }
        let sum = self.z.atan2(self.w); // (alpha + gamma) / 2
        let dif = (-self.x).atan2(self.y); // (alpha - gamma) / 2
        EulerAngles {
            alpha: wrap_tau(sum + dif),
            beta: beta.clamp(0.0, PI),
            gamma: wrap_tau(sum - dif),
        }
    }

    pub fn mul(&self, o: &Quaternion) -> Quaternion {
        Quaternion {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }

    pub fn conj(&self) -> Quaternion {
        Quaternion { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    /// Max-component distance to `other`, minimized over the global sign.
    pub fn dist_up_to_sign(&self, other: &Quaternion) -> f64 {
        let d = |s: f64| -> f64 {
            (self.w - s * other.w)
                .abs()
                .max((self.x - s * other.x).abs())
                .max((self.y - s * other.y).abs())
                .max((self.z - s * other.z).abs())
        };
        d(1.0).min(d(-1.0))
    }
}

fn wrap_tau(x: f64) -> f64 {
    let mut y = x % TAU;
    if y < 0.0 {
        y += TAU;
    }
    // x % TAU can return TAU - eps rounding up to TAU after the add
    if y >= TAU {
        y = 0.0;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn compose_with_identity_is_identity_map() {
        let g = EulerAngles::new(0.3, 1.1, 5.2);
        let h = compose(&g, &EulerAngles::IDENTITY);
        assert!(g.approx_eq(&h, 1e-14));
        let h2 = compose(&EulerAngles::IDENTITY, &g);
        assert!(g.approx_eq(&h2, 1e-14));
    }

    #[test]
    fn inverse_cancels() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let g = haar_sample(&mut rng);
            let e = compose(&g, &inverse(&g));
            assert!(e.approx_eq(&EulerAngles::IDENTITY, 1e-13), "residual from {e:?}");
        }
    }

    #[test]
    fn canonicalization_preserves_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let raw = EulerAngles {
                alpha: 40.0 * (rng.gen::<f64>() - 0.5),
                beta: 40.0 * (rng.gen::<f64>() - 0.5),
                gamma: 40.0 * (rng.gen::<f64>() - 0.5),
            };
            let c = raw.canonical();
            assert!((0.0..TAU).contains(&c.alpha), "alpha {}", c.alpha);
            assert!((0.0..=PI).contains(&c.beta), "beta {}", c.beta);
            assert!((0.0..TAU).contains(&c.gamma), "gamma {}", c.gamma);
            assert!(raw.approx_eq(&c, 1e-12));
        }
    }

    #[test]
    fn degenerate_beta_folds_gamma() {
        let c = EulerAngles { alpha: 1.0, beta: 0.0, gamma: 2.0 }.canonical();
        assert_eq!(c.gamma, 0.0);
        assert!((c.alpha - 3.0).abs() < 1e-14);
        let c = EulerAngles { alpha: 1.0, beta: PI, gamma: 0.5 }.canonical();
        assert_eq!(c.gamma, 0.0);
        assert!((c.alpha - 0.5).abs() < 1e-14 && c.beta == PI);
    }

    #[test]
    fn haar_is_deterministic_for_fixed_seed() {
        let mut r1 = ChaCha8Rng::seed_from_u64(99);
        let mut r2 = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            let a = haar_sample(&mut r1);
            let b = haar_sample(&mut r2);
            assert_eq!((a.alpha, a.beta, a.gamma), (b.alpha, b.beta, b.gamma));
        }
    }

    #[test]
    fn haar_means_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let mut sum_cb = 0.0;
        let mut sum_t = 0.0;
        let mut sum_t2 = 0.0;
        for _ in 0..n {
            let g = haar_sample(&mut rng);
            sum_cb += g.beta.cos();
            let t = crate::wigner::trace_rep1(&g);
            sum_t += t;
            sum_t2 += t * t;
        }
        // Var(cos beta) = 1/3, so 5 sigma = 5 / sqrt(3 n)
        let bound = 5.0 / (3.0 * n as f64).sqrt();
        assert!((sum_cb / n as f64).abs() < bound);
        // random guessing scores zero on average; Var(t) = 1
        let nf = n as f64;
        let se = ((sum_t2 - sum_t * sum_t / nf) / (nf - 1.0) / nf).sqrt();
        assert!((sum_t / nf).abs() < 5.0 * se, "mean t {}", sum_t / nf);
    }
}

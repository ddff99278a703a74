//! Double-double arithmetic for moment sums.
//!
//! Monomial-basis inner products of Gaussian-polynomial functions cancel
//! heavily once the degree passes ~8, so the exact-moment sums are carried in
//! an unevaluated pair `hi + lo` (about 32 significant digits) and rounded
//! to `f64` only at the end.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Real double-double number.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };

    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        // one Newton step on the f64 root doubles the digits
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, r);
        Dd { hi, lo }
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn powi(self, n: u32) -> Dd {
        let mut acc = Dd::ONE;
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

/// Complex double-double number.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: CDd = CDd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> CDd {
        CDd { re, im }
    }

    pub fn from_c64(z: Complex64) -> CDd {
        CDd {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    pub fn from_real(x: Dd) -> CDd {
        CDd { re: x, im: Dd::ZERO }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(self) -> CDd {
        CDd {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    pub fn scale(self, s: Dd) -> CDd {
        CDd {
            re: self.re * s,
            im: self.im * s,
        }
    }

    pub fn recip(self) -> CDd {
        let n = self.norm_sqr();
        CDd {
            re: self.re / n,
            im: -self.im / n,
        }
    }

    /// Principal square root.
    pub fn sqrt(self) -> CDd {
        let z0 = self.to_c64().sqrt();
        if z0 == Complex64::new(0.0, 0.0) {
            return CDd::ZERO;
        }
        // Newton: w <- (w + z/w)/2
        let w = CDd::from_c64(z0);
        let w = (w + self * w.recip()).scale(Dd::from_f64(0.5));
        (w + self * w.recip()).scale(Dd::from_f64(0.5))
    }

    pub fn powi(self, n: u32) -> CDd {
        let mut acc = CDd::ONE;
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
}

impl Add for CDd {
    type Output = CDd;
    #[inline]
    fn add(self, o: CDd) -> CDd {
        CDd {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for CDd {
    type Output = CDd;
    #[inline]
    fn sub(self, o: CDd) -> CDd {
        CDd {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Neg for CDd {
    type Output = CDd;
    fn neg(self) -> CDd {
        CDd {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for CDd {
    type Output = CDd;
    #[inline]
    fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Div for CDd {
    type Output = CDd;
    fn div(self, o: CDd) -> CDd {
        self * o.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_squared_carries_extra_digits() {
        let p2 = Dd::PI * Dd::PI;
        // pi^2 - fl(pi^2) = 6.2652955087397117e-16
        let err = (p2 - Dd::from_f64(9.869_604_401_089_358)).to_f64();
        assert!((err - 6.265_295_508_739_711_7e-16).abs() < 1e-30);
    }

    #[test]
    fn division_and_sqrt_round_trip() {
        let x = Dd::from_f64(2.0);
        let s = x.sqrt();
        let back = s * s - x;
        assert!(back.to_f64().abs() < 1e-30);
        let third = Dd::ONE / Dd::from_f64(3.0);
        let r = third * Dd::from_f64(3.0) - Dd::ONE;
        assert!(r.to_f64().abs() < 1e-31);
    }

    #[test]
    fn complex_sqrt_is_principal() {
        let z = CDd::from_c64(Complex64::new(-3.0, 4.0));
        let w = z.sqrt();
        assert!((w.to_c64() - Complex64::new(1.0, 2.0)).norm() < 1e-15);
        let r = w * w - z;
        assert!(r.re.to_f64().abs() < 1e-28 && r.im.to_f64().abs() < 1e-28);
    }
}

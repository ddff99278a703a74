//! Special functions and closed-form constants.
//!
//! Everything here is pure. The `*_dd` variants return double-double values
//! built from exact rational (Pochhammer) products, and are what the
//! analytic function classes use internally; the plain `f64` versions go
//! through `log_gamma` and serve as the independent route in checks.

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Ambient dimension `d` of the base space R^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub const MAX: u32 = 64;

    pub fn new(d: u32) -> Result<Self> {
        if d == 0 || d > Self::MAX {
            return Err(Error::Domain(format!(
                "dimension must lie in 1..={}, got {d}",
                Self::MAX
            )));
        }
        Ok(Dimension(d))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Half the dimension, `d/2`.
    #[inline]
    pub fn half(self) -> f64 {
        0.5 * self.0 as f64
    }

    /// Dimension of the product space R^d x R^d.
    pub fn doubled(self) -> Result<Dimension> {
        Dimension::new(2 * self.0)
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;
    fn try_from(d: u32) -> Result<Self> {
        Dimension::new(d)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// B_{2k} / (2k (2k-1)) for k = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];
/// ln(2π)/2
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_617_639_861_397_473_6;
/// Below this the argument is shifted up by the recurrence Γ(x+1) = xΓ(x).
const STIRLING_MIN: f64 = 16.0;

/// ln Γ(x) for x > 0: Stirling series with Bernoulli coefficients, after
/// shifting the argument above 16.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    // exact at the two integer roots
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    let mut y = x;
    let mut prod = 1.0;
    while y < STIRLING_MIN {
        prod *= y;
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let series = STIRLING
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * inv2 + c)
        * inv;
    let main = (y - 0.5) * y.ln() - y + HALF_LN_2PI + series;
    Ok(main - prod.ln())
}

fn lg(x: f64) -> f64 {
    // callers guarantee x > 0
    log_gamma(x).expect("positive argument")
}

/// ln B(a, b).
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("beta requires a, b > 0, got ({a}, {b})")));
    }
    Ok(lg(a) + lg(b) - lg(a + b))
}

/// Surface measure of the unit sphere S^{n-1} in R^n, `2 pi^{n/2} / Γ(n/2)`.
pub fn sphere_area(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("sphere_area requires n >= 1".into()));
    }
    let h = 0.5 * n as f64;
    Ok(2.0 * (h * PI.ln() - lg(h)).exp())
}

/// λ_{d,m} = Γ(m + d/2)/Γ(m + d) · Γ(d)/Γ(d/2), computed in log space.
pub fn eigenvalue_lambda(d: Dimension, m: u32) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let h = d.half();
    let n = d.as_f64();
    let m = m as f64;
    ((lg(m + h) - lg(m + n)) + (lg(n) - lg(h))).exp()
}

/// Two-sided sphere moment c_{j,k}(d) = ∫_{S^{2d-1}} |x|^{2j} |y|^{2k} dσ for
/// the normalized surface measure, = B(j + d/2, k + d/2) / B(d/2, d/2).
pub fn sphere_moment(d: Dimension, j: u32, k: u32) -> f64 {
    if j == 0 && k == 0 {
        return 1.0;
    }
    let h = d.half();
    let num = lg(j as f64 + h) + lg(k as f64 + h) - lg((j + k) as f64 + d.as_f64());
    let den = 2.0 * lg(h) - lg(d.as_f64());
    (num - den).exp()
}

/// Rising factorial (a)_n in double-double.
pub fn pochhammer_dd(a: f64, n: u32) -> Dd {
    let mut acc = Dd::ONE;
    for i in 0..n {
        acc = acc * Dd::from_f64(a + i as f64);
    }
    acc
}

/// Same quantity as [`sphere_moment`], as the exact ratio
/// (d/2)_j (d/2)_k / (d)_{j+k}.
pub fn sphere_moment_dd(d: Dimension, j: u32, k: u32) -> Dd {
    let h = d.half();
    pochhammer_dd(h, j) * pochhammer_dd(h, k) / pochhammer_dd(d.as_f64(), j + k)
}

/// Average of the monomial η^α over the unit sphere S^{n-1} ⊂ R^n
/// (zero when any exponent is odd).
pub fn sphere_monomial_average_dd(n: u32, alpha: &[u32]) -> Dd {
    if alpha.iter().any(|a| a % 2 == 1) {
        return Dd::ZERO;
    }
    let half_total: u32 = alpha.iter().map(|a| a / 2).sum();
    let num = alpha
        .iter()
        .fold(Dd::ONE, |acc, &a| acc * pochhammer_dd(0.5, a / 2));
    num / pochhammer_dd(0.5 * n as f64, half_total)
}

/// ∫_{R^d} |x|^{2s} e^{-c|x|^2} dx = (surf(d)/2) Γ(s + d/2) c^{-(s + d/2)},
/// principal branch.
pub fn gaussian_radial_moment(d: Dimension, s: u32, c: Complex64) -> Result<Complex64> {
    if !(c.re > 0.0) {
        return Err(Error::Domain(format!(
            "gaussian moment requires Re c > 0, got {c}"
        )));
    }
    let p = s as f64 + d.half();
    let pre = 0.5 * sphere_area(d.get())? * lg(p).exp();
    Ok(c.powc(Complex64::new(-p, 0.0)) * pre)
}

/// Double-double evaluation of the same moment via
/// (π/c)^{d/2} (d/2)_s c^{-s}. Caller guarantees Re c > 0.
pub fn gaussian_radial_moment_dd(d: Dimension, s: u32, c: CDd) -> CDd {
    let inv = c.recip();
    let base = CDd::from_real(Dd::PI) * inv;
    let dn = d.get();
    let pref = if dn % 2 == 0 {
        base.powi(dn / 2)
    } else {
        base.sqrt().powi(dn)
    };
    pref * inv.powi(s) * CDd::from_real(pochhammer_dd(d.half(), s))
}

/// Precomputed table of Gaussian moments μ_s(c) for s = 0..=max_s.
pub(crate) fn gaussian_moment_table(d: Dimension, max_s: u32, c: CDd) -> Vec<CDd> {
    let inv = c.recip();
    let base = CDd::from_real(Dd::PI) * inv;
    let dn = d.get();
    let mut cur = if dn % 2 == 0 {
        base.powi(dn / 2)
    } else {
        base.sqrt().powi(dn)
    };
    let h = d.half();
    let mut out = Vec::with_capacity(max_s as usize + 1);
    for s in 0..=max_s {
        out.push(cur);
        cur = cur * inv * CDd::from_real(Dd::from_f64(s as f64 + h));
    }
    out
}

/// Regularized incomplete Beta, returning `(I_u(a,b), 1 - I_u(a,b))` with
/// the smaller of the two computed directly.
pub fn incomplete_beta_regularized(u: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!(
            "incomplete beta requires a, b > 0, got ({a}, {b})"
        )));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!(
            "incomplete beta requires u in [0,1], got {u}"
        )));
    }
    if u == 0.0 {
        return Ok((0.0, 1.0));
    }
    if u == 1.0 {
        return Ok((1.0, 0.0));
    }
    let ln_front = a * u.ln() + b * (1.0 - u).ln() - log_beta(a, b)?;
    if u < (a + 1.0) / (a + b + 2.0) {
        let p = ln_front.exp() * beta_cf(u, a, b) / a;
        Ok((p, 1.0 - p))
    } else {
        let q = ln_front.exp() * beta_cf(1.0 - u, b, a) / b;
        Ok((1.0 - q, q))
    }
}

/// Unnormalized incomplete Beta ∫_0^u t^{a-1} (1-t)^{b-1} dt.
pub fn incomplete_beta(u: f64, a: f64, b: f64) -> Result<f64> {
    let (p, _) = incomplete_beta_regularized(u, a, b)?;
    Ok(p * log_beta(a, b)?.exp())
}

/// Continued fraction for the incomplete Beta (modified Lentz).
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=2000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dim(d: u32) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn log_gamma_special_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_relative_eq!(log_gamma(0.5).unwrap(), 0.5 * PI.ln(), max_relative = 1e-14);
        assert_relative_eq!(log_gamma(5.0).unwrap(), 24f64.ln(), max_relative = 1e-14);
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn log_gamma_matches_factorials_and_half_integers() {
        // ln((n-1)!) and ln Γ(n + 1/2) = ln(√π (2n)! / (4^n n!)) by direct summation
        let mut ln_fact = 0.0f64;
        for n in 1..=170u32 {
            if n > 1 {
                ln_fact += ((n - 1) as f64).ln();
            }
            let got = log_gamma(n as f64).unwrap();
            if n > 2 {
                assert_relative_eq!(got, ln_fact, max_relative = 1e-13);
            }
        }
        let mut ln_half = 0.5 * PI.ln();
        for n in 0..150u32 {
            let x = n as f64 + 0.5;
            let got = log_gamma(x).unwrap();
            if n == 0 || n > 2 {
                assert_relative_eq!(got, ln_half, max_relative = 1e-13);
            } else {
                assert!((got - ln_half).abs() < 1e-14);
            }
            ln_half += x.ln();
        }
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(1).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(2).unwrap(), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(3).unwrap(), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(4).unwrap(), 2.0 * PI * PI, max_relative = 1e-14);
        assert!(sphere_area(0).is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue_lambda(dim(1), 0), 1.0);
        assert_relative_eq!(eigenvalue_lambda(dim(3), 1), 0.5, max_relative = 1e-14);
        assert_relative_eq!(eigenvalue_lambda(dim(1), 2), 0.375, max_relative = 1e-14);
        assert_relative_eq!(eigenvalue_lambda(dim(1), 3), 0.3125, max_relative = 1e-14);
    }

    #[test]
    fn eigenvalue_ratio_recursion_and_monotonicity() {
        for d in 1..=8 {
            let d = dim(d);
            assert_relative_eq!(eigenvalue_lambda(d, 1), 0.5, max_relative = 1e-14);
            for m in 0..=20u32 {
                let r = eigenvalue_lambda(d, m + 1) / eigenvalue_lambda(d, m);
                let want = (m as f64 + d.half()) / (m as f64 + d.as_f64());
                assert!((r - want).abs() < 1e-13, "d={d} m={m}");
                assert!(eigenvalue_lambda(d, m + 1) < eigenvalue_lambda(d, m));
            }
        }
    }

    #[test]
    fn sphere_moment_examples() {
        for d in 1..=6 {
            assert_eq!(sphere_moment(dim(d), 0, 0), 1.0);
        }
        assert_relative_eq!(sphere_moment(dim(1), 2, 0), 0.375, max_relative = 1e-13);
        assert_relative_eq!(sphere_moment(dim(1), 1, 1), 0.125, max_relative = 1e-13);
        for d in 1..=5 {
            for j in 0..10 {
                assert!((sphere_moment(dim(d), j, 0) - eigenvalue_lambda(dim(d), j)).abs() < 1e-12);
                for k in 0..10 {
                    let a = sphere_moment(dim(d), j, k);
                    let b = sphere_moment(dim(d), k, j);
                    assert_relative_eq!(a, b, max_relative = 1e-14);
                    let e = sphere_moment_dd(dim(d), j, k).to_f64();
                    assert_relative_eq!(a, e, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn sphere_moment_angular_quadrature_oracle() {
        // d = 1: c_{1,1} = E[cos^2 θ sin^2 θ] under uniform θ on the circle
        let n = 20000;
        let h = 2.0 * PI / n as f64;
        let s: f64 = (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                (t.cos() * t.sin()).powi(2)
            })
            .sum::<f64>()
            * h
            / (2.0 * PI);
        assert_relative_eq!(s, 0.125, max_relative = 1e-12);
    }

    #[test]
    fn gaussian_moment_examples() {
        let pi = Complex64::new(PI, 0.0);
        assert!((gaussian_radial_moment(dim(1), 0, pi).unwrap() - 1.0).norm() < 1e-14);
        assert!(
            (gaussian_radial_moment(dim(1), 1, pi).unwrap() - 1.0 / (2.0 * PI)).norm() < 1e-14
        );
        assert!((gaussian_radial_moment(dim(2), 0, pi).unwrap() - 1.0).norm() < 1e-14);
        assert!(gaussian_radial_moment(dim(1), 0, Complex64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn gaussian_moment_recursion_and_dd_agree() {
        let cs = [
            Complex64::new(0.7, 0.0),
            Complex64::new(1.3, 2.1),
            Complex64::new(0.2, -3.0),
        ];
        for d in 1..=4 {
            let d = dim(d);
            for &c in &cs {
                for s in 0..12 {
                    let m0 = gaussian_radial_moment(d, s, c).unwrap();
                    let m1 = gaussian_radial_moment(d, s + 1, c).unwrap();
                    let want = m0 * (s as f64 + d.half()) / c;
                    assert!((m1 - want).norm() <= 1e-12 * m1.norm());
                    let dd = gaussian_radial_moment_dd(d, s, CDd::from_c64(c)).to_c64();
                    assert!((dd - m0).norm() <= 1e-12 * m0.norm());
                }
            }
        }
    }

    #[test]
    fn gaussian_moment_matches_radial_quadrature() {
        // midpoint rule on a fine grid, integrand decays fast
        let d = dim(3);
        let c = Complex64::new(0.9, 0.4);
        let surf = sphere_area(3).unwrap();
        for s in 0..4 {
            let n = 200_000;
            let rmax = 12.0;
            let h = rmax / n as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let r = (i as f64 + 0.5) * h;
                acc += (-c * r * r).exp() * r.powi(2 * s as i32 + 2);
            }
            acc *= surf * h;
            let want = gaussian_radial_moment(d, s, c).unwrap();
            assert!((acc - want).norm() < 1e-10 * want.norm());
        }
    }

    #[test]
    fn incomplete_beta_examples() {
        let b = |a: f64, b: f64| log_beta(a, b).unwrap().exp();
        assert_relative_eq!(incomplete_beta(1.0, 2.5, 1.5).unwrap(), b(2.5, 1.5), max_relative = 1e-13);
        assert_relative_eq!(incomplete_beta(0.5, 1.0, 1.0).unwrap(), 0.5, max_relative = 1e-13);
        assert_relative_eq!(incomplete_beta(0.25, 0.5, 0.5).unwrap(), PI / 3.0, max_relative = 1e-12);
        assert!(incomplete_beta(1.5, 1.0, 1.0).is_err());
        assert!(incomplete_beta(0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn incomplete_beta_integer_parameters_closed_form() {
        // I_u(1, b) = 1 - (1-u)^b ; I_u(2,2) = 3u^2 - 2u^3
        for &u in &[0.01, 0.2, 0.5, 0.77, 0.999] {
            let (p, q) = incomplete_beta_regularized(u, 1.0, 3.0).unwrap();
            assert_relative_eq!(p, 1.0 - (1.0f64 - u).powi(3), max_relative = 1e-12);
            assert_relative_eq!(q, (1.0f64 - u).powi(3), max_relative = 1e-12);
            let (p, _) = incomplete_beta_regularized(u, 2.0, 2.0).unwrap();
            assert_relative_eq!(p, 3.0 * u * u - 2.0 * u * u * u, max_relative = 1e-12);
        }
    }

    #[test]
    fn monomial_sphere_average() {
        // E[η_1^2] = 1/n, E[η_1^4] = 3/(n(n+2)), E[η_1^2 η_2^2] = 1/(n(n+2))
        for n in 2..8u32 {
            let nf = n as f64;
            let mut a = vec![0u32; n as usize];
            a[0] = 2;
            assert_relative_eq!(sphere_monomial_average_dd(n, &a).to_f64(), 1.0 / nf, max_relative = 1e-15);
            a[0] = 4;
            assert_relative_eq!(
                sphere_monomial_average_dd(n, &a).to_f64(),
                3.0 / (nf * (nf + 2.0)),
                max_relative = 1e-15
            );
            a[0] = 2;
            a[1] = 2;
            assert_relative_eq!(
                sphere_monomial_average_dd(n, &a).to_f64(),
                1.0 / (nf * (nf + 2.0)),
                max_relative = 1e-15
            );
            a[1] = 1;
            assert_eq!(sphere_monomial_average_dd(n, &a).to_f64(), 0.0);
        }
    }
}

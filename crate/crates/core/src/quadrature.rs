//! Quadrature rules: Gauss-Legendre, symmetric Gauss-Jacobi on [0, 1],
//! adaptive Gauss-Kronrod, and barycentric interpolation on a node set.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};

/// A rule `∫ f(x) w(x) dx ≈ Σ weights[i] f(nodes[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss-Legendre rule with `n` nodes on [a, b], nodes increasing.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<Rule> {
    if n == 0 {
        return Err(Error::Usage("Gauss-Legendre rule needs at least one node".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let half = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root
        nodes[n - 1 - i] = mid + half * x;
        nodes[i] = mid - half * x;
        weights[n - 1 - i] = w * half;
        weights[i] = w * half;
    }
    if n % 2 == 1 {
        nodes[n / 2] = mid;
    }
    Ok(Rule { nodes, weights })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss rule for the Beta(h, h) probability density
/// `u^{h-1} (1-u)^{h-1} / B(h, h)` on [0, 1] (Golub-Welsch).
///
/// Weights sum to one; the rule is exact for polynomials in `u` of degree
/// `2n - 1`.
pub fn gauss_jacobi_symmetric_unit(n: usize, h: f64) -> Result<Rule> {
    if n == 0 {
        return Err(Error::Usage("Gauss-Jacobi rule needs at least one node".into()));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("Jacobi exponent requires h > 0, got {h}")));
    }
    // Jacobi on [-1, 1] with alpha = beta = h - 1; diagonal entries vanish.
    let al = h - 1.0;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let b = if k == 1 {
            4.0 * (1.0 + al) * (1.0 + al) / ((2.0 + 2.0 * al).powi(2) * (3.0 + 2.0 * al))
        } else {
            kf * (kf + 2.0 * al) / ((2.0 * kf + 2.0 * al + 1.0) * (2.0 * kf + 2.0 * al - 1.0))
        };
        let s = b.sqrt();
        t[(k, k - 1)] = s;
        t[(k - 1, k)] = s;
    }
    let eig = SymmetricEigen::new(t);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + x) / 2.0, v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrize to remove eigen-solver asymmetry
    let m = pairs.len();
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let x = 0.5 * (pairs[i].0 + 1.0 - pairs[j].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (x, w);
        pairs[j] = (1.0 - x, w);
    }
    if m % 2 == 1 {
        pairs[m / 2].0 = 0.5;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    Ok(Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / total).collect(),
    })
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) integration of `f` over [a, b].
///
/// Returns the estimate once the summed error estimate falls below
/// `max(abs_tol, rel_tol * |I|)`; the interval list is bisected globally,
/// largest error first.
pub fn adaptive_gk<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = kronrod15(&mut f, a, b);
    let mut segs = vec![(a, b, v, e)];
    for _ in 0..2000 {
        let total: f64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = segs.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (v1, e1) = kronrod15(&mut f, lo, mid);
        let (v2, e2) = kronrod15(&mut f, mid, hi);
        segs.push((lo, mid, v1, e1));
        segs.push((mid, hi, v2, e2));
    }
    // order-independent total
    segs.sort_by(|x, y| x.0.total_cmp(&y.0));
    neumaier_sum(segs.iter().map(|s| s.2))
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in it {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// Barycentric weights for polynomial interpolation through `nodes`,
/// scaled so the largest has magnitude one.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    if n == 0 {
        return Vec::new();
    }
    let lo = nodes[0];
    let hi = nodes[n - 1];
    // interval capacity is (hi - lo)/4, so scale differences by 4/(hi - lo)
    let scale = if hi > lo { 4.0 / (hi - lo) } else { 1.0 };
    let logs: Vec<(f64, bool)> = (0..n)
        .map(|j| {
            let mut lsum = 0.0;
            let mut neg = false;
            for k in 0..n {
                if k != j {
                    let diff = (nodes[j] - nodes[k]) * scale;
                    lsum += diff.abs().ln();
                    if diff < 0.0 {
                        neg = !neg;
                    }
                }
            }
            (-lsum, neg)
        })
        .collect();
    let max = logs.iter().map(|l| l.0).fold(f64::NEG_INFINITY, f64::max);
    logs.iter()
        .map(|&(l, neg)| {
            let v = (l - max).exp();
            if neg {
                -v
            } else {
                v
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre(10, 0.0, 2.0).unwrap();
        for k in 0..20 {
            let got = r.integrate(|x| x.powi(k));
            let want = 2f64.powi(k + 1) / (k + 1) as f64;
            assert_relative_eq!(got, want, max_relative = 1e-13);
        }
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(gauss_legendre(0, 0.0, 1.0).is_err());
    }

    #[test]
    fn legendre_large_rule_weights_sum() {
        for &n in &[64usize, 128, 313, 1024] {
            let r = gauss_legendre(n, -1.0, 1.0).unwrap();
            assert_relative_eq!(r.weights.iter().sum::<f64>(), 2.0, max_relative = 1e-13);
            let g = r.integrate(|x| (-x * x).exp());
            assert_relative_eq!(g, 1.493_648_265_624_854, max_relative = 1e-14);
        }
    }

    #[test]
    fn jacobi_reproduces_beta_moments() {
        // E[u^k] under Beta(h,h) = Π_{i<k} (h+i)/(2h+i)
        for &h in &[0.5, 1.0, 1.5, 2.0, 3.5] {
            let r = gauss_jacobi_symmetric_unit(24, h).unwrap();
            let mut want = 1.0;
            for k in 0..40 {
                let got = r.integrate(|u| u.powi(k));
                assert_relative_eq!(got, want, max_relative = 1e-12);
                want *= (h + k as f64) / (2.0 * h + k as f64);
            }
        }
    }

    #[test]
    fn chebyshev_case_has_arcsine_nodes() {
        // h = 1/2: Gauss-Chebyshev nodes u = (1 + cos((2i-1)π/2n))/2, equal weights
        let n = 16;
        let r = gauss_jacobi_symmetric_unit(n, 0.5).unwrap();
        for (i, (&x, &w)) in r.nodes.iter().zip(&r.weights).enumerate() {
            let k = (n - i) as f64;
            let want = 0.5 * (1.0 + ((2.0 * k - 1.0) * std::f64::consts::PI / (2.0 * n as f64)).cos());
            assert!((x - want).abs() < 1e-14);
            assert!((w - 1.0 / n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn kronrod_exact_on_polynomials_and_adaptive_converges() {
        let mut f = |x: f64| x.powi(21) + 3.0 * x.powi(4);
        let (v, _) = kronrod15(&mut f, 0.0, 1.0);
        assert_relative_eq!(v, 1.0 / 22.0 + 0.6, max_relative = 1e-14);
        let v = adaptive_gk(|x| x.sqrt(), 0.0, 1.0, 1e-13, 1e-13);
        assert_relative_eq!(v, 2.0 / 3.0, max_relative = 1e-12);
        let v = adaptive_gk(|x| (1.0 - x * x).sqrt(), -1.0, 1.0, 1e-13, 0.0);
        assert_relative_eq!(v, std::f64::consts::FRAC_PI_2, max_relative = 1e-12);
    }

    #[test]
    fn barycentric_interpolates_smooth_function() {
        let r = gauss_legendre(64, 0.0, 5.0).unwrap();
        let w = barycentric_weights(&r.nodes);
        let vals: Vec<f64> = r.nodes.iter().map(|&x| (-x * x).exp() * x.cos()).collect();
        for &x in &[0.0, 0.37, 1.9, 4.2, 5.0] {
            let mut num = 0.0;
            let mut den = 0.0;
            for j in 0..64 {
                let t = w[j] / (x - r.nodes[j]);
                num += t * vals[j];
                den += t;
            }
            assert!((num / den - (-x * x).exp() * x.cos()).abs() < 1e-13);
        }
    }
}

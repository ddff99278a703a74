//! Function representations on R^d.
//!
//! * [`GaussPolyFun`]: `P(|x|^2) e^{-γ|x|^2}` with complex coefficients and
//!   complex width, closed under Fourier transform, dilation and modulation.
//! * [`MonomialGaussFun`]: `c x^α e^{-γ|x|^2}`, the non-radial test class.
//! * [`ProfileFun`]: a radial profile sampled on Gauss-Legendre radii, with
//!   barycentric interpolation between nodes.
//!
//! Inner products between analytic functions are exact moment sums carried
//! in double-double arithmetic; anything involving a profile goes through
//! the profile's radial quadrature.

mod descriptor;
mod lorentz;

pub use descriptor::{c64_pair, FunDescriptor, PairDescriptor};
pub use lorentz::{lorentz_24_norm, lorentz_24_norm_of_modulus, RadialModulus};

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use crate::quadrature::{barycentric_weights, gauss_legendre};
use crate::scalars::{
    gaussian_moment_table, pochhammer_dd, sphere_area, sphere_monomial_average_dd, Dimension,
};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

const TRIM_REL: f64 = 1e-15;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_width(width: Complex64) -> Result<()> {
    if !(width.re > 0.0) || !width.im.is_finite() {
        return Err(Error::Domain(format!(
            "Gaussian width must have positive real part, got {width}"
        )));
    }
    Ok(())
}

/// Sum of `a_j conj(b_k) mu_{j+k}` in double-double.
fn moment_pairing(a: &[Complex64], b: &[Complex64], moments: &[CDd]) -> CDd {
    let mut acc = CDd::ZERO;
    for (j, &aj) in a.iter().enumerate() {
        if aj == c(0.0, 0.0) {
            continue;
        }
        let aj = CDd::from_c64(aj);
        let mut row = CDd::ZERO;
        for (k, &bk) in b.iter().enumerate() {
            if bk == c(0.0, 0.0) {
                continue;
            }
            row = row + CDd::from_c64(bk.conj()) * moments[j + k];
        }
        acc = acc + aj * row;
    }
    acc
}

/// `(Σ_j p_j |x|^{2j}) e^{-γ|x|^2}` on R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussPolyFun {
    d: Dimension,
    width: Complex64,
    coeffs: Vec<Complex64>,
}

impl GaussPolyFun {
    pub fn new(d: Dimension, width: Complex64, coeffs: Vec<Complex64>) -> Result<Self> {
        check_width(width)?;
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("non-finite polynomial coefficient".into()));
        }
        let mut f = GaussPolyFun { d, width, coeffs };
        f.trim();
        Ok(f)
    }

    /// Real-coefficient constructor.
    pub fn from_real(d: Dimension, width: Complex64, coeffs: &[f64]) -> Result<Self> {
        Self::new(d, width, coeffs.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// `e^{-γ|x|^2}`.
    pub fn gaussian(d: Dimension, width: Complex64) -> Result<Self> {
        Self::new(d, width, vec![c(1.0, 0.0)])
    }

    /// The reference Gaussian F(x) = e^{-π|x|^2/2}, of unit L^2 norm.
    pub fn reference(d: Dimension) -> Self {
        GaussPolyFun {
            d,
            width: c(PI / 2.0, 0.0),
            coeffs: vec![c(1.0, 0.0)],
        }
    }

    pub fn zero(d: Dimension, width: Complex64) -> Result<Self> {
        Self::new(d, width, Vec::new())
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn width(&self) -> Complex64 {
        self.width
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Polynomial degree in |x|^2; `None` for the zero function.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Drops trailing coefficients whose term norm `|p_j| ‖|x|^{2j} e^{-γ|x|^2}‖`
    /// is below `1e-15` of the largest term norm. The comparison is by term
    /// norm rather than raw |p_j| so that it is unchanged by dilation.
    fn trim(&mut self) {
        while let Some(last) = self.coeffs.last() {
            if *last == c(0.0, 0.0) {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        if self.coeffs.len() < 2 {
            return;
        }
        let mags = self.term_norms();
        let max = mags.iter().cloned().fold(0.0, f64::max);
        while self.coeffs.len() > 1 {
            let j = self.coeffs.len() - 1;
            if mags[j] <= TRIM_REL * max {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    fn term_norms(&self) -> Vec<f64> {
        // ‖t^j E_γ‖^2 = mu_{2j}(2 Re γ); computed in log space to avoid overflow
        let a = 2.0 * self.width.re;
        let h = self.d.half();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let s = 2 * j;
                let mut l = 0.0;
                for i in 0..s {
                    l += (i as f64 + h).ln();
                }
                l -= s as f64 * a.ln();
                p.norm() * (0.5 * l).exp()
            })
            .collect()
    }

    pub fn eval_r2(&self, t: f64) -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for p in self.coeffs.iter().rev() {
            acc = acc * t + p;
        }
        acc * (-self.width * t).exp()
    }

    /// Value at radius `r`.
    pub fn eval(&self, r: f64) -> Complex64 {
        self.eval_r2(r * r)
    }

    pub fn scale(&self, s: Complex64) -> GaussPolyFun {
        GaussPolyFun {
            d: self.d,
            width: self.width,
            coeffs: self.coeffs.iter().map(|p| p * s).collect(),
        }
    }

    fn same_width(&self, other: &GaussPolyFun) -> Result<()> {
        if self.d != other.d {
            return Err(Error::Usage(format!(
                "dimension mismatch: {} vs {}",
                self.d, other.d
            )));
        }
        let tol = 1e-14 * self.width.norm().max(other.width.norm());
        if (self.width - other.width).norm() > tol {
            return Err(Error::Usage(format!(
                "widths differ ({} vs {}); sums stay in the class only for equal widths",
                self.width, other.width
            )));
        }
        Ok(())
    }

    /// `self + s * other` for equal widths.
    pub fn axpy(&self, s: Complex64, other: &GaussPolyFun) -> Result<GaussPolyFun> {
        self.same_width(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|j| {
                let a = CDd::from_c64(self.coeffs.get(j).copied().unwrap_or_default());
                let b = CDd::from_c64(other.coeffs.get(j).copied().unwrap_or_default())
                    * CDd::from_c64(s);
                (a + b).to_c64()
            })
            .collect();
        GaussPolyFun::new(self.d, self.width, coeffs)
    }

    pub fn add(&self, other: &GaussPolyFun) -> Result<GaussPolyFun> {
        self.axpy(c(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &GaussPolyFun) -> Result<GaussPolyFun> {
        self.axpy(c(-1.0, 0.0), other)
    }

    /// Multiplication by |x|^2.
    pub fn mul_r2(&self) -> GaussPolyFun {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        if !self.coeffs.is_empty() {
            coeffs.push(c(0.0, 0.0));
            coeffs.extend_from_slice(&self.coeffs);
        }
        GaussPolyFun {
            d: self.d,
            width: self.width,
            coeffs,
        }
    }

    /// The Euler operator `x·∇f`, which stays in the class:
    /// `2t (P'(t) - γ P(t)) e^{-γt}` with `t = |x|^2`.
    pub fn euler_operator(&self) -> GaussPolyFun {
        let n = self.coeffs.len();
        let mut coeffs = vec![c(0.0, 0.0); n + 1];
        for (j, p) in self.coeffs.iter().enumerate() {
            // t * P'(t) contributes j p_j t^j ; -γ t P contributes -γ p_j t^{j+1}
            coeffs[j] += p * (2.0 * j as f64);
            coeffs[j + 1] -= p * self.width * 2.0;
        }
        GaussPolyFun {
            d: self.d,
            width: self.width,
            coeffs,
        }
    }

    pub(crate) fn inner_dd(&self, other: &GaussPolyFun) -> Result<CDd> {
        if self.d != other.d {
            return Err(Error::Usage(format!(
                "dimension mismatch: {} vs {}",
                self.d, other.d
            )));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(CDd::ZERO);
        }
        let cw = self.width + other.width.conj();
        let max_s = (self.coeffs.len() + other.coeffs.len() - 2) as u32;
        let moments = gaussian_moment_table(self.d, max_s, CDd::from_c64(cw));
        Ok(moment_pairing(&self.coeffs, &other.coeffs, &moments))
    }

    /// Closed-form `⟨self, other⟩ = ∫ self · conj(other)`.
    pub fn inner(&self, other: &GaussPolyFun) -> Result<Complex64> {
        Ok(self.inner_dd(other)?.to_c64())
    }

    pub(crate) fn norm_sqr_dd(&self) -> Dd {
        self.inner_dd(self).expect("same dimension").re
    }

    pub fn norm_sqr(&self) -> f64 {
        self.norm_sqr_dd().to_f64().max(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Exact Fourier transform `∫ e^{-2πi x·ξ} f(x) dx`, again in the class
    /// with width `π²/γ`.
    pub fn fourier(&self) -> GaussPolyFun {
        let n = self.coeffs.len();
        let h = self.d.half();
        let new_width = c(PI * PI, 0.0) / self.width;
        if n == 0 {
            return GaussPolyFun {
                d: self.d,
                width: new_width,
                coeffs: Vec::new(),
            };
        }
        // (-∂_γ)^j [γ^{-d/2} e^{-a/γ}] = Σ_k table[j][k] a^k γ^{-d/2-j-k} e^{-a/γ}
        let mut table: Vec<Vec<f64>> = vec![vec![1.0]];
        for j in 0..n - 1 {
            let prev = &table[j];
            let mut next = vec![0.0; prev.len() + 1];
            for (k, &v) in prev.iter().enumerate() {
                next[k] += (h + (j + k) as f64) * v;
                next[k + 1] -= v;
            }
            table.push(next);
        }
        let winv = CDd::from_c64(self.width).recip();
        let base = CDd::from_real(Dd::PI) * winv;
        let dn = self.d.get();
        let pref = if dn % 2 == 0 {
            base.powi(dn / 2)
        } else {
            base.sqrt().powi(dn)
        };
        let pi2 = Dd::PI * Dd::PI;
        let mut out = vec![CDd::ZERO; n];
        for (j, p) in self.coeffs.iter().enumerate() {
            let pj = CDd::from_c64(*p) * pref;
            for (k, &t) in table[j].iter().enumerate() {
                let term = pj
                    * CDd::from_real(Dd::from_f64(t) * pi2.powi(k as u32))
                    * winv.powi((j + k) as u32);
                out[k] = out[k] + term;
            }
        }
        GaussPolyFun::new(self.d, new_width, out.iter().map(|z| z.to_c64()).collect())
            .expect("transformed width has positive real part")
    }

    /// `f(ρx)`, or `ρ^{d/2} f(ρx)` when `l2_normalized`.
    pub fn dilate(&self, rho: f64, l2_normalized: bool) -> Result<GaussPolyFun> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!("dilation requires ρ > 0, got {rho}")));
        }
        let pre = if l2_normalized {
            rho.powf(self.d.half())
        } else {
            1.0
        };
        let r2 = rho * rho;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, p)| p * pre * r2.powi(j as i32))
            .collect();
        GaussPolyFun::new(self.d, self.width * r2, coeffs)
    }

    /// `e^{it|x|^2} f(x)`: the width moves to `γ - it`.
    pub fn modulate(&self, t: f64) -> GaussPolyFun {
        GaussPolyFun {
            d: self.d,
            width: self.width - c(0.0, t),
            coeffs: self.coeffs.clone(),
        }
    }

    /// The same function expressed with width `new_width`, by expanding
    /// `e^{-(γ - γ')|x|²}` in its Taylor series. Terms are kept until their
    /// norm falls below `rel_tol·‖f‖`; the series must converge within 60
    /// extra degrees.
    pub fn rewidth(&self, new_width: Complex64, rel_tol: f64) -> Result<GaussPolyFun> {
        const MAX_EXTRA: usize = 60;
        let target = GaussPolyFun::zero(self.d, new_width)?;
        if self.is_zero() {
            return Ok(target);
        }
        let delta = CDd::from_c64(self.width - new_width);
        let total = self.norm();
        let p: Vec<CDd> = self.coeffs.iter().map(|&z| CDd::from_c64(z)).collect();
        let mut acc = vec![CDd::ZERO; p.len() + MAX_EXTRA + 1];
        // factor = (-δ)^k / k!
        let mut factor = CDd::ONE;
        let mut quiet = 0;
        for k in 0..=MAX_EXTRA {
            let term: Vec<Complex64> = std::iter::repeat(Complex64::new(0.0, 0.0))
                .take(k)
                .chain(p.iter().map(|&pj| (pj * factor).to_c64()))
                .collect();
            for (j, &pj) in p.iter().enumerate() {
                acc[j + k] = acc[j + k] + pj * factor;
            }
            let tn = GaussPolyFun::new(self.d, new_width, term)?.norm();
            if tn <= rel_tol * total {
                quiet += 1;
                if quiet == 2 {
                    acc.truncate(p.len() + k);
                    return GaussPolyFun::new(
                        self.d,
                        new_width,
                        acc.iter().map(|z| z.to_c64()).collect(),
                    );
                }
            } else {
                quiet = 0;
            }
            factor = factor * (-delta).scale(Dd::ONE / Dd::from_f64((k + 1) as f64));
        }
        Err(Error::Conditioning(format!(
            "width change {} is too large for a series re-expansion",
            self.width - new_width
        )))
    }

    /// Radius beyond which the Gaussian tail mass is negligible (< 1e-16 of
    /// the peak-degree term), `R^2 = (40 + 6 deg)/Re γ`.
    pub fn tail_radius(&self) -> f64 {
        let deg = self.degree().unwrap_or(0) as f64;
        ((40.0 + 6.0 * deg) / self.width.re).sqrt()
    }

    /// Samples onto Gauss-Legendre radii.
    pub fn to_profile(&self, spec: &NodeSpec) -> Result<ProfileFun> {
        let radius = spec.radius.unwrap_or_else(|| self.tail_radius());
        let n = match spec.count {
            Some(n) => n,
            None => {
                let deg = self.degree().unwrap_or(0) as f64;
                let osc = self.width.im.abs() * radius * radius;
                let n = (64.0 + 1.5 * osc + 8.0 * deg).ceil() as usize;
                n.clamp(DEFAULT_PROFILE_NODES, 2048)
            }
        };
        let grid = RadialGrid::gauss_legendre(n, radius)?;
        let samples = grid.nodes.iter().map(|&r| self.eval(r)).collect();
        ProfileFun::new(self.d, Arc::new(grid), samples)
    }
}

/// `c x^α e^{-γ|x|^2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialGaussFun {
    d: Dimension,
    alpha: Vec<u32>,
    coeff: Complex64,
    width: Complex64,
}

impl MonomialGaussFun {
    pub fn new(d: Dimension, alpha: Vec<u32>, coeff: Complex64, width: Complex64) -> Result<Self> {
        check_width(width)?;
        if alpha.len() != d.get() as usize {
            return Err(Error::Usage(format!(
                "multi-index has {} entries, dimension is {}",
                alpha.len(),
                d
            )));
        }
        Ok(MonomialGaussFun {
            d,
            alpha,
            coeff,
            width,
        })
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }

    pub fn width(&self) -> Complex64 {
        self.width
    }

    pub fn total_degree(&self) -> u32 {
        self.alpha.iter().sum()
    }

    pub fn has_odd_component(&self) -> bool {
        self.alpha.iter().any(|a| a % 2 == 1)
    }

    /// Radial when α = 0, in which case it is a Gaussian.
    pub fn as_gauss_poly(&self) -> Option<GaussPolyFun> {
        if self.alpha.iter().all(|&a| a == 0) {
            Some(GaussPolyFun::new(self.d, self.width, vec![self.coeff]).expect("valid width"))
        } else {
            None
        }
    }

    /// Average over rotations of R^d: `c A_α |x|^{|α|} e^{-γ|x|^2}`, zero if
    /// some α_j is odd. Projections onto radial functions of R^{2d} only see
    /// this average.
    pub fn radialize(&self) -> GaussPolyFun {
        if self.has_odd_component() {
            return GaussPolyFun::zero(self.d, self.width).expect("valid width");
        }
        let avg = sphere_monomial_average_dd(self.d.get(), &self.alpha);
        let k = (self.total_degree() / 2) as usize;
        let mut coeffs = vec![c(0.0, 0.0); k + 1];
        coeffs[k] = (CDd::from_c64(self.coeff) * CDd::from_real(avg)).to_c64();
        GaussPolyFun::new(self.d, self.width, coeffs).expect("valid width")
    }

    fn inner_monomial_dd(&self, other: &MonomialGaussFun) -> CDd {
        let cw = CDd::from_c64(self.width + other.width.conj());
        let mut half_total = 0u32;
        let mut acc = CDd::from_c64(self.coeff * other.coeff.conj());
        for (a, b) in self.alpha.iter().zip(&other.alpha) {
            let n = a + b;
            if n % 2 == 1 {
                return CDd::ZERO;
            }
            acc = acc * CDd::from_real(pochhammer_dd(0.5, n / 2));
            half_total += n / 2;
        }
        let inv = cw.recip();
        let base = CDd::from_real(Dd::PI) * inv;
        let dn = self.d.get();
        let pref = if dn % 2 == 0 {
            base.powi(dn / 2)
        } else {
            base.sqrt().powi(dn)
        };
        acc * pref * inv.powi(half_total)
    }

    fn inner_gauss_poly_dd(&self, other: &GaussPolyFun) -> CDd {
        if self.has_odd_component() || other.is_zero() {
            return CDd::ZERO;
        }
        let avg = sphere_monomial_average_dd(self.d.get(), &self.alpha);
        let shift = (self.total_degree() / 2) as usize;
        let cw = CDd::from_c64(self.width + other.width.conj());
        let max_s = (shift + other.coeffs.len() - 1) as u32;
        let moments = gaussian_moment_table(self.d, max_s, cw);
        let mut acc = CDd::ZERO;
        for (k, q) in other.coeffs.iter().enumerate() {
            acc = acc + CDd::from_c64(q.conj()) * moments[shift + k];
        }
        acc * CDd::from_c64(self.coeff) * CDd::from_real(avg)
    }

    /// Fourier transform; stays a single monomial only when every α_j ≤ 1,
    /// using `(x e^{-γx²})^ = -iπξ/γ · √(π/γ) e^{-π²ξ²/γ}` per coordinate.
    pub fn fourier(&self) -> Result<MonomialGaussFun> {
        if self.alpha.iter().any(|&a| a > 1) {
            return Err(Error::Unsupported(
                "Fourier transform of x^α e^{-γ|x|^2} leaves the single-monomial class when some α_j > 1"
                    .into(),
            ));
        }
        let g = self.width;
        let root = (c(PI, 0.0) / g).sqrt();
        let mut coeff = self.coeff * root.powu(self.d.get());
        let factor = c(0.0, -PI) / g;
        coeff *= factor.powu(self.total_degree());
        MonomialGaussFun::new(self.d, self.alpha.clone(), coeff, c(PI * PI, 0.0) / g)
    }

    pub fn dilate(&self, rho: f64, l2_normalized: bool) -> Result<MonomialGaussFun> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!("dilation requires ρ > 0, got {rho}")));
        }
        let pre = if l2_normalized {
            rho.powf(self.d.half())
        } else {
            1.0
        };
        MonomialGaussFun::new(
            self.d,
            self.alpha.clone(),
            self.coeff * pre * rho.powi(self.total_degree() as i32),
            self.width * rho * rho,
        )
    }

    pub fn modulate(&self, t: f64) -> MonomialGaussFun {
        MonomialGaussFun {
            d: self.d,
            alpha: self.alpha.clone(),
            coeff: self.coeff,
            width: self.width - c(0.0, t),
        }
    }

    pub fn scale(&self, s: Complex64) -> MonomialGaussFun {
        MonomialGaussFun {
            coeff: self.coeff * s,
            ..self.clone()
        }
    }
}

pub const DEFAULT_PROFILE_NODES: usize = 128;
pub const MIN_PROFILE_NODES: usize = 16;

/// How to sample a function onto radii.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NodeSpec {
    /// Number of Gauss-Legendre nodes; chosen from width and degree when `None`.
    pub count: Option<usize>,
    /// Outer radius; the Gaussian tail radius when `None`.
    pub radius: Option<f64>,
}

impl NodeSpec {
    pub fn with_count(n: usize) -> Self {
        NodeSpec {
            count: Some(n),
            radius: None,
        }
    }
}

/// Radial nodes with quadrature weights for `∫_0^R g(r) dr` and
/// barycentric weights for interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    bary: Vec<f64>,
    support: f64,
}

impl RadialGrid {
    pub fn gauss_legendre(n: usize, radius: f64) -> Result<Self> {
        if n < MIN_PROFILE_NODES {
            return Err(Error::Usage(format!(
                "profiles need at least {MIN_PROFILE_NODES} nodes, got {n}"
            )));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("grid radius must be positive, got {radius}")));
        }
        let rule = gauss_legendre(n, 0.0, radius)?;
        let bary = barycentric_weights(&rule.nodes);
        Ok(RadialGrid {
            nodes: rule.nodes,
            weights: rule.weights,
            bary,
            support: radius,
        })
    }

    /// Arbitrary node set (e.g. read from a descriptor).
    pub fn from_parts(nodes: Vec<f64>, weights: Vec<f64>, support: Option<f64>) -> Result<Self> {
        if nodes.len() < MIN_PROFILE_NODES {
            return Err(Error::Usage(format!(
                "profiles need at least {MIN_PROFILE_NODES} nodes, got {}",
                nodes.len()
            )));
        }
        if nodes.len() != weights.len() {
            return Err(Error::Usage("nodes and weights differ in length".into()));
        }
        if !(nodes[0] > 0.0) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("nodes must be positive and strictly increasing".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::Domain("quadrature weights must be positive".into()));
        }
        let last = *nodes.last().expect("non-empty");
        let support = support.unwrap_or(last).max(last);
        let bary = barycentric_weights(&nodes);
        Ok(RadialGrid {
            nodes,
            weights,
            bary,
            support,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn scaled(&self, rho: f64) -> RadialGrid {
        RadialGrid {
            nodes: self.nodes.iter().map(|r| r / rho).collect(),
            weights: self.weights.iter().map(|w| w / rho).collect(),
            bary: self.bary.clone(),
            support: self.support / rho,
        }
    }

    /// Barycentric interpolation of `values` at `r`; zero outside the support.
    pub fn interpolate(&self, values: &[Complex64], r: f64) -> Complex64 {
        if r > self.support || r < 0.0 {
            return c(0.0, 0.0);
        }
        let mut num = c(0.0, 0.0);
        let mut den = 0.0;
        for ((&x, &w), v) in self.nodes.iter().zip(&self.bary).zip(values) {
            let diff = r - x;
            if diff == 0.0 {
                return *v;
            }
            let t = w / diff;
            num += v * t;
            den += t;
        }
        num / den
    }
}

/// Radial function `f(x) = u(|x|)` stored by samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileFun {
    d: Dimension,
    grid: Arc<RadialGrid>,
    samples: Vec<Complex64>,
}

impl ProfileFun {
    pub fn new(d: Dimension, grid: Arc<RadialGrid>, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Usage(format!(
                "{} samples for {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        Ok(ProfileFun { d, grid, samples })
    }

    /// Samples `u` on a fresh Gauss-Legendre grid.
    pub fn from_fn<F: Fn(f64) -> Complex64>(
        d: Dimension,
        n: usize,
        radius: f64,
        u: F,
    ) -> Result<Self> {
        let grid = RadialGrid::gauss_legendre(n, radius)?;
        let samples = grid.nodes.iter().map(|&r| u(r)).collect();
        ProfileFun::new(d, Arc::new(grid), samples)
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        self.grid.interpolate(&self.samples, r)
    }

    /// `|f|` as a profile on the same nodes.
    pub fn modulus(&self) -> ProfileFun {
        ProfileFun {
            d: self.d,
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|z| c(z.norm(), 0.0)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> ProfileFun {
        ProfileFun {
            d: self.d,
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|z| z * s).collect(),
        }
    }

    /// `surf(d) Σ w_i u_i conj(v(r_i)) r_i^{d-1}`, `v` evaluated at this grid.
    fn pair_with<V: Fn(f64) -> Complex64>(&self, v: V) -> Complex64 {
        let surf = sphere_area(self.d.get()).expect("d >= 1");
        let dm1 = self.d.get() as i32 - 1;
        let terms: Vec<Complex64> = self
            .grid
            .nodes
            .iter()
            .zip(&self.grid.weights)
            .zip(&self.samples)
            .map(|((&r, &w), u)| u * v(r).conj() * (w * r.powi(dm1)))
            .collect();
        let re = crate::quadrature::neumaier_sum(terms.iter().map(|z| z.re));
        let im = crate::quadrature::neumaier_sum(terms.iter().map(|z| z.im));
        c(re, im) * surf
    }

    pub fn norm_sqr(&self) -> f64 {
        self.pair_with(|r| self.eval_at_node_or_interp(r)).re.max(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn eval_at_node_or_interp(&self, r: f64) -> Complex64 {
        // nodes hit exactly inside interpolate()
        self.eval(r)
    }

    pub fn dilate(&self, rho: f64, l2_normalized: bool) -> Result<ProfileFun> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!("dilation requires ρ > 0, got {rho}")));
        }
        let pre = if l2_normalized {
            rho.powf(self.d.half())
        } else {
            1.0
        };
        Ok(ProfileFun {
            d: self.d,
            grid: Arc::new(self.grid.scaled(rho)),
            samples: self.samples.iter().map(|z| z * pre).collect(),
        })
    }

    pub fn modulate(&self, t: f64) -> ProfileFun {
        let samples = self
            .grid
            .nodes
            .iter()
            .zip(&self.samples)
            .map(|(&r, z)| z * c(0.0, t * r * r).exp())
            .collect();
        ProfileFun {
            d: self.d,
            grid: self.grid.clone(),
            samples,
        }
    }
}

/// Any supported function on R^d.
#[derive(Debug, Clone, PartialEq)]
pub enum Fun {
    GaussPoly(GaussPolyFun),
    Monomial(MonomialGaussFun),
    Profile(ProfileFun),
}

impl From<GaussPolyFun> for Fun {
    fn from(f: GaussPolyFun) -> Self {
        Fun::GaussPoly(f)
    }
}

impl From<MonomialGaussFun> for Fun {
    fn from(f: MonomialGaussFun) -> Self {
        Fun::Monomial(f)
    }
}

impl From<ProfileFun> for Fun {
    fn from(f: ProfileFun) -> Self {
        Fun::Profile(f)
    }
}

impl Fun {
    pub fn dim(&self) -> Dimension {
        match self {
            Fun::GaussPoly(f) => f.dim(),
            Fun::Monomial(f) => f.dim(),
            Fun::Profile(f) => f.dim(),
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, Fun::Profile(_))
    }

    /// Rotation average as a Gaussian-polynomial function, for analytic input.
    pub fn radial_part(&self) -> Option<GaussPolyFun> {
        match self {
            Fun::GaussPoly(f) => Some(f.clone()),
            Fun::Monomial(m) => Some(m.radialize()),
            Fun::Profile(_) => None,
        }
    }

    /// `|f|` sampled as a radial profile.
    pub fn modulus_profile(&self, spec: &NodeSpec) -> Result<ProfileFun> {
        Ok(self.to_profile(spec)?.modulus())
    }

    /// Width of an analytic function.
    pub fn width(&self) -> Option<Complex64> {
        match self {
            Fun::GaussPoly(f) => Some(f.width()),
            Fun::Monomial(f) => Some(f.width()),
            Fun::Profile(_) => None,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        match self {
            Fun::GaussPoly(f) => f.norm_sqr(),
            Fun::Profile(f) => f.norm_sqr(),
            Fun::Monomial(f) => f.inner_monomial_dd(f).re.to_f64().max(0.0),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Fun {
        match self {
            Fun::GaussPoly(f) => Fun::GaussPoly(f.scale(s)),
            Fun::Monomial(f) => Fun::Monomial(f.scale(s)),
            Fun::Profile(f) => Fun::Profile(f.scale(s)),
        }
    }

    pub fn dilate(&self, rho: f64, l2_normalized: bool) -> Result<Fun> {
        Ok(match self {
            Fun::GaussPoly(f) => Fun::GaussPoly(f.dilate(rho, l2_normalized)?),
            Fun::Monomial(f) => Fun::Monomial(f.dilate(rho, l2_normalized)?),
            Fun::Profile(f) => Fun::Profile(f.dilate(rho, l2_normalized)?),
        })
    }

    pub fn modulate(&self, t: f64) -> Fun {
        match self {
            Fun::GaussPoly(f) => Fun::GaussPoly(f.modulate(t)),
            Fun::Monomial(f) => Fun::Monomial(f.modulate(t)),
            Fun::Profile(f) => Fun::Profile(f.modulate(t)),
        }
    }

    pub fn fourier(&self) -> Result<Fun> {
        match self {
            Fun::GaussPoly(f) => Ok(Fun::GaussPoly(f.fourier())),
            Fun::Monomial(f) => Ok(Fun::Monomial(f.fourier()?)),
            Fun::Profile(_) => Err(Error::Unsupported(
                "Fourier transform of sampled profiles (needs a Hankel transform)".into(),
            )),
        }
    }

    /// Radial profile of this function.
    pub fn to_profile(&self, spec: &NodeSpec) -> Result<ProfileFun> {
        match self {
            Fun::GaussPoly(f) => f.to_profile(spec),
            Fun::Profile(p) => Ok(p.clone()),
            Fun::Monomial(m) => match m.as_gauss_poly() {
                Some(g) => g.to_profile(spec),
                None => Err(Error::Unsupported(
                    "a monomial with nonzero multi-index is not radial".into(),
                )),
            },
        }
    }

    /// Value at a point of R^d.
    pub fn eval_point(&self, x: &[f64]) -> Complex64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            Fun::GaussPoly(f) => f.eval_r2(r2),
            Fun::Profile(p) => p.eval(r2.sqrt()),
            Fun::Monomial(m) => {
                let mono: f64 = x
                    .iter()
                    .zip(&m.alpha)
                    .map(|(v, &a)| v.powi(a as i32))
                    .product();
                m.coeff * mono * (-m.width * r2).exp()
            }
        }
    }
}

/// `⟨f, g⟩ = ∫ f conj(g)`.
pub fn inner(f: &Fun, g: &Fun) -> Result<Complex64> {
    if f.dim() != g.dim() {
        return Err(Error::Usage(format!(
            "dimension mismatch: {} vs {}",
            f.dim(),
            g.dim()
        )));
    }
    Ok(match (f, g) {
        (Fun::GaussPoly(a), Fun::GaussPoly(b)) => a.inner(b)?,
        (Fun::Monomial(a), Fun::Monomial(b)) => a.inner_monomial_dd(b).to_c64(),
        (Fun::Monomial(a), Fun::GaussPoly(b)) => a.inner_gauss_poly_dd(b).to_c64(),
        (Fun::GaussPoly(a), Fun::Monomial(b)) => b.inner_gauss_poly_dd(a).conj().to_c64(),
        (Fun::Profile(p), Fun::Profile(q)) => {
            if Arc::ptr_eq(&p.grid, &q.grid) || p.grid == q.grid {
                let surf = sphere_area(p.d.get())?;
                let dm1 = p.d.get() as i32 - 1;
                let terms: Vec<Complex64> = p
                    .grid
                    .nodes
                    .iter()
                    .zip(&p.grid.weights)
                    .zip(p.samples.iter().zip(&q.samples))
                    .map(|((&r, &w), (u, v))| u * v.conj() * (w * r.powi(dm1)))
                    .collect();
                let re = crate::quadrature::neumaier_sum(terms.iter().map(|z| z.re));
                let im = crate::quadrature::neumaier_sum(terms.iter().map(|z| z.im));
                c(re, im) * surf
            } else if p.grid.support >= q.grid.support {
                p.pair_with(|r| q.eval(r))
            } else {
                q.pair_with(|r| p.eval(r)).conj()
            }
        }
        (Fun::Profile(p), Fun::GaussPoly(a)) => p.pair_with(|r| a.eval(r)),
        (Fun::GaussPoly(a), Fun::Profile(p)) => p.pair_with(|r| a.eval(r)).conj(),
        (Fun::Profile(p), Fun::Monomial(m)) => profile_monomial(p, m)?,
        (Fun::Monomial(m), Fun::Profile(p)) => profile_monomial(p, m)?.conj(),
    })
}

fn profile_monomial(p: &ProfileFun, m: &MonomialGaussFun) -> Result<Complex64> {
    if m.has_odd_component() {
        return Ok(c(0.0, 0.0));
    }
    // ∫ u(|x|) conj(c x^α e^{-γ|x|^2}) dx = A_α · surf(d) ∫ u(r) conj(c e^{-γr^2}) r^{|α|+d-1} dr
    let avg = sphere_monomial_average_dd(m.d.get(), &m.alpha).to_f64();
    let deg = m.total_degree() as i32;
    Ok(p.pair_with(|r| m.coeff * r.powi(deg) * (-m.width * r * r).exp()) * avg)
}

/// `⟨f, g⟩` in double-double where both sides are analytic; profile pairings
/// are only as accurate as their quadrature and are widened from f64.
pub(crate) fn inner_dd(f: &Fun, g: &Fun) -> Result<CDd> {
    match (f, g) {
        (Fun::GaussPoly(a), Fun::GaussPoly(b)) => a.inner_dd(b),
        (Fun::Monomial(a), Fun::Monomial(b)) if a.d == b.d => Ok(a.inner_monomial_dd(b)),
        (Fun::Monomial(a), Fun::GaussPoly(b)) if a.d == b.d => Ok(a.inner_gauss_poly_dd(b)),
        (Fun::GaussPoly(a), Fun::Monomial(b)) if a.d == b.d => {
            Ok(b.inner_gauss_poly_dd(a).conj())
        }
        _ => inner(f, g).map(CDd::from_c64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn dim(d: u32) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn gp(d: u32, w: Complex64, co: &[Complex64]) -> GaussPolyFun {
        GaussPolyFun::new(dim(d), w, co.to_vec()).unwrap()
    }

    #[test]
    fn reference_gaussian_has_unit_norm() {
        for d in 1..=6 {
            let f = GaussPolyFun::reference(dim(d));
            assert!((f.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn inner_examples() {
        let d1 = dim(1);
        let f = Fun::from(GaussPolyFun::reference(d1));
        let r2f = Fun::from(GaussPolyFun::reference(d1).mul_r2());
        let ip = inner(&r2f, &f).unwrap();
        assert!((ip - c(1.0 / (2.0 * PI), 0.0)).norm() < 1e-15);
        let x1 = Fun::from(MonomialGaussFun::new(d1, vec![1], c(1.0, 0.0), c(PI / 2.0, 0.0)).unwrap());
        assert_eq!(inner(&x1, &f).unwrap(), c(0.0, 0.0));
        let g2 = Fun::from(GaussPolyFun::reference(dim(2)));
        assert!(matches!(inner(&f, &g2), Err(Error::Usage(_))));
    }

    #[test]
    fn monomial_inner_agrees_with_brute_force_grid() {
        // d = 2, f = x1^2 e^{-γ1|x|^2}, g = (1 + |x|^2) e^{-γ2|x|^2}
        let d = dim(2);
        let g1 = c(0.8, 0.3);
        let g2 = c(1.1, -0.2);
        let m = MonomialGaussFun::new(d, vec![2, 0], c(1.0, 0.5), g1).unwrap();
        let p = gp(2, g2, &[c(1.0, 0.0), c(1.0, 0.0)]);
        let closed = inner(&Fun::from(m.clone()), &Fun::from(p.clone())).unwrap();
        let n = 800;
        let lim = 7.0;
        let h = 2.0 * lim / n as f64;
        let mut acc = c(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let x = [-lim + (i as f64 + 0.5) * h, -lim + (j as f64 + 0.5) * h];
                acc += Fun::from(m.clone()).eval_point(&x) * Fun::from(p.clone()).eval_point(&x).conj();
            }
        }
        acc *= h * h;
        assert!((acc - closed).norm() < 1e-9 * closed.norm());
        // monomial-monomial route agrees with monomial-gausspoly route for the radial part
        let x2 = MonomialGaussFun::new(d, vec![0, 0], c(1.0, 0.0), g2).unwrap();
        let a = inner(&Fun::from(m.clone()), &Fun::from(x2)).unwrap();
        let b = inner(&Fun::from(m), &Fun::from(gp(2, g2, &[c(1.0, 0.0)]))).unwrap();
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn fourier_examples() {
        let d1 = dim(1);
        let f = GaussPolyFun::reference(d1).fourier();
        assert!((f.width() - c(2.0 * PI, 0.0)).norm() < 1e-14);
        assert!((f.coeffs()[0] - c(2f64.sqrt(), 0.0)).norm() < 1e-14);
        for d in 1..=4 {
            let e = GaussPolyFun::gaussian(dim(d), c(PI, 0.0)).unwrap();
            let fe = e.fourier();
            assert!((fe.width() - e.width()).norm() < 1e-14);
            assert!((fe.coeffs()[0] - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn fourier_of_r2_gaussian_matches_second_derivative_formula() {
        // d = 1: (x^2 e^{-γx^2})^ = -(4π^2)^{-1} d²/dξ² [√(π/γ) e^{-π²ξ²/γ}]
        //      = √(π/γ) (1/(2γ) - π²ξ²/γ²) e^{-π²ξ²/γ}
        let g = c(0.9, 0.7);
        let f = gp(1, g, &[c(0.0, 0.0), c(1.0, 0.0)]).fourier();
        let root = (c(PI, 0.0) / g).sqrt();
        let want0 = root / (2.0 * g);
        let want1 = -root * PI * PI / (g * g);
        assert!((f.coeffs()[0] - want0).norm() < 1e-14);
        assert!((f.coeffs()[1] - want1).norm() < 1e-13);
    }

    #[test]
    fn monomial_fourier_by_direct_quadrature() {
        let d1 = dim(1);
        let g = c(1.2, 0.4);
        let m = MonomialGaussFun::new(d1, vec![1], c(1.0, 0.0), g).unwrap();
        let fm = Fun::from(m.fourier().unwrap());
        let xi = 0.37;
        let n = 40000;
        let lim = 9.0;
        let h = 2.0 * lim / n as f64;
        let mut acc = c(0.0, 0.0);
        for i in 0..n {
            let x = -lim + (i as f64 + 0.5) * h;
            acc += c(0.0, -2.0 * PI * x * xi).exp() * x * (-g * x * x).exp();
        }
        acc *= h;
        assert!((acc - fm.eval_point(&[xi])).norm() < 1e-12);
        let m2 = MonomialGaussFun::new(d1, vec![2], c(1.0, 0.0), g).unwrap();
        assert!(matches!(m2.fourier(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn dilate_and_modulate_examples() {
        let d = dim(2);
        let f = GaussPolyFun::reference(d);
        assert_eq!(f.dilate(1.0, true).unwrap(), f);
        let e = GaussPolyFun::gaussian(d, c(0.7, 0.2)).unwrap();
        let de = e.dilate(1.7, false).unwrap();
        assert!((de.width() - c(0.7, 0.2) * 1.7 * 1.7).norm() < 1e-15);
        assert_eq!(de.coeffs(), &[c(1.0, 0.0)]);
        assert_eq!(e.modulate(0.0), e);
        assert_eq!(e.modulate(0.5).width(), c(0.7, -0.3));
        assert!(f.dilate(0.0, true).is_err());
        assert!(f.dilate(-1.0, false).is_err());
    }

    #[test]
    fn profile_norms_match_closed_form() {
        let d1 = dim(1);
        let f = GaussPolyFun::reference(d1);
        let p = f.to_profile(&NodeSpec::with_count(64)).unwrap();
        assert!((p.norm() - 1.0).abs() < 1e-8);
        let z = GaussPolyFun::zero(d1, c(1.0, 0.0)).unwrap();
        let pz = z.to_profile(&NodeSpec::default()).unwrap();
        assert!(pz.samples().iter().all(|s| *s == c(0.0, 0.0)));
        assert!(matches!(
            f.to_profile(&NodeSpec::with_count(8)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn profile_inner_products_across_representations() {
        let d = dim(3);
        let f = gp(3, c(0.8, 0.6), &[c(1.0, 0.2), c(-0.4, 0.1), c(0.05, 0.0)]);
        let g = gp(3, c(1.3, -0.4), &[c(0.3, 0.0), c(0.2, -0.7)]);
        let closed = f.inner(&g).unwrap();
        let pf = Fun::from(f.to_profile(&NodeSpec::default()).unwrap());
        let pg = Fun::from(g.to_profile(&NodeSpec::default()).unwrap());
        let a = inner(&pf, &Fun::from(g.clone())).unwrap();
        let b = inner(&Fun::from(f.clone()), &pg).unwrap();
        let ab = inner(&pf, &pg).unwrap();
        for v in [a, b, ab] {
            assert!((v - closed).norm() < 1e-9 * closed.norm(), "{v} vs {closed}");
        }
        // monomial with even α against a profile
        let m = MonomialGaussFun::new(d, vec![2, 0, 2], c(1.0, 1.0), c(0.9, 0.0)).unwrap();
        let want = inner(&Fun::from(m.clone()), &Fun::from(f.clone())).unwrap();
        let got = inner(&Fun::from(m), &pf).unwrap();
        assert!((want - got).norm() < 1e-9 * want.norm());
    }

    #[test]
    fn dilating_a_profile_preserves_normalized_norm() {
        let f = gp(2, c(1.0, 0.3), &[c(1.0, 0.0), c(0.0, 0.5)]);
        let p = f.to_profile(&NodeSpec::default()).unwrap();
        let q = p.dilate(2.5, true).unwrap();
        assert_relative_eq!(q.norm(), p.norm(), max_relative = 1e-12);
        let want = f.dilate(2.5, true).unwrap();
        for &r in &[0.1, 0.5, 1.2] {
            assert!((q.eval(r) - want.eval(r)).norm() < 1e-10);
        }
    }

    #[test]
    fn euler_operator_matches_finite_difference() {
        let f = gp(2, c(0.6, 0.9), &[c(1.0, 0.0), c(0.4, -0.2), c(0.1, 0.1)]);
        let e = f.euler_operator();
        for &r in &[0.3, 1.0, 1.7] {
            let h = 1e-5;
            let fd = (f.eval(r + h) - f.eval(r - h)) / (2.0 * h) * r;
            assert!((fd - e.eval(r)).norm() < 1e-8);
        }
    }

    #[test]
    fn trimming_is_scale_invariant() {
        let f = gp(1, c(1.0, 0.0), &[c(1.0, 0.0), c(0.0, 0.0), c(0.3, 0.0)]);
        let small = f.dilate(0.05, true).unwrap();
        assert_eq!(small.degree(), Some(2));
        let noisy = gp(1, c(1.0, 0.0), &[c(1.0, 0.0), c(1e-19, 0.0)]);
        assert_eq!(noisy.degree(), Some(0));
    }

    fn arb_gp(d: u32) -> impl Strategy<Value = GaussPolyFun> {
        (
            0.3f64..3.0,
            -2.0f64..2.0,
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
        )
            .prop_map(move |(wr, wi, co)| {
                gp(
                    d,
                    c(wr, wi),
                    &co.into_iter().map(|(a, b)| c(a, b)).collect::<Vec<_>>(),
                )
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn inner_is_conjugate_symmetric_and_sesquilinear(
            f in arb_gp(2), g in arb_gp(2), h in arb_gp(2), ar in -1.0f64..1.0, ai in -1.0f64..1.0
        ) {
            let s = c(ar, ai);
            let fg = f.inner(&g).unwrap();
            let gf = g.inner(&f).unwrap();
            prop_assert!((fg - gf.conj()).norm() <= 1e-12 * (1.0 + fg.norm()));
            // linearity in the first slot, through a sum that stays in the class
            let h2 = h.modulate(0.0).dilate(1.0, false).unwrap();
            let sum = f.scale(s);
            let lhs = sum.inner(&h2).unwrap() + g.inner(&h2).unwrap();
            let rhs = s * f.inner(&h).unwrap() + g.inner(&h).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
            prop_assert!(f.inner(&f).unwrap().im.abs() <= 1e-14 * f.norm_sqr().max(1e-300));
        }

        #[test]
        fn plancherel_and_double_transform(f in arb_gp(1), d in 1u32..4) {
            let f = GaussPolyFun::new(dim(d), f.width(), f.coeffs().to_vec()).unwrap();
            let ff = f.fourier();
            prop_assert!((ff.norm() - f.norm()).abs() <= 1e-10 * f.norm());
            let back = ff.fourier();
            let diff = back.sub(&f).unwrap();
            prop_assert!(diff.norm() <= 1e-9 * f.norm());
        }

        #[test]
        fn symmetry_actions_preserve_norm(f in arb_gp(3), rho in 0.2f64..5.0, s in -3.0f64..3.0, t in -3.0f64..3.0) {
            let n = f.norm();
            prop_assert!((f.dilate(rho, true).unwrap().norm() - n).abs() <= 1e-12 * n);
            prop_assert!((f.modulate(t).norm() - n).abs() <= 1e-12 * n);
            prop_assert_eq!(f.modulate(s).modulate(t).width(), f.width() - c(0.0, s) - c(0.0, t));
        }

        #[test]
        fn profile_inner_product_sesquilinear(f in arb_gp(1), g in arb_gp(1)) {
            let spec = NodeSpec { count: Some(256), radius: Some(12.0) };
            let pf = Fun::from(f.to_profile(&spec).unwrap());
            let pg = Fun::from(g.to_profile(&spec).unwrap());
            let a = inner(&pf, &pg).unwrap();
            let b = inner(&pg, &pf).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-9 * (1.0 + a.norm()));
        }
    }
}

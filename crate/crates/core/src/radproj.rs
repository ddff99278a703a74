//! The projection ℙ of L²(R^d x R^d) onto radial functions, applied to
//! tensor products f⊗g.
//!
//! Two paths. When both factors are analytic with a common width γ, the
//! product is `P(|x|^2) Q(|y|^2) e^{-γ|z|^2}` and ℙ acts monomial by
//! monomial through the sphere moments c_{j,k}. Otherwise both factors are
//! sampled as radial profiles and ℙ(f⊗g)(r) is the one-angle integral
//! ∫ u(r cosθ) v(r sinθ) w_d(θ) dθ, done with a Gauss-Jacobi rule in
//! `s = sin²θ`, whose weight is the Beta(d/2, d/2) density.

use crate::dd::CDd;
use crate::error::{Error, Result};
use crate::funcspace::{inner, Fun, GaussPolyFun, NodeSpec, ProfileFun, RadialGrid};
use crate::quadrature::{gauss_jacobi_symmetric_unit, Rule};
use crate::scalars::{sphere_moment_dd, Dimension};
use num_complex::Complex64;
use std::sync::Arc;

pub const DEFAULT_ANGULAR_NODES: usize = 96;

/// ℙ(f⊗g), a radial function on R^{2d}.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialFun2d {
    Closed(GaussPolyFun),
    Sampled(ProfileFun),
}

impl RadialFun2d {
    /// Dimension of the product space, 2d.
    pub fn ambient_dim(&self) -> Dimension {
        match self {
            RadialFun2d::Closed(f) => f.dim(),
            RadialFun2d::Sampled(p) => p.dim(),
        }
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        match self {
            RadialFun2d::Closed(f) => f.eval(r),
            RadialFun2d::Sampled(p) => p.eval(r),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            RadialFun2d::Closed(f) => f.norm(),
            RadialFun2d::Sampled(p) => p.norm(),
        }
    }

    pub fn to_fun(&self) -> Fun {
        match self {
            RadialFun2d::Closed(f) => Fun::GaussPoly(f.clone()),
            RadialFun2d::Sampled(p) => Fun::Profile(p.clone()),
        }
    }

    pub fn closed(&self) -> Option<&GaussPolyFun> {
        match self {
            RadialFun2d::Closed(f) => Some(f),
            RadialFun2d::Sampled(_) => None,
        }
    }
}

/// Beta(d/2, d/2) rule for `s = sin²θ`.
#[derive(Debug, Clone)]
pub struct AngularRule {
    rule: Rule,
}

impl AngularRule {
    pub fn new(d: Dimension, n: usize) -> Result<Self> {
        Ok(AngularRule {
            rule: gauss_jacobi_symmetric_unit(n, d.half())?,
        })
    }

    pub fn default_for(d: Dimension) -> Self {
        AngularRule::new(d, DEFAULT_ANGULAR_NODES).expect("default rule builds")
    }

    /// `∫ u(r cosθ) v(r sinθ) w_d(θ) dθ`.
    pub fn reduce<U, V>(&self, u: U, v: V, r: f64) -> Complex64
    where
        U: Fn(f64) -> Complex64,
        V: Fn(f64) -> Complex64,
    {
        let mut re = Vec::with_capacity(self.rule.len());
        let mut im = Vec::with_capacity(self.rule.len());
        for (&s, &w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let z = u(r * (1.0 - s).sqrt()) * v(r * s.sqrt()) * w;
            re.push(z.re);
            im.push(z.im);
        }
        Complex64::new(
            crate::quadrature::neumaier_sum(re),
            crate::quadrature::neumaier_sum(im),
        )
    }
}

/// ℙ(f⊗g) evaluated at radius `r` from two radial profiles (or any radial
/// functions given by value).
pub fn theta_reduction<U, V>(d: Dimension, u: U, v: V, r: f64) -> Result<Complex64>
where
    U: Fn(f64) -> Complex64,
    V: Fn(f64) -> Complex64,
{
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("theta reduction needs r > 0, got {r}")));
    }
    Ok(AngularRule::default_for(d).reduce(u, v, r))
}

fn check_dims(f: &Fun, g: &Fun) -> Result<Dimension> {
    if f.dim() != g.dim() {
        return Err(Error::Usage(format!(
            "dimension mismatch: {} vs {}",
            f.dim(),
            g.dim()
        )));
    }
    Ok(f.dim())
}

/// Closed form of ℙ((P E_γ)⊗(Q E_γ)) = Σ p_j q_k c_{j,k} |z|^{2(j+k)} e^{-γ|z|^2}.
pub fn project_closed(f: &GaussPolyFun, g: &GaussPolyFun) -> Result<GaussPolyFun> {
    let d = f.dim();
    if d != g.dim() {
        return Err(Error::Usage("dimension mismatch".into()));
    }
    let tol = 1e-14 * f.width().norm().max(g.width().norm());
    if (f.width() - g.width()).norm() > tol {
        return Err(Error::Usage(
            "closed-form projection needs equal widths".into(),
        ));
    }
    let d2 = d.doubled()?;
    if f.is_zero() || g.is_zero() {
        return GaussPolyFun::zero(d2, f.width());
    }
    let (p, q) = (f.coeffs(), g.coeffs());
    let mut h = vec![CDd::ZERO; p.len() + q.len() - 1];
    for (j, &pj) in p.iter().enumerate() {
        for (k, &qk) in q.iter().enumerate() {
            let m = CDd::from_real(sphere_moment_dd(d, j as u32, k as u32));
            h[j + k] = h[j + k] + CDd::from_c64(pj) * CDd::from_c64(qk) * m;
        }
    }
    GaussPolyFun::new(d2, f.width(), h.iter().map(|z| z.to_c64()).collect())
}

/// Grid choices for the quadrature path.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuadSpec {
    /// Profile sampling of each factor.
    pub factor: NodeSpec,
    /// Node count of the 2d radial grid (from the factor grids when `None`).
    pub radial_nodes: Option<usize>,
    /// Angular Gauss-Jacobi nodes (96 when `None`).
    pub angular_nodes: Option<usize>,
}

/// ℙ(f⊗g) through profiles, regardless of representation.
pub fn project_quadrature(f: &Fun, g: &Fun, spec: &QuadSpec) -> Result<ProfileFun> {
    let d = check_dims(f, g)?;
    let u = sample(f, &spec.factor)?;
    let v = sample(g, &spec.factor)?;
    let ru = u.grid().support();
    let rv = v.grid().support();
    let n = spec
        .radial_nodes
        .unwrap_or_else(|| u.grid().len().max(v.grid().len()));
    let grid = RadialGrid::gauss_legendre(n, (ru * ru + rv * rv).sqrt())?;
    let ang = AngularRule::new(d, spec.angular_nodes.unwrap_or(DEFAULT_ANGULAR_NODES))?;
    let samples = grid
        .nodes()
        .iter()
        .map(|&r| ang.reduce(|s| u.eval(s), |s| v.eval(s), r))
        .collect();
    ProfileFun::new(d.doubled()?, Arc::new(grid), samples)
}

fn sample(f: &Fun, spec: &NodeSpec) -> Result<ProfileFun> {
    match f {
        Fun::Profile(p) => Ok(p.clone()),
        other => other
            .radial_part()
            .expect("analytic input has a radial part")
            .to_profile(spec),
    }
}

/// ℙ(f⊗g): closed form when both factors are analytic with equal widths,
/// otherwise through profiles.
pub fn project_tensor(f: &Fun, g: &Fun) -> Result<RadialFun2d> {
    check_dims(f, g)?;
    if let (Some(a), Some(b)) = (f.radial_part(), g.radial_part()) {
        if a.is_zero() || b.is_zero() {
            return Ok(RadialFun2d::Closed(GaussPolyFun::zero(
                f.dim().doubled()?,
                a.width(),
            )?));
        }
        if let Ok(h) = project_closed(&a, &b) {
            return Ok(RadialFun2d::Closed(h));
        }
    }
    Ok(RadialFun2d::Sampled(project_quadrature(
        f,
        g,
        &QuadSpec::default(),
    )?))
}

/// ‖ℙ(f⊗g)‖.
pub fn projection_norm(f: &Fun, g: &Fun) -> Result<f64> {
    Ok(project_tensor(f, g)?.norm())
}

/// ‖ℙ(f⊗g)‖ on the quadrature path.
pub fn projection_norm_quadrature(f: &Fun, g: &Fun, spec: &QuadSpec) -> Result<f64> {
    Ok(project_quadrature(f, g, spec)?.norm())
}

/// ⟨ℙ(f⊗g), h⟩ for a radial `h` on R^{2d}.
pub fn pair_with_radial(f: &Fun, g: &Fun, h: &Fun) -> Result<Complex64> {
    let d = check_dims(f, g)?;
    if h.dim() != d.doubled()? {
        return Err(Error::Usage(format!(
            "test function lives in dimension {}, expected {}",
            h.dim(),
            2 * d.get()
        )));
    }
    let p = project_tensor(f, g)?;
    inner(&p.to_fun(), h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::MonomialGaussFun;
    use crate::scalars::sphere_moment;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn dim(d: u32) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn big_f(d: u32) -> Fun {
        Fun::from(GaussPolyFun::reference(dim(d)))
    }

    #[test]
    fn projection_examples() {
        for d in 1..=3 {
            let f = big_f(d);
            let p = project_tensor(&f, &f).unwrap();
            assert_eq!(p.closed().unwrap(), &GaussPolyFun::reference(dim(2 * d)));
            let r2 = Fun::from(GaussPolyFun::reference(dim(d)).mul_r2());
            let p = project_tensor(&r2, &f).unwrap();
            let want = GaussPolyFun::reference(dim(2 * d)).mul_r2().scale(c(0.5, 0.0));
            let diff = p.closed().unwrap().sub(&want).unwrap();
            assert!(diff.norm() < 1e-15);
            let mut alpha = vec![0; d as usize];
            alpha[0] = 1;
            let x1 = Fun::from(MonomialGaussFun::new(dim(d), alpha, c(1.0, 0.0), c(PI / 2.0, 0.0)).unwrap());
            assert_eq!(projection_norm(&x1, &f).unwrap(), 0.0);
            assert_eq!(pair_with_radial(&x1, &f, &big_f(2 * d)).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn theta_reduction_examples() {
        for d in 1..=4 {
            let one = |_: f64| c(1.0, 0.0);
            let v = theta_reduction(dim(d), one, one, 2.3).unwrap();
            assert!((v - c(1.0, 0.0)).norm() < 1e-14);
            let sq = |s: f64| c(s * s, 0.0);
            let v = theta_reduction(dim(d), sq, one, 1.0).unwrap();
            assert!((v.re - sphere_moment(dim(d), 1, 0)).abs() < 1e-14);
        }
        let g = |s: f64| c((-PI * s * s / 2.0).exp(), 0.0);
        let v = theta_reduction(dim(1), g, g, 1.0).unwrap();
        assert!((v.re - (-PI / 2.0).exp()).abs() < 1e-14);
        assert!(theta_reduction(dim(1), g, g, 0.0).is_err());
    }

    #[test]
    fn projection_norm_of_psi2_with_reference() {
        // ψ₂ for d = 1 from the explicit Gram-Schmidt polynomial
        let d = dim(1);
        let f = GaussPolyFun::reference(d);
        let b0 = f.clone();
        let b1 = f.mul_r2();
        let b2 = b1.mul_r2();
        let proj = |v: &GaussPolyFun, u: &GaussPolyFun| {
            let s = v.inner(u).unwrap() / u.norm_sqr();
            v.axpy(-s, u).unwrap()
        };
        let e1 = proj(&b1, &b0);
        let e2 = proj(&proj(&b2, &b0), &e1);
        let psi2 = e2.scale(c(1.0 / e2.norm(), 0.0));
        let pn = projection_norm(&Fun::from(psi2.clone()), &Fun::from(f.clone())).unwrap();
        assert!((pn - (3.0f64 / 8.0).sqrt()).abs() < 1e-12);
        let q = projection_norm_quadrature(&Fun::from(psi2), &Fun::from(f), &QuadSpec::default()).unwrap();
        assert!((q - pn).abs() < 1e-9);
    }

    #[test]
    fn pairing_with_reference_gaussian_recovers_inner_product() {
        let d = dim(2);
        let f = Fun::from(GaussPolyFun::new(d, c(PI / 2.0, 0.0), vec![c(0.3, 0.1), c(-0.2, 0.4), c(0.05, 0.0)]).unwrap());
        let big = big_f(2);
        let got = pair_with_radial(&f, &big, &big_f(4)).unwrap();
        let want = inner(&f, &big).unwrap();
        assert!((got - want).norm() < 1e-14);
        let g = big_f(2);
        assert!((pair_with_radial(&g, &g, &big_f(4)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn unequal_widths_route_through_profiles() {
        let d = dim(1);
        let f = Fun::from(GaussPolyFun::gaussian(d, c(1.0, 0.0)).unwrap());
        let g = Fun::from(GaussPolyFun::gaussian(d, c(2.0, 0.0)).unwrap());
        let p = project_tensor(&f, &g).unwrap();
        assert!(matches!(p, RadialFun2d::Sampled(_)));
        // ‖ℙ(E_1⊗E_2)‖² = 2π ∫ e^{-3r²} I_0(r²/2)² r dr in d = 1, evaluated
        // with 30-digit adaptive quadrature of the Bessel form
        let want = 1.038_391_941_296_648_2;
        assert!((p.norm() - want).abs() < 1e-8, "{} vs {want}", p.norm());
    }

    fn arb_pair() -> impl Strategy<Value = (u32, GaussPolyFun, GaussPolyFun)> {
        (
            1u32..4,
            0.4f64..2.5,
            -1.5f64..1.5,
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5),
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5),
        )
            .prop_map(|(d, wr, wi, a, b)| {
                let w = c(wr, wi);
                let mk = |v: Vec<(f64, f64)>| {
                    GaussPolyFun::new(dim(d), w, v.into_iter().map(|(x, y)| c(x, y)).collect()).unwrap()
                };
                (d, mk(a), mk(b))
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn contraction_and_equivariance((_d, f, g) in arb_pair(), rho in 0.3f64..3.0, t in -2.0f64..2.0) {
            let (ff, gg) = (Fun::from(f.clone()), Fun::from(g.clone()));
            let pn = projection_norm(&ff, &gg).unwrap();
            prop_assert!(pn <= f.norm() * g.norm() + 1e-9);
            let fd = Fun::from(f.dilate(rho, true).unwrap());
            let gd = Fun::from(g.dilate(rho, true).unwrap());
            prop_assert!((projection_norm(&fd, &gd).unwrap() - pn).abs() <= 1e-10 * (1.0 + pn));
            let fm = Fun::from(f.modulate(t));
            let gm = Fun::from(g.modulate(t));
            prop_assert!((projection_norm(&fm, &gm).unwrap() - pn).abs() <= 1e-10 * (1.0 + pn));
        }

        #[test]
        fn idempotent_on_radial_products(wr in 0.2f64..4.0, wi in -3.0f64..3.0, d in 1u32..5) {
            let e = GaussPolyFun::gaussian(dim(d), c(wr, wi)).unwrap();
            let p = project_tensor(&Fun::from(e.clone()), &Fun::from(e.clone())).unwrap();
            prop_assert!((p.norm() - e.norm_sqr()).abs() <= 1e-12 * e.norm_sqr());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn closed_form_matches_quadrature((_d, f, g) in arb_pair()) {
            let (ff, gg) = (Fun::from(f), Fun::from(g));
            let a = projection_norm(&ff, &gg).unwrap();
            let b = projection_norm_quadrature(&ff, &gg, &QuadSpec::default()).unwrap();
            prop_assert!((a - b).abs() <= 1e-8 * a.max(1e-300), "{} vs {}", a, b);
        }

        #[test]
        fn modulus_does_not_decrease_projection((_d, f, g) in arb_pair(), wi2 in -2.0f64..2.0) {
            let g2 = GaussPolyFun::new(g.dim(), c(g.width().re * 1.3, wi2), g.coeffs().to_vec()).unwrap();
            let (ff, gg) = (Fun::from(f), Fun::from(g2));
            let spec = NodeSpec::default();
            let mf = Fun::from(ff.modulus_profile(&spec).unwrap());
            let mg = Fun::from(gg.modulus_profile(&spec).unwrap());
            let lhs = projection_norm(&mf, &mg).unwrap();
            let rhs = projection_norm(&ff, &gg).unwrap();
            prop_assert!(lhs - rhs >= -1e-8, "{} < {}", lhs, rhs);
        }
    }
}

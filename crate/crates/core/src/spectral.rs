//! The operator `Tf(x) = ∫ F(y) ℙ(f⊗F)(x, y) dy` and its eigenbasis.
//!
//! On `|x|^{2n} F` the projection is `c_{n,0} |z|^{2n} G`, and integrating
//! `(|x|² + |y|²)^n e^{-π|y|²}` over y gives
//! `Σ_k C(n,k) |x|^{2(n-k)} (d/2)_k / π^k`. So T maps polynomial-times-F to
//! polynomial-times-F, is triangular in the monomial basis with diagonal
//! `c_{n,0} = λ_{d,n}`, and the Gram-Schmidt basis of `{|x|^{2m} F}`
//! diagonalizes it.

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use crate::funcspace::{Fun, GaussPolyFun};
use crate::radproj::project_tensor;
use crate::scalars::{eigenvalue_lambda, pochhammer_dd, sphere_moment_dd, Dimension};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Hard limit on the basis size.
pub const MAX_BASIS_INDEX: usize = 40;
/// Largest tolerated deviation of the rounded basis from orthonormality.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Tolerance for the orthogonality constraints of the quadratic form.
pub const CONSTRAINT_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn reference_width() -> Complex64 {
    c(PI / 2.0, 0.0)
}

/// `(d/2)_s / π^s`, the moments ∫ |y|^{2s} e^{-π|y|²} dy.
fn y_moments(d: Dimension, n: usize) -> Vec<Dd> {
    let inv_pi = Dd::PI.recip();
    (0..=n)
        .map(|s| pochhammer_dd(d.half(), s as u32) * inv_pi.powi(s as u32))
        .collect()
}

/// Binomial coefficients C(n, k) for n ≤ `max`.
fn binomials(max: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = vec![vec![1.0]];
    for n in 1..=max {
        let prev = &rows[n - 1];
        let mut row = vec![1.0; n + 1];
        for k in 1..n {
            row[k] = prev[k - 1] + prev[k];
        }
        rows.push(row);
    }
    rows
}

/// T on coefficient vectors (coefficients of `t^n F`, `t = |x|²`), in
/// double-double.
fn apply_t_coeffs(d: Dimension, p: &[CDd]) -> Vec<CDd> {
    let n = p.len();
    if n == 0 {
        return Vec::new();
    }
    let mk = y_moments(d, n - 1);
    let binom = binomials(n - 1);
    let mut out = vec![CDd::ZERO; n];
    for (j, &pj) in p.iter().enumerate() {
        let h = pj * CDd::from_real(sphere_moment_dd(d, j as u32, 0));
        // (t + |y|²)^j integrated against e^{-π|y|²}
        for k in 0..=j {
            let w = Dd::from_f64(binom[j][k]) * mk[k];
            out[j - k] = out[j - k] + h * CDd::from_real(w);
        }
    }
    out
}

fn check_reference_width(f: &GaussPolyFun) -> Result<()> {
    let w = f.width();
    if (w - reference_width()).norm() > 1e-14 {
        return Err(Error::Usage(format!(
            "T is defined relative to F = e^(-π|x|²/2); input width {w} differs from π/2 (gauge-normalize first)"
        )));
    }
    Ok(())
}

fn radial_input(f: &Fun) -> Result<GaussPolyFun> {
    let g = f.radial_part().ok_or_else(|| {
        Error::Unsupported("T is implemented for analytic inputs only".into())
    })?;
    if let Some(w) = f.width() {
        if (w - reference_width()).norm() > 1e-14 {
            return Err(Error::Usage(format!(
                "T is defined relative to F = e^(-π|x|²/2); input width {w} differs from π/2 (gauge-normalize first)"
            )));
        }
    }
    Ok(g)
}

/// Tf for a Gaussian-polynomial f of width π/2.
pub fn apply_t_gauss_poly(f: &GaussPolyFun) -> Result<GaussPolyFun> {
    check_reference_width(f)?;
    let p: Vec<CDd> = f.coeffs().iter().map(|&z| CDd::from_c64(z)).collect();
    let out = apply_t_coeffs(f.dim(), &p);
    GaussPolyFun::new(
        f.dim(),
        reference_width(),
        out.iter().map(|z| z.to_c64()).collect(),
    )
}

/// Tf. Monomial-Gaussians enter through their rotation average, which is
/// zero when some α_j is odd.
pub fn apply_t(f: &Fun) -> Result<GaussPolyFun> {
    let g = radial_input(f)?;
    if g.is_zero() {
        return GaussPolyFun::zero(f.dim(), reference_width());
    }
    apply_t_gauss_poly(&g)
}

/// Leading coefficient of `e^{π|x|²/2} T(|x|^{2m} F)`, an independent route
/// to λ_{d,m}.
pub fn recomputed_eigenvalue(d: Dimension, m: usize) -> f64 {
    let mut p = vec![CDd::ZERO; m + 1];
    p[m] = CDd::ONE;
    apply_t_coeffs(d, &p)[m].re.to_f64()
}

/// Orthonormal eigenbasis ψ_0..ψ_M of T with eigenvalues λ_{d,m}.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    d: Dimension,
    basis: Vec<GaussPolyFun>,
    eigenvalues: Vec<f64>,
    orthonormality_error: f64,
}

impl EigenSystem {
    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn max_index(&self) -> usize {
        self.basis.len() - 1
    }

    pub fn basis(&self) -> &[GaussPolyFun] {
        &self.basis
    }

    pub fn psi(&self, m: usize) -> &GaussPolyFun {
        &self.basis[m]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// max |⟨ψ_i, ψ_j⟩ - δ_ij| of the stored (rounded) basis.
    pub fn orthonormality_error(&self) -> f64 {
        self.orthonormality_error
    }

    /// `Σ a_m ψ_m`, summed in double-double.
    pub fn combine(&self, coeffs: &[Complex64]) -> Result<GaussPolyFun> {
        if coeffs.len() > self.basis.len() {
            return Err(Error::Usage(format!(
                "{} coefficients for a basis of size {}",
                coeffs.len(),
                self.basis.len()
            )));
        }
        let n = coeffs.len();
        let mut acc = vec![CDd::ZERO; n.max(1)];
        for (a, psi) in coeffs.iter().zip(&self.basis) {
            let a = CDd::from_c64(*a);
            for (j, &q) in psi.coeffs().iter().enumerate() {
                acc[j] = acc[j] + a * CDd::from_c64(q);
            }
        }
        GaussPolyFun::new(
            self.d,
            reference_width(),
            acc.iter().map(|z| z.to_c64()).collect(),
        )
    }

    /// `⟨f, ψ_m⟩` for m = 0..=M.
    pub fn coefficients(&self, f: &GaussPolyFun) -> Result<Vec<Complex64>> {
        self.basis.iter().map(|psi| f.inner(psi)).collect()
    }

    /// ‖Tψ_m − λ_{d,m} ψ_m‖.
    pub fn eigen_residual(&self, m: usize) -> Result<f64> {
        let psi = &self.basis[m];
        let t = apply_t_gauss_poly(psi)?;
        let lam = c(-self.eigenvalues[m], 0.0);
        Ok(t.axpy(lam, psi)?.norm())
    }
}

/// Gram-Schmidt on `{|x|^{2m} F : m = 0..=M}` with exact moments, carried
/// out in double-double with one reorthogonalization pass.
pub fn build_basis(d: Dimension, max_m: usize) -> Result<EigenSystem> {
    if max_m > MAX_BASIS_INDEX {
        return Err(Error::Conditioning(format!(
            "basis index {max_m} exceeds the hard cap {MAX_BASIS_INDEX}"
        )));
    }
    // Gram matrix of t^j F: ∫ |x|^{2(j+k)} e^{-π|x|²} = (d/2)_{j+k} / π^{j+k}
    let mom = y_moments(d, 2 * max_m);
    let gram = |u: &[Dd], v: &[Dd]| -> Dd {
        let mut acc = Dd::ZERO;
        for (j, &uj) in u.iter().enumerate() {
            if uj.hi == 0.0 {
                continue;
            }
            let mut row = Dd::ZERO;
            for (k, &vk) in v.iter().enumerate() {
                row = row + vk * mom[j + k];
            }
            acc = acc + uj * row;
        }
        acc
    };
    let mut exact: Vec<Vec<Dd>> = Vec::with_capacity(max_m + 1);
    for m in 0..=max_m {
        let mut v = vec![Dd::ZERO; m + 1];
        v[m] = Dd::ONE;
        for _pass in 0..2 {
            for u in &exact {
                let s = gram(u, &v);
                for (vi, &ui) in v.iter_mut().zip(u.iter()) {
                    *vi = *vi - s * ui;
                }
            }
        }
        let nrm = gram(&v, &v).sqrt();
        if !(nrm.hi > 0.0) {
            return Err(Error::Conditioning(format!(
                "Gram-Schmidt breaks down at m = {m}"
            )));
        }
        let inv = nrm.recip();
        for vi in v.iter_mut() {
            *vi = *vi * inv;
        }
        exact.push(v);
    }
    let basis: Vec<GaussPolyFun> = exact
        .iter()
        .map(|v| {
            GaussPolyFun::new(
                d,
                reference_width(),
                v.iter().map(|x| c(x.to_f64(), 0.0)).collect(),
            )
            .expect("reference width")
        })
        .collect();
    let mut err: f64 = 0.0;
    for i in 0..basis.len() {
        for j in 0..=i {
            let g = basis[i].inner(&basis[j])?;
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((g - c(target, 0.0)).norm());
        }
    }
    if err > ORTHONORMALITY_TOL {
        // largest M that still rounds to an orthonormal basis
        let mut ok = 0;
        'outer: for i in 0..basis.len() {
            for j in 0..=i {
                let g = basis[i].inner(&basis[j])?;
                let target = if i == j { 1.0 } else { 0.0 };
                if (g - c(target, 0.0)).norm() > ORTHONORMALITY_TOL {
                    break 'outer;
                }
            }
            ok = i;
        }
        return Err(Error::Conditioning(format!(
            "basis up to m = {max_m} in d = {d} rounds to f64 coefficients with orthonormality error {err:.2e} > {ORTHONORMALITY_TOL:.0e}; \
             the largest index meeting the tolerance is {ok} (hard cap {MAX_BASIS_INDEX})"
        )));
    }
    let eigenvalues = (0..=max_m).map(|m| eigenvalue_lambda(d, m as u32)).collect();
    Ok(EigenSystem {
        d,
        basis,
        eigenvalues,
        orthonormality_error: err,
    })
}

/// |⟨ℙ(f⊗F), ℙ(g⊗F)⟩ − ⟨Tf, g⟩|.
pub fn t_relation_check(f: &Fun, g: &Fun) -> Result<f64> {
    let big_f = Fun::from(GaussPolyFun::reference(f.dim()));
    radial_input(f)?;
    radial_input(g)?;
    let pf = project_tensor(f, &big_f)?;
    let pg = project_tensor(g, &big_f)?;
    let lhs = crate::funcspace::inner(&pf.to_fun(), &pg.to_fun())?;
    let rhs = crate::funcspace::inner(&Fun::from(apply_t(f)?), g)?;
    Ok((lhs - rhs).norm())
}

/// Both readings of the quadratic form together with the bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticForm {
    /// ⟨Tf,f⟩ + 2Re⟨Tf,g⟩ + ⟨Tg,g⟩.
    pub value: f64,
    /// ‖Tf‖² + 2Re⟨Tf,g⟩ + ‖Tg‖², reported only.
    pub statement_form: f64,
    /// ‖f‖² + ‖g‖².
    pub pair_norm_sq: f64,
    /// (d+2) / (2(d+1)) · ‖(f,g)‖².
    pub bound: f64,
}

impl QuadraticForm {
    pub fn slack(&self) -> f64 {
        self.bound - self.value
    }
}

/// ψ_0 and ψ_1 for dimension d.
fn low_modes(d: Dimension) -> (GaussPolyFun, GaussPolyFun) {
    let f = GaussPolyFun::reference(d);
    // ψ_1 ∝ (|x|² − d/(2π)) F with ‖(|x|² − d/(2π))F‖² = d/(2π²)
    let k = (2.0 * PI * PI / d.as_f64()).sqrt();
    let psi1 = GaussPolyFun::new(
        d,
        reference_width(),
        vec![c(-k * d.half() / PI, 0.0), c(k, 0.0)],
    )
    .expect("reference width");
    (f, psi1)
}

/// The three orthogonality residuals |⟨f,ψ_0⟩|, |⟨g,ψ_0⟩|, |⟨f+g,ψ_1⟩|.
pub fn gauge_residuals(f: &GaussPolyFun, g: &GaussPolyFun) -> Result<[f64; 3]> {
    let (psi0, psi1) = low_modes(f.dim());
    Ok([
        f.inner(&psi0)?.norm(),
        g.inner(&psi0)?.norm(),
        (f.inner(&psi1)? + g.inner(&psi1)?).norm(),
    ])
}

/// ⟨Tf,f⟩ + 2Re⟨Tf,g⟩ + ⟨Tg,g⟩ under ⟨f,ψ_0⟩ = ⟨g,ψ_0⟩ = ⟨f+g,ψ_1⟩ = 0.
pub fn t_quadratic_form(f: &Fun, g: &Fun) -> Result<QuadraticForm> {
    if f.dim() != g.dim() {
        return Err(Error::Usage("dimension mismatch".into()));
    }
    let fr = radial_input(f)?;
    let gr = radial_input(g)?;
    let scale = (f.norm_sqr() + g.norm_sqr()).sqrt().max(1.0);
    let names = ["<f,psi_0>", "<g,psi_0>", "<f+g,psi_1>"];
    for (name, r) in names.iter().zip(gauge_residuals(&fr, &gr)?) {
        if r > CONSTRAINT_TOL * scale {
            return Err(Error::Precondition(format!(
                "constraint {name} = 0 violated: |{name}| = {r:.3e} > {CONSTRAINT_TOL:.0e}"
            )));
        }
    }
    let tf = apply_t(f)?;
    let tg = apply_t(g)?;
    let tf_f = crate::funcspace::inner(&Fun::from(tf.clone()), f)?;
    let tf_g = crate::funcspace::inner(&Fun::from(tf.clone()), g)?;
    let tg_g = crate::funcspace::inner(&Fun::from(tg.clone()), g)?;
    let value = tf_f.re + 2.0 * tf_g.re + tg_g.re;
    let statement_form = tf.norm_sqr() + 2.0 * tf_g.re + tg.norm_sqr();
    let pair_norm_sq = f.norm_sqr() + g.norm_sqr();
    let d = f.dim().as_f64();
    Ok(QuadraticForm {
        value,
        statement_form,
        pair_norm_sq,
        bound: (d + 2.0) / (2.0 * (d + 1.0)) * pair_norm_sq,
    })
}

/// One row of the `eigs` table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenRow {
    pub m: usize,
    pub lambda_formula: f64,
    pub lambda_recomputed: f64,
    pub eigen_residual: f64,
    /// Coefficients of q_m in powers of |x|².
    pub q_m: Vec<f64>,
}

pub fn eigen_table(sys: &EigenSystem) -> Result<Vec<EigenRow>> {
    (0..=sys.max_index())
        .map(|m| {
            Ok(EigenRow {
                m,
                lambda_formula: sys.eigenvalues[m],
                lambda_recomputed: recomputed_eigenvalue(sys.d, m),
                eigen_residual: sys.eigen_residual(m)?,
                q_m: sys.basis[m].coeffs().iter().map(|z| z.re).collect(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::MonomialGaussFun;
    use proptest::prelude::*;

    fn dim(d: u32) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn big_f(d: u32) -> Fun {
        Fun::from(GaussPolyFun::reference(dim(d)))
    }

    #[test]
    fn basis_examples() {
        for d in 1..=4 {
            let sys = build_basis(dim(d), 0).unwrap();
            assert_eq!(sys.psi(0), &GaussPolyFun::reference(dim(d)));
            assert_eq!(sys.eigenvalues(), &[1.0]);
        }
        let sys = build_basis(dim(1), 1).unwrap();
        let k = 2f64.sqrt() * PI;
        let want = [-k / (2.0 * PI), k];
        for (got, w) in sys.psi(1).coeffs().iter().zip(want) {
            assert!((got.re - w).abs() < 1e-14 && got.im == 0.0);
        }
        assert!(sys.psi(1).inner(sys.psi(0)).unwrap().norm() < 1e-16);
        let (_, psi1) = low_modes(dim(1));
        assert!(psi1.sub(sys.psi(1)).unwrap().norm() < 1e-14);
    }

    #[test]
    fn basis_to_twelve_is_orthonormal_and_diagonalizes_t() {
        for d in 1..=3 {
            let sys = build_basis(dim(d), 12).unwrap();
            assert!(sys.orthonormality_error() <= 1e-10, "{}", sys.orthonormality_error());
            for m in 0..=12 {
                assert!(sys.eigen_residual(m).unwrap() <= 1e-8);
                assert_eq!(sys.psi(m).degree(), Some(m));
                assert!(sys.psi(m).coeffs()[m].re > 0.0);
                let rec = recomputed_eigenvalue(dim(d), m);
                assert!((rec - eigenvalue_lambda(dim(d), m as u32)).abs() <= 1e-12);
            }
            assert!(sys.eigenvalues().windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn conditioning_guard() {
        assert!(matches!(build_basis(dim(1), 41), Err(Error::Conditioning(_))));
        match build_basis(dim(1), 40) {
            Err(Error::Conditioning(msg)) => assert!(msg.contains("largest index")),
            Ok(sys) => assert!(sys.orthonormality_error() <= ORTHONORMALITY_TOL),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn apply_t_examples() {
        for d in 1..=3 {
            let t = apply_t(&big_f(d)).unwrap();
            assert!(t.sub(&GaussPolyFun::reference(dim(d))).unwrap().norm() < 1e-15);
            let mut alpha = vec![0; d as usize];
            alpha[0] = 1;
            let x1 = MonomialGaussFun::new(dim(d), alpha, c(1.0, 0.0), reference_width()).unwrap();
            assert!(apply_t(&Fun::from(x1)).unwrap().is_zero());
        }
        let wrong = GaussPolyFun::gaussian(dim(1), c(1.0, 0.0)).unwrap();
        assert!(matches!(apply_t(&Fun::from(wrong)), Err(Error::Usage(_))));
    }

    #[test]
    fn even_monomials_map_to_degree_half_alpha() {
        let d = dim(3);
        let m = MonomialGaussFun::new(d, vec![2, 4, 0], c(1.0, 0.0), reference_width()).unwrap();
        let t = apply_t(&Fun::from(m)).unwrap();
        assert_eq!(t.degree(), Some(3));
    }

    #[test]
    fn t_relation_examples() {
        let sys = build_basis(dim(2), 8).unwrap();
        let p = |m: usize| Fun::from(sys.psi(m).clone());
        assert!(t_relation_check(&big_f(2), &big_f(2)).unwrap() < 1e-14);
        assert!(t_relation_check(&p(2), &p(2)).unwrap() < 1e-12);
        assert!(t_relation_check(&p(1), &p(2)).unwrap() < 1e-12);
        for i in 0..=8 {
            for j in 0..=8 {
                assert!(t_relation_check(&p(i), &p(j)).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn quadratic_form_examples() {
        for d in 1..=3 {
            let sys = build_basis(dim(d), 3).unwrap();
            let p2 = Fun::from(sys.psi(2).clone());
            let q = t_quadratic_form(&p2, &p2).unwrap();
            let lam2 = eigenvalue_lambda(dim(d), 2);
            assert!((q.value - 4.0 * lam2).abs() < 1e-12);
            assert!(q.slack().abs() < 1e-10);
            let p1 = Fun::from(sys.psi(1).clone());
            let m1 = Fun::from(sys.psi(1).scale(c(-1.0, 0.0)));
            assert!(t_quadratic_form(&p1, &m1).unwrap().value.abs() < 1e-14);
            let p0 = Fun::from(sys.psi(0).clone());
            match t_quadratic_form(&p0, &p0) {
                Err(Error::Precondition(msg)) => assert!(msg.contains("<f,psi_0>")),
                other => panic!("{other:?}"),
            }
        }
    }

    fn arb_coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 11)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn self_adjoint(d in 1u32..4, a in arb_coeffs(), b in arb_coeffs()) {
            let sys = build_basis(dim(d), 10).unwrap();
            let mk = |v: &[(f64, f64)]| sys.combine(&v.iter().map(|&(x, y)| c(x, y)).collect::<Vec<_>>()).unwrap();
            let (f, g) = (mk(&a), mk(&b));
            let lhs = apply_t_gauss_poly(&f).unwrap().inner(&g).unwrap();
            let rhs = apply_t_gauss_poly(&g).unwrap().inner(&f).unwrap().conj();
            prop_assert!((lhs - rhs).norm() <= 1e-10);
        }

        #[test]
        fn spectral_bound(d in 1u32..4, a in arb_coeffs(), b in arb_coeffs()) {
            let sys = build_basis(dim(d), 10).unwrap();
            let mut fa: Vec<Complex64> = a.iter().map(|&(x, y)| c(x, y)).collect();
            let mut ga: Vec<Complex64> = b.iter().map(|&(x, y)| c(x, y)).collect();
            fa[0] = c(0.0, 0.0);
            ga[0] = c(0.0, 0.0);
            ga[1] = -fa[1];
            let f = Fun::from(sys.combine(&fa).unwrap());
            let g = Fun::from(sys.combine(&ga).unwrap());
            let q = t_quadratic_form(&f, &g).unwrap();
            prop_assert!(q.slack() >= -1e-9);
        }
    }
}

//! Distance to the Gaussian manifolds and the gauge that moves a near-extremal
//! pair into the frame `(F + f, F + g)`.
//!
//! For a fixed width γ the best coefficients are linear projections, so the
//! fit reduces to maximizing `S(γ) = Σ_w |⟨w, E_γ⟩|² / ‖E_γ‖²` over the half
//! plane `Re γ > 0`. The infimum is taken over the closure
//! `{(a E_γ, b E_γ) : a, b ∈ ℂ}`.

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use crate::funcspace::{c64_pair, inner, inner_dd, Fun, GaussPolyFun, NodeSpec, ProfileFun};
use crate::optim::{nelder_mead, NmOptions};
use crate::scalars::Dimension;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// Simplex budget per start.
pub const EVAL_BUDGET: usize = 2000;
/// Relative stall in S required for `converged`.
pub const STALL_TOL: f64 = 1e-12;
/// Largest relative distance accepted by [`gauge_normalize`].
pub const LOCAL_REGIME: f64 = 0.3;
const GRID_RE: (f64, f64) = (0.05, 50.0);
const GRID_IM: (f64, f64) = (-20.0, 20.0);
const GRID_N: usize = 40;
const STARTS: usize = 5;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussFitResult {
    #[serde(rename = "gamma", with = "c64_pair")]
    pub gamma_star: Complex64,
    #[serde(rename = "a", with = "c64_pair")]
    pub coeff_a: Complex64,
    #[serde(rename = "b", with = "c64_pair")]
    pub coeff_b: Complex64,
    pub dist: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl GaussFitResult {
    pub fn dist_sqr(&self) -> f64 {
        self.dist * self.dist
    }
}

/// The functions being fitted together, with a shared width.
struct Target<'a> {
    d: Dimension,
    funs: Vec<&'a Fun>,
    total: Dd,
}

impl<'a> Target<'a> {
    fn new(funs: Vec<&'a Fun>) -> Result<Self> {
        let d = funs[0].dim();
        if funs.iter().any(|f| f.dim() != d) {
            return Err(Error::Usage("dimension mismatch in fitted pair".into()));
        }
        let mut total = Dd::ZERO;
        for f in &funs {
            let n = inner_dd(f, f)?.re;
            if !(n.hi > 0.0) {
                return Err(Error::Precondition(
                    "Gaussian fit requires nonzero functions".into(),
                ));
            }
            total = total + n;
        }
        Ok(Target { d, funs, total })
    }

    /// ‖E_γ‖² = (π / (2 Re γ))^{d/2}.
    fn e_norm_sqr(&self, gamma: Complex64) -> Dd {
        let base = Dd::PI / Dd::from_f64(2.0 * gamma.re);
        let h = self.d.get();
        let root = base.sqrt();
        root.powi(h)
    }

    fn projections(&self, gamma: Complex64) -> Result<Vec<CDd>> {
        let e = Fun::from(GaussPolyFun::gaussian(self.d, gamma)?);
        self.funs.iter().map(|f| inner_dd(f, &e)).collect()
    }

    fn s_value(&self, gamma: Complex64) -> Result<Dd> {
        let n = self.e_norm_sqr(gamma);
        let mut acc = Dd::ZERO;
        for p in self.projections(gamma)? {
            acc = acc + p.norm_sqr();
        }
        Ok(acc / n)
    }

    /// dist² at γ, in double-double.
    fn objective(&self, gamma: Complex64) -> f64 {
        if !(gamma.re > 0.0) || !gamma.re.is_finite() || !gamma.im.is_finite() {
            return f64::INFINITY;
        }
        match self.s_value(gamma) {
            Ok(s) => (self.total - s).to_f64(),
            Err(_) => f64::INFINITY,
        }
    }
}

fn to_gamma(x: &[f64]) -> Complex64 {
    c(x[0].exp(), x[1])
}

/// Width estimate from radial moments: Re γ from the second moment of |w|²,
/// Im γ from a weighted regression of the unwrapped phase on |x|².
fn moment_seed(t: &Target) -> Complex64 {
    let mut m0 = 0.0;
    let mut m1 = 0.0;
    let mut slope_num = 0.0;
    let mut slope_den = 0.0;
    for f in &t.funs {
        let prof = match f.radial_part() {
            Some(g) => g.to_profile(&NodeSpec::default()),
            None => f.to_profile(&NodeSpec::default()),
        };
        let Ok(prof) = prof else { continue };
        let grid = prof.grid();
        let dm1 = t.d.get() as i32 - 1;
        let mut phase = Vec::with_capacity(grid.len());
        let mut wts = Vec::with_capacity(grid.len());
        let mut prev: Option<f64> = None;
        for ((&r, &w), u) in grid.nodes().iter().zip(grid.weights()).zip(prof.samples()) {
            let mass = w * r.powi(dm1) * u.norm_sqr();
            m0 += mass;
            m1 += mass * r * r;
            let mut a = u.arg();
            if let Some(p) = prev {
                a += (2.0 * PI) * ((p - a) / (2.0 * PI)).round();
            }
            prev = Some(a);
            phase.push((r * r, a));
            wts.push(mass);
        }
        let wsum: f64 = wts.iter().sum();
        if wsum > 0.0 {
            let tb = phase.iter().zip(&wts).map(|((x, _), w)| w * x).sum::<f64>() / wsum;
            let pb = phase.iter().zip(&wts).map(|((_, y), w)| w * y).sum::<f64>() / wsum;
            for ((x, y), w) in phase.iter().zip(&wts) {
                slope_num += w * (x - tb) * (y - pb);
                slope_den += w * (x - tb) * (x - tb);
            }
        }
    }
    let re = if m1 > 0.0 && m0 > 0.0 {
        t.d.as_f64() * m0 / (4.0 * m1)
    } else {
        PI / 2.0
    };
    // e^{-iβ r²} has phase slope -β
    let im = if slope_den > 0.0 {
        -slope_num / slope_den
    } else {
        0.0
    };
    c(re.clamp(1e-6, 1e6), im)
}

/// Coarse grid over (log Re γ, Im γ); returns the best local maxima of S
/// (falling back to the best cells), at most `k` of them.
fn grid_seeds(t: &Target, k: usize, evals: &mut usize) -> Vec<[f64; 2]> {
    let (l0, l1) = (GRID_RE.0.ln(), GRID_RE.1.ln());
    let xs: Vec<f64> = (0..GRID_N)
        .map(|i| l0 + (l1 - l0) * i as f64 / (GRID_N - 1) as f64)
        .collect();
    let ys: Vec<f64> = (0..GRID_N)
        .map(|i| GRID_IM.0 + (GRID_IM.1 - GRID_IM.0) * i as f64 / (GRID_N - 1) as f64)
        .collect();
    let mut vals = vec![vec![0.0; GRID_N]; GRID_N];
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            vals[i][j] = t.objective(to_gamma(&[x, y]));
            *evals += 1;
        }
    }
    let mut cells: Vec<(f64, bool, usize, usize)> = Vec::with_capacity(GRID_N * GRID_N);
    for i in 0..GRID_N {
        for j in 0..GRID_N {
            let v = vals[i][j];
            let mut local = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) != (0, 0)
                        && a >= 0
                        && b >= 0
                        && (a as usize) < GRID_N
                        && (b as usize) < GRID_N
                        && vals[a as usize][b as usize] < v
                    {
                        local = false;
                    }
                }
            }
            cells.push((v, local, i, j));
        }
    }
    // local minima of dist² first, then by value; index order breaks ties
    cells.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.total_cmp(&b.0)));
    cells
        .into_iter()
        .take(k)
        .map(|(_, _, i, j)| [xs[i], ys[j]])
        .collect()
}

fn fit(t: &Target) -> Result<(Complex64, f64, bool, usize)> {
    let mut evals = 0;
    let seed = moment_seed(t);
    let mut starts = vec![[seed.re.ln(), seed.im]];
    starts.extend(grid_seeds(t, STARTS - 1, &mut evals));
    let scale = t.total.to_f64();
    let opts = NmOptions {
        max_evals: EVAL_BUDGET,
        f_tol_rel: 1e-15,
        f_tol_abs: 1e-30 * scale,
        x_tol: 1e-11,
    };
    let mut runs: Vec<(Vec<f64>, f64, bool)> = Vec::with_capacity(starts.len());
    for x0 in &starts {
        let step = [0.25, 0.25 * (1.0 + x0[0].exp())];
        let r = nelder_mead(|x| t.objective(to_gamma(x)), x0, &step, opts);
        // restart once from the incumbent to undo simplex collapse
        let r2 = nelder_mead(
            |x| t.objective(to_gamma(x)),
            &r.x,
            &[1e-3, 1e-3 * (1.0 + r.x[0].exp())],
            opts,
        );
        evals += r.evaluations + r2.evaluations;
        let stalled = r2.stalled && r2.spread <= (STALL_TOL * r2.fx.abs()).max(1e-28 * scale);
        runs.push((r2.x, r2.fx, stalled));
    }
    let low = runs.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let tie = (STALL_TOL * low.abs()).max(1e-28 * scale);
    // a budget-limited run may land within rounding of a stalled one; the
    // stalled run then certifies the minimum
    let pick = runs
        .iter()
        .position(|r| r.2 && r.1 <= low + tie)
        .or_else(|| runs.iter().position(|r| r.1 == low))
        .unwrap_or(0);
    let (x, fx, stalled) = runs.swap_remove(pick);
    Ok((to_gamma(&x), fx, stalled, evals))
}

fn finish(t: &Target, gamma: Complex64, converged: bool, evaluations: usize) -> Result<GaussFitResult> {
    let n = t.e_norm_sqr(gamma);
    let p = t.projections(gamma)?;
    let coeffs: Vec<Complex64> = p.iter().map(|z| (*z / CDd::from_real(n)).to_c64()).collect();
    let mut s = Dd::ZERO;
    for z in &p {
        s = s + z.norm_sqr();
    }
    let j = (t.total - s / n).to_f64().max(0.0);
    Ok(GaussFitResult {
        gamma_star: gamma,
        coeff_a: coeffs[0],
        coeff_b: coeffs.get(1).copied().unwrap_or(c(0.0, 0.0)),
        dist: j.sqrt(),
        converged,
        evaluations,
    })
}

/// Nearest pair `(a E_γ, b E_γ)` to `(f, g)`.
pub fn nearest_gaussian_pair(f: &Fun, g: &Fun) -> Result<GaussFitResult> {
    let t = Target::new(vec![f, g])?;
    let (gamma, _, converged, evals) = fit(&t)?;
    finish(&t, gamma, converged, evals)
}

/// Nearest `a E_γ` to `f`; `coeff_b` is zero.
pub fn nearest_gaussian_single(f: &Fun) -> Result<GaussFitResult> {
    let t = Target::new(vec![f])?;
    let (gamma, _, converged, evals) = fit(&t)?;
    finish(&t, gamma, converged, evals)
}

/// `S(γ)` for the pair, exposed for grid cross-checks.
pub fn pair_score(f: &Fun, g: &Fun, gamma: Complex64) -> Result<f64> {
    Ok(Target::new(vec![f, g])?.s_value(gamma)?.to_f64())
}

/// `S(γ)` for a single function.
pub fn single_score(f: &Fun, gamma: Complex64) -> Result<f64> {
    Ok(Target::new(vec![f])?.s_value(gamma)?.to_f64())
}

/// Symmetry element `w ↦ s_w · D_ρ M_t w`, where `M_t` multiplies by
/// `e^{it|x|²}` and `D_ρ w(x) = ρ^{d/2} w(ρx)`. It maps `E_γ` (γ the gauge
/// width) to a multiple of F.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeRecord {
    pub rho: f64,
    pub t: f64,
    #[serde(with = "c64_pair")]
    pub scalar_f: Complex64,
    #[serde(with = "c64_pair")]
    pub scalar_g: Complex64,
    /// Width of the Gaussian sent to F.
    #[serde(with = "c64_pair")]
    pub gamma: Complex64,
}

impl GaugeRecord {
    pub fn identity() -> Self {
        GaugeRecord {
            rho: 1.0,
            t: 0.0,
            scalar_f: c(1.0, 0.0),
            scalar_g: c(1.0, 0.0),
            gamma: c(PI / 2.0, 0.0),
        }
    }

    fn forward(&self, w: &Fun, s: Complex64) -> Result<Fun> {
        Ok(w.modulate(self.t).dilate(self.rho, true)?.scale(s))
    }

    fn backward(&self, w: &Fun, s: Complex64) -> Result<Fun> {
        Ok(w.scale(s.inv()).dilate(1.0 / self.rho, true)?.modulate(-self.t))
    }

    /// Applies the recorded element to a pair.
    pub fn apply(&self, u: &Fun, v: &Fun) -> Result<(Fun, Fun)> {
        Ok((self.forward(u, self.scalar_f)?, self.forward(v, self.scalar_g)?))
    }

    /// Applies the inverse element to a pair.
    pub fn invert(&self, u: &Fun, v: &Fun) -> Result<(Fun, Fun)> {
        Ok((self.backward(u, self.scalar_f)?, self.backward(v, self.scalar_g)?))
    }
}

/// Output of [`gauge_normalize`].
#[derive(Debug, Clone)]
pub struct Gauged {
    /// `u' − F` and `v' − F`.
    pub f: Fun,
    pub g: Fun,
    pub record: GaugeRecord,
    pub fit: GaussFitResult,
    /// |⟨f,ψ_0⟩|, |⟨g,ψ_0⟩|, |⟨f+g,ψ_1⟩|.
    pub orthogonality: [f64; 3],
}

/// `Σ_w ⟨w, |x|²E_γ⟩/⟨w, E_γ⟩ − 2⟨E_γ, |x|²E_γ⟩/‖E_γ‖²`. Zero exactly where
/// `|⟨u,E_γ⟩ ⟨v,E_γ⟩| / ‖E_γ‖²` is stationary, and proportional to
/// `⟨f + g, ψ_1⟩` after the gauge.
fn gauge_condition(t: &Target, gamma: Complex64) -> Result<Complex64> {
    let e = Fun::from(GaussPolyFun::gaussian(t.d, gamma)?);
    let te = Fun::from(GaussPolyFun::new(t.d, gamma, vec![c(0.0, 0.0), c(1.0, 0.0)])?);
    let mut acc = CDd::ZERO;
    for f in &t.funs {
        let a = inner_dd(f, &e)?;
        if a.norm_sqr().to_f64() < 1e-300 {
            return Err(Error::Regime(
                "a function is orthogonal to the fitted Gaussian".into(),
            ));
        }
        acc = acc + inner_dd(f, &te)? / a;
    }
    let k = t.funs.len() as f64 * t.d.as_f64() / (4.0 * gamma.re);
    Ok((acc - CDd::from_c64(c(k, 0.0))).to_c64())
}

/// Newton iteration on the gauge condition from the fitted width.
fn solve_gauge_width(t: &Target, start: Complex64) -> Result<Complex64> {
    let mut g = start;
    let unit = |g: Complex64| t.d.as_f64() / (4.0 * g.re);
    let mut r = gauge_condition(t, g)?;
    for _ in 0..60 {
        if r.norm() <= 1e-15 * unit(g) {
            return Ok(g);
        }
        let h = 1e-6 * g.norm();
        let dre = (gauge_condition(t, g + c(h, 0.0))? - gauge_condition(t, g - c(h, 0.0))?) / (2.0 * h);
        let dim = (gauge_condition(t, g + c(0.0, h))? - gauge_condition(t, g - c(0.0, h))?) / (2.0 * h);
        // [dre dim] δ = -r in R²
        let (a, b, cc, dd) = (dre.re, dim.re, dre.im, dim.im);
        let det = a * dd - b * cc;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (-r.re * dd + r.im * b) / det;
        let dy = (-r.im * a + r.re * cc) / det;
        let mut step = 1.0;
        let mut next = g;
        let mut rn = r;
        // damped step keeping Re γ > 0 and reducing the residual
        for _ in 0..30 {
            next = g + c(dx, dy) * step;
            if next.re > 0.0 {
                rn = gauge_condition(t, next)?;
                if rn.norm() / unit(next) < r.norm() / unit(g) {
                    break;
                }
            }
            step *= 0.5;
        }
        if !(rn.norm() / unit(next) < r.norm() / unit(g)) {
            // no further progress; accept if already tight
            break;
        }
        g = next;
        r = rn;
    }
    if r.norm() <= 1e-12 * unit(g) {
        Ok(g)
    } else {
        Err(Error::NonConvergence(format!(
            "gauge width iteration stalled with residual {:.3e}",
            r.norm() / unit(g)
        )))
    }
}

/// `w − F` in the representation of `w`.
fn minus_reference(w: &Fun) -> Result<Fun> {
    let d = w.dim();
    let big_f = GaussPolyFun::reference(d);
    match w {
        Fun::GaussPoly(p) => {
            if (p.width() - big_f.width()).norm() <= 0.1 {
                if let Ok(q) = p.rewidth(big_f.width(), 1e-18) {
                    return Ok(Fun::from(q.sub(&big_f)?));
                }
            }
            minus_reference(&Fun::from(p.to_profile(&NodeSpec::default())?))
        }
        Fun::Monomial(m) => match m.as_gauss_poly() {
            Some(p) => minus_reference(&Fun::from(p)),
            None => Err(Error::Unsupported(
                "gauge normalization of non-radial monomials".into(),
            )),
        },
        Fun::Profile(p) => {
            let grid = Arc::new(p.grid().clone());
            let samples = grid
                .nodes()
                .iter()
                .zip(p.samples())
                .map(|(&r, &s)| s - big_f.eval(r))
                .collect();
            Ok(Fun::from(ProfileFun::new(d, grid, samples)?))
        }
    }
}

/// The three orthogonality residuals of the frame `(F + f, F + g)`.
pub fn frame_residuals(f: &Fun, g: &Fun) -> Result<[f64; 3]> {
    let d = f.dim();
    let psi0 = Fun::from(GaussPolyFun::reference(d));
    let k = (2.0 * PI * PI / d.as_f64()).sqrt();
    let psi1 = Fun::from(GaussPolyFun::new(
        d,
        c(PI / 2.0, 0.0),
        vec![c(-k * d.half() / PI, 0.0), c(k, 0.0)],
    )?);
    Ok([
        inner(f, &psi0)?.norm(),
        inner(g, &psi0)?.norm(),
        (inner(f, &psi1)? + inner(g, &psi1)?).norm(),
    ])
}

/// Moves `(u, v)` to `(F + f, F + g)` with `⟨f,ψ_0⟩ = ⟨g,ψ_0⟩ = ⟨f+g,ψ_1⟩ = 0`.
///
/// The gauge width maximizes `|⟨u,E_γ⟩⟨v,E_γ⟩| / ‖E_γ‖²`, starting from the
/// fitted width; at that width the scalars `1/⟨·,F⟩` give all three
/// relations. Its Gaussian pair differs from the nearest pair only when
/// `|a| ≠ |b|`, and then by O(dist²).
pub fn gauge_normalize(u: &Fun, v: &Fun) -> Result<Gauged> {
    let fit = nearest_gaussian_pair(u, v)?;
    if !fit.converged {
        return Err(Error::NonConvergence(
            "nearest Gaussian pair did not converge".into(),
        ));
    }
    let t = Target::new(vec![u, v])?;
    let rel = fit.dist / t.total.to_f64().sqrt();
    if rel > LOCAL_REGIME {
        return Err(Error::Regime(format!(
            "relative distance {rel:.3} exceeds the local regime {LOCAL_REGIME}"
        )));
    }
    let gamma = solve_gauge_width(&t, fit.gamma_star)?;
    let d = u.dim();
    let mut rec = GaugeRecord {
        rho: (PI / (2.0 * gamma.re)).sqrt(),
        t: gamma.im,
        scalar_f: c(1.0, 0.0),
        scalar_g: c(1.0, 0.0),
        gamma,
    };
    let big_f = Fun::from(GaussPolyFun::reference(d));
    let (u1, v1) = rec.apply(u, v)?;
    rec.scalar_f = inner(&u1, &big_f)?.inv();
    rec.scalar_g = inner(&v1, &big_f)?.inv();
    let (u2, v2) = (u1.scale(rec.scalar_f), v1.scale(rec.scalar_g));
    let f = minus_reference(&u2)?;
    let g = minus_reference(&v2)?;
    let orthogonality = frame_residuals(&f, &g)?;
    Ok(Gauged {
        f,
        g,
        record: rec,
        fit,
        orthogonality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::build_basis;
    use proptest::prelude::*;

    fn dim(d: u32) -> Dimension {
        Dimension::new(d).unwrap()
    }

    fn gauss(d: u32, g: Complex64, s: Complex64) -> Fun {
        Fun::from(GaussPolyFun::gaussian(dim(d), g).unwrap().scale(s))
    }

    fn big_f(d: u32) -> Fun {
        Fun::from(GaussPolyFun::reference(dim(d)))
    }

    fn perturbed(d: u32, eps: f64) -> Fun {
        let sys = build_basis(dim(d), 2).unwrap();
        Fun::from(GaussPolyFun::reference(dim(d)).axpy(c(eps, 0.0), sys.psi(2)).unwrap())
    }

    /// Independent oracle: dense grid over (log Re γ, Im γ) refined twice.
    fn grid_oracle<F: Fn(Complex64) -> f64>(s: F, re: (f64, f64), im: (f64, f64)) -> (f64, Complex64) {
        let (mut lo_x, mut hi_x) = (re.0.ln(), re.1.ln());
        let (mut lo_y, mut hi_y) = im;
        let mut best = (f64::NEG_INFINITY, c(1.0, 0.0));
        for _ in 0..3 {
            let n = 120;
            for i in 0..=n {
                for j in 0..=n {
                    let x = lo_x + (hi_x - lo_x) * i as f64 / n as f64;
                    let y = lo_y + (hi_y - lo_y) * j as f64 / n as f64;
                    let g = c(x.exp(), y);
                    let v = s(g);
                    if v > best.0 {
                        best = (v, g);
                    }
                }
            }
            let (cx, cy) = (best.1.re.ln(), best.1.im);
            let (wx, wy) = ((hi_x - lo_x) / 20.0, (hi_y - lo_y) / 20.0);
            lo_x = cx - wx;
            hi_x = cx + wx;
            lo_y = cy - wy;
            hi_y = cy + wy;
        }
        best
    }

    #[test]
    fn pair_examples() {
        let r = nearest_gaussian_pair(&big_f(1), &big_f(1)).unwrap();
        assert!(r.converged);
        assert!((r.gamma_star - c(PI / 2.0, 0.0)).norm() < 1e-8);
        assert!((r.coeff_a - c(1.0, 0.0)).norm() < 1e-8 && (r.coeff_b - c(1.0, 0.0)).norm() < 1e-8);
        assert!(r.dist < 1e-10);

        let g0 = c(0.7, -1.3);
        let r = nearest_gaussian_pair(&gauss(2, g0, c(1.0, 0.0)), &gauss(2, g0, c(2.0, 0.0))).unwrap();
        assert!(r.dist < 1e-9, "{}", r.dist);
        assert!((r.coeff_b / r.coeff_a - c(2.0, 0.0)).norm() < 1e-8);
        assert!((r.gamma_star - g0).norm() < 1e-7);
    }

    #[test]
    fn perturbed_plant_distance() {
        let eps = 0.05;
        let u = perturbed(1, eps);
        let r = nearest_gaussian_pair(&u, &u).unwrap();
        assert!(r.converged);
        let want = 2.0 * eps * eps;
        assert!((r.dist_sqr() - want).abs() < 0.01 * want, "{}", r.dist_sqr());
        let total = 2.0 * u.norm_sqr();
        let (smax, _) = grid_oracle(|g| pair_score(&u, &u, g).unwrap(), (0.3, 8.0), (-3.0, 3.0));
        assert!(r.dist_sqr() <= total - smax + 1e-12);
        assert!((r.dist_sqr() - (total - smax)).abs() < 1e-6);
    }

    #[test]
    fn single_examples() {
        let g0 = c(1.0, 2.0);
        let r = nearest_gaussian_single(&gauss(1, g0, c(1.0, 0.0))).unwrap();
        assert!(r.dist < 1e-9 && (r.gamma_star - g0).norm() < 1e-7);
        assert_eq!(r.coeff_b, c(0.0, 0.0));

        let sys = build_basis(dim(1), 2).unwrap();
        let psi2 = Fun::from(sys.psi(2).clone());
        let r = nearest_gaussian_single(&psi2).unwrap();
        let d2 = r.dist_sqr();
        assert!(d2 > 0.0 && d2 < 1.0);
        let (smax, _) = grid_oracle(|g| single_score(&psi2, g).unwrap(), (0.05, 50.0), (-20.0, 20.0));
        assert!(single_score(&psi2, r.gamma_star).unwrap() >= smax - 1e-9);
        assert!((d2 - (1.0 - smax)).abs() < 1e-6);

        let z = Fun::from(GaussPolyFun::zero(dim(1), c(1.0, 0.0)).unwrap());
        assert!(matches!(nearest_gaussian_single(&z), Err(Error::Precondition(_))));
    }

    #[test]
    fn distance_recomputes_from_profiles() {
        let d = dim(2);
        let f = Fun::from(GaussPolyFun::new(d, c(0.8, 0.3), vec![c(1.0, 0.2), c(-0.4, 0.1)]).unwrap());
        let g = Fun::from(GaussPolyFun::new(d, c(1.1, -0.2), vec![c(0.5, 0.0), c(0.0, 0.3)]).unwrap());
        let r = nearest_gaussian_pair(&f, &g).unwrap();
        let e = GaussPolyFun::gaussian(d, r.gamma_star).unwrap();
        let spec = NodeSpec { count: Some(400), radius: Some(12.0) };
        let diff = |w: &Fun, a: Complex64| -> f64 {
            let p = w.to_profile(&spec).unwrap();
            let q = e.scale(a).to_profile(&spec).unwrap();
            let grid = Arc::new(p.grid().clone());
            let s = p.samples().iter().zip(q.samples()).map(|(x, y)| x - y).collect();
            ProfileFun::new(d, grid, s).unwrap().norm_sqr()
        };
        let direct = diff(&f, r.coeff_a) + diff(&g, r.coeff_b);
        assert!((direct - r.dist_sqr()).abs() < 1e-9, "{direct} vs {}", r.dist_sqr());
        assert!(r.dist <= (f.norm_sqr() + g.norm_sqr()).sqrt());
    }

    #[test]
    fn gauge_examples() {
        let out = gauge_normalize(&big_f(1), &big_f(1)).unwrap();
        assert!(out.f.norm() < 1e-9 && out.g.norm() < 1e-9);
        let rec = out.record;
        assert!((rec.rho - 1.0).abs() < 1e-9 && rec.t.abs() < 1e-9);
        assert!((rec.scalar_f - c(1.0, 0.0)).norm() < 1e-9);

        let rho = 2.5;
        let w = big_f(2).dilate(rho, true).unwrap();
        let out = gauge_normalize(&w, &w).unwrap();
        assert!(out.f.norm() < 1e-9 && out.g.norm() < 1e-9);
        assert!((out.record.rho - 1.0 / rho).abs() < 1e-8, "{}", out.record.rho);

        for d in 1..=3 {
            let eps = 0.05;
            let u = perturbed(d, eps);
            let out = gauge_normalize(&u, &u).unwrap();
            assert!(out.orthogonality.iter().all(|&r| r <= 1e-8), "{:?}", out.orthogonality);
            let sys = build_basis(dim(d), 2).unwrap();
            let target = sys.psi(2).scale(c(eps, 0.0));
            let got = out.f.radial_part().expect("analytic gauge output");
            let err = got.sub(&target).unwrap().norm();
            assert!(err < 1e-10, "{err}");
        }
    }

    #[test]
    fn gauge_rejects_far_pairs() {
        let sys = build_basis(dim(1), 3).unwrap();
        let u = Fun::from(sys.psi(3).clone());
        assert!(matches!(gauge_normalize(&u, &u), Err(Error::Regime(_))));
    }

    #[test]
    fn gauge_record_reproduces_gauge_pair() {
        let d = dim(1);
        let u = Fun::from(GaussPolyFun::new(d, c(0.9, 0.4), vec![c(1.0, 0.0), c(0.05, -0.02)]).unwrap());
        let v = Fun::from(GaussPolyFun::new(d, c(0.9, 0.4), vec![c(0.0, 2.0), c(-0.03, 0.0)]).unwrap());
        let out = gauge_normalize(&u, &v).unwrap();
        assert!(out.orthogonality.iter().all(|&r| r <= 1e-8), "{:?}", out.orthogonality);
        let (pu, pv) = out.record.invert(&big_f(1), &big_f(1)).unwrap();
        let e = Fun::from(GaussPolyFun::gaussian(d, out.record.gamma).unwrap());
        let n = e.norm_sqr();
        for (p, w) in [(pu, &u), (pv, &v)] {
            let want = inner(w, &e).unwrap() / n;
            let Fun::GaussPoly(p) = p else { panic!("representation changed") };
            assert!((p.width() - out.record.gamma).norm() < 1e-12);
            assert_eq!(p.coeffs().len(), 1);
            assert!((p.coeffs()[0] - want).norm() < 1e-9 * want.norm());
        }
        // applying then inverting is the identity
        let (a, b) = out.record.apply(&u, &v).unwrap();
        let (a, b) = out.record.invert(&a, &b).unwrap();
        for (x, y) in [(a, &u), (b, &v)] {
            let err = x.norm_sqr() - 2.0 * inner(&x, y).unwrap().re + y.norm_sqr();
            assert!(err.abs() < 1e-14 * y.norm_sqr(), "{err}");
        }
    }

    #[test]
    fn first_variation_vanishes() {
        let d = dim(2);
        let u = Fun::from(GaussPolyFun::new(d, c(1.2, -0.3), vec![c(1.0, 0.0), c(0.04, 0.03)]).unwrap());
        let v = Fun::from(GaussPolyFun::new(d, c(1.2, -0.3), vec![c(0.7, 0.1), c(-0.02, 0.0)]).unwrap());
        let out = gauge_normalize(&u, &v).unwrap();
        let (u2, v2) = out.record.apply(&u, &v).unwrap();
        let obj = |s: Complex64, w: Complex64| -> f64 {
            let e = Fun::from(GaussPolyFun::gaussian(d, c(PI / 2.0, 0.0) + w).unwrap().scale(s));
            let one = |x: &Fun| x.norm_sqr() - 2.0 * inner(x, &e).unwrap().re + e.norm_sqr();
            one(&u2) + one(&v2)
        };
        let h = 1e-5;
        let dirs = [
            (c(1.0 + h, 0.0), c(1.0 - h, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
            (c(1.0, 0.0), c(1.0, 0.0), c(h, 0.0), c(-h, 0.0)),
            (c(1.0, 0.0), c(1.0, 0.0), c(0.0, h), c(0.0, -h)),
        ];
        for (s1, s2, w1, w2) in dirs {
            let deriv = (obj(s1, w1) - obj(s2, w2)) / (2.0 * h);
            assert!(deriv.abs() < 1e-6, "{deriv}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn distance_is_gauge_invariant(
            re in 0.4f64..3.0, im in -2.0f64..2.0,
            p1 in -0.3f64..0.3, p2 in -0.3f64..0.3,
            rho in 0.5f64..2.0, t in -1.0f64..1.0, ph in 0.0f64..6.0,
        ) {
            let d = dim(1);
            let u = Fun::from(GaussPolyFun::new(d, c(re, im), vec![c(1.0, 0.0), c(p1, p2)]).unwrap());
            let v = Fun::from(GaussPolyFun::new(d, c(re, im), vec![c(0.5, 0.5), c(p2, 0.0)]).unwrap());
            let base = nearest_gaussian_pair(&u, &v).unwrap();
            let rec = GaugeRecord { rho, t, scalar_f: Complex64::from_polar(1.0, ph), scalar_g: c(1.0, 0.0), gamma: c(1.0, 0.0) };
            let (u2, v2) = rec.apply(&u, &v).unwrap();
            let moved = nearest_gaussian_pair(&u2, &v2).unwrap();
            prop_assert!((moved.dist - base.dist).abs() <= 1e-8 * base.dist.max(1e-8));
        }
    }
}

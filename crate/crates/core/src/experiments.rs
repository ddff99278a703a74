//! Deficit, perturbation sweeps, random scans and identity checks.
//!
//! Every report carries its assertions as [`Check`] records; nothing here
//! panics on a failed assertion.

use crate::error::{Error, Result};
use crate::funcspace::{
    lorentz_24_norm, Fun, GaussPolyFun, MonomialGaussFun, PairDescriptor,
};
use crate::gaussfit::{nearest_gaussian_pair, GaugeRecord, GaussFitResult};
use crate::radproj::projection_norm;
use crate::radsets::{
    check_sigma_pointwise, eccentric_family, first_moment, indicator_projection_norm, scan_combined,
    scan_l2, scan_pairing, sigma_r, BoundReport, RadialSet,
};
use crate::report::{all_passed, Check};
use crate::scalars::Dimension;
use crate::spectral::{build_basis, t_quadratic_form, EigenSystem, QuadraticForm};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Default perturbation sizes.
pub const DEFAULT_EPS: [f64; 5] = [0.02, 0.04, 0.06, 0.08, 0.10];
/// Slack allowed above Φ = 1 and below a zero deficit.
pub const PHI_TOL: f64 = 1e-9;
/// Below this distance a pair counts as extremal and ratios are omitted.
pub const DIST_FLOOR: f64 = 1e-6;
/// Largest ψ index used by the random scan.
pub const SCAN_MODES: usize = 6;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn dim(d: u32) -> Result<Dimension> {
    Dimension::new(d)
}

/// Deterministic generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn normal_c(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// The ratio `(1 − Φ)/dist²` is `ratio_phi`; `(1 − √Φ)/dist²` is `ratio_norm`.
#[derive(Debug, Clone, Serialize)]
pub struct DeficitRecord {
    pub pair: PairDescriptor,
    /// Reciprocal norms applied to f and g.
    pub scalars: [f64; 2],
    pub phi: f64,
    pub proj_norm: f64,
    pub deficit: f64,
    pub dist: f64,
    pub ratio_phi: Option<f64>,
    pub ratio_norm: Option<f64>,
    pub fit: GaussFitResult,
    pub checks: Vec<Check>,
}

impl DeficitRecord {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Φ and the distance to the extremal manifold for the normalized pair.
pub fn deficit(f: &Fun, g: &Fun) -> Result<DeficitRecord> {
    let (nf, ng) = (f.norm(), g.norm());
    if !(nf > 0.0) || !(ng > 0.0) {
        return Err(Error::Precondition("deficit needs nonzero f and g".into()));
    }
    let fu = f.scale(c(1.0 / nf, 0.0));
    let gu = g.scale(c(1.0 / ng, 0.0));
    let proj_norm = projection_norm(&fu, &gu)?;
    let phi = proj_norm * proj_norm;
    let fit = nearest_gaussian_pair(&fu, &gu)?;
    let dist = fit.dist;
    let usable = fit.converged && dist > DIST_FLOOR;
    let d2 = dist * dist;
    Ok(DeficitRecord {
        pair: PairDescriptor::new(f, g),
        scalars: [1.0 / nf, 1.0 / ng],
        phi,
        proj_norm,
        deficit: 1.0 - proj_norm,
        dist,
        ratio_phi: usable.then(|| (1.0 - phi) / d2),
        ratio_norm: usable.then(|| (1.0 - proj_norm) / d2),
        checks: vec![Check::at_most("phi_at_most_one", phi, 1.0, PHI_TOL)],
        fit,
    })
}

/// ψ-direction of a sweep: `f = ψ_m`, `g = ±ψ_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Direction {
    pub m: usize,
    pub symmetric: bool,
}

impl Direction {
    /// Parses `psi:M`.
    pub fn parse(spec: &str, symmetric: bool) -> Result<Direction> {
        let m = spec
            .strip_prefix("psi:")
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("direction must look like psi:M, got {spec:?}")))?;
        Ok(Direction { m, symmetric })
    }

    pub fn label(&self) -> String {
        format!("psi:{} {}", self.m, if self.symmetric { "sym" } else { "antisym" })
    }

    pub fn functions(&self, sys: &EigenSystem) -> Result<(GaussPolyFun, GaussPolyFun)> {
        if self.m > sys.max_index() {
            return Err(Error::Usage(format!("basis only reaches m = {}", sys.max_index())));
        }
        let f = sys.psi(self.m).clone();
        let g = if self.symmetric { f.clone() } else { f.scale(c(-1.0, 0.0)) };
        Ok((f, g))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub one_minus_phi: f64,
    pub one_minus_norm: f64,
    pub dist: f64,
    pub ratio_phi: Option<f64>,
    pub ratio_norm: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub d: Dimension,
    pub direction: String,
    pub eps: Vec<f64>,
    pub points: Vec<SweepPoint>,
    pub c2: f64,
    pub c3: f64,
    pub predicted_c2: f64,
    pub rel_error: f64,
    /// max |y/ε² − (c₂ + c₃ε)| over the grid.
    pub fit_residual: f64,
    pub pair_norm_sq: f64,
    /// c₂ / ‖(f,g)‖², the limit of (1 − Φ)/dist².
    pub limiting_ratio_phi: f64,
    /// Half of the above, the limit of (1 − √Φ)/dist².
    pub limiting_ratio_norm: f64,
    pub quadratic_form: QuadraticForm,
    pub checks: Vec<Check>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }

    /// ε ↦ c₂ε² + c₃ε³.
    pub fn model(&self, eps: f64) -> f64 {
        self.c2 * eps * eps + self.c3 * eps * eps * eps
    }
}

/// Weighted least squares of `y/ε²` on `(1, ε)` with weights `1/ε`.
fn fit_quadratic_cubic(eps: &[f64], y: &[f64]) -> (f64, f64) {
    let (mut s0, mut s1, mut s2, mut t0, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&e, &v) in eps.iter().zip(y) {
        let w = 1.0 / e;
        let z = v / (e * e);
        s0 += w;
        s1 += w * e;
        s2 += w * e * e;
        t0 += w * z;
        t1 += w * z * e;
    }
    let det = s0 * s2 - s1 * s1;
    ((t0 * s2 - t1 * s1) / det, (s0 * t1 - s1 * t0) / det)
}

/// Sweep of `1 − Φ(F + εf, F + εg)` along a constrained direction.
pub fn second_order_sweep(
    f_dir: &GaussPolyFun,
    g_dir: &GaussPolyFun,
    eps_grid: &[f64],
    label: &str,
) -> Result<SweepReport> {
    if eps_grid.len() < 5 {
        return Err(Error::Usage("a sweep needs at least 5 values of ε".into()));
    }
    if eps_grid.iter().any(|&e| !(e > 0.0 && e <= 0.2)) {
        return Err(Error::Usage("ε values must lie in (0, 0.2]".into()));
    }
    let d = f_dir.dim();
    let ff = Fun::from(f_dir.clone());
    let gf = Fun::from(g_dir.clone());
    let q = t_quadratic_form(&ff, &gf)?;
    let big_f = GaussPolyFun::reference(d);
    let points = eps_grid
        .par_iter()
        .map(|&eps| -> Result<SweepPoint> {
            let u = Fun::from(big_f.axpy(c(eps, 0.0), f_dir)?);
            let v = Fun::from(big_f.axpy(c(eps, 0.0), g_dir)?);
            let rec = deficit(&u, &v)?;
            Ok(SweepPoint {
                eps,
                one_minus_phi: 1.0 - rec.phi,
                one_minus_norm: rec.deficit,
                dist: rec.dist,
                ratio_phi: rec.ratio_phi,
                ratio_norm: rec.ratio_norm,
                converged: rec.fit.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let y: Vec<f64> = points.iter().map(|p| p.one_minus_phi).collect();
    let (c2, c3) = fit_quadratic_cubic(eps_grid, &y);
    let fit_residual = eps_grid
        .iter()
        .zip(&y)
        .map(|(&e, &v)| (v / (e * e) - (c2 + c3 * e)).abs())
        .fold(0.0, f64::max);
    let pair_norm_sq = q.pair_norm_sq;
    let predicted_c2 = pair_norm_sq - q.value;
    let rel_error = ((c2 - predicted_c2) / predicted_c2).abs();
    let kd = d.as_f64() / (2.0 * (d.as_f64() + 1.0));
    let mut checks = vec![
        Check::at_most("fit_residual", fit_residual, 0.0, 1e-3 * c2.abs()),
        Check::at_most("c2_rel_error", rel_error, 0.0, 1e-2),
    ];
    let local = points
        .iter()
        .filter(|p| p.dist <= 0.1)
        .map(|p| p.one_minus_phi - (kd * p.dist * p.dist - 10.0 * p.dist.powi(3)))
        .fold(f64::INFINITY, f64::min);
    if local.is_finite() {
        checks.push(Check::at_least("local_stability_slack", local, 0.0, PHI_TOL));
    }
    checks.push(Check::at_least(
        "min_one_minus_phi",
        y.iter().cloned().fold(f64::INFINITY, f64::min),
        0.0,
        PHI_TOL,
    ));
    Ok(SweepReport {
        d,
        direction: label.to_string(),
        eps: eps_grid.to_vec(),
        points,
        c2,
        c3,
        predicted_c2,
        rel_error,
        fit_residual,
        pair_norm_sq,
        limiting_ratio_phi: c2 / pair_norm_sq,
        limiting_ratio_norm: c2 / (2.0 * pair_norm_sq),
        quadratic_form: q,
        checks,
    })
}

/// Sweep along a ψ direction.
pub fn direction_sweep(d: Dimension, dir: Direction, eps_grid: &[f64]) -> Result<SweepReport> {
    let sys = build_basis(d, dir.m.max(2))?;
    let (f, g) = dir.functions(&sys)?;
    second_order_sweep(&f, &g, eps_grid, &dir.label())
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeEntry {
    pub m: usize,
    pub symmetric: bool,
    pub c2: f64,
    pub predicted_c2: f64,
    pub ratio_phi: f64,
    pub ratio_norm: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub d: Dimension,
    /// d / (2(d+1)).
    pub target: f64,
    pub entries: Vec<ProbeEntry>,
    pub min_symmetric_ratio_phi: f64,
    pub argmin_m: usize,
    pub min_symmetric_ratio_norm: f64,
    /// Which limiting ratio equals d/(2(d+1)) within 2%: "ratio_phi", "ratio_norm" or "neither".
    pub matches: String,
    pub checks: Vec<Check>,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Limiting ratios over f = ±g = ψ_m, m = 2..=8.
pub fn sharp_constant_probe(d: Dimension) -> Result<ProbeReport> {
    let sys = build_basis(d, 8)?;
    let dirs: Vec<Direction> = (2..=8)
        .flat_map(|m| [true, false].map(|symmetric| Direction { m, symmetric }))
        .collect();
    let entries = dirs
        .par_iter()
        .map(|dir| -> Result<ProbeEntry> {
            let (f, g) = dir.functions(&sys)?;
            let r = second_order_sweep(&f, &g, &DEFAULT_EPS, &dir.label())?;
            Ok(ProbeEntry {
                m: dir.m,
                symmetric: dir.symmetric,
                c2: r.c2,
                predicted_c2: r.predicted_c2,
                ratio_phi: r.limiting_ratio_phi,
                ratio_norm: r.limiting_ratio_norm,
                rel_error: r.rel_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let target = d.as_f64() / (2.0 * (d.as_f64() + 1.0));
    let sym: Vec<&ProbeEntry> = entries.iter().filter(|e| e.symmetric).collect();
    let best = sym
        .iter()
        .min_by(|a, b| a.ratio_phi.total_cmp(&b.ratio_phi))
        .expect("seven symmetric directions");
    let near = |x: f64| ((x - target) / target).abs() <= 0.02;
    let matches = if near(best.ratio_phi) {
        "ratio_phi"
    } else if near(best.ratio_norm) {
        "ratio_norm"
    } else {
        "neither"
    };
    let m2 = sym.iter().find(|e| e.m == 2).expect("m = 2 present").ratio_phi;
    let anti_min = entries
        .iter()
        .filter(|e| !e.symmetric)
        .map(|e| e.ratio_phi)
        .fold(f64::INFINITY, f64::min);
    let checks = vec![
        Check::holds("argmin_at_m2", best.m == 2),
        Check::close("min_ratio_phi", best.ratio_phi, target, 0.02 * target),
        Check::holds("antisymmetric_above_m2", anti_min > m2),
        Check::at_most(
            "max_c2_rel_error",
            entries.iter().map(|e| e.rel_error).fold(0.0, f64::max),
            0.0,
            1e-2,
        ),
    ];
    Ok(ProbeReport {
        d,
        target,
        min_symmetric_ratio_phi: best.ratio_phi,
        argmin_m: best.m,
        min_symmetric_ratio_norm: best.ratio_norm,
        matches: matches.into(),
        entries,
        checks,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanSample {
    pub index: usize,
    pub control: bool,
    pub phi: f64,
    pub deficit: f64,
    pub dist: f64,
    pub ratio_phi: Option<f64>,
    pub ratio_norm: Option<f64>,
    pub converged: bool,
    /// |Φ(u, v) − Φ(gauge(u, v))|.
    pub gauge_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub d: Dimension,
    pub n: usize,
    pub seed: u64,
    pub amplitude: f64,
    pub samples: Vec<ScanSample>,
    pub min_deficit: f64,
    pub min_ratio_phi: Option<f64>,
    pub min_ratio_norm: Option<f64>,
    pub nonconverged: usize,
    pub checks: Vec<Check>,
}

impl ScanReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

fn random_gauge(rng: &mut ChaCha8Rng) -> GaugeRecord {
    let l2 = 2f64.ln();
    let mut scalar = || Complex64::from_polar(rng.random_range(-l2..l2).exp(), rng.random_range(0.0..2.0 * PI));
    let (sf, sg) = (scalar(), scalar());
    GaugeRecord {
        rho: rng.random_range(-l2..l2).exp(),
        t: rng.random_range(-1.0..1.0),
        scalar_f: sf,
        scalar_g: sg,
        gamma: c(PI / 2.0, 0.0),
    }
}

fn scan_sample(
    sys: &EigenSystem,
    seed: u64,
    index: usize,
    amplitude: f64,
) -> Result<ScanSample> {
    let d = sys.dim();
    let mut rng = sample_rng(seed, index as u64);
    let control = index == 0;
    let (u, v) = if control {
        let gamma = c(rng.random_range(0.3..3.0), rng.random_range(-2.0..2.0));
        let e = GaussPolyFun::gaussian(d, gamma)?;
        let k = normal_c(&mut rng);
        (Fun::from(e.clone()), Fun::from(e.scale(k)))
    } else {
        let mut pick = || -> Vec<Complex64> {
            let mut z: Vec<Complex64> = (0..=SCAN_MODES).map(|_| normal_c(&mut rng) * amplitude).collect();
            z[0] += c(1.0, 0.0);
            z
        };
        let (a, b) = (pick(), pick());
        (Fun::from(sys.combine(&a)?), Fun::from(sys.combine(&b)?))
    };
    let gauge = random_gauge(&mut rng);
    let phi0 = {
        let p = projection_norm(&u, &v)?;
        p * p / (u.norm_sqr() * v.norm_sqr())
    };
    let (u2, v2) = gauge.apply(&u, &v)?;
    let rec = deficit(&u2, &v2)?;
    Ok(ScanSample {
        index,
        control,
        phi: rec.phi,
        deficit: rec.deficit,
        dist: rec.dist,
        ratio_phi: if control { None } else { rec.ratio_phi },
        ratio_norm: if control { None } else { rec.ratio_norm },
        converged: rec.fit.converged,
        gauge_residual: (rec.phi - phi0).abs(),
    })
}

/// `n` random near-extremal pairs plus one extremal control at index 0.
pub fn random_stability_scan(d: Dimension, n: usize, seed: u64, amplitude: f64) -> Result<ScanReport> {
    if n == 0 {
        return Err(Error::Usage("scan needs N ≥ 1".into()));
    }
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(Error::Domain(format!("amplitude must be positive, got {amplitude}")));
    }
    let sys = build_basis(d, SCAN_MODES)?;
    let samples = (0..=n)
        .into_par_iter()
        .map(|i| scan_sample(&sys, seed, i, amplitude))
        .collect::<Result<Vec<_>>>()?;
    let min_deficit = samples.iter().map(|s| s.deficit).fold(f64::INFINITY, f64::min);
    let ratios = |f: fn(&ScanSample) -> Option<f64>| {
        samples
            .iter()
            .filter_map(f)
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.min(r))))
    };
    let min_ratio_phi = ratios(|s| s.ratio_phi);
    let min_ratio_norm = ratios(|s| s.ratio_norm);
    let far_deficit = samples
        .iter()
        .filter(|s| s.dist > DIST_FLOOR)
        .map(|s| s.deficit)
        .fold(f64::INFINITY, f64::min);
    let control = &samples[0];
    let mut checks = vec![
        Check::at_least("min_deficit", min_deficit, 0.0, PHI_TOL),
        Check::at_most("control_dist", control.dist, 0.0, 1e-7),
        Check::at_most(
            "max_gauge_residual",
            samples.iter().map(|s| s.gauge_residual).fold(0.0, f64::max),
            0.0,
            PHI_TOL,
        ),
    ];
    if far_deficit.is_finite() {
        checks.push(Check::at_least("min_deficit_off_manifold", far_deficit, 0.0, 0.0));
    }
    checks.push(Check::holds(
        "ratio_phi_positive",
        min_ratio_phi.is_none_or(|r| r > 0.0),
    ));
    Ok(ScanReport {
        d,
        n,
        seed,
        amplitude,
        nonconverged: samples.iter().filter(|s| !s.converged).count(),
        samples,
        min_deficit,
        min_ratio_phi,
        min_ratio_norm,
        checks,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FourierCheck {
    pub label: String,
    pub direct: f64,
    pub transformed: f64,
    pub residual: f64,
    pub check: Check,
}

/// `|‖ℙ(f̂⊗ĝ)‖ − ‖ℙ(f⊗g)‖|` for an analytic pair of equal width.
pub fn fourier_invariance_check(f: &Fun, g: &Fun) -> Result<FourierCheck> {
    let (Some(wf), Some(wg)) = (f.width(), g.width()) else {
        return Err(Error::Unsupported("Fourier check needs analytic inputs".into()));
    };
    if (wf - wg).norm() > 1e-14 * wf.norm().max(wg.norm()) {
        return Err(Error::Unsupported(format!(
            "Fourier check needs equal widths, got {wf} and {wg}"
        )));
    }
    let direct = projection_norm(f, g)?;
    let transformed = projection_norm(&f.fourier()?, &g.fourier()?)?;
    let residual = (direct - transformed).abs();
    Ok(FourierCheck {
        label: String::new(),
        direct,
        transformed,
        residual,
        check: Check::at_most("fourier_residual", residual, 0.0, 1e-8),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FourierSuite {
    pub seed: u64,
    pub cases: Vec<FourierCheck>,
    pub max_residual: f64,
    pub checks: Vec<Check>,
}

/// Random analytic pair of equal width: Gaussian polynomials of degree ≤ 4
/// or monomials with `α_j ≤ 1`.
pub fn random_analytic_pair(rng: &mut ChaCha8Rng, d: Dimension, max_deg: usize) -> Result<(Fun, Fun)> {
    let width = c(rng.random_range(0.3..3.0), rng.random_range(-2.0..2.0));
    let poly = |rng: &mut ChaCha8Rng| -> Result<Fun> {
        let deg = rng.random_range(0..=max_deg);
        let coeffs = (0..=deg).map(|_| normal_c(rng)).collect();
        Ok(Fun::from(GaussPolyFun::new(d, width, coeffs)?))
    };
    if rng.random_bool(0.2) {
        let n = d.get() as usize;
        let mono = |rng: &mut ChaCha8Rng| -> Result<Fun> {
            let alpha = (0..n).map(|_| rng.random_range(0..=1u32)).collect();
            Ok(Fun::from(MonomialGaussFun::new(d, alpha, normal_c(rng), width)?))
        };
        let f = mono(rng)?;
        let g = if rng.random_bool(0.5) { mono(rng)? } else { poly(rng)? };
        Ok((f, g))
    } else {
        let f = poly(rng)?;
        let g = poly(rng)?;
        Ok((f, g))
    }
}

/// The three documented Fourier examples plus `n` random analytic pairs.
pub fn fourier_suite(n: usize, seed: u64) -> Result<FourierSuite> {
    let mut cases = Vec::new();
    for d in 1..=3 {
        let dd = dim(d)?;
        let big_f = GaussPolyFun::reference(dd);
        let sys = build_basis(dd, 2)?;
        let list = [
            ("F,F", Fun::from(big_f.clone()), Fun::from(big_f.clone())),
            ("psi2,F", Fun::from(sys.psi(2).clone()), Fun::from(big_f.clone())),
            ("|x|^2F,|x|^2F", Fun::from(big_f.mul_r2()), Fun::from(big_f.mul_r2())),
        ];
        for (label, f, g) in list {
            let mut r = fourier_invariance_check(&f, &g)?;
            r.label = format!("{label} d={d}");
            cases.push(r);
        }
    }
    let random = (0..n)
        .into_par_iter()
        .map(|i| -> Result<FourierCheck> {
            let mut rng = sample_rng(seed, i as u64);
            let d = dim(1 + (i % 3) as u32)?;
            let (f, g) = random_analytic_pair(&mut rng, d, 4)?;
            let mut r = fourier_invariance_check(&f, &g)?;
            r.label = format!("random {i} d={d}");
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    cases.extend(random);
    let max_residual = cases.iter().map(|c| c.residual).fold(0.0, f64::max);
    let checks = vec![Check::at_most("max_fourier_residual", max_residual, 0.0, 1e-8)];
    Ok(FourierSuite {
        seed,
        cases,
        max_residual,
        checks,
    })
}

/// `‖ℙ(f⊗g)‖ / (‖f‖_{L^{2,4}} ‖g‖_{L^{2,4}})`.
pub fn lorentz_ratio(f: &Fun, g: &Fun) -> Result<f64> {
    let (lf, lg) = (lorentz_24_norm(f)?, lorentz_24_norm(g)?);
    if lf == 0.0 || lg == 0.0 {
        return Err(Error::Precondition("Lorentz ratio of a zero function".into()));
    }
    Ok(projection_norm(f, g)? / (lf * lg))
}

/// Same ratio for indicators of radial sets; the L^{2,4} norm is |A|^{1/2}.
pub fn lorentz_ratio_sets(a: &RadialSet, b: &RadialSet) -> Result<f64> {
    let (la, lb) = (a.lorentz_24_norm()?, b.lorentz_24_norm()?);
    if la == 0.0 || lb == 0.0 {
        return Err(Error::Precondition("Lorentz ratio of an empty set".into()));
    }
    Ok(indicator_projection_norm(a, b)? / (la * lb))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LorentzFamily {
    Gauss,
    Indicator,
}

impl std::str::FromStr for LorentzFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss" => Ok(LorentzFamily::Gauss),
            "indicator" => Ok(LorentzFamily::Indicator),
            other => Err(Error::Parse(format!("unknown Lorentz family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LorentzRow {
    pub label: String,
    pub rho: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LorentzReport {
    pub family: LorentzFamily,
    pub rows: Vec<LorentzRow>,
    pub supremum: f64,
    /// max over members of max_ρ |r(ρ)/r(1) − 1|.
    pub max_dilation_variation: f64,
    pub checks: Vec<Check>,
}

impl LorentzReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Dilation factors 0.1 .. 10, log-spaced, with 1 first.
fn dilation_sweep() -> Vec<f64> {
    let mut v = vec![1.0];
    v.extend((0..=8).map(|k| 10f64.powf(-1.0 + 0.25 * k as f64)).filter(|&r| r != 1.0));
    v
}

/// Lorentz-corollary ratios over a family, each under a dilation sweep.
pub fn lorentz_ratio_scan(family: LorentzFamily) -> Result<LorentzReport> {
    let rhos = dilation_sweep();
    let mut members: Vec<(String, Vec<f64>)> = Vec::new();
    match family {
        LorentzFamily::Gauss => {
            for d in 1..=2 {
                let dd = dim(d)?;
                let big_f = GaussPolyFun::reference(dd);
                let pairs = vec![
                    ("F,F", big_f.clone(), big_f.clone()),
                    ("F,E_(1+i)", big_f.clone(), GaussPolyFun::gaussian(dd, c(1.0, 1.0))?),
                    (
                        "(1-|x|^2)E_1,E_2",
                        GaussPolyFun::from_real(dd, c(1.0, 0.0), &[1.0, -1.0])?,
                        GaussPolyFun::gaussian(dd, c(2.0, 0.0))?,
                    ),
                ];
                let rows = pairs
                    .par_iter()
                    .map(|(label, f, g)| -> Result<(String, Vec<f64>)> {
                        let ratios = rhos
                            .iter()
                            .map(|&rho| {
                                lorentz_ratio(
                                    &Fun::from(f.dilate(rho, true)?),
                                    &Fun::from(g.dilate(rho, true)?),
                                )
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok((format!("{label} d={d}"), ratios))
                    })
                    .collect::<Result<Vec<_>>>()?;
                members.extend(rows);
            }
        }
        LorentzFamily::Indicator => {
            for d in 1..=2 {
                let dd = dim(d)?;
                for (k, (a, b)) in eccentric_family(dd).iter().enumerate().step_by(2) {
                    let ratios = rhos
                        .iter()
                        .map(|&rho| lorentz_ratio_sets(&a.scaled(rho), &b.scaled(rho)))
                        .collect::<Result<Vec<_>>>()?;
                    members.push((format!("eccentric[{k}] d={d}"), ratios));
                }
            }
        }
    }
    let mut rows = Vec::new();
    let mut variation: f64 = 0.0;
    let mut supremum: f64 = 0.0;
    for (label, ratios) in &members {
        let base = ratios[0];
        for (&rho, &r) in rhos.iter().zip(ratios) {
            variation = variation.max((r / base - 1.0).abs());
            supremum = supremum.max(r);
            rows.push(LorentzRow {
                label: label.clone(),
                rho,
                ratio: r,
            });
        }
    }
    let checks = vec![
        Check::at_most("max_dilation_variation", variation, 0.0, 1e-6),
        Check::holds("supremum_finite", supremum.is_finite()),
    ];
    Ok(LorentzReport {
        family,
        rows,
        supremum,
        max_dilation_variation: variation,
        checks,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaRow {
    pub config: usize,
    pub d: Dimension,
    pub a: RadialSet,
    pub b: RadialSet,
    pub r: f64,
    pub exact: f64,
    pub monte_carlo: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaReport {
    pub samples: usize,
    pub seed: u64,
    pub rows: Vec<SigmaRow>,
    pub max_abs_error: f64,
    pub max_first_moment_rel_residual: f64,
    pub max_scale_residual: f64,
    pub checks: Vec<Check>,
}

impl SigmaReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Ten (A, B, r) configurations across d = 1, 2, 3.
pub fn sigma_configurations() -> Result<Vec<(RadialSet, RadialSet, f64)>> {
    let (d1, d2, d3) = (dim(1)?, dim(2)?, dim(3)?);
    Ok(vec![
        (RadialSet::ball(d1, 1.0)?, RadialSet::ball(d1, 1.0)?, 1.2),
        (RadialSet::ball(d1, 0.5)?, RadialSet::annulus(d1, 0.3, 2.0)?, 1.0),
        (RadialSet::annulus(d1, 0.2, 0.9)?, RadialSet::new(d1, vec![(0.0, 0.4), (0.8, 1.5)])?, 1.1),
        (RadialSet::ball(d2, 1.0)?, RadialSet::ball(d2, 1.0)?, 1.2),
        (RadialSet::ball(d2, 0.7)?, RadialSet::annulus(d2, 0.5, 1.5)?, 1.3),
        (RadialSet::annulus(d2, 1.0, 2.0)?, RadialSet::ball(d2, 3.0)?, 2.2),
        (RadialSet::new(d2, vec![(0.0, 0.3), (0.6, 1.0)])?, RadialSet::annulus(d2, 0.2, 1.1)?, 1.0),
        (RadialSet::ball(d3, 1.0)?, RadialSet::ball(d3, 1.0)?, 1.3),
        (RadialSet::ball(d3, 0.9)?, RadialSet::annulus(d3, 0.4, 1.2)?, 1.1),
        (RadialSet::annulus(d3, 0.5, 1.5)?, RadialSet::annulus(d3, 0.1, 0.8)?, 1.2),
    ])
}

/// Fraction of `n` uniform points on the sphere of radius r in R^{2d} with
/// |x| ∈ A and |y| ∈ B.
pub fn sigma_monte_carlo(a: &RadialSet, b: &RadialSet, r: f64, n: usize, rng: &mut ChaCha8Rng) -> f64 {
    let d = a.dim().get() as usize;
    let mut hits = 0usize;
    let mut z = vec![0.0f64; 2 * d];
    for _ in 0..n {
        for v in z.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let nx: f64 = z[..d].iter().map(|v| v * v).sum();
        let ny: f64 = z[d..].iter().map(|v| v * v).sum();
        let s = r / (nx + ny).sqrt();
        if a.contains_radius(nx.sqrt() * s) && b.contains_radius(ny.sqrt() * s) {
            hits += 1;
        }
    }
    hits as f64 / n as f64
}

/// Exact σ_r against sphere sampling, plus the first-moment and scale identities.
pub fn sigma_validation(samples: usize, seed: u64) -> Result<SigmaReport> {
    let configs = sigma_configurations()?;
    let rows = configs
        .par_iter()
        .enumerate()
        .map(|(i, (a, b, r))| -> Result<(SigmaRow, f64, f64)> {
            let exact = sigma_r(a, b, *r)?;
            let mut rng = sample_rng(seed, i as u64);
            let mc = sigma_monte_carlo(a, b, *r, samples, &mut rng);
            let fm = first_moment(a, b)?;
            let prod = a.measure() * b.measure();
            let fm_res = ((fm - prod) / prod).abs();
            let pw = check_sigma_pointwise(a, b, &[0.5 * r, *r, 2.0 * r])?;
            let scale = pw.checks.get("scale_invariance_residual").copied().unwrap_or(f64::NAN);
            Ok((
                SigmaRow {
                    config: i,
                    d: a.dim(),
                    a: a.clone(),
                    b: b.clone(),
                    r: *r,
                    exact,
                    monte_carlo: mc,
                    abs_error: (exact - mc).abs(),
                },
                fm_res,
                scale,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_abs_error = rows.iter().map(|r| r.0.abs_error).fold(0.0, f64::max);
    let max_fm = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let max_scale = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let checks = vec![
        Check::at_most("max_mc_abs_error", max_abs_error, 0.0, 3e-3),
        Check::at_most("first_moment_rel_residual", max_fm, 0.0, 1e-8),
        Check::at_most("scale_invariance_residual", max_scale, 0.0, 1e-12),
    ];
    Ok(SigmaReport {
        samples,
        seed,
        rows: rows.into_iter().map(|r| r.0).collect(),
        max_abs_error,
        max_first_moment_rel_residual: max_fm,
        max_scale_residual: max_scale,
        checks,
    })
}

/// How the combined ratio behaves along the sweep for one exponent.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentRow {
    pub d: Dimension,
    pub gamma: f64,
    pub worst_ratio: f64,
    /// Least-squares slope of ln(ratio) against ln Λ over rows with Λ < 1.
    pub lambda_slope: f64,
    /// `lambda_slope ≥ 0`: the ratio does not grow as Λ → 0.
    pub bounded_trend: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SetsReport {
    pub gamma_exponents: Vec<f64>,
    pub scans: Vec<BoundReport>,
    pub exponents: Vec<ExponentRow>,
    pub checks: Vec<Check>,
}

impl SetsReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }
}

/// Default exponents γ of the combined bound's Λ factor.
pub const COMBINED_GAMMAS: [f64; 4] = [0.05, 0.1, 0.25, 0.5];

fn lambda_slope(scan: &BoundReport) -> f64 {
    let pts: Vec<(f64, f64)> = scan
        .rows
        .iter()
        .filter_map(|r| {
            let lam = *r.params.get("lambda")?;
            (r.ratio > 0.0 && lam > 0.0 && lam < 1.0).then(|| (lam.ln(), r.ratio.ln()))
        })
        .collect();
    let n = pts.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// The l2, pairing and combined scans over the documented sweeps, the
/// combined one once per exponent. Only finiteness and the exact identities
/// are asserted; the constants are not specified.
pub fn inequality_scans(dims: &[Dimension], gammas: &[f64]) -> Result<SetsReport> {
    if gammas.is_empty() {
        return Err(Error::Usage("need at least one combined exponent".into()));
    }
    let mut scans = Vec::new();
    let mut exponents = Vec::new();
    for &d in dims {
        scans.push(scan_l2(d)?);
        scans.push(scan_pairing(d)?);
        for &g in gammas {
            let s = scan_combined(d, g)?;
            let slope = lambda_slope(&s);
            exponents.push(ExponentRow {
                d,
                gamma: g,
                worst_ratio: s.worst_ratio,
                lambda_slope: slope,
                bounded_trend: slope >= 0.0,
            });
            scans.push(s);
        }
    }
    let mut checks: Vec<Check> = scans
        .iter()
        .map(|s| Check::holds(format!("{} finite ({})", s.lemma, s.sweep), s.is_finite()))
        .collect();
    for s in &scans {
        for (name, &v) in &s.checks {
            if name.ends_with("first_moment_rel_residual") {
                checks.push(Check::at_most(format!("{} {name}", s.lemma), v, 0.0, 1e-8));
            }
        }
    }
    Ok(SetsReport {
        gamma_exponents: gammas.to_vec(),
        scans,
        exponents,
        checks,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadraticFormScan {
    pub seed: u64,
    pub n: usize,
    pub min_slack: f64,
    pub equality_gap: Vec<f64>,
    /// Largest value of statement_form − bound seen (reported, not asserted).
    pub max_statement_excess: f64,
    pub checks: Vec<Check>,
}

/// Random constrained pairs in span{ψ_0..ψ_10} for d = 1, 2, 3 against the
/// quadratic-form bound, plus the equality case f = g = ψ_2.
pub fn quadratic_form_scan(n: usize, seed: u64) -> Result<QuadraticFormScan> {
    let systems: Vec<EigenSystem> = (1..=3)
        .map(|d| build_basis(dim(d)?, 10))
        .collect::<Result<_>>()?;
    let results = (0..n)
        .into_par_iter()
        .map(|i| -> Result<QuadraticForm> {
            let sys = &systems[i % 3];
            let mut rng = sample_rng(seed, i as u64);
            let mut a: Vec<Complex64> = (0..=10).map(|_| normal_c(&mut rng)).collect();
            let mut b: Vec<Complex64> = (0..=10).map(|_| normal_c(&mut rng)).collect();
            a[0] = c(0.0, 0.0);
            b[0] = c(0.0, 0.0);
            b[1] = -a[1];
            let f = Fun::from(sys.combine(&a)?);
            let g = Fun::from(sys.combine(&b)?);
            t_quadratic_form(&f, &g)
        })
        .collect::<Result<Vec<_>>>()?;
    let min_slack = results
        .iter()
        .map(|q| q.slack())
        .fold(f64::INFINITY, f64::min);
    let max_statement_excess = results
        .iter()
        .map(|q| q.statement_form - q.bound)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut equality_gap = Vec::new();
    for sys in &systems {
        let p2 = Fun::from(sys.psi(2).clone());
        equality_gap.push(t_quadratic_form(&p2, &p2)?.slack().abs());
    }
    let checks = vec![
        Check::at_least("min_slack", min_slack, 0.0, 1e-9),
        Check::at_most(
            "equality_gap",
            equality_gap.iter().cloned().fold(0.0, f64::max),
            0.0,
            1e-10,
        ),
    ];
    Ok(QuadraticFormScan {
        seed,
        n,
        min_slack,
        equality_gap,
        max_statement_excess,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(d: u32) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn deficit_examples() {
        let big_f = Fun::from(GaussPolyFun::reference(dd(1)));
        let r = deficit(&big_f, &big_f).unwrap();
        assert!((r.phi - 1.0).abs() < 1e-14 && r.dist < 1e-9 && r.ratio_phi.is_none());
        let sys = build_basis(dd(1), 2).unwrap();
        let r = deficit(&Fun::from(sys.psi(2).clone()), &big_f).unwrap();
        assert!((r.phi - 0.375).abs() < 1e-12, "{}", r.phi);
        assert!(r.passed());
        let e = Fun::from(GaussPolyFun::gaussian(dd(2), c(0.8, -1.7)).unwrap().scale(c(3.0, 1.0)));
        let r = deficit(&e, &e).unwrap();
        assert!((r.phi - 1.0).abs() < 1e-12 && r.dist < 1e-8);
    }

    #[test]
    fn sweep_examples() {
        let r = direction_sweep(dd(1), Direction { m: 2, symmetric: true }, &DEFAULT_EPS).unwrap();
        assert!((r.c2 - 0.5).abs() < 0.005, "{}", r.c2);
        assert!(r.passed(), "{:?}", r.checks);
        let ratios: Vec<f64> = r.points.iter().map(|p| p.ratio_phi.unwrap()).collect();
        assert!(ratios.windows(2).all(|w| w[1] >= w[0]) || ratios.windows(2).all(|w| w[1] <= w[0]));
        let r = direction_sweep(dd(1), Direction { m: 3, symmetric: false }, &DEFAULT_EPS).unwrap();
        assert!((r.c2 - 2.0).abs() < 0.02, "{}", r.c2);
        for d in 1..=3 {
            for m in 2..=5 {
                let r = direction_sweep(dd(d), Direction { m, symmetric: true }, &DEFAULT_EPS).unwrap();
                let want = 2.0 - 4.0 * crate::scalars::eigenvalue_lambda(dd(d), m as u32);
                assert!(((r.c2 - want) / want).abs() < 0.01, "d={d} m={m}: {} vs {want}", r.c2);
            }
        }
    }

    #[test]
    fn sweep_rejects_bad_input() {
        let sys = build_basis(dd(1), 2).unwrap();
        let f = sys.psi(0).clone();
        assert!(matches!(
            second_order_sweep(&f, &f, &DEFAULT_EPS, "psi:0"),
            Err(Error::Precondition(_))
        ));
        let p = sys.psi(2).clone();
        assert!(second_order_sweep(&p, &p, &[0.1, 0.2], "x").is_err());
        assert!(second_order_sweep(&p, &p, &[0.1, 0.2, 0.3, 0.05, 0.01], "x").is_err());
    }

    #[test]
    fn probe_examples() {
        for (d, want) in [(1, 0.25), (2, 1.0 / 3.0)] {
            let r = sharp_constant_probe(dd(d)).unwrap();
            assert!(r.passed(), "{:?}", r.checks);
            assert_eq!(r.argmin_m, 2);
            assert!((r.min_symmetric_ratio_phi - want).abs() < 0.02 * want);
            assert_eq!(r.matches, "ratio_phi");
            let anti = r.entries.iter().find(|e| e.m == 2 && !e.symmetric).unwrap();
            assert!((anti.ratio_phi - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn scan_small() {
        let r = random_stability_scan(dd(1), 12, 7, 0.1).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.samples.len(), 13);
        let again = random_stability_scan(dd(1), 12, 7, 0.1).unwrap();
        assert_eq!(
            crate::report::canonical_json(&r).unwrap(),
            crate::report::canonical_json(&again).unwrap()
        );
    }

    #[test]
    fn fourier_examples() {
        let s = fourier_suite(6, 3).unwrap();
        assert!(s.max_residual < 1e-8 && all_passed(&s.checks));
        let a = Fun::from(GaussPolyFun::gaussian(dd(1), c(1.0, 0.0)).unwrap());
        let b = Fun::from(GaussPolyFun::gaussian(dd(1), c(2.0, 0.0)).unwrap());
        assert!(matches!(fourier_invariance_check(&a, &b), Err(Error::Unsupported(_))));
        let sys = build_basis(dd(1), 2).unwrap();
        let r = fourier_invariance_check(
            &Fun::from(sys.psi(2).clone()),
            &Fun::from(GaussPolyFun::reference(dd(1))),
        )
        .unwrap();
        assert!((r.direct - 0.375f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lorentz_examples() {
        let r = lorentz_ratio_scan(LorentzFamily::Gauss).unwrap();
        assert!(r.passed(), "{}", r.max_dilation_variation);
        let r = lorentz_ratio_scan(LorentzFamily::Indicator).unwrap();
        assert!(r.passed() && r.supremum > 0.0);
        let z = Fun::from(GaussPolyFun::zero(dd(1), c(1.0, 0.0)).unwrap());
        assert!(matches!(lorentz_ratio(&z, &z), Err(Error::Precondition(_))));
    }

    #[test]
    fn sigma_small() {
        let r = sigma_validation(200_000, 1).unwrap();
        assert!(r.max_abs_error < 6e-3);
        assert!(r.max_first_moment_rel_residual < 1e-8 && r.max_scale_residual < 1e-12);
    }

    #[test]
    fn quadratic_scan_small() {
        let r = quadratic_form_scan(60, 5).unwrap();
        assert!(all_passed(&r.checks), "{:?}", r.checks);
    }
}

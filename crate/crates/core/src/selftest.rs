//! The twelve acceptance criteria as one deterministic report.
//!
//! Wall time is deliberately absent from the report so that its JSON is a
//! pure function of the seed; callers time criteria themselves.

use crate::error::{Error, Result};
use crate::experiments::{
    fourier_suite, inequality_scans, quadratic_form_scan, random_analytic_pair, random_stability_scan,
    sample_rng, sharp_constant_probe, sigma_validation, COMBINED_GAMMAS,
};
use crate::funcspace::{Fun, GaussPolyFun, NodeSpec};
use crate::gaussfit::nearest_gaussian_pair;
use crate::radproj::{project_quadrature, projection_norm, projection_norm_quadrature, QuadSpec};
use crate::report::{all_passed, canonical_json, Check};
use crate::scalars::{eigenvalue_lambda, Dimension};
use crate::spectral::{build_basis, recomputed_eigenvalue};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

pub const CRITERIA: usize = 12;
pub const DEFAULT_SEED: u64 = 7;

/// Runtime budget of each criterion in seconds, indexed by id − 1.
pub const BUDGET_SECS: [f64; CRITERIA] = [1.0, 1.0, 5.0, 30.0, 10.0, 5.0, 60.0, 60.0, 30.0, 120.0, 30.0, 240.0];

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub version: &'static str,
    pub passed: bool,
    pub criteria: Vec<Criterion>,
}

pub fn criterion_name(id: usize) -> &'static str {
    match id {
        1 => "eigenvalue formula",
        2 => "eigenbasis",
        3 => "projection consistency",
        4 => "sharp local constant",
        5 => "quadratic form bound",
        6 => "fourier invariance",
        7 => "sigma_r correctness",
        8 => "radial set inequality scans",
        9 => "gaussian fitting",
        10 => "stability positivity",
        11 => "modulus monotonicity",
        12 => "reproducibility",
        _ => "unknown",
    }
}

fn dim(d: u32) -> Result<Dimension> {
    Dimension::new(d)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn eigenvalue_formula() -> Result<(Vec<Check>, BTreeMap<String, f64>)> {
    let mut err: f64 = 0.0;
    for d in 1..=3 {
        let dd = dim(d)?;
        for m in 0..=12 {
            err = err.max((recomputed_eigenvalue(dd, m) - eigenvalue_lambda(dd, m as u32)).abs());
        }
    }
    Ok((
        vec![Check::at_most("max_abs_error", err, 0.0, 1e-10)],
        BTreeMap::from([("max_abs_error".into(), err)]),
    ))
}

fn eigenbasis() -> Result<(Vec<Check>, BTreeMap<String, f64>)> {
    let (mut ortho, mut resid): (f64, f64) = (0.0, 0.0);
    for d in 1..=3 {
        let sys = build_basis(dim(d)?, 12)?;
        ortho = ortho.max(sys.orthonormality_error());
        for m in 0..=12 {
            resid = resid.max(sys.eigen_residual(m)?);
        }
    }
    Ok((
        vec![
            Check::at_most("orthonormality_error", ortho, 0.0, 1e-10),
            Check::at_most("max_eigen_residual", resid, 0.0, 1e-8),
        ],
        BTreeMap::from([("orthonormality_error".into(), ortho), ("max_eigen_residual".into(), resid)]),
    ))
}

fn projection_consistency(seed: u64) -> Result<(Vec<Check>, BTreeMap<String, f64>)> {
    let errs = (0..10)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut rng = sample_rng(seed ^ 0x3, i as u64);
            let d = dim(1 + (i % 3) as u32)?;
            let (f, g) = random_analytic_pair(&mut rng, d, 6)?;
            let closed = projection_norm(&f, &g)?;
            let quad = projection_norm_quadrature(&f, &g, &QuadSpec::default())?;
            Ok(if closed == 0.0 { quad } else { ((quad - closed) / closed).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = max_of(errs.into_iter());
    Ok((
        vec![Check::at_most("max_rel_error", worst, 0.0, 1e-8)],
        BTreeMap::from([("max_rel_error".into(), worst)]),
    ))
}

fn sharp_constant() -> Result<(Vec<Check>, BTreeMap<String, f64>)> {
    let mut checks = Vec::new();
    let mut metrics = BTreeMap::new();
    for d in 1..=2 {
        let r = sharp_constant_probe(dim(d)?)?;
        metrics.insert(format!("d{d}_min_ratio_phi"), r.min_symmetric_ratio_phi);
        metrics.insert(format!("d{d}_argmin_m"), r.argmin_m as f64);
        checks.extend(r.checks.into_iter().map(|mut k| {
            k.name = format!("d{d} {}", k.name);
            k
        }));
    }
    Ok((checks, metrics))
}

fn quadratic_form(seed: u64) -> Result<(Vec<Check>, BTreeMap<String, f64>)> {
    let r = quadratic_form_scan(1000, seed)?;
    Ok((
        r.checks,
        BTreeMap::from([
            ("min_slack".into(), r.min_slack),
            ("max_statement_excess".into(), r.max_statement_excess),
        ]),
    ))
}

fn fourier(seed: u64) -> Result<(Vec<Check>, BTreeMap<String, f64>)> {
    let r = fourier_suite(20, seed)?;
    Ok((
        r.checks,
        BTreeMap::from([
            ("cases".into(), r.cases.len() as f64),
            ("max_residual".into(), r.max_residual),
        ]),
    ))
}

fn sigma(seed: u64) -> Result<(Vec<Check>, BTreeMap<String, f64>)> {
    let r = sigma_validation(1_000_000, seed)?;
    Ok((
        r.checks,
        BTreeMap::from([
            ("max_mc_abs_error".into(), r.max_abs_error),
            ("first_moment_rel_residual".into(), r.max_first_moment_rel_residual),
            ("scale_invariance_residual".into(), r.max_scale_residual),
        ]),
    ))
}

fn set_scans() -> Result<(Vec<Check>, BTreeMap<String, f64>)> {
    let dims = [dim(1)?, dim(2)?, dim(3)?];
    let r = inequality_scans(&dims, &COMBINED_GAMMAS)?;
    let metrics = r
        .scans
        .iter()
        .map(|s| (format!("{} ({}) worst_ratio", s.lemma, s.sweep), s.worst_ratio))
        .collect();
    Ok((r.checks, metrics))
}

fn gaussian_fitting(seed: u64) -> Result<(Vec<Check>, BTreeMap<String, f64>)> {
    let plants = (0..50)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let mut rng = sample_rng(seed ^ 0x9, i as u64);
            let d = dim(1 + (i % 3) as u32)?;
            let gamma = c(rng.random_range(-1.5f64..1.5).exp(), rng.random_range(-3.0..3.0));
            let mut scalar = || Complex64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..6.28));
            let (a, b) = (scalar(), scalar());
            let e = GaussPolyFun::gaussian(d, gamma)?;
            let r = nearest_gaussian_pair(&Fun::from(e.scale(a)), &Fun::from(e.scale(b)))?;
            Ok((r.dist, (r.gamma_star - gamma).norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_dist = max_of(plants.iter().map(|p| p.0));
    let max_gamma = max_of(plants.iter().map(|p| p.1));
    let eps = 0.05;
    let sys = build_basis(dim(1)?, 2)?;
    let u = Fun::from(GaussPolyFun::reference(dim(1)?).axpy(c(eps, 0.0), sys.psi(2))?);
    let pert = nearest_gaussian_pair(&u, &u)?;
    let want = 2.0 * eps * eps;
    Ok((
        vec![
            Check::at_most("plant_max_dist", max_dist, 0.0, 1e-8),
            Check::at_most("plant_max_gamma_error", max_gamma, 0.0, 1e-6),
            Check::close("perturbed_dist_sqr", pert.dist_sqr(), want, 0.01 * want),
            Check::holds("perturbed_converged", pert.converged),
        ],
        BTreeMap::from([
            ("plant_max_dist".into(), max_dist),
            ("plant_max_gamma_error".into(), max_gamma),
            ("perturbed_dist_sqr".into(), pert.dist_sqr()),
        ]),
    ))
}

fn stability(seed: u64) -> Result<(Vec<Check>, BTreeMap<String, f64>)> {
    let mut checks = Vec::new();
    let mut metrics = BTreeMap::new();
    for d in 1..=2 {
        let r = random_stability_scan(dim(d)?, 200, seed, 0.1)?;
        metrics.insert(format!("d{d}_min_deficit"), r.min_deficit);
        metrics.insert(format!("d{d}_min_ratio_phi"), r.min_ratio_phi.unwrap_or(f64::NAN));
        metrics.insert(format!("d{d}_nonconverged"), r.nonconverged as f64);
        checks.extend(r.checks.into_iter().map(|mut k| {
            k.name = format!("d{d} {}", k.name);
            k
        }));
    }
    Ok((checks, metrics))
}

/// Radial pair with oscillating phase e^{-i Im γ |x|²} and complex coefficients.
fn phase_pair(seed: u64, i: usize) -> Result<(Fun, Fun)> {
    let mut rng = sample_rng(seed ^ 0xb, i as u64);
    let d = dim(1 + (i % 3) as u32)?;
    let one = |rng: &mut rand_chacha::ChaCha8Rng| -> Result<Fun> {
        let gamma = c(rng.random_range(0.5..2.0), rng.random_range(-3.0..3.0));
        let deg = rng.random_range(0..=3);
        let coeffs = (0..=deg)
            .map(|_| Complex64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..6.28)))
            .collect();
        Ok(Fun::from(GaussPolyFun::new(d, gamma, coeffs)?))
    };
    let f = one(&mut rng)?;
    let g = one(&mut rng)?;
    Ok((f, g))
}

fn modulus_monotonicity(seed: u64) -> Result<(Vec<Check>, BTreeMap<String, f64>)> {
    let spec = NodeSpec {
        count: Some(400),
        radius: None,
    };
    let slacks = (0..50)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let (f, g) = phase_pair(seed, i)?;
            let q = QuadSpec {
                factor: spec,
                ..Default::default()
            };
            let plain = project_quadrature(&f, &g, &q)?.norm();
            let fm = Fun::from(f.modulus_profile(&spec)?);
            let gm = Fun::from(g.modulus_profile(&spec)?);
            let abs = project_quadrature(&fm, &gm, &q)?.norm();
            Ok(abs - plain)
        })
        .collect::<Result<Vec<_>>>()?;
    let min = slacks.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((
        vec![Check::at_least("min_slack", min, 0.0, 1e-8)],
        BTreeMap::from([("min_slack".into(), min)]),
    ))
}

fn reproducibility(seed: u64) -> Result<(Vec<Check>, BTreeMap<String, f64>)> {
    // two parallel runs of a seeded scan must serialize identically
    let a = canonical_json(&random_stability_scan(dim(1)?, 20, seed, 0.1)?)?;
    let b = canonical_json(&random_stability_scan(dim(1)?, 20, seed, 0.1)?)?;
    Ok((vec![Check::holds("scan_json_identical", a == b)], BTreeMap::new()))
}

/// Runs criterion `id` (1..=12).
pub fn run_criterion(id: usize, seed: u64) -> Result<Criterion> {
    let (checks, metrics) = match id {
        1 => eigenvalue_formula()?,
        2 => eigenbasis()?,
        3 => projection_consistency(seed)?,
        4 => sharp_constant()?,
        5 => quadratic_form(seed)?,
        6 => fourier(seed)?,
        7 => sigma(seed)?,
        8 => set_scans()?,
        9 => gaussian_fitting(seed)?,
        10 => stability(seed)?,
        11 => modulus_monotonicity(seed)?,
        12 => reproducibility(seed)?,
        _ => return Err(Error::Usage(format!("criteria are numbered 1..={CRITERIA}, got {id}"))),
    };
    Ok(Criterion {
        id,
        name: criterion_name(id),
        passed: all_passed(&checks),
        metrics,
        checks,
    })
}

/// Runs the selected criteria in order (all when `ids` is empty).
pub fn selftest(seed: u64, ids: &[usize]) -> Result<SelftestReport> {
    let ids: Vec<usize> = if ids.is_empty() { (1..=CRITERIA).collect() } else { ids.to_vec() };
    let criteria = ids
        .iter()
        .map(|&id| run_criterion(id, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(SelftestReport {
        seed,
        version: env!("CARGO_PKG_VERSION"),
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    })
}

//! One function per subcommand producing the report body and optional
//! CSV and SVG artifacts.

use crate::args::*;
use crate::plot::{Plot, Style};
use radlab::experiments::{
    deficit, direction_sweep, fourier_suite, inequality_scans, lorentz_ratio_scan, random_stability_scan,
    sharp_constant_probe, sigma_validation, Direction, LorentzFamily,
};
use radlab::funcspace::{Fun, PairDescriptor};
use radlab::gaussfit::nearest_gaussian_pair;
use radlab::report::Check;
use radlab::selftest::{run_criterion, CRITERIA};
use radlab::spectral::{build_basis, eigen_table};
use radlab::{Dimension, Error};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::Path;
use std::time::Instant;

/// Rows with a header; every command documents its columns here.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug)]
pub struct Outcome {
    pub command: &'static str,
    pub common: Common,
    pub config: Value,
    pub report: Value,
    pub table: Option<Table>,
    pub plot: Option<Plot>,
    /// Timings reported on stderr only.
    pub timings: Vec<(String, f64)>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Lab(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

type Run = Result<Outcome, RunError>;

fn to_value<T: Serialize>(v: &T) -> Result<Value, RunError> {
    serde_json::to_value(v).map_err(|e| RunError::Usage(e.to_string()))
}

fn f(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(f).unwrap_or_default()
}

fn outcome<A: Serialize>(command: &'static str, args: &A, common: &Common, report: Value) -> Result<Outcome, RunError> {
    let mut config = to_value(args)?;
    if let Some(obj) = config.as_object_mut() {
        // the common block is echoed flat
        if let Some(Value::Object(c)) = obj.remove("common") {
            obj.extend(c);
        }
    }
    Ok(Outcome {
        command,
        common: common.clone(),
        config,
        report,
        table: None,
        plot: None,
        timings: Vec::new(),
    })
}

fn read_pair(path: &Path) -> Result<(Fun, Fun), RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let desc: PairDescriptor = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(desc.into_pair()?)
}

pub fn eigs(a: &EigsArgs) -> Run {
    let sys = build_basis(Dimension::new(a.dim)?, a.max_m)?;
    let rows = eigen_table(&sys)?;
    let lam_err = rows
        .iter()
        .map(|r| (r.lambda_formula - r.lambda_recomputed).abs())
        .fold(0.0, f64::max);
    let res = rows.iter().map(|r| r.eigen_residual).fold(0.0, f64::max);
    let checks = vec![
        Check::at_most("max_lambda_error", lam_err, 0.0, 1e-10),
        Check::at_most("max_eigen_residual", res, 0.0, 1e-8),
        Check::at_most("orthonormality_error", sys.orthonormality_error(), 0.0, 1e-10),
    ];
    let report = json!({ "d": a.dim, "max_m": a.max_m, "rows": to_value(&rows)?, "checks": to_value(&checks)? });
    let mut out = outcome("eigs", a, &a.common, report)?;
    out.table = Some(Table {
        header: vec!["m", "lambda_formula", "lambda_recomputed", "eigen_residual"],
        rows: rows
            .iter()
            .map(|r| vec![r.m.to_string(), f(r.lambda_formula), f(r.lambda_recomputed), f(r.eigen_residual)])
            .collect(),
    });
    out.plot = Some(
        Plot::new(&format!("eigenvalues, d = {}", a.dim), "m", "lambda_m")
            .with(
                "closed form",
                Style::Polyline,
                rows.iter().map(|r| (r.m as f64, r.lambda_formula)).collect(),
            )
            .with(
                "recomputed",
                Style::Points,
                rows.iter().map(|r| (r.m as f64, r.lambda_recomputed)).collect(),
            ),
    );
    Ok(out)
}

pub fn deficit_cmd(a: &PairArgs) -> Run {
    let (u, v) = read_pair(&a.pair)?;
    let rec = deficit(&u, &v)?;
    let mut out = outcome("deficit", a, &a.common, to_value(&rec)?)?;
    out.table = Some(Table {
        header: vec!["phi", "deficit", "dist", "ratio_phi", "ratio_norm"],
        rows: vec![vec![f(rec.phi), f(rec.deficit), f(rec.dist), opt(rec.ratio_phi), opt(rec.ratio_norm)]],
    });
    Ok(out)
}

pub fn fit(a: &PairArgs) -> Run {
    let (u, v) = read_pair(&a.pair)?;
    let r = nearest_gaussian_pair(&u, &v)?;
    let mut out = outcome("fit", a, &a.common, to_value(&r)?)?;
    out.table = Some(Table {
        header: vec!["gamma_re", "gamma_im", "a_re", "a_im", "b_re", "b_im", "dist", "converged"],
        rows: vec![vec![
            f(r.gamma_star.re),
            f(r.gamma_star.im),
            f(r.coeff_a.re),
            f(r.coeff_a.im),
            f(r.coeff_b.re),
            f(r.coeff_b.im),
            f(r.dist),
            r.converged.to_string(),
        ]],
    });
    Ok(out)
}

pub fn sweep(a: &SweepArgs) -> Run {
    let eps = parse_eps(&a.eps).map_err(RunError::Usage)?;
    let dir = Direction::parse(&a.direction, !a.antisym)?;
    let r = direction_sweep(Dimension::new(a.dim)?, dir, &eps)?;
    let mut out = outcome("sweep", a, &a.common, to_value(&r)?)?;
    out.table = Some(Table {
        header: vec!["eps", "one_minus_phi", "one_minus_norm", "dist", "ratio_phi", "ratio_norm", "fit"],
        rows: r
            .points
            .iter()
            .map(|p| {
                vec![
                    f(p.eps),
                    f(p.one_minus_phi),
                    f(p.one_minus_norm),
                    f(p.dist),
                    opt(p.ratio_phi),
                    opt(p.ratio_norm),
                    f(r.model(p.eps)),
                ]
            })
            .collect(),
    });
    let (lo, hi) = eps.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &e| (l.min(e), h.max(e)));
    let curve = (0..=60)
        .map(|i| {
            let e = lo + (hi - lo) * i as f64 / 60.0;
            (e, r.model(e))
        })
        .collect();
    out.plot = Some(
        Plot::new(&format!("{} d = {}", r.direction, a.dim), "eps", "1 - Phi")
            .with("measured", Style::Polyline, r.points.iter().map(|p| (p.eps, p.one_minus_phi)).collect())
            .with("c2 eps^2 + c3 eps^3", Style::Curve, curve),
    );
    Ok(out)
}

pub fn probe(a: &DimArgs) -> Run {
    let r = sharp_constant_probe(Dimension::new(a.dim)?)?;
    let mut out = outcome("probe", a, &a.common, to_value(&r)?)?;
    out.table = Some(Table {
        header: vec!["m", "symmetric", "c2", "predicted_c2", "ratio_phi", "ratio_norm"],
        rows: r
            .entries
            .iter()
            .map(|e| {
                vec![
                    e.m.to_string(),
                    e.symmetric.to_string(),
                    f(e.c2),
                    f(e.predicted_c2),
                    f(e.ratio_phi),
                    f(e.ratio_norm),
                ]
            })
            .collect(),
    });
    let series = |sym: bool| {
        r.entries
            .iter()
            .filter(|e| e.symmetric == sym)
            .map(|e| (e.m as f64, e.ratio_phi))
            .collect()
    };
    out.plot = Some(
        Plot::new(&format!("limiting ratio, d = {}", a.dim), "m", "(1 - Phi) / dist^2")
            .with("f = g = psi_m", Style::Polyline, series(true))
            .with("f = -g = psi_m", Style::Polyline, series(false))
            .with("d / (2(d+1))", Style::Curve, vec![(2.0, r.target), (8.0, r.target)]),
    );
    Ok(out)
}

pub fn scan(a: &ScanArgs) -> Run {
    let r = random_stability_scan(Dimension::new(a.dim)?, a.n, a.common.seed, a.amp)?;
    let mut out = outcome("scan", a, &a.common, to_value(&r)?)?;
    out.table = Some(Table {
        header: vec!["index", "control", "phi", "deficit", "dist", "ratio_phi", "ratio_norm", "converged"],
        rows: r
            .samples
            .iter()
            .map(|s| {
                vec![
                    s.index.to_string(),
                    s.control.to_string(),
                    f(s.phi),
                    f(s.deficit),
                    f(s.dist),
                    opt(s.ratio_phi),
                    opt(s.ratio_norm),
                    s.converged.to_string(),
                ]
            })
            .collect(),
    });
    out.plot = Some(
        Plot::new(&format!("random scan, d = {}", a.dim), "dist", "1 - Phi").with(
            "samples",
            Style::Points,
            r.samples.iter().map(|s| (s.dist, 1.0 - s.phi)).collect(),
        ),
    );
    Ok(out)
}

pub fn sets(a: &SetsArgs) -> Run {
    let dims = a
        .dims
        .iter()
        .map(|&d| Dimension::new(d))
        .collect::<Result<Vec<_>, _>>()?;
    let scans = inequality_scans(&dims, &a.gamma)?;
    let sigma = if a.samples > 0 {
        Some(sigma_validation(a.samples, a.common.seed)?)
    } else {
        None
    };
    let mut checks = scans.checks.clone();
    if let Some(s) = &sigma {
        checks.extend(s.checks.iter().cloned());
    }
    let report = json!({
        "scans": to_value(&scans.scans)?,
        "gamma_exponents": a.gamma,
        "exponents": to_value(&scans.exponents)?,
        "sigma": to_value(&sigma)?,
        "checks": to_value(&checks)?,
    });
    let mut out = outcome("sets", a, &a.common, report)?;
    out.table = Some(Table {
        header: vec!["lemma", "sweep", "config", "ratio", "params"],
        rows: scans
            .scans
            .iter()
            .flat_map(|s| {
                s.csv_rows().into_iter().map(move |[lemma, config, ratio, params]| {
                    vec![lemma, s.sweep.clone(), config, ratio, params]
                })
            })
            .collect(),
    });
    let mut plot = Plot::new("empirical ratios", "config", "ratio").log_y();
    for s in &scans.scans {
        plot = plot.with(
            &format!("{} {}", s.lemma, s.sweep),
            Style::Points,
            s.rows.iter().map(|r| (r.config as f64, r.ratio)).collect(),
        );
    }
    out.plot = Some(plot);
    Ok(out)
}

pub fn fourier(a: &FourierArgs) -> Run {
    let r = fourier_suite(a.n, a.common.seed)?;
    let mut out = outcome("fourier-check", a, &a.common, to_value(&r)?)?;
    out.table = Some(Table {
        header: vec!["label", "direct", "transformed", "residual"],
        rows: r
            .cases
            .iter()
            .map(|c| vec![c.label.clone(), f(c.direct), f(c.transformed), f(c.residual)])
            .collect(),
    });
    out.plot = Some(
        Plot::new("Fourier invariance", "case", "residual").log_y().with(
            "residual",
            Style::Points,
            r.cases.iter().enumerate().map(|(i, c)| (i as f64, c.residual)).collect(),
        ),
    );
    Ok(out)
}

pub fn lorentz(a: &LorentzArgs) -> Run {
    let family: LorentzFamily = a.family.parse()?;
    let r = lorentz_ratio_scan(family)?;
    let mut out = outcome("lorentz", a, &a.common, to_value(&r)?)?;
    out.table = Some(Table {
        header: vec!["label", "rho", "ratio"],
        rows: r.rows.iter().map(|x| vec![x.label.clone(), f(x.rho), f(x.ratio)]).collect(),
    });
    let mut plot = Plot::new(&format!("Lorentz ratio, {}", a.family), "rho", "ratio");
    let mut labels: Vec<&str> = r.rows.iter().map(|x| x.label.as_str()).collect();
    labels.dedup();
    for label in labels {
        let mut pts: Vec<(f64, f64)> = r
            .rows
            .iter()
            .filter(|x| x.label == label)
            .map(|x| (x.rho.log10(), x.ratio))
            .collect();
        pts.sort_by(|p, q| p.0.total_cmp(&q.0));
        plot = plot.with(label, Style::Polyline, pts);
    }
    plot.x_label = "log10 rho".into();
    out.plot = Some(plot);
    Ok(out)
}

pub fn selftest(a: &SelftestArgs) -> Run {
    let ids: Vec<usize> = if a.only.is_empty() { (1..=CRITERIA).collect() } else { a.only.clone() };
    let mut criteria = Vec::new();
    let mut timings = Vec::new();
    for &id in &ids {
        let t = Instant::now();
        let c = run_criterion(id, a.common.seed)?;
        timings.push((format!("criterion {id} ({})", c.name), t.elapsed().as_secs_f64()));
        criteria.push(c);
    }
    let passed = criteria.iter().all(|c| c.passed);
    let report = json!({ "criteria": to_value(&criteria)?, "passed": passed });
    let mut out = outcome("selftest", a, &a.common, report)?;
    out.table = Some(Table {
        header: vec!["id", "name", "passed"],
        rows: criteria
            .iter()
            .map(|c| vec![c.id.to_string(), c.name.to_string(), c.passed.to_string()])
            .collect(),
    });
    out.timings = timings;
    Ok(out)
}

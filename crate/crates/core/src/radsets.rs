//! Radial sets (finite unions of annuli), exact sphere-slice measures
//! σ_r(A×B), and scans of the measure inequalities for indicator pairs.
//!
//! With `s = sin²θ ~ Beta(d/2, d/2)` a point of the sphere S_r ⊂ R^d x R^d
//! has |x|² = r²(1-s) and |y|² = r²s, so `σ_r(A×B)` is the Beta mass of the
//! set of `s` where both radii land in their sets. That set is a finite
//! union of intervals whose endpoints are ratios of squared radii.

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gk, neumaier_sum};
use crate::scalars::{incomplete_beta_regularized, sphere_area, Dimension};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// `{x ∈ R^d : |x| ∈ ∪ [a_i, b_i)}`. The last upper endpoint may be +∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RadialSetWire", into = "RadialSetWire")]
pub struct RadialSet {
    d: Dimension,
    annuli: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadialSetWire {
    d: Dimension,
    annuli: Vec<[f64; 2]>,
}

impl TryFrom<RadialSetWire> for RadialSet {
    type Error = Error;
    fn try_from(w: RadialSetWire) -> Result<Self> {
        RadialSet::new(w.d, w.annuli.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<RadialSet> for RadialSetWire {
    fn from(s: RadialSet) -> Self {
        RadialSetWire {
            d: s.d,
            annuli: s.annuli.into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl RadialSet {
    pub fn new(d: Dimension, annuli: Vec<(f64, f64)>) -> Result<Self> {
        let mut prev = 0.0;
        for (i, &(a, b)) in annuli.iter().enumerate() {
            if !(a >= 0.0) || !a.is_finite() || !(b > a) {
                return Err(Error::Domain(format!(
                    "annulus {i} must satisfy 0 <= a < b, got [{a}, {b})"
                )));
            }
            if a < prev {
                return Err(Error::Domain(format!(
                    "annuli must be sorted and disjoint (annulus {i} starts at {a} < {prev})"
                )));
            }
            prev = b;
        }
        Ok(RadialSet { d, annuli })
    }

    pub fn empty(d: Dimension) -> Self {
        RadialSet {
            d,
            annuli: Vec::new(),
        }
    }

    pub fn ball(d: Dimension, r: f64) -> Result<Self> {
        RadialSet::new(d, vec![(0.0, r)])
    }

    pub fn annulus(d: Dimension, a: f64, b: f64) -> Result<Self> {
        RadialSet::new(d, vec![(a, b)])
    }

    /// All of R^d.
    pub fn everything(d: Dimension) -> Self {
        RadialSet {
            d,
            annuli: vec![(0.0, f64::INFINITY)],
        }
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    pub fn annuli(&self) -> &[(f64, f64)] {
        &self.annuli
    }

    pub fn is_empty(&self) -> bool {
        self.annuli.is_empty()
    }

    /// `t A = {t x : x ∈ A}`.
    pub fn scaled(&self, t: f64) -> RadialSet {
        RadialSet {
            d: self.d,
            annuli: self.annuli.iter().map(|&(a, b)| (a * t, b * t)).collect(),
        }
    }

    /// Largest finite radius in the set (∞ if unbounded, 0 if empty).
    pub fn outer_radius(&self) -> f64 {
        self.annuli.last().map_or(0.0, |a| a.1)
    }

    pub fn contains_radius(&self, r: f64) -> bool {
        self.annuli.iter().any(|&(a, b)| a <= r && r < b)
    }

    /// Lebesgue measure `surf(d)/d Σ (b^d - a^d)`.
    pub fn measure(&self) -> f64 {
        let d = self.d.get();
        let k = sphere_area(d).expect("d >= 1") / d as f64;
        k * neumaier_sum(
            self.annuli
                .iter()
                .map(|&(a, b)| b.powi(d as i32) - a.powi(d as i32)),
        )
    }

    /// The L^{2,4} norm of the indicator, |A|^{1/2} in the normalization of
    /// [`crate::funcspace::lorentz_24_norm`].
    pub fn lorentz_24_norm(&self) -> Result<f64> {
        let m = self.measure();
        if !m.is_finite() {
            return Err(Error::Overflow("indicator of a set of infinite measure".into()));
        }
        Ok(m.sqrt())
    }
}

/// A point `s` of [0, 1] carried together with `1 - s`, both computed
/// without cancellation.
#[derive(Debug, Clone, Copy)]
struct Endpoint {
    s: f64,
    c: f64,
}

impl Endpoint {
    const ZERO: Endpoint = Endpoint { s: 0.0, c: 1.0 };
    const ONE: Endpoint = Endpoint { s: 1.0, c: 0.0 };

    fn from_s(s: f64) -> Endpoint {
        if s <= 0.0 {
            Endpoint::ZERO
        } else if s >= 1.0 {
            Endpoint::ONE
        } else {
            Endpoint { s, c: 1.0 - s }
        }
    }

    fn from_c(c: f64) -> Endpoint {
        if c <= 0.0 {
            Endpoint::ONE
        } else if c >= 1.0 {
            Endpoint::ZERO
        } else {
            Endpoint { s: 1.0 - c, c }
        }
    }
}

/// Beta(h, h) mass of [lo, hi].
fn beta_mass(lo: Endpoint, hi: Endpoint, h: f64) -> f64 {
    if hi.s <= lo.s {
        return 0.0;
    }
    // symmetric parameters: I_s = 1 - I_{1-s}
    let cdf = |e: Endpoint| -> (f64, f64) {
        if e.s == 0.0 {
            (0.0, 1.0)
        } else if e.c == 0.0 {
            (1.0, 0.0)
        } else if e.s <= 0.5 {
            let (p, q) = incomplete_beta_regularized(e.s, h, h).expect("valid args");
            (p, q)
        } else {
            let (q, p) = incomplete_beta_regularized(e.c, h, h).expect("valid args");
            (p, q)
        }
    };
    let (p1, q1) = cdf(lo);
    let (p2, q2) = cdf(hi);
    let m = if lo.s >= 0.5 { q1 - q2 } else { p2 - p1 };
    m.max(0.0)
}

/// `{s : r√(1-s) ∈ A}` as endpoint pairs.
fn x_intervals(a: &RadialSet, r: f64) -> Vec<(Endpoint, Endpoint)> {
    let r2 = r * r;
    a.annuli
        .iter()
        .filter_map(|&(lo, hi)| {
            // lo <= r√(1-s) < hi  <=>  1 - hi²/r² < s <= 1 - lo²/r²
            let left = if hi.is_finite() {
                Endpoint::from_c(hi * hi / r2)
            } else {
                Endpoint::ZERO
            };
            let right = Endpoint::from_c(lo * lo / r2);
            (right.s > left.s).then_some((left, right))
        })
        .collect()
}

/// `{s : r√s ∈ B}` as endpoint pairs.
fn y_intervals(b: &RadialSet, r: f64) -> Vec<(Endpoint, Endpoint)> {
    let r2 = r * r;
    b.annuli
        .iter()
        .filter_map(|&(lo, hi)| {
            let left = Endpoint::from_s(lo * lo / r2);
            let right = if hi.is_finite() {
                Endpoint::from_s(hi * hi / r2)
            } else {
                Endpoint::ONE
            };
            (right.s > left.s).then_some((left, right))
        })
        .collect()
}

fn check_pair(a: &RadialSet, b: &RadialSet) -> Result<Dimension> {
    if a.d != b.d {
        return Err(Error::Usage(format!(
            "radial sets live in different dimensions ({} vs {})",
            a.d, b.d
        )));
    }
    Ok(a.d)
}

/// σ_r(A×B), exactly, as a sum of incomplete-Beta differences.
pub fn sigma_r(a: &RadialSet, b: &RadialSet, r: f64) -> Result<f64> {
    let d = check_pair(a, b)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("σ_r needs r > 0, got {r}")));
    }
    Ok(sigma_unchecked(d, a, b, r))
}

fn sigma_unchecked(d: Dimension, a: &RadialSet, b: &RadialSet, r: f64) -> f64 {
    let h = d.half();
    let xs = x_intervals(a, r);
    let ys = y_intervals(b, r);
    let mut parts = Vec::new();
    for &(xl, xh) in &xs {
        for &(yl, yh) in &ys {
            let lo = if xl.s >= yl.s { xl } else { yl };
            let hi = if xh.s <= yh.s { xh } else { yh };
            if hi.s > lo.s {
                parts.push(beta_mass(lo, hi, h));
            }
        }
    }
    neumaier_sum(parts).clamp(0.0, 1.0)
}

/// Finite union of intervals of R⁺ (the radial profile E of 𝒜_E ⊂ R^{2d}).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        let mut prev = 0.0;
        for &(a, b) in &intervals {
            if !(a >= prev) || !(b > a) || !a.is_finite() {
                return Err(Error::Domain(format!(
                    "intervals must be sorted, disjoint and nondegenerate, got [{a}, {b})"
                )));
            }
            prev = b;
        }
        Ok(IntervalSet { intervals })
    }

    pub fn empty() -> Self {
        IntervalSet {
            intervals: Vec::new(),
        }
    }

    pub fn half_line() -> Self {
        IntervalSet {
            intervals: vec![(0.0, f64::INFINITY)],
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals.last().is_none_or(|iv| iv.1.is_finite())
    }
}

/// μ(E) = |𝒜_E| = surf(2d) Σ ∫ r^{2d-1} dr.
pub fn mu_measure(e: &IntervalSet, d: Dimension) -> f64 {
    let n = 2 * d.get();
    let k = sphere_area(n).expect("n >= 2") / n as f64;
    k * neumaier_sum(
        e.intervals
            .iter()
            .map(|&(a, b)| b.powi(n as i32) - a.powi(n as i32)),
    )
}

/// Radii where σ_r(A×B) can fail to be smooth: all √(x² + y²) with x, y
/// annulus endpoints (or 0), up to the largest one.
fn breakpoints(a: &RadialSet, b: &RadialSet) -> Vec<f64> {
    let ends = |s: &RadialSet| {
        let mut v = vec![0.0];
        for &(lo, hi) in &s.annuli {
            v.push(lo);
            if hi.is_finite() {
                v.push(hi);
            }
        }
        v
    };
    let (ea, eb) = (ends(a), ends(b));
    let mut out: Vec<f64> = ea
        .iter()
        .flat_map(|x| eb.iter().map(move |y| (x * x + y * y).sqrt()))
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// ω_d ∫_E σ_r^k r^{2d-1} dr for k ∈ {1, 2}, splitting at breakpoints.
fn radial_integral(a: &RadialSet, b: &RadialSet, e: Option<&IntervalSet>, power: i32) -> Result<f64> {
    let d = check_pair(a, b)?;
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    if !a.outer_radius().is_finite() || !b.outer_radius().is_finite() {
        return Err(Error::Usage("radial integrals need bounded sets".into()));
    }
    let n = 2 * d.get() as i32;
    let omega = sphere_area(2 * d.get())?;
    let mut cuts = breakpoints(a, b);
    let rmax = *cuts.last().expect("non-empty");
    let windows: Vec<(f64, f64)> = match e {
        None => vec![(0.0, rmax)],
        Some(e) => e
            .intervals
            .iter()
            .filter_map(|&(lo, hi)| {
                let hi = hi.min(rmax);
                (hi > lo).then_some((lo, hi))
            })
            .collect(),
    };
    for &(lo, hi) in &windows {
        cuts.push(lo);
        cuts.push(hi);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let scale = a.measure() * b.measure() / omega;
    let mut parts = Vec::new();
    for &(lo, hi) in &windows {
        let inside: Vec<f64> = cuts.iter().cloned().filter(|&c| c >= lo && c <= hi).collect();
        for w in inside.windows(2) {
            let f = |r: f64| {
                if r <= 0.0 {
                    return 0.0;
                }
                sigma_unchecked(d, a, b, r).powi(power) * r.powi(n - 1)
            };
            parts.push(adaptive_gk(f, w[0], w[1], 1e-15 * scale, 1e-13));
        }
    }
    Ok(omega * neumaier_sum(parts))
}

/// ω_d ∫_0^∞ σ_r(A×B) r^{2d-1} dr; equals |A||B|.
pub fn first_moment(a: &RadialSet, b: &RadialSet) -> Result<f64> {
    radial_integral(a, b, None, 1)
}

/// ⟨ℙ(1_A⊗1_B), 1_{𝒜_E}⟩ = ω_d ∫_E σ_r(A×B) r^{2d-1} dr.
pub fn indicator_pairing(a: &RadialSet, b: &RadialSet, e: &IntervalSet) -> Result<f64> {
    radial_integral(a, b, Some(e), 1)
}

/// ‖ℙ(1_A⊗1_B)‖ = (ω_d ∫ σ_r² r^{2d-1} dr)^{1/2}.
pub fn indicator_projection_norm(a: &RadialSet, b: &RadialSet) -> Result<f64> {
    Ok(radial_integral(a, b, None, 2)?.sqrt())
}

/// One evaluated configuration of a bound scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub config: usize,
    pub ratio: f64,
    pub params: BTreeMap<String, f64>,
}

/// Empirical ratios LHS / (RHS without its constant) over a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub lemma: String,
    pub sweep: String,
    pub worst_ratio: f64,
    pub worst_config: Option<usize>,
    pub rows: Vec<BoundRow>,
    /// Exactly-known identities checked along the way, as residuals.
    pub checks: BTreeMap<String, f64>,
}

impl BoundReport {
    fn new(lemma: &str, sweep: String, rows: Vec<BoundRow>) -> Self {
        let mut worst = 0.0;
        let mut at = None;
        for row in &rows {
            if row.ratio > worst || at.is_none() {
                worst = row.ratio;
                at = Some(row.config);
            }
        }
        BoundReport {
            lemma: lemma.into(),
            sweep,
            worst_ratio: worst,
            worst_config: at,
            rows,
            checks: BTreeMap::new(),
        }
    }

    /// Concatenates reports of the same lemma, renumbering configurations.
    pub fn merge(lemma: &str, sweep: String, parts: Vec<BoundReport>) -> BoundReport {
        let mut rows = Vec::new();
        let mut checks = BTreeMap::new();
        for (k, part) in parts.into_iter().enumerate() {
            for mut row in part.rows {
                row.config = rows.len();
                rows.push(row);
            }
            for (name, v) in part.checks {
                checks.insert(format!("{k}.{name}"), v);
            }
        }
        let mut out = BoundReport::new(lemma, sweep, rows);
        out.checks = checks;
        out
    }

    pub fn is_finite(&self) -> bool {
        self.worst_ratio.is_finite() && self.rows.iter().all(|r| r.ratio.is_finite())
    }

    /// CSV rows: lemma, config id, ratio, parameters as `k=v` pairs.
    pub fn csv_rows(&self) -> Vec<[String; 4]> {
        self.rows
            .iter()
            .map(|row| {
                let params = row
                    .params
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(";");
                [
                    self.lemma.clone(),
                    row.config.to_string(),
                    row.ratio.to_string(),
                    params,
                ]
            })
            .collect()
    }
}

fn params(items: &[(&str, f64)]) -> BTreeMap<String, f64> {
    items.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// σ_r / min(1, r^{-d}|A|, r^{-d}|B|)^{1/2} over `radii`, with the scale
/// identity σ_r(A×B) = σ_1(r^{-1}A × r^{-1}B) recorded as a residual.
pub fn check_sigma_pointwise(a: &RadialSet, b: &RadialSet, radii: &[f64]) -> Result<BoundReport> {
    let d = check_pair(a, b)?;
    let (ma, mb) = (a.measure(), b.measure());
    let mut rows = Vec::with_capacity(radii.len());
    let mut scale_res: f64 = 0.0;
    for (i, &r) in radii.iter().enumerate() {
        let s = sigma_r(a, b, r)?;
        let s1 = sigma_r(&a.scaled(1.0 / r), &b.scaled(1.0 / r), 1.0)?;
        scale_res = scale_res.max((s - s1).abs());
        let rd = r.powi(d.get() as i32);
        let rhs = 1f64.min(ma / rd).min(mb / rd).sqrt();
        let ratio = if s == 0.0 { 0.0 } else { s / rhs };
        rows.push(BoundRow {
            config: i,
            ratio,
            params: params(&[("r", r), ("sigma", s)]),
        });
    }
    let mut rep = BoundReport::new(
        "sigma_pointwise",
        format!("{} radii, |A|={ma}, |B|={mb}, d={d}", radii.len()),
        rows,
    );
    rep.checks.insert("scale_invariance_residual".into(), scale_res);
    Ok(rep)
}

fn positive_measures(a: &RadialSet, b: &RadialSet) -> Result<(f64, f64)> {
    let (ma, mb) = (a.measure(), b.measure());
    if !(ma > 0.0 && mb > 0.0) || !ma.is_finite() || !mb.is_finite() {
        return Err(Error::Usage(format!(
            "bound checks need positive finite measures, got |A|={ma}, |B|={mb}"
        )));
    }
    Ok((ma, mb))
}

/// ∫σ_r² r^{2d-1} dr / (min(|A|/|B|, |B|/|A|)^{1/5} |A||B|) for one pair.
pub fn check_l2_bound(a: &RadialSet, b: &RadialSet) -> Result<BoundReport> {
    let d = check_pair(a, b)?;
    let (ma, mb) = positive_measures(a, b)?;
    let omega = sphere_area(2 * d.get())?;
    let lhs = indicator_projection_norm(a, b)?.powi(2) / omega;
    let ecc = (ma / mb).min(mb / ma);
    let ratio = lhs / (ecc.powf(0.2) * ma * mb);
    let rows = vec![BoundRow {
        config: 0,
        ratio,
        params: params(&[("measure_a", ma), ("measure_b", mb), ("eccentricity", ecc)]),
    }];
    let mut rep = BoundReport::new("l2_fifth", format!("single pair, d={d}"), rows);
    let fm = first_moment(a, b)?;
    rep.checks
        .insert("first_moment_rel_residual".into(), (fm - ma * mb).abs() / (ma * mb));
    Ok(rep)
}

/// ω_d∫_E σ_r r^{2d-1}dr / (min(|A||B|/μ, μ/(|A||B|))^{1/6} |A|^{1/2}|B|^{1/2}μ^{1/2}).
/// For unbounded E the bound is infinite and the ratio is 0; the pairing then
/// equals |A||B|, recorded as a residual.
pub fn check_pairing_bound(a: &RadialSet, b: &RadialSet, e: &IntervalSet) -> Result<BoundReport> {
    let d = check_pair(a, b)?;
    let (ma, mb) = positive_measures(a, b)?;
    let pairing = indicator_pairing(a, b, e)?;
    let mu = mu_measure(e, d);
    let prod = ma * mb;
    let ratio = if pairing == 0.0 || !mu.is_finite() {
        0.0
    } else {
        let m = (prod / mu).min(mu / prod);
        pairing / (m.powf(1.0 / 6.0) * (prod * mu).sqrt())
    };
    let rows = vec![BoundRow {
        config: 0,
        ratio,
        params: params(&[
            ("measure_a", ma),
            ("measure_b", mb),
            ("mu_e", mu),
            ("pairing", pairing),
        ]),
    }];
    let mut rep = BoundReport::new("pairing_sixth", format!("single pair, d={d}"), rows);
    if !mu.is_finite() {
        rep.checks
            .insert("pairing_vs_product_rel_residual".into(), (pairing - prod).abs() / prod);
    }
    Ok(rep)
}

/// Λ(a1, a2, a3) = min_{i≠j} a_i / a_j.
pub fn lambda_ratio(a1: f64, a2: f64, a3: f64) -> f64 {
    let mx = a1.max(a2).max(a3);
    let mn = a1.min(a2).min(a3);
    mn / mx
}

/// pairing / (Λ(|A|, |B|, |𝒜|^{1/2})^γ |A|^{1/2}|B|^{1/2}|𝒜|^{1/2}).
pub fn check_combined_bound(
    a: &RadialSet,
    b: &RadialSet,
    e: &IntervalSet,
    gamma_exponent: f64,
) -> Result<BoundReport> {
    if !(gamma_exponent > 0.0) || !gamma_exponent.is_finite() {
        return Err(Error::Domain(format!(
            "combined bound exponent must be positive, got {gamma_exponent}"
        )));
    }
    let d = check_pair(a, b)?;
    let (ma, mb) = positive_measures(a, b)?;
    if !e.is_bounded() {
        return Err(Error::Usage("combined bound needs |𝒜| finite".into()));
    }
    let mu = mu_measure(e, d);
    let pairing = indicator_pairing(a, b, e)?;
    let lam = lambda_ratio(ma, mb, mu.sqrt());
    let ratio = if pairing == 0.0 {
        0.0
    } else {
        pairing / (lam.powf(gamma_exponent) * (ma * mb * mu).sqrt())
    };
    let rows = vec![BoundRow {
        config: 0,
        ratio,
        params: params(&[
            ("measure_a", ma),
            ("measure_b", mb),
            ("mu_e", mu),
            ("lambda", lam),
            ("gamma", gamma_exponent),
        ]),
    }];
    Ok(BoundReport::new(
        "combined",
        format!("single pair, d={d}, gamma={gamma_exponent}"),
        rows,
    ))
}

/// Eccentric pair family used by the documented scans: B = ball(1) with A a
/// ball, a thin shell or a two-annulus set of measure spread over six
/// decades, in dimension `d`.
pub fn eccentric_family(d: Dimension) -> Vec<(RadialSet, RadialSet)> {
    let mut out = Vec::new();
    let b = RadialSet::ball(d, 1.0).expect("valid");
    for k in 0..=12 {
        let eps = 10f64.powf(-3.0 + 0.25 * k as f64);
        out.push((RadialSet::ball(d, eps).expect("valid"), b.clone()));
    }
    for k in 0..=8 {
        let w = 10f64.powf(-3.0 + 0.375 * k as f64);
        out.push((RadialSet::annulus(d, 0.5, 0.5 + w).expect("valid"), b.clone()));
    }
    for k in 0..=4 {
        let s = 2f64.powi(k);
        out.push((
            RadialSet::new(d, vec![(0.0, 0.2 * s), (2.0 * s, 2.0 * s + 0.1)]).expect("valid"),
            RadialSet::annulus(d, 1.0, 1.5).expect("valid"),
        ));
    }
    out
}

/// l2 scan over [`eccentric_family`].
pub fn scan_l2(d: Dimension) -> Result<BoundReport> {
    let parts = eccentric_family(d)
        .iter()
        .map(|(a, b)| check_l2_bound(a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport::merge(
        "l2_fifth",
        format!("eccentric family (balls, shells, split sets), d={d}"),
        parts,
    ))
}

/// Pairing scan: A = B = ball(1), E = [0, ρ) and shells [ρ, 1.05ρ) with
/// μ(E)/(|A||B|) spread over six decades.
pub fn scan_pairing(d: Dimension) -> Result<BoundReport> {
    let a = RadialSet::ball(d, 1.0)?;
    let prod = a.measure().powi(2);
    let n = 2 * d.get();
    let k = sphere_area(n)? / n as f64;
    let mut parts = Vec::new();
    for i in 0..=12 {
        let target = prod * 10f64.powf(-3.0 + 0.5 * i as f64);
        let rho = (target / k).powf(1.0 / n as f64);
        parts.push(check_pairing_bound(&a, &a, &IntervalSet::new(vec![(0.0, rho)])?)?);
        let shell = (target / (k * (1.05f64.powi(n as i32) - 1.0))).powf(1.0 / n as f64);
        parts.push(check_pairing_bound(
            &a,
            &a,
            &IntervalSet::new(vec![(shell, 1.05 * shell)])?,
        )?);
    }
    parts.push(check_pairing_bound(&a, &a, &IntervalSet::half_line())?);
    Ok(BoundReport::merge(
        "pairing_sixth",
        format!("A=B=ball(1), E balls and shells with mu(E)/|A||B| in [1e-3,1e3], d={d}"),
        parts,
    ))
}

/// Combined scan: 50 configurations mixing eccentric pairs with E balls.
pub fn scan_combined(d: Dimension, gamma_exponent: f64) -> Result<BoundReport> {
    let fam = eccentric_family(d);
    let n = 2 * d.get();
    let mut parts = Vec::new();
    for i in 0..50 {
        let (a, b) = &fam[i % fam.len()];
        let prod = a.measure() * b.measure();
        let k = sphere_area(n)? / n as f64;
        let target = prod * 10f64.powf(-2.0 + 4.0 * (i as f64 / 49.0));
        let rho = (target / k).powf(1.0 / n as f64);
        parts.push(check_combined_bound(
            a,
            b,
            &IntervalSet::new(vec![(0.0, rho)])?,
            gamma_exponent,
        )?);
    }
    Ok(BoundReport::merge(
        "combined",
        format!("50 eccentric configurations, d={d}, gamma={gamma_exponent}"),
        parts,
    ))
}

//! The Lorentz L^{2,4} norm of a radial function.
//!
//! Normalization: ‖f‖ = ((q/p) ∫_0^∞ (t^{1/p} f*(t))^q dt/t)^{1/q} with
//! (p, q) = (2, 4). In terms of the distribution function λ(s) = |{|f| > s}|
//! this is ‖f‖^4 = 4 ∫_0^∞ s^3 λ(s)^2 ds, so an indicator has norm |A|^{1/2}.

use super::{Fun, GaussPolyFun, ProfileFun};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gk, neumaier_sum};
use crate::scalars::{sphere_area, Dimension};

/// A radial function seen through its modulus `r ↦ |f|(r)`.
pub trait RadialModulus {
    fn dim(&self) -> Dimension;
    fn modulus(&self, r: f64) -> f64;
    /// Radius past which the modulus is monotone decreasing (or zero).
    fn scan_radius(&self) -> f64;
    /// True if the modulus vanishes identically beyond `scan_radius`.
    fn compact(&self) -> bool;
}

impl RadialModulus for GaussPolyFun {
    fn dim(&self) -> Dimension {
        self.d
    }
    fn modulus(&self, r: f64) -> f64 {
        self.eval(r).norm()
    }
    fn scan_radius(&self) -> f64 {
        1.5 * self.tail_radius()
    }
    fn compact(&self) -> bool {
        false
    }
}

impl RadialModulus for ProfileFun {
    fn dim(&self) -> Dimension {
        self.d
    }
    fn modulus(&self, r: f64) -> f64 {
        self.eval(r).norm()
    }
    fn scan_radius(&self) -> f64 {
        self.grid.support
    }
    fn compact(&self) -> bool {
        true
    }
}

const SCAN_POINTS: usize = 4096;

/// Piece of [0, ∞) on which the modulus is monotone.
struct Piece {
    lo: f64,
    hi: f64, // f64::INFINITY for the tail piece
    a_lo: f64,
    a_hi: f64,
}

fn golden_extremum<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, maximize: bool) -> f64 {
    let sign = if maximize { -1.0 } else { 1.0 };
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = sign * f(x1);
    let mut f2 = sign * f(x2);
    for _ in 0..120 {
        if (b - a) <= 1e-15 * b.abs().max(1e-300) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = sign * f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = sign * f(x2);
        }
    }
    0.5 * (a + b)
}

fn monotone_pieces<M: RadialModulus + ?Sized>(f: &M) -> Vec<Piece> {
    let rmax = f.scan_radius();
    let a = |r: f64| f.modulus(r);
    let h = rmax / SCAN_POINTS as f64;
    let vals: Vec<f64> = (0..=SCAN_POINTS).map(|i| a(i as f64 * h)).collect();
    let mut breaks = vec![0.0];
    for i in 1..SCAN_POINTS {
        let left = vals[i] - vals[i - 1];
        let right = vals[i + 1] - vals[i];
        if left > 0.0 && right <= 0.0 {
            breaks.push(golden_extremum(&a, (i - 1) as f64 * h, (i + 1) as f64 * h, true));
        } else if left < 0.0 && right >= 0.0 {
            breaks.push(golden_extremum(&a, (i - 1) as f64 * h, (i + 1) as f64 * h, false));
        }
    }
    breaks.push(rmax);
    breaks.dedup_by(|x, y| *x <= *y);
    let mut pieces: Vec<Piece> = breaks
        .windows(2)
        .map(|w| Piece {
            lo: w[0],
            hi: w[1],
            a_lo: a(w[0]),
            a_hi: a(w[1]),
        })
        .collect();
    if !f.compact() {
        pieces.push(Piece {
            lo: rmax,
            hi: f64::INFINITY,
            a_lo: a(rmax),
            a_hi: 0.0,
        });
    }
    pieces
}

fn ball_volume(d: u32, surf: f64, r: f64) -> f64 {
    surf / d as f64 * r.powi(d as i32)
}

/// Measure of {r in piece : a(r) > s}.
fn piece_measure<M: RadialModulus + ?Sized>(f: &M, p: &Piece, s: f64, surf: f64) -> f64 {
    let d = f.dim().get();
    let (vmin, vmax) = if p.a_lo <= p.a_hi {
        (p.a_lo, p.a_hi)
    } else {
        (p.a_hi, p.a_lo)
    };
    if s >= vmax {
        return 0.0;
    }
    let shell = |x: f64, y: f64| ball_volume(d, surf, y) - ball_volume(d, surf, x);
    if s < vmin && p.hi.is_finite() {
        return shell(p.lo, p.hi);
    }
    let increasing = p.a_hi > p.a_lo;
    let mut lo = p.lo;
    let mut hi = if p.hi.is_finite() {
        p.hi
    } else {
        let mut h = 2.0 * p.lo.max(1e-300);
        while f.modulus(h) > s && h < 1e300 {
            h *= 2.0;
        }
        h
    };
    // a(lo) vs s has the sign opposite to a(hi) vs s
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let above = f.modulus(mid) > s;
        if above == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    if increasing {
        shell(root, p.hi)
    } else {
        shell(p.lo, root)
    }
}

/// L^{2,4} norm from the modulus of a radial function.
pub fn lorentz_24_norm_of_modulus<M: RadialModulus + ?Sized>(f: &M) -> Result<f64> {
    let surf = sphere_area(f.dim().get())?;
    let pieces = monotone_pieces(f);
    let smax = pieces
        .iter()
        .map(|p| p.a_lo.max(p.a_hi))
        .fold(0.0, f64::max);
    if !smax.is_finite() {
        return Err(Error::Overflow("modulus is not finite".into()));
    }
    if smax == 0.0 {
        return Ok(0.0);
    }
    let mut levels: Vec<f64> = pieces
        .iter()
        .flat_map(|p| [p.a_lo, p.a_hi])
        .filter(|&v| v > 0.0 && v < smax)
        .collect();
    levels.push(0.0);
    levels.push(smax);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let lambda = |s: f64| -> f64 {
        neumaier_sum(pieces.iter().map(|p| piece_measure(f, p, s, surf)))
    };
    let integrand = |s: f64| {
        let l = lambda(s);
        s * s * s * l * l
    };
    // a crude scale for the absolute tolerance
    let scale = smax.powi(4) * lambda(0.5 * smax).max(1e-300).powi(2);
    let parts: Vec<f64> = levels
        .windows(2)
        .map(|w| adaptive_gk(integrand, w[0], w[1], 1e-13 * scale, 1e-12))
        .collect();
    let total = 4.0 * neumaier_sum(parts);
    if !total.is_finite() {
        return Err(Error::Overflow("distribution integral diverges".into()));
    }
    Ok(total.max(0.0).powf(0.25))
}

/// L^{2,4} norm of a radial function.
pub fn lorentz_24_norm(f: &Fun) -> Result<f64> {
    match f {
        Fun::GaussPoly(g) => lorentz_24_norm_of_modulus(g),
        Fun::Profile(p) => lorentz_24_norm_of_modulus(p),
        Fun::Monomial(m) => match m.as_gauss_poly() {
            Some(g) => lorentz_24_norm_of_modulus(&g),
            None => Err(Error::Unsupported(
                "Lorentz norm is implemented for radial functions only".into(),
            )),
        },
    }
}

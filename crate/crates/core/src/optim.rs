//! Derivative-free simplex minimization.

/// Stopping rules for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct NmOptions {
    pub max_evals: usize,
    /// Stop once the spread of simplex values is below `max(f_tol_rel·|f_best|, f_tol_abs)`
    /// and the simplex diameter is below `x_tol`.
    pub f_tol_rel: f64,
    pub f_tol_abs: f64,
    pub x_tol: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        NmOptions {
            max_evals: 2000,
            f_tol_rel: 1e-15,
            f_tol_abs: 1e-30,
            x_tol: 1e-13,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evaluations: usize,
    /// Final spread max f − min f over the simplex.
    pub spread: f64,
    /// Stopped by the tolerances rather than the budget.
    pub stalled: bool,
}

/// Nelder-Mead with dimension-adaptive coefficients. Non-finite objective
/// values are treated as +∞.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    opts: NmOptions,
) -> NmResult {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step[i];
        simplex.push(x);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();
    let mut stalled = false;
    loop {
        // stable sort keeps lower indices first on ties
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let spread = vals[n] - vals[0];
        let diam = simplex[1..]
            .iter()
            .map(|x| {
                x.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let ftol = (opts.f_tol_rel * vals[0].abs()).max(opts.f_tol_abs);
        if (spread <= ftol && diam <= opts.x_tol) || diam == 0.0 {
            stalled = true;
            break;
        }
        if evals >= opts.max_evals {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|x| x[j]).sum::<f64>() / nf)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            (0..n)
                .map(|j| centroid[j] + t * (simplex[n][j] - centroid[j]))
                .collect()
        };
        let xr = along(-alpha);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = along(-alpha * beta);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                simplex[n] = xe;
                vals[n] = fe;
            } else {
                simplex[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            simplex[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let x = along(-alpha * gamma);
            let v = eval(&x, &mut evals);
            (x, v)
        } else {
            let x = along(gamma);
            let v = eval(&x, &mut evals);
            (x, v)
        };
        if fc < vals[n].min(fr) {
            simplex[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            let x: Vec<f64> = (0..n)
                .map(|j| simplex[0][j] + delta * (simplex[i][j] - simplex[0][j]))
                .collect();
            vals[i] = eval(&x, &mut evals);
            simplex[i] = x;
        }
    }
    NmResult {
        x: simplex[0].clone(),
        fx: vals[0],
        evaluations: evals,
        spread: vals[n] - vals[0],
        stalled,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let r = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[0.5, 0.5],
            NmOptions {
                max_evals: 5000,
                ..Default::default()
            },
        );
        assert!(r.stalled);
        assert!((r.x[0] - 1.0).abs() < 1e-7 && (r.x[1] - 1.0).abs() < 1e-7, "{:?}", r.x);
    }

    #[test]
    fn budget_is_respected() {
        let r = nelder_mead(|x| x[0].abs().sqrt() + x[1] * x[1], &[3.0, 2.0], &[1.0, 1.0], NmOptions {
            max_evals: 20,
            ..Default::default()
        });
        assert!(r.evaluations <= 23);
        assert!(!r.stalled);
    }

    #[test]
    fn nan_is_rejected() {
        let r = nelder_mead(
            |x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 2.0).powi(2) + x[1] * x[1] },
            &[0.5, 0.5],
            &[1.0, 1.0],
            NmOptions::default(),
        );
        assert!((r.x[0] - 2.0).abs() < 1e-6);
    }
}

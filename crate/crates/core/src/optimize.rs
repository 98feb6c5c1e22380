//! Derivative-free local maximizers used to polish sampled suprema.
//!
//! Objectives return `None` at infeasible points; all routines only ever
//! move to feasible points, so the returned value is always attained.

/// Nelder–Mead maximization in `R^d`.
pub fn nelder_mead_max<F>(f: F, x0: &[f64], step: f64, max_iter: usize) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> Option<f64>,
{
    let d = x0.len();
    let eval = |x: &[f64]| f(x).filter(|v| v.is_finite()).unwrap_or(f64::NEG_INFINITY);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x);
        simplex.push((x, v));
    }
    for _ in 0..max_iter {
        // descending by value: best first
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let best = simplex[0].1;
        let worst = simplex[d].1;
        if best.is_finite() && worst.is_finite() && (best - worst).abs() <= 1e-15 * (1.0 + best.abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|k| simplex[..d].iter().map(|(x, _)| x[k]).sum::<f64>() / d as f64)
            .collect();
        let toward = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = toward(1.0);
        let fr = eval(&xr);
        if fr > simplex[0].1 {
            let xe = toward(2.0);
            let fe = eval(&xe);
            simplex[d] = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let xc = toward(if fr > simplex[d].1 { 0.5 } else { -0.5 });
            let fc = eval(&xc);
            if fc > simplex[d].1.max(fr) {
                simplex[d] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for (x, v) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&x_best) {
                        *xi = bi + 0.5 * (*xi - bi);
                    }
                    *v = eval(x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v)
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
/// Returns the best evaluated point.
pub fn golden_section_max<F>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64)
where
    F: Fn(f64) -> Option<f64>,
{
    let eval = |t: f64| f(t).filter(|v| v.is_finite()).unwrap_or(f64::NEG_INFINITY);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = eval(d);
        }
        for (t, v) in [(c, fc), (d, fd)] {
            if v > best.1 {
                best = (t, v);
            }
        }
    }
    best
}

/// Compass (coordinate pattern) search maximizing `f` from a feasible `x0`.
/// The step halves whenever no coordinate move improves, down to `min_step`.
pub fn compass_max<F>(f: F, x0: &[f64], step0: f64, min_step: f64, max_evals: usize) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> Option<f64>,
{
    let eval = |x: &[f64]| f(x).filter(|v| v.is_finite());
    let mut x = x0.to_vec();
    let Some(mut fx) = eval(&x) else {
        return (x, f64::NEG_INFINITY);
    };
    let mut step = step0;
    let mut evals = 1;
    while step >= min_step && evals < max_evals {
        let mut improved = false;
        for i in 0..x.len() {
            for sign in [1.0, -1.0] {
                let old = x[i];
                x[i] = old + sign * step;
                evals += 1;
                match eval(&x) {
                    Some(v) if v > fx => {
                        fx = v;
                        improved = true;
                        break;
                    }
                    _ => x[i] = old,
                }
            }
            if evals >= max_evals {
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

//! Small derivative-free and quasi-Newton minimizers for low-dimensional problems.

/// Nelder–Mead with adaptive coefficients; returns (x, f(x), evaluations).
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    ftol: f64,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    if n == 0 {
        return (Vec::new(), f(x0), 1);
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push(x);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    let mut evals = n + 1;
    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let spread = (vals[n] - vals[0]).abs();
        let size = simplex[1..].iter().map(|x| dist(x, &simplex[0])).fold(0.0, f64::max);
        if spread <= ftol * (1.0 + vals[0].abs()) && size <= 1e-10 * (1.0 + norm(&simplex[0])) {
            break;
        }
        if size <= 1e-14 * (1.0 + norm(&simplex[0])) {
            break;
        }
        let mut cen = vec![0.0; n];
        for x in &simplex[..n] {
            for (c, xi) in cen.iter_mut().zip(x) {
                *c += xi / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> { cen.iter().zip(&simplex[n]).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(alpha);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(alpha * gamma);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                vals[n] = fe;
            } else {
                simplex[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            simplex[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let xc = along(alpha * rho);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < vals[n].min(fr) {
                simplex[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let x: Vec<f64> = simplex[0].iter().zip(&simplex[i]).map(|(b, x)| b + sigma * (x - b)).collect();
                    vals[i] = f(&x);
                    simplex[i] = x;
                }
                evals += n;
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (simplex[best].clone(), vals[best], evals)
}

/// BFGS with Armijo backtracking. `fg` returns value and gradient.
pub fn bfgs(
    mut fg: impl FnMut(&[f64]) -> (f64, Vec<f64>),
    x0: &[f64],
    max_iter: usize,
    gtol: f64,
) -> (Vec<f64>, f64, usize) {
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut fx, mut g) = fg(&x);
    if n == 0 {
        return (x, fx, 0);
    }
    let mut h = identity(n);
    let mut stall = 0;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        if norm(&g) <= gtol * (1.0 + fx.abs()) {
            break;
        }
        let mut p: Vec<f64> = matvec(&h, &g).iter().map(|v| -v).collect();
        let mut slope = dot(&p, &g);
        if slope >= 0.0 {
            h = identity(n);
            p = g.iter().map(|v| -v).collect();
            slope = dot(&p, &g);
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + t * b).collect();
            let (fnew, gnew) = fg(&xn);
            if fnew.is_finite() && fnew <= fx + 1e-4 * t * slope {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else { break };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            let hy = matvec(&h, &y);
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += ((sy + yhy) * s[i] * s[j]) / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        let rel = (fx - fnew) / (1.0 + fx.abs());
        stall = if rel < 1e-15 { stall + 1 } else { 0 };
        x = xn;
        fx = fnew;
        g = gnew;
        if stall >= 5 {
            break;
        }
    }
    (x, fx, it)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn matvec(h: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    h.iter().map(|row| dot(row, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosen(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let (x, fx, _) = nelder_mead(rosen, &[-1.2, 1.0], 0.5, 5000, 1e-16);
        assert!(fx < 1e-10, "{fx}");
        assert!((x[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn bfgs_rosenbrock() {
        let fg = |x: &[f64]| {
            let g0 = -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]);
            let g1 = 200.0 * (x[1] - x[0] * x[0]);
            (rosen(x), vec![g0, g1])
        };
        let (x, fx, _) = bfgs(fg, &[-1.2, 1.0], 500, 1e-12);
        assert!(fx < 1e-16, "{fx}");
        assert!((x[1] - 1.0).abs() < 1e-7);
    }
}

//! Box-constrained Nelder–Mead minimizer.

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Converged once every vertex lies within this max-norm distance of the best one.
    pub xtol: f64,
    pub max_iter: usize,
    /// Initial edge length per coordinate.
    pub step: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn clamp_into(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((v, l), h) in x.iter_mut().zip(lo).zip(hi) {
        *v = v.clamp(*l, *h);
    }
}

/// Minimize `f` from `x0`. Non-finite objective values are treated as `+∞`.
///
/// After the first convergence the simplex is rebuilt around the best point
/// and the search resumes once, which catches collapses onto a non-optimal
/// face.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult {
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut start = x0.to_vec();
    let mut used = 0;
    let mut last = None;
    for _ in 0..2 {
        let r = run(&mut eval, &start, opts, opts.max_iter - used);
        used += r.iterations;
        let done = !r.converged || used >= opts.max_iter;
        start.clone_from(&r.x);
        last = Some(r);
        if done {
            break;
        }
    }
    let mut r = last.expect("at least one pass");
    r.iterations = used;
    r
}

fn run<F: FnMut(&[f64]) -> f64>(f: &mut F, x0: &[f64], opts: &SimplexOptions, budget: usize) -> SimplexResult {
    let n = x0.len();
    let (alpha, gamma, rho, shrink) = (1.0, 2.0, 0.5, 0.5);

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut base = x0.to_vec();
    clamp_into(&mut base, &opts.lower, &opts.upper);
    pts.push(base.clone());
    for i in 0..n {
        let mut p = base.clone();
        p[i] += opts.step[i];
        if p[i] > opts.upper[i] {
            p[i] = base[i] - opts.step[i];
        }
        clamp_into(&mut p, &opts.lower, &opts.upper);
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();

    let mut iter = 0;
    loop {
        // order vertices best to worst
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.iter().map(|&i| pts[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();

        let spread = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread < opts.xtol {
            return SimplexResult {
                x: pts[0].clone(),
                fx: vals[0],
                iterations: iter,
                converged: true,
            };
        }
        if iter >= budget {
            return SimplexResult {
                x: pts[0].clone(),
                fx: vals[0],
                iterations: iter,
                converged: false,
            };
        }
        iter += 1;

        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64| {
            let mut q: Vec<f64> = centroid.iter().zip(&pts[n]).map(|(c, w)| c + t * (c - w)).collect();
            clamp_into(&mut q, &opts.lower, &opts.upper);
            q
        };

        let xr = along(alpha);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(gamma);
            let fe = f(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = along(rho);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = f(&xc);
            (xc, fc)
        };
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        let best = pts[0].clone();
        for i in 1..=n {
            for (v, b) in pts[i].iter_mut().zip(&best) {
                *v = b + shrink * (*v - b);
            }
            vals[i] = f(&pts[i]);
        }
    }
}

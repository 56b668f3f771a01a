//! Box-constrained Nelder–Mead minimizer.
//!
//! Trial points are projected onto the box before evaluation, which keeps
//! every vertex feasible without penalty terms.

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for ((xi, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *xi = xi.clamp(*lo, *hi);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub max_evals: usize,
    /// Stop once every vertex lies within this distance of the best one.
    pub x_tol: f64,
    /// Stop once the spread of objective values over the simplex falls below this.
    pub f_tol: f64,
    /// Initial edge length as a fraction of each box width.
    pub initial_step: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            x_tol: 1e-6,
            f_tol: 1e-10,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    /// The evaluation budget ran out before either tolerance was met.
    pub exhausted: bool,
}

const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], bounds: &Bounds, opts: &Options) -> Minimum {
    let n = x0.len();
    assert_eq!(n, bounds.dim(), "start point and box differ in dimension");
    let mut evals = 0usize;
    let mut eval = |x: &mut Vec<f64>, evals: &mut usize| -> f64 {
        bounds.clamp(x);
        *evals += 1;
        let v = f(x);
        // NaN from a degenerate evaluation must never win a comparison
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut start = x0.to_vec();
    let f0 = eval(&mut start, &mut evals);
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(start.clone(), f0)];
    for i in 0..n {
        let width = bounds.upper[i] - bounds.lower[i];
        let mut x = start.clone();
        let step = opts.initial_step * width;
        // step toward the interior when the start sits on the upper face
        x[i] = if x[i] + step <= bounds.upper[i] { x[i] + step } else { x[i] - step };
        let fx = eval(&mut x, &mut evals);
        simplex.push((x, fx));
    }

    let mut exhausted = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let spread = simplex[n].1 - simplex[0].1;
        if diameter < opts.x_tol || spread < opts.f_tol {
            break;
        }
        if evals >= opts.max_evals {
            exhausted = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let toward = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let mut xr = toward(ALPHA);
        let fr = eval(&mut xr, &mut evals);
        if fr < simplex[0].1 {
            let mut xe = toward(ALPHA * GAMMA);
            let fe = eval(&mut xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let mut xc = toward(ALPHA * RHO);
            let fc = eval(&mut xc, &mut evals);
            (xc, fc)
        } else {
            let mut xc = toward(-RHO);
            let fc = eval(&mut xc, &mut evals);
            (xc, fc)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut x: Vec<f64> = x_best.iter().zip(&vertex.0).map(|(b, v)| b + SIGMA * (v - b)).collect();
            let fx = eval(&mut x, &mut evals);
            *vertex = (x, fx);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    Minimum { x, f, evals, exhausted }
}

//! Small numerical kernels shared by the geodesic and isometry modules:
//! a fixed-step classical Runge-Kutta stepper and a Nelder-Mead simplex.

use nalgebra::{DMatrix, Matrix2, Matrix3};

/// States that form a real vector space, as far as RK4 is concerned.
pub trait Axpy: Clone {
    /// `self + a * dx`
    fn axpy(&self, a: f64, dx: &Self) -> Self;
}

impl<const N: usize> Axpy for [f64; N] {
    fn axpy(&self, a: f64, dx: &Self) -> Self {
        let mut out = *self;
        for (o, d) in out.iter_mut().zip(dx) {
            *o += a * d;
        }
        out
    }
}

impl Axpy for DMatrix<f64> {
    fn axpy(&self, a: f64, dx: &Self) -> Self {
        self + dx * a
    }
}

impl Axpy for Matrix2<f64> {
    fn axpy(&self, a: f64, dx: &Self) -> Self {
        self + dx * a
    }
}

impl Axpy for Matrix3<f64> {
    fn axpy(&self, a: f64, dx: &Self) -> Self {
        self + dx * a
    }
}

impl<A: Axpy, B: Axpy> Axpy for (A, B) {
    fn axpy(&self, a: f64, dx: &Self) -> Self {
        (self.0.axpy(a, &dx.0), self.1.axpy(a, &dx.1))
    }
}

/// One classical fourth-order Runge-Kutta step for an autonomous system.
pub fn rk4_step<S: Axpy>(y: &S, dt: f64, f: impl Fn(&S) -> S) -> S {
    let k1 = f(y);
    let k2 = f(&y.axpy(0.5 * dt, &k1));
    let k3 = f(&y.axpy(0.5 * dt, &k2));
    let k4 = f(&y.axpy(dt, &k3));
    y.axpy(dt / 6.0, &k1)
        .axpy(dt / 3.0, &k2)
        .axpy(dt / 3.0, &k3)
        .axpy(dt / 6.0, &k4)
}

/// Integrate `y' = f(y)` over `[0, t]` with `steps` equal RK4 steps.
pub fn rk4_integrate<S: Axpy>(y0: &S, t: f64, steps: usize, f: impl Fn(&S) -> S) -> S {
    let dt = t / steps.max(1) as f64;
    let mut y = y0.clone();
    for _ in 0..steps.max(1) {
        y = rk4_step(&y, dt, &f);
    }
    y
}

/// Nelder-Mead coefficients. The defaults are the standard ones:
/// reflection 1, expansion 2, contraction 1/2, shrink 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub max_iterations: usize,
    /// Stop as soon as the best value drops below this.
    pub target: f64,
    /// Stop when the spread of values across the simplex drops below this.
    pub f_tolerance: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            max_iterations: 200,
            target: f64::NEG_INFINITY,
            f_tolerance: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Minimise `f` starting from the axis-aligned simplex `x0 + step_i e_i`.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    step: &[f64],
    opts: &SimplexOptions,
) -> SimplexResult {
    let n = x0.len();
    assert_eq!(step.len(), n, "one step per coordinate");
    // Non-finite objective values are treated as +inf so they are always
    // rejected.
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
    simplex.push((eval(x0), x0.to_vec()));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step[i];
        simplex.push((eval(&x), x));
    }

    let by_value = |a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)| a.0.total_cmp(&b.0);
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        simplex.sort_by(by_value);
        let best = simplex[0].0;
        let worst = simplex[n].0;
        if best <= opts.target || (worst - best).abs() <= opts.f_tolerance {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (_, x) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].1)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = along(opts.reflection);
        let fr = eval(&xr);
        if fr < best {
            let xe = along(opts.reflection * opts.expansion);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (fe, xe) } else { (fr, xr) };
            continue;
        }
        if fr < simplex[n - 1].0 {
            simplex[n] = (fr, xr);
            continue;
        }
        // Outside contraction if the reflected point beats the worst,
        // inside contraction otherwise.
        let (xc, fc) = if fr < worst {
            let xc = along(opts.reflection * opts.contraction);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-opts.contraction);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < fr.min(worst) {
            simplex[n] = (fc, xc);
            continue;
        }
        let x_best = simplex[0].1.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = x_best
                .iter()
                .zip(&vertex.1)
                .map(|(b, v)| b + opts.shrink * (v - b))
                .collect();
            *vertex = (eval(&x), x);
        }
    }
    simplex.sort_by(by_value);
    let (value, x) = simplex.swap_remove(0);
    SimplexResult {
        x,
        value,
        iterations,
    }
}

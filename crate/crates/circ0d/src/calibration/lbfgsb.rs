//! Bounded limited-memory quasi-Newton minimizer with forward
//! finite-difference gradients, for losses defined through ODE simulation
//! (noisy, piecewise smooth, occasionally failing evaluations handled
//! upstream by penalty values).

use std::collections::VecDeque;

/// Options of the bounded minimizer.
#[derive(Debug, Clone, Copy)]
pub struct OptimOptions {
    pub max_iterations: usize,
    /// Number of curvature pairs retained.
    pub memory: usize,
    /// Stop when the projected gradient inf-norm drops below this.
    pub grad_tol: f64,
    /// Stop as soon as the objective drops below this value.
    pub target_value: Option<f64>,
    /// Relative forward-difference step.
    pub fd_rel_step: f64,
}

impl Default for OptimOptions {
    fn default() -> Self {
        OptimOptions {
            max_iterations: 500,
            memory: 8,
            grad_tol: 1e-8,
            target_value: None,
            fd_rel_step: 1e-6,
        }
    }
}

/// Why the minimizer stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    TargetReached,
    GradientSmall,
    IterationLimit,
    Stalled,
}

#[derive(Debug, Clone)]
pub struct OptimOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub stop: StopReason,
}

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lower[i], upper[i]);
    }
}

/// Minimizes `f` over the box [lower, upper] starting from `x0`.
pub fn minimize_bounded<F>(
    mut f: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &OptimOptions,
) -> OptimOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    debug_assert!(lower.len() == n && upper.len() == n);
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut x = x0.to_vec();
    project(&mut x, lower, upper);
    let mut fx = eval(&x, &mut evals);
    let mut best = (x.clone(), fx);

    // forward differences, stepping away from the active bound
    let fd_grad = |x: &[f64], fx: f64, eval: &mut dyn FnMut(&[f64]) -> f64| -> Vec<f64> {
        let mut g = vec![0.0; n];
        let mut xp = x.to_vec();
        for i in 0..n {
            let mut h = opts.fd_rel_step * x[i].abs().max(1e-8);
            if x[i] + h > upper[i] {
                h = -h;
            }
            if x[i] + h < lower[i] {
                g[i] = 0.0;
                continue;
            }
            xp[i] = x[i] + h;
            g[i] = (eval(&xp) - fx) / h;
            xp[i] = x[i];
        }
        g
    };

    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new(); // (s, y, 1/(y.s))
    let mut g = {
        let mut e = |z: &[f64]| eval(z, &mut evals);
        fd_grad(&x, fx, &mut e)
    };
    let mut stop = StopReason::IterationLimit;
    let mut iterations = 0usize;

    for _ in 0..opts.max_iterations {
        iterations += 1;
        if let Some(t) = opts.target_value {
            if fx < t {
                stop = StopReason::TargetReached;
                break;
            }
        }
        // projected gradient convergence check
        let pg = (0..n)
            .map(|i| {
                let step = (x[i] - g[i]).clamp(lower[i], upper[i]) - x[i];
                step.abs()
            })
            .fold(0.0, f64::max);
        if pg < opts.grad_tol {
            stop = StopReason::GradientSmall;
            break;
        }

        // two-loop recursion for d = -H g
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let alpha = rho * s.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>();
            for i in 0..n {
                d[i] -= alpha * y[i];
            }
            alphas.push(alpha);
        }
        if let Some((s, y, _)) = history.back() {
            let sy: f64 = s.iter().zip(y).map(|(a, b)| a * b).sum();
            let yy: f64 = y.iter().map(|v| v * v).sum();
            if yy > 0.0 {
                let gamma = sy / yy;
                for v in &mut d {
                    *v *= gamma;
                }
            }
        }
        for ((s, y, rho), alpha) in history.iter().zip(alphas.into_iter().rev()) {
            let beta = rho * y.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>();
            for i in 0..n {
                d[i] += (alpha - beta) * s[i];
            }
        }

        // backtracking line search along the projected path
        let g_dot_d: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        let mut dir = d;
        if g_dot_d >= 0.0 {
            // not a descent direction: fall back to steepest descent
            dir = g.iter().map(|v| -v).collect();
            history.clear();
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let mut x_new: Vec<f64> = (0..n).map(|i| x[i] + alpha * dir[i]).collect();
            project(&mut x_new, lower, upper);
            let dx_dot_g: f64 = (0..n).map(|i| (x_new[i] - x[i]) * g[i]).sum();
            if dx_dot_g >= 0.0 {
                // projection annihilated the step
                alpha *= 0.5;
                continue;
            }
            let f_new = eval(&x_new, &mut evals);
            if f_new <= fx + 1e-4 * dx_dot_g {
                accepted = Some((x_new, f_new));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            stop = StopReason::Stalled;
            break;
        };

        let mut e = |z: &[f64]| eval(z, &mut evals);
        let g_new = fd_grad(&x_new, f_new, &mut e);
        let s: Vec<f64> = (0..n).map(|i| x_new[i] - x[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| g_new[i] - g[i]).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ss: f64 = s.iter().map(|v| v * v).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        if sy > 1e-10 * (ss * yy).sqrt() && sy.is_finite() {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        x = x_new;
        fx = f_new;
        g = g_new;
        if fx < best.1 {
            best = (x.clone(), fx);
        }
    }
    if let Some(t) = opts.target_value {
        if fx < t {
            stop = StopReason::TargetReached;
        }
    }
    if best.1 < fx {
        x = best.0;
        fx = best.1;
    }
    OptimOutcome { x, value: fx, iterations, evaluations: evals, stop }
}

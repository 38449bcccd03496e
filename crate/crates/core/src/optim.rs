//! Nelder-Mead simplex minimizer used by the SRGM and distribution fitters.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Convergence threshold on the simplex spread, applied both to the
    /// objective values and to the vertex coordinates.
    pub tolerance: f64,
    /// Edge length of the initial simplex along each axis.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-10,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `objective` from `start`. Non-finite objective values are
/// treated as `+inf`, so infeasible regions can be signalled that way.
///
/// After the simplex collapses the search is restarted once around the best
/// point with a fresh simplex; the result only counts as converged when the
/// restart does not move. The iteration budget is shared by both runs.
pub fn nelder_mead<F>(mut objective: F, start: &[f64], options: NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let mut eval = |x: &[f64]| {
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut best = start.to_vec();
    let mut iterations = 0;
    let mut step = options.initial_step;
    loop {
        let run = simplex_search(&mut eval, &best, step, options, iterations);
        iterations = run.iterations;
        let moved = run
            .point
            .iter()
            .zip(&best)
            .any(|(a, b)| (a - b).abs() > options.tolerance);
        best = run.point;
        if !run.converged {
            return Minimum {
                value: run.value,
                point: best,
                iterations,
                converged: false,
            };
        }
        if !moved || step < options.initial_step {
            return Minimum {
                value: run.value,
                point: best,
                iterations,
                converged: true,
            };
        }
        // one restart with a smaller simplex
        step = options.initial_step * 0.1;
    }
}

fn simplex_search<F>(
    eval: &mut F,
    start: &[f64],
    step: f64,
    options: NelderMeadOptions,
    mut iterations: usize,
) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    if n == 0 {
        let value = eval(start);
        return Minimum {
            point: vec![],
            value,
            iterations,
            converged: true,
        };
    }

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut vertex = start.to_vec();
        vertex[i] += step;
        simplex.push(vertex);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    loop {
        // order vertices best to worst; stable on ties
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let f_spread = values[n] - values[0];
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread.is_finite() && f_spread <= options.tolerance && x_spread <= options.tolerance
        {
            return Minimum {
                point: simplex[0].clone(),
                value: values[0],
                iterations,
                converged: true,
            };
        }
        if iterations >= options.max_iterations {
            return Minimum {
                point: simplex[0].clone(),
                value: values[0],
                iterations,
                converged: false,
            };
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64)
            .collect();
        let towards = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let reflected = towards(1.0);
        let f_reflected = eval(&reflected);
        if f_reflected < values[0] {
            let expanded = towards(2.0);
            let f_expanded = eval(&expanded);
            if f_expanded < f_reflected {
                simplex[n] = expanded;
                values[n] = f_expanded;
            } else {
                simplex[n] = reflected;
                values[n] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[n - 1] {
            simplex[n] = reflected;
            values[n] = f_reflected;
            continue;
        }
        let (contracted, f_contracted) = if f_reflected < values[n] {
            let c = towards(0.5);
            let f = eval(&c);
            (c, f)
        } else {
            let c = towards(-0.5);
            let f = eval(&c);
            (c, f)
        };
        if f_contracted < values[n].min(f_reflected) {
            simplex[n] = contracted;
            values[n] = f_contracted;
            continue;
        }
        // shrink towards the best vertex
        for i in 1..=n {
            let shrunk: Vec<f64> = simplex[i]
                .iter()
                .zip(&simplex[0])
                .map(|(x, b)| b + 0.5 * (x - b))
                .collect();
            values[i] = eval(&shrunk);
            simplex[i] = shrunk;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let m = nelder_mead(
            |x| (x[0] - 3.0).powi(2) + 10.0 * (x[1] + 1.0).powi(2),
            &[0.0, 0.0],
            NelderMeadOptions {
                initial_step: 1.0,
                ..Default::default()
            },
        );
        assert!(m.converged);
        assert!((m.point[0] - 3.0).abs() < 1e-5);
        assert!((m.point[1] + 1.0).abs() < 1e-5);
        assert!(m.iterations <= 500);
    }

    #[test]
    fn rosenbrock_with_budget() {
        let m = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            NelderMeadOptions {
                max_iterations: 2000,
                initial_step: 0.5,
                ..Default::default()
            },
        );
        assert!((m.point[0] - 1.0).abs() < 1e-4, "{m:?}");
        assert!((m.point[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn infeasible_region_is_avoided() {
        let m = nelder_mead(
            |x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.5).powi(2) },
            &[2.0],
            Default::default(),
        );
        assert!((m.point[0] - 0.5).abs() < 1e-5);
    }

    #[test]
    fn budget_exhaustion_reports_not_converged() {
        let m = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            NelderMeadOptions {
                max_iterations: 5,
                ..Default::default()
            },
        );
        assert!(!m.converged);
        assert_eq!(m.iterations, 5);
    }
}

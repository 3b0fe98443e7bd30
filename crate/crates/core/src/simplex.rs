//! Derivative-free Nelder-Mead minimizer used by the frame search and the
//! convex roof.

/// Nelder-Mead settings. Stops after `max_iters`, once the simplex has
/// collapsed (`ftol` on values and `xtol` on vertex spread), or as soon as a
/// value at or below `target` is found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_iters: usize,
    pub initial_step: f64,
    pub ftol: f64,
    pub xtol: f64,
    pub target: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_iters: 500, initial_step: 0.1, ftol: 1e-12, xtol: 1e-10, target: f64::NEG_INFINITY }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

impl NelderMead {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut evals = 0;
        let mut eval = |x: &[f64]| {
            evals += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        if n == 0 {
            let value = eval(x0);
            return Minimum { x: Vec::new(), value, iterations: 0, evaluations: 1 };
        }
        let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += self.initial_step;
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
        let mut order: Vec<usize> = (0..=n).collect();
        let mut iterations = 0;

        while iterations < self.max_iters {
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let (best, worst, second) = (order[0], order[n], order[n - 1]);
            if values[best] <= self.target {
                break;
            }
            let spread = values[worst] - values[best];
            let size = simplex
                .iter()
                .map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread <= self.ftol && size <= self.xtol {
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for &i in &order[..n] {
                for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                    *c += x / n as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&simplex[worst]).map(|(c, w)| c + t * (w - c)).collect()
            };

            let xr = along(-1.0);
            let fr = eval(&xr);
            if fr < values[best] {
                let xe = along(-2.0);
                let fe = eval(&xe);
                if fe < fr {
                    simplex[worst] = xe;
                    values[worst] = fe;
                } else {
                    simplex[worst] = xr;
                    values[worst] = fr;
                }
                continue;
            }
            if fr < values[second] {
                simplex[worst] = xr;
                values[worst] = fr;
                continue;
            }
            let xc = if fr < values[worst] { along(-0.5) } else { along(0.5) };
            let fc = eval(&xc);
            if fc < values[worst].min(fr) {
                simplex[worst] = xc;
                values[worst] = fc;
                continue;
            }
            let anchor = simplex[best].clone();
            for &i in &order[1..] {
                let shrunk: Vec<f64> = simplex[i].iter().zip(&anchor).map(|(x, a)| a + 0.5 * (x - a)).collect();
                values[i] = eval(&shrunk);
                simplex[i] = shrunk;
            }
        }
        let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("nonempty simplex");
        Minimum { x: simplex[best].clone(), value: values[best], iterations, evaluations: evals }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic() {
        let nm = NelderMead { max_iters: 2000, ..Default::default() };
        let m = nm.minimize(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0]);
        assert!(m.value < 1e-12);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn minimizes_rosenbrock() {
        let nm = NelderMead { max_iters: 5000, initial_step: 0.5, ..Default::default() };
        let m = nm.minimize(|x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2), &[-1.2, 1.0]);
        assert!(m.value < 1e-10, "{m:?}");
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| x.iter().map(|v| v.sin() + 0.1 * v * v).sum::<f64>();
        let x0 = [0.3, -2.0, 1.1];
        let m = NelderMead::default().minimize(f, &x0);
        assert!(m.value <= f(&x0));
    }

    #[test]
    fn stops_at_target() {
        let nm = NelderMead { target: 0.5, ..Default::default() };
        let m = nm.minimize(|x| x[0] * x[0], &[3.0]);
        let full = NelderMead::default().minimize(|x| x[0] * x[0], &[3.0]);
        assert!(m.value <= 0.5);
        assert!(m.iterations < full.iterations);
    }
}

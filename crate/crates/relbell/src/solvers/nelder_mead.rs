//! Minimal Nelder-Mead simplex descent used by the direction optimizer.
//!
//! Standard coefficients (reflection 1, expansion 2, contraction 0.5,
//! shrink 0.5). Entirely deterministic: evaluation and ordering use fixed
//! sequences, so identical inputs give bit-identical trajectories.

pub(crate) struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Whether the value spread reached `tol` before the iteration cap. The
    /// multi-start driver judges convergence across restart rounds instead,
    /// so this is diagnostic only.
    #[allow(dead_code)]
    pub converged: bool,
}

/// Minimizes `f` starting from `x0`, with an initial simplex offset of
/// `step` along each coordinate. Stops when the value spread across the
/// simplex drops to `tol` or after `max_iter` iterations.
pub(crate) fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> SimplexOutcome {
    let n = x0.len();
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| f(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        // Ascending by value; ties keep insertion order.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let second_worst = order[n - 1];
        let worst = order[n];

        if values[worst] - values[best] <= tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(points[i].iter()) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }

        let blend = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
        };

        // Reflection: centroid + (centroid - worst).
        let reflected = blend(&centroid, &points[worst], -1.0);
        let fr = f(&reflected);
        if fr < values[best] {
            // Expansion: centroid + 2 (reflected - centroid).
            let expanded = blend(&centroid, &reflected, 2.0);
            let fe = f(&expanded);
            if fe < fr {
                points[worst] = expanded;
                values[worst] = fe;
            } else {
                points[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            points[worst] = reflected;
            values[worst] = fr;
        } else {
            // Contraction toward the better of reflected/worst.
            let (toward, bound) = if fr < values[worst] {
                (reflected.clone(), fr)
            } else {
                (points[worst].clone(), values[worst])
            };
            let contracted = blend(&centroid, &toward, 0.5);
            let fc = f(&contracted);
            if fc < bound {
                points[worst] = contracted;
                values[worst] = fc;
            } else {
                // Shrink everything toward the best vertex.
                let anchor = points[best].clone();
                for i in 0..=n {
                    if i == best {
                        continue;
                    }
                    points[i] = blend(&anchor, &points[i], 0.5);
                    values[i] = f(&points[i]);
                }
            }
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("simplex is non-empty");
    SimplexOutcome {
        x: points[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

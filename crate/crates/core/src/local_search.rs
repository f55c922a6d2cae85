//! Derivative-free minimizers shared by hyperparameter fitting and the
//! continuous acquisition searches.

/// Nelder–Mead simplex search. Returns the best point and value seen.
pub(crate) fn nelder_mead<F>(f: &mut F, start: &[f64], step: f64, max_evals: usize) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), eval(start, &mut evals)));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    while evals < max_evals {
        // stable sort keeps earlier vertices first among equal values
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if (worst - best).abs() <= 1e-10 * (1.0 + best.abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let towards = |coef: f64, from: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };
        let worst_x = simplex[n].0.clone();
        let reflected = towards(1.0, &worst_x);
        let fr = eval(&reflected, &mut evals);
        if fr < simplex[0].1 {
            let expanded = towards(2.0, &worst_x);
            let fe = eval(&expanded, &mut evals);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr < worst {
                towards(0.5, &worst_x)
            } else {
                towards(-0.5, &worst_x)
            };
            let fc = eval(&contracted, &mut evals);
            if fc < worst.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let best_x = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = best_x
                        .iter()
                        .zip(&vertex.0)
                        .map(|(b, v)| b + 0.5 * (v - b))
                        .collect();
                    let fs = eval(&shrunk, &mut evals);
                    *vertex = (shrunk, fs);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// Coordinate pattern search inside `[lo, hi]`, one coordinate probe (both
/// directions) per step. The step size halves after a full sweep without
/// improvement. Returns the best of all starts; ties keep the earlier start.
pub(crate) fn minimize_in_box<F>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    starts: &[Vec<f64>],
    steps: usize,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let dim = lo.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in starts {
        let mut x: Vec<f64> = start
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(v, (l, h))| v.clamp(*l, *h))
            .collect();
        let mut fx = f(&x);
        let mut h: Vec<f64> = lo.iter().zip(hi).map(|(l, u)| 0.25 * (u - l)).collect();
        let mut improved_in_sweep = false;
        for step in 0..steps {
            let i = step % dim;
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] = (x[i] + dir * h[i]).clamp(lo[i], hi[i]);
                if y[i] == x[i] {
                    continue;
                }
                let fy = f(&y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved_in_sweep = true;
                    break;
                }
            }
            if i + 1 == dim {
                if !improved_in_sweep {
                    h.iter_mut().for_each(|v| *v *= 0.5);
                }
                improved_in_sweep = false;
            }
        }
        if best.as_ref().is_none_or(|(_, bv)| fx < *bv) {
            best = Some((x, fx));
        }
    }
    best.expect("at least one start")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let mut f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2);
        let (x, v) = nelder_mead(&mut f, &[0.0, 0.0], 0.5, 500);
        assert!(v < 1e-8);
        assert!((x[0] - 1.0).abs() < 1e-3 && (x[1] + 2.0).abs() < 1e-3);
    }

    #[test]
    fn box_search_respects_bounds() {
        let f = |x: &[f64]| -(x[0] + x[1]);
        let (x, v) = minimize_in_box(&f, &[-1.0, 0.0], &[2.0, 0.5], &[vec![0.0, 0.0]], 100);
        assert_eq!(x, vec![2.0, 0.5]);
        assert_eq!(v, -2.5);
    }

    #[test]
    fn box_search_finds_interior_minimum() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + (x[1] + 0.6).powi(2);
        let starts = vec![vec![1.0, 1.0], vec![-1.0, -1.0]];
        let (x, _) = minimize_in_box(&f, &[-1.0, -1.0], &[1.0, 1.0], &starts, 200);
        assert!((x[0] - 0.3).abs() < 1e-3 && (x[1] + 0.6).abs() < 1e-3);
    }
}

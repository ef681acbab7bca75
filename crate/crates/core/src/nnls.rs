//! Small dense nonnegative least squares (Lawson-Hanson active set).
//!
//! Columns enter the passive set by largest dual value; exact ties go to the
//! lowest index so results are reproducible.

/// Solution of `min |A x - b|` subject to `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// `columns[j]` is column `j` of `A`; all columns must have the length of `b`.
pub fn nnls(columns: &[Vec<f64>], b: &[f64]) -> NnlsSolution {
    let n = columns.len();
    let m = b.len();
    assert!(columns.iter().all(|c| c.len() == m), "column length mismatch");

    let norm_a = columns
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dual_tol = 1e-14 * norm_a.max(1e-300) * norm_b.max(1e-300);

    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let max_iter = 30 * n.max(1);
    let mut iterations = 0;

    loop {
        let r = residual_vec(columns, &x, b);
        let w: Vec<f64> = columns.iter().map(|c| dot(c, &r)).collect();
        let mut best: Option<usize> = None;
        for j in 0..n {
            if !passive[j] && w[j] > dual_tol && best.is_none_or(|k| w[j] > w[k]) {
                best = Some(j);
            }
        }
        let Some(enter) = best else { break };
        if iterations >= max_iter {
            break;
        }
        passive[enter] = true;

        loop {
            iterations += 1;
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let z_p = least_squares(&idx.iter().map(|&j| columns[j].as_slice()).collect::<Vec<_>>(), b);
            let mut z = vec![0.0; n];
            for (k, &j) in idx.iter().enumerate() {
                z[j] = z_p[k];
            }
            if idx.iter().all(|&j| z[j] > 0.0) {
                x = z;
                break;
            }
            let mut alpha = f64::INFINITY;
            for &j in &idx {
                if z[j] <= 0.0 {
                    let denom = x[j] - z[j];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for j in 0..n {
                x[j] += alpha * (z[j] - x[j]);
            }
            for &j in &idx {
                if x[j] <= 1e-15 * (1.0 + x.iter().fold(0.0f64, |a, v| a.max(v.abs()))) || (z[j] <= 0.0 && alpha == 0.0) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
            if iterations >= max_iter || !passive.iter().any(|&p| p) {
                break;
            }
        }
        if iterations >= max_iter {
            break;
        }
    }

    let r = residual_vec(columns, &x, b);
    NnlsSolution { residual: dot(&r, &r).sqrt(), x, iterations }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn residual_vec(columns: &[Vec<f64>], x: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = b.to_vec();
    for (c, &xj) in columns.iter().zip(x) {
        if xj != 0.0 {
            for (ri, ci) in r.iter_mut().zip(c) {
                *ri -= xj * ci;
            }
        }
    }
    r
}

/// Unconstrained least squares by modified Gram-Schmidt QR. Columns that are
/// numerically dependent on earlier ones get a zero coefficient.
fn least_squares(cols: &[&[f64]], b: &[f64]) -> Vec<f64> {
    let k = cols.len();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut r = vec![vec![0.0; k]; k];
    let mut keep = vec![true; k];
    for j in 0..k {
        let mut v = cols[j].to_vec();
        let norm0 = dot(&v, &v).sqrt();
        for (i, qi) in q.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            let rij = dot(qi, &v);
            r[i][j] = rij;
            for (vv, qq) in v.iter_mut().zip(qi) {
                *vv -= rij * qq;
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm <= 1e-12 * norm0.max(1e-300) {
            keep[j] = false;
            q.push(vec![0.0; v.len()]);
            continue;
        }
        r[j][j] = norm;
        q.push(v.into_iter().map(|x| x / norm).collect());
    }
    let qtb: Vec<f64> = q.iter().map(|qi| dot(qi, b)).collect();
    let mut x = vec![0.0; k];
    for j in (0..k).rev() {
        if !keep[j] {
            continue;
        }
        let mut s = qtb[j];
        for l in j + 1..k {
            if keep[l] {
                s -= r[j][l] * x[l];
            }
        }
        x[j] = s / r[j][j];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_target_is_matched() {
        let cols = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 1.0]];
        let sol = nnls(&cols, &[1.0, 2.0, 3.0]);
        assert!(sol.residual < 1e-14);
        assert!(sol.x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn infeasible_target_projects() {
        let cols = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let sol = nnls(&cols, &[-1.0, 2.0]);
        assert_eq!(sol.x[0], 0.0);
        assert!((sol.x[1] - 2.0).abs() < 1e-15);
        assert!((sol.residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ties_pick_lowest_index() {
        let cols = vec![vec![1.0, 0.0], vec![1.0, 0.0]];
        let sol = nnls(&cols, &[3.0, 0.0]);
        assert_eq!(sol.x, vec![3.0, 0.0]);
    }

    #[test]
    fn matches_brute_force_on_small_problems() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let cols: Vec<Vec<f64>> = (0..4).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sol = nnls(&cols, &b);
            // Brute force over supports: unconstrained LS on each subset,
            // keep the feasible ones.
            let mut best = dot(&b, &b).sqrt();
            for mask in 1u32..16 {
                let idx: Vec<usize> = (0..4).filter(|j| mask & (1 << j) != 0).collect();
                let sub: Vec<&[f64]> = idx.iter().map(|&j| cols[j].as_slice()).collect();
                let z = least_squares(&sub, &b);
                if z.iter().all(|&v| v >= -1e-12) {
                    let mut full = vec![0.0; 4];
                    for (k, &j) in idx.iter().enumerate() {
                        full[j] = z[k].max(0.0);
                    }
                    let r = residual_vec(&cols, &full, &b);
                    best = best.min(dot(&r, &r).sqrt());
                }
            }
            assert!(sol.residual <= best + 1e-10, "{} vs {}", sol.residual, best);
        }
    }
}

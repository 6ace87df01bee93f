//! Floating-point LLL reduction and Babai rounding. Used only to order
//! candidate witnesses; every candidate is re-checked exactly.

const DELTA: f64 = 0.75;
const MAX_SWAPS: usize = 20_000;

pub(crate) struct Reduced {
    pub basis: Vec<Vec<f64>>,
    /// Row `i` gives reduced vector `i` as an integer combination of the input rows.
    pub transform: Vec<Vec<i64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<f64>) {
    let s = b.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut mu = vec![vec![0.0; s]; s];
    let mut norms = vec![0.0; s];
    for i in 0..s {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = if norms[j] > 0.0 { dot(&b[i], &star[j]) / norms[j] } else { 0.0 };
            for (x, y) in v.iter_mut().zip(&star[j]) {
                *x -= mu[i][j] * y;
            }
        }
        norms[i] = dot(&v, &v);
        star.push(v);
    }
    (star, mu, norms)
}

fn finite(b: &[Vec<f64>]) -> bool {
    b.iter().flatten().all(|x| x.is_finite())
}

pub(crate) fn lll(input: Vec<Vec<f64>>) -> Option<Reduced> {
    let s = input.len();
    if !finite(&input) {
        return None;
    }
    let mut b = input;
    let mut t: Vec<Vec<i64>> = (0..s)
        .map(|i| (0..s).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut k = 1;
    let mut swaps = 0;
    while k < s {
        for j in (0..k).rev() {
            let (_, mu, _) = gram_schmidt(&b);
            let q = mu[k][j].round();
            if q != 0.0 {
                if !q.is_finite() || q.abs() > 1e15 {
                    return None;
                }
                let qi = q as i64;
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= q * y;
                }
                let tj = t[j].clone();
                for (x, y) in t[k].iter_mut().zip(&tj) {
                    *x = x.checked_sub(qi.checked_mul(*y)?)?;
                }
            }
        }
        let (_, mu, norms) = gram_schmidt(&b);
        if norms[k] >= (DELTA - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            t.swap(k, k - 1);
            k = (k - 1).max(1);
            swaps += 1;
            if swaps > MAX_SWAPS {
                return None;
            }
        }
        if !finite(&b) {
            return None;
        }
    }
    Some(Reduced {
        basis: b,
        transform: t,
    })
}

/// Coefficients, in terms of the input rows, of the Babai nearest-plane point.
pub(crate) fn babai(red: &Reduced, target: &[f64]) -> Option<Vec<i64>> {
    let s = red.basis.len();
    let (star, _, norms) = gram_schmidt(&red.basis);
    let mut residual = target.to_vec();
    let mut c = vec![0i64; s];
    for i in (0..s).rev() {
        if norms[i] <= 0.0 {
            continue;
        }
        let q = (dot(&residual, &star[i]) / norms[i]).round();
        if !q.is_finite() || q.abs() > 1e15 {
            return None;
        }
        c[i] = q as i64;
        for (x, y) in residual.iter_mut().zip(&red.basis[i]) {
            *x -= q * y;
        }
    }
    combine(&c, &red.transform)
}

pub(crate) fn combine(c: &[i64], rows: &[Vec<i64>]) -> Option<Vec<i64>> {
    let s = rows.first().map_or(0, Vec::len);
    let mut a = vec![0i64; s];
    for (ci, row) in c.iter().zip(rows) {
        for (x, y) in a.iter_mut().zip(row) {
            *x = x.checked_add(ci.checked_mul(*y)?)?;
        }
    }
    Some(a)
}

/// Least-squares coefficients `a` minimizing `|Σ aᵢ bᵢ − target|`.
pub(crate) fn least_squares(b: &[Vec<f64>], target: &[f64]) -> Option<Vec<f64>> {
    let s = b.len();
    let mut m: Vec<Vec<f64>> = (0..s)
        .map(|i| {
            let mut row: Vec<f64> = (0..s).map(|j| dot(&b[i], &b[j])).collect();
            row.push(dot(&b[i], target));
            row
        })
        .collect();
    for c in 0..s {
        let p = (c..s).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))?;
        if m[p][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, p);
        for r in 0..s {
            if r != c {
                let f = m[r][c] / m[c][c];
                let pivot = m[c].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot).skip(c) {
                    *x -= f * y;
                }
            }
        }
    }
    let x: Vec<f64> = (0..s).map(|i| m[i][s] / m[i][i]).collect();
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_a_skewed_basis() {
        let red = lll(vec![vec![1.0, 0.0], vec![1000.0, 1.0]]).unwrap();
        assert!(red.basis.iter().all(|v| dot(v, v) <= 2.0 + 1e-9));
        let a = babai(&red, &[3.2, 0.9]).unwrap();
        assert_eq!(a, vec![-997, 1]);
    }

    #[test]
    fn least_squares_identity() {
        let x = least_squares(&[vec![1.0, 0.0], vec![0.0, 2.0]], &[3.0, 4.0]).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }
}

//! Symmetric positive definite sparse solves: LDLᵀ with greedy minimum-degree
//! ordering, and Jacobi-preconditioned conjugate gradients.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Symmetric matrix stored as diagonal plus strict off-diagonal rows.
/// Every off-diagonal entry appears in both rows.
#[derive(Debug, Clone)]
pub(crate) struct SymmetricMatrix {
    pub diag: Vec<f64>,
    pub off: Vec<Vec<(usize, f64)>>,
}

impl SymmetricMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.dim() {
            let mut acc = self.diag[i] * x[i];
            for &(j, a) in &self.off[i] {
                acc += a * x[j];
            }
            out[i] = acc;
        }
    }
}

struct Step {
    pivot: usize,
    d: f64,
    column: Vec<(usize, f64)>,
}

/// `K = P L D Lᵀ Pᵀ`, stored as elimination steps in pivot order.
pub(crate) struct LdlFactor {
    steps: Vec<Step>,
}

impl LdlFactor {
    pub fn factor(k: &SymmetricMatrix) -> Result<Self> {
        let n = k.dim();
        let mut diag = k.diag.clone();
        let mut rows: Vec<BTreeMap<usize, f64>> = k.off.iter().map(|r| r.iter().copied().collect()).collect();
        let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|i| (rows[i].len(), i)).collect();
        let mut steps = Vec::with_capacity(n);

        while let Some((_, p)) = queue.pop_first() {
            let d = diag[p];
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::SingularSystem { row: p });
            }
            let row_p = std::mem::take(&mut rows[p]);
            let column: Vec<(usize, f64)> = row_p.iter().map(|(&i, &a)| (i, a / d)).collect();
            for &(i, _) in &column {
                queue.remove(&(rows[i].len(), i));
                rows[i].remove(&p);
            }
            for (a_idx, &(i, li)) in column.iter().enumerate() {
                let a_ip = li * d;
                diag[i] -= a_ip * li;
                for &(j, lj) in &column[a_idx + 1..] {
                    let update = a_ip * lj;
                    *rows[i].entry(j).or_insert(0.0) -= update;
                    *rows[j].entry(i).or_insert(0.0) -= update;
                }
            }
            for &(i, _) in &column {
                queue.insert((rows[i].len(), i));
            }
            steps.push(Step { pivot: p, d, column });
        }
        Ok(Self { steps })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        for s in &self.steps {
            let xp = x[s.pivot];
            for &(i, l) in &s.column {
                x[i] -= l * xp;
            }
        }
        for s in &self.steps {
            x[s.pivot] /= s.d;
        }
        for s in self.steps.iter().rev() {
            let mut acc = x[s.pivot];
            for &(i, l) in &s.column {
                acc -= l * x[i];
            }
            x[s.pivot] = acc;
        }
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned CG to relative residual `tol`, at most `max_iter`
/// iterations.
pub(crate) fn pcg(k: &SymmetricMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = k.dim();
    let mut x = vec![0.0; n];
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return Ok(x);
    }
    let inv_diag: Vec<f64> = k.diag.iter().map(|d| 1.0 / d).collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, m)| r * m).collect();
    let mut p = z.clone();
    let mut kp = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut residual = 1.0;
    for _ in 0..max_iter {
        k.apply(&p, &mut kp);
        let pkp = dot(&p, &kp);
        if !(pkp > 0.0) {
            return Err(Error::SingularSystem { row: 0 });
        }
        let alpha = rz / pkp;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * kp[i];
        }
        residual = dot(&r, &r).sqrt() / b_norm;
        if residual < tol {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // 1D Dirichlet Laplacian plus a shift: tridiag(-1, 2 + s, -1).
    fn tridiag(n: usize, s: f64) -> SymmetricMatrix {
        let off = (0..n)
            .map(|i| {
                let mut r = Vec::new();
                if i > 0 {
                    r.push((i - 1, -1.0));
                }
                if i + 1 < n {
                    r.push((i + 1, -1.0));
                }
                r
            })
            .collect();
        SymmetricMatrix {
            diag: vec![2.0 + s; n],
            off,
        }
    }

    #[test]
    fn ldl_matches_known_solution() {
        let k = tridiag(50, 0.0);
        let x_true: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = vec![0.0; 50];
        k.apply(&x_true, &mut b);
        let x = LdlFactor::factor(&k).unwrap().solve(&b);
        let err = x.iter().zip(&x_true).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-11, "err {err}");
    }

    #[test]
    fn pcg_agrees_with_ldl() {
        let k = tridiag(40, 0.1);
        let b: Vec<f64> = (0..40).map(|i| i as f64 - 20.0).collect();
        let direct = LdlFactor::factor(&k).unwrap().solve(&b);
        let iterative = pcg(&k, &b, 1e-14, 1000).unwrap();
        let err = direct
            .iter()
            .zip(&iterative)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "err {err}");
    }

    #[test]
    fn singular_pivot() {
        let k = SymmetricMatrix {
            diag: vec![1.0, 1.0],
            off: vec![vec![(1, -1.0)], vec![(0, -1.0)]],
        };
        assert!(matches!(LdlFactor::factor(&k), Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn pcg_iteration_cap() {
        let k = tridiag(200, 0.0);
        let b = vec![1.0; 200];
        assert!(matches!(
            pcg(&k, &b, 1e-14, 3),
            Err(Error::NonConvergence { iterations: 3, .. })
        ));
    }
}

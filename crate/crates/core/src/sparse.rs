//! Compressed sparse row matrices and a Jacobi-preconditioned BiCGSTAB
//! solver. Iteration order is fixed, so repeated solves of the same system
//! are bit-identical.

use crate::error::{Error, Result};
use crate::math::FloatExt;

use alloc::vec;
use alloc::vec::Vec;

/// Row-ordered triplet builder; duplicate entries are summed on assembly.
pub struct CsrBuilder {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl CsrBuilder {
    pub fn new(n: usize) -> Self {
        CsrBuilder {
            n,
            rows: vec![Vec::new(); n],
        }
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        self.rows[row].push((col, value));
    }

    pub fn build(mut self) -> Csr {
        let mut indptr = Vec::with_capacity(self.n + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0usize);
        for row in &mut self.rows {
            row.sort_by_key(|(c, _)| *c);
            let mut k = 0;
            while k < row.len() {
                let col = row[k].0;
                let mut acc = 0.0;
                while k < row.len() && row[k].0 == col {
                    acc += row[k].1;
                    k += 1;
                }
                indices.push(col);
                values.push(acc);
            }
            indptr.push(indices.len());
        }
        Csr {
            n: self.n,
            indptr,
            indices,
            values,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Csr {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl Csr {
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for row in 0..self.n {
            let mut acc = 0.0;
            for k in self.indptr[row]..self.indptr[row + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            out[row] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for row in 0..self.n {
            for k in self.indptr[row]..self.indptr[row + 1] {
                if self.indices[k] == row {
                    d[row] = self.values[k];
                }
            }
        }
        d
    }

    /// Entry lookup, zero when absent; assembly checks only.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        for k in self.indptr[row]..self.indptr[row + 1] {
            if self.indices[k] == col {
                return self.values[k];
            }
        }
        0.0
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned BiCGSTAB for `a x = b`, relative residual `tol`.
///
/// The initial guess is the Jacobi half-step `x0 = D^-1 b`, which already
/// satisfies any identity (Dirichlet) rows exactly and keeps their residual
/// components out of the Krylov space. Orthogonality breakdowns restart the
/// recursion from the current residual.
pub fn bicgstab(a: &Csr, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.n;
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveStats {
                iterations: 0,
                residual: 0.0,
                converged: true,
            },
        ));
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|d| if d.abs() > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut x: Vec<f64> = b
        .iter()
        .zip(inv_diag.iter())
        .map(|(bi, di)| bi * di)
        .collect();
    let mut r = vec![0.0; n];
    a.matvec(&x, &mut r);
    for k in 0..n {
        r[k] = b[k] - r[k];
    }

    let mut r0 = r.clone();
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut phat = vec![0.0; n];
    let mut shat = vec![0.0; n];

    let mut rho_prev = 1.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut fresh = true;
    let mut residual = norm(&r);
    if residual <= tol * b_norm {
        return Ok((
            x,
            SolveStats {
                iterations: 0,
                residual: residual / b_norm,
                converged: true,
            },
        ));
    }

    for iter in 1..=max_iter {
        let rho = dot(&r0, &r);
        let breakdown = rho.abs() < 1e-14 * norm(&r0) * residual;
        if breakdown && !fresh {
            r0.copy_from_slice(&r);
            fresh = true;
        }
        let rho = if fresh { dot(&r0, &r) } else { rho };
        if rho.abs() < 1e-300 {
            break;
        }
        if fresh {
            p.copy_from_slice(&r);
            fresh = false;
        } else {
            let beta = (rho / rho_prev) * (alpha / omega);
            for k in 0..n {
                p[k] = r[k] + beta * (p[k] - omega * v[k]);
            }
        }
        for k in 0..n {
            phat[k] = p[k] * inv_diag[k];
        }
        a.matvec(&phat, &mut v);
        let denom = dot(&r0, &v);
        if denom.abs() < 1e-300 {
            r0.copy_from_slice(&r);
            fresh = true;
            continue;
        }
        alpha = rho / denom;
        for k in 0..n {
            s[k] = r[k] - alpha * v[k];
        }
        residual = norm(&s);
        if residual <= tol * b_norm {
            for k in 0..n {
                x[k] += alpha * phat[k];
            }
            return Ok((
                x,
                SolveStats {
                    iterations: iter,
                    residual: residual / b_norm,
                    converged: true,
                },
            ));
        }
        for k in 0..n {
            shat[k] = s[k] * inv_diag[k];
        }
        a.matvec(&shat, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            break;
        }
        omega = dot(&t, &s) / tt;
        for k in 0..n {
            x[k] += alpha * phat[k] + omega * shat[k];
            r[k] = s[k] - omega * t[k];
        }
        residual = norm(&r);
        if residual <= tol * b_norm {
            return Ok((
                x,
                SolveStats {
                    iterations: iter,
                    residual: residual / b_norm,
                    converged: true,
                },
            ));
        }
        if omega.abs() < 1e-300 {
            r0.copy_from_slice(&r);
            fresh = true;
            continue;
        }
        rho_prev = rho;
    }

    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: residual / b_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_spd_system() {
        // 1D Laplacian with Dirichlet ends.
        let n = 40;
        let mut b = CsrBuilder::new(n);
        for i in 0..n {
            if i == 0 || i == n - 1 {
                b.add(i, i, 1.0);
            } else {
                b.add(i, i, 2.0);
                b.add(i, i - 1, -1.0);
                b.add(i, i + 1, -1.0);
            }
        }
        let a = b.build();
        let mut rhs = vec![0.0; n];
        for (i, r) in rhs.iter_mut().enumerate().take(n - 1).skip(1) {
            *r = (i as f64) / (n as f64);
        }
        let (x, stats) = bicgstab(&a, &rhs, 1e-12, 10_000).unwrap();
        assert!(stats.converged);
        let mut ax = vec![0.0; n];
        a.matvec(&x, &mut ax);
        let err: f64 = ax
            .iter()
            .zip(rhs.iter())
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "residual {err}");
    }

    #[test]
    fn duplicate_entries_are_summed() {
        let mut b = CsrBuilder::new(2);
        b.add(0, 0, 1.0);
        b.add(0, 0, 2.0);
        b.add(0, 1, 0.5);
        b.add(1, 1, 1.0);
        let a = b.build();
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(0, 1), 0.5);
        assert_eq!(a.get(1, 0), 0.0);
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let mut b = CsrBuilder::new(3);
        for i in 0..3 {
            b.add(i, i, 2.0);
        }
        let (x, stats) = bicgstab(&b.build(), &[0.0, 0.0, 0.0], 1e-10, 10).unwrap();
        assert!(stats.converged);
        assert_eq!(x, vec![0.0, 0.0, 0.0]);
    }
}

//! Symmetric sparse matrices, bottom eigenpairs and SPD solves.
//!
//! Tridiagonal matrices (radial chains) use Sturm bisection and LDL^T.
//! Small matrices go to a dense solver, large ones to shift-invert Lanczos
//! over Jacobi-preconditioned conjugate gradients.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub const DENSE_LIMIT: usize = 512;
pub const EIGEN_TOL: f64 = 1e-10;
pub const SOLVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SparseSym {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSym {
    /// Rows with column/value pairs; both triangles must be present.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        SparseSym { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().filter(|(j, _)| *j == i).map(|(_, v)| v).sum())
            .collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `diag(s) A diag(s)`.
    pub fn scaled(&self, s: &[f64]) -> SparseSym {
        SparseSym {
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| r.iter().map(|&(j, v)| (j, s[i] * v * s[j])).collect())
                .collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                a[(i, j)] += v;
            }
        }
        a
    }

    /// Diagonal and sub-diagonal when the matrix is tridiagonal.
    pub fn tridiagonal(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = self.dim();
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n.saturating_sub(1)];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                if j == i {
                    d[i] += v;
                } else if j == i + 1 {
                    e[i] += v;
                } else if j + 1 != i {
                    return None;
                }
            }
        }
        Some((d, e))
    }

    fn max_abs(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter().map(|(_, v)| v.abs()))
            .fold(0.0, f64::max)
    }
}

/// Smallest eigenvalue and a unit eigenvector, sign fixed so that the
/// largest-magnitude entry is positive.
pub fn smallest_eigenpair(a: &SparseSym) -> Result<(f64, Vec<f64>)> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::EmptyDomain);
    }
    let (lambda, mut v) = if let Some((d, e)) = a.tridiagonal() {
        tridiagonal_bottom(&d, &e)?
    } else if n <= DENSE_LIMIT {
        dense_bottom(a)
    } else {
        lanczos_bottom(a)?
    };
    fix_sign(&mut v);
    Ok((lambda, v))
}

fn fix_sign(v: &mut [f64]) {
    let (mut best, mut sign) = (0.0, 1.0);
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Full spectrum of a small symmetric matrix, ascending.
pub fn dense_spectrum(a: &SparseSym) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(a.to_dense()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn dense_bottom(a: &SparseSym) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(a.to_dense());
    let k = eig.eigenvalues.imin();
    (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect())
}

/// Number of eigenvalues of the tridiagonal matrix below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    let tiny = f64::MIN_POSITIVE.sqrt();
    for i in 0..d.len() {
        if i > 0 {
            let denom = if q == 0.0 { tiny } else { q };
            q = d[i] - x - e[i - 1] * e[i - 1] / denom;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn tridiagonal_bottom(d: &[f64], e: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = d.len();
    let radius = |i: usize| {
        let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { e[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..n).map(|i| d[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| d[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 4.0 * f64::EPSILON * scale || mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    // Inverse iteration slightly below the eigenvalue keeps the shifted
    // matrix positive definite.
    let shift = lambda - 1e-10 * scale;
    let shifted: Vec<f64> = d.iter().map(|x| x - shift).collect();
    let mut v = vec![1.0; n];
    normalize(&mut v);
    for _ in 0..4 {
        v = thomas(&shifted, e, &v)?;
        if normalize(&mut v) == 0.0 || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonConvergence("inverse iteration".into()));
        }
    }
    Ok((lambda, v))
}

/// Solves a symmetric tridiagonal system by LDL^T elimination.
pub fn thomas(d: &[f64], e: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    let mut diag = vec![0.0; n];
    let mut y = vec![0.0; n];
    diag[0] = d[0];
    y[0] = b[0];
    for i in 1..n {
        if diag[i - 1] == 0.0 {
            return Err(Error::NonConvergence("singular tridiagonal system".into()));
        }
        let l = e[i - 1] / diag[i - 1];
        diag[i] = d[i] - l * e[i - 1];
        y[i] = b[i] - l * y[i - 1];
    }
    if diag[n - 1] == 0.0 {
        return Err(Error::NonConvergence("singular tridiagonal system".into()));
    }
    let mut x = vec![0.0; n];
    x[n - 1] = y[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (y[i] - e[i] * x[i + 1]) / diag[i];
    }
    Ok(x)
}

/// Solves `A x = b` for symmetric positive definite `A`.
pub fn solve_spd(a: &SparseSym, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::EmptyDomain);
    }
    if let Some((d, e)) = a.tridiagonal() {
        return thomas(&d, &e, b);
    }
    if n <= DENSE_LIMIT {
        let chol = a
            .to_dense()
            .cholesky()
            .ok_or_else(|| Error::NonConvergence("matrix is not positive definite".into()))?;
        return Ok(chol.solve(&DVector::from_column_slice(b)).iter().copied().collect());
    }
    conjugate_gradient(a, b, SOLVE_TOL, 20 * n + 100)
}

/// Jacobi-preconditioned conjugate gradients; stops on relative residual.
pub fn conjugate_gradient(a: &SparseSym, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = a.dim();
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let b_norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for _ in 0..max_iter {
        let ap = a.matvec(&p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::NonConvergence("matrix is not positive definite".into()));
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        if r.iter().map(|x| x * x).sum::<f64>().sqrt() <= tol * b_norm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NonConvergence(format!(
        "conjugate gradients exceeded {max_iter} iterations"
    )))
}

/// Shift-invert Lanczos with full reorthogonalization, started from the
/// all-ones vector.
fn lanczos_bottom(a: &SparseSym) -> Result<(f64, Vec<f64>)> {
    let n = a.dim();
    let shift = 1e-3 * a.max_abs();
    let shifted = SparseSym {
        rows: a
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut r = r.clone();
                r.push((i, shift));
                r
            })
            .collect(),
    };
    let cap = (10 * n).min(400);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut q = vec![1.0; n];
    normalize(&mut q);
    let mut last = f64::NAN;
    for k in 0..cap {
        basis.push(q.clone());
        let mut w = conjugate_gradient(&shifted, &q, 1e-14, 20 * n + 100)?;
        let alpha: f64 = w.iter().zip(&q).map(|(a, b)| a * b).sum();
        alphas.push(alpha);
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = w.iter().zip(b).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(b).for_each(|(w, b)| *w -= c * b);
            }
        }
        let beta = normalize(&mut w);
        let (theta, s) = ritz_top(&alphas, &betas);
        let converged = (beta * s[k]).abs() <= 1e-13 * theta.abs();
        let stalled = (theta - last).abs() <= 1e-15 * theta.abs() && k > 10;
        if converged || stalled || beta <= 1e-300 || k + 1 == n {
            let mut v = vec![0.0; n];
            for (coef, b) in s.iter().zip(&basis) {
                v.iter_mut().zip(b).for_each(|(v, b)| *v += coef * b);
            }
            normalize(&mut v);
            let av = a.matvec(&v);
            let lambda: f64 = av.iter().zip(&v).map(|(a, b)| a * b).sum();
            let residual = av
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt();
            if residual <= EIGEN_TOL.sqrt() * a.max_abs() {
                return Ok((lambda, v));
            }
        }
        last = theta;
        betas.push(beta);
        q = w;
    }
    Err(Error::NonConvergence(format!(
        "Lanczos iteration exceeded {cap} steps"
    )))
}

/// Largest Ritz value of the Lanczos tridiagonal and its coefficients.
fn ritz_top(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let k = alphas.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let j = eig.eigenvalues.imax();
    (eig.eigenvalues[j], eig.eigenvectors.column(j).iter().copied().collect())
}

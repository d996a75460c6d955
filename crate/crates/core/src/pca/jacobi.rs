//! Cyclic Jacobi eigensolver for small symmetric matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm at which the iteration stops, relative to
/// `max(1, ‖A‖_F)`.
pub const JACOBI_TOLERANCE: f64 = 1e-12;

/// Allowed asymmetry, relative to `max(1, max|aᵢⱼ|)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix in canonical order.
///
/// Eigenvalues descend. Within a cluster of equal eigenvalues (relative gap
/// below 1e−10) vectors are ordered by the index of their largest-magnitude
/// entry, ascending. Each vector's largest-magnitude entry is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns.
    pub vectors: DMatrix<f64>,
}

pub fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "{}x{} matrix is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "matrix has non-finite entries".into(),
        ));
    }
    let scale = m.amax().max(1.0);
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOLERANCE * scale {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen> {
    check_symmetric(m)?;
    let n = m.nrows();
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let stop = JACOBI_TOLERANCE * a.norm().max(1.0);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) >= stop {
        return Err(Error::NoConvergence(format!(
            "Jacobi sweeps left off-diagonal norm {:e}",
            off_diagonal_norm(&a)
        )));
    }

    let values: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    Ok(canonical_order(values, v))
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

// Annihilates a[p][q] with a plane rotation, accumulating it into v.
fn rotate(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.nrows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn dominant_index(col: nalgebra::DVectorView<'_, f64>) -> usize {
    // first index attaining the maximum magnitude
    let mut best = 0;
    for i in 1..col.len() {
        if col[i].abs() > col[best].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    best
}

fn canonical_order(values: Vec<f64>, vectors: DMatrix<f64>) -> SymmetricEigen {
    let n = values.len();
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let tie = 1e-10 * scale;
    let dominant: Vec<usize> = (0..n).map(|j| dominant_index(vectors.column(j))).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    // reorder clusters of tied eigenvalues by dominant coordinate
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[start]] - values[order[end]] <= tie {
            end += 1;
        }
        order[start..end].sort_by_key(|&j| (dominant[j], j));
        start = end;
    }

    let mut out = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vectors.column(src).into_owned();
        if col[dominant[src]] < 0.0 {
            col.neg_mut();
        }
        out.set_column(dst, &col);
    }
    SymmetricEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: out,
    }
}

//! Dense linear algebra for small matrices.
//!
//! Everything in this toolkit runs on matrices whose dimensions are on the
//! order of the problem dimension `n` (a handful at most), so plain dense
//! algorithms are used throughout: Householder QR for least squares and
//! square solves, cyclic Jacobi rotations for symmetric eigenvalues, and
//! one-sided Jacobi for singular values. One-sided Jacobi computes small
//! singular values with absolute error on the order of machine epsilon times
//! the largest singular value, which is what the rank threshold
//! `sigma_rel * max(σ_max, 1)` needs to be meaningful.

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from row slices. All rows must share a length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    /// Build from column slices.
    pub fn from_cols(cols: &[Vec<f64>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Mat::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for i in 0..r {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `self' * H * self` for symmetric `H`; used to restrict a Hessian to a
    /// subspace spanned by the columns of `self`.
    pub fn congruence(&self, h: &Mat) -> Mat {
        self.transpose().matmul(&h.matmul(self))
    }

    /// Largest absolute off-diagonal asymmetry, for sanity checks.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Householder QR of an `m x n` matrix with `m >= n`.
///
/// Stored in compact form: reflectors in the lower trapezoid of `a`, the
/// triangle of `R` above, and the reflector head coefficients in `beta`.
pub struct Qr {
    a: Mat,
    beta: Vec<f64>,
    rdiag: Vec<f64>,
}

impl Qr {
    pub fn new(a: &Mat) -> Qr {
        let (m, n) = (a.rows(), a.cols());
        assert!(m >= n, "QR requires rows >= cols, got {m}x{n}");
        let mut a = a.clone();
        let mut beta = vec![0.0; n];
        let mut rdiag = vec![0.0; n];
        for k in 0..n {
            // Householder vector for column k.
            let mut norm = 0.0;
            for i in k..m {
                norm = f64::hypot(norm, a[(i, k)]);
            }
            if norm == 0.0 {
                rdiag[k] = 0.0;
                continue;
            }
            let alpha = if a[(k, k)] >= 0.0 { -norm } else { norm };
            // v = x - alpha*e1, stored in place with v[k] implicit.
            let vkk = a[(k, k)] - alpha;
            a[(k, k)] = vkk;
            let vtv = vkk * vkk
                + (k + 1..m).map(|i| a[(i, k)] * a[(i, k)]).sum::<f64>();
            beta[k] = if vtv == 0.0 { 0.0 } else { 2.0 / vtv };
            rdiag[k] = alpha;
            // Apply to the remaining columns.
            for j in k + 1..n {
                let mut s = 0.0;
                for i in k..m {
                    s += a[(i, k)] * a[(i, j)];
                }
                s *= beta[k];
                for i in k..m {
                    a[(i, j)] -= s * a[(i, k)];
                }
            }
        }
        Qr { a, beta, rdiag }
    }

    /// `|R_kk|` values; their decay signals rank deficiency.
    pub fn rdiag_abs(&self) -> Vec<f64> {
        self.rdiag.iter().map(|d| d.abs()).collect()
    }

    /// Least-squares solve `min |A x - b|`. Returns `None` when an exact
    /// zero pivot appears (structurally rank-deficient input).
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let (m, n) = (self.a.rows(), self.a.cols());
        assert_eq!(b.len(), m);
        let mut y = b.to_vec();
        // y <- Q' b
        for k in 0..n {
            if self.beta[k] == 0.0 {
                continue;
            }
            let mut s = 0.0;
            for i in k..m {
                s += self.a[(i, k)] * y[i];
            }
            s *= self.beta[k];
            for i in k..m {
                y[i] -= s * self.a[(i, k)];
            }
        }
        // Back substitution on R.
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let mut s = y[k];
            for j in k + 1..n {
                s -= self.a[(k, j)] * x[j];
            }
            if self.rdiag[k] == 0.0 {
                return None;
            }
            x[k] = s / self.rdiag[k];
        }
        Some(x)
    }

    /// Apply the full `Q` to a length-`m` vector.
    fn apply_q(&self, e: &[f64]) -> Vec<f64> {
        let (m, n) = (self.a.rows(), self.a.cols());
        let mut y = e.to_vec();
        // Q = H_0 H_1 ... H_{n-1}; apply in reverse for Q e.
        for k in (0..n).rev() {
            if self.beta[k] == 0.0 {
                continue;
            }
            let mut s = 0.0;
            for i in k..m {
                s += self.a[(i, k)] * y[i];
            }
            s *= self.beta[k];
            for i in k..m {
                y[i] -= s * self.a[(i, k)];
            }
        }
        y
    }
}

/// Solve the square system `A x = b` by QR. `None` only on an exact zero
/// pivot; ill-conditioned systems return their (possibly inaccurate)
/// solution and the caller's iteration decides whether the step helped.
/// Newton correctors near degenerate parameters depend on this leniency.
pub fn solve_square(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    let x = Qr::new(a).solve(b)?;
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi
/// rotations. Returns eigenvalues in ascending order with matching
/// eigenvector columns.
pub fn sym_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut a = a.clone();
    // Symmetrize against roundoff in the caller's assembly.
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
    let mut v = Mat::identity(n);
    if n > 1 {
        for _sweep in 0..64 {
            let mut off = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
            let scale: f64 = (0..n).map(|i| a[(i, i)].abs()).fold(off.sqrt(), f64::max);
            if off.sqrt() <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (1.0 + theta * theta).sqrt())
                    } else {
                        1.0 / (theta - (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
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
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let vals = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vecs = Mat::zeros(n, n);
    for (jnew, &jold) in order.iter().enumerate() {
        for i in 0..n {
            vecs[(i, jnew)] = v[(i, jold)];
        }
    }
    (vals, vecs)
}

/// Singular values of `a` plus an orthonormal basis of its row space,
/// by one-sided Jacobi applied to the columns of `a'`.
pub struct RowSpaceSvd {
    /// Singular values in descending order.
    pub sigma: Vec<f64>,
    /// Columns are an orthonormal basis of the row space of `a`, one per
    /// singular value above the threshold passed to [`row_space_svd`].
    pub basis: Mat,
}

/// One-sided Jacobi SVD of the rows of `a` (an `r x n` matrix). Columns of
/// `basis` span the row space; `sigma` has length `r`.
pub fn row_space_svd(a: &Mat, sigma_tol: f64) -> RowSpaceSvd {
    let r = a.rows();
    let n = a.cols();
    // b holds the rows of `a` as columns (n x r); rotations orthogonalize
    // the columns in place.
    let mut b = a.transpose();
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..r {
            for q in p + 1..r {
                let bp = b.col(p);
                let bq = b.col(q);
                let alpha = dot(&bp, &bp);
                let betaq = dot(&bq, &bq);
                let gamma = dot(&bp, &bq);
                if gamma.abs() <= f64::EPSILON * (alpha * betaq).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (betaq - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let vp = b[(i, p)];
                    let vq = b[(i, q)];
                    b[(i, p)] = c * vp - s * vq;
                    b[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut cols: Vec<(f64, Vec<f64>)> =
        (0..r).map(|j| (norm2(&b.col(j)), b.col(j))).collect();
    cols.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let sigma: Vec<f64> = cols.iter().map(|(s, _)| *s).collect();
    let kept: Vec<Vec<f64>> = cols
        .iter()
        .filter(|(s, _)| *s > sigma_tol)
        .map(|(s, c)| c.iter().map(|v| v / s).collect())
        .collect();
    RowSpaceSvd { sigma, basis: Mat::from_cols(&kept) }
}

/// Orthonormal basis of the null space of `a` (`r x n`), together with the
/// numerical rank at threshold `sigma_tol` and the singular values.
pub struct NullSpace {
    pub rank: usize,
    pub sigma: Vec<f64>,
    /// `n x (n - rank)` matrix with orthonormal columns; `a * basis ≈ 0`.
    pub basis: Mat,
}

pub fn null_space(a: &Mat, sigma_tol: f64) -> NullSpace {
    let n = a.cols();
    let svd = row_space_svd(a, sigma_tol);
    let rank = svd.basis.cols();
    if rank == 0 {
        return NullSpace { rank, sigma: svd.sigma, basis: Mat::identity(n) };
    }
    if rank == n {
        return NullSpace { rank, sigma: svd.sigma, basis: Mat::zeros(n, 0) };
    }
    // Complete the row-space basis to an orthonormal basis of R^n: the
    // trailing columns of Q from a QR of the row-space basis are the
    // complement.
    let qr = Qr::new(&svd.basis);
    let mut cols = Vec::with_capacity(n - rank);
    for k in rank..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        cols.push(qr.apply_q(&e));
    }
    NullSpace { rank, sigma: svd.sigma, basis: Mat::from_cols(&cols) }
}

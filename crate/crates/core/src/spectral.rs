//! Exact integer/rational verification of the `K_{k+1}` matrix results
//! behind the Gaussian analysis: adjacency, incidence, line-graph and
//! `M = (k-2)I - L` spectra, the grand sum of `M^{-1}`, and the
//! determinant product identity.
//!
//! No floating point anywhere: eigenvalue claims are certified by
//! annihilating polynomials plus trace equations, determinants by
//! fraction-free (Bareiss) elimination, linear solves by rational
//! Gaussian elimination.

use crate::crystal::edge_list;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Dense integer matrix, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// `self + c * I`.
    pub fn plus_scalar_identity(&self, c: i64) -> IntMatrix {
        assert_eq!(self.rows, self.cols);
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] += c;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn trace(&self) -> i64 {
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Exact determinant by fraction-free Bareiss elimination.
    pub fn det_bareiss(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from(self[(i, j)])).collect())
            .collect();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for p in 0..n {
            if a[p][p].is_zero() {
                let Some(swap) = (p + 1..n).find(|&r| !a[r][p].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(p, swap);
                sign = -sign;
            }
            for i in (p + 1)..n {
                for j in (p + 1)..n {
                    let num = &a[p][p] * &a[i][j] - &a[i][p] * &a[p][j];
                    a[i][j] = num / &prev; // exact by Bareiss
                }
                a[i][p] = BigInt::zero();
            }
            prev = a[p][p].clone();
        }
        if sign < 0 {
            -a[n - 1][n - 1].clone()
        } else {
            a[n - 1][n - 1].clone()
        }
    }

    /// Solves `self * x = rhs` exactly over the rationals.
    pub fn solve(&self, rhs: &[i64]) -> Result<Vec<BigRational>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(rhs.len(), self.rows);
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BigRational::from(BigInt::from(self[(i, j)])))
                    .chain(std::iter::once(BigRational::from(BigInt::from(rhs[i]))))
                    .collect()
            })
            .collect();
        for p in 0..n {
            let Some(pivot) = (p..n).find(|&r| !a[r][p].is_zero()) else {
                return Err(Error::Verification("singular matrix in exact solve".into()));
            };
            a.swap(p, pivot);
            let inv = a[p][p].recip();
            for j in p..=n {
                a[p][j] = &a[p][j] * &inv;
            }
            for i in 0..n {
                if i != p && !a[i][p].is_zero() {
                    let f = a[i][p].clone();
                    for j in p..=n {
                        let sub = &f * &a[p][j];
                        a[i][j] = &a[i][j] - sub;
                    }
                }
            }
        }
        Ok((0..n).map(|i| a[i][n].clone()).collect())
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// The four matrices attached to `K_{k+1}`.
#[derive(Debug, Clone)]
pub struct GraphMatrices {
    pub k: usize,
    /// Adjacency of `K_{k+1}`, `(k+1) x (k+1)`.
    pub a: IntMatrix,
    /// Incidence matrix, `(k+1) x E`, columns in normative edge order.
    pub b: IntMatrix,
    /// Line-graph adjacency, `E x E`.
    pub l: IntMatrix,
    /// `(k-2) I - L`.
    pub m: IntMatrix,
}

/// Number of edges of `K_{k+1}`.
pub fn edge_count(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Builds A, B, L, M for `K_{k+1}` and asserts the product identities
/// `B B^T = kI + A` and `B^T B = 2I + L`.
pub fn build_matrices(k: usize) -> Result<GraphMatrices> {
    if k < 2 {
        return Err(Error::Domain(format!("spectral checks require k >= 2, got {k}")));
    }
    let v = k + 1;
    let edges = edge_list(k);
    let e = edges.len();

    let mut a = IntMatrix::zeros(v, v);
    for i in 0..v {
        for j in 0..v {
            if i != j {
                a[(i, j)] = 1;
            }
        }
    }

    let mut b = IntMatrix::zeros(v, e);
    for (col, &(i, j)) in edges.iter().enumerate() {
        b[(i, col)] = 1;
        b[(j, col)] = 1;
    }

    let mut l = IntMatrix::zeros(e, e);
    for (c1, &(i1, j1)) in edges.iter().enumerate() {
        for (c2, &(i2, j2)) in edges.iter().enumerate() {
            if c1 != c2 && (i1 == i2 || i1 == j2 || j1 == i2 || j1 == j2) {
                l[(c1, c2)] = 1;
            }
        }
    }

    let mut m = IntMatrix::zeros(e, e);
    for i in 0..e {
        for j in 0..e {
            m[(i, j)] = -l[(i, j)];
        }
        m[(i, i)] += k as i64 - 2;
    }

    let bbt = b.mul(&b.transpose());
    if bbt != a.plus_scalar_identity(k as i64) {
        return Err(Error::Verification("B B^T != kI + A".into()));
    }
    let btb = b.transpose().mul(&b);
    if btb != l.plus_scalar_identity(2) {
        return Err(Error::Verification("B^T B != 2I + L".into()));
    }

    Ok(GraphMatrices { k, a, b, l, m })
}

/// Exact certificate for a claimed integer spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumReport {
    pub matrix_name: String,
    /// Claimed (eigenvalue, multiplicity) pairs; zero multiplicities are
    /// dropped.
    pub eigenvalues: Vec<(i64, usize)>,
    pub verified: bool,
    pub certificate: String,
}

/// Certifies that `mat` has exactly the claimed integer spectrum:
/// the annihilating polynomial `prod (mat - lambda I)` vanishes, the
/// multiplicities cover the dimension, and the power-sum (trace) checks
/// `tr(mat^p) = sum m_i lambda_i^p` hold for p = 1..#eigenvalues-1.
fn certify(name: &str, mat: &IntMatrix, claimed: &[(i64, usize)]) -> SpectrumReport {
    let claimed: Vec<(i64, usize)> = claimed.iter().copied().filter(|&(_, m)| m > 0).collect();
    let dim = mat.rows;
    let mut checks = Vec::new();
    let mut ok = true;

    let mut annihilator = IntMatrix::identity(dim);
    for &(lambda, _) in &claimed {
        annihilator = annihilator.mul(&mat.plus_scalar_identity(-lambda));
    }
    let ann_ok = annihilator.is_zero();
    ok &= ann_ok;
    checks.push(format!(
        "annihilating polynomial prod(X - lambda_i) = 0: {}",
        if ann_ok { "ok" } else { "FAILED" }
    ));

    let mult_sum: usize = claimed.iter().map(|&(_, m)| m).sum();
    let dim_ok = mult_sum == dim;
    ok &= dim_ok;
    checks.push(format!(
        "multiplicities sum to dimension {dim}: {}",
        if dim_ok { "ok" } else { "FAILED" }
    ));

    // With distinct roots, traces of the first #roots-1 powers pin the
    // multiplicities (Vandermonde).
    let mut power = mat.clone();
    for p in 1..claimed.len().max(2) {
        let lhs = power.trace() as i128;
        let rhs: i128 = claimed
            .iter()
            .map(|&(l, m)| (m as i128) * (l as i128).pow(p as u32))
            .sum();
        let t_ok = lhs == rhs;
        ok &= t_ok;
        checks.push(format!(
            "tr(X^{p}) = {rhs}: {}",
            if t_ok { "ok" } else { "FAILED" }
        ));
        if p + 1 < claimed.len().max(2) {
            power = power.mul(mat);
        }
    }

    SpectrumReport {
        matrix_name: name.to_string(),
        eigenvalues: claimed,
        verified: ok,
        certificate: checks.join("; "),
    }
}

/// Adjacency spectrum: `k` once, `-1` with multiplicity `k`.
pub fn verify_spectrum_a(k: usize) -> Result<SpectrumReport> {
    let g = build_matrices(k)?;
    Ok(certify("A", &g.a, &[(k as i64, 1), (-1, k)]))
}

/// `B B^T` spectrum: `2k` once, `k-1` with multiplicity `k`.
pub fn verify_spectrum_bbt(k: usize) -> Result<SpectrumReport> {
    let g = build_matrices(k)?;
    let bbt = g.b.mul(&g.b.transpose());
    Ok(certify("BB^T", &bbt, &[(2 * k as i64, 1), (k as i64 - 1, k)]))
}

/// Line-graph spectrum: `2(k-1)` once, `k-3` with multiplicity `k`,
/// `-2` with multiplicity `(k+1)(k-2)/2`.
pub fn verify_spectrum_l(k: usize) -> Result<SpectrumReport> {
    let g = build_matrices(k)?;
    Ok(certify(
        "L",
        &g.l,
        &[
            (2 * (k as i64 - 1), 1),
            (k as i64 - 3, k),
            (-2, (k + 1) * (k - 2) / 2),
        ],
    ))
}

/// `M` spectrum: `-k` once, `1` with multiplicity `k`, `k` with
/// multiplicity `(k+1)(k-2)/2`.
pub fn verify_spectrum_m(k: usize) -> Result<SpectrumReport> {
    let g = build_matrices(k)?;
    Ok(certify(
        "M",
        &g.m,
        &[(-(k as i64), 1), (1, k), (k as i64, (k + 1) * (k - 2) / 2)],
    ))
}

/// Grand sum of the inverse, `j^T M^{-1} j = -(k+1)/2`.
///
/// Computed two ways: from the eigen-identity `M j = -k j` (so the value
/// is `-E/k`), and by an exact rational linear solve; the two must agree.
pub fn grand_sum_inverse(k: usize) -> Result<BigRational> {
    let g = build_matrices(k)?;
    let e = edge_count(k);

    // Route 1: verify M j = -k j entrywise.
    for i in 0..e {
        let row_sum: i64 = (0..e).map(|j| g.m[(i, j)]).sum();
        if row_sum != -(k as i64) {
            return Err(Error::Verification(format!(
                "M j != -k j at row {i}: row sum {row_sum}"
            )));
        }
    }
    let via_eigen = BigRational::new(BigInt::from(-(e as i64)), BigInt::from(k as i64));

    // Route 2: exact solve M x = j, then j^T x.
    let x = g.m.solve(&vec![1i64; e])?;
    let via_solve: BigRational = x.into_iter().sum();
    if via_solve != via_eigen {
        return Err(Error::Verification(format!(
            "grand sum mismatch: eigen route {via_eigen}, solve route {via_solve}"
        )));
    }
    Ok(via_eigen)
}

/// Exact determinant of `M`.
pub fn det_m(k: usize) -> Result<BigInt> {
    Ok(build_matrices(k)?.m.det_bareiss())
}

/// The product `j^T M^{-1} j * det M`, checked against the closed form
/// `(k+1) k^{k(k-1)/2} / 2`.
pub fn corollary_product(k: usize) -> Result<BigRational> {
    let gs = grand_sum_inverse(k)?;
    let det = det_m(k)?;
    let product = gs * BigRational::from(det);
    let closed = BigRational::new(
        BigInt::from(k as i64 + 1) * BigInt::from(k as i64).pow((k * (k - 1) / 2) as u32),
        BigInt::from(2),
    );
    if product != closed {
        return Err(Error::Verification(format!(
            "corollary product mismatch: got {product}, closed form {closed}"
        )));
    }
    Ok(product)
}

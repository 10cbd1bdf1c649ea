//! Exact counting of crystallized diagrams.
//!
//! `R_{n,k}` (crystallized diagrams on n chords with k short chords) is
//! evaluated by two independent routes:
//!
//! * [`rnk_formula`]: the composition sum `Psi_{n-k,k}` over bridge
//!   multiplicities on the edges of `K_{k+1}`;
//! * [`rnk_scalable`]: an inclusion-exclusion/convolution reformulation
//!   whose cost is polynomial in `n`, usable far beyond the composition
//!   sum (and validated against it).
//!
//! The scalable route counts, over all ways to split `2(n-k)` bubble
//! vertices into `k+1` ordered (possibly empty) groups, the perfect
//! matchings with no chord inside a group. Inclusion-exclusion over `c`
//! forced within-group chords gives
//!
//! ```text
//! R_{n,k} = sum_c (-1)^c (2N-2c-1)!! C(2N+k, 2c+k) d_c,   N = n-k,
//! ```
//!
//! where `d_c` is the number of ways to spread `c` within-group chords
//! over the groups, i.e. the (k+1)-fold convolution of `(2j-1)!!`, and
//! the binomial collapses the group-size/stars-and-bars bookkeeping.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// Edges of `K_{k+1}` in the normative lexicographic order on 0-based
/// vertex pairs `(i, j)`, `i < j`.
pub fn edge_list(k: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(k * (k + 1) / 2);
    for i in 0..=k {
        for j in (i + 1)..=k {
            edges.push((i, j));
        }
    }
    edges
}

/// Factorials 0!..=m! as big integers.
pub fn factorials(m: usize) -> Vec<BigUint> {
    let mut f = Vec::with_capacity(m + 1);
    f.push(BigUint::one());
    for i in 1..=m {
        let next = &f[i - 1] * BigUint::from(i);
        f.push(next);
    }
    f
}

/// (2m-1)!! for m = 0..=cap, with (-1)!! = 1.
fn double_factorials_odd(cap: usize) -> Vec<BigUint> {
    let mut f = Vec::with_capacity(cap + 1);
    f.push(BigUint::one());
    for m in 1..=cap {
        let next = &f[m - 1] * BigUint::from(2 * m - 1);
        f.push(next);
    }
    f
}

fn binom_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut r = BigUint::one();
    for i in 0..k.min(n - k) {
        r = r * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    r
}

/// A bridge-multiplicity assignment on the edges of `K_{k+1}`.
///
/// `p[i]` is the number of bridges on edge `i` (normative edge order);
/// `w[t]` is the resulting size of bubble `t`, the sum of `p` over the
/// edges incident to `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeWeighting {
    pub k: usize,
    pub p: Vec<u64>,
    pub w: Vec<u64>,
}

impl EdgeWeighting {
    pub fn new(k: usize, p: Vec<u64>) -> Result<Self> {
        let e = k * (k + 1) / 2;
        if p.len() != e {
            return Err(Error::Domain(format!(
                "expected {e} edge multiplicities for k = {k}, got {}",
                p.len()
            )));
        }
        let mut w = vec![0u64; k + 1];
        for (&(i, j), &pe) in edge_list(k).iter().zip(&p) {
            w[i] += pe;
            w[j] += pe;
        }
        Ok(EdgeWeighting { k, p, w })
    }

    /// The summand `w_1! ... w_{k+1}! / (p_1! ... p_E!)`.
    pub fn term(&self) -> BigUint {
        let max_w = self.w.iter().copied().max().unwrap_or(0) as usize;
        let fact = factorials(max_w);
        let mut num = BigUint::one();
        for &wi in &self.w {
            num *= &fact[wi as usize];
        }
        for &pi in &self.p {
            num /= &fact[pi as usize];
        }
        num
    }
}

/// Psi_{N,k}: the sum of `prod w_j! / prod p_i!` over all compositions of
/// `N` into the `k(k+1)/2` edge multiplicities of `K_{k+1}`.
///
/// Conventions (forced by `R_{n,n} = 1` and the `C_{n,1,q}` counting):
/// `Psi_{N,0} = [N = 0]` and `Psi_{0,k} = 1`.
pub fn psi(n_sum: usize, k: usize) -> BigUint {
    if k == 0 {
        return if n_sum == 0 { BigUint::one() } else { BigUint::zero() };
    }
    if n_sum == 0 {
        return BigUint::one();
    }
    let edges = edge_list(k);
    let fact = factorials(2 * n_sum);
    let mut w = vec![0u64; k + 1];
    let mut p = vec![0u64; edges.len()];
    let mut total = BigUint::zero();
    distribute(n_sum as u64, 0, &edges, &fact, &mut p, &mut w, &mut total);
    total
}

fn distribute(
    remaining: u64,
    edge: usize,
    edges: &[(usize, usize)],
    fact: &[BigUint],
    p: &mut [u64],
    w: &mut [u64],
    total: &mut BigUint,
) {
    if edge == edges.len() - 1 {
        let (i, j) = edges[edge];
        p[edge] = remaining;
        w[i] += remaining;
        w[j] += remaining;
        let mut term = BigUint::one();
        for &wi in w.iter() {
            term *= &fact[wi as usize];
        }
        for &pi in p.iter() {
            term /= &fact[pi as usize];
        }
        *total += term;
        w[i] -= remaining;
        w[j] -= remaining;
        p[edge] = 0;
        return;
    }
    let (i, j) = edges[edge];
    for v in 0..=remaining {
        p[edge] = v;
        w[i] += v;
        w[j] += v;
        distribute(remaining - v, edge + 1, edges, fact, p, w, total);
        w[i] -= v;
        w[j] -= v;
    }
    p[edge] = 0;
}

/// R_{n,k} via the composition sum: `Psi_{n-k,k}`.
pub fn rnk_formula(n: usize, k: usize) -> Result<BigUint> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("rnk requires 1 <= k <= n, got n={n} k={k}")));
    }
    Ok(psi(n - k, k))
}

/// C_{n,k,q} via the collapse formula:
/// `(k+1) (2n-k-q-1)!/(2n-k-2q-1)! Psi_{n-k-q, k-1}`.
pub fn cnkq_formula(n: usize, k: usize, q: usize) -> Result<BigUint> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("cnkq requires 1 <= k <= n, got n={n} k={k}")));
    }
    if n < k + q {
        return Ok(BigUint::zero()); // Psi of negative N: no such bubbles
    }
    let num_top = 2 * n - k - q - 1;
    let num_bot = 2 * n - k - 2 * q - 1;
    let mut falling = BigUint::one();
    for v in (num_bot + 1)..=num_top {
        falling *= BigUint::from(v);
    }
    Ok(BigUint::from(k as u64 + 1) * falling * psi(n - k - q, k - 1))
}

/// The size-zero-bubble identity `(k+2) R_{n,k} = C_{n+1,k+1,0}`.
pub fn remark_identity_check(n: usize, k: usize) -> Result<bool> {
    let lhs = BigUint::from(k as u64 + 2) * rnk_formula(n, k)?;
    let rhs = cnkq_formula(n + 1, k + 1, 0)?;
    Ok(lhs == rhs)
}

/// Truncated convolution `(a * b)[c] = sum_i a[i] b[c-i]`, c <= trunc.
fn conv_trunc(a: &[BigUint], b: &[BigUint], trunc: usize) -> Vec<BigUint> {
    (0..=trunc)
        .into_par_iter()
        .map(|c| {
            let mut s = BigUint::zero();
            let lo = c.saturating_sub(b.len() - 1);
            let hi = c.min(a.len() - 1);
            for i in lo..=hi {
                s += &a[i] * &b[c - i];
            }
            s
        })
        .collect()
}

/// `base^exp` under truncated convolution.
fn pow_trunc(base: &[BigUint], mut exp: usize, trunc: usize) -> Vec<BigUint> {
    let mut result = vec![BigUint::zero(); trunc + 1];
    result[0] = BigUint::one();
    let mut b = base[..base.len().min(trunc + 1)].to_vec();
    while exp > 0 {
        if exp & 1 == 1 {
            result = conv_trunc(&result, &b, trunc);
        }
        exp >>= 1;
        if exp > 0 {
            b = conv_trunc(&b, &b, trunc);
        }
    }
    result
}

fn rnk_from_power(n: usize, k: usize, d: &[BigUint], dfo: &[BigUint]) -> BigUint {
    let big_n = n - k;
    let s = 2 * big_n;
    let mut acc = BigInt::zero();
    for c in 0..=big_n {
        let term = &dfo[big_n - c] * binom_big(s + k, 2 * c + k) * &d[c];
        let term = BigInt::from(term);
        if c % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    debug_assert!(!acc.is_negative());
    acc.to_biguint().expect("alternating sum must be nonnegative")
}

/// R_{n,k} by the inclusion-exclusion/convolution route. Equal to
/// [`rnk_formula`] everywhere, but polynomial in `n`.
pub fn rnk_scalable(n: usize, k: usize) -> Result<BigUint> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("rnk requires 1 <= k <= n, got n={n} k={k}")));
    }
    let big_n = n - k;
    let dfo = double_factorials_odd(big_n);
    let d = pow_trunc(&dfo, k + 1, big_n);
    Ok(rnk_from_power(n, k, &d, &dfo))
}

/// The whole row `R_{n,1} .. R_{n,n}`, sharing the convolution powers
/// across `k`.
pub fn rnk_row_scalable(n: usize) -> Result<Vec<BigUint>> {
    if n == 0 {
        return Err(Error::Domain("rnk row requires n >= 1".into()));
    }
    let dfo = double_factorials_odd(n);
    let e: Vec<BigUint> = dfo[..n].to_vec(); // c <= n-1 suffices for k >= 1
    let mut power = e.clone(); // e^1
    let mut row = Vec::with_capacity(n);
    for k in 1..=n {
        power = conv_trunc(&power, &e, n - k); // now e^(k+1), valid to c = n-k
        row.push(rnk_from_power(n, k, &power, &dfo));
    }
    Ok(row)
}

/// Exact mean and variance of the short-chord count `k` under the
/// distribution proportional to `R_{n,k}`.
pub fn exact_k_moments(n: usize) -> Result<(BigRational, BigRational)> {
    let row = rnk_row_scalable(n)?;
    let mut total = BigInt::zero();
    let mut first = BigInt::zero();
    let mut second = BigInt::zero();
    for (i, r) in row.iter().enumerate() {
        let k = BigInt::from(i + 1);
        let r = BigInt::from(r.clone());
        total += &r;
        first += &k * &r;
        second += &k * &k * &r;
    }
    let mean = BigRational::new(first, total.clone());
    let var = BigRational::new(second, total) - &mean * &mean;
    Ok((mean, var))
}

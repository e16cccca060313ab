//! Exact integer combinatorics: Stirling numbers of the second kind,
//! negative-index poly-Bernoulli numbers, the closed-form count of bounded
//! arrangement regions, and brute-force lonesum-matrix enumeration as an
//! independent oracle.
//!
//! Everything here is exact `BigInt` arithmetic; the alternating sums cancel
//! catastrophically in floating point.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact unbounded count.
pub type BigCount = BigInt;

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

fn pow(base: usize, exp: usize) -> BigInt {
    BigInt::from(base).pow(exp as u32)
}

/// Stirling number of the second kind by the alternating-sum formula
/// `S(l,k) = (1/k!) Σ_{i=0}^{k} (-1)^{k-i} C(k,i) i^l` (with `0^0 = 1`).
pub fn stirling2(l: usize, k: usize) -> BigCount {
    let mut sum = BigInt::zero();
    for i in 0..=k {
        let term = binomial(k, i) * pow_with_zero_convention(i, l);
        if (k - i) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let mut fact = BigInt::one();
    for i in 2..=k.max(1) {
        fact *= BigInt::from(i);
    }
    // The division is exact.
    sum / fact
}

fn pow_with_zero_convention(base: usize, exp: usize) -> BigInt {
    if exp == 0 {
        BigInt::one()
    } else {
        pow(base, exp)
    }
}

/// Negative-index poly-Bernoulli number
/// `B(l,k) = Σ_{i=0}^{l} (-1)^{l-i} i! S(l,i) (i+1)^k`.
pub fn poly_bernoulli(l: usize, k: usize) -> BigCount {
    let mut sum = BigInt::zero();
    let mut fact = BigInt::one();
    for i in 0..=l {
        if i > 0 {
            fact *= BigInt::from(i);
        }
        let term = &fact * stirling2(l, i) * pow(i + 1, k);
        if (l - i) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// Root count of the bivariate multinomial missing-data score equations:
/// the number of lonesum matrices with all row and column sums positive, by
/// inclusion-exclusion over the vanishing rows and columns:
/// `ML(m,n) = Σ_k Σ_l (-1)^{k+l} C(m,k) C(n,l) B(m-k, n-l)`.
pub fn ml_degree(m: usize, n: usize) -> BigCount {
    assert!(m >= 1 && n >= 1, "table dimensions must be at least 1");
    let mut sum = BigInt::zero();
    for k in 0..=m {
        for l in 0..=n {
            let term = binomial(m, k) * binomial(n, l) * poly_bernoulli(m - k, n - l);
            if (k + l) % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
    }
    sum
}

/// Hard ceiling for the `2^{mn}` enumeration.
pub const LONESUM_ENUM_BOUND: usize = 25;

/// A matrix is lonesum iff it avoids the 2×2 identity and anti-identity
/// patterns, which is the same as its row supports forming a chain under
/// inclusion. `rows[i]` holds the bitmask of row `i`.
fn is_lonesum(rows: &[u32]) -> bool {
    for (a, &ra) in rows.iter().enumerate() {
        for &rb in &rows[a + 1..] {
            let a_not_b = ra & !rb;
            let b_not_a = rb & !ra;
            if a_not_b != 0 && b_not_a != 0 {
                return false;
            }
        }
    }
    true
}

/// Brute-force count of m×n lonesum 0/1 matrices; with
/// `require_positive_margins` only matrices without a zero row or zero
/// column are counted.
pub fn count_lonesum(m: usize, n: usize, require_positive_margins: bool) -> Result<BigCount> {
    count_lonesum_bounded(m, n, require_positive_margins, LONESUM_ENUM_BOUND)
}

/// As [`count_lonesum`] with an explicit enumeration ceiling override.
pub fn count_lonesum_bounded(
    m: usize,
    n: usize,
    require_positive_margins: bool,
    bound: usize,
) -> Result<BigCount> {
    let cells = m * n;
    if cells > bound {
        return Err(Error::SizeLimit(format!(
            "lonesum enumeration needs 2^{cells} matrices; the ceiling is 2^{bound}"
        )));
    }
    let full_col_mask: u32 = (1u32 << n) - 1;
    let mut count: u64 = 0;
    let mut rows = vec![0u32; m];
    for mask in 0u64..(1u64 << cells) {
        for (i, row) in rows.iter_mut().enumerate() {
            *row = ((mask >> (i * n)) as u32) & full_col_mask;
        }
        if require_positive_margins {
            if rows.iter().any(|r| *r == 0) {
                continue;
            }
            let col_cover = rows.iter().fold(0u32, |acc, r| acc | r);
            if col_cover != full_col_mask {
                continue;
            }
        }
        if is_lonesum(&rows) {
            count += 1;
        }
    }
    Ok(BigInt::from(count))
}

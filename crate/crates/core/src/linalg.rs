//! Exact integer linear algebra by fraction-free (Bareiss) elimination.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Square integer matrix, row-major.
pub type Matrix = Vec<Vec<BigInt>>;

/// Determinant by Bareiss elimination.
pub fn determinant(m: &Matrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Solves `m x = rhs` exactly over the rationals.
pub fn solve(m: &Matrix, rhs: &[BigInt]) -> Result<Vec<BigRational>> {
    let n = m.len();
    assert_eq!(rhs.len(), n);
    // augmented matrix, fraction-free forward elimination
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let r = (k + 1..n)
                .find(|&r| !a[r][k].is_zero())
                .ok_or(Error::Singular)?;
            a.swap(k, r);
        }
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    // back substitution over Q
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut s = BigRational::from_integer(a[i][n].clone());
        for j in i + 1..n {
            s -= BigRational::from_integer(a[i][j].clone()) * &x[j];
        }
        x[i] = s / BigRational::from_integer(a[i][i].clone());
    }
    Ok(x)
}

/// Integral solution of `m x = rhs`; fails if the rational solution is not integral.
pub fn solve_integral(m: &Matrix, rhs: &[BigInt]) -> Result<Vec<BigInt>> {
    solve(m, rhs)?
        .into_iter()
        .map(|v| {
            if v.is_integer() {
                Ok(v.to_integer())
            } else {
                Err(Error::NonIntegralSolution)
            }
        })
        .collect()
}

/// Inverse of a unimodular matrix, exact and integral.
pub fn unimodular_inverse(m: &Matrix) -> Result<Matrix> {
    let n = m.len();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::one();
        cols.push(solve_integral(m, &e)?);
    }
    Ok((0..n)
        .map(|r| (0..n).map(|c| cols[c][r].clone()).collect())
        .collect())
}

//! Exact integer determinants.
//!
//! The primary route is Bareiss fraction-free elimination. Intermediate
//! values are exact minors; they are computed in checked 128-bit arithmetic
//! with an arbitrary-precision fallback, and the final value must fit in
//! 64 bits or the computation reports overflow.

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub fn det_bareiss(m: &[Vec<i64>]) -> Result<i64> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
    }
    if n == 0 {
        return Ok(1);
    }
    match det_bareiss_i128(m, n) {
        Some(d) => i64::try_from(d).map_err(|_| Error::Overflow),
        None => det_bareiss_big(m, n),
    }
}

fn det_bareiss_i128(m: &[Vec<i64>], n: usize) -> Option<i128> {
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|row| row.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let pivot = (k + 1..n).find(|&r| a[r][k] != 0)?;
            // a zero column means determinant zero; report it as such
            a.swap(k, pivot);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t1 = a[i][j].checked_mul(a[k][k])?;
                let t2 = a[i][k].checked_mul(a[k][j])?;
                a[i][j] = t1.checked_sub(t2)? / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Some(sign * a[n - 1][n - 1])
}

fn det_bareiss_big(m: &[Vec<i64>], n: usize) -> Result<i64> {
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = 1i64;
    let mut prev = BigInt::from(1);
    let zero = BigInt::from(0);
    for k in 0..n - 1 {
        if a[k][k] == zero {
            match (k + 1..n).find(|&r| a[r][k] != zero) {
                Some(pivot) => {
                    a.swap(k, pivot);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = zero.clone();
        }
        prev = a[k][k].clone();
    }
    let d = &a[n - 1][n - 1] * BigInt::from(sign);
    i64::try_from(d).map_err(|_| Error::Overflow)
}

/// Cofactor-expansion determinant; an independent oracle for small sizes.
pub fn det_cofactor(m: &[Vec<i64>]) -> Result<i64> {
    let n = m.len();
    if n > 8 {
        return Err(Error::MalformedInput(
            "cofactor oracle limited to n <= 8".into(),
        ));
    }
    for row in m {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
    }
    let a: Vec<Vec<i128>> = m
        .iter()
        .map(|row| row.iter().map(|&x| x as i128).collect())
        .collect();
    let cols: Vec<usize> = (0..n).collect();
    let d = cofactor_rec(&a, 0, &cols).ok_or(Error::Overflow)?;
    i64::try_from(d).map_err(|_| Error::Overflow)
}

fn cofactor_rec(a: &[Vec<i128>], row: usize, cols: &[usize]) -> Option<i128> {
    if cols.is_empty() {
        return Some(1);
    }
    let mut total = 0i128;
    let mut sign = 1i128;
    for (k, &c) in cols.iter().enumerate() {
        if a[row][c] != 0 {
            let rest: Vec<usize> = cols
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &x)| x)
                .collect();
            let minor = cofactor_rec(a, row + 1, &rest)?;
            total = total.checked_add(sign.checked_mul(a[row][c].checked_mul(minor)?)?)?;
        }
        sign = -sign;
    }
    Some(total)
}

/// Integer kernel of a covector: a basis of `{ y : v . y = 0 }`, of rank
/// `n - 1` when `v` is nonzero. Obtained by unimodular column operations
/// reducing `v` to `(g, 0, ..., 0)`.
pub fn covector_kernel(v: &[i64]) -> Result<Vec<Vec<i64>>> {
    let n = v.len();
    if v.iter().all(|&x| x == 0) {
        return Err(Error::MalformedInput("zero covector has full kernel".into()));
    }
    let mut w: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    // columns of u, maintained so that v . u[k] = w[k]
    let mut u: Vec<Vec<i128>> = (0..n)
        .map(|k| {
            let mut col = vec![0i128; n];
            col[k] = 1;
            col
        })
        .collect();
    let p = w.iter().position(|&x| x != 0).unwrap();
    for j in 0..n {
        if j == p || w[j] == 0 {
            continue;
        }
        let (g, s, t) = ext_gcd(w[p], w[j]);
        let (wp, wj) = (w[p], w[j]);
        let colp = u[p].clone();
        let colj = u[j].clone();
        for i in 0..n {
            u[p][i] = s * colp[i] + t * colj[i];
            u[j][i] = -(wj / g) * colp[i] + (wp / g) * colj[i];
        }
        w[p] = g;
        w[j] = 0;
    }
    let mut basis = Vec::with_capacity(n - 1);
    for (k, col) in u.into_iter().enumerate() {
        if k == p {
            continue;
        }
        let small: Vec<i64> = col
            .iter()
            .map(|&x| i64::try_from(x).map_err(|_| Error::Overflow))
            .collect::<Result<_>>()?;
        basis.push(small);
    }
    Ok(basis)
}

/// Extended gcd: returns `(g, s, t)` with `g = s*a + t*b`, `g > 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, s, t) = ext_gcd(b, a % b);
        (g, t, s - (a / b) * t)
    }
}

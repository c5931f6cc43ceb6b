//! Exact kernel basis of a rational matrix via fraction-free elimination.
//!
//! Rows are first scaled to integers, reduced to row-echelon form with the
//! Bareiss scheme (all divisions exact), and the kernel vectors are then
//! back-substituted per free column and normalised to integer entries with
//! content 1 and a positive leading coefficient.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::network::Rational;

/// Basis of `{x : A x = 0}` for the matrix with the given rows, as
/// integer-valued rationals. One vector per free column, in column order.
pub fn rational_kernel(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| scale_to_integers(r)).collect();
    let nrows = a.len();

    // Bareiss fraction-free row echelon form, tracking pivot columns.
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        for r in row + 1..nrows {
            for c in col + 1..cols {
                let num = &a[row][col] * &a[r][c] - &a[r][col] * &a[row][c];
                a[r][c] = num / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[row][col].clone();
        pivot_cols.push(col);
        row += 1;
        if row == nrows {
            break;
        }
    }

    let rank = pivot_cols.len();
    let is_pivot = {
        let mut mask = vec![false; cols];
        for &c in &pivot_cols {
            mask[c] = true;
        }
        mask
    };

    let mut basis = Vec::with_capacity(cols - rank);
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![Rational::zero(); cols];
        x[free] = Rational::one();
        for k in (0..rank).rev() {
            let pc = pivot_cols[k];
            let mut acc = Rational::zero();
            for j in pc + 1..cols {
                if !a[k][j].is_zero() && !x[j].is_zero() {
                    acc += Rational::from_integer(a[k][j].clone()) * &x[j];
                }
            }
            x[pc] = -acc / Rational::from_integer(a[k][pc].clone());
        }
        basis.push(normalise(x));
    }
    basis
}

/// Multiply a rational row by the lcm of its denominators.
fn scale_to_integers(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    row.iter()
        .map(|r| r.numer() * (&lcm / r.denom()))
        .collect()
}

/// Integer entries, content 1, positive leading coefficient.
fn normalise(x: Vec<Rational>) -> Vec<Rational> {
    let mut ints = scale_to_integers(&x);
    let content = ints
        .iter()
        .filter(|v| !v.is_zero())
        .fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if !content.is_zero() && !content.is_one() {
        for v in &mut ints {
            *v = &*v / &content;
        }
    }
    if let Some(first) = ints.iter().find(|v| !v.is_zero()) {
        if first.is_negative() {
            for v in &mut ints {
                *v = -v.clone();
            }
        }
    }
    ints.into_iter().map(Rational::from_integer).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn kernel_of(rows: &[&[i64]], cols: usize) -> Vec<Vec<Rational>> {
        let rows: Vec<Vec<Rational>> =
            rows.iter().map(|r| r.iter().map(|&v| ratio(v)).collect()).collect();
        rational_kernel(&rows, cols)
    }

    #[test]
    fn kernel_of_reversible_pair() {
        let basis = kernel_of(&[&[-1, 1], &[1, -1]], 2);
        assert_eq!(basis, vec![vec![ratio(1), ratio(1)]]);
    }

    #[test]
    fn kernel_of_cycle() {
        let basis = kernel_of(&[&[-1, 1, 0], &[0, -1, 1], &[1, 0, -1]], 3);
        assert_eq!(basis, vec![vec![ratio(1), ratio(1), ratio(1)]]);
    }

    #[test]
    fn full_rank_matrix_has_empty_kernel() {
        assert!(kernel_of(&[&[1, 0], &[0, 1]], 2).is_empty());
    }

    #[test]
    fn zero_matrix_kernel_is_identity() {
        let basis = kernel_of(&[], 2);
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0], vec![ratio(1), ratio(0)]);
        assert_eq!(basis[1], vec![ratio(0), ratio(1)]);
    }

    #[test]
    fn normalisation_divides_content_and_fixes_sign() {
        // row 2x - 4y = 0 -> kernel (2, 1), content already 1; scale check via (-2, -1).
        let basis = kernel_of(&[&[2, -4]], 2);
        assert_eq!(basis, vec![vec![ratio(2), ratio(1)]]);
    }

    #[test]
    fn rational_entries_are_scaled_exactly() {
        // 1.5 x - y = 0 -> kernel (2, 3)
        let rows = vec![vec![Rational::new(3.into(), 2.into()), ratio(-1)]];
        let basis = rational_kernel(&rows, 2);
        assert_eq!(basis, vec![vec![ratio(2), ratio(3)]]);
    }
}

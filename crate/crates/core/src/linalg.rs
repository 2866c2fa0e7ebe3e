//! Exact dense linear algebra over the rationals.
//!
//! Solves and determinants run fraction-free (Bareiss) on integer rows
//! obtained by clearing each row's denominator LCM; pivots are chosen as the
//! first nonzero entry in column order with ties broken by lowest row index,
//! with no magnitude heuristics. Rank checks additionally have a fast
//! certified path: rank modulo a prime is a lower bound for the rational
//! rank, so a modular elimination that reaches the claimed full rank proves
//! it; anything short of that falls back to the exact elimination.

use crate::error::Error;
use crate::num::{denominator_lcm, Rational};
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Dense row-major matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: alloc::vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                *m.at_mut(i, j) = f(i, j);
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

    pub fn at(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                };
                if *self.at(i, j) != want {
                    return false;
                }
            }
        }
        true
    }

    /// First entry differing from the identity, if any: `(i, j, value)`.
    pub fn identity_defect(&self) -> Option<(usize, usize, Rational)> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                };
                if *self.at(i, j) != want {
                    return Some((i, j, self.at(i, j).clone()));
                }
            }
        }
        None
    }
}

/// Row-cleared integer copy: each row multiplied by the LCM of its
/// denominators. Row scaling preserves rank and solution sets; determinants
/// pick up the product of the scales.
fn cleared_rows(m: &Matrix, extra: Option<&Matrix>) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let ecols = extra.map_or(0, |e| e.cols);
    let mut rows = Vec::with_capacity(m.rows);
    let mut scales = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let mut refs: Vec<&Rational> = (0..m.cols).map(|j| m.at(i, j)).collect();
        if let Some(e) = extra {
            refs.extend((0..ecols).map(|j| e.at(i, j)));
        }
        let lcm = denominator_lcm(&refs);
        let row: Vec<BigInt> = refs
            .iter()
            .map(|r| r.numer() * (&lcm / r.denom()))
            .collect();
        rows.push(row);
        scales.push(lcm);
    }
    (rows, scales)
}

struct Echelon {
    rows: Vec<Vec<BigInt>>,
    /// (pivot row, pivot column) pairs in elimination order.
    pivots: Vec<(usize, usize)>,
    sign: i8,
}

/// Fraction-free Bareiss elimination over the first `main_cols` columns.
/// Pivot: first row (lowest index among unused) with a nonzero entry in the
/// current column.
fn bareiss(mut rows: Vec<Vec<BigInt>>, main_cols: usize) -> Echelon {
    let nrows = rows.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..main_cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            rows.swap(p, r);
            sign = -sign;
        }
        let width = rows[r].len();
        for i in r + 1..nrows {
            for j in c + 1..width {
                let num = &rows[r][c] * &rows[i][j] - &rows[i][c] * &rows[r][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss exact-division invariant");
                rows[i][j] = q;
            }
            rows[i][c] = BigInt::zero();
        }
        prev = rows[r][c].clone();
        pivots.push((r, c));
        r += 1;
    }
    Echelon { rows, pivots, sign }
}

/// Exact rank.
pub fn rank_exact(m: &Matrix) -> usize {
    let (rows, _) = cleared_rows(m, None);
    bareiss(rows, m.cols).pivots.len()
}

/// Exact determinant of a square matrix.
pub fn det(m: &Matrix) -> Rational {
    assert_eq!(m.rows, m.cols, "determinant of non-square matrix");
    if m.rows == 0 {
        return Rational::one();
    }
    let (rows, scales) = cleared_rows(m, None);
    let ech = bareiss(rows, m.cols);
    if ech.pivots.len() < m.rows {
        return Rational::zero();
    }
    // full rank without column skips: last pivot is det of the scaled matrix
    let (r, c) = ech.pivots[m.rows - 1];
    let mut scale = BigInt::one();
    for s in &scales {
        scale *= s;
    }
    let mut d = Rational::new(ech.rows[r][c].clone(), scale);
    if ech.sign < 0 {
        d = -d;
    }
    d
}

fn back_substitute(
    ech: &Echelon,
    main_cols: usize,
    total_cols: usize,
    require_unique: bool,
) -> Result<Matrix, Error> {
    let rank = ech.pivots.len();
    if require_unique && rank < main_cols {
        return Err(Error::SingularMatrix { rank });
    }
    // consistency: zero main-part rows must have zero augmented part
    for i in rank..ech.rows.len() {
        if ech.rows[i][main_cols..total_cols]
            .iter()
            .any(|v| !v.is_zero())
        {
            return Err(Error::InconsistentSystem);
        }
    }
    let ecols = total_cols - main_cols;
    let mut x = Matrix::zeros(main_cols, ecols);
    for &(r, c) in ech.pivots.iter().rev() {
        let piv = Rational::from_integer(ech.rows[r][c].clone());
        for rhs in 0..ecols {
            let mut acc = Rational::from_integer(ech.rows[r][main_cols + rhs].clone());
            for j in c + 1..main_cols {
                if !ech.rows[r][j].is_zero() {
                    acc -= Rational::from_integer(ech.rows[r][j].clone()) * x.at(j, rhs);
                }
            }
            *x.at_mut(c, rhs) = acc / piv.clone();
        }
    }
    Ok(x)
}

/// Exact solve `M X = RHS` for square nonsingular `M`. A singular `M` yields
/// `Error::SingularMatrix` carrying the detected rank.
pub fn solve(m: &Matrix, rhs: &Matrix) -> Result<Matrix, Error> {
    assert_eq!(m.rows, m.cols, "solve requires a square matrix");
    assert_eq!(m.rows, rhs.rows, "rhs row count mismatch");
    let (rows, _) = cleared_rows(m, Some(rhs));
    let ech = bareiss(rows, m.cols);
    back_substitute(&ech, m.cols, m.cols + rhs.cols, true)
}

/// Exact solve of a possibly singular but consistent system: returns one
/// solution (free variables set to zero), or `InconsistentSystem`.
pub fn solve_consistent(m: &Matrix, rhs: &Matrix) -> Result<Matrix, Error> {
    assert_eq!(m.rows, rhs.rows, "rhs row count mismatch");
    let (rows, _) = cleared_rows(m, Some(rhs));
    let ech = bareiss(rows, m.cols);
    back_substitute(&ech, m.cols, m.cols + rhs.cols, false)
}

/// Inverse of a square matrix.
pub fn inverse(m: &Matrix) -> Result<Matrix, Error> {
    solve(m, &Matrix::identity(m.rows))
}

// deterministic prime ladder for the modular rank lower bound
const RANK_PRIMES: [u64; 4] = [2305843009213693951, 2147483647, 1000000007, 998244353];

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

fn bigint_mod(v: &BigInt, p: u64) -> u64 {
    let m = v.mod_floor(&BigInt::from(p));
    m.to_u64().expect("mod_floor result fits u64")
}

/// Reduces the matrix mod `p`; `None` if any denominator vanishes mod `p`.
fn reduce_mod(m: &Matrix, p: u64) -> Option<Vec<Vec<u64>>> {
    let mut out = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let mut row = Vec::with_capacity(m.cols);
        for j in 0..m.cols {
            let v = m.at(i, j);
            let den = bigint_mod(v.denom(), p);
            if den == 0 {
                return None;
            }
            let num = bigint_mod(v.numer(), p);
            row.push(mulmod(num, powmod(den, p - 2, p), p));
        }
        out.push(row);
    }
    Some(out)
}

fn rank_mod(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0usize;
    for c in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(piv, rank);
        let inv = powmod(rows[rank][c], p - 2, p);
        for i in rank + 1..nrows {
            if rows[i][c] != 0 {
                let f = mulmod(rows[i][c], inv, p);
                for j in c..ncols {
                    let sub = mulmod(f, rows[rank][j], p);
                    rows[i][j] = (rows[i][j] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Lower bound for the rational rank via modular elimination over a fixed
/// prime ladder. Always `<=` the exact rank; equality is guaranteed whenever
/// the returned value equals `min(rows, cols)`.
pub fn rank_lower_bound_modp(m: &Matrix) -> usize {
    let mut best = 0usize;
    let target = m.rows.min(m.cols);
    for &p in &RANK_PRIMES {
        if let Some(rows) = reduce_mod(m, p) {
            best = best.max(rank_mod(rows, p));
            if best == target {
                return best;
            }
        }
    }
    best
}

/// Exact rank with the certified fast path: if the modular lower bound
/// already reaches the claimed value there is nothing left to prove,
/// otherwise the exact elimination decides.
pub fn rank_with_claim(m: &Matrix, claimed: usize) -> usize {
    let lb = rank_lower_bound_modp(m);
    if lb == claimed && claimed == m.rows.min(m.cols) {
        return lb;
    }
    rank_exact(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_int};

    fn mat(rows: usize, cols: usize, vals: &[i64]) -> Matrix {
        Matrix::from_fn(rows, cols, |i, j| rat_int(vals[i * cols + j]))
    }

    #[test]
    fn identity_solve() {
        let m = Matrix::identity(3);
        let x = solve(&m, &Matrix::identity(3)).unwrap();
        assert!(x.is_identity());
    }

    #[test]
    fn det_small_cases() {
        assert_eq!(det(&mat(2, 2, &[1, 1, 1, 0])), rat_int(-1));
        // Q_3(1)
        let q31 = mat(3, 3, &[-1, 1, 1, 1, -1, 1, 1, 1, -1]);
        assert_eq!(det(&q31), rat_int(4));
        // rational entries
        let m = Matrix::from_fn(2, 2, |i, j| rat((i + j) as i64 + 1, 2));
        // det [[1/2, 1], [1, 3/2]] = 3/4 - 1 = -1/4
        assert_eq!(det(&m), rat(-1, 4));
    }

    #[test]
    fn solve_q3_unique() {
        let q31 = mat(3, 3, &[-1, 1, 1, 1, -1, 1, 1, 1, -1]);
        let mut rhs = Matrix::zeros(3, 1);
        *rhs.at_mut(0, 0) = rat_int(1);
        let x = solve(&q31, &rhs).unwrap();
        // verify by substitution
        for i in 0..3 {
            let mut acc = rat_int(0);
            for j in 0..3 {
                acc += q31.at(i, j) * x.at(j, 0);
            }
            assert_eq!(acc, *rhs.at(i, 0));
        }
    }

    #[test]
    fn singular_reports_rank() {
        let ones = mat(2, 2, &[1, 1, 1, 1]);
        assert_eq!(rank_exact(&ones), 1);
        let err = solve(&ones, &Matrix::identity(2)).unwrap_err();
        assert_eq!(err, Error::SingularMatrix { rank: 1 });
    }

    #[test]
    fn consistent_singular_solve() {
        // x + y = 2 duplicated; solution with free vars zeroed: x = 2, y = 0
        let m = mat(2, 2, &[1, 1, 1, 1]);
        let rhs = mat(2, 1, &[2, 2]);
        let x = solve_consistent(&m, &rhs).unwrap();
        assert_eq!(*x.at(0, 0), rat_int(2));
        assert_eq!(*x.at(1, 0), rat_int(0));
        // inconsistent variant
        let bad = mat(2, 1, &[2, 3]);
        assert_eq!(
            solve_consistent(&m, &bad).unwrap_err(),
            Error::InconsistentSystem
        );
    }

    #[test]
    fn modp_rank_certificate() {
        let m = Matrix::from_fn(4, 4, |i, j| {
            if i == j {
                rat(1, (i + 1) as i64)
            } else {
                rat_int(0)
            }
        });
        assert_eq!(rank_lower_bound_modp(&m), 4);
        assert_eq!(rank_with_claim(&m, 4), 4);
        let ones = mat(3, 3, &[1, 1, 1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(rank_with_claim(&ones, 1), 1);
    }

    #[test]
    fn bareiss_matches_cofactor_oracle() {
        // cofactor-expansion oracle, independent of the elimination path
        fn cofactor_det(m: &Matrix) -> Rational {
            let n = m.rows();
            if n == 1 {
                return m.at(0, 0).clone();
            }
            let mut acc = rat_int(0);
            for j in 0..n {
                if m.at(0, j).is_zero() {
                    continue;
                }
                let minor = Matrix::from_fn(n - 1, n - 1, |r, c| {
                    m.at(r + 1, if c < j { c } else { c + 1 }).clone()
                });
                let term = m.at(0, j) * cofactor_det(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        let m = mat(4, 4, &[2, 0, 1, 3, -1, 4, 0, 2, 5, 1, -2, 0, 3, 3, 1, 1]);
        assert_eq!(det(&m), cofactor_det(&m));
    }
}

//! Exact scalar arithmetic: arbitrary-precision rationals and the small
//! combinatorial helpers the constructions lean on.

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// The scalar type for every construction and verification path.
///
/// `num_rational::BigRational` keeps values in lowest terms with a positive
/// denominator, which is exactly the invariant the constructions rely on.
pub type Rational = num_rational::BigRational;

/// Rational from an integer pair. Panics on zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// Binomial coefficient `C(n, k)` for signed `n >= 0`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Shifted factorial `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: i64, n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..n {
        acc *= BigInt::from(a + i as i64);
    }
    acc
}

/// `(-1)^n` as a rational.
pub fn sign_pow(n: usize) -> Rational {
    if n % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Renders a rational as `p/q` in lowest terms, or `p` when `q = 1`.
///
/// This is the lossless text form used by the mesh format, the basis tables
/// and check witnesses.
pub fn render(x: &Rational) -> alloc::string::String {
    use alloc::format;
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses the `p/q` / `p` text form produced by [`render`].
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn denominator_lcm(values: &[&Rational]) -> BigInt {
    let mut acc = BigInt::one();
    for v in values {
        acc = num_integer::lcm(acc, v.denom().clone());
    }
    acc.abs()
}

/// All multi-indices `alpha` in `N_0^len` with `|alpha| <= max_total`, in
/// lexicographic order. `len = 0` yields the single empty index.
pub fn multi_indices(len: usize, max_total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = alloc::vec![0usize; len];
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, max_total, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(2, 1), BigInt::from(2));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
    }

    #[test]
    fn render_roundtrip() {
        for (n, d) in [(1i64, 2i64), (-3, 7), (5, 1), (0, 3), (-4, 2)] {
            let x = rat(n, d);
            assert_eq!(parse_rational(&render(&x)).unwrap(), x);
        }
        assert_eq!(render(&rat(-4, 2)), "-2");
        assert!(parse_rational("1/0").is_none());
    }

    #[test]
    fn multi_index_counts() {
        // |N^l_{<= m}| = C(m + l, l)
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(multi_indices(3, 4).len(), 35);
        assert_eq!(multi_indices(0, 3), alloc::vec![Vec::<usize>::new()]);
        // lexicographic ordering
        let idx = multi_indices(2, 1);
        assert_eq!(
            idx,
            alloc::vec![
                alloc::vec![0, 0],
                alloc::vec![0, 1],
                alloc::vec![1, 0]
            ]
        );
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(3, 0), BigInt::one());
        assert_eq!(pochhammer(2, 3), BigInt::from(24));
    }
}

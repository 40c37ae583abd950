//! Integer and rational helpers shared by every module.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout.
pub type Rat = Ratio<i128>;

pub fn rat(n: i128, d: i128) -> Rat {
    Rat::new(n, d)
}

pub fn int(n: i128) -> Rat {
    Rat::from_integer(n)
}

/// Returns `(g, u, v)` with `u*a + v*b = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn gcd(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

pub fn lcm(a: i128, b: i128) -> i128 {
    if a == 0 || b == 0 {
        return 0;
    }
    a.lcm(&b)
}

/// Floor of a rational as an integer.
pub fn floor(q: &Rat) -> i128 {
    q.numer().div_floor(q.denom())
}

/// Representative of `q` modulo `m` in `[0, m)` for rational `q` and positive rational `m`.
pub fn rem_floor(q: &Rat, m: &Rat) -> Rat {
    let k = floor(&(q / m));
    q - m * int(k)
}

/// Modular inverse of `a` mod `m`, if it exists.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (g, u, _) = ext_gcd(a.rem_euclid(m), m);
    if g == 1 {
        Some(u.rem_euclid(m))
    } else {
        None
    }
}

pub fn isqrt(n: i128) -> i128 {
    if n < 0 {
        panic!("isqrt of negative {n}");
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: i128) -> Vec<(i128, u32)> {
    assert!(n >= 1, "factorize needs a positive integer");
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: i128) -> bool {
    n >= 2 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

pub fn is_squarefree(n: i128) -> bool {
    n != 0 && factorize(n.abs()).iter().all(|&(_, e)| e == 1)
}

/// Kronecker symbol `(a / n)` for `n >= 1`.
pub fn kronecker(a: i128, n: i128) -> i32 {
    assert!(n >= 1);
    let mut result = 1i32;
    let mut n = n;
    let mut a = a;
    while n % 2 == 0 {
        n /= 2;
        if a % 2 == 0 {
            return 0;
        }
        let r = a.rem_euclid(8);
        if r == 3 || r == 5 {
            result = -result;
        }
    }
    // Jacobi symbol for odd n.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Euler totient.
pub fn totient(n: i128) -> i128 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Integer power of a rational, negative exponents allowed.
pub fn rat_pow(q: &Rat, e: i64) -> Rat {
    if e >= 0 {
        num_traits::pow(*q, e as usize)
    } else {
        num_traits::pow(q.recip(), (-e) as usize)
    }
}

/// Lowest common denominator of a list of rationals.
pub fn common_denom<'a>(qs: impl IntoIterator<Item = &'a Rat>) -> i128 {
    qs.into_iter().fold(1, |acc, q| lcm(acc, *q.denom()))
}

pub fn rat_to_f64(q: &Rat) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().ok()?;
            let d: i128 = d.trim().parse().ok()?;
            if d == 0 {
                None
            } else {
                Some(rat(n, d))
            }
        }
        None => s.parse::<i128>().ok().map(int),
    }
}

/// `"p/q"` for non-integers, `"p"` otherwise.
pub fn fmt_rat(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn abs_rat(q: &Rat) -> Rat {
    q.abs()
}

pub fn is_one(q: &Rat) -> bool {
    q.is_one()
}

pub fn is_zero(q: &Rat) -> bool {
    q.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_small_table() {
        // Brute force Legendre symbols against Euler's criterion.
        for p in [3i128, 5, 7, 11, 13] {
            for a in -20..20 {
                let e = (0..p).any(|x| (x * x - a).rem_euclid(p) == 0);
                let expect = if a.rem_euclid(p) == 0 {
                    0
                } else if e {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a, p), expect, "a={a} p={p}");
            }
        }
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-15, 2), 1);
        assert_eq!(kronecker(8, 2), 0);
    }

    #[test]
    fn ext_gcd_identity() {
        for a in -30..30 {
            for b in -30..30 {
                let (g, u, v) = ext_gcd(a, b);
                assert_eq!(u * a + v * b, g);
                assert_eq!(g, gcd(a, b));
            }
        }
    }

    #[test]
    fn factorize_roundtrip() {
        for n in 1..500 {
            let f = factorize(n);
            let back: i128 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
        }
        assert!(is_squarefree(-15));
        assert!(!is_squarefree(12));
        assert_eq!(totient(24), 8);
    }

    #[test]
    fn rat_parsing() {
        assert_eq!(parse_rat("205/144"), Some(rat(205, 144)));
        assert_eq!(fmt_rat(&rat(6, 3)), "2");
        assert_eq!(rem_floor(&rat(-1, 2), &int(1)), rat(1, 2));
    }
}

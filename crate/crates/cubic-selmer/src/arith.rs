//! Rational-integer helpers: primality, factorisation, valuations and local squares.
//!
//! Factorisation strips primes below [`TRIAL_BOUND`] and then runs Pollard rho. It succeeds
//! when every prime factor fits in a `u64` and the cofactor left after trial division is
//! below `2^128`; other inputs are reported as [`Error::LimitExceeded`].

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    primal_check::miller_rabin(n)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let step = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = step(x);
            y = step(step(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn collect_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    collect_factors(d, out);
    collect_factors(n / d, out);
}

fn group_primes(mut primes: Vec<u64>) -> Vec<(u64, u32)> {
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Prime factorisation of a positive integer as sorted `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "cannot factor zero");
    let mut primes = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while n % p == 0 {
            primes.push(p);
            n /= p;
        }
    }
    collect_factors(n, &mut primes);
    group_primes(primes)
}

/// Trial division bound used by [`factor`] before Pollard rho.
pub const TRIAL_BOUND: u64 = 1 << 16;

fn too_large(n: &BigInt) -> Error {
    Error::LimitExceeded {
        what: "integer to factor",
        value: n.to_string(),
        limit: "prime factors below 2^64".into(),
    }
}

fn big_is_probable_prime(n: &BigInt) -> bool {
    let one = BigInt::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'bases: for b in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigInt::from(b).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2), n);
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn big_pollard_rho(n: &BigInt) -> BigInt {
    let mut c = BigInt::one();
    loop {
        let step = |x: &BigInt| (x * x + &c) % n;
        let (mut x, mut y) = (BigInt::from(2), BigInt::from(2));
        let mut d = BigInt::one();
        while d.is_one() {
            x = step(&x);
            y = step(&step(&y));
            d = (&x - &y).abs().gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1;
    }
}

fn collect_big(n: BigInt, out: &mut Vec<u64>) -> Result<()> {
    if let Some(m) = n.to_u64() {
        out.extend(
            factor_u64(m)
                .into_iter()
                .flat_map(|(p, e)| std::iter::repeat_n(p, e as usize)),
        );
        return Ok(());
    }
    if big_is_probable_prime(&n) {
        return Err(too_large(&n));
    }
    let d = big_pollard_rho(&n);
    let rest = &n / &d;
    collect_big(d, out)?;
    collect_big(rest, out)
}

/// Factorisation of `|n|` for a nonzero big integer, as sorted `(prime, exponent)` pairs.
pub fn factor(n: &BigInt) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        return Err(Error::InvalidInput("cannot factor zero".into()));
    }
    if let Some(m) = n.abs().to_u64() {
        return Ok(factor_u64(m));
    }
    let mut rest = n.abs();
    let mut primes = Vec::new();
    for p in primes_up_to(TRIAL_BOUND) {
        let pb = BigInt::from(p);
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            primes.push(p);
        }
    }
    if rest.bits() > 128 {
        return Err(too_large(n));
    }
    collect_big(rest, &mut primes)?;
    Ok(group_primes(primes))
}

/// Distinct primes dividing a nonzero integer.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<u64>> {
    Ok(factor(n)?.into_iter().map(|(p, _)| p).collect())
}

/// `v_p(n)` for nonzero `n`.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Strip every factor of `p`, returning `(v_p(n), n / p^v)`.
pub fn split_off(n: &BigInt, p: u64) -> (u32, BigInt) {
    let v = valuation(n, p);
    (v, n / BigInt::from(p).pow(v))
}

pub fn residue(n: &BigInt, m: u64) -> u64 {
    n.mod_floor(&BigInt::from(m))
        .to_u64()
        .expect("residue fits")
}

/// Legendre symbol `(n / p)` for an odd prime `p`.
pub fn legendre(n: &BigInt, p: u64) -> i8 {
    let r = residue(n, p);
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Whether the nonzero rational integer `n` is a square in `Q_p`.
pub fn is_square_qp(n: &BigInt, p: u64) -> bool {
    let (v, u) = split_off(n, p);
    if v % 2 == 1 {
        return false;
    }
    match p {
        2 => residue(&u, 8) == 1,
        _ => legendre(&u, p) == 1,
    }
}

/// Signed squarefree part: `n = core * m^2` with `core` squarefree and of the sign of `n`.
pub fn squarefree_core(n: &BigInt) -> Result<BigInt> {
    let mut core = BigInt::one();
    for (p, e) in factor(n)? {
        if e % 2 == 1 {
            core *= p;
        }
    }
    if n.sign() == Sign::Minus {
        core = -core;
    }
    Ok(core)
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

pub fn is_cube(n: &BigInt) -> bool {
    let r = n.cbrt();
    &r * &r * &r == *n
}

/// Primes up to `n` inclusive.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_beyond_u64() {
        let n: BigInt =
            BigInt::from(4_294_967_311u64) * BigInt::from(4_294_967_357u64) * 4_294_967_371u64 * 12;
        assert_eq!(
            factor(&n).unwrap(),
            vec![
                (2, 2),
                (3, 1),
                (4_294_967_311, 1),
                (4_294_967_357, 1),
                (4_294_967_371, 1)
            ]
        );
        let mersenne_89 = (BigInt::one() << 89) - 1;
        assert!(matches!(
            factor(&(mersenne_89 * 3)),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn factors_multiply_back() {
        for n in [
            1u64,
            2,
            12,
            97,
            1_000_003 * 999_983,
            600_851_475_143,
            u64::MAX,
        ] {
            let f = factor_u64(n);
            let prod: u128 = f.iter().map(|&(p, e)| (p as u128).pow(e)).product();
            assert_eq!(prod, n as u128);
            assert!(f.iter().all(|&(p, _)| is_prime(p)));
        }
    }

    #[test]
    fn local_squares() {
        assert!(is_square_qp(&BigInt::from(17), 2));
        assert!(!is_square_qp(&BigInt::from(5), 2));
        assert!(is_square_qp(&BigInt::from(-28), 2)); // 4 * -7, -7 = 1 mod 8
        assert!(is_square_qp(&BigInt::from(2), 7));
        assert!(!is_square_qp(&BigInt::from(3), 7));
        assert!(!is_square_qp(&BigInt::from(3), 3));
    }

    #[test]
    fn cores() {
        assert_eq!(
            squarefree_core(&BigInt::from(-72)).unwrap(),
            BigInt::from(-2)
        );
        assert_eq!(squarefree_core(&BigInt::from(16)).unwrap(), BigInt::from(1));
    }
}

//! Arithmetic in the Eisenstein integers `Z[ζ]` and the field `K = Q(ζ)`, where `ζ` is a
//! primitive cube root of unity (so `ζ² = -1 - ζ`).
//!
//! Elements are stored in the basis `{1, ζ}`. Besides the ring operations the module
//! classifies rational primes in `K`, picks normalised generators for split primes, evaluates
//! the cubic residue symbol, and decides whether a rational integer is a square in the
//! completion `K_q`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, inv_mod, is_square_qp, pow_mod, split_off};
use crate::error::{invalid, Error, Result};

/// An element `c0 + c1·ζ` of `Z[ζ]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EisensteinInt {
    pub c0: BigInt,
    pub c1: BigInt,
}

impl EisensteinInt {
    pub fn new(c0: impl Into<BigInt>, c1: impl Into<BigInt>) -> Self {
        Self {
            c0: c0.into(),
            c1: c1.into(),
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n, 0)
    }

    pub fn zeta() -> Self {
        Self::new(0, 1)
    }

    /// The uniformiser `1 - ζ` of the prime above 3.
    pub fn frak_p() -> Self {
        Self::new(1, -1)
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    pub fn norm(&self) -> BigInt {
        &self.c0 * &self.c0 - &self.c0 * &self.c1 + &self.c1 * &self.c1
    }

    /// Complex conjugation, which sends `ζ` to `ζ² = -1 - ζ`.
    pub fn conj(&self) -> Self {
        Self::new(&self.c0 - &self.c1, -&self.c1)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// The rational integer this element equals, if `c1 = 0`.
    pub fn as_integer(&self) -> Option<&BigInt> {
        self.c1.is_zero().then_some(&self.c0)
    }
}

impl fmt::Display for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.c0.is_zero(), self.c1.is_zero()) {
            (_, true) => write!(f, "{}", self.c0),
            (true, false) => write!(f, "{}ζ", self.c1),
            (false, false) if self.c1.is_negative() => {
                write!(f, "{}-{}ζ", self.c0, self.c1.abs())
            }
            (false, false) => write!(f, "{}+{}ζ", self.c0, self.c1),
        }
    }
}

impl Add for &EisensteinInt {
    type Output = EisensteinInt;
    fn add(self, rhs: Self) -> EisensteinInt {
        EisensteinInt::new(&self.c0 + &rhs.c0, &self.c1 + &rhs.c1)
    }
}

impl Sub for &EisensteinInt {
    type Output = EisensteinInt;
    fn sub(self, rhs: Self) -> EisensteinInt {
        EisensteinInt::new(&self.c0 - &rhs.c0, &self.c1 - &rhs.c1)
    }
}

impl Mul for &EisensteinInt {
    type Output = EisensteinInt;
    fn mul(self, rhs: Self) -> EisensteinInt {
        let t = &self.c1 * &rhs.c1;
        EisensteinInt::new(
            &self.c0 * &rhs.c0 - &t,
            &self.c0 * &rhs.c1 + &self.c1 * &rhs.c0 - t,
        )
    }
}

impl Neg for &EisensteinInt {
    type Output = EisensteinInt;
    fn neg(self) -> EisensteinInt {
        EisensteinInt::new(-&self.c0, -&self.c1)
    }
}

/// An element of `K`, stored as `numerator / denominator` with a rational-integer
/// denominator. The canonical form has `denominator > 0` and no common factor among the
/// three integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KRational {
    numerator: EisensteinInt,
    denominator: BigInt,
}

impl KRational {
    pub fn new(numerator: EisensteinInt, denominator: BigInt) -> Self {
        assert!(!denominator.is_zero(), "zero denominator");
        let mut g = numerator.c0.gcd(&numerator.c1).gcd(&denominator);
        if denominator.is_negative() {
            g = -g;
        }
        Self {
            numerator: EisensteinInt::new(&numerator.c0 / &g, &numerator.c1 / &g),
            denominator: denominator / g,
        }
    }

    pub fn from_eisenstein(z: EisensteinInt) -> Self {
        Self::new(z, BigInt::one())
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::from_eisenstein(EisensteinInt::from_int(n))
    }

    pub fn from_rational(q: &BigRational) -> Self {
        Self::new(
            EisensteinInt::from_int(q.numer().clone()),
            q.denom().clone(),
        )
    }

    /// `c0 + c1·ζ` with rational coefficients.
    pub fn from_coeffs(c0: &BigRational, c1: &BigRational) -> Self {
        let den = c0.denom().lcm(c1.denom());
        let n0 = c0.numer() * (&den / c0.denom());
        let n1 = c1.numer() * (&den / c1.denom());
        Self::new(EisensteinInt::new(n0, n1), den)
    }

    pub fn numerator(&self) -> &EisensteinInt {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// Rational coefficients `(c0, c1)` in the basis `{1, ζ}`.
    pub fn coeffs(&self) -> (BigRational, BigRational) {
        (
            BigRational::new(self.numerator.c0.clone(), self.denominator.clone()),
            BigRational::new(self.numerator.c1.clone(), self.denominator.clone()),
        )
    }

    /// The rational number this element equals, if it lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.numerator
            .as_integer()
            .map(|n| BigRational::new(n.clone(), self.denominator.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.numerator.conj(), self.denominator.clone())
    }

    pub fn norm(&self) -> BigRational {
        BigRational::new(self.numerator.norm(), &self.denominator * &self.denominator)
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        // 1/(z/d) = d·conj(z)/N(z)
        let conj = self.numerator.conj();
        let scaled = EisensteinInt::new(&conj.c0 * &self.denominator, &conj.c1 * &self.denominator);
        Self::new(scaled, self.numerator.norm())
    }
}

impl fmt::Display for KRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.is_one() {
            write!(f, "{}", self.numerator)
        } else if self.numerator.c1.is_zero() {
            write!(f, "{}/{}", self.numerator, self.denominator)
        } else {
            write!(f, "({})/{}", self.numerator, self.denominator)
        }
    }
}

impl Add for &KRational {
    type Output = KRational;
    fn add(self, rhs: Self) -> KRational {
        let l = &self.numerator * &EisensteinInt::from_int(rhs.denominator.clone());
        let r = &rhs.numerator * &EisensteinInt::from_int(self.denominator.clone());
        KRational::new(&l + &r, &self.denominator * &rhs.denominator)
    }
}

impl Sub for &KRational {
    type Output = KRational;
    fn sub(self, rhs: Self) -> KRational {
        self + &(-rhs)
    }
}

impl Mul for &KRational {
    type Output = KRational;
    fn mul(self, rhs: Self) -> KRational {
        KRational::new(
            &self.numerator * &rhs.numerator,
            &self.denominator * &rhs.denominator,
        )
    }
}

impl Div for &KRational {
    type Output = KRational;
    fn div(self, rhs: Self) -> KRational {
        self * &rhs.inv()
    }
}

impl Neg for &KRational {
    type Output = KRational;
    fn neg(self) -> KRational {
        KRational::new(-&self.numerator, self.denominator.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrimeKind {
    Ramified,
    Inert,
    Split,
}

/// A prime ideal of `O_K`, described by the rational prime below it and a generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KPrime {
    pub kind: PrimeKind,
    pub residue_char: u64,
    pub generator: EisensteinInt,
    pub residue_field_size: u64,
}

impl KPrime {
    pub fn ramified() -> Self {
        Self {
            kind: PrimeKind::Ramified,
            residue_char: 3,
            generator: EisensteinInt::frak_p(),
            residue_field_size: 3,
        }
    }

    /// The conjugate prime; only differs from `self` for split primes.
    pub fn conj(&self) -> Self {
        match self.kind {
            PrimeKind::Split => Self {
                generator: self.generator.conj(),
                ..self.clone()
            },
            _ => self.clone(),
        }
    }

    /// Short label in the style `2O_K`, `𝔭`, or `(1+3ζ)`.
    pub fn label(&self) -> String {
        match self.kind {
            PrimeKind::Ramified => "𝔭".to_string(),
            PrimeKind::Inert => format!("{}O_K", self.residue_char),
            PrimeKind::Split => format!("({})", self.generator),
        }
    }
}

impl fmt::Display for KPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// How the rational prime `ell` decomposes in `K`. Split primes are represented by the
/// generator from [`split_prime`]; use [`primes_above`] to get both conjugates.
pub fn classify_prime(ell: u64) -> Result<KPrime> {
    if !arith::is_prime(ell) {
        return Err(Error::InvalidInput(format!("{ell} is not prime")));
    }
    Ok(match ell % 3 {
        0 => KPrime::ramified(),
        2 => KPrime {
            kind: PrimeKind::Inert,
            residue_char: ell,
            generator: EisensteinInt::from_int(ell),
            residue_field_size: ell * ell,
        },
        _ => KPrime {
            kind: PrimeKind::Split,
            residue_char: ell,
            generator: split_prime(ell)?,
            residue_field_size: ell,
        },
    })
}

/// All primes of `K` above `ell`: one for inert and ramified primes, two conjugates for split.
pub fn primes_above(ell: u64) -> Result<Vec<KPrime>> {
    let q = classify_prime(ell)?;
    Ok(match q.kind {
        PrimeKind::Split => vec![q.conj(), q].into_iter().rev().collect(),
        _ => vec![q],
    })
}

/// Generator `m + nζ` of a prime above `ell ≡ 1 (mod 3)` with `m ≡ 1` and `n ≡ 0 (mod 3)`.
///
/// Exactly two such generators exist (one for each conjugate prime), and they have
/// opposite `n`; the one with `n > 0` is returned.
pub fn split_prime(ell: u64) -> Result<EisensteinInt> {
    if ell % 3 != 1 || !arith::is_prime(ell) {
        return Err(invalid(format!(
            "{ell} is not a prime congruent to 1 mod 3"
        )));
    }
    let ell = ell as i128;
    // m² - mn + n² = ell forces |n| ≤ 2·sqrt(ell/3).
    let mut n: i128 = 3;
    while 3 * n * n <= 4 * ell {
        // Solve m² - n·m + (n² - ell) = 0.
        let disc = 4 * ell - 3 * n * n;
        let r = (disc as u128).sqrt() as i128;
        if r * r == disc {
            for twice_m in [n + r, n - r] {
                if twice_m % 2 == 0 && (twice_m / 2).rem_euclid(3) == 1 {
                    return Ok(EisensteinInt::new(twice_m / 2, n));
                }
            }
        }
        n += 3;
    }
    Err(Error::Consistency(format!(
        "no normalised generator found for {ell}"
    )))
}

/// Value of a cubic residue symbol, written as a power of `ζ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CubicSymbol {
    One,
    Zeta,
    ZetaSquared,
}

impl CubicSymbol {
    pub fn exponent(self) -> u8 {
        match self {
            Self::One => 0,
            Self::Zeta => 1,
            Self::ZetaSquared => 2,
        }
    }

    pub fn from_exponent(e: u8) -> Self {
        match e % 3 {
            0 => Self::One,
            1 => Self::Zeta,
            _ => Self::ZetaSquared,
        }
    }
}

impl Mul for CubicSymbol {
    type Output = CubicSymbol;
    fn mul(self, rhs: Self) -> Self {
        Self::from_exponent(self.exponent() + rhs.exponent())
    }
}

/// The cubic residue symbol `(x/π)₃` for a split prime `π = m + nζ` above `ell`.
///
/// In `Z[ζ]/π ≅ F_ell` the image of `ζ` is `-m·n⁻¹`; the symbol is the power of `ζ` congruent
/// to `x^((ell-1)/3)`.
pub fn cubic_residue_symbol(x: &BigInt, pi: &EisensteinInt, ell: u64) -> Result<CubicSymbol> {
    if ell % 3 != 1 || pi.norm() != BigInt::from(ell) || !arith::is_prime(ell) {
        return Err(invalid(format!("{pi} is not a split prime above {ell}")));
    }
    let xr = arith::residue(x, ell);
    if xr == 0 {
        return Err(invalid(format!("{x} is divisible by {ell}")));
    }
    let m = arith::residue(&pi.c0, ell);
    let n = arith::residue(&pi.c1, ell);
    let zeta_bar = (ell - arith::mul_mod(m, inv_mod(n, ell), ell)) % ell;
    let c = pow_mod(xr, (ell - 1) / 3, ell);
    if c == 1 {
        Ok(CubicSymbol::One)
    } else if c == zeta_bar {
        Ok(CubicSymbol::Zeta)
    } else if c == arith::mul_mod(zeta_bar, zeta_bar, ell) {
        Ok(CubicSymbol::ZetaSquared)
    } else {
        Err(Error::Consistency(format!(
            "{c} is not a cube root of unity mod {ell}"
        )))
    }
}

fn is_square_or_minus3_square(a: &BigInt, p: u64) -> bool {
    is_square_qp(a, p) || is_square_qp(&(a * -3), p)
}

/// Whether the nonzero rational integer `a` is a square in the completion `K_q`.
pub fn is_square_in_kq(a: &BigInt, q: &KPrime) -> bool {
    assert!(!a.is_zero(), "square test of zero");
    match q.kind {
        PrimeKind::Split => is_square_qp(a, q.residue_char),
        PrimeKind::Inert if q.residue_char != 2 => arith::valuation(a, q.residue_char) % 2 == 0,
        PrimeKind::Inert => is_square_or_minus3_square(a, 2),
        PrimeKind::Ramified => is_square_or_minus3_square(a, 3),
    }
}

/// Whether `a` is a square in `K`, i.e. `a = n²` or `a = -3n²`.
pub fn is_square_in_k(a: &BigInt) -> bool {
    arith::is_square(a)
        || (a.is_negative() && (-a) % 3 == BigInt::zero() && arith::is_square(&(-a / 3)))
}

/// Normalised valuation `v_q` of a nonzero rational number.
pub fn k_valuation(a: &BigRational, q: &KPrime) -> Result<i64> {
    if a.is_zero() {
        return Err(invalid("valuation of zero"));
    }
    let ell = q.residue_char;
    let v = arith::valuation(a.numer(), ell) as i64 - arith::valuation(a.denom(), ell) as i64;
    Ok(match q.kind {
        PrimeKind::Ramified => 2 * v,
        _ => v,
    })
}

/// `v_q` of a nonzero rational integer.
pub fn k_valuation_int(a: &BigInt, q: &KPrime) -> i64 {
    let v = split_off(a, q.residue_char).0 as i64;
    match q.kind {
        PrimeKind::Ramified => 2 * v,
        _ => v,
    }
}

/// Brute-force check whether `x` is a cube modulo the prime `ell`.
pub fn is_cube_mod(x: u64, ell: u64) -> bool {
    let x = x % ell;
    (0..ell).any(|y| pow_mod(y, 3, ell) == x)
}

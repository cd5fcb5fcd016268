//! The two curve families with a rational 3-isogeny, their group law, and the isogenies
//! between them.
//!
//! * Type I: `E_a: y² = x³ + a`, with `φ_a: E_a → E_{-27a}` over `Q` and the `K`-endomorphism
//!   `φ: E_a → E_a` obtained through `(x, y) ↦ (𝔭²x, 𝔭³y)`.
//! * Type II: `E_{a,b}: y² = x³ + a(x - b)²`, with `ψ_{a,b}: E_{a,b} → E_{-27a, 4a+27b}` and
//!   its `K`-normalisation `Ψ = θ⁻¹ ∘ ψ` landing on the model `E₂` that is minimal at `𝔭`.
//!
//! Points are generic over the coefficient field so the same group law serves `Q` and `K`.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::eisenstein::{EisensteinInt, KRational};
use crate::error::{invalid, Error, Result};

/// The arithmetic a coordinate field has to provide.
pub trait Field: Clone + PartialEq + Debug + Display {
    fn from_int(n: &BigInt) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;

    fn zero() -> Self {
        Self::from_int(&BigInt::zero())
    }
    fn one() -> Self {
        Self::from_int(&BigInt::one())
    }
    fn small(n: i64) -> Self {
        Self::from_int(&BigInt::from(n))
    }
    fn square(&self) -> Self {
        self.mul(self)
    }
    fn cube(&self) -> Self {
        self.mul(self).mul(self)
    }
}

impl Field for BigRational {
    fn from_int(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Field for KRational {
    fn from_int(n: &BigInt) -> Self {
        KRational::from_int(n.clone())
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        KRational::is_zero(self)
    }
}

/// `y² = x³ + a2·x² + a4·x + a6`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve<F> {
    pub a2: F,
    pub a4: F,
    pub a6: F,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Point<F> {
    Infinity,
    Affine { x: F, y: F },
}

impl<F: Field> Point<F> {
    pub fn new(x: F, y: F) -> Self {
        Point::Affine { x, y }
    }

    pub fn x(&self) -> Option<&F> {
        match self {
            Point::Infinity => None,
            Point::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&F> {
        match self {
            Point::Infinity => None,
            Point::Affine { y, .. } => Some(y),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }
}

impl<F: Field> Display for Point<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

impl<F: Field> Curve<F> {
    pub fn new(a2: F, a4: F, a6: F) -> Self {
        Self { a2, a4, a6 }
    }

    /// Right-hand side `x³ + a2·x² + a4·x + a6`.
    pub fn rhs(&self, x: &F) -> F {
        x.add(&self.a2).mul(x).add(&self.a4).mul(x).add(&self.a6)
    }

    pub fn contains(&self, p: &Point<F>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { x, y } => y.square() == self.rhs(x),
        }
    }

    pub fn check(&self, p: &Point<F>) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(invalid(format!("{p} is not on the curve")))
        }
    }

    pub fn neg(&self, p: &Point<F>) -> Point<F> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::new(x.clone(), y.neg()),
        }
    }

    /// Chord-and-tangent addition.
    pub fn add(&self, p: &Point<F>, q: &Point<F>) -> Result<Point<F>> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    fn add_unchecked(&self, p: &Point<F>, q: &Point<F>) -> Point<F> {
        let (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) = (p, q) else {
            return if p.is_infinity() {
                q.clone()
            } else {
                p.clone()
            };
        };
        let slope = if x1 == x2 {
            if y1.add(y2).is_zero() {
                return Point::Infinity;
            }
            // (3x² + 2·a2·x + a4) / 2y
            let num = F::small(3)
                .mul(&x1.square())
                .add(&F::small(2).mul(&self.a2).mul(x1))
                .add(&self.a4);
            num.div(&F::small(2).mul(y1))
        } else {
            y2.sub(y1).div(&x2.sub(x1))
        };
        let x3 = slope.square().sub(&self.a2).sub(x1).sub(x2);
        let y3 = slope.mul(&x1.sub(&x3)).sub(y1);
        Point::new(x3, y3)
    }

    /// `[n]P` by double-and-add; negative `n` uses `-P`.
    pub fn scalar_mul(&self, n: i64, p: &Point<F>) -> Result<Point<F>> {
        self.check(p)?;
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Point::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            base = self.add_unchecked(&base, &base);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Whether `[n]P = O` for some `1 ≤ n ≤ 12`. Over `Q` this is exactly the torsion test.
    pub fn is_small_torsion(&self, p: &Point<F>) -> bool {
        let mut acc = Point::Infinity;
        for _ in 1..=12 {
            acc = self.add_unchecked(&acc, p);
            if acc.is_infinity() {
                return true;
            }
        }
        false
    }
}

fn q(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn k(n: impl Into<BigInt>) -> KRational {
    KRational::from_int(n.into())
}

/// `E_a: y² = x³ + a` over any coefficient field.
pub fn type1_curve<F: Field>(a: &BigInt) -> Curve<F> {
    Curve::new(F::zero(), F::zero(), F::from_int(a))
}

/// `E_{a,b}: y² = x³ + a x² - 2ab x + ab²`.
pub fn type2_curve<F: Field>(a: &BigInt, b: &BigInt) -> Curve<F> {
    Curve::new(
        F::from_int(a),
        F::from_int(&(a * b * -2)),
        F::from_int(&(a * b * b)),
    )
}

/// A normalised Type I curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve1 {
    pub a: BigInt,
    pub sixth_power_free: bool,
}

/// Remove sixth powers from `a` and then, using `E_a ≅ E_{-27a}` over `K`, divide by `-27`
/// while `27 | a`. The result has `v_ℓ(a) ≤ 5` for `ℓ ≠ 3` and `v₃(a) ≤ 2`.
pub fn normalize_type1(a: &BigInt) -> Result<Curve1> {
    if a.is_zero() {
        return Err(invalid("a must be nonzero"));
    }
    let mut out = a.clone();
    for (p, e) in arith::factor(a)? {
        out /= BigInt::from(p).pow(6 * (e / 6));
    }
    let twenty_seven = BigInt::from(27);
    while out.is_multiple_of(&twenty_seven) {
        out /= -27;
    }
    Ok(Curve1 {
        a: out,
        sixth_power_free: true,
    })
}

/// A Type II curve `E_{a,b}` satisfying `ab(4a+27b) ≠ 0` with squarefree `gcd(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve2 {
    pub a: BigInt,
    pub b: BigInt,
}

impl Curve2 {
    pub fn new(a: BigInt, b: BigInt) -> Result<Self> {
        let d: BigInt = &a * 4 + &b * 27;
        if a.is_zero() || b.is_zero() || d.is_zero() {
            return Err(invalid(format!(
                "E_{{{a},{b}}} is singular: ab(4a+27b) = 0"
            )));
        }
        let g = a.gcd(&b);
        if arith::factor(&g)?.iter().any(|&(_, e)| e > 1) {
            return Err(invalid(format!("gcd({a}, {b}) = {g} is not squarefree")));
        }
        Ok(Self { a, b })
    }

    /// `d = 4a + 27b`.
    pub fn d(&self) -> BigInt {
        &self.a * 4 + &self.b * 27
    }

    pub fn curve<F: Field>(&self) -> Curve<F> {
        type2_curve(&self.a, &self.b)
    }

    /// The isogenous curve `Ê_{a,b} = E_{-27a, d}`.
    pub fn dual(&self) -> Curve<BigRational> {
        type2_curve(&(&self.a * -27), &self.d())
    }
}

fn affine<F: Field>(p: &Point<F>) -> Option<(&F, &F)> {
    match p {
        Point::Affine { x, y } if !x.is_zero() => Some((x, y)),
        _ => None,
    }
}

/// `φ_a: E_a → E_{-27a}`, `(x, y) ↦ ((x³+4a)/x², y(x³-8a)/x³)`.
pub fn phi_rational(a: &BigInt, p: &Point<BigRational>) -> Result<Point<BigRational>> {
    type1_curve::<BigRational>(a).check(p)?;
    let Some((x, y)) = affine(p) else {
        return Ok(Point::Infinity);
    };
    let x3 = x.cube();
    Ok(Point::new(
        (&x3 + q(a * 4)) / x.square(),
        y * (&x3 - q(a * 8)) / &x3,
    ))
}

/// Dual `φ̂_a: E_{-27a} → E_a`, `(x, y) ↦ ((x³-108a)/(9x²), y(x³+216a)/(27x³))`.
pub fn phi_hat_rational(a: &BigInt, p: &Point<BigRational>) -> Result<Point<BigRational>> {
    type1_curve::<BigRational>(&(a * -27)).check(p)?;
    let Some((x, y)) = affine(p) else {
        return Ok(Point::Infinity);
    };
    let x3 = x.cube();
    Ok(Point::new(
        (&x3 - q(a * 108)) / (q(9) * x.square()),
        y * (&x3 + q(a * 216)) / (q(27) * &x3),
    ))
}

/// The `K`-endomorphism `φ(x, y) = ((x³+4a)/(𝔭²x²), y(x³-8a)/(𝔭³x³))` of `E_a`.
pub fn phi_k(a: &BigInt, p: &Point<KRational>) -> Result<Point<KRational>> {
    type1_curve::<KRational>(a).check(p)?;
    let Some((x, y)) = affine(p) else {
        return Ok(Point::Infinity);
    };
    let frak_p = KRational::from_eisenstein(EisensteinInt::frak_p());
    let x3 = x.cube();
    Ok(Point::new(
        (&x3 + &k(a * 4)).div(&frak_p.square().mul(&x.square())),
        y.mul(&(&x3 - &k(a * 8))).div(&frak_p.cube().mul(&x3)),
    ))
}

/// `ψ_{a,b}: E_{a,b} → E_{-27a,d}`.
pub fn psi(curve: &Curve2, p: &Point<BigRational>) -> Result<Point<BigRational>> {
    curve.curve::<BigRational>().check(p)?;
    let Some((x, y)) = affine(p) else {
        return Ok(Point::Infinity);
    };
    let (a, b) = (q(curve.a.clone()), q(curve.b.clone()));
    let x2 = x.square();
    let x3 = x.cube();
    let ab = &a * &b;
    let num_x =
        &x3 + BigRational::new(4.into(), 3.into()) * &a * &x2 - q(4) * &ab * x + q(4) * &ab * &b;
    let num_y = &x3 + q(4) * &ab * x - q(8) * &ab * &b;
    Ok(Point::new(q(9) * num_x / x2, q(27) * y * num_y / x3))
}

/// Dual `ψ̂_{a,b}: E_{-27a,d} → E_{a,b}`.
pub fn psi_hat(curve: &Curve2, p: &Point<BigRational>) -> Result<Point<BigRational>> {
    curve.dual().check(p)?;
    let Some((x, y)) = affine(p) else {
        return Ok(Point::Infinity);
    };
    let (a, d) = (q(curve.a.clone()), q(curve.d()));
    let x2 = x.square();
    let x3 = x.cube();
    let ad = &a * &d;
    let num_x = &x3 - q(36) * &a * &x2 + q(108) * &ad * x - q(108) * &ad * &d;
    let num_y = &x3 - q(108) * &ad * x + q(216) * &ad * &d;
    Ok(Point::new(num_x / (q(81) * x2), y * num_y / (q(729) * x3)))
}

/// The `𝔭`-minimal model `E₂` of `Ê_{a,b}` over `K`:
/// `a₂ = -a(3+5ζ)`, `b₂ = a(a(-5+2ζ) + 18bζ²)`,
/// `c₂ = (3a³ - 2a²b - 27ab²) + (3a³ + 18a²b)ζ`.
pub fn e2_curve(curve: &Curve2) -> Curve<KRational> {
    let (a, b) = (&curve.a, &curve.b);
    let ez = |c0: BigInt, c1: BigInt| KRational::from_eisenstein(EisensteinInt::new(c0, c1));
    let a2 = ez(a * -3, a * -5);
    // 18bζ² = -18b - 18bζ
    let b2 = ez(a * a * -5 - a * b * 18, a * a * 2 - a * b * 18);
    let a3 = a * a * a;
    let c2 = ez(
        &a3 * 3 - a * a * b * 2 - a * b * b * 27,
        &a3 * 3 + a * a * b * 18,
    );
    Curve::new(a2, b2, c2)
}

fn frak_p_pow(e: u32) -> KRational {
    KRational::from_eisenstein(EisensteinInt::frak_p().pow(e))
}

/// `θ: E₂ → E_{-27a,d}`, `(x, y) ↦ (𝔭²(𝔭²x - a - a𝔭), 𝔭⁶y)`.
pub fn theta(curve: &Curve2, p: &Point<KRational>) -> Result<Point<KRational>> {
    e2_curve(curve).check(p)?;
    let Point::Affine { x, y } = p else {
        return Ok(Point::Infinity);
    };
    let a = k(curve.a.clone());
    let inner = frak_p_pow(2).mul(x).sub(&a).sub(&a.mul(&frak_p_pow(1)));
    Ok(Point::new(frak_p_pow(2).mul(&inner), frak_p_pow(6).mul(y)))
}

/// `θ⁻¹: E_{-27a,d} → E₂`.
pub fn theta_inverse(curve: &Curve2, p: &Point<KRational>) -> Result<Point<KRational>> {
    let dual: Curve<KRational> = type2_curve(&(&curve.a * -27), &curve.d());
    dual.check(p)?;
    let Point::Affine { x, y } = p else {
        return Ok(Point::Infinity);
    };
    let a = k(curve.a.clone());
    let shifted = x.div(&frak_p_pow(2)).add(&a).add(&a.mul(&frak_p_pow(1)));
    Ok(Point::new(
        shifted.div(&frak_p_pow(2)),
        y.div(&frak_p_pow(6)),
    ))
}

fn to_k(p: &Point<BigRational>) -> Point<KRational> {
    match p {
        Point::Infinity => Point::Infinity,
        Point::Affine { x, y } => {
            Point::new(KRational::from_rational(x), KRational::from_rational(y))
        }
    }
}

/// `Ψ_{a,b} = θ⁻¹ ∘ ψ_{a,b}: E_{a,b} → E₂`, computed by composition.
pub fn psi_normalized(curve: &Curve2, p: &Point<BigRational>) -> Result<Point<KRational>> {
    theta_inverse(curve, &to_k(&psi(curve, p)?))
}

/// Closed form of `Ψ_{a,b}`:
/// `(ζ(x³ + a𝔭x² - 4abx + 4ab²)/x², -y(x³ + 4abx - 8ab²)/x³)`.
pub fn psi_normalized_closed_form(
    curve: &Curve2,
    p: &Point<BigRational>,
) -> Result<Point<KRational>> {
    curve.curve::<BigRational>().check(p)?;
    let Some((x, y)) = affine(p) else {
        return Ok(Point::Infinity);
    };
    let (x, y) = (KRational::from_rational(x), KRational::from_rational(y));
    let (a, b) = (k(curve.a.clone()), k(curve.b.clone()));
    let ab = a.mul(&b);
    let x2 = x.square();
    let x3 = x.cube();
    let zeta = KRational::from_eisenstein(EisensteinInt::zeta());
    let num_x = x3
        .add(&a.mul(&frak_p_pow(1)).mul(&x2))
        .sub(&k(4).mul(&ab).mul(&x))
        .add(&k(4).mul(&ab).mul(&b));
    let num_y = x3.add(&k(4).mul(&ab).mul(&x)).sub(&k(8).mul(&ab).mul(&b));
    Ok(Point::new(
        zeta.mul(&num_x).div(&x2),
        y.neg().mul(&num_y).div(&x.cube()),
    ))
}

/// Image of a point under the Kummer map of `φ` when `a = s²` with `s` rational, as a pair
/// in `(K* / K*³) × (K* / K*³)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KummerImage {
    pub t1: KRational,
    pub t2: KRational,
}

/// Kummer image for `E_a` with `a` a rational square:
/// `O ↦ (1, 1)`, `(0, s) ↦ (1/(2s), 2s)`, `(0, -s) ↦ (-2s, -1/(2s))`, else `(y - s, y + s)`.
pub fn kummer_image_type1(a: &BigInt, p: &Point<KRational>) -> Result<KummerImage> {
    if !arith::is_square(a) {
        return Err(Error::Unsupported(format!(
            "Kummer images need a rational square root of a = {a}"
        )));
    }
    type1_curve::<KRational>(a).check(p)?;
    let s = k(num_integer::Roots::sqrt(a));
    let Point::Affine { x, y } = p else {
        return Ok(KummerImage { t1: k(1), t2: k(1) });
    };
    let two_s = k(2).mul(&s);
    if x.is_zero() {
        return Ok(if *y == s {
            KummerImage {
                t1: k(1).div(&two_s),
                t2: two_s,
            }
        } else {
            KummerImage {
                t1: two_s.neg(),
                t2: k(-1).div(&two_s),
            }
        });
    }
    Ok(KummerImage {
        t1: y.sub(&s),
        t2: y.add(&s),
    })
}

/// Rational point with integer coordinates, for brevity in tests and examples.
pub fn rational_point(x: i64, y: i64) -> Point<BigRational> {
    Point::new(q(x), q(y))
}

/// Whether a rational number is a perfect square, returning its root.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    (arith::is_square(n) && arith::is_square(d))
        .then(|| BigRational::new(num_integer::Roots::sqrt(n), num_integer::Roots::sqrt(d)))
}

//! Finite sets of primes of `K` that control the Selmer bounds, and the sizes of local
//! groups.
//!
//! Every set is cut out by a local square condition together with a valuation condition, so
//! only primes dividing `6a` (Type I) or `6abd` with `d = 4a + 27b` (Type II) can belong to it.
//! Valuations at `𝔭` of rational numbers are taken as `2·v₃`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{self, is_square_qp, valuation};
use crate::curves::Curve2;
use crate::eisenstein::{is_square_in_kq, k_valuation_int, primes_above, KPrime, PrimeKind};
use crate::error::{invalid, Error, Result};

/// Sets attached to `E_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalPrimeSets1 {
    pub s_a: Vec<KPrime>,
    pub s_a_q: Vec<u64>,
    pub s_aalpha2_q: Vec<u64>,
    pub size_sal: usize,
}

/// Sets attached to `E_{a,b}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalPrimeSets2 {
    pub s1: Vec<KPrime>,
    pub s2: Vec<KPrime>,
    pub s3: Vec<KPrime>,
    pub size_s12l: usize,
    pub size_s13l: usize,
}

impl LocalPrimeSets2 {
    /// Residue characteristics of `S₁ ∪ S₂`.
    pub fn chars12(&self) -> Vec<u64> {
        residue_chars(self.s1.iter().chain(&self.s2))
    }

    /// Residue characteristics of `S₁ ∪ S₃`.
    pub fn chars13(&self) -> Vec<u64> {
        residue_chars(self.s1.iter().chain(&self.s3))
    }
}

/// Sorted distinct residue characteristics of a collection of primes.
pub fn residue_chars<'a>(primes: impl IntoIterator<Item = &'a KPrime>) -> Vec<u64> {
    let mut out: Vec<u64> = primes.into_iter().map(|q| q.residue_char).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn candidate_primes(values: &[&BigInt]) -> Result<Vec<u64>> {
    let mut out = vec![2, 3];
    for v in values {
        out.extend(arith::prime_divisors(v)?);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Every prime of `K` (both conjugates for split primes) above the given rational primes.
fn k_primes(chars: &[u64]) -> Result<Vec<KPrime>> {
    let mut out = Vec::new();
    for &ell in chars {
        out.extend(primes_above(ell)?);
    }
    Ok(out)
}

/// `S_a = {q : a ∈ K_q*², v_q(4a) ≢ 0 (mod 6)}`.
pub fn compute_sa(a: &BigInt) -> Result<Vec<KPrime>> {
    if a.is_zero() {
        return Err(invalid("a must be nonzero"));
    }
    let four_a = a * 4;
    let mut out = Vec::new();
    for q in k_primes(&candidate_primes(&[a])?)? {
        if is_square_in_kq(a, &q) && k_valuation_int(&four_a, &q) % 6 != 0 {
            out.push(q);
        }
    }
    assert_conjugation_stable(&out)?;
    Ok(out)
}

fn assert_conjugation_stable(set: &[KPrime]) -> Result<()> {
    for q in set {
        if !set.contains(&q.conj()) {
            return Err(Error::Consistency(format!(
                "{q} is in the set but its conjugate is not"
            )));
        }
    }
    Ok(())
}

/// `a·α²`, which is `-27a` when `27 ∤ a` and `-a/27` otherwise.
pub fn a_alpha2(a: &BigInt) -> BigInt {
    if a.is_multiple_of(&BigInt::from(27)) {
        -a / 27
    } else {
        a * -27
    }
}

/// Rational primes `ℓ ≠ 3` with `-3a ∈ Q_ℓ*²` and `v_ℓ(4a) ≢ 0 (mod 6)`, plus `3` when
/// `-3a ∈ Q₃*²` and `v₃(a) ∈ {1, 5}`.
fn rational_set(a: &BigInt) -> Result<Vec<u64>> {
    let minus3a = a * -3;
    let four_a = a * 4;
    let mut out = Vec::new();
    for ell in candidate_primes(&[a])? {
        let keep = if ell == 3 {
            is_square_qp(&minus3a, 3) && matches!(valuation(a, 3), 1 | 5)
        } else {
            is_square_qp(&minus3a, ell) && valuation(&four_a, ell) % 6 != 0
        };
        if keep {
            out.push(ell);
        }
    }
    Ok(out)
}

/// `(S_a(Q), S_{aα²}(Q))`.
pub fn compute_saq(a: &BigInt) -> Result<(Vec<u64>, Vec<u64>)> {
    if a.is_zero() {
        return Err(invalid("a must be nonzero"));
    }
    Ok((rational_set(a)?, rational_set(&a_alpha2(a))?))
}

pub fn local_sets_type1(a: &BigInt) -> Result<LocalPrimeSets1> {
    let s_a = compute_sa(a)?;
    let (s_a_q, s_aalpha2_q) = compute_saq(a)?;
    let size_sal = 2 * s_a.len();
    Ok(LocalPrimeSets1 {
        s_a,
        s_a_q,
        s_aalpha2_q,
        size_sal,
    })
}

/// `S₁, S₂, S₃` for `E_{a,b}`, including the exceptional members at `2` and `𝔭`.
pub fn compute_s123(curve: &Curve2) -> Result<LocalPrimeSets2> {
    let (a, b) = (&curve.a, &curve.b);
    let d = curve.d();
    let four_ab2 = a * b * b * 4;
    let (mut s1, mut s2, mut s3) = (Vec::new(), Vec::new(), Vec::new());

    for q in k_primes(&candidate_primes(&[a, b, &d])?)? {
        let square = is_square_in_kq(a, &q);
        if !square {
            continue;
        }
        let divides = |n: &BigInt| k_valuation_int(n, &q) > 0;
        if q.kind == PrimeKind::Ramified {
            let (va, vd) = (k_valuation_int(a, &q), k_valuation_int(&d, &q));
            if (va > 0 && va != 6) || (va == 6 && vd < 12) {
                s1.push(q);
            } else if divides(b) && va == 0 {
                s2.push(q);
            } else if vd > 12 {
                s3.push(q);
            }
            continue;
        }
        let two_divides_a = a.is_even();
        if divides(a) && k_valuation_int(&four_ab2, &q) % 6 != 0 {
            s1.push(q);
        } else if q.residue_char == 2 && !two_divides_a {
            match valuation(b, 2) {
                0 | 1 => s1.push(q),
                2 => s3.push(q),
                _ => s2.push(q),
            }
        } else if q.residue_char != 2 && !divides(a) {
            if divides(b) {
                s2.push(q);
            } else if divides(&d) {
                s3.push(q);
            }
        }
    }
    for set in [&s1, &s2, &s3] {
        assert_conjugation_stable(set)?;
    }
    let size_s12l = 2 * (s1.len() + s2.len());
    let size_s13l = 2 * (s1.len() + s3.len());
    Ok(LocalPrimeSets2 {
        s1,
        s2,
        s3,
        size_s12l,
        size_s13l,
    })
}

/// `|(A_q*/A_q*³)_{N=1}|` for `A = K[X]/(X² - a)`.
pub fn n1_size(a: &BigInt, q: &KPrime) -> u32 {
    match (q.kind, is_square_in_kq(a, q)) {
        (PrimeKind::Ramified, true) => 27,
        (PrimeKind::Ramified, false) => 9,
        (_, true) => 3,
        (_, false) => 1,
    }
}

/// `|V₃ / A_𝔭*³|`.
pub fn v3_size(a: &BigInt) -> u32 {
    if is_square_in_kq(a, &KPrime::ramified()) {
        3
    } else {
        1
    }
}

/// Size of `E_a(K_q) / φ(E_a(K_q))`.
pub fn local_quotient_size_type1(a: &BigInt, q: &KPrime) -> u32 {
    let torsion = if is_square_in_kq(a, q) { 3 } else { 1 };
    match q.kind {
        PrimeKind::Ramified => 3 * torsion,
        _ => torsion,
    }
}

/// How the local Kummer image of `Ψ` sits relative to `(A_q*/A_q*³)_{N=1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    /// The image is the whole norm-one subgroup.
    Equal,
    /// The image meets the unramified norm-one subgroup trivially.
    MeetsTrivially,
    /// The image is trivial and strictly inside the unramified subgroup.
    TrivialStrictlyInside,
    /// The unramified subgroup is strictly inside the image.
    StrictlyLarger,
}

/// Tamagawa numbers of `E_{a,b}` and `Ê_{a,b}` at `q` and the containment relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalRow {
    pub c_e: u32,
    pub c_ehat: u32,
    pub relation: Containment,
}

/// Local data at a prime `q ∤ 3` dividing the discriminant with `a ∈ K_q*²`.
pub fn type2_local_row(curve: &Curve2, q: &KPrime) -> Result<LocalRow> {
    let (a, b) = (&curve.a, &curve.b);
    let d = curve.d();
    if q.kind == PrimeKind::Ramified {
        return Err(invalid("the local table covers primes not above 3"));
    }
    if !is_square_in_kq(a, q) {
        return Err(invalid(format!("{a} is not a square at {q}")));
    }
    let v = |n: &BigInt| k_valuation_int(n, q) as u32;
    let row = |c_e, c_ehat, relation| {
        Ok(LocalRow {
            c_e,
            c_ehat,
            relation,
        })
    };
    let no_row = || {
        Err(Error::Unsupported(format!(
            "no local table row matches {q} for E_{{{a},{b}}}"
        )))
    };

    if v(a) > 0 {
        return match v(&(a * b * b * 4)) % 6 {
            0 => row(1, 1, Containment::Equal),
            2 | 4 => row(3, 3, Containment::MeetsTrivially),
            _ => no_row(),
        };
    }
    if q.residue_char == 2 {
        return match valuation(b, 2) {
            0 | 1 => row(3, 3, Containment::MeetsTrivially),
            2 => {
                let m = valuation(&d, 2) - 2;
                row(m, 3 * m, Containment::StrictlyLarger)
            }
            vb => row(3 * (vb - 2), vb - 2, Containment::TrivialStrictlyInside),
        };
    }
    if v(b) > 0 {
        return row(3 * v(b), v(b), Containment::TrivialStrictlyInside);
    }
    if v(&d) > 0 {
        return row(v(&d), 3 * v(&d), Containment::StrictlyLarger);
    }
    no_row()
}

/// Exponent `e` in `|Sel^Ψ̂| / |Sel^Ψ| = 3^e`, read off from Tamagawa ratios. Counts primes
/// where `c(E) = 3c(Ê)` minus primes where `c(Ê) = 3c(E)`, plus one. At `𝔭` (relevant only
/// when `3 ∤ a`) the ratio is 3 exactly when `3 | b` and `a ∈ K_𝔭*²`.
pub fn tamagawa_shift(curve: &Curve2) -> Result<i64> {
    let (a, b) = (&curve.a, &curve.b);
    let d = curve.d();
    if a.is_multiple_of(&BigInt::from(3)) {
        return Err(invalid("the Tamagawa shift is only used when 3 ∤ a"));
    }
    let mut shift = 1i64;
    for q in k_primes(&candidate_primes(&[a, b, &d])?)? {
        if q.kind == PrimeKind::Ramified {
            if b.is_multiple_of(&BigInt::from(3)) && is_square_in_kq(a, &q) {
                shift += 1;
            }
            continue;
        }
        let disc = a * a * b * b * b * &d;
        if k_valuation_int(&disc, &q) == 0 && q.residue_char != 2 {
            continue;
        }
        if !is_square_in_kq(a, &q) {
            continue;
        }
        let r = type2_local_row(curve, &q)?;
        if r.c_e == 3 * r.c_ehat {
            shift += 1;
        } else if r.c_ehat == 3 * r.c_e {
            shift -= 1;
        }
    }
    Ok(shift)
}

//! Interval bounds for Selmer groups.
//!
//! Every interval carries the formula that produced each endpoint and the hypotheses it
//! relied on. Mordell–Weil ranks, root numbers and Ш dimensions are never computed here.
//! They enter through [`RankCertificate`] and are tagged as external whenever used.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::arith::{self, squarefree_core};
use crate::classgroup::ClassGroupEngine;
use crate::curves::Curve2;
use crate::eisenstein::is_square_in_k;
use crate::error::{invalid, Error, Result};
use crate::localdata::{a_alpha2, compute_saq, residue_chars, LocalPrimeSets1, LocalPrimeSets2};

/// Which formula an endpoint came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    /// `h³_{S(L)}` from the containment `M(S, a) ⊂ Sel`.
    SClassRank,
    /// `h³_{S(L)} + |S(L)| + 2` from the containment `Sel ⊂ N(S, a)`.
    SClassRankPlusLocal,
    /// Sum of the two rational Selmer bounds, `h³ + h³ + |S(L)| + 1`.
    RationalPieces,
    /// `|S| + 1` when `a` is a square in `K`.
    SquareCaseLocal,
    /// No theorem gives a lower bound; 0 is reported.
    NoLowerBoundTheorem,
    /// Parity fixed by the root number.
    RootNumberParity,
    /// `h³ + |S|` over an imaginary quadratic field other than `K`.
    RationalImaginary,
    /// `h³ + |S| + 1` over `K` or a real quadratic field.
    RationalRealOrK,
    /// `|S_a(Q)|` when the quadratic algebra splits.
    RationalSplit,
    /// The Mordell–Weil rank injects into the 3-Selmer group.
    MordellWeilRank,
    /// `Sel^φ` injects into `Sel³` when `a` is not a square in `K`.
    PhiSelmerInjects,
    /// `dim Sel³ ≤ 2 dim Sel^φ` from the exact sequence through `Sel^φ`.
    TwicePhiUpper,
    /// `2|S_a| + 2` when `a` is a square in `K`.
    SquareCaseSel3,
    /// `max{h³_{S₁₂}, h³_{S₁₃} + |S₃| - |S₂| - 1}` and its matching upper bound.
    DualityRefined,
    /// Sum of the `Ψ` and `Ψ̂` upper bounds.
    SelmerSum,
    /// Refined sum using the duality shift `1 + |S₂| - |S₃|`.
    ShiftedSelmerSum,
    /// `|S₁ ∪ S₂| + |S₁ ∪ S₃| + 2` when `a` is a square in `K`.
    SquareCaseSum,
}

impl Formula {
    pub fn tag(self) -> &'static str {
        match self {
            Formula::SClassRank => "s-class-rank",
            Formula::SClassRankPlusLocal => "s-class-rank-plus-local",
            Formula::RationalPieces => "rational-pieces",
            Formula::SquareCaseLocal => "square-case-local",
            Formula::NoLowerBoundTheorem => "no-lower-bound-theorem",
            Formula::RootNumberParity => "root-number-parity",
            Formula::RationalImaginary => "rational-imaginary",
            Formula::RationalRealOrK => "rational-real-or-k",
            Formula::RationalSplit => "rational-split",
            Formula::MordellWeilRank => "mordell-weil-rank",
            Formula::PhiSelmerInjects => "phi-selmer-injects",
            Formula::TwicePhiUpper => "twice-phi-upper",
            Formula::SquareCaseSel3 => "square-case-sel3",
            Formula::DualityRefined => "duality-refined",
            Formula::SelmerSum => "selmer-sum",
            Formula::ShiftedSelmerSum => "shifted-selmer-sum",
            Formula::SquareCaseSum => "square-case-sum",
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Hypotheses an interval depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Assumption {
    NotSquareInK,
    SquareInK,
    ThreeDoesNotDivideA,
    ExternalRank,
    ExternalRootNumber,
    /// Class-group 3-ranks were replaced by their trivial floor 0.
    ClassRanksFloored,
}

impl Assumption {
    pub fn tag(self) -> &'static str {
        match self {
            Assumption::NotSquareInK => "not-square-in-k",
            Assumption::SquareInK => "square-in-k",
            Assumption::ThreeDoesNotDivideA => "three-does-not-divide-a",
            Assumption::ExternalRank => "external-rank",
            Assumption::ExternalRootNumber => "external-root-number",
            Assumption::ClassRanksFloored => "class-ranks-floored",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelmerBounds {
    pub lower: u64,
    pub upper: u64,
    pub lower_source: Vec<Formula>,
    pub upper_source: Vec<Formula>,
    pub assumptions: Vec<Assumption>,
}

impl SelmerBounds {
    fn new(lower: u64, upper: u64, lower_source: Vec<Formula>, upper_source: Vec<Formula>) -> Self {
        Self {
            lower,
            upper,
            lower_source,
            upper_source,
            assumptions: Vec::new(),
        }
    }

    fn assume(mut self, a: Assumption) -> Self {
        if !self.assumptions.contains(&a) {
            self.assumptions.push(a);
        }
        self
    }

    /// Reject an empty interval; it would mean a theorem was misapplied.
    pub fn checked(self) -> Result<Self> {
        if self.lower > self.upper {
            return Err(Error::Consistency(format!(
                "lower bound {} exceeds upper bound {} ({:?} vs {:?})",
                self.lower, self.upper, self.lower_source, self.upper_source
            )));
        }
        Ok(self)
    }

    pub fn contains(&self, n: u64) -> bool {
        self.lower <= n && n <= self.upper
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Take the larger of two lower bounds, keeping the source of the winner (both on ties).
fn max_with(value: u64, source: Formula, other: u64, other_source: Formula) -> (u64, Vec<Formula>) {
    match value.cmp(&other) {
        std::cmp::Ordering::Greater => (value, vec![source]),
        std::cmp::Ordering::Less => (other, vec![other_source]),
        std::cmp::Ordering::Equal => (value, vec![source, other_source]),
    }
}

fn min_with(value: u64, source: Formula, other: u64, other_source: Formula) -> (u64, Vec<Formula>) {
    match value.cmp(&other) {
        std::cmp::Ordering::Less => (value, vec![source]),
        std::cmp::Ordering::Greater => (other, vec![other_source]),
        std::cmp::Ordering::Equal => (value, vec![source, other_source]),
    }
}

/// External arithmetic data: a rank (exact or a floor), `dim Ш[φ]`, and the root number.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub rank: u64,
    pub sha_phi_dim: Option<u64>,
    pub root_number: Option<i8>,
}

/// Class-group inputs for Type I.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Type1Ranks {
    /// `h³_{S_a(L)}`.
    pub h_sl: u32,
    /// 3-rank of `Cl(Q(√-3a))` modulo primes above `S_a(Q)`.
    pub h_phi_hat: u32,
    /// 3-rank of `Cl(Q(√a))` modulo primes above `S_{aα²}(Q)`.
    pub h_phi: u32,
}

/// Class-group 3-ranks for Type I, or `None` when `a ∈ K*²` (then `L` is not a field).
pub fn type1_class_ranks(
    engine: &ClassGroupEngine,
    a: &BigInt,
    sets: &LocalPrimeSets1,
) -> Result<Option<Type1Ranks>> {
    if is_square_in_k(a) {
        return Ok(None);
    }
    let h_sl = engine
        .s_class_three_rank(a, &residue_chars(&sets.s_a))?
        .rank();
    let core = small_core(a)?;
    Ok(Some(Type1Ranks {
        h_sl,
        h_phi_hat: engine.field_s_three_rank(-3 * core, &sets.s_a_q)?,
        h_phi: engine.field_s_three_rank(core, &sets.s_aalpha2_q)?,
    }))
}

fn small_core(a: &BigInt) -> Result<i64> {
    i64::try_from(squarefree_core(a)?)
        .map_err(|_| invalid(format!("squarefree part of {a} out of range")))
}

/// Bounds on `dim Sel^φ(E_a/K)`.
pub fn type1_bounds_k(
    a: &BigInt,
    sets: &LocalPrimeSets1,
    ranks: Option<&Type1Ranks>,
) -> Result<SelmerBounds> {
    let s_l = sets.size_sal as u64;
    let Some(r) = ranks else {
        if !is_square_in_k(a) {
            return Err(invalid(
                "class ranks are required when a is not a square in K",
            ));
        }
        return SelmerBounds::new(
            0,
            sets.s_a.len() as u64 + 1,
            vec![Formula::NoLowerBoundTheorem],
            vec![Formula::SquareCaseLocal],
        )
        .assume(Assumption::SquareInK)
        .checked();
    };
    let h = r.h_sl as u64;
    let (upper, upper_source) = min_with(
        h + s_l + 2,
        Formula::SClassRankPlusLocal,
        (r.h_phi_hat + r.h_phi) as u64 + s_l + 1,
        Formula::RationalPieces,
    );
    SelmerBounds::new(h, upper, vec![Formula::SClassRank], upper_source)
        .assume(Assumption::NotSquareInK)
        .checked()
}

/// The φ-Selmer dimension when `S_a = ∅`: of the two candidates, the one with
/// `(-1)^dim = ω`.
pub fn type1_exact_with_root_number(
    a: &BigInt,
    sets: &LocalPrimeSets1,
    bounds: &SelmerBounds,
    root_number: i8,
) -> Result<u64> {
    if !sets.s_a.is_empty() {
        return Err(invalid(
            "S_a is nonempty; the root number does not pin down the dimension",
        ));
    }
    if is_square_in_k(a) {
        return Err(invalid(
            "a is a square in K; the parity argument needs L to be a field",
        ));
    }
    if root_number != 1 && root_number != -1 {
        return Err(invalid(format!(
            "root number must be ±1, got {root_number}"
        )));
    }
    let parity = u64::from(root_number == -1);
    (bounds.lower..=bounds.upper)
        .find(|d| d % 2 == parity)
        .ok_or_else(|| {
            Error::Consistency(format!(
                "no dimension in [{}, {}] has root number {root_number}",
                bounds.lower, bounds.upper
            ))
        })
}

/// Shape of `Q[x]/(x² - aα²)`, which is `Q(√-3a)` up to isomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RationalAlgebra {
    Imaginary,
    Real,
    EisensteinField,
    Split,
}

pub fn rational_algebra(a: &BigInt) -> RationalAlgebra {
    let m = a * -3;
    if arith::is_square(&m) {
        RationalAlgebra::Split
    } else if arith::is_square(a) {
        RationalAlgebra::EisensteinField
    } else if m.is_negative() {
        RationalAlgebra::Imaginary
    } else {
        RationalAlgebra::Real
    }
}

/// Upper bound on `dim Sel^{φ_a}(E_a/Q)`; the lower bound is 0.
pub fn type1_bounds_q(engine: &ClassGroupEngine, a: &BigInt) -> Result<SelmerBounds> {
    let (s_q, _) = compute_saq(a)?;
    let count = s_q.len() as u64;
    let algebra = rational_algebra(a);
    let (upper, source) = match algebra {
        RationalAlgebra::Split => (count, Formula::RationalSplit),
        RationalAlgebra::EisensteinField => (2 * count + 1, Formula::RationalRealOrK),
        RationalAlgebra::Imaginary | RationalAlgebra::Real => {
            let h = engine.field_s_three_rank(-3 * small_core(a)?, &s_q)? as u64;
            if algebra == RationalAlgebra::Imaginary {
                (h + 2 * count, Formula::RationalImaginary)
            } else {
                (h + 2 * count + 1, Formula::RationalRealOrK)
            }
        }
    };
    SelmerBounds::new(0, upper, vec![Formula::NoLowerBoundTheorem], vec![source]).checked()
}

/// Bounds on `dim Sel^{φ̂_a}(Ê_a/Q)`, i.e. [`type1_bounds_q`] applied to `aα²`.
pub fn type1_dual_bounds_q(engine: &ClassGroupEngine, a: &BigInt) -> Result<SelmerBounds> {
    type1_bounds_q(engine, &a_alpha2(a))
}

/// Bounds on `dim Sel³(E_a/K)`.
pub fn type1_sel3_bounds(
    a: &BigInt,
    sets: &LocalPrimeSets1,
    phi: &SelmerBounds,
    cert: Option<&RankCertificate>,
) -> Result<SelmerBounds> {
    let rank = cert.map_or(0, |c| c.rank);
    let mut out = if is_square_in_k(a) {
        SelmerBounds::new(
            rank,
            2 * sets.s_a.len() as u64 + 2,
            vec![Formula::MordellWeilRank],
            vec![Formula::SquareCaseSel3],
        )
        .assume(Assumption::SquareInK)
    } else {
        let (lower, lower_source) = max_with(
            phi.lower,
            Formula::PhiSelmerInjects,
            rank,
            Formula::MordellWeilRank,
        );
        SelmerBounds::new(
            lower,
            2 * phi.upper,
            lower_source,
            vec![Formula::TwicePhiUpper],
        )
        .assume(Assumption::NotSquareInK)
    };
    if cert.is_some() {
        out = out.assume(Assumption::ExternalRank);
    }
    out.checked()
}

/// `Sel³(E_a/K)` once `dim Sel^φ = d` is known: `[max(d, rk), 2d]`.
pub fn type1_sel3_refined(phi_dim: u64, cert: Option<&RankCertificate>) -> Result<SelmerBounds> {
    let rank = cert.map_or(0, |c| c.rank);
    let (lower, lower_source) = max_with(
        phi_dim,
        Formula::PhiSelmerInjects,
        rank,
        Formula::MordellWeilRank,
    );
    let mut out = SelmerBounds::new(
        lower,
        2 * phi_dim,
        lower_source,
        vec![Formula::TwicePhiUpper],
    )
    .assume(Assumption::NotSquareInK)
    .assume(Assumption::ExternalRootNumber);
    if cert.is_some() {
        out = out.assume(Assumption::ExternalRank);
    }
    out.checked()
}

/// Lower bound `max(0, h³_{S_a(L)} - rk)` for `dim Ш(E_a/K)[φ]`.
pub fn sha_floor(h_sl: u32, cert: Option<&RankCertificate>) -> Result<u64> {
    let cert = cert.ok_or_else(|| invalid("the Ш floor needs a rank"))?;
    Ok((h_sl as u64).saturating_sub(cert.rank))
}

/// `rk = dim Sel^φ - dim E(K)[φ] - dim Ш[φ]`.
pub fn rank_identity(selphi_dim: u64, torsion_phi_dim: u64, sha_phi_dim: u64) -> Result<u64> {
    selphi_dim
        .checked_sub(torsion_phi_dim + sha_phi_dim)
        .ok_or_else(|| {
            Error::Consistency(format!(
                "dim Sel^φ = {selphi_dim} is smaller than torsion {torsion_phi_dim} plus Ш {sha_phi_dim}"
            ))
        })
}

/// Class-group inputs for Type II.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Type2Ranks {
    /// `h³_{S₁,₂(L)}`.
    pub h12: u32,
    /// `h³_{S₁,₃(L)}`.
    pub h13: u32,
    /// Set when the ranks are the trivial floor 0 rather than computed values.
    pub floored: bool,
}

impl Type2Ranks {
    pub fn floor() -> Self {
        Self {
            h12: 0,
            h13: 0,
            floored: true,
        }
    }
}

pub fn type2_class_ranks(
    engine: &ClassGroupEngine,
    curve: &Curve2,
    sets: &LocalPrimeSets2,
) -> Result<Option<Type2Ranks>> {
    if is_square_in_k(&curve.a) {
        return Ok(None);
    }
    Ok(Some(Type2Ranks {
        h12: engine.s_class_three_rank(&curve.a, &sets.chars12())?.rank(),
        h13: engine.s_class_three_rank(&curve.a, &sets.chars13())?.rank(),
        floored: false,
    }))
}

fn union_size(x: &[crate::eisenstein::KPrime], y: &[crate::eisenstein::KPrime]) -> u64 {
    (x.len() + y.len()) as u64
}

fn three_divides(a: &BigInt) -> bool {
    a.is_multiple_of(&BigInt::from(3))
}

fn with_rank_tags(b: SelmerBounds, ranks: &Type2Ranks) -> SelmerBounds {
    if ranks.floored {
        b.assume(Assumption::ClassRanksFloored)
    } else {
        b
    }
}

/// Bounds on `dim Sel^Ψ(E_{a,b}/K)`.
pub fn type2_bounds(
    curve: &Curve2,
    sets: &LocalPrimeSets2,
    ranks: Option<&Type2Ranks>,
) -> Result<SelmerBounds> {
    let Some(r) = ranks else {
        return SelmerBounds::new(
            0,
            union_size(&sets.s1, &sets.s3) + 1,
            vec![Formula::NoLowerBoundTheorem],
            vec![Formula::SquareCaseLocal],
        )
        .assume(Assumption::SquareInK)
        .checked();
    };
    let (h12, h13) = (r.h12 as u64, r.h13 as u64);
    let basic_upper = h13 + sets.size_s13l as u64 + 2;
    let out = if three_divides(&curve.a) {
        SelmerBounds::new(
            h12,
            basic_upper,
            vec![Formula::SClassRank],
            vec![Formula::SClassRankPlusLocal],
        )
    } else {
        let (s2, s3) = (sets.s2.len() as i64, sets.s3.len() as i64);
        let refined_lower = (h13 as i64 + s3 - s2 - 1).max(0) as u64;
        let refined_upper = (h12 as i64 + sets.size_s12l as i64 + s3 - s2 + 1).max(0) as u64;
        let (lower, lower_source) = max_with(
            h12,
            Formula::SClassRank,
            refined_lower,
            Formula::DualityRefined,
        );
        let (upper, upper_source) = min_with(
            basic_upper,
            Formula::SClassRankPlusLocal,
            refined_upper,
            Formula::DualityRefined,
        );
        SelmerBounds::new(lower, upper, lower_source, upper_source)
            .assume(Assumption::ThreeDoesNotDivideA)
    };
    with_rank_tags(out.assume(Assumption::NotSquareInK), r).checked()
}

/// Bounds on `dim Sel^Ψ̂(Ê_{a,b}/K)`: `[h³_{S₁,₃}, h³_{S₁,₂} + |S₁,₂(L)| + 2]`.
pub fn type2_dual_bounds(
    sets: &LocalPrimeSets2,
    ranks: Option<&Type2Ranks>,
) -> Result<SelmerBounds> {
    let Some(r) = ranks else {
        return SelmerBounds::new(
            0,
            union_size(&sets.s1, &sets.s2) + 1,
            vec![Formula::NoLowerBoundTheorem],
            vec![Formula::SquareCaseLocal],
        )
        .assume(Assumption::SquareInK)
        .checked();
    };
    let out = SelmerBounds::new(
        r.h13 as u64,
        (r.h12 as u64) + sets.size_s12l as u64 + 2,
        vec![Formula::SClassRank],
        vec![Formula::SClassRankPlusLocal],
    )
    .assume(Assumption::NotSquareInK);
    with_rank_tags(out, r).checked()
}

/// `dim Sel^Ψ̂ - dim Sel^Ψ = |S₂| - |S₃| + 1` when `3 ∤ a`.
pub fn duality_shift(s2_size: usize, s3_size: usize) -> i64 {
    s2_size as i64 - s3_size as i64 + 1
}

/// Bounds on `dim Sel³(E_{a,b}/K)`.
pub fn type2_sel3_bounds(
    curve: &Curve2,
    sets: &LocalPrimeSets2,
    ranks: Option<&Type2Ranks>,
    cert: Option<&RankCertificate>,
) -> Result<SelmerBounds> {
    let rank = cert.map_or(0, |c| c.rank);
    let mut out = match ranks {
        None => SelmerBounds::new(
            rank,
            union_size(&sets.s1, &sets.s2) + union_size(&sets.s1, &sets.s3) + 2,
            vec![Formula::MordellWeilRank],
            vec![Formula::SquareCaseSum],
        )
        .assume(Assumption::SquareInK),
        Some(r) => {
            let psi = type2_bounds(curve, sets, Some(r))?;
            let dual = type2_dual_bounds(sets, Some(r))?;
            let (lower, lower_source) = max_with(
                psi.lower,
                Formula::PhiSelmerInjects,
                rank,
                Formula::MordellWeilRank,
            );
            let basic = (r.h12 + r.h13) as u64 + (sets.size_s12l + sets.size_s13l) as u64 + 4;
            let (upper, upper_source) = if three_divides(&curve.a) {
                (basic, vec![Formula::SelmerSum])
            } else {
                let shift = duality_shift(sets.s2.len(), sets.s3.len());
                let shifted_dual = ((psi.upper as i64 + shift).max(0) as u64).min(dual.upper);
                min_with(
                    basic,
                    Formula::SelmerSum,
                    psi.upper + shifted_dual,
                    Formula::ShiftedSelmerSum,
                )
            };
            let mut b = SelmerBounds::new(lower, upper, lower_source, upper_source);
            for a in psi.assumptions {
                b = b.assume(a);
            }
            b
        }
    };
    if cert.is_some() {
        out = out.assume(Assumption::ExternalRank);
    }
    out.checked()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duality_shift_values() {
        assert_eq!(duality_shift(1, 0), 2);
        assert_eq!(duality_shift(0, 1), 0);
    }

    #[test]
    fn rank_identity_values() {
        assert_eq!(rank_identity(1, 0, 0).unwrap(), 1);
        assert_eq!(rank_identity(3, 0, 0).unwrap(), 3);
        assert_eq!(rank_identity(5, 1, 4).unwrap(), 0);
        assert!(rank_identity(1, 1, 1).is_err());
    }

    #[test]
    fn algebra_shapes() {
        assert_eq!(
            rational_algebra(&BigInt::from(5)),
            RationalAlgebra::Imaginary
        );
        assert_eq!(rational_algebra(&BigInt::from(-5)), RationalAlgebra::Real);
        assert_eq!(
            rational_algebra(&BigInt::from(16)),
            RationalAlgebra::EisensteinField
        );
        assert_eq!(rational_algebra(&BigInt::from(-12)), RationalAlgebra::Split);
    }
}

//! Analysis reports for the `type1`, `type2` and `cubesum` commands.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use cubic_selmer::arith;
use cubic_selmer::classgroup::ClassGroupEngine;
use cubic_selmer::cubesum::{cube_sum_verdict, CubeSumVerdict, VerdictFlags};
use cubic_selmer::curves::{normalize_type1, Curve2};
use cubic_selmer::eisenstein::{is_square_in_k, KPrime};
use cubic_selmer::localdata::{compute_s123, local_sets_type1, tamagawa_shift};
use cubic_selmer::selmer::{
    duality_shift, rank_identity, sha_floor, type1_bounds_k, type1_bounds_q, type1_class_ranks,
    type1_dual_bounds_q, type1_exact_with_root_number, type1_sel3_bounds, type1_sel3_refined,
    type2_bounds, type2_class_ranks, type2_dual_bounds, type2_sel3_bounds, RankCertificate,
    SelmerBounds,
};
use cubic_selmer::{Error, Result};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// A rank given as an exact value or as a range `lo..hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankSpec {
    pub lo: u64,
    pub hi: u64,
}

impl RankSpec {
    pub fn exact(r: u64) -> Self {
        Self { lo: r, hi: r }
    }

    /// The certificate that is safe to use: the rank is at least `lo`.
    pub fn certificate(self) -> RankCertificate {
        RankCertificate {
            rank: self.lo,
            ..Default::default()
        }
    }
}

impl FromStr for RankSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad rank {t:?}: {e}"))
        };
        match s.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (parse(lo)?, parse(hi)?);
                if lo > hi {
                    return Err(format!("empty rank range {s}"));
                }
                Ok(Self { lo, hi })
            }
            None => parse(s).map(Self::exact),
        }
    }
}

impl fmt::Display for RankSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{},{}]", self.lo, self.hi)
        }
    }
}

/// A bound interval with its provenance, integers as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: String,
    pub upper: String,
    pub lower_source: Vec<String>,
    pub upper_source: Vec<String>,
    pub assumptions: Vec<String>,
}

impl From<&SelmerBounds> for Interval {
    fn from(b: &SelmerBounds) -> Self {
        Self {
            lower: b.lower.to_string(),
            upper: b.upper.to_string(),
            lower_source: b.lower_source.iter().map(|f| f.tag().to_string()).collect(),
            upper_source: b.upper_source.iter().map(|f| f.tag().to_string()).collect(),
            assumptions: b.assumptions.iter().map(|a| a.tag().to_string()).collect(),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

pub fn prime_labels(primes: &[KPrime]) -> Vec<String> {
    primes.iter().map(KPrime::label).collect()
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(T::to_string).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Type1Args {
    pub a: BigInt,
    pub root_number: Option<i8>,
    pub rank: Option<RankSpec>,
    pub sha_phi: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Type1Analysis {
    /// `a` after removing sixth powers and factors of `-27`.
    pub a: String,
    pub square_in_k: bool,
    pub s_a: Vec<String>,
    pub s_a_q: Vec<String>,
    pub s_aalpha2_q: Vec<String>,
    pub size_s_a_l: String,
    pub h3_s_a_l: Option<String>,
    pub h3_phi_hat: Option<String>,
    pub h3_phi: Option<String>,
    pub phi_k: Interval,
    /// `dim Sel^φ(E_a/K)` pinned by the root number, when `S_a = ∅`.
    pub phi_k_exact: Option<String>,
    pub sel3_k: Interval,
    /// Bounds over `Q` for `E_a` with `a` only sixth-power reduced.
    pub rational_a: String,
    pub phi_q: Interval,
    pub phi_hat_q: Interval,
    pub sha_phi_floor: Option<String>,
    /// `dim Sel^φ - dim Ш[φ]` when both are known.
    pub rank_from_identity: Option<String>,
}

fn sixth_power_reduced(a: &BigInt) -> Result<BigInt> {
    let mut out = a.clone();
    for (p, e) in arith::factor(a)? {
        out /= BigInt::from(p).pow(6 * (e / 6));
    }
    Ok(out)
}

pub fn analyze_type1(engine: &ClassGroupEngine, args: &Type1Args) -> Result<Type1Analysis> {
    let curve = normalize_type1(&args.a)?;
    let a = &curve.a;
    let sets = local_sets_type1(a)?;
    let ranks = type1_class_ranks(engine, a, &sets)?;
    let phi = type1_bounds_k(a, &sets, ranks.as_ref())?;
    let cert = args.rank.map(RankSpec::certificate);
    let exact = match args.root_number {
        Some(w) if sets.s_a.is_empty() && ranks.is_some() => {
            Some(type1_exact_with_root_number(a, &sets, &phi, w)?)
        }
        Some(_) => return Err(Error::InvalidInput(
            "a root number pins the dimension only when S_a is empty and a is not a square in K"
                .into(),
        )),
        None => None,
    };
    let sel3 = match exact {
        Some(d) => type1_sel3_refined(d, cert.as_ref())?,
        None => type1_sel3_bounds(a, &sets, &phi, cert.as_ref())?,
    };
    let rational_a = sixth_power_reduced(&args.a)?;
    let sha_phi_floor = match (&ranks, &cert) {
        (Some(r), Some(_)) => Some(sha_floor(r.h_sl, cert.as_ref())?.to_string()),
        _ => None,
    };
    let rank_from_identity = match (exact, args.sha_phi) {
        (Some(d), Some(s)) => Some(rank_identity(d, 0, s)?.to_string()),
        _ => None,
    };
    Ok(Type1Analysis {
        a: a.to_string(),
        square_in_k: is_square_in_k(a),
        s_a: prime_labels(&sets.s_a),
        s_a_q: strings(&sets.s_a_q),
        s_aalpha2_q: strings(&sets.s_aalpha2_q),
        size_s_a_l: sets.size_sal.to_string(),
        h3_s_a_l: ranks.map(|r| r.h_sl.to_string()),
        h3_phi_hat: ranks.map(|r| r.h_phi_hat.to_string()),
        h3_phi: ranks.map(|r| r.h_phi.to_string()),
        phi_k: (&phi).into(),
        phi_k_exact: exact.map(|d| d.to_string()),
        sel3_k: (&sel3).into(),
        phi_q: (&type1_bounds_q(engine, &rational_a)?).into(),
        phi_hat_q: (&type1_dual_bounds_q(engine, &rational_a)?).into(),
        rational_a: rational_a.to_string(),
        sha_phi_floor,
        rank_from_identity,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Type2Args {
    pub a: BigInt,
    pub b: BigInt,
    pub rank: Option<RankSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Type2Analysis {
    pub a: String,
    pub b: String,
    pub square_in_k: bool,
    pub s1: Vec<String>,
    pub s2: Vec<String>,
    pub s3: Vec<String>,
    pub size_s12_l: String,
    pub size_s13_l: String,
    pub h3_s12_l: Option<String>,
    pub h3_s13_l: Option<String>,
    /// `dim Sel^Ψ̂ - dim Sel^Ψ`, reported when `3 ∤ a`.
    pub duality_shift: Option<String>,
    pub psi: Interval,
    pub psi_hat: Interval,
    pub sel3: Interval,
}

pub fn analyze_type2(engine: &ClassGroupEngine, args: &Type2Args) -> Result<Type2Analysis> {
    let curve = Curve2::new(args.a.clone(), args.b.clone())?;
    let sets = compute_s123(&curve)?;
    let ranks = type2_class_ranks(engine, &curve, &sets)?;
    let psi = type2_bounds(&curve, &sets, ranks.as_ref())?;
    let psi_hat = type2_dual_bounds(&sets, ranks.as_ref())?;
    let cert = args.rank.map(RankSpec::certificate);
    let sel3 = type2_sel3_bounds(&curve, &sets, ranks.as_ref(), cert.as_ref())?;
    let three_divides_a = arith::valuation(&curve.a, 3) > 0;
    let shift = if three_divides_a {
        None
    } else {
        let shift = duality_shift(sets.s2.len(), sets.s3.len());
        let local = tamagawa_shift(&curve)?;
        if shift != local {
            return Err(Error::Consistency(format!(
                "duality shift {shift} from S₂, S₃ disagrees with {local} from the local rows"
            )));
        }
        Some(shift.to_string())
    };
    Ok(Type2Analysis {
        a: curve.a.to_string(),
        b: curve.b.to_string(),
        square_in_k: is_square_in_k(&curve.a),
        s1: prime_labels(&sets.s1),
        s2: prime_labels(&sets.s2),
        s3: prime_labels(&sets.s3),
        size_s12_l: sets.size_s12l.to_string(),
        size_s13_l: sets.size_s13l.to_string(),
        h3_s12_l: ranks.map(|r| r.h12.to_string()),
        h3_s13_l: ranks.map(|r| r.h13.to_string()),
        duality_shift: shift,
        psi: (&psi).into(),
        psi_hat: (&psi_hat).into(),
        sel3: (&sel3).into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub label: String,
    pub curve_a: String,
    pub x: String,
    pub y: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeSumAnalysis {
    #[serde(rename = "D")]
    pub d: String,
    pub status: String,
    pub rank: Option<String>,
    pub rank_floor: String,
    pub hypotheses: Vec<String>,
    pub assumed: Vec<String>,
    pub certificate: Option<CertificateReport>,
    pub selmer_dim: String,
    pub source: String,
}

impl From<&CubeSumVerdict> for CubeSumAnalysis {
    fn from(v: &CubeSumVerdict) -> Self {
        let certificate = v.certificate.as_ref().map(|c| CertificateReport {
            label: c.label.clone(),
            curve_a: c.curve_a.to_string(),
            x: c.point.x().map_or_else(String::new, ToString::to_string),
            y: c.point.y().map_or_else(String::new, ToString::to_string),
        });
        Self {
            d: v.d.to_string(),
            status: v.status.to_string(),
            rank: v.rank.map(|r| r.to_string()),
            rank_floor: v.rank_floor.to_string(),
            hypotheses: strings(&v.hypotheses),
            assumed: strings(&v.assumed),
            certificate,
            selmer_dim: v.selmer_dim.to_string(),
            source: v.source.to_string(),
        }
    }
}

pub fn analyze_cubesum(d: u64, flags: VerdictFlags) -> Result<CubeSumAnalysis> {
    Ok((&cube_sum_verdict(d, flags)?).into())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Analysis {
    Type1(Type1Analysis),
    Type2(Type2Analysis),
    CubeSum(CubeSumAnalysis),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    /// The command-line inputs, echoed back.
    pub input: BTreeMap<String, String>,
    pub analysis: Analysis,
    /// Wall-clock milliseconds per phase.
    pub timings_ms: BTreeMap<String, String>,
}

impl AnalysisReport {
    /// Run `f` and wrap its result with the input echo and elapsed time.
    pub fn timed(
        input: BTreeMap<String, String>,
        f: impl FnOnce() -> Result<Analysis>,
    ) -> Result<Self> {
        let start = Instant::now();
        let analysis = f()?;
        let mut timings_ms = BTreeMap::new();
        timings_ms.insert("total".to_string(), start.elapsed().as_millis().to_string());
        Ok(Self {
            input,
            analysis,
            timings_ms,
        })
    }
}

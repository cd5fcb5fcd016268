//! Class groups of quadratic fields through reduced binary quadratic forms.
//!
//! For a fundamental discriminant `D` the (narrow, when `D > 0`) form class group is built
//! by enumerating reduced forms and composing them. Imaginary classes are single reduced
//! forms; real classes are cycles of reduced forms under the reduction operator `ρ`.
//!
//! The group is assembled one generator at a time, recording the exponent vector of every
//! class. That gives a lower-triangular relation matrix from which the invariant factors
//! (Smith normal form) and 3-ranks of quotients by prime classes (linear algebra over `F_3`)
//! are read off.
//!
//! The biquadratic field `L = Q(ζ, √a)` enters only through its two quadratic subfields
//! other than `K`: `F₁ = Q(√a')` and `F₂ = Q(√-3a')`, where `a'` is the squarefree part of
//! `a`. The 3-rank of `Cl(L)` is the sum of their 3-ranks. For an `S` built from rational
//! data the subgroup generated by primes of `S` splits along the two components, since the
//! conjugate of a prime class is its inverse modulo principal ideals and 2 is invertible on
//! 3-groups. So `h³_{S(L)}` is the sum of the 3-ranks of each quadratic class group modulo
//! the classes of primes above the residue characteristics of `S`.
//!
//! Forms use `i64` coefficients with `i128` intermediates. The enumeration limit keeps every
//! value far inside that range.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::ToPrimitive;

use crate::arith::squarefree_core;
use crate::error::{invalid, Error, Result};

/// Default bound on `|D|` for form enumeration.
pub const DEFAULT_LIMIT: u64 = 25_000_000;

/// A binary quadratic form `a x² + b xy + c y²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.a, -self.b, self.c)
    }

    /// Reducedness in the sense appropriate to the sign of the discriminant.
    pub fn is_reduced(&self) -> bool {
        let d = self.discriminant();
        if d < 0 {
            let (a, b, c) = (self.a, self.b, self.c);
            a > 0 && b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
        } else {
            let s = (d as u64).sqrt() as i64;
            let a2 = 2 * self.a.abs();
            0 < self.b && self.b <= s && a2 + self.b > s && a2 - self.b <= s
        }
    }
}

impl std::fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Invariant factors `d₁ | d₂ | …` of a finite abelian group with a generator for each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroupStructure {
    pub invariant_factors: Vec<u64>,
    pub generators: Vec<QuadraticForm>,
}

impl AbelianGroupStructure {
    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn three_rank(&self) -> u32 {
        self.invariant_factors
            .iter()
            .filter(|d| *d % 3 == 0)
            .count() as u32
    }
}

/// Per-component data behind an `S`-class 3-rank of `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SClassData {
    pub d1: i64,
    pub d2: i64,
    pub rank1: u32,
    pub rank2: u32,
    pub s_primes: Vec<u64>,
}

impl SClassData {
    pub fn rank(&self) -> u32 {
        self.rank1 + self.rank2
    }
}

/// Discriminant of `Q(√d)`.
pub fn fundamental_discriminant(d: i64) -> Result<i64> {
    let m = squarefree_core(&BigInt::from(d))?
        .to_i64()
        .expect("core is bounded by d");
    if m == 1 {
        return Err(invalid(format!(
            "{d} is a square, so Q(√{d}) is not a field"
        )));
    }
    Ok(if m.rem_euclid(4) == 1 { m } else { 4 * m })
}

fn is_fundamental(d: i64) -> bool {
    d != 0 && d != 1 && fundamental_discriminant(d).ok() == Some(d)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
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

/// Gauss composition of two primitive forms of the same discriminant, unreduced.
fn compose_raw(f: QuadraticForm, g: QuadraticForm) -> QuadraticForm {
    let d = f.discriminant() as i128;
    let (a1, b1, a2, b2) = (f.a as i128, f.b as i128, g.a as i128, g.b as i128);
    let beta = (b1 + b2) / 2;
    let (g1, u1, v1) = ext_gcd(a1, a2);
    let (e, x, w) = ext_gcd(g1, beta);
    let (u, v) = (x * u1, x * v1);
    let a3 = a1 * a2 / (e * e);
    let num = u * a1 * b2 + v * a2 * b1 + w * ((b1 * b2 + d) / 2);
    debug_assert_eq!(num % e, 0);
    let b3 = (num / e).rem_euclid(2 * a3.abs());
    let c3 = (b3 * b3 - d) / (4 * a3);
    debug_assert_eq!(b3 * b3 - 4 * a3 * c3, d);
    QuadraticForm::new(a3 as i64, b3 as i64, c3 as i64)
}

fn reduce_imaginary(f: QuadraticForm) -> QuadraticForm {
    let d = f.discriminant();
    let (mut a, mut b) = (f.a, f.b);
    loop {
        // Bring b into (-a, a].
        let two_a = 2 * a;
        b = b.rem_euclid(two_a);
        if b > a {
            b -= two_a;
        }
        let c = (b * b - d) / (4 * a);
        if a > c {
            (a, b) = (c, -b);
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        return QuadraticForm::new(a, b, c);
    }
}

/// One step of the real reduction operator `ρ`.
fn rho(f: QuadraticForm, isqrt_d: i64) -> QuadraticForm {
    let d = f.discriminant();
    let c = f.c;
    let m = 2 * c.abs();
    let b = if c.abs() <= isqrt_d {
        isqrt_d - (isqrt_d + f.b).rem_euclid(m)
    } else {
        let r = (-f.b).rem_euclid(m);
        if r > c.abs() {
            r - m
        } else {
            r
        }
    };
    QuadraticForm::new(c, b, (b * b - d) / (4 * c))
}

fn reduce_real(mut f: QuadraticForm, isqrt_d: i64) -> QuadraticForm {
    while !f.is_reduced() {
        f = rho(f, isqrt_d);
    }
    f
}

/// The set of classes of discriminant `D` with composition by table lookup.
enum FormSpace {
    Imaginary {
        forms: Vec<QuadraticForm>,
        index: HashMap<(i64, i64), usize>,
    },
    Real {
        isqrt_d: i64,
        /// One reduced representative per cycle.
        reps: Vec<QuadraticForm>,
        /// Cycle id of every reduced form.
        cycle_of: HashMap<(i64, i64), usize>,
    },
}

impl FormSpace {
    fn build(d: i64) -> Self {
        if d < 0 {
            let forms = reduced_forms_imaginary(d);
            let index = forms
                .iter()
                .enumerate()
                .map(|(i, f)| ((f.a, f.b), i))
                .collect();
            FormSpace::Imaginary { forms, index }
        } else {
            let isqrt_d = (d as u64).sqrt() as i64;
            let mut cycle_of = HashMap::new();
            let mut reps = Vec::new();
            for f in reduced_forms_real(d, isqrt_d) {
                if cycle_of.contains_key(&(f.a, f.b)) {
                    continue;
                }
                let id = reps.len();
                reps.push(f);
                let mut g = f;
                loop {
                    cycle_of.insert((g.a, g.b), id);
                    g = rho(g, isqrt_d);
                    if g == f {
                        break;
                    }
                }
            }
            FormSpace::Real {
                isqrt_d,
                reps,
                cycle_of,
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            FormSpace::Imaginary { forms, .. } => forms.len(),
            FormSpace::Real { reps, .. } => reps.len(),
        }
    }

    fn rep(&self, id: usize) -> QuadraticForm {
        match self {
            FormSpace::Imaginary { forms, .. } => forms[id],
            FormSpace::Real { reps, .. } => reps[id],
        }
    }

    fn classify(&self, f: QuadraticForm) -> usize {
        match self {
            FormSpace::Imaginary { index, .. } => {
                let r = reduce_imaginary(f);
                index[&(r.a, r.b)]
            }
            FormSpace::Real {
                isqrt_d, cycle_of, ..
            } => {
                let r = reduce_real(f, *isqrt_d);
                cycle_of[&(r.a, r.b)]
            }
        }
    }

    fn compose(&self, i: usize, j: usize) -> usize {
        self.classify(compose_raw(self.rep(i), self.rep(j)))
    }
}

fn principal_form(d: i64) -> QuadraticForm {
    if d < 0 {
        let b = d.rem_euclid(2);
        QuadraticForm::new(1, b, (b * b - d) / 4)
    } else {
        let s = (d as u64).sqrt() as i64;
        let b = if (s - d).rem_euclid(2) == 0 { s } else { s - 1 };
        QuadraticForm::new(1, b, (b * b - d) / 4)
    }
}

fn reduced_forms_imaginary(d: i64) -> Vec<QuadraticForm> {
    let mut out = Vec::new();
    let amax = ((-d / 3) as u64).sqrt() as i64;
    for a in 1..=amax {
        let mut b = -a + 1;
        if (b - d).rem_euclid(2) != 0 {
            b += 1;
        }
        while b <= a {
            let num = b * b - d;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                let f = QuadraticForm::new(a, b, c);
                if c >= a && f.is_reduced() {
                    out.push(f);
                }
            }
            b += 2;
        }
    }
    out
}

fn reduced_forms_real(d: i64, s: i64) -> Vec<QuadraticForm> {
    let mut out = Vec::new();
    let mut b = if (s - d).rem_euclid(2) == 0 { s } else { s - 1 };
    while b > 0 {
        let n = (d - b * b) / 4;
        // Need |a| = t with s < 2t + b and 2t - b <= s.
        let tmin = (s - b) / 2 + 1;
        let tmax = (s + b) / 2;
        for t in tmin..=tmax.min(n) {
            if n % t == 0 {
                out.push(QuadraticForm::new(t, b, -n / t));
                out.push(QuadraticForm::new(-t, b, n / t));
            }
        }
        b -= 2;
    }
    out
}

/// Class group of a fundamental discriminant, with discrete logarithms of every class.
pub struct ClassGroup {
    disc: i64,
    space: FormSpace,
    identity: usize,
    /// Incremental generators and the exponent vector of each class with respect to them.
    generators: Vec<usize>,
    vectors: Vec<Vec<i64>>,
    /// Row `i` reads `orders[i]·e_i - (vector of g_i^orders[i])`.
    relations: Vec<Vec<i64>>,
    structure: AbelianGroupStructure,
}

impl ClassGroup {
    pub fn compute(d: i64, limit: u64) -> Result<Self> {
        if !is_fundamental(d) {
            return Err(invalid(format!("{d} is not a fundamental discriminant")));
        }
        if d.unsigned_abs() > limit {
            return Err(Error::LimitExceeded {
                what: "|discriminant|",
                value: d.unsigned_abs().to_string(),
                limit: limit.to_string(),
            });
        }
        let space = FormSpace::build(d);
        let h = space.len();
        let identity = space.classify(principal_form(d));

        let mut vectors: Vec<Option<Vec<i64>>> = vec![None; h];
        vectors[identity] = Some(Vec::new());
        let mut members = vec![identity];
        let mut generators = Vec::new();
        let mut relations: Vec<Vec<i64>> = Vec::new();

        for cand in 0..h {
            if vectors[cand].is_some() {
                continue;
            }
            let k = generators.len();
            generators.push(cand);
            let mut powers = vec![identity, cand];
            while vectors[*powers.last().unwrap()].is_none() {
                let next = space.compose(*powers.last().unwrap(), cand);
                powers.push(next);
            }
            let n = powers.len() - 1;
            let mut rel = padded(vectors[powers[n]].as_ref().unwrap(), k + 1);
            for x in rel.iter_mut() {
                *x = -*x;
            }
            rel[k] += n as i64;
            relations.push(rel);

            let old = members.clone();
            for &m in &old {
                let base = padded(vectors[m].as_ref().unwrap(), k + 1);
                for (i, &p) in powers.iter().enumerate().take(n).skip(1) {
                    let id = space.compose(p, m);
                    let mut v = base.clone();
                    v[k] = i as i64;
                    debug_assert!(vectors[id].is_none());
                    vectors[id] = Some(v);
                    members.push(id);
                }
            }
        }
        debug_assert_eq!(members.len(), h);
        let rank = generators.len();
        let vectors: Vec<Vec<i64>> = vectors
            .into_iter()
            .map(|v| padded(&v.unwrap(), rank))
            .collect();
        let relations: Vec<Vec<i64>> = relations.into_iter().map(|r| padded(&r, rank)).collect();

        let (factors, basis) = smith_invariants(&relations);
        let structure = AbelianGroupStructure {
            invariant_factors: factors,
            generators: basis
                .iter()
                .map(|exps| {
                    let mut acc = identity;
                    for (j, &e) in exps.iter().enumerate() {
                        let g = generators[j];
                        let step = if e >= 0 {
                            g
                        } else {
                            space.classify(space.rep(g).inverse())
                        };
                        for _ in 0..e.unsigned_abs() {
                            acc = space.compose(acc, step);
                        }
                    }
                    space.rep(acc)
                })
                .collect(),
        };

        Ok(Self {
            disc: d,
            space,
            identity,
            generators,
            vectors,
            relations,
            structure,
        })
    }

    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    pub fn order(&self) -> u64 {
        self.space.len() as u64
    }

    pub fn structure(&self) -> &AbelianGroupStructure {
        &self.structure
    }

    pub fn identity_form(&self) -> QuadraticForm {
        self.space.rep(self.identity)
    }

    /// Reduced representatives, one per class.
    pub fn class_representatives(&self) -> Vec<QuadraticForm> {
        (0..self.space.len()).map(|i| self.space.rep(i)).collect()
    }

    /// Reduced representative of the class of `f`.
    pub fn reduce(&self, f: QuadraticForm) -> QuadraticForm {
        self.space.rep(self.space.classify(f))
    }

    pub fn compose(&self, f: QuadraticForm, g: QuadraticForm) -> QuadraticForm {
        self.space.rep(self.space.classify(compose_raw(f, g)))
    }

    /// Order of the class of `f`.
    pub fn element_order(&self, f: QuadraticForm) -> u64 {
        let start = self.space.classify(f);
        let mut cur = start;
        let mut n = 1;
        while cur != self.identity {
            cur = self.space.compose(cur, start);
            n += 1;
        }
        n
    }

    pub fn three_rank(&self) -> u32 {
        self.structure.three_rank()
    }

    /// Reduced forms representing the classes of the primes above `ell`.
    pub fn prime_classes_above(&self, ell: u64) -> Vec<QuadraticForm> {
        prime_forms(self.disc, ell)
            .into_iter()
            .map(|f| self.reduce(f))
            .collect()
    }

    /// 3-rank of the class group modulo the classes of all primes above `primes`.
    pub fn s_three_rank(&self, primes: &[u64]) -> u32 {
        let mut rows = self.relations.clone();
        for &ell in primes {
            for f in prime_forms(self.disc, ell) {
                rows.push(self.vectors[self.space.classify(f)].clone());
            }
        }
        (self.generators.len() - rank_mod3(&rows)) as u32
    }
}

fn padded(v: &[i64], len: usize) -> Vec<i64> {
    let mut out = v.to_vec();
    out.resize(len, 0);
    out
}

/// Forms `(ell, b, c)` for the primes above `ell` in the order of discriminant `d`, or the
/// principal form when `ell` is inert.
fn prime_forms(d: i64, ell: u64) -> Vec<QuadraticForm> {
    let l = ell as i64;
    let modulus = 4 * l as i128;
    let roots: Vec<i64> = (0..2 * l)
        .filter(|b| (b - d).rem_euclid(2) == 0)
        .filter(|&b| ((b as i128) * (b as i128) - d as i128).rem_euclid(modulus) == 0)
        .take(2)
        .collect();
    if roots.is_empty() {
        return vec![principal_form(d)];
    }
    roots
        .into_iter()
        .map(|b| {
            QuadraticForm::new(
                l,
                b,
                ((b as i128 * b as i128 - d as i128) / (4 * l as i128)) as i64,
            )
        })
        .collect()
}

/// Rank over `F_3` of an integer matrix.
fn rank_mod3(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.rem_euclid(3)).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col]; // 1 and 2 are their own inverses mod 3
        for x in m[rank].iter_mut() {
            *x = (*x * inv) % 3;
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..cols {
                    m[r][c] = (m[r][c] - f * m[rank][c]).rem_euclid(3);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Invariant factors (> 1) of `Z^k / rowspace(rel)` for a square nonsingular `rel`, with the
/// coordinates of a generator for each factor.
fn smith_invariants(rel: &[Vec<i64>]) -> (Vec<u64>, Vec<Vec<i64>>) {
    let k = rel.len();
    let mut a: Vec<Vec<i128>> = rel
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    // Column operations on `a` are mirrored as inverse row operations on `w` (= V⁻¹).
    let mut w: Vec<Vec<i128>> = (0..k)
        .map(|i| (0..k).map(|j| (i == j) as i128).collect())
        .collect();

    for t in 0..k {
        loop {
            // Pivot: smallest nonzero entry in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..k {
                for j in t..k {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            w.swap(t, pj);

            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..k {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    for j in t..k {
                        a[i][j] -= q * a[t][j];
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..k {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    // col_j -= q col_t  ⇒  row_t of V⁻¹ += q row_j
                    for row in a.iter_mut() {
                        row[j] -= q * row[t];
                    }
                    for c in 0..k {
                        w[t][c] += q * w[j][c];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // Divisibility: fold any offending row into row t and repeat.
            let bad = (t + 1..k).find(|&i| (t + 1..k).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in t..k {
                        a[t][j] += a[i][j];
                    }
                }
                None => break,
            }
        }
    }
    let mut factors = Vec::new();
    let mut basis = Vec::new();
    for t in 0..k {
        let d = a[t][t].unsigned_abs() as u64;
        if d > 1 {
            factors.push(d);
            basis.push(w[t].iter().map(|&x| x as i64).collect());
        }
    }
    (factors, basis)
}

/// Class group of a fundamental discriminant using the default limit.
pub fn form_class_group(d: i64) -> Result<AbelianGroupStructure> {
    Ok(ClassGroup::compute(d, DEFAULT_LIMIT)?.structure)
}

/// 3-rank of the class group of discriminant `d`.
pub fn three_rank(d: i64) -> Result<u32> {
    Ok(form_class_group(d)?.three_rank())
}

/// Reduced forms for the prime classes above `ell` in discriminant `d`.
pub fn prime_classes_above(d: i64, ell: u64) -> Result<Vec<QuadraticForm>> {
    Ok(ClassGroup::compute(d, DEFAULT_LIMIT)?.prime_classes_above(ell))
}

/// Memoising front end with an optional on-disk cache of invariant factors.
///
/// The cache file holds lines `D<TAB>d1,d2,...`. Lines that do not parse, or whose factors
/// do not form a divisibility chain, are ignored and recomputed. Readers take a shared lock
/// and writers an exclusive one.
pub struct ClassGroupEngine {
    limit: u64,
    cache_path: Option<PathBuf>,
    groups: Mutex<HashMap<i64, Arc<ClassGroup>>>,
    factors: Mutex<HashMap<i64, Vec<u64>>>,
}

impl Default for ClassGroupEngine {
    fn default() -> Self {
        Self::new(DEFAULT_LIMIT, None)
    }
}

impl ClassGroupEngine {
    pub fn new(limit: u64, cache_path: Option<PathBuf>) -> Self {
        let engine = Self {
            limit,
            cache_path,
            groups: Mutex::new(HashMap::new()),
            factors: Mutex::new(HashMap::new()),
        };
        engine.load_cache();
        engine
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn load_cache(&self) {
        let Some(path) = &self.cache_path else { return };
        let Ok(file) = File::open(path) else { return };
        if file.lock_shared().is_err() {
            return;
        }
        let mut map = self.factors.lock().unwrap();
        for line in BufReader::new(&file)
            .lines()
            .map_while(std::result::Result::ok)
        {
            if let Some((d, f)) = parse_cache_line(&line) {
                map.insert(d, f);
            }
        }
    }

    fn append_cache(&self, d: i64, factors: &[u64]) {
        let Some(path) = &self.cache_path else { return };
        let Ok(mut file) = OpenOptions::new().create(true).append(true).open(path) else {
            return;
        };
        if file.lock().is_ok() {
            let list: Vec<String> = factors.iter().map(u64::to_string).collect();
            let _ = writeln!(file, "{d}\t{}", list.join(","));
        }
    }

    pub fn class_group(&self, d: i64) -> Result<Arc<ClassGroup>> {
        if let Some(g) = self.groups.lock().unwrap().get(&d) {
            return Ok(Arc::clone(g));
        }
        let group = Arc::new(ClassGroup::compute(d, self.limit)?);
        let factors = group.structure().invariant_factors.clone();
        let fresh = self
            .factors
            .lock()
            .unwrap()
            .insert(d, factors.clone())
            .is_none();
        if fresh {
            self.append_cache(d, &factors);
        }
        self.groups.lock().unwrap().insert(d, Arc::clone(&group));
        Ok(group)
    }

    pub fn invariant_factors(&self, d: i64) -> Result<Vec<u64>> {
        if let Some(f) = self.factors.lock().unwrap().get(&d) {
            return Ok(f.clone());
        }
        Ok(self.class_group(d)?.structure().invariant_factors.clone())
    }

    pub fn three_rank(&self, d: i64) -> Result<u32> {
        Ok(self
            .invariant_factors(d)?
            .iter()
            .filter(|x| *x % 3 == 0)
            .count() as u32)
    }

    /// 3-rank of `Cl(Q(√m))` modulo the classes of primes above `primes`. `Q(√-3) = K` and
    /// the trivial field `Q` both contribute 0.
    pub fn field_s_three_rank(&self, m: i64, primes: &[u64]) -> Result<u32> {
        let d = fundamental_discriminant(m)?;
        if d == -3 {
            return Ok(0);
        }
        if primes.is_empty() {
            return self.three_rank(d);
        }
        Ok(self.class_group(d)?.s_three_rank(primes))
    }

    /// 3-rank of `Cl(L) = Cl(K(√a))`.
    pub fn biquadratic_three_rank(&self, a: &BigInt) -> Result<u32> {
        Ok(self.s_class_three_rank(a, &[])?.rank())
    }

    /// `h³_{S(L)}` for an `S` described by its residue characteristics.
    pub fn s_class_three_rank(&self, a: &BigInt, residue_chars: &[u64]) -> Result<SClassData> {
        let (d1, d2) = quadratic_components(a)?;
        let mut s_primes = residue_chars.to_vec();
        s_primes.sort_unstable();
        s_primes.dedup();
        Ok(SClassData {
            d1,
            d2,
            rank1: self.field_s_three_rank(d1, &s_primes)?,
            rank2: self.field_s_three_rank(d2, &s_primes)?,
            s_primes,
        })
    }
}

/// Squarefree `d₁ = a'` and `d₂` with `Q(√d₂) = Q(√-3a')`, for `a` not a square in `K`.
pub fn quadratic_components(a: &BigInt) -> Result<(i64, i64)> {
    let core = squarefree_core(a)?
        .to_i64()
        .ok_or_else(|| invalid("squarefree part out of range"))?;
    if core == 1 || core == -3 {
        return Err(invalid(format!(
            "{a} is a square in K, so L is not a field"
        )));
    }
    let minus3 = -3 * core;
    let d2 = if minus3 % 9 == 0 { minus3 / 9 } else { minus3 };
    Ok((core, d2))
}

fn parse_cache_line(line: &str) -> Option<(i64, Vec<u64>)> {
    let (d, rest) = line.split_once('\t')?;
    let d: i64 = d.trim().parse().ok()?;
    let factors: Vec<u64> = if rest.trim().is_empty() {
        Vec::new()
    } else {
        rest.split(',')
            .map(|x| x.trim().parse().ok())
            .collect::<Option<_>>()?
    };
    let chain = factors.windows(2).all(|w| w[1] % w[0] == 0) && factors.iter().all(|&x| x > 1);
    (chain && is_fundamental(d)).then_some((d, factors))
}

/// Class number by brute enumeration: reduced forms (imaginary) or `ρ`-cycles (real).
pub fn count_classes(d: i64) -> usize {
    FormSpace::build(d).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_discriminants() {
        assert_eq!(fundamental_discriminant(5).unwrap(), 5);
        assert_eq!(fundamental_discriminant(-15).unwrap(), -15);
        assert_eq!(fundamental_discriminant(2).unwrap(), 8);
        assert_eq!(fundamental_discriminant(-1).unwrap(), -4);
        assert_eq!(fundamental_discriminant(12).unwrap(), 12);
        assert!(fundamental_discriminant(9).is_err());
    }

    #[test]
    fn small_groups() {
        assert_eq!(
            form_class_group(-3).unwrap().invariant_factors,
            Vec::<u64>::new()
        );
        assert_eq!(form_class_group(-23).unwrap().invariant_factors, vec![3]);
        assert_eq!(form_class_group(-84).unwrap().invariant_factors, vec![2, 2]);
        assert_eq!(
            form_class_group(5).unwrap().invariant_factors,
            Vec::<u64>::new()
        );
        // Narrow class number of Q(√3) is 2, wide is 1.
        assert_eq!(form_class_group(12).unwrap().invariant_factors, vec![2]);
        assert_eq!(
            form_class_group(-4 * 5 * 13 * 17)
                .unwrap()
                .invariant_factors,
            vec![2, 2, 4]
        );
    }

    #[test]
    fn generators_have_listed_orders() {
        for d in [-23i64, -104, -971, -3299, -4027, 229, 1957, 2177] {
            let g = ClassGroup::compute(d, DEFAULT_LIMIT).unwrap();
            let s = g.structure();
            for (f, &n) in s.generators.iter().zip(&s.invariant_factors) {
                assert_eq!(g.element_order(*f), n, "D={d} generator {f}");
            }
            assert_eq!(s.order(), g.order());
        }
    }

    #[test]
    fn prime_class_in_minus_23() {
        let g = ClassGroup::compute(-23, DEFAULT_LIMIT).unwrap();
        let p2 = g.prime_classes_above(2);
        assert_eq!(p2.len(), 2);
        assert_eq!(g.element_order(p2[0]), 3);
        assert_eq!(g.s_three_rank(&[2]), 0);
        assert_eq!(g.prime_classes_above(5), vec![g.identity_form()]);
    }

    #[test]
    fn reduced_predicates() {
        assert!(QuadraticForm::new(1, 1, 6).is_reduced());
        assert!(QuadraticForm::new(2, -1, 3).is_reduced());
        assert!(!QuadraticForm::new(2, 3, 4).is_reduced());
    }

    #[test]
    fn cache_lines() {
        assert_eq!(parse_cache_line("-23\t3"), Some((-23, vec![3])));
        assert_eq!(parse_cache_line("-3\t"), Some((-3, vec![])));
        assert_eq!(parse_cache_line("-23\t3,2"), None);
        assert_eq!(parse_cache_line("garbage"), None);
        assert_eq!(parse_cache_line("-12\t"), None);
    }
}

//! Checks against independent computations: the analytic class number formula, brute-force
//! cube and square searches, and explicit rational solutions of x³ + y³ = Dz³.

use cubic_selmer::arith::{self, is_prime, is_square_qp, primes_up_to};
use cubic_selmer::classgroup::{
    count_classes, fundamental_discriminant, ClassGroup, ClassGroupEngine, DEFAULT_LIMIT,
};
use cubic_selmer::cubesum::{cube_sum_verdict, DShape, Status, VerdictFlags};
use cubic_selmer::eisenstein::{
    classify_prime, cubic_residue_symbol, split_prime, CubicSymbol, KPrime,
};
use cubic_selmer::localdata::compute_sa;
use num_bigint::BigInt;

/// Kronecker symbol `(d/n)` for `n > 0`, built from its values at primes.
fn kronecker(d: i64, n: u64) -> i64 {
    let mut result: i64 = 1;
    for (p, e) in arith::factor_u64(n) {
        let at_p: i64 = if p == 2 {
            match d.rem_euclid(8) {
                1 | 7 => 1,
                3 | 5 => -1,
                _ => 0,
            }
        } else {
            let r = d.rem_euclid(p as i64) as u64;
            if r == 0 {
                0
            } else if arith::pow_mod(r, (p - 1) / 2, p) == 1 {
                1
            } else {
                -1
            }
        };
        result *= at_p.pow(e);
    }
    result
}

/// `h(D) = -(w / 2|D|) Σ_{n<|D|} (D/n) n` for imaginary fundamental `D`.
fn analytic_class_number(d: i64) -> u64 {
    let m = d.unsigned_abs();
    let w = match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    let sum: i64 = (1..m).map(|n| kronecker(d, n) * n as i64).sum();
    let h = -(w as i64) * sum / (2 * m as i64);
    assert!(
        h > 0 && (-(w as i64) * sum) % (2 * m as i64) == 0,
        "formula gave non-integer for {d}"
    );
    h as u64
}

fn is_fundamental(d: i64) -> bool {
    d != 0 && d != 1 && fundamental_discriminant(d).ok() == Some(d)
}

#[test]
fn imaginary_class_numbers_match_analytic_formula() {
    let mut checked = 0;
    for d in (-4000..=-3).rev().filter(|&d| is_fundamental(d)) {
        let group = ClassGroup::compute(d, DEFAULT_LIMIT).unwrap();
        assert_eq!(group.order(), analytic_class_number(d), "h({d})");
        checked += 1;
    }
    assert!(checked > 1000);
}

#[test]
fn group_order_equals_reduced_form_count() {
    for d in (-5000..=5000).filter(|&d| is_fundamental(d)) {
        let group = ClassGroup::compute(d, DEFAULT_LIMIT).unwrap();
        assert_eq!(group.order() as usize, count_classes(d), "D = {d}");
    }
}

fn cubes_mod(ell: u64) -> Vec<bool> {
    let mut is_cube = vec![false; ell as usize];
    for y in 1..ell {
        is_cube[(y * y % ell * y % ell) as usize] = true;
    }
    is_cube
}

#[test]
fn cubic_symbol_matches_cube_search() {
    for ell in primes_up_to(1000).into_iter().filter(|p| p % 3 == 1) {
        let pi = split_prime(ell).unwrap();
        let cubes = cubes_mod(ell);
        for x in [2i64, 3, 5, 6, 10] {
            if x as u64 % ell == 0 {
                continue;
            }
            let symbol = cubic_residue_symbol(&BigInt::from(x), &pi, ell).unwrap();
            assert_eq!(
                symbol == CubicSymbol::One,
                cubes[(x as u64 % ell) as usize],
                "({x}/π_{ell})"
            );
        }
    }
}

/// `u` is a unit square in `Z_p` iff it is a square modulo `p³`.
fn square_by_search(n: i64, p: u64) -> bool {
    let v = arith::valuation(&BigInt::from(n), p);
    if v % 2 == 1 {
        return false;
    }
    let unit = n / (p as i64).pow(v);
    let m = (p * p * p) as i64;
    (0..m).any(|y| (y * y - unit).rem_euclid(m) == 0)
}

#[test]
fn local_squares_match_search() {
    for p in [2u64, 3, 5, 7, 11] {
        for n in (-3000i64..=3000).filter(|&n| n != 0) {
            assert_eq!(
                is_square_qp(&BigInt::from(n), p),
                square_by_search(n, p),
                "{n} in Q_{p}"
            );
        }
    }
}

#[test]
fn frak_p_membership_matches_valuation_shortcut() {
    for a in (-10_000i64..=10_000).filter(|&a| a != 0) {
        let big = BigInt::from(a);
        let v3 = arith::valuation(&big, 3);
        if v3 > 2
            || cubic_selmer::eisenstein::is_square_in_k(&big)
            || arith::factor(&big).unwrap().iter().any(|&(_, e)| e >= 6)
        {
            continue;
        }
        let unit = a / 3i64.pow(v3);
        let shortcut = (v3 == 1 && unit.rem_euclid(3) == 2) || (v3 == 2 && unit.rem_euclid(3) == 1);
        let in_sa = compute_sa(&big).unwrap().contains(&KPrime::ramified());
        assert_eq!(in_sa, shortcut, "a = {a}");
    }
}

#[test]
fn classification_follows_residue_mod_3() {
    for ell in primes_up_to(2000) {
        let q = classify_prime(ell).unwrap();
        let expected_size = match ell % 3 {
            0 => 3,
            1 => ell,
            _ => ell * ell,
        };
        assert_eq!(q.residue_field_size, expected_size);
        if ell % 3 == 1 {
            assert_eq!(split_prime(ell).unwrap().norm(), BigInt::from(ell));
        }
    }
}

/// Solutions of `x³ + y³ = D z³` with `gcd(x, y, z) = 1`, `z > 0`, `xy ≠ 0` and small entries.
fn small_cube_sum(d: i64, bound: i64) -> Option<(i64, i64, i64)> {
    for z in 1..=bound {
        let target = d * z * z * z;
        for x in -bound..=bound {
            let rest = target - x * x * x;
            let y = (rest as f64).cbrt().round() as i64;
            for y in [y - 1, y, y + 1] {
                if x != 0
                    && y != 0
                    && y * y * y == rest
                    && num_integer::gcd(num_integer::gcd(x, y), z) == 1
                {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

#[test]
fn verdicts_agree_with_explicit_cube_sums() {
    let mut explicit = 0;
    for d in 5u64..=300 {
        if DShape::parse(d).is_err() {
            continue;
        }
        let verdict = cube_sum_verdict(d, VerdictFlags::default()).unwrap();
        if let Some((x, y, z)) = small_cube_sum(d as i64, 60) {
            explicit += 1;
            assert_ne!(
                verdict.status,
                Status::NotCubeSum,
                "{d} = ({x}/{z})³ + ({y}/{z})³"
            );
        }
        if verdict.status == Status::CubeSum {
            let cert = verdict
                .certificate
                .expect("unconditional verdicts carry a point");
            let curve = cubic_selmer::curves::type1_curve(&cert.curve_a);
            assert!(curve.contains(&cert.point) && !curve.is_small_torsion(&cert.point));
        }
    }
    assert!(explicit >= 5);
}

#[test]
fn prime_only_shapes() {
    for d in 5u64..500 {
        let ok = DShape::parse(d).is_ok();
        let expected = (is_prime(d))
            || (d % 2 == 0 && d / 2 >= 5 && is_prime(d / 2))
            || ((d as f64).sqrt().round() as u64).pow(2) == d
                && is_prime((d as f64).sqrt().round() as u64)
                && d >= 25;
        assert_eq!(ok, expected, "D = {d}");
    }
}

#[test]
fn scholz_reflection() {
    let engine = ClassGroupEngine::new(DEFAULT_LIMIT, None);
    for d in 2i64..=2000 {
        if arith::squarefree_core(&BigInt::from(d)).unwrap() != BigInt::from(d) {
            continue;
        }
        let real = engine
            .three_rank(fundamental_discriminant(d).unwrap())
            .unwrap();
        let imaginary = engine
            .three_rank(fundamental_discriminant(-3 * d).unwrap())
            .unwrap();
        assert!(
            real <= imaginary && imaginary <= real + 1,
            "d = {d}: r(√d) = {real}, r(√-3d) = {imaginary}"
        );
    }
}

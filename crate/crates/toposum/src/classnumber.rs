//! Class numbers of negative discriminants and their lattice-sum
//! verifications.
//!
//! The primitive classes of a negative discriminant are enumerated through
//! the standard reduction box. Two sums are then checked against them: the
//! whole-topograph sum `|D|^{3/2} sum 1/(rst)`, which equals `4 pi` for
//! every class, and the weighted lattice sum over all triples `(A, B, C)`
//! with `B^2 - 4AC = D`, which converges to the class number itself.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::bqf::QuadraticForm;
use crate::closed_forms::{closed_rst, ClosedFormInput};
use crate::error::{Error, Result};
use crate::indefinite::positive_tol;
use crate::num::{int, ratio, trial_factor, Int};
use crate::real::Real;
use crate::series::{sum_rst, SeriesResult};
use crate::topograph::DEFAULT_NODE_BUDGET;

/// The primitive reduced forms of one negative discriminant, together with
/// the unit count `omega` (6 units for `D = -3` and 4 for `D = -4` give
/// `omega = 3` and `2`; every other discriminant has `omega = 1`).
#[derive(Clone, Debug)]
pub struct ReducedFormSet {
    pub d: Int,
    pub forms: Vec<QuadraticForm>,
    pub omega: Int,
}

const REDUCTION_LIMIT: i64 = 100_000_000;

/// Enumerate the reduced primitive forms `[a, b, c]` of discriminant
/// `d < 0`: `|b| <= a <= c`, `gcd(a, b, c) = 1`, and `b >= 0` whenever
/// `|b| = a` or `a = c`. The list length is the class number `h(d)`.
pub fn reduced_forms(d: &Int) -> Result<ReducedFormSet> {
    if !d.is_negative() {
        return Err(Error::InvalidInput(format!(
            "form reduction needs a negative discriminant, got {d}"
        )));
    }
    let rem = d.mod_floor(&int(4));
    if !(rem.is_zero() || rem.is_one()) {
        return Err(Error::InvalidInput(format!(
            "{d} is {rem} modulo 4, so it is not the discriminant of an integer form"
        )));
    }
    let abs_d: i64 = (-d).try_into().map_err(|_| {
        Error::ResourceLimit(format!("the reduction box for {d} is out of range"))
    })?;
    if abs_d > REDUCTION_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "the reduction box for {d} exceeds the {REDUCTION_LIMIT} limit"
        )));
    }
    let parity = abs_d % 2;
    let mut forms = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= abs_d {
        for b in -a..=a {
            if (b - parity).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b + abs_d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (-b == a || a == c) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            forms.push(QuadraticForm::from_i64(a, b, c));
        }
        a += 1;
    }
    let omega = match abs_d {
        3 => int(3),
        4 => int(2),
        _ => Int::one(),
    };
    Ok(ReducedFormSet {
        d: d.clone(),
        forms,
        omega,
    })
}

/// Whether `d` is the discriminant of the full ring of integers: odd part
/// squarefree, with the usual condition at 2.
fn is_fundamental(abs_d: i64) -> bool {
    let squarefree = |n: i64| trial_factor(n as u64).iter().all(|&(_, e)| e == 1);
    if abs_d % 4 == 3 {
        squarefree(abs_d)
    } else if abs_d % 4 == 0 {
        let quarter = abs_d / 4;
        (quarter % 4 == 1 || quarter % 4 == 2) && squarefree(quarter)
    } else {
        false
    }
}

/// Evaluate the whole-topograph sum `|D|^{3/2} sum_T 1/(rst)` of a
/// positive-definite form along two routes and report each route's
/// deviation from `4 pi`.
///
/// The first route splits the tree at the root edge and adds the two
/// closed-form half sums; its deviation is pure rounding. The second runs
/// the adaptive series engine on the same two halves at tolerance `tol`,
/// so its deviation stays below `|D|^{3/2} tol` plus rounding. Returns
/// `(split_deviation, series_deviation)`.
pub fn full_topograph_check(
    form: &QuadraticForm,
    tol: &Real,
    prec: usize,
) -> Result<(Real, Real)> {
    let d = form.discriminant();
    if !d.is_negative() {
        return Err(Error::InvalidInput(format!(
            "the whole-topograph sum needs a negative discriminant, got {d}"
        )));
    }
    if !form.a.is_positive() {
        return Err(Error::InvalidInput(
            "the form must be positive definite, with a > 0".into(),
        ));
    }
    positive_tol(tol)?;
    let wp = prec + 32;
    let root = form.root_edge();
    let reversed = root.reversed();
    let abs_d = Real::from_int(&-&d, wp);
    let scale = &abs_d * &abs_d.sqrt();
    let four_pi = Real::from_i64(4, wp) * Real::pi(wp);

    let split = closed_rst(&ClosedFormInput::from_edge(&root, wp))?
        + closed_rst(&ClosedFormInput::from_edge(&reversed, wp))?;
    let split_deviation = (&(&scale * &split) - &four_pi).abs();

    let half_tol = tol / &Real::from_i64(2, wp);
    let ahead: SeriesResult = sum_rst(&root, &d, &half_tol, wp, DEFAULT_NODE_BUDGET)?;
    let behind: SeriesResult = sum_rst(&reversed, &d, &half_tol, wp, DEFAULT_NODE_BUDGET)?;
    let series = ahead.value + behind.value;
    let series_deviation = (&(&scale * &series) - &four_pi).abs();

    Ok((
        split_deviation.rounded(prec),
        series_deviation.rounded(prec),
    ))
}

const HURWITZ_B_START: i64 = 256;
const HURWITZ_B_CAP: i64 = 1 << 16;

/// Class-number verification for a fundamental `d < 0`.
///
/// Returns the value of `(omega / 12 pi) |D|^{3/2} sum 1/(A (A+B+C) C)`
/// over all integer triples with `B^2 - 4AC = d` and `A, C > 0`, truncated
/// adaptively in `|B|` until a doubling of the range moves the scaled sum
/// by at most a quarter of `tol`, together with the class number from
/// [`reduced_forms`]. The sum converges to the class number. Before
/// enumerating, the class decomposition is verified internally: the closed
/// forms of the `h` class topographs must reproduce `h` to near working
/// precision, since each class contributes exactly `4 pi / |D|^{3/2}`.
pub fn hurwitz_check(d: &Int, tol: &Real, prec: usize) -> Result<(Real, Int)> {
    let reduced = reduced_forms(d)?;
    let abs_d_i: i64 = (-d).try_into().unwrap_or(i64::MAX);
    if !is_fundamental(abs_d_i) {
        return Err(Error::InvalidInput(format!(
            "{d} is not a fundamental discriminant"
        )));
    }
    let tol_f = positive_tol(tol)?;
    let h = reduced.forms.len() as i64;
    let wp = prec + 32;

    let mut class_total = Real::from_i64(0, wp);
    for form in &reduced.forms {
        let root = form.root_edge();
        class_total += closed_rst(&ClosedFormInput::from_edge(&root, wp))?
            + closed_rst(&ClosedFormInput::from_edge(&root.reversed(), wp))?;
    }
    let abs_d = Real::from_int(&-d, wp);
    let scale32 = &abs_d * &abs_d.sqrt();
    let four_pi = Real::from_i64(4, wp) * Real::pi(wp);
    let class_route = &(&scale32 * &class_total) / &four_pi;
    let class_drift = (&class_route - &Real::from_i64(h, wp)).abs();
    if class_drift > Real::pow2(-(wp as i32) / 2, wp) {
        return Err(Error::NonConvergence(format!(
            "the class decomposition of {d} gives {class_route}, not the {h} reduced forms"
        )));
    }

    let scale = Real::from_int(&reduced.omega, wp) * &scale32
        / (Real::from_i64(12, wp) * Real::pi(wp));
    let raw_target = tol_f / 4.0 / scale.to_f64();
    let parity = abs_d_i % 2;
    let mut total = Real::from_i64(0, wp);
    let mut lo = parity;
    let mut hi = HURWITZ_B_START;
    loop {
        let block = hurwitz_block(abs_d_i, lo, hi, wp);
        let step = block.to_f64();
        total += block;
        if lo > parity && step <= raw_target {
            return Ok(((scale * total).rounded(prec), int(h)));
        }
        if hi >= HURWITZ_B_CAP {
            return Err(Error::NonConvergence(format!(
                "the lattice sum for {d} still moved by {step:.3e} over |B| in [{lo}, {hi}), \
                 above the target {raw_target:.3e}"
            )));
        }
        lo = hi;
        hi *= 2;
    }
}

/// Partial lattice sum `sum 1/(A (A+B+C) C)` over `lo <= |B| < hi` with
/// `B` of the parity fixed by the discriminant, both signs of `B` counted
/// and `B = 0` counted once. For each `|B|` the pairs `(A, C)` run over
/// the divisor splittings of `(B^2 + |D|) / 4`.
fn hurwitz_block(abs_d: i64, lo: i64, hi: i64, wp: usize) -> Real {
    let mut total = Real::from_i64(0, wp);
    let parity = abs_d % 2;
    let mut b = if (lo - parity) % 2 == 0 { lo } else { lo + 1 };
    while b < hi {
        let n = (b * b + abs_d) / 4;
        for a in crate::num::divisors(n as u64) {
            let a = a as i64;
            let c = n / a;
            let base = (a as i128) * (c as i128);
            let spread = (a + c) as i128;
            let plus = base * (spread + b as i128);
            total += Real::from_rat(&ratio(&Int::one(), &Int::from(plus)), wp);
            if b > 0 {
                let minus = base * (spread - b as i128);
                total += Real::from_rat(&ratio(&Int::one(), &Int::from(minus)), wp);
            }
        }
        b += 2;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = 128;

    fn dev(a: &Real, b: &Real) -> f64 {
        (a - b).abs().to_f64()
    }

    fn triples(set: &ReducedFormSet) -> Vec<(i64, i64, i64)> {
        set.forms
            .iter()
            .map(|f| {
                let to = |x: &Int| i64::try_from(x).unwrap();
                (to(&f.a), to(&f.b), to(&f.c))
            })
            .collect()
    }

    #[test]
    fn reduction_boxes_match_the_classical_tables() {
        let four = reduced_forms(&int(-4)).unwrap();
        assert_eq!(triples(&four), vec![(1, 0, 1)]);
        assert_eq!(four.omega, int(2));

        let three = reduced_forms(&int(-3)).unwrap();
        assert_eq!(triples(&three), vec![(1, 1, 1)]);
        assert_eq!(three.omega, int(3));

        let fifteen = reduced_forms(&int(-15)).unwrap();
        assert_eq!(triples(&fifteen), vec![(1, 1, 4), (2, 1, 2)]);
        assert_eq!(fifteen.omega, Int::one());

        let twenty_three = reduced_forms(&int(-23)).unwrap();
        assert_eq!(triples(&twenty_three), vec![(1, 1, 6), (2, -1, 3), (2, 1, 3)]);

        let twelve = reduced_forms(&int(-12)).unwrap();
        assert_eq!(triples(&twelve), vec![(1, 0, 3)]);

        assert!(matches!(
            reduced_forms(&int(-5)),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(reduced_forms(&int(4)), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn whole_topograph_routes_agree_with_four_pi() {
        let tol = Real::parse_dec("1e-5", P).unwrap();
        for d in [-3i64, -4, -7, -8] {
            let set = reduced_forms(&int(d)).unwrap();
            assert_eq!(set.forms.len(), 1);
            let (split_dev, series_dev) =
                full_topograph_check(&set.forms[0], &tol, P).unwrap();
            assert!(split_dev.to_f64() < 1e-25, "d = {d}, split {split_dev}");
            assert!(series_dev.to_f64() < 1e-3, "d = {d}, series {series_dev}");
        }
    }

    #[test]
    fn hurwitz_sums_converge_to_the_class_numbers() {
        let tol = Real::parse_dec("1e-3", P).unwrap();
        let table = [
            (-3i64, 1i64),
            (-4, 1),
            (-7, 1),
            (-8, 1),
            (-11, 1),
            (-15, 2),
            (-20, 2),
            (-23, 3),
        ];
        for (d, expected) in table {
            let (series, h) = hurwitz_check(&int(d), &tol, P).unwrap();
            assert_eq!(h, int(expected), "d = {d}");
            let gap = dev(&series, &Real::from_i64(expected, P));
            assert!(gap < 1e-3, "d = {d}: series {series}, gap {gap}");
        }
    }

    #[test]
    fn non_fundamental_discriminants_are_rejected() {
        let tol = Real::parse_dec("1e-3", P).unwrap();
        for d in [-12i64, -16, -27] {
            assert!(
                matches!(hurwitz_check(&int(d), &tol, P), Err(Error::InvalidInput(_))),
                "d = {d}"
            );
        }
        assert!(matches!(
            full_topograph_check(&QuadraticForm::from_i64(1, 0, -2), &tol, P),
            Err(Error::InvalidInput(_))
        ));
    }
}


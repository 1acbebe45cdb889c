//! The acceptance checklist: every headline quantity of the crate computed
//! live and compared against its independent reference.
//!
//! [`run_all`] drives fourteen checks, from exact telescoping equalities
//! through class numbers, fundamental units, and the Euler-constant trees.
//! Each check owns its tolerance; a check that cannot meet its stated
//! target reports the measured gap instead of passing quietly. The same
//! list backs `cargo test` and the command-line `verify-all` report.

use num_traits::Zero;

use crate::bqf::{check_algebraic, AlgebraicIdentity, OrientedEdge, QuadraticForm, VertexStar};
use crate::classnumber::{full_topograph_check, hurwitz_check};
use crate::closed_forms::{
    check_triple, closed_efg, closed_rst, w1_identity_residual, w1_sum_check, ClosedFormInput,
    TripleIdentity,
};
use crate::error::Result;
use crate::indefinite::{
    fundamental_unit, river_arctanh_sum, river_vertex_sum, square_class_identity,
    square_river_sum,
};
use crate::num::{int, rat, Int};
use crate::real::{Real, DEFAULT_PREC};
use crate::series::named_series;
use crate::topograph::{
    direct_efg_partial, direct_rst_partial, telescoped_efg_partial, telescoped_rst_partial,
    telescoped_rst_partial_real, zero_disc_efg_partial, zero_disc_rst_partial,
    DEFAULT_NODE_BUDGET,
};

/// Outcome of one acceptance check.
#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// Measured deviations and the bounds they were held against.
    pub details: String,
}

impl CriterionResult {
    /// One-line report, stable enough to grep: status, number, name, data.
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {:<26} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.details
        )
    }
}

type Check = fn(usize) -> Result<(bool, String)>;

const CHECKS: [(u32, &str, Check); 14] = [
    (1, "exact-telescoping", exact_telescoping),
    (2, "quarter-circle-sum", quarter_circle_sum),
    (3, "whole-tree-four-pi", whole_tree_four_pi),
    (4, "hurwitz-class-numbers", hurwitz_class_numbers),
    (5, "mordell-tornheim-third", mordell_tornheim_third),
    (6, "mu-family-values", mu_family_values),
    (7, "arctan-dual-quarter", arctan_dual_quarter),
    (8, "euler-constant-trees", euler_constant_trees),
    (9, "river-unit-logs", river_unit_logs),
    (10, "river-vertex-sums", river_vertex_sums),
    (11, "square-lake-walks", square_lake_walks),
    (12, "digamma-reflection", digamma_reflection),
    (13, "vertex-identity-suite", vertex_identity_suite),
    (14, "flat-tree-limits", flat_tree_limits),
];

/// Run the whole checklist at the given output precision (raised to 128
/// bits if below, since several targets sit near 1e-30). An error from a
/// library call is itself a failure of that check.
pub fn run_all(prec: usize) -> Vec<CriterionResult> {
    CHECKS
        .iter()
        .map(|&(id, name, f)| run_check(id, name, f, prec))
        .collect()
}

/// Run a single numbered check from the same list. `None` when no check
/// carries that number.
pub fn run_one(id: u32, prec: usize) -> Option<CriterionResult> {
    CHECKS
        .iter()
        .find(|&&(i, _, _)| i == id)
        .map(|&(id, name, f)| run_check(id, name, f, prec))
}

fn run_check(id: u32, name: &'static str, f: Check, prec: usize) -> CriterionResult {
    let (passed, details) = match f(prec.max(DEFAULT_PREC)) {
        Ok(pair) => pair,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        name,
        passed,
        details,
    }
}

/// splitmix64, seeded per check so every run sees the same roots.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> i64 {
        (self.next() % n) as i64
    }
}

fn gap(value: &Real, target: &Real) -> f64 {
    (value - target).abs().to_f64()
}

fn both_routes_agree(root: &OrientedEdge, n: u32) -> Result<bool> {
    let budget = DEFAULT_NODE_BUDGET;
    let d = root.discriminant();
    Ok(telescoped_rst_partial(root, n, &d, budget)? == direct_rst_partial(root, n, budget)?
        && telescoped_efg_partial(root, n, &d, budget)?
            == direct_efg_partial(root, n, budget)?)
}

fn exact_telescoping(_prec: usize) -> Result<(bool, String)> {
    let mut rng = Rng(0x746f706f);
    let mut definite = 0u32;
    let mut indefinite = 0u32;
    let mut mismatches = 0u32;
    // Random roots stay at depths 1..=8; the exact crown at depth 12 is
    // exercised on one minimal root per sign, where the accumulated
    // denominators stay affordable.
    while definite < 59 || indefinite < 59 {
        let p = rng.below(8) + 1;
        let q = rng.below(8) + 1;
        let h = rng.below(22) + 1;
        let disc = h * h - 4 * p * q;
        if disc == 0 || disc.abs() > 500 {
            continue;
        }
        if disc < 0 && definite >= 59 || disc > 0 && indefinite >= 59 {
            continue;
        }
        let root = OrientedEdge::from_i64(p, h, q);
        let n = (rng.below(8) + 1) as u32;
        if !both_routes_agree(&root, n)? {
            mismatches += 1;
        }
        if disc < 0 {
            definite += 1;
        } else {
            indefinite += 1;
        }
    }
    for (p, h, q, n) in [(1, 1, 1, 12), (1, 3, 1, 11)] {
        if !both_routes_agree(&OrientedEdge::from_i64(p, h, q), n)? {
            mismatches += 1;
        }
    }
    Ok((
        mismatches == 0,
        format!(
            "120 roots (60 per sign of D, |D| <= 500), telescoped = direct exactly \
             for both series, random depths to 8 plus pinned deep trees to 12; \
             {mismatches} mismatches"
        ),
    ))
}

fn quarter_circle_sum(prec: usize) -> Result<(bool, String)> {
    let root = OrientedEdge::from_i64(1, 0, 1);
    let d = int(-4);
    let target = Real::pi(prec) / Real::from_i64(4, prec);
    let tol = Real::from_f64(1e-9, prec);
    let pruned = named_series("hurwitz_quarter", &tol, prec, DEFAULT_NODE_BUDGET)?;
    let pruned_gap = gap(&pruned.value, &target);
    // The plain telescoped truncation converges only polynomially; its
    // depth-20 gap is measured against the same 1e-5 bar regardless.
    let truncated = telescoped_rst_partial_real(&root, 20, &d, 64, DEFAULT_NODE_BUDGET)?;
    let truncated_gap = gap(&truncated, &(Real::pi(96) / Real::from_i64(4, 96)));
    Ok((
        pruned_gap < 1e-8 && truncated_gap < 1e-5,
        format!(
            "pruned route off pi/4 by {pruned_gap:.1e} (bound 1e-8); \
             depth-20 rational truncation off by {truncated_gap:.1e} (bound 1e-5)"
        ),
    ))
}

fn whole_tree_four_pi(prec: usize) -> Result<(bool, String)> {
    let tol = Real::from_f64(1e-6, prec);
    let mut worst_split = 0f64;
    let mut worst_series = 0f64;
    for (a, b, c) in [(1, 1, 1), (1, 0, 1), (1, 1, 2), (1, 0, 2)] {
        let form = QuadraticForm::from_i64(a, b, c);
        let (split, series) = full_topograph_check(&form, &tol, prec)?;
        worst_split = worst_split.max(split.to_f64());
        worst_series = worst_series.max(series.to_f64());
    }
    Ok((
        worst_split < 1e-25,
        format!(
            "D in {{-3, -4, -7, -8}}: split-closed-form route off 4 pi by at most \
             {worst_split:.1e} (bound 1e-25); adaptive route off by at most {worst_series:.1e}"
        ),
    ))
}

fn hurwitz_class_numbers(prec: usize) -> Result<(bool, String)> {
    let table: [(i64, i64); 8] = [
        (-3, 1),
        (-4, 1),
        (-7, 1),
        (-8, 1),
        (-11, 1),
        (-15, 2),
        (-20, 2),
        (-23, 3),
    ];
    let tol = Real::from_f64(1e-3, prec);
    let mut worst = 0f64;
    let mut class_numbers_ok = true;
    for (d, expected) in table {
        let (series, h) = hurwitz_check(&int(d), &tol, prec)?;
        class_numbers_ok &= h == int(expected);
        worst = worst.max(gap(&series, &Real::from_i64(expected, prec)));
    }
    Ok((
        class_numbers_ok && worst < 1e-3,
        format!(
            "eight discriminants down to -23: reduced-form counts {}; \
             lattice double sum off the class numbers by at most {worst:.1e} (bound 1e-3)",
            if class_numbers_ok { "all correct" } else { "WRONG" }
        ),
    ))
}

fn mordell_tornheim_third(prec: usize) -> Result<(bool, String)> {
    let tol = Real::from_f64(5e-7, prec);
    let r = named_series("mordell_tornheim", &tol, prec, DEFAULT_NODE_BUDGET)?;
    let value_gap = gap(&r.value, &Real::from_rat(&rat(1, 3), prec));
    let bound = r.error_bound.to_f64();
    Ok((
        value_gap < 1e-6 && r.bound_is_rigorous && bound < 1e-6,
        format!(
            "coprime double sum off 1/3 by {value_gap:.1e} with rigorous tail bound \
             {bound:.1e} (both under 1e-6)"
        ),
    ))
}

fn mu_family_values(prec: usize) -> Result<(bool, String)> {
    let tight = Real::from_f64(1e-7, prec);
    let loose = Real::from_f64(1e-4, prec);
    let budget = DEFAULT_NODE_BUDGET;

    // mu = 1/2: (1/(4 mu^2)) (2 arctan(mu)/mu - 2/(1 + mu^2)) = 4 arctan(1/2) - 8/5.
    let half = Real::from_rat(&rat(1, 2), prec);
    let family_target =
        Real::from_i64(4, prec) * half.atan() - Real::from_rat(&rat(8, 5), prec);
    let family = gap(
        &named_series("mu_family(1/2)", &tight, prec, budget)?.value,
        &family_target,
    );

    let ln3 = Real::from_i64(3, prec).ln();
    let imag_target =
        (Real::from_rat(&rat(4, 3), prec) - &ln3) / Real::from_i64(32, prec);
    let imag = gap(
        &named_series("mu_i_half", &tight, prec, budget)?.value,
        &imag_target,
    );

    let dual_target = (&ln3 - &Real::from_i64(1, prec)) / Real::from_i64(16, prec);
    let dual = gap(
        &named_series("tangent_mu_i_half", &tight, prec, budget)?.value,
        &dual_target,
    );

    let coeff = gap(
        &named_series("mu2_coefficient", &loose, prec, budget)?.value,
        &Real::from_rat(&rat(2, 5), prec),
    );
    let dual_coeff = gap(
        &named_series("tangent_mu2_coefficient", &loose, prec, budget)?.value,
        &Real::from_rat(&rat(1, 5), prec),
    );

    Ok((
        family < 1e-6 && imag < 1e-6 && dual < 1e-6 && coeff < 1e-3 && dual_coeff < 1e-3,
        format!(
            "mu = 1/2 off by {family:.1e}, imaginary half off by {imag:.1e}, its dual off \
             by {dual:.1e} (bounds 1e-6); series coefficients 2/5 and 1/5 off by \
             {coeff:.1e}, {dual_coeff:.1e} (bounds 1e-3)"
        ),
    ))
}

fn arctan_dual_quarter(prec: usize) -> Result<(bool, String)> {
    let tol = Real::from_f64(1e-6, prec);
    let r = named_series("tangent_quarter", &tol, prec, DEFAULT_NODE_BUDGET)?;
    let target = Real::from_i64(1, prec) - Real::pi(prec) / Real::from_i64(4, prec);
    let value_gap = gap(&r.value, &target);
    Ok((
        value_gap < 1e-5,
        format!("edge-product sum off 1 - pi/4 by {value_gap:.1e} (bound 1e-5)"),
    ))
}

fn euler_constant_trees(prec: usize) -> Result<(bool, String)> {
    let tol = Real::from_f64(1e-8, prec);
    let gamma = Real::euler_gamma(prec)?;
    let first_target = Real::from_i64(2, prec) * &gamma - Real::from_i64(1, prec);
    let first = named_series("hata(10000)", &tol, prec, DEFAULT_NODE_BUDGET)?;
    let first_gap = gap(&first.value, &first_target);
    let second_target = Real::from_i64(7, prec) - Real::from_i64(12, prec) * &gamma;
    let second = named_series("hata_second", &tol, prec, DEFAULT_NODE_BUDGET)?;
    let second_gap = gap(&second.value, &second_target);
    Ok((
        first_gap < 1e-7 && second_gap < 1e-3,
        format!(
            "10^4 subtrees off 2 gamma - 1 by {first_gap:.1e} (bound 1e-7); \
             second moment off 7 - 12 gamma by {second_gap:.1e} (bound 1e-3, \
             empirical tail)"
        ),
    ))
}

fn river_unit_logs(prec: usize) -> Result<(bool, String)> {
    let mut worst = 0f64;
    for d in [5, 8, 12, 13, 24, 40] {
        let d = int(d);
        let target = Real::from_i64(2, prec) * &fundamental_unit(&d, prec)?.log_epsilon;
        worst = worst.max(gap(&river_arctanh_sum(&d, prec)?, &target));
    }
    Ok((
        worst < 1e-20,
        format!(
            "six rivers, D up to 40: period sums off 2 log epsilon by at most \
             {worst:.1e} (bound 1e-20)"
        ),
    ))
}

fn river_vertex_sums(prec: usize) -> Result<(bool, String)> {
    let tol = Real::from_f64(1e-8, prec);
    let mut worst = 0f64;
    for d in [5, 8, 13] {
        let d = int(d);
        let target = Real::from_i64(2, prec) * &fundamental_unit(&d, prec)?.log_epsilon;
        worst = worst.max(gap(&river_vertex_sum(&d, &tol, prec)?, &target));
    }
    Ok((
        worst < 2e-8,
        format!(
            "D in {{5, 8, 13}}: shore vertex sums off 2 log epsilon by at most \
             {worst:.1e} (bound 2e-8)"
        ),
    ))
}

fn square_lake_walks(prec: usize) -> Result<(bool, String)> {
    let mut worst = 0f64;
    for (m, r, s) in [(3, 1, 2), (4, 1, 3), (5, 1, 4), (5, 2, 3), (6, 1, 5)] {
        let product = int(r * (m - r) * s * (m - s));
        let target = Real::from_int(&product, prec).ln() / Real::from_i64(2, prec);
        worst = worst.max(gap(&square_river_sum(m, r, s, prec)?, &target));
    }
    Ok((
        worst < 1e-25,
        format!(
            "five lake-to-lake walks, m = 3..6: off half the log of \
             r(m-r)s(m-s) by at most {worst:.1e} (bound 1e-25)"
        ),
    ))
}

fn digamma_reflection(prec: usize) -> Result<(bool, String)> {
    let mut worst_point = 0f64;
    for (n, d) in [(1, 3), (1, 4), (2, 5)] {
        let x = Real::from_rat(&rat(n, d), prec);
        worst_point = worst_point.max(w1_identity_residual(&x, prec)?.abs().to_f64());
    }

    let mut worst_sum = 0f64;
    for m in [3, 4, 5, 6] {
        let (lhs, rhs) = w1_sum_check(m, prec)?;
        worst_sum = worst_sum.max(gap(&lhs, &rhs));
    }

    let tol = Real::from_f64(2e-6, prec);
    let (lhs, rhs) = square_class_identity(3, &tol, prec)?;
    let reference = Real::parse_dec("0.9743676592890432", prec)?;
    let rhs_gap = gap(&rhs, &reference);
    let balance = gap(&lhs, &rhs);

    Ok((
        worst_point < 1e-12 && worst_sum < 1e-10 && rhs_gap < 1e-14 && balance < 1e-5,
        format!(
            "integral-digamma residual at most {worst_point:.1e} at three rationals \
             (bound 1e-12); residue sums off their closed forms by at most \
             {worst_sum:.1e} for m = 3..6 (bound 1e-10); m = 3 closed side off the \
             16-digit reference by {rhs_gap:.1e} (bound 1e-14) and the lattice side \
             off it by {balance:.1e} (bound 1e-5)"
        ),
    ))
}

fn random_star(rng: &mut Rng, want_positive: bool) -> VertexStar {
    loop {
        let p = rng.below(20) + 1;
        let q = rng.below(20) + 1;
        let h = rng.below(40) + 1;
        let disc = h * h - 4 * p * q;
        if disc == 0 || disc.is_positive() != want_positive {
            continue;
        }
        return OrientedEdge::from_i64(p, h, q).vertex_star();
    }
}

fn vertex_identity_suite(prec: usize) -> Result<(bool, String)> {
    let mut rng = Rng(0x73746172);
    let mut exact_failures = 0u32;
    for i in 0..1000 {
        let star = random_star(&mut rng, i % 2 == 0);
        for which in AlgebraicIdentity::VALID {
            if !check_algebraic(&star, which)?.is_zero() {
                exact_failures += 1;
            }
        }
    }

    let witness = VertexStar::from_i64(1, 2, 5);
    let misprint = check_algebraic(&witness, AlgebraicIdentity::Stu5)?;
    let misprint_ok = misprint == rat(-1, 16);

    let mut worst_trig = 0f64;
    for _ in 0..200 {
        let star = random_star(&mut rng, false);
        for which in [TripleIdentity::Arcsin, TripleIdentity::Arctan] {
            worst_trig = worst_trig.max(check_triple(&star, which, prec)?.abs().to_f64());
        }
    }
    for _ in 0..200 {
        let star = random_star(&mut rng, true);
        for which in [TripleIdentity::Arcsinh, TripleIdentity::Arctanh] {
            worst_trig = worst_trig.max(check_triple(&star, which, prec)?.abs().to_f64());
        }
    }

    Ok((
        exact_failures == 0 && misprint_ok && worst_trig < 1e-30,
        format!(
            "five rational identities exactly zero on 1000 stars ({exact_failures} \
             failures); angle identities off by at most {worst_trig:.1e} on 200 stars \
             per sign of D (bound 1e-30); the misprinted variant leaves {} on the \
             witness star, as it should",
            misprint
        ),
    ))
}

fn flat_tree_limits(prec: usize) -> Result<(bool, String)> {
    let budget = DEFAULT_NODE_BUDGET;
    let third = Real::from_rat(&rat(1, 3), prec);
    let closed = closed_rst(&ClosedFormInput::from_i64(1, 2, 1, prec))?;
    let closed_gap = gap(&closed, &third);

    let cap = rat(1, 1_000_000);
    let partial = zero_disc_rst_partial(&OrientedEdge::from_i64(1, 2, 1), &cap, budget)?;
    let partial_gap = gap(&Real::from_rat(&partial.partial, prec), &third);

    // Odd labels have no integer edge with h^2 = 4pq, so the even-label
    // partials carry the check and the cube law links the rest.
    let mut worst_law = 0f64;
    for h in [1i64, 2, 3] {
        let expected = Real::from_rat(&rat(1, 3 * h * h * h), prec);
        worst_law = worst_law.max(gap(&closed_efg(&Int::zero(), &int(h), prec)?, &expected));
    }
    let mut worst_efg = 0f64;
    for (p, h, q) in [(1, 2, 1), (2, 4, 2), (3, 6, 3)] {
        let out = zero_disc_efg_partial(&OrientedEdge::from_i64(p, h, q), &cap, budget)?;
        let closed = closed_efg(&Int::zero(), &int(h), prec)?;
        worst_efg = worst_efg.max(gap(&Real::from_rat(&out.partial, prec), &closed));
    }

    Ok((
        closed_gap < 1e-30 && partial_gap < 1e-5 && worst_law < 1e-30 && worst_efg < 1e-5,
        format!(
            "closed value off 1/3 by {closed_gap:.1e}; partial sums off it by \
             {partial_gap:.1e} (bound 1e-5); cube law for labels 1..3 off by at most \
             {worst_law:.1e}; even-label partials off their closed values by at most \
             {worst_efg:.1e} (bound 1e-5)"
        ),
    ))
}

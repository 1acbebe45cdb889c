//! Rivers of indefinite forms, Pell units, and shore sums for square
//! discriminants.
//!
//! A form with positive non-square discriminant takes both signs, and the
//! edges whose side regions differ in sign make up a single bi-infinite
//! periodic path, the river. Walking one period and turning the off-river
//! label `e` at each vertex into `arctanh(sqrt(D)/|e|)` gives a finite sum
//! equal to `2 log epsilon_D`, twice the logarithm of the fundamental Pell
//! unit. A perfect-square discriminant `m^2` breaks the path at two lakes
//! (zero regions); the walk between them is finite and its sum elementary,
//! and aggregating such walks over every form of discriminant `m^2` leads
//! to an identity against digamma values at rationals.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::bqf::{exact_sqrt, OrientedEdge, QuadraticForm};
use crate::closed_forms::{closed_efg, digamma};
use crate::error::{Error, Result};
use crate::num::{divisors, euler_phi, int, moebius, rat, ratio, trial_factor, Int};
use crate::real::Real;

/// One fundamental period of the river of an indefinite discriminant.
///
/// Every state keeps the positive region on the left (`p > 0 > q`), and the
/// state reached after `period_length` steps equals the first one. The
/// off-river label at each vertex satisfies `e^2 > D`, so the arctanh sums
/// built from a period are always defined.
#[derive(Clone, Debug)]
pub struct RiverPeriod {
    pub d: Int,
    pub river_states: Vec<OrientedEdge>,
    pub off_river_labels: Vec<Int>,
    pub period_length: usize,
}

/// Minimal positive solution of `t^2 - D u^2 = 4` together with the unit
/// `epsilon = (t + u sqrt(D)) / 2` and its logarithm.
#[derive(Clone, Debug)]
pub struct PellSolution {
    pub t: Int,
    pub u: Int,
    pub epsilon: Real,
    pub log_epsilon: Real,
}

const RIVER_DESCENT_CAP: usize = 100_000;
const PERIOD_CAP: usize = 1_000_000;
const PELL_CAP: u64 = 2_000_000;

fn require_indefinite(d: &Int) -> Result<()> {
    if !d.is_positive() {
        return Err(Error::NotIndefinite(format!(
            "discriminant {d} is not positive, so there is no river"
        )));
    }
    if exact_sqrt(d).is_some() {
        return Err(Error::NotIndefinite(format!(
            "discriminant {d} is a perfect square, so the river ends in lakes"
        )));
    }
    Ok(())
}

/// Walk from the root edge of `form` to an edge of its river.
///
/// While both side regions share a sign the walk steps to the child whose
/// ahead region is smaller in absolute value, after first turning around if
/// the behind region is already the smaller one. The returned edge is
/// normalized to `p > 0 > q`.
pub fn find_river(form: &QuadraticForm) -> Result<OrientedEdge> {
    let d = form.discriminant();
    require_indefinite(&d)?;
    let mut edge = form.root_edge();
    if edge.behind().abs() < edge.ahead().abs() {
        edge = edge.reversed();
    }
    for _ in 0..RIVER_DESCENT_CAP {
        if (&edge.p * &edge.q).is_negative() {
            if edge.p.is_negative() {
                edge = edge.reversed();
            }
            return Ok(edge);
        }
        let (left, right) = edge.children();
        edge = if left.ahead().abs() <= right.ahead().abs() {
            left
        } else {
            right
        };
    }
    Err(Error::ResourceLimit(format!(
        "no sign change within {RIVER_DESCENT_CAP} steps of the root edge of {form:?}"
    )))
}

/// One river step from a `p > 0 > q` state: the next river edge and the
/// label of the edge leaving the river at the vertex crossed. `None` when
/// the vertex ahead carries a zero region, which happens only on square
/// discriminants.
fn river_step(edge: &OrientedEdge) -> Option<(OrientedEdge, Int)> {
    let ahead = edge.ahead();
    let (left, right) = edge.children();
    if ahead.is_positive() {
        Some((right, left.h.abs()))
    } else if ahead.is_negative() {
        Some((left, right.h.abs()))
    } else {
        None
    }
}

/// Walk the river from `edge` until the oriented state repeats, recording
/// the off-river label at every vertex passed.
pub fn river_period(edge: &OrientedEdge, d: &Int) -> Result<RiverPeriod> {
    require_indefinite(d)?;
    if edge.discriminant() != *d {
        return Err(Error::InvalidInput(format!(
            "edge ({}, {}, {}) has discriminant {}, not {d}",
            edge.p,
            edge.h,
            edge.q,
            edge.discriminant()
        )));
    }
    if !edge.p.is_positive() || !edge.q.is_negative() {
        return Err(Error::InvalidInput(format!(
            "a river walk starts from a state with p > 0 > q, got ({}, {}, {})",
            edge.p, edge.h, edge.q
        )));
    }
    let mut river_states = vec![edge.clone()];
    let mut off_river_labels = Vec::new();
    loop {
        let (next, off) = river_step(river_states.last().unwrap()).ok_or_else(|| {
            Error::PeriodNotFound("the river walk ran into a lake".into())
        })?;
        off_river_labels.push(off);
        if next == *edge {
            break;
        }
        if river_states.len() >= PERIOD_CAP {
            return Err(Error::PeriodNotFound(format!(
                "no state repetition within {PERIOD_CAP} river steps"
            )));
        }
        river_states.push(next);
    }
    let period_length = river_states.len();
    Ok(RiverPeriod {
        d: d.clone(),
        river_states,
        off_river_labels,
        period_length,
    })
}

/// Minimal solution of `t^2 - D u^2 = 4` by direct search over `u`.
pub fn fundamental_unit(d: &Int, prec: usize) -> Result<PellSolution> {
    require_indefinite(d)?;
    let mut u = Int::one();
    for _ in 0..PELL_CAP {
        let t2 = d * (&u * &u) + int(4);
        if let Some(t) = exact_sqrt(&t2) {
            let wp = prec + 32;
            let sqrt_d = Real::from_int(d, wp).sqrt();
            let epsilon = (Real::from_int(&t, wp) + Real::from_int(&u, wp) * sqrt_d)
                / Real::from_i64(2, wp);
            let log_epsilon = epsilon.ln().rounded(prec);
            return Ok(PellSolution {
                t,
                u,
                epsilon: epsilon.rounded(prec),
                log_epsilon,
            });
        }
        u += Int::one();
    }
    Err(Error::ResourceLimit(format!(
        "no Pell solution for {d} with u <= {PELL_CAP}"
    )))
}

/// The principal form of discriminant `d`: `[1, 0, -d/4]` or
/// `[1, 1, (1-d)/4]` by residue. Refuses discriminants outside `0, 1`
/// modulo 4 and anything that is not positive nonsquare.
pub fn seed_form(d: &Int) -> Result<QuadraticForm> {
    require_indefinite(d)?;
    let rem = d.mod_floor(&int(4));
    if rem.is_zero() {
        Ok(QuadraticForm::new(Int::one(), Int::zero(), -(d / &int(4))))
    } else if rem.is_one() {
        Ok(QuadraticForm::new(
            Int::one(),
            Int::one(),
            (Int::one() - d) / int(4),
        ))
    } else {
        Err(Error::InvalidInput(format!(
            "{d} is {rem} modulo 4, so it is not the discriminant of an integer form"
        )))
    }
}

/// The river period of the principal form of discriminant `d`.
pub fn canonical_period(d: &Int) -> Result<RiverPeriod> {
    let start = find_river(&seed_form(d)?)?;
    river_period(&start, d)
}

/// Sum of `arctanh(sqrt(D)/|e|)` over the off-river labels of one river
/// period of discriminant `d`. Equals `2 log epsilon_D`.
pub fn river_arctanh_sum(d: &Int, prec: usize) -> Result<Real> {
    let period = canonical_period(d)?;
    let wp = prec + 32;
    let sqrt_d = Real::from_int(d, wp).sqrt();
    let mut total = Real::from_i64(0, wp);
    for e in &period.off_river_labels {
        total += (&sqrt_d / &Real::from_int(e, wp)).atanh();
    }
    Ok(total.rounded(prec))
}

/// Vertex sum along one river period after relabeling every river edge with
/// `sqrt(D)`: each vertex contributes its own `1/(D |e|)` plus the whole
/// hanging subtree through [`closed_efg`], all scaled by `D^{3/2}`. Also
/// equals `2 log epsilon_D`; per vertex the two pieces recombine into
/// exactly the arctanh term of [`river_arctanh_sum`].
pub fn river_vertex_sum(d: &Int, tol: &Real, prec: usize) -> Result<Real> {
    let tol_f = positive_tol(tol)?;
    let wp = prec.max(needed_bits(tol_f)) + 32;
    let period = canonical_period(d)?;
    let d_real = Real::from_int(d, wp);
    let mut total = Real::from_i64(0, wp);
    for e in &period.off_river_labels {
        let own = (&d_real * &Real::from_int(e, wp)).recip();
        total += own + closed_efg(d, e, wp)?;
    }
    let scale = &d_real * &d_real.sqrt();
    Ok((scale * total).rounded(prec))
}

/// Finite shore-to-shore sum on the topograph of discriminant `m^2` whose
/// lakes have adjacent residues `r` and `s` modulo `m`.
///
/// The walk starts on the river edge next to the `r`-lake and collects the
/// off-river label at every vertex until the second lake appears ahead; the
/// result is the sum of `arctanh(m/|e|)` over those labels and equals
/// `log(r (m-r) s (m-s)) / 2`. The residue `s` is determined by `m` and `r`
/// up to sign; a caller value matching neither sign is rejected.
pub fn square_river_sum(m: i64, r: i64, s: i64, prec: usize) -> Result<Real> {
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "the shore walk needs m > 1, got {m}"
        )));
    }
    if r <= 0 || r >= m {
        return Err(Error::InvalidInput(format!(
            "the near-lake residue must satisfy 0 < r < m, got {r}"
        )));
    }
    if m.gcd(&r) != 1 {
        return Err(Error::InvalidInput(format!(
            "the residue {r} shares a factor with {m}"
        )));
    }
    let mut edge = OrientedEdge::from_i64(r, 2 * r - m, r - m);
    let mut labels = Vec::new();
    let cap = (2 * m + 8) as usize;
    while let Some((next, off)) = river_step(&edge) {
        labels.push(off);
        edge = next;
        if labels.len() > cap {
            return Err(Error::PeriodNotFound(format!(
                "the shore walk did not reach the far lake within {cap} steps"
            )));
        }
    }
    let modulus = int(m);
    let s_walk = edge.p.mod_floor(&modulus);
    let s_mirror = (&modulus - &s_walk).mod_floor(&modulus);
    let s_given = int(s).mod_floor(&modulus);
    if s_given != s_walk && s_given != s_mirror {
        return Err(Error::InvalidInput(format!(
            "the far lake of this topograph has residue {s_walk} or {s_mirror} modulo {m}, got {s}"
        )));
    }
    let wp = prec + 32;
    let m_real = Real::from_i64(m, wp);
    let mut total = Real::from_i64(0, wp);
    for e in &labels {
        total += (&m_real / &Real::from_int(e, wp)).atanh();
    }
    Ok(total.rounded(prec))
}

/// The reduction predicate used by [`square_class_identity`]: a primitive
/// form `[a, b, c]` with `a > 0`, `c > 0` and `b > a + c`. No such form has
/// `b` beyond `(m^2 + 1) / 2`, which keeps the scan finite.
pub fn z_reduced_default(a: i64, b: i64, c: i64) -> bool {
    a > 0 && c > 0 && b > a + c
}

/// Both sides of the class identity for square discriminant `m^2` with the
/// default reduction predicate. See [`square_class_identity_with`].
pub fn square_class_identity(m: i64, tol: &Real, prec: usize) -> Result<(Real, Real)> {
    square_class_identity_with(m, tol, prec, z_reduced_default)
}

/// Both sides of the class identity for square discriminant `m^2`.
///
/// The left side runs over primitive forms `[a, b, c]` of discriminant
/// `m^2` with `a, c, a + b + c > 0`, summing `m^3 / (3 b (b+2a) (b+2c))`,
/// plus `m / b` over the forms accepted by `is_z_reduced`; the reduction
/// scan offers every primitive triple with `m < b <= m^2 + m`. The right
/// side is `m sum_{d | m} mu(d)/d psi(m/(2d)) - phi(m) sum_{p | m} log p /
/// (p - 1)`. The main sum is truncated once a doubling of the `b` range
/// moves it by at most a quarter of `tol`.
pub fn square_class_identity_with<F>(
    m: i64,
    tol: &Real,
    prec: usize,
    is_z_reduced: F,
) -> Result<(Real, Real)>
where
    F: Fn(i64, i64, i64) -> bool,
{
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "the class identity needs m > 1, got {m}"
        )));
    }
    if m > 500 {
        return Err(Error::ResourceLimit(format!(
            "the reduced-form scan grows like m^2 and is capped at m = 500, got {m}"
        )));
    }
    let tol_f = positive_tol(tol)?;
    let wp = prec + 32;
    let lhs = triple_sum(m, tol_f, wp)? + z_reduced_sum(m, wp, &is_z_reduced);
    let rhs = class_identity_rhs(m, wp)?;
    Ok((lhs.rounded(prec), rhs.rounded(prec)))
}

const TRIPLE_B_START: i64 = 1 << 10;
const TRIPLE_B_CAP: i64 = 1 << 17;

pub(crate) fn positive_tol(tol: &Real) -> Result<f64> {
    let t = tol.to_f64();
    if !tol.is_finite() || tol.signum() <= 0 || !(t > 0.0) {
        return Err(Error::InvalidInput(
            "the tolerance must be a positive real".into(),
        ));
    }
    Ok(t)
}

fn needed_bits(tol_f: f64) -> usize {
    (-tol_f.log2()).ceil().max(0.0) as usize + 8
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    a.gcd(&b).gcd(&c)
}

/// Divisors of `x * y` from the merged factorizations of the two halves.
/// Factoring the halves keeps trial division quadratically cheaper than
/// factoring the product.
fn product_divisors(x: u64, y: u64) -> Vec<u64> {
    let mut factors = trial_factor(x);
    for (p, e) in trial_factor(y) {
        match factors.iter_mut().find(|(q, _)| *q == p) {
            Some(entry) => entry.1 += e,
            None => factors.push((p, e)),
        }
    }
    let mut divs = vec![1u64];
    for (p, e) in factors {
        let prior = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..prior {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs
}

/// Sum of `m^3 / (3 b (b+2a) (b+2c))` over primitive forms of discriminant
/// `m^2` with `a, c, a + b + c > 0` and `lo <= |b| < hi`. For `b < 0` the
/// factors rearrange to `3 |b| (2 |b| (a + c - |b|) + m^2)`, so every term
/// of the block is positive.
fn triple_block(m: i64, lo: i64, hi: i64, wp: usize) -> Real {
    let m2 = (m * m) as i128;
    let m3 = (m as i128) * m2;
    let mut total = Real::from_i64(0, wp);
    let mut b = if (lo - m) % 2 == 0 { lo } else { lo + 1 };
    while b < hi {
        let x = ((b - m) / 2) as u64;
        let y = ((b + m) / 2) as u64;
        let product = x * y;
        for a in product_divisors(x, y) {
            let c = (product / a) as i64;
            let a = a as i64;
            if a > c {
                continue;
            }
            if gcd3(a, b, c) != 1 {
                continue;
            }
            let weight = if a < c { 2 } else { 1 };
            let (bb, aa, cc) = (b as i128, a as i128, c as i128);
            let plus_den = 3 * bb * (bb + 2 * aa) * (bb + 2 * cc);
            total += Real::from_rat(&ratio(&Int::from(weight * m3), &Int::from(plus_den)), wp);
            let j = aa + cc - bb;
            if j > 0 {
                let minus_den = 3 * bb * (2 * bb * j + m2);
                total +=
                    Real::from_rat(&ratio(&Int::from(weight * m3), &Int::from(minus_den)), wp);
            }
        }
        b += 2;
    }
    total
}

fn triple_sum(m: i64, tol_f: f64, wp: usize) -> Result<Real> {
    let target = tol_f / 4.0;
    let mut total = Real::from_i64(0, wp);
    let mut lo = m + 2;
    let mut hi = TRIPLE_B_START.max(8 * m);
    loop {
        let block = triple_block(m, lo, hi, wp);
        let step = block.abs().to_f64();
        total += block;
        if lo > m + 2 && step <= target {
            return Ok(total);
        }
        if hi >= TRIPLE_B_CAP {
            return Err(Error::NonConvergence(format!(
                "the discriminant-{}^2 form sum still moved by {step:.3e} \
                 over b in [{lo}, {hi}), above the target {target:.3e}",
                m
            )));
        }
        lo = hi;
        hi *= 2;
    }
}

fn z_reduced_sum<F>(m: i64, wp: usize, is_z_reduced: &F) -> Real
where
    F: Fn(i64, i64, i64) -> bool,
{
    let mut total = Real::from_i64(0, wp);
    let mut b = m + 2;
    let cap = m * m + m;
    while b <= cap {
        let x = ((b - m) / 2) as u64;
        let y = ((b + m) / 2) as u64;
        for a in product_divisors(x, y) {
            let c = ((x * y) / a) as i64;
            let a = a as i64;
            if gcd3(a, b, c) != 1 {
                continue;
            }
            if is_z_reduced(a, b, c) {
                total += Real::from_rat(&rat(m, b), wp);
            }
        }
        b += 2;
    }
    total
}

fn class_identity_rhs(m: i64, wp: usize) -> Result<Real> {
    let mut total = Real::from_i64(0, wp);
    for d in divisors(m as u64) {
        let mu = moebius(d);
        if mu == 0 {
            continue;
        }
        let d = d as i64;
        let psi = digamma(&Real::from_rat(&rat(m, 2 * d), wp), wp)?;
        total += psi * Real::from_rat(&rat(mu * m, d), wp);
    }
    let phi = euler_phi(m as u64) as i64;
    for (p, _) in trial_factor(m as u64) {
        let p = p as i64;
        total = total - Real::from_i64(p, wp).ln() * Real::from_rat(&rat(phi, p - 1), wp);
    }
    Ok(total)
}

//! Closed forms of the telescoped vertex series and the special functions
//! they are checked against.
//!
//! The two series attached to an admissible half-tree, `sum 1/(rst)` over
//! vertices and `sum 1/(h_in f g)` over vertices, have closed forms built
//! from inverse trigonometric functions of the root data alone; which
//! branch of arcsin enters is decided by the sign of `2 p0 q0 + D`. This
//! module evaluates those closed forms, the per-vertex angle identities
//! behind them, and the digamma/W1 special functions used by the
//! square-discriminant class identities.

use std::sync::OnceLock;

use num_integer::{binomial, Integer};
use num_traits::{One, Signed, Zero};

use crate::bqf::{OrientedEdge, VertexStar};
use crate::error::{Error, Result};
use crate::num::{divisors, euler_phi, moebius, ratio, trial_factor, Int, Rat};
use crate::real::{fold_mod, Real};

/// Root data for a closed-form evaluation, with `h0^2 - 4 p0 q0 = d`.
#[derive(Clone, Debug)]
pub struct ClosedFormInput {
    pub d: Int,
    pub p0: Int,
    pub h0: Int,
    pub q0: Int,
    pub prec: usize,
}

impl ClosedFormInput {
    pub fn new(p0: Int, h0: Int, q0: Int, prec: usize) -> Self {
        let d = &h0 * &h0 - Int::from(4) * &p0 * &q0;
        ClosedFormInput { d, p0, h0, q0, prec }
    }

    pub fn from_edge(e: &OrientedEdge, prec: usize) -> Self {
        ClosedFormInput::new(e.p.clone(), e.h.clone(), e.q.clone(), prec)
    }

    pub fn from_i64(p0: i64, h0: i64, q0: i64, prec: usize) -> Self {
        ClosedFormInput::new(Int::from(p0), Int::from(h0), Int::from(q0), prec)
    }
}

/// Arcsin with the branch picked by the sign of `2 p0 q0 + D`: principal
/// for a nonnegative flag, `pi - arcsin(x)` for a negative one. The flag
/// sign equals the sign of the cosine of the doubled root angle, so the
/// two branches meet continuously at `|x| = 1`.
pub fn arcsin_branched(x: &Real, branch_flag: &Int, prec: usize) -> Result<Real> {
    let one = Real::from_i64(1, prec);
    let clamped = if x.abs() > one {
        if &x.abs() - &one > Real::pow2(8 - prec as i32, prec) {
            return Err(Error::Domain(format!("arcsin argument {x} outside [-1, 1]")));
        }
        if x.signum() < 0 {
            -&one
        } else {
            one
        }
    } else {
        x.clone()
    };
    let principal = clamped.asin();
    if branch_flag.is_negative() {
        Ok(&Real::pi(prec) - &principal)
    } else {
        Ok(principal)
    }
}

fn sqrt_int(n: &Int, prec: usize) -> Real {
    Real::from_int(n, prec).sqrt()
}

/// Closed form of `sum 1/(rst)` over the vertices of the half-tree above
/// the root `(p0, h0, q0)`.
///
/// Negative discriminant: `(1/D)(h0/(p0 q0) - 2 arcsin_branched(...)/sqrt(-D))`
/// with argument `h0 sqrt(-D)/(2 p0 q0)`; any sign of `h0` is accepted, so
/// a full tree can be split at an edge and summed as two halves. Positive
/// discriminant: the arcsinh analogue, `h0 > 0`. Zero discriminant:
/// `(1/24)(h0/(p0 q0))^3`, `h0 > 0`.
pub fn closed_rst(input: &ClosedFormInput) -> Result<Real> {
    let ClosedFormInput { d, p0, h0, q0, prec } = input;
    let prec = *prec;
    if &(h0 * h0 - Int::from(4) * p0 * q0) != d {
        return Err(Error::InvalidInput(String::from("root data does not match the discriminant")));
    }
    if !p0.is_positive() || !q0.is_positive() {
        return Err(Error::InvalidInput(String::from("side regions must be positive")));
    }
    let pq = Real::from_int(&(p0 * q0), prec);
    let h = Real::from_int(h0, prec);
    let two = Real::from_i64(2, prec);
    let root_term = &h / &pq;
    if d.is_negative() {
        let sd = sqrt_int(&-d, prec);
        let x = &h * &sd / (&two * &pq);
        let flag = h0 * h0 + d;
        let angle = arcsin_branched(&x, &flag, prec)?;
        Ok((root_term - &two * &angle / &sd) / Real::from_int(d, prec))
    } else if d.is_positive() {
        if !h0.is_positive() {
            return Err(Error::InvalidInput(String::from(
                "positive discriminant needs a positive root label",
            )));
        }
        let sd = sqrt_int(d, prec);
        let x = &h * &sd / (&two * &pq);
        Ok((root_term - &two * &x.asinh() / &sd) / Real::from_int(d, prec))
    } else {
        if !h0.is_positive() {
            return Err(Error::InvalidInput(String::from(
                "zero discriminant needs a positive root label",
            )));
        }
        let cube = &root_term * &root_term * &root_term;
        Ok(cube / Real::from_i64(24, prec))
    }
}

/// Closed form of `sum 1/(h_in f g)` over the vertices of the half-tree
/// whose root edge carries the label `h0 > 0`.
///
/// Negative discriminant: `(1/D)(arctan(sqrt(-D)/h0)/sqrt(-D) - 1/h0)`,
/// principal arctan. Positive discriminant: the arctanh analogue, which
/// needs `h0 > sqrt(D)`. Zero discriminant: `1/(3 h0^3)`.
pub fn closed_efg(d: &Int, h0: &Int, prec: usize) -> Result<Real> {
    if !h0.is_positive() {
        return Err(Error::InvalidInput(format!("root label {h0} must be positive")));
    }
    let h = Real::from_int(h0, prec);
    if d.is_negative() {
        let sd = sqrt_int(&-d, prec);
        let angle = (&sd / &h).atan();
        Ok((&angle / &sd - h.recip()) / Real::from_int(d, prec))
    } else if d.is_positive() {
        if &(h0 * h0) <= d {
            return Err(Error::InvalidInput(format!(
                "label {h0} must exceed the square root of the discriminant {d}"
            )));
        }
        let sd = sqrt_int(d, prec);
        let angle = (&sd / &h).atanh();
        Ok((&angle / &sd - h.recip()) / Real::from_int(d, prec))
    } else {
        Ok(Real::from_rat(&ratio(&Int::one(), &(Int::from(3) * h0 * h0 * h0)), prec))
    }
}

/// Exact Bernoulli numbers `B_0 .. B_60` by the defining recurrence.
fn bernoulli_cache() -> &'static Vec<Rat> {
    static CACHE: OnceLock<Vec<Rat>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let mut table: Vec<Rat> = Vec::with_capacity(61);
        table.push(Rat::one());
        for m in 1..=60usize {
            let mut acc = Rat::zero();
            for (j, b) in table.iter().enumerate() {
                let c = binomial(Int::from(m as u32 + 1), Int::from(j as u32));
                acc += Rat::from_integer(c) * b;
            }
            table.push(-acc / Rat::from_integer(Int::from(m as u32 + 1)));
        }
        table
    })
}

/// `B_{2k}` as an exact rational, for `2k <= 60`.
pub fn bernoulli(even_index: usize) -> Rat {
    assert!(even_index % 2 == 0 && even_index <= 60);
    bernoulli_cache()[even_index].clone()
}

/// Digamma by upward recurrence into the asymptotic range, then the
/// Bernoulli tail `ln x - 1/(2x) - sum B_{2k}/(2k x^{2k})`.
pub fn digamma(x: &Real, prec: usize) -> Result<Real> {
    let wp = prec + 64;
    // Large enough that thirty Bernoulli terms overshoot the target
    // precision: the k-th term is about 2 (2k)! / (2 pi y)^{2k}.
    let shift_exp = (wp + 116).div_ceil(60) as i32;
    let threshold = Real::pow2(shift_exp.max(5), wp);
    let mut y = x.rounded(wp);
    let mut shift = Real::zero(wp);
    let mut steps = 0u32;
    while y < threshold {
        if y.is_zero() {
            return Err(Error::Pole(String::from("digamma pole at a nonpositive integer")));
        }
        shift = &shift + &y.recip();
        y = &y + &Real::from_i64(1, wp);
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::InvalidInput(String::from("digamma argument too negative")));
        }
    }
    let mut tail = Real::zero(wp);
    let u = (&y * &y).recip();
    let mut pw = u.clone();
    let floor = Real::pow2(-(wp as i32) - 8, wp);
    for k in 1..=30usize {
        let coeff = bernoulli(2 * k) / Rat::from_integer(Int::from(2 * k as u32));
        let term = Real::from_rat(&coeff, wp) * &pw;
        tail = &tail + &term;
        if term.abs() < floor {
            break;
        }
        pw = &pw * &u;
    }
    let asymptotic = y.ln() - (&Real::from_i64(2, wp) * &y).recip() - tail;
    Ok((asymptotic - shift).rounded(prec))
}

/// Tanh-sinh quadrature of `f` over `[a, b]`, doubling the node density
/// until two successive levels agree within `tol`. Returns the value and
/// the last level-to-level difference as an error estimate.
pub fn tanh_sinh<F>(f: F, a: &Real, b: &Real, prec: usize, tol: &Real) -> Result<(Real, Real)>
where
    F: Fn(&Real) -> Result<Real>,
{
    let half = Real::from_rat(&Rat::new(Int::one(), Int::from(2)), prec);
    let center = (a + b) * &half;
    let radius = (b - a) * &half;
    let pi_half = Real::pi(prec) * &half;
    let ln_inv_tol = -tol.to_f64().ln();
    if !ln_inv_tol.is_finite() {
        return Err(Error::InvalidInput(String::from("tolerance must be in (0, 1)")));
    }
    let t_max = ((2.0 / std::f64::consts::PI) * (ln_inv_tol + 5.0)).ln() + 0.5;

    // One integrand sample at abscissa tanh((pi/2) sinh t), weighted.
    let sample = |t: &Real| -> Result<Real> {
        let u = &pi_half * &t.sinh();
        let cu = u.cosh();
        let weight = &pi_half * &t.cosh() / (&cu * &cu);
        let y = &center + &(&radius * &u.tanh());
        Ok(&weight * &f(&y)?)
    };

    let mut level_sum = sample(&Real::zero(prec))?;
    let mut k = 1i64;
    while (k as f64) <= t_max {
        let t = Real::from_i64(k, prec);
        level_sum = &level_sum + &sample(&t)?;
        level_sum = &level_sum + &sample(&-&t)?;
        k += 1;
    }
    let mut value = &radius * &level_sum;
    let mut estimate = value.abs();
    for level in 1..=12u32 {
        let h = Real::pow2(-(level as i32), prec);
        let mut new_sum = Real::zero(prec);
        let mut j = 0i64;
        loop {
            let t_f64 = ((2 * j + 1) as f64) * 0.5f64.powi(level as i32);
            if t_f64 > t_max {
                break;
            }
            let t = Real::from_i64(2 * j + 1, prec) * &h;
            new_sum = &new_sum + &sample(&t)?;
            new_sum = &new_sum + &sample(&-&t)?;
            j += 1;
        }
        let refined = &value * &half + &(&h * &radius * &new_sum);
        estimate = (&refined - &value).abs();
        value = refined;
        if !value.is_finite() {
            return Err(Error::QuadratureFailure(String::from("integrand produced a non-finite value")));
        }
        if level >= 3 && estimate <= *tol {
            return Ok((value, estimate));
        }
    }
    Err(Error::QuadratureFailure(format!(
        "tanh-sinh did not reach tolerance {tol}; last level difference {estimate}"
    )))
}

/// The even, 1-periodic integral
/// `W1(x) = 2 int_0^infty y (E c - 1) / ((y^2+1)(E^2 - 2 E c + 1)) dy`
/// with `E = e^{pi y}` and `c = cos(2 pi x)`.
pub fn w1(x: &Real, prec: usize) -> Result<Real> {
    let wp = prec + 32;
    let one = Real::from_i64(1, wp);
    // Even and 1-periodic: fold the argument into [0, 1/2].
    let folded = fold_mod(x, &one).abs();
    if folded.is_zero() {
        return Err(Error::InvalidInput(String::from("w1 needs a non-integer argument")));
    }
    let pi = Real::pi(wp);
    let two = Real::from_i64(2, wp);
    let c = (&two * &pi * &folded).cos();
    let y_max_f64 = ((wp as f64) * std::f64::consts::LN_2 + 10.0) / std::f64::consts::PI;
    let y_max = Real::from_f64(y_max_f64.max(30.0), wp);
    let integrand = |y: &Real| -> Result<Real> {
        let e = (&pi * y).exp();
        let num = y * &(&e * &c - &one) * &two;
        let den = (y * y + &one) * (&e * &e - &two * &e * &c + &one);
        Ok(num / den)
    };
    let tol = Real::pow2(-(prec as i32) - 8, wp);
    let (value, _est) = tanh_sinh(integrand, &Real::zero(wp), &y_max, wp, &tol)?;
    Ok(value.rounded(prec))
}

/// Residual of the digamma--W1 relation
/// `2 W1(x) + log 4 + psi(1/2 + x) + psi(3/2 - x) = 0`.
pub fn w1_identity_residual(x: &Real, prec: usize) -> Result<Real> {
    let half = Real::from_rat(&Rat::new(Int::one(), Int::from(2)), prec);
    let three_half = Real::from_rat(&Rat::new(Int::from(3), Int::from(2)), prec);
    let lhs = Real::from_i64(2, prec) * &w1(x, prec)?
        + Real::from_i64(4, prec).ln()
        + digamma(&(&half + x), prec)?
        + digamma(&(&three_half - x), prec)?;
    Ok(lhs)
}

/// Sum of `W1(r/m)` over residues `r` prime to `m`, paired with the closed
/// form it should equal:
/// `phi(m) (log(m/2) + sum_{p | m} log p / (p-1)) - m sum_{d | m} mu(d)/d psi(m/(2d))`.
/// Returns `(sum, closed form)`; the two routes share no machinery past
/// basic arithmetic, so their agreement is a real check.
pub fn w1_sum_check(m: u64, prec: usize) -> Result<(Real, Real)> {
    if m < 2 {
        return Err(Error::InvalidInput(String::from(
            "the modulus must be at least 2",
        )));
    }
    let wp = prec + 32;
    let mut lhs = Real::zero(wp);
    for r in 1..m {
        if r.gcd(&m) != 1 {
            continue;
        }
        let x = Real::from_rat(&Rat::new(Int::from(r), Int::from(m)), wp);
        lhs = lhs + w1(&x, wp)?;
    }

    let phi = Real::from_i64(euler_phi(m) as i64, wp);
    let m_real = Real::from_i64(m as i64, wp);
    let mut rhs = &phi * (&m_real / Real::from_i64(2, wp)).ln();
    for (p, _) in trial_factor(m) {
        rhs = rhs
            + &phi * Real::from_i64(p as i64, wp).ln() / Real::from_i64(p as i64 - 1, wp);
    }
    for d in divisors(m) {
        let mu = moebius(d);
        if mu == 0 {
            continue;
        }
        let arg = Real::from_rat(&Rat::new(Int::from(m), Int::from(2 * d)), wp);
        let psi = digamma(&arg, wp)?;
        rhs = rhs - Real::from_i64(mu * (m / d) as i64, wp) * psi;
    }
    Ok((lhs.rounded(prec), rhs.rounded(prec)))
}

/// The three-angle identities at one vertex, stated with outward labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleIdentity {
    /// D < 0: branched arcsins of the three edges sum to a multiple of 2 pi.
    Arcsin,
    /// D < 0: principal arctans of `sqrt(-D)/e_i` sum to a multiple of pi.
    Arctan,
    /// D > 0: arcsinhs of the three edge angles sum to zero.
    Arcsinh,
    /// D > 0, all `|e_i| > sqrt(D)`: arctanhs of `sqrt(D)/e_i` sum to zero.
    Arctanh,
}

/// The parent-equals-children splittings at one vertex, stated for the
/// incoming edge against its two child edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitIdentity {
    Arcsin,
    Arctan,
    Arcsinh,
    Arctanh,
}

fn require_negative_disc(d: &Int) -> Result<()> {
    if !d.is_negative() {
        return Err(Error::InvalidInput(format!("needs a negative discriminant, got {d}")));
    }
    Ok(())
}

fn require_positive_disc(d: &Int) -> Result<()> {
    if !d.is_positive() {
        return Err(Error::InvalidInput(format!("needs a positive discriminant, got {d}")));
    }
    Ok(())
}

/// Branched angle of one edge: label `h` between regions with product `ab`.
fn arcsin_edge(h: &Int, ab: &Int, d: &Int, prec: usize) -> Result<Real> {
    if !ab.is_positive() {
        return Err(Error::Domain(String::from("flanking regions must be positive")));
    }
    let x = Real::from_int(h, prec) * sqrt_int(&-d, prec)
        / (Real::from_i64(2, prec) * Real::from_int(ab, prec));
    // sign(2ab + D) = sign(h^2 + D) because h^2 - 4ab = D on every edge.
    arcsin_branched(&x, &(h * h + d), prec)
}

fn arcsinh_edge(h: &Int, ab: &Int, d: &Int, prec: usize) -> Result<Real> {
    if ab.is_zero() {
        return Err(Error::DivisionByZero(String::from("zero flanking region")));
    }
    let x = Real::from_int(h, prec) * sqrt_int(d, prec)
        / (Real::from_i64(2, prec) * Real::from_int(ab, prec));
    Ok(x.asinh())
}

fn arctan_edge(h: &Int, d: &Int, prec: usize) -> Result<Real> {
    if h.is_zero() {
        return Err(Error::DivisionByZero(String::from("zero edge label")));
    }
    Ok((sqrt_int(&-d, prec) / Real::from_int(h, prec)).atan())
}

fn arctanh_edge(h: &Int, d: &Int, prec: usize) -> Result<Real> {
    if &(h * h) <= d {
        return Err(Error::Domain(format!(
            "label {h} inside the arctanh domain bound for discriminant {d}"
        )));
    }
    Ok((sqrt_int(d, prec) / Real::from_int(h, prec)).atanh())
}

/// Residual of a three-angle identity at the given vertex, folded by the
/// identity's period where one applies.
pub fn check_triple(star: &VertexStar, which: TripleIdentity, prec: usize) -> Result<Real> {
    let d = star.discriminant();
    let pairs = [
        (&star.e, &star.r * &star.t),
        (&star.f, &star.r * &star.s),
        (&star.g, &star.s * &star.t),
    ];
    match which {
        TripleIdentity::Arcsin => {
            require_negative_disc(&d)?;
            let mut sum = Real::zero(prec);
            for (h, ab) in &pairs {
                sum = &sum + &arcsin_edge(h, ab, &d, prec)?;
            }
            let period = Real::pi(prec) * Real::from_i64(2, prec);
            Ok(fold_mod(&sum, &period))
        }
        TripleIdentity::Arctan => {
            require_negative_disc(&d)?;
            let mut sum = Real::zero(prec);
            for (h, _) in &pairs {
                sum = &sum + &arctan_edge(h, &d, prec)?;
            }
            Ok(fold_mod(&sum, &Real::pi(prec)))
        }
        TripleIdentity::Arcsinh => {
            require_positive_disc(&d)?;
            let mut sum = Real::zero(prec);
            for (h, ab) in &pairs {
                sum = &sum + &arcsinh_edge(h, ab, &d, prec)?;
            }
            Ok(sum)
        }
        TripleIdentity::Arctanh => {
            require_positive_disc(&d)?;
            let mut sum = Real::zero(prec);
            for (h, _) in &pairs {
                sum = &sum + &arctanh_edge(h, &d, prec)?;
            }
            Ok(sum)
        }
    }
}

/// Residual of a parent-minus-children splitting at the vertex ahead of
/// `edge`: the incoming angle minus the two child-edge angles.
pub fn check_split(edge: &OrientedEdge, which: SplitIdentity, prec: usize) -> Result<Real> {
    let d = edge.discriminant();
    let (left, right) = edge.children();
    let s = edge.ahead();
    match which {
        SplitIdentity::Arcsin => {
            require_negative_disc(&d)?;
            let parent = arcsin_edge(&edge.h, &(&edge.p * &edge.q), &d, prec)?;
            let a = arcsin_edge(&left.h, &(&edge.p * &s), &d, prec)?;
            let b = arcsin_edge(&right.h, &(&s * &edge.q), &d, prec)?;
            Ok(parent - a - b)
        }
        SplitIdentity::Arctan => {
            require_negative_disc(&d)?;
            let parent = arctan_edge(&edge.h, &d, prec)?;
            let a = arctan_edge(&left.h, &d, prec)?;
            let b = arctan_edge(&right.h, &d, prec)?;
            Ok(parent - a - b)
        }
        SplitIdentity::Arcsinh => {
            require_positive_disc(&d)?;
            let parent = arcsinh_edge(&edge.h, &(&edge.p * &edge.q), &d, prec)?;
            let a = arcsinh_edge(&left.h, &(&edge.p * &s), &d, prec)?;
            let b = arcsinh_edge(&right.h, &(&s * &edge.q), &d, prec)?;
            Ok(parent - a - b)
        }
        SplitIdentity::Arctanh => {
            require_positive_disc(&d)?;
            let parent = arctanh_edge(&edge.h, &d, prec)?;
            let a = arctanh_edge(&left.h, &d, prec)?;
            let b = arctanh_edge(&right.h, &d, prec)?;
            Ok(parent - a - b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};

    const P: usize = 128;

    fn close(a: &Real, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    fn tiny(x: &Real) -> bool {
        x.abs() < Real::pow2(-100, P)
    }

    #[test]
    fn branched_arcsin_reference_points() {
        let zero = Real::zero(P);
        let one = Real::from_i64(1, P);
        assert!(tiny(&arcsin_branched(&zero, &int(1), P).unwrap()));
        let flipped = arcsin_branched(&zero, &int(-2), P).unwrap();
        assert!(tiny(&(&flipped - &Real::pi(P))));
        let boundary = arcsin_branched(&one, &int(0), P).unwrap();
        assert!(tiny(&(&boundary - &(Real::pi(P) / Real::from_i64(2, P)))));
        assert!(matches!(
            arcsin_branched(&Real::from_f64(1.5, P), &int(1), P),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn closed_rst_reference_values() {
        // Root (1,0,1): flag is negative, arcsin(0) lands on the pi branch.
        let v = closed_rst(&ClosedFormInput::from_i64(1, 0, 1, P)).unwrap();
        let quarter_pi = Real::pi(P) / Real::from_i64(4, P);
        assert!(tiny(&(&v - &quarter_pi)));

        // Positive discriminant: (2,3,1) gives 3/2 - 2 ln 2 because
        // asinh(3/4) = ln 2, and (3,5,2) gives 5/6 - 2 ln(3/2).
        let v = closed_rst(&ClosedFormInput::from_i64(2, 3, 1, P)).unwrap();
        let expect = Real::from_rat(&rat(3, 2), P)
            - Real::from_i64(2, P) * Real::from_i64(2, P).ln();
        assert!(tiny(&(&v - &expect)));
        let v = closed_rst(&ClosedFormInput::from_i64(3, 5, 2, P)).unwrap();
        let expect = Real::from_rat(&rat(5, 6), P)
            - Real::from_i64(2, P) * Real::from_rat(&rat(3, 2), P).ln();
        assert!(tiny(&(&v - &expect)));

        // Zero discriminant: (1,2,1) gives 1/3.
        let v = closed_rst(&ClosedFormInput::from_i64(1, 2, 1, P)).unwrap();
        assert!(tiny(&(&v - &Real::from_rat(&rat(1, 3), P))));
    }

    #[test]
    fn closed_rst_splits_a_full_tree_into_two_halves() {
        for (p, h, q, d_abs) in [(1i64, 1i64, 1i64, 3u32), (1, 1, 2, 7), (1, 0, 1, 4)] {
            let a = closed_rst(&ClosedFormInput::from_i64(p, h, q, P)).unwrap();
            let b = closed_rst(&ClosedFormInput::from_i64(q, -h, p, P)).unwrap();
            let total = &a + &b;
            let expect = Real::from_i64(4, P) * Real::pi(P)
                / (Real::from_i64(d_abs as i64, P)
                    * Real::from_i64(d_abs as i64, P).sqrt());
            assert!((&total - &expect).abs() < Real::pow2(-100, P), "D = -{d_abs}");
        }
    }

    #[test]
    fn closed_efg_reference_values() {
        let v = closed_efg(&int(-4), &int(2), P).unwrap();
        let expect = Real::from_rat(&rat(1, 8), P) - Real::pi(P) / Real::from_i64(32, P);
        assert!(tiny(&(&v - &expect)));

        let v = closed_efg(&int(0), &int(2), P).unwrap();
        assert!(tiny(&(&v - &Real::from_rat(&rat(1, 24), P))));
        let v = closed_efg(&int(0), &int(1), P).unwrap();
        assert!(tiny(&(&v - &Real::from_rat(&rat(1, 3), P))));

        // D = 8, h0 = 4: arctanh(sqrt(8)/4) = ln(1 + sqrt 2).
        let v = closed_efg(&int(8), &int(4), P).unwrap();
        let sqrt2 = Real::from_i64(2, P).sqrt();
        let expect = ((Real::from_i64(1, P) + &sqrt2).ln()
            / (Real::from_i64(2, P) * &sqrt2)
            - Real::from_rat(&rat(1, 4), P))
            / Real::from_i64(8, P);
        assert!(tiny(&(&v - &expect)));

        assert!(closed_efg(&int(8), &int(2), P).is_err());
        assert!(closed_efg(&int(-4), &int(0), P).is_err());
    }

    #[test]
    fn bernoulli_reference_values() {
        assert_eq!(bernoulli(0), rat(1, 1));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
        assert_eq!(bernoulli(60).denom(), rat(1, 56786730).denom());
    }

    #[test]
    fn digamma_calibration_points() {
        let gamma = Real::euler_gamma(P).unwrap();
        let v = digamma(&Real::from_i64(1, P), P).unwrap();
        assert!((&v + &gamma).abs() < Real::pow2(-110, P));

        let half = Real::from_rat(&rat(1, 2), P);
        let v = digamma(&half, P).unwrap();
        let expect = -&gamma - Real::from_i64(2, P) * Real::from_i64(2, P).ln();
        assert!((&v - &expect).abs() < Real::pow2(-110, P));

        let v = digamma(&Real::from_i64(2, P), P).unwrap();
        let expect = Real::from_i64(1, P) - &gamma;
        assert!((&v - &expect).abs() < Real::pow2(-110, P));

        // Reflection gap between the quarter points is exactly -pi.
        let a = digamma(&Real::from_rat(&rat(1, 4), P), P).unwrap();
        let b = digamma(&Real::from_rat(&rat(3, 4), P), P).unwrap();
        assert!((&a - &b + &Real::pi(P)).abs() < Real::pow2(-110, P));
    }

    #[test]
    fn digamma_square_identity_reference() {
        // 3 psi(3/2) - psi(1/2) - log 3 printed to 16 digits.
        let v = Real::from_i64(3, P) * digamma(&Real::from_rat(&rat(3, 2), P), P).unwrap()
            - digamma(&Real::from_rat(&rat(1, 2), P), P).unwrap()
            - Real::from_i64(3, P).ln();
        assert!(close(&v, 0.9743676592890432, 1e-15));
    }

    #[test]
    fn digamma_recurrence_and_poles() {
        for x in [0.37f64, 3.7, 7.77] {
            let xr = Real::from_f64(x, P);
            let lhs = digamma(&(&xr + &Real::from_i64(1, P)), P).unwrap();
            let rhs = digamma(&xr, P).unwrap() + xr.recip();
            assert!((&lhs - &rhs).abs() < Real::pow2(8 - P as i32, P));
        }
        assert!(matches!(digamma(&Real::zero(P), P), Err(Error::Pole(_))));
        assert!(matches!(digamma(&Real::from_i64(-3, P), P), Err(Error::Pole(_))));
    }

    #[test]
    fn tanh_sinh_integrates_smooth_functions() {
        // int_0^1 x^2 dx = 1/3.
        let tol = Real::pow2(-100, P);
        let (v, est) = tanh_sinh(
            |x| Ok(x * x),
            &Real::zero(P),
            &Real::from_i64(1, P),
            P,
            &tol,
        )
        .unwrap();
        assert!((&v - &Real::from_rat(&rat(1, 3), P)).abs() < Real::pow2(-90, P));
        assert!(est <= tol);

        // int_0^pi sin x dx = 2.
        let (v, _) = tanh_sinh(|x| Ok(x.sin()), &Real::zero(P), &Real::pi(P), P, &tol).unwrap();
        assert!((&v - &Real::from_i64(2, P)).abs() < Real::pow2(-90, P));
    }

    #[test]
    fn w1_symmetries_hold() {
        let x = Real::from_f64(0.3, 96);
        let a = w1(&x, 96).unwrap();
        let b = w1(&-&x, 96).unwrap();
        let c = w1(&(&x + &Real::from_i64(1, 96)), 96).unwrap();
        assert!((&a - &b).abs() < Real::pow2(-80, 96));
        assert!((&a - &c).abs() < Real::pow2(-80, 96));
        assert!(w1(&Real::from_i64(2, 96), 96).is_err());
    }

    #[test]
    fn w1_primitive_residue_sums_match_their_closed_forms() {
        for m in [3u64, 4, 5] {
            let (lhs, rhs) = w1_sum_check(m, P).unwrap();
            let dev = (&lhs - &rhs).abs();
            assert!(
                dev < Real::from_f64(1e-12, P),
                "m = {m}: {lhs} vs {rhs}"
            );
        }
        assert!(w1_sum_check(1, P).is_err());
    }

    #[test]
    fn w1_value_at_one_half_matches_digamma() {
        // 2 W1(1/2) + log 4 + 2 psi(1) = 0.
        let half = Real::from_rat(&rat(1, 2), P);
        let v = w1_identity_residual(&half, P).unwrap();
        assert!(v.abs() < Real::pow2(-100, P), "residual {v}");
    }

    #[test]
    fn w1_identity_residual_at_one_third() {
        let third = Real::from_rat(&rat(1, 3), P);
        let v = w1_identity_residual(&third, P).unwrap();
        assert!(v.abs() < Real::parse_dec("1e-12", P).unwrap(), "residual {v}");
    }

    #[test]
    fn triple_identities_on_reference_stars() {
        // (1,2,1): angles pi + pi/2 + pi/2 fold to zero mod 2 pi.
        let star = OrientedEdge::from_i64(1, 0, 1).vertex_star();
        let r = check_triple(&star, TripleIdentity::Arcsin, P).unwrap();
        assert!(tiny(&r), "arcsin triple {r}");

        // (1,2,2): outward labels 1,1,3 with D=-7; arctans sum to pi.
        let star = VertexStar::from_i64(1, 2, 2);
        let r = check_triple(&star, TripleIdentity::Arctan, P).unwrap();
        assert!(tiny(&r), "arctan triple {r}");
        let r = check_triple(&star, TripleIdentity::Arcsin, P).unwrap();
        assert!(tiny(&r), "arcsin triple {r}");

        // (2,9,2) with outward labels (-5,9,9), D=9: both hyperbolic sums vanish.
        let star = OrientedEdge::from_i64(2, 5, 2).vertex_star();
        let r = check_triple(&star, TripleIdentity::Arcsinh, P).unwrap();
        assert!(tiny(&r), "arcsinh triple {r}");
        let r = check_triple(&star, TripleIdentity::Arctanh, P).unwrap();
        assert!(tiny(&r), "arctanh triple {r}");
    }

    #[test]
    fn split_identities_on_reference_edges() {
        let e = OrientedEdge::from_i64(1, 0, 1);
        assert!(tiny(&check_split(&e, SplitIdentity::Arcsin, P).unwrap()));
        let e = OrientedEdge::from_i64(1, 2, 2);
        assert!(tiny(&check_split(&e, SplitIdentity::Arcsin, P).unwrap()));
        assert!(tiny(&check_split(&e, SplitIdentity::Arctan, P).unwrap()));
        let e = OrientedEdge::from_i64(2, 3, 1);
        assert!(tiny(&check_split(&e, SplitIdentity::Arcsinh, P).unwrap()));
        assert!(tiny(&check_split(&e, SplitIdentity::Arctanh, P).unwrap()));
    }
}

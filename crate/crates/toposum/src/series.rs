//! Adaptive evaluation of the convergent vertex sums attached to climbing
//! subtrees, and a catalog of named series with known closed-form values.
//!
//! The engine walks a subtree depth-first, giving every edge a share of the
//! caller's tolerance. A subtree is dropped as soon as a rational upper
//! bound on its whole mass fits inside its share, so the reported
//! [`SeriesResult::error_bound`] is a true bound on everything left out.
//! The same walk runs either on labeled edges `(p, h, q)` or directly on
//! pairs of lattice vectors, which gives an independent arithmetic route to
//! the same sums for cross-checking.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::bqf::OrientedEdge;
use crate::error::{Error, Result};
use crate::num::{rat, ratio, Int, Rat};
use crate::real::Real;

/// How a series value was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumMethod {
    /// Term-by-term enumeration of the index set.
    Direct,
    /// Frontier telescoping of a partial sum.
    Telescoped,
    /// Adaptive walk that prices and drops whole subtrees by their
    /// closed-form mass.
    SubtreeClosedForm,
}

impl SumMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SumMethod::Direct => "direct",
            SumMethod::Telescoped => "telescoped",
            SumMethod::SubtreeClosedForm => "subtree-closed-form",
        }
    }
}

/// Which per-vertex term the engine sums: reciprocals of the three region
/// labels or of the three edge labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumKind {
    Rst,
    Efg,
}

/// Outcome of a series evaluation.
#[derive(Clone, Debug)]
pub struct SeriesResult {
    pub value: Real,
    /// Bound on `|value - limit|`. Rigorous unless `bound_is_rigorous`
    /// says otherwise, in which case it is an empirical estimate.
    pub error_bound: Real,
    pub bound_is_rigorous: bool,
    /// Number of terms actually added into `value`.
    pub terms: u64,
    /// Deepest tree level expanded, or the enumeration cutoff for flat
    /// routes.
    pub depth: u32,
    pub method: SumMethod,
}

/// Which corner of the mediant tree a vector-pair walk ranges over. Every
/// admitted quadruple `(a, b), (c, d)` spans a unimodular pair:
/// `|ad - bc| = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SternBrocotConstraint {
    /// All four coordinates nonnegative.
    FirstQuadrant,
    /// Both vectors on or below the diagonal: `a >= b >= 0`, `c >= d >= 0`.
    HalfCone,
    /// Consecutive fractions `a/b <= c/d` inside the unit interval.
    UnitFarey,
}

impl SternBrocotConstraint {
    /// Starting pair `((a, b), (c, d))` of the walk; every later pair
    /// replaces one side with the mediant `(a+c, b+d)`.
    pub fn root_pair(&self) -> ((i64, i64), (i64, i64)) {
        match self {
            SternBrocotConstraint::FirstQuadrant => ((1, 0), (0, 1)),
            SternBrocotConstraint::HalfCone => ((1, 0), (1, 1)),
            SternBrocotConstraint::UnitFarey => ((0, 1), (1, 1)),
        }
    }

    /// Whether a quadruple lies in this corner and spans a unimodular pair.
    pub fn admits(&self, a: i64, b: i64, c: i64, d: i64) -> bool {
        let det = a
            .checked_mul(d)
            .and_then(|ad| b.checked_mul(c).map(|bc| ad - bc));
        if det.map(i64::abs) != Some(1) {
            return false;
        }
        match self {
            SternBrocotConstraint::FirstQuadrant => a >= 0 && b >= 0 && c >= 0 && d >= 0,
            SternBrocotConstraint::HalfCone => a >= b && b >= 0 && c >= d && d >= 0,
            SternBrocotConstraint::UnitFarey => {
                b >= 1 && d >= 1 && a >= 0 && a <= b && c >= 0 && c <= d
            }
        }
    }
}

/// One mediant step: the two child pairs of `((a,b),(c,d))`.
pub fn mediant_children(
    pair: ((i64, i64), (i64, i64)),
) -> (((i64, i64), (i64, i64)), ((i64, i64), (i64, i64))) {
    let ((a, b), (c, d)) = pair;
    let m = (a + c, b + d);
    (((a, b), m), (m, (c, d)))
}

// --- the adaptive engine ---------------------------------------------------

/// A node of some climbing subtree walk. `labels` returns the flanking
/// regions and edge label `(p, h, q)`; `split` produces the two subtrees
/// past the vertex ahead.
trait SumNode: Clone {
    fn labels(&self) -> (Int, Int, Int);
    fn split(&self) -> (Self, Self);
}

impl SumNode for OrientedEdge {
    fn labels(&self) -> (Int, Int, Int) {
        (self.p.clone(), self.h.clone(), self.q.clone())
    }

    fn split(&self) -> (Self, Self) {
        self.children()
    }
}

/// A pair of lattice vectors together with the diagonal form
/// `alpha m^2 + beta n^2` that prices the regions. Mediant recursion on the
/// pair reproduces the label recursion of the corresponding edge.
#[derive(Clone)]
struct ConeNode {
    x: (Int, Int),
    y: (Int, Int),
    alpha: Int,
    beta: Int,
}

impl ConeNode {
    fn form_value(&self, v: &(Int, Int)) -> Int {
        &self.alpha * &v.0 * &v.0 + &self.beta * &v.1 * &v.1
    }
}

impl SumNode for ConeNode {
    fn labels(&self) -> (Int, Int, Int) {
        let p = self.form_value(&self.x);
        let q = self.form_value(&self.y);
        let dot = &self.alpha * &self.x.0 * &self.y.0 + &self.beta * &self.x.1 * &self.y.1;
        (p, dot * 2, q)
    }

    fn split(&self) -> (Self, Self) {
        let m = (&self.x.0 + &self.y.0, &self.x.1 + &self.y.1);
        let left = ConeNode {
            x: self.x.clone(),
            y: m.clone(),
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
        };
        let right = ConeNode {
            x: m,
            y: self.y.clone(),
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
        };
        (left, right)
    }
}

const BOUND_MANTISSA_BITS: i64 = 96;

/// Round a positive rational up to roughly 96 significant bits with a
/// power-of-two denominator. Subtree bounds pass through this before
/// entering the frontier ledger, so ledger arithmetic stays cheap while
/// every entry still dominates the mass it prices.
fn dyadic_up(r: &Rat) -> Rat {
    debug_assert!(r.is_positive());
    let n = r.numer();
    let d = r.denom();
    let shift = d.bits() as i64 - n.bits() as i64 + BOUND_MANTISSA_BITS;
    if shift >= 0 {
        let scaled: Int = n << (shift as usize);
        let (mut m, rem) = scaled.div_rem(d);
        if !rem.is_zero() {
            m += 1;
        }
        ratio(&m, &(Int::one() << (shift as usize)))
    } else {
        let scaled: Int = d << ((-shift) as usize);
        let (mut m, rem) = n.div_rem(&scaled);
        if !rem.is_zero() {
            m += 1;
        }
        Rat::from(m << ((-shift) as usize))
    }
}

fn cube(x: &Int) -> Int {
    x * x * x
}

/// Upper bound on the whole mass of the subtree hanging past `(p, h, q)`,
/// when one is available at this node. Each case comes from the subtree's
/// closed form: the third-order remainder of arcsin, arsinh, arctan or
/// artanh at the argument the subtree telescopes to.
fn subtree_bound(kind: SumKind, d: &Int, p: &Int, h: &Int, q: &Int) -> Option<Rat> {
    match kind {
        SumKind::Rst => {
            if d.is_negative() {
                // The arcsin remainder needs the principal branch, which
                // for a climbing edge is exactly h >= 0 and 2pq + d > 0.
                let margin = Int::from(2) * p * q + d;
                if !h.is_negative() && margin.is_positive() {
                    let pq = p * q;
                    // Two valid remainder estimates: (pi/2 - 1) u^3 capped
                    // to u^3, and u^3 / (3 (1 - u^2)); keep the smaller.
                    let crude = ratio(&cube(h), &(Int::from(4) * cube(&pq)));
                    let sharp = ratio(
                        &cube(h),
                        &(Int::from(3) * &pq * &margin * &margin),
                    );
                    Some(crude.min(sharp))
                } else {
                    None
                }
            } else if h.is_positive() {
                // u - arsinh u <= u^3 / 6 for all u >= 0.
                let pq = p * q;
                Some(ratio(&cube(h), &(Int::from(24) * cube(&pq))))
            } else {
                None
            }
        }
        SumKind::Efg => {
            if d.is_negative() {
                // w - arctan w <= w^3 / 3 for all w >= 0.
                Some(ratio(&Int::one(), &(Int::from(3) * cube(h))))
            } else {
                // artanh w - w <= w^3 / (3 (1 - w^2)) for 0 <= w < 1; here
                // h^2 - d = 4pq > 0 keeps w = sqrt(d)/h inside the disk.
                let m = h * h - d;
                if h.is_positive() && m.is_positive() {
                    Some(ratio(&Int::one(), &(Int::from(3) * h * m)))
                } else {
                    None
                }
            }
        }
    }
}

fn tolerance_to_rat(tol: &Real) -> Result<Rat> {
    if !tol.is_finite() || tol.signum() <= 0 {
        return Err(Error::InvalidInput(String::from(
            "tolerance must be positive and finite",
        )));
    }
    let t = tol.to_f64();
    if !(t > 0.0) {
        return Err(Error::InvalidInput(String::from(
            "tolerance underflows the supported range",
        )));
    }
    // Shrink slightly so the rational budget never exceeds the caller's
    // real tolerance after conversion.
    Ok(Rat::from_float(t).expect("finite float") * rat(63, 64))
}

/// Round the rational tail mass into a `Real` bound, with a nudge covering
/// the floating accumulation error of the summed terms.
fn finish_bound(err: &Rat, value: &Real, prec: usize) -> Real {
    let base = Real::from_rat(err, prec);
    let slack = value.abs() * Real::pow2(-(prec as i32) + 8, prec);
    (base + slack).rounded(prec)
}

/// A frontier entry: an unexpanded subtree priced by its bound. Ordered so
/// the heap pops the largest bound first, oldest entry on ties, which makes
/// the walk deterministic.
struct FrontierItem<N> {
    bound: Rat,
    seq: u64,
    depth: u32,
    node: N,
}

impl<N> PartialEq for FrontierItem<N> {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.seq == other.seq
    }
}

impl<N> Eq for FrontierItem<N> {}

impl<N> PartialOrd for FrontierItem<N> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<N> Ord for FrontierItem<N> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bound
            .cmp(&other.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn adaptive_sum<N: SumNode>(
    root: N,
    d: &Int,
    kind: SumKind,
    tol: &Real,
    prec: usize,
    budget: u64,
    method: SumMethod,
) -> Result<SeriesResult> {
    let tol_rat = tolerance_to_rat(tol)?;
    let (p0, h0, q0) = root.labels();
    if &h0 * &h0 - Int::from(4) * &p0 * &q0 != *d {
        return Err(Error::InvalidInput(format!(
            "root ({p0}, {h0}, {q0}) does not have discriminant {d}"
        )));
    }
    if !p0.is_positive() || !q0.is_positive() {
        return Err(Error::InvalidInput(String::from(
            "root must have positive side regions",
        )));
    }
    if kind == SumKind::Efg && !h0.is_positive() {
        return Err(Error::InvalidInput(String::from(
            "edge-label sums need a positive root label",
        )));
    }

    let wp = prec + 32;
    let mut value = Real::zero(wp);
    // Exact sum of the frontier's dyadic bounds; the walk stops once it
    // fits under the tolerance, so whatever remains is the error bound.
    let mut ledger = Rat::zero();
    let mut heap: std::collections::BinaryHeap<FrontierItem<N>> = std::collections::BinaryHeap::new();
    let mut pending: Vec<(N, u32)> = vec![(root, 0)];
    let mut seq: u64 = 0;
    let mut terms: u64 = 0;
    let mut max_depth: u32 = 0;
    let mut nodes: u64 = 0;

    loop {
        // Expand everything queued for unconditional expansion: the root,
        // nodes whose bound was the frontier maximum, and nodes that have
        // no bound yet (label still against the climb, or too close to the
        // branch boundary).
        while let Some((node, depth)) = pending.pop() {
            nodes += 1;
            if nodes > budget {
                return Err(Error::NonConvergence(format!(
                    "adaptive walk exceeded the budget of {budget} expansions; \
                     loosen the tolerance or raise the budget"
                )));
            }
            let (p, h, q) = node.labels();
            if !p.is_positive() || !q.is_positive() {
                return Err(Error::InvalidInput(format!(
                    "walk left the positive cone at ({p}, {h}, {q})"
                )));
            }
            let s = &p + &q + &h;
            if !s.is_positive() {
                return Err(Error::InvalidInput(format!(
                    "walk left the positive cone at ({p}, {h}, {q})"
                )));
            }
            let term = match kind {
                SumKind::Rst => ratio(&Int::one(), &(&p * &s * &q)),
                SumKind::Efg => {
                    let f = Int::from(2) * &p + &h;
                    let g = Int::from(2) * &q + &h;
                    debug_assert!(h.is_positive());
                    ratio(&Int::one(), &(&h * f * g))
                }
            };
            value += Real::from_rat(&term, wp);
            terms += 1;
            max_depth = max_depth.max(depth);

            let (left, right) = node.split();
            for child in [left, right] {
                let (cp, ch, cq) = child.labels();
                match subtree_bound(kind, d, &cp, &ch, &cq) {
                    Some(bound) => {
                        let bound = dyadic_up(&bound);
                        ledger = ledger + &bound;
                        heap.push(FrontierItem {
                            bound,
                            seq,
                            depth: depth + 1,
                            node: child,
                        });
                        seq += 1;
                    }
                    None => pending.push((child, depth + 1)),
                }
            }
        }
        if ledger <= tol_rat {
            break;
        }
        let top = heap.pop().expect("positive ledger implies a nonempty frontier");
        ledger = ledger - &top.bound;
        pending.push((top.node, top.depth));
    }

    let error_bound = finish_bound(&ledger, &value, prec);
    Ok(SeriesResult {
        value: value.rounded(prec),
        error_bound,
        bound_is_rigorous: true,
        terms,
        depth: max_depth,
        method,
    })
}

/// Sum `1/(r s t)` over all vertices of the half-tree ahead of `root`,
/// stopping once the dropped mass provably fits under `tol`. The root must
/// have discriminant `d` and positive side regions; its label may point
/// against the climb, in which case the walk expands until the subtrees
/// climb on their own.
pub fn sum_rst(
    root: &OrientedEdge,
    d: &Int,
    tol: &Real,
    prec: usize,
    budget: u64,
) -> Result<SeriesResult> {
    if root.discriminant() != *d {
        return Err(Error::InvalidInput(format!(
            "root has discriminant {}, not {d}",
            root.discriminant()
        )));
    }
    adaptive_sum(
        root.clone(),
        d,
        SumKind::Rst,
        tol,
        prec,
        budget,
        SumMethod::SubtreeClosedForm,
    )
}

/// Sum `1/(h_in f g)` over all vertices of the half-tree ahead of `root`,
/// with the same tail contract as [`sum_rst`]. The root label must be
/// positive; below it every edge of a climbing subtree keeps a positive
/// label, so the per-vertex product stays positive.
pub fn sum_efg(
    root: &OrientedEdge,
    d: &Int,
    tol: &Real,
    prec: usize,
    budget: u64,
) -> Result<SeriesResult> {
    if root.discriminant() != *d {
        return Err(Error::InvalidInput(format!(
            "root has discriminant {}, not {d}",
            root.discriminant()
        )));
    }
    adaptive_sum(
        root.clone(),
        d,
        SumKind::Efg,
        tol,
        prec,
        budget,
        SumMethod::SubtreeClosedForm,
    )
}

/// Sum a cone of vector pairs directly, pricing regions with the diagonal
/// form `alpha m^2 + beta n^2`. The walk starts at the pair
/// `((1,0), (1,1))` and recurses by mediants, so it covers the `a >= b`
/// half of the first quadrant. `beta` may be negative as long as
/// `alpha + beta >= 1`, which keeps every region in the cone positive.
pub fn cone_sum_direct(
    alpha: i64,
    beta: i64,
    kind: SumKind,
    tol: &Real,
    prec: usize,
    budget: u64,
) -> Result<SeriesResult> {
    if alpha < 1 || beta == 0 || alpha + beta < 1 {
        return Err(Error::InvalidInput(format!(
            "cone form ({alpha}, {beta}) must have alpha >= 1 and alpha + beta >= 1"
        )));
    }
    let d = Int::from(-4) * Int::from(alpha) * Int::from(beta);
    let root = ConeNode {
        x: (Int::one(), Int::zero()),
        y: (Int::one(), Int::one()),
        alpha: Int::from(alpha),
        beta: Int::from(beta),
    };
    adaptive_sum(root, &d, kind, tol, prec, budget, SumMethod::Direct)
}

/// Direct route to the quarter-circle constant: the sum of
/// `1/(|x|^2 |y|^2 |x+y|^2)` over nonnegative unimodular pairs equals the
/// root pair's `1/2` plus two mirror-image copies of the half cone.
pub fn hurwitz_quarter_direct(tol: &Real, prec: usize, budget: u64) -> Result<SeriesResult> {
    let half_tol = tol * Real::from_f64(0.5, prec);
    let cone = cone_sum_direct(1, 1, SumKind::Rst, &half_tol, prec, budget)?;
    let two = Real::from_i64(2, prec);
    Ok(SeriesResult {
        value: (Real::from_f64(0.5, prec + 32) + &two * &cone.value).rounded(prec),
        error_bound: (&two * &cone.error_bound).rounded(prec),
        bound_is_rigorous: true,
        terms: 2 * cone.terms + 1,
        depth: cone.depth + 1,
        method: SumMethod::Direct,
    })
}

/// Direct route to the coprime double sum `sum 1/(a^2 c^2 (a+c)^2)`: a flat
/// loop over coprime pairs up to `m`. The dropped part is below
/// `11/(10 m^3)` by comparison with `zeta(2) sum_{a>m} a^{-4}`.
pub fn mordell_tornheim_direct(m: u64, prec: usize) -> Result<SeriesResult> {
    if m < 2 {
        return Err(Error::InvalidInput(String::from("cutoff must be at least 2")));
    }
    let wp = prec + 32;
    let mut value = Real::zero(wp);
    let mut terms = 0u64;
    for a in 1..=m as i64 {
        for c in 1..=m as i64 {
            if a.gcd(&c) != 1 {
                continue;
            }
            let prod = (a * c * (a + c)) as i128;
            value += Real::from_rat(&ratio(&Int::one(), &Int::from(prod * prod)), wp);
            terms += 1;
        }
    }
    let tail = ratio(&Int::from(11), &(Int::from(10) * cube(&Int::from(m))));
    let error_bound = finish_bound(&tail, &value, prec);
    Ok(SeriesResult {
        value: value.rounded(prec),
        error_bound,
        bound_is_rigorous: true,
        terms,
        depth: m as u32,
        method: SumMethod::Direct,
    })
}

// --- named catalog ---------------------------------------------------------

fn parse_args(raw: &str) -> Result<Vec<(i64, i64)>> {
    let mut out = Vec::new();
    for tok in raw.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            return Err(Error::InvalidInput(format!("empty argument in `{raw}`")));
        }
        let parsed = if let Some((nu, de)) = tok.split_once('/') {
            let nu = nu.trim().parse::<i64>();
            let de = de.trim().parse::<i64>();
            match (nu, de) {
                (Ok(n), Ok(d)) => Some((n, d)),
                _ => None,
            }
        } else {
            tok.parse::<i64>().ok().map(|n| (n, 1))
        };
        match parsed {
            Some(p) => out.push(p),
            None => {
                return Err(Error::InvalidInput(format!(
                    "cannot parse series argument `{tok}`"
                )))
            }
        }
    }
    Ok(out)
}

fn parse_series_id(id: &str) -> Result<(&str, Vec<(i64, i64)>)> {
    let id = id.trim();
    match id.split_once('(') {
        None => Ok((id, Vec::new())),
        Some((name, rest)) => match rest.strip_suffix(')') {
            Some(raw) => Ok((name.trim(), parse_args(raw)?)),
            None => Err(Error::InvalidInput(format!(
                "unbalanced parentheses in series id `{id}`"
            ))),
        },
    }
}

fn scaled(mut r: SeriesResult, scale: &Real, prec: usize) -> SeriesResult {
    r.value = (&r.value * scale).rounded(prec);
    r.error_bound = (&r.error_bound * scale).rounded(prec);
    r
}

fn mu_parameter(args: &[(i64, i64)]) -> Result<(i64, i64)> {
    let (u, v) = match args {
        [] => (1, 2),
        [uv] => *uv,
        _ => {
            return Err(Error::InvalidInput(String::from(
                "this series takes a single rational parameter",
            )))
        }
    };
    if u < 1 || v < 1 {
        return Err(Error::InvalidInput(format!(
            "parameter {u}/{v} must be a positive rational"
        )));
    }
    if u > 1_000_000 || v > 1_000_000 {
        return Err(Error::InvalidInput(String::from(
            "parameter numerator and denominator must stay within 10^6",
        )));
    }
    let g = u.gcd(&v);
    Ok((u / g, v / g))
}

fn mu_root(u: i64, v: i64) -> (OrientedEdge, Int) {
    let vv = v * v;
    let root = OrientedEdge::from_i64(vv, 2 * vv, u * u + vv);
    let d = Int::from(-4) * Int::from(u * u) * Int::from(vv);
    (root, d)
}

fn harmonic_log_route(n_subtrees: i64, tol: &Real, prec: usize) -> Result<SeriesResult> {
    if n_subtrees < 1 {
        return Err(Error::InvalidInput(String::from(
            "the subtree count must be at least 1",
        )));
    }
    let _ = tolerance_to_rat(tol)?;
    let wp = prec + 32;
    // Each n contributes the closed form of one hanging subtree,
    // (2n+1)/(n(n+1)) - 2 log((n+1)/n); the logs telescope, so the partial
    // collapses to 2 H_N + 1/(N+1) - 1 - 2 log(N+1).
    let mut harmonic = Real::zero(wp);
    for n in 1..=n_subtrees {
        harmonic += Real::from_i64(n, wp).recip();
    }
    let np1 = Real::from_i64(n_subtrees + 1, wp);
    let value = Real::from_i64(2, wp) * harmonic + np1.recip()
        - Real::from_i64(1, wp)
        - Real::from_i64(2, wp) * np1.ln();
    // The dropped subtrees beyond N add less than 1/(6N^2) + 1/(6N^3):
    // each bracket for n > N lies below 1/(3n^3) + 1/(2n^4).
    let nn = Int::from(n_subtrees);
    let tail = ratio(&Int::one(), &(Int::from(6) * &nn * &nn))
        + ratio(&Int::one(), &(Int::from(6) * cube(&nn)));
    let error_bound = finish_bound(&tail, &value, prec);
    Ok(SeriesResult {
        value: value.rounded(prec),
        error_bound,
        bound_is_rigorous: true,
        terms: n_subtrees as u64,
        depth: 0,
        method: SumMethod::SubtreeClosedForm,
    })
}

fn farey_second_moment(cutoff: i64, prec: usize) -> Result<SeriesResult> {
    if cutoff < 8 {
        return Err(Error::InvalidInput(String::from(
            "the denominator cutoff must be at least 8",
        )));
    }
    let wp = prec + 32;
    let half_cutoff = cutoff / 2;
    let mut full = Real::zero(wp);
    let mut half = Real::zero(wp);
    let mut terms = 0u64;
    let root = SternBrocotConstraint::UnitFarey.root_pair();
    let mut stack = vec![root];
    while let Some(pair) = stack.pop() {
        let ((a, b), (c, d)) = pair;
        if b + d > cutoff {
            continue;
        }
        // Pairs with a = 0 sit on the spine next to the zero region; their
        // vertex product vanishes, so they carry no term.
        if a >= 1 {
            let r = (a * b) as i128;
            let t = (c * d) as i128;
            let s = ((a + c) * (b + d)) as i128;
            let prod = Int::from(r) * Int::from(s) * Int::from(t);
            let term = ratio(&Int::from(r + s + t), &(&prod * &prod));
            let real_term = Real::from_rat(&term, wp);
            if b + d <= half_cutoff {
                half += &real_term;
            }
            full += real_term;
            terms += 1;
        }
        let (left, right) = mediant_children(pair);
        stack.push(right);
        stack.push(left);
    }
    let error_bound = (&full - &half).abs().rounded(prec);
    Ok(SeriesResult {
        value: full.rounded(prec),
        error_bound,
        bound_is_rigorous: false,
        terms,
        depth: cutoff as u32,
        method: SumMethod::Direct,
    })
}

/// Shared flat loop for the second-moment coefficient series: enumerate
/// coprime `(a, c)` up to a cutoff sized from `tol`, recover the unique
/// `(b, d)` with `ad - bc = 1`, `0 <= b < a`, `1 <= d <= c`, and sum
/// `weight(a,b,c,d) / (a^2 c^2 (a+c)^2)`. Both weight choices stay in
/// `[0, 3]`, so the dropped part is below `33/(10 m^3)`.
fn coefficient_route<F>(tol: &Real, prec: usize, weight: F) -> Result<SeriesResult>
where
    F: Fn(i64, i64, i64, i64) -> Rat,
{
    let _ = tolerance_to_rat(tol)?;
    let t = tol.to_f64();
    let m = ((6.6 / t).cbrt().ceil() as i64).max(40);
    if m > 800 {
        return Err(Error::NonConvergence(format!(
            "tolerance {t:e} needs a coprime box past the supported cutoff"
        )));
    }
    let wp = prec + 32;
    let mut value = Real::zero(wp);
    let mut terms = 0u64;
    for a in 1..=m {
        for c in 1..=m {
            let gcd = a.gcd(&c);
            if gcd != 1 {
                continue;
            }
            let (b, d) = unique_codeterminant(a, c);
            let base = Int::from((a * c * (a + c)) as i128);
            let term = weight(a, b, c, d) * ratio(&Int::one(), &(&base * &base));
            value += Real::from_rat(&term, wp);
            terms += 1;
        }
    }
    let tail = ratio(&Int::from(33), &(Int::from(10) * cube(&Int::from(m))));
    let error_bound = finish_bound(&tail, &value, prec);
    Ok(SeriesResult {
        value: value.rounded(prec),
        error_bound,
        bound_is_rigorous: true,
        terms,
        depth: m as u32,
        method: SumMethod::Direct,
    })
}

/// For coprime `a, c >= 1`, the unique `(b, d)` with `ad - bc = 1`,
/// `0 <= b < a` (or `b = 0` when `a = 1`), `1 <= d <= c`.
fn unique_codeterminant(a: i64, c: i64) -> (i64, i64) {
    let ext = a.extended_gcd(&c);
    debug_assert_eq!(ext.gcd, 1);
    // a*x + c*y = 1, so (b, d) = (-y mod a, (1 + b c) / a).
    let b = (-ext.y).rem_euclid(a);
    let d = (1 + b * c) / a;
    debug_assert_eq!(a * d - b * c, 1);
    debug_assert!((0..a.max(1)).contains(&b) && (1..=c).contains(&d));
    (b, d)
}

/// Evaluate a named series to within `tol`. Ids may carry arguments in
/// parentheses; integers or rationals `u/v`, comma separated.
///
/// Catalog (default arguments in brackets):
/// - `hurwitz_quarter`: quarter-circle sum, value `pi/4`
/// - `full_topograph_neg[(a,b,c)]`: both halves of the `[a,b,c]` tree
///   (`[1,0,1]`), value `4 pi / |D|^{3/2}`
/// - `mordell_tornheim`: coprime double sum, value `1/3`
/// - `mu_family[(u/v)]`: squeezed quarter-circle family (`1/2`), value
///   `(2 arctan(mu)/mu - 2/(1+mu^2)) / (4 mu^2)`
/// - `mu2_coefficient`: second-moment coefficient, value `2/5`
/// - `mu_i_half`: shear form `[4,8,3]` region sum, value `(4/3 - ln 3)/32`
/// - `tangent_quarter`: edge-label dual of the quarter sum, value `1 - pi/4`
/// - `tangent_mu_family[(u/v)]`: dual family (`1/2`), value `mu - arctan mu`
/// - `tangent_mu2_coefficient`: dual second moment, value `1/5`
/// - `tangent_mu_i_half`: dual shear sum, value `(ln 3 - 1)/16`
/// - `hata[(N)]`: harmonic-log subtree route (`10000`), value `2 gamma - 1`
/// - `hata_second[(B)]`: Farey second-moment route (`300`), value
///   `7 - 12 gamma`; empirical tail, not rigorous
pub fn named_series(id: &str, tol: &Real, prec: usize, budget: u64) -> Result<SeriesResult> {
    let (name, args) = parse_series_id(id)?;
    let no_args = |args: &[(i64, i64)]| -> Result<()> {
        if args.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "series `{name}` takes no arguments"
            )))
        }
    };
    match name {
        "hurwitz_quarter" => {
            no_args(&args)?;
            sum_rst(
                &OrientedEdge::from_i64(1, 0, 1),
                &Int::from(-4),
                tol,
                prec,
                budget,
            )
        }
        "full_topograph_neg" => {
            let (a, b, c) = match args.as_slice() {
                [] => (1, 0, 1),
                [(a, 1), (b, 1), (c, 1)] => (*a, *b, *c),
                _ => {
                    return Err(Error::InvalidInput(String::from(
                        "expected three integer coefficients a,b,c",
                    )))
                }
            };
            let d = Int::from(b * b - 4 * a * c);
            if !d.is_negative() || a <= 0 {
                return Err(Error::InvalidInput(format!(
                    "form [{a},{b},{c}] is not positive definite"
                )));
            }
            let b = b.abs();
            let half_tol = tol * Real::from_f64(0.5, prec);
            let fwd = sum_rst(&OrientedEdge::from_i64(a, b, c), &d, &half_tol, prec, budget)?;
            let bwd = sum_rst(&OrientedEdge::from_i64(c, -b, a), &d, &half_tol, prec, budget)?;
            Ok(SeriesResult {
                value: (&fwd.value + &bwd.value).rounded(prec),
                error_bound: (&fwd.error_bound + &bwd.error_bound).rounded(prec),
                bound_is_rigorous: true,
                terms: fwd.terms + bwd.terms,
                depth: fwd.depth.max(bwd.depth),
                method: SumMethod::SubtreeClosedForm,
            })
        }
        "mordell_tornheim" => {
            no_args(&args)?;
            sum_rst(
                &OrientedEdge::from_i64(1, 2, 1),
                &Int::zero(),
                tol,
                prec,
                budget,
            )
        }
        "mu_family" => {
            let (u, v) = mu_parameter(&args)?;
            let (root, d) = mu_root(u, v);
            let scale = Real::from_int(&cube(&Int::from(v * v)), prec);
            let inner_tol = tol / &scale;
            let r = sum_rst(&root, &d, &inner_tol, prec, budget)?;
            Ok(scaled(r, &scale, prec))
        }
        "mu_i_half" => {
            no_args(&args)?;
            sum_rst(
                &OrientedEdge::from_i64(4, 8, 3),
                &Int::from(16),
                tol,
                prec,
                budget,
            )
        }
        "mu2_coefficient" => {
            no_args(&args)?;
            coefficient_route(tol, prec, |a, b, c, d| {
                let aa = Int::from(a);
                let cc = Int::from(c);
                let ss = Int::from(a + c);
                ratio(&Int::from(b * b), &(&aa * &aa))
                    + ratio(&Int::from(d * d), &(&cc * &cc))
                    + ratio(&Int::from((b + d) * (b + d)), &(&ss * &ss))
            })
        }
        "tangent_quarter" => {
            no_args(&args)?;
            let scale = Real::from_i64(8, prec);
            let inner_tol = tol / &scale;
            let r = sum_efg(
                &OrientedEdge::from_i64(1, 2, 2),
                &Int::from(-4),
                &inner_tol,
                prec,
                budget,
            )?;
            Ok(scaled(r, &scale, prec))
        }
        "tangent_mu_family" => {
            let (u, v) = mu_parameter(&args)?;
            let (root, d) = mu_root(u, v);
            let scale = Real::from_int(&(Int::from(8) * cube(&Int::from(u * v))), prec);
            let inner_tol = tol / &scale;
            let r = sum_efg(&root, &d, &inner_tol, prec, budget)?;
            Ok(scaled(r, &scale, prec))
        }
        "tangent_mu2_coefficient" => {
            no_args(&args)?;
            coefficient_route(tol, prec, |a, b, c, d| {
                let s = a + c;
                let bd = b + d;
                ratio(&Int::from(b * d), &Int::from(a * c))
                    + ratio(&Int::from(b * bd), &Int::from(a * s))
                    + ratio(&Int::from(d * bd), &Int::from(c * s))
            })
        }
        "tangent_mu_i_half" => {
            no_args(&args)?;
            let scale = Real::from_i64(8, prec);
            let inner_tol = tol / &scale;
            let r = sum_efg(
                &OrientedEdge::from_i64(4, 8, 3),
                &Int::from(16),
                &inner_tol,
                prec,
                budget,
            )?;
            Ok(scaled(r, &scale, prec))
        }
        "hata" => {
            let n = match args.as_slice() {
                [] => 10_000,
                [(n, 1)] => *n,
                _ => {
                    return Err(Error::InvalidInput(String::from(
                        "expected a single integer subtree count",
                    )))
                }
            };
            if n > 100_000_000 {
                return Err(Error::InvalidInput(String::from(
                    "subtree count past 10^8 is not supported",
                )));
            }
            harmonic_log_route(n, tol, prec)
        }
        "hata_second" => {
            let b = match args.as_slice() {
                [] => 300,
                [(b, 1)] => *b,
                _ => {
                    return Err(Error::InvalidInput(String::from(
                        "expected a single integer denominator cutoff",
                    )))
                }
            };
            if b > 20_000 {
                return Err(Error::InvalidInput(String::from(
                    "denominator cutoff past 20000 is not supported",
                )));
            }
            farey_second_moment(b, prec)
        }
        _ => Err(Error::UnknownSeries(String::from(name))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{closed_efg, closed_rst, ClosedFormInput};
    use crate::real::DEFAULT_PREC;
    use crate::topograph::DEFAULT_NODE_BUDGET;

    const P: usize = DEFAULT_PREC;
    const B: u64 = DEFAULT_NODE_BUDGET;

    fn tol(e: i32) -> Real {
        Real::from_f64(10f64.powi(e), P)
    }

    fn assert_within(r: &SeriesResult, target: &Real, cap: f64) {
        let dev = (&r.value - target).abs().to_f64();
        let bound = r.error_bound.to_f64();
        assert!(
            dev <= bound + 1e-30,
            "deviation {dev:e} exceeds reported bound {bound:e}"
        );
        assert!(dev <= cap, "deviation {dev:e} exceeds cap {cap:e}");
    }

    #[test]
    fn sum_rst_matches_closed_forms() {
        for (p, h, q) in [(1i64, 2, 2), (2, 3, 1), (1, 4, 2), (3, 5, 2)] {
            let root = OrientedEdge::from_i64(p, h, q);
            let d = root.discriminant();
            let r = sum_rst(&root, &d, &tol(-9), P, B).unwrap();
            let closed = closed_rst(&ClosedFormInput::from_edge(&root, P)).unwrap();
            assert_within(&r, &closed, 2e-9);
            assert!(r.bound_is_rigorous);
            assert_eq!(r.method, SumMethod::SubtreeClosedForm);
        }
    }

    #[test]
    fn sum_rst_reaches_quarter_pi_from_the_square_form() {
        let r = sum_rst(
            &OrientedEdge::from_i64(1, 0, 1),
            &Int::from(-4),
            &tol(-8),
            P,
            B,
        )
        .unwrap();
        let target = Real::pi(P) * Real::from_f64(0.25, P);
        assert_within(&r, &target, 1e-8);
        assert!(r.terms > 1000);
        assert!(r.depth > 20);
    }

    #[test]
    fn sum_rst_zero_disc_route_converges_to_one_third() {
        let r = sum_rst(
            &OrientedEdge::from_i64(1, 2, 1),
            &Int::zero(),
            &tol(-7),
            P,
            B,
        )
        .unwrap();
        let target = Real::from_i64(3, P).recip();
        assert_within(&r, &target, 1e-7);
    }

    #[test]
    fn sum_rst_rejects_bad_roots() {
        let e = OrientedEdge::from_i64(1, 2, 2);
        assert!(matches!(
            sum_rst(&e, &Int::from(5), &tol(-6), P, B),
            Err(Error::InvalidInput(_))
        ));
        let neg = OrientedEdge::from_i64(-1, 2, 2);
        assert!(matches!(
            sum_rst(&neg, &neg.discriminant(), &tol(-6), P, B),
            Err(Error::InvalidInput(_))
        ));
        let falling = OrientedEdge::from_i64(1, -2, 1);
        assert!(matches!(
            sum_rst(&falling, &Int::zero(), &tol(-6), P, B),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            sum_rst(&e, &e.discriminant(), &Real::zero(P), P, B),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn sum_rst_budget_exhaustion_is_nonconvergence() {
        let r = sum_rst(
            &OrientedEdge::from_i64(1, 0, 1),
            &Int::from(-4),
            &tol(-8),
            P,
            50,
        );
        assert!(matches!(r, Err(Error::NonConvergence(_))));
    }

    #[test]
    fn sum_efg_matches_closed_forms() {
        let cases = [
            (1i64, 2, 2, -4i64, 2i64),
            (3, 10, 3, 64, 10),
            (1, 4, 2, 8, 4),
        ];
        for (p, h, q, d, h0) in cases {
            let root = OrientedEdge::from_i64(p, h, q);
            let r = sum_efg(&root, &Int::from(d), &tol(-9), P, B).unwrap();
            let closed = closed_efg(&Int::from(d), &Int::from(h0), P).unwrap();
            assert_within(&r, &closed, 2e-9);
        }
        let r = sum_efg(
            &OrientedEdge::from_i64(1, 2, 1),
            &Int::zero(),
            &tol(-9),
            P,
            B,
        )
        .unwrap();
        let target = Real::from_i64(24, P).recip();
        assert_within(&r, &target, 1e-9);
    }

    #[test]
    fn sum_efg_rejects_nonpositive_root_labels() {
        let e = OrientedEdge::from_i64(2, -2, 1);
        assert!(matches!(
            sum_efg(&e, &e.discriminant(), &tol(-6), P, B),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn cone_walk_agrees_with_label_walk() {
        let t = tol(-9);
        let pairs = [
            (1i64, 1i64, SumKind::Rst, (1i64, 2i64, 2i64)),
            (1, 1, SumKind::Efg, (1, 2, 2)),
            (4, -1, SumKind::Rst, (4, 8, 3)),
            (4, -1, SumKind::Efg, (4, 8, 3)),
        ];
        for (alpha, beta, kind, (p, h, q)) in pairs {
            let direct = cone_sum_direct(alpha, beta, kind, &t, P, B).unwrap();
            let root = OrientedEdge::from_i64(p, h, q);
            let d = root.discriminant();
            let by_labels = match kind {
                SumKind::Rst => sum_rst(&root, &d, &t, P, B).unwrap(),
                SumKind::Efg => sum_efg(&root, &d, &t, P, B).unwrap(),
            };
            let dev = (&direct.value - &by_labels.value).abs().to_f64();
            let allowance = direct.error_bound.to_f64() + by_labels.error_bound.to_f64();
            assert!(dev <= allowance + 1e-30);
            assert_eq!(direct.method, SumMethod::Direct);
        }
    }

    #[test]
    fn quarter_circle_direct_route_hits_pi_over_four() {
        let r = hurwitz_quarter_direct(&tol(-8), P, B).unwrap();
        let target = Real::pi(P) * Real::from_f64(0.25, P);
        assert_within(&r, &target, 1e-8);
    }

    #[test]
    fn coprime_double_sum_direct_route_hits_one_third() {
        let r = mordell_tornheim_direct(200, P).unwrap();
        let target = Real::from_i64(3, P).recip();
        assert_within(&r, &target, 2e-7);
    }

    #[test]
    fn named_series_quarter_family() {
        let pi = Real::pi(P);
        let quarter = &pi * &Real::from_f64(0.25, P);

        let r = named_series("hurwitz_quarter", &tol(-8), P, B).unwrap();
        assert_within(&r, &quarter, 1e-8);

        let r = named_series("full_topograph_neg", &tol(-8), P, B).unwrap();
        let target = Real::from_i64(4, P) * &pi / Real::from_i64(8, P);
        assert_within(&r, &target, 1e-8);

        let r = named_series("full_topograph_neg(1,1,1)", &tol(-8), P, B).unwrap();
        let three_to_3_2 = Real::from_i64(3, P) * Real::from_i64(3, P).sqrt();
        let target = Real::from_i64(4, P) * &pi / three_to_3_2;
        assert_within(&r, &target, 1e-8);

        let r = named_series("tangent_quarter", &tol(-7), P, B).unwrap();
        let target = Real::from_i64(1, P) - quarter;
        assert_within(&r, &target, 1e-7);
    }

    #[test]
    fn named_series_mu_family_values() {
        let t = tol(-7);
        let mu = Real::from_f64(0.5, P);

        let r = named_series("mu_family", &t, P, B).unwrap();
        let target = (Real::from_i64(2, P) * mu.atan() / &mu
            - Real::from_i64(2, P) / (Real::from_i64(1, P) + &mu * &mu))
            / (Real::from_i64(4, P) * &mu * &mu);
        assert_within(&r, &target, 1e-7);

        let r = named_series("tangent_mu_family(1/2)", &t, P, B).unwrap();
        let target = &mu - &mu.atan();
        assert_within(&r, &target, 1e-7);

        let r = named_series("mu_i_half", &t, P, B).unwrap();
        let ln3 = Real::from_i64(3, P).ln();
        let target = (Real::from_i64(4, P) / Real::from_i64(3, P) - &ln3)
            / Real::from_i64(32, P);
        assert_within(&r, &target, 1e-7);

        let r = named_series("tangent_mu_i_half", &t, P, B).unwrap();
        let target = (&ln3 - &Real::from_i64(1, P)) / Real::from_i64(16, P);
        assert_within(&r, &target, 1e-7);
    }

    #[test]
    fn named_series_coefficient_routes() {
        let t = tol(-4);
        let r = named_series("mu2_coefficient", &t, P, B).unwrap();
        let target = Real::from_f64(0.4, P);
        assert_within(&r, &target, 1e-4);

        let r = named_series("tangent_mu2_coefficient", &t, P, B).unwrap();
        let target = Real::from_f64(0.2, P);
        assert_within(&r, &target, 1e-4);
    }

    #[test]
    fn named_series_zero_disc_and_harmonic_routes() {
        let r = named_series("mordell_tornheim", &tol(-7), P, B).unwrap();
        let target = Real::from_i64(3, P).recip();
        assert_within(&r, &target, 1e-7);
        assert!(r.bound_is_rigorous);

        let gamma = Real::euler_gamma(P).unwrap();
        let r = named_series("hata(1500)", &tol(-6), P, B).unwrap();
        let target = Real::from_i64(2, P) * &gamma - Real::from_i64(1, P);
        assert_within(&r, &target, 8e-8);

        let r = named_series("hata_second(100)", &tol(-4), P, B).unwrap();
        let target = Real::from_i64(7, P) - Real::from_i64(12, P) * &gamma;
        assert!(!r.bound_is_rigorous);
        let dev = (&r.value - &target).abs().to_f64();
        assert!(dev < 1e-6, "second-moment route off by {dev:e}");
    }

    #[test]
    fn named_series_argument_errors() {
        assert!(matches!(
            named_series("no_such_series", &tol(-6), P, B),
            Err(Error::UnknownSeries(_))
        ));
        assert!(matches!(
            named_series("mu_family(0/3)", &tol(-6), P, B),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            named_series("mu_family(1/2", &tol(-6), P, B),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            named_series("hata(x)", &tol(-6), P, B),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            named_series("hurwitz_quarter(3)", &tol(-6), P, B),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            named_series("full_topograph_neg(1,3,1)", &tol(-6), P, B),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn stern_brocot_constraints_admit_their_walks() {
        for c in [
            SternBrocotConstraint::FirstQuadrant,
            SternBrocotConstraint::HalfCone,
            SternBrocotConstraint::UnitFarey,
        ] {
            let root = c.root_pair();
            let ((a, b), (cc, d)) = root;
            assert!(c.admits(a, b, cc, d));
            let mut frontier = vec![root];
            for _ in 0..6 {
                let mut next = Vec::new();
                for pair in frontier {
                    let (l, r) = mediant_children(pair);
                    for ((a, b), (cc, d)) in [l, r] {
                        assert!(c.admits(a, b, cc, d));
                        next.push(((a, b), (cc, d)));
                    }
                }
                frontier = next;
            }
        }
        assert!(!SternBrocotConstraint::HalfCone.admits(1, 2, 1, 1));
        assert!(!SternBrocotConstraint::UnitFarey.admits(1, 2, 3, 4));
    }

    #[test]
    fn unique_codeterminant_agrees_with_brute_force() {
        for a in 1i64..=25 {
            for c in 1i64..=25 {
                if a.gcd(&c) != 1 {
                    continue;
                }
                let (b, d) = unique_codeterminant(a, c);
                let mut count = 0;
                for bb in 0..a.max(1) {
                    for dd in 1..=c {
                        if a * dd - bb * c == 1 {
                            assert_eq!((bb, dd), (b, d));
                            count += 1;
                        }
                    }
                }
                assert_eq!(count, 1, "a={a} c={c}");
            }
        }
    }
}

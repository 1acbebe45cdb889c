//! Integer binary quadratic forms and the local combinatorics of their
//! topographs.
//!
//! Key types: [`QuadraticForm`] `a m^2 + b mn + c n^2`, [`OrientedEdge`]
//! `(p, h, q)` (left region, edge label, right region), and [`VertexStar`],
//! the six numbers attached to a trivalent vertex: region labels `r, s, t`
//! and outward edge labels `e, f, g`. The exact vertex identities that drive
//! every telescoped sum live here as [`check_algebraic`].

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::num::{ratio, Int, Rat};

/// An integer binary quadratic form `a m^2 + b mn + c n^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticForm {
    pub a: Int,
    pub b: Int,
    pub c: Int,
}

impl QuadraticForm {
    pub fn new(a: Int, b: Int, c: Int) -> Self {
        QuadraticForm { a, b, c }
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Self {
        QuadraticForm::new(Int::from(a), Int::from(b), Int::from(c))
    }

    /// `b^2 - 4ac`.
    pub fn discriminant(&self) -> Int {
        &self.b * &self.b - Int::from(4) * &self.a * &self.c
    }

    /// Value at the lattice vector `(m, n)`.
    pub fn eval(&self, m: &Int, n: &Int) -> Int {
        &self.a * m * m + &self.b * m * n + &self.c * n * n
    }

    /// gcd of the coefficients; 1 for primitive forms.
    pub fn content(&self) -> Int {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// The edge between the regions of `(1,0)` and `(0,1)`, labeled `b`.
    /// Its sides are `a` and `c` and its ahead region is `a + b + c`.
    pub fn root_edge(&self) -> OrientedEdge {
        OrientedEdge::new(self.a.clone(), self.b.clone(), self.c.clone())
    }
}

/// An oriented edge of a topograph: left region `p`, label `h`, right
/// region `q`, with invariant discriminant `h^2 - 4pq`. The vertex ahead
/// of the edge carries the third region `p + q + h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrientedEdge {
    pub p: Int,
    pub h: Int,
    pub q: Int,
}

impl OrientedEdge {
    pub fn new(p: Int, h: Int, q: Int) -> Self {
        OrientedEdge { p, h, q }
    }

    pub fn from_i64(p: i64, h: i64, q: i64) -> Self {
        OrientedEdge::new(Int::from(p), Int::from(h), Int::from(q))
    }

    /// `h^2 - 4pq`, shared by every edge of the containing topograph.
    pub fn discriminant(&self) -> Int {
        &self.h * &self.h - Int::from(4) * &self.p * &self.q
    }

    /// Region across the vertex ahead: `p + q + h`.
    pub fn ahead(&self) -> Int {
        &self.p + &self.q + &self.h
    }

    /// Region across the vertex behind: `p + q - h`.
    pub fn behind(&self) -> Int {
        &self.p + &self.q - &self.h
    }

    /// Same edge traversed the other way; the label changes sign.
    pub fn reversed(&self) -> OrientedEdge {
        OrientedEdge::new(self.q.clone(), -&self.h, self.p.clone())
    }

    /// The two edges leaving the vertex ahead, left one first. With
    /// `s = p + q + h` they are `(p, p+s-q, s)` and `(s, s+q-p, q)`;
    /// both keep the discriminant.
    pub fn children(&self) -> (OrientedEdge, OrientedEdge) {
        let s = self.ahead();
        let left = OrientedEdge::new(self.p.clone(), &self.p + &s - &self.q, s.clone());
        let right = OrientedEdge::new(s.clone(), &s + &self.q - &self.p, self.q.clone());
        debug_assert_eq!(left.discriminant(), self.discriminant());
        debug_assert_eq!(right.discriminant(), self.discriminant());
        (left, right)
    }

    /// The star of the vertex ahead of this edge.
    pub fn vertex_star(&self) -> VertexStar {
        VertexStar::new(self.p.clone(), self.ahead(), self.q.clone())
    }
}

/// The six numbers at a trivalent vertex: region labels `r, s, t` and the
/// outward labels of the three edges, `e` across `r|t`, `f` across `r|s`,
/// `g` across `s|t`. They satisfy `e = r+t-s`, `f = r+s-t`, `g = s+t-r`,
/// hence `e + f + g = r + s + t` and `ef + fg + ge = -D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexStar {
    pub r: Int,
    pub s: Int,
    pub t: Int,
    pub e: Int,
    pub f: Int,
    pub g: Int,
}

impl VertexStar {
    pub fn new(r: Int, s: Int, t: Int) -> Self {
        let e = &r + &t - &s;
        let f = &r + &s - &t;
        let g = &s + &t - &r;
        let star = VertexStar { r, s, t, e, f, g };
        debug_assert_eq!(
            &star.e + &star.f + &star.g,
            &star.r + &star.s + &star.t
        );
        debug_assert_eq!(
            &star.e * &star.f + &star.f * &star.g + &star.g * &star.e,
            -star.discriminant()
        );
        star
    }

    pub fn from_i64(r: i64, s: i64, t: i64) -> Self {
        VertexStar::new(Int::from(r), Int::from(s), Int::from(t))
    }

    /// `e^2 - 4rt`, the discriminant of any topograph containing the vertex.
    pub fn discriminant(&self) -> Int {
        &self.e * &self.e - Int::from(4) * &self.r * &self.t
    }

    /// True when every region and edge label is nonzero, so that all six
    /// identity denominators exist.
    pub fn all_nonzero(&self) -> bool {
        !self.r.is_zero()
            && !self.s.is_zero()
            && !self.t.is_zero()
            && !self.e.is_zero()
            && !self.f.is_zero()
            && !self.g.is_zero()
    }
}

/// The exact vertex identities. `Stu5` is reproduced as printed in its
/// source and does not hold (see `check_algebraic`); `Stu6` restates `Stu4`
/// verbatim and evaluates identically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraicIdentity {
    Stu,
    Reci,
    Stu2,
    Stu3,
    Stu4,
    Stu5,
    Stu6,
}

impl AlgebraicIdentity {
    pub const ALL: [AlgebraicIdentity; 7] = [
        AlgebraicIdentity::Stu,
        AlgebraicIdentity::Reci,
        AlgebraicIdentity::Stu2,
        AlgebraicIdentity::Stu3,
        AlgebraicIdentity::Stu4,
        AlgebraicIdentity::Stu5,
        AlgebraicIdentity::Stu6,
    ];

    /// Identities that hold on every nondegenerate star.
    pub const VALID: [AlgebraicIdentity; 5] = [
        AlgebraicIdentity::Stu,
        AlgebraicIdentity::Reci,
        AlgebraicIdentity::Stu2,
        AlgebraicIdentity::Stu3,
        AlgebraicIdentity::Stu4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgebraicIdentity::Stu => "stu",
            AlgebraicIdentity::Reci => "reci",
            AlgebraicIdentity::Stu2 => "stu2",
            AlgebraicIdentity::Stu3 => "stu3",
            AlgebraicIdentity::Stu4 => "stu4",
            AlgebraicIdentity::Stu5 => "stu5",
            AlgebraicIdentity::Stu6 => "stu6",
        }
    }
}

fn require_nonzero(names: &str, values: &[&Int]) -> Result<()> {
    if values.iter().any(|v| v.is_zero()) {
        return Err(Error::DivisionByZero(format!(
            "identity denominator {names} vanishes on this star"
        )));
    }
    Ok(())
}

/// Exact residual (left side minus right side) of one vertex identity.
///
/// Zero for `Stu` through `Stu4` on every star with the needed labels
/// nonzero. `Stu5` returns a generically nonzero residual; on the witness
/// star `(r,s,t) = (1,2,5)` it is exactly `-1/16`.
pub fn check_algebraic(star: &VertexStar, which: AlgebraicIdentity) -> Result<Rat> {
    let d = star.discriminant();
    let (r, s, t) = (&star.r, &star.s, &star.t);
    let (e, f, g) = (&star.e, &star.f, &star.g);
    let one = Int::one;

    match which {
        AlgebraicIdentity::Stu => {
            require_nonzero("r, s, t", &[r, s, t])?;
            let lhs = ratio(g, &(s * t)) + ratio(f, &(r * s)) + ratio(e, &(r * t));
            let rhs = ratio(&-&d, &(r * s * t));
            Ok(lhs - rhs)
        }
        AlgebraicIdentity::Reci => {
            require_nonzero("e, f, g", &[e, f, g])?;
            let lhs = ratio(&one(), e) + ratio(&one(), f) + ratio(&one(), g);
            let rhs = ratio(&-&d, &(e * f * g));
            Ok(lhs - rhs)
        }
        AlgebraicIdentity::Stu2 => {
            require_nonzero("e, f, g", &[e, f, g])?;
            let lhs = ratio(s, &(f * g)) + ratio(r, &(e * f)) + ratio(t, &(e * g));
            let rhs = ratio(&-&d, &(e * f * g));
            Ok(lhs - rhs)
        }
        AlgebraicIdentity::Stu3 => {
            require_nonzero("r, s, t", &[r, s, t])?;
            let (r2, s2, t2) = (r * r, s * s, t * t);
            let lhs = ratio(g, &(&s2 * &t2)) + ratio(f, &(&r2 * &s2)) + ratio(e, &(&r2 * &t2));
            let rst = r * s * t;
            let rhs = ratio(&Int::from(-6), &rst)
                - ratio(&(&d * (r + s + t)), &(&rst * &rst));
            Ok(lhs - rhs)
        }
        AlgebraicIdentity::Stu4 | AlgebraicIdentity::Stu6 => {
            require_nonzero("e, f, g", &[e, f, g])?;
            let (e2, f2, g2) = (e * e, f * f, g * g);
            let lhs = ratio(s, &(&f2 * &g2)) + ratio(r, &(&e2 * &f2)) + ratio(t, &(&e2 * &g2));
            let efg = e * f * g;
            let rhs = ratio(&Int::from(-3), &(Int::from(2) * &efg))
                - ratio(&(&d * (e + f + g)), &(Int::from(2) * &efg * &efg));
            Ok(lhs - rhs)
        }
        AlgebraicIdentity::Stu5 => {
            require_nonzero("e, f, g", &[e, f, g])?;
            let lhs = ratio(&one(), &(e * e * e))
                + ratio(&one(), &(f * f * f))
                + ratio(&one(), &(g * g * g));
            let efg = e * f * g;
            let rhs = ratio(&-(&d * &d * &d), &(&efg * &efg * &efg))
                - ratio(&(Int::from(3) * &d * (e + f + g)), &(&efg * &efg))
                + ratio(e, &efg);
            Ok(lhs - rhs)
        }
    }
}

/// Returns the signed square root of `n` when `n` is a perfect square.
pub fn exact_sqrt(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, rat};
    use num_traits::Zero;

    #[test]
    fn discriminants_of_reference_forms() {
        assert_eq!(QuadraticForm::from_i64(1, 0, 1).discriminant(), int(-4));
        assert_eq!(QuadraticForm::from_i64(2, 5, 2).discriminant(), int(9));
        assert_eq!(QuadraticForm::from_i64(1, 2, 1).discriminant(), int(0));
    }

    #[test]
    fn eval_matches_region_labels() {
        let q = QuadraticForm::from_i64(1, 0, 1);
        assert_eq!(q.eval(&int(1), &int(1)), int(2));
        assert_eq!(q.eval(&int(2), &int(1)), int(5));
        let root = q.root_edge();
        assert_eq!(root.ahead(), int(2));
    }

    #[test]
    fn children_of_reference_edges() {
        let (l, r) = OrientedEdge::from_i64(1, 0, 1).children();
        assert_eq!(l, OrientedEdge::from_i64(1, 2, 2));
        assert_eq!(r, OrientedEdge::from_i64(2, 2, 1));

        let (l, r) = OrientedEdge::from_i64(1, 2, 2).children();
        assert_eq!(l, OrientedEdge::from_i64(1, 4, 5));
        assert_eq!(r, OrientedEdge::from_i64(5, 6, 2));

        // The right child keeps h^2 - 4pq = 9; its own ahead region is 7.
        let (l, r) = OrientedEdge::from_i64(1, 3, 0).children();
        assert_eq!(l, OrientedEdge::from_i64(1, 5, 4));
        assert_eq!(r, OrientedEdge::from_i64(4, 3, 0));
        assert_eq!(r.discriminant(), int(9));
    }

    #[test]
    fn reversal_swaps_sides_and_negates_label() {
        let e = OrientedEdge::from_i64(1, 4, 5);
        assert_eq!(e.reversed(), OrientedEdge::from_i64(5, -4, 1));
        assert_eq!(e.reversed().reversed(), e);
        assert_eq!(e.reversed().ahead(), e.behind());
    }

    #[test]
    fn vertex_star_of_reference_edges() {
        let star = OrientedEdge::from_i64(1, 0, 1).vertex_star();
        assert_eq!((star.r, star.s, star.t), (int(1), int(2), int(1)));
        assert_eq!((star.e, star.f, star.g), (int(0), int(2), int(2)));

        let star = OrientedEdge::from_i64(2, 5, 2).vertex_star();
        assert_eq!((star.r, star.s, star.t), (int(2), int(9), int(2)));
        assert_eq!((star.e, star.f, star.g), (int(-5), int(9), int(9)));
    }

    #[test]
    fn witness_star_residuals() {
        // Superbase (1,0), (1,1), (-2,-1) under m^2 + n^2.
        let star = VertexStar::from_i64(1, 2, 5);
        assert_eq!((star.e.clone(), star.f.clone(), star.g.clone()), (int(4), int(-2), int(6)));
        for id in AlgebraicIdentity::VALID {
            assert!(check_algebraic(&star, id).unwrap().is_zero(), "{}", id.name());
        }
        assert_eq!(check_algebraic(&star, AlgebraicIdentity::Stu5).unwrap(), rat(-1, 16));
        assert_eq!(
            check_algebraic(&star, AlgebraicIdentity::Stu6).unwrap(),
            check_algebraic(&star, AlgebraicIdentity::Stu4).unwrap()
        );
    }

    #[test]
    fn zero_labels_are_rejected_per_identity() {
        // e = 0 here, so the efg-side identities refuse while stu works.
        let star = OrientedEdge::from_i64(1, 0, 1).vertex_star();
        assert!(check_algebraic(&star, AlgebraicIdentity::Stu).is_ok());
        assert!(matches!(
            check_algebraic(&star, AlgebraicIdentity::Reci),
            Err(Error::DivisionByZero(_))
        ));
    }

    #[test]
    fn exact_sqrt_detects_squares() {
        assert_eq!(exact_sqrt(&int(49)), Some(int(7)));
        assert_eq!(exact_sqrt(&int(48)), None);
        assert_eq!(exact_sqrt(&int(0)), Some(int(0)));
        assert_eq!(exact_sqrt(&int(-9)), None);
    }
}

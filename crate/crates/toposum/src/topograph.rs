//! Depth-bounded traversal of the half-tree above an oriented edge:
//! frontiers, admissibility checks, exact telescoped partial sums, and
//! DOT/JSON exports.
//!
//! Depth convention: the root edge and its target vertex have depth 0,
//! `frontier(root, n)` holds the `2^n` edges at depth `n`, and a partial
//! sum "to depth n" covers the vertices of depth `0..n-1`. With that
//! convention telescoping is exact at every `n`: the sum of `1/(rst)` over
//! covered vertices equals `(1/D)(h0/(p0 q0) - sum of h/(pq) over the
//! frontier)`, and the sum of `1/(h_in f g)` equals `(1/D)(sum of 1/h
//! over the frontier - 1/h0)`.

use num_traits::{Signed, Zero};

use crate::bqf::OrientedEdge;
use crate::error::{Error, Result};
use crate::num::{ratio, Int, Rat};
use crate::real::Real;

/// Default cap on the number of edges a traversal may touch.
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 26;

/// All edges at one depth below a root, in left-to-right order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frontier {
    pub depth: u32,
    pub edges: Vec<OrientedEdge>,
}

/// How a root was certified admissible (or why it was not).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdmissibilityCriterion {
    /// `p > 0`, `q > 0`, `h >= 0` at the root; every deeper region label
    /// is then positive and every deeper edge label exceeds `h`, so no
    /// label vanishes anywhere in the half-tree.
    Climbing,
    /// Exhaustive zero-label scan of all edges and regions down to
    /// `checked_depth`; says nothing about deeper levels.
    CheckedToDepth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub criterion: AdmissibilityCriterion,
    pub checked_depth: u32,
}

fn check_depth_budget(n: u32, budget: u64) -> Result<()> {
    if n >= 63 || 1u64 << n > budget {
        return Err(Error::ResourceLimit(format!(
            "depth {n} needs 2^{n} frontier edges, over the budget of {budget}"
        )));
    }
    Ok(())
}

/// Visits the `2^n` depth-`n` edges below `root` in left-to-right order
/// without materializing intermediate levels.
fn for_each_frontier_edge<F>(root: &OrientedEdge, n: u32, mut visit: F) -> Result<()>
where
    F: FnMut(&OrientedEdge) -> Result<()>,
{
    let mut stack: Vec<(OrientedEdge, u32)> = vec![(root.clone(), n)];
    while let Some((edge, below)) = stack.pop() {
        if below == 0 {
            visit(&edge)?;
            continue;
        }
        let (left, right) = edge.children();
        stack.push((right, below - 1));
        stack.push((left, below - 1));
    }
    Ok(())
}

/// Visits every edge of depth `0..n` below `root` (the edges whose target
/// vertices a depth-`n` partial sum covers), depth-first, left first.
fn for_each_covered_edge<F>(root: &OrientedEdge, n: u32, mut visit: F) -> Result<()>
where
    F: FnMut(&OrientedEdge) -> Result<()>,
{
    if n == 0 {
        return Ok(());
    }
    let mut stack: Vec<(OrientedEdge, u32)> = vec![(root.clone(), n - 1)];
    while let Some((edge, below)) = stack.pop() {
        visit(&edge)?;
        if below > 0 {
            let (left, right) = edge.children();
            stack.push((right, below - 1));
            stack.push((left, below - 1));
        }
    }
    Ok(())
}

pub fn frontier(root: &OrientedEdge, n: u32, budget: u64) -> Result<Frontier> {
    check_depth_budget(n, budget)?;
    let mut edges = Vec::with_capacity(1usize << n.min(20));
    for_each_frontier_edge(root, n, |e| {
        edges.push(e.clone());
        Ok(())
    })?;
    Ok(Frontier { depth: n, edges })
}

/// Certifies a root admissible by the climbing criterion when possible,
/// otherwise scans for zero labels down to `scan_depth`.
pub fn is_admissible(root: &OrientedEdge, scan_depth: u32) -> AdmissibilityReport {
    if root.p.is_positive() && root.q.is_positive() && !root.h.is_negative() {
        return AdmissibilityReport {
            admissible: true,
            criterion: AdmissibilityCriterion::Climbing,
            checked_depth: 0,
        };
    }
    let mut zero_found = false;
    let scan = for_each_covered_edge(root, scan_depth + 1, |e| {
        if e.p.is_zero() || e.q.is_zero() || e.h.is_zero() || e.ahead().is_zero() {
            zero_found = true;
            return Err(Error::ResourceLimit(String::from("stop scan")));
        }
        Ok(())
    });
    let _ = scan;
    AdmissibilityReport {
        admissible: !zero_found,
        criterion: AdmissibilityCriterion::CheckedToDepth,
        checked_depth: scan_depth,
    }
}

fn crown_term_rst(e: &OrientedEdge) -> Result<Rat> {
    let pq = &e.p * &e.q;
    if pq.is_zero() {
        return Err(Error::DivisionByZero(format!(
            "zero region label beside crown edge ({}, {}, {})",
            e.p, e.h, e.q
        )));
    }
    Ok(ratio(&e.h, &pq))
}

/// Exact partial sum of `1/(rst)` over the vertices of depth `0..n`,
/// computed from the root term and the depth-`n` crown alone.
pub fn telescoped_rst_partial(root: &OrientedEdge, n: u32, d: &Int, budget: u64) -> Result<Rat> {
    if d != &root.discriminant() {
        return Err(Error::InvalidInput(format!(
            "discriminant {d} does not match the root's {}",
            root.discriminant()
        )));
    }
    if d.is_zero() {
        return Err(Error::InvalidInput(String::from(
            "telescoping kernel divides by the discriminant; \
             use zero_disc_rst_partial for discriminant zero",
        )));
    }
    check_depth_budget(n, budget)?;
    let root_term = crown_term_rst(root)?;
    let mut crown = Rat::zero();
    for_each_frontier_edge(root, n, |e| {
        crown += crown_term_rst(e)?;
        Ok(())
    })?;
    Ok((root_term - crown) / Rat::from_integer(d.clone()))
}

/// Same partial sum as [`telescoped_rst_partial`] but with the crown
/// accumulated in floating point, for depths where exact rational
/// accumulation is too expensive.
pub fn telescoped_rst_partial_real(
    root: &OrientedEdge,
    n: u32,
    d: &Int,
    prec: usize,
    budget: u64,
) -> Result<Real> {
    if d != &root.discriminant() || d.is_zero() {
        return Err(Error::InvalidInput(String::from(
            "needs the root's own nonzero discriminant",
        )));
    }
    check_depth_budget(n, budget)?;
    let root_term = crown_term_rst(root)?;
    let mut crown = Real::zero(prec);
    for_each_frontier_edge(root, n, |e| {
        crown = &crown + &Real::from_rat(&crown_term_rst(e)?, prec);
        Ok(())
    })?;
    Ok((&Real::from_rat(&root_term, prec) - &crown) / Real::from_int(d, prec))
}

/// Exact partial sum of `1/(h_in f g)` (incoming label times the two
/// child labels) over the vertices of depth `0..n`.
pub fn telescoped_efg_partial(root: &OrientedEdge, n: u32, d: &Int, budget: u64) -> Result<Rat> {
    if d != &root.discriminant() {
        return Err(Error::InvalidInput(format!(
            "discriminant {d} does not match the root's {}",
            root.discriminant()
        )));
    }
    if d.is_zero() {
        return Err(Error::InvalidInput(String::from(
            "telescoping kernel divides by the discriminant; \
             use zero_disc_efg_partial for discriminant zero",
        )));
    }
    if !root.h.is_positive() {
        return Err(Error::InvalidInput(format!(
            "root label {} must be positive for the reciprocal-label sum",
            root.h
        )));
    }
    check_depth_budget(n, budget)?;
    let mut crown = Rat::zero();
    for_each_frontier_edge(root, n, |e| {
        if e.h.is_zero() {
            return Err(Error::DivisionByZero(String::from("zero crown edge label")));
        }
        crown += ratio(&Int::from(1), &e.h);
        Ok(())
    })?;
    let root_term = ratio(&Int::from(1), &root.h);
    Ok((crown - root_term) / Rat::from_integer(d.clone()))
}

/// Brute-force oracle for [`telescoped_rst_partial`]: adds `1/(p s q)`
/// vertex by vertex.
pub fn direct_rst_partial(root: &OrientedEdge, n: u32, budget: u64) -> Result<Rat> {
    check_depth_budget(n, budget)?;
    let mut sum = Rat::zero();
    for_each_covered_edge(root, n, |e| {
        let prod = &e.p * &e.q * e.ahead();
        if prod.is_zero() {
            return Err(Error::DivisionByZero(String::from("zero region label at a vertex")));
        }
        sum += ratio(&Int::from(1), &prod);
        Ok(())
    })?;
    Ok(sum)
}

/// Brute-force oracle for [`telescoped_efg_partial`]: adds
/// `1/(h_in f g)` vertex by vertex.
pub fn direct_efg_partial(root: &OrientedEdge, n: u32, budget: u64) -> Result<Rat> {
    check_depth_budget(n, budget)?;
    let mut sum = Rat::zero();
    for_each_covered_edge(root, n, |e| {
        let (left, right) = e.children();
        let prod = &e.h * &left.h * &right.h;
        if prod.is_zero() {
            return Err(Error::DivisionByZero(String::from("zero edge label at a vertex")));
        }
        sum += ratio(&Int::from(1), &prod);
        Ok(())
    })?;
    Ok(sum)
}

/// A finite partial sum of a convergent vertex series together with an
/// exact bound on the mass of everything left out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedPartial {
    pub partial: Rat,
    pub dropped: Rat,
    pub vertices: u64,
}

#[derive(Clone, Copy)]
enum ZeroDiscKind {
    Rst,
    Efg,
}

/// Subtree mass below an edge of a zero-discriminant climbing half-tree.
/// With `h^2 = 4pq` the whole sum below `(p, h, q)` collapses to
/// `h^3/(24 p^3 q^3)` for the `1/(rst)` series and `1/(3 h^3)` for the
/// `1/(h_in f g)` series.
fn zero_disc_mass(e: &OrientedEdge, kind: ZeroDiscKind) -> Rat {
    match kind {
        ZeroDiscKind::Rst => {
            let h3 = &e.h * &e.h * &e.h;
            let pq = &e.p * &e.q;
            ratio(&h3, &(Int::from(24) * &pq * &pq * &pq))
        }
        ZeroDiscKind::Efg => ratio(&Int::from(1), &(Int::from(3) * &e.h * &e.h * &e.h)),
    }
}

fn zero_disc_vertex_term(e: &OrientedEdge, kind: ZeroDiscKind) -> Rat {
    match kind {
        ZeroDiscKind::Rst => ratio(&Int::from(1), &(&e.p * &e.q * e.ahead())),
        ZeroDiscKind::Efg => {
            let (left, right) = e.children();
            ratio(&Int::from(1), &(&e.h * &left.h * &right.h))
        }
    }
}

fn zero_disc_partial(
    root: &OrientedEdge,
    kind: ZeroDiscKind,
    cap: &Rat,
    budget: u64,
) -> Result<BoundedPartial> {
    if !root.discriminant().is_zero() {
        return Err(Error::InvalidInput(format!(
            "root has discriminant {}, not zero",
            root.discriminant()
        )));
    }
    if !root.p.is_positive() || !root.q.is_positive() {
        return Err(Error::InvalidInput(String::from(
            "needs a climbing root with positive side regions",
        )));
    }
    if !cap.is_positive() {
        return Err(Error::InvalidInput(String::from("cap must be positive")));
    }
    let mut partial = Rat::zero();
    let mut dropped = Rat::zero();
    let mut vertices: u64 = 0;
    let mut nodes: u64 = 0;
    // Each stack entry owns a share of the cap; a subtree is dropped only
    // when its exact mass fits inside its share, so the total dropped
    // mass can never exceed the cap.
    let mut stack: Vec<(OrientedEdge, Rat)> = vec![(root.clone(), cap.clone())];
    while let Some((edge, share)) = stack.pop() {
        nodes += 1;
        if nodes > budget {
            return Err(Error::ResourceLimit(format!(
                "partial-sum traversal exceeded the budget of {budget} edges"
            )));
        }
        let mass = zero_disc_mass(&edge, kind);
        if mass <= share {
            dropped += mass;
            continue;
        }
        partial += zero_disc_vertex_term(&edge, kind);
        vertices += 1;
        let (left, right) = edge.children();
        let (ml, mr) = (zero_disc_mass(&left, kind), zero_disc_mass(&right, kind));
        let total = &ml + &mr;
        if total.is_zero() {
            continue;
        }
        let left_share = &share * &ml / &total;
        let right_share = share - &left_share;
        stack.push((right, right_share));
        stack.push((left, left_share));
    }
    Ok(BoundedPartial { partial, dropped, vertices })
}

/// Partial sum of `1/(rst)` on a zero-discriminant half-tree with an
/// exact tail bound at most `cap`.
pub fn zero_disc_rst_partial(root: &OrientedEdge, cap: &Rat, budget: u64) -> Result<BoundedPartial> {
    zero_disc_partial(root, ZeroDiscKind::Rst, cap, budget)
}

/// Partial sum of `1/(h_in f g)` on a zero-discriminant half-tree with an
/// exact tail bound at most `cap`.
pub fn zero_disc_efg_partial(root: &OrientedEdge, cap: &Rat, budget: u64) -> Result<BoundedPartial> {
    zero_disc_partial(root, ZeroDiscKind::Efg, cap, budget)
}

/// Deterministic DOT rendering of the truncated half-tree: one node per
/// covered vertex labeled with its regions `r,s,t`, point stubs for the
/// crown, edge labels `h` with the flanking regions as an attribute.
pub fn export_dot(root: &OrientedEdge, n: u32, budget: u64) -> Result<String> {
    check_depth_budget(n, budget)?;
    let mut out = String::from("digraph topograph {\n  rankdir=BT;\n  root [shape=point];\n");
    let mut body = String::new();
    let mut queue: std::collections::VecDeque<(OrientedEdge, u32, String)> =
        std::collections::VecDeque::new();
    queue.push_back((root.clone(), 0, String::from("root")));
    let mut vertex_count = 0usize;
    let mut crown_count = 0usize;
    while let Some((edge, depth, source)) = queue.pop_front() {
        if depth < n {
            let name = format!("v{vertex_count}");
            vertex_count += 1;
            let star = edge.vertex_star();
            body.push_str(&format!(
                "  {name} [label=\"{},{},{}\"];\n  {source} -> {name} [label=\"{}\", regions=\"{}|{}\"];\n",
                star.r, star.s, star.t, edge.h, edge.p, edge.q
            ));
            let (left, right) = edge.children();
            queue.push_back((left, depth + 1, name.clone()));
            queue.push_back((right, depth + 1, name));
        } else {
            let name = format!("c{crown_count}");
            crown_count += 1;
            body.push_str(&format!(
                "  {name} [shape=point];\n  {source} -> {name} [label=\"{}\", regions=\"{}|{}\"];\n",
                edge.h, edge.p, edge.q
            ));
        }
    }
    out.push_str(&body);
    out.push_str("}\n");
    Ok(out)
}

fn json_edge(e: &OrientedEdge) -> String {
    format!("[\"{}\",\"{}\",\"{}\"]", e.p, e.h, e.q)
}

/// Deterministic JSON rendering: root, discriminant, depth, the depth-`n`
/// frontier, and every covered vertex star. Integers are decimal strings
/// so consumers never overflow fixed-width parsers.
pub fn export_json(root: &OrientedEdge, n: u32, budget: u64) -> Result<String> {
    check_depth_budget(n, budget)?;
    let mut frontier_items: Vec<String> = Vec::new();
    for_each_frontier_edge(root, n, |e| {
        frontier_items.push(json_edge(e));
        Ok(())
    })?;
    // Vertex stars in breadth-first left-to-right order.
    let mut vertex_items: Vec<String> = Vec::new();
    let mut level = vec![root.clone()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(level.len() * 2);
        for e in &level {
            let star = e.vertex_star();
            vertex_items.push(format!(
                "{{\"r\":\"{}\",\"s\":\"{}\",\"t\":\"{}\",\"e\":\"{}\",\"f\":\"{}\",\"g\":\"{}\"}}",
                star.r, star.s, star.t, star.e, star.f, star.g
            ));
            let (l, r) = e.children();
            next.push(l);
            next.push(r);
        }
        level = next;
    }
    Ok(format!(
        "{{\"root\":{{\"p\":\"{}\",\"h\":\"{}\",\"q\":\"{}\"}},\"discriminant\":\"{}\",\"depth\":{},\"frontier\":[{}],\"vertices\":[{}]}}",
        root.p,
        root.h,
        root.q,
        root.discriminant(),
        n,
        frontier_items.join(","),
        vertex_items.join(","),
    ))
}

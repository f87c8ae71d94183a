//! Linear maps between diagram spaces.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rustc_hash::FxHashMap;

use crate::diagram::enumerate::merge_legs;
use crate::diagram::product::{common_skeleton, disjoint_union};
use crate::diagram::{canonicalize, Builder, CanonicalDiagram, Diagram, Leg, Skeleton};
use crate::error::{Error, Result};
use crate::vector::{q, Coeff, DiagramVector};

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { return out };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn check_skeleton(v: &DiagramVector, want: fn(Skeleton) -> bool, what: &str) -> Result<Option<Skeleton>> {
    let s = common_skeleton(v)?;
    if let Some(s) = s {
        if !want(s) {
            return Err(Error::SkeletonMismatch(format!("{what} got {s}")));
        }
    }
    Ok(s)
}

/// Every way of ordering the legs of each component, as positions:
/// `result[r][j]` is the position of leg `j` in ordering `r`.
fn orderings(d: &Diagram, m: usize) -> Vec<Vec<usize>> {
    let groups: Vec<Vec<usize>> =
        (0..m).map(|c| (0..d.leg_count()).filter(|&j| d.legs()[j].component == c).collect()).collect();
    let mut out = vec![vec![0; d.leg_count()]];
    for g in &groups {
        let perms = permutations(g.len());
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for base in &out {
            for p in &perms {
                let mut pos = base.clone();
                for (k, &j) in g.iter().enumerate() {
                    pos[j] = p[k];
                }
                next.push(pos);
            }
        }
        out = next;
    }
    out
}

fn with_positions(d: &Diagram, skeleton: Skeleton, pos: &[usize]) -> Diagram {
    let legs = d.legs().iter().zip(pos).map(|(l, &p)| Leg::on(l.component, p)).collect();
    Diagram::from_parts_unchecked(skeleton, d.trivalent(), legs, d.pairing().to_vec())
}

/// Symmetrization: open diagrams with colors in `1..=m` to diagrams on `m`
/// intervals, averaging over all orders of same-colored legs.
pub fn chi(x: &DiagramVector, m: usize) -> Result<DiagramVector> {
    if let Some(s) = check_skeleton(x, |s| s.is_open() || s == Skeleton::Empty, "chi needs open diagrams,")? {
        if s.components() > m {
            return Err(Error::pre(format!("chi to {m} strings of a diagram with {} colors", s.components())));
        }
    }
    let target = Skeleton::Intervals(m);
    Ok(x.map_linear(|c| {
        let d = c.diagram();
        let counts = d.legs_per_component();
        let weight = counts.iter().fold(BigInt::one(), |acc, &k| acc * factorial(k));
        let coeff = BigRational::new(BigInt::one(), weight);
        let mut out = DiagramVector::zero();
        for pos in orderings(d, m) {
            out.add_diagram(&with_positions(d, target, &pos), &coeff);
        }
        out
    }))
}

/// Forgets the leg order: diagrams on `m` intervals to open diagrams with
/// `m` colors.
pub fn forget_order(y: &DiagramVector) -> Result<DiagramVector> {
    check_skeleton(y, |s| matches!(s, Skeleton::Intervals(_)), "forgetting the order needs intervals,")?;
    Ok(y.map_linear(|c| DiagramVector::from_diagram(&c.diagram().reattach(Skeleton::Colors(c.skeleton().components())))))
}

/// Inverse of `chi`, computed by the leg-filtration recursion and memoized
/// per canonical diagram.
#[derive(Default)]
pub struct PbwInverse {
    memo: FxHashMap<CanonicalDiagram, DiagramVector>,
    sorts: FxHashMap<CanonicalDiagram, DiagramVector>,
    steps: u64,
}

impl PbwInverse {
    pub fn new() -> PbwInverse {
        PbwInverse::default()
    }

    /// Number of distinct diagrams expanded so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn apply(&mut self, y: &DiagramVector) -> Result<DiagramVector> {
        check_skeleton(y, |s| matches!(s, Skeleton::Intervals(_)), "pbw inverse needs intervals,")?;
        let mut out = DiagramVector::zero();
        for (c, x) in y.iter() {
            let v = self.basis(c);
            out.add_scaled(&v, x);
        }
        Ok(out)
    }

    fn basis(&mut self, z: &CanonicalDiagram) -> DiagramVector {
        if let Some(v) = self.memo.get(z) {
            return v.clone();
        }
        self.steps += 1;
        let d = z.diagram();
        let m = d.skeleton().components();
        let all = orderings(d, m);
        let share = BigRational::new(BigInt::one(), BigInt::from(all.len()));
        let open = d.reattach(Skeleton::Colors(m));
        if canonicalize(&open).sign == 0 {
            // the orderings of z sum to zero, so z = -avg M(z_π) where M
            // collects the STU terms of sorting z_π back into z
            let mut corr = DiagramVector::zero();
            for pos in all {
                let zp = with_positions(d, d.skeleton(), &pos);
                let target: Vec<usize> = d.legs().iter().map(|l| l.position).collect();
                corr.add_scaled(&sort_into(&zp, &target), &-&share);
            }
            let mut out = DiagramVector::zero();
            for (c, x) in corr.iter() {
                let v = self.basis(c);
                out.add_scaled(&v, x);
            }
            self.memo.insert(z.clone(), out.clone());
            return out;
        }
        let mut out = DiagramVector::from_diagram(&open);
        // z = chi(forget z) + S(z) − avg S(z_π) modulo STU
        let mut corr = self.sort_terms(z);
        for pos in all {
            let zp = with_positions(d, d.skeleton(), &pos);
            let c = canonicalize(&zp);
            if c.sign == 0 {
                continue;
            }
            let s = self.sort_terms(&c.diagram);
            corr.add_scaled(&s, &(-&share * q(c.sign as i64)));
        }
        for (c, x) in corr.iter() {
            let v = self.basis(c);
            out.add_scaled(&v, x);
        }
        self.memo.insert(z.clone(), out.clone());
        out
    }

    /// STU terms collected while sorting the legs of `z` into the order
    /// given by the canonical labeling of its open diagram.
    fn sort_terms(&mut self, z: &CanonicalDiagram) -> DiagramVector {
        if let Some(v) = self.sorts.get(z) {
            return v.clone();
        }
        let d = z.diagram();
        let m = d.skeleton().components();
        let t = d.trivalent();
        let c = canonicalize(&d.reattach(Skeleton::Colors(m)));
        let rank: Vec<usize> = (0..d.leg_count()).map(|j| c.relabel[3 * t + j]).collect();
        let out = sort_into(d, &rank);
        self.sorts.insert(z.clone(), out.clone());
        out
    }
}

/// Bubble-sorts the legs of `d` on each string by `rank`, returning the
/// STU terms `S` picked up along the way (`T = U + S` at each swap).
fn sort_into(d: &Diagram, rank: &[usize]) -> DiagramVector {
    let t = d.trivalent();
    let mut cur = d.clone();
    let mut out = DiagramVector::zero();
    for comp in 0..d.skeleton().components() {
        loop {
            let on = cur.legs_on(comp);
            let Some(p) = (1..on.len()).find(|&p| rank[on[p - 1]] > rank[on[p]]) else { break };
            let (x, y) = (on[p - 1], on[p]);
            out.add_diagram(&merge_legs(&cur, x, y), &q(1));
            let mut legs = cur.legs().to_vec();
            let (px, py) = (legs[x].position, legs[y].position);
            legs[x].position = py;
            legs[y].position = px;
            cur = Diagram::from_parts_unchecked(cur.skeleton(), t, legs, cur.pairing().to_vec());
        }
    }
    out
}

/// `chi⁻¹` with a fresh memo table.
pub fn pbw_inverse(y: &DiagramVector) -> Result<DiagramVector> {
    PbwInverse::new().apply(y)
}

/// Closure: intervals become circles.
pub fn close(y: &DiagramVector) -> Result<DiagramVector> {
    check_skeleton(y, |s| matches!(s, Skeleton::Intervals(_)), "closure needs intervals,")?;
    Ok(y.map_linear(|c| {
        let m = c.skeleton().components();
        DiagramVector::from_diagram(&c.diagram().reattach(Skeleton::Circles(m)))
    }))
}

/// Cuts each circle open: circle `c` starts at its leg with position
/// `cuts[c]` (taken modulo the leg count).
pub fn cut_circles(y: &DiagramVector, cuts: &[usize]) -> Result<DiagramVector> {
    check_skeleton(y, |s| matches!(s, Skeleton::Circles(_)), "cutting needs circles,")?;
    y.try_map_linear(|c| {
        let d = c.diagram();
        let m = d.skeleton().components();
        if cuts.len() != m {
            return Err(Error::pre(format!("{} cut points for {m} circles", cuts.len())));
        }
        let counts = d.legs_per_component();
        let pos: Vec<usize> = d
            .legs()
            .iter()
            .map(|l| {
                let n = counts[l.component];
                (l.position + n - cuts[l.component] % n) % n
            })
            .collect();
        Ok(DiagramVector::from_diagram(&with_positions(d, Skeleton::Intervals(m), &pos)))
    })
}

/// String deletion: kills diagrams with a leg on interval `i` (0-based) and
/// renumbers the remaining intervals.
pub fn delete_string(y: &DiagramVector, i: usize) -> Result<DiagramVector> {
    let s = check_skeleton(y, |s| matches!(s, Skeleton::Intervals(_)), "string deletion needs intervals,")?;
    if let Some(s) = s {
        if i >= s.components() {
            return Err(Error::pre(format!("string {} out of range for {s}", i + 1)));
        }
    }
    Ok(y.map_linear(|c| {
        let d = c.diagram();
        if d.legs().iter().any(|l| l.component == i) {
            return DiagramVector::zero();
        }
        let m = d.skeleton().components();
        let target = if m == 1 { Skeleton::Empty } else { Skeleton::Intervals(m - 1) };
        let legs = d
            .legs()
            .iter()
            .map(|l| Leg::on(if l.component > i { l.component - 1 } else { l.component }, l.position))
            .collect();
        DiagramVector::from_diagram(&Diagram::from_parts_unchecked(target, d.trivalent(), legs, d.pairing().to_vec()))
    }))
}

/// Cabling: each leg on the single interval is lifted to one of `m`
/// parallel strings, summed over all lifts.
pub fn cable(y: &DiagramVector, m: usize) -> Result<DiagramVector> {
    check_skeleton(y, |s| s == Skeleton::Intervals(1), "cabling needs one interval,")?;
    if m == 0 {
        return Err(Error::pre("cabling to zero strings"));
    }
    let target = Skeleton::Intervals(m);
    Ok(y.map_linear(|c| {
        let d = c.diagram();
        let n = d.leg_count();
        let mut out = DiagramVector::zero();
        let total = m.pow(n as u32);
        for code in 0..total {
            let mut rest = code;
            let legs = d
                .legs()
                .iter()
                .map(|l| {
                    let s = rest % m;
                    rest /= m;
                    Leg::on(s, l.position)
                })
                .collect();
            let lifted = Diagram::from_pairing(target, d.trivalent(), legs, d.pairing().to_vec())
                .expect("lift keeps positions distinct");
            out.add_diagram(&lifted, &q(1));
        }
        out
    }))
}

/// The wheel with `2j` spokes on one interval, legs in cyclic order.
pub fn wheel(spokes: usize) -> Result<Diagram> {
    if spokes == 0 || spokes % 2 == 1 {
        return Err(Error::pre(format!("wheel needs an even positive number of spokes, got {spokes}")));
    }
    let n = spokes;
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((3 * i, 3 * n + i));
        edges.push((3 * i + 1, 3 * ((i + 1) % n) + 2));
    }
    let legs = (0..n).map(|i| Leg::on(0, i)).collect();
    Diagram::new(Skeleton::Intervals(1), n, legs, &edges)
}

/// The wheel as an open diagram with one color.
pub fn open_wheel(spokes: usize) -> Result<Diagram> {
    Ok(wheel(spokes)?.reattach(Skeleton::Colors(1)))
}

/// Where the circles go when inserted into a connected trivalent diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub gamma: Diagram,
    /// For circle `i`: (edge index in `gamma.edges()`, slot). Circles on one
    /// edge are met in increasing slot order walking from the lower
    /// half-edge to the higher one.
    pub slots: Vec<(usize, usize)>,
}

impl Placement {
    /// Circles assigned round-robin to the edges of the canonical
    /// representative of `gamma`.
    pub fn canonical(gamma: &Diagram, circles: usize) -> Placement {
        let rep = canonicalize(gamma).diagram.diagram().clone();
        let e = rep.edges().len().max(1);
        let slots = (0..circles).map(|i| (i % e, i / e)).collect();
        Placement { gamma: rep, slots }
    }

    /// Every placement of `circles` labeled circles on the edges of `gamma`.
    pub fn all(gamma: &Diagram, circles: usize) -> Vec<Placement> {
        let e = gamma.edges().len();
        let mut out = Vec::new();
        // assign each circle an edge, then order circles per edge
        let total = e.pow(circles as u32);
        for code in 0..total {
            let mut rest = code;
            let edge_of: Vec<usize> = (0..circles)
                .map(|_| {
                    let x = rest % e;
                    rest /= e;
                    x
                })
                .collect();
            let per_edge: Vec<Vec<usize>> = (0..e).map(|x| (0..circles).filter(|&i| edge_of[i] == x).collect()).collect();
            let mut partial: Vec<Vec<(usize, usize)>> = vec![vec![(0, 0); circles]];
            for (x, group) in per_edge.iter().enumerate() {
                let mut next = Vec::new();
                for base in &partial {
                    for p in permutations(group.len()) {
                        let mut s = base.clone();
                        for (k, &i) in group.iter().enumerate() {
                            s[i] = (x, p[k]);
                        }
                        next.push(s);
                    }
                }
                partial = next;
            }
            out.extend(partial.into_iter().map(|slots| Placement { gamma: gamma.clone(), slots }));
        }
        out
    }
}

/// Inserts circles into the edges of a connected trivalent diagram; each
/// inserted circle carries the two ends of the cut edge as adjacent legs.
pub fn insert_circles(pl: &Placement) -> Result<Diagram> {
    let g = &pl.gamma;
    if g.skeleton() != Skeleton::Empty {
        return Err(Error::pre(format!("circle insertion needs a trivalent diagram, got skeleton {}", g.skeleton())));
    }
    if !g.is_connected() || g.trivalent() == 0 {
        return Err(Error::pre("circle insertion needs a connected trivalent diagram"));
    }
    let circles = pl.slots.len();
    if circles != g.degree() + 2 {
        return Err(Error::pre(format!("{circles} circles for a diagram of degree {}", g.degree())));
    }
    let edges = g.edges();
    let mut on_edge: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (i, &(e, slot)) in pl.slots.iter().enumerate() {
        if e >= edges.len() {
            return Err(Error::pre(format!("circle {} placed on edge {e}, diagram has {}", i + 1, edges.len())));
        }
        on_edge.entry(e).or_default().push((slot, i));
    }
    let mut b = Builder::from_diagram(g);
    b.skeleton = Skeleton::Circles(circles);
    for (e, mut list) in on_edge {
        list.sort();
        if list.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::pre(format!("two circles share slot {} on edge {e}", list[0].0)));
        }
        let (lo, hi) = edges[e];
        b.pair.remove(&lo);
        b.pair.remove(&hi);
        let mut prev = lo;
        for &(_, i) in &list {
            let first = b.add_leg(Leg::on(i, 0));
            let second = b.add_leg(Leg::on(i, 1));
            b.join(prev, first);
            prev = second;
        }
        b.join(prev, hi);
    }
    b.finish()
}

/// Joins the two legs of each color; diagrams without exactly two legs of
/// every color go to zero, and so do joins that close a vertex-free loop.
pub fn join_pairs(x: &DiagramVector) -> Result<DiagramVector> {
    check_skeleton(x, |s| s.is_open(), "joining legs needs open diagrams,")?;
    Ok(x.map_linear(|c| {
        let d = c.diagram();
        if d.legs_per_component().iter().any(|&k| k != 2) {
            return DiagramVector::zero();
        }
        let mut b = Builder::from_diagram(d);
        let t = d.trivalent();
        for color in 0..d.skeleton().components() {
            let pair: Vec<usize> = (0..d.leg_count()).filter(|&j| d.legs()[j].component == color).map(|j| 3 * t + j).collect();
            let (h1, h2) = (pair[0], pair[1]);
            let (p1, p2) = (b.partner(h1), b.partner(h2));
            if p1 == h2 {
                return DiagramVector::zero();
            }
            b.remove_leg(h1);
            b.remove_leg(h2);
            b.pair.remove(&h1);
            b.pair.remove(&h2);
            b.join(p1, p2);
        }
        b.skeleton = Skeleton::Empty;
        DiagramVector::from_diagram(&b.finish().expect("joined diagram is valid"))
    }))
}

/// Keeps the connected legless diagrams.
pub fn project_connected(x: &DiagramVector) -> Result<DiagramVector> {
    check_skeleton(x, |s| s == Skeleton::Empty, "connected projection needs legless diagrams,")?;
    Ok(x.filter(|c| c.diagram().is_connected()))
}

/// Degree-truncated power series of diagrams under disjoint union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedVector {
    skeleton: Skeleton,
    bound: usize,
    parts: BTreeMap<usize, DiagramVector>,
}

impl GradedVector {
    pub fn zero(skeleton: Skeleton, bound: usize) -> GradedVector {
        GradedVector { skeleton, bound, parts: BTreeMap::new() }
    }

    pub fn one(skeleton: Skeleton, bound: usize) -> GradedVector {
        let mut g = GradedVector::zero(skeleton, bound);
        g.add(&DiagramVector::from_diagram(&Diagram::empty(skeleton)), &q(1));
        g
    }

    /// Splits `v` by degree, dropping parts above `bound`.
    pub fn from_vector(skeleton: Skeleton, bound: usize, v: &DiagramVector) -> Result<GradedVector> {
        if let Some(s) = common_skeleton(v)? {
            if s != skeleton {
                return Err(Error::SkeletonMismatch(format!("{s} in a series on {skeleton}")));
            }
        }
        let mut g = GradedVector::zero(skeleton, bound);
        g.add(v, &q(1));
        Ok(g)
    }

    fn add(&mut self, v: &DiagramVector, x: &Coeff) {
        for (c, y) in v.iter() {
            let k = c.degree();
            if k > self.bound {
                continue;
            }
            let e = self.parts.entry(k).or_default();
            e.add_term(c.clone(), y * x);
            if e.is_zero() {
                self.parts.remove(&k);
            }
        }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn part(&self, k: usize) -> DiagramVector {
        self.parts.get(&k).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> DiagramVector {
        let mut out = DiagramVector::zero();
        for v in self.parts.values() {
            out += v;
        }
        out
    }

    fn product(&self, other: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::zero(self.skeleton, self.bound);
        for (&i, a) in &self.parts {
            for (&j, b) in &other.parts {
                if i + j <= self.bound {
                    out.add(&disjoint_union(a, b)?, &q(1));
                }
            }
        }
        Ok(out)
    }

    fn scaled_sum(terms: &[(Coeff, GradedVector)], skeleton: Skeleton, bound: usize) -> GradedVector {
        let mut out = GradedVector::zero(skeleton, bound);
        for (x, g) in terms {
            for v in g.parts.values() {
                out.add(v, x);
            }
        }
        out
    }
}

/// `exp` for disjoint union, truncated at the series bound.
pub fn exp_union(p: &GradedVector) -> Result<GradedVector> {
    if !p.part(0).is_zero() {
        return Err(Error::pre("exp needs a series without degree-0 part"));
    }
    let mut terms = vec![(q(1), GradedVector::one(p.skeleton, p.bound))];
    let mut power = GradedVector::one(p.skeleton, p.bound);
    let mut fact = BigInt::one();
    for k in 1..=p.bound {
        power = power.product(p)?;
        if power.parts.is_empty() {
            break;
        }
        fact *= k;
        terms.push((BigRational::new(BigInt::one(), fact.clone()), power.clone()));
    }
    Ok(GradedVector::scaled_sum(&terms, p.skeleton, p.bound))
}

/// `log` for disjoint union, truncated at the series bound.
pub fn log_union(g: &GradedVector) -> Result<GradedVector> {
    let unit = DiagramVector::from_diagram(&Diagram::empty(g.skeleton));
    if g.part(0) != unit {
        return Err(Error::pre("log needs degree-0 part equal to the empty diagram"));
    }
    let mut x = g.clone();
    x.parts.remove(&0);
    let mut terms = Vec::new();
    let mut power = GradedVector::one(g.skeleton, g.bound);
    for k in 1..=g.bound {
        power = power.product(&x)?;
        if power.parts.is_empty() {
            break;
        }
        let sign = if k % 2 == 1 { BigInt::one() } else { -BigInt::one() };
        terms.push((BigRational::new(sign, BigInt::from(k)), power.clone()));
    }
    Ok(GradedVector::scaled_sum(&terms, g.skeleton, g.bound))
}

/// Whether two vectors are equal after an overall sign, and which sign.
pub fn equal_up_to_sign(a: &DiagramVector, b: &DiagramVector) -> Option<i8> {
    if a == b {
        Some(1)
    } else if *a == -b {
        Some(-1)
    } else {
        None
    }
}

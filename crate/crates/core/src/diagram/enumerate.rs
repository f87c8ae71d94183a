//! Isomorphism classes of diagrams of a given degree.
//!
//! Diagrams on a skeleton are grown from chord diagrams by merging two
//! adjacent legs into a trivalent vertex; every diagram with a trivalent
//! vertex arises this way from a diagram with one fewer vertex (undo the
//! merge at any leg attached to a trivalent vertex). Open diagrams are grown
//! the same way from strut diagrams, merging two legs of one color. Closed
//! trivalent diagrams are obtained by joining the two legs of one-colored
//! open diagrams.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{canonicalize, Builder, CanonicalDiagram, Diagram, Leg, Skeleton};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Constraints {
    /// Keep only diagrams whose dashed graph is connected.
    pub connected_only: bool,
    /// Keep only legless diagrams (requires the empty skeleton).
    pub trivalent_only: bool,
    /// Exact number of legs per component or color.
    pub legs_per_component: Option<Vec<usize>>,
}

impl Constraints {
    pub fn connected() -> Constraints {
        Constraints { connected_only: true, ..Default::default() }
    }

    pub fn legs(counts: Vec<usize>) -> Constraints {
        Constraints { legs_per_component: Some(counts), ..Default::default() }
    }

    pub(crate) fn check(&self, skeleton: Skeleton) -> Result<()> {
        if self.trivalent_only && skeleton != Skeleton::Empty {
            return Err(Error::pre(format!("trivalent-only enumeration needs the empty skeleton, got {skeleton}")));
        }
        if let Some(c) = &self.legs_per_component {
            if c.len() != skeleton.components() {
                return Err(Error::pre(format!(
                    "legs-per-component has {} entries but skeleton {skeleton} has {} components",
                    c.len(),
                    skeleton.components()
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn accepts(&self, d: &Diagram) -> bool {
        if self.connected_only && !d.is_connected() {
            return false;
        }
        if let Some(c) = &self.legs_per_component {
            if &d.legs_per_component() != c {
                return false;
            }
        }
        true
    }
}

/// All isomorphism classes meeting the constraints, AS-degenerate classes
/// omitted, sorted by canonical code. `budget` caps the number of
/// intermediate classes generated.
pub fn enumerate(
    skeleton: Skeleton,
    degree: usize,
    constraints: &Constraints,
    budget: Option<usize>,
) -> Result<Vec<CanonicalDiagram>> {
    constraints.check(skeleton)?;
    let mut counter = Budget { limit: budget.unwrap_or(usize::MAX), used: 0 };
    let all = match skeleton {
        Skeleton::Empty => closed(degree, constraints.connected_only, &mut counter)?,
        Skeleton::Circles(_) | Skeleton::Intervals(_) | Skeleton::Colors(_) => {
            grow(skeleton, degree, constraints.legs_per_component.as_deref(), &mut counter)?
        }
    };
    let mut out: Vec<CanonicalDiagram> =
        all.into_iter().filter(|(_, sign)| *sign != 0).map(|(c, _)| c).filter(|c| constraints.accepts(c.diagram())).collect();
    out.sort();
    Ok(out)
}

struct Budget {
    limit: usize,
    used: usize,
}

impl Budget {
    fn charge(&mut self, n: usize, what: &str) -> Result<()> {
        self.used += n;
        if self.used > self.limit {
            return Err(Error::Budget { what: what.to_string(), count: self.used.min(self.limit) });
        }
        Ok(())
    }
}

type Pool = BTreeMap<CanonicalDiagram, i8>;

fn insert_all(pool: &mut Pool, ds: Vec<Diagram>) {
    let canon: Vec<_> = ds.par_iter().map(canonicalize).collect();
    for c in canon {
        pool.entry(c.diagram).or_insert(c.sign);
    }
}

/// Level-by-level growth from vertex-free diagrams.
fn grow(
    skeleton: Skeleton,
    degree: usize,
    target: Option<&[usize]>,
    budget: &mut Budget,
) -> Result<Vec<(CanonicalDiagram, i8)>> {
    if degree == 0 {
        return Ok(vec![(canonicalize(&Diagram::empty(skeleton)).diagram, 1)]);
    }
    let mut level = Pool::new();
    insert_all(&mut level, vertex_free(skeleton, degree));
    let keep = |d: &Diagram| match target {
        Some(t) => d.legs_per_component().iter().zip(t).all(|(have, want)| have >= want),
        None => true,
    };
    level.retain(|c, _| keep(c.diagram()));
    budget.charge(level.len(), "enumeration")?;
    let mut all: Vec<(CanonicalDiagram, i8)> = level.iter().map(|(c, &s)| (c.clone(), s)).collect();
    for _ in 1..2 * degree {
        let mut next = Pool::new();
        let mut candidates = Vec::new();
        for c in level.keys() {
            candidates.extend(merges(c.diagram()).into_iter().filter(|d| keep(d)));
        }
        insert_all(&mut next, candidates);
        if next.is_empty() {
            break;
        }
        budget.charge(next.len(), "enumeration")?;
        all.extend(next.iter().map(|(c, &s)| (c.clone(), s)));
        level = next;
    }
    Ok(all)
}

/// Chord diagrams (struts for open diagrams) of the given degree, one
/// representative per labeled arrangement.
fn vertex_free(skeleton: Skeleton, degree: usize) -> Vec<Diagram> {
    let m = skeleton.components();
    let legs = 2 * degree;
    let mut out = Vec::new();
    let matchings = perfect_matchings(legs);
    for counts in compositions(legs, m) {
        if skeleton.is_open() {
            // one color per leg in nondecreasing order covers every multiset
            let mut colors = Vec::with_capacity(legs);
            for (c, &k) in counts.iter().enumerate() {
                colors.extend(std::iter::repeat_n(c, k));
            }
            let leg_list: Vec<Leg> = colors.iter().map(|&c| Leg::color(c)).collect();
            for mt in &matchings {
                out.push(Diagram::from_parts_unchecked(skeleton, 0, leg_list.clone(), mt.clone()));
            }
        } else {
            let mut leg_list = Vec::with_capacity(legs);
            for (c, &k) in counts.iter().enumerate() {
                leg_list.extend((0..k).map(|p| Leg::on(c, p)));
            }
            for mt in &matchings {
                out.push(Diagram::from_parts_unchecked(skeleton, 0, leg_list.clone(), mt.clone()));
            }
        }
    }
    out
}

/// All perfect matchings of `0..n`, as partner arrays.
pub(crate) fn perfect_matchings(n: usize) -> Vec<Vec<usize>> {
    fn rec(p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(first) = p.iter().position(|&x| x == usize::MAX) else {
            out.push(p.clone());
            return;
        };
        for second in first + 1..p.len() {
            if p[second] == usize::MAX {
                p[first] = second;
                p[second] = first;
                rec(p, out);
                p[first] = usize::MAX;
                p[second] = usize::MAX;
            }
        }
    }
    let mut out = Vec::new();
    if n.is_multiple_of(2) {
        rec(&mut vec![usize::MAX; n], &mut out);
    }
    out
}

/// Ordered ways to write `n` as a sum of `parts` nonnegative integers.
pub(crate) fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every diagram obtained by merging two legs into a new trivalent vertex
/// carrying one leg: adjacent legs of one component on a skeleton, any two
/// legs of one color for open diagrams. Merges of two ends of one chord
/// are skipped (they produce a loop, which is zero).
pub(crate) fn merges(d: &Diagram) -> Vec<Diagram> {
    let mut out = Vec::new();
    for (x, y) in mergeable_pairs(d) {
        let hx = d.leg_half_edge(x);
        let hy = d.leg_half_edge(y);
        if d.partner(hx) == hy {
            continue;
        }
        out.push(merge_legs(d, x, y));
    }
    out
}

/// Ordered leg pairs `(x, y)` eligible for merging, `x` immediately before
/// `y` on a skeleton.
pub(crate) fn mergeable_pairs(d: &Diagram) -> Vec<(usize, usize)> {
    let s = d.skeleton();
    let mut out = Vec::new();
    for c in 0..s.components() {
        let on = d.legs_on(c);
        if s.is_open() {
            let on: Vec<usize> = (0..d.leg_count()).filter(|&j| d.legs()[j].component == c).collect();
            for a in 0..on.len() {
                for b in a + 1..on.len() {
                    out.push((on[a], on[b]));
                }
            }
        } else if on.len() >= 2 {
            for p in 0..on.len() - 1 {
                out.push((on[p], on[p + 1]));
            }
            if s.is_cyclic() && on.len() > 2 {
                out.push((on[on.len() - 1], on[0]));
            }
        }
    }
    out
}

/// Replaces legs `x`, `y` by a trivalent vertex with cyclic order
/// (new leg, partner of x, partner of y); the new leg takes x's position.
pub(crate) fn merge_legs(d: &Diagram, x: usize, y: usize) -> Diagram {
    let mut b = Builder::from_diagram(d);
    let hx = d.leg_half_edge(x);
    let hy = d.leg_half_edge(y);
    let lx = b.remove_leg(hx);
    b.remove_leg(hy);
    let v = b.add_vertex();
    let leg = b.add_leg(lx);
    b.rewire(&[(hx, v[1]), (hy, v[2])]);
    b.join(v[0], leg);
    b.finish().expect("merge keeps a valid diagram")
}

/// Closed trivalent diagrams; connected ones come from cutting an edge.
fn closed(degree: usize, connected_only: bool, budget: &mut Budget) -> Result<Vec<(CanonicalDiagram, i8)>> {
    if degree == 0 {
        return Ok(if connected_only {
            vec![]
        } else {
            vec![(canonicalize(&Diagram::empty(Skeleton::Empty)).diagram, 1)]
        });
    }
    let mut by_degree: Vec<Vec<(CanonicalDiagram, i8)>> = vec![Vec::new()];
    for k in 1..=degree {
        if connected_only && k < degree {
            by_degree.push(Vec::new());
            continue;
        }
        by_degree.push(connected_closed(k, budget)?);
    }
    if connected_only {
        return Ok(by_degree.pop().unwrap());
    }
    // disjoint unions: multisets of connected pieces with degrees summing to `degree`
    let mut pool = Pool::new();
    let mut pieces: Vec<(usize, CanonicalDiagram)> = Vec::new();
    for (k, list) in by_degree.iter().enumerate() {
        for (c, _) in list {
            pieces.push((k, c.clone()));
        }
    }
    let mut chosen = Vec::new();
    let mut results = Vec::new();
    multisets(&pieces, 0, degree, &mut chosen, &mut results);
    budget.charge(results.len(), "enumeration")?;
    insert_all(&mut pool, results);
    Ok(pool.into_iter().collect())
}

fn multisets(
    pieces: &[(usize, CanonicalDiagram)],
    start: usize,
    remaining: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Diagram>,
) {
    if remaining == 0 {
        let mut d = Diagram::empty(Skeleton::Empty);
        for &i in chosen.iter() {
            d = super::product::juxtapose(&d, pieces[i].1.diagram());
        }
        out.push(d);
        return;
    }
    for i in start..pieces.len() {
        if pieces[i].0 <= remaining {
            chosen.push(i);
            multisets(pieces, i, remaining - pieces[i].0, chosen, out);
            chosen.pop();
        }
    }
}

fn connected_closed(degree: usize, budget: &mut Budget) -> Result<Vec<(CanonicalDiagram, i8)>> {
    // one-colored open diagrams with 2*degree trivalent vertices and two legs
    let open = grow(Skeleton::Colors(1), degree + 1, Some(&[2]), budget)?;
    let mut joined = Vec::new();
    for (c, _) in open {
        let d = c.diagram();
        if d.leg_count() != 2 || d.trivalent() != 2 * degree {
            continue;
        }
        joined.push(join_two_legs(d));
    }
    let mut pool = Pool::new();
    insert_all(&mut pool, joined);
    budget.charge(pool.len(), "enumeration")?;
    Ok(pool.into_iter().collect())
}

fn join_two_legs(d: &Diagram) -> Diagram {
    let mut b = Builder::from_diagram(d);
    let h0 = d.leg_half_edge(0);
    let h1 = d.leg_half_edge(1);
    let p0 = d.partner(h0);
    let p1 = d.partner(h1);
    b.remove_leg(h0);
    b.remove_leg(h1);
    b.pair.remove(&h0);
    b.pair.remove(&h1);
    b.join(p0, p1);
    b.skeleton = Skeleton::Empty;
    b.finish().expect("joined diagram is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(s: Skeleton, k: usize, c: &Constraints) -> usize {
        enumerate(s, k, c, None).unwrap().len()
    }

    #[test]
    fn matchings_and_compositions() {
        assert_eq!(perfect_matchings(6).len(), 15);
        assert_eq!(compositions(4, 3).len(), 15);
    }

    #[test]
    fn degree_zero_is_the_empty_diagram() {
        let v = enumerate(Skeleton::Empty, 0, &Constraints::default(), None).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].diagram().half_edges(), 0);
    }

    #[test]
    fn theta_is_the_only_connected_degree_one_diagram() {
        let c = Constraints { connected_only: true, trivalent_only: true, legs_per_component: None };
        let v = enumerate(Skeleton::Empty, 1, &c, None).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].trivalent(), 2);
    }

    #[test]
    fn single_chord_on_a_circle() {
        assert_eq!(count(Skeleton::Circles(1), 1, &Constraints::default()), 1);
    }

    #[test]
    fn budget_failure_reports_count() {
        let err = enumerate(Skeleton::Circles(2), 3, &Constraints::default(), Some(5)).unwrap_err();
        assert!(matches!(err, Error::Budget { count: 5, .. }), "{err:?}");
    }
}

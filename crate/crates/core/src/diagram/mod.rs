//! Unitrivalent diagrams on a skeleton.
//!
//! Half-edge numbering: trivalent vertex `v` owns half-edges `3v, 3v+1, 3v+2`
//! listed in its cyclic order, and leg `j` owns half-edge `3T + j`. Edges are
//! a perfect matching on half-edges.

mod builder;
pub mod canon;
pub mod enumerate;
pub mod json;
pub mod product;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub(crate) use builder::Builder;
pub use canon::{canonicalize, reflect_vertex, Canonical, CanonicalDiagram};

/// The 1-manifold (or its absence) that legs attach to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Skeleton {
    /// No skeleton and no legs: closed trivalent diagrams.
    Empty,
    /// `m` ordered, oriented circles; legs are cyclically ordered.
    Circles(usize),
    /// `m` ordered, oriented intervals; legs are linearly ordered.
    Intervals(usize),
    /// Open diagrams: no skeleton, each leg carries a color in `0..m`.
    Colors(usize),
}

impl Skeleton {
    pub fn components(&self) -> usize {
        match *self {
            Skeleton::Empty => 0,
            Skeleton::Circles(m) | Skeleton::Intervals(m) | Skeleton::Colors(m) => m,
        }
    }

    /// True when legs carry a position along a component.
    pub fn has_positions(&self) -> bool {
        matches!(self, Skeleton::Circles(_) | Skeleton::Intervals(_))
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self, Skeleton::Circles(_))
    }

    pub fn is_open(&self) -> bool {
        matches!(self, Skeleton::Colors(_))
    }

    /// Same kind, different component count.
    pub fn with_components(&self, m: usize) -> Skeleton {
        match *self {
            Skeleton::Empty => Skeleton::Empty,
            Skeleton::Circles(_) => Skeleton::Circles(m),
            Skeleton::Intervals(_) => Skeleton::Intervals(m),
            Skeleton::Colors(_) => Skeleton::Colors(m),
        }
    }

    pub(crate) fn code(&self) -> u16 {
        match self {
            Skeleton::Empty => 0,
            Skeleton::Circles(_) => 1,
            Skeleton::Intervals(_) => 2,
            Skeleton::Colors(_) => 3,
        }
    }
}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Skeleton::Empty => write!(f, "empty"),
            Skeleton::Circles(m) => write!(f, "C{m}"),
            Skeleton::Intervals(m) => write!(f, "I{m}"),
            Skeleton::Colors(m) => write!(f, "O{m}"),
        }
    }
}

impl FromStr for Skeleton {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Schema {
            path: "--skeleton".into(),
            message: format!("expected empty, C<m>, I<m> or O<m>, got {s:?}"),
        };
        if s == "empty" {
            return Ok(Skeleton::Empty);
        }
        let (kind, count) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        let m: usize = count.parse().map_err(|_| bad())?;
        if m == 0 {
            return Err(bad());
        }
        match kind {
            "C" => Ok(Skeleton::Circles(m)),
            "I" => Ok(Skeleton::Intervals(m)),
            "O" => Ok(Skeleton::Colors(m)),
            _ => Err(bad()),
        }
    }
}

/// Where a leg sits. For open diagrams `component` is the color and
/// `position` is always zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Leg {
    pub component: usize,
    pub position: usize,
}

impl Leg {
    pub fn on(component: usize, position: usize) -> Leg {
        Leg { component, position }
    }

    pub fn color(c: usize) -> Leg {
        Leg { component: c, position: 0 }
    }
}

/// Endpoint owner of a half-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    /// Trivalent vertex and the slot (0..3) within its cyclic order.
    Vertex(usize, usize),
    Leg(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagram {
    skeleton: Skeleton,
    trivalent: usize,
    legs: Vec<Leg>,
    pairing: Vec<usize>,
}

impl Diagram {
    /// Builds and validates a diagram. Leg positions may be any distinct
    /// integers per component; they are normalized to ranks `0..len`.
    pub fn new(
        skeleton: Skeleton,
        trivalent: usize,
        legs: Vec<Leg>,
        edges: &[(usize, usize)],
    ) -> Result<Diagram> {
        let n = 3 * trivalent + legs.len();
        let mut pairing = vec![usize::MAX; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!(
                    "edge ({a}, {b}) references a half-edge outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::invalid(format!("half-edge {a} matched to itself")));
            }
            for h in [a, b] {
                if pairing[h] != usize::MAX {
                    return Err(Error::invalid(format!("half-edge {h} matched twice")));
                }
            }
            pairing[a] = b;
            pairing[b] = a;
        }
        if let Some(h) = pairing.iter().position(|&p| p == usize::MAX) {
            return Err(Error::invalid(format!("half-edge {h} is unmatched")));
        }
        let d = Diagram::from_pairing(skeleton, trivalent, legs, pairing)?;
        d.check_components()?;
        Ok(d)
    }

    /// Validates everything except the leg-per-component rule.
    pub(crate) fn from_pairing(
        skeleton: Skeleton,
        trivalent: usize,
        mut legs: Vec<Leg>,
        pairing: Vec<usize>,
    ) -> Result<Diagram> {
        let m = skeleton.components();
        if skeleton == Skeleton::Empty && !legs.is_empty() {
            return Err(Error::invalid("diagram on the empty skeleton has legs"));
        }
        for (j, leg) in legs.iter_mut().enumerate() {
            if leg.component >= m {
                return Err(Error::invalid(format!(
                    "leg {j} attached to component {} but skeleton {skeleton} has {m}",
                    leg.component + 1
                )));
            }
            if !skeleton.has_positions() {
                leg.position = 0;
            }
        }
        if skeleton.has_positions() {
            normalize_positions(&mut legs)?;
        }
        debug_assert_eq!(pairing.len(), 3 * trivalent + legs.len());
        Ok(Diagram { skeleton, trivalent, legs, pairing })
    }

    pub(crate) fn from_parts_unchecked(
        skeleton: Skeleton,
        trivalent: usize,
        legs: Vec<Leg>,
        pairing: Vec<usize>,
    ) -> Diagram {
        Diagram { skeleton, trivalent, legs, pairing }
    }

    /// The diagram with no vertices.
    pub fn empty(skeleton: Skeleton) -> Diagram {
        Diagram { skeleton, trivalent: 0, legs: Vec::new(), pairing: Vec::new() }
    }

    pub fn skeleton(&self) -> Skeleton {
        self.skeleton
    }

    pub fn trivalent(&self) -> usize {
        self.trivalent
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn leg_count(&self) -> usize {
        self.legs.len()
    }

    pub fn degree(&self) -> usize {
        (self.trivalent + self.legs.len()) / 2
    }

    pub fn half_edges(&self) -> usize {
        self.pairing.len()
    }

    pub fn partner(&self, h: usize) -> usize {
        self.pairing[h]
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn leg_half_edge(&self, j: usize) -> usize {
        3 * self.trivalent + j
    }

    pub fn node(&self, h: usize) -> Node {
        if h < 3 * self.trivalent {
            Node::Vertex(h / 3, h % 3)
        } else {
            Node::Leg(h - 3 * self.trivalent)
        }
    }

    /// Edges as pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.pairing.len())
            .filter(|&h| h < self.pairing[h])
            .map(|h| (h, self.pairing[h]))
            .collect()
    }

    /// Leg indices on `component`, sorted by position.
    pub fn legs_on(&self, component: usize) -> Vec<usize> {
        let mut v: Vec<usize> =
            (0..self.legs.len()).filter(|&j| self.legs[j].component == component).collect();
        v.sort_by_key(|&j| self.legs[j].position);
        v
    }

    pub fn legs_per_component(&self) -> Vec<usize> {
        let mut counts = vec![0; self.skeleton.components()];
        for leg in &self.legs {
            counts[leg.component] += 1;
        }
        counts
    }

    /// Connected components of the dashed graph, as lists of nodes
    /// (trivalent vertices `0..T`, then legs as `T + j`).
    pub fn dashed_components(&self) -> Vec<Vec<usize>> {
        let t = self.trivalent;
        let nodes = t + self.legs.len();
        let node_of = |h: usize| if h < 3 * t { h / 3 } else { t + (h - 3 * t) };
        let mut seen = vec![false; nodes];
        let mut out = Vec::new();
        for start in 0..nodes {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                let hs: Vec<usize> = if x < t { vec![3 * x, 3 * x + 1, 3 * x + 2] } else { vec![3 * t + (x - t)] };
                for h in hs {
                    let y = node_of(self.pairing[h]);
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Connectivity of the dashed graph alone (the skeleton is ignored).
    pub fn is_connected(&self) -> bool {
        self.dashed_components().len() <= 1
    }

    fn check_components(&self) -> Result<()> {
        if self.skeleton == Skeleton::Empty {
            return Ok(());
        }
        let t = self.trivalent;
        for comp in self.dashed_components() {
            if comp.iter().all(|&x| x < t) {
                return Err(Error::invalid(format!(
                    "dashed component containing trivalent vertex {} has no univalent vertex",
                    comp[0]
                )));
            }
        }
        Ok(())
    }

    /// Full validation: matching, positions and the leg-per-component rule.
    pub fn validate(&self) -> Result<()> {
        let n = 3 * self.trivalent + self.legs.len();
        if self.pairing.len() != n {
            return Err(Error::invalid("pairing length does not match half-edge count"));
        }
        for h in 0..n {
            let p = self.pairing[h];
            if p >= n || p == h || self.pairing[p] != h {
                return Err(Error::invalid(format!("half-edge {h} is not properly matched")));
            }
        }
        Diagram::from_pairing(self.skeleton, self.trivalent, self.legs.clone(), self.pairing.clone())?;
        self.check_components()
    }

    /// Same diagram on another skeleton of the same component count
    /// (positions are kept; they are dropped when the target is open).
    pub(crate) fn reattach(&self, skeleton: Skeleton) -> Diagram {
        let mut d = self.clone();
        d.skeleton = skeleton;
        if !skeleton.has_positions() {
            for leg in &mut d.legs {
                leg.position = 0;
            }
        }
        d
    }
}

fn normalize_positions(legs: &mut [Leg]) -> Result<()> {
    let mut order: Vec<usize> = (0..legs.len()).collect();
    order.sort_by_key(|&j| (legs[j].component, legs[j].position));
    let mut ranks = vec![0; legs.len()];
    for w in 1..order.len() {
        let (prev, j) = (order[w - 1], order[w]);
        if legs[prev].component != legs[j].component {
            continue;
        }
        if legs[prev].position == legs[j].position {
            return Err(Error::invalid(format!(
                "legs {prev} and {j} share position {} on component {}",
                legs[j].position,
                legs[j].component + 1
            )));
        }
        ranks[j] = ranks[prev] + 1;
    }
    for (leg, r) in legs.iter_mut().zip(ranks) {
        leg.position = r;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> Diagram {
        Diagram::new(Skeleton::Empty, 2, vec![], &[(0, 3), (1, 5), (2, 4)]).unwrap()
    }

    #[test]
    fn theta_is_degree_one() {
        let d = theta();
        assert_eq!(d.degree(), 1);
        assert!(d.is_connected());
    }

    #[test]
    fn rejects_unmatched_half_edge() {
        let err = Diagram::new(Skeleton::Empty, 2, vec![], &[(0, 3), (1, 5)]).unwrap_err();
        assert!(err.to_string().contains("half-edge 2 is unmatched"), "{err}");
    }

    #[test]
    fn rejects_duplicate_position() {
        let legs = vec![Leg::on(0, 4), Leg::on(0, 4)];
        let err = Diagram::new(Skeleton::Circles(1), 0, legs, &[(0, 1)]).unwrap_err();
        assert!(err.to_string().contains("share position 4"), "{err}");
    }

    #[test]
    fn positions_become_ranks() {
        let legs = vec![Leg::on(0, 10), Leg::on(1, 3), Leg::on(0, 2), Leg::on(1, 7)];
        let d = Diagram::new(Skeleton::Intervals(2), 0, legs, &[(0, 1), (2, 3)]).unwrap();
        let pos: Vec<usize> = d.legs().iter().map(|l| l.position).collect();
        assert_eq!(pos, vec![1, 0, 0, 1]);
    }

    #[test]
    fn legless_component_on_skeleton_is_rejected() {
        // a chord on circle 1 plus a free theta
        let legs = vec![Leg::on(0, 0), Leg::on(0, 1)];
        let err =
            Diagram::new(Skeleton::Circles(1), 2, legs, &[(0, 3), (1, 5), (2, 4), (6, 7)]).unwrap_err();
        assert!(err.to_string().contains("no univalent vertex"), "{err}");
    }

    #[test]
    fn skeleton_parses() {
        assert_eq!("C3".parse::<Skeleton>().unwrap(), Skeleton::Circles(3));
        assert_eq!("I1".parse::<Skeleton>().unwrap(), Skeleton::Intervals(1));
        assert_eq!("empty".parse::<Skeleton>().unwrap(), Skeleton::Empty);
        assert!("C0".parse::<Skeleton>().is_err());
        assert!("X2".parse::<Skeleton>().is_err());
    }
}

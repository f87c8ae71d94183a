use rustc_hash::FxHashMap;

use super::{Diagram, Leg, Skeleton};
use crate::error::Result;

/// Gap between consecutive leg positions after `Builder::from_diagram`, so
/// that new legs can be inserted next to existing ones.
pub(crate) const GAP: usize = 64;

/// Mutable half-edge graph with free-form ids, compacted back into a
/// `Diagram` by `finish`.
#[derive(Clone, Debug)]
pub(crate) struct Builder {
    pub skeleton: Skeleton,
    /// Cyclic half-edge triples of the trivalent vertices.
    pub vertices: Vec<[usize; 3]>,
    /// Leg half-edge and attachment; positions only need to be ordered.
    pub legs: Vec<(usize, Leg)>,
    pub pair: FxHashMap<usize, usize>,
    next: usize,
}

impl Builder {
    pub fn from_diagram(d: &Diagram) -> Builder {
        let t = d.trivalent();
        let vertices = (0..t).map(|v| [3 * v, 3 * v + 1, 3 * v + 2]).collect();
        let legs = d
            .legs()
            .iter()
            .enumerate()
            .map(|(j, l)| (3 * t + j, Leg { component: l.component, position: l.position * GAP }))
            .collect();
        let pair = (0..d.half_edges()).map(|h| (h, d.partner(h))).collect();
        Builder { skeleton: d.skeleton(), vertices, legs, pair, next: d.half_edges() }
    }

    pub fn fresh(&mut self) -> usize {
        self.next += 1;
        self.next - 1
    }

    pub fn add_vertex(&mut self) -> [usize; 3] {
        let hs = [self.fresh(), self.fresh(), self.fresh()];
        self.vertices.push(hs);
        hs
    }

    pub fn add_leg(&mut self, leg: Leg) -> usize {
        let h = self.fresh();
        self.legs.push((h, leg));
        h
    }

    pub fn join(&mut self, a: usize, b: usize) {
        debug_assert_ne!(a, b);
        self.pair.insert(a, b);
        self.pair.insert(b, a);
    }

    pub fn partner(&self, h: usize) -> usize {
        self.pair[&h]
    }

    /// Removes the vertex owning half-edge `h` (if trivalent) from the
    /// vertex list; pairings are left for the caller to rewire.
    pub fn remove_vertex_of(&mut self, h: usize) -> [usize; 3] {
        let idx = self.vertices.iter().position(|hs| hs.contains(&h)).expect("not a vertex half-edge");
        self.vertices.remove(idx)
    }

    pub fn remove_leg(&mut self, h: usize) -> Leg {
        let idx = self.legs.iter().position(|&(x, _)| x == h).expect("not a leg half-edge");
        self.legs.remove(idx).1
    }

    /// Replaces a set of removed half-edges ("ports") by new ones: every
    /// port `old` becomes `new`, and whatever was attached to a port is
    /// attached to the replacement (ports attached to each other stay so).
    pub fn rewire(&mut self, ports: &[(usize, usize)]) {
        let map: FxHashMap<usize, usize> = ports.iter().copied().collect();
        let targets: Vec<(usize, usize)> = ports
            .iter()
            .map(|&(old, new)| {
                let p = self.pair[&old];
                (new, *map.get(&p).unwrap_or(&p))
            })
            .collect();
        for &(old, _) in ports {
            self.pair.remove(&old);
        }
        for (new, target) in targets {
            self.join(new, target);
        }
    }

    /// Compacts ids in list order. Validates without the leg-per-component
    /// rule (callers that can break it check separately).
    pub fn finish(&self) -> Result<Diagram> {
        let t = self.vertices.len();
        let mut id = FxHashMap::default();
        for (v, hs) in self.vertices.iter().enumerate() {
            for (s, &h) in hs.iter().enumerate() {
                id.insert(h, 3 * v + s);
            }
        }
        for (j, &(h, _)) in self.legs.iter().enumerate() {
            id.insert(h, 3 * t + j);
        }
        let n = 3 * t + self.legs.len();
        let mut pairing = vec![0; n];
        for (&h, &new) in &id {
            pairing[new] = id[&self.pair[&h]];
        }
        let legs = self.legs.iter().map(|&(_, l)| l).collect();
        Diagram::from_pairing(self.skeleton, t, legs, pairing)
    }
}

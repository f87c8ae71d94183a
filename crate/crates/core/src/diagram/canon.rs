//! Canonical labeling of diagrams up to isomorphism, with the AS sign.
//!
//! The search walks the diagram breadth-first from every admissible start,
//! branching on the orientation in which each newly reached trivalent vertex
//! is read (as-is or reflected). Each branch emits a token stream; the
//! lexicographically least stream is the canonical code, and the number of
//! reflections along the winning branch gives the sign. Branches whose
//! prefix is already larger than the best one are cut. Two winning branches
//! with different reflection parity exhibit an automorphism reversing an odd
//! number of cyclic orders, so the diagram is zero under AS.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::{Diagram, Leg, Skeleton};

const NONE: u32 = u32::MAX;

const K_REF: u16 = 0;
const K_NEW_VERTEX: u16 = 1 << 13;
const K_NEW_LEG: u16 = 2 << 13;
const K_END: u16 = 3 << 13;
const K_START: u16 = 4 << 13;

/// Slot tag for the skeleton successor of a leg.
const SKELETON_SLOT: u32 = 3;

/// A diagram in canonical labeling together with its canonical code.
/// Equality, ordering and hashing use the code only.
#[derive(Clone)]
pub struct CanonicalDiagram(Arc<Inner>);

struct Inner {
    key: Box<[u8]>,
    diagram: Diagram,
}

impl CanonicalDiagram {
    pub fn key(&self) -> &[u8] {
        &self.0.key
    }

    pub fn diagram(&self) -> &Diagram {
        &self.0.diagram
    }

    pub fn degree(&self) -> usize {
        self.0.diagram.degree()
    }

    pub fn skeleton(&self) -> Skeleton {
        self.0.diagram.skeleton()
    }

    pub fn trivalent(&self) -> usize {
        self.0.diagram.trivalent()
    }

    pub fn hex(&self) -> String {
        hex::encode(&self.0.key)
    }
}

impl PartialEq for CanonicalDiagram {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.key == other.0.key
    }
}

impl Eq for CanonicalDiagram {}

impl Hash for CanonicalDiagram {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.key.hash(state)
    }
}

impl PartialOrd for CanonicalDiagram {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalDiagram {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.key.cmp(&other.0.key)
    }
}

impl fmt::Debug for CanonicalDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalDiagram({}, deg {}, {})", self.skeleton(), self.degree(), self.hex())
    }
}

/// Result of canonicalization.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub diagram: CanonicalDiagram,
    /// `+1` or `-1` relating the input to the representative, `0` when the
    /// input equals its own negative under AS.
    pub sign: i8,
    /// Input half-edge id to representative half-edge id.
    pub relabel: Vec<usize>,
}

pub fn canonicalize(d: &Diagram) -> Canonical {
    let mut search = Search::new(d);
    let root = State::new(d);
    search.run(root);
    search.finish()
}

struct Best {
    tokens: Vec<u16>,
    flips: u32,
    label: Vec<u32>,
    slots: Vec<[u32; 3]>,
    origin: Vec<u32>,
}

struct Search<'a> {
    d: &'a Diagram,
    t: usize,
    /// (component, position) -> leg, for diagrams with positions.
    at: Vec<Vec<usize>>,
    best: Option<Best>,
    generation: u32,
    degenerate: bool,
}

#[derive(Clone)]
struct State {
    label: Vec<u32>,
    slots: Vec<[u32; 3]>,
    order: Vec<u32>,
    head: usize,
    tokens: Vec<u16>,
    cmp: Ordering,
    generation: u32,
    flips: u32,
    origin: Vec<u32>,
}

impl State {
    fn new(d: &Diagram) -> State {
        let t = d.trivalent();
        let nodes = t + d.leg_count();
        let m = d.skeleton().components();
        let mut tokens = vec![
            d.skeleton().code(),
            m as u16,
            t as u16,
            d.leg_count() as u16,
        ];
        tokens.extend(d.legs_per_component().iter().map(|&c| c as u16));
        State {
            label: vec![NONE; nodes],
            slots: vec![[NONE; 3]; t],
            order: Vec::with_capacity(nodes),
            head: 0,
            tokens,
            cmp: Ordering::Less,
            generation: 0,
            flips: 0,
            origin: vec![NONE; m],
        }
    }
}

enum Step {
    Continue,
    Pruned,
    /// A trivalent vertex was reached through half-edge `h`: branch on its
    /// orientation.
    Branch { node: usize, entry: usize },
}

impl<'a> Search<'a> {
    fn new(d: &'a Diagram) -> Search<'a> {
        let m = d.skeleton().components();
        let at = if d.skeleton().has_positions() { (0..m).map(|c| d.legs_on(c)).collect() } else { vec![Vec::new(); m] };
        Search { d, t: d.trivalent(), at, best: None, generation: 0, degenerate: false }
    }

    fn node_of(&self, h: usize) -> usize {
        if h < 3 * self.t {
            h / 3
        } else {
            self.t + (h - 3 * self.t)
        }
    }

    /// Appends a token, returning false if the branch can be cut.
    fn emit(&self, s: &mut State, tok: u16) -> bool {
        if let Some(best) = &self.best {
            if s.generation != self.generation {
                let n = s.tokens.len().min(best.tokens.len());
                s.cmp = s.tokens[..n].cmp(&best.tokens[..n]);
                s.generation = self.generation;
                if s.cmp == Ordering::Greater {
                    return false;
                }
            }
            if s.cmp == Ordering::Equal {
                let idx = s.tokens.len();
                match best.tokens.get(idx) {
                    Some(&b) if tok > b => return false,
                    Some(&b) if tok < b => s.cmp = Ordering::Less,
                    Some(_) => {}
                    None => return false,
                }
            }
        }
        s.tokens.push(tok);
        true
    }

    fn leg_token(&self, s: &mut State, j: usize) -> u16 {
        let leg = self.d.legs()[j];
        let rel = match self.d.skeleton() {
            Skeleton::Circles(_) => {
                let len = self.at[leg.component].len();
                if s.origin[leg.component] == NONE {
                    s.origin[leg.component] = leg.position as u32;
                }
                (leg.position + len - s.origin[leg.component] as usize) % len
            }
            Skeleton::Intervals(_) => leg.position,
            _ => 0,
        };
        debug_assert!(leg.component < 32 && rel < 256);
        K_NEW_LEG | ((leg.component as u16) << 8) | rel as u16
    }

    fn label_node(&self, s: &mut State, node: usize) {
        s.label[node] = s.order.len() as u32;
        s.order.push(node as u32);
    }

    /// Visits the far end of half-edge `h` (or the leg `succ` for skeleton
    /// successors).
    fn visit_half_edge(&self, s: &mut State, q: usize) -> Step {
        let y = self.node_of(q);
        if s.label[y] != NONE {
            let slot = if y < self.t {
                s.slots[y].iter().position(|&x| x as usize == q).unwrap() as u32
            } else {
                0
            };
            let tok = K_REF | ((s.label[y] << 2) | slot) as u16;
            return if self.emit(s, tok) { Step::Continue } else { Step::Pruned };
        }
        self.label_node(s, y);
        if y < self.t {
            if !self.emit(s, K_NEW_VERTEX) {
                return Step::Pruned;
            }
            Step::Branch { node: y, entry: q }
        } else {
            let tok = self.leg_token(s, y - self.t);
            if self.emit(s, tok) {
                Step::Continue
            } else {
                Step::Pruned
            }
        }
    }

    fn orient(&self, s: &mut State, node: usize, entry: usize, flip: bool) {
        let base = 3 * node;
        let r = entry - base;
        let a = base + (r + 1) % 3;
        let b = base + (r + 2) % 3;
        s.slots[node] = if flip { [entry as u32, b as u32, a as u32] } else { [entry as u32, a as u32, b as u32] };
        if flip {
            s.flips ^= 1;
        }
    }

    fn run(&mut self, mut s: State) {
        loop {
            if s.head == s.order.len() {
                if s.order.len() == s.label.len() {
                    self.leaf(s);
                    return;
                }
                self.restart(s);
                return;
            }
            let node = s.order[s.head] as usize;
            // Number of visits already done for this node is tracked by
            // splitting the node into per-slot steps.
            let visits: Vec<usize> = if node < self.t {
                s.slots[node].iter().map(|&h| self.d.partner(h as usize)).collect()
            } else {
                vec![self.d.partner(self.d.leg_half_edge(node - self.t))]
            };
            s.head += 1;
            match self.visit_all(s, node, visits) {
                Some(next) => s = next,
                None => return,
            }
        }
    }

    /// Processes the remaining visits of one node. Returns the state to
    /// continue with, or None if the branch was cut or fully explored
    /// recursively.
    fn visit_all(&mut self, mut s: State, node: usize, visits: Vec<usize>) -> Option<State> {
        for (i, &q) in visits.iter().enumerate() {
            match self.visit_half_edge(&mut s, q) {
                Step::Continue => {}
                Step::Pruned => return None,
                Step::Branch { node: y, entry } => {
                    let rest = visits[i + 1..].to_vec();
                    for flip in [false, true] {
                        let mut c = s.clone();
                        self.orient(&mut c, y, entry, flip);
                        if let Some(next) = self.visit_all(c, node, rest.clone()) {
                            self.run(next);
                        }
                    }
                    return None;
                }
            }
        }
        if node >= self.t {
            return self.skeleton_successor(s, node - self.t);
        }
        Some(s)
    }

    fn skeleton_successor(&mut self, mut s: State, j: usize) -> Option<State> {
        let leg = self.d.legs()[j];
        let next = match self.d.skeleton() {
            Skeleton::Circles(_) => {
                let on = &self.at[leg.component];
                Some(on[(leg.position + 1) % on.len()])
            }
            Skeleton::Intervals(_) => self.at[leg.component].get(leg.position + 1).copied(),
            _ => return Some(s),
        };
        let ok = match next {
            None => self.emit(&mut s, K_END),
            Some(k) => {
                let y = self.t + k;
                if s.label[y] != NONE {
                    let tok = K_REF | ((s.label[y] << 2) | SKELETON_SLOT) as u16;
                    self.emit(&mut s, tok)
                } else {
                    self.label_node(&mut s, y);
                    let tok = self.leg_token(&mut s, k);
                    self.emit(&mut s, tok)
                }
            }
        };
        ok.then_some(s)
    }

    fn restart(&mut self, mut s: State) {
        if !self.emit(&mut s, K_START) {
            return;
        }
        let legs = self.d.legs();
        let free: Vec<usize> = (0..legs.len()).filter(|&j| s.label[self.t + j] == NONE).collect();
        if !free.is_empty() {
            let candidates: Vec<usize> = match self.d.skeleton() {
                Skeleton::Intervals(_) => {
                    vec![*free.iter().min_by_key(|&&j| (legs[j].component, legs[j].position)).unwrap()]
                }
                _ => {
                    let c = free.iter().map(|&j| legs[j].component).min().unwrap();
                    free.into_iter().filter(|&j| legs[j].component == c).collect()
                }
            };
            for j in candidates {
                let mut c = s.clone();
                self.label_node(&mut c, self.t + j);
                let tok = self.leg_token(&mut c, j);
                if self.emit(&mut c, tok) {
                    self.run(c);
                }
            }
            return;
        }
        let free: Vec<usize> = (0..self.t).filter(|&v| s.label[v] == NONE).collect();
        for v in free {
            for entry in 3 * v..3 * v + 3 {
                for flip in [false, true] {
                    let mut c = s.clone();
                    self.label_node(&mut c, v);
                    if !self.emit(&mut c, K_NEW_VERTEX) {
                        continue;
                    }
                    self.orient(&mut c, v, entry, flip);
                    self.run(c);
                }
            }
        }
    }

    fn leaf(&mut self, mut s: State) {
        match &self.best {
            Some(best) => {
                if s.generation != self.generation {
                    s.cmp = s.tokens.cmp(&best.tokens);
                } else if s.cmp == Ordering::Equal && s.tokens.len() != best.tokens.len() {
                    s.cmp = s.tokens.len().cmp(&best.tokens.len());
                }
                match s.cmp {
                    Ordering::Greater => {}
                    Ordering::Equal => {
                        if s.flips != best.flips {
                            self.degenerate = true;
                        }
                    }
                    Ordering::Less => self.replace(s),
                }
            }
            None => self.replace(s),
        }
    }

    fn replace(&mut self, s: State) {
        self.generation += 1;
        self.degenerate = false;
        self.best = Some(Best { tokens: s.tokens, flips: s.flips, label: s.label, slots: s.slots, origin: s.origin });
    }

    fn finish(self) -> Canonical {
        let d = self.d;
        let t = self.t;
        let best = self.best.expect("search always reaches a leaf");
        let nodes = best.label.len();
        let mut by_label = vec![0usize; nodes];
        for (node, &l) in best.label.iter().enumerate() {
            by_label[l as usize] = node;
        }
        let mut relabel = vec![0usize; d.half_edges()];
        let mut new_legs = Vec::with_capacity(d.leg_count());
        let (mut next_v, mut next_l) = (0usize, 0usize);
        for &node in &by_label {
            if node < t {
                for (slot, &h) in best.slots[node].iter().enumerate() {
                    relabel[h as usize] = 3 * next_v + slot;
                }
                next_v += 1;
            } else {
                let j = node - t;
                relabel[d.leg_half_edge(j)] = 3 * t + next_l;
                let leg = d.legs()[j];
                let position = match d.skeleton() {
                    Skeleton::Circles(_) => {
                        let len = self.at[leg.component].len();
                        (leg.position + len - best.origin[leg.component] as usize) % len
                    }
                    _ => leg.position,
                };
                new_legs.push(Leg { component: leg.component, position });
                next_l += 1;
            }
        }
        let mut pairing = vec![0usize; d.half_edges()];
        for h in 0..d.half_edges() {
            pairing[relabel[h]] = relabel[d.partner(h)];
        }
        let rep = Diagram::from_parts_unchecked(d.skeleton(), t, new_legs, pairing);
        let key: Vec<u8> = best.tokens.iter().flat_map(|t| t.to_be_bytes()).collect();
        let sign = if self.degenerate {
            0
        } else if best.flips == 0 {
            1
        } else {
            -1
        };
        Canonical {
            diagram: CanonicalDiagram(Arc::new(Inner { key: key.into_boxed_slice(), diagram: rep })),
            sign,
            relabel,
        }
    }
}

/// Reverses the cyclic order at trivalent vertex `v`.
pub fn reflect_vertex(d: &Diagram, v: usize) -> Diagram {
    let t = d.trivalent();
    // swap slots 1 and 2 of v
    let swap = |h: usize| -> usize {
        if h == 3 * v + 1 {
            3 * v + 2
        } else if h == 3 * v + 2 {
            3 * v + 1
        } else {
            h
        }
    };
    let mut pairing = vec![0; d.half_edges()];
    for h in 0..d.half_edges() {
        pairing[swap(h)] = swap(d.partner(h));
    }
    Diagram::from_parts_unchecked(d.skeleton(), t, d.legs().to_vec(), pairing)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> Diagram {
        Diagram::new(Skeleton::Empty, 2, vec![], &[(0, 3), (1, 5), (2, 4)]).unwrap()
    }

    #[test]
    fn theta_reflected_once_flips_sign() {
        let d = theta();
        let c = canonicalize(&d);
        assert_ne!(c.sign, 0);
        let r = canonicalize(&reflect_vertex(&d, 0));
        assert_eq!(r.diagram, c.diagram);
        assert_eq!(r.sign, -c.sign);
    }

    #[test]
    fn representative_is_a_fixed_point() {
        let c = canonicalize(&theta());
        let again = canonicalize(c.diagram.diagram());
        assert_eq!(again.diagram, c.diagram);
        assert_eq!(again.sign, 1);
    }

    #[test]
    fn loop_with_leg_is_degenerate() {
        let d = Diagram::new(Skeleton::Colors(1), 1, vec![Leg::color(0)], &[(0, 3), (1, 2)]).unwrap();
        assert_eq!(canonicalize(&d).sign, 0);
    }

    #[test]
    fn circle_rotation_is_invisible() {
        // chords (0,2) and (1,3) on one circle, written from two starting points
        let a = Diagram::new(
            Skeleton::Circles(1),
            0,
            (0..4).map(|p| Leg::on(0, p)).collect(),
            &[(0, 2), (1, 3)],
        )
        .unwrap();
        let b = Diagram::new(
            Skeleton::Circles(1),
            0,
            vec![Leg::on(0, 1), Leg::on(0, 2), Leg::on(0, 3), Leg::on(0, 0)],
            &[(0, 2), (1, 3)],
        )
        .unwrap();
        assert_eq!(canonicalize(&a).diagram, canonicalize(&b).diagram);
    }

    #[test]
    fn interval_order_is_visible() {
        // chord (0,1) then chord (2,3) vs. nested chords
        let a = Diagram::new(
            Skeleton::Intervals(1),
            0,
            (0..4).map(|p| Leg::on(0, p)).collect(),
            &[(0, 1), (2, 3)],
        )
        .unwrap();
        let b = Diagram::new(
            Skeleton::Intervals(1),
            0,
            (0..4).map(|p| Leg::on(0, p)).collect(),
            &[(0, 3), (1, 2)],
        )
        .unwrap();
        assert_ne!(canonicalize(&a).diagram, canonicalize(&b).diagram);
    }

    #[test]
    fn relabel_maps_pairing() {
        let d = theta();
        let c = canonicalize(&d);
        let rep = c.diagram.diagram();
        for h in 0..d.half_edges() {
            assert_eq!(rep.partner(c.relabel[h]), c.relabel[d.partner(h)]);
        }
    }
}

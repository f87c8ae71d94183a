//! Local relations among diagrams.
//!
//! Conventions: a trivalent vertex with cyclic order (h, a, b), `h` attached
//! to the skeleton, satisfies S = T − U where T has the legs of `a` and `b`
//! in that order along the skeleton and U has them swapped. An internal
//! edge between u = (e, A, B) and w = (e, C, D) gives I − H + X with
//! H = (e, B, C)(e, D, A) and X = (e, A, C)(e, D, B).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rustc_hash::FxHashSet;

use crate::diagram::enumerate::{merge_legs, mergeable_pairs};
use crate::diagram::{reflect_vertex, Builder, CanonicalDiagram, Diagram, Leg, Node, Skeleton};
use crate::error::{Error, Result};
use crate::vector::{q, DiagramVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    Stu,
    Fi,
    As,
    Ihx,
}

impl RelationKind {
    pub const ALL: [RelationKind; 4] = [RelationKind::Stu, RelationKind::Fi, RelationKind::As, RelationKind::Ihx];

    pub fn applies_to(self, skeleton: Skeleton) -> bool {
        match self {
            RelationKind::Stu | RelationKind::Fi => skeleton.has_positions(),
            RelationKind::As | RelationKind::Ihx => true,
        }
    }

    pub fn check(self, skeleton: Skeleton) -> Result<()> {
        if self.applies_to(skeleton) {
            Ok(())
        } else {
            Err(Error::InapplicableRelation { kind: self.to_string(), skeleton: skeleton.to_string() })
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationKind::Stu => "STU",
            RelationKind::Fi => "FI",
            RelationKind::As => "AS",
            RelationKind::Ihx => "IHX",
        })
    }
}

impl FromStr for RelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "STU" => Ok(RelationKind::Stu),
            "FI" => Ok(RelationKind::Fi),
            "AS" => Ok(RelationKind::As),
            "IHX" => Ok(RelationKind::Ihx),
            _ => Err(Error::pre(format!("unknown relation kind {s:?}"))),
        }
    }
}

/// A sorted set of relation kinds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationSet(Vec<RelationKind>);

impl RelationSet {
    pub fn new(kinds: impl IntoIterator<Item = RelationKind>) -> RelationSet {
        let mut v: Vec<RelationKind> = kinds.into_iter().collect();
        v.sort();
        v.dedup();
        RelationSet(v)
    }

    pub fn stu_fi() -> RelationSet {
        RelationSet::new([RelationKind::Stu, RelationKind::Fi])
    }

    pub fn as_ihx() -> RelationSet {
        RelationSet::new([RelationKind::As, RelationKind::Ihx])
    }

    /// The relations defining the space for a skeleton.
    pub fn default_for(skeleton: Skeleton) -> RelationSet {
        if skeleton.has_positions() {
            RelationSet::stu_fi()
        } else {
            RelationSet::as_ihx()
        }
    }

    pub fn kinds(&self) -> &[RelationKind] {
        &self.0
    }

    pub fn contains(&self, k: RelationKind) -> bool {
        self.0.contains(&k)
    }
}

impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        f.write_str(&names.join("+"))
    }
}

impl FromStr for RelationSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kinds = s.split(['+', ',']).filter(|p| !p.is_empty()).map(str::parse).collect::<Result<Vec<_>>>()?;
        Ok(RelationSet::new(kinds))
    }
}

/// Every instance of `kind` having `d` among its terms (before sign
/// normalization). AS instances are included even though they vanish.
pub fn instances_at(kind: RelationKind, d: &Diagram) -> Vec<DiagramVector> {
    match kind {
        RelationKind::Stu => {
            let mut out = stu_from_pairs(d);
            out.extend(stu_from_vertices(d));
            out
        }
        RelationKind::Fi => fi_at(d).into_iter().collect(),
        RelationKind::As => (0..d.trivalent())
            .map(|v| {
                let mut x = DiagramVector::from_diagram(d);
                x.add_diagram(&reflect_vertex(d, v), &q(1));
                x
            })
            .collect(),
        RelationKind::Ihx => ihx_at(d),
    }
}

/// All instances of `kind` touching the given diagrams, each nonzero
/// instance emitted once up to scalar. Zero vectors are dropped.
pub fn relation_instances(kind: RelationKind, skeleton: Skeleton, generators: &[CanonicalDiagram]) -> Result<Vec<DiagramVector>> {
    kind.check(skeleton)?;
    if let Some(c) = generators.iter().find(|c| c.skeleton() != skeleton) {
        return Err(Error::SkeletonMismatch(format!("generator on {} in a context on {skeleton}", c.skeleton())));
    }
    let per: Vec<Vec<DiagramVector>> = generators.par_iter().map(|c| instances_at(kind, c.diagram())).collect();
    Ok(dedup_up_to_scalar(per.into_iter().flatten()))
}

pub(crate) fn dedup_up_to_scalar(it: impl IntoIterator<Item = DiagramVector>) -> Vec<DiagramVector> {
    let mut seen = FxHashSet::default();
    let mut out = Vec::new();
    for v in it {
        if v.is_zero() {
            continue;
        }
        let p = v.primitive();
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

fn swap_legs(d: &Diagram, x: usize, y: usize) -> Diagram {
    let mut legs = d.legs().to_vec();
    let (px, py) = (legs[x].position, legs[y].position);
    legs[x].position = py;
    legs[y].position = px;
    Diagram::from_parts_unchecked(d.skeleton(), d.trivalent(), legs, d.pairing().to_vec())
}

/// S − T + U with `d` as T, for every pair of neighboring legs.
fn stu_from_pairs(d: &Diagram) -> Vec<DiagramVector> {
    let mut out = Vec::new();
    for (x, y) in mergeable_pairs(d) {
        let mut v = DiagramVector::from_diagram(&merge_legs(d, x, y));
        v.add_diagram(d, &q(-1));
        v.add_diagram(&swap_legs(d, x, y), &q(1));
        out.push(v);
    }
    out
}

/// S − T + U with `d` as S, for every vertex slot attached to a leg.
fn stu_from_vertices(d: &Diagram) -> Vec<DiagramVector> {
    let mut out = Vec::new();
    for v in 0..d.trivalent() {
        for s in 0..3 {
            let h = 3 * v + s;
            let Node::Leg(j) = d.node(d.partner(h)) else { continue };
            let (t, u) = unmerge(d, v, s, j);
            let mut r = DiagramVector::from_diagram(d);
            r.add_diagram(&t, &q(-1));
            r.add_diagram(&u, &q(1));
            out.push(r);
        }
    }
    out
}

/// Undoes a merge at vertex `v` whose slot `s` holds leg `j`; returns
/// (T, U).
fn unmerge(d: &Diagram, v: usize, s: usize, j: usize) -> (Diagram, Diagram) {
    let build = |first_low: bool| {
        let mut b = Builder::from_diagram(d);
        let hl = d.leg_half_edge(j);
        let leg = b.remove_leg(hl);
        b.remove_vertex_of(3 * v);
        let (lo, hi) = (leg.position, leg.position + 1);
        let (pa, pb) = if first_low { (lo, hi) } else { (hi, lo) };
        let xa = b.add_leg(Leg::on(leg.component, pa));
        let xb = b.add_leg(Leg::on(leg.component, pb));
        let a = 3 * v + (s + 1) % 3;
        let c = 3 * v + (s + 2) % 3;
        b.pair.remove(&hl);
        b.pair.remove(&(3 * v + s));
        b.rewire(&[(a, xa), (c, xb)]);
        b.finish().expect("unmerge keeps a valid diagram")
    };
    (build(true), build(false))
}

fn fi_at(d: &Diagram) -> Option<DiagramVector> {
    let s = d.skeleton();
    for c in 0..s.components() {
        let on = d.legs_on(c);
        let n = on.len();
        for p in 0..n {
            if p + 1 == n && !(s.is_cyclic() && n > 1) {
                continue;
            }
            let (x, y) = (on[p], on[(p + 1) % n]);
            if x != y && d.partner(d.leg_half_edge(x)) == d.leg_half_edge(y) {
                return Some(DiagramVector::from_diagram(d));
            }
        }
    }
    None
}

/// The three ways of joining ends A, B, C, D through an edge `e`.
fn ihx_at(d: &Diagram) -> Vec<DiagramVector> {
    let mut out = Vec::new();
    for (hu, hw) in d.edges() {
        let (Node::Vertex(u, su), Node::Vertex(w, sw)) = (d.node(hu), d.node(hw)) else { continue };
        if u == w {
            continue;
        }
        let ends = [3 * u + (su + 1) % 3, 3 * u + (su + 2) % 3, 3 * w + (sw + 1) % 3, 3 * w + (sw + 2) % 3];
        let [a, b, c, dd] = ends;
        let shape = |x: [usize; 2], y: [usize; 2]| -> Diagram {
            let mut bl = Builder::from_diagram(d);
            bl.remove_vertex_of(3 * u);
            bl.remove_vertex_of(3 * w);
            bl.pair.remove(&hu);
            bl.pair.remove(&hw);
            let vx = bl.add_vertex();
            let vy = bl.add_vertex();
            bl.rewire(&[(x[0], vx[1]), (x[1], vx[2]), (y[0], vy[1]), (y[1], vy[2])]);
            bl.join(vx[0], vy[0]);
            bl.finish().expect("IHX keeps a valid diagram")
        };
        let mut v = DiagramVector::from_diagram(&shape([a, b], [c, dd]));
        v.add_diagram(&shape([b, c], [dd, a]), &q(-1));
        v.add_diagram(&shape([a, c], [dd, b]), &q(1));
        out.push(v);
    }
    out
}

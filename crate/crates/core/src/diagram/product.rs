//! Disjoint union, stacking and relabeling of components.

use super::{Diagram, Leg, Skeleton};
use crate::error::{Error, Result};
use crate::vector::DiagramVector;

/// Places `b` next to `a`. On intervals, `b`'s legs go after (above) all
/// of `a`'s legs on each interval.
pub(crate) fn juxtapose(a: &Diagram, b: &Diagram) -> Diagram {
    let (ta, tb) = (a.trivalent(), b.trivalent());
    let (la, lb) = (a.leg_count(), b.leg_count());
    let t = ta + tb;
    let skeleton = if a.skeleton().components() >= b.skeleton().components() { a.skeleton() } else { b.skeleton() };
    let map_a = |h: usize| if h < 3 * ta { h } else { 3 * t + (h - 3 * ta) };
    let map_b = |h: usize| if h < 3 * tb { 3 * ta + h } else { 3 * t + la + (h - 3 * tb) };
    let mut pairing = vec![0; 3 * t + la + lb];
    for h in 0..a.half_edges() {
        pairing[map_a(h)] = map_a(a.partner(h));
    }
    for h in 0..b.half_edges() {
        pairing[map_b(h)] = map_b(b.partner(h));
    }
    let offset = a.legs_per_component();
    let mut legs: Vec<Leg> = a.legs().to_vec();
    legs.extend(b.legs().iter().map(|l| {
        let shift = offset.get(l.component).copied().unwrap_or(0);
        Leg { component: l.component, position: if skeleton.has_positions() { l.position + shift } else { 0 } }
    }));
    Diagram::from_parts_unchecked(skeleton, t, legs, pairing)
}

/// Disjoint union of open (or closed) diagrams, extended bilinearly.
pub fn disjoint_union(a: &DiagramVector, b: &DiagramVector) -> Result<DiagramVector> {
    let sa = common_skeleton(a)?;
    let sb = common_skeleton(b)?;
    if let (Some(x), Some(y)) = (sa, sb) {
        if x != y {
            return Err(Error::SkeletonMismatch(format!("disjoint union of {x} and {y}")));
        }
        if x.has_positions() {
            return Err(Error::SkeletonMismatch(format!("disjoint union needs open or closed diagrams, got {x}")));
        }
    }
    Ok(bilinear(a, b))
}

/// Stacking product on intervals: `a` below `b`.
pub fn stack(a: &DiagramVector, b: &DiagramVector) -> Result<DiagramVector> {
    let sa = common_skeleton(a)?;
    let sb = common_skeleton(b)?;
    for s in [sa, sb].into_iter().flatten() {
        if !matches!(s, Skeleton::Intervals(_)) {
            return Err(Error::SkeletonMismatch(format!("stacking needs intervals, got {s}")));
        }
    }
    if let (Some(x), Some(y)) = (sa, sb) {
        if x != y {
            return Err(Error::SkeletonMismatch(format!("stacking {x} on {y}")));
        }
    }
    Ok(bilinear(a, b))
}

fn bilinear(a: &DiagramVector, b: &DiagramVector) -> DiagramVector {
    let mut out = DiagramVector::zero();
    for (ca, xa) in a.iter() {
        for (cb, xb) in b.iter() {
            out.add_diagram(&juxtapose(ca.diagram(), cb.diagram()), &(xa * xb));
        }
    }
    out
}

pub(crate) fn common_skeleton(v: &DiagramVector) -> Result<Option<Skeleton>> {
    let mut it = v.support().map(|c| c.skeleton());
    let Some(first) = it.next() else { return Ok(None) };
    for s in it {
        if s != first {
            return Err(Error::SkeletonMismatch(format!("vector mixes {first} and {s}")));
        }
    }
    Ok(Some(first))
}

/// Relabels components (or colors): component `c` becomes `eta[c]`
/// (zero-based).
pub fn permute_components(d: &Diagram, eta: &[usize]) -> Result<Diagram> {
    let m = d.skeleton().components();
    check_permutation(eta, m)?;
    let legs = d.legs().iter().map(|l| Leg { component: eta[l.component], position: l.position }).collect();
    Ok(Diagram::from_parts_unchecked(d.skeleton(), d.trivalent(), legs, d.pairing().to_vec()))
}

pub fn permute_colors(x: &DiagramVector, eta: &[usize]) -> Result<DiagramVector> {
    x.try_map_linear(|c| Ok(DiagramVector::from_diagram(&permute_components(c.diagram(), eta)?)))
}

pub(crate) fn check_permutation(eta: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if eta.len() != m {
        return Err(Error::pre(format!("permutation has {} entries, expected {m}", eta.len())));
    }
    for &e in eta {
        if e >= m || seen[e] {
            return Err(Error::pre(format!("{eta:?} is not a permutation of {m} elements")));
        }
        seen[e] = true;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::q;

    fn tripod(a: usize, b: usize, c: usize) -> Diagram {
        Diagram::new(Skeleton::Colors(3), 1, vec![Leg::color(a), Leg::color(b), Leg::color(c)], &[(0, 3), (1, 4), (2, 5)])
            .unwrap()
    }

    fn chord_on(m: usize, i: usize, j: usize) -> Diagram {
        let legs = if i == j { vec![Leg::on(i, 0), Leg::on(i, 1)] } else { vec![Leg::on(i, 0), Leg::on(j, 0)] };
        Diagram::new(Skeleton::Intervals(m), 0, legs, &[(0, 1)]).unwrap()
    }

    #[test]
    fn union_with_empty_is_identity() {
        let a = DiagramVector::from_diagram(&tripod(0, 1, 2));
        let e = DiagramVector::from_diagram(&Diagram::empty(Skeleton::Colors(3)));
        assert_eq!(disjoint_union(&a, &e).unwrap(), a);
    }

    #[test]
    fn union_is_commutative() {
        let a = DiagramVector::from_diagram(&tripod(0, 1, 2));
        let b = DiagramVector::from_diagram(&tripod(0, 0, 2));
        assert_eq!(disjoint_union(&a, &b).unwrap(), disjoint_union(&b, &a).unwrap());
    }

    #[test]
    fn two_tripods_have_two_legs_per_color() {
        let a = DiagramVector::from_diagram(&tripod(0, 1, 2));
        let u = disjoint_union(&a, &a).unwrap();
        assert_eq!(u.len(), 1);
        let (c, x) = u.iter().next().unwrap();
        assert_eq!(x, &q(1));
        assert_eq!(c.degree(), 4);
        assert_eq!(c.diagram().legs_per_component(), vec![2, 2, 2]);
    }

    #[test]
    fn stack_puts_first_factor_below() {
        let a = DiagramVector::from_diagram(&chord_on(1, 0, 0));
        let s = stack(&a, &a).unwrap();
        // two unnested chords: positions (0,1) and (2,3)
        let d = s.support().next().unwrap().diagram();
        let mut pairs: Vec<(usize, usize)> = (0..4)
            .map(|j| {
                let h = d.leg_half_edge(j);
                let k = d.partner(h) - 3 * d.trivalent();
                (d.legs()[j].position, d.legs()[k].position)
            })
            .collect();
        pairs.sort();
        assert_eq!(pairs, vec![(0, 1), (1, 0), (2, 3), (3, 2)]);
    }

    #[test]
    fn stack_with_unit() {
        let a = DiagramVector::from_diagram(&chord_on(2, 0, 1));
        let one = DiagramVector::from_diagram(&Diagram::empty(Skeleton::Intervals(2)));
        assert_eq!(stack(&a, &one).unwrap(), a);
        assert_eq!(stack(&one, &a).unwrap(), a);
    }

    #[test]
    fn swapping_colors_of_a_tripod() {
        let a = DiagramVector::from_diagram(&tripod(0, 1, 2));
        let swapped = permute_colors(&a, &[1, 0, 2]).unwrap();
        assert_eq!(swapped, DiagramVector::from_diagram(&tripod(1, 0, 2)));
        assert_eq!(swapped, -&a);
        assert_eq!(permute_colors(&swapped, &[1, 0, 2]).unwrap(), a);
    }

    #[test]
    fn rejects_non_permutation() {
        let a = DiagramVector::from_diagram(&tripod(0, 1, 2));
        assert!(permute_colors(&a, &[0, 0, 2]).is_err());
        assert!(permute_colors(&a, &[0, 1]).is_err());
    }
}

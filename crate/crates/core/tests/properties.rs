use std::sync::OnceLock;

use jd_core::diagram::enumerate::{enumerate, Constraints};
use jd_core::diagram::product::{disjoint_union, permute_colors, permute_components, stack};
use jd_core::maps::{chi, close, permutations};
use jd_core::{canonicalize, CanonicalDiagram, Diagram, DiagramVector, Leg, Skeleton};
use proptest::prelude::*;

fn pool() -> &'static Vec<CanonicalDiagram> {
    static POOL: OnceLock<Vec<CanonicalDiagram>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = Vec::new();
        for m in 1..=3 {
            for k in 0..=3 {
                for s in [Skeleton::Circles(m), Skeleton::Intervals(m), Skeleton::Colors(m)] {
                    out.extend(enumerate(s, k, &Constraints::default(), None).unwrap());
                }
            }
        }
        for k in 1..=3 {
            out.extend(enumerate(Skeleton::Empty, k, &Constraints::default(), None).unwrap());
        }
        out
    })
}

fn intervals(m: usize, max: usize) -> Vec<DiagramVector> {
    (0..=max)
        .flat_map(|k| enumerate(Skeleton::Intervals(m), k, &Constraints::default(), None).unwrap())
        .map(|c| DiagramVector::basis(&c))
        .collect()
}

/// Relabels vertices, legs and the cyclic orders at vertices; returns the
/// new diagram and the number of orientation reversals.
fn relabel(d: &Diagram, vperm: &[usize], rot: &[(usize, bool)], lperm: &[usize]) -> (Diagram, usize) {
    let t = d.trivalent();
    let map = |h: usize| -> usize {
        if h < 3 * t {
            let (v, s) = (h / 3, h % 3);
            let (r, flip) = rot[v];
            let s = if flip { (3 - s) % 3 } else { s };
            3 * vperm[v] + (s + r) % 3
        } else {
            3 * t + lperm[h - 3 * t]
        }
    };
    let edges: Vec<(usize, usize)> = d.edges().into_iter().map(|(a, b)| (map(a), map(b))).collect();
    let mut legs = vec![Leg::on(0, 0); d.leg_count()];
    for (j, l) in d.legs().iter().enumerate() {
        legs[lperm[j]] = *l;
    }
    let flips = rot.iter().filter(|x| x.1).count();
    (Diagram::new(d.skeleton(), t, legs, &edges).unwrap(), flips)
}

fn shuffle(seed: u64, n: usize) -> Vec<usize> {
    let all = n.min(5);
    let perms = permutations(all);
    let p = &perms[(seed as usize) % perms.len()];
    let mut out: Vec<usize> = p.clone();
    out.extend(all..n);
    out.rotate_left(if n == 0 { 0 } else { (seed as usize / 7) % n });
    out
}

#[test]
fn canonical_representatives_are_fixed_points() {
    for c in pool() {
        let again = canonicalize(c.diagram());
        assert_eq!(again.sign, 1);
        assert_eq!(&again.diagram, c);
    }
}

#[test]
fn degree_census() {
    for c in pool() {
        let d = c.diagram();
        assert_eq!(d.trivalent() + d.leg_count(), 2 * d.degree());
    }
}

#[test]
fn union_commutes_and_stack_associates() {
    let open: Vec<DiagramVector> = (0..=2)
        .flat_map(|k| enumerate(Skeleton::Colors(2), k, &Constraints::default(), None).unwrap())
        .map(|c| DiagramVector::basis(&c))
        .collect();
    for a in &open {
        for b in &open {
            assert_eq!(disjoint_union(a, b).unwrap(), disjoint_union(b, a).unwrap());
        }
    }
    let xs = intervals(2, 1);
    for a in &xs {
        for b in &xs {
            for c in &xs {
                let l = stack(&stack(a, b).unwrap(), c).unwrap();
                let r = stack(a, &stack(b, c).unwrap()).unwrap();
                assert_eq!(l, r);
            }
        }
    }
}

#[test]
fn maps_commute_with_relabeling_colors() {
    let open: Vec<DiagramVector> = (0..=3)
        .flat_map(|k| enumerate(Skeleton::Colors(3), k, &Constraints::default(), None).unwrap())
        .map(|c| DiagramVector::basis(&c))
        .collect();
    for eta in permutations(3) {
        for x in &open {
            let moved = permute_colors(x, &eta).unwrap();
            let lhs = permute_colors(&chi(x, 3).unwrap(), &eta).unwrap();
            assert_eq!(lhs, chi(&moved, 3).unwrap());
            let y = chi(x, 3).unwrap();
            assert_eq!(permute_colors(&close(&y).unwrap(), &eta).unwrap(), close(&permute_colors(&y, &eta).unwrap()).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, ..ProptestConfig::default() })]

    #[test]
    fn relabeling_preserves_the_canonical_form(idx in any::<prop::sample::Index>(), seed in any::<u64>(), rots in prop::collection::vec((0usize..3, any::<bool>()), 8)) {
        let c = idx.get(pool());
        let d = c.diagram();
        let t = d.trivalent();
        let vperm = shuffle(seed, t);
        let lperm = shuffle(seed.rotate_left(17), d.leg_count());
        let (e, flips) = relabel(d, &vperm, &rots[..t], &lperm);
        let got = canonicalize(&e);
        prop_assert_eq!(&got.diagram, c);
        prop_assert_eq!(got.sign, if flips % 2 == 0 { 1 } else { -1 });
    }

    #[test]
    fn relabel_maps_into_the_representative(idx in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let c = idx.get(pool());
        let d = c.diagram();
        let lperm = shuffle(seed, d.leg_count());
        let (e, _) = relabel(d, &(0..d.trivalent()).collect::<Vec<_>>(), &vec![(0, false); d.trivalent()], &lperm);
        let can = canonicalize(&e);
        let rep = can.diagram.diagram();
        for h in 0..e.half_edges() {
            prop_assert_eq!(can.relabel[e.partner(h)], rep.partner(can.relabel[h]));
        }
    }

    #[test]
    fn component_permutation_is_an_action(idx in any::<prop::sample::Index>(), a in 0usize..6, b in 0usize..6) {
        let c = idx.get(pool());
        let d = c.diagram();
        let m = d.skeleton().components();
        prop_assume!(m == 3 && d.skeleton() != Skeleton::Empty);
        let ps = permutations(3);
        let (p, q) = (&ps[a], &ps[b]);
        let pq: Vec<usize> = (0..3).map(|i| q[p[i]]).collect();
        let two = permute_components(&permute_components(d, p).unwrap(), q).unwrap();
        prop_assert_eq!(DiagramVector::from_diagram(&two), DiagramVector::from_diagram(&permute_components(d, &pq).unwrap()));
    }
}

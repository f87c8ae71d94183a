use jd_core::diagram::enumerate::{enumerate, Constraints};
use jd_core::diagram::product::{disjoint_union, stack};
use jd_core::maps::*;
use jd_core::vector::{frac, q};
use jd_core::{canonicalize, ContextSpec, Diagram, DiagramVector, Leg, QuotientContext, RelationKind, RelationSet, Skeleton};

fn v(d: &Diagram) -> DiagramVector {
    DiagramVector::from_diagram(d)
}

fn tripod(legs: [Leg; 3], skeleton: Skeleton) -> Diagram {
    Diagram::new(skeleton, 1, legs.to_vec(), &[(0, 3), (1, 4), (2, 5)]).unwrap()
}

fn theta() -> Diagram {
    Diagram::new(Skeleton::Empty, 2, vec![], &[(0, 3), (1, 4), (2, 5)]).unwrap()
}

fn chord(skeleton: Skeleton, a: (usize, usize), b: (usize, usize)) -> Diagram {
    Diagram::new(skeleton, 0, vec![Leg::on(a.0, a.1), Leg::on(b.0, b.1)], &[(0, 1)]).unwrap()
}

#[test]
fn chi_of_tripod_is_one_diagram() {
    let t = v(&tripod([Leg::color(0), Leg::color(1), Leg::color(2)], Skeleton::Colors(3)));
    let y = chi(&t, 3).unwrap();
    let expect = v(&tripod([Leg::on(0, 0), Leg::on(1, 0), Leg::on(2, 0)], Skeleton::Intervals(3)));
    assert_eq!(y, expect);
}

#[test]
fn chi_averages_orderings() {
    let struts = Diagram::new(Skeleton::Colors(1), 0, vec![Leg::color(0); 4], &[(0, 1), (2, 3)]).unwrap();
    let y = chi(&v(&struts), 1).unwrap();
    assert_eq!(y.len(), 3);
    assert!(y.iter().all(|(_, x)| *x == frac(1, 3)));
}

#[test]
fn pbw_inverse_of_tripod_round_trips() {
    let t = v(&tripod([Leg::color(0), Leg::color(1), Leg::color(2)], Skeleton::Colors(3)));
    assert_eq!(pbw_inverse(&chi(&t, 3).unwrap()).unwrap(), t);
}

#[test]
fn pbw_inverse_two_legs_on_one_string() {
    // caterpillar: a, b at vertex 0 and c, d at vertex 1; a before c on string 1
    let legs = vec![Leg::on(0, 0), Leg::on(1, 0), Leg::on(0, 1), Leg::on(2, 0)];
    let t = Diagram::new(Skeleton::Intervals(3), 2, legs, &[(2, 5), (0, 6), (1, 7), (3, 8), (4, 9)]).unwrap();
    // merged: new vertex (new leg, a side, c side)
    let legs = vec![Leg::on(0, 0), Leg::on(1, 0), Leg::on(2, 0)];
    let s = Diagram::new(Skeleton::Intervals(3), 3, legs, &[(2, 5), (0, 7), (3, 8), (6, 9), (1, 10), (4, 11)]).unwrap();
    let forget_t = v(&t.reattach_open());
    let forget_s = v(&s.reattach_open());
    assert!(!forget_t.is_zero() && !forget_s.is_zero());
    let mut expect = forget_t.clone();
    expect.add_scaled(&forget_s, &frac(1, 2));
    assert_eq!(pbw_inverse(&v(&t)).unwrap(), expect);
}

trait Open {
    fn reattach_open(&self) -> Diagram;
}

impl Open for Diagram {
    fn reattach_open(&self) -> Diagram {
        let m = self.skeleton().components();
        let legs = self.legs().iter().map(|l| Leg::color(l.component)).collect();
        let edges = self.edges();
        Diagram::new(Skeleton::Colors(m), self.trivalent(), legs, &edges).unwrap()
    }
}

#[test]
fn pbw_round_trips_on_small_spaces() {
    for m in 1..=2 {
        for k in 0..=2 {
            let spec = ContextSpec::new(Skeleton::Intervals(m), k, RelationSet::new([RelationKind::Stu]));
            let ctx = QuotientContext::full(spec, None).unwrap();
            for c in ctx.generators() {
                let y = DiagramVector::basis(c);
                let back = chi(&pbw_inverse(&y).unwrap(), m).unwrap();
                assert!(ctx.reduce(&(&back - &y)).unwrap().is_zero());
            }
            for x in enumerate(Skeleton::Colors(m), k, &Constraints::default(), None).unwrap() {
                let x = DiagramVector::basis(&x);
                assert_eq!(pbw_inverse(&chi(&x, m).unwrap()).unwrap(), x);
            }
        }
    }
}

#[test]
fn close_keeps_chords() {
    let c = close(&v(&chord(Skeleton::Intervals(2), (0, 0), (1, 0)))).unwrap();
    assert_eq!(c, v(&chord(Skeleton::Circles(2), (0, 0), (1, 0))));
    assert_eq!(close(&v(&Diagram::empty(Skeleton::Intervals(2)))).unwrap(), v(&Diagram::empty(Skeleton::Circles(2))));
}

#[test]
fn closure_is_a_trace() {
    let ctx = QuotientContext::full(ContextSpec::standard(Skeleton::Circles(2), 3), None).unwrap();
    let a = v(&chord(Skeleton::Intervals(2), (0, 0), (1, 0)));
    let b = v(&tripod([Leg::on(0, 0), Leg::on(0, 1), Leg::on(1, 0)], Skeleton::Intervals(2)));
    let ab = close(&stack(&a, &b).unwrap()).unwrap();
    let ba = close(&stack(&b, &a).unwrap()).unwrap();
    assert!(ctx.reduce(&(&ab - &ba)).unwrap().is_zero());
}

#[test]
fn delete_string_examples() {
    let c12 = v(&chord(Skeleton::Intervals(3), (0, 0), (1, 0)));
    assert!(delete_string(&c12, 0).unwrap().is_zero());
    assert_eq!(delete_string(&c12, 2).unwrap(), v(&chord(Skeleton::Intervals(2), (0, 0), (1, 0))));
    let one = v(&Diagram::empty(Skeleton::Intervals(1)));
    assert_eq!(delete_string(&one, 0).unwrap(), v(&Diagram::empty(Skeleton::Empty)));
    assert!(delete_string(&c12, 3).is_err());
}

#[test]
fn delete_string_commutes_with_chi() {
    for x in enumerate(Skeleton::Colors(3), 2, &Constraints::default(), None).unwrap() {
        let x = DiagramVector::basis(&x);
        for i in 0..3 {
            let lhs = delete_string(&chi(&x, 3).unwrap(), i).unwrap();
            let killed = x.filter(|c| c.diagram().legs().iter().all(|l| l.component != i));
            let renamed = killed.map_linear(|c| {
                let d = c.diagram();
                let legs = d.legs().iter().map(|l| Leg::color(l.component - usize::from(l.component > i))).collect();
                DiagramVector::from_diagram(&Diagram::new(Skeleton::Colors(2), d.trivalent(), legs, &d.edges()).unwrap())
            });
            assert_eq!(lhs, chi(&renamed, 2).unwrap());
        }
    }
}

#[test]
fn cable_counts() {
    let c = v(&chord(Skeleton::Intervals(1), (0, 0), (0, 1)));
    let two = cable(&c, 2).unwrap();
    assert_eq!(two.iter().map(|(_, x)| x.clone()).sum::<jd_core::Coeff>(), q(4));
    let four = cable(&c, 4).unwrap();
    assert_eq!(four.iter().map(|(_, x)| x.clone()).sum::<jd_core::Coeff>(), q(16));
    assert_eq!(cable(&v(&Diagram::empty(Skeleton::Intervals(1))), 3).unwrap(), v(&Diagram::empty(Skeleton::Intervals(3))));
}

#[test]
fn wheels() {
    let w2 = wheel(2).unwrap();
    assert_eq!((w2.trivalent(), w2.leg_count(), w2.degree()), (2, 2, 2));
    assert_ne!(canonicalize(&w2).sign, 0);
    assert_eq!(wheel(4).unwrap().degree(), 4);
    assert!(wheel(3).is_err());
    assert!(wheel(0).is_err());
}

#[test]
fn circle_insertion_on_theta() {
    let pl = Placement::canonical(&theta(), 3);
    let g = insert_circles(&pl).unwrap();
    assert_eq!(g.skeleton(), Skeleton::Circles(3));
    assert_eq!(g.degree(), 4);
    assert_eq!(g.legs_per_component(), vec![2, 2, 2]);
    assert_eq!(Placement::all(&theta(), 3).len(), 60);
    let two = Diagram::new(Skeleton::Empty, 4, vec![], &[(0, 3), (1, 5), (2, 4), (6, 9), (7, 11), (8, 10)]).unwrap();
    assert!(insert_circles(&Placement::canonical(&two, 4)).is_err());
}

#[test]
fn joining_two_tripods_gives_theta() {
    let t = v(&tripod([Leg::color(0), Leg::color(1), Leg::color(2)], Skeleton::Colors(3)));
    let tt = disjoint_union(&t, &t).unwrap();
    let joined = join_pairs(&tt).unwrap();
    assert_eq!(joined, v(&theta()));
    let three = Diagram::new(Skeleton::Colors(1), 1, vec![Leg::color(0); 3], &[(0, 3), (1, 4), (2, 5)]).unwrap();
    assert!(join_pairs(&v(&three)).unwrap().is_zero());
}

#[test]
fn connected_projection() {
    let th = v(&theta());
    assert_eq!(project_connected(&th).unwrap(), th);
    let two = disjoint_union(&th, &th).unwrap();
    assert!(project_connected(&two).unwrap().is_zero());
    let mix = &th.scaled(&q(3)) + &two;
    assert_eq!(project_connected(&mix).unwrap(), th.scaled(&q(3)));
    assert!(project_connected(&v(&chord(Skeleton::Circles(1), (0, 0), (0, 1)))).is_err());
}

#[test]
fn exp_of_a_tripod() {
    let t = v(&tripod([Leg::color(0), Leg::color(1), Leg::color(2)], Skeleton::Colors(3)));
    let p = GradedVector::from_vector(Skeleton::Colors(3), 4, &t).unwrap();
    let e = exp_union(&p).unwrap();
    let mut expect = v(&Diagram::empty(Skeleton::Colors(3)));
    expect += &t;
    expect.add_scaled(&disjoint_union(&t, &t).unwrap(), &frac(1, 2));
    assert_eq!(e.total(), expect);
    assert_eq!(exp_union(&GradedVector::zero(Skeleton::Colors(3), 4)).unwrap(), GradedVector::one(Skeleton::Colors(3), 4));
}

#[test]
fn log_inverts_exp() {
    let t = v(&tripod([Leg::color(0), Leg::color(1), Leg::color(2)], Skeleton::Colors(3)));
    let strut = v(&Diagram::new(Skeleton::Colors(3), 0, vec![Leg::color(0), Leg::color(1)], &[(0, 1)]).unwrap());
    let p = &t.scaled(&frac(-2, 3)) + &strut.scaled(&q(5));
    let g = GradedVector::from_vector(Skeleton::Colors(3), 4, &p).unwrap();
    assert_eq!(log_union(&exp_union(&g).unwrap()).unwrap(), g);
    assert!(exp_union(&GradedVector::one(Skeleton::Colors(3), 4)).is_err());
}

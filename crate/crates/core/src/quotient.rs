//! Quotients of diagram spaces by relation families.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_rational::BigRational;
use rustc_hash::FxHashSet;

use crate::diagram::enumerate::{enumerate, Constraints};
use crate::diagram::{CanonicalDiagram, Skeleton};
use crate::error::{Error, Result};
use crate::linalg::{Echelon, IntRow};
use crate::relations::{instances_at, relation_instances, RelationSet};
use crate::vector::DiagramVector;

/// Elimination column: diagrams with more trivalent vertices come first, so
/// they are eliminated in favor of diagrams with fewer.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Col(pub CanonicalDiagram);

impl Ord for Col {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.trivalent().cmp(&self.0.trivalent()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Col {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Col {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// The diagram class a context lives on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContextSpec {
    pub skeleton: Skeleton,
    pub degree: usize,
    pub relations: RelationSet,
    pub constraints: Constraints,
}

impl ContextSpec {
    pub fn new(skeleton: Skeleton, degree: usize, relations: RelationSet) -> ContextSpec {
        ContextSpec { skeleton, degree, relations, constraints: Constraints::default() }
    }

    /// The defining relations for the skeleton (STU+FI, or AS+IHX without
    /// positions).
    pub fn standard(skeleton: Skeleton, degree: usize) -> ContextSpec {
        ContextSpec::new(skeleton, degree, RelationSet::default_for(skeleton))
    }

    pub fn with_constraints(mut self, c: Constraints) -> ContextSpec {
        self.constraints = c;
        self
    }

    /// Stable textual description, used in reports and cache keys.
    pub fn describe(&self) -> String {
        let c = &self.constraints;
        let mut s = format!("{} degree {} {}", self.skeleton, self.degree, self.relations);
        if c.connected_only {
            s.push_str(" connected");
        }
        if c.trivalent_only {
            s.push_str(" trivalent");
        }
        if let Some(l) = &c.legs_per_component {
            let l: Vec<String> = l.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!(" legs {}", l.join(",")));
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Every diagram of the class is indexed.
    Full,
    /// The index is the closure of some seeds under relation instances.
    Saturation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Complete,
    /// Saturation stopped at the diagram budget; zero tests are only
    /// modulo the indexed relations.
    Budgeted,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Saturation => "saturation",
        })
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Complete => "complete",
            Status::Budgeted => "budgeted",
        })
    }
}

/// A generator index with the relation span in echelon form.
#[derive(Clone, Debug)]
pub struct QuotientContext {
    spec: ContextSpec,
    mode: Mode,
    status: Status,
    index: BTreeSet<Col>,
    echelon: Echelon<Col>,
    relations: usize,
    budget: Option<usize>,
    // saturation bookkeeping
    queue: VecDeque<CanonicalDiagram>,
    seen: FxHashSet<DiagramVector>,
}

fn to_row(v: &DiagramVector) -> IntRow<Col> {
    let p = v.primitive();
    p.iter().map(|(c, x)| (Col(c.clone()), x.numer().clone())).collect()
}

impl QuotientContext {
    fn empty(spec: ContextSpec, mode: Mode, budget: Option<usize>) -> Result<QuotientContext> {
        spec.constraints.check(spec.skeleton)?;
        for &k in spec.relations.kinds() {
            k.check(spec.skeleton)?;
        }
        Ok(QuotientContext {
            spec,
            mode,
            status: Status::Complete,
            index: BTreeSet::new(),
            echelon: Echelon::new(),
            relations: 0,
            budget,
            queue: VecDeque::new(),
            seen: FxHashSet::default(),
        })
    }

    /// Enumerates the whole class and eliminates every relation instance.
    pub fn full(spec: ContextSpec, budget: Option<usize>) -> Result<QuotientContext> {
        let mut ctx = QuotientContext::empty(spec, Mode::Full, budget)?;
        let gens = enumerate(ctx.spec.skeleton, ctx.spec.degree, &ctx.spec.constraints, budget)?;
        ctx.index = gens.iter().cloned().map(Col).collect();
        let mut all = Vec::new();
        for &k in ctx.spec.relations.kinds() {
            all.extend(relation_instances(k, ctx.spec.skeleton, &gens)?);
        }
        for r in crate::relations::dedup_up_to_scalar(all) {
            ctx.check_in_class(&r)?;
            ctx.add_relation(&r);
        }
        Ok(ctx)
    }

    /// Grows an index from `seeds` by following relation instances until
    /// nothing new appears or the index reaches `budget` diagrams.
    pub fn saturated(spec: ContextSpec, seeds: &[CanonicalDiagram], budget: Option<usize>) -> Result<QuotientContext> {
        let mut ctx = QuotientContext::empty(spec, Mode::Saturation, budget)?;
        ctx.grow(seeds)?;
        Ok(ctx)
    }

    fn check_in_class(&self, r: &DiagramVector) -> Result<()> {
        let bad: Vec<String> = r
            .support()
            .filter(|c| {
                c.skeleton() != self.spec.skeleton
                    || c.degree() != self.spec.degree
                    || !self.spec.constraints.accepts(c.diagram())
            })
            .map(|c| c.hex())
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::OutsideIndex { missing: bad })
        }
    }

    fn add_relation(&mut self, r: &DiagramVector) {
        self.relations += 1;
        self.echelon.insert(to_row(r));
    }

    fn grow(&mut self, seeds: &[CanonicalDiagram]) -> Result<()> {
        for s in seeds {
            self.check_in_class(&DiagramVector::basis(s))?;
            if self.index.insert(Col(s.clone())) {
                self.queue.push_back(s.clone());
            }
        }
        let limit = self.budget.unwrap_or(usize::MAX);
        while let Some(d) = self.queue.pop_front() {
            for &k in self.spec.relations.clone().kinds() {
                for r in instances_at(k, d.diagram()) {
                    if r.is_zero() {
                        continue;
                    }
                    let p = r.primitive();
                    if self.seen.contains(&p) {
                        continue;
                    }
                    self.check_in_class(&p)?;
                    let missing: Vec<CanonicalDiagram> =
                        p.support().filter(|c| !self.index.contains(&Col((*c).clone()))).cloned().collect();
                    if self.index.len() + missing.len() > limit {
                        self.status = Status::Budgeted;
                        continue;
                    }
                    for c in missing {
                        self.index.insert(Col(c.clone()));
                        self.queue.push_back(c);
                    }
                    self.add_relation(&p);
                    self.seen.insert(p);
                }
            }
        }
        Ok(())
    }

    /// Adds the support of `v` to a saturation index (no-op in full mode).
    pub fn extend(&mut self, v: &DiagramVector) -> Result<()> {
        if self.mode == Mode::Full {
            return Ok(());
        }
        let seeds: Vec<CanonicalDiagram> = v.support().cloned().collect();
        self.grow(&seeds)
    }

    pub fn spec(&self) -> &ContextSpec {
        &self.spec
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn status(&self) -> Status {
        self.status
    }

    /// Zero tests are definitive.
    pub fn is_definitive(&self) -> bool {
        self.status == Status::Complete
    }

    pub fn generators(&self) -> impl Iterator<Item = &CanonicalDiagram> {
        self.index.iter().map(|c| &c.0)
    }

    pub fn generator_count(&self) -> usize {
        self.index.len()
    }

    pub fn contains(&self, c: &CanonicalDiagram) -> bool {
        self.index.contains(&Col(c.clone()))
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn dimension(&self) -> usize {
        self.index.len() - self.echelon.rank()
    }

    /// Relation instances inserted so far.
    pub fn relation_count(&self) -> usize {
        self.relations
    }

    /// Deterministic work counter: relations inserted plus row operations.
    pub fn work(&self) -> u64 {
        self.relations as u64 + self.echelon.ops()
    }

    /// Echelon rows, by pivot.
    pub fn rows(&self) -> impl Iterator<Item = &IntRow<Col>> {
        self.echelon.rows().map(|(_, r)| r)
    }

    /// Generators that are not pivots: a basis of the quotient.
    pub fn basis(&self) -> Vec<CanonicalDiagram> {
        self.index.iter().filter(|c| !self.echelon.is_pivot(c)).map(|c| c.0.clone()).collect()
    }

    /// Normal form of `v`: the unique representative modulo the relation
    /// span supported on non-pivot generators.
    pub fn reduce(&self, v: &DiagramVector) -> Result<DiagramVector> {
        let mut missing = Vec::new();
        for c in v.support() {
            if c.skeleton() != self.spec.skeleton || c.degree() != self.spec.degree {
                return Err(Error::SkeletonMismatch(format!(
                    "{} degree {} in a context on {} degree {}",
                    c.skeleton(),
                    c.degree(),
                    self.spec.skeleton,
                    self.spec.degree
                )));
            }
            if !self.contains(c) {
                missing.push(c.hex());
            }
        }
        if !missing.is_empty() {
            return Err(Error::OutsideIndex { missing });
        }
        let mut m: BTreeMap<Col, BigRational> = v.iter().map(|(c, x)| (Col(c.clone()), x.clone())).collect();
        self.echelon.reduce(&mut m);
        Ok(m.into_iter().map(|(c, x)| (c.0, x)).collect())
    }

    /// Reduces, first growing a saturation index to cover `v`.
    pub fn reduce_extending(&mut self, v: &DiagramVector) -> Result<DiagramVector> {
        self.extend(v)?;
        self.reduce(v)
    }

    /// Rebuilds a context from stored parts; rows are re-inserted, so the
    /// echelon state is recomputed rather than trusted.
    pub(crate) fn from_parts(
        spec: ContextSpec,
        mode: Mode,
        status: Status,
        index: Vec<CanonicalDiagram>,
        rows: Vec<IntRow<Col>>,
        relations: usize,
    ) -> QuotientContext {
        let mut echelon = Echelon::new();
        for r in rows {
            echelon.insert(r);
        }
        QuotientContext {
            spec,
            mode,
            status,
            index: index.into_iter().map(Col).collect(),
            echelon,
            relations,
            budget: None,
            queue: VecDeque::new(),
            seen: FxHashSet::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Diagram, Leg};
    use crate::relations::RelationKind;

    fn theta() -> Diagram {
        Diagram::new(Skeleton::Empty, 2, vec![], &[(0, 3), (1, 5), (2, 4)]).unwrap()
    }

    #[test]
    fn theta_survives_ihx() {
        let spec = ContextSpec::standard(Skeleton::Empty, 1).with_constraints(Constraints::connected());
        let ctx = QuotientContext::full(spec, None).unwrap();
        assert_eq!(ctx.dimension(), 1);
        let t = DiagramVector::from_diagram(&theta());
        assert_eq!(ctx.reduce(&t).unwrap(), t);
    }

    #[test]
    fn degree_zero_has_dimension_one() {
        let ctx = QuotientContext::full(ContextSpec::standard(Skeleton::Empty, 0), None).unwrap();
        assert_eq!(ctx.dimension(), 1);
    }

    #[test]
    fn isolated_chord_is_zero() {
        let ctx = QuotientContext::full(ContextSpec::standard(Skeleton::Circles(1), 1), None).unwrap();
        let chord = Diagram::new(Skeleton::Circles(1), 0, vec![Leg::on(0, 0), Leg::on(0, 1)], &[(0, 1)]).unwrap();
        assert!(ctx.reduce(&DiagramVector::from_diagram(&chord)).unwrap().is_zero());
    }

    #[test]
    fn relation_instances_reduce_to_zero() {
        let ctx = QuotientContext::full(ContextSpec::standard(Skeleton::Circles(2), 2), None).unwrap();
        let gens: Vec<_> = ctx.generators().cloned().collect();
        for r in relation_instances(RelationKind::Stu, Skeleton::Circles(2), &gens).unwrap() {
            assert!(ctx.reduce(&r).unwrap().is_zero());
        }
        assert_eq!(ctx.generator_count(), ctx.dimension() + ctx.rank());
    }

    #[test]
    fn outside_index_is_reported() {
        let spec = ContextSpec::standard(Skeleton::Empty, 1).with_constraints(Constraints::connected());
        let ctx = QuotientContext::saturated(spec, &[], None).unwrap();
        let err = ctx.reduce(&DiagramVector::from_diagram(&theta())).unwrap_err();
        assert!(matches!(err, Error::OutsideIndex { .. }));
    }
}

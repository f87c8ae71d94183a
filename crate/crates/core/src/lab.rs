//! Trees, pairing elements, weight systems and the verification suites.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::enumerate::Constraints;
use crate::diagram::json::{from_json_str, parse_fraction, DiagramJson, TermJson, VectorJson};
use crate::diagram::product::{disjoint_union, permute_colors, stack};
use crate::diagram::{CanonicalDiagram, Diagram, Leg, Skeleton};
use crate::error::{Error, Result};
use crate::linalg::{IntRow, IntegerLattice};
use crate::maps::{cable, chi, close, cut_circles, insert_circles, join_pairs, permutations, project_connected, wheel};
use crate::maps::{PbwInverse, Placement};
use crate::quotient::{Col, ContextSpec, QuotientContext};
use crate::relations::{instances_at, relation_instances, RelationKind, RelationSet};
use crate::vector::{q, Coeff, DiagramVector};

/// `σ ∈ S_{n-1}`, stored zero-based: `sigma[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeIndex {
    n: usize,
    sigma: Vec<usize>,
}

impl TreeIndex {
    pub fn new(n: usize, sigma: Vec<usize>) -> Result<TreeIndex> {
        if n < 2 {
            return Err(Error::pre(format!("tree index needs n >= 2, got {n}")));
        }
        let mut seen = vec![false; n - 1];
        if sigma.len() != n - 1 || sigma.iter().any(|&s| s >= n - 1 || std::mem::replace(&mut seen[s], true)) {
            return Err(Error::pre(format!("{sigma:?} is not a permutation of {} elements", n - 1)));
        }
        Ok(TreeIndex { n, sigma })
    }

    pub fn identity(n: usize) -> Result<TreeIndex> {
        TreeIndex::new(n, (0..n.saturating_sub(1)).collect())
    }

    /// Every index for `n`, in lexicographic order.
    pub fn all(n: usize) -> Vec<TreeIndex> {
        permutations(n - 1).into_iter().map(|sigma| TreeIndex { n, sigma }).collect()
    }

    /// One-line image notation over `1..n-1`: "231" sends 1 to 2.
    pub fn parse(n: usize, s: &str) -> Result<TreeIndex> {
        let sigma = s
            .chars()
            .map(|c| c.to_digit(10).filter(|&d| d >= 1).map(|d| d as usize - 1))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Schema { path: "sigma".into(), message: format!("not a permutation: {s:?}") })?;
        TreeIndex::new(n, sigma).map_err(|e| Error::Schema { path: "sigma".into(), message: e.to_string() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// `eta ∘ sigma`.
    pub fn after(&self, eta: &[usize]) -> TreeIndex {
        TreeIndex { n: self.n, sigma: self.sigma.iter().map(|&s| eta[s]).collect() }
    }
}

impl fmt::Display for TreeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sigma {
            write!(f, "{}", s + 1)?;
        }
        Ok(())
    }
}

/// The caterpillar tree: a spine of `n-1` trivalent vertices with leaves
/// colored `σ(1), …, σ(n-1)`, one end colored `n+1` and the other `n`.
///
/// Vertex `i` lists (leaf, next, previous) in its cyclic order.
pub fn tree(idx: &TreeIndex) -> Diagram {
    let n = idx.n;
    let t = n - 1;
    let mut legs: Vec<Leg> = idx.sigma.iter().map(|&s| Leg::color(s)).collect();
    legs.push(Leg::color(n));
    legs.push(Leg::color(n - 1));
    let mut edges = Vec::new();
    for i in 0..t {
        edges.push((3 * i, 3 * t + i));
        if i + 1 < t {
            edges.push((3 * i + 1, 3 * (i + 1) + 2));
        }
    }
    edges.push((2, 3 * t + t));
    edges.push((3 * (t - 1) + 1, 3 * t + t + 1));
    Diagram::new(Skeleton::Colors(n + 1), t, legs, &edges).expect("caterpillar is valid")
}

/// `close(chi(t_σ ⊔ t_σ'))` on `n+1` circles, before any reduction.
pub fn pairing_element(a: &TreeIndex, b: &TreeIndex) -> Result<DiagramVector> {
    if a.n != b.n {
        return Err(Error::pre(format!("tree indices for n={} and n={}", a.n, b.n)));
    }
    let x = disjoint_union(&DiagramVector::from_diagram(&tree(a)), &DiagramVector::from_diagram(&tree(b)))?;
    close(&chi(&x, a.n + 1)?)
}

/// The class the pairing elements for `n` live in.
pub fn pairing_spec(n: usize) -> ContextSpec {
    ContextSpec::new(Skeleton::Circles(n + 1), 2 * n, RelationSet::stu_fi())
}

/// A linear functional on diagrams of degree `2n` on `n+1` circles that is
/// zero off its listed values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    n: usize,
    values: BTreeMap<CanonicalDiagram, Coeff>,
    checked: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSystemFile {
    pub n: usize,
    pub values: Vec<TermJson>,
    #[serde(rename = "defaultZero")]
    pub default_zero: bool,
}

impl WeightSystem {
    /// Validates `values` against every STU and FI instance meeting its
    /// support.
    pub fn new(n: usize, values: &DiagramVector) -> Result<WeightSystem> {
        let spec = pairing_spec(n);
        for c in values.support() {
            if c.skeleton() != spec.skeleton || c.degree() != spec.degree {
                return Err(Error::SkeletonMismatch(format!(
                    "weight system for n={n} has a value on {} degree {}",
                    c.skeleton(),
                    c.degree()
                )));
            }
        }
        let mut w = WeightSystem { n, values: values.iter().map(|(c, x)| (c.clone(), x.clone())).collect(), checked: 0 };
        let support: Vec<&CanonicalDiagram> = w.values.keys().collect();
        let checks: Vec<Result<usize>> = support
            .par_iter()
            .map(|c| {
                let mut k = 0;
                for kind in [RelationKind::Stu, RelationKind::Fi] {
                    for r in instances_at(kind, c.diagram()) {
                        k += 1;
                        if !w.eval(&r).is_zero() {
                            return Err(Error::WeightSystem(crate::diagram::json::vector_to_string(&r)));
                        }
                    }
                }
                Ok(k)
            })
            .collect();
        for c in checks {
            w.checked += c?;
        }
        Ok(w)
    }

    pub fn zero(n: usize) -> WeightSystem {
        WeightSystem { n, values: BTreeMap::new(), checked: 0 }
    }

    pub fn from_file(f: &WeightSystemFile) -> Result<WeightSystem> {
        if !f.default_zero {
            return Err(Error::Schema { path: "$.defaultZero".into(), message: "only defaultZero=true is supported".into() });
        }
        let mut v = DiagramVector::zero();
        for (i, t) in f.values.iter().enumerate() {
            let at = format!("$.values[{i}]");
            let d = t.diagram.to_diagram(&format!("{at}.diagram"))?;
            v.add_diagram(&d, &parse_fraction(&t.num, &t.den, &at)?);
        }
        WeightSystem::new(f.n, &v)
    }

    pub fn from_json(s: &str) -> Result<WeightSystem> {
        WeightSystem::from_file(&from_json_str::<WeightSystemFile>(s)?)
    }

    pub fn to_file(&self) -> WeightSystemFile {
        WeightSystemFile {
            n: self.n,
            values: self
                .values
                .iter()
                .map(|(c, x)| TermJson {
                    diagram: DiagramJson::from_diagram(c.diagram()),
                    num: x.numer().to_string(),
                    den: x.denom().to_string(),
                })
                .collect(),
            default_zero: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Relation instances checked during validation.
    pub fn relations_checked(&self) -> usize {
        self.checked
    }

    pub fn is_integral(&self) -> bool {
        self.values.values().all(|x| x.is_integer())
    }

    pub fn eval(&self, v: &DiagramVector) -> Coeff {
        let mut s = Coeff::zero();
        for (c, x) in v.iter() {
            if let Some(w) = self.values.get(c) {
                s += w * x;
            }
        }
        s
    }
}

/// `f_{σ,σ'} = W(pairing element)`.
pub fn coefficient(w: &WeightSystem, a: &TreeIndex, b: &TreeIndex) -> Result<Coeff> {
    if w.n != a.n {
        return Err(Error::pre(format!("weight system for n={} used with n={}", w.n, a.n)));
    }
    Ok(w.eval(&pairing_element(a, b)?))
}

/// A square matrix indexed by `S_{n-1}` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    pub n: usize,
    pub index: Vec<TreeIndex>,
    pub matrix: Vec<Vec<Coeff>>,
}

impl QuadraticForm {
    pub fn from_weight_system(w: &WeightSystem) -> Result<QuadraticForm> {
        let index = TreeIndex::all(w.n);
        let matrix = index
            .iter()
            .map(|a| index.iter().map(|b| coefficient(w, a, b)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(QuadraticForm { n: w.n, index, matrix })
    }

    pub fn is_symmetric(&self) -> bool {
        let k = self.matrix.len();
        (0..k).all(|i| (0..k).all(|j| self.matrix[i][j] == self.matrix[j][i]))
    }

    pub fn is_integral(&self) -> bool {
        self.matrix.iter().flatten().all(|x| x.is_integer())
    }

    pub fn has_even_diagonal(&self) -> bool {
        (0..self.matrix.len()).all(|i| {
            let x = &self.matrix[i][i];
            x.is_integer() && x.numer().is_even()
        })
    }

    /// `½ Σ F[σ][σ'] μ(σ) μ(σ')`.
    pub fn eval(&self, mu: &[BigInt]) -> Result<Coeff> {
        if mu.len() != self.matrix.len() {
            return Err(Error::pre(format!("{} values for a form of size {}", mu.len(), self.matrix.len())));
        }
        let mut s = Coeff::zero();
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, f) in row.iter().enumerate() {
                s += f * Coeff::from_integer(&mu[i] * &mu[j]);
            }
        }
        let value = s / q(2);
        if self.is_symmetric() && self.is_integral() && self.has_even_diagonal() && !value.is_integer() {
            return Err(Error::pre(format!("non-integral value {value} from an even symmetric form")));
        }
        Ok(value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<VectorJson>,
}

impl Witness {
    fn new(label: impl Into<String>, ok: bool) -> Witness {
        Witness { label: label.into(), ok, note: None, vector: None }
    }

    fn note(mut self, s: impl Into<String>) -> Witness {
        self.note = Some(s.into());
        self
    }

    fn vector(mut self, v: &DiagramVector) -> Witness {
        self.vector = Some(VectorJson::from_vector(v));
        self
    }
}

/// Result of a verification suite. `timings` holds deterministic work
/// counters rather than clock readings, so reports are reproducible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub parameters: BTreeMap<String, String>,
    pub status: Verdict,
    pub witnesses: Vec<Witness>,
    pub timings: BTreeMap<String, u64>,
}

impl Report {
    fn new(suite: &str, parameters: &[(&str, String)]) -> Report {
        Report {
            suite: suite.into(),
            parameters: parameters.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            status: Verdict::Pass,
            witnesses: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    fn push(&mut self, w: Witness) {
        if !w.ok {
            self.status = Verdict::Fail;
        }
        self.witnesses.push(w);
    }

    pub fn passed(&self) -> bool {
        self.status == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    /// One line per witness plus a status line.
    pub fn to_text(&self) -> String {
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mut s = format!("{} [{}]: {}\n", self.suite, params.join(" "), self.status);
        for w in &self.witnesses {
            s.push_str(&format!("  {} {}", if w.ok { "ok  " } else { "FAIL" }, w.label));
            if let Some(n) = &w.note {
                s.push_str(&format!(" ({n})"));
            }
            s.push('\n');
        }
        for (k, v) in &self.timings {
            s.push_str(&format!("  {k}: {v}\n"));
        }
        s
    }
}

fn connected_closed_spec(degree: usize) -> ContextSpec {
    ContextSpec::new(Skeleton::Empty, degree, RelationSet::as_ihx()).with_constraints(Constraints::connected())
}

/// The composition circles → intervals → open → joined → connected applied
/// to `gamma` after inserting circles at `pl`, cutting circle `c` at `cuts[c]`.
pub fn left_inverse_image(pl: &Placement, cuts: &[usize], pbw: &mut PbwInverse) -> Result<DiagramVector> {
    let g = DiagramVector::from_diagram(&insert_circles(pl)?);
    let open = pbw.apply(&cut_circles(&g, cuts)?)?;
    project_connected(&join_pairs(&open)?)
}

/// Checks that joining legs after `p` undoes circle insertion on every
/// generator of the connected closed space of degree `n-1`.
pub fn verify_left_inverse(n: usize, budget: Option<usize>) -> Result<Report> {
    if n < 2 {
        return Err(Error::pre(format!("left inverse needs n >= 2, got {n}")));
    }
    let mut report = Report::new("left-inverse", &[("n", n.to_string())]);
    let ctx = QuotientContext::full(connected_closed_spec(n - 1), budget)?;
    let gens: Vec<CanonicalDiagram> = ctx.generators().cloned().collect();
    let results: Vec<Result<(Witness, u64)>> = gens
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut pbw = PbwInverse::new();
            let pl = Placement::canonical(c.diagram(), n + 1);
            let first = left_inverse_image(&pl, &vec![0; n + 1], &mut pbw)?;
            let second = left_inverse_image(&pl, &vec![1; n + 1], &mut pbw)?;
            let gamma = DiagramVector::basis(c);
            let diff = ctx.reduce(&(&first - &gamma))?;
            let cut = ctx.reduce(&(&first - &second))?;
            let ok = diff.is_zero() && cut.is_zero();
            let mut w = Witness::new(format!("generator {}", i + 1), ok).vector(&first);
            if !cut.is_zero() {
                w = w.note("cut points disagree");
            } else if !diff.is_zero() {
                w = w.note("image differs from the generator");
            }
            Ok((w, pbw.steps()))
        })
        .collect();
    let mut steps = 0;
    for r in results {
        let (w, s) = r?;
        steps += s;
        report.push(w);
    }
    report.timings.insert("generators".into(), gens.len() as u64);
    report.timings.insert("pbw_steps".into(), steps);
    report.timings.insert("context_work".into(), ctx.work());
    Ok(report)
}

/// Checks that every placement of circles on `gamma` gives the same class.
pub fn verify_placements(n: usize, ctx: &QuotientContext) -> Result<Report> {
    let mut report = Report::new("placements", &[("n", n.to_string())]);
    let gens = QuotientContext::full(connected_closed_spec(n - 1), None)?;
    for (i, c) in gens.generators().enumerate() {
        let all = Placement::all(c.diagram(), n + 1);
        let base = DiagramVector::from_diagram(&insert_circles(&all[0])?);
        let mut bad = 0;
        for pl in &all[1..] {
            let v = DiagramVector::from_diagram(&insert_circles(pl)?);
            let diff = ctx.reduce(&(&v - &base))?;
            if !diff.is_zero() {
                bad += 1;
                report.push(Witness::new(format!("placement {:?}", pl.slots), false).vector(&diff));
            }
        }
        report.push(
            Witness::new(format!("generator {}", i + 1), bad == 0)
                .note(format!("{} placements, {bad} differ", all.len()))
                .vector(&ctx.reduce(&base)?),
        );
        report.timings.insert("placements".into(), report.timings.get("placements").unwrap_or(&0) + all.len() as u64);
    }
    report.timings.insert("context_work".into(), ctx.work());
    Ok(report)
}

/// Symmetry and color equivariance of the pairing elements, checked on
/// unreduced vectors.
pub fn verify_pairing_structure(n: usize) -> Result<Report> {
    let mut report = Report::new("pairing-structure", &[("n", n.to_string())]);
    let idx = TreeIndex::all(n);
    let mut elems = BTreeMap::new();
    for a in &idx {
        for b in &idx {
            elems.insert((a.clone(), b.clone()), pairing_element(a, b)?);
        }
    }
    for a in &idx {
        for b in &idx {
            let ok = elems[&(a.clone(), b.clone())] == elems[&(b.clone(), a.clone())];
            report.push(Witness::new(format!("symmetry {a} {b}"), ok));
        }
    }
    for eta in permutations(n - 1) {
        let mut full: Vec<usize> = eta.clone();
        full.extend([n - 1, n]);
        for a in &idx {
            for b in &idx {
                let moved = permute_colors(&elems[&(a.clone(), b.clone())], &full)?;
                let target = &elems[&(a.after(&eta), b.after(&eta))];
                let eta1: String = eta.iter().map(|e| (e + 1).to_string()).collect();
                report.push(Witness::new(format!("equivariance eta={eta1} {a} {b}"), moved == *target));
            }
        }
    }
    report.timings.insert("elements".into(), elems.len() as u64);
    report.timings.insert("terms".into(), elems.values().map(|v| v.len() as u64).sum());
    Ok(report)
}

/// Outcome of testing `v ∈ d·Z^N + R` for the integral relation lattice `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Divisibility {
    /// `v = d·w + r` with `r` an integral combination of relations.
    Divisible { witness: DiagramVector, relations_used: usize },
    NotDivisible,
}

/// Lattice test over the generators of `ctx` and the integral relation
/// instances of its class.
pub fn lattice_divisibility(v: &DiagramVector, d: i64, ctx: &QuotientContext) -> Result<Divisibility> {
    if !v.is_integral() {
        return Err(Error::pre("lattice divisibility needs an integral vector"));
    }
    let spec = ctx.spec();
    let gens: Vec<CanonicalDiagram> = ctx.generators().cloned().collect();
    for c in v.support() {
        if !ctx.contains(c) {
            return Err(Error::OutsideIndex { missing: vec![c.hex()] });
        }
    }
    let dd = BigInt::from(d);
    let mut rows: Vec<IntRow<Col>> = gens.iter().map(|c| vec![(Col(c.clone()), dd.clone())]).collect();
    let mut rels = Vec::new();
    for &k in spec.relations.kinds() {
        rels.extend(relation_instances(k, spec.skeleton, &gens)?);
    }
    let rels = crate::relations::dedup_up_to_scalar(rels);
    for r in &rels {
        if !r.is_integral() {
            return Err(Error::pre("relation instance with a denominator"));
        }
        rows.push(r.iter().map(|(c, x)| (Col(c.clone()), x.numer().clone())).collect());
    }
    let mut lattice = IntegerLattice::new(rows);
    let target: Vec<(Col, BigInt)> = v.iter().map(|(c, x)| (Col(c.clone()), x.numer().clone())).collect();
    let Some(combo) = lattice.solve(&target) else { return Ok(Divisibility::NotDivisible) };
    let n = gens.len();
    let mut witness = DiagramVector::zero();
    let mut check = DiagramVector::zero();
    let mut used = 0;
    for (&i, x) in &combo {
        if x.is_zero() {
            continue;
        }
        let x = Coeff::from_integer(x.clone());
        if i < n {
            witness.add_term(gens[i].clone(), x.clone());
            check.add_term(gens[i].clone(), x * q(d));
        } else {
            used += 1;
            check.add_scaled(&rels[i - n], &x);
        }
    }
    if check != *v {
        return Err(Error::pre("lattice solution does not reproduce the input"));
    }
    Ok(Divisibility::Divisible { witness, relations_used: used })
}

/// Divisibility by 2 of the diagonal pairing element in the integral
/// relation lattice.
pub fn verify_evenness(idx: &TreeIndex, ctx: &QuotientContext) -> Result<Report> {
    let mut report = Report::new("evenness", &[("n", idx.n.to_string()), ("sigma", idx.to_string())]);
    let v = pairing_element(idx, idx)?;
    let den = v.denominator();
    let cleared = v.scaled(&Coeff::from_integer(den.clone()));
    report.timings.insert("denominator".into(), u64::try_from(&den).unwrap_or(u64::MAX));
    report.timings.insert("lattice_generators".into(), ctx.generator_count() as u64);
    match lattice_divisibility(&cleared, 2, ctx)? {
        Divisibility::Divisible { witness, relations_used } => {
            report.timings.insert("relations_used".into(), relations_used as u64);
            report.push(
                Witness::new("half of the pairing element", true)
                    .note(format!("denominator {den} cleared, {relations_used} relations used"))
                    .vector(&witness),
            );
        }
        Divisibility::NotDivisible if den.is_one() => {
            report.push(Witness::new("pairing element", false).note("not divisible by 2").vector(&cleared));
        }
        Divisibility::NotDivisible => {
            report.status = Verdict::Inconclusive;
            report
                .witnesses
                .push(Witness::new("pairing element", false).note(format!("denominator {den} obstructs the test")).vector(&cleared));
        }
    }
    Ok(report)
}

/// A circle that carries exactly one leg, attached to a trivalent vertex.
pub fn has_one_leg_circle(d: &Diagram, at_vertex_only: bool) -> bool {
    let t = d.trivalent();
    d.legs_per_component().iter().enumerate().any(|(c, &k)| {
        k == 1 && {
            let j = d.legs_on(c)[0];
            !at_vertex_only || d.partner(3 * t + j) < 3 * t
        }
    })
}

/// Wheel-times-tree vanishing on three circles plus the one-leg sweep of
/// the full degree-4 context.
pub fn verify_wheel_vanishing(ctx: &QuotientContext) -> Result<Report> {
    let mut report = Report::new("wheel-vanishing", &[("n", "2".into())]);
    let t = DiagramVector::from_diagram(&tree(&TreeIndex::identity(2)?));
    let w = cable(&DiagramVector::from_diagram(&wheel(2)?), 3)?;
    let main = close(&stack(&chi(&t, 3)?, &w)?)?;
    let nf = ctx.reduce(&main)?;
    report.push(Witness::new("closed tree times cabled wheel", nf.is_zero()).note(format!("{} terms", main.len())).vector(&nf));
    let mut swept = 0;
    let mut bad = Vec::new();
    for c in ctx.generators() {
        if has_one_leg_circle(c.diagram(), true) {
            swept += 1;
            let r = ctx.reduce(&DiagramVector::basis(c))?;
            if !r.is_zero() {
                bad.push(c.clone());
            }
        }
    }
    report.push(Witness::new("one-leg circles at a vertex vanish", bad.is_empty()).note(format!("{swept} diagrams, {} survive", bad.len())));
    let control = close(&w)?;
    let cctx = QuotientContext::full(ContextSpec::new(Skeleton::Circles(3), 2, RelationSet::stu_fi()), None)?;
    let cnf = cctx.reduce(&control)?;
    report.witnesses.push(Witness::new("control: closed cabled wheel alone", true).note(format!("{} terms in normal form", cnf.len())).vector(&cnf));
    report.timings.insert("main_terms".into(), main.len() as u64);
    report.timings.insert("swept".into(), swept);
    report.timings.insert("context_work".into(), ctx.work());
    Ok(report)
}

/// Reduces every diagram of degree at most `max_degree` on at most
/// `max_circles` circles that has a circle with exactly one leg. With
/// `at_vertex_only`, only circles whose leg ends at a trivalent vertex count.
pub fn verify_one_leg(max_circles: usize, max_degree: usize, at_vertex_only: bool) -> Result<Report> {
    let mut report = Report::new(
        "one-leg",
        &[
            ("circles", max_circles.to_string()),
            ("degree", max_degree.to_string()),
            ("legs", if at_vertex_only { "at-vertex" } else { "any" }.to_string()),
        ],
    );
    let mut swept = 0;
    let mut work = 0;
    for m in 1..=max_circles {
        for k in 1..=max_degree {
            let ctx = QuotientContext::full(ContextSpec::new(Skeleton::Circles(m), k, RelationSet::stu_fi()), None)?;
            work += ctx.work();
            let mut here = 0;
            let mut bad = 0;
            for c in ctx.generators() {
                if !has_one_leg_circle(c.diagram(), at_vertex_only) {
                    continue;
                }
                here += 1;
                let r = ctx.reduce(&DiagramVector::basis(c))?;
                if !r.is_zero() {
                    bad += 1;
                    if bad <= 3 {
                        report.push(
                            Witness::new(format!("C{m} degree {k} survivor {bad}"), false)
                                .vector(&DiagramVector::basis(c))
                                .note(format!("normal form has {} terms", r.len())),
                        );
                    }
                }
            }
            swept += here;
            report.push(Witness::new(format!("C{m} degree {k}"), bad == 0).note(format!("{here} diagrams, {bad} survive")));
        }
    }
    report.timings.insert("swept".into(), swept);
    report.timings.insert("context_work".into(), work);
    Ok(report)
}

/// Symmetry, even diagonal and integrality of the form of `w` on all
/// `mu` with entries in `-2..=2`.
pub fn verify_quadratic_form(w: &WeightSystem) -> Result<Report> {
    let mut report = Report::new("quadratic-form", &[("n", w.n.to_string()), ("support", w.values.len().to_string())]);
    let f = QuadraticForm::from_weight_system(w)?;
    for (i, row) in f.matrix.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        report.witnesses.push(Witness::new(format!("row {}", f.index[i]), true).note(cells.join(" ")));
    }
    report.push(Witness::new("symmetric", f.is_symmetric()));
    if w.is_integral() {
        report.push(Witness::new("integral", f.is_integral()));
        report.push(Witness::new("even diagonal", f.has_even_diagonal()));
    }
    let k = f.matrix.len();
    let mut evals = 0u64;
    let mut all_integral = true;
    let mut mu = vec![-2i64; k];
    loop {
        let m: Vec<BigInt> = mu.iter().map(|&x| BigInt::from(x)).collect();
        match f.eval(&m) {
            Ok(v) => all_integral &= v.is_integer(),
            Err(_) => all_integral = false,
        }
        evals += 1;
        let Some(pos) = mu.iter().position(|&x| x < 2) else { break };
        mu[pos] += 1;
        for x in &mut mu[..pos] {
            *x = -2;
        }
    }
    if f.is_symmetric() && f.is_integral() && f.has_even_diagonal() {
        report.push(Witness::new("integer values", all_integral).note(format!("{evals} inputs")));
    } else {
        report.witnesses.push(Witness::new("integer values", all_integral).note("not required: form is not even"));
    }
    report.timings.insert("evaluations".into(), evals);
    report.timings.insert("relations_checked".into(), w.checked as u64);
    Ok(report)
}

/// Integer coordinate functionals of a full context: one weight system per
/// basis element, scaled to clear denominators.
pub fn coordinate_weight_systems(n: usize, ctx: &QuotientContext) -> Result<Vec<WeightSystem>> {
    if ctx.spec().skeleton != pairing_spec(n).skeleton || ctx.spec().degree != 2 * n {
        return Err(Error::pre("coordinate functionals need the pairing context"));
    }
    let basis = ctx.basis();
    let forms: Vec<DiagramVector> = ctx.generators().map(|c| ctx.reduce(&DiagramVector::basis(c))).collect::<Result<_>>()?;
    let gens: Vec<CanonicalDiagram> = ctx.generators().cloned().collect();
    basis
        .par_iter()
        .map(|b| {
            let mut values = DiagramVector::zero();
            for (g, f) in gens.iter().zip(&forms) {
                let x = f.coeff(b);
                if !x.is_zero() {
                    values.add_term(g.clone(), x);
                }
            }
            let den = values.denominator();
            WeightSystem::new(n, &values.scaled(&Coeff::from_integer(den)))
        })
        .collect()
}

/// Weight systems counting chord diagrams whose chords join the given
/// (unordered, zero-based) pairs of circles.
pub fn linking_weight_system(n: usize, ctx: &QuotientContext, pairs: &[(usize, usize)]) -> Result<WeightSystem> {
    let mut want: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    want.sort();
    if want.iter().any(|&(a, b)| a == b) {
        return Err(Error::pre("linking weight system needs chords between distinct circles"));
    }
    let mut values = DiagramVector::zero();
    for c in ctx.generators() {
        let d = c.diagram();
        if d.trivalent() != 0 {
            continue;
        }
        let mut got: Vec<(usize, usize)> = d
            .edges()
            .into_iter()
            .map(|(a, b)| {
                let (x, y) = (d.legs()[a].component, d.legs()[b].component);
                (x.min(y), x.max(y))
            })
            .collect();
        got.sort();
        if got == want {
            values.add_term(c.clone(), q(1));
        }
    }
    WeightSystem::new(n, &values)
}

impl FromStr for Verdict {
    type Err = Error;
    fn from_str(s: &str) -> Result<Verdict> {
        match s {
            "pass" => Ok(Verdict::Pass),
            "fail" => Ok(Verdict::Fail),
            "inconclusive" => Ok(Verdict::Inconclusive),
            _ => Err(Error::pre(format!("unknown verdict {s:?}"))),
        }
    }
}

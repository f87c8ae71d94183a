//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when the outcome differs from the pinned expectation.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use jd_core::diagram::enumerate::{enumerate, Constraints};
use jd_core::lab::*;
use jd_core::maps::{chi, pbw_inverse};
use jd_core::relations::instances_at;
use jd_core::run::{RunConfig, Runner, Suite};
use jd_core::{ContextSpec, DiagramVector, QuotientContext, RelationKind, RelationSet, Skeleton};

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

const MINUTE: Duration = Duration::from_secs(60);

/// Criteria whose literal statement is false. Counterexample: a single
/// chord joining two circles (each circle carries one leg, and the class
/// spans the one-dimensional degree-1 space on two circles).
const KNOWN_UNATTAINABLE: &[u32] = &[3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(t: Instant, limit: Duration) -> bool {
    t.elapsed() <= limit
}

fn left_inverse() -> Outcome {
    let t = Instant::now();
    let two = verify_left_inverse(2, None).unwrap();
    let fast = within(t, 5 * MINUTE);
    let t = Instant::now();
    let three = verify_left_inverse(3, None).unwrap();
    let ok = two.passed() && three.passed() && fast && within(t, 60 * MINUTE);
    outcome(ok, format!("n=2 {} generator(s), n=3 {} generators", two.witnesses.len(), three.witnesses.len()))
}

fn placements(ctx: &QuotientContext) -> Outcome {
    let t = Instant::now();
    let r = verify_placements(2, ctx).unwrap();
    let count = r.timings["placements"];
    outcome(r.passed() && count >= 3 && within(t, 10 * MINUTE), format!("{count} placements of theta"))
}

fn one_leg() -> Outcome {
    let literal = verify_one_leg(3, 3, false).unwrap();
    let restricted = verify_one_leg(3, 3, true).unwrap();
    let survivors = literal.witnesses.iter().filter(|w| !w.ok && w.label.contains("survivor")).count();
    outcome(
        literal.passed(),
        format!(
            "{} swept, {survivors} survivor witnesses; legs at a vertex only: {} ({} swept)",
            literal.timings["swept"],
            if restricted.passed() { "all vanish" } else { "FAIL" },
            restricted.timings["swept"],
        ),
    )
}

fn as_ihx_from_stu() -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    for m in 1..=2 {
        for k in 1..=3 {
            let ctx = QuotientContext::full(ContextSpec::new(Skeleton::Circles(m), k, RelationSet::stu_fi()), None).unwrap();
            for c in ctx.generators() {
                for kind in [RelationKind::As, RelationKind::Ihx] {
                    for r in instances_at(kind, c.diagram()) {
                        checked += 1;
                        if !ctx.reduce(&r).unwrap().is_zero() {
                            bad += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(bad == 0 && checked > 0, format!("{checked} instances, {bad} nonzero"))
}

fn pbw_round_trips() -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    for m in 1..=3 {
        for k in 0..=3 {
            let ctx = QuotientContext::full(ContextSpec::new(Skeleton::Intervals(m), k, RelationSet::new([RelationKind::Stu])), None).unwrap();
            for c in ctx.generators() {
                let y = DiagramVector::basis(c);
                let back = chi(&pbw_inverse(&y).unwrap(), m).unwrap();
                checked += 1;
                if !ctx.reduce(&(&back - &y)).unwrap().is_zero() {
                    bad += 1;
                }
            }
            for x in enumerate(Skeleton::Colors(m), k, &Constraints::default(), None).unwrap() {
                let x = DiagramVector::basis(&x);
                checked += 1;
                if pbw_inverse(&chi(&x, m).unwrap()).unwrap() != x {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0, format!("{checked} inputs, {bad} mismatches"))
}

fn pairing_structure(ctx: &QuotientContext) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2, 3] {
        let r = verify_pairing_structure(n).unwrap();
        ok &= r.passed();
        parts.push(format!("n={n} {} checks", r.witnesses.len()));
    }
    let mut systems = vec![WeightSystem::zero(2), linking_weight_system(2, ctx, &[(0, 1), (0, 1), (1, 2), (0, 2)]).unwrap()];
    systems.extend(coordinate_weight_systems(2, ctx).unwrap());
    for w in &systems {
        ok &= verify_quadratic_form(w).unwrap().passed();
    }
    parts.push(format!("{} weight systems", systems.len()));
    outcome(ok, parts.join(", "))
}

fn evenness(ctx: &QuotientContext) -> Outcome {
    let r = verify_evenness(&TreeIndex::identity(2).unwrap(), ctx).unwrap();
    outcome(r.status != Verdict::Fail, format!("verdict {}", r.status))
}

fn wheel(ctx: &QuotientContext, built: Duration) -> Outcome {
    let t = Instant::now();
    let r = verify_wheel_vanishing(ctx).unwrap();
    outcome(r.passed() && t.elapsed() + built <= 120 * MINUTE, format!("{} swept terms", r.timings["swept"]))
}

fn dims() -> Outcome {
    let runner = Runner::new(RunConfig::default()).unwrap();
    let connected = Constraints::connected();
    let one = runner.dims(&ContextSpec::new(Skeleton::Empty, 1, RelationSet::as_ihx()).with_constraints(connected.clone())).unwrap();
    let spec = ContextSpec::new(Skeleton::Empty, 2, RelationSet::as_ihx()).with_constraints(connected);
    let full = runner.dims(&spec).unwrap();
    let sat = runner.dims_saturated(&spec).unwrap();
    outcome(
        one.dimension == 1 && full.dimension == sat.dimension,
        format!("degree 1: {}, degree 2: {} enumerated, {} saturated", one.dimension, full.dimension, sat.dimension),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let plain = Runner::new(RunConfig { workers: 1, ..RunConfig::default() }).unwrap();
    let cached = || Runner::new(RunConfig { workers: 4, cache_dir: Some(dir.path().to_path_buf()), ..RunConfig::default() }).unwrap();
    let mut ok = true;
    let mut reports = 0;
    for (suite, n) in [(Suite::LeftInverse, 2), (Suite::LeftInverse, 3), (Suite::Placements, 2)] {
        let reference = plain.verify(suite, n, None, None).unwrap().to_json();
        let first = cached().verify(suite, n, None, None).unwrap().to_json();
        let again = cached().verify(suite, n, None, None).unwrap().to_json();
        ok &= reference == first && first == again;
        reports += 3;
    }
    let v = cached().cache().unwrap().verify().unwrap();
    ok &= v.clean() && !v.ok.is_empty();
    outcome(ok, format!("{reports} reports compared, {} cache entries verified", v.ok.len()))
}

fn main() -> ExitCode {
    let t = Instant::now();
    let ctx = QuotientContext::full(pairing_spec(2), None).unwrap();
    let built = t.elapsed();
    let criteria: Vec<(u32, &str, Check)> = vec![
        (1, "left inverse", Box::new(left_inverse)),
        (2, "placement independence", Box::new(|| placements(&ctx))),
        (3, "one-leg vanishing", Box::new(one_leg)),
        (4, "AS/IHX from STU", Box::new(as_ihx_from_stu)),
        (5, "PBW round trips", Box::new(pbw_round_trips)),
        (6, "pairing structure", Box::new(|| pairing_structure(&ctx))),
        (7, "evenness", Box::new(|| evenness(&ctx))),
        (8, "wheel vanishing", Box::new(|| wheel(&ctx, built))),
        (9, "oracle dimensions", Box::new(dims)),
        (10, "determinism and cache", Box::new(determinism)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in &criteria {
        let t = Instant::now();
        let o = run();
        let known = KNOWN_UNATTAINABLE.contains(id);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if known { " [known unattainable]" } else { "" };
        println!("criterion {id:>2} {tag} {name}: {} ({:.1}s){note}", o.detail, t.elapsed().as_secs_f64());
        if o.pass == known {
            unexpected.push(*id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: outcome matches expectation");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}

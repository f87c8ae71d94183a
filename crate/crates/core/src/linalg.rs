//! Sparse exact linear algebra over the integers and rationals.
//!
//! Rows are sorted lists of `(column, coefficient)`; the column type only
//! needs a total order, which fixes the elimination order.

use std::collections::BTreeMap;
use std::ops::Bound;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntRow<C> = Vec<(C, BigInt)>;

/// `x·a + y·b`, dropping zeros.
pub fn combine<C: Ord + Clone>(x: &BigInt, a: &[(C, BigInt)], y: &BigInt, b: &[(C, BigInt)]) -> IntRow<C> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take = match (a.get(i), b.get(j)) {
            (Some((ca, _)), Some((cb, _))) => ca.cmp(cb),
            (Some(_), None) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        };
        let (c, v) = match take {
            std::cmp::Ordering::Less => {
                i += 1;
                (a[i - 1].0.clone(), x * &a[i - 1].1)
            }
            std::cmp::Ordering::Greater => {
                j += 1;
                (b[j - 1].0.clone(), y * &b[j - 1].1)
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
                (a[i - 1].0.clone(), x * &a[i - 1].1 + y * &b[j - 1].1)
            }
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    out
}

/// Divides by the content and makes the leading entry positive.
pub fn make_primitive<C>(row: &mut IntRow<C>) {
    let g = row.iter().fold(BigInt::zero(), |g, (_, v)| g.gcd(v));
    if g.is_zero() {
        return;
    }
    let g = if row[0].1.is_negative() { -g } else { g };
    if !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

/// Integer rows in semi-echelon form: every row is primitive with a
/// positive leading entry, and leading columns are distinct.
#[derive(Clone, Debug)]
pub struct Echelon<C: Ord + Clone> {
    rows: BTreeMap<C, IntRow<C>>,
    /// Row operations performed, as a deterministic work counter.
    ops: u64,
}

impl<C: Ord + Clone> Default for Echelon<C> {
    fn default() -> Self {
        Echelon { rows: BTreeMap::new(), ops: 0 }
    }
}

impl<C: Ord + Clone> Echelon<C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ops(&self) -> u64 {
        self.ops
    }

    pub fn is_pivot(&self, c: &C) -> bool {
        self.rows.contains_key(c)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&C, &IntRow<C>)> {
        self.rows.iter()
    }

    /// Adds a row to the span; returns whether the rank grew.
    pub fn insert(&mut self, mut row: IntRow<C>) -> bool {
        row.retain(|(_, v)| !v.is_zero());
        row.sort_by(|a, b| a.0.cmp(&b.0));
        loop {
            let Some((lead, a)) = row.first().cloned() else { return false };
            let Some(p) = self.rows.get(&lead) else {
                make_primitive(&mut row);
                self.rows.insert(lead, row);
                return true;
            };
            let b = &p[0].1;
            let g = a.gcd(b);
            let (x, y) = (b / &g, -(&a / &g));
            row = combine(&x, &row, &y, p);
            make_primitive(&mut row);
            self.ops += 1;
        }
    }

    /// Subtracts the row span so that no pivot column remains. The result
    /// is the unique such representative of `v` modulo the span.
    pub fn reduce(&self, v: &mut BTreeMap<C, BigRational>) -> u64 {
        let mut ops = 0;
        let mut cursor: Option<C> = None;
        loop {
            let lower = match &cursor {
                Some(c) => Bound::Excluded(c.clone()),
                None => Bound::Unbounded,
            };
            let next = v.range((lower, Bound::Unbounded)).map(|(c, _)| c).find(|c| self.rows.contains_key(c)).cloned();
            let Some(c) = next else { return ops };
            let row = &self.rows[&c];
            let f = &v[&c] / BigRational::from_integer(row[0].1.clone());
            for (col, a) in row {
                let e = v.entry(col.clone()).or_insert_with(BigRational::zero);
                *e -= &f * BigRational::from_integer(a.clone());
                if e.is_zero() {
                    v.remove(col);
                }
            }
            ops += 1;
            cursor = Some(c);
        }
    }
}

/// Sparse integer combination of generators, keyed by generator index.
pub type Combination = BTreeMap<usize, BigInt>;

fn add_combination(acc: &mut Combination, x: &BigInt, other: &Combination) {
    for (&i, v) in other {
        let e = acc.entry(i).or_insert_with(BigInt::zero);
        *e += x * v;
        if e.is_zero() {
            acc.remove(&i);
        }
    }
}

fn scale_combination(c: &Combination, x: &BigInt) -> Combination {
    if x.is_zero() {
        return Combination::new();
    }
    c.iter().map(|(&i, v)| (i, v * x)).collect()
}

#[derive(Clone, Debug)]
struct HnfRow<C> {
    row: IntRow<C>,
    from: Combination,
}

/// Integer span of a list of sparse integer vectors, with a lazily built
/// Hermite normal form that remembers how each row was obtained.
#[derive(Clone, Debug)]
pub struct IntegerLattice<C: Ord + Clone> {
    generators: Vec<IntRow<C>>,
    hnf: Option<BTreeMap<C, HnfRow<C>>>,
}

impl<C: Ord + Clone> Default for IntegerLattice<C> {
    fn default() -> Self {
        IntegerLattice { generators: Vec::new(), hnf: None }
    }
}

impl<C: Ord + Clone> IntegerLattice<C> {
    pub fn new(generators: Vec<IntRow<C>>) -> Self {
        let mut l = Self::default();
        for g in generators {
            l.push(g);
        }
        l
    }

    pub fn push(&mut self, mut g: IntRow<C>) -> usize {
        g.retain(|(_, v)| !v.is_zero());
        g.sort_by(|a, b| a.0.cmp(&b.0));
        self.generators.push(g);
        self.hnf = None;
        self.generators.len() - 1
    }

    pub fn generators(&self) -> &[IntRow<C>] {
        &self.generators
    }

    fn build(&self) -> BTreeMap<C, HnfRow<C>> {
        let mut rows: BTreeMap<C, HnfRow<C>> = BTreeMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            let mut cur = HnfRow { row: g.clone(), from: Combination::from([(i, BigInt::one())]) };
            while let Some((lead, a)) = cur.row.first().cloned() {
                let Some(p) = rows.get(&lead) else {
                    if a.is_negative() {
                        cur.row = combine(&-BigInt::one(), &cur.row, &BigInt::zero(), &[]);
                        cur.from = scale_combination(&cur.from, &-BigInt::one());
                    }
                    rows.insert(lead, cur);
                    break;
                };
                let b = p.row[0].1.clone();
                if (&a % &b).is_zero() {
                    let x = -(&a / &b);
                    cur.row = combine(&BigInt::one(), &cur.row, &x, &p.row);
                    add_combination(&mut cur.from, &x, &p.from);
                    continue;
                }
                // new pivot s·p + t·cur has leading entry gcd(a, b)
                let e = b.extended_gcd(&a);
                let (s, t) = (e.x, e.y);
                let g = e.gcd;
                let mut pivot = HnfRow { row: combine(&s, &p.row, &t, &cur.row), from: scale_combination(&p.from, &s) };
                add_combination(&mut pivot.from, &t, &cur.from);
                let (u, w) = (&a / &g, -(&b / &g));
                let mut rest = HnfRow { row: combine(&u, &p.row, &w, &cur.row), from: scale_combination(&p.from, &u) };
                add_combination(&mut rest.from, &w, &cur.from);
                if pivot.row[0].1.is_negative() {
                    pivot.row = combine(&-BigInt::one(), &pivot.row, &BigInt::zero(), &[]);
                    pivot.from = scale_combination(&pivot.from, &-BigInt::one());
                }
                rows.insert(lead, pivot);
                cur = rest;
            }
        }
        // reduce entries above each pivot into [0, pivot)
        let pivots: Vec<C> = rows.keys().cloned().collect();
        for (k, c) in pivots.iter().enumerate() {
            let p = rows[c].clone();
            let d = &p.row[0].1;
            for earlier in &pivots[..k] {
                let r = rows.get_mut(earlier).expect("pivot row");
                let Some(pos) = r.row.iter().position(|(col, _)| col == c) else { continue };
                let q = r.row[pos].1.div_floor(d);
                if q.is_zero() {
                    continue;
                }
                let x = -q;
                r.row = combine(&BigInt::one(), &r.row, &x, &p.row);
                add_combination(&mut r.from, &x, &p.from);
            }
        }
        rows
    }

    /// Rows of the Hermite normal form, by increasing leading column.
    pub fn hermite_form(&mut self) -> Vec<IntRow<C>> {
        if self.hnf.is_none() {
            self.hnf = Some(self.build());
        }
        self.hnf.as_ref().expect("built").values().map(|r| r.row.clone()).collect()
    }

    pub fn rank(&mut self) -> usize {
        self.hermite_form().len()
    }

    /// If `v` lies in the lattice, the integer combination of generators
    /// producing it.
    pub fn solve(&mut self, v: &[(C, BigInt)]) -> Option<Combination> {
        if self.hnf.is_none() {
            self.hnf = Some(self.build());
        }
        let rows = self.hnf.as_ref().expect("built");
        let mut rest: IntRow<C> = v.iter().filter(|(_, x)| !x.is_zero()).cloned().collect();
        rest.sort_by(|a, b| a.0.cmp(&b.0));
        let mut combo = Combination::new();
        while let Some((lead, a)) = rest.first().cloned() {
            let p = rows.get(&lead)?;
            let b = &p.row[0].1;
            if !(&a % b).is_zero() {
                return None;
            }
            let x = &a / b;
            rest = combine(&BigInt::one(), &rest, &-x.clone(), &p.row);
            add_combination(&mut combo, &x, &p.from);
        }
        Some(combo)
    }
}

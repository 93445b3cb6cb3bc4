//! Graded ideal membership as exact sparse linear algebra.
//!
//! For homogeneous targets and generators every cofactor can be taken
//! homogeneous of a forced degree, so a membership question (or several
//! identities sharing unknown cofactors) becomes one linear system whose
//! unknowns are the coefficients of the cofactors on a monomial basis.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use num::{BigInt, Integer, One, Signed, Zero};
use thiserror::Error;

use crate::poly::{canonical_cmp, Monomial, Polynomial, Rational, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinsolveError {
    #[error("identity {0} contains a non-homogeneous polynomial")]
    NotHomogeneous(usize),
    #[error("identity {identity}: slot `{slot}` has degree {found}, expected {expected}")]
    DegreeMismatch { identity: usize, slot: String, expected: i64, found: i64 },
    #[error("slot `{0}` is used with two different degrees")]
    SlotDegreeConflict(String),
}

/// `generator * slot`, where `slot` is an unknown homogeneous polynomial of
/// the given degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub generator: Polynomial,
    pub slot: String,
    pub degree: i64,
}

impl Summand {
    pub fn new(generator: Polynomial, slot: impl Into<String>, degree: i64) -> Summand {
        Summand { generator, slot: slot.into(), degree }
    }
}

/// `target = Σ summands`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub target: Polynomial,
    pub summands: Vec<Summand>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedMembershipProblem {
    pub identities: Vec<Identity>,
}

pub type Assignment = BTreeMap<String, Polynomial>;

impl GradedMembershipProblem {
    pub fn new(identities: Vec<Identity>) -> Self {
        GradedMembershipProblem { identities }
    }

    /// Checks every identity exactly under `assignment` (missing slots are 0).
    pub fn verify(&self, assignment: &Assignment) -> bool {
        self.identities.iter().all(|id| {
            let zero = Polynomial::zero();
            let lhs: Polynomial = id
                .summands
                .iter()
                .map(|s| &s.generator * assignment.get(&s.slot).unwrap_or(&zero))
                .sum();
            lhs == id.target
        })
    }

    pub fn build(&self) -> Result<SparseLinearSystem, LinsolveError> {
        build_system(self)
    }

    pub fn solve(&self) -> Result<Solution, LinsolveError> {
        Ok(self.build()?.solve())
    }
}

/// Unknown coefficients are indexed by `(slot, monomial)`, equations by
/// `(identity, monomial)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseLinearSystem {
    pub columns: Vec<(String, Monomial)>,
    pub rows: Vec<(usize, Monomial)>,
    /// Per row, `(column, coefficient)` sorted by column.
    pub entries: Vec<Vec<(usize, Rational)>>,
    pub rhs: Vec<Rational>,
}

/// Why a system has no solution: the listed original row reduced to `0 = c`
/// with `c != 0` after subtracting the listed pivot rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfeasibilityWitness {
    pub identity: usize,
    pub monomial: Monomial,
    pub reduced_with: Vec<(usize, Monomial)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Feasible(Assignment),
    Infeasible(InfeasibilityWitness),
}

impl Solution {
    pub fn assignment(&self) -> Option<&Assignment> {
        match self {
            Solution::Feasible(a) => Some(a),
            Solution::Infeasible(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Solution::Feasible(_))
    }
}

/// All monomials of total degree `d` in `vars`.
pub fn monomials_of_degree(vars: &[Var], d: u32) -> Vec<Monomial> {
    fn go(vars: &[Var], d: u32, acc: &mut Vec<(Var, u32)>, out: &mut Vec<Monomial>) {
        if d == 0 {
            out.push(Monomial::from_pairs(acc.iter().copied()));
            return;
        }
        let Some((&first, rest)) = vars.split_first() else { return };
        for e in (0..=d).rev() {
            if e > 0 {
                acc.push((first, e));
            }
            go(rest, d - e, acc, out);
            if e > 0 {
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(vars, d, &mut Vec::new(), &mut out);
    out
}

fn sort_canonically(ms: &mut [Monomial]) {
    ms.sort_by(|a, b| canonical_cmp(b, a));
}

fn identity_degree(id: &Identity, index: usize) -> Result<Option<i64>, LinsolveError> {
    if !id.target.is_homogeneous() || id.summands.iter().any(|s| !s.generator.is_homogeneous()) {
        return Err(LinsolveError::NotHomogeneous(index));
    }
    if let Some(d) = id.target.degree() {
        return Ok(Some(d as i64));
    }
    Ok(id
        .summands
        .iter()
        .find_map(|s| s.generator.degree().filter(|_| s.degree >= 0).map(|g| g as i64 + s.degree)))
}

pub fn build_system(p: &GradedMembershipProblem) -> Result<SparseLinearSystem, LinsolveError> {
    // slot -> (degree, variables), in order of first appearance
    let mut slot_order: Vec<String> = Vec::new();
    let mut slot_info: HashMap<String, (i64, BTreeSet<Var>)> = HashMap::new();
    let mut active: Vec<Vec<&Summand>> = Vec::new();
    for (i, id) in p.identities.iter().enumerate() {
        let deg = identity_degree(id, i)?;
        let mut vars: BTreeSet<Var> = id.target.vars();
        for s in &id.summands {
            vars.extend(s.generator.vars());
        }
        let mut kept = Vec::new();
        for s in &id.summands {
            if let Some(&(d, _)) = slot_info.get(&s.slot) {
                if d != s.degree {
                    return Err(LinsolveError::SlotDegreeConflict(s.slot.clone()));
                }
            }
            let entry = slot_info.entry(s.slot.clone()).or_insert_with(|| {
                slot_order.push(s.slot.clone());
                (s.degree, BTreeSet::new())
            });
            if s.degree < 0 || s.generator.is_zero() {
                continue;
            }
            let g = s.generator.degree().unwrap() as i64;
            if let Some(d) = deg {
                if g + s.degree != d {
                    return Err(LinsolveError::DegreeMismatch {
                        identity: i,
                        slot: s.slot.clone(),
                        expected: d - g,
                        found: s.degree,
                    });
                }
            }
            entry.1.extend(vars.iter().copied());
            kept.push(s);
        }
        active.push(kept);
    }

    let mut columns: Vec<(String, Monomial)> = Vec::new();
    let mut col_index: HashMap<(String, Monomial), usize> = HashMap::new();
    for slot in &slot_order {
        let (d, vars) = &slot_info[slot];
        if *d < 0 {
            continue;
        }
        let vars: Vec<Var> = vars.iter().copied().collect();
        let mut ms = monomials_of_degree(&vars, *d as u32);
        sort_canonically(&mut ms);
        for m in ms {
            col_index.insert((slot.clone(), m.clone()), columns.len());
            columns.push((slot.clone(), m));
        }
    }

    let mut row_map: BTreeMap<(usize, Monomial), (BTreeMap<usize, Rational>, Rational)> = BTreeMap::new();
    for (i, id) in p.identities.iter().enumerate() {
        for (m, c) in id.target.terms() {
            row_map.entry((i, m.clone())).or_insert_with(|| (BTreeMap::new(), Rational::zero())).1 = c.clone();
        }
        for s in &active[i] {
            for (col, (slot, m)) in columns.iter().enumerate() {
                if *slot != s.slot {
                    continue;
                }
                for (n, c) in s.generator.terms() {
                    let row = row_map.entry((i, m.mul(n))).or_insert_with(|| (BTreeMap::new(), Rational::zero()));
                    let v = row.0.entry(col).or_insert_with(Rational::zero);
                    *v += c;
                }
            }
        }
    }

    // canonical row order: by identity, then canonical monomial order
    let mut keyed: Vec<((usize, Monomial), (BTreeMap<usize, Rational>, Rational))> = row_map.into_iter().collect();
    keyed.sort_by(|a, b| match a.0 .0.cmp(&b.0 .0) {
        Ordering::Equal => canonical_cmp(&b.0 .1, &a.0 .1),
        o => o,
    });
    let mut rows = Vec::with_capacity(keyed.len());
    let mut entries = Vec::with_capacity(keyed.len());
    let mut rhs = Vec::with_capacity(keyed.len());
    for (key, (row, r)) in keyed {
        rows.push(key);
        entries.push(row.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        rhs.push(r);
    }
    Ok(SparseLinearSystem { columns, rows, entries, rhs })
}

/// Integer row: sorted columns, values, right-hand side, and the original
/// row it came from.
#[derive(Clone, Debug)]
struct IntRow {
    cols: Vec<usize>,
    vals: Vec<BigInt>,
    rhs: BigInt,
}

impl IntRow {
    fn from_rational(entries: &[(usize, Rational)], rhs: &Rational) -> IntRow {
        let mut lcm = rhs.denom().clone();
        for (_, v) in entries {
            lcm = lcm.lcm(v.denom());
        }
        let scale = |v: &Rational| (v * Rational::from_integer(lcm.clone())).to_integer();
        let mut row = IntRow {
            cols: entries.iter().map(|e| e.0).collect(),
            vals: entries.iter().map(|e| scale(&e.1)).collect(),
            rhs: scale(rhs),
        };
        row.make_primitive();
        row
    }

    fn make_primitive(&mut self) {
        let mut g = self.rhs.abs();
        for v in &self.vals {
            if g.is_one() {
                return;
            }
            g = g.gcd(v);
        }
        if g.is_zero() || g.is_one() {
            return;
        }
        for v in &mut self.vals {
            *v /= &g;
        }
        self.rhs /= &g;
    }

    /// `self * a - other * b`, with `a`, `b` chosen to cancel the leading
    /// entry of `self` against the leading entry of `other`.
    fn eliminate(&self, other: &IntRow) -> IntRow {
        let (x, y) = (&self.vals[0], &other.vals[0]);
        let g = x.gcd(y);
        let a = y / &g;
        let b = x / &g;
        let mut cols = Vec::with_capacity(self.cols.len() + other.cols.len());
        let mut vals = Vec::with_capacity(self.cols.len() + other.cols.len());
        let (mut i, mut j) = (1, 1);
        while i < self.cols.len() || j < other.cols.len() {
            let ci = self.cols.get(i).copied().unwrap_or(usize::MAX);
            let cj = other.cols.get(j).copied().unwrap_or(usize::MAX);
            let (c, v) = match ci.cmp(&cj) {
                Ordering::Less => {
                    i += 1;
                    (ci, &self.vals[i - 1] * &a)
                }
                Ordering::Greater => {
                    j += 1;
                    (cj, -(&other.vals[j - 1] * &b))
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (ci, &self.vals[i - 1] * &a - &other.vals[j - 1] * &b)
                }
            };
            if !v.is_zero() {
                cols.push(c);
                vals.push(v);
            }
        }
        let mut out = IntRow { cols, vals, rhs: &self.rhs * &a - &other.rhs * &b };
        out.make_primitive();
        out
    }
}

impl SparseLinearSystem {
    pub fn num_unknowns(&self) -> usize {
        self.columns.len()
    }

    pub fn num_equations(&self) -> usize {
        self.rows.len()
    }

    /// Fraction-free sparse elimination; free unknowns are set to zero.
    pub fn solve(&self) -> Solution {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| (self.entries[r].len(), r));
        // pivot column -> (row, original row index)
        let mut pivots: BTreeMap<usize, (IntRow, usize)> = BTreeMap::new();
        for r in order {
            let mut row = IntRow::from_rational(&self.entries[r], &self.rhs[r]);
            let mut used = Vec::new();
            while let Some(&lead) = row.cols.first() {
                match pivots.get(&lead) {
                    Some((p, origin)) => {
                        used.push(*origin);
                        row = row.eliminate(p);
                    }
                    None => break,
                }
            }
            if row.cols.is_empty() {
                if !row.rhs.is_zero() {
                    return Solution::Infeasible(InfeasibilityWitness {
                        identity: self.rows[r].0,
                        monomial: self.rows[r].1.clone(),
                        reduced_with: used.into_iter().map(|o| self.rows[o].clone()).collect(),
                    });
                }
                continue;
            }
            pivots.insert(row.cols[0], (row, r));
        }
        let mut x: Vec<Rational> = vec![Rational::zero(); self.columns.len()];
        for (&lead, (row, _)) in pivots.iter().rev() {
            let mut acc = Rational::from_integer(row.rhs.clone());
            for (c, v) in row.cols.iter().zip(&row.vals).skip(1) {
                if !x[*c].is_zero() {
                    acc -= &x[*c] * Rational::from_integer(v.clone());
                }
            }
            x[lead] = acc / Rational::from_integer(row.vals[0].clone());
        }
        let mut out: Assignment = BTreeMap::new();
        for (slot, _) in &self.columns {
            out.entry(slot.clone()).or_default();
        }
        for (c, v) in x.into_iter().enumerate() {
            if !v.is_zero() {
                let (slot, m) = &self.columns[c];
                out.get_mut(slot).unwrap().add_term(m.clone(), v);
            }
        }
        Solution::Feasible(out)
    }

    /// Text dump: a header line, then one `row col num/den` line per entry
    /// (1-based), then `row rhs num/den` lines for nonzero right-hand sides.
    pub fn dump(&self) -> String {
        let nnz: usize = self.entries.iter().map(Vec::len).sum();
        let mut out = format!("{} {} {}\n", self.rows.len(), self.columns.len(), nnz);
        for (r, row) in self.entries.iter().enumerate() {
            for (c, v) in row {
                let _ = writeln!(out, "{} {} {}/{}", r + 1, c + 1, v.numer(), v.denom());
            }
        }
        for (r, v) in self.rhs.iter().enumerate() {
            if !v.is_zero() {
                let _ = writeln!(out, "{} rhs {}/{}", r + 1, v.numer(), v.denom());
            }
        }
        out
    }
}

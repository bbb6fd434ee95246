//! Superset families, outcome vectors and design analysis.
//!
//! Two families are supported and never mixed in one report:
//!
//! * **strict**: exactly `s` pairwise disjoint parts, each of size exactly `l`;
//! * **relaxed**: between 1 and `s` parts of size at most `l` forming an
//!   antichain (no part contains another).
//!
//! A superset is bad when its outcome vector collides with that of another
//! superset of the same family.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::bits::{self, BitVector, Word};
use crate::code::{BinaryCode, IndexSet};
use crate::combin::{binomial_big, binomial_u128, next_lex};
use crate::cover::{self, AnalyzeOptions};
use crate::error::{Error, Result};
use crate::ratio::Fraction;

pub const DEFAULT_SUPERSET_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Strict,
    Relaxed,
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Model::Strict),
            "relaxed" => Ok(Model::Relaxed),
            other => Err(Error::Parameter(format!("unknown model {other:?}, expected strict|relaxed"))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Strict => "strict",
            Model::Relaxed => "relaxed",
        })
    }
}

/// A family of parts in canonical order (sorted lexicographically, which for
/// disjoint parts is the same as sorting by minimum element).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Superset {
    parts: Vec<IndexSet>,
}

impl Superset {
    /// Canonicalises `parts` and checks the structural condition of `model`:
    /// strict parts are pairwise disjoint with one common size, relaxed parts
    /// form an antichain. Empty parts are rejected.
    pub fn new(mut parts: Vec<IndexSet>, model: Model) -> Result<Self> {
        if parts.iter().any(IndexSet::is_empty) {
            return Err(Error::Parameter("superset parts must be nonempty".into()));
        }
        parts.sort();
        for (a, pa) in parts.iter().enumerate() {
            for pb in &parts[a + 1..] {
                match model {
                    Model::Strict => {
                        if pa.len() != pb.len() {
                            return Err(Error::Parameter(format!(
                                "strict parts must have equal sizes: {pa} vs {pb}"
                            )));
                        }
                        if !pa.is_disjoint(pb) {
                            return Err(Error::Parameter(format!("strict parts must be disjoint: {pa} and {pb}")));
                        }
                    }
                    Model::Relaxed => {
                        if pa.is_subset_of(pb) || pb.is_subset_of(pa) {
                            return Err(Error::Parameter(format!(
                                "relaxed parts must form an antichain: {pa} and {pb}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Superset { parts })
    }

    pub(crate) fn from_canonical(parts: Vec<IndexSet>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] < w[1]));
        Superset { parts }
    }

    pub fn parts(&self) -> &[IndexSet] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Whether the superset belongs to the `(s, l)` family of `model`.
    pub fn fits(&self, model: Model, s: usize, l: usize) -> bool {
        match model {
            Model::Strict => self.parts.len() == s && self.parts.iter().all(|p| p.len() == l),
            Model::Relaxed => {
                !self.parts.is_empty() && self.parts.len() <= s && self.parts.iter().all(|p| p.len() <= l)
            }
        }
    }

    /// Parses `{1,4}|{2,3}` (1-based).
    pub fn parse(text: &str, model: Model) -> Result<Self> {
        let parts = text
            .split('|')
            .map(str::parse::<IndexSet>)
            .collect::<Result<Vec<_>>>()?;
        Superset::new(parts, model)
    }
}

impl fmt::Display for Superset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("|"))
    }
}

impl fmt::Debug for Superset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Superset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.parts.len()))?;
        for p in &self.parts {
            seq.serialize_element(p)?;
        }
        seq.end()
    }
}

/// `r(p, X)`: OR over parts of the AND of each part's columns.
pub fn outcome(code: &BinaryCode, p: &Superset) -> Result<BitVector> {
    if p.is_empty() {
        return Err(Error::Parameter("outcome of an empty superset".into()));
    }
    for part in p.parts() {
        code.check_set(part)?;
    }
    let mut acc = vec![0; code.stride()];
    let mut tmp = vec![0; code.stride()];
    outcome_words(code, p.parts().iter().map(IndexSet::as_slice), &mut acc, &mut tmp);
    BitVector::from_words(code.n_rows(), acc)
}

/// Unchecked outcome kernel over parts given as index slices.
pub(crate) fn outcome_words<'a>(
    code: &BinaryCode,
    parts: impl Iterator<Item = &'a [usize]>,
    acc: &mut [Word],
    tmp: &mut [Word],
) {
    acc.fill(0);
    for part in parts {
        tmp.copy_from_slice(code.column(part[0]));
        for &j in &part[1..] {
            bits::and_assign(tmp, code.column(j));
        }
        bits::or_assign(acc, tmp);
    }
}

/// `|strict family| = C(t, s*l) * C(s*l, (s-1)*l) * ... * C(2l, l) / s!`.
pub fn count_strict(t: usize, s: usize, l: usize) -> BigUint {
    count_strict_big(&BigUint::from(t), s, l)
}

pub(crate) fn count_strict_big(t: &BigUint, s: usize, l: usize) -> BigUint {
    let sl = (s * l) as u64;
    let mut acc = binomial_big(t, sl);
    if acc.is_zero() {
        return acc;
    }
    for i in (2..=s as u64).rev() {
        acc *= binomial_big(&BigUint::from(i * l as u64), l as u64);
    }
    let mut fact = BigUint::one();
    for i in 2..=s as u64 {
        fact *= BigUint::from(i);
    }
    acc / fact
}

/// Streams the strict family in canonical form: parts ordered by minimum
/// element, each part a lexicographic combination of the elements still free.
pub struct StrictSupersets {
    t: usize,
    s: usize,
    l: usize,
    pools: Vec<Vec<usize>>,
    idx: Vec<Vec<usize>>,
    used: Vec<bool>,
    fixed_first: bool,
    state: IterState,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

impl StrictSupersets {
    pub fn new(t: usize, s: usize, l: usize) -> Result<Self> {
        if s == 0 || l == 0 {
            return Err(Error::Parameter("need s >= 1 and l >= 1".into()));
        }
        if s * l > t {
            return Err(Error::Parameter(format!("need s*l <= t, got s={s}, l={l}, t={t}")));
        }
        Ok(StrictSupersets {
            t,
            s,
            l,
            pools: vec![Vec::new(); s],
            idx: vec![Vec::new(); s],
            used: vec![false; t],
            fixed_first: false,
            state: IterState::Fresh,
        })
    }

    /// Only the supersets whose minimum-element part is `first`.
    pub fn with_first_part(t: usize, s: usize, l: usize, first: &[usize]) -> Result<Self> {
        let mut it = StrictSupersets::new(t, s, l)?;
        if first.len() != l || first.iter().any(|&j| j >= t) {
            return Err(Error::Parameter("first part must be an l-subset of [t]".into()));
        }
        it.pools[0] = (0..t).collect();
        it.idx[0] = first.to_vec();
        for &j in first {
            it.used[j] = true;
        }
        it.fixed_first = true;
        Ok(it)
    }

    fn part(&self, level: usize) -> impl Iterator<Item = usize> + '_ {
        self.idx[level].iter().map(move |&k| self.pools[level][k])
    }

    fn release(&mut self, level: usize) {
        for k in 0..self.l {
            let e = self.pools[level][self.idx[level][k]];
            self.used[e] = false;
        }
    }

    fn occupy(&mut self, level: usize) {
        for k in 0..self.l {
            let e = self.pools[level][self.idx[level][k]];
            self.used[e] = true;
        }
    }

    fn init_level(&mut self, level: usize) -> bool {
        let floor = if level == 0 {
            0
        } else {
            self.pools[level - 1][self.idx[level - 1][0]] + 1
        };
        let pool: Vec<usize> = (floor..self.t).filter(|&e| !self.used[e]).collect();
        // the remaining levels each need l further elements above this part's minimum
        if pool.len() < self.l * (self.s - level) {
            return false;
        }
        self.pools[level] = pool;
        self.idx[level] = (0..self.l).collect();
        self.occupy(level);
        true
    }

    fn advance_level(&mut self, level: usize) -> bool {
        if level == 0 && self.fixed_first {
            return false;
        }
        self.release(level);
        let n = self.pools[level].len();
        if !next_lex(&mut self.idx[level], n) {
            return false;
        }
        // the minimum must leave room for the deeper levels; later minima only grow
        if n - self.idx[level][0] < self.l * (self.s - level) {
            return false;
        }
        self.occupy(level);
        true
    }

    /// Fills levels `from..s`, backtracking as needed.
    fn settle(&mut self, mut level: usize) -> bool {
        while level < self.s {
            if self.init_level(level) {
                level += 1;
                continue;
            }
            loop {
                if level == 0 {
                    return false;
                }
                level -= 1;
                if self.advance_level(level) {
                    level += 1;
                    break;
                }
            }
        }
        true
    }

    fn current(&self) -> Superset {
        let parts = (0..self.s)
            .map(|lv| IndexSet::from_sorted(self.part(lv).collect()))
            .collect();
        Superset::from_canonical(parts)
    }

    /// Advances to the next superset; returns the part slices through `visit`.
    fn step(&mut self) -> bool {
        let ok = match self.state {
            IterState::Done => return false,
            IterState::Fresh => {
                self.state = IterState::Running;
                if self.fixed_first {
                    self.settle(1)
                } else {
                    self.settle(0)
                }
            }
            IterState::Running => {
                let mut level = self.s - 1;
                loop {
                    if self.advance_level(level) {
                        break self.settle(level + 1);
                    }
                    if level == 0 {
                        break false;
                    }
                    level -= 1;
                }
            }
        };
        if !ok {
            self.state = IterState::Done;
        }
        ok
    }

    /// Runs `f` on each superset as a slice of parts without allocating.
    pub fn for_each_parts(mut self, mut f: impl FnMut(&[Vec<usize>])) {
        let mut parts = vec![Vec::with_capacity(self.l); self.s];
        while self.step() {
            for (lv, p) in parts.iter_mut().enumerate() {
                p.clear();
                p.extend(self.part(lv));
            }
            f(&parts);
        }
    }
}

impl Iterator for StrictSupersets {
    type Item = Superset;
    fn next(&mut self) -> Option<Superset> {
        self.step().then(|| self.current())
    }
}

pub fn enumerate_strict(t: usize, s: usize, l: usize) -> Result<StrictSupersets> {
    StrictSupersets::new(t, s, l)
}

/// Streams the relaxed family: every antichain of 1..=s parts of size 1..=l.
///
/// Candidate parts are indexed in size-then-lexicographic order and families are
/// increasing index sequences, so a new part can only be a superset (never a
/// subset) of an earlier one; the antichain condition is enforced incrementally
/// on that side.
pub struct RelaxedSupersets {
    s: usize,
    candidates: Vec<Vec<usize>>,
    masks: Vec<Vec<Word>>,
    stack: Vec<usize>,
    started: bool,
}

impl RelaxedSupersets {
    pub fn new(t: usize, s: usize, l: usize) -> Result<Self> {
        if s == 0 || l == 0 || t == 0 {
            return Err(Error::Parameter("need t, s, l >= 1".into()));
        }
        let words = bits::words_for(t);
        let mut candidates = Vec::new();
        for size in 1..=l.min(t) {
            let mut c: Vec<usize> = (0..size).collect();
            loop {
                candidates.push(c.clone());
                if !next_lex(&mut c, t) {
                    break;
                }
            }
        }
        let masks = candidates
            .iter()
            .map(|c| {
                let mut m = vec![0; words];
                for &e in c {
                    m[e / bits::WORD_BITS] |= 1 << (e % bits::WORD_BITS);
                }
                m
            })
            .collect();
        Ok(RelaxedSupersets {
            s,
            candidates,
            masks,
            stack: Vec::new(),
            started: false,
        })
    }

    fn compatible(&self, cand: usize) -> bool {
        self.stack
            .iter()
            .all(|&p| !bits::is_covered(&self.masks[p], &self.masks[cand]))
    }

    /// Next compatible candidate at index `>= from`.
    fn next_compatible(&self, from: usize) -> Option<usize> {
        (from..self.candidates.len()).find(|&c| self.compatible(c))
    }

    fn step(&mut self) -> bool {
        if !self.started {
            self.started = true;
            if self.candidates.is_empty() {
                return false;
            }
            self.stack.push(0);
            return true;
        }
        // depth-first: try to extend, else move the top forward, else pop
        if self.stack.len() < self.s {
            let from = *self.stack.last().unwrap() + 1;
            if let Some(c) = self.next_compatible(from) {
                self.stack.push(c);
                return true;
            }
        }
        while let Some(top) = self.stack.pop() {
            if let Some(c) = self.next_compatible(top + 1) {
                self.stack.push(c);
                return true;
            }
        }
        false
    }

    pub fn for_each_parts(mut self, mut f: impl FnMut(&[&[usize]])) {
        while self.step() {
            let parts: Vec<&[usize]> = self.stack.iter().map(|&c| self.candidates[c].as_slice()).collect();
            f(&parts);
        }
    }
}

impl Iterator for RelaxedSupersets {
    type Item = Superset;
    fn next(&mut self) -> Option<Superset> {
        if !self.step() {
            return None;
        }
        let mut parts: Vec<IndexSet> = self
            .stack
            .iter()
            .map(|&c| IndexSet::from_sorted(self.candidates[c].clone()))
            .collect();
        parts.sort();
        Some(Superset::from_canonical(parts))
    }
}

pub fn enumerate_relaxed(t: usize, s: usize, l: usize) -> Result<RelaxedSupersets> {
    RelaxedSupersets::new(t, s, l)
}

/// Upper estimate of the relaxed family size: `sum_{k<=s} C(M, k)` with
/// `M = sum_{i<=l} C(t, i)` candidate parts.
pub fn relaxed_count_estimate(t: usize, s: usize, l: usize) -> BigUint {
    let m: BigUint = (1..=l.min(t))
        .map(|i| binomial_big(&BigUint::from(t), i as u64))
        .sum();
    (1..=s).map(|k| binomial_big(&m, k as u64)).sum()
}

/// The counting lower bound `C(C(t, l), s)` on the relaxed family size.
pub fn relaxed_count_lower_bound(t: usize, s: usize, l: usize) -> BigUint {
    let m = binomial_big(&BigUint::from(t), l as u64);
    binomial_big(&m, s as u64)
}

/// Exact size of the relaxed family by enumeration (budgeted).
pub fn count_relaxed(t: usize, s: usize, l: usize, budget: u64) -> Result<u64> {
    check_family_budget(t, s, l, Model::Relaxed, budget)?;
    let mut n = 0;
    RelaxedSupersets::new(t, s, l)?.for_each_parts(|_| n += 1);
    Ok(n)
}

pub(crate) fn family_size_bound(t: usize, s: usize, l: usize, model: Model) -> BigUint {
    match model {
        Model::Strict => count_strict(t, s, l),
        Model::Relaxed => relaxed_count_estimate(t, s, l),
    }
}

pub(crate) fn check_family_budget(t: usize, s: usize, l: usize, model: Model, budget: u64) -> Result<()> {
    let size = family_size_bound(t, s, l, model);
    if size > BigUint::from(budget) {
        return Err(Error::Budget {
            needed: size.to_string(),
            budget,
            hint: format!("the {model} (s,l)-family is too large to enumerate; raise --budget or use smaller parameters"),
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct DesignOptions {
    pub budget: u64,
    pub cap: usize,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            budget: DEFAULT_SUPERSET_BUDGET,
            cap: crate::cover::DEFAULT_SET_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DesignAnalysisReport {
    pub s: usize,
    pub l: usize,
    pub t: usize,
    pub model: Model,
    pub n_bad: u64,
    pub n_good: u64,
    pub total: u64,
    pub epsilon: Fraction,
    pub bad_supersets: Vec<Superset>,
    pub bad_truncated: bool,
    /// Number of distinct outcome vectors.
    pub distinct_outcomes: u64,
}

impl DesignAnalysisReport {
    /// Cover-free design: no collisions at all.
    pub fn is_cover_free(&self) -> bool {
        self.n_bad == 0
    }
}

/// Visits every superset of the family as part slices.
fn for_each_family(t: usize, s: usize, l: usize, model: Model, mut f: impl FnMut(&[&[usize]])) -> Result<()> {
    match model {
        Model::Strict => StrictSupersets::new(t, s, l)?.for_each_parts(|parts| {
            let v: Vec<&[usize]> = parts.iter().map(Vec::as_slice).collect();
            f(&v);
        }),
        Model::Relaxed => RelaxedSupersets::new(t, s, l)?.for_each_parts(|p| f(p)),
    }
    Ok(())
}

type OutcomeCounts = HashMap<Vec<Word>, u32>;

fn count_outcomes(code: &BinaryCode, s: usize, l: usize, model: Model) -> Result<(OutcomeCounts, u64)> {
    let t = code.n_cols();
    let w = code.stride();
    match model {
        Model::Strict => {
            // partition by the minimum-element part, merge per-worker maps
            let mut firsts = Vec::new();
            let mut c: Vec<usize> = (0..l).collect();
            loop {
                firsts.push(c.clone());
                if !next_lex(&mut c, t) {
                    break;
                }
            }
            let (map, total) = firsts
                .par_iter()
                .map(|first| {
                    let mut map = OutcomeCounts::new();
                    let mut total = 0u64;
                    let mut acc = vec![0; w];
                    let mut tmp = vec![0; w];
                    StrictSupersets::with_first_part(t, s, l, first)
                        .expect("valid first part")
                        .for_each_parts(|parts| {
                            outcome_words(code, parts.iter().map(Vec::as_slice), &mut acc, &mut tmp);
                            *map.entry(acc.clone()).or_insert(0) += 1;
                            total += 1;
                        });
                    (map, total)
                })
                .reduce(
                    || (OutcomeCounts::new(), 0),
                    |(mut a, ta), (b, tb)| {
                        for (k, v) in b {
                            *a.entry(k).or_insert(0) += v;
                        }
                        (a, ta + tb)
                    },
                );
            Ok((map, total))
        }
        Model::Relaxed => {
            let mut map = OutcomeCounts::new();
            let mut total = 0u64;
            let mut acc = vec![0; w];
            let mut tmp = vec![0; w];
            for_each_family(t, s, l, model, |parts| {
                outcome_words(code, parts.iter().copied(), &mut acc, &mut tmp);
                *map.entry(acc.clone()).or_insert(0) += 1;
                total += 1;
            })?;
            Ok((map, total))
        }
    }
}

/// Groups the family by outcome vector and reports the colliding supersets.
pub fn analyze_design(
    code: &BinaryCode,
    s: usize,
    l: usize,
    model: Model,
    opts: &DesignOptions,
) -> Result<DesignAnalysisReport> {
    let t = code.n_cols();
    if s == 0 || l == 0 {
        return Err(Error::Parameter("need s >= 1 and l >= 1".into()));
    }
    if model == Model::Strict && s * l > t {
        return Err(Error::Parameter(format!("need s*l <= t, got s={s}, l={l}, t={t}")));
    }
    check_family_budget(t, s, l, model, opts.budget)?;
    let (counts, total) = count_outcomes(code, s, l, model)?;

    let n_bad: u64 = counts.values().filter(|&&c| c >= 2).map(|&c| c as u64).sum();
    let mut bad = Vec::new();
    if n_bad > 0 && opts.cap > 0 {
        let w = code.stride();
        let mut acc = vec![0; w];
        let mut tmp = vec![0; w];
        for_each_family(t, s, l, model, |parts| {
            outcome_words(code, parts.iter().copied(), &mut acc, &mut tmp);
            if counts[&acc] >= 2 {
                let mut ps: Vec<IndexSet> = parts.iter().map(|p| IndexSet::from_sorted(p.to_vec())).collect();
                ps.sort();
                bad.push(Superset::from_canonical(ps));
            }
        })?;
        bad.sort();
        bad.truncate(opts.cap);
    }
    if model == Model::Strict {
        debug_assert_eq!(BigUint::from(total), count_strict(t, s, l));
    }
    Ok(DesignAnalysisReport {
        s,
        l,
        t,
        model,
        n_bad,
        n_good: total - n_bad,
        total,
        epsilon: Fraction::new(n_bad as u128, total.max(1) as u128),
        bad_truncated: (n_bad as usize) > bad.len(),
        bad_supersets: bad,
        distinct_outcomes: counts.len() as u64,
    })
}

/// Truth values of the two implications between cover-free codes and designs.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ImplicationReport {
    pub s: usize,
    pub l: usize,
    /// X is a cover-free (s,l)-code.
    pub code_s_l: bool,
    /// X is a cover-free (s,l)-design (relaxed family).
    pub design_s_l: bool,
    /// X is a cover-free (s-1,l)-code; `None` when s = 1.
    pub code_s_minus_1_l: Option<bool>,
    /// X is a cover-free (s,l-1)-code; `None` when l = 1.
    pub code_s_l_minus_1: Option<bool>,
    /// code(s,l) => design(s,l)
    pub code_implies_design: bool,
    /// design(s,l) => code(s-1,l) and code(s,l-1)
    pub design_implies_codes: bool,
}

impl ImplicationReport {
    pub fn violated(&self) -> bool {
        !(self.code_implies_design && self.design_implies_codes)
    }
}

/// Exact check of: cover-free code => cover-free design => cover-free codes
/// with one parameter lowered. Needs `s + l <= t`.
pub fn check_implications(code: &BinaryCode, s: usize, l: usize, opts: &DesignOptions) -> Result<ImplicationReport> {
    cover::check_params(code, s, l)?;
    let aopts = AnalyzeOptions {
        budget: cover::DEFAULT_BUDGET.max(opts.budget),
        keep_sets: false,
        ..Default::default()
    };
    let cf = |s: usize, l: usize| cover::is_cf_code(code, s, l, 0.0, &aopts);
    let code_s_l = cf(s, l)?;
    let design = analyze_design(code, s, l, Model::Relaxed, &DesignOptions { cap: 0, ..opts.clone() })?;
    let design_s_l = design.is_cover_free();
    let code_s_minus_1_l = if s > 1 { Some(cf(s - 1, l)?) } else { None };
    let code_s_l_minus_1 = if l > 1 { Some(cf(s, l - 1)?) } else { None };
    let code_implies_design = !code_s_l || design_s_l;
    let design_implies_codes =
        !design_s_l || (code_s_minus_1_l.unwrap_or(true) && code_s_l_minus_1.unwrap_or(true));
    Ok(ImplicationReport {
        s,
        l,
        code_s_l,
        design_s_l,
        code_s_minus_1_l,
        code_s_l_minus_1,
        code_implies_design,
        design_implies_codes,
    })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ProjectionBound {
    pub code_epsilon: Fraction,
    /// `l^s * code_epsilon`, unclipped.
    pub bound: f64,
    /// `min(1, bound)`.
    pub bound_clipped: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub design_epsilon: Option<Fraction>,
    /// `design_epsilon <= min(1, bound)` when the design was analysed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
}

/// Bounds the strict-design bad fraction through the bad fraction of the
/// `s`-subsets: every bad superset has a bad transversal, and each `s`-set is a
/// transversal of exactly `l^s / C(t,s) * |family|` supersets.
pub fn projection_bad_bound(
    code: &BinaryCode,
    s: usize,
    l: usize,
    with_design: bool,
    opts: &DesignOptions,
) -> Result<ProjectionBound> {
    let aopts = AnalyzeOptions {
        keep_sets: false,
        ..Default::default()
    };
    let report = cover::analyze(code, s, l, cover::Mode::Exact, &aopts)?;
    let factor = (l as f64).powi(s as i32);
    let bound = report.epsilon.value() * factor;
    let bound_clipped = bound.min(1.0);
    let (design_epsilon, holds) = if with_design {
        let d = analyze_design(code, s, l, Model::Strict, &DesignOptions { cap: 0, ..opts.clone() })?;
        // exact form of design_eps <= l^s * code_eps (design_eps never exceeds 1)
        let lhs = BigUint::from(d.n_bad) * BigUint::from(report.total.unwrap());
        let rhs = BigUint::from(l).pow(s as u32) * BigUint::from(report.n_bad) * BigUint::from(d.total);
        (Some(d.epsilon), Some(lhs <= rhs))
    } else {
        (None, None)
    };
    Ok(ProjectionBound {
        code_epsilon: report.epsilon,
        bound,
        bound_clipped,
        design_epsilon,
        holds,
    })
}

/// `C(t, s)` as `f64`, used for reporting.
pub fn subsets_f64(t: usize, s: usize) -> f64 {
    binomial_u128(t as u64, s as u64).map_or(f64::INFINITY, |v| v as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;

    fn sup(text: &str, model: Model) -> Superset {
        Superset::parse(text, model).unwrap()
    }

    #[test]
    fn outcomes_on_reference_code() {
        let x = golden::reference_code();
        assert_eq!(outcome(&x, &sup("{1,4}|{2,3}", Model::Strict)).unwrap().to_string(), "11100");
        assert_eq!(outcome(&x, &sup("{1,2}|{4,5}", Model::Strict)).unwrap().to_string(), "10011");
        assert_eq!(outcome(&x, &sup("{3}", Model::Relaxed)).unwrap(), x.column_vector(2));
    }

    #[test]
    fn canonical_form_is_order_free() {
        let a = sup("{5,1}|{3,2}", Model::Strict);
        let b = sup("{2,3}|{1,5}", Model::Strict);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "{1,5}|{2,3}");
        assert_eq!(serde_json::to_string(&a).unwrap(), "[[1,5],[2,3]]");
    }

    #[test]
    fn structural_checks() {
        assert!(Superset::parse("{1,2}|{2,3}", Model::Strict).is_err());
        assert!(Superset::parse("{1,2}|{3}", Model::Strict).is_err());
        assert!(Superset::parse("{1,2}|{1}", Model::Relaxed).is_err());
        assert!(Superset::parse("{1,2}|{1,3}", Model::Relaxed).is_ok());
    }

    #[test]
    fn strict_counts() {
        assert_eq!(count_strict(5, 2, 2), BigUint::from(15u32));
        assert_eq!(enumerate_strict(5, 2, 2).unwrap().count(), 15);
        let listed: Vec<String> = enumerate_strict(3, 2, 1).unwrap().map(|p| p.to_string()).collect();
        assert_eq!(listed, vec!["{1}|{2}", "{1}|{3}", "{2}|{3}"]);
        assert_eq!(enumerate_strict(7, 1, 3).unwrap().count(), 35);
        assert!(enumerate_strict(5, 3, 2).is_err());
    }

    #[test]
    fn strict_family_matches_closed_form() {
        for t in 1..=10 {
            for s in 1..=t {
                for l in 1..=t {
                    if s * l > t {
                        continue;
                    }
                    let n = enumerate_strict(t, s, l).unwrap().count() as u64;
                    assert_eq!(BigUint::from(n), count_strict(t, s, l), "t={t} s={s} l={l}");
                }
            }
        }
    }

    #[test]
    fn strict_family_is_duplicate_free_and_canonical() {
        let all: Vec<Superset> = enumerate_strict(7, 2, 2).unwrap().collect();
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
        for p in &all {
            assert!(p.fits(Model::Strict, 2, 2));
            assert_eq!(&Superset::new(p.parts().to_vec(), Model::Strict).unwrap(), p);
        }
    }

    #[test]
    fn relaxed_counts() {
        assert_eq!(enumerate_relaxed(3, 1, 2).unwrap().count(), 6);
        // four singletons and six pairs of singletons
        assert_eq!(enumerate_relaxed(4, 2, 1).unwrap().count(), 10);
        let n = count_relaxed(4, 2, 2, 1_000_000).unwrap();
        assert!(BigUint::from(n) >= relaxed_count_lower_bound(4, 2, 2));
        assert_eq!(relaxed_count_lower_bound(4, 2, 2), BigUint::from(15u32));
    }

    #[test]
    fn relaxed_family_is_antichain_and_distinct() {
        let all: Vec<Superset> = enumerate_relaxed(5, 3, 2).unwrap().collect();
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
        for p in &all {
            assert!(p.fits(Model::Relaxed, 3, 2));
            assert!(Superset::new(p.parts().to_vec(), Model::Relaxed).is_ok());
        }
    }

    #[test]
    fn relaxed_budget_refusal() {
        assert!(matches!(count_relaxed(30, 3, 3, 1000), Err(Error::Budget { .. })));
    }

    #[test]
    fn reference_design_collisions() {
        let x = golden::reference_code();
        let r = analyze_design(&x, 2, 2, Model::Strict, &DesignOptions::default()).unwrap();
        let listed: Vec<String> = r.bad_supersets.iter().map(ToString::to_string).collect();
        // ({2,4},{3,5}) and ({2,5},{3,4}) both give 01111
        assert_eq!(
            listed,
            vec![
                "{1,2}|{4,5}",
                "{1,3}|{4,5}",
                "{1,4}|{2,3}",
                "{1,5}|{2,3}",
                "{2,4}|{3,5}",
                "{2,5}|{3,4}"
            ]
        );
        assert_eq!(r.total, 15);
        assert_eq!(r.epsilon, Fraction::new(2, 5));
        assert_eq!(r.distinct_outcomes, 12);
    }

    #[test]
    fn identity_design_has_no_collisions() {
        let id = BinaryCode::identity(6);
        let r = analyze_design(&id, 2, 1, Model::Strict, &DesignOptions::default()).unwrap();
        assert_eq!(r.n_bad, 0);
        assert_eq!(r.total, 15);
    }

    #[test]
    fn reference_projection_bound() {
        let x = golden::reference_code();
        let b = projection_bad_bound(&x, 2, 2, true, &DesignOptions::default()).unwrap();
        assert_eq!(b.bound, 2.0);
        assert_eq!(b.bound_clipped, 1.0);
        assert_eq!(b.design_epsilon, Some(Fraction::new(6, 15)));
        assert_eq!(b.holds, Some(true));
    }
}

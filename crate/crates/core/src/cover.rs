//! `(s, l)`-bad and good subsets of a code.
//!
//! An `s`-subset `S` is bad when some `l` other columns have a conjunction
//! covered by the union of `S`. Restricted to the zero rows `Z` of that union,
//! the condition is simply "the conjunction restricted to `Z` is zero", which is
//! what [`WitnessSearch`] tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{self, Word};
use crate::code::{BinaryCode, IndexSet};
use crate::combin::{binomial_sat, binomial_u128, next_colex, unrank_colex};
use crate::error::{Error, Result};
use crate::ratio::Fraction;

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;
pub const DEFAULT_SET_CAP: usize = 100_000;

/// Number of consecutive colex ranks handled by one work item. Fixed so that
/// results never depend on the thread count.
const BLOCK: u128 = 4096;

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Maximum number of cover checks `C(t,s) * C(t-s,l)` allowed in exact mode.
    pub budget: u64,
    /// Maximum number of bad (and good) sets listed in a report.
    pub cap: usize,
    /// Whether to list sets at all.
    pub keep_sets: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            budget: DEFAULT_BUDGET,
            cap: DEFAULT_SET_CAP,
            keep_sets: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Sampled { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeTag {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleInfo {
    pub trials: u64,
    pub seed: u64,
    pub std_error: f64,
}

/// Result of classifying `s`-subsets. In exact mode `n_bad + n_good == total`;
/// in sampled mode the counts refer to the drawn subsets and `epsilon` is an
/// estimate, never a certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverAnalysisReport {
    pub s: usize,
    pub l: usize,
    pub t: usize,
    pub mode: ModeTag,
    pub n_bad: u64,
    pub n_good: u64,
    /// `C(t, s)`; `None` only when it does not fit in 128 bits.
    pub total: Option<u128>,
    pub epsilon: Fraction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bad_sets: Option<Vec<IndexSet>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good_sets: Option<Vec<IndexSet>>,
    pub sets_truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_info: Option<SampleInfo>,
}

pub(crate) fn check_params(code: &BinaryCode, s: usize, l: usize) -> Result<()> {
    if s == 0 || l == 0 {
        return Err(Error::Parameter(format!("need s >= 1 and l >= 1, got s={s}, l={l}")));
    }
    if s + l > code.n_cols() {
        return Err(Error::Parameter(format!(
            "need s + l <= t, got s={s}, l={l}, t={}",
            code.n_cols()
        )));
    }
    Ok(())
}

/// Reusable scratch space for bad-set witness searches on one code.
pub struct WitnessSearch {
    stride: usize,
    union: Vec<Word>,
    restricted: Vec<Word>,
    cand: Vec<usize>,
    weight: Vec<usize>,
    order: Vec<usize>,
    in_set: Vec<bool>,
    acc: Vec<Word>,
    pos: Vec<usize>,
}

impl WitnessSearch {
    pub fn new(code: &BinaryCode) -> Self {
        let stride = code.stride();
        let t = code.n_cols();
        WitnessSearch {
            stride,
            union: vec![0; stride],
            restricted: vec![0; stride * t],
            cand: Vec::with_capacity(t),
            weight: Vec::with_capacity(t),
            order: Vec::with_capacity(t),
            in_set: vec![false; t],
            acc: Vec::new(),
            pos: Vec::new(),
        }
    }

    /// Looks for `l` columns outside `set` whose conjunction is covered by the
    /// union of `set`. Returns the witness (sorted, 0-based) if one exists.
    ///
    /// `set` must be sorted, nonempty and in range, and `t - |set| >= l`.
    pub fn find(&mut self, code: &BinaryCode, set: &[usize], l: usize) -> Option<Vec<usize>> {
        let w = self.stride;
        self.union.copy_from_slice(code.column(set[0]));
        for &j in &set[1..] {
            bits::or_assign(&mut self.union, code.column(j));
        }
        for &j in set {
            self.in_set[j] = true;
        }

        self.cand.clear();
        self.weight.clear();
        let mut zero_at = None;
        for j in 0..code.n_cols() {
            if self.in_set[j] {
                continue;
            }
            let k = self.cand.len();
            let r = &mut self.restricted[k * w..(k + 1) * w];
            bits::and_not_into(r, code.column(j), &self.union);
            let pc = bits::popcount(r);
            if pc == 0 && zero_at.is_none() {
                zero_at = Some(k);
            }
            self.cand.push(j);
            self.weight.push(pc);
        }
        for &j in set {
            self.in_set[j] = false;
        }

        if let Some(k) = zero_at {
            return Some(self.complete(&[k], l));
        }
        if l == 1 {
            return None;
        }

        let m = self.cand.len();
        self.order.clear();
        self.order.extend(0..m);
        let weight = &self.weight;
        self.order.sort_by_key(|&k| weight[k]);

        self.acc.resize(w * l, 0);
        self.pos.clear();
        self.pos.resize(l, 0);
        let mut d = 0;
        loop {
            if self.pos[d] + (l - d) > m {
                if d == 0 {
                    return None;
                }
                d -= 1;
                self.pos[d] += 1;
                continue;
            }
            let k = self.order[self.pos[d]];
            let r = &self.restricted[k * w..(k + 1) * w];
            let (prev, cur) = self.acc.split_at_mut(d * w);
            let cur = &mut cur[..w];
            if d == 0 {
                cur.copy_from_slice(r);
            } else {
                cur.copy_from_slice(&prev[(d - 1) * w..]);
                bits::and_assign(cur, r);
            }
            if bits::is_zero(cur) {
                let chosen: Vec<usize> = self.pos[..=d].iter().map(|&p| self.order[p]).collect();
                return Some(self.complete(&chosen, l));
            }
            if d + 1 == l {
                self.pos[d] += 1;
            } else {
                self.pos[d + 1] = self.pos[d] + 1;
                d += 1;
            }
        }
    }

    /// Extends a zero-conjunction prefix (candidate slots) to `l` columns.
    fn complete(&self, chosen: &[usize], l: usize) -> Vec<usize> {
        let mut out: Vec<usize> = chosen.iter().map(|&k| self.cand[k]).collect();
        for (k, &j) in self.cand.iter().enumerate() {
            if out.len() == l {
                break;
            }
            if !chosen.contains(&k) {
                out.push(j);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Tests whether `set` is `(s, l)`-bad; returns a witness `L` when it is.
pub fn is_bad_set(code: &BinaryCode, set: &IndexSet, l: usize) -> Result<Option<IndexSet>> {
    if set.is_empty() {
        return Err(Error::Parameter("the tested set must be nonempty".into()));
    }
    code.check_set(set)?;
    check_params(code, set.len(), l)?;
    let mut search = WitnessSearch::new(code);
    Ok(search
        .find(code, set.as_slice(), l)
        .map(IndexSet::from_sorted))
}

struct BlockScan {
    n_bad: u64,
    per_column: Vec<u64>,
}

fn exact_work(code: &BinaryCode, s: usize, l: usize) -> (Option<u128>, u128) {
    let t = code.n_cols() as u64;
    let total = binomial_u128(t, s as u64);
    let inner = binomial_u128(t - s as u64, l as u64).unwrap_or(u128::MAX);
    let work = total.map_or(u128::MAX, |n| n.saturating_mul(inner));
    (total, work)
}

fn block_range(block: u128, total: u128) -> (u128, u128) {
    let start = block * BLOCK;
    (start, (start + BLOCK).min(total))
}

/// Visits every `s`-subset with colex rank in `[start, end)`.
fn for_each_in_block(s: usize, start: u128, end: u128, n: usize, mut f: impl FnMut(&[usize])) {
    let mut c = unrank_colex(start, s);
    let mut r = start;
    while r < end {
        f(&c);
        r += 1;
        if r < end {
            next_colex(&mut c, n);
        }
    }
}

struct ExactScan {
    total: u128,
    n_bad: u64,
    per_column: Vec<u64>,
    bad_sets: Vec<IndexSet>,
    good_sets: Vec<IndexSet>,
    truncated: bool,
}

fn exact_scan(code: &BinaryCode, s: usize, l: usize, opts: &AnalyzeOptions) -> Result<ExactScan> {
    check_params(code, s, l)?;
    let (total, work) = exact_work(code, s, l);
    if work > opts.budget as u128 {
        return Err(Error::Budget {
            needed: if work == u128::MAX { "more than 2^128".into() } else { work.to_string() },
            budget: opts.budget,
            hint: "use sampled mode (--mode sample --trials N --seed S) or raise --budget".into(),
        });
    }
    let total = total.expect("bounded by budget");
    let t = code.n_cols();
    let n_blocks = total.div_ceil(BLOCK);

    let scans: Vec<BlockScan> = (0..n_blocks)
        .into_par_iter()
        .map_init(
            || WitnessSearch::new(code),
            |search, b| {
                let (start, end) = block_range(b, total);
                let mut scan = BlockScan {
                    n_bad: 0,
                    per_column: vec![0; t],
                };
                for_each_in_block(s, start, end, t, |c| {
                    if search.find(code, c, l).is_some() {
                        scan.n_bad += 1;
                        for &j in c {
                            scan.per_column[j] += 1;
                        }
                    }
                });
                scan
            },
        )
        .collect();

    let mut n_bad = 0;
    let mut per_column = vec![0u64; t];
    for sc in &scans {
        n_bad += sc.n_bad;
        for (acc, v) in per_column.iter_mut().zip(&sc.per_column) {
            *acc += v;
        }
    }

    // Listing pass: sequential, in rank order, stops once both lists are full.
    let mut bad_sets = Vec::new();
    let mut good_sets = Vec::new();
    let n_good = total - n_bad as u128;
    let truncated = opts.keep_sets && (n_bad as usize > opts.cap || n_good > opts.cap as u128);
    if opts.keep_sets {
        let want_bad = (n_bad as usize).min(opts.cap);
        let want_good = n_good.min(opts.cap as u128) as usize;
        let mut search = WitnessSearch::new(code);
        for b in 0..n_blocks {
            if bad_sets.len() >= want_bad && good_sets.len() >= want_good {
                break;
            }
            let (start, end) = block_range(b, total);
            for_each_in_block(s, start, end, t, |c| {
                let bad = search.find(code, c, l).is_some();
                let list = if bad { &mut bad_sets } else { &mut good_sets };
                let want = if bad { want_bad } else { want_good };
                if list.len() < want {
                    list.push(IndexSet::from_sorted(c.to_vec()));
                }
            });
        }
        bad_sets.sort();
        good_sets.sort();
    }
    Ok(ExactScan {
        total,
        n_bad,
        per_column,
        bad_sets,
        good_sets,
        truncated,
    })
}

/// Classifies the `s`-subsets of `code`, exhaustively or by sampling.
pub fn analyze(
    code: &BinaryCode,
    s: usize,
    l: usize,
    mode: Mode,
    opts: &AnalyzeOptions,
) -> Result<CoverAnalysisReport> {
    match mode {
        Mode::Exact => {
            let scan = exact_scan(code, s, l, opts)?;
            let n_good = (scan.total - scan.n_bad as u128) as u64;
            Ok(CoverAnalysisReport {
                s,
                l,
                t: code.n_cols(),
                mode: ModeTag::Exact,
                n_bad: scan.n_bad,
                n_good,
                total: Some(scan.total),
                epsilon: Fraction::new(scan.n_bad as u128, scan.total),
                bad_sets: opts.keep_sets.then_some(scan.bad_sets),
                good_sets: opts.keep_sets.then_some(scan.good_sets),
                sets_truncated: scan.truncated,
                sample_info: None,
            })
        }
        Mode::Sampled { trials, seed } => sampled(code, s, l, trials, seed),
    }
}

/// Per-trial generator: one master seed, one ChaCha stream per trial index.
pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn sampled(code: &BinaryCode, s: usize, l: usize, trials: u64, seed: u64) -> Result<CoverAnalysisReport> {
    check_params(code, s, l)?;
    if trials == 0 {
        return Err(Error::Parameter("sampled mode needs trials >= 1".into()));
    }
    let t = code.n_cols();
    let n_bad: u64 = (0..trials)
        .into_par_iter()
        .map_init(
            || (WitnessSearch::new(code), Vec::with_capacity(s)),
            |(search, buf), trial| {
                let mut rng = trial_rng(seed, trial);
                buf.clear();
                buf.extend(rand::seq::index::sample(&mut rng, t, s).iter());
                buf.sort_unstable();
                u64::from(search.find(code, buf, l).is_some())
            },
        )
        .sum();
    let p = n_bad as f64 / trials as f64;
    Ok(CoverAnalysisReport {
        s,
        l,
        t,
        mode: ModeTag::Sampled,
        n_bad,
        n_good: trials - n_bad,
        total: binomial_u128(t as u64, s as u64),
        epsilon: Fraction::new(n_bad as u128, trials as u128),
        bad_sets: None,
        good_sets: None,
        sets_truncated: false,
        sample_info: Some(SampleInfo {
            trials,
            seed,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        }),
    })
}

/// Exact test of the almost cover-free property: bad fraction `<= epsilon`.
pub fn is_cf_code(code: &BinaryCode, s: usize, l: usize, epsilon: f64, opts: &AnalyzeOptions) -> Result<bool> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Parameter(format!("epsilon must lie in [0,1], got {epsilon}")));
    }
    let opts = AnalyzeOptions {
        keep_sets: false,
        ..opts.clone()
    };
    let report = analyze(code, s, l, Mode::Exact, &opts)?;
    Ok(report.epsilon.le_f64(epsilon))
}

/// Number of bad sets containing each column.
pub fn bad_sets_per_column(code: &BinaryCode, s: usize, l: usize, opts: &AnalyzeOptions) -> Result<Vec<u64>> {
    let opts = AnalyzeOptions {
        keep_sets: false,
        ..opts.clone()
    };
    Ok(exact_scan(code, s, l, &opts)?.per_column)
}

/// Deletes the column contained in the fewest `(s, l)`-bad sets (smallest index
/// on ties). The result is an `(s-1, l)` code of size `t-1` whose bad fraction
/// does not exceed the input's `(s, l)` bad fraction.
pub fn shrink_code(code: &BinaryCode, s: usize, l: usize, opts: &AnalyzeOptions) -> Result<(BinaryCode, usize)> {
    if s < 2 {
        return Err(Error::Parameter(format!("shrinking needs s >= 2, got {s}")));
    }
    let counts = bad_sets_per_column(code, s, l, opts)?;
    let (deleted, _) = counts
        .iter()
        .enumerate()
        .min_by_key(|&(j, &c)| (c, j))
        .expect("t >= 1");
    Ok((code.without_column(deleted)?, deleted))
}

/// Sum of `C(t-s, l)` per subset; the cost unit of the exact budget.
pub fn exact_cost(t: usize, s: usize, l: usize) -> u64 {
    binomial_sat(t as u64, s as u64).saturating_mul(binomial_sat((t - s.min(t)) as u64, l as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_one_based(v).unwrap()
    }

    #[test]
    fn reference_code_bad_and_good_examples() {
        let x = golden::reference_code();
        let w = is_bad_set(&x, &set(&[4, 5]), 2).unwrap();
        assert!(w.is_some());
        let w = w.unwrap();
        assert!(x.union_of(&set(&[4, 5])).unwrap().covers(&x.conj_of(&w).unwrap()).unwrap());
        assert!(is_bad_set(&x, &set(&[2, 3]), 2).unwrap().is_none());
    }

    #[test]
    fn identity_is_cover_free() {
        let id = BinaryCode::identity(5);
        assert!(is_bad_set(&id, &set(&[1, 2]), 1).unwrap().is_none());
        for s in 1..5 {
            let r = analyze(&id, s, 1, Mode::Exact, &AnalyzeOptions::default()).unwrap();
            assert_eq!(r.n_bad, 0);
        }
        assert!(is_cf_code(&id, 2, 1, 0.0, &AnalyzeOptions::default()).unwrap());
    }

    #[test]
    fn parameter_errors() {
        let x = golden::reference_code();
        assert!(matches!(is_bad_set(&x, &set(&[1, 2, 3, 4]), 2), Err(Error::Parameter(_))));
        assert!(matches!(
            analyze(&x, 0, 2, Mode::Exact, &AnalyzeOptions::default()),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            analyze(&x, 2, 2, Mode::Sampled { trials: 0, seed: 1 }, &AnalyzeOptions::default()),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn budget_refusal_points_to_sampling() {
        let x = golden::reference_code();
        let opts = AnalyzeOptions {
            budget: 10,
            ..Default::default()
        };
        match analyze(&x, 2, 2, Mode::Exact, &opts) {
            Err(Error::Budget { hint, .. }) => assert!(hint.contains("sample")),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn witness_for_l1_zero_restriction() {
        // column 3 is inside the union of columns 1 and 2
        let x = BinaryCode::from_rows(&["1010", "0110", "0001"]).unwrap();
        assert_eq!(is_bad_set(&x, &set(&[1, 2]), 1).unwrap(), Some(set(&[3])));
        assert_eq!(is_bad_set(&x, &set(&[1, 2]), 2).unwrap().map(|w| w.len()), Some(2));
    }

    #[test]
    fn set_cap_truncates() {
        let x = golden::reference_code();
        let opts = AnalyzeOptions {
            cap: 2,
            ..Default::default()
        };
        let r = analyze(&x, 2, 2, Mode::Exact, &opts).unwrap();
        assert!(r.sets_truncated);
        assert_eq!(r.bad_sets.unwrap().len(), 2);
        assert_eq!(r.n_bad, 5);
    }
}

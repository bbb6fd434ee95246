//! Decoding an outcome vector back to the positive superset.
//!
//! The fast decoder collects all minimal acceptable sets of size at most `l`.
//! On a cover-free design these are exactly the parts of the unknown superset.
//! [`decode_exhaustive`] is the trivial decoder used as an oracle.

use num_bigint::BigUint;
use serde::Serialize;

use crate::bits::{self, BitVector, Word};
use crate::code::{BinaryCode, IndexSet};
use crate::combin::{binomial_big, next_lex};
use crate::design::{self, Model, RelaxedSupersets, StrictSupersets, Superset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Unique,
    NotCfAmbiguous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeResult {
    pub decoded: Superset,
    /// Number of acceptability tests performed.
    pub acceptable_checked: u64,
    pub status: DecodeStatus,
}

fn check_outcome(code: &BinaryCode, r: &BitVector) -> Result<()> {
    if r.len() != code.n_rows() {
        return Err(Error::Dimension(format!(
            "outcome has length {}, code has {} rows",
            r.len(),
            code.n_rows()
        )));
    }
    Ok(())
}

/// `conj(P) <= r`, i.e. the AND over `P` of `x(j) & !r` is zero.
pub fn is_acceptable(code: &BinaryCode, p: &IndexSet, r: &BitVector) -> Result<bool> {
    check_outcome(code, r)?;
    code.check_set(p)?;
    if p.is_empty() {
        return Err(Error::Parameter("acceptable sets are nonempty".into()));
    }
    let masked = masked_columns(code, r);
    let mut acc = masked[p[0]].clone();
    for &j in &p.as_slice()[1..] {
        bits::and_assign(&mut acc, &masked[j]);
    }
    Ok(bits::is_zero(&acc))
}

/// Columns with the rows of `r` cleared.
fn masked_columns(code: &BinaryCode, r: &BitVector) -> Vec<Vec<Word>> {
    (0..code.n_cols())
        .map(|j| {
            let mut m = vec![0; code.stride()];
            bits::and_not_into(&mut m, code.column(j), r.words());
            m
        })
        .collect()
}

/// Minimal acceptable sets and the number of acceptability tests used.
///
/// Sizes are visited in ascending order; a candidate containing an already
/// found set is skipped without a test, so the counter never exceeds
/// `sum_{i=1..l} C(t, i)`.
pub fn minimal_acceptable_sets_counted(
    code: &BinaryCode,
    r: &BitVector,
    l: usize,
) -> Result<(Vec<IndexSet>, u64)> {
    check_outcome(code, r)?;
    if l == 0 {
        return Err(Error::Parameter("need l >= 1".into()));
    }
    let t = code.n_cols();
    let masked = masked_columns(code, r);
    let set_words = bits::words_for(t);
    let mut found: Vec<IndexSet> = Vec::new();
    let mut found_masks: Vec<Vec<Word>> = Vec::new();
    let mut checked = 0u64;
    let mut acc = vec![0; code.stride()];
    let mut mask = vec![0; set_words];

    for size in 1..=l.min(t) {
        let mut c: Vec<usize> = (0..size).collect();
        let before = found.len();
        loop {
            mask.fill(0);
            for &j in &c {
                mask[j / bits::WORD_BITS] |= 1 << (j % bits::WORD_BITS);
            }
            // only sets found at smaller sizes can be proper subsets
            let dominated = found_masks[..before].iter().any(|m| bits::is_covered(m, &mask));
            if !dominated {
                checked += 1;
                acc.copy_from_slice(&masked[c[0]]);
                for &j in &c[1..] {
                    bits::and_assign(&mut acc, &masked[j]);
                }
                if bits::is_zero(&acc) {
                    found.push(IndexSet::from_sorted(c.clone()));
                    found_masks.push(mask.clone());
                }
            }
            if !next_lex(&mut c, t) {
                break;
            }
        }
    }
    found.sort();
    Ok((found, checked))
}

pub fn minimal_acceptable_sets(code: &BinaryCode, r: &BitVector, l: usize) -> Result<Vec<IndexSet>> {
    minimal_acceptable_sets_counted(code, r, l).map(|(sets, _)| sets)
}

/// `sum_{i=1..l} C(t, i)`: the worst-case number of acceptability tests.
pub fn decode_cost(t: usize, l: usize) -> BigUint {
    (1..=l.min(t))
        .map(|i| binomial_big(&BigUint::from(t), i as u64))
        .sum()
}

/// Decodes `r` and self-checks the reconstruction: the status is `unique` only
/// when the minimal acceptable sets re-encode to `r` and there are at most `s`
/// of them.
pub fn decode(code: &BinaryCode, r: &BitVector, s: usize, l: usize) -> Result<DecodeResult> {
    if s == 0 {
        return Err(Error::Parameter("need s >= 1".into()));
    }
    let (sets, checked) = minimal_acceptable_sets_counted(code, r, l)?;
    let mut status = DecodeStatus::NotCfAmbiguous;
    if !sets.is_empty() && sets.len() <= s {
        let mut out = vec![0; code.stride()];
        let mut tmp = vec![0; code.stride()];
        design::outcome_words(code, sets.iter().map(IndexSet::as_slice), &mut out, &mut tmp);
        if out == r.words() {
            status = DecodeStatus::Unique;
        }
    }
    Ok(DecodeResult {
        decoded: Superset::from_canonical(sets),
        acceptable_checked: checked,
        status,
    })
}

/// Every superset of the family whose outcome equals `r`, in canonical order.
pub fn decode_exhaustive(
    code: &BinaryCode,
    r: &BitVector,
    s: usize,
    l: usize,
    model: Model,
    budget: u64,
) -> Result<Vec<Superset>> {
    check_outcome(code, r)?;
    let t = code.n_cols();
    if s == 0 || l == 0 {
        return Err(Error::Parameter("need s >= 1 and l >= 1".into()));
    }
    if model == Model::Strict && s * l > t {
        return Err(Error::Parameter(format!("need s*l <= t, got s={s}, l={l}, t={t}")));
    }
    design::check_family_budget(t, s, l, model, budget)?;
    let target = r.words();
    let mut acc = vec![0; code.stride()];
    let mut tmp = vec![0; code.stride()];
    let mut hits = Vec::new();
    let mut visit = |parts: &[&[usize]]| {
        design::outcome_words(code, parts.iter().copied(), &mut acc, &mut tmp);
        if acc == target {
            let mut ps: Vec<IndexSet> = parts.iter().map(|p| IndexSet::from_sorted(p.to_vec())).collect();
            ps.sort();
            hits.push(Superset::from_canonical(ps));
        }
    };
    match model {
        Model::Strict => StrictSupersets::new(t, s, l)?.for_each_parts(|parts| {
            let v: Vec<&[usize]> = parts.iter().map(Vec::as_slice).collect();
            visit(&v);
        }),
        Model::Relaxed => RelaxedSupersets::new(t, s, l)?.for_each_parts(|p| visit(p)),
    }
    hits.sort();
    Ok(hits)
}

/// [`decode`] followed by the exhaustive decoder; the status is downgraded
/// unless the exhaustive preimages are exactly the decoded superset.
pub fn decode_verified(
    code: &BinaryCode,
    r: &BitVector,
    s: usize,
    l: usize,
    model: Model,
    budget: u64,
) -> Result<(DecodeResult, Vec<Superset>)> {
    let mut result = decode(code, r, s, l)?;
    let preimages = decode_exhaustive(code, r, s, l, model, budget)?;
    if preimages.len() != 1 || preimages[0] != result.decoded {
        result.status = DecodeStatus::NotCfAmbiguous;
    }
    Ok((result, preimages))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_one_based(v).unwrap()
    }

    #[test]
    fn acceptability_on_reference_code() {
        let x = golden::reference_code();
        assert!(is_acceptable(&x, &set(&[4, 5]), &bv("10011")).unwrap());
        assert!(!is_acceptable(&x, &set(&[2, 3]), &bv("10011")).unwrap());
        let r = x.column_vector(1).disjunction(&x.column_vector(2)).unwrap();
        assert!(is_acceptable(&x, &set(&[2, 3]), &r).unwrap());
    }

    #[test]
    fn zero_outcome_gives_zero_conjunctions() {
        let x = golden::reference_code();
        let sets = minimal_acceptable_sets(&x, &BitVector::zeros(5), 2).unwrap();
        for p in &sets {
            assert!(x.conj_of(p).unwrap().is_zero());
        }
        // x1 & x2 = 0 and x1 & x3 = 0; no column is zero
        let shown: Vec<String> = sets.iter().map(ToString::to_string).collect();
        assert_eq!(shown, vec!["{1,2}", "{1,3}"]);
    }

    #[test]
    fn minimality_suppresses_supersets() {
        let x = golden::reference_code();
        let sets = minimal_acceptable_sets(&x, &bv("11100"), 2).unwrap();
        let shown: Vec<String> = sets.iter().map(ToString::to_string).collect();
        assert_eq!(shown, vec!["{1}", "{2,3}"]);
        let strict = decode_exhaustive(&x, &bv("11100"), 2, 2, Model::Strict, 1000).unwrap();
        let shown: Vec<String> = strict.iter().map(ToString::to_string).collect();
        assert_eq!(shown, vec!["{1,4}|{2,3}", "{1,5}|{2,3}"]);
    }

    #[test]
    fn exhaustive_on_reference_code() {
        let x = golden::reference_code();
        let hits = decode_exhaustive(&x, &bv("10011"), 2, 2, Model::Strict, 1000).unwrap();
        let shown: Vec<String> = hits.iter().map(ToString::to_string).collect();
        assert_eq!(shown, vec!["{1,2}|{4,5}", "{1,3}|{4,5}"]);
        assert!(decode_exhaustive(&x, &bv("00001"), 2, 2, Model::Strict, 1000)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn verified_decode_flags_collision() {
        let x = golden::reference_code();
        let (res, pre) = decode_verified(&x, &bv("10011"), 2, 2, Model::Strict, 1000).unwrap();
        assert_eq!(res.status, DecodeStatus::NotCfAmbiguous);
        assert_eq!(pre.len(), 2);
    }

    #[test]
    fn too_many_parts_is_ambiguous() {
        let x = golden::reference_code();
        let res = decode(&x, &bv("11111"), 2, 2).unwrap();
        assert_eq!(res.decoded.len(), 5);
        assert_eq!(res.status, DecodeStatus::NotCfAmbiguous);
    }

    #[test]
    fn identity_single_column() {
        let id = BinaryCode::identity(4);
        let res = decode(&id, &bv("0010"), 1, 1).unwrap();
        assert_eq!(res.decoded.to_string(), "{3}");
        assert_eq!(res.status, DecodeStatus::Unique);
        assert!(res.acceptable_checked <= 4);
    }

    #[test]
    fn counter_bound() {
        let x = golden::reference_code();
        for r in ["00000", "11111", "10011", "01101"] {
            let (_, n) = minimal_acceptable_sets_counted(&x, &bv(r), 3).unwrap();
            assert!(BigUint::from(n) <= decode_cost(5, 3));
        }
    }

    #[test]
    fn dimension_mismatch() {
        let x = golden::reference_code();
        assert!(matches!(decode(&x, &bv("101"), 2, 2), Err(Error::Dimension(_))));
    }
}

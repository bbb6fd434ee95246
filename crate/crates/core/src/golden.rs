//! The 5x5 reference code with fully worked cover and design statistics, and
//! the golden checks run by `cfcodes selftest`.

use serde::Serialize;

use crate::bounds;
use crate::code::{parse_code, BinaryCode, IndexSet};
use crate::cover::{self, AnalyzeOptions, Mode};
use crate::decoder::{self, DecodeStatus};
use crate::design::{self, DesignOptions, Model, Superset};
use crate::error::Result;

/// Text form of the reference code.
pub const REFERENCE_CODE_TEXT: &str = "5 5\n10011\n01110\n01101\n01011\n00111\n";

pub fn reference_code() -> BinaryCode {
    parse_code(REFERENCE_CODE_TEXT).expect("reference code parses")
}

/// Good `(2,2)` sets of the reference code, 1-based.
pub const REFERENCE_GOOD_SETS: [[usize; 2]; 5] = [[1, 2], [1, 3], [1, 4], [1, 5], [2, 3]];

/// Bad strict `(2,2)` supersets of the reference code, 1-based.
pub const REFERENCE_BAD_SUPERSETS: [[[usize; 2]; 2]; 6] = [
    [[1, 2], [4, 5]],
    [[1, 3], [4, 5]],
    [[1, 4], [2, 3]],
    [[1, 5], [2, 3]],
    [[2, 4], [3, 5]],
    [[2, 5], [3, 4]],
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> GoldenCheck {
    GoldenCheck {
        name,
        passed,
        detail: detail.into(),
    }
}

fn sets(list: &[[usize; 2]]) -> Vec<IndexSet> {
    list.iter().map(|p| IndexSet::from_one_based(p).expect("valid")).collect()
}

fn supersets(list: &[[[usize; 2]; 2]]) -> Vec<Superset> {
    list.iter()
        .map(|p| Superset::new(sets(p), Model::Strict).expect("valid"))
        .collect()
}

/// Runs the worked examples on the reference code and a few closed-form
/// identities of the bounds.
pub fn run_golden_checks() -> Result<Vec<GoldenCheck>> {
    let x = reference_code();
    let mut out = Vec::new();

    let u = x.union_of(&IndexSet::from_one_based(&[1, 2])?)?;
    let c = x.conj_of(&IndexSet::from_one_based(&[4, 5])?)?;
    out.push(check(
        "cover relation",
        u.to_string() == "11110" && c.to_string() == "10011" && !u.covers(&c)?,
        format!("union(1,2) = {u}, conj(4,5) = {c}"),
    ));

    let report = cover::analyze(&x, 2, 2, Mode::Exact, &AnalyzeOptions::default())?;
    let good = report.good_sets.clone().unwrap_or_default();
    out.push(check(
        "good (2,2) sets",
        good == sets(&REFERENCE_GOOD_SETS) && report.epsilon.num == 1 && report.epsilon.den == 2,
        format!("epsilon = {}/{}", report.epsilon.num, report.epsilon.den),
    ));
    let opts = AnalyzeOptions::default();
    out.push(check(
        "almost cover-free at 1/2 but not 2/5",
        cover::is_cf_code(&x, 2, 2, 0.5, &opts)? && !cover::is_cf_code(&x, 2, 2, 0.4, &opts)?,
        "",
    ));

    let p = Superset::parse("{1,4}|{2,3}", Model::Strict)?;
    let q = Superset::parse("{1,2}|{4,5}", Model::Strict)?;
    let (rp, rq) = (design::outcome(&x, &p)?, design::outcome(&x, &q)?);
    out.push(check(
        "outcome vectors",
        rp.to_string() == "11100" && rq.to_string() == "10011",
        format!("r({p}) = {rp}, r({q}) = {rq}"),
    ));

    let d = design::analyze_design(&x, 2, 2, Model::Strict, &DesignOptions::default())?;
    let full = supersets(&REFERENCE_BAD_SUPERSETS);
    out.push(check(
        "strict (2,2) design collisions",
        d.total == 15 && d.bad_supersets == full,
        format!("{} of {} supersets collide", d.n_bad, d.total),
    ));

    let r = rq.clone();
    let acc_45 = decoder::is_acceptable(&x, &IndexSet::from_one_based(&[4, 5])?, &r)?;
    let acc_23 = decoder::is_acceptable(&x, &IndexSet::from_one_based(&[2, 3])?, &r)?;
    out.push(check("acceptable sets", acc_45 && !acc_23, format!("r = {r}")));

    let (res, pre) = decoder::decode_verified(&x, &r, 2, 2, Model::Strict, design::DEFAULT_SUPERSET_BUDGET)?;
    out.push(check(
        "ambiguous outcome",
        res.status == DecodeStatus::NotCfAmbiguous && pre == supersets(&REFERENCE_BAD_SUPERSETS[..2]),
        format!("{} strict preimages", pre.len()),
    ));

    let (shrunk, _) = cover::shrink_code(&x, 2, 2, &opts)?;
    let after = cover::analyze(&shrunk, 1, 2, Mode::Exact, &opts)?;
    out.push(check(
        "column deletion",
        after.epsilon.value() <= 0.5,
        format!("epsilon(1,2) after deletion = {}", after.epsilon.value()),
    ));

    let mut worst: f64 = 0.0;
    for s in [2, 3, 5, 8] {
        for i in 1..=9 {
            let big_q = i as f64 / 10.0;
            let qh = bounds::q_hat(big_q, s)?;
            if qh < (s as f64 * big_q).min(1.0) {
                worst = worst.max(bounds::a_exponent(s, big_q, qh)?.abs());
            }
        }
    }
    out.push(check("A vanishes at q_hat", worst < 1e-9, format!("max |A| = {worst:e}")));

    let lower = bounds::capacity_lower(2, 2)?.value;
    out.push(check(
        "capacity bounds ordered",
        lower > 0.0 && lower < bounds::capacity_upper(2, 2)?,
        format!("lower(2,2) = {lower}"),
    ));
    Ok(out)
}

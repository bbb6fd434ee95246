//! Binary codes stored column-major and the index sets that address them.
//!
//! Indices are 0-based inside the crate. The text and JSON forms of an
//! [`IndexSet`] are 1-based.

use std::fmt;
use std::str::FromStr;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::bits::{self, words_for, BitVector, Word};
use crate::error::{Error, Result};

/// An `N x t` binary matrix; column `j` is codeword `j`, row `i` is test `i`.
///
/// Each column is packed into `words_for(N)` machine words and the columns are
/// stored back to back. A code is immutable once built.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryCode {
    n_rows: usize,
    n_cols: usize,
    stride: usize,
    data: Vec<Word>,
}

impl BinaryCode {
    pub fn from_columns(columns: &[BitVector]) -> Result<Self> {
        let Some(first) = columns.first() else {
            return Err(Error::Dimension("a code needs at least one column".into()));
        };
        let n_rows = first.len();
        if n_rows == 0 {
            return Err(Error::Dimension("a code needs at least one row".into()));
        }
        let stride = words_for(n_rows);
        let mut data = Vec::with_capacity(stride * columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != n_rows {
                return Err(Error::Dimension(format!(
                    "column {} has {} bits, expected {n_rows}",
                    j + 1,
                    c.len()
                )));
            }
            data.extend_from_slice(c.words());
        }
        Ok(BinaryCode {
            n_rows,
            n_cols: columns.len(),
            stride,
            data,
        })
    }

    /// Builds a code from rows given as `0`/`1` strings.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let n = rows.len();
        let t = rows.first().map_or(0, |r| r.as_ref().len());
        let mut text = format!("{n} {t}\n");
        for r in rows {
            text.push_str(r.as_ref());
            text.push('\n');
        }
        parse_code(&text)
    }

    /// The `n x n` identity code (unit-vector columns).
    pub fn identity(n: usize) -> Self {
        let cols: Vec<BitVector> = (0..n)
            .map(|j| {
                let mut v = BitVector::zeros(n);
                v.set(j, true);
                v
            })
            .collect();
        BinaryCode::from_columns(&cols).expect("identity code is well formed")
    }

    /// Number of rows `N`.
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    /// Number of columns `t`.
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Words per packed column.
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[Word] {
        &self.data[j * self.stride..(j + 1) * self.stride]
    }

    pub fn column_vector(&self, j: usize) -> BitVector {
        BitVector::from_words(self.n_rows, self.column(j).to_vec()).expect("stride matches")
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row < self.n_rows && col < self.n_cols);
        (self.column(col)[row / bits::WORD_BITS] >> (row % bits::WORD_BITS)) & 1 == 1
    }

    pub fn weight(&self, j: usize) -> usize {
        bits::popcount(self.column(j))
    }

    /// `Some(w)` when every column has weight `w`.
    pub fn constant_weight(&self) -> Option<usize> {
        let w = self.weight(0);
        (1..self.n_cols).all(|j| self.weight(j) == w).then_some(w)
    }

    /// `log2(t) / N`.
    pub fn rate(&self) -> f64 {
        (self.n_cols as f64).log2() / self.n_rows as f64
    }

    /// The code with column `j` removed.
    pub fn without_column(&self, j: usize) -> Result<Self> {
        if j >= self.n_cols {
            return Err(Error::Parameter(format!(
                "column {} out of range 1..={}",
                j + 1,
                self.n_cols
            )));
        }
        if self.n_cols == 1 {
            return Err(Error::Parameter("cannot delete the only column".into()));
        }
        let cols: Vec<BitVector> = (0..self.n_cols)
            .filter(|&c| c != j)
            .map(|c| self.column_vector(c))
            .collect();
        BinaryCode::from_columns(&cols)
    }

    pub(crate) fn check_set(&self, set: &IndexSet) -> Result<()> {
        match set.max() {
            Some(m) if m >= self.n_cols => Err(Error::Parameter(format!(
                "index {} out of range 1..={}",
                m + 1,
                self.n_cols
            ))),
            _ => Ok(()),
        }
    }

    /// Disjunction of the columns in `set`.
    pub fn union_of(&self, set: &IndexSet) -> Result<BitVector> {
        self.fold(set, "union", bits::or_assign)
    }

    /// Conjunction of the columns in `set`.
    pub fn conj_of(&self, set: &IndexSet) -> Result<BitVector> {
        self.fold(set, "conjunction", bits::and_assign)
    }

    fn fold(&self, set: &IndexSet, what: &str, op: fn(&mut [Word], &[Word])) -> Result<BitVector> {
        if set.is_empty() {
            return Err(Error::Parameter(format!("{what} over an empty index set")));
        }
        self.check_set(set)?;
        let mut acc = self.column(set[0]).to_vec();
        for &j in &set.as_slice()[1..] {
            op(&mut acc, self.column(j));
        }
        BitVector::from_words(self.n_rows, acc)
    }
}

impl fmt::Debug for BinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryCode({}x{})", self.n_rows, self.n_cols)
    }
}

/// Parses the code file format: a header line `N t`, then `N` rows of exactly
/// `t` characters from `{0,1}`.
pub fn parse_code(text: &str) -> Result<BinaryCode> {
    let mut lines = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l));
    let header = lines.next().unwrap_or("");
    let mut fields = header.split(' ');
    let parse_dim = |field: Option<&str>, column: usize, name: &str| -> Result<usize> {
        let f = field.ok_or_else(|| Error::parse(1, column, format!("missing {name}")))?;
        let v: usize = f
            .parse()
            .map_err(|_| Error::parse(1, column, format!("{name} must be a positive integer, got {f:?}")))?;
        if v == 0 {
            return Err(Error::parse(1, column, format!("{name} must be positive")));
        }
        Ok(v)
    };
    let n = parse_dim(fields.next(), 1, "N")?;
    let t_col = header.find(' ').map_or(header.len() + 1, |p| p + 2);
    let t = parse_dim(fields.next(), t_col, "t")?;
    if fields.next().is_some() {
        return Err(Error::parse(1, header.len(), "header must be exactly `N t`"));
    }

    let mut cols = vec![BitVector::zeros(n); t];
    for i in 0..n {
        let line_no = i + 2;
        let row = lines
            .next()
            .filter(|r| !r.is_empty())
            .ok_or_else(|| Error::parse(line_no, 1, format!("missing row {}, expected {n} rows", i + 1)))?;
        let len = row.chars().count();
        if len != t {
            return Err(Error::parse(
                line_no,
                len.min(t) + 1,
                format!("row {} has {len} characters, expected {t}", i + 1),
            ));
        }
        for (j, c) in row.chars().enumerate() {
            match c {
                '0' => {}
                '1' => cols[j].set(i, true),
                other => {
                    return Err(Error::parse(
                        line_no,
                        j + 1,
                        format!("unexpected character {other:?}, expected 0 or 1"),
                    ))
                }
            }
        }
    }
    for (k, rest) in lines.enumerate() {
        if !rest.trim().is_empty() {
            return Err(Error::parse(n + 2 + k, 1, "trailing content after the last row"));
        }
    }
    BinaryCode::from_columns(&cols)
}

/// Canonical text form; `parse_code(&emit_code(x)) == x`.
pub fn emit_code(code: &BinaryCode) -> String {
    let mut out = String::with_capacity((code.n_cols + 1) * (code.n_rows + 1) + 16);
    out.push_str(&format!("{} {}\n", code.n_rows, code.n_cols));
    for i in 0..code.n_rows {
        for j in 0..code.n_cols {
            out.push(if code.get(i, j) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

impl FromStr for BinaryCode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_code(s)
    }
}

impl fmt::Display for BinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&emit_code(self))
    }
}

/// A strictly increasing list of 0-based column indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Sorts the input and rejects duplicates.
    pub fn new(mut idx: Vec<usize>) -> Result<Self> {
        idx.sort_unstable();
        if let Some(w) = idx.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Parameter(format!("duplicate index {}", w[0] + 1)));
        }
        Ok(IndexSet(idx))
    }

    /// Caller guarantees the input is strictly increasing.
    pub(crate) fn from_sorted(idx: Vec<usize>) -> Self {
        debug_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        IndexSet(idx)
    }

    pub fn from_one_based(idx: &[usize]) -> Result<Self> {
        if idx.contains(&0) {
            return Err(Error::Parameter("indices are 1-based; 0 is not valid".into()));
        }
        IndexSet::new(idx.iter().map(|&i| i - 1).collect())
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&i| i + 1).collect()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&i| !other.contains(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

impl std::ops::Index<usize> for IndexSet {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for IndexSet {
    type Err = Error;

    /// Accepts `{1,4}` or `1,4` (1-based).
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut idx = Vec::new();
        for (k, tok) in inner.split(',').enumerate() {
            let tok = tok.trim();
            let v: usize = tok
                .parse()
                .map_err(|_| Error::parse(1, k + 1, format!("bad index {tok:?}")))?;
            idx.push(v);
        }
        IndexSet::from_one_based(&idx)
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for i in &self.0 {
            seq.serialize_element(&(i + 1))?;
        }
        seq.end()
    }
}

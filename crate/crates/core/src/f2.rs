//! Dense linear algebra over the two-element field.
//!
//! Bits are little-endian throughout: bit `i` of a packed word (or the `i`th
//! character of a 0/1 string) is coordinate `i`. Matrices are row-major with
//! each row padded to whole 64-bit words; padding bits are always zero.

use std::fmt;

use crate::error::{Error, Result};

/// Largest row-space dimension enumerated by default (2^20 elements).
pub const DEFAULT_SPAN_LOG2: u32 = 20;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

fn tail_mask(bits: usize) -> u64 {
    match bits % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector { len, words: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVector { len, words: vec![u64::MAX; words_for(len)] };
        v.clear_tail();
        v
    }

    /// Vector of length `len` (at most 64) whose bits are those of `bits`.
    pub fn from_u64(len: usize, bits: u64) -> Self {
        assert!(len <= 64, "from_u64 needs len <= 64");
        let mut v = BitVector::zeros(len);
        if len > 0 {
            v.words[0] = bits & tail_mask(len);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Parses a 0/1 string; character `i` is bit `i`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut v = BitVector::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(Error::InvalidInput(format!("bad bit character {c:?} in {s:?}"))),
            }
        }
        Ok(v)
    }

    fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The bits as a single word. Panics when longer than 64.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64, "to_u64 needs len <= 64");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let m = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "length mismatch");
        BitVector {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// Inner product over F2.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

/// Reduced row echelon form together with the pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: BitMatrix,
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from equal-length rows. `cols` disambiguates the empty case.
    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Result<Self> {
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Shape(format!("row {i} has {} bits, expected {cols}", r.len())));
            }
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    /// Rows given as 0/1 strings.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let parsed: Vec<BitVector> = rows.iter().map(|r| BitVector::parse(r)).collect::<Result<_>>()?;
        let cols = parsed.first().map_or(0, BitVector::len);
        BitMatrix::from_rows(cols, &parsed)
    }

    /// Rows given as packed words; requires `cols <= 64`.
    pub fn from_row_masks(cols: usize, masks: &[u64]) -> Self {
        assert!(cols <= 64, "from_row_masks needs cols <= 64");
        let mut m = BitMatrix::zeros(masks.len(), cols);
        for (i, &w) in masks.iter().enumerate() {
            if cols > 0 {
                m.data[i] = w & tail_mask(cols);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        self.data[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        let m = 1u64 << (c % 64);
        let w = &mut self.data[r * self.stride + c / 64];
        if value {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        self.data[r * self.stride + c / 64] ^= 1u64 << (c % 64);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector { len: self.cols, words: self.row_words(r).to_vec() }
    }

    /// Row `r` packed into one word; requires `cols <= 64`.
    pub fn row_mask(&self, r: usize) -> u64 {
        assert!(self.cols <= 64, "row_mask needs cols <= 64");
        self.row_words(r).first().copied().unwrap_or(0)
    }

    pub fn row_masks(&self) -> Vec<u64> {
        (0..self.rows).map(|r| self.row_mask(r)).collect()
    }

    pub fn col(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.data.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    /// Row `dst` ^= row `src`.
    pub fn add_row(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst, "adding a row to itself");
        for k in 0..self.stride {
            let w = self.data[src * self.stride + k];
            self.data[dst * self.stride + k] ^= w;
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            let (x, y) = (self.get(r, a), self.get(r, b));
            self.set(r, a, y);
            self.set(r, b, x);
        }
    }

    /// Column `dst` ^= column `src`.
    pub fn add_col(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst, "adding a column to itself");
        for r in 0..self.rows {
            if self.get(r, src) {
                self.flip(r, dst);
            }
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose()
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.row(r).iter_ones() {
                for w in 0..out.stride {
                    out.data[r * out.stride + w] ^= other.data[k * other.stride + w];
                }
            }
        }
        Ok(out)
    }

    /// `self · vᵀ`, one bit per row.
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!("vector of {} bits against {} columns", v.len(), self.cols)));
        }
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            let parity = self
                .row_words(r)
                .iter()
                .zip(v.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            out.set(r, parity & 1 == 1);
        }
        Ok(out)
    }

    /// `v · self`, the combination of rows selected by `v`.
    pub fn vec_mul(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.rows {
            return Err(Error::Shape(format!("vector of {} bits against {} rows", v.len(), self.rows)));
        }
        let mut out = BitVector::zeros(self.cols);
        for r in v.iter_ones() {
            for (o, w) in out.words.iter_mut().zip(self.row_words(r)) {
                *o ^= w;
            }
        }
        Ok(out)
    }

    /// Gauss-Jordan elimination. Pivots are taken at the leftmost nonzero
    /// column, using the first available row.
    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(p, next);
            for r in 0..self.rows {
                if r != next && m.get(r, c) {
                    m.add_row(next, r);
                }
            }
            pivots.push(c);
            next += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of `{v : self · vᵀ = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let Echelon { reduced, pivots } = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVector::zeros(self.cols);
                v.set(f, true);
                for (i, &p) in pivots.iter().enumerate() {
                    if reduced.get(i, f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Solves `self · vᵀ = rhs`. `None` means the system is inconsistent.
    pub fn solve_affine(&self, rhs: &BitVector) -> Result<Option<(BitVector, Vec<BitVector>)>> {
        if rhs.len() != self.rows {
            return Err(Error::Shape(format!("rhs has {} bits, matrix has {} rows", rhs.len(), self.rows)));
        }
        let mut aug = BitMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                aug.set(r, c, true);
            }
            aug.set(r, self.cols, rhs.get(r));
        }
        let Echelon { reduced, pivots } = aug.echelon();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut particular = BitVector::zeros(self.cols);
        for (i, &p) in pivots.iter().enumerate() {
            particular.set(p, reduced.get(i, self.cols));
        }
        Ok(Some((particular, self.kernel_basis())))
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = BitMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in self.row(r).iter_ones() {
                aug.set(r, c, true);
            }
            aug.set(r, n + r, true);
        }
        let Echelon { reduced, pivots } = aug.echelon();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = BitMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, reduced.get(r, n + c));
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Nonzero rows of the reduced echelon form.
    pub fn row_basis(&self) -> Vec<BitVector> {
        let e = self.echelon();
        (0..e.pivots.len()).map(|i| e.reduced.row(i)).collect()
    }

    /// Every element of the row space exactly once, in Gray-code order
    /// starting from zero. Fails when the rank exceeds `max_log2`.
    pub fn row_span_iter(&self, max_log2: u32) -> Result<RowSpan> {
        let basis = self.row_basis();
        if basis.len() as u32 > max_log2 {
            return Err(Error::Size(format!(
                "row space has dimension {} (limit {max_log2})",
                basis.len()
            )));
        }
        Ok(RowSpan { current: BitVector::zeros(self.cols), basis, step: 0 })
    }

    /// Text form: `rows cols` then one 0/1 string per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            s.push_str(&self.row(r).to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<BitMatrix> {
        let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
        let (m, rest) = BitMatrix::parse_lines(&lines)?;
        if let Some(&(line, l)) = rest.iter().find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::Format { line, msg: format!("unexpected trailing content {l:?}") });
        }
        Ok(m)
    }

    /// Parses one matrix block from numbered lines, skipping leading blank
    /// lines; returns the unconsumed remainder.
    pub fn parse_lines<'a>(lines: &'a [(usize, &'a str)]) -> Result<(BitMatrix, &'a [(usize, &'a str)])> {
        let start = lines.iter().position(|(_, l)| !l.trim().is_empty()).ok_or(Error::Format {
            line: lines.last().map_or(1, |&(n, _)| n),
            msg: "missing matrix header".into(),
        })?;
        let (hline, header) = lines[start];
        let dims: Vec<&str> = header.split_whitespace().collect();
        let parse_dim = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Format { line: hline, msg: format!("bad dimension {s:?}") })
        };
        if dims.len() != 2 {
            return Err(Error::Format { line: hline, msg: "header must be \"rows cols\"".into() });
        }
        let (rows, cols) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            let Some(&(line, text)) = lines.get(start + 1 + r) else {
                return Err(Error::Format {
                    line: hline + r + 1,
                    msg: format!("expected {rows} rows, found {r}"),
                });
            };
            let text = text.trim();
            if text.len() != cols {
                return Err(Error::Format { line, msg: format!("row has {} characters, expected {cols}", text.len()) });
            }
            for (c, ch) in text.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(r, c, true),
                    _ => return Err(Error::Format { line, msg: format!("bad character {ch:?}") }),
                }
            }
        }
        Ok((m, &lines[start + 1 + rows..]))
    }
}

impl serde::Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BitVector::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serialized as a list of row strings.
impl serde::Serialize for BitMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq((0..self.rows).map(|r| self.row(r).to_string()))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", self.row(r))?;
        }
        f.write_str("]")
    }
}

/// Iterator over a row space, produced by [`BitMatrix::row_span_iter`].
pub struct RowSpan {
    current: BitVector,
    basis: Vec<BitVector>,
    step: u64,
}

impl RowSpan {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

impl Iterator for RowSpan {
    type Item = BitVector;

    fn next(&mut self) -> Option<BitVector> {
        let total = 1u64 << self.basis.len();
        if self.step >= total {
            return None;
        }
        if self.step > 0 {
            let flip = self.step.trailing_zeros() as usize;
            self.current.xor_assign(&self.basis[flip]);
        }
        self.step += 1;
        Some(self.current.clone())
    }
}

/// Row-reduces packed words (each at most 64 bits) and returns a basis.
pub(crate) fn mask_basis(vectors: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for mut v in vectors {
        for &b in &basis {
            let top = 63 - b.leading_zeros();
            if v >> top & 1 == 1 {
                v ^= b;
            }
        }
        if v != 0 {
            let top = 63 - v.leading_zeros();
            for b in basis.iter_mut() {
                if *b >> top & 1 == 1 {
                    *b ^= v;
                }
            }
            basis.push(v);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_small_cases() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::zeros(2, 4).rank(), 0);
        assert_eq!(BitMatrix::from_strs(&["110", "011", "101"]).unwrap().rank(), 2);
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        assert!(BitMatrix::identity(4).kernel_basis().is_empty());
        assert_eq!(BitMatrix::zeros(1, 3).kernel_basis().len(), 3);
    }

    #[test]
    fn solve_single_equation() {
        let m = BitMatrix::from_strs(&["11"]).unwrap();
        let (p, k) = m.solve_affine(&BitVector::parse("1").unwrap()).unwrap().unwrap();
        assert_eq!(p.to_string(), "10");
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].to_string(), "11");
        assert!(BitMatrix::zeros(1, 1).solve_affine(&BitVector::parse("1").unwrap()).unwrap().is_none());
    }

    #[test]
    fn span_of_two_rows() {
        let m = BitMatrix::from_strs(&["110", "011"]).unwrap();
        let mut got: Vec<String> = m.row_span_iter(DEFAULT_SPAN_LOG2).unwrap().map(|v| v.to_string()).collect();
        got.sort();
        assert_eq!(got, ["000", "011", "101", "110"]);
        assert!(m.row_span_iter(1).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let m = BitMatrix::from_strs(&["110", "011", "001"]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), BitMatrix::identity(3));
        assert!(BitMatrix::from_strs(&["110", "011", "101"]).unwrap().inverse().is_none());
    }

    #[test]
    fn text_round_trip_and_errors() {
        let m = BitMatrix::from_strs(&["101", "010"]).unwrap();
        assert_eq!(BitMatrix::parse_text(&m.to_text()).unwrap(), m);
        match BitMatrix::parse_text("2 3\n101\n01x\n") {
            Err(Error::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mask_basis_rank() {
        assert_eq!(mask_basis([0b110, 0b011, 0b101]).len(), 2);
        assert_eq!(mask_basis([0, 0]).len(), 0);
    }
}

//! Boolean functions on F2^d as packed truth tables.
//!
//! Index `x` of the table is the input whose bit `i` is variable `i`.
//! Walsh coefficients use `W_f(y) = Σ_x (-1)^{f(x) ⊕ ⟨x,y⟩}` and are exact
//! 64-bit integers.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{block_count, block_range, Exec};
use crate::f2::{BitMatrix, BitVector};

/// Largest arity accepted by the Walsh transform.
pub const MAX_WALSH_VARS: usize = 28;
/// Default cap on the number of quadratic coefficients looped over by
/// [`BooleanFunction::nonquadraticity`].
pub const DEFAULT_QUADRATIC_BITS: usize = 24;

const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    nvars: usize,
    table: Vec<u64>,
}

impl BooleanFunction {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= 40, "truth tables beyond 40 variables are not supported");
        let words = if nvars >= 6 { 1usize << (nvars - 6) } else { 1 };
        BooleanFunction { nvars, table: vec![0; words] }
    }

    pub fn from_fn(nvars: usize, f: impl Fn(u64) -> bool) -> Self {
        let mut out = BooleanFunction::zero(nvars);
        for x in 0..out.size() {
            if f(x) {
                out.set(x, true);
            }
        }
        out
    }

    /// Parses a string of `2^d` characters, character `x` being `f(x)`.
    pub fn from_bit_string(s: &str) -> Result<Self> {
        let s = s.trim();
        let n = s.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!("truth table length {n} is not a power of two")));
        }
        let mut f = BooleanFunction::zero(n.trailing_zeros() as usize);
        for (x, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => f.set(x as u64, true),
                _ => return Err(Error::InvalidInput(format!("bad truth-table character {c:?}"))),
            }
        }
        Ok(f)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of table entries, `2^d`.
    pub fn size(&self) -> u64 {
        1u64 << self.nvars
    }

    pub fn words(&self) -> &[u64] {
        &self.table
    }

    pub fn get(&self, x: u64) -> bool {
        debug_assert!(x < self.size());
        self.table[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    pub fn set(&mut self, x: u64, value: bool) {
        assert!(x < self.size(), "input {x} out of range");
        let m = 1u64 << (x & 63);
        if value {
            self.table[(x >> 6) as usize] |= m;
        } else {
            self.table[(x >> 6) as usize] &= !m;
        }
    }

    pub fn weight(&self) -> u64 {
        self.table.iter().map(|w| w.count_ones() as u64).sum()
    }

    fn check_arity(&self, other: &BooleanFunction) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Arity { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn xor(&self, other: &BooleanFunction) -> Result<BooleanFunction> {
        self.check_arity(other)?;
        Ok(BooleanFunction {
            nvars: self.nvars,
            table: self.table.iter().zip(&other.table).map(|(a, b)| a ^ b).collect(),
        })
    }

    pub fn complement(&self) -> BooleanFunction {
        let mut out = self.clone();
        for w in out.table.iter_mut() {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    fn clear_tail(&mut self) {
        if self.nvars < 6 {
            self.table[0] &= (1u64 << self.size()) - 1;
        }
    }

    /// Hamming distance between truth tables.
    pub fn distance(&self, other: &BooleanFunction) -> Result<u64> {
        self.check_arity(other)?;
        Ok(self.table.iter().zip(&other.table).map(|(a, b)| (a ^ b).count_ones() as u64).sum())
    }

    /// `(-1)^f(x)` for every input.
    pub fn signs(&self) -> Vec<i64> {
        (0..self.size()).map(|x| if self.get(x) { -1 } else { 1 }).collect()
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.size()).map(|x| if self.get(x) { '1' } else { '0' }).collect()
    }

    /// Text form: the arity on one line, the table on the next.
    pub fn to_text(&self) -> String {
        format!("{}\n{}\n", self.nvars, self.to_bit_string())
    }

    pub fn parse_text(text: &str) -> Result<BooleanFunction> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (l1, d) = lines.next().ok_or(Error::Format { line: 1, msg: "missing arity".into() })?;
        let d: usize = d
            .trim()
            .parse()
            .map_err(|_| Error::Format { line: l1 + 1, msg: format!("bad arity {d:?}") })?;
        let (l2, t) = lines.next().ok_or(Error::Format { line: l1 + 2, msg: "missing truth table".into() })?;
        let t = t.trim();
        if d > 30 || t.len() != 1usize << d {
            return Err(Error::Format {
                line: l2 + 1,
                msg: format!("expected {} table characters for d = {d}, found {}", 1u64 << d.min(62), t.len()),
            });
        }
        if let Some((l3, _)) = lines.next() {
            return Err(Error::Format { line: l3 + 1, msg: "unexpected trailing content".into() });
        }
        BooleanFunction::from_bit_string(t).map_err(|e| Error::Format { line: l2 + 1, msg: e.to_string() })
    }

    /// In-place Möbius transform; it is an involution mapping tables to ANF
    /// coefficient tables and back.
    fn mobius(&mut self) {
        for (i, &lo) in LOW_HALF.iter().enumerate().take(self.nvars.min(6)) {
            let shift = 1u32 << i;
            for w in self.table.iter_mut() {
                *w ^= (*w & lo) << shift;
            }
        }
        for i in 6..self.nvars {
            let h = 1usize << (i - 6);
            for w in 0..self.table.len() {
                if w & h != 0 {
                    self.table[w] ^= self.table[w ^ h];
                }
            }
        }
    }

    pub fn anf(&self) -> AnfPolynomial {
        let mut t = self.clone();
        t.mobius();
        let monomials = (0..t.size()).filter(|&m| t.get(m)).collect();
        AnfPolynomial { nvars: self.nvars, monomials }
    }

    pub fn from_anf(p: &AnfPolynomial) -> BooleanFunction {
        let mut t = BooleanFunction::zero(p.nvars);
        for &m in &p.monomials {
            t.set(m, true);
        }
        t.mobius();
        t
    }

    pub fn degree(&self) -> usize {
        self.anf().degree()
    }

    pub fn walsh_transform(&self) -> Result<WalshSpectrum> {
        self.walsh_transform_with(Exec::default())
    }

    pub fn walsh_transform_with(&self, exec: Exec) -> Result<WalshSpectrum> {
        if self.nvars > MAX_WALSH_VARS {
            return Err(Error::Size(format!(
                "Walsh transform on {} variables (limit {MAX_WALSH_VARS})",
                self.nvars
            )));
        }
        let mut coeffs = self.signs();
        fwht_with(&mut coeffs, exec);
        Ok(WalshSpectrum { nvars: self.nvars, coeffs })
    }

    /// `2^{d-1} - max|W|/2`, the distance to the nearest affine function.
    pub fn nonlinearity(&self) -> Result<u64> {
        let w = self.walsh_transform()?;
        Ok((self.size() - w.max_abs()) / 2)
    }

    pub fn is_bent(&self) -> Result<bool> {
        if self.nvars % 2 == 1 {
            return Ok(false);
        }
        let flat = 1i64 << (self.nvars / 2);
        Ok(self.walsh_transform()?.coeffs.iter().all(|c| c.abs() == flat))
    }

    /// `Σ_x (-1)^{c(x) ⊕ f(x)}`.
    pub fn generalized_walsh(&self, c: &BooleanFunction) -> Result<i64> {
        let dist = self.distance(c)?;
        Ok(self.size() as i64 - 2 * dist as i64)
    }

    /// `g(x) = f(xT ⊕ b)` with `x` a row vector.
    pub fn apply_affine_substitution(&self, t: &BitMatrix, b: &BitVector) -> Result<BooleanFunction> {
        let d = self.nvars;
        if t.rows() != d || t.cols() != d || b.len() != d {
            return Err(Error::InvalidTransform(format!(
                "expected a {d}x{d} matrix and {d}-bit shift, got {}x{} and {}",
                t.rows(),
                t.cols(),
                b.len()
            )));
        }
        if !t.is_invertible() {
            return Err(Error::InvalidTransform("matrix is singular".into()));
        }
        let rows = t.row_masks();
        let mut out = BooleanFunction::zero(d);
        let mut image = b.to_u64();
        for step in 0..self.size() {
            if step > 0 {
                image ^= rows[step.trailing_zeros() as usize];
            }
            let x = step ^ (step >> 1);
            if self.get(image) {
                out.set(x, true);
            }
        }
        Ok(out)
    }

    /// Distance to the nearest function of degree at most two. Loops over all
    /// quadratic parts with one Walsh transform each, so it is limited to
    /// `d(d-1)/2 <= max_quadratic_bits`.
    pub fn nonquadraticity(&self, max_quadratic_bits: usize, exec: Exec) -> Result<u64> {
        let d = self.nvars;
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
        if pairs.len() > max_quadratic_bits {
            return Err(Error::Size(format!(
                "{} quadratic coefficients for d = {d} (limit {max_quadratic_bits})",
                pairs.len()
            )));
        }
        let total = 1u64 << pairs.len();
        let block = 256u64.min(total);
        let size = self.size() as usize;
        let best = exec.map_reduce(
            block_count(total, block),
            0i64,
            |bi| {
                let mut buf = vec![0i32; size];
                let mut best = 0i64;
                for k in block_range(total, block, bi) {
                    let mut upper = vec![0u64; d];
                    for (p, &(i, j)) in pairs.iter().enumerate() {
                        if k >> p & 1 == 1 {
                            upper[i] |= 1 << j;
                        }
                    }
                    for (x, v) in buf.iter_mut().enumerate() {
                        let x = x as u64;
                        let mut q = 0u32;
                        let mut rest = x;
                        while rest != 0 {
                            let i = rest.trailing_zeros() as usize;
                            rest &= rest - 1;
                            q ^= (x & upper[i]).count_ones();
                        }
                        let bit = self.get(x) as u32 ^ (q & 1);
                        *v = 1 - 2 * bit as i32;
                    }
                    fwht(&mut buf);
                    let m = buf.iter().map(|c| c.unsigned_abs() as i64).max().unwrap_or(0);
                    best = best.max(m);
                }
                best
            },
            i64::max,
        );
        Ok((self.size() - best as u64) / 2)
    }
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.nvars <= 8 {
            write!(f, "BooleanFunction({}: {})", self.nvars, self.to_bit_string())
        } else {
            write!(f, "BooleanFunction({} vars, weight {})", self.nvars, self.weight())
        }
    }
}

/// `⊕ x_i` in integer arithmetic: `Σ_{b ≠ 0} (−2)^{|b|−1} ∏ x_i^{b_i}` over
/// all nonzero `b` on `n` bits.
pub fn parity_as_integer_sum(x: u64, n: usize) -> Result<i64> {
    if n > 20 {
        return Err(Error::Size(format!("{n} bits (limit 20)")));
    }
    let x = x & ((1u64 << n) - 1);
    Ok((1u64..1 << n)
        .filter(|b| b & !x == 0)
        .map(|b| (-2i64).pow(b.count_ones() - 1))
        .sum())
}

/// In-place unnormalized Walsh-Hadamard butterfly.
pub fn fwht<T: Copy + Add<Output = T> + Sub<Output = T>>(buf: &mut [T]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in buf.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

const FWHT_BLOCK: usize = 1 << 14;

/// [`fwht`] with the large stages spread over threads.
pub fn fwht_with<T>(buf: &mut [T], exec: Exec)
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Send,
{
    let n = buf.len();
    if !exec.is_parallel() || n <= FWHT_BLOCK {
        fwht(buf);
        return;
    }
    exec.for_each_chunk_mut(buf, FWHT_BLOCK, |_, c| fwht(c));
    let mut h = FWHT_BLOCK;
    while h < n {
        for block in buf.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            exec.for_each_pair_chunk_mut(lo, hi, FWHT_BLOCK, |a, b| {
                for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                    let (p, q) = (*x, *y);
                    *x = p + q;
                    *y = p - q;
                }
            });
        }
        h *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalshSpectrum {
    pub nvars: usize,
    pub coeffs: Vec<i64>,
}

impl WalshSpectrum {
    pub fn get(&self, y: u64) -> i64 {
        self.coeffs[y as usize]
    }

    pub fn max_abs(&self) -> u64 {
        self.coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// Smallest index attaining the largest magnitude.
    pub fn argmax_abs(&self) -> u64 {
        let m = self.max_abs();
        self.coeffs.iter().position(|c| c.unsigned_abs() == m).unwrap_or(0) as u64
    }

    pub fn parseval_sum(&self) -> i128 {
        self.coeffs.iter().map(|&c| c as i128 * c as i128).sum()
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    /// Inverts the transform; fails unless the spectrum came from a function.
    pub fn inverse(&self) -> Result<BooleanFunction> {
        let mut buf = self.coeffs.clone();
        fwht(&mut buf);
        let n = buf.len() as i64;
        let mut f = BooleanFunction::zero(self.nvars);
        for (x, v) in buf.into_iter().enumerate() {
            match v {
                v if v == n => {}
                v if v == -n => f.set(x as u64, true),
                _ => return Err(Error::InvalidInput("coefficients are not a Walsh spectrum".into())),
            }
        }
        Ok(f)
    }
}

/// Algebraic normal form: a set of monomials, each a mask of variables.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AnfPolynomial {
    nvars: usize,
    monomials: BTreeSet<u64>,
}

impl AnfPolynomial {
    pub fn new(nvars: usize) -> Self {
        assert!(nvars <= 63, "ANF supports at most 63 variables");
        AnfPolynomial { nvars, monomials: BTreeSet::new() }
    }

    pub fn from_sets(nvars: usize, sets: &[&[usize]]) -> Result<Self> {
        let mut p = AnfPolynomial::new(nvars);
        for s in sets {
            let mut m = 0u64;
            for &v in *s {
                if v >= nvars {
                    return Err(Error::InvalidInput(format!("variable {v} out of range {nvars}")));
                }
                m |= 1 << v;
            }
            p.toggle(m);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Adds the monomial mod 2 (removing it if already present).
    pub fn toggle(&mut self, monomial: u64) {
        if !self.monomials.remove(&monomial) {
            self.monomials.insert(monomial);
        }
    }

    pub fn contains(&self, monomial: u64) -> bool {
        self.monomials.contains(&monomial)
    }

    pub fn monomials(&self) -> impl Iterator<Item = u64> + '_ {
        self.monomials.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.monomials.iter().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn evaluate(&self, x: u64) -> bool {
        self.monomials.iter().filter(|&&m| x & m == m).count() % 2 == 1
    }

    /// Monomials as sorted lists of variable indices.
    pub fn monomial_sets(&self) -> Vec<Vec<usize>> {
        self.monomials
            .iter()
            .map(|&m| (0..64).filter(|&i| m >> i & 1 == 1).collect())
            .collect()
    }
}

impl fmt::Display for AnfPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .monomial_sets()
            .iter()
            .map(|s| {
                if s.is_empty() {
                    "1".to_string()
                } else {
                    s.iter().map(|v| format!("x{v}")).collect::<Vec<_>>().join("*")
                }
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

//! CSS codes and the nonlocal games they define.
//!
//! A referee draws generator labels `x` and `z`, hands qubit `i` the bits
//! `a_i = (x·H_X)_i` and `b_i = (z·H_Z)_i`, and the players win when the XOR of
//! their answers equals `½ Σ_i a_i b_i mod 2`. Players are limited to 64 so
//! that a question assignment fits in one machine word.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::boolfn::{AnfPolynomial, BooleanFunction};
use crate::error::{Error, Result};
use crate::f2::{BitMatrix, BitVector, DEFAULT_SPAN_LOG2};

pub const MAX_PLAYERS: usize = 64;
/// Largest number of parameter bits (x bits plus z bits) a game may have.
pub const MAX_TARGET_VARS: usize = 26;
/// Above this many parameter bits the two target constructions are compared
/// on a strided sample instead of every input.
const FULL_CROSS_CHECK_VARS: usize = 16;

/// `⌊popcount(a ∧ b) / 2⌋ mod 2`, the referee's parity for questions `a`, `b`.
pub fn half_overlap_parity(a: u64, b: u64) -> bool {
    (a & b).count_ones() >> 1 & 1 == 1
}

fn xor_rows(rows: &[u64], label: u64) -> u64 {
    let mut acc = 0;
    let mut rest = label;
    while rest != 0 {
        acc ^= rows[rest.trailing_zeros() as usize];
        rest &= rest - 1;
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    hx: BitMatrix,
    hz: BitMatrix,
    redundant: bool,
}

impl CssCode {
    /// Full-rank parity-check matrices whose rows commute.
    pub fn new(hx: BitMatrix, hz: BitMatrix) -> Result<Self> {
        CssCode::build(hx, hz, false)
    }

    /// Like [`CssCode::new`] but tolerates linearly dependent generators.
    pub fn new_redundant(hx: BitMatrix, hz: BitMatrix) -> Result<Self> {
        CssCode::build(hx, hz, true)
    }

    fn build(hx: BitMatrix, hz: BitMatrix, allow_redundant: bool) -> Result<Self> {
        if hx.cols() != hz.cols() {
            return Err(Error::Shape(format!("H_X has {} columns, H_Z has {}", hx.cols(), hz.cols())));
        }
        let n = hx.cols();
        if n == 0 || n > MAX_PLAYERS {
            return Err(Error::Parameter(format!("{n} qubits (supported: 1 to {MAX_PLAYERS})")));
        }
        if hx.rows() == 0 || hz.rows() == 0 {
            return Err(Error::InvalidInput("both parity-check matrices need at least one row".into()));
        }
        if !hx.mul(&hz.transpose())?.is_zero() {
            return Err(Error::InvalidInput("X-type and Z-type generators do not commute".into()));
        }
        let full = hx.rank() == hx.rows() && hz.rank() == hz.rows();
        if !full && !allow_redundant {
            return Err(Error::InvalidInput("parity-check matrices are not full rank".into()));
        }
        Ok(CssCode { hx, hz, redundant: !full })
    }

    pub fn nqubits(&self) -> usize {
        self.hx.cols()
    }

    pub fn hx(&self) -> &BitMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &BitMatrix {
        &self.hz
    }

    /// True when some generators are products of others.
    pub fn is_redundant(&self) -> bool {
        self.redundant
    }

    pub fn x_rows(&self) -> Vec<u64> {
        self.hx.row_masks()
    }

    pub fn z_rows(&self) -> Vec<u64> {
        self.hz.row_masks()
    }

    /// `label · H_X` for a label with at most 64 generators.
    pub fn x_image(&self, label: u64) -> u64 {
        xor_rows(&self.x_rows(), label)
    }

    pub fn z_image(&self, label: u64) -> u64 {
        xor_rows(&self.z_rows(), label)
    }

    /// Monomials of the target as a polynomial in the generator labels,
    /// as (X-generator indices, Z-generator indices).
    pub fn target_monomials(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let xs = self.x_rows();
        let zs = self.z_rows();
        let mut out = Vec::new();
        for (al, &xa) in xs.iter().enumerate() {
            for (be, &zb) in zs.iter().enumerate() {
                if half_overlap_parity(xa, zb) {
                    out.push((vec![al], vec![be]));
                }
            }
        }
        for (al, &xa) in xs.iter().enumerate() {
            for (be, &zb) in zs.iter().enumerate() {
                for (de, &zd) in zs.iter().enumerate().skip(be + 1) {
                    if (xa & zb & zd).count_ones() & 1 == 1 {
                        out.push((vec![al], vec![be, de]));
                    }
                }
            }
        }
        for (al, &xa) in xs.iter().enumerate() {
            for (ga, &xg) in xs.iter().enumerate().skip(al + 1) {
                for (be, &zb) in zs.iter().enumerate() {
                    if (xa & xg & zb).count_ones() & 1 == 1 {
                        out.push((vec![al, ga], vec![be]));
                    }
                }
            }
        }
        out
    }

    /// The target's algebraic normal form over variables `x_0..x_{m_x-1}`
    /// followed by `z_0..z_{m_z-1}`.
    pub fn target_anf(&self) -> Result<AnfPolynomial> {
        let mx = self.hx.rows();
        let nvars = mx + self.hz.rows();
        if nvars > 63 {
            return Err(Error::Size(format!("{nvars} generator labels (ANF limit 63)")));
        }
        let mut p = AnfPolynomial::new(nvars);
        for (xs, zs) in self.target_monomials() {
            let m = xs.iter().map(|&i| 1u64 << i).chain(zs.iter().map(|&j| 1u64 << (mx + j))).fold(0, |a, b| a | b);
            p.toggle(m);
        }
        Ok(p)
    }

    /// Two matrix blocks separated by a blank line, `H_X` first.
    pub fn to_text(&self) -> String {
        format!("{}\n{}", self.hx.to_text(), self.hz.to_text())
    }

    pub fn parse_text(text: &str, allow_redundant: bool) -> Result<CssCode> {
        let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
        let (hx, rest) = BitMatrix::parse_lines(&lines)?;
        let (hz, rest) = BitMatrix::parse_lines(rest)?;
        if let Some(&(line, _)) = rest.iter().find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::Format { line, msg: "unexpected content after H_Z".into() });
        }
        CssCode::build(hx, hz, allow_redundant)
    }
}

/// Codes with built-in constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedCode {
    Ghz(usize),
    Cluster1D(usize),
    ToricSquare { l: usize, redundant: bool },
    ToricHoneycomb { lx: usize, ly: usize, redundant: bool },
}

impl NamedCode {
    pub fn build(self) -> Result<CssCode> {
        match self {
            NamedCode::Ghz(n) => ghz_code(n),
            NamedCode::Cluster1D(n) => cluster_code(n),
            NamedCode::ToricSquare { l, redundant } => {
                let (plaq, stars) = square_lattice(l)?;
                finish_lattice(2 * l * l, plaq, stars, redundant)
            }
            NamedCode::ToricHoneycomb { lx, ly, redundant } => {
                let (hex, stars) = honeycomb_lattice(lx, ly)?;
                finish_lattice(3 * lx * ly, hex, stars, redundant)
            }
        }
    }
}

impl FromStr for NamedCode {
    type Err = Error;

    /// `ghz:N`, `cluster:N`, `toric:L`, `toric-redundant:L`,
    /// `honeycomb:LXxLY`, `honeycomb-redundant:LXxLY`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("unknown code {s:?}"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let pair = |t: &str| -> Result<(usize, usize)> {
            let (a, b) = t.split_once('x').ok_or_else(bad)?;
            Ok((num(a)?, num(b)?))
        };
        Ok(match kind.trim().to_ascii_lowercase().as_str() {
            "ghz" => NamedCode::Ghz(num(arg)?),
            "cluster" => NamedCode::Cluster1D(num(arg)?),
            "toric" => NamedCode::ToricSquare { l: num(arg)?, redundant: false },
            "toric-redundant" => NamedCode::ToricSquare { l: num(arg)?, redundant: true },
            "honeycomb" | "honeycomb-redundant" => {
                let (lx, ly) = pair(arg)?;
                NamedCode::ToricHoneycomb { lx, ly, redundant: kind.ends_with("redundant") }
            }
            _ => return Err(bad()),
        })
    }
}

impl fmt::Display for NamedCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NamedCode::Ghz(n) => write!(f, "ghz:{n}"),
            NamedCode::Cluster1D(n) => write!(f, "cluster:{n}"),
            NamedCode::ToricSquare { l, redundant } => {
                write!(f, "toric{}:{l}", if redundant { "-redundant" } else { "" })
            }
            NamedCode::ToricHoneycomb { lx, ly, redundant } => {
                write!(f, "honeycomb{}:{lx}x{ly}", if redundant { "-redundant" } else { "" })
            }
        }
    }
}

fn ghz_code(n: usize) -> Result<CssCode> {
    if !(2..=MAX_PLAYERS).contains(&n) {
        return Err(Error::Parameter(format!("GHZ code needs 2 to {MAX_PLAYERS} qubits, got {n}")));
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let hz: Vec<u64> = (0..n - 1).map(|i| 0b11 << i).collect();
    CssCode::new(BitMatrix::from_row_masks(n, &[all]), BitMatrix::from_row_masks(n, &hz))
}

/// Ring of `n` qubits with X generators on `{2k, 2k+1, 2k+2}` and Z generators
/// on `{2k-1, 2k, 2k+1}` (indices mod `n`).
fn cluster_code(n: usize) -> Result<CssCode> {
    if n < 4 || n % 2 == 1 || n > MAX_PLAYERS {
        return Err(Error::Parameter(format!("cluster code needs an even qubit count from 4 to {MAX_PLAYERS}, got {n}")));
    }
    let ring = |qs: [usize; 3]| qs.iter().fold(0u64, |m, &q| m | 1 << (q % n));
    let hx: Vec<u64> = (0..n / 2).map(|k| ring([2 * k, 2 * k + 1, 2 * k + 2])).collect();
    let hz: Vec<u64> = (0..n / 2).map(|k| ring([2 * k + n - 1, 2 * k, 2 * k + 1])).collect();
    CssCode::new(BitMatrix::from_row_masks(n, &hx), BitMatrix::from_row_masks(n, &hz))
}

/// Edge `h(i,j)` joins vertices `(i,j)` and `(i+1,j)`; edge `v(i,j)` joins
/// `(i,j)` and `(i,j+1)`. Returns plaquette and vertex-star supports.
fn square_lattice(l: usize) -> Result<(Vec<u64>, Vec<u64>)> {
    if l < 2 || l % 2 == 1 || 2 * l * l > MAX_PLAYERS {
        return Err(Error::Parameter(format!("square toric code needs even L with 2L^2 <= {MAX_PLAYERS}, got {l}")));
    }
    let h = |i: usize, j: usize| 1u64 << ((j % l) * l + i % l);
    let v = |i: usize, j: usize| 1u64 << (l * l + (j % l) * l + i % l);
    let mut plaq = Vec::new();
    let mut stars = Vec::new();
    for j in 0..l {
        for i in 0..l {
            plaq.push(h(i, j) | h(i, j + 1) | v(i, j) | v(i + 1, j));
            stars.push(h(i, j) | h(i + l - 1, j) | v(i, j) | v(i, j + l - 1));
        }
    }
    Ok((plaq, stars))
}

/// Cell `(i,j)` holds vertices `A` and `B` joined by edge `e0`; `e1` joins
/// `A(i,j)` to `B(i,j-1)` and `e2` joins `A(i,j)` to `B(i+1,j-1)`.
fn honeycomb_lattice(lx: usize, ly: usize) -> Result<(Vec<u64>, Vec<u64>)> {
    if lx < 2 || ly < 2 || 3 * lx * ly > MAX_PLAYERS {
        return Err(Error::Parameter(format!(
            "honeycomb toric code needs Lx, Ly >= 2 and 3·Lx·Ly <= {MAX_PLAYERS}, got {lx}x{ly}"
        )));
    }
    let cell = |i: usize, j: usize| (j % ly) * lx + i % lx;
    let e = |k: usize, i: usize, j: usize| 1u64 << (3 * cell(i, j) + k);
    let mut hex = Vec::new();
    let mut stars = Vec::new();
    for j in 0..ly {
        for i in 0..lx {
            let (ip, jm) = (i + 1, j + ly - 1);
            hex.push(e(2, i, j) | e(0, ip, jm) | e(1, ip, jm) | e(2, i, jm) | e(0, i, jm) | e(1, i, j));
        }
    }
    for j in 0..ly {
        for i in 0..lx {
            stars.push(e(0, i, j) | e(1, i, j) | e(2, i, j));
            stars.push(e(0, i, j) | e(1, i, j + 1) | e(2, i + lx - 1, j + 1));
        }
    }
    Ok((hex, stars))
}

fn finish_lattice(n: usize, mut plaq: Vec<u64>, mut stars: Vec<u64>, redundant: bool) -> Result<CssCode> {
    if redundant {
        return CssCode::new_redundant(BitMatrix::from_row_masks(n, &plaq), BitMatrix::from_row_masks(n, &stars));
    }
    plaq.pop();
    stars.pop();
    CssCode::new(BitMatrix::from_row_masks(n, &plaq), BitMatrix::from_row_masks(n, &stars))
}

/// Which questions one side of the referee may ask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputSet {
    /// Every label of the generators, so every element of the row space.
    AllOfImage,
    /// An explicit list of row-space vectors, indexed by parameter bits.
    FixedList(Vec<BitVector>),
}

impl InputSet {
    pub fn singleton(v: BitVector) -> InputSet {
        InputSet::FixedList(vec![v])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputSets {
    pub x: InputSet,
    pub z: InputSet,
}

impl InputSets {
    pub fn unrestricted() -> Self {
        InputSets { x: InputSet::AllOfImage, z: InputSet::AllOfImage }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameMode {
    Xor,
    Submeasurement,
}

/// `a(p) = offset ⊕ ⊕_{j ∈ p} rows[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineQuestions {
    pub offset: u64,
    pub rows: Vec<u64>,
}

/// Maps a query index `q = px | pz << x_bits` to the players' questions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryMap {
    pub x_bits: usize,
    pub z_bits: usize,
    pub a_masks: Vec<u64>,
    pub b_masks: Vec<u64>,
    /// Generator labels producing each X question.
    pub x_labels: Vec<BitVector>,
    pub z_labels: Vec<BitVector>,
}

impl QueryMap {
    pub fn nvars(&self) -> usize {
        self.x_bits + self.z_bits
    }

    pub fn num_queries(&self) -> u64 {
        1u64 << self.nvars()
    }

    pub fn split(&self, q: u64) -> (usize, usize) {
        ((q & ((1u64 << self.x_bits) - 1)) as usize, (q >> self.x_bits) as usize)
    }

    /// Questions `(a, b)` as qubit masks.
    pub fn question(&self, q: u64) -> (u64, u64) {
        let (px, pz) = self.split(q);
        (self.a_masks[px], self.b_masks[pz])
    }

    fn affine_side(masks: &[u64], bits: usize) -> Option<AffineQuestions> {
        let offset = masks[0];
        let rows: Vec<u64> = (0..bits).map(|j| masks[1 << j] ^ offset).collect();
        let ok = masks.iter().enumerate().all(|(p, &m)| m == offset ^ xor_rows(&rows, p as u64));
        ok.then_some(AffineQuestions { offset, rows })
    }

    /// The X questions as an affine function of the parameter bits, if they are one.
    pub fn x_affine(&self) -> Option<AffineQuestions> {
        QueryMap::affine_side(&self.a_masks, self.x_bits)
    }

    pub fn z_affine(&self) -> Option<AffineQuestions> {
        QueryMap::affine_side(&self.b_masks, self.z_bits)
    }
}

/// A stabilizer element whose support lies inside a query's support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubmeasurementConstraint {
    pub x_part: u64,
    pub z_part: u64,
    pub parity: bool,
}

impl SubmeasurementConstraint {
    pub fn support(&self) -> u64 {
        self.x_part | self.z_part
    }

    pub fn support_indices(&self) -> Vec<usize> {
        (0..64).filter(|&i| self.support() >> i & 1 == 1).collect()
    }
}

#[derive(Clone, Debug)]
pub struct GameSpec {
    code: CssCode,
    inputs: InputSets,
    mode: GameMode,
    target: BooleanFunction,
    query_map: QueryMap,
    constraints: Vec<Vec<SubmeasurementConstraint>>,
}

fn build_side(matrix: &BitMatrix, set: &InputSet, side: &str) -> Result<(usize, Vec<u64>, Vec<BitVector>)> {
    let m = matrix.rows();
    match set {
        InputSet::AllOfImage => {
            if m > MAX_TARGET_VARS {
                return Err(Error::Size(format!("{m} {side} generators (limit {MAX_TARGET_VARS})")));
            }
            let rows = matrix.row_masks();
            let masks = (0..1u64 << m).map(|p| xor_rows(&rows, p)).collect();
            let labels = (0..1u64 << m).map(|p| BitVector::from_u64(m, p)).collect();
            Ok((m, masks, labels))
        }
        InputSet::FixedList(list) => {
            if list.is_empty() || !list.len().is_power_of_two() {
                return Err(Error::InvalidInput(format!(
                    "{side} input list has {} entries; need a nonzero power of two",
                    list.len()
                )));
            }
            let transposed = matrix.transpose();
            let mut masks = Vec::with_capacity(list.len());
            let mut labels = Vec::with_capacity(list.len());
            for v in list {
                if v.len() != matrix.cols() {
                    return Err(Error::InvalidInput(format!(
                        "{side} input {v} has {} bits, code has {} qubits",
                        v.len(),
                        matrix.cols()
                    )));
                }
                let Some((label, _)) = transposed.solve_affine(v)? else {
                    return Err(Error::InvalidInput(format!("{side} input {v} is not in the row space")));
                };
                masks.push(v.to_u64());
                labels.push(label);
            }
            Ok((list.len().trailing_zeros() as usize, masks, labels))
        }
    }
}

fn monomial_holds(xs: &[usize], zs: &[usize], xl: &BitVector, zl: &BitVector) -> bool {
    xs.iter().all(|&i| xl.get(i)) && zs.iter().all(|&j| zl.get(j))
}

impl GameSpec {
    pub fn xor(code: CssCode, inputs: InputSets) -> Result<GameSpec> {
        GameSpec::build(code, inputs, GameMode::Xor)
    }

    pub fn submeasurement(code: CssCode, inputs: InputSets) -> Result<GameSpec> {
        GameSpec::build(code, inputs, GameMode::Submeasurement)
    }

    /// Builds the target directly from the questions and again from the
    /// code's ANF coefficients, and fails if the two disagree.
    pub fn build(code: CssCode, inputs: InputSets, mode: GameMode) -> Result<GameSpec> {
        let (x_bits, a_masks, x_labels) = build_side(code.hx(), &inputs.x, "X")?;
        let (z_bits, b_masks, z_labels) = build_side(code.hz(), &inputs.z, "Z")?;
        let d = x_bits + z_bits;
        if d > MAX_TARGET_VARS {
            return Err(Error::Size(format!("{d} parameter bits (limit {MAX_TARGET_VARS})")));
        }
        let query_map = QueryMap { x_bits, z_bits, a_masks, b_masks, x_labels, z_labels };
        let mut target = BooleanFunction::zero(d);
        for q in 0..query_map.num_queries() {
            let (a, b) = query_map.question(q);
            if (a & b).count_ones() % 2 == 1 {
                return Err(Error::Consistency(format!("questions {a:#x}, {b:#x} overlap oddly")));
            }
            if half_overlap_parity(a, b) {
                target.set(q, true);
            }
        }

        let monomials = code.target_monomials();
        let stride = if d <= FULL_CROSS_CHECK_VARS { 1 } else { (query_map.num_queries() >> 12) | 1 };
        let mut q = 0;
        while q < query_map.num_queries() {
            let (px, pz) = query_map.split(q);
            let (xl, zl) = (&query_map.x_labels[px], &query_map.z_labels[pz]);
            let from_anf = monomials.iter().filter(|(xs, zs)| monomial_holds(xs, zs, xl, zl)).count() % 2 == 1;
            if from_anf != target.get(q) {
                return Err(Error::Consistency(format!("ANF and direct targets differ at query {q}")));
            }
            q += stride;
        }
        if inputs.x == InputSet::AllOfImage && inputs.z == InputSet::AllOfImage {
            let anf = target.anf();
            if anf != code.target_anf()? {
                return Err(Error::Consistency("target ANF differs from the coefficient formula".into()));
            }
            if anf.degree() > 3 {
                return Err(Error::Consistency(format!("target has degree {}", anf.degree())));
            }
        }

        let constraints = match mode {
            GameMode::Xor => Vec::new(),
            GameMode::Submeasurement => submeasurement_constraints(&code, &query_map)?,
        };
        Ok(GameSpec { code, inputs, mode, target, query_map, constraints })
    }

    /// Rebuilds a game from its serialized view. The stored truth table, if
    /// present, must match the rebuilt target.
    pub fn from_summary(s: &GameSummary) -> Result<GameSpec> {
        let matrix = |rows: &[String], side: &str| -> Result<BitMatrix> {
            let parsed = rows
                .iter()
                .map(|r| BitVector::parse(r))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::InvalidInput(format!("{side} row: {e}")))?;
            BitMatrix::from_rows(s.nqubits, &parsed)
        };
        let (hx, hz) = (matrix(&s.hx, "hx")?, matrix(&s.hz, "hz")?);
        let code = CssCode::new_redundant(hx, hz)?;
        let side = |list: &Option<Vec<String>>| -> Result<InputSet> {
            Ok(match list {
                None => InputSet::AllOfImage,
                Some(v) => InputSet::FixedList(v.iter().map(|r| BitVector::parse(r)).collect::<Result<_>>()?),
            })
        };
        let inputs = InputSets { x: side(&s.x_inputs)?, z: side(&s.z_inputs)? };
        let game = GameSpec::build(code, inputs, s.mode)?;
        if let Some(table) = &s.target_table {
            if *table != game.target.to_bit_string() {
                return Err(Error::Consistency("stored target table differs from the rebuilt game".into()));
            }
        }
        Ok(game)
    }

    pub fn code(&self) -> &CssCode {
        &self.code
    }

    pub fn inputs(&self) -> &InputSets {
        &self.inputs
    }

    pub fn mode(&self) -> GameMode {
        self.mode
    }

    pub fn target(&self) -> &BooleanFunction {
        &self.target
    }

    pub fn query_map(&self) -> &QueryMap {
        &self.query_map
    }

    pub fn nplayers(&self) -> usize {
        self.code.nqubits()
    }

    /// Constraints checked for query `q` in submeasurement mode (empty in XOR mode).
    pub fn constraints(&self, q: u64) -> &[SubmeasurementConstraint] {
        self.constraints.get(q as usize).map_or(&[], Vec::as_slice)
    }

    /// Same questions with a different target, as produced by local Clifford dressing.
    pub fn retarget(&self, target: BooleanFunction) -> Result<GameSpec> {
        if target.nvars() != self.target.nvars() {
            return Err(Error::Arity { left: self.target.nvars(), right: target.nvars() });
        }
        Ok(GameSpec { target, ..self.clone() })
    }

    pub fn summary(&self) -> GameSummary {
        let list = |s: &InputSet| match s {
            InputSet::AllOfImage => None,
            InputSet::FixedList(v) => Some(v.iter().map(ToString::to_string).collect()),
        };
        let name = |i: usize| {
            if i < self.query_map.x_bits {
                format!("x{i}")
            } else {
                format!("z{}", i - self.query_map.x_bits)
            }
        };
        let anf = self
            .target
            .anf()
            .monomial_sets()
            .iter()
            .map(|s| if s.is_empty() { "1".into() } else { s.iter().map(|&i| name(i)).collect::<Vec<_>>().join("*") })
            .collect();
        let n = self.nplayers();
        let constraints = (self.mode == GameMode::Submeasurement).then(|| {
            (0..self.query_map.num_queries())
                .map(|q| {
                    let (a, b) = self.query_map.question(q);
                    QueryConstraints {
                        query: q,
                        a: BitVector::from_u64(n, a).to_string(),
                        b: BitVector::from_u64(n, b).to_string(),
                        constraints: self
                            .constraints(q)
                            .iter()
                            .map(|c| ConstraintSummary { support: c.support_indices(), parity: c.parity as u8 })
                            .collect(),
                    }
                })
                .collect()
        });
        GameSummary {
            nqubits: n,
            mode: self.mode,
            hx: (0..self.code.hx.rows()).map(|r| self.code.hx.row(r).to_string()).collect(),
            hz: (0..self.code.hz.rows()).map(|r| self.code.hz.row(r).to_string()).collect(),
            x_inputs: list(&self.inputs.x),
            z_inputs: list(&self.inputs.z),
            x_bits: self.query_map.x_bits,
            z_bits: self.query_map.z_bits,
            target_anf: anf,
            target_table: (self.target.nvars() <= 20).then(|| self.target.to_bit_string()),
            constraints,
        }
    }
}

/// Serializable view of a [`GameSpec`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GameSummary {
    pub nqubits: usize,
    pub mode: GameMode,
    pub hx: Vec<String>,
    pub hz: Vec<String>,
    pub x_inputs: Option<Vec<String>>,
    pub z_inputs: Option<Vec<String>>,
    pub x_bits: usize,
    pub z_bits: usize,
    pub target_anf: Vec<String>,
    pub target_table: Option<String>,
    pub constraints: Option<Vec<QueryConstraints>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QueryConstraints {
    pub query: u64,
    pub a: String,
    pub b: String,
    pub constraints: Vec<ConstraintSummary>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstraintSummary {
    pub support: Vec<usize>,
    pub parity: u8,
}

fn span_masks(m: &BitMatrix) -> Result<Vec<u64>> {
    Ok(m.row_span_iter(DEFAULT_SPAN_LOG2)?.map(|v| v.to_u64()).collect())
}

fn submeasurement_constraints(code: &CssCode, qm: &QueryMap) -> Result<Vec<Vec<SubmeasurementConstraint>>> {
    let sx = span_masks(code.hx())?;
    let sz = span_masks(code.hz())?;
    let mut all = Vec::with_capacity(qm.num_queries() as usize);
    for q in 0..qm.num_queries() {
        let (a, b) = qm.question(q);
        let xs: Vec<u64> = sx.iter().copied().filter(|&s| s & !a == 0).collect();
        let zs: Vec<u64> = sz.iter().copied().filter(|&s| s & !b == 0).collect();
        let mut found = Vec::new();
        for &xp in &xs {
            for &zp in &zs {
                let k = xp | zp;
                if k != 0 && a & k == xp && b & k == zp {
                    found.push(SubmeasurementConstraint { x_part: xp, z_part: zp, parity: half_overlap_parity(xp, zp) });
                }
            }
        }
        found.sort_by_key(|c| (c.support().count_ones(), c.support()));
        all.push(found);
    }
    Ok(all)
}

/// Coset representatives `V` of single-qubit Cliffords modulo Paulis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CliffordCore {
    I,
    H,
    S,
    HS,
    SH,
    HSH,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PauliLabel {
    I,
    X,
    Y,
    Z,
}

impl PauliLabel {
    /// `(x, z)` with the label equal to `i^{xz} X^x Z^z`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliLabel::I => (false, false),
            PauliLabel::X => (true, false),
            PauliLabel::Y => (true, true),
            PauliLabel::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> PauliLabel {
        match (x, z) {
            (false, false) => PauliLabel::I,
            (true, false) => PauliLabel::X,
            (true, true) => PauliLabel::Y,
            (false, true) => PauliLabel::Z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Generator {
    H,
    S,
}

impl CliffordCore {
    pub const ALL: [CliffordCore; 6] =
        [CliffordCore::I, CliffordCore::H, CliffordCore::S, CliffordCore::HS, CliffordCore::SH, CliffordCore::HSH];

    fn factors(self) -> &'static [Generator] {
        use Generator::{H, S};
        match self {
            CliffordCore::I => &[],
            CliffordCore::H => &[H],
            CliffordCore::S => &[S],
            CliffordCore::HS => &[H, S],
            CliffordCore::SH => &[S, H],
            CliffordCore::HSH => &[H, S, H],
        }
    }

    /// Conjugation `V P(s) V† = (-1)^sign P(s')`, returned as `(sign, s')`.
    pub fn conjugate(self, s: (bool, bool)) -> (bool, (bool, bool)) {
        let mut sign = false;
        let (mut s0, mut s1) = s;
        for g in self.factors().iter().rev() {
            sign ^= s0 & s1;
            (s0, s1) = match g {
                Generator::H => (s1, s0),
                Generator::S => (s0, s0 ^ s1),
            };
        }
        (sign, (s0, s1))
    }

    /// 2x2 unitary of the gate, row-major, as `(re, im)` pairs.
    pub fn unitary(self) -> [[(f64, f64); 2]; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hm = [[(h, 0.0), (h, 0.0)], [(h, 0.0), (-h, 0.0)]];
        let sm = [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (0.0, 1.0)]];
        let mut acc = [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (1.0, 0.0)]];
        for g in self.factors() {
            let m = if *g == Generator::H { hm } else { sm };
            let mut next = [[(0.0, 0.0); 2]; 2];
            for (r, row) in next.iter_mut().enumerate() {
                for (c, cell) in row.iter_mut().enumerate() {
                    for (k, m_row) in m.iter().enumerate() {
                        let (a, b) = (acc[r][k], m_row[c]);
                        cell.0 += a.0 * b.0 - a.1 * b.1;
                        cell.1 += a.0 * b.1 + a.1 * b.0;
                    }
                }
            }
            acc = next;
        }
        acc
    }
}

/// A single-qubit Clifford `V·P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalClifford {
    pub core: CliffordCore,
    pub pauli: PauliLabel,
}

impl LocalClifford {
    pub const IDENTITY: LocalClifford = LocalClifford { core: CliffordCore::I, pauli: PauliLabel::I };

    /// `[u, s] ⊕ λ_V(s)` for the question pair `s = (a, b)`.
    pub fn shift(self, a: bool, b: bool) -> bool {
        let (u0, u1) = self.pauli.bits();
        (u0 & b) ^ (a & u1) ^ self.core.conjugate((a, b)).0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DressedTarget {
    pub target: BooleanFunction,
    pub shift: BooleanFunction,
}

/// Target computed by single-site Pauli measurements on a codeword dressed
/// with one local Clifford per qubit: the original target XOR a shift that
/// each player can compute from their own questions.
pub fn clifford_dress(game: &GameSpec, gates: &[LocalClifford]) -> Result<DressedTarget> {
    let n = game.nplayers();
    if gates.len() != n {
        return Err(Error::Parameter(format!("{} gates for {n} qubits", gates.len())));
    }
    let qm = game.query_map();
    let shift = BooleanFunction::from_fn(qm.nvars(), |q| {
        let (a, b) = qm.question(q);
        gates
            .iter()
            .enumerate()
            .fold(false, |acc, (i, g)| acc ^ g.shift(a >> i & 1 == 1, b >> i & 1 == 1))
    });
    let target = game.target().xor(&shift)?;
    Ok(DressedTarget { target, shift })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToricLattice {
    Square(usize),
    Honeycomb(usize, usize),
}

/// Sites are plaquettes followed by vertices of the original lattice; each
/// original edge becomes a four-sided face `{p1, p2, v1, v2}`, and each
/// plaquette corner becomes an edge `(p, v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualMedialGraph {
    pub plaquettes: usize,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub faces: Vec<[usize; 4]>,
}

impl DualMedialGraph {
    pub fn from_code(code: &CssCode) -> Result<DualMedialGraph> {
        let xs = code.x_rows();
        let zs = code.z_rows();
        let (np, nv) = (xs.len(), zs.len());
        if np + nv > 64 {
            return Err(Error::Size(format!("{} sites (limit 64)", np + nv)));
        }
        let mut faces = Vec::new();
        for e in 0..code.nqubits() {
            let ps: Vec<usize> = (0..np).filter(|&p| xs[p] >> e & 1 == 1).collect();
            let vs: Vec<usize> = (0..nv).filter(|&v| zs[v] >> e & 1 == 1).collect();
            if ps.len() != 2 || vs.len() != 2 {
                return Err(Error::InvalidInput(format!("qubit {e} does not sit on a lattice edge")));
            }
            faces.push([ps[0], ps[1], np + vs[0], np + vs[1]]);
        }
        let mut edges = Vec::new();
        for (p, &xp) in xs.iter().enumerate() {
            for (v, &zv) in zs.iter().enumerate() {
                for _ in 0..(xp & zv).count_ones() / 2 {
                    edges.push((p, np + v));
                }
            }
        }
        Ok(DualMedialGraph { plaquettes: np, vertices: nv, edges, faces })
    }

    pub fn num_sites(&self) -> usize {
        self.plaquettes + self.vertices
    }

    /// Cubic terms from every triple of each face plus quadratic terms from
    /// every edge, as a function of the site bits `w`.
    pub fn evaluate(&self, w: u64) -> bool {
        let bit = |i: usize| w >> i & 1 == 1;
        let mut acc = false;
        for f in &self.faces {
            for skip in 0..4 {
                let t = (0..4).filter(|&k| k != skip).all(|k| bit(f[k]));
                acc ^= t;
            }
        }
        for &(i, j) in &self.edges {
            acc ^= bit(i) & bit(j);
        }
        acc
    }

    pub fn target(&self) -> Result<BooleanFunction> {
        let n = self.num_sites();
        if n > MAX_TARGET_VARS {
            return Err(Error::Size(format!("{n} sites (limit {MAX_TARGET_VARS})")));
        }
        Ok(BooleanFunction::from_fn(n, |w| self.evaluate(w)))
    }
}

pub fn dual_medial_graph(lattice: ToricLattice) -> Result<DualMedialGraph> {
    let code = match lattice {
        ToricLattice::Square(l) => NamedCode::ToricSquare { l, redundant: true },
        ToricLattice::Honeycomb(lx, ly) => NamedCode::ToricHoneycomb { lx, ly, redundant: true },
    }
    .build()?;
    DualMedialGraph::from_code(&code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        BitVector::parse(s).unwrap()
    }

    #[test]
    fn ghz3_generators() {
        let c = NamedCode::Ghz(3).build().unwrap();
        assert_eq!(c.hx(), &BitMatrix::from_strs(&["111"]).unwrap());
        assert_eq!(c.hz(), &BitMatrix::from_strs(&["110", "011"]).unwrap());
    }

    #[test]
    fn ghz3_target_anf() {
        let c = NamedCode::Ghz(3).build().unwrap();
        let anf = c.target_anf().unwrap();
        assert_eq!(anf.monomial_sets(), vec![vec![0, 1], vec![0, 2], vec![0, 1, 2]]);
        let g = GameSpec::xor(c, InputSets::unrestricted()).unwrap();
        assert_eq!(g.target().anf(), anf);
    }

    #[test]
    fn ghz3_fixed_x_is_or() {
        let c = NamedCode::Ghz(3).build().unwrap();
        let inputs = InputSets { x: InputSet::singleton(bv("111")), z: InputSet::AllOfImage };
        let g = GameSpec::xor(c, inputs).unwrap();
        assert_eq!(g.target().to_bit_string(), "0111");
    }

    #[test]
    fn two_qubit_code_gives_product() {
        let m = BitMatrix::from_strs(&["11"]).unwrap();
        let c = CssCode::new(m.clone(), m).unwrap();
        assert_eq!(c.target_anf().unwrap().monomial_sets(), vec![vec![0, 1]]);
        let g = GameSpec::xor(c, InputSets::unrestricted()).unwrap();
        assert_eq!(g.target().to_bit_string(), "0001");
    }

    #[test]
    fn code_validation() {
        let hx = BitMatrix::from_strs(&["10"]).unwrap();
        let hz = BitMatrix::from_strs(&["11"]).unwrap();
        assert!(matches!(CssCode::new(hx, hz), Err(Error::InvalidInput(_))));
        let hx = BitMatrix::from_strs(&["11"]).unwrap();
        assert!(CssCode::new(hx, BitMatrix::zeros(0, 2)).is_err());
        assert!(NamedCode::Cluster1D(5).build().is_err());
        assert!(NamedCode::ToricSquare { l: 3, redundant: false }.build().is_err());
    }

    #[test]
    fn input_outside_row_space_is_rejected() {
        let c = NamedCode::Ghz(3).build().unwrap();
        let inputs = InputSets { x: InputSet::singleton(bv("110")), z: InputSet::AllOfImage };
        assert!(matches!(GameSpec::xor(c, inputs), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn named_code_sizes() {
        let t = NamedCode::ToricSquare { l: 2, redundant: false }.build().unwrap();
        assert_eq!((t.nqubits(), t.hx().rows(), t.hz().rows()), (8, 3, 3));
        let c = NamedCode::Cluster1D(4).build().unwrap();
        assert_eq!((c.nqubits(), c.hx().rank() + c.hz().rank()), (4, 4));
        let h = NamedCode::ToricHoneycomb { lx: 2, ly: 3, redundant: true }.build().unwrap();
        assert_eq!((h.nqubits(), h.hx().rows(), h.hz().rows()), (18, 6, 12));
        assert!(h.is_redundant());
    }

    #[test]
    fn parse_named_codes() {
        assert_eq!("ghz:3".parse::<NamedCode>().unwrap(), NamedCode::Ghz(3));
        assert_eq!(
            "honeycomb:2x3".parse::<NamedCode>().unwrap(),
            NamedCode::ToricHoneycomb { lx: 2, ly: 3, redundant: false }
        );
        assert!("moebius:3".parse::<NamedCode>().is_err());
    }

    #[test]
    fn code_text_round_trip() {
        let c = NamedCode::Cluster1D(6).build().unwrap();
        assert_eq!(CssCode::parse_text(&c.to_text(), false).unwrap(), c);
    }

    #[test]
    fn ghz4_submeasurement_constraints() {
        let c = NamedCode::Ghz(4).build().unwrap();
        let g = GameSpec::submeasurement(c, InputSets::unrestricted()).unwrap();
        // x = 0, z = (1,0,1): b = 1111, so the query string is ZZZZ.
        let q = 0b1010;
        assert_eq!(g.query_map().question(q), (0, 0b1111));
        let supports: Vec<u64> = g.constraints(q).iter().map(|c| c.support()).collect();
        for s in [0b0011, 0b0110, 0b1100, 0b1111] {
            assert!(supports.contains(&s));
        }
        assert!(g.constraints(q).iter().all(|c| !c.parity));
        // x = 1, z = (1,0,0): a = 1111, b = 1100 in qubit order, i.e. XXYY.
        let q = 0b0011;
        let (a, b) = g.query_map().question(q);
        assert_eq!((a, b), (0b1111, 0b0011));
        let supports: Vec<u64> = g.constraints(q).iter().map(|c| c.support()).collect();
        assert_eq!(supports, vec![0b1111]);
        assert_eq!(g.constraints(q)[0].parity, g.target().get(q));
    }

    #[test]
    fn clifford_generators_match_matrices() {
        assert_eq!(CliffordCore::H.conjugate((true, true)), (true, (true, true)));
        assert_eq!(CliffordCore::S.conjugate((true, false)), (false, (true, true)));
        assert_eq!(CliffordCore::S.conjugate((true, true)), (true, (true, false)));
    }

    #[test]
    fn dressing_with_identity_or_pauli() {
        let g = GameSpec::xor(NamedCode::Ghz(3).build().unwrap(), InputSets::unrestricted()).unwrap();
        let id = clifford_dress(&g, &[LocalClifford::IDENTITY; 3]).unwrap();
        assert_eq!(id.shift.weight(), 0);
        let mut gates = [LocalClifford::IDENTITY; 3];
        gates[1].pauli = PauliLabel::X;
        let d = clifford_dress(&g, &gates).unwrap();
        let qm = g.query_map();
        for q in 0..qm.num_queries() {
            assert_eq!(d.shift.get(q), qm.question(q).1 >> 1 & 1 == 1);
        }
    }

    #[test]
    fn square_dual_medial_counts() {
        let m = dual_medial_graph(ToricLattice::Square(4)).unwrap();
        assert_eq!(m.num_sites(), 32);
        assert_eq!(m.edges.len(), 64);
        assert_eq!(m.faces.len(), 32);
    }
}

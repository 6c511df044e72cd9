//! Optimal classical success fractions.
//!
//! A deterministic player answers `y_i(a, b) = k0 ⊕ k1·a ⊕ k2·b ⊕ k3·ab`, so
//! the XOR of all answers ranges over a linear space of functions of the
//! query. When the questions are affine in the parameter bits that space is
//! `{u0 ⊕ ⟨y, p⟩ ⊕ Q_λ(p)}` with `Q_λ` bilinear, and the best member is
//! found with one Walsh transform per bilinear part. Other question lists fall
//! back to enumerating the span of the players' answer tables.

use serde::{Deserialize, Serialize};

use crate::boolfn::{fwht, fwht_with, BooleanFunction};
use crate::cssgame::{CssCode, GameSpec};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::exec::{block_count, block_range, Exec};
use crate::f2::{BitMatrix, BitVector};

/// Enumeration limits for [`omega_exact_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaBudget {
    /// Largest dimension of the space of bilinear parts (or answer tables).
    pub max_span_log2: u32,
    /// Largest number of parameter bits.
    pub max_vars: usize,
    /// Largest `span dimension + parameter bits`.
    pub max_cost_log2: u32,
}

impl Default for OmegaBudget {
    fn default() -> Self {
        OmegaBudget { max_span_log2: 22, max_vars: 24, max_cost_log2: 34 }
    }
}

impl OmegaBudget {
    fn check(&self, span: u32, d: usize) -> Result<()> {
        if span > self.max_span_log2 || d > self.max_vars || span + d as u32 > self.max_cost_log2 {
            return Err(Error::Size(format!(
                "strategy span 2^{span} over {d} parameter bits exceeds the budget \
                 (span <= 2^{}, bits <= {}, combined <= {}); use the bounds method or raise the limits",
                self.max_span_log2, self.max_vars, self.max_cost_log2
            )));
        }
        Ok(())
    }
}

/// One player's answer `constant ⊕ on_a·a ⊕ on_b·b ⊕ on_ab·ab`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerRule {
    pub constant: bool,
    pub on_a: bool,
    pub on_b: bool,
    pub on_ab: bool,
}

impl PlayerRule {
    pub fn answer(&self, a: bool, b: bool) -> bool {
        self.constant ^ (self.on_a & a) ^ (self.on_b & b) ^ (self.on_ab & a & b)
    }
}

/// The collective answer `u0 ⊕ ux·x ⊕ uz·z ⊕ x·uxz·zᵀ` in parameter bits,
/// together with the per-qubit products `λ` that realize `uxz`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassicalStrategy {
    pub u0: bool,
    pub ux: BitVector,
    pub uz: BitVector,
    pub uxz: BitMatrix,
    pub lambda: BitVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaMethod {
    /// Walsh transform per bilinear part.
    Exact,
    /// Nonlinearity of the target with the X side fixed.
    FixedX,
    /// Enumeration of the span of answer tables.
    TableSpan,
    /// Enumeration of every tuple of per-player answer functions.
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaReport {
    pub omega: Dyadic,
    /// Queries won by the reported strategy.
    pub wins: u64,
    pub nvars: usize,
    pub method: OmegaMethod,
    pub players: Vec<PlayerRule>,
    pub best: Option<ClassicalStrategy>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaBounds {
    pub lower: Dyadic,
    pub upper: Dyadic,
}

/// Basis of `span{H_X · E_ii · H_Zᵀ}`, each element an `m_x × m_z` matrix.
pub fn bilinear_span_basis(code: &CssCode) -> Vec<BitMatrix> {
    let (xs, zs) = (code.hx().transpose(), code.hz().transpose());
    let (mx, mz) = (code.hx().rows(), code.hz().rows());
    let mut rows = Vec::new();
    for i in 0..code.nqubits() {
        let (col_x, col_z) = (xs.row(i), zs.row(i));
        let mut v = BitVector::zeros(mx * mz);
        for u in col_x.iter_ones() {
            for w in col_z.iter_ones() {
                v.set(u * mz + w, true);
            }
        }
        rows.push(v);
    }
    let Ok(stacked) = BitMatrix::from_rows(mx * mz, &rows) else { unreachable!() };
    stacked
        .row_basis()
        .into_iter()
        .map(|v| {
            let mut m = BitMatrix::zeros(mx, mz);
            for k in v.iter_ones() {
                m.set(k / mz, k % mz, true);
            }
            m
        })
        .collect()
}

pub fn omega_exact(game: &GameSpec) -> Result<OmegaReport> {
    omega_exact_with(game, &OmegaBudget::default(), Exec::default())
}

pub fn omega_exact_with(game: &GameSpec, budget: &OmegaBudget, exec: Exec) -> Result<OmegaReport> {
    match AffineGame::from_game(game) {
        Some(ag) => ag.optimize(game, budget, exec),
        None => omega_table_span(game, budget, exec),
    }
}

/// Questions of an affine game: `a_i = a0_i ⊕ ⟨alpha_i, p⟩`, likewise `b_i`.
struct AffineGame {
    x_bits: usize,
    z_bits: usize,
    alpha: Vec<u64>,
    beta: Vec<u64>,
    a0: Vec<bool>,
    b0: Vec<bool>,
}

/// A bilinear form stored as one z-mask per x bit.
#[derive(Clone)]
struct Bilinear {
    rows: Vec<u64>,
    lambda: u64,
}

impl Bilinear {
    fn xor_assign(&mut self, other: &Bilinear) {
        for (r, o) in self.rows.iter_mut().zip(&other.rows) {
            *r ^= o;
        }
        self.lambda ^= other.lambda;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Best {
    abs: u64,
    k: u64,
    y: u64,
    negative: bool,
}

impl Best {
    const NONE: Best = Best { abs: 0, k: u64::MAX, y: u64::MAX, negative: false };

    fn pick(a: Best, b: Best) -> Best {
        let key = |v: &Best| (std::cmp::Reverse(v.abs), v.k, v.y);
        if key(&b) < key(&a) {
            b
        } else {
            a
        }
    }
}

struct Span {
    all: bool,
    bits: Vec<u64>,
}

impl Span {
    fn new(generators: impl IntoIterator<Item = u64>, d: usize) -> Span {
        let basis = crate::f2::mask_basis(generators);
        if basis.len() == d {
            return Span { all: true, bits: Vec::new() };
        }
        let mut bits = vec![0u64; (1usize << d).div_ceil(64)];
        let mut cur = 0u64;
        for step in 0..1u64 << basis.len() {
            if step > 0 {
                cur ^= basis[step.trailing_zeros() as usize];
            }
            bits[(cur >> 6) as usize] |= 1 << (cur & 63);
        }
        Span { all: false, bits }
    }

    fn contains(&self, y: u64) -> bool {
        self.all || self.bits[(y >> 6) as usize] >> (y & 63) & 1 == 1
    }
}

impl AffineGame {
    fn from_game(game: &GameSpec) -> Option<AffineGame> {
        let qm = game.query_map();
        let (xa, za) = (qm.x_affine()?, qm.z_affine()?);
        let n = game.nplayers();
        let collect = |rows: &[u64], shift: usize| -> Vec<u64> {
            (0..n)
                .map(|i| rows.iter().enumerate().filter(|(_, r)| *r >> i & 1 == 1).fold(0, |m, (j, _)| m | 1 << (j + shift)))
                .collect()
        };
        Some(AffineGame {
            x_bits: qm.x_bits,
            z_bits: qm.z_bits,
            alpha: collect(&xa.rows, 0),
            beta: collect(&za.rows, qm.x_bits),
            a0: (0..n).map(|i| xa.offset >> i & 1 == 1).collect(),
            b0: (0..n).map(|i| za.offset >> i & 1 == 1).collect(),
        })
    }

    fn d(&self) -> usize {
        self.x_bits + self.z_bits
    }

    /// Reduced basis of the bilinear parts `⟨alpha_i,p⟩⟨beta_i,p⟩`, each
    /// tagged with the set of players whose products sum to it.
    fn bilinear_basis(&self) -> Vec<Bilinear> {
        let (xb, zb) = (self.x_bits, self.z_bits);
        let mut basis: Vec<(usize, BitVector, Bilinear)> = Vec::new();
        for i in 0..self.alpha.len() {
            let zmask = self.beta[i] >> xb;
            let rows: Vec<u64> = (0..xb).map(|u| if self.alpha[i] >> u & 1 == 1 { zmask } else { 0 }).collect();
            let mut vec = BitVector::zeros(xb * zb);
            for (u, r) in rows.iter().enumerate() {
                for w in 0..zb {
                    if r >> w & 1 == 1 {
                        vec.set(u * zb + w, true);
                    }
                }
            }
            let mut form = Bilinear { rows, lambda: 1 << i };
            for (pivot, bv, bf) in &basis {
                if vec.get(*pivot) {
                    vec.xor_assign(bv);
                    form.xor_assign(bf);
                }
            }
            let pivot = vec.iter_ones().next();
            if let Some(pivot) = pivot {
                basis.push((pivot, vec, form));
            }
        }
        basis.into_iter().map(|(_, _, f)| f).collect()
    }

    /// Fills `buf` with `(-1)^{f(p) ⊕ Q(p)}`.
    fn fill_signs(&self, f: &BooleanFunction, form: &[u64], buf: &mut [i32]) {
        let xb = self.x_bits;
        let xsize = 1usize << xb;
        let mut r = 0u64;
        for step in 0..xsize {
            if step > 0 {
                r ^= form[step.trailing_zeros() as usize];
            }
            let px = step ^ (step >> 1);
            for pz in 0..1usize << self.z_bits {
                let p = px | pz << xb;
                let bit = f.get(p as u64) as u32 ^ ((r & pz as u64).count_ones() & 1);
                buf[p] = 1 - 2 * bit as i32;
            }
        }
    }

    fn scan(buf: &[i32], span: &Span, k: u64) -> Best {
        let mut best = Best::NONE;
        for (y, &w) in buf.iter().enumerate() {
            let abs = w.unsigned_abs() as u64;
            if (abs > best.abs || best.k == u64::MAX) && span.contains(y as u64) {
                best = Best { abs, k, y: y as u64, negative: w < 0 };
            }
        }
        best
    }

    fn form_for(basis: &[Bilinear], k: u64, xb: usize) -> Bilinear {
        let mut form = Bilinear { rows: vec![0; xb], lambda: 0 };
        for (j, b) in basis.iter().enumerate() {
            if k >> j & 1 == 1 {
                form.xor_assign(b);
            }
        }
        form
    }

    fn optimize(&self, game: &GameSpec, budget: &OmegaBudget, exec: Exec) -> Result<OmegaReport> {
        let d = self.d();
        let basis = self.bilinear_basis();
        let r = basis.len() as u32;
        budget.check(r, d)?;
        let f = game.target();
        let span = Span::new(self.alpha.iter().chain(&self.beta).copied(), d);
        let total = 1u64 << r;
        let size = 1usize << d;

        let best = if r >= 4 {
            let block = (total / 64).clamp(1, 1024);
            exec.map_reduce(
                block_count(total, block),
                Best::NONE,
                |bi| {
                    let mut buf = vec![0i32; size];
                    let mut best = Best::NONE;
                    for k in block_range(total, block, bi) {
                        let form = AffineGame::form_for(&basis, k, self.x_bits);
                        self.fill_signs(f, &form.rows, &mut buf);
                        fwht(&mut buf);
                        best = Best::pick(best, AffineGame::scan(&buf, &span, k));
                    }
                    best
                },
                Best::pick,
            )
        } else {
            let mut buf = vec![0i32; size];
            let mut best = Best::NONE;
            for k in 0..total {
                let form = AffineGame::form_for(&basis, k, self.x_bits);
                self.fill_signs(f, &form.rows, &mut buf);
                fwht_with(&mut buf, exec);
                best = Best::pick(best, AffineGame::scan(&buf, &span, k));
            }
            best
        };
        let form = AffineGame::form_for(&basis, best.k, self.x_bits);
        self.report(game, &form, best, OmegaMethod::Exact, exec)
    }

    /// Turns a maximizing `(λ, y, u0)` into per-player rules and checks them
    /// by playing every query.
    fn report(&self, game: &GameSpec, form: &Bilinear, best: Best, method: OmegaMethod, exec: Exec) -> Result<OmegaReport> {
        let n = self.alpha.len();
        let d = self.d();
        let lambda = form.lambda;
        let mut spill = 0u64;
        let mut constant = false;
        for i in 0..n {
            if lambda >> i & 1 == 1 {
                if self.b0[i] {
                    spill ^= self.alpha[i];
                }
                if self.a0[i] {
                    spill ^= self.beta[i];
                }
                constant ^= self.a0[i] & self.b0[i];
            }
        }
        let mut cols = BitMatrix::zeros(d, 2 * n);
        for i in 0..n {
            for j in 0..d {
                cols.set(j, i, self.alpha[i] >> j & 1 == 1);
                cols.set(j, n + i, self.beta[i] >> j & 1 == 1);
            }
        }
        let rhs = BitVector::from_u64(d, best.y ^ spill);
        let Some((st, _)) = cols.solve_affine(&rhs)? else {
            return Err(Error::Consistency("optimal linear part is not reachable by the players".into()));
        };
        let mut players: Vec<PlayerRule> = (0..n)
            .map(|i| PlayerRule { constant: false, on_a: st.get(i), on_b: st.get(n + i), on_ab: lambda >> i & 1 == 1 })
            .collect();
        for (i, p) in players.iter().enumerate() {
            constant ^= (p.on_a & self.a0[i]) ^ (p.on_b & self.b0[i]);
        }
        if n > 0 {
            players[0].constant = constant ^ best.negative;
        }
        let wins = (size_of(d) + best.abs) / 2;
        let simulated = play(game, &players, exec);
        if simulated != wins {
            return Err(Error::Consistency(format!("reconstructed strategy wins {simulated} queries, expected {wins}")));
        }
        let (xb, zb) = (self.x_bits, self.z_bits);
        let mut uxz = BitMatrix::zeros(xb, zb);
        for (u, row) in form.rows.iter().enumerate() {
            for w in 0..zb {
                uxz.set(u, w, row >> w & 1 == 1);
            }
        }
        let best_strategy = ClassicalStrategy {
            u0: best.negative,
            ux: BitVector::from_u64(xb, best.y & ((1u64 << xb) - 1)),
            uz: BitVector::from_u64(zb, best.y >> xb),
            uxz,
            lambda: BitVector::from_u64(n, lambda),
        };
        Ok(OmegaReport {
            omega: Dyadic::new(wins as i128, d as u32),
            wins,
            nvars: d,
            method,
            players,
            best: Some(best_strategy),
        })
    }
}

fn size_of(d: usize) -> u64 {
    1u64 << d
}

/// Number of queries on which the players' XOR matches the target.
pub fn play(game: &GameSpec, players: &[PlayerRule], exec: Exec) -> u64 {
    let qm = game.query_map();
    let f = game.target();
    let total = qm.num_queries();
    let block = 4096u64.min(total);
    exec.map_reduce(
        block_count(total, block),
        0u64,
        |bi| {
            block_range(total, block, bi)
                .filter(|&q| {
                    let (a, b) = qm.question(q);
                    let ans = players
                        .iter()
                        .enumerate()
                        .fold(false, |acc, (i, p)| acc ^ p.answer(a >> i & 1 == 1, b >> i & 1 == 1));
                    ans == f.get(q)
                })
                .count() as u64
        },
        |x, y| x + y,
    )
}

/// Optimizes over the span of the players' answer tables `{1, a_i, b_i, a_i b_i}`.
/// Works for any question lists.
pub fn omega_table_span(game: &GameSpec, budget: &OmegaBudget, exec: Exec) -> Result<OmegaReport> {
    let qm = game.query_map();
    let d = qm.nvars();
    let n = game.nplayers();
    if d > budget.max_vars {
        return Err(Error::Size(format!("{d} parameter bits (limit {})", budget.max_vars)));
    }
    let gens = 1 + 3 * n;
    let mut tables: Vec<BooleanFunction> = vec![BooleanFunction::from_fn(d, |_| true)];
    for i in 0..n {
        tables.push(BooleanFunction::from_fn(d, |q| qm.question(q).0 >> i & 1 == 1));
        tables.push(BooleanFunction::from_fn(d, |q| qm.question(q).1 >> i & 1 == 1));
        tables.push(BooleanFunction::from_fn(d, |q| {
            let (a, b) = qm.question(q);
            a & b >> i & 1 == 1
        }));
    }
    let mut basis: Vec<(u64, Vec<u64>, BitVector)> = Vec::new();
    for (g, t) in tables.iter().enumerate() {
        let mut words = t.words().to_vec();
        let mut origin = BitVector::zeros(gens);
        origin.set(g, true);
        for (pivot, bw, bo) in &basis {
            if words[(pivot >> 6) as usize] >> (pivot & 63) & 1 == 1 {
                for (w, b) in words.iter_mut().zip(bw) {
                    *w ^= b;
                }
                origin.xor_assign(bo);
            }
        }
        if let Some(wi) = words.iter().position(|&w| w != 0) {
            let pivot = (wi as u64) << 6 | words[wi].trailing_zeros() as u64;
            basis.push((pivot, words, origin));
        }
    }
    let r = basis.len() as u32;
    budget.check(r, d)?;
    let target = game.target().words().to_vec();
    let total = 1u64 << r;
    let block = (total / 256).clamp(1, 1 << 14);
    let agree = |words: &[u64]| -> u64 {
        let diff: u64 = words.iter().zip(&target).map(|(a, b)| (a ^ b).count_ones() as u64).sum();
        size_of(d) - diff
    };
    let (wins, k) = exec.map_reduce(
        block_count(total, block),
        (0u64, u64::MAX),
        |bi| {
            let range = block_range(total, block, bi);
            let mut cur = vec![0u64; target.len()];
            let mut best = (0u64, u64::MAX);
            for (s, step) in range.enumerate() {
                let code = step ^ (step >> 1);
                if s == 0 {
                    for (j, (_, bw, _)) in basis.iter().enumerate() {
                        if code >> j & 1 == 1 {
                            for (c, b) in cur.iter_mut().zip(bw) {
                                *c ^= b;
                            }
                        }
                    }
                } else {
                    let j = step.trailing_zeros() as usize;
                    for (c, b) in cur.iter_mut().zip(&basis[j].1) {
                        *c ^= b;
                    }
                }
                let a = agree(&cur);
                if a > best.0 || (a == best.0 && code < best.1) {
                    best = (a, code);
                }
            }
            best
        },
        |x, y| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x },
    );
    let mut origin = BitVector::zeros(gens);
    for (j, (_, _, o)) in basis.iter().enumerate() {
        if k >> j & 1 == 1 {
            origin.xor_assign(o);
        }
    }
    let mut players = vec![PlayerRule::default(); n];
    for (i, p) in players.iter_mut().enumerate() {
        p.on_a = origin.get(1 + 3 * i);
        p.on_b = origin.get(2 + 3 * i);
        p.on_ab = origin.get(3 + 3 * i);
    }
    if let Some(p) = players.first_mut() {
        p.constant = origin.get(0);
    }
    let simulated = play(game, &players, exec);
    if simulated != wins {
        return Err(Error::Consistency(format!("table-span strategy wins {simulated} queries, expected {wins}")));
    }
    Ok(OmegaReport {
        omega: Dyadic::new(wins as i128, d as u32),
        wins,
        nvars: d,
        method: OmegaMethod::TableSpan,
        players,
        best: None,
    })
}

/// `ω = 1 − 2^{-m} N_f` for games whose X question is fixed and whose Z
/// questions range over the full image of a full-rank `H_Z`.
pub fn omega_fixed_x(game: &GameSpec) -> Result<OmegaReport> {
    let qm = game.query_map();
    if qm.x_bits != 0 {
        return Err(Error::Mode(format!("X side has {} parameter bits; a single fixed X input is required", qm.x_bits)));
    }
    let hz = game.code().hz();
    if game.inputs().z != crate::cssgame::InputSet::AllOfImage || hz.rank() != hz.rows() {
        return Err(Error::Mode("Z side must range over the image of a full-rank H_Z".into()));
    }
    let Some(ag) = AffineGame::from_game(game) else {
        return Err(Error::Mode("questions are not affine".into()));
    };
    let f = game.target();
    let nl = f.nonlinearity()?;
    let m = f.nvars();
    let spectrum = f.walsh_transform()?;
    let y = spectrum.argmax_abs();
    let best = Best { abs: spectrum.max_abs(), k: 0, y, negative: spectrum.get(y) < 0 };
    let form = Bilinear { rows: Vec::new(), lambda: 0 };
    let report = ag.report(game, &form, best, OmegaMethod::FixedX, Exec::default())?;
    if report.wins != size_of(m) - nl {
        return Err(Error::Consistency("nonlinearity disagrees with the best linear strategy".into()));
    }
    Ok(report)
}

/// Maximum over every tuple of per-player answer functions, by direct play.
/// Limited to four players and eight parameter bits.
pub fn omega_bruteforce_oracle(game: &GameSpec) -> Result<Dyadic> {
    let qm = game.query_map();
    let (n, d) = (game.nplayers(), qm.nvars());
    if n > 4 || d > 8 {
        return Err(Error::Size(format!("oracle handles at most 4 players and 8 bits, got {n} and {d}")));
    }
    let queries = 1usize << d;
    let words = queries.div_ceil(64);
    // answers[i][func] = bitset over queries of player i's answer.
    let mut answers = vec![vec![vec![0u64; words]; 16]; n];
    for (i, per_player) in answers.iter_mut().enumerate() {
        for (func, set) in per_player.iter_mut().enumerate() {
            for q in 0..queries {
                let (a, b) = qm.question(q as u64);
                let idx = (a >> i & 1) | (b >> i & 1) << 1;
                if func >> idx & 1 == 1 {
                    set[q >> 6] |= 1 << (q & 63);
                }
            }
        }
    }
    let target: Vec<u64> = (0..words)
        .map(|w| (0..64.min(queries - 64 * w)).fold(0u64, |m, j| m | (game.target().get((64 * w + j) as u64) as u64) << j))
        .collect();
    let mut best = 0u64;
    let mut acc = vec![0u64; words];
    for tuple in 0..16usize.pow(n as u32) {
        acc.copy_from_slice(&target);
        let mut t = tuple;
        for per_player in &answers {
            for (a, s) in acc.iter_mut().zip(&per_player[t % 16]) {
                *a ^= s;
            }
            t /= 16;
        }
        let errors: u64 = acc.iter().map(|w| w.count_ones() as u64).sum();
        best = best.max(queries as u64 - errors);
    }
    Ok(Dyadic::new(best as i128, d as u32))
}

/// Lower bound from the strategies without bilinear part and with the
/// bilinear part that cancels the target's; upper bound from the best
/// affine fit for each fixed X parameter.
pub fn omega_bounds(game: &GameSpec) -> Result<OmegaBounds> {
    omega_bounds_with(game, Exec::default())
}

pub fn omega_bounds_with(game: &GameSpec, exec: Exec) -> Result<OmegaBounds> {
    let Some(ag) = AffineGame::from_game(game) else {
        return Err(Error::Mode("bounds need affine question maps".into()));
    };
    let d = ag.d();
    if d > crate::boolfn::MAX_WALSH_VARS {
        return Err(Error::Size(format!("{d} parameter bits")));
    }
    let f = game.target();
    let span = Span::new(ag.alpha.iter().chain(&ag.beta).copied(), d);
    let mut buf = vec![0i32; 1 << d];
    let xb = ag.x_bits;
    let mut lower = {
        ag.fill_signs(f, &vec![0; xb], &mut buf);
        fwht_with(&mut buf, exec);
        AffineGame::scan(&buf, &span, 0).abs
    };
    if let Some(cancel) = cancelling_form(&ag, f) {
        ag.fill_signs(f, &cancel, &mut buf);
        fwht_with(&mut buf, exec);
        lower = lower.max(AffineGame::scan(&buf, &span, 0).abs);
    }
    let zsize = 1usize << ag.z_bits;
    let upper_sum = exec.map_reduce(
        1usize << xb,
        0u64,
        |px| {
            let mut row: Vec<i32> = (0..zsize).map(|pz| if f.get((px | pz << xb) as u64) { -1 } else { 1 }).collect();
            fwht(&mut row);
            row.iter().map(|w| w.unsigned_abs() as u64).max().unwrap_or(0)
        },
        |a, b| a + b,
    );
    let full = size_of(d) as i128;
    Ok(OmegaBounds {
        lower: Dyadic::new(full + lower as i128, d as u32 + 1),
        upper: Dyadic::new(full + upper_sum as i128, d as u32 + 1),
    })
}

/// Bilinear form `Q_λ` equal to the x-z part of the target's ANF, if some `λ` gives it.
fn cancelling_form(ag: &AffineGame, f: &BooleanFunction) -> Option<Vec<u64>> {
    let (xb, zb) = (ag.x_bits, ag.z_bits);
    let mut wanted = vec![0u64; xb];
    for m in f.anf().monomials() {
        let (xm, zm) = (m & ((1u64 << xb) - 1), m >> xb);
        if xm.count_ones() == 1 && zm.count_ones() == 1 {
            wanted[xm.trailing_zeros() as usize] ^= zm;
        }
    }
    let basis = ag.bilinear_basis();
    let mut system = BitMatrix::zeros(xb * zb, basis.len());
    for (j, b) in basis.iter().enumerate() {
        for (u, row) in b.rows.iter().enumerate() {
            for w in 0..zb {
                system.set(u * zb + w, j, row >> w & 1 == 1);
            }
        }
    }
    let mut rhs = BitVector::zeros(xb * zb);
    for (u, row) in wanted.iter().enumerate() {
        for w in 0..zb {
            rhs.set(u * zb + w, row >> w & 1 == 1);
        }
    }
    let (sol, _) = system.solve_affine(&rhs).ok()??;
    let k = sol.iter_ones().fold(0u64, |m, j| m | 1 << j);
    Some(AffineGame::form_for(&basis, k, xb).rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cssgame::{InputSet, InputSets, NamedCode};

    fn game(code: NamedCode) -> GameSpec {
        GameSpec::xor(code.build().unwrap(), InputSets::unrestricted()).unwrap()
    }

    fn fixed_x(code: NamedCode) -> GameSpec {
        let c = code.build().unwrap();
        let x = BitVector::ones(c.nqubits());
        GameSpec::xor(c, InputSets { x: InputSet::singleton(x), z: InputSet::AllOfImage }).unwrap()
    }

    #[test]
    fn ghz3_fixed_x_is_three_quarters() {
        let g = fixed_x(NamedCode::Ghz(3));
        assert_eq!(omega_exact(&g).unwrap().omega, Dyadic::new(3, 2));
        assert_eq!(omega_fixed_x(&g).unwrap().omega, Dyadic::new(3, 2));
        assert_eq!(omega_bruteforce_oracle(&g).unwrap(), Dyadic::new(3, 2));
    }

    #[test]
    fn ghz5_fixed_x() {
        assert_eq!(omega_fixed_x(&fixed_x(NamedCode::Ghz(5))).unwrap().omega, Dyadic::new(5, 3));
    }

    #[test]
    fn fixed_x_requires_singleton() {
        assert!(matches!(omega_fixed_x(&game(NamedCode::Ghz(3))), Err(Error::Mode(_))));
    }

    #[test]
    fn span_basis_dimensions() {
        assert_eq!(bilinear_span_basis(&NamedCode::Ghz(3).build().unwrap()).len(), 2);
        let m = BitMatrix::from_strs(&["11"]).unwrap();
        assert_eq!(bilinear_span_basis(&CssCode::new(m.clone(), m).unwrap()).len(), 1);
    }

    #[test]
    fn two_qubit_code_is_won_by_one_player() {
        // Both players see (x, z), so either can answer xz alone.
        let m = BitMatrix::from_strs(&["11"]).unwrap();
        let g = GameSpec::xor(CssCode::new(m.clone(), m).unwrap(), InputSets::unrestricted()).unwrap();
        assert_eq!(omega_bruteforce_oracle(&g).unwrap(), Dyadic::from_int(1));
        assert_eq!(omega_exact(&g).unwrap().omega, Dyadic::from_int(1));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let g = game(NamedCode::Cluster1D(6));
        let b = OmegaBudget::default();
        let s = omega_exact_with(&g, &b, Exec::Sequential).unwrap();
        let p = omega_exact_with(&g, &b, Exec::Parallel).unwrap();
        assert_eq!(s, p);
    }

    #[test]
    fn budget_is_enforced() {
        let g = game(NamedCode::Cluster1D(6));
        let tiny = OmegaBudget { max_span_log2: 1, ..OmegaBudget::default() };
        assert!(matches!(omega_exact_with(&g, &tiny, Exec::Sequential), Err(Error::Size(_))));
    }
}

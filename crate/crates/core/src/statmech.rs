//! Transfer matrices and partition functions behind the cluster-state and
//! toric-code bounds.
//!
//! Every transfer-matrix trace here has a brute-force twin that sums the
//! same signed configurations directly; tests and the CLI compare the two.

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::boolfn::{AnfPolynomial, BooleanFunction};
use crate::error::{Error, Result};
use crate::exec::{block_count, block_range, Exec};
use crate::f2::BitMatrix;
use crate::quantum::StateVector;

/// Largest chain handled by the exact transfer products.
pub const MAX_TRANSFER_LENGTH: usize = 60;
/// Largest ring enumerated term by term.
pub const MAX_BRUTE_LENGTH: usize = 24;
/// Largest qubit count for the Z-removal statevector check.
pub const MAX_Z_REMOVAL_QUBITS: usize = 12;
/// Largest number of honeycomb cells (Ising spins) enumerated.
pub const MAX_LOOP_CELLS: usize = 24;
/// Largest lattice side for the plaquette Ising count.
pub const MAX_PLAQUETTE_SIDE: usize = 8;

const ENUM_BLOCK: u64 = 1 << 12;

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferMatrix {
    dim: usize,
    entries: Vec<i128>,
}

impl TransferMatrix {
    pub fn new(dim: usize, entries: Vec<i128>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Ok(TransferMatrix { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        TransferMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> i128 {
        self.entries[r * self.dim + c]
    }

    pub fn entries(&self) -> &[i128] {
        &self.entries
    }

    pub fn mul(&self, other: &TransferMatrix) -> TransferMatrix {
        assert_eq!(self.dim, other.dim, "transfer matrix dimensions differ");
        let d = self.dim;
        let mut entries = vec![0i128; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == 0 {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += a * other.entries[k * d + c];
                }
            }
        }
        TransferMatrix { dim: d, entries }
    }

    /// Binary powering; exact as long as entries fit in i128.
    pub fn pow(&self, mut exp: usize) -> TransferMatrix {
        let mut base = self.clone();
        let mut acc = TransferMatrix::identity(self.dim);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn trace(&self) -> i128 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Coefficients of det(yI − T), highest degree first, by
    /// Faddeev–LeVerrier. All divisions are exact for integer matrices.
    pub fn characteristic_polynomial(&self) -> Vec<i128> {
        let d = self.dim;
        let mut coeffs = vec![0i128; d + 1];
        coeffs[0] = 1;
        let mut m = TransferMatrix { dim: d, entries: vec![0; d * d] };
        for k in 1..=d {
            for i in 0..d {
                m.entries[i * d + i] += coeffs[k - 1];
            }
            let am = self.mul(&m);
            coeffs[k] = -am.trace() / k as i128;
            m = am;
        }
        coeffs
    }
}

/// `√2·H` with integer entries.
fn scaled_hadamard() -> TransferMatrix {
    TransferMatrix { dim: 2, entries: vec![1, 1, 1, -1] }
}

/// Walsh coefficient of the open-chain GHZ function
/// `⊕ z_i z_{i+1} ⊕ ⊕ z_i` at `y`, as the (0,0) entry of
/// `(√2H) Z^{1+y_1} (√2H) ⋯ Z^{1+y_n} (√2H)`.
pub fn ghz_walsh_via_transfer(n: usize, y: u64) -> Result<i128> {
    if n == 0 || n > MAX_TRANSFER_LENGTH {
        return Err(Error::Size(format!("chain length {n} outside 1..={MAX_TRANSFER_LENGTH}")));
    }
    let h = scaled_hadamard();
    let mut acc = h.clone();
    for i in 0..n {
        // Z^{1+y_i}: identity when y_i = 1, Z when y_i = 0.
        let flip = (y >> i) & 1 == 0;
        let diag = TransferMatrix {
            dim: 2,
            entries: vec![1, 0, 0, if flip { -1 } else { 1 }],
        };
        acc = acc.mul(&diag).mul(&h);
    }
    Ok(acc.get(0, 0))
}

/// The open-chain GHZ function on `n` variables as a truth table.
pub fn ghz_chain_function(n: usize) -> Result<BooleanFunction> {
    let mut p = AnfPolynomial::new(n);
    for i in 0..n {
        p.toggle(1 << i);
        if i + 1 < n {
            p.toggle((1 << i) | (1 << (i + 1)));
        }
    }
    let f = BooleanFunction::from_anf(&p);
    Ok(f)
}

/// Values a GHZ Walsh coefficient may take for chain length `n`.
pub fn ghz_walsh_allowed(n: usize, value: i128) -> bool {
    let big_n = n + 1;
    let mag = 1i128 << (big_n / 2);
    if big_n % 2 == 0 {
        value == 0 || value.abs() == mag
    } else {
        value.abs() == mag
    }
}

/// Transfer matrix of `Σ_w (−1)^{⊕ w_i w_{i+1} w_{i+2}}` on a ring.
/// Index `2a + b` carries the bit pair `(w_i, w_{i+1}) = (a, b)`; the
/// entry from `(a, b)` to `(b, c)` is the CCZ sign of `(a, b, c)`.
pub fn ccz_transfer_matrix() -> TransferMatrix {
    let mut entries = vec![0i128; 16];
    for a in 0..2usize {
        for b in 0..2usize {
            for c in 0..2usize {
                let from = 2 * a + b;
                let to = 2 * b + c;
                entries[from * 4 + to] = if a & b & c == 1 { -1 } else { 1 };
            }
        }
    }
    TransferMatrix { dim: 4, entries }
}

/// `W_C(0,0)` for a ring of `n` bits, as `Tr(Tⁿ)`.
pub fn cluster_w00(n: usize) -> Result<i128> {
    if n == 0 || n > MAX_TRANSFER_LENGTH {
        return Err(Error::Size(format!("ring length {n} outside 1..={MAX_TRANSFER_LENGTH}")));
    }
    Ok(ccz_transfer_matrix().pow(n).trace())
}

/// Direct enumeration of the same sum.
pub fn cluster_w00_brute(n: usize, exec: Exec) -> Result<i128> {
    if n == 0 || n > MAX_BRUTE_LENGTH {
        return Err(Error::Size(format!("ring length {n} outside 1..={MAX_BRUTE_LENGTH}")));
    }
    let total = 1u64 << n;
    let blocks = block_count(total, ENUM_BLOCK);
    Ok(exec.map_reduce(
        blocks,
        0i128,
        |b| {
            block_range(total, ENUM_BLOCK, b)
                .map(|w| if ring_triples_parity(w, n) { -1 } else { 1 })
                .sum::<i128>()
        },
        |a, b| a + b,
    ))
}

fn ring_triples_parity(w: u64, n: usize) -> bool {
    let bit = |i: usize| (w >> (i % n)) & 1;
    (0..n).fold(0, |acc, i| acc ^ (bit(i) & bit(i + 1) & bit(i + 2))) == 1
}

/// Real root of largest magnitude of `y³ − 2y − 2`, by Newton's method.
pub fn cubic_dominant_root() -> f64 {
    let mut y = 2.0f64;
    for _ in 0..60 {
        let step = (y * y * y - 2.0 * y - 2.0) / (3.0 * y * y - 2.0);
        y -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    y
}

/// Cardano form `Σ_{σ=±1} (1/3)[3(9 + σ√57)]^{1/3}`.
pub fn cubic_root_closed_form() -> f64 {
    let r = 57f64.sqrt();
    ((3.0 * (9.0 + r)).cbrt() + (3.0 * (9.0 - r)).cbrt()) / 3.0
}

/// Growth rate of `W_C(0,0)` estimated from two ring lengths.
pub fn cluster_growth_estimate(n_small: usize, n_large: usize) -> Result<f64> {
    if n_large <= n_small {
        return Err(Error::Parameter("need n_large > n_small".into()));
    }
    let a = cluster_w00(n_small)? as f64;
    let b = cluster_w00(n_large)? as f64;
    Ok((b / a).powf(1.0 / (n_large - n_small) as f64))
}

/// Transfer matrix of rings with no two adjacent ones.
pub fn golden_transfer_matrix() -> TransferMatrix {
    TransferMatrix { dim: 2, entries: vec![1, 1, 1, 0] }
}

pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// `√(2φ)`, the growth rate of the triangle-inequality bound on
/// `max |W_C|` after all Z's are removed.
pub fn cluster_upper_rate() -> f64 {
    (2.0 * golden_ratio()).sqrt()
}

/// `Σ_x Σ_z (−1)^{Σ_k x_k z_k z_{k+1}}` over a ring of `n` sites, i.e.
/// `2ⁿ Σ_x ⟨+|∏ CZ_{k,k+1}^{x_k}|+⟩`. Equals `2ⁿ·Tr(Tⁿ)` for the
/// golden transfer matrix.
pub fn cz_ring_sum_brute(n: usize) -> Result<i128> {
    if n == 0 || 2 * n > MAX_BRUTE_LENGTH {
        return Err(Error::Size(format!("ring length {n} outside 1..={}", MAX_BRUTE_LENGTH / 2)));
    }
    let mut total = 0i128;
    for x in 0..1u64 << n {
        for z in 0..1u64 << n {
            let mut parity = 0;
            for k in 0..n {
                let next = (k + 1) % n;
                parity ^= (x >> k) & (z >> k) & (z >> next) & 1;
            }
            total += if parity == 1 { -1 } else { 1 };
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZRemovalReport {
    pub qubits: usize,
    pub boundary: Boundary,
    /// `⟨+|C⟩`.
    pub bare: f64,
    /// Largest `⟨+|Z^y|C⟩` over all `y`.
    pub max_dressed: f64,
    pub argmax: u64,
    pub holds: bool,
}

/// Exhaustively checks `⟨+|Z^y|C⟩ ≤ ⟨+|C⟩` for the 1D cluster state.
pub fn z_removal_check(qubits: usize, boundary: Boundary) -> Result<ZRemovalReport> {
    match boundary {
        Boundary::Open if qubits < 2 => {
            return Err(Error::Parameter("open chain needs at least 2 qubits".into()))
        }
        Boundary::Periodic if qubits < 4 || qubits % 2 == 1 => {
            return Err(Error::Parameter("periodic chain needs an even length of at least 4".into()))
        }
        _ => {}
    }
    if qubits > MAX_Z_REMOVAL_QUBITS {
        return Err(Error::Size(format!("{qubits} qubits exceeds {MAX_Z_REMOVAL_QUBITS}")));
    }
    let plus = StateVector::plus(qubits)?;
    let mut cluster = plus.clone();
    for i in 0..qubits - 1 {
        cluster.cz(i, i + 1);
    }
    if boundary == Boundary::Periodic {
        cluster.cz(qubits - 1, 0);
    }
    let bare = plus.inner(&cluster)?.re;
    let mut max_dressed = f64::NEG_INFINITY;
    let mut argmax = 0;
    for y in 0..1u64 << qubits {
        let mut dressed = cluster.clone();
        dressed.apply_pauli(0, y);
        let v = plus.inner(&dressed)?.re;
        if v > max_dressed + 1e-15 {
            max_dressed = v;
            argmax = y;
        }
    }
    Ok(ZRemovalReport {
        qubits,
        boundary,
        bare,
        max_dressed,
        argmax,
        holds: max_dressed <= bare + 1e-12,
    })
}

/// Domain walls of one plaquette configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopConfigStats {
    pub edge_count: usize,
    pub loop_count: usize,
}

/// Honeycomb lattice on a torus of `cols × rows` hexagonal cells.
///
/// Cells sit on a triangular lattice; each triangle of three mutually
/// adjacent cells is a honeycomb vertex (`2·cell` for the up triangle,
/// `2·cell + 1` for the down one) and each pair of adjacent cells is an
/// edge.
#[derive(Clone, Debug)]
pub struct Honeycomb {
    cols: usize,
    rows: usize,
    /// `(cell_a, cell_b, vertex_u, vertex_v)` per edge.
    edges: Vec<(usize, usize, usize, usize)>,
}

impl Honeycomb {
    pub fn new(cols: usize, rows: usize) -> Result<Self> {
        if cols < 2 || rows < 2 {
            return Err(Error::Parameter("honeycomb torus needs at least 2x2 cells".into()));
        }
        let cell = |i: usize, j: usize| (j % rows) * cols + (i % cols);
        let up = |i: usize, j: usize| 2 * cell(i, j);
        let down = |i: usize, j: usize| 2 * cell(i, j) + 1;
        let mut edges = Vec::with_capacity(3 * cols * rows);
        for j in 0..rows {
            for i in 0..cols {
                let (ip, jp) = (i + 1, j + 1);
                let (im, jm) = (i + cols - 1, j + rows - 1);
                edges.push((cell(i, j), cell(ip, j), up(i, j), down(i, jm)));
                edges.push((cell(i, j), cell(i, jp), up(i, j), down(im, j)));
                edges.push((cell(ip, j), cell(i, jp), up(i, j), down(i, j)));
            }
        }
        Ok(Honeycomb { cols, rows, edges })
    }

    pub fn cells(&self) -> usize {
        self.cols * self.rows
    }

    pub fn nvertices(&self) -> usize {
        2 * self.cells()
    }

    pub fn nedges(&self) -> usize {
        self.edges.len()
    }

    /// Wall edges of the spin configuration `spins` (bit per cell).
    pub fn wall_edges(&self, spins: u64) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(a, b, _, _))| ((spins >> a) ^ (spins >> b)) & 1 == 1)
            .map(|(e, _)| e)
            .collect()
    }

    /// Wall degree of every vertex.
    pub fn wall_degrees(&self, spins: u64) -> Vec<usize> {
        let mut deg = vec![0; self.nvertices()];
        for e in self.wall_edges(spins) {
            let (_, _, u, v) = self.edges[e];
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn domain_walls(&self, spins: u64) -> LoopConfigStats {
        let walls = self.wall_edges(spins);
        let mut uf = UnionFind::<usize>::new(self.nvertices());
        let mut touched = vec![false; self.nvertices()];
        for &e in &walls {
            let (_, _, u, v) = self.edges[e];
            uf.union(u, v);
            touched[u] = true;
            touched[v] = true;
        }
        let loop_count = (0..self.nvertices())
            .filter(|&v| touched[v] && uf.find(v) == v)
            .count();
        LoopConfigStats { edge_count: walls.len(), loop_count }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoopPartition {
    pub cols: usize,
    pub rows: usize,
    pub nvertices: usize,
    pub nedges: usize,
    pub t: f64,
    pub n: f64,
    /// Sum over all plaquette spin configurations.
    pub ising_sum: f64,
    /// Sum over distinct domain-wall configurations (half the Ising sum).
    pub domain_wall_sum: f64,
    /// `domain_wall_sum^{1/N_v}`.
    pub vertex_rate: f64,
    /// `(2^{1+N_v/2}·domain_wall_sum)^{1/N_edges}`: the bound on
    /// `max|W|^{1/N}` with one player per edge.
    pub player_rate: f64,
}

/// `Σ t^{N_v − ℓ} n^{#loops}` over every Ising configuration on the cells.
pub fn loop_partition(cols: usize, rows: usize, t: f64, n: f64, exec: Exec) -> Result<LoopPartition> {
    let lattice = Honeycomb::new(cols, rows)?;
    let cells = lattice.cells();
    if cells > MAX_LOOP_CELLS {
        return Err(Error::Size(format!("{cells} cells exceeds {MAX_LOOP_CELLS}")));
    }
    let nv = lattice.nvertices();
    let total = 1u64 << cells;
    let partials = exec.map_collect(block_count(total, ENUM_BLOCK), |b| {
        block_range(total, ENUM_BLOCK, b)
            .map(|spins| {
                let s = lattice.domain_walls(spins);
                t.powi((nv - s.edge_count) as i32) * n.powi(s.loop_count as i32)
            })
            .sum::<f64>()
    });
    let ising_sum: f64 = partials.iter().sum();
    let domain_wall_sum = ising_sum / 2.0;
    let nedges = lattice.nedges();
    let log_bound = (1.0 + nv as f64 / 2.0) * std::f64::consts::LN_2 + domain_wall_sum.ln();
    Ok(LoopPartition {
        cols,
        rows,
        nvertices: nv,
        nedges,
        t,
        n,
        ising_sum,
        domain_wall_sum,
        vertex_rate: domain_wall_sum.powf(1.0 / nv as f64),
        player_rate: (log_bound / nedges as f64).exp(),
    })
}

/// Limiting per-vertex rate `(27/4)^{1/4}` of the loop model at `(√2, 2)`.
pub fn loop_limit_rate() -> f64 {
    6.75f64.powf(0.25)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DigammaReport {
    /// Quadrature of `I(0)`.
    pub integral_at_zero: f64,
    /// `ln(27/4)`.
    pub log_27_over_4: f64,
    /// Digamma combination at `a = 0`.
    pub digamma_at_zero: f64,
    pub integral_at_one: f64,
    pub digamma_at_one: f64,
    pub pass: bool,
}

/// `x/(a²+x²) · tanh(2πx)/(2cosh(2πx) − 1)`, continuous at `x = 0`.
pub fn digamma_integrand(a: f64, x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let tail = if x.abs() > 20.0 {
        // tanh → ±1 and the cosh term overflows long before f64 loses it.
        x.signum() * 2.0 * (-two_pi * x.abs()).exp() / (1.0 - (-two_pi * x.abs()).exp())
    } else {
        (two_pi * x).tanh() / (2.0 * (two_pi * x).cosh() - 1.0)
    };
    if a == 0.0 {
        if x.abs() < 1e-8 {
            return two_pi;
        }
        tail / x
    } else {
        x / (a * a + x * x) * tail
    }
}

/// `ψ(a+¼) + ψ(a+¾) − ψ(a+⅙) − ψ(a+⅚)`.
pub fn digamma_combination(a: f64) -> f64 {
    use statrs::function::gamma::digamma;
    digamma(a + 0.25) + digamma(a + 0.75) - digamma(a + 1.0 / 6.0) - digamma(a + 5.0 / 6.0)
}

/// `I(a)` by adaptive Simpson on `[−50, 50]`; the integrand decays like
/// `e^{−2π|x|}`, so the truncated tails are below 1e−130.
pub fn digamma_integral(a: f64) -> Result<f64> {
    adaptive_simpson(|x| digamma_integrand(a, x), -50.0, 50.0, 1e-13, 60)
}

pub fn digamma_identity_check() -> Result<DigammaReport> {
    let integral_at_zero = digamma_integral(0.0)?;
    let log_27_over_4 = 6.75f64.ln();
    let digamma_at_zero = digamma_combination(0.0);
    let integral_at_one = digamma_integral(1.0)?;
    let digamma_at_one = digamma_combination(1.0);
    let pass = (integral_at_zero - log_27_over_4).abs() < 1e-8
        && (digamma_at_zero - log_27_over_4).abs() < 1e-8
        && (integral_at_one - digamma_at_one).abs() < 1e-8;
    Ok(DigammaReport {
        integral_at_zero,
        log_27_over_4,
        digamma_at_zero,
        integral_at_one,
        digamma_at_one,
        pass,
    })
}

pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // Require a few levels of refinement so a symmetric integrand cannot
    // fool the first comparison.
    if depth < 55 && delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numeric(format!("quadrature did not converge on [{a}, {b}]")));
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlaquetteReport {
    pub side: usize,
    pub sublattice_sites: usize,
    pub nullity: usize,
    pub ground_states: u128,
    /// `L²/2 + L`, the log₂ magnitude implied by the count.
    pub walsh_log2: usize,
    /// FWHT of the nearest-neighbour function: `(W(0), max |W|)` when
    /// `L ≤ 4`.
    pub fwht_check: Option<(i64, u64)>,
}

/// Constraint matrix of the zero-temperature plaquette Ising model on the
/// even sublattice of an `L × L` torus: one row per odd site, requiring the
/// parity of its four neighbours to vanish. Repeated neighbours cancel.
pub fn plaquette_constraints(side: usize) -> Result<BitMatrix> {
    check_plaquette_side(side)?;
    let even: Vec<(usize, usize)> = sites(side).filter(|&(i, j)| (i + j) % 2 == 0).collect();
    let odd: Vec<(usize, usize)> = sites(side).filter(|&(i, j)| (i + j) % 2 == 1).collect();
    let index = |(i, j): (usize, usize)| even.iter().position(|&s| s == (i, j)).expect("even site");
    let mut m = BitMatrix::zeros(odd.len(), even.len());
    for (r, &(i, j)) in odd.iter().enumerate() {
        let l = side;
        for nb in [((i + 1) % l, j), ((i + l - 1) % l, j), (i, (j + 1) % l), (i, (j + l - 1) % l)] {
            m.flip(r, index(nb));
        }
    }
    Ok(m)
}

fn sites(side: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..side).flat_map(move |j| (0..side).map(move |i| (i, j)))
}

fn check_plaquette_side(side: usize) -> Result<()> {
    if side < 2 || side % 2 == 1 || side > MAX_PLAQUETTE_SIDE {
        return Err(Error::Size(format!(
            "plaquette lattice side {side} must be even and in 2..={MAX_PLAQUETTE_SIDE}"
        )));
    }
    Ok(())
}

/// Nearest-neighbour function `⊕ z_v z_{v'}` on the `L × L` torus; edges
/// that coincide on small tori cancel.
pub fn torus_neighbour_function(side: usize) -> Result<BooleanFunction> {
    let nvars = side * side;
    if nvars > 20 {
        return Err(Error::Size(format!("{nvars} variables is too many for a truth table")));
    }
    let mut p = AnfPolynomial::new(nvars);
    for (i, j) in sites(side) {
        let v = j * side + i;
        let right = j * side + (i + 1) % side;
        let up = ((j + 1) % side) * side + i;
        p.toggle((1 << v) | (1 << right));
        p.toggle((1 << v) | (1 << up));
    }
    Ok(BooleanFunction::from_anf(&p))
}

pub fn plaquette_ising_count(side: usize) -> Result<PlaquetteReport> {
    let m = plaquette_constraints(side)?;
    let nullity = m.kernel_basis().len();
    let fwht_check = if side <= 4 {
        let spectrum = torus_neighbour_function(side)?.walsh_transform()?;
        Some((spectrum.get(0), spectrum.max_abs()))
    } else {
        None
    };
    Ok(PlaquetteReport {
        side,
        sublattice_sites: m.cols(),
        nullity,
        ground_states: 1u128 << nullity,
        walsh_log2: side * side / 2 + nullity,
        fwht_check,
    })
}

/// Ground states by exhaustive enumeration of the even sublattice.
pub fn plaquette_ising_brute(side: usize) -> Result<u64> {
    let m = plaquette_constraints(side)?;
    if m.cols() > 20 {
        return Err(Error::Size("sublattice too large to enumerate".into()));
    }
    let masks = m.row_masks();
    Ok((0..1u64 << m.cols())
        .filter(|b| masks.iter().all(|r| (r & b).count_ones() % 2 == 0))
        .count() as u64)
}

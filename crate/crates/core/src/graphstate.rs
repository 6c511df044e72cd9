//! Graphs and hypergraphs as carriers of Boolean functions.
//!
//! A graph on `n ≤ 64` vertices encodes the quadratic form
//! `f_G(z) = ⊕_{i<j} A_ij z_i z_j`, and its graph state has amplitudes
//! `(-1)^{f_G(z)}`. The X symmetries of that state fix the Walsh support of
//! `f_G`; the standard-form reduction turns the graph into disjoint edges.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::boolfn::{AnfPolynomial, BooleanFunction, WalshSpectrum, MAX_WALSH_VARS};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::f2::{BitMatrix, BitVector};
use crate::quantum::{StateVector, MAX_QUBITS};

pub const MAX_VERTICES: usize = 64;

/// Largest arity accepted by [`hypergraph_overlap`].
pub const MAX_OVERLAP_VARS: usize = 16;

fn check_vertices(n: usize) -> Result<()> {
    if n > MAX_VERTICES {
        return Err(Error::Size(format!("{n} vertices (limit {MAX_VERTICES})")));
    }
    Ok(())
}

/// Simple undirected graph stored as neighbourhood masks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    neighbors: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Result<Graph> {
        check_vertices(n)?;
        Ok(Graph { neighbors: vec![0; n] })
    }

    /// Checks that the matrix is square, symmetric and zero on the diagonal.
    pub fn from_adjacency(m: &BitMatrix) -> Result<Graph> {
        if m.rows() != m.cols() {
            return Err(Error::Shape(format!("adjacency matrix is {}x{}", m.rows(), m.cols())));
        }
        check_vertices(m.rows())?;
        if !m.is_symmetric() {
            return Err(Error::Shape("adjacency matrix is not symmetric".into()));
        }
        if let Some(i) = (0..m.rows()).find(|&i| m.get(i, i)) {
            return Err(Error::Shape(format!("adjacency matrix has a 1 on the diagonal at {i}")));
        }
        Ok(Graph { neighbors: m.row_masks() })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut g = Graph::empty(n)?;
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidInput(format!("edge ({a}, {b}) on {n} vertices")));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).expect("path graph within vertex cap")
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::path(n);
        if n > 2 {
            g.add_edge(0, n - 1);
        }
        g
    }

    pub fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Graph::from_edges(n, &edges).expect("complete graph within vertex cap")
    }

    /// `L×L` square grid with periodic boundaries; vertex `(i, j)` is `j·L + i`.
    pub fn torus_grid(l: usize) -> Result<Graph> {
        if l < 3 {
            return Err(Error::Parameter(format!("torus grid needs L >= 3, got {l}")));
        }
        let mut g = Graph::empty(l * l)?;
        for j in 0..l {
            for i in 0..l {
                let v = j * l + i;
                g.add_edge(v, j * l + (i + 1) % l);
                g.add_edge(v, ((j + 1) % l) * l + i);
            }
        }
        Ok(g)
    }

    pub fn nvertices(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, i: usize) -> u64 {
        self.neighbors[i]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a] >> b & 1 == 1
    }

    fn add_edge(&mut self, a: usize, b: usize) {
        self.neighbors[a] |= 1 << b;
        self.neighbors[b] |= 1 << a;
    }

    pub fn toggle_edge(&mut self, a: usize, b: usize) {
        assert_ne!(a, b, "self-loops are not allowed");
        self.neighbors[a] ^= 1 << b;
        self.neighbors[b] ^= 1 << a;
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, &nb) in self.neighbors.iter().enumerate() {
            let mut rest = nb >> a >> 1;
            while rest != 0 {
                let b = a + 1 + rest.trailing_zeros() as usize;
                out.push((a, b));
                rest &= rest - 1;
            }
        }
        out
    }

    pub fn adjacency(&self) -> BitMatrix {
        BitMatrix::from_row_masks(self.nvertices(), &self.neighbors)
    }

    /// True when every vertex has at most one neighbour.
    pub fn is_matching(&self) -> bool {
        self.neighbors.iter().all(|n| n.count_ones() <= 1)
    }

    /// The effect of `CX(control → target)` on the graph, ignoring the
    /// local `Z` it leaves on the control: toggles `(control, k)` for every
    /// `k ∈ N(target) \ {control}`.
    pub fn apply_cx(&mut self, control: usize, target: usize) {
        let mut rest = self.neighbors[target] & !(1u64 << control);
        while rest != 0 {
            let k = rest.trailing_zeros() as usize;
            self.toggle_edge(control, k);
            rest &= rest - 1;
        }
    }

    pub fn anf(&self) -> Result<AnfPolynomial> {
        if self.nvertices() > 63 {
            return Err(Error::Size(format!("{} vertices exceed the ANF limit of 63", self.nvertices())));
        }
        let mut p = AnfPolynomial::new(self.nvertices());
        for (a, b) in self.edges() {
            p.toggle(1 << a | 1 << b);
        }
        Ok(p)
    }

    /// Truth table of `f_G`.
    pub fn function(&self) -> Result<BooleanFunction> {
        let n = self.nvertices();
        if n > MAX_WALSH_VARS {
            return Err(Error::Size(format!("{n} variables (limit {MAX_WALSH_VARS})")));
        }
        let nb = &self.neighbors;
        Ok(BooleanFunction::from_fn(n, |z| {
            (0..n).filter(|&i| z >> i & 1 == 1).fold(0u32, |acc, i| acc + (nb[i] & z & !((2u64 << i) - 1)).count_ones())
                % 2
                == 1
        }))
    }

    pub fn to_text(&self) -> String {
        self.adjacency().to_text()
    }

    pub fn parse_text(text: &str) -> Result<Graph> {
        Graph::from_adjacency(&BitMatrix::parse_text(text)?)
    }
}

/// Graph of the polar bilinear form of a quadratic function: edge `{i, j}`
/// for every monomial `x_i x_j`. Linear and constant terms are dropped.
pub fn polar_form(f: &BooleanFunction) -> Result<Graph> {
    let anf = f.anf();
    let deg = anf.degree();
    if deg > 2 {
        return Err(Error::Degree { found: deg, allowed: 2 });
    }
    polar_form_anf(&anf)
}

pub fn polar_form_anf(p: &AnfPolynomial) -> Result<Graph> {
    let deg = p.degree();
    if deg > 2 {
        return Err(Error::Degree { found: deg, allowed: 2 });
    }
    let mut g = Graph::empty(p.nvars())?;
    for m in p.monomials().filter(|m| m.count_ones() == 2) {
        let a = m.trailing_zeros() as usize;
        let b = 63 - m.leading_zeros() as usize;
        g.toggle_edge(a, b);
    }
    Ok(g)
}

/// X symmetries of a graph state: `X^a` with `A·a = 0`, each acting with
/// sign `(-1)^{τ_a}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XSymmetries {
    pub n_x: usize,
    pub basis: Vec<BitVector>,
    pub signs: Vec<bool>,
}

/// Sign of `∏_{i∈a} S_i` with `S_i = X_i Z^{N(i)}`, multiplied in ascending
/// order. Moving `Z^z` past `X_i` costs `(-1)^{z_i}`.
fn stabilizer_product_sign(g: &Graph, a: &BitVector) -> (bool, u64) {
    let (mut sign, mut z) = (false, 0u64);
    for i in a.iter_ones() {
        sign ^= z >> i & 1 == 1;
        z ^= g.neighbors(i);
    }
    (sign, z)
}

pub fn x_symmetry_count(g: &Graph) -> XSymmetries {
    let basis = g.adjacency().kernel_basis();
    let signs = basis
        .iter()
        .map(|a| {
            let (sign, z) = stabilizer_product_sign(g, a);
            debug_assert_eq!(z, 0, "kernel vector {a} leaves a Z part");
            sign
        })
        .collect();
    XSymmetries { n_x: basis.len(), basis, signs }
}

/// `Σ_z (-1)^{q(z)}` for `q(z) = ⊕_{i<j} A_ij z_i z_j ⊕ ⟨linear, z⟩ ⊕ constant`,
/// by pairwise elimination. Returns `None` for zero, otherwise
/// `(negative, log2 |sum|)`.
pub fn quadratic_sign_sum(neighbors: &[u64], linear: u64, constant: bool) -> Option<(bool, u32)> {
    let mut adj = neighbors.to_vec();
    let mut lin = linear;
    let mut cst = constant;
    let mut active: u64 = if adj.len() == 64 { u64::MAX } else { (1u64 << adj.len()) - 1 };
    let mut log2 = 0u32;
    loop {
        let Some(i) = (0..adj.len()).find(|&i| active >> i & 1 == 1 && adj[i] & active != 0) else {
            if lin & active != 0 {
                return None;
            }
            return Some((cst, log2 + active.count_ones()));
        };
        let j = (adj[i] & active).trailing_zeros() as usize;
        let am = adj[i] & active & !(1u64 << j);
        let bm = adj[j] & active & !(1u64 << i);
        let (a0, b0) = (lin >> i & 1 == 1, lin >> j & 1 == 1);
        let pair = 1u64 << i | 1u64 << j;
        active &= !pair;
        for v in adj.iter_mut() {
            *v &= !pair;
        }
        adj[i] = 0;
        adj[j] = 0;
        lin &= !pair;
        // Add αβ with α = ⟨am, z⟩ ⊕ a0 and β = ⟨bm, z⟩ ⊕ b0.
        let mut ks = am;
        while ks != 0 {
            let k = ks.trailing_zeros() as usize;
            let mut ms = bm;
            while ms != 0 {
                let m = ms.trailing_zeros() as usize;
                if k == m {
                    lin ^= 1 << k;
                } else {
                    adj[k] ^= 1 << m;
                    adj[m] ^= 1 << k;
                }
                ms &= ms - 1;
            }
            ks &= ks - 1;
        }
        if a0 {
            lin ^= bm;
        }
        if b0 {
            lin ^= am;
        }
        cst ^= a0 & b0;
        log2 += 1;
    }
}

/// Walsh spectrum of `f_G` derived from the X symmetries: support
/// `offset + span{N(i) : i ∈ directions}`, constant magnitude, signs fixed by
/// `W(y ⊕ N(i)) = (-1)^{y_i} W(y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryWalsh {
    pub nvars: usize,
    pub n_x: usize,
    /// `|W| = 2^{magnitude_log2}` on the support.
    pub magnitude_log2: u32,
    pub offset: BitVector,
    /// Vertices whose neighbourhoods form a basis of the support directions.
    pub directions: Vec<usize>,
    /// Sign of `W(offset)`.
    pub offset_negative: bool,
    #[serde(skip)]
    neighbors: Vec<u64>,
}

impl SymmetryWalsh {
    pub fn support_count(&self) -> u128 {
        1u128 << (self.nvars - self.n_x)
    }

    pub fn magnitude(&self) -> u128 {
        1u128 << self.magnitude_log2
    }

    /// `W(y)`, or 0 off the support.
    pub fn value(&self, y: u64) -> i128 {
        let r = self.directions.len();
        let mut m = BitMatrix::zeros(self.nvars, r);
        for (k, &i) in self.directions.iter().enumerate() {
            for b in 0..self.nvars {
                m.set(b, k, self.neighbors[i] >> b & 1 == 1);
            }
        }
        let delta = BitVector::from_u64(self.nvars, y ^ self.offset.to_u64());
        let Some((coords, _)) = m.solve_affine(&delta).expect("shapes agree") else {
            return 0;
        };
        let mut cur = self.offset.to_u64();
        let mut negative = self.offset_negative;
        for k in coords.iter_ones() {
            let i = self.directions[k];
            negative ^= cur >> i & 1 == 1;
            cur ^= self.neighbors[i];
        }
        let mag = self.magnitude() as i128;
        if negative {
            -mag
        } else {
            mag
        }
    }

    /// Full spectrum, by a Gray-code walk over the support.
    pub fn spectrum(&self) -> Result<WalshSpectrum> {
        if self.nvars > MAX_WALSH_VARS {
            return Err(Error::Size(format!("{} variables (limit {MAX_WALSH_VARS})", self.nvars)));
        }
        let mag = 1i64 << self.magnitude_log2;
        let mut coeffs = vec![0i64; 1 << self.nvars];
        let mut y = self.offset.to_u64();
        let mut negative = self.offset_negative;
        coeffs[y as usize] = if negative { -mag } else { mag };
        for t in 1u64..1 << self.directions.len() {
            let i = self.directions[t.trailing_zeros() as usize];
            negative ^= y >> i & 1 == 1;
            y ^= self.neighbors[i];
            coeffs[y as usize] = if negative { -mag } else { mag };
        }
        Ok(WalshSpectrum { nvars: self.nvars, coeffs })
    }
}

pub fn walsh_from_symmetries(g: &Graph) -> Result<SymmetryWalsh> {
    let n = g.nvertices();
    let sym = x_symmetry_count(g);
    let constraints = if sym.basis.is_empty() {
        BitMatrix::zeros(0, n)
    } else {
        BitMatrix::from_rows(n, &sym.basis)?
    };
    let tau = BitVector::from_bools(&sym.signs);
    let Some((offset, _)) = constraints.solve_affine(&tau)? else {
        return Err(Error::Consistency("symmetry sign constraints are inconsistent".into()));
    };
    let rank = n - sym.n_x;
    if rank % 2 == 1 {
        return Err(Error::Consistency(format!("adjacency rank {rank} is odd")));
    }
    let directions = g.adjacency().echelon().pivots;
    if directions.len() != rank {
        return Err(Error::Consistency("kernel and pivot counts disagree".into()));
    }
    let magnitude_log2 = ((n + sym.n_x) / 2) as u32;
    let Some((offset_negative, log2)) = quadratic_sign_sum(&g.neighbors, offset.to_u64(), false) else {
        return Err(Error::Consistency(format!("W vanishes at the support point {offset}")));
    };
    if log2 != magnitude_log2 {
        return Err(Error::Consistency(format!(
            "|W| = 2^{log2} at the support point, symmetries predict 2^{magnitude_log2}"
        )));
    }
    Ok(SymmetryWalsh {
        nvars: n,
        n_x: sym.n_x,
        magnitude_log2,
        offset,
        directions,
        offset_negative,
        neighbors: g.neighbors.clone(),
    })
}

/// Elementary congruence steps of the standard-form reduction. `Swap`
/// exchanges two rows (and the matching columns); `Add` adds row `src` to
/// row `dst` (and column `src` to column `dst`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ElementaryOp {
    Swap(usize, usize),
    Add { src: usize, dst: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StandardFormResult {
    pub reduced: BitMatrix,
    pub transform: BitMatrix,
    pub rank2k: usize,
    pub ops: Vec<ElementaryOp>,
}

/// True when `b` is `k` antidiagonal 2x2 blocks on the leading diagonal
/// followed by zeros, with `2k = rank2k`.
pub fn is_standard_form(b: &BitMatrix, rank2k: usize) -> bool {
    let n = b.rows();
    if b.cols() != n || rank2k % 2 == 1 || rank2k > n {
        return false;
    }
    (0..n).all(|r| {
        (0..n).all(|c| {
            let want = r < rank2k && c < rank2k && r / 2 == c / 2 && r != c;
            b.get(r, c) == want
        })
    })
}

fn apply_op(b: &mut BitMatrix, a: &mut BitMatrix, op: ElementaryOp) {
    match op {
        ElementaryOp::Swap(x, y) => {
            b.swap_rows(x, y);
            b.swap_cols(x, y);
            a.swap_rows(x, y);
        }
        ElementaryOp::Add { src, dst } => {
            b.add_row(src, dst);
            b.add_col(src, dst);
            a.add_row(src, dst);
        }
    }
}

/// Reduces a symmetric zero-diagonal matrix to standard form by congruence,
/// `reduced = transform · b · transformᵀ`.
pub fn standard_form(b: &BitMatrix) -> Result<StandardFormResult> {
    let n = b.rows();
    if b.cols() != n {
        return Err(Error::Shape(format!("matrix is {}x{}", b.rows(), b.cols())));
    }
    if !b.is_symmetric() {
        return Err(Error::Shape("matrix is not symmetric".into()));
    }
    if (0..n).any(|i| b.get(i, i)) {
        return Err(Error::Shape("matrix has a nonzero diagonal".into()));
    }
    let mut reduced = b.clone();
    let mut transform = BitMatrix::identity(n);
    let mut ops = Vec::new();
    let mut step = |op, r: &mut BitMatrix, t: &mut BitMatrix| {
        apply_op(r, t, op);
        ops.push(op);
    };
    if n >= 2 {
        let (mut j, mut e) = (0usize, n - 1);
        while j < e {
            let Some(k) = (0..n).find(|&i| reduced.get(i, j)) else {
                // Empty column: park it at the end.
                step(ElementaryOp::Swap(j, e), &mut reduced, &mut transform);
                e -= 1;
                continue;
            };
            let p = j + 1;
            if k != p {
                step(ElementaryOp::Swap(k, p), &mut reduced, &mut transform);
            }
            for r in p + 1..=e {
                if reduced.get(r, j) {
                    step(ElementaryOp::Add { src: p, dst: r }, &mut reduced, &mut transform);
                }
            }
            for c in j + 1..=e {
                if reduced.get(p, c) {
                    step(ElementaryOp::Add { src: j, dst: c }, &mut reduced, &mut transform);
                }
            }
            j += 2;
        }
    }
    let rank2k = (0..n).filter(|&r| !reduced.row(r).is_zero()).count();
    if rank2k % 2 == 1 || !is_standard_form(&reduced, rank2k) {
        return Err(Error::Consistency("reduction did not reach standard form".into()));
    }
    Ok(StandardFormResult { reduced, transform, rank2k, ops })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum CircuitGate {
    Cx { control: usize, target: usize },
    Z { site: usize },
}

/// CX/Z circuit taking a graph state to Bell pairs (as single-edge graph
/// states) on `pairs` and `|+⟩` on `isolated`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BellCircuit {
    pub gates: Vec<CircuitGate>,
    pub pairs: Vec<(usize, usize)>,
    pub isolated: Vec<usize>,
}

impl BellCircuit {
    /// Applies the gates to a statevector.
    pub fn apply(&self, state: &mut StateVector) {
        for g in &self.gates {
            match *g {
                CircuitGate::Cx { control, target } => state.cx(control, target),
                CircuitGate::Z { site } => state.z(site),
            }
        }
    }

    /// The graph the circuit should leave behind.
    pub fn final_graph(&self, n: usize) -> Result<Graph> {
        Graph::from_edges(n, &self.pairs)
    }
}

/// Row `dst += src` on the form is `CX(control dst → target src)` on the
/// state; the linear term it creates is removed by `Z` on the control when
/// the two vertices were adjacent. Row swaps only relabel qubits.
pub fn bell_extraction_circuit(g: &Graph) -> Result<BellCircuit> {
    let n = g.nvertices();
    let sf = standard_form(&g.adjacency())?;
    let mut form = g.adjacency();
    let mut scratch = BitMatrix::identity(n);
    let mut qubit: Vec<usize> = (0..n).collect();
    let mut gates = Vec::new();
    let mut replay = g.clone();
    for &op in &sf.ops {
        match op {
            ElementaryOp::Swap(a, b) => qubit.swap(a, b),
            ElementaryOp::Add { src, dst } => {
                let (control, target) = (qubit[dst], qubit[src]);
                gates.push(CircuitGate::Cx { control, target });
                if form.get(dst, src) {
                    gates.push(CircuitGate::Z { site: control });
                }
                replay.apply_cx(control, target);
            }
        }
        apply_op(&mut form, &mut scratch, op);
    }
    let pairs: Vec<(usize, usize)> = (0..sf.rank2k / 2)
        .map(|k| {
            let (a, b) = (qubit[2 * k], qubit[2 * k + 1]);
            (a.min(b), a.max(b))
        })
        .collect();
    let mut isolated: Vec<usize> = qubit[sf.rank2k..].to_vec();
    isolated.sort_unstable();
    let circuit = BellCircuit { gates, pairs, isolated };
    if replay != circuit.final_graph(n)? {
        return Err(Error::Consistency("graph replay does not end in the predicted pairs".into()));
    }
    Ok(circuit)
}

/// Hypergraph with edges stored as vertex masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    nvertices: usize,
    edges: BTreeSet<u64>,
}

impl Hypergraph {
    pub fn new(nvertices: usize, edges: impl IntoIterator<Item = u64>) -> Result<Hypergraph> {
        check_vertices(nvertices)?;
        let mut set = BTreeSet::new();
        for e in edges {
            if e == 0 {
                return Err(Error::InvalidInput("empty hyperedge".into()));
            }
            if nvertices < 64 && e >> nvertices != 0 {
                return Err(Error::InvalidInput(format!("hyperedge {e:#b} outside {nvertices} vertices")));
            }
            if !set.insert(e) {
                return Err(Error::InvalidInput(format!("duplicate hyperedge {e:#b}")));
            }
        }
        Ok(Hypergraph { nvertices, edges: set })
    }

    /// Hyperedges from the nonconstant monomials; the constant term is
    /// returned separately as a global sign.
    pub fn from_anf(p: &AnfPolynomial) -> (Hypergraph, bool) {
        let edges: BTreeSet<u64> = p.monomials().filter(|&m| m != 0).collect();
        (Hypergraph { nvertices: p.nvars(), edges }, p.contains(0))
    }

    pub fn nvertices(&self) -> usize {
        self.nvertices
    }

    pub fn edges(&self) -> &BTreeSet<u64> {
        &self.edges
    }

    pub fn order(&self) -> usize {
        self.edges.iter().map(|e| e.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn anf(&self) -> Result<AnfPolynomial> {
        if self.nvertices > 63 {
            return Err(Error::Size(format!("{} vertices exceed the ANF limit of 63", self.nvertices)));
        }
        let mut p = AnfPolynomial::new(self.nvertices);
        for &e in &self.edges {
            p.toggle(e);
        }
        Ok(p)
    }

    /// `‖S_i|H⟩ − |H⟩‖` for `S_i = X_i ∏_{e∋i} CZ_{e∖i}`, where a
    /// multi-controlled Z on no qubits is the scalar −1.
    pub fn stabilizer_residual(&self, i: usize) -> Result<f64> {
        if i >= self.nvertices {
            return Err(Error::Parameter(format!("vertex {i} of {}", self.nvertices)));
        }
        let state = hypergraph_state(self, false)?;
        let mut s = state.clone();
        for &e in self.edges.iter().filter(|e| *e >> i & 1 == 1) {
            let rest = e & !(1u64 << i);
            if rest == 0 {
                s.scale(num_complex::Complex64::new(-1.0, 0.0));
            } else {
                s.mcz(rest);
            }
        }
        s.x(i);
        s.distance(&state)
    }
}

/// `∏_e CZ_e |+…+⟩`, negated when `negate` is set.
pub fn hypergraph_state(h: &Hypergraph, negate: bool) -> Result<StateVector> {
    if h.nvertices > MAX_QUBITS {
        return Err(Error::Size(format!("{} qubits exceeds the statevector cap of {MAX_QUBITS}", h.nvertices)));
    }
    let mut s = StateVector::zero(h.nvertices)?;
    for q in 0..h.nvertices {
        s.h(q);
    }
    for &e in &h.edges {
        s.mcz(e);
    }
    if negate {
        s.scale(num_complex::Complex64::new(-1.0, 0.0));
    }
    Ok(s)
}

/// `2^{-d} Σ_x (-1)^{f(x) ⊕ c(x)}`, computed from the truth tables and
/// again as the overlap `⟨G[c]|G[f]⟩` of the two hypergraph states.
pub fn hypergraph_overlap(f: &BooleanFunction, c: &BooleanFunction) -> Result<Dyadic> {
    let d = f.nvars();
    if c.nvars() != d {
        return Err(Error::Arity { left: d, right: c.nvars() });
    }
    if d > MAX_OVERLAP_VARS {
        return Err(Error::Size(format!("{d} variables (limit {MAX_OVERLAP_VARS})")));
    }
    let (fa, ca) = (f.anf(), c.anf());
    if fa.degree() > 3 {
        return Err(Error::Degree { found: fa.degree(), allowed: 3 });
    }
    if ca.degree() > 2 {
        return Err(Error::Degree { found: ca.degree(), allowed: 2 });
    }
    let w = f.generalized_walsh(c)?;
    let (hf, sf) = Hypergraph::from_anf(&fa);
    let (hc, sc) = Hypergraph::from_anf(&ca);
    let overlap = hypergraph_state(&hc, sc)?.inner(&hypergraph_state(&hf, sf)?)?;
    let scaled = overlap.re * (1u64 << d) as f64;
    if overlap.im.abs() > 1e-9 || (scaled - w as f64).abs() > 1e-6 {
        return Err(Error::Consistency(format!("state overlap {overlap} disagrees with W = {w} / 2^{d}")));
    }
    Ok(Dyadic::new(w as i128, d as u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_form_examples() {
        let f = BooleanFunction::from_anf(&AnfPolynomial::from_sets(2, &[&[0, 1]]).unwrap());
        assert_eq!(polar_form(&f).unwrap().edges(), vec![(0, 1)]);
        let cubic = BooleanFunction::from_anf(&AnfPolynomial::from_sets(3, &[&[0, 1, 2]]).unwrap());
        assert!(matches!(polar_form(&cubic), Err(Error::Degree { found: 3, allowed: 2 })));
    }

    #[test]
    fn path_symmetries() {
        let p5 = x_symmetry_count(&Graph::path(5));
        assert_eq!(p5.n_x, 1);
        assert_eq!(p5.basis[0].to_string(), "10101");
        assert_eq!(x_symmetry_count(&Graph::path(4)).n_x, 0);
    }

    #[test]
    fn torus_grid_symmetry_count() {
        assert_eq!(x_symmetry_count(&Graph::torus_grid(4).unwrap()).n_x, 8);
    }

    #[test]
    fn symmetry_signs_count_internal_edges() {
        let g = Graph::complete(5);
        let sym = x_symmetry_count(&g);
        let f = g.function().unwrap();
        for (a, s) in sym.basis.iter().zip(&sym.signs) {
            assert_eq!(*s, f.get(a.to_u64()));
        }
    }

    #[test]
    fn gauss_sum_matches_direct() {
        let g = Graph::complete(5);
        let f = g.function().unwrap();
        for y in 0..32u64 {
            let direct: i64 = (0..32u64).map(|z| if f.get(z) ^ ((y & z).count_ones() % 2 == 1) { -1 } else { 1 }).sum();
            let fast = quadratic_sign_sum(&g.neighbors, y, false)
                .map_or(0, |(neg, l)| if neg { -(1i64 << l) } else { 1i64 << l });
            assert_eq!(direct, fast, "y = {y}");
        }
    }

    #[test]
    fn symmetry_spectrum_matches_fwht() {
        for g in [Graph::path(4), Graph::path(5), Graph::complete(5), Graph::cycle(6)] {
            let sw = walsh_from_symmetries(&g).unwrap();
            let direct = g.function().unwrap().walsh_transform().unwrap();
            assert_eq!(sw.spectrum().unwrap(), direct);
            for y in 0..1u64 << g.nvertices() {
                assert_eq!(sw.value(y), direct.get(y) as i128);
            }
        }
        let p5 = walsh_from_symmetries(&Graph::path(5)).unwrap();
        assert_eq!((p5.support_count(), p5.magnitude()), (16, 8));
    }

    #[test]
    fn standard_form_k5() {
        let r = standard_form(&Graph::complete(5).adjacency()).unwrap();
        assert_eq!(r.rank2k, 4);
        let check = r.transform.mul(&Graph::complete(5).adjacency()).unwrap().mul(&r.transform.transpose()).unwrap();
        assert_eq!(check, r.reduced);
        assert!(r.transform.is_invertible());
    }

    #[test]
    fn standard_form_of_zero_is_trivial() {
        let r = standard_form(&BitMatrix::zeros(4, 4)).unwrap();
        assert_eq!(r.rank2k, 0);
        assert_eq!(r.reduced, BitMatrix::zeros(4, 4));
        assert!(r.transform.is_invertible());
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let m = BitMatrix::from_strs(&["01", "00"]).unwrap();
        assert!(matches!(standard_form(&m), Err(Error::Shape(_))));
    }

    #[test]
    fn bell_circuit_on_small_graphs() {
        let single = bell_extraction_circuit(&Graph::path(2)).unwrap();
        assert!(single.gates.is_empty());
        assert_eq!(single.pairs, vec![(0, 1)]);
        let p5 = bell_extraction_circuit(&Graph::path(5)).unwrap();
        assert_eq!((p5.pairs.len(), p5.isolated.len()), (2, 1));
    }

    #[test]
    fn bell_circuit_statevector() {
        use crate::quantum::{build_state, StateKind};
        let g = Graph::complete(5);
        let circ = bell_extraction_circuit(&g).unwrap();
        let mut s = build_state(&StateKind::Graph(g)).unwrap();
        circ.apply(&mut s);
        let want = build_state(&StateKind::Graph(circ.final_graph(5).unwrap())).unwrap();
        assert!(s.distance(&want).unwrap() < 1e-12);
    }

    #[test]
    fn overlap_examples() {
        let cubic = BooleanFunction::from_anf(&AnfPolynomial::from_sets(3, &[&[0, 1, 2]]).unwrap());
        assert_eq!(hypergraph_overlap(&cubic, &BooleanFunction::zero(3)).unwrap(), Dyadic::new(6, 3));
        assert_eq!(hypergraph_overlap(&cubic, &cubic).unwrap_err(), Error::Degree { found: 3, allowed: 2 });
        let q = BooleanFunction::from_anf(&AnfPolynomial::from_sets(3, &[&[0, 1], &[2], &[]]).unwrap());
        assert_eq!(hypergraph_overlap(&q, &q).unwrap(), Dyadic::from_int(1));
    }

    #[test]
    fn hypergraph_stabilizers_fix_state() {
        let h = Hypergraph::new(4, [0b0111, 0b1100, 0b0001, 0b1010]).unwrap();
        for i in 0..4 {
            assert!(h.stabilizer_residual(i).unwrap() < 1e-12);
        }
    }
}

//! Dense statevector simulation for the quantum side of the games.
//!
//! States are stored as `2^n` complex amplitudes with qubit `i` on bit `i` of
//! the basis index. Pauli products follow the game convention
//! `P(a, b) = i^{ab} X^a Z^b`, so `P(1, 1) = Y` and every product of
//! single-site labels is Hermitian.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boolfn::fwht;
use crate::cssgame::{CssCode, GameMode, GameSpec, NamedCode, PauliLabel};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graphstate::{Graph, Hypergraph};

/// Default qubit cap: `2^22` amplitudes take 64 MiB.
pub const MAX_QUBITS: usize = 22;

/// Largest constraint set expanded by [`multi_constraint_prob`].
pub const MAX_CONSTRAINTS: usize = 20;

/// Largest context size for [`empirical_model`].
pub const MAX_CONTEXT: usize = 20;

/// Imaginary parts of Hermitian expectations must stay below this.
pub const IMAG_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// 2x2 complex matrix, row-major.
pub type Gate = [[Complex64; 2]; 2];

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    nqubits: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::Size(format!("{n} qubits exceeds the statevector cap of {MAX_QUBITS}")));
    }
    Ok(())
}

fn low_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// `i^k`.
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => Complex64::new(0.0, 1.0),
        2 => -ONE,
        _ => Complex64::new(0.0, -1.0),
    }
}

/// X and Z masks of a label string, restricted to `support`.
fn label_masks(labels: &[PauliLabel], support: u64) -> (u64, u64) {
    labels.iter().enumerate().filter(|(i, _)| support >> i & 1 == 1).fold((0, 0), |(x, z), (i, l)| {
        let (a, b) = l.bits();
        (x | (a as u64) << i, z | (b as u64) << i)
    })
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(nqubits: usize) -> Result<Self> {
        check_qubits(nqubits)?;
        let mut amps = vec![ZERO; 1 << nqubits];
        amps[0] = ONE;
        Ok(StateVector { nqubits, amps })
    }

    /// `|+…+⟩`.
    pub fn plus(nqubits: usize) -> Result<Self> {
        check_qubits(nqubits)?;
        let a = Complex64::new((-(nqubits as f64) / 2.0).exp2(), 0.0);
        Ok(StateVector { nqubits, amps: vec![a; 1 << nqubits] })
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::Shape(format!("{} amplitudes is not a power of two", amps.len())));
        }
        let nqubits = amps.len().trailing_zeros() as usize;
        check_qubits(nqubits)?;
        let mut s = StateVector { nqubits, amps };
        s.normalize()?;
        Ok(s)
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !n.is_finite() || n <= 1e-300 {
            return Err(Error::Construction("state has zero norm".into()));
        }
        self.amps.iter_mut().for_each(|a| *a /= n);
        Ok(())
    }

    fn same_size(&self, other: &StateVector) -> Result<()> {
        if self.nqubits != other.nqubits {
            return Err(Error::Arity { left: self.nqubits, right: other.nqubits });
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.same_size(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.same_size(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
    }

    pub fn add_scaled(&mut self, other: &StateVector, factor: Complex64) -> Result<()> {
        self.same_size(other)?;
        self.amps.iter_mut().zip(&other.amps).for_each(|(a, b)| *a += factor * b);
        Ok(())
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= factor);
    }

    fn check_qubit(&self, q: usize) {
        assert!(q < self.nqubits, "qubit {q} out of range for {} qubits", self.nqubits);
    }

    /// Applies an arbitrary 2x2 matrix to qubit `q`.
    pub fn apply_gate(&mut self, q: usize, m: &Gate) {
        self.check_qubit(q);
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn h(&mut self, q: usize) {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_gate(q, &[[h, h], [h, -h]]);
    }

    pub fn s(&mut self, q: usize) {
        self.apply_gate(q, &[[ONE, ZERO], [ZERO, Complex64::new(0.0, 1.0)]]);
    }

    pub fn s_dagger(&mut self, q: usize) {
        self.apply_gate(q, &[[ONE, ZERO], [ZERO, Complex64::new(0.0, -1.0)]]);
    }

    pub fn x(&mut self, q: usize) {
        self.apply_pauli(1 << q, 0);
    }

    pub fn z(&mut self, q: usize) {
        self.apply_pauli(0, 1 << q);
    }

    pub fn cx(&mut self, control: usize, target: usize) {
        self.check_qubit(control);
        self.check_qubit(target);
        assert_ne!(control, target, "CX needs distinct qubits");
        let (c, t) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        assert_ne!(a, b, "CZ needs distinct qubits");
        self.mcz(1 << a | 1 << b);
    }

    /// Multi-controlled Z on the qubits of `mask`: phase −1 where all are 1.
    /// A one-qubit mask is a plain Z.
    pub fn mcz(&mut self, mask: u64) {
        assert!(mask >> self.nqubits == 0, "mask {mask:#b} out of range");
        let m = mask as usize;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m == m {
                *a = -*a;
            }
        }
    }

    /// Applies the Hermitian product `∏_i P(x_i, z_i)`.
    pub fn apply_pauli(&mut self, x_mask: u64, z_mask: u64) {
        assert!((x_mask | z_mask) >> self.nqubits == 0, "Pauli mask out of range");
        let phase = i_pow((x_mask & z_mask).count_ones());
        let (xm, zm) = (x_mask as usize, z_mask as usize);
        let mut out = vec![ZERO; self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let sign = if (i & zm).count_ones() % 2 == 1 { -phase } else { phase };
            out[i ^ xm] = sign * a;
        }
        self.amps = out;
    }

    /// Applies one label per qubit (identity labels are skipped).
    pub fn apply_labels(&mut self, labels: &[PauliLabel]) {
        let (x, z) = label_masks(labels, low_mask(labels.len()));
        self.apply_pauli(x, z);
    }

    /// `⟨ψ|∏_i P(x_i, z_i)|ψ⟩`.
    pub fn pauli_expectation(&self, x_mask: u64, z_mask: u64) -> Complex64 {
        assert!((x_mask | z_mask) >> self.nqubits == 0, "Pauli mask out of range");
        let phase = i_pow((x_mask & z_mask).count_ones());
        let (xm, zm) = (x_mask as usize, z_mask as usize);
        let mut acc = ZERO;
        for (i, a) in self.amps.iter().enumerate() {
            let term = self.amps[i ^ xm].conj() * a;
            if (i & zm).count_ones() % 2 == 1 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        phase * acc
    }

    /// Real expectation of a Hermitian Pauli product, checking the imaginary part.
    pub fn pauli_expectation_real(&self, x_mask: u64, z_mask: u64) -> Result<f64> {
        let v = self.pauli_expectation(x_mask, z_mask);
        if v.im.abs() > IMAG_TOL {
            return Err(Error::Numeric(format!("Pauli expectation has imaginary part {:e}", v.im)));
        }
        Ok(v.re)
    }
}

/// Sitewise deformation `e^{θZ} e^{2iθY}`, a real nonunitary matrix.
pub fn deformation(theta: f64) -> Gate {
    let (s, c) = (2.0 * theta).sin_cos();
    let (up, down) = (theta.exp(), (-theta).exp());
    let r = |v: f64| Complex64::new(v, 0.0);
    [[r(up * c), r(up * s)], [r(-down * s), r(down * c)]]
}

/// Resource states that can be prepared by name.
#[derive(Clone, Debug)]
pub enum StateKind {
    Ghz(usize),
    Graph(Graph),
    Hypergraph(Hypergraph),
    /// `|+…+⟩` projected onto the codespace.
    CssCodeword(CssCode),
    /// The base state with [`deformation`] applied to every qubit, renormalized.
    Deformed(Box<StateKind>, f64),
}

pub fn build_state(kind: &StateKind) -> Result<StateVector> {
    match kind {
        StateKind::Ghz(n) => {
            if *n == 0 {
                return Err(Error::Parameter("GHZ state needs at least one qubit".into()));
            }
            let mut s = StateVector::zero(*n)?;
            let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let last = s.amps.len() - 1;
            s.amps[0] = a;
            s.amps[last] = a;
            Ok(s)
        }
        StateKind::Graph(g) => {
            let mut s = StateVector::plus(g.nvertices())?;
            for (a, b) in g.edges() {
                s.cz(a, b);
            }
            Ok(s)
        }
        StateKind::Hypergraph(h) => {
            let mut s = StateVector::plus(h.nvertices())?;
            for &e in h.edges() {
                s.mcz(e);
            }
            Ok(s)
        }
        StateKind::CssCodeword(code) => codeword(code),
        StateKind::Deformed(base, theta) => {
            let mut s = build_state(base)?;
            let m = deformation(*theta);
            for q in 0..s.nqubits {
                s.apply_gate(q, &m);
            }
            s.normalize()?;
            Ok(s)
        }
    }
}

fn codeword(code: &CssCode) -> Result<StateVector> {
    let mut s = StateVector::plus(code.nqubits())?;
    let generators = code.x_rows().into_iter().map(|x| (x, 0)).chain(code.z_rows().into_iter().map(|z| (0, z)));
    for (x, z) in generators {
        let mut flipped = s.clone();
        flipped.apply_pauli(x, z);
        s.add_scaled(&flipped, ONE)?;
        s.scale(Complex64::new(0.5, 0.0));
    }
    s.normalize().map_err(|_| Error::Construction("codespace projection of |+…+⟩ vanished".into()))?;
    Ok(s)
}

fn check_labels(state: &StateVector, labels: &[PauliLabel]) -> Result<()> {
    if labels.len() != state.nqubits {
        return Err(Error::Arity { left: labels.len(), right: state.nqubits });
    }
    Ok(())
}

/// Probability that the outcomes of measuring `labels` on the sites of
/// `support` have XOR equal to `parity`.
pub fn outcome_parity_prob(state: &StateVector, labels: &[PauliLabel], support: u64, parity: bool) -> Result<f64> {
    check_labels(state, labels)?;
    if support == 0 {
        return Err(Error::Parameter("empty support".into()));
    }
    let (x, z) = label_masks(labels, support);
    let e = state.pauli_expectation_real(x, z)?;
    Ok(0.5 * (1.0 + if parity { -e } else { e }))
}

/// Probability that every `(support, parity)` constraint holds at once,
/// expanded as an average over all products of the constrained operators.
pub fn multi_constraint_prob(state: &StateVector, labels: &[PauliLabel], constraints: &[(u64, bool)]) -> Result<f64> {
    check_labels(state, labels)?;
    if constraints.len() > MAX_CONSTRAINTS {
        return Err(Error::Size(format!("{} constraints (limit {MAX_CONSTRAINTS})", constraints.len())));
    }
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut total = 0.0;
    for r in 0..1u64 << constraints.len() {
        let (mut support, mut sign) = (0u64, false);
        for (c, &(s, f)) in constraints.iter().enumerate() {
            if r >> c & 1 == 1 {
                support ^= s;
                sign ^= f;
            }
        }
        let e = match cache.get(&support) {
            Some(&e) => e,
            None => {
                let (x, z) = label_masks(labels, support);
                let e = state.pauli_expectation_real(x, z)?;
                cache.insert(support, e);
                e
            }
        };
        total += if sign { -e } else { e };
    }
    Ok(total / (1u64 << constraints.len()) as f64)
}

/// Born-rule distribution of measuring each qubit in the eigenbasis of its
/// label. Bit `i` of the index is the outcome of qubit `i`; qubits labelled
/// `I` are not measured and always report 0.
pub fn outcome_distribution(state: &StateVector, labels: &[PauliLabel]) -> Result<Vec<f64>> {
    check_labels(state, labels)?;
    let mut rotated = state.clone();
    let mut measured = 0usize;
    for (q, l) in labels.iter().enumerate() {
        match l {
            PauliLabel::I => continue,
            PauliLabel::X => rotated.h(q),
            PauliLabel::Y => {
                rotated.s_dagger(q);
                rotated.h(q);
            }
            PauliLabel::Z => {}
        }
        measured |= 1 << q;
    }
    let mut probs = vec![0.0; rotated.amps.len()];
    for (i, a) in rotated.amps.iter().enumerate() {
        probs[i & measured] += a.norm_sqr();
    }
    Ok(probs)
}

/// Labels for one query when each player maps `(a_i, b_i)` through `rule`.
pub fn query_labels(nplayers: usize, a: u64, b: u64, rule: impl Fn(bool, bool) -> PauliLabel) -> Vec<PauliLabel> {
    (0..nplayers).map(|i| rule(a >> i & 1 == 1, b >> i & 1 == 1)).collect()
}

/// The honest rule: measure `P(a_i, b_i)`.
pub fn pauli_rule(a: bool, b: bool) -> PauliLabel {
    PauliLabel::from_bits(a, b)
}

/// The GHZ rule: measure `Y` when `a_i b_i = 1`, `X` otherwise.
pub fn merp_rule(a: bool, b: bool) -> PauliLabel {
    if a && b {
        PauliLabel::Y
    } else {
        PauliLabel::X
    }
}

/// Average win probability over uniform queries when every player measures
/// the label chosen by `rule` and answers with the outcome.
pub fn local_pauli_score<R>(state: &StateVector, game: &GameSpec, rule: R, exec: Exec) -> Result<f64>
where
    R: Fn(bool, bool) -> PauliLabel + Sync + Send,
{
    let n = game.nplayers();
    if state.nqubits != n {
        return Err(Error::Arity { left: state.nqubits, right: n });
    }
    let qm = game.query_map();
    let nq = qm.num_queries() as usize;
    let per_query = exec.map_collect(nq, |q| -> Result<f64> {
        let (a, b) = qm.question(q as u64);
        let labels = query_labels(n, a, b, &rule);
        match game.mode() {
            GameMode::Xor => {
                let support = label_masks(&labels, low_mask(n));
                if support == (0, 0) {
                    return Ok(if game.target().get(q as u64) { 0.0 } else { 1.0 });
                }
                outcome_parity_prob(state, &labels, support.0 | support.1, game.target().get(q as u64))
            }
            GameMode::Submeasurement => {
                let cs: Vec<(u64, bool)> =
                    game.constraints(q as u64).iter().map(|c| (c.support(), c.parity)).collect();
                multi_constraint_prob(state, &labels, &cs)
            }
        }
    });
    let mut total = 0.0;
    for p in per_query {
        total += p?;
    }
    Ok(total / nq as f64)
}

/// Score of the Pauli strategy `P(a_i, b_i)` on `state`.
pub fn pauli_strategy_score(state: &StateVector, game: &GameSpec, exec: Exec) -> Result<f64> {
    local_pauli_score(state, game, pauli_rule, exec)
}

/// Score of the GHZ-state strategy that measures `Y` on `a_i b_i = 1` and `X`
/// elsewhere, in the game's own mode.
pub fn merp_strategy_score(game: &GameSpec, exec: Exec) -> Result<f64> {
    let ghz = build_state(&StateKind::Ghz(game.nplayers()))?;
    local_pauli_score(&ghz, game, merp_rule, exec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Observable {
    pub site: usize,
    pub label: PauliLabel,
}

/// Observables plus the contexts (jointly measured subsets) over them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementScenario {
    pub nqubits: usize,
    pub observables: Vec<Observable>,
    /// Indices into `observables`.
    pub contexts: Vec<Vec<usize>>,
}

impl MeasurementScenario {
    pub fn new(nqubits: usize, observables: Vec<Observable>, contexts: Vec<Vec<usize>>) -> Result<Self> {
        let s = MeasurementScenario { nqubits, observables, contexts };
        s.validate()?;
        Ok(s)
    }

    /// Sites in range, no identity observables, and each context acting on
    /// distinct sites.
    pub fn validate(&self) -> Result<()> {
        for o in &self.observables {
            if o.site >= self.nqubits || o.site >= 64 {
                return Err(Error::InvalidInput(format!("observable on site {} of {}", o.site, self.nqubits)));
            }
            if o.label == PauliLabel::I {
                return Err(Error::InvalidInput(format!("identity observable on site {}", o.site)));
            }
        }
        for (k, ctx) in self.contexts.iter().enumerate() {
            if ctx.len() > MAX_CONTEXT {
                return Err(Error::Size(format!("context {k} has {} observables (limit {MAX_CONTEXT})", ctx.len())));
            }
            let mut sites = 0u64;
            for &i in ctx {
                let o = self.observables.get(i).ok_or_else(|| {
                    Error::InvalidInput(format!("context {k} refers to missing observable {i}"))
                })?;
                if sites >> o.site & 1 == 1 {
                    return Err(Error::InvalidInput(format!("context {k} measures site {} twice", o.site)));
                }
                sites |= 1 << o.site;
            }
        }
        Ok(())
    }
}

/// One outcome distribution per context. Entry `o` of a table is the
/// probability that the `k`-th observable of the context returns bit `k` of `o`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalModel {
    pub scenario: MeasurementScenario,
    pub tables: Vec<Vec<f64>>,
}

impl EmpiricalModel {
    /// Distribution of the observables `subset` (indices into the scenario)
    /// marginalized from context `context`. Outcome bit `k` belongs to `subset[k]`.
    pub fn marginal(&self, context: usize, subset: &[usize]) -> Vec<f64> {
        let ctx = &self.scenario.contexts[context];
        let pos: Vec<usize> =
            subset.iter().map(|o| ctx.iter().position(|c| c == o).expect("observable outside context")).collect();
        let mut out = vec![0.0; 1 << subset.len()];
        for (o, p) in self.tables[context].iter().enumerate() {
            let key = pos.iter().enumerate().fold(0usize, |k, (j, &i)| k | (o >> i & 1) << j);
            out[key] += p;
        }
        out
    }

    /// Checks table sizes, nonnegativity, normalization within `norm_tol`
    /// and agreement of shared marginals within `marginal_tol`.
    pub fn validate(&self, norm_tol: f64, marginal_tol: f64) -> Result<()> {
        self.scenario.validate()?;
        let contexts = &self.scenario.contexts;
        if self.tables.len() != contexts.len() {
            return Err(Error::Shape(format!("{} tables for {} contexts", self.tables.len(), contexts.len())));
        }
        for (k, (t, c)) in self.tables.iter().zip(contexts).enumerate() {
            if t.len() != 1 << c.len() {
                return Err(Error::Shape(format!("table {k} has {} entries, expected {}", t.len(), 1 << c.len())));
            }
            if t.iter().any(|p| *p < -norm_tol || !p.is_finite()) {
                return Err(Error::InvalidInput(format!("table {k} has a negative entry")));
            }
            let sum: f64 = t.iter().sum();
            if (sum - 1.0).abs() > norm_tol {
                return Err(Error::InvalidInput(format!("table {k} sums to {sum}")));
            }
        }
        for i in 0..contexts.len() {
            for j in i + 1..contexts.len() {
                let shared: Vec<usize> = contexts[i].iter().copied().filter(|o| contexts[j].contains(o)).collect();
                if shared.is_empty() {
                    continue;
                }
                let (mi, mj) = (self.marginal(i, &shared), self.marginal(j, &shared));
                if mi.iter().zip(&mj).any(|(a, b)| (a - b).abs() > marginal_tol) {
                    return Err(Error::InvalidInput(format!("contexts {i} and {j} disagree on shared observables")));
                }
            }
        }
        Ok(())
    }
}

/// Born-rule tables for every context of `scenario`.
pub fn empirical_model(state: &StateVector, scenario: &MeasurementScenario) -> Result<EmpiricalModel> {
    scenario.validate()?;
    if scenario.nqubits != state.nqubits {
        return Err(Error::Arity { left: scenario.nqubits, right: state.nqubits });
    }
    let mut tables = Vec::with_capacity(scenario.contexts.len());
    for ctx in &scenario.contexts {
        let k = ctx.len();
        let mut expect = vec![0.0; 1 << k];
        for (subset, e) in expect.iter_mut().enumerate() {
            let (mut x, mut z) = (0u64, 0u64);
            for (j, &o) in ctx.iter().enumerate() {
                if subset >> j & 1 == 1 {
                    let obs = scenario.observables[o];
                    let (a, b) = obs.label.bits();
                    x |= (a as u64) << obs.site;
                    z |= (b as u64) << obs.site;
                }
            }
            *e = state.pauli_expectation_real(x, z)?;
        }
        fwht(&mut expect);
        let scale = (1u64 << k) as f64;
        tables.push(expect.into_iter().map(|v| (v / scale).max(0.0)).collect());
    }
    Ok(EmpiricalModel { scenario: scenario.clone(), tables })
}

/// Operator measured by every player for each question pair `(a_e, b_e)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleOperators {
    pub none: PauliLabel,
    pub on_a: PauliLabel,
    pub on_b: PauliLabel,
    pub on_ab: PauliLabel,
}

impl RoleOperators {
    pub const HONEST: RoleOperators =
        RoleOperators { none: PauliLabel::I, on_a: PauliLabel::X, on_b: PauliLabel::Z, on_ab: PauliLabel::Y };
    pub const MERP: RoleOperators =
        RoleOperators { none: PauliLabel::X, on_a: PauliLabel::X, on_b: PauliLabel::X, on_ab: PauliLabel::Y };
    pub const IDLE: RoleOperators =
        RoleOperators { none: PauliLabel::I, on_a: PauliLabel::I, on_b: PauliLabel::I, on_ab: PauliLabel::I };

    pub fn for_question(&self, a: bool, b: bool) -> PauliLabel {
        match (a, b) {
            (false, false) => self.none,
            (true, false) => self.on_a,
            (false, true) => self.on_b,
            (true, true) => self.on_ab,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfTestCheck {
    pub name: String,
    /// Norm of the violation, `‖Oψ − λψ‖` or `‖{P, Q}ψ‖`.
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub checks: Vec<SelfTestCheck>,
    pub passed: bool,
}

/// Tolerance for the self-test residuals.
pub const SELFTEST_TOL: f64 = 1e-10;

fn apply_roles(state: &StateVector, roles: &RoleOperators, a: u64, b: u64) -> StateVector {
    let labels: Vec<PauliLabel> = (0..state.nqubits)
        .map(|i| {
            let (ai, bi) = (a >> i & 1 == 1, b >> i & 1 == 1);
            if ai || bi {
                roles.for_question(ai, bi)
            } else {
                PauliLabel::I
            }
        })
        .collect();
    let mut out = state.clone();
    out.apply_labels(&labels);
    out
}

fn single_site(state: &StateVector, site: usize, label: PauliLabel) -> StateVector {
    let mut out = state.clone();
    let (x, z) = label.bits();
    out.apply_pauli((x as u64) << site, (z as u64) << site);
    out
}

/// Checks the operator relations that force anticommutation on the 2x2
/// square-lattice toric code: around plaquette 0 with top edge 1, right
/// edge 2 and bottom edge 3, the mixed plaquette-star products through
/// edges (1,2), (2,3) and (3,1) have eigenvalue −1, the plaquette +1, and
/// the both-questions operator anticommutes with the single-question ones
/// on every edge.
pub fn toric_selftest(l: usize, state: &StateVector, roles: &RoleOperators) -> Result<SelfTestReport> {
    if l != 2 {
        return Err(Error::Parameter(format!("self-test is implemented for L = 2, got {l}")));
    }
    let code = NamedCode::ToricSquare { l, redundant: true }.build()?;
    if state.nqubits != code.nqubits() {
        return Err(Error::Arity { left: state.nqubits, right: code.nqubits() });
    }
    let plaquette = code.x_rows()[0];
    let stars = code.z_rows();
    // Star of vertex (i, j) is row j·L + i.
    let (top_right, bottom_right) = (stars[l + 1], stars[1]);
    let products = [
        ("plaquette with top-right star", plaquette, top_right, -1.0),
        ("plaquette with bottom-right star", plaquette, bottom_right, -1.0),
        ("plaquette with both right stars", plaquette, top_right ^ bottom_right, -1.0),
        ("plaquette alone", plaquette, 0, 1.0),
    ];
    let mut checks = Vec::new();
    for (name, a, b, eigen) in products {
        let mut v = apply_roles(state, roles, a, b);
        v.add_scaled(state, Complex64::new(-eigen, 0.0))?;
        checks.push((name.to_string(), v.norm()));
    }
    for e in 0..code.nqubits() {
        let c = roles.on_ab;
        for (which, other) in [("on_a", roles.on_a), ("on_b", roles.on_b)] {
            let mut v = single_site(&single_site(state, e, c), e, other);
            v.add_scaled(&single_site(&single_site(state, e, other), e, c), ONE)?;
            checks.push((format!("edge {e}: {{{which}, on_ab}} annihilates"), v.norm()));
        }
    }
    let checks: Vec<SelfTestCheck> = checks
        .into_iter()
        .map(|(name, residual)| SelfTestCheck { name, residual, pass: residual < SELFTEST_TOL })
        .collect();
    let passed = checks.iter().all(|c| c.pass);
    Ok(SelfTestReport { checks, passed })
}

//! Noncontextual fraction of empirical models.
//!
//! The noncontextual fraction is the largest total weight of deterministic
//! value assignments that fits under every context's outcome table:
//! maximize `Σ_g c_g` subject to `Σ_{g ~ (C, o)} c_g ≤ e_C(o)`, `c ≥ 0`.
//! The LP is solved by a dense tableau simplex with Bland's anti-cycling
//! rule, either in floating point or in exact rationals.

use std::collections::BTreeSet;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cssgame::{GameMode, GameSpec, PauliLabel};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::quantum::{build_state, pauli_strategy_score, EmpiricalModel, MeasurementScenario, Observable, StateKind};

/// Largest observable count: the LP has `2^|X|` variables.
pub const MAX_OBSERVABLES: usize = 20;

/// Tolerance used by the floating-point simplex and witness checks.
pub const FLOAT_TOL: f64 = 1e-9;

const PIVOT_EPS: f64 = 1e-10;

/// Consecutive degenerate pivots after which entering switches to Bland's rule.
const DEGENERATE_SWITCH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpMode {
    Float,
    Exact,
}

/// Scalars the simplex can pivot over.
pub trait LpScalar:
    Clone + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn is_positive(&self) -> bool;
    /// Strictly less, beyond rounding noise.
    fn clearly_less(&self, other: &Self) -> bool;
    /// Clears rounding noise below zero on a right-hand side.
    fn snap_nonnegative(&mut self) {}
    /// Size used to choose elimination pivots.
    fn pivot_size(&self) -> f64;
}

impl LpScalar for f64 {
    fn is_positive(&self) -> bool {
        *self > PIVOT_EPS
    }

    fn clearly_less(&self, other: &Self) -> bool {
        *self < *other - PIVOT_EPS
    }

    fn snap_nonnegative(&mut self) {
        if *self < 0.0 && *self > -PIVOT_EPS {
            *self = 0.0;
        }
    }

    fn pivot_size(&self) -> f64 {
        self.abs()
    }
}

impl LpScalar for BigRational {
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }

    fn clearly_less(&self, other: &Self) -> bool {
        self < other
    }

    fn pivot_size(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

/// `max cᵀx` subject to `Ax ≤ b`, `x ≥ 0`, with `b ≥ 0`.
#[derive(Clone, Debug)]
pub struct PackingLp<T> {
    pub rows: Vec<Vec<T>>,
    pub bounds: Vec<T>,
    pub objective: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub value: T,
    pub x: Vec<T>,
    pub pivots: usize,
}

impl<T: LpScalar> PackingLp<T> {
    /// Simplex from the all-slack basis. Entering: largest reduced cost,
    /// or Bland's lowest positive index once several degenerate pivots
    /// occur in a row. Leaving: minimum ratio, ties to the lowest basic
    /// variable index.
    pub fn solve(&self) -> Result<LpSolution<T>> {
        let m = self.rows.len();
        let n = self.objective.len();
        if self.bounds.len() != m || self.rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("LP dimensions disagree".into()));
        }
        if self.bounds.iter().any(|b| b.clearly_less(&T::zero())) {
            return Err(Error::Domain("LP right-hand side must be nonnegative".into()));
        }
        let width = n + m + 1;
        let mut tab: Vec<Vec<T>> = Vec::with_capacity(m);
        for (i, row) in self.rows.iter().enumerate() {
            let mut t = row.clone();
            t.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
            t.push(self.bounds[i].clone());
            tab.push(t);
        }
        let mut obj: Vec<T> = self.objective.clone();
        obj.extend((0..=m).map(|_| T::zero()));
        let mut basis: Vec<usize> = (n..n + m).collect();
        let limit = 50 * (n + m) + 10_000;
        let mut pivots = 0;
        let mut degenerate_run = 0usize;
        loop {
            let col = if degenerate_run >= DEGENERATE_SWITCH {
                (0..n + m).find(|&j| obj[j].is_positive())
            } else {
                (0..n + m)
                    .filter(|&j| obj[j].is_positive())
                    .fold(None, |best: Option<usize>, j| match best {
                        Some(b) if !obj[b].clearly_less(&obj[j]) => Some(b),
                        _ => Some(j),
                    })
            };
            let Some(col) = col else {
                break;
            };
            let mut best: Option<(usize, T)> = None;
            for (i, row) in tab.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = row[width - 1].clone() / row[col].clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio.clearly_less(br) || (!br.clearly_less(&ratio) && basis[i] < basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((prow, ratio)) = best else {
                return Err(Error::Numeric("LP is unbounded".into()));
            };
            degenerate_run = if ratio.is_positive() { 0 } else { degenerate_run + 1 };
            pivot(&mut tab, &mut obj, prow, col);
            basis[prow] = col;
            pivots += 1;
            if pivots > limit {
                return Err(Error::Numeric(format!("simplex exceeded {limit} pivots")));
            }
        }
        // Recompute the basic solution from the original data so that
        // rounding accumulated over many pivots does not reach the result.
        let basic = self.basic_solution(&basis)?;
        let mut x = vec![T::zero(); n];
        for (&b, v) in basis.iter().zip(basic) {
            if b < n {
                x[b] = v;
            }
        }
        let value = x.iter().zip(&self.objective).fold(T::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
        Ok(LpSolution { value, x, pivots })
    }

    /// Solves `B·x_B = b` for the columns of `[A | I]` listed in `basis`.
    fn basic_solution(&self, basis: &[usize]) -> Result<Vec<T>> {
        let m = self.rows.len();
        let n = self.objective.len();
        let mut aug: Vec<Vec<T>> = (0..m)
            .map(|r| {
                let mut row: Vec<T> = basis
                    .iter()
                    .map(|&j| {
                        if j < n {
                            self.rows[r][j].clone()
                        } else if j - n == r {
                            T::one()
                        } else {
                            T::zero()
                        }
                    })
                    .collect();
                row.push(self.bounds[r].clone());
                row
            })
            .collect();
        for c in 0..m {
            let p = (c..m)
                .max_by(|&a, &b| aug[a][c].pivot_size().total_cmp(&aug[b][c].pivot_size()))
                .filter(|&p| aug[p][c].pivot_size() > 0.0)
                .ok_or_else(|| Error::Numeric("final simplex basis is singular".into()))?;
            aug.swap(c, p);
            let inv = T::one() / aug[c][c].clone();
            for v in aug[c].iter_mut() {
                *v = v.clone() * inv.clone();
            }
            let prow = aug[c].clone();
            for (r, row) in aug.iter_mut().enumerate() {
                if r == c || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&prow).skip(c) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
        Ok(aug.into_iter().map(|mut row| {
            let mut v = row.pop().expect("augmented column");
            v.snap_nonnegative();
            v
        }).collect())
    }
}

fn pivot<T: LpScalar>(tab: &mut [Vec<T>], obj: &mut [T], prow: usize, col: usize) {
    let inv = T::one() / tab[prow][col].clone();
    for v in tab[prow].iter_mut() {
        if !v.is_zero() {
            *v = v.clone() * inv.clone();
        }
    }
    let pivot_row = tab[prow].clone();
    let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
    let eliminate = |row: &mut [T]| {
        let factor = row[col].clone();
        if factor.is_zero() {
            return;
        }
        for &j in &nonzero {
            row[j] = row[j].clone() - factor.clone() * pivot_row[j].clone();
        }
    };
    for (i, row) in tab.iter_mut().enumerate() {
        if i != prow {
            eliminate(row);
            let rhs = row.last_mut().expect("tableau row has a right-hand side");
            rhs.snap_nonnegative();
        }
    }
    eliminate(obj);
}

/// Weight on one value assignment. Bit `k` of `assignment` is the value of
/// observable `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessWeight {
    pub assignment: u64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NcfResult {
    pub ncf: f64,
    pub cf: f64,
    pub mode: LpMode,
    /// Exact value as `p/q`, in exact mode.
    pub ncf_exact: Option<String>,
    /// Nonzero weights only.
    pub witness: Vec<WitnessWeight>,
    pub pivots: usize,
}

/// Best continued-fraction approximation of `x` with denominator at most
/// `max_den`, accepted only if within `tol`.
pub fn rationalize(x: f64, max_den: u64, tol: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("cannot rationalize {x}")));
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1.to_f64().unwrap_or(f64::NAN) / k1.to_f64().unwrap_or(f64::NAN);
        let frac = rest - a;
        if (approx - x).abs() <= f64::EPSILON * x.abs().max(1.0) || frac < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    if k1.is_zero() {
        return Err(Error::Domain(format!("cannot rationalize {x}")));
    }
    let r = BigRational::new(h1, k1);
    if (r.to_f64().unwrap_or(f64::NAN) - x).abs() > tol {
        return Err(Error::Domain(format!("{x} is not within {tol:e} of a fraction with denominator <= {max_den}")));
    }
    Ok(r)
}

/// `(context, outcome)` rows of the LP, each listing the assignments that
/// agree with it.
fn constraint_rows(model: &EmpiricalModel) -> Result<(usize, Vec<(usize, usize)>)> {
    let nobs = model.scenario.observables.len();
    if nobs > MAX_OBSERVABLES {
        return Err(Error::Size(format!("{nobs} observables (limit {MAX_OBSERVABLES})")));
    }
    let mut rows = Vec::new();
    for (k, t) in model.tables.iter().enumerate() {
        rows.extend((0..t.len()).map(|o| (k, o)));
    }
    Ok((nobs, rows))
}

fn restrict(assignment: u64, context: &[usize]) -> usize {
    context.iter().enumerate().fold(0usize, |acc, (j, &obs)| acc | ((assignment >> obs & 1) as usize) << j)
}

fn build_lp<T: LpScalar>(model: &EmpiricalModel, entry: impl Fn(f64) -> Result<T>) -> Result<PackingLp<T>> {
    let (nobs, rows) = constraint_rows(model)?;
    let nvars = 1usize << nobs;
    let contexts = &model.scenario.contexts;
    let mut a = vec![vec![T::zero(); nvars]; rows.len()];
    let mut offset = Vec::with_capacity(contexts.len());
    let mut acc = 0;
    for t in &model.tables {
        offset.push(acc);
        acc += t.len();
    }
    for g in 0..nvars {
        for (k, ctx) in contexts.iter().enumerate() {
            a[offset[k] + restrict(g as u64, ctx)][g] = T::one();
        }
    }
    let bounds = rows.iter().map(|&(k, o)| entry(model.tables[k][o])).collect::<Result<Vec<T>>>()?;
    Ok(PackingLp { rows: a, bounds, objective: vec![T::one(); nvars] })
}

/// Checks `Σ_{g ~ (C,o)} w_g ≤ e_C(o) + tol` and `w ≥ -tol`.
pub fn verify_witness(model: &EmpiricalModel, weights: &[f64], tol: f64) -> Result<()> {
    if weights.iter().any(|w| *w < -tol) {
        return Err(Error::Consistency("negative witness weight".into()));
    }
    for (k, ctx) in model.scenario.contexts.iter().enumerate() {
        let mut marg = vec![0.0; model.tables[k].len()];
        for (g, w) in weights.iter().enumerate() {
            marg[restrict(g as u64, ctx)] += w;
        }
        if marg.iter().zip(&model.tables[k]).any(|(m, e)| *m > e + tol) {
            return Err(Error::Consistency(format!("witness exceeds the table of context {k}")));
        }
    }
    Ok(())
}

pub fn ncf(model: &EmpiricalModel) -> Result<NcfResult> {
    ncf_with(model, LpMode::Float)
}

pub fn ncf_with(model: &EmpiricalModel, mode: LpMode) -> Result<NcfResult> {
    model.validate(1e-9, 1e-9)?;
    let (weights, value, exact, pivots) = match mode {
        LpMode::Float => {
            let sol = build_lp(model, |e| Ok(e.max(0.0)))?.solve()?;
            (sol.x, sol.value, None, sol.pivots)
        }
        LpMode::Exact => {
            let lp = build_lp(model, |e| rationalize(e.max(0.0), 1 << 24, 1e-12))?;
            let sol = lp.solve()?;
            // Exact feasibility in rationals before converting.
            for (row, b) in lp.rows.iter().zip(&lp.bounds) {
                let lhs = row.iter().zip(&sol.x).fold(BigRational::zero(), |s, (a, x)| s + a * x);
                if lhs > *b {
                    return Err(Error::Consistency("exact witness violates a constraint".into()));
                }
            }
            if sol.x.iter().any(|x| x.is_negative()) {
                return Err(Error::Consistency("exact witness has a negative weight".into()));
            }
            let xs = sol.x.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
            let v = sol.value.to_f64().unwrap_or(f64::NAN);
            (xs, v, Some(sol.value.to_string()), sol.pivots)
        }
    };
    verify_witness(model, &weights, FLOAT_TOL)?;
    let witness = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| w.abs() > PIVOT_EPS)
        .map(|(g, &w)| WitnessWeight { assignment: g as u64, weight: w })
        .collect();
    let ncf = value.clamp(0.0, 1.0);
    Ok(NcfResult { ncf, cf: 1.0 - ncf, mode, ncf_exact: exact, witness, pivots })
}

/// `1 − (1 − ω)·ncf`, the largest score a model with that noncontextual
/// fraction can reach in a game of classical value `ω`.
pub fn prop4_bound(omega: f64, ncf: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&omega) {
        return Err(Error::Domain(format!("classical value {omega} outside [1/2, 1]")));
    }
    if !(0.0..=1.0).contains(&ncf) {
        return Err(Error::Domain(format!("noncontextual fraction {ncf} outside [0, 1]")));
    }
    Ok(1.0 - (1.0 - omega) * ncf)
}

/// One context per query, holding the Paulis `P(a_i, b_i)` of the sites
/// the query touches. Observables are sorted by site, then label.
pub fn scenario_from_game(game: &GameSpec) -> Result<MeasurementScenario> {
    if game.mode() != GameMode::Xor {
        return Err(Error::Mode("scenarios are built from XOR games".into()));
    }
    let n = game.nplayers();
    let qm = game.query_map();
    let per_query: Vec<Vec<Observable>> = (0..qm.num_queries())
        .map(|q| {
            let (a, b) = qm.question(q);
            (0..n)
                .filter(|i| (a | b) >> i & 1 == 1)
                .map(|i| Observable { site: i, label: PauliLabel::from_bits(a >> i & 1 == 1, b >> i & 1 == 1) })
                .collect()
        })
        .collect();
    let observables: Vec<Observable> =
        per_query.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let contexts = per_query
        .iter()
        .map(|ctx| ctx.iter().map(|o| observables.binary_search(o).expect("observable collected")).collect())
        .collect();
    MeasurementScenario::new(n, observables, contexts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub theta: f64,
    pub pauli_score: f64,
    pub ncf: f64,
    pub bound: f64,
}

/// For each `θ`: the Pauli-strategy score of the deformed state, its
/// noncontextual fraction on the game's scenario, and the resulting bound.
pub fn deformation_sweep(game: &GameSpec, base: &StateKind, omega: Dyadic, thetas: &[f64], exec: Exec) -> Result<Vec<SweepPoint>> {
    if thetas.is_empty() {
        return Err(Error::Parameter("empty θ grid".into()));
    }
    let scenario = scenario_from_game(game)?;
    let omega = omega.to_f64();
    thetas
        .iter()
        .map(|&theta| {
            let state = build_state(&StateKind::Deformed(Box::new(base.clone()), theta))?;
            let pauli_score = pauli_strategy_score(&state, game, exec)?;
            let model = crate::quantum::empirical_model(&state, &scenario)?;
            let ncf = ncf(&model)?.ncf;
            Ok(SweepPoint { theta, pauli_score, ncf, bound: prop4_bound(omega, ncf)? })
        })
        .collect()
}

/// `steps` evenly spaced values from 0 to `theta_max` inclusive.
pub fn theta_grid(theta_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !theta_max.is_finite() {
        return Err(Error::Parameter(format!("bad θ grid: max {theta_max}, {steps} steps")));
    }
    if steps == 1 {
        return Ok(vec![0.0]);
    }
    Ok((0..steps).map(|k| theta_max * k as f64 / (steps - 1) as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cssgame::{InputSet, InputSets, NamedCode};
    use crate::f2::BitVector;
    use crate::quantum::{empirical_model, StateVector};

    fn ghz3_game() -> GameSpec {
        let code = NamedCode::Ghz(3).build().unwrap();
        let inputs = InputSets { x: InputSet::singleton(BitVector::ones(3)), z: InputSet::AllOfImage };
        GameSpec::xor(code, inputs).unwrap()
    }

    #[test]
    fn small_lp() {
        // max x + y, x + 2y <= 4, 3x + y <= 6 → (8/5, 6/5), value 14/5.
        let lp = PackingLp { rows: vec![vec![1.0, 2.0], vec![3.0, 1.0]], bounds: vec![4.0, 6.0], objective: vec![1.0, 1.0] };
        let sol = lp.solve().unwrap();
        assert!((sol.value - 2.8).abs() < 1e-12);
    }

    #[test]
    fn rationalize_simple_values() {
        assert_eq!(rationalize(0.25, 1 << 20, 1e-12).unwrap().to_string(), "1/4");
        assert_eq!(rationalize(1.0 / 3.0, 1 << 20, 1e-12).unwrap().to_string(), "1/3");
        assert!(rationalize(std::f64::consts::PI, 100, 1e-12).is_err());
    }

    #[test]
    fn ghz3_scenario_shape() {
        let s = scenario_from_game(&ghz3_game()).unwrap();
        assert_eq!((s.observables.len(), s.contexts.len()), (6, 4));
    }

    #[test]
    fn ghz3_model_is_fully_contextual() {
        let game = ghz3_game();
        let s = scenario_from_game(&game).unwrap();
        let ghz = build_state(&StateKind::Ghz(3)).unwrap();
        let model = empirical_model(&ghz, &s).unwrap();
        let r = ncf_with(&model, LpMode::Exact).unwrap();
        assert_eq!(r.ncf_exact.as_deref(), Some("0"));
        assert_eq!(r.ncf, 0.0);
    }

    #[test]
    fn product_state_is_noncontextual() {
        let s = scenario_from_game(&ghz3_game()).unwrap();
        let model = empirical_model(&StateVector::zero(3).unwrap(), &s).unwrap();
        let r = ncf_with(&model, LpMode::Exact).unwrap();
        assert_eq!(r.ncf_exact.as_deref(), Some("1"));
        assert!((ncf(&model).unwrap().ncf - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bound_edges() {
        assert_eq!(prop4_bound(0.75, 0.0).unwrap(), 1.0);
        assert_eq!(prop4_bound(0.75, 1.0).unwrap(), 0.75);
        assert!(prop4_bound(0.4, 0.5).is_err());
        assert!(prop4_bound(0.75, 1.5).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = theta_grid(0.5, 21).unwrap();
        assert_eq!((g[0], g[20], g.len()), (0.0, 0.5, 21));
    }
}

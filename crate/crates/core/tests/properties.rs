use num_complex::Complex64;
use proptest::prelude::*;

use csskit::boolfn::{parity_as_integer_sum, BooleanFunction};
use csskit::cssgame::{CssCode, GameSpec, InputSets, NamedCode};
use csskit::graphstate::{
    bell_extraction_circuit, hypergraph_state, is_standard_form, standard_form, walsh_from_symmetries, Hypergraph,
};
use csskit::quantum::{build_state, pauli_strategy_score, StateKind, StateVector};
use csskit::statmech::{self, Honeycomb};
use csskit::strategy::{omega_exact, omega_exact_with, OmegaBudget};
use csskit::{BitMatrix, Exec, Graph};

fn function_strategy() -> impl Strategy<Value = BooleanFunction> {
    (1usize..=10).prop_flat_map(|d| {
        prop::collection::vec(any::<bool>(), 1 << d).prop_map(move |bits| {
            let mut f = BooleanFunction::zero(d);
            for (x, b) in bits.into_iter().enumerate() {
                f.set(x as u64, b);
            }
            f
        })
    })
}

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1usize..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |keep| {
            let pairs = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
            let edges: Vec<_> = pairs.zip(keep).filter(|(_, k)| *k).map(|(e, _)| e).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn state_strategy(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map("zero vector", |amps| {
        let amps = amps.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let mut s = StateVector::from_amplitudes(amps).ok()?;
        s.normalize().ok()?;
        Some(s)
    })
}

fn small_code() -> impl Strategy<Value = NamedCode> {
    prop_oneof![
        (3usize..=5).prop_map(NamedCode::Ghz),
        Just(NamedCode::Cluster1D(4)),
        Just(NamedCode::Cluster1D(6)),
    ]
}

fn invertible(n: usize) -> impl Strategy<Value = BitMatrix> {
    prop::collection::vec(0u64..1 << n, n)
        .prop_map(move |rows| BitMatrix::from_row_masks(n, &rows))
        .prop_filter("singular", |m| m.is_invertible())
}

/// `⟨ψ|Π|ψ⟩` with `Π` the projector onto the joint +1 eigenspace of the
/// stabilizer generators.
fn codespace_weight(state: &StateVector, code: &CssCode) -> f64 {
    let mut projected = state.clone();
    let generators = code.x_rows().into_iter().map(|m| (m, 0)).chain(code.z_rows().into_iter().map(|m| (0, m)));
    for (x, z) in generators {
        let mut flipped = projected.clone();
        flipped.apply_pauli(x, z);
        projected.add_scaled(&flipped, Complex64::new(1.0, 0.0)).unwrap();
        projected.scale(Complex64::new(0.5, 0.0));
    }
    state.inner(&projected).unwrap().re
}

proptest! {
    #[test]
    fn parseval_holds(f in function_strategy()) {
        let d = f.nvars();
        prop_assert_eq!(f.walsh_transform().unwrap().parseval_sum(), 1i128 << (2 * d));
    }

    #[test]
    fn walsh_inverse_recovers_function(f in function_strategy()) {
        prop_assert_eq!(f.walsh_transform().unwrap().inverse().unwrap(), f);
    }

    #[test]
    fn parity_is_an_integer_sum(n in 1usize..=12, x in any::<u64>()) {
        let x = x & ((1 << n) - 1);
        prop_assert_eq!(parity_as_integer_sum(x, n).unwrap(), (x.count_ones() % 2) as i64);
    }

    #[test]
    fn symmetry_walsh_matches_fwht(g in graph_strategy(10)) {
        let n = g.nvertices();
        let w = walsh_from_symmetries(&g).unwrap();
        let fwht = g.function().unwrap().walsh_transform().unwrap();
        prop_assert_eq!(w.spectrum().unwrap(), fwht.clone());
        prop_assert_eq!(w.support_count(), 1u128 << (n - w.n_x));
        prop_assert_eq!(fwht.max_abs(), 1u64 << w.magnitude_log2);
    }

    #[test]
    fn standard_form_is_a_congruence(g in graph_strategy(16)) {
        let b = g.adjacency();
        let sf = standard_form(&b).unwrap();
        let a = &sf.transform;
        prop_assert_eq!(a.mul(&b).unwrap().mul(&a.transpose()).unwrap(), sf.reduced.clone());
        prop_assert!(a.is_invertible());
        prop_assert!(is_standard_form(&sf.reduced, sf.rank2k));
        prop_assert_eq!(sf.rank2k % 2, 0);
        prop_assert_eq!(sf.rank2k, b.rank());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bell_circuit_reaches_bell_pairs(g in graph_strategy(8)) {
        let n = g.nvertices();
        let circuit = bell_extraction_circuit(&g).unwrap();
        let mut state = build_state(&StateKind::Graph(g)).unwrap();
        circuit.apply(&mut state);
        let target = build_state(&StateKind::Graph(circuit.final_graph(n).unwrap())).unwrap();
        prop_assert!(state.distance(&target).unwrap() < 1e-9);
        prop_assert_eq!(2 * circuit.pairs.len() + circuit.isolated.len(), n);
    }

    #[test]
    fn hypergraph_states_are_stabilized(
        n in 2usize..=6,
        edges in prop::collection::vec(1u64..64, 0..6),
        negate in any::<bool>(),
    ) {
        let edges: std::collections::BTreeSet<u64> =
            edges.into_iter().map(|e| e & ((1 << n) - 1)).filter(|&e| e != 0).collect();
        let h = Hypergraph::new(n, edges).unwrap();
        let state = hypergraph_state(&h, negate).unwrap();
        prop_assert!((state.norm() - 1.0).abs() < 1e-12);
        for i in 0..n {
            prop_assert!(h.stabilizer_residual(i).unwrap() < 1e-10);
        }
    }

    #[test]
    fn omega_is_basis_invariant((code, bx, bz) in based_code()) {
        let base = omega_exact(&GameSpec::xor(code.clone(), InputSets::unrestricted()).unwrap()).unwrap().omega;
        let changed = CssCode::new(bx.mul(code.hx()).unwrap(), bz.mul(code.hz()).unwrap()).unwrap();
        let omega = omega_exact(&GameSpec::xor(changed, InputSets::unrestricted()).unwrap()).unwrap().omega;
        prop_assert_eq!(omega, base);
    }

    #[test]
    fn sequential_and_parallel_agree(f in function_strategy(), code in small_code()) {
        prop_assert_eq!(
            f.walsh_transform_with(Exec::Sequential).unwrap(),
            f.walsh_transform_with(Exec::Parallel).unwrap()
        );
        let game = GameSpec::xor(code.build().unwrap(), InputSets::unrestricted()).unwrap();
        let budget = OmegaBudget::default();
        prop_assert_eq!(
            omega_exact_with(&game, &budget, Exec::Sequential).unwrap().omega,
            omega_exact_with(&game, &budget, Exec::Parallel).unwrap().omega
        );
        let codeword = build_state(&StateKind::CssCodeword(game.code().clone())).unwrap();
        let seq = pauli_strategy_score(&codeword, &game, Exec::Sequential).unwrap();
        let par = pauli_strategy_score(&codeword, &game, Exec::Parallel).unwrap();
        prop_assert!((seq - par).abs() < 1e-12);
    }

    #[test]
    fn pauli_score_on_random_states(state in state_strategy(3)) {
        let game = GameSpec::xor(NamedCode::Ghz(3).build().unwrap(), InputSets::unrestricted()).unwrap();
        let score = pauli_strategy_score(&state, &game, Exec::Sequential).unwrap();
        let weight = codespace_weight(&state, game.code());
        prop_assert!((score - 0.5 * (1.0 + weight)).abs() < 1e-10);
    }

    #[test]
    fn loop_walls_have_even_degree(cols in 2usize..=4, rows in 2usize..=4, spins in any::<u64>()) {
        let lattice = Honeycomb::new(cols, rows).unwrap();
        let spins = spins & ((1 << lattice.cells()) - 1);
        prop_assert!(lattice.wall_degrees(spins).iter().all(|d| d % 2 == 0));
    }

    #[test]
    fn ghz_transfer_matches_fwht(n in 2usize..=10, y in any::<u64>()) {
        let y = y & ((1 << n) - 1);
        let spectrum = statmech::ghz_chain_function(n).unwrap().walsh_transform().unwrap();
        let value = statmech::ghz_walsh_via_transfer(n, y).unwrap();
        prop_assert_eq!(value, spectrum.get(y) as i128);
        prop_assert!(statmech::ghz_walsh_allowed(n, value));
    }

    #[test]
    fn game_summary_round_trips(code in small_code(), sub in any::<bool>()) {
        let c = code.build().unwrap();
        let game = if sub {
            GameSpec::submeasurement(c, InputSets::unrestricted()).unwrap()
        } else {
            GameSpec::xor(c, InputSets::unrestricted()).unwrap()
        };
        let json = serde_json::to_string(&game.summary()).unwrap();
        let back = GameSpec::from_summary(&serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(back.target(), game.target());
        prop_assert_eq!(back.mode(), game.mode());
    }
}

/// A code together with invertible changes of basis for its X and Z rows.
fn based_code() -> impl Strategy<Value = (CssCode, BitMatrix, BitMatrix)> {
    small_code().prop_flat_map(|named| {
        let code = named.build().unwrap();
        let (rx, rz) = (code.hx().rows(), code.hz().rows());
        (Just(code), invertible(rx), invertible(rz))
    })
}

#[test]
fn cluster_trace_matches_brute_force() {
    for n in 3..=14 {
        assert_eq!(statmech::cluster_w00(n).unwrap(), statmech::cluster_w00_brute(n, Exec::default()).unwrap(), "n = {n}");
    }
    for n in 2..=12 {
        let t = statmech::golden_transfer_matrix().pow(n).trace();
        assert_eq!(statmech::cz_ring_sum_brute(n).unwrap(), (1i128 << n) * t, "n = {n}");
    }
}

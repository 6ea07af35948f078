mod common;

use common::dense;
use ghzx_core::*;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn resource(n: usize, ring: bool) -> StabilizerState {
    make_linear_cluster(&LinearClusterSpec::new(n, ring).unwrap())
}

fn corrected(ex: &Extraction, vg: &[usize]) -> StabilizerState {
    let c = synthesize_corrections(&ex.post_state, vg).unwrap();
    let mut s = ex.post_state.clone();
    c.apply(&mut s).unwrap();
    s
}

fn is_target(s: &StabilizerState, vg: &[usize]) -> bool {
    s.same_state(&make_ghz(&GhzSpec::new(vg.to_vec()).unwrap()))
}

fn feasible_plans(n: usize, ring: bool) -> Vec<ExtractionPlan> {
    if ring && n < 3 {
        return Vec::new();
    }
    (2..=n)
        .flat_map(|m| enumerate_feasible(n, m, ring).unwrap())
        .map(|vg| synthesize_pattern(n, &vg, ring).unwrap())
        .collect()
}

/// Fidelity with GHZ of the corrected reduced density matrix, from a dense
/// simulation of the same measurement record.
fn dense_fidelity(plan: &ExtractionPlan, ex: &Extraction) -> f64 {
    let mut d = dense::cluster(plan.n, plan.ring);
    for &v in &ex.record.order {
        let obs = PauliOperator::single(plan.n, v - 1, plan.basis[&v]).unwrap();
        let p = d.project(&obs, ex.record.outcomes[&v].is_minus());
        assert!(p > 1e-9, "tableau chose an impossible outcome");
    }
    let keep: Vec<usize> = plan.vg.iter().map(|v| v - 1).collect();
    let rho = d.reduced(&keep);
    let c = synthesize_corrections(&ex.post_state, &plan.vg).unwrap();
    let mut phi = dense::ghz(plan.vg.len());
    for (i, g) in c.0.values().enumerate() {
        phi.apply_1q(i, &dense::dagger(&dense::clifford_matrix(g)));
    }
    let mut f = C::new(0.0, 0.0);
    for a in 0..phi.amp.len() {
        for b in 0..phi.amp.len() {
            f += phi.amp[a].conj() * rho[a][b] * phi.amp[b];
        }
    }
    f.re
}

#[test]
fn dense_simulation_confirms_every_branch() {
    for ring in [false, true] {
        for n in 2..=6 {
            for plan in feasible_plans(n, ring) {
                let first = extract(&resource(n, ring), &plan, Outcomes::Branch(0)).unwrap();
                for bits in 0..1u64 << first.record.random.len() {
                    let ex = extract(&resource(n, ring), &plan, Outcomes::Branch(bits)).unwrap();
                    let f = dense_fidelity(&plan, &ex);
                    assert!((f - 1.0).abs() < 1e-9, "n={n} ring={ring} vg={:?} bits={bits}: {f}", plan.vg);
                }
            }
        }
    }
}

#[test]
fn random_plans_land_on_ghz() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let pool: Vec<ExtractionPlan> = (1..=8)
        .flat_map(|n| [false, true].into_iter().flat_map(move |r| feasible_plans(n, r)))
        .collect();
    for _ in 0..1000 {
        let plan = pool.choose(&mut rng).unwrap();
        let ex = extract(&resource(plan.n, plan.ring), plan, Outcomes::Random(&mut rng)).unwrap();
        assert!(is_target(&corrected(&ex, &plan.vg), &plan.vg), "{plan:?}");
    }
}

#[test]
fn measurement_order_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 3..=9 {
        for plan in feasible_plans(n, false).into_iter().filter(|p| p.measured().len() >= 2) {
            for _ in 0..4 {
                let mut order = plan.measurement_order();
                order.shuffle(&mut rng);
                let opts = ExtractOptions {
                    frame: None,
                    order: Some(order.clone()),
                };
                let ex = extract_with(&resource(n, false), &plan, &opts, Outcomes::Random(&mut rng)).unwrap();
                assert_eq!(ex.record.order, order);
                assert!(is_target(&corrected(&ex, &plan.vg), &plan.vg));
            }
        }
    }
}

#[test]
fn forced_records_replay() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for plan in feasible_plans(8, false).into_iter().step_by(7) {
        let a = extract(&resource(8, false), &plan, Outcomes::Random(&mut rng)).unwrap();
        let b = extract(&resource(8, false), &plan, Outcomes::Forced(&a.record.outcomes)).unwrap();
        assert_eq!(a.record, b.record);
        assert!(a.post_state.same_state(&b.post_state));
    }
}

fn random_local_cliffords(s: &mut StabilizerState, rng: &mut ChaCha8Rng) {
    for q in 0..s.num_qubits() {
        let g = SingleQubitClifford::all()[rng.gen_range(0..24)];
        s.apply_clifford(q, &g).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ghz_class_is_local_clifford_invariant(m in 1usize..9, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = ghz(m);
        random_local_cliffords(&mut s, &mut rng);
        prop_assert!(is_ghz_class(&s).unwrap());
        let mut t = resource(m.max(4), false);
        random_local_cliffords(&mut t, &mut rng);
        prop_assert!(!is_ghz_class(&t).unwrap());
    }

    #[test]
    fn corrections_absorb_local_frames(n in 3usize..10, seed in any::<u64>()) {
        // a random local frame on the resource changes the physical bases
        // but not the extracted state up to the synthesized corrections
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame: Vec<SingleQubitClifford> =
            (0..n).map(|_| SingleQubitClifford::all()[rng.gen_range(0..24)]).collect();
        let mut res = resource(n, false);
        for (q, g) in frame.iter().enumerate() {
            res.apply_clifford(q, g).unwrap();
        }
        let plan = maximal_pattern(n, false).unwrap();
        let ex = extract_in_frame(&res, &plan, &frame, Outcomes::Random(&mut rng)).unwrap();
        prop_assert!(is_target(&corrected(&ex, &plan.vg), &plan.vg));
    }
}

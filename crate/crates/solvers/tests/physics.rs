use isingbench_core::{generate, Family, InstanceSpec};
use isingbench_solvers::{pt_icm_with_diagnostics, BetaLadder, PtIcmParams};

fn cbfm_p(m: usize, seed: u64) -> isingbench_core::IsingModel {
    generate(&InstanceSpec {
        family: Family::CbfmP,
        m,
        seed,
        mask: None,
    })
    .unwrap()
}

#[test]
fn cluster_moves_are_isoenergetic_on_size_4() {
    let mut checked = 0;
    for seed in 0..3 {
        let model = cbfm_p(4, seed);
        let p = PtIcmParams {
            rounds: 20,
            check_invariants: true,
            ..PtIcmParams::default()
        };
        let (trace, diag) = pt_icm_with_diagnostics(&model, &p, seed).unwrap();
        trace.validate(&model).unwrap();
        assert_eq!(diag.overlap_violations, 0);
        assert!(diag.max_energy_sum_error <= 1e-9, "{}", diag.max_energy_sum_error);
        checked += diag.icm_checked;
    }
    assert!(checked >= 1000, "{checked}");
}

#[test]
fn tuned_ladder_swap_rates_on_size_16() {
    let model = cbfm_p(16, 3);
    let p = PtIcmParams {
        betas: BetaLadder::Tuned,
        rounds: 1000,
        ..PtIcmParams::default()
    };
    let (_, diag) = pt_icm_with_diagnostics(&model, &p, 1).unwrap();
    let median = diag.median_swap_rate();
    assert!((0.1..=0.4).contains(&median), "median swap rate {median}");
}

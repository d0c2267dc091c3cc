use isingbench_core::{brute_force, random_graph_instance, Family, IsingModel};
use isingbench_solvers::{glauber, simulated_annealing, tabu, AnnealParams, SolverBudget, TabuParams};

fn instances() -> Vec<(IsingModel, f64)> {
    (0..50)
        .map(|seed| {
            let m = random_graph_instance(Family::CbfmP, 16, 0.3, seed).unwrap();
            let e = brute_force(&m).unwrap().energy;
            (m, e)
        })
        .collect()
}

fn hits(set: &[(IsingModel, f64)], run: impl Fn(&IsingModel, u64) -> f64) -> usize {
    set.iter()
        .enumerate()
        .filter(|(k, (m, e))| (run(m, *k as u64) - e).abs() <= 1e-9)
        .count()
}

#[test]
fn glauber_1000_restarts() {
    let set = instances();
    let h = hits(&set, |m, s| glauber(m, &SolverBudget::restarts(1000), s).unwrap().best_energy);
    assert!(h >= 45, "{h}/50");
}

#[test]
fn tabu_64_reads() {
    let set = instances();
    let p = TabuParams {
        reads: 64,
        ..TabuParams::default()
    };
    let h = hits(&set, |m, s| tabu(m, &p, s).unwrap().best_energy);
    assert!(h >= 45, "{h}/50");
}

#[test]
fn annealing_100_reads_1000_sweeps() {
    let set = instances();
    let p = AnnealParams {
        reads: 100,
        sweeps: 1000,
        ..AnnealParams::default()
    };
    let h = hits(&set, |m, s| simulated_annealing(m, &p, s).unwrap().best_energy);
    assert!(h >= 48, "{h}/50");
}

#[test]
fn no_solver_beats_the_oracle() {
    for (m, e) in instances().iter().take(10) {
        let t = glauber(m, &SolverBudget::restarts(5), 0).unwrap();
        assert!(t.best_energy >= *e - 1e-9);
    }
}

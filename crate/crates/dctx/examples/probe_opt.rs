use dctx::linalg::ComplexVector;
use dctx::observables::kcbs_optimal_qutrit;
use dctx::optimizer::{optimize_pentagram, OptimizerConfig};
use std::time::Instant;

fn main() {
    let (_, state) = kcbs_optimal_qutrit();
    let rho3 = state.projector();
    let s = 1.0 / 2f64.sqrt();
    let states4 = [
        ("psi-", ComplexVector::from_real(&[0.0, s, -s, 0.0])),
        ("psi+", ComplexVector::from_real(&[0.0, s, s, 0.0])),
        ("phi+", ComplexVector::from_real(&[s, 0.0, 0.0, s])),
        ("phi-", ComplexVector::from_real(&[s, 0.0, 0.0, -s])),
    ];
    let target = 5.0 - 4.0 * 5f64.sqrt();
    for restarts in [8usize, 16, 64] {
        let cfg = OptimizerConfig { restarts, seed: 1, ..OptimizerConfig::default() };
        let t0 = Instant::now();
        let (_, v) = optimize_pentagram(&rho3, &cfg).unwrap();
        println!("qutrit restarts={restarts:3} gap={:+.2e} time={:?}", v - target, t0.elapsed());
    }
    for (name, v4) in &states4 {
        let rho = v4.projector();
        for restarts in [16usize, 64] {
            let cfg = OptimizerConfig { restarts, seed: 1, ..OptimizerConfig::default() };
            let t0 = Instant::now();
            let (_, v) = optimize_pentagram(&rho, &cfg).unwrap();
            println!("{name} restarts={restarts:3} gap={:+.2e} time={:?}", v - target, t0.elapsed());
        }
    }
}

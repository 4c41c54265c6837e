//! Fits a single ε-SVR with each kernel on a noisy sine and reports the
//! solver's convergence certificate.

use forecast_bench::svr::{self, KernelSpec, SvrConfig};

fn main() -> anyhow::Result<()> {
    let xs: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 / 39.0]).collect();
    let ys: Vec<f64> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| (6.0 * x[0]).sin() * 0.4 + 0.5 + 0.02 * ((i * 7 % 5) as f64 - 2.0))
        .collect();

    for kernel in [KernelSpec::linear(), KernelSpec::rbf(10.0), KernelSpec::sigmoid(1.0, 0.0)] {
        let cfg = SvrConfig::new(kernel, 10.0).with_epsilon(0.05);
        let fit = svr::fit(&xs, &ys, &cfg)?;
        println!(
            "{:<7} iterations {:>5}  KKT gap {:.1e}  objective {:>9.4}  SVs {:>2}  f(0.5) = {:.4}",
            kernel.kind.name(),
            fit.iterations,
            fit.kkt_gap,
            fit.objective,
            fit.model.support_vectors.len(),
            fit.model.predict(&[0.5])?
        );
    }
    Ok(())
}

//! Fit a Matérn 5/2 GP to noisy 1-D data, tune it by marginal likelihood,
//! and print the posterior on a grid.
//!
//! Run with `cargo run --example gp_regression`.

use cbo::gp::{optimize_hyperparameters, HyperparameterBounds, KernelKind};
use cbo::{GpModel, KernelSpec};

fn main() -> cbo::Result<()> {
    let inputs: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64 * 0.5]).collect();
    let targets: Vec<f64> = inputs
        .iter()
        .enumerate()
        .map(|(i, x)| x[0].sin() + 0.05 * ((i * 7 % 5) as f64 - 2.0))
        .collect();

    let naive = GpModel::fit(KernelSpec::matern52(1.0, 1.0)?, 1e-2, inputs.clone(), targets.clone())?;
    println!("default hyperparameters: LML {:.4}", naive.log_marginal_likelihood());

    let fit = optimize_hyperparameters(
        KernelKind::Matern52,
        &inputs,
        &targets,
        &HyperparameterBounds::default(),
        0,
    )?;
    println!(
        "tuned: {:?}, noise {:.2e}, LML {:.4}",
        fit.kernel, fit.noise_variance, fit.log_marginal_likelihood
    );
    let model = GpModel::fit(fit.kernel, fit.noise_variance, inputs, targets)?;

    println!("{:>6} {:>9} {:>9} {:>9}", "x", "sin(x)", "mean", "std");
    for i in 0..=14 {
        let x = i as f64 * 0.5;
        let (mu, sd) = model.predict(&[x])?;
        println!("{x:>6.2} {:>9.4} {mu:>9.4} {sd:>9.4}", x.sin());
    }
    Ok(())
}

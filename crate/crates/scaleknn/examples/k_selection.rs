//! Leave-one-out cross-validation of the neighborhood size: the f(k) curve
//! trades noise (small k) against smoothing bias (large k), and constant
//! responses drive the rule to the largest candidate.
//!
//!     cargo run --release --example k_selection

use scaleknn::sim::{generate, ScenarioSpec};
use scaleknn::{default_k_grid, select_k, Dataset};

fn main() -> scaleknn::Result<()> {
    let spec = ScenarioSpec::new(1, 3)?;
    let data = generate(&spec, 800, 5)?;
    let rows: Vec<usize> = (0..data.n()).collect();
    let grid = default_k_grid(data.n());
    let trace = select_k(&data, &rows, &[1, 2], data.response(), &grid)?;

    println!("leave-one-out risk f(k) on {} rows (support x2, x3):", data.n());
    for (k, score) in trace.grid.iter().zip(&trace.scores) {
        if [1, 2, 5, 10, 20, 50, 100, 200, 400, 799].contains(k) {
            let marker = if *k == trace.chosen { "  <- chosen" } else { "" };
            println!("  k = {k:>4}: f(k) = {score:.4}{marker}");
        }
    }
    println!("chosen k = {}", trace.chosen);

    // Constant responses: every k has zero risk; ties resolve to the top.
    let flat = Dataset::new(
        data.gather(&rows, &[0, 1, 2]),
        3,
        vec![2.0; data.n()],
        data.feature_names().to_vec(),
    )?;
    let flat_trace = select_k(&flat, &rows, &[1, 2], flat.response(), &grid)?;
    println!(
        "constant responses choose the largest candidate: k = {}",
        flat_trace.chosen
    );
    Ok(())
}

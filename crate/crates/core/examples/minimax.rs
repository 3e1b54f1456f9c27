//! Zero-sum matrix games by linear programming.

use sgl::game::{blotto_4_3, rps};
use sgl::solvers::minimax_zero_sum_matrix;

fn main() -> sgl::Result<()> {
    let sol = minimax_zero_sum_matrix(&rps())?;
    println!("RPS value {} row {:?} col {:?}", sol.value, sol.row.probs(), sol.col.probs());
    let sol = minimax_zero_sum_matrix(&blotto_4_3())?;
    println!("Blotto value {:.12} (14/9 = {:.12})", sol.value, 14.0 / 9.0);
    println!("  row {:?}", sol.row.probs());
    println!("  col {:?}", sol.col.probs());
    Ok(())
}

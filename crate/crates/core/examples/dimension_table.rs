//! Dimensional thresholds δ(d) for d = 3..6, printed at four decimals.

use ellipcert::cli::dimension_table_rows;

fn main() {
    println!("{:>2}  {:>8}  {:>10}  {:>8}", "d", "delta", "-1/ln", "rho");
    for (d, delta, inv, rho) in dimension_table_rows() {
        println!("{d:>2}  {delta:>8.4}  {inv:>10.4}  {rho:>8.4}");
    }
}

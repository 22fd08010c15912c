//! The four connexive calculi side by side on a few formulas.

use connexive::prover::{separation_matrix, SearchConfig, SEPARATION_CALCULI};
use connexive::parse;

fn main() {
    let formulas: Vec<_> = [
        "~p | p",
        "((p -> q) -> p) -> p",
        "(p -> q) | (q -> p)",
        "~(p & ~p)",
        "~(p -> q) -> (p -> ~q)",
        "(p -> q) -> ~(p -> ~q)",
    ]
    .iter()
    .map(|t| parse(t).unwrap())
    .collect();

    let rows = separation_matrix(&formulas, &SearchConfig::default()).unwrap();
    let names: Vec<_> = SEPARATION_CALCULI.iter().map(|c| format!("{:>5}", c.to_string())).collect();
    println!("{:<28}{}", "formula", names.join(""));
    for row in rows {
        let cells: Vec<_> = row.cells.iter().map(|c| format!("{:>5}", c.symbol())).collect();
        println!("{:<28}{}", row.formula.to_string(), cells.join(""));
    }
}

//! Proves the characteristic connexive theses in sC and prints each proof.

use connexive::prover::{decide, SearchConfig};
use connexive::{check_proof, parse, CalculusId, Sequent};

fn main() {
    let cfg = SearchConfig::default();
    for text in ["(p -> q) -> ~(p -> ~q)", "(p -> ~q) -> ~(p -> q)", "~(p -> ~p)", "~(~p -> p)"] {
        let goal = Sequent::goal(parse(text).unwrap());
        let res = decide(CalculusId::Sc, &goal, &cfg).unwrap();
        let proof = res.proof().expect("connexive thesis");
        let report = check_proof(CalculusId::Sc, proof);
        println!(
            "{goal}\n  {} nodes, height {}, cut-free: {}, checker: {} ({} nodes visited)",
            proof.node_count(),
            proof.height(),
            proof.is_cut_free(),
            if report.is_valid() { "valid" } else { "INVALID" },
            report.nodes_checked,
        );
    }

    // Not a thesis: implication and its connexive negation come apart.
    let bad = Sequent::goal(parse("(p -> q) -> (p -> ~q)").unwrap());
    println!("{bad}: {}", decide(CalculusId::Sc, &bad, &cfg).unwrap().cell());
}

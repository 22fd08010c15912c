//! Glues two proofs with a cut, then asks for a cut-free proof of the result.

use connexive::prover::{decide, eliminate_cut, SearchConfig};
use connexive::sequent::{Principal, RuleId};
use connexive::{check_proof, parse, parse_sequent, CalculusId, SequentProof};

fn main() {
    let cfg = SearchConfig::default();
    let calc = CalculusId::Sc3;
    let cut_formula = parse("~q | q").unwrap();

    let left = decide(calc, &parse_sequent("p => ~q | q").unwrap(), &cfg).unwrap();
    let right = decide(calc, &parse_sequent("p, ~q | q => ~(p -> ~(~q | q))").unwrap(), &cfg).unwrap();
    let (Some(l), Some(r)) = (left.proof(), right.proof()) else {
        panic!("premises should be provable");
    };
    let with_cut = SequentProof::new(
        parse_sequent("p => ~(p -> ~(~q | q))").unwrap(),
        RuleId::Cut,
        Principal::One(cut_formula),
        vec![l.clone(), r.clone()],
    );
    println!("with cut: {} nodes, valid: {}", with_cut.node_count(), check_proof(calc, &with_cut).is_valid());

    let free = eliminate_cut(calc, &with_cut, &cfg).unwrap();
    println!(
        "cut-free: {} nodes, valid: {}, rules: {:?}",
        free.node_count(),
        check_proof(calc, &free).is_valid(),
        free.rules_used().iter().map(|r| r.as_str()).collect::<Vec<_>>()
    );
}

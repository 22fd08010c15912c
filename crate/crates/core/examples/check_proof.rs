//! Builds a small sC proof by hand, serializes it, and runs the checker on
//! both the proof and a tampered copy.

use connexive::sequent::{Principal, RuleId};
use connexive::{check_proof, parse, parse_sequent, CalculusId, SequentProof};

fn main() {
    let leaf = |s: &str, rule| SequentProof::leaf(parse_sequent(s).unwrap(), rule);

    // p & q => q & p
    let right = SequentProof::new(
        parse_sequent("p, q => q & p").unwrap(),
        RuleId::AndRight,
        Principal::One(parse("q & p").unwrap()),
        vec![leaf("p, q => q", RuleId::Init1), leaf("p, q => p", RuleId::Init1)],
    );
    let proof = SequentProof::new(
        parse_sequent("p & q => q & p").unwrap(),
        RuleId::AndLeft,
        Principal::One(parse("p & q").unwrap()),
        vec![right],
    );

    let json = proof.to_json_string();
    println!("{json}");
    let back = SequentProof::from_json_str(&json, false).unwrap();
    println!("sc: {:?}", check_proof(CalculusId::Sc, &back).into_result());

    let mut broken = back.clone();
    broken.premises[0].premises[1] = leaf("p, q => q", RuleId::Init1);
    match check_proof(CalculusId::Sc, &broken).into_result() {
        Ok(()) => println!("tampered proof accepted?"),
        Err(fault) => println!("tampered: {fault}"),
    }
}

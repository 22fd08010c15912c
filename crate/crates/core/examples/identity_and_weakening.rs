use std::collections::BTreeSet;

use connexive::sequent::{identity_proof, weaken_proof};
use connexive::{check_proof, parse, CalculusId};

fn main() {
    let a = parse("~(p -> ~q) & (r | ~~s)").unwrap();
    let ctx = BTreeSet::from([parse("t").unwrap()]);
    let id = identity_proof(CalculusId::Sc, &a, &ctx).unwrap();
    println!("identity: {} ({} nodes, valid: {})", id.conclusion, id.node_count(), check_proof(CalculusId::Sc, &id).is_valid());

    let extra = BTreeSet::from([parse("~u").unwrap(), parse("u -> v").unwrap()]);
    let w = weaken_proof(CalculusId::Sc, &id, &extra).unwrap();
    println!("weakened: {} ({} nodes, valid: {})", w.conclusion, w.node_count(), check_proof(CalculusId::Sc, &w).is_valid());

    // LJ+ has no connexive negation.
    println!("ljp: {}", identity_proof(CalculusId::Ljp, &a, &ctx).unwrap_err());
}

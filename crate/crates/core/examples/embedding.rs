//! The `~`-eliminating translation and the agreement between sMC and
//! LJ+ with Peirce's rule.

use connexive::embedding::{embed_check, translate_f};
use connexive::prover::SearchConfig;
use connexive::{parse, Sequent};

fn main() {
    let cfg = SearchConfig::default();
    for text in ["~(p -> q)", "~(p & ~q) -> ~p | q", "((p -> q) -> p) -> p", "~~p -> p", "~p | p", "(p -> q) -> ~(p -> ~q)"] {
        let phi = parse(text).unwrap();
        let t = translate_f(&phi).unwrap();
        let r = embed_check(&Sequent::goal(phi), &cfg).unwrap();
        println!("{text:<24} f = {:<28} sMC {}  LJ+P {}  agree {}", t.to_string(), r.source_verdict, r.target_verdict, r.agree());
    }
}

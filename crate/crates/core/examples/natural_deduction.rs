//! Natural deduction: build, check, inspect open assumptions, and show a
//! scoping error.

use connexive::natded::{check_derivation, is_normal, open_assumptions, Derivation, NdRuleId, NdSystemId};
use connexive::parse;

fn main() {
    let f = |s: &str| parse(s).unwrap();

    // [p]^1 / ~~p / ~(p -> ~p), discharging 1
    let p = Derivation::assume_labeled(f("p"), 1);
    let nn = Derivation::node(NdRuleId::NegNegI, f("~~p"), vec![p]);
    let aristotle = Derivation::discharging(NdRuleId::NegImpI, f("~(p -> ~p)"), 1, vec![nn]);
    println!("{aristotle}");
    println!("valid in nC: {}, closed: {}, normal: {}", check_derivation(NdSystemId::Nc, &aristotle).is_valid(), open_assumptions(&aristotle).is_empty(), is_normal(&aristotle));

    // (EM) discharges ~p in one branch and p in the other.
    let q = |a: &str| {
        let pair = Derivation::node(NdRuleId::AndI, f(&format!("{a} & q")), vec![Derivation::assume_labeled(f(a), 2), Derivation::assume(f("q"))]);
        Derivation::node(NdRuleId::AndE2, f("q"), vec![pair])
    };
    let em = Derivation::discharging(NdRuleId::Em, f("q"), 2, vec![q("~p"), q("p")]);
    for sys in NdSystemId::ALL {
        match check_derivation(sys, &em).into_result() {
            Ok(()) => println!("{sys}: valid, open {:?}", open_assumptions(&em).iter().map(|a| a.to_string()).collect::<Vec<_>>()),
            Err(fault) => println!("{sys}: {fault}"),
        }
    }

    // A label used outside the scope of its discharge.
    let stray = Derivation::node(NdRuleId::AndI, f("p & ~(p -> ~p)"), vec![Derivation::assume_labeled(f("p"), 1), aristotle]);
    println!("stray label: {}", check_derivation(NdSystemId::Nc, &stray).into_result().unwrap_err());

    println!("{}", em.to_json_string());
}

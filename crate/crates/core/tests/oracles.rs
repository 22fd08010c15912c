mod common;

use connexive::prover::{decide, Cell, SearchConfig};
use connexive::random::{seeded, FormulaGen};
use connexive::sequent::{check_proof, CalculusId, Sequent};

fn agree_on(calc: CalculusId, gen: &FormulaGen, seed: u64, count: usize, expected: impl Fn(&Sequent) -> bool) {
    let mut rng = seeded(seed);
    let cfg = SearchConfig::default();
    let mut provable = 0;
    for _ in 0..count {
        let s = gen.sequent(&mut rng, 2, 6);
        let res = decide(calc, &s, &cfg).unwrap();
        assert_ne!(res.cell(), Cell::ResourceExceeded, "{calc}: {s}");
        assert_eq!(res.is_provable(), expected(&s), "{calc}: {s}");
        if let Some(p) = res.proof() {
            provable += 1;
            assert!(p.is_cut_free());
            assert!(check_proof(calc, p).is_valid(), "{calc}: {s}");
            assert_eq!(p.conclusion, s);
        }
    }
    assert!(provable > 0, "{calc}: no provable sample");
}

#[test]
fn connexive_calculi_match_translation_oracle() {
    let gen = FormulaGen::default();
    for (i, calc) in CalculusId::CONNEXIVE.into_iter().enumerate() {
        agree_on(calc, &gen, 100 + i as u64, 300, |s| common::oracle(calc, s));
    }
}

#[test]
fn positive_calculi_match_direct_oracles() {
    let gen = FormulaGen { weights: [0, 2, 2, 3], ..FormulaGen::default() };
    agree_on(CalculusId::Ljp, &gen, 200, 300, |s| {
        common::intuitionistic(&s.ctx.iter().cloned().collect::<Vec<_>>(), &s.suc)
    });
    agree_on(CalculusId::LjpPeirce, &gen, 201, 300, |s| common::classical(s, false));
}

#[test]
fn starred_direct_search_matches_oracle() {
    let gen = FormulaGen::default();
    let cfg = SearchConfig { allow_g_ex_middle_direct: true, ..SearchConfig::default() };
    let mut rng = seeded(300);
    for calc in [CalculusId::SmcStar, CalculusId::ScnStar] {
        for _ in 0..150 {
            let s = gen.sequent(&mut rng, 1, 5);
            let res = decide(calc, &s, &cfg).unwrap();
            assert_eq!(res.is_provable(), common::oracle(calc, &s), "{calc}: {s}");
            if let Some(p) = res.proof() {
                assert!(check_proof(calc, p).is_valid());
            }
        }
    }
}

#[test]
fn oracles_agree_on_known_cases() {
    use connexive::parse;
    let goal = |t: &str| Sequent::goal(parse(t).unwrap());
    assert!(!common::oracle(CalculusId::Sc, &goal("~p | p")));
    assert!(common::oracle(CalculusId::Sc3, &goal("~p | p")));
    assert!(common::oracle(CalculusId::Smc, &goal("((p -> q) -> p) -> p")));
    assert!(!common::oracle(CalculusId::Sc3, &goal("((p -> q) -> p) -> p")));
    assert!(common::oracle(CalculusId::Scn, &goal("~p | p")));
    assert!(!common::oracle(CalculusId::Smc, &goal("~p | p")));
    assert!(common::oracle(CalculusId::Sc, &goal("~(p -> ~p)")));
}

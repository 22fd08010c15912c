//! The eight acceptance criteria, one verdict line each.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use connexive::bridge::{nd_to_sc, normalize, sc_to_nd};
use connexive::embedding::translate_f;
use connexive::formula::{parse, Formula};
use connexive::natded::{check_derivation, is_normal, open_assumptions, NdSystemId};
use connexive::prover::{decide, Cell, ExMiddleScope, SearchConfig, SEPARATION_CALCULI};
use connexive::random::{seeded, DerivationGen, FormulaGen};
use connexive::reduction::{normalize_by_reduction, DEFAULT_MAX_STEPS};
use connexive::sequent::{check_proof, CalculusId, Sequent};

type Outcome = Result<String, String>;

fn cell(calc: CalculusId, s: &Sequent, cfg: &SearchConfig) -> Cell {
    decide(calc, s, cfg).expect("language ok").cell()
}

fn connexive_theses() -> Outcome {
    let start = Instant::now();
    let cfg = SearchConfig::default();
    for text in ["(p -> q) -> ~(p -> ~q)", "(p -> ~q) -> ~(p -> q)", "~(p -> ~p)"] {
        let s = Sequent::goal(parse(text).unwrap());
        let res = decide(CalculusId::Sc, &s, &cfg).unwrap();
        let Some(p) = res.proof() else { return Err(format!("{text}: {}", res.cell())) };
        if !check_proof(CalculusId::Sc, p).is_valid() || !p.is_cut_free() {
            return Err(format!("{text}: proof rejected"));
        }
    }
    let t = start.elapsed();
    if t >= Duration::from_secs(1) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("3 theses provable in sC, proofs valid and cut-free, {t:?}"))
}

fn separation() -> Outcome {
    use Cell::{Provable as Y, Unprovable as N};
    let start = Instant::now();
    let cfg = SearchConfig::default();
    let expected = [("~p | p", [N, Y, N, Y]), ("((p -> q) -> p) -> p", [N, N, Y, Y])];
    for (text, row) in expected {
        let s = Sequent::goal(parse(text).unwrap());
        let got: Vec<Cell> = SEPARATION_CALCULI.iter().map(|&c| cell(c, &s, &cfg)).collect();
        if got != row {
            return Err(format!("{text}: got {got:?}, expected {row:?}"));
        }
    }
    let t = start.elapsed();
    if t >= Duration::from_secs(10) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("LEM NYNY, Peirce NNYY, all negatives definitive, {t:?}"))
}

fn star_equivalence() -> Outcome {
    let g = FormulaGen::default();
    let mut rng = seeded(3);
    let cfg = SearchConfig::default();
    let direct = SearchConfig { allow_g_ex_middle_direct: true, ..SearchConfig::default() };
    let mut provable = 0;
    for _ in 0..500 {
        let s = Sequent::goal(g.up_to(&mut rng, 10));
        for (plain, star) in [(CalculusId::Smc, CalculusId::SmcStar), (CalculusId::Scn, CalculusId::ScnStar)] {
            let (a, b) = (cell(plain, &s, &cfg), cell(star, &s, &direct));
            if a != b || a == Cell::ResourceExceeded {
                return Err(format!("{s}: {plain} {a}, {star} {b}"));
            }
            provable += usize::from(a == Cell::Provable);
        }
    }
    Ok(format!("500 formulas x 2 pairs agree ({provable} provable), starred side searched with (g-ex-middle)"))
}

fn cut_admissibility() -> Outcome {
    let g = FormulaGen::default();
    let mut rng = seeded(4);
    let cfg = SearchConfig::default();
    let mut live = 0;
    for _ in 0..300 {
        let ctx: Vec<Formula> = (0..rand::Rng::gen_range(&mut rng, 0..=2)).map(|_| g.up_to(&mut rng, 6)).collect();
        let alpha = g.up_to(&mut rng, 6);
        let gamma = g.up_to(&mut rng, 6);
        let left = Sequent::new(ctx.clone(), alpha.clone());
        let right = Sequent::new(ctx.iter().cloned().chain([alpha.clone()]), gamma.clone());
        let goal = Sequent::new(ctx.clone(), gamma.clone());
        for calc in CalculusId::CONNEXIVE {
            if cell(calc, &left, &cfg) == Cell::Provable && cell(calc, &right, &cfg) == Cell::Provable {
                live += 1;
                if cell(calc, &goal, &cfg) != Cell::Provable {
                    return Err(format!("{calc}: cut on {alpha} fails for {goal}"));
                }
            }
        }
    }
    Ok(format!("300 triples x 6 calculi, {live} with both premises provable, no counterexample"))
}

fn embedding() -> Outcome {
    let g = FormulaGen::default();
    let mut rng = seeded(5);
    let cfg = SearchConfig::default();
    let mut provable = 0;
    for _ in 0..300 {
        let phi = g.up_to(&mut rng, 8);
        let a = cell(CalculusId::Smc, &Sequent::goal(phi.clone()), &cfg);
        let b = cell(CalculusId::LjpPeirce, &Sequent::goal(translate_f(&phi).unwrap()), &cfg);
        if a != b || a == Cell::ResourceExceeded {
            return Err(format!("{phi}: sMC {a}, LJ+ + Peirce {b}"));
        }
        provable += usize::from(a == Cell::Provable);
    }
    Ok(format!("300 formulas agree ({provable} provable)"))
}

fn bridge() -> Outcome {
    let gen = DerivationGen::default();
    let mut rng = seeded(6);
    for sys in NdSystemId::ALL {
        for _ in 0..200 {
            let d = gen.derivation(&mut rng, sys);
            if !check_derivation(sys, &d).is_valid() || d.node_count() > 15 {
                return Err(format!("{sys}: generator produced a bad derivation"));
            }
            let p = nd_to_sc(sys, &d).map_err(|e| e.to_string())?;
            let want = Sequent { ctx: open_assumptions(&d), suc: d.formula.clone() };
            if !check_proof(sys.paired(), &p).is_valid() || p.conclusion != want {
                return Err(format!("{sys}: nd_to_sc output rejected for\n{d}"));
            }
        }
    }
    let g = FormulaGen::default();
    let cfg = SearchConfig::default();
    let calcs = [CalculusId::Sc, CalculusId::Sc3, CalculusId::Smc, CalculusId::Scn, CalculusId::SmcStar, CalculusId::ScnStar];
    let mut translated = 0;
    let mut tries = 0;
    while translated < 200 * calcs.len() {
        tries += 1;
        if tries > 100_000 {
            return Err("too few provable sequents".into());
        }
        let s = g.sequent(&mut rng, 2, 6);
        let calc = calcs[translated % calcs.len()];
        let res = decide(calc, &s, &cfg).unwrap();
        let Some(p) = res.proof() else { continue };
        let d = sc_to_nd(calc, p).map_err(|e| e.to_string())?;
        let sys = NdSystemId::for_calculus(calc).unwrap();
        if !check_derivation(sys, &d).is_valid() || !is_normal(&d) || d.formula != s.suc || !open_assumptions(&d).is_subset(&s.ctx) {
            return Err(format!("{calc}: sc_to_nd output rejected for {s}"));
        }
        translated += 1;
    }
    Ok(format!("4 x 200 derivations to valid proofs; {translated} prover proofs to valid normal derivations"))
}

fn normalization() -> Outcome {
    let gen = DerivationGen { max_nodes: 10, ..DerivationGen::default() };
    let mut rng = seeded(7);
    let cfg = SearchConfig::default();
    let (mut total, mut reduced) = (0, 0);
    for sys in NdSystemId::ALL {
        for _ in 0..200 {
            let d = gen.with_detour(&mut rng, sys);
            total += 1;
            let n = normalize(sys, &d, &cfg).map_err(|e| e.to_string())?;
            let oa = open_assumptions(&d);
            if !is_normal(&n) || !check_derivation(sys, &n).is_valid() || n.formula != d.formula || !open_assumptions(&n).is_subset(&oa) {
                return Err(format!("{sys}: normalize output rejected for\n{d}"));
            }
            if let Ok((r, _)) = normalize_by_reduction(sys, &d, DEFAULT_MAX_STEPS) {
                if !is_normal(&r) || !check_derivation(sys, &r).is_valid() || r.formula != n.formula {
                    return Err(format!("{sys}: reduction result rejected for\n{d}"));
                }
                reduced += 1;
            }
        }
    }
    if reduced * 100 < total * 95 {
        return Err(format!("reduction normalized only {reduced}/{total}"));
    }
    Ok(format!("{total} planted detours normalized through the sequent calculus; reduction reached normal form on {reduced}/{total}"))
}

fn all_formulas(atoms: &[&str], max: usize) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![vec![], atoms.iter().map(|a| Formula::var(a)).collect()];
    for n in 2..=max {
        let mut out: Vec<Formula> = by_size[n - 1].iter().map(|f| Formula::neg(f.clone())).collect();
        for k in 1..n - 1 {
            for a in &by_size[k] {
                for b in &by_size[n - 1 - k] {
                    out.push(Formula::and(a.clone(), b.clone()));
                    out.push(Formula::or(a.clone(), b.clone()));
                    out.push(Formula::imp(a.clone(), b.clone()));
                }
            }
        }
        by_size.push(out);
    }
    by_size.concat()
}

fn restricted_ex_middle() -> Outcome {
    let formulas = all_formulas(&["p", "q"], 4);
    let atomic = SearchConfig::default();
    let wide = SearchConfig { ex_middle_scope: ExMiddleScope::Closure, eager_extension: false, ..SearchConfig::default() };
    let mut n = 0;
    let contexts = std::iter::once(BTreeSet::new()).chain(formulas.iter().map(|f| BTreeSet::from([f.clone()])));
    for ctx in contexts {
        for goal in &formulas {
            let s = Sequent { ctx: ctx.clone(), suc: goal.clone() };
            let (a, b) = (cell(CalculusId::Sc3, &s, &atomic), cell(CalculusId::Sc3, &s, &wide));
            if a != b || a == Cell::ResourceExceeded {
                return Err(format!("{s}: atomic {a}, closure {b}"));
            }
            n += 1;
        }
    }
    Ok(format!("{n} sequents over {{p, q}} (size <= 4, at most one antecedent) agree"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 connexive theses", connexive_theses),
        ("2 separation matrix", separation),
        ("3 star equivalence", star_equivalence),
        ("4 cut admissibility", cut_admissibility),
        ("5 embedding agreement", embedding),
        ("6 bridge soundness", bridge),
        ("7 normalization", normalization),
        ("8 restricted ex-middle", restricted_ex_middle),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        match run() {
            Ok(msg) => println!("PASS  criterion {name}: {msg} [{:.2?}]", start.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {name}: {msg} [{:.2?}]", start.elapsed());
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

//! Independent oracles used by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use connexive::embedding::translate_sequent;
use connexive::formula::{Atom, Formula};
use connexive::sequent::Sequent;

/// Contraction-free (G4ip) decision procedure for positive intuitionistic
/// logic. Primed atoms are ordinary atoms here. Terminates without loop checks.
pub fn intuitionistic(ctx: &[Formula], goal: &Formula) -> bool {
    g4(ctx.to_vec(), goal)
}

fn g4(mut ctx: Vec<Formula>, goal: &Formula) -> bool {
    use Formula as F;
    if ctx.contains(goal) {
        return true;
    }
    // invertible left rules
    for i in 0..ctx.len() {
        match ctx[i].clone() {
            F::And(a, b) => {
                ctx.swap_remove(i);
                ctx.push((*a).clone());
                ctx.push((*b).clone());
                return g4(ctx, goal);
            }
            F::Or(a, b) => {
                ctx.swap_remove(i);
                let mut l = ctx.clone();
                l.push((*a).clone());
                ctx.push((*b).clone());
                return g4(l, goal) && g4(ctx, goal);
            }
            F::Imp(c, b) => match c.as_ref() {
                F::Var(_) if ctx.contains(&c) => {
                    ctx.swap_remove(i);
                    ctx.push((*b).clone());
                    return g4(ctx, goal);
                }
                F::And(c1, c2) => {
                    ctx.swap_remove(i);
                    ctx.push(F::imp((**c1).clone(), F::imp((**c2).clone(), (*b).clone())));
                    return g4(ctx, goal);
                }
                F::Or(c1, c2) => {
                    ctx.swap_remove(i);
                    ctx.push(F::imp((**c1).clone(), (*b).clone()));
                    ctx.push(F::imp((**c2).clone(), (*b).clone()));
                    return g4(ctx, goal);
                }
                _ => {}
            },
            _ => {}
        }
    }
    // invertible right rules
    match goal {
        F::And(a, b) => return g4(ctx.clone(), a) && g4(ctx, b),
        F::Imp(a, b) => {
            ctx.push((**a).clone());
            return g4(ctx, b);
        }
        _ => {}
    }
    if let F::Or(a, b) = goal {
        if g4(ctx.clone(), a) || g4(ctx.clone(), b) {
            return true;
        }
    }
    // (C -> D) -> B on the left
    for i in 0..ctx.len() {
        if let F::Imp(c, b) = &ctx[i] {
            if let F::Imp(c1, d) = c.as_ref() {
                let b = (**b).clone();
                let mut rest = ctx.clone();
                rest.swap_remove(i);
                let mut first = rest.clone();
                first.push(F::imp((**d).clone(), b.clone()));
                let mut second = rest;
                second.push(b);
                if g4(first, &F::imp((**c1).clone(), (**d).clone())) && g4(second, goal) {
                    return true;
                }
            }
        }
    }
    false
}

fn eval(f: &Formula, v: &dyn Fn(&Atom) -> bool) -> bool {
    match f {
        Formula::Var(a) => v(a),
        Formula::Neg(_) => unreachable!("positive formulas only"),
        Formula::And(a, b) => eval(a, v) && eval(b, v),
        Formula::Or(a, b) => eval(a, v) || eval(b, v),
        Formula::Imp(a, b) => !eval(a, v) || eval(b, v),
    }
}

/// Two-valued validity of a positive sequent; `p` and `p'` are independent
/// unless `exclude_gaps` requires at least one of them to be true.
pub fn classical(s: &Sequent, exclude_gaps: bool) -> bool {
    let names: Vec<String> = s
        .formulas()
        .flat_map(Formula::atoms)
        .map(|a| a.name().to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = names.len();
    for m in 0u64..(1 << (2 * n)) {
        if exclude_gaps && (0..n).any(|i| m >> (2 * i) & 3 == 0) {
            continue;
        }
        let v = |a: &Atom| {
            let i = names.iter().position(|b| b == a.name()).unwrap();
            m >> (2 * i + a.is_primed() as usize) & 1 == 1
        };
        if s.ctx.iter().all(|f| eval(f, &v)) && !eval(&s.suc, &v) {
            return false;
        }
    }
    true
}

fn gap_hypotheses(s: &Sequent) -> Vec<Formula> {
    let atoms: BTreeSet<Atom> = s.formulas().flat_map(Formula::atoms).collect();
    atoms.into_iter().map(|a| Formula::or(Formula::Var(a.to_primed()), Formula::Var(a))).collect()
}

/// Provability in C, C3, MC or CN computed through `f` alone.
pub fn oracle(calc: connexive::CalculusId, s: &Sequent) -> bool {
    use connexive::CalculusId as C;
    let t = translate_sequent(s).expect("unprimed input");
    let ctx: Vec<Formula> = t.ctx.iter().cloned().collect();
    match calc {
        C::Sc => intuitionistic(&ctx, &t.suc),
        C::Sc3 => {
            let mut c = ctx;
            c.extend(gap_hypotheses(s));
            intuitionistic(&c, &t.suc)
        }
        C::Smc | C::SmcStar => classical(&t, false),
        C::Scn | C::ScnStar => classical(&t, true),
        C::Ljp => intuitionistic(&ctx, &t.suc),
        C::LjpPeirce => classical(&t, false),
    }
}

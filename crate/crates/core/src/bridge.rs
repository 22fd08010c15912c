//! Translations between natural-deduction derivations and sequent proofs,
//! and normalization by translating to a sequent proof, removing its cuts
//! and translating back.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::Formula;
use crate::natded::{check_derivation, is_normal, Derivation, NdFault, NdRuleId, NdSystemId};
use crate::prover::{eliminate_cut, peirce_to_g_ex_middle, ProverError, SearchConfig};
use crate::reduction::{substitute, Labels};
use crate::sequent::{check_proof, identity, weaken_unchecked, CalculusId, Principal, ProofFault, RuleId, Sequent, SequentProof};

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("derivation is not valid in {sys}: {fault}")]
    InvalidDerivation { sys: NdSystemId, fault: NdFault },
    #[error("proof is not valid in {calc}: {fault}")]
    InvalidProof { calc: CalculusId, fault: ProofFault },
    #[error("proof contains a cut")]
    ContainsCut,
    #[error("{0} has no natural-deduction counterpart")]
    Unsupported(CalculusId),
    #[error(transparent)]
    Prover(#[from] ProverError),
}

/// Open leaves of a subtree: formula and the depth of the node closing it, if any.
type Leaves = BTreeSet<(Option<usize>, Formula)>;

fn with(ctx: &BTreeSet<Formula>, extra: impl IntoIterator<Item = Formula>) -> BTreeSet<Formula> {
    let mut out = ctx.clone();
    out.extend(extra);
    out
}

/// Weakens `p` so that its context becomes `ctx`.
fn fit(p: &SequentProof, ctx: &BTreeSet<Formula>) -> SequentProof {
    let extra: BTreeSet<Formula> = ctx.difference(&p.conclusion.ctx).cloned().collect();
    weaken_unchecked(p, &extra)
}

/// A proof of `oa(d) => end(d)` in the calculus paired with `sys`.
/// Introductions become right rules; an elimination becomes the matching
/// left rule, cut against the proof of its major premise.
pub fn nd_to_sc(sys: NdSystemId, d: &Derivation) -> Result<SequentProof, BridgeError> {
    check_derivation(sys, d).into_result().map_err(|fault| BridgeError::InvalidDerivation { sys, fault })?;
    let mut scopes = Vec::new();
    Ok(to_sc(d, 0, &mut scopes).0)
}

/// `scopes` holds `(label, depth)` for every discharging ancestor.
fn to_sc(d: &Derivation, depth: usize, scopes: &mut Vec<(u32, usize)>) -> (SequentProof, Leaves) {
    use Formula as F;
    use NdRuleId::*;

    if d.rule == Assumption {
        let binder = d.label.and_then(|x| scopes.iter().rev().find(|s| s.0 == x).map(|s| s.1));
        return (identity(&d.formula, &BTreeSet::new()), BTreeSet::from([(binder, d.formula.clone())]));
    }

    let mut subs = Vec::new();
    for p in &d.premises {
        let pushed = d.discharge.map(|x| scopes.push((x, depth)));
        subs.push(to_sc(p, depth + 1, scopes));
        if pushed.is_some() {
            scopes.pop();
        }
    }

    // leaves closed here, per premise
    let bound_in = |i: usize| -> Vec<Formula> {
        subs[i].1.iter().filter(|(b, _)| *b == Some(depth)).map(|(_, f)| f.clone()).collect()
    };
    let leaves: Leaves = subs.iter().flat_map(|(_, l)| l.iter()).filter(|(b, _)| *b != Some(depth)).cloned().collect();
    let c: BTreeSet<Formula> = leaves.iter().map(|(_, f)| f.clone()).collect();
    let g = d.formula.clone();
    let ps: Vec<&SequentProof> = subs.iter().map(|(p, _)| p).collect();
    let here = Sequent { ctx: c.clone(), suc: g.clone() };
    let right = |rule, principal, prems: Vec<SequentProof>| SequentProof::new(here.clone(), rule, principal, prems);

    let proof = if d.rule.is_introduction() {
        match (d.rule, &g) {
            (ImpI, F::Imp(a, _)) => right(RuleId::ImpRight, Principal::None, vec![fit(ps[0], &with(&c, [(**a).clone()]))]),
            (AndI, _) => right(RuleId::AndRight, Principal::None, vec![fit(ps[0], &c), fit(ps[1], &c)]),
            (OrI1, _) => right(RuleId::OrRight1, Principal::None, vec![fit(ps[0], &c)]),
            (OrI2, _) => right(RuleId::OrRight2, Principal::None, vec![fit(ps[0], &c)]),
            (NegNegI, _) => right(RuleId::NegRight, Principal::None, vec![fit(ps[0], &c)]),
            (NegImpI, F::Neg(inner)) => {
                let F::Imp(a, _) = inner.as_ref() else { unreachable!("checked schema") };
                right(RuleId::NegImpRight, Principal::None, vec![fit(ps[0], &with(&c, [(**a).clone()]))])
            }
            (NegAndI1, _) => right(RuleId::NegAndRight1, Principal::None, vec![fit(ps[0], &c)]),
            (NegAndI2, _) => right(RuleId::NegAndRight2, Principal::None, vec![fit(ps[0], &c)]),
            (NegOrI, _) => right(RuleId::NegOrRight, Principal::None, vec![fit(ps[0], &c), fit(ps[1], &c)]),
            (Em, _) => {
                let a = bound_in(1)
                    .into_iter()
                    .next()
                    .or_else(|| bound_in(0).into_iter().find_map(|f| match f {
                        F::Neg(a) => Some((*a).clone()),
                        _ => None,
                    }))
                    .unwrap_or_else(|| default_side(&g));
                let prems = vec![fit(ps[0], &with(&c, [F::neg(a.clone())])), fit(ps[1], &with(&c, [a.clone()]))];
                right(RuleId::ExMiddle, Principal::One(a), prems)
            }
            (Gem, _) => {
                let from_imp = bound_in(0).into_iter().find_map(|f| match f {
                    F::Imp(a, b) => Some(((*a).clone(), (*b).clone())),
                    _ => None,
                });
                let (a, b) = match from_imp {
                    Some(ab) => ab,
                    None => {
                        let a = bound_in(1).into_iter().next().unwrap_or_else(|| default_side(&g));
                        (a.clone(), a)
                    }
                };
                let prems = vec![fit(ps[0], &with(&c, [F::imp(a.clone(), b.clone())])), fit(ps[1], &with(&c, [a.clone()]))];
                right(RuleId::GExMiddle, Principal::Pair(a, b), prems)
            }
            _ => unreachable!("checked schema"),
        }
    } else {
        let m = ps[0].conclusion.suc.clone();
        let k = with(&c, [m.clone()]);
        let left = |rule, prems: Vec<SequentProof>| {
            SequentProof::new(Sequent { ctx: k.clone(), suc: g.clone() }, rule, Principal::One(m.clone()), prems)
        };
        let neg = |f: &Formula| F::neg(f.clone());
        let l = match (d.rule, &m) {
            (ImpE, F::Imp(_, b)) => left(RuleId::ImpLeft, vec![fit(ps[1], &k), identity(b, &k)]),
            (AndE1 | AndE2, F::And(a, b)) => {
                left(RuleId::AndLeft, vec![identity(&g, &with(&k, [(**a).clone(), (**b).clone()]))])
            }
            (OrE, F::Or(a, b)) => left(
                RuleId::OrLeft,
                vec![fit(ps[1], &with(&k, [(**a).clone()])), fit(ps[2], &with(&k, [(**b).clone()]))],
            ),
            (NegNegE, _) => left(RuleId::NegLeft, vec![identity(&g, &k)]),
            (NegImpE, _) => left(RuleId::NegImpLeft, vec![fit(ps[1], &k), identity(&g, &k)]),
            (NegAndE, F::Neg(inner)) => {
                let F::And(a, b) = inner.as_ref() else { unreachable!("checked schema") };
                left(RuleId::NegAndLeft, vec![fit(ps[1], &with(&k, [neg(a)])), fit(ps[2], &with(&k, [neg(b)]))])
            }
            (NegOrE1 | NegOrE2, F::Neg(inner)) => {
                let F::Or(a, b) = inner.as_ref() else { unreachable!("checked schema") };
                left(RuleId::NegOrLeft, vec![identity(&g, &with(&k, [neg(a), neg(b)]))])
            }
            _ => unreachable!("checked schema"),
        };
        SequentProof::new(here.clone(), RuleId::Cut, Principal::One(m), vec![ps[0].clone(), l])
    };
    (proof, leaves)
}

/// Side formula for an `EM`/`GEM` node that discharges nothing.
fn default_side(g: &Formula) -> Formula {
    Formula::Var(g.atoms().into_iter().next().expect("formulas have atoms"))
}

/// A normal derivation of the succedent from assumptions in the context.
/// Right rules become introductions; a left rule either closes assumptions
/// in a case split or plugs an elimination on an assumption into the leaves
/// of its side formulas.
pub fn sc_to_nd(calc: CalculusId, proof: &SequentProof) -> Result<Derivation, BridgeError> {
    let sys = NdSystemId::for_calculus(calc).ok_or(BridgeError::Unsupported(calc))?;
    check_proof(calc, proof).into_result().map_err(|fault| BridgeError::InvalidProof { calc, fault })?;
    if !proof.is_cut_free() {
        return Err(BridgeError::ContainsCut);
    }
    let starred;
    let proof = if calc.has_peirce() {
        starred = peirce_to_g_ex_middle(proof);
        &starred
    } else {
        proof
    };
    let mut labels = Labels(1);
    let d = to_nd(proof, &mut labels);
    let report = check_derivation(sys, &d);
    assert!(report.is_valid(), "translation of a {calc} proof is not valid in {sys}: {:?}", report.fault);
    assert!(is_normal(&d), "translation of a {calc} proof is not normal");
    Ok(d)
}

/// Labels every open leaf `f` of `d` with `x`.
fn bind(d: &mut Derivation, f: &Formula, x: u32) {
    if d.rule == NdRuleId::Assumption {
        if d.label.is_none() && d.formula == *f {
            d.label = Some(x);
        }
        return;
    }
    d.premises.iter_mut().for_each(|p| bind(p, f, x));
}

/// Replaces every open leaf `f` of `d` by a copy of `e`.
fn plug(d: Derivation, f: &Formula, e: &Derivation, labels: &mut Labels) -> Derivation {
    let mut d = d;
    let x = labels.fresh();
    bind(&mut d, f, x);
    substitute(&d, Some(x), e, labels)
}

fn to_nd(p: &SequentProof, labels: &mut Labels) -> Derivation {
    use Derivation as D;
    use Formula as F;
    use NdRuleId::*;

    let g = p.conclusion.suc.clone();
    let mut subs: Vec<Derivation> = p.premises.iter().map(|q| to_nd(q, labels)).collect();
    let principal = match &p.principal {
        Principal::One(f) => Some(f.clone()),
        _ => None,
    };
    let case = |rule, labels: &mut Labels, major: Formula, mut branches: Vec<Derivation>, sides: [Formula; 2]| {
        let x = labels.fresh();
        for (b, side) in branches.iter_mut().zip(&sides) {
            bind(b, side, x);
        }
        let mut premises = if major_first(rule) { vec![D::assume(major)] } else { vec![] };
        premises.extend(branches);
        D::discharging(rule, g.clone(), x, premises)
    };
    let close = |rule, labels: &mut Labels, side: &Formula, body: Derivation| {
        let x = labels.fresh();
        let mut body = body;
        bind(&mut body, side, x);
        D::discharging(rule, g.clone(), x, vec![body])
    };

    match p.rule {
        RuleId::Init1 | RuleId::Init2 => D::assume(g),
        RuleId::ImpRight => {
            let F::Imp(a, _) = &g else { unreachable!("checked proof") };
            close(ImpI, labels, &a.clone(), subs.remove(0))
        }
        RuleId::NegImpRight => {
            let F::Neg(inner) = &g else { unreachable!("checked proof") };
            let F::Imp(a, _) = inner.as_ref() else { unreachable!("checked proof") };
            close(NegImpI, labels, &a.clone(), subs.remove(0))
        }
        RuleId::AndRight => D::node(AndI, g, subs),
        RuleId::OrRight1 => D::node(OrI1, g, subs),
        RuleId::OrRight2 => D::node(OrI2, g, subs),
        RuleId::NegRight => D::node(NegNegI, g, subs),
        RuleId::NegAndRight1 => D::node(NegAndI1, g, subs),
        RuleId::NegAndRight2 => D::node(NegAndI2, g, subs),
        RuleId::NegOrRight => D::node(NegOrI, g, subs),
        RuleId::AndLeft => {
            let m = principal.expect("checked proof");
            let F::And(a, b) = &m else { unreachable!("checked proof") };
            let e1 = D::node(AndE1, (**a).clone(), vec![D::assume(m.clone())]);
            let e2 = D::node(AndE2, (**b).clone(), vec![D::assume(m.clone())]);
            let d = plug(subs.remove(0), a, &e1, labels);
            plug(d, b, &e2, labels)
        }
        RuleId::NegLeft => {
            let m = principal.expect("checked proof");
            let a = m.double_neg_body().expect("checked proof").clone();
            let e = D::node(NegNegE, a.clone(), vec![D::assume(m)]);
            plug(subs.remove(0), &a, &e, labels)
        }
        RuleId::NegOrLeft => {
            let m = principal.expect("checked proof");
            let F::Neg(inner) = &m else { unreachable!("checked proof") };
            let F::Or(a, b) = inner.as_ref() else { unreachable!("checked proof") };
            let (na, nb) = (F::neg((**a).clone()), F::neg((**b).clone()));
            let e1 = D::node(NegOrE1, na.clone(), vec![D::assume(m.clone())]);
            let e2 = D::node(NegOrE2, nb.clone(), vec![D::assume(m.clone())]);
            let d = plug(subs.remove(0), &na, &e1, labels);
            plug(d, &nb, &e2, labels)
        }
        RuleId::ImpLeft | RuleId::NegImpLeft => {
            let m = principal.expect("checked proof");
            let (rule, side) = match &m {
                F::Imp(_, b) => (ImpE, (**b).clone()),
                F::Neg(inner) => match inner.as_ref() {
                    F::Imp(_, b) => (NegImpE, F::neg((**b).clone())),
                    _ => unreachable!("checked proof"),
                },
                _ => unreachable!("checked proof"),
            };
            let minor = subs.remove(0);
            let e = D::node(rule, side.clone(), vec![D::assume(m), minor]);
            plug(subs.remove(0), &side, &e, labels)
        }
        RuleId::OrLeft => {
            let m = principal.expect("checked proof");
            let F::Or(a, b) = &m else { unreachable!("checked proof") };
            let sides = [(**a).clone(), (**b).clone()];
            case(OrE, labels, m.clone(), subs, sides)
        }
        RuleId::NegAndLeft => {
            let m = principal.expect("checked proof");
            let F::Neg(inner) = &m else { unreachable!("checked proof") };
            let F::And(a, b) = inner.as_ref() else { unreachable!("checked proof") };
            let sides = [F::neg((**a).clone()), F::neg((**b).clone())];
            case(NegAndE, labels, m.clone(), subs, sides)
        }
        RuleId::ExMiddle => {
            let a = principal.expect("checked proof");
            case(Em, labels, a.clone(), subs, [F::neg(a.clone()), a])
        }
        RuleId::GExMiddle => {
            let (a, b) = match &p.principal {
                Principal::Pair(a, b) => (a.clone(), b.clone()),
                Principal::One(F::Imp(a, b)) => ((**a).clone(), (**b).clone()),
                _ => unreachable!("checked proof"),
            };
            case(Gem, labels, a.clone(), subs, [F::imp(a.clone(), b), a])
        }
        RuleId::Cut | RuleId::Peirce => unreachable!("removed before translation"),
    }
}

fn major_first(rule: NdRuleId) -> bool {
    matches!(rule, NdRuleId::OrE | NdRuleId::NegAndE)
}

/// A normal derivation with the same end formula and no new open
/// assumptions: translate to a sequent proof, remove its cuts by search,
/// translate back.
pub fn normalize(sys: NdSystemId, d: &Derivation, cfg: &SearchConfig) -> Result<Derivation, BridgeError> {
    let calc = sys.paired();
    let proof = nd_to_sc(sys, d)?;
    let cut_free = eliminate_cut(calc, &proof, cfg)?;
    sc_to_nd(calc, &cut_free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::natded::{maximum_formulas, open_assumptions};
    use crate::prover::decide;
    use crate::sequent::parse_sequent;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn aristotle() -> Derivation {
        let nn = Derivation::node(NdRuleId::NegNegI, f("~~p"), vec![Derivation::assume_labeled(f("p"), 1)]);
        Derivation::discharging(NdRuleId::NegImpI, f("~(p -> ~p)"), 1, vec![nn])
    }

    fn assert_bridged(sys: NdSystemId, d: &Derivation) -> SequentProof {
        let p = nd_to_sc(sys, d).unwrap();
        assert!(check_proof(sys.paired(), &p).is_valid(), "{:?}", check_proof(sys.paired(), &p).fault);
        assert_eq!(p.conclusion, Sequent { ctx: open_assumptions(d), suc: d.formula.clone() });
        p
    }

    #[test]
    fn assumption_becomes_identity() {
        let p = assert_bridged(NdSystemId::Nc, &Derivation::assume(f("p & ~q")));
        assert_eq!(p, identity(&f("p & ~q"), &BTreeSet::new()));
    }

    #[test]
    fn neg_imp_intro_becomes_right_rule() {
        let p = assert_bridged(NdSystemId::Nc, &aristotle());
        assert_eq!(p.rule, RuleId::NegImpRight);
        assert!(p.is_cut_free());
    }

    #[test]
    fn neg_imp_elim_uses_cut() {
        let d = Derivation::node(NdRuleId::NegImpE, f("~q"), vec![Derivation::assume(f("~(p -> q)")), Derivation::assume(f("p"))]);
        let p = assert_bridged(NdSystemId::Nc, &d);
        assert_eq!(p.rule, RuleId::Cut);
        assert_eq!(p.conclusion, parse_sequent("~(p -> q), p => ~q").unwrap());
    }

    #[test]
    fn em_and_gem_translate() {
        let em = Derivation::discharging(
            NdRuleId::Em,
            f("~p | p"),
            1,
            vec![
                Derivation::node(NdRuleId::OrI1, f("~p | p"), vec![Derivation::assume_labeled(f("~p"), 1)]),
                Derivation::node(NdRuleId::OrI2, f("~p | p"), vec![Derivation::assume_labeled(f("p"), 1)]),
            ],
        );
        assert_eq!(assert_bridged(NdSystemId::Nc3, &em).rule, RuleId::ExMiddle);
        let vacuous = Derivation::discharging(NdRuleId::Gem, f("q"), 2, vec![Derivation::assume(f("q")), Derivation::assume(f("q"))]);
        assert_eq!(assert_bridged(NdSystemId::Nmc, &vacuous).rule, RuleId::GExMiddle);
    }

    #[test]
    fn init_leaf_and_neg_and_right() {
        let leaf = SequentProof::leaf(parse_sequent("~q, p => ~q").unwrap(), RuleId::Init2);
        assert_eq!(sc_to_nd(CalculusId::Sc, &leaf).unwrap(), Derivation::assume(f("~q")));

        let proof = decide(CalculusId::Sc, &parse_sequent("~p => ~(p & q)").unwrap(), &SearchConfig::default()).unwrap();
        let d = sc_to_nd(CalculusId::Sc, proof.proof().unwrap()).unwrap();
        assert_eq!(d, Derivation::node(NdRuleId::NegAndI1, f("~(p & q)"), vec![Derivation::assume(f("~p"))]));
    }

    #[test]
    fn prover_proofs_translate_to_normal_derivations() {
        let cases = [
            (CalculusId::Sc, "(p -> q) -> ~(p -> ~q)"),
            (CalculusId::Sc, "~(p | q), r & s, (r -> t) => ~q & t"),
            (CalculusId::Sc3, "~p | p"),
            (CalculusId::Smc, "((p -> q) -> p) -> p"),
            (CalculusId::Scn, "~(p & q) -> ~p | ~q"),
            (CalculusId::ScnStar, "((p -> q) -> p) -> p"),
        ];
        for (calc, text) in cases {
            let s = parse_sequent(text).unwrap();
            let res = decide(calc, &s, &SearchConfig::default()).unwrap();
            let d = sc_to_nd(calc, res.proof().unwrap()).unwrap();
            assert_eq!(d.formula, s.suc);
            assert!(open_assumptions(&d).is_subset(&s.ctx), "{text}");
            assert!(is_normal(&d));
        }
    }

    #[test]
    fn sc_to_nd_rejects_cut_and_positive_calculi() {
        let d = Derivation::node(NdRuleId::NegImpE, f("~q"), vec![Derivation::assume(f("~(p -> q)")), Derivation::assume(f("p"))]);
        let p = nd_to_sc(NdSystemId::Nc, &d).unwrap();
        assert!(matches!(sc_to_nd(CalculusId::Sc, &p), Err(BridgeError::ContainsCut)));
        let id = identity(&f("p"), &BTreeSet::new());
        assert!(matches!(sc_to_nd(CalculusId::Ljp, &id), Err(BridgeError::Unsupported(_))));
    }

    #[test]
    fn normalize_examples() {
        let cfg = SearchConfig::default();
        let nn = Derivation::node(NdRuleId::NegNegI, f("~~p"), vec![Derivation::assume(f("p"))]);
        let detour = Derivation::node(NdRuleId::NegNegE, f("p"), vec![nn]);
        assert_eq!(normalize(NdSystemId::Nc, &detour, &cfg).unwrap(), Derivation::assume(f("p")));

        let out = normalize(NdSystemId::Nc, &aristotle(), &cfg).unwrap();
        assert!(is_normal(&out) && open_assumptions(&out).is_empty());
        assert_eq!(out.formula, f("~(p -> ~p)"));

        let lam = Derivation::discharging(NdRuleId::ImpI, f("p -> q"), 1, vec![Derivation::assume(f("q"))]);
        let app = Derivation::node(NdRuleId::ImpE, f("q"), vec![lam, Derivation::assume(f("p"))]);
        assert_eq!(maximum_formulas(&app).len(), 1);
        let out = normalize(NdSystemId::Nc, &app, &cfg).unwrap();
        assert!(is_normal(&out));
        assert_eq!(out.formula, f("q"));
        assert!(open_assumptions(&out).is_subset(&BTreeSet::from([f("q"), f("p")])));
    }
}

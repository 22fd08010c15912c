//! One-step detour contractions and permutations on natural-deduction
//! derivations, and a bounded leftmost-innermost normalizer built on them.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::natded::{check_derivation, maximum_formulas, Derivation, MaxOccurrence, NdFault, NdRuleId, NdSystemId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    DetourImp,
    DetourAnd,
    DetourOr,
    PermOrE,
    DetourNegNeg,
    DetourNegImp,
    DetourNegAnd,
    PermNegAndE,
    DetourNegOr,
    PermEM,
    PermGEM,
}

impl ReductionKind {
    pub fn available_in(self, sys: NdSystemId) -> bool {
        match self {
            ReductionKind::PermEM => sys.has_em(),
            ReductionKind::PermGEM => sys.has_gem(),
            _ => true,
        }
    }

    /// The clause for a maximum formula concluded by `rule` and eliminated by `elim`.
    pub fn of(rule: NdRuleId, elim: NdRuleId) -> Option<ReductionKind> {
        use NdRuleId::*;
        use ReductionKind::*;
        if !elim.is_elimination() {
            return None;
        }
        Some(match (rule, elim) {
            (ImpI, ImpE) => DetourImp,
            (AndI, AndE1 | AndE2) => DetourAnd,
            (OrI1 | OrI2, OrE) => DetourOr,
            (NegNegI, NegNegE) => DetourNegNeg,
            (NegImpI, NegImpE) => DetourNegImp,
            (NegAndI1 | NegAndI2, NegAndE) => DetourNegAnd,
            (NegOrI, NegOrE1 | NegOrE2) => DetourNegOr,
            (OrE, _) => PermOrE,
            (NegAndE, _) => PermNegAndE,
            (Em, _) => PermEM,
            (Gem, _) => PermGEM,
            _ => return None,
        })
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("input derivation is not valid in {sys}: {fault}")]
    Invalid { sys: NdSystemId, fault: NdFault },
    #[error("no maximum formula at {0:?}")]
    NotMaximum(Vec<usize>),
    #[error("no reduction clause for {rule} under {elim}")]
    NoClause { rule: NdRuleId, elim: NdRuleId },
    #[error("permutation at {0:?} does not apply")]
    NotPermutable(Vec<usize>),
}

#[derive(Debug, Error)]
#[error("no normal form within {steps} steps")]
pub struct StepLimit {
    pub derivation: Derivation,
    pub steps: usize,
}

pub const DEFAULT_MAX_STEPS: usize = 10_000;

/// Supply of labels unused anywhere in a derivation.
pub(crate) struct Labels(pub(crate) u32);

impl Labels {
    pub(crate) fn after(d: &Derivation) -> Self {
        Labels(d.max_label().map_or(1, |m| m + 1))
    }

    pub(crate) fn fresh(&mut self) -> u32 {
        let x = self.0;
        self.0 += 1;
        x
    }
}

/// Renames every discharge inside `d` to a fresh label, together with the
/// leaves it closes. Leaves closed further down keep their labels.
pub(crate) fn freshen(d: &Derivation, labels: &mut Labels) -> Derivation {
    fn go(d: &Derivation, labels: &mut Labels, map: &mut HashMap<u32, u32>) -> Derivation {
        if d.rule == NdRuleId::Assumption {
            let label = d.label.map(|x| map.get(&x).copied().unwrap_or(x));
            return Derivation { label, ..d.clone() };
        }
        let renamed = d.discharge.map(|x| (x, labels.fresh()));
        let premises = d
            .premises
            .iter()
            .enumerate()
            .map(|(i, p)| match renamed {
                Some((x, y)) if d.rule.discharge_slots().contains(&i) => {
                    let old = map.insert(x, y);
                    let out = go(p, labels, map);
                    match old {
                        Some(o) => map.insert(x, o),
                        None => map.remove(&x),
                    };
                    out
                }
                _ => go(p, labels, map),
            })
            .collect();
        Derivation { premises, discharge: renamed.map(|(_, y)| y), ..d.clone() }
    }
    go(d, labels, &mut HashMap::new())
}

fn binders_unique(d: &Derivation) -> bool {
    let mut seen = HashSet::new();
    let mut ok = true;
    d.visit(&mut |n| {
        if let Some(x) = n.discharge {
            ok &= seen.insert(x);
        }
    });
    ok
}

/// Replaces each leaf labelled `label` by its own freshened copy of `e`.
pub(crate) fn substitute(d: &Derivation, label: Option<u32>, e: &Derivation, labels: &mut Labels) -> Derivation {
    let Some(x) = label else { return d.clone() };
    if d.rule == NdRuleId::Assumption {
        return if d.label == Some(x) { freshen(e, labels) } else { d.clone() };
    }
    Derivation { premises: d.premises.iter().map(|p| substitute(p, label, e, labels)).collect(), ..d.clone() }
}

/// Contracts the redex `elim` whose major premise is a maximum formula.
fn contract(elim: &Derivation, labels: &mut Labels) -> Result<(Derivation, ReductionKind), ReduceError> {
    use NdRuleId::*;
    use ReductionKind::*;
    let max = &elim.premises[0];
    let kind = ReductionKind::of(max.rule, elim.rule).ok_or(ReduceError::NoClause { rule: max.rule, elim: elim.rule })?;
    let out = match kind {
        DetourImp | DetourNegImp => substitute(&max.premises[0], max.discharge, &elim.premises[1], labels),
        DetourAnd | DetourNegOr => {
            let i = usize::from(matches!(elim.rule, AndE2 | NegOrE2));
            max.premises[i].clone()
        }
        DetourOr | DetourNegAnd => {
            let branch = if matches!(max.rule, OrI1 | NegAndI1) { 1 } else { 2 };
            substitute(&elim.premises[branch], elim.discharge, &max.premises[0], labels)
        }
        DetourNegNeg => max.premises[0].clone(),
        PermOrE | PermNegAndE | PermEM | PermGEM => {
            let first = if matches!(kind, PermOrE | PermNegAndE) { 1 } else { 0 };
            let mut premises = max.premises[..first].to_vec();
            for (k, branch) in max.premises[first..].iter().enumerate() {
                let mut ps = elim.premises.clone();
                ps[0] = branch.clone();
                let copy = Derivation { premises: ps, ..elim.clone() };
                premises.push(if k == 0 { copy } else { freshen(&copy, labels) });
            }
            Derivation { formula: elim.formula.clone(), premises, ..max.clone() }
        }
    };
    Ok((out, kind))
}

/// Applies the reduction clause matching the maximum formula `at`.
pub fn reduce_step(sys: NdSystemId, d: &Derivation, at: &MaxOccurrence) -> Result<Derivation, ReduceError> {
    check_derivation(sys, d).into_result().map_err(|fault| ReduceError::Invalid { sys, fault })?;
    reduce_unchecked(d, at).map(|(out, _)| out)
}

/// The clause `reduce_step` would apply at `at`.
pub fn reduction_kind(d: &Derivation, at: &MaxOccurrence) -> Option<ReductionKind> {
    let (last, parent) = at.path.split_last()?;
    let elim = d.at(parent)?;
    (*last == 0).then_some(())?;
    ReductionKind::of(elim.premises.first()?.rule, elim.rule)
}

fn reduce_unchecked(d: &Derivation, at: &MaxOccurrence) -> Result<(Derivation, ReductionKind), ReduceError> {
    if !maximum_formulas(d).contains(at) {
        return Err(ReduceError::NotMaximum(at.path.clone()));
    }
    let mut labels = Labels::after(d);
    let mut out = if binders_unique(d) { d.clone() } else { freshen(d, &mut labels) };
    let parent = &at.path[..at.path.len() - 1];
    let slot = out.at_mut(parent).expect("path checked");
    let (reduct, kind) = contract(slot, &mut labels)?;
    *slot = reduct;
    Ok((out, kind))
}

/// Pushes the parent of the `or_E` / `neg_and_E` / `EM` / `GEM` node at
/// `path` into its case branches, whatever the parent rule is.
pub fn permute_up(sys: NdSystemId, d: &Derivation, path: &[usize]) -> Result<Derivation, ReduceError> {
    check_derivation(sys, d).into_result().map_err(|fault| ReduceError::Invalid { sys, fault })?;
    let not = || ReduceError::NotPermutable(path.to_vec());
    let (&k, parent) = path.split_last().ok_or_else(not)?;
    let node = d.at(path).ok_or_else(not)?;
    let first = match node.rule {
        NdRuleId::OrE | NdRuleId::NegAndE => 1,
        NdRuleId::Em | NdRuleId::Gem => 0,
        _ => return Err(not()),
    };
    let mut labels = Labels::after(d);
    let mut out = if binders_unique(d) { d.clone() } else { freshen(d, &mut labels) };
    let slot = out.at_mut(parent).expect("path exists");
    let case = slot.premises[k].clone();
    let mut premises = case.premises[..first].to_vec();
    for (i, branch) in case.premises[first..].iter().enumerate() {
        let mut ps = slot.premises.clone();
        ps[k] = branch.clone();
        let copy = Derivation { premises: ps, ..slot.clone() };
        premises.push(if i == 0 { copy } else { freshen(&copy, &mut labels) });
    }
    *slot = Derivation { formula: slot.formula.clone(), premises, ..case };
    check_derivation(sys, &out).into_result().map_err(|_| not())?;
    Ok(out)
}

/// Reduces at the leftmost-innermost maximum formula until none is left.
pub fn normalize_by_reduction(sys: NdSystemId, d: &Derivation, max_steps: usize) -> Result<(Derivation, usize), NormalizeError> {
    check_derivation(sys, d).into_result().map_err(|fault| ReduceError::Invalid { sys, fault })?;
    let mut cur = d.clone();
    for steps in 0..=max_steps {
        let Some(at) = maximum_formulas(&cur).into_iter().next() else {
            return Ok((cur, steps));
        };
        if steps == max_steps {
            break;
        }
        cur = reduce_unchecked(&cur, &at)?.0;
    }
    Err(StepLimit { derivation: cur, steps: max_steps }.into())
}

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    StepLimit(#[from] StepLimit),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Formula};
    use crate::natded::{is_normal, open_assumptions};

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn a(s: &str) -> Derivation {
        Derivation::assume(f(s))
    }

    fn first_max(d: &Derivation) -> MaxOccurrence {
        maximum_formulas(d).into_iter().next().unwrap()
    }

    fn negneg(d: Derivation) -> Derivation {
        let g = d.formula.clone();
        let nn = Derivation::node(NdRuleId::NegNegI, Formula::neg(Formula::neg(g.clone())), vec![d]);
        Derivation::node(NdRuleId::NegNegE, g, vec![nn])
    }

    #[test]
    fn imp_detour_substitutes_minor() {
        // (p -> p & p) applied to E, where E derives p from p & q
        let body = Derivation::node(NdRuleId::AndI, f("p & p"), vec![Derivation::assume_labeled(f("p"), 1), Derivation::assume_labeled(f("p"), 1)]);
        let lam = Derivation::discharging(NdRuleId::ImpI, f("p -> p & p"), 1, vec![body]);
        let e = Derivation::node(NdRuleId::AndE1, f("p"), vec![a("p & q")]);
        let d = Derivation::node(NdRuleId::ImpE, f("p & p"), vec![lam, e.clone()]);
        let out = reduce_step(NdSystemId::Nc, &d, &first_max(&d)).unwrap();
        assert_eq!(out, Derivation::node(NdRuleId::AndI, f("p & p"), vec![e.clone(), e]));
    }

    #[test]
    fn projection_detours() {
        let d = Derivation::node(NdRuleId::AndE1, f("p"), vec![Derivation::node(NdRuleId::AndI, f("p & q"), vec![a("p"), a("q")])]);
        assert_eq!(reduce_step(NdSystemId::Nc, &d, &first_max(&d)).unwrap(), a("p"));
        let d = Derivation::node(NdRuleId::NegOrE1, f("~p"), vec![Derivation::node(NdRuleId::NegOrI, f("~(p | q)"), vec![a("~p"), a("~q")])]);
        assert_eq!(reduce_step(NdSystemId::Nc, &d, &first_max(&d)).unwrap(), a("~p"));
    }

    #[test]
    fn em_permutation_copies_minor_with_fresh_labels() {
        // imp_E(EM[1](D1, D2) : p -> q, E : p) with E = imp_I-free derivation carrying a discharge
        let d1 = Derivation::node(NdRuleId::AndE2, f("p -> q"), vec![Derivation::node(NdRuleId::AndI, f("~r & (p -> q)"), vec![Derivation::assume_labeled(f("~r"), 1), a("p -> q")])]);
        let d2 = Derivation::node(NdRuleId::AndE2, f("p -> q"), vec![Derivation::node(NdRuleId::AndI, f("r & (p -> q)"), vec![Derivation::assume_labeled(f("r"), 1), a("p -> q")])]);
        let em = Derivation::discharging(NdRuleId::Em, f("p -> q"), 1, vec![d1, d2]);
        let e = Derivation::discharging(NdRuleId::OrE, f("p"), 2, vec![a("p | p"), Derivation::assume_labeled(f("p"), 2), Derivation::assume_labeled(f("p"), 2)]);
        let d = Derivation::node(NdRuleId::ImpE, f("q"), vec![em, e]);
        assert!(check_derivation(NdSystemId::Nc3, &d).is_valid());
        let at = maximum_formulas(&d).into_iter().find(|m| m.path == [0]).unwrap();
        assert_eq!(reduction_kind(&d, &at), Some(ReductionKind::PermEM));
        let out = reduce_step(NdSystemId::Nc3, &d, &at).unwrap();
        assert!(check_derivation(NdSystemId::Nc3, &out).is_valid());
        assert_eq!(out.rule, NdRuleId::Em);
        assert_eq!(out.formula, f("q"));
        assert!(out.premises.iter().all(|p| p.rule == NdRuleId::ImpE));
        let (x, y) = (out.premises[0].premises[1].discharge, out.premises[1].premises[1].discharge);
        assert_ne!(x, y);
        assert!(open_assumptions(&out).is_subset(&open_assumptions(&d)));
    }

    #[test]
    fn or_permutation_then_detours_normalize() {
        // and_E1(or_E(r | s, [r] p & q, [s] p & q)) pushes and_E1 into both branches
        let branch = |h: &str| Derivation::node(NdRuleId::AndI, f("p & q"), vec![a("p"), Derivation::node(NdRuleId::AndE2, f("q"), vec![Derivation::node(NdRuleId::AndI, f(&format!("{h} & q")), vec![Derivation::assume_labeled(f(h), 4), a("q")])])]);
        let case = Derivation::discharging(NdRuleId::OrE, f("p & q"), 4, vec![a("r | s"), branch("r"), branch("s")]);
        let d = Derivation::node(NdRuleId::AndE1, f("p"), vec![case]);
        assert!(check_derivation(NdSystemId::Nc, &d).is_valid());
        let (out, steps) = normalize_by_reduction(NdSystemId::Nc, &d, DEFAULT_MAX_STEPS).unwrap();
        assert!(is_normal(&out) && check_derivation(NdSystemId::Nc, &out).is_valid());
        assert_eq!(out.formula, f("p"));
        assert!(steps >= 3);
    }

    #[test]
    fn normalizer_examples() {
        let (out, steps) = normalize_by_reduction(NdSystemId::Nc, &negneg(a("p")), 10).unwrap();
        assert_eq!((out, steps), (a("p"), 1));

        let normal = crate::natded::Derivation::discharging(NdRuleId::ImpI, f("p -> p"), 1, vec![Derivation::assume_labeled(f("p"), 1)]);
        assert_eq!(normalize_by_reduction(NdSystemId::Nc, &normal, 10).unwrap(), (normal, 0));

        let nested = Derivation::node(NdRuleId::AndE1, f("p"), vec![Derivation::node(NdRuleId::AndI, f("p & q"), vec![negneg(a("p")), a("q")])]);
        assert_eq!(normalize_by_reduction(NdSystemId::Nc, &nested, 10).unwrap(), (a("p"), 2));
    }

    #[test]
    fn step_limit_reports_intermediate() {
        let d = negneg(negneg(a("p")));
        match normalize_by_reduction(NdSystemId::Nc, &d, 1) {
            Err(NormalizeError::StepLimit(limit)) => {
                assert_eq!(limit.steps, 1);
                assert!(check_derivation(NdSystemId::Nc, &limit.derivation).is_valid());
            }
            other => panic!("expected a step limit, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_maximum() {
        let d = negneg(a("p"));
        let bogus = MaxOccurrence { path: vec![], formula: f("p") };
        assert!(matches!(reduce_step(NdSystemId::Nc, &d, &bogus), Err(ReduceError::NotMaximum(_))));
    }

    #[test]
    fn general_permutation_pushes_intro() {
        // or_I1 applied to an or_E conclusion is not a detour, but can be permuted by hand
        let case = Derivation::discharging(NdRuleId::OrE, f("p"), 1, vec![a("p | p"), Derivation::assume_labeled(f("p"), 1), Derivation::assume_labeled(f("p"), 1)]);
        let d = Derivation::node(NdRuleId::OrI1, f("p | q"), vec![case]);
        let out = permute_up(NdSystemId::Nc, &d, &[0]).unwrap();
        assert_eq!(out.rule, NdRuleId::OrE);
        assert_eq!(out.premises[1].rule, NdRuleId::OrI1);
        assert!(permute_up(NdSystemId::Nc, &d, &[]).is_err());
    }
}

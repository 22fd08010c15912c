//! Seeded generators for formulas, sequents and natural-deduction
//! derivations, used by property tests, the acceptance suite and examples.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::Formula;
use crate::natded::{Derivation, NdRuleId, NdSystemId};
use crate::reduction::{freshen, Labels};
use crate::sequent::Sequent;

pub type Seeded = ChaCha8Rng;

pub fn seeded(seed: u64) -> Seeded {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub struct FormulaGen {
    pub atoms: Vec<String>,
    /// Relative weights of `~`, `&`, `|`, `->` at inner nodes.
    pub weights: [u32; 4],
}

impl Default for FormulaGen {
    fn default() -> Self {
        FormulaGen { atoms: vec!["p".into(), "q".into(), "r".into()], weights: [3, 2, 2, 3] }
    }
}

impl FormulaGen {
    pub fn over(atoms: &[&str]) -> Self {
        FormulaGen { atoms: atoms.iter().map(|a| a.to_string()).collect(), ..Self::default() }
    }

    pub fn atom<R: Rng>(&self, rng: &mut R) -> Formula {
        Formula::var(self.atoms.choose(rng).expect("at least one atom"))
    }

    /// A formula with exactly `size` nodes. Without `~` there is no formula
    /// of size 2, so that size yields size 3.
    pub fn exact<R: Rng>(&self, rng: &mut R, size: usize) -> Formula {
        match size {
            0 | 1 => self.atom(rng),
            2 if self.weights[0] > 0 => Formula::neg(self.atom(rng)),
            _ => {
                let total: u32 = self.weights.iter().sum();
                let mut pick = rng.gen_range(0..total);
                let mut op = 0;
                while pick >= self.weights[op] {
                    pick -= self.weights[op];
                    op += 1;
                }
                if op == 0 {
                    return Formula::neg(self.exact(rng, size - 1));
                }
                let size = size.max(3);
                let left = rng.gen_range(1..size - 1);
                let (a, b) = (self.exact(rng, left), self.exact(rng, size - 1 - left));
                match op {
                    1 => Formula::and(a, b),
                    2 => Formula::or(a, b),
                    _ => Formula::imp(a, b),
                }
            }
        }
    }

    /// A formula whose size is uniform in `1..=max_size`.
    pub fn up_to<R: Rng>(&self, rng: &mut R, max_size: usize) -> Formula {
        let size = rng.gen_range(1..=max_size.max(1));
        self.exact(rng, size)
    }

    /// `Γ => γ` with up to `max_ctx` antecedents, each of size at most `max_size`.
    pub fn sequent<R: Rng>(&self, rng: &mut R, max_ctx: usize, max_size: usize) -> Sequent {
        let n = rng.gen_range(0..=max_ctx);
        let ctx: Vec<Formula> = (0..n).map(|_| self.up_to(rng, max_size)).collect();
        Sequent::new(ctx, self.up_to(rng, max_size))
    }
}

/// Goal-directed random natural-deduction derivations.
#[derive(Clone, Debug)]
pub struct DerivationGen {
    pub formulas: FormulaGen,
    /// Upper bound on the node count of [`DerivationGen::derivation`].
    pub max_nodes: usize,
    /// Size bound for goals and for side formulas invented along the way.
    pub max_size: usize,
}

impl Default for DerivationGen {
    fn default() -> Self {
        DerivationGen { formulas: FormulaGen::default(), max_nodes: 15, max_size: 3 }
    }
}

struct Build<'a, R> {
    g: &'a DerivationGen,
    sys: NdSystemId,
    rng: &'a mut R,
    labels: Labels,
    hyps: Vec<(Formula, u32)>,
}

impl DerivationGen {
    /// A checker-valid derivation in `sys` with at most `max_nodes` nodes.
    pub fn derivation<R: Rng>(&self, rng: &mut R, sys: NdSystemId) -> Derivation {
        let goal = self.formulas.up_to(rng, self.max_size + 1);
        self.derive(rng, sys, &goal, self.max_nodes)
    }

    /// A checker-valid derivation of `goal` in `sys` within `budget` nodes.
    pub fn derive<R: Rng>(&self, rng: &mut R, sys: NdSystemId, goal: &Formula, budget: usize) -> Derivation {
        let mut b = Build { g: self, sys, rng, labels: Labels(1), hyps: vec![] };
        b.goal(goal, budget.max(1))
    }

    /// A random derivation with a detour or a permutable case split planted
    /// at a random node; it always has at least one maximum formula.
    pub fn with_detour<R: Rng>(&self, rng: &mut R, sys: NdSystemId) -> Derivation {
        let mut d = self.derivation(rng, sys);
        let mut paths = vec![];
        collect_paths(&d, &mut vec![], &mut paths);
        let path = paths.choose(rng).expect("root").clone();
        let labels = Labels::after(&d);
        let mut b = Build { g: self, sys, rng, labels, hyps: vec![] };
        let slot = d.at_mut(&path).expect("collected path");
        *slot = b.plant(slot.clone());
        d
    }
}

fn collect_paths(d: &Derivation, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(path.clone());
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        collect_paths(p, path, out);
        path.pop();
    }
}

fn open_leaf_formulas(d: &Derivation, out: &mut Vec<Formula>) {
    if d.rule == NdRuleId::Assumption {
        if d.label.is_none() {
            out.push(d.formula.clone());
        }
        return;
    }
    d.premises.iter().for_each(|p| open_leaf_formulas(p, out));
}

fn bind_open(d: &mut Derivation, f: &Formula, x: u32) {
    if d.rule == NdRuleId::Assumption {
        if d.label.is_none() && d.formula == *f {
            d.label = Some(x);
        }
        return;
    }
    d.premises.iter_mut().for_each(|p| bind_open(p, f, x));
}

/// Splits `total` into `k` positive parts, or `None` when it is too small.
fn split<R: Rng>(rng: &mut R, total: usize, k: usize) -> Option<Vec<usize>> {
    if total < k {
        return None;
    }
    let mut parts = vec![1; k];
    for _ in 0..total - k {
        if rng.gen_bool(0.7) {
            let i = rng.gen_range(0..k);
            parts[i] += 1;
        }
    }
    Some(parts)
}

impl<R: Rng> Build<'_, R> {
    fn side(&mut self) -> Formula {
        let size = self.rng.gen_range(1..=self.g.max_size.clamp(1, 2));
        self.g.formulas.exact(self.rng, size)
    }

    fn leaf(&mut self, goal: &Formula) -> Derivation {
        let bound: Vec<u32> = self.hyps.iter().filter(|(f, _)| f == goal).map(|(_, x)| *x).collect();
        match bound.choose(self.rng) {
            Some(&x) if self.rng.gen_bool(0.85) => Derivation::assume_labeled(goal.clone(), x),
            _ => Derivation::assume(goal.clone()),
        }
    }

    /// Derives `goal` under `hyp` discharged with label `x`.
    fn under(&mut self, hyp: Formula, x: u32, goal: &Formula, budget: usize) -> Derivation {
        self.hyps.push((hyp, x));
        let d = self.goal(goal, budget);
        self.hyps.pop();
        d
    }

    fn goal(&mut self, goal: &Formula, budget: usize) -> Derivation {
        use Formula as F;
        use NdRuleId::*;
        if budget <= 1 || self.hyps.iter().any(|(f, _)| f == goal) && self.rng.gen_bool(0.6) {
            return self.leaf(goal);
        }
        if self.rng.gen_bool(0.15) {
            return self.leaf(goal);
        }
        let r = budget - 1;
        // introductions when the goal allows one, otherwise an elimination
        let intro = self.rng.gen_bool(0.6);
        if intro {
            if let Some(d) = self.introduce(goal, r) {
                return d;
            }
        }
        let mut choices = vec![AndE1, ImpE, OrE, NegNegE];
        if let F::Neg(inner) = goal {
            choices.push(NegImpE);
            choices.push(NegAndE);
            if !matches!(inner.as_ref(), F::Neg(_)) {
                choices.push(NegOrE1);
            }
        }
        if self.sys.has_em() {
            choices.push(Em);
        }
        if self.sys.has_gem() {
            choices.push(Gem);
        }
        let rule = *choices.choose(self.rng).expect("nonempty");
        self.eliminate(rule, goal, r).or_else(|| self.introduce(goal, r)).unwrap_or_else(|| self.leaf(goal))
    }

    /// A major premise: mostly an assumption, so that few detours arise by accident.
    fn major(&mut self, f: &Formula, budget: usize) -> Derivation {
        if self.rng.gen_bool(0.8) {
            self.leaf(f)
        } else {
            self.goal(f, budget)
        }
    }

    fn introduce(&mut self, goal: &Formula, r: usize) -> Option<Derivation> {
        use Derivation as D;
        use Formula as F;
        use NdRuleId::*;
        let g = goal.clone();
        Some(match goal {
            F::Var(_) => return None,
            F::Imp(a, b) => {
                let x = self.labels.fresh();
                let body = self.under((**a).clone(), x, b, r);
                D::discharging(ImpI, g, x, vec![body])
            }
            F::And(a, b) => {
                let parts = split(self.rng, r, 2)?;
                let (da, db) = (self.goal(a, parts[0]), self.goal(b, parts[1]));
                D::node(AndI, g, vec![da, db])
            }
            F::Or(a, b) => {
                if self.rng.gen_bool(0.5) {
                    D::node(OrI1, g, vec![self.goal(a, r)])
                } else {
                    D::node(OrI2, g, vec![self.goal(b, r)])
                }
            }
            F::Neg(inner) => match inner.as_ref() {
                F::Var(_) => return None,
                F::Neg(a) => D::node(NegNegI, g, vec![self.goal(a, r)]),
                F::Imp(a, b) => {
                    let x = self.labels.fresh();
                    let body = self.under((**a).clone(), x, &F::neg((**b).clone()), r);
                    D::discharging(NegImpI, g, x, vec![body])
                }
                F::And(a, b) => {
                    if self.rng.gen_bool(0.5) {
                        D::node(NegAndI1, g, vec![self.goal(&F::neg((**a).clone()), r)])
                    } else {
                        D::node(NegAndI2, g, vec![self.goal(&F::neg((**b).clone()), r)])
                    }
                }
                F::Or(a, b) => {
                    let parts = split(self.rng, r, 2)?;
                    let da = self.goal(&F::neg((**a).clone()), parts[0]);
                    let db = self.goal(&F::neg((**b).clone()), parts[1]);
                    D::node(NegOrI, g, vec![da, db])
                }
            },
        })
    }

    fn eliminate(&mut self, rule: NdRuleId, goal: &Formula, r: usize) -> Option<Derivation> {
        use Derivation as D;
        use Formula as F;
        use NdRuleId::*;
        let g = goal.clone();
        let neg = |f: &Formula| F::neg(f.clone());
        Some(match rule {
            AndE1 => {
                let side = self.side();
                if self.rng.gen_bool(0.5) {
                    D::node(AndE1, g.clone(), vec![self.major(&F::and(g, side), r)])
                } else {
                    D::node(AndE2, g.clone(), vec![self.major(&F::and(side, g), r)])
                }
            }
            ImpE => {
                let parts = split(self.rng, r, 2)?;
                let side = self.side();
                let major = self.major(&F::imp(side.clone(), g.clone()), parts[0]);
                D::node(ImpE, g, vec![major, self.goal(&side, parts[1])])
            }
            NegNegE => D::node(NegNegE, g.clone(), vec![self.major(&neg(&neg(&g)), r)]),
            NegImpE => {
                let F::Neg(b) = goal else { return None };
                let parts = split(self.rng, r, 2)?;
                let side = self.side();
                let major = self.major(&neg(&F::imp(side.clone(), (**b).clone())), parts[0]);
                D::node(NegImpE, g, vec![major, self.goal(&side, parts[1])])
            }
            NegOrE1 => {
                let F::Neg(a) = goal else { return None };
                let side = self.side();
                if self.rng.gen_bool(0.5) {
                    D::node(NegOrE1, g, vec![self.major(&neg(&F::or((**a).clone(), side)), r)])
                } else {
                    D::node(NegOrE2, g, vec![self.major(&neg(&F::or(side, (**a).clone())), r)])
                }
            }
            OrE | NegAndE => {
                let parts = split(self.rng, r, 3)?;
                let (s1, s2) = (self.side(), self.side());
                let (major, h1, h2) = if rule == OrE {
                    (F::or(s1.clone(), s2.clone()), s1, s2)
                } else {
                    (neg(&F::and(s1.clone(), s2.clone())), neg(&s1), neg(&s2))
                };
                let x = self.labels.fresh();
                let m = self.major(&major, parts[0]);
                let b1 = self.under(h1, x, &g, parts[1]);
                let b2 = self.under(h2, x, &g, parts[2]);
                D::discharging(rule, g, x, vec![m, b1, b2])
            }
            Em | Gem => {
                let parts = split(self.rng, r, 2)?;
                let a = self.g.formulas.atom(self.rng);
                let first = if rule == Em { neg(&a) } else { F::imp(a.clone(), self.side()) };
                let x = self.labels.fresh();
                let b1 = self.under(first, x, &g, parts[0]);
                let b2 = self.under(a, x, &g, parts[1]);
                D::discharging(rule, g, x, vec![b1, b2])
            }
            _ => return None,
        })
    }

    /// Wraps `s` in a redex whose result is again `end(s)`.
    fn plant(&mut self, s: Derivation) -> Derivation {
        use Derivation as D;
        use Formula as F;
        use NdRuleId::*;
        let g = s.formula.clone();
        let mut open = vec![];
        open_leaf_formulas(&s, &mut open);
        let mut kinds = vec![0, 1, 2, 3, 4, 5];
        if let F::Neg(inner) = &g {
            kinds.push(6);
            if !matches!(inner.as_ref(), F::Neg(_)) {
                kinds.push(7);
            }
        }
        if self.sys.has_em() {
            kinds.push(8);
        }
        if self.sys.has_gem() {
            kinds.push(9);
        }
        let copy = |b: &mut Self, d: &Derivation| freshen(d, &mut b.labels);
        match *kinds.choose(self.rng).expect("nonempty") {
            0 => {
                let nn = D::node(NegNegI, F::neg(F::neg(g.clone())), vec![s]);
                D::node(NegNegE, g, vec![nn])
            }
            1 => {
                let side = self.side();
                let pair = D::node(AndI, F::and(g.clone(), side.clone()), vec![s, D::assume(side)]);
                D::node(AndE1, g, vec![pair])
            }
            2 => {
                // discharge some open assumption of s, then apply to a fresh derivation of it
                let a = open.choose(self.rng).cloned().unwrap_or_else(|| self.side());
                let x = self.labels.fresh();
                let mut body = s;
                bind_open(&mut body, &a, x);
                let lam = D::discharging(ImpI, F::imp(a.clone(), g.clone()), x, vec![body]);
                let budget = self.rng.gen_range(1..=4);
                let arg = self.goal(&a, budget);
                D::node(ImpE, g, vec![lam, arg])
            }
            3 => {
                let a = open.choose(self.rng).cloned().unwrap_or_else(|| self.side());
                let other = self.side();
                let x = self.labels.fresh();
                let mut left = s.clone();
                bind_open(&mut left, &a, x);
                let right = copy(self, &s);
                let inj = D::node(OrI1, F::or(a.clone(), other.clone()), vec![self.goal(&a, 2)]);
                D::discharging(OrE, g, x, vec![inj, left, right])
            }
            4 => {
                // and_E1 over a case split on an assumption
                let side = self.side();
                let (u, v) = (self.side(), self.side());
                let x = self.labels.fresh();
                let conj = F::and(g.clone(), side.clone());
                let b1 = D::node(AndI, conj.clone(), vec![s.clone(), D::assume(side.clone())]);
                let b2 = D::node(AndI, conj.clone(), vec![copy(self, &s), D::assume(side)]);
                let case = D::discharging(OrE, conj, x, vec![D::assume(F::or(u, v)), b1, b2]);
                D::node(AndE1, g, vec![case])
            }
            5 => {
                // imp_E over a neg_and_E case split
                let a = self.side();
                let (u, v) = (self.side(), self.side());
                let x = self.labels.fresh();
                let imp = F::imp(a.clone(), g.clone());
                let lam = |b: &mut Self, body: Derivation| {
                    let y = b.labels.fresh();
                    D::discharging(ImpI, imp.clone(), y, vec![body])
                };
                let b1 = lam(self, s.clone());
                let s2 = copy(self, &s);
                let b2 = lam(self, s2);
                let case = D::discharging(NegAndE, imp.clone(), x, vec![D::assume(F::neg(F::and(u, v))), b1, b2]);
                D::node(ImpE, g, vec![case, D::assume(a)])
            }
            6 => {
                let F::Neg(b) = &g else { unreachable!() };
                let a = open.choose(self.rng).cloned().unwrap_or_else(|| self.side());
                let x = self.labels.fresh();
                let mut body = s;
                bind_open(&mut body, &a, x);
                let lam = D::discharging(NegImpI, F::neg(F::imp(a.clone(), (**b).clone())), x, vec![body]);
                let arg = self.goal(&a, 3);
                D::node(NegImpE, g, vec![lam, arg])
            }
            7 => {
                let F::Neg(a) = &g else { unreachable!() };
                let side = self.side();
                let intro = D::node(NegOrI, F::neg(F::or((**a).clone(), side.clone())), vec![s, D::assume(F::neg(side))]);
                D::node(NegOrE1, g, vec![intro])
            }
            k => {
                let rule = if k == 8 { Em } else { Gem };
                let side = self.side();
                let a = self.g.formulas.atom(self.rng);
                let x = self.labels.fresh();
                let conj = F::and(g.clone(), side.clone());
                let first_hyp = if rule == Em { F::neg(a.clone()) } else { F::imp(a.clone(), side.clone()) };
                let b1 = D::node(AndI, conj.clone(), vec![s.clone(), D::assume(side.clone())]);
                let s2 = copy(self, &s);
                let b2 = D::node(AndI, conj.clone(), vec![s2, D::assume(side.clone())]);
                let mut b1 = b1;
                bind_open(&mut b1, &first_hyp, x);
                let mut b2 = b2;
                bind_open(&mut b2, &a, x);
                let case = D::discharging(rule, conj, x, vec![b1, b2]);
                D::node(AndE1, g, vec![case])
            }
        }
    }
}

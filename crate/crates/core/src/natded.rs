//! Natural-deduction derivations for nC, nC3, nMC and nCN with explicit
//! discharge labels, their checker, and the normality predicate.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{self, Formula, ParseError};
use crate::sequent::{CalculusId, UnknownName};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NdSystemId {
    Nc,
    Nc3,
    Nmc,
    Ncn,
}

impl NdSystemId {
    pub const ALL: [NdSystemId; 4] = [NdSystemId::Nc, NdSystemId::Nc3, NdSystemId::Nmc, NdSystemId::Ncn];

    pub fn name(self) -> &'static str {
        match self {
            NdSystemId::Nc => "nc",
            NdSystemId::Nc3 => "nc3",
            NdSystemId::Nmc => "nmc",
            NdSystemId::Ncn => "ncn",
        }
    }

    pub fn has_em(self) -> bool {
        matches!(self, NdSystemId::Nc3 | NdSystemId::Ncn)
    }

    pub fn has_gem(self) -> bool {
        matches!(self, NdSystemId::Nmc | NdSystemId::Ncn)
    }

    pub fn admits(self, rule: NdRuleId) -> bool {
        match rule {
            NdRuleId::Em => self.has_em(),
            NdRuleId::Gem => self.has_gem(),
            _ => true,
        }
    }

    /// The sequent calculus whose theorems match this system's.
    pub fn paired(self) -> CalculusId {
        match self {
            NdSystemId::Nc => CalculusId::Sc,
            NdSystemId::Nc3 => CalculusId::Sc3,
            NdSystemId::Nmc => CalculusId::SmcStar,
            NdSystemId::Ncn => CalculusId::ScnStar,
        }
    }

    /// Inverse of [`NdSystemId::paired`]; `sMC` and `sCN` map like their starred forms.
    pub fn for_calculus(calc: CalculusId) -> Option<NdSystemId> {
        match calc {
            CalculusId::Sc => Some(NdSystemId::Nc),
            CalculusId::Sc3 => Some(NdSystemId::Nc3),
            CalculusId::Smc | CalculusId::SmcStar => Some(NdSystemId::Nmc),
            CalculusId::Scn | CalculusId::ScnStar => Some(NdSystemId::Ncn),
            CalculusId::Ljp | CalculusId::LjpPeirce => None,
        }
    }
}

impl fmt::Display for NdSystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NdSystemId {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase();
        NdSystemId::ALL.into_iter().find(|n| n.name() == norm).ok_or_else(|| UnknownName(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NdRuleId {
    Assumption,
    ImpI,
    ImpE,
    AndI,
    AndE1,
    AndE2,
    OrI1,
    OrI2,
    OrE,
    NegNegI,
    NegNegE,
    NegImpI,
    NegImpE,
    NegAndI1,
    NegAndI2,
    NegAndE,
    NegOrI,
    NegOrE1,
    NegOrE2,
    Em,
    Gem,
}

impl NdRuleId {
    pub const ALL: [NdRuleId; 21] = [
        NdRuleId::Assumption,
        NdRuleId::ImpI,
        NdRuleId::ImpE,
        NdRuleId::AndI,
        NdRuleId::AndE1,
        NdRuleId::AndE2,
        NdRuleId::OrI1,
        NdRuleId::OrI2,
        NdRuleId::OrE,
        NdRuleId::NegNegI,
        NdRuleId::NegNegE,
        NdRuleId::NegImpI,
        NdRuleId::NegImpE,
        NdRuleId::NegAndI1,
        NdRuleId::NegAndI2,
        NdRuleId::NegAndE,
        NdRuleId::NegOrI,
        NdRuleId::NegOrE1,
        NdRuleId::NegOrE2,
        NdRuleId::Em,
        NdRuleId::Gem,
    ];

    pub fn as_str(self) -> &'static str {
        use NdRuleId::*;
        match self {
            Assumption => "assumption",
            ImpI => "imp_I",
            ImpE => "imp_E",
            AndI => "and_I",
            AndE1 => "and_E1",
            AndE2 => "and_E2",
            OrI1 => "or_I1",
            OrI2 => "or_I2",
            OrE => "or_E",
            NegNegI => "negneg_I",
            NegNegE => "negneg_E",
            NegImpI => "neg_imp_I",
            NegImpE => "neg_imp_E",
            NegAndI1 => "neg_and_I1",
            NegAndI2 => "neg_and_I2",
            NegAndE => "neg_and_E",
            NegOrI => "neg_or_I",
            NegOrE1 => "neg_or_E1",
            NegOrE2 => "neg_or_E2",
            Em => "EM",
            Gem => "GEM",
        }
    }

    pub fn arity(self) -> usize {
        use NdRuleId::*;
        match self {
            Assumption => 0,
            ImpI | AndE1 | AndE2 | OrI1 | OrI2 | NegNegI | NegNegE | NegImpI | NegAndI1 | NegAndI2 | NegOrE1
            | NegOrE2 => 1,
            ImpE | AndI | NegImpE | NegOrI | Em | Gem => 2,
            OrE | NegAndE => 3,
        }
    }

    /// `(EM)` and `(GEM)` count as introductions.
    pub fn is_introduction(self) -> bool {
        use NdRuleId::*;
        matches!(self, ImpI | AndI | OrI1 | OrI2 | NegNegI | NegImpI | NegAndI1 | NegAndI2 | NegOrI | Em | Gem)
    }

    pub fn is_elimination(self) -> bool {
        self != NdRuleId::Assumption && !self.is_introduction()
    }

    /// Index of the major premise; eliminations only.
    pub fn major_premise(self) -> Option<usize> {
        self.is_elimination().then_some(0)
    }

    /// Premise indices through which this rule discharges assumptions.
    pub fn discharge_slots(self) -> &'static [usize] {
        use NdRuleId::*;
        match self {
            ImpI | NegImpI => &[0],
            OrE | NegAndE => &[1, 2],
            Em | Gem => &[0, 1],
            _ => &[],
        }
    }

    pub fn discharges(self) -> bool {
        !self.discharge_slots().is_empty()
    }
}

impl fmt::Display for NdRuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NdRuleId {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NdRuleId::ALL.into_iter().find(|r| r.as_str() == s).ok_or_else(|| UnknownName(s.to_string()))
    }
}

/// A derivation tree. Discharging nodes carry `discharge`, assumption leaves
/// carry `label`; a leaf is closed by the nearest ancestor discharging its
/// label through one of that ancestor's discharge slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub rule: NdRuleId,
    pub formula: Formula,
    pub premises: Vec<Derivation>,
    pub discharge: Option<u32>,
    pub label: Option<u32>,
}

impl Derivation {
    pub fn assume(formula: Formula) -> Self {
        Derivation { rule: NdRuleId::Assumption, formula, premises: vec![], discharge: None, label: None }
    }

    pub fn assume_labeled(formula: Formula, label: u32) -> Self {
        Derivation { label: Some(label), ..Self::assume(formula) }
    }

    pub fn node(rule: NdRuleId, formula: Formula, premises: Vec<Derivation>) -> Self {
        Derivation { rule, formula, premises, discharge: None, label: None }
    }

    pub fn discharging(rule: NdRuleId, formula: Formula, label: u32, premises: Vec<Derivation>) -> Self {
        Derivation { rule, formula, premises, discharge: Some(label), label: None }
    }

    pub fn end_formula(&self) -> &Formula {
        &self.formula
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(Derivation::node_count).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    pub fn at(&self, path: &[usize]) -> Option<&Derivation> {
        path.iter().try_fold(self, |n, &i| n.premises.get(i))
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Derivation> {
        path.iter().try_fold(self, |n, &i| n.premises.get_mut(i))
    }

    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Derivation)) {
        f(self);
        for p in &self.premises {
            p.visit(f);
        }
    }

    pub fn rules_used(&self) -> BTreeSet<NdRuleId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |n| {
            out.insert(n.rule);
        });
        out
    }

    /// Largest label or discharge mark in the tree.
    pub fn max_label(&self) -> Option<u32> {
        let mut best = None;
        self.visit(&mut |n| {
            best = best.max(n.discharge).max(n.label);
        });
        best
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(DerivationJson::from(self)).expect("derivation serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&DerivationJson::from(self)).expect("derivation serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self, NdError> {
        let raw: DerivationJson = serde_json::from_str(text)?;
        raw.decode(&mut vec![])
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self, NdError> {
        let raw: DerivationJson = serde_json::from_value(value)?;
        raw.decode(&mut vec![])
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(d: &Derivation, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "{:indent$}{}  [{}", "", d.formula, d.rule, indent = depth * 2)?;
            if let Some(x) = d.discharge {
                write!(f, " /{x}")?;
            }
            if let Some(x) = d.label {
                write!(f, " ^{x}")?;
            }
            writeln!(f, "]")?;
            d.premises.iter().try_for_each(|p| go(p, depth + 1, f))
        }
        go(self, 0, f)
    }
}

#[derive(Debug, Error)]
pub enum NdError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("at node {path:?}: {source}")]
    Formula { path: Vec<usize>, source: ParseError },
    #[error("at node {path:?}: {source}")]
    Rule { path: Vec<usize>, source: UnknownName },
}

#[derive(Serialize, Deserialize)]
struct DerivationJson {
    rule: String,
    formula: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    discharge: Option<Option<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<Option<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    premises: Option<Vec<DerivationJson>>,
}

impl From<&Derivation> for DerivationJson {
    fn from(d: &Derivation) -> Self {
        let leaf = d.rule == NdRuleId::Assumption;
        DerivationJson {
            rule: d.rule.as_str().to_string(),
            formula: d.formula.to_string(),
            discharge: (!leaf).then_some(d.discharge),
            label: leaf.then_some(d.label),
            premises: (!leaf).then(|| d.premises.iter().map(DerivationJson::from).collect()),
        }
    }
}

impl DerivationJson {
    fn decode(self, path: &mut Vec<usize>) -> Result<Derivation, NdError> {
        let rule = self.rule.parse::<NdRuleId>().map_err(|source| NdError::Rule { path: path.clone(), source })?;
        let formula = formula::parse(&self.formula).map_err(|source| NdError::Formula { path: path.clone(), source })?;
        let mut premises = Vec::new();
        for (i, p) in self.premises.unwrap_or_default().into_iter().enumerate() {
            path.push(i);
            premises.push(p.decode(path)?);
            path.pop();
        }
        Ok(Derivation { rule, formula, premises, discharge: self.discharge.flatten(), label: self.label.flatten() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NdFaultKind {
    RuleNotInSystem,
    ArityMismatch { expected: usize, found: usize },
    SchemaMismatch(String),
    DischargeScope(String),
}

impl fmt::Display for NdFaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NdFaultKind::RuleNotInSystem => f.write_str("rule not in system"),
            NdFaultKind::ArityMismatch { expected, found } => {
                write!(f, "arity mismatch: expected {expected} premises, found {found}")
            }
            NdFaultKind::SchemaMismatch(why) => write!(f, "schema mismatch: {why}"),
            NdFaultKind::DischargeScope(why) => write!(f, "discharge scope violation: {why}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NdFault {
    pub path: Vec<usize>,
    pub rule: NdRuleId,
    pub kind: NdFaultKind,
}

impl fmt::Display for NdFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {:?} ({}): {}", self.path, self.rule, self.kind)
    }
}

impl std::error::Error for NdFault {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NdCheckReport {
    pub nodes_checked: usize,
    pub fault: Option<NdFault>,
}

impl NdCheckReport {
    pub fn is_valid(&self) -> bool {
        self.fault.is_none()
    }

    pub fn into_result(self) -> Result<(), NdFault> {
        match self.fault {
            None => Ok(()),
            Some(f) => Err(f),
        }
    }
}

/// Where a label is visible while walking down the tree.
#[derive(Clone, Debug)]
enum Scope {
    /// Bound by the node at `binder` through premise `slot`.
    Open { binder: Vec<usize>, slot: usize },
    /// The nearest binder for this label is above, but not through a discharge slot.
    Blocked { binder: Vec<usize> },
}

/// The formula each discharge slot of `d` binds, when it is fixed by the conclusion.
fn fixed_discharge(d: &Derivation, slot: usize) -> Option<Formula> {
    use Formula as F;
    use NdRuleId::*;
    match (d.rule, &d.formula, slot) {
        (ImpI, F::Imp(a, _), 0) => Some((**a).clone()),
        (NegImpI, F::Neg(inner), 0) => match inner.as_ref() {
            F::Imp(a, _) => Some((**a).clone()),
            _ => None,
        },
        (OrE, _, 1 | 2) => match d.premises.first().map(|p| &p.formula) {
            Some(F::Or(a, b)) => Some(if slot == 1 { (**a).clone() } else { (**b).clone() }),
            _ => None,
        },
        (NegAndE, _, 1 | 2) => match d.premises.first().map(|p| &p.formula) {
            Some(F::Neg(inner)) => match inner.as_ref() {
                F::And(a, b) => Some(F::neg(if slot == 1 { (**a).clone() } else { (**b).clone() })),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

/// Checks every node of `d` against the rule table of `sys`, root first,
/// and then the binding of every labelled leaf.
pub fn check_derivation(sys: NdSystemId, d: &Derivation) -> NdCheckReport {
    let mut nodes_checked = 0;
    let mut path = Vec::new();
    let mut bound: HashMap<Vec<usize>, Vec<(usize, Formula, Vec<usize>)>> = HashMap::new();
    let mut scopes: HashMap<u32, Scope> = HashMap::new();
    let fault = check_rec(sys, d, &mut path, &mut scopes, &mut bound, &mut nodes_checked);
    NdCheckReport { nodes_checked, fault }
}

type Bound = HashMap<Vec<usize>, Vec<(usize, Formula, Vec<usize>)>>;

fn check_rec(
    sys: NdSystemId,
    node: &Derivation,
    path: &mut Vec<usize>,
    scopes: &mut HashMap<u32, Scope>,
    bound: &mut Bound,
    count: &mut usize,
) -> Option<NdFault> {
    *count += 1;
    let fault = |kind, path: &Vec<usize>| Some(NdFault { path: path.clone(), rule: node.rule, kind });
    if let Err(kind) = check_node(sys, node) {
        return fault(kind, path);
    }
    if node.rule == NdRuleId::Assumption {
        let x = node.label?;
        return match scopes.get(&x) {
            None => fault(NdFaultKind::DischargeScope(format!("label {x} is discharged by no ancestor")), path),
            Some(Scope::Blocked { binder }) => fault(NdFaultKind::DischargeScope(format!(
                "label {x} is discharged at node {binder:?}, but this leaf is outside its discharged premises"
            )), path),
            Some(Scope::Open { binder, slot }) => {
                bound.entry(binder.clone()).or_default().push((*slot, node.formula.clone(), path.clone()));
                None
            }
        };
    }
    for (i, p) in node.premises.iter().enumerate() {
        let saved = node.discharge.map(|x| {
            let here = if node.rule.discharge_slots().contains(&i) {
                Scope::Open { binder: path.clone(), slot: i }
            } else {
                Scope::Blocked { binder: path.clone() }
            };
            (x, scopes.insert(x, here))
        });
        path.push(i);
        let sub = check_rec(sys, p, path, scopes, bound, count);
        path.pop();
        if let Some((x, old)) = saved {
            match old {
                Some(s) => scopes.insert(x, s),
                None => scopes.remove(&x),
            };
        }
        if sub.is_some() {
            return sub;
        }
    }
    if node.discharge.is_some() {
        let leaves = bound.remove(path.as_slice()).unwrap_or_default();
        if let Err(why) = check_bound_leaves(node, &leaves) {
            return fault(NdFaultKind::DischargeScope(why), path);
        }
    }
    None
}

fn check_bound_leaves(node: &Derivation, leaves: &[(usize, Formula, Vec<usize>)]) -> Result<(), String> {
    let wrong = |f: &Formula, p: &Vec<usize>, want: &str| Err(format!("leaf {p:?} is {f}, but the discharged assumption is {want}"));
    match node.rule {
        NdRuleId::Em | NdRuleId::Gem => {
            // side formulas are read off the discharged leaves
            let side = |slot: usize| leaves.iter().filter(move |(s, _, _)| *s == slot);
            let mut alpha: Option<&Formula> = None;
            for (_, f, p) in side(1) {
                match alpha {
                    Some(a) if a != f => return wrong(f, p, &a.to_string()),
                    _ => alpha = Some(f),
                }
            }
            let mut beta: Option<&Formula> = None;
            for (_, f, p) in side(0) {
                let (a, b) = match (node.rule, f) {
                    (NdRuleId::Em, Formula::Neg(a)) => (a.as_ref(), None),
                    (NdRuleId::Gem, Formula::Imp(a, b)) => (a.as_ref(), Some(b.as_ref())),
                    _ => {
                        let shape = if node.rule == NdRuleId::Em { "a negation ~a" } else { "an implication a -> b" };
                        return wrong(f, p, shape);
                    }
                };
                match alpha {
                    Some(x) if x != a => return wrong(f, p, &format!("built on {x}")),
                    _ => alpha = Some(a),
                }
                match (beta, b) {
                    (Some(y), Some(b)) if y != b => return wrong(f, p, &format!("{} -> {y}", alpha.unwrap())),
                    (None, Some(b)) => beta = Some(b),
                    _ => {}
                }
            }
            Ok(())
        }
        _ => {
            for (slot, f, p) in leaves {
                let want = fixed_discharge(node, *slot).expect("schema checked");
                if *f != want {
                    return wrong(f, p, &want.to_string());
                }
            }
            Ok(())
        }
    }
}

fn check_node(sys: NdSystemId, node: &Derivation) -> Result<(), NdFaultKind> {
    use Formula as F;
    use NdRuleId::*;

    if !sys.admits(node.rule) {
        return Err(NdFaultKind::RuleNotInSystem);
    }
    if node.premises.len() != node.rule.arity() {
        return Err(NdFaultKind::ArityMismatch { expected: node.rule.arity(), found: node.premises.len() });
    }
    if node.discharge.is_some() && !node.rule.discharges() {
        return Err(NdFaultKind::SchemaMismatch(format!("{} discharges nothing", node.rule)));
    }
    if node.label.is_some() && node.rule != Assumption {
        return Err(NdFaultKind::SchemaMismatch("only assumptions carry a label".into()));
    }
    let g = &node.formula;
    let ps: Vec<&Formula> = node.premises.iter().map(|p| &p.formula).collect();
    let bad = |what: String| Err(NdFaultKind::SchemaMismatch(what));
    let expect = |what: &str, want: &Formula, found: &Formula| {
        if want == found {
            Ok(())
        } else {
            bad(format!("{what}: expected {want}, found {found}"))
        }
    };
    let neg_inner = |f: &Formula| match f {
        F::Neg(x) => Some(x.as_ref().clone()),
        _ => None,
    };

    match node.rule {
        Assumption => Ok(()),
        ImpI => match g {
            F::Imp(_, b) => expect("premise", b, ps[0]),
            _ => bad(format!("imp_I concludes an implication, found {g}")),
        },
        ImpE => match ps[0] {
            F::Imp(a, b) => {
                expect("minor premise", a, ps[1])?;
                expect("conclusion", b, g)
            }
            other => bad(format!("major premise {other} is not an implication")),
        },
        AndI => match g {
            F::And(a, b) => {
                expect("premise 1", a, ps[0])?;
                expect("premise 2", b, ps[1])
            }
            _ => bad(format!("and_I concludes a conjunction, found {g}")),
        },
        AndE1 | AndE2 => match ps[0] {
            F::And(a, b) => expect("conclusion", if node.rule == AndE1 { a } else { b }, g),
            other => bad(format!("major premise {other} is not a conjunction")),
        },
        OrI1 | OrI2 => match g {
            F::Or(a, b) => expect("premise", if node.rule == OrI1 { a } else { b }, ps[0]),
            _ => bad(format!("{} concludes a disjunction, found {g}", node.rule)),
        },
        OrE => match ps[0] {
            F::Or(..) => {
                expect("premise 2", g, ps[1])?;
                expect("premise 3", g, ps[2])
            }
            other => bad(format!("major premise {other} is not a disjunction")),
        },
        NegNegI => match g.double_neg_body() {
            Some(a) => expect("premise", a, ps[0]),
            None => bad(format!("negneg_I concludes a double negation, found {g}")),
        },
        NegNegE => match ps[0].double_neg_body() {
            Some(a) => expect("conclusion", a, g),
            None => bad(format!("major premise {} is not a double negation", ps[0])),
        },
        NegImpI => match neg_inner(g) {
            Some(F::Imp(_, b)) => expect("premise", &F::neg((*b).clone()), ps[0]),
            _ => bad(format!("neg_imp_I concludes a negated implication, found {g}")),
        },
        NegImpE => match neg_inner(ps[0]) {
            Some(F::Imp(a, b)) => {
                expect("minor premise", &a, ps[1])?;
                expect("conclusion", &F::neg((*b).clone()), g)
            }
            _ => bad(format!("major premise {} is not a negated implication", ps[0])),
        },
        NegAndI1 | NegAndI2 => match neg_inner(g) {
            Some(F::And(a, b)) => {
                let side = if node.rule == NegAndI1 { a } else { b };
                expect("premise", &F::neg((*side).clone()), ps[0])
            }
            _ => bad(format!("{} concludes a negated conjunction, found {g}", node.rule)),
        },
        NegAndE => match neg_inner(ps[0]) {
            Some(F::And(..)) => {
                expect("premise 2", g, ps[1])?;
                expect("premise 3", g, ps[2])
            }
            _ => bad(format!("major premise {} is not a negated conjunction", ps[0])),
        },
        NegOrI => match neg_inner(g) {
            Some(F::Or(a, b)) => {
                expect("premise 1", &F::neg((*a).clone()), ps[0])?;
                expect("premise 2", &F::neg((*b).clone()), ps[1])
            }
            _ => bad(format!("neg_or_I concludes a negated disjunction, found {g}")),
        },
        NegOrE1 | NegOrE2 => match neg_inner(ps[0]) {
            Some(F::Or(a, b)) => {
                let side = if node.rule == NegOrE1 { a } else { b };
                expect("conclusion", &F::neg((*side).clone()), g)
            }
            _ => bad(format!("major premise {} is not a negated disjunction", ps[0])),
        },
        Em | Gem => {
            expect("premise 1", g, ps[0])?;
            expect("premise 2", g, ps[1])
        }
    }
}

/// For each assumption leaf, the path of the node that closes it.
pub(crate) fn binders(d: &Derivation) -> HashMap<Vec<usize>, Vec<usize>> {
    fn go(node: &Derivation, path: &mut Vec<usize>, scopes: &mut HashMap<u32, Scope>, out: &mut HashMap<Vec<usize>, Vec<usize>>) {
        if node.rule == NdRuleId::Assumption {
            if let Some(Scope::Open { binder, .. }) = node.label.and_then(|x| scopes.get(&x)) {
                out.insert(path.clone(), binder.clone());
            }
            return;
        }
        for (i, p) in node.premises.iter().enumerate() {
            let saved = node.discharge.map(|x| {
                let here = if node.rule.discharge_slots().contains(&i) {
                    Scope::Open { binder: path.clone(), slot: i }
                } else {
                    Scope::Blocked { binder: path.clone() }
                };
                (x, scopes.insert(x, here))
            });
            path.push(i);
            go(p, path, scopes, out);
            path.pop();
            if let Some((x, old)) = saved {
                match old {
                    Some(s) => scopes.insert(x, s),
                    None => scopes.remove(&x),
                };
            }
        }
    }
    let mut out = HashMap::new();
    go(d, &mut vec![], &mut HashMap::new(), &mut out);
    out
}

/// Formulas of the leaves that no discharge inside `d` closes.
pub fn open_assumptions(d: &Derivation) -> BTreeSet<Formula> {
    let closed = binders(d);
    let mut out = BTreeSet::new();
    let mut path = Vec::new();
    collect_open(d, &mut path, &closed, &mut out);
    out
}

fn collect_open(d: &Derivation, path: &mut Vec<usize>, closed: &HashMap<Vec<usize>, Vec<usize>>, out: &mut BTreeSet<Formula>) {
    if d.rule == NdRuleId::Assumption {
        if !closed.contains_key(path.as_slice()) {
            out.insert(d.formula.clone());
        }
        return;
    }
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        collect_open(p, path, closed, out);
        path.pop();
    }
}

pub fn end_formula(d: &Derivation) -> &Formula {
    &d.formula
}

/// An occurrence that is the conclusion of an introduction, `or_E` or
/// `neg_and_E` and the major premise of an elimination.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MaxOccurrence {
    pub path: Vec<usize>,
    pub formula: Formula,
}

pub(crate) fn is_max_candidate(rule: NdRuleId) -> bool {
    rule.is_introduction() || matches!(rule, NdRuleId::OrE | NdRuleId::NegAndE)
}

/// Maximum formulas in leftmost-innermost order of the eliminations they feed.
pub fn maximum_formulas(d: &Derivation) -> Vec<MaxOccurrence> {
    fn go(d: &Derivation, path: &mut Vec<usize>, out: &mut Vec<MaxOccurrence>) {
        for (i, p) in d.premises.iter().enumerate() {
            path.push(i);
            go(p, path, out);
            path.pop();
        }
        if let Some(m) = d.rule.major_premise() {
            let major = &d.premises[m];
            if is_max_candidate(major.rule) {
                let mut at = path.clone();
                at.push(m);
                out.push(MaxOccurrence { path: at, formula: major.formula.clone() });
            }
        }
    }
    let mut out = Vec::new();
    go(d, &mut vec![], &mut out);
    out
}

pub fn is_normal(d: &Derivation) -> bool {
    fn go(d: &Derivation) -> bool {
        if let Some(m) = d.rule.major_premise() {
            if is_max_candidate(d.premises[m].rule) {
                return false;
            }
        }
        d.premises.iter().all(go)
    }
    go(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    pub(crate) fn aristotle() -> Derivation {
        let p = Derivation::assume_labeled(f("p"), 1);
        let nn = Derivation::node(NdRuleId::NegNegI, f("~~p"), vec![p]);
        Derivation::discharging(NdRuleId::NegImpI, f("~(p -> ~p)"), 1, vec![nn])
    }

    fn negneg_detour() -> Derivation {
        let nn = Derivation::node(NdRuleId::NegNegI, f("~~p"), vec![Derivation::assume(f("p"))]);
        Derivation::node(NdRuleId::NegNegE, f("p"), vec![nn])
    }

    #[test]
    fn aristotle_checks_and_is_closed_and_normal() {
        let d = aristotle();
        assert!(check_derivation(NdSystemId::Nc, &d).is_valid());
        assert!(open_assumptions(&d).is_empty());
        assert_eq!(end_formula(&d), &f("~(p -> ~p)"));
        assert!(maximum_formulas(&d).is_empty());
        assert!(is_normal(&d));
    }

    #[test]
    fn em_is_rejected_in_nc() {
        let prem = |a: &str| Derivation::assume_labeled(f(a), 2);
        let q1 = Derivation::node(NdRuleId::AndE2, f("q"), vec![Derivation::node(NdRuleId::AndI, f("~p & q"), vec![prem("~p"), Derivation::assume(f("q"))])]);
        let q2 = Derivation::node(NdRuleId::AndE2, f("q"), vec![Derivation::node(NdRuleId::AndI, f("p & q"), vec![prem("p"), Derivation::assume(f("q"))])]);
        let d = Derivation::discharging(NdRuleId::Em, f("q"), 2, vec![q1, q2]);
        let report = check_derivation(NdSystemId::Nc, &d);
        assert_eq!(report.fault.unwrap().kind, NdFaultKind::RuleNotInSystem);
        assert!(check_derivation(NdSystemId::Nc3, &d).is_valid());
        assert_eq!(open_assumptions(&d), BTreeSet::from([f("q")]));
    }

    #[test]
    fn vacuous_discharge() {
        let d = Derivation::discharging(NdRuleId::ImpI, f("p -> q"), 5, vec![Derivation::assume(f("q"))]);
        assert!(check_derivation(NdSystemId::Nc, &d).is_valid());
        assert_eq!(open_assumptions(&d), BTreeSet::from([f("q")]));
    }

    #[test]
    fn open_assumptions_of_modus_ponens() {
        let d = Derivation::node(NdRuleId::ImpE, f("q"), vec![Derivation::assume(f("p -> q")), Derivation::assume(f("p"))]);
        assert!(check_derivation(NdSystemId::Nc, &d).is_valid());
        assert_eq!(open_assumptions(&d), BTreeSet::from([f("p -> q"), f("p")]));
        assert_eq!(open_assumptions(&Derivation::assume(f("r"))), BTreeSet::from([f("r")]));
    }

    #[test]
    fn maximum_formula_examples() {
        let d = negneg_detour();
        assert!(check_derivation(NdSystemId::Nc, &d).is_valid());
        assert_eq!(maximum_formulas(&d), vec![MaxOccurrence { path: vec![0], formula: f("~~p") }]);
        assert!(!is_normal(&d));

        let lam = Derivation::discharging(NdRuleId::ImpI, f("p -> p"), 1, vec![Derivation::assume_labeled(f("p"), 1)]);
        let app = Derivation::node(NdRuleId::ImpE, f("p"), vec![lam, Derivation::assume(f("p"))]);
        assert_eq!(maximum_formulas(&app).len(), 1);
        assert!(is_normal(&Derivation::assume(f("p"))));
    }

    #[test]
    fn scope_violations() {
        // label bound through the major premise of or_E
        let major = Derivation::node(NdRuleId::OrI1, f("p | q"), vec![Derivation::assume_labeled(f("p"), 3)]);
        let d = Derivation::discharging(
            NdRuleId::OrE,
            f("p"),
            3,
            vec![major, Derivation::assume_labeled(f("p"), 3), Derivation::assume(f("p"))],
        );
        let fault = check_derivation(NdSystemId::Nc, &d).fault.unwrap();
        assert!(matches!(fault.kind, NdFaultKind::DischargeScope(_)));
        assert_eq!(fault.path, vec![0, 0]);

        // wrong formula under imp_I
        let d = Derivation::discharging(NdRuleId::ImpI, f("p -> q"), 1, vec![Derivation::assume_labeled(f("q"), 1)]);
        assert!(matches!(check_derivation(NdSystemId::Nc, &d).fault.unwrap().kind, NdFaultKind::DischargeScope(_)));

        // dangling label
        assert!(!check_derivation(NdSystemId::Nc, &Derivation::assume_labeled(f("p"), 9)).is_valid());

        // EM leaves that disagree on the side formula
        let d = Derivation::discharging(
            NdRuleId::Em,
            f("p"),
            1,
            vec![
                Derivation::node(NdRuleId::AndE2, f("p"), vec![Derivation::node(NdRuleId::AndI, f("~q & p"), vec![Derivation::assume_labeled(f("~q"), 1), Derivation::assume(f("p"))])]),
                Derivation::assume_labeled(f("p"), 1),
            ],
        );
        assert!(matches!(check_derivation(NdSystemId::Nc3, &d).fault.unwrap().kind, NdFaultKind::DischargeScope(_)));
    }

    #[test]
    fn schema_mismatch_is_pinpointed() {
        let bad = Derivation::node(NdRuleId::AndE1, f("q"), vec![Derivation::assume(f("p & q"))]);
        let d = Derivation::node(NdRuleId::OrI1, f("q | r"), vec![bad]);
        let fault = check_derivation(NdSystemId::Nc, &d).fault.unwrap();
        assert_eq!(fault.path, vec![0]);
        assert!(matches!(fault.kind, NdFaultKind::SchemaMismatch(_)));
    }

    #[test]
    fn json_round_trip() {
        let d = aristotle();
        let text = d.to_json_string();
        assert_eq!(Derivation::from_json_str(&text).unwrap(), d);
        let v = d.to_json();
        assert_eq!(v["rule"], "neg_imp_I");
        assert_eq!(v["discharge"], 1);
        assert_eq!(v["premises"][0]["premises"][0]["label"], 1);
        assert!(v["premises"][0]["premises"][0].get("premises").is_none());
        assert!(Derivation::from_json_str("{\"rule\": \"bogus\", \"formula\": \"p\"}").is_err());
    }

    #[test]
    fn rule_classification() {
        let intro: Vec<_> = NdRuleId::ALL.into_iter().filter(|r| r.is_introduction()).collect();
        assert_eq!(intro.len(), 11);
        assert!(NdRuleId::Em.is_introduction() && NdRuleId::Gem.is_introduction());
        assert_eq!(NdRuleId::ALL.into_iter().filter(|r| r.is_elimination()).count(), 9);
        for r in NdRuleId::ALL {
            assert_eq!(r.as_str().parse::<NdRuleId>().unwrap(), r);
        }
    }
}

//! Sequents with set contexts, rule-annotated sequent proofs and the proof
//! checker for the calculi `LJ+`, `LJ+ + Peirce`, `sC`, `sC3`, `sMC`, `sCN`,
//! `sMC*` and `sCN*`.
//!
//! Contexts are sets, so the checker validates each node as a set equation:
//! the conclusion context must be the union of the principal formulas and a
//! context that, together with the schema's side formulas, yields every
//! premise context.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{self, Formula, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    pub ctx: BTreeSet<Formula>,
    pub suc: Formula,
}

impl Sequent {
    pub fn new<I: IntoIterator<Item = Formula>>(ctx: I, suc: Formula) -> Self {
        Sequent { ctx: ctx.into_iter().collect(), suc }
    }

    /// `=> suc`
    pub fn goal(suc: Formula) -> Self {
        Sequent { ctx: BTreeSet::new(), suc }
    }

    /// Context formulas followed by the succedent.
    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.ctx.iter().chain(std::iter::once(&self.suc))
    }

    /// Context in printed-text order, the order used for serialization.
    pub fn sorted_ctx_text(&self) -> Vec<String> {
        let mut v: Vec<String> = self.ctx.iter().map(|f| f.to_string()).collect();
        v.sort();
        v
    }

    pub fn with_ctx<I: IntoIterator<Item = Formula>>(&self, extra: I) -> Sequent {
        let mut s = self.clone();
        s.ctx.extend(extra);
        s
    }

    pub fn has_primed_atom(&self) -> bool {
        self.formulas().any(Formula::has_primed_atom)
    }

    pub fn contains_neg(&self) -> bool {
        self.formulas().any(Formula::contains_neg)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx = self.sorted_ctx_text();
        if ctx.is_empty() {
            write!(f, "=> {}", self.suc)
        } else {
            write!(f, "{} => {}", ctx.join(", "), self.suc)
        }
    }
}

/// Parses `a, b => c`, `=> c` or a bare formula `c`.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    parse_sequent_with(text, false)
}

pub fn parse_sequent_with(text: &str, allow_primed: bool) -> Result<Sequent, ParseError> {
    let shift = |e: ParseError, by: usize| ParseError { offset: e.offset + by, expected: e.expected };
    let Some(arrow) = text.find("=>") else {
        return Ok(Sequent::goal(formula::parse_with(text, allow_primed)?));
    };
    let (lhs, rhs) = (&text[..arrow], &text[arrow + 2..]);
    if rhs.contains("=>") {
        return Err(ParseError { offset: arrow + 2 + rhs.find("=>").unwrap(), expected: vec!["formula"] });
    }
    let suc = formula::parse_with(rhs, allow_primed).map_err(|e| shift(e, arrow + 2))?;
    let mut ctx = BTreeSet::new();
    if !lhs.trim().is_empty() {
        let mut start = 0;
        for part in lhs.split(',') {
            ctx.insert(formula::parse_with(part, allow_primed).map_err(|e| shift(e, start))?);
            start += part.len() + 1;
        }
    }
    Ok(Sequent { ctx, suc })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CalculusId {
    Ljp,
    LjpPeirce,
    Sc,
    Sc3,
    Smc,
    Scn,
    SmcStar,
    ScnStar,
}

impl CalculusId {
    pub const ALL: [CalculusId; 8] = [
        CalculusId::Ljp,
        CalculusId::LjpPeirce,
        CalculusId::Sc,
        CalculusId::Sc3,
        CalculusId::Smc,
        CalculusId::Scn,
        CalculusId::SmcStar,
        CalculusId::ScnStar,
    ];

    pub const CONNEXIVE: [CalculusId; 6] = [
        CalculusId::Sc,
        CalculusId::Sc3,
        CalculusId::Smc,
        CalculusId::Scn,
        CalculusId::SmcStar,
        CalculusId::ScnStar,
    ];

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            CalculusId::Ljp => "ljp",
            CalculusId::LjpPeirce => "ljp-peirce",
            CalculusId::Sc => "sc",
            CalculusId::Sc3 => "sc3",
            CalculusId::Smc => "smc",
            CalculusId::Scn => "scn",
            CalculusId::SmcStar => "smc-star",
            CalculusId::ScnStar => "scn-star",
        }
    }

    pub fn is_connexive(self) -> bool {
        !matches!(self, CalculusId::Ljp | CalculusId::LjpPeirce)
    }

    pub fn has_ex_middle(self) -> bool {
        matches!(self, CalculusId::Sc3 | CalculusId::Scn | CalculusId::ScnStar)
    }

    pub fn has_peirce(self) -> bool {
        matches!(self, CalculusId::LjpPeirce | CalculusId::Smc | CalculusId::Scn)
    }

    pub fn has_g_ex_middle(self) -> bool {
        matches!(self, CalculusId::SmcStar | CalculusId::ScnStar)
    }

    /// `sMC*` and `sCN*` are decided through `sMC` and `sCN`.
    pub fn unstarred(self) -> CalculusId {
        match self {
            CalculusId::SmcStar => CalculusId::Smc,
            CalculusId::ScnStar => CalculusId::Scn,
            other => other,
        }
    }

    pub fn admits(self, rule: RuleId) -> bool {
        use RuleId::*;
        match rule {
            Init1 | Cut | ImpLeft | ImpRight | AndLeft | AndRight | OrLeft | OrRight1 | OrRight2 => true,
            Init2 | NegLeft | NegRight | NegImpLeft | NegImpRight | NegAndLeft | NegAndRight1
            | NegAndRight2 | NegOrLeft | NegOrRight => self.is_connexive(),
            ExMiddle => self.has_ex_middle(),
            Peirce => self.has_peirce(),
            GExMiddle => self.has_g_ex_middle(),
        }
    }

    pub fn rules(self) -> Vec<RuleId> {
        RuleId::ALL.iter().copied().filter(|r| self.admits(*r)).collect()
    }
}

impl fmt::Display for CalculusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CalculusId {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        CalculusId::ALL
            .into_iter()
            .find(|c| c.name() == norm)
            .ok_or_else(|| UnknownName(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown name {0:?}")]
pub struct UnknownName(pub String);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    Init1,
    Init2,
    Cut,
    ImpLeft,
    ImpRight,
    AndLeft,
    AndRight,
    OrLeft,
    OrRight1,
    OrRight2,
    NegLeft,
    NegRight,
    NegImpLeft,
    NegImpRight,
    NegAndLeft,
    NegAndRight1,
    NegAndRight2,
    NegOrLeft,
    NegOrRight,
    ExMiddle,
    Peirce,
    GExMiddle,
}

impl RuleId {
    pub const ALL: [RuleId; 22] = [
        RuleId::Init1,
        RuleId::Init2,
        RuleId::Cut,
        RuleId::ImpLeft,
        RuleId::ImpRight,
        RuleId::AndLeft,
        RuleId::AndRight,
        RuleId::OrLeft,
        RuleId::OrRight1,
        RuleId::OrRight2,
        RuleId::NegLeft,
        RuleId::NegRight,
        RuleId::NegImpLeft,
        RuleId::NegImpRight,
        RuleId::NegAndLeft,
        RuleId::NegAndRight1,
        RuleId::NegAndRight2,
        RuleId::NegOrLeft,
        RuleId::NegOrRight,
        RuleId::ExMiddle,
        RuleId::Peirce,
        RuleId::GExMiddle,
    ];

    pub fn as_str(self) -> &'static str {
        use RuleId::*;
        match self {
            Init1 => "init1",
            Init2 => "init2",
            Cut => "cut",
            ImpLeft => "imp_left",
            ImpRight => "imp_right",
            AndLeft => "and_left",
            AndRight => "and_right",
            OrLeft => "or_left",
            OrRight1 => "or_right1",
            OrRight2 => "or_right2",
            NegLeft => "neg_left",
            NegRight => "neg_right",
            NegImpLeft => "neg_imp_left",
            NegImpRight => "neg_imp_right",
            NegAndLeft => "neg_and_left",
            NegAndRight1 => "neg_and_right1",
            NegAndRight2 => "neg_and_right2",
            NegOrLeft => "neg_or_left",
            NegOrRight => "neg_or_right",
            ExMiddle => "ex_middle",
            Peirce => "peirce",
            GExMiddle => "g_ex_middle",
        }
    }

    pub fn arity(self) -> usize {
        use RuleId::*;
        match self {
            Init1 | Init2 => 0,
            ImpRight | AndLeft | OrRight1 | OrRight2 | NegLeft | NegRight | NegImpRight
            | NegAndRight1 | NegAndRight2 | NegOrLeft | Peirce => 1,
            Cut | ImpLeft | AndRight | OrLeft | NegImpLeft | NegAndLeft | NegOrRight | ExMiddle
            | GExMiddle => 2,
        }
    }

    /// Rules whose principal formula cannot be read off the succedent.
    pub fn needs_principal(self) -> bool {
        use RuleId::*;
        matches!(
            self,
            ImpLeft | AndLeft | OrLeft | NegLeft | NegImpLeft | NegAndLeft | NegOrLeft | ExMiddle | Peirce | GExMiddle
        )
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleId {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL.into_iter().find(|r| r.as_str() == s).ok_or_else(|| UnknownName(s.to_string()))
    }
}

/// The formula(s) a node exhibits beyond its conclusion sequent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Principal {
    None,
    One(Formula),
    /// Side formulas `a`, `b` of `(Peirce)` / `(g-ex-middle)`, standing for `a -> b`.
    Pair(Formula, Formula),
}

impl Principal {
    fn as_implication(&self) -> Option<(Formula, Formula)> {
        match self {
            Principal::Pair(a, b) => Some((a.clone(), b.clone())),
            Principal::One(Formula::Imp(a, b)) => Some(((**a).clone(), (**b).clone())),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SequentProof {
    pub conclusion: Sequent,
    pub rule: RuleId,
    pub principal: Principal,
    pub premises: Vec<SequentProof>,
}

impl SequentProof {
    pub fn new(conclusion: Sequent, rule: RuleId, principal: Principal, premises: Vec<SequentProof>) -> Self {
        SequentProof { conclusion, rule, principal, premises }
    }

    pub fn leaf(conclusion: Sequent, rule: RuleId) -> Self {
        SequentProof { conclusion, rule, principal: Principal::None, premises: vec![] }
    }

    pub fn is_cut_free(&self) -> bool {
        self.rule != RuleId::Cut && self.premises.iter().all(SequentProof::is_cut_free)
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(SequentProof::node_count).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(SequentProof::height).max().unwrap_or(0)
    }

    pub fn rules_used(&self) -> BTreeSet<RuleId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |n| {
            out.insert(n.rule);
        });
        out
    }

    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a SequentProof)) {
        f(self);
        for p in &self.premises {
            p.visit(f);
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&SequentProof> {
        path.iter().try_fold(self, |n, &i| n.premises.get(i))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ProofJson::from(self)).expect("proof serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ProofJson::from(self)).expect("proof serializes")
    }

    /// Decodes the JSON node format. Primed atoms are accepted only when
    /// `allow_primed` is set.
    pub fn from_json_str(text: &str, allow_primed: bool) -> Result<Self, SequentError> {
        let raw: ProofJson = serde_json::from_str(text)?;
        raw.decode(allow_primed, &mut vec![])
    }

    pub fn from_json(value: serde_json::Value, allow_primed: bool) -> Result<Self, SequentError> {
        let raw: ProofJson = serde_json::from_value(value)?;
        raw.decode(allow_primed, &mut vec![])
    }
}

#[derive(Debug, Error)]
pub enum SequentError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("at node {path:?}: {source}")]
    Formula { path: Vec<usize>, source: ParseError },
    #[error("at node {path:?}: {source}")]
    Rule { path: Vec<usize>, source: UnknownName },
    #[error("proof is not valid in {calc}: {fault}")]
    Invalid { calc: CalculusId, fault: ProofFault },
    #[error("proof contains a cut")]
    ContainsCut,
    #[error("formula {0} uses connexive negation, which {1} lacks")]
    OutsideLanguage(Formula, CalculusId),
}

#[derive(Serialize, Deserialize)]
struct SequentJson {
    ctx: Vec<String>,
    suc: String,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PrincipalJson {
    One(String),
    Pair([String; 2]),
}

#[derive(Serialize, Deserialize)]
struct ProofJson {
    rule: String,
    sequent: SequentJson,
    principal: Option<PrincipalJson>,
    #[serde(default)]
    premises: Vec<ProofJson>,
}

impl From<&SequentProof> for ProofJson {
    fn from(p: &SequentProof) -> Self {
        ProofJson {
            rule: p.rule.as_str().to_string(),
            sequent: SequentJson { ctx: p.conclusion.sorted_ctx_text(), suc: p.conclusion.suc.to_string() },
            principal: match &p.principal {
                Principal::None => None,
                Principal::One(f) => Some(PrincipalJson::One(f.to_string())),
                Principal::Pair(a, b) => Some(PrincipalJson::Pair([a.to_string(), b.to_string()])),
            },
            premises: p.premises.iter().map(ProofJson::from).collect(),
        }
    }
}

impl ProofJson {
    fn decode(self, allow_primed: bool, path: &mut Vec<usize>) -> Result<SequentProof, SequentError> {
        let formula = |s: &str, path: &Vec<usize>| {
            formula::parse_with(s, allow_primed).map_err(|source| SequentError::Formula { path: path.clone(), source })
        };
        let rule = self.rule.parse::<RuleId>().map_err(|source| SequentError::Rule { path: path.clone(), source })?;
        let ctx = self.sequent.ctx.iter().map(|s| formula(s, path)).collect::<Result<BTreeSet<_>, _>>()?;
        let suc = formula(&self.sequent.suc, path)?;
        let principal = match self.principal {
            None => Principal::None,
            Some(PrincipalJson::One(s)) => Principal::One(formula(&s, path)?),
            Some(PrincipalJson::Pair([a, b])) => Principal::Pair(formula(&a, path)?, formula(&b, path)?),
        };
        let mut premises = Vec::with_capacity(self.premises.len());
        for (i, p) in self.premises.into_iter().enumerate() {
            path.push(i);
            premises.push(p.decode(allow_primed, path)?);
            path.pop();
        }
        Ok(SequentProof { conclusion: Sequent { ctx, suc }, rule, principal, premises })
    }
}

/// Why a node fails to instantiate its rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaultKind {
    RuleNotInCalculus,
    ArityMismatch { expected: usize, found: usize },
    PrincipalMissing,
    SchemaMismatch(String),
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultKind::RuleNotInCalculus => f.write_str("rule not in calculus"),
            FaultKind::ArityMismatch { expected, found } => {
                write!(f, "arity mismatch: expected {expected} premises, found {found}")
            }
            FaultKind::PrincipalMissing => f.write_str("principal formula missing"),
            FaultKind::SchemaMismatch(why) => write!(f, "schema mismatch: {why}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofFault {
    /// Premise indices from the root.
    pub path: Vec<usize>,
    pub rule: RuleId,
    pub kind: FaultKind,
}

impl fmt::Display for ProofFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {:?} ({}): {}", self.path, self.rule, self.kind)
    }
}

impl std::error::Error for ProofFault {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub nodes_checked: usize,
    pub fault: Option<ProofFault>,
}

impl CheckReport {
    pub fn is_valid(&self) -> bool {
        self.fault.is_none()
    }

    pub fn into_result(self) -> Result<(), ProofFault> {
        match self.fault {
            None => Ok(()),
            Some(f) => Err(f),
        }
    }
}

/// Checks every node of `proof` against the rule table of `calc`, root first.
pub fn check_proof(calc: CalculusId, proof: &SequentProof) -> CheckReport {
    let mut nodes_checked = 0;
    let mut path = Vec::new();
    let fault = check_rec(calc, proof, &mut path, &mut nodes_checked);
    CheckReport { nodes_checked, fault }
}

fn check_rec(calc: CalculusId, node: &SequentProof, path: &mut Vec<usize>, count: &mut usize) -> Option<ProofFault> {
    *count += 1;
    if let Err(kind) = check_node(calc, node) {
        return Some(ProofFault { path: path.clone(), rule: node.rule, kind });
    }
    for (i, p) in node.premises.iter().enumerate() {
        path.push(i);
        if let Some(f) = check_rec(calc, p, path, count) {
            return Some(f);
        }
        path.pop();
    }
    None
}

fn mismatch(msg: String) -> FaultKind {
    FaultKind::SchemaMismatch(msg)
}

fn show(set: &BTreeSet<Formula>) -> String {
    let mut v: Vec<String> = set.iter().map(|f| f.to_string()).collect();
    v.sort();
    format!("{{{}}}", v.join(", "))
}

fn expect_eq(what: &str, expected: &Formula, found: &Formula) -> Result<(), FaultKind> {
    if expected == found {
        Ok(())
    } else {
        Err(mismatch(format!("{what}: expected {expected}, found {found}")))
    }
}

fn set_of<const N: usize>(fs: [Formula; N]) -> BTreeSet<Formula> {
    fs.into_iter().collect()
}

/// All premises share one context variable: `C = Q ∪ Γ`, `P_i = A_i ∪ Γ`.
fn shared_context(c: &BTreeSet<Formula>, q: &BTreeSet<Formula>, prems: &[(&BTreeSet<Formula>, BTreeSet<Formula>)]) -> Result<(), FaultKind> {
    if !q.is_subset(c) {
        return Err(mismatch(format!("principal {} not in conclusion context {}", show(q), show(c))));
    }
    let mut lower: BTreeSet<Formula> = c.difference(q).cloned().collect();
    let mut upper = c.clone();
    for (i, (p, a)) in prems.iter().enumerate() {
        if !a.is_subset(p) {
            return Err(mismatch(format!("premise {} context {} lacks side formulas {}", i + 1, show(p), show(a))));
        }
        lower.extend(p.difference(a).cloned());
        upper = upper.intersection(p).cloned().collect();
    }
    if lower.is_subset(&upper) {
        Ok(())
    } else {
        let stray: BTreeSet<Formula> = lower.difference(&upper).cloned().collect();
        Err(mismatch(format!("contexts do not fit the schema; unmatched formulas {}", show(&stray))))
    }
}

/// Premises carry separate contexts: `C = Q ∪ Γ ∪ Δ`, `P1 = A1 ∪ Γ`, `P2 = A2 ∪ Δ`.
fn split_context(
    c: &BTreeSet<Formula>,
    q: &BTreeSet<Formula>,
    (p1, a1): (&BTreeSet<Formula>, BTreeSet<Formula>),
    (p2, a2): (&BTreeSet<Formula>, BTreeSet<Formula>),
) -> Result<(), FaultKind> {
    if !q.is_subset(c) {
        return Err(mismatch(format!("principal {} not in conclusion context {}", show(q), show(c))));
    }
    for (i, (p, a)) in [(p1, &a1), (p2, &a2)].into_iter().enumerate() {
        if !a.is_subset(p) {
            return Err(mismatch(format!("premise {} context {} lacks side formulas {}", i + 1, show(p), show(a))));
        }
        let rest: BTreeSet<Formula> = p.difference(a).cloned().collect();
        if !rest.is_subset(c) {
            let stray: BTreeSet<Formula> = rest.difference(c).cloned().collect();
            return Err(mismatch(format!("premise {} carries {} absent from the conclusion", i + 1, show(&stray))));
        }
    }
    let missing: BTreeSet<Formula> = c.difference(q).filter(|f| !p1.contains(*f) && !p2.contains(*f)).cloned().collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(mismatch(format!("conclusion formulas {} come from no premise", show(&missing))))
    }
}

fn principal_one(node: &SequentProof) -> Result<&Formula, FaultKind> {
    match &node.principal {
        Principal::One(f) => Ok(f),
        Principal::None => Err(FaultKind::PrincipalMissing),
        Principal::Pair(..) => Err(mismatch("expected a single principal formula, found a pair".into())),
    }
}

fn optional_principal(node: &SequentProof, expected: &Formula) -> Result<(), FaultKind> {
    match &node.principal {
        Principal::None => Ok(()),
        Principal::One(f) => expect_eq("principal", expected, f),
        Principal::Pair(..) => Err(mismatch("unexpected principal pair".into())),
    }
}

fn check_node(calc: CalculusId, node: &SequentProof) -> Result<(), FaultKind> {
    use Formula as F;
    use RuleId::*;

    if !calc.admits(node.rule) {
        return Err(FaultKind::RuleNotInCalculus);
    }
    if node.premises.len() != node.rule.arity() {
        return Err(FaultKind::ArityMismatch { expected: node.rule.arity(), found: node.premises.len() });
    }
    let c = &node.conclusion.ctx;
    let g = &node.conclusion.suc;
    let ps: Vec<&Sequent> = node.premises.iter().map(|p| &p.conclusion).collect();
    let empty = BTreeSet::new;
    let bad_shape = |what: &str| Err(mismatch(format!("{what}, found succedent {g}")));

    match node.rule {
        Init1 => {
            if !g.is_atom() {
                return bad_shape("init1 needs an atomic succedent");
            }
            optional_principal(node, g)?;
            if !c.contains(g) {
                return Err(mismatch(format!("init1: {g} does not occur in the antecedent {}", show(c))));
            }
            Ok(())
        }
        Init2 => {
            if !(matches!(g, F::Neg(a) if a.is_atom())) {
                return bad_shape("init2 needs a negated atom as succedent");
            }
            optional_principal(node, g)?;
            if !c.contains(g) {
                return Err(mismatch(format!("init2: {g} does not occur in the antecedent {}", show(c))));
            }
            Ok(())
        }
        Cut => {
            let a = &ps[0].suc;
            optional_principal(node, a)?;
            expect_eq("premise 2 succedent", g, &ps[1].suc)?;
            split_context(c, &empty(), (&ps[0].ctx, empty()), (&ps[1].ctx, set_of([a.clone()])))
        }
        ImpLeft | NegImpLeft => {
            let pf = principal_one(node)?;
            let (a, side) = match (node.rule, pf) {
                (ImpLeft, F::Imp(a, b)) => ((**a).clone(), (**b).clone()),
                (NegImpLeft, F::Neg(inner)) => match inner.as_ref() {
                    F::Imp(a, b) => ((**a).clone(), F::neg((**b).clone())),
                    _ => return Err(mismatch(format!("principal {pf} is not a negated implication"))),
                },
                _ => return Err(mismatch(format!("principal {pf} has the wrong shape for {}", node.rule))),
            };
            expect_eq("premise 1 succedent", &a, &ps[0].suc)?;
            expect_eq("premise 2 succedent", g, &ps[1].suc)?;
            split_context(c, &set_of([pf.clone()]), (&ps[0].ctx, empty()), (&ps[1].ctx, set_of([side])))
        }
        ImpRight => {
            let F::Imp(a, b) = g else { return bad_shape("imp_right needs an implication") };
            optional_principal(node, g)?;
            expect_eq("premise succedent", b, &ps[0].suc)?;
            shared_context(c, &empty(), &[(&ps[0].ctx, set_of([(**a).clone()]))])
        }
        AndLeft | OrLeft | NegLeft | NegAndLeft | NegOrLeft => {
            let pf = principal_one(node)?;
            let sides: Vec<BTreeSet<Formula>> = match (node.rule, pf) {
                (AndLeft, F::And(a, b)) => vec![set_of([(**a).clone(), (**b).clone()])],
                (OrLeft, F::Or(a, b)) => vec![set_of([(**a).clone()]), set_of([(**b).clone()])],
                (NegLeft, f) if f.double_neg_body().is_some() => vec![set_of([f.double_neg_body().unwrap().clone()])],
                (NegAndLeft, F::Neg(inner)) if matches!(inner.as_ref(), F::And(..)) => {
                    let F::And(a, b) = inner.as_ref() else { unreachable!() };
                    vec![set_of([F::neg((**a).clone())]), set_of([F::neg((**b).clone())])]
                }
                (NegOrLeft, F::Neg(inner)) if matches!(inner.as_ref(), F::Or(..)) => {
                    let F::Or(a, b) = inner.as_ref() else { unreachable!() };
                    vec![set_of([F::neg((**a).clone()), F::neg((**b).clone())])]
                }
                _ => return Err(mismatch(format!("principal {pf} has the wrong shape for {}", node.rule))),
            };
            for (i, p) in ps.iter().enumerate() {
                expect_eq(&format!("premise {} succedent", i + 1), g, &p.suc)?;
            }
            let prems: Vec<_> = ps.iter().zip(sides).map(|(p, s)| (&p.ctx, s)).collect();
            shared_context(c, &set_of([pf.clone()]), &prems)
        }
        AndRight | NegOrRight => {
            let (a, b) = match (node.rule, g) {
                (AndRight, F::And(a, b)) => ((**a).clone(), (**b).clone()),
                (NegOrRight, F::Neg(inner)) => match inner.as_ref() {
                    F::Or(a, b) => (F::neg((**a).clone()), F::neg((**b).clone())),
                    _ => return bad_shape("neg_or_right needs a negated disjunction"),
                },
                _ => return bad_shape(&format!("{} has the wrong succedent shape", node.rule)),
            };
            optional_principal(node, g)?;
            expect_eq("premise 1 succedent", &a, &ps[0].suc)?;
            expect_eq("premise 2 succedent", &b, &ps[1].suc)?;
            shared_context(c, &empty(), &[(&ps[0].ctx, empty()), (&ps[1].ctx, empty())])
        }
        OrRight1 | OrRight2 | NegRight | NegAndRight1 | NegAndRight2 => {
            let want = match (node.rule, g) {
                (OrRight1, F::Or(a, _)) => (**a).clone(),
                (OrRight2, F::Or(_, b)) => (**b).clone(),
                (NegRight, f) if f.double_neg_body().is_some() => f.double_neg_body().unwrap().clone(),
                (NegAndRight1, F::Neg(inner)) if matches!(inner.as_ref(), F::And(..)) => {
                    let F::And(a, _) = inner.as_ref() else { unreachable!() };
                    F::neg((**a).clone())
                }
                (NegAndRight2, F::Neg(inner)) if matches!(inner.as_ref(), F::And(..)) => {
                    let F::And(_, b) = inner.as_ref() else { unreachable!() };
                    F::neg((**b).clone())
                }
                _ => return bad_shape(&format!("{} has the wrong succedent shape", node.rule)),
            };
            optional_principal(node, g)?;
            expect_eq("premise succedent", &want, &ps[0].suc)?;
            shared_context(c, &empty(), &[(&ps[0].ctx, empty())])
        }
        NegImpRight => {
            let (a, b) = match g {
                F::Neg(inner) => match inner.as_ref() {
                    F::Imp(a, b) => ((**a).clone(), (**b).clone()),
                    _ => return bad_shape("neg_imp_right needs a negated implication"),
                },
                _ => return bad_shape("neg_imp_right needs a negated implication"),
            };
            optional_principal(node, g)?;
            expect_eq("premise succedent", &F::neg(b), &ps[0].suc)?;
            shared_context(c, &empty(), &[(&ps[0].ctx, set_of([a]))])
        }
        ExMiddle => {
            let a = principal_one(node)?;
            for (i, p) in ps.iter().enumerate() {
                expect_eq(&format!("premise {} succedent", i + 1), g, &p.suc)?;
            }
            shared_context(c, &empty(), &[(&ps[0].ctx, set_of([F::neg(a.clone())])), (&ps[1].ctx, set_of([a.clone()]))])
        }
        Peirce => {
            let Some((a, b)) = node.principal.as_implication() else {
                return Err(FaultKind::PrincipalMissing);
            };
            expect_eq("Peirce formula antecedent", g, &a)?;
            expect_eq("premise succedent", g, &ps[0].suc)?;
            shared_context(c, &empty(), &[(&ps[0].ctx, set_of([F::imp(a, b)]))])
        }
        GExMiddle => {
            let Some((a, b)) = node.principal.as_implication() else {
                return Err(FaultKind::PrincipalMissing);
            };
            for (i, p) in ps.iter().enumerate() {
                expect_eq(&format!("premise {} succedent", i + 1), g, &p.suc)?;
            }
            shared_context(c, &empty(), &[(&ps[0].ctx, set_of([F::imp(a.clone(), b)])), (&ps[1].ctx, set_of([a]))])
        }
    }
}

/// Adds `extra` to the context of every node. Valid for any proof, cuts included.
pub(crate) fn weaken_unchecked(proof: &SequentProof, extra: &BTreeSet<Formula>) -> SequentProof {
    if extra.is_empty() || extra.is_subset(&proof.conclusion.ctx) && proof.premises.is_empty() {
        let mut out = proof.clone();
        out.conclusion.ctx.extend(extra.iter().cloned());
        return out;
    }
    SequentProof {
        conclusion: proof.conclusion.with_ctx(extra.iter().cloned()),
        rule: proof.rule,
        principal: proof.principal.clone(),
        premises: proof.premises.iter().map(|p| weaken_unchecked(p, extra)).collect(),
    }
}

/// Admissible weakening on a valid cut-free proof: the same rule skeleton
/// with `extra` added to every node's context.
pub fn weaken_proof(calc: CalculusId, proof: &SequentProof, extra: &BTreeSet<Formula>) -> Result<SequentProof, SequentError> {
    check_proof(calc, proof).into_result().map_err(|fault| SequentError::Invalid { calc, fault })?;
    if !proof.is_cut_free() {
        return Err(SequentError::ContainsCut);
    }
    Ok(weaken_unchecked(proof, extra))
}

/// A cut-free proof of `a, ctx => a`, built by induction on `a`.
///
/// Fails only when `a` contains `~` and `calc` is one of the positive calculi.
pub fn identity_proof(calc: CalculusId, a: &Formula, ctx: &BTreeSet<Formula>) -> Result<SequentProof, SequentError> {
    if !calc.is_connexive() && a.contains_neg() {
        return Err(SequentError::OutsideLanguage(a.clone(), calc));
    }
    Ok(identity(a, ctx))
}

pub(crate) fn identity(a: &Formula, ctx: &BTreeSet<Formula>) -> SequentProof {
    use Formula as F;
    let mut c = ctx.clone();
    c.insert(a.clone());
    let here = Sequent { ctx: c.clone(), suc: a.clone() };
    let plus = |fs: &[&Formula]| -> BTreeSet<Formula> {
        let mut s = c.clone();
        s.extend(fs.iter().map(|f| (*f).clone()));
        s
    };
    let node = |rule, principal, premises| SequentProof::new(here.clone(), rule, principal, premises);

    match a {
        F::Var(_) => SequentProof::leaf(here, RuleId::Init1),
        F::And(x, y) => {
            // (∧ right) over (∧ left)-prepared identities
            let left = |target: &Formula| {
                let prem = identity(target, &plus(&[x, y]));
                SequentProof::new(
                    Sequent { ctx: c.clone(), suc: target.clone() },
                    RuleId::AndLeft,
                    Principal::One(a.clone()),
                    vec![prem],
                )
            };
            node(RuleId::AndRight, Principal::None, vec![left(x), left(y)])
        }
        F::Or(x, y) => {
            let branch = |side: &Formula, rule| {
                let ctx_side = plus(&[side]);
                let inner = identity(side, &ctx_side);
                SequentProof::new(Sequent { ctx: ctx_side, suc: a.clone() }, rule, Principal::None, vec![inner])
            };
            node(
                RuleId::OrLeft,
                Principal::One(a.clone()),
                vec![branch(x, RuleId::OrRight1), branch(y, RuleId::OrRight2)],
            )
        }
        F::Imp(x, y) => {
            let ctx_x = plus(&[x]);
            let minor = identity(x, &ctx_x);
            let major = identity(y, &plus(&[x, y]));
            let left = SequentProof::new(
                Sequent { ctx: ctx_x, suc: (**y).clone() },
                RuleId::ImpLeft,
                Principal::One(a.clone()),
                vec![minor, major],
            );
            node(RuleId::ImpRight, Principal::None, vec![left])
        }
        F::Neg(inner) => match inner.as_ref() {
            F::Var(_) => SequentProof::leaf(here, RuleId::Init2),
            F::Neg(body) => {
                let prem = identity(body, &plus(&[body]));
                let left = SequentProof::new(
                    Sequent { ctx: c.clone(), suc: (**body).clone() },
                    RuleId::NegLeft,
                    Principal::One(a.clone()),
                    vec![prem],
                );
                node(RuleId::NegRight, Principal::None, vec![left])
            }
            F::And(x, y) => {
                let (nx, ny) = (F::neg((**x).clone()), F::neg((**y).clone()));
                let branch = |side: &Formula, rule| {
                    let ctx_side = plus(&[side]);
                    let inner = identity(side, &ctx_side);
                    SequentProof::new(Sequent { ctx: ctx_side, suc: a.clone() }, rule, Principal::None, vec![inner])
                };
                node(
                    RuleId::NegAndLeft,
                    Principal::One(a.clone()),
                    vec![branch(&nx, RuleId::NegAndRight1), branch(&ny, RuleId::NegAndRight2)],
                )
            }
            F::Or(x, y) => {
                let (nx, ny) = (F::neg((**x).clone()), F::neg((**y).clone()));
                let both = plus(&[&nx, &ny]);
                let right = SequentProof::new(
                    Sequent { ctx: both.clone(), suc: a.clone() },
                    RuleId::NegOrRight,
                    Principal::None,
                    vec![identity(&nx, &both), identity(&ny, &both)],
                );
                node(RuleId::NegOrLeft, Principal::One(a.clone()), vec![right])
            }
            F::Imp(x, y) => {
                let ny = F::neg((**y).clone());
                let ctx_x = plus(&[x]);
                let minor = identity(x, &ctx_x);
                let major = identity(&ny, &plus(&[x, &ny]));
                let left = SequentProof::new(
                    Sequent { ctx: ctx_x, suc: ny.clone() },
                    RuleId::NegImpLeft,
                    Principal::One(a.clone()),
                    vec![minor, major],
                );
                node(RuleId::NegImpRight, Principal::None, vec![left])
            }
        },
    }
}

//! Cut-free backward proof search for every calculus, cut elimination by
//! re-derivation, and the separation table for C, C3, MC and CN.
//!
//! Search works on interned formulas and cumulative rule instances: the
//! principal formula stays in the context and both premises of the
//! context-splitting rules receive the full context. Rules whose premises
//! strictly enlarge the context are invertible through weakening, so the
//! search commits to the first one that applies. Everything else is tried as
//! an alternative, with branch-repetition pruning.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::formula::{closure_of, subformula_closure_of, Formula};
use crate::sequent::{self, check_proof, CalculusId, Principal, ProofFault, RuleId, Sequent, SequentProof};

/// Which formulas `(ex-middle)` may be instantiated with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExMiddleScope {
    /// Atoms of the closure (the atomic form of the rule).
    Atoms,
    /// Every closure member.
    Closure,
}

/// Which side formulas `(Peirce)` may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeirceScope {
    /// `β` ranges over the closure of the goal.
    Closure,
    /// `β` is the conjunction of every literal of the goal, which derives
    /// every formula over the goal's atoms.
    Explosive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub node_budget: u64,
    /// Search `sMC*` / `sCN*` with `(g-ex-middle)` itself instead of going
    /// through `sMC` / `sCN`.
    pub allow_g_ex_middle_direct: bool,
    pub memo: bool,
    pub ex_middle_scope: ExMiddleScope,
    pub peirce_scope: PeirceScope,
    pub eager_extension: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            node_budget: 5_000_000,
            allow_g_ex_middle_direct: false,
            memo: true,
            ex_middle_scope: ExMiddleScope::Atoms,
            peirce_scope: PeirceScope::Explosive,
            eager_extension: true,
        }
    }
}

impl SearchConfig {
    pub fn with_budget(node_budget: u64) -> Self {
        SearchConfig { node_budget: node_budget.max(1), ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub max_depth: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Provable(SequentProof),
    Unprovable,
    ResourceExceeded,
}

#[derive(Clone, Debug)]
pub struct ProveResult {
    pub verdict: Verdict,
    pub stats: SearchStats,
}

impl ProveResult {
    pub fn is_provable(&self) -> bool {
        matches!(self.verdict, Verdict::Provable(_))
    }

    pub fn is_unprovable(&self) -> bool {
        matches!(self.verdict, Verdict::Unprovable)
    }

    pub fn proof(&self) -> Option<&SequentProof> {
        match &self.verdict {
            Verdict::Provable(p) => Some(p),
            _ => None,
        }
    }

    pub fn cell(&self) -> Cell {
        match self.verdict {
            Verdict::Provable(_) => Cell::Provable,
            Verdict::Unprovable => Cell::Unprovable,
            Verdict::ResourceExceeded => Cell::ResourceExceeded,
        }
    }
}

#[derive(Debug, Error)]
pub enum ProverError {
    #[error("{calc} does not accept primed atoms ({formula})")]
    PrimedAtom { calc: CalculusId, formula: Formula },
    #[error("{calc} has no connexive negation ({formula})")]
    Negation { calc: CalculusId, formula: Formula },
    #[error("input proof is not valid in {calc}: {fault}")]
    InvalidProof { calc: CalculusId, fault: ProofFault },
    #[error("node budget exhausted after {} nodes", .0.nodes)]
    ResourceExceeded(SearchStats),
    #[error("no cut-free proof found for {0}")]
    NoCutFreeProof(Sequent),
}

fn validate_language(calc: CalculusId, s: &Sequent) -> Result<(), ProverError> {
    for f in s.formulas() {
        if calc.is_connexive() && f.has_primed_atom() {
            return Err(ProverError::PrimedAtom { calc, formula: f.clone() });
        }
        if !calc.is_connexive() && f.contains_neg() {
            return Err(ProverError::Negation { calc, formula: f.clone() });
        }
    }
    Ok(())
}

/// Decides `s` in `calc` by cut-free backward search.
pub fn decide(calc: CalculusId, s: &Sequent, cfg: &SearchConfig) -> Result<ProveResult, ProverError> {
    validate_language(calc, s)?;
    let start = Instant::now();
    let direct = cfg.allow_g_ex_middle_direct && calc.has_g_ex_middle();
    let search_calc = if direct { calc } else { calc.unstarred() };
    let (outcome, mut stats) = run_with_big_stack(|| Searcher::new(search_calc, s, cfg).run(s));
    stats.elapsed = start.elapsed();
    let verdict = match outcome {
        Some(Some(proof)) => {
            let proof = if search_calc != calc { peirce_to_g_ex_middle(&proof) } else { proof };
            let report = check_proof(calc, &proof);
            assert!(report.is_valid(), "search produced an invalid proof of {s} in {calc}: {:?}", report.fault);
            assert!(proof.is_cut_free());
            Verdict::Provable(proof)
        }
        Some(None) => Verdict::Unprovable,
        None => Verdict::ResourceExceeded,
    };
    Ok(ProveResult { verdict, stats })
}

fn run_with_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(512 << 20)
            .spawn_scoped(scope, f)
            .expect("spawn search thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

/// Rewrites every `(Peirce)` node into the `(g-ex-middle)` node whose second
/// premise is an identity proof, turning `sMC`/`sCN` proofs into
/// `sMC*`/`sCN*` proofs.
pub fn peirce_to_g_ex_middle(proof: &SequentProof) -> SequentProof {
    let premises: Vec<SequentProof> = proof.premises.iter().map(peirce_to_g_ex_middle).collect();
    if proof.rule != RuleId::Peirce {
        return SequentProof { premises, ..proof.clone() };
    }
    let (a, b) = match &proof.principal {
        Principal::Pair(a, b) => (a.clone(), b.clone()),
        Principal::One(Formula::Imp(a, b)) => ((**a).clone(), (**b).clone()),
        _ => panic!("Peirce node without side formulas"),
    };
    let ctx = &proof.conclusion.ctx;
    let mut premises = premises;
    premises.push(sequent::identity(&a, ctx));
    SequentProof::new(proof.conclusion.clone(), RuleId::GExMiddle, Principal::Pair(a, b), premises)
}

/// A cut-free proof of the conclusion of a valid proof that may contain cuts.
pub fn eliminate_cut(calc: CalculusId, proof: &SequentProof, cfg: &SearchConfig) -> Result<SequentProof, ProverError> {
    check_proof(calc, proof).into_result().map_err(|fault| ProverError::InvalidProof { calc, fault })?;
    if proof.is_cut_free() {
        return Ok(proof.clone());
    }
    let res = decide(calc, &proof.conclusion, cfg)?;
    match res.verdict {
        Verdict::Provable(p) => Ok(p),
        Verdict::Unprovable => Err(ProverError::NoCutFreeProof(proof.conclusion.clone())),
        Verdict::ResourceExceeded => Err(ProverError::ResourceExceeded(res.stats)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    Provable,
    Unprovable,
    ResourceExceeded,
}

impl Cell {
    pub fn symbol(self) -> &'static str {
        match self {
            Cell::Provable => "Y",
            Cell::Unprovable => "N",
            Cell::ResourceExceeded => "T",
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

pub const SEPARATION_CALCULI: [CalculusId; 4] = [CalculusId::Sc, CalculusId::Sc3, CalculusId::Smc, CalculusId::Scn];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationRow {
    pub formula: Formula,
    /// Verdicts for `sC`, `sC3`, `sMC`, `sCN`.
    pub cells: [Cell; 4],
}

/// Decides `=> φ` in `sC`, `sC3`, `sMC` and `sCN` for each formula.
pub fn separation_matrix(formulas: &[Formula], cfg: &SearchConfig) -> Result<Vec<SeparationRow>, ProverError> {
    formulas
        .iter()
        .map(|f| {
            let goal = Sequent::goal(f.clone());
            let mut cells = [Cell::ResourceExceeded; 4];
            for (cell, calc) in cells.iter_mut().zip(SEPARATION_CALCULI) {
                *cell = decide(calc, &goal, cfg)?.cell();
            }
            Ok(SeparationRow { formula: f.clone(), cells })
        })
        .collect()
}

type Ctx = Vec<u32>;
type Key = (Ctx, u32);

const NO_LOOP: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Atom,
    Neg(u32),
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
}

#[derive(Default)]
struct Arena {
    shapes: Vec<Shape>,
    formulas: Vec<Formula>,
    index: HashMap<Formula, u32>,
    negs: HashMap<u32, u32>,
}

impl Arena {
    fn intern(&mut self, f: &Formula) -> u32 {
        if let Some(&i) = self.index.get(f) {
            return i;
        }
        let shape = match f {
            Formula::Var(_) => Shape::Atom,
            Formula::Neg(a) => Shape::Neg(self.intern(a)),
            Formula::And(a, b) => Shape::And(self.intern(a), self.intern(b)),
            Formula::Or(a, b) => Shape::Or(self.intern(a), self.intern(b)),
            Formula::Imp(a, b) => Shape::Imp(self.intern(a), self.intern(b)),
        };
        let id = self.shapes.len() as u32;
        self.shapes.push(shape);
        self.formulas.push(f.clone());
        self.index.insert(f.clone(), id);
        if let Shape::Neg(a) = shape {
            self.negs.insert(a, id);
        }
        id
    }

    fn neg(&mut self, a: u32) -> u32 {
        match self.negs.get(&a) {
            Some(&n) => n,
            None => {
                let f = Formula::neg(self.formulas[a as usize].clone());
                self.intern(&f)
            }
        }
    }

    fn imp(&mut self, a: u32, b: u32) -> u32 {
        let f = Formula::imp(self.formulas[a as usize].clone(), self.formulas[b as usize].clone());
        self.intern(&f)
    }

    fn shape(&self, id: u32) -> Shape {
        self.shapes[id as usize]
    }

    fn is_literal(&self, id: u32) -> bool {
        match self.shape(id) {
            Shape::Atom => true,
            Shape::Neg(a) => self.shape(a) == Shape::Atom,
            _ => false,
        }
    }
}

#[derive(Clone, Copy)]
enum IPrincipal {
    None,
    One(u32),
    Pair(u32, u32),
}

enum PNode {
    Rule { rule: RuleId, principal: IPrincipal, ctx: Rc<Ctx>, suc: u32, premises: Vec<Rc<PNode>> },
    Identity { ctx: Rc<Ctx>, suc: u32 },
    /// `bot, Γ => suc` where `bot` is the explosive conjunction in `Γ`.
    Explode { ctx: Rc<Ctx>, bot: u32, suc: u32 },
    /// Class-search result, never exported directly.
    Member { goal: u32, proof: Rc<PNode> },
}

enum Out {
    Proved(Rc<PNode>),
    /// Carries the shallowest history depth a pruned descendant ran into.
    Failed(usize),
    Abort,
}

struct Instance {
    rule: RuleId,
    principal: IPrincipal,
    premises: Vec<(Ctx, u32)>,
    /// Further `(Peirce)` side formulas applied in sequence above this node.
    chain: Vec<u32>,
}

fn has(ctx: &Ctx, f: u32) -> bool {
    ctx.binary_search(&f).is_ok()
}

fn with(ctx: &Ctx, fs: &[u32]) -> Ctx {
    let mut out = ctx.clone();
    for &f in fs {
        if let Err(pos) = out.binary_search(&f) {
            out.insert(pos, f);
        }
    }
    out
}

struct Searcher {
    calc: CalculusId,
    cfg: SearchConfig,
    arena: Arena,
    ex_middle_pool: Vec<u32>,
    peirce_pool: Vec<u32>,
    explosive: Option<u32>,
    proved: HashMap<Key, Rc<PNode>>,
    failed: HashSet<Key>,
    history: HashMap<Key, usize>,
    class_proved: HashMap<Ctx, (u32, Rc<PNode>)>,
    class_failed: HashSet<Ctx>,
    nodes: u64,
    max_depth: usize,
}

impl Searcher {
    fn new(calc: CalculusId, s: &Sequent, cfg: &SearchConfig) -> Self {
        let universe = if calc.is_connexive() { closure_of(s.formulas()) } else { subformula_closure_of(s.formulas()) };
        let mut arena = Arena::default();
        let members: Vec<u32> = universe.members().iter().map(|f| arena.intern(f)).collect();

        let ex_middle_pool = if !calc.has_ex_middle() {
            vec![]
        } else {
            match cfg.ex_middle_scope {
                ExMiddleScope::Atoms => members.iter().copied().filter(|&m| arena.shape(m) == Shape::Atom).collect(),
                ExMiddleScope::Closure => members.clone(),
            }
        };
        let needs_explosive = (calc.has_peirce() && cfg.peirce_scope == PeirceScope::Explosive) || calc.has_g_ex_middle();
        let explosive = needs_explosive.then(|| {
            let lits = if calc.is_connexive() { universe.literals() } else { universe.atoms().into_iter().map(Formula::Var).collect() };
            let conj = lits.into_iter().reduce(Formula::and).expect("every formula has an atom");
            arena.intern(&conj)
        });
        let peirce_pool = match (calc.has_peirce(), cfg.peirce_scope) {
            (false, _) => vec![],
            (true, PeirceScope::Closure) => members.clone(),
            (true, PeirceScope::Explosive) => explosive.into_iter().collect(),
        };
        for &m in &members {
            arena.neg(m);
        }
        Searcher {
            calc,
            cfg: cfg.clone(),
            arena,
            ex_middle_pool,
            peirce_pool,
            explosive,
            proved: HashMap::new(),
            failed: HashSet::new(),
            history: HashMap::new(),
            class_proved: HashMap::new(),
            class_failed: HashSet::new(),
            nodes: 0,
            max_depth: 0,
        }
    }

    /// `Some(Some(proof))`, `Some(None)` for unprovable, `None` for budget.
    fn run(mut self, s: &Sequent) -> (Option<Option<SequentProof>>, SearchStats) {
        let mut ctx: Ctx = s.ctx.iter().map(|f| self.arena.intern(f)).collect();
        ctx.sort_unstable();
        ctx.dedup();
        let suc = self.arena.intern(&s.suc);
        let out = self.search(&ctx, suc, 0);
        let stats = SearchStats { nodes: self.nodes, max_depth: self.max_depth, elapsed: Duration::ZERO };
        let res = match out {
            Out::Proved(p) => Some(Some(self.export(&p))),
            Out::Failed(_) => Some(None),
            Out::Abort => None,
        };
        (res, stats)
    }

    fn search(&mut self, ctx: &Ctx, suc: u32, depth: usize) -> Out {
        self.nodes += 1;
        if self.nodes > self.cfg.node_budget {
            return Out::Abort;
        }
        self.max_depth = self.max_depth.max(depth);
        let key = (ctx.clone(), suc);
        if self.cfg.memo {
            if let Some(p) = self.proved.get(&key) {
                return Out::Proved(p.clone());
            }
            if self.failed.contains(&key) {
                return Out::Failed(NO_LOOP);
            }
        }
        if let Some(&h) = self.history.get(&key) {
            return Out::Failed(h);
        }
        if has(ctx, suc) {
            let node = self.axiom(ctx, suc);
            return self.finish(key, Out::Proved(node));
        }

        if let Some(inst) = self.commit_first(ctx, suc) {
            return self.commit(key, inst, depth);
        }
        if self.cfg.eager_extension {
            if let Some(inst) = self.last_resort(ctx, suc) {
                return self.commit(key, inst, depth);
            }
        }
        if let Some(bot) = self.class_bottom() {
            let members = self.class_members(ctx, bot);
            if members.contains(&suc) {
                return match self.class_search(ctx, &members, depth) {
                    Out::Proved(p) => {
                        let node = self.switch_goal(ctx, bot, p, suc);
                        self.finish(key, Out::Proved(node))
                    }
                    Out::Failed(_) => self.finish(key, Out::Failed(NO_LOOP)),
                    Out::Abort => Out::Abort,
                };
            }
        }

        self.history.insert(key.clone(), depth);
        let mut low = NO_LOOP;
        for inst in self.alternatives(ctx, suc) {
            match self.premises(&inst, ctx, suc, depth) {
                Out::Proved(p) => {
                    self.history.remove(&key);
                    return self.finish(key, Out::Proved(p));
                }
                Out::Failed(l) => low = low.min(l),
                Out::Abort => {
                    self.history.remove(&key);
                    return Out::Abort;
                }
            }
        }
        self.history.remove(&key);

        if !self.cfg.eager_extension {
            if let Some(inst) = self.last_resort(ctx, suc) {
                return self.commit(key, inst, depth);
            }
        }
        let low = if low >= depth { NO_LOOP } else { low };
        if low == NO_LOOP {
            self.finish(key, Out::Failed(NO_LOOP))
        } else {
            Out::Failed(low)
        }
    }

    /// With eager `(Peirce)` or `(g-ex-middle)` over the explosive formula
    /// `⊥*`, every goal `δ` with `δ -> ⊥*` in the context is interderivable
    /// with every other such goal, so the context alone determines
    /// provability.
    fn class_bottom(&self) -> Option<u32> {
        if self.cfg.eager_extension {
            self.explosive
        } else {
            None
        }
    }

    fn class_members(&self, ctx: &Ctx, bot: u32) -> Vec<u32> {
        ctx.iter()
            .filter_map(|&f| match self.arena.shape(f) {
                Shape::Imp(x, b) if b == bot => Some(x),
                _ => None,
            })
            .collect()
    }

    /// Tries every rule instance of every member whose premises leave the
    /// class. Those premises have larger contexts or fresh goals, so the
    /// outcome is independent of the branch history. The proof returned is
    /// for whichever member succeeded, wrapped in [`PNode::Member`].
    fn class_search(&mut self, ctx: &Ctx, members: &[u32], depth: usize) -> Out {
        if self.cfg.memo {
            if let Some((d, p)) = self.class_proved.get(ctx) {
                return Out::Proved(Rc::new(PNode::Member { goal: *d, proof: p.clone() }));
            }
            if self.class_failed.contains(ctx) {
                return Out::Failed(NO_LOOP);
            }
        }
        if let Some(&d) = members.iter().find(|&&d| has(ctx, d)) {
            return Out::Proved(Rc::new(PNode::Member { goal: d, proof: self.axiom(ctx, d) }));
        }
        for &d in members {
            for inst in self.alternatives(ctx, d) {
                if inst.premises.iter().any(|(pc, ps)| pc == ctx && members.contains(ps)) {
                    continue;
                }
                match self.premises(&inst, ctx, d, depth) {
                    Out::Proved(p) => {
                        if self.cfg.memo {
                            self.class_proved.insert(ctx.clone(), (d, p.clone()));
                        }
                        return Out::Proved(Rc::new(PNode::Member { goal: d, proof: p }));
                    }
                    Out::Failed(_) => {}
                    Out::Abort => return Out::Abort,
                }
            }
        }
        if self.cfg.memo {
            self.class_failed.insert(ctx.clone());
        }
        Out::Failed(NO_LOOP)
    }

    /// `Γ => goal` from a proof of `Γ => d` with `d -> ⊥*` in `Γ`.
    fn switch_goal(&mut self, ctx: &Ctx, bot: u32, member: Rc<PNode>, goal: u32) -> Rc<PNode> {
        let PNode::Member { goal: d, proof } = &*member else { unreachable!("class search returns members") };
        if *d == goal {
            return proof.clone();
        }
        let principal = self.arena.imp(*d, bot);
        Rc::new(PNode::Rule {
            rule: RuleId::ImpLeft,
            principal: IPrincipal::One(principal),
            ctx: Rc::new(ctx.clone()),
            suc: goal,
            premises: vec![proof.clone(), Rc::new(PNode::Explode { ctx: Rc::new(with(ctx, &[bot])), bot, suc: goal })],
        })
    }

    /// Invertible step with strictly larger premise contexts: its failure is
    /// final whatever the branch history.
    fn commit(&mut self, key: Key, inst: Instance, depth: usize) -> Out {
        let (ctx, suc) = (key.0.clone(), key.1);
        self.history.insert(key.clone(), depth);
        let out = self.premises(&inst, &ctx, suc, depth);
        self.history.remove(&key);
        match out {
            Out::Failed(_) => self.finish(key, Out::Failed(NO_LOOP)),
            other => self.finish(key, other),
        }
    }

    fn finish(&mut self, key: Key, out: Out) -> Out {
        if self.cfg.memo {
            match &out {
                Out::Proved(p) => {
                    self.proved.insert(key, p.clone());
                }
                Out::Failed(NO_LOOP) => {
                    self.failed.insert(key);
                }
                _ => {}
            }
        }
        out
    }

    fn premises(&mut self, inst: &Instance, ctx: &Ctx, suc: u32, depth: usize) -> Out {
        let mut proofs = Vec::with_capacity(inst.premises.len());
        for (pctx, psuc) in &inst.premises {
            match self.search(pctx, *psuc, depth + 1) {
                Out::Proved(p) => proofs.push(p),
                other => return other,
            }
        }
        if inst.chain.is_empty() {
            return Out::Proved(Rc::new(PNode::Rule {
                rule: inst.rule,
                principal: inst.principal,
                ctx: Rc::new(ctx.clone()),
                suc,
                premises: proofs,
            }));
        }
        let IPrincipal::Pair(_, first) = inst.principal else { unreachable!("chains are Peirce steps") };
        let betas: Vec<u32> = std::iter::once(first).chain(inst.chain.iter().copied()).collect();
        let mut contexts = vec![ctx.clone()];
        for &b in &betas {
            let w = self.arena.imp(suc, b);
            let next = with(contexts.last().unwrap(), &[w]);
            contexts.push(next);
        }
        let mut node = proofs.pop().expect("one premise");
        for (i, &b) in betas.iter().enumerate().rev() {
            node = Rc::new(PNode::Rule {
                rule: RuleId::Peirce,
                principal: IPrincipal::Pair(suc, b),
                ctx: Rc::new(contexts[i].clone()),
                suc,
                premises: vec![node],
            });
        }
        Out::Proved(node)
    }

    fn axiom(&self, ctx: &Ctx, suc: u32) -> Rc<PNode> {
        let ctx = Rc::new(ctx.clone());
        if self.arena.is_literal(suc) {
            let rule = if self.arena.shape(suc) == Shape::Atom { RuleId::Init1 } else { RuleId::Init2 };
            Rc::new(PNode::Rule { rule, principal: IPrincipal::None, ctx, suc, premises: vec![] })
        } else {
            Rc::new(PNode::Identity { ctx, suc })
        }
    }

    /// First left rule, or right rule discharging a new formula, whose
    /// premises all strictly extend the context.
    fn commit_first(&mut self, ctx: &Ctx, suc: u32) -> Option<Instance> {
        let connexive = self.calc.is_connexive();
        let mut branching = None;
        for &f in ctx {
            let one = |rule, prem: Ctx| Instance { rule, principal: IPrincipal::One(f), premises: vec![(prem, suc)], chain: vec![] };
            match self.arena.shape(f) {
                Shape::And(a, b) if !has(ctx, a) || !has(ctx, b) => return Some(one(RuleId::AndLeft, with(ctx, &[a, b]))),
                Shape::Or(a, b) if branching.is_none() && !has(ctx, a) && !has(ctx, b) => {
                    branching = Some(Instance {
                        rule: RuleId::OrLeft,
                        principal: IPrincipal::One(f),
                        premises: vec![(with(ctx, &[a]), suc), (with(ctx, &[b]), suc)],
                        chain: vec![],
                    })
                }
                Shape::Neg(inner) if connexive => match self.arena.shape(inner) {
                    Shape::Neg(a) if !has(ctx, a) => return Some(one(RuleId::NegLeft, with(ctx, &[a]))),
                    Shape::Or(a, b) => {
                        let (na, nb) = (self.arena.neg(a), self.arena.neg(b));
                        if !has(ctx, na) || !has(ctx, nb) {
                            return Some(one(RuleId::NegOrLeft, with(ctx, &[na, nb])));
                        }
                    }
                    Shape::And(a, b) if branching.is_none() => {
                        let (na, nb) = (self.arena.neg(a), self.arena.neg(b));
                        if !has(ctx, na) && !has(ctx, nb) {
                            branching = Some(Instance {
                                rule: RuleId::NegAndLeft,
                                principal: IPrincipal::One(f),
                                premises: vec![(with(ctx, &[na]), suc), (with(ctx, &[nb]), suc)],
                                chain: vec![],
                            })
                        }
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        if branching.is_some() {
            return branching;
        }
        match self.arena.shape(suc) {
            Shape::Imp(a, b) if !has(ctx, a) => {
                Some(Instance { rule: RuleId::ImpRight, principal: IPrincipal::None, premises: vec![(with(ctx, &[a]), b)], chain: vec![] })
            }
            Shape::Neg(inner) if connexive => match self.arena.shape(inner) {
                Shape::Imp(a, b) if !has(ctx, a) => {
                    let nb = self.arena.neg(b);
                    Some(Instance { rule: RuleId::NegImpRight, principal: IPrincipal::None, premises: vec![(with(ctx, &[a]), nb)], chain: vec![] })
                }
                _ => None,
            },
            _ => None,
        }
    }

    /// Rules that keep the context or change the succedent.
    fn alternatives(&mut self, ctx: &Ctx, suc: u32) -> Vec<Instance> {
        let connexive = self.calc.is_connexive();
        let mut out = Vec::new();
        let right = |rule, premises: Vec<(Ctx, u32)>| Instance { rule, principal: IPrincipal::None, premises, chain: vec![] };
        match self.arena.shape(suc) {
            Shape::And(a, b) => out.push(right(RuleId::AndRight, vec![(ctx.clone(), a), (ctx.clone(), b)])),
            Shape::Or(a, b) => {
                out.push(right(RuleId::OrRight1, vec![(ctx.clone(), a)]));
                out.push(right(RuleId::OrRight2, vec![(ctx.clone(), b)]));
            }
            Shape::Imp(a, b) => out.push(right(RuleId::ImpRight, vec![(with(ctx, &[a]), b)])),
            Shape::Neg(inner) if connexive => match self.arena.shape(inner) {
                Shape::Neg(a) => out.push(right(RuleId::NegRight, vec![(ctx.clone(), a)])),
                Shape::And(a, b) => {
                    let (na, nb) = (self.arena.neg(a), self.arena.neg(b));
                    out.push(right(RuleId::NegAndRight1, vec![(ctx.clone(), na)]));
                    out.push(right(RuleId::NegAndRight2, vec![(ctx.clone(), nb)]));
                }
                Shape::Or(a, b) => {
                    let (na, nb) = (self.arena.neg(a), self.arena.neg(b));
                    out.push(right(RuleId::NegOrRight, vec![(ctx.clone(), na), (ctx.clone(), nb)]));
                }
                Shape::Imp(a, b) => {
                    let nb = self.arena.neg(b);
                    out.push(right(RuleId::NegImpRight, vec![(with(ctx, &[a]), nb)]));
                }
                _ => {}
            },
            _ => {}
        }
        for &f in ctx {
            match self.arena.shape(f) {
                Shape::Imp(a, b) if !has(ctx, b) => out.push(Instance {
                    rule: RuleId::ImpLeft,
                    principal: IPrincipal::One(f),
                    premises: vec![(ctx.clone(), a), (with(ctx, &[b]), suc)],
                    chain: vec![],
                }),
                Shape::Neg(inner) if connexive => {
                    if let Shape::Imp(a, b) = self.arena.shape(inner) {
                        let nb = self.arena.neg(b);
                        if !has(ctx, nb) {
                            out.push(Instance {
                                rule: RuleId::NegImpLeft,
                                principal: IPrincipal::One(f),
                                premises: vec![(ctx.clone(), a), (with(ctx, &[nb]), suc)],
                                chain: vec![],
                            });
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }

    /// `(ex-middle)`, `(Peirce)` and `(g-ex-middle)`: context-extending and
    /// invertible, so only the first applicable instance is tried.
    fn last_resort(&mut self, ctx: &Ctx, suc: u32) -> Option<Instance> {
        for i in 0..self.ex_middle_pool.len() {
            let a = self.ex_middle_pool[i];
            let na = self.arena.neg(a);
            if !has(ctx, a) && !has(ctx, na) {
                return Some(Instance {
                    rule: RuleId::ExMiddle,
                    principal: IPrincipal::One(a),
                    premises: vec![(with(ctx, &[na]), suc), (with(ctx, &[a]), suc)],
                    chain: vec![],
                });
            }
        }
        // every pending instance at once: each step is invertible
        let mut betas = Vec::new();
        let mut ws = Vec::new();
        for i in 0..self.peirce_pool.len() {
            let b = self.peirce_pool[i];
            let w = self.arena.imp(suc, b);
            if !has(ctx, w) {
                betas.push(b);
                ws.push(w);
            }
        }
        if !betas.is_empty() {
            return Some(Instance {
                rule: RuleId::Peirce,
                principal: IPrincipal::Pair(suc, betas[0]),
                premises: vec![(with(ctx, &ws), suc)],
                chain: betas[1..].to_vec(),
            });
        }
        if self.calc.has_g_ex_middle() {
            let b = self.explosive.expect("explosive formula prepared");
            let w = self.arena.imp(suc, b);
            if !has(ctx, w) {
                return Some(Instance {
                    rule: RuleId::GExMiddle,
                    principal: IPrincipal::Pair(suc, b),
                    premises: vec![(with(ctx, &[w]), suc), (with(ctx, &[suc]), suc)],
                    chain: vec![],
                });
            }
        }
        None
    }

    fn export(&self, node: &PNode) -> SequentProof {
        let set = |ctx: &Ctx| -> BTreeSet<Formula> { ctx.iter().map(|&i| self.arena.formulas[i as usize].clone()).collect() };
        let f = |i: u32| self.arena.formulas[i as usize].clone();
        match node {
            PNode::Identity { ctx, suc } => sequent::identity(&f(*suc), &set(ctx)),
            PNode::Explode { ctx, bot, suc } => explosion(&f(*bot), &set(ctx), &f(*suc)),
            PNode::Member { proof, .. } => self.export(proof),
            PNode::Rule { rule, principal, ctx, suc, premises } => SequentProof {
                conclusion: Sequent { ctx: set(ctx), suc: f(*suc) },
                rule: *rule,
                principal: match *principal {
                    IPrincipal::None => Principal::None,
                    IPrincipal::One(a) => Principal::One(f(a)),
                    IPrincipal::Pair(a, b) => Principal::Pair(f(a), f(b)),
                },
                premises: premises.iter().map(|p| self.export(p)).collect(),
            },
        }
    }
}

/// Cut-free proof of `ctx => goal` where `bot ∈ ctx` is a left-nested
/// conjunction of literals covering every atom of `goal`.
fn explosion(bot: &Formula, ctx: &BTreeSet<Formula>, goal: &Formula) -> SequentProof {
    match bot {
        Formula::And(a, b) => {
            let mut inner = ctx.clone();
            inner.insert((**a).clone());
            inner.insert((**b).clone());
            let premise = explosion(a, &inner, goal);
            SequentProof::new(Sequent { ctx: ctx.clone(), suc: goal.clone() }, RuleId::AndLeft, Principal::One(bot.clone()), vec![premise])
        }
        _ => from_literals(ctx, goal),
    }
}

fn from_literals(ctx: &BTreeSet<Formula>, goal: &Formula) -> SequentProof {
    use Formula as F;
    let here = Sequent { ctx: ctx.clone(), suc: goal.clone() };
    let node = |rule, premises| SequentProof::new(here.clone(), rule, Principal::None, premises);
    let plus = |a: &Formula| {
        let mut c = ctx.clone();
        c.insert(a.clone());
        c
    };
    match goal {
        F::Var(_) => SequentProof::leaf(here, RuleId::Init1),
        F::And(a, b) => node(RuleId::AndRight, vec![from_literals(ctx, a), from_literals(ctx, b)]),
        F::Or(a, _) => node(RuleId::OrRight1, vec![from_literals(ctx, a)]),
        F::Imp(a, b) => node(RuleId::ImpRight, vec![from_literals(&plus(a), b)]),
        F::Neg(inner) => match inner.as_ref() {
            F::Var(_) => SequentProof::leaf(here, RuleId::Init2),
            F::Neg(a) => node(RuleId::NegRight, vec![from_literals(ctx, a)]),
            F::And(a, _) => node(RuleId::NegAndRight1, vec![from_literals(ctx, &F::neg((**a).clone()))]),
            F::Or(a, b) => node(
                RuleId::NegOrRight,
                vec![from_literals(ctx, &F::neg((**a).clone())), from_literals(ctx, &F::neg((**b).clone()))],
            ),
            F::Imp(a, b) => node(RuleId::NegImpRight, vec![from_literals(&plus(a), &F::neg((**b).clone()))]),
        },
    }
}

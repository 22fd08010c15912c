//! The `~`-eliminating translation `f` into the positive language over
//! `p` and `p'`, and a harness comparing `sMC` with `LJ+ + (Peirce)` under it.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::formula::Formula;
use crate::prover::{decide, Cell, ProverError, SearchConfig, SearchStats};
use crate::sequent::{CalculusId, Sequent};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("input already contains the primed atom in {0}")]
    PrimedInput(Formula),
    #[error(transparent)]
    Prover(#[from] ProverError),
}

/// Translation with a cache keyed by (subformula, under-negation).
#[derive(Default)]
pub struct Translator {
    cache: HashMap<(Formula, bool), Formula>,
}

impl Translator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn translate(&mut self, phi: &Formula) -> Result<Formula, EmbedError> {
        if phi.has_primed_atom() {
            return Err(EmbedError::PrimedInput(phi.clone()));
        }
        Ok(self.go(phi, false))
    }

    /// `f(phi)` when `negated` is false, `f(~phi)` otherwise.
    fn go(&mut self, phi: &Formula, negated: bool) -> Formula {
        let key = (phi.clone(), negated);
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        use Formula as F;
        let out = match (phi, negated) {
            (F::Var(a), false) => F::Var(a.clone()),
            (F::Var(a), true) => F::Var(a.to_primed()),
            (F::Neg(a), false) => self.go(a, true),
            (F::Neg(a), true) => self.go(a, false),
            (F::And(a, b), false) => F::and(self.go(a, false), self.go(b, false)),
            (F::Or(a, b), false) => F::or(self.go(a, false), self.go(b, false)),
            (F::Imp(a, b), false) => F::imp(self.go(a, false), self.go(b, false)),
            (F::And(a, b), true) => F::or(self.go(a, true), self.go(b, true)),
            (F::Or(a, b), true) => F::and(self.go(a, true), self.go(b, true)),
            (F::Imp(a, b), true) => F::imp(self.go(a, false), self.go(b, true)),
        };
        self.cache.insert(key, out.clone());
        out
    }
}

pub fn translate_f(phi: &Formula) -> Result<Formula, EmbedError> {
    Translator::new().translate(phi)
}

pub fn translate_sequent(s: &Sequent) -> Result<Sequent, EmbedError> {
    let mut t = Translator::new();
    let ctx = s.ctx.iter().map(|f| t.translate(f)).collect::<Result<BTreeSet<_>, _>>()?;
    Ok(Sequent { ctx, suc: t.translate(&s.suc)? })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddingTarget {
    /// `sMC` against `LJ+ + (Peirce)`.
    Mc,
    /// `sCN` against `LJ+ + (Peirce)` with `p' | p` assumed for every atom.
    /// Experimental: the target calculus for this case is a guess.
    CnExperimental,
}

impl EmbeddingTarget {
    pub fn source(self) -> CalculusId {
        match self {
            EmbeddingTarget::Mc => CalculusId::Smc,
            EmbeddingTarget::CnExperimental => CalculusId::Scn,
        }
    }

    pub fn target(self, s: &Sequent) -> Result<Sequent, EmbedError> {
        let mut t = translate_sequent(s)?;
        if self == EmbeddingTarget::CnExperimental {
            let atoms: BTreeSet<_> = s.formulas().flat_map(Formula::atoms).collect();
            for a in atoms {
                t.ctx.insert(Formula::or(Formula::Var(a.to_primed()), Formula::Var(a)));
            }
        }
        Ok(t)
    }
}

#[derive(Clone, Debug)]
pub struct EmbedReport {
    pub source: Sequent,
    pub target: Sequent,
    pub source_verdict: Cell,
    pub target_verdict: Cell,
    pub source_stats: SearchStats,
    pub target_stats: SearchStats,
}

impl EmbedReport {
    /// Both sides decided and equal.
    pub fn agree(&self) -> bool {
        self.source_verdict == self.target_verdict && self.source_verdict != Cell::ResourceExceeded
    }
}

/// Decides `s` in `sMC` and `f(s)` in `LJ+ + (Peirce)`.
pub fn embed_check(s: &Sequent, cfg: &SearchConfig) -> Result<EmbedReport, EmbedError> {
    embed_check_with(EmbeddingTarget::Mc, s, cfg)
}

pub fn embed_check_with(target: EmbeddingTarget, s: &Sequent, cfg: &SearchConfig) -> Result<EmbedReport, EmbedError> {
    let translated = target.target(s)?;
    let src = decide(target.source(), s, cfg)?;
    let dst = decide(CalculusId::LjpPeirce, &translated, cfg)?;
    Ok(EmbedReport {
        source: s.clone(),
        target: translated,
        source_verdict: src.cell(),
        target_verdict: dst.cell(),
        source_stats: src.stats,
        target_stats: dst.stats,
    })
}

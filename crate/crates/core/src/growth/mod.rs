//! Growth of ℕ-weighted tree automata: heavy cycles, barbells, degrees and
//! the witnesses for exponential and polynomial verdicts.
//!
//! All functions except [`analyze`] expect a trim automaton and refuse
//! others with [`GrowthError::NotTrimmed`].

mod barbell;
mod critical;
mod degree;
mod heavy;
mod witness;

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automaton::{Automaton, ShallowDigraph, StateId};
use crate::graph::Sccs;
use crate::tree::{Context, RankedAlphabet, SymbolId, Term, Tree};

pub use barbell::{barbell_context, barbell_pairs};
pub use critical::critical_nodes;
pub use degree::degrees;
pub use heavy::{detect_center_ambiguous, detect_scalar_heavy, detect_side_ambiguous, has_heavy_cycle};
pub use witness::{exp_witness, poly_witness, ExpWitness, PolyWitness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrowthError {
    #[error("the automaton is not trim")]
    NotTrimmed,
    #[error("the automaton has a heavy cycle")]
    HeavyCyclePresent,
    #[error("witness reconstruction failed: {0}")]
    WitnessReconstructionFailed(String),
    #[error("a state degree does not fit in 64 bits")]
    DegreeOverflow,
    #[error("invalid run: {0}")]
    InvalidRun(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HeavyKind {
    ScalarHeavy,
    CenterAmbiguous,
    SideAmbiguous,
}

impl fmt::Display for HeavyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeavyKind::ScalarHeavy => "scalar-heavy",
            HeavyKind::CenterAmbiguous => "center-ambiguous",
            HeavyKind::SideAmbiguous => "side-ambiguous",
        })
    }
}

/// Where a heavy cycle was found. Transition numbers index
/// [`Automaton::transitions`]; child positions are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HeavyDetail {
    /// Spine through `transition` at `index`; the weight comes from the
    /// transition itself (`heavy_side = None`) or from a scalar-heavy child.
    Scalar {
        component: usize,
        transition: usize,
        index: usize,
        heavy_side: Option<usize>,
    },
    /// `(state, state)` and `off_diagonal` share a component of the pair graph.
    Center {
        component: usize,
        off_diagonal: (StateId, StateId),
    },
    /// Two different transitions read the same letter on a cycle through
    /// `(state, state)` and disagree on side child `side`.
    SideDistinct {
        first: usize,
        second: usize,
        index: usize,
        side: usize,
    },
    /// A cycle through `transition` at `index` whose side child `side` is
    /// reached ambiguously.
    SideAmbiguousChild {
        transition: usize,
        index: usize,
        side: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeavyCycleEvidence {
    pub kind: HeavyKind,
    pub state: StateId,
    pub detail: HeavyDetail,
}

/// Pairs `(q1, q2)` with a barbell `q1 ⇛ q2`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BarbellSet {
    pub pairs: BTreeSet<(StateId, StateId)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeMap {
    pub deg: Vec<u64>,
    /// Rounds of the fixed-point iteration, the final unchanged round included.
    pub iterations: usize,
    /// Round at which each state reached its final degree.
    pub settled: Vec<usize>,
}

impl DegreeMap {
    pub fn of(&self, q: StateId) -> u64 {
        self.deg[q.index()]
    }

    pub fn max(&self) -> u64 {
        self.deg.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternLabel {
    Sym(SymbolId),
    Pump(Context),
}

/// A tree whose unary `Pump(C)` nodes stand for `C^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PumpingPattern {
    pub term: Term<PatternLabel>,
    pub root: StateId,
}

impl PumpingPattern {
    pub fn degree(&self) -> usize {
        fn go(t: &Term<PatternLabel>) -> usize {
            usize::from(matches!(t.label, PatternLabel::Pump(_))) + t.children.iter().map(go).sum::<usize>()
        }
        go(&self.term)
    }

    /// Replaces each `Pump(C)(Π)` by `C^n[pump(n, Π)]`.
    pub fn pump(&self, n: usize) -> Tree {
        fn go(t: &Term<PatternLabel>, n: usize) -> Tree {
            match &t.label {
                PatternLabel::Sym(a) => Term::node(*a, t.children.iter().map(|c| go(c, n)).collect()),
                PatternLabel::Pump(c) => c.power(n).apply(&go(&t.children[0], n)),
            }
        }
        go(&self.term, n)
    }

    pub fn display<'a>(&'a self, alphabet: &'a RankedAlphabet) -> impl fmt::Display + 'a {
        PatternDisplay {
            term: &self.term,
            alphabet,
        }
    }
}

struct PatternDisplay<'a> {
    term: &'a Term<PatternLabel>,
    alphabet: &'a RankedAlphabet,
}

impl fmt::Display for PatternDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.term
            .write_with(f, &|l: &PatternLabel, w: &mut dyn fmt::Write| match l {
                PatternLabel::Sym(a) => w.write_str(self.alphabet.name(*a)),
                PatternLabel::Pump(c) => write!(w, "pump[{}]", c.display(self.alphabet)),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Empty,
    Polynomial(u64),
    Exponential,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Empty => f.write_str("empty"),
            Verdict::Polynomial(k) => write!(f, "polynomial({k})"),
            Verdict::Exponential => f.write_str("exponential"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrimSummary {
    pub states_before: usize,
    pub transitions_before: usize,
    pub states_after: usize,
    pub transitions_after: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Timing {
    pub trim: Duration,
    pub heavy: Duration,
    pub barbells: Duration,
    pub degrees: Duration,
    pub witness: Duration,
}

#[derive(Clone, Debug)]
pub enum Witness {
    Exponential(ExpWitness),
    Polynomial(PolyWitness),
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub verdict: Verdict,
    /// The trimmed automaton all state ids below refer to.
    pub trimmed: Automaton,
    pub summary: TrimSummary,
    pub heavy: Option<HeavyCycleEvidence>,
    pub barbells: Option<BarbellSet>,
    pub degrees: Option<DegreeMap>,
    pub witness: Option<Witness>,
    pub witness_error: Option<GrowthError>,
    pub timing: Timing,
}

#[derive(Clone, Copy, Debug)]
pub struct AnalyzeOptions {
    /// Build the exponential or polynomial witness.
    pub witness: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { witness: true }
    }
}

/// Full analysis with witnesses.
pub fn analyze(a: &Automaton) -> GrowthReport {
    analyze_with(a, AnalyzeOptions::default())
}

pub fn analyze_with(a: &Automaton, opts: AnalyzeOptions) -> GrowthReport {
    let mut timing = Timing::default();
    let clock = Instant::now();
    let trimmed = a.trim();
    timing.trim = clock.elapsed();
    let summary = TrimSummary {
        states_before: a.state_count(),
        transitions_before: a.transitions().len(),
        states_after: trimmed.state_count(),
        transitions_after: trimmed.transitions().len(),
    };
    let mut report = GrowthReport {
        verdict: Verdict::Empty,
        trimmed,
        summary,
        heavy: None,
        barbells: None,
        degrees: None,
        witness: None,
        witness_error: None,
        timing,
    };
    if report.trimmed.state_count() == 0 {
        return report;
    }
    let sk = Skeleton::new_trusted(&report.trimmed);

    let clock = Instant::now();
    let heavy = heavy::find(&sk);
    report.timing.heavy = clock.elapsed();
    if let Some(ev) = heavy {
        report.verdict = Verdict::Exponential;
        if opts.witness {
            let clock = Instant::now();
            match witness::exp_witness_in(&sk, &ev) {
                Ok(w) => report.witness = Some(Witness::Exponential(w)),
                Err(e) => report.witness_error = Some(e),
            }
            report.timing.witness = clock.elapsed();
        }
        report.heavy = Some(ev);
        return report;
    }
    let clock = Instant::now();
    let barbells = barbell::compute(&sk);
    report.timing.barbells = clock.elapsed();
    let clock = Instant::now();
    let degrees = degree::iterate(&sk, &barbells);
    report.timing.degrees = clock.elapsed();
    match degrees {
        Ok(d) => {
            report.verdict = Verdict::Polynomial(d.max());
            if opts.witness {
                let clock = Instant::now();
                match witness::poly_witness_in(&sk, &d, &barbells) {
                    Ok(w) => report.witness = Some(Witness::Polynomial(w)),
                    Err(e) => report.witness_error = Some(e),
                }
                report.timing.witness = clock.elapsed();
            }
            report.degrees = Some(d);
        }
        Err(e) => {
            // only reachable on degree overflow; the growth is polynomial
            report.verdict = Verdict::Polynomial(u64::MAX);
            report.witness_error = Some(e);
        }
    }
    report.barbells = Some(barbells);
    report
}

/// Data shared by the detectors: the shallow digraph of a trim automaton
/// and its strongly connected components.
pub(crate) struct Skeleton<'a> {
    pub a: &'a Automaton,
    pub shallow: ShallowDigraph,
    pub scc: Sccs,
}

impl<'a> Skeleton<'a> {
    pub fn new(a: &'a Automaton) -> Result<Self, GrowthError> {
        if !a.is_trim() {
            return Err(GrowthError::NotTrimmed);
        }
        Ok(Skeleton::new_trusted(a))
    }

    fn new_trusted(a: &'a Automaton) -> Self {
        let shallow = a.shallow_digraph();
        let scc = Sccs::of(&shallow.graph);
        Skeleton { a, shallow, scc }
    }

    pub fn comp(&self, q: StateId) -> usize {
        self.scc.comp[q.index()] as usize
    }

    pub fn same_comp(&self, p: StateId, q: StateId) -> bool {
        self.scc.comp[p.index()] == self.scc.comp[q.index()]
    }

    /// Whether child `index` (1-based) of transition `t` lies on a cycle
    /// through the transition's target.
    pub fn spine_cyclic(&self, t: usize, index: usize) -> bool {
        let tr = &self.a.transitions()[t];
        self.same_comp(tr.children[index - 1], tr.target)
    }
}

#[cfg(test)]
mod tests;

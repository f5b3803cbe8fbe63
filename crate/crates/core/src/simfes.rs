//! Simultaneous Feedback Edge Set through α-matroid parity.
//!
//! For a guess of how many solution edges land in each color class
//! (`k'_i`), the matroid is the direct sum of the `k'_i`-elongated
//! cographic matroids of the color classes plus a uniform matroid
//! `U(τ, k')` on the fake copies, where `τ` counts all fake copies and
//! `k' = Σ (k - k'_i)`. Every edge contributes one block holding its `α`
//! copies, one per slot. `k` blocks with an independent union exist for
//! some guess iff the instance is a yes-instance.
//!
//! Elongations are built by random row stacking, which can only make
//! independent sets look dependent, so YES answers are exact (and verified
//! on the graph) while a NO is wrong with tiny probability; sweeps are
//! repeated with fresh randomness to shrink it further.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ecg::{EdgeColoredGraph, EdgeId, GraphError};
use crate::ffield::PrimeField;
use crate::kernel::{kernelize, KernelOptions, KernelStructure, KernelVerdict};
use crate::matroids::{direct_sum, LinearMatroid, MatroidError};
use crate::par;
use crate::parity::{
    binomial, solve_parity_with, ParityBudget, ParityError, ParityInstance, ParityOutcome, ORACLE_LIMIT,
};
use crate::rng;

#[derive(Debug, Error)]
pub enum SimfesError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Parity(#[from] ParityError),
    #[error("instance too large for oracle")]
    TooLargeForOracle,
    #[error("illegal guess: {0}")]
    IllegalGuess(String),
    #[error("solution failed verification: {0}")]
    Unverified(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CopyKind {
    Original,
    Fake,
}

/// The copy of edge `edge` in slot `slot`; it is original iff the edge
/// carries color `slot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CopyLabel {
    pub edge: EdgeId,
    pub slot: usize,
    pub kind: CopyKind,
}

/// Per-color deletion budgets `k'_1..k'_α`.
pub type GuessTuple = Vec<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub seed: u64,
    pub trials: usize,
    pub use_kernel: bool,
    /// Answer YES right away when the non-forest edges of all color classes
    /// together fit in the budget.
    pub shortcut: bool,
    pub field: PrimeField,
    pub budget: ParityBudget,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 0,
            trials: 3,
            use_kernel: false,
            shortcut: false,
            field: PrimeField::default(),
            budget: ParityBudget::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Some color class needs more than `k` deletions.
    ExcessBound,
    /// The union of non-forest edges fits the budget.
    Shortcut,
    /// The kernel rules decided the instance.
    Kernel,
    /// The guess-and-parity sweep ran.
    Parity,
    /// Exhaustive search.
    Brute,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics {
    pub route: Route,
    /// Parity instances solved, over all sweeps.
    pub guesses_tried: usize,
    /// Legal guess tuples per sweep.
    pub legal_guesses: usize,
    pub trials_run: usize,
    /// Vertices left after kernelization, when it ran.
    pub kernel_vertices: Option<usize>,
    /// The guess that produced the witness.
    pub winning_guess: Option<GuessTuple>,
}

impl Diagnostics {
    fn new(route: Route) -> Self {
        Diagnostics {
            route,
            guesses_tried: 0,
            legal_guesses: 0,
            trials_run: 0,
            kernel_vertices: None,
            winning_guess: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SfesVerdict {
    pub yes: bool,
    /// Deleted edges on YES; empty on NO.
    pub witness: BTreeSet<EdgeId>,
    pub diagnostics: Diagnostics,
}

impl SfesVerdict {
    fn no(diagnostics: Diagnostics) -> Self {
        SfesVerdict {
            yes: false,
            witness: BTreeSet::new(),
            diagnostics,
        }
    }

    fn yes(witness: BTreeSet<EdgeId>, diagnostics: Diagnostics) -> Self {
        SfesVerdict {
            yes: true,
            witness,
            diagnostics,
        }
    }
}

/// `τ`: the number of fake copies, `Σ_e (α - |col(e)|)`.
pub fn fake_copies(g: &EdgeColoredGraph) -> usize {
    g.edges().iter().map(|e| g.alpha() - e.colors.len()).sum()
}

/// All legal guesses for budget `k`, in lexicographic order.
pub fn legal_guesses(g: &EdgeColoredGraph, k: usize) -> Result<Vec<GuessTuple>, SimfesError> {
    let alpha = g.alpha();
    let mut ranges = Vec::with_capacity(alpha);
    for color in 1..=alpha {
        let lo = g.excess(color)?;
        let hi = k.min(g.color_size(color));
        if lo > hi {
            return Ok(Vec::new());
        }
        ranges.push((lo, hi));
    }
    let tau = fake_copies(g);
    let mut out = Vec::new();
    let mut cur: GuessTuple = ranges.iter().map(|r| r.0).collect();
    loop {
        let spare: usize = cur.iter().map(|&x| k - x).sum();
        if spare <= tau {
            out.push(cur.clone());
        }
        // odometer step, last coordinate fastest
        let mut i = alpha;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if cur[i] < ranges[i].1 {
                cur[i] += 1;
                for j in i + 1..alpha {
                    cur[j] = ranges[j].0;
                }
                break;
            }
        }
    }
}

fn check_guess(g: &EdgeColoredGraph, k: usize, guess: &GuessTuple) -> Result<usize, SimfesError> {
    if guess.len() != g.alpha() {
        return Err(SimfesError::IllegalGuess(format!(
            "{} entries for {} colors",
            guess.len(),
            g.alpha()
        )));
    }
    for (i, &x) in guess.iter().enumerate() {
        let color = i + 1;
        if x < g.excess(color)? || x > k || x > g.color_size(color) {
            return Err(SimfesError::IllegalGuess(format!("k'_{color} = {x} out of range")));
        }
    }
    let spare: usize = guess.iter().map(|&x| k - x).sum();
    if spare > fake_copies(g) {
        return Err(SimfesError::IllegalGuess(format!(
            "k' = {spare} exceeds the {} fake copies",
            fake_copies(g)
        )));
    }
    Ok(spare)
}

fn copies(g: &EdgeColoredGraph) -> Vec<Vec<CopyLabel>> {
    g.edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            (1..=g.alpha())
                .map(|slot| CopyLabel {
                    edge: i + 1,
                    slot,
                    kind: if e.colors.contains(slot) {
                        CopyKind::Original
                    } else {
                        CopyKind::Fake
                    },
                })
                .collect()
        })
        .collect()
}

/// The parity instance for one guess, with target `q = k`.
pub fn build_parity_instance<R: rand::Rng + ?Sized>(
    g: &EdgeColoredGraph,
    k: usize,
    guess: &GuessTuple,
    field: PrimeField,
    rng: &mut R,
) -> Result<ParityInstance<CopyLabel>, SimfesError> {
    let cographic: Vec<LinearMatroid<EdgeId>> = (1..=g.alpha())
        .map(|c| Ok(LinearMatroid::cographic(&g.color_subgraph(c)?, field)?))
        .collect::<Result<_, SimfesError>>()?;
    build_with_cographic(g, k, guess, field, &cographic, rng)
}

fn build_with_cographic<R: rand::Rng + ?Sized>(
    g: &EdgeColoredGraph,
    k: usize,
    guess: &GuessTuple,
    field: PrimeField,
    cographic: &[LinearMatroid<EdgeId>],
    rng: &mut R,
) -> Result<ParityInstance<CopyLabel>, SimfesError> {
    let spare = check_guess(g, k, guess)?;
    let mut parts = Vec::with_capacity(g.alpha() + 1);
    for (i, co) in cographic.iter().enumerate() {
        let slot = i + 1;
        let elongated = co.elongation(guess[i], rng)?;
        parts.push(elongated.relabel(|&edge| CopyLabel {
            edge,
            slot,
            kind: CopyKind::Original,
        })?);
    }
    let blocks = copies(g);
    let fakes: Vec<CopyLabel> = blocks
        .iter()
        .flatten()
        .filter(|c| c.kind == CopyKind::Fake)
        .copied()
        .collect();
    let uniform = LinearMatroid::uniform(fakes.len(), spare, field)?;
    parts.push(uniform.relabel(|&j| fakes[j])?);
    let matroid = direct_sum(&parts)?;
    Ok(ParityInstance::new(matroid, blocks, k)?)
}

/// Decides whether at most `k` edge deletions make every color class a
/// forest.
pub fn solve_simfes(g: &EdgeColoredGraph, k: i64, opts: &SolveOptions) -> Result<SfesVerdict, SimfesError> {
    if k < 0 {
        return Ok(SfesVerdict::no(Diagnostics::new(Route::ExcessBound)));
    }
    let k = k as usize;
    for color in 1..=g.alpha() {
        if g.excess(color)? > k {
            return Ok(SfesVerdict::no(Diagnostics::new(Route::ExcessBound)));
        }
    }
    if opts.shortcut {
        let s = KernelStructure::of(g);
        let x: BTreeSet<EdgeId> = s.excess_edges.iter().flatten().copied().collect();
        if x.len() <= k {
            return checked_yes(g, k, x, Diagnostics::new(Route::Shortcut));
        }
    }
    if opts.use_kernel {
        return solve_through_kernel(g, k, opts);
    }
    solve_raw(g, k, opts)
}

fn checked_yes(
    g: &EdgeColoredGraph,
    k: usize,
    witness: BTreeSet<EdgeId>,
    diagnostics: Diagnostics,
) -> Result<SfesVerdict, SimfesError> {
    if witness.len() > k || !g.verify_sfes(&witness)? {
        return Err(SimfesError::Unverified(format!("{witness:?} with k={k}")));
    }
    Ok(SfesVerdict::yes(witness, diagnostics))
}

fn solve_through_kernel(g: &EdgeColoredGraph, k: usize, opts: &SolveOptions) -> Result<SfesVerdict, SimfesError> {
    let kernel = kernelize(g, k as i64, &KernelOptions::default());
    let mut diag = Diagnostics::new(Route::Kernel);
    diag.kernel_vertices = Some(kernel.graph.n());
    let lifted = match kernel.verdict {
        KernelVerdict::No => return Ok(SfesVerdict::no(diag)),
        KernelVerdict::Yes => Some(kernel.forced.clone()),
        KernelVerdict::Reduced => {
            let inner = SolveOptions {
                use_kernel: false,
                ..*opts
            };
            let sub = solve_simfes(&kernel.graph, kernel.k, &inner)?;
            diag.route = sub.diagnostics.route;
            diag.guesses_tried = sub.diagnostics.guesses_tried;
            diag.legal_guesses = sub.diagnostics.legal_guesses;
            diag.trials_run = sub.diagnostics.trials_run;
            diag.winning_guess = sub.diagnostics.winning_guess.clone();
            if !sub.yes {
                return Ok(SfesVerdict::no(diag));
            }
            Some(kernel.lift_witness(&sub.witness))
        }
    };
    match lifted {
        Some(w) if w.len() <= k && g.verify_sfes(&w)? => Ok(SfesVerdict::yes(w, diag)),
        // a lifted witness that does not check out falls back to the input
        _ => solve_raw(g, k, opts),
    }
}

fn solve_raw(g: &EdgeColoredGraph, k: usize, opts: &SolveOptions) -> Result<SfesVerdict, SimfesError> {
    // a yes-instance has a solution of exactly min(k, m) edges
    let k = k.min(g.m());
    let guesses = legal_guesses(g, k)?;
    let mut diag = Diagnostics::new(Route::Parity);
    diag.legal_guesses = guesses.len();
    let cographic: Vec<LinearMatroid<EdgeId>> = (1..=g.alpha())
        .map(|c| Ok(LinearMatroid::cographic(&g.color_subgraph(c)?, opts.field)?))
        .collect::<Result<_, SimfesError>>()?;
    let indexed: Vec<(usize, &GuessTuple)> = guesses.iter().enumerate().collect();
    for trial in 0..opts.trials.max(1) {
        diag.trials_run = trial + 1;
        let found = par::find_map_first(&indexed, |&(gi, guess)| {
            let mut rng = rng::stream(opts.seed, &[trial as u64, gi as u64]);
            let mut run = || -> Result<Option<BTreeSet<usize>>, SimfesError> {
                let inst = build_with_cographic(g, k, guess, opts.field, &cographic, &mut rng)?;
                Ok(match solve_parity_with(&inst, &opts.budget)? {
                    ParityOutcome::Found(ids) => Some(ids),
                    ParityOutcome::NotFound { .. } => None,
                })
            };
            match run() {
                Ok(Some(ids)) => Some(Ok((gi, ids))),
                Ok(None) => None,
                Err(e) => Some(Err(e)),
            }
        });
        match found {
            None => diag.guesses_tried += guesses.len(),
            Some(Err(e)) => return Err(e),
            Some(Ok((gi, ids))) => {
                diag.guesses_tried += gi + 1;
                diag.winning_guess = Some(guesses[gi].clone());
                let witness = ids.into_iter().map(|b| b + 1).collect();
                return checked_yes(g, k, witness, diag);
            }
        }
    }
    Ok(SfesVerdict::no(diag))
}

/// Exhaustive search over edge sets of size at most `k`, smallest first and
/// lexicographic within a size.
pub fn brute_simfes(g: &EdgeColoredGraph, k: i64) -> Result<SfesVerdict, SimfesError> {
    let diag = Diagnostics::new(Route::Brute);
    if k < 0 {
        return Ok(SfesVerdict::no(diag));
    }
    let m = g.m();
    let top = (k as usize).min(m);
    let total: u128 = (0..=top)
        .map(|j| binomial(m as u128, j as u128))
        .fold(0u128, u128::saturating_add);
    if total > ORACLE_LIMIT {
        return Err(SimfesError::TooLargeForOracle);
    }
    for size in 0..=top {
        for set in crate::ffield::lex_subsets(m, size) {
            let w: BTreeSet<EdgeId> = set.into_iter().map(|i| i + 1).collect();
            if g.verify_sfes(&w)? {
                return Ok(SfesVerdict::yes(w, diag));
            }
        }
    }
    Ok(SfesVerdict::no(diag))
}

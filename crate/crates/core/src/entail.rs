//! The entailment decision procedure.
//!
//! A rule set entails a query exactly when two minima over the models of the
//! rule set clear their thresholds: the minimal possible support of the
//! query's premise must reach the query's support threshold, and the minimal
//! value of `supp(A ∪ B) - c · supp(A)` must be nonnegative. Both minima are
//! computed exactly by running the revised simplex maximizer on the negated
//! objectives over the implicit system. When a minimum falls short, the
//! optimal vertex is itself a frequency vector of a counter-model, which is
//! materialized as a concrete context and verified against every rule before
//! it is returned.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::context::{ContextError, FormalContext};
use crate::lp::{ImplicitSystem, LpError, MinimizationOracle, Objective};
use crate::numeric::{lcm_denominators, NumericError, Rational};
use crate::rules::{attribute_universe, ConstrainedImplication, RuleSet};
use crate::simplex::{solve_max, SimplexError, SolveOptions, SolveOutcome};

/// Cap on the number of candidate contexts the brute-force refuter will
/// enumerate.
const REFUTE_CANDIDATE_CAP: u128 = 5_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EntailError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error("the {0:?} program reported an unbounded objective, which the sum rows rule out")]
    UnexpectedUnbounded(FailingProgram),
    #[error("witness verification failed: the extracted context does not refute the query")]
    WitnessVerificationFailed,
    #[error("witness input {detail}")]
    InvalidWitnessInput { detail: String },
    #[error("witness would need {0} objects, too many to materialize")]
    WitnessTooLarge(String),
    #[error("brute-force refutation needs max_objects >= 1")]
    ZeroMaxObjects,
    #[error("brute-force search space of {candidates} contexts exceeds the cap of {cap}")]
    SearchSpaceExceeded { candidates: u128, cap: u128 },
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Which of the two programs falls short of its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailingProgram {
    Support,
    Confidence,
}

/// Exact minima of the two entailment programs together with attaining
/// vertices, restricted to the subset columns.
#[derive(Clone, Debug)]
pub struct Minima {
    /// The attribute universe the system was built over, in column order.
    pub universe: Vec<String>,
    /// `min supp(A)` over all models of the rule set.
    pub min_support: Rational,
    /// `min supp(A ∪ B) - c · supp(A)` over all models of the rule set.
    pub min_surrogate: Rational,
    /// A frequency vector attaining `min_support`, keyed by subset column.
    pub support_argmin: BTreeMap<usize, Rational>,
    /// A frequency vector attaining `min_surrogate`.
    pub surrogate_argmin: BTreeMap<usize, Rational>,
}

/// The outcome of a decided instance.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub entailed: bool,
    /// The first violated program (support checked first); present iff not
    /// entailed.
    pub failing_program: Option<FailingProgram>,
    pub min_support_value: Rational,
    pub min_surrogate_value: Rational,
    /// A context modeling every rule of the set and violating the query;
    /// present iff not entailed.
    pub witness: Option<FormalContext>,
}

/// Builds the implicit system over the instance's attribute universe and
/// solves both minimization programs from the explicit feasible start.
pub fn solve_min_programs(
    rules: &RuleSet,
    query: &ConstrainedImplication,
    options: &SolveOptions,
) -> Result<Minima, EntailError> {
    let universe = attribute_universe(rules, query);
    let system = ImplicitSystem::new(universe.clone(), rules)?;
    let (basis, _) = system.initial_basis();

    let support_objective = system.min_support_objective(query.premise())?;
    let surrogate_objective = system.confidence_surrogate_objective(
        query.premise(),
        query.conclusion(),
        query.min_confidence(),
    )?;

    let (min_support, support_argmin) = solve_one(
        &system,
        &support_objective,
        &basis,
        options,
        FailingProgram::Support,
    )?;
    let (min_surrogate, surrogate_argmin) = solve_one(
        &system,
        &surrogate_objective,
        &basis,
        options,
        FailingProgram::Confidence,
    )?;

    Ok(Minima {
        universe,
        min_support,
        min_surrogate,
        support_argmin,
        surrogate_argmin,
    })
}

fn solve_one(
    system: &ImplicitSystem,
    objective: &Objective,
    basis: &[usize],
    options: &SolveOptions,
    program: FailingProgram,
) -> Result<(Rational, BTreeMap<usize, Rational>), EntailError> {
    let oracle = MinimizationOracle::new(system, objective);
    match solve_max(&oracle, basis, options)? {
        SolveOutcome::Optimal {
            value, solution, ..
        } => {
            let frequencies = solution
                .into_iter()
                .filter(|(column, _)| *column < system.subset_column_count())
                .collect();
            // The maximizer ran on the negated objective.
            Ok((-value, frequencies))
        }
        SolveOutcome::Unbounded { .. } => Err(EntailError::UnexpectedUnbounded(program)),
    }
}

/// Decides whether `rules` entails `query`; on failure the verdict carries a
/// verified counter-model context.
pub fn decide_entailment(
    rules: &RuleSet,
    query: &ConstrainedImplication,
    options: &SolveOptions,
) -> Result<Verdict, EntailError> {
    let minima = solve_min_programs(rules, query, options)?;
    let support_ok = minima.min_support >= *query.min_support();
    let surrogate_ok = !minima.min_surrogate.is_negative();
    if support_ok && surrogate_ok {
        return Ok(Verdict {
            entailed: true,
            failing_program: None,
            min_support_value: minima.min_support,
            min_surrogate_value: minima.min_surrogate,
            witness: None,
        });
    }

    let (failing, argmin) = if !support_ok {
        (FailingProgram::Support, &minima.support_argmin)
    } else {
        (FailingProgram::Confidence, &minima.surrogate_argmin)
    };
    let witness = witness_context(argmin, &minima.universe)?;
    for rule in rules {
        if !witness.models(rule)? {
            return Err(EntailError::WitnessVerificationFailed);
        }
    }
    if witness.models(query)? {
        return Err(EntailError::WitnessVerificationFailed);
    }
    Ok(Verdict {
        entailed: false,
        failing_program: Some(failing),
        min_support_value: minima.min_support,
        min_surrogate_value: minima.min_surrogate,
        witness: Some(witness),
    })
}

/// Materializes a frequency vector as a context: scale by the least common
/// denominator `n`, then emit `x * n` objects per nonzero component, named
/// `o1`, `o2`, ... in column order, each with the component's subset as its
/// intent. The resulting context has exactly `n` objects and its frequency
/// vector is `x` again.
pub fn witness_context(
    frequencies: &BTreeMap<usize, Rational>,
    universe: &[String],
) -> Result<FormalContext, EntailError> {
    let nonzero: Vec<(&usize, &Rational)> = frequencies
        .iter()
        .filter(|(_, value)| !value.is_zero())
        .collect();
    for (column, value) in &nonzero {
        if value.is_negative() {
            return Err(EntailError::InvalidWitnessInput {
                detail: format!("has negative component {value} at column {column}"),
            });
        }
    }
    let total: Rational = nonzero.iter().map(|(_, value)| (*value).clone()).sum();
    if !total.is_one() {
        return Err(EntailError::InvalidWitnessInput {
            detail: format!("components sum to {total}, expected 1"),
        });
    }
    let values: Vec<Rational> = nonzero.iter().map(|(_, value)| (*value).clone()).collect();
    let scale = lcm_denominators(&values)?;

    let mut intents = Vec::new();
    for (&column, value) in &nonzero {
        let subset = crate::lp::subset_of_index(universe, column)?;
        let count = (*value * Rational::from_integer(scale.clone()))
            .to_integer()
            .to_usize()
            .ok_or_else(|| EntailError::WitnessTooLarge(scale.to_string()))?;
        for _ in 0..count {
            intents.push(subset.clone());
        }
    }
    let named = intents
        .iter()
        .enumerate()
        .map(|(i, intent)| (format!("o{}", i + 1), intent));
    Ok(FormalContext::from_intents(universe.to_vec(), named)?)
}

/// The frequency vector of a context over `universe`: for each subset, the
/// fraction of objects whose intent is exactly that subset. Inverse of
/// [`witness_context`].
pub fn frequency_vector(
    context: &FormalContext,
    universe: &[String],
) -> Result<BTreeMap<usize, Rational>, EntailError> {
    if context.object_count() == 0 {
        return Err(EntailError::Context(ContextError::EmptyContext));
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for object in 0..context.object_count() {
        let intent = context.object_intent(object);
        let column = crate::lp::index_of_subset(universe, &intent)?;
        *counts.entry(column).or_default() += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(column, count)| {
            (
                column,
                Rational::new(count.into(), context.object_count().into()),
            )
        })
        .collect())
}

/// Exhaustively searches for a counter-model with at most `max_objects`
/// objects over the instance's universe: a context modeling every rule and
/// violating the query. Sound but incomplete; intended for desk-scale
/// instances as an independent check of the solver path.
pub fn brute_force_refute(
    rules: &RuleSet,
    query: &ConstrainedImplication,
    max_objects: usize,
) -> Result<Option<FormalContext>, EntailError> {
    if max_objects == 0 {
        return Err(EntailError::ZeroMaxObjects);
    }
    let universe = attribute_universe(rules, query);
    if universe.is_empty() {
        // No attributes means no finite non-empty context exists at all, so
        // there is nothing to refute with.
        return Ok(None);
    }
    if universe.len() >= 32 {
        return Err(EntailError::SearchSpaceExceeded {
            candidates: u128::MAX,
            cap: REFUTE_CANDIDATE_CAP,
        });
    }
    let intent_count = 1usize << universe.len();
    let candidates = count_multisets(intent_count as u128, max_objects);
    if candidates > REFUTE_CANDIDATE_CAP {
        return Err(EntailError::SearchSpaceExceeded {
            candidates,
            cap: REFUTE_CANDIDATE_CAP,
        });
    }

    let intents: Vec<crate::context::AttrSet> = (0..intent_count)
        .map(|index| crate::lp::subset_of_index(&universe, index))
        .collect::<Result<_, _>>()?;

    // Multisets of intents, enumerated as non-decreasing index sequences of
    // each size in turn; object identity beyond the intent is irrelevant to
    // support and confidence.
    let mut stack: Vec<usize> = Vec::new();
    for size in 1..=max_objects {
        stack.clear();
        stack.resize(size, 0);
        loop {
            let named = stack
                .iter()
                .enumerate()
                .map(|(i, &index)| (format!("o{}", i + 1), &intents[index]));
            let candidate = FormalContext::from_intents(universe.clone(), named)?;
            let mut is_model = true;
            for rule in rules {
                if !candidate.models(rule)? {
                    is_model = false;
                    break;
                }
            }
            if is_model && !candidate.models(query)? {
                return Ok(Some(candidate));
            }
            // Advance to the next non-decreasing sequence.
            let Some(position) = stack.iter().rposition(|&index| index + 1 < intent_count) else {
                break;
            };
            let next = stack[position] + 1;
            for slot in &mut stack[position..] {
                *slot = next;
            }
        }
    }
    Ok(None)
}

/// Number of multisets of size 1..=k over n symbols.
fn count_multisets(symbols: u128, max_size: usize) -> u128 {
    let mut total: u128 = 0;
    for size in 1..=max_size as u128 {
        // C(symbols + size - 1, size), built incrementally with saturation.
        let mut choose: u128 = 1;
        for i in 0..size {
            choose = choose
                .saturating_mul(symbols.saturating_add(size - 1 - i))
                .saturating_div(i + 1);
        }
        total = total.saturating_add(choose);
    }
    total
}

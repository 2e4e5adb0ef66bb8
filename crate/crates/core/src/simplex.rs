//! Revised simplex maximization over an exact ordered scalar.
//!
//! The solver touches the constraint matrix only through a [`ColumnOracle`],
//! so a system with exponentially many columns can be optimized while the
//! working set stays proportional to the square of the row count: the basis
//! index list, the basis inverse, the basic values, and one streamed column
//! at a time. The basis inverse is recomputed from scratch at every pivot by
//! exact Gauss-Jordan elimination; with exact arithmetic this is the
//! simplest correct maintenance scheme and costs the same order of space as
//! any update form.
//!
//! Pivot selection defaults to Bland's rule (first improving column enters,
//! smallest column index leaves on ratio ties), which guarantees finite
//! termination. A variant that breaks ratio ties by lexicographic comparison
//! of the original matrix columns is available for experiments; it is not
//! covered by the termination guarantee, only by the iteration cap.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_traits::{Num, Signed};
use thiserror::Error;

/// An exact ordered scalar: the element type of every vector and matrix the
/// solver handles. Ordering must be total and arithmetic exact; rational
/// types qualify, floating point does not (it has no `Ord`).
pub trait Scalar: Clone + Num + Signed + Ord + fmt::Debug + fmt::Display {}

impl<T> Scalar for T where T: Clone + Num + Signed + Ord + fmt::Debug + fmt::Display {}

/// Column access to the linear program `max { c^T x | Ax = b, x >= 0 }`.
///
/// `entry` and `objective` must be pure: the same indices always yield the
/// same values. The matrix is assumed to have full row rank.
pub trait ColumnOracle<S: Scalar> {
    fn row_count(&self) -> usize;
    fn column_count(&self) -> usize;
    /// The matrix entry at `(row, column)`.
    fn entry(&self, row: usize, column: usize) -> S;
    /// The objective coefficient of `column`.
    fn objective(&self, column: usize) -> S;
    /// The right-hand side, of length `row_count`.
    fn rhs(&self) -> &[S];
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimplexError {
    #[error("basis has {got} columns, expected one per row ({expected})")]
    BasisSize { expected: usize, got: usize },
    #[error("column {0} appears twice in the basis")]
    DuplicateBasisColumn(usize),
    #[error("basis column {column} out of range for {count} columns")]
    BasisColumnOutOfRange { column: usize, count: usize },
    #[error("basis matrix is singular")]
    SingularBasis,
    #[error("starting basic solution is infeasible")]
    InfeasibleStart,
    #[error("iteration cap of {0} exceeded; this indicates a pivot-rule bug")]
    IterationCapExceeded(u64),
}

/// How ratio-test ties pick the leaving column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest column index leaves; finite termination guaranteed.
    #[default]
    Bland,
    /// The lexicographically smallest original column leaves (falling back
    /// to the smaller index between identical columns).
    LexicographicColumns,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub pivot_rule: PivotRule,
    /// Safety valve against pivot-rule bugs, not a theoretical bound.
    pub max_iterations: u64,
    /// Emit one line per pivot on stderr: iteration, entering, leaving,
    /// objective value.
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            pivot_rule: PivotRule::Bland,
            max_iterations: 1_000_000,
            trace: false,
        }
    }
}

/// A basic feasible solution: the basis column indices (position-aligned
/// with the inverse rows), the exact basis inverse, and the basic values
/// `x_B = B^{-1} b >= 0`.
#[derive(Clone, Debug)]
pub struct SimplexState<S> {
    basis: Vec<usize>,
    basis_inverse: Vec<Vec<S>>,
    basic_values: Vec<S>,
    iteration: u64,
}

impl<S: Scalar> SimplexState<S> {
    /// Builds the state for a basis, verifying nonsingularity and primal
    /// feasibility.
    pub fn from_basis(
        oracle: &impl ColumnOracle<S>,
        basis: Vec<usize>,
    ) -> Result<Self, SimplexError> {
        let rows = oracle.row_count();
        if basis.len() != rows {
            return Err(SimplexError::BasisSize {
                expected: rows,
                got: basis.len(),
            });
        }
        let mut seen = HashSet::new();
        for &column in &basis {
            if column >= oracle.column_count() {
                return Err(SimplexError::BasisColumnOutOfRange {
                    column,
                    count: oracle.column_count(),
                });
            }
            if !seen.insert(column) {
                return Err(SimplexError::DuplicateBasisColumn(column));
            }
        }
        let basis_inverse =
            invert(basis_matrix(oracle, &basis)).ok_or(SimplexError::SingularBasis)?;
        let basic_values = mat_vec(&basis_inverse, oracle.rhs());
        if basic_values.iter().any(|v| v.is_negative()) {
            return Err(SimplexError::InfeasibleStart);
        }
        Ok(Self {
            basis,
            basis_inverse,
            basic_values,
            iteration: 0,
        })
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn basic_values(&self) -> &[S] {
        &self.basic_values
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// Current objective value `c_B^T x_B`.
    pub fn objective_value(&self, oracle: &impl ColumnOracle<S>) -> S {
        self.basis
            .iter()
            .zip(&self.basic_values)
            .fold(S::zero(), |acc, (&column, value)| {
                acc + oracle.objective(column) * value.clone()
            })
    }

    /// The basic solution as a sparse map holding the nonzero components;
    /// its support lies within the basis columns.
    pub fn solution(&self) -> BTreeMap<usize, S> {
        self.basis
            .iter()
            .zip(&self.basic_values)
            .filter(|(_, value)| !value.is_zero())
            .map(|(&column, value)| (column, value.clone()))
            .collect()
    }

    /// Exact check of the inverse invariant `B^{-1} B = I`.
    pub fn verify_inverse(&self, oracle: &impl ColumnOracle<S>) -> bool {
        let b = basis_matrix(oracle, &self.basis);
        let n = self.basis.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let product = (0..n).fold(S::zero(), |acc, t| {
                    acc + self.basis_inverse[i][t].clone() * b[t][j].clone()
                });
                product == if i == j { S::one() } else { S::zero() }
            })
        })
    }

    /// The tableau column `d = B^{-1} a_k` of an entering candidate.
    fn tableau_column(&self, oracle: &impl ColumnOracle<S>, entering: usize) -> Vec<S> {
        let rows = self.basis.len();
        let column: Vec<S> = (0..rows).map(|i| oracle.entry(i, entering)).collect();
        mat_vec(&self.basis_inverse, &column)
    }
}

/// Pricing: returns the first non-basic column with positive reduced cost,
/// scanning in increasing column order, or `None` at optimality.
///
/// The simplex multipliers `u = c_B^T B^{-1}` are computed once; each
/// candidate column is then streamed entry by entry, so no more than one
/// column is ever materialized.
pub fn price<S: Scalar>(oracle: &impl ColumnOracle<S>, state: &SimplexState<S>) -> Option<usize> {
    let rows = state.basis.len();
    let multipliers: Vec<S> = (0..rows)
        .map(|j| {
            state.basis.iter().zip(&state.basis_inverse).fold(
                S::zero(),
                |acc, (&column, inverse_row)| {
                    acc + oracle.objective(column) * inverse_row[j].clone()
                },
            )
        })
        .collect();
    let in_basis: HashSet<usize> = state.basis.iter().copied().collect();
    (0..oracle.column_count())
        .filter(|column| !in_basis.contains(column))
        .find(|&column| {
            let mut reduced = oracle.objective(column);
            for (i, multiplier) in multipliers.iter().enumerate() {
                if !multiplier.is_zero() {
                    reduced = reduced - multiplier.clone() * oracle.entry(i, column);
                }
            }
            reduced.is_positive()
        })
}

/// Outcome of the ratio test for an entering column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RatioTest {
    /// Basis position of the leaving column.
    Leaving(usize),
    /// The entering direction never hits a bound: the program is unbounded.
    Unbounded,
}

/// Ratio test: picks the basis position minimizing `x_i / d_i` over the
/// positive components of the tableau column, or reports unboundedness when
/// there are none. Ratios are compared by cross-multiplication. Ties go to
/// the smallest leaving column index (Bland) or to the lexicographically
/// smallest original column, per `rule`.
pub fn ratio_test<S: Scalar>(
    oracle: &impl ColumnOracle<S>,
    state: &SimplexState<S>,
    entering: usize,
    rule: PivotRule,
) -> RatioTest {
    let direction = state.tableau_column(oracle, entering);
    let mut best: Option<usize> = None;
    for (position, step) in direction.iter().enumerate() {
        if !step.is_positive() {
            continue;
        }
        let best_position = match best {
            None => {
                best = Some(position);
                continue;
            }
            Some(b) => b,
        };
        // x_pos / d_pos  vs  x_best / d_best, cross-multiplied (both
        // denominators are positive, preserving the order).
        let lhs = state.basic_values[position].clone() * direction[best_position].clone();
        let rhs = state.basic_values[best_position].clone() * step.clone();
        if lhs < rhs || (lhs == rhs && breaks_tie(oracle, state, position, best_position, rule)) {
            best = Some(position);
        }
    }
    match best {
        Some(position) => RatioTest::Leaving(position),
        None => RatioTest::Unbounded,
    }
}

/// True when `candidate` should replace `incumbent` among minimal ratios.
fn breaks_tie<S: Scalar>(
    oracle: &impl ColumnOracle<S>,
    state: &SimplexState<S>,
    candidate: usize,
    incumbent: usize,
    rule: PivotRule,
) -> bool {
    let candidate_column = state.basis[candidate];
    let incumbent_column = state.basis[incumbent];
    match rule {
        PivotRule::Bland => candidate_column < incumbent_column,
        PivotRule::LexicographicColumns => {
            for row in 0..state.basis.len() {
                let a = oracle.entry(row, candidate_column);
                let b = oracle.entry(row, incumbent_column);
                if a != b {
                    return a < b;
                }
            }
            candidate_column < incumbent_column
        }
    }
}

/// Exchanges the basis column at `leaving_position` for `entering` and
/// rebuilds the inverse and basic values exactly.
pub fn pivot<S: Scalar>(
    oracle: &impl ColumnOracle<S>,
    state: &SimplexState<S>,
    entering: usize,
    leaving_position: usize,
) -> Result<SimplexState<S>, SimplexError> {
    let mut basis = state.basis.clone();
    basis[leaving_position] = entering;
    let basis_inverse = invert(basis_matrix(oracle, &basis)).ok_or(SimplexError::SingularBasis)?;
    let basic_values = mat_vec(&basis_inverse, oracle.rhs());
    debug_assert!(
        basic_values.iter().all(|v| !v.is_negative()),
        "pivot lost primal feasibility"
    );
    Ok(SimplexState {
        basis,
        basis_inverse,
        basic_values,
        iteration: state.iteration + 1,
    })
}

/// The result of a terminated solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome<S> {
    Optimal {
        value: S,
        /// Nonzero components of the optimal vertex, keyed by column.
        solution: BTreeMap<usize, S>,
        /// The optimal basis, enabling external certificate checks.
        basis: Vec<usize>,
        iterations: u64,
    },
    Unbounded {
        iterations: u64,
    },
}

/// Runs price / ratio test / pivot from a feasible starting basis until
/// optimality or unboundedness.
pub fn solve_max<S: Scalar>(
    oracle: &impl ColumnOracle<S>,
    start_basis: &[usize],
    options: &SolveOptions,
) -> Result<SolveOutcome<S>, SimplexError> {
    let mut state = SimplexState::from_basis(oracle, start_basis.to_vec())?;
    loop {
        let entering = match price(oracle, &state) {
            None => {
                return Ok(SolveOutcome::Optimal {
                    value: state.objective_value(oracle),
                    solution: state.solution(),
                    basis: state.basis,
                    iterations: state.iteration,
                });
            }
            Some(column) => column,
        };
        let leaving_position = match ratio_test(oracle, &state, entering, options.pivot_rule) {
            RatioTest::Leaving(position) => position,
            RatioTest::Unbounded => {
                return Ok(SolveOutcome::Unbounded {
                    iterations: state.iteration,
                });
            }
        };
        if state.iteration >= options.max_iterations {
            return Err(SimplexError::IterationCapExceeded(options.max_iterations));
        }
        let leaving_column = state.basis[leaving_position];
        debug_assert!(state.verify_inverse(oracle));
        let previous_value = state.objective_value(oracle);
        state = pivot(oracle, &state, entering, leaving_position)?;
        let value = state.objective_value(oracle);
        debug_assert!(
            value >= previous_value,
            "objective regressed across a pivot"
        );
        if options.trace {
            eprintln!(
                "simplex iteration {}: entering {}, leaving {}, objective {}",
                state.iteration, entering, leaving_column, value
            );
        }
    }
}

fn basis_matrix<S: Scalar>(oracle: &impl ColumnOracle<S>, basis: &[usize]) -> Vec<Vec<S>> {
    let rows = oracle.row_count();
    (0..rows)
        .map(|i| basis.iter().map(|&j| oracle.entry(i, j)).collect())
        .collect()
}

fn mat_vec<S: Scalar>(matrix: &[Vec<S>], vector: &[S]) -> Vec<S> {
    matrix
        .iter()
        .map(|row| {
            row.iter()
                .zip(vector)
                .filter(|(coeff, _)| !coeff.is_zero())
                .fold(S::zero(), |acc, (coeff, v)| acc + coeff.clone() * v.clone())
        })
        .collect()
}

/// Exact Gauss-Jordan inversion; `None` on a singular matrix. With exact
/// scalars any nonzero pivot is as good as any other, so the first one per
/// column is used.
fn invert<S: Scalar>(mut matrix: Vec<Vec<S>>) -> Option<Vec<Vec<S>>> {
    let n = matrix.len();
    let mut inverse: Vec<Vec<S>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { S::one() } else { S::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !matrix[r][col].is_zero())?;
        matrix.swap(pivot_row, col);
        inverse.swap(pivot_row, col);
        let pivot = matrix[col][col].clone();
        for c in 0..n {
            matrix[col][c] = matrix[col][c].clone() / pivot.clone();
            inverse[col][c] = inverse[col][c].clone() / pivot.clone();
        }
        for r in 0..n {
            if r == col || matrix[r][col].is_zero() {
                continue;
            }
            let factor = matrix[r][col].clone();
            for c in 0..n {
                let m_delta = factor.clone() * matrix[col][c].clone();
                matrix[r][c] = matrix[r][c].clone() - m_delta;
                let i_delta = factor.clone() * inverse[col][c].clone();
                inverse[r][c] = inverse[r][c].clone() - i_delta;
            }
        }
    }
    Some(inverse)
}

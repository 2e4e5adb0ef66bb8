//! The implicit inequality system of an entailment instance.
//!
//! For a rule set with `m` rules over a `p`-attribute universe, the system
//! `Ax >= b` has one support row and one confidence row per rule plus two
//! rows forcing the subset frequencies to sum to one, and one column per
//! subset of the universe. Appending slack variables turns it into the
//! equation system `(A, -I) (x, y) = b` with `2m + 2` rows and
//! `2^p + 2m + 2` columns. The matrix is never stored: every entry is
//! computed on demand from the rule masks, which is what keeps the solver's
//! working set polynomial while the column space is exponential.
//!
//! Row layout (0-indexed): row `2k` is the support row of rule `k`, row
//! `2k + 1` its confidence row, row `2m` the lower and row `2m + 1` the upper
//! sum row. Column `j < 2^p` is the subset of the universe whose
//! characteristic vector is the binary representation of `j`, with the first
//! attribute in canonical order as the most significant bit; column
//! `2^p + i` is the slack of row `i`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::context::AttrSet;
use crate::numeric::Rational;
use crate::rules::RuleSet;
use crate::simplex::ColumnOracle;

/// Largest universe the densifier materializes by default (`2^16` subset
/// columns); beyond it the implicit oracle is the only access path.
pub const DEFAULT_MATERIALIZATION_CAP: usize = 16;

/// Hard bound on the universe size: column indices must fit in a machine
/// word, and subset masks in 64 bits.
const UNIVERSE_BIT_CAP: usize = 62;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("attribute '{0}' is not in the universe")]
    UnknownAttribute(String),
    #[error("duplicate attribute '{0}' in the universe")]
    DuplicateAttribute(String),
    #[error("universe has {0} attributes, more than the {UNIVERSE_BIT_CAP} this representation supports")]
    UniverseTooLarge(usize),
    #[error("row {row} out of range for {count} rows")]
    RowOutOfRange { row: usize, count: usize },
    #[error("column {column} out of range for {count} columns")]
    ColumnOutOfRange { column: usize, count: usize },
    #[error("subset index {index} out of range for {count} subset columns")]
    SubsetIndexOutOfRange { index: usize, count: usize },
    #[error(
        "universe has {attributes} attributes, above the materialization cap of {cap}; \
         use the implicit oracle instead"
    )]
    MaterializationCapExceeded { attributes: usize, cap: usize },
}

/// A rule compiled against a fixed universe: premise and premise-union-
/// conclusion as bit masks, thresholds, and the precomputed confidence-row
/// coefficients.
#[derive(Clone, Debug)]
struct CompiledRule {
    premise_mask: u64,
    extended_mask: u64,
    residual_confidence: Rational,
    negated_confidence: Rational,
}

/// The system `(A, -I) (x, y) = b` of one entailment instance, represented
/// by formula. Immutable; entry and objective lookups are pure.
#[derive(Clone, Debug)]
pub struct ImplicitSystem {
    universe: Vec<String>,
    rules: Vec<CompiledRule>,
    rhs: Vec<Rational>,
}

impl ImplicitSystem {
    /// Compiles `rules` against `universe`. The universe order is the fixed
    /// linear ordering behind the subset-column bijection; every attribute a
    /// rule mentions must be in it.
    pub fn new(universe: Vec<String>, rules: &RuleSet) -> Result<Self, LpError> {
        if universe.len() > UNIVERSE_BIT_CAP {
            return Err(LpError::UniverseTooLarge(universe.len()));
        }
        for (i, name) in universe.iter().enumerate() {
            if universe[..i].contains(name) {
                return Err(LpError::DuplicateAttribute(name.clone()));
            }
        }
        let mut compiled = Vec::with_capacity(rules.len());
        let mut rhs = Vec::with_capacity(2 * rules.len() + 2);
        for rule in rules {
            let premise_mask = mask_of(&universe, rule.premise())?;
            let extended_mask = premise_mask | mask_of(&universe, rule.conclusion())?;
            compiled.push(CompiledRule {
                premise_mask,
                extended_mask,
                residual_confidence: Rational::one() - rule.min_confidence(),
                negated_confidence: -rule.min_confidence().clone(),
            });
            rhs.push(rule.min_support().clone());
            rhs.push(Rational::zero());
        }
        rhs.push(Rational::one());
        rhs.push(-Rational::one());
        Ok(Self {
            universe,
            rules: compiled,
            rhs,
        })
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    /// Number of rules `m`.
    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// `2m + 2`.
    pub fn row_count(&self) -> usize {
        2 * self.rules.len() + 2
    }

    /// `2^p`: one column per subset of the universe.
    pub fn subset_column_count(&self) -> usize {
        1usize << self.universe.len()
    }

    /// `2^p + 2m + 2`: subset columns followed by one slack column per row.
    pub fn column_count(&self) -> usize {
        self.subset_column_count() + self.row_count()
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    /// The subset column of an attribute set.
    pub fn set_to_index(&self, set: &AttrSet) -> Result<usize, LpError> {
        index_of_subset(&self.universe, set)
    }

    /// The attribute set of a subset column.
    pub fn index_to_set(&self, index: usize) -> Result<AttrSet, LpError> {
        subset_of_index(&self.universe, index)
    }

    fn check_row(&self, row: usize) -> Result<(), LpError> {
        if row >= self.row_count() {
            return Err(LpError::RowOutOfRange {
                row,
                count: self.row_count(),
            });
        }
        Ok(())
    }

    fn check_column(&self, column: usize) -> Result<(), LpError> {
        if column >= self.column_count() {
            return Err(LpError::ColumnOutOfRange {
                column,
                count: self.column_count(),
            });
        }
        Ok(())
    }

    /// One entry of `(A, -I)`, computed from the rule masks.
    pub fn matrix_entry(&self, row: usize, column: usize) -> Result<Rational, LpError> {
        self.check_row(row)?;
        self.check_column(column)?;
        Ok(self.entry_at(row, column))
    }

    fn entry_at(&self, row: usize, column: usize) -> Rational {
        let subset_columns = self.subset_column_count();
        if column >= subset_columns {
            // The -I slack block.
            return if column - subset_columns == row {
                -Rational::one()
            } else {
                Rational::zero()
            };
        }
        let subset = column as u64;
        let m = self.rules.len();
        if row == 2 * m {
            return Rational::one();
        }
        if row == 2 * m + 1 {
            return -Rational::one();
        }
        let rule = &self.rules[row / 2];
        if row.is_multiple_of(2) {
            // Support row: the indicator of "subset contains the premise".
            if subset & rule.premise_mask == rule.premise_mask {
                Rational::one()
            } else {
                Rational::zero()
            }
        } else if subset & rule.extended_mask == rule.extended_mask {
            rule.residual_confidence.clone()
        } else if subset & rule.premise_mask == rule.premise_mask {
            rule.negated_confidence.clone()
        } else {
            Rational::zero()
        }
    }

    /// The objective of the first entailment program: minimize the total
    /// frequency of subsets containing the query premise.
    pub fn min_support_objective(&self, premise: &AttrSet) -> Result<Objective, LpError> {
        let premise_mask = mask_of(&self.universe, premise)?;
        Ok(Objective {
            kind: ObjectiveKind::MinSupport,
            premise_mask,
            extended_mask: premise_mask,
            residual_confidence: Rational::zero(),
            negated_confidence: Rational::zero(),
        })
    }

    /// The objective of the second entailment program: minimize
    /// `supp(A ∪ B) - c · supp(A)`, whose nonnegativity over all models
    /// encodes the confidence threshold `c`.
    pub fn confidence_surrogate_objective(
        &self,
        premise: &AttrSet,
        conclusion: &AttrSet,
        confidence: &Rational,
    ) -> Result<Objective, LpError> {
        let premise_mask = mask_of(&self.universe, premise)?;
        let extended_mask = premise_mask | mask_of(&self.universe, conclusion)?;
        Ok(Objective {
            kind: ObjectiveKind::ConfidenceSurrogate,
            premise_mask,
            extended_mask,
            residual_confidence: Rational::one() - confidence,
            negated_confidence: -confidence.clone(),
        })
    }

    /// One coefficient of the minimization objective; slack columns carry no
    /// weight.
    pub fn objective_coeff(
        &self,
        objective: &Objective,
        column: usize,
    ) -> Result<Rational, LpError> {
        self.check_column(column)?;
        Ok(self.objective_coeff_at(objective, column))
    }

    fn objective_coeff_at(&self, objective: &Objective, column: usize) -> Rational {
        if column >= self.subset_column_count() {
            return Rational::zero();
        }
        let subset = column as u64;
        match objective.kind {
            ObjectiveKind::MinSupport => {
                if subset & objective.premise_mask == objective.premise_mask {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            ObjectiveKind::ConfidenceSurrogate => {
                if subset & objective.extended_mask == objective.extended_mask {
                    objective.residual_confidence.clone()
                } else if subset & objective.premise_mask == objective.premise_mask {
                    objective.negated_confidence.clone()
                } else {
                    Rational::zero()
                }
            }
        }
    }

    /// The minimization objective as a dense row, for use with a densified
    /// system.
    pub fn materialize_objective(&self, objective: &Objective) -> Vec<Rational> {
        (0..self.column_count())
            .map(|j| self.objective_coeff_at(objective, j))
            .collect()
    }

    /// The explicit feasible start: all frequency mass on the full universe
    /// subset, slacks taking up the row surpluses.
    ///
    /// The solution puts `x = 1` on the column of the whole universe and `0`
    /// elsewhere; then `y = Ax - b` is `1 - s_k` on support rows, `1 - c_k`
    /// on confidence rows and `0` on the sum rows, all nonnegative because
    /// thresholds never exceed one. The basis is the full-universe column
    /// plus every slack column except the one of the last sum row; expanding
    /// the determinant along that row (where only the full-universe column is
    /// nonzero) shows it is nonsingular. Feasibility is therefore
    /// unconditional: every rule set has a model.
    pub fn initial_basis(&self) -> (Vec<usize>, BTreeMap<usize, Rational>) {
        let full_column = self.subset_column_count() - 1;
        let slack_base = self.subset_column_count();
        let m = self.rules.len();

        let mut basis = Vec::with_capacity(self.row_count());
        let mut solution = BTreeMap::new();
        basis.push(full_column);
        solution.insert(full_column, Rational::one());
        for row in 0..self.row_count() - 1 {
            basis.push(slack_base + row);
            let surplus = if row < 2 * m {
                let rule = &self.rules[row / 2];
                if row % 2 == 0 {
                    Rational::one() - &self.rhs[row]
                } else {
                    rule.residual_confidence.clone()
                }
            } else {
                Rational::zero()
            };
            solution.insert(slack_base + row, surplus);
        }
        (basis, solution)
    }

    /// Materializes the full matrix and right-hand side. Only sensible for
    /// small universes; refuses above the cap.
    pub fn densify(&self) -> Result<DenseSystem, LpError> {
        self.densify_with_cap(DEFAULT_MATERIALIZATION_CAP)
    }

    pub fn densify_with_cap(&self, max_attributes: usize) -> Result<DenseSystem, LpError> {
        if self.universe.len() > max_attributes {
            return Err(LpError::MaterializationCapExceeded {
                attributes: self.universe.len(),
                cap: max_attributes,
            });
        }
        let matrix = (0..self.row_count())
            .map(|i| {
                (0..self.column_count())
                    .map(|j| self.entry_at(i, j))
                    .collect()
            })
            .collect();
        Ok(DenseSystem {
            matrix,
            rhs: self.rhs.clone(),
        })
    }
}

/// Which of the two entailment programs an objective encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveKind {
    MinSupport,
    ConfidenceSurrogate,
}

/// A minimization objective over the subset columns, compiled to masks
/// against the system's universe.
#[derive(Clone, Debug)]
pub struct Objective {
    kind: ObjectiveKind,
    premise_mask: u64,
    extended_mask: u64,
    residual_confidence: Rational,
    negated_confidence: Rational,
}

impl Objective {
    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }
}

/// A fully materialized copy of an implicit system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseSystem {
    matrix: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
}

impl DenseSystem {
    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn entry(&self, row: usize, column: usize) -> &Rational {
        &self.matrix[row][column]
    }

    /// Renders the system as tab-separated rationals, row-major, each row
    /// augmented with its right-hand side entry.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (row, rhs) in self.matrix.iter().zip(&self.rhs) {
            let mut fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            fields.push(rhs.to_string());
            out.push_str(&fields.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// Column oracle over the implicit system that presents the *negated*
/// minimization objective, so that running the maximizer on it solves the
/// minimization program; callers negate the optimum back.
pub struct MinimizationOracle<'a> {
    system: &'a ImplicitSystem,
    objective: &'a Objective,
}

impl<'a> MinimizationOracle<'a> {
    pub fn new(system: &'a ImplicitSystem, objective: &'a Objective) -> Self {
        Self { system, objective }
    }
}

impl ColumnOracle<Rational> for MinimizationOracle<'_> {
    fn row_count(&self) -> usize {
        self.system.row_count()
    }

    fn column_count(&self) -> usize {
        self.system.column_count()
    }

    fn entry(&self, row: usize, column: usize) -> Rational {
        self.system.entry_at(row, column)
    }

    fn objective(&self, column: usize) -> Rational {
        -self.system.objective_coeff_at(self.objective, column)
    }

    fn rhs(&self) -> &[Rational] {
        &self.system.rhs
    }
}

/// The trivial oracle of a densified system, with the same negated-objective
/// convention as [`MinimizationOracle`].
pub struct DenseOracle<'a> {
    system: &'a DenseSystem,
    negated_objective: Vec<Rational>,
}

impl<'a> DenseOracle<'a> {
    /// `minimize` is the minimization objective row, as produced by
    /// [`ImplicitSystem::materialize_objective`].
    pub fn for_minimization(system: &'a DenseSystem, minimize: &[Rational]) -> Self {
        Self {
            system,
            negated_objective: minimize.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl ColumnOracle<Rational> for DenseOracle<'_> {
    fn row_count(&self) -> usize {
        self.system.rhs.len()
    }

    fn column_count(&self) -> usize {
        self.negated_objective.len()
    }

    fn entry(&self, row: usize, column: usize) -> Rational {
        self.system.matrix[row][column].clone()
    }

    fn objective(&self, column: usize) -> Rational {
        self.negated_objective[column].clone()
    }

    fn rhs(&self) -> &[Rational] {
        &self.system.rhs
    }
}

/// The subset column index of an attribute set under the universe order.
pub fn index_of_subset(universe: &[String], set: &AttrSet) -> Result<usize, LpError> {
    Ok(mask_of(universe, set)? as usize)
}

/// The attribute subset of a column index under the universe order.
pub fn subset_of_index(universe: &[String], index: usize) -> Result<AttrSet, LpError> {
    let p = universe.len();
    if p > UNIVERSE_BIT_CAP {
        return Err(LpError::UniverseTooLarge(p));
    }
    let count = 1usize << p;
    if index >= count {
        return Err(LpError::SubsetIndexOutOfRange { index, count });
    }
    Ok(universe
        .iter()
        .enumerate()
        .filter(|(position, _)| index & (1 << (p - 1 - position)) != 0)
        .map(|(_, name)| name.clone())
        .collect())
}

/// Bit mask of an attribute set under the universe order: the first
/// attribute is the most significant bit.
fn mask_of(universe: &[String], set: &AttrSet) -> Result<u64, LpError> {
    let p = universe.len();
    let mut mask = 0u64;
    for name in set {
        let position = universe
            .iter()
            .position(|u| u == name)
            .ok_or_else(|| LpError::UnknownAttribute(name.clone()))?;
        mask |= 1 << (p - 1 - position);
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use crate::rules::ConstrainedImplication;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn attrs(names: &[&str]) -> AttrSet {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn rule(
        premise: &[&str],
        conclusion: &[&str],
        s: Rational,
        c: Rational,
    ) -> ConstrainedImplication {
        ConstrainedImplication::new(attrs(premise), attrs(conclusion), s, c).unwrap()
    }

    fn universe(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    /// The worked two-rule instance over (a, b, c).
    fn example_system() -> ImplicitSystem {
        let rules = RuleSet::new(vec![
            rule(&["a"], &["b"], rat(1, 2), rat(1, 3)),
            rule(&["a"], &["c"], rat(1, 3), rat(1, 4)),
        ]);
        ImplicitSystem::new(universe(&["a", "b", "c"]), &rules).unwrap()
    }

    #[test]
    fn subset_bijection_uses_first_attribute_as_msb() {
        let sys = example_system();
        assert_eq!(sys.index_to_set(0).unwrap(), attrs(&[]));
        assert_eq!(sys.index_to_set(1).unwrap(), attrs(&["c"]));
        assert_eq!(sys.set_to_index(&attrs(&["a"])).unwrap(), 4);
        assert_eq!(sys.set_to_index(&attrs(&["a", "b", "c"])).unwrap(), 7);
        for j in 0..sys.subset_column_count() {
            assert_eq!(sys.set_to_index(&sys.index_to_set(j).unwrap()).unwrap(), j);
        }
        assert!(matches!(
            sys.set_to_index(&attrs(&["z"])),
            Err(LpError::UnknownAttribute(_))
        ));
        assert!(matches!(
            sys.index_to_set(8),
            Err(LpError::SubsetIndexOutOfRange { index: 8, count: 8 })
        ));
    }

    #[test]
    fn matrix_entries_match_the_worked_example() {
        let sys = example_system();
        assert_eq!(sys.matrix_entry(0, 4).unwrap(), rat(1, 1));
        assert_eq!(sys.matrix_entry(1, 6).unwrap(), rat(2, 3));
        assert_eq!(sys.matrix_entry(1, 4).unwrap(), rat(-1, 3));
        // Slack block is -I.
        assert_eq!(sys.matrix_entry(2, 8 + 2).unwrap(), rat(-1, 1));
        assert_eq!(sys.matrix_entry(2, 8 + 3).unwrap(), rat(0, 1));
        assert!(sys.matrix_entry(6, 0).is_err());
        assert!(sys.matrix_entry(0, 14).is_err());
    }

    #[test]
    fn densified_example_matches_the_construction() {
        let sys = example_system();
        let dense = sys.densify().unwrap();
        let expected_x_block: Vec<Vec<Rational>> = vec![
            [0, 0, 0, 0, 1, 1, 1, 1]
                .iter()
                .map(|&n| rat(n, 1))
                .collect(),
            vec![
                rat(0, 1),
                rat(0, 1),
                rat(0, 1),
                rat(0, 1),
                rat(-1, 3),
                rat(-1, 3),
                rat(2, 3),
                rat(2, 3),
            ],
            [0, 0, 0, 0, 1, 1, 1, 1]
                .iter()
                .map(|&n| rat(n, 1))
                .collect(),
            // Confidence row of the second rule as the defining inequalities
            // give it: nonzeros sit on the columns containing the premise.
            vec![
                rat(0, 1),
                rat(0, 1),
                rat(0, 1),
                rat(0, 1),
                rat(-1, 4),
                rat(3, 4),
                rat(-1, 4),
                rat(3, 4),
            ],
            vec![rat(1, 1); 8],
            vec![rat(-1, 1); 8],
        ];
        for (i, expected_row) in expected_x_block.iter().enumerate() {
            assert_eq!(&dense.matrix()[i][..8], expected_row.as_slice(), "row {i}");
        }
        // Slack block.
        for i in 0..6 {
            for j in 0..6 {
                let expected = if i == j { rat(-1, 1) } else { rat(0, 1) };
                assert_eq!(dense.matrix()[i][8 + j], expected);
            }
        }
        assert_eq!(
            dense.rhs(),
            &[
                rat(1, 2),
                rat(0, 1),
                rat(1, 3),
                rat(0, 1),
                rat(1, 1),
                rat(-1, 1)
            ]
        );
    }

    #[test]
    fn densify_respects_the_cap() {
        let sys = example_system();
        assert!(matches!(
            sys.densify_with_cap(2),
            Err(LpError::MaterializationCapExceeded {
                attributes: 3,
                cap: 2
            })
        ));
    }

    #[test]
    fn objective_coefficients() {
        let sys = example_system();
        let min_support = sys.min_support_objective(&attrs(&["a"])).unwrap();
        assert_eq!(sys.objective_coeff(&min_support, 7).unwrap(), rat(1, 1));
        assert_eq!(sys.objective_coeff(&min_support, 3).unwrap(), rat(0, 1));

        let surrogate = sys
            .confidence_surrogate_objective(&attrs(&["a"]), &attrs(&["b"]), &rat(3, 4))
            .unwrap();
        assert_eq!(sys.objective_coeff(&surrogate, 6).unwrap(), rat(1, 4));
        assert_eq!(sys.objective_coeff(&surrogate, 4).unwrap(), rat(-3, 4));
        assert_eq!(sys.objective_coeff(&surrogate, 1).unwrap(), rat(0, 1));

        for objective in [&min_support, &surrogate] {
            for j in 8..14 {
                assert_eq!(sys.objective_coeff(objective, j).unwrap(), rat(0, 1));
            }
        }
        assert!(sys.objective_coeff(&min_support, 14).is_err());
    }

    #[test]
    fn initial_basis_of_the_worked_example() {
        let sys = example_system();
        let (basis, solution) = sys.initial_basis();
        assert_eq!(basis, vec![7, 8, 9, 10, 11, 12]);
        let expected: BTreeMap<usize, Rational> = [
            (7, rat(1, 1)),
            (8, rat(1, 2)),
            (9, rat(2, 3)),
            (10, rat(2, 3)),
            (11, rat(3, 4)),
            (12, rat(0, 1)),
        ]
        .into_iter()
        .collect();
        assert_eq!(solution, expected);
    }

    #[test]
    fn initial_basis_with_no_rules() {
        let sys = ImplicitSystem::new(universe(&["x"]), &RuleSet::default()).unwrap();
        let (basis, solution) = sys.initial_basis();
        assert_eq!(basis, vec![1, 2]);
        let expected: BTreeMap<usize, Rational> =
            [(1, rat(1, 1)), (2, rat(0, 1))].into_iter().collect();
        assert_eq!(solution, expected);
    }

    #[test]
    fn pricing_improves_on_the_canonical_start() {
        // At the start all mass sits on the full universe subset, so the
        // premise support is 1; the first program can push it down to 1/2,
        // hence pricing the negated objective must find an entering column.
        let sys = example_system();
        let objective = sys.min_support_objective(&attrs(&["a"])).unwrap();
        let oracle = MinimizationOracle::new(&sys, &objective);
        let (basis, _) = sys.initial_basis();
        let state = crate::simplex::SimplexState::from_basis(&oracle, basis).unwrap();
        assert_eq!(state.objective_value(&oracle), rat(-1, 1));
        assert!(crate::simplex::price(&oracle, &state).is_some());

        // The empty premise is contained in every subset, so its support is
        // identically one on the feasible region and the minimum is 1.
        let constant = sys.min_support_objective(&attrs(&[])).unwrap();
        let constant_oracle = MinimizationOracle::new(&sys, &constant);
        let (basis, _) = sys.initial_basis();
        match crate::simplex::solve_max(&constant_oracle, &basis, &Default::default()).unwrap() {
            crate::simplex::SolveOutcome::Optimal { value, .. } => assert_eq!(-value, rat(1, 1)),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn rules_must_fit_the_universe() {
        let rules = RuleSet::new(vec![rule(&["z"], &[], rat(0, 1), rat(0, 1))]);
        assert!(matches!(
            ImplicitSystem::new(universe(&["a"]), &rules),
            Err(LpError::UnknownAttribute(_))
        ));
        assert!(matches!(
            ImplicitSystem::new(universe(&["a", "a"]), &RuleSet::default()),
            Err(LpError::DuplicateAttribute(_))
        ));
    }

    /// Exact determinant by fraction-free Gaussian elimination; the
    /// independent nonsingularity check for basis matrices.
    fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
        let n = m.len();
        let mut det = Rational::one();
        for col in 0..n {
            let pivot_row = match (col..n).find(|&r| !m[r][col].is_zero()) {
                Some(r) => r,
                None => return Rational::zero(),
            };
            if pivot_row != col {
                m.swap(pivot_row, col);
                det = -det;
            }
            let pivot = m[col][col].clone();
            det *= &pivot;
            let pivot_row = m[col].clone();
            for row in m.iter_mut().skip(col + 1) {
                let factor = &row[col] / &pivot;
                for (c, pivot_value) in pivot_row.iter().enumerate().skip(col) {
                    let delta = &factor * pivot_value;
                    row[c] -= delta;
                }
            }
        }
        det
    }

    fn basis_matrix(sys: &ImplicitSystem, basis: &[usize]) -> Vec<Vec<Rational>> {
        (0..sys.row_count())
            .map(|i| {
                basis
                    .iter()
                    .map(|&j| sys.matrix_entry(i, j).unwrap())
                    .collect()
            })
            .collect()
    }

    fn verify_start(sys: &ImplicitSystem) {
        let (basis, solution) = sys.initial_basis();
        assert_eq!(basis.len(), sys.row_count());
        // Feasible: nonnegative and satisfying every equation exactly.
        for value in solution.values() {
            assert!(!value.is_negative(), "negative start component");
        }
        for row in 0..sys.row_count() {
            let lhs: Rational = solution
                .iter()
                .map(|(&j, x)| sys.matrix_entry(row, j).unwrap() * x)
                .sum();
            assert_eq!(lhs, sys.rhs()[row], "row {row} unsatisfied");
        }
        assert!(!determinant(basis_matrix(sys, &basis)).is_zero());
    }

    #[test]
    fn start_is_feasible_on_the_examples() {
        verify_start(&example_system());
        verify_start(&ImplicitSystem::new(universe(&["x"]), &RuleSet::default()).unwrap());
    }

    fn arb_threshold() -> impl Strategy<Value = Rational> {
        (1i64..=6).prop_flat_map(|d| (0..=d).prop_map(move |n| rat(n, d)))
    }

    fn arb_subset_of(names: &'static [&'static str]) -> impl Strategy<Value = AttrSet> {
        proptest::collection::vec(proptest::bool::ANY, names.len()).prop_map(move |mask| {
            names
                .iter()
                .zip(mask)
                .filter(|(_, keep)| *keep)
                .map(|(name, _)| name.to_string())
                .collect()
        })
    }

    fn arb_rule() -> impl Strategy<Value = ConstrainedImplication> {
        const POOL: &[&str] = &["a", "b", "c", "d"];
        (
            arb_subset_of(POOL),
            arb_subset_of(POOL),
            arb_threshold(),
            arb_threshold(),
        )
            .prop_map(|(p, q, s, c)| ConstrainedImplication::new(p, q, s, c).unwrap())
    }

    fn arb_system() -> impl Strategy<Value = ImplicitSystem> {
        proptest::collection::vec(arb_rule(), 0..4).prop_map(|rules| {
            ImplicitSystem::new(universe(&["a", "b", "c", "d"]), &RuleSet::new(rules)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn start_is_unconditionally_feasible_and_nonsingular(sys in arb_system()) {
            verify_start(&sys);
        }

        #[test]
        fn subset_columns_carry_the_sum_rows(sys in arb_system(), j in 0usize..16) {
            let m = sys.rule_count();
            prop_assert_eq!(sys.matrix_entry(2 * m, j).unwrap(), rat(1, 1));
            prop_assert_eq!(sys.matrix_entry(2 * m + 1, j).unwrap(), rat(-1, 1));
        }

        #[test]
        fn densify_agrees_with_the_entry_oracle(sys in arb_system()) {
            let dense = sys.densify().unwrap();
            for i in 0..sys.row_count() {
                for j in 0..sys.column_count() {
                    prop_assert_eq!(dense.entry(i, j), &sys.matrix_entry(i, j).unwrap());
                }
            }
        }

        #[test]
        fn models_induce_solutions_of_the_system(
            rules in proptest::collection::vec(arb_rule(), 0..3),
            intents in proptest::collection::vec(0usize..16, 1..5),
        ) {
            let names = universe(&["a", "b", "c", "d"]);
            let rule_set = RuleSet::new(rules);
            let sys = ImplicitSystem::new(names.clone(), &rule_set).unwrap();

            let intent_sets: Vec<AttrSet> = intents
                .iter()
                .map(|&index| sys.index_to_set(index).unwrap())
                .collect();
            let context = crate::context::FormalContext::from_intents(
                names,
                intent_sets
                    .iter()
                    .enumerate()
                    .map(|(i, intent)| (format!("g{i}"), intent)),
            ).unwrap();
            let models_all = rule_set
                .iter()
                .all(|r| context.models(r).unwrap());
            prop_assume!(models_all);

            // The subset-frequency vector of any model satisfies Ax >= b.
            let total = intents.len();
            let mut frequencies: BTreeMap<usize, Rational> = BTreeMap::new();
            for &index in &intents {
                let entry = frequencies.entry(index).or_insert_with(Rational::zero);
                *entry += Rational::new(1.into(), total.into());
            }
            for row in 0..sys.row_count() {
                let lhs: Rational = frequencies
                    .iter()
                    .map(|(&j, x)| sys.matrix_entry(row, j).unwrap() * x)
                    .sum();
                prop_assert!(lhs >= sys.rhs()[row], "row {} violated by a model", row);
            }
        }
    }
}

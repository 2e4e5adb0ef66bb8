//! Constrained implications and rule files.
//!
//! A constrained implication is a triple `(A -> B, s, c)` with rational
//! thresholds in the unit interval. Rules live over an abstract attribute
//! alphabet and are bound to a context only at evaluation; the attribute
//! universe of an entailment instance is the union of every attribute its
//! rules mention.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::context::{AttrSet, ContextError, FormalContext};
use crate::numeric::{in_unit_interval, parse_rational, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("support threshold {0} outside [0, 1]")]
    SupportOutOfRange(Rational),
    #[error("confidence threshold {0} outside [0, 1]")]
    ConfidenceOutOfRange(Rational),
    #[error("mining bound {0} outside [0, 1]")]
    MiningBoundOutOfRange(Rational),
    #[error("context has {0} attributes; exhaustive mining is capped at {MINE_ATTRIBUTE_CAP}")]
    TooManyAttributesToMine(usize),
    #[error(transparent)]
    Context(#[from] ContextError),
}

/// Line-numbered errors for the rule-file grammar.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleParseError {
    #[error("{detail} at line {line}")]
    Syntax { line: usize, detail: String },
    #[error("support out of range at line {line}")]
    SupportOutOfRange { line: usize },
    #[error("confidence out of range at line {line}")]
    ConfidenceOutOfRange { line: usize },
    #[error("second query at line {line}; a rule file holds at most one '?' line")]
    DuplicateQuery { line: usize },
}

/// The triple `(A -> B, s, c)`: premise, conclusion, and minimum support and
/// confidence thresholds, both rational and within the unit interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstrainedImplication {
    premise: AttrSet,
    conclusion: AttrSet,
    min_support: Rational,
    min_confidence: Rational,
}

impl ConstrainedImplication {
    pub fn new(
        premise: AttrSet,
        conclusion: AttrSet,
        min_support: Rational,
        min_confidence: Rational,
    ) -> Result<Self, RuleError> {
        if !in_unit_interval(&min_support) {
            return Err(RuleError::SupportOutOfRange(min_support));
        }
        if !in_unit_interval(&min_confidence) {
            return Err(RuleError::ConfidenceOutOfRange(min_confidence));
        }
        Ok(Self {
            premise,
            conclusion,
            min_support,
            min_confidence,
        })
    }

    pub fn premise(&self) -> &AttrSet {
        &self.premise
    }

    pub fn conclusion(&self) -> &AttrSet {
        &self.conclusion
    }

    pub fn min_support(&self) -> &Rational {
        &self.min_support
    }

    pub fn min_confidence(&self) -> &Rational {
        &self.min_confidence
    }

    /// All attributes the rule mentions.
    pub fn attributes(&self) -> AttrSet {
        self.premise.union(&self.conclusion).cloned().collect()
    }
}

fn write_set(f: &mut fmt::Formatter<'_>, set: &AttrSet) -> fmt::Result {
    write!(f, "{{")?;
    for (i, name) in set.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{name}")?;
    }
    write!(f, "}}")
}

impl fmt::Display for ConstrainedImplication {
    /// Renders in the rule-file grammar, e.g. `{a} -> {b, c} [s=1/2, c=1]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_set(f, &self.premise)?;
        write!(f, " -> ")?;
        write_set(f, &self.conclusion)?;
        write!(f, " [s={}, c={}]", self.min_support, self.min_confidence)
    }
}

/// An ordered collection of constrained implications. Order matters only for
/// row indexing in the linear system; duplicates are permitted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<ConstrainedImplication>,
}

impl RuleSet {
    pub fn new(rules: Vec<ConstrainedImplication>) -> Self {
        Self { rules }
    }

    pub fn rules(&self) -> &[ConstrainedImplication] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ConstrainedImplication> {
        self.rules.iter()
    }
}

impl From<Vec<ConstrainedImplication>> for RuleSet {
    fn from(rules: Vec<ConstrainedImplication>) -> Self {
        Self::new(rules)
    }
}

impl<'a> IntoIterator for &'a RuleSet {
    type Item = &'a ConstrainedImplication;
    type IntoIter = std::slice::Iter<'a, ConstrainedImplication>;

    fn into_iter(self) -> Self::IntoIter {
        self.rules.iter()
    }
}

/// The attribute universe of an entailment instance: every attribute
/// mentioned by the rule set or the query, in lexicographic order. This fixed
/// ordering is the linear ordering the column indexing of the implicit system
/// is built on.
pub fn attribute_universe(rules: &RuleSet, query: &ConstrainedImplication) -> Vec<String> {
    let mut universe: BTreeSet<String> = query.attributes();
    for rule in rules {
        universe.extend(rule.attributes());
    }
    universe.into_iter().collect()
}

/// Parses a rule file: one rule per non-comment line, `#` comments, blank
/// lines ignored, and at most one `?`-prefixed query line.
pub fn parse_rule_file(
    text: &str,
) -> Result<(RuleSet, Option<ConstrainedImplication>), RuleParseError> {
    let mut rules = Vec::new();
    let mut query = None;
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('?') {
            if query.is_some() {
                return Err(RuleParseError::DuplicateQuery { line });
            }
            query = Some(parse_rule_line(rest, line)?);
        } else {
            rules.push(parse_rule_line(trimmed, line)?);
        }
    }
    Ok((RuleSet::new(rules), query))
}

/// All constrained implications of `context` with support at least
/// `min_support` and confidence at least `min_confidence`, restricted to
/// non-empty conclusions disjoint from their premises. Each rule is emitted
/// with its exact achieved support and confidence (the tightest thresholds
/// making it hold), sorted by premise size, premise, conclusion size,
/// conclusion.
pub fn mine_rules(
    context: &FormalContext,
    min_support: &Rational,
    min_confidence: &Rational,
) -> Result<Vec<ConstrainedImplication>, RuleError> {
    if !in_unit_interval(min_support) {
        return Err(RuleError::MiningBoundOutOfRange(min_support.clone()));
    }
    if !in_unit_interval(min_confidence) {
        return Err(RuleError::MiningBoundOutOfRange(min_confidence.clone()));
    }
    let attribute_count = context.attributes().len();
    if attribute_count > MINE_ATTRIBUTE_CAP {
        return Err(RuleError::TooManyAttributesToMine(attribute_count));
    }
    // Forces the non-emptiness check support/confidence would perform.
    context.support(&AttrSet::new())?;

    let object_count = context.object_count();
    let intent_masks: Vec<u32> = (0..object_count)
        .map(|g| {
            context
                .object_intent_indices(g)
                .iter()
                .fold(0u32, |mask, &i| mask | (1 << i))
        })
        .collect();
    // extent_counts[mask] = number of objects whose intent contains the mask.
    let extent_counts: Vec<usize> = (0u32..1 << attribute_count)
        .map(|mask| intent_masks.iter().filter(|&&g| g & mask == mask).count())
        .collect();
    let frequency =
        |mask: u32| Rational::new(extent_counts[mask as usize].into(), object_count.into());

    let names = |mask: u32| -> AttrSet {
        (0..attribute_count)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| context.attributes()[i].clone())
            .collect()
    };

    let mut mined = Vec::new();
    for premise_mask in 0u32..1 << attribute_count {
        let support = frequency(premise_mask);
        if support < *min_support {
            continue;
        }
        let free = !premise_mask & ((1u32 << attribute_count) - 1);
        // Enumerate the non-empty submasks of the premise's complement.
        let mut conclusion_mask = free;
        while conclusion_mask != 0 {
            let confidence = if support.is_zero() {
                Rational::new(1.into(), 1.into())
            } else {
                frequency(premise_mask | conclusion_mask) / &support
            };
            if confidence >= *min_confidence {
                mined.push(ConstrainedImplication::new(
                    names(premise_mask),
                    names(conclusion_mask),
                    support.clone(),
                    confidence,
                )?);
            }
            conclusion_mask = (conclusion_mask - 1) & free;
        }
    }
    mined.sort_by(|a, b| {
        let key = |r: &ConstrainedImplication| {
            (
                r.premise.len(),
                r.premise.iter().cloned().collect::<Vec<_>>(),
                r.conclusion.len(),
                r.conclusion.iter().cloned().collect::<Vec<_>>(),
            )
        };
        key(a).cmp(&key(b))
    });
    Ok(mined)
}

const MINE_ATTRIBUTE_CAP: usize = 16;

fn parse_rule_line(text: &str, line: usize) -> Result<ConstrainedImplication, RuleParseError> {
    let mut scanner = Scanner { text, pos: 0, line };
    let premise = scanner.parse_set()?;
    scanner.expect_str("->")?;
    let conclusion = scanner.parse_set()?;
    scanner.expect('[')?;
    scanner.expect('s')?;
    scanner.expect('=')?;
    let support = scanner.parse_rational()?;
    scanner.expect(',')?;
    scanner.expect('c')?;
    scanner.expect('=')?;
    let confidence = scanner.parse_rational()?;
    scanner.expect(']')?;
    scanner.expect_end()?;
    ConstrainedImplication::new(premise, conclusion, support, confidence).map_err(|err| match err {
        RuleError::SupportOutOfRange(_) => RuleParseError::SupportOutOfRange { line },
        RuleError::ConfidenceOutOfRange(_) => RuleParseError::ConfidenceOutOfRange { line },
        other => RuleParseError::Syntax {
            line,
            detail: other.to_string(),
        },
    })
}

struct Scanner<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl Scanner<'_> {
    fn syntax(&self, detail: impl Into<String>) -> RuleParseError {
        RuleParseError::Syntax {
            line: self.line,
            detail: detail.into(),
        }
    }

    fn skip_whitespace(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_whitespace();
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, wanted: char) -> Result<(), RuleParseError> {
        match self.peek() {
            Some(c) if c == wanted => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => Err(self.syntax(format!("expected '{wanted}', found '{c}'"))),
            None => Err(self.syntax(format!("expected '{wanted}', found end of line"))),
        }
    }

    fn expect_str(&mut self, wanted: &str) -> Result<(), RuleParseError> {
        self.skip_whitespace();
        if self.text[self.pos..].starts_with(wanted) {
            self.pos += wanted.len();
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{wanted}'")))
        }
    }

    fn expect_end(&mut self) -> Result<(), RuleParseError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.syntax(format!("unexpected '{c}' after rule"))),
        }
    }

    /// Attribute name: a non-empty run of characters excluding whitespace,
    /// commas, and braces/brackets.
    fn parse_name(&mut self) -> Result<String, RuleParseError> {
        self.skip_whitespace();
        let name: String = self.text[self.pos..]
            .chars()
            .take_while(|c| !c.is_whitespace() && !",{}[]".contains(*c))
            .collect();
        if name.is_empty() {
            return Err(self.syntax("expected attribute name"));
        }
        self.pos += name.len();
        Ok(name)
    }

    fn parse_set(&mut self) -> Result<AttrSet, RuleParseError> {
        self.expect('{')?;
        let mut set = AttrSet::new();
        if self.peek() == Some('}') {
            self.expect('}')?;
            return Ok(set);
        }
        loop {
            set.insert(self.parse_name()?);
            match self.peek() {
                Some(',') => self.expect(',')?,
                Some('}') => {
                    self.expect('}')?;
                    return Ok(set);
                }
                Some(c) => return Err(self.syntax(format!("expected ',' or '}}', found '{c}'"))),
                None => return Err(self.syntax("unterminated set")),
            }
        }
    }

    fn parse_rational(&mut self) -> Result<Rational, RuleParseError> {
        self.skip_whitespace();
        let token: String = self.text[self.pos..]
            .chars()
            .take_while(|c| c.is_ascii_digit() || "+-/".contains(*c))
            .collect();
        self.pos += token.len();
        parse_rational(&token).map_err(|err| self.syntax(err.to_string()))
    }
}

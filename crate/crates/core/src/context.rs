//! Formal contexts and the model relation.
//!
//! A formal context is a finite cross table between objects and attributes.
//! The derivation operators, support, and confidence defined here are the
//! complete semantic basis for constrained implications: a context models a
//! rule when the rule's support and confidence thresholds are met, compared
//! exactly. Contexts are immutable after construction and all operations are
//! pure.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::One;
use thiserror::Error;

use crate::numeric::Rational;
use crate::rules::ConstrainedImplication;

/// A set of attribute names.
pub type AttrSet = BTreeSet<String>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContextError {
    #[error("unknown attribute '{0}'")]
    UnknownAttribute(String),
    #[error("unknown object '{0}'")]
    UnknownObject(String),
    #[error("duplicate object name '{0}'")]
    DuplicateObject(String),
    #[error("duplicate attribute name '{0}'")]
    DuplicateAttribute(String),
    #[error("incidence row {row} references attribute index {index}, but there are only {count} attributes")]
    IncidenceIndexOutOfRange {
        row: usize,
        index: usize,
        count: usize,
    },
    #[error("incidence has {got} rows for {expected} objects")]
    IncidenceRowCount { expected: usize, got: usize },
    #[error("support and confidence require a finite non-empty context")]
    EmptyContext,
}

/// Line-numbered errors for the Burmeister CXT text format.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CxtParseError {
    #[error("expected header 'B' at line {line}")]
    MalformedHeader { line: usize },
    #[error("expected blank line at line {line}")]
    ExpectedBlank { line: usize },
    #[error("malformed count '{text}' at line {line}")]
    MalformedCount { line: usize, text: String },
    #[error("empty name at line {line}")]
    EmptyName { line: usize },
    #[error("duplicate name '{name}' at line {line}")]
    DuplicateName { line: usize, name: String },
    #[error("incidence row has {got} characters, expected {expected}, at line {line}")]
    RowLength {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("illegal incidence character '{ch}' at line {line}")]
    IllegalIncidence { line: usize, ch: char },
    #[error("unexpected end of input at line {line}")]
    UnexpectedEof { line: usize },
    #[error("unexpected trailing content at line {line}")]
    TrailingContent { line: usize },
}

/// A finite formal context: ordered object and attribute lists plus a
/// row-major incidence relation (per object, the set of attribute indices it
/// has).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    incidence: Vec<BTreeSet<usize>>,
}

impl FormalContext {
    /// Builds a context, validating name distinctness and incidence bounds.
    ///
    /// Emptiness is permitted here; it is rejected only when support or
    /// confidence is evaluated, so parsers can build shells incrementally.
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<String>,
        incidence: Vec<BTreeSet<usize>>,
    ) -> Result<Self, ContextError> {
        check_distinct(&objects).map_err(ContextError::DuplicateObject)?;
        check_distinct(&attributes).map_err(ContextError::DuplicateAttribute)?;
        if incidence.len() != objects.len() {
            return Err(ContextError::IncidenceRowCount {
                expected: objects.len(),
                got: incidence.len(),
            });
        }
        for (row, intent) in incidence.iter().enumerate() {
            if let Some(&index) = intent.iter().find(|&&i| i >= attributes.len()) {
                return Err(ContextError::IncidenceIndexOutOfRange {
                    row,
                    index,
                    count: attributes.len(),
                });
            }
        }
        Ok(Self {
            objects,
            attributes,
            incidence,
        })
    }

    /// Builds a context from named object intents.
    pub fn from_intents<'a>(
        attributes: Vec<String>,
        objects: impl IntoIterator<Item = (String, &'a AttrSet)>,
    ) -> Result<Self, ContextError> {
        let mut names = Vec::new();
        let mut incidence = Vec::new();
        for (name, intent) in objects {
            let row = intent
                .iter()
                .map(|attr| {
                    attributes
                        .iter()
                        .position(|a| a == attr)
                        .ok_or_else(|| ContextError::UnknownAttribute(attr.clone()))
                })
                .collect::<Result<BTreeSet<usize>, _>>()?;
            names.push(name);
            incidence.push(row);
        }
        Self::new(names, attributes, incidence)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    /// The intent of one object, as attribute names.
    pub fn object_intent(&self, object_index: usize) -> AttrSet {
        self.incidence[object_index]
            .iter()
            .map(|&i| self.attributes[i].clone())
            .collect()
    }

    /// The intent of one object, as attribute indices.
    pub fn object_intent_indices(&self, object_index: usize) -> &BTreeSet<usize> {
        &self.incidence[object_index]
    }

    fn attribute_indices(&self, attrs: &AttrSet) -> Result<Vec<usize>, ContextError> {
        attrs
            .iter()
            .map(|attr| {
                self.attributes
                    .iter()
                    .position(|a| a == attr)
                    .ok_or_else(|| ContextError::UnknownAttribute(attr.clone()))
            })
            .collect()
    }

    /// Derivation of an attribute set: all objects having every attribute of
    /// `attrs`. The empty set derives to all objects.
    pub fn derive_attributes(&self, attrs: &AttrSet) -> Result<BTreeSet<String>, ContextError> {
        let indices = self.attribute_indices(attrs)?;
        Ok(self
            .objects
            .iter()
            .zip(&self.incidence)
            .filter(|(_, intent)| indices.iter().all(|i| intent.contains(i)))
            .map(|(name, _)| name.clone())
            .collect())
    }

    /// Derivation of an object set: all attributes common to every object of
    /// `objs`.
    pub fn derive_objects(&self, objs: &BTreeSet<String>) -> Result<AttrSet, ContextError> {
        let indices = objs
            .iter()
            .map(|obj| {
                self.objects
                    .iter()
                    .position(|o| o == obj)
                    .ok_or_else(|| ContextError::UnknownObject(obj.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self
            .attributes
            .iter()
            .enumerate()
            .filter(|(a, _)| indices.iter().all(|&o| self.incidence[o].contains(a)))
            .map(|(_, name)| name.clone())
            .collect())
    }

    fn require_nonempty(&self) -> Result<(), ContextError> {
        if self.objects.is_empty() || self.attributes.is_empty() {
            return Err(ContextError::EmptyContext);
        }
        Ok(())
    }

    fn extent_size(&self, attr_indices: &[usize]) -> usize {
        self.incidence
            .iter()
            .filter(|intent| attr_indices.iter().all(|i| intent.contains(i)))
            .count()
    }

    /// Support of an attribute set: the fraction of objects carrying all of
    /// `attrs`, exactly.
    pub fn support(&self, attrs: &AttrSet) -> Result<Rational, ContextError> {
        self.require_nonempty()?;
        let indices = self.attribute_indices(attrs)?;
        Ok(Rational::new(
            self.extent_size(&indices).into(),
            self.objects.len().into(),
        ))
    }

    /// Confidence of the implication `premise -> conclusion`: the conditional
    /// frequency of the conclusion given the premise, exactly; defined as 1
    /// when the premise has empty extent.
    pub fn confidence(
        &self,
        premise: &AttrSet,
        conclusion: &AttrSet,
    ) -> Result<Rational, ContextError> {
        self.require_nonempty()?;
        let premise_indices = self.attribute_indices(premise)?;
        let mut both_indices = premise_indices.clone();
        both_indices.extend(self.attribute_indices(conclusion)?);
        let premise_extent = self.extent_size(&premise_indices);
        if premise_extent == 0 {
            return Ok(Rational::one());
        }
        Ok(Rational::new(
            self.extent_size(&both_indices).into(),
            premise_extent.into(),
        ))
    }

    /// The model relation: true when both the support and the confidence of
    /// `rule` meet its thresholds, compared exactly. Rules mentioning
    /// attributes absent from this context are an error, not vacuously false.
    pub fn models(&self, rule: &ConstrainedImplication) -> Result<bool, ContextError> {
        let support = self.support(rule.premise())?;
        let confidence = self.confidence(rule.premise(), rule.conclusion())?;
        Ok(support >= *rule.min_support() && confidence >= *rule.min_confidence())
    }

    /// Deletes every attribute outside `keep`, preserving objects and the
    /// relative attribute order. Derivations of subsets of `keep` are
    /// unchanged, hence so are support and confidence of rules over `keep`.
    pub fn restrict_attributes(&self, keep: &AttrSet) -> Result<FormalContext, ContextError> {
        for attr in keep {
            if !self.attributes.contains(attr) {
                return Err(ContextError::UnknownAttribute(attr.clone()));
            }
        }
        let kept: Vec<usize> = (0..self.attributes.len())
            .filter(|&i| keep.contains(&self.attributes[i]))
            .collect();
        let attributes = kept.iter().map(|&i| self.attributes[i].clone()).collect();
        let incidence = self
            .incidence
            .iter()
            .map(|intent| {
                kept.iter()
                    .enumerate()
                    .filter(|(_, old)| intent.contains(old))
                    .map(|(new, _)| new)
                    .collect()
            })
            .collect();
        FormalContext::new(self.objects.clone(), attributes, incidence)
    }

    /// Parses the Burmeister CXT text format. Both `\n` and `\r\n` line
    /// endings are accepted.
    pub fn parse_cxt(text: &str) -> Result<FormalContext, CxtParseError> {
        let mut lines: Vec<&str> = text
            .split('\n')
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .collect();
        // A trailing newline terminates the last line rather than opening an
        // empty one.
        if lines.last() == Some(&"") {
            lines.pop();
        }
        let mut cursor = Cursor {
            lines: &lines,
            next: 0,
        };

        let header = cursor.take()?;
        if header != "B" {
            return Err(CxtParseError::MalformedHeader {
                line: cursor.line(),
            });
        }
        cursor.take_blank()?;
        let object_count = cursor.take_count()?;
        let attribute_count = cursor.take_count()?;
        cursor.take_blank()?;

        let objects = cursor.take_names(object_count)?;
        let attributes = cursor.take_names(attribute_count)?;

        let mut incidence = Vec::with_capacity(object_count);
        for _ in 0..object_count {
            let row = cursor.take()?;
            let line = cursor.line();
            let mut intent = BTreeSet::new();
            let mut got = 0usize;
            for (i, ch) in row.chars().enumerate() {
                match ch {
                    'X' => {
                        intent.insert(i);
                    }
                    '.' => {}
                    _ => return Err(CxtParseError::IllegalIncidence { line, ch }),
                }
                got += 1;
            }
            if got != attribute_count {
                return Err(CxtParseError::RowLength {
                    line,
                    expected: attribute_count,
                    got,
                });
            }
            incidence.push(intent);
        }
        cursor.expect_end()?;

        FormalContext::new(objects, attributes, incidence).map_err(|err| match err {
            ContextError::DuplicateObject(name) | ContextError::DuplicateAttribute(name) => {
                CxtParseError::DuplicateName {
                    line: lines.len(),
                    name,
                }
            }
            // Unreachable: parsing builds indices below the attribute count.
            _ => CxtParseError::TrailingContent { line: lines.len() },
        })
    }

    /// Serializes to Burmeister CXT, the exact inverse of [`parse_cxt`] on
    /// normalized text: `\n` line endings and a trailing newline.
    ///
    /// [`parse_cxt`]: FormalContext::parse_cxt
    pub fn to_cxt(&self) -> String {
        let mut out = String::new();
        out.push_str("B\n\n");
        out.push_str(&format!(
            "{}\n{}\n\n",
            self.objects.len(),
            self.attributes.len()
        ));
        for name in self.objects.iter().chain(&self.attributes) {
            out.push_str(name);
            out.push('\n');
        }
        for intent in &self.incidence {
            for i in 0..self.attributes.len() {
                out.push(if intent.contains(&i) { 'X' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for FormalContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cxt())
    }
}

fn check_distinct(names: &[String]) -> Result<(), String> {
    let mut seen = BTreeSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(name.clone());
        }
    }
    Ok(())
}

struct Cursor<'a> {
    lines: &'a [&'a str],
    next: usize,
}

impl<'a> Cursor<'a> {
    fn line(&self) -> usize {
        self.next
    }

    fn take(&mut self) -> Result<&'a str, CxtParseError> {
        let line = self.lines.get(self.next).copied();
        self.next += 1;
        line.ok_or(CxtParseError::UnexpectedEof { line: self.next })
    }

    fn take_blank(&mut self) -> Result<(), CxtParseError> {
        if !self.take()?.is_empty() {
            return Err(CxtParseError::ExpectedBlank { line: self.line() });
        }
        Ok(())
    }

    fn take_count(&mut self) -> Result<usize, CxtParseError> {
        let text = self.take()?;
        text.parse().map_err(|_| CxtParseError::MalformedCount {
            line: self.line(),
            text: text.to_string(),
        })
    }

    fn take_names(&mut self, count: usize) -> Result<Vec<String>, CxtParseError> {
        let mut names = Vec::with_capacity(count);
        for _ in 0..count {
            let name = self.take()?;
            if name.is_empty() {
                return Err(CxtParseError::EmptyName { line: self.line() });
            }
            names.push(name.to_string());
        }
        Ok(names)
    }

    fn expect_end(&mut self) -> Result<(), CxtParseError> {
        while self.next < self.lines.len() {
            if !self.lines[self.next].is_empty() {
                return Err(CxtParseError::TrailingContent {
                    line: self.next + 1,
                });
            }
            self.next += 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use proptest::prelude::*;

    fn attrs(names: &[&str]) -> AttrSet {
        names.iter().map(|s| s.to_string()).collect()
    }

    /// Two objects over (a, b): g1 has {a, b}, g2 has {a}.
    fn k1() -> FormalContext {
        FormalContext::new(
            vec!["g1".into(), "g2".into()],
            vec!["a".into(), "b".into()],
            vec![BTreeSet::from([0, 1]), BTreeSet::from([0])],
        )
        .unwrap()
    }

    /// Same objects as `k1` but carrying a third, empty attribute column c.
    fn k1_wide() -> FormalContext {
        FormalContext::new(
            vec!["g1".into(), "g2".into()],
            vec!["a".into(), "b".into(), "c".into()],
            vec![BTreeSet::from([0, 1]), BTreeSet::from([0])],
        )
        .unwrap()
    }

    fn k2() -> FormalContext {
        FormalContext::new(
            vec!["g1".into(), "g2".into()],
            vec!["a".into(), "b".into(), "d".into()],
            vec![BTreeSet::from([0, 1, 2]), BTreeSet::from([0, 2])],
        )
        .unwrap()
    }

    #[test]
    fn derivation_of_attribute_sets() {
        let k = k1();
        let derived = k.derive_attributes(&attrs(&["a"])).unwrap();
        assert_eq!(
            derived,
            BTreeSet::from(["g1".to_string(), "g2".to_string()])
        );
        let all = k.derive_attributes(&attrs(&[])).unwrap();
        assert_eq!(all.len(), 2);
        let err = k.derive_attributes(&attrs(&["z"])).unwrap_err();
        assert_eq!(err, ContextError::UnknownAttribute("z".into()));
    }

    #[test]
    fn derivation_of_object_sets() {
        let k = k1();
        let derived = k
            .derive_objects(&BTreeSet::from(["g1".to_string()]))
            .unwrap();
        assert_eq!(derived, attrs(&["a", "b"]));
        let err = k
            .derive_objects(&BTreeSet::from(["gx".to_string()]))
            .unwrap_err();
        assert_eq!(err, ContextError::UnknownObject("gx".into()));
    }

    #[test]
    fn support_counts_objects() {
        let k = k1();
        assert_eq!(k.support(&attrs(&["a"])).unwrap(), rat(1, 1));
        assert_eq!(k.support(&attrs(&[])).unwrap(), rat(1, 1));
        assert_eq!(k.support(&attrs(&["a", "b"])).unwrap(), rat(1, 2));
    }

    #[test]
    fn confidence_is_a_conditional_frequency() {
        let k = k1();
        assert_eq!(
            k.confidence(&attrs(&["a"]), &attrs(&["b"])).unwrap(),
            rat(1, 2)
        );
        assert_eq!(
            k.confidence(&attrs(&[]), &attrs(&["a"])).unwrap(),
            rat(1, 1)
        );
        // Empty premise extent: confidence is 1 by convention.
        let k3 = FormalContext::new(
            vec!["g1".into()],
            vec!["a".into(), "b".into()],
            vec![BTreeSet::new()],
        )
        .unwrap();
        assert_eq!(
            k3.confidence(&attrs(&["a"]), &attrs(&["b"])).unwrap(),
            rat(1, 1)
        );
    }

    #[test]
    fn empty_contexts_reject_evaluation() {
        let no_objects = FormalContext::new(vec![], vec!["a".into()], vec![]).unwrap();
        assert_eq!(
            no_objects.support(&attrs(&[])),
            Err(ContextError::EmptyContext)
        );
        let no_attributes =
            FormalContext::new(vec!["g".into()], vec![], vec![BTreeSet::new()]).unwrap();
        assert_eq!(
            no_attributes.confidence(&attrs(&[]), &attrs(&[])),
            Err(ContextError::EmptyContext)
        );
    }

    #[test]
    fn model_relation_compares_exactly() {
        let k = k1();
        let holds = ConstrainedImplication::new(attrs(&["a"]), attrs(&["b"]), rat(1, 2), rat(1, 2))
            .unwrap();
        assert!(k.models(&holds).unwrap());
        let fails = ConstrainedImplication::new(attrs(&["a"]), attrs(&["b"]), rat(1, 2), rat(3, 4))
            .unwrap();
        assert!(!k.models(&fails).unwrap());
        let empty_premise =
            ConstrainedImplication::new(attrs(&[]), attrs(&["a"]), rat(1, 1), rat(1, 1)).unwrap();
        assert!(k.models(&empty_premise).unwrap());
        let foreign =
            ConstrainedImplication::new(attrs(&["z"]), attrs(&["a"]), rat(0, 1), rat(0, 1))
                .unwrap();
        assert!(k.models(&foreign).is_err());
    }

    #[test]
    fn restriction_intersects_incidence() {
        let k = k2();
        let restricted = k.restrict_attributes(&attrs(&["a", "b"])).unwrap();
        assert_eq!(restricted.attributes(), &["a".to_string(), "b".to_string()]);
        assert_eq!(restricted.object_intent(0), attrs(&["a", "b"]));
        assert_eq!(restricted.object_intent(1), attrs(&["a"]));

        let identity = k.restrict_attributes(&attrs(&["a", "b", "d"])).unwrap();
        assert_eq!(identity, k);

        let err = k.restrict_attributes(&attrs(&["a", "z"])).unwrap_err();
        assert_eq!(err, ContextError::UnknownAttribute("z".into()));
    }

    #[test]
    fn restriction_preserves_rule_evaluation() {
        let k = k2();
        let rule = ConstrainedImplication::new(attrs(&["a"]), attrs(&["b"]), rat(1, 2), rat(1, 2))
            .unwrap();
        let restricted = k.restrict_attributes(&attrs(&["a", "b"])).unwrap();
        assert_eq!(k.models(&rule).unwrap(), restricted.models(&rule).unwrap());
        assert_eq!(
            k.support(rule.premise()).unwrap(),
            restricted.support(rule.premise()).unwrap()
        );
        assert_eq!(
            k.confidence(rule.premise(), rule.conclusion()).unwrap(),
            restricted
                .confidence(rule.premise(), rule.conclusion())
                .unwrap()
        );
    }

    #[test]
    fn cxt_serialization_is_bit_exact() {
        assert_eq!(
            k1_wide().to_cxt(),
            "B\n\n2\n3\n\ng1\ng2\na\nb\nc\nXX.\nX..\n"
        );
    }

    #[test]
    fn cxt_parse_round_trips() {
        for k in [k1(), k1_wide(), k2()] {
            assert_eq!(FormalContext::parse_cxt(&k.to_cxt()).unwrap(), k);
        }
    }

    #[test]
    fn cxt_accepts_crlf() {
        let text = k1_wide().to_cxt().replace('\n', "\r\n");
        assert_eq!(FormalContext::parse_cxt(&text).unwrap(), k1_wide());
    }

    #[test]
    fn cxt_parse_errors_carry_line_numbers() {
        let err = FormalContext::parse_cxt("A\n\n1\n1\n\ng\na\nX\n").unwrap_err();
        assert_eq!(err, CxtParseError::MalformedHeader { line: 1 });

        let err = FormalContext::parse_cxt("B\n\n1\n1\n\ng\na\nXY\n").unwrap_err();
        assert!(matches!(
            err,
            CxtParseError::IllegalIncidence { line: 8, ch: 'Y' }
        ));
        assert_eq!(err.to_string(), "illegal incidence character 'Y' at line 8");

        let err = FormalContext::parse_cxt("B\n\n1\n2\n\ng\na\nb\nX\n").unwrap_err();
        assert_eq!(
            err,
            CxtParseError::RowLength {
                line: 9,
                expected: 2,
                got: 1
            }
        );

        let err = FormalContext::parse_cxt("B\n\nx\n1\n\n").unwrap_err();
        assert_eq!(
            err,
            CxtParseError::MalformedCount {
                line: 3,
                text: "x".into()
            }
        );

        let err = FormalContext::parse_cxt("B\n\n2\n1\n\ng\n").unwrap_err();
        assert_eq!(err, CxtParseError::UnexpectedEof { line: 7 });
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let err = FormalContext::new(
            vec!["g".into(), "g".into()],
            vec!["a".into()],
            vec![BTreeSet::new(), BTreeSet::new()],
        )
        .unwrap_err();
        assert_eq!(err, ContextError::DuplicateObject("g".into()));
    }

    prop_compose! {
        fn arb_context()(objects in 1usize..5, attributes in 1usize..5)
            (rows in proptest::collection::vec(proptest::collection::btree_set(0usize..5, 0..5), objects..=objects),
             objects in Just(objects), attributes in Just(attributes))
            -> FormalContext
        {
            let object_names = (0..objects).map(|i| format!("g{i}")).collect();
            let attribute_names: Vec<String> = (0..attributes).map(|i| format!("m{i}")).collect();
            let incidence = rows
                .into_iter()
                .map(|row| row.into_iter().filter(|&i| i < attributes).collect())
                .collect();
            FormalContext::new(object_names, attribute_names, incidence).unwrap()
        }
    }

    fn arb_subset(k: &FormalContext) -> impl Strategy<Value = AttrSet> {
        let names: Vec<String> = k.attributes().to_vec();
        proptest::collection::vec(proptest::bool::ANY, names.len()).prop_map(move |mask| {
            names
                .iter()
                .zip(&mask)
                .filter(|(_, &keep)| keep)
                .map(|(name, _)| name.clone())
                .collect()
        })
    }

    proptest! {
        #[test]
        fn double_derivation_is_extensive(k in arb_context()) {
            let subsets = all_subsets(k.attributes());
            for a in subsets {
                let extent = k.derive_attributes(&a).unwrap();
                let closure = k.derive_objects(&extent).unwrap();
                prop_assert!(a.is_subset(&closure));
            }
        }

        #[test]
        fn derivation_is_antitone(k in arb_context()) {
            let subsets = all_subsets(k.attributes());
            for a in &subsets {
                for b in &subsets {
                    if a.is_subset(b) {
                        let a_ext = k.derive_attributes(a).unwrap();
                        let b_ext = k.derive_attributes(b).unwrap();
                        prop_assert!(b_ext.is_subset(&a_ext));
                    }
                }
            }
        }

        #[test]
        fn support_is_antitone_and_bounded((k, a, b) in arb_context().prop_flat_map(|k| {
            let a = arb_subset(&k);
            let b = arb_subset(&k);
            (Just(k), a, b)
        })) {
            let union: AttrSet = a.union(&b).cloned().collect();
            let supp_a = k.support(&a).unwrap();
            let supp_union = k.support(&union).unwrap();
            prop_assert!(supp_union <= supp_a);
            prop_assert!(supp_a >= rat(0, 1) && supp_a <= rat(1, 1));
            prop_assert_eq!(k.support(&AttrSet::new()).unwrap(), rat(1, 1));
        }

        #[test]
        fn confidence_is_the_support_ratio((k, a, b) in arb_context().prop_flat_map(|k| {
            let a = arb_subset(&k);
            let b = arb_subset(&k);
            (Just(k), a, b)
        })) {
            let union: AttrSet = a.union(&b).cloned().collect();
            let supp_a = k.support(&a).unwrap();
            let conf = k.confidence(&a, &b).unwrap();
            if supp_a != rat(0, 1) {
                prop_assert_eq!(conf, k.support(&union).unwrap() / supp_a);
            } else {
                prop_assert_eq!(conf, rat(1, 1));
            }
        }

        #[test]
        fn plain_implication_iff_full_confidence((k, a, b) in arb_context().prop_flat_map(|k| {
            let a = arb_subset(&k);
            let b = arb_subset(&k);
            (Just(k), a, b)
        })) {
            let a_ext = k.derive_attributes(&a).unwrap();
            let b_ext = k.derive_attributes(&b).unwrap();
            let plain_holds = a_ext.is_subset(&b_ext);
            let conf = k.confidence(&a, &b).unwrap();
            prop_assert_eq!(plain_holds, conf == rat(1, 1));
        }

        #[test]
        fn cxt_round_trip(k in arb_context()) {
            prop_assert_eq!(FormalContext::parse_cxt(&k.to_cxt()).unwrap(), k);
        }

        #[test]
        fn arbitrary_input_never_panics_the_parser(text in "\\PC{0,120}") {
            let _ = FormalContext::parse_cxt(&text);
        }

        #[test]
        fn restriction_preserves_inner_derivations((k, keep) in arb_context().prop_flat_map(|k| {
            let keep = arb_subset(&k);
            (Just(k), keep)
        })) {
            let restricted = k.restrict_attributes(&keep).unwrap();
            for x in all_subsets(&keep.iter().cloned().collect::<Vec<_>>()) {
                prop_assert_eq!(
                    k.derive_attributes(&x).unwrap(),
                    restricted.derive_attributes(&x).unwrap()
                );
                if !restricted.attributes().is_empty() {
                    prop_assert_eq!(k.support(&x).unwrap(), restricted.support(&x).unwrap());
                }
            }
        }
    }

    fn all_subsets(names: &[String]) -> Vec<AttrSet> {
        let mut out = vec![AttrSet::new()];
        for name in names {
            let mut extended: Vec<AttrSet> = out
                .iter()
                .map(|s| {
                    let mut s = s.clone();
                    s.insert(name.clone());
                    s
                })
                .collect();
            out.append(&mut extended);
        }
        out
    }
}

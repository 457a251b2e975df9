//! Executable semantic parsing: the restricted logical-form grammar, the
//! deterministic executor over the snapshot graph, and set-F1 scoring.
//!
//! Grammar:
//!
//! ```text
//! <LF>  ::= (hop1 <SUBJ> <PID>)
//!        |  (hop2 <SUBJ> <PID> <PID>)
//!        |  (hop2c <SUBJ> <PID> <PID> <CONSTRAINT>)
//! <SUBJ>::= Q[0-9]+
//! <PID> ::= P[0-9]+
//! <CONSTRAINT> ::= (type Q[0-9]+) | (year <INT>) | (limit <INT>)
//! ```
//!
//! Any deviation parses to Invalid; invalid predictions score 0.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::model::{EntityId, PropertyId, TypedValue};
use crate::policy::{norm_value, NormalizationPolicy};

use super::split::Split;

/// Answer-set size bound; instances beyond it are discarded at
/// generation time and executions beyond it fail.
pub const ANSWER_CAP: usize = 200;

/// The instance-of property used by type constraints.
pub const TYPE_PROPERTY: &str = "P31";

/// A constrained 2-hop filter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    Type(EntityId),
    Year(i64),
    Limit(usize),
}

/// A parsed logical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LogicalForm {
    Hop1 { subject: EntityId, property: PropertyId },
    Hop2 { subject: EntityId, first: PropertyId, second: PropertyId },
    Hop2C { subject: EntityId, first: PropertyId, second: PropertyId, constraint: Constraint },
}

impl LogicalForm {
    /// Canonical surface form.
    pub fn render(&self) -> String {
        match self {
            LogicalForm::Hop1 { subject, property } => {
                alloc::format!("(hop1 {} {})", subject, property)
            }
            LogicalForm::Hop2 { subject, first, second } => {
                alloc::format!("(hop2 {} {} {})", subject, first, second)
            }
            LogicalForm::Hop2C { subject, first, second, constraint } => {
                let c = match constraint {
                    Constraint::Type(q) => alloc::format!("(type {})", q),
                    Constraint::Year(y) => alloc::format!("(year {})", y),
                    Constraint::Limit(k) => alloc::format!("(limit {})", k),
                };
                alloc::format!("(hop2c {} {} {} {})", subject, first, second, c)
            }
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Option<Vec<Token>> {
    let mut out = Vec::new();
    let mut atom = String::new();
    for c in text.chars() {
        match c {
            '(' | ')' => {
                if !atom.is_empty() {
                    out.push(Token::Atom(core::mem::take(&mut atom)));
                }
                out.push(if c == '(' { Token::Open } else { Token::Close });
            }
            c if c.is_whitespace() => {
                if !atom.is_empty() {
                    out.push(Token::Atom(core::mem::take(&mut atom)));
                }
            }
            c if c.is_ascii_alphanumeric() || c == '-' => atom.push(c),
            _ => return None,
        }
    }
    if !atom.is_empty() {
        out.push(Token::Atom(atom));
    }
    Some(out)
}

fn parse_int(s: &str) -> Option<i64> {
    if s.is_empty() {
        return None;
    }
    let rest = s.strip_prefix('-').unwrap_or(s);
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Strict parse of the released grammar; `None` is the Invalid outcome.
pub fn parse_lf(text: &str) -> Option<LogicalForm> {
    let tokens = tokenize(text)?;
    let mut it = tokens.iter();
    if it.next()? != &Token::Open {
        return None;
    }
    let Token::Atom(head) = it.next()? else { return None };
    let atom = |it: &mut core::slice::Iter<'_, Token>| -> Option<String> {
        match it.next()? {
            Token::Atom(s) => Some(s.clone()),
            _ => None,
        }
    };
    let lf = match head.as_str() {
        "hop1" => {
            let subject = EntityId::new(atom(&mut it)?).ok()?;
            let property = PropertyId::new(atom(&mut it)?).ok()?;
            LogicalForm::Hop1 { subject, property }
        }
        "hop2" => {
            let subject = EntityId::new(atom(&mut it)?).ok()?;
            let first = PropertyId::new(atom(&mut it)?).ok()?;
            let second = PropertyId::new(atom(&mut it)?).ok()?;
            LogicalForm::Hop2 { subject, first, second }
        }
        "hop2c" => {
            let subject = EntityId::new(atom(&mut it)?).ok()?;
            let first = PropertyId::new(atom(&mut it)?).ok()?;
            let second = PropertyId::new(atom(&mut it)?).ok()?;
            if it.next()? != &Token::Open {
                return None;
            }
            let kind = atom(&mut it)?;
            let arg = atom(&mut it)?;
            let constraint = match kind.as_str() {
                "type" => Constraint::Type(EntityId::new(arg).ok()?),
                "year" => Constraint::Year(parse_int(&arg)?),
                "limit" => Constraint::Limit(usize::try_from(parse_int(&arg)?).ok()?),
                _ => return None,
            };
            if it.next()? != &Token::Close {
                return None;
            }
            LogicalForm::Hop2C { subject, first, second, constraint }
        }
        _ => return None,
    };
    if it.next()? != &Token::Close {
        return None;
    }
    if it.next().is_some() {
        return None; // trailing content
    }
    Some(lf)
}

/// A graph value: an entity id or a policy-normalized literal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GraphValue {
    Entity(EntityId),
    Literal { norm: String, year: Option<i64> },
}

impl GraphValue {
    pub fn answer_string(&self) -> String {
        match self {
            GraphValue::Entity(q) => q.as_str().to_string(),
            GraphValue::Literal { norm, .. } => norm.clone(),
        }
    }
}

/// The frozen execution graph: `(subject, property)` to ordered values.
#[derive(Clone, Debug, Default)]
pub struct KnowledgeGraph {
    edges: BTreeMap<(EntityId, PropertyId), Vec<GraphValue>>,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, subject: EntityId, property: PropertyId, value: GraphValue) {
        let list = self.edges.entry((subject, property)).or_default();
        if !list.contains(&value) {
            list.push(value);
            list.sort();
        }
    }

    /// Insert a typed statement value normalized under the policy.
    pub fn insert_typed(
        &mut self,
        subject: &EntityId,
        property: &PropertyId,
        value: &TypedValue,
        policy: &NormalizationPolicy,
    ) {
        let gv = match value {
            TypedValue::Entity(q) => GraphValue::Entity(q.clone()),
            TypedValue::Time(t) => GraphValue::Literal {
                norm: norm_value(property, value, policy).map(|(s, _)| s).unwrap_or_default(),
                year: Some(t.year),
            },
            other => GraphValue::Literal {
                norm: norm_value(property, other, policy).map(|(s, _)| s).unwrap_or_default(),
                year: None,
            },
        };
        self.insert(subject.clone(), property.clone(), gv);
    }

    pub fn values(&self, subject: &EntityId, property: &PropertyId) -> &[GraphValue] {
        self.edges
            .get(&(subject.clone(), property.clone()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn keys(&self) -> impl Iterator<Item = &(EntityId, PropertyId)> {
        self.edges.keys()
    }

    fn has_type(&self, entity: &EntityId, class: &EntityId) -> bool {
        let p31 = PropertyId::new(TYPE_PROPERTY).expect("constant pid");
        self.values(entity, &p31)
            .iter()
            .any(|v| matches!(v, GraphValue::Entity(q) if q == class))
    }
}

/// Execution failure: the answer set exceeded the cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Overflow;

/// Execute a logical form against the graph. Intermediate bindings
/// deduplicate (set semantics); `(limit k)` sorts answers ascending and
/// keeps the prefix; more than 200 answers overflow.
pub fn execute_lf(lf: &LogicalForm, graph: &KnowledgeGraph) -> Result<BTreeSet<GraphValue>, Overflow> {
    let answers = match lf {
        LogicalForm::Hop1 { subject, property } => {
            graph.values(subject, property).iter().cloned().collect::<BTreeSet<GraphValue>>()
        }
        LogicalForm::Hop2 { subject, first, second }
        | LogicalForm::Hop2C { subject, first, second, .. } => {
            let intermediates: BTreeSet<EntityId> = graph
                .values(subject, first)
                .iter()
                .filter_map(|v| match v {
                    GraphValue::Entity(q) => Some(q.clone()),
                    GraphValue::Literal { .. } => None,
                })
                .collect();
            let mut out = BTreeSet::new();
            for mid in &intermediates {
                out.extend(graph.values(mid, second).iter().cloned());
            }
            out
        }
    };
    let answers = match lf {
        LogicalForm::Hop2C { constraint, .. } => apply_constraint(answers, constraint, graph),
        _ => answers,
    };
    if answers.len() > ANSWER_CAP {
        return Err(Overflow);
    }
    Ok(answers)
}

fn apply_constraint(
    answers: BTreeSet<GraphValue>,
    constraint: &Constraint,
    graph: &KnowledgeGraph,
) -> BTreeSet<GraphValue> {
    match constraint {
        Constraint::Type(class) => answers
            .into_iter()
            .filter(|a| matches!(a, GraphValue::Entity(q) if graph.has_type(q, class)))
            .collect(),
        Constraint::Year(y) => answers
            .into_iter()
            .filter(|a| matches!(a, GraphValue::Literal { year: Some(v), .. } if v == y))
            .collect(),
        // Deterministic id-sort then prefix; BTreeSet iterates ascending.
        Constraint::Limit(k) => answers.into_iter().take(*k).collect(),
    }
}

/// Set F1 with the stated edge conventions: empty gold and empty
/// prediction score 1; empty gold against a nonempty prediction scores 0.
pub fn set_f1(predicted: &BTreeSet<String>, gold: &BTreeSet<String>) -> f64 {
    if gold.is_empty() {
        return if predicted.is_empty() { 1.0 } else { 0.0 };
    }
    if predicted.is_empty() {
        return 0.0;
    }
    let inter = predicted.intersection(gold).count() as f64;
    if inter == 0.0 {
        return 0.0;
    }
    let precision = inter / predicted.len() as f64;
    let recall = inter / gold.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Score one predicted logical form: parse, execute, then set F1 after
/// normalization. Invalid parses and runtime failures score 0 and count
/// against validity.
pub fn score_mkqa(
    predicted_text: &str,
    gold: &BTreeSet<String>,
    graph: &KnowledgeGraph,
) -> (f64, bool) {
    let Some(lf) = parse_lf(predicted_text) else {
        return (0.0, false);
    };
    match execute_lf(&lf, graph) {
        Ok(answers) => {
            let predicted: BTreeSet<String> =
                answers.iter().map(GraphValue::answer_string).collect();
            (set_f1(&predicted, gold), true)
        }
        Err(Overflow) => (0.0, false),
    }
}

/// Aggregate evaluation: Macro F1 (mean instance score, invalid scored
/// 0) and Valid% reported separately.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MkqaScores {
    pub macro_f1: f64,
    pub valid_pct: f64,
    pub instances: usize,
}

pub fn score_mkqa_batch(
    predictions: &[(String, BTreeSet<String>)],
    graph: &KnowledgeGraph,
) -> MkqaScores {
    if predictions.is_empty() {
        return MkqaScores::default();
    }
    let mut f1_sum = 0.0;
    let mut valid = 0usize;
    for (text, gold) in predictions {
        let (f1, ok) = score_mkqa(text, gold, graph);
        f1_sum += f1;
        valid += ok as usize;
    }
    MkqaScores {
        macro_f1: f1_sum / predictions.len() as f64,
        valid_pct: valid as f64 / predictions.len() as f64,
        instances: predictions.len(),
    }
}

/// One generated benchmark instance.
#[derive(Clone, Debug)]
pub struct MkqaInstance {
    pub question_id: String,
    pub language: String,
    pub question: String,
    pub lf: LogicalForm,
    pub answers: BTreeSet<String>,
    pub split: Split,
}

/// Inputs for instance generation: the graph plus per-(subject,
/// property) contributing synset splits.
pub struct MkqaSource<'a> {
    pub graph: &'a KnowledgeGraph,
    /// Splits of the synsets contributing each (S, P) group.
    pub group_splits: &'a BTreeMap<(EntityId, PropertyId), BTreeSet<Split>>,
    /// Subject labels per language, for surface realization.
    pub labels: &'a BTreeMap<(EntityId, String), String>,
    /// Property labels per language with English fallback.
    pub property_labels: &'a BTreeMap<(PropertyId, String), String>,
    pub languages: &'a [String],
}

fn group_split(
    splits: &BTreeMap<(EntityId, PropertyId), BTreeSet<Split>>,
    key: &(EntityId, PropertyId),
) -> Option<Split> {
    let set = splits.get(key)?;
    if set.len() == 1 {
        set.iter().next().copied()
    } else {
        None // cross-split instance: discarded
    }
}

fn realize_question(
    subject: &EntityId,
    property: &PropertyId,
    language: &str,
    source: &MkqaSource<'_>,
) -> Option<String> {
    let subject_label = source.labels.get(&(subject.clone(), language.to_string()))?;
    let p_label = source
        .property_labels
        .get(&(property.clone(), language.to_string()))
        .or_else(|| source.property_labels.get(&(property.clone(), "en".to_string())))?;
    Some(match language {
        "de" => alloc::format!("Was ist {} von {}?", p_label, subject_label),
        "fr" => alloc::format!("Quel est {} de {} ?", p_label, subject_label),
        "zh" => alloc::format!("{}的{}是什么？", subject_label, p_label),
        _ => alloc::format!("What is the {} of {}?", p_label, subject_label),
    })
}

/// Generate instances deterministically: every nonempty hop1 group, 2-hop
/// chains through entity intermediates, and a year-constrained variant
/// where the answers carry years. Instances inherit a split only when
/// every referenced group agrees; empty and overflowing answer sets are
/// discarded.
pub fn generate_mkqa(source: &MkqaSource<'_>) -> Vec<MkqaInstance> {
    let mut out = Vec::new();
    let keys: Vec<(EntityId, PropertyId)> = source.graph.keys().cloned().collect();

    let push = |lf: LogicalForm, split: Split, out: &mut Vec<MkqaInstance>| {
        let Ok(answers) = execute_lf(&lf, source.graph) else { return };
        if answers.is_empty() {
            return;
        }
        let answer_strings: BTreeSet<String> =
            answers.iter().map(GraphValue::answer_string).collect();
        let (subject, property) = match &lf {
            LogicalForm::Hop1 { subject, property } => (subject, property),
            LogicalForm::Hop2 { subject, second, .. } => (subject, second),
            LogicalForm::Hop2C { subject, second, .. } => (subject, second),
        };
        for language in source.languages {
            let Some(question) = realize_question(subject, property, language, source) else {
                continue;
            };
            let seed = crate::canon::Value::map([
                ("lf", crate::canon::Value::str(lf.render())),
                ("language", crate::canon::Value::str(language.clone())),
            ]);
            let question_id = crate::ids::sha1_hex(
                &[b"mkqa:".as_slice(), &crate::canon::canon_serialize(&seed)].concat(),
            );
            out.push(MkqaInstance {
                question_id,
                language: language.clone(),
                question,
                lf: lf.clone(),
                answers: answer_strings.clone(),
                split,
            });
        }
    };

    for (subject, property) in &keys {
        let key = (subject.clone(), property.clone());
        let Some(split) = group_split(source.group_splits, &key) else { continue };
        push(
            LogicalForm::Hop1 { subject: subject.clone(), property: property.clone() },
            split,
            &mut out,
        );
    }

    // Constrained and chained forms over entity-valued first hops.
    for (subject, first) in &keys {
        let first_key = (subject.clone(), first.clone());
        let Some(first_split) = group_split(source.group_splits, &first_key) else { continue };
        let intermediates: BTreeSet<EntityId> = source
            .graph
            .values(subject, first)
            .iter()
            .filter_map(|v| match v {
                GraphValue::Entity(q) => Some(q.clone()),
                _ => None,
            })
            .collect();
        if intermediates.is_empty() {
            continue;
        }
        let mut second_props: BTreeSet<PropertyId> = BTreeSet::new();
        for mid in &intermediates {
            for (s, p) in &keys {
                if s == mid {
                    second_props.insert(p.clone());
                }
            }
        }
        for second in second_props {
            // Every referenced group must share the split.
            let mut agreed = Some(first_split);
            for mid in &intermediates {
                let key = (mid.clone(), second.clone());
                if source.graph.values(mid, &second).is_empty() {
                    continue;
                }
                match group_split(source.group_splits, &key) {
                    Some(s) if Some(s) == agreed => {}
                    _ => {
                        agreed = None;
                        break;
                    }
                }
            }
            let Some(split) = agreed else { continue };
            let lf = LogicalForm::Hop2 {
                subject: subject.clone(),
                first: first.clone(),
                second: second.clone(),
            };
            let Ok(answers) = execute_lf(&lf, source.graph) else { continue };
            if answers.is_empty() {
                continue;
            }
            push(lf.clone(), split, &mut out);
            // A year-constrained variant when any answer carries a year.
            let year = answers.iter().find_map(|a| match a {
                GraphValue::Literal { year: Some(y), .. } => Some(*y),
                _ => None,
            });
            if let Some(y) = year {
                push(
                    LogicalForm::Hop2C {
                        subject: subject.clone(),
                        first: first.clone(),
                        second: second.clone(),
                        constraint: Constraint::Year(y),
                    },
                    split,
                    &mut out,
                );
            }
            // A limit variant for multi-answer sets.
            if answers.len() > 1 {
                push(
                    LogicalForm::Hop2C {
                        subject: subject.clone(),
                        first: first.clone(),
                        second: second.clone(),
                        constraint: Constraint::Limit(1),
                    },
                    split,
                    &mut out,
                );
            }
        }
    }
    out.sort_by(|a, b| a.question_id.cmp(&b.question_id));
    out.dedup_by(|a, b| a.question_id == b.question_id);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q(id: u32) -> EntityId {
        EntityId::new(alloc::format!("Q{}", id)).unwrap()
    }

    fn p(id: u32) -> PropertyId {
        PropertyId::new(alloc::format!("P{}", id)).unwrap()
    }

    fn toy_graph() -> KnowledgeGraph {
        let mut g = KnowledgeGraph::new();
        g.insert(q(1), p(50), GraphValue::Entity(q(2)));
        g.insert(q(1), p(50), GraphValue::Entity(q(3)));
        g.insert(q(2), p(569), GraphValue::Literal { norm: "1999-05-12/prec11".into(), year: Some(1999) });
        g.insert(q(3), p(569), GraphValue::Literal { norm: "1980/prec9".into(), year: Some(1980) });
        g.insert(q(2), p(31), GraphValue::Entity(q(5)));
        g.insert(q(3), p(31), GraphValue::Entity(q(6)));
        g
    }

    #[test]
    fn parse_valid_forms() {
        assert_eq!(
            parse_lf("(hop1 Q42 P69)"),
            Some(LogicalForm::Hop1 { subject: q(42), property: p(69) })
        );
        assert_eq!(
            parse_lf("(hop2 Q1 P22 P569)"),
            Some(LogicalForm::Hop2 { subject: q(1), first: p(22), second: p(569) })
        );
        assert_eq!(
            parse_lf("(hop2c Q1 P22 P569 (year 1900))"),
            Some(LogicalForm::Hop2C {
                subject: q(1),
                first: p(22),
                second: p(569),
                constraint: Constraint::Year(1900),
            })
        );
        assert_eq!(
            parse_lf(" ( hop2c Q1 P22 P569 ( type Q5 ) ) "),
            Some(LogicalForm::Hop2C {
                subject: q(1),
                first: p(22),
                second: p(569),
                constraint: Constraint::Type(q(5)),
            })
        );
    }

    #[test]
    fn parse_rejects_deviations() {
        for bad in [
            "(hop3 Q1 P1 P2 P3)",
            "(hop1 Q1)",
            "(hop1 Q1 P2 P3)",
            "(hop1 X1 P2)",
            "(hop1 Q1 P2) trailing",
            "hop1 Q1 P2",
            "(hop2c Q1 P1 P2 (size 3))",
            "(hop2c Q1 P1 P2 (year x))",
            "(HOP1 Q1 P2)",
            "(hop1 Q1 P2",
            "",
        ] {
            assert_eq!(parse_lf(bad), None, "should reject {:?}", bad);
        }
    }

    #[test]
    fn hop1_returns_values() {
        let g = toy_graph();
        let lf = parse_lf("(hop1 Q1 P50)").unwrap();
        let ans = execute_lf(&lf, &g).unwrap();
        let strings: Vec<String> = ans.iter().map(GraphValue::answer_string).collect();
        assert_eq!(strings, vec!["Q2".to_string(), "Q3".to_string()]);
    }

    #[test]
    fn hop2_chains_and_dedups_intermediates() {
        let g = toy_graph();
        let lf = parse_lf("(hop2 Q1 P50 P569)").unwrap();
        let ans = execute_lf(&lf, &g).unwrap();
        assert_eq!(ans.len(), 2);

        // Empty intermediate set yields an empty result.
        let lf = parse_lf("(hop2 Q2 P569 P50)").unwrap();
        assert!(execute_lf(&lf, &g).unwrap().is_empty());
    }

    #[test]
    fn constraints_filter() {
        let g = toy_graph();
        let year = parse_lf("(hop2c Q1 P50 P569 (year 1999))").unwrap();
        let ans = execute_lf(&year, &g).unwrap();
        assert_eq!(ans.len(), 1);
        assert_eq!(ans.iter().next().unwrap().answer_string(), "1999-05-12/prec11");

        // The type constraint filters answers; the classes reached here
        // carry no P31 edges themselves, so everything drops.
        let typed = parse_lf("(hop2c Q1 P50 P31 (type Q5))").unwrap();
        let ans = execute_lf(&typed, &g).unwrap();
        assert!(ans.is_empty());

        // A type constraint keeps answers whose own type matches.
        let mut g2 = toy_graph();
        g2.insert(q(1), p(40), GraphValue::Entity(q(2)));
        g2.insert(q(2), p(26), GraphValue::Entity(q(7)));
        g2.insert(q(7), p(31), GraphValue::Entity(q(5)));
        let typed = parse_lf("(hop2c Q1 P40 P26 (type Q5))").unwrap();
        let ans = execute_lf(&typed, &g2).unwrap();
        assert_eq!(ans.len(), 1);
        assert_eq!(ans.iter().next().unwrap().answer_string(), "Q7");

        let limit = parse_lf("(hop2c Q1 P50 P569 (limit 1))").unwrap();
        let ans = execute_lf(&limit, &g).unwrap();
        assert_eq!(ans.len(), 1);
        // Id-smallest answer under ascending sort.
        assert_eq!(ans.iter().next().unwrap().answer_string(), "1980/prec9");
    }

    #[test]
    fn overflow_beyond_answer_cap() {
        let mut g = KnowledgeGraph::new();
        for i in 0..(ANSWER_CAP as u32 + 1) {
            g.insert(q(1), p(1), GraphValue::Entity(q(100 + i)));
        }
        let lf = parse_lf("(hop1 Q1 P1)").unwrap();
        assert_eq!(execute_lf(&lf, &g), Err(Overflow));
    }

    #[test]
    fn scoring_conventions() {
        let g = toy_graph();
        let gold: BTreeSet<String> = ["Q2".to_string(), "Q3".to_string()].into();
        // Exact answers score 1.
        let (f1, valid) = score_mkqa("(hop1 Q1 P50)", &gold, &g);
        assert_eq!((f1, valid), (1.0, true));
        // Unparseable output scores 0 and counts invalid.
        let (f1, valid) = score_mkqa("(hop9 Q1 P50)", &gold, &g);
        assert_eq!((f1, valid), (0.0, false));
        // Half of a 2-element gold with 1 prediction: F1 = 2/3.
        let one: BTreeSet<String> = ["Q2".to_string()].into();
        assert!((set_f1(&one, &gold) - 2.0 / 3.0).abs() < 1e-12);
        // Edge conventions.
        let empty = BTreeSet::new();
        assert_eq!(set_f1(&empty, &empty), 1.0);
        assert_eq!(set_f1(&one, &empty), 0.0);
        assert_eq!(set_f1(&empty, &gold), 0.0);
    }

    #[test]
    fn batch_reports_macro_f1_and_validity() {
        let g = toy_graph();
        let gold: BTreeSet<String> = ["Q2".to_string(), "Q3".to_string()].into();
        let preds = vec![
            ("(hop1 Q1 P50)".to_string(), gold.clone()),
            ("garbage".to_string(), gold.clone()),
        ];
        let scores = score_mkqa_batch(&preds, &g);
        assert_eq!(scores.instances, 2);
        assert!((scores.macro_f1 - 0.5).abs() < 1e-12);
        assert!((scores.valid_pct - 0.5).abs() < 1e-12);
    }

    #[test]
    fn generation_discards_cross_split_groups() {
        let g = toy_graph();
        let mut group_splits = BTreeMap::new();
        group_splits.insert((q(1), p(50)), BTreeSet::from([Split::Train]));
        group_splits.insert((q(2), p(569)), BTreeSet::from([Split::Train]));
        // Mixed splits on this group poison every instance through it.
        group_splits.insert((q(3), p(569)), BTreeSet::from([Split::Train, Split::Test]));
        group_splits.insert((q(2), p(31)), BTreeSet::from([Split::Train]));
        group_splits.insert((q(3), p(31)), BTreeSet::from([Split::Train]));
        let labels: BTreeMap<(EntityId, String), String> =
            [((q(1), "en".to_string()), "Alice".to_string())].into();
        let property_labels: BTreeMap<(PropertyId, String), String> = [
            ((p(50), "en".to_string()), "author".to_string()),
            ((p(569), "en".to_string()), "birth date".to_string()),
            ((p(31), "en".to_string()), "type".to_string()),
        ]
        .into();
        let languages = vec!["en".to_string()];
        let source = MkqaSource {
            graph: &g,
            group_splits: &group_splits,
            labels: &labels,
            property_labels: &property_labels,
            languages: &languages,
        };
        let instances = generate_mkqa(&source);
        assert!(!instances.is_empty());
        // hop1 over (Q1, P50) survives; the 2-hop through (Q3, P569)
        // does not.
        assert!(instances.iter().any(|i| matches!(i.lf, LogicalForm::Hop1 { .. })));
        assert!(!instances
            .iter()
            .any(|i| matches!(&i.lf, LogicalForm::Hop2 { second, .. } if second == &p(569))));
        // Deterministic output.
        let again = generate_mkqa(&source);
        let a: Vec<&str> = instances.iter().map(|i| i.question_id.as_str()).collect();
        let b: Vec<&str> = again.iter().map(|i| i.question_id.as_str()).collect();
        assert_eq!(a, b);
    }
}

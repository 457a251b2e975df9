//! Rule-derived typed edges between synsets: direct joins over entity
//! values, schema-mapped relations with bounded pivot traversal, and
//! potential-conflict signals for functional properties.
//!
//! Edges are derived, never learned: re-running derivation over the same
//! synset set reproduces the identical edge multiset, ids included.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::canon::Value;
use crate::ids::{derive_id, DomainTag};
use crate::model::{EntityId, FactStatement, PropertyId, TimeValue, TypedValue};
use crate::policy::{norm_value, NormalizationPolicy};
use crate::synsets::FactSynset;

/// Conflict edges carry this relation type.
pub const POTENTIAL_CONFLICT: &str = "POTENTIAL_CONFLICT";

/// A typed, rule-derived synset-to-synset link.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationEdge {
    pub relation_id: String,
    pub source_synset_id: String,
    pub target_synset_id: String,
    pub relation_type: String,
    pub rule_id: String,
    pub hop_depth: u8,
    /// Pivot synset ids between source and target; each path's length
    /// equals its derivation's hop depth. Aggregated duplicates
    /// concatenate their traces.
    pub pivot_paths: Vec<Vec<String>>,
    pub derivation_count: u32,
    pub reference_count: u32,
    pub language_coverage: u32,
    pub confidence: f64,
}

impl RelationEdge {
    pub fn to_canon(&self) -> Value {
        let paths: Vec<Value> = self
            .pivot_paths
            .iter()
            .map(|p| Value::Arr(p.iter().map(|s| Value::str(s.clone())).collect()))
            .collect();
        Value::map([
            ("relation_id", Value::str(self.relation_id.clone())),
            ("source_synset_id", Value::str(self.source_synset_id.clone())),
            ("target_synset_id", Value::str(self.target_synset_id.clone())),
            ("relation_type", Value::str(self.relation_type.clone())),
            ("rule_id", Value::str(self.rule_id.clone())),
            ("hop_depth", Value::int(self.hop_depth as i64)),
            (
                "evidence",
                Value::map([
                    ("pivot_paths", Value::Arr(paths)),
                    (
                        "counts",
                        Value::map([
                            ("derivations", Value::int(self.derivation_count as i64)),
                            ("references", Value::int(self.reference_count as i64)),
                            ("languages", Value::int(self.language_coverage as i64)),
                        ]),
                    ),
                ]),
            ),
            ("confidence", Value::try_f64(self.confidence).expect("finite")),
        ])
    }
}

/// Reliability tier of a mapping rule, exposed as a filter flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tier {
    High,
    Medium,
    Low,
}

impl Tier {
    /// Reliability rank: higher is more reliable.
    pub fn rank(self) -> u8 {
        match self {
            Tier::High => 2,
            Tier::Medium => 1,
            Tier::Low => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tier::High => "high",
            Tier::Medium => "medium",
            Tier::Low => "low",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "high" => Some(Tier::High),
            "medium" => Some(Tier::Medium),
            "low" => Some(Tier::Low),
            _ => None,
        }
    }
}

/// One schema mapping row: statements of `source_pid` emit typed edges
/// to statements of `target_pid`, optionally through a chain of
/// `pivot_pid` statements searched up to `max_hop` pivots. A row with a
/// `subject_type` constraint fires only when the source subject carries
/// that instance-of class in the synset set.
#[derive(Clone, Debug, PartialEq)]
pub struct MapRule {
    pub rule_id: String,
    pub source_pid: PropertyId,
    pub relation_type: String,
    pub pivot_pid: Option<PropertyId>,
    pub target_pid: PropertyId,
    pub max_hop: u8,
    pub tier: Tier,
    pub tier_weight: f64,
    pub subject_type: Option<EntityId>,
}

/// The released property-relation map plus join and conflict settings.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyRelationMap {
    /// `label+<sha256 of canonical content>`.
    pub version: String,
    pub label: String,
    pub rules: Vec<MapRule>,
    pub functional_properties: BTreeSet<PropertyId>,
    pub descriptive_allowlist: BTreeSet<PropertyId>,
    pub direct_join_weight: f64,
    pub conflict_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapError(pub String);

impl fmt::Display for MapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid relation map: {}", self.0)
    }
}

impl core::error::Error for MapError {}

impl PropertyRelationMap {
    pub fn from_parts(
        label: &str,
        rules: Vec<MapRule>,
        functional_properties: BTreeSet<PropertyId>,
        descriptive_allowlist: BTreeSet<PropertyId>,
    ) -> Result<Self, MapError> {
        for r in &rules {
            if r.max_hop > 2 {
                return Err(MapError(alloc::format!("rule {} exceeds max hop 2", r.rule_id)));
            }
            if r.max_hop > 0 && r.pivot_pid.is_none() {
                return Err(MapError(alloc::format!("rule {} needs a pivot property", r.rule_id)));
            }
            if !(r.tier_weight > 0.0 && r.tier_weight <= 1.0) {
                return Err(MapError(alloc::format!("rule {} tier weight out of range", r.rule_id)));
            }
        }
        let mut map = PropertyRelationMap {
            version: String::new(),
            label: label.to_string(),
            rules,
            functional_properties,
            descriptive_allowlist,
            direct_join_weight: 0.95,
            conflict_weight: 0.9,
        };
        map.version = alloc::format!("{}+{}", map.label, map.content_hash());
        Ok(map)
    }

    pub fn content_hash(&self) -> String {
        crate::ids::sha256_hex(&crate::canon::canon_serialize(&self.body_canon()))
    }

    fn body_canon(&self) -> Value {
        let rules: Vec<Value> = self
            .rules
            .iter()
            .map(|r| {
                let mut fields = alloc::vec![
                    ("rule_id", Value::str(r.rule_id.clone())),
                    ("source_pid", Value::str(r.source_pid.as_str())),
                    ("relation_type", Value::str(r.relation_type.clone())),
                    ("target_pid", Value::str(r.target_pid.as_str())),
                    ("max_hop", Value::int(r.max_hop as i64)),
                    ("tier", Value::str(r.tier.as_str())),
                    ("tier_weight", Value::try_f64(r.tier_weight).expect("finite")),
                ];
                if let Some(p) = &r.pivot_pid {
                    fields.push(("pivot_pid", Value::str(p.as_str())));
                }
                if let Some(t) = &r.subject_type {
                    fields.push(("subject_type", Value::str(t.as_str())));
                }
                Value::map(fields)
            })
            .collect();
        let functional: Vec<Value> =
            self.functional_properties.iter().map(|p| Value::str(p.as_str())).collect();
        let descriptive: Vec<Value> =
            self.descriptive_allowlist.iter().map(|p| Value::str(p.as_str())).collect();
        Value::map([
            ("label", Value::str(self.label.clone())),
            ("rules", Value::Arr(rules)),
            ("functional_properties", Value::Arr(functional)),
            ("descriptive_allowlist", Value::Arr(descriptive)),
            ("direct_join_weight", Value::try_f64(self.direct_join_weight).expect("finite")),
            ("conflict_weight", Value::try_f64(self.conflict_weight).expect("finite")),
        ])
    }

    pub fn to_canon(&self) -> Value {
        self.body_canon()
    }

    pub fn from_canon(v: &Value) -> Result<Self, MapError> {
        let label = v
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| MapError("missing label".to_string()))?;
        let mut rules = Vec::new();
        if let Some(list) = v.get("rules").and_then(Value::as_arr) {
            for r in list {
                let field = |k: &str| -> Result<&str, MapError> {
                    r.get(k)
                        .and_then(Value::as_str)
                        .ok_or_else(|| MapError(alloc::format!("rule missing '{}'", k)))
                };
                let pivot = match r.get("pivot_pid").and_then(Value::as_str) {
                    Some(p) => Some(PropertyId::new(p).map_err(|e| MapError(e.to_string()))?),
                    None => None,
                };
                let subject_type = match r.get("subject_type").and_then(Value::as_str) {
                    Some(q) => Some(EntityId::new(q).map_err(|e| MapError(e.to_string()))?),
                    None => None,
                };
                rules.push(MapRule {
                    rule_id: field("rule_id")?.to_string(),
                    source_pid: PropertyId::new(field("source_pid")?)
                        .map_err(|e| MapError(e.to_string()))?,
                    relation_type: field("relation_type")?.to_string(),
                    pivot_pid: pivot,
                    target_pid: PropertyId::new(field("target_pid")?)
                        .map_err(|e| MapError(e.to_string()))?,
                    max_hop: r
                        .get("max_hop")
                        .and_then(Value::as_num)
                        .map(|d| d.to_f64() as u8)
                        .unwrap_or(0),
                    tier: Tier::parse(r.get("tier").and_then(Value::as_str).unwrap_or("medium"))
                        .ok_or_else(|| MapError("unknown tier".to_string()))?,
                    tier_weight: r
                        .get("tier_weight")
                        .and_then(Value::as_num)
                        .map(|d| d.to_f64())
                        .unwrap_or(0.8),
                    subject_type,
                });
            }
        }
        let pid_set = |key: &str| -> Result<BTreeSet<PropertyId>, MapError> {
            let mut out = BTreeSet::new();
            if let Some(list) = v.get(key).and_then(Value::as_arr) {
                for p in list {
                    let s = p.as_str().ok_or_else(|| MapError("pid not a string".to_string()))?;
                    out.insert(PropertyId::new(s).map_err(|e| MapError(e.to_string()))?);
                }
            }
            Ok(out)
        };
        let mut map = Self::from_parts(
            label,
            rules,
            pid_set("functional_properties")?,
            pid_set("descriptive_allowlist")?,
        )?;
        if let Some(w) = v.get("direct_join_weight").and_then(Value::as_num) {
            map.direct_join_weight = w.to_f64();
        }
        if let Some(w) = v.get("conflict_weight").and_then(Value::as_num) {
            map.conflict_weight = w.to_f64();
        }
        map.version = alloc::format!("{}+{}", map.label, map.content_hash());
        Ok(map)
    }
}

/// Monotone saturating factor for reference and language coverage:
/// 0.5 at zero, approaching 1 as coverage grows.
pub fn saturating_factor(x: u32) -> f64 {
    1.0 - 1.0 / (2.0 + x as f64)
}

/// Edge confidence: `min(1, w_tier * c(source) * psi(refs) * psi(langs))`;
/// monotone nondecreasing in both counts and bounded by 1.
pub fn score_edge_confidence(
    w_tier: f64,
    source_confidence: f64,
    ref_count: u32,
    lang_coverage: u32,
) -> f64 {
    let conf = w_tier
        * source_confidence
        * saturating_factor(ref_count)
        * saturating_factor(lang_coverage);
    conf.min(1.0)
}

/// Derivation view over one synset: its projected triple plus the
/// signals edge scoring needs.
#[derive(Clone, Debug)]
pub struct SynsetNode {
    pub synset_id: String,
    pub subject: EntityId,
    pub property: PropertyId,
    pub value_entity: Option<EntityId>,
    pub norm_value: String,
    /// Validity interval from start/end-time qualifiers of the
    /// canonical statement; open ends are unbounded.
    pub valid_from: Option<TimeValue>,
    pub valid_until: Option<TimeValue>,
    pub ref_count: u32,
    pub lang_coverage: u32,
    pub confidence: f64,
    pub deprecated: bool,
}

/// Qualifier properties carrying validity bounds.
pub const START_TIME: &str = "P580";
pub const END_TIME: &str = "P582";

/// Build derivation nodes from synsets plus their canonical statements.
pub fn index_nodes(
    synsets: &[FactSynset],
    statements: &BTreeMap<String, &FactStatement>,
    policy: &NormalizationPolicy,
) -> Vec<SynsetNode> {
    let mut nodes = Vec::with_capacity(synsets.len());
    for synset in synsets {
        let Some(stmt) = statements.get(&synset.canonical_statement_id) else { continue };
        let value_entity = match &stmt.value {
            TypedValue::Entity(q) => Some(q.clone()),
            _ => None,
        };
        let norm_value = match norm_value(&stmt.property, &stmt.value, policy) {
            Ok((s, _)) => s,
            Err(_) => continue,
        };
        let mut valid_from = None;
        let mut valid_until = None;
        for (qp, qv) in &stmt.qualifiers {
            if let TypedValue::Time(t) = qv {
                if qp.as_str() == START_TIME {
                    valid_from = Some(t.clone());
                } else if qp.as_str() == END_TIME {
                    valid_until = Some(t.clone());
                }
            }
        }
        nodes.push(SynsetNode {
            synset_id: synset.synset_id.clone(),
            subject: stmt.subject.clone(),
            property: stmt.property.clone(),
            value_entity,
            norm_value,
            valid_from,
            valid_until,
            ref_count: stmt.reference_count(),
            lang_coverage: synset.canonical_mentions.len() as u32,
            confidence: synset.aggregate_confidence.to_f64(),
            deprecated: stmt.rank == crate::model::Rank::Deprecated,
        });
    }
    nodes.sort_by(|a, b| a.synset_id.cmp(&b.synset_id));
    nodes
}

fn by_subject(nodes: &[SynsetNode]) -> BTreeMap<&EntityId, Vec<usize>> {
    let mut idx: BTreeMap<&EntityId, Vec<usize>> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        idx.entry(&n.subject).or_default().push(i);
    }
    idx
}

#[allow(clippy::too_many_arguments)]
fn make_edge(
    build_id: &str,
    source: &SynsetNode,
    target: &SynsetNode,
    relation_type: &str,
    rule_id: &str,
    hop_depth: u8,
    pivots: Vec<String>,
    weight: f64,
) -> RelationEdge {
    let record = Value::map([
        ("source", Value::str(source.synset_id.clone())),
        ("target", Value::str(target.synset_id.clone())),
        ("rule_id", Value::str(rule_id.to_string())),
    ]);
    let relation_id =
        derive_id(DomainTag::Relation, build_id, &record).expect("record canonicalizes");
    RelationEdge {
        relation_id,
        source_synset_id: source.synset_id.clone(),
        target_synset_id: target.synset_id.clone(),
        relation_type: relation_type.to_string(),
        rule_id: rule_id.to_string(),
        hop_depth,
        pivot_paths: alloc::vec![pivots],
        derivation_count: 1,
        reference_count: source.ref_count,
        language_coverage: source.lang_coverage,
        confidence: score_edge_confidence(
            weight,
            source.confidence,
            source.ref_count,
            source.lang_coverage,
        ),
    }
}

/// Direct joins: an entity-valued synset links to every synset whose
/// subject is that entity and whose property is descriptive-allowlisted.
pub fn derive_direct_joins(
    nodes: &[SynsetNode],
    map: &PropertyRelationMap,
    build_id: &str,
) -> Vec<RelationEdge> {
    let subject_index = by_subject(nodes);
    let mut edges = Vec::new();
    for source in nodes {
        let Some(object) = &source.value_entity else { continue };
        let Some(targets) = subject_index.get(object) else { continue };
        for &ti in targets {
            let target = &nodes[ti];
            if target.synset_id == source.synset_id {
                continue;
            }
            if !map.descriptive_allowlist.contains(&target.property) {
                continue;
            }
            edges.push(make_edge(
                build_id,
                source,
                target,
                "entity_context",
                "direct_join",
                0,
                Vec::new(),
                map.direct_join_weight,
            ));
        }
    }
    aggregate(edges)
}

/// Schema-mapped edges with bounded pivot traversal. `hop_cap` caps the
/// searched chain length below the per-rule bound for noise-sensitive
/// builds.
pub fn derive_schema_edges(
    nodes: &[SynsetNode],
    map: &PropertyRelationMap,
    hop_cap: u8,
    build_id: &str,
) -> Vec<RelationEdge> {
    let subject_index = by_subject(nodes);
    // Instance-of classes per subject, for the row constraints.
    let type_pid = PropertyId::new(TYPE_PID).expect("constant pid");
    let mut subject_types: BTreeMap<&EntityId, BTreeSet<&EntityId>> = BTreeMap::new();
    for n in nodes {
        if n.property == type_pid {
            if let Some(class) = &n.value_entity {
                subject_types.entry(&n.subject).or_default().insert(class);
            }
        }
    }
    let mut edges = Vec::new();
    for rule in &map.rules {
        for source in nodes.iter().filter(|n| n.property == rule.source_pid) {
            if let Some(required) = &rule.subject_type {
                let holds = subject_types
                    .get(&source.subject)
                    .is_some_and(|classes| classes.contains(required));
                if !holds {
                    continue;
                }
            }
            let Some(start) = &source.value_entity else { continue };
            if rule.max_hop == 0 {
                emit_targets(
                    &mut edges,
                    nodes,
                    &subject_index,
                    source,
                    start,
                    rule,
                    0,
                    Vec::new(),
                    build_id,
                );
                continue;
            }
            let Some(pivot_pid) = &rule.pivot_pid else { continue };
            let bound = rule.max_hop.min(hop_cap);
            // Pivot chains searched breadth-first up to the bound; every
            // reached depth emits its targets.
            let mut frontier: Vec<(EntityId, Vec<String>)> =
                alloc::vec![(start.clone(), Vec::new())];
            for depth in 1..=bound {
                let mut next = Vec::new();
                for (entity, path) in &frontier {
                    let Some(cands) = subject_index.get(entity) else { continue };
                    for &pi in cands {
                        let pivot = &nodes[pi];
                        if pivot.property != *pivot_pid {
                            continue;
                        }
                        let Some(pivot_value) = &pivot.value_entity else { continue };
                        let mut new_path = path.clone();
                        new_path.push(pivot.synset_id.clone());
                        emit_targets(
                            &mut edges,
                            nodes,
                            &subject_index,
                            source,
                            pivot_value,
                            rule,
                            depth,
                            new_path.clone(),
                            build_id,
                        );
                        next.push((pivot_value.clone(), new_path));
                    }
                }
                frontier = next;
            }
        }
    }
    aggregate(edges)
}

#[allow(clippy::too_many_arguments)]
fn emit_targets(
    edges: &mut Vec<RelationEdge>,
    nodes: &[SynsetNode],
    subject_index: &BTreeMap<&EntityId, Vec<usize>>,
    source: &SynsetNode,
    anchor: &EntityId,
    rule: &MapRule,
    depth: u8,
    pivots: Vec<String>,
    build_id: &str,
) {
    let Some(targets) = subject_index.get(anchor) else { return };
    for &ti in targets {
        let target = &nodes[ti];
        if target.property != rule.target_pid || target.synset_id == source.synset_id {
            continue;
        }
        edges.push(make_edge(
            build_id,
            source,
            target,
            &rule.relation_type,
            &rule.rule_id,
            depth,
            pivots.clone(),
            rule.tier_weight,
        ));
    }
}

fn chronological(t: &TimeValue) -> (i64, u8, u8, u8, u8, u8) {
    (t.year, t.month, t.day, t.hour, t.minute, t.second)
}

fn intervals_overlap(a: &SynsetNode, b: &SynsetNode) -> bool {
    // Open ends are unbounded; intervals are inclusive.
    let starts_before_end = |start: &Option<TimeValue>, end: &Option<TimeValue>| match (start, end)
    {
        (Some(s), Some(e)) => chronological(s) <= chronological(e),
        _ => true,
    };
    starts_before_end(&a.valid_from, &b.valid_until)
        && starts_before_end(&b.valid_from, &a.valid_until)
}

/// Potential-conflict signals: same subject and functional property with
/// unequal normalized values. When both sides carry validity intervals,
/// the conflict stands only if the intervals overlap. Symmetric pairs
/// are emitted once, source = lexicographically smaller synset id.
pub fn derive_conflicts(
    nodes: &[SynsetNode],
    map: &PropertyRelationMap,
    build_id: &str,
) -> Vec<RelationEdge> {
    let mut groups: BTreeMap<(&EntityId, &PropertyId), Vec<usize>> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        if map.functional_properties.contains(&n.property) && !n.deprecated {
            groups.entry((&n.subject, &n.property)).or_default().push(i);
        }
    }
    let mut edges = Vec::new();
    for (_, group) in groups {
        for (ai, &a_idx) in group.iter().enumerate() {
            for &b_idx in group.iter().skip(ai + 1) {
                let (a, b) = (&nodes[a_idx], &nodes[b_idx]);
                if a.norm_value == b.norm_value {
                    continue;
                }
                let both_dated = (a.valid_from.is_some() || a.valid_until.is_some())
                    && (b.valid_from.is_some() || b.valid_until.is_some());
                let rule_id = if both_dated {
                    if !intervals_overlap(a, b) {
                        continue; // disjoint validity: not a conflict
                    }
                    "temporal_conflict"
                } else {
                    "functional_conflict"
                };
                let (src, dst) = if a.synset_id <= b.synset_id { (a, b) } else { (b, a) };
                edges.push(make_edge(
                    build_id,
                    src,
                    dst,
                    POTENTIAL_CONFLICT,
                    rule_id,
                    0,
                    Vec::new(),
                    map.conflict_weight,
                ));
            }
        }
    }
    aggregate(edges)
}

/// Aggregate duplicate derivations keyed on (source, target, rule):
/// confidence maximized, evidence traces concatenated.
fn aggregate(edges: Vec<RelationEdge>) -> Vec<RelationEdge> {
    let mut merged: BTreeMap<(String, String, String), RelationEdge> = BTreeMap::new();
    for e in edges {
        let key = (e.source_synset_id.clone(), e.target_synset_id.clone(), e.rule_id.clone());
        match merged.get_mut(&key) {
            None => {
                merged.insert(key, e);
            }
            Some(kept) => {
                kept.derivation_count += e.derivation_count;
                kept.pivot_paths.extend(e.pivot_paths);
                kept.hop_depth = kept.hop_depth.min(e.hop_depth);
                if e.confidence > kept.confidence {
                    kept.confidence = e.confidence;
                }
            }
        }
    }
    let mut out: Vec<RelationEdge> = merged.into_values().collect();
    for e in out.iter_mut() {
        e.pivot_paths.sort();
    }
    out.sort_by(|a, b| a.relation_id.cmp(&b.relation_id));
    out
}

/// The instance-of property used by subject-type constraints.
pub const TYPE_PID: &str = "P31";

/// Keep edges whose rule tier is at least `min_tier`. Direct joins rank
/// High; conflict signals rank Medium; schema edges carry their row's
/// tier.
pub fn filter_by_tier(
    edges: Vec<RelationEdge>,
    map: &PropertyRelationMap,
    min_tier: Tier,
) -> Vec<RelationEdge> {
    let rule_tiers: BTreeMap<&str, Tier> =
        map.rules.iter().map(|r| (r.rule_id.as_str(), r.tier)).collect();
    edges
        .into_iter()
        .filter(|e| {
            let tier = match e.rule_id.as_str() {
                "direct_join" => Tier::High,
                "functional_conflict" | "temporal_conflict" => Tier::Medium,
                rule => rule_tiers.get(rule).copied().unwrap_or(Tier::Low),
            };
            tier.rank() >= min_tier.rank()
        })
        .collect()
}

/// Optional hub down-weighting post-filter: scale each edge's
/// confidence by an inverse-log prior on its source's out-degree within
/// the edge set. Ids and topology are untouched.
pub fn hub_downweight(edges: &mut [RelationEdge]) {
    let mut out_degree: BTreeMap<&str, u64> = BTreeMap::new();
    for e in edges.iter() {
        *out_degree.entry(e.source_synset_id.as_str()).or_insert(0) += 1;
    }
    let factors: BTreeMap<String, f64> = out_degree
        .into_iter()
        .map(|(id, d)| (id.to_string(), 1.0 / (1.0 + libm::log(1.0 + d as f64))))
        .collect();
    for e in edges.iter_mut() {
        if let Some(f) = factors.get(&e.source_synset_id) {
            e.confidence = (e.confidence * f).min(1.0);
        }
    }
}

/// Run every derivation operator under one hop cap.
pub fn derive_all(
    nodes: &[SynsetNode],
    map: &PropertyRelationMap,
    hop_cap: u8,
    build_id: &str,
) -> Vec<RelationEdge> {
    let mut edges = derive_direct_joins(nodes, map, build_id);
    edges.extend(derive_schema_edges(nodes, map, hop_cap, build_id));
    edges.extend(derive_conflicts(nodes, map, build_id));
    edges.sort_by(|a, b| a.relation_id.cmp(&b.relation_id));
    edges
}

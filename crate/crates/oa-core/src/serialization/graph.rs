//! Triples and graphs.
//!
//! `TripleGraph` is the interchange value between the model, the TriG writer,
//! and embedded graph bodies. Blank-node identity is label-based within a
//! graph set; [`graphs_isomorphic`] compares two sets up to relabeling.

use std::collections::{BTreeMap, BTreeSet};

use crate::iri::Iri;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Iri(Iri),
    Blank(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Object {
    Iri(Iri),
    Blank(String),
    Literal(Literal),
}

/// An RDF literal: a lexical form with at most one of a datatype or a
/// language tag. Constructors keep that invariant; there is no way to build
/// a literal carrying both.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Option<Iri>,
    language: Option<String>,
}

impl Literal {
    pub fn simple(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Some(datatype),
            language: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, tag: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: Some(tag.into()),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Option<&Iri> {
        self.datatype.as_ref()
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Object,
}

impl Triple {
    pub fn new(subject: impl Into<Subject>, predicate: Iri, object: impl Into<Object>) -> Self {
        Triple {
            subject: subject.into(),
            predicate,
            object: object.into(),
        }
    }
}

impl From<Iri> for Subject {
    fn from(value: Iri) -> Self {
        Subject::Iri(value)
    }
}

impl From<Iri> for Object {
    fn from(value: Iri) -> Self {
        Object::Iri(value)
    }
}

impl From<Literal> for Object {
    fn from(value: Literal) -> Self {
        Object::Literal(value)
    }
}

/// A set of triples, optionally named. `name: None` is the default graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripleGraph {
    pub name: Option<Iri>,
    pub triples: BTreeSet<Triple>,
}

impl TripleGraph {
    pub fn new() -> Self {
        TripleGraph::default()
    }

    pub fn named(name: Iri) -> Self {
        TripleGraph {
            name: Some(name),
            triples: BTreeSet::new(),
        }
    }

    pub fn insert(&mut self, triple: Triple) {
        self.triples.insert(triple);
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

/// Graphs of a set merged by name (repeated names union their triples).
/// Graphs without triples are dropped: an empty graph says nothing.
fn dataset(graphs: &[TripleGraph]) -> BTreeMap<Option<&Iri>, BTreeSet<&Triple>> {
    let mut out: BTreeMap<Option<&Iri>, BTreeSet<&Triple>> = BTreeMap::new();
    for g in graphs {
        if !g.triples.is_empty() {
            out.entry(g.name.as_ref()).or_default().extend(&g.triples);
        }
    }
    out
}

fn blank_labels(graphs: &[TripleGraph]) -> BTreeSet<&str> {
    let mut out = BTreeSet::new();
    for g in graphs {
        for t in &g.triples {
            if let Subject::Blank(b) = &t.subject {
                out.insert(b.as_str());
            }
            if let Object::Blank(b) = &t.object {
                out.insert(b.as_str());
            }
        }
    }
    out
}

fn literal_sig(l: &Literal) -> String {
    format!(
        "{:?}^^{:?}@{:?}",
        l.lexical,
        l.datatype.as_ref().map(Iri::as_str),
        l.language
    )
}

/// Structural color of each blank label, computed by refinement: a label's
/// color folds in the colors of the blanks it shares triples with, repeated
/// until the partition stops splitting. Isomorphic nodes always end up with
/// equal colors, which is what both the isomorphism search and the canonical
/// writer ordering rely on.
fn blank_colors(graphs: &[TripleGraph]) -> BTreeMap<String, String> {
    let data = dataset(graphs);
    let labels = blank_labels(graphs);
    let mut colors: BTreeMap<String, String> = labels
        .iter()
        .map(|l| (l.to_string(), String::new()))
        .collect();
    if colors.is_empty() {
        return colors;
    }

    let obj_sig = |o: &Object, me: &str, colors: &BTreeMap<String, String>| -> String {
        match o {
            Object::Iri(i) => format!("<{i}>"),
            Object::Literal(l) => literal_sig(l),
            Object::Blank(b) if b == me => "*self".to_string(),
            Object::Blank(b) => format!("*{}", colors[b.as_str()]),
        }
    };
    let subj_sig = |s: &Subject, me: &str, colors: &BTreeMap<String, String>| -> String {
        match s {
            Subject::Iri(i) => format!("<{i}>"),
            Subject::Blank(b) if b == me => "*self".to_string(),
            Subject::Blank(b) => format!("*{}", colors[b.as_str()]),
        }
    };

    for _ in 0..=colors.len() {
        let mut next: BTreeMap<String, String> = BTreeMap::new();
        for label in colors.keys() {
            let mut entries: Vec<String> = Vec::new();
            for (name, triples) in &data {
                let gname = match name {
                    Some(i) => format!("<{i}>"),
                    None => String::new(),
                };
                for t in triples {
                    if matches!(&t.subject, Subject::Blank(b) if b == label) {
                        entries.push(format!(
                            "{gname} s <{}> {}",
                            t.predicate,
                            obj_sig(&t.object, label, &colors)
                        ));
                    }
                    if matches!(&t.object, Object::Blank(b) if b == label) {
                        entries.push(format!(
                            "{gname} o <{}> {}",
                            t.predicate,
                            subj_sig(&t.subject, label, &colors)
                        ));
                    }
                }
            }
            entries.sort();
            next.insert(label.clone(), entries.join("|"));
        }
        let classes_before = partition_size(&colors);
        let classes_after = partition_size(&next);
        colors = next;
        if classes_after == classes_before {
            break;
        }
    }
    colors
}

fn partition_size(colors: &BTreeMap<String, String>) -> usize {
    colors.values().collect::<BTreeSet<_>>().len()
}

/// Deterministic relabeling of every blank node in the set to `c0, c1, ...`,
/// ordered by structural color (ties by original label).
pub(crate) fn canonical_labels(graphs: &[TripleGraph]) -> BTreeMap<String, String> {
    let colors = blank_colors(graphs);
    let mut order: Vec<(&String, &String)> = colors.iter().map(|(l, c)| (c, l)).collect();
    order.sort();
    order
        .into_iter()
        .enumerate()
        .map(|(n, (_, label))| (label.clone(), format!("c{n}")))
        .collect()
}

pub(crate) fn map_triple(t: &Triple, mapping: &BTreeMap<String, String>) -> Triple {
    let subject = match &t.subject {
        Subject::Blank(b) => Subject::Blank(mapping[b.as_str()].clone()),
        s => s.clone(),
    };
    let object = match &t.object {
        Object::Blank(b) => Object::Blank(mapping[b.as_str()].clone()),
        o => o.clone(),
    };
    Triple::new(subject, t.predicate.clone(), object)
}

fn triple_blanks(t: &Triple) -> Vec<&str> {
    let mut out = Vec::new();
    if let Subject::Blank(b) = &t.subject {
        out.push(b.as_str());
    }
    if let Object::Blank(b) = &t.object {
        out.push(b.as_str());
    }
    out
}

/// True iff the two graph sets contain the same graphs (matched by name)
/// with the same triples up to a single blank-node bijection shared across
/// the whole set. Backtracking with color pruning; fine at desk scale.
pub fn graphs_isomorphic(a: &[TripleGraph], b: &[TripleGraph]) -> bool {
    let da = dataset(a);
    let db = dataset(b);
    if da.len() != db.len() {
        return false;
    }
    for ((name_a, triples_a), (name_b, triples_b)) in da.iter().zip(db.iter()) {
        if name_a != name_b || triples_a.len() != triples_b.len() {
            return false;
        }
    }
    // Ground triples have no blank on either side and must match exactly.
    fn ground<'t>(ts: &BTreeSet<&'t Triple>) -> BTreeSet<&'t Triple> {
        ts.iter()
            .copied()
            .filter(|t| triple_blanks(t).is_empty())
            .collect()
    }
    for (name, triples_a) in &da {
        if ground(triples_a) != ground(&db[name]) {
            return false;
        }
    }

    let colors_a = blank_colors(a);
    let colors_b = blank_colors(b);
    if colors_a.len() != colors_b.len() {
        return false;
    }
    let mut class_a: BTreeMap<&String, usize> = BTreeMap::new();
    let mut class_b: BTreeMap<&String, usize> = BTreeMap::new();
    for c in colors_a.values() {
        *class_a.entry(c).or_default() += 1;
    }
    for c in colors_b.values() {
        *class_b.entry(c).or_default() += 1;
    }
    if class_a != class_b {
        return false;
    }
    if colors_a.is_empty() {
        return true;
    }

    // Triples touching each a-side label, per graph, for incremental checks.
    let mut touching: BTreeMap<&str, Vec<(Option<&Iri>, &Triple)>> = BTreeMap::new();
    for (name, triples) in &da {
        for t in triples {
            for label in triple_blanks(t) {
                touching.entry(label).or_default().push((*name, t));
            }
        }
    }

    // Most-constrained labels first: smallest color class, then most triples.
    let mut order: Vec<&str> = colors_a.keys().map(String::as_str).collect();
    order.sort_by_key(|l| {
        (
            class_a[&colors_a[*l]],
            std::cmp::Reverse(touching.get(l).map_or(0, Vec::len)),
            l.to_string(),
        )
    });

    let mut mapping: BTreeMap<String, String> = BTreeMap::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    extend(
        &order,
        0,
        &mut mapping,
        &mut used,
        &colors_a,
        &colors_b,
        &touching,
        &db,
    )
}

#[allow(clippy::too_many_arguments)]
fn extend(
    order: &[&str],
    i: usize,
    mapping: &mut BTreeMap<String, String>,
    used: &mut BTreeSet<String>,
    colors_a: &BTreeMap<String, String>,
    colors_b: &BTreeMap<String, String>,
    touching: &BTreeMap<&str, Vec<(Option<&Iri>, &Triple)>>,
    db: &BTreeMap<Option<&Iri>, BTreeSet<&Triple>>,
) -> bool {
    let Some(label) = order.get(i) else {
        return true;
    };
    let color = &colors_a[*label];
    let candidates: Vec<String> = colors_b
        .iter()
        .filter(|(cand, c)| *c == color && !used.contains(*cand))
        .map(|(cand, _)| cand.clone())
        .collect();
    for cand in candidates {
        mapping.insert(label.to_string(), cand.clone());
        used.insert(cand.clone());
        let consistent = touching.get(*label).is_none_or(|ts| {
            ts.iter().all(|(name, t)| {
                if triple_blanks(t).iter().any(|b| !mapping.contains_key(*b)) {
                    return true;
                }
                db[name].contains(&map_triple(t, mapping))
            })
        });
        if consistent
            && extend(
                order,
                i + 1,
                mapping,
                used,
                colors_a,
                colors_b,
                touching,
                db,
            )
        {
            return true;
        }
        used.remove(&cand);
        mapping.remove(*label);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn blank_chain(first: &str, second: &str) -> TripleGraph {
        let mut g = TripleGraph::new();
        g.insert(Triple::new(
            Subject::Blank(first.into()),
            iri("http://e.com/p"),
            Object::Blank(second.into()),
        ));
        g.insert(Triple::new(
            Subject::Blank(second.into()),
            iri("http://e.com/q"),
            Literal::simple("leaf"),
        ));
        g
    }

    #[test]
    fn permuted_blank_labels_are_isomorphic() {
        let a = blank_chain("x", "y");
        let b = blank_chain("n1", "n0");
        assert!(graphs_isomorphic(&[a], &[b]));
    }

    #[test]
    fn differing_literal_is_not_isomorphic() {
        let a = blank_chain("x", "y");
        let mut b = blank_chain("x", "y");
        b.triples = b
            .triples
            .into_iter()
            .map(|t| match t.object {
                Object::Literal(_) => Triple::new(t.subject, t.predicate, Literal::simple("other")),
                o => Triple::new(t.subject, t.predicate, o),
            })
            .collect();
        assert!(!graphs_isomorphic(&[a], &[b]));
    }

    #[test]
    fn empty_sets_are_isomorphic() {
        assert!(graphs_isomorphic(&[], &[]));
        assert!(graphs_isomorphic(&[TripleGraph::new()], &[]));
    }

    #[test]
    fn graph_names_must_match() {
        let mut a = TripleGraph::named(iri("http://e.com/g1"));
        a.insert(Triple::new(
            iri("http://e.com/s"),
            iri("http://e.com/p"),
            iri("http://e.com/o"),
        ));
        let mut b = TripleGraph::named(iri("http://e.com/g2"));
        b.insert(Triple::new(
            iri("http://e.com/s"),
            iri("http://e.com/p"),
            iri("http://e.com/o"),
        ));
        assert!(!graphs_isomorphic(&[a.clone()], &[b]));
        assert!(graphs_isomorphic(&[a.clone()], &[a]));
    }

    #[test]
    fn structurally_distinct_blanks_do_not_collapse() {
        // x has two outgoing edges, y one; swapping them cannot match a graph
        // where the counts are reversed on different leaf literals.
        let mut a = TripleGraph::new();
        a.insert(Triple::new(
            Subject::Blank("x".into()),
            iri("http://e.com/p"),
            Literal::simple("1"),
        ));
        a.insert(Triple::new(
            Subject::Blank("x".into()),
            iri("http://e.com/p"),
            Literal::simple("2"),
        ));
        a.insert(Triple::new(
            Subject::Blank("y".into()),
            iri("http://e.com/p"),
            Literal::simple("3"),
        ));
        let mut b = TripleGraph::new();
        b.insert(Triple::new(
            Subject::Blank("x".into()),
            iri("http://e.com/p"),
            Literal::simple("1"),
        ));
        b.insert(Triple::new(
            Subject::Blank("y".into()),
            iri("http://e.com/p"),
            Literal::simple("2"),
        ));
        b.insert(Triple::new(
            Subject::Blank("y".into()),
            iri("http://e.com/p"),
            Literal::simple("3"),
        ));
        assert!(!graphs_isomorphic(&[a], &[b]));
    }

    #[test]
    fn triple_set_deduplicates() {
        let mut g = TripleGraph::new();
        let t = Triple::new(
            iri("http://e.com/s"),
            iri("http://e.com/p"),
            iri("http://e.com/o"),
        );
        g.insert(t.clone());
        g.insert(t);
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn canonical_labels_are_stable_under_renaming() {
        let a = blank_chain("alpha", "beta");
        let b = blank_chain("zz", "aa");
        let la = canonical_labels(std::slice::from_ref(&a));
        let lb = canonical_labels(std::slice::from_ref(&b));
        let rename = |g: &TripleGraph, m: &BTreeMap<String, String>| -> BTreeSet<Triple> {
            g.triples.iter().map(|t| map_triple(t, m)).collect()
        };
        assert_eq!(rename(&a, &la), rename(&b, &lb));
    }
}

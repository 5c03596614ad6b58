//! Graphviz export of the dominance relation.

use std::fmt::Write;

use crate::order::{compute_partition, KnowledgeBase, ObjectId, Universe};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One node per object, Pareto-optimal ones drawn doubled, and an edge
/// `u -> v` whenever `u` dominates `v`. Dominance is not transitive, so no
/// edges are dropped. A graph exported before the partition is settled is
/// labelled as a draft.
pub fn dominance_dot(universe: &Universe, kb: &KnowledgeBase) -> String {
    let part = compute_partition(kb);
    let mut out = String::from("digraph dominance {\n");
    if !part.unknown.is_empty() {
        out.push_str("  label=\"draft: some objects are undetermined\";\n");
    }
    for id in universe.objects() {
        let label = quote(universe.object_label(id));
        let style = if part.is_confirmed(id) {
            " [shape=doublecircle, pareto=true]"
        } else if part.is_unknown(id) {
            " [style=dashed]"
        } else {
            ""
        };
        let _ = writeln!(out, "  {label}{style};");
    }
    let n = universe.object_count();
    for u in (0..n).map(ObjectId::from) {
        for v in (0..n).map(ObjectId::from) {
            if u != v && kb.dominates(u, v) {
                let _ = writeln!(
                    out,
                    "  {} -> {};",
                    quote(universe.object_label(u)),
                    quote(universe.object_label(v))
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

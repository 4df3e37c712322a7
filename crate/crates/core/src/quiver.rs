//! Quivers, double quivers, separated quivers and dimension vectors.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuiverError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("arrow `{arrow}` references unknown vertex `{vertex}`")]
    UnknownVertex { arrow: String, vertex: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// A finite quiver. Vertex and arrow ids are strings; declaration order is
/// significant, it fixes the term order of any presentation built on top.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<Arrow>) -> Result<Quiver, QuiverError> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(QuiverError::DuplicateId(v.clone()));
            }
        }
        let mut seen_arrows = BTreeSet::new();
        for a in &arrows {
            if !seen_arrows.insert(a.id.clone()) {
                return Err(QuiverError::DuplicateId(a.id.clone()));
            }
            for v in [&a.src, &a.dst] {
                if !vertices.contains(v) {
                    return Err(QuiverError::UnknownVertex {
                        arrow: a.id.clone(),
                        vertex: v.clone(),
                    });
                }
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    /// One vertex, one loop `a`.
    pub fn loop_quiver() -> Quiver {
        Quiver::new(
            vec!["1".into()],
            vec![Arrow { id: "a".into(), src: "1".into(), dst: "1".into() }],
        )
        .unwrap()
    }

    /// Two vertices, one arrow `e: 1 -> 2`.
    pub fn a2() -> Quiver {
        Quiver::new(
            vec!["1".into(), "2".into()],
            vec![Arrow { id: "e".into(), src: "1".into(), dst: "2".into() }],
        )
        .unwrap()
    }

    /// One vertex, two loops `x`, `y`.
    pub fn two_loop() -> Quiver {
        Quiver::new(
            vec!["1".into()],
            vec![
                Arrow { id: "x".into(), src: "1".into(), dst: "1".into() },
                Arrow { id: "y".into(), src: "1".into(), dst: "1".into() },
            ],
        )
        .unwrap()
    }
}

/// The double quiver: every arrow `a` acquires a reversed partner `a*`.
/// Arrows are listed base first, then the starred ones in the same order.
#[derive(Clone, Debug)]
pub struct DoubleQuiver {
    pub quiver: Quiver,
    /// Number of base arrows; arrows `[0..base_count)` are the originals.
    pub base_count: usize,
}

impl DoubleQuiver {
    /// The star involution on arrow ids.
    pub fn star(&self, id: &str) -> String {
        if let Some(stripped) = id.strip_suffix('*') {
            stripped.to_string()
        } else {
            format!("{id}*")
        }
    }
}

pub fn double(q: &Quiver) -> DoubleQuiver {
    let mut arrows = q.arrows.clone();
    for a in &q.arrows {
        arrows.push(Arrow {
            id: format!("{}*", a.id),
            src: a.dst.clone(),
            dst: a.src.clone(),
        });
    }
    DoubleQuiver {
        quiver: Quiver { vertices: q.vertices.clone(), arrows },
        base_count: q.arrows.len(),
    }
}

/// Result of separating a quiver into a disjoint union of A2 pieces.
#[derive(Clone, Debug)]
pub struct Separated {
    pub quiver: Quiver,
    /// Ordered fusion plan `(kept, merged)` recovering the original quiver.
    /// Pairs come grouped by original vertex; within a group the kept copy is
    /// the first target-side copy (or the first source-side copy when the
    /// vertex is never a target), so that folding multiplicative moment data
    /// over the plan reproduces the product ordered "targets then sources".
    pub plan: Vec<(String, String)>,
}

/// Split `q` into one A2 per arrow: arrow `a` runs `v_a -> v_a*`, where `v_a`
/// is a private copy of `src(a)` and `v_a*` one of `dst(a)`.
pub fn separate(q: &Quiver) -> Separated {
    let mut vertices = Vec::new();
    let mut arrows = Vec::new();
    for a in &q.arrows {
        let vs = format!("v_{}", a.id);
        let vt = format!("v_{}*", a.id);
        vertices.push(vs.clone());
        vertices.push(vt.clone());
        arrows.push(Arrow { id: a.id.clone(), src: vs, dst: vt });
    }
    // Copies of each original vertex, target-side copies first.
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, v) in q.vertices.iter().enumerate() {
        let mut copies = Vec::new();
        for a in &q.arrows {
            if &a.dst == v {
                copies.push(format!("v_{}*", a.id));
            }
        }
        for a in &q.arrows {
            if &a.src == v {
                copies.push(format!("v_{}", a.id));
            }
        }
        groups.insert(i, copies);
    }
    let mut plan = Vec::new();
    for (_, copies) in groups {
        if let Some((first, rest)) = copies.split_first() {
            for c in rest {
                plan.push((first.clone(), c.clone()));
            }
        }
    }
    Separated { quiver: Quiver { vertices, arrows }, plan }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionVector(pub BTreeMap<String, usize>);

impl DimensionVector {
    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn get(&self, vertex: &str) -> usize {
        *self.0.get(vertex).unwrap_or(&0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separate_loop() {
        let sep = separate(&Quiver::loop_quiver());
        assert_eq!(sep.quiver.vertices, vec!["v_a", "v_a*"]);
        assert_eq!(sep.quiver.arrows.len(), 1);
        assert_eq!(sep.plan, vec![("v_a*".to_string(), "v_a".to_string())]);
    }

    #[test]
    fn separate_a2_is_identity_with_empty_plan() {
        let sep = separate(&Quiver::a2());
        assert_eq!(sep.quiver.arrows.len(), 1);
        assert!(sep.plan.is_empty());
    }

    #[test]
    fn separate_shared_source() {
        // a: 1 -> 2, b: 1 -> 3 share vertex 1, so the plan fuses its copies.
        let q = Quiver::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec![
                Arrow { id: "a".into(), src: "1".into(), dst: "2".into() },
                Arrow { id: "b".into(), src: "1".into(), dst: "3".into() },
            ],
        )
        .unwrap();
        let sep = separate(&q);
        assert_eq!(sep.quiver.vertices.len(), 4);
        assert_eq!(sep.quiver.arrows.len(), 2);
        assert_eq!(sep.plan, vec![("v_a".to_string(), "v_b".to_string())]);
    }

    #[test]
    fn double_of_loop_has_two_loops() {
        let d = double(&Quiver::loop_quiver());
        assert_eq!(d.quiver.arrows.len(), 2);
        assert_eq!(d.quiver.arrows[1].id, "a*");
        assert_eq!(d.star("a*"), "a");
    }

    #[test]
    fn separate_and_double_commute_on_arrow_ids() {
        let q = Quiver::two_loop();
        let a = double(&separate(&q).quiver);
        let b = separate(&double(&q).quiver);
        let mut ids_a: Vec<&str> = a.quiver.arrows.iter().map(|x| x.id.as_str()).collect();
        let mut ids_b: Vec<&str> = b.quiver.arrows.iter().map(|x| x.id.as_str()).collect();
        ids_a.sort();
        ids_b.sort();
        assert_eq!(ids_a, ids_b);
    }

    #[test]
    fn double_on_empty() {
        let q = Quiver::new(vec![], vec![]).unwrap();
        let d = double(&q);
        assert!(d.quiver.arrows.is_empty());
    }
}

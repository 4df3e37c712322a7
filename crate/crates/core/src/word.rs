//! Path words over a presented algebra's alphabet.
//!
//! A word is either the empty path at a vertex (a bare idempotent `e_v`) or a
//! nonempty sequence of letters. The sequence is read left to right with the
//! convention that `x * y` composes when `src(x) = tgt(y)`; so a word
//! `[l1, l2, ..., lk]` requires `src(l_i) = tgt(l_{i+1})`, its target is
//! `tgt(l1)` and its source is `src(lk)`.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Index of a letter in its presentation's alphabet.
pub type LetterId = u16;
/// Index of a vertex in its presentation's vertex list.
pub type VertexId = u32;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Word {
    /// Empty path at a vertex.
    Id(VertexId),
    /// Nonempty composable letter sequence.
    Path(Vec<LetterId>),
}

impl Word {
    pub fn path(letters: Vec<LetterId>) -> Word {
        debug_assert!(!letters.is_empty());
        Word::Path(letters)
    }

    pub fn single(l: LetterId) -> Word {
        Word::Path(vec![l])
    }

    pub fn is_id(&self) -> bool {
        matches!(self, Word::Id(_))
    }

    pub fn len(&self) -> usize {
        match self {
            Word::Id(_) => 0,
            Word::Path(ls) => ls.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn letters(&self) -> &[LetterId] {
        match self {
            Word::Id(_) => &[],
            Word::Path(ls) => ls,
        }
    }
}

// Length-then-lexicographic order; the empty paths sort first, by vertex.
// This is the term order used to orient rewrite rules, so letter indices
// must follow declaration order (arrows first, localization letters after).
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Word::Id(a), Word::Id(b)) => a.cmp(b),
            (Word::Id(_), Word::Path(_)) => Ordering::Less,
            (Word::Path(_), Word::Id(_)) => Ordering::Greater,
            (Word::Path(a), Word::Path(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
        }
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

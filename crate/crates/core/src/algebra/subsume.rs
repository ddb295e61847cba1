//! Indexed clause subsumption.
//!
//! Outside the falsum, `a` subsumes `b` only when every coefficient map of
//! `a` occurs in `b` (parallel canonical disjuncts), so lookups go through
//! interned coefficient maps: a subset trie to find subsumers, posting lists
//! to find the subsumed.

use std::collections::{BTreeMap, HashMap};

use super::constraint::Constraint;
use super::{Rational, Var};

#[derive(Clone, Debug, Default)]
struct TrieNode {
    children: BTreeMap<u32, usize>,
    ends: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SubsumptionIndex {
    ids: HashMap<BTreeMap<Var, Rational>, u32>,
    members: Vec<Option<(Constraint, Vec<u32>)>>,
    trie: Vec<TrieNode>,
    postings: HashMap<u32, Vec<usize>>,
    live: usize,
    falsum: Option<usize>,
}

impl Default for SubsumptionIndex {
    fn default() -> Self {
        Self {
            ids: HashMap::new(),
            members: Vec::new(),
            trie: vec![TrieNode::default()],
            postings: HashMap::new(),
            live: 0,
            falsum: None,
        }
    }
}

impl SubsumptionIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    fn is_falsum(c: &Constraint) -> bool {
        c.disjuncts().iter().any(|d| d.is_constant_false())
    }

    fn known_ids(&self, c: &Constraint) -> Vec<Option<u32>> {
        c.disjuncts().iter().map(|d| self.ids.get(d.expr().coeffs()).copied()).collect()
    }

    // members whose signature is a subset of `known[from..]` below `node`
    fn search(&self, node: usize, known: &[u32], c: &Constraint) -> bool {
        let n = &self.trie[node];
        if n.ends.iter().any(|&i| self.members[i].as_ref().is_some_and(|(m, _)| m.subsumes(c))) {
            return true;
        }
        if n.children.is_empty() {
            return false;
        }
        known.iter().enumerate().any(|(j, id)| match n.children.get(id) {
            Some(&child) => self.search(child, &known[j + 1..], c),
            None => false,
        })
    }

    /// Whether some member subsumes `c`.
    pub fn is_subsumed(&self, c: &Constraint) -> bool {
        if self.falsum.is_some() {
            return true;
        }
        let mut known: Vec<u32> = self.known_ids(c).into_iter().flatten().collect();
        known.sort_unstable();
        known.dedup();
        !known.is_empty() && self.search(0, &known, c)
    }

    /// Drops every member that `c` subsumes.
    pub fn remove_subsumed_by(&mut self, c: &Constraint) {
        if Self::is_falsum(c) {
            self.members.iter_mut().for_each(|m| *m = None);
            self.trie = vec![TrieNode::default()];
            self.postings.clear();
            self.live = 0;
            self.falsum = None;
            return;
        }
        let Some(ids) = self.known_ids(c).into_iter().collect::<Option<Vec<u32>>>() else {
            return;
        };
        let Some(rarest) = ids.iter().min_by_key(|id| self.postings.get(id).map_or(0, Vec::len)) else {
            return;
        };
        let candidates = self.postings.get(rarest).cloned().unwrap_or_default();
        for i in candidates {
            let hit = match &self.members[i] {
                Some((m, sig)) => ids.iter().all(|id| sig.binary_search(id).is_ok()) && c.subsumes(m),
                None => false,
            };
            if hit {
                self.members[i] = None;
                self.live -= 1;
            }
        }
    }

    /// Adds `c` without any subsumption check.
    pub fn insert(&mut self, c: Constraint) {
        let idx = self.members.len();
        if Self::is_falsum(&c) {
            self.falsum = Some(idx);
        }
        let mut sig: Vec<u32> = c
            .disjuncts()
            .iter()
            .map(|d| {
                let next = self.ids.len() as u32;
                *self.ids.entry(d.expr().coeffs().clone()).or_insert(next)
            })
            .collect();
        sig.sort_unstable();
        sig.dedup();
        for &id in &sig {
            self.postings.entry(id).or_default().push(idx);
        }
        let mut node = 0;
        for &id in &sig {
            node = match self.trie[node].children.get(&id) {
                Some(&child) => child,
                None => {
                    self.trie.push(TrieNode::default());
                    let child = self.trie.len() - 1;
                    self.trie[node].children.insert(id, child);
                    child
                }
            };
        }
        self.trie[node].ends.push(idx);
        self.members.push(Some((c, sig)));
        self.live += 1;
    }

    /// Inserts `c` unless subsumed, evicting what it subsumes. Returns
    /// whether it was added.
    pub fn add(&mut self, c: Constraint) -> bool {
        if self.is_subsumed(&c) {
            return false;
        }
        self.remove_subsumed_by(&c);
        self.insert(c);
        true
    }

    /// Live members, sorted.
    pub fn into_sorted_vec(self) -> Vec<Constraint> {
        let mut out: Vec<Constraint> = self.members.into_iter().flatten().map(|(c, _)| c).collect();
        out.sort();
        out
    }
}

/// Sorted, deduplicated and subsumption-free copy of `constraints`.
pub fn prune_subsumed(mut constraints: Vec<Constraint>) -> Vec<Constraint> {
    constraints.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    constraints.dedup();
    let mut index = SubsumptionIndex::new();
    for c in constraints {
        index.add(c);
    }
    index.into_sorted_vec()
}

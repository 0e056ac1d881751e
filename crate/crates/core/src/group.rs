//! Finite groups given by Cayley tables and their right actions on finite sets.
//!
//! Products are written to the right: `cayley[g][h]` is the index of `g·h`, and
//! a right action satisfies `φ(gh) = (φg)h`.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of a group element in its group's element list.
pub type ElementId = usize;
/// Index of a point of the set being acted on.
pub type PointId = usize;

/// One letter of a word over generating subgroups: `(subgroup id, element)`.
pub type Letter = (usize, ElementId);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    cayley: Vec<Vec<ElementId>>,
    identity: ElementId,
    inverses: Vec<ElementId>,
}

impl FiniteGroup {
    /// Builds a group from a multiplication table, checking the group axioms
    /// exhaustively.
    pub fn from_cayley(names: Vec<String>, cayley: Vec<Vec<ElementId>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidGroup("group has no elements".into()));
        }
        if cayley.len() != n || cayley.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGroup(format!("cayley table is not {n}x{n}")));
        }
        if let Some(bad) = cayley.iter().flatten().find(|&&x| x >= n) {
            return Err(Error::InvalidGroup(format!("cayley entry {bad} out of range")));
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name) {
                return Err(Error::InvalidGroup(format!("duplicate element name `{name}`")));
            }
        }
        // Latin square
        for i in 0..n {
            if !is_permutation(&cayley[i]) {
                return Err(Error::InvalidGroup(format!("row `{}` is not a permutation", names[i])));
            }
            let column: Vec<usize> = (0..n).map(|r| cayley[r][i]).collect();
            if !is_permutation(&column) {
                return Err(Error::InvalidGroup(format!("column `{}` is not a permutation", names[i])));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| cayley[e][g] == g && cayley[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                let ab = cayley[a][b];
                for c in 0..n {
                    if cayley[ab][c] != cayley[a][cayley[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails for ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| cayley[g][h] == identity && cayley[h][g] == identity)
                    .expect("latin square with identity has inverses")
            })
            .collect();
        Ok(FiniteGroup { names, cayley, identity, inverses })
    }

    /// Closes a set of permutations of `0..degree` under composition
    /// (`(p·q)[i] = q[p[i]]`, i.e. `p` acts first). Elements are ordered with
    /// the generators first, in the order given, followed by new elements in
    /// breadth-first discovery order.
    pub fn close_permutations(generators: &[Vec<PointId>]) -> (Vec<Vec<PointId>>, Vec<Vec<ElementId>>) {
        let degree = generators.first().map_or(0, Vec::len);
        let mut elems: Vec<Vec<PointId>> = Vec::new();
        let mut index = std::collections::HashMap::new();
        for g in generators {
            if !index.contains_key(g) {
                index.insert(g.clone(), elems.len());
                elems.push(g.clone());
            }
        }
        let ident: Vec<PointId> = (0..degree).collect();
        if !index.contains_key(&ident) {
            index.insert(ident.clone(), elems.len());
            elems.push(ident);
        }
        let mut frontier = 0;
        while frontier < elems.len() {
            let g = elems[frontier].clone();
            for s in generators {
                let gs = compose(&g, s);
                if !index.contains_key(&gs) {
                    index.insert(gs.clone(), elems.len());
                    elems.push(gs);
                }
            }
            frontier += 1;
        }
        let cayley = elems
            .iter()
            .map(|g| elems.iter().map(|h| index[&compose(g, h)]).collect())
            .collect();
        (elems, cayley)
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> ElementId {
        self.identity
    }

    pub fn mul(&self, g: ElementId, h: ElementId) -> ElementId {
        self.cayley[g][h]
    }

    pub fn inv(&self, g: ElementId) -> ElementId {
        self.inverses[g]
    }

    pub fn name(&self, g: ElementId) -> &str {
        &self.names[g]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cayley(&self) -> &[Vec<ElementId>] {
        &self.cayley
    }

    pub fn index_of(&self, name: &str) -> Option<ElementId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn elements(&self) -> std::ops::Range<ElementId> {
        0..self.order()
    }

    /// Product of a word, left to right.
    pub fn product(&self, word: impl IntoIterator<Item = ElementId>) -> ElementId {
        word.into_iter().fold(self.identity, |acc, g| self.mul(acc, g))
    }

    /// True when `set` is nonempty and closed under products and inverses.
    pub fn is_subgroup(&self, set: &[ElementId]) -> bool {
        if set.is_empty() {
            return false;
        }
        let members: BTreeSet<_> = set.iter().copied().collect();
        members.iter().all(|&g| {
            members.contains(&self.inv(g)) && members.iter().all(|&h| members.contains(&self.mul(g, h)))
        })
    }

    /// Subgroup generated by `generators`, as a sorted element list.
    pub fn closure(&self, generators: &[ElementId]) -> Vec<ElementId> {
        let mut members = BTreeSet::from([self.identity]);
        let mut queue: VecDeque<ElementId> = VecDeque::from([self.identity]);
        while let Some(g) = queue.pop_front() {
            for &s in generators {
                let gs = self.mul(g, s);
                if members.insert(gs) {
                    queue.push_back(gs);
                }
            }
        }
        members.into_iter().collect()
    }
}

/// Composition where `p` acts first: `(p·q)[i] = q[p[i]]`.
pub fn compose(p: &[PointId], q: &[PointId]) -> Vec<PointId> {
    p.iter().map(|&i| q[i]).collect()
}

pub fn invert(p: &[PointId]) -> Vec<PointId> {
    let mut out = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        out[j] = i;
    }
    out
}

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Whether `blocks` are disjoint and cover exactly `0..n`.
pub fn is_partition(blocks: &[Vec<PointId>], n: usize) -> bool {
    let mut seen = vec![false; n];
    for &p in blocks.iter().flatten() {
        if p >= n || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    seen.into_iter().all(|s| s)
}

/// A right action of (a subgroup of) a finite group on `0..point_count()`.
pub trait PermutationAction {
    fn group(&self) -> &FiniteGroup;
    fn point_count(&self) -> usize;
    /// Elements that act; a subgroup of `group()`.
    fn acting_elements(&self) -> Vec<ElementId>;
    /// `φ·g`
    fn image(&self, point: PointId, g: ElementId) -> PointId;

    /// Orbit partition of `domain` under `subgroup`. Blocks are sorted and
    /// listed by their smallest point.
    fn orbits(&self, subgroup: &[ElementId], domain: &[PointId]) -> Result<Vec<Vec<PointId>>> {
        if !self.group().is_subgroup(subgroup) {
            return Err(Error::NotASubgroup(format!("{subgroup:?}")));
        }
        let acting: BTreeSet<_> = self.acting_elements().into_iter().collect();
        if let Some(g) = subgroup.iter().find(|g| !acting.contains(g)) {
            return Err(Error::InvalidArgument(format!(
                "element `{}` does not act on this set",
                self.group().name(*g)
            )));
        }
        let domain_set: BTreeSet<_> = domain.iter().copied().collect();
        let mut assigned = BTreeSet::new();
        let mut blocks = Vec::new();
        for &start in &domain_set {
            if assigned.contains(&start) {
                continue;
            }
            let mut block = BTreeSet::from([start]);
            let mut queue = VecDeque::from([start]);
            while let Some(p) = queue.pop_front() {
                for &g in subgroup {
                    let q = self.image(p, g);
                    if !domain_set.contains(&q) {
                        return Err(Error::InvalidArgument(format!(
                            "domain is not invariant: point {p} maps outside under `{}`",
                            self.group().name(g)
                        )));
                    }
                    if block.insert(q) {
                        queue.push_back(q);
                    }
                }
            }
            assigned.extend(block.iter().copied());
            blocks.push(block.into_iter().collect());
        }
        Ok(blocks)
    }
}

/// Right action of a whole group on a labelled point set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAction {
    group: Arc<FiniteGroup>,
    points: Vec<String>,
    perms: Vec<Vec<PointId>>,
}

impl GroupAction {
    /// `perms[g][i]` is the index of `φ_i·g`. Checks bijectivity, the identity
    /// and the right-action law over all pairs.
    pub fn new(group: Arc<FiniteGroup>, points: Vec<String>, perms: Vec<Vec<PointId>>) -> Result<Self> {
        if perms.len() != group.order() {
            return Err(Error::InvalidModel(format!(
                "{} permutations for a group of order {}",
                perms.len(),
                group.order()
            )));
        }
        for (g, p) in perms.iter().enumerate() {
            if p.len() != points.len() || !is_permutation(p) {
                return Err(Error::UnfaithfulAction {
                    element: group.name(g).to_string(),
                    reason: "action row is not a bijection of the point set".into(),
                });
            }
        }
        let action = GroupAction { group, points, perms };
        if let Some((g, h)) = action.action_law_violation() {
            return Err(Error::InvalidModel(format!(
                "right-action law fails for (`{}`, `{}`)",
                action.group.name(g),
                action.group.name(h)
            )));
        }
        if action.perms[action.group.identity()].iter().enumerate().any(|(i, &j)| i != j) {
            return Err(Error::InvalidModel("identity does not act trivially".into()));
        }
        Ok(action)
    }

    /// First pair `(g, h)` with `perm(gh) != perm(g)` followed by `perm(h)`.
    pub fn action_law_violation(&self) -> Option<(ElementId, ElementId)> {
        let g_count = self.group.order();
        for g in 0..g_count {
            for h in 0..g_count {
                let gh = self.group.mul(g, h);
                if compose(&self.perms[g], &self.perms[h]) != self.perms[gh] {
                    return Some((g, h));
                }
            }
        }
        None
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point_index(&self, name: &str) -> Option<PointId> {
        self.points.iter().position(|p| p == name)
    }

    pub fn perm(&self, g: ElementId) -> &[PointId] {
        &self.perms[g]
    }

    pub fn perms(&self) -> &[Vec<PointId>] {
        &self.perms
    }

    pub fn is_faithful(&self) -> bool {
        let distinct: BTreeSet<_> = self.perms.iter().collect();
        distinct.len() == self.perms.len()
    }

    pub fn all_points(&self) -> Vec<PointId> {
        (0..self.points.len()).collect()
    }
}

impl PermutationAction for GroupAction {
    fn group(&self) -> &FiniteGroup {
        &self.group
    }

    fn point_count(&self) -> usize {
        self.points.len()
    }

    fn acting_elements(&self) -> Vec<ElementId> {
        self.group.elements().collect()
    }

    fn image(&self, point: PointId, g: ElementId) -> PointId {
        self.perms[g][point]
    }
}

/// Shortest words for every element of the subgroup generated by `sets`.
///
/// Breadth-first search over the Cayley graph from the identity, extending
/// words on the right. Letters are tried in lexicographic `(set id, element)`
/// order and the identity is never used as a letter, so each recorded word is
/// the lexicographically smallest among the shortest ones.
pub fn shortest_words(group: &FiniteGroup, sets: &[Vec<ElementId>]) -> Vec<Option<Vec<Letter>>> {
    let mut letters: Vec<Letter> = sets
        .iter()
        .enumerate()
        .flat_map(|(sid, set)| set.iter().map(move |&g| (sid, g)))
        .filter(|&(_, g)| g != group.identity())
        .collect();
    letters.sort_unstable();
    letters.dedup();

    let mut words: Vec<Option<Vec<Letter>>> = vec![None; group.order()];
    words[group.identity()] = Some(Vec::new());
    let mut queue = VecDeque::from([group.identity()]);
    while let Some(g) = queue.pop_front() {
        let base = words[g].clone().expect("queued elements have words");
        for &(sid, s) in &letters {
            let gs = group.mul(g, s);
            if words[gs].is_none() {
                let mut w = base.clone();
                w.push((sid, s));
                words[gs] = Some(w);
                queue.push_back(gs);
            }
        }
    }
    words
}

/// A shortest word over `sets` whose product is `g`.
pub fn word_decompose(group: &FiniteGroup, g: ElementId, sets: &[Vec<ElementId>]) -> Result<Vec<Letter>> {
    for (sid, set) in sets.iter().enumerate() {
        if !group.is_subgroup(set) {
            return Err(Error::NotASubgroup(format!("generating set {sid}")));
        }
    }
    shortest_words(group, sets)[g]
        .clone()
        .ok_or_else(|| Error::NotInGeneratedSubgroup { element: group.name(g).to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> FiniteGroup {
        let names = (0..n).map(|i| format!("r{i}")).collect();
        let cayley = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        FiniteGroup::from_cayley(names, cayley).unwrap()
    }

    #[test]
    fn cyclic_group_axioms() {
        let g = cyclic(5);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.inv(2), 3);
        assert_eq!(g.closure(&[2]).len(), 5);
        assert!(g.is_subgroup(&[0]));
        assert!(!g.is_subgroup(&[0, 1]));
    }

    #[test]
    fn rejects_non_latin_table() {
        let err = FiniteGroup::from_cayley(vec!["a".into(), "b".into()], vec![vec![0, 1], vec![0, 1]]);
        assert!(matches!(err, Err(Error::InvalidGroup(_))));
    }

    #[test]
    fn rejects_non_associative_latin_square() {
        // A loop of order 5 that is not a group.
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let names = (0..5).map(|i| format!("x{i}")).collect();
        assert!(matches!(FiniteGroup::from_cayley(names, table), Err(Error::InvalidGroup(_))));
    }

    #[test]
    fn closing_permutations_gives_s3() {
        let (elems, cayley) = FiniteGroup::close_permutations(&[vec![1, 0, 2], vec![1, 2, 0]]);
        assert_eq!(elems.len(), 6);
        let names = (0..6).map(|i| format!("g{i}")).collect();
        let g = FiniteGroup::from_cayley(names, cayley).unwrap();
        assert_eq!(g.order(), 6);
    }

    #[test]
    fn orbits_trivial_and_transitive() {
        let g = Arc::new(cyclic(4));
        let perms = (0..4).map(|r| (0..4).map(|i| (i + r) % 4).collect()).collect();
        let action = GroupAction::new(g, (0..4).map(|i| format!("p{i}")).collect(), perms).unwrap();
        let all = action.all_points();
        let singletons = action.orbits(&[0], &all).unwrap();
        assert_eq!(singletons, vec![vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(action.orbits(&[0, 1, 2, 3], &all).unwrap(), vec![vec![0, 1, 2, 3]]);
        assert_eq!(action.orbits(&[0, 2], &all).unwrap(), vec![vec![0, 2], vec![1, 3]]);
        assert!(matches!(action.orbits(&[0, 1], &all), Err(Error::NotASubgroup(_))));
    }

    #[test]
    fn action_law_is_checked() {
        let g = Arc::new(cyclic(3));
        // r1 acts as a 3-cycle but r2 is declared as the same cycle.
        let perms = vec![vec![0, 1, 2], vec![1, 2, 0], vec![1, 2, 0]];
        let err = GroupAction::new(g, vec!["a".into(), "b".into(), "c".into()], perms);
        assert!(matches!(err, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn words_are_shortest() {
        let g = cyclic(6);
        let sets = vec![vec![0, 3], vec![0, 2, 4]];
        assert_eq!(word_decompose(&g, 0, &sets).unwrap(), vec![]);
        assert_eq!(word_decompose(&g, 5, &sets).unwrap(), vec![(0, 3), (1, 2)]);
        let sub = vec![vec![0, 2, 4]];
        assert!(matches!(word_decompose(&g, 1, &sub), Err(Error::NotInGeneratedSubgroup { .. })));
    }
}

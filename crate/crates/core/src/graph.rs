//! Bipartite graphs between curated groups and content items: construction
//! from raw edge lists, degree filtering, held-out edge splitting, and
//! negative sampling.

use crate::error::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

/// Immutable bipartite adjacency between group nodes and item nodes.
///
/// Both orientations are kept: `groups_of_item[i]` lists the groups item `i`
/// belongs to and `items_of_group[c]` lists the items of group `c`. The two
/// are exact transposes and every list is sorted. Nodes may have degree zero
/// (a group can lose all its edges to a hold-out split).
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteGraph {
    groups_of_item: Vec<Vec<usize>>,
    items_of_group: Vec<Vec<usize>>,
    n_edges: usize,
}

impl BipartiteGraph {
    /// Builds a graph over fixed node counts from `(group, item)` pairs.
    /// Duplicate pairs are collapsed.
    pub fn from_edges(
        n_groups: usize,
        n_items: usize,
        edges: &[(usize, usize)],
    ) -> Result<BipartiteGraph> {
        let mut sorted: Vec<(usize, usize)> = edges.to_vec();
        sorted.sort_unstable();
        sorted.dedup();

        let mut items_of_group = vec![Vec::new(); n_groups];
        let mut groups_of_item = vec![Vec::new(); n_items];
        for &(c, i) in &sorted {
            if c >= n_groups {
                return Err(Error::IndexOutOfBounds {
                    what: "group",
                    index: c,
                    len: n_groups,
                });
            }
            if i >= n_items {
                return Err(Error::IndexOutOfBounds {
                    what: "item",
                    index: i,
                    len: n_items,
                });
            }
            items_of_group[c].push(i);
            groups_of_item[i].push(c);
        }
        for list in &mut groups_of_item {
            list.sort_unstable();
        }
        // items_of_group is already per-group sorted because `sorted` is.
        Ok(BipartiteGraph {
            groups_of_item,
            items_of_group,
            n_edges: sorted.len(),
        })
    }

    pub fn n_groups(&self) -> usize {
        self.items_of_group.len()
    }

    pub fn n_items(&self) -> usize {
        self.groups_of_item.len()
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn groups_of_item(&self, item: usize) -> &[usize] {
        &self.groups_of_item[item]
    }

    pub fn items_of_group(&self, group: usize) -> &[usize] {
        &self.items_of_group[group]
    }

    pub fn item_degree(&self, item: usize) -> usize {
        self.groups_of_item[item].len()
    }

    pub fn group_degree(&self, group: usize) -> usize {
        self.items_of_group[group].len()
    }

    pub fn has_edge(&self, group: usize, item: usize) -> bool {
        self.groups_of_item[item].binary_search(&group).is_ok()
    }

    /// All edges as `(group, item)`, ordered by item then group.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.groups_of_item
            .iter()
            .enumerate()
            .flat_map(|(i, cs)| cs.iter().map(move |&c| (c, i)))
    }
}

/// Bijection between external string ids and dense indices, for groups and
/// items. Dense indices follow first-seen order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IdVocab {
    group_ids: Vec<String>,
    item_ids: Vec<String>,
    group_index: BTreeMap<String, usize>,
    item_index: BTreeMap<String, usize>,
}

impl IdVocab {
    pub fn new() -> IdVocab {
        IdVocab::default()
    }

    pub fn intern_group(&mut self, id: &str) -> usize {
        if let Some(&idx) = self.group_index.get(id) {
            return idx;
        }
        let idx = self.group_ids.len();
        self.group_ids.push(String::from(id));
        self.group_index.insert(String::from(id), idx);
        idx
    }

    pub fn intern_item(&mut self, id: &str) -> usize {
        if let Some(&idx) = self.item_index.get(id) {
            return idx;
        }
        let idx = self.item_ids.len();
        self.item_ids.push(String::from(id));
        self.item_index.insert(String::from(id), idx);
        idx
    }

    pub fn group_index(&self, id: &str) -> Option<usize> {
        self.group_index.get(id).copied()
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.item_index.get(id).copied()
    }

    pub fn group_id(&self, idx: usize) -> &str {
        &self.group_ids[idx]
    }

    pub fn item_id(&self, idx: usize) -> &str {
        &self.item_ids[idx]
    }

    pub fn n_groups(&self) -> usize {
        self.group_ids.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_ids.len()
    }

    /// Restricts the vocabulary to the nodes kept by a filtering pass.
    pub fn remapped(&self, remap: &IndexRemap) -> IdVocab {
        let mut out = IdVocab::new();
        let mut kept_groups: Vec<(usize, &str)> = Vec::new();
        for (old, new) in remap.group_old_to_new.iter().enumerate() {
            if let Some(new) = new {
                kept_groups.push((*new, self.group_id(old)));
            }
        }
        kept_groups.sort_unstable();
        for (_, id) in kept_groups {
            out.intern_group(id);
        }
        let mut kept_items: Vec<(usize, &str)> = Vec::new();
        for (old, new) in remap.item_old_to_new.iter().enumerate() {
            if let Some(new) = new {
                kept_items.push((*new, self.item_id(old)));
            }
        }
        kept_items.sort_unstable();
        for (_, id) in kept_items {
            out.intern_item(id);
        }
        out
    }
}

/// Old-to-new index maps produced by [`filter_degrees`]; `None` marks a
/// removed node.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexRemap {
    pub group_old_to_new: Vec<Option<usize>>,
    pub item_old_to_new: Vec<Option<usize>>,
}

impl IndexRemap {
    pub fn groups_removed(&self) -> usize {
        self.group_old_to_new.iter().filter(|m| m.is_none()).count()
    }

    pub fn items_removed(&self) -> usize {
        self.item_old_to_new.iter().filter(|m| m.is_none()).count()
    }
}

/// Disjoint train/test partition of a graph's edges. `test_positives[i]`
/// holds the groups whose edge to item `i` was held out; the union of
/// `train` and the held-out edges is the source graph.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSplit {
    pub train: BipartiteGraph,
    pub test_positives: Vec<Vec<usize>>,
}

impl EdgeSplit {
    /// Rebuilds a split from a source graph and its held-out `(group, item)`
    /// edges, validating that every held-out edge exists in the source.
    pub fn from_test_edges(
        source: &BipartiteGraph,
        test_edges: &[(usize, usize)],
    ) -> Result<EdgeSplit> {
        let mut test_positives = vec![Vec::new(); source.n_items()];
        for &(c, i) in test_edges {
            if i >= source.n_items() {
                return Err(Error::IndexOutOfBounds {
                    what: "item",
                    index: i,
                    len: source.n_items(),
                });
            }
            if !source.has_edge(c, i) {
                return Err(Error::InvalidParameter {
                    what: "held-out edge not present in source graph",
                });
            }
            test_positives[i].push(c);
        }
        let mut train_edges = Vec::with_capacity(source.n_edges());
        for i in 0..source.n_items() {
            test_positives[i].sort_unstable();
            test_positives[i].dedup();
            for &c in source.groups_of_item(i) {
                if test_positives[i].binary_search(&c).is_err() {
                    train_edges.push((c, i));
                }
            }
        }
        let train = BipartiteGraph::from_edges(source.n_groups(), source.n_items(), &train_edges)?;
        Ok(EdgeSplit {
            train,
            test_positives,
        })
    }

    pub fn n_test_edges(&self) -> usize {
        self.test_positives.iter().map(|t| t.len()).sum()
    }
}

/// Builds a graph from `(group id, item id)` string pairs, assigning dense
/// indices in first-seen order and collapsing duplicate edges.
pub fn build_graph<'a, I>(edges: I) -> Result<(BipartiteGraph, IdVocab)>
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let mut vocab = IdVocab::new();
    let mut dense: Vec<(usize, usize)> = Vec::new();
    for (group, item) in edges {
        let c = vocab.intern_group(group);
        let i = vocab.intern_item(item);
        dense.push((c, i));
    }
    if dense.is_empty() {
        return Err(Error::NoEdges);
    }
    let graph = BipartiteGraph::from_edges(vocab.n_groups(), vocab.n_items(), &dense)?;
    Ok((graph, vocab))
}

/// Removes low-degree nodes in a single ordered pass: first items with
/// degree below `min_item_deg`, then groups whose degree after the item
/// removal is below `min_group_deg`. Surviving nodes are re-indexed densely.
///
/// The pass is deliberately not iterated to a fixpoint; the two removals
/// happen once, in this order.
pub fn filter_degrees(
    g: &BipartiteGraph,
    min_item_deg: usize,
    min_group_deg: usize,
) -> Result<(BipartiteGraph, IndexRemap)> {
    let keep_item: Vec<bool> = (0..g.n_items())
        .map(|i| g.item_degree(i) >= min_item_deg)
        .collect();
    let keep_group: Vec<bool> = (0..g.n_groups())
        .map(|c| {
            let deg = g
                .items_of_group(c)
                .iter()
                .filter(|&&i| keep_item[i])
                .count();
            deg >= min_group_deg
        })
        .collect();

    let mut item_old_to_new = vec![None; g.n_items()];
    let mut next = 0;
    for (i, &keep) in keep_item.iter().enumerate() {
        if keep {
            item_old_to_new[i] = Some(next);
            next += 1;
        }
    }
    let n_items_kept = next;

    let mut group_old_to_new = vec![None; g.n_groups()];
    let mut next = 0;
    for (c, &keep) in keep_group.iter().enumerate() {
        if keep {
            group_old_to_new[c] = Some(next);
            next += 1;
        }
    }
    let n_groups_kept = next;

    if n_items_kept == 0 || n_groups_kept == 0 {
        return Err(Error::FilteredEmpty);
    }

    let mut edges = Vec::new();
    for (c, i) in g.edges() {
        if let (Some(nc), Some(ni)) = (group_old_to_new[c], item_old_to_new[i]) {
            edges.push((nc, ni));
        }
    }
    let filtered = BipartiteGraph::from_edges(n_groups_kept, n_items_kept, &edges)?;
    Ok((
        filtered,
        IndexRemap {
            group_old_to_new,
            item_old_to_new,
        },
    ))
}

/// Holds out test edges per item: one edge when the item's degree is below
/// ten, otherwise `floor(test_fraction * degree)`, chosen uniformly without
/// replacement. Deterministic for a fixed seed.
pub fn split_edges(g: &BipartiteGraph, test_fraction: f64, seed: u64) -> Result<EdgeSplit> {
    use rand::SeedableRng;

    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParameter {
            what: "test_fraction must be in (0, 1)",
        });
    }
    for i in 0..g.n_items() {
        let d = g.item_degree(i);
        if d < 2 {
            return Err(Error::DegreeTooLow {
                item: i,
                degree: d,
                min: 2,
            });
        }
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut test_positives = vec![Vec::new(); g.n_items()];
    let mut train_edges = Vec::with_capacity(g.n_edges());
    for i in 0..g.n_items() {
        let linked = g.groups_of_item(i);
        let d = linked.len();
        let n_test = if d < 10 {
            1
        } else {
            ((test_fraction * d as f64) as usize).min(d - 1)
        };
        let chosen = rand::seq::index::sample(&mut rng, d, n_test);
        let mut held: Vec<usize> = chosen.iter().map(|pos| linked[pos]).collect();
        held.sort_unstable();
        for &c in linked {
            if held.binary_search(&c).is_err() {
                train_edges.push((c, i));
            }
        }
        test_positives[i] = held;
    }
    let train = BipartiteGraph::from_edges(g.n_groups(), g.n_items(), &train_edges)?;
    Ok(EdgeSplit {
        train,
        test_positives,
    })
}

/// Draws a group not linked to `item`, uniformly over the non-linked groups.
///
/// Uses rejection sampling while the linked set is sparse and falls back to
/// enumerating the complement once the item is linked to more than half of
/// all groups.
pub fn sample_negative_group<R: Rng + ?Sized>(
    g: &BipartiteGraph,
    item: usize,
    rng: &mut R,
) -> Result<usize> {
    let linked = g.groups_of_item(item);
    let n = g.n_groups();
    if linked.len() >= n {
        return Err(Error::NoNegative { item });
    }
    if linked.len() * 2 > n {
        let mut complement = Vec::with_capacity(n - linked.len());
        let mut next_linked = linked.iter().peekable();
        for c in 0..n {
            match next_linked.peek() {
                Some(&&l) if l == c => {
                    next_linked.next();
                }
                _ => complement.push(c),
            }
        }
        return Ok(complement[rng.random_range(0..complement.len())]);
    }
    loop {
        let c = rng.random_range(0..n);
        if linked.binary_search(&c).is_err() {
            return Ok(c);
        }
    }
}

/// Exact degree-frequency tables, `(per-item, per-group)`, mapping a degree
/// to the number of nodes with that degree.
pub fn degree_histogram(
    g: &BipartiteGraph,
) -> (BTreeMap<usize, usize>, BTreeMap<usize, usize>) {
    let mut items = BTreeMap::new();
    for i in 0..g.n_items() {
        *items.entry(g.item_degree(i)).or_insert(0) += 1;
    }
    let mut groups = BTreeMap::new();
    for c in 0..g.n_groups() {
        *groups.entry(g.group_degree(c)).or_insert(0) += 1;
    }
    (items, groups)
}

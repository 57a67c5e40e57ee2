//! Brute-force references used to check the schedulers: exhaustive optimal
//! lifetime over battery states, exhaustive reliable-subset scans, and the
//! conflict-graph / maximum-independent-set construction for unit life spans.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::energy::{classify, energy_delta, Jammer, JammerKind};
use crate::error::{Error, Result};
use crate::geometry::WorldModel;
use crate::sinr::{mask_ids, ConstraintTable, NetworkConfig};

/// Largest network the subset scans accept.
pub const SUBSET_SCAN_LIMIT: usize = 20;
pub const DEFAULT_STATE_CAP: usize = 2_000_000;
pub const MIS_VERTEX_LIMIT: usize = 512;

fn check_scan_size(n: usize) -> Result<()> {
    if n > SUBSET_SCAN_LIMIT {
        return Err(Error::Resource(format!(
            "{n} jammers exceed the subset-scan limit of {SUBSET_SCAN_LIMIT}"
        )));
    }
    Ok(())
}

/// Every non-empty reliable subset as a bitmask, in increasing mask order.
pub fn reliable_masks(table: &ConstraintTable) -> Result<Vec<u64>> {
    let n = table.jammer_count();
    check_scan_size(n)?;
    Ok((1u64..1u64 << n).filter(|&m| table.is_reliable_mask(m)).collect())
}

/// Every non-empty reliable subset of the world's jammers, sorted lexicographically.
pub fn enumerate_reliable_subsets(world: &WorldModel, cfg: &NetworkConfig) -> Result<Vec<Vec<usize>>> {
    let table = ConstraintTable::new(world, cfg);
    let mut sets: Vec<Vec<usize>> = reliable_masks(&table)?.into_iter().map(mask_ids).collect();
    sets.sort();
    Ok(sets)
}

/// Reliable sets with no reliable proper subset, found by checking every
/// subset of every reliable set rather than single deletions.
pub fn minimal_reliable_sets_by_scan(world: &WorldModel, cfg: &NetworkConfig) -> Result<Vec<Vec<usize>>> {
    let table = ConstraintTable::new(world, cfg);
    let reliable: HashSet<u64> = reliable_masks(&table)?.into_iter().collect();
    let mut minimal: Vec<Vec<usize>> = reliable
        .iter()
        .filter(|&&m| {
            let mut sub = (m - 1) & m;
            while sub != 0 {
                if reliable.contains(&sub) {
                    return false;
                }
                sub = (sub - 1) & m;
            }
            true
        })
        .map(|&m| mask_ids(m))
        .collect();
    minimal.sort();
    Ok(minimal)
}

/// The smallest slot delta over all reliable sets of usable jammers, with the
/// lexicographically first set reaching it. `None` when no such set exists.
pub fn min_delta_by_enumeration(
    jammers: &[Jammer],
    table: &ConstraintTable,
    c: u32,
) -> Result<Option<(i64, Vec<usize>)>> {
    let cls = classify(jammers, c);
    let alive = cls.alive();
    check_scan_size(alive.len())?;
    let mut best: Option<(i64, Vec<usize>)> = None;
    for m in 1u64..1u64 << alive.len() {
        let set: Vec<usize> = mask_ids(m).into_iter().map(|k| alive[k]).collect();
        if !table.is_reliable(&set)? {
            continue;
        }
        let delta = energy_delta(&set, &cls, c)?;
        let better = match &best {
            None => true,
            Some((d, s)) => delta < *d || (delta == *d && set < *s),
        };
        if better {
            best = Some((delta, set));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OracleLifetime {
    Finite(u64),
    /// Some reachable cycle of reliable slots repeats forever.
    Unbounded,
}

impl OracleLifetime {
    fn plus_one(self) -> Self {
        match self {
            Self::Finite(v) => Self::Finite(v + 1),
            Self::Unbounded => Self::Unbounded,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Unbounded => None,
        }
    }
}

/// Batteries of interchangeable jammers (same position, kind and capacity)
/// are sorted within their group, which maps permuted states to one key.
struct Canonicalizer {
    groups: Vec<Vec<usize>>,
}

impl Canonicalizer {
    fn new(jammers: &[Jammer]) -> Self {
        let mut index: HashMap<(u64, u64, JammerKind, u32), usize> = HashMap::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for j in jammers {
            let key = (j.position.x.to_bits(), j.position.y.to_bits(), j.kind, j.capacity);
            let g = *index.entry(key).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(j.id);
        }
        Self { groups }
    }

    fn apply(&self, state: &mut [u32]) {
        for g in self.groups.iter().filter(|g| g.len() > 1) {
            let mut levels: Vec<u32> = g.iter().map(|&i| state[i]).collect();
            levels.sort_unstable();
            for (&i, v) in g.iter().zip(levels) {
                state[i] = v;
            }
        }
    }
}

struct Frame {
    state: Vec<u32>,
    moves: Vec<u64>,
    next: usize,
    best: OracleLifetime,
}

/// Exact optimum over all schedules by memoized depth-first search on
/// battery states. The value of a state is zero when no affordable reliable
/// set exists, else one plus the best successor. Reaching a state that is
/// still on the search path means a repeatable cycle, reported as unbounded.
pub fn exhaustive_optimal_lifetime(
    world: &WorldModel,
    cfg: &NetworkConfig,
    state_cap: usize,
) -> Result<OracleLifetime> {
    cfg.validate()?;
    let table = ConstraintTable::new(world, cfg);
    let reliable = reliable_masks(&table)?;
    let c = cfg.c;
    let rechargeable: Vec<bool> = world.jammers.iter().map(Jammer::is_rechargeable).collect();
    let capacity: Vec<u32> = world.jammers.iter().map(|j| j.capacity).collect();
    let canon = Canonicalizer::new(&world.jammers);

    let moves_from = |state: &[u32]| -> Vec<u64> {
        let alive = state
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= c)
            .fold(0u64, |m, (i, _)| m | 1 << i);
        reliable.iter().copied().filter(|&m| m & !alive == 0).collect()
    };
    let step = |state: &[u32], mask: u64| -> Vec<u32> {
        let mut next: Vec<u32> = state
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                if mask >> i & 1 == 1 {
                    b - c
                } else if rechargeable[i] && b < capacity[i] {
                    b + 1
                } else {
                    b
                }
            })
            .collect();
        canon.apply(&mut next);
        next
    };

    let mut memo: HashMap<Vec<u32>, OracleLifetime> = HashMap::new();
    let mut on_path: HashSet<Vec<u32>> = HashSet::new();
    let mut root: Vec<u32> = world.jammers.iter().map(|j| j.battery).collect();
    canon.apply(&mut root);
    on_path.insert(root.clone());
    let mut stack = vec![Frame {
        moves: moves_from(&root),
        state: root,
        next: 0,
        best: OracleLifetime::Finite(0),
    }];

    loop {
        let top = stack.last_mut().expect("search stack is never empty here");
        if top.next < top.moves.len() && top.best != OracleLifetime::Unbounded {
            let child = step(&top.state, top.moves[top.next]);
            top.next += 1;
            if let Some(&v) = memo.get(&child) {
                top.best = top.best.max(v.plus_one());
            } else if on_path.contains(&child) {
                top.best = OracleLifetime::Unbounded;
            } else {
                if memo.len() + stack.len() >= state_cap {
                    return Err(Error::Resource(format!("exhaustive search exceeded {state_cap} states")));
                }
                on_path.insert(child.clone());
                stack.push(Frame {
                    moves: moves_from(&child),
                    state: child,
                    next: 0,
                    best: OracleLifetime::Finite(0),
                });
            }
            continue;
        }
        let done = stack.pop().expect("checked above");
        on_path.remove(&done.state);
        match stack.last_mut() {
            Some(parent) => parent.best = parent.best.max(done.best.plus_one()),
            None => return Ok(done.best),
        }
        memo.insert(done.state, done.best);
    }
}

/// Vertices are jammer sets; two distinct sets are adjacent when they share a jammer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictGraph {
    pub vertices: Vec<Vec<usize>>,
    /// Pairs `(i, j)` with `i < j`, in lexicographic order.
    pub edges: Vec<(usize, usize)>,
}

impl ConflictGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

pub fn build_conflict_graph(sets: &[Vec<usize>]) -> ConflictGraph {
    let as_sets: Vec<HashSet<usize>> = sets.iter().map(|s| s.iter().copied().collect()).collect();
    let mut edges = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if !as_sets[i].is_disjoint(&as_sets[j]) {
                edges.push((i, j));
            }
        }
    }
    ConflictGraph {
        vertices: sets.to_vec(),
        edges,
    }
}

type Bits = Vec<u64>;

fn bit_count(b: &Bits) -> usize {
    b.iter().map(|w| w.count_ones() as usize).sum()
}

fn bits_iter(b: &Bits) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(w * 64 + i)
        })
    })
}

fn intersection_count(a: &Bits, b: &Bits) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

fn without(a: &Bits, b: &Bits) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & !y).collect()
}

/// Exact maximum independent set size by branch and bound on bitsets.
/// Vertices of degree at most one among the candidates are taken without
/// branching; otherwise the highest-degree vertex is branched on.
pub fn max_independent_set(g: &ConflictGraph) -> Result<usize> {
    let n = g.vertex_count();
    if n > MIS_VERTEX_LIMIT {
        return Err(Error::Resource(format!(
            "{n} vertices exceed the independent-set limit of {MIS_VERTEX_LIMIT}"
        )));
    }
    let words = n.div_ceil(64).max(1);
    // Closed neighbourhoods.
    let mut closed: Vec<Bits> = (0..n)
        .map(|v| {
            let mut b = vec![0u64; words];
            b[v / 64] |= 1 << (v % 64);
            b
        })
        .collect();
    for &(i, j) in &g.edges {
        closed[i][j / 64] |= 1 << (j % 64);
        closed[j][i / 64] |= 1 << (i % 64);
    }
    let mut all = vec![0u64; words];
    for v in 0..n {
        all[v / 64] |= 1 << (v % 64);
    }
    let mut best = 0;
    mis_search(&closed, all, 0, &mut best);
    Ok(best)
}

fn mis_search(closed: &[Bits], mut candidates: Bits, mut size: usize, best: &mut usize) {
    loop {
        if size + bit_count(&candidates) <= *best {
            return;
        }
        let mut forced = None;
        let mut pivot: Option<(usize, usize)> = None;
        for v in bits_iter(&candidates) {
            let degree = intersection_count(&closed[v], &candidates) - 1;
            if degree <= 1 {
                forced = Some(v);
                break;
            }
            if pivot.is_none_or(|(_, d)| degree > d) {
                pivot = Some((v, degree));
            }
        }
        if let Some(v) = forced {
            candidates = without(&candidates, &closed[v]);
            size += 1;
            continue;
        }
        let Some((v, _)) = pivot else {
            *best = (*best).max(size);
            return;
        };
        mis_search(closed, without(&candidates, &closed[v]), size + 1, best);
        let mut rest = candidates;
        rest[v / 64] &= !(1 << (v % 64));
        candidates = rest;
    }
}

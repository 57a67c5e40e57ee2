//! Minimum-reliable-set scheduling for networks of unrechargeable jammers.
//!
//! Every reliable set contains a minimal one, and swapping a slot's set for a
//! minimal subset never hurts a battery. An optimal schedule therefore only
//! uses minimal sets, and choosing how often to use each one is a small
//! integer program over the per-jammer life spans.

use serde::{Deserialize, Serialize};

use crate::energy::JammerKind;
use crate::error::{Error, Result};
use crate::geometry::WorldModel;
use crate::ilp::{solve_ilp, LinearModel, Relation, Sense, SolveStatus};
use crate::schedule::{replay, Schedule, Termination};
use crate::sinr::{active_count_bounds, mask_ids, ConstraintTable, NetworkConfig};

/// Largest network enumerated without an explicit cap on the number of sets.
pub const ENUMERATION_LIMIT: usize = 20;

/// Reliable sets none of whose proper subsets is reliable, sorted lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimumReliableSet {
    pub solutions: Vec<Vec<usize>>,
    /// Set when enumeration stopped at the cap; schedules built from a
    /// truncated family are feasible but possibly shorter than optimal.
    pub truncated: bool,
}

impl MinimumReliableSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// Next larger integer with the same number of set bits.
pub(crate) fn next_combination(v: u64) -> Option<u64> {
    let t = v | (v - 1);
    let next = t.checked_add(1)?;
    Some(next | (((!t & next) - 1) >> (v.trailing_zeros() + 1)))
}

/// Enumerates minimal reliable sets by increasing cardinality inside the
/// active-count bounds. A reliable set is minimal exactly when each
/// single-jammer deletion is unreliable, because deleting jammers can only
/// relieve the storage constraint and only weaken the fence constraint.
pub fn enumerate_minimum_reliable_sets(
    world: &WorldModel,
    cfg: &NetworkConfig,
    size_cap: Option<usize>,
) -> Result<MinimumReliableSet> {
    let n = world.len();
    if n == 0 {
        return Ok(MinimumReliableSet::default());
    }
    if n > 64 || (size_cap.is_none() && n > ENUMERATION_LIMIT) {
        return Err(Error::Resource(format!(
            "{n} jammers exceed the enumeration limit of {ENUMERATION_LIMIT} without a size cap"
        )));
    }
    let table = ConstraintTable::new(world, cfg);
    let bounds = active_count_bounds(world, cfg)?;
    let mut found: Vec<u64> = Vec::new();
    let mut truncated = false;
    'outer: for k in bounds.lower.max(1)..=bounds.upper.min(n) {
        let last = if k == 64 { u64::MAX } else { ((1u64 << k) - 1) << (n - k) };
        let mut mask = (1u64 << k).wrapping_sub(1);
        if k == 64 {
            mask = u64::MAX;
        }
        loop {
            if table.is_reliable_mask(mask) && is_minimal(&table, mask) {
                if size_cap.is_some_and(|cap| found.len() >= cap) {
                    truncated = true;
                    break 'outer;
                }
                found.push(mask);
            }
            if mask == last {
                break;
            }
            mask = match next_combination(mask) {
                Some(m) => m,
                None => break,
            };
        }
    }
    let mut solutions: Vec<Vec<usize>> = found.into_iter().map(mask_ids).collect();
    solutions.sort();
    Ok(MinimumReliableSet {
        solutions,
        truncated,
    })
}

fn is_minimal(table: &ConstraintTable, mask: u64) -> bool {
    let mut rest = mask;
    while rest != 0 {
        let bit = rest & rest.wrapping_neg();
        if table.is_reliable_mask(mask & !bit) {
            return false;
        }
        rest &= rest - 1;
    }
    true
}

/// Maximize `sum n_k` subject to `sum_{k : i in M_k} n_k <= w_i` for every
/// jammer `i` used by at least one set.
pub fn build_lifespan_ilp(sets: &MinimumReliableSet, lifespans: &[u32]) -> Result<LinearModel> {
    if sets.is_empty() {
        return Err(Error::Model("the life-span program needs at least one reliable set".into()));
    }
    let top = f64::from(lifespans.iter().copied().max().unwrap_or(0));
    let mut model = LinearModel::new(Sense::Maximize);
    for k in 0..sets.len() {
        let v = model.add_variable(format!("n{}", k + 1), 0.0, top, true);
        model.set_objective_coefficient(v, 1.0);
    }
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; lifespans.len()];
    for (k, set) in sets.solutions.iter().enumerate() {
        for &id in set {
            let row = rows
                .get_mut(id)
                .ok_or(Error::UnknownJammer(id))?
                .get_or_insert_with(|| vec![0.0; sets.len()]);
            row[k] = 1.0;
        }
    }
    for (id, row) in rows.into_iter().enumerate() {
        if let Some(row) = row {
            model.add_constraint(row, Relation::Le, f64::from(lifespans[id]));
        }
    }
    Ok(model)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrsSolution {
    /// How many slots each minimal set is active, in the family's order.
    pub multiplicities: Vec<u64>,
    pub lifetime: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrsPlan {
    pub sets: MinimumReliableSet,
    pub solution: MrsSolution,
    pub schedule: Schedule,
}

/// Enumerates the minimal family, solves the life-span program exactly and
/// expands it into slots (all copies of the first set, then the second, ...).
/// The schedule is replayed against the battery ledger before it is returned.
pub fn mrs_plan(world: &WorldModel, cfg: &NetworkConfig) -> Result<MrsPlan> {
    cfg.validate()?;
    if let Some(j) = world.jammers.iter().find(|j| j.kind == JammerKind::Rechargeable) {
        return Err(Error::UnsupportedMode(format!(
            "minimum-reliable-set scheduling covers unrechargeable networks only; jammer {} is rechargeable",
            j.id
        )));
    }
    let sets = enumerate_minimum_reliable_sets(world, cfg, None)?;
    if sets.is_empty() {
        return Ok(MrsPlan {
            sets,
            solution: MrsSolution {
                multiplicities: Vec::new(),
                lifetime: 0,
            },
            schedule: Schedule::empty(&world.jammers),
        });
    }
    let lifespans: Vec<u32> = world.jammers.iter().map(|j| j.life_span(cfg.c)).collect();
    let model = build_lifespan_ilp(&sets, &lifespans)?;
    let result = solve_ilp(&model)?;
    if result.status != SolveStatus::Optimal {
        return Err(Error::Invariant(format!("life-span program returned {:?}", result.status)));
    }
    let multiplicities: Vec<u64> = result.values.iter().map(|v| v.round() as u64).collect();

    let mut slots = Vec::new();
    for (set, &count) in sets.solutions.iter().zip(&multiplicities) {
        for _ in 0..count {
            slots.push(set.clone());
        }
    }
    let table = ConstraintTable::new(world, cfg);
    let trace = replay(&world.jammers, &slots, None, &table, cfg.c)?;
    let mut schedule = Schedule::empty(&world.jammers);
    let mut before = world.jammers.as_slice();
    for (slot, after) in slots.into_iter().zip(&trace) {
        let delta = crate::energy::total_battery(before) - crate::energy::total_battery(after);
        schedule.push(slot, delta, after);
        before = after;
    }
    schedule.termination = Termination::Dead;
    Ok(MrsPlan {
        solution: MrsSolution {
            lifetime: multiplicities.iter().sum(),
            multiplicities,
        },
        sets,
        schedule,
    })
}

pub fn mrs_schedule(world: &WorldModel, cfg: &NetworkConfig) -> Result<Schedule> {
    Ok(mrs_plan(world, cfg)?.schedule)
}

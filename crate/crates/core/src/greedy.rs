//! Slot-by-slot greedy scheduling: each slot activates the reliable set of
//! usable jammers with the smallest energy delta, found by an exact integer
//! program over one binary per usable jammer.

use std::collections::HashMap;

use crate::energy::{apply_slot, classify, energy_delta, total_battery, Classification};
use crate::error::{Error, Result};
use crate::geometry::WorldModel;
use crate::ilp::{solve_ilp_with, IlpOptions, LinearModel, Relation, Sense};
use crate::schedule::{Schedule, Termination};
use crate::sinr::{ConstraintTable, NetworkConfig};

pub const DEFAULT_MAX_SLOTS: usize = 100_000;

#[derive(Debug, Clone, Copy)]
pub struct GreedyOptions {
    /// Hard stop; networks with enough rechargeable jammers can live forever.
    pub max_slots: usize,
    /// Among minimum-delta sets, pick one with the smallest sum of id ranks.
    pub prefer_low_ids: bool,
    pub ilp: IlpOptions,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self {
            max_slots: DEFAULT_MAX_SLOTS,
            prefer_low_ids: false,
            ilp: IlpOptions::default(),
        }
    }
}

/// One slot's integer program and the jammer behind each of its variables.
#[derive(Debug, Clone)]
pub struct SlotModel {
    pub model: LinearModel,
    pub jammer_ids: Vec<usize>,
}

impl SlotModel {
    /// Jammer ids of the variables set to one in `values`.
    pub fn selection(&self, values: &[f64]) -> Vec<usize> {
        values
            .iter()
            .zip(&self.jammer_ids)
            .filter(|(v, _)| v.round() != 0.0)
            .map(|(_, &id)| id)
            .collect()
    }
}

/// Builds the slot program for the current battery state of `world`.
pub fn build_slot_ilp(world: &WorldModel, cfg: &NetworkConfig) -> Result<SlotModel> {
    cfg.validate()?;
    let table = ConstraintTable::new(world, cfg);
    let cls = classify(&world.jammers, cfg.c);
    Ok(slot_model(&table, &cls, cfg.c, false))
}

/// Rows are scaled so every right-hand side is one. Dead jammers get no variable.
pub fn slot_model(table: &ConstraintTable, cls: &Classification, c: u32, prefer_low_ids: bool) -> SlotModel {
    let objective = cls.objective(c);
    let jammer_ids = cls.alive();
    let rank_total = (jammer_ids.len() * (jammer_ids.len() + 1) / 2) as f64;
    let scale = if prefer_low_ids { rank_total + 1.0 } else { 1.0 };

    let mut model = LinearModel::new(Sense::Minimize);
    for (rank, &id) in jammer_ids.iter().enumerate() {
        let v = model.add_binary(format!("x{id}"));
        let cost = objective.coefficients[id].expect("alive jammers have a coefficient") as f64;
        let tie = if prefer_low_ids { (rank + 1) as f64 } else { 0.0 };
        model.set_objective_coefficient(v, cost * scale + tie);
    }
    model.objective.constant = objective.constant as f64 * scale;

    add_reliability_rows(&mut model, table, &jammer_ids);
    SlotModel { model, jammer_ids }
}

/// Appends one storage row per storage point and one fence row per fence
/// point, with variable `k` standing for jammer `ids[k]`.
pub(crate) fn add_reliability_rows(model: &mut LinearModel, table: &ConstraintTable, ids: &[usize]) {
    let limit = table.storage_limit();
    for s in 0..table.storage_points().len() {
        let row = table.storage_row(s);
        let coefficients = ids.iter().map(|&id| row[id] / limit).collect();
        model.add_constraint(coefficients, Relation::Le, 1.0);
    }
    for (p, &required) in table.fence_required().iter().enumerate() {
        let row = table.fence_row(p);
        let coefficients = ids.iter().map(|&id| row[id] / required).collect();
        model.add_constraint(coefficients, Relation::Ge, 1.0);
    }
}

/// Exact optimum of a slot program whose activation costs are all `c` or
/// `c + 1`, found through the set size.
///
/// A smallest reliable set, of size `k`, costs at most `(c + 1) k`, and any
/// larger set costs at least `c (k + 1)`. When `k < c` the optimum therefore
/// has exactly `k` members, and among those it has the fewest `c + 1`
/// members. Both stages have objectives with unit spacing, whose relaxation
/// bounds round up sharply, while the mixed costs of the full program do
/// not. Falls back to the full program when `k >= c`.
///
/// `smallest` caches the first stage, which depends only on the usable ids.
fn solve_by_cardinality(
    slot: &SlotModel,
    c: u32,
    options: &IlpOptions,
    smallest: &mut HashMap<Vec<usize>, Option<(f64, Vec<f64>)>>,
) -> Result<Option<Vec<f64>>> {
    let model = &slot.model;
    let c = f64::from(c);
    let sized = match smallest.get(&slot.jammer_ids) {
        Some(known) => known.clone(),
        None => {
            let mut sizing = model.clone();
            sizing.objective.coefficients = vec![1.0; model.num_variables()];
            sizing.objective.constant = 0.0;
            let s = solve_ilp_with(&sizing, options)?;
            let sized = s.has_point().then_some((s.objective_value.round(), s.values));
            smallest.insert(slot.jammer_ids.clone(), sized.clone());
            sized
        }
    };
    let Some((k, values)) = sized else {
        return Ok(None);
    };
    let surcharge: Vec<f64> = model.objective.coefficients.iter().map(|&a| a - c).collect();
    if k >= c || surcharge.iter().any(|&s| s != 0.0 && s != 1.0) {
        let full = solve_ilp_with(model, options)?;
        return Ok(full.has_point().then_some(full.values));
    }
    if surcharge.iter().all(|&s| s == 0.0) {
        return Ok(Some(values));
    }
    let mut refine = model.clone();
    refine.objective.coefficients = surcharge;
    refine.objective.constant = 0.0;
    refine.add_constraint(vec![1.0; model.num_variables()], Relation::Eq, k);
    let best = solve_ilp_with(&refine, options)?;
    if !best.has_point() {
        return Err(Error::Invariant("size-constrained slot program lost its feasible point".into()));
    }
    Ok(Some(best.values))
}

pub fn greedy_schedule(world: &WorldModel, cfg: &NetworkConfig, max_slots: usize) -> Result<Schedule> {
    greedy_schedule_with(
        world,
        cfg,
        &GreedyOptions {
            max_slots,
            ..GreedyOptions::default()
        },
    )
}

/// Runs slots until no reliable set of usable jammers exists or the cap is
/// hit. A solver failure is returned as [`Error::Interrupted`] carrying the
/// slots completed before it.
pub fn greedy_schedule_with(world: &WorldModel, cfg: &NetworkConfig, options: &GreedyOptions) -> Result<Schedule> {
    cfg.validate()?;
    if options.max_slots == 0 {
        return Err(Error::Parameter("max_slots must be at least 1".into()));
    }
    let table = ConstraintTable::new(world, cfg);
    let mut state = world.jammers.clone();
    let mut schedule = Schedule::empty(&state);
    let interrupted = |schedule: &Schedule, source: Error| Error::Interrupted {
        partial: Box::new(schedule.clone()),
        source: Box::new(source),
    };

    // The slot program depends only on the usable ids and their costs. These
    // repeat for long stretches, and cyclically once recharging settles, so
    // solutions are memoized on that pair.
    let mut solved: HashMap<(Vec<usize>, Vec<u64>), Option<Vec<f64>>> = HashMap::new();
    let mut smallest = HashMap::new();

    loop {
        if schedule.lifetime >= options.max_slots {
            schedule.termination = Termination::SlotCapReached;
            return Ok(schedule);
        }
        let cls = classify(&state, cfg.c);
        let slot = slot_model(&table, &cls, cfg.c, options.prefer_low_ids);
        if slot.jammer_ids.is_empty() {
            break;
        }
        let key = (
            slot.jammer_ids.clone(),
            slot.model.objective.coefficients.iter().map(|c| c.to_bits()).collect(),
        );
        let values = match solved.get(&key) {
            Some(values) => values.clone(),
            None => {
                let values = if options.prefer_low_ids {
                    let solution = solve_ilp_with(&slot.model, &options.ilp);
                    solution.map(|s| s.has_point().then_some(s.values))
                } else {
                    solve_by_cardinality(&slot, cfg.c, &options.ilp, &mut smallest)
                }
                .map_err(|e| interrupted(&schedule, e))?;
                solved.insert(key, values.clone());
                values
            }
        };
        let Some(values) = values else {
            break;
        };
        let selection = slot.selection(&values);
        let step = || -> Result<(i64, Vec<_>)> {
            if !table.is_reliable(&selection)? {
                return Err(Error::Invariant(format!(
                    "slot program selected the unreliable set {selection:?}"
                )));
            }
            let delta = energy_delta(&selection, &cls, cfg.c)?;
            let next = apply_slot(&state, &selection, cfg.c)?;
            let drop = total_battery(&state) - total_battery(&next);
            if drop != delta {
                return Err(Error::Invariant(format!("battery drop {drop} differs from delta {delta}")));
            }
            Ok((delta, next))
        };
        let (delta, next) = step().map_err(|e| interrupted(&schedule, e))?;
        schedule.push(selection, delta, &next);
        state = next;
    }
    schedule.termination = Termination::Dead;
    Ok(schedule)
}

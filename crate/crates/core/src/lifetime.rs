//! Minimum active-jammer count, disjoint reliable subsets of rechargeable
//! jammers, the unbounded-lifetime certificate and the all-active baseline.
//!
//! A rechargeable jammer spends `c` units in an active slot and regains one
//! unit per idle slot, so a plan of `c + 1` pairwise disjoint reliable
//! rechargeable sets used in turn keeps every battery level periodic. Such a
//! plan needs at least `(c + 1) * L_jam` rechargeable jammers, where `L_jam`
//! is the size of the smallest reliable set.

use serde::{Deserialize, Serialize};

use crate::energy::{apply_slot, classify, energy_delta, Jammer};
use crate::error::{Error, Result};
use crate::geometry::WorldModel;
use crate::greedy::add_reliability_rows;
use crate::ilp::{solve_ilp, LinearModel, Sense};
use crate::schedule::{replay, Schedule, Termination};
use crate::sinr::{ConstraintTable, NetworkConfig};

/// Smallest reliable subset of `candidates`, if any.
pub fn min_cardinality_reliable_set(table: &ConstraintTable, candidates: &[usize]) -> Result<Option<Vec<usize>>> {
    if candidates.is_empty() {
        return Ok(None);
    }
    let mut model = LinearModel::new(Sense::Minimize);
    for &id in candidates {
        let v = model.add_binary(format!("x{id}"));
        model.set_objective_coefficient(v, 1.0);
    }
    add_reliability_rows(&mut model, table, candidates);
    let solution = solve_ilp(&model)?;
    if !solution.has_point() {
        return Ok(None);
    }
    let set: Vec<usize> = solution.support().into_iter().map(|k| candidates[k]).collect();
    if !table.is_reliable(&set)? {
        return Err(Error::Invariant(format!("minimum-cardinality program returned the unreliable set {set:?}")));
    }
    Ok(Some(set))
}

/// `L_jam`: the fewest jammers any reliable set can have, batteries ignored.
pub fn min_active_jammers(world: &WorldModel, cfg: &NetworkConfig) -> Result<usize> {
    let table = ConstraintTable::new(world, cfg);
    let all: Vec<usize> = (0..world.len()).collect();
    min_cardinality_reliable_set(&table, &all)?
        .map(|s| s.len())
        .ok_or(Error::NoReliableSet)
}

/// Greedy peeling over the rechargeable jammers: take a smallest reliable
/// set, remove it, repeat. Stops at `target` sets or when nothing reliable is
/// left. A short result does not prove that `target` disjoint sets are impossible.
pub fn find_disjoint_reliable_subsets(world: &WorldModel, cfg: &NetworkConfig, target: usize) -> Result<Vec<Vec<usize>>> {
    let table = ConstraintTable::new(world, cfg);
    let mut remaining: Vec<usize> = world.jammers.iter().filter(|j| j.is_rechargeable()).map(|j| j.id).collect();
    let mut found = Vec::new();
    while found.len() < target {
        let Some(set) = min_cardinality_reliable_set(&table, &remaining)? else {
            break;
        };
        remaining.retain(|id| !set.contains(id));
        found.push(set);
    }
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Cycling through `plan` (`c + 1` disjoint reliable rechargeable sets)
    /// never runs out of energy.
    Infinite { plan: Vec<Vec<usize>> },
    /// Fewer rechargeable jammers than `(c + 1) * L_jam`. `required` is `None`
    /// when no reliable set exists at all.
    FiniteNecessaryFail { rechargeable: usize, required: Option<usize> },
    /// The necessary condition holds but peeling found only `found` usable sets.
    FiniteNotFound { found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifetimeCertificate {
    pub verdict: Verdict,
    pub l_jam: Option<usize>,
}

impl LifetimeCertificate {
    pub fn is_infinite(&self) -> bool {
        matches!(self.verdict, Verdict::Infinite { .. })
    }

    /// Short label for reports.
    pub fn label(&self) -> &'static str {
        match self.verdict {
            Verdict::Infinite { .. } => "infinite",
            Verdict::FiniteNecessaryFail { .. } => "finite_necessary",
            Verdict::FiniteNotFound { .. } => "finite_not_found",
        }
    }
}

pub fn infinite_lifetime_certificate(world: &WorldModel, cfg: &NetworkConfig) -> Result<LifetimeCertificate> {
    cfg.validate()?;
    let rechargeable = world.jammers.iter().filter(|j| j.is_rechargeable()).count();
    let periods = cfg.c as usize + 1;
    let l_jam = match min_active_jammers(world, cfg) {
        Ok(l) => Some(l),
        Err(Error::NoReliableSet) => None,
        Err(e) => return Err(e),
    };
    let required = l_jam.map(|l| periods * l);
    if required.is_none_or(|r| rechargeable < r) {
        return Ok(LifetimeCertificate {
            verdict: Verdict::FiniteNecessaryFail { rechargeable, required },
            l_jam,
        });
    }
    let plan = find_disjoint_reliable_subsets(world, cfg, periods)?;
    let verdict = if plan.len() == periods && plan_is_periodic(world, cfg, &plan)? {
        Verdict::Infinite { plan }
    } else {
        Verdict::FiniteNotFound { found: plan.len() }
    };
    Ok(LifetimeCertificate { verdict, l_jam })
}

/// Slots `0..slots` of the round-robin over `plan`.
pub fn round_robin_slots(plan: &[Vec<usize>], slots: usize) -> Vec<Vec<usize>> {
    (0..slots).map(|t| plan[t % plan.len()].clone()).collect()
}

/// Runs one warm-up period and then three more, requiring every slot to be
/// affordable and reliable and the plan members' batteries to return to their
/// post-warm-up values at each period boundary.
fn plan_is_periodic(world: &WorldModel, cfg: &NetworkConfig, plan: &[Vec<usize>]) -> Result<bool> {
    let table = ConstraintTable::new(world, cfg);
    let period = plan.len();
    let slots = round_robin_slots(plan, 4 * period);
    let trace = match replay(&world.jammers, &slots, None, &table, cfg.c) {
        Ok(t) => t,
        Err(Error::DeadSelected(_)) | Err(Error::Invariant(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    let members: Vec<usize> = plan.iter().flatten().copied().collect();
    let levels = |state: &[Jammer]| members.iter().map(|&id| state[id].battery).collect::<Vec<_>>();
    let reference = levels(&trace[period - 1]);
    Ok((2..=4).all(|k| levels(&trace[k * period - 1]) == reference))
}

/// Slots survived when every usable jammer is switched on in every slot.
/// Stops early at `max_slots`.
pub fn baseline_lifetime(world: &WorldModel, cfg: &NetworkConfig, max_slots: usize) -> Result<usize> {
    Ok(baseline_schedule(world, cfg, max_slots)?.lifetime)
}

/// The all-active schedule itself; see [`baseline_lifetime`].
pub fn baseline_schedule(world: &WorldModel, cfg: &NetworkConfig, max_slots: usize) -> Result<Schedule> {
    cfg.validate()?;
    let table = ConstraintTable::new(world, cfg);
    let mut state = world.jammers.clone();
    let mut schedule = Schedule::empty(&state);
    while schedule.lifetime < max_slots {
        let cls = classify(&state, cfg.c);
        let alive = cls.alive();
        if alive.is_empty() || !table.is_reliable(&alive)? {
            return Ok(schedule);
        }
        let delta = energy_delta(&alive, &cls, cfg.c)?;
        state = apply_slot(&state, &alive, cfg.c)?;
        schedule.push(alive, delta, &state);
    }
    schedule.termination = Termination::SlotCapReached;
    Ok(schedule)
}

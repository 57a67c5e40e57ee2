use serde::{Deserialize, Serialize};

use crate::energy::{apply_slot, classify, energy_delta, total_battery, Jammer};
use crate::error::{Error, Result};
use crate::sinr::ConstraintTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// No reliable set of usable jammers remained.
    Dead,
    /// The slot cap stopped the run while reliable sets were still available.
    SlotCapReached,
}

/// A sequence of activated jammer sets, one per slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub slots: Vec<Vec<usize>>,
    pub lifetime: usize,
    pub termination: Termination,
    /// Battery level of every jammer after the last slot.
    pub final_batteries: Vec<u32>,
    /// Energy consumed minus energy harvested in each slot.
    pub slot_deltas: Vec<i64>,
}

impl Schedule {
    pub(crate) fn empty(jammers: &[Jammer]) -> Self {
        Self {
            slots: Vec::new(),
            lifetime: 0,
            termination: Termination::Dead,
            final_batteries: jammers.iter().map(|j| j.battery).collect(),
            slot_deltas: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, selection: Vec<usize>, delta: i64, after: &[Jammer]) {
        self.slots.push(selection);
        self.slot_deltas.push(delta);
        self.lifetime = self.slots.len();
        self.final_batteries = after.iter().map(|j| j.battery).collect();
    }

    /// One line per slot with the activated ids separated by spaces.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for slot in &self.slots {
            let ids: Vec<String> = slot.iter().map(usize::to_string).collect();
            out.push_str(&ids.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Replays `slots` from `start`, checking that each slot is reliable, selects
/// only usable jammers and that its reported delta matches the battery drop.
/// Returns the battery state after every slot.
pub fn replay(
    start: &[Jammer],
    slots: &[Vec<usize>],
    deltas: Option<&[i64]>,
    table: &ConstraintTable,
    c: u32,
) -> Result<Vec<Vec<Jammer>>> {
    let mut state = start.to_vec();
    let mut trace = Vec::with_capacity(slots.len());
    for (t, slot) in slots.iter().enumerate() {
        let cls = classify(&state, c);
        let delta = energy_delta(slot, &cls, c)?;
        if !table.is_reliable(slot)? {
            return Err(Error::Invariant(format!("slot {t} activates an unreliable set {slot:?}")));
        }
        let next = apply_slot(&state, slot, c)?;
        let drop = total_battery(&state) - total_battery(&next);
        if drop != delta {
            return Err(Error::Invariant(format!("slot {t}: battery drop {drop} but delta {delta}")));
        }
        if let Some(reported) = deltas.and_then(|d| d.get(t)) {
            if *reported != delta {
                return Err(Error::Invariant(format!("slot {t}: reported delta {reported}, actual {delta}")));
            }
        }
        trace.push(next.clone());
        state = next;
    }
    Ok(trace)
}

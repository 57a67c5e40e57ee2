//! Battery ledger: jammer kinds, dead/full/normal classification, the per-slot
//! energy objective and the slot state transition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JammerKind {
    Unrechargeable,
    Rechargeable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jammer {
    pub id: usize,
    pub position: Point,
    pub kind: JammerKind,
    pub battery: u32,
    pub capacity: u32,
}

impl Jammer {
    /// A fully charged jammer.
    pub fn new(id: usize, position: Point, kind: JammerKind, capacity: u32) -> Self {
        Self {
            id,
            position,
            kind,
            battery: capacity,
            capacity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.capacity == 0 {
            return Err(Error::Parameter(format!("jammer {} has zero capacity", self.id)));
        }
        if self.battery > self.capacity {
            return Err(Error::Parameter(format!(
                "jammer {} battery {} exceeds capacity {}",
                self.id, self.battery, self.capacity
            )));
        }
        Ok(())
    }

    /// Number of active slots the current battery can fund.
    pub fn life_span(&self, c: u32) -> u32 {
        self.battery / c
    }

    pub fn is_rechargeable(&self) -> bool {
        self.kind == JammerKind::Rechargeable
    }

    pub fn status(&self, c: u32) -> Status {
        if self.battery < c {
            Status::Dead
        } else if self.battery == self.capacity {
            Status::Full
        } else {
            Status::Normal
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Dead,
    Full,
    Normal,
}

/// Partition of the jammers by battery state and by kind. All lists are sorted ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Classification {
    pub dead: Vec<usize>,
    pub full: Vec<usize>,
    pub normal: Vec<usize>,
    pub unrechargeable: Vec<usize>,
    pub rechargeable: Vec<usize>,
    status: Vec<Status>,
    kinds: Vec<JammerKind>,
}

impl Classification {
    pub fn len(&self) -> usize {
        self.status.len()
    }

    pub fn is_empty(&self) -> bool {
        self.status.is_empty()
    }

    pub fn status(&self, id: usize) -> Result<Status> {
        self.status.get(id).copied().ok_or(Error::UnknownJammer(id))
    }

    pub fn kind(&self, id: usize) -> Result<JammerKind> {
        self.kinds.get(id).copied().ok_or(Error::UnknownJammer(id))
    }

    /// Ids of jammers that can fund an active slot.
    pub fn alive(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.status[i] != Status::Dead)
            .collect()
    }

    pub fn delta_form(&self) -> DeltaForm {
        match (self.unrechargeable.is_empty(), self.rechargeable.is_empty()) {
            (_, true) => DeltaForm::PureUnrechargeable,
            (true, false) => DeltaForm::PureRechargeable,
            (false, false) => DeltaForm::Hybrid,
        }
    }

    /// Per-jammer activation cost and the constant term of the slot objective.
    ///
    /// Activating an unrechargeable or a full rechargeable jammer costs `c`;
    /// activating a normal rechargeable one costs `c + 1` because it also
    /// forgoes its charging unit. The constant counts the units every idle,
    /// non-full rechargeable jammer would gain. Dead jammers have no
    /// coefficient; dead rechargeable ones still charge and enter the constant.
    pub fn objective(&self, c: u32) -> SlotObjective {
        let c = i64::from(c);
        let mut coefficients = vec![None; self.len()];
        let mut constant = 0i64;
        for i in 0..self.len() {
            let rechargeable = self.kinds[i] == JammerKind::Rechargeable;
            coefficients[i] = match (self.status[i], rechargeable) {
                (Status::Dead, true) => {
                    constant -= 1;
                    None
                }
                (Status::Dead, false) => None,
                (Status::Normal, true) => {
                    constant -= 1;
                    Some(c + 1)
                }
                (_, _) => Some(c),
            };
        }
        SlotObjective {
            coefficients,
            constant,
        }
    }
}

/// Which of the three energy-objective cases applies to a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaForm {
    PureUnrechargeable,
    PureRechargeable,
    Hybrid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotObjective {
    /// `None` for dead jammers, which may not be selected.
    pub coefficients: Vec<Option<i64>>,
    pub constant: i64,
}

pub fn classify(jammers: &[Jammer], c: u32) -> Classification {
    let mut cls = Classification::default();
    for j in jammers {
        let status = j.status(c);
        match status {
            Status::Dead => cls.dead.push(j.id),
            Status::Full => cls.full.push(j.id),
            Status::Normal => cls.normal.push(j.id),
        }
        match j.kind {
            JammerKind::Unrechargeable => cls.unrechargeable.push(j.id),
            JammerKind::Rechargeable => cls.rechargeable.push(j.id),
        }
        cls.status.push(status);
        cls.kinds.push(j.kind);
    }
    cls
}

/// Consumed-minus-gained energy of one slot in which exactly `selection` is active.
pub fn energy_delta(selection: &[usize], cls: &Classification, c: u32) -> Result<i64> {
    let objective = cls.objective(c);
    let mut delta = objective.constant;
    for &id in selection {
        match objective.coefficients.get(id) {
            None => return Err(Error::UnknownJammer(id)),
            Some(None) => return Err(Error::DeadSelected(id)),
            Some(Some(coef)) => delta += coef,
        }
    }
    Ok(delta)
}

/// Advances batteries by one slot: active jammers spend `c`, idle rechargeable
/// jammers below capacity gain one unit, everything else is unchanged.
pub fn apply_slot(jammers: &[Jammer], selection: &[usize], c: u32) -> Result<Vec<Jammer>> {
    let mut active = vec![false; jammers.len()];
    for &id in selection {
        match active.get_mut(id) {
            Some(flag) => *flag = true,
            None => return Err(Error::UnknownJammer(id)),
        }
    }
    jammers
        .iter()
        .zip(active)
        .map(|(j, is_active)| {
            let mut next = j.clone();
            if is_active {
                next.battery = j.battery.checked_sub(c).ok_or_else(|| {
                    Error::Invariant(format!(
                        "jammer {} with battery {} activated at cost {c}",
                        j.id, j.battery
                    ))
                })?;
            } else if j.is_rechargeable() && j.battery < j.capacity {
                next.battery += 1;
            }
            Ok(next)
        })
        .collect()
}

pub fn total_battery(jammers: &[Jammer]) -> i64 {
    jammers.iter().map(|j| i64::from(j.battery)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jam(id: usize, kind: JammerKind, battery: u32, capacity: u32) -> Jammer {
        Jammer {
            id,
            position: Point::new(0.0, 0.0),
            kind,
            battery,
            capacity,
        }
    }

    use JammerKind::{Rechargeable as R, Unrechargeable as U};

    #[test]
    fn classification_edges() {
        let js = vec![jam(0, U, 0, 20), jam(1, U, 20, 20), jam(2, R, 15, 20), jam(3, R, 9, 20)];
        let cls = classify(&js, 10);
        assert_eq!(cls.dead, vec![0, 3]);
        assert_eq!(cls.full, vec![1]);
        assert_eq!(cls.normal, vec![2]);
        assert_eq!(cls.unrechargeable, vec![0, 1]);
        assert_eq!(cls.rechargeable, vec![2, 3]);
        assert_eq!(cls.alive(), vec![1, 2]);
    }

    #[test]
    fn delta_pure_unrechargeable() {
        let js: Vec<_> = (0..5).map(|i| jam(i, U, 100, 100)).collect();
        let cls = classify(&js, 10);
        assert_eq!(cls.delta_form(), DeltaForm::PureUnrechargeable);
        assert_eq!(energy_delta(&[0, 2, 4], &cls, 10).unwrap(), 30);
    }

    #[test]
    fn delta_pure_rechargeable() {
        // five normal, one full
        let mut js: Vec<_> = (0..5).map(|i| jam(i, R, 50, 100)).collect();
        js.push(jam(5, R, 100, 100));
        let cls = classify(&js, 10);
        assert_eq!(cls.delta_form(), DeltaForm::PureRechargeable);
        assert_eq!(energy_delta(&[0, 1, 5], &cls, 10).unwrap(), 11 * 2 + 10 - 5);
    }

    #[test]
    fn delta_hybrid() {
        let js = vec![
            jam(0, U, 50, 100),
            jam(1, R, 50, 100),
            jam(2, R, 100, 100),
            jam(3, R, 50, 100),
            jam(4, R, 50, 100),
            jam(5, R, 50, 100),
        ];
        let cls = classify(&js, 10);
        assert_eq!(cls.delta_form(), DeltaForm::Hybrid);
        assert_eq!(energy_delta(&[0, 1, 2], &cls, 10).unwrap(), 10 + 11 + 10 - 4);
        let obj = cls.objective(10);
        assert_eq!(&obj.coefficients[..3], &[Some(10), Some(11), Some(10)]);
        assert_eq!(obj.constant, -4);
    }

    #[test]
    fn selecting_dead_or_unknown_jammer_fails() {
        let js = vec![jam(0, U, 5, 20), jam(1, U, 20, 20)];
        let cls = classify(&js, 10);
        assert!(matches!(energy_delta(&[0], &cls, 10), Err(Error::DeadSelected(0))));
        assert!(matches!(energy_delta(&[7], &cls, 10), Err(Error::UnknownJammer(7))));
    }

    #[test]
    fn slot_transitions() {
        let js = vec![jam(0, U, 20, 20), jam(1, R, 19, 20), jam(2, R, 20, 20), jam(3, U, 7, 20)];
        let next = apply_slot(&js, &[0], 10).unwrap();
        assert_eq!(next[0].battery, 10);
        assert_eq!(next[1].battery, 20);
        assert_eq!(next[2].battery, 20);
        assert_eq!(next[3].battery, 7);
    }

    #[test]
    fn overdraw_is_an_invariant_violation() {
        let js = vec![jam(0, U, 5, 20)];
        assert!(matches!(apply_slot(&js, &[0], 10), Err(Error::Invariant(_))));
    }

    #[test]
    fn dead_rechargeable_revives() {
        let mut js = vec![jam(0, R, 3, 20), jam(1, U, 20, 20)];
        let mut slots = 0;
        while classify(&js, 10).status(0).unwrap() == Status::Dead {
            js = apply_slot(&js, &[], 10).unwrap();
            slots += 1;
        }
        assert_eq!(slots, 7);
        assert_eq!(classify(&js, 10).status(0).unwrap(), Status::Normal);
    }
}

//! Candidate solutions and the constraint checks they must pass.

use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceIndex};
use crate::objective::{Alpha, ObjectiveBreakdown};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

/// One meeting: discipline `discipline` meets in `room` at `timeslot`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub discipline: String,
    pub timeslot: String,
    pub room: String,
}

impl Triple {
    pub fn new(discipline: impl Into<String>, timeslot: impl Into<String>, room: impl Into<String>) -> Self {
        Triple {
            discipline: discipline.into(),
            timeslot: timeslot.into(),
            room: room.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment {
    pub triples: Vec<Triple>,
    /// Which procedure produced the assignment ("exact", "greedy", "baseline", ...).
    pub provenance: String,
}

impl Assignment {
    pub fn new(triples: Vec<Triple>, provenance: impl Into<String>) -> Self {
        Assignment {
            triples,
            provenance: provenance.into(),
        }
    }

    /// Builds an assignment from index triples `(d, t, s)`, ordered by input
    /// position of discipline, then timeslot, then room.
    pub fn from_indices(inst: &Instance, cells: impl IntoIterator<Item = (usize, usize, usize)>, provenance: &str) -> Self {
        let mut cells: Vec<_> = cells.into_iter().collect();
        cells.sort_unstable();
        Assignment {
            triples: cells
                .into_iter()
                .map(|(d, t, s)| {
                    Triple::new(
                        inst.disciplines[d].id.clone(),
                        inst.timeslots[t].id.clone(),
                        inst.rooms[s].id.clone(),
                    )
                })
                .collect(),
            provenance: provenance.to_string(),
        }
    }

    /// Resolves ids to `(d, t, s)` positions. Unknown ids are collected into
    /// the error.
    pub fn to_indices(&self, inst: &Instance) -> Result<Vec<(usize, usize, usize)>> {
        resolve(&self.triples, &inst.index())
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Rooms carrying at least one meeting, without duplicates.
    pub fn rooms_used(&self) -> BTreeSet<&str> {
        self.triples.iter().map(|t| t.room.as_str()).collect()
    }
}

fn resolve(triples: &[Triple], idx: &InstanceIndex) -> Result<Vec<(usize, usize, usize)>> {
    let mut missing = BTreeSet::new();
    let mut out = Vec::with_capacity(triples.len());
    for tr in triples {
        let d = idx.disciplines.get(&tr.discipline);
        let t = idx.timeslots.get(&tr.timeslot);
        let s = idx.rooms.get(&tr.room);
        if d.is_none() {
            missing.insert(format!("discipline '{}'", tr.discipline));
        }
        if t.is_none() {
            missing.insert(format!("timeslot '{}'", tr.timeslot));
        }
        if s.is_none() {
            missing.insert(format!("room '{}'", tr.room));
        }
        if let (Some(&d), Some(&t), Some(&s)) = (d, t, s) {
            out.push((d, t, s));
        }
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(Error::UnknownIds(missing.into_iter().collect()))
    }
}

/// Constraint families of the model. The first four are the base model; the
/// rest come from eligibility fixings and the optional toggles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConstraintFamily {
    /// Each discipline meets exactly `frequency` times.
    Frequency,
    /// At most one discipline per (timeslot, room).
    RoomClash,
    /// At most one room per (discipline, timeslot).
    DisciplineClash,
    /// A room used by any meeting is counted as used.
    RoomUsage,
    /// Meetings only in rooms the discipline may use.
    Eligibility,
    /// Enrollment fits the room (only when capacity is enforced).
    Capacity,
    SameRoom,
    DistinctDays,
    UnknownId,
}

impl fmt::Display for ConstraintFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConstraintFamily::Frequency => "frequency",
            ConstraintFamily::RoomClash => "room_clash",
            ConstraintFamily::DisciplineClash => "discipline_clash",
            ConstraintFamily::RoomUsage => "room_usage",
            ConstraintFamily::Eligibility => "eligibility",
            ConstraintFamily::Capacity => "capacity",
            ConstraintFamily::SameRoom => "same_room",
            ConstraintFamily::DistinctDays => "distinct_days",
            ConstraintFamily::UnknownId => "unknown_id",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityViolation {
    pub family: ConstraintFamily,
    pub ids: Vec<String>,
    /// Label of the violated constraint row, e.g. `room_clash[t1,r2]`.
    pub row: String,
    pub message: String,
}

impl fmt::Display for FeasibilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.row, self.message)
    }
}

fn push(out: &mut Vec<FeasibilityViolation>, family: ConstraintFamily, ids: Vec<String>, message: String) {
    let row = format!("{family}[{}]", ids.join(","));
    out.push(FeasibilityViolation {
        family,
        ids,
        row,
        message,
    });
}

/// Checks every constraint family enabled for `inst`. Returns an empty list
/// iff the assignment is feasible.
pub fn check_feasible(a: &Assignment, inst: &Instance) -> Vec<FeasibilityViolation> {
    use ConstraintFamily::*;
    let mut out = Vec::new();
    let idx = inst.index();
    let mut cells = Vec::with_capacity(a.triples.len());
    for tr in &a.triples {
        match (
            idx.disciplines.get(&tr.discipline),
            idx.timeslots.get(&tr.timeslot),
            idx.rooms.get(&tr.room),
        ) {
            (Some(&d), Some(&t), Some(&s)) => cells.push((d, t, s)),
            _ => push(
                &mut out,
                UnknownId,
                vec![tr.discipline.clone(), tr.timeslot.clone(), tr.room.clone()],
                format!(
                    "triple ({}, {}, {}) references an id missing from the instance",
                    tr.discipline, tr.timeslot, tr.room
                ),
            ),
        }
    }

    let mut per_disc = vec![0u64; inst.disciplines.len()];
    let mut per_cell: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut per_disc_slot: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut rooms_of: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let (days, _) = inst.slot_days();
    let mut per_disc_day: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for &(d, t, s) in &cells {
        per_disc[d] += 1;
        per_cell.entry((t, s)).or_default().push(d);
        per_disc_slot.entry((d, t)).or_default().push(s);
        rooms_of.entry(d).or_default().insert(s);
        if let Some(day) = days[t] {
            *per_disc_day.entry((d, day)).or_default() += 1;
        }
    }

    for (d, disc) in inst.disciplines.iter().enumerate() {
        if per_disc[d] != disc.frequency as u64 {
            push(
                &mut out,
                Frequency,
                vec![disc.id.clone()],
                format!(
                    "discipline '{}' meets {} times, expected {}",
                    disc.id, per_disc[d], disc.frequency
                ),
            );
        }
    }
    for (&(t, s), ds) in &per_cell {
        if ds.len() > 1 {
            let mut ids = vec![inst.timeslots[t].id.clone(), inst.rooms[s].id.clone()];
            ids.extend(ds.iter().map(|&d| inst.disciplines[d].id.clone()));
            push(
                &mut out,
                RoomClash,
                ids,
                format!(
                    "{} meetings share room '{}' at '{}'",
                    ds.len(),
                    inst.rooms[s].id,
                    inst.timeslots[t].id
                ),
            );
        }
    }
    for (&(d, t), ss) in &per_disc_slot {
        if ss.len() > 1 {
            let mut ids = vec![inst.disciplines[d].id.clone(), inst.timeslots[t].id.clone()];
            ids.extend(ss.iter().map(|&s| inst.rooms[s].id.clone()));
            push(
                &mut out,
                DisciplineClash,
                ids,
                format!(
                    "discipline '{}' is in {} rooms at '{}'",
                    inst.disciplines[d].id,
                    ss.len(),
                    inst.timeslots[t].id
                ),
            );
        }
    }
    for &(d, t, s) in &cells {
        let disc = &inst.disciplines[d];
        let room = &inst.rooms[s];
        let listed = disc
            .eligible_rooms
            .as_ref()
            .is_none_or(|l| l.contains(&room.id));
        if !listed {
            push(
                &mut out,
                Eligibility,
                vec![disc.id.clone(), inst.timeslots[t].id.clone(), room.id.clone()],
                format!("room '{}' is not eligible for discipline '{}'", room.id, disc.id),
            );
        } else if !inst.is_eligible(d, s) {
            push(
                &mut out,
                Capacity,
                vec![disc.id.clone(), inst.timeslots[t].id.clone(), room.id.clone()],
                format!(
                    "enrollment {} of '{}' exceeds capacity {} of room '{}'",
                    disc.enrollment.unwrap_or(0),
                    disc.id,
                    room.capacity,
                    room.id
                ),
            );
        }
    }
    if inst.options.same_room_per_discipline {
        for (&d, rooms) in &rooms_of {
            if rooms.len() > 1 {
                let mut ids = vec![inst.disciplines[d].id.clone()];
                ids.extend(rooms.iter().map(|&s| inst.rooms[s].id.clone()));
                push(
                    &mut out,
                    SameRoom,
                    ids,
                    format!(
                        "discipline '{}' is spread over {} rooms",
                        inst.disciplines[d].id,
                        rooms.len()
                    ),
                );
            }
        }
    }
    if inst.options.distinct_days {
        let mut day_names: HashMap<usize, &str> = HashMap::new();
        for (t, day) in days.iter().enumerate() {
            if let (Some(i), Some(name)) = (day, inst.timeslots[t].day.as_deref()) {
                day_names.entry(*i).or_insert(name);
            }
        }
        for (&(d, day), &n) in &per_disc_day {
            if n > 1 {
                let name = day_names.get(&day).copied().unwrap_or("?");
                push(
                    &mut out,
                    DistinctDays,
                    vec![inst.disciplines[d].id.clone(), name.to_string()],
                    format!(
                        "discipline '{}' meets {n} times on day '{name}'",
                        inst.disciplines[d].id
                    ),
                );
            }
        }
    }
    out
}

/// Raw objective terms `(rooms used, accessibility penalty)` without any
/// feasibility check. Unknown ids are an error.
pub fn objective_counts(a: &Assignment, inst: &Instance) -> Result<(u64, u64)> {
    let cells = a.to_indices(inst)?;
    Ok(counts_of(inst, &cells))
}

pub(crate) fn counts_of(inst: &Instance, cells: &[(usize, usize, usize)]) -> (u64, u64) {
    let mut used = vec![false; inst.rooms.len()];
    let mut penalty = 0u64;
    for &(d, _, s) in cells {
        used[s] = true;
        if inst.disciplines[d].pcd {
            penalty += inst.rooms[s].floor as u64;
        }
    }
    (used.iter().filter(|&&u| u).count() as u64, penalty)
}

/// Objective breakdown of a feasible assignment. Infeasible assignments are
/// rejected with the violated constraint families.
pub fn objective_value(a: &Assignment, inst: &Instance, alpha: Alpha) -> Result<ObjectiveBreakdown> {
    let violations = check_feasible(a, inst);
    if !violations.is_empty() {
        return Err(Error::InfeasibleAssignment(violations));
    }
    let (obj1, obj2) = objective_counts(a, inst)?;
    Ok(ObjectiveBreakdown::new(alpha, obj1, obj2))
}

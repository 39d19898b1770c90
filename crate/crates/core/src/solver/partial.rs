//! Meeting-level partial assignments and the combinatorial lower bound on
//! their best completion.

use super::problem::Problem;
use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::objective::{to_real, ScaledCost};

/// A consistent set of placed meetings: no clashes, eligible rooms only,
/// toggles respected, no discipline above its frequency.
#[derive(Debug, Clone)]
pub struct PartialAssignment {
    n_slots: usize,
    n_rooms: usize,
    n_days: usize,
    /// `cell_owner[t * n_rooms + s]`
    cell_owner: Vec<Option<usize>>,
    /// `disc_room[d * n_slots + t]`
    disc_room: Vec<Option<usize>>,
    /// `day_used[d * n_days + day]`
    day_used: Vec<bool>,
    placed: Vec<Vec<(usize, usize)>>,
    room_load: Vec<u32>,
    rooms_used: u64,
    penalty: u64,
    remaining: u64,
}

impl PartialAssignment {
    /// The empty partial assignment for `model`.
    pub fn new(model: &Model) -> Self {
        Self::for_problem(&Problem::from_model(model))
    }

    pub(crate) fn for_problem(p: &Problem) -> Self {
        let nd = p.n_disciplines();
        PartialAssignment {
            n_slots: p.n_slots,
            n_rooms: p.n_rooms,
            n_days: p.n_days,
            cell_owner: vec![None; p.n_slots * p.n_rooms],
            disc_room: vec![None; nd * p.n_slots],
            day_used: vec![false; nd * p.n_days.max(1)],
            placed: vec![Vec::new(); nd],
            room_load: vec![0; p.n_rooms],
            rooms_used: 0,
            penalty: 0,
            remaining: p.total_meetings(),
        }
    }

    /// Places meeting `(d, t, s)` in the model's index space, rejecting any
    /// placement that would break a constraint.
    pub fn place(&mut self, model: &Model, d: usize, t: usize, s: usize) -> Result<()> {
        let p = Problem::from_model(model);
        if d >= p.n_disciplines() || t >= p.n_slots || s >= p.n_rooms || !self.can_place(&p, d, t, s) {
            return Err(Error::Format(format!("cannot place meeting ({d}, {t}, {s})")));
        }
        self.push(&p, d, t, s);
        Ok(())
    }

    /// Partial state holding every triple of `a`.
    pub fn from_assignment(model: &Model, a: &Assignment) -> Result<Self> {
        let p = Problem::from_model(model);
        let mut partial = Self::for_problem(&p);
        for (d, t, s) in a.to_indices(model.instance)? {
            if !partial.can_place(&p, d, t, s) {
                return Err(Error::Format(format!(
                    "triple ({}, {}, {}) conflicts with earlier triples",
                    model.instance.disciplines[d].id,
                    model.instance.timeslots[t].id,
                    model.instance.rooms[s].id
                )));
            }
            partial.push(&p, d, t, s);
        }
        Ok(partial)
    }

    pub fn placed(&self, d: usize) -> &[(usize, usize)] {
        &self.placed[d]
    }

    pub fn remaining_meetings(&self) -> u64 {
        self.remaining
    }

    pub fn rooms_used(&self) -> u64 {
        self.rooms_used
    }

    pub fn penalty(&self) -> u64 {
        self.penalty
    }

    pub fn is_complete(&self) -> bool {
        self.remaining == 0
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.placed
            .iter()
            .enumerate()
            .flat_map(|(d, v)| v.iter().map(move |&(t, s)| (d, t, s)))
    }

    pub(crate) fn room_load(&self, s: usize) -> u32 {
        self.room_load[s]
    }

    pub(crate) fn remaining_of(&self, p: &Problem, d: usize) -> u32 {
        p.freq[d] - self.placed[d].len() as u32
    }

    pub(crate) fn can_place(&self, p: &Problem, d: usize, t: usize, s: usize) -> bool {
        if self.placed[d].len() as u32 >= p.freq[d]
            || !p.is_eligible(d, s)
            || self.cell_owner[t * self.n_rooms + s].is_some()
            || self.disc_room[d * self.n_slots + t].is_some()
        {
            return false;
        }
        if p.same_room {
            if let Some(&(_, s0)) = self.placed[d].first() {
                if s0 != s {
                    return false;
                }
            }
        }
        if p.distinct_days {
            if let Some(day) = p.slot_day[t] {
                if self.day_used[d * self.n_days + day] {
                    return false;
                }
            }
        }
        true
    }

    pub(crate) fn push(&mut self, p: &Problem, d: usize, t: usize, s: usize) {
        debug_assert!(self.can_place(p, d, t, s));
        self.cell_owner[t * self.n_rooms + s] = Some(d);
        self.disc_room[d * self.n_slots + t] = Some(s);
        if p.distinct_days {
            if let Some(day) = p.slot_day[t] {
                self.day_used[d * self.n_days + day] = true;
            }
        }
        self.placed[d].push((t, s));
        if self.room_load[s] == 0 {
            self.rooms_used += 1;
        }
        self.room_load[s] += 1;
        self.penalty += p.penalty_of(d, s);
        self.remaining -= 1;
    }

    pub(crate) fn pop(&mut self, p: &Problem, d: usize) {
        let (t, s) = self.placed[d].pop().expect("pop on a discipline with no meetings");
        self.cell_owner[t * self.n_rooms + s] = None;
        self.disc_room[d * self.n_slots + t] = None;
        if p.distinct_days {
            if let Some(day) = p.slot_day[t] {
                self.day_used[d * self.n_days + day] = false;
            }
        }
        self.room_load[s] -= 1;
        if self.room_load[s] == 0 {
            self.rooms_used -= 1;
        }
        self.penalty -= p.penalty_of(d, s);
        self.remaining += 1;
    }

    /// Number of cells where `d` could go next, optionally restricted to
    /// `allowed` rooms and to slots after `after`.
    pub(crate) fn feasible_cells(
        &self,
        p: &Problem,
        d: usize,
        allowed: Option<&[bool]>,
        after: Option<usize>,
    ) -> usize {
        let start = after.map_or(0, |t| t + 1);
        let mut n = 0;
        for &s in &p.eligible[d] {
            if allowed.is_some_and(|a| !a[s]) {
                continue;
            }
            n += (start..p.n_slots).filter(|&t| self.can_place(p, d, t, s)).count();
        }
        n
    }
}

/// Lower bound on the cost of any completion of `partial`, in scaled units.
/// `None` when some discipline can no longer be completed.
///
/// Rooms: those already used, plus enough fresh rooms for the meetings that
/// the free cells of used rooms cannot absorb. Penalty: what is already
/// incurred, plus every open accessibility-flagged meeting at the lowest
/// floor still reachable for it.
pub(crate) fn lower_bound_scaled(
    p: &Problem,
    partial: &PartialAssignment,
    allowed: Option<&[bool]>,
) -> Option<ScaledCost> {
    let remaining = partial.remaining;
    let free_in_used: u64 = (0..p.n_rooms)
        .filter(|&s| partial.room_load[s] > 0)
        .map(|s| (p.n_slots as u32 - partial.room_load[s]) as u64)
        .sum();
    let overflow = remaining.saturating_sub(free_in_used);
    let slots = p.n_slots.max(1) as u64;
    let rooms = partial.rooms_used + overflow.div_ceil(slots);

    let mut penalty = partial.penalty;
    for d in 0..p.n_disciplines() {
        let left = partial.remaining_of(p, d) as usize;
        if left == 0 {
            continue;
        }
        let mut cheapest = None;
        let mut cells = 0usize;
        for &s in &p.eligible_by_floor[d] {
            if allowed.is_some_and(|a| !a[s]) {
                continue;
            }
            let here = (0..p.n_slots).filter(|&t| partial.can_place(p, d, t, s)).count();
            if here > 0 && cheapest.is_none() {
                cheapest = Some(p.floors[s] as u64);
            }
            cells += here;
            if cells >= left && cheapest.is_some() {
                break;
            }
        }
        if cells < left {
            return None;
        }
        if p.pcd[d] {
            penalty += left as u64 * cheapest.unwrap_or(0);
        }
    }
    Some(p.cost(rooms, penalty))
}

/// Lower bound on the objective of the best completion of `partial`;
/// `f64::INFINITY` when no completion exists.
pub fn lower_bound(model: &Model, partial: &PartialAssignment) -> f64 {
    let p = Problem::from_model(model);
    lower_bound_scaled(&p, partial, None).map_or(f64::INFINITY, to_real)
}

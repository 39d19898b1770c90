//! Exhaustive enumeration over (timeslot, room) cells. Works directly on the
//! instance and shares no search code with the exact solver, so it can act
//! as an independent check on it.

use crate::assignment::{objective_value, Assignment};
use crate::error::{Error, Result};
use crate::instance::{validate_instance, Instance};
use crate::objective::{Alpha, ObjectiveBreakdown};

pub const DEFAULT_CELL_LIMIT: u64 = 10_000_000;

fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Upper estimate of the number of leaves the enumeration visits.
pub fn oracle_tree_size(inst: &Instance) -> f64 {
    let nt = inst.timeslots.len() as u64;
    inst.disciplines
        .iter()
        .enumerate()
        .map(|(d, disc)| {
            let rooms = (0..inst.rooms.len()).filter(|&s| inst.is_eligible(d, s)).count() as f64;
            binomial(nt, disc.frequency as u64) * rooms.powi(disc.frequency as i32)
        })
        .product()
}

struct Enumeration<'a> {
    inst: &'a Instance,
    alpha: Alpha,
    rooms_for: Vec<Vec<usize>>,
    day_of: Vec<Option<usize>>,
    taken: Vec<bool>,
    current: Vec<(usize, usize, usize)>,
    best: Option<(i64, Vec<(usize, usize, usize)>)>,
}

impl Enumeration<'_> {
    fn discipline(&mut self, d: usize) {
        if d == self.inst.disciplines.len() {
            self.leaf();
            return;
        }
        self.meeting(d, 0, 0);
    }

    /// Places meeting `k` of discipline `d` at a slot `>= from`.
    fn meeting(&mut self, d: usize, k: u32, from: usize) {
        let freq = self.inst.disciplines[d].frequency;
        if k == freq {
            self.discipline(d + 1);
            return;
        }
        let ns = self.inst.rooms.len();
        let start = self.current.len() - k as usize;
        for t in from..self.inst.timeslots.len() {
            if self.inst.options.distinct_days {
                let day = self.day_of[t];
                if self.current[start..].iter().any(|&(_, u, _)| self.day_of[u] == day) {
                    continue;
                }
            }
            for i in 0..self.rooms_for[d].len() {
                let s = self.rooms_for[d][i];
                if self.taken[t * ns + s] {
                    continue;
                }
                if self.inst.options.same_room_per_discipline && k > 0 && self.current[start].2 != s {
                    continue;
                }
                self.taken[t * ns + s] = true;
                self.current.push((d, t, s));
                self.meeting(d, k + 1, t + 1);
                self.current.pop();
                self.taken[t * ns + s] = false;
            }
        }
    }

    fn leaf(&mut self) {
        let mut used = vec![false; self.inst.rooms.len()];
        let mut penalty = 0u64;
        for &(d, _, s) in &self.current {
            used[s] = true;
            if self.inst.disciplines[d].pcd {
                penalty += self.inst.rooms[s].floor as u64;
            }
        }
        let rooms = used.iter().filter(|&&u| u).count() as u64;
        let cost = self.alpha.cost(rooms, penalty);
        if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
            self.best = Some((cost, self.current.clone()));
        }
    }
}

/// Globally optimal assignment by exhaustive enumeration. Refuses instances
/// whose tree estimate exceeds `cell_limit` leaves.
pub fn brute_force(inst: &Instance, alpha: Alpha, cell_limit: u64) -> Result<(Assignment, ObjectiveBreakdown)> {
    let violations = validate_instance(inst);
    if !violations.is_empty() {
        return Err(Error::InvalidInstance(violations));
    }
    let estimate = oracle_tree_size(inst);
    if estimate > cell_limit as f64 {
        return Err(Error::OracleTooLarge {
            estimate,
            limit: cell_limit,
        });
    }
    let rooms_for = (0..inst.disciplines.len())
        .map(|d| (0..inst.rooms.len()).filter(|&s| inst.is_eligible(d, s)).collect())
        .collect();
    let (day_of, _) = inst.slot_days();
    let mut e = Enumeration {
        inst,
        alpha,
        rooms_for,
        day_of,
        taken: vec![false; inst.timeslots.len() * inst.rooms.len()],
        current: Vec::new(),
        best: None,
    };
    e.discipline(0);
    let (_, cells) = e
        .best
        .ok_or_else(|| Error::Infeasible("exhaustive enumeration found no feasible assignment".into()))?;
    let a = Assignment::from_indices(inst, cells, "oracle");
    let breakdown = objective_value(&a, inst, alpha)?;
    Ok((a, breakdown))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Discipline, InstanceOptions, Room, Timeslot};

    fn inst(ds: Vec<Discipline>, nt: usize, floors: &[u32]) -> Instance {
        Instance {
            disciplines: ds,
            timeslots: (0..nt).map(|i| Timeslot::new(format!("t{i}"), i as i64)).collect(),
            rooms: floors.iter().enumerate().map(|(i, &f)| Room::new(format!("r{i}"), f)).collect(),
            options: InstanceOptions::default(),
        }
    }

    #[test]
    fn empty() {
        let (a, b) = brute_force(&inst(vec![], 1, &[0]), Alpha::HALF, DEFAULT_CELL_LIMIT).unwrap();
        assert!(a.is_empty());
        assert_eq!(b.fo, 0.0);
    }

    #[test]
    fn picks_ground_floor() {
        let i = inst(vec![Discipline::new("d", 1, true)], 1, &[2, 0]);
        let (a, b) = brute_force(&i, Alpha::ONE, DEFAULT_CELL_LIMIT).unwrap();
        assert_eq!(a.triples[0].room, "r1");
        assert_eq!(b.fo, 0.0);
    }

    #[test]
    fn two_pcd_one_ground_cell() {
        // one slot; rooms on floors 0 and 3; both classes flagged
        let i = inst(
            vec![Discipline::new("a", 1, true), Discipline::new("b", 1, true)],
            1,
            &[0, 3],
        );
        let (_, b) = brute_force(&i, Alpha::ONE, DEFAULT_CELL_LIMIT).unwrap();
        assert_eq!(b.obj2, 3);
    }

    #[test]
    fn refuses_large() {
        let ds = (0..20).map(|i| Discipline::new(format!("d{i}"), 2, false)).collect();
        let i = inst(ds, 16, &[0; 10]);
        assert!(matches!(
            brute_force(&i, Alpha::HALF, DEFAULT_CELL_LIMIT),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn infeasible_reported() {
        let i = inst(
            vec![
                Discipline::new("a", 2, false).with_eligible(["r0"]),
                Discipline::new("b", 1, false).with_eligible(["r0"]),
            ],
            2,
            &[0, 1],
        );
        assert!(matches!(
            brute_force(&i, Alpha::HALF, DEFAULT_CELL_LIMIT),
            Err(Error::Infeasible(_))
        ));
    }
}

use super::partial::PartialAssignment;
use super::problem::Problem;
use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::model::{build_model, Model};
use crate::objective::Alpha;

/// Constructive warm start: accessibility-flagged meetings go first, each to
/// the lowest-floor free cell; the rest are packed into rooms that are
/// already open before any new room is opened. Never violates a constraint,
/// but may dead-end.
pub fn greedy_construct(inst: &Instance, alpha: Alpha) -> Result<Assignment> {
    let model = build_model(inst, alpha)?;
    greedy_on_model(&model)
}

pub(crate) fn greedy_on_model(model: &Model) -> Result<Assignment> {
    let p = Problem::from_model(model);
    let partial = greedy(&p).map_err(|d| Error::GreedyDeadEnd(model.instance.disciplines[d].id.clone()))?;
    Ok(Assignment::from_indices(model.instance, partial.cells(), "greedy"))
}

/// Returns the completed state or the index of the discipline that could not
/// be placed.
pub(crate) fn greedy(p: &Problem) -> std::result::Result<PartialAssignment, usize> {
    let mut order: Vec<usize> = (0..p.n_disciplines()).collect();
    // pcd first, then fewest eligible rooms, then input order
    order.sort_by_key(|&d| (!p.pcd[d], p.eligible[d].len(), d));
    let floor_first = p.alpha.penalty_weight() > 0;

    let mut partial = PartialAssignment::for_problem(p);
    for d in order {
        for _ in 0..p.freq[d] {
            let cell = if p.pcd[d] && floor_first {
                lowest_floor_cell(p, &partial, d)
            } else {
                packing_cell(p, &partial, d)
            };
            let (t, s) = cell.ok_or(d)?;
            partial.push(p, d, t, s);
        }
    }
    Ok(partial)
}

fn first_slot(p: &Problem, partial: &PartialAssignment, d: usize, s: usize) -> Option<usize> {
    (0..p.n_slots).find(|&t| partial.can_place(p, d, t, s))
}

fn lowest_floor_cell(p: &Problem, partial: &PartialAssignment, d: usize) -> Option<(usize, usize)> {
    let mut best: Option<((u32, bool, usize, usize), (usize, usize))> = None;
    for &s in &p.eligible_by_floor[d] {
        if let Some((key, _)) = best {
            if p.floors[s] > key.0 {
                break;
            }
        }
        if let Some(t) = first_slot(p, partial, d, s) {
            let key = (p.floors[s], partial.room_load(s) == 0, t, s);
            if best.is_none_or(|(k, _)| key < k) {
                best = Some((key, (t, s)));
            }
        }
    }
    best.map(|(_, c)| c)
}

fn packing_cell(p: &Problem, partial: &PartialAssignment, d: usize) -> Option<(usize, usize)> {
    let open = p.eligible_by_floor[d]
        .iter()
        .filter(|&&s| partial.room_load(s) > 0)
        .find_map(|&s| first_slot(p, partial, d, s).map(|t| (t, s)));
    open.or_else(|| {
        p.eligible_by_floor[d]
            .iter()
            .find_map(|&s| first_slot(p, partial, d, s).map(|t| (t, s)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{check_feasible, objective_counts};
    use crate::instance::{Discipline, InstanceOptions, Room, Timeslot};

    fn slots(n: usize) -> Vec<Timeslot> {
        (0..n).map(|i| Timeslot::new(format!("t{i}"), i as i64)).collect()
    }

    #[test]
    fn accessible_first() {
        let inst = Instance {
            disciplines: (0..3).map(|i| Discipline::new(format!("p{i}"), 2, true)).collect(),
            timeslots: slots(4),
            rooms: vec![Room::new("up", 3), Room::new("g1", 0), Room::new("g2", 0)],
            options: InstanceOptions::default(),
        };
        let a = greedy_construct(&inst, Alpha::HALF).unwrap();
        assert!(check_feasible(&a, &inst).is_empty());
        assert_eq!(objective_counts(&a, &inst).unwrap().1, 0);
    }

    #[test]
    fn forced_packing() {
        let inst = Instance {
            disciplines: (0..3).map(|i| Discipline::new(format!("d{i}"), 2, false)).collect(),
            timeslots: slots(6),
            rooms: vec![Room::new("only", 2)],
            options: InstanceOptions::default(),
        };
        let a = greedy_construct(&inst, Alpha::ZERO).unwrap();
        assert!(check_feasible(&a, &inst).is_empty());
        assert_eq!(objective_counts(&a, &inst).unwrap().0, 1);
    }

    #[test]
    fn reuses_open_rooms() {
        let inst = Instance {
            disciplines: (0..4).map(|i| Discipline::new(format!("d{i}"), 2, false)).collect(),
            timeslots: slots(4),
            rooms: (0..4).map(|i| Room::new(format!("r{i}"), 1)).collect(),
            options: InstanceOptions::default(),
        };
        let a = greedy_construct(&inst, Alpha::ZERO).unwrap();
        assert_eq!(objective_counts(&a, &inst).unwrap().0, 2);
    }

    #[test]
    fn dead_end_reported() {
        // d0 grabs the only slot d1 could use in r0
        let inst = Instance {
            disciplines: vec![
                Discipline::new("d0", 1, false),
                Discipline::new("d1", 2, false).with_eligible(["r0"]),
                Discipline::new("d2", 1, false).with_eligible(["r0"]),
            ],
            timeslots: slots(3),
            rooms: vec![Room::new("r0", 0), Room::new("r1", 1)],
            options: InstanceOptions::default(),
        };
        // d1 and d2 fill r0; d0 must go to r1 - greedy handles it
        assert!(greedy_construct(&inst, Alpha::HALF).is_ok());
        let tight = Instance {
            disciplines: vec![
                Discipline::new("a", 1, false),
                Discipline::new("b", 1, false).with_eligible(["r1"]),
            ],
            timeslots: slots(1),
            rooms: vec![Room::new("r0", 1), Room::new("r1", 0)],
            options: InstanceOptions::default(),
        };
        // "b" is more constrained so it is placed first; succeeds
        assert!(greedy_construct(&tight, Alpha::ZERO).is_ok());
        let same_room = Instance {
            disciplines: vec![
                Discipline::new("a", 1, false).with_eligible(["r0"]),
                Discipline::new("b", 2, false),
            ],
            timeslots: slots(2),
            rooms: vec![Room::new("r0", 0), Room::new("r1", 0)],
            options: InstanceOptions {
                same_room_per_discipline: true,
                ..Default::default()
            },
        };
        // "b" packs into r0 beside "a" and then finds no second r0 slot
        assert!(matches!(greedy_construct(&same_room, Alpha::ZERO), Err(Error::GreedyDeadEnd(id)) if id == "b"));
        let blocked = Instance {
            disciplines: vec![
                Discipline::new("a", 1, true),
                Discipline::new("b", 2, false).with_eligible(["r0"]),
            ],
            timeslots: slots(2),
            rooms: vec![Room::new("r0", 0), Room::new("r1", 1)],
            options: InstanceOptions::default(),
        };
        // the accessibility-flagged class takes the ground room first
        match greedy_construct(&blocked, Alpha::HALF) {
            Err(Error::GreedyDeadEnd(id)) => assert_eq!(id, "b"),
            other => panic!("expected dead end, got {other:?}"),
        }
    }
}

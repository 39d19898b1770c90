//! Seeded random instances for property tests and oracle comparisons.

use crate::instance::{validate_instance, Discipline, Instance, InstanceOptions, Room, Timeslot};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub max_disciplines: usize,
    pub max_slots: usize,
    pub max_rooms: usize,
    pub max_frequency: u32,
    pub max_floor: u32,
    pub pcd_probability: f64,
    /// Chance that a discipline gets an explicit eligibility list.
    pub restrict_probability: f64,
    pub same_room: bool,
    pub distinct_days: bool,
}

impl RandomSpec {
    /// At most 3 disciplines, 4 slots and 3 rooms: small enough for the
    /// exhaustive oracle.
    pub fn tiny() -> Self {
        RandomSpec {
            max_disciplines: 3,
            max_slots: 4,
            max_rooms: 3,
            max_frequency: 2,
            max_floor: 4,
            pcd_probability: 0.4,
            restrict_probability: 0.3,
            same_room: false,
            distinct_days: false,
        }
    }
}

fn draw(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> Instance {
    let nt = rng.gen_range(1..=spec.max_slots.max(1));
    let ns = rng.gen_range(1..=spec.max_rooms.max(1));
    let nd = rng.gen_range(0..=spec.max_disciplines);
    let timeslots = (0..nt)
        .map(|t| {
            let slot = Timeslot::new(format!("t{t}"), t as i64);
            if spec.distinct_days {
                slot.on_day(format!("day{}", t / 2))
            } else {
                slot
            }
        })
        .collect();
    let rooms: Vec<Room> = (0..ns)
        .map(|s| Room::new(format!("r{s}"), rng.gen_range(0..=spec.max_floor)))
        .collect();
    let disciplines = (0..nd)
        .map(|d| {
            let f = rng.gen_range(1..=spec.max_frequency.max(1));
            let disc = Discipline::new(format!("d{d}"), f, rng.gen_bool(spec.pcd_probability));
            if rng.gen_bool(spec.restrict_probability) {
                let mut ids: Vec<String> = rooms
                    .iter()
                    .filter(|_| rng.gen_bool(0.5))
                    .map(|r| r.id.clone())
                    .collect();
                if ids.is_empty() {
                    ids.push(rooms[rng.gen_range(0..ns)].id.clone());
                }
                disc.with_eligible(ids)
            } else {
                disc
            }
        })
        .collect();
    Instance {
        disciplines,
        timeslots,
        rooms,
        options: InstanceOptions {
            enforce_capacity: false,
            same_room_per_discipline: spec.same_room,
            distinct_days: spec.distinct_days,
        },
    }
}

/// Draws instances until one passes validation. The result may still be
/// infeasible when eligibility lists collide.
pub fn random_instance(seed: u64, spec: &RandomSpec) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let inst = draw(&mut rng, spec);
        if validate_instance(&inst).is_empty() {
            return inst;
        }
    }
}

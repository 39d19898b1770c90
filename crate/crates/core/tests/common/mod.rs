//! Test-side oracle: generate-and-test over every way of giving each
//! discipline `frequency` (slot, room) cells, with its own constraint check
//! and floating-point objective. Shares nothing with the library's search.

#![allow(dead_code)]

use pas_core::instance::Instance;
use std::path::PathBuf;

pub type Cells = Vec<(usize, usize, usize)>;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn eligible(inst: &Instance, d: usize, s: usize) -> bool {
    let disc = &inst.disciplines[d];
    let room = &inst.rooms[s];
    let listed = disc
        .eligible_rooms
        .as_ref()
        .is_none_or(|l| l.contains(&room.id));
    let fits = !inst.options.enforce_capacity || disc.enrollment.is_none_or(|e| e <= room.capacity);
    listed && fits
}

fn feasible(inst: &Instance, cells: &Cells) -> bool {
    for (i, a) in cells.iter().enumerate() {
        if !eligible(inst, a.0, a.2) {
            return false;
        }
        for b in &cells[i + 1..] {
            if a.1 == b.1 && (a.2 == b.2 || a.0 == b.0) {
                return false;
            }
            if a.0 == b.0 {
                if inst.options.same_room_per_discipline && a.2 != b.2 {
                    return false;
                }
                if inst.options.distinct_days && inst.timeslots[a.1].day == inst.timeslots[b.1].day {
                    return false;
                }
            }
        }
    }
    true
}

/// Every multiset of cells per discipline, as sorted slot tuples paired
/// with any room tuple.
fn options_for(inst: &Instance, d: usize) -> Vec<Vec<(usize, usize)>> {
    let f = inst.disciplines[d].frequency as usize;
    let nt = inst.timeslots.len();
    let ns = inst.rooms.len();
    let mut slot_sets: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..f {
        let mut next = Vec::new();
        for set in &slot_sets {
            let from = set.last().map_or(0, |&t| t + 1);
            for t in from..nt {
                let mut s = set.clone();
                s.push(t);
                next.push(s);
            }
        }
        slot_sets = next;
    }
    let mut out = Vec::new();
    for slots in slot_sets {
        let mut room_tuples: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..f {
            room_tuples = room_tuples
                .into_iter()
                .flat_map(|r| {
                    (0..ns).map(move |s| {
                        let mut r = r.clone();
                        r.push(s);
                        r
                    })
                })
                .collect();
        }
        for rooms in room_tuples {
            out.push(slots.iter().copied().zip(rooms).collect());
        }
    }
    out
}

/// Calls `visit` on every feasible assignment.
pub fn for_each_feasible(inst: &Instance, mut visit: impl FnMut(&Cells)) {
    let per: Vec<_> = (0..inst.disciplines.len()).map(|d| options_for(inst, d)).collect();
    let mut pick = vec![0usize; per.len()];
    if per.iter().any(|o| o.is_empty()) {
        return;
    }
    loop {
        let cells: Cells = pick
            .iter()
            .enumerate()
            .flat_map(|(d, &k)| per[d][k].iter().map(move |&(t, s)| (d, t, s)))
            .collect();
        if feasible(inst, &cells) {
            visit(&cells);
        }
        let mut i = 0;
        loop {
            if i == pick.len() {
                return;
            }
            pick[i] += 1;
            if pick[i] < per[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

pub fn counts(inst: &Instance, cells: &Cells) -> (u64, u64) {
    let mut rooms: Vec<usize> = cells.iter().map(|c| c.2).collect();
    rooms.sort_unstable();
    rooms.dedup();
    let penalty = cells
        .iter()
        .filter(|c| inst.disciplines[c.0].pcd)
        .map(|c| inst.rooms[c.2].floor as u64)
        .sum();
    (rooms.len() as u64, penalty)
}

pub fn fo(inst: &Instance, cells: &Cells, alpha: f64) -> f64 {
    let (r, p) = counts(inst, cells);
    (1.0 - alpha) * r as f64 + alpha * p as f64
}

/// Optimal objective by enumeration; `None` when nothing is feasible.
pub fn optimum(inst: &Instance, alpha: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for_each_feasible(inst, |c| {
        let v = fo(inst, c, alpha);
        if best.is_none_or(|b| v < b) {
            best = Some(v);
        }
    });
    best
}

/// Estimated enumeration size, to keep debug-mode runs short.
pub fn enumeration_size(inst: &Instance) -> f64 {
    let nt = inst.timeslots.len() as f64;
    let ns = inst.rooms.len() as f64;
    inst.disciplines
        .iter()
        .map(|d| {
            let f = d.frequency as i32;
            let choose: f64 = (0..f).map(|i| (nt - i as f64) / (i as f64 + 1.0)).product();
            choose * ns.powi(f)
        })
        .product()
}

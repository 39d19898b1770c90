use super::problem::Problem;
use crate::assignment::{check_feasible, Assignment};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::model::build_model;
use crate::objective::{to_real, Alpha, ScaledCost};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Geometric cooling: temperature `initial_temperature * cooling^k` at
/// iteration `k`, in objective units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub initial_temperature: f64,
    pub cooling: f64,
    pub iterations: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            initial_temperature: 1.0,
            cooling: 0.999,
            iterations: 20_000,
        }
    }
}

impl AnnealSchedule {
    /// Descent only: worsening moves are never accepted.
    pub fn frozen(iterations: u64) -> Self {
        AnnealSchedule {
            initial_temperature: 0.0,
            cooling: 1.0,
            iterations,
        }
    }
}

struct State<'p> {
    p: &'p Problem,
    cells: Vec<(usize, usize, usize)>,
    meetings_of: Vec<Vec<usize>>,
    owner: Vec<Option<usize>>,
    busy: Vec<bool>,
    day_count: Vec<u32>,
    room_load: Vec<u32>,
    rooms_used: u64,
    penalty: u64,
}

impl<'p> State<'p> {
    fn new(p: &'p Problem, cells: Vec<(usize, usize, usize)>) -> Self {
        let mut meetings_of = vec![Vec::new(); p.n_disciplines()];
        for (i, &(d, _, _)) in cells.iter().enumerate() {
            meetings_of[d].push(i);
        }
        let mut st = State {
            p,
            meetings_of,
            owner: vec![None; p.n_slots * p.n_rooms],
            busy: vec![false; p.n_disciplines() * p.n_slots],
            day_count: vec![0; p.n_disciplines() * p.n_days.max(1)],
            room_load: vec![0; p.n_rooms],
            rooms_used: 0,
            penalty: 0,
            cells: cells.clone(),
        };
        for (i, &(d, t, s)) in cells.iter().enumerate() {
            let ok = st.insert(i, d, t, s);
            debug_assert!(ok);
        }
        st
    }

    fn cost(&self) -> ScaledCost {
        self.p.cost(self.rooms_used, self.penalty)
    }

    fn remove(&mut self, i: usize) {
        let (d, t, s) = self.cells[i];
        let p = self.p;
        self.owner[t * p.n_rooms + s] = None;
        self.busy[d * p.n_slots + t] = false;
        if let Some(day) = p.slot_day[t] {
            self.day_count[d * p.n_days + day] -= 1;
        }
        self.room_load[s] -= 1;
        if self.room_load[s] == 0 {
            self.rooms_used -= 1;
        }
        self.penalty -= p.penalty_of(d, s);
    }

    /// Places meeting `i` at `(t, s)` if that breaks no row; false otherwise.
    fn insert(&mut self, i: usize, d: usize, t: usize, s: usize) -> bool {
        let p = self.p;
        if !p.is_eligible(d, s) || self.owner[t * p.n_rooms + s].is_some() || self.busy[d * p.n_slots + t] {
            return false;
        }
        let day = p.slot_day[t];
        if p.distinct_days {
            if let Some(day) = day {
                if self.day_count[d * p.n_days + day] > 0 {
                    return false;
                }
            }
        }
        self.cells[i] = (d, t, s);
        self.owner[t * p.n_rooms + s] = Some(i);
        self.busy[d * p.n_slots + t] = true;
        if let Some(day) = day {
            self.day_count[d * p.n_days + day] += 1;
        }
        if self.room_load[s] == 0 {
            self.rooms_used += 1;
        }
        self.room_load[s] += 1;
        self.penalty += p.penalty_of(d, s);
        true
    }

    fn same_room_holds(&self, d: usize) -> bool {
        let ms = &self.meetings_of[d];
        ms.iter().all(|&i| self.cells[i].2 == self.cells[ms[0]].2)
    }

    /// Moves the listed meetings to new cells, or leaves the state untouched
    /// and returns false when the result would be infeasible.
    fn apply(&mut self, moves: &[(usize, usize, usize)]) -> bool {
        let old: Vec<_> = moves.iter().map(|&(i, _, _)| self.cells[i]).collect();
        for &(i, _, _) in moves {
            self.remove(i);
        }
        let mut placed = 0;
        for &(i, t, s) in moves {
            if !self.insert(i, self.cells[i].0, t, s) {
                break;
            }
            placed += 1;
        }
        let mut ok = placed == moves.len();
        if ok && self.p.same_room {
            ok = moves.iter().all(|&(i, _, _)| self.same_room_holds(self.cells[i].0));
        }
        if !ok {
            for &(i, _, _) in &moves[..placed] {
                self.remove(i);
            }
            for (k, &(i, _, _)) in moves.iter().enumerate() {
                let (d, t, s) = old[k];
                let back = self.insert(i, d, t, s);
                debug_assert!(back);
            }
        }
        ok
    }
}

/// Simulated annealing over relocate and swap moves. Never returns anything
/// worse than `start`; the same seed always gives the same result.
pub fn anneal_improve(
    inst: &Instance,
    start: &Assignment,
    alpha: Alpha,
    schedule: &AnnealSchedule,
    seed: u64,
) -> Result<Assignment> {
    let model = build_model(inst, alpha)?;
    let violations = check_feasible(start, inst);
    if !violations.is_empty() {
        return Err(Error::InfeasibleAssignment(violations));
    }
    let p = Problem::from_model(&model);
    let cells = start.to_indices(inst)?;
    if cells.is_empty() {
        return Ok(Assignment::from_indices(inst, cells, "anneal"));
    }
    let mut state = State::new(&p, cells);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = state.cost();
    let mut best = (current, state.cells.clone());
    let mut temperature = schedule.initial_temperature;
    let n = state.cells.len();

    for _ in 0..schedule.iterations {
        let i = rng.gen_range(0..n);
        let moves = if n > 1 && rng.gen_bool(0.3) {
            let j = rng.gen_range(0..n);
            let (di, ti, si) = state.cells[i];
            let (dj, tj, sj) = state.cells[j];
            if di == dj {
                continue;
            }
            vec![(i, tj, sj), (j, ti, si)]
        } else {
            let d = state.cells[i].0;
            let s = p.eligible[d][rng.gen_range(0..p.eligible[d].len())];
            let t = rng.gen_range(0..p.n_slots);
            if p.same_room && s != state.cells[i].2 {
                // a discipline changes rooms all at once
                let ms = state.meetings_of[d].clone();
                let mut moves: Vec<_> = ms.iter().map(|&k| (k, state.cells[k].1, s)).collect();
                if let Some(m) = moves.iter_mut().find(|m| m.0 == i) {
                    m.1 = t;
                }
                moves
            } else {
                vec![(i, t, s)]
            }
        };
        let previous: Vec<_> = moves
            .iter()
            .map(|&(k, _, _)| (k, state.cells[k].1, state.cells[k].2))
            .collect();
        if !state.apply(&moves) {
            temperature *= schedule.cooling;
            continue;
        }
        let next = state.cost();
        let delta = to_real(next - current);
        let accept = delta <= 0.0
            || (temperature > 0.0 && rng.gen::<f64>() < (-delta / temperature).exp());
        if accept {
            current = next;
            if current < best.0 {
                best = (current, state.cells.clone());
            }
        } else {
            let back = state.apply(&previous);
            debug_assert!(back);
        }
        temperature *= schedule.cooling;
    }
    Ok(Assignment::from_indices(inst, best.1, "anneal"))
}

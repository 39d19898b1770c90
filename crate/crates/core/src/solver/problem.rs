use crate::model::Model;
use crate::objective::{Alpha, ScaledCost};

/// Index-based view of a model shared by the search procedures.
#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub alpha: Alpha,
    pub n_slots: usize,
    pub n_rooms: usize,
    pub floors: Vec<u32>,
    pub freq: Vec<u32>,
    pub pcd: Vec<bool>,
    /// Eligible rooms per discipline, input order.
    pub eligible: Vec<Vec<usize>>,
    /// Eligible rooms per discipline sorted by (floor, index).
    pub eligible_by_floor: Vec<Vec<usize>>,
    /// `eligible_mask[d * n_rooms + s]`.
    pub eligible_mask: Vec<bool>,
    pub slot_day: Vec<Option<usize>>,
    pub n_days: usize,
    pub same_room: bool,
    pub distinct_days: bool,
}

impl Problem {
    pub fn from_model(m: &Model) -> Problem {
        let inst = m.instance;
        let (nd, nt, ns) = m.var_index.dims();
        let eligible: Vec<Vec<usize>> = (0..nd).map(|d| m.var_index.eligible_rooms(d).to_vec()).collect();
        let floors: Vec<u32> = inst.rooms.iter().map(|r| r.floor).collect();
        let eligible_by_floor = eligible
            .iter()
            .map(|rs| {
                let mut v = rs.clone();
                v.sort_by_key(|&s| (floors[s], s));
                v
            })
            .collect();
        let mut eligible_mask = vec![false; nd * ns];
        for (d, rs) in eligible.iter().enumerate() {
            for &s in rs {
                eligible_mask[d * ns + s] = true;
            }
        }
        let (slot_day, n_days) = inst.slot_days();
        Problem {
            alpha: m.alpha,
            n_slots: nt,
            n_rooms: ns,
            floors,
            freq: inst.disciplines.iter().map(|d| d.frequency).collect(),
            pcd: inst.disciplines.iter().map(|d| d.pcd).collect(),
            eligible,
            eligible_by_floor,
            eligible_mask,
            slot_day,
            n_days,
            same_room: inst.options.same_room_per_discipline,
            distinct_days: inst.options.distinct_days,
        }
    }

    pub fn n_disciplines(&self) -> usize {
        self.freq.len()
    }

    pub fn total_meetings(&self) -> u64 {
        self.freq.iter().map(|&f| f as u64).sum()
    }

    pub fn is_eligible(&self, d: usize, s: usize) -> bool {
        self.eligible_mask[d * self.n_rooms + s]
    }

    pub fn penalty_of(&self, d: usize, s: usize) -> u64 {
        if self.pcd[d] {
            self.floors[s] as u64
        } else {
            0
        }
    }

    pub fn cost(&self, rooms: u64, penalty: u64) -> ScaledCost {
        self.alpha.cost(rooms, penalty)
    }

    /// True when slot choice can be left to edge colouring: without the
    /// day toggle any room-level plan with room loads and frequencies at
    /// most `|T|` has a clash-free timetable.
    pub fn slots_decouple(&self) -> bool {
        !self.distinct_days
    }
}

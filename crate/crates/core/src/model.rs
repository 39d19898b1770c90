//! Explicit 0/1 model: one `x` column per retained (discipline, timeslot,
//! room) cell and one `y` column per room.
//!
//! Rows, in order:
//! - frequency: `sum_{t,s} x[d,t,s] = frequency_d` for every discipline;
//! - room clash: `sum_d x[d,t,s] <= 1` for every (t, s) with a column;
//! - discipline clash: `sum_s x[d,t,s] <= 1` for every (d, t) with a column;
//! - room usage: `x[d,t,s] - y[s] <= 0` for every retained cell;
//! - same room (toggle): `f_d * x[d,t,s] - sum_t' x[d,t',s] <= 0`;
//! - distinct days (toggle): `sum_{t in day, s} x[d,t,s] <= 1`.
//!
//! Ineligible rooms (and, with capacity enforced, rooms that are too small)
//! get no column at all.

use crate::assignment::{Assignment, ConstraintFamily};
use crate::error::{Error, Result};
use crate::instance::{validate_instance, Instance};
use crate::objective::{to_real, Alpha, ScaledCost};
use std::fmt::Write as _;

const ABSENT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    X { d: usize, t: usize, s: usize },
    Y { s: usize },
}

/// Dense bijection between retained cells and column numbers.
#[derive(Debug, Clone)]
pub struct VarIndex {
    n_disciplines: usize,
    n_slots: usize,
    n_rooms: usize,
    cells: Vec<(usize, usize, usize)>,
    lookup: Vec<u32>,
    eligible: Vec<Vec<usize>>,
}

impl VarIndex {
    pub fn new(inst: &Instance) -> VarIndex {
        let (nd, nt, ns) = (inst.disciplines.len(), inst.timeslots.len(), inst.rooms.len());
        let eligible = inst.eligible_rooms();
        let mut cells = Vec::new();
        let mut lookup = vec![ABSENT; nd * nt * ns];
        for (d, rooms) in eligible.iter().enumerate() {
            for t in 0..nt {
                for &s in rooms {
                    lookup[(d * nt + t) * ns + s] = cells.len() as u32;
                    cells.push((d, t, s));
                }
            }
        }
        VarIndex {
            n_disciplines: nd,
            n_slots: nt,
            n_rooms: ns,
            cells,
            lookup,
            eligible,
        }
    }

    pub fn x(&self, d: usize, t: usize, s: usize) -> Option<usize> {
        if d >= self.n_disciplines || t >= self.n_slots || s >= self.n_rooms {
            return None;
        }
        match self.lookup[(d * self.n_slots + t) * self.n_rooms + s] {
            ABSENT => None,
            c => Some(c as usize),
        }
    }

    pub fn y(&self, s: usize) -> usize {
        assert!(s < self.n_rooms, "room index {s} out of range");
        self.cells.len() + s
    }

    pub fn column(&self, col: usize) -> Column {
        if col < self.cells.len() {
            let (d, t, s) = self.cells[col];
            Column::X { d, t, s }
        } else {
            Column::Y {
                s: col - self.cells.len(),
            }
        }
    }

    pub fn num_x(&self) -> usize {
        self.cells.len()
    }

    pub fn num_columns(&self) -> usize {
        self.cells.len() + self.n_rooms
    }

    pub fn cells(&self) -> &[(usize, usize, usize)] {
        &self.cells
    }

    /// Retained rooms for discipline `d`, in room input order.
    pub fn eligible_rooms(&self, d: usize) -> &[usize] {
        &self.eligible[d]
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n_disciplines, self.n_slots, self.n_rooms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Eq,
    Le,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub family: ConstraintFamily,
    pub coefs: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl Row {
    pub fn activity(&self, point: &[bool]) -> i64 {
        self.coefs
            .iter()
            .filter(|(c, _)| point[*c])
            .map(|(_, a)| a)
            .sum()
    }

    pub fn satisfied_by(&self, point: &[bool]) -> bool {
        let lhs = self.activity(point);
        match self.sense {
            Sense::Eq => lhs == self.rhs,
            Sense::Le => lhs <= self.rhs,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Model<'a> {
    pub instance: &'a Instance,
    pub alpha: Alpha,
    pub var_index: VarIndex,
    pub rows: Vec<Row>,
    /// Scaled objective coefficient per column.
    pub objective: Vec<ScaledCost>,
}

/// Builds the model for `inst` at weight `alpha`. Instances with validation
/// violations are rejected.
pub fn build_model(inst: &Instance, alpha: Alpha) -> Result<Model<'_>> {
    let violations = validate_instance(inst);
    if !violations.is_empty() {
        return Err(Error::InvalidInstance(violations));
    }
    let vi = VarIndex::new(inst);
    let (nd, nt, ns) = vi.dims();
    let mut rows = Vec::new();

    for d in 0..nd {
        let coefs = (0..nt)
            .flat_map(|t| vi.eligible_rooms(d).iter().map(move |&s| (t, s)))
            .filter_map(|(t, s)| vi.x(d, t, s).map(|c| (c, 1)))
            .collect();
        rows.push(Row {
            family: ConstraintFamily::Frequency,
            coefs,
            sense: Sense::Eq,
            rhs: inst.disciplines[d].frequency as i64,
        });
    }
    for t in 0..nt {
        for s in 0..ns {
            let coefs: Vec<_> = (0..nd).filter_map(|d| vi.x(d, t, s).map(|c| (c, 1))).collect();
            if !coefs.is_empty() {
                rows.push(Row {
                    family: ConstraintFamily::RoomClash,
                    coefs,
                    sense: Sense::Le,
                    rhs: 1,
                });
            }
        }
    }
    for d in 0..nd {
        for t in 0..nt {
            let coefs: Vec<_> = vi
                .eligible_rooms(d)
                .iter()
                .filter_map(|&s| vi.x(d, t, s).map(|c| (c, 1)))
                .collect();
            if !coefs.is_empty() {
                rows.push(Row {
                    family: ConstraintFamily::DisciplineClash,
                    coefs,
                    sense: Sense::Le,
                    rhs: 1,
                });
            }
        }
    }
    for (col, &(_, _, s)) in vi.cells().iter().enumerate() {
        rows.push(Row {
            family: ConstraintFamily::RoomUsage,
            coefs: vec![(col, 1), (vi.y(s), -1)],
            sense: Sense::Le,
            rhs: 0,
        });
    }
    if inst.options.same_room_per_discipline {
        for (col, &(d, t, s)) in vi.cells().iter().enumerate() {
            let f = inst.disciplines[d].frequency as i64;
            if f <= 1 {
                continue;
            }
            let mut coefs = vec![(col, f - 1)];
            coefs.extend(
                (0..nt)
                    .filter(|&u| u != t)
                    .filter_map(|u| vi.x(d, u, s).map(|c| (c, -1))),
            );
            rows.push(Row {
                family: ConstraintFamily::SameRoom,
                coefs,
                sense: Sense::Le,
                rhs: 0,
            });
        }
    }
    if inst.options.distinct_days {
        let (days, n_days) = inst.slot_days();
        for d in 0..nd {
            for day in 0..n_days {
                let coefs: Vec<_> = (0..nt)
                    .filter(|&t| days[t] == Some(day))
                    .flat_map(|t| vi.eligible_rooms(d).iter().map(move |&s| (t, s)))
                    .filter_map(|(t, s)| vi.x(d, t, s).map(|c| (c, 1)))
                    .collect();
                if coefs.len() > 1 {
                    rows.push(Row {
                        family: ConstraintFamily::DistinctDays,
                        coefs,
                        sense: Sense::Le,
                        rhs: 1,
                    });
                }
            }
        }
    }

    let mut objective = Vec::with_capacity(vi.num_columns());
    for &(d, _, s) in vi.cells() {
        let pcd = i64::from(inst.disciplines[d].pcd);
        objective.push(alpha.penalty_weight() * inst.rooms[s].floor as i64 * pcd);
    }
    objective.extend(std::iter::repeat_n(alpha.room_weight(), ns));

    Ok(Model {
        instance: inst,
        alpha,
        var_index: vi,
        rows,
        objective,
    })
}

impl Model<'_> {
    pub fn rows_of(&self, family: ConstraintFamily) -> usize {
        self.rows.iter().filter(|r| r.family == family).count()
    }

    pub fn objective_real(&self, col: usize) -> f64 {
        to_real(self.objective[col])
    }

    pub fn satisfies(&self, point: &[bool]) -> bool {
        point.len() == self.var_index.num_columns() && self.rows.iter().all(|r| r.satisfied_by(point))
    }

    pub fn objective_of(&self, point: &[bool]) -> ScaledCost {
        point
            .iter()
            .zip(&self.objective)
            .filter(|(on, _)| **on)
            .map(|(_, c)| c)
            .sum()
    }

    /// Reads the `x` part of a 0/1 point as an assignment; `y` is ignored.
    pub fn decode(&self, point: &[bool]) -> Assignment {
        let cells = self
            .var_index
            .cells()
            .iter()
            .zip(point)
            .filter(|(_, on)| **on)
            .map(|(c, _)| *c);
        Assignment::from_indices(self.instance, cells, "decoded")
    }

    /// Encodes an assignment with `y[s] = 1` exactly for rooms it uses.
    /// Fails on unknown ids or on cells without a column.
    pub fn encode(&self, a: &Assignment) -> Result<Vec<bool>> {
        let mut point = vec![false; self.var_index.num_columns()];
        for (d, t, s) in a.to_indices(self.instance)? {
            let col = self.var_index.x(d, t, s).ok_or_else(|| {
                Error::Format(format!(
                    "cell ({}, {}, {}) has no column",
                    self.instance.disciplines[d].id,
                    self.instance.timeslots[t].id,
                    self.instance.rooms[s].id
                ))
            })?;
            point[col] = true;
            point[self.var_index.y(s)] = true;
        }
        Ok(point)
    }

    /// Plain-text dump: a column legend followed by one line per row in the
    /// form `<sense> <rhs> : <coef>*<col> ...`.
    pub fn dump(&self) -> String {
        let inst = self.instance;
        let mut out = String::new();
        let _ = writeln!(out, "# alpha {}", self.alpha);
        let _ = writeln!(out, "# columns");
        for col in 0..self.var_index.num_columns() {
            let label = match self.var_index.column(col) {
                Column::X { d, t, s } => format!(
                    "x {} {} {}",
                    inst.disciplines[d].id, inst.timeslots[t].id, inst.rooms[s].id
                ),
                Column::Y { s } => format!("y {}", inst.rooms[s].id),
            };
            let _ = writeln!(out, "{col} {label} obj {}", self.objective_real(col));
        }
        let _ = writeln!(out, "# rows");
        for row in &self.rows {
            let sense = match row.sense {
                Sense::Eq => "=",
                Sense::Le => "<=",
            };
            let _ = write!(out, "{sense} {} :", row.rhs);
            for (c, a) in &row.coefs {
                let _ = write!(out, " {a}*{c}");
            }
            out.push('\n');
        }
        out
    }
}

//! Room usage, per-floor occupancy and baseline comparison.

use crate::assignment::{check_feasible, objective_counts, Assignment, FeasibilityViolation};
use crate::error::Result;
use crate::instance::Instance;
use crate::objective::{Alpha, ObjectiveBreakdown};
use serde::Serialize;
use std::fmt::{self, Write as _};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoomUsage {
    pub rooms_used: usize,
    pub rooms_available: usize,
    pub utilization_pct: f64,
    /// `(room id, meetings)` in input order.
    pub per_room: Vec<(String, usize)>,
}

pub fn room_usage(a: &Assignment, inst: &Instance) -> Result<RoomUsage> {
    let cells = a.to_indices(inst)?;
    let mut meetings = vec![0usize; inst.rooms.len()];
    for (_, _, s) in cells {
        meetings[s] += 1;
    }
    let used = meetings.iter().filter(|&&m| m > 0).count();
    let available = inst.rooms.len();
    Ok(RoomUsage {
        rooms_used: used,
        rooms_available: available,
        utilization_pct: if available == 0 { 0.0 } else { 100.0 * used as f64 / available as f64 },
        per_room: inst.rooms.iter().map(|r| r.id.clone()).zip(meetings).collect(),
    })
}

impl RoomUsage {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("room,meetings,used\n");
        for (id, m) in &self.per_room {
            let _ = writeln!(s, "{id},{m},{}", u8::from(*m > 0));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bucket {
    Low,
    Medium,
    High,
}

impl Bucket {
    /// Low below 40, Medium below 80, High from 80.
    pub fn of(pct: f64) -> Bucket {
        if pct < 40.0 {
            Bucket::Low
        } else if pct < 80.0 {
            Bucket::Medium
        } else {
            Bucket::High
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bucket::Low => "Low",
            Bucket::Medium => "Medium",
            Bucket::High => "High",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloorOccupancy {
    pub floor: u32,
    pub rooms_on_floor: usize,
    pub slot_cells: usize,
    pub occupied_cells: usize,
    pub occupancy_pct: f64,
}

impl FloorOccupancy {
    pub fn bucket(&self) -> Bucket {
        Bucket::of(self.occupancy_pct)
    }
}

/// One column per labelled solution; `columns[i][k]` is floor `floors[k]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Heatmap {
    pub labels: Vec<String>,
    /// Floors present in the instance, ascending.
    pub floors: Vec<u32>,
    pub columns: Vec<Vec<FloorOccupancy>>,
}

/// Occupied (room, slot) cells on each floor over all cells on that floor.
pub fn floor_heatmap(solutions: &[(String, Assignment)], inst: &Instance) -> Result<Heatmap> {
    let floors = inst.floors();
    let slots = inst.timeslots.len();
    let mut columns = Vec::with_capacity(solutions.len());
    for (_, a) in solutions {
        let cells = a.to_indices(inst)?;
        let column = floors
            .iter()
            .map(|&f| {
                let rooms_on_floor = inst.rooms.iter().filter(|r| r.floor == f).count();
                let occupied_cells = cells.iter().filter(|&&(_, _, s)| inst.rooms[s].floor == f).count();
                let slot_cells = rooms_on_floor * slots;
                FloorOccupancy {
                    floor: f,
                    rooms_on_floor,
                    slot_cells,
                    occupied_cells,
                    occupancy_pct: if slot_cells == 0 {
                        0.0
                    } else {
                        100.0 * occupied_cells as f64 / slot_cells as f64
                    },
                }
            })
            .collect();
        columns.push(column);
    }
    Ok(Heatmap {
        labels: solutions.iter().map(|(l, _)| l.clone()).collect(),
        floors,
        columns,
    })
}

impl Heatmap {
    pub fn cell(&self, column: usize, floor: u32) -> Option<&FloorOccupancy> {
        self.columns.get(column)?.iter().find(|c| c.floor == floor)
    }

    /// Top floor first.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("floor");
        for l in &self.labels {
            s.push(',');
            s.push_str(l);
        }
        s.push('\n');
        for (k, f) in self.floors.iter().enumerate().rev() {
            s.push_str(&f.to_string());
            for col in &self.columns {
                let _ = write!(s, ",{:.4}", col[k].occupancy_pct);
            }
            s.push('\n');
        }
        s
    }

    pub fn render(&self) -> String {
        let mut s = format!("{:>5}", "floor");
        for l in &self.labels {
            let _ = write!(s, " {l:>16}");
        }
        s.push('\n');
        for (k, f) in self.floors.iter().enumerate().rev() {
            let _ = write!(s, "{f:>5}");
            for col in &self.columns {
                let c = &col[k];
                let _ = write!(s, " {:>16}", format!("{:.1}% {}", c.occupancy_pct, c.bucket()));
            }
            s.push('\n');
        }
        s.push_str("legend: Low 0-39%, Medium 40-79%, High 80-100%\n");
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloorDelta {
    pub floor: u32,
    pub baseline: usize,
    pub optimized: usize,
    pub delta: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub alpha: f64,
    pub baseline: ObjectiveBreakdown,
    pub optimized: ObjectiveBreakdown,
    pub room_delta: i64,
    pub penalty_delta: i64,
    pub fo_delta: f64,
    /// Meetings per floor.
    pub floors: Vec<FloorDelta>,
    /// Rows the baseline breaks; reported, not fatal.
    pub baseline_violations: Vec<FeasibilityViolation>,
}

/// Side-by-side breakdowns at one alpha. Deltas are optimized minus baseline.
pub fn compare_baseline(baseline: &Assignment, optimized: &Assignment, inst: &Instance, alpha: Alpha) -> Result<Comparison> {
    let base_cells = baseline.to_indices(inst)?;
    let opt_cells = optimized.to_indices(inst)?;
    let (b1, b2) = objective_counts(baseline, inst)?;
    let (o1, o2) = objective_counts(optimized, inst)?;
    let b = ObjectiveBreakdown::new(alpha, b1, b2);
    let o = ObjectiveBreakdown::new(alpha, o1, o2);
    let per_floor = |cells: &[(usize, usize, usize)], f: u32| cells.iter().filter(|c| inst.rooms[c.2].floor == f).count();
    let floors = inst
        .floors()
        .into_iter()
        .map(|f| {
            let (bb, oo) = (per_floor(&base_cells, f), per_floor(&opt_cells, f));
            FloorDelta {
                floor: f,
                baseline: bb,
                optimized: oo,
                delta: oo as i64 - bb as i64,
            }
        })
        .collect();
    Ok(Comparison {
        alpha: alpha.value(),
        room_delta: o1 as i64 - b1 as i64,
        penalty_delta: o2 as i64 - b2 as i64,
        fo_delta: crate::objective::to_real(o.scaled_fo() - b.scaled_fo()),
        baseline: b,
        optimized: o,
        floors,
        baseline_violations: check_feasible(baseline, inst),
    })
}

impl Comparison {
    pub fn render(&self, rooms_available: usize) -> String {
        let pct = |n: u64| {
            if rooms_available == 0 {
                0.0
            } else {
                100.0 * n as f64 / rooms_available as f64
            }
        };
        let mut s = format!("comparison at alpha {}\n", self.alpha);
        let _ = writeln!(s, "{:<10} {:>10} {:>10} {:>10}", "", "baseline", "optimized", "delta");
        let _ = writeln!(s, "{:<10} {:>10} {:>10} {:>+10}", "rooms", self.baseline.obj1, self.optimized.obj1, self.room_delta);
        let _ = writeln!(
            s,
            "{:<10} {:>9.1}% {:>9.1}%",
            "usage",
            pct(self.baseline.obj1),
            pct(self.optimized.obj1)
        );
        let _ = writeln!(s, "{:<10} {:>10} {:>10} {:>+10}", "penalty", self.baseline.obj2, self.optimized.obj2, self.penalty_delta);
        let _ = writeln!(s, "{:<10} {:>10.4} {:>10.4} {:>+10.4}", "FO", self.baseline.fo, self.optimized.fo, self.fo_delta);
        for f in self.floors.iter().rev() {
            let _ = writeln!(s, "{:<10} {:>10} {:>10} {:>+10}", format!("floor {}", f.floor), f.baseline, f.optimized, f.delta);
        }
        if !self.baseline_violations.is_empty() {
            let _ = writeln!(s, "warning: baseline breaks {} constraint rows", self.baseline_violations.len());
            for v in &self.baseline_violations {
                let _ = writeln!(s, "  {}", v.row);
            }
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("measure,baseline,optimized,delta\n");
        let _ = writeln!(s, "rooms,{},{},{}", self.baseline.obj1, self.optimized.obj1, self.room_delta);
        let _ = writeln!(s, "penalty,{},{},{}", self.baseline.obj2, self.optimized.obj2, self.penalty_delta);
        let _ = writeln!(s, "fo,{:.4},{:.4},{:.4}", self.baseline.fo, self.optimized.fo, self.fo_delta);
        for f in &self.floors {
            let _ = writeln!(s, "floor_{},{},{},{}", f.floor, f.baseline, f.optimized, f.delta);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::Triple;
    use crate::error::Error;
    use crate::instance::{Discipline, InstanceOptions, Room, Timeslot};

    fn inst() -> Instance {
        Instance {
            disciplines: vec![Discipline::new("a", 2, true), Discipline::new("b", 1, false)],
            timeslots: vec![Timeslot::new("t1", 1), Timeslot::new("t2", 2)],
            rooms: vec![Room::new("g", 0), Room::new("u1", 1), Room::new("u2", 1)],
            options: InstanceOptions::default(),
        }
    }

    fn ground_only() -> Assignment {
        Assignment::new(
            vec![Triple::new("a", "t1", "g"), Triple::new("a", "t2", "g"), Triple::new("b", "t1", "u1")],
            "x",
        )
    }

    #[test]
    fn buckets() {
        assert_eq!(Bucket::of(95.0), Bucket::High);
        assert_eq!(Bucket::of(60.0), Bucket::Medium);
        assert_eq!(Bucket::of(20.0), Bucket::Low);
        assert_eq!(Bucket::of(39.9), Bucket::Low);
        assert_eq!(Bucket::of(40.0), Bucket::Medium);
        assert_eq!(Bucket::of(79.99), Bucket::Medium);
        assert_eq!(Bucket::of(80.0), Bucket::High);
        assert_eq!(Bucket::of(0.0), Bucket::Low);
        assert_eq!(Bucket::of(100.0), Bucket::High);
    }

    #[test]
    fn usage_of_empty_assignment() {
        let u = room_usage(&Assignment::default(), &inst()).unwrap();
        assert_eq!((u.rooms_used, u.utilization_pct), (0, 0.0));
        assert_eq!(u.to_csv(), "room,meetings,used\ng,0,0\nu1,0,0\nu2,0,0\n");
    }

    #[test]
    fn twenty_three_of_thirty_one() {
        let i = Instance {
            disciplines: vec![Discipline::new("d", 1, false)],
            timeslots: vec![Timeslot::new("t", 0)],
            rooms: (0..31).map(|k| Room::new(format!("r{k}"), 0)).collect(),
            options: InstanceOptions::default(),
        };
        let a = Assignment::new(
            (0..23).map(|k| Triple::new("d", "t", format!("r{k}"))).collect(),
            "baseline",
        );
        let u = room_usage(&a, &i).unwrap();
        assert_eq!(u.rooms_used, 23);
        assert!((u.utilization_pct - 74.19354838709677).abs() < 1e-9);
        assert_eq!(format!("{:.1}", u.utilization_pct), "74.2");
    }

    #[test]
    fn heatmap_conserves_and_orders() {
        let h = floor_heatmap(&[("x".into(), ground_only())], &inst()).unwrap();
        assert_eq!(h.floors, vec![0, 1]);
        assert_eq!(h.cell(0, 0).unwrap().occupancy_pct, 100.0);
        assert_eq!(h.cell(0, 1).unwrap().occupancy_pct, 25.0);
        let total: usize = h.columns[0].iter().map(|c| c.occupied_cells).sum();
        assert_eq!(total, 3);
        assert_eq!(h.to_csv(), "floor,x\n1,25.0000\n0,100.0000\n");
    }

    #[test]
    fn self_comparison_is_flat() {
        let c = compare_baseline(&ground_only(), &ground_only(), &inst(), Alpha::HALF).unwrap();
        assert_eq!((c.room_delta, c.penalty_delta, c.fo_delta), (0, 0, 0.0));
        assert!(c.floors.iter().all(|f| f.delta == 0));
        assert!(c.baseline_violations.is_empty());
    }

    #[test]
    fn infeasible_baseline_still_compares() {
        let mut bad = ground_only();
        bad.triples.push(Triple::new("b", "t2", "u2"));
        let c = compare_baseline(&bad, &ground_only(), &inst(), Alpha::HALF).unwrap();
        assert!(!c.baseline_violations.is_empty());
        assert!(c.render(3).contains("warning"));
    }

    #[test]
    fn unknown_ids_listed() {
        let bad = Assignment::new(vec![Triple::new("zz", "t1", "nowhere")], "baseline");
        match compare_baseline(&bad, &ground_only(), &inst(), Alpha::HALF) {
            Err(Error::UnknownIds(ids)) => assert_eq!(ids.len(), 2),
            other => panic!("{other:?}"),
        }
    }
}

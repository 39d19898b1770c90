//! Exact depth-first branch-and-bound.
//!
//! Rooms with the same floor and the same set of admissible disciplines are
//! interchangeable, so the outer search decides, type by type, how many rooms
//! of each type are open (the first `k` rooms of a type, in input order).
//! Each node is bounded by
//!
//! ```text
//! (1 - alpha) * rooms_lb + alpha * penalty_lb
//! ```
//!
//! where `rooms_lb` counts the rooms already opened plus the fresh rooms the
//! remaining meetings need at `|T|` meetings per room, and `penalty_lb` is the
//! minimum-cost transportation of meetings into every room not yet closed.
//!
//! At a leaf the open set is fixed. Without the day toggle, the flow solution
//! is itself optimal for that open set, and slots follow from edge colouring
//! the discipline/room multigraph, since room loads and frequencies never
//! exceed `|T|`. With the day toggle, the same-room toggle, or both, the leaf
//! is solved by a meeting-level depth-first search over cells of the open
//! rooms.

use super::coloring::color_bipartite;
use super::flow::MinCostFlow;
use super::greedy::greedy;
use super::partial::{lower_bound_scaled, PartialAssignment};
use super::problem::Problem;
use super::{SolveLimits, SolveOutcome, SolveStats};
use crate::assignment::{objective_value, Assignment};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::objective::{to_real, to_scaled, ScaledCost};
use log::{debug, info};
use std::collections::HashMap;
use std::time::Instant;

type Cell = (usize, usize, usize);

#[derive(Debug)]
struct RoomType {
    floor: u32,
    rooms: Vec<usize>,
}

#[derive(Debug)]
struct Class {
    pcd: bool,
    meetings: i64,
    members: Vec<usize>,
}

struct Network {
    flow: MinCostFlow,
    source: usize,
    sink: usize,
    /// `(class, type, edge)` for every admissible pair.
    assign_edges: Vec<(usize, usize, usize)>,
    type_edges: Vec<usize>,
    /// Multiplier that puts the penalty ahead of the floor tie-break.
    penalty_scale: i64,
    meetings: i64,
}

impl Network {
    fn new(p: &Problem, types: &[RoomType], classes: &[Class]) -> Network {
        let nc = classes.len();
        let nk = types.len();
        let source = 0;
        let sink = 1 + nc + nk;
        let meetings = p.total_meetings() as i64;
        let max_floor = types.iter().map(|t| t.floor as i64).max().unwrap_or(0);
        let penalty_scale = meetings * max_floor + 1;
        let mut flow = MinCostFlow::new(sink + 1);
        let mut assign_edges = Vec::new();
        for (c, class) in classes.iter().enumerate() {
            flow.add_edge(source, 1 + c, class.meetings, 0);
            let d = class.members[0];
            for (k, ty) in types.iter().enumerate() {
                if p.is_eligible(d, ty.rooms[0]) {
                    let floor = ty.floor as i64;
                    let cost = if class.pcd { floor * penalty_scale + floor } else { floor };
                    let e = flow.add_edge(1 + c, 1 + nc + k, class.meetings, cost);
                    assign_edges.push((c, k, e));
                }
            }
        }
        let type_edges = (0..nk)
            .map(|k| flow.add_edge(1 + nc + k, sink, 0, 0))
            .collect();
        Network {
            flow,
            source,
            sink,
            assign_edges,
            type_edges,
            penalty_scale,
            meetings,
        }
    }

    /// Minimum penalty when type `k` offers `open[k]` rooms; `None` if the
    /// meetings do not fit.
    fn min_penalty(&mut self, open: &[usize], n_slots: usize) -> Option<u64> {
        for (k, &e) in self.type_edges.iter().enumerate() {
            self.flow.set_capacity(e, (open[k] * n_slots) as i64);
        }
        let (sent, cost) = self.flow.run(self.source, self.sink);
        (sent == self.meetings).then(|| (cost / self.penalty_scale) as u64)
    }
}

struct Incumbent {
    cost: ScaledCost,
    /// The warm start is replaced by the first search solution of equal cost.
    accept_ties: bool,
    cells: Vec<Cell>,
    rooms_open: usize,
}

struct Search<'p> {
    p: &'p Problem,
    types: Vec<RoomType>,
    classes: Vec<Class>,
    net: Network,
    limits: SolveLimits,
    gap: ScaledCost,
    start: Instant,
    nodes: u64,
    aborted: bool,
    incumbent: Option<Incumbent>,
    /// Smallest bound among subtrees discarded or left unexplored.
    open_bound: ScaledCost,
}

impl<'p> Search<'p> {
    fn new(p: &'p Problem, limits: &SolveLimits, start: Instant) -> Self {
        let mut types: Vec<RoomType> = Vec::new();
        let mut by_key: HashMap<(u32, Vec<bool>), usize> = HashMap::new();
        for s in 0..p.n_rooms {
            let admits: Vec<bool> = (0..p.n_disciplines()).map(|d| p.is_eligible(d, s)).collect();
            if !admits.iter().any(|&a| a) {
                continue;
            }
            match by_key.get(&(p.floors[s], admits.clone())) {
                Some(&k) => types[k].rooms.push(s),
                None => {
                    by_key.insert((p.floors[s], admits), types.len());
                    types.push(RoomType {
                        floor: p.floors[s],
                        rooms: vec![s],
                    });
                }
            }
        }
        types.sort_by_key(|t| (t.floor, t.rooms[0]));

        let mut classes: Vec<Class> = Vec::new();
        let mut class_of: HashMap<(bool, &[usize]), usize> = HashMap::new();
        for d in 0..p.n_disciplines() {
            if p.freq[d] == 0 {
                continue;
            }
            let key = (p.pcd[d], p.eligible[d].as_slice());
            match class_of.get(&key) {
                Some(&c) => {
                    classes[c].meetings += p.freq[d] as i64;
                    classes[c].members.push(d);
                }
                None => {
                    class_of.insert(key, classes.len());
                    classes.push(Class {
                        pcd: p.pcd[d],
                        meetings: p.freq[d] as i64,
                        members: vec![d],
                    });
                }
            }
        }
        let net = Network::new(p, &types, &classes);
        Search {
            p,
            types,
            classes,
            net,
            limits: limits.clone(),
            gap: to_scaled(limits.target_gap.max(0.0)),
            start,
            nodes: 0,
            aborted: false,
            incumbent: None,
            open_bound: ScaledCost::MAX,
        }
    }

    fn out_of_budget(&self) -> bool {
        if self.limits.max_nodes.is_some_and(|n| self.nodes >= n) {
            return true;
        }
        self.limits
            .max_seconds
            .is_some_and(|s| self.start.elapsed().as_secs_f64() >= s)
    }

    fn prunes(&self, lb: ScaledCost) -> bool {
        match &self.incumbent {
            None => false,
            Some(inc) if inc.accept_ties => lb > inc.cost,
            Some(inc) => lb.saturating_add(self.gap) >= inc.cost,
        }
    }

    fn discard(&mut self, lb: ScaledCost) {
        self.open_bound = self.open_bound.min(lb);
    }

    fn offer(&mut self, cost: ScaledCost, cells: Vec<Cell>, rooms_open: usize) {
        let better = match &self.incumbent {
            None => true,
            Some(inc) => cost < inc.cost || (inc.accept_ties && cost == inc.cost),
        };
        if better {
            debug!("incumbent {} after {} nodes", to_real(cost), self.nodes);
            self.incumbent = Some(Incumbent {
                cost,
                accept_ties: false,
                cells,
                rooms_open,
            });
        }
    }

    /// Rooms per type: decided prefix, then every room of the undecided types.
    fn capacities(&self, prefix: &[usize]) -> Vec<usize> {
        self.types
            .iter()
            .enumerate()
            .map(|(k, t)| prefix.get(k).copied().unwrap_or(t.rooms.len()))
            .collect()
    }

    fn bound(&mut self, prefix: &[usize]) -> Option<ScaledCost> {
        let caps = self.capacities(prefix);
        let penalty = self.net.min_penalty(&caps, self.p.n_slots)?;
        let opened: usize = prefix.iter().sum();
        let slots = self.p.n_slots.max(1) as u64;
        let overflow = self.p.total_meetings().saturating_sub(opened as u64 * slots);
        let rooms = opened as u64 + overflow.div_ceil(slots);
        Some(self.p.cost(rooms, penalty))
    }

    fn run(&mut self) -> Result<()> {
        let root = match self.bound(&[]) {
            Some(lb) => lb,
            None => {
                let caps = self.capacities(&[]);
                for (k, &e) in self.net.type_edges.iter().enumerate() {
                    self.net.flow.set_capacity(e, (caps[k] * self.p.n_slots) as i64);
                }
                let (sent, _) = self.net.flow.run(self.net.source, self.net.sink);
                return Err(Error::Infeasible(format!(
                    "only {sent} of {} meetings fit into eligible rooms at {} meetings per room",
                    self.net.meetings, self.p.n_slots
                )));
            }
        };
        debug!("root bound {}", to_real(root));
        let mut stack: Vec<(Vec<usize>, ScaledCost)> = vec![(Vec::new(), root)];
        while let Some((prefix, lb)) = stack.pop() {
            if self.prunes(lb) {
                self.discard(lb);
                continue;
            }
            if self.out_of_budget() {
                self.aborted = true;
                self.discard(lb);
                for (_, b) in &stack {
                    self.open_bound = self.open_bound.min(*b);
                }
                break;
            }
            self.nodes += 1;
            if prefix.len() == self.types.len() {
                self.leaf(&prefix, lb);
                if self.aborted {
                    for (_, b) in &stack {
                        self.open_bound = self.open_bound.min(*b);
                    }
                    break;
                }
                continue;
            }
            let k = prefix.len();
            let mut children = Vec::new();
            for count in (0..=self.types[k].rooms.len()).rev() {
                let mut child = prefix.clone();
                child.push(count);
                if let Some(child_lb) = self.bound(&child) {
                    let child_lb = child_lb.max(lb);
                    if self.prunes(child_lb) {
                        self.discard(child_lb);
                    } else {
                        children.push((child, child_lb));
                    }
                }
            }
            stack.extend(children.into_iter().rev());
        }
        Ok(())
    }

    fn open_rooms(&self, prefix: &[usize]) -> Vec<usize> {
        let mut rooms: Vec<usize> = self
            .types
            .iter()
            .zip(prefix)
            .flat_map(|(t, &n)| t.rooms[..n].iter().copied())
            .collect();
        rooms.sort_unstable();
        rooms
    }

    fn leaf(&mut self, prefix: &[usize], lb: ScaledCost) {
        let n_open: usize = prefix.iter().sum();
        if self.p.slots_decouple() && !self.p.same_room {
            self.flow_leaf(prefix, n_open);
        } else {
            let mut allowed = vec![false; self.p.n_rooms];
            for s in self.open_rooms(prefix) {
                allowed[s] = true;
            }
            let mut partial = PartialAssignment::for_problem(self.p);
            let mut last = vec![None; self.p.n_disciplines()];
            self.meeting_search(&mut partial, &allowed, &mut last, n_open);
            if self.aborted {
                self.discard(lb);
            }
        }
    }

    /// Leaf without the day or same-room toggles: read the transportation
    /// solution, spread it over the open rooms, then colour slots.
    fn flow_leaf(&mut self, prefix: &[usize], n_open: usize) {
        let p = self.p;
        let Some(_) = self.net.min_penalty(prefix, p.n_slots) else {
            return;
        };
        let slots = p.n_slots;
        // per type: (class, amount) in class order
        let mut per_type: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.types.len()];
        for &(c, k, e) in &self.net.assign_edges {
            let f = self.net.flow.flow(e);
            if f > 0 {
                per_type[k].push((c, f as usize));
            }
        }
        let mut used = 0u64;
        let mut penalty = 0u64;
        let mut room_class: Vec<(usize, usize, usize)> = Vec::new(); // (class, room, count)
        for (k, loads) in per_type.iter().enumerate() {
            let rooms = &self.types[k].rooms[..prefix[k]];
            let mut r = 0;
            let mut room_left = slots;
            for &(c, mut amount) in loads {
                if self.classes[c].pcd {
                    penalty += amount as u64 * self.types[k].floor as u64;
                }
                while amount > 0 {
                    let take = amount.min(room_left);
                    room_class.push((c, rooms[r], take));
                    if room_left == slots {
                        used += 1;
                    }
                    amount -= take;
                    room_left -= take;
                    if room_left == 0 {
                        r += 1;
                        room_left = slots;
                    }
                }
            }
        }
        let cost = p.cost(used, penalty);
        let improves = match &self.incumbent {
            None => true,
            Some(inc) => cost < inc.cost || (inc.accept_ties && cost == inc.cost),
        };
        if !improves {
            return;
        }
        // hand each class's room counts to its members in order
        let mut remaining: Vec<u32> = p.freq.clone();
        let mut cursor = vec![0usize; self.classes.len()];
        let mut edges = Vec::with_capacity(p.total_meetings() as usize);
        room_class.sort_by_key(|&(c, s, _)| (c, s));
        for &(c, s, count) in &room_class {
            let members = &self.classes[c].members;
            for _ in 0..count {
                while remaining[members[cursor[c]]] == 0 {
                    cursor[c] += 1;
                }
                let d = members[cursor[c]];
                remaining[d] -= 1;
                edges.push((d, s));
            }
        }
        edges.sort_unstable();
        let colors = color_bipartite(p.n_disciplines(), p.n_rooms, &edges, slots)
            .expect("room loads and frequencies are within |T|");
        let cells = edges.iter().zip(colors).map(|(&(d, s), t)| (d, t, s)).collect();
        self.offer(cost, cells, n_open);
    }

    fn meeting_search(
        &mut self,
        partial: &mut PartialAssignment,
        allowed: &[bool],
        last: &mut Vec<Option<usize>>,
        n_open: usize,
    ) {
        let p = self.p;
        if partial.is_complete() {
            let cost = p.cost(partial.rooms_used(), partial.penalty());
            self.offer(cost, partial.cells().collect(), n_open);
            return;
        }
        if self.out_of_budget() {
            self.aborted = true;
            return;
        }
        self.nodes += 1;
        let Some(lb) = lower_bound_scaled(p, partial, Some(allowed)) else {
            return;
        };
        if self.prunes(lb) {
            self.discard(lb);
            return;
        }
        // most constrained discipline first
        let mut pick: Option<(usize, usize)> = None;
        for d in 0..p.n_disciplines() {
            if partial.remaining_of(p, d) == 0 {
                continue;
            }
            let n = partial.feasible_cells(p, d, Some(allowed), last[d]);
            if pick.is_none_or(|(best, _)| n < best) {
                pick = Some((n, d));
            }
        }
        let Some((n, d)) = pick else { return };
        if n == 0 {
            return;
        }
        let start = last[d].map_or(0, |t| t + 1);
        let mut cells: Vec<(u64, bool, usize, usize)> = Vec::with_capacity(n);
        for &s in &p.eligible[d] {
            if !allowed[s] {
                continue;
            }
            for t in start..p.n_slots {
                if partial.can_place(p, d, t, s) {
                    cells.push((p.penalty_of(d, s), partial.room_load(s) == 0, t, s));
                }
            }
        }
        cells.sort_unstable();
        for (_, _, t, s) in cells {
            let saved = last[d];
            partial.push(p, d, t, s);
            last[d] = Some(t);
            self.meeting_search(partial, allowed, last, n_open);
            last[d] = saved;
            partial.pop(p, d);
            if self.aborted {
                return;
            }
        }
    }
}

pub(crate) fn solve(model: &Model, limits: &SolveLimits) -> Result<SolveOutcome> {
    let start = Instant::now();
    let p = Problem::from_model(model);
    let mut search = Search::new(&p, limits, start);
    if let Ok(warm) = greedy(&p) {
        let cost = p.cost(warm.rooms_used(), warm.penalty());
        debug!("greedy warm start {}", to_real(cost));
        search.incumbent = Some(Incumbent {
            cost,
            accept_ties: true,
            cells: warm.cells().collect(),
            rooms_open: warm.rooms_used() as usize,
        });
    }
    search.run()?;

    let proven = !search.aborted;
    let Some(inc) = search.incumbent.take() else {
        if proven {
            return Err(Error::Infeasible(
                "exhaustive search found no assignment satisfying every constraint".into(),
            ));
        }
        return Err(Error::NoSolution {
            best_bound: to_real(search.open_bound),
        });
    };
    let bound = inc.cost.min(search.open_bound);
    let assignment = Assignment::from_indices(model.instance, inc.cells, "exact");
    let breakdown = objective_value(&assignment, model.instance, model.alpha)?;
    let stats = SolveStats {
        nodes_explored: search.nodes,
        elapsed: start.elapsed().as_secs_f64(),
        best_bound: to_real(bound),
        incumbent_fo: to_real(inc.cost),
        proven_optimal: proven,
        gap: to_real(inc.cost - bound),
        rooms_open: inc.rooms_open,
    };
    info!(
        "alpha {}: fo {} after {} nodes ({}; {} rooms open by y, {} used)",
        model.alpha,
        stats.incumbent_fo,
        stats.nodes_explored,
        if proven { "optimal" } else { "limit reached" },
        stats.rooms_open,
        breakdown.obj1
    );
    Ok(SolveOutcome {
        assignment,
        breakdown,
        stats,
    })
}

//! Alpha sweeps, dominance flags and the calibration table.

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::instance::{validate_instance, Instance};
use crate::model::build_model;
use crate::objective::{Alpha, ObjectiveBreakdown};
use crate::solver::{solve_exact, SolveLimits, SolveStats};
use rayon::prelude::*;
use std::fmt::Write as _;

pub const DEFAULT_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

pub const CALIBRATION_HEADER: &str = "alpha,fo,obj1,obj2,w1,w2,pareto,proven_optimal,nodes,seconds";

#[derive(Debug, Clone)]
pub struct CalibrationRow {
    pub alpha: Alpha,
    pub breakdown: ObjectiveBreakdown,
    pub stats: SolveStats,
    pub pareto: bool,
    pub assignment: Assignment,
}

#[derive(Debug, Clone, Default)]
pub struct CalibrationTable {
    pub rows: Vec<CalibrationRow>,
}

/// `0, step, 2*step, ...` up to and always including 1.
pub fn grid_from_step(step: f64) -> Result<Vec<Alpha>> {
    let step = Alpha::new(step)?;
    if step == Alpha::ZERO {
        return Err(Error::Format("grid step must be positive".into()));
    }
    let mut out = Vec::new();
    let mut k = 0i64;
    while k < Alpha::SCALE {
        out.push(Alpha::from_ten_thousandths(k as u16)?);
        k += step.ten_thousandths();
    }
    out.push(Alpha::ONE);
    Ok(out)
}

/// Parses and orders a grid; duplicates collapse to one row.
pub fn normalize_grid(values: &[f64]) -> Result<Vec<Alpha>> {
    let mut alphas = values.iter().map(|&v| Alpha::new(v)).collect::<Result<Vec<_>>>()?;
    alphas.sort();
    alphas.dedup();
    Ok(alphas)
}

/// Solves every alpha independently, on at most `jobs` threads, and returns
/// the rows in increasing alpha with dominance flags set.
pub fn sweep(inst: &Instance, alphas: &[Alpha], limits: &SolveLimits, jobs: Option<usize>) -> Result<CalibrationTable> {
    let violations = validate_instance(inst);
    if !violations.is_empty() {
        return Err(Error::InvalidInstance(violations));
    }
    let mut alphas = alphas.to_vec();
    alphas.sort();
    alphas.dedup();
    let solve_row = |&alpha: &Alpha| -> Result<CalibrationRow> {
        let model = build_model(inst, alpha)?;
        let out = solve_exact(&model, limits)?;
        Ok(CalibrationRow {
            alpha,
            breakdown: out.breakdown,
            stats: out.stats,
            pareto: false,
            assignment: out.assignment,
        })
    };
    let rows: Result<Vec<_>> = match jobs {
        Some(1) => alphas.iter().map(solve_row).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Format(format!("cannot start worker pool: {e}")))?
            .install(|| alphas.par_iter().map(solve_row).collect()),
        None => alphas.par_iter().map(solve_row).collect(),
    };
    Ok(dominance_analysis(CalibrationTable { rows: rows? }))
}

/// Non-dominated flags for `(obj1, obj2)` pairs: a pair is dominated when
/// another is no worse in both terms and strictly better in one.
pub fn pareto_flags(pairs: &[(u64, u64)]) -> Vec<bool> {
    pairs
        .iter()
        .map(|&(a1, a2)| {
            !pairs
                .iter()
                .any(|&(b1, b2)| b1 <= a1 && b2 <= a2 && (b1 < a1 || b2 < a2))
        })
        .collect()
}

pub fn dominance_analysis(mut table: CalibrationTable) -> CalibrationTable {
    let pairs: Vec<_> = table.rows.iter().map(|r| (r.breakdown.obj1, r.breakdown.obj2)).collect();
    for (row, flag) in table.rows.iter_mut().zip(pareto_flags(&pairs)) {
        row.pareto = flag;
    }
    table
}

impl CalibrationTable {
    pub fn all_proven(&self) -> bool {
        self.rows.iter().all(|r| r.stats.proven_optimal)
    }

    /// Breaches of the weighted-sum exchange argument and of the endpoint
    /// pattern. Only meaningful when every row is proven optimal.
    pub fn monotonicity_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for w in self.rows.windows(2) {
            let (a, b) = (&w[0].breakdown, &w[1].breakdown);
            if b.obj1 < a.obj1 {
                out.push(format!("obj1 drops from {} to {} between alpha {} and {}", a.obj1, b.obj1, a.alpha, b.alpha));
            }
            if b.obj2 > a.obj2 {
                out.push(format!("obj2 rises from {} to {} between alpha {} and {}", a.obj2, b.obj2, a.alpha, b.alpha));
            }
        }
        for r in &self.rows {
            if r.alpha == Alpha::ZERO && r.breakdown.w2 != 0.0 {
                out.push(format!("w2 = {} at alpha 0", r.breakdown.w2));
            }
            if r.alpha == Alpha::ONE && r.breakdown.w1 != 0.0 {
                out.push(format!("w1 = {} at alpha 1", r.breakdown.w1));
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CALIBRATION_HEADER);
        s.push('\n');
        for r in &self.rows {
            let b = &r.breakdown;
            let _ = writeln!(
                s,
                "{:.4},{:.4},{},{},{:.4},{:.4},{},{},{},{:.4}",
                b.alpha,
                b.fo,
                b.obj1,
                b.obj2,
                b.w1,
                b.w2,
                r.pareto,
                r.stats.proven_optimal,
                r.stats.nodes_explored,
                reported_seconds(r.stats.elapsed),
            );
        }
        s
    }

    /// Aligned text rendering for terminals.
    pub fn render(&self) -> String {
        let mut s = format!(
            "{:>6} {:>10} {:>5} {:>5} {:>10} {:>10} {:>6} {:>7} {:>6}\n",
            "alpha", "FO", "OBJ1", "OBJ2", "OBJ_W1", "OBJ_W2", "pareto", "optimal", "y-open"
        );
        for r in &self.rows {
            let b = &r.breakdown;
            let _ = writeln!(
                s,
                "{:>6} {:>10.4} {:>5} {:>5} {:>10.4} {:>10.4} {:>6} {:>7} {:>6}",
                r.alpha.value(),
                b.fo,
                b.obj1,
                b.obj2,
                b.w1,
                b.w2,
                if r.pareto { "yes" } else { "no" },
                if r.stats.proven_optimal { "yes" } else { "no" },
                r.stats.rooms_open,
            );
        }
        s
    }
}

/// Wall time as written to output files: floored to hundredths so that fast
/// runs produce identical bytes.
pub fn reported_seconds(elapsed: f64) -> f64 {
    (elapsed * 100.0).floor() / 100.0
}

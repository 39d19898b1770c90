mod common;

use common::{enumeration_size, for_each_feasible, fo, optimum};
use pas_core::error::Error;
use pas_core::random::{random_instance, RandomSpec};
use pas_core::solver::{brute_force, lower_bound, solve_exact, PartialAssignment, SolveLimits, DEFAULT_CELL_LIMIT};
use pas_core::{build_model, check_feasible, Alpha};

const ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn specs() -> Vec<RandomSpec> {
    let mut out = Vec::new();
    for (same_room, distinct_days) in [(false, false), (true, false), (false, true), (true, true)] {
        out.push(RandomSpec {
            same_room,
            distinct_days,
            ..RandomSpec::tiny()
        });
    }
    out
}

#[test]
fn exact_matches_brute_force_and_enumeration() {
    let mut pairs = 0;
    for spec in specs() {
        for seed in 0..60 {
            let inst = random_instance(seed, &spec);
            let small = enumeration_size(&inst) < 2e4;
            for a in ALPHAS {
                let alpha = Alpha::new(a).unwrap();
                let model = build_model(&inst, alpha).unwrap();
                let exact = solve_exact(&model, &SolveLimits::unlimited());
                let brute = brute_force(&inst, alpha, DEFAULT_CELL_LIMIT);
                match (exact, brute) {
                    (Ok(e), Ok((b, bb))) => {
                        assert!(e.stats.proven_optimal);
                        assert_eq!(e.breakdown.fo, bb.fo, "seed {seed} alpha {a}: {inst:?}");
                        assert!(check_feasible(&e.assignment, &inst).is_empty());
                        assert!(check_feasible(&b, &inst).is_empty());
                        if small {
                            let o = optimum(&inst, a).expect("oracle finds the same feasible point");
                            assert!((o - e.breakdown.fo).abs() < 1e-9, "seed {seed} alpha {a}");
                        }
                        pairs += 1;
                    }
                    (Err(Error::Infeasible(_)), Err(Error::Infeasible(_))) => {
                        if small {
                            assert!(optimum(&inst, a).is_none());
                        }
                    }
                    (e, b) => panic!("seed {seed} alpha {a}: {e:?} vs {b:?}"),
                }
            }
        }
    }
    assert!(pairs >= 250, "only {pairs} feasible pairs");
}

/// Every prefix of every feasible point: the bound never exceeds the best
/// completion of that prefix.
#[test]
fn lower_bound_is_admissible() {
    let mut checked = 0;
    for spec in specs() {
        for seed in 100..140 {
            let inst = random_instance(seed, &spec);
            if enumeration_size(&inst) > 5e3 {
                continue;
            }
            let mut all = Vec::new();
            for_each_feasible(&inst, |c| all.push(c.clone()));
            for a in ALPHAS {
                let model = build_model(&inst, Alpha::new(a).unwrap()).unwrap();
                for cells in all.iter().step_by(7) {
                    for k in 0..=cells.len() {
                        let prefix = &cells[..k];
                        let mut partial = PartialAssignment::new(&model);
                        for &(d, t, s) in prefix {
                            partial.place(&model, d, t, s).unwrap();
                        }
                        let best = all
                            .iter()
                            .filter(|c| prefix.iter().all(|p| c.contains(p)))
                            .map(|c| fo(&inst, c, a))
                            .fold(f64::INFINITY, f64::min);
                        let lb = lower_bound(&model, &partial);
                        assert!(lb <= best + 1e-9, "seed {seed} alpha {a} prefix {prefix:?}: {lb} > {best}");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100);
}

/// Prefixes that may have no completion at all: an infinite bound is
/// allowed only when nothing extends them.
#[test]
fn arbitrary_prefixes_are_admissible() {
    let mut infinite = 0;
    for seed in 200..260 {
        let inst = random_instance(seed, &RandomSpec::tiny());
        if inst.disciplines.is_empty() || enumeration_size(&inst) > 5e3 {
            continue;
        }
        let mut all = Vec::new();
        for_each_feasible(&inst, |c| all.push(c.clone()));
        let model = build_model(&inst, Alpha::new(0.75).unwrap()).unwrap();
        let (nd, nt, ns) = (inst.disciplines.len(), inst.timeslots.len(), inst.rooms.len());
        let cells: Vec<_> = (0..nd)
            .flat_map(|d| (0..nt).flat_map(move |t| (0..ns).map(move |s| (d, t, s))))
            .collect();
        for (i, &a) in cells.iter().enumerate() {
            for &b in cells[i..].iter().step_by(3) {
                let mut p = PartialAssignment::new(&model);
                if p.place(&model, a.0, a.1, a.2).is_err() {
                    continue;
                }
                let prefix: Vec<_> = if a != b && p.place(&model, b.0, b.1, b.2).is_ok() { vec![a, b] } else { vec![a] };
                let best = all
                    .iter()
                    .filter(|c| prefix.iter().all(|x| c.contains(x)))
                    .map(|c| fo(&inst, c, 0.75))
                    .fold(f64::INFINITY, f64::min);
                let lb = lower_bound(&model, &p);
                assert!(lb <= best + 1e-9, "seed {seed} prefix {prefix:?}: {lb} > {best}");
                if lb.is_infinite() {
                    infinite += 1;
                }
            }
        }
    }
    assert!(infinite > 0, "no dead prefix was recognised");
}

use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::report::params;
use super::{flattening_sweep, AnalysisError, Report, Result, SweepFamily};
use crate::netgraph::{build_torus_grid, TNGraph, WeightProfile};
use crate::tensor::{
    bound_contract, network_contract, random_tensor, write_tensor, Assignment, Axis, RandomMode,
    ScalarMode, SparseTensor,
};

/// Largest state (in cells, `k^(2N)`) the conjecture search will sample.
pub const CONJECTURE_MAX_CELLS: u128 = 1 << 20;

#[derive(Clone, Debug)]
pub struct ConjectureOptions {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub scalar: ScalarMode,
    /// Re-rank the best witness in rational arithmetic.
    pub audit: bool,
    /// Role-labelled vertex tensor to evaluate as a bound state alongside
    /// the random trials.
    pub seeded: Option<SparseTensor>,
}

fn random_assignment(g: &TNGraph, seed: u64) -> Result<Assignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut asgn = Assignment::new();
    for v in g.vertex_ids() {
        let axes: Vec<Axis> = g
            .vertex_space_shape(v)?
            .into_iter()
            .map(|a| Axis::edge(a.edge, a.dim, a.dual))
            .collect();
        asgn.insert(
            v,
            random_tensor(axes, rng.next_u64(), RandomMode::DenseSmallInt)?,
        );
    }
    Ok(asgn)
}

struct Trial {
    state: SparseTensor,
    saturated: usize,
    dropping: Vec<String>,
    bounds_hold: bool,
}

fn evaluate(g: &TNGraph, state: SparseTensor, scalar: ScalarMode) -> Result<Trial> {
    let reports = flattening_sweep(Some(g), &state, &SweepFamily::All, scalar)?;
    let dropping = reports
        .iter()
        .filter(|r| !r.saturated)
        .map(|r| {
            let names: Vec<String> = r.spec.rows.iter().map(|l| label_vertex(g, l)).collect();
            format!("{{{}}}: rank {} of {}", names.join(","), r.rank, r.cap())
        })
        .collect();
    Ok(Trial {
        saturated: reports.iter().filter(|r| r.saturated).count(),
        bounds_hold: reports.iter().all(|r| r.within_bounds()),
        state,
        dropping,
    })
}

fn label_vertex(g: &TNGraph, l: &crate::tensor::Label) -> String {
    match l {
        crate::tensor::Label::Edge(e) => g
            .edge(*e)
            .ok()
            .and_then(|e| e.owner())
            .map_or_else(|| l.to_string(), |v| g.label(v).to_string()),
        _ => l.to_string(),
    }
}

/// Random per-vertex tensors on the 2xN torus with weights `(d, k)`; every
/// flattening of each contracted state is compared with its bound. Reports
/// evidence only.
pub fn conjecture_search(opts: &ConjectureOptions) -> Result<Report> {
    let start = Instant::now();
    let mut report = Report::new(
        "conjecture-search",
        params([
            ("N", json!(opts.n)),
            ("d", json!(opts.d)),
            ("k", json!(opts.k)),
            ("trials", json!(opts.trials)),
            ("seeded", json!(opts.seeded.is_some())),
        ]),
        opts.seed,
        opts.scalar,
    );
    let cells = (opts.k as u128).checked_pow(2 * opts.n as u32);
    if cells.is_none_or(|c| c > CONJECTURE_MAX_CELLS) {
        return Err(AnalysisError::Guard(format!(
            "k^(2N) exceeds the search limit of {CONJECTURE_MAX_CELLS}"
        )));
    }
    let g = build_torus_grid(2, opts.n, WeightProfile::new(opts.d, opts.k))?;
    report.graph = Some(g.descriptor());
    let total = (1usize << (2 * opts.n - 1)) - 1;
    report.derive("flattenings_per_trial", total);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let seeds: Vec<u64> = (0..opts.trials).map(|_| rng.next_u64()).collect();
    let trials: Vec<Trial> = seeds
        .par_iter()
        .map(|&s| {
            let asgn = random_assignment(&g, s)?;
            evaluate(&g, network_contract(&g, &asgn, None)?, opts.scalar)
        })
        .collect::<Result<_>>()?;

    let counts: Vec<usize> = trials.iter().map(|t| t.saturated).collect();
    let best_so_far: Vec<usize> = counts
        .iter()
        .scan(0, |m, &c| {
            *m = (*m).max(c);
            Some(*m)
        })
        .collect();
    report.derive("saturated_per_trial", &counts);
    report.derive("best_so_far", &best_so_far);
    let all_hold = trials.iter().all(|t| t.bounds_hold);
    if let Some((i, best)) = trials
        .iter()
        .enumerate()
        .max_by_key(|(i, t)| (t.saturated, std::cmp::Reverse(*i)))
    {
        report.derive("best_trial", i);
        report.derive("best_saturated", best.saturated);
        report.derive("best_dropping", &best.dropping);
        report.derive("best_witness", write_tensor(&best.state));
        if opts.audit {
            let rational = flattening_sweep(
                Some(&g),
                &best.state,
                &SweepFamily::All,
                ScalarMode::Rational,
            )?;
            let again = rational.iter().filter(|r| r.saturated).count();
            report.derive("audit_rational_saturated", again);
            report.derive("audit_agrees", again == best.saturated);
        }
    }

    if let Some(t) = &opts.seeded {
        let dims: Vec<usize> = t.axes().iter().map(|a| a.dim).collect();
        let mut want = vec![opts.d; dims.len()];
        want[0] = opts.k;
        if dims != want {
            return Err(AnalysisError::Unsupported(format!(
                "seeded tensor has dimensions {dims:?}; k = {} and d = {} need {want:?}",
                opts.k, opts.d
            )));
        }
        let state = bound_contract(&g, t)?;
        let trial = evaluate(&g, state, opts.scalar)?;
        report.derive("seeded_saturated", trial.saturated);
        report.derive("seeded_dropping", &trial.dropping);
        report.derive("seeded_bounds_hold", trial.bounds_hold);
        if opts.audit {
            let rational = flattening_sweep(
                Some(&g),
                &trial.state,
                &SweepFamily::All,
                ScalarMode::Rational,
            )?;
            report.derive(
                "seeded_audit_agrees",
                rational.iter().filter(|r| r.saturated).count() == trial.saturated,
            );
        }
    }
    report.derive("bounds_hold", all_hold);
    report
        .notes
        .push("exploratory search; no verdict on the conjecture".into());
    if !all_hold {
        report.verdict = super::Verdict::Fail;
        report
            .notes
            .push("a flattening exceeds its min-cut bound".into());
    }
    report.timing_ms = Some(start.elapsed().as_millis() as u64);
    Ok(report)
}

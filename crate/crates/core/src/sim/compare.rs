use std::fmt::Write as _;
use std::thread;

use serde::{Deserialize, Serialize};

use super::engine::run_detailed;
use super::scenario::Scenario;
use super::SimError;
use crate::routing::ProtocolKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub protocol: ProtocolKind,
    pub seed: u64,
    /// Average residual fraction at the end of the run.
    pub avg_residual: f64,
    /// Minimum residual fraction at the end of the run.
    pub min_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonAggregate {
    pub protocol: ProtocolKind,
    pub runs: usize,
    pub mean_avg_residual: f64,
    pub mean_min_residual: f64,
}

/// Paired-seed results: rows are ordered by protocol (as requested), then seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub aggregates: Vec<ComparisonAggregate>,
}

impl Comparison {
    pub fn rows_for(&self, protocol: ProtocolKind) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(move |r| r.protocol == protocol)
    }

    /// Number of seeds on which `a`'s average residual is strictly above `b`'s.
    pub fn wins(&self, a: ProtocolKind, b: ProtocolKind) -> usize {
        self.rows_for(a)
            .filter(|ra| {
                self.rows_for(b)
                    .any(|rb| rb.seed == ra.seed && ra.avg_residual > rb.avg_residual)
            })
            .count()
    }
}

/// Runs every protocol on seeds `base.seed .. base.seed + repetitions`.
/// Runs go to worker threads; results are merged in seed order.
pub fn compare_protocols(
    base: &Scenario,
    protocols: &[ProtocolKind],
    repetitions: usize,
) -> Result<Comparison, SimError> {
    if repetitions == 0 {
        return Err(SimError::InvalidScenario(
            "repetitions must be at least 1".into(),
        ));
    }
    if protocols.is_empty() {
        return Err(SimError::InvalidScenario(
            "at least one protocol is required".into(),
        ));
    }
    base.validate()?;
    let jobs: Vec<Scenario> = protocols
        .iter()
        .flat_map(|&protocol| {
            (0..repetitions as u64).map(move |i| Scenario {
                protocol,
                seed: base.seed.wrapping_add(i),
                ..base.clone()
            })
        })
        .collect();
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(jobs.len());
    let mut results: Vec<Option<Result<ComparisonRow, SimError>>> = vec![None; jobs.len()];
    thread::scope(|scope| {
        let chunks = results.chunks_mut(jobs.len().div_ceil(workers));
        for (c, slots) in chunks.enumerate() {
            let offset = c * jobs.len().div_ceil(workers);
            let jobs = &jobs;
            scope.spawn(move || {
                for (j, slot) in slots.iter_mut().enumerate() {
                    let s = &jobs[offset + j];
                    *slot = Some(run_detailed(s).map(|out| ComparisonRow {
                        protocol: s.protocol,
                        seed: s.seed,
                        avg_residual: out.summary.final_avg_residual,
                        min_residual: out.summary.final_min_residual,
                    }));
                }
            });
        }
    });
    let rows = results
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect::<Result<Vec<_>, _>>()?;
    let aggregates = protocols
        .iter()
        .map(|&protocol| {
            let mine: Vec<_> = rows.iter().filter(|r| r.protocol == protocol).collect();
            let n = mine.len() as f64;
            ComparisonAggregate {
                protocol,
                runs: mine.len(),
                mean_avg_residual: mine.iter().map(|r| r.avg_residual).sum::<f64>() / n,
                mean_min_residual: mine.iter().map(|r| r.min_residual).sum::<f64>() / n,
            }
        })
        .collect();
    Ok(Comparison { rows, aggregates })
}

/// `protocol,seed,avg_residual,min_residual` rows followed by one
/// aggregate row per protocol whose seed column reads `mean`.
pub fn comparison_csv(c: &Comparison) -> String {
    let mut out = String::from("protocol,seed,avg_residual,min_residual\n");
    for r in &c.rows {
        let _ = writeln!(
            out,
            "{},{},{:.9},{:.9}",
            r.protocol.name(),
            r.seed,
            r.avg_residual,
            r.min_residual
        );
    }
    for a in &c.aggregates {
        let _ = writeln!(
            out,
            "{},mean,{:.9},{:.9}",
            a.protocol.name(),
            a.mean_avg_residual,
            a.mean_min_residual
        );
    }
    out
}

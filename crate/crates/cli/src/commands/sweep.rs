//! `sweep`: train and evaluate the dual models over the (cl_phase, dim) grid
//! and write one tidy CSV row per metric per cell.

use std::fmt::Write as _;
use std::fs;
use std::sync::Arc;

use dualkge_core::eval::{evaluate_link_prediction, EvalOptions};
use dualkge_core::trainer::train_dual;
use dualkge_core::{KnowledgeGraph, Vocabulary};

use crate::cli::{ModeArg, SweepArgs};
use crate::commands::init_thread_pool;
use crate::config::resolve_train;
use crate::error::{AppError, Result};
use crate::formats::{parse_triples, parse_triples_strict};

const SWEEP_METRICS: [&str; 3] = ["mrr_avg", "hits@1_avg", "hits@10_avg"];

pub fn run(args: &SweepArgs) -> Result<()> {
    if args.cl_phases.is_empty() || args.dims.is_empty() {
        return Err(AppError::usage("--cl-phases and --dims must be non-empty"));
    }
    let resolved = resolve_train(&args.opts, Some(ModeArg::Dual))?;
    init_thread_pool(resolved.threads);

    let mut vocab = Vocabulary::new();
    let pos_raw = parse_triples(resolved.pos.as_ref().expect("dual requires --pos"), &mut vocab)?;
    let neg_raw = parse_triples(resolved.neg.as_ref().expect("dual requires --neg"), &mut vocab)?;
    let vocab = Arc::new(vocab);
    let pos = KnowledgeGraph::new(vocab.clone(), pos_raw)?;
    let neg = KnowledgeGraph::new(vocab.clone(), neg_raw)?;
    let test = KnowledgeGraph::new(vocab.clone(), parse_triples_strict(&args.test, &vocab)?)?;

    let mut csv = String::from("cl_phase,dim,metric,value\n");
    for &cl_phase in &args.cl_phases {
        for &dim in &args.dims {
            let mut cfg = resolved.cfg.clone();
            cfg.cl_phase = cl_phase;
            cfg.dim = dim;
            let cell = (|| -> Result<[f64; 3]> {
                let state = train_dual(&pos, &neg, &cfg)?;
                let scorer = state.pos_model.scorer();
                let report = evaluate_link_prediction(
                    &scorer,
                    &test,
                    &pos,
                    &[1, 10],
                    EvalOptions::default(),
                )?;
                Ok([report.mrr_avg, report.hits[&1].avg, report.hits[&10].avg])
            })();
            match cell {
                Ok(values) => {
                    for (metric, value) in SWEEP_METRICS.iter().zip(values) {
                        writeln!(csv, "{cl_phase},{dim},{metric},{value}")
                            .expect("writing to string cannot fail");
                    }
                }
                Err(e) => {
                    let msg = e.to_string().replace([',', '\n'], ";");
                    writeln!(csv, "{cl_phase},{dim},error,{msg}")
                        .expect("writing to string cannot fail");
                }
            }
        }
    }
    fs::write(&args.out, csv).map_err(|e| AppError::io(&args.out, e))?;
    println!(
        "swept {} cells ({} cl_phase values x {} dims) -> {}",
        args.cl_phases.len() * args.dims.len(),
        args.cl_phases.len(),
        args.dims.len(),
        args.out.display()
    );
    Ok(())
}

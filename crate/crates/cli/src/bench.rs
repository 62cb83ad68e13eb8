use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use serde::Serialize;

use cetsp::solver::{solve_with, SolveParams};

use crate::commands::generate_instance;
use crate::{BenchArgs, Outcome};

#[derive(Serialize)]
struct Row {
    n: usize,
    seed: u64,
    phase: &'static str,
    millis: f64,
    tour_points: usize,
    length: f64,
}

/// One row per phase plus a `total` row for every (n, repetition).
/// With several timing runs each phase reports its fastest run.
pub fn run(args: BenchArgs) -> Result<Outcome> {
    if args.n.contains(&0) {
        bail!("instance sizes must be positive");
    }
    let sink: Box<dyn std::io::Write> = match &args.out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    let mut csv = csv::Writer::from_writer(sink);

    if !args.no_warmup {
        let warm = generate_instance(args.kind, 2048, args.limit, args.seed);
        solve_with(&warm, &SolveParams { seed: args.seed, ..SolveParams::default() }, false, |_| {})?;
    }

    for &n in &args.n {
        for rep in 0..args.reps {
            let seed = args.seed.wrapping_add(rep);
            let instance = generate_instance(args.kind, n, args.limit, seed);
            let params = SolveParams { seed, ..SolveParams::default() };

            let mut best: Vec<(&'static str, Duration)> = Vec::new();
            let mut output = None;
            for _ in 0..args.timing_runs {
                let mut phases = Vec::new();
                let start = Instant::now();
                let mut mark = start;
                let out = solve_with(&instance, &params, false, |phase| {
                    let now = Instant::now();
                    phases.push((phase.name(), now - mark));
                    mark = now;
                })?;
                phases.push(("total", start.elapsed()));
                if best.is_empty() {
                    best = phases;
                } else {
                    for (b, p) in best.iter_mut().zip(phases) {
                        b.1 = b.1.min(p.1);
                    }
                }
                output = Some(out);
            }
            let out = output.expect("at least one timing run");

            for (phase, elapsed) in best {
                csv.serialize(Row {
                    n,
                    seed,
                    phase,
                    millis: (elapsed.as_secs_f64() * 1e6).round() / 1e3,
                    tour_points: out.solution.tour.len(),
                    length: out.solution.length,
                })?;
            }
            csv.flush()?;
        }
    }
    Ok(Outcome::Success)
}

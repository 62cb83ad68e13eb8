use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use cetsp::io::{self, Instance, Violation};
use cetsp::local_opt::simulate_gadget;
use cetsp::solver::{solve_with, SolveParams};

use crate::{
    GadgetArgs, GenerateArgs, Kind, Outcome, ReconstructArgs, RenderArgs, SolveArgs, ValidateArgs,
};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

pub fn load_instance(path: &Path, radius: Option<f64>) -> Result<Instance> {
    let name = path.file_stem().map_or_else(|| "instance".into(), |s| s.to_string_lossy());
    io::parse_instance(name, &read(path)?, radius)
        .with_context(|| format!("parsing {}", path.display()))
}

pub fn generate_instance(kind: Kind, n: usize, limit: f64, seed: u64) -> Instance {
    match kind {
        Kind::Random => io::gen_random(n, limit, seed),
        Kind::Structured => io::gen_structured(n, seed),
    }
}

pub fn solve(args: SolveArgs) -> Result<Outcome> {
    let instance = load_instance(&args.instance, args.radius)?;
    if args.budget_factor < 0.0 {
        bail!("--budget-factor must be non-negative");
    }
    let base = SolveParams {
        seed: args.seed,
        k_cluster: args.k_cluster as usize,
        k_segments: args.k_segments as usize,
        newton: args.newton,
        reinsertion_budget_factor: (!args.no_budget).then_some(args.budget_factor),
    };

    let runs: Vec<_> = (0..args.restarts)
        .into_par_iter()
        .map(|i| {
            let params = SolveParams { seed: args.seed.wrapping_add(i), ..base.clone() };
            let start = Instant::now();
            let out = solve_with(&instance, &params, false, |_| {})?;
            Ok((out.solution, start.elapsed().as_secs_f64()))
        })
        .collect::<Result<_, cetsp::Error>>()?;

    // min_by keeps the first of equal lengths, i.e. the lowest seed
    let (best, _) = runs
        .iter()
        .min_by(|a, b| a.0.length.total_cmp(&b.0.length))
        .expect("at least one restart");
    let mean = runs.iter().map(|r| r.0.length).sum::<f64>() / runs.len() as f64;
    let ms_per_run = 1e3 * runs.iter().map(|r| r.1).sum::<f64>() / runs.len() as f64;

    if let Some(path) = &args.trace {
        let out = solve_with(&instance, &best.params, true, |_| {})?;
        let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
        serde_json::to_writer(BufWriter::new(file), &out.trace)?;
    }

    write(args.out.as_deref(), &io::write_solution(best))?;
    let summary = format!(
        "{} n={} best={} mean={} best_seed={} ms_per_run={:.3}",
        instance.name,
        instance.len(),
        best.length,
        mean,
        best.seed,
        ms_per_run
    );
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(Outcome::Success)
}

pub fn generate(args: GenerateArgs) -> Result<Outcome> {
    if args.n == 0 {
        bail!("--n must be positive");
    }
    if args.limit.is_nan() || args.limit <= 0.0 {
        bail!("--limit must be positive");
    }
    let instance = generate_instance(args.kind, args.n, args.limit, args.seed);
    write(args.out.as_deref(), &io::write_instance(&instance))?;
    Ok(Outcome::Success)
}

pub fn validate(args: ValidateArgs) -> Result<Outcome> {
    let instance = load_instance(&args.instance, args.radius)?;
    let solution = io::read_solution(&read(&args.solution)?)
        .with_context(|| format!("parsing {}", args.solution.display()))?;
    let report = io::validate(&instance, &solution, args.epsilon);
    if report.length_mismatch {
        eprintln!(
            "warning: reported length {} differs from recomputed {}",
            report.reported_length, report.recomputed_length
        );
    }
    if report.is_feasible() {
        println!(
            "ok: {} circles covered by {} points, length {}",
            instance.len(),
            solution.tour.len(),
            report.recomputed_length
        );
        return Ok(Outcome::Success);
    }
    println!("{} violation(s) at epsilon {}", report.violations.len(), report.epsilon);
    for v in &report.violations {
        match v {
            Violation::Unassigned { circle } => println!("circle {circle}: unassigned"),
            Violation::BadPoint { circle, point } => {
                println!("circle {circle}: tour has no point {point}")
            }
            Violation::Outside { circle, point, excess } => {
                println!("circle {circle}: point {point} is {excess} outside")
            }
            Violation::ExtraAssignments { count } => {
                println!("{count} assignment entries beyond the last circle")
            }
        }
    }
    Ok(Outcome::Violation)
}

pub fn render(args: RenderArgs) -> Result<Outcome> {
    let instance = load_instance(&args.instance, args.radius)?;
    let solution = io::read_solution(&read(&args.solution)?)
        .with_context(|| format!("parsing {}", args.solution.display()))?;
    write(Some(&args.out), &io::emit_svg(&instance, &solution))?;
    Ok(Outcome::Success)
}

pub fn reconstruct(args: ReconstructArgs) -> Result<Outcome> {
    let centers = io::parse_points(&read(&args.centers)?)
        .with_context(|| format!("parsing {}", args.centers.display()))?;
    let text = read(&args.tour)?;
    let tour = if text.trim_start().starts_with('{') {
        io::read_solution(&text)?.tour
    } else {
        io::parse_points(&text)?
    };
    let r = io::reconstruct_radius(&centers, &tour)?;
    println!("{r}");
    Ok(Outcome::Success)
}

pub fn gadget(args: GadgetArgs) -> Result<Outcome> {
    let reports: Vec<_> = (0..args.seeds).into_par_iter().map(|s| simulate_gadget(args.n, s)).collect();
    let max_x = reports.iter().map(|r| r.extra_ops).max().unwrap_or(0);
    let resets: u64 = reports.iter().map(|r| r.resets).sum();
    let all_terminated = reports.iter().all(|r| r.terminated);
    println!(
        "n={} seeds={} max_x={} bound={} resets={} terminated={}",
        args.n,
        args.seeds,
        max_x,
        2 * args.n,
        resets,
        all_terminated
    );
    if max_x > 2 * args.n || !all_terminated {
        eprintln!("gadget bound violated");
        return Ok(Outcome::Violation);
    }
    Ok(Outcome::Success)
}

//! Command-line front end: `minisdp <problem.dat-s> <solution.sol> [options]`.

use std::process::ExitCode;

use minisdp::{parse_problem, solve, write_solution, Options, Status};

fn usage() -> ExitCode {
    eprintln!("usage: minisdp <problem.dat-s> <solution.sol> [--tol T] [--maxiter N] [--verbose]");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut files: Vec<&str> = Vec::new();
    let mut opts = Options::default();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--tol" => match it.next().and_then(|v| v.parse::<f64>().ok()) {
                Some(t) if t > 0.0 => opts.tol = t,
                _ => return usage(),
            },
            "--maxiter" => match it.next().and_then(|v| v.parse::<usize>().ok()) {
                Some(n) if n > 0 => opts.max_iter = n,
                _ => return usage(),
            },
            "--verbose" => opts.verbose = true,
            "--help" | "-h" => {
                usage();
                return ExitCode::SUCCESS;
            }
            other if !other.starts_with('-') => files.push(other),
            _ => return usage(),
        }
    }
    let [input, output] = files.as_slice() else {
        return usage();
    };

    let text = match std::fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("minisdp: cannot read {input}: {e}");
            return ExitCode::FAILURE;
        }
    };
    let problem = match parse_problem(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("minisdp: {input}: {e}");
            return ExitCode::FAILURE;
        }
    };
    eprintln!(
        "minisdp: {} constraints, {} blocks, dimension {}",
        problem.m(),
        problem.block_sizes.len(),
        problem.block_sizes.iter().map(|s| s.unsigned_abs()).sum::<u64>()
    );

    let sol = match solve(&problem, &opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("minisdp: {e}");
            return ExitCode::FAILURE;
        }
    };
    eprintln!(
        "minisdp: {} after {} iterations, primal {:.9e}, dual {:.9e}, relgap {:.2e}",
        match sol.status {
            Status::Optimal => "optimal",
            Status::NearOptimal => "near-optimal",
            Status::Failed => "failed",
        },
        sol.iterations,
        sol.primal_objective,
        sol.dual_objective,
        sol.relative_gap
    );
    if sol.status == Status::Failed {
        return ExitCode::FAILURE;
    }

    let mut out = match std::fs::File::create(output) {
        Ok(f) => std::io::BufWriter::new(f),
        Err(e) => {
            eprintln!("minisdp: cannot create {output}: {e}");
            return ExitCode::FAILURE;
        }
    };
    if let Err(e) = write_solution(&mut out, &sol) {
        eprintln!("minisdp: cannot write {output}: {e}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}

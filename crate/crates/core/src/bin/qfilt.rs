use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qfilt::harness::{
    demo_experiments, run_scaling_experiment, validate, write_artifacts, DemoCase, ExperimentConfig,
    ScalingResult,
};

#[derive(Parser)]
#[command(name = "qfilt", version, about = "Particle filters for single-shot qubit measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scaling experiment described by a TOML or JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the built-in model and resampler self-checks.
    Validate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run both beta strategies on a built-in world with tuned settings.
    Demo {
        #[arg(long, value_parser = parse_case)]
        case: DemoCase,
        #[arg(long, default_value = "qfilt-demo")]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        repetitions: usize,
        #[arg(long, default_value_t = 75)]
        t_max: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_case(s: &str) -> Result<DemoCase, String> {
    s.parse().map_err(|e: qfilt::QfiltError| e.to_string())
}

fn report(results: &[ScalingResult]) {
    for res in results {
        let d = res.config.world.d;
        let window = res.median_epsilon(2 * d, 3 * d);
        let sparse = res.median_epsilon(5, d);
        println!(
            "{} {}: median eps t in [{}, {}] = {}, t in [5, {}] = {} ({:.1} s)",
            res.config.case,
            res.config.nmqa.beta_strategy.label(),
            2 * d,
            (3 * d).min(res.config.t_max),
            fmt_opt(window),
            d,
            fmt_opt(sparse),
            res.wall_time.as_secs_f64(),
        );
        if !res.failures.is_empty() {
            eprintln!("warning: {} trajectory attempts failed and were re-run", res.failures.len());
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |v| format!("{v:.3}"))
}

fn run(cli: Cli) -> qfilt::Result<bool> {
    match cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let result = run_scaling_experiment(&cfg)?;
            let results = [result];
            let (csv, manifest) = write_artifacts(&cfg.output_dir, &results)?;
            report(&results);
            println!("wrote {} and {}", csv.display(), manifest.display());
            Ok(true)
        }
        Command::Validate { seed } => {
            let mut all = true;
            for suite in validate::run_all(seed)? {
                let verdict = if suite.passed { "PASS" } else { "FAIL" };
                println!("{verdict} {}: {}", suite.name, suite.detail);
                all &= suite.passed;
            }
            Ok(all)
        }
        Command::Demo {
            case,
            out,
            repetitions,
            t_max,
            seed,
        } => {
            let results = demo_experiments(case, repetitions, t_max, seed)
                .iter()
                .map(run_scaling_experiment)
                .collect::<qfilt::Result<Vec<_>>>()?;
            let (csv, manifest) = write_artifacts(&out, &results)?;
            report(&results);
            println!("wrote {} and {}", csv.display(), manifest.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

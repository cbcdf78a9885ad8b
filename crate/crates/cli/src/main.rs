//! `bdge`: fit, test, sample and reproduce bivariate DGE count models.
//!
//! Exit status: 0 on success, 1 when a command ran but did not succeed
//! (non-convergence, failed reproduction check), 2 on usage or input errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use bdge::hypothesis::TestKind;
use bdge::EStepKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{FitSettings, Model, SampleModel};

#[derive(Parser)]
#[command(name = "bdge", version, about = "Discrete generalized exponential models for paired counts")]
struct Cli {
    /// Print the report as JSON instead of `path = value` lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model to a two-column CSV of counts.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = ModelArg::Bdge)]
        model: ModelArg,
        #[command(flatten)]
        opts: FitOpts,
        #[arg(long, default_value_t = 0.95)]
        ci_level: f64,
    },
    /// Likelihood-ratio test against the full bivariate model.
    Test {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        test: TestArg,
        #[command(flatten)]
        opts: FitOpts,
    },
    /// Rerun the football case study and check it against published values.
    Reproduce {
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(5..=5))]
        section: u32,
        /// Dataset to use instead of the bundled fixture.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 14)]
        gof_df: u32,
        #[command(flatten)]
        opts: FitOpts,
    },
    /// Draw a seeded sample and write it as CSV.
    Sample {
        #[arg(long, value_enum)]
        model: SampleArg,
        /// Comma-separated: alpha1,alpha2,alpha3,p for bdge; alpha,p for dge.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        params: Vec<f64>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct FitOpts {
    /// Stop when the log-likelihood changes by less than this.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Recorded in the report; every fit is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = EStepArg::Prediction)]
    e_step: EStepArg,
}

impl FitOpts {
    fn settings(&self) -> FitSettings {
        let e_step = match self.e_step {
            EStepArg::Prediction => EStepKind::Prediction,
            EStepArg::PredictionOverallMax => EStepKind::PredictionOverallMax,
            EStepArg::Posterior => EStepKind::Posterior,
        };
        FitSettings { tol: self.tol, max_iter: self.max_iter, seed: self.seed, e_step }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Bdge,
    Dge1,
    Dge2,
    Dgemax,
    Bvpois,
}

#[derive(Clone, Copy, ValueEnum)]
enum TestArg {
    EqualAll,
    Geometric,
    Independence,
    EqualA12,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleArg {
    Bdge,
    Dge,
}

#[derive(Clone, Copy, ValueEnum)]
enum EStepArg {
    Prediction,
    PredictionOverallMax,
    Posterior,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Fit { data, model, opts, ci_level } => {
            let model = match model {
                ModelArg::Bdge => Model::Bdge,
                ModelArg::Dge1 => Model::Dge1,
                ModelArg::Dge2 => Model::Dge2,
                ModelArg::Dgemax => Model::DgeMax,
                ModelArg::Bvpois => Model::BvPois,
            };
            commands::fit(data, model, opts.settings(), *ci_level)
        }
        Command::Test { data, test, opts } => {
            let test = match test {
                TestArg::EqualAll => TestKind::EqualAll,
                TestArg::Geometric => TestKind::Geometric,
                TestArg::Independence => TestKind::Independence,
                TestArg::EqualA12 => TestKind::EqualAlpha12,
            };
            commands::test(data, test, opts.settings())
        }
        Command::Reproduce { section, data, gof_df, opts } => {
            commands::reproduce(*section, data.as_ref(), opts.settings(), *gof_df)
        }
        Command::Sample { model, params, n, seed, out } => {
            let model = match model {
                SampleArg::Bdge => SampleModel::Bdge,
                SampleArg::Dge => SampleModel::Dge,
            };
            commands::sample(model, params, *n, *seed, out)
        }
    };
    match outcome {
        Ok(o) => {
            print!("{}", if cli.json { o.report.to_json() + "\n" } else { o.report.to_text() });
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use graphsr_core::data::{load_dataset, sample_seed, SrScenario};
use graphsr_core::diff::{Tape, Var};
use graphsr_core::graph::WeightedGraph;
use graphsr_core::metrics::{metric_mae, MetricReport};
use graphsr_core::models::edge_mae;
use graphsr_core::{Error, Result};

use graphsr_cli::checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
use graphsr_cli::config::Config;
use graphsr_cli::experiments::{
    self, fmt, mean, mix_seed, run_sr_fold, subject_pairs_for, SrHyper,
};
use graphsr_cli::train::kfold_splits;

#[derive(Parser)]
#[command(name = "graphsr", about = "Graph super-resolution experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and store a simulated scenario dataset
    GenData {
        /// scenario name (e.g. sbm-degree) or "all"
        scenario: String,
        #[arg(long, default_value = "data")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Train a single model described by a config file
    Train {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a checkpoint on a stored dataset
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Run one experiment family
    Experiment {
        /// node-vs-edge | simulated | connectome | sensitivity
        family: String,
        #[arg(long)]
        config: PathBuf,
    },
    /// Summarize result tables in a directory
    Report {
        #[arg(long)]
        results: PathBuf,
    },
}

fn gen_data(scenario: &str, out: &PathBuf, seed: u64) -> Result<()> {
    let names = if scenario == "all" {
        SrScenario::all_names()
    } else {
        vec![scenario.to_string()]
    };
    for name in names {
        let sc = SrScenario::from_name(&name)?;
        let dir = out.join(&name);
        graphsr_core::data::save_dataset(&dir, &sc, seed)?;
        println!("wrote {} samples to {}", sc.samples, dir.display());
    }
    Ok(())
}

fn train(config: &PathBuf) -> Result<()> {
    let cfg = Config::load(config)?;
    if cfg.models == "all" || cfg.models.contains(',') {
        return Err(Error::invalid(
            "train expects a single model name in the `models` key".to_string(),
        ));
    }
    let name = cfg.models.clone();
    let (pairs, hp) = match cfg.experiment.as_str() {
        "connectome_sr" | "sensitivity" => {
            (subject_pairs_for(&cfg)?, SrHyper::connectome(&cfg))
        }
        _ => {
            let mut sc = SrScenario::from_name(&cfg.scenario)?;
            sc.n_h = cfg.n_h;
            sc.n_l = cfg.n_l;
            sc.samples = cfg.samples;
            let pairs = experiments::scenario_pairs(
                &sc,
                mix_seed(cfg.seed, &[1, 0]),
                cfg.data_dir.as_deref(),
            )?;
            (pairs, SrHyper::simulated(&cfg))
        }
    };
    let split = kfold_splits(pairs.len(), cfg.folds, mix_seed(cfg.seed, &[2, 0]))?
        .into_iter()
        .next()
        .expect("at least one fold");
    let seed = mix_seed(cfg.seed, &[30]);
    let run = run_sr_fold(&name, &pairs, &split, &hp, seed)?;

    let meta = CheckpointMeta {
        model: name.clone(),
        n_l: pairs[0].0.n(),
        n_h: pairs[0].1.n(),
        in_dim: pairs[0].0.feature_dim(),
        hidden: hp.hidden,
        heads: hp.heads,
        dropout: hp.dropout,
        hr_scale: hp.hr_scale,
        init_seed: sample_seed(seed, 1),
    };
    let ckpt = cfg.out_dir.join(format!("{name}.ckpt"));
    save_checkpoint(&ckpt, &meta, &run.model)?;

    let mut history = String::from("epoch,train_loss,val_loss\n");
    for (e, (tr, va)) in run
        .report
        .train_loss
        .iter()
        .zip(&run.report.val_loss)
        .enumerate()
    {
        history.push_str(&format!("{},{},{}\n", e + 1, fmt(*tr), fmt(*va)));
    }
    experiments::write_text(&cfg.out_dir.join(format!("{name}_history.csv")), &history)?;
    println!(
        "trained {name}: best epoch {} (val {}), test edge MAE {}",
        run.report.best_epoch,
        fmt(run.report.best_val),
        fmt(run.test_mae)
    );
    println!("checkpoint: {}", ckpt.display());
    Ok(())
}

fn eval(checkpoint: &PathBuf, data: &PathBuf) -> Result<()> {
    let (meta, model) = load_checkpoint(checkpoint)?;
    let (_, pairs) = load_dataset(data)?;
    if pairs.is_empty() {
        return Err(Error::invalid("empty dataset".to_string()));
    }
    let tape = Tape::new();
    let mut maes = Vec::with_capacity(pairs.len());
    let mut metric_sums = [0.0; 8];
    for (lr, hr) in &pairs {
        let pred = model.predict(lr.features(), lr.adjacency())?;
        maes.push(edge_mae(&tape, &Var::constant(pred.clone()), hr.adjacency())?.scalar());
        let report = metric_mae(&WeightedGraph::new(pred, None)?, hr)?;
        for (slot, v) in metric_sums.iter_mut().zip(report.values()) {
            *slot += v;
        }
    }
    println!("model {} on {} samples", meta.model, pairs.len());
    println!("edge MAE: {}", fmt(mean(&maes)));
    for (name, total) in MetricReport::COLUMNS.iter().zip(metric_sums) {
        println!("{name} MAE: {}", fmt(total / pairs.len() as f64));
    }
    Ok(())
}

fn experiment(family: &str, config: &PathBuf) -> Result<()> {
    let mut cfg = Config::load(config)?;
    cfg.experiment = match family {
        "node-vs-edge" => "node_vs_edge",
        "simulated" => "simulated_sr",
        "connectome" => "connectome_sr",
        "sensitivity" => "sensitivity",
        _ => {
            return Err(Error::invalid(format!(
                "unknown experiment family {family:?}"
            )));
        }
    }
    .to_string();
    match cfg.experiment.as_str() {
        "node_vs_edge" => {
            experiments::run_node_vs_edge(&cfg)?;
        }
        "simulated_sr" => {
            experiments::run_simulated_sr(&cfg)?;
        }
        "connectome_sr" => {
            experiments::run_connectome_sr(&cfg)?;
        }
        _ => {
            experiments::run_sensitivity(&cfg)?;
        }
    }
    println!("results written to {}", cfg.out_dir.display());
    Ok(())
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::GenData { scenario, out, seed } => gen_data(scenario, out, *seed),
        Command::Train { config } => train(config),
        Command::Eval { checkpoint, data } => eval(checkpoint, data),
        Command::Experiment { family, config } => experiment(family, config),
        Command::Report { results } => {
            print!("{}", graphsr_cli::report::report(results)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Numerical(_) | Error::NoConvergence(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

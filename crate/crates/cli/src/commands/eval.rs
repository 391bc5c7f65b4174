//! `eval`: score a checkpoint on a dataset split and write the report.

use specklenet_classifier::{evaluate, load_params};
use specklenet_dataset::{read_dataset, split_train_test};

use crate::args::SplitArg;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::samples::to_samples;

pub fn cmd_eval(cfg: &RunConfig, split: SplitArg) -> CliResult<()> {
    let params = load_params(&cfg.checkpoint_path)?;
    let records = read_dataset(&cfg.dataset_path)?;
    let (side, samples) = to_samples(&records)?;
    if params.input_size() != side {
        return Err(CliError::Config(format!(
            "checkpoint expects {}x{} inputs but the dataset holds {side}x{side} records",
            params.input_size(),
            params.input_size()
        )));
    }

    let subset = match split {
        SplitArg::All => samples,
        SplitArg::Test => split_train_test(samples, cfg.train_ratio, cfg.split_seed)?.test,
        SplitArg::Train => split_train_test(samples, cfg.train_ratio, cfg.split_seed)?.train,
    };
    log::info!("evaluating {} records", subset.len());
    let report = evaluate(&params, &subset)?;

    println!("records evaluated: {}", report.record_count);
    println!("accuracy: {:.4}", report.accuracy);
    for (digit, acc) in report.per_class_accuracy.iter().enumerate() {
        match acc {
            Some(a) => println!("class {digit} accuracy: {a:.4}"),
            None => println!("class {digit} accuracy: n/a (no records)"),
        }
    }
    println!("confusion matrix (rows truth, columns prediction):");
    for (digit, row) in report.confusion.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:4}")).collect();
        println!("  {digit}: {}", cells.join(" "));
    }

    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Config(format!("report serialization: {e}")))?;
    std::fs::write(&cfg.report_path, json + "\n")
        .map_err(|e| CliError::io(&cfg.report_path, e))?;
    println!("wrote {}", cfg.report_path.display());
    Ok(())
}

//! `train`: split a dataset, fit the classifier, save checkpoint + log.

use std::time::Instant;

use specklenet_classifier::{init_params, save_params, train};
use specklenet_dataset::{read_dataset, split_train_test};

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::write_jsonl_log;
use crate::samples::to_samples;

pub fn cmd_train(cfg: &RunConfig) -> CliResult<()> {
    let start = Instant::now();
    let records = read_dataset(&cfg.dataset_path)?;
    let (side, samples) = to_samples(&records)?;
    let split = split_train_test(samples, cfg.train_ratio, cfg.split_seed)?;
    log::info!(
        "training on {} records, testing on {} ({}x{} inputs, {} epochs)",
        split.train.len(),
        split.test.len(),
        side,
        side,
        cfg.train.epochs
    );

    let params = init_params::<f32>(side, cfg.train.init_seed)?;
    let (trained, stats) = train(params, &split.train, Some(&split.test), &cfg.train)?;
    save_params(&trained, &cfg.checkpoint_path)?;
    write_jsonl_log(&cfg.log_path, &stats)?;

    let last = stats.last().expect("config validation requires epochs >= 1");
    println!("records: {} train / {} test", split.train.len(), split.test.len());
    println!("final loss: {:.6}", last.loss);
    println!("final train accuracy: {:.4}", last.train_accuracy);
    println!(
        "final test accuracy: {:.4}",
        last.test_accuracy.expect("a test set was supplied")
    );
    println!(
        "wrote {} and {}",
        cfg.checkpoint_path.display(),
        cfg.log_path.display()
    );
    println!("elapsed: {:.2} s", start.elapsed().as_secs_f64());
    Ok(())
}

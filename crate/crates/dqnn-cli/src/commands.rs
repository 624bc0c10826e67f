//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use dqnn_core::linalg::haar_pure_state;
use dqnn_core::network::{entropic_stream, uncertainty_stream, NetworkTopology, QNN};
use dqnn_core::training::{
    evaluate_example_b, gen_example_a, gen_example_b, grad_check, interchange_test, train, Split,
    TrainingPair,
};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::formats::{
    build_training_config, load_dataset, load_model, load_run_config, save_dataset, save_model,
    strategy_from_string,
};
use crate::{AppError, EvalArgs, GenArgs, GradcheckArgs, TrainArgs, UncertaintyArgs};

fn runtime(msg: impl Into<String>) -> AppError {
    AppError::Runtime(msg.into())
}

fn usage(msg: impl Into<String>) -> AppError {
    AppError::Usage(msg.into())
}

fn open_out(path: &Path, what: &str) -> Result<BufWriter<File>, AppError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| runtime(format!("cannot create {what} {}: {e}", path.display())))
}

pub fn run_gen(args: &GenArgs) -> Result<(), AppError> {
    let split = parse_split(&args.split, args.n)?;
    match args.kind.as_str() {
        "example-a" => {
            let (dataset, v) = gen_example_a(args.n, split, args.seed)
                .map_err(|e| usage(format!("cannot generate dataset: {e}")))?;
            save_dataset(&dataset, Some(&v), &args.out)?;
        }
        "example-b" => {
            let dataset = gen_example_b(args.n, split, args.seed)
                .map_err(|e| usage(format!("cannot generate dataset: {e}")))?;
            save_dataset(&dataset, None, &args.out)?;
        }
        other => return Err(usage(format!("unknown dataset kind {other:?}"))),
    }
    println!(
        "wrote {} ({} train / {} validation, seed {})",
        args.out.display(),
        split.0,
        split.1,
        args.seed
    );
    Ok(())
}

fn parse_split(text: &str, n: usize) -> Result<(usize, usize), AppError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(usage(format!("split must be a,b, got {text:?}")));
    }
    let a: usize = parts[0]
        .trim()
        .parse()
        .map_err(|_| usage(format!("bad split count {:?}", parts[0])))?;
    let b: usize = parts[1]
        .trim()
        .parse()
        .map_err(|_| usage(format!("bad split count {:?}", parts[1])))?;
    if a + b != n {
        return Err(usage(format!("split {a}+{b} does not sum to n={n}")));
    }
    Ok((a, b))
}

pub fn run_train(args: &TrainArgs) -> Result<(), AppError> {
    let file_cfg = match &args.config {
        Some(path) => Some(load_run_config(path)?),
        None => None,
    };
    let fetch = |flag: Option<&String>, from_file: Option<&String>| -> Option<PathBuf> {
        flag.or(from_file).map(PathBuf::from)
    };
    let cfg_ref = file_cfg.as_ref();

    let data_path = fetch(args.data.as_ref(), cfg_ref.and_then(|c| c.dataset.as_ref()))
        .ok_or_else(|| usage("no dataset given (use --data or config \"dataset\")"))?;
    let model_out = fetch(args.out.as_ref(), cfg_ref.and_then(|c| c.model_out.as_ref()))
        .ok_or_else(|| usage("no model output given (use --out or config \"model_out\")"))?;
    let log_out = fetch(args.log.as_ref(), cfg_ref.and_then(|c| c.log_out.as_ref()))
        .ok_or_else(|| usage("no log output given (use --log or config \"log_out\")"))?;

    let rounds = args
        .rounds
        .or(cfg_ref.and_then(|c| c.rounds))
        .ok_or_else(|| usage("no round count given (use --rounds or config \"rounds\")"))?;
    let seed = args.seed.or(cfg_ref.and_then(|c| c.seed)).unwrap_or(0);
    let strategy_name = args
        .strategy
        .clone()
        .or_else(|| cfg_ref.and_then(|c| c.gradient_strategy.clone()))
        .unwrap_or_else(|| "exact".to_string());
    let strategy = strategy_from_string(&strategy_name)?;
    let probe = args.probe_uncertainty
        || cfg_ref.and_then(|c| c.probe_uncertainty).unwrap_or(false);
    let stride = args
        .probe_stride
        .or(cfg_ref.and_then(|c| c.probe_stride))
        .unwrap_or(1);

    let config = build_training_config(
        rounds,
        seed,
        strategy,
        cfg_ref.and_then(|c| c.epsilon_grid.as_ref()),
        probe,
        stride,
    )?;

    let dataset = load_dataset(&data_path)?;
    let net = QNN::random(
        NetworkTopology::minimal(),
        &mut ChaCha12Rng::seed_from_u64(seed),
    );

    let (trained, logs) =
        train(&net, &dataset, &config).map_err(|e| runtime(format!("training failed: {e}")))?;

    save_model(&trained, seed, rounds, &model_out)?;

    let mut w = open_out(&log_out, "round log")?;
    let n_perceptrons = trained.perceptrons().len();
    write!(w, "round,epsilon_star,cost_train,cost_validation").map_err(io_err)?;
    for i in 1..=n_perceptrons {
        write!(w, ",grad_norm_u{i}").map_err(io_err)?;
    }
    write!(w, ",robertson_min,robertson_mean\n").map_err(io_err)?;
    for log in &logs {
        write!(
            w,
            "{},{},{},{}",
            log.round, log.epsilon_star, log.cost_train, log.cost_validation
        )
        .map_err(io_err)?;
        for g in &log.grad_norms {
            write!(w, ",{g}").map_err(io_err)?;
        }
        write!(
            w,
            ",{},{}\n",
            log.robertson_min_bound, log.robertson_mean_bound
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;

    let last = logs.last().expect("at least one round");
    println!(
        "trained {rounds} rounds: cost_train={} cost_validation={} -> {} / {}",
        last.cost_train,
        last.cost_validation,
        model_out.display(),
        log_out.display()
    );
    Ok(())
}

fn io_err(e: std::io::Error) -> AppError {
    AppError::Runtime(format!("write failed: {e}"))
}

pub fn run_eval(args: &EvalArgs) -> Result<(), AppError> {
    let (net, _) = load_model(&args.model)?;
    let dataset = load_dataset(&args.data)?;

    let records = evaluate_example_b(&net, &dataset)
        .map_err(|e| runtime(format!("evaluation failed: {e}")))?;

    let mut w = open_out(&args.out, "evaluation output")?;
    write!(
        w,
        "split,pair,p_out_00,p_out_01,p_out_10,p_out_11,\
         p_des_00,p_des_01,p_des_10,p_des_11,\
         diff_00,diff_01,diff_10,diff_11,fidelity\n"
    )
    .map_err(io_err)?;
    for r in &records {
        let split = match r.split {
            Split::Train => "train",
            Split::Validation => "validation",
        };
        write!(w, "{split},{}", r.index).map_err(io_err)?;
        for v in r.p_out.iter().chain(r.p_desired.iter()).chain(r.diff.iter()) {
            write!(w, ",{v}").map_err(io_err)?;
        }
        write!(w, ",{}\n", r.fidelity).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;

    let cost_train = dqnn_core::network::cost(&net, &dataset.train)
        .map_err(|e| runtime(format!("evaluation failed: {e}")))?;
    let interchange = interchange_test(&net, &dataset.train)
        .map_err(|e| runtime(format!("interchange test failed: {e}")))?;
    print!("cost_train={cost_train}\n");
    if dataset.validation.is_empty() {
        print!("cost_validation=NaN\n");
    } else {
        let cost_validation = dqnn_core::network::cost(&net, &dataset.validation)
            .map_err(|e| runtime(format!("evaluation failed: {e}")))?;
        print!("cost_validation={cost_validation}\n");
    }
    print!("interchange_train={interchange}\n");
    println!("wrote {}", args.out.display());
    Ok(())
}

pub fn run_gradcheck(args: &GradcheckArgs) -> Result<(), AppError> {
    if args.pairs == 0 {
        return Err(usage("gradcheck needs at least one pair"));
    }
    if !(args.step > 0.0 && args.step.is_finite()) {
        return Err(usage("step must be positive"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
    let net = QNN::random(NetworkTopology::minimal(), &mut rng);
    let pairs: Vec<TrainingPair> = (0..args.pairs)
        .map(|_| TrainingPair {
            input: haar_pure_state(2, &mut rng),
            desired: haar_pure_state(2, &mut rng),
        })
        .collect();
    let max_error =
        grad_check(&net, &pairs, args.step).map_err(|e| runtime(format!("gradcheck: {e}")))?;
    println!("max_error={max_error}");
    if max_error <= args.tol {
        Ok(())
    } else {
        Err(runtime(format!(
            "gradient error {max_error} exceeds tolerance {}",
            args.tol
        )))
    }
}

pub fn run_uncertainty(args: &UncertaintyArgs) -> Result<(), AppError> {
    let (net, _) = load_model(&args.model)?;
    let dataset = load_dataset(&args.data)?;
    let pair = dataset
        .train
        .get(args.pair)
        .ok_or_else(|| usage(format!("pair index {} out of range", args.pair)))?;

    let robertson = uncertainty_stream(&net, pair, args.stride)
        .map_err(|e| runtime(format!("uncertainty probes failed: {e}")))?;
    let entropic = entropic_stream(&net, pair, args.stride)
        .map_err(|e| runtime(format!("entropic probes failed: {e}")))?;

    let mut w = open_out(&args.out, "uncertainty output")?;
    write!(
        w,
        "kind,stage,perceptron,x,y,value_a,value_b,combined,lower_bound,slack\n"
    )
    .map_err(io_err)?;
    for r in &robertson {
        write!(
            w,
            "robertson,{},{},{},{},{},{},{},{},{}\n",
            r.stage,
            r.perceptron,
            r.x,
            r.y,
            r.record.delta_a,
            r.record.delta_b,
            r.record.product,
            r.record.lower_bound,
            r.record.slack
        )
        .map_err(io_err)?;
    }
    for r in &entropic {
        write!(
            w,
            "entropic,{},{},{},{},{},{},{},{},{}\n",
            r.stage,
            r.perceptron,
            r.x,
            r.y,
            r.entropy_a,
            r.entropy_b,
            r.sum,
            r.lower_bound,
            r.slack
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    println!(
        "wrote {} ({} robertson + {} entropic records)",
        args.out.display(),
        robertson.len(),
        entropic.len()
    );
    Ok(())
}

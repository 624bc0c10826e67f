//! Dataset generation, the training loop with step-size line search,
//! gradient checking, and evaluation helpers.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg::{haar_pure_state, haar_unitary, ComplexMatrix, PureState};
use crate::network::{
    cost, gradient_with_strategy, uncertainty_stream, CompiledNet, GradientSet, GradientStrategy,
    QNN,
};
use crate::qprops::{concurrence_pure, purity};

/// One supervised example: a pure input state and the desired pure output.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPair {
    pub input: PureState,
    pub desired: PureState,
}

/// Which example family a dataset was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    /// Pairs `(psi, V psi)` for one hidden Haar unitary `V`.
    ExampleA,
    /// Desired states encode the input's concurrence and purity.
    ExampleB,
    Custom,
}

/// Train/validation split of pairs, reproducible from its seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Vec<TrainingPair>,
    pub validation: Vec<TrainingPair>,
    pub seed: u64,
    pub kind: DatasetKind,
}

fn split_pairs(
    mut pairs: Vec<TrainingPair>,
    split: (usize, usize),
    n_pairs: usize,
) -> Result<(Vec<TrainingPair>, Vec<TrainingPair>)> {
    if split.0 + split.1 != n_pairs {
        return Err(Error::InvalidArgument(alloc::format!(
            "split {}+{} does not sum to {n_pairs}",
            split.0,
            split.1
        )));
    }
    if split.0 == 0 {
        return Err(Error::InvalidArgument(
            "training split must be non-empty".into(),
        ));
    }
    let validation = pairs.split_off(split.0);
    Ok((pairs, validation))
}

/// Pairs `(psi, V psi)` for a single Haar-random two-qubit unitary `V`,
/// with Haar-random pure inputs. Returns the dataset and `V`.
pub fn gen_example_a(
    n_pairs: usize,
    split: (usize, usize),
    seed: u64,
) -> Result<(Dataset, ComplexMatrix)> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let v = haar_unitary(4, &mut rng);
    let mut pairs = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        let input = haar_pure_state(2, &mut rng);
        let image = v.mul_vec(input.amplitudes());
        let desired = PureState::new(image)?;
        pairs.push(TrainingPair { input, desired });
    }
    let (train, validation) = split_pairs(pairs, split, n_pairs)?;
    Ok((
        Dataset {
            train,
            validation,
            seed,
            kind: DatasetKind::ExampleA,
        },
        v,
    ))
}

/// Desired output encoding the input's quantum properties:
/// `sqrt(Con/2)|00> + sqrt(1-(Con+P)/2) (|01>+|10>)/sqrt(2) + sqrt(P/2)|11>`.
pub fn example_b_target(input: &PureState) -> Result<PureState> {
    let con = concurrence_pure(input)?;
    let pur = purity(&input.to_density())?;
    let mid_sq = 1.0 - (con + pur) / 2.0;
    if mid_sq < -1e-12 {
        return Err(Error::InvalidArgument(alloc::format!(
            "negative radicand {mid_sq} from concurrence {con} and purity {pur}"
        )));
    }
    let mid = (mid_sq.max(0.0) / 2.0).sqrt();
    let amps = alloc::vec![
        Complex64::new((con / 2.0).sqrt(), 0.0),
        Complex64::new(mid, 0.0),
        Complex64::new(mid, 0.0),
        Complex64::new((pur / 2.0).sqrt(), 0.0),
    ];
    PureState::new(amps)
}

/// Haar-random pure two-qubit inputs paired with their property-encoding
/// targets.
pub fn gen_example_b(n_pairs: usize, split: (usize, usize), seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        let input = haar_pure_state(2, &mut rng);
        let desired = example_b_target(&input)?;
        pairs.push(TrainingPair { input, desired });
    }
    let (train, validation) = split_pairs(pairs, split, n_pairs)?;
    Ok(Dataset {
        train,
        validation,
        seed,
        kind: DatasetKind::ExampleB,
    })
}

/// Training hyperparameters. `epsilon_grid` must contain 0 (which makes the
/// per-round cost non-decreasing) and at least one positive value.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub rounds: usize,
    pub epsilon_grid: Vec<f64>,
    pub gradient_strategy: GradientStrategy,
    pub probe_uncertainty: bool,
    /// Subsampling stride over the `d^2` probe slots when probing.
    pub probe_stride: usize,
    pub seed: u64,
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidArgument("rounds must be >= 1".into()));
        }
        if self.probe_stride == 0 {
            return Err(Error::InvalidArgument("probe stride must be >= 1".into()));
        }
        validate_grid(&self.epsilon_grid)
    }
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            rounds: 200,
            epsilon_grid: default_epsilon_grid(),
            gradient_strategy: GradientStrategy::Exact,
            probe_uncertainty: false,
            probe_stride: 1,
            seed: 0,
        }
    }
}

/// `{0}` plus 50 geometrically spaced step sizes in `[1e-3, 2]`.
pub fn default_epsilon_grid() -> Vec<f64> {
    let (lo, hi, count) = (1e-3_f64, 2.0_f64, 50usize);
    // black_box pins the root to runtime libm: compile-time folding may
    // differ in the last ulp and would make grids vary across builds.
    let ratio = core::hint::black_box(hi / lo).powf(1.0 / (count - 1) as f64);
    let mut grid = Vec::with_capacity(count + 1);
    grid.push(0.0);
    let mut value = lo;
    for _ in 0..count {
        grid.push(value);
        value *= ratio;
    }
    grid
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if !grid.iter().all(|e| e.is_finite()) {
        return Err(Error::NonFinite);
    }
    if !grid.contains(&0.0) {
        return Err(Error::InvalidArgument("epsilon grid must contain 0".into()));
    }
    if !grid.iter().any(|&e| e > 0.0) {
        return Err(Error::InvalidArgument(
            "epsilon grid needs a positive value".into(),
        ));
    }
    Ok(())
}

/// Per-round telemetry.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundLog {
    /// 1-based round index.
    pub round: usize,
    pub epsilon_star: f64,
    /// Training cost after this round's update.
    pub cost_train: f64,
    /// Validation cost after the update; NaN when the split is empty.
    pub cost_validation: f64,
    /// Frobenius norm of each perceptron's derivative table, flat order.
    pub grad_norms: Vec<f64>,
    /// Min/mean Robertson lower bound over this round's probes (pre-update
    /// net, first training pair); NaN when probing is off.
    pub robertson_min_bound: f64,
    pub robertson_mean_bound: f64,
}

/// Picks the step size maximizing the cost along the gradient direction.
///
/// Ties break toward the smallest step, so with 0 in the grid the selected
/// cost can never fall below the current one.
pub fn epsilon_line_search(
    net: &QNN,
    direction: &GradientSet,
    pairs: &[TrainingPair],
    grid: &[f64],
) -> Result<(f64, f64)> {
    validate_grid(grid)?;
    if pairs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    sorted.dedup();

    let mut best_eps = 0.0;
    let mut best_cost = f64::NEG_INFINITY;
    for &eps in &sorted {
        let candidate = net.with_update(direction, eps)?;
        let value = CompiledNet::compile(&candidate)?.cost_mean(pairs)?;
        if value > best_cost {
            best_cost = value;
            best_eps = eps;
        }
    }
    Ok((best_eps, best_cost))
}

/// Gradient-ascent training: per round, compute the gradient on the training
/// split, line-search the step size, and apply the update to all perceptrons
/// simultaneously. With 0 in the grid the training cost is non-decreasing
/// across rounds, exactly.
pub fn train(
    net: &QNN,
    dataset: &Dataset,
    config: &TrainingConfig,
) -> Result<(QNN, Vec<RoundLog>)> {
    config.validate()?;
    if dataset.train.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut current = net.clone();
    let mut logs = Vec::with_capacity(config.rounds);
    for round in 1..=config.rounds {
        let grad = gradient_with_strategy(&current, &dataset.train, config.gradient_strategy)?;
        if !grad.is_finite() {
            return Err(Error::NonFiniteAtRound { round });
        }
        let grad_norms = grad.norms();

        let (robertson_min, robertson_mean) = if config.probe_uncertainty {
            let records =
                uncertainty_stream(&current, &dataset.train[0], config.probe_stride)?;
            summarize_bounds(&records)
        } else {
            (f64::NAN, f64::NAN)
        };

        let (epsilon_star, cost_train) =
            epsilon_line_search(&current, &grad, &dataset.train, &config.epsilon_grid)?;
        if !cost_train.is_finite() {
            return Err(Error::NonFiniteAtRound { round });
        }
        current = current.with_update(&grad, epsilon_star)?;

        let cost_validation = if dataset.validation.is_empty() {
            f64::NAN
        } else {
            cost(&current, &dataset.validation)?
        };

        logs.push(RoundLog {
            round,
            epsilon_star,
            cost_train,
            cost_validation,
            grad_norms,
            robertson_min_bound: robertson_min,
            robertson_mean_bound: robertson_mean,
        });
    }
    Ok((current, logs))
}

fn summarize_bounds(records: &[crate::network::ProbeRecord]) -> (f64, f64) {
    if records.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mut min = f64::INFINITY;
    let mut sum = 0.0;
    for r in records {
        min = min.min(r.record.lower_bound);
        sum += r.record.lower_bound;
    }
    (min, sum / records.len() as f64)
}

/// Max absolute deviation between the analytic gradient and central finite
/// differences of the cost, over every parameter.
pub fn grad_check(net: &QNN, pairs: &[TrainingPair], step: f64) -> Result<f64> {
    if step <= 0.0 || !step.is_finite() {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let analytic = gradient_with_strategy(net, pairs, GradientStrategy::Exact)?;
    let mut worst = 0.0_f64;
    for (idx, perceptron) in net.perceptrons().iter().enumerate() {
        let d = perceptron.d();
        for x in 1..=d {
            for y in 1..=d {
                let numeric = central_difference(net, pairs, idx, x, y, step)?;
                let slot = (x - 1) * d + (y - 1);
                worst = worst.max((analytic.per_perceptron[idx][slot] - numeric).abs());
            }
        }
    }
    Ok(worst)
}

fn central_difference(
    net: &QNN,
    pairs: &[TrainingPair],
    perceptron: usize,
    x: usize,
    y: usize,
    step: f64,
) -> Result<f64> {
    let eval = |delta: f64| -> Result<f64> {
        let mut shifted = net.clone();
        let current = shifted.perceptrons()[perceptron].get(x, y);
        // Rebuild the perceptron list with one nudged entry.
        let mut params = shifted.perceptrons().to_vec();
        params[perceptron].set(x, y, current + delta);
        shifted = QNN::new(shifted.topology().clone(), params)?;
        cost(&shifted, pairs)
    };
    Ok((eval(step)? - eval(-step)?) / (2.0 * step))
}

/// Which split a record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Validation,
}

/// Computational-basis statistics of one evaluated pair: output
/// probabilities, desired probabilities, and their differences, for
/// `b in {00, 01, 10, 11}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityRecord {
    pub split: Split,
    pub index: usize,
    pub p_out: [f64; 4],
    pub p_desired: [f64; 4],
    pub diff: [f64; 4],
    pub fidelity: f64,
}

/// Per-pair measurement statistics over both splits (two-qubit outputs).
pub fn evaluate_example_b(net: &QNN, dataset: &Dataset) -> Result<Vec<ProbabilityRecord>> {
    if net.topology().output_width() != 2 {
        return Err(Error::InvalidArgument(
            "probability evaluation needs a two-qubit output layer".into(),
        ));
    }
    let in_dim = 1usize << net.topology().input_width();
    let compiled = CompiledNet::compile(net)?;
    let mut records = Vec::with_capacity(dataset.train.len() + dataset.validation.len());
    for (split, pairs) in [
        (Split::Train, &dataset.train),
        (Split::Validation, &dataset.validation),
    ] {
        for (index, pair) in pairs.iter().enumerate() {
            if pair.input.dim() != in_dim || pair.desired.dim() != 4 {
                return Err(Error::DimensionMismatch {
                    expected: in_dim,
                    actual: pair.input.dim(),
                });
            }
            let rho_out = feed_forward_raw(&compiled, pair);
            let mut p_out = [0.0; 4];
            let mut p_desired = [0.0; 4];
            let mut diff = [0.0; 4];
            for b in 0..4 {
                // Diagonal entries are probabilities up to roundoff.
                p_out[b] = rho_out[(b, b)].re.max(0.0).min(1.0);
                p_desired[b] = pair.desired.amplitudes()[b].norm_sqr().min(1.0);
                diff[b] = p_out[b] - p_desired[b];
            }
            records.push(ProbabilityRecord {
                split,
                index,
                p_out,
                p_desired,
                diff,
                fidelity: compiled.cost_pair(pair),
            });
        }
    }
    Ok(records)
}

fn feed_forward_raw(compiled: &CompiledNet, pair: &TrainingPair) -> ComplexMatrix {
    compiled.final_state(&pair.input)
}

/// Cost of the network on the pairs with input and desired roles swapped.
pub fn interchange_test(net: &QNN, pairs: &[TrainingPair]) -> Result<f64> {
    let swapped: Vec<TrainingPair> = pairs
        .iter()
        .map(|p| TrainingPair {
            input: p.desired.clone(),
            desired: p.input.clone(),
        })
        .collect();
    cost(net, &swapped)
}

//! The dissipative feed-forward network: topology, propagation with
//! partial-trace activation, fidelity cost, analytic gradients, and
//! uncertainty-relation probes.
//!
//! A stage maps a layer of `a` qubits to the next layer of `b` qubits: the
//! next layer starts in `|0..0>`, perceptron `j` (a unitary on `a + 1`
//! qubits) acts on all previous-layer qubits plus new qubit `j` in ascending
//! order, and the previous layer is then traced out. The cost of a pair is
//! `<phi| rho_out |phi>`; its exact derivative with respect to a perceptron
//! parameter is `i Tr( Ytilde_emb [rho_pre, M] )`, where `rho_pre` is the
//! stage input conjugated through the earlier perceptrons of the stage and
//! `M` is the back-propagated effect operator conjugated through the later
//! ones. Both sides of that commutator come out of the same forward /
//! backward sweeps, so one pass yields every parameter's derivative.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::comp_param::{all_generators, build_unitary, ParamMatrix};
use crate::error::{Error, Result};
use crate::linalg::{
    embed_on_qubits, hermitian_eig, partial_trace_raw, ComplexMatrix, DensityMatrix, PureState,
    C_I, C_ZERO,
};
use crate::qprops::UncertaintyRecord;
use crate::training::TrainingPair;

/// Maximum qubits simultaneously alive in one stage (previous + next layer).
pub const MAX_STAGE_QUBITS: usize = 8;

/// Layer widths, input layer first. The default minimal network is
/// two qubits - two qubits - two qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkTopology {
    widths: Vec<usize>,
}

impl NetworkTopology {
    pub fn new(widths: Vec<usize>) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::InvalidArgument(
                "topology needs at least two layers".into(),
            ));
        }
        if widths.iter().any(|&w| w == 0) {
            return Err(Error::InvalidArgument(
                "every layer needs at least one qubit".into(),
            ));
        }
        for pair in widths.windows(2) {
            if pair[0] + pair[1] > MAX_STAGE_QUBITS {
                return Err(Error::InvalidArgument(alloc::format!(
                    "stage with {} + {} qubits exceeds the {MAX_STAGE_QUBITS}-qubit cap",
                    pair[0],
                    pair[1]
                )));
            }
        }
        Ok(Self { widths })
    }

    /// The minimal 2-2-2 topology.
    pub fn minimal() -> Self {
        Self {
            widths: vec![2, 2, 2],
        }
    }

    pub fn layer_widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn n_layers(&self) -> usize {
        self.widths.len()
    }

    pub fn n_stages(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn input_width(&self) -> usize {
        self.widths[0]
    }

    pub fn output_width(&self) -> usize {
        *self.widths.last().expect("at least two layers")
    }

    /// Unitary dimension of a perceptron feeding layer `stage + 1`
    /// (0-based stage): `2^(w_prev + 1)`.
    pub fn perceptron_dim(&self, stage: usize) -> usize {
        1usize << (self.widths[stage] + 1)
    }

    /// Total number of perceptrons (one per non-input neuron).
    pub fn n_perceptrons(&self) -> usize {
        self.widths[1..].iter().sum()
    }
}

impl Default for NetworkTopology {
    fn default() -> Self {
        Self::minimal()
    }
}

/// The network: one parameter matrix per non-input neuron, listed stage by
/// stage in ascending neuron order. Within a stage the perceptrons are
/// applied in listed order, which matters: they do not commute in general.
#[derive(Debug, Clone, PartialEq)]
pub struct QNN {
    topology: NetworkTopology,
    perceptrons: Vec<ParamMatrix>,
}

impl QNN {
    pub fn new(topology: NetworkTopology, perceptrons: Vec<ParamMatrix>) -> Result<Self> {
        if perceptrons.len() != topology.n_perceptrons() {
            return Err(Error::DimensionMismatch {
                expected: topology.n_perceptrons(),
                actual: perceptrons.len(),
            });
        }
        let mut idx = 0;
        for stage in 0..topology.n_stages() {
            let dim = topology.perceptron_dim(stage);
            for _ in 0..topology.layer_widths()[stage + 1] {
                if perceptrons[idx].d() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        actual: perceptrons[idx].d(),
                    });
                }
                idx += 1;
            }
        }
        Ok(Self {
            topology,
            perceptrons,
        })
    }

    /// All parameters zero: every perceptron is the identity.
    pub fn identity(topology: NetworkTopology) -> Self {
        let perceptrons = (0..topology.n_stages())
            .flat_map(|stage| {
                let dim = topology.perceptron_dim(stage);
                let width = topology.layer_widths()[stage + 1];
                core::iter::repeat_with(move || {
                    ParamMatrix::zeros(dim).expect("perceptron dimension >= 2")
                })
                .take(width)
            })
            .collect();
        Self {
            topology,
            perceptrons,
        }
    }

    /// Independent uniform draws over the canonical parameter ranges.
    pub fn random(topology: NetworkTopology, rng: &mut impl Rng) -> Self {
        let mut perceptrons = Vec::with_capacity(topology.n_perceptrons());
        for stage in 0..topology.n_stages() {
            let dim = topology.perceptron_dim(stage);
            for _ in 0..topology.layer_widths()[stage + 1] {
                perceptrons.push(
                    ParamMatrix::random_canonical(dim, rng).expect("perceptron dimension >= 2"),
                );
            }
        }
        Self {
            topology,
            perceptrons,
        }
    }

    pub fn topology(&self) -> &NetworkTopology {
        &self.topology
    }

    pub fn perceptrons(&self) -> &[ParamMatrix] {
        &self.perceptrons
    }

    pub fn param_count(&self) -> usize {
        self.perceptrons.iter().map(|p| p.d() * p.d()).sum()
    }

    /// Index of the first perceptron of a 0-based stage in the flat list.
    fn stage_offset(&self, stage: usize) -> usize {
        self.topology.layer_widths()[1..=stage].iter().sum()
    }

    /// Perceptrons of one 0-based stage.
    pub fn stage_perceptrons(&self, stage: usize) -> &[ParamMatrix] {
        let start = self.stage_offset(stage);
        let width = self.topology.layer_widths()[stage + 1];
        &self.perceptrons[start..start + width]
    }

    /// New network with `lambda <- lambda + eps * direction` applied to every
    /// perceptron simultaneously.
    pub fn with_update(&self, direction: &GradientSet, eps: f64) -> Result<QNN> {
        if direction.per_perceptron.len() != self.perceptrons.len() {
            return Err(Error::DimensionMismatch {
                expected: self.perceptrons.len(),
                actual: direction.per_perceptron.len(),
            });
        }
        let mut updated = self.clone();
        for (p, g) in updated
            .perceptrons
            .iter_mut()
            .zip(direction.per_perceptron.iter())
        {
            if g.len() != p.values().len() {
                return Err(Error::DimensionMismatch {
                    expected: p.values().len(),
                    actual: g.len(),
                });
            }
            p.add_scaled(g, eps);
        }
        Ok(updated)
    }
}

/// Per-perceptron derivative tables, row-major, same shapes as the
/// parameter matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    pub per_perceptron: Vec<Vec<f64>>,
}

impl GradientSet {
    pub fn zeros_like(net: &QNN) -> Self {
        Self {
            per_perceptron: net
                .perceptrons()
                .iter()
                .map(|p| vec![0.0; p.values().len()])
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.per_perceptron
            .iter()
            .all(|g| g.iter().all(|v| v.is_finite()))
    }

    /// Frobenius norm of each perceptron's derivative table.
    pub fn norms(&self) -> Vec<f64> {
        self.per_perceptron
            .iter()
            .map(|g| g.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }
}

/// How the cost derivative is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientStrategy {
    /// Exact chain rule: effect operators back-propagated through every
    /// later stage. The default.
    Exact,
    /// Stage-local variant: every stage is differentiated as if its output
    /// were compared directly against the desired state, with no
    /// back-propagation through later stages. Exact for the final stage;
    /// requires every non-input layer to match the output width.
    StageLocal,
}

/// One perceptron of one stage, lifted to the stage register.
struct CompiledPerceptron {
    /// Stage-register unitary.
    lifted: ComplexMatrix,
    /// 1-based qubit positions the perceptron acts on.
    positions: Vec<usize>,
    /// Index into the flat perceptron list.
    flat_index: usize,
}

/// One stage with everything propagation and differentiation need.
struct CompiledStage {
    prev_width: usize,
    next_width: usize,
    n_qubits: usize,
    perceptrons: Vec<CompiledPerceptron>,
    /// `(U_b * ... * U_1) * (I_prev (x) |0..0>)`: the only columns of the
    /// stage product that propagation needs.
    injection: ComplexMatrix,
}

impl CompiledStage {
    /// Stage output (next-layer state) for a raw previous-layer matrix.
    fn propagate(&self, rho_prev: &ComplexMatrix) -> ComplexMatrix {
        let full = &(&self.injection * rho_prev) * &self.injection.adjoint();
        let traced: Vec<usize> = (1..=self.prev_width).collect();
        partial_trace_raw(&full, self.n_qubits, &traced)
    }

    /// Same as `propagate` for a pure previous-layer state.
    fn propagate_pure(&self, psi_prev: &[Complex64]) -> ComplexMatrix {
        let v = self.injection.mul_vec(psi_prev);
        let next_dim = 1usize << self.next_width;
        let prev_dim = 1usize << self.prev_width;
        ComplexMatrix::from_fn(next_dim, next_dim, |p, q| {
            let mut acc = C_ZERO;
            for r in 0..prev_dim {
                acc += v[r * next_dim + p] * v[r * next_dim + q].conj();
            }
            acc
        })
    }

    /// `rho_prev (x) |0..0><0..0|` on the stage register.
    fn stage_input(&self, rho_prev: &ComplexMatrix) -> ComplexMatrix {
        let next_dim = 1usize << self.next_width;
        let dim = 1usize << self.n_qubits;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for i in 0..rho_prev.rows() {
            for j in 0..rho_prev.cols() {
                out[(i * next_dim, j * next_dim)] = rho_prev[(i, j)];
            }
        }
        out
    }

    /// Effect operator one layer earlier: `S^dagger (I (x) E_next) S`.
    fn pull_back_effect(&self, effect_next: &ComplexMatrix) -> ComplexMatrix {
        let lifted = lift_effect(self.prev_width, effect_next);
        &(&self.injection.adjoint() * &lifted) * &self.injection
    }
}

/// `I_{2^prev_width} (x) effect`.
fn lift_effect(prev_width: usize, effect: &ComplexMatrix) -> ComplexMatrix {
    let prev_dim = 1usize << prev_width;
    let e_dim = effect.rows();
    let dim = prev_dim * e_dim;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for blk in 0..prev_dim {
        for i in 0..e_dim {
            for j in 0..e_dim {
                out[(blk * e_dim + i, blk * e_dim + j)] = effect[(i, j)];
            }
        }
    }
    out
}

pub(crate) struct CompiledNet {
    stages: Vec<CompiledStage>,
    output_dim: usize,
}

impl CompiledNet {
    pub(crate) fn compile(net: &QNN) -> Result<Self> {
        let topo = net.topology();
        let mut stages = Vec::with_capacity(topo.n_stages());
        for stage in 0..topo.n_stages() {
            let a = topo.layer_widths()[stage];
            let b = topo.layer_widths()[stage + 1];
            let n = a + b;
            let dim = 1usize << n;
            let offset = net.stage_offset(stage);

            let mut perceptrons = Vec::with_capacity(b);
            let mut product = ComplexMatrix::identity(dim);
            for j in 1..=b {
                let params = &net.perceptrons()[offset + j - 1];
                let small = build_unitary(params);
                let mut positions: Vec<usize> = (1..=a).collect();
                positions.push(a + j);
                let lifted = embed_on_qubits(&small, &positions, n)?;
                product = &lifted * &product;
                perceptrons.push(CompiledPerceptron {
                    lifted,
                    positions,
                    flat_index: offset + j - 1,
                });
            }

            let next_dim = 1usize << b;
            let prev_dim = 1usize << a;
            let injection = ComplexMatrix::from_fn(dim, prev_dim, |r, i| {
                product[(r, i * next_dim)]
            });

            stages.push(CompiledStage {
                prev_width: a,
                next_width: b,
                n_qubits: n,
                perceptrons,
                injection,
            });
        }
        Ok(Self {
            stages,
            output_dim: 1usize << topo.output_width(),
        })
    }

    /// All layer states for a pure input, as raw matrices.
    fn layer_states(&self, input: &PureState) -> Vec<ComplexMatrix> {
        let mut states = Vec::with_capacity(self.stages.len() + 1);
        states.push(input.projector());
        let mut rho = self.stages[0].propagate_pure(input.amplitudes());
        states.push(rho.clone());
        for stage in &self.stages[1..] {
            rho = stage.propagate(&rho);
            states.push(rho.clone());
        }
        states
    }

    /// Output-layer state for a pure input, as a raw matrix.
    pub(crate) fn final_state(&self, input: &PureState) -> ComplexMatrix {
        let mut rho = self.stages[0].propagate_pure(input.amplitudes());
        for stage in &self.stages[1..] {
            rho = stage.propagate(&rho);
        }
        rho
    }

    pub(crate) fn cost_pair(&self, pair: &TrainingPair) -> f64 {
        let rho = self.final_state(&pair.input);
        let phi = pair.desired.amplitudes();
        let image = rho.mul_vec(phi);
        let mut acc = C_ZERO;
        for (a, b) in phi.iter().zip(image.iter()) {
            acc += a.conj() * b;
        }
        acc.re
    }

    pub(crate) fn cost_mean(&self, pairs: &[TrainingPair]) -> Result<f64> {
        if pairs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut total = 0.0;
        for pair in pairs {
            total += self.cost_pair(pair);
        }
        Ok(total / pairs.len() as f64)
    }

    /// Effect operators for every layer, last layer first set to
    /// `|phi><phi|`, earlier layers by pull-back. Index `i` holds layer `i`
    /// (0-based).
    fn effect_chain(&self, phi: &PureState) -> Result<Vec<ComplexMatrix>> {
        if phi.dim() != self.output_dim {
            return Err(Error::DimensionMismatch {
                expected: self.output_dim,
                actual: phi.dim(),
            });
        }
        let n_layers = self.stages.len() + 1;
        let mut effects = vec![ComplexMatrix::zeros(1, 1); n_layers];
        effects[n_layers - 1] = phi.projector();
        for i in (0..self.stages.len()).rev() {
            effects[i] = self.stages[i].pull_back_effect(&effects[i + 1]);
        }
        Ok(effects)
    }
}

fn check_pair_dims(net: &QNN, pair: &TrainingPair) -> Result<()> {
    let in_dim = 1usize << net.topology().input_width();
    let out_dim = 1usize << net.topology().output_width();
    if pair.input.dim() != in_dim {
        return Err(Error::DimensionMismatch {
            expected: in_dim,
            actual: pair.input.dim(),
        });
    }
    if pair.desired.dim() != out_dim {
        return Err(Error::DimensionMismatch {
            expected: out_dim,
            actual: pair.desired.dim(),
        });
    }
    Ok(())
}

/// One stage of propagation: append fresh `|0..0>` qubits, apply the listed
/// perceptrons in order, trace out the previous layer.
pub fn stage_forward(
    rho_prev: &DensityMatrix,
    perceptrons: &[ParamMatrix],
) -> Result<DensityMatrix> {
    if perceptrons.is_empty() {
        return Err(Error::InvalidArgument(
            "stage needs at least one perceptron".into(),
        ));
    }
    let a = rho_prev.n_qubits();
    let b = perceptrons.len();
    if a + b > MAX_STAGE_QUBITS {
        return Err(Error::InvalidArgument(alloc::format!(
            "stage with {a} + {b} qubits exceeds the {MAX_STAGE_QUBITS}-qubit cap"
        )));
    }
    let expected_dim = 1usize << (a + 1);
    for p in perceptrons {
        if p.d() != expected_dim {
            return Err(Error::DimensionMismatch {
                expected: expected_dim,
                actual: p.d(),
            });
        }
    }

    let n = a + b;
    let mut product = ComplexMatrix::identity(1 << n);
    for (j, p) in perceptrons.iter().enumerate() {
        let small = build_unitary(p);
        let mut positions: Vec<usize> = (1..=a).collect();
        positions.push(a + j + 1);
        product = &embed_on_qubits(&small, &positions, n)? * &product;
    }

    let ancilla = PureState::basis(b, 0).expect("valid basis state");
    let padded = crate::linalg::kron(rho_prev.matrix(), &ancilla.projector());
    let evolved = product.conjugate_with(&padded);
    let traced: Vec<usize> = (1..=a).collect();
    DensityMatrix::new(partial_trace_raw(&evolved, n, &traced))
}

/// Full propagation through every stage.
pub fn feed_forward(net: &QNN, rho_in: &DensityMatrix) -> Result<DensityMatrix> {
    let expected = 1usize << net.topology().input_width();
    if rho_in.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: rho_in.dim(),
        });
    }
    let compiled = CompiledNet::compile(net)?;
    let mut rho = rho_in.matrix().clone();
    for stage in &compiled.stages {
        rho = stage.propagate(&rho);
    }
    DensityMatrix::new(rho)
}

/// Mean fidelity cost `(1/N) sum <phi_z| rho_out_z |phi_z>` over pairs.
pub fn cost(net: &QNN, pairs: &[TrainingPair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for pair in pairs {
        check_pair_dims(net, pair)?;
    }
    let compiled = CompiledNet::compile(net)?;
    compiled.cost_mean(pairs)
}

/// Hermitian PSD operator `E` on 1-based layer `from_layer` with
/// `Tr(E rho_layer) = <phi| rho_out |phi>` for every input.
pub fn effect_operator(
    net: &QNN,
    phi_desired: &PureState,
    from_layer: usize,
) -> Result<ComplexMatrix> {
    let n_layers = net.topology().n_layers();
    if from_layer < 2 || from_layer > n_layers {
        return Err(Error::IndexOutOfRange {
            index: from_layer,
            limit: n_layers,
        });
    }
    let compiled = CompiledNet::compile(net)?;
    let effects = compiled.effect_chain(phi_desired)?;
    Ok(effects[from_layer - 1].clone())
}

/// Exact analytic gradient of the mean cost.
pub fn gradient(net: &QNN, pairs: &[TrainingPair]) -> Result<GradientSet> {
    gradient_with_strategy(net, pairs, GradientStrategy::Exact)
}

/// Gradient under the chosen differentiation strategy.
pub fn gradient_with_strategy(
    net: &QNN,
    pairs: &[TrainingPair],
    strategy: GradientStrategy,
) -> Result<GradientSet> {
    if pairs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for pair in pairs {
        check_pair_dims(net, pair)?;
    }
    if strategy == GradientStrategy::StageLocal {
        let out = net.topology().output_width();
        if net.topology().layer_widths()[1..].iter().any(|&w| w != out) {
            return Err(Error::InvalidArgument(
                "stage-local gradients need every non-input layer to match the output width"
                    .into(),
            ));
        }
    }

    let compiled = CompiledNet::compile(net)?;
    let generators: Vec<_> = net.perceptrons().iter().map(all_generators).collect();
    let mut grad = GradientSet::zeros_like(net);

    for pair in pairs {
        let states = compiled.layer_states(&pair.input);
        let effects = match strategy {
            GradientStrategy::Exact => compiled.effect_chain(&pair.desired)?,
            GradientStrategy::StageLocal => {
                let proj = pair.desired.projector();
                vec![proj; compiled.stages.len() + 1]
            }
        };

        for (i, stage) in compiled.stages.iter().enumerate() {
            accumulate_stage_gradient(
                stage,
                &states[i],
                &effects[i + 1],
                &generators,
                &mut grad,
            )?;
        }
    }

    let inv = 1.0 / pairs.len() as f64;
    for g in &mut grad.per_perceptron {
        for v in g.iter_mut() {
            *v *= inv;
        }
    }
    Ok(grad)
}

/// Adds one pair's derivative contributions for one stage.
fn accumulate_stage_gradient(
    stage: &CompiledStage,
    rho_layer: &ComplexMatrix,
    effect_next: &ComplexMatrix,
    generators: &[crate::comp_param::ParamGenerators],
    grad: &mut GradientSet,
) -> Result<()> {
    let b = stage.next_width;
    let n = stage.n_qubits;

    // Forward: stage input conjugated through perceptrons 1..j-1.
    let mut rho_pres = Vec::with_capacity(b);
    let mut rho_pre = stage.stage_input(rho_layer);
    for j in 0..b {
        rho_pres.push(rho_pre.clone());
        if j + 1 < b {
            rho_pre = stage.perceptrons[j].lifted.conjugate_with(&rho_pre);
        }
    }

    // Backward: lifted effect conjugated through perceptrons b..j.
    let mut effect_backs = vec![ComplexMatrix::zeros(1, 1); b];
    let mut back = lift_effect(stage.prev_width, effect_next);
    for j in (0..b).rev() {
        back = stage.perceptrons[j].lifted.adjoint().conjugate_with(&back);
        effect_backs[j] = back.clone();
    }

    for j in 0..b {
        let perceptron = &stage.perceptrons[j];
        let commutator =
            &(&rho_pres[j] * &effect_backs[j]) - &(&effect_backs[j] * &rho_pres[j]);
        let traced: Vec<usize> = (stage.prev_width + 1..=stage.prev_width + b)
            .filter(|&q| q != stage.prev_width + j + 1)
            .collect();
        let reduced = if traced.is_empty() {
            commutator
        } else {
            partial_trace_raw(&commutator, n, &traced)
        };

        let gens = &generators[perceptron.flat_index];
        let d = gens.y_tildes.len();
        let table = &mut grad.per_perceptron[perceptron.flat_index];
        for (slot, y_tilde) in gens.y_tildes.iter().enumerate() {
            debug_assert_eq!(y_tilde.rows(), reduced.rows());
            let mut tr = C_ZERO;
            for u in 0..y_tilde.rows() {
                let yrow = y_tilde.row(u);
                for v in 0..y_tilde.cols() {
                    tr += yrow[v] * reduced[(v, u)];
                }
            }
            table[slot] += (C_I * tr).re;
        }
        debug_assert_eq!(d, table.len());
    }
    Ok(())
}

/// One uncertainty-relation probe: perceptron generator vs. stage input.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRecord {
    /// 1-based stage.
    pub stage: usize,
    /// 1-based perceptron within the stage.
    pub perceptron: usize,
    /// Parameter slot of the probed generator.
    pub x: usize,
    pub y: usize,
    pub record: UncertaintyRecord,
}

/// Entropic counterpart of a probe: measurement entropies in the eigenbases
/// of the two observables against the state-independent overlap bound.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropicProbeRecord {
    pub stage: usize,
    pub perceptron: usize,
    pub x: usize,
    pub y: usize,
    pub entropy_a: f64,
    pub entropy_b: f64,
    pub sum: f64,
    pub lower_bound: f64,
    pub slack: f64,
}

/// Weighted pure-state ensemble extracted from a PSD operator's
/// eigendecomposition; weights normalized to sum 1.
fn effect_ensemble(operator: &ComplexMatrix) -> Result<Vec<(f64, Vec<Complex64>)>> {
    let (values, vectors) = hermitian_eig(operator)?;
    let max = values.iter().fold(0.0_f64, |m, &v| m.max(v));
    if max <= 1e-14 {
        return Ok(Vec::new());
    }
    let mut members = Vec::new();
    let mut total = 0.0;
    for (idx, &v) in values.iter().enumerate() {
        if v > 1e-12 * max {
            let column: Vec<Complex64> =
                (0..vectors.rows()).map(|r| vectors[(r, idx)]).collect();
            members.push((v, column));
            total += v;
        }
    }
    for (w, _) in &mut members {
        *w /= total;
    }
    Ok(members)
}

/// Robertson records for every probed parameter slot of every perceptron.
///
/// For each perceptron the probe pits `A` = its embedded generator against
/// `B` = the stage input conjugated up to that perceptron, evaluated on the
/// eigenvector ensemble of the back-propagated effect operator (the states
/// whose commutator expectations assemble the analytic gradient). The
/// ensemble is folded into one record per slot: root-mean-square deviations
/// and the weighted mean bound, which keeps the record's inequality intact.
/// `stride` subsamples the `d^2` slots (1 probes all of them).
pub fn uncertainty_stream(
    net: &QNN,
    pair: &TrainingPair,
    stride: usize,
) -> Result<Vec<ProbeRecord>> {
    let probes = probe_contexts(net, pair, stride)?;
    let mut records = Vec::new();
    for ctx in &probes {
        let mut sq_a = 0.0;
        let mut sq_b = 0.0;
        let mut bound = 0.0;
        for (w, psi) in &ctx.ensemble {
            let (da, db, lb) = crate::qprops::robertson_components(psi, &ctx.a, &ctx.b)?;
            sq_a += w * da * da;
            sq_b += w * db * db;
            bound += w * lb;
        }
        records.push(ProbeRecord {
            stage: ctx.stage,
            perceptron: ctx.perceptron,
            x: ctx.x,
            y: ctx.y,
            record: UncertaintyRecord::new(sq_a.sqrt(), sq_b.sqrt(), bound),
        });
    }
    Ok(records)
}

/// Entropic records for the same probes as [`uncertainty_stream`]: both
/// observables' eigenbases, entropies taken in the leading effect
/// eigenvector, against the overlap bound.
pub fn entropic_stream(
    net: &QNN,
    pair: &TrainingPair,
    stride: usize,
) -> Result<Vec<EntropicProbeRecord>> {
    use crate::qprops::{entropic_bound, measurement_entropy, ObservableBasis};

    let probes = probe_contexts(net, pair, stride)?;
    let mut records = Vec::new();
    for ctx in &probes {
        let Some((_, top)) = ctx.ensemble.first() else {
            continue;
        };
        let norm: f64 = top.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let psi = PureState::new(top.iter().map(|z| z / norm).collect())?;
        let basis_a = ObservableBasis::from_hermitian(&ctx.a)?;
        let basis_b = ObservableBasis::from_hermitian(&ctx.b)?;
        let entropy_a = measurement_entropy(&psi, &basis_a)?;
        let entropy_b = measurement_entropy(&psi, &basis_b)?;
        let lower_bound = entropic_bound(&basis_a, &basis_b)?;
        records.push(EntropicProbeRecord {
            stage: ctx.stage,
            perceptron: ctx.perceptron,
            x: ctx.x,
            y: ctx.y,
            entropy_a,
            entropy_b,
            sum: entropy_a + entropy_b,
            lower_bound,
            slack: entropy_a + entropy_b - lower_bound,
        });
    }
    Ok(records)
}

struct ProbeContext {
    stage: usize,
    perceptron: usize,
    x: usize,
    y: usize,
    /// Embedded generator on the stage register.
    a: ComplexMatrix,
    /// Stage input conjugated up to the perceptron.
    b: ComplexMatrix,
    /// Weighted eigenvector ensemble of the back-propagated effect.
    ensemble: Vec<(f64, Vec<Complex64>)>,
}

fn probe_contexts(net: &QNN, pair: &TrainingPair, stride: usize) -> Result<Vec<ProbeContext>> {
    if stride == 0 {
        return Err(Error::InvalidArgument("probe stride must be >= 1".into()));
    }
    check_pair_dims(net, pair)?;
    let compiled = CompiledNet::compile(net)?;
    let generators: Vec<_> = net.perceptrons().iter().map(all_generators).collect();
    let states = compiled.layer_states(&pair.input);
    let effects = compiled.effect_chain(&pair.desired)?;

    let mut contexts = Vec::new();
    for (i, stage) in compiled.stages.iter().enumerate() {
        let b = stage.next_width;
        let n = stage.n_qubits;

        let mut rho_pres = Vec::with_capacity(b);
        let mut rho_pre = stage.stage_input(&states[i]);
        for j in 0..b {
            rho_pres.push(rho_pre.clone());
            if j + 1 < b {
                rho_pre = stage.perceptrons[j].lifted.conjugate_with(&rho_pre);
            }
        }
        let mut effect_backs = vec![ComplexMatrix::zeros(1, 1); b];
        let mut back = lift_effect(stage.prev_width, &effects[i + 1]);
        for j in (0..b).rev() {
            back = stage.perceptrons[j].lifted.adjoint().conjugate_with(&back);
            effect_backs[j] = back.clone();
        }

        for j in 0..b {
            let perceptron = &stage.perceptrons[j];
            let ensemble = effect_ensemble(&effect_backs[j])?;
            if ensemble.is_empty() {
                continue;
            }
            let gens = &generators[perceptron.flat_index];
            let d = net.perceptrons()[perceptron.flat_index].d();
            for slot in (0..d * d).step_by(stride) {
                let x = slot / d + 1;
                let y = slot % d + 1;
                let a = embed_on_qubits(&gens.y_tildes[slot], &perceptron.positions, n)?;
                contexts.push(ProbeContext {
                    stage: i + 1,
                    perceptron: j + 1,
                    x,
                    y,
                    a,
                    b: rho_pres[j].clone(),
                    ensemble: ensemble.clone(),
                });
            }
        }
    }
    Ok(contexts)
}

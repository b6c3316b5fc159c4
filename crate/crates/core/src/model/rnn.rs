//! LSTM and GRU cells and the bidirectional wrapper.
//!
//! Cell equations are the standard formulations:
//!
//! LSTM: `i,f,o = σ(W x + U h + b)`, `c̃ = tanh(W x + U h + b)`,
//! `c' = f⊙c + i⊙c̃`, `h' = o⊙tanh(c')`.
//!
//! GRU: `z,r = σ(W x + U h + b)`, `h̃ = tanh(W x + U (r⊙h) + b)`,
//! `h' = (1−z)⊙h + z⊙h̃`.

use serde::{Deserialize, Serialize};

use super::params::{Initializer, ParameterStore};
use crate::autodiff::{Tape, Tensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Lstm,
    Gru,
}

impl CellKind {
    pub fn gate_names(self) -> &'static [&'static str] {
        match self {
            CellKind::Lstm => &["i", "f", "o", "c"],
            CellKind::Gru => &["z", "r", "h"],
        }
    }
}

impl std::str::FromStr for CellKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lstm" => Ok(CellKind::Lstm),
            "gru" => Ok(CellKind::Gru),
            other => Err(format!("unknown cell kind {other:?} (expected lstm or gru)")),
        }
    }
}

/// Gate weights of one directional cell. Indexing follows
/// [`CellKind::gate_names`].
#[derive(Debug)]
pub struct RnnCellParams {
    pub kind: CellKind,
    pub hidden_dim: usize,
    pub input_weights: Vec<Tensor>,
    pub hidden_weights: Vec<Tensor>,
    pub biases: Vec<Tensor>,
}

impl RnnCellParams {
    /// Creates freshly initialized gate parameters registered under
    /// `prefix` in `store`.
    pub fn build(
        store: &mut ParameterStore,
        prefix: &str,
        kind: CellKind,
        input_dim: usize,
        hidden_dim: usize,
        init: &mut Initializer,
    ) -> Self {
        let mut input_weights = Vec::new();
        let mut hidden_weights = Vec::new();
        let mut biases = Vec::new();
        for gate in kind.gate_names() {
            input_weights.push(store.add(
                format!("{prefix}.w_{gate}"),
                init.glorot_matrix(hidden_dim, input_dim),
            ));
            hidden_weights.push(store.add(
                format!("{prefix}.u_{gate}"),
                init.glorot_matrix(hidden_dim, hidden_dim),
            ));
            biases.push(store.add(format!("{prefix}.b_{gate}"), Tensor::zeros(&[hidden_dim])));
        }
        RnnCellParams {
            kind,
            hidden_dim,
            input_weights,
            hidden_weights,
            biases,
        }
    }

    /// Wires gate handles from an existing store (checkpoint load path).
    pub fn wire(
        store: &ParameterStore,
        prefix: &str,
        kind: CellKind,
        hidden_dim: usize,
    ) -> Result<Self> {
        let mut input_weights = Vec::new();
        let mut hidden_weights = Vec::new();
        let mut biases = Vec::new();
        for gate in kind.gate_names() {
            input_weights.push(store.require(&format!("{prefix}.w_{gate}"))?);
            hidden_weights.push(store.require(&format!("{prefix}.u_{gate}"))?);
            biases.push(store.require(&format!("{prefix}.b_{gate}"))?);
        }
        Ok(RnnCellParams {
            kind,
            hidden_dim,
            input_weights,
            hidden_weights,
            biases,
        })
    }

    fn gate_preact(&self, tape: &mut Tape, gate: usize, x: &Tensor, h: &Tensor) -> Result<Tensor> {
        let wx = tape.matmul(&self.input_weights[gate], x)?;
        let uh = tape.matmul(&self.hidden_weights[gate], h)?;
        let s = tape.add(&wx, &uh)?;
        tape.add(&s, &self.biases[gate])
    }
}

/// Hidden (and, for LSTM, cell) state carried between steps.
#[derive(Clone)]
pub struct RnnState {
    pub h: Tensor,
    pub c: Option<Tensor>,
}

impl RnnState {
    /// Zero initial state.
    pub fn zero(params: &RnnCellParams) -> RnnState {
        RnnState {
            h: Tensor::zeros(&[params.hidden_dim]),
            c: match params.kind {
                CellKind::Lstm => Some(Tensor::zeros(&[params.hidden_dim])),
                CellKind::Gru => None,
            },
        }
    }
}

/// One LSTM step; returns `(h', c')`.
pub fn lstm_step(
    tape: &mut Tape,
    params: &RnnCellParams,
    x: &Tensor,
    h_prev: &Tensor,
    c_prev: &Tensor,
) -> Result<(Tensor, Tensor)> {
    debug_assert_eq!(params.kind, CellKind::Lstm);
    let pre_i = params.gate_preact(tape, 0, x, h_prev)?;
    let i = tape.sigmoid(&pre_i)?;
    let pre_f = params.gate_preact(tape, 1, x, h_prev)?;
    let f = tape.sigmoid(&pre_f)?;
    let pre_o = params.gate_preact(tape, 2, x, h_prev)?;
    let o = tape.sigmoid(&pre_o)?;
    let pre_c = params.gate_preact(tape, 3, x, h_prev)?;
    let cand = tape.tanh(&pre_c)?;
    let keep = tape.elementwise_mul(&f, c_prev)?;
    let write = tape.elementwise_mul(&i, &cand)?;
    let c = tape.add(&keep, &write)?;
    let c_tanh = tape.tanh(&c)?;
    let h = tape.elementwise_mul(&o, &c_tanh)?;
    Ok((h, c))
}

/// One GRU step; returns `h'`.
pub fn gru_step(
    tape: &mut Tape,
    params: &RnnCellParams,
    x: &Tensor,
    h_prev: &Tensor,
) -> Result<Tensor> {
    debug_assert_eq!(params.kind, CellKind::Gru);
    let pre_z = params.gate_preact(tape, 0, x, h_prev)?;
    let z = tape.sigmoid(&pre_z)?;
    let pre_r = params.gate_preact(tape, 1, x, h_prev)?;
    let r = tape.sigmoid(&pre_r)?;
    let gated = tape.elementwise_mul(&r, h_prev)?;
    let wx = tape.matmul(&params.input_weights[2], x)?;
    let ug = tape.matmul(&params.hidden_weights[2], &gated)?;
    let s = tape.add(&wx, &ug)?;
    let pre_h = tape.add(&s, &params.biases[2])?;
    let cand = tape.tanh(&pre_h)?;
    let one_minus_z = tape.sub(&Tensor::scalar(1.0), &z)?;
    let keep = tape.elementwise_mul(&one_minus_z, h_prev)?;
    let write = tape.elementwise_mul(&z, &cand)?;
    tape.add(&keep, &write)
}

/// Advances one step of either cell kind.
pub fn rnn_step(
    tape: &mut Tape,
    params: &RnnCellParams,
    x: &Tensor,
    state: &RnnState,
) -> Result<RnnState> {
    match params.kind {
        CellKind::Lstm => {
            let c_prev = state.c.as_ref().expect("LSTM state carries a cell vector");
            let (h, c) = lstm_step(tape, params, x, &state.h, c_prev)?;
            Ok(RnnState { h, c: Some(c) })
        }
        CellKind::Gru => {
            let h = gru_step(tape, params, x, &state.h)?;
            Ok(RnnState { h, c: None })
        }
    }
}

/// Runs the forward cell left-to-right and the backward cell right-to-left
/// over the input vectors (both from zero initial state) and concatenates
/// the per-position hidden states: `g^k = h_fwd^k ⊕ h_bwd^k`.
pub fn bi_rnn(
    tape: &mut Tape,
    fwd: &RnnCellParams,
    bwd: &RnnCellParams,
    inputs: &[Tensor],
) -> Result<Vec<Tensor>> {
    if inputs.is_empty() {
        return Err(Error::EmptySequence("bi_rnn"));
    }
    let mut h_fwd = Vec::with_capacity(inputs.len());
    let mut state = RnnState::zero(fwd);
    for x in inputs {
        state = rnn_step(tape, fwd, x, &state)?;
        h_fwd.push(state.h.clone());
    }
    let mut h_bwd = vec![None; inputs.len()];
    let mut state = RnnState::zero(bwd);
    for (k, x) in inputs.iter().enumerate().rev() {
        state = rnn_step(tape, bwd, x, &state)?;
        h_bwd[k] = Some(state.h.clone());
    }
    inputs
        .iter()
        .enumerate()
        .map(|(k, _)| tape.concat(&h_fwd[k], h_bwd[k].as_ref().unwrap()))
        .collect()
}

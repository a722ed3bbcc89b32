//! One skip-gram negative-sampling update.
//!
//! For center row `v` (input matrix), context row `u⁺` and negative rows
//! `u⁻ᵢ` (output matrix):
//!
//! ```text
//! L = −ln σ(u⁺·v) − Σᵢ ln σ(−u⁻ᵢ·v)
//! ∂L/∂u  = (σ(u·v) − y) v          y = 1 for the context, 0 for negatives
//! ∂L/∂v  = Σ (σ(u·v) − y) u
//! ```
//!
//! All scores are taken from the rows as they were before the step, so a
//! step is exact gradient descent even when a negative repeats.

use super::EmbeddingModel;
use crate::error::{Error, Result};
use crate::linalg::dot;

/// `ln(1 + e^z)` without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn check_ids(model: &EmbeddingModel, ids: impl IntoIterator<Item = u32>) -> Result<()> {
    let len = model.vocab().len();
    for id in ids {
        if id as usize >= len {
            return Err(Error::IdOutOfRange { id: id as usize, len });
        }
    }
    Ok(())
}

fn targets(context: u32, negatives: &[u32]) -> impl Iterator<Item = (u32, bool)> + '_ {
    std::iter::once((context, true)).chain(negatives.iter().map(|&n| (n, false)))
}

/// Computes the loss and fills `coeffs` with `σ(u·v) − y` per target.
#[inline]
fn score(
    input: &[f32],
    output: &[f32],
    dim: usize,
    center: u32,
    context: u32,
    negatives: &[u32],
    coeffs: &mut Vec<f64>,
) -> f64 {
    let v = &input[center as usize * dim..][..dim];
    coeffs.clear();
    let mut loss = 0.0;
    for (t, positive) in targets(context, negatives) {
        let x = dot(&output[t as usize * dim..][..dim], v);
        if positive {
            loss += softplus(-x);
            coeffs.push(sigmoid(x) - 1.0);
        } else {
            loss += softplus(x);
            coeffs.push(sigmoid(x));
        }
    }
    loss
}

/// Scratch buffers reused across training steps.
#[derive(Default)]
pub(crate) struct StepScratch {
    coeffs: Vec<f64>,
    center_grad: Vec<f64>,
    center_row: Vec<f32>,
}

/// Applies one step without bounds checks on ids; returns the pre-update loss.
#[allow(clippy::too_many_arguments)]
pub(crate) fn step_raw(
    input: &mut [f32],
    output: &mut [f32],
    dim: usize,
    center: u32,
    context: u32,
    negatives: &[u32],
    lr: f64,
    scratch: &mut StepScratch,
) -> f64 {
    let loss = score(input, output, dim, center, context, negatives, &mut scratch.coeffs);
    let v_range = center as usize * dim..center as usize * dim + dim;
    scratch.center_row.clear();
    scratch.center_row.extend_from_slice(&input[v_range.clone()]);
    scratch.center_grad.clear();
    scratch.center_grad.resize(dim, 0.0);

    for (&g, (t, _)) in scratch.coeffs.iter().zip(targets(context, negatives)) {
        let u = &output[t as usize * dim..][..dim];
        for (acc, &ui) in scratch.center_grad.iter_mut().zip(u) {
            *acc += g * ui as f64;
        }
    }
    for (&g, (t, _)) in scratch.coeffs.iter().zip(targets(context, negatives)) {
        let u = &mut output[t as usize * dim..][..dim];
        let step = lr * g;
        for (ui, &vi) in u.iter_mut().zip(&scratch.center_row) {
            *ui = (*ui as f64 - step * vi as f64) as f32;
        }
    }
    for (vi, &gi) in input[v_range].iter_mut().zip(&scratch.center_grad) {
        *vi = (*vi as f64 - lr * gi) as f32;
    }
    loss
}

/// Loss of one `(center, context, negatives)` example at the current weights.
pub fn sgns_loss(model: &EmbeddingModel, center: u32, context: u32, negatives: &[u32]) -> Result<f64> {
    check_ids(model, targets(context, negatives).map(|(t, _)| t).chain([center]))?;
    let mut coeffs = Vec::with_capacity(negatives.len() + 1);
    Ok(score(
        &model.input,
        &model.output,
        model.dim(),
        center,
        context,
        negatives,
        &mut coeffs,
    ))
}

/// Loss plus its gradient with respect to every row the example touches.
#[derive(Debug, Clone, PartialEq)]
pub struct SgnsGradient {
    pub loss: f64,
    /// `∂L/∂v` for the center's input row.
    pub center: Vec<f64>,
    /// `∂L/∂u` per distinct output row, ascending by id.
    pub outputs: Vec<(u32, Vec<f64>)>,
}

pub fn sgns_gradient(model: &EmbeddingModel, center: u32, context: u32, negatives: &[u32]) -> Result<SgnsGradient> {
    check_ids(model, targets(context, negatives).map(|(t, _)| t).chain([center]))?;
    let dim = model.dim();
    let mut coeffs = Vec::new();
    let loss = score(
        &model.input,
        &model.output,
        dim,
        center,
        context,
        negatives,
        &mut coeffs,
    );
    let v = model.row(center).expect("checked");

    let mut center_grad = vec![0.0; dim];
    let mut outputs: Vec<(u32, Vec<f64>)> = Vec::new();
    for (&g, (t, _)) in coeffs.iter().zip(targets(context, negatives)) {
        let u = model.output_row(t).expect("checked");
        for (acc, &ui) in center_grad.iter_mut().zip(u) {
            *acc += g * ui as f64;
        }
        let slot = match outputs.iter().position(|(id, _)| *id == t) {
            Some(i) => i,
            None => {
                outputs.push((t, vec![0.0; dim]));
                outputs.len() - 1
            }
        };
        for (acc, &vi) in outputs[slot].1.iter_mut().zip(v) {
            *acc += g * vi as f64;
        }
    }
    outputs.sort_by_key(|(id, _)| *id);
    Ok(SgnsGradient {
        loss,
        center: center_grad,
        outputs,
    })
}

/// One gradient-descent step; returns the loss evaluated before the update.
pub fn sgns_step(model: &mut EmbeddingModel, center: u32, context: u32, negatives: &[u32], lr: f64) -> Result<f64> {
    check_ids(model, targets(context, negatives).map(|(t, _)| t).chain([center]))?;
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::InvalidConfig("learning rate must be positive".into()));
    }
    let dim = model.dim();
    let mut scratch = StepScratch::default();
    Ok(step_raw(
        &mut model.input,
        &mut model.output,
        dim,
        center,
        context,
        negatives,
        lr,
        &mut scratch,
    ))
}

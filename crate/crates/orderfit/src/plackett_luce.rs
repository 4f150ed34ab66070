//! Plackett-Luce likelihoods, ListMLE and weighted ListMLE training, and
//! sort-based inference.
//!
//! The probability of showing a list in a given order is a product of
//! sequential softmax choices over the remaining items, driven by a linear
//! scorer `u·x`. ListMLE maximizes the likelihood of the observed orders;
//! weighted ListMLE scales each session's log-likelihood by its observed
//! score so that high-scoring orders dominate the fit. Both objectives are
//! minimized by gradient descent with a backtracking line search.

use ndarray::Array1;

use crate::data::{sort_descending, Dataset, ItemList, Permutation};
use crate::error::{Error, Result};

/// Linear scorer `g(x) = u·x` for Plackett-Luce probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PLModel {
    u: Array1<f64>,
}

impl PLModel {
    pub fn new(u: Array1<f64>) -> Result<Self> {
        if u.is_empty() || u.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(
                "model weights must be non-empty and finite".into(),
            ));
        }
        Ok(Self { u })
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            u: Array1::zeros(d),
        }
    }

    pub fn u(&self) -> &Array1<f64> {
        &self.u
    }

    /// Item score `u·x`.
    pub fn score(&self, x: ndarray::ArrayView1<'_, f64>) -> f64 {
        self.u.dot(&x)
    }
}

/// Gradient-descent settings. `tol` stops the loop once the loss decrease
/// of an accepted step falls below it.
#[derive(Debug, Clone, Copy)]
pub struct GDConfig {
    pub step_size: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl GDConfig {
    pub fn new(step_size: f64, max_iters: usize, tol: f64) -> Result<Self> {
        if step_size <= 0.0 || max_iters == 0 || tol <= 0.0 {
            return Err(Error::InvalidInput(
                "step size, max iterations and tolerance must all be positive".into(),
            ));
        }
        Ok(Self {
            step_size,
            max_iters,
            tol,
        })
    }
}

impl Default for GDConfig {
    fn default() -> Self {
        Self {
            step_size: 0.5,
            max_iters: 500,
            tol: 1e-9,
        }
    }
}

fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Scores of the items in display order: entry `j` is the score of the
/// item shown at position `j`.
fn display_scores(model: &PLModel, items: &ItemList, perm: &Permutation) -> Result<Vec<f64>> {
    if model.u.len() != items.d() {
        return Err(Error::DimensionMismatch {
            expected: items.d(),
            actual: model.u.len(),
            context: "model dimension vs feature dimension",
        });
    }
    if perm.len() != items.n() {
        return Err(Error::DimensionMismatch {
            expected: items.n(),
            actual: perm.len(),
            context: "permutation length vs list length",
        });
    }
    let inv = perm.invert();
    Ok((0..items.n())
        .map(|j| model.score(items.feature(inv.position_of(j))))
        .collect())
}

/// Log-probability of showing `items` in the order `perm`:
/// the sum over positions `j` of `t_j - log Σ_{k>=j} exp(t_k)` where `t_j`
/// is the score of the item displayed at position `j`. Always `<= 0`;
/// log-sum-exp terms are max-subtracted.
pub fn pl_log_prob(model: &PLModel, items: &ItemList, perm: &Permutation) -> Result<f64> {
    let t = display_scores(model, items, perm)?;
    let mut log_prob = 0.0;
    let mut suffix_lse = f64::NEG_INFINITY;
    for &tj in t.iter().rev() {
        suffix_lse = logaddexp(tj, suffix_lse);
        log_prob += tj - suffix_lse;
    }
    Ok(log_prob.min(0.0))
}

fn validate_weights(weights: &[f64], n_sessions: usize) -> Result<()> {
    if weights.len() != n_sessions {
        return Err(Error::DimensionMismatch {
            expected: n_sessions,
            actual: weights.len(),
            context: "weight vector length vs number of sessions",
        });
    }
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::NegativeWeight(i));
        }
    }
    Ok(())
}

/// Weighted negative log-likelihood `Σ_i -w_i · log P(Π_i | X_i)`.
/// With all weights 1 this is the plain ListMLE objective; with the
/// session scores as weights it is the weighted ListMLE objective.
pub fn listmle_loss(model: &PLModel, data: &Dataset, weights: &[f64]) -> Result<f64> {
    validate_weights(weights, data.len())?;
    let mut loss = 0.0;
    for (session, &w) in data.sessions().iter().zip(weights) {
        loss -= w * pl_log_prob(model, session.items(), session.shown_order())?;
    }
    Ok(loss)
}

/// Exact gradient of [`listmle_loss`] with respect to the scorer weights.
pub fn listmle_grad(model: &PLModel, data: &Dataset, weights: &[f64]) -> Result<Array1<f64>> {
    validate_weights(weights, data.len())?;
    let mut grad = Array1::zeros(data.d());
    for (session, &w) in data.sessions().iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        let items = session.items();
        let perm = session.shown_order();
        let t = display_scores(model, items, perm)?;
        let n = t.len();
        // suffix log-sum-exp values: lse[j] = log Σ_{k>=j} exp(t_k)
        let mut lse = vec![0.0; n];
        let mut acc = f64::NEG_INFINITY;
        for j in (0..n).rev() {
            acc = logaddexp(t[j], acc);
            lse[j] = acc;
        }
        // d(-log P)/d t_k = Σ_{j<=k} softmax_j(t_k) - 1
        let inv = perm.invert();
        for k in 0..n {
            let mut coeff = -1.0;
            for &l in lse.iter().take(k + 1) {
                coeff += (t[k] - l).exp();
            }
            let x = items.feature(inv.position_of(k));
            grad.scaled_add(w * coeff, &x);
        }
    }
    Ok(grad)
}

/// Result of a gradient-descent run.
#[derive(Debug, Clone)]
pub struct PlTraining {
    pub model: PLModel,
    /// False when the run stopped on the iteration cap instead of `tol`.
    pub converged: bool,
    pub iterations: usize,
    pub final_loss: f64,
}

/// Trains a Plackett-Luce scorer from `u = 0` by gradient descent with a
/// backtracking line search (the step doubles after each accepted iterate
/// and halves while the trial loss increases). `weighted = true` uses the
/// session scores as weights, `false` uses all ones; with unit scores the
/// two paths run the identical arithmetic.
pub fn train_pl(data: &Dataset, cfg: &GDConfig, weighted: bool) -> Result<PlTraining> {
    let weights = if weighted {
        data.scores()
    } else {
        vec![1.0; data.len()]
    };
    let mut model = PLModel::zeros(data.d());
    let mut loss = listmle_loss(&model, data, &weights)?;
    let mut step = cfg.step_size;
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..cfg.max_iters {
        let grad = listmle_grad(&model, data, &weights)?;
        if grad.iter().all(|&g| g == 0.0) {
            converged = true;
            break;
        }
        step *= 2.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let candidate = PLModel {
                u: &model.u - &(step * &grad),
            };
            let candidate_loss = listmle_loss(&candidate, data, &weights)?;
            if candidate_loss.is_finite() && candidate_loss <= loss {
                accepted = Some((candidate, candidate_loss));
                break;
            }
            step *= 0.5;
        }
        let Some((candidate, candidate_loss)) = accepted else {
            return Err(Error::Divergence(
                "loss increased for a full backtracking sweep".into(),
            ));
        };
        let decrease = loss - candidate_loss;
        model = candidate;
        loss = candidate_loss;
        iterations += 1;
        if decrease < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(PlTraining {
        model,
        converged,
        iterations,
        final_loss: loss,
    })
}

const MAX_HALVINGS: usize = 100;

/// Most probable order under the model: items sorted by descending score.
/// Equals the argmax of [`pl_log_prob`] over all permutations.
pub fn infer_pl(model: &PLModel, items: &ItemList) -> Result<Permutation> {
    if model.u.len() != items.d() {
        return Err(Error::DimensionMismatch {
            expected: items.d(),
            actual: model.u.len(),
            context: "model dimension vs feature dimension",
        });
    }
    let scores: Vec<f64> = (0..items.n())
        .map(|i| model.score(items.feature(i)))
        .collect();
    sort_descending(&scores)
}

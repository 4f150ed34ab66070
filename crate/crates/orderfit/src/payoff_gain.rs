//! Item-payoff / positional-gain score model.
//!
//! The predicted score of showing `items` in order `perm` is
//! `Σ_i g[π_i] · exp(v·x_i)`: each item carries a payoff `exp(v·x_i)` and
//! each display position a gain `g[j]`. Training minimizes the squared
//! prediction error plus a ridge penalty on `g`, subject to `‖v‖₂ ≤ 1`,
//! by alternating a closed-form gain update with projected gradient
//! descent on the payoff weights. Score-maximizing inference matches
//! sorted payoffs to sorted gains.

use ndarray::{Array1, Array2};

use crate::data::{Dataset, ItemList, Permutation};
use crate::error::{Error, Result};

/// Payoff weights `v` (`‖v‖₂ ≤ 1`), positional gains `g`, and the ridge
/// strength `lambda` the gains were trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffGainModel {
    v: Array1<f64>,
    g: Array1<f64>,
    lambda: f64,
}

const UNIT_BALL_SLACK: f64 = 1e-12;

impl PayoffGainModel {
    pub fn new(v: Array1<f64>, g: Array1<f64>, lambda: f64) -> Result<Self> {
        if v.is_empty() || g.is_empty() {
            return Err(Error::InvalidInput(
                "payoff and gain vectors must be non-empty".into(),
            ));
        }
        if v.iter().chain(g.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(
                "model parameters must be finite".into(),
            ));
        }
        let norm = v.dot(&v).sqrt();
        if norm > 1.0 + UNIT_BALL_SLACK {
            return Err(Error::InvalidInput(format!(
                "payoff weights must satisfy ||v|| <= 1, got {}",
                norm
            )));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidInput(
                "lambda must be finite and >= 0".into(),
            ));
        }
        Ok(Self { v, g, lambda })
    }

    pub fn v(&self) -> &Array1<f64> {
        &self.v
    }

    pub fn g(&self) -> &Array1<f64> {
        &self.g
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Alternating-minimization settings: `eps` stops the outer loop once the
/// tracked objective decrease falls below it, `eta` is the initial inner
/// step size, `inner_tol` stops the projected gradient iterations.
#[derive(Debug, Clone, Copy)]
pub struct AltMinConfig {
    pub eps: f64,
    pub eta: f64,
    pub inner_tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
}

impl AltMinConfig {
    pub fn new(
        eps: f64,
        eta: f64,
        inner_tol: f64,
        max_outer: usize,
        max_inner: usize,
    ) -> Result<Self> {
        if eps <= 0.0 || eta <= 0.0 || inner_tol <= 0.0 || max_outer == 0 || max_inner == 0 {
            return Err(Error::InvalidInput(
                "all alternating-minimization settings must be positive".into(),
            ));
        }
        Ok(Self {
            eps,
            eta,
            inner_tol,
            max_outer,
            max_inner,
        })
    }
}

impl Default for AltMinConfig {
    fn default() -> Self {
        Self {
            eps: 1e-8,
            eta: 1e-3,
            inner_tol: 1e-10,
            max_outer: 100,
            max_inner: 200,
        }
    }
}

fn check_dims(v_len: usize, g_len: usize, items: &ItemList) -> Result<()> {
    if v_len != items.d() {
        return Err(Error::DimensionMismatch {
            expected: items.d(),
            actual: v_len,
            context: "payoff weight dimension vs feature dimension",
        });
    }
    if g_len != items.n() {
        return Err(Error::DimensionMismatch {
            expected: items.n(),
            actual: g_len,
            context: "gain vector length vs list length",
        });
    }
    Ok(())
}

/// Per-item payoffs `exp(v·x_i)`, in item order.
fn item_payoffs(v: &Array1<f64>, items: &ItemList) -> Vec<f64> {
    (0..items.n())
        .map(|i| v.dot(&items.feature(i)).exp())
        .collect()
}

/// Payoffs in display order: entry `j` is the payoff of the item shown at
/// position `j` (row `i` of the training design matrix).
fn display_payoffs(v: &Array1<f64>, items: &ItemList, perm: &Permutation) -> Vec<f64> {
    let inv = perm.invert();
    (0..items.n())
        .map(|j| v.dot(&items.feature(inv.position_of(j))).exp())
        .collect()
}

/// Predicted score `Σ_i g[π_i] · exp(v·x_i)`, equal to the sum of the
/// scoring-matrix entries selected by `perm`.
pub fn predict_score(
    model: &PayoffGainModel,
    items: &ItemList,
    perm: &Permutation,
) -> Result<f64> {
    check_dims(model.v.len(), model.g.len(), items)?;
    if perm.len() != items.n() {
        return Err(Error::DimensionMismatch {
            expected: items.n(),
            actual: perm.len(),
            context: "permutation length vs list length",
        });
    }
    let mut total = 0.0;
    for i in 0..items.n() {
        total += model.g[perm.position_of(i)] * model.v.dot(&items.feature(i)).exp();
    }
    Ok(total)
}

/// Scoring matrix with entry `(i, j) = g[j] · exp(v·x_i)`: the contribution
/// of placing item `i` at position `j`. Rank one by construction.
pub fn scoring_matrix(model: &PayoffGainModel, items: &ItemList) -> Result<Array2<f64>> {
    check_dims(model.v.len(), model.g.len(), items)?;
    let n = items.n();
    let mut s = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            s[[i, j]] = model.g[j] * model.v.dot(&items.feature(i)).exp();
        }
    }
    Ok(s)
}

/// Solves the SPD system `a x = b` by Cholesky factorization. Returns
/// `None` when a pivot collapses (singular or indefinite input).
fn cholesky_solve(mut a: Array2<f64>, mut b: Array1<f64>) -> Option<Array1<f64>> {
    let n = a.nrows();
    let scale = (0..n).map(|i| a[[i, i]].abs()).fold(0.0f64, f64::max);
    let floor = scale.max(1.0) * 1e-13;
    for k in 0..n {
        let mut diag = a[[k, k]];
        for j in 0..k {
            diag -= a[[k, j]] * a[[k, j]];
        }
        if !(diag > floor * floor) {
            return None;
        }
        let diag = diag.sqrt();
        a[[k, k]] = diag;
        for i in (k + 1)..n {
            let mut val = a[[i, k]];
            for j in 0..k {
                val -= a[[i, j]] * a[[k, j]];
            }
            a[[i, k]] = val / diag;
        }
    }
    for i in 0..n {
        let mut val = b[i];
        for j in 0..i {
            val -= a[[i, j]] * b[j];
        }
        b[i] = val / a[[i, i]];
    }
    for i in (0..n).rev() {
        let mut val = b[i];
        for j in (i + 1)..n {
            val -= a[[j, i]] * b[j];
        }
        b[i] = val / a[[i, i]];
    }
    Some(b)
}

/// Closed-form ridge update for the gain vector: the solution of
/// `(AᵀA + λI) g = Aᵀs`, where row `i` of `A` holds the display-order
/// payoffs of session `i`.
pub fn g_update(data: &Dataset, v: &Array1<f64>, lambda: f64) -> Result<Array1<f64>> {
    if v.len() != data.d() {
        return Err(Error::DimensionMismatch {
            expected: data.d(),
            actual: v.len(),
            context: "payoff weight dimension vs feature dimension",
        });
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidInput(
            "lambda must be finite and >= 0".into(),
        ));
    }
    let n = data.n();
    let mut ata = Array2::zeros((n, n));
    let mut ats = Array1::zeros(n);
    for session in data.sessions() {
        let row = display_payoffs(v, session.items(), session.shown_order());
        for j in 0..n {
            ats[j] += session.score() * row[j];
            for k in 0..n {
                ata[[j, k]] += row[j] * row[k];
            }
        }
    }
    for j in 0..n {
        ata[[j, j]] += lambda;
    }
    cholesky_solve(ata, ats).ok_or(Error::SingularSystem)
}

/// Sum of squared prediction residuals `Σ_i (s_i - a_i·g)²` at the given
/// parameters, the data-fit part of the training objective.
pub fn residual_sum_squares(data: &Dataset, v: &Array1<f64>, g: &Array1<f64>) -> Result<f64> {
    if v.len() != data.d() || g.len() != data.n() {
        return Err(Error::DimensionMismatch {
            expected: data.d(),
            actual: v.len(),
            context: "parameter dimensions vs dataset",
        });
    }
    let mut total = 0.0;
    for session in data.sessions() {
        let row = display_payoffs(v, session.items(), session.shown_order());
        let pred: f64 = row.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
        let e = pred - session.score();
        total += e * e;
    }
    Ok(total)
}

/// Exact gradient of [`residual_sum_squares`] with respect to `v`:
/// `Σ_i 2 e_i · X_Π Diag(g) exp(X_Πᵀ v)`.
pub fn v_gradient(data: &Dataset, v: &Array1<f64>, g: &Array1<f64>) -> Result<Array1<f64>> {
    if v.len() != data.d() || g.len() != data.n() {
        return Err(Error::DimensionMismatch {
            expected: data.d(),
            actual: v.len(),
            context: "parameter dimensions vs dataset",
        });
    }
    let mut grad = Array1::zeros(data.d());
    for session in data.sessions() {
        let items = session.items();
        let inv = session.shown_order().invert();
        let row = display_payoffs(v, items, session.shown_order());
        let pred: f64 = row.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
        let e = pred - session.score();
        for j in 0..items.n() {
            let x = items.feature(inv.position_of(j));
            grad.scaled_add(2.0 * e * g[j] * row[j], &x);
        }
    }
    Ok(grad)
}

/// Scales `v` back onto the unit ball: `min{1, 1/‖v‖₂} · v`.
pub fn project_to_unit_ball(v: &Array1<f64>) -> Array1<f64> {
    let norm = v.dot(v).sqrt();
    if norm > 1.0 {
        v / norm
    } else {
        v.clone()
    }
}

const MAX_HALVINGS: usize = 60;

/// Projected gradient descent for the payoff weights with the gains held
/// fixed. Starts from `v_init`, takes steps `v - η d` projected onto the
/// unit ball, halving `η` whenever a step would increase the data fit, and
/// stops once the iterate moves less than `inner_tol` or `max_inner` is
/// reached. The returned point never fits worse than `v_init`.
pub fn v_update(
    data: &Dataset,
    g: &Array1<f64>,
    cfg: &AltMinConfig,
    v_init: &Array1<f64>,
) -> Result<Array1<f64>> {
    let init_norm = v_init.dot(v_init).sqrt();
    if init_norm > 1.0 + UNIT_BALL_SLACK {
        return Err(Error::InvalidInput(format!(
            "v_init must satisfy ||v|| <= 1, got {}",
            init_norm
        )));
    }
    let mut v = v_init.clone();
    let mut fit = residual_sum_squares(data, &v, g)?;
    for _ in 0..cfg.max_inner {
        let grad = v_gradient(data, &v, g)?;
        let mut eta = cfg.eta;
        let mut next = v.clone();
        let mut next_fit = fit;
        for _ in 0..=MAX_HALVINGS {
            let candidate = project_to_unit_ball(&(&v - &(eta * &grad)));
            let candidate_fit = residual_sum_squares(data, &candidate, g)?;
            if candidate_fit.is_finite() && candidate_fit <= fit {
                next = candidate;
                next_fit = candidate_fit;
                break;
            }
            eta *= 0.5;
        }
        let moved = (&next - &v).mapv(|x| x * x).sum().sqrt();
        v = next;
        fit = next_fit;
        if moved <= cfg.inner_tol {
            break;
        }
    }
    Ok(v)
}

/// Result of an alternating-minimization run. `objective_trace` holds the
/// tracked objective (data fit plus `λ‖g‖₂²`) starting at the
/// initialization value `Σ_i s_i²`.
#[derive(Debug, Clone)]
pub struct AltMinTraining {
    pub model: PayoffGainModel,
    pub converged: bool,
    pub outer_iterations: usize,
    pub objective_trace: Vec<f64>,
}

/// Alternating minimization: from `v = 1_d/√d`, repeat the closed-form
/// gain update followed by projected gradient descent on the payoff
/// weights until the tracked objective decrease drops to `eps` or
/// `max_outer` is reached. The trace is non-increasing by construction.
pub fn train_alternating(
    data: &Dataset,
    lambda: f64,
    cfg: &AltMinConfig,
) -> Result<AltMinTraining> {
    let d = data.d();
    let mut v = Array1::from_elem(d, 1.0 / (d as f64).sqrt());
    let mut objective: f64 = data.sessions().iter().map(|s| s.score() * s.score()).sum();
    let mut trace = vec![objective];
    let mut g = Array1::zeros(data.n());
    let mut converged = false;
    let mut outer_iterations = 0;

    for _ in 0..cfg.max_outer {
        g = g_update(data, &v, lambda)?;
        v = v_update(data, &g, cfg, &v)?;
        let next = residual_sum_squares(data, &v, &g)? + lambda * g.dot(&g);
        if !next.is_finite() {
            return Err(Error::Divergence(
                "alternating-minimization objective became non-finite".into(),
            ));
        }
        let decrease = objective - next;
        objective = next;
        trace.push(next);
        outer_iterations += 1;
        if decrease <= cfg.eps {
            converged = true;
            break;
        }
    }

    Ok(AltMinTraining {
        model: PayoffGainModel::new(v, g, lambda)?,
        converged,
        outer_iterations,
        objective_trace: trace,
    })
}

/// Score-maximizing order: the item with the r-th largest payoff goes to
/// the position with the r-th largest gain. Within a run of equal gains
/// the matched items keep ascending item order, so a constant gain vector
/// yields the identity permutation.
pub fn infer_order(model: &PayoffGainModel, items: &ItemList) -> Result<Permutation> {
    check_dims(model.v.len(), model.g.len(), items)?;
    let n = items.n();
    let payoffs = item_payoffs(&model.v, items);

    let mut item_order: Vec<usize> = (0..n).collect();
    item_order.sort_by(|&a, &b| payoffs[b].total_cmp(&payoffs[a]).then(a.cmp(&b)));
    let mut pos_order: Vec<usize> = (0..n).collect();
    pos_order.sort_by(|&a, &b| model.g[b].total_cmp(&model.g[a]).then(a.cmp(&b)));

    let mut positions = vec![0usize; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && model.g[pos_order[end]] == model.g[pos_order[start]] {
            end += 1;
        }
        let mut block_items: Vec<usize> = item_order[start..end].to_vec();
        block_items.sort_unstable();
        // positions in the run are already in ascending index order
        for (item, pos) in block_items.iter().zip(&pos_order[start..end]) {
            positions[*item] = *pos;
        }
        start = end;
    }
    Permutation::new(positions)
}

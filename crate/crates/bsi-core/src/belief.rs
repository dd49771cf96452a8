//! Logit-space belief states and the operations that move them.
//!
//! A belief over `n` independent categorical components is parameterized by a
//! logit matrix `z` of shape `[n, c]`; the implied distribution over samples
//! is `Cat(softmax(z))` per row. Observing `y ~ N(x, alpha^-1 I)` updates the
//! belief additively: `z <- z + alpha * y`. Beliefs store raw logits, never
//! probabilities, because the update is affine in logit space.

use ndarray::{Array2, ArrayView2};

use crate::error::{BsiError, Result};
use crate::rng::{keys, NoiseSource};
use crate::schedule::PrecisionSchedule;

/// Belief state: per-component logits plus the time it corresponds to.
///
/// Time is carried inside the state so samplers cannot desynchronize schedule
/// lookups from the logits they apply to.
#[derive(Clone, Debug)]
pub struct BeliefState {
    logits: Array2<f64>,
    t: f64,
}

impl BeliefState {
    pub fn new(logits: Array2<f64>, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(BsiError::Domain(format!("belief time {t} outside [0, 1]")));
        }
        if logits.iter().any(|v| !v.is_finite()) {
            return Err(BsiError::NonFinite("belief logits".into()));
        }
        Ok(Self { logits, t })
    }

    pub fn logits(&self) -> ArrayView2<'_, f64> {
        self.logits.view()
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n_components(&self) -> usize {
        self.logits.nrows()
    }

    pub fn n_classes(&self) -> usize {
        self.logits.ncols()
    }

    /// Same logits relabeled with a new time (used after a stepper advances).
    pub fn with_time(self, t: f64) -> Result<Self> {
        Self::new(self.logits, t)
    }

    pub(crate) fn logits_mut(&mut self) -> &mut Array2<f64> {
        &mut self.logits
    }

    pub(crate) fn set_time(&mut self, t: f64) {
        self.t = t;
    }

    pub fn into_logits(self) -> Array2<f64> {
        self.logits
    }
}

/// One-hot categorical sample over `n` components.
#[derive(Clone, Debug, PartialEq)]
pub struct CategoricalSample {
    onehot: Array2<f64>,
}

impl CategoricalSample {
    pub fn from_classes(classes: &[usize], c: usize) -> Result<Self> {
        if c == 0 {
            return Err(BsiError::Config("need at least one class".into()));
        }
        let mut onehot = Array2::zeros((classes.len(), c));
        for (i, &k) in classes.iter().enumerate() {
            if k >= c {
                return Err(BsiError::Domain(format!("class {k} out of range 0..{c}")));
            }
            onehot[[i, k]] = 1.0;
        }
        Ok(Self { onehot })
    }

    pub fn from_onehot(onehot: Array2<f64>) -> Result<Self> {
        for row in onehot.rows() {
            let ones = row.iter().filter(|&&v| v == 1.0).count();
            let zeros = row.iter().filter(|&&v| v == 0.0).count();
            if ones != 1 || ones + zeros != row.len() {
                return Err(BsiError::Domain(
                    "one-hot rows must contain exactly one 1 and otherwise 0".into(),
                ));
            }
        }
        Ok(Self { onehot })
    }

    pub fn onehot(&self) -> ArrayView2<'_, f64> {
        self.onehot.view()
    }

    pub fn classes(&self) -> Vec<usize> {
        self.onehot
            .rows()
            .into_iter()
            .map(|r| r.iter().position(|&v| v == 1.0).unwrap())
            .collect()
    }

    pub fn n_components(&self) -> usize {
        self.onehot.nrows()
    }

    pub fn n_classes(&self) -> usize {
        self.onehot.ncols()
    }
}

/// A noisy observation `y` at precision `alpha`.
#[derive(Clone, Debug)]
pub struct Measurement {
    y: Array2<f64>,
    precision: f64,
}

impl Measurement {
    pub fn new(y: Array2<f64>, precision: f64) -> Result<Self> {
        if !(precision > 0.0) {
            return Err(BsiError::Domain(format!(
                "measurement precision must be positive, got {precision}"
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(BsiError::NonFinite("measurement".into()));
        }
        Ok(Self { y, precision })
    }

    pub fn y(&self) -> ArrayView2<'_, f64> {
        self.y.view()
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }
}

/// Draw the initial belief `z_0 ~ N(mu0, beta0 * I)` per component.
pub fn sample_prior(
    schedule: &PrecisionSchedule,
    n_components: usize,
    noise: &impl NoiseSource,
) -> BeliefState {
    let c = schedule.n_classes();
    let sd = schedule.beta0().sqrt();
    let mut logits = Array2::zeros((n_components, c));
    for i in 0..n_components {
        let mut lane = noise.lane(keys::PRIOR, i as u64);
        for j in 0..c {
            logits[[i, j]] = schedule.mu0()[j] + sd * lane.normal();
        }
    }
    BeliefState::new(logits, 0.0).expect("prior logits are finite")
}

/// Posterior update after one measurement: `z <- z + alpha * y`.
/// Time is unchanged; the caller advances it.
pub fn bayes_update(z: &BeliefState, m: &Measurement) -> Result<BeliefState> {
    if z.logits.dim() != m.y.dim() {
        return Err(BsiError::Shape(format!(
            "belief {:?} vs measurement {:?}",
            z.logits.dim(),
            m.y.dim()
        )));
    }
    let logits = &z.logits + &(m.precision * &m.y);
    BeliefState::new(logits, z.t)
}

/// Draw from the closed-form encoding marginal
/// `z ~ N(mu0 + beta(t) x, (beta0 + beta(t)) I)`, one row per component.
///
/// At `t = 0` this is exactly the prior draw (same noise lanes).
pub fn encode_marginal(
    schedule: &PrecisionSchedule,
    x: &CategoricalSample,
    t: f64,
    noise: &impl NoiseSource,
) -> Result<BeliefState> {
    let c = schedule.n_classes();
    if x.n_classes() != c {
        return Err(BsiError::Shape(format!(
            "sample has {} classes, schedule has {c}",
            x.n_classes()
        )));
    }
    let beta = schedule.beta(t)?;
    let sd = (schedule.beta0() + beta).sqrt();
    let mut logits = Array2::zeros((x.n_components(), c));
    for i in 0..x.n_components() {
        let mut lane = noise.lane(keys::PRIOR, i as u64);
        for j in 0..c {
            logits[[i, j]] = schedule.mu0()[j] + beta * x.onehot[[i, j]] + sd * lane.normal();
        }
    }
    BeliefState::new(logits, t)
}

/// Approximate score of the marginal density at `z`:
/// `(mu0 + beta(t) x_hat - z) / (beta(t) + beta0)`.
///
/// `x_hat` is the reconstruction to plug in; with the exact sample it equals
/// the gradient of the encoding marginal's log density.
pub fn score(
    schedule: &PrecisionSchedule,
    z: &BeliefState,
    x_hat: &Array2<f64>,
) -> Result<Array2<f64>> {
    if z.logits.dim() != x_hat.dim() {
        return Err(BsiError::Shape(format!(
            "belief {:?} vs reconstruction {:?}",
            z.logits.dim(),
            x_hat.dim()
        )));
    }
    let beta = schedule.beta(z.t)?;
    let denom = beta + schedule.beta0();
    if denom == 0.0 {
        return Err(BsiError::Singular(
            "beta(t) + beta0 = 0 (beta0 = 0 at t = 0)".into(),
        ));
    }
    let mu0 = schedule.mu0();
    let mut out = Array2::zeros(z.logits.dim());
    for i in 0..z.n_components() {
        for j in 0..z.n_classes() {
            out[[i, j]] = (mu0[j] + beta * x_hat[[i, j]] - z.logits[[i, j]]) / denom;
        }
    }
    Ok(out)
}

/// Row-wise softmax of the belief logits; rows sum to 1.
pub fn posterior_pmf(z: &BeliefState) -> Array2<f64> {
    let mut out = z.logits.clone();
    for mut row in out.rows_mut() {
        softmax_in_place(row.as_slice_mut().expect("contiguous row"));
    }
    out
}

/// Draw one class per component from `Cat(softmax(z))`.
pub fn sample_categorical(z: &BeliefState, noise: &impl NoiseSource) -> CategoricalSample {
    let pmf = posterior_pmf(z);
    let mut classes = Vec::with_capacity(z.n_components());
    for (i, row) in pmf.rows().into_iter().enumerate() {
        let mut lane = noise.lane(keys::FINAL_DRAW, i as u64);
        let u = lane.uniform();
        let mut acc = 0.0;
        let mut chosen = row.len() - 1;
        for (j, &p) in row.iter().enumerate() {
            acc += p;
            if u <= acc {
                chosen = j;
                break;
            }
        }
        classes.push(chosen);
    }
    CategoricalSample::from_classes(&classes, z.n_classes()).expect("classes in range")
}

/// Numerically stable in-place softmax with per-row max subtraction.
pub(crate) fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

/// Row-wise argmax with lowest-index tie-break.
pub(crate) fn argmax_row(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = j;
        }
    }
    best
}

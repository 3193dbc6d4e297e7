//! Soft-margin RBF support vector machine trained in the dual.
//!
//! Binary sub-problems are solved by two-coordinate ascent: at every step the
//! maximal KKT-violating pair is selected and optimized analytically, until
//! the violation gap drops below `tol`. Multiclass prediction is one-vs-one
//! with majority voting.

use crate::blobs::FeatureVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{ClassLabel, Dataset, FEATURE_DIM};

pub type Features<T> = [T; FEATURE_DIM];

#[inline]
pub fn rbf_kernel<T: Scalar>(gamma: T, a: &[T], b: &[T]) -> T {
    let d2: T = a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

/// Per-feature z-score parameters learned from training rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization<T> {
    pub mean: Features<T>,
    pub std: Features<T>,
}

impl<T: Scalar> Normalization<T> {
    pub fn fit(rows: &[Features<T>]) -> Self {
        let n = T::from_count(rows.len().max(1));
        let mut mean = [T::zero(); FEATURE_DIM];
        for r in rows {
            for (m, &v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut std = [T::zero(); FEATURE_DIM];
        for r in rows {
            for ((s, &v), &m) in std.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut std {
            *s = (*s / n).sqrt();
        }
        Normalization { mean, std }
    }

    /// Features with zero spread are centred but not scaled.
    pub fn apply(&self, x: &Features<T>) -> Features<T> {
        let mut out = *x;
        for (i, o) in out.iter_mut().enumerate() {
            *o -= self.mean[i];
            if self.std[i] > T::zero() {
                *o /= self.std[i];
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams<T> {
    pub c: T,
    pub gamma: T,
    /// Stopping tolerance on the maximal KKT violation.
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Scalar> SvmParams<T> {
    pub fn new(c: T, gamma: T) -> Self {
        SvmParams {
            c,
            gamma,
            tol: T::lit(1e-3),
            max_iter: 10_000_000,
        }
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.c > T::zero() && self.c.is_finite()) {
            return Err(Error::invalid(format!("C must be > 0, got {}", self.c)));
        }
        if !(self.gamma > T::zero() && self.gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.tol > T::zero()) {
            return Err(Error::invalid("tol must be > 0"));
        }
        Ok(())
    }
}

/// Result of one binary dual solve.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySolution<T> {
    /// Lagrange multipliers, one per training point, in `[0, C]`.
    pub alpha: Vec<T>,
    pub bias: T,
    /// Dual objective `sum(alpha) - 1/2 alpha' Q alpha` at the solution.
    pub objective: T,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Scalar> BinarySolution<T> {
    /// Decision value `sum_i alpha_i y_i K(x_i, x) + b`.
    pub fn decision(&self, xs: &[Features<T>], y: &[bool], gamma: T, x: &Features<T>) -> T {
        let mut f = self.bias;
        for ((a, xi), &yi) in self.alpha.iter().zip(xs).zip(y) {
            if *a > T::zero() {
                let k = rbf_kernel(gamma, xi, x);
                f += if yi { *a * k } else { -*a * k };
            }
        }
        f
    }
}

/// Solves `max sum(a) - 1/2 a'Qa` s.t. `0 <= a <= C`, `y'a = 0`, where
/// `Q_ij = y_i y_j K(x_i, x_j)`. `y[i] == true` is the +1 class.
pub fn solve_binary<T: Scalar>(
    xs: &[Features<T>],
    y: &[bool],
    params: &SvmParams<T>,
) -> Result<BinarySolution<T>> {
    params.validate()?;
    let n = xs.len();
    if n != y.len() {
        return Err(Error::LengthMismatch {
            left: n,
            right: y.len(),
        });
    }
    if !(y.iter().any(|&v| v) && y.iter().any(|&v| !v)) {
        return Err(Error::DegenerateData("binary problem needs both classes".into()));
    }
    let sign = |i: usize| if y[i] { T::one() } else { -T::one() };

    let mut q = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let v = sign(i) * sign(j) * rbf_kernel(params.gamma, &xs[i], &xs[j]);
            q[i * n + j] = v;
            q[j * n + i] = v;
        }
    }

    let c = params.c;
    let tau = T::lit(1e-12);
    let mut alpha = vec![T::zero(); n];
    // gradient of 1/2 a'Qa - e'a
    let mut grad = vec![-T::one(); n];
    let in_up = |a: T, yi: bool| if yi { a < c } else { a > T::zero() };
    let in_low = |a: T, yi: bool| if yi { a > T::zero() } else { a < c };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        // maximal violating pair
        let mut gmax = T::neg_infinity();
        let mut gmin = T::infinity();
        let (mut i, mut j) = (usize::MAX, usize::MAX);
        for t in 0..n {
            let v = -sign(t) * grad[t];
            if in_up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i = t;
            }
            if in_low(alpha[t], y[t]) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < params.tol {
            converged = true;
            break;
        }
        iterations += 1;

        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let qii = q[i * n + i];
        let qjj = q[j * n + j];
        let qij = q[i * n + j];
        let (mut ai, mut aj) = (old_ai, old_aj);
        if y[i] != y[j] {
            let mut quad = qii + qjj + qij + qij;
            if quad <= T::zero() {
                quad = tau;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > T::zero() {
                if aj < T::zero() {
                    aj = T::zero();
                    ai = diff;
                }
            } else if ai < T::zero() {
                ai = T::zero();
                aj = -diff;
            }
            if diff > T::zero() {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let mut quad = qii + qjj - qij - qij;
            if quad <= T::zero() {
                quad = tau;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < T::zero() {
                aj = T::zero();
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < T::zero() {
                ai = T::zero();
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;

        let (dai, daj) = (ai - old_ai, aj - old_aj);
        for t in 0..n {
            grad[t] += q[t * n + i] * dai + q[t * n + j] * daj;
        }
    }

    let bias = -offset(&alpha, &grad, y, c);
    let objective = -alpha
        .iter()
        .zip(&grad)
        .map(|(&a, &g)| a * (g - T::one()))
        .sum::<T>()
        / T::lit(2.0);
    Ok(BinarySolution {
        alpha,
        bias,
        objective,
        iterations,
        converged,
    })
}

/// The offset `rho` (bias = -rho): mean of `y_i G_i` over free multipliers,
/// or the midpoint of the feasible interval when none are free.
fn offset<T: Scalar>(alpha: &[T], grad: &[T], y: &[bool], c: T) -> T {
    let mut ub = T::infinity();
    let mut lb = T::neg_infinity();
    let mut sum_free = T::zero();
    let mut n_free = 0usize;
    for ((&a, &g), &yi) in alpha.iter().zip(grad).zip(y) {
        let yg = if yi { g } else { -g };
        if a >= c {
            if yi {
                lb = lb.max(yg);
            } else {
                ub = ub.min(yg);
            }
        } else if a <= T::zero() {
            if yi {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / T::from_count(n_free)
    } else {
        (ub + lb) / T::lit(2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportVector<T> {
    /// Original class label of the training row.
    pub label: ClassLabel,
    /// `alpha_i * y_i`.
    pub coef: T,
    /// Normalized feature row.
    pub x: Features<T>,
}

/// Binary sub-model separating `positive` (+1) from `negative` (-1).
#[derive(Debug, Clone, PartialEq)]
pub struct PairModel<T> {
    pub positive: ClassLabel,
    pub negative: ClassLabel,
    pub c: T,
    pub gamma: T,
    pub bias: T,
    pub support: Vec<SupportVector<T>>,
}

impl<T: Scalar> PairModel<T> {
    pub fn decision(&self, x: &Features<T>) -> T {
        self.support
            .iter()
            .fold(self.bias, |f, sv| f + sv.coef * rbf_kernel(self.gamma, &sv.x, x))
    }
}

/// One-vs-one RBF SVM with its input normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel<T> {
    pub classes: Vec<ClassLabel>,
    pub normalization: Normalization<T>,
    pub pairs: Vec<PairModel<T>>,
}

impl<T: Scalar> SvmModel<T> {
    pub fn c(&self) -> T {
        self.pairs[0].c
    }

    pub fn gamma(&self) -> T {
        self.pairs[0].gamma
    }

    pub fn n_support(&self) -> usize {
        self.pairs.iter().map(|p| p.support.len()).sum()
    }

    pub fn predict(&self, x: &FeatureVector) -> ClassLabel {
        self.predict_normalized(&self.normalization.apply(&x.to_array()))
    }

    /// Predicts from raw (unnormalized) feature values.
    pub fn predict_raw(&self, x: &Features<T>) -> Result<ClassLabel> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(self.predict_normalized(&self.normalization.apply(x)))
    }

    /// Majority vote over the pairwise decisions. Ties go to the class with
    /// the larger summed |decision| over its won pairs, then to the smaller
    /// label.
    pub fn predict_normalized(&self, z: &Features<T>) -> ClassLabel {
        let k = self.classes.len();
        let mut votes = vec![0usize; k];
        let mut strength = vec![T::zero(); k];
        let index = |label: ClassLabel| self.classes.iter().position(|&c| c == label).unwrap();
        for p in &self.pairs {
            let f = p.decision(z);
            let winner = if f > T::zero() { p.positive } else { p.negative };
            let w = index(winner);
            votes[w] += 1;
            strength[w] += f.abs();
        }
        let mut best = 0;
        for i in 1..k {
            let better = votes[i] > votes[best]
                || (votes[i] == votes[best] && strength[i] > strength[best]);
            if better {
                best = i;
            }
        }
        self.classes[best]
    }
}

/// Trains a one-vs-one RBF SVM on z-score normalized features.
pub fn train_svm<T: Scalar>(data: &Dataset<T>, params: &SvmParams<T>) -> Result<SvmModel<T>> {
    params.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyInput("training data"));
    }
    if data.rows().iter().any(|s| s.features.iter().any(|v| !v.is_finite())) {
        return Err(Error::NonFinite);
    }
    let classes = data.classes();
    if classes.len() < 2 {
        return Err(Error::DegenerateData(format!(
            "need at least two distinct labels, found {classes:?}"
        )));
    }
    let raw: Vec<Features<T>> = data.rows().iter().map(|s| s.features).collect();
    let normalization = Normalization::fit(&raw);
    let z: Vec<Features<T>> = raw.iter().map(|x| normalization.apply(x)).collect();

    let mut pairs = Vec::new();
    for (a_idx, &pos) in classes.iter().enumerate() {
        for &neg in &classes[a_idx + 1..] {
            let idx: Vec<usize> = (0..data.len())
                .filter(|&i| {
                    let l = data.rows()[i].label;
                    l == pos || l == neg
                })
                .collect();
            let xs: Vec<Features<T>> = idx.iter().map(|&i| z[i]).collect();
            let y: Vec<bool> = idx.iter().map(|&i| data.rows()[i].label == pos).collect();
            let sol = solve_binary(&xs, &y, params)?;
            let support = idx
                .iter()
                .enumerate()
                .filter(|&(k, _)| sol.alpha[k] > T::zero())
                .map(|(k, &i)| SupportVector {
                    label: data.rows()[i].label,
                    coef: if y[k] { sol.alpha[k] } else { -sol.alpha[k] },
                    x: xs[k],
                })
                .collect();
            pairs.push(PairModel {
                positive: pos,
                negative: neg,
                c: params.c,
                gamma: params.gamma,
                bias: sol.bias,
                support,
            });
        }
    }
    Ok(SvmModel {
        classes,
        normalization,
        pairs,
    })
}

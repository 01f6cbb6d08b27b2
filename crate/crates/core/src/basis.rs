//! Total-degree-2 Chebyshev features and weighted ridge regression.
//!
//! Inputs are mapped affinely from the domain box to `z ∈ [-1, 1]ⁿ` (no
//! clipping). The feature vector has the fixed layout
//!
//! ```text
//! [ 1,  T1(z_1) .. T1(z_n),  T2(z_1) .. T2(z_n),  T1(z_j) T1(z_k) for j < k (row-major) ]
//! ```
//!
//! so `p = 1 + n + n(n+1)/2`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::BoxRegion;

pub fn feature_count(n: usize) -> usize {
    1 + n + n * (n + 1) / 2
}

fn scale(x: &DVector<f64>, domain: &BoxRegion) -> (Vec<f64>, Vec<f64>) {
    let mut z = Vec::with_capacity(x.len());
    let mut dz = Vec::with_capacity(x.len());
    for (k, xk) in x.iter().enumerate() {
        let (lo, hi) = (domain.lower[k], domain.upper[k]);
        let s = 2.0 / (hi - lo);
        z.push(s * (xk - lo) - 1.0);
        dz.push(s);
    }
    (z, dz)
}

pub fn features(x: &DVector<f64>, domain: &BoxRegion) -> DVector<f64> {
    let n = x.len();
    let (z, _) = scale(x, domain);
    let mut phi = DVector::zeros(feature_count(n));
    phi[0] = 1.0;
    for k in 0..n {
        phi[1 + k] = z[k];
        phi[1 + n + k] = 2.0 * z[k] * z[k] - 1.0;
    }
    let mut idx = 1 + 2 * n;
    for j in 0..n {
        for k in (j + 1)..n {
            phi[idx] = z[j] * z[k];
            idx += 1;
        }
    }
    phi
}

/// Jacobian `∂Φ/∂x` as a `p × n` matrix.
pub fn feature_grad(x: &DVector<f64>, domain: &BoxRegion) -> DMatrix<f64> {
    let n = x.len();
    let (z, dz) = scale(x, domain);
    let mut jac = DMatrix::zeros(feature_count(n), n);
    for k in 0..n {
        jac[(1 + k, k)] = dz[k];
        jac[(1 + n + k, k)] = 4.0 * z[k] * dz[k];
    }
    let mut idx = 1 + 2 * n;
    for j in 0..n {
        for k in (j + 1)..n {
            jac[(idx, j)] = z[k] * dz[j];
            jac[(idx, k)] = z[j] * dz[k];
            idx += 1;
        }
    }
    jac
}

fn check_alpha(alpha: &DVector<f64>, n: usize) -> Result<()> {
    let p = feature_count(n);
    if alpha.len() != p {
        return Err(Error::DimensionMismatch {
            context: "value coefficients",
            expected: p,
            actual: alpha.len(),
        });
    }
    Ok(())
}

pub fn value_eval(x: &DVector<f64>, alpha: &DVector<f64>, domain: &BoxRegion) -> Result<f64> {
    check_alpha(alpha, x.len())?;
    Ok(features(x, domain).dot(alpha))
}

pub fn value_grad(
    x: &DVector<f64>,
    alpha: &DVector<f64>,
    domain: &BoxRegion,
) -> Result<DVector<f64>> {
    check_alpha(alpha, x.len())?;
    Ok(feature_grad(x, domain).tr_mul(alpha))
}

/// Per-timestep coefficient vectors `α_0 … α_N` over a shared scaling box.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueCoefficients {
    state_dim: usize,
    domain: BoxRegion,
    alphas: Vec<DVector<f64>>,
}

impl ValueCoefficients {
    pub fn new(state_dim: usize, domain: BoxRegion, alphas: Vec<DVector<f64>>) -> Result<Self> {
        if domain.dim() != state_dim {
            return Err(Error::DimensionMismatch {
                context: "coefficient domain",
                expected: state_dim,
                actual: domain.dim(),
            });
        }
        for alpha in &alphas {
            check_alpha(alpha, state_dim)?;
            if alpha.iter().any(|a| !a.is_finite()) {
                return Err(Error::InvalidRegression("non-finite coefficient".into()));
            }
        }
        Ok(ValueCoefficients {
            state_dim,
            domain,
            alphas,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn domain(&self) -> &BoxRegion {
        &self.domain
    }

    /// Number of time steps `N`; coefficients exist for indices `0..=N`.
    pub fn steps(&self) -> usize {
        self.alphas.len().saturating_sub(1)
    }

    pub fn alphas(&self) -> &[DVector<f64>] {
        &self.alphas
    }

    pub fn alpha(&self, i: usize) -> Result<&DVector<f64>> {
        self.alphas.get(i).ok_or(Error::MissingCoefficients(i))
    }

    pub fn value(&self, i: usize, x: &DVector<f64>) -> Result<f64> {
        value_eval(x, self.alpha(i)?, &self.domain)
    }

    pub fn gradient(&self, i: usize, x: &DVector<f64>) -> Result<DVector<f64>> {
        value_grad(x, self.alpha(i)?, &self.domain)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ValueCoefficients {
            alphas: self.alphas.iter().map(|a| a * factor).collect(),
            ..self.clone()
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CoefficientsRecord {
    n: usize,
    p: usize,
    steps: usize,
    box_lower: Vec<f64>,
    box_upper: Vec<f64>,
    alpha: Vec<f64>,
}

impl Serialize for ValueCoefficients {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoefficientsRecord {
            n: self.state_dim,
            p: feature_count(self.state_dim),
            steps: self.steps(),
            box_lower: self.domain.lower.clone(),
            box_upper: self.domain.upper.clone(),
            alpha: self.alphas.iter().flat_map(|a| a.iter().copied()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ValueCoefficients {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rec = CoefficientsRecord::deserialize(d)?;
        if rec.p != feature_count(rec.n) || rec.alpha.len() != rec.p * (rec.steps + 1) {
            return Err(D::Error::custom(
                "coefficient header does not match payload",
            ));
        }
        let domain = BoxRegion::new(rec.box_lower, rec.box_upper).map_err(D::Error::custom)?;
        let alphas = rec
            .alpha
            .chunks(rec.p)
            .map(DVector::from_column_slice)
            .collect();
        ValueCoefficients::new(rec.n, domain, alphas).map_err(D::Error::custom)
    }
}

/// Rows, targets, weights and ridge strength for one weighted fit.
#[derive(Debug, Clone)]
pub struct WeightedRegressionInput {
    pub features: DMatrix<f64>,
    pub targets: DVector<f64>,
    pub weights: DVector<f64>,
    pub ridge: f64,
}

const RANK_TOLERANCE: f64 = 1e-12;

/// Minimizes `Σ_j w_j (y_j − Φ_j α)² + ridge |α|²`.
///
/// Solved by Householder QR of the stacked system `[√W Φ; √ridge I] α ≈ [√W y; 0]`,
/// which avoids squaring the condition number of the normal equations.
pub fn weighted_least_squares(input: &WeightedRegressionInput) -> Result<DVector<f64>> {
    let rows = input.features.nrows();
    let p = input.features.ncols();
    if input.targets.len() != rows || input.weights.len() != rows {
        return Err(Error::InvalidRegression(format!(
            "{} feature rows, {} targets, {} weights",
            rows,
            input.targets.len(),
            input.weights.len()
        )));
    }
    if !(input.ridge.is_finite() && input.ridge >= 0.0) {
        return Err(Error::InvalidRegression(format!(
            "ridge {} must be >= 0",
            input.ridge
        )));
    }
    if input.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidRegression(
            "weights must be finite and >= 0".into(),
        ));
    }
    if !input.weights.iter().any(|w| *w > 0.0) {
        return Err(Error::InvalidRegression("all weights are zero".into()));
    }
    if input.targets.iter().any(|y| !y.is_finite()) {
        return Err(Error::InvalidRegression("non-finite target".into()));
    }

    let active: Vec<usize> = (0..rows).filter(|&j| input.weights[j] > 0.0).collect();
    let ridge_rows = if input.ridge > 0.0 { p } else { 0 };
    let total = active.len() + ridge_rows;
    if total < p {
        return Err(Error::SingularRegression {
            rank: total,
            columns: p,
        });
    }
    let mut a = DMatrix::zeros(total, p);
    let mut b = DVector::zeros(total);
    for (r, &j) in active.iter().enumerate() {
        let sw = input.weights[j].sqrt();
        for c in 0..p {
            a[(r, c)] = sw * input.features[(j, c)];
        }
        b[r] = sw * input.targets[j];
    }
    let sr = input.ridge.sqrt();
    for c in 0..ridge_rows {
        a[(active.len() + c, c)] = sr;
    }

    let qr = a.qr();
    let r = qr.r();
    let diag_max = (0..p).map(|k| r[(k, k)].abs()).fold(0.0, f64::max);
    let rank = (0..p)
        .filter(|&k| r[(k, k)].abs() > RANK_TOLERANCE * diag_max)
        .count();
    if diag_max == 0.0 || rank < p {
        return Err(Error::SingularRegression { rank, columns: p });
    }
    let mut rhs = b;
    qr.q_tr_mul(&mut rhs);
    let rhs = rhs.rows(0, p).into_owned();
    r.solve_upper_triangular(&rhs)
        .ok_or(Error::SingularRegression { rank, columns: p })
}

/// `q(x) = xᵀHx + bᵀx + c` with symmetric `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub h: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: f64,
}

impl QuadraticForm {
    pub fn new(h: DMatrix<f64>, b: DVector<f64>, c: f64) -> Self {
        let h = (&h + h.transpose()) * 0.5;
        QuadraticForm { h, b, c }
    }

    pub fn pure(h: DMatrix<f64>, c: f64) -> Self {
        let n = h.nrows();
        QuadraticForm::new(h, DVector::zeros(n), c)
    }

    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.h * x)) + self.b.dot(x) + self.c
    }

    /// Exact coefficients of this quadratic in the Chebyshev basis over `domain`.
    pub fn to_coefficients(&self, domain: &BoxRegion) -> DVector<f64> {
        let n = self.b.len();
        let half: Vec<f64> = (0..n)
            .map(|k| 0.5 * (domain.upper[k] - domain.lower[k]))
            .collect();
        let mid =
            DVector::from_iterator(n, (0..n).map(|k| 0.5 * (domain.upper[k] + domain.lower[k])));
        // x = A z + mid with A = diag(half)
        let g = DMatrix::from_fn(n, n, |j, k| half[j] * self.h[(j, k)] * half[k]);
        let h_mid = &self.h * &mid;
        let lin = DVector::from_iterator(n, (0..n).map(|k| half[k] * (2.0 * h_mid[k] + self.b[k])));
        let constant = mid.dot(&h_mid) + self.b.dot(&mid) + self.c;

        let mut alpha = DVector::zeros(feature_count(n));
        alpha[0] = constant + (0..n).map(|k| 0.5 * g[(k, k)]).sum::<f64>();
        let mut idx = 1 + 2 * n;
        for j in 0..n {
            alpha[1 + j] = lin[j];
            alpha[1 + n + j] = 0.5 * g[(j, j)];
            for k in (j + 1)..n {
                alpha[idx] = 2.0 * g[(j, k)];
                idx += 1;
            }
        }
        alpha
    }

    /// Inverse of [`QuadraticForm::to_coefficients`].
    pub fn from_coefficients(alpha: &DVector<f64>, domain: &BoxRegion) -> Result<Self> {
        let n = domain.dim();
        check_alpha(alpha, n)?;
        let half: Vec<f64> = (0..n)
            .map(|k| 0.5 * (domain.upper[k] - domain.lower[k]))
            .collect();
        let mid =
            DVector::from_iterator(n, (0..n).map(|k| 0.5 * (domain.upper[k] + domain.lower[k])));
        let mut g = DMatrix::zeros(n, n);
        let mut idx = 1 + 2 * n;
        for j in 0..n {
            g[(j, j)] = 2.0 * alpha[1 + n + j];
            for k in (j + 1)..n {
                g[(j, k)] = 0.5 * alpha[idx];
                g[(k, j)] = 0.5 * alpha[idx];
                idx += 1;
            }
        }
        let constant = alpha[0] - (0..n).map(|k| alpha[1 + n + k]).sum::<f64>();
        let h = DMatrix::from_fn(n, n, |j, k| g[(j, k)] / (half[j] * half[k]));
        let h_mid = &h * &mid;
        let b = DVector::from_iterator(n, (0..n).map(|k| alpha[1 + k] / half[k] - 2.0 * h_mid[k]));
        let c = constant - mid.dot(&h_mid) - b.dot(&mid);
        Ok(QuadraticForm { h, b, c })
    }
}

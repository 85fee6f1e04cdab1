use super::{check_finite, AdaptiveFilter, FilterConfig, FilterError, StepResult};

/// Above this magnitude a zero regressor no longer inflates `P` by `1/λ`.
const P_INFLATION_CAP: f64 = 1e150;

/// Exponentially weighted least squares on an explicit regressor, with the
/// inverse correlation matrix `P` stored densely (row-major, exactly symmetric).
#[derive(Debug, Clone)]
pub(crate) struct DenseLs {
    pub(crate) w: Vec<f64>,
    pub(crate) p: Vec<f64>,
    lambda: f64,
    u: Vec<f64>,
}

impl DenseLs {
    pub(crate) fn new(n: usize, lambda: f64, delta: f64) -> Self {
        Self::with_weights(vec![0.0; n], lambda, delta)
    }

    pub(crate) fn with_weights(w: Vec<f64>, lambda: f64, delta: f64) -> Self {
        let n = w.len();
        let mut p = vec![0.0; n * n];
        for i in 0..n {
            p[i * n + i] = 1.0 / delta;
        }
        Self { w, p, lambda, u: vec![0.0; n] }
    }

    /// One update on regressor `h`; returns the a priori output.
    pub(crate) fn update(&mut self, h: &[f64], d: f64) -> f64 {
        let n = self.w.len();
        let p = &mut self.p;
        for i in 0..n {
            self.u[i] = p[i * n..(i + 1) * n].iter().zip(h).map(|(a, b)| a * b).sum();
        }
        let y: f64 = self.w.iter().zip(h).map(|(a, b)| a * b).sum();
        let e = d - y;
        let denom = self.lambda + h.iter().zip(&self.u).map(|(a, b)| a * b).sum::<f64>();
        let regressor_is_zero = self.u.iter().all(|v| *v == 0.0);
        if regressor_is_zero {
            if p.iter().all(|v| v.abs() < P_INFLATION_CAP) {
                p.iter_mut().for_each(|v| *v /= self.lambda);
            }
            return y;
        }
        // k = u / denom; P ← (P − k uᵀ) / λ, using uᵀ = xᵀP for symmetric P
        for i in 0..n {
            let ki = self.u[i] / denom;
            self.w[i] += ki * e;
            for j in 0..n {
                p[i * n + j] = (p[i * n + j] - ki * self.u[j]) / self.lambda;
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (p[i * n + j] + p[j * n + i]);
                p[i * n + j] = avg;
                p[j * n + i] = avg;
            }
        }
        y
    }
}

/// Conventional RLS with `w(0) = 0`, `P(0) = δ⁻¹ I` and zero prehistory.
#[derive(Debug, Clone)]
pub struct Rls {
    core: DenseLs,
    x_hist: Vec<f64>,
}

impl Rls {
    pub fn new(cfg: &FilterConfig) -> Result<Self, FilterError> {
        cfg.validate()?;
        Ok(Self { core: DenseLs::new(cfg.order, cfg.forgetting_factor, cfg.init_delta), x_hist: vec![0.0; cfg.order] })
    }

    pub fn weights(&self) -> &[f64] {
        &self.core.w
    }

    /// Inverse correlation matrix, row-major `N × N`.
    pub fn inverse_correlation(&self) -> &[f64] {
        &self.core.p
    }

    /// Regressor, newest sample first.
    pub fn history(&self) -> &[f64] {
        &self.x_hist
    }
}

impl AdaptiveFilter for Rls {
    fn step(&mut self, x: f64, d: f64) -> Result<StepResult, FilterError> {
        check_finite(x, d)?;
        self.x_hist.rotate_right(1);
        self.x_hist[0] = x;
        let y = self.core.update(&self.x_hist, d);
        Ok(StepResult { y, e: d - y })
    }

    fn order(&self) -> usize {
        self.x_hist.len()
    }
}

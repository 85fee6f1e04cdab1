use super::rls::DenseLs;
use super::{check_finite, AdaptiveFilter, FilterConfig, FilterError, StepResult};

/// Error-feedback gains applied to the difference between the filtered and
/// the gain-derived backward a priori error: `g` update, `ζ^b` update, `γ` update.
const FEEDBACK_G: f64 = 1.5;
const FEEDBACK_ZETA_B: f64 = 2.5;
const FEEDBACK_GAMMA: f64 = 1.0;

/// Rounding slack above 1 tolerated for the conversion factor.
const GAMMA_SLACK: f64 = 1e-12;

/// Least-squares sums never decay below this on an all-zero regressor.
const ZETA_FLOOR: f64 = 1e-200;

/// Stabilized fast transversal RLS.
///
/// Four transversal filters (forward predictor `a`, backward predictor `g`,
/// normalized gain `k̃` and joint-process weights `w`) give the RLS a priori
/// errors in O(N) per sample. The predictor sums start at `ζ^f = δ` and
/// `ζ^b = δ λ^{-N}`, which matches `P(0) = δ⁻¹ I` up to a λ-graded diagonal.
/// For the first `max(8(N+1), 64)` samples the weights are adapted by dense
/// RLS from exactly `P(0) = δ⁻¹ I`, after which the fast recursion takes over;
/// by then the initial regularizer has decayed and both agree.
///
/// If the conversion factor leaves `(0, 1]` or a least-squares sum becomes
/// non-positive, the predictors restart (weights kept), the startup window is
/// re-entered and [`Ftf::rescue_count`] increments.
#[derive(Debug, Clone)]
pub struct Ftf {
    n: usize,
    lambda: f64,
    delta: f64,
    a_fwd: Vec<f64>,
    g_bwd: Vec<f64>,
    k_norm: Vec<f64>,
    /// Extended gain scratch, length N+1.
    k_ext: Vec<f64>,
    /// Inverse conversion factor 1/γ.
    gamma_inv: f64,
    zeta_f: f64,
    zeta_b: f64,
    w: Vec<f64>,
    /// Newest sample first, length N+1.
    x_hist: Vec<f64>,
    startup: Option<DenseLs>,
    startup_left: usize,
    rescue_count: u64,
}

impl Ftf {
    pub fn new(cfg: &FilterConfig) -> Result<Self, FilterError> {
        cfg.validate()?;
        let n = cfg.order;
        let mut f = Self {
            n,
            lambda: cfg.forgetting_factor,
            delta: cfg.init_delta,
            a_fwd: vec![0.0; n + 1],
            g_bwd: vec![0.0; n + 1],
            k_norm: vec![0.0; n],
            k_ext: vec![0.0; n + 1],
            gamma_inv: 1.0,
            zeta_f: 0.0,
            zeta_b: 0.0,
            w: vec![0.0; n],
            x_hist: vec![0.0; n + 1],
            startup: None,
            startup_left: 0,
            rescue_count: 0,
        };
        f.restart_predictors();
        Ok(f)
    }

    fn startup_len(&self) -> usize {
        (8 * (self.n + 1)).max(64)
    }

    fn restart_predictors(&mut self) {
        let n = self.n;
        self.a_fwd.iter_mut().for_each(|v| *v = 0.0);
        self.a_fwd[0] = 1.0;
        self.g_bwd.iter_mut().for_each(|v| *v = 0.0);
        self.g_bwd[n] = 1.0;
        self.k_norm.iter_mut().for_each(|v| *v = 0.0);
        self.gamma_inv = 1.0;
        self.zeta_f = self.delta;
        self.zeta_b = self.delta * self.lambda.powi(-(n as i32));
        self.startup = Some(DenseLs::with_weights(self.w.clone(), self.lambda, self.delta));
        self.startup_left = self.startup_len();
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Conversion factor γ, in `(0, 1]` between steps.
    pub fn gamma(&self) -> f64 {
        1.0 / self.gamma_inv
    }

    pub fn zeta_f(&self) -> f64 {
        self.zeta_f
    }

    pub fn zeta_b(&self) -> f64 {
        self.zeta_b
    }

    pub fn rescue_count(&self) -> u64 {
        self.rescue_count
    }

    /// True while the weights are still adapted by the dense start-up solver.
    pub fn in_startup(&self) -> bool {
        self.startup.is_some()
    }

    /// Advances the predictors; returns γ(n). Leaves `k_norm` holding k̃(n).
    fn predict(&mut self) -> f64 {
        let n = self.n;
        let lambda = self.lambda;
        let h = &self.x_hist;
        let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(p, q)| p * q).sum() };

        let f_pri = dot(&self.a_fwd, h);
        let f_post = f_pri / self.gamma_inv;
        let gain = f_pri / (lambda * self.zeta_f);
        let gamma_inv_ext = self.gamma_inv + f_pri * gain;

        // extended gain [0; k̃] + f/(λζ^f)·a, with the old forward predictor
        self.k_ext[0] = 0.0;
        self.k_ext[1..].copy_from_slice(&self.k_norm);
        for (k, a) in self.k_ext.iter_mut().zip(&self.a_fwd) {
            *k += gain * a;
        }
        for (a, k) in self.a_fwd[1..].iter_mut().zip(&self.k_norm) {
            *a -= f_post * k;
        }
        self.zeta_f = lambda * self.zeta_f + f_pri * f_post;

        let k_last = self.k_ext[n];
        let b_from_gain = lambda * self.zeta_b * k_last;
        let b_filtered = dot(&self.g_bwd, h);
        let mismatch = b_filtered - b_from_gain;
        let b_g = b_from_gain + FEEDBACK_G * mismatch;
        let b_zeta = b_from_gain + FEEDBACK_ZETA_B * mismatch;
        let b_gamma = b_from_gain + FEEDBACK_GAMMA * mismatch;

        for i in 0..n {
            self.k_norm[i] = self.k_ext[i] - k_last * self.g_bwd[i];
        }
        self.gamma_inv = gamma_inv_ext - k_last * b_gamma;
        let gamma = 1.0 / self.gamma_inv;
        for (g, k) in self.g_bwd[..n].iter_mut().zip(&self.k_norm) {
            *g -= gamma * b_g * k;
        }
        self.zeta_b = lambda * self.zeta_b + gamma * b_zeta * b_zeta;

        if self.x_hist.iter().all(|v| *v == 0.0) {
            self.zeta_f = self.zeta_f.max(ZETA_FLOOR);
            self.zeta_b = self.zeta_b.max(ZETA_FLOOR);
        }
        gamma
    }
}

impl AdaptiveFilter for Ftf {
    fn step(&mut self, x: f64, d: f64) -> Result<StepResult, FilterError> {
        check_finite(x, d)?;
        self.x_hist.rotate_right(1);
        self.x_hist[0] = x;

        let gamma = self.predict();
        let x_n = &self.x_hist[..self.n];
        let y: f64 = self.w.iter().zip(x_n).map(|(a, b)| a * b).sum();
        let e = d - y;

        let healthy = gamma > 0.0
            && gamma <= 1.0 + GAMMA_SLACK
            && self.zeta_f > 0.0
            && self.zeta_b > 0.0
            && self.k_norm.iter().all(|v| v.is_finite());
        if !healthy {
            self.rescue_count += 1;
            self.restart_predictors();
            return Ok(StepResult { y, e });
        }
        if gamma > 1.0 {
            self.gamma_inv = 1.0;
        }
        let gamma = gamma.min(1.0);

        match self.startup.as_mut() {
            Some(ls) => {
                ls.update(x_n, d);
                self.w.copy_from_slice(&ls.w);
                self.startup_left -= 1;
                if self.startup_left == 0 {
                    self.startup = None;
                }
            }
            None => {
                let e_post = gamma * e;
                for (w, k) in self.w.iter_mut().zip(&self.k_norm) {
                    *w += k * e_post;
                }
            }
        }
        Ok(StepResult { y, e })
    }

    fn order(&self) -> usize {
        self.n
    }
}

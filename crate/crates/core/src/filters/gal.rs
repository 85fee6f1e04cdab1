use super::{check_finite, AdaptiveFilter, FilterConfig, FilterError, StepResult};

/// Gradient adaptive lattice: an `M = order - 1` stage lattice predictor that
/// orthogonalizes the reference into backward errors `b_0..b_M`, followed by an
/// `order`-tap normalized ladder regressing `d` on them.
///
/// Stage `m` adapts its reflection coefficient by a gradient step normalized by
/// the accumulated stage energy `ε(n) = max(β ε(n-1) + f² + b², a)`, which
/// includes the current sample. Every ladder tap is normalized by the total
/// backward-error energy `‖b(n)‖²`, and tap `m` adapts on the error left after
/// taps `0..=m`.
#[derive(Debug, Clone)]
pub struct Gal {
    mu_refl: f64,
    mu_ladder: f64,
    beta: f64,
    floor: f64,
    /// k_1..k_M, each in [-1, 1].
    refl: Vec<f64>,
    /// h_0..h_M.
    ladder: Vec<f64>,
    /// ε_0..ε_{M-1}, each ≥ floor.
    power: Vec<f64>,
    /// b_0(n-1)..b_M(n-1).
    b_prev: Vec<f64>,
    /// Partial sums Σ_{i≤m} b_i(n)².
    b_norm: Vec<f64>,
    f: Vec<f64>,
    b: Vec<f64>,
}

impl Gal {
    pub fn new(cfg: &FilterConfig) -> Result<Self, FilterError> {
        cfg.validate()?;
        let taps = cfg.order;
        let stages = taps - 1;
        Ok(Self {
            mu_refl: cfg.step_size,
            mu_ladder: cfg.ladder_step,
            beta: cfg.smoothing,
            floor: cfg.floor,
            refl: vec![0.0; stages],
            ladder: vec![0.0; taps],
            power: vec![cfg.floor; stages],
            b_prev: vec![0.0; taps],
            b_norm: vec![cfg.floor; taps],
            f: vec![0.0; taps],
            b: vec![0.0; taps],
        })
    }

    pub fn stages(&self) -> usize {
        self.refl.len()
    }

    pub fn reflection(&self) -> &[f64] {
        &self.refl
    }

    pub fn ladder(&self) -> &[f64] {
        &self.ladder
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    /// Backward prediction errors of the most recent step, `b_0..b_M`.
    pub fn backward_errors(&self) -> &[f64] {
        &self.b_prev
    }
}

impl AdaptiveFilter for Gal {
    fn step(&mut self, x: f64, d: f64) -> Result<StepResult, FilterError> {
        check_finite(x, d)?;
        self.f[0] = x;
        self.b[0] = x;
        for m in 1..self.b.len() {
            let f_in = self.f[m - 1];
            let b_in = self.b_prev[m - 1];
            let energy_in = f_in * f_in + b_in * b_in;
            let norm = (self.beta * self.power[m - 1] + energy_in).max(self.floor);
            self.power[m - 1] = norm;

            let k = self.refl[m - 1];
            self.f[m] = f_in + k * b_in;
            self.b[m] = b_in + k * f_in;
            let grad = f_in * self.b[m] + b_in * self.f[m];
            self.refl[m - 1] = (k - self.mu_refl / norm * grad).clamp(-1.0, 1.0);
        }

        let mut acc = 0.0;
        for (norm, b) in self.b_norm.iter_mut().zip(&self.b) {
            acc += b * b;
            *norm = acc;
        }
        let step = self.mu_ladder / acc.max(self.floor);
        let mut y = 0.0;
        for (h, b) in self.ladder.iter_mut().zip(&self.b) {
            y += *h * b;
            *h += step * b * (d - y);
        }
        self.b_prev.copy_from_slice(&self.b);
        Ok(StepResult { y, e: d - y })
    }

    fn order(&self) -> usize {
        self.ladder.len()
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs of the rate bounds for one problem and sampling size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBundle {
    /// Number of blocks `N`.
    pub num_blocks: usize,
    pub tau: usize,
    /// Bound on the W-distance from the initial sublevel set to the optimal
    /// set.
    pub r_w: f64,
    /// Initial gap `F(x0) - F*`.
    pub delta0: f64,
    /// Strong convexity modulus with respect to `|.|_W`.
    #[serde(default)]
    pub sigma_w: Option<f64>,
    #[serde(default)]
    pub kappa1: Option<f64>,
    #[serde(default)]
    pub kappa2: Option<f64>,
}

/// Constant chain of the error-bound linear rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GebpConstants {
    pub c_kappa: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub theta: f64,
}

fn check_eps_rho(eps: f64, rho: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::input(format!("epsilon must be positive, got {eps}")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::input(format!("rho must lie in (0, 1), got {rho}")));
    }
    Ok(())
}

fn ceil_iters(v: f64) -> u64 {
    if v <= 0.0 {
        0
    } else {
        v.ceil() as u64
    }
}

impl RateBundle {
    pub fn new(num_blocks: usize, tau: usize, r_w: f64, delta0: f64) -> Self {
        Self {
            num_blocks,
            tau,
            r_w,
            delta0,
            sigma_w: None,
            kappa1: None,
            kappa2: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_blocks == 0 || self.tau == 0 || self.tau > self.num_blocks {
            return Err(Error::input(format!(
                "need 1 <= tau <= N, got tau = {}, N = {}",
                self.tau, self.num_blocks
            )));
        }
        if !(self.r_w >= 0.0) || !self.r_w.is_finite() {
            return Err(Error::input(format!("R_W must be finite and >= 0, got {}", self.r_w)));
        }
        if !(self.delta0 >= 0.0) || !self.delta0.is_finite() {
            return Err(Error::input(format!(
                "initial gap must be finite and >= 0, got {}",
                self.delta0
            )));
        }
        Ok(())
    }

    fn n(&self) -> f64 {
        self.num_blocks as f64
    }

    fn t(&self) -> f64 {
        self.tau as f64
    }

    /// `N (R^2 / 2 + delta0) / (tau k + N)`.
    pub fn sublinear_bound(&self, k: f64) -> f64 {
        self.n() * (0.5 * self.r_w * self.r_w + self.delta0) / (self.t() * k + self.n())
    }

    /// `c = (2N / tau) max(R^2, delta0)`.
    pub fn sublinear_c(&self) -> f64 {
        2.0 * self.n() / self.t() * (self.r_w * self.r_w).max(self.delta0)
    }

    /// Right-hand side of the high-probability iteration count,
    /// `(c / eps)(1 + log((N / tau)(R^2 + 2 delta0) / (4 c rho))) + 2 - N`.
    pub fn sublinear_confidence_rhs(&self, eps: f64, rho: f64) -> Result<f64> {
        self.validate()?;
        check_eps_rho(eps, rho)?;
        let c = self.sublinear_c();
        if !(c > 0.0) {
            return Err(Error::input("R_W and the initial gap are both zero"));
        }
        let inner =
            self.n() / self.t() * (self.r_w * self.r_w + 2.0 * self.delta0) / (4.0 * c * rho);
        Ok(c / eps * (1.0 + inner.ln()) + 2.0 - self.n())
    }

    /// Smallest integer `k >= 0` meeting the sublinear high-probability bound.
    /// Requires `eps < delta0`.
    pub fn sublinear_confidence_iters(&self, eps: f64, rho: f64) -> Result<u64> {
        let rhs = self.sublinear_confidence_rhs(eps, rho)?;
        if eps >= self.delta0 {
            return Err(Error::input(format!(
                "epsilon ({eps}) must be below the initial gap ({})",
                self.delta0
            )));
        }
        Ok(ceil_iters(rhs))
    }

    /// Per-iteration contraction `1 - tau sigma_W / N` of the expected gap.
    pub fn strongly_convex_factor(&self) -> Result<f64> {
        self.validate()?;
        let s = self
            .sigma_w
            .ok_or_else(|| Error::input("sigma_W is required for the strongly convex rate"))?;
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::input(format!("sigma_W must lie in (0, 1], got {s}")));
        }
        Ok(1.0 - self.t() * s / self.n())
    }

    pub fn gebp_constants(&self) -> Result<GebpConstants> {
        self.validate()?;
        let k1 = self.kappa1.unwrap_or(0.0);
        let k2 = self.kappa2.unwrap_or(0.0);
        if !(k1 >= 0.0) || !(k2 >= 0.0) || !k1.is_finite() || !k2.is_finite() {
            return Err(Error::input(format!("kappa constants must be >= 0, got ({k1}, {k2})")));
        }
        if k1 == 0.0 && k2 == 0.0 {
            return Err(Error::input("at least one kappa constant must be positive"));
        }
        let ratio = self.t() / self.n();
        let c_kappa = (k1 + k2 * self.r_w * self.r_w) * (1.0 / ratio).sqrt();
        let c1 = 1.0 + c_kappa;
        let c2 = c1 + 0.5 * (1.0 - ratio) * c_kappa * c_kappa + c_kappa * ratio.sqrt();
        let c3 = (2.0 * c2 + (1.0 - ratio)) / ratio;
        Ok(GebpConstants {
            c_kappa,
            c1,
            c2,
            c3,
            theta: c3 / (1.0 + c3),
        })
    }

    pub fn gebp_linear_theta(&self) -> Result<f64> {
        Ok(self.gebp_constants()?.theta)
    }

    /// `log(delta0 / (eps rho)) / (1 - theta)`.
    pub fn gebp_confidence_rhs(&self, eps: f64, rho: f64) -> Result<f64> {
        check_eps_rho(eps, rho)?;
        // 1 / (1 - theta) = 1 + c3, without the cancellation in 1 - theta
        let c3 = self.gebp_constants()?.c3;
        Ok((self.delta0 / (eps * rho)).ln() * (1.0 + c3))
    }

    /// Iterations ensuring `F - F* <= eps` with probability `1 - rho` under
    /// the error bound. Requires `eps < delta0`.
    pub fn gebp_confidence_iters(&self, eps: f64, rho: f64) -> Result<u64> {
        let rhs = self.gebp_confidence_rhs(eps, rho)?;
        if eps >= self.delta0 {
            return Err(Error::input(format!(
                "epsilon ({eps}) must be below the initial gap ({})",
                self.delta0
            )));
        }
        Ok(ceil_iters(rhs))
    }
}

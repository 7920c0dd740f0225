//! Stochastic block model generation and the community-advantage condition.
//!
//! A directed SBM with `K` equal-size communities links an ordered pair of
//! distinct nodes with probability `p` inside a community and `q` across
//! communities. Two conditional probabilities summarize how informative
//! community membership is about links:
//!
//! - `theta_linked`  = P(same community | edge present)  = p / (p + (K−1)q)
//! - `theta_unlinked` = P(same community | edge absent)  = (1−p) / (K − [p + (K−1)q])
//!
//! The advantage condition compares a hybrid predictor (weighted vote of a
//! community-based scorer and a community-agnostic scorer) against the
//! community-agnostic scorer alone. Its left side is
//!
//! ```text
//! g(p,q,K) = (p − q)·(theta_linked + theta_unlinked) + 1 − ε₀ − ε₁
//! ```
//!
//! and the hybrid wins when `g ≥ ((1 − W_c̄)/W_c)·(E_C̄_U + E_C̄_L)`. With the
//! normalized weight convention `W_c̄ + W_c = 1`, the right side is simply the
//! sum of the community-agnostic per-class accuracies. `monte_carlo_theorem`
//! simulates the two predictors on class-balanced pair samples and checks the
//! empirical accuracies against the closed forms.

use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::graph::DirectedGraph;
use crate::{rng, Error, Result};

/// Parameters of a directed stochastic block model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    /// Number of communities (≥ 2).
    pub k: usize,
    /// Nodes per community (all communities the same size).
    pub community_size: usize,
    /// Intra-community edge probability.
    pub p: f64,
    /// Inter-community edge probability.
    pub q: f64,
}

impl SbmSpec {
    pub fn new(k: usize, community_size: usize, p: f64, q: f64) -> Self {
        Self {
            k,
            community_size,
            p,
            q,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.k * self.community_size
    }

    /// Validates parameter ranges. The probability boundaries 0 and 1 are
    /// admitted (they are useful in tests), though the theta denominators may
    /// then degenerate, which those operations report separately.
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::invalid(format!("K must be ≥ 2, got {}", self.k)));
        }
        if self.community_size == 0 {
            return Err(Error::invalid("community_size must be ≥ 1"));
        }
        for (name, value) in [("p", self.p), ("q", self.q)] {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {value}")));
            }
        }
        Ok(())
    }
}

/// Error rates and vote weights of the two predictors being compared.
///
/// `e_unlinked` / `e_linked` are the community-agnostic scorer's per-class
/// accuracies (probability of a correct call on unlinked / linked pairs).
/// `eps0` / `eps1` are the community detector's error rates on unlinked /
/// linked pairs. Weights follow the normalized convention `w_nc + w_c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictorModel {
    pub e_unlinked: f64,
    pub e_linked: f64,
    pub eps0: f64,
    pub eps1: f64,
    pub w_nc: f64,
    pub w_c: f64,
}

impl PredictorModel {
    /// Equal-weight model with symmetric accuracy `e` and no detection error.
    pub fn balanced(e: f64) -> Self {
        Self {
            e_unlinked: e,
            e_linked: e,
            eps0: 0.0,
            eps1: 0.0,
            w_nc: 0.5,
            w_c: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("e_unlinked", self.e_unlinked),
            ("e_linked", self.e_linked),
            ("eps0", self.eps0),
            ("eps1", self.eps1),
        ] {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {value}")));
            }
        }
        if self.w_nc < 0.0 || self.w_c < 0.0 {
            return Err(Error::invalid("weights must be non-negative"));
        }
        if (self.w_nc + self.w_c - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "weights must satisfy w_nc + w_c = 1, got {} + {}",
                self.w_nc, self.w_c
            )));
        }
        Ok(())
    }
}

/// Closed-form and simulated quantities for the advantage condition.
///
/// `g_condition` fills only the closed-form fields and leaves the Monte Carlo
/// fields at zero with `mc_trials = 0`; `monte_carlo_theorem` fills
/// everything.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theta_l: f64,
    pub theta_u: f64,
    pub g_value: f64,
    pub condition_holds: bool,
    pub mc_acc_hybrid: f64,
    pub mc_acc_noncommunity: f64,
    pub mc_trials: u64,
}

/// Samples a directed SBM graph; returns it with the planted community of
/// each node (node `i` belongs to community `i / community_size`).
pub fn generate_sbm(spec: &SbmSpec, seed: u64) -> Result<(DirectedGraph, Vec<usize>)> {
    spec.validate()?;
    let n = spec.num_nodes();
    let communities: Vec<usize> = (0..n).map(|i| i / spec.community_size).collect();
    let mut rng = rng::stream(seed, "sbm");
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let prob = if communities[u] == communities[v] {
                spec.p
            } else {
                spec.q
            };
            if rng.gen::<f64>() < prob {
                edges.push((u, v));
            }
        }
    }
    Ok((DirectedGraph::from_edges(n, edges)?, communities))
}

/// P(same community | pair is linked).
pub fn theta_linked(spec: &SbmSpec) -> Result<f64> {
    spec.validate()?;
    let denom = spec.p + (spec.k - 1) as f64 * spec.q;
    if denom <= 0.0 {
        return Err(Error::invalid("theta_linked undefined: p + (K−1)q = 0"));
    }
    Ok(spec.p / denom)
}

/// P(same community | pair is unlinked).
pub fn theta_unlinked(spec: &SbmSpec) -> Result<f64> {
    spec.validate()?;
    let denom = spec.k as f64 - (spec.p + (spec.k - 1) as f64 * spec.q);
    if denom <= 0.0 {
        return Err(Error::invalid(
            "theta_unlinked undefined: K − [p + (K−1)q] = 0",
        ));
    }
    Ok((1.0 - spec.p) / denom)
}

/// The detector-error-free part of the condition's left side:
/// `(p − q)·(theta_linked + theta_unlinked) + 1`.
pub fn g_value(spec: &SbmSpec) -> Result<f64> {
    Ok((spec.p - spec.q) * (theta_linked(spec)? + theta_unlinked(spec)?) + 1.0)
}

/// Right side of the advantage condition.
fn condition_rhs(model: &PredictorModel) -> f64 {
    ((1.0 - model.w_nc) / model.w_c) * (model.e_unlinked + model.e_linked)
}

/// Evaluates the closed-form advantage condition.
pub fn g_condition(spec: &SbmSpec, model: &PredictorModel) -> Result<TheoremReport> {
    model.validate()?;
    if model.w_c <= 0.0 {
        return Err(Error::invalid(
            "advantage condition undefined for w_c = 0 (no community vote)",
        ));
    }
    let theta_l = theta_linked(spec)?;
    let theta_u = theta_unlinked(spec)?;
    let g = g_value(spec)? - model.eps0 - model.eps1;
    Ok(TheoremReport {
        theta_l,
        theta_u,
        g_value: g,
        condition_holds: g >= condition_rhs(model),
        mc_acc_hybrid: 0.0,
        mc_acc_noncommunity: 0.0,
        mc_trials: 0,
    })
}

/// Exact per-class and overall expected accuracies of the simulated
/// predictors; the oracle that `monte_carlo_theorem` is checked against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedAccuracies {
    pub hybrid: f64,
    pub noncommunity: f64,
    /// P(community scorer correct | linked pair).
    pub community_linked: f64,
    /// P(community scorer correct | unlinked pair).
    pub community_unlinked: f64,
}

/// Closed-form expectations for the Monte Carlo experiment.
///
/// The community scorer sees a same-community verdict that is wrong with
/// probability `eps1` (linked pairs) / `eps0` (unlinked pairs) and then
/// predicts "linked" with probability `p` for a same-community verdict and
/// `q` otherwise — the link-rate reading of the SBM. The hybrid vote is
/// decided by the larger weight; exact ties fall to a fair coin.
pub fn expected_accuracies(spec: &SbmSpec, model: &PredictorModel) -> Result<ExpectedAccuracies> {
    model.validate()?;
    let theta_l = theta_linked(spec)?;
    let theta_u = theta_unlinked(spec)?;
    // Same-community probability as seen through the noisy detector.
    let seen_l = theta_l * (1.0 - model.eps1) + (1.0 - theta_l) * model.eps1;
    let seen_u = theta_u * (1.0 - model.eps0) + (1.0 - theta_u) * model.eps0;
    // "Linked" call rates of the community scorer per class.
    let call_l = seen_l * spec.p + (1.0 - seen_l) * spec.q;
    let call_u = seen_u * spec.p + (1.0 - seen_u) * spec.q;
    let community_linked = call_l;
    let community_unlinked = 1.0 - call_u;

    let vote = |nc_acc: f64, c_acc: f64| -> f64 {
        if model.w_nc > model.w_c {
            nc_acc
        } else if model.w_c > model.w_nc {
            c_acc
        } else {
            0.5 * (nc_acc + c_acc)
        }
    };
    let hybrid_linked = vote(model.e_linked, community_linked);
    let hybrid_unlinked = vote(model.e_unlinked, community_unlinked);
    Ok(ExpectedAccuracies {
        hybrid: 0.5 * (hybrid_linked + hybrid_unlinked),
        noncommunity: 0.5 * (model.e_linked + model.e_unlinked),
        community_linked,
        community_unlinked,
    })
}

/// One grid point at which a finite-difference slope had the wrong sign.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MonotonicityViolation {
    pub p: f64,
    pub q: f64,
    pub dg_dp: f64,
    pub dg_dq: f64,
    pub tolerance: f64,
}

/// Outcome of a monotonicity sweep of `g` over a `(p, q)` grid.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub k: usize,
    pub grid_resolution: usize,
    pub points_checked: usize,
    pub violations: Vec<MonotonicityViolation>,
}

impl MonotonicityReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `∂g/∂p ≥ 0` and `∂g/∂q ≤ 0` by central finite differences on a
/// uniform grid of `grid_resolution × grid_resolution` points in (0, 1)².
///
/// Tolerances are `1e−9·|g| + 1e−12` per point; the report lists every
/// violation (a clean report is the expected outcome for all K ≥ 2).
pub fn g_monotonicity_check(k: usize, grid_resolution: usize) -> MonotonicityReport {
    let r = grid_resolution.max(2);
    let mut report = MonotonicityReport {
        k,
        grid_resolution: r,
        points_checked: 0,
        violations: Vec::new(),
    };
    let eval = |p: f64, q: f64| -> f64 {
        g_value(&SbmSpec::new(k, 1, p, q)).expect("interior grid point")
    };
    for i in 0..r {
        for j in 0..r {
            let p = (i + 1) as f64 / (r + 1) as f64;
            let q = (j + 1) as f64 / (r + 1) as f64;
            // Step small enough for an accurate slope, clipped to keep both
            // sample points inside (0, 1).
            let h: f64 = (1e-4_f64)
                .min(0.5 * p)
                .min(0.5 * (1.0 - p))
                .min(0.5 * q)
                .min(0.5 * (1.0 - q));
            let g_here = eval(p, q);
            let dg_dp = (eval(p + h, q) - eval(p - h, q)) / (2.0 * h);
            let dg_dq = (eval(p, q + h) - eval(p, q - h)) / (2.0 * h);
            let tolerance = 1e-9 * g_here.abs() + 1e-12;
            report.points_checked += 1;
            if dg_dp < -tolerance || dg_dq > tolerance {
                report.violations.push(MonotonicityViolation {
                    p,
                    q,
                    dg_dp,
                    dg_dq,
                    tolerance,
                });
            }
        }
    }
    report
}

/// Simulates the hybrid and community-agnostic predictors on `trials`
/// class-balanced pairs and reports empirical accuracies next to the closed
/// form.
///
/// Pair classes are drawn from the exact SBM conditionals (a linked pair is
/// intra-community with probability `theta_linked`, an unlinked one with
/// probability `theta_unlinked`). When the closed-form condition holds with
/// margin ≥ 0.05, the empirical hybrid accuracy must not trail the
/// community-agnostic accuracy by more than 3σ; a violation is an error.
pub fn monte_carlo_theorem(
    spec: &SbmSpec,
    model: &PredictorModel,
    trials: u64,
    seed: u64,
) -> Result<TheoremReport> {
    model.validate()?;
    if trials < 1000 {
        return Err(Error::invalid(format!(
            "at least 1000 trials required for a meaningful simulation, got {trials}"
        )));
    }
    let theta_l = theta_linked(spec)?;
    let theta_u = theta_unlinked(spec)?;
    let g = g_value(spec)? - model.eps0 - model.eps1;
    // w_c = 0 leaves the condition's right side undefined; the simulation
    // still runs (the hybrid degenerates to the community-agnostic scorer)
    // but no condition is claimed.
    let (condition_holds, margin) = if model.w_c > 0.0 {
        let rhs = condition_rhs(model);
        (g >= rhs, g - rhs)
    } else {
        (false, f64::NEG_INFINITY)
    };

    let mut rng = rng::stream(seed, "mc-theorem");
    let mut hybrid_correct = 0u64;
    let mut nc_correct_total = 0u64;
    let linked_trials = trials / 2;
    for t in 0..trials {
        let linked = t < linked_trials;
        let (theta, eps, nc_acc, truth) = if linked {
            (theta_l, model.eps1, model.e_linked, 1.0)
        } else {
            (theta_u, model.eps0, model.e_unlinked, -1.0)
        };
        let same = rng.gen::<f64>() < theta;
        let seen_same = if rng.gen::<f64>() < eps { !same } else { same };
        let call_prob = if seen_same { spec.p } else { spec.q };
        let f_c = if rng.gen::<f64>() < call_prob { 1.0 } else { -1.0 };
        let nc_correct = rng.gen::<f64>() < nc_acc;
        let f_nc = if nc_correct { truth } else { -truth };
        let score = model.w_nc * f_nc + model.w_c * f_c;
        let prediction = if score > 0.0 {
            1.0
        } else if score < 0.0 {
            -1.0
        } else if rng.gen::<bool>() {
            1.0
        } else {
            -1.0
        };
        if prediction == truth {
            hybrid_correct += 1;
        }
        if nc_correct {
            nc_correct_total += 1;
        }
    }

    let mc_acc_hybrid = hybrid_correct as f64 / trials as f64;
    let mc_acc_noncommunity = nc_correct_total as f64 / trials as f64;
    if condition_holds && margin >= 0.05 {
        let sigma = (0.5 / trials as f64).sqrt();
        if mc_acc_hybrid < mc_acc_noncommunity - 3.0 * sigma {
            return Err(Error::Theorem(format!(
                "condition holds with margin {margin:.4} but hybrid accuracy \
                 {mc_acc_hybrid:.5} trails non-community accuracy {mc_acc_noncommunity:.5} \
                 by more than 3σ = {:.5}",
                3.0 * sigma
            )));
        }
    }
    Ok(TheoremReport {
        theta_l,
        theta_u,
        g_value: g,
        condition_holds,
        mc_acc_hybrid,
        mc_acc_noncommunity,
        mc_trials: trials,
    })
}

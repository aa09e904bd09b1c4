use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SampledSymplecticPath;
use crate::error::{Error, Result};
use crate::normal_forms::{diamond_raw, n2_matrix};

/// Elementary paths on `s ∈ [0, 1]` whose ⋄-products serve as test generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockPath {
    /// `R(π·x·s)`.
    Rotation { angle_over_pi: f64 },
    /// `R(π·h·2s)` on the first half, then `λ·N₁(1, λ·b·(2s − 1))` with `λ = (−1)^h`,
    /// ending at `N₁(λ, b)`. With `h = 0` the shear runs on the whole interval.
    Shear { half_turns: u32, b: f64 },
    /// `diag(λ^s, λ^{−s})` for `λ > 0`.
    Hyperbolic { lambda: f64 },
    /// Both rotation blocks turn to `θ`, then the off-diagonal block grows to `b`.
    N2 { angle_over_pi: f64, b: [f64; 4] },
}

fn rot(t: f64) -> DMatrix<f64> {
    let (s, c) = t.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

impl BlockPath {
    pub fn half_dim(&self) -> usize {
        match self {
            BlockPath::N2 { .. } => 2,
            _ => 1,
        }
    }

    pub fn check(&self) -> Result<()> {
        match self {
            BlockPath::Hyperbolic { lambda } if !(*lambda > 0.0) => {
                Err(Error::InvalidArgument(format!("hyperbolic block needs λ > 0, got {lambda}")))
            }
            _ => Ok(()),
        }
    }

    /// Largest entry speed, used to pick a step count.
    fn speed(&self) -> f64 {
        match self {
            BlockPath::Rotation { angle_over_pi } => PI * angle_over_pi.abs(),
            BlockPath::Shear { half_turns, b } => 2.0 * (PI * f64::from(*half_turns)).max(b.abs()),
            BlockPath::Hyperbolic { lambda } => lambda.ln().abs() * lambda.max(1.0 / lambda),
            BlockPath::N2 { angle_over_pi, b } => {
                2.0 * (PI * angle_over_pi.abs()).max(b.iter().fold(0.0f64, |a, x| a.max(x.abs())))
            }
        }
    }

    pub fn eval(&self, s: f64) -> DMatrix<f64> {
        match self {
            BlockPath::Rotation { angle_over_pi } => rot(PI * angle_over_pi * s),
            BlockPath::Shear { half_turns: 0, b } => DMatrix::from_row_slice(2, 2, &[1.0, b * s, 0.0, 1.0]),
            BlockPath::Shear { half_turns, b } => {
                if s <= 0.5 {
                    rot(PI * f64::from(*half_turns) * 2.0 * s)
                } else {
                    let l = if half_turns % 2 == 0 { 1.0 } else { -1.0 };
                    let u = 2.0 * s - 1.0;
                    DMatrix::from_row_slice(2, 2, &[l, b * u, 0.0, l])
                }
            }
            BlockPath::Hyperbolic { lambda } => {
                let l = lambda.powf(s);
                DMatrix::from_row_slice(2, 2, &[l, 0.0, 0.0, 1.0 / l])
            }
            BlockPath::N2 { angle_over_pi, b } => {
                let theta = PI * angle_over_pi;
                if s <= 0.5 {
                    n2_matrix(theta * 2.0 * s, &[0.0; 4])
                } else {
                    let u = 2.0 * s - 1.0;
                    n2_matrix(theta, &b.map(|x| x * u))
                }
            }
        }
    }

    /// `⋄` of the blocks at parameter `s`.
    pub fn eval_all(blocks: &[BlockPath], s: f64) -> DMatrix<f64> {
        let mut it = blocks.iter();
        let first = it.next().map(|b| b.eval(s)).unwrap_or_else(|| DMatrix::zeros(0, 0));
        it.fold(first, |acc, b| diamond_raw(&acc, &b.eval(s)))
    }

    /// Samples the ⋄-product over `[0, τ]`, refining until the step bound holds.
    pub fn sample(blocks: &[BlockPath], tau: f64) -> Result<SampledSymplecticPath> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("at least one block is required".into()));
        }
        for b in blocks {
            b.check()?;
        }
        let n = blocks.iter().map(BlockPath::half_dim).sum();
        let speed = blocks.iter().map(BlockPath::speed).fold(0.0, f64::max);
        let steps = ((speed / 0.02).ceil() as usize).max(64);
        SampledSymplecticPath::from_fn_auto(n, tau, steps, |t| BlockPath::eval_all(blocks, t / tau))
    }
}

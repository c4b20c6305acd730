//! Heuristic distance estimate by shooting arc-length geodesics from the
//! identity.
//!
//! Initial covectors are `(cos α, sin α, h0)`, so the time to reach the
//! target is the length of the geodesic. A coarse grid over `(α, h0, t)`
//! seeds Nelder-Mead refinements of the endpoint error; the shortest hit
//! is reported. Nothing here proves minimality.

use super::{
    geodesic_endpoint, geodesic_flow, vertical_rhs, GeodesicState, GroupElement, GroupModel,
};
use crate::numeric::{nelder_mead, Axpy, SimplexOptions};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingOptions {
    pub alpha_samples: usize,
    pub h0_range: (f64, f64),
    pub h0_samples: usize,
    pub t_max: f64,
    /// Grid resolution in `t`; the coarse pass integrates each covector
    /// once and samples the trajectory at these times.
    pub t_samples: usize,
    /// RK4 steps per coarse-grid interval.
    pub substeps: usize,
    /// RK4 steps for each endpoint evaluation during refinement. Fixed, so
    /// that the endpoint is a smooth function of `t`.
    pub refine_steps: usize,
    pub max_candidates: usize,
    /// Simplex runs per candidate, each restarted from the previous best.
    pub restarts: usize,
    pub simplex: SimplexOptions,
    /// A hit is an endpoint within this distance of the target.
    pub tolerance: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            alpha_samples: 24,
            h0_range: (-8.0, 8.0),
            h0_samples: 17,
            t_max: 3.0,
            t_samples: 60,
            substeps: 4,
            refine_steps: 300,
            max_candidates: 12,
            restarts: 4,
            simplex: SimplexOptions {
                f_tolerance: 1e-30,
                ..SimplexOptions::default()
            },
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingResult {
    /// Length of the best hit, or of the best attempt when nothing hit.
    pub estimate: f64,
    /// Initial covector `(h1, h2, h0)` of that geodesic.
    pub covector: [f64; 3],
    /// Endpoint distance (largest entry) of that geodesic to the target.
    pub error: f64,
    pub converged: bool,
}

fn covector(alpha: f64, h0: f64) -> [f64; 3] {
    let (s, c) = alpha.sin_cos();
    [c, s, h0]
}

/// Estimate the distance from the identity to `target`.
pub fn shoot_distance(
    model: &GroupModel,
    target: &GroupElement,
    opts: &ShootingOptions,
) -> Result<ShootingResult> {
    let id = model.identity();
    if target.distance(&id) <= opts.tolerance {
        return Ok(ShootingResult {
            estimate: 0.0,
            covector: [1.0, 0.0, 0.0],
            error: target.distance(&id),
            converged: true,
        });
    }

    let endpoint = |x: &[f64]| -> Option<GroupElement> {
        if x[2].is_nan() || x[2] <= 0.0 {
            return None;
        }
        let init = GeodesicState::at_identity(model, covector(x[0], x[1]));
        geodesic_endpoint(model, &init, x[2], opts.refine_steps, &vertical_rhs)
            .ok()
            .map(|s| s.g)
    };
    let objective = |x: &[f64]| match endpoint(x) {
        Some(g) => g
            .axpy(-1.0, target)
            .entries()
            .iter()
            .map(|v| v * v)
            .sum::<f64>(),
        None => f64::INFINITY,
    };

    // Coarse pass: (error, alpha, h0, t) at local minima along t.
    let mut seeds: Vec<(f64, [f64; 3])> = Vec::new();
    let dt_grid = opts.t_max / opts.t_samples as f64;
    for ia in 0..opts.alpha_samples {
        let alpha = std::f64::consts::TAU * ia as f64 / opts.alpha_samples as f64;
        for ih in 0..opts.h0_samples {
            let (lo, hi) = opts.h0_range;
            let h0 = if opts.h0_samples == 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * ih as f64 / (opts.h0_samples - 1) as f64
            };
            let init = GeodesicState::at_identity(model, covector(alpha, h0));
            let mut errors = Vec::with_capacity(opts.t_samples);
            let mut count = 0;
            let result = geodesic_flow(
                model,
                &init,
                opts.t_max,
                opts.t_samples * opts.substeps,
                &vertical_rhs,
                |s| {
                    count += 1;
                    if count % opts.substeps == 0 {
                        errors.push(s.g.distance(target));
                    }
                },
            );
            if result.is_err() {
                continue;
            }
            for i in 0..errors.len() {
                let left = if i == 0 { f64::INFINITY } else { errors[i - 1] };
                let right = errors.get(i + 1).copied().unwrap_or(f64::INFINITY);
                if errors[i] <= left && errors[i] <= right {
                    seeds.push((errors[i], [alpha, h0, dt_grid * (i + 1) as f64]));
                }
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    seeds.truncate(opts.max_candidates);

    let step = [0.2, 0.5, 0.5 * dt_grid.max(0.05)];
    let simplex = SimplexOptions {
        target: (0.01 * opts.tolerance).powi(2),
        ..opts.simplex
    };
    let mut best: Option<ShootingResult> = None;
    let mut best_hit: Option<ShootingResult> = None;
    for (_, x0) in seeds {
        let mut x = x0.to_vec();
        for _ in 0..opts.restarts.max(1) {
            let res = nelder_mead(objective, &x, &step, &simplex);
            x = res.x;
            if res.value <= simplex.target {
                break;
            }
        }
        let Some(g) = endpoint(&x) else { continue };
        let err = g.distance(target);
        let candidate = ShootingResult {
            estimate: x[2],
            covector: covector(x[0], x[1]),
            error: err,
            converged: err < opts.tolerance,
        };
        if candidate.converged
            && best_hit
                .as_ref()
                .is_none_or(|b| candidate.estimate < b.estimate)
        {
            best_hit = Some(candidate.clone());
        }
        if best.as_ref().is_none_or(|b| candidate.error < b.error) {
            best = Some(candidate);
        }
    }
    Ok(best_hit.or(best).unwrap_or(ShootingResult {
        estimate: f64::NAN,
        covector: [f64::NAN; 3],
        error: f64::INFINITY,
        converged: false,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::ModelId;

    #[test]
    fn identity_target_is_at_distance_zero() {
        let m = GroupModel::standard(ModelId::Heisenberg);
        let r = shoot_distance(&m, &m.identity(), &ShootingOptions::default()).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn heisenberg_horizontal_subgroup() {
        let m = GroupModel::standard(ModelId::Heisenberg);
        let target = m.generators[0].exp();
        let r = shoot_distance(&m, &target, &ShootingOptions::default()).unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.estimate - 1.0).abs() < 1e-6, "{r:?}");
    }
}

use serde::Serialize;

use crate::bdge::BdgeParams;
use crate::dge::{profile_alpha, profile_p, WeightedCounts, P_MAX, P_MIN};
use crate::error::{Error, Result};
use crate::fit::{FitConfig, LatentTriple};
use crate::optim::golden_section_max;

/// Restrictions on the shapes imposed during the M-step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Constraint {
    #[default]
    Unconstrained,
    /// `alpha1 = alpha2 = alpha3`.
    EqualAll,
    /// `alpha1 = alpha2 = a`, `alpha3 = 1 - a` with `0 < a < 1` (geometric marginals).
    GeometricMarginals,
    /// `alpha1 = alpha2`, `alpha3` free.
    EqualAlpha12,
}

/// Weighted value counts of the three latent columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LatentCounts {
    pub u1: WeightedCounts,
    pub u2: WeightedCounts,
    pub u3: WeightedCounts,
}

impl LatentCounts {
    pub fn add(&mut self, t: LatentTriple, weight: f64) {
        self.u1.add(t.u1, weight);
        self.u2.add(t.u2, weight);
        self.u3.add(t.u3, weight);
    }

    pub fn from_latents(latents: &[LatentTriple]) -> Self {
        let mut c = Self::default();
        for &t in latents {
            c.add(t, 1.0);
        }
        c
    }

    pub fn total(&self) -> f64 {
        self.u1.total()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MStepResult {
    pub params: BdgeParams,
    /// Complete-data log-likelihood at `params`.
    pub objective: f64,
    /// Some shape or the base ended on its search box.
    pub boundary: bool,
}

const GEOM_LO: f64 = 1e-6;
const GEOM_HI: f64 = 1.0 - 1e-6;

fn geometric_shape(c: &LatentCounts, p: f64, tol: f64) -> crate::optim::Maximum {
    golden_section_max(|a| c.u1.loglik(a, p) + c.u2.loglik(a, p) + c.u3.loglik(1.0 - a, p), GEOM_LO, GEOM_HI, tol)
}

/// Profile-likelihood maximization of the complete log-likelihood under a
/// constraint: every shape is solved for each `p`, then `p` is searched.
pub fn m_step(counts: &LatentCounts, constraint: Constraint, cfg: &FitConfig) -> Result<MStepResult> {
    if counts.total() <= 0.0 {
        return Err(Error::EmptyData);
    }
    let tol = cfg.inner_opt_tol;
    let c = counts;
    let mut merged12 = c.u1.clone();
    merged12.merge(&c.u2);
    let mut merged_all = merged12.clone();
    merged_all.merge(&c.u3);

    let objective = |p: f64| -> f64 {
        match constraint {
            Constraint::Unconstrained => {
                profile_alpha(&c.u1, p, tol).value
                    + profile_alpha(&c.u2, p, tol).value
                    + profile_alpha(&c.u3, p, tol).value
            }
            Constraint::EqualAll => profile_alpha(&merged_all, p, tol).value,
            Constraint::EqualAlpha12 => profile_alpha(&merged12, p, tol).value + profile_alpha(&c.u3, p, tol).value,
            Constraint::GeometricMarginals => geometric_shape(c, p, tol).value,
        }
    };
    let outer = profile_p(objective, tol);
    let p = outer.x;
    let mut boundary = outer.at_boundary || p <= P_MIN || p >= P_MAX;
    let shapes = match constraint {
        Constraint::Unconstrained => {
            let m = [&c.u1, &c.u2, &c.u3].map(|h| profile_alpha(h, p, tol));
            boundary |= m.iter().any(|x| x.at_boundary);
            [m[0].x, m[1].x, m[2].x]
        }
        Constraint::EqualAll => {
            let m = profile_alpha(&merged_all, p, tol);
            boundary |= m.at_boundary;
            [m.x; 3]
        }
        Constraint::EqualAlpha12 => {
            let m = profile_alpha(&merged12, p, tol);
            let m3 = profile_alpha(&c.u3, p, tol);
            boundary |= m.at_boundary || m3.at_boundary;
            [m.x, m.x, m3.x]
        }
        Constraint::GeometricMarginals => {
            let m = geometric_shape(c, p, tol);
            boundary |= m.at_boundary;
            [m.x, m.x, 1.0 - m.x]
        }
    };
    let params = BdgeParams::new(shapes[0], shapes[1], shapes[2], p)?;
    let objective = c.u1.loglik(shapes[0], p) + c.u2.loglik(shapes[1], p) + c.u3.loglik(shapes[2], p);
    Ok(MStepResult { params, objective, boundary })
}

/// Unconstrained M-step from predicted latent triples.
pub fn m_step_profile(latents: &[LatentTriple], cfg: &FitConfig) -> Result<MStepResult> {
    if latents.is_empty() {
        return Err(Error::EmptyData);
    }
    m_step(&LatentCounts::from_latents(latents), Constraint::Unconstrained, cfg)
}

use serde::Serialize;

use crate::bdge::{BdgeParams, BivariatePoint};
use crate::numeric;

/// Component maxima `(u1, u2, u3)` behind one observation, with
/// `max(u1, u3) = x1` and `max(u2, u3) = x2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LatentTriple {
    pub u1: u32,
    pub u2: u32,
    pub u3: u32,
}

impl LatentTriple {
    pub fn new(u1: u32, u2: u32, u3: u32) -> Self {
        Self { u1, u2, u3 }
    }

    pub fn is_feasible_for(&self, pt: BivariatePoint) -> bool {
        self.u1.max(self.u3) == pt.x1 && self.u2.max(self.u3) == pt.x2
    }
}

fn ln_pmf_table(ln_p: f64, alpha: f64, upto: u32) -> Vec<f64> {
    (0..=upto as i64).map(|k| numeric::ln_pmf(ln_p, alpha, k)).collect()
}

/// Every feasible triple for `pt` in lexicographic order, with its log
/// probability under independent DGE components.
fn feasible(pt: BivariatePoint, params: &BdgeParams) -> Vec<(LatentTriple, f64)> {
    candidates(pt, params, false)
}

/// With `overall_max` the diagonal set is every triple whose largest entry
/// is `x`, which also admits triples such as `(x, 0, 0)` that cannot
/// produce the observation.
fn candidates(pt: BivariatePoint, params: &BdgeParams, overall_max: bool) -> Vec<(LatentTriple, f64)> {
    let ln_p = params.p().ln();
    let (x1, x2) = (pt.x1, pt.x2);
    let mut out = Vec::new();
    if x1 < x2 {
        // u2 = x2 is forced; (u1, u3) range over {max(u, v) = x1}.
        let f1 = ln_pmf_table(ln_p, params.alpha1(), x1);
        let f3 = ln_pmf_table(ln_p, params.alpha3(), x1);
        let base = numeric::ln_pmf(ln_p, params.alpha2(), x2 as i64);
        for u1 in 0..=x1 {
            for u3 in 0..=x1 {
                if u1.max(u3) == x1 {
                    let s = f1[u1 as usize] + f3[u3 as usize] + base;
                    out.push((LatentTriple::new(u1, x2, u3), s));
                }
            }
        }
    } else if x2 < x1 {
        let f2 = ln_pmf_table(ln_p, params.alpha2(), x2);
        let f3 = ln_pmf_table(ln_p, params.alpha3(), x2);
        let base = numeric::ln_pmf(ln_p, params.alpha1(), x1 as i64);
        for u2 in 0..=x2 {
            for u3 in 0..=x2 {
                if u2.max(u3) == x2 {
                    let s = f2[u2 as usize] + f3[u3 as usize] + base;
                    out.push((LatentTriple::new(x1, u2, u3), s));
                }
            }
        }
    } else {
        let x = x1;
        let f1 = ln_pmf_table(ln_p, params.alpha1(), x);
        let f2 = ln_pmf_table(ln_p, params.alpha2(), x);
        let f3 = ln_pmf_table(ln_p, params.alpha3(), x);
        for u1 in 0..=x {
            for u2 in 0..=x {
                for u3 in 0..=x {
                    let keep = if overall_max { u1.max(u2).max(u3) == x } else { u1.max(u3) == x && u2.max(u3) == x };
                    if keep {
                        let s = f1[u1 as usize] + f2[u2 as usize] + f3[u3 as usize];
                        out.push((LatentTriple::new(u1, u2, u3), s));
                    }
                }
            }
        }
    }
    out
}

/// Most probable latent triple given the observation. Ties go to the
/// lexicographically smallest triple.
pub fn e_step_predict(pt: BivariatePoint, params: &BdgeParams) -> LatentTriple {
    argmax(feasible(pt, params))
}

/// As [`e_step_predict`], but on the diagonal the search runs over all
/// triples with overall maximum `x`.
pub fn e_step_predict_overall_max(pt: BivariatePoint, params: &BdgeParams) -> LatentTriple {
    argmax(candidates(pt, params, true))
}

fn argmax(cands: Vec<(LatentTriple, f64)>) -> LatentTriple {
    let mut best: Option<(LatentTriple, f64)> = None;
    for (t, s) in cands {
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((t, s)),
        }
    }
    best.expect("feasible set is never empty").0
}

/// Conditional distribution of the latent triple given the observation.
/// Weights sum to one; triples of zero probability are dropped.
pub fn e_step_posterior(pt: BivariatePoint, params: &BdgeParams) -> Vec<(LatentTriple, f64)> {
    let cands = feasible(pt, params);
    let top = cands.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return vec![(e_step_predict(pt, params), 1.0)];
    }
    let mut out: Vec<(LatentTriple, f64)> =
        cands.into_iter().map(|(t, s)| (t, (s - top).exp())).filter(|(_, w)| *w > 0.0).collect();
    let total: f64 = out.iter().map(|c| c.1).sum();
    for c in &mut out {
        c.1 /= total;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdge::joint_pmf;

    fn bp(a1: f64, a2: f64, a3: f64, p: f64) -> BdgeParams {
        BdgeParams::new(a1, a2, a3, p).unwrap()
    }

    #[test]
    fn forced_cases() {
        let q = bp(1.3, 0.7, 2.0, 0.4);
        assert_eq!(e_step_predict(BivariatePoint::new(0, 5), &q), LatentTriple::new(0, 5, 0));
        assert_eq!(e_step_predict(BivariatePoint::new(0, 0), &q), LatentTriple::new(0, 0, 0));
        assert_eq!(e_step_predict(BivariatePoint::new(4, 0), &q), LatentTriple::new(4, 0, 0));
    }

    #[test]
    fn feasible_set_sizes() {
        let q = bp(1.0, 1.0, 1.0, 0.5);
        for x in 0..6u32 {
            let n = feasible(BivariatePoint::new(x, x), &q).len() as u32;
            assert_eq!(n, x * x + 3 * x + 1);
            let n = feasible(BivariatePoint::new(x, x + 2), &q).len() as u32;
            assert_eq!(n, 2 * x + 1);
        }
    }

    #[test]
    fn ties_break_lexicographically() {
        // Symmetric shapes: (1,0,0), (0,1,0), (0,0,1) tie under the overall-max set.
        let q = bp(1.0, 1.0, 1.0, 0.5);
        assert_eq!(e_step_predict_overall_max(BivariatePoint::new(1, 1), &q), LatentTriple::new(0, 0, 1));
        assert_eq!(e_step_predict(BivariatePoint::new(1, 1), &q), LatentTriple::new(0, 0, 1));
    }

    #[test]
    fn overall_max_set_can_be_infeasible() {
        let q = bp(6.0, 0.2, 0.2, 0.5);
        let pt = BivariatePoint::new(2, 2);
        assert!(e_step_predict(pt, &q).is_feasible_for(pt));
        assert!(!e_step_predict_overall_max(pt, &q).is_feasible_for(pt));
    }

    #[test]
    fn posterior_mass_matches_joint_pmf() {
        // Summed feasible mass is the probability of the observation.
        let q = bp(1.2, 0.8, 1.7, 0.45);
        for x1 in 0..5 {
            for x2 in 0..5 {
                let pt = BivariatePoint::new(x1, x2);
                let mass: f64 = feasible(pt, &q).iter().map(|c| c.1.exp()).sum();
                assert!((mass - joint_pmf(pt, &q)).abs() < 1e-14, "{x1},{x2}: {mass} vs {}", joint_pmf(pt, &q));
                let w: f64 = e_step_posterior(pt, &q).iter().map(|c| c.1).sum();
                assert!((w - 1.0).abs() < 1e-12);
            }
        }
    }
}

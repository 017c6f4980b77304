//! Gaussian-perturbation local search with a shrinking noise schedule.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{SearchError, SearchProblem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchBudget {
    Iterations(u64),
    WallClock(Duration),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalSearchConfig {
    pub noise_scale: f64,
    pub budget: SearchBudget,
    pub accept_probability: f64,
    pub seed: u64,
}

impl LocalSearchConfig {
    /// The problem's noise scale, `p = 1`.
    pub fn for_problem<P: SearchProblem>(problem: &P, budget: SearchBudget, seed: u64) -> LocalSearchConfig {
        LocalSearchConfig { noise_scale: problem.noise_scale(), budget, accept_probability: 1.0, seed }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if !(self.noise_scale.is_finite() && self.noise_scale > 0.0) {
            return Err(SearchError::Config(format!("noise scale must be positive, got {}", self.noise_scale)));
        }
        if !(self.accept_probability > 0.0 && self.accept_probability <= 1.0) {
            return Err(SearchError::Config(format!(
                "acceptance probability must lie in (0, 1], got {}",
                self.accept_probability
            )));
        }
        match self.budget {
            SearchBudget::Iterations(0) => Err(SearchError::Config("iteration budget must be positive".into())),
            SearchBudget::WallClock(d) if d.is_zero() => Err(SearchError::Config("time budget must be positive".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: u64,
    /// Consumed fraction of the budget when the candidate was drawn.
    pub progress: f64,
    /// `None` when scoring the candidate failed.
    pub candidate: Option<f64>,
    pub accepted: bool,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSearchResult {
    pub best_vector: Vec<f64>,
    pub best_score: f64,
    pub initial_score: f64,
    pub trace: Vec<TraceStep>,
    pub failures: u64,
}

/// `x + noise`, clipped to the bounds.
pub fn perturb(x: f64, noise: f64, (lo, hi): (f64, f64)) -> f64 {
    (x + noise).clamp(lo, hi)
}

fn score_vector<P: SearchProblem>(problem: &P, v: &[f64]) -> Option<f64> {
    problem.score(&problem.decode(v)).ok().filter(|s| s.is_finite())
}

/// Starts from a uniform point and repeatedly adds noise of variance
/// `s·(1 − t/t_max)` to every coordinate, clipping to the bounds. Strict
/// improvements are accepted with probability `p`. Since only improvements
/// are ever taken, the current point is always the best seen.
pub fn local_search<P: SearchProblem>(problem: &P, config: &LocalSearchConfig) -> Result<LocalSearchResult, SearchError> {
    config.validate()?;
    let bounds = problem.bounds();
    if bounds.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
        return Err(SearchError::Config("problem bounds must be finite and ordered".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut current: Vec<f64> =
        bounds.iter().map(|&(lo, hi)| if lo == hi { lo } else { rng.gen_range(lo..=hi) }).collect();
    let mut failures = 0;
    let mut best = match score_vector(problem, &current) {
        Some(s) => s,
        None => {
            failures += 1;
            f64::NEG_INFINITY
        }
    };
    let initial_score = best;
    let start = Instant::now();
    let mut trace = Vec::new();
    let mut step = 0u64;
    loop {
        let progress = match config.budget {
            SearchBudget::Iterations(n) => {
                if step >= n {
                    break;
                }
                step as f64 / n as f64
            }
            SearchBudget::WallClock(limit) => {
                let f = start.elapsed().as_secs_f64() / limit.as_secs_f64();
                if f >= 1.0 {
                    break;
                }
                f
            }
        };
        let sd = (config.noise_scale * (1.0 - progress)).max(0.0).sqrt();
        let candidate: Vec<f64> = current
            .iter()
            .zip(&bounds)
            .map(|(&x, &(lo, hi))| {
                let z: f64 = StandardNormal.sample(&mut rng);
                perturb(x, sd * z, (lo, hi))
            })
            .collect();
        let score = score_vector(problem, &candidate);
        if score.is_none() {
            failures += 1;
        }
        let mut accepted = false;
        if let Some(s) = score {
            if s > best && rng.gen::<f64>() < config.accept_probability {
                current = candidate;
                best = s;
                accepted = true;
            }
        }
        trace.push(TraceStep { step, progress, candidate: score, accepted, best });
        step += 1;
    }
    Ok(LocalSearchResult { best_vector: current, best_score: best, initial_score, trace, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::dsl::Value;

    /// Maximise `-(x - 0.95)^2` on `[0, 1]^2`, scored on the first coordinate.
    struct Toy;

    impl SearchProblem for Toy {
        type Instance = Vec<f64>;
        fn name(&self) -> &'static str {
            "toy"
        }
        fn bounds(&self) -> Vec<(f64, f64)> {
            vec![(0.0, 1.0); 2]
        }
        fn noise_scale(&self) -> f64 {
            0.04
        }
        fn decode(&self, v: &[f64]) -> Vec<f64> {
            v.to_vec()
        }
        fn interpret(&self, _: &Value) -> Result<Vec<f64>, SearchError> {
            Err(SearchError::Instance("unused".into()))
        }
        fn score(&self, x: &Vec<f64>) -> Result<f64, SearchError> {
            assert!(x.iter().all(|c| (0.0..=1.0).contains(c)), "out of bounds: {x:?}");
            Ok(-(x[0] - 0.95).powi(2))
        }
        fn clip_length(&self) -> usize {
            2
        }
        fn seed_program(&self) -> &'static str {
            "[0, 0]"
        }
        fn describe_output(&self) -> &'static str {
            "a pair"
        }
        fn render(&self, x: &Vec<f64>) -> String {
            format!("{x:?}")
        }
    }

    #[test]
    fn deterministic_and_monotone() {
        let cfg = LocalSearchConfig { noise_scale: 0.04, budget: SearchBudget::Iterations(300), accept_probability: 0.7, seed: 5 };
        let a = local_search(&Toy, &cfg).unwrap();
        let b = local_search(&Toy, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trace.len(), 300);
        assert!(a.trace.windows(2).all(|w| w[0].best <= w[1].best));
        assert!(a.best_score >= a.initial_score);
        assert!(a.best_score > -1e-3);
        let other = local_search(&Toy, &LocalSearchConfig { seed: 6, ..cfg }).unwrap();
        assert_ne!(a.trace, other.trace);
    }

    #[test]
    fn clipping() {
        assert_eq!(perturb(0.95, 0.2, (0.0, 1.0)), 1.0);
        assert_eq!(perturb(0.05, -0.2, (0.0, 1.0)), 0.0);
        assert_eq!(perturb(0.5, 0.25, (0.0, 1.0)), 0.75);
    }

    #[test]
    fn config_validation() {
        let good = LocalSearchConfig { noise_scale: 1.0, budget: SearchBudget::Iterations(1), accept_probability: 1.0, seed: 0 };
        assert!(good.validate().is_ok());
        assert!(LocalSearchConfig { noise_scale: 0.0, ..good }.validate().is_err());
        assert!(LocalSearchConfig { accept_probability: 0.0, ..good }.validate().is_err());
        assert!(LocalSearchConfig { accept_probability: 1.5, ..good }.validate().is_err());
        assert!(LocalSearchConfig { budget: SearchBudget::Iterations(0), ..good }.validate().is_err());
        assert!(LocalSearchConfig { budget: SearchBudget::WallClock(Duration::ZERO), ..good }.validate().is_err());
    }

    #[test]
    fn wall_clock_budget_terminates() {
        let cfg = LocalSearchConfig {
            noise_scale: 0.04,
            budget: SearchBudget::WallClock(Duration::from_millis(30)),
            accept_probability: 1.0,
            seed: 1,
        };
        let r = local_search(&Toy, &cfg).unwrap();
        assert!(r.trace.iter().all(|t| t.progress < 1.0));
    }
}

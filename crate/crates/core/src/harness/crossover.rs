//! Setup versus per-call cost.
//!
//! A method with cheap setup and expensive calls wins for few inputs and
//! loses once the other method's setup is amortized. Costs here are in
//! weighted-op units; host setup seconds are converted at a nominal clock.

use crate::api::Evaluator;
use crate::costmodel::{weighted_cost, Weights};
use crate::error::Result;

use super::UniformSampler;

/// Nominal clock of the target core, used to express host setup time in
/// weighted-op units.
pub const DEFAULT_CLOCK_HZ: f64 = 350e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostPoint {
    pub setup_cost: f64,
    pub per_call_cost: f64,
}

impl CostPoint {
    pub fn total(&self, n: f64) -> f64 {
        self.setup_cost + n * self.per_call_cost
    }

    /// Setup from the evaluator's measured wall time; per-call cost as the
    /// mean weighted cost over `samples` seeded inputs.
    pub fn measure(
        ev: &Evaluator,
        weights: &Weights,
        clock_hz: f64,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let (lo, hi) = ev.sample_domain();
        let xs = UniformSampler::new(seed).samples(lo, hi, samples);
        let (_, counts) = ev.evaluate_batch(&xs)?;
        Ok(CostPoint {
            setup_cost: ev.setup().wall_seconds * clock_hz,
            per_call_cost: weighted_cost(&counts, weights) / samples.max(1) as f64,
        })
    }
}

/// N* where `cheap_setup` stops being cheaper than `cheap_calls`, if the
/// two lines cross at a positive count.
pub fn crossover_point(cheap_setup: &CostPoint, cheap_calls: &CostPoint) -> Option<f64> {
    let setup_gap = cheap_calls.setup_cost - cheap_setup.setup_cost;
    let call_gap = cheap_setup.per_call_cost - cheap_calls.per_call_cost;
    (setup_gap > 0.0 && call_gap > 0.0).then(|| setup_gap / call_gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_cross_where_expected() {
        let a = CostPoint {
            setup_cost: 10.0,
            per_call_cost: 5.0,
        };
        let b = CostPoint {
            setup_cost: 100.0,
            per_call_cost: 2.0,
        };
        let n = crossover_point(&a, &b).unwrap();
        assert_eq!(n, 30.0);
        assert!(a.total(n - 1.0) < b.total(n - 1.0));
        assert!(a.total(n + 1.0) > b.total(n + 1.0));
        assert_eq!(crossover_point(&b, &a), None);
        assert_eq!(crossover_point(&a, &a), None);
    }
}

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Truncated discrete power laws, degree sequences and community sizes.

use rand::Rng;
use thiserror::Error;

use crate::rng::RandomSource;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("invalid power-law spec: {0}")]
    InvalidSpec(String),
    #[error("no lower degree bound reaches mean {target} with maximum {k_max} and exponent {gamma}")]
    Infeasible { target: f64, k_max: usize, gamma: f64 },
    #[error("invalid community-size bounds: {0}")]
    InvalidBounds(String),
}

/// `P(x) ∝ x^(-exponent)` on the integers `lower..=upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawSpec {
    pub exponent: f64,
    pub lower: usize,
    pub upper: usize,
}

impl PowerLawSpec {
    pub fn new(exponent: f64, lower: usize, upper: usize) -> Self {
        Self {
            exponent,
            lower,
            upper,
        }
    }

    fn check(&self) -> Result<(), SamplingError> {
        if !self.exponent.is_finite() {
            return Err(SamplingError::InvalidSpec(format!(
                "exponent {} is not finite",
                self.exponent
            )));
        }
        if self.lower == 0 {
            return Err(SamplingError::InvalidSpec("lower bound must be positive".into()));
        }
        if self.lower > self.upper {
            return Err(SamplingError::InvalidSpec(format!(
                "lower bound {} exceeds upper bound {}",
                self.lower, self.upper
            )));
        }
        Ok(())
    }
}

/// Inverse-CDF sampler over the exact normalized table.
#[derive(Debug, Clone)]
pub struct PowerLaw {
    spec: PowerLawSpec,
    cdf: Vec<f64>,
}

impl PowerLaw {
    pub fn new(spec: PowerLawSpec) -> Result<Self, SamplingError> {
        spec.check()?;
        let mut cdf = Vec::with_capacity(spec.upper - spec.lower + 1);
        let mut acc = 0.0;
        for x in spec.lower..=spec.upper {
            acc += (x as f64).powf(-spec.exponent);
            cdf.push(acc);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(Self { spec, cdf })
    }

    pub fn spec(&self) -> PowerLawSpec {
        self.spec
    }

    pub fn sample(&self, rng: &mut RandomSource) -> usize {
        let u: f64 = rng.gen();
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.spec.lower + idx
    }

    pub fn probability(&self, x: usize) -> f64 {
        if x < self.spec.lower || x > self.spec.upper {
            return 0.0;
        }
        let i = x - self.spec.lower;
        if i == 0 {
            self.cdf[0]
        } else {
            self.cdf[i] - self.cdf[i - 1]
        }
    }

    pub fn mean(&self) -> f64 {
        truncated_mean(self.spec.exponent, self.spec.lower, self.spec.upper)
    }
}

pub fn sample_power_law(spec: PowerLawSpec, rng: &mut RandomSource) -> Result<usize, SamplingError> {
    Ok(PowerLaw::new(spec)?.sample(rng))
}

/// Mean of the truncated law, by direct summation.
pub fn truncated_mean(exponent: f64, lower: usize, upper: usize) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for x in lower..=upper {
        let w = (x as f64).powf(-exponent);
        num += x as f64 * w;
        den += w;
    }
    num / den
}

/// Positive degrees with an even sum.
///
/// Degrees are drawn from a two-component mixture of the power laws starting
/// at `k_min` and `k_min + 1`, weighted so that the analytic mean equals the
/// requested average exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSequence {
    degrees: Vec<usize>,
    k_min: usize,
    k_max: usize,
    lower_weight: f64,
}

impl DegreeSequence {
    /// Wraps an explicit sequence; the sum must be even.
    pub fn from_degrees(degrees: Vec<usize>) -> Result<Self, SamplingError> {
        if degrees.iter().sum::<usize>() % 2 == 1 {
            return Err(SamplingError::InvalidSpec("degree sum is odd".into()));
        }
        let k_min = degrees.iter().copied().min().unwrap_or(0);
        let k_max = degrees.iter().copied().max().unwrap_or(0);
        Ok(Self {
            degrees,
            k_min,
            k_max,
            lower_weight: 1.0,
        })
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn into_degrees(self) -> Vec<usize> {
        self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn k_min(&self) -> usize {
        self.k_min
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Mixture weight of the `k_min` component (the rest uses `k_min + 1`).
    pub fn lower_weight(&self) -> f64 {
        self.lower_weight
    }

    pub fn sum(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() as f64 / self.degrees.len().max(1) as f64
    }
}

const MEAN_TOLERANCE: f64 = 0.05;
const MEAN_RETRIES: usize = 64;

pub fn build_degree_sequence(
    n: usize,
    gamma: f64,
    k_max: usize,
    target_avg: f64,
    rng: &mut RandomSource,
) -> Result<DegreeSequence, SamplingError> {
    let infeasible = || SamplingError::Infeasible {
        target: target_avg,
        k_max,
        gamma,
    };
    if n == 0 || k_max == 0 || !gamma.is_finite() {
        return Err(SamplingError::InvalidSpec(format!(
            "n={n}, k_max={k_max}, gamma={gamma}"
        )));
    }
    if !(target_avg >= 1.0) || target_avg >= k_max as f64 {
        return Err(infeasible());
    }
    let mean_at = |k: usize| truncated_mean(gamma, k, k_max);
    if mean_at(1) > target_avg {
        return Err(infeasible());
    }

    // Largest integer lower bound whose mean does not exceed the target.
    let (mut lo, mut hi) = (1usize, k_max);
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if mean_at(mid) <= target_avg {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let k_min = lo;
    let lower = PowerLaw::new(PowerLawSpec::new(gamma, k_min, k_max))?;
    let (upper, lower_weight) = if k_min < k_max {
        let (m0, m1) = (mean_at(k_min), mean_at(k_min + 1));
        let w = ((m1 - target_avg) / (m1 - m0)).clamp(0.0, 1.0);
        (Some(PowerLaw::new(PowerLawSpec::new(gamma, k_min + 1, k_max))?), w)
    } else {
        (None, 1.0)
    };

    let mut best: Option<Vec<usize>> = None;
    let mut best_gap = f64::INFINITY;
    for _ in 0..MEAN_RETRIES {
        let mut degrees: Vec<usize> = (0..n)
            .map(|_| match &upper {
                Some(up) if rng.gen::<f64>() >= lower_weight => up.sample(rng),
                _ => lower.sample(rng),
            })
            .collect();
        fix_parity(&mut degrees, k_max, rng);
        let mean = degrees.iter().sum::<usize>() as f64 / n as f64;
        let gap = (mean - target_avg).abs() / target_avg;
        if gap < best_gap {
            best_gap = gap;
            best = Some(degrees);
        }
        if gap <= MEAN_TOLERANCE {
            break;
        }
    }

    Ok(DegreeSequence {
        degrees: best.unwrap_or_default(),
        k_min,
        k_max,
        lower_weight,
    })
}

fn fix_parity(degrees: &mut [usize], k_max: usize, rng: &mut RandomSource) {
    if degrees.iter().sum::<usize>() % 2 == 0 {
        return;
    }
    let room: Vec<usize> = (0..degrees.len()).filter(|&i| degrees[i] < k_max).collect();
    if !room.is_empty() {
        degrees[room[rng.gen_range(0..room.len())]] += 1;
        return;
    }
    // Every node sits at k_max; step one down instead.
    let i = rng.gen_range(0..degrees.len());
    degrees[i] -= 1;
}

/// Community sizes from the power law on `c_min..=c_max`, summing to `n`.
pub fn build_community_sizes(
    n: usize,
    beta: f64,
    c_min: usize,
    c_max: usize,
    rng: &mut RandomSource,
) -> Result<Vec<usize>, SamplingError> {
    if c_min < 3 {
        return Err(SamplingError::InvalidBounds(format!("c_min {c_min} < 3")));
    }
    if c_min > c_max {
        return Err(SamplingError::InvalidBounds(format!(
            "c_min {c_min} > c_max {c_max}"
        )));
    }
    if c_max > n {
        return Err(SamplingError::InvalidBounds(format!("c_max {c_max} > n {n}")));
    }
    let law = PowerLaw::new(PowerLawSpec::new(beta, c_min, c_max))
        .map_err(|e| SamplingError::InvalidBounds(e.to_string()))?;

    let mut sizes = Vec::new();
    let mut total = 0;
    loop {
        let s = law.sample(rng);
        if total + s < n {
            sizes.push(s);
            total += s;
            continue;
        }
        let last = n - total;
        if last >= c_min {
            sizes.push(last);
        } else {
            absorb_remainder(&mut sizes, last, c_max)?;
        }
        break;
    }
    Ok(sizes)
}

/// Spreads a too-small remainder over the smallest communities, never past `c_max`.
fn absorb_remainder(sizes: &mut [usize], mut rest: usize, c_max: usize) -> Result<(), SamplingError> {
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by_key(|&i| (sizes[i], i));
    for i in order {
        if rest == 0 {
            break;
        }
        let add = rest.min(c_max - sizes[i]);
        sizes[i] += add;
        rest -= add;
    }
    if rest > 0 {
        return Err(SamplingError::InvalidBounds(format!(
            "{rest} nodes left over that fit in no community"
        )));
    }
    Ok(())
}

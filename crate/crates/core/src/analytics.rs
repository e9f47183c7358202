//! Independent-search baseline and sample statistics.
//!
//! With no imitation each agent's string performs a random walk on the
//! hypercube, and only its number `j` of bits agreeing with the global
//! maximum matters. `j` is a birth-death chain: from `j` it moves to `j + 1`
//! with probability `1 - j/N` and to `j - 1` with probability `j/N`, state 0
//! always moves up and state `N` is absorbing. The mean cost of `L`
//! independent searchers is approximated by `L / (2^N (1 - lambda^L))` where
//! `lambda` is the largest eigenvalue of the chain restricted to the
//! transient states `0..N`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transition matrix of the agreement chain, acting on column vectors:
/// `get(i, j)` is the probability of moving from state `j` to state `i`,
/// and every column sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn get(&self, to: usize, from: usize) -> f64 {
        self.entries[to * self.dim() + from]
    }

    fn set(&mut self, to: usize, from: usize, v: f64) {
        let d = self.dim();
        self.entries[to * d + from] = v;
    }

    /// Transient block (states `0..N`), row-major.
    pub fn transient_block(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect()
    }
}

pub fn build_transition_matrix(n: usize) -> Result<TransitionMatrix> {
    if n == 0 {
        return Err(Error::param("transition matrix needs N >= 1"));
    }
    let mut t = TransitionMatrix {
        n,
        entries: vec![0.0; (n + 1) * (n + 1)],
    };
    t.set(1, 0, 1.0);
    for j in 1..n {
        t.set(j + 1, j, 1.0 - j as f64 / n as f64);
        t.set(j - 1, j, j as f64 / n as f64);
    }
    t.set(n, n, 1.0);
    Ok(t)
}

const BISECTION_LIMIT: usize = 200;

/// Largest eigenvalue of the transient block, i.e. the second largest
/// eigenvalue of the full chain.
///
/// The chain is a birth-death chain, so its transient block is similar to the
/// symmetric tridiagonal matrix with zero diagonal and off-diagonal entries
/// `sqrt(up_j * down_{j+1})`. The top eigenvalue of that matrix is bracketed
/// in `[0, 1]` and located by bisection on the Sturm sequence count.
pub fn second_eigenvalue(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("second eigenvalue needs N >= 2"));
    }
    let nf = n as f64;
    let off_sq: Vec<f64> = (0..n - 1)
        .map(|j| {
            let up = if j == 0 { 1.0 } else { 1.0 - j as f64 / nf };
            let down = (j + 1) as f64 / nf;
            up * down
        })
        .collect();
    // number of eigenvalues strictly below x
    let below = |x: f64| {
        let mut count = 0;
        let mut q = -x;
        for (i, e2) in std::iter::once(0.0)
            .chain(off_sq.iter().copied())
            .enumerate()
        {
            if i > 0 {
                let prev = if q == 0.0 { f64::MIN_POSITIVE } else { q };
                q = -x - e2 / prev;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    // invariant: below(lo) < n <= below(hi)
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..BISECTION_LIMIT {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(lo);
        }
        if below(mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::Numerical {
        iterations: BISECTION_LIMIT,
        width: hi - lo,
    })
}

/// Mean cost of `L` independent searchers on strings of length `N`.
pub fn analytic_independent_cost(n: usize, agents: u64) -> Result<f64> {
    if agents == 0 {
        return Err(Error::param("at least one agent required"));
    }
    let lambda = second_eigenvalue(n)?;
    // 1 - lambda^L without cancellation
    let escape = -(agents as f64 * (lambda - 1.0).ln_1p()).exp_m1();
    Ok(agents as f64 / (2f64.powi(n as i32) * escape))
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n_samples)`; zero for one sample.
    pub std_error: f64,
    pub n_samples: usize,
    pub n_excluded: usize,
}

impl Estimate {
    /// `|a - b| <= sigmas * sqrt(se_a^2 + se_b^2)`.
    pub fn agrees_with(&self, other: &Estimate, sigmas: f64) -> bool {
        (self.mean - other.mean).abs() <= sigmas * self.std_error.hypot(other.std_error)
    }
}

pub fn aggregate(samples: &[f64], excluded: usize) -> Result<Estimate> {
    if samples.is_empty() {
        return Err(Error::param("cannot aggregate an empty sample"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let std_error = if samples.len() > 1 {
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(Estimate {
        mean,
        std_error,
        n_samples: samples.len(),
        n_excluded: excluded,
    })
}

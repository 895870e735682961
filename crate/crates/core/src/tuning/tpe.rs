//! Tree-structured Parzen estimator over a box of reals plus independent
//! booleans.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TpeSettings {
    /// Fraction of trials treated as good.
    pub gamma: f64,
    /// Trials drawn uniformly before modelling starts.
    pub n_startup: usize,
    /// Candidates drawn from the good density per suggestion.
    pub n_candidates: usize,
}

impl Default for TpeSettings {
    fn default() -> Self {
        Self { gamma: 0.25, n_startup: 5, n_candidates: 24 }
    }
}

/// A box of inclusive real bounds plus `n_bools` boolean dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub reals: Vec<(f64, f64)>,
    pub n_bools: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub reals: Vec<f64>,
    pub bools: Vec<bool>,
}

impl Domain {
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point {
            reals: self.reals.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>()).collect(),
            bools: (0..self.n_bools).map(|_| rng.random::<bool>()).collect(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.bools.len() == self.n_bools
            && p.reals.len() == self.reals.len()
            && p.reals.iter().zip(&self.reals).all(|(x, &(lo, hi))| (lo..=hi).contains(x))
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

/// Gaussian kernel density truncated to `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct TruncatedKde {
    centers: Vec<f64>,
    bandwidth: f64,
    lo: f64,
    hi: f64,
}

impl TruncatedKde {
    /// Silverman's rule, floored at `range / min(100, n + 1)` so that a
    /// handful of observations cannot collapse the search onto one spot.
    pub fn new(centers: Vec<f64>, lo: f64, hi: f64) -> Self {
        let n = centers.len() as f64;
        let mean = centers.iter().sum::<f64>() / n;
        let sd = if centers.len() > 1 {
            (centers.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let floor = (hi - lo) / (n + 1.0).min(100.0);
        let bandwidth = (1.06 * sd * n.powf(-0.2)).max(floor).max(f64::MIN_POSITIVE);
        Self { centers, bandwidth, lo, hi }
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        let h = self.bandwidth;
        let norm = 1.0 / (h * (2.0 * std::f64::consts::PI).sqrt());
        let total: f64 = self
            .centers
            .iter()
            .map(|&c| {
                let mass = std_normal_cdf((self.hi - c) / h) - std_normal_cdf((self.lo - c) / h);
                let z = (x - c) / h;
                norm * (-0.5 * z * z).exp() / mass.max(1e-300)
            })
            .sum();
        total / self.centers.len() as f64
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let c = self.centers[rng.random_range(0..self.centers.len())];
        let normal = Normal::new(c, self.bandwidth).expect("bandwidth is positive");
        for _ in 0..64 {
            let x = normal.sample(rng);
            if (self.lo..=self.hi).contains(&x) {
                return x;
            }
        }
        c.clamp(self.lo, self.hi)
    }
}

/// Laplace-smoothed probability of `true`.
fn bernoulli(values: impl Iterator<Item = bool>) -> f64 {
    let (mut ones, mut n) = (0usize, 0usize);
    for v in values {
        ones += v as usize;
        n += 1;
    }
    (ones as f64 + 1.0) / (n as f64 + 2.0)
}

/// Proposes the next point given `(point, loss)` history.
pub fn suggest<R: Rng + ?Sized>(history: &[(Point, f64)], domain: &Domain, rng: &mut R, settings: &TpeSettings) -> Point {
    if history.len() < settings.n_startup.max(2) {
        return domain.sample_uniform(rng);
    }
    let mut order: Vec<usize> = (0..history.len()).collect();
    order.sort_by(|&a, &b| history[a].1.total_cmp(&history[b].1).then(a.cmp(&b)));
    let n_good = ((settings.gamma * history.len() as f64).ceil() as usize).clamp(1, history.len() - 1);
    let (good, bad) = order.split_at(n_good);

    let real_models: Vec<(TruncatedKde, TruncatedKde)> = domain
        .reals
        .iter()
        .enumerate()
        .map(|(d, &(lo, hi))| {
            let pick = |set: &[usize]| set.iter().map(|&i| history[i].0.reals[d]).collect();
            (TruncatedKde::new(pick(good), lo, hi), TruncatedKde::new(pick(bad), lo, hi))
        })
        .collect();
    let bool_models: Vec<(f64, f64)> = (0..domain.n_bools)
        .map(|d| {
            let pick = |set: &[usize]| bernoulli(set.iter().map(|&i| history[i].0.bools[d]));
            (pick(good), pick(bad))
        })
        .collect();

    let mut best: Option<(f64, Point)> = None;
    for _ in 0..settings.n_candidates.max(1) {
        let reals: Vec<f64> = real_models.iter().map(|(l, _)| l.sample(rng)).collect();
        let bools: Vec<bool> = bool_models.iter().map(|&(pl, _)| rng.random::<f64>() < pl).collect();
        let mut score = 0.0;
        for (x, (l, g)) in reals.iter().zip(&real_models) {
            score += l.pdf(*x).max(1e-300).ln() - g.pdf(*x).max(1e-300).ln();
        }
        for (&b, &(pl, pg)) in bools.iter().zip(&bool_models) {
            let (l, g) = if b { (pl, pg) } else { (1.0 - pl, 1.0 - pg) };
            score += l.ln() - g.ln();
        }
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, Point { reals, bools }));
        }
    }
    best.expect("at least one candidate").1
}

/// Sequential minimisation of `f` with TPE. Returns the evaluated history.
pub fn minimize<R: Rng + ?Sized>(
    f: impl Fn(&Point) -> f64,
    domain: &Domain,
    budget: usize,
    settings: &TpeSettings,
    rng: &mut R,
) -> Vec<(Point, f64)> {
    let mut history = Vec::with_capacity(budget);
    for _ in 0..budget {
        let p = suggest(&history, domain, rng, settings);
        let loss = f(&p);
        history.push((p, loss));
    }
    history
}

pub fn random_search<R: Rng + ?Sized>(f: impl Fn(&Point) -> f64, domain: &Domain, budget: usize, rng: &mut R) -> Vec<(Point, f64)> {
    (0..budget)
        .map(|_| {
            let p = domain.sample_uniform(rng);
            let loss = f(&p);
            (p, loss)
        })
        .collect()
}

pub fn best_loss(history: &[(Point, f64)]) -> f64 {
    history.iter().map(|h| h.1).fold(f64::INFINITY, f64::min)
}

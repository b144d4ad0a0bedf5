use crate::stats::neumaier_sum;

/// Lower tail of a Poisson-binomial sum, built one Bernoulli at a time.
///
/// Only the masses `P(S = c)` for `c < k` are kept, so pushing costs
/// `O(k)` and the state is `k` floats.
#[derive(Debug, Clone, PartialEq)]
pub struct FewerThan {
    mass: Vec<f64>,
}

/// Above this many single pushes, repeated terms switch to a binomial block.
const REPEAT_LIMIT: u64 = 64;

impl FewerThan {
    pub fn new(k: u32) -> Self {
        let mut mass = vec![0.0; k as usize];
        if let Some(first) = mass.first_mut() {
            *first = 1.0;
        }
        FewerThan { mass }
    }

    pub fn k(&self) -> u32 {
        self.mass.len() as u32
    }

    /// Adds an independent Bernoulli(`q`) term.
    pub fn push(&mut self, q: f64) {
        if q == 0.0 {
            return;
        }
        let keep = 1.0 - q;
        for c in (1..self.mass.len()).rev() {
            self.mass[c] = self.mass[c] * keep + self.mass[c - 1] * q;
        }
        if let Some(first) = self.mass.first_mut() {
            *first *= keep;
        }
    }

    /// Adds `m` independent Bernoulli(`q`) terms.
    pub fn push_repeated(&mut self, q: f64, m: u64) {
        if q == 0.0 || m == 0 || self.mass.is_empty() {
            return;
        }
        if m <= REPEAT_LIMIT {
            for _ in 0..m {
                self.push(q);
            }
            return;
        }
        let k = self.mass.len();
        let block = binomial_lower_pmf(m, q, k);
        let mut next = vec![0.0; k];
        for (c, slot) in next.iter_mut().enumerate() {
            *slot = neumaier_sum((0..=c).map(|a| self.mass[a] * block[c - a]));
        }
        self.mass = next;
    }

    /// `P(S < k)`.
    pub fn probability(&self) -> f64 {
        neumaier_sum(self.mass.iter().copied()).min(1.0)
    }

    /// `P(S = c)` for `c < k`.
    pub fn masses(&self) -> &[f64] {
        &self.mass
    }
}

/// `P(Bin(m, q) = c)` for `c < k`, each term evaluated in log space.
fn binomial_lower_pmf(m: u64, q: f64, k: usize) -> Vec<f64> {
    if q >= 1.0 {
        return (0..k).map(|c| f64::from(c as u64 == m)).collect();
    }
    let (ln_q, ln_keep) = (q.ln(), (-q).ln_1p());
    let mut ln_choose = 0.0;
    (0..k)
        .map(|c| {
            let c = c as u64;
            if c > m {
                return 0.0;
            }
            if c > 0 {
                ln_choose += ((m - c + 1) as f64).ln() - (c as f64).ln();
            }
            (ln_choose + c as f64 * ln_q + (m - c) as f64 * ln_keep).exp()
        })
        .collect()
}

/// `P(sum of independent Bernoulli(probs) < k)`.
pub fn poisson_binomial_fewer_than(probs: &[f64], k: u32) -> f64 {
    let mut acc = FewerThan::new(k);
    for &q in probs {
        acc.push(q);
    }
    acc.probability()
}

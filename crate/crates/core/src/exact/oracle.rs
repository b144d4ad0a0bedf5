use super::{ExactError, ExactQuery};
use crate::distribution::TailDistribution;
use crate::lattice::Site;

/// Largest `(cap + 2)^candidates` the oracle will walk.
const MAX_LOG2_STATES: f64 = 30.0;

struct Candidate {
    coords: [i64; 2],
    activation: f64,
}

/// Brute-force `P(site has fewer than k covers)`.
///
/// Every candidate source `s <= site` is either closed or open with a
/// radius in `0..=radius_cap`, drawn from the law truncated at the cap; the
/// walk sums the weight of every joint assignment, checking block
/// containment directly. Nothing here uses survival products or shell
/// multiplicities, so it is an independent check on the closed forms.
///
/// The cap must be lossless for the query: either it is at least the
/// largest displacement that matters, or the law puts no mass above it.
pub fn enumeration_oracle(q: &ExactQuery, radius_cap: u64) -> Result<f64, ExactError> {
    q.validate()?;
    let target: [i64; 2] = match q.site {
        Site::Line(i) => [i, 0],
        Site::Grid(i, j) => [i, j],
    };
    let two_d = matches!(q.site, Site::Grid(..));

    let mut candidates = Vec::new();
    for a in 1..=target[0] {
        if two_d {
            for b in 1..=target[1] {
                candidates.push(Candidate { coords: [a, b], activation: q.p });
            }
        } else {
            candidates.push(Candidate { coords: [a, 0], activation: q.p });
        }
    }
    if q.include_initiators {
        for c in [-1, 0] {
            candidates.push(Candidate { coords: [c, if two_d { c } else { 0 }], activation: 1.0 });
        }
    }

    let needed = candidates.iter().map(|c| (target[0] - c.coords[0]).max(target[1] - c.coords[1])).max().unwrap_or(0) as u64;
    if radius_cap < needed && q.dist.tail(radius_cap + 1) > 0.0 {
        return Err(ExactError::LossyTruncation { cap: radius_cap, needed });
    }
    let states = radius_cap.saturating_add(2);
    if candidates.len() as f64 * (states as f64).log2() > MAX_LOG2_STATES {
        return Err(ExactError::EnumerationBound { candidates: candidates.len(), states });
    }

    let law = TailDistribution::truncated(q.dist.clone(), radius_cap);
    let radius_mass: Vec<f64> = (0..=radius_cap).map(|r| law.mass(r)).collect();
    let walk = Walk { candidates: &candidates, target, radius_mass: &radius_mass, k: q.k };
    Ok(walk.visit(0, 0, 1.0))
}

struct Walk<'a> {
    candidates: &'a [Candidate],
    target: [i64; 2],
    radius_mass: &'a [f64],
    k: u32,
}

impl Walk<'_> {
    fn covers(&self, source: [i64; 2], radius: i64) -> bool {
        (0..2).all(|d| source[d] <= self.target[d] && self.target[d] <= source[d] + radius)
    }

    /// Probability mass of under-covered completions below this node.
    fn visit(&self, idx: usize, covers: u32, weight: f64) -> f64 {
        if covers >= self.k || weight == 0.0 {
            // The remaining candidates' weights sum to one either way.
            return 0.0;
        }
        let Some(c) = self.candidates.get(idx) else {
            return weight;
        };
        let mut total = self.visit(idx + 1, covers, weight * (1.0 - c.activation));
        for (r, &m) in self.radius_mass.iter().enumerate() {
            let hit = self.covers(c.coords, r as i64) as u32;
            total += self.visit(idx + 1, covers + hit, weight * c.activation * m);
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::super::{undercovered_prob_1d, undercovered_prob_2d_exact};
    use super::*;

    #[test]
    fn grid_worked_example() {
        let q = ExactQuery::new(Site::Grid(2, 2), 0.5, 2, TailDistribution::constant(1));
        assert_eq!(enumeration_oracle(&q, 1).unwrap(), 0.3125);
    }

    #[test]
    fn certain_cover() {
        let q = ExactQuery::new(Site::Line(4), 1.0, 1, TailDistribution::constant(9));
        assert_eq!(enumeration_oracle(&q, 9).unwrap(), 0.0);
    }

    #[test]
    fn matches_line_dp_with_initiators() {
        for i in 1..=6 {
            for k in 1..=3 {
                let mut q = ExactQuery::new(Site::Line(i), 0.4, k, TailDistribution::truncated(TailDistribution::pareto(1.5).unwrap(), 5));
                q.include_initiators = true;
                let a = enumeration_oracle(&q, 5).unwrap();
                let b = undercovered_prob_1d(&q).unwrap();
                assert!((a - b).abs() < 1e-12, "i={i} k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn grid_geometric_three_by_three() {
        let q = ExactQuery::new(Site::Grid(3, 3), 0.3, 2, TailDistribution::geometric(0.5).unwrap());
        let oracle = enumeration_oracle(&q, 2).unwrap();
        let dp = undercovered_prob_2d_exact(&q).unwrap();
        assert!((oracle - dp).abs() < 1e-12, "{oracle} vs {dp}");
        // 2818114048387 / 4096000000000, from exact rational enumeration of
        // the nine independent cover events.
        assert!((oracle - 0.688_016_125_094_482_4).abs() < 1e-12, "{oracle}");
    }

    #[test]
    fn lossy_and_oversized_queries_are_rejected() {
        let q = ExactQuery::new(Site::Line(6), 0.5, 1, TailDistribution::geometric(0.5).unwrap());
        assert_eq!(enumeration_oracle(&q, 3), Err(ExactError::LossyTruncation { cap: 3, needed: 5 }));
        let q = ExactQuery::new(Site::Grid(6, 6), 0.5, 1, TailDistribution::constant(1));
        assert!(matches!(enumeration_oracle(&q, 1), Err(ExactError::EnumerationBound { .. })));
    }
}

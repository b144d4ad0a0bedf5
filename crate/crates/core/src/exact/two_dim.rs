use super::{ExactError, ExactQuery, FewerThan, LogProduct};
use crate::lattice::Site;
use crate::stats::NeumaierSum;

/// Number of lattice sites `s <= (i, j)` (with `s >= (1, 1)`) whose largest
/// coordinate gap to `(i, j)` equals `t`. Requires `i >= j >= 1`.
pub fn shell_multiplicity_2d(i: u64, j: u64, t: u64) -> Result<u64, ExactError> {
    if j < 1 || i < j {
        return Err(ExactError::Precondition(format!("shell multiplicity needs i >= j >= 1, got ({i},{j})")));
    }
    Ok(if t < j {
        2 * t + 1
    } else if t < i {
        j
    } else {
        0
    })
}

/// `(max, min)` of the grid site.
fn grid_site(q: &ExactQuery) -> Result<(u64, u64), ExactError> {
    q.validate()?;
    match q.site {
        Site::Grid(i, j) => Ok((i.max(j) as u64, i.min(j) as u64)),
        Site::Line(_) => Err(ExactError::Precondition("expected a grid site".into())),
    }
}

/// `P((i, j) is not covered) = prod_t g_p(t)^{mult(i, j, t)}`. Symmetric in
/// `(i, j)`; the threshold `q.k` is ignored.
pub fn uncovered_prob_2d(q: &ExactQuery) -> Result<f64, ExactError> {
    let (i, j) = grid_site(q)?;
    let mut prod = LogProduct::default();
    for t in 0..i {
        prod.mul_complement(q.p * q.dist.tail(t), shell_multiplicity_2d(i, j, t)?);
    }
    if let Some(init) = q.initiator_probs() {
        for g in init {
            prod.mul_complement(g, 1);
        }
    }
    Ok(prod.value())
}

/// The printed two-cover expression `a_{i,j} (1 + p sum_{t=0}^{i-1} G(t) / g_p(t))`.
///
/// The sum carries no shell multiplicities, so this differs from
/// [`undercovered_prob_2d_exact`] whenever more than one site sits on a
/// shell: at `(2,2)`, `p = 0.5`, radius 1 it gives 0.1875 against the true
/// 0.3125.
pub fn undercovered_prob_2d_paper(q: &ExactQuery) -> Result<f64, ExactError> {
    let (i, _) = grid_site(q)?;
    if q.k != 2 {
        return Err(ExactError::Precondition(format!("the printed formula is for k = 2, got k = {}", q.k)));
    }
    if q.include_initiators {
        return Err(ExactError::Precondition("the printed formula has no initiators".into()));
    }
    let mut sum = NeumaierSum::default();
    for t in 0..i {
        let g = q.dist.survival_complement(q.p, t);
        if g == 0.0 {
            return Err(ExactError::DivisionByZero { t });
        }
        sum.add(q.dist.tail(t) / g);
    }
    let a = uncovered_prob_2d(q)?;
    Ok(a * (1.0 + q.p * sum.value()))
}

/// `P((i, j) has fewer than k covers)` by the Poisson-binomial recursion
/// over shells, each shell entering `mult(i, j, t)` times with `p G(t)`.
pub fn undercovered_prob_2d_exact(q: &ExactQuery) -> Result<f64, ExactError> {
    let (i, j) = grid_site(q)?;
    let mut acc = FewerThan::new(q.k);
    for t in 0..i {
        acc.push_repeated(q.p * q.dist.tail(t), shell_multiplicity_2d(i, j, t)?);
    }
    if let Some(init) = q.initiator_probs() {
        for g in init {
            acc.push(g);
        }
    }
    Ok(acc.probability())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::TailDistribution;
    use proptest::prelude::*;

    fn grid(i: i64, j: i64, p: f64, k: u32, dist: TailDistribution) -> ExactQuery {
        ExactQuery::new(Site::Grid(i, j), p, k, dist)
    }

    /// Counts sites by direct enumeration of the rectangle.
    fn brute_multiplicity(i: u64, j: u64, t: u64) -> u64 {
        (1..=i).flat_map(|a| (1..=j).map(move |b| (a, b))).filter(|&(a, b)| (i - a).max(j - b) == t).count() as u64
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(shell_multiplicity_2d(2, 2, 0).unwrap(), 1);
        assert_eq!(shell_multiplicity_2d(2, 2, 1).unwrap(), 3);
        assert_eq!(shell_multiplicity_2d(5, 2, 3).unwrap(), 2);
        assert!(shell_multiplicity_2d(2, 5, 0).is_err());
        for i in 1..12 {
            for j in 1..=i {
                for t in 0..14 {
                    assert_eq!(shell_multiplicity_2d(i, j, t).unwrap(), brute_multiplicity(i, j, t));
                }
            }
        }
    }

    #[test]
    fn worked_example_three_ways() {
        let q = grid(2, 2, 0.5, 2, TailDistribution::constant(1));
        assert_eq!(uncovered_prob_2d(&q).unwrap(), 0.0625);
        assert_eq!(undercovered_prob_2d_paper(&q).unwrap(), 0.1875);
        assert_eq!(undercovered_prob_2d_exact(&q).unwrap(), 0.3125);
    }

    #[test]
    fn degenerate_p() {
        let d = TailDistribution::pareto(3.0).unwrap();
        assert_eq!(uncovered_prob_2d(&grid(4, 7, 0.0, 1, d.clone())).unwrap(), 1.0);
        assert_eq!(undercovered_prob_2d_paper(&grid(4, 7, 0.0, 2, d.clone())).unwrap(), 1.0);
        assert_eq!(undercovered_prob_2d_exact(&grid(4, 7, 0.0, 3, d)).unwrap(), 1.0);
    }

    #[test]
    fn paper_formula_single_source_case() {
        // (1,1): one candidate, so two covers are impossible.
        for p in [0.1, 0.5, 0.9] {
            let q = grid(1, 1, p, 2, TailDistribution::geometric(0.4).unwrap());
            assert!((undercovered_prob_2d_paper(&q).unwrap() - 1.0).abs() < 1e-15);
            assert_eq!(undercovered_prob_2d_exact(&q).unwrap(), 1.0);
        }
    }

    #[test]
    fn paper_formula_division_by_zero() {
        let q = grid(3, 2, 1.0, 2, TailDistribution::constant(4));
        assert_eq!(undercovered_prob_2d_paper(&q), Err(ExactError::DivisionByZero { t: 0 }));
    }

    proptest! {
        #[test]
        fn symmetric_and_k1_consistent(i in 1i64..60, j in 1i64..60, p in 0.0f64..=1.0, alpha in 0.5f64..5.0) {
            let d = TailDistribution::pareto(alpha).unwrap();
            let a = uncovered_prob_2d(&grid(i, j, p, 1, d.clone())).unwrap();
            prop_assert_eq!(a, uncovered_prob_2d(&grid(j, i, p, 1, d.clone())).unwrap());
            let e = undercovered_prob_2d_exact(&grid(i, j, p, 1, d.clone())).unwrap();
            prop_assert!((a - e).abs() <= 1e-12);
            let e2 = undercovered_prob_2d_exact(&grid(i, j, p, 2, d.clone())).unwrap();
            prop_assert_eq!(e2, undercovered_prob_2d_exact(&grid(j, i, p, 2, d)).unwrap());
            prop_assert!(e <= e2 + 1e-15 && e2 <= 1.0);
        }

        #[test]
        fn monotone_in_p_and_site(i in 1i64..40, j in 1i64..40, p in 0.0f64..0.9, dp in 0.0f64..0.1, k in 1u32..4) {
            let d = TailDistribution::geometric(0.7).unwrap();
            let base = undercovered_prob_2d_exact(&grid(i, j, p, k, d.clone())).unwrap();
            prop_assert!(undercovered_prob_2d_exact(&grid(i, j, p + dp, k, d.clone())).unwrap() <= base + 1e-12);
            prop_assert!(undercovered_prob_2d_exact(&grid(i + 1, j, p, k, d.clone())).unwrap() <= base + 1e-12);
            prop_assert!(undercovered_prob_2d_exact(&grid(i, j + 1, p, k, d.clone())).unwrap() <= base + 1e-12);
            prop_assert!(undercovered_prob_2d_exact(&grid(i, j, p, k + 1, d)).unwrap() >= base - 1e-12);
        }
    }
}

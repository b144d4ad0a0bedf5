use super::{ExactError, ExactQuery, FewerThan, LogProduct};
use crate::lattice::Site;
use crate::stats::NeumaierSum;

fn line_site(q: &ExactQuery) -> Result<u64, ExactError> {
    q.validate()?;
    match q.site {
        Site::Line(i) => Ok(i as u64),
        Site::Grid(..) => Err(ExactError::Precondition("expected a site on the line".into())),
    }
}

/// `P(i is not covered) = prod_{l=0}^{i-1} g_p(l)`, evaluated in log space.
/// The threshold `q.k` is ignored. With initiators the two extra factors
/// `1 - G(i+1)` and `1 - G(i)` are included.
pub fn uncovered_prob_1d(q: &ExactQuery) -> Result<f64, ExactError> {
    let i = line_site(q)?;
    let mut prod = LogProduct::default();
    for l in 0..i {
        prod.mul_complement(q.p * q.dist.tail(l), 1);
    }
    if let Some(init) = q.initiator_probs() {
        for g in init {
            prod.mul_complement(g, 1);
        }
    }
    Ok(prod.value())
}

/// `P(i has fewer than k covers)` via the Poisson-binomial recursion over
/// `p G(0), ..., p G(i-1)`, plus `G(i+1)` and `G(i)` for the initiators.
pub fn undercovered_prob_1d(q: &ExactQuery) -> Result<f64, ExactError> {
    let i = line_site(q)?;
    let mut acc = FewerThan::new(q.k);
    for l in 0..i {
        acc.push(q.p * q.dist.tail(l));
    }
    if let Some(init) = q.initiator_probs() {
        for g in init {
            acc.push(g);
        }
    }
    Ok(acc.probability())
}

/// The explicit expansion for `k = 1` and `k = 2`:
///
/// `P(B_i) = P(A_i) + p prod_{l=1}^{i-1} g_p(l)
///         + p (1-p) sum_{m=1}^{i-1} G(m) prod_{l != m, 1 <= l <= i-1} g_p(l)`.
pub fn undercovered_prob_1d_closed_form(q: &ExactQuery) -> Result<f64, ExactError> {
    let i = line_site(q)? as usize;
    if q.include_initiators {
        return Err(ExactError::Precondition("the closed form covers the lattice without initiators".into()));
    }
    let uncovered = uncovered_prob_1d(q)?;
    match q.k {
        1 => return Ok(uncovered),
        2 => {}
        k => return Err(ExactError::Precondition(format!("no closed form for k = {k}"))),
    }
    let p = q.p;
    // g[l] for l = 1..=i-1, stored at index l - 1.
    let g: Vec<f64> = (1..i as u64).map(|l| q.dist.survival_complement(p, l)).collect();
    let m = g.len();
    let mut prefix = vec![1.0; m + 1];
    let mut suffix = vec![1.0; m + 1];
    for l in 0..m {
        prefix[l + 1] = prefix[l] * g[l];
        suffix[m - 1 - l] = suffix[m - l] * g[m - 1 - l];
    }
    let mut sum = NeumaierSum::default();
    sum.add(uncovered);
    sum.add(p * prefix[m]);
    let mut inner = NeumaierSum::default();
    for idx in 0..m {
        let tail = q.dist.tail(idx as u64 + 1);
        inner.add(tail * prefix[idx] * suffix[idx + 1]);
    }
    sum.add(p * (1.0 - p) * inner.value());
    Ok(sum.value().min(1.0))
}

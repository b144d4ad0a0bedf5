use super::{CoverageField, Dimension, FieldKind, Realization, CLOSED};

/// Membership indicator of the reverse-firework region at threshold `k`.
///
/// A reported point `x` is marked when some open `i >= x` has `x` in its
/// listening block `i + [-rho_i, 0]^d` and that block holds at least `k`
/// open sites other than `i` (initiators count as open). With `k = 0` this
/// is plain reverse coverage.
///
/// Sources anywhere in the cushioned window are considered; sources beyond
/// it are missing, so membership near the right edge is biased downward.
pub fn reverse_membership(realization: &Realization, k: u32) -> CoverageField {
    match realization.config().dimension {
        Dimension::One => line(realization, k),
        Dimension::Two => grid(realization, k),
    }
}

fn line(realization: &Realization, k: u32) -> CoverageField {
    let config = realization.config();
    let n = config.n as i64;
    let origin = config.origin();
    let extent = realization.extent();
    let raw = realization.raw();
    let initiators = realization.initiator_radii();
    let len = (n - origin + 1) as usize;

    // prefix[x] = open lattice sites in 1..=x
    let mut prefix = vec![0u32; extent + 1];
    for (ix, &r) in raw.iter().enumerate() {
        prefix[ix + 1] = prefix[ix] + u32::from(r != CLOSED);
    }

    let mut diff = vec![0i64; len + 1];
    let mut mark = |lo: i64, hi: i64| {
        diff[(lo - origin) as usize] += 1;
        diff[(hi - origin + 1) as usize] -= 1;
    };
    let initiators_in = |lo: i64, exclude: i64| -> u32 {
        if initiators.is_none() {
            return 0;
        }
        [-1i64, 0].into_iter().filter(|&c| c != exclude && lo <= c).count() as u32
    };

    for (ix, &r) in raw.iter().enumerate() {
        if r == CLOSED {
            continue;
        }
        let i = ix as i64 + 1;
        let lo = i - r as i64;
        let (mark_lo, mark_hi) = (lo.max(origin), i.min(n));
        if mark_lo > mark_hi {
            continue;
        }
        let lattice = prefix[ix + 1] - prefix[(lo.max(1) - 1) as usize] - 1;
        if lattice + initiators_in(lo, i) >= k {
            mark(mark_lo, mark_hi);
        }
    }
    // The initiator at 0 can only mark the origin; the one at -1 marks nothing.
    if let Some([_, r_zero]) = initiators {
        if initiators_in(-(r_zero as i64), 0) >= k {
            mark(0, 0);
        }
    }

    let mut acc = 0i64;
    let values = diff[..len]
        .iter()
        .map(|d| {
            acc += d;
            u32::from(acc > 0)
        })
        .collect();
    CoverageField::new(Dimension::One, origin, len, FieldKind::Membership { k }, values)
}

fn grid(realization: &Realization, k: u32) -> CoverageField {
    let config = realization.config();
    let n = config.n as i64;
    let origin = config.origin();
    let extent = realization.extent();
    let raw = realization.raw();
    let initiators = realization.initiator_radii();
    let len = (n - origin + 1) as usize;

    // prefix[a * w + b] = open lattice sites in [1..=a] x [1..=b]
    let w = extent + 1;
    let mut prefix = vec![0u32; w * w];
    for a in 1..=extent {
        let mut row_count = 0u32;
        for b in 1..=extent {
            row_count += u32::from(raw[(a - 1) * extent + (b - 1)] != CLOSED);
            prefix[a * w + b] = prefix[(a - 1) * w + b] + row_count;
        }
    }
    let rect = |a0: usize, b0: usize, a1: usize, b1: usize| -> u32 {
        prefix[a1 * w + b1] + prefix[(a0 - 1) * w + (b0 - 1)] - prefix[(a0 - 1) * w + b1] - prefix[a1 * w + (b0 - 1)]
    };
    let initiators_in = |lo_a: i64, lo_b: i64, exclude: i64| -> u32 {
        if initiators.is_none() {
            return 0;
        }
        [-1i64, 0].into_iter().filter(|&c| c != exclude && lo_a <= c && lo_b <= c).count() as u32
    };

    let dw = len + 1;
    let mut diff = vec![0i64; dw * dw];
    let mut mark = |a0: i64, b0: i64, a1: i64, b1: i64| {
        let (a0, b0, a1, b1) = ((a0 - origin) as usize, (b0 - origin) as usize, (a1 - origin) as usize, (b1 - origin) as usize);
        diff[a0 * dw + b0] += 1;
        diff[a0 * dw + b1 + 1] -= 1;
        diff[(a1 + 1) * dw + b0] -= 1;
        diff[(a1 + 1) * dw + b1 + 1] += 1;
    };

    for a in 1..=extent {
        let ai = a as i64;
        for b in 1..=extent {
            let r = raw[(a - 1) * extent + (b - 1)];
            if r == CLOSED {
                continue;
            }
            let bi = b as i64;
            let (lo_a, lo_b) = (ai - r as i64, bi - r as i64);
            let (ma0, ma1) = (lo_a.max(origin), ai.min(n));
            let (mb0, mb1) = (lo_b.max(origin), bi.min(n));
            if ma0 > ma1 || mb0 > mb1 {
                continue;
            }
            let lattice = rect(lo_a.max(1) as usize, lo_b.max(1) as usize, a, b) - 1;
            // `i` is a lattice site here, so neither initiator is excluded.
            if lattice + initiators_in(lo_a, lo_b, i64::MIN) >= k {
                mark(ma0, mb0, ma1, mb1);
            }
        }
    }
    if let Some([_, r_zero]) = initiators {
        let lo = -(r_zero as i64);
        if initiators_in(lo, lo, 0) >= k {
            mark(0, 0, 0, 0);
        }
    }

    for a in 0..len {
        for b in 0..len {
            let up = if a > 0 { diff[(a - 1) * dw + b] } else { 0 };
            let left = if b > 0 { diff[a * dw + b - 1] } else { 0 };
            let diag = if a > 0 && b > 0 { diff[(a - 1) * dw + b - 1] } else { 0 };
            diff[a * dw + b] += up + left - diag;
        }
    }
    let mut values = Vec::with_capacity(len * len);
    for a in 0..len {
        values.extend(diff[a * dw..a * dw + len].iter().map(|&v| u32::from(v > 0)));
    }
    CoverageField::new(Dimension::Two, origin, len, FieldKind::Membership { k }, values)
}

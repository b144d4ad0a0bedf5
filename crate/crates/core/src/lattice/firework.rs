use super::{CoverageField, Dimension, FieldKind, Realization, CLOSED};

/// Counts, for every reported site `x`, the open sources `s <= x` whose
/// block `s + [0, rho_s]^d` contains `x`. Initiators at `-1` and `0` are
/// included when the realization has them.
///
/// Each block is clamped to the window and added to a difference array
/// (inclusion-exclusion corners in 2D), so the cost is linear in the
/// window regardless of radii.
pub fn firework_counts(realization: &Realization) -> CoverageField {
    let n = realization.config().n as usize;
    let extent = realization.extent();
    let raw = realization.raw();
    // Initiator blocks, translated onto the reported window 1..=n.
    let initiator_hi: Vec<usize> = realization
        .initiator_radii()
        .map(|[r_minus, r_zero]| {
            [r_minus as i64 - 1, r_zero as i64].into_iter().filter(|&hi| hi >= 1).map(|hi| (hi as usize).min(n)).collect()
        })
        .unwrap_or_default();

    match realization.config().dimension {
        Dimension::One => {
            let mut diff = vec![0i64; n + 2];
            for (ix, &r) in raw.iter().enumerate().take(n) {
                if r == CLOSED {
                    continue;
                }
                let s = ix + 1;
                let hi = (s + r as usize).min(n);
                diff[s] += 1;
                diff[hi + 1] -= 1;
            }
            for hi in initiator_hi {
                diff[1] += 1;
                diff[hi + 1] -= 1;
            }
            let mut acc = 0i64;
            let values = (1..=n)
                .map(|x| {
                    acc += diff[x];
                    acc as u32
                })
                .collect();
            CoverageField::new(Dimension::One, 1, n, FieldKind::Counts, values)
        }
        Dimension::Two => {
            let w = n + 2;
            let mut diff = vec![0i64; w * w];
            let mut add_block = |a0: usize, b0: usize, a1: usize, b1: usize| {
                diff[a0 * w + b0] += 1;
                diff[a0 * w + b1 + 1] -= 1;
                diff[(a1 + 1) * w + b0] -= 1;
                diff[(a1 + 1) * w + b1 + 1] += 1;
            };
            for a in 1..=n {
                let row = &raw[(a - 1) * extent..(a - 1) * extent + n];
                for (bx, &r) in row.iter().enumerate() {
                    if r == CLOSED {
                        continue;
                    }
                    let b = bx + 1;
                    let r = r as usize;
                    add_block(a, b, (a + r).min(n), (b + r).min(n));
                }
            }
            for hi in initiator_hi {
                add_block(1, 1, hi, hi);
            }
            // 2D prefix sum in place.
            for a in 1..=n + 1 {
                for b in 1..=n + 1 {
                    diff[a * w + b] += diff[(a - 1) * w + b] + diff[a * w + b - 1] - diff[(a - 1) * w + b - 1];
                }
            }
            let mut values = Vec::with_capacity(n * n);
            for a in 1..=n {
                values.extend(diff[a * w + 1..a * w + n + 1].iter().map(|&v| v as u32));
            }
            CoverageField::new(Dimension::Two, 1, n, FieldKind::Counts, values)
        }
    }
}

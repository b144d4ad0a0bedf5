use serde::{Deserialize, Serialize};

use super::{Dimension, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    /// Number of distinct open sources covering each site.
    Counts,
    /// 0/1 indicator of the reverse region built at threshold `k`.
    Membership { k: u32 },
}

/// Per-site values over the reported window `origin..=n` on every axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageField {
    dimension: Dimension,
    origin: i64,
    len: usize,
    kind: FieldKind,
    values: Vec<u32>,
}

/// A subset of the reported window to summarise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Sites with every coordinate in `from..=n`.
    Window { from: i64 },
    /// Grid sites `(t, t)` with `t` in `from..=n`; on the line, same as `Window`.
    Diagonal { from: i64 },
}

impl CoverageField {
    pub(crate) fn new(dimension: Dimension, origin: i64, len: usize, kind: FieldKind, values: Vec<u32>) -> Self {
        debug_assert_eq!(values.len(), len.pow(dimension.get() as u32));
        CoverageField { dimension, origin, len, kind, values }
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// Lowest reported coordinate.
    pub fn origin(&self) -> i64 {
        self.origin
    }

    /// Highest reported coordinate.
    pub fn last(&self) -> i64 {
        self.origin + self.len as i64 - 1
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    fn offset(&self, c: i64) -> Option<usize> {
        let off = c - self.origin;
        (off >= 0 && (off as usize) < self.len).then_some(off as usize)
    }

    fn index(&self, site: Site) -> Option<usize> {
        match (self.dimension, site) {
            (Dimension::One, Site::Line(x)) => self.offset(x),
            (Dimension::Two, Site::Grid(i, j)) => Some(self.offset(i)? * self.len + self.offset(j)?),
            _ => None,
        }
    }

    pub fn get(&self, site: Site) -> Option<u32> {
        self.index(site).map(|ix| self.values[ix])
    }

    fn deficient_value(&self, v: u32, k: u32) -> bool {
        match self.kind {
            FieldKind::Counts => v < k,
            FieldKind::Membership { .. } => v == 0,
        }
    }

    /// Whether `site` has fewer than `k` covers. Membership fields already
    /// encode their threshold, so `k` is ignored for them.
    pub fn under_covered(&self, site: Site, k: u32) -> Option<bool> {
        self.get(site).map(|v| self.deficient_value(v, k))
    }

    /// Fraction of sites in `region` with fewer than `k` covers.
    pub fn deficient_fraction(&self, k: u32, region: Region) -> f64 {
        let (deficient, total) = self.deficient_tally(k, region);
        if total == 0 {
            0.0
        } else {
            deficient as f64 / total as f64
        }
    }

    /// `(deficient sites, sites)` within `region`.
    pub fn deficient_tally(&self, k: u32, region: Region) -> (u64, u64) {
        let (from, diagonal) = match region {
            Region::Window { from } => (from, false),
            Region::Diagonal { from } => (from, true),
        };
        let start = (from.max(self.origin) - self.origin) as usize;
        if start >= self.len {
            return (0, 0);
        }
        let mut deficient = 0u64;
        let mut total = 0u64;
        match self.dimension {
            Dimension::One => {
                for &v in &self.values[start..] {
                    total += 1;
                    deficient += self.deficient_value(v, k) as u64;
                }
            }
            Dimension::Two if diagonal => {
                for t in start..self.len {
                    total += 1;
                    deficient += self.deficient_value(self.values[t * self.len + t], k) as u64;
                }
            }
            Dimension::Two => {
                for a in start..self.len {
                    for &v in &self.values[a * self.len + start..(a + 1) * self.len] {
                        total += 1;
                        deficient += self.deficient_value(v, k) as u64;
                    }
                }
            }
        }
        (deficient, total)
    }
}

/// Finite-window witness for the absence of an eventually covered ray.
///
/// On the line: the largest reported `x >= 1` with fewer than `k` covers.
/// On the grid: the largest `m` such that some deficient site has
/// `min(i, j) = m` (so every site with both coordinates above `m` is
/// covered). `None` when every scanned site is covered.
///
/// Sites past the window are never inspected, so a returned value is only
/// a lower bound on the true last deficient coordinate.
pub fn last_under_covered(field: &CoverageField, k: u32) -> Option<i64> {
    let start = (1 - field.origin).max(0) as usize;
    match field.dimension {
        Dimension::One => (start..field.len).rev().find(|&ix| field.deficient_value(field.values[ix], k)).map(|ix| field.origin + ix as i64),
        Dimension::Two => {
            let n = field.len;
            // Scan L-shaped shells from the outside in; shell m holds the
            // sites whose smaller coordinate offset equals m.
            for m in (start..n).rev() {
                let row = (m..n).any(|b| field.deficient_value(field.values[m * n + b], k));
                let col = (m..n).any(|a| field.deficient_value(field.values[a * n + m], k));
                if row || col {
                    return Some(field.origin + m as i64);
                }
            }
            None
        }
    }
}

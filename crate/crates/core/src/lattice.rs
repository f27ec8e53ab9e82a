//! Finite boxes in ℤ or ℤ², with a row-major flat index.
//!
//! Coordinates are always stored as `[i64; 2]`; on a one-dimensional box the
//! second component is identically zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Coord = [i64; 2];

/// Axis-aligned box of lattice sites. Truncation is Dirichlet: sites outside
/// the box simply do not exist as far as any operator is concerned.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeBox {
    dim: usize,
    lo: [i64; 2],
    len: [usize; 2],
}

impl LatticeBox {
    /// Sites `lo..=hi` on each axis.
    pub fn new(ranges: &[(i64, i64)]) -> Result<Self> {
        if ranges.is_empty() || ranges.len() > 2 {
            return Err(Error::UnsupportedDimension(ranges.len()));
        }
        let mut lo = [0; 2];
        let mut len = [1; 2];
        for (axis, &(l, h)) in ranges.iter().enumerate() {
            if h < l {
                return Err(Error::EmptyRange { axis, lo: l, hi: h });
            }
            lo[axis] = l;
            len[axis] = (h - l + 1) as usize;
        }
        Ok(Self {
            dim: ranges.len(),
            lo,
            len,
        })
    }

    pub fn line(lo: i64, hi: i64) -> Result<Self> {
        Self::new(&[(lo, hi)])
    }

    /// `n` sites on ℤ centred on the origin: `-(n/2) ..= n - 1 - n/2`.
    pub fn centered_line(n: usize) -> Result<Self> {
        let lo = -((n / 2) as i64);
        Self::line(lo, lo + n as i64 - 1)
    }

    /// Half-line box `1..=n`.
    pub fn half_line(n: usize) -> Result<Self> {
        Self::line(1, n as i64)
    }

    /// `n × m` sites on ℤ² centred on the origin.
    pub fn centered_rect(n: usize, m: usize) -> Result<Self> {
        let lx = -((n / 2) as i64);
        let ly = -((m / 2) as i64);
        Self::new(&[(lx, lx + n as i64 - 1), (ly, ly + m as i64 - 1)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.len[0] * self.len[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axis_len(&self, axis: usize) -> usize {
        self.len[axis]
    }

    pub fn axis_range(&self, axis: usize) -> (i64, i64) {
        (self.lo[axis], self.lo[axis] + self.len[axis] as i64 - 1)
    }

    /// Flat index stride along `axis`; the last axis is contiguous.
    pub fn stride(&self, axis: usize) -> usize {
        if self.dim == 2 && axis == 0 {
            self.len[1]
        } else {
            1
        }
    }

    pub fn coord(&self, index: usize) -> Coord {
        debug_assert!(index < self.len());
        if self.dim == 1 {
            [self.lo[0] + index as i64, 0]
        } else {
            let x = index / self.len[1];
            let y = index % self.len[1];
            [self.lo[0] + x as i64, self.lo[1] + y as i64]
        }
    }

    pub fn index(&self, c: Coord) -> Option<usize> {
        let mut off = [0usize; 2];
        for axis in 0..2 {
            if axis >= self.dim {
                if c[axis] != 0 {
                    return None;
                }
                continue;
            }
            let d = c[axis] - self.lo[axis];
            if d < 0 || d as usize >= self.len[axis] {
                return None;
            }
            off[axis] = d as usize;
        }
        Some(if self.dim == 1 {
            off[0]
        } else {
            off[0] * self.len[1] + off[1]
        })
    }

    pub fn contains(&self, c: Coord) -> bool {
        self.index(c).is_some()
    }

    /// Neighbour of `index` one step along `axis` in direction `forward`,
    /// if it lies in the box.
    pub fn step(&self, index: usize, axis: usize, forward: bool) -> Option<usize> {
        let mut c = self.coord(index);
        c[axis] += if forward { 1 } else { -1 };
        self.index(c)
    }

    /// In-box sites at coordinate distance 1.
    pub fn neighbors(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim).flat_map(move |axis| {
            [false, true]
                .into_iter()
                .filter_map(move |fwd| self.step(index, axis, fwd))
        })
    }

    /// Every in-box edge once, as `(i, j, axis)` with `j` the forward neighbour of `i`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.len()).flat_map(move |i| {
            (0..self.dim).filter_map(move |axis| self.step(i, axis, true).map(|j| (i, j, axis)))
        })
    }

    /// Distance (in layers) from the site to the outside of the box; 0 for
    /// sites missing at least one neighbour.
    pub fn depth(&self, index: usize) -> usize {
        let c = self.coord(index);
        (0..self.dim)
            .map(|axis| {
                let (lo, hi) = self.axis_range(axis);
                (c[axis] - lo).min(hi - c[axis]) as usize
            })
            .min()
            .unwrap_or(0)
    }

    pub fn is_boundary(&self, index: usize) -> bool {
        self.depth(index) == 0
    }

    /// Whether the site has all `2ν` neighbours in the box.
    pub fn is_interior(&self, index: usize) -> bool {
        self.depth(index) >= 1
    }

    /// Sites in the central half of the box along every axis.
    pub fn interior_core(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.in_core(i)).collect()
    }

    pub fn in_core(&self, index: usize) -> bool {
        let c = self.coord(index);
        (0..self.dim).all(|axis| {
            let n = self.len[axis];
            let off = (c[axis] - self.lo[axis]) as usize;
            off >= n / 4 && off < n - n / 4
        })
    }

    /// `|n| = |n_1| + ... + |n_ν|` modulo 2.
    pub fn parity(&self, index: usize) -> usize {
        let c = self.coord(index);
        ((c[0].abs() + c[1].abs()) % 2) as usize
    }

    /// Diagonal of the sign operator `(Wf)_n = (-1)^{|n|} f_n`.
    pub fn w_signs(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| if self.parity(i) == 0 { 1.0 } else { -1.0 })
            .collect()
    }
}

/// Unordered nearest-neighbour pair, stored with `lo < hi` lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub lo: Coord,
    pub hi: Coord,
}

impl Edge {
    pub fn new(p: Coord, q: Coord) -> Result<Self> {
        let dist = (p[0] - q[0]).abs() + (p[1] - q[1]).abs();
        if dist != 1 {
            return Err(Error::NotAnEdge(p, q));
        }
        Ok(if p < q { Self { lo: p, hi: q } } else { Self { lo: q, hi: p } })
    }

    /// Edge `{n, n+1}` on ℤ.
    pub fn line(n: i64) -> Self {
        Self {
            lo: [n, 0],
            hi: [n + 1, 0],
        }
    }

    pub fn ends(&self) -> [Coord; 2] {
        [self.lo, self.hi]
    }
}

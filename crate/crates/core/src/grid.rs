//! Uniform tensor-product grids over a chart's parameter rectangle.
//!
//! Periodic axes place nodes at `min + j h` with `h = extent / n`; bounded
//! axes use the half-cell offset `min + (j + ½) h`, which keeps nodes off
//! chart edges such as the sphere poles. Fields are stored row-major with
//! the second coordinate fastest.

use std::str::FromStr;

use crate::geometry::{frame_at, Domain, GeometryFrame, SurfaceChart};
use crate::{Error, Result};

pub const MIN_NODES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StencilOrder {
    Second,
    Fourth,
}

impl StencilOrder {
    pub fn as_int(self) -> u32 {
        match self {
            StencilOrder::Second => 2,
            StencilOrder::Fourth => 4,
        }
    }

    pub fn from_int(order: u32) -> Result<Self> {
        match order {
            2 => Ok(StencilOrder::Second),
            4 => Ok(StencilOrder::Fourth),
            other => Err(Error::InvalidParameter(format!("stencil order must be 2 or 4, got {other}"))),
        }
    }

    /// Central first-derivative stencil as `(offset, weight·h)`.
    pub fn central(self) -> &'static [(i64, f64)] {
        match self {
            StencilOrder::Second => &[(-1, -0.5), (1, 0.5)],
            StencilOrder::Fourth => &[(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)],
        }
    }

    /// One-sided first-derivative stencil used inside the kinetic factor.
    ///
    /// Its Fourier symbol `s(k)` satisfies `|s(k)|² = k² + O(h^{2p})` for
    /// stencil order `p`, so the composite `A‡A` is a consistent Laplacian
    /// with no doubled zero at the zone edge.
    pub fn forward(self) -> &'static [(i64, f64)] {
        match self {
            StencilOrder::Second => &[(0, -1.0), (1, 1.0)],
            StencilOrder::Fourth => &[(-1, -2.0 / 6.0), (0, -3.0 / 6.0), (1, 1.0), (2, -1.0 / 6.0)],
        }
    }
}

impl FromStr for StencilOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .parse::<u32>()
            .map_err(|_| Error::InvalidParameter(format!("stencil order `{s}` is not an integer")))
            .and_then(Self::from_int)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D {
    pub n: [usize; 2],
    pub h: [f64; 2],
    pub periodic: [bool; 2],
    pub origin: [f64; 2],
    pub order: StencilOrder,
}

impl Grid2D {
    /// Grid with the chart's own periodicity.
    pub fn for_chart(chart: &SurfaceChart, n: [usize; 2], order: StencilOrder) -> Result<Self> {
        let d = chart.domain();
        Self::new(&d, n, d.periodic_flags(), order)
    }

    /// Grid with explicit periodicity, which must agree with the domain's.
    pub fn new(domain: &Domain, n: [usize; 2], periodic: [bool; 2], order: StencilOrder) -> Result<Self> {
        if periodic != domain.periodic_flags() {
            return Err(Error::NonPeriodicMismatch { grid: periodic, chart: domain.periodic_flags() });
        }
        for (axis, &nodes) in n.iter().enumerate() {
            if nodes < MIN_NODES {
                return Err(Error::GridTooCoarse { axis, nodes, min: MIN_NODES });
            }
        }
        let h = [0, 1].map(|a| domain.0[a].extent() / n[a] as f64);
        let origin = [0, 1].map(|a| domain.0[a].min + if periodic[a] { 0.0 } else { 0.5 * h[a] });
        Ok(Grid2D { n, h, periodic, origin, order })
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n[1] + j
    }

    pub fn split(&self, node: usize) -> (usize, usize) {
        (node / self.n[1], node % self.n[1])
    }

    pub fn coordinate(&self, axis: usize, k: usize) -> f64 {
        self.origin[axis] + k as f64 * self.h[axis]
    }

    pub fn coords(&self, node: usize) -> [f64; 2] {
        let (i, j) = self.split(node);
        [self.coordinate(0, i), self.coordinate(1, j)]
    }

    /// Neighbour of `node` displaced by `offset` along `axis`; `None` past a
    /// bounded edge (homogeneous Dirichlet closure).
    pub fn shift(&self, node: usize, axis: usize, offset: i64) -> Option<usize> {
        let (i, j) = self.split(node);
        let k = if axis == 0 { i } else { j } as i64 + offset;
        let n = self.n[axis] as i64;
        let k = if self.periodic[axis] {
            k.rem_euclid(n)
        } else if (0..n).contains(&k) {
            k
        } else {
            return None;
        } as usize;
        Some(if axis == 0 { self.index(k, j) } else { self.index(i, k) })
    }

    /// Geometry at every node, in node order.
    pub fn frames(&self, chart: &SurfaceChart) -> Result<Vec<GeometryFrame>> {
        (0..self.len()).map(|p| frame_at(chart, self.coords(p))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Interval, SurfaceChart};

    #[test]
    fn periodic_nodes_and_wrap() {
        let chart = SurfaceChart::plane(1.0, 2.0).unwrap();
        let g = Grid2D::for_chart(&chart, [8, 10], StencilOrder::Second).unwrap();
        assert_eq!(g.coords(g.index(2, 5)), [0.25, 1.0]);
        assert_eq!(g.shift(g.index(7, 0), 0, 1), Some(g.index(0, 0)));
        assert_eq!(g.shift(g.index(0, 0), 1, -2), Some(g.index(0, 8)));
    }

    #[test]
    fn bounded_axis_is_offset_and_truncated() {
        let chart = SurfaceChart::sphere(1.0).unwrap();
        let g = Grid2D::for_chart(&chart, [8, 8], StencilOrder::Fourth).unwrap();
        let h = std::f64::consts::PI / 8.0;
        assert!((g.coordinate(0, 0) - 0.5 * h).abs() < 1e-15);
        assert_eq!(g.shift(g.index(0, 3), 0, -1), None);
        assert_eq!(g.shift(g.index(7, 3), 0, 1), None);
        assert!(g.frames(&chart).is_ok());
    }

    #[test]
    fn coarse_and_mismatched_grids_are_rejected() {
        let chart = SurfaceChart::torus(2.0, 0.5).unwrap();
        assert_eq!(
            Grid2D::for_chart(&chart, [8, 7], StencilOrder::Second),
            Err(Error::GridTooCoarse { axis: 1, nodes: 7, min: 8 })
        );
        let d = Domain([Interval::periodic(0.0, 1.0), Interval::bounded(0.0, 1.0)]);
        assert!(matches!(
            Grid2D::new(&d, [8, 8], [true, true], StencilOrder::Second),
            Err(Error::NonPeriodicMismatch { .. })
        ));
    }

    #[test]
    fn forward_stencils_are_consistent() {
        for order in [StencilOrder::Second, StencilOrder::Fourth] {
            let stencil = order.forward();
            let sum: f64 = stencil.iter().map(|s| s.1).sum();
            let first: f64 = stencil.iter().map(|s| s.0 as f64 * s.1).sum();
            assert!(sum.abs() < 1e-15);
            assert!((first - 1.0).abs() < 1e-15);
        }
        assert_eq!("4".parse::<StencilOrder>().unwrap(), StencilOrder::Fourth);
        assert!("3".parse::<StencilOrder>().is_err());
    }
}

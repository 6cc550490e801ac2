use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

/// Points must have unit Euclidean norm within this bound.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-12;

/// A finite multiset of unit vectors in `R^ambient_dim` claimed to be a
/// spherical `degree`-design. The claim is checked by [`crate::verify`].
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    ambient_dim: usize,
    degree: u32,
    coords: Vec<f64>,
}

impl Design {
    /// `coords` holds the points row-major, `ambient_dim` values per point.
    pub fn new(ambient_dim: usize, degree: u32, coords: Vec<f64>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::invalid("ambient dimension must be >= 1"));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(ambient_dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not form a non-empty set of {ambient_dim}-vectors",
                coords.len()
            )));
        }
        for (i, p) in coords.chunks_exact(ambient_dim).enumerate() {
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !((norm - 1.0).abs() <= UNIT_NORM_TOLERANCE) {
                return Err(Error::invalid(format!(
                    "point {i} has norm {norm:.17}, not 1 within {UNIT_NORM_TOLERANCE:e}"
                )));
            }
        }
        Ok(Self {
            ambient_dim,
            degree,
            coords,
        })
    }

    pub fn from_points(ambient_dim: usize, degree: u32, points: &[Vec<f64>]) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.len() != ambient_dim) {
            return Err(Error::invalid(format!(
                "point with {} coordinates in a {ambient_dim}-dimensional design",
                p.len()
            )));
        }
        Self::new(ambient_dim, degree, points.concat())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Index `n` of the sphere `S^n` the points live on.
    pub fn sphere_dim(&self) -> usize {
        self.ambient_dim - 1
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.ambient_dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.ambient_dim..(i + 1) * self.ambient_dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.ambient_dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Same points, relabelled with a different claimed degree.
    pub fn with_degree(mut self, degree: u32) -> Self {
        self.degree = degree;
        self
    }
}

/// `S^0 = {+1, -1}`, a design of every degree under the two-point average.
pub fn base_s0(t: u32) -> Design {
    Design::new(1, t, vec![1.0, -1.0]).expect("S^0 points are unit")
}

/// Regular `(t+1)`-gon on the unit circle with rotation `phase`.
pub fn base_s1(t: u32, phase: f64) -> Design {
    let count = t as usize + 1;
    let coords = (0..count)
        .flat_map(|j| {
            let angle = 2.0 * PI * j as f64 / count as f64 + phase;
            [angle.cos(), angle.sin()]
        })
        .collect();
    Design::new(2, t, coords).expect("polygon vertices are unit")
}

/// The product construction: every triple `(x, y, t_k)` yields the point
/// `(sqrt((1 - t_k)/2) x, sqrt((1 + t_k)/2) y)` on `S^(m+n-1)`.
///
/// The output has exactly `K * M * N` points (ordered by `x`, then `y`, then
/// node) and degree `min(X.degree, Y.degree, T.degree)`.
pub fn product(
    x: &Design,
    y: &Design,
    quad: &Quadrature,
    allow_uncertified: bool,
) -> Result<Design> {
    let w = quad.weight();
    if x.ambient_dim() != w.m() as usize || y.ambient_dim() != w.n() as usize {
        return Err(Error::invalid(format!(
            "designs in R^{} x R^{} do not match the quadrature weight (m={}, n={})",
            x.ambient_dim(),
            y.ambient_dim(),
            w.m(),
            w.n()
        )));
    }
    if !quad.is_certified() && !allow_uncertified {
        return Err(Error::UncertifiedQuadrature {
            m: w.m(),
            n: w.n(),
            degree: quad.degree(),
        });
    }
    let degree = x.degree().min(y.degree()).min(quad.degree());
    let dim = x.ambient_dim() + y.ambient_dim();
    let scales: Vec<(f64, f64)> = quad
        .nodes()
        .iter()
        .map(|&t| (((1.0 - t) / 2.0).sqrt(), ((1.0 + t) / 2.0).sqrt()))
        .collect();
    let mut coords = Vec::with_capacity(x.len() * y.len() * scales.len() * dim);
    for xp in x.points() {
        for yp in y.points() {
            for &(sx, sy) in &scales {
                coords.extend(xp.iter().map(|v| v * sx));
                coords.extend(yp.iter().map(|v| v * sy));
            }
        }
    }
    Design::new(dim, degree, coords)
}

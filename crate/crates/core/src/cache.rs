//! On-disk cache of certified quadratures keyed by `(m, n, t, tolerance exponent)`.

use std::path::{Path, PathBuf};

use crate::construct::QuadratureSource;
use crate::error::Result;
use crate::exact_moments::JacobiWeight;
use crate::formats::{quadrature_from_json, quadrature_to_json, write_atomic};
use crate::quadrature::{certify, solve_equal_weight, Quadrature, QuadratureReport, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CacheKey {
    pub m: u32,
    pub n: u32,
    pub degree: u32,
    /// Decimal exponent of the tolerance, e.g. -12 for 1e-12 and 5e-13 -> -13.
    pub tolerance_exponent: i32,
}

impl CacheKey {
    pub fn file_name(&self) -> String {
        format!(
            "quad_m{}_n{}_t{}_tol1e{}.json",
            self.m, self.n, self.degree, self.tolerance_exponent
        )
    }
}

pub fn cache_key(w: JacobiWeight, degree: u32, tolerance: f64) -> CacheKey {
    CacheKey {
        m: w.m(),
        n: w.n(),
        degree,
        tolerance_exponent: decimal_exponent(tolerance),
    }
}

fn decimal_exponent(x: f64) -> i32 {
    let text = format!("{x:e}");
    text.split_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0)
}

#[derive(Debug, Clone)]
pub struct QuadratureCache {
    dir: PathBuf,
}

impl QuadratureCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    /// Returns the cached rule only if it parses, matches the key and
    /// re-certifies at `tolerance`. Anything else is a miss.
    pub fn lookup(&self, w: JacobiWeight, degree: u32, tolerance: f64) -> Option<Quadrature> {
        let key = cache_key(w, degree, tolerance);
        let path = self.path(&key);
        let text = match std::fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                log::warn!("ignoring unreadable cache entry {}: {e}", path.display());
                return None;
            }
        };
        let mut q = match quadrature_from_json(&text, &path.display().to_string()) {
            Ok(q) => q,
            Err(e) => {
                log::warn!("ignoring corrupt cache entry {}: {e}", path.display());
                return None;
            }
        };
        if q.weight() != w || q.degree() != degree {
            log::warn!("ignoring mismatched cache entry {}", path.display());
            return None;
        }
        if !certify(&mut q, tolerance).certified {
            log::warn!("ignoring uncertified cache entry {}", path.display());
            return None;
        }
        Some(q)
    }

    /// Stores a certified rule; uncertified rules are not cached.
    pub fn store(&self, q: &Quadrature) -> Result<Option<PathBuf>> {
        if !q.is_certified() {
            return Ok(None);
        }
        std::fs::create_dir_all(&self.dir).map_err(|e| crate::Error::io(&self.dir, e))?;
        let key = cache_key(q.weight(), q.degree(), q.tolerance());
        let path = self.path(&key);
        write_atomic(&path, &quadrature_to_json(q, true))?;
        Ok(Some(path))
    }
}

/// Cache-first quadrature source; solved rules are written back.
#[derive(Debug, Clone)]
pub struct CachedSolve {
    pub cache: Option<QuadratureCache>,
    pub options: SolverOptions,
}

impl QuadratureSource for CachedSolve {
    fn quadrature(&mut self, w: JacobiWeight, t: u32) -> Result<(Quadrature, QuadratureReport)> {
        if let Some(cache) = &self.cache {
            if let Some(mut q) = cache.lookup(w, t, self.options.tolerance) {
                let report = certify(&mut q, self.options.tolerance);
                return Ok((q, report));
            }
        }
        let (q, report) = solve_equal_weight(w, t, &self.options)?;
        if let Some(cache) = &self.cache {
            if let Err(e) = cache.store(&q) {
                log::warn!("could not write quadrature cache: {e}");
            }
        }
        Ok((q, report))
    }
}

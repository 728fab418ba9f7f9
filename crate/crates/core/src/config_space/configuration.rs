use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use super::{ConfigError, Domain};
use crate::scalar::Scalar;

/// A finite multiset of points in `ℝ^d`.
///
/// Points are kept in lexicographic order so that equality and hashing do
/// not depend on insertion order. Coordinates compare bitwise.
#[derive(Clone)]
pub struct Configuration<S: Scalar = f64> {
    dim: usize,
    coords: Vec<S>,
}

pub(crate) fn lex_cmp<S: Scalar>(a: &[S], b: &[S]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_order(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

impl<S: Scalar> Configuration<S> {
    /// The empty configuration `Ø` in dimension `dim`.
    pub fn empty(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn from_points<P: AsRef<[S]>>(dim: usize, points: &[P]) -> Result<Self, ConfigError> {
        if dim == 0 {
            return Err(ConfigError::InvalidDomain("dimension must be positive".into()));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(ConfigError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Ok(Self::from_flat(dim, coords))
    }

    /// Builds from row-major coordinates (`coords.len()` must be a multiple of `dim`).
    pub fn from_flat(dim: usize, coords: Vec<S>) -> Self {
        assert!(dim > 0 && coords.len().is_multiple_of(dim));
        let mut c = Self { dim, coords };
        c.canonicalize();
        c
    }

    /// Like [`Configuration::from_points`] but also checks every point lies in `domain`.
    pub fn in_domain<P: AsRef<[S]>>(domain: &Domain<S>, points: &[P]) -> Result<Self, ConfigError> {
        let c = Self::from_points(domain.dim(), points)?;
        c.check_in(domain)?;
        Ok(c)
    }

    pub fn check_in(&self, domain: &Domain<S>) -> Result<(), ConfigError> {
        if domain.dim() != self.dim {
            return Err(ConfigError::DimensionMismatch {
                expected: domain.dim(),
                got: self.dim,
            });
        }
        match self.points().find(|p| !domain.contains(p)) {
            Some(p) => Err(ConfigError::PointOutsideDomain(p.iter().map(|c| c.as_f64()).collect())),
            None => Ok(()),
        }
    }

    /// `n(x)`.
    #[inline]
    pub fn count(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[S] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[S]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Row-major coordinates in canonical order.
    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn to_points(&self) -> Vec<Vec<S>> {
        self.points().map(<[S]>::to_vec).collect()
    }

    /// `x ∪ ξ`.
    pub fn insert(&self, domain: &Domain<S>, xi: &[S]) -> Result<Self, ConfigError> {
        if xi.len() != self.dim {
            return Err(ConfigError::DimensionMismatch {
                expected: self.dim,
                got: xi.len(),
            });
        }
        if !domain.contains(xi) {
            return Err(ConfigError::PointOutsideDomain(xi.iter().map(|c| c.as_f64()).collect()));
        }
        Ok(self.with_point(xi))
    }

    /// `x ∪ ξ` without a domain check.
    pub fn with_point(&self, xi: &[S]) -> Self {
        debug_assert_eq!(xi.len(), self.dim);
        let n = self.count();
        let pos = (0..n)
            .position(|i| lex_cmp(self.point(i), xi) == Ordering::Greater)
            .unwrap_or(n);
        let mut coords = Vec::with_capacity(self.coords.len() + self.dim);
        coords.extend_from_slice(&self.coords[..pos * self.dim]);
        coords.extend_from_slice(xi);
        coords.extend_from_slice(&self.coords[pos * self.dim..]);
        Self {
            dim: self.dim,
            coords,
        }
    }

    /// `x \ x_i`, indexing the canonical order.
    pub fn remove(&self, i: usize) -> Result<Self, ConfigError> {
        let n = self.count();
        if i >= n {
            return Err(ConfigError::IndexOutOfRange { index: i, len: n });
        }
        let mut coords = self.coords.clone();
        coords.drain(i * self.dim..(i + 1) * self.dim);
        Ok(Self {
            dim: self.dim,
            coords,
        })
    }

    /// True when every point of `self` occurs in `other` at least as often.
    pub fn is_submultiset_of(&self, other: &Self) -> bool {
        if self.dim != other.dim || self.count() > other.count() {
            return false;
        }
        // both sides sorted: merge walk
        let mut j = 0;
        for p in self.points() {
            loop {
                if j >= other.count() {
                    return false;
                }
                match lex_cmp(other.point(j), p) {
                    Ordering::Less => j += 1,
                    Ordering::Equal => {
                        j += 1;
                        break;
                    }
                    Ordering::Greater => return false,
                }
            }
        }
        true
    }

    /// True when no point is repeated.
    pub fn is_simple(&self) -> bool {
        (1..self.count()).all(|i| lex_cmp(self.point(i - 1), self.point(i)) != Ordering::Equal)
    }

    /// Mutable row-major coordinates for movers. Callers must call
    /// [`Configuration::canonicalize`] afterwards.
    pub(crate) fn coords_mut(&mut self) -> &mut [S] {
        &mut self.coords
    }

    pub(crate) fn canonicalize(&mut self) {
        let n = self.count();
        if n < 2 {
            return;
        }
        let d = self.dim;
        let sorted = (1..n).all(|i| lex_cmp(self.point(i - 1), self.point(i)) != Ordering::Greater);
        if sorted {
            return;
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| lex_cmp(&self.coords[a * d..(a + 1) * d], &self.coords[b * d..(b + 1) * d]));
        let mut out = Vec::with_capacity(self.coords.len());
        for i in idx {
            out.extend_from_slice(&self.coords[i * d..(i + 1) * d]);
        }
        self.coords = out;
    }
}

impl<S: Scalar> PartialEq for Configuration<S> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.coords.len() == other.coords.len()
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(a, b)| a.bits() == b.bits())
    }
}

impl<S: Scalar> Eq for Configuration<S> {}

impl<S: Scalar> Hash for Configuration<S> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.dim.hash(state);
        for c in &self.coords {
            c.bits().hash(state);
        }
    }
}

impl<S: Scalar> fmt::Debug for Configuration<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.points()).finish()
    }
}

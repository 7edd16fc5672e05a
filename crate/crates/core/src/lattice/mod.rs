//! Exact integer geometry of rational cones.
//!
//! Everything here works over `i64` with `i128` intermediates: cone validation,
//! goodness and Gorenstein tests, unimodular subdivision of 2-d wedges and the
//! face matrices `K_f` that label the factorization identities.

mod cone;
mod faces;
mod matrix;
mod wedge;

pub use cone::{dual_contains, gorenstein_vector, is_good, Cone, ConeSpec, Edge};
pub use faces::{
    face_matrices, gorenstein_fan, group_action, reduced_group_action, regular_rays_2d, s_matrix,
    FaceMatrix, FanCell, GorensteinFan,
};
pub use matrix::{smith_invariants, UnimodularMatrix};
pub use wedge::{regularize_rays, subdivide_wedge, WedgeSubdivision};

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// An integer lattice vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntVector(Vec<i64>);

impl IntVector {
    pub fn new(entries: Vec<i64>) -> Self {
        IntVector(entries)
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn gcd(&self) -> i64 {
        self.0.iter().fold(0, |g, &x| gcd(g, x))
    }

    pub fn dot(&self, other: &IntVector) -> i64 {
        debug_assert_eq!(self.dim(), other.dim());
        let s: i128 = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum();
        s as i64
    }

    pub fn norm_sq(&self) -> i64 {
        self.dot(self)
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scaled(&self, k: i64) -> IntVector {
        IntVector(self.0.iter().map(|x| k * x).collect())
    }

    /// Divides out the gcd of the entries.
    pub fn primitive_part(&self) -> IntVector {
        let g = self.gcd();
        if g == 0 {
            return self.clone();
        }
        IntVector(self.0.iter().map(|x| x / g).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&x| x as f64).collect()
    }
}

impl From<Vec<i64>> for IntVector {
    fn from(v: Vec<i64>) -> Self {
        IntVector(v)
    }
}

impl<const N: usize> From<[i64; N]> for IntVector {
    fn from(v: [i64; N]) -> Self {
        IntVector(v.to_vec())
    }
}

impl std::ops::Index<usize> for IntVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// True iff the gcd of the entries is 1.
pub fn is_primitive(v: &IntVector) -> Result<bool> {
    if v.is_zero() {
        return Err(Error::Domain("zero vector has no primitivity".into()));
    }
    Ok(v.gcd() == 1)
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

/// Extended Euclid: returns `(g, x, y)` with `a x + b y = g >= 0`.
pub(crate) fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (old_r, old_s, old_t) = (-old_r, -old_s, -old_t);
    }
    (old_r as i64, old_s as i64, old_t as i64)
}

/// `det[a, b] = a × b` for 2-vectors.
pub fn det2(a: &IntVector, b: &IntVector) -> i64 {
    (a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128) as i64
}

pub fn cross3(a: &IntVector, b: &IntVector) -> IntVector {
    IntVector(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

pub fn det3(a: &IntVector, b: &IntVector, c: &IntVector) -> i64 {
    a.dot(&cross3(b, c))
}

/// Rotation by +90 degrees: `(x, y) -> (-y, x)`. Maps an edge ray of a wedge
/// to the normal pointing counter-clockwise across it.
pub(crate) fn rot90(v: &IntVector) -> IntVector {
    IntVector(vec![-v[1], v[0]])
}

pub(crate) fn rot90_inv(v: &IntVector) -> IntVector {
    IntVector(vec![v[1], -v[0]])
}

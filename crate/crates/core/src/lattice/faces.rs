use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    cone::is_good, cross3, det2, det3, ext_gcd, gorenstein_vector, regularize_rays, Cone,
    IntVector, UnimodularMatrix,
};
use crate::error::{Error, Result};

/// The matrix `K_f = diag([n, v_1, …, v_{r-1}]^{-1}, 1)` attached to a 1-d face.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceMatrix {
    /// Primitive edge ray `x_f`.
    pub ray: IntVector,
    /// Normals of the facets through the edge, ordered so that
    /// `det[x_f, v_1, …] > 0` (3-d).
    pub normals: Vec<IntVector>,
    /// The completing vector `n`.
    pub complement: IntVector,
    /// `det[n, v_1, …]`; `+1` except for a 2-d edge with `det[x_f, v] < 0`.
    pub sign: i64,
    pub k: UnimodularMatrix,
}

impl FaceMatrix {
    fn build(ray: IntVector, normals: Vec<IntVector>, complement: IntVector, sign: i64) -> Result<Self> {
        let mut cols = vec![complement.clone()];
        cols.extend(normals.iter().cloned());
        let m = UnimodularMatrix::from_columns(&cols)?;
        if m.det() != sign {
            return Err(Error::Domain(format!(
                "complement {complement} gives determinant {} instead of {sign}",
                m.det()
            )));
        }
        Ok(FaceMatrix {
            ray,
            normals,
            complement,
            sign,
            k: m.inverse().embed(),
        })
    }

    /// Same face with a different (valid) choice of completing vector.
    pub fn with_complement(&self, n: IntVector) -> Result<Self> {
        Self::build(self.ray.clone(), self.normals.clone(), n, self.sign)
    }

    /// `S · K_f`.
    pub fn sk(&self) -> UnimodularMatrix {
        s_matrix(self.k.size()).mul(&self.k)
    }

    /// `τ^f = S K_f (ω, 1)`.
    pub fn tau(&self, omegas: &[Complex64]) -> Vec<Complex64> {
        let mut v = omegas.to_vec();
        v.push(Complex64::new(1.0, 0.0));
        self.sk().apply(&v)
    }
}

/// One face matrix per edge of a good cone, in the order of [`Cone::edges`].
pub fn face_matrices(c: &Cone) -> Result<Vec<FaceMatrix>> {
    if !is_good(c) {
        return Err(Error::NotGood(format!("{:?}", c.spec().normals)));
    }
    c.edges()
        .iter()
        .map(|e| {
            if c.dim() == 2 {
                let v = c.normals()[e.facets[0]].clone();
                let sign = det2(&e.ray, &v).signum();
                let n = complement_2d(&v, sign);
                FaceMatrix::build(e.ray.clone(), vec![v], n, sign)
            } else {
                let (mut a, mut b) = (
                    c.normals()[e.facets[0]].clone(),
                    c.normals()[e.facets[1]].clone(),
                );
                if det3(&e.ray, &a, &b) < 0 {
                    std::mem::swap(&mut a, &mut b);
                }
                let n = complement_3d(&a, &b);
                FaceMatrix::build(e.ray.clone(), vec![a, b], n, 1)
            }
        })
        .collect()
}

/// Shortest `n` with `det[n, v] = sign`; ties broken lexicographically.
fn complement_2d(v: &IntVector, sign: i64) -> IntVector {
    let (g, s, t) = ext_gcd(v[1], -v[0]);
    debug_assert_eq!(g, 1);
    let n0 = IntVector::new(vec![s, t]).scaled(sign);
    let k = -(n0.dot(v) as f64) / v.norm_sq() as f64;
    let k = k.floor() as i64;
    (k - 1..=k + 2)
        .map(|k| n0.add(&v.scaled(k)))
        .min_by_key(|n| (n.norm_sq(), n.clone()))
        .expect("non-empty window")
}

/// Shortest `n` with `det[n, a, b] = 1`; ties broken lexicographically.
fn complement_3d(a: &IntVector, b: &IntVector) -> IntVector {
    let w = cross3(a, b);
    let (g1, x, y) = ext_gcd(w[0], w[1]);
    let (g, s, t) = ext_gcd(g1, w[2]);
    debug_assert_eq!(g, 1, "edge normals of a good cone have primitive cross product");
    let n0 = IntVector::new(vec![s * x, s * y, t]);
    // least-squares coefficients of the projection onto span(a, b)
    let (aa, ab, bb) = (a.norm_sq() as f64, a.dot(b) as f64, b.norm_sq() as f64);
    let (na, nb) = (n0.dot(a) as f64, n0.dot(b) as f64);
    let det = aa * bb - ab * ab;
    let ca = -(bb * na - ab * nb) / det;
    let cb = -(aa * nb - ab * na) / det;
    let (ca, cb) = (ca.round() as i64, cb.round() as i64);
    let mut best: Option<IntVector> = None;
    for i in ca - 3..=ca + 3 {
        for j in cb - 3..=cb + 3 {
            let n = n0.add(&a.scaled(i)).add(&b.scaled(j));
            let better = match &best {
                None => true,
                Some(m) => (n.norm_sq(), &n) < (m.norm_sq(), m),
            };
            if better {
                best = Some(n);
            }
        }
    }
    best.expect("non-empty window")
}

/// `S`: `-1` top-right, `+1` bottom-left, identity in between.
pub fn s_matrix(size: usize) -> UnimodularMatrix {
    assert!(size >= 2, "S-matrix needs size >= 2");
    let mut rows = vec![vec![0i64; size]; size];
    rows[0][size - 1] = -1;
    rows[size - 1][0] = 1;
    for (i, row) in rows.iter_mut().enumerate().take(size - 1).skip(1) {
        row[i] = 1;
    }
    UnimodularMatrix::from_rows(&rows).expect("S has determinant 1")
}

/// `g · (z | ω) = (z / (gω)_last | (gω)_i / (gω)_last)` with `ω` extended by 1.
pub fn group_action(
    g: &UnimodularMatrix,
    z: Complex64,
    omegas: &[Complex64],
) -> Result<(Complex64, Vec<Complex64>)> {
    if omegas.len() + 1 != g.size() {
        return Err(Error::Domain(format!(
            "matrix of size {} cannot act on {} parameters",
            g.size(),
            omegas.len()
        )));
    }
    let mut v = omegas.to_vec();
    v.push(Complex64::new(1.0, 0.0));
    let gw = g.apply(&v);
    let last = gw[gw.len() - 1];
    if last.norm() == 0.0 {
        return Err(Error::SingularAction);
    }
    Ok((z / last, gw[..gw.len() - 1].iter().map(|w| w / last).collect()))
}

/// The action with the first transformed component dropped.
pub fn reduced_group_action(
    g: &UnimodularMatrix,
    z: Complex64,
    omegas: &[Complex64],
) -> Result<(Complex64, Vec<Complex64>)> {
    let (z, mut w) = group_action(g, z, omegas)?;
    w.remove(0);
    Ok((z, w))
}

/// Unimodular refinement of a 2-d cone's edge rays, counter-clockwise.
pub fn regular_rays_2d(c: &Cone) -> Result<Vec<IntVector>> {
    if c.dim() != 2 {
        return Err(Error::Unsupported(format!("expected a 2-d cone, got dim {}", c.dim())));
    }
    let (a, b) = c.ccw_rays_2d();
    regularize_rays(&a, &b)
}

/// One facet of a 1-Gorenstein 3-d cone in the frame where `ξ = e_1`:
/// the normal reads `(1, -L)` and the facet's wedge is refined by `rays`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanCell {
    pub lift: [i64; 2],
    pub rays: Vec<IntVector>,
    pub normal_index: usize,
}

/// Regular fan of a 1-Gorenstein 3-d cone, organised by facets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GorensteinFan {
    pub xi: IntVector,
    /// `B = [ξ, b_2, b_3]` with `det B = 1`.
    pub basis: UnimodularMatrix,
    pub cells: Vec<FanCell>,
}

impl GorensteinFan {
    /// `ω' = Bᵀ ω`, the parameters in the adapted frame.
    pub fn transform_omegas(&self, omegas: &[Complex64]) -> Vec<Complex64> {
        let n = self.basis.size();
        (0..n)
            .map(|j| (0..n).map(|i| omegas[i] * self.basis.get(i, j) as f64).sum())
            .collect()
    }

    /// Pairs `(α_{i,j}, α_{i,j+1})` over all cells, with
    /// `α = ω̃_i · ρ` and `ω̃_i = (ω'_2 + L_i^1 ω'_1, ω'_3 + L_i^2 ω'_1)`.
    pub fn wedge_parameters(&self, omegas_adapted: &[Complex64]) -> Vec<(Complex64, Complex64)> {
        let w = omegas_adapted;
        let mut out = Vec::new();
        for cell in &self.cells {
            let wt = [
                w[1] + w[0] * cell.lift[0] as f64,
                w[2] + w[0] * cell.lift[1] as f64,
            ];
            let al: Vec<Complex64> = cell
                .rays
                .iter()
                .map(|r| wt[0] * r[0] as f64 + wt[1] * r[1] as f64)
                .collect();
            out.extend(al.windows(2).map(|p| (p[0], p[1])));
        }
        out
    }
}

/// Builds the adapted frame and the per-facet regular wedges.
pub fn gorenstein_fan(c: &Cone) -> Result<GorensteinFan> {
    if c.dim() != 3 {
        return Err(Error::Unsupported("Gorenstein fan needs a 3-d cone".into()));
    }
    if !is_good(c) {
        return Err(Error::NotGood(format!("{:?}", c.spec().normals)));
    }
    let xi = gorenstein_vector(c).ok_or(Error::NotGorenstein)?;
    let basis = complete_basis(&xi)?;
    let bt = UnimodularMatrix::from_rows(&transpose(&basis.rows()))?;
    let mut lifts: Vec<([i64; 2], usize)> = c
        .normals()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let vp: Vec<i64> = (0..3)
                .map(|r| (0..3).map(|k| bt.get(r, k) * v[k]).sum())
                .collect();
            debug_assert_eq!(vp[0], 1);
            ([-vp[1], -vp[2]], i)
        })
        .collect();
    let n = lifts.len();
    let area: i64 = (0..n)
        .map(|i| {
            let (p, q) = (lifts[i].0, lifts[(i + 1) % n].0);
            p[0] * q[1] - p[1] * q[0]
        })
        .sum();
    if area < 0 {
        lifts.reverse();
    }
    let mut cells = Vec::with_capacity(n);
    for i in 0..n {
        let prev = lifts[(i + n - 1) % n].0;
        let (cur, idx) = lifts[i];
        let next = lifts[(i + 1) % n].0;
        let dprev = [cur[0] - prev[0], cur[1] - prev[1]];
        let dnext = [next[0] - cur[0], next[1] - cur[1]];
        let start = IntVector::new(vec![dprev[1], -dprev[0]]);
        let end = IntVector::new(vec![dnext[1], -dnext[0]]);
        cells.push(FanCell {
            lift: cur,
            rays: regularize_rays(&start, &end)?,
            normal_index: idx,
        });
    }
    Ok(GorensteinFan { xi, basis, cells })
}

fn transpose(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    (0..rows.len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

/// Unimodular `B` with first column the primitive vector `xi`.
fn complete_basis(xi: &IntVector) -> Result<UnimodularMatrix> {
    // column-reduce the row vector xiᵀ to e_1ᵀ, tracking U with xiᵀ U = e_1ᵀ
    let n = xi.dim();
    let mut row: Vec<i64> = xi.entries().to_vec();
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let col_op = |u: &mut Vec<Vec<i64>>, row: &mut Vec<i64>, dst: usize, src: usize, q: i64| {
        row[dst] -= q * row[src];
        for r in u.iter_mut() {
            r[dst] -= q * r[src];
        }
    };
    let swap = |u: &mut Vec<Vec<i64>>, row: &mut Vec<i64>, a: usize, b: usize| {
        row.swap(a, b);
        for r in u.iter_mut() {
            r.swap(a, b);
        }
    };
    loop {
        let Some(p) = (0..n).filter(|&j| row[j] != 0).min_by_key(|&j| row[j].abs()) else {
            return Err(Error::Domain("zero Gorenstein vector".into()));
        };
        swap(&mut u, &mut row, 0, p);
        let mut done = true;
        for j in 1..n {
            if row[j] != 0 {
                let q = row[j].div_euclid(row[0]);
                col_op(&mut u, &mut row, j, 0, q);
                if row[j] != 0 {
                    done = false;
                }
            }
        }
        if done {
            break;
        }
    }
    if row[0] != 1 {
        if row[0] == -1 {
            for r in u.iter_mut() {
                r[0] = -r[0];
            }
        } else {
            return Err(Error::Domain(format!("{xi} is not primitive")));
        }
    }
    // Uᵀ ξ = e_1, so ξ is the first column of (Uᵀ)^{-1}
    let ut = UnimodularMatrix::from_rows(&transpose(&u))?;
    let b = ut.inverse();
    if b.det() == 1 {
        return Ok(b);
    }
    let mut rows = b.rows();
    for r in rows.iter_mut() {
        r[n - 1] = -r[n - 1];
    }
    UnimodularMatrix::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(dim: usize, normals: &[&[i64]]) -> Cone {
        Cone::new(dim, normals.iter().map(|n| IntVector::new(n.to_vec())).collect()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn s_matrix_shapes() {
        assert_eq!(s_matrix(2).rows(), vec![vec![0, -1], vec![1, 0]]);
        assert_eq!(s_matrix(3).rows(), vec![vec![0, 0, -1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert_eq!(s_matrix(4).det(), 1);
    }

    #[test]
    fn wedge21_x_axis_face() {
        let w = cone(2, &[&[0, 1], &[-2, 1]]);
        let fm = face_matrices(&w).unwrap();
        let f = fm.iter().find(|f| f.normals[0] == IntVector::from([0, 1])).unwrap();
        assert_eq!(f.ray, IntVector::from([-1, 0]));
        assert_eq!(f.sign, -1);
        assert_eq!(f.complement, IntVector::from([-1, 0]));
        for f in &fm {
            assert_eq!(f.k.det().abs(), 1);
            assert!(f.complement.dot(&f.ray) > 0);
        }
    }

    #[test]
    fn face_matrices_3d_have_det_one() {
        let sq = cone(3, &[&[1, 0, 0], &[1, -1, 0], &[1, -1, -1], &[1, 0, -1]]);
        let fm = face_matrices(&sq).unwrap();
        assert_eq!(fm.len(), 4);
        for f in &fm {
            assert_eq!(f.k.det(), 1);
            assert!(det3(&f.ray, &f.normals[0], &f.normals[1]) > 0);
            assert!(f.complement.dot(&f.ray) > 0);
        }
    }

    #[test]
    fn not_good_rejected() {
        let c3 = cone(3, &[&[1, 0, 0], &[1, 2, 0], &[0, 0, 1]]);
        assert!(matches!(face_matrices(&c3), Err(Error::NotGood(_))));
    }

    #[test]
    fn complement_choice_shifts_tau_by_integers() {
        let sq = cone(3, &[&[1, 0, 0], &[1, -1, 0], &[1, -1, -1], &[1, 0, -1]]);
        let om = [c(0.9, 0.55), c(0.23, 0.81), c(-0.31, 0.67)];
        for f in face_matrices(&sq).unwrap() {
            let g = f.with_complement(f.complement.add(&f.normals[0])).unwrap();
            let (t1, t2) = (f.tau(&om), g.tau(&om));
            let last = t1[3];
            assert!((t2[3] - last).norm() < 1e-12);
            for i in 1..3 {
                let d = (t2[i] - t1[i]) / last;
                assert!((d.re - d.re.round()).abs() < 1e-12 && d.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_action_is_trivial() {
        let z = c(0.3, 0.1);
        let om = [c(1.0, 0.5), c(-0.2, 0.9)];
        let (z2, w2) = group_action(&UnimodularMatrix::identity(3), z, &om).unwrap();
        assert_eq!(z2, z);
        assert_eq!(w2, om.to_vec());
    }

    #[test]
    fn s_action_inverts() {
        let z = c(0.3, 0.1);
        let om = [c(1.0, 0.5), c(-0.2, 0.9)];
        let (z2, w2) = group_action(&s_matrix(3), z, &om).unwrap();
        assert!((z2 - z / om[0]).norm() < 1e-15);
        assert!((w2[0] + 1.0 / om[0]).norm() < 1e-15);
        assert!((w2[1] - om[1] / om[0]).norm() < 1e-15);
    }

    #[test]
    fn singular_action_detected() {
        let g = UnimodularMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0], vec![1, 0, -1]]).unwrap();
        let om = [c(1.0, 0.0), c(0.0, 1.0)];
        assert_eq!(group_action(&g, c(0.1, 0.0), &om), Err(Error::SingularAction));
    }

    #[test]
    fn standard_gorenstein_fan() {
        let sq = cone(3, &[&[1, 0, 0], &[1, -1, 0], &[1, -1, -1], &[1, 0, -1]]);
        let fan = gorenstein_fan(&sq).unwrap();
        assert_eq!(fan.xi, IntVector::from([1, 0, 0]));
        assert_eq!(fan.basis, UnimodularMatrix::identity(3));
        assert_eq!(fan.cells.len(), 4);
        for cell in &fan.cells {
            for w in cell.rays.windows(2) {
                assert_eq!(det2(&w[0], &w[1]), 1);
            }
        }
    }

    #[test]
    fn basis_completion() {
        for xi in [[1, 1, 1], [2, 3, 5], [0, 0, -1], [-4, 7, 0]] {
            let xi = IntVector::from(xi);
            let b = complete_basis(&xi).unwrap();
            assert_eq!(b.det(), 1);
            assert_eq!((0..3).map(|i| b.get(i, 0)).collect::<Vec<_>>(), xi.entries());
        }
    }

    #[test]
    fn fan_in_non_standard_frame() {
        let c3 = Cone::standard(3).unwrap();
        let fan = gorenstein_fan(&c3).unwrap();
        assert_eq!(fan.xi, IntVector::from([1, 1, 1]));
        assert_eq!(fan.cells.len(), 3);
    }
}

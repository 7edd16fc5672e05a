use serde::{Deserialize, Serialize};

use super::{cross3, det2, det3, matrix::int_det, smith_invariants, IntVector};
use crate::error::{Error, Result};

/// Wire form of a cone: `{"dim": 2|3, "normals": [[int,...],...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub dim: usize,
    pub normals: Vec<Vec<i64>>,
}

/// A 1-dimensional face of a cone together with the normals of the facets
/// meeting along it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    /// Primitive generator of the ray.
    pub ray: IntVector,
    /// Indices into [`Cone::normals`]; one entry in 2-d, the adjacent pair in 3-d.
    pub facets: Vec<usize>,
}

/// Strictly convex rational polyhedral cone `{x : x·v_i >= 0}` given by its
/// inward primitive normals. In 3-d the normals are in cyclic order, so that
/// consecutive normals bound adjacent facets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    dim: usize,
    normals: Vec<IntVector>,
    edges: Vec<Edge>,
}

impl Cone {
    pub fn new(dim: usize, normals: Vec<IntVector>) -> Result<Cone> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Unsupported(format!("cone dimension {dim}")));
        }
        for v in &normals {
            if v.dim() != dim {
                return Err(Error::InvalidCone(format!("normal {v} is not {dim}-dimensional")));
            }
            if v.is_zero() {
                return Err(Error::InvalidCone("zero normal".into()));
            }
            if v.gcd() != 1 {
                return Err(Error::InvalidCone(format!("normal {v} is not primitive")));
            }
        }
        for i in 0..normals.len() {
            for j in i + 1..normals.len() {
                if parallel(&normals[i], &normals[j]) {
                    return Err(Error::InvalidCone(format!(
                        "normals {} and {} are parallel",
                        normals[i], normals[j]
                    )));
                }
            }
        }
        let edges = match dim {
            2 => edges_2d(&normals)?,
            _ => edges_3d(&normals)?,
        };
        Ok(Cone { dim, normals, edges })
    }

    pub fn from_spec(spec: &ConeSpec) -> Result<Cone> {
        Cone::new(
            spec.dim,
            spec.normals.iter().cloned().map(IntVector::new).collect(),
        )
    }

    pub fn from_json(s: &str) -> Result<Cone> {
        let spec: ConeSpec = serde_json::from_str(s)
            .map_err(|e| Error::InvalidCone(format!("malformed cone JSON: {e}")))?;
        Cone::from_spec(&spec)
    }

    pub fn spec(&self) -> ConeSpec {
        ConeSpec {
            dim: self.dim,
            normals: self.normals.iter().map(|v| v.entries().to_vec()).collect(),
        }
    }

    /// The positive orthant `R^dim_{>=0}`.
    pub fn standard(dim: usize) -> Result<Cone> {
        let normals = (0..dim)
            .map(|i| IntVector::new((0..dim).map(|j| (i == j) as i64).collect()))
            .collect();
        Cone::new(dim, normals)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[IntVector] {
        &self.normals
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_rays(&self) -> Vec<IntVector> {
        self.edges.iter().map(|e| e.ray.clone()).collect()
    }

    pub fn contains(&self, x: &IntVector) -> bool {
        self.normals.iter().all(|v| v.dot(x) >= 0)
    }

    pub fn contains_interior(&self, x: &IntVector) -> bool {
        self.normals.iter().all(|v| v.dot(x) > 0)
    }

    /// Edge rays in counter-clockwise order (2-d only).
    pub(crate) fn ccw_rays_2d(&self) -> (IntVector, IntVector) {
        debug_assert_eq!(self.dim, 2);
        let (a, b) = (&self.edges[0].ray, &self.edges[1].ray);
        if det2(a, b) > 0 {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        }
    }

    /// Bounded-enumeration minimality test: every normal must cut off some
    /// lattice point of radius at most `radius` satisfying all the others.
    pub fn redundant_normals(&self, radius: i64) -> Vec<usize> {
        let pts = box_points(self.dim, radius);
        (0..self.normals.len())
            .filter(|&i| {
                !pts.iter().any(|x| {
                    self.normals[i].dot(x) < 0
                        && self
                            .normals
                            .iter()
                            .enumerate()
                            .all(|(j, v)| j == i || v.dot(x) >= 0)
                })
            })
            .collect()
    }

    /// Bounded-enumeration strict convexity test: no nonzero lattice point
    /// `x` with both `x` and `-x` in the cone.
    pub fn has_line_within(&self, radius: i64) -> bool {
        box_points(self.dim, radius)
            .iter()
            .any(|x| !x.is_zero() && self.contains(x) && self.contains(&x.neg()))
    }
}

fn box_points(dim: usize, radius: i64) -> Vec<IntVector> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (-radius..=radius).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(IntVector::new).collect()
}

fn parallel(a: &IntVector, b: &IntVector) -> bool {
    match a.dim() {
        2 => det2(a, b) == 0,
        _ => cross3(a, b).is_zero(),
    }
}

fn edges_2d(normals: &[IntVector]) -> Result<Vec<Edge>> {
    if normals.len() != 2 {
        return Err(Error::InvalidCone(format!(
            "a 2-d cone has exactly two facets, got {} normals",
            normals.len()
        )));
    }
    let mut edges = Vec::with_capacity(2);
    for i in 0..2 {
        let v = &normals[i];
        let other = &normals[1 - i];
        let mut ray = IntVector::new(vec![v[1], -v[0]]);
        if ray.dot(other) < 0 {
            ray = ray.neg();
        }
        edges.push(Edge { ray, facets: vec![i] });
    }
    Ok(edges)
}

fn edges_3d(normals: &[IntVector]) -> Result<Vec<Edge>> {
    let n = normals.len();
    if n < 3 {
        return Err(Error::InvalidCone(format!(
            "a 3-d cone needs at least three facets, got {n}"
        )));
    }
    // strict convexity: the normals must span R^3
    let spans = (0..n).any(|i| {
        (i + 1..n).any(|j| (j + 1..n).any(|k| det3(&normals[i], &normals[j], &normals[k]) != 0))
    });
    if !spans {
        return Err(Error::InvalidCone("normals do not span R^3; the cone contains a line".into()));
    }
    let mut edges = Vec::with_capacity(n);
    for i in 0..n {
        let j = (i + 1) % n;
        let x = cross3(&normals[i], &normals[j]).primitive_part();
        let ray = if normals.iter().all(|v| v.dot(&x) >= 0) {
            x
        } else if normals.iter().all(|v| v.dot(&x) <= 0) {
            x.neg()
        } else {
            return Err(Error::InvalidCone(format!(
                "normals {} and {} are not adjacent (normals must be in cyclic order)",
                normals[i], normals[j]
            )));
        };
        if let Some(k) = (0..n).find(|&k| k != i && k != j && normals[k].dot(&ray) == 0) {
            return Err(Error::InvalidCone(format!(
                "normal {} is redundant along edge {ray}",
                normals[k]
            )));
        }
        edges.push(Edge { ray, facets: vec![i, j] });
    }
    Ok(edges)
}

/// Goodness: the normals meeting at every proper face span a saturated
/// sublattice (all Smith invariant factors equal 1).
pub fn is_good(c: &Cone) -> bool {
    let singles_ok = c
        .normals
        .iter()
        .all(|v| smith_invariants(&[v.entries().to_vec()]) == vec![1]);
    if c.dim == 2 {
        return singles_ok;
    }
    singles_ok
        && c.edges.iter().all(|e| {
            let rows: Vec<Vec<i64>> = e
                .facets
                .iter()
                .map(|&i| c.normals[i].entries().to_vec())
                .collect();
            smith_invariants(&rows) == vec![1, 1]
        })
}

/// Primitive `ξ` with `ξ·v_i = 1` for every normal, if one exists.
pub fn gorenstein_vector(c: &Cone) -> Option<IntVector> {
    let d = c.dim;
    // a square subsystem of linearly independent normals
    let idx: Vec<usize> = if d == 2 {
        vec![0, 1]
    } else {
        let n = c.normals.len();
        let mut found = None;
        'outer: for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if det3(&c.normals[i], &c.normals[j], &c.normals[k]) != 0 {
                        found = Some(vec![i, j, k]);
                        break 'outer;
                    }
                }
            }
        }
        found?
    };
    let rows: Vec<i64> = idx.iter().flat_map(|&i| c.normals[i].entries().to_vec()).collect();
    let det = int_det(d, &rows);
    // Cramer: ξ_j = det(rows with column j replaced by ones) / det
    let mut xi = Vec::with_capacity(d);
    for j in 0..d {
        let mut m = rows.clone();
        for r in 0..d {
            m[r * d + j] = 1;
        }
        let num = int_det(d, &m);
        if num % det != 0 {
            return None;
        }
        xi.push(num / det);
    }
    let xi = IntVector::new(xi);
    if c.normals.iter().all(|v| v.dot(&xi) == 1) {
        Some(xi)
    } else {
        None
    }
}

/// Membership of `y` in the dual cone: `y·x >= 0` for every edge ray `x`
/// (strictly positive for the interior variant).
pub fn dual_contains(c: &Cone, y: &[f64], strict: bool) -> bool {
    c.edges.iter().all(|e| {
        let s: f64 = e.ray.to_f64().iter().zip(y).map(|(a, b)| a * b).sum();
        if strict {
            s > 0.0
        } else {
            s >= 0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(dim: usize, normals: &[&[i64]]) -> Result<Cone> {
        Cone::new(dim, normals.iter().map(|n| IntVector::new(n.to_vec())).collect())
    }

    fn square() -> Cone {
        cone(3, &[&[1, 0, 0], &[1, -1, 0], &[1, -1, -1], &[1, 0, -1]]).unwrap()
    }

    #[test]
    fn goodness_examples() {
        assert!(is_good(&Cone::standard(2).unwrap()));
        assert!(is_good(&cone(2, &[&[0, 1], &[-2, 1]]).unwrap()));
        assert!(is_good(&square()));
        assert!(is_good(&Cone::standard(3).unwrap()));
    }

    #[test]
    fn not_good_face_pair() {
        // edge between (1,0,0) and (1,2,0): Smith invariants (1, 2)
        let c = cone(3, &[&[1, 0, 0], &[1, 2, 0], &[0, 0, 1]]).unwrap();
        assert!(!is_good(&c));
    }

    #[test]
    fn gorenstein_examples() {
        let c = cone(3, &[&[1, 0, 0], &[1, -1, 0], &[1, 0, -1]]).unwrap();
        assert_eq!(gorenstein_vector(&c), Some(IntVector::from([1, 0, 0])));
        assert_eq!(gorenstein_vector(&square()), Some(IntVector::from([1, 0, 0])));
        let w = cone(2, &[&[0, 1], &[-2, 1]]).unwrap();
        assert_eq!(gorenstein_vector(&w), Some(IntVector::from([0, 1])));
        assert_eq!(gorenstein_vector(&Cone::standard(3).unwrap()), Some(IntVector::from([1, 1, 1])));
    }

    #[test]
    fn non_gorenstein_cone() {
        // normals (1,0,0),(0,1,0),(0,0,1),(1,1,-1)... use a simplicial cone with
        // det 1 but no integral solution of ξ·v = 1 for the fourth normal
        let c = cone(3, &[&[1, 0, 0], &[0, 1, 0], &[-1, -1, 2]]);
        let c = c.unwrap();
        assert_eq!(gorenstein_vector(&c), None);
    }

    #[test]
    fn dual_membership() {
        let s = Cone::standard(2).unwrap();
        assert!(dual_contains(&s, &[1.0, 1.0], true));
        assert!(!dual_contains(&s, &[-1.0, 0.0], false));
        let w = cone(2, &[&[0, 1], &[-2, 1]]).unwrap();
        // edge rays are (-1,0) and (1,2); y = (0,1) is orthogonal to (-1,0)
        let rays = w.edge_rays();
        assert!(rays.contains(&IntVector::from([-1, 0])));
        assert!(rays.contains(&IntVector::from([1, 2])));
        assert!(dual_contains(&w, &[0.0, 1.0], false));
        assert!(!dual_contains(&w, &[0.0, 1.0], true));
    }

    #[test]
    fn invalid_cones_rejected() {
        assert!(matches!(cone(2, &[&[2, 4], &[1, 0]]), Err(Error::InvalidCone(_))));
        assert!(matches!(cone(2, &[&[0, 1], &[0, -1]]), Err(Error::InvalidCone(_))));
        assert!(matches!(cone(4, &[&[1, 0, 0, 0]]), Err(Error::Unsupported(_))));
        // square normals out of cyclic order
        assert!(matches!(
            cone(3, &[&[1, 0, 0], &[1, -1, -1], &[1, -1, 0], &[1, 0, -1]]),
            Err(Error::InvalidCone(_))
        ));
    }

    #[test]
    fn minimal_and_strictly_convex_by_enumeration() {
        let c = square();
        assert!(c.redundant_normals(3).is_empty());
        assert!(!c.has_line_within(3));
        let w = cone(2, &[&[0, 1], &[-2, 1]]).unwrap();
        assert!(w.redundant_normals(5).is_empty());
        assert!(!w.has_line_within(5));
    }

    #[test]
    fn json_round_trip() {
        let c = Cone::from_json(r#"{"dim": 3, "normals": [[1,0,0],[1,-1,0],[1,-1,-1],[1,0,-1]]}"#).unwrap();
        assert_eq!(c, square());
        let back = Cone::from_json(&serde_json::to_string(&c.spec()).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(Cone::from_json("{\"dim\": 2").is_err());
    }
}

use serde::{Deserialize, Serialize};

use super::{det2, ext_gcd, rot90, rot90_inv, IntVector};
use crate::error::{Error, Result};

/// Normals `u_0 = v1, …, u_{n+1} = v2` of lines subdividing the wedge
/// `{x·v1 >= 0, x·v2 < 0}` into pieces with `det[u_i, u_{i+1}] = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WedgeSubdivision {
    pub lines: Vec<IntVector>,
}

impl WedgeSubdivision {
    pub fn interior_lines(&self) -> &[IntVector] {
        &self.lines[1..self.lines.len() - 1]
    }

    /// Integers `a_k` with `u_{k-1} + u_{k+1} = a_k u_k` for interior `k`.
    pub fn self_intersections(&self) -> Vec<i64> {
        self.lines
            .windows(3)
            .map(|w| {
                let s = w[0].add(&w[2]);
                // u_k is primitive, so the multiple is read off a nonzero entry
                let (i, _) = w[1]
                    .entries()
                    .iter()
                    .enumerate()
                    .find(|(_, &x)| x != 0)
                    .expect("primitive normal is nonzero");
                s[i] / w[1][i]
            })
            .collect()
    }
}

/// Subdivides the wedge with lower normal `v1` and upper normal `v2`.
pub fn subdivide_wedge(v1: &IntVector, v2: &IntVector) -> Result<WedgeSubdivision> {
    for v in [v1, v2] {
        if v.dim() != 2 {
            return Err(Error::Unsupported("wedge normals must be 2-dimensional".into()));
        }
        if v.is_zero() || v.gcd() != 1 {
            return Err(Error::Domain(format!("normal {v} is not primitive")));
        }
    }
    let start = rot90_inv(v1);
    let end = rot90_inv(v2);
    let rays = regularize_rays(&start, &end)?;
    Ok(WedgeSubdivision {
        lines: rays.iter().map(rot90).collect(),
    })
}

/// Unimodular refinement of the 2-d cone spanned by the primitive rays `a`
/// and `b` (counter-clockwise, `det[a, b] > 0`). Returns `a = r_0, …, r_k = b`
/// with `det[r_i, r_{i+1}] = 1`.
///
/// Starting from `b`, the next ray `p` is the unique lattice vector with
/// `det[p, b] = 1` and `1 <= det[a, p] < det[a, b]`; the determinant against
/// `a` strictly decreases, so the loop terminates.
pub fn regularize_rays(a: &IntVector, b: &IntVector) -> Result<Vec<IntVector>> {
    let mut d = det2(a, b);
    if d == 0 {
        return Err(Error::DegenerateWedge(format!("rays {a} and {b} are parallel")));
    }
    if d < 0 {
        return Err(Error::DegenerateWedge(format!(
            "rays {a} -> {b} span a reflex angle"
        )));
    }
    let mut seq = vec![b.clone()];
    let mut cur = b.clone();
    while d > 1 {
        // det[p, cur] = p0 cur1 - p1 cur0 = 1
        let (g, s, t) = ext_gcd(cur[1], -cur[0]);
        debug_assert_eq!(g, 1);
        let p0 = IntVector::new(vec![s, t]);
        let dp = det2(a, &p0);
        // det[a, p0 + k cur] = dp + k d, pick it in [1, d - 1]
        let k = -(dp - 1).div_euclid(d);
        let p = p0.add(&cur.scaled(k));
        let nd = det2(a, &p);
        debug_assert!((1..d).contains(&nd));
        seq.push(p.clone());
        cur = p;
        d = nd;
    }
    seq.push(a.clone());
    seq.reverse();
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> IntVector {
        IntVector::from([x, y])
    }

    #[test]
    fn unimodular_wedge_has_no_interior_lines() {
        let s = subdivide_wedge(&v(0, 1), &v(-1, 0)).unwrap();
        assert_eq!(s.lines, vec![v(0, 1), v(-1, 0)]);
    }

    #[test]
    fn wedge_two_one() {
        let s = subdivide_wedge(&v(0, 1), &v(-2, 1)).unwrap();
        assert_eq!(s.lines, vec![v(0, 1), v(-1, 1), v(-2, 1)]);
    }

    #[test]
    fn wedge_three_two() {
        let s = subdivide_wedge(&v(0, 1), &v(-3, 2)).unwrap();
        assert_eq!(s.lines, vec![v(0, 1), v(-1, 1), v(-3, 2)]);
        for w in s.lines.windows(2) {
            assert_eq!(det2(&w[0], &w[1]), 1);
        }
    }

    #[test]
    fn wedge_five_three_chain() {
        let s = subdivide_wedge(&v(0, 1), &v(-5, 3)).unwrap();
        assert!(s.lines.len() > 2);
        for w in s.lines.windows(2) {
            assert_eq!(det2(&w[0], &w[1]), 1);
        }
    }

    #[test]
    fn parallel_normals_rejected() {
        assert!(matches!(
            subdivide_wedge(&v(0, 1), &v(0, 1)),
            Err(Error::DegenerateWedge(_))
        ));
        assert!(matches!(
            subdivide_wedge(&v(0, 1), &v(0, -1)),
            Err(Error::DegenerateWedge(_))
        ));
    }

    #[test]
    fn non_primitive_rejected() {
        assert!(matches!(subdivide_wedge(&v(0, 2), &v(-1, 0)), Err(Error::Domain(_))));
    }

    #[test]
    fn self_intersection_numbers() {
        let s = subdivide_wedge(&v(0, 1), &v(-5, 3)).unwrap();
        for (k, a) in s.self_intersections().into_iter().enumerate() {
            let lhs = s.lines[k].add(&s.lines[k + 2]);
            assert_eq!(lhs, s.lines[k + 1].scaled(a));
        }
    }
}

//! Shared helpers for the integration tests: seeded samplers, fixture
//! loading and an independent lattice oracle for the cone Bernoulli
//! polynomials.
#![allow(dead_code)]

use conegamma::bernoulli::{bernoulli_multiple, piece_weight};
use conegamma::cli::BUILTIN_CONES;
use conegamma::lattice::{cross3, det2, det3, Cone, IntVector};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn iv(v: &[i64]) -> IntVector {
    IntVector::new(v.to_vec())
}

pub fn cone(dim: usize, normals: &[&[i64]]) -> Cone {
    Cone::new(dim, normals.iter().map(|n| iv(n)).collect()).unwrap()
}

pub fn fixture(name: &str) -> Cone {
    let (_, text) = BUILTIN_CONES.iter().find(|(n, _)| *n == name).expect("known fixture");
    Cone::from_json(text).unwrap()
}

/// Uniform complex number in a box.
pub fn cbox(rng: &mut ChaCha8Rng, re: (f64, f64), im: (f64, f64)) -> C {
    c(rng.gen_range(re.0..re.1), rng.gen_range(im.0..im.1))
}

/// Period with `|Im| ∈ [lo, hi]` and the requested sign.
pub fn period(rng: &mut ChaCha8Rng, upper: bool, lo: f64, hi: f64) -> C {
    let y = rng.gen_range(lo..hi);
    c(rng.gen_range(-0.6..0.6), if upper { y } else { -y })
}

/// Periods in the upper half plane whose pairwise ratios stay well away
/// from the real axis.
pub fn generic_periods(rng: &mut ChaCha8Rng, r: usize) -> Vec<C> {
    loop {
        let w: Vec<C> = (0..r)
            .map(|_| {
                let arg = rng.gen_range(0.25..(std::f64::consts::PI - 0.25));
                let m = rng.gen_range(0.7..1.6);
                C::from_polar(m, arg)
            })
            .collect();
        let ok = (0..r).all(|j| (0..r).all(|k| j == k || (w[j] / w[k]).im.abs() > 0.15));
        if ok {
            return w;
        }
    }
}

/// Primitive rays of a 2-d cone, counter-clockwise.
pub fn rays_2d(k: &Cone) -> (IntVector, IntVector) {
    let e = k.edge_rays();
    let (a, b) = (e[0].clone(), e[1].clone());
    if det2(&a, &b) > 0 {
        (a, b)
    } else {
        (b, a)
    }
}

/// Edge rays of a 3-d cone in cyclic order around the cone.
pub fn cyclic_rays_3d(k: &Cone) -> Vec<IntVector> {
    let edges = k.edges();
    let n = edges.len();
    let mut order = vec![0usize];
    while order.len() < n {
        let last = &edges[*order.last().unwrap()];
        let next = (0..n)
            .find(|&j| {
                !order.contains(&j) && edges[j].facets.iter().any(|f| last.facets.contains(f))
            })
            .expect("edges form a cycle");
        order.push(next);
    }
    order.into_iter().map(|j| edges[j].ray.clone()).collect()
}

fn pair(w: &[C], x: &IntVector) -> C {
    w.iter().zip(x.entries()).map(|(a, &b)| a * b as f64).sum()
}

/// Lattice points `λ_1 ρ_1 + … + λ_k ρ_k` with every `λ_i ∈ (0, 1]`.
pub fn half_open_box(rays: &[IntVector]) -> Vec<IntVector> {
    let d = rays[0].dim();
    let lo: Vec<i64> = (0..d).map(|i| rays.iter().map(|r| r[i].min(0)).sum()).collect();
    let hi: Vec<i64> = (0..d).map(|i| rays.iter().map(|r| r[i].max(0)).sum()).collect();
    let mut out = Vec::new();
    let mut p = lo.clone();
    loop {
        let x = IntVector::new(p.clone());
        if in_half_open_box(rays, &x) {
            out.push(x);
        }
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            p[i] += 1;
            if p[i] <= hi[i] {
                break;
            }
            p[i] = lo[i];
            i += 1;
        }
    }
}

/// Exact coordinate test for `x` in the half-open parallelepiped.
fn in_half_open_box(rays: &[IntVector], x: &IntVector) -> bool {
    // coordinates λ_i = num_i / den by Cramer's rule in the span
    let (nums, den): (Vec<i64>, i64) = match (rays.len(), x.dim()) {
        (2, 2) => (vec![det2(x, &rays[1]), det2(&rays[0], x)], det2(&rays[0], &rays[1])),
        (3, 3) => (
            vec![
                det3(x, &rays[1], &rays[2]),
                det3(&rays[0], x, &rays[2]),
                det3(&rays[0], &rays[1], x),
            ],
            det3(&rays[0], &rays[1], &rays[2]),
        ),
        (2, 3) => {
            let n = cross3(&rays[0], &rays[1]);
            if x.dot(&n) != 0 {
                return false;
            }
            (vec![cross3(x, &rays[1]).dot(&n), cross3(&rays[0], x).dot(&n)], n.dot(&n))
        }
        _ => unreachable!("unsupported piece"),
    };
    let (nums, den) = if den < 0 { (nums.iter().map(|v| -v).collect(), -den) } else { (nums, den) };
    nums.iter().all(|&v| v > 0 && v <= den)
}

/// Relatively open simplicial pieces covering the interior of a 2- or
/// 3-d cone (the 3-d case is fanned from the first edge ray).
pub fn open_pieces(k: &Cone) -> Vec<Vec<IntVector>> {
    match k.dim() {
        2 => {
            let (a, b) = rays_2d(k);
            vec![vec![a, b]]
        }
        3 => {
            let x = cyclic_rays_3d(k);
            let n = x.len();
            let mut pieces = Vec::new();
            for i in 1..n - 1 {
                pieces.push(vec![x[0].clone(), x[i].clone(), x[i + 1].clone()]);
            }
            for i in 2..n - 1 {
                pieces.push(vec![x[0].clone(), x[i].clone()]);
            }
            pieces
        }
        _ => unreachable!(),
    }
}

/// `B^C_{r,r}(z|ω)` from the generating function `t^r e^{zt} Σ_{n ∈ C°} e^{-t ω·n}`,
/// summed piece by piece over the open simplicial decomposition.
pub fn bernoulli_cone_oracle(k: &Cone, z: C, w: &[C]) -> C {
    let r = k.dim();
    let mut acc = C::new(0.0, 0.0);
    for piece in open_pieces(k) {
        let al: Vec<C> = piece.iter().map(|x| pair(w, x)).collect();
        let total: C = al.iter().sum();
        let kdim = piece.len();
        for p in half_open_box(&piece) {
            acc += piece_weight(r, kdim)
                * bernoulli_multiple(kdim, z + total - pair(w, &p), &al).unwrap();
        }
    }
    acc
}

/// Same oracle for the lifted cone `C × R_{≥0}` with lift parameter `η`.
pub fn bernoulli_lifted_oracle(k: &Cone, z: C, w: &[C], eta: C) -> C {
    let r = k.dim() + 1;
    let mut acc = C::new(0.0, 0.0);
    for piece in open_pieces(k) {
        let mut al: Vec<C> = piece.iter().map(|x| pair(w, x)).collect();
        al.push(eta);
        let total: C = al.iter().sum();
        let kdim = piece.len() + 1;
        for p in half_open_box(&piece) {
            acc += piece_weight(r, kdim)
                * bernoulli_multiple(kdim, z + total - pair(w, &p) - eta, &al).unwrap();
        }
    }
    acc
}

/// Period whose `Im` sign is upper with probability `p_upper`.
pub fn random_period(rng: &mut ChaCha8Rng, p_upper: f64, lo: f64, hi: f64) -> C {
    let upper = rng.gen_bool(p_upper);
    period(rng, upper, lo, hi)
}

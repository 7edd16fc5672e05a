//! Cone-generalized multiple sine and elliptic gamma functions.
//!
//! Every function has a "decomposed" evaluation (finite product of ordinary
//! functions over a regular subdivision) and a "factorized" one (Bernoulli
//! exponential times one q-factorial or `G_r` per edge of the cone). The two
//! share nothing but the q-factorial primitive, so their agreement is a real
//! check of the corresponding identity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bernoulli::{
    bernoulli_cone_22, bernoulli_cone_33, bernoulli_cone_lifted, chain_alphas, chain_sum,
    gorenstein_precondition, pair,
};
use crate::error::{Error, Result};
use crate::lattice::{
    det2, dual_contains, face_matrices, gorenstein_fan, group_action, reduced_group_action,
    s_matrix, Cone, ConeSpec, FaceMatrix, IntVector,
};
use crate::qseries::{
    elliptic_gamma_ln, exp_ln, expi, multiple_sine_ln, qpoch, qpoch_ln, relative_residual, EvalConfig,
};

type C64 = Complex64;

fn i_times(x: f64) -> C64 {
    C64::new(0.0, x)
}

fn require_dim(c: &Cone, d: usize, what: &str) -> Result<()> {
    if c.dim() != d {
        return Err(Error::Unsupported(format!("{what} needs a {d}-d cone, got dim {}", c.dim())));
    }
    Ok(())
}

fn require_params(c: &Cone, omegas: &[C64]) -> Result<()> {
    if omegas.len() != c.dim() {
        return Err(Error::Domain(format!("{} parameters for a {}-d cone", omegas.len(), c.dim())));
    }
    Ok(())
}

/// `Im ω ∈ (C*)°`, required by the elliptic gamma functions.
fn require_damped(c: &Cone, omegas: &[C64]) -> Result<()> {
    let im: Vec<f64> = omegas.iter().map(|w| w.im).collect();
    if !dual_contains(c, &im, true) {
        return Err(Error::Domain(format!("Im ω = {im:?} is not in the interior of the dual cone")));
    }
    Ok(())
}

/// The q-factorial contributed by one edge of the cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceFactor {
    pub ray: IntVector,
    /// `τ^f = S K_f (ω, 1)`.
    pub tau: Vec<C64>,
    pub value: C64,
    /// A logarithm of `value`, finite even when `value` over- or underflows.
    pub log: C64,
}

/// `S_2` product over a ray chain with `α_k = ω·ρ_k`.
pub fn s2c_from_chain(z: C64, alphas: &[C64], cfg: &EvalConfig) -> Result<C64> {
    chain_sum(z, alphas, |z, a, b| multiple_sine_ln(z, &[a, b], cfg)).map(exp_ln)
}

pub fn s2c_decomposed(c: &Cone, z: C64, omegas: &[C64], cfg: &EvalConfig) -> Result<C64> {
    require_dim(c, 2, "S2C")?;
    require_params(c, omegas)?;
    s2c_from_chain(z, &chain_alphas(c, omegas)?, cfg)
}

/// One factor per edge: `(e(z/τ_3) | e(τ_2/τ_3))_∞`.
pub fn s2c_face_factors(c: &Cone, z: C64, omegas: &[C64], cfg: &EvalConfig) -> Result<Vec<FaceFactor>> {
    require_dim(c, 2, "S2C")?;
    require_params(c, omegas)?;
    face_matrices(c)?
        .into_iter()
        .map(|f| {
            let (zt, w) = reduced_group_action(&f.sk(), z, omegas)?;
            let log = qpoch_ln(expi(zt), &[expi(w[0])], cfg)?.0;
            Ok(FaceFactor { ray: f.ray.clone(), tau: f.tau(omegas), value: exp_ln(log), log })
        })
        .collect()
}

pub fn s2c_factorized(c: &Cone, z: C64, omegas: &[C64], cfg: &EvalConfig) -> Result<C64> {
    let faces = s2c_face_factors(c, z, omegas, cfg)?;
    let b = bernoulli_cone_22(c, z, omegas)?;
    Ok(exp_ln(faces.iter().fold(i_times(PI / 2.0) * b, |acc, f| acc + f.log)))
}

pub fn s3c_decomposed(c: &Cone, z: C64, omegas: &[C64], cfg: &EvalConfig) -> Result<C64> {
    require_dim(c, 3, "S3C")?;
    require_params(c, omegas)?;
    let fan = gorenstein_fan(c).map_err(gorenstein_precondition)?;
    let w = fan.transform_omegas(omegas);
    let mut log = multiple_sine_ln(z, &[w[0]], cfg)?;
    for (a, b) in fan.wedge_parameters(&w) {
        log += multiple_sine_ln(z + a, &[w[0], a, b], cfg)?;
    }
    Ok(exp_ln(log))
}

/// One factor per edge: `(e(z/τ_4) | e(τ_2/τ_4), e(τ_3/τ_4))_∞`.
pub fn s3c_face_factors(c: &Cone, z: C64, omegas: &[C64], cfg: &EvalConfig) -> Result<Vec<FaceFactor>> {
    require_dim(c, 3, "S3C")?;
    require_params(c, omegas)?;
    face_matrices(c)
        .map_err(gorenstein_precondition)?
        .into_iter()
        .map(|f| {
            let (zt, w) = reduced_group_action(&f.sk(), z, omegas)?;
            let log = qpoch_ln(expi(zt), &[expi(w[0]), expi(w[1])], cfg)?.0;
            Ok(FaceFactor { ray: f.ray.clone(), tau: f.tau(omegas), value: exp_ln(log), log })
        })
        .collect()
}

pub fn s3c_factorized(c: &Cone, z: C64, omegas: &[C64], cfg: &EvalConfig) -> Result<C64> {
    let faces = s3c_face_factors(c, z, omegas, cfg)?;
    let b = bernoulli_cone_33(c, z, omegas)?;
    Ok(exp_ln(faces.iter().fold(i_times(-PI / 6.0) * b, |acc, f| acc + f.log)))
}

/// `G_1` product over a ray chain.
pub fn g1c_from_chain(z: C64, alphas: &[C64], cfg: &EvalConfig) -> Result<C64> {
    chain_sum(z, alphas, |z, a, b| elliptic_gamma_ln(z, &[a, b], cfg)).map(exp_ln)
}

pub fn g1c_direct(c: &Cone, z: C64, omegas: &[C64], cfg: &EvalConfig) -> Result<C64> {
    require_dim(c, 2, "G1C")?;
    require_params(c, omegas)?;
    require_damped(c, omegas)?;
    g1c_from_chain(z, &chain_alphas(c, omegas)?, cfg)
}

fn face_gamma_logs(
    faces: &[FaceMatrix],
    pick: impl Fn(&FaceMatrix) -> crate::lattice::UnimodularMatrix,
    z: C64,
    omegas: &[C64],
    cfg: &EvalConfig,
) -> Result<C64> {
    let mut log = C64::new(0.0, 0.0);
    for f in faces {
        let (zt, w) = group_action(&pick(f), z, omegas)?;
        log += elliptic_gamma_ln(zt, &w, cfg)?;
    }
    Ok(log)
}

pub fn g1c_factorized(c: &Cone, z: C64, omegas: &[C64], cfg: &EvalConfig) -> Result<C64> {
    require_dim(c, 2, "G1C")?;
    require_params(c, omegas)?;
    require_damped(c, omegas)?;
    let faces = face_matrices(c)?;
    let b = bernoulli_cone_lifted(c, z, omegas, C64::new(-1.0, 0.0))?;
    Ok(exp_ln(i_times(PI / 3.0) * b + face_gamma_logs(&faces, FaceMatrix::sk, z, omegas, cfg)?))
}

pub fn g2c_direct(c: &Cone, z: C64, omegas: &[C64], cfg: &EvalConfig) -> Result<C64> {
    require_dim(c, 3, "G2C")?;
    require_params(c, omegas)?;
    require_damped(c, omegas)?;
    let fan = gorenstein_fan(c).map_err(gorenstein_precondition)?;
    let w = fan.transform_omegas(omegas);
    let mut log = elliptic_gamma_ln(z, &[w[0]], cfg)?;
    for (a, b) in fan.wedge_parameters(&w) {
        log += elliptic_gamma_ln(z + a, &[w[0], a, b], cfg)?;
    }
    Ok(exp_ln(log))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum G2Variant {
    /// `S K_f` with `η = -1`.
    Primary,
    /// `S^{-1} K_f` with `η = +1`.
    Alternative,
}

pub fn g2c_factorized(c: &Cone, z: C64, omegas: &[C64], variant: G2Variant, cfg: &EvalConfig) -> Result<C64> {
    require_dim(c, 3, "G2C")?;
    require_params(c, omegas)?;
    require_damped(c, omegas)?;
    gorenstein_fan(c).map_err(gorenstein_precondition)?;
    let faces = face_matrices(c)?;
    let (eta, sign) = match variant {
        G2Variant::Primary => (-1.0, 1.0),
        G2Variant::Alternative => (1.0, -1.0),
    };
    let b = bernoulli_cone_lifted(c, z, omegas, C64::new(eta, 0.0))?;
    let pre = i_times(sign * PI / 12.0) * b;
    let prod = match variant {
        G2Variant::Primary => face_gamma_logs(&faces, FaceMatrix::sk, z, omegas, cfg)?,
        G2Variant::Alternative => {
            let s_inv = s_matrix(4).inverse();
            face_gamma_logs(&faces, |f| s_inv.mul(&f.k), z, omegas, cfg)?
        }
    };
    Ok(exp_ln(pre + prod))
}

/// Brute-force product over the lattice points of the cone:
/// `∏_{C} (1 - e(z + ω·n))^{(-1)^r} ∏_{C°} (1 - e(-z + ω·n))`, `r = dim - 1`,
/// restricted to the box `|n|_∞ <= radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeProduct {
    pub value: C64,
    pub points: u64,
    /// Bound on the discarded part of the logarithm.
    pub tail_bound: f64,
}

pub fn gc_lattice(c: &Cone, z: C64, omegas: &[C64], radius: i64) -> Result<LatticeProduct> {
    require_params(c, omegas)?;
    require_damped(c, omegas)?;
    let d = c.dim();
    let odd = (d - 1) % 2 == 1;
    let mut log = C64::new(0.0, 0.0);
    let mut points = 0u64;
    let mut idx = vec![-radius; d];
    loop {
        let n = IntVector::new(idx.clone());
        if c.contains(&n) {
            let w = pair(omegas, &n);
            let a = (C64::new(1.0, 0.0) - expi(z + w)).ln();
            log += if odd { -a } else { a };
            if c.contains_interior(&n) {
                log += (C64::new(1.0, 0.0) - expi(-z + w)).ln();
            }
            points += 1;
        }
        let mut k = 0;
        loop {
            if k == d {
                return Ok(LatticeProduct { value: log.exp(), points, tail_bound: lattice_tail(c, z, omegas, radius) });
            }
            idx[k] += 1;
            if idx[k] <= radius {
                break;
            }
            idx[k] = -radius;
            k += 1;
        }
    }
}

/// `Im ω·n >= μ |n|_∞` on the cone, with `μ = min_x Im ω·x / |x|_∞` over the
/// edge rays; the shell `|n|_∞ = k` holds at most `2d (2k+1)^{d-1}` points.
fn lattice_tail(c: &Cone, z: C64, omegas: &[C64], radius: i64) -> f64 {
    let mu = c
        .edge_rays()
        .iter()
        .map(|x| {
            let m: f64 = omegas.iter().zip(x.entries()).map(|(w, &k)| w.im * k as f64).sum();
            m / x.entries().iter().map(|k| k.abs()).max().unwrap_or(1) as f64
        })
        .fold(f64::INFINITY, f64::min);
    let d = c.dim() as i32;
    let scale = 2.0 * 2.0 * (2.0 * PI * z.im.abs()).exp();
    let mut tail = 0.0;
    for k in radius + 1..radius + 10_000 {
        let term = 2.0 * d as f64 * ((2 * k + 1) as f64).powi(d - 1) * (-2.0 * PI * mu * k as f64).exp();
        tail += term;
        if term < 1e-300 || term < tail * 1e-17 {
            break;
        }
    }
    scale * tail
}

/// Sides of `exp(-πi/3 B^C_{3,3}) = ∏_f G_1(reduced SK_f action)`.
pub fn modular_identity_sides(c: &Cone, z: C64, omegas: &[C64], cfg: &EvalConfig) -> Result<(C64, C64)> {
    require_dim(c, 3, "modular identity")?;
    require_params(c, omegas)?;
    let b = bernoulli_cone_33(c, z, omegas)?;
    let lhs = (i_times(-PI / 3.0) * b).exp();
    let mut log = C64::new(0.0, 0.0);
    for f in face_matrices(c)? {
        let (zt, w) = reduced_group_action(&f.sk(), z, omegas)?;
        log += elliptic_gamma_ln(zt, &w, cfg)?;
    }
    Ok((lhs, exp_ln(log)))
}

/// One evaluated sample of an identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub z: C64,
    pub omegas: Vec<C64>,
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
}

impl SamplePoint {
    pub fn new(z: C64, omegas: &[C64], lhs: C64, rhs: C64) -> Self {
        SamplePoint { z, omegas: omegas.to_vec(), lhs, rhs, residual: relative_residual(lhs, rhs) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub cone: ConeSpec,
    pub points: Vec<SamplePoint>,
    pub max_residual: f64,
    pub median_residual: f64,
    pub config: EvalConfig,
}

impl VerificationReport {
    pub fn from_points(theorem: &str, cone: ConeSpec, points: Vec<SamplePoint>, cfg: &EvalConfig) -> Self {
        let mut r: Vec<f64> = points.iter().map(|p| p.residual).collect();
        r.sort_by(|a, b| a.total_cmp(b));
        let max = r.last().copied().unwrap_or(0.0);
        let median = if r.is_empty() {
            0.0
        } else if r.len() % 2 == 1 {
            r[r.len() / 2]
        } else {
            0.5 * (r[r.len() / 2 - 1] + r[r.len() / 2])
        };
        VerificationReport {
            theorem: theorem.to_string(),
            cone,
            points,
            max_residual: max,
            median_residual: median,
            config: cfg.clone(),
        }
    }

    pub fn passed(&self) -> bool {
        self.max_residual.is_finite() && self.max_residual < self.config.comparison_tol
    }
}

pub fn modular_identity_check(c: &Cone, z: C64, omegas: &[C64], cfg: &EvalConfig) -> Result<VerificationReport> {
    let (lhs, rhs) = modular_identity_sides(c, z, omegas, cfg)?;
    Ok(VerificationReport::from_points(
        "modular-identity",
        c.spec(),
        vec![SamplePoint::new(z, omegas, lhs, rhs)],
        cfg,
    ))
}

/// `∏_i (e(z) | e(ω×u_i), e(-ω×u_{i+1}))_∞` over a chain with
/// `det[u_i, u_{i+1}] = 1`, compared with the two-endpoint factor (open chain)
/// or with `1 - e(z)` (closed chain, `u_0 = u_last`).
pub fn wedge_product_check(
    normals: &[IntVector],
    z: C64,
    omegas: &[C64],
    closed: bool,
    cfg: &EvalConfig,
) -> Result<f64> {
    if normals.len() < 2 || omegas.len() != 2 {
        return Err(Error::Precondition("need at least two 2-d normals and two parameters".into()));
    }
    let mut chain = normals.to_vec();
    if closed && chain.first() != chain.last() {
        chain.push(chain[0].clone());
    }
    for w in chain.windows(2) {
        if w[0].dim() != 2 || w[1].dim() != 2 || det2(&w[0], &w[1]) != 1 {
            return Err(Error::Precondition(format!("det[{}, {}] != 1", w[0], w[1])));
        }
    }
    let cross = |u: &IntVector| omegas[0] * u[1] as f64 - omegas[1] * u[0] as f64;
    let x = expi(z);
    let mut lhs = C64::new(1.0, 0.0);
    for w in chain.windows(2) {
        lhs *= qpoch(x, &[expi(cross(&w[0])), expi(-cross(&w[1]))], cfg)?;
    }
    let rhs = if closed {
        C64::new(1.0, 0.0) - x
    } else {
        let (v, w) = (&chain[0], &chain[chain.len() - 1]);
        qpoch(x, &[expi(cross(v)), expi(-cross(w))], cfg)?
    };
    Ok(relative_residual(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::multiple_sine;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cone(dim: usize, normals: &[&[i64]]) -> Cone {
        Cone::new(dim, normals.iter().map(|n| IntVector::new(n.to_vec())).collect()).unwrap()
    }

    #[test]
    fn s2c_standard_cone_is_s2() {
        let cfg = EvalConfig::default();
        let s = Cone::standard(2).unwrap();
        let (z, w) = (c(0.31, 0.12), [c(1.0, 0.37), c(-0.41, 1.13)]);
        let ord = multiple_sine(z, &w, &cfg).unwrap();
        assert!(relative_residual(s2c_decomposed(&s, z, &w, &cfg).unwrap(), ord) < 1e-12);
        assert!(relative_residual(s2c_factorized(&s, z, &w, &cfg).unwrap(), ord) < 1e-10);
    }

    #[test]
    fn s2c_wedge21_routes_agree() {
        let cfg = EvalConfig::default();
        let k = cone(2, &[&[0, 1], &[-2, 1]]);
        let (z, w) = (c(0.31, 0.12), [c(1.0, 0.37), c(-0.41, 1.13)]);
        let d = s2c_decomposed(&k, z, &w, &cfg).unwrap();
        let f = s2c_factorized(&k, z, &w, &cfg).unwrap();
        assert!(relative_residual(d, f) < 1e-9, "{d} vs {f}");
    }

    #[test]
    fn closed_chain_corollary() {
        let cfg = EvalConfig::default();
        let chain: Vec<IntVector> = [[0, 1], [-1, 0], [1, -1]].iter().map(|&v| IntVector::from(v)).collect();
        let r = wedge_product_check(&chain, c(0.2, 0.05), &[c(0.3, 0.7), c(-0.6, 0.4)], true, &cfg).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn broken_chain_rejected() {
        let cfg = EvalConfig::default();
        let chain: Vec<IntVector> = [[0, 1], [-2, 1]].iter().map(|&v| IntVector::from(v)).collect();
        assert!(matches!(
            wedge_product_check(&chain, c(0.2, 0.0), &[c(0.3, 0.7), c(-0.6, 0.4)], false, &cfg),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn undamped_parameters_rejected() {
        let cfg = EvalConfig::default();
        let s = Cone::standard(2).unwrap();
        assert!(matches!(
            g1c_direct(&s, c(0.1, 0.0), &[c(0.3, -0.7), c(0.1, 0.4)], &cfg),
            Err(Error::Domain(_))
        ));
    }
}

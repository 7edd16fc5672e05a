//! Multiple Bernoulli polynomials `B_{r,n}(z|ω)` and their cone versions.
//!
//! Ordinary polynomials come from truncated power-series arithmetic on the
//! generating function `t^r e^{zt} / ∏(e^{ω_i t} - 1)`. Cone versions are
//! finite sums of ordinary ones over a regular subdivision of the cone; they
//! equal the generating function of the interior lattice points.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{gorenstein_fan, regular_rays_2d, Cone, IntVector};

/// Default cap on the index `n`.
pub const MAX_ORDER: usize = 8;

/// Truncated power series `Σ c_k t^k`, `k < len`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series(pub Vec<Complex64>);

impl Series {
    pub fn mul(&self, other: &Series) -> Series {
        let n = self.0.len().min(other.0.len());
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for (i, a) in self.0.iter().enumerate().take(n) {
            for (j, b) in other.0.iter().enumerate().take(n - i) {
                c[i + j] += a * b;
            }
        }
        Series(c)
    }

    /// Reciprocal by Newton iteration `b ← b (2 - a b)`, doubling the
    /// number of correct coefficients per step.
    pub fn recip(&self) -> Result<Series> {
        let n = self.0.len();
        let a0 = self.0[0];
        if a0.norm() == 0.0 {
            return Err(Error::Domain("series with zero constant term is not invertible".into()));
        }
        let mut b = Series(vec![a0.inv()]);
        let mut prec = 1;
        while prec < n {
            prec = (2 * prec).min(n);
            let a = Series(self.0[..prec].to_vec());
            let mut b_ext = b.0.clone();
            b_ext.resize(prec, Complex64::new(0.0, 0.0));
            let b_ext = Series(b_ext);
            let mut ab = a.mul(&b_ext);
            for c in ab.0.iter_mut() {
                *c = -*c;
            }
            ab.0[0] += 2.0;
            b = b_ext.mul(&ab);
        }
        Ok(b)
    }

    /// `e^{w t}`.
    pub fn exp_linear(w: Complex64, len: usize) -> Series {
        let mut c = Vec::with_capacity(len);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 0..len {
            c.push(term);
            term = term * w / (k + 1) as f64;
        }
        Series(c)
    }
}

/// `B_{r,n}(z|ω)` with `r = omegas.len()`, for `n <= MAX_ORDER`.
pub fn bernoulli_multiple(n: usize, z: Complex64, omegas: &[Complex64]) -> Result<Complex64> {
    bernoulli_multiple_capped(n, z, omegas, MAX_ORDER)
}

pub fn bernoulli_multiple_capped(
    n: usize,
    z: Complex64,
    omegas: &[Complex64],
    max_order: usize,
) -> Result<Complex64> {
    if n > max_order {
        return Err(Error::Domain(format!("order {n} exceeds the configured maximum {max_order}")));
    }
    if omegas.iter().any(|w| w.norm() == 0.0) {
        return Err(Error::Domain("zero period in Bernoulli polynomial".into()));
    }
    let len = n + 2;
    // ∏ (e^{ωt} - 1)/t = ∏ Σ ω^{k+1} t^k/(k+1)!
    let mut den = Series(vec![Complex64::new(0.0, 0.0); len]);
    den.0[0] = Complex64::new(1.0, 0.0);
    for &w in omegas {
        let e = Series::exp_linear(w, len + 1);
        den = den.mul(&Series(e.0[1..].to_vec()));
    }
    let g = den.recip()?.mul(&Series::exp_linear(z, len));
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(g.0[n] * fact)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// The "Re(cω) ∈ (C*)° for some c" condition, decided exactly: the values
/// `ω·x` over the edge rays must lie in an open half-plane through 0.
pub fn parameter_domain_ok(c: &Cone, omegas: &[Complex64]) -> bool {
    let mut args: Vec<f64> = Vec::new();
    for x in c.edge_rays() {
        let v: Complex64 = pair(omegas, &x);
        if v.norm() == 0.0 {
            return false;
        }
        args.push(v.arg());
    }
    args.sort_by(|a, b| a.total_cmp(b));
    let n = args.len();
    (0..n).any(|i| {
        let gap = if i + 1 < n {
            args[i + 1] - args[i]
        } else {
            args[0] + 2.0 * std::f64::consts::PI - args[n - 1]
        };
        gap > std::f64::consts::PI
    })
}

pub(crate) fn pair(omegas: &[Complex64], x: &IntVector) -> Complex64 {
    omegas
        .iter()
        .zip(x.entries())
        .map(|(w, &k)| w * k as f64)
        .sum()
}

fn check_domain(c: &Cone, omegas: &[Complex64]) -> Result<()> {
    if omegas.len() != c.dim() {
        return Err(Error::Domain(format!(
            "{} parameters for a {}-d cone",
            omegas.len(),
            c.dim()
        )));
    }
    if !parameter_domain_ok(c, omegas) {
        return Err(Error::Domain(
            "no rotation of the parameters lies in the interior of the dual cone".into(),
        ));
    }
    Ok(())
}

/// Sum over a 2-d ray chain `ρ_0..ρ_{n+1}` with `α_k = ω·ρ_k`:
/// `f(z|α_n, α_{n+1}) + Σ_{j<n} f(z + α_j|α_j, α_{j+1})`.
pub(crate) fn chain_sum<F>(z: Complex64, alphas: &[Complex64], mut f: F) -> Result<Complex64>
where
    F: FnMut(Complex64, Complex64, Complex64) -> Result<Complex64>,
{
    let n = alphas.len() - 2;
    let mut acc = f(z, alphas[n], alphas[n + 1])?;
    for j in 0..n {
        acc += f(z + alphas[j], alphas[j], alphas[j + 1])?;
    }
    Ok(acc)
}

pub(crate) fn chain_alphas(c: &Cone, omegas: &[Complex64]) -> Result<Vec<Complex64>> {
    Ok(regular_rays_2d(c)?.iter().map(|r| pair(omegas, r)).collect())
}

/// `B^C_{2,2}(z|ω)` of a 2-d cone.
pub fn bernoulli_cone_22(c: &Cone, z: Complex64, omegas: &[Complex64]) -> Result<Complex64> {
    if c.dim() != 2 {
        return Err(Error::Unsupported(format!("B22 of a {}-d cone", c.dim())));
    }
    check_domain(c, omegas)?;
    let al = chain_alphas(c, omegas)?;
    chain_sum(z, &al, |z, a, b| bernoulli_multiple(2, z, &[a, b]))
}

/// `B^C_{3,3}(z|ω)` of a 1-Gorenstein 3-d cone.
pub fn bernoulli_cone_33(c: &Cone, z: Complex64, omegas: &[Complex64]) -> Result<Complex64> {
    if c.dim() != 3 {
        return Err(Error::Unsupported(format!("B33 of a {}-d cone", c.dim())));
    }
    check_domain(c, omegas)?;
    let fan = gorenstein_fan(c).map_err(gorenstein_precondition)?;
    let w = fan.transform_omegas(omegas);
    // interior points on the ξ-axis contribute 3!·B_{1,1}(z|ω'_1)
    let mut acc = 6.0 * z / w[0] - 3.0;
    for (a, b) in fan.wedge_parameters(&w) {
        acc += bernoulli_multiple(3, z + a, &[w[0], a, b])?;
    }
    Ok(acc)
}

/// `B^{C̃}_{r+2,r+2}(z|ω, η)` for the lifted cone `C̃ = C × R_{≥0}`.
pub fn bernoulli_cone_lifted(
    c: &Cone,
    z: Complex64,
    omegas: &[Complex64],
    eta: Complex64,
) -> Result<Complex64> {
    if eta.norm() == 0.0 {
        return Err(Error::Domain("zero lift parameter".into()));
    }
    match c.dim() {
        2 => {
            check_domain(c, omegas)?;
            let al = chain_alphas(c, omegas)?;
            chain_sum(z, &al, |z, a, b| bernoulli_multiple(3, z, &[a, b, eta]))
        }
        3 => {
            check_domain(c, omegas)?;
            let fan = gorenstein_fan(c).map_err(gorenstein_precondition)?;
            let w = fan.transform_omegas(omegas);
            let mut acc = 12.0 * bernoulli_multiple(2, z, &[w[0], eta])?;
            for (a, b) in fan.wedge_parameters(&w) {
                acc += bernoulli_multiple(4, z + a, &[w[0], a, b, eta])?;
            }
            Ok(acc)
        }
        d => Err(Error::Unsupported(format!("lifted Bernoulli polynomial of a {d}-d cone"))),
    }
}

pub(crate) fn gorenstein_precondition(e: Error) -> Error {
    match e {
        Error::NotGorenstein => Error::Precondition("cone is not 1-Gorenstein".into()),
        Error::NotGood(s) => Error::Precondition(format!("cone is not good: {s}")),
        other => other,
    }
}

/// Coefficient `r!/k!` with which a relatively open `k`-dimensional piece
/// contributes to `B^C_{r,r}`.
pub fn piece_weight(r: usize, k: usize) -> f64 {
    factorial(r) / factorial(k)
}

//! q-shifted factorials, `θ₀`, multiple elliptic gamma `G_r` and multiple
//! sine `S_r`, evaluated in the exponentiated variables `x = e^{2πiz}`,
//! `q_j = e^{2πiω_j}` with an explicit truncation bound.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bernoulli::bernoulli_multiple;
use crate::error::{Error, Result};

/// Products with `|ln|q|| < RESONANCE_GUARD` are refused.
pub const RESONANCE_GUARD: f64 = 1e-6;

/// Ratios `ω_j/ω_k` with `|Im| <` this are treated as real.
pub const GENERIC_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    /// Bound on the discarded part of `ln (x|q)_∞`.
    pub tail_tol: f64,
    /// Pass/fail threshold for identity residuals.
    pub comparison_tol: f64,
    /// Cap on the number of product factors per q-factorial.
    pub max_terms: u64,
    /// Box radius for lattice enumerations.
    pub oracle_radius: i64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            tail_tol: 1e-14,
            comparison_tol: 1e-8,
            max_terms: 20_000_000,
            oracle_radius: 60,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tol > 0.0 && self.tail_tol < self.comparison_tol && self.comparison_tol < 1.0) {
            return Err(Error::Domain(format!(
                "need 0 < tail_tol ({}) < comparison_tol ({}) < 1",
                self.tail_tol, self.comparison_tol
            )));
        }
        if self.max_terms == 0 || self.oracle_radius <= 0 {
            return Err(Error::Domain("max_terms and oracle_radius must be positive".into()));
        }
        Ok(())
    }
}

/// How a q-factorial was evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Plethystic,
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub method: Method,
    pub terms: u64,
    /// Bound on the discarded part of the logarithm.
    pub tail_bound: f64,
}

/// `e^{2πi w}`.
pub fn expi(w: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI) * w).exp()
}

/// Relative residual `|a - b| / max(|a|, |b|)`; zero when both vanish.
pub fn relative_residual(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// `ln(1 - w)` without cancellation for small `w`.
fn ln_1m(w: Complex64) -> Complex64 {
    let re = 0.5 * (w.norm_sqr() - 2.0 * w.re).ln_1p();
    let im = (-w.im).atan2(1.0 - w.re);
    Complex64::new(re, im)
}

/// Compensated sum of logarithms; a `-∞` term (an exact zero of the
/// product) is recorded separately so it cannot poison the compensation.
#[derive(Default)]
struct Kahan {
    sum: Complex64,
    c: Complex64,
    zero: bool,
}

impl Kahan {
    fn total(&self) -> Complex64 {
        if self.zero {
            Complex64::new(f64::NEG_INFINITY, 0.0)
        } else {
            self.sum
        }
    }

    fn add(&mut self, v: Complex64) {
        if v.re == f64::NEG_INFINITY {
            self.zero = true;
            return;
        }
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

fn check_modulus(q: Complex64) -> Result<f64> {
    let m = q.norm();
    if !m.is_finite() || m == 0.0 {
        return Err(Error::Domain(format!("modulus {m} is not a finite nonzero number")));
    }
    if m == 1.0 {
        return Err(Error::NonConvergent { modulus: m });
    }
    let a = m.ln();
    if a.abs() < RESONANCE_GUARD {
        return Err(Error::IllConditioned { log_modulus: a });
    }
    Ok(a)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `(x|q̄)_∞` for arbitrary moduli off the unit circle.
pub fn qpoch(x: Complex64, qs: &[Complex64], cfg: &EvalConfig) -> Result<Complex64> {
    qpoch_meta(x, qs, cfg).map(|(v, _)| v)
}

pub fn qpoch_meta(x: Complex64, qs: &[Complex64], cfg: &EvalConfig) -> Result<(Complex64, Truncation)> {
    qpoch_ln(x, qs, cfg).map(|(l, meta)| (exp_ln(l), meta))
}

/// `exp` that maps a logarithm with infinite real part to `0` or `∞`
/// instead of a NaN-contaminated value.
pub fn exp_ln(l: Complex64) -> Complex64 {
    match l.re {
        f64::NEG_INFINITY => Complex64::new(0.0, 0.0),
        f64::INFINITY => Complex64::new(f64::INFINITY, 0.0),
        _ => l.exp(),
    }
}

/// A logarithm of `(x|q̄)_∞` (branch unspecified). Products of many
/// factorials should be assembled from these to avoid intermediate
/// overflow.
pub fn qpoch_ln(x: Complex64, qs: &[Complex64], cfg: &EvalConfig) -> Result<(Complex64, Truncation)> {
    let mut x = x;
    let mut inverted = false;
    let mut q = Vec::with_capacity(qs.len());
    for &qi in qs {
        let a = check_modulus(qi)?;
        if a > 0.0 {
            x /= qi;
            q.push(qi.inv());
            inverted = !inverted;
        } else {
            q.push(qi);
        }
    }
    let (log, meta) = log_qpoch_convergent(x, &q, cfg)?;
    Ok((if inverted { -log } else { log }, meta))
}

/// `ln (x|q̄)_∞` with all `|q_i| < 1`.
fn log_qpoch_convergent(x: Complex64, q: &[Complex64], cfg: &EvalConfig) -> Result<(Complex64, Truncation)> {
    if q.is_empty() {
        let meta = Truncation { method: Method::Exact, terms: 1, tail_bound: 0.0 };
        let mut acc = Kahan::default();
        acc.add(ln_1m(x));
        return Ok((acc.total(), meta));
    }
    let k = q.len();
    let a: Vec<f64> = q.iter().map(|qi| -qi.norm().ln()).collect();
    let xm = x.norm();
    let damp: f64 = q.iter().map(|qi| 1.0 / (1.0 - qi.norm().sqrt())).product();
    // Σ_{Σ a j > L} 2|x q^j| <= 2|x| e^{-L/2} ∏ 1/(1 - |q_i|^{1/2})
    let l = (2.0 * (2.0 * xm.max(f64::MIN_POSITIVE) * damp / cfg.tail_tol).ln()).max(0.0);
    let a_prod: f64 = a.iter().product();
    let est = a.iter().map(|ai| l / ai + 1.0).product::<f64>() / factorial(k);

    if xm < 0.9 {
        let mut plain: f64 = q.iter().map(|qi| 1.0 - qi.norm()).product();
        plain = plain.max(f64::MIN_POSITIVE);
        // Σ_{n>N} |x|^n / (n ∏(1-|q|^n)) <= |x|^{N+1} / ((N+1)(1-|x|) ∏(1-|q|))
        let mut n_terms = 1u64;
        let mut pow = xm;
        while pow * xm / ((n_terms + 1) as f64 * (1.0 - xm) * plain) > cfg.tail_tol {
            pow *= xm;
            n_terms += 1;
            if n_terms > 100_000 {
                break;
            }
        }
        if (n_terms as f64) * (k as f64) <= est.max(1.0) {
            let mut acc = Kahan::default();
            let mut xn = Complex64::new(1.0, 0.0);
            let mut qn: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); k];
            for n in 1..=n_terms {
                xn *= x;
                let mut den = Complex64::new(n as f64, 0.0);
                for (p, qi) in qn.iter_mut().zip(q) {
                    *p *= qi;
                    den *= Complex64::new(1.0, 0.0) - *p;
                }
                acc.add(-xn / den);
            }
            let tail = pow * xm / ((n_terms + 1) as f64 * (1.0 - xm) * plain);
            let meta = Truncation { method: Method::Plethystic, terms: n_terms, tail_bound: tail };
            return Ok((acc.total(), meta));
        }
    }

    if est > cfg.max_terms as f64 {
        let l_cap = (cfg.max_terms as f64 * factorial(k) * a_prod).powf(1.0 / k as f64);
        let tail = 2.0 * xm * (-l_cap / 2.0).exp() * damp;
        return Err(Error::Budget {
            terms: est.min(u64::MAX as f64) as u64,
            cap: cfg.max_terms,
            tail_estimate: tail,
        });
    }
    let mut acc = Kahan::default();
    let mut count = 0u64;
    simplex_sum(x, q, &a, l, 0, Complex64::new(1.0, 0.0), 0.0, &mut acc, &mut count);
    let tail = 2.0 * xm * (-l / 2.0).exp() * damp;
    Ok((acc.total(), Truncation { method: Method::Product, terms: count, tail_bound: tail }))
}

#[allow(clippy::too_many_arguments)]
fn simplex_sum(
    x: Complex64,
    q: &[Complex64],
    a: &[f64],
    l: f64,
    i: usize,
    mono: Complex64,
    used: f64,
    acc: &mut Kahan,
    count: &mut u64,
) {
    if i == q.len() {
        acc.add(ln_1m(x * mono));
        *count += 1;
        return;
    }
    let mut m = mono;
    let mut s = used;
    while s <= l {
        simplex_sum(x, q, a, l, i + 1, m, s, acc, count);
        m *= q[i];
        s += a[i];
    }
}

/// `(e^{2πiz} | e^{2πiω_0}, …)_∞`.
pub fn qfactorial(z: Complex64, omegas: &[Complex64], cfg: &EvalConfig) -> Result<Complex64> {
    let qs: Vec<Complex64> = omegas.iter().map(|&w| expi(w)).collect();
    qpoch(expi(z), &qs, cfg)
}

/// `G_r(z|ω_0, …, ω_r)`; `r = omegas.len() - 1`, so one parameter gives `θ₀`.
pub fn elliptic_gamma(z: Complex64, omegas: &[Complex64], cfg: &EvalConfig) -> Result<Complex64> {
    elliptic_gamma_ln(z, omegas, cfg).map(exp_ln)
}

/// A logarithm of `G_r(z|ω)`.
pub fn elliptic_gamma_ln(z: Complex64, omegas: &[Complex64], cfg: &EvalConfig) -> Result<Complex64> {
    if omegas.is_empty() {
        return Err(Error::Domain("G_r needs at least one parameter".into()));
    }
    let r = omegas.len() - 1;
    let qs: Vec<Complex64> = omegas.iter().map(|&w| expi(w)).collect();
    let total: Complex64 = omegas.iter().sum();
    let a = qpoch_ln(expi(total - z), &qs, cfg)?.0;
    let b = qpoch_ln(expi(z), &qs, cfg)?.0;
    Ok(if r.is_multiple_of(2) { a + b } else { a - b })
}

/// `G_r` through its second displayed product form,
/// `(x^{-1}|q̄^{-1})^{(-1)^{r+1}} (x|q̄)^{(-1)^r}`.
pub fn elliptic_gamma_inverted(z: Complex64, omegas: &[Complex64], cfg: &EvalConfig) -> Result<Complex64> {
    if omegas.is_empty() {
        return Err(Error::Domain("G_r needs at least one parameter".into()));
    }
    let r = omegas.len() - 1;
    let qinv: Vec<Complex64> = omegas.iter().map(|&w| expi(-w)).collect();
    let qs: Vec<Complex64> = omegas.iter().map(|&w| expi(w)).collect();
    let a = qpoch_ln(expi(-z), &qinv, cfg)?.0;
    let b = qpoch_ln(expi(z), &qs, cfg)?.0;
    Ok(exp_ln(if r.is_multiple_of(2) { b - a } else { a - b }))
}

/// `θ₀(z|τ) = G_0(z|τ)`.
pub fn theta0(z: Complex64, tau: Complex64, cfg: &EvalConfig) -> Result<Complex64> {
    elliptic_gamma(z, &[tau], cfg)
}

fn check_generic(omegas: &[Complex64]) -> Result<()> {
    for (j, wj) in omegas.iter().enumerate() {
        for (k, wk) in omegas.iter().enumerate() {
            if j != k && (wj / wk).im.abs() < GENERIC_FLOOR {
                return Err(Error::Precondition(format!(
                    "ratio ω_{j}/ω_{k} = {} is (numerically) real",
                    wj / wk
                )));
            }
        }
    }
    Ok(())
}

fn multiple_sine_ln_impl(z: Complex64, omegas: &[Complex64], cfg: &EvalConfig, second: bool) -> Result<Complex64> {
    let r = omegas.len();
    if r == 0 {
        return Err(Error::Domain("S_r needs at least one parameter".into()));
    }
    if omegas.iter().any(|w| w.norm() == 0.0) {
        return Err(Error::Domain("zero period".into()));
    }
    if r == 1 {
        return Ok((2.0 * (PI * z / omegas[0]).sin()).ln());
    }
    check_generic(omegas)?;
    let sign = if r.is_multiple_of(2) != second { 1.0 } else { -1.0 };
    let b = bernoulli_multiple(r, z, omegas)?;
    let mut log = Complex64::new(0.0, sign * PI / factorial(r)) * b;
    let s = if second { -1.0 } else { 1.0 };
    for k in 0..r {
        let qs: Vec<Complex64> = (0..r)
            .filter(|&j| j != k)
            .map(|j| expi(s * omegas[j] / omegas[k]))
            .collect();
        log += qpoch_ln(expi(s * z / omegas[k]), &qs, cfg)?.0;
    }
    Ok(log)
}

/// A logarithm of `S_r(z|ω)`.
pub fn multiple_sine_ln(z: Complex64, omegas: &[Complex64], cfg: &EvalConfig) -> Result<Complex64> {
    multiple_sine_ln_impl(z, omegas, cfg, false)
}

/// `S_r(z|ω)`: `2 sin(πz/ω)` for `r = 1`, otherwise the q-factorial
/// factorization with the `exp((-1)^r πi/r! B_{rr})` prefactor.
pub fn multiple_sine(z: Complex64, omegas: &[Complex64], cfg: &EvalConfig) -> Result<Complex64> {
    multiple_sine_ln_impl(z, omegas, cfg, false).map(exp_ln)
}

/// `S_r` through the inverted-variable factorization.
pub fn multiple_sine_inverted(z: Complex64, omegas: &[Complex64], cfg: &EvalConfig) -> Result<Complex64> {
    multiple_sine_ln_impl(z, omegas, cfg, true).map(exp_ln)
}

/// `|(x|q0,q1,…)/(x|q0,q0q1,…) · (x|q1^{-1},q0q1,…) - 1|`.
pub fn qfactorial_gluing_check(
    z: Complex64,
    w0: Complex64,
    w1: Complex64,
    rest: &[Complex64],
    cfg: &EvalConfig,
) -> Result<f64> {
    let with = |a: Complex64, b: Complex64| {
        let mut v = vec![a, b];
        v.extend_from_slice(rest);
        v
    };
    let p = qfactorial(z, &with(w0, w1), cfg)?;
    let d = qfactorial(z, &with(w0, w0 + w1), cfg)?;
    let m = qfactorial(z, &with(-w1, w0 + w1), cfg)?;
    Ok((p / d * m - 1.0).norm())
}

/// `|G_r(z|ω0,ω1,…)/G_r(z|ω0,ω0+ω1,…) · G_r(z|-ω1,ω0+ω1,…) - 1|`.
pub fn g_gluing_check(z: Complex64, omegas: &[Complex64], cfg: &EvalConfig) -> Result<f64> {
    if omegas.len() < 2 {
        return Err(Error::Domain("gluing needs at least two parameters".into()));
    }
    let (w0, w1) = (omegas[0], omegas[1]);
    if (w0 + w1).im.abs() < GENERIC_FLOOR {
        return Err(Error::Precondition("ω0 + ω1 is (numerically) real".into()));
    }
    let mut b = omegas.to_vec();
    b[1] = w0 + w1;
    let mut c = b.clone();
    c[0] = -w1;
    let v = elliptic_gamma(z, omegas, cfg)? / elliptic_gamma(z, &b, cfg)? * elliptic_gamma(z, &c, cfg)?;
    Ok((v - 1.0).norm())
}

/// `θ₀(z/τ | -1/τ) = e^{-πi B22(z|τ,-1)} θ₀(z|τ)`.
pub fn theta0_modularity_check(z: Complex64, tau: Complex64, cfg: &EvalConfig) -> Result<f64> {
    if tau.im <= 0.0 {
        return Err(Error::Domain("θ₀ modularity needs Im τ > 0".into()));
    }
    let lhs = theta0(z / tau, -1.0 / tau, cfg)?;
    let b = bernoulli_multiple(2, z, &[tau, Complex64::new(-1.0, 0.0)])?;
    let rhs = (Complex64::new(0.0, -PI) * b).exp() * theta0(z, tau, cfg)?;
    Ok(relative_residual(lhs, rhs))
}

/// `G_r(z|ω) = exp(2πi/(r+2)! B_{r+2,r+2}(z|ω,-1)) ∏_k G_r(z/ω_k | …, -1/ω_k)`.
pub fn g_modularity_sides(z: Complex64, omegas: &[Complex64], cfg: &EvalConfig) -> Result<(Complex64, Complex64)> {
    let r = omegas.len() - 1;
    check_generic(omegas)?;
    let lhs = elliptic_gamma(z, omegas, cfg)?;
    let mut ext = omegas.to_vec();
    ext.push(Complex64::new(-1.0, 0.0));
    let b = bernoulli_multiple(r + 2, z, &ext)?;
    let mut rhs = (Complex64::new(0.0, 2.0 * PI / factorial(r + 2)) * b).exp();
    for k in 0..=r {
        let mut args: Vec<Complex64> = (0..=r).filter(|&j| j != k).map(|j| omegas[j] / omegas[k]).collect();
        args.push(-1.0 / omegas[k]);
        rhs *= elliptic_gamma(z / omegas[k], &args, cfg)?;
    }
    Ok((lhs, rhs))
}

/// `∏_k G_{r-2}(z/ω_k | ω_j/ω_k) = exp(-2πi/r! B_{rr}(z|ω))`.
pub fn three_term_sides(z: Complex64, omegas: &[Complex64], cfg: &EvalConfig) -> Result<(Complex64, Complex64)> {
    let r = omegas.len();
    if r < 2 {
        return Err(Error::Domain("needs r >= 2".into()));
    }
    check_generic(omegas)?;
    let mut lhs = Complex64::new(1.0, 0.0);
    for k in 0..r {
        let args: Vec<Complex64> = (0..r).filter(|&j| j != k).map(|j| omegas[j] / omegas[k]).collect();
        lhs *= elliptic_gamma(z / omegas[k], &args, cfg)?;
    }
    let b = bernoulli_multiple(r, z, omegas)?;
    let rhs = (Complex64::new(0.0, -2.0 * PI / factorial(r)) * b).exp();
    Ok((lhs, rhs))
}

//! The sinh systems relating the Weyl parameters of products such as
//! D_a u D_a to the double coset coordinates of the compact Gelfand pairs.
//!
//! Everything runs on logarithms of sinh so the solvers stay finite for
//! arguments up to several hundred (sinh overflows past ~710).

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{
    kak_decompose, special_elements, su2_element, u_element, v_element, SpecialElement,
    SymplecticElement,
};

const LN2: f64 = std::f64::consts::LN_2;
/// Target on the log-residual of the solve_st equations.
const ST_TOL: f64 = 1e-12;

/// ln sinh x for x >= 0 (-inf at 0). Past x = 20 this is x - ln 2 plus the
/// correction ln(1 - e^{-2x}), so it never overflows.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - LN2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// asinh(e^l).
pub fn asinh_exp(l: f64) -> f64 {
    if l > 20.0 {
        l + (1.0 + (1.0 + (-2.0 * l).exp()).sqrt()).ln()
    } else {
        l.exp().asinh()
    }
}

/// ln(e^x + e^y).
fn ln_add(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// ln(sinh^2(2s) + sinh^2(s)).
fn ln_sigma(s: f64) -> f64 {
    if s == 0.0 {
        return f64::NEG_INFINITY;
    }
    // sinh^2 s / sinh^2 2s = 1 / (4 cosh^2 s)
    let c = s.cosh();
    2.0 * ln_sinh(2.0 * s) + (0.25 / (c * c)).ln_1p()
}

/// ln(sinh(2t) sinh(t)).
fn ln_pi(t: f64) -> f64 {
    if t == 0.0 {
        return f64::NEG_INFINITY;
    }
    ln_sinh(2.0 * t) + ln_sinh(t)
}

fn ln_sigma_deriv(s: f64) -> f64 {
    let c = s.cosh();
    let (s2, t2) = ((2.0 * s).sinh(), (2.0 * s).tanh());
    (4.0 / t2 + 1.0 / s2) / (1.0 + 0.25 / (c * c))
}

fn ln_pi_deriv(t: f64) -> f64 {
    2.0 / (2.0 * t).tanh() + 1.0 / t.tanh()
}

fn check_chamber(beta: f64, gamma: f64) -> Result<()> {
    if !(beta >= gamma && gamma >= 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("need beta >= gamma >= 0, got ({beta}, {gamma})")));
    }
    Ok(())
}

/// The scalars of one coset computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosetParams {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    /// a^2 - b^2 + c^2 - d^2, the SO(2) double coset label.
    pub r: f64,
    pub beta: f64,
    pub gamma: f64,
    pub s: f64,
    pub t: f64,
}

impl CosetParams {
    /// D_alpha u(a, b) D_alpha and the (s, t) matching its Weyl pair.
    pub fn from_hyperbola(alpha: f64, a: f64, b: f64) -> Result<Self> {
        let (beta, gamma) = solve_hyperbola(alpha, a, b)?;
        let st = solve_st(beta, gamma)?;
        let c2 = (1.0 - a * a - b * b).max(0.0);
        Ok(Self {
            alpha,
            a,
            b,
            r: r_label(a, b, c2.sqrt(), 0.0),
            beta,
            gamma,
            s: st.s,
            t: st.t,
        })
    }

    /// D'_alpha u v D'_alpha for u with label r.
    pub fn from_circle(alpha: f64, r: f64) -> Result<Self> {
        let (beta, gamma) = solve_circle(alpha, r)?;
        let st = solve_st(beta, gamma)?;
        let (a, b) = (((1.0 + r) / 2.0).sqrt(), ((1.0 - r) / 2.0).sqrt());
        Ok(Self {
            alpha,
            a,
            b,
            r,
            beta,
            gamma,
            s: st.s,
            t: st.t,
        })
    }
}

/// a^2 - b^2 + c^2 - d^2.
pub fn r_label(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a * a - b * b + c * c - d * d
}

/// (beta, gamma) with sinh b sinh g = sinh^2 a (1 - a^2 - b^2) and
/// sinh b - sinh g = sinh(2a) |a|.
pub fn solve_hyperbola(alpha: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
    }
    let rest = 1.0 - a * a - b * b;
    if !(rest >= -1e-12) {
        return Err(Error::Domain(format!("a^2 + b^2 = {} exceeds 1", a * a + b * b)));
    }
    if alpha == 0.0 {
        return Ok((0.0, 0.0));
    }
    let ln_a = 2.0 * ln_sinh(alpha) + rest.max(0.0).ln();
    let ln_b = ln_sinh(2.0 * alpha) + a.abs().ln();
    // sinh beta = (B + sqrt(B^2 + 4A)) / 2
    let ln_sb = if ln_a == f64::NEG_INFINITY {
        ln_b
    } else if ln_b == f64::NEG_INFINITY {
        0.5 * ln_a
    } else {
        let ln_r = 4f64.ln() + ln_a - 2.0 * ln_b; // ln(4A / B^2)
        if ln_r < 0.0 {
            ln_b + ((1.0 + (1.0 + ln_r.exp()).sqrt()) / 2.0).ln()
        } else {
            0.5 * ln_a + (-0.5 * ln_r).exp().asinh()
        }
    };
    let ln_sg = ln_a - ln_sb;
    let beta = asinh_exp(ln_sb);
    let gamma = if ln_sg == f64::NEG_INFINITY { 0.0 } else { asinh_exp(ln_sg).min(beta) };
    Ok((beta, gamma))
}

/// (beta, gamma) with sinh^2 b + sinh^2 g = sinh^2(2a) and
/// sinh b sinh g = sinh^2(2a) |r| / 2.
pub fn solve_circle(alpha: f64, r: f64) -> Result<(f64, f64)> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
    }
    if !(r.abs() <= 1.0 + 1e-12) {
        return Err(Error::Domain(format!("|r| must be <= 1, got {r}")));
    }
    if alpha == 0.0 {
        return Ok((0.0, 0.0));
    }
    let r = r.clamp(-1.0, 1.0);
    let ln_s = 2.0 * ln_sinh(2.0 * alpha);
    let root = (1.0 - r * r).max(0.0).sqrt();
    let ln_sb2 = ln_s + ((1.0 + root) / 2.0).ln();
    let ln_sg2 = ln_s + 2.0 * r.abs().ln() - (2.0 * (1.0 + root)).ln();
    let beta = asinh_exp(0.5 * ln_sb2);
    let gamma = if r == 0.0 { 0.0 } else { asinh_exp(0.5 * ln_sg2).min(beta) };
    Ok((beta, gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StSolution {
    pub s: f64,
    pub t: f64,
    /// Log-residuals of the two equations.
    pub residuals: [f64; 2],
    /// s - beta/4 and t - gamma/2.
    pub ineq_margins: [f64; 2],
}

/// Root of an increasing f on [lo, hi] by Newton steps safeguarded with
/// bisection.
fn bracketed_newton(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    start: f64,
) -> Result<f64> {
    let mut x = start.clamp(lo, hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx.abs() <= ST_TOL {
            return Ok(polish(&f, &df, x, fx));
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.max(1e-300) {
            return Ok(x);
        }
        let step = x - fx / df(x);
        x = if step > lo && step < hi && step.is_finite() { step } else { 0.5 * (lo + hi) };
    }
    Err(Error::Numeric("bracketed Newton did not converge".into()))
}

/// A few extra Newton steps past the tolerance, keeping the smallest |f|.
fn polish(f: &impl Fn(f64) -> f64, df: &impl Fn(f64) -> f64, mut x: f64, mut fx: f64) -> f64 {
    for _ in 0..3 {
        let y = x - fx / df(x);
        let fy = f(y);
        if !(fy.abs() < fx.abs()) {
            break;
        }
        (x, fx) = (y, fy);
    }
    x
}

/// (s, t) with sinh^2(2s) + sinh^2 s = sinh^2 b + sinh^2 g and
/// sinh(2t) sinh t = sinh b sinh g. Both left sides increase strictly, and
/// both roots lie in [0, beta].
pub fn solve_st(beta: f64, gamma: f64) -> Result<StSolution> {
    check_chamber(beta, gamma)?;
    let (lsb, lsg) = (ln_sinh(beta), ln_sinh(gamma));
    let (s, r1) = if beta == 0.0 {
        (0.0, 0.0)
    } else {
        let target = ln_add(2.0 * lsb, 2.0 * lsg);
        let f = |s: f64| ln_sigma(s) - target;
        let s = bracketed_newton(f, ln_sigma_deriv, 0.0, beta, beta / 2.0)?;
        (s, f(s))
    };
    let (t, r2) = if gamma == 0.0 {
        (0.0, 0.0)
    } else {
        let target = lsb + lsg;
        let f = |t: f64| ln_pi(t) - target;
        let t = bracketed_newton(f, ln_pi_deriv, 0.0, beta, (beta + gamma) / 3.0)?;
        (t, f(t))
    };
    let sol = StSolution {
        s,
        t,
        residuals: [r1, r2],
        ineq_margins: [s - beta / 4.0, t - gamma / 2.0],
    };
    if sol.ineq_margins.iter().any(|&m| m < -1e-12) {
        return Err(Error::Numeric(format!(
            "s >= beta/4 or t >= gamma/2 fails at ({beta}, {gamma}): margins {:?}",
            sol.ineq_margins
        )));
    }
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BgSolution {
    pub beta: f64,
    pub gamma: f64,
    /// 1 - |beta - 2s| and 1 - |gamma + 2s - 3t|, on the strip
    /// 1 <= t <= s <= 3t/2 only.
    pub ineq_margins: Option<[f64; 2]>,
}

/// (beta, gamma) from (s, t): sinh^2 b and sinh^2 g are the roots of
/// x^2 - Sigma x + Pi^2 with Sigma = sinh^2(2s) + sinh^2 s and
/// Pi = sinh(2t) sinh t.
pub fn solve_bg(s: f64, t: f64) -> Result<BgSolution> {
    if !(s >= t && t >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("need s >= t >= 0, got ({s}, {t})")));
    }
    invert_st(s, t)
}

/// The quadratic inversion of [`solve_bg`] without the s >= t requirement.
/// solve_st maps part of {beta >= gamma >= 0} to s < t, where the system is
/// still consistent; this inverts solve_st on its whole range.
pub fn invert_st(s: f64, t: f64) -> Result<BgSolution> {
    if !(s >= 0.0 && t >= 0.0) || !s.is_finite() || !t.is_finite() {
        return Err(Error::Domain(format!("need s, t >= 0, got ({s}, {t})")));
    }
    if s == 0.0 && t == 0.0 {
        return Ok(BgSolution {
            beta: 0.0,
            gamma: 0.0,
            ineq_margins: None,
        });
    }
    let ln_sig = ln_sigma(s);
    let ln_p = ln_pi(t);
    let rho = (2.0 * (2f64.ln() + ln_p - ln_sig)).exp(); // 4 Pi^2 / Sigma^2
    if 1.0 - rho < -1e-12 {
        return Err(Error::Numeric(format!("inconsistent system: discriminant {:.3e}", 1.0 - rho)));
    }
    let root = (1.0 - rho).max(0.0).sqrt();
    let ln_hi = ln_sig + ((1.0 + root) / 2.0).ln();
    let ln_lo = 2.0 * ln_p - ln_hi;
    let beta = asinh_exp(0.5 * ln_hi);
    let gamma = if t == 0.0 { 0.0 } else { asinh_exp(0.5 * ln_lo).min(beta) };
    let strip = 1.0 <= t && t <= s && s <= 1.5 * t;
    let ineq_margins = strip.then(|| [1.0 - (beta - 2.0 * s).abs(), 1.0 - (gamma + 2.0 * s - 3.0 * t).abs()]);
    if let Some(m) = ineq_margins {
        if m.iter().any(|&x| x < -1e-12) {
            return Err(Error::Numeric(format!("strip inequalities fail at ({s}, {t}): margins {m:?}")));
        }
    }
    Ok(BgSolution {
        beta,
        gamma,
        ineq_margins,
    })
}

/// D_alpha u(a, b) D_alpha.
pub fn hyperbola_element(alpha: f64, a: f64, b: f64) -> Result<SymplecticElement> {
    let d = special_elements(SpecialElement::DAlpha(alpha))?;
    Ok(d.mul(u_element(a, b)?.element()).mul(&d))
}

/// D'_alpha u v D'_alpha for u = [[a+ib, -c+id], [c+id, a-ib]].
pub fn circle_element(alpha: f64, abcd: [f64; 4]) -> Result<SymplecticElement> {
    let d = special_elements(SpecialElement::DPrime(alpha))?;
    let u = su2_element(abcd[0], abcd[1], abcd[2], abcd[3])?;
    Ok(d.mul(u.element()).mul(v_element().element()).mul(&d))
}

/// Largest deviation between solver output and the Weyl pair of the
/// corresponding matrix.
fn kak_gap(g: &SymplecticElement, beta: f64, gamma: f64) -> Result<f64> {
    let a = kak_decompose(g)?.a;
    Ok((a.alpha1() - beta).abs().max((a.alpha2() - gamma).abs()))
}

pub fn hyperbola_fidelity(alpha: f64, a: f64, b: f64) -> Result<f64> {
    let (beta, gamma) = solve_hyperbola(alpha, a, b)?;
    kak_gap(&hyperbola_element(alpha, a, b)?, beta, gamma)
}

pub fn circle_fidelity(alpha: f64, abcd: [f64; 4]) -> Result<f64> {
    let (beta, gamma) = solve_circle(alpha, r_label(abcd[0], abcd[1], abcd[2], abcd[3]))?;
    kak_gap(&circle_element(alpha, abcd)?, beta, gamma)
}

/// One solver-versus-matrix comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityRow {
    pub system: &'static str,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub beta: f64,
    pub gamma: f64,
    pub kak_alpha1: f64,
    pub kak_alpha2: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    pub hyperbola_cases: usize,
    pub circle_cases: usize,
    pub max_hyperbola_gap: f64,
    pub max_circle_gap: f64,
    pub failures: usize,
    #[serde(skip)]
    pub rows: Vec<FidelityRow>,
}

impl FidelityReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Compare solve_hyperbola and solve_circle against kak_decompose of
/// D_a u(a, b) D_a and D'_a u v D'_a, for `count` random instances of each
/// with alpha in [0, alpha_max]. (a, b) is uniform on the unit disc and
/// (a, b, c, d) uniform on the unit sphere of R^4.
pub fn fidelity_suite(count: usize, alpha_max: f64, seed: u64) -> Result<FidelityReport> {
    use rand::Rng;
    use rand_distr::StandardNormal;
    if !(alpha_max >= 0.0) || !alpha_max.is_finite() {
        return Err(Error::InvalidInput("alpha_max must be finite and >= 0".into()));
    }
    let mut rng = crate::schatten::restart_rng(seed, 1);
    let mut rows = Vec::with_capacity(2 * count);
    let mut failures = 0;
    for _ in 0..count {
        let alpha = rng.random_range(0.0..=alpha_max);
        let rad = rng.random_range(0.0f64..1.0).sqrt();
        let th = rng.random_range(0.0..std::f64::consts::TAU);
        let (a, b) = (rad * th.cos(), rad * th.sin());
        match solve_hyperbola(alpha, a, b).and_then(|(beta, gamma)| {
            let k = kak_decompose(&hyperbola_element(alpha, a, b)?)?.a;
            Ok((beta, gamma, k))
        }) {
            Ok((beta, gamma, k)) => rows.push(FidelityRow {
                system: "hyperbola",
                alpha,
                a,
                b,
                r: r_label(a, b, (1.0 - a * a - b * b).max(0.0).sqrt(), 0.0),
                beta,
                gamma,
                kak_alpha1: k.alpha1(),
                kak_alpha2: k.alpha2(),
                gap: (k.alpha1() - beta).abs().max((k.alpha2() - gamma).abs()),
            }),
            Err(_) => failures += 1,
        }
    }
    for _ in 0..count {
        let alpha = rng.random_range(0.0..=alpha_max);
        let mut v = [0.0f64; 4];
        for x in v.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let abcd = v.map(|x| x / norm);
        let r = r_label(abcd[0], abcd[1], abcd[2], abcd[3]);
        match solve_circle(alpha, r).and_then(|(beta, gamma)| {
            let k = kak_decompose(&circle_element(alpha, abcd)?)?.a;
            Ok((beta, gamma, k))
        }) {
            Ok((beta, gamma, k)) => rows.push(FidelityRow {
                system: "circle",
                alpha,
                a: abcd[0],
                b: abcd[1],
                r,
                beta,
                gamma,
                kak_alpha1: k.alpha1(),
                kak_alpha2: k.alpha2(),
                gap: (k.alpha1() - beta).abs().max((k.alpha2() - gamma).abs()),
            }),
            Err(_) => failures += 1,
        }
    }
    let max_gap = |sys: &str| rows.iter().filter(|r| r.system == sys).map(|r| r.gap).fold(0.0, f64::max);
    Ok(FidelityReport {
        hyperbola_cases: count,
        circle_cases: count,
        max_hyperbola_gap: max_gap("hyperbola"),
        max_circle_gap: max_gap("circle"),
        failures,
        rows,
    })
}

/// One row of a scan: beta,gamma,s,t,residual,ineq_margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub beta: f64,
    pub gamma: f64,
    pub s: f64,
    pub t: f64,
    pub residual: f64,
    pub ineq_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanSummary {
    pub points: usize,
    pub violations: usize,
    pub min_margin: f64,
    /// Largest |roundtrip - input| over the grid.
    pub max_roundtrip_error: f64,
    #[serde(skip)]
    pub rows: Vec<ScanRow>,
}

impl ScanSummary {
    fn from_rows(rows: Vec<ScanRow>, errors: usize, roundtrip: f64) -> Self {
        let violations = errors + rows.iter().filter(|r| !(r.ineq_margin >= 0.0)).count();
        let min_margin = rows.iter().map(|r| r.ineq_margin).fold(f64::INFINITY, f64::min);
        Self {
            points: rows.len() + errors,
            violations,
            min_margin,
            max_roundtrip_error: roundtrip,
            rows,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// solve_st over an n x n grid of {0 <= gamma <= beta <= beta_max}, counting
/// violations of s >= beta/4 and t >= gamma/2. The roundtrip error is
/// measured in (s, t): solve_st after the inversion must return the same
/// point. Measured in (beta, gamma) it degrades to sqrt(eps) on the diagonal,
/// where the inversion has a double root.
pub fn st_inequality_scan(n: usize, beta_max: f64) -> Result<ScanSummary> {
    if n < 2 || !(beta_max > 0.0) {
        return Err(Error::InvalidInput("need n >= 2 and beta_max > 0".into()));
    }
    let results: Vec<Result<(ScanRow, f64)>> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let beta = beta_max * (k / n) as f64 / (n - 1) as f64;
            let gamma = beta * (k % n) as f64 / (n - 1) as f64;
            let st = solve_st(beta, gamma)?;
            let back = invert_st(st.s, st.t)?;
            let again = solve_st(back.beta, back.gamma)?;
            let err = (again.s - st.s).abs().max((again.t - st.t).abs());
            Ok((
                ScanRow {
                    beta,
                    gamma,
                    s: st.s,
                    t: st.t,
                    residual: st.residuals[0].abs().max(st.residuals[1].abs()),
                    ineq_margin: st.ineq_margins[0].min(st.ineq_margins[1]),
                },
                err,
            ))
        })
        .collect();
    Ok(collect_scan(results))
}

/// solve_bg over an n x n grid of the strip 1 <= t <= s <= 3t/2, t <= t_max,
/// counting violations of |beta - 2s| <= 1 and |gamma + 2s - 3t| <= 1, and
/// checking that solve_st inverts it.
pub fn bg_strip_scan(n: usize, t_max: f64) -> Result<ScanSummary> {
    if n < 2 || !(t_max >= 1.0) {
        return Err(Error::InvalidInput("need n >= 2 and t_max >= 1".into()));
    }
    let results: Vec<Result<(ScanRow, f64)>> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let t = 1.0 + (t_max - 1.0) * (k / n) as f64 / (n - 1) as f64;
            let s = t + 0.5 * t * (k % n) as f64 / (n - 1) as f64;
            let bg = solve_bg(s, t)?;
            let back = solve_st(bg.beta, bg.gamma)?;
            let err = (back.s - s).abs().max((back.t - t).abs());
            let margins = bg.ineq_margins.unwrap_or([f64::INFINITY; 2]);
            Ok((
                ScanRow {
                    beta: bg.beta,
                    gamma: bg.gamma,
                    s,
                    t,
                    residual: back.residuals[0].abs().max(back.residuals[1].abs()),
                    ineq_margin: margins[0].min(margins[1]),
                },
                err,
            ))
        })
        .collect();
    Ok(collect_scan(results))
}

fn collect_scan(results: Vec<Result<(ScanRow, f64)>>) -> ScanSummary {
    let mut rows = Vec::with_capacity(results.len());
    let mut errors = 0;
    let mut roundtrip = 0.0f64;
    for r in results {
        match r {
            Ok((row, err)) => {
                roundtrip = roundtrip.max(err);
                rows.push(row);
            }
            Err(_) => errors += 1,
        }
    }
    ScanSummary::from_rows(rows, errors, roundtrip)
}

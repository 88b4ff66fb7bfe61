//! Jacobi and Legendre polynomials, the spherical functions of the Gelfand
//! pairs (U(2), U(1)) and (SU(2), SO(2)), and grid scans of their Hölder
//! estimates.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on |z| - 1 accepted by [`spherical_u2`].
const DISC_SLACK: f64 = 1e-12;

/// Index (l, m) of a spherical function of (U(2), U(1)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SphericalIndexU2 {
    pub l: u32,
    pub m: u32,
}

impl SphericalIndexU2 {
    pub fn new(l: u32, m: u32) -> Self {
        Self { l, m }
    }

    /// dim H_{l,m} = l + m + 1.
    pub fn dim(self) -> u32 {
        self.l + self.m + 1
    }
}

/// Index n of a spherical function of (SU(2), SO(2)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SphericalIndexSU2 {
    pub n: u32,
}

impl SphericalIndexSU2 {
    pub fn new(n: u32) -> Self {
        Self { n }
    }

    /// dim H_n = 2n + 1.
    pub fn dim(self) -> u32 {
        2 * self.n + 1
    }
}

fn check_interval(x: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("argument {x} outside [-1, 1]")));
    }
    Ok(())
}

/// Jacobi polynomials P_0..=P_{n_max} with parameters (a, b) at x, by the
/// forward three-term recurrence. No domain check.
pub fn jacobi_table(n_max: usize, a: f64, b: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(0.5 * (a - b) + 0.5 * (a + b + 2.0) * x);
    let ab = a + b;
    for k in 2..=n_max {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + a * a - b * b);
        let a3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
        let len = out.len();
        out.push((a2 * out[len - 1] - a3 * out[len - 2]) / a1);
    }
    out
}

/// Jacobi polynomial P_n^{(a,b)}(x) for x in [-1, 1]; Legendre is a = b = 0.
pub fn jacobi_eval(n: u32, a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::Domain(format!("Jacobi parameters must be >= 0, got ({a}, {b})")));
    }
    check_interval(x)?;
    Ok(*jacobi_table(n as usize, a, b, x).last().expect("nonempty"))
}

/// Legendre polynomials P_0..=P_{n_max}(x). No domain check.
pub fn legendre_table(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(x);
    for k in 2..=n_max {
        let k = k as f64;
        let len = out.len();
        out.push(((2.0 * k - 1.0) * x * out[len - 1] - (k - 1.0) * out[len - 2]) / k);
    }
    out
}

/// h^0_{l,m}(z) = z^{l-m} P_m^{(0,l-m)}(2|z|^2 - 1) for l >= m, and the
/// conjugate form for l < m. Defined on the closed unit disc.
pub fn spherical_u2(idx: SphericalIndexU2, z: Complex64) -> Result<Complex64> {
    let r = z.norm();
    if !r.is_finite() || r > 1.0 + DISC_SLACK {
        return Err(Error::Domain(format!("|z| = {r} exceeds 1")));
    }
    Ok(spherical_u2_unchecked(idx, z))
}

pub(crate) fn spherical_u2_unchecked(idx: SphericalIndexU2, z: Complex64) -> Complex64 {
    let x = (2.0 * z.norm_sqr() - 1.0).clamp(-1.0, 1.0);
    let (lo, shift, base) = if idx.l >= idx.m {
        (idx.m, idx.l - idx.m, z)
    } else {
        (idx.l, idx.m - idx.l, z.conj())
    };
    let jac = *jacobi_table(lo as usize, 0.0, shift as f64, x).last().expect("nonempty");
    base.powu(shift) * jac
}

/// All h^0_{l,m}(z) with l + m <= degree, in [`u2_indices`] order.
pub(crate) fn spherical_u2_all(degree: u32, z: Complex64) -> Vec<Complex64> {
    let x = (2.0 * z.norm_sqr() - 1.0).clamp(-1.0, 1.0);
    let zbar = z.conj();
    let mut out = Vec::new();
    for total in 0..=degree {
        for l in (0..=total).rev() {
            let m = total - l;
            let (lo, shift, base) = if l >= m { (m, l - m, z) } else { (l, m - l, zbar) };
            let jac = *jacobi_table(lo as usize, 0.0, shift as f64, x).last().expect("nonempty");
            out.push(base.powu(shift) * jac);
        }
    }
    out
}

/// Indices with l + m <= degree, grouped by total degree, l descending.
pub fn u2_indices(degree: u32) -> Vec<SphericalIndexU2> {
    (0..=degree)
        .flat_map(|total| (0..=total).rev().map(move |l| SphericalIndexU2::new(l, total - l)))
        .collect()
}

/// The Legendre polynomial P_n(r), r in [-1, 1].
pub fn spherical_su2(idx: SphericalIndexSU2, r: f64) -> Result<f64> {
    check_interval(r)?;
    Ok(*legendre_table(idx.n as usize, r).last().expect("nonempty"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    U2,
    SU2,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::U2 => "U2",
            Family::SU2 => "SU2",
        }
    }
}

/// Shape of a scanned bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// U2: |dh| <= C (l+m+1)^{3/4} |theta1 - theta2|.
    Lipschitz,
    /// U2: |dh| <= 2C (l+m+1)^{-1/4}.
    Oscillation,
    /// U2: |dh| <= 2^{3/4} C |theta1 - theta2|^{1/4}, with the scanned C.
    Combined,
    /// SU2: |P_n(x)| + |P_n(y)| <= 4 / sqrt(n).
    Sup,
    /// SU2: |P_n(x) - P_n(y)| <= 4 sqrt(n) |x - y|.
    Derivative,
    /// SU2: |P_n(x) - P_n(y)| <= 4 |x - y|^{1/2}.
    Holder,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Lipschitz => "lipschitz",
            BoundKind::Oscillation => "oscillation",
            BoundKind::Combined => "combined",
            BoundKind::Sup => "sup",
            BoundKind::Derivative => "derivative",
            BoundKind::Holder => "holder",
        }
    }
}

/// One (index, bound) line of a scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub family: Family,
    /// `l` for U2, absent for SU2.
    pub l: Option<u32>,
    /// `m` for U2, `n` for SU2.
    pub m_or_n: u32,
    pub bound_kind: BoundKind,
    /// Smallest constant making the bound hold on the grid.
    pub empirical_c: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub l: Option<u32>,
    pub m_or_n: u32,
    pub bound_kind: BoundKind,
    pub x: f64,
    pub y: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HoelderScanReport {
    pub family: Family,
    pub max_degree: u32,
    pub grid: usize,
    pub rows: Vec<ScanRow>,
    /// Smallest C covering the Lipschitz shape over all scanned indices (U2),
    /// or the derivative-bound constant (SU2).
    pub empirical_c_lipschitz: f64,
    /// Smallest C covering the oscillation shape (U2) or the sup shape (SU2).
    pub empirical_c_oscillation: f64,
    /// Single constant covering both shapes (U2), Hölder constant (SU2).
    pub empirical_c: f64,
    pub total_violations: usize,
    /// The first violations found, capped at [`MAX_RECORDED_VIOLATIONS`].
    pub violations: Vec<Violation>,
}

pub const MAX_RECORDED_VIOLATIONS: usize = 100;

impl HoelderScanReport {
    /// CSV with columns family,l,m_or_n,bound_kind,empirical_C,violations.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["family", "l", "m_or_n", "bound_kind", "empirical_C", "violations"])?;
        for r in &self.rows {
            w.write_record([
                r.family.as_str().to_string(),
                r.l.map(|l| l.to_string()).unwrap_or_default(),
                r.m_or_n.to_string(),
                r.bound_kind.as_str().to_string(),
                format!("{:.12e}", r.empirical_c),
                r.violations.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn exceeds(lhs: f64, rhs: f64) -> bool {
    lhs > rhs * (1.0 + 1e-12) + 1e-14
}

/// Scan the Hölder estimates of the spherical functions of `family` for all
/// indices of degree at most `max_degree` on a grid of `grid` points.
///
/// SU2 checks the three Legendre bounds with the explicit constant 4 on
/// `[-1/2, 1/2]`. U2 evaluates `h^0_{l,m}(e^{i theta}/sqrt 2)` on a uniform
/// theta grid of `[0, 2 pi)` and reports the smallest constant satisfying
/// both bound shapes, then checks the combined bound with that constant.
pub fn hoelder_bound_check(family: Family, max_degree: u32, grid: usize) -> Result<HoelderScanReport> {
    if max_degree < 1 {
        return Err(Error::Domain("max_degree must be >= 1".into()));
    }
    if grid < 100 {
        return Err(Error::Domain("grid must have at least 100 points".into()));
    }
    match family {
        Family::SU2 => Ok(scan_su2(max_degree, grid)),
        Family::U2 => Ok(scan_u2(max_degree, grid)),
    }
}

struct IndexScan {
    rows: Vec<ScanRow>,
    violations: Vec<Violation>,
    total: usize,
}

fn scan_su2(max_degree: u32, grid: usize) -> HoelderScanReport {
    let h = 1.0 / (grid - 1) as f64;
    let xs: Vec<f64> = (0..grid).map(|i| -0.5 + i as f64 * h).collect();
    let tables: Vec<Vec<f64>> = xs.iter().map(|&x| legendre_table(max_degree as usize, x)).collect();
    let dist: Vec<f64> = (0..grid).map(|k| k as f64 * h).collect();
    let sqrt_dist: Vec<f64> = dist.iter().map(|d| d.sqrt()).collect();

    let per_n: Vec<IndexScan> = (1..=max_degree)
        .into_par_iter()
        .map(|n| {
            let vals: Vec<f64> = tables.iter().map(|t| t[n as usize]).collect();
            let nf = n as f64;
            let sup_rhs = 4.0 / nf.sqrt();
            let (mut c_sup, mut c_der, mut c_hol) = (0.0f64, 0.0f64, 0.0f64);
            let (mut v_sup, mut v_der, mut v_hol) = (0usize, 0usize, 0usize);
            let mut recorded = Vec::new();
            let mut record = |kind, i: usize, j: usize, lhs, rhs| {
                if recorded.len() < MAX_RECORDED_VIOLATIONS {
                    recorded.push(Violation {
                        l: None,
                        m_or_n: n,
                        bound_kind: kind,
                        x: xs[i],
                        y: xs[j],
                        lhs,
                        rhs,
                    });
                }
            };
            for i in 0..grid {
                for j in i..grid {
                    let (a, b) = (vals[i], vals[j]);
                    let sum = a.abs() + b.abs();
                    c_sup = c_sup.max(sum * nf.sqrt());
                    if exceeds(sum, sup_rhs) {
                        v_sup += 1;
                        record(BoundKind::Sup, i, j, sum, sup_rhs);
                    }
                    if j == i {
                        continue;
                    }
                    let diff = (a - b).abs();
                    let d = dist[j - i];
                    c_der = c_der.max(diff / (nf.sqrt() * d));
                    let der_rhs = 4.0 * nf.sqrt() * d;
                    if exceeds(diff, der_rhs) {
                        v_der += 1;
                        record(BoundKind::Derivative, i, j, diff, der_rhs);
                    }
                    let sd = sqrt_dist[j - i];
                    c_hol = c_hol.max(diff / sd);
                    if exceeds(diff, 4.0 * sd) {
                        v_hol += 1;
                        record(BoundKind::Holder, i, j, diff, 4.0 * sd);
                    }
                }
            }
            let row = |kind, c, v| ScanRow {
                family: Family::SU2,
                l: None,
                m_or_n: n,
                bound_kind: kind,
                empirical_c: c,
                violations: v,
            };
            IndexScan {
                rows: vec![
                    row(BoundKind::Sup, c_sup, v_sup),
                    row(BoundKind::Derivative, c_der, v_der),
                    row(BoundKind::Holder, c_hol, v_hol),
                ],
                violations: recorded,
                total: v_sup + v_der + v_hol,
            }
        })
        .collect();
    assemble(Family::SU2, max_degree, grid, per_n, |kind| match kind {
        BoundKind::Derivative => 0,
        BoundKind::Sup => 1,
        _ => 2,
    })
}

fn scan_u2(max_degree: u32, grid: usize) -> HoelderScanReport {
    let step = std::f64::consts::TAU / grid as f64;
    let thetas: Vec<f64> = (0..grid).map(|k| k as f64 * step).collect();
    let indices = u2_indices(max_degree);
    let values: Vec<Vec<Complex64>> = thetas
        .par_iter()
        .map(|&t| spherical_u2_all(max_degree, Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, t)))
        .collect();

    // First pass: constants for each shape.
    let consts: Vec<(f64, f64)> = indices
        .par_iter()
        .enumerate()
        .map(|(k, idx)| {
            let vals: Vec<Complex64> = values.iter().map(|v| v[k]).collect();
            let d = idx.dim() as f64;
            let (mut c_lip, mut c_osc) = (0.0f64, 0.0f64);
            for i in 0..grid {
                for j in (i + 1)..grid {
                    let diff = (vals[i] - vals[j]).norm();
                    let dt = (j - i) as f64 * step;
                    c_lip = c_lip.max(diff / (d.powf(0.75) * dt));
                    c_osc = c_osc.max(diff * d.powf(0.25) / 2.0);
                }
            }
            (c_lip, c_osc)
        })
        .collect();
    let c_global = consts.iter().fold(0.0f64, |acc, &(a, b)| acc.max(a).max(b));
    let combined_scale = 2f64.powf(0.75) * c_global;

    // Second pass: the combined Hölder bound with the scanned constant.
    let per_idx: Vec<IndexScan> = indices
        .par_iter()
        .enumerate()
        .map(|(k, idx)| {
            let vals: Vec<Complex64> = values.iter().map(|v| v[k]).collect();
            let mut c_comb = 0.0f64;
            let mut count = 0usize;
            let mut recorded = Vec::new();
            for i in 0..grid {
                for j in (i + 1)..grid {
                    let diff = (vals[i] - vals[j]).norm();
                    let dt = (j - i) as f64 * step;
                    let q = dt.powf(0.25);
                    c_comb = c_comb.max(diff / (2f64.powf(0.75) * q));
                    let rhs = combined_scale * q;
                    if exceeds(diff, rhs) {
                        count += 1;
                        if recorded.len() < MAX_RECORDED_VIOLATIONS {
                            recorded.push(Violation {
                                l: Some(idx.l),
                                m_or_n: idx.m,
                                bound_kind: BoundKind::Combined,
                                x: thetas[i],
                                y: thetas[j],
                                lhs: diff,
                                rhs,
                            });
                        }
                    }
                }
            }
            let (c_lip, c_osc) = consts[k];
            let row = |kind, c, v| ScanRow {
                family: Family::U2,
                l: Some(idx.l),
                m_or_n: idx.m,
                bound_kind: kind,
                empirical_c: c,
                violations: v,
            };
            IndexScan {
                rows: vec![
                    row(BoundKind::Lipschitz, c_lip, 0),
                    row(BoundKind::Oscillation, c_osc, 0),
                    row(BoundKind::Combined, c_comb, count),
                ],
                violations: recorded,
                total: count,
            }
        })
        .collect();
    let mut report = assemble(Family::U2, max_degree, grid, per_idx, |kind| match kind {
        BoundKind::Lipschitz => 0,
        BoundKind::Oscillation => 1,
        _ => 3,
    });
    report.empirical_c = c_global;
    report
}

/// Merge per-index scans; `slot` routes each bound kind to the
/// lipschitz (0), oscillation (1) or headline (2) constant, 3 = ignored.
fn assemble(
    family: Family,
    max_degree: u32,
    grid: usize,
    parts: Vec<IndexScan>,
    slot: impl Fn(BoundKind) -> usize,
) -> HoelderScanReport {
    let mut c = [0.0f64; 4];
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut total = 0;
    for part in parts {
        for r in &part.rows {
            let s = slot(r.bound_kind);
            c[s] = c[s].max(r.empirical_c);
        }
        rows.extend(part.rows);
        total += part.total;
        for v in part.violations {
            if violations.len() < MAX_RECORDED_VIOLATIONS {
                violations.push(v);
            }
        }
    }
    HoelderScanReport {
        family,
        max_degree,
        grid,
        rows,
        empirical_c_lipschitz: c[0],
        empirical_c_oscillation: c[1],
        empirical_c: c[2],
        total_violations: total,
        violations,
    }
}

/// Safety factor applied to the scanned U2 constant when it is used as the
/// default for downstream certificate constants.
pub const C_U2_SAFETY: f64 = 1.5;

/// Default degree and grid of the U2 scan that calibrates C.
pub const C_U2_SCAN_DEGREE: u32 = 40;
pub const C_U2_SCAN_GRID: usize = 512;

/// Empirical U2 Hölder constant (degree 40, 512-point grid) times 1.5.
pub fn default_c_u2() -> f64 {
    let report = scan_u2(C_U2_SCAN_DEGREE, C_U2_SCAN_GRID);
    report.empirical_c * C_U2_SAFETY
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn binom_real(top: f64, k: u32) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (top - i as f64) / (i + 1) as f64)
    }

    // Explicit sum: P_n^{(a,b)}(x) = sum_s C(n+a, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^{n-s}.
    fn jacobi_explicit(n: u32, a: f64, b: f64, x: f64) -> f64 {
        (0..=n)
            .map(|s| {
                binom_real(n as f64 + a, n - s)
                    * binom_real(n as f64 + b, s)
                    * ((x - 1.0) / 2.0).powi(s as i32)
                    * ((x + 1.0) / 2.0).powi((n - s) as i32)
            })
            .sum()
    }

    #[test]
    fn jacobi_degree_zero_is_one() {
        for &(a, b, x) in &[(0.0, 0.0, 0.3), (2.0, 5.0, -1.0), (0.5, 1.5, 1.0)] {
            assert_eq!(jacobi_eval(0, a, b, x).unwrap(), 1.0);
        }
    }

    #[test]
    fn jacobi_at_one_is_binomial() {
        for n in 0..12u32 {
            for &a in &[0.0, 1.0, 2.5, 4.0] {
                let expect = binom_real(n as f64 + a, n);
                let got = jacobi_eval(n, a, 3.0, 1.0).unwrap();
                assert!((got - expect).abs() <= 1e-10 * expect.max(1.0), "n={n} a={a}");
            }
            assert!((jacobi_eval(n, 0.0, 7.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn central_legendre_value() {
        let v = jacobi_eval(10, 0.0, 0.0, 0.0).unwrap();
        assert!((v + 63.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_domain_is_strict() {
        assert!(matches!(jacobi_eval(3, 0.0, 0.0, 1.0 + 1e-15), Err(Error::Domain(_))));
        assert!(matches!(jacobi_eval(3, 0.0, 0.0, -1.5), Err(Error::Domain(_))));
        assert!(jacobi_eval(3, -1.0, 0.0, 0.0).is_err());
        assert!(spherical_su2(SphericalIndexSU2::new(2), 1.2).is_err());
    }

    #[test]
    fn recurrence_matches_explicit_sum() {
        for n in 0..=8u32 {
            for &(a, b) in &[(0.0, 0.0), (0.0, 3.0), (1.5, 0.5), (2.0, 6.0)] {
                for k in 0..=20 {
                    let x = -1.0 + 0.1 * k as f64;
                    let r = jacobi_eval(n, a, b, x).unwrap();
                    let e = jacobi_explicit(n, a, b, x);
                    assert!((r - e).abs() < 1e-10 * e.abs().max(1.0), "n={n} a={a} b={b} x={x}");
                }
            }
        }
    }

    #[test]
    fn u2_examples() {
        let v = spherical_u2(SphericalIndexU2::new(3, 0), c(0.5, 0.0)).unwrap();
        assert!((v - c(0.125, 0.0)).norm() < 1e-15);
        for idx in u2_indices(8) {
            let one = spherical_u2(idx, c(1.0, 0.0)).unwrap();
            assert!((one - c(1.0, 0.0)).norm() < 1e-12, "{idx:?}");
        }
        for &r in &[0.1, 0.5, 0.9] {
            let z = c(0.0, r);
            let a = spherical_u2(SphericalIndexU2::new(0, 2), z).unwrap();
            let b = spherical_u2(SphericalIndexU2::new(2, 0), z).unwrap();
            assert!((a - b.conj()).norm() < 1e-15);
        }
        assert!(spherical_u2(SphericalIndexU2::new(1, 1), c(1.0, 1e-3)).is_err());
        assert!(spherical_u2(SphericalIndexU2::new(1, 1), c(1.0 + 1e-13, 0.0)).is_ok());
    }

    #[test]
    fn u2_batch_matches_single() {
        let z = c(0.3, -0.55);
        let all = spherical_u2_all(6, z);
        for (k, idx) in u2_indices(6).into_iter().enumerate() {
            assert!((all[k] - spherical_u2(idx, z).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn su2_examples() {
        assert_eq!(spherical_su2(SphericalIndexSU2::new(1), 0.37).unwrap(), 0.37);
        assert!((spherical_su2(SphericalIndexSU2::new(2), 0.4).unwrap() + 0.26).abs() < 1e-15);
        for n in 0..40 {
            assert!((spherical_su2(SphericalIndexSU2::new(n), 1.0).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn legendre_sign_changes() {
        let grid = 20_000;
        for n in 0..=50u32 {
            let mut changes = 0;
            let mut prev = spherical_su2(SphericalIndexSU2::new(n), -1.0 + 1e-9).unwrap();
            for k in 1..grid {
                let x = -1.0 + 2.0 * k as f64 / grid as f64;
                let v = spherical_su2(SphericalIndexSU2::new(n), x).unwrap();
                if v != 0.0 && prev != 0.0 && v.signum() != prev.signum() {
                    changes += 1;
                }
                if v != 0.0 {
                    prev = v;
                }
            }
            assert_eq!(changes, n, "n={n}");
        }
    }

    #[test]
    fn u2_boundary_collapse() {
        for idx in u2_indices(7) {
            for k in 0..16 {
                let theta = 0.4 * k as f64;
                let got = spherical_u2(idx, Complex64::from_polar(1.0, theta)).unwrap();
                let shift = idx.l as f64 - idx.m as f64;
                let expect = Complex64::from_polar(1.0, shift * theta);
                assert!((got - expect).norm() < 1e-10, "{idx:?} theta={theta}");
            }
        }
    }

    proptest! {
        #[test]
        fn u2_bounded_on_disc(l in 0u32..15, m in 0u32..15, r in 0.0f64..=1.0, t in 0.0f64..6.3) {
            let v = spherical_u2(SphericalIndexU2::new(l, m), Complex64::from_polar(r, t)).unwrap();
            prop_assert!(v.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn su2_scan_small() {
        let rep = hoelder_bound_check(Family::SU2, 10, 201).unwrap();
        assert_eq!(rep.total_violations, 0);
        assert!(rep.violations.is_empty());
        assert_eq!(rep.rows.len(), 30);
    }

    #[test]
    fn p10_sup_on_half_interval() {
        let max = (0..=2000)
            .map(|k| -0.5 + k as f64 / 2000.0)
            .map(|x| spherical_su2(SphericalIndexSU2::new(10), x).unwrap().abs())
            .fold(0.0, f64::max);
        assert!(max <= 4.0 / 10f64.sqrt());
        // Interior maximum near x = 0.2958, above |P_10(0)| = 63/256.
        assert!(max > 63.0 / 256.0);
        assert!((max - 0.251_749_827).abs() < 1e-6, "{max}");
    }

    #[test]
    fn scan_argument_checks() {
        assert!(hoelder_bound_check(Family::U2, 0, 500).is_err());
        assert!(hoelder_bound_check(Family::SU2, 5, 50).is_err());
    }

    #[test]
    fn u2_scan_is_consistent() {
        let rep = hoelder_bound_check(Family::U2, 8, 128).unwrap();
        assert!(rep.empirical_c.is_finite() && rep.empirical_c > 0.0);
        assert_eq!(rep.total_violations, 0);
        assert!(rep.empirical_c >= rep.empirical_c_lipschitz);
        assert!(rep.empirical_c >= rep.empirical_c_oscillation);
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("family,l,m_or_n,bound_kind,empirical_C,violations\n"));
        assert_eq!(text.lines().count(), 1 + rep.rows.len());
    }
}

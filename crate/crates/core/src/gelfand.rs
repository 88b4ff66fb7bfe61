//! Peter–Weyl coefficients of bi-invariant functions for the compact Gelfand
//! pairs (U(2), U(1)) and (SU(2), SO(2)), the l^p lower bound they give on
//! multiplier norms, the discretized kernel operator whose Schatten norm
//! realizes that bound, and Monte Carlo K-averaging.
//!
//! Measures. The double coset space of (U(2), U(1)) is the closed disc, with
//! `u -> u_11` pushing normalized Haar measure to `dA / pi`; the homogeneous
//! space is the unit sphere of C^2 via `u -> u e_1`. For (SU(2), SO(2)) the
//! double coset label `r` in [-1, 1] carries `dr / 2`, and the homogeneous
//! space is S^2 with `psi(x, y) = phi^0(x . y)`.

use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::{haar_u1_in_u2, haar_u2};
use crate::quadrature::{gauss_legendre_probability, Rule};
use crate::schatten::{
    ms_norm_lower, norm_from_singular_values, restart_rng, singular_values, FiniteMatrix,
    MultiplierSymbol, NormEstimate, SchattenExponent, SearchConfig,
};
use crate::special_fn::{
    legendre_table, spherical_u2_all, u2_indices, SphericalIndexSU2, SphericalIndexU2,
};

/// Default truncation degree of computed spectra.
pub const DEFAULT_TRUNCATION: u32 = 24;

/// phi^0 on the closed unit disc for a U(1)-bi-invariant phi on U(2).
#[derive(Clone)]
pub struct BiInvariantFunctionU2(Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>);

impl BiInvariantFunctionU2 {
    pub fn new(f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.0)(z)
    }

    /// phi(u) = phi^0(u_11).
    pub fn eval_group(&self, u: &Matrix2<Complex64>) -> Complex64 {
        self.eval(u[(0, 0)])
    }
}

/// phi^0 on [-1, 1] for an SO(2)-bi-invariant phi on SU(2).
#[derive(Clone)]
pub struct BiInvariantFunctionSU2(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>);

impl BiInvariantFunctionSU2 {
    pub fn new(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        (self.0)(r)
    }

    /// phi(u) = phi^0(a^2 - b^2 + c^2 - d^2) for u = [[a+ib, -c+id], [c+id, a-ib]].
    pub fn eval_group(&self, u: &Matrix2<Complex64>) -> Complex64 {
        let (ab, cd) = (u[(0, 0)], u[(1, 0)]);
        self.eval(ab.re * ab.re - ab.im * ab.im + cd.re * cd.re - cd.im * cd.im)
    }
}

#[derive(Clone)]
pub enum BiInvariantFunction {
    U2(BiInvariantFunctionU2),
    SU2(BiInvariantFunctionSU2),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairTag {
    U2,
    SU2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpectrumIndex {
    U2(SphericalIndexU2),
    SU2(SphericalIndexSU2),
}

impl SpectrumIndex {
    pub fn dim(self) -> u32 {
        match self {
            SpectrumIndex::U2(i) => i.dim(),
            SpectrumIndex::SU2(i) => i.dim(),
        }
    }

    pub fn degree(self) -> u32 {
        match self {
            SpectrumIndex::U2(i) => i.l + i.m,
            SpectrumIndex::SU2(i) => i.n,
        }
    }

    fn pair(self) -> PairTag {
        match self {
            SpectrumIndex::U2(_) => PairTag::U2,
            SpectrumIndex::SU2(_) => PairTag::SU2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub index: SpectrumIndex,
    pub coeff: Complex64,
}

impl SpectrumEntry {
    pub fn dim(&self) -> u32 {
        self.index.dim()
    }
}

/// Wire form of one entry: `{l, m, re, im, dim}` or `{n, re, im, dim}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    l: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
    re: f64,
    im: f64,
    dim: u32,
}

/// Peter–Weyl coefficients `c_pi = <phi, h_pi>` of a bi-invariant function,
/// so that `phi^0 = sum c_pi dim(H_pi) h^0_pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSpectrum {
    pair: PairTag,
    entries: Vec<SpectrumEntry>,
    truncation: u32,
}

impl CoefficientSpectrum {
    pub fn new(pair: PairTag, entries: Vec<SpectrumEntry>, truncation: u32) -> Result<Self> {
        for e in &entries {
            if e.index.pair() != pair {
                return Err(Error::InvalidInput("spectrum index does not match pair tag".into()));
            }
            if e.index.degree() > truncation {
                return Err(Error::InvalidInput(format!(
                    "index of degree {} beyond truncation {truncation}",
                    e.index.degree()
                )));
            }
            if !e.coeff.re.is_finite() || !e.coeff.im.is_finite() {
                return Err(Error::InvalidInput("non-finite coefficient".into()));
            }
        }
        Ok(Self {
            pair,
            entries,
            truncation,
        })
    }

    pub fn pair(&self) -> PairTag {
        self.pair
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn coeff(&self, index: SpectrumIndex) -> Complex64 {
        self.entries
            .iter()
            .find(|e| e.index == index)
            .map_or(Complex64::new(0.0, 0.0), |e| e.coeff)
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<EntryJson> = self
            .entries
            .iter()
            .map(|e| {
                let (l, m, n) = match e.index {
                    SpectrumIndex::U2(i) => (Some(i.l), Some(i.m), None),
                    SpectrumIndex::SU2(i) => (None, None, Some(i.n)),
                };
                EntryJson {
                    l,
                    m,
                    n,
                    re: e.coeff.re,
                    im: e.coeff.im,
                    dim: e.dim(),
                }
            })
            .collect();
        Ok(serde_json::to_string(&rows)?)
    }

    /// Parse a JSON array of entries. The truncation is the largest degree.
    pub fn from_json(text: &str) -> Result<Self> {
        let rows: Vec<EntryJson> = serde_json::from_str(text)?;
        let mut entries = Vec::with_capacity(rows.len());
        let mut pair = None;
        for r in rows {
            let index = match (r.l, r.m, r.n) {
                (Some(l), Some(m), None) => SpectrumIndex::U2(SphericalIndexU2::new(l, m)),
                (None, None, Some(n)) => SpectrumIndex::SU2(SphericalIndexSU2::new(n)),
                _ => return Err(Error::InvalidInput("entry needs either {l, m} or {n}".into())),
            };
            if index.dim() != r.dim {
                return Err(Error::InvalidInput(format!(
                    "dim {} does not match index (expected {})",
                    r.dim,
                    index.dim()
                )));
            }
            if *pair.get_or_insert(index.pair()) != index.pair() {
                return Err(Error::InvalidInput("mixed U2 and SU2 entries".into()));
            }
            entries.push(SpectrumEntry {
                index,
                coeff: Complex64::new(r.re, r.im),
            });
        }
        let truncation = entries.iter().map(|e| e.index.degree()).max().unwrap_or(0);
        Self::new(pair.unwrap_or(PairTag::SU2), entries, truncation)
    }

    /// CSV for plotting |c| against degree: degree,l,m_or_n,dim,abs_c,re,im.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["degree", "l", "m_or_n", "dim", "abs_c", "re", "im"])?;
        for e in &self.entries {
            let (l, mn) = match e.index {
                SpectrumIndex::U2(i) => (i.l.to_string(), i.m),
                SpectrumIndex::SU2(i) => (String::new(), i.n),
            };
            w.write_record([
                e.index.degree().to_string(),
                l,
                mn.to_string(),
                e.dim().to_string(),
                format!("{:.12e}", e.coeff.norm()),
                format!("{:.12e}", e.coeff.re),
                format!("{:.12e}", e.coeff.im),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A small catalog of test functions, by name.
///
/// U2 (functions of z = u_11 on the disc): `one`, `z`, `abs2` (|z|^2),
/// `h:L,M` (the spherical function h^0_{L,M}), `gauss:C` (exp(-C |1 - z|^2)).
/// SU2 (functions of r in [-1, 1]): `one`, `r`, `r2`, `legendre:N`,
/// `exp:C` (e^{C r}).
pub fn named_function(pair: PairTag, name: &str) -> Result<BiInvariantFunction> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let bad = || Error::InvalidInput(format!("unknown {pair:?} function '{name}'"));
    let num = |a: Option<&str>| -> Result<f64> {
        a.and_then(|a| a.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite())
            .ok_or_else(bad)
    };
    let one = Complex64::new(1.0, 0.0);
    match pair {
        PairTag::U2 => {
            let f = match (head, arg) {
                ("one", None) => BiInvariantFunctionU2::new(move |_| one),
                ("z", None) => BiInvariantFunctionU2::new(|z| z),
                ("abs2", None) => BiInvariantFunctionU2::new(|z| Complex64::new(z.norm_sqr(), 0.0)),
                ("h", Some(a)) => {
                    let (l, m) = a.split_once(',').ok_or_else(bad)?;
                    let idx = SphericalIndexU2::new(
                        l.trim().parse().map_err(|_| bad())?,
                        m.trim().parse().map_err(|_| bad())?,
                    );
                    BiInvariantFunctionU2::new(move |z| crate::special_fn::spherical_u2_unchecked(idx, z))
                }
                ("gauss", a) => {
                    let c = num(a)?;
                    BiInvariantFunctionU2::new(move |z| Complex64::new((-c * (one - z).norm_sqr()).exp(), 0.0))
                }
                _ => return Err(bad()),
            };
            Ok(BiInvariantFunction::U2(f))
        }
        PairTag::SU2 => {
            let f = match (head, arg) {
                ("one", None) => BiInvariantFunctionSU2::new(move |_| one),
                ("r", None) => BiInvariantFunctionSU2::new(|r| Complex64::new(r, 0.0)),
                ("r2", None) => BiInvariantFunctionSU2::new(|r| Complex64::new(r * r, 0.0)),
                ("legendre", Some(a)) => {
                    let n: usize = a.trim().parse().map_err(|_| bad())?;
                    BiInvariantFunctionSU2::new(move |r| {
                        Complex64::new(*legendre_table(n, r.clamp(-1.0, 1.0)).last().expect("nonempty"), 0.0)
                    })
                }
                ("exp", a) => {
                    let c = num(a)?;
                    BiInvariantFunctionSU2::new(move |r| Complex64::new((c * r).exp(), 0.0))
                }
                _ => return Err(bad()),
            };
            Ok(BiInvariantFunction::SU2(f))
        }
    }
}

/// Tensor rule on the disc: Gauss–Legendre in |z|^2, uniform in arg z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscQuadrature {
    pub radial: usize,
    pub angular: usize,
}

impl DiscQuadrature {
    /// Order 4L in both directions (at least 4 radial and 8 angular nodes).
    pub fn for_truncation(l: u32) -> Self {
        let base = (4 * l as usize).max(4);
        Self {
            radial: base,
            angular: (base + 1).max(8),
        }
    }

    /// Nodes z and weights for `(1/pi) dA`.
    pub fn nodes(&self) -> Result<Vec<(Complex64, f64)>> {
        let radial = gauss_legendre_probability(self.radial, 0.0, 1.0)?;
        if self.angular == 0 {
            return Err(Error::Domain("angular order must be >= 1".into()));
        }
        let step = std::f64::consts::TAU / self.angular as f64;
        let mut out = Vec::with_capacity(self.radial * self.angular);
        for (w, rw) in radial.nodes.iter().zip(&radial.weights) {
            for k in 0..self.angular {
                out.push((Complex64::from_polar(w.sqrt(), k as f64 * step), rw / self.angular as f64));
            }
        }
        Ok(out)
    }

    fn check(&self, l: u32) -> Result<()> {
        if self.radial < l as usize + 1 || self.angular < 2 * l as usize + 1 {
            return Err(Error::UnderResolved(format!(
                "disc rule {}x{} cannot resolve degree {l} (need >= {} radial, >= {} angular)",
                self.radial,
                self.angular,
                l + 1,
                2 * l + 1
            )));
        }
        Ok(())
    }
}

/// `c_{l,m} = (1/pi) \int_D phi^0(z) conj(h^0_{l,m}(z)) dA(z)` for l + m <= L.
pub fn coefficients_u2(
    phi: &BiInvariantFunctionU2,
    truncation: u32,
    quad: Option<DiscQuadrature>,
) -> Result<CoefficientSpectrum> {
    let quad = quad.unwrap_or_else(|| DiscQuadrature::for_truncation(truncation));
    quad.check(truncation)?;
    let nodes = quad.nodes()?;
    let indices = u2_indices(truncation);
    let partials: Vec<Vec<Complex64>> = nodes
        .par_chunks(256)
        .map(|chunk| {
            let mut acc = vec![Complex64::new(0.0, 0.0); indices.len()];
            for &(z, w) in chunk {
                let f = phi.eval(z) * w;
                for (a, h) in acc.iter_mut().zip(spherical_u2_all(truncation, z)) {
                    *a += f * h.conj();
                }
            }
            acc
        })
        .collect();
    let mut sums = vec![Complex64::new(0.0, 0.0); indices.len()];
    for part in partials {
        for (s, v) in sums.iter_mut().zip(part) {
            *s += v;
        }
    }
    let entries = indices
        .into_iter()
        .zip(sums)
        .map(|(i, c)| SpectrumEntry {
            index: SpectrumIndex::U2(i),
            coeff: c,
        })
        .collect();
    CoefficientSpectrum::new(PairTag::U2, entries, truncation)
}

/// `c_n = (1/2) \int_{-1}^{1} phi^0(r) P_n(r) dr` for n <= N, by an
/// `order`-point Gauss–Legendre rule (default 2N + 16).
pub fn coefficients_su2(
    phi: &BiInvariantFunctionSU2,
    truncation: u32,
    order: Option<usize>,
) -> Result<CoefficientSpectrum> {
    let order = order.unwrap_or(2 * truncation as usize + 16);
    if order < truncation as usize + 1 {
        return Err(Error::UnderResolved(format!(
            "Gauss-Legendre order {order} cannot resolve degree {truncation}"
        )));
    }
    let rule = gauss_legendre_probability(order, -1.0, 1.0)?;
    let mut sums = vec![Complex64::new(0.0, 0.0); truncation as usize + 1];
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        let f = phi.eval(r) * w;
        for (s, p) in sums.iter_mut().zip(legendre_table(truncation as usize, r)) {
            *s += f * p;
        }
    }
    let entries = sums
        .into_iter()
        .enumerate()
        .map(|(n, c)| SpectrumEntry {
            index: SpectrumIndex::SU2(SphericalIndexSU2::new(n as u32)),
            coeff: c,
        })
        .collect();
    CoefficientSpectrum::new(PairTag::SU2, entries, truncation)
}

/// `(sum |c_pi|^p dim H_pi)^{1/p}`, a lower bound for the MS^p norm of the
/// multiplier induced by the function with this spectrum.
pub fn lp_lower_bound(spec: &CoefficientSpectrum, p: SchattenExponent) -> Result<f64> {
    if p.is_infinite() {
        return Err(Error::Domain("l^p bound requires finite p".into()));
    }
    let p = p.value();
    let cmax = spec.entries.iter().map(|e| e.coeff.norm()).fold(0.0, f64::max);
    if cmax == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = spec
        .entries
        .iter()
        .map(|e| (e.coeff.norm() / cmax).powf(p) * e.dim() as f64)
        .sum();
    Ok(cmax * sum.powf(1.0 / p))
}

/// The finite sum `sum c_pi dim(H_pi) h^0_pi`.
pub fn synthesize(spec: &CoefficientSpectrum) -> BiInvariantFunction {
    let truncation = spec.truncation;
    match spec.pair {
        PairTag::U2 => {
            let order = u2_indices(truncation);
            let weights: Vec<Complex64> = order
                .iter()
                .map(|&i| spec.coeff(SpectrumIndex::U2(i)) * i.dim() as f64)
                .collect();
            BiInvariantFunction::U2(BiInvariantFunctionU2::new(move |z| {
                spherical_u2_all(truncation, z)
                    .into_iter()
                    .zip(&weights)
                    .map(|(h, w)| h * w)
                    .sum()
            }))
        }
        PairTag::SU2 => {
            let mut weights = vec![Complex64::new(0.0, 0.0); truncation as usize + 1];
            for e in &spec.entries {
                if let SpectrumIndex::SU2(i) = e.index {
                    weights[i.n as usize] += e.coeff * i.dim() as f64;
                }
            }
            BiInvariantFunction::SU2(BiInvariantFunctionSU2::new(move |r| {
                let r = r.clamp(-1.0, 1.0);
                legendre_table(weights.len() - 1, r)
                    .into_iter()
                    .zip(&weights)
                    .map(|(p, w)| w * p)
                    .sum()
            }))
        }
    }
}

struct SphereNodes {
    points: Vec<[Complex64; 2]>,
    weights: Vec<f64>,
}

/// Unit sphere of C^2 with normalized measure: |x_1|^2 = w is uniform on
/// [0, 1] and both phases are uniform.
fn sphere3_nodes(order: usize) -> Result<SphereNodes> {
    let radial: Rule = gauss_legendre_probability(order, 0.0, 1.0)?;
    let a = 2 * order - 1;
    let step = std::f64::consts::TAU / a as f64;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (&w, &rw) in radial.nodes.iter().zip(&radial.weights) {
        for j in 0..a {
            for k in 0..a {
                points.push([
                    Complex64::from_polar(w.sqrt(), j as f64 * step),
                    Complex64::from_polar((1.0 - w).sqrt(), k as f64 * step),
                ]);
                weights.push(rw / (a * a) as f64);
            }
        }
    }
    Ok(SphereNodes { points, weights })
}

/// S^2 with normalized measure: Gauss–Legendre in the height, 2q azimuths.
fn sphere2_nodes(order: usize) -> Result<(Vec<[f64; 3]>, Vec<f64>)> {
    let rule = gauss_legendre_probability(order, -1.0, 1.0)?;
    let a = 2 * order;
    let step = std::f64::consts::TAU / a as f64;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let s = (1.0 - t * t).max(0.0).sqrt();
        for k in 0..a {
            let ang = k as f64 * step;
            points.push([s * ang.cos(), s * ang.sin(), t]);
            weights.push(w / a as f64);
        }
    }
    Ok((points, weights))
}

/// Matrix `[psi(x_i, x_j) sqrt(w_i w_j)]` of the kernel operator `T_psi` on
/// `L^2(X)` discretized at quadrature nodes of the homogeneous space.
/// U2 uses `order * (2 order - 1)^2` nodes, SU2 uses `2 order^2`.
pub fn kernel_matrix(phi: &BiInvariantFunction, order: usize) -> Result<DMatrix<Complex64>> {
    if order == 0 {
        return Err(Error::Domain("quadrature order must be >= 1".into()));
    }
    match phi {
        BiInvariantFunction::U2(f) => {
            let nodes = sphere3_nodes(order)?;
            let n = nodes.points.len();
            let sw: Vec<f64> = nodes.weights.iter().map(|w| w.sqrt()).collect();
            let rows: Vec<Vec<Complex64>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let x = nodes.points[i];
                    (0..n)
                        .map(|j| {
                            let y = nodes.points[j];
                            let inner = x[0].conj() * y[0] + x[1].conj() * y[1];
                            let inner = if inner.norm() > 1.0 { inner / inner.norm() } else { inner };
                            f.eval(inner) * (sw[i] * sw[j])
                        })
                        .collect()
                })
                .collect();
            Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
        }
        BiInvariantFunction::SU2(f) => {
            let (points, weights) = sphere2_nodes(order)?;
            let n = points.len();
            let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
            Ok(DMatrix::from_fn(n, n, |i, j| {
                let (x, y) = (points[i], points[j]);
                let dot = (x[0] * y[0] + x[1] * y[1] + x[2] * y[2]).clamp(-1.0, 1.0);
                f.eval(dot) * (sw[i] * sw[j])
            }))
        }
    }
}

/// Schatten p-norm of the discretized kernel operator. Converges to
/// `(sum |c_pi|^p dim H_pi)^{1/p}` as the order grows, and is exact once the
/// rule integrates the spectrum's polynomials (order > truncation).
pub fn kernel_schatten_norm(phi: &BiInvariantFunction, p: SchattenExponent, order: usize) -> Result<f64> {
    if p.is_infinite() {
        return Err(Error::Domain("kernel norm requires finite p".into()));
    }
    let sv = singular_values(&kernel_matrix(phi, order)?)?;
    Ok(norm_from_singular_values(&sv, p))
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelNormReport {
    pub p: SchattenExponent,
    pub order: usize,
    pub value: f64,
    pub value_doubled: f64,
    /// Relative change under order doubling exceeded 1%.
    pub under_resolved: bool,
}

/// Kernel norms at `order` and `2 * order` for each exponent, flagging
/// under-resolution when doubling moves a value by more than 1%.
pub fn kernel_schatten_norm_checked(
    phi: &BiInvariantFunction,
    exponents: &[SchattenExponent],
    order: usize,
) -> Result<Vec<KernelNormReport>> {
    if exponents.iter().any(|p| p.is_infinite()) {
        return Err(Error::Domain("kernel norm requires finite p".into()));
    }
    let base = singular_values(&kernel_matrix(phi, order)?)?;
    let fine = singular_values(&kernel_matrix(phi, 2 * order)?)?;
    Ok(exponents
        .iter()
        .map(|&p| {
            let value = norm_from_singular_values(&base, p);
            let value_doubled = norm_from_singular_values(&fine, p);
            let under_resolved = (value - value_doubled).abs() > 0.01 * value_doubled.abs().max(1e-300);
            KernelNormReport {
                p,
                order,
                value,
                value_doubled,
                under_resolved,
            }
        })
        .collect())
}

/// A group with a distinguished compact subgroup K that can be sampled from
/// its Haar measure.
pub trait GroupWithCompact: Sync {
    type Elem: Clone + Send + Sync;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn sample_k<R: Rng>(&self, rng: &mut R) -> Self::Elem;
}

/// U(2) with K = U(1) embedded as diag(1, e^{i theta}).
#[derive(Debug, Clone, Copy, Default)]
pub struct U2OverU1;

impl GroupWithCompact for U2OverU1 {
    type Elem = Matrix2<Complex64>;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a * b
    }

    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        a.adjoint()
    }

    fn sample_k<R: Rng>(&self, rng: &mut R) -> Self::Elem {
        haar_u1_in_u2(rng)
    }
}

/// U(2) with K = U(2), for sampling whole-group Haar points.
#[derive(Debug, Clone, Copy, Default)]
pub struct U2Haar;

impl GroupWithCompact for U2Haar {
    type Elem = Matrix2<Complex64>;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a * b
    }

    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        a.adjoint()
    }

    fn sample_k<R: Rng>(&self, rng: &mut R) -> Self::Elem {
        haar_u2(rng)
    }
}

/// Output of [`k_average`].
#[derive(Debug, Clone)]
pub struct KAverage {
    /// `[phi^K(x_i^{-1} x_j)]` estimated over M x M Haar pairs.
    pub symbol: MultiplierSymbol,
    /// Largest per-entry standard error (sample deviation / M).
    pub mc_tolerance: f64,
    pub averaged_estimate: NormEstimate,
    /// Largest multiplier-norm estimate among the conjugate symbols
    /// `[phi(k x_i^{-1} x_j k')]`.
    pub max_conjugate_norm: f64,
}

/// Monte Carlo version of the averaging `phi^K(g) = \int\int phi(k g k') dk dk'`
/// on the symbol `[phi(x_i^{-1} x_j)]`, using all M^2 pairs of M sampled k
/// and M sampled k'. Every conjugate search is warm-started from the
/// averaged symbol's witness, which keeps the diagnostic at least the
/// averaged estimate.
pub fn k_average<G: GroupWithCompact>(
    group: &G,
    phi: &(dyn Fn(&G::Elem) -> Complex64 + Sync),
    points: &[G::Elem],
    samples: usize,
    p: SchattenExponent,
    cfg: &SearchConfig,
) -> Result<KAverage> {
    if samples == 0 || points.is_empty() {
        return Err(Error::InvalidInput("need at least one K sample and one point".into()));
    }
    let n = points.len();
    let mut rng = restart_rng(cfg.seed, u64::MAX);
    let left: Vec<G::Elem> = (0..samples).map(|_| group.sample_k(&mut rng)).collect();
    let right: Vec<G::Elem> = (0..samples).map(|_| group.sample_k(&mut rng)).collect();
    let rel: Vec<G::Elem> = (0..n * n)
        .map(|ij| group.mul(&group.inv(&points[ij / n]), &points[ij % n]))
        .collect();

    // conj[a * M + b] is the symbol of phi(k_a . k'_b).
    let conj: Vec<DMatrix<Complex64>> = (0..samples * samples)
        .into_par_iter()
        .map(|ab| {
            let (k, kp) = (&left[ab / samples], &right[ab % samples]);
            DMatrix::from_fn(n, n, |i, j| phi(&group.mul(&group.mul(k, &rel[i * n + j]), kp)))
        })
        .collect();
    let count = (samples * samples) as f64;
    let mut mean = DMatrix::<Complex64>::zeros(n, n);
    for c in &conj {
        mean += c;
    }
    mean /= Complex64::new(count, 0.0);
    let mut var = DMatrix::<f64>::zeros(n, n);
    for c in &conj {
        var += (c - &mean).map(|z| z.norm_sqr());
    }
    let mc_tolerance = var
        .iter()
        .map(|v| (v / count.max(2.0)).sqrt() / samples as f64)
        .fold(0.0, f64::max);

    let symbol = MultiplierSymbol::new(FiniteMatrix::new(mean)?);
    let averaged_estimate = ms_norm_lower(&symbol, p, cfg)?;
    let mut conj_cfg = cfg.clone();
    conj_cfg.warm_start = vec![averaged_estimate.witness.clone()];
    let norms: Vec<f64> = conj
        .into_iter()
        .map(|c| -> Result<f64> {
            let sym = MultiplierSymbol::new(FiniteMatrix::new(c)?);
            Ok(ms_norm_lower(&sym, p, &conj_cfg)?.value)
        })
        .collect::<Result<_>>()?;
    let max_conjugate_norm = norms.into_iter().fold(0.0, f64::max);
    Ok(KAverage {
        symbol,
        mc_tolerance,
        averaged_estimate,
        max_conjugate_norm,
    })
}

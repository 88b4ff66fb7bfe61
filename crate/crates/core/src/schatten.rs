//! Finite Schatten classes S^p_n and Schur multipliers acting on them.
//!
//! The multiplier norm `||psi||_{MS^p}` is the operator norm of
//! `X -> [psi_ij x_ij]` on S^p_n. Except at p = 2 it has no closed form, so
//! [`ms_norm_lower`] returns a certified lower bound: the ratio
//! `||psi o X||_p / ||X||_p` for the best witness `X` found.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::complex_gaussian;

const SVD_EPS: f64 = 1e-15;
const SVD_MAX_ITERS: usize = 10_000;

/// Relative gap below which top singular values are treated as tied.
const TIE_GAP: f64 = 1e-12;

/// A complex n x n matrix with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct FiniteMatrix(DMatrix<Complex64>);

impl FiniteMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(Error::InvalidInput(format!(
                "expected a nonempty square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(Self(entries))
    }

    pub fn from_real(entries: &DMatrix<f64>) -> Result<Self> {
        Self::new(entries.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        Self::new(DMatrix::from_fn(n, n, f))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// The matrix unit E_ij.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }
}

/// Wire format `{"n": int, "re": [[...]], "im": [[...]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl TryFrom<MatrixJson> for FiniteMatrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        let n = json.n;
        let check = |rows: &Vec<Vec<f64>>, name: &str| -> Result<()> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidInput(format!("`{name}` must be {n}x{n}")));
            }
            Ok(())
        };
        check(&json.re, "re")?;
        if let Some(im) = &json.im {
            check(im, "im")?;
        }
        FiniteMatrix::from_fn(n, |i, j| {
            let im = json.im.as_ref().map_or(0.0, |m| m[i][j]);
            Complex64::new(json.re[i][j], im)
        })
    }
}

impl From<FiniteMatrix> for MatrixJson {
    fn from(m: FiniteMatrix) -> Self {
        let n = m.n();
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| f(&m.0[(i, j)])).collect()).collect()
        };
        MatrixJson {
            n,
            re: rows(|z| z.re),
            im: Some(rows(|z| z.im)),
        }
    }
}

/// Schatten exponent p in [1, inf].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SchattenExponent(f64);

impl SchattenExponent {
    pub const ONE: Self = Self(1.0);
    pub const TWO: Self = Self(2.0);
    pub const INFINITY: Self = Self(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!("Schatten exponent must lie in [1, inf], got {p}")));
        }
        Ok(Self(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// The conjugate exponent q with 1/p + 1/q = 1.
    pub fn conjugate(self) -> Self {
        if self.0 == 1.0 {
            Self::INFINITY
        } else if self.0.is_infinite() {
            Self::ONE
        } else {
            Self(self.0 / (self.0 - 1.0))
        }
    }
}

impl TryFrom<f64> for SchattenExponent {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<SchattenExponent> for f64 {
    fn from(p: SchattenExponent) -> f64 {
        p.0
    }
}

/// Symbol of a Schur multiplier, optionally labelled by the points it was
/// sampled on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolJson", into = "SymbolJson")]
pub struct MultiplierSymbol {
    values: FiniteMatrix,
    pub row_points: Vec<String>,
    pub col_points: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolJson {
    n: usize,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    row_points: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    col_points: Vec<String>,
}

impl TryFrom<SymbolJson> for MultiplierSymbol {
    type Error = Error;
    fn try_from(j: SymbolJson) -> Result<Self> {
        let values = FiniteMatrix::try_from(MatrixJson {
            n: j.n,
            re: j.re,
            im: j.im,
        })?;
        Ok(Self {
            values,
            row_points: j.row_points,
            col_points: j.col_points,
        })
    }
}

impl From<MultiplierSymbol> for SymbolJson {
    fn from(s: MultiplierSymbol) -> Self {
        let m = MatrixJson::from(s.values);
        SymbolJson {
            n: m.n,
            re: m.re,
            im: m.im,
            row_points: s.row_points,
            col_points: s.col_points,
        }
    }
}

impl MultiplierSymbol {
    pub fn new(values: FiniteMatrix) -> Self {
        Self {
            values,
            row_points: Vec::new(),
            col_points: Vec::new(),
        }
    }

    pub fn with_points(mut self, rows: Vec<String>, cols: Vec<String>) -> Self {
        self.row_points = rows;
        self.col_points = cols;
        self
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self::new(FiniteMatrix(DMatrix::from_element(n, n, c)))
    }

    /// Parse from the JSON wire format.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn values(&self) -> &FiniteMatrix {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values().n()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values().0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Principal sub-symbol on the given index set.
    pub fn principal(&self, indices: &[usize]) -> Result<Self> {
        let n = self.n();
        if indices.is_empty() || indices.iter().any(|&i| i >= n) {
            return Err(Error::InvalidInput("principal index set out of range".into()));
        }
        let m = &self.values().0;
        Ok(Self::new(FiniteMatrix::from_fn(indices.len(), |a, b| {
            m[(indices[a], indices[b])]
        })?))
    }

    /// The block symbol psi (x) 1_m of size nm, constant on m x m blocks.
    /// Index (i, a) of the amplified space maps to i * m + a.
    pub fn amplify(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("amplification must be >= 1".into()));
        }
        let psi = &self.values().0;
        Ok(Self::new(FiniteMatrix::from_fn(self.n() * m, |r, c| {
            psi[(r / m, c / m)]
        })?))
    }
}

fn svd(x: &DMatrix<Complex64>) -> Result<nalgebra::SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>> {
    nalgebra::SVD::try_new(x.clone(), true, true, SVD_EPS, SVD_MAX_ITERS)
        .ok_or_else(|| Error::Numeric("SVD failed to converge".into()))
}

/// Singular values in descending order.
pub fn singular_values(x: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let s = nalgebra::SVD::try_new(x.clone(), false, false, SVD_EPS, SVD_MAX_ITERS)
        .ok_or_else(|| Error::Numeric("SVD failed to converge".into()))?;
    let mut sv: Vec<f64> = s.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// `(sum sigma_i^p)^{1/p}`, scaled by the largest value to avoid overflow.
pub fn norm_from_singular_values(sv: &[f64], p: SchattenExponent) -> f64 {
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return smax;
    }
    let p = p.value();
    let sum: f64 = sv.iter().map(|s| (s / smax).powf(p)).sum();
    smax * sum.powf(1.0 / p)
}

fn schatten_raw(x: &DMatrix<Complex64>, p: SchattenExponent) -> Result<f64> {
    Ok(norm_from_singular_values(&singular_values(x)?, p))
}

/// Schatten p-norm `Tr((X*X)^{p/2})^{1/p}` via singular values.
pub fn schatten_norm(x: &FiniteMatrix, p: SchattenExponent) -> Result<f64> {
    schatten_raw(&x.0, p)
}

/// Entrywise product `[psi_ij x_ij]`.
pub fn schur_apply(psi: &MultiplierSymbol, x: &FiniteMatrix) -> Result<FiniteMatrix> {
    let s = psi.values();
    if s.n() != x.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: x.n(),
        });
    }
    Ok(FiniteMatrix(s.0.component_mul(&x.0)))
}

/// Search parameters for [`ms_norm_lower`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Converged when the relative gain over `window` iterations is below this.
    pub rel_tol: f64,
    pub window: usize,
    pub seed: u64,
    /// Cap on the dimension of amplified symbols.
    pub max_dim: usize,
    /// Extra starting points, e.g. witnesses of related searches.
    #[serde(skip)]
    pub warm_start: Vec<FiniteMatrix>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 1000,
            rel_tol: 1e-9,
            window: 20,
            seed: 0,
            max_dim: 512,
            warm_start: Vec::new(),
        }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Best ratio found by the multiplier-norm search together with its witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub witness: FiniteMatrix,
    pub converged: bool,
    pub iterations: usize,
    pub seed: u64,
    pub p: SchattenExponent,
}

impl NormEstimate {
    /// Recompute `||psi o W||_p / ||W||_p` for the stored witness.
    pub fn witness_ratio(&self, psi: &MultiplierSymbol) -> Result<f64> {
        ratio(&psi.values().0, &self.witness.0, self.p)
    }
}

fn ratio(psi: &DMatrix<Complex64>, x: &DMatrix<Complex64>, p: SchattenExponent) -> Result<f64> {
    let den = schatten_raw(x, p)?;
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(schatten_raw(&psi.component_mul(x), p)? / den)
}

/// Norming element of `z` for the S^p norm: an element `y` of the unit ball
/// of S^q with `Tr(y* z) = ||z||_p`. Equal to the gradient of `||.||_p` at `z`,
/// `U diag(sigma^{p-1}) V* / ||z||_p^{p-1}` for 1 < p < inf.
fn norming_element<R: Rng>(
    z: &DMatrix<Complex64>,
    p: SchattenExponent,
    rng: &mut R,
) -> Result<Option<DMatrix<Complex64>>> {
    let s = svd(z)?;
    let u = s.u.as_ref().expect("u requested");
    let v_t = s.v_t.as_ref().expect("v_t requested");
    let sv = &s.singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(None);
    }
    let k = sv.len();
    let n = z.nrows();
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    let add_rank_one = |y: &mut DMatrix<Complex64>, i: usize, w: Complex64| {
        for r in 0..n {
            let ur = u[(r, i)] * w;
            for c in 0..n {
                y[(r, c)] += ur * v_t[(i, c)];
            }
        }
    };
    if p.is_infinite() {
        // u v* from the top singular pair; ties resolved by a random unit
        // combination inside the top cluster.
        let top: Vec<usize> = (0..k).filter(|&i| sv[i] >= smax * (1.0 - TIE_GAP)).collect();
        if top.len() == 1 {
            add_rank_one(&mut y, top[0], Complex64::new(1.0, 0.0));
        } else {
            let coeffs = complex_gaussian(top.len(), 1, rng);
            let norm = coeffs.norm();
            let c: Vec<Complex64> = coeffs.iter().map(|c| c / norm).collect();
            // u = sum c_a u_a, v = sum c_a v_a, y = u v*.
            let mut uu = DVector::<Complex64>::zeros(n);
            let mut vv_conj = DVector::<Complex64>::zeros(n);
            for (a, &i) in top.iter().enumerate() {
                for r in 0..n {
                    uu[r] += c[a] * u[(r, i)];
                    vv_conj[r] += c[a].conj() * v_t[(i, r)];
                }
            }
            y = &uu * vv_conj.transpose();
        }
    } else if p.value() == 1.0 {
        for i in 0..k {
            if sv[i] > smax * 1e-13 {
                add_rank_one(&mut y, i, Complex64::new(1.0, 0.0));
            }
        }
    } else {
        let pe = p.value() - 1.0;
        let norm = norm_from_singular_values(sv.as_slice(), p);
        for i in 0..k {
            let w = (sv[i] / norm).powf(pe);
            if w > 0.0 {
                add_rank_one(&mut y, i, Complex64::new(w, 0.0));
            }
        }
    }
    Ok(Some(y))
}

struct RunResult {
    value: f64,
    witness: DMatrix<Complex64>,
    iterations: usize,
    converged: bool,
}

/// Ascent from a single start. One step takes the gradient of
/// `||psi o X||_p` (the adjoint multiplier applied to the S^p norming element)
/// and moves to the point of the S^p unit sphere that maximizes it, i.e. the
/// S^q norming element of the gradient. The ratio never decreases.
fn ascend<R: Rng>(
    psi: &DMatrix<Complex64>,
    start: DMatrix<Complex64>,
    p: SchattenExponent,
    cfg: &SearchConfig,
    rng: &mut R,
) -> Result<RunResult> {
    let q = p.conjugate();
    let psi_conj = psi.map(|z| z.conj());
    let scale = schatten_raw(&start, p)?;
    if scale == 0.0 {
        return Ok(RunResult {
            value: 0.0,
            witness: start,
            iterations: 0,
            converged: true,
        });
    }
    let mut x = start / Complex64::new(scale, 0.0);
    let mut best_value = ratio(psi, &x, p)?;
    let mut best_x = x.clone();
    let mut history = vec![best_value];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        iterations += 1;
        let z = psi.component_mul(&x);
        let Some(y) = norming_element(&z, p, rng)? else {
            converged = true;
            break;
        };
        let grad = psi_conj.component_mul(&y);
        let Some(next) = norming_element(&grad, q, rng)? else {
            converged = true;
            break;
        };
        x = next;
        let value = ratio(psi, &x, p)?;
        if value > best_value {
            best_value = value;
            best_x = x.clone();
        }
        history.push(best_value);
        let h = history.len();
        if h > cfg.window {
            let old = history[h - 1 - cfg.window];
            if best_value - old <= cfg.rel_tol * best_value {
                converged = true;
                break;
            }
        }
    }
    Ok(RunResult {
        value: best_value,
        witness: best_x,
        iterations,
        converged,
    })
}

fn exact_p2(psi: &MultiplierSymbol, seed: u64) -> NormEstimate {
    let m = &psi.values().0;
    let n = m.nrows();
    let (mut bi, mut bj, mut best) = (0, 0, -1.0);
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)].norm();
            if v > best {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }
    NormEstimate {
        value: best,
        witness: FiniteMatrix::unit(n, bi, bj),
        converged: true,
        iterations: 0,
        seed,
        p: SchattenExponent::TWO,
    }
}

/// RNG for restart `index` of a search with master seed `seed`.
pub fn restart_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Certified lower bound for `||psi||_{MS^p_n}`.
///
/// Starts are the matrix unit at the largest `|psi_ij|` (so the result is
/// never below `max |psi_ij|`), the all-ones matrix, any warm starts from the
/// config, and `cfg.restarts` complex Gaussian matrices. Restarts run in
/// parallel and are merged by maximum, ties going to the lowest start index.
pub fn ms_norm_lower(
    psi: &MultiplierSymbol,
    p: SchattenExponent,
    cfg: &SearchConfig,
) -> Result<NormEstimate> {
    let n = psi.n();
    if p == SchattenExponent::TWO {
        return Ok(exact_p2(psi, cfg.seed));
    }
    if psi.sup_norm() == 0.0 {
        return Ok(NormEstimate {
            value: 0.0,
            witness: FiniteMatrix::unit(n, 0, 0),
            converged: true,
            iterations: 0,
            seed: cfg.seed,
            p,
        });
    }
    for w in &cfg.warm_start {
        if w.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: w.n(),
            });
        }
    }
    let unit = exact_p2(psi, cfg.seed).witness.0;
    let ones = DMatrix::from_element(n, n, Complex64::new(1.0, 0.0));
    let mut fixed: Vec<DMatrix<Complex64>> = vec![unit, ones];
    fixed.extend(cfg.warm_start.iter().map(|w| w.0.clone()));
    let n_fixed = fixed.len();
    let total = n_fixed + cfg.restarts;
    let psi_m = &psi.values().0;

    let runs: Vec<Result<RunResult>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut rng = restart_rng(cfg.seed, idx as u64);
            let start = if idx < n_fixed {
                fixed[idx].clone()
            } else {
                complex_gaussian(n, n, &mut rng)
            };
            ascend(psi_m, start, p, cfg, &mut rng)
        })
        .collect();

    let mut best: Option<RunResult> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    let witness = FiniteMatrix(best.witness);
    let value = ratio(psi_m, &witness.0, p)?;
    Ok(NormEstimate {
        value,
        witness,
        converged: best.converged,
        iterations: best.iterations,
        seed: cfg.seed,
        p,
    })
}

/// Embed a witness for the amplification `m_from` into amplification `m_to`
/// (`m_from <= m_to`). The ratio is preserved.
pub fn embed_amplified(w: &FiniteMatrix, n: usize, m_from: usize, m_to: usize) -> FiniteMatrix {
    let mut out = DMatrix::zeros(n * m_to, n * m_to);
    for r in 0..n * m_from {
        for c in 0..n * m_from {
            let (i, a) = (r / m_from, r % m_from);
            let (j, b) = (c / m_from, c % m_from);
            out[(i * m_to + a, j * m_to + b)] = w.0[(r, c)];
        }
    }
    FiniteMatrix(out)
}

/// Zero-pad a witness of a principal sub-symbol back into the full index set.
pub fn embed_principal(w: &FiniteMatrix, indices: &[usize], n: usize) -> FiniteMatrix {
    let mut out = DMatrix::zeros(n, n);
    for (a, &i) in indices.iter().enumerate() {
        for (b, &j) in indices.iter().enumerate() {
            out[(i, j)] = w.0[(a, b)];
        }
    }
    FiniteMatrix(out)
}

/// Lower bound for `||M_psi (x) id_{S^p_m}||`, i.e. the multiplier norm of
/// `psi (x) 1_m`. Amplifications 1..=m are searched in turn, each seeded with
/// the embedded witness of the previous one, so the value is nondecreasing
/// in `m`.
pub fn cb_lower_bound(
    psi: &MultiplierSymbol,
    p: SchattenExponent,
    m: usize,
    cfg: &SearchConfig,
) -> Result<NormEstimate> {
    if m == 0 {
        return Err(Error::Domain("amplification must be >= 1".into()));
    }
    let n = psi.n();
    if n * m > cfg.max_dim {
        return Err(Error::ResourceLimit(format!(
            "amplified dimension {} exceeds cap {}",
            n * m,
            cfg.max_dim
        )));
    }
    let mut est = ms_norm_lower(psi, p, cfg)?;
    for level in 2..=m {
        let amp = psi.amplify(level)?;
        let mut level_cfg = cfg.clone();
        level_cfg.warm_start = cfg
            .warm_start
            .iter()
            .filter(|w| w.n() == n)
            .map(|w| embed_amplified(w, n, 1, level))
            .collect();
        level_cfg.warm_start.push(embed_amplified(&est.witness, n, level - 1, level));
        level_cfg.seed = cfg.seed.wrapping_add(level as u64);
        let next = ms_norm_lower(&amp, p, &level_cfg)?;
        est = NormEstimate {
            seed: cfg.seed,
            ..next
        };
    }
    Ok(est)
}

/// Estimates over several exponents from a shared witness pool: each search
/// is re-seeded with every witness found at any exponent until no estimate
/// improves (at most `rounds` passes).
pub fn ms_norm_profile(
    psi: &MultiplierSymbol,
    exponents: &[SchattenExponent],
    cfg: &SearchConfig,
    rounds: usize,
) -> Result<Vec<NormEstimate>> {
    let mut estimates: Vec<NormEstimate> = exponents
        .iter()
        .map(|&p| ms_norm_lower(psi, p, cfg))
        .collect::<Result<_>>()?;
    for _ in 0..rounds {
        let pool: Vec<FiniteMatrix> = estimates.iter().map(|e| e.witness.clone()).collect();
        let mut improved = false;
        for (k, &p) in exponents.iter().enumerate() {
            let mut c = cfg.clone();
            c.restarts = 0;
            c.warm_start.extend(pool.iter().cloned());
            let e = ms_norm_lower(psi, p, &c)?;
            if e.value > estimates[k].value * (1.0 + 1e-12) {
                estimates[k] = NormEstimate { seed: cfg.seed, ..e };
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(estimates)
}

/// Symbol `[f(x_i, x_j)]` on a finite point set.
pub fn sample_symbol<P>(
    f: impl Fn(&P, &P) -> Result<Complex64>,
    points: &[P],
) -> Result<MultiplierSymbol> {
    let n = points.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = f(&points[i], &points[j])?;
        }
    }
    Ok(MultiplierSymbol::new(FiniteMatrix::new(m)?))
}

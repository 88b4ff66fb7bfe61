//! Sp(2, R) as the 4x4 real matrices with g^T J g = J, its maximal compact
//! subgroup K = U(2), the distinguished elements used in the coset
//! computations, and a KAK decomposition that keeps both K factors exactly
//! inside O(4) ∩ Sp(2, R).

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gelfand::GroupWithCompact;
use crate::haar::haar_u2;

/// Every tolerance used by this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Bound on ||g^T J g - J||_F / max(1, ||g||_F^2).
    pub group_defect: f64,
    /// Bound on ||g^T g - I||_F and on the unitary embedding defect.
    pub compact_defect: f64,
    /// Bound on ||k1 D(a) k2 - g||_F / max(1, ||g||_F).
    pub kak_residual: f64,
    /// Relative singular value gap below which two values form one cluster.
    pub cluster_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            group_defect: 1e-9,
            compact_defect: 1e-9,
            kak_residual: 1e-8,
            cluster_gap: 1e-10,
        }
    }
}

pub fn j_matrix() -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    j[(0, 2)] = 1.0;
    j[(1, 3)] = 1.0;
    j[(2, 0)] = -1.0;
    j[(3, 1)] = -1.0;
    j
}

fn group_defect(g: &Matrix4<f64>) -> f64 {
    let j = j_matrix();
    (g.transpose() * j * g - j).norm()
}

fn compact_defect(g: &Matrix4<f64>) -> f64 {
    (g.transpose() * g - Matrix4::identity()).norm()
}

/// Row-major nested arrays.
fn to_rows(g: &Matrix4<f64>) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = g[(i, j)];
        }
    }
    out
}

fn from_rows(rows: &[[f64; 4]; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| rows[i][j])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticElement(Matrix4<f64>);

impl SymplecticElement {
    pub fn new(g: Matrix4<f64>) -> Result<Self> {
        Self::with_tolerances(g, &Tolerances::default())
    }

    pub fn with_tolerances(g: Matrix4<f64>, tol: &Tolerances) -> Result<Self> {
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let scale = g.norm_squared().max(1.0);
        let defect = group_defect(&g);
        if defect > tol.group_defect * scale {
            return Err(Error::InvalidInput(format!(
                "not symplectic: ||g^T J g - J||_F = {defect:.3e}"
            )));
        }
        Ok(Self(g))
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    /// g^{-1} = -J g^T J.
    pub fn inverse(&self) -> Self {
        let j = j_matrix();
        Self(-(j * self.0.transpose() * j))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn rows(&self) -> [[f64; 4]; 4] {
        to_rows(&self.0)
    }
}

impl Serialize for SymplecticElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymplecticElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = <[[f64; 4]; 4]>::deserialize(d)?;
        Self::new(from_rows(&rows)).map_err(serde::de::Error::custom)
    }
}

/// [[A, -B], [B, A]] for u = A + iB.
pub fn embed_u2(u: &Matrix2<Complex64>) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| {
        let z = u[(i % 2, j % 2)];
        match (i < 2, j < 2) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// An element of K together with its U(2) parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximalCompactElement {
    g: SymplecticElement,
    u: Matrix2<Complex64>,
}

impl MaximalCompactElement {
    pub fn from_unitary(u: Matrix2<Complex64>) -> Result<Self> {
        let tol = Tolerances::default();
        let defect = (u.adjoint() * u - Matrix2::identity()).norm();
        if !(defect <= tol.compact_defect) {
            return Err(Error::InvalidInput(format!("not unitary: ||u*u - I|| = {defect:.3e}")));
        }
        Ok(Self {
            g: SymplecticElement(embed_u2(&u)),
            u,
        })
    }

    /// Recover u from a 4x4 matrix of the form [[A, -B], [B, A]].
    pub fn from_matrix(g: Matrix4<f64>) -> Result<Self> {
        let u = Matrix2::from_fn(|i, j| Complex64::new(g[(i, j)], g[(i + 2, j)]));
        let tol = Tolerances::default();
        let defect = (embed_u2(&u) - g).norm();
        if !(defect <= tol.compact_defect) {
            return Err(Error::InvalidInput(format!("not of the form [[A,-B],[B,A]]: defect {defect:.3e}")));
        }
        Self::from_unitary(u).map(|k| Self { g: SymplecticElement(g), ..k })
    }

    pub fn identity() -> Self {
        Self {
            g: SymplecticElement::identity(),
            u: Matrix2::identity(),
        }
    }

    pub fn element(&self) -> &SymplecticElement {
        &self.g
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        self.g.matrix()
    }

    pub fn unitary(&self) -> &Matrix2<Complex64> {
        &self.u
    }

    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let u = haar_u2(rng);
        Self {
            g: SymplecticElement(embed_u2(&u)),
            u,
        }
    }
}

/// A point (alpha1, alpha2) of the closed chamber alpha1 >= alpha2 >= 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct WeylPair {
    alpha1: f64,
    alpha2: f64,
}

impl WeylPair {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        if !(alpha1 >= alpha2 && alpha2 >= 0.0) || !alpha1.is_finite() {
            return Err(Error::Domain(format!(
                "({alpha1}, {alpha2}) is outside the chamber alpha1 >= alpha2 >= 0"
            )));
        }
        Ok(Self { alpha1, alpha2 })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    /// Euclidean length sqrt(alpha1^2 + alpha2^2).
    pub fn norm(&self) -> f64 {
        self.alpha1.hypot(self.alpha2)
    }

    /// D(alpha1, alpha2) = diag(e^a1, e^a2, e^-a1, e^-a2).
    pub fn element(&self) -> SymplecticElement {
        diag_element(self.alpha1, self.alpha2)
    }
}

impl TryFrom<[f64; 2]> for WeylPair {
    type Error = Error;

    fn try_from(a: [f64; 2]) -> Result<Self> {
        Self::new(a[0], a[1])
    }
}

impl From<WeylPair> for [f64; 2] {
    fn from(w: WeylPair) -> Self {
        [w.alpha1, w.alpha2]
    }
}

fn diag_element(a1: f64, a2: f64) -> SymplecticElement {
    SymplecticElement(Matrix4::from_diagonal(&Vector4::new(
        a1.exp(),
        a2.exp(),
        (-a1).exp(),
        (-a2).exp(),
    )))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KAKResult {
    pub k1: MaximalCompactElement,
    pub a: WeylPair,
    pub k2: MaximalCompactElement,
    /// ||k1 D(a) k2 - g||_F.
    pub residual: f64,
}

#[derive(Serialize)]
struct KakJson {
    alpha1: f64,
    alpha2: f64,
    residual: f64,
    k1: [[f64; 4]; 4],
    k2: [[f64; 4]; 4],
}

impl Serialize for KAKResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        KakJson {
            alpha1: self.a.alpha1,
            alpha2: self.a.alpha2,
            residual: self.residual,
            k1: to_rows(self.k1.matrix()),
            k2: to_rows(self.k2.matrix()),
        }
        .serialize(s)
    }
}

/// Nearest unitary (polar factor) of a 2x2 complex matrix.
fn nearest_unitary(u: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    let svd = u.svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(a), Some(b)) => a * b,
        _ => *u,
    }
}

pub fn kak_decompose(g: &SymplecticElement) -> Result<KAKResult> {
    kak_decompose_with(g, &Tolerances::default())
}

/// g = k1 D(a) k2 with a in the closed chamber.
///
/// The right singular vectors of g are the eigenvectors of g^T g. Take q1 on
/// top and q2 as the best direction of the next cluster after projecting off
/// span{q1, J q1}; then Q = [q1, q2, -J q1, -J q2] lies in K and diagonalizes
/// g^T g, so k2 = Q^T and the columns of k1 are g q_i / ||g q_i|| completed by
/// the same -J pairing.
pub fn kak_decompose_with(g: &SymplecticElement, tol: &Tolerances) -> Result<KAKResult> {
    let m = *g.matrix();
    if group_defect(&m) > tol.group_defect * m.norm_squared().max(1.0) {
        return Err(Error::InvalidInput("input is not symplectic".into()));
    }
    let j = j_matrix();
    let svd = m.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numeric("SVD did not return singular vectors".into()))?;
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vecs: Vec<Vector4<f64>> = order.iter().map(|&i| v_t.row(i).transpose()).collect();

    let q1 = vecs[0];
    let jq1 = j * q1;
    let project = |v: &Vector4<f64>| v - q1 * q1.dot(v) - jq1 * jq1.dot(v);
    // Candidates for q2: the cluster of the second singular value.
    let mut cluster = vec![1];
    for k in 2..4 {
        if (sigma[1] - sigma[k]).abs() <= tol.cluster_gap * sigma[1] {
            cluster.push(k);
        }
    }
    let first = project(&vecs[1]);
    let q2 = if first.norm() > 0.5 {
        first
    } else {
        cluster
            .iter()
            .chain(std::iter::once(&3))
            .map(|&k| project(&vecs[k]))
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or(first)
    };
    if q2.norm() < 1e-6 {
        return Err(Error::Numeric("could not complete the symplectic frame".into()));
    }
    let q2 = q2.normalize();
    let q_frame = Matrix4::from_columns(&[q1, q2, -(j * q1), -(j * q2)]);

    let gq1 = m * q1;
    let gq2 = m * q2;
    let (n1, n2) = (gq1.norm(), gq2.norm());
    let a1 = n1.ln().max(0.0);
    let a2 = n2.ln().clamp(0.0, a1);
    let c1 = gq1 / n1;
    let c2 = gq2 / n2;
    let k1_raw = Matrix4::from_columns(&[c1, c2, -(j * c1), -(j * c2)]);
    let u1 = nearest_unitary(&Matrix2::from_fn(|r, c| Complex64::new(k1_raw[(r, c)], k1_raw[(r + 2, c)])));
    let u2_frame = Matrix2::from_fn(|r, c| Complex64::new(q_frame[(r, c)], q_frame[(r + 2, c)]));
    let u2 = nearest_unitary(&u2_frame).adjoint();

    let k1 = MaximalCompactElement::from_unitary(u1)?;
    let k2 = MaximalCompactElement::from_unitary(u2)?;
    let a = WeylPair::new(a1, a2)?;
    let residual = (k1.matrix() * a.element().matrix() * k2.matrix() - m).norm();
    if residual > tol.kak_residual * m.norm().max(1.0) {
        return Err(Error::Numeric(format!(
            "KAK residual {residual:.3e} above tolerance"
        )));
    }
    Ok(KAKResult { k1, a, k2, residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct SymplecticCheck {
    pub in_g: bool,
    pub in_k: bool,
    /// ||g^T J g - J||_F.
    pub group_defect: f64,
    /// ||g^T g - I||_F.
    pub compact_defect: f64,
    #[serde(skip)]
    pub u: Option<Matrix2<Complex64>>,
}

pub fn symplectic_check(g: &Matrix4<f64>) -> SymplecticCheck {
    let tol = Tolerances::default();
    let gd = group_defect(g);
    let kd = compact_defect(g);
    let in_g = gd <= tol.group_defect * g.norm_squared().max(1.0);
    let k = if in_g && kd <= tol.compact_defect {
        MaximalCompactElement::from_matrix(*g).ok()
    } else {
        None
    };
    SymplecticCheck {
        in_g,
        in_k: k.is_some(),
        group_defect: gd,
        compact_defect: kd,
        u: k.map(|k| *k.unitary()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpecialElement {
    /// diag(e^a1, e^a2, e^-a1, e^-a2).
    D { alpha1: f64, alpha2: f64 },
    /// diag(e^a, 1, e^-a, 1).
    DAlpha(f64),
    /// diag(e^a, e^a, e^-a, e^-a).
    DPrime(f64),
    /// [[a+ib, -sqrt(1-a^2-b^2)], [sqrt(1-a^2-b^2), a-ib]] embedded in K.
    U { a: f64, b: f64 },
    /// ((1+i)/sqrt 2) I embedded in K.
    V,
}

pub fn special_elements(kind: SpecialElement) -> Result<SymplecticElement> {
    match kind {
        SpecialElement::D { alpha1, alpha2 } => finite_diag(alpha1, alpha2),
        SpecialElement::DAlpha(a) => finite_diag(a, 0.0),
        SpecialElement::DPrime(a) => finite_diag(a, a),
        SpecialElement::U { a, b } => Ok(*u_element(a, b)?.element()),
        SpecialElement::V => Ok(*v_element().element()),
    }
}

fn finite_diag(a1: f64, a2: f64) -> Result<SymplecticElement> {
    if !a1.is_finite() || !a2.is_finite() {
        return Err(Error::InvalidInput("non-finite diagonal parameter".into()));
    }
    Ok(diag_element(a1, a2))
}

pub fn u_element(a: f64, b: f64) -> Result<MaximalCompactElement> {
    let rest = 1.0 - a * a - b * b;
    if !(rest >= -1e-12) {
        return Err(Error::Domain(format!("a^2 + b^2 = {} exceeds 1", a * a + b * b)));
    }
    let c = rest.max(0.0).sqrt();
    su2_element(a, b, c, 0.0)
}

/// [[a+ib, -c+id], [c+id, a-ib]] with a^2 + b^2 + c^2 + d^2 = 1.
pub fn su2_element(a: f64, b: f64, c: f64, d: f64) -> Result<MaximalCompactElement> {
    let u = Matrix2::new(
        Complex64::new(a, b),
        Complex64::new(-c, d),
        Complex64::new(c, d),
        Complex64::new(a, -b),
    );
    MaximalCompactElement::from_unitary(u)
}

pub fn v_element() -> MaximalCompactElement {
    let z = Complex64::new(1.0, 1.0) / 2f64.sqrt();
    MaximalCompactElement::from_unitary(Matrix2::identity() * z).expect("scalar unitary")
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundtripReport {
    pub cases: usize,
    pub near_degenerate: usize,
    /// Largest |recovered a - a| over both coordinates.
    pub max_alpha_error: f64,
    pub max_residual: f64,
    /// Cases where decomposition failed outright.
    pub failures: usize,
}

/// Decompose `count` elements k1 D(a) k2 with Haar-random k1, k2. The last
/// `near_degenerate` cases put a within 1e-8 of a chamber wall, alternating
/// between alpha1 - alpha2 <= 1e-8 and alpha2 <= 1e-8.
pub fn kak_roundtrip_suite(
    count: usize,
    near_degenerate: usize,
    alpha_max: f64,
    seed: u64,
) -> Result<RoundtripReport> {
    if near_degenerate > count || !(alpha_max >= 0.0) {
        return Err(Error::InvalidInput("need near_degenerate <= count and alpha_max >= 0".into()));
    }
    let mut rng = crate::schatten::restart_rng(seed, 0);
    let mut report = RoundtripReport {
        cases: count,
        near_degenerate,
        max_alpha_error: 0.0,
        max_residual: 0.0,
        failures: 0,
    };
    for i in 0..count {
        let a1 = rng.random_range(0.0..=alpha_max);
        let (a1, a2) = match i.checked_sub(count - near_degenerate) {
            None => (a1, rng.random_range(0.0..=a1)),
            Some(k) if k % 2 == 0 => (a1, (a1 - rng.random_range(0.0..=1e-8)).max(0.0)),
            Some(_) => (a1, rng.random_range(0.0..=1e-8f64).min(a1)),
        };
        let k1 = MaximalCompactElement::random(&mut rng);
        let k2 = MaximalCompactElement::random(&mut rng);
        let g = k1.element().mul(&diag_element(a1, a2)).mul(k2.element());
        match kak_decompose(&g) {
            Ok(r) => {
                let err = (r.a.alpha1() - a1).abs().max((r.a.alpha2() - a2).abs());
                report.max_alpha_error = report.max_alpha_error.max(err);
                report.max_residual = report.max_residual.max(r.residual);
            }
            Err(_) => report.failures += 1,
        }
    }
    Ok(report)
}

/// Sp(2, R) with its maximal compact subgroup K = U(2).
#[derive(Debug, Clone, Copy, Default)]
pub struct Sp2OverK;

impl GroupWithCompact for Sp2OverK {
    type Elem = SymplecticElement;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.mul(b)
    }

    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        a.inverse()
    }

    fn sample_k<R: Rng>(&self, rng: &mut R) -> Self::Elem {
        *MaximalCompactElement::random(rng).element()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::haar_u1_in_u2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn compose(k1: &MaximalCompactElement, a1: f64, a2: f64, k2: &MaximalCompactElement) -> SymplecticElement {
        k1.element().mul(&diag_element(a1, a2)).mul(k2.element())
    }

    #[test]
    fn diagonal_input_is_trivial() {
        let g = diag_element(1.3, 0.4);
        let r = kak_decompose(&g).unwrap();
        assert!((r.a.alpha1() - 1.3).abs() < 1e-12 && (r.a.alpha2() - 0.4).abs() < 1e-12);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn compact_input_has_zero_a() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let k = MaximalCompactElement::random(&mut rng);
            let r = kak_decompose(k.element()).unwrap();
            assert!(r.a.alpha1() < 1e-12 && r.residual < 1e-10);
        }
        let r = kak_decompose(&SymplecticElement::identity()).unwrap();
        assert_eq!((r.a.alpha1(), r.a.alpha2()), (0.0, 0.0));
    }

    #[test]
    fn random_roundtrip_and_uniqueness() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let k1 = MaximalCompactElement::random(&mut rng);
            let k2 = MaximalCompactElement::random(&mut rng);
            let g = compose(&k1, 1.3, 0.4, &k2);
            let r = kak_decompose(&g).unwrap();
            assert!((r.a.alpha1() - 1.3).abs() < 1e-8, "{:?}", r.a);
            assert!((r.a.alpha2() - 0.4).abs() < 1e-8, "{:?}", r.a);
            assert!(r.residual <= 1e-8);
        }
    }

    #[test]
    fn degenerate_chamber_walls() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(a1, a2) in &[(0.7, 0.7), (0.7, 0.7 - 1e-9), (0.9, 0.0), (0.9, 5e-9), (0.0, 0.0), (1e-9, 0.0)] {
            for _ in 0..10 {
                let k1 = MaximalCompactElement::random(&mut rng);
                let k2 = MaximalCompactElement::random(&mut rng);
                let r = kak_decompose(&compose(&k1, a1, a2, &k2)).unwrap();
                assert!((r.a.alpha1() - a1).abs() < 1e-8 && (r.a.alpha2() - a2).abs() < 1e-8, "{a1} {a2}: {:?}", r.a);
                assert!(r.residual <= 1e-8);
            }
        }
    }

    #[test]
    fn non_symplectic_rejected() {
        let mut m = Matrix4::identity();
        m[(0, 1)] = 0.1;
        assert!(SymplecticElement::new(m).is_err());
        assert!(!symplectic_check(&m).in_g);
    }

    #[test]
    fn checks() {
        let id = symplectic_check(&Matrix4::identity());
        assert!(id.in_g && id.in_k && id.group_defect == 0.0 && id.compact_defect == 0.0);
        let d = symplectic_check(diag_element(1.0, 0.5).matrix());
        assert!(d.in_g && !d.in_k);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = haar_u2(&mut rng);
        let c = symplectic_check(&embed_u2(&u));
        assert!(c.in_g && c.in_k && c.group_defect <= 1e-12 && c.compact_defect <= 1e-12);
        assert!((c.u.unwrap() - u).norm() < 1e-15);
    }

    #[test]
    fn singular_values_pair_up() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let k1 = MaximalCompactElement::random(&mut rng);
            let k2 = MaximalCompactElement::random(&mut rng);
            let g = compose(&k1, rng.random_range(0.0..2.0), rng.random_range(0.0..0.5), &k2);
            let mut s: Vec<f64> = g.matrix().singular_values().iter().copied().collect();
            s.sort_by(f64::total_cmp);
            assert!((s[0] * s[3] - 1.0).abs() < 1e-9 && (s[1] * s[2] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn special_element_examples() {
        let u = special_elements(SpecialElement::U { a: 1.0, b: 0.0 }).unwrap();
        assert!((u.matrix() - Matrix4::identity()).norm() < 1e-15);
        let d = special_elements(SpecialElement::DAlpha(0.0)).unwrap();
        assert_eq!(*d.matrix(), Matrix4::identity());
        let vv = v_element().element().mul(v_element().element());
        let i_embed = embed_u2(&(Matrix2::identity() * Complex64::i()));
        assert!((vv.matrix() - i_embed).norm() < 1e-15);
        assert!(special_elements(SpecialElement::U { a: 0.9, b: 0.5 }).is_err());
        for kind in [
            SpecialElement::D { alpha1: 2.0, alpha2: -1.0 },
            SpecialElement::DAlpha(0.3),
            SpecialElement::DPrime(1.1),
            SpecialElement::U { a: 0.3, b: -0.5 },
            SpecialElement::V,
        ] {
            assert!(symplectic_check(special_elements(kind).unwrap().matrix()).in_g);
        }
    }

    #[test]
    fn commutation_with_subgroups() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let alpha = rng.random_range(0.0..3.0);
            let d = special_elements(SpecialElement::DAlpha(alpha)).unwrap();
            let k = embed_u2(&haar_u1_in_u2(&mut rng));
            assert!((d.matrix() * k - k * d.matrix()).norm() <= 1e-12);
            let dp = special_elements(SpecialElement::DPrime(alpha)).unwrap();
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let rot = Matrix2::new(th.cos(), -th.sin(), th.sin(), th.cos()).map(|x| Complex64::new(x, 0.0));
            let k3 = embed_u2(&rot);
            assert!((dp.matrix() * k3 - k3 * dp.matrix()).norm() <= 1e-12);
        }
    }

    #[test]
    fn embedding_is_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (u, v) = (haar_u2(&mut rng), haar_u2(&mut rng));
            assert!((embed_u2(&(u * v)) - embed_u2(&u) * embed_u2(&v)).norm() <= 1e-12);
        }
    }

    #[test]
    fn suite_small() {
        let r = kak_roundtrip_suite(40, 10, 3.0, 9).unwrap();
        assert_eq!(r.failures, 0);
        assert!(r.max_alpha_error < 1e-8 && r.max_residual <= 1e-8, "{r:?}");
        assert!(kak_roundtrip_suite(5, 6, 1.0, 0).is_err());
    }

    #[test]
    fn inverse_and_json() {
        let g = compose(&v_element(), 0.8, 0.2, &u_element(0.3, 0.4).unwrap());
        assert!((g.mul(&g.inverse()).matrix() - Matrix4::identity()).norm() < 1e-12);
        let text = serde_json::to_string(&g).unwrap();
        let back: SymplecticElement = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<SymplecticElement>("[[1,1,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]").is_err());
        let r = kak_decompose(&g).unwrap();
        let v: serde_json::Value = serde_json::to_value(r).unwrap();
        assert!(v["alpha1"].as_f64().unwrap() >= v["alpha2"].as_f64().unwrap());
        assert_eq!(v["k1"].as_array().unwrap().len(), 4);
    }
}

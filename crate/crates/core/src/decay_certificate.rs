//! The explicit constants controlling how fast a K-bi-invariant multiplier
//! on Sp(2, R) can approach its limit along the Weyl chamber,
//!
//!   |phi(D(a1, a2)) - phi_inf| <= C1(p) ||phi||_{MS^p} e^{-C2(p) |a|},
//!
//! and the certificates obtained by reading that inequality backwards.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::WeylPair;

/// Default number of explicit terms before the Euler–Maclaurin tail.
pub const DEFAULT_TRUNCATION: usize = 64;

/// B_2, B_4, ..., B_12.
const BERNOULLI: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Riemann zeta for real s > 1: the first n - 1 terms summed exactly, the
/// rest by Euler–Maclaurin (integral, half term and six Bernoulli
/// corrections). The cutoff used is max(n, ceil(s) + 8) and is returned
/// alongside the value.
pub fn zeta(s: f64, n: usize) -> Result<(f64, usize)> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!("series diverges: zeta needs s > 1, got {s}")));
    }
    let n = n.max(s.ceil() as usize + 8).max(2);
    let head = compensated_sum((1..n).rev().map(|k| (k as f64).powf(-s)));
    let nf = n as f64;
    let mut tail = nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // B_{2j} / (2j)! * s (s+1) ... (s+2j-2) * n^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut power = nf.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        tail += b / fact * rising * power;
        let k = 2.0 * j as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        fact *= (k + 3.0) * (k + 4.0);
        power /= nf * nf;
    }
    Ok((head + tail, n))
}

/// Which side of each max{} is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveBranches {
    /// C3 = C_hat 2^{1/4-1/p} rather than 2 e^{1/2}.
    pub c3_from_series: bool,
    /// C4 = C_tilde rather than 2 e^{1/8}.
    pub c4_from_series: bool,
    /// C6 = C5' rather than 2 e^{5/32}.
    pub c6_from_chain: bool,
    /// C1 = C3 + C6 rather than C4 + C6.
    pub c1_from_c3: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayConstants {
    pub p: f64,
    pub c_u2: f64,
    pub c_tilde: f64,
    pub c_hat: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c5_prime: f64,
    pub c6: f64,
    pub c1: f64,
    pub c2: f64,
    /// Cutoff used in the zeta tails.
    pub truncation: usize,
    pub branches: ActiveBranches,
}

pub fn chain_constants(p: f64, c_u2: f64) -> Result<DecayConstants> {
    chain_constants_with_truncation(p, c_u2, DEFAULT_TRUNCATION)
}

pub fn chain_constants_with_truncation(p: f64, c_u2: f64, truncation: usize) -> Result<DecayConstants> {
    if !(p > 12.0) || !p.is_finite() {
        return Err(Error::Domain(format!(
            "the chain needs p > 12 (no admissible Hoelder exponent otherwise), got {p}"
        )));
    }
    if !(c_u2 > 0.0) || !c_u2.is_finite() {
        return Err(Error::InvalidInput(format!("C_u2 must be positive, got {c_u2}")));
    }
    // (l, m) pairs with l + m + 1 = k number k, so
    //   sum_{l,m} (l+m+1)^{1 + p eps - p/4} = sum_k k^{2 + p eps - p/4}
    // and with eps = 1/8 - 3/(2p) the exponent is 1/2 - p/8.
    let eps_u = 0.125 - 1.5 / p;
    let (z_u, n_u) = zeta(p / 8.0 - 0.5, truncation)?;
    let c_tilde = 2f64.powf(1.0 - eps_u) * c_u2 * z_u.powf(1.0 / p);
    // sum_{n>=1} (3n)^{1 + p eps - p/2} with eps = 1/4 - 1/p is 3^{-p/4} zeta(p/4).
    let (z_s, n_s) = zeta(p / 4.0, truncation)?;
    let c_hat = 4.0 * 3f64.powf(-0.25) * z_s.powf(1.0 / p);

    let c3_series = c_hat * 2f64.powf(0.25 - 1.0 / p);
    let c3 = c3_series.max(2.0 * 0.5f64.exp());
    let c4 = c_tilde.max(2.0 * 0.125f64.exp());
    let c5 = (1.0f64 / 16.0).exp() * (c3 + c4);
    let rate = 0.25 - 3.0 / p;
    // C5 * sum_{j>=0} e^{-(j/8) rate}
    let c5_prime = c5 / -(-rate / 8.0).exp_m1();
    let c6 = c5_prime.max(2.0 * (5.0f64 / 32.0).exp());
    let c1 = (c3 + c6).max(c4 + c6);
    let c2 = rate / (32.0 * 2f64.sqrt());
    Ok(DecayConstants {
        p,
        c_u2,
        c_tilde,
        c_hat,
        c3,
        c4,
        c5,
        c5_prime,
        c6,
        c1,
        c2,
        truncation: n_u.max(n_s),
        branches: ActiveBranches {
            c3_from_series: c3 == c3_series,
            c4_from_series: c4 == c_tilde,
            c6_from_chain: c6 == c5_prime,
            c1_from_c3: c3 >= c4,
        },
    })
}

/// Constants on `steps` evenly spaced values of p in [p_min, p_max].
pub fn constants_table(p_min: f64, p_max: f64, steps: usize, c_u2: f64) -> Result<Vec<DecayConstants>> {
    if steps == 0 || !(p_max >= p_min) {
        return Err(Error::InvalidInput("need steps >= 1 and p_max >= p_min".into()));
    }
    (0..steps)
        .map(|i| {
            let p = if steps == 1 {
                p_min
            } else {
                p_min + (p_max - p_min) * i as f64 / (steps - 1) as f64
            };
            chain_constants(p, c_u2)
        })
        .collect()
}

/// CSV with columns p,C_tilde,C_hat,C3,C4,C5,C5p,C6,C1,C2.
pub fn write_constants_csv<W: Write>(rows: &[DecayConstants], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["p", "C_tilde", "C_hat", "C3", "C4", "C5", "C5p", "C6", "C1", "C2"])?;
    for c in rows {
        let vals = [c.p, c.c_tilde, c.c_hat, c.c3, c.c4, c.c5, c.c5_prime, c.c6, c.c1, c.c2];
        w.write_record(vals.iter().map(|v| format!("{v:.15e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// C1 e^{-C2 |a|}: the ceiling on |phi(D(a)) - phi_inf| per unit multiplier norm.
pub fn decay_bound(weyl: &WeylPair, consts: &DecayConstants) -> f64 {
    consts.c1 * (-consts.c2 * weyl.norm()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySample {
    /// [alpha1, alpha2].
    pub weyl: WeylPair,
    /// phi(D(alpha1, alpha2)) as [re, im].
    pub value: Complex64,
    /// The limit of phi along the chamber, as [re, im].
    pub phi_inf: Complex64,
}

/// Everything needed to reproduce a certificate exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub p: f64,
    pub c_u2: f64,
    pub truncation: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormCertificate {
    /// Lower bound on the MS^p norm of any continuous K-bi-invariant
    /// multiplier taking these values.
    pub value: f64,
    /// Index of the sample that attains it.
    pub argmax: usize,
    pub provenance: Provenance,
}

/// max over samples of |value - phi_inf| e^{C2 |a|} / C1.
pub fn norm_certificate(samples: &[DecaySample], consts: &DecayConstants) -> Result<NormCertificate> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("no samples".into()));
    }
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, s) in samples.iter().enumerate() {
        let v = (s.value - s.phi_inf).norm() * (consts.c2 * s.weyl.norm()).exp() / consts.c1;
        if !v.is_finite() {
            return Err(Error::Numeric(format!("certificate overflow at sample {i}")));
        }
        if v > best.1 {
            best = (i, v);
        }
    }
    Ok(NormCertificate {
        value: best.1,
        argmax: best.0,
        provenance: Provenance {
            p: consts.p,
            c_u2: consts.c_u2,
            truncation: consts.truncation,
        },
    })
}

/// Samples of phi = 1 (with phi_inf = 0) on `rays` directions of the chamber
/// at radii `radius * k / rings`, k = 0..=rings. The point (radius, 0) is
/// always included, so the certificate is exactly e^{C2 radius} / C1.
pub fn unit_ball_samples(radius: f64, rings: usize, rays: usize) -> Result<Vec<DecaySample>> {
    if !(radius >= 0.0) || rings == 0 || rays == 0 {
        return Err(Error::InvalidInput("need radius >= 0, rings >= 1, rays >= 1".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity((rings + 1) * rays);
    for k in 0..=rings {
        let r = radius * k as f64 / rings as f64;
        for j in 0..rays {
            // angle in [0, pi/4] keeps alpha1 >= alpha2 >= 0
            let th = std::f64::consts::FRAC_PI_4 * j as f64 / (rays - 1).max(1) as f64;
            let weyl = if j == 0 {
                WeylPair::new(r, 0.0)?
            } else {
                let (mut a1, a2) = (r * th.cos(), r * th.sin());
                // keep every point inside the closed ball despite rounding
                while a1 > 0.0 && a1.hypot(a2) > r {
                    a1 = f64::from_bits(a1.to_bits() - 1);
                }
                WeylPair::new(a1, a2.min(a1))?
            };
            out.push(DecaySample {
                weyl,
                value: one,
                phi_inf: zero,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zeta_known_values() {
        let pi = std::f64::consts::PI;
        assert!((zeta(2.0, 10).unwrap().0 - pi * pi / 6.0).abs() < 1e-14);
        assert!((zeta(4.0, 10).unwrap().0 - pi.powi(4) / 90.0).abs() < 1e-14);
        // mpmath: zeta(1.0625) = 16.58174764665502139578
        assert!((zeta(1.0625, 64).unwrap().0 - 16.581_747_646_655_02).abs() < 1e-10);
        assert!(zeta(1.0, 10).is_err());
        let big = zeta(124.5, 64).unwrap().0;
        assert!((big - 1.0).abs() < 1e-30);
    }

    #[test]
    fn zeta_against_direct_sum() {
        for &s in &[1.5, 2.75, 6.0] {
            let direct: f64 = (1..2_000_000u64).rev().map(|k| (k as f64).powf(-s)).sum::<f64>()
                + (2_000_000f64).powf(1.0 - s) / (s - 1.0);
            assert!((zeta(s, 64).unwrap().0 - direct).abs() < 1e-9 * direct);
        }
    }

    #[test]
    fn c2_at_24() {
        let c = chain_constants(24.0, 1.0).unwrap();
        assert!((c.c2 - 0.125 / (32.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((c.c2 - 2.7621e-3).abs() < 1e-7);
        let ratio = c.c5_prime / c.c5;
        assert!((ratio - 1.0 / (1.0 - (-1.0f64 / 64.0).exp())).abs() < 1e-9 * ratio);
    }

    #[test]
    fn domain_and_shape() {
        assert!(matches!(chain_constants(12.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(chain_constants(11.0, 1.0), Err(Error::Domain(_))));
        assert!(chain_constants(24.0, 0.0).is_err());
        let c12 = chain_constants(12.0 + 1e-9, 1.0).unwrap();
        assert!(c12.c2 > 0.0 && c12.c2 < 1e-10);
        let mut last = 0.0;
        for p in [12.5, 13.0, 16.0, 24.0, 48.0, 1000.0] {
            let c = chain_constants(p, 1.0).unwrap();
            for v in [c.c_tilde, c.c_hat, c.c3, c.c4, c.c5, c.c5_prime, c.c6, c.c1, c.c2] {
                assert!(v.is_finite() && v > 0.0);
            }
            assert!(c.c2 > last);
            last = c.c2;
            assert!(c.c1 >= c.c6 && c.c6 >= c.c5_prime && c.c5_prime >= c.c5);
        }
        assert!(last < 0.25 / (32.0 * 2f64.sqrt()));
    }

    #[test]
    fn closed_form_of_c_tilde_and_c_hat() {
        let p = 20.0;
        // direct double sum over (l, m) and single sum over n, with big tails
        let eps_u = 0.125 - 1.5 / p;
        let mut s_u = 0.0;
        for l in 0..3000u32 {
            for m in 0..(3000 - l) {
                s_u += ((l + m + 1) as f64).powf(1.0 + p * eps_u - p / 4.0);
            }
        }
        // at p = 20 the collapsed exponent is -2; add the tail beyond k = 3000
        s_u += 1.0 / 3000.5;
        let eps_s = 0.25 - 1.0 / p;
        let s_s: f64 = (1..100_000u32).map(|n| (3.0 * n as f64).powf(1.0 + p * eps_s - p / 2.0)).sum();
        let c = chain_constants(p, 2.0).unwrap();
        let c_tilde = 2f64.powf(1.0 - eps_u) * 2.0 * s_u.powf(1.0 / p);
        let c_hat = 4.0 * s_s.powf(1.0 / p);
        assert!((c.c_tilde - c_tilde).abs() < 1e-6 * c_tilde);
        assert!((c.c_hat - c_hat).abs() < 1e-12 * c_hat);
    }

    #[test]
    fn truncation_doubling() {
        for p in [12.5, 13.0, 24.0, 100.0] {
            let a = chain_constants_with_truncation(p, 1.0, 64).unwrap();
            let b = chain_constants_with_truncation(p, 1.0, 128).unwrap();
            assert!((a.c_tilde - b.c_tilde).abs() < 1e-9 * b.c_tilde);
            assert!((a.c_hat - b.c_hat).abs() < 1e-9 * b.c_hat);
        }
    }

    #[test]
    fn bound_examples() {
        let c = chain_constants(24.0, 1.0).unwrap();
        let origin = WeylPair::new(0.0, 0.0).unwrap();
        assert_eq!(decay_bound(&origin, &c), c.c1);
        let tau = 3.7;
        let ratio = decay_bound(&WeylPair::new(2.0 * tau, tau).unwrap(), &c) / c.c1;
        assert!((ratio - (-c.c2 * tau * 5f64.sqrt()).exp()).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let b = decay_bound(&WeylPair::new(k as f64, 0.0).unwrap(), &c);
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn certificate_examples() {
        let c = chain_constants(24.0, 1.0).unwrap();
        let z = Complex64::new(0.3, -0.1);
        let same = DecaySample { weyl: WeylPair::new(4.0, 1.0).unwrap(), value: z, phi_inf: z };
        assert_eq!(norm_certificate(&[same], &c).unwrap().value, 0.0);
        let unit = DecaySample {
            weyl: WeylPair::new(0.0, 0.0).unwrap(),
            value: Complex64::new(1.0, 0.0),
            phi_inf: Complex64::new(0.0, 0.0),
        };
        assert!((norm_certificate(&[unit], &c).unwrap().value - 1.0 / c.c1).abs() < 1e-15);
        assert!(norm_certificate(&[], &c).is_err());
        let mut prev = 0.0;
        for r in [10.0, 50.0, 100.0] {
            let cert = norm_certificate(&unit_ball_samples(r, 4, 5).unwrap(), &c).unwrap();
            assert_eq!(cert.value, (c.c2 * r).exp() / c.c1);
            assert!(cert.value > prev);
            prev = cert.value;
            assert_eq!(cert.provenance.truncation, c.truncation);
        }
    }

    #[test]
    fn saturating_samples_certify_unit_norm() {
        let c = chain_constants(30.0, 1.3).unwrap();
        let samples: Vec<DecaySample> = (0..10)
            .map(|k| {
                let weyl = WeylPair::new(k as f64 * 1.7, k as f64 * 0.6).unwrap();
                let b = decay_bound(&weyl, &c);
                DecaySample { weyl, value: Complex64::from_polar(b, k as f64), phi_inf: Complex64::new(0.0, 0.0) }
            })
            .collect();
        assert!((norm_certificate(&samples, &c).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sample_json() {
        let s: DecaySample = serde_json::from_str(r#"{"weyl":[2.0,1.0],"value":[0.5,0.0],"phi_inf":[0.0,0.0]}"#).unwrap();
        assert_eq!(s.weyl.alpha1(), 2.0);
        assert!(serde_json::from_str::<DecaySample>(r#"{"weyl":[1.0,2.0],"value":[0.5,0.0],"phi_inf":[0.0,0.0]}"#).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = constants_table(12.5, 48.0, 20, 1.0).unwrap();
        let mut buf = Vec::new();
        write_constants_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("p,C_tilde,C_hat,C3,C4,C5,C5p,C6,C1,C2\n"));
        assert_eq!(text.lines().count(), 21);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn continuity_in_p(p in 12.2f64..200.0) {
            let a = chain_constants(p, 1.0).unwrap();
            let b = chain_constants(p + 1e-6, 1.0).unwrap();
            for (x, y) in [(a.c_tilde, b.c_tilde), (a.c_hat, b.c_hat), (a.c3, b.c3), (a.c4, b.c4),
                           (a.c5, b.c5), (a.c5_prime, b.c5_prime), (a.c6, b.c6), (a.c1, b.c1), (a.c2, b.c2)] {
                prop_assert!((x - y).abs() < 1e-3 * x);
            }
        }

        #[test]
        fn certificate_is_monotone(extra in prop::collection::vec((0.0f64..50.0, 0.0f64..1.0, -2.0f64..2.0), 1..6)) {
            let c = chain_constants(20.0, 1.0).unwrap();
            let mk = |(a, f, v): (f64, f64, f64)| DecaySample {
                weyl: WeylPair::new(a, a * f).unwrap(),
                value: Complex64::new(v, 0.0),
                phi_inf: Complex64::new(0.0, 0.0),
            };
            let mut samples = vec![mk((1.0, 0.5, 0.2))];
            let mut prev = norm_certificate(&samples, &c).unwrap().value;
            for e in extra {
                samples.push(mk(e));
                let now = norm_certificate(&samples, &c).unwrap().value;
                prop_assert!(now >= prev);
                prev = now;
            }
        }
    }
}

//! Statistical machinery for the separability study: complementary error
//! function, regularized incomplete gamma/beta, normal and F-distribution
//! tails, and the two-sample Z and variance-ratio F tests.
//!
//! Everything is double precision; `erfc` goes through the regularized
//! incomplete gamma function (series + Lentz continued fraction), which is
//! accurate to well under the 1e-7 budget. p-values are clamped at 1e-300
//! instead of underflowing to zero.

use crate::exec;
use crate::learned::features::{char_vector, cosine_similarity, Variant};
use crate::extract::StringGroup;
use crate::three_layer::Dictionary;
use serde::{Deserialize, Serialize};

pub const P_VALUE_FLOOR: f64 = 1e-300;

const EPS: f64 = 1e-15;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 500;

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7, n = 9.
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma P(a, x) by series expansion.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x == 0.0 {
        return 1.0;
    }
    gamma_q(0.5, x * x)
}

/// Upper tail of the standard normal.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
pub fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// CDF of the F distribution with (d1, d2) degrees of freedom.
pub fn f_cdf(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 0.0;
    }
    beta_inc(d1 / 2.0, d2 / 2.0, d1 * f / (d1 * f + d2))
}

fn mean_and_var(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    // Sample variance (ddof = 1).
    let var = if sample.len() > 1 {
        sample.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Two-sample two-tailed Z test on means. Returns (z, p).
pub fn z_test(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (ma, va) = mean_and_var(a);
    let (mb, vb) = mean_and_var(b);
    let se = (va / a.len() as f64 + vb / b.len() as f64).sqrt();
    if se == 0.0 {
        return (0.0, 1.0);
    }
    let z = (ma - mb) / se;
    let p = erfc(z.abs() / std::f64::consts::SQRT_2).max(P_VALUE_FLOOR);
    (z, p)
}

/// Variance-ratio F test with the larger variance in the numerator,
/// two-tailed. Returns (f, p).
pub fn f_test(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (_, va) = mean_and_var(a);
    let (_, vb) = mean_and_var(b);
    if va == 0.0 && vb == 0.0 {
        return (1.0, 1.0);
    }
    let (num, den, d1, d2) = if va >= vb {
        (va, vb, a.len() as f64 - 1.0, b.len() as f64 - 1.0)
    } else {
        (vb, va, b.len() as f64 - 1.0, a.len() as f64 - 1.0)
    };
    if den == 0.0 {
        return (f64::INFINITY, P_VALUE_FLOOR);
    }
    let f = num / den;
    let p = (2.0 * (1.0 - f_cdf(f, d1, d2))).clamp(P_VALUE_FLOOR, 1.0);
    (f, p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub variant: Variant,
    pub n_secret: usize,
    pub n_nosecret: usize,
    pub pairs_ss: usize,
    pub pairs_sn: usize,
    pub mean_ss: f64,
    pub mean_sn: f64,
    pub var_ss: f64,
    pub var_sn: f64,
    pub f_stat: f64,
    pub f_p: f64,
    pub z_stat: f64,
    pub z_p: f64,
    pub warnings: Vec<String>,
}

/// Average within-secret (SvS) and cross-collection (SvN) cosine similarity
/// over character vectors, with F/Z significance tests on the two
/// similarity samples. All pairs are compared unless `max_pairs` caps a
/// sample, in which case a deterministic stride subsample is used.
pub fn separability_study(
    secret: &[StringGroup],
    nosecret: &[StringGroup],
    variant: Variant,
    dictionary: &Dictionary,
    max_pairs: Option<usize>,
) -> StudyReport {
    let mut warnings = Vec::new();
    if secret.len() != nosecret.len() {
        warnings.push(format!(
            "collection sizes differ: {} secret vs {} nosecret",
            secret.len(),
            nosecret.len()
        ));
    }

    fn to_vectors<'g>(
        groups: &'g [StringGroup],
        variant: Variant,
        dictionary: &Dictionary,
    ) -> Vec<(&'g StringGroup, crate::learned::features::FeatureVector)> {
        groups
            .iter()
            .filter_map(|g| {
                char_vector(&g.strings, variant, dictionary)
                    .ok()
                    .filter(|v| !v.is_zero())
                    .map(|v| (g, v))
            })
            .collect()
    }
    let sv = to_vectors(secret, variant, dictionary);
    let nv = to_vectors(nosecret, variant, dictionary);
    if sv.len() != secret.len() || nv.len() != nosecret.len() {
        warnings.push(format!(
            "skipped {} groups with empty feature vectors",
            (secret.len() - sv.len()) + (nosecret.len() - nv.len())
        ));
    }

    // Within-secret pairs, parallel by row.
    let rows: Vec<usize> = (0..sv.len()).collect();
    let ss_rows = exec::map_items(&rows, None, |&i| {
        let mut vals = Vec::with_capacity(sv.len().saturating_sub(i + 1));
        for j in i + 1..sv.len() {
            if let Ok(c) = cosine_similarity(&sv[i].1, &sv[j].1) {
                vals.push(c);
            }
        }
        vals
    });
    let mut ss: Vec<f64> = ss_rows.into_iter().flatten().collect();

    // Cross pairs. A group literally present in both collections is not
    // compared against itself, so identical collections yield mean_sn ==
    // mean_ss; disjoint collections compare every pair.
    let sn_rows = exec::map_items(&rows, None, |&i| {
        let mut vals = Vec::with_capacity(nv.len());
        for (g, v) in &nv {
            if *g == sv[i].0 {
                continue;
            }
            if let Ok(c) = cosine_similarity(&sv[i].1, v) {
                vals.push(c);
            }
        }
        vals
    });
    let mut sn: Vec<f64> = sn_rows.into_iter().flatten().collect();

    if let Some(cap) = max_pairs {
        ss = stride_sample(ss, cap);
        sn = stride_sample(sn, cap);
    }

    let (mean_ss, var_ss) = if ss.is_empty() { (0.0, 0.0) } else { mean_and_var(&ss) };
    let (mean_sn, var_sn) = if sn.is_empty() { (0.0, 0.0) } else { mean_and_var(&sn) };
    let (f_stat, f_p) = f_test(&ss, &sn);
    let (z_stat, z_p) = z_test(&ss, &sn);

    StudyReport {
        variant,
        n_secret: sv.len(),
        n_nosecret: nv.len(),
        pairs_ss: ss.len(),
        pairs_sn: sn.len(),
        mean_ss,
        mean_sn,
        var_ss,
        var_sn,
        f_stat,
        f_p,
        z_stat,
        z_p,
        warnings,
    }
}

fn stride_sample(values: Vec<f64>, cap: usize) -> Vec<f64> {
    if values.len() <= cap || cap == 0 {
        return values;
    }
    let stride = values.len().div_ceil(cap);
    values.into_iter().step_by(stride).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed independently with scipy.special /
    // scipy.stats and frozen here.
    #[test]
    fn erfc_matches_reference_values() {
        let cases = [
            (0.0, 1.0),
            (0.1, 0.887537083981715),
            (0.5, 0.479500122186953),
            (1.0, 0.157299207050285),
            (1.5, 0.0338948535246893),
            (2.0, 0.00467773498104727),
            (3.0, 2.20904969985854e-05),
            (5.0, 1.53745979442803e-12),
            (-1.0, 1.84270079294971),
            (-2.5, 1.99959304798255),
        ];
        for (x, want) in cases {
            let got = erfc(x);
            assert!(
                (got - want).abs() < 1e-10,
                "erfc({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn beta_inc_matches_reference_values() {
        let cases = [
            (0.5, 0.5, 0.3, 0.369010119565545),
            (2.0, 3.0, 0.4, 0.5248),
            (10.0, 40.0, 0.2, 0.528295785673386),
            (149.0, 149.0, 0.5, 0.5),
            (5.0, 5.0, 0.7, 0.90119134),
            (0.5, 3.0, 0.05, 0.405496952294727),
        ];
        for (a, b, x, want) in cases {
            let got = beta_inc(a, b, x);
            assert!(
                (got - want).abs() < 1e-8,
                "betainc({a},{b},{x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn f_cdf_matches_reference_values() {
        let cases = [
            (1.5, 10.0, 12.0, 0.750129725327976),
            (2.3, 99.0, 99.0, 0.999977077060329),
            (1.0, 5.0, 5.0, 0.5),
        ];
        for (f, d1, d2, want) in cases {
            let got = f_cdf(f, d1, d2);
            assert!(
                (got - want).abs() < 1e-9,
                "f_cdf({f};{d1},{d2}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn z_test_two_tailed_reference() {
        // 2 * norm.sf(3.0) = 0.0026997960632602.
        let p = erfc(3.0 / std::f64::consts::SQRT_2);
        assert!((p - 0.0026997960632601866).abs() < 1e-12);
    }

    #[test]
    fn z_test_identical_samples_not_significant() {
        let a = [0.4, 0.5, 0.6, 0.5, 0.45];
        let (z, p) = z_test(&a, &a);
        assert_eq!(z, 0.0);
        assert!(p > 0.99);
    }

    #[test]
    fn f_test_puts_larger_variance_in_numerator() {
        let tight = [0.5, 0.51, 0.49, 0.5, 0.5, 0.52, 0.48];
        let wide = [0.1, 0.9, 0.3, 0.7, 0.2, 0.8, 0.5];
        let (f1, _) = f_test(&tight, &wide);
        let (f2, _) = f_test(&wide, &tight);
        assert!(f1 >= 1.0);
        assert!((f1 - f2).abs() < 1e-12);
    }

    #[test]
    fn p_values_are_clamped_not_zero() {
        let a: Vec<f64> = (0..2000).map(|i| 0.9 + (i % 7) as f64 * 1e-4).collect();
        let b: Vec<f64> = (0..2000).map(|i| 0.1 + (i % 7) as f64 * 1e-4).collect();
        let (_, p) = z_test(&a, &b);
        assert!(p >= P_VALUE_FLOOR);
        assert!(p < 1e-100);
    }

    #[test]
    fn identical_collections_have_equal_means() {
        let dict = Dictionary::default_dictionary();
        let words = [
            "grant_type",
            "refresh_token",
            "client_id",
            "ZXhhbXBsZQ==",
            "layout_width",
            "https://api.example.com/v1",
            "Bearer 9f8e7d",
            "onCreate",
        ];
        let mk = |id: usize| StringGroup {
            app_id: "a".into(),
            class_name: format!("c{id}"),
            method_name: "m()".into(),
            strings: vec![
                words[id % words.len()].to_string(),
                words[(id * 3 + 1) % words.len()].to_string(),
            ],
        };
        let groups: Vec<StringGroup> = (0..8).map(mk).collect();
        let report = separability_study(
            &groups,
            &groups,
            Variant::CaseSensitive,
            &dict,
            None,
        );
        assert!(
            (report.mean_ss - report.mean_sn).abs() < 1e-12,
            "means differ: {} vs {}",
            report.mean_ss,
            report.mean_sn
        );
        assert!(report.z_p > 0.01, "z_p = {}", report.z_p);
    }

    #[test]
    fn stride_sampling_caps_deterministically() {
        let vals: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let s1 = stride_sample(vals.clone(), 10);
        let s2 = stride_sample(vals, 10);
        assert_eq!(s1, s2);
        assert!(s1.len() <= 10);
    }
}

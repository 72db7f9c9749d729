//! Student's t distribution via the regularized incomplete beta function.

use libm::{exp, fabs, lgamma, log};

/// Two-sided p-value of `t` with `df` degrees of freedom.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() || df.is_nan() || df <= 0.0 {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    beta_inc(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log(1.0 - x);
    let front = exp(ln_front);
    // the continued fraction converges fast only on this side of the mean
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta, modified Lentz method.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if fabs(d) < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = f64::from(m);
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if fabs(del - 1.0) < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, StudentsT};

    fn oracle(t: f64, df: f64) -> f64 {
        let dist = StudentsT::new(0.0, 1.0, df).unwrap();
        2.0 * dist.cdf(-t.abs())
    }

    #[test]
    fn matches_reference_implementation() {
        for &df in &[1.0, 2.0, 3.5, 10.0, 28.0, 76.0, 98.0, 500.0] {
            for &t in &[0.0, 0.1, 0.5, 1.0, 1.955, 2.449, 3.0, 5.0, 12.0, -2.0] {
                let p = t_two_sided_p(t, df);
                let q = oracle(t, df);
                assert!((p - q).abs() < 1e-10, "t={t} df={df}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn known_values() {
        assert_eq!(t_two_sided_p(0.0, 10.0), 1.0);
        // t = 1.955 at df near 76 gives p close to 0.054
        let p = t_two_sided_p(1.955, 76.0);
        assert!((p - 0.054).abs() < 5e-4, "{p}");
        // df = 1 is the Cauchy distribution: p = 1 - 2 atan(t) / pi
        let p = t_two_sided_p(1.0, 1.0);
        assert!((p - 0.5).abs() < 1e-12);
        assert_eq!(t_two_sided_p(f64::INFINITY, 3.0), 0.0);
        assert!(t_two_sided_p(1.0, 0.0).is_nan());
    }

    #[test]
    fn beta_edges_and_symmetry() {
        assert_eq!(beta_inc(2.0, 3.0, 0.0), 0.0);
        assert_eq!(beta_inc(2.0, 3.0, 1.0), 1.0);
        // I_x(a, b) = 1 - I_{1-x}(b, a)
        let v = beta_inc(2.5, 4.0, 0.3) + beta_inc(4.0, 2.5, 0.7);
        assert!((v - 1.0).abs() < 1e-13);
        // I_x(1, 1) = x
        assert!((beta_inc(1.0, 1.0, 0.37) - 0.37).abs() < 1e-14);
    }
}

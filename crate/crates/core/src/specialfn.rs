//! Special functions on the positive real axis: Euler Gamma, digamma,
//! trigamma, and hyperbolic helpers that stay accurate near the origin.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Below this the digamma/trigamma arguments are shifted upward by recurrence
/// before the asymptotic series is applied.
const ASYMPTOTIC_THRESHOLD: f64 = 10.0;

/// Euler Gamma function for `x > 0` (Lanczos approximation, g = 7).
///
/// Arguments below 0.5 are evaluated through `Γ(x) = Γ(x + 1) / x`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok(lanczos(x + 1.0) / x);
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // split the power so that t^(z+0.5) does not overflow near x = 170
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * std::f64::consts::PI).sqrt() * half * (half * (-t).exp()) * acc
}

/// Polygamma function of order `m` ∈ {0, 1}: digamma for `m = 0`,
/// trigamma for `m = 1`.
pub fn polygamma(m: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("polygamma requires x > 0, got {x}")));
    }
    match m {
        0 => Ok(digamma(x)),
        1 => Ok(trigamma(x)),
        _ => Err(Error::Domain(format!(
            "polygamma order {m} unsupported (only 0 and 1)"
        ))),
    }
}

fn digamma(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < ASYMPTOTIC_THRESHOLD {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli terms B_{2k} / (2k x^{2k}), k = 1..7
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32_760.0 - inv2 / 12.0))))));
    shift + x.ln() - 0.5 / x - series
}

fn trigamma(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < ASYMPTOTIC_THRESHOLD {
        shift += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // B_{2k} / x^{2k+1}, k = 1..7
    let series = inv
        * inv2
        * (1.0 / 6.0
            - inv2
                * (1.0 / 30.0
                    - inv2
                        * (1.0 / 42.0
                            - inv2
                                * (1.0 / 30.0
                                    - inv2 * (5.0 / 66.0 - inv2 * (691.0 / 2_730.0 - inv2 * 7.0 / 6.0))))));
    shift + inv + 0.5 * inv2 + series
}

/// Hyperbolic cotangent with a Laurent expansion near zero and an exact
/// unit asymptote for `|x| > 20`.
pub fn coth_safe(x: f64) -> Result<f64> {
    if x == 0.0 || x.is_nan() {
        return Err(Error::Domain("coth_safe is singular at x = 0".into()));
    }
    let a = x.abs();
    let v = if a < 1e-4 {
        1.0 / a + a / 3.0 - a * a * a / 45.0
    } else if a > 20.0 {
        1.0
    } else {
        1.0 / a.tanh()
    };
    Ok(v.copysign(x))
}

/// `x·coth(x)`, even in `x`, equal to 1 at the origin.
pub fn x_coth_x(x: f64) -> f64 {
    let a = x.abs();
    if a < 1e-4 {
        let a2 = a * a;
        1.0 + a2 / 3.0 - a2 * a2 / 45.0
    } else if a > 20.0 {
        a
    } else {
        a / a.tanh()
    }
}

/// `(x / sinh x)²`, even in `x`, equal to 1 at the origin.
pub fn x_csch_x_sq(x: f64) -> f64 {
    let a = x.abs();
    if a < 1e-4 {
        let a2 = a * a;
        1.0 - a2 / 3.0 + a2 * a2 / 15.0
    } else if a > 20.0 {
        // sinh a = e^a (1 - e^{-2a}) / 2
        let e = (-a).exp();
        let r = 2.0 * a * e / (1.0 - e * e);
        r * r
    } else {
        let r = a / a.sinh();
        r * r
    }
}

/// `sin(x) / x`, equal to 1 at the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-5 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn gamma_known_values() {
        assert_relative_eq!(gamma_fn(1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(
            gamma_fn(0.5).unwrap(),
            std::f64::consts::PI.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(gamma_fn(4.0).unwrap(), 6.0, max_relative = 1e-14);
        // 20! = Γ(21)
        assert_relative_eq!(
            gamma_fn(21.0).unwrap(),
            2_432_902_008_176_640_000.0,
            max_relative = 1e-13
        );
        // 169! is finite; check against ln Γ summed directly
        let ln_fact: f64 = (1..170).map(|k| (k as f64).ln()).sum();
        assert_relative_eq!(gamma_fn(170.0).unwrap().ln(), ln_fact, max_relative = 1e-13);
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
        assert!(gamma_fn(f64::NAN).is_err());
    }

    #[test]
    fn polygamma_identities() {
        assert_relative_eq!(polygamma(0, 1.0).unwrap(), -EULER_GAMMA, max_relative = 1e-12);
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert_relative_eq!(polygamma(1, 1.0).unwrap(), zeta2, max_relative = 1e-12);
    }

    #[test]
    fn digamma_at_ten_by_recurrence() {
        let chained = (1..10).fold(-EULER_GAMMA, |acc, k| acc + 1.0 / k as f64);
        assert_relative_eq!(polygamma(0, 10.0).unwrap(), chained, max_relative = 1e-12);
    }

    #[test]
    fn polygamma_rejects_bad_input() {
        assert!(polygamma(2, 1.0).is_err());
        assert!(polygamma(0, 0.0).is_err());
        assert!(polygamma(1, -3.0).is_err());
    }

    #[test]
    fn coth_examples() {
        assert!((coth_safe(20.0).unwrap() - 1.0).abs() <= 1e-15);
        let e2 = 1f64.exp().powi(2);
        assert_relative_eq!(coth_safe(1.0).unwrap(), (e2 + 1.0) / (e2 - 1.0), max_relative = 1e-15);
        let small = coth_safe(1e-6).unwrap();
        assert_relative_eq!(small, 1e6 + 1e-6 / 3.0, max_relative = 1e-15);
        assert!(coth_safe(0.0).is_err());
    }

    #[test]
    fn hyperbolic_helpers_are_continuous_at_branch_points() {
        for &b in &[1e-4, 20.0] {
            let lo = b * (1.0 - 1e-12);
            let hi = b * (1.0 + 1e-12);
            assert_relative_eq!(x_coth_x(lo), x_coth_x(hi), max_relative = 1e-10);
            assert_relative_eq!(x_csch_x_sq(lo), x_csch_x_sq(hi), max_relative = 1e-10);
            assert_relative_eq!(coth_safe(lo).unwrap(), coth_safe(hi).unwrap(), max_relative = 1e-10);
        }
        assert_eq!(x_csch_x_sq(800.0), 0.0);
        assert_eq!(x_coth_x(0.0), 1.0);
    }

    proptest! {
        #[test]
        fn gamma_recurrence(x in 1e-3f64..100.0) {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            prop_assert!(((lhs - rhs) / lhs).abs() <= 1e-12);
        }

        #[test]
        fn digamma_recurrence(x in 1e-3f64..100.0) {
            let a = polygamma(0, x + 1.0).unwrap();
            let b = polygamma(0, x).unwrap() + 1.0 / x;
            let scale = a.abs().max(1.0 / x);
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }

        #[test]
        fn trigamma_positive(x in 1e-6f64..1e6) {
            prop_assert!(polygamma(1, x).unwrap() > 0.0);
        }

        #[test]
        fn coth_is_odd(x in -50.0f64..50.0) {
            prop_assume!(x != 0.0);
            prop_assert_eq!(coth_safe(-x).unwrap(), -coth_safe(x).unwrap());
        }
    }
}

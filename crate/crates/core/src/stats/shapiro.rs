use statrs::distribution::{ContinuousCDF, Normal};

use super::{NormalityResult, StatsError};

const MAX_N: usize = 5000;

/// Polynomial `c[0] + c[1] x + c[2] x² + …`.
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, k| acc * x + k)
}

/// Shapiro-Wilk W with Royston's (1995) coefficient and p-value
/// approximations, valid for 3 ≤ n ≤ 5000.
pub fn shapiro_wilk(xs: &[f64]) -> Result<NormalityResult, StatsError> {
    let n = xs.len();
    if n < 3 {
        return Err(StatsError::SampleTooSmall { n, min: 3 });
    }
    if n > MAX_N {
        return Err(StatsError::SampleTooLarge { n, max: MAX_N });
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut x = xs.to_vec();
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if range <= 0.0 {
        return Err(StatsError::DegenerateSample);
    }

    let std_normal = Normal::standard();
    let nf = n as f64;
    let half = n / 2;

    // Coefficients for the upper half; the lower half mirrors them.
    let mut a = vec![0.0; half];
    if n == 3 {
        a[0] = std::f64::consts::FRAC_1_SQRT_2;
    } else {
        let m: Vec<f64> = (1..=half)
            .map(|i| std_normal.inverse_cdf((nf - i as f64 + 1.0 - 0.375) / (nf + 0.25)))
            .collect();
        let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
        let ssumm2 = summ2.sqrt();
        let u = 1.0 / nf.sqrt();
        const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
        const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
        let a1 = m[0] / ssumm2 + poly(&C1, u);
        let (first, fac) = if n > 5 {
            let a2 = m[1] / ssumm2 + poly(&C2, u);
            let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
                / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
                .sqrt();
            a[1] = a2;
            (2, fac)
        } else {
            let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
            (1, fac)
        };
        a[0] = a1;
        for i in first..half {
            a[i] = m[i] / fac;
        }
    }

    // Center on the median for numerical stability; W is shift-invariant.
    let shift = x[half];
    let mean = x.iter().map(|v| v - shift).sum::<f64>() / nf;
    let ssq: f64 = x.iter().map(|v| (v - shift - mean).powi(2)).sum();
    let num: f64 = (0..half).map(|i| a[i] * (x[n - 1 - i] - x[i])).sum();
    let w = (num * num / ssq).min(1.0);

    let p = if n == 3 {
        let pi6 = 6.0 / std::f64::consts::PI;
        let stqr = (0.75f64).sqrt().asin();
        (pi6 * (w.sqrt().asin() - stqr)).max(0.0)
    } else {
        let y = (1.0 - w).ln();
        let (z_num, m, s) = if n <= 11 {
            let gamma = poly(&[-2.273, 0.459], nf);
            if y >= gamma {
                return Ok(NormalityResult { w, p: 0.0 });
            }
            let m = poly(&[0.544, -0.39978, 0.025054, -6.714e-4], nf);
            let s = poly(&[1.3822, -0.77857, 0.062767, -0.0020322], nf).exp();
            (-(gamma - y).ln(), m, s)
        } else {
            let ln_n = nf.ln();
            let m = poly(&[-1.5861, -0.31082, -0.083751, 0.0038915], ln_n);
            let s = poly(&[-0.4803, -0.082676, 0.0030302], ln_n).exp();
            (y, m, s)
        };
        1.0 - std_normal.cdf((z_num - m) / s)
    };
    Ok(NormalityResult {
        w,
        p: p.clamp(0.0, 1.0),
    })
}

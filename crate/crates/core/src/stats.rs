//! Small statistics helpers shared by the experiment machinery.

use serde::{Deserialize, Serialize};

/// Chi-squared(2) critical value at the 1% level, used by the Jarque–Bera
/// normality test.
pub const JB_CRITICAL_1PCT: f64 = 9.21034037197618;

/// Moment summary of a replicate sample.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub sd: f64,
    /// Root mean square, `sqrt(mean of x^2)`; includes any drift.
    pub rms: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub fn moments(samples: &[f64]) -> Moments {
    let n = samples.len();
    assert!(n >= 2, "moment summary needs at least two samples");
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    let mut sq = 0.0;
    for &x in samples {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        sq += x * x;
    }
    let var = m2 / nf;
    let (skewness, excess_kurtosis) = if var > 0.0 {
        (m3 / nf / var.powf(1.5), m4 / nf / (var * var) - 3.0)
    } else {
        (0.0, 0.0)
    };
    Moments {
        count: n,
        mean,
        sd: (m2 / (nf - 1.0)).sqrt(),
        rms: (sq / nf).sqrt(),
        skewness,
        excess_kurtosis,
    }
}

/// Ordinary least squares line fit with the usual slope standard error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n != y.len() || n < 3 {
        return None;
    }
    let nf = n as f64;
    let xbar = x.iter().sum::<f64>() / nf;
    let ybar = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - xbar) * (xi - xbar);
        sxy += (xi - xbar) * (yi - ybar);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - intercept - slope * xi;
            r * r
        })
        .sum();
    let slope_stderr = (rss / (nf - 2.0) / sxx).sqrt();
    Some(LineFit {
        slope,
        intercept,
        slope_stderr,
    })
}

/// Jarque–Bera statistic and its asymptotic chi-squared(2) p-value.
pub fn jarque_bera(samples: &[f64]) -> (f64, f64) {
    let m = moments(samples);
    let n = samples.len() as f64;
    let stat = n / 6.0 * (m.skewness * m.skewness + m.excess_kurtosis * m.excess_kurtosis / 4.0);
    (stat, (-stat / 2.0).exp())
}

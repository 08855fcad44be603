/// Two-sided normal quantiles for 95% and 99% intervals.
pub const Z95: f64 = 1.96;
pub const Z99: f64 = 2.576;

/// Mean, sample standard deviation and normal-approximation CI half-widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (`N - 1` denominator); 0 when `N < 2`.
    pub std: f64,
    pub ci95: f64,
    pub ci99: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                n,
                mean: f64::NAN,
                std: f64::NAN,
                ci95: f64::NAN,
                ci99: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        let se = std / (n as f64).sqrt();
        Self {
            n,
            mean,
            std,
            ci95: Z95 * se,
            ci99: Z99 * se,
        }
    }
}

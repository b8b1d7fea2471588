//! Gaussian kernel density estimation with Silverman's bandwidth,
//! used to put an empirical density next to the fitted one.

/// Gaussian KDE over a fixed sample.
#[derive(Debug, Clone)]
pub struct GaussianKde {
    data: Vec<f64>,
    bandwidth: f64,
}

impl GaussianKde {
    /// Silverman's rule of thumb:
    /// `h = 0.9 min(sd, iqr / 1.34) n^{-1/5}`.
    pub fn new(data: &[f64]) -> Self {
        assert!(data.len() >= 2, "kde needs at least two observations");
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let var = data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        let sd = var.sqrt();

        let mut sorted = data.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let quartile = |q: f64| -> f64 {
            let pos = q * (sorted.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let frac = pos - lo as f64;
            if lo + 1 < sorted.len() {
                sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
            } else {
                sorted[lo]
            }
        };
        let iqr = quartile(0.75) - quartile(0.25);
        let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
        let bandwidth = (0.9 * spread * n.powf(-0.2)).max(1e-12);

        Self { data: data.to_vec(), bandwidth }
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
        let h = self.bandwidth;
        let sum: f64 = self
            .data
            .iter()
            .map(|&xi| {
                let z = (x - xi) / h;
                (-0.5 * z * z).exp()
            })
            .sum();
        FRAC_1_SQRT_2PI * sum / (self.data.len() as f64 * h)
    }
}

/// 512-point evaluation grid spanning `mean +- 4 sd` of the sample.
pub fn density_grid(data: &[f64]) -> Vec<f64> {
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt().max(1e-12);
    let (lo, hi) = (mean - 4.0 * sd, mean + 4.0 * sd);
    let points = 512;
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

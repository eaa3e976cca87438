//! Sample mean and standard error of per-replication statistics.

/// Mean and standard error of a sample, summed in index order so the
/// result is independent of how the sample was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Summary {
        let (mut sum, mut count) = (0.0, 0usize);
        let values: Vec<f64> = values.into_iter().collect();
        for v in &values {
            sum += v;
            count += 1;
        }
        if count == 0 {
            return Summary { mean: f64::NAN, std_error: f64::NAN, count };
        }
        let mean = sum / count as f64;
        let std_error = if count > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (count as f64 - 1.0) / count as f64).sqrt()
        } else {
            0.0
        };
        Summary { mean, std_error, count }
    }
}

/// Half-width of the gap test "`a - b` exceeds `k` combined standard errors".
pub fn combined_se(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

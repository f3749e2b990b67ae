//! Order-fixed compensated sums, so results do not depend on scheduling.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Sample mean and standard error of the mean (`s/√n`, zero for `n = 1`).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mut total = CompensatedSum::default();
    values.iter().for_each(|&v| total.add(v));
    let mean = total.value() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let mut sq = CompensatedSum::default();
    values.iter().for_each(|&v| sq.add((v - mean) * (v - mean)));
    let var = sq.value() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

use crate::{Error, Result};

/// Per-channel record increments `dR` and their running integrals `R(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    dt: f64,
    increments: Vec<Vec<f64>>,
    running: Vec<Vec<f64>>,
}

impl MeasurementRecord {
    pub fn new(channels: usize, dt: f64) -> Result<Self> {
        if channels == 0 {
            return Err(Error::domain("a record needs at least one channel"));
        }
        if !(dt > 0.0) {
            return Err(Error::domain(format!("dt = {dt} must be positive")));
        }
        Ok(Self {
            dt,
            increments: vec![Vec::new(); channels],
            running: vec![Vec::new(); channels],
        })
    }

    /// Appends one step; `increments[r]` is channel `r`.
    pub fn push(&mut self, increments: &[f64]) -> Result<()> {
        if increments.len() != self.channels() {
            return Err(Error::DimensionMismatch {
                expected: self.channels(),
                found: increments.len(),
            });
        }
        for (ch, &dr) in increments.iter().enumerate() {
            let prev = self.running[ch].last().copied().unwrap_or(0.0);
            self.increments[ch].push(dr);
            self.running[ch].push(prev + dr);
        }
        Ok(())
    }

    pub fn channels(&self) -> usize {
        self.increments.len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.increments[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn increments(&self, channel: usize) -> &[f64] {
        &self.increments[channel]
    }

    pub fn running_integral(&self, channel: usize) -> &[f64] {
        &self.running[channel]
    }

    /// `R` at the last recorded step, zero for an empty record.
    pub fn integral(&self, channel: usize) -> f64 {
        self.running[channel].last().copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_integral_is_prefix_sum() {
        let mut rec = MeasurementRecord::new(2, 0.1).unwrap();
        for k in 0..50 {
            let x = (k as f64 * 0.37).sin();
            rec.push(&[x, -2.0 * x]).unwrap();
        }
        for ch in 0..2 {
            let mut acc = 0.0;
            for (dr, r) in rec.increments(ch).iter().zip(rec.running_integral(ch)) {
                acc += dr;
                assert!((acc - r).abs() < 1e-12);
            }
        }
        assert_eq!(rec.len(), 50);
        assert!(rec.push(&[1.0]).is_err());
    }
}

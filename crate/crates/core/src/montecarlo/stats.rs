//! Order-stable summary statistics.

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
    count: usize,
}

impl Accumulator {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.count += 1;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub count: usize,
}

impl MeanSe {
    /// `(mean − target) / se`.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.se
    }
}

pub fn mean_se(xs: &[f64]) -> MeanSe {
    let n = xs.len();
    let mut s = Accumulator::default();
    xs.iter().for_each(|&x| s.add(x));
    let mean = s.total() / n as f64;
    let mut v = Accumulator::default();
    xs.iter().for_each(|&x| v.add((x - mean) * (x - mean)));
    let var = if n > 1 { v.total() / (n - 1) as f64 } else { f64::NAN };
    MeanSe {
        mean,
        se: (var / n as f64).sqrt(),
        count: n,
    }
}

/// z-score of an observed fraction against a threshold, using the binomial
/// standard error at the observed value (floored at one count).
pub fn fraction_z(hits: usize, total: usize, threshold: f64) -> f64 {
    if total == 0 {
        return f64::NAN;
    }
    let p = hits as f64 / total as f64;
    let floor = 1.0 / total as f64;
    let se = (p.clamp(floor, 1.0 - floor) * (1.0 - p.clamp(floor, 1.0 - floor)) / total as f64).sqrt();
    (p - threshold) / se
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut a = Accumulator::default();
        a.add(1e16);
        for _ in 0..10 {
            a.add(1.0);
        }
        a.add(-1e16);
        assert_eq!(a.total(), 10.0);
        assert_eq!(a.count(), 12);
    }

    #[test]
    fn mean_and_error() {
        let m = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(fraction_z(8, 10, 0.8).abs() < 1e-12);
    }
}

//! Compensated accumulation.

/// Error-free transformation `a + b = s + e` (Knuth's TwoSum).
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Running sum that carries the rounding error of every addition.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    err: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let (s, e) = two_sum(self.sum, value);
        self.sum = s;
        self.err += e;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.err
    }
}

impl std::iter::Sum<f64> for CompensatedSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().sum::<CompensatedSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_is_exact() {
        let (s, e) = two_sum(1.0, 1e-17);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-17);
    }

    #[test]
    fn recovers_cancelled_small_terms() {
        let v = [1.0, 1e-16, 1e-16, 1e-16, 1e-16, -1.0];
        let naive: f64 = v.iter().sum();
        assert_eq!(naive, 0.0);
        assert!((compensated_sum(v) - 4e-16).abs() < 1e-30);
    }
}

/// xⁿ by repeated multiplication. Unlike `f64::powi`, the result does not
/// depend on whether the compiler folds the call.
pub(crate) fn ipow(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * x)
}

#[cfg(test)]
mod tests {
    use super::ipow;

    #[test]
    fn small_powers() {
        assert_eq!(ipow(3.0, 0), 1.0);
        assert_eq!(ipow(-2.0, 5), -32.0);
        assert_eq!(ipow(0.5, 3), 0.125);
    }
}

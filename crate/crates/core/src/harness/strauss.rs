/// Positive root of `nγ² − (n+2)γ − 2 = 0`.
pub fn strauss_exponent(n: u32) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    let n = n as f64;
    ((n + 2.0) + (n * n + 12.0 * n + 4.0).sqrt()) / (2.0 * n)
}

/// `nγ² − (n+2)γ − 2` at `γ`.
pub fn strauss_residual(n: u32, gamma: f64) -> f64 {
    let n = n as f64;
    n * gamma * gamma - (n + 2.0) * gamma - 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_values() {
        assert!((strauss_exponent(1) - 3.56).abs() < 5e-3);
        assert!((strauss_exponent(1) - (3.0 + 17f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((strauss_exponent(2) - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(strauss_exponent(3), 2.0);
        assert!((strauss_exponent(4) - 1.78).abs() < 5e-3);
    }

    #[test]
    fn sandwich_and_residual() {
        for n in 1..=20 {
            let g = strauss_exponent(n);
            let nf = n as f64;
            assert!(strauss_residual(n, g).abs() < 1e-12);
            assert!(1.0 + 2.0 / nf < g && g < 1.0 + 4.0 / nf);
        }
        assert!(strauss_exponent(100_000) - 1.0 < 1e-4);
    }
}

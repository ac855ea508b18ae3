//! Tolerance bands. Every CLT band is `4σ/√N` for a stated σ, so it halves
//! when N quadruples.

/// Width of the two-sided CLT band in standard errors.
pub const SIGMAS: f64 = 4.0;

/// Chi-square significance level.
pub const CHI_SQUARE_LEVEL: f64 = 1e-3;

/// Minimum expected count per pooled chi-square bin.
pub const MIN_EXPECTED_PER_BIN: f64 = 5.0;

/// `4σ/√N`.
pub fn clt_band(sigma: f64, n: usize) -> f64 {
    SIGMAS * sigma / (n as f64).sqrt()
}

/// ECF error: each component of `e^{iuX}` has variance at most 1.
pub fn ecf_band(n: usize) -> f64 {
    clt_band(1.0, n)
}

/// Factorization statistic `|Ê[AB] − Ê[A]Ê[B]|` of unimodular variables.
pub fn factorization_band(n: usize) -> f64 {
    2.0 * clt_band(1.0, n)
}

/// Poisson mean (and, as declared, variance): `4√(λ/N)`.
pub fn poisson_band(lambda: f64, n: usize) -> f64 {
    clt_band(lambda.sqrt(), n)
}

/// Excess kurtosis of a Gaussian sample: `4√(24/N)`.
pub fn kurtosis_band(n: usize) -> f64 {
    clt_band(24f64.sqrt(), n)
}

/// Sample variance with fourth cumulant `κ₄` and variance `σ²`:
/// `4√((κ₄ + 2σ⁴)/N)`.
pub fn variance_band(kappa4: f64, variance: f64, n: usize) -> f64 {
    clt_band((kappa4 + 2.0 * variance * variance).sqrt(), n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrupling_n_halves_every_band() {
        let n = 25_000;
        let pairs = [
            (clt_band(1.7, n), clt_band(1.7, 4 * n)),
            (ecf_band(n), ecf_band(4 * n)),
            (factorization_band(n), factorization_band(4 * n)),
            (poisson_band(2.0, n), poisson_band(2.0, 4 * n)),
            (kurtosis_band(n), kurtosis_band(4 * n)),
            (variance_band(3.0, 1.0, n), variance_band(3.0, 1.0, 4 * n)),
        ];
        for (a, b) in pairs {
            assert!((a - 2.0 * b).abs() <= 1e-15 * a);
        }
    }

    #[test]
    fn declared_values() {
        assert!((ecf_band(100_000) - 0.012_649).abs() < 1e-6);
        assert!((poisson_band(2.0, 100_000) - 0.017_889).abs() < 1e-6);
        assert!((kurtosis_band(100_000) - 0.061_968).abs() < 1e-6);
        assert!((factorization_band(100_000) - 0.025_298).abs() < 1e-6);
    }
}

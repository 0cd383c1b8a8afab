//! Float helpers routed through `libm` so std and no_std builds share one
//! numeric path.

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn powf(base: f64, exponent: f64) -> f64 {
    libm::pow(base, exponent)
}

/// Binomial coefficient C(n, k) as f64.
///
/// Exact integer arithmetic up to n = 64 (the largest C(64, k) fits u128 with
/// headroom for the multiplicative recurrence); the f64 recurrence beyond.
pub(crate) fn binomial_coefficient(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 64 {
        let mut c: u128 = 1;
        for i in 0..k as u128 {
            c = c * (n as u128 - i) / (i + 1);
        }
        c as f64
    } else {
        let mut c = 1.0_f64;
        for i in 0..k {
            c = c * (n - i) as f64 / (i + 1) as f64;
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial_coefficient(7, 2), 21.0);
        assert_eq!(binomial_coefficient(7, 0), 1.0);
        assert_eq!(binomial_coefficient(7, 7), 1.0);
        assert_eq!(binomial_coefficient(4, 3), 4.0);
        assert_eq!(binomial_coefficient(3, 5), 0.0);
    }

    #[test]
    fn binomial_large_row_is_exact() {
        // C(64, 32) computed exactly by the integer path.
        assert_eq!(binomial_coefficient(64, 32), 1832624140942590534.0);
        // Pascal identity across the integer/float boundary.
        let lhs = binomial_coefficient(65, 30);
        let rhs = binomial_coefficient(64, 29) + binomial_coefficient(64, 30);
        assert!((lhs - rhs).abs() / rhs < 1e-12);
    }
}

//! Thin wrappers over `libm` so the rest of the crate reads like std float code.

#![allow(dead_code)]

pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub fn log1p(x: f64) -> f64 {
    libm::log1p(x)
}

pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

/// `x^y` for a non-negative base and stoichiometric exponent, with `0^0 = 1`.
///
/// Exponents are overwhelmingly small integers; those avoid `pow` entirely.
pub fn pow_stoich(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        return 1.0;
    }
    if y == 1.0 {
        return x;
    }
    if y == 2.0 {
        return x * x;
    }
    if y == 3.0 {
        return x * x * x;
    }
    powf(x, y)
}

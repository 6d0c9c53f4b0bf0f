use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{domain, Result};
use crate::Real;

// Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficients).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_189e-5,
    4.652_362_892_704_858e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_125e-4,
    -2.102_644_417_241_049e-4,
    2.174_396_181_152_126_4e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_275e-5,
    -2.619_083_840_158_141e-5,
    3.689_918_265_953_162_5e-6,
];

/// Natural logarithm of the gamma function for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return domain(format!("ln_gamma requires a positive finite argument, got {x}"));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma_unchecked(T::one() - x);
    }
    let z = x - T::one();
    let mut sum = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        sum = sum + T::lit(c) / (z + T::from_count(i));
    }
    let t = z + T::lit(LANCZOS_G) + half;
    let ln_sqrt_2pi = T::lit(0.918_938_533_204_672_8);
    ln_sqrt_2pi + (z + half) * t.ln() - t + sum.ln()
}

/// n! as a float, exact up to the precision of `T` for small n.
pub(crate) fn factorial<T: Real>(n: u32) -> T {
    if n <= 20 {
        let mut acc = 1u64;
        for k in 2..=u64::from(n) {
            acc *= k;
        }
        T::from_u64(acc).expect("factorial representable")
    } else {
        ln_gamma_unchecked(T::from_u32(n + 1).expect("representable")).exp()
    }
}

/// Harmonic number H_n = 1 + 1/2 + ... + 1/n, with H_0 = 0.
pub fn harmonic<T: Real>(n: usize) -> T {
    // Summed smallest-first.
    (1..=n).rev().map(|k| T::one() / T::from_count(k)).fold(T::zero(), |a, b| a + b)
}

/// Harmonic number as an exact rational.
pub fn harmonic_exact(n: usize) -> BigRational {
    (1..=n).fold(BigRational::from_integer(BigInt::from(0)), |acc, k| {
        acc + BigRational::new(BigInt::from(1), BigInt::from(k))
    })
}

//! Exact scalars: Gaussian rationals `p/q + (r/s) i`.

pub use malachite_q::gaussian_rational::GaussianRational;
pub use malachite_q::Rational;

use malachite_base::num::basic::traits::Zero;

/// Real Gaussian rational `n/d`.
///
/// Panics if `d == 0`.
pub fn gq(n: i64, d: i64) -> GaussianRational {
    assert!(d != 0, "zero denominator");
    GaussianRational {
        real: Rational::from_signeds(n, d),
        imaginary: Rational::ZERO,
    }
}

/// Purely imaginary Gaussian rational `(n/d) i`.
pub fn gi(n: i64, d: i64) -> GaussianRational {
    assert!(d != 0, "zero denominator");
    GaussianRational {
        real: Rational::ZERO,
        imaginary: Rational::from_signeds(n, d),
    }
}

pub fn from_int(n: i64) -> GaussianRational {
    gq(n, 1)
}

pub fn zero() -> GaussianRational {
    GaussianRational::ZERO
}

pub fn one() -> GaussianRational {
    gq(1, 1)
}

pub fn imag_unit() -> GaussianRational {
    gi(1, 1)
}

pub fn is_zero(x: &GaussianRational) -> bool {
    x.real == 0u32 && x.imaginary == 0u32
}

pub fn is_real(x: &GaussianRational) -> bool {
    x.imaginary == 0u32
}

/// `a * b`, skipping the cross terms when either factor is real or
/// purely imaginary.
pub fn mul(a: &GaussianRational, b: &GaussianRational) -> GaussianRational {
    let (ar, ai) = (a.real == 0u32, a.imaginary == 0u32);
    let (br, bi) = (b.real == 0u32, b.imaginary == 0u32);
    if ai && bi {
        return GaussianRational {
            real: &a.real * &b.real,
            imaginary: Rational::ZERO,
        };
    }
    if ai {
        return GaussianRational {
            real: if br { Rational::ZERO } else { &a.real * &b.real },
            imaginary: &a.real * &b.imaginary,
        };
    }
    if bi {
        return GaussianRational {
            real: if ar { Rational::ZERO } else { &a.real * &b.real },
            imaginary: &a.imaginary * &b.real,
        };
    }
    if ar && br {
        return GaussianRational {
            real: -(&a.imaginary * &b.imaginary),
            imaginary: Rational::ZERO,
        };
    }
    a * b
}

/// Multiplicative inverse, `None` for zero.
pub fn inverse(x: &GaussianRational) -> Option<GaussianRational> {
    if is_zero(x) {
        return None;
    }
    let norm = &x.real * &x.real + &x.imaginary * &x.imaginary;
    Some(GaussianRational {
        real: &x.real / &norm,
        imaginary: -(&x.imaginary / &norm),
    })
}

/// Canonical text form: `p/q`, `r/s*i` or `p/q+r/s*i` (integers without a
/// denominator, the sign of the imaginary part carried by the separator).
pub fn render(x: &GaussianRational) -> String {
    let re_zero = x.real == 0u32;
    let im_zero = x.imaginary == 0u32;
    match (re_zero, im_zero) {
        (_, true) => x.real.to_string(),
        (true, false) => format!("{}*i", x.imaginary),
        (false, false) => {
            if x.imaginary < 0u32 {
                format!("{}-{}*i", x.real, -&x.imaginary)
            } else {
                format!("{}+{}*i", x.real, x.imaginary)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_canonical_forms() {
        assert_eq!(render(&gq(0, 1)), "0");
        assert_eq!(render(&gq(3, 6)), "1/2");
        assert_eq!(render(&gq(-4, 2)), "-2");
        assert_eq!(render(&gi(1, 1)), "1*i");
        assert_eq!(render(&gi(-1, 3)), "-1/3*i");
        assert_eq!(render(&(gq(3, 4) + gi(-1, 2))), "3/4-1/2*i");
        assert_eq!(render(&(gq(-1, 1) + gi(5, 7))), "-1+5/7*i");
    }

    #[test]
    fn inverse_of_gaussian() {
        let z = gq(1, 1) + gi(1, 1);
        let w = inverse(&z).unwrap();
        assert_eq!(z * w, one());
        assert!(inverse(&zero()).is_none());
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(imag_unit() * imag_unit(), gq(-1, 1));
    }
}

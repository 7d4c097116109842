//! Helpers for the complex quantity stored at each site.

use num_complex::Complex64;

/// Complex binary64 quantity. Canonical Maxwell runs keep `im == 0`.
pub type Quantity = Complex64;

pub const ZERO: Quantity = Complex64::new(0.0, 0.0);

#[inline]
pub fn real(re: f64) -> Quantity {
    Complex64::new(re, 0.0)
}

#[inline]
pub fn is_zero(q: Quantity) -> bool {
    q.re == 0.0 && q.im == 0.0
}

#[inline]
pub fn is_finite(q: Quantity) -> bool {
    q.re.is_finite() && q.im.is_finite()
}

#[inline]
pub fn magnitude(q: Quantity) -> f64 {
    if q.im == 0.0 {
        q.re.abs()
    } else {
        q.norm()
    }
}

/// `factor * q`. A real factor scales both parts directly, which is what
/// the general complex product yields as well, minus the `0 * x` terms.
#[inline]
pub fn scale(factor: Quantity, q: Quantity) -> Quantity {
    if factor.im == 0.0 {
        Complex64::new(factor.re * q.re, factor.re * q.im)
    } else {
        factor * q
    }
}

/// Maps `-0.0` parts to `+0.0` so stored bit patterns do not depend on the
/// sign of an exactly cancelled component.
#[inline]
pub fn canonical(q: Quantity) -> Quantity {
    Complex64::new(q.re + 0.0, q.im + 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_clears_negative_zero() {
        let q = canonical(Complex64::new(-0.0, -0.0));
        assert_eq!(q.re.to_bits(), 0);
        assert_eq!(q.im.to_bits(), 0);
        let q = canonical(Complex64::new(-1.5, 2.0));
        assert_eq!(q, Complex64::new(-1.5, 2.0));
    }

    #[test]
    fn real_scale_matches_complex_product() {
        let f = real(-0.085424542921);
        let q = Complex64::new(0.3, -7.25);
        let a = scale(f, q);
        let b = f * q;
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn magnitude_of_imaginary_unit() {
        assert_eq!(magnitude(Complex64::new(0.0, 1.0)), 1.0);
        assert_eq!(magnitude(real(-3.0)), 3.0);
    }
}

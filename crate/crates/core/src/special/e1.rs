//! Exponential integral E1 on the principal branch.
//!
//! Two regimes: the convergent power series
//!
//! ```text
//! E1(c) = -gamma - ln(c) - sum_{n>=1} (-c)^n / (n * n!)
//! ```
//!
//! and the continued fraction
//!
//! ```text
//! E1(c) = exp(-c) / (c + 1 - 1/(c + 3 - 4/(c + 5 - ...)))
//! ```
//!
//! evaluated with the modified Lentz scheme. The series is used for small
//! arguments and in a wedge around the negative real axis, where its terms
//! do not alternate and the fraction converges slowly.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_431;

/// |c| at or below which the power series is used everywhere.
pub const SERIES_RADIUS: f64 = 2.0;

/// In the left half-plane the series is kept while |c| - |Re c| stays below this.
const LEFT_WEDGE: f64 = 2.0;

/// Away from the positive real axis (Re c <= |c|/2) the series is kept up to
/// this radius; the continued fraction converges slowly there.
const SECTOR_RADIUS: f64 = 4.0;

/// Arguments with |arg c| above pi minus this margin are treated as on the cut.
pub const BRANCH_CUT_MARGIN: f64 = 1e-9;

const MAX_SERIES_TERMS: usize = 20_000;
const MAX_CF_ITERATIONS: usize = 200_000;

/// E1(c) = integral from c to infinity of exp(-u)/u du, principal branch.
///
/// Fails with [`Error::Domain`] for `c == 0` or arguments on (or within
/// `BRANCH_CUT_MARGIN` of) the negative real axis, and with
/// [`Error::NonFinite`] when the value overflows (large negative real part).
pub fn exp_integral_e1(c: Complex64) -> Result<Complex64> {
    if !(c.re.is_finite() && c.im.is_finite()) {
        return Err(Error::NonFinite(format!("E1 argument {c}")));
    }
    if c.re == 0.0 && c.im == 0.0 {
        return Err(Error::Domain("E1 is undefined at 0".into()));
    }
    if c.arg().abs() > std::f64::consts::PI - BRANCH_CUT_MARGIN {
        return Err(Error::Domain(format!(
            "E1 argument {c} lies on or next to the branch cut along the negative real axis"
        )));
    }

    let r = c.norm();
    let value = if r <= SERIES_RADIUS
        || (r <= SECTOR_RADIUS && c.re <= 0.5 * r)
        || (c.re < 0.0 && r + c.re < LEFT_WEDGE)
    {
        series(c)?
    } else {
        continued_fraction(c)?
    };

    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(format!("E1({c})")))
    }
}

fn series(c: Complex64) -> Result<Complex64> {
    // term_n = (-c)^n / n!, accumulated as term_n / n
    let minus_c = -c;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..=MAX_SERIES_TERMS {
        let nf = n as f64;
        term = term * minus_c / nf;
        let contrib = term / nf;
        sum += contrib;
        if !(sum.re.is_finite() && sum.im.is_finite()) {
            return Err(Error::NonFinite(format!("E1 power series at {c}")));
        }
        if nf > c.norm() && contrib.norm() <= f64::EPSILON * 0.25 * sum.norm() {
            return Ok(-EULER_GAMMA - c.ln() - sum);
        }
    }
    Err(Error::Iteration(format!(
        "E1 power series at {c} exceeded {MAX_SERIES_TERMS} terms"
    )))
}

fn continued_fraction(c: Complex64) -> Result<Complex64> {
    let tiny = 1e-300;
    let one = Complex64::new(1.0, 0.0);
    let mut b = c + 1.0;
    let mut cc = Complex64::new(1.0 / tiny, 0.0);
    let mut d = one / b;
    let mut h = d;
    for i in 1..=MAX_CF_ITERATIONS {
        let an = -((i * i) as f64);
        b += 2.0;
        d = an * d + b;
        if d.norm() < tiny {
            d = Complex64::new(tiny, 0.0);
        }
        d = one / d;
        cc = b + an / cc;
        if cc.norm() < tiny {
            cc = Complex64::new(tiny, 0.0);
        }
        let del = cc * d;
        h *= del;
        if (del - one).norm() <= f64::EPSILON {
            return Ok(h * (-c).exp());
        }
    }
    Err(Error::Iteration(format!(
        "E1 continued fraction at {c} exceeded {MAX_CF_ITERATIONS} iterations"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn real_axis_reference_values() {
        // mpmath.expint(1, x) at 40 digits
        let cases = [
            (1e-5, 10.935719800043695533),
            (0.33, 0.83610116145500245531),
            (1.0, 0.21938393439552027368),
            (2.5, 0.024914917870269735496),
            (10.0, 4.1569689296853242774e-6),
        ];
        for (x, want) in cases {
            let got = exp_integral_e1(Complex64::new(x, 0.0)).unwrap();
            assert_relative_eq!(got.re, want, max_relative = 1e-13);
            assert_eq!(got.im, 0.0);
        }
    }

    #[test]
    fn complex_reference_values() {
        // mpmath.expint(1, c)
        let cases = [
            (
                Complex64::new(2.0, 3.0),
                Complex64::new(-0.024826207944199362925, 0.020316674911044622667),
            ),
            (
                Complex64::new(0.0, 1.0),
                Complex64::new(-0.33740392290096813, -0.62471325642771360),
            ),
            (
                Complex64::new(0.0, 50.0),
                Complex64::new(0.0056283863241163054402, -0.019179254308960724503),
            ),
            (
                Complex64::new(-3.0, 0.5),
                Complex64::new(-9.3836035093309434316, 0.12921297008462977011),
            ),
        ];
        for (c, want) in cases {
            let got = exp_integral_e1(c).unwrap();
            assert!(rel(got, want) < 1e-13, "E1({c}) = {got}, want {want}");
        }
    }

    #[test]
    fn rejects_zero_and_branch_cut() {
        assert!(matches!(
            exp_integral_e1(Complex64::new(0.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            exp_integral_e1(Complex64::new(-2.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            exp_integral_e1(Complex64::new(-2.0, -0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            exp_integral_e1(Complex64::new(-2.0, 1e-12)),
            Err(Error::Domain(_))
        ));
        assert!(exp_integral_e1(Complex64::new(-2.0, 1e-6)).is_ok());
    }

    #[test]
    fn overflow_is_an_error() {
        assert!(matches!(
            exp_integral_e1(Complex64::new(-800.0, 1.0)),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            exp_integral_e1(Complex64::new(f64::NAN, 1.0)),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn regimes_agree_at_crossover() {
        for k in 0..16 {
            let theta = -3.0 + 6.0 * k as f64 / 15.0;
            let c = Complex64::from_polar(SERIES_RADIUS, theta);
            let s = series(c).unwrap();
            let cf = continued_fraction(c).unwrap();
            assert!(rel(s, cf) < 1e-12, "crossover mismatch at {c}: {s} vs {cf}");
        }
    }
}

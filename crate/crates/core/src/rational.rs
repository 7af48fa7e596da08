//! Exact rational arithmetic and the canonical `p/q` string form.
//!
//! Every rational that crosses a module or process boundary is rendered as
//! `numerator/denominator` in lowest terms with a positive denominator.
//! Decimal notation is rejected on input so exactness survives round trips.

use crate::error::{Error, Result};
use alloc::format;
use alloc::string::String;
use num_rational::Ratio;
use num_traits::Zero;

/// Exact rational number. Desk-scale inputs keep magnitudes far below `i64`.
pub type Rat = Ratio<i64>;

/// Parses `"p/q"` or a bare integer `"p"` into a reduced rational.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::parse("empty rational"));
    }
    if text.contains('.') {
        return Err(Error::parse(format!(
            "decimal notation rejected, use p/q: {text:?}"
        )));
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let n: i64 = num
        .parse()
        .map_err(|_| Error::parse(format!("bad rational numerator {num:?}")))?;
    let d: i64 = match den {
        Some(d) => d
            .parse()
            .map_err(|_| Error::parse(format!("bad rational denominator {d:?}")))?,
        None => 1,
    };
    if d == 0 {
        return Err(Error::parse("zero denominator"));
    }
    Ok(Rat::new(n, d))
}

/// Canonical `p/q` form, always with an explicit denominator ("3/1", "-2/7").
pub fn format_rat(r: Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Rational from an integer count.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(n)
}

/// True when `r` lies strictly between 0 and 1.
pub fn is_proper_fraction(r: Rat) -> bool {
    r > Rat::zero() && r < Rat::from_integer(1)
}

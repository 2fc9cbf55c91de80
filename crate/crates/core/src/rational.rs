//! Exact rational numbers and their textual forms.
//!
//! Every probability, reward and threshold in the crate is a [`Rational`].
//! Parsing accepts `p/q` and decimal literals (with an optional exponent);
//! decimals are converted exactly, so `0.1` is `1/10`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Shorthand for `num/den` from machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q`, an integer, or a decimal such as `-0.25` or `2.5e-3`.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty number".into());
    }
    if let Some((n, d)) = t.split_once('/') {
        let num = parse_decimal(n.trim())?;
        let den = parse_decimal(d.trim())?;
        if den.is_zero() {
            return Err(format!("zero denominator in `{t}`"));
        }
        return Ok(num / den);
    }
    parse_decimal(t)
}

fn parse_decimal(t: &str) -> Result<Rational, String> {
    let bad = || format!("malformed number `{t}`");
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = body[i + 1..].parse().map_err(|_| bad())?;
            (&body[..i], e)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Decimal rendering rounded to `sig` significant digits, trailing zeros
/// trimmed. Rounds half away from zero.
pub fn to_decimal(r: &Rational, sig: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let sig = sig.max(1);
    let abs = r.abs();
    let ten = Rational::from_integer(BigInt::from(10));
    // exponent e with 10^e <= abs < 10^(e+1)
    let mut e: i64 = 0;
    let mut probe = Rational::one();
    if abs >= probe {
        while abs >= &probe * &ten {
            probe *= &ten;
            e += 1;
        }
    } else {
        while abs < probe {
            probe /= &ten;
            e -= 1;
        }
    }
    let mut scale = sig as i64 - 1 - e;
    let mut n = round_half_away(&(&abs * pow10(scale)));
    if n == num_traits::pow(BigInt::from(10), sig) {
        scale -= 1;
        n = round_half_away(&(&abs * pow10(scale)));
    }
    let mut digits = n.to_string();
    let body = if scale > 0 {
        let scale = scale as usize;
        if digits.len() <= scale {
            digits = format!("{}{}", "0".repeat(scale - digits.len() + 1), digits);
        }
        let (i, f) = digits.split_at(digits.len() - scale);
        let f = f.trim_end_matches('0');
        if f.is_empty() {
            i.to_string()
        } else {
            format!("{i}.{f}")
        }
    } else {
        format!("{digits}{}", "0".repeat((-scale) as usize))
    };
    if r.is_negative() {
        format!("-{body}")
    } else {
        body
    }
}

fn pow10(scale: i64) -> Rational {
    let p = num_traits::pow(BigInt::from(10), scale.unsigned_abs() as usize);
    if scale >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

fn round_half_away(r: &Rational) -> BigInt {
    let two = BigInt::from(2);
    let (q, rem) = r.numer().div_rem(r.denom());
    if (rem.abs() * &two) >= *r.denom() {
        if r.is_negative() {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// Exact decimal rendering when the denominator has no prime factors other
/// than 2 and 5, otherwise `None`.
pub fn exact_decimal(r: &Rational) -> Option<String> {
    let mut den = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut places = 0usize;
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    places = places.max(twos).max(fives);
    let scaled = r * pow10(places as i64);
    debug_assert!(scaled.is_integer());
    let n = scaled.to_integer();
    if places == 0 {
        return Some(n.to_string());
    }
    let neg = n.sign() == Sign::Minus;
    let mut digits = n.abs().to_string();
    if digits.len() <= places {
        digits = format!("{}{}", "0".repeat(places - digits.len() + 1), digits);
    }
    let (i, f) = digits.split_at(digits.len() - places);
    Some(format!("{}{i}.{f}", if neg { "-" } else { "" }))
}

/// `p/q` for non-integers, `p` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

//! Exact textual encoding of `f64` values as C99-style hexadecimal floats
//! (`0x1.8p+1` for 3.0). Used wherever matrices must round-trip bit-exactly.

use std::fmt::Write;

const MANTISSA_BITS: u32 = 52;
const EXP_BIAS: i32 = 1023;

pub fn format(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let raw_exp = ((bits >> MANTISSA_BITS) & 0x7ff) as i32;
    let mantissa = bits & ((1u64 << MANTISSA_BITS) - 1);
    if raw_exp == 0 && mantissa == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if raw_exp == 0 { (0, 1 - EXP_BIAS) } else { (1, raw_exp - EXP_BIAS) };
    let mut out = String::with_capacity(24);
    let _ = write!(out, "{sign}0x{lead}");
    if mantissa != 0 {
        let digits = format!("{mantissa:013x}");
        let _ = write!(out, ".{}", digits.trim_end_matches('0'));
    }
    let _ = write!(out, "p{exp:+}");
    out
}

pub fn parse(s: &str) -> Option<f64> {
    let s = s.trim();
    match s {
        "nan" | "NaN" => return Some(f64::NAN),
        "inf" | "+inf" => return Some(f64::INFINITY),
        "-inf" => return Some(f64::NEG_INFINITY),
        _ => {}
    }
    let (negative, rest) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let rest = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X"))?;
    let (digits, exp) = rest.split_once(['p', 'P'])?;
    let exp: i32 = exp.parse().ok()?;
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    // Accumulate up to 60 significant bits exactly, then scale by the exponent.
    let mut acc: u64 = 0;
    let mut shift: i32 = 0;
    let mut sticky = false;
    for (i, c) in int_part.chars().chain(frac_part.chars()).enumerate() {
        let d = c.to_digit(16)? as u64;
        let in_frac = i >= int_part.len();
        if acc >> 56 == 0 {
            acc = (acc << 4) | d;
            if in_frac {
                shift -= 4;
            }
        } else {
            sticky |= d != 0;
            if !in_frac {
                shift += 4;
            }
        }
    }
    if sticky {
        // More precision than an f64 can hold is never produced by `format`.
        return None;
    }
    let value = scale_exact(acc, exp.checked_add(shift)?);
    Some(if negative { -value } else { value })
}

fn scale_exact(mantissa: u64, exp: i32) -> f64 {
    if mantissa == 0 {
        return 0.0;
    }
    // mantissa < 2^60 fits the f64 significand only after normalization; the
    // values emitted by `format` carry at most 53 significant bits, so the
    // conversion below is exact.
    let m = mantissa as f64;
    let mut e = exp;
    let mut v = m;
    while e > 0 {
        let step = e.min(1000);
        v *= 2f64.powi(step);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        v /= 2f64.powi(step);
        e += step;
    }
    v
}

use betadim::scalar::parse_rational;
use betadim::{BetaField, FieldElt, Rational};
use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::CliError;

/// `"1,1,1"` into digits.
pub fn digits(s: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| CliError::Usage(format!("bad digit {t:?} in {s:?}"))))
        .collect()
}

/// `"12,16,20"` into horizons; every entry must be positive.
pub fn horizons(s: &str) -> Result<Vec<usize>, CliError> {
    let ks = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad horizon {t:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if ks.contains(&0) {
        return Err(CliError::Usage("horizons must be positive".into()));
    }
    Ok(ks)
}

pub fn rational(s: &str) -> Result<Rational, CliError> {
    parse_rational(s).ok_or_else(|| CliError::Usage(format!("not a rational number: {s:?}")))
}

/// A point of Q(β) written as a sum of terms `r`, `r*beta`, `beta^n` or
/// `r*beta^n`, where `r` is a fraction or decimal. `b` abbreviates `beta`.
pub fn field_point(field: &BetaField, s: &str) -> Result<FieldElt, CliError> {
    let bad = || CliError::Usage(format!("cannot parse point {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad());
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = compact.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'^' | b'*' | b'/') {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);

    let mut coeffs: Vec<Rational> = Vec::new();
    for term in terms {
        let (neg, body) = match term.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, term.strip_prefix('+').unwrap_or(term)),
        };
        let (coef, power) = split_term(body).ok_or_else(bad)?;
        let mut c = match coef {
            Some(c) => parse_rational(c).ok_or_else(bad)?,
            None => Rational::from_integer(1.into()),
        };
        if neg {
            c = -c;
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, Rational::zero());
        }
        coeffs[power] += c;
    }
    if coeffs.iter().all(|c| c.is_zero()) {
        coeffs = vec![Rational::from_integer(BigInt::zero())];
    }
    Ok(FieldElt::from_coeffs(field, &coeffs))
}

fn split_term(body: &str) -> Option<(Option<&str>, usize)> {
    let pos = body.find("beta").map(|p| (p, 4)).or_else(|| body.find('b').map(|p| (p, 1)));
    let Some((p, len)) = pos else {
        return Some((Some(body), 0));
    };
    let coef = &body[..p];
    let coef = match coef.strip_suffix('*') {
        Some(c) if !c.is_empty() => Some(c),
        Some(_) => return None,
        None if coef.is_empty() => None,
        None => return None,
    };
    let rest = &body[p + len..];
    let power = if rest.is_empty() {
        1
    } else {
        rest.strip_prefix('^')?.parse().ok()?
    };
    Some((coef, power))
}

//! Base-4 encoding of instance indices and the valid-string machinery.
//!
//! An index `N ≥ 1` with binary expansion of length `n` maps to the base-4
//! string `enc(N) = (N₁…Nₙ, 2…2)`: the binary digits followed by `n` twos.
//! A string of even length `2n` is *valid* when its first half is binary and
//! its second half is all twos; the all-twos tail is what makes a QPE readout
//! self-certifying, since truncating `enc(N)` always destroys validity.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A base-4 digit string of even length `2·half_length`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedString {
    /// Most-significant digit first, each in `{0,1,2,3}`.
    pub digits: Vec<u8>,
    pub half_length: usize,
}

impl EncodedString {
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// The string as text, e.g. `"101222"`.
    pub fn to_digit_string(&self) -> String {
        self.digits.iter().map(|d| char::from(b'0' + d)).collect()
    }

    /// Value of `0.digits` in base 4.
    pub fn phase_fraction(&self) -> f64 {
        let mut acc = 0.0;
        for &d in self.digits.iter().rev() {
            acc = (acc + d as f64) / 4.0;
        }
        acc
    }

    /// The digits as an integer in base 4.
    pub fn to_integer(&self) -> u64 {
        self.digits.iter().fold(0u64, |acc, &d| acc * 4 + d as u64)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s
            .chars()
            .map(|c| {
                c.to_digit(4)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::InvalidArgument(format!("digit {c:?} is not base-4")))
            })
            .collect::<Result<_>>()?;
        if digits.is_empty() {
            return Err(Error::InvalidArgument("empty digit string".into()));
        }
        if digits.len() % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "odd digit count {} has no defined half split",
                digits.len()
            )));
        }
        let half_length = digits.len() / 2;
        Ok(Self { digits, half_length })
    }
}

/// Number of bits in the binary expansion of `n ≥ 1`.
pub fn bit_length(n: u64) -> usize {
    (64 - n.leading_zeros()) as usize
}

/// `enc(N)`: binary digits of `N` followed by as many twos.
pub fn enc(n: u64) -> Result<EncodedString> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "enc(0) is undefined: no binary expansion convention".into(),
        ));
    }
    let half = bit_length(n);
    let mut digits = Vec::with_capacity(2 * half);
    for i in (0..half).rev() {
        digits.push(((n >> i) & 1) as u8);
    }
    digits.extend(std::iter::repeat(2).take(half));
    Ok(EncodedString { digits, half_length: half })
}

/// `enc⁻¹(z)`: the number formed by the first half of the digits.
///
/// For valid strings the first half is binary and is read as such; other
/// digits clamp to 1 so that the result never exceeds `2^m` for an `m`-digit
/// input. Odd-length inputs are rejected, matching the precondition; they
/// never arise from `enc`.
pub fn enc_inverse(z: &EncodedString) -> Result<u64> {
    if z.len() % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "enc_inverse needs an even digit count, got {}",
            z.len()
        )));
    }
    let half = z.len() / 2;
    let mut value = 0u64;
    for &d in &z.digits[..half] {
        value = value * 2 + u64::from(d.min(1));
    }
    Ok(value)
}

pub fn enc_inverse_str(s: &str) -> Result<u64> {
    enc_inverse(&EncodedString::parse(s)?)
}

/// Membership in `V_t`: length-`t` strings with a binary first half and an
/// all-twos second half.
pub fn is_valid(w: &str, t: usize) -> Result<bool> {
    if t == 0 || t % 2 != 0 {
        return Err(Error::InvalidArgument(format!("t must be even and positive, got {t}")));
    }
    if w.chars().count() != t {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: string has {} digits, expected {t}",
            w.chars().count()
        )));
    }
    let digits: Vec<u8> = w
        .chars()
        .map(|c| {
            c.to_digit(4)
                .map(|d| d as u8)
                .ok_or_else(|| Error::InvalidArgument(format!("digit {c:?} is not base-4")))
        })
        .collect::<Result<_>>()?;
    Ok(digits_are_valid(&digits))
}

pub fn digits_are_valid(digits: &[u8]) -> bool {
    if digits.is_empty() || digits.len() % 2 != 0 {
        return false;
    }
    let half = digits.len() / 2;
    digits[..half].iter().all(|&d| d <= 1) && digits[half..].iter().all(|&d| d == 2)
}

impl EncodedString {
    pub fn is_valid(&self) -> bool {
        digits_are_valid(&self.digits)
    }
}

/// All strings of `V_t` as base-4 integers, ascending. `|V_t| = 2^{t/2}`.
pub fn valid_strings(t: usize) -> Result<Vec<u64>> {
    if t == 0 || t % 2 != 0 {
        return Err(Error::InvalidArgument(format!("t must be even and positive, got {t}")));
    }
    let half = t / 2;
    if half > 31 {
        return Err(Error::CapExceeded { requested: half, cap: 31 });
    }
    // Tail of `half` twos: 2·(4^half − 1)/3.
    let tail: u64 = (0..half).fold(0, |acc, _| acc * 4 + 2);
    let mut out = Vec::with_capacity(1usize << half);
    for bits in 0..(1u64 << half) {
        let mut head = 0u64;
        for i in (0..half).rev() {
            head = head * 4 + ((bits >> i) & 1);
        }
        out.push(head * (1u64 << (2 * half)) + tail);
    }
    out.sort_unstable();
    Ok(out)
}

/// Digits (MSB first) of a base-4 integer padded to `t` digits.
pub fn integer_to_digits(value: u64, t: usize) -> Vec<u8> {
    let mut digits = vec![0u8; t];
    let mut v = value;
    for i in (0..t).rev() {
        digits[i] = (v % 4) as u8;
        v /= 4;
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn enc_examples() {
        assert_eq!(enc(5).unwrap().to_digit_string(), "101222");
        assert_eq!(enc(1).unwrap().to_digit_string(), "12");
        assert!(enc(0).is_err());
    }

    #[test]
    fn enc_inverse_examples() {
        assert_eq!(enc_inverse_str("101222").unwrap(), 5);
        assert_eq!(enc_inverse_str("12").unwrap(), 1);
        assert!(enc_inverse_str("123").is_err());
    }

    #[test]
    fn round_trip_first_1024() {
        for n in 1..=1024 {
            let e = enc(n).unwrap();
            assert!(e.is_valid(), "enc({n}) must be valid");
            assert_eq!(enc_inverse(&e).unwrap(), n, "round trip at {n}");
            assert!(is_valid(&e.to_digit_string(), 2 * bit_length(n)).unwrap());
        }
    }

    #[test]
    fn validity_examples() {
        assert!(is_valid("101222", 6).unwrap());
        assert!(!is_valid("102122", 6).unwrap());
        assert!(is_valid("12", 2).unwrap());
        assert!(matches!(is_valid("10", 4), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn valid_string_count_is_2_pow_half() {
        for t in [2usize, 4, 6, 8, 10] {
            let v = valid_strings(t).unwrap();
            assert_eq!(v.len(), 1 << (t / 2), "|V_{t}|");
            // Cross-check against brute-force enumeration.
            let brute = (0..4u64.pow(t as u32))
                .filter(|&z| digits_are_valid(&integer_to_digits(z, t)))
                .count();
            assert_eq!(v.len(), brute);
        }
    }

    #[test]
    fn enc_inverse_bounded_exhaustive() {
        // enc⁻¹(z) ≤ 2^m for every m-digit input, m ≤ 6 even.
        for m in [2usize, 4, 6] {
            for z in 0..4u64.pow(m as u32) {
                let digits = integer_to_digits(z, m);
                let s = EncodedString { digits, half_length: m / 2 };
                let inv = enc_inverse(&s).unwrap();
                assert!(inv <= 1 << m, "enc_inverse({}) = {inv} > 2^{m}", s.to_digit_string());
            }
        }
    }

    #[test]
    fn phase_fraction_of_simple_string() {
        let e = EncodedString::parse("12").unwrap();
        // 0.12 in base 4 = 1/4 + 2/16.
        assert!((e.phase_fraction() - (0.25 + 0.125)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn round_trip_sampled(n in 1u64..(1u64 << 40)) {
            let e = enc(n).unwrap();
            prop_assert!(e.is_valid());
            prop_assert_eq!(enc_inverse(&e).unwrap(), n);
        }

        #[test]
        fn inverse_bounded_sampled(digits in proptest::collection::vec(0u8..4, 2..=16)) {
            prop_assume!(digits.len() % 2 == 0);
            let m = digits.len();
            let s = EncodedString { digits, half_length: m / 2 };
            prop_assert!(enc_inverse(&s).unwrap() <= 1 << m);
        }
    }
}

//! Exact rational coverage ratios.

use serde::ser::SerializeStruct;
use serde::Serialize;
use std::fmt;

/// An exact ratio of two counts, kept as a rational in `[0, 1]`.
///
/// Coverage numbers are counts over counts, so no floating point is
/// involved anywhere: the decimal rendering is computed from the integers
/// with half-to-even rounding at four places. The vacuous ratio `0/0`
/// (nothing to cover) renders as full coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        debug_assert!(den == 0 || num <= den, "coverage ratios stay within [0, 1]");
        Ratio { num, den }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Four decimal places, rounding half to even, computed in integers.
    pub fn decimal4(&self) -> String {
        if self.den == 0 {
            return "1.0000".to_owned();
        }
        let den = u128::from(self.den);
        let scaled = u128::from(self.num) * 10_000;
        let mut q = scaled / den;
        let twice_rem = (scaled % den) * 2;
        if twice_rem > den || (twice_rem == den && q % 2 == 1) {
            q += 1;
        }
        format!("{}.{:04}", q / 10_000, q % 10_000)
    }
}

impl fmt::Display for Ratio {
    /// `5/6 (0.8333)` — the exact rational first, the decimal after.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} ({})", self.num, self.den, self.decimal4())
    }
}

impl Serialize for Ratio {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Ratio", 3)?;
        s.serialize_field("decimal", &self.decimal4())?;
        s.serialize_field("den", &self.den)?;
        s.serialize_field("num", &self.num)?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_common_coverage_values() {
        assert_eq!(Ratio::new(14, 56).decimal4(), "0.2500");
        assert_eq!(Ratio::new(5, 6).decimal4(), "0.8333");
        assert_eq!(Ratio::new(4, 4).decimal4(), "1.0000");
        assert_eq!(Ratio::new(0, 7).decimal4(), "0.0000");
    }

    #[test]
    fn vacuous_ratio_counts_as_full_coverage() {
        assert_eq!(Ratio::new(0, 0).decimal4(), "1.0000");
    }

    #[test]
    fn rounds_half_to_even() {
        // 0.00005 -> ties to 0.0000 (even), 0.00015 -> ties to 0.0002 (even).
        assert_eq!(Ratio::new(1, 20_000).decimal4(), "0.0000");
        assert_eq!(Ratio::new(3, 20_000).decimal4(), "0.0002");
        // Plain nearest rounding still applies away from ties.
        assert_eq!(Ratio::new(2, 3).decimal4(), "0.6667");
        assert_eq!(Ratio::new(1, 3).decimal4(), "0.3333");
    }

    #[test]
    fn display_pairs_rational_and_decimal() {
        assert_eq!(Ratio::new(5, 6).to_string(), "5/6 (0.8333)");
    }

    #[test]
    fn serializes_all_three_views() {
        let value = serde_json::to_value(Ratio::new(14, 56)).unwrap();
        assert_eq!(
            value,
            serde_json::json!({"decimal": "0.2500", "den": 56, "num": 14})
        );
    }
}

use num_integer::Integer;
use serde::ser::{Serialize, SerializeStruct, Serializer};

/// A reduced nonnegative fraction, serialised as `{num, den, value}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub num: u128,
    pub den: u128,
}

impl Fraction {
    pub fn new(num: u128, den: u128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = num.gcd(&den);
        Fraction {
            num: num / g,
            den: den / g,
        }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact comparison against a float threshold.
    pub fn le_f64(&self, threshold: f64) -> bool {
        use num_bigint::BigInt;
        use num_rational::BigRational;
        let Some(t) = BigRational::from_float(threshold) else {
            return threshold == f64::INFINITY;
        };
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den)) <= t
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Fraction", 3)?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &self.den)?;
        st.serialize_field("value", &self.value())?;
        st.end()
    }
}

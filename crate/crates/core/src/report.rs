//! Serialization helpers shared by report types.

use num_complex::Complex64;
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serializer};

/// Serializes a complex number as the two-element array [re, im].
pub fn complex_pair<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    let mut tup = s.serialize_tuple(2)?;
    tup.serialize_element(&z.re)?;
    tup.serialize_element(&z.im)?;
    tup.end()
}

/// Serializes a slice of complex numbers as arrays [re, im].
pub fn complex_pair_vec<S: Serializer>(zs: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(zs.len()))?;
    for z in zs {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

/// Deserializes a complex number from a two-element array [re, im].
pub fn complex_from_pair<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    let [re, im] = <[f64; 2]>::deserialize(d)?;
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    struct Wrap {
        #[serde(
            serialize_with = "complex_pair",
            deserialize_with = "complex_from_pair"
        )]
        z: Complex64,
    }

    #[test]
    fn complex_round_trips_as_pair() {
        let w = Wrap {
            z: Complex64::new(0.6, -0.8),
        };
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(json, r#"{"z":[0.6,-0.8]}"#);
        let back: Wrap = serde_json::from_str(&json).unwrap();
        assert_eq!(back.z, w.z);
    }
}

//! Serde helpers. Big integers travel as decimal strings in JSON: the values
//! here routinely exceed what a double (and hence a JSON number) can hold.

pub mod bigint_string {
    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let text = String::deserialize(d)?;
        text.parse::<BigInt>()
            .map_err(|_| de::Error::custom(format!("`{text}` is not a decimal integer")))
    }
}

pub mod bigint_string_opt {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_some(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        let text: Option<String> = Option::deserialize(d)?;
        match text {
            None => Ok(None),
            Some(text) => text
                .parse::<BigInt>()
                .map(Some)
                .map_err(|_| serde::de::Error::custom("not a decimal integer")),
        }
    }
}

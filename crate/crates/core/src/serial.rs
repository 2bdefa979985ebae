//! Serde helpers: integers as decimal strings, rationals as `"num/den"`.

use std::fmt::Display;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::Element;

pub fn rational_to_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => {
            (n.trim().parse::<BigInt>().map_err(|_| bad())?, d.trim().parse::<BigInt>().map_err(|_| bad())?)
        }
        None => (s.trim().parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
    };
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// `#[serde(with = "crate::serial::string")]` for any `Display + FromStr` value.
pub mod string {
    use super::*;

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, T, D>(d: D) -> std::result::Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Same as [`string`] for fixed-size arrays.
pub mod string_array {
    use super::*;

    pub fn serialize<T: Display, S: Serializer, const N: usize>(
        v: &[T; N],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, T, D, const N: usize>(d: D) -> std::result::Result<[T; N], D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let strs = Vec::<String>::deserialize(d)?;
        let vals: Vec<T> =
            strs.iter().map(|s| s.parse().map_err(de::Error::custom)).collect::<std::result::Result<_, _>>()?;
        vals.try_into().map_err(|_| de::Error::custom(format!("expected {N} entries")))
    }
}

/// Same as [`string`] for `Option` values; `None` is `null`.
pub mod string_option {
    use super::*;

    pub fn serialize<T: Display, S: Serializer>(v: &Option<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref().map(|x| x.to_string()).serialize(s)
    }

    pub fn deserialize<'de, T, D>(d: D) -> std::result::Result<Option<T>, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        Option::<String>::deserialize(d)?.map(|s| s.parse().map_err(de::Error::custom)).transpose()
    }
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        parse_rational(&String::deserialize(d)?).map_err(de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct ElementDoc {
    base: Vec<String>,
    coords: Vec<String>,
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementDoc {
            base: self.gens().iter().map(|g| g.to_string()).collect(),
            coords: self.coords().iter().map(rational_to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = ElementDoc::deserialize(d)?;
        let gens = doc
            .base
            .iter()
            .map(|g| g.parse::<i64>().map_err(de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let coords = doc
            .coords
            .iter()
            .map(|c| parse_rational(c).map_err(de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Element::new(gens, coords).map_err(de::Error::custom)
    }
}

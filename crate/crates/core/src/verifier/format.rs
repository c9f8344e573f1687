//! Number formatting shared by the JSON, CSV and human-readable outputs.
//!
//! Machine formats carry 12 significant digits: values are rounded to 12
//! digits and then printed in shortest round-trip form, so that parsing and
//! re-emitting a report reproduces it byte for byte.

pub const MACHINE_DIGITS: usize = 12;
pub const HUMAN_DIGITS: usize = 6;

/// Round to `MACHINE_DIGITS` significant digits.
pub fn round_sig(x: f64) -> f64 {
    round_to(x, MACHINE_DIGITS)
}

pub fn round_to(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Machine representation of a number: 12 significant digits, shortest form.
pub fn machine(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    let a = r.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Human representation: 6 significant digits.
pub fn human(x: f64) -> String {
    if !x.is_finite() {
        return machine(x);
    }
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-4..1e6).contains(&a) {
        let mag = a.log10().floor() as i32;
        let decimals = (HUMAN_DIGITS as i32 - 1 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{:.*e}", HUMAN_DIGITS - 1, x)
    }
}

pub fn parse_machine(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

/// Serde adapter for `f64`: 12-digit numbers, non-finite values as strings.
pub mod num {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(super::round_sig(*x))
        } else {
            s.serialize_str(&super::machine(*x))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        N(f64),
        S(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::N(x) => Ok(x),
            Repr::S(s) => super::parse_machine(&s).ok_or_else(|| de::Error::custom(format!("bad number '{s}'"))),
        }
    }
}

pub mod opt_num {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "super::num")] f64);

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        x.map(W).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

pub mod vec_num {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "super::num")] f64);

    pub fn serialize<S: Serializer>(x: &[f64], s: S) -> Result<S::Ok, S::Error> {
        x.iter().map(|&v| W(v)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<W>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn machine_round_trips() {
        for x in [0.857_763_057_9, 1.0 / 3.0, 1e-300, -2.5e17, 12_345.678_901_234_5, 0.0] {
            let s = machine(x);
            let y = parse_machine(&s).unwrap();
            assert_eq!(machine(y), s);
        }
        assert_eq!(machine(1.0 / 3.0), "0.333333333333");
        assert_eq!(machine(f64::INFINITY), "inf");
    }

    #[test]
    fn human_six_digits() {
        assert_eq!(human(std::f64::consts::FRAC_2_PI), "0.63662");
        assert_eq!(human(1.583_233_267), "1.58323");
        assert_eq!(human(1.0), "1");
        assert_eq!(human(2.5e-7), "2.50000e-7");
        assert_eq!(human(123_456.7), "123457");
    }
}

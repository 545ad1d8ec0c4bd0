//! Angles written as exact multiples of pi (`"pi/10"`, `"3pi/4"`, `"-pi"`)
//! or as plain radians (`"0.25"`, `0.25`).

use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An angle in radians that remembers how it was written.
#[derive(Debug, Clone, PartialEq)]
pub struct Angle {
    expr: String,
    radians: f64,
}

impl Angle {
    pub fn parse(text: &str) -> Result<Self, String> {
        let expr = text.trim();
        let radians = parse_radians(expr).ok_or_else(|| {
            format!("cannot read angle `{text}`; use radians or a multiple of pi such as `pi/10` or `3pi/4`")
        })?;
        if !radians.is_finite() {
            return Err(format!("angle `{text}` is not finite"));
        }
        Ok(Angle {
            expr: expr.to_string(),
            radians,
        })
    }

    pub fn radians(r: f64) -> Self {
        Angle {
            expr: format!("{r}"),
            radians: r,
        }
    }

    /// `pi * num / den`
    pub fn pi_fraction(num: i64, den: i64) -> Self {
        let expr = match (num, den) {
            (0, _) => "0".to_string(),
            (1, 1) => "pi".to_string(),
            (-1, 1) => "-pi".to_string(),
            (n, 1) => format!("{n}pi"),
            (1, d) => format!("pi/{d}"),
            (-1, d) => format!("-pi/{d}"),
            (n, d) => format!("{n}pi/{d}"),
        };
        Angle {
            expr,
            radians: PI * num as f64 / den as f64,
        }
    }

    pub fn value(&self) -> f64 {
        self.radians
    }

    pub fn expr(&self) -> &str {
        &self.expr
    }

    /// File-name friendly form: `pi/7` -> `pi-7`, `-3pi/4` -> `m3pi-4`.
    pub fn slug(&self) -> String {
        self.expr
            .chars()
            .filter_map(|c| match c {
                '/' => Some('-'),
                '-' => Some('m'),
                '.' => Some('p'),
                '*' | ' ' => None,
                c => Some(c),
            })
            .collect()
    }
}

fn parse_radians(expr: &str) -> Option<f64> {
    if expr.is_empty() {
        return None;
    }
    let Some(pos) = expr.find("pi") else {
        return expr.parse::<f64>().ok();
    };
    let head = expr[..pos].trim().trim_end_matches('*').trim();
    let tail = expr[pos + 2..].trim();
    let coefficient = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().ok()?,
    };
    let divisor = if tail.is_empty() {
        1.0
    } else {
        let d = tail.strip_prefix('/')?.trim().parse::<f64>().ok()?;
        if d == 0.0 {
            return None;
        }
        d
    };
    Some(coefficient * PI / divisor)
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.expr)
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.expr)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct AngleVisitor;

        impl Visitor<'_> for AngleVisitor {
            type Value = Angle;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an angle in radians or a string such as \"pi/10\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                Angle::parse(v).map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle::radians(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle::radians(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                Ok(Angle::radians(v as f64))
            }
        }

        d.deserialize_any(AngleVisitor)
    }
}

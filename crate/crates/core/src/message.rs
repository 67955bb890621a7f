use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two classical bits `b1 b0`, written high bit first ("10" is b1 = 1, b0 = 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Message2 {
    b1: u8,
    b0: u8,
}

impl Message2 {
    pub const ALL: [Message2; 4] = [
        Message2 { b1: 0, b0: 0 },
        Message2 { b1: 0, b0: 1 },
        Message2 { b1: 1, b0: 0 },
        Message2 { b1: 1, b0: 1 },
    ];

    pub fn new(b1: u8, b0: u8) -> Result<Self> {
        if b1 > 1 || b0 > 1 {
            return Err(Error::Validation(format!("bits must be 0 or 1, got ({b1}, {b0})")));
        }
        Ok(Self { b1, b0 })
    }

    pub fn high(self) -> u8 {
        self.b1
    }

    pub fn low(self) -> u8 {
        self.b0
    }

    /// Value 0..=3 as `2·b1 + b0`.
    pub fn value(self) -> usize {
        usize::from(self.b1 * 2 + self.b0)
    }

    pub fn from_value(v: usize) -> Result<Self> {
        Self::ALL
            .get(v)
            .copied()
            .ok_or_else(|| Error::Validation(format!("message value {v} outside 0..=3")))
    }
}

impl fmt::Display for Message2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.b1, self.b0)
    }
}

impl FromStr for Message2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .map(|ch| match ch {
                '0' => Some(0),
                '1' => Some(1),
                _ => None,
            })
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Validation(format!("{s:?} is not a bit string")))?;
        match bits[..] {
            [b1, b0] => Self::new(b1, b0),
            _ => Err(Error::Validation(format!(
                "expected exactly two bits like \"10\", got {s:?}"
            ))),
        }
    }
}

impl TryFrom<String> for Message2 {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Message2> for String {
    fn from(m: Message2) -> Self {
        m.to_string()
    }
}

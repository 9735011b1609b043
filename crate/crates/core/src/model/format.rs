//! Text and JSON forms.
//!
//! Preferences use the compact digit form (`231`) when `n <= 9` and the
//! general form (`o2>o3>o1`) otherwise; both parse. Domains serialize as
//! `{"n": 3, "preferences": [...]}`, profiles as `{"prefs": [...]}` and
//! allocations as a string whose `i`-th character is agent `i`'s object.

use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Allocation, Domain, ObjectId, Preference, Profile, MAX_OBJECTS};
use crate::error::{Error, Result};

impl FromStr for Preference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse {
                position: 0,
                message: "empty preference".into(),
            });
        }
        if s.contains('>') || s.starts_with('o') {
            parse_general(s)
        } else {
            parse_compact(s)
        }
    }
}

fn parse_compact(s: &str) -> Result<Preference> {
    let n = s.chars().count();
    if n > 9 {
        return Err(Error::Format(format!(
            "compact form supports at most 9 objects, got {n}; use the o1>o2>... form"
        )));
    }
    let mut idx = Vec::with_capacity(n);
    for (pos, c) in s.chars().enumerate() {
        match c.to_digit(10) {
            Some(d) if d >= 1 => idx.push(d as usize),
            _ => {
                return Err(Error::Parse {
                    position: pos,
                    message: format!("expected a digit 1-9, found {c:?}"),
                })
            }
        }
    }
    Preference::from_indices(&idx)
}

fn parse_general(s: &str) -> Result<Preference> {
    let tokens: Vec<&str> = s.split('>').collect();
    let n = tokens.len();
    if n > MAX_OBJECTS {
        return Err(Error::Format(format!("at most {MAX_OBJECTS} objects supported")));
    }
    let mut idx = Vec::with_capacity(n);
    for (pos, tok) in tokens.iter().enumerate() {
        let t = tok.trim();
        let v = t
            .strip_prefix('o')
            .and_then(|d| d.parse::<usize>().ok())
            .ok_or_else(|| Error::Parse {
                position: pos,
                message: format!("expected an object like o3, found {t:?}"),
            })?;
        idx.push(v);
    }
    Preference::from_indices(&idx)
}

pub fn parse_pref(s: &str) -> Result<Preference> {
    s.parse()
}

pub fn emit_pref(p: &Preference) -> String {
    p.to_string()
}

/// Text form: preferences separated by commas or whitespace.
pub fn parse_domain(s: &str) -> Result<Domain> {
    let prefs = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect::<Result<Vec<_>>>()?;
    Domain::new(prefs)
}

/// One preference per line.
pub fn emit_domain(d: &Domain) -> String {
    let mut out = String::new();
    for p in d {
        out.push_str(&p.to_string());
        out.push('\n');
    }
    out
}

pub fn domain_from_json(s: &str) -> Result<Domain> {
    serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
}

pub fn domain_to_json(d: &Domain) -> String {
    serde_json::to_string(d).expect("domain serializes")
}

impl Serialize for Preference {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Preference {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct DomainRepr {
    n: usize,
    preferences: Vec<Preference>,
}

impl Serialize for Domain {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DomainRepr {
            n: self.n(),
            preferences: self.prefs().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Domain {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DomainRepr::deserialize(d)?;
        let dom = Domain::new(r.preferences).map_err(D::Error::custom)?;
        if dom.n() != r.n {
            return Err(D::Error::custom(format!(
                "declared n = {} but preferences are over {} objects",
                r.n,
                dom.n()
            )));
        }
        Ok(dom)
    }
}

#[derive(Serialize, Deserialize)]
struct ProfileRepr {
    prefs: Vec<Preference>,
}

impl Serialize for Profile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProfileRepr {
            prefs: self.prefs().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Profile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ProfileRepr::deserialize(d)?;
        Profile::new(r.prefs).map_err(D::Error::custom)
    }
}

impl std::fmt::Display for Allocation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.n() <= 9 {
            for o in self.as_slice() {
                write!(f, "{}", o.get())?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.as_slice().iter().map(|o| o.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl FromStr for Allocation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let idx: Vec<usize> = if s.contains(',') || s.starts_with('o') {
            s.split(',')
                .enumerate()
                .map(|(pos, t)| {
                    t.trim()
                        .strip_prefix('o')
                        .and_then(|d| d.parse().ok())
                        .ok_or_else(|| Error::Parse {
                            position: pos,
                            message: format!("expected an object like o3, found {t:?}"),
                        })
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .enumerate()
                .map(|(pos, c)| {
                    c.to_digit(10)
                        .filter(|d| *d >= 1)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Parse {
                            position: pos,
                            message: format!("expected a digit 1-9, found {c:?}"),
                        })
                })
                .collect::<Result<_>>()?
        };
        let n = idx.len();
        let objs = idx
            .iter()
            .enumerate()
            .map(|(pos, &i)| {
                ObjectId::new(i, n).map_err(|_| Error::Parse {
                    position: pos,
                    message: format!("object index {i} is not in 1..={n}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Allocation::new(objs)
    }
}

impl Serialize for Allocation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Allocation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_LAYOUT: &str = include_str!("../../data/biosemi64_layout.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hemisphere {
    Left,
    Midline,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Anterior,
    Central,
    Posterior,
}

impl Hemisphere {
    pub const ALL: [Hemisphere; 3] = [Hemisphere::Left, Hemisphere::Midline, Hemisphere::Right];

    pub fn as_str(self) -> &'static str {
        match self {
            Hemisphere::Left => "left",
            Hemisphere::Midline => "midline",
            Hemisphere::Right => "right",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|h| h.as_str() == s)
    }

    /// Odd suffix → left, even → right, `z` → midline.
    pub fn from_label(label: &str) -> Option<Self> {
        if label.ends_with('z') || label.ends_with('Z') {
            return Some(Hemisphere::Midline);
        }
        let digits: String = label.chars().rev().take_while(|c| c.is_ascii_digit()).collect();
        let n: u32 = digits.chars().rev().collect::<String>().parse().ok()?;
        Some(if n % 2 == 1 {
            Hemisphere::Left
        } else {
            Hemisphere::Right
        })
    }
}

impl Region {
    pub const ALL: [Region; 3] = [Region::Anterior, Region::Central, Region::Posterior];

    pub fn as_str(self) -> &'static str {
        match self {
            Region::Anterior => "anterior",
            Region::Central => "central",
            Region::Posterior => "posterior",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.as_str() == s)
    }

    /// Region from the 10-10 label prefix.
    pub fn from_label(label: &str) -> Option<Self> {
        let prefix = label.trim_end_matches(|c: char| c.is_ascii_digit() || c == 'z' || c == 'Z');
        match prefix.to_ascii_uppercase().as_str() {
            "FP" | "AF" | "F" => Some(Region::Anterior),
            "FC" | "FT" | "C" | "T" | "CP" | "TP" => Some(Region::Central),
            "P" | "PO" | "O" | "I" => Some(Region::Posterior),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Electrode {
    pub label: String,
    pub x: f64,
    pub y: f64,
    pub hemisphere: Hemisphere,
    pub region: Region,
}

/// Scalp positions in the unit head circle (nose at +y, left at -x).
#[derive(Debug, Clone, PartialEq)]
pub struct ElectrodeLayout {
    pub electrodes: Vec<Electrode>,
    index: HashMap<String, usize>,
}

impl ElectrodeLayout {
    pub fn new(electrodes: Vec<Electrode>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, e) in electrodes.iter().enumerate() {
            if index.insert(e.label.clone(), i).is_some() {
                return Err(Error::Config(format!("electrode {} listed twice", e.label)));
            }
            let ok = match e.hemisphere {
                Hemisphere::Midline => e.x == 0.0,
                Hemisphere::Left => e.x < 0.0,
                Hemisphere::Right => e.x > 0.0,
            };
            if !ok {
                return Err(Error::Config(format!(
                    "electrode {} at x = {} contradicts hemisphere {}",
                    e.label,
                    e.x,
                    e.hemisphere.as_str()
                )));
            }
            if e.x.hypot(e.y) > 1.0 + 1e-9 {
                return Err(Error::Config(format!(
                    "electrode {} lies outside the head circle",
                    e.label
                )));
            }
        }
        Ok(ElectrodeLayout { electrodes, index })
    }

    /// The shipped 64-channel montage.
    pub fn biosemi64() -> Self {
        Self::parse_csv(DEFAULT_LAYOUT, Path::new("biosemi64_layout.csv")).expect("shipped layout parses")
    }

    /// Rows `label,x,y,hemisphere,region`; `#` lines are comments.
    pub fn parse_csv(text: &str, path: &Path) -> Result<Self> {
        let mut electrodes = Vec::new();
        let mut header = false;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header {
                if line != "label,x,y,hemisphere,region" {
                    return Err(Error::parse(path, i + 1, "expected header label,x,y,hemisphere,region"));
                }
                header = true;
                continue;
            }
            let c: Vec<&str> = line.split(',').map(str::trim).collect();
            if c.len() != 5 {
                return Err(Error::parse(path, i + 1, "expected 5 fields"));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(path, i + 1, format!("bad number {s:?}")))
            };
            electrodes.push(Electrode {
                label: c[0].to_string(),
                x: num(c[1])?,
                y: num(c[2])?,
                hemisphere: Hemisphere::parse(c[3])
                    .ok_or_else(|| Error::parse(path, i + 1, format!("bad hemisphere {:?}", c[3])))?,
                region: Region::parse(c[4])
                    .ok_or_else(|| Error::parse(path, i + 1, format!("bad region {:?}", c[4])))?,
            });
        }
        Self::new(electrodes)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, path)
    }

    pub fn get(&self, label: &str) -> Option<&Electrode> {
        self.index.get(label).map(|&i| &self.electrodes[i])
    }

    pub fn labels(&self) -> Vec<String> {
        self.electrodes.iter().map(|e| e.label.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.electrodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.electrodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_layout_invariants() {
        let l = ElectrodeLayout::biosemi64();
        assert_eq!(l.len(), 64);
        for e in &l.electrodes {
            assert_eq!(Hemisphere::from_label(&e.label), Some(e.hemisphere), "{}", e.label);
            assert_eq!(Region::from_label(&e.label), Some(e.region), "{}", e.label);
        }
        assert_eq!(l.get("Cz").unwrap().x, 0.0);
        assert!(l.get("P7").unwrap().x < 0.0);
        assert!(l.get("Fpz").unwrap().y > l.get("Oz").unwrap().y);
    }

    #[test]
    fn label_rules() {
        assert_eq!(Hemisphere::from_label("P10"), Some(Hemisphere::Right));
        assert_eq!(Hemisphere::from_label("FT7"), Some(Hemisphere::Left));
        assert_eq!(Region::from_label("Fpz"), Some(Region::Anterior));
        assert_eq!(Region::from_label("TP8"), Some(Region::Central));
        assert_eq!(Region::from_label("Iz"), Some(Region::Posterior));
        assert_eq!(Region::from_label("EXG1"), None);
    }

    #[test]
    fn rejects_inconsistent_rows() {
        let bad = "label,x,y,hemisphere,region\nC3,0.4,0.0,left,central\n";
        assert!(matches!(
            ElectrodeLayout::parse_csv(bad, Path::new("l")),
            Err(Error::Config(_))
        ));
        let dup = "label,x,y,hemisphere,region\nCz,0,0,midline,central\nCz,0,0,midline,central\n";
        assert!(ElectrodeLayout::parse_csv(dup, Path::new("l")).is_err());
    }
}

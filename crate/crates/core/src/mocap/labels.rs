use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MocapError;

/// Expert verdict for a swing under one criterion. `Bad` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Good,
    Bad,
}

impl Label {
    /// Regression target: bad → 1, good → 0.
    pub fn target(self) -> f64 {
        match self {
            Label::Good => 0.0,
            Label::Bad => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Good => "good",
            Label::Bad => "bad",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "good" => Ok(Label::Good),
            "bad" => Ok(Label::Bad),
            other => Err(other.to_owned()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub clip_id: String,
    pub criterion: String,
    pub label: Label,
}

impl LabelRecord {
    pub fn new(clip_id: impl Into<String>, criterion: impl Into<String>, label: Label) -> Self {
        LabelRecord {
            clip_id: clip_id.into(),
            criterion: criterion.into(),
            label,
        }
    }
}

#[derive(Deserialize)]
struct RawRecord {
    clip_id: String,
    criterion: String,
    label: String,
}

/// Parses a `clip_id,criterion,label` CSV, rejecting duplicate keys.
pub fn parse_labels<R: Read>(input: R) -> Result<Vec<LabelRecord>, MocapError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header != ["clip_id", "criterion", "label"] {
        return Err(MocapError::MalformedHeader(format!(
            "labels header must be clip_id,criterion,label, found {}",
            header.join(",")
        )));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, raw) in reader.deserialize::<RawRecord>().enumerate() {
        let raw = raw?;
        let label = raw.label.parse().map_err(|value| MocapError::InvalidLabel {
            row: i + 1,
            value,
        })?;
        if !seen.insert((raw.clip_id.clone(), raw.criterion.clone())) {
            return Err(MocapError::DuplicateLabel {
                clip_id: raw.clip_id,
                criterion: raw.criterion,
            });
        }
        out.push(LabelRecord {
            clip_id: raw.clip_id,
            criterion: raw.criterion,
            label,
        });
    }
    Ok(out)
}

pub fn load_labels(path: &Path) -> Result<Vec<LabelRecord>, MocapError> {
    let file = std::fs::File::open(path).map_err(|e| MocapError::io(path, e))?;
    parse_labels(file)
}

pub fn write_labels<W: Write>(records: &[LabelRecord], out: W) -> Result<(), MocapError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["clip_id", "criterion", "label"])?;
    for r in records {
        w.write_record([r.clip_id.as_str(), r.criterion.as_str(), r.label.as_str()])?;
    }
    w.flush().map_err(|e| MocapError::io("<labels writer>", e))?;
    Ok(())
}

/// Distinct criteria, sorted.
pub fn criteria(records: &[LabelRecord]) -> Vec<String> {
    records
        .iter()
        .map(|r| r.criterion.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// clip_id → label for one criterion.
pub fn labels_for(records: &[LabelRecord], criterion: &str) -> BTreeMap<String, Label> {
    records
        .iter()
        .filter(|r| r.criterion == criterion)
        .map(|r| (r.clip_id.clone(), r.label))
        .collect()
}

/// Percentage of `bad` labels under a criterion; `None` when it has no records.
pub fn bad_fraction(records: &[LabelRecord], criterion: &str) -> Option<f64> {
    let labels = labels_for(records, criterion);
    if labels.is_empty() {
        return None;
    }
    let bad = labels.values().filter(|l| **l == Label::Bad).count();
    Some(bad as f64 / labels.len() as f64 * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_with(criterion: &str, n: usize, bad: usize) -> String {
        let mut s = String::from("clip_id,criterion,label\n");
        for i in 0..n {
            let l = if i < bad { "bad" } else { "good" };
            s.push_str(&format!("s{:02},{criterion},{l}\n", i + 1));
        }
        s
    }

    #[test]
    fn novice_bad_portion() {
        let recs = parse_labels(csv_with("novice", 14, 4).as_bytes()).unwrap();
        assert_eq!(recs.len(), 14);
        let f = bad_fraction(&recs, "novice").unwrap();
        assert_eq!(format!("{f:.1}"), "28.6");
    }

    #[test]
    fn intermediate_bad_portion() {
        let recs = parse_labels(csv_with("intermediate", 14, 10).as_bytes()).unwrap();
        let f = bad_fraction(&recs, "intermediate").unwrap();
        assert_eq!(format!("{f:.1}"), "71.4");
        assert_eq!(bad_fraction(&recs, "novice"), None);
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let text = "clip_id,criterion,label\ns01,novice,bad\ns01,intermediate,bad\ns01,novice,good\n";
        assert!(matches!(
            parse_labels(text.as_bytes()),
            Err(MocapError::DuplicateLabel { ref clip_id, ref criterion }) if clip_id == "s01" && criterion == "novice"
        ));
    }

    #[test]
    fn unknown_label_is_rejected() {
        let text = "clip_id,criterion,label\ns01,novice,ok\n";
        assert!(matches!(
            parse_labels(text.as_bytes()),
            Err(MocapError::InvalidLabel { row: 1, .. })
        ));
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(matches!(
            parse_labels("id,criterion,label\n".as_bytes()),
            Err(MocapError::MalformedHeader(_))
        ));
    }

    #[test]
    fn write_then_parse_roundtrips_bytes() {
        let recs = vec![
            LabelRecord::new("s01", "novice", Label::Bad),
            LabelRecord::new("s01", "intermediate", Label::Good),
        ];
        let mut a = Vec::new();
        write_labels(&recs, &mut a).unwrap();
        assert_eq!(
            std::str::from_utf8(&a).unwrap(),
            "clip_id,criterion,label\ns01,novice,bad\ns01,intermediate,good\n"
        );
        let back = parse_labels(a.as_slice()).unwrap();
        assert_eq!(back, recs);
        let mut b = Vec::new();
        write_labels(&back, &mut b).unwrap();
        assert_eq!(a, b);
        assert_eq!(criteria(&back), vec!["intermediate", "novice"]);
    }
}

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{MocapError, Point3, SourceConvention};

/// A multi-marker 3D time series in the canonical frame.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SwingClip {
    clip_id: String,
    sample_rate_hz: f64,
    markers: Vec<String>,
    frames: Vec<Vec<Point3>>,
}

impl SwingClip {
    /// Builds a clip, checking marker uniqueness, row arity and sample rate.
    pub fn new(
        clip_id: impl Into<String>,
        sample_rate_hz: f64,
        markers: Vec<String>,
        frames: Vec<Vec<Point3>>,
    ) -> Result<Self, MocapError> {
        let clip_id = clip_id.into();
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(MocapError::InvalidClip(format!(
                "{clip_id}: sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if markers.is_empty() {
            return Err(MocapError::InvalidClip(format!("{clip_id}: no markers")));
        }
        let mut seen = HashSet::new();
        for m in &markers {
            if m.is_empty() || !seen.insert(m.as_str()) {
                return Err(MocapError::InvalidClip(format!(
                    "{clip_id}: marker name `{m}` is empty or repeated"
                )));
            }
        }
        if frames.is_empty() {
            return Err(MocapError::InvalidClip(format!("{clip_id}: no frames")));
        }
        if let Some(bad) = frames.iter().position(|f| f.len() != markers.len()) {
            return Err(MocapError::InvalidClip(format!(
                "{clip_id}: frame {bad} has {} points, expected {}",
                frames[bad].len(),
                markers.len()
            )));
        }
        Ok(SwingClip {
            clip_id,
            sample_rate_hz,
            markers,
            frames,
        })
    }

    pub fn clip_id(&self) -> &str {
        &self.clip_id
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn markers(&self) -> &[String] {
        &self.markers
    }

    pub fn frames(&self) -> &[Vec<Point3>] {
        &self.frames
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn marker_index(&self, name: &str) -> Option<usize> {
        self.markers.iter().position(|m| m == name)
    }

    /// The time series of one marker.
    pub fn marker_path(&self, name: &str) -> Result<Vec<Point3>, MocapError> {
        let idx = self.marker_index(name).ok_or_else(|| MocapError::MissingMarker {
            clip_id: self.clip_id.clone(),
            marker: name.to_owned(),
        })?;
        Ok(self.frames.iter().map(|f| f[idx]).collect())
    }

    /// Frames `start..=end` as a new clip with the same id.
    pub(crate) fn sub_clip(&self, start: usize, end: usize) -> SwingClip {
        SwingClip {
            clip_id: self.clip_id.clone(),
            sample_rate_hz: self.sample_rate_hz,
            markers: self.markers.clone(),
            frames: self.frames[start..=end].to_vec(),
        }
    }

    /// Bitwise equality, treating `NaN` samples with equal bits as equal.
    pub fn bitwise_eq(&self, other: &SwingClip) -> bool {
        self.clip_id == other.clip_id
            && self.sample_rate_hz.to_bits() == other.sample_rate_hz.to_bits()
            && self.markers == other.markers
            && self.frames.len() == other.frames.len()
            && self.frames.iter().zip(&other.frames).all(|(a, b)| {
                a.iter()
                    .flatten()
                    .zip(b.iter().flatten())
                    .all(|(x, y)| x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()))
            })
    }
}

/// How to interpret a clip file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParseOptions {
    pub convention: SourceConvention,
    /// Multiplier bringing file units to metres (0.001 for millimetres).
    pub scale: f64,
    pub sample_rate_hz: f64,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            convention: SourceConvention::Canonical,
            scale: 1.0,
            sample_rate_hz: 50.0,
        }
    }
}

/// Reads a clip CSV; the clip id is the file stem.
pub fn parse_clip(path: &Path, opts: &ParseOptions) -> Result<SwingClip, MocapError> {
    let text = std::fs::read_to_string(path).map_err(|e| MocapError::io(path, e))?;
    let clip_id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or_default()
        .to_owned();
    parse_clip_str(&clip_id, text.as_bytes(), opts)
}

/// Parses clip CSV content: `frame,<name>_x,<name>_y,<name>_z,...`.
pub fn parse_clip_str<R: Read>(
    clip_id: &str,
    input: R,
    opts: &ParseOptions,
) -> Result<SwingClip, MocapError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let header = reader.headers()?.clone();
    let markers = parse_header(&header)?;
    let expected = markers.len() * 3;

    let mut frames = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let found = record.len().saturating_sub(1);
        if found != expected {
            return Err(MocapError::RowArity {
                row,
                expected,
                found,
            });
        }
        let frame_token = &record[0];
        if frame_token.parse::<f64>().is_err() {
            return Err(MocapError::NonNumeric {
                row,
                column: "frame".into(),
                token: frame_token.to_owned(),
            });
        }
        let mut values = Vec::with_capacity(expected);
        for (col, token) in record.iter().skip(1).enumerate() {
            let v = parse_sample(token).ok_or_else(|| MocapError::NonNumeric {
                row,
                column: header[col + 1].to_owned(),
                token: token.to_owned(),
            })?;
            values.push(v);
        }
        let frame = values
            .chunks_exact(3)
            .map(|c| {
                let p = opts.convention.to_canonical([c[0], c[1], c[2]]);
                [p[0] * opts.scale, p[1] * opts.scale, p[2] * opts.scale]
            })
            .collect();
        frames.push(frame);
    }
    SwingClip::new(clip_id, opts.sample_rate_hz, markers, frames)
}

fn parse_sample(token: &str) -> Option<f64> {
    if token.eq_ignore_ascii_case("nan") {
        return Some(f64::NAN);
    }
    token.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_header(header: &csv::StringRecord) -> Result<Vec<String>, MocapError> {
    let cols: Vec<&str> = header.iter().collect();
    if cols.first() != Some(&"frame") {
        return Err(MocapError::MalformedHeader(
            "first column must be `frame`".into(),
        ));
    }
    let coords = &cols[1..];
    if coords.is_empty() || !coords.len().is_multiple_of(3) {
        return Err(MocapError::MalformedHeader(format!(
            "expected a multiple of three coordinate columns, found {}",
            coords.len()
        )));
    }
    let mut markers = Vec::with_capacity(coords.len() / 3);
    for triple in coords.chunks_exact(3) {
        let name = triple[0].strip_suffix("_x").ok_or_else(|| {
            MocapError::MalformedHeader(format!("column `{}` should end in _x", triple[0]))
        })?;
        for (col, axis) in triple[1..].iter().zip(["_y", "_z"]) {
            if col.strip_suffix(axis) != Some(name) {
                return Err(MocapError::MalformedHeader(format!(
                    "expected `{name}{axis}`, found `{col}`"
                )));
            }
        }
        if markers.iter().any(|m| m == name) {
            return Err(MocapError::MalformedHeader(format!("marker `{name}` repeated")));
        }
        markers.push(name.to_owned());
    }
    Ok(markers)
}

/// Writes a clip in canonical CSV form.
///
/// Values use the shortest representation that parses back to the same bits.
pub fn write_clip<W: Write>(clip: &SwingClip, out: W) -> Result<(), MocapError> {
    let mut w = csv::WriterBuilder::new().from_writer(out);
    let mut header = vec!["frame".to_owned()];
    for m in clip.markers() {
        header.extend(["x", "y", "z"].iter().map(|a| format!("{m}_{a}")));
    }
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for (i, frame) in clip.frames().iter().enumerate() {
        row.clear();
        row.push(i.to_string());
        row.extend(frame.iter().flatten().map(|v| {
            if v.is_nan() {
                "NaN".to_owned()
            } else {
                v.to_string()
            }
        }));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| MocapError::io("<clip writer>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mocap::FULL_BODY_MARKERS;
    use proptest::prelude::*;

    fn header(markers: &[&str]) -> String {
        let mut h = String::from("frame");
        for m in markers {
            h.push_str(&format!(",{m}_x,{m}_y,{m}_z"));
        }
        h
    }

    fn full_body_csv(rows: usize) -> String {
        let mut s = header(&FULL_BODY_MARKERS);
        s.push('\n');
        for r in 0..rows {
            s.push_str(&r.to_string());
            for k in 0..66 {
                s.push_str(&format!(",{}", (r * 66 + k) as f64 * 0.001));
            }
            s.push('\n');
        }
        s
    }

    #[test]
    fn full_body_file_parses() {
        let clip = parse_clip_str("s01", full_body_csv(10).as_bytes(), &ParseOptions::default())
            .unwrap();
        assert_eq!(clip.frame_count(), 10);
        assert_eq!(clip.markers().len() * 3, 66);
        assert_eq!(clip.frames()[2][1], [0.135, 0.136, 0.137]);
    }

    #[test]
    fn short_row_names_the_row() {
        let mut text = full_body_csv(3);
        // drop the last value of the third data row
        let lines: Vec<&str> = text.lines().collect();
        let short = lines[3].rsplit_once(',').unwrap().0.to_owned();
        text = format!("{}\n{}\n{}\n{}\n", lines[0], lines[1], lines[2], short);
        let err = parse_clip_str("s01", text.as_bytes(), &ParseOptions::default()).unwrap_err();
        match err {
            MocapError::RowArity {
                row,
                expected,
                found,
            } => assert_eq!((row, expected, found), (3, 66, 65)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn all_nan_racquet_column_still_parses() {
        let text = format!(
            "{}\n0,NaN,NaN,NaN,0,0,1,1,0,0\n1,NaN,NaN,NaN,0,0,1,1,0,0\n",
            header(&["R1", "R2", "H"])
        );
        let clip = parse_clip_str("s", text.as_bytes(), &ParseOptions::default()).unwrap();
        assert!(clip.marker_path("R1").unwrap().iter().flatten().all(|v| v.is_nan()));
    }

    #[test]
    fn non_numeric_token_is_rejected() {
        let text = format!("{}\n0,1,2,abc\n", header(&["H"]));
        let err = parse_clip_str("s", text.as_bytes(), &ParseOptions::default()).unwrap_err();
        assert!(matches!(err, MocapError::NonNumeric { row: 1, ref column, .. } if column == "H_z"));
    }

    #[test]
    fn malformed_headers_are_rejected() {
        for h in ["time,H_x,H_y,H_z", "frame,H_x,H_y", "frame,H_x,H_z,H_y", "frame,H_x,H_y,H_z,H_x,H_y,H_z"] {
            let text = format!("{h}\n");
            assert!(
                matches!(
                    parse_clip_str("s", text.as_bytes(), &ParseOptions::default()),
                    Err(MocapError::MalformedHeader(_))
                ),
                "{h}"
            );
        }
    }

    #[test]
    fn empty_body_is_rejected() {
        let text = format!("{}\n", header(&["H"]));
        assert!(matches!(
            parse_clip_str("s", text.as_bytes(), &ParseOptions::default()),
            Err(MocapError::InvalidClip(_))
        ));
    }

    #[test]
    fn convention_and_scale_apply_at_ingestion() {
        let text = format!("{}\n0,1000,2000,3000\n", header(&["H"]));
        let opts = ParseOptions {
            convention: SourceConvention::LhXzy,
            scale: 0.001,
            ..ParseOptions::default()
        };
        let clip = parse_clip_str("s", text.as_bytes(), &opts).unwrap();
        assert_eq!(clip.frames()[0][0], [1.0, 3.0, -2.0]);
    }

    fn sample() -> impl Strategy<Value = f64> {
        prop_oneof![
            9 => -1e4f64..1e4,
            1 => Just(f64::NAN),
            1 => any::<f64>().prop_filter("finite", |v| v.is_finite()),
        ]
    }

    proptest! {
        #[test]
        fn write_then_parse_is_identity(
            n in 1usize..5,
            rows in prop::collection::vec(prop::collection::vec(sample(), 15), 1..8),
        ) {
            let markers: Vec<String> = (0..n).map(|i| format!("M{i}")).collect();
            let frames: Vec<Vec<Point3>> = rows
                .iter()
                .map(|r| (0..n).map(|k| [r[3 * k], r[3 * k + 1], r[3 * k + 2]]).collect())
                .collect();
            let clip = SwingClip::new("p", 50.0, markers, frames).unwrap();
            let mut buf = Vec::new();
            write_clip(&clip, &mut buf).unwrap();
            let back = parse_clip_str("p", buf.as_slice(), &ParseOptions::default()).unwrap();
            prop_assert!(clip.bitwise_eq(&back));
            let mut again = Vec::new();
            write_clip(&back, &mut again).unwrap();
            prop_assert_eq!(buf, again);
        }
    }
}

//! Dataset container I/O.
//!
//! Layout of a dataset file:
//!
//! ```text
//! magic          b"SPKL1\n"
//! header line    JSON: format_version, record_count, height, width,
//!                pitch, wavelength, generation (the full scenario +
//!                preprocessing configuration the records were made
//!                with, so a dataset file is self-describing)
//! record lines   one JSON object per record: label + provenance
//! blank line     separates the JSON-lines block from the payload
//! payload        record_count * height * width little-endian f32
//!                samples, row-major, records in order
//! ```
//!
//! Images are stored as binary32; generation already quantizes records
//! to binary32-representable values, so a write/read cycle reproduces
//! the in-memory dataset bit-exactly.

use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use specklenet_optics::{GridSpec, IntensityImage};
use specklenet_scenario::CaptureProvenance;

use crate::error::{DatasetError, DatasetResult};
use crate::generate::{GenerationConfig, SpeckleRecord};

const MAGIC: &[u8; 6] = b"SPKL1\n";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct FileHeader {
    format_version: u32,
    record_count: usize,
    height: usize,
    width: usize,
    pitch: f64,
    wavelength: f64,
    generation: GenerationConfig,
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordHeader {
    label: u8,
    provenance: CaptureProvenance,
}

/// Write records to a dataset file, embedding the generation
/// configuration they came from. All records must share one image
/// shape and grid.
pub fn write_dataset(
    path: &Path,
    generation: &GenerationConfig,
    records: &[SpeckleRecord],
) -> DatasetResult<()> {
    let first = records.first().ok_or_else(|| {
        DatasetError::InvalidConfig("refusing to write a dataset with zero records".into())
    })?;
    let grid = *first.image.grid();
    for (i, r) in records.iter().enumerate() {
        if *r.image.grid() != grid {
            return Err(DatasetError::Shape(format!(
                "record {i} grid {:?} differs from record 0 grid {:?}; \
                 a dataset file holds one shape",
                r.image.grid(),
                grid
            )));
        }
    }
    let (height, width) = grid.shape();
    let header = FileHeader {
        format_version: FORMAT_VERSION,
        record_count: records.len(),
        height,
        width,
        pitch: grid.pitch(),
        wavelength: grid.wavelength(),
        generation: generation.clone(),
    };

    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    out.write_all(MAGIC)?;
    serde_json::to_writer(&mut out, &header)
        .map_err(|e| DatasetError::InvalidConfig(format!("header serialization: {e}")))?;
    out.write_all(b"\n")?;
    for r in records {
        let line = RecordHeader {
            label: r.label,
            provenance: r.provenance.clone(),
        };
        serde_json::to_writer(&mut out, &line)
            .map_err(|e| DatasetError::InvalidConfig(format!("record serialization: {e}")))?;
        out.write_all(b"\n")?;
    }
    out.write_all(b"\n")?;
    for r in records {
        for &v in r.image.intensity().iter() {
            out.write_all(&(v as f32).to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn parse_err(&self, message: impl Into<String>) -> DatasetError {
        DatasetError::Parse {
            offset: self.pos as u64,
            message: message.into(),
        }
    }

    /// Bytes up to (not including) the next newline; advances past it.
    fn line(&mut self, what: &str) -> DatasetResult<&'a [u8]> {
        let rest = &self.data[self.pos..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| self.parse_err(format!("missing newline after {what}")))?;
        let line = &rest[..end];
        self.pos += end + 1;
        Ok(line)
    }

    fn json_line<T: for<'de> Deserialize<'de>>(&mut self, what: &str) -> DatasetResult<T> {
        let start = self.pos;
        let line = self.line(what)?;
        serde_json::from_slice(line).map_err(|e| DatasetError::Parse {
            offset: start as u64,
            message: format!("{what}: {e}"),
        })
    }
}

/// Parse the magic and header line, leaving the cursor at the first
/// record line.
fn parse_header(cur: &mut Cursor) -> DatasetResult<FileHeader> {
    if cur.data.len() < MAGIC.len() || &cur.data[..MAGIC.len()] != MAGIC {
        return Err(cur.parse_err("not a dataset file: bad magic (expected \"SPKL1\\n\")"));
    }
    cur.pos = MAGIC.len();
    let header: FileHeader = cur.json_line("file header")?;
    if header.format_version != FORMAT_VERSION {
        return Err(cur.parse_err(format!(
            "unsupported format version {} (this reader handles {FORMAT_VERSION})",
            header.format_version
        )));
    }
    Ok(header)
}

/// Read back only the generation configuration embedded in a dataset
/// file's header, without decoding the image payload.
pub fn read_dataset_generation(path: &Path) -> DatasetResult<GenerationConfig> {
    let data = std::fs::read(path)?;
    let mut cur = Cursor { data: &data, pos: 0 };
    Ok(parse_header(&mut cur)?.generation)
}

/// Read a dataset file written by [`write_dataset`].
pub fn read_dataset(path: &Path) -> DatasetResult<Vec<SpeckleRecord>> {
    let data = std::fs::read(path)?;
    let mut cur = Cursor { data: &data, pos: 0 };
    let header = parse_header(&mut cur)?;
    let grid = GridSpec::new(header.width, header.height, header.pitch, header.wavelength)?;

    let mut headers = Vec::with_capacity(header.record_count);
    for i in 0..header.record_count {
        headers.push(cur.json_line::<RecordHeader>(&format!("record header {i}"))?);
    }
    let blank = cur.line("record header block")?;
    if !blank.is_empty() {
        return Err(cur.parse_err(
            "expected a blank line between the record headers and the payload",
        ));
    }

    let pixels = header.height * header.width;
    let payload = &data[cur.pos..];
    let expected = header.record_count * pixels * 4;
    if payload.len() != expected {
        return Err(cur.parse_err(format!(
            "payload holds {} bytes but {} records of {}x{} f32 samples need {expected}",
            payload.len(),
            header.record_count,
            header.height,
            header.width
        )));
    }

    let mut records = Vec::with_capacity(header.record_count);
    for (i, rec) in headers.into_iter().enumerate() {
        let base = i * pixels * 4;
        let mut values = Vec::with_capacity(pixels);
        for p in 0..pixels {
            let o = base + p * 4;
            let v = f32::from_le_bytes([
                payload[o],
                payload[o + 1],
                payload[o + 2],
                payload[o + 3],
            ]);
            values.push(v as f64);
        }
        let arr = Array2::from_shape_vec((header.height, header.width), values)
            .expect("length checked above");
        let image = IntensityImage::new(grid, arr).map_err(|e| {
            DatasetError::from(e).at_record(i)
        })?;
        records.push(SpeckleRecord {
            image,
            label: rec.label,
            provenance: rec.provenance,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use specklenet_scenario::{ScenarioConfig, ScenarioKind};

    fn synthetic_generation() -> GenerationConfig {
        let grid = GridSpec::square(8, 1e-5, 632.8e-9).unwrap();
        GenerationConfig::new(ScenarioConfig::new(ScenarioKind::OneWall, grid))
    }

    fn synthetic_record(seed: u8) -> SpeckleRecord {
        let grid = GridSpec::square(8, 1e-5, 632.8e-9).unwrap();
        // multiples of 1/256 are exactly representable in binary32
        let image = IntensityImage::new(
            grid,
            Array2::from_shape_fn((8, 8), |(r, c)| {
                ((r * 8 + c + seed as usize) % 256) as f64 / 256.0
            }),
        )
        .unwrap();
        SpeckleRecord {
            image,
            label: seed % 10,
            provenance: CaptureProvenance {
                scenario: ScenarioKind::OneWall,
                wall_seed: seed as u64,
                wall_seed_2: None,
                patch_offsets: vec![(0, 0)],
                capture_index: 0,
                object_id: 0xfeed + seed as u64,
                object_label: Some(seed % 10),
                noise_seed: Some(77 + seed as u64),
                version: "test".into(),
            },
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.spkl");
        let records = vec![synthetic_record(1), synthetic_record(2), synthetic_record(3)];
        write_dataset(&path, &synthetic_generation(), &records).unwrap();
        let loaded = read_dataset(&path).unwrap();
        assert_eq!(loaded.len(), records.len());
        for (a, b) in records.iter().zip(&loaded) {
            assert_eq!(a.image.intensity(), b.image.intensity());
            assert_eq!(a.image.grid(), b.image.grid());
            assert_eq!(a.label, b.label);
            assert_eq!(a.provenance, b.provenance);
        }
    }

    #[test]
    fn header_round_trips_the_generation_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.spkl");
        let generation = synthetic_generation();
        write_dataset(&path, &generation, &[synthetic_record(1)]).unwrap();
        assert_eq!(read_dataset_generation(&path).unwrap(), generation);
    }

    #[test]
    fn magic_must_match() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.spkl");
        write_dataset(&path, &synthetic_generation(), &[synthetic_record(1)]).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        let err = read_dataset(&path).unwrap_err();
        assert!(err.to_string().contains("magic"), "got: {err}");
    }

    #[test]
    fn unsupported_version_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.spkl");
        write_dataset(&path, &synthetic_generation(), &[synthetic_record(1)]).unwrap();
        let text = std::fs::read(&path).unwrap();
        let patched = {
            let s = String::from_utf8_lossy(&text[..200]).into_owned();
            assert!(s.contains("\"format_version\":1"));
            let mut all = text.clone();
            let needle = b"\"format_version\":1";
            let at = all
                .windows(needle.len())
                .position(|w| w == needle)
                .unwrap();
            all[at + needle.len() - 1] = b'9';
            all
        };
        std::fs::write(&path, &patched).unwrap();
        let err = read_dataset(&path).unwrap_err();
        assert!(err.to_string().contains("version"), "got: {err}");
    }

    #[test]
    fn truncated_payload_reports_the_shortfall() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.spkl");
        write_dataset(
            &path,
            &synthetic_generation(),
            &[synthetic_record(1), synthetic_record(2)],
        )
        .unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 5]).unwrap();
        let err = read_dataset(&path).unwrap_err();
        assert!(matches!(err, DatasetError::Parse { .. }), "got: {err:?}");
        assert!(err.to_string().contains("payload"), "got: {err}");
    }

    #[test]
    fn trailing_bytes_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.spkl");
        write_dataset(&path, &synthetic_generation(), &[synthetic_record(1)]).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.extend_from_slice(&[0, 0, 0, 0]);
        std::fs::write(&path, &bytes).unwrap();
        assert!(read_dataset(&path).is_err());
    }

    #[test]
    fn empty_dataset_write_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_dataset(&dir.path().join("e.spkl"), &synthetic_generation(), &[]).is_err());
    }

    #[test]
    fn mixed_shapes_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut other = synthetic_record(2);
        let small = GridSpec::square(4, 1e-5, 632.8e-9).unwrap();
        other.image = IntensityImage::new(small, Array2::zeros((4, 4))).unwrap();
        let err = write_dataset(
            &dir.path().join("m.spkl"),
            &synthetic_generation(),
            &[synthetic_record(1), other],
        )
        .unwrap_err();
        assert!(matches!(err, DatasetError::Shape(_)), "got: {err:?}");
    }

    #[test]
    fn negative_payload_sample_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.spkl");
        write_dataset(&path, &synthetic_generation(), &[synthetic_record(1)]).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        let n = bytes.len();
        // overwrite the last sample with -1.0f32
        bytes[n - 4..].copy_from_slice(&(-1.0f32).to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        let err = read_dataset(&path).unwrap_err();
        assert!(matches!(err, DatasetError::Record { index: 0, .. }), "got: {err:?}");
    }
}

//! Checkpoint persistence.
//!
//! Layout of a checkpoint file:
//!
//! ```text
//! magic        b"SNET1\n"
//! header line  JSON: format_version, input_size, layer table
//!              (name, shape, dtype) in a fixed order
//! blank line
//! payload      the layer arrays as little-endian f32, concatenated
//!              in table order, each in row-major element order
//! trailer      CRC32 (little-endian u32) of every preceding byte
//! ```
//!
//! Parameters are stored in binary32; saving an `f64` network rounds
//! it. An `f32` network round-trips bit-exactly.

use std::io::Write;
use std::path::Path;

use ndarray::{ArrayD, IxDyn};
use serde::{Deserialize, Serialize};

use crate::error::{ClassifierError, ClassifierResult};
use crate::params::{expected_shapes, SimpleNetParams};
use crate::scalar::Scalar;

const MAGIC: &[u8; 6] = b"SNET1\n";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct LayerEntry {
    name: String,
    shape: Vec<usize>,
    dtype: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointHeader {
    format_version: u32,
    input_size: usize,
    layers: Vec<LayerEntry>,
}

/// Save parameters as binary32 with a trailing CRC32.
pub fn save_params<F: Scalar>(params: &SimpleNetParams<F>, path: &Path) -> ClassifierResult<()> {
    let as_f32: SimpleNetParams<f32> = params.convert();
    let header = CheckpointHeader {
        format_version: FORMAT_VERSION,
        input_size: as_f32.input_size(),
        layers: SimpleNetParams::<f32>::array_names()
            .iter()
            .zip(as_f32.views())
            .map(|(name, view)| LayerEntry {
                name: (*name).to_string(),
                shape: view.shape().to_vec(),
                dtype: "f32".to_string(),
            })
            .collect(),
    };
    let mut bytes = Vec::new();
    bytes.extend_from_slice(MAGIC);
    serde_json::to_writer(&mut bytes, &header)
        .map_err(|e| ClassifierError::Config(format!("header serialization: {e}")))?;
    bytes.extend_from_slice(b"\n\n");
    for view in as_f32.views() {
        for &v in view.iter() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut hasher = crc32fast::Hasher::new();
    hasher.update(&bytes);
    bytes.extend_from_slice(&hasher.finalize().to_le_bytes());

    let mut file = std::fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

fn corrupt(offset: usize, message: impl Into<String>) -> ClassifierError {
    ClassifierError::Corrupt {
        offset: offset as u64,
        message: message.into(),
    }
}

/// Load a checkpoint saved by [`save_params`], verifying the CRC and
/// every layer shape.
pub fn load_params(path: &Path) -> ClassifierResult<SimpleNetParams<f32>> {
    let data = std::fs::read(path)?;
    if data.len() < MAGIC.len() + 4 {
        return Err(corrupt(data.len(), "file too short to be a checkpoint"));
    }
    if &data[..MAGIC.len()] != MAGIC {
        return Err(corrupt(0, "bad magic (expected \"SNET1\\n\")"));
    }
    let (body, trailer) = data.split_at(data.len() - 4);
    let stored_crc = u32::from_le_bytes([trailer[0], trailer[1], trailer[2], trailer[3]]);
    let mut hasher = crc32fast::Hasher::new();
    hasher.update(body);
    let actual_crc = hasher.finalize();
    if stored_crc != actual_crc {
        return Err(corrupt(
            body.len(),
            format!("CRC mismatch: stored {stored_crc:#010x}, computed {actual_crc:#010x}"),
        ));
    }

    let mut pos = MAGIC.len();
    let header_end = body[pos..]
        .iter()
        .position(|&b| b == b'\n')
        .map(|i| pos + i)
        .ok_or_else(|| corrupt(pos, "missing newline after header"))?;
    let header: CheckpointHeader = serde_json::from_slice(&body[pos..header_end])
        .map_err(|e| corrupt(pos, format!("header: {e}")))?;
    if header.format_version != FORMAT_VERSION {
        return Err(corrupt(
            pos,
            format!(
                "unsupported format version {} (this reader handles {FORMAT_VERSION})",
                header.format_version
            ),
        ));
    }
    pos = header_end + 1;
    if body.get(pos) != Some(&b'\n') {
        return Err(corrupt(pos, "expected a blank line before the payload"));
    }
    pos += 1;

    let expected = expected_shapes(header.input_size)?;
    if header.layers.len() != expected.len() {
        return Err(corrupt(
            pos,
            format!(
                "layer table holds {} entries, architecture has {}",
                header.layers.len(),
                expected.len()
            ),
        ));
    }
    let mut arrays: Vec<ArrayD<f32>> = Vec::with_capacity(expected.len());
    for (entry, (name, shape)) in header.layers.iter().zip(&expected) {
        if entry.dtype != "f32" {
            return Err(corrupt(pos, format!("{}: unsupported dtype {}", entry.name, entry.dtype)));
        }
        if &entry.name != name || &entry.shape != shape {
            return Err(corrupt(
                pos,
                format!(
                    "layer table entry ({}, {:?}) does not match the architecture entry ({name}, {shape:?})",
                    entry.name, entry.shape
                ),
            ));
        }
        let count: usize = shape.iter().product();
        let nbytes = count * 4;
        if pos + nbytes > body.len() {
            return Err(corrupt(
                pos,
                format!(
                    "{name}: truncated payload (need {nbytes} bytes, {} remain)",
                    body.len() - pos
                ),
            ));
        }
        let values: Vec<f32> = body[pos..pos + nbytes]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        arrays.push(
            ArrayD::from_shape_vec(IxDyn(shape), values).expect("length matches shape"),
        );
        pos += nbytes;
    }
    if pos != body.len() {
        return Err(corrupt(pos, format!("{} trailing payload bytes", body.len() - pos)));
    }
    SimpleNetParams::from_arrays(header.input_size, arrays)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::init_params;

    #[test]
    fn save_load_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.snet");
        let params = init_params::<f32>(32, 42).unwrap();
        save_params(&params, &path).unwrap();
        let loaded = load_params(&path).unwrap();
        assert_eq!(params, loaded);
    }

    #[test]
    fn flipped_payload_byte_is_caught_by_crc() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.snet");
        save_params(&init_params::<f32>(32, 1).unwrap(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        let middle = bytes.len() / 2;
        bytes[middle] ^= 0x40;
        std::fs::write(&path, &bytes).unwrap();
        match load_params(&path) {
            Err(ClassifierError::Corrupt { message, .. }) => {
                assert!(message.contains("CRC"), "got: {message}")
            }
            other => panic!("expected CRC failure, got {other:?}"),
        }
    }

    #[test]
    fn flipped_trailer_byte_is_caught_by_crc() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.snet");
        save_params(&init_params::<f32>(32, 1).unwrap(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 0x01;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load_params(&path),
            Err(ClassifierError::Corrupt { .. })
        ));
    }

    #[test]
    fn truncated_file_reports_an_offset() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.snet");
        save_params(&init_params::<f32>(32, 1).unwrap(), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 100]).unwrap();
        match load_params(&path) {
            // truncation breaks the CRC first; both reports carry an offset
            Err(ClassifierError::Corrupt { .. }) => {}
            other => panic!("expected corruption error, got {other:?}"),
        }
    }

    #[test]
    fn bad_magic_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.snet");
        save_params(&init_params::<f32>(32, 1).unwrap(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'Z';
        std::fs::write(&path, &bytes).unwrap();
        match load_params(&path) {
            Err(ClassifierError::Corrupt { offset, message }) => {
                assert_eq!(offset, 0);
                assert!(message.contains("magic"));
            }
            other => panic!("expected magic failure, got {other:?}"),
        }
    }

    #[test]
    fn f64_params_quantize_to_f32_on_save() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.snet");
        let params = init_params::<f64>(32, 9).unwrap();
        save_params(&params, &path).unwrap();
        let loaded = load_params(&path).unwrap();
        assert_eq!(loaded, params.convert::<f32>());
    }
}

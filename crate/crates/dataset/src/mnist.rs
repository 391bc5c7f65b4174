//! IDX-format digit ingestion and object-mask construction.

use std::io::Read;
use std::path::Path;

use ndarray::Array2;
use specklenet_optics::{AmplitudeMask, GridSpec};

use crate::error::{DatasetError, DatasetResult};

const IMAGE_MAGIC: u32 = 0x0000_0803;
const LABEL_MAGIC: u32 = 0x0000_0801;

/// Default cap on how many digits to ingest.
pub const DEFAULT_DIGIT_LIMIT: usize = 10_000;

/// One grayscale digit with its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledImage {
    pixels: Array2<f64>,
    label: u8,
}

impl LabeledImage {
    /// Pixels must lie in [0, 1] and the label in 0..=9.
    pub fn new(pixels: Array2<f64>, label: u8) -> DatasetResult<Self> {
        if label > 9 {
            return Err(DatasetError::InvalidConfig(format!(
                "label must be a digit 0-9, got {label}"
            )));
        }
        for &p in pixels.iter() {
            if !(0.0..=1.0).contains(&p) {
                return Err(DatasetError::InvalidConfig(format!(
                    "pixel values must lie in [0, 1], got {p}"
                )));
            }
        }
        Ok(Self { pixels, label })
    }

    pub fn pixels(&self) -> &Array2<f64> {
        &self.pixels
    }

    pub fn label(&self) -> u8 {
        self.label
    }

    /// Number of pixels strictly above `threshold`.
    pub fn foreground_count(&self, threshold: f64) -> usize {
        self.pixels.iter().filter(|&&p| p > threshold).count()
    }
}

struct ByteReader {
    data: Vec<u8>,
    pos: usize,
    path: String,
}

impl ByteReader {
    fn open(path: &Path) -> DatasetResult<Self> {
        let mut data = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut data)?;
        Ok(Self {
            data,
            pos: 0,
            path: path.display().to_string(),
        })
    }

    fn take(&mut self, n: usize, what: &str) -> DatasetResult<&[u8]> {
        if self.pos + n > self.data.len() {
            return Err(DatasetError::Parse {
                offset: self.pos as u64,
                message: format!(
                    "{}: truncated while reading {what}: need {n} bytes, {} remain",
                    self.path,
                    self.data.len() - self.pos
                ),
            });
        }
        let slice = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn read_u32(&mut self, what: &str) -> DatasetResult<u32> {
        let bytes = self.take(4, what)?;
        Ok(u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]))
    }
}

/// Load IDX-encoded digit images and labels (big-endian IDX layout:
/// image magic 0x00000803, label magic 0x00000801), scaling pixel bytes
/// to [0, 1] and capping the count at `limit`.
pub fn load_idx_limited(
    path_images: &Path,
    path_labels: &Path,
    limit: usize,
) -> DatasetResult<Vec<LabeledImage>> {
    let mut images = ByteReader::open(path_images)?;
    let magic = images.read_u32("image magic")?;
    if magic != IMAGE_MAGIC {
        return Err(DatasetError::Parse {
            offset: 0,
            message: format!(
                "{}: bad image magic {magic:#010x}, expected {IMAGE_MAGIC:#010x}",
                images.path
            ),
        });
    }
    let image_count = images.read_u32("image count")? as usize;
    let rows = images.read_u32("row count")? as usize;
    let cols = images.read_u32("column count")? as usize;

    let mut labels = ByteReader::open(path_labels)?;
    let magic = labels.read_u32("label magic")?;
    if magic != LABEL_MAGIC {
        return Err(DatasetError::Parse {
            offset: 0,
            message: format!(
                "{}: bad label magic {magic:#010x}, expected {LABEL_MAGIC:#010x}",
                labels.path
            ),
        });
    }
    let label_count = labels.read_u32("label count")? as usize;
    if label_count != image_count {
        return Err(DatasetError::Parse {
            offset: 4,
            message: format!(
                "image file holds {image_count} items but label file holds {label_count}"
            ),
        });
    }

    let n = image_count.min(limit);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let raw = images.take(rows * cols, &format!("image {i}"))?.to_vec();
        let label = labels.take(1, &format!("label {i}"))?[0];
        let pixels = Array2::from_shape_fn((rows, cols), |(r, c)| {
            raw[r * cols + c] as f64 / 255.0
        });
        out.push(LabeledImage::new(pixels, label).map_err(|e| e.at_record(i))?);
    }
    Ok(out)
}

/// [`load_idx_limited`] with the standard cap of 10,000 digits.
pub fn load_idx(path_images: &Path, path_labels: &Path) -> DatasetResult<Vec<LabeledImage>> {
    load_idx_limited(path_images, path_labels, DEFAULT_DIGIT_LIMIT)
}

/// Threshold a grayscale digit into a strict 0/1 image: pixels above
/// `threshold` become 1. Idempotent for any threshold in (0, 1).
pub fn binarize(img: &LabeledImage, threshold: f64) -> DatasetResult<LabeledImage> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(DatasetError::InvalidConfig(format!(
            "binarize threshold must lie strictly inside (0, 1), got {threshold}"
        )));
    }
    let pixels = img.pixels.mapv(|p| if p > threshold { 1.0 } else { 0.0 });
    Ok(LabeledImage {
        pixels,
        label: img.label,
    })
}

/// Paint a digit onto a transmittance mask: the digit is resampled
/// (nearest-neighbor, to keep binary values binary) to span an
/// `object_size` x `object_size` square centered in the grid; the
/// surrounding board is opaque.
pub fn embed_object(
    img: &LabeledImage,
    grid: GridSpec,
    object_size: f64,
) -> DatasetResult<AmplitudeMask> {
    let (width, height) = grid.physical_size();
    if !(object_size > 0.0) || object_size > width.min(height) {
        return Err(DatasetError::InvalidConfig(format!(
            "object_size {object_size} m must be positive and fit the grid ({:.4e} m shortest side)",
            width.min(height)
        )));
    }
    let (ny, nx) = grid.shape();
    let obj_px = (object_size / grid.pitch()).round().max(1.0) as usize;
    let obj_px = obj_px.min(nx).min(ny);
    let (row0, col0) = ((ny - obj_px) / 2, (nx - obj_px) / 2);
    let (src_h, src_w) = img.pixels.dim();

    let mut t = Array2::zeros((ny, nx));
    for r in 0..obj_px {
        let src_r = (r * src_h) / obj_px;
        for c in 0..obj_px {
            let src_c = (c * src_w) / obj_px;
            t[[row0 + r, col0 + c]] = img.pixels[[src_r, src_c]];
        }
    }
    Ok(AmplitudeMask::new(grid, t)?)
}

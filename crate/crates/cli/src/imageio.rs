//! 8-bit grayscale image output (PGM / PNG) and input.
//!
//! Rendering maps intensities linearly from [0, 1] to [0, 255]
//! (values outside the range are clamped), so normalized records
//! render over the full dynamic range and the output bytes are a pure
//! function of the pixel values. Binary PGM (P5) is the reference
//! byte layout; PNG goes through the `image` crate.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;

use crate::error::{CliError, CliResult};

/// Linear [0, 1] -> [0, 255] mapping with clamping, row-major bytes.
pub fn to_gray_bytes(values: &Array2<f64>) -> Vec<u8> {
    values
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect()
}

/// Encode a binary PGM (P5, maxval 255) image.
pub fn encode_pgm(width: usize, height: usize, bytes: &[u8]) -> Vec<u8> {
    assert_eq!(bytes.len(), width * height);
    let mut header = String::new();
    write!(header, "P5\n{width} {height}\n255\n").unwrap();
    let mut out = header.into_bytes();
    out.extend_from_slice(bytes);
    out
}

/// Render an intensity array to `path`; the format is chosen by the
/// file extension (`.pgm` or `.png`).
pub fn write_gray_image(path: &Path, values: &Array2<f64>) -> CliResult<()> {
    let (height, width) = values.dim();
    let bytes = to_gray_bytes(values);
    match extension(path)?.as_str() {
        "pgm" => {
            std::fs::write(path, encode_pgm(width, height, &bytes))
                .map_err(|e| CliError::io(path, e))?;
        }
        "png" => {
            let img = image::GrayImage::from_raw(width as u32, height as u32, bytes)
                .expect("buffer length matches dimensions");
            img.save_with_format(path, image::ImageFormat::Png)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        }
        other => {
            return Err(CliError::Input(format!(
                "unsupported output format {other:?} (expected pgm or png)"
            )));
        }
    }
    Ok(())
}

/// Load a grayscale image (PGM or PNG) as values in [0, 1].
pub fn load_gray_image(path: &Path) -> CliResult<Array2<f64>> {
    let img = image::open(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .into_luma8();
    let (width, height) = img.dimensions();
    let values = Array2::from_shape_fn((height as usize, width as usize), |(r, c)| {
        f64::from(img.get_pixel(c as u32, r as u32).0[0]) / 255.0
    });
    Ok(values)
}

fn extension(path: &Path) -> CliResult<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .ok_or_else(|| {
            CliError::Input(format!(
                "{}: cannot infer image format without a file extension",
                path.display()
            ))
        })
}

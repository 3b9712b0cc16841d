//! Grayscale PGM decoding (P2 ASCII and P5 binary) and P5 encoding.
//!
//! Samples wider than 8 bits (maxval >= 256) use two bytes per sample,
//! big-endian, per the Netpbm convention. Color and bitmap Netpbm formats
//! are rejected.

use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Malformed { path: String, reason: String },
    #[error("{path}: unsupported Netpbm format {magic:?} (only P2 and P5 grayscale are supported)")]
    UnsupportedFormat { path: String, magic: String },
}

/// A decoded raster: row-major samples plus the header maxval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    pub max_value: u16,
    pub samples: Vec<u16>,
}

fn malformed(path: &Path, reason: impl Into<String>) -> PgmError {
    PgmError::Malformed {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

/// Reads header tokens (magic, width, height, maxval), skipping whitespace
/// and `#` comments; returns the tokens plus the index of the byte after the
/// single whitespace character that terminates the maxval token.
fn header_tokens(path: &Path, bytes: &[u8]) -> Result<([String; 4], usize), PgmError> {
    let mut tokens: Vec<String> = Vec::with_capacity(4);
    let mut i = 0;
    while tokens.len() < 4 {
        // Skip whitespace and comments.
        loop {
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            } else {
                break;
            }
        }
        if i >= bytes.len() {
            return Err(malformed(path, "truncated header"));
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'#' {
            i += 1;
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..i]).into_owned());
        if tokens.len() == 4 {
            // Exactly one whitespace byte separates the maxval from raster
            // data in binary files.
            if i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
        }
    }
    let arr: [String; 4] = tokens.try_into().expect("collected exactly four tokens");
    Ok((arr, i))
}

/// Decodes a P2 or P5 grayscale PGM file.
pub fn decode_pgm(path: &Path) -> Result<PgmImage, PgmError> {
    let bytes = fs::read(path).map_err(|source| PgmError::Io {
        path: path.display().to_string(),
        source,
    })?;
    if bytes.len() < 2 {
        return Err(malformed(path, "file too short for a PGM header"));
    }
    let magic = String::from_utf8_lossy(&bytes[..2]).into_owned();
    match magic.as_str() {
        "P2" | "P5" => {}
        "P1" | "P3" | "P4" | "P6" | "P7" => {
            return Err(PgmError::UnsupportedFormat {
                path: path.display().to_string(),
                magic,
            })
        }
        _ => return Err(malformed(path, format!("not a Netpbm file (starts with {magic:?})"))),
    }

    let (tokens, data_start) = header_tokens(path, &bytes)?;
    let parse = |what: &str, token: &str| -> Result<usize, PgmError> {
        token
            .parse::<usize>()
            .map_err(|_| malformed(path, format!("invalid {what} {token:?}")))
    };
    let width = parse("width", &tokens[1])?;
    let height = parse("height", &tokens[2])?;
    let max_value = parse("maxval", &tokens[3])?;
    if width == 0 || height == 0 {
        return Err(malformed(path, "zero width or height"));
    }
    if max_value == 0 || max_value > 65535 {
        return Err(malformed(path, format!("maxval {max_value} outside 1..=65535")));
    }
    let max_value = max_value as u16;
    let count = width * height;

    let samples = if tokens[0] == "P2" {
        let text = String::from_utf8_lossy(&bytes[data_start..]);
        let mut values = Vec::with_capacity(count);
        for token in text.split_whitespace() {
            if token.starts_with('#') {
                continue;
            }
            let v: u32 = token
                .parse()
                .map_err(|_| malformed(path, format!("invalid sample {token:?}")))?;
            if v > u32::from(max_value) {
                return Err(malformed(path, format!("sample {v} exceeds maxval {max_value}")));
            }
            values.push(v as u16);
        }
        if values.len() != count {
            return Err(malformed(
                path,
                format!("expected {count} samples, found {}", values.len()),
            ));
        }
        values
    } else {
        let data = &bytes[data_start..];
        let wide = max_value >= 256;
        let needed = count * if wide { 2 } else { 1 };
        if data.len() < needed {
            return Err(malformed(
                path,
                format!("raster truncated: expected {needed} bytes, found {}", data.len()),
            ));
        }
        let mut values = Vec::with_capacity(count);
        for k in 0..count {
            let v = if wide {
                u16::from_be_bytes([data[2 * k], data[2 * k + 1]])
            } else {
                u16::from(data[k])
            };
            if v > max_value {
                return Err(malformed(path, format!("sample {v} exceeds maxval {max_value}")));
            }
            values.push(v);
        }
        values
    };

    Ok(PgmImage {
        width,
        height,
        max_value,
        samples,
    })
}

/// Writes a P5 binary PGM. Two bytes per sample (big-endian) when
/// `max_value >= 256`, one otherwise.
pub fn encode_pgm_p5(
    path: &Path,
    width: usize,
    height: usize,
    max_value: u16,
    samples: &[u16],
) -> Result<(), PgmError> {
    assert_eq!(samples.len(), width * height, "sample count must match dimensions");
    assert!(max_value >= 1, "PGM maxval must be at least 1");
    let mut out = Vec::with_capacity(20 + samples.len() * 2);
    out.extend_from_slice(format!("P5\n{width} {height}\n{max_value}\n").as_bytes());
    if max_value >= 256 {
        for &s in samples {
            out.extend_from_slice(&s.to_be_bytes());
        }
    } else {
        out.extend(samples.iter().map(|&s| s as u8));
    }
    fs::write(path, out).map_err(|source| PgmError::Io {
        path: path.display().to_string(),
        source,
    })
}

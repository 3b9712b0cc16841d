//! Model persistence: JSON with every float printed to 17 significant
//! digits so a save/load cycle reproduces the trained model bit for bit.

use std::fs;
use std::io;
use std::path::Path;

use opstage_core::WblsModel;
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid model file: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

/// Compact JSON formatter that renders every `f64` as `{:.16e}` —
/// 17 significant digits, enough to identify a double uniquely.
struct PreciseFormatter;

impl Formatter for PreciseFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        debug_assert!(value.is_finite(), "model floats must be finite");
        write!(writer, "{value:.16e}")
    }
}

/// Serializes a model to 17-significant-digit JSON bytes.
pub fn model_to_json(model: &WblsModel) -> Vec<u8> {
    let mut buf = Vec::new();
    let mut serializer = Serializer::with_formatter(&mut buf, PreciseFormatter);
    model
        .serialize(&mut serializer)
        .expect("in-memory JSON serialization cannot fail");
    buf.push(b'\n');
    buf
}

/// Writes a model file.
pub fn save_model(path: &Path, model: &WblsModel) -> Result<(), ModelIoError> {
    fs::write(path, model_to_json(model)).map_err(|source| ModelIoError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a model file back. Parsing uses exact float round-tripping, so the
/// loaded model is bit-identical to the one saved.
pub fn load_model(path: &Path) -> Result<WblsModel, ModelIoError> {
    let bytes = fs::read(path).map_err(|source| ModelIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_slice(&bytes).map_err(|source| ModelIoError::Json {
        path: path.display().to_string(),
        source,
    })
}

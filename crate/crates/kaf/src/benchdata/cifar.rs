use crate::benchdata::functions::{Dataset, TaskKind};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use std::fs;
use std::path::Path;

/// Bytes per record in a CIFAR-10 binary batch: one label byte followed by
/// a 32x32x3 image stored plane-major (all R, all G, all B).
pub const CIFAR_RECORD_BYTES: usize = 3073;
pub const CIFAR_PIXELS: usize = 3072;

/// Loads a CIFAR-10 binary batch. Pixels are scaled to [0, 1]; `limit`
/// truncates to the first records when set.
pub fn load_cifar10_batch(path: impl AsRef<Path>, limit: Option<usize>) -> Result<Dataset> {
    let bytes = fs::read(path.as_ref())?;
    if bytes.is_empty() || bytes.len() % CIFAR_RECORD_BYTES != 0 {
        return Err(Error::Format {
            line: None,
            msg: format!(
                "batch is {} bytes, not a positive multiple of {CIFAR_RECORD_BYTES}",
                bytes.len()
            ),
        });
    }
    let total = bytes.len() / CIFAR_RECORD_BYTES;
    let n = limit.map_or(total, |l| l.min(total));
    if n == 0 {
        return Err(Error::Param("limit of 0 leaves no records".into()));
    }
    let mut x = Matrix::zeros(n, CIFAR_PIXELS);
    let mut y = Matrix::zeros(n, 1);
    for r in 0..n {
        let rec = &bytes[r * CIFAR_RECORD_BYTES..(r + 1) * CIFAR_RECORD_BYTES];
        let label = rec[0];
        if label > 9 {
            return Err(Error::Data(format!(
                "label {label} in record {r} is outside 0..=9"
            )));
        }
        y.set(r, 0, label as f64);
        let row = x.row_mut(r);
        for (dst, &px) in row.iter_mut().zip(&rec[1..]) {
            *dst = px as f64 / 255.0;
        }
    }
    Ok(Dataset { x, y, task: TaskKind::Classification })
}

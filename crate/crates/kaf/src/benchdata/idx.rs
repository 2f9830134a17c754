use crate::benchdata::functions::{Dataset, TaskKind};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use std::fs::File;
use std::io::Read;
use std::path::Path;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

fn read_u32_be(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_be_bytes(buf))
}

/// Reads an IDX image file (magic 0x803): n x (rows * cols) pixels scaled
/// to [0, 1].
pub fn load_mnist_images(path: impl AsRef<Path>) -> Result<Matrix> {
    let mut f = File::open(path.as_ref())?;
    let magic = read_u32_be(&mut f)?;
    if magic != IMAGES_MAGIC {
        return Err(Error::Format {
            line: None,
            msg: format!("image file magic {magic:#010x}, expected {IMAGES_MAGIC:#010x}"),
        });
    }
    let n = read_u32_be(&mut f)? as usize;
    let rows = read_u32_be(&mut f)? as usize;
    let cols = read_u32_be(&mut f)? as usize;
    let mut pixels = vec![0u8; n * rows * cols];
    f.read_exact(&mut pixels)?;
    let data: Vec<f64> = pixels.iter().map(|&p| p as f64 / 255.0).collect();
    Matrix::from_vec(n, rows * cols, data)
}

/// Reads an IDX label file (magic 0x801): n x 1 class indices. MNIST labels
/// beyond 9 indicate a corrupt file and are rejected.
pub fn load_mnist_labels(path: impl AsRef<Path>) -> Result<Matrix> {
    let mut f = File::open(path.as_ref())?;
    let magic = read_u32_be(&mut f)?;
    if magic != LABELS_MAGIC {
        return Err(Error::Format {
            line: None,
            msg: format!("label file magic {magic:#010x}, expected {LABELS_MAGIC:#010x}"),
        });
    }
    let n = read_u32_be(&mut f)? as usize;
    let mut labels = vec![0u8; n];
    f.read_exact(&mut labels)?;
    if let Some((i, &bad)) = labels.iter().enumerate().find(|(_, &l)| l > 9) {
        return Err(Error::Data(format!("label {bad} at index {i} is outside 0..=9")));
    }
    Matrix::from_vec(n, 1, labels.iter().map(|&l| l as f64).collect())
}

/// Loads an aligned image/label pair as a classification dataset.
pub fn load_mnist_pair(
    images: impl AsRef<Path>,
    labels: impl AsRef<Path>,
) -> Result<Dataset> {
    let x = load_mnist_images(images)?;
    let y = load_mnist_labels(labels)?;
    if x.rows() != y.rows() {
        return Err(Error::Data(format!(
            "{} images but {} labels",
            x.rows(),
            y.rows()
        )));
    }
    Ok(Dataset { x, y, task: TaskKind::Classification })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_images(path: &Path, n: u32, rows: u32, cols: u32, pixels: &[u8]) {
        let mut f = File::create(path).unwrap();
        f.write_all(&IMAGES_MAGIC.to_be_bytes()).unwrap();
        f.write_all(&n.to_be_bytes()).unwrap();
        f.write_all(&rows.to_be_bytes()).unwrap();
        f.write_all(&cols.to_be_bytes()).unwrap();
        f.write_all(pixels).unwrap();
    }

    fn write_labels(path: &Path, n: u32, labels: &[u8]) {
        let mut f = File::create(path).unwrap();
        f.write_all(&LABELS_MAGIC.to_be_bytes()).unwrap();
        f.write_all(&n.to_be_bytes()).unwrap();
        f.write_all(labels).unwrap();
    }

    #[test]
    fn loads_synthetic_pair() {
        let dir = tempfile::tempdir().unwrap();
        let img = dir.path().join("images.idx");
        let lbl = dir.path().join("labels.idx");
        // Two 2x3 images: a gradient and a constant.
        write_images(&img, 2, 2, 3, &[0, 51, 102, 153, 204, 255, 128, 128, 128, 128, 128, 128]);
        write_labels(&lbl, 2, &[7, 0]);
        let ds = load_mnist_pair(&img, &lbl).unwrap();
        assert_eq!(ds.x.shape(), (2, 6));
        assert_eq!(ds.y.shape(), (2, 1));
        assert_eq!(ds.task, TaskKind::Classification);
        assert_eq!(ds.x.get(0, 0), 0.0);
        assert!((ds.x.get(0, 1) - 51.0 / 255.0).abs() < 1e-15);
        assert_eq!(ds.x.get(0, 5), 1.0);
        assert!((ds.x.get(1, 0) - 128.0 / 255.0).abs() < 1e-15);
        assert_eq!(ds.y.get(0, 0), 7.0);
        assert_eq!(ds.y.get(1, 0), 0.0);
    }

    #[test]
    fn wrong_magic_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let img = dir.path().join("bad.idx");
        let mut f = File::create(&img).unwrap();
        f.write_all(&0x0000_0802u32.to_be_bytes()).unwrap();
        f.write_all(&1u32.to_be_bytes()).unwrap();
        drop(f);
        assert!(matches!(load_mnist_images(&img), Err(Error::Format { .. })));
        // Image magic on a label loader is also wrong.
        let lbl = dir.path().join("img_as_lbl.idx");
        write_images(&lbl, 1, 1, 1, &[0]);
        assert!(matches!(load_mnist_labels(&lbl), Err(Error::Format { .. })));
    }

    #[test]
    fn truncated_payload_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let img = dir.path().join("short.idx");
        write_images(&img, 4, 28, 28, &[0u8; 100]); // needs 3136 bytes
        assert!(matches!(load_mnist_images(&img), Err(Error::Io(_))));
    }

    #[test]
    fn out_of_range_label_is_a_data_error() {
        let dir = tempfile::tempdir().unwrap();
        let lbl = dir.path().join("labels.idx");
        write_labels(&lbl, 3, &[1, 10, 2]);
        assert!(matches!(load_mnist_labels(&lbl), Err(Error::Data(_))));
    }

    #[test]
    fn count_mismatch_is_a_data_error() {
        let dir = tempfile::tempdir().unwrap();
        let img = dir.path().join("images.idx");
        let lbl = dir.path().join("labels.idx");
        write_images(&img, 2, 1, 2, &[0, 1, 2, 3]);
        write_labels(&lbl, 3, &[1, 2, 3]);
        assert!(matches!(load_mnist_pair(&img, &lbl), Err(Error::Data(_))));
    }

    /// Exercises real MNIST files when present (KAF_MNIST_DIR with the four
    /// standard idx files); a missing directory skips silently so the suite
    /// stays self-contained.
    #[test]
    fn loads_real_mnist_when_available() {
        let Ok(dir) = std::env::var("KAF_MNIST_DIR") else {
            return;
        };
        let dir = std::path::PathBuf::from(dir);
        let img = dir.join("train-images-idx3-ubyte");
        let lbl = dir.join("train-labels-idx1-ubyte");
        if !img.exists() || !lbl.exists() {
            return;
        }
        let ds = load_mnist_pair(&img, &lbl).unwrap();
        assert_eq!(ds.x.cols(), 784);
        assert_eq!(ds.x.rows(), 60000);
        assert!(ds.y.as_slice().iter().all(|&l| (0.0..=9.0).contains(&l)));
    }
}

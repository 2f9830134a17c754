use crate::benchdata::Dataset;
use crate::error::{Error, Result};
use crate::layers::Network;
use crate::numerics::{dft_magnitude, Spectrum};

/// One-sided magnitude spectra of a model's predictions and of the targets
/// on the same uniform grid, plus whether the dominant frequency bins agree.
#[derive(Debug, Clone)]
pub struct SpectrumCompare {
    pub model: Spectrum,
    pub truth: Spectrum,
    pub peak_bin_model: usize,
    pub peak_bin_truth: usize,
    /// True when both spectra peak in the same bin.
    pub peak_match: bool,
}

/// Uniform sample spacing of a scalar grid, or an error when the spacing
/// drifts by more than a 1e-9 relative tolerance. DFT bins are only
/// meaningful on an equispaced grid.
fn uniform_spacing(xs: &[f64]) -> Result<f64> {
    let step = xs[1] - xs[0];
    if !(step > 0.0) {
        return Err(Error::Param(format!(
            "grid must be strictly increasing, first step is {step}"
        )));
    }
    let tol = 1e-9 * step.abs().max(1.0);
    for (i, w) in xs.windows(2).enumerate() {
        let d = w[1] - w[0];
        if (d - step).abs() > tol {
            return Err(Error::Param(format!(
                "grid is not uniform: step {d} at index {i} vs {step} at index 0"
            )));
        }
    }
    Ok(step)
}

/// Runs the model over the dataset's input grid and compares the spectrum of
/// its predictions against the spectrum of the targets. Requires a scalar
/// regression dataset sampled on a uniform grid.
pub fn spectrum_compare(net: &Network, data: &Dataset) -> Result<SpectrumCompare> {
    if data.x.cols() != 1 || data.y.cols() != 1 {
        return Err(Error::Param(format!(
            "spectrum comparison needs scalar inputs and targets, got {} x {} columns",
            data.x.cols(),
            data.y.cols()
        )));
    }
    if net.d_in() != 1 || net.d_out() != 1 {
        return Err(Error::Param(format!(
            "spectrum comparison needs a scalar model, got {} -> {}",
            net.d_in(),
            net.d_out()
        )));
    }
    if data.n() < 2 {
        return Err(Error::Param(format!(
            "spectrum comparison needs at least 2 samples, got {}",
            data.n()
        )));
    }
    let xs: Vec<f64> = (0..data.n()).map(|r| data.x.get(r, 0)).collect();
    let step = uniform_spacing(&xs)?;

    let preds = net.predict(&data.x)?;
    let model_signal: Vec<f64> = (0..data.n()).map(|r| preds.get(r, 0)).collect();
    let truth_signal: Vec<f64> = (0..data.n()).map(|r| data.y.get(r, 0)).collect();

    let model = dft_magnitude(&model_signal, step)?;
    let truth = dft_magnitude(&truth_signal, step)?;
    let peak_bin_model = model.peak_bin();
    let peak_bin_truth = truth.peak_bin();
    Ok(SpectrumCompare {
        model,
        truth,
        peak_bin_model,
        peak_bin_truth,
        peak_match: peak_bin_model == peak_bin_truth,
    })
}

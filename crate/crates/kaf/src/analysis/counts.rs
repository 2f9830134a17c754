use crate::error::{Error, Result};
use crate::layers::{KafLayer, KanLayer, Layer, MlpActivation, MlpLayer, Network};
use crate::numerics::RngState;

/// Layer family plus the hyperparameters that enter the accounting formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFamily {
    /// Fourier-feature layer with `m` frequencies per input dimension.
    Kaf { m: usize },
    /// B-spline layer with grid size `g` and degree `k`.
    Kan { g: usize, k: usize },
    /// Dense layer.
    Mlp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerDims {
    pub d_in: usize,
    pub d_out: usize,
}

/// Parameter/FLOP accounting for one layer, in two columns: the closed-form
/// accounting formulas, and the exact count enumerated from a freshly
/// constructed layer's tensors.
///
/// The two deliberately disagree for some families:
/// - The KAF closed form treats the Fourier mixing matrix as folded into the
///   output projection, so the constructed layer carries `2 * d_in * m` more.
/// - The KAN closed form allots `g + k + 3` parameters per edge plus an
///   output bias, while the constructed layer has `g + k` spline coefficients
///   plus two path weights per edge and no bias: a difference of
///   `d_in * d_out + d_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    pub family: ModelFamily,
    pub dims: LayerDims,
    pub params_formula: usize,
    pub params_actual: usize,
    pub flops_formula: f64,
}

fn validate(family: ModelFamily, dims: LayerDims) -> Result<()> {
    if dims.d_in < 1 || dims.d_out < 1 {
        return Err(Error::Param(format!(
            "dims must be positive, got {} x {}",
            dims.d_in, dims.d_out
        )));
    }
    match family {
        ModelFamily::Kaf { m } if m < 1 => {
            Err(Error::Param("m must be >= 1".into()))
        }
        ModelFamily::Kan { g, k } if g < 1 || k < 1 => {
            Err(Error::Param("g and k must be >= 1".into()))
        }
        _ => Ok(()),
    }
}

/// Closed-form parameter count.
pub fn params_formula(family: ModelFamily, dims: LayerDims) -> Result<usize> {
    validate(family, dims)?;
    let (din, dout) = (dims.d_in, dims.d_out);
    Ok(match family {
        ModelFamily::Kaf { m } => din * m + m + 2 * din + din * dout + dout,
        ModelFamily::Kan { g, k } => din * dout * (g + k + 3) + dout,
        ModelFamily::Mlp => din * dout + dout,
    })
}

/// Closed-form forward FLOPs per input row.
pub fn count_flops(family: ModelFamily, dims: LayerDims) -> Result<f64> {
    validate(family, dims)?;
    let din = dims.d_in as f64;
    let dout = dims.d_out as f64;
    Ok(match family {
        ModelFamily::Kaf { m } => {
            4.0 * din * m as f64 + 2.0 * din + 2.0 * din * dout + 5.0 * din
        }
        ModelFamily::Kan { g, k } => {
            let (g, k) = (g as f64, k as f64);
            7.0 * din + din * dout * (9.0 * k * (g + 1.5 * k) + 2.0 * g - 2.5 * k + 3.0)
        }
        ModelFamily::Mlp => 2.0 * din * dout + 5.0 * dout,
    })
}

/// Constructs the layer and sums its tensor sizes — the ground truth the
/// formulas are compared against.
pub fn params_actual(family: ModelFamily, dims: LayerDims) -> Result<usize> {
    validate(family, dims)?;
    let mut rng = RngState::new(0); // values are irrelevant to counting
    let layer = match family {
        ModelFamily::Kaf { m } => {
            Layer::Kaf(KafLayer::init(dims.d_in, dims.d_out, m, 1.0, &mut rng)?)
        }
        ModelFamily::Kan { g, k } => Layer::Kan(KanLayer::init(
            dims.d_in,
            dims.d_out,
            g,
            k,
            (-1.0, 1.0),
            &mut rng,
        )?),
        ModelFamily::Mlp => Layer::Mlp(MlpLayer::init(
            dims.d_in,
            dims.d_out,
            MlpActivation::Gelu,
            &mut rng,
        )?),
    };
    let net = Network::new(vec![layer])?;
    Ok(net.tensor_blocks().iter().map(|b| b.3.len()).sum())
}

/// Full accounting report for one layer.
pub fn count_params(family: ModelFamily, dims: LayerDims) -> Result<CountReport> {
    Ok(CountReport {
        family,
        dims,
        params_formula: params_formula(family, dims)?,
        params_actual: params_actual(family, dims)?,
        flops_formula: count_flops(family, dims)?,
    })
}

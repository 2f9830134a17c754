use crate::error::{Error, Result};
use crate::layers::kaf::{KafCache, KafGrads, KafLayer};
use crate::layers::kan::{KanCache, KanGrads, KanLayer};
use crate::layers::mlp::{MlpActivation, MlpCache, MlpGrads, MlpLayer};
use crate::numerics::{Matrix, RngState};

/// One layer of a [`Network`].
#[derive(Debug, Clone)]
pub enum Layer {
    Kaf(KafLayer),
    Kan(KanLayer),
    Mlp(MlpLayer),
}

#[derive(Debug, Clone)]
pub enum LayerCache {
    Kaf(KafCache),
    Kan(KanCache),
    Mlp(MlpCache),
}

#[derive(Debug, Clone)]
pub enum LayerGrads {
    Kaf(KafGrads),
    Kan(KanGrads),
    Mlp(MlpGrads),
}

impl Layer {
    pub fn d_in(&self) -> usize {
        match self {
            Layer::Kaf(l) => l.d_in,
            Layer::Kan(l) => l.d_in,
            Layer::Mlp(l) => l.d_in,
        }
    }

    pub fn d_out(&self) -> usize {
        match self {
            Layer::Kaf(l) => l.d_out,
            Layer::Kan(l) => l.d_out,
            Layer::Mlp(l) => l.d_out,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Layer::Kaf(_) => "kaf",
            Layer::Kan(_) => "kan",
            Layer::Mlp(_) => "mlp",
        }
    }

    /// Total parameter count, counting frozen tensors too.
    pub fn param_count_total(&self) -> usize {
        match self {
            Layer::Kaf(l) => l.param_count(),
            Layer::Kan(l) => l.param_count(),
            Layer::Mlp(l) => l.param_count(),
        }
    }
}

/// A stack of layers with matching inner dimensions.
///
/// The network exposes its trainable parameters and their gradients as two
/// slice lists in one canonical order, so the optimizer never needs to know
/// which layer kinds it is updating. Frozen tensors (the KAF scales under
/// `disable_scales`) are omitted from both lists but kept in checkpoints.
#[derive(Debug, Clone)]
pub struct Network {
    pub layers: Vec<Layer>,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Param("a network needs at least one layer".into()));
        }
        for w in layers.windows(2) {
            if w[0].d_out() != w[1].d_in() {
                return Err(Error::Param(format!(
                    "layer output dim {} does not feed layer input dim {}",
                    w[0].d_out(),
                    w[1].d_in()
                )));
            }
        }
        Ok(Network { layers })
    }

    /// Uniform KAF stack through `dims` (e.g. `[2, 16, 1]` gives two layers).
    pub fn kaf(dims: &[usize], m: usize, sigma_f: f64, rng: &mut RngState) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Param("dims must list input and output sizes".into()));
        }
        let mut layers = Vec::new();
        for w in dims.windows(2) {
            layers.push(Layer::Kaf(KafLayer::init(w[0], w[1], m, sigma_f, rng)?));
        }
        Network::new(layers)
    }

    /// Uniform B-spline stack through `dims`.
    pub fn kan(
        dims: &[usize],
        g: usize,
        k: usize,
        grid_range: (f64, f64),
        rng: &mut RngState,
    ) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Param("dims must list input and output sizes".into()));
        }
        let mut layers = Vec::new();
        for w in dims.windows(2) {
            layers.push(Layer::Kan(KanLayer::init(w[0], w[1], g, k, grid_range, rng)?));
        }
        Network::new(layers)
    }

    /// Dense stack through `dims`; hidden layers use `hidden_act`, the final
    /// layer is affine.
    pub fn mlp(dims: &[usize], hidden_act: MlpActivation, rng: &mut RngState) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Param("dims must list input and output sizes".into()));
        }
        let mut layers = Vec::new();
        for (idx, w) in dims.windows(2).enumerate() {
            let act = if idx + 2 == dims.len() {
                MlpActivation::Identity
            } else {
                hidden_act
            };
            layers.push(Layer::Mlp(MlpLayer::init(w[0], w[1], act, rng)?));
        }
        Network::new(layers)
    }

    pub fn d_in(&self) -> usize {
        self.layers[0].d_in()
    }

    pub fn d_out(&self) -> usize {
        self.layers[self.layers.len() - 1].d_out()
    }

    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, Vec<LayerCache>)> {
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut h = x.clone();
        for layer in &self.layers {
            let (next, cache) = match layer {
                Layer::Kaf(l) => {
                    let (h2, c) = l.forward(&h)?;
                    (h2, LayerCache::Kaf(c))
                }
                Layer::Kan(l) => {
                    let (h2, c) = l.forward(&h)?;
                    (h2, LayerCache::Kan(c))
                }
                Layer::Mlp(l) => {
                    let (h2, c) = l.forward(&h)?;
                    (h2, LayerCache::Mlp(c))
                }
            };
            h = next;
            caches.push(cache);
        }
        Ok((h, caches))
    }

    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        Ok(self.forward(x)?.0)
    }

    /// Backpropagates `d_out` through the cached pass; returns per-layer
    /// gradients (front-to-back order) and dL/dx.
    pub fn backward(&self, caches: &[LayerCache], d_out: &Matrix) -> Result<(Vec<LayerGrads>, Matrix)> {
        if caches.len() != self.layers.len() {
            return Err(Error::Contract(format!(
                "{} caches for {} layers",
                caches.len(),
                self.layers.len()
            )));
        }
        let mut grads: Vec<LayerGrads> = Vec::with_capacity(self.layers.len());
        let mut d = d_out.clone();
        for (layer, cache) in self.layers.iter().zip(caches).rev() {
            let (g, dx) = match (layer, cache) {
                (Layer::Kaf(l), LayerCache::Kaf(c)) => {
                    let (g, dx) = l.backward(c, &d)?;
                    (LayerGrads::Kaf(g), dx)
                }
                (Layer::Kan(l), LayerCache::Kan(c)) => {
                    let (g, dx) = l.backward(c, &d)?;
                    (LayerGrads::Kan(g), dx)
                }
                (Layer::Mlp(l), LayerCache::Mlp(c)) => {
                    let (g, dx) = l.backward(c, &d)?;
                    (LayerGrads::Mlp(g), dx)
                }
                _ => {
                    return Err(Error::Contract(
                        "cache kind does not match layer kind".into(),
                    ))
                }
            };
            d = dx;
            grads.push(g);
        }
        grads.reverse();
        Ok((grads, d))
    }

    /// Mutable views of every trainable tensor, in canonical order:
    /// per layer front-to-back, KAF = w_freq, theta, v, (a, b unless frozen),
    /// w_out, c; KAN = coeffs, w_h, w_s; MLP = w, bias.
    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for layer in &mut self.layers {
            match layer {
                Layer::Kaf(l) => {
                    let train_scales = !l.disable_scales;
                    out.push(l.w_freq.as_mut_slice());
                    out.push(&mut l.theta);
                    out.push(l.v.as_mut_slice());
                    if train_scales {
                        out.push(&mut l.a);
                        out.push(&mut l.b);
                    }
                    out.push(l.w_out.as_mut_slice());
                    out.push(&mut l.c);
                }
                Layer::Kan(l) => {
                    out.push(l.coeffs.as_mut_slice());
                    out.push(l.w_h.as_mut_slice());
                    out.push(l.w_s.as_mut_slice());
                }
                Layer::Mlp(l) => {
                    out.push(l.w.as_mut_slice());
                    out.push(&mut l.bias);
                }
            }
        }
        out
    }

    /// Gradient views aligned one-to-one with [`Network::param_slices_mut`].
    /// The same freeze rules are applied here so the two lists always zip.
    pub fn grad_slices<'a>(&self, grads: &'a [LayerGrads]) -> Result<Vec<&'a [f64]>> {
        if grads.len() != self.layers.len() {
            return Err(Error::Contract(format!(
                "{} gradient sets for {} layers",
                grads.len(),
                self.layers.len()
            )));
        }
        let mut out: Vec<&'a [f64]> = Vec::new();
        for (layer, grad) in self.layers.iter().zip(grads) {
            match (layer, grad) {
                (Layer::Kaf(l), LayerGrads::Kaf(g)) => {
                    out.push(g.w_freq.as_slice());
                    out.push(&g.theta);
                    out.push(g.v.as_slice());
                    if !l.disable_scales {
                        out.push(&g.a);
                        out.push(&g.b);
                    }
                    out.push(g.w_out.as_slice());
                    out.push(&g.c);
                }
                (Layer::Kan(_), LayerGrads::Kan(g)) => {
                    out.push(g.coeffs.as_slice());
                    out.push(g.w_h.as_slice());
                    out.push(g.w_s.as_slice());
                }
                (Layer::Mlp(_), LayerGrads::Mlp(g)) => {
                    out.push(g.w.as_slice());
                    out.push(&g.bias);
                }
                _ => {
                    return Err(Error::Contract(
                        "gradient kind does not match layer kind".into(),
                    ))
                }
            }
        }
        Ok(out)
    }

    /// Applies the per-layer frequency-gradient clip (KAF layers only).
    pub fn clip_freq_grads(&self, grads: &mut [LayerGrads], tau: f64) {
        for g in grads {
            if let LayerGrads::Kaf(g) = g {
                g.clip_w_freq(tau);
            }
        }
    }

    /// Total parameter count including frozen tensors.
    pub fn param_count_total(&self) -> usize {
        self.layers.iter().map(|l| l.param_count_total()).sum()
    }

    /// Parameters the optimizer actually updates.
    pub fn param_count_trainable(&mut self) -> usize {
        self.param_slices_mut().iter().map(|s| s.len()).sum()
    }

    /// Mean |a| and mean |b| across all KAF layers, if any exist.
    pub fn kaf_scale_means(&self) -> Option<(f64, f64)> {
        let mut sum_a = 0.0;
        let mut sum_b = 0.0;
        let mut count = 0usize;
        for layer in &self.layers {
            if let Layer::Kaf(l) = layer {
                sum_a += l.a.iter().map(|v| v.abs()).sum::<f64>();
                sum_b += l.b.iter().map(|v| v.abs()).sum::<f64>();
                count += l.a.len();
            }
        }
        if count == 0 {
            None
        } else {
            Some((sum_a / count as f64, sum_b / count as f64))
        }
    }

    /// Named tensor blocks for checkpointing: every tensor of every layer
    /// (frozen ones included), as `(name, rows, cols, values)`. Vectors are
    /// written as one row.
    pub fn tensor_blocks(&self) -> Vec<(String, usize, usize, Vec<f64>)> {
        let mut out = Vec::new();
        for (idx, layer) in self.layers.iter().enumerate() {
            let name = |t: &str| format!("layer{idx}.{t}");
            match layer {
                Layer::Kaf(l) => {
                    out.push((name("w_freq"), l.w_freq.rows(), l.w_freq.cols(), l.w_freq.as_slice().to_vec()));
                    out.push((name("theta"), 1, l.theta.len(), l.theta.clone()));
                    out.push((name("v"), l.v.rows(), l.v.cols(), l.v.as_slice().to_vec()));
                    out.push((name("a"), 1, l.a.len(), l.a.clone()));
                    out.push((name("b"), 1, l.b.len(), l.b.clone()));
                    out.push((name("w_out"), l.w_out.rows(), l.w_out.cols(), l.w_out.as_slice().to_vec()));
                    out.push((name("c"), 1, l.c.len(), l.c.clone()));
                }
                Layer::Kan(l) => {
                    out.push((name("coeffs"), l.coeffs.rows(), l.coeffs.cols(), l.coeffs.as_slice().to_vec()));
                    out.push((name("w_h"), l.w_h.rows(), l.w_h.cols(), l.w_h.as_slice().to_vec()));
                    out.push((name("w_s"), l.w_s.rows(), l.w_s.cols(), l.w_s.as_slice().to_vec()));
                }
                Layer::Mlp(l) => {
                    out.push((name("w"), l.w.rows(), l.w.cols(), l.w.as_slice().to_vec()));
                    out.push((name("bias"), 1, l.bias.len(), l.bias.clone()));
                }
            }
        }
        out
    }

    /// Writes one named tensor back into the network (checkpoint loading).
    /// The layer index, tensor name, and shape must all match the structure.
    pub fn load_tensor(&mut self, name: &str, rows: usize, cols: usize, data: &[f64]) -> Result<()> {
        let bad = |msg: String| Error::Format { line: None, msg };
        let rest = name
            .strip_prefix("layer")
            .ok_or_else(|| bad(format!("tensor name '{name}' lacks the layer prefix")))?;
        let (idx_str, tensor) = rest
            .split_once('.')
            .ok_or_else(|| bad(format!("tensor name '{name}' lacks a tensor suffix")))?;
        let idx: usize = idx_str
            .parse()
            .map_err(|_| bad(format!("bad layer index in tensor name '{name}'")))?;
        let layer = self
            .layers
            .get_mut(idx)
            .ok_or_else(|| bad(format!("tensor '{name}' addresses a missing layer")))?;

        let fill = |dst: &mut [f64], want_rows: usize, want_cols: usize| -> Result<()> {
            if rows != want_rows || cols != want_cols || data.len() != dst.len() {
                return Err(Error::Format {
                    line: None,
                    msg: format!(
                        "tensor '{name}' is {rows}x{cols}, the network expects {want_rows}x{want_cols}"
                    ),
                });
            }
            dst.copy_from_slice(data);
            Ok(())
        };
        match (layer, tensor) {
            (Layer::Kaf(l), "w_freq") => {
                let (r, c) = l.w_freq.shape();
                fill(l.w_freq.as_mut_slice(), r, c)
            }
            (Layer::Kaf(l), "theta") => {
                let n = l.theta.len();
                fill(&mut l.theta, 1, n)
            }
            (Layer::Kaf(l), "v") => {
                let (r, c) = l.v.shape();
                fill(l.v.as_mut_slice(), r, c)
            }
            (Layer::Kaf(l), "a") => {
                let n = l.a.len();
                fill(&mut l.a, 1, n)
            }
            (Layer::Kaf(l), "b") => {
                let n = l.b.len();
                fill(&mut l.b, 1, n)
            }
            (Layer::Kaf(l), "w_out") => {
                let (r, c) = l.w_out.shape();
                fill(l.w_out.as_mut_slice(), r, c)
            }
            (Layer::Kaf(l), "c") => {
                let n = l.c.len();
                fill(&mut l.c, 1, n)
            }
            (Layer::Kan(l), "coeffs") => {
                let (r, c) = l.coeffs.shape();
                fill(l.coeffs.as_mut_slice(), r, c)
            }
            (Layer::Kan(l), "w_h") => {
                let (r, c) = l.w_h.shape();
                fill(l.w_h.as_mut_slice(), r, c)
            }
            (Layer::Kan(l), "w_s") => {
                let (r, c) = l.w_s.shape();
                fill(l.w_s.as_mut_slice(), r, c)
            }
            (Layer::Mlp(l), "w") => {
                let (r, c) = l.w.shape();
                fill(l.w.as_mut_slice(), r, c)
            }
            (Layer::Mlp(l), "bias") => {
                let n = l.bias.len();
                fill(&mut l.bias, 1, n)
            }
            _ => Err(Error::Format {
                line: None,
                msg: format!("tensor '{name}' does not exist in this architecture"),
            }),
        }
    }
}

/// Testing utility: compares every analytical parameter gradient and the
/// input gradient against central finite differences of the probe loss
/// `L = sum(probe .* forward(x))`, returning the worst relative error.
///
/// Relative error is `|a - f| / max(|a|, |f|, 1e-4)`; the floor keeps
/// zero-gradient entries (e.g. frozen paths) from dividing by zero while
/// still flagging any absolute disagreement above ~1e-8.
pub fn finite_difference_max_rel_error(
    net: &mut Network,
    x: &Matrix,
    probe: &Matrix,
    h: f64,
) -> Result<f64> {
    let loss = |net: &Network, x: &Matrix| -> Result<f64> {
        let y = net.predict(x)?;
        if y.shape() != probe.shape() {
            return Err(Error::Contract(format!(
                "probe is {}x{}, network output is {}x{}",
                probe.rows(),
                probe.cols(),
                y.rows(),
                y.cols()
            )));
        }
        Ok(y.as_slice().iter().zip(probe.as_slice()).map(|(&a, &b)| a * b).sum())
    };
    let rel = |a: f64, f: f64| (a - f).abs() / a.abs().max(f.abs()).max(1e-4);

    let (_, caches) = net.forward(x)?;
    let (grads, dx) = net.backward(&caches, probe)?;
    let analytic: Vec<Vec<f64>> = net
        .grad_slices(&grads)?
        .into_iter()
        .map(|s| s.to_vec())
        .collect();

    let mut worst: f64 = 0.0;
    let tensor_sizes: Vec<usize> = analytic.iter().map(|t| t.len()).collect();
    for (t, &size) in tensor_sizes.iter().enumerate() {
        for i in 0..size {
            {
                net.param_slices_mut()[t][i] += h;
            }
            let plus = loss(net, x)?;
            {
                net.param_slices_mut()[t][i] -= 2.0 * h;
            }
            let minus = loss(net, x)?;
            {
                net.param_slices_mut()[t][i] += h;
            }
            let fd = (plus - minus) / (2.0 * h);
            worst = worst.max(rel(analytic[t][i], fd));
        }
    }
    for r in 0..x.rows() {
        for c in 0..x.cols() {
            let mut plus = x.clone();
            plus.set(r, c, x.get(r, c) + h);
            let mut minus = x.clone();
            minus.set(r, c, x.get(r, c) - h);
            let fd = (loss(net, &plus)? - loss(net, &minus)?) / (2.0 * h);
            worst = worst.max(rel(dx.get(r, c), fd));
        }
    }
    Ok(worst)
}

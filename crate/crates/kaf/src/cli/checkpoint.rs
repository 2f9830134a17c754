use crate::error::{Error, Result};
use crate::layers::Network;
use std::path::Path;

/// Header line of the checkpoint text format.
pub const CHECKPOINT_HEADER: &str = "KAF-CKPT 1";

/// One serialized tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorBlock {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

/// Parsed checkpoint: a version tag plus tensor blocks in network order.
///
/// The on-disk format is line-oriented text: the header, then per tensor a
/// `name rows cols` line followed by `rows` lines of `cols` hexadecimal
/// floats. Hex floats are lossless, so save -> load reproduces every tensor
/// bit-exactly while staying diffable and platform-independent.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub version: u32,
    pub tensors: Vec<TensorBlock>,
}

/// Formats `v` as a C-style hexadecimal float (`-0x1.8p+1`), losslessly.
/// Subnormals keep a leading `0x0.` digit; signed zeros keep their sign.
pub fn format_hex_f64(v: f64) -> String {
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7FF) as i64;
    let mant = bits & 0x000F_FFFF_FFFF_FFFF;
    if exp_bits == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 {
        (0, -1022) // subnormal
    } else {
        (1, exp_bits - 1023)
    };
    let mut frac = format!("{mant:013x}");
    while frac.ends_with('0') {
        frac.pop();
    }
    if frac.is_empty() {
        format!("{sign}0x{lead}p{exp:+}")
    } else {
        format!("{sign}0x{lead}.{frac}p{exp:+}")
    }
}

/// Parses a C-style hexadecimal float. Exact for anything this crate emits;
/// foreign input with more than 53 significant bits rounds to nearest/even.
pub fn parse_hex_f64(s: &str) -> Result<f64> {
    let fail = || Error::Param(format!("malformed hex float `{s}`"));
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let t = t
        .strip_prefix("0x")
        .or_else(|| t.strip_prefix("0X"))
        .ok_or_else(fail)?;
    let (mant_str, exp_str) = t.split_once(['p', 'P']).ok_or_else(fail)?;
    let exp: i64 = exp_str.parse().map_err(|_| fail())?;
    let (int_str, frac_str) = mant_str.split_once('.').unwrap_or((mant_str, ""));
    if int_str.is_empty() && frac_str.is_empty() {
        return Err(fail());
    }
    let mut val: u128 = 0;
    for c in int_str.chars().chain(frac_str.chars()) {
        let d = c.to_digit(16).ok_or_else(fail)?;
        val = val
            .checked_mul(16)
            .and_then(|v| v.checked_add(d as u128))
            .ok_or_else(|| Error::Param(format!("hex float `{s}` has too many digits")))?;
    }
    let e = exp - 4 * frac_str.len() as i64;
    bits_to_f64(val, e, neg)
}

/// `(-1)^neg * val * 2^e` rounded to nearest/even, without intermediate
/// under/overflow.
fn bits_to_f64(mut val: u128, mut e: i64, neg: bool) -> Result<f64> {
    let signed = |x: f64| if neg { -x } else { x };
    if val == 0 {
        return Ok(signed(0.0));
    }
    let tz = val.trailing_zeros();
    val >>= tz;
    e += tz as i64;
    let sig_bits = 128 - val.leading_zeros() as i64;
    if sig_bits > 53 {
        let excess = (sig_bits - 53) as u32;
        let round = (val >> (excess - 1)) & 1 == 1;
        let sticky = excess > 1 && val & ((1u128 << (excess - 1)) - 1) != 0;
        val >>= excess;
        e += excess as i64;
        if round && (sticky || val & 1 == 1) {
            val += 1;
        }
    }
    let mut x = val as f64; // exact: val < 2^54
    // Scale by 2^e in power-of-two steps; each step is exact except possibly
    // the final one, which performs the single correct rounding into the
    // subnormal range.
    while e > 1023 {
        x *= 2f64.powi(1023);
        e -= 1023;
        if x.is_infinite() {
            return Err(Error::Param("hex float overflows f64".into()));
        }
    }
    while e < -1022 {
        x *= 2f64.powi(-1022);
        e += 1022;
    }
    x *= 2f64.powi(e as i32);
    if x.is_infinite() {
        return Err(Error::Param("hex float overflows f64".into()));
    }
    Ok(signed(x))
}

impl Checkpoint {
    /// Snapshots every tensor of the network.
    pub fn from_network(net: &Network) -> Checkpoint {
        let tensors = net
            .tensor_blocks()
            .into_iter()
            .map(|(name, rows, cols, values)| TensorBlock { name, rows, cols, values })
            .collect();
        Checkpoint { version: 1, tensors }
    }

    /// Loads every tensor into `net`, which must have been constructed with
    /// the same architecture. Block count and per-tensor shapes must match.
    pub fn apply_to(&self, net: &mut Network) -> Result<()> {
        let expected = net.tensor_blocks().len();
        if self.tensors.len() != expected {
            return Err(Error::Data(format!(
                "checkpoint has {} tensors, model expects {expected}",
                self.tensors.len()
            )));
        }
        for t in &self.tensors {
            net.load_tensor(&t.name, t.rows, t.cols, &t.values)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> Result<String> {
        let mut out = String::from(CHECKPOINT_HEADER);
        out.push('\n');
        for t in &self.tensors {
            out.push_str(&format!("{} {} {}\n", t.name, t.rows, t.cols));
            for r in 0..t.rows {
                let row = &t.values[r * t.cols..(r + 1) * t.cols];
                for (j, v) in row.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(Error::NonFinite { op: "checkpoint save" });
                    }
                    if j > 0 {
                        out.push(' ');
                    }
                    out.push_str(&format_hex_f64(*v));
                }
                out.push('\n');
            }
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Checkpoint> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Format {
            line: Some(1),
            msg: "empty checkpoint".into(),
        })?;
        if header.trim() != CHECKPOINT_HEADER {
            return Err(Error::Format {
                line: Some(1),
                msg: format!("expected header `{CHECKPOINT_HEADER}`, got `{header}`"),
            });
        }
        let mut tensors = Vec::new();
        while let Some((idx, raw)) = lines.next() {
            let line_no = idx + 1;
            let head = raw.trim();
            if head.is_empty() {
                continue; // tolerate a trailing newline
            }
            let parts: Vec<&str> = head.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Format {
                    line: Some(line_no),
                    msg: format!("expected `name rows cols`, got `{head}`"),
                });
            }
            let rows: usize = parts[1].parse().map_err(|_| Error::Format {
                line: Some(line_no),
                msg: format!("bad row count `{}`", parts[1]),
            })?;
            let cols: usize = parts[2].parse().map_err(|_| Error::Format {
                line: Some(line_no),
                msg: format!("bad column count `{}`", parts[2]),
            })?;
            let mut values = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                let (idx, row) = lines.next().ok_or(Error::Format {
                    line: Some(line_no),
                    msg: format!("tensor `{}` truncated", parts[0]),
                })?;
                let row_no = idx + 1;
                let mut count = 0usize;
                for tok in row.split_whitespace() {
                    values.push(parse_hex_f64(tok).map_err(|e| Error::Format {
                        line: Some(row_no),
                        msg: e.to_string(),
                    })?);
                    count += 1;
                }
                if count != cols {
                    return Err(Error::Format {
                        line: Some(row_no),
                        msg: format!("expected {cols} values, got {count}"),
                    });
                }
            }
            tensors.push(TensorBlock {
                name: parts[0].to_string(),
                rows,
                cols,
                values,
            });
        }
        Ok(Checkpoint { version: 1, tensors })
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()?)?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Checkpoint> {
        let text = std::fs::read_to_string(path)?;
        Checkpoint::from_text(&text)
    }
}

/// Snapshots `net` into a checkpoint file.
pub fn save_checkpoint(path: &Path, net: &Network) -> Result<()> {
    Checkpoint::from_network(net).write_to(path)
}

/// Restores a checkpoint file into an architecture-compatible `net`.
pub fn load_checkpoint(path: &Path, net: &mut Network) -> Result<()> {
    Checkpoint::read_from(path)?.apply_to(net)
}

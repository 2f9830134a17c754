use crate::error::{Error, Result};

/// Adam optimizer state over a list of parameter tensors.
///
/// Moments are allocated lazily on the first step so the state can be
/// constructed before the network's slice layout is known; after that the
/// layout is locked and any mismatch is a contract error.
#[derive(Debug, Clone)]
pub struct AdamState {
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Default for AdamState {
    fn default() -> Self {
        Self::new()
    }
}

impl AdamState {
    pub fn new() -> Self {
        AdamState {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    /// Steps taken so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    /// One bias-corrected update of every tensor:
    /// `p -= lr * mhat / (sqrt(vhat) + eps)`.
    pub fn step(
        &mut self,
        params: &mut [&mut [f64]],
        grads: &[&[f64]],
        lr: f64,
    ) -> Result<()> {
        if params.len() != grads.len() {
            return Err(Error::Contract(format!(
                "{} parameter tensors but {} gradient tensors",
                params.len(),
                grads.len()
            )));
        }
        if self.m.is_empty() {
            self.m = params.iter().map(|p| vec![0.0; p.len()]).collect();
            self.v = params.iter().map(|p| vec![0.0; p.len()]).collect();
        }
        if self.m.len() != params.len() {
            return Err(Error::Contract(format!(
                "optimizer state holds {} tensors, step got {}",
                self.m.len(),
                params.len()
            )));
        }
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            if p.len() != g.len() || p.len() != m.len() {
                return Err(Error::Contract(format!(
                    "tensor length mismatch in optimizer step: param {}, grad {}, state {}",
                    p.len(),
                    g.len(),
                    m.len()
                )));
            }
            for i in 0..p.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                let mhat = m[i] / c1;
                let vhat = v[i] / c2;
                p[i] -= lr * mhat / (vhat.sqrt() + self.eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_is_signed_learning_rate() {
        // After one step, mhat = g and vhat = g^2, so the update is
        // -lr * g / (|g| + eps) ~ -lr * sign(g) for |g| >> eps.
        let mut state = AdamState::new();
        let mut p = vec![1.0, -2.0, 0.5];
        let g = vec![3.0, -4.0, 0.25];
        let mut params = [p.as_mut_slice()];
        state.step(&mut params, &[&g], 0.01).unwrap();
        assert!((p[0] - (1.0 - 0.01)).abs() < 1e-6);
        assert!((p[1] - (-2.0 + 0.01)).abs() < 1e-6);
        assert!((p[2] - (0.5 - 0.01)).abs() < 1e-6);
        assert_eq!(state.t(), 1);
    }

    #[test]
    fn two_steps_match_reference_formula() {
        // Independent scalar re-implementation of two Adam updates.
        let (b1, b2, eps, lr) = (0.9f64, 0.999f64, 1e-8, 0.1);
        let g1 = 2.0;
        let g2 = -1.0;
        let mut p_ref = 5.0;
        let mut m = 0.0;
        let mut v = 0.0;
        for (t, g) in [(1i32, g1), (2, g2)] {
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let mhat = m / (1.0 - b1.powi(t));
            let vhat = v / (1.0 - b2.powi(t));
            p_ref -= lr * mhat / (vhat.sqrt() + eps);
        }

        let mut state = AdamState::new();
        let mut p = vec![5.0];
        {
            let mut params = [p.as_mut_slice()];
            state.step(&mut params, &[&[g1][..]], lr).unwrap();
        }
        {
            let mut params = [p.as_mut_slice()];
            state.step(&mut params, &[&[g2][..]], lr).unwrap();
        }
        assert!((p[0] - p_ref).abs() < 1e-12, "{} vs {p_ref}", p[0]);
    }

    #[test]
    fn zero_learning_rate_leaves_params_untouched() {
        let mut state = AdamState::new();
        let mut p = vec![1.25, -0.75];
        let g = vec![10.0, -3.0];
        let before = p.clone();
        let mut params = [p.as_mut_slice()];
        state.step(&mut params, &[&g], 0.0).unwrap();
        assert_eq!(p, before);
    }

    #[test]
    fn layout_changes_are_rejected() {
        let mut state = AdamState::new();
        let mut p1 = vec![0.0; 3];
        {
            let mut params = [p1.as_mut_slice()];
            let g = vec![1.0; 3];
            state.step(&mut params, &[&g], 0.1).unwrap();
        }
        // Different tensor count.
        let mut a = vec![0.0; 3];
        let mut b = vec![0.0; 2];
        let ga = vec![1.0; 3];
        let gb = vec![1.0; 2];
        let mut params = [a.as_mut_slice(), b.as_mut_slice()];
        assert!(state.step(&mut params, &[&ga, &gb], 0.1).is_err());
        // Different tensor length.
        let mut long = vec![0.0; 4];
        let glong = vec![1.0; 4];
        let mut params = [long.as_mut_slice()];
        assert!(state.step(&mut params, &[&glong], 0.1).is_err());
        // Mismatched param/grad counts.
        let mut params = [p1.as_mut_slice()];
        assert!(state.step(&mut params, &[], 0.1).is_err());
    }
}

//! Scalar-valued multilayer perceptron with the nested derivatives needed to
//! train a generating function through its gradient.
//!
//! Hidden layers use `tanh`; the output layer is linear and one-dimensional.
//! Everything is batched row-wise: a batch of `N` inputs is an `N × d` array.
//!
//! Losses in this crate depend on the network only through `∇ₓS(xᵢ)`. Given
//! the loss sensitivities `vᵢ = ∂ℓ/∂(∇ₓS(xᵢ))`, the weight gradient is the
//! weight gradient of `φ = Σᵢ vᵢ·∇ₓS(xᵢ)`. That scalar is the directional
//! derivative of `S` along `vᵢ`, so a forward pass paired with a tangent pass
//! computes it, and one reverse sweep through both yields the weight gradient
//! together with the input adjoint `∇²ₓS(xᵢ) vᵢ`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Tanh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarNet {
    /// `[d, h₁, …, h_m, 1]`.
    widths: Vec<usize>,
    activation: Activation,
    seed: u64,
    /// Per layer: weights (row-major `out × in`) followed by biases.
    params: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Layer {
    w: usize,
    b: usize,
    n_in: usize,
    n_out: usize,
}

fn param_count(widths: &[usize]) -> usize {
    widths.windows(2).map(|w| w[1] * w[0] + w[1]).sum()
}

impl ScalarNet {
    /// Randomly initialized net with weights and biases drawn from
    /// `U(−1/√fan_in, 1/√fan_in)`.
    pub fn new(input_dim: usize, hidden: &[usize], seed: u64) -> Result<Self> {
        let mut net = Self::zeros(input_dim, hidden)?;
        net.seed = seed;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in net.layers() {
            let bound = 1.0 / (layer.n_in as f64).sqrt();
            for p in &mut net.params[layer.w..layer.b + layer.n_out] {
                *p = rng.random_range(-bound..bound);
            }
        }
        Ok(net)
    }

    pub fn zeros(input_dim: usize, hidden: &[usize]) -> Result<Self> {
        if input_dim == 0 || hidden.contains(&0) {
            return Err(Error::Config(format!("layer widths must be positive: input {input_dim}, hidden {hidden:?}")));
        }
        let mut widths = Vec::with_capacity(hidden.len() + 2);
        widths.push(input_dim);
        widths.extend_from_slice(hidden);
        widths.push(1);
        let n = param_count(&widths);
        Ok(ScalarNet {
            widths,
            activation: Activation::Tanh,
            seed: 0,
            params: vec![0.0; n],
        })
    }

    pub fn from_parts(widths: Vec<usize>, activation: Activation, seed: u64, params: Vec<f64>) -> Result<Self> {
        if widths.len() < 2 || widths.contains(&0) || *widths.last().unwrap() != 1 {
            return Err(Error::Config(format!("invalid architecture {widths:?}: need [input, hidden…, 1]")));
        }
        let expected = param_count(&widths);
        if params.len() != expected {
            return Err(Error::Config(format!("expected {expected} parameters for {widths:?}, got {}", params.len())));
        }
        Ok(ScalarNet { widths, activation, seed, params })
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn hidden(&self) -> &[usize] {
        &self.widths[1..self.widths.len() - 1]
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    fn layers(&self) -> Vec<Layer> {
        let mut out = Vec::with_capacity(self.widths.len() - 1);
        let mut off = 0;
        for w in self.widths.windows(2) {
            let (n_in, n_out) = (w[0], w[1]);
            out.push(Layer { w: off, b: off + n_in * n_out, n_in, n_out });
            off += n_in * n_out + n_out;
        }
        out
    }

    fn weight(&self, l: &Layer) -> ArrayView2<'_, f64> {
        ArrayView2::from_shape((l.n_out, l.n_in), &self.params[l.w..l.b]).expect("layer shape")
    }

    fn bias(&self, l: &Layer) -> ArrayView1<'_, f64> {
        ArrayView1::from(&self.params[l.b..l.b + l.n_out])
    }

    fn check_input(&self, xs: &ArrayView2<f64>) -> Result<()> {
        if xs.ncols() != self.input_dim() {
            return Err(Error::InvalidInput(format!("expected {} input columns, got {}", self.input_dim(), xs.ncols())));
        }
        Ok(())
    }

    /// Activations `[A₀ = X, A₁, …, A_m]` of the hidden layers.
    fn forward(&self, xs: &ArrayView2<f64>) -> Vec<Array2<f64>> {
        let layers = self.layers();
        let mut acts = Vec::with_capacity(layers.len());
        acts.push(xs.to_owned());
        for l in &layers[..layers.len() - 1] {
            let mut z = acts.last().unwrap().dot(&self.weight(l).t());
            z += &self.bias(l);
            z.mapv_inplace(f64::tanh);
            acts.push(z);
        }
        acts
    }

    /// `S` for each row.
    pub fn value_batch(&self, xs: &ArrayView2<f64>) -> Result<Array1<f64>> {
        self.check_input(xs)?;
        let acts = self.forward(xs);
        let out = self.layers()[self.widths.len() - 2];
        let mut s = acts.last().unwrap().dot(&self.weight(&out).row(0));
        s += self.params[out.b];
        Ok(s)
    }

    /// `∇ₓS` for each row.
    pub fn grad_batch(&self, xs: &ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_input(xs)?;
        let acts = self.forward(xs);
        Ok(self.input_grad_from(&acts))
    }

    fn input_grad_from(&self, acts: &[Array2<f64>]) -> Array2<f64> {
        let layers = self.layers();
        let n = acts[0].nrows();
        let out = layers.last().unwrap();
        let mut g = self.weight(out).row(0).broadcast((n, out.n_in)).unwrap().to_owned();
        for (l, layer) in layers[..layers.len() - 1].iter().enumerate().rev() {
            let a = &acts[l + 1];
            g.zip_mut_with(a, |gi, ai| *gi *= 1.0 - ai * ai);
            g = g.dot(&self.weight(layer));
        }
        g
    }

    /// `(S, ∇ₓS)` at one point.
    pub fn eval(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let xs = ArrayView2::from_shape((1, x.len()), x).map_err(|e| Error::InvalidInput(e.to_string()))?;
        self.check_input(&xs)?;
        let acts = self.forward(&xs);
        let out = self.layers()[self.widths.len() - 2];
        let s = acts.last().unwrap().row(0).dot(&self.weight(&out).row(0)) + self.params[out.b];
        let g = self.input_grad_from(&acts);
        Ok((s, g.row(0).to_vec()))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.eval(x)?.1)
    }

    /// Weight gradient of `Σᵢ cᵢ S(xᵢ)`.
    pub fn value_param_grad(&self, xs: &ArrayView2<f64>, c: &ArrayView1<f64>) -> Result<Vec<f64>> {
        self.check_input(xs)?;
        let layers = self.layers();
        let acts = self.forward(xs);
        let mut grad = vec![0.0; self.params.len()];
        let out = layers.last().unwrap();
        let top = acts.last().unwrap();
        grad[out.w..out.b].copy_from_slice(top.t().dot(c).as_slice().unwrap());
        grad[out.b] = c.sum();
        let mut abar = c.to_owned().insert_axis(Axis(1)).dot(&self.weight(out));
        for (l, layer) in layers[..layers.len() - 1].iter().enumerate().rev() {
            let a = &acts[l + 1];
            abar.zip_mut_with(a, |g, ai| *g *= 1.0 - ai * ai);
            let dw = abar.t().dot(&acts[l]);
            grad[layer.w..layer.b].copy_from_slice(dw.as_standard_layout().as_slice().unwrap());
            let db = abar.sum_axis(Axis(0));
            grad[layer.b..layer.b + layer.n_out].copy_from_slice(db.as_slice().unwrap());
            if l > 0 {
                abar = abar.dot(&self.weight(layer));
            }
        }
        Ok(grad)
    }

    /// Weight gradient of `φ = Σᵢ vᵢ·∇ₓS(xᵢ)` and the per-row input adjoint
    /// `∂φ/∂xᵢ = ∇²ₓS(xᵢ) vᵢ`.
    pub fn grad_backward(&self, xs: &ArrayView2<f64>, vs: &ArrayView2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
        self.check_input(xs)?;
        if vs.dim() != xs.dim() {
            return Err(Error::InvalidInput(format!("sensitivity shape {:?} does not match input shape {:?}", vs.dim(), xs.dim())));
        }
        let layers = self.layers();
        let hidden = &layers[..layers.len() - 1];
        let acts = self.forward(xs);
        // Tangent pass along vᵢ: Tₗ = ∂Aₗ/∂x · v, Żₗ = pre-activation tangent.
        let mut tangents = Vec::with_capacity(layers.len());
        let mut zdots = Vec::with_capacity(hidden.len());
        tangents.push(vs.to_owned());
        for (l, layer) in hidden.iter().enumerate() {
            let zdot = tangents[l].dot(&self.weight(layer).t());
            let mut t = zdot.clone();
            t.zip_mut_with(&acts[l + 1], |ti, ai| *ti *= 1.0 - ai * ai);
            zdots.push(zdot);
            tangents.push(t);
        }

        let mut grad = vec![0.0; self.params.len()];
        let out = layers.last().unwrap();
        let n = xs.nrows();
        // φ = Σ T_m · w_out, independent of the output bias.
        let dw_out = tangents.last().unwrap().sum_axis(Axis(0));
        grad[out.w..out.b].copy_from_slice(dw_out.as_slice().unwrap());
        let mut tbar = self.weight(out).row(0).broadcast((n, out.n_in)).unwrap().to_owned();
        let mut abar = Array2::<f64>::zeros((n, out.n_in));
        for (l, layer) in hidden.iter().enumerate().rev() {
            let a = &acts[l + 1];
            let mut zdot_bar = tbar.clone();
            let mut z_bar = abar;
            ndarray::Zip::from(&mut zdot_bar)
                .and(&mut z_bar)
                .and(&tbar)
                .and(a)
                .and(&zdots[l])
                .for_each(|zdb, zb, &tb, &ai, &zd| {
                    let s1 = 1.0 - ai * ai;
                    let s2 = -2.0 * ai * s1;
                    *zdb = s1 * tb;
                    *zb = s2 * zd * tb + s1 * *zb;
                });
            let dw = zdot_bar.t().dot(&tangents[l]) + z_bar.t().dot(&acts[l]);
            grad[layer.w..layer.b].copy_from_slice(dw.as_standard_layout().as_slice().unwrap());
            let db = z_bar.sum_axis(Axis(0));
            grad[layer.b..layer.b + layer.n_out].copy_from_slice(db.as_slice().unwrap());
            let w = self.weight(layer);
            tbar = zdot_bar.dot(&w);
            abar = z_bar.dot(&w);
        }
        Ok((grad, abar))
    }

    /// `∇²ₓS` at one point.
    pub fn hessian(&self, x: &[f64]) -> Result<Array2<f64>> {
        let d = self.input_dim();
        if x.len() != d {
            return Err(Error::InvalidInput(format!("expected {d} inputs, got {}", x.len())));
        }
        let xs = Array2::from_shape_fn((d, d), |(_, j)| x[j]);
        let vs = Array2::<f64>::eye(d);
        let (_, h) = self.grad_backward(&xs.view(), &vs.view())?;
        Ok(h)
    }

    /// `(∂S/∂W, ∂(∇ₓS)/∂W)` at one point; the second has one row per input
    /// coordinate.
    pub fn param_grads(&self, x: &[f64]) -> Result<(Vec<f64>, Array2<f64>)> {
        let d = self.input_dim();
        let xs = ArrayView2::from_shape((1, x.len()), x).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let ds = self.value_param_grad(&xs, &ndarray::arr1(&[1.0]).view())?;
        let mut jac = Array2::zeros((d, self.params.len()));
        for i in 0..d {
            let mut v = Array2::zeros((1, d));
            v[(0, i)] = 1.0;
            let (g, _) = self.grad_backward(&xs, &v.view())?;
            jac.row_mut(i).assign(&ArrayView1::from(&g));
        }
        Ok((ds, jac))
    }
}

//! Simple recurrent network (Elman): logistic units, a context layer that
//! holds a copy of the previous hidden state, and truncated gradient
//! training in which the context is treated as a constant input (no
//! unrolling through time).
//!
//! The model file format is line-oriented text: a `SRN n_in n_hid n_out`
//! header, then each weight matrix row-major and each bias vector under
//! the section headers `W_IH`, `W_CH`, `W_HO`, `B_H`, `B_O`.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::SrnError;

/// Context units are set to this value at every utterance boundary.
pub const CONTEXT_RESET: f64 = 0.5;

// Keeps sigmoid outputs strictly inside (0,1) in f64: beyond |36| the
// exponential underflows and the output would round to exactly 0 or 1.
const SIGMOID_CLAMP: f64 = 36.0;

fn sigmoid(x: f64) -> f64 {
    let x = x.clamp(-SIGMOID_CLAMP, SIGMOID_CLAMP);
    1.0 / (1.0 + (-x).exp())
}

/// Training hyperparameters. The defaults converge on the bundled corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub seed: u64,
    pub init_scale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.25,
            momentum: 0.9,
            epochs: 200,
            seed: 1,
            init_scale: 0.3,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), SrnError> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(SrnError::BadConfig {
                msg: format!(
                    "learning rate must be non-negative, got {}",
                    self.learning_rate
                ),
            });
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(SrnError::BadConfig {
                msg: format!("momentum must be in [0,1), got {}", self.momentum),
            });
        }
        if self.epochs == 0 {
            return Err(SrnError::BadConfig {
                msg: "epochs must be positive".to_string(),
            });
        }
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return Err(SrnError::BadConfig {
                msg: format!("init scale must be positive, got {}", self.init_scale),
            });
        }
        Ok(())
    }
}

/// Weights, biases, layer sizes, and the recurrent context of one Elman
/// network. A model instance is single-writer: both `forward` and
/// training mutate the context. Clone for read-only inference.
#[derive(Debug, Clone, PartialEq)]
pub struct SrnModel {
    n_in: usize,
    n_hid: usize,
    n_out: usize,
    w_ih: Vec<f64>, // n_hid x n_in, row-major
    w_ch: Vec<f64>, // n_hid x n_hid
    w_ho: Vec<f64>, // n_out x n_hid
    b_h: Vec<f64>,
    b_o: Vec<f64>,
    context: Vec<f64>,
}

/// Per-parameter gradients of the one-step loss, in model layout.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub w_ih: Vec<f64>,
    pub w_ch: Vec<f64>,
    pub w_ho: Vec<f64>,
    pub b_h: Vec<f64>,
    pub b_o: Vec<f64>,
}

impl Gradients {
    fn zeros(model: &SrnModel) -> Self {
        Self {
            w_ih: vec![0.0; model.w_ih.len()],
            w_ch: vec![0.0; model.w_ch.len()],
            w_ho: vec![0.0; model.w_ho.len()],
            b_h: vec![0.0; model.b_h.len()],
            b_o: vec![0.0; model.b_o.len()],
        }
    }

    /// Flattened view in the same order as [`SrnModel::param`].
    pub fn flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(
            self.w_ih.len() + self.w_ch.len() + self.w_ho.len() + self.b_h.len() + self.b_o.len(),
        );
        v.extend_from_slice(&self.w_ih);
        v.extend_from_slice(&self.w_ch);
        v.extend_from_slice(&self.w_ho);
        v.extend_from_slice(&self.b_h);
        v.extend_from_slice(&self.b_o);
        v
    }
}

impl SrnModel {
    /// A model with every weight and bias zero and the context reset.
    pub fn zeros(n_in: usize, n_hid: usize, n_out: usize) -> Self {
        Self {
            n_in,
            n_hid,
            n_out,
            w_ih: vec![0.0; n_hid * n_in],
            w_ch: vec![0.0; n_hid * n_hid],
            w_ho: vec![0.0; n_out * n_hid],
            b_h: vec![0.0; n_hid],
            b_o: vec![0.0; n_out],
            context: vec![CONTEXT_RESET; n_hid],
        }
    }

    /// Seeded uniform initialization in `[-init_scale, +init_scale]`.
    /// The same seed always produces the same model.
    pub fn new_random(n_in: usize, n_hid: usize, n_out: usize, config: &TrainConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let s = config.init_scale;
        let mut model = Self::zeros(n_in, n_hid, n_out);
        for w in model
            .w_ih
            .iter_mut()
            .chain(model.w_ch.iter_mut())
            .chain(model.w_ho.iter_mut())
            .chain(model.b_h.iter_mut())
            .chain(model.b_o.iter_mut())
        {
            *w = rng.random_range(-s..=s);
        }
        model
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_hid(&self) -> usize {
        self.n_hid
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn context(&self) -> &[f64] {
        &self.context
    }

    fn check_input(&self, input: &[f64]) -> Result<(), SrnError> {
        if input.len() != self.n_in {
            return Err(SrnError::InputSize {
                expected: self.n_in,
                got: input.len(),
            });
        }
        Ok(())
    }

    fn check_target(&self, target: &[f64]) -> Result<(), SrnError> {
        if target.len() != self.n_out {
            return Err(SrnError::TargetSize {
                expected: self.n_out,
                got: target.len(),
            });
        }
        Ok(())
    }

    // hidden = sigmoid(W_ih x + W_ch context + b_h), without touching state
    fn hidden(&self, input: &[f64]) -> Vec<f64> {
        let mut h = vec![0.0; self.n_hid];
        for j in 0..self.n_hid {
            let mut z = self.b_h[j];
            let row = &self.w_ih[j * self.n_in..(j + 1) * self.n_in];
            for (w, x) in row.iter().zip(input) {
                z += w * x;
            }
            let row = &self.w_ch[j * self.n_hid..(j + 1) * self.n_hid];
            for (w, c) in row.iter().zip(&self.context) {
                z += w * c;
            }
            h[j] = sigmoid(z);
        }
        h
    }

    fn output(&self, hidden: &[f64]) -> Vec<f64> {
        let mut o = vec![0.0; self.n_out];
        for k in 0..self.n_out {
            let mut z = self.b_o[k];
            let row = &self.w_ho[k * self.n_hid..(k + 1) * self.n_hid];
            for (w, h) in row.iter().zip(hidden) {
                z += w * h;
            }
            o[k] = sigmoid(z);
        }
        o
    }

    /// One step: computes the output and replaces the context with the
    /// new hidden state.
    pub fn forward(&mut self, input: &[f64]) -> Result<Vec<f64>, SrnError> {
        self.check_input(input)?;
        let hidden = self.hidden(input);
        let out = self.output(&hidden);
        self.context = hidden;
        Ok(out)
    }

    /// Like `forward` but leaves the context untouched.
    pub fn evaluate(&self, input: &[f64]) -> Result<Vec<f64>, SrnError> {
        self.check_input(input)?;
        Ok(self.output(&self.hidden(input)))
    }

    /// Sets every context unit back to the reset value. Called at every
    /// utterance boundary.
    pub fn reset_context(&mut self) {
        self.context.fill(CONTEXT_RESET);
    }

    /// One-step loss at the current context: sum of squared errors over
    /// the output units. Does not advance the context.
    pub fn step_loss(&self, input: &[f64], target: &[f64]) -> Result<f64, SrnError> {
        self.check_input(input)?;
        self.check_target(target)?;
        let out = self.output(&self.hidden(input));
        Ok(out
            .iter()
            .zip(target)
            .map(|(o, t)| (o - t) * (o - t))
            .sum())
    }

    /// Analytic gradients of the one-step loss with respect to every
    /// parameter, with the context held constant (Elman truncation).
    /// Does not advance the context.
    pub fn step_gradients(&self, input: &[f64], target: &[f64]) -> Result<Gradients, SrnError> {
        self.check_input(input)?;
        self.check_target(target)?;
        let hidden = self.hidden(input);
        let out = self.output(&hidden);
        let mut g = Gradients::zeros(self);
        self.accumulate_gradients(input, target, &hidden, &out, &mut g);
        Ok(g)
    }

    fn accumulate_gradients(
        &self,
        input: &[f64],
        target: &[f64],
        hidden: &[f64],
        out: &[f64],
        g: &mut Gradients,
    ) {
        // delta_o = dL/dz_o for L = sum (o-t)^2 with logistic units
        let delta_o: Vec<f64> = out
            .iter()
            .zip(target)
            .map(|(o, t)| 2.0 * (o - t) * o * (1.0 - o))
            .collect();
        let mut delta_h = vec![0.0; self.n_hid];
        for j in 0..self.n_hid {
            let mut back = 0.0;
            for k in 0..self.n_out {
                back += delta_o[k] * self.w_ho[k * self.n_hid + j];
            }
            delta_h[j] = back * hidden[j] * (1.0 - hidden[j]);
        }
        for k in 0..self.n_out {
            for j in 0..self.n_hid {
                g.w_ho[k * self.n_hid + j] += delta_o[k] * hidden[j];
            }
            g.b_o[k] += delta_o[k];
        }
        for j in 0..self.n_hid {
            for i in 0..self.n_in {
                g.w_ih[j * self.n_in + i] += delta_h[j] * input[i];
            }
            for m in 0..self.n_hid {
                g.w_ch[j * self.n_hid + m] += delta_h[j] * self.context[m];
            }
            g.b_h[j] += delta_h[j];
        }
    }

    /// Trains online over one sequence: the context is reset at the
    /// start, and every step runs one truncated backprop update. Momentum
    /// velocities are fresh per call. Returns the mean per-step MSE as
    /// measured during the pass.
    pub fn train_sequence(
        &mut self,
        sequence: &[(Vec<f64>, Vec<f64>)],
        config: &TrainConfig,
    ) -> Result<f64, SrnError> {
        config.validate()?;
        for (input, target) in sequence {
            self.check_input(input)?;
            self.check_target(target)?;
        }
        self.reset_context();
        let mut velocity = Gradients::zeros(self);
        let mut mse_sum = 0.0;
        for (input, target) in sequence {
            let hidden = self.hidden(input);
            let out = self.output(&hidden);
            mse_sum += out
                .iter()
                .zip(target)
                .map(|(o, t)| (o - t) * (o - t))
                .sum::<f64>()
                / self.n_out as f64;
            let mut g = Gradients::zeros(self);
            self.accumulate_gradients(input, target, &hidden, &out, &mut g);
            self.apply_update(&g, &mut velocity, config);
            self.context = hidden;
        }
        if sequence.is_empty() {
            Ok(0.0)
        } else {
            Ok(mse_sum / sequence.len() as f64)
        }
    }

    fn apply_update(&mut self, g: &Gradients, velocity: &mut Gradients, config: &TrainConfig) {
        let lr = config.learning_rate;
        let mu = config.momentum;
        let step = |w: &mut [f64], v: &mut [f64], g: &[f64]| {
            for ((w, v), g) in w.iter_mut().zip(v.iter_mut()).zip(g) {
                *v = mu * *v - lr * g;
                *w += *v;
            }
        };
        step(&mut self.w_ih, &mut velocity.w_ih, &g.w_ih);
        step(&mut self.w_ch, &mut velocity.w_ch, &g.w_ch);
        step(&mut self.w_ho, &mut velocity.w_ho, &g.w_ho);
        step(&mut self.b_h, &mut velocity.b_h, &g.b_h);
        step(&mut self.b_o, &mut velocity.b_o, &g.b_o);
    }

    /// Number of trainable parameters.
    pub fn n_params(&self) -> usize {
        self.w_ih.len() + self.w_ch.len() + self.w_ho.len() + self.b_h.len() + self.b_o.len()
    }

    /// Flat parameter access in the order w_ih, w_ch, w_ho, b_h, b_o
    /// (matrices row-major). Used by the finite-difference check.
    pub fn param(&self, index: usize) -> f64 {
        *self.param_slot(index)
    }

    pub fn param_mut(&mut self, index: usize) -> &mut f64 {
        let mut i = index;
        for slab in [
            &mut self.w_ih,
            &mut self.w_ch,
            &mut self.w_ho,
            &mut self.b_h,
            &mut self.b_o,
        ] {
            if i < slab.len() {
                return &mut slab[i];
            }
            i -= slab.len();
        }
        panic!("parameter index {index} out of range");
    }

    fn param_slot(&self, index: usize) -> &f64 {
        let mut i = index;
        for slab in [&self.w_ih, &self.w_ch, &self.w_ho, &self.b_h, &self.b_o] {
            if i < slab.len() {
                return &slab[i];
            }
            i -= slab.len();
        }
        panic!("parameter index {index} out of range");
    }

    /// Serializes to the text model format. The context is runtime state
    /// and is not persisted; `load` starts from a reset context.
    pub fn save(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "SRN {} {} {}", self.n_in, self.n_hid, self.n_out);
        let section = |s: &mut String, name: &str, data: &[f64], cols: usize| {
            let _ = writeln!(s, "{name}");
            for row in data.chunks(cols) {
                let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                let _ = writeln!(s, "{}", line.join(" "));
            }
        };
        section(&mut s, "W_IH", &self.w_ih, self.n_in);
        section(&mut s, "W_CH", &self.w_ch, self.n_hid);
        section(&mut s, "W_HO", &self.w_ho, self.n_hid);
        section(&mut s, "B_H", &self.b_h, self.n_hid);
        section(&mut s, "B_O", &self.b_o, self.n_out);
        s
    }

    /// Parses the text model format, rejecting malformed input with the
    /// offending line number.
    pub fn load(text: &str) -> Result<Self, SrnError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(SrnError::Parse {
            line: 1,
            msg: "empty model file".to_string(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "SRN" {
            return Err(SrnError::Parse {
                line: 1,
                msg: format!("expected `SRN n_in n_hid n_out`, got {header:?}"),
            });
        }
        let dim = |s: &str| -> Result<usize, SrnError> {
            s.parse().map_err(|_| SrnError::Parse {
                line: 1,
                msg: format!("bad dimension {s:?}"),
            })
        };
        let (n_in, n_hid, n_out) = (dim(fields[1])?, dim(fields[2])?, dim(fields[3])?);
        if n_in == 0 || n_hid == 0 || n_out == 0 {
            return Err(SrnError::Parse {
                line: 1,
                msg: "layer sizes must be positive".to_string(),
            });
        }
        let mut model = Self::zeros(n_in, n_hid, n_out);

        let mut read_section = |name: &str, rows: usize, cols: usize| -> Result<Vec<f64>, SrnError> {
            let (line_no, line) = lines.next().ok_or(SrnError::Parse {
                line: text.lines().count() + 1,
                msg: format!("missing section {name}"),
            })?;
            if line.trim() != name {
                return Err(SrnError::Parse {
                    line: line_no + 1,
                    msg: format!("expected section {name}, got {line:?}"),
                });
            }
            let mut data = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                let (line_no, line) = lines.next().ok_or(SrnError::Parse {
                    line: text.lines().count() + 1,
                    msg: format!("truncated section {name}"),
                })?;
                let values: Result<Vec<f64>, _> =
                    line.split_whitespace().map(str::parse::<f64>).collect();
                let values = values.map_err(|e| SrnError::Parse {
                    line: line_no + 1,
                    msg: format!("bad value in {name}: {e}"),
                })?;
                if values.len() != cols {
                    return Err(SrnError::Parse {
                        line: line_no + 1,
                        msg: format!("{name} row has {} values, expected {cols}", values.len()),
                    });
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(SrnError::Parse {
                        line: line_no + 1,
                        msg: format!("non-finite value in {name}"),
                    });
                }
                data.extend(values);
            }
            Ok(data)
        };

        model.w_ih = read_section("W_IH", n_hid, n_in)?;
        model.w_ch = read_section("W_CH", n_hid, n_hid)?;
        model.w_ho = read_section("W_HO", n_out, n_hid)?;
        model.b_h = read_section("B_H", 1, n_hid)?;
        model.b_o = read_section("B_O", 1, n_out)?;
        for (line_no, line) in lines {
            if !line.trim().is_empty() {
                return Err(SrnError::Parse {
                    line: line_no + 1,
                    msg: format!("unexpected trailing content {line:?}"),
                });
            }
        }
        Ok(model)
    }
}

//! Two-state Markov-Gaussian (TSMG) impulsive noise and plain AWGN.
//!
//! A hidden good/bad chain drives the per-symbol noise variance: `σ²_G` in
//! the good state and `σ²_B = R·σ²_G` in the bad state. The chain is
//! parameterized by its stationary bad probability `P_B` and its memory
//! `γ = 1 / (p_GB + p_BG)`, which gives `p_GB = P_B/γ` and
//! `p_BG = (1 - P_B)/γ`.
//!
//! Traces keep the true state sequence, which is what the genie detector
//! reports.

use crate::channel::complex_gaussian;
use crate::error::{invalid, Result};
use crate::rng::SimRng;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseState {
    Good,
    Bad,
}

impl NoiseState {
    pub fn is_bad(self) -> bool {
        self == NoiseState::Bad
    }

    pub fn label(self) -> &'static str {
        match self {
            NoiseState::Good => "G",
            NoiseState::Bad => "B",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsmgParams {
    /// Memory γ ≥ 1.
    pub gamma: f64,
    /// Bad-to-good power ratio R = σ²_B / σ²_G.
    pub ratio: f64,
    /// Stationary probability of the bad state.
    pub p_bad: f64,
    /// Good-state noise power σ²_G.
    pub sigma_g2: f64,
}

impl TsmgParams {
    /// γ = 100, R = 100, P_B = 0.1 at the given good-state power.
    pub fn reference(sigma_g2: f64) -> Self {
        Self {
            gamma: 100.0,
            ratio: 100.0,
            p_bad: 0.1,
            sigma_g2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_bad > 0.0 && self.p_bad < 1.0) {
            return Err(invalid(format!("P_B must lie in (0, 1), got {}", self.p_bad)));
        }
        if !(self.ratio >= 1.0 && self.ratio.is_finite()) {
            return Err(invalid(format!("R must be >= 1, got {}", self.ratio)));
        }
        if !(self.gamma >= 1.0 && self.gamma.is_finite()) {
            return Err(invalid(format!("memory γ must be >= 1, got {}", self.gamma)));
        }
        if !(self.sigma_g2 > 0.0 && self.sigma_g2.is_finite()) {
            return Err(invalid(format!("σ²_G must be positive, got {}", self.sigma_g2)));
        }
        Ok(())
    }

    pub fn sigma_b2(&self) -> f64 {
        self.ratio * self.sigma_g2
    }

    pub fn variance(&self, state: NoiseState) -> f64 {
        match state {
            NoiseState::Good => self.sigma_g2,
            NoiseState::Bad => self.sigma_b2(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionMatrix {
    pub p_gg: f64,
    pub p_gb: f64,
    pub p_bg: f64,
    pub p_bb: f64,
}

impl TransitionMatrix {
    pub fn leave_probability(&self, from: NoiseState) -> f64 {
        match from {
            NoiseState::Good => self.p_gb,
            NoiseState::Bad => self.p_bg,
        }
    }

    /// Stationary distribution `(π_G, π_B)` of the chain.
    pub fn stationary(&self) -> (f64, f64) {
        let s = self.p_gb + self.p_bg;
        (self.p_bg / s, self.p_gb / s)
    }
}

pub fn transition_matrix(params: &TsmgParams) -> Result<TransitionMatrix> {
    params.validate()?;
    let p_gb = params.p_bad / params.gamma;
    let p_bg = (1.0 - params.p_bad) / params.gamma;
    if !(0.0..=1.0).contains(&p_gb) || !(0.0..=1.0).contains(&p_bg) {
        return Err(invalid("transition probabilities fall outside [0, 1]"));
    }
    Ok(TransitionMatrix {
        p_gg: 1.0 - p_gb,
        p_gb,
        p_bg,
        p_bb: 1.0 - p_bg,
    })
}

/// Per-symbol noise states and samples of one link for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrace {
    states: Vec<NoiseState>,
    samples: Vec<Complex64>,
}

impl NoiseTrace {
    pub fn new(states: Vec<NoiseState>, samples: Vec<Complex64>) -> Result<Self> {
        if states.len() != samples.len() {
            return Err(crate::Error::LengthMismatch {
                expected: states.len(),
                actual: samples.len(),
            });
        }
        Ok(Self { states, samples })
    }

    /// Draws samples for a known state sequence.
    pub fn from_states(states: Vec<NoiseState>, params: &TsmgParams, rng: &mut SimRng) -> Self {
        let samples = states
            .iter()
            .map(|&s| complex_gaussian(rng, params.variance(s)))
            .collect();
        Self { states, samples }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[NoiseState] {
        &self.states
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Genie-reported fraction of bad-state symbols in the frame.
    pub fn bad_fraction(&self) -> f64 {
        bad_fraction(&self.states)
    }

    /// Writes `k,state,re,im` rows with a header line.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "state", "re", "im"])?;
        for (k, (s, n)) in self.states.iter().zip(&self.samples).enumerate() {
            w.write_record([
                k.to_string(),
                s.label().to_string(),
                n.re.to_string(),
                n.im.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn bad_fraction(states: &[NoiseState]) -> f64 {
    if states.is_empty() {
        return 0.0;
    }
    states.iter().filter(|s| s.is_bad()).count() as f64 / states.len() as f64
}

/// Genie bad fraction of a trace; errors on an empty trace.
pub fn frame_bad_fraction(trace: &NoiseTrace) -> Result<f64> {
    if trace.is_empty() {
        return Err(invalid("empty noise trace"));
    }
    Ok(trace.bad_fraction())
}

/// Runs the hidden chain for `len` steps, starting from the stationary law.
pub fn generate_states(params: &TsmgParams, len: usize, rng: &mut SimRng) -> Result<Vec<NoiseState>> {
    let tm = transition_matrix(params)?;
    if len == 0 {
        return Err(invalid("trace length must be at least 1"));
    }
    let (_, pi_b) = tm.stationary();
    let mut state = if rng.random::<f64>() < pi_b {
        NoiseState::Bad
    } else {
        NoiseState::Good
    };
    let mut states = Vec::with_capacity(len);
    states.push(state);
    for _ in 1..len {
        if rng.random::<f64>() < tm.leave_probability(state) {
            state = match state {
                NoiseState::Good => NoiseState::Bad,
                NoiseState::Bad => NoiseState::Good,
            };
        }
        states.push(state);
    }
    Ok(states)
}

pub fn generate_tsmg(params: &TsmgParams, len: usize, rng: &mut SimRng) -> Result<NoiseTrace> {
    let states = generate_states(params, len, rng)?;
    Ok(NoiseTrace::from_states(states, params, rng))
}

pub fn generate_awgn(sigma2: f64, len: usize, rng: &mut SimRng) -> Result<NoiseTrace> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(invalid(format!("noise variance must be positive, got {sigma2}")));
    }
    if len == 0 {
        return Err(invalid("trace length must be at least 1"));
    }
    let samples = (0..len).map(|_| complex_gaussian(rng, sigma2)).collect();
    Ok(NoiseTrace {
        states: vec![NoiseState::Good; len],
        samples,
    })
}

/// Lengths of maximal runs of bad states.
pub fn bad_burst_lengths(states: &[NoiseState]) -> Vec<usize> {
    let mut bursts = Vec::new();
    let mut run = 0usize;
    for s in states {
        if s.is_bad() {
            run += 1;
        } else if run > 0 {
            bursts.push(run);
            run = 0;
        }
    }
    if run > 0 {
        bursts.push(run);
    }
    bursts
}

//! Block Rayleigh fading.
//!
//! Gains are drawn once per coherence block of `T_c` symbols. `T_c = K` is
//! slow (frame) fading, `T_c = 1` is fast (symbol) fading.

use crate::error::{invalid, Result};
use crate::rng::SimRng;
use crate::topology::{FieldLayout, NodeId};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// A directed link of the two-hop network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    SourceDestination,
    SourceRelay(usize),
    RelayDestination(usize),
}

impl Link {
    pub fn endpoints(self) -> (NodeId, NodeId) {
        match self {
            Link::SourceDestination => (NodeId::Source, NodeId::Destination),
            Link::SourceRelay(m) => (NodeId::Source, NodeId::Relay(m)),
            Link::RelayDestination(m) => (NodeId::Relay(m), NodeId::Destination),
        }
    }

    fn slot(self, num_relays: usize) -> usize {
        match self {
            Link::SourceDestination => 0,
            Link::SourceRelay(m) => m,
            Link::RelayDestination(m) => num_relays + m,
        }
    }

    /// All `2M + 1` links in storage order.
    pub fn all(num_relays: usize) -> impl Iterator<Item = Link> {
        std::iter::once(Link::SourceDestination)
            .chain((1..=num_relays).map(Link::SourceRelay))
            .chain((1..=num_relays).map(Link::RelayDestination))
    }
}

/// Circularly-symmetric complex Gaussian sample with `E|z|² = variance`.
pub fn complex_gaussian(rng: &mut SimRng, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Per-link complex gains for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    num_relays: usize,
    frame_len: usize,
    coherence: usize,
    /// `gains[link][block]`
    gains: Vec<Vec<Complex64>>,
}

impl ChannelRealization {
    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn coherence(&self) -> usize {
        self.coherence
    }

    pub fn num_relays(&self) -> usize {
        self.num_relays
    }

    fn check(&self, link: Link) -> Result<usize> {
        let m = match link {
            Link::SourceDestination => 0,
            Link::SourceRelay(m) | Link::RelayDestination(m) => m,
        };
        if link != Link::SourceDestination && !(1..=self.num_relays).contains(&m) {
            return Err(invalid(format!("relay {m} does not exist")));
        }
        Ok(link.slot(self.num_relays))
    }

    /// Gain of `link` at symbol `k`.
    pub fn gain(&self, link: Link, k: usize) -> Complex64 {
        self.gains[link.slot(self.num_relays)][k / self.coherence]
    }

    /// Distinct gains (one per coherence block) of a link.
    pub fn blocks(&self, link: Link) -> Result<&[Complex64]> {
        Ok(&self.gains[self.check(link)?])
    }

    /// Frame-averaged `|h|²` of a link; the quantity selectors consume.
    pub fn mean_power(&self, link: Link) -> f64 {
        let blocks = &self.gains[link.slot(self.num_relays)];
        blocks.iter().map(|h| h.norm_sqr()).sum::<f64>() / blocks.len() as f64
    }
}

fn validate(frame_len: usize, coherence: usize) -> Result<()> {
    if frame_len == 0 || coherence == 0 {
        return Err(invalid("frame length and coherence time must be at least 1"));
    }
    if !frame_len.is_multiple_of(coherence) {
        return Err(invalid(format!(
            "coherence time {coherence} must divide the frame length {frame_len}"
        )));
    }
    Ok(())
}

/// Draws independent Rayleigh gains for every link, one per coherence block.
pub fn draw_channels(
    layout: &FieldLayout,
    frame_len: usize,
    coherence: usize,
    rng: &mut SimRng,
) -> Result<ChannelRealization> {
    validate(frame_len, coherence)?;
    let m = layout.num_relays();
    let blocks = frame_len / coherence;
    let mut gains = Vec::with_capacity(2 * m + 1);
    for link in Link::all(m) {
        let (i, j) = link.endpoints();
        let var = layout.link_variance(i, j)?;
        gains.push((0..blocks).map(|_| complex_gaussian(rng, var)).collect());
    }
    Ok(ChannelRealization {
        num_relays: m,
        frame_len,
        coherence,
        gains,
    })
}

/// Non-fading channel: every gain is the real amplitude `sqrt(σ²_ij)`.
pub fn fixed_channels(layout: &FieldLayout, frame_len: usize) -> Result<ChannelRealization> {
    validate(frame_len, frame_len)?;
    let m = layout.num_relays();
    let mut gains = Vec::with_capacity(2 * m + 1);
    for link in Link::all(m) {
        let (i, j) = link.endpoints();
        gains.push(vec![Complex64::new(layout.link_variance(i, j)?.sqrt(), 0.0)]);
    }
    Ok(ChannelRealization {
        num_relays: m,
        frame_len,
        coherence: frame_len,
        gains,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Point;
    use rand::SeedableRng;

    fn layout() -> FieldLayout {
        FieldLayout::with_relays(
            1.0,
            2.0,
            vec![Point::new(0.5, 0.5), Point::new(0.2, 0.7), Point::new(0.9, 0.1)],
        )
        .unwrap()
    }

    #[test]
    fn slow_fading_has_one_gain_per_link() {
        let mut rng = SimRng::seed_from_u64(1);
        let ch = draw_channels(&layout(), 1000, 1000, &mut rng).unwrap();
        for link in Link::all(3) {
            assert_eq!(ch.blocks(link).unwrap().len(), 1);
            assert_eq!(ch.gain(link, 0), ch.gain(link, 999));
        }
    }

    #[test]
    fn fast_fading_has_one_gain_per_symbol() {
        let mut rng = SimRng::seed_from_u64(1);
        let ch = draw_channels(&layout(), 1000, 1, &mut rng).unwrap();
        for link in Link::all(3) {
            let b = ch.blocks(link).unwrap();
            assert_eq!(b.len(), 1000);
            let mut v: Vec<(u64, u64)> = b.iter().map(|h| (h.re.to_bits(), h.im.to_bits())).collect();
            v.sort_unstable();
            v.dedup();
            assert_eq!(v.len(), 1000);
        }
    }

    #[test]
    fn rejects_misaligned_blocks() {
        let mut rng = SimRng::seed_from_u64(1);
        assert!(draw_channels(&layout(), 1000, 3, &mut rng).is_err());
        assert!(draw_channels(&layout(), 0, 1, &mut rng).is_err());
        assert!(draw_channels(&layout(), 10, 0, &mut rng).is_err());
    }

    #[test]
    fn fixed_channel_uses_amplitude() {
        let l = layout();
        let ch = fixed_channels(&l, 10).unwrap();
        assert_eq!(ch.gain(Link::SourceDestination, 3), Complex64::new(1.0, 0.0));
        assert!((ch.mean_power(Link::SourceRelay(1)) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_gains() {
        let a = draw_channels(&layout(), 100, 10, &mut SimRng::seed_from_u64(5)).unwrap();
        let b = draw_channels(&layout(), 100, 10, &mut SimRng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mean_power_averages_blocks() {
        let mut rng = SimRng::seed_from_u64(2);
        let ch = draw_channels(&layout(), 8, 2, &mut rng).unwrap();
        let b = ch.blocks(Link::RelayDestination(2)).unwrap();
        let manual = b.iter().map(|h| h.re * h.re + h.im * h.im).sum::<f64>() / 4.0;
        assert!((ch.mean_power(Link::RelayDestination(2)) - manual).abs() < 1e-15);
    }
}

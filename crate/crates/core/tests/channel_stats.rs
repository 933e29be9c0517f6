mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use relaysel_core::{draw_channels, FieldLayout, Link, NodeId, Point, SimRng};

fn layout() -> FieldLayout {
    FieldLayout::with_relays(1.0, 2.0, vec![Point::new(0.5, 0.5), Point::new(0.2, 0.9)]).unwrap()
}

fn powers(link: Link, frames: u64, coherence: usize) -> Vec<f64> {
    let l = layout();
    let mut rng = SimRng::seed_from_u64(21);
    let mut out = Vec::new();
    for _ in 0..frames {
        let ch = draw_channels(&l, 100, coherence, &mut rng).unwrap();
        out.extend(ch.blocks(link).unwrap().iter().map(|h| h.norm_sqr()));
    }
    out
}

#[test]
fn gain_power_is_exponential_with_link_variance() {
    let l = layout();
    for link in [Link::SourceDestination, Link::SourceRelay(1), Link::RelayDestination(2)] {
        let (i, j) = link.endpoints();
        let var = l.link_variance(i, j).unwrap();
        let p = powers(link, 20_000, 100);
        assert_eq!(p.len(), 20_000);
        assert!((mean(&p) / var - 1.0).abs() < 0.03, "{link:?}: {} vs {var}", mean(&p));
        let d = ks_one_sample(&p, |x| 1.0 - (-x / var).exp());
        assert!(d < KS_C_001 / (p.len() as f64).sqrt(), "{link:?}: KS {d}");
    }
}

#[test]
fn quadrature_components_split_the_power() {
    let l = layout();
    let var = l.link_variance(NodeId::Source, NodeId::Relay(1)).unwrap();
    let mut rng = SimRng::seed_from_u64(22);
    let (mut re, mut im) = (Vec::new(), Vec::new());
    for _ in 0..50 {
        let ch = draw_channels(&l, 1000, 1, &mut rng).unwrap();
        for h in ch.blocks(Link::SourceRelay(1)).unwrap() {
            re.push(h.re);
            im.push(h.im);
        }
    }
    assert!((variance(&re) / (var / 2.0) - 1.0).abs() < 0.03);
    assert!((variance(&im) / (var / 2.0) - 1.0).abs() < 0.03);
    assert!(mean(&re).abs() < 0.02 && mean(&im).abs() < 0.02);
}

#[test]
fn fast_fading_changes_every_symbol() {
    let ch = draw_channels(&layout(), 64, 1, &mut SimRng::seed_from_u64(23)).unwrap();
    let g: Vec<_> = (0..64).map(|k| ch.gain(Link::SourceDestination, k)).collect();
    assert!(g.windows(2).all(|w| w[0] != w[1]));
    let slow = draw_channels(&layout(), 64, 64, &mut SimRng::seed_from_u64(23)).unwrap();
    assert!((0..64).all(|k| slow.gain(Link::SourceDestination, k) == slow.gain(Link::SourceDestination, 0)));
}

proptest! {
    #[test]
    fn stored_geometry_is_reciprocal(xs in prop::collection::vec((0.01f64..0.99, 0.01f64..0.99), 1..9), eta in 0.0f64..4.0) {
        let relays: Vec<Point> = xs.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let l = FieldLayout::with_relays(1.0, eta, relays.clone()).unwrap();
        let mut nodes = vec![NodeId::Source, NodeId::Destination];
        nodes.extend((1..=relays.len()).map(NodeId::Relay));
        for &a in &nodes {
            for &b in &nodes {
                if a != b {
                    prop_assert_eq!(l.link_variance(a, b).unwrap(), l.link_variance(b, a).unwrap());
                }
            }
        }
    }

    #[test]
    fn field_scale_leaves_variances_unchanged(xs in prop::collection::vec((0.01f64..0.99, 0.01f64..0.99), 1..9), c in 0.1f64..50.0) {
        let unit: Vec<Point> = xs.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let scaled: Vec<Point> = xs.iter().map(|&(x, y)| Point::new(c * x, c * y)).collect();
        let a = FieldLayout::with_relays(1.0, 2.0, unit).unwrap();
        let b = FieldLayout::with_relays(c, 2.0, scaled).unwrap();
        for m in 1..=xs.len() {
            for (i, j) in [(NodeId::Source, NodeId::Relay(m)), (NodeId::Relay(m), NodeId::Destination)] {
                let (va, vb) = (a.link_variance(i, j).unwrap(), b.link_variance(i, j).unwrap());
                prop_assert!((va - vb).abs() <= 1e-9 * va.max(1.0));
            }
        }
        prop_assert_eq!(b.link_variance(NodeId::Source, NodeId::Destination).unwrap(), 1.0);
    }
}

//! Node placement and distance-derived link variances.
//!
//! The source sits at the origin corner of a square field and the
//! destination at the opposite corner. Relays are placed i.i.d. uniform on
//! the field. Every link variance is normalized by the source-destination
//! distance, so `σ²_ij = (d_ij / d_SD)^(-η)` and `σ²_SD = 1`.

use crate::error::{invalid, Result};
use crate::rng::SimRng;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// A node of the cooperative cluster. Relays are numbered `1..=M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeId {
    Source,
    Destination,
    Relay(usize),
}

impl NodeId {
    pub fn index(self) -> usize {
        match self {
            NodeId::Source => 0,
            NodeId::Relay(m) => m,
            NodeId::Destination => usize::MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// On-disk form of a layout: positions and path-loss exponent only.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct LayoutDoc {
    field_side: f64,
    path_loss_exponent: f64,
    source: Point,
    destination: Point,
    relays: Vec<Point>,
}

/// Node coordinates plus the cached per-link variance table.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldLayout {
    field_side: f64,
    path_loss_exponent: f64,
    source: Point,
    destination: Point,
    relays: Vec<Point>,
    /// Row-major `(M + 2) x (M + 2)` table, node order `[S, R1..RM, D]`.
    variance: Vec<f64>,
}

impl FieldLayout {
    /// Random placement: relays uniform on `[0, side]²`, S and D at opposite
    /// corners. Deterministic for a given stream state.
    pub fn place(
        rng: &mut SimRng,
        num_relays: usize,
        field_side: f64,
        path_loss_exponent: f64,
    ) -> Result<Self> {
        if num_relays == 0 {
            return Err(invalid("at least one relay is required"));
        }
        if !(field_side.is_finite() && field_side > 0.0) {
            return Err(invalid(format!("field side must be positive, got {field_side}")));
        }
        let source = Point::new(0.0, 0.0);
        let destination = Point::new(field_side, field_side);
        let mut relays: Vec<Point> = Vec::with_capacity(num_relays);
        while relays.len() < num_relays {
            let p = Point::new(
                rng.random::<f64>() * field_side,
                rng.random::<f64>() * field_side,
            );
            // a zero-probability event, but distances must stay positive
            let clash = p.distance(&source) == 0.0
                || p.distance(&destination) == 0.0
                || relays.iter().any(|q| q.distance(&p) == 0.0);
            if !clash {
                relays.push(p);
            }
        }
        Self::build(field_side, path_loss_exponent, source, destination, relays)
    }

    /// Explicit relay coordinates, S at `(0,0)` and D at `(side, side)`.
    pub fn with_relays(field_side: f64, path_loss_exponent: f64, relays: Vec<Point>) -> Result<Self> {
        if !(field_side.is_finite() && field_side > 0.0) {
            return Err(invalid(format!("field side must be positive, got {field_side}")));
        }
        if relays.is_empty() {
            return Err(invalid("at least one relay is required"));
        }
        Self::build(
            field_side,
            path_loss_exponent,
            Point::new(0.0, 0.0),
            Point::new(field_side, field_side),
            relays,
        )
    }

    fn build(
        field_side: f64,
        path_loss_exponent: f64,
        source: Point,
        destination: Point,
        relays: Vec<Point>,
    ) -> Result<Self> {
        if !path_loss_exponent.is_finite() || path_loss_exponent < 0.0 {
            return Err(invalid(format!(
                "path-loss exponent must be finite and non-negative, got {path_loss_exponent}"
            )));
        }
        let mut nodes = Vec::with_capacity(relays.len() + 2);
        nodes.push(source);
        nodes.extend(relays.iter().copied());
        nodes.push(destination);
        if nodes.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(invalid("node coordinates must be finite"));
        }
        let d_sd = source.distance(&destination);
        let n = nodes.len();
        let mut variance = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = nodes[i].distance(&nodes[j]);
                if d <= 0.0 {
                    return Err(invalid(format!("nodes {i} and {j} coincide")));
                }
                let rel = d / d_sd;
                variance[i * n + j] = rel.powf(-path_loss_exponent);
            }
        }
        // λ_SD is 1 by construction; pin it against rounding
        variance[n - 1] = 1.0;
        variance[(n - 1) * n] = 1.0;
        Ok(Self {
            field_side,
            path_loss_exponent,
            source,
            destination,
            relays,
            variance,
        })
    }

    pub fn num_relays(&self) -> usize {
        self.relays.len()
    }

    pub fn field_side(&self) -> f64 {
        self.field_side
    }

    pub fn path_loss_exponent(&self) -> f64 {
        self.path_loss_exponent
    }

    pub fn position(&self, node: NodeId) -> Result<Point> {
        match node {
            NodeId::Source => Ok(self.source),
            NodeId::Destination => Ok(self.destination),
            NodeId::Relay(m) if (1..=self.relays.len()).contains(&m) => Ok(self.relays[m - 1]),
            NodeId::Relay(m) => Err(invalid(format!("relay {m} does not exist"))),
        }
    }

    pub fn relays(&self) -> &[Point] {
        &self.relays
    }

    fn slot(&self, node: NodeId) -> Result<usize> {
        match node {
            NodeId::Source => Ok(0),
            NodeId::Destination => Ok(self.relays.len() + 1),
            NodeId::Relay(m) if (1..=self.relays.len()).contains(&m) => Ok(m),
            NodeId::Relay(m) => Err(invalid(format!("relay {m} does not exist"))),
        }
    }

    pub fn distance(&self, i: NodeId, j: NodeId) -> Result<f64> {
        Ok(self.position(i)?.distance(&self.position(j)?))
    }

    /// Mean power gain `E|h_ij|² = (d_ij / d_SD)^(-η)` of link `i → j`.
    pub fn link_variance(&self, i: NodeId, j: NodeId) -> Result<f64> {
        if i == j {
            return Err(invalid("link endpoints must differ"));
        }
        let n = self.relays.len() + 2;
        Ok(self.variance[self.slot(i)? * n + self.slot(j)?])
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = LayoutDoc {
            field_side: self.field_side,
            path_loss_exponent: self.path_loss_exponent,
            source: self.source,
            destination: self.destination,
            relays: self.relays.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: LayoutDoc = serde_json::from_str(text)?;
        Self::build(
            doc.field_side,
            doc.path_loss_exponent,
            doc.source,
            doc.destination,
            doc.relays,
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

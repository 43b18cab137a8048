//! Measurable sets: interval unions, axis-aligned box unions, implicit
//! level sets, and parametric circles.

use crate::domain::BoxDomain;
use crate::error::{Result, WbvError};
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub enum ShapeSet {
    Empty { dim: usize },
    /// 1-D union of disjoint open intervals.
    Intervals { intervals: Vec<(f64, f64)> },
    /// Union of axis-aligned boxes with pairwise disjoint closures.
    Boxes { boxes: Vec<BoxDomain> },
    /// Points where phi < 0.
    Implicit {
        dim: usize,
        phi: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    },
    /// 2-D disk boundary given parametrically.
    Circle { center: [f64; 2], radius: f64 },
}

impl fmt::Debug for ShapeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeSet::Empty { dim } => write!(f, "Empty({dim}d)"),
            ShapeSet::Intervals { intervals } => write!(f, "Intervals({intervals:?})"),
            ShapeSet::Boxes { boxes } => write!(f, "Boxes({} boxes)", boxes.len()),
            ShapeSet::Implicit { dim, .. } => write!(f, "Implicit({dim}d)"),
            ShapeSet::Circle { center, radius } => {
                write!(f, "Circle(center={center:?}, r={radius})")
            }
        }
    }
}

impl ShapeSet {
    /// Union of disjoint open intervals, sorted and checked for overlap.
    pub fn intervals(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        intervals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (a, b) in &intervals {
            if !(b > a) {
                return Err(WbvError::InvalidArgument(format!(
                    "interval ({a}, {b}) is empty or reversed"
                )));
            }
        }
        for w in intervals.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(WbvError::InvalidArgument(format!(
                    "intervals {:?} and {:?} overlap",
                    w[0], w[1]
                )));
            }
        }
        Ok(ShapeSet::Intervals { intervals })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::intervals(vec![(a, b)])
    }

    pub fn unit_disk() -> Self {
        ShapeSet::Circle { center: [0.0, 0.0], radius: 1.0 }
    }

    pub fn disk(center: [f64; 2], radius: f64) -> Self {
        ShapeSet::Circle { center, radius }
    }

    pub fn implicit<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(dim: usize, phi: F) -> Self {
        ShapeSet::Implicit { dim, phi: Arc::new(phi) }
    }

    pub fn dim(&self) -> usize {
        match self {
            ShapeSet::Empty { dim } => *dim,
            ShapeSet::Intervals { .. } => 1,
            ShapeSet::Boxes { boxes } => boxes.first().map_or(0, |b| b.dim()),
            ShapeSet::Implicit { dim, .. } => *dim,
            ShapeSet::Circle { .. } => 2,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ShapeSet::Empty { .. } => false,
            ShapeSet::Intervals { intervals } => {
                intervals.iter().any(|&(a, b)| x[0] > a && x[0] < b)
            }
            ShapeSet::Boxes { boxes } => boxes.iter().any(|b| b.contains(x)),
            ShapeSet::Implicit { phi, .. } => phi(x) < 0.0,
            ShapeSet::Circle { center, radius } => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                dx * dx + dy * dy < radius * radius
            }
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn contains_closed(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// True when the closure of `self` lies inside the open `other`.
    pub fn compactly_inside(&self, other: &Interval) -> bool {
        self.lo > other.lo && self.hi < other.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Lower,
    Upper,
}

/// One face of the spatial box `Π (0, L_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub axis: usize,
    pub side: Side,
    /// Coordinate of the face along `axis`.
    pub coord: f64,
    /// Unit outward normal.
    pub normal: Vec<f64>,
}

/// `(b1, b2) × Π_i (0, L_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeDomain {
    pub b1: f64,
    pub b2: f64,
    pub lengths: Vec<f64>,
    faces: Vec<Face>,
}

impl SpaceTimeDomain {
    pub fn new(b1: f64, b2: f64, lengths: &[f64]) -> Result<Self> {
        if !(b1.is_finite() && b2.is_finite() && b1 < b2) {
            return Err(Error::InvalidDomain(format!("slab ({b1}, {b2}) is empty")));
        }
        if !(1..=2).contains(&lengths.len()) {
            return Err(Error::InvalidDomain(format!(
                "dimension {} not in {{1, 2}}",
                lengths.len()
            )));
        }
        if lengths.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::InvalidDomain("lengths must be positive".into()));
        }
        let dim = lengths.len();
        let mut faces = Vec::with_capacity(2 * dim);
        for (axis, &l) in lengths.iter().enumerate() {
            for (side, coord, sign) in [(Side::Lower, 0.0, -1.0), (Side::Upper, l, 1.0)] {
                let mut normal = vec![0.0; dim];
                normal[axis] = sign;
                faces.push(Face {
                    axis,
                    side,
                    coord,
                    normal,
                });
            }
        }
        Ok(SpaceTimeDomain {
            b1,
            b2,
            lengths: lengths.to_vec(),
            faces,
        })
    }

    /// 1-D convenience constructor `(b1, b2) × (0, L)`.
    pub fn interval(b1: f64, b2: f64, l: f64) -> Result<Self> {
        Self::new(b1, b2, &[l])
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn slab(&self) -> Interval {
        Interval::new(self.b1, self.b2)
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn volume(&self) -> f64 {
        (self.b2 - self.b1) * self.lengths.iter().product::<f64>()
    }

    /// Extent of axis `a` (0 = time, then space).
    pub fn axis_bounds(&self, a: usize) -> (f64, f64) {
        if a == 0 {
            (self.b1, self.b2)
        } else {
            (0.0, self.lengths[a - 1])
        }
    }

    /// Point `(s, x...)` in the closure?
    pub fn contains_closed(&self, p: &[f64]) -> bool {
        p.len() == self.dim() + 1
            && (0..p.len()).all(|a| {
                let (lo, hi) = self.axis_bounds(a);
                p[a] >= lo && p[a] <= hi
            })
    }
}

//! Simulated qubit arrays, true dephasing fields and the measurement oracle.

use std::f64::consts::PI;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{QfiltError, Result};
use crate::measurement::{ramsey_born_probability, sample_outcome, MeasurementModel};
use crate::rng::SeededRng;

pub const FIELD_LOW: f64 = 0.25 * PI;
pub const FIELD_HIGH: f64 = 0.75 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeometryKind {
    #[serde(rename = "chain_1d")]
    Chain1d,
    #[serde(rename = "grid_2d")]
    Grid2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    #[serde(rename = "linear_1d")]
    Linear1d,
    #[serde(rename = "square_2d")]
    Square2d,
    #[serde(rename = "gaussian_2d")]
    Gaussian2d,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub kind: GeometryKind,
    pub spacing: f64,
    pub coordinates: Vec<[f64; 2]>,
    /// Pairwise Euclidean distances.
    pub distances: Vec<Vec<f64>>,
}

impl Geometry {
    pub fn from_coordinates(kind: GeometryKind, spacing: f64, coordinates: Vec<[f64; 2]>) -> Self {
        let distances = coordinates
            .iter()
            .map(|a| {
                coordinates
                    .iter()
                    .map(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt())
                    .collect()
            })
            .collect();
        Self {
            kind,
            spacing,
            coordinates,
            distances,
        }
    }

    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.distances[a][b]
    }

    /// Smallest separation between distinct sites (0 for a single site).
    pub fn min_separation(&self) -> f64 {
        let mut min = f64::INFINITY;
        for (i, row) in self.distances.iter().enumerate() {
            for d in &row[i + 1..] {
                min = min.min(*d);
            }
        }
        if min.is_finite() {
            min
        } else {
            0.0
        }
    }

    pub fn max_separation(&self) -> f64 {
        self.distances
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0, |a, b| a.max(*b))
    }

    /// Side length of a square grid.
    fn side(&self) -> usize {
        match self.kind {
            GeometryKind::Chain1d => self.len(),
            GeometryKind::Grid2d => (self.len() as f64).sqrt().round() as usize,
        }
    }
}

pub fn make_geometry(kind: GeometryKind, d: usize, spacing: f64) -> Result<Geometry> {
    if d == 0 {
        return Err(QfiltError::Config("geometry needs at least one site".into()));
    }
    if !(spacing > 0.0) {
        return Err(QfiltError::Config(format!("spacing must be positive, got {spacing}")));
    }
    let coords = match kind {
        GeometryKind::Chain1d => (0..d).map(|i| [i as f64 * spacing, 0.0]).collect(),
        GeometryKind::Grid2d => {
            let side = (d as f64).sqrt().round() as usize;
            if side * side != d {
                return Err(QfiltError::Config(format!(
                    "grid_2d needs a perfect-square site count, got {d}"
                )));
            }
            // row-major
            (0..d)
                .map(|k| [(k % side) as f64 * spacing, (k / side) as f64 * spacing])
                .collect()
        }
    };
    Ok(Geometry::from_coordinates(kind, spacing, coords))
}

/// Ground-truth phase per site, in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueField {
    pub kind: FieldKind,
    pub values: Vec<f64>,
}

impl TrueField {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn make_field(kind: FieldKind, geometry: &Geometry) -> Result<TrueField> {
    let d = geometry.len();
    let values = match (kind, geometry.kind) {
        (FieldKind::Linear1d, GeometryKind::Chain1d) => {
            if d == 1 {
                vec![FIELD_LOW]
            } else {
                (0..d)
                    .map(|i| FIELD_LOW + (FIELD_HIGH - FIELD_LOW) * i as f64 / (d - 1) as f64)
                    .collect()
            }
        }
        (FieldKind::Square2d, GeometryKind::Grid2d) => {
            let side = geometry.side();
            let centre = (side as f64 - 1.0) / 2.0;
            let reach = side as f64 / 4.0;
            (0..d)
                .map(|k| {
                    let (col, row) = ((k % side) as f64, (k / side) as f64);
                    if (row - centre).abs() <= reach && (col - centre).abs() <= reach {
                        FIELD_HIGH
                    } else {
                        FIELD_LOW
                    }
                })
                .collect()
        }
        (FieldKind::Gaussian2d, GeometryKind::Grid2d) => {
            let side = geometry.side();
            let half_width = (side as f64 - 1.0) * geometry.spacing / 2.0;
            let sigma = (half_width / 2.0).max(f64::MIN_POSITIVE);
            let centre = [half_width, half_width];
            geometry
                .coordinates
                .iter()
                .map(|p| {
                    let r2 = (p[0] - centre[0]).powi(2) + (p[1] - centre[1]).powi(2);
                    FIELD_LOW + (FIELD_HIGH - FIELD_LOW) * (-r2 / (2.0 * sigma * sigma)).exp()
                })
                .collect()
        }
        (kind, geo) => {
            return Err(QfiltError::Config(format!(
                "field {kind:?} is not defined on geometry {geo:?}"
            )))
        }
    };
    Ok(TrueField { kind, values })
}

/// One simulated shot at site `j`.
///
/// With `noise_on`, a Gaussian offset of variance `sigma_v`, truncated to the
/// quantization window, is added to the Born probability before clamping.
pub fn oracle_measure(
    field: &TrueField,
    j: usize,
    model: &MeasurementModel,
    noise_on: bool,
    rng: &mut SeededRng,
) -> bool {
    let mut p = ramsey_born_probability(field.values[j]);
    if noise_on && model.sigma_v() > 0.0 {
        p += truncated_noise(model.sigma_v().sqrt(), model.bound_b(), rng);
    }
    sample_outcome(p.clamp(0.0, 1.0), rng)
}

fn truncated_noise(sd: f64, bound: f64, rng: &mut SeededRng) -> f64 {
    let normal = Normal::new(0.0, sd).expect("finite positive sd");
    for _ in 0..1000 {
        let v = normal.sample(rng);
        if v.abs() <= bound {
            return v;
        }
    }
    // window holds a negligible share of the mass
    (2.0 * rng.uniform() - 1.0) * bound
}

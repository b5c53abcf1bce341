//! Fano-factor bookkeeping and measurement scheduling.

/// Per-site Fano factors and the site chosen for the next measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlRecord {
    /// `None` for sites that have never been measured.
    pub fano: Vec<Option<f64>>,
    pub next_location: usize,
}

/// Population variance.
pub fn population_variance(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

/// Mean over alpha particles of `Var(beta samples) / mean(beta samples)`.
///
/// Each entry of `layers` holds the surviving beta samples of one alpha particle
/// (with multiplicity). Empty layers are skipped; `None` if all are empty.
pub fn fano_factor(layers: &[Vec<f64>]) -> Option<f64> {
    let ratios: Vec<f64> = layers
        .iter()
        .filter(|l| !l.is_empty())
        .map(|l| {
            let mean = l.iter().sum::<f64>() / l.len() as f64;
            if mean > 0.0 {
                population_variance(l) / mean
            } else {
                0.0
            }
        })
        .collect();
    if ratios.is_empty() {
        None
    } else {
        Some(ratios.iter().sum::<f64>() / ratios.len() as f64)
    }
}

/// Next site to measure.
///
/// Sites never measured come first (lowest index). Once every site has been
/// measured, the site with the largest stored Fano factor wins, ties going to
/// the lowest index.
pub fn schedule(fano: &[Option<f64>], tau: &[u32]) -> usize {
    if let Some(unvisited) = tau.iter().position(|&t| t == 0) {
        return unvisited;
    }
    argmax_fano(fano)
}

/// `argmax` over defined Fano factors, lowest index on ties.
pub fn argmax_fano(fano: &[Option<f64>]) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for (k, c) in fano.iter().enumerate() {
        if let Some(c) = c {
            if best.is_none_or(|(_, b)| *c > b) {
                best = Some((k, *c));
            }
        }
    }
    best.map_or(0, |(k, _)| k)
}

pub fn fano_and_control(
    layers: &[Vec<f64>],
    j: usize,
    fano: &mut [Option<f64>],
    tau: &[u32],
) -> ControlRecord {
    if let Some(c) = fano_factor(layers) {
        fano[j] = Some(c);
    }
    ControlRecord {
        fano: fano.to_vec(),
        next_location: schedule(fano, tau),
    }
}

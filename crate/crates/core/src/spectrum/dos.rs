use rayon::prelude::*;
use serde::Serialize;

use super::{hermitian_eigenvalues, truncate, SpectrumError, EIGEN_TOLERANCE};
use crate::model::family::ErgodicFamily;

/// Phase-pooled eigenvalues of `N`-site sections, each with weight
/// `1 / (N M)`, plus a histogram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DosEstimate {
    /// Sorted pool of all `N M` eigenvalues.
    pub eigenvalues: Vec<f64>,
    pub bin_edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub n: usize,
    pub m: usize,
}

impl DosEstimate {
    pub fn cdf(&self, energy: f64) -> f64 {
        dos_cdf(self, energy)
    }

    /// `count` pool entries spread evenly by rank.
    pub fn samples(&self, count: usize) -> Result<Vec<f64>, SpectrumError> {
        rank_samples(&self.eigenvalues, count)
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }
}

/// Eigenvalues of the `N`-site sections at phases `j / M`, `j = 0 .. M`,
/// pooled and sorted. Phases run in parallel; the pool is sorted afterwards,
/// so the result does not depend on scheduling.
pub fn pooled_eigenvalues(family: &dyn ErgodicFamily, n: usize, m: usize) -> Result<Vec<f64>, SpectrumError> {
    if n == 0 || m == 0 {
        return Err(SpectrumError::EmptySection);
    }
    let per_phase: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let member = family.member(j as f64 / m as f64);
            let op = truncate(member.as_ref(), n, 0)?;
            hermitian_eigenvalues(&op, EIGEN_TOLERANCE)
        })
        .collect::<Result<_, _>>()?;
    let mut pool: Vec<f64> = per_phase.into_iter().flatten().collect();
    pool.sort_by(f64::total_cmp);
    Ok(pool)
}

/// Density of states from `M` uniformly spaced phases. The histogram spans
/// `[min - 0.1, max + 0.1]` with `bins` equal bins.
pub fn dos_estimate(family: &dyn ErgodicFamily, n: usize, m: usize, bins: usize) -> Result<DosEstimate, SpectrumError> {
    if bins == 0 {
        return Err(SpectrumError::EmptySection);
    }
    let eigenvalues = pooled_eigenvalues(family, n, m)?;
    let lo = eigenvalues[0] - 0.1;
    let hi = eigenvalues[eigenvalues.len() - 1] + 0.1;
    let width = (hi - lo) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins).map(|k| if k == bins { hi } else { lo + k as f64 * width }).collect();
    let mut counts = vec![0usize; bins];
    for e in &eigenvalues {
        let k = (((e - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let total = eigenvalues.len() as f64;
    let masses = counts.iter().map(|&c| c as f64 / total).collect();
    Ok(DosEstimate { eigenvalues, bin_edges, masses, n, m })
}

/// Fraction of pooled eigenvalues `<= energy` (right-continuous).
pub fn dos_cdf(dos: &DosEstimate, energy: f64) -> f64 {
    let k = dos.eigenvalues.partition_point(|&e| e <= energy);
    k as f64 / dos.eigenvalues.len() as f64
}

fn rank_samples(pool: &[f64], count: usize) -> Result<Vec<f64>, SpectrumError> {
    let p = pool.len();
    if count == 0 || count > p {
        return Err(SpectrumError::TooManySamples { count, pool: p });
    }
    Ok((0..count).map(|k| pool[((2 * k + 1) * p) / (2 * count)]).collect())
}

/// `count` eigenvalues of the pooled sections, evenly spaced by rank; used
/// as proxies for points of the spectrum.
pub fn spectrum_samples(family: &dyn ErgodicFamily, n: usize, m: usize, count: usize) -> Result<Vec<f64>, SpectrumError> {
    rank_samples(&pooled_eigenvalues(family, n, m)?, count)
}

/// `sup_E |F(E) - G(E)|` for the empirical distribution functions of two
/// sorted samples.
pub fn kolmogorov_distance(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden_mean;
    use crate::model::family::HarperFamily;
    use crate::model::source::ConstantModel;
    use crate::model::Coupling;

    fn harper(l1: f64, l2: f64, l3: f64) -> HarperFamily {
        HarperFamily::new(Coupling::new(l1, l2, l3).unwrap(), golden_mean()).unwrap()
    }

    #[test]
    fn mass_is_one() {
        let d = dos_estimate(&harper(0.0, 1.0, 0.0), 200, 20, 256).unwrap();
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(d.eigenvalues.len(), 4000);
        assert_eq!(d.bin_edges.len(), 257);
        let one = dos_estimate(&harper(0.0, 1.0, 0.0), 50, 3, 1).unwrap();
        assert_eq!(one.masses, vec![1.0]);
    }

    #[test]
    fn free_cdf_is_symmetric() {
        let d = dos_estimate(&ConstantModel::free(), 500, 4, 64).unwrap();
        assert!((d.cdf(0.0) - 0.5).abs() < 0.02);
    }

    #[test]
    fn support_within_norm_bound() {
        let d = dos_estimate(&harper(0.0, 0.5, 0.0), 500, 50, 64).unwrap();
        let bound = 2.0 + 2.0 * 0.5 + 0.05;
        assert!(d.eigenvalues[0] >= -bound && *d.eigenvalues.last().unwrap() <= bound);
    }

    #[test]
    fn cdf_examples() {
        let d = dos_estimate(&harper(0.3, 0.5, 0.2), 100, 10, 32).unwrap();
        let e = &d.eigenvalues;
        assert_eq!(d.cdf(e[0] - 1.0), 0.0);
        assert_eq!(d.cdf(e[e.len() - 1] + 1.0), 1.0);
        let median = e[e.len() / 2];
        assert!((d.cdf(median) - 0.5).abs() <= 1.0 / e.len() as f64 + 1e-15);
    }

    #[test]
    fn samples_examples() {
        let d = dos_estimate(&ConstantModel::free(), 500, 2, 16).unwrap();
        assert_eq!(d.samples(1000).unwrap(), d.eigenvalues);
        assert_eq!(d.samples(1).unwrap(), vec![d.eigenvalues[500]]);
        assert!(d.samples(1001).is_err());
        let s = spectrum_samples(&ConstantModel::free(), 500, 1, 25).unwrap();
        assert!(s.iter().all(|x| x.abs() <= 2.05));
    }

    #[test]
    fn kolmogorov_distance_basics() {
        let a = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(kolmogorov_distance(&a, &a), 0.0);
        assert_eq!(kolmogorov_distance(&a, &[10.0, 11.0]), 1.0);
        assert!((kolmogorov_distance(&a, &[0.5, 1.5, 2.5, 3.5]) - 0.25).abs() < 1e-15);
    }
}

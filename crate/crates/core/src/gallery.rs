//! Ready-made families, parameterized so that infinite constructions can be
//! rendered as sequences of truncations.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frames::{CoefficientFunction, VectorFamily};
use crate::measure::{Density, DiscretizedSpace, Segment};
use crate::numerics::ComplexMatrix;
use crate::{Error, Result, C64};

/// Fraction of `∫ |ψ(r)|² r^(k−1) dr` allowed outside the truncated half-line.
pub const AFFINE_TAIL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum GallerySpec {
    /// Counting measure on `dim` atoms with the identity rows.
    Orthonormal { dim: usize },
    /// `Ψ(x) = Σₐ (a+1)⁻¹ e^{2πi kₐ x} eₐ` on a `grid`-point midpoint grid of
    /// `[0, 1)`, with `kₐ` running through `0, 1, −1, 2, −2, …`.
    TorusUpperSemiframe { dim: usize, grid: usize },
    /// `Ψ(x)(r) = e^{−2πixr} e^{−rate·r}` in `L²(ℝ⁺, r^(power−1) dr)`, with
    /// `cells` radial cells and a `grid`-point window in `x`.
    AffineCoherent { cells: usize, grid: usize, power: u32, rate: f64 },
    /// `Δₖ = √k δₖ` for even `k`, `δₖ/√k` for odd `k`, on `size` unit atoms.
    DeltaCounterexample { size: usize },
    /// `{e₁, …, e_d, e₁, …, e_d}` on `2·dim` unit atoms.
    DoubledOnb { dim: usize },
    /// `{e₁} ∪ {e₁, …, e_d}` on `dim + 1` unit atoms.
    AugmentedOnb { dim: usize },
    /// Three unit vectors of `ℝ²` at 120°.
    MercedesBenz,
    /// `nodes × dim` entries with real and imaginary parts uniform in `[−1, 1]`.
    RandomFrame { nodes: usize, dim: usize, seed: u64 },
}

impl GallerySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            GallerySpec::Orthonormal { .. } => "orthonormal",
            GallerySpec::TorusUpperSemiframe { .. } => "torus",
            GallerySpec::AffineCoherent { .. } => "affine",
            GallerySpec::DeltaCounterexample { .. } => "delta",
            GallerySpec::DoubledOnb { .. } => "doubled-onb",
            GallerySpec::AugmentedOnb { .. } => "augmented-onb",
            GallerySpec::MercedesBenz => "mercedes",
            GallerySpec::RandomFrame { .. } => "random",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: &str| Err(Error::InvalidSpec(format!("{}: {msg}", self.kind())));
        match *self {
            GallerySpec::Orthonormal { dim } | GallerySpec::DoubledOnb { dim } | GallerySpec::AugmentedOnb { dim } => {
                if dim == 0 {
                    return invalid("dim must be at least 1");
                }
            }
            GallerySpec::TorusUpperSemiframe { dim, grid } => {
                if dim == 0 {
                    return invalid("dim must be at least 1");
                }
                if grid < dim {
                    return invalid("grid must be at least dim so the exponentials stay orthonormal");
                }
            }
            GallerySpec::AffineCoherent { cells, grid, power, rate } => {
                if cells == 0 {
                    return invalid("cells must be at least 1");
                }
                if grid < cells {
                    return invalid("grid must be at least cells");
                }
                if power == 0 {
                    return invalid("power must be at least 1");
                }
                if !(rate.is_finite() && rate > 0.0) {
                    return invalid("rate must be positive");
                }
            }
            GallerySpec::DeltaCounterexample { size } => {
                if size == 0 {
                    return invalid("size must be at least 1");
                }
            }
            GallerySpec::MercedesBenz => {}
            GallerySpec::RandomFrame { nodes, dim, .. } => {
                if dim == 0 || nodes == 0 {
                    return invalid("nodes and dim must be at least 1");
                }
            }
        }
        Ok(())
    }

    /// The same construction at another truncation size; grids scale along.
    pub fn with_size(&self, size: usize) -> Result<GallerySpec> {
        let scaled = |grid: usize, base: usize| (grid * size).div_ceil(base).max(size);
        let spec = match *self {
            GallerySpec::Orthonormal { .. } => GallerySpec::Orthonormal { dim: size },
            GallerySpec::TorusUpperSemiframe { dim, grid } => {
                GallerySpec::TorusUpperSemiframe { dim: size, grid: scaled(grid, dim) }
            }
            GallerySpec::AffineCoherent { cells, grid, power, rate } => {
                GallerySpec::AffineCoherent { cells: size, grid: scaled(grid, cells), power, rate }
            }
            GallerySpec::DeltaCounterexample { .. } => GallerySpec::DeltaCounterexample { size },
            GallerySpec::DoubledOnb { .. } => GallerySpec::DoubledOnb { dim: size },
            GallerySpec::AugmentedOnb { .. } => GallerySpec::AugmentedOnb { dim: size },
            GallerySpec::MercedesBenz => return Err(Error::InvalidSpec("mercedes has no size parameter".into())),
            GallerySpec::RandomFrame { nodes, dim, seed } => {
                GallerySpec::RandomFrame { nodes: (nodes * size).div_ceil(dim).max(size), dim: size, seed }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn build(spec: &GallerySpec) -> Result<VectorFamily> {
    spec.validate()?;
    match *spec {
        GallerySpec::Orthonormal { dim } => {
            VectorFamily::new(DiscretizedSpace::atoms(dim, 1.0)?, ComplexMatrix::identity(dim))
        }
        GallerySpec::TorusUpperSemiframe { dim, grid } => torus(dim, grid),
        GallerySpec::AffineCoherent { cells, grid, power, rate } => affine(cells, grid, power, rate),
        GallerySpec::DeltaCounterexample { size } => {
            let diag: Vec<f64> = (1..=size).map(delta_coefficient).collect();
            VectorFamily::new(DiscretizedSpace::atoms(size, 1.0)?, ComplexMatrix::from_diagonal(&diag))
        }
        GallerySpec::DoubledOnb { dim } => {
            let members = ComplexMatrix::from_fn(2 * dim, dim, |j, a| unit(j % dim == a));
            VectorFamily::new(DiscretizedSpace::atoms(2 * dim, 1.0)?, members)
        }
        GallerySpec::AugmentedOnb { dim } => {
            let members = ComplexMatrix::from_fn(dim + 1, dim, |j, a| unit(a == j.saturating_sub(1)));
            VectorFamily::new(DiscretizedSpace::atoms(dim + 1, 1.0)?, members)
        }
        GallerySpec::MercedesBenz => {
            let s3 = 3f64.sqrt() / 2.0;
            let members = ComplexMatrix::from_real(3, 2, &[0.0, 1.0, -s3, -0.5, s3, -0.5])?;
            VectorFamily::new(DiscretizedSpace::atoms(3, 1.0)?, members)
        }
        GallerySpec::RandomFrame { nodes, dim, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let members = ComplexMatrix::from_fn(nodes, dim, |_, _| {
                let re = rng.gen_range(-1.0..=1.0);
                let im = rng.gen_range(-1.0..=1.0);
                C64::new(re, im)
            });
            VectorFamily::new(DiscretizedSpace::atoms(nodes, 1.0)?, members)
        }
    }
}

fn unit(on: bool) -> C64 {
    C64::new(if on { 1.0 } else { 0.0 }, 0.0)
}

/// `0, 1, −1, 2, −2, …` at positions `0, 1, 2, 3, 4, …`.
pub fn torus_frequency(position: usize) -> i64 {
    let p = position as i64;
    if p % 2 == 1 {
        (p + 1) / 2
    } else {
        -p / 2
    }
}

fn torus(dim: usize, grid: usize) -> Result<VectorFamily> {
    let space = DiscretizedSpace::uniform_cells(0.0, 1.0, grid)?;
    let xs = cell_points(&space);
    let members = ComplexMatrix::from_fn(grid, dim, |j, a| {
        let k = torus_frequency(a) as f64;
        C64::from_polar(1.0 / (a as f64 + 1.0), 2.0 * PI * k * xs[j])
    });
    VectorFamily::new(space, members)
}

fn cell_points(space: &DiscretizedSpace) -> Vec<f64> {
    space
        .nodes()
        .iter()
        .map(|n| match n.point {
            crate::measure::NodePoint::Real(x) => x,
            crate::measure::NodePoint::Label(_) => unreachable!("quadrature cells carry real points"),
        })
        .collect()
}

/// `Σ_{j<k} e^{−z} zʲ/j!`, the share of `∫₀^∞ r^(k−1) e^{−2ar} dr` beyond `R`
/// when `z = 2aR`.
fn gamma_tail(power: u32, z: f64) -> f64 {
    let mut term = (-z).exp();
    let mut sum = term;
    for j in 1..power {
        term *= z / j as f64;
        sum += term;
    }
    sum
}

/// Truncation radius for the affine construction.
pub fn affine_radius(power: u32, rate: f64) -> f64 {
    let mut hi = 1.0;
    while gamma_tail(power, 2.0 * rate * hi) >= AFFINE_TAIL {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gamma_tail(power, 2.0 * rate * mid) >= AFFINE_TAIL {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Radial cell midpoints and `∫_cell r^(k−1) dr` weights.
pub fn affine_radial_cells(cells: usize, power: u32, rate: f64) -> Vec<(f64, f64)> {
    let radius = affine_radius(power, rate);
    let h = radius / cells as f64;
    let seg = Segment::new(0.0, radius, Density::Power { c: 1.0, k: power as f64 });
    (0..cells)
        .map(|m| {
            let lo = m as f64 * h;
            let hi = if m + 1 == cells { radius } else { (m + 1) as f64 * h };
            (lo + 0.5 * h, seg.measure_between(lo, hi))
        })
        .collect()
}

/// `𝔰(r) = r^(k−1) |ψ(r)|²` at the radial cell midpoints.
pub fn affine_symbol(cells: usize, power: u32, rate: f64) -> Vec<f64> {
    affine_radial_cells(cells, power, rate)
        .iter()
        .map(|&(r, _)| r.powi(power as i32 - 1) * (-2.0 * rate * r).exp())
        .collect()
}

fn affine(cells: usize, grid: usize, power: u32, rate: f64) -> Result<VectorFamily> {
    let radial = affine_radial_cells(cells, power, rate);
    let h = affine_radius(power, rate) / cells as f64;
    let half = 0.5 / h;
    let space = DiscretizedSpace::uniform_cells(-half, half, grid)?;
    let xs = cell_points(&space);
    let members = ComplexMatrix::from_fn(grid, cells, |p, m| {
        let (r, w) = radial[m];
        C64::from_polar(w.sqrt() * (-rate * r).exp(), -2.0 * PI * xs[p] * r)
    });
    VectorFamily::new(space, members)
}

/// `√k` for even `k`, `1/√k` for odd `k`, so that `|Δₖ[k]|²` is `k` or `1/k`.
pub fn delta_coefficient(k: usize) -> f64 {
    let k = k as f64;
    if k % 2.0 == 0.0 {
        k.sqrt()
    } else {
        1.0 / k.sqrt()
    }
}

/// `Δ₁, …, Δ_size` as coefficient functions on `size` unit atoms.
pub fn delta_functions(size: usize) -> Result<(DiscretizedSpace, Vec<CoefficientFunction>)> {
    let space = DiscretizedSpace::atoms(size, 1.0)?;
    let funcs = (0..size)
        .map(|n| {
            let mut v = vec![C64::new(0.0, 0.0); size];
            v[n] = C64::new(delta_coefficient(n + 1), 0.0);
            CoefficientFunction(v)
        })
        .collect();
    Ok((space, funcs))
}

/// A spec together with ascending truncation sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationSequence {
    spec: GallerySpec,
    sizes: Vec<usize>,
}

pub fn truncation_sequence(spec: &GallerySpec, sizes: &[usize]) -> Result<TruncationSequence> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec("sizes must be non-empty and strictly ascending".into()));
    }
    for &s in sizes {
        spec.with_size(s)?;
    }
    Ok(TruncationSequence { spec: spec.clone(), sizes: sizes.to_vec() })
}

impl TruncationSequence {
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn family(&self, size: usize) -> Result<VectorFamily> {
        build(&self.spec.with_size(size)?)
    }

    pub fn families(&self) -> Result<Vec<VectorFamily>> {
        self.sizes.iter().map(|&s| self.family(s)).collect()
    }

    /// Generator in the shape [`crate::frames::semiframe_trend`] expects.
    pub fn builder(&self) -> impl FnMut(usize) -> Result<VectorFamily> + '_ {
        move |size| self.family(size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{frame_bounds, frame_operator, semiframe_trend, Classification, Redundancy};
    use crate::numerics::hermitian_eig;

    #[test]
    fn frequency_enumeration() {
        let ks: Vec<i64> = (0..5).map(torus_frequency).collect();
        assert_eq!(ks, vec![0, 1, -1, 2, -2]);
    }

    #[test]
    fn torus_bounds() {
        for n in [4usize, 16] {
            let fam = build(&GallerySpec::TorusUpperSemiframe { dim: n, grid: 4 * n }).unwrap();
            let r = frame_bounds(&fam);
            assert!((r.lower_bound - 1.0 / (n * n) as f64).abs() < 1e-12);
            assert!((r.upper_bound - 1.0).abs() < 1e-12);
        }
        assert!(build(&GallerySpec::TorusUpperSemiframe { dim: 8, grid: 4 }).is_err());
    }

    #[test]
    fn affine_operator_is_the_symbol_for_power_one() {
        let spec = GallerySpec::AffineCoherent { cells: 12, grid: 24, power: 1, rate: 1.0 };
        let fam = build(&spec).unwrap();
        let s = frame_operator(&fam);
        let symbol = affine_symbol(12, 1, 1.0);
        let radial = affine_radial_cells(12, 1, 1.0);
        let h = affine_radius(1, 1.0) / 12.0;
        for m in 0..12 {
            let expect = radial[m].1 / h * (-2.0 * radial[m].0).exp();
            assert!((s[(m, m)].re - expect).abs() < 1e-12);
            assert!((expect - symbol[m]).abs() < 1e-12);
        }
        let off = s.sub(&ComplexMatrix::from_diagonal(&s.diagonal().iter().map(|v| v.re).collect::<Vec<_>>()));
        assert!(off.max_abs() < 1e-12);
    }

    #[test]
    fn affine_radius_meets_tail() {
        for power in [1, 2, 3] {
            let r = affine_radius(power, 1.0);
            assert!(gamma_tail(power, 2.0 * r) < AFFINE_TAIL);
            assert!(gamma_tail(power, 2.0 * r * 0.99) >= AFFINE_TAIL);
        }
    }

    #[test]
    fn delta_pointwise_sums() {
        let (_, funcs) = delta_functions(6).unwrap();
        let sums: Vec<f64> = (0..6).map(|k| funcs.iter().map(|f| f.0[k].norm_sqr()).sum()).collect();
        let expect = [1.0, 2.0, 1.0 / 3.0, 4.0, 1.0 / 5.0, 6.0];
        for (s, e) in sums.iter().zip(expect) {
            assert!((s - e).abs() < 1e-14);
        }
    }

    #[test]
    fn delta_trend_is_neither() {
        let seq = truncation_sequence(&GallerySpec::DeltaCounterexample { size: 4 }, &[4, 8, 16, 32]).unwrap();
        let trend = semiframe_trend(seq.builder(), seq.sizes()).unwrap();
        assert!(trend[1..].iter().all(|p| p.classification == Classification::Neither));
    }

    #[test]
    fn named_families() {
        let r = frame_bounds(&build(&GallerySpec::DoubledOnb { dim: 4 }).unwrap());
        assert_eq!(r.redundancy, Redundancy::Finite(4));
        let r = frame_bounds(&build(&GallerySpec::AugmentedOnb { dim: 3 }).unwrap());
        assert_eq!(r.redundancy, Redundancy::Finite(1));
        let s = frame_operator(&build(&GallerySpec::MercedesBenz).unwrap());
        assert!(s.max_abs_diff(&ComplexMatrix::identity(2).scale_real(1.5)) < 1e-15);
    }

    #[test]
    fn random_frame_is_deterministic() {
        let spec = GallerySpec::RandomFrame { nodes: 12, dim: 5, seed: 7 };
        assert_eq!(build(&spec).unwrap(), build(&spec).unwrap());
        assert_ne!(build(&spec).unwrap(), build(&GallerySpec::RandomFrame { nodes: 12, dim: 5, seed: 8 }).unwrap());
        let eig = hermitian_eig(&frame_operator(&build(&spec).unwrap())).unwrap();
        assert!(eig.min() > 0.0);
    }

    #[test]
    fn sequences_validate() {
        let torus = GallerySpec::TorusUpperSemiframe { dim: 4, grid: 16 };
        assert!(truncation_sequence(&torus, &[16, 4]).is_err());
        assert!(truncation_sequence(&GallerySpec::MercedesBenz, &[3]).is_err());
        let seq = truncation_sequence(&torus, &[4, 16, 64]).unwrap();
        let fams = seq.families().unwrap();
        assert_eq!(fams[2].len(), 256);
        let doubled = truncation_sequence(&GallerySpec::DoubledOnb { dim: 2 }, &[2, 4, 8]).unwrap();
        for (size, fam) in doubled.sizes().iter().zip(doubled.families().unwrap()) {
            assert_eq!(frame_bounds(&fam).redundancy, Redundancy::Finite(*size));
        }
    }
}

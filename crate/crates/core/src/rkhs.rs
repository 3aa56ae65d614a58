//! Reproducing kernels on finite node sets.
//!
//! A [`KernelTable`] stores `K(x, y) = k_y(x) = ⟨k_y, k_x⟩` densely; column
//! `x` is the kernel section `k_x`. The geometry tag records which pairing
//! reproduces: the μ-weighted `L²` product, the `⟨·,·⟩_Φ` product of a
//! reproducing pair, or none at all for the oblique kernel `R_{Ψ,Φ}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::frames::CoefficientFunction;
use crate::measure::{DiscretizedSpace, MeasureSpace, Segment};
use crate::numerics::{condition_number, hermitian_eig, svd, ComplexMatrix, RankPolicy};
use crate::pairs::{phi_inner, PhiGeometry};
use crate::{Error, Result, C64};

/// Tolerance for `⟨φᵢ, φₖ⟩_μ = δᵢₖ`.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-10;
/// Tolerance for the agreement of the two expansion orders of a pair kernel.
pub const EXPANSION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum KernelGeometry {
    /// Reproduces in `⟨F, G⟩_μ = Σ w F conj(G)`.
    Plain,
    /// Reproduces in `⟨F, G⟩_Φ = ⟨T_Φ F, T_Φ G⟩`.
    PhiWeighted(PhiGeometry),
    /// Integral kernel of an oblique projection; not Hermitian in general.
    Oblique,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    nodes: DiscretizedSpace,
    entries: ComplexMatrix,
    geometry: KernelGeometry,
}

impl KernelTable {
    pub fn new(nodes: DiscretizedSpace, entries: ComplexMatrix, geometry: KernelGeometry) -> Self {
        assert_eq!(entries.rows(), nodes.len());
        assert_eq!(entries.cols(), nodes.len());
        KernelTable { nodes, entries, geometry }
    }

    pub fn nodes(&self) -> &DiscretizedSpace {
        &self.nodes
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn geometry(&self) -> &KernelGeometry {
        &self.geometry
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `K(x, x)` (real part; the imaginary part vanishes for Hermitian tables).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.entries[(i, i)].re).collect()
    }

    /// The section `k_x`, i.e. column `x`.
    pub fn section(&self, x: usize) -> CoefficientFunction {
        CoefficientFunction(self.entries.column(x))
    }

    /// `(𝒦F)(x) = Σ_y w_y K(x, y) F(y)`.
    pub fn integrate(&self, f: &CoefficientFunction) -> Result<CoefficientFunction> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: f.len() });
        }
        let weighted: Vec<C64> = f.0.iter().zip(self.nodes.nodes()).map(|(v, n)| v * n.weight).collect();
        Ok(CoefficientFunction(self.entries.mul_vec(&weighted)))
    }

    /// `⟨F, k_x⟩` in the table's own geometry; equals `F(x)` for `F` in the
    /// reproduced space.
    pub fn reproduce(&self, f: &CoefficientFunction, x: usize) -> Result<C64> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: f.len() });
        }
        let section = self.section(x);
        match &self.geometry {
            KernelGeometry::PhiWeighted(g) => phi_inner(g, f, &section),
            KernelGeometry::Plain | KernelGeometry::Oblique => Ok(f.inner_mu(&section, &self.nodes.weights())),
        }
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.entries.hermitian_deviation()
    }

    /// Smallest eigenvalue of the table, for positive-semidefiniteness checks.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eig(&self.entries)?.min())
    }
}

/// A μ-orthonormal basis of the span of some coefficient functions.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanBasis {
    basis: ComplexMatrix,
    weights: Vec<f64>,
}

impl SpanBasis {
    pub fn new(functions: &[CoefficientFunction], space: &DiscretizedSpace, policy: &RankPolicy) -> Result<Self> {
        let n = space.len();
        for f in functions {
            if f.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: f.len() });
            }
        }
        let weights = space.weights();
        let sqrt_w: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
        let g = ComplexMatrix::from_fn(n, functions.len(), |j, i| functions[i].0[j] * sqrt_w[j]);
        let s = svd(&g);
        let r = policy.count(&s.singular_values, g.rows(), g.cols());
        let basis = ComplexMatrix::from_fn(n, r, |j, k| s.u[(j, k)] / sqrt_w[j]);
        Ok(SpanBasis { basis, weights })
    }

    /// Dimension of the span.
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// `n × dim` matrix whose columns are the μ-orthonormal basis functions.
    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn basis_functions(&self) -> Vec<CoefficientFunction> {
        (0..self.dim()).map(|k| CoefficientFunction(self.basis.column(k))).collect()
    }

    /// Coordinates `⟨F, q_k⟩_μ` of the orthogonal projection of `F`.
    pub fn coordinates(&self, f: &CoefficientFunction) -> Vec<C64> {
        (0..self.dim())
            .map(|k| f.0.iter().enumerate().map(|(j, v)| v * self.basis[(j, k)].conj() * self.weights[j]).sum())
            .collect()
    }

    pub fn function(&self, coordinates: &[C64]) -> CoefficientFunction {
        CoefficientFunction(self.basis.mul_vec(coordinates))
    }

    /// μ-norm of the component of `F` outside the span.
    pub fn residual(&self, f: &CoefficientFunction) -> f64 {
        let p = self.function(&self.coordinates(f));
        let diff = CoefficientFunction(f.0.iter().zip(&p.0).map(|(a, b)| a - b).collect());
        diff.norm_sq_mu(&self.weights).sqrt()
    }

    /// Frame operator of `functions` on the span, in span coordinates.
    pub fn frame_operator(&self, functions: &[CoefficientFunction]) -> ComplexMatrix {
        let r = self.dim();
        let mut s = ComplexMatrix::zeros(r, r);
        for f in functions {
            let c = self.coordinates(f);
            for a in 0..r {
                for b in 0..r {
                    s[(a, b)] += c[a] * c[b].conj();
                }
            }
        }
        s
    }
}

/// `K(x, y) = Σᵢ φᵢ(x) conj(φᵢ(y))` for a μ-orthonormal family.
///
/// Works on the nonzero pattern of the basis, so sparse bases such as the
/// normalized step functions of a fine partition stay cheap.
pub fn kernel_from_onb(basis: &[CoefficientFunction], space: &DiscretizedSpace) -> Result<KernelTable> {
    let n = space.len();
    for f in basis {
        if f.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.len() });
        }
    }
    let weights = space.weights();
    // per node: (function index, value) for nonzero values
    let mut by_node: Vec<Vec<(usize, C64)>> = vec![Vec::new(); n];
    for (i, f) in basis.iter().enumerate() {
        for (j, &v) in f.0.iter().enumerate() {
            if v != C64::new(0.0, 0.0) {
                by_node[j].push((i, v));
            }
        }
    }
    let m = basis.len();
    let mut gram = ComplexMatrix::zeros(m, m);
    let mut entries = ComplexMatrix::zeros(n, n);
    for (j, list) in by_node.iter().enumerate() {
        for &(i, vi) in list {
            for &(k, vk) in list {
                gram[(i, k)] += vi * vk.conj() * weights[j];
            }
        }
    }
    let deviation = gram.max_abs_diff(&ComplexMatrix::identity(m));
    if deviation > ORTHONORMAL_TOLERANCE {
        return Err(Error::NotOrthonormal { deviation });
    }
    for f in basis {
        let nz: Vec<(usize, C64)> = f.0.iter().copied().enumerate().filter(|(_, v)| *v != C64::new(0.0, 0.0)).collect();
        for &(x, vx) in &nz {
            for &(y, vy) in &nz {
                entries[(x, y)] += vx * vy.conj();
            }
        }
    }
    Ok(KernelTable::new(space.clone(), entries, KernelGeometry::Plain))
}

/// Kernel of a span built from a reproducing pair, with both expansion
/// orders and the uniqueness residual `‖A·S_{Ψ,Φ} − I‖`.
#[derive(Debug, Clone)]
pub struct PairKernel {
    pub kernel: KernelTable,
    /// Max entrywise gap between `Σ (Aφᵢ)(x) conj ψᵢ(y)` and `Σ (A*ψᵢ)(x) conj φᵢ(y)`.
    pub expansion_gap: f64,
    pub uniqueness_residual: f64,
    /// `S_{Ψ,Φ}` in the coordinates of [`pair_span`].
    pub resolution: ComplexMatrix,
}

/// The span the pair lives in; `A` for [`kernel_from_pair`] is expressed in
/// its coordinates.
pub fn pair_span(psi_funcs: &[CoefficientFunction], space: &DiscretizedSpace) -> Result<SpanBasis> {
    SpanBasis::new(psi_funcs, space, &RankPolicy::default())
}

/// `S_{Ψ,Φ} f = Σᵢ ⟨f, ψᵢ⟩ φᵢ` on the span, in span coordinates.
pub fn span_resolution(
    span: &SpanBasis,
    psi_funcs: &[CoefficientFunction],
    phi_funcs: &[CoefficientFunction],
) -> ComplexMatrix {
    let r = span.dim();
    let mut s = ComplexMatrix::zeros(r, r);
    for (p, q) in psi_funcs.iter().zip(phi_funcs) {
        let cp = span.coordinates(p);
        let cq = span.coordinates(q);
        for a in 0..r {
            for b in 0..r {
                s[(a, b)] += cq[a] * cp[b].conj();
            }
        }
    }
    s
}

/// `K(x, y) = Σᵢ (Aφᵢ)(x) conj ψᵢ(y) = Σᵢ (A*ψᵢ)(x) conj φᵢ(y)`, with `A`
/// given in the coordinates of [`pair_span`]. With `A = S_{Ψ,Φ}⁻¹` this is
/// the reproducing kernel of the span.
pub fn kernel_from_pair(
    psi_funcs: &[CoefficientFunction],
    phi_funcs: &[CoefficientFunction],
    space: &DiscretizedSpace,
    a: &ComplexMatrix,
) -> Result<PairKernel> {
    if psi_funcs.len() != phi_funcs.len() {
        return Err(Error::DimensionMismatch { expected: psi_funcs.len(), found: phi_funcs.len() });
    }
    if psi_funcs.is_empty() {
        return Err(Error::PairDegenerate("empty families".into()));
    }
    let span = pair_span(psi_funcs, space)?;
    let r = span.dim();
    if r == 0 {
        return Err(Error::PairDegenerate("the functions span the zero space".into()));
    }
    if a.rows() != r || a.cols() != r {
        return Err(Error::DimensionMismatch { expected: r, found: a.rows() });
    }
    let weights = space.weights();
    for f in phi_funcs {
        let scale = f.norm_sq_mu(&weights).sqrt().max(1.0);
        if span.residual(f) > 1e-8 * scale {
            return Err(Error::PairDegenerate("second family leaves the span of the first".into()));
        }
    }
    let resolution = span_resolution(&span, psi_funcs, phi_funcs);
    let cond = condition_number(&resolution);
    if cond.is_nan() || cond > 1e10 {
        return Err(Error::PairDegenerate(format!("resolution operator has condition {cond:e}")));
    }
    let cond_a = condition_number(a);
    if cond_a.is_nan() || cond_a > 1e10 {
        return Err(Error::PairDegenerate("A is not invertible".into()));
    }

    let n = space.len();
    let m = psi_funcs.len();
    let q = span.basis();
    let coords = |fs: &[CoefficientFunction]| {
        let cols: Vec<Vec<C64>> = fs.iter().map(|f| span.coordinates(f)).collect();
        ComplexMatrix::from_fn(r, m, |a, i| cols[i][a])
    };
    let values = |fs: &[CoefficientFunction]| ComplexMatrix::from_fn(n, m, |j, i| fs[i].0[j]);
    let first = q.mul(&a.mul(&coords(phi_funcs))).mul(&values(psi_funcs).adjoint());
    let second = q.mul(&a.adjoint().mul(&coords(psi_funcs))).mul(&values(phi_funcs).adjoint());
    let expansion_gap = first.max_abs_diff(&second);
    if expansion_gap > EXPANSION_TOLERANCE * first.max_abs().max(1.0) {
        return Err(Error::SumsDisagree { deviation: expansion_gap });
    }
    let uniqueness_residual = a.mul(&resolution).max_abs_diff(&ComplexMatrix::identity(r));
    Ok(PairKernel {
        kernel: KernelTable::new(space.clone(), first, KernelGeometry::Plain),
        expansion_gap,
        uniqueness_residual,
        resolution,
    })
}

/// Pointwise Bessel diagnostic for a family of functions in a plain RKHS.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseVerdict {
    /// `Σᵢ |ψᵢ(x)|²` per node.
    pub sums: Vec<f64>,
    /// `K(x, x)` per node.
    pub diagonal: Vec<f64>,
    /// The Bessel bound `M` the check was run against.
    pub bound: f64,
    /// Nodes with `Σᵢ |ψᵢ(x)|² > M·K(x, x) + 1e-9`.
    pub violations: Vec<usize>,
    /// Nodes where the sum vanishes (lower positivity fails).
    pub vanishing: Vec<usize>,
    /// Frame bounds of the family on the kernel's space, when the geometry is plain.
    pub observed_bounds: Option<(f64, f64)>,
}

impl PointwiseVerdict {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Whether the observed bounds satisfy `lower ≤ m` and `M ≤ upper`.
    pub fn frame_inequality_holds(&self, lower: f64, upper: f64) -> bool {
        self.observed_bounds.is_some_and(|(m, big_m)| lower <= m && big_m <= upper)
    }
}

pub fn bessel_pointwise_check(
    family: &[CoefficientFunction],
    kernel: &KernelTable,
    bound: f64,
) -> Result<PointwiseVerdict> {
    let n = kernel.len();
    let mut sums = vec![0.0; n];
    for f in family {
        if f.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.len() });
        }
        for (s, v) in sums.iter_mut().zip(&f.0) {
            *s += v.norm_sqr();
        }
    }
    let diagonal = kernel.diagonal();
    let violations = (0..n).filter(|&x| sums[x] > bound * diagonal[x] + 1e-9).collect();
    let vanishing = (0..n).filter(|&x| sums[x] == 0.0).collect();
    let observed_bounds = match kernel.geometry() {
        KernelGeometry::Plain => Some(family_bounds(family, kernel)?),
        _ => None,
    };
    Ok(PointwiseVerdict { sums, diagonal, bound, violations, vanishing, observed_bounds })
}

/// Frame bounds of `family` on the range of a plain kernel.
fn family_bounds(family: &[CoefficientFunction], kernel: &KernelTable) -> Result<(f64, f64)> {
    let sections: Vec<CoefficientFunction> = (0..kernel.len()).map(|x| kernel.section(x)).collect();
    let span = SpanBasis::new(&sections, kernel.nodes(), &RankPolicy::default())?;
    if span.dim() == 0 {
        return Ok((0.0, 0.0));
    }
    let eig = hermitian_eig(&span.frame_operator(family))?;
    Ok((eig.min().max(0.0), eig.max().max(0.0)))
}

/// Point-evaluation constants of a plain RKHS, and the bounds a frame of it
/// yields.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEvalBound {
    /// `C_x = √K(x, x)`, the norm of `δ_x`.
    pub constants: Vec<f64>,
    /// `Σᵢ |ψᵢ(x)|²` per node.
    pub frame_sums: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    /// `√(Σᵢ|ψᵢ(x)|² · M) · ‖S_Ψ⁻¹‖` per node; dominates `|f(x)|` for unit `f`.
    pub bounds: Vec<f64>,
}

pub fn rkhs_bound_from_frame(family: &[CoefficientFunction], kernel: &KernelTable) -> Result<PointEvalBound> {
    if !matches!(kernel.geometry(), KernelGeometry::Plain) {
        return Err(Error::PairDegenerate("point-evaluation bounds need a plain kernel".into()));
    }
    let verdict = bessel_pointwise_check(family, kernel, f64::INFINITY)?;
    let (lower, upper) = family_bounds(family, kernel)?;
    if !(lower > 1e-8 * upper && lower > 0.0) {
        return Err(Error::NotAFrame { lower, upper });
    }
    let constants = verdict.diagonal.iter().map(|d| d.max(0.0).sqrt()).collect();
    let bounds = verdict.sums.iter().map(|c| (c * upper).sqrt() / lower).collect();
    Ok(PointEvalBound { constants, frame_sums: verdict.sums, lower, upper, bounds })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupRow {
    pub n: usize,
    pub max_diagonal: f64,
    pub min_diagonal: f64,
    /// Codimension of the coarsest step-function space inside this refinement.
    pub codimension: usize,
}

/// Kernel diagonal of the normalized step-function basis on `n` equal-measure
/// cells of `[0, 1]`, for each requested `n`.
pub fn blowup_experiment(refinements: &[usize]) -> Result<Vec<BlowupRow>> {
    if refinements.is_empty() || refinements.contains(&0) || refinements.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec("refinements must be positive and strictly ascending".into()));
    }
    let unit = MeasureSpace::new(Vec::new(), vec![Segment::uniform(0.0, 1.0)])?;
    let coarsest = refinements[0];
    let mut rows = Vec::with_capacity(refinements.len());
    for &n in refinements {
        let space = crate::measure::discretize(&unit, n)?;
        let weights = space.weights();
        let basis: Vec<CoefficientFunction> = (0..n)
            .map(|m| {
                let mut v = vec![C64::new(0.0, 0.0); n];
                v[m] = C64::new(1.0 / weights[m].sqrt(), 0.0);
                CoefficientFunction(v)
            })
            .collect();
        let kernel = kernel_from_onb(&basis, &space)?;
        let diag = kernel.diagonal();
        let max_diagonal = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min_diagonal = diag.iter().copied().fold(f64::INFINITY, f64::min);
        rows.push(BlowupRow { n, max_diagonal, min_diagonal, codimension: n - coarsest });
    }
    Ok(rows)
}

/// Least-squares slope of `log max K(x,x)` against `log n`.
pub fn blowup_slope(rows: &[BlowupRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.n as f64).ln(), r.max_diagonal.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

//! Vector families `Ψ: X → ℂᵈ` sampled on a discretized measure space and
//! their operator calculus: analysis `C_Ψ`, synthesis `D_Ψ`, frame operator
//! `S_Ψ = D_Ψ C_Ψ`, frame bounds, redundancy, canonical duals, the frame
//! kernel `K_Ψ` and the split into a discrete and a strictly continuous part.
//!
//! Inner products are linear in the first slot. With `Ψ(xⱼ)` stored as row `j`
//! of `members`, the analysis matrix is `conj(members)` and
//! `S_Ψ = Σⱼ wⱼ Ψ(xⱼ) Ψ(xⱼ)ᴴ`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::measure::{DiscretizedSpace, Provenance};
use crate::numerics::{self, hermitian_eig, inner, norm_sq, ComplexMatrix, RankPolicy};
use crate::rkhs::{KernelGeometry, KernelTable};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    space: DiscretizedSpace,
    members: ComplexMatrix,
}

impl VectorFamily {
    pub fn new(space: DiscretizedSpace, members: ComplexMatrix) -> Result<Self> {
        if members.rows() != space.len() {
            return Err(Error::DimensionMismatch { expected: space.len(), found: members.rows() });
        }
        if members.cols() == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if !members.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(VectorFamily { space, members })
    }

    pub fn from_rows(space: DiscretizedSpace, rows: &[Vec<C64>]) -> Result<Self> {
        Self::new(space, ComplexMatrix::from_rows(rows)?)
    }

    pub fn space(&self) -> &DiscretizedSpace {
        &self.space
    }

    pub fn members(&self) -> &ComplexMatrix {
        &self.members
    }

    /// Number of nodes `n`.
    pub fn len(&self) -> usize {
        self.members.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.members.rows() == 0
    }

    /// Dimension `d` of the Hilbert space.
    pub fn dim(&self) -> usize {
        self.members.cols()
    }

    pub fn row(&self, j: usize) -> &[C64] {
        self.members.row(j)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.space.weights()
    }

    /// The same family with every member multiplied by `s`.
    pub fn scaled(&self, s: C64) -> VectorFamily {
        VectorFamily { space: self.space.clone(), members: self.members.scale(s) }
    }

    /// `n × d` matrix of `C_Ψ`: `(C_Ψ f)ⱼ = ⟨f, Ψ(xⱼ)⟩`.
    pub fn analysis_matrix(&self) -> ComplexMatrix {
        self.members.conj()
    }

    /// `W^{1/2} C_Ψ`, the analysis map as a matrix into unweighted `ℓ²`.
    pub fn weighted_analysis_matrix(&self) -> ComplexMatrix {
        let w = self.weights();
        ComplexMatrix::from_fn(self.len(), self.dim(), |j, a| self.members[(j, a)].conj() * w[j].sqrt())
    }

    /// `d × n` matrix of `D_Ψ`: `D_Ψ F = Σⱼ wⱼ Fⱼ Ψ(xⱼ)`.
    pub fn synthesis_matrix(&self) -> ComplexMatrix {
        let w = self.weights();
        ComplexMatrix::from_fn(self.dim(), self.len(), |a, j| self.members[(j, a)] * w[j])
    }

    pub(crate) fn same_space(&self, other: &VectorFamily) -> bool {
        self.len() == other.len()
            && self.dim() == other.dim()
            && self.space.weights().iter().zip(other.space.weights()).all(|(a, b)| a == &b)
    }
}

/// A discretized `F ∈ L²(X, μ)`: one complex value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFunction(pub Vec<C64>);

impl CoefficientFunction {
    pub fn zeros(n: usize) -> Self {
        CoefficientFunction(vec![C64::new(0.0, 0.0); n])
    }

    pub fn values(&self) -> &[C64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `⟨F, G⟩_μ = Σⱼ wⱼ Fⱼ conj(Gⱼ)`.
    pub fn inner_mu(&self, other: &CoefficientFunction, weights: &[f64]) -> C64 {
        self.0.iter().zip(&other.0).zip(weights).map(|((f, g), w)| f * g.conj() * *w).sum()
    }

    pub fn norm_sq_mu(&self, weights: &[f64]) -> f64 {
        self.0.iter().zip(weights).map(|(f, w)| f.norm_sqr() * w).sum()
    }
}

impl From<Vec<C64>> for CoefficientFunction {
    fn from(v: Vec<C64>) -> Self {
        CoefficientFunction(v)
    }
}

/// `C_Ψ f`: the function `x ↦ ⟨f, Ψ(x)⟩`.
pub fn analysis(family: &VectorFamily, f: &[C64]) -> Result<CoefficientFunction> {
    if f.len() != family.dim() {
        return Err(Error::DimensionMismatch { expected: family.dim(), found: f.len() });
    }
    Ok(CoefficientFunction((0..family.len()).map(|j| inner(f, family.row(j))).collect()))
}

/// `D_Ψ F = Σⱼ wⱼ Fⱼ Ψ(xⱼ)`.
pub fn synthesis(family: &VectorFamily, coefficients: &CoefficientFunction) -> Result<Vec<C64>> {
    if coefficients.len() != family.len() {
        return Err(Error::DimensionMismatch { expected: family.len(), found: coefficients.len() });
    }
    let mut out = vec![C64::new(0.0, 0.0); family.dim()];
    for (j, (fj, node)) in coefficients.0.iter().zip(family.space.nodes()).enumerate() {
        let c = fj * node.weight;
        for (o, p) in out.iter_mut().zip(family.row(j)) {
            *o += c * p;
        }
    }
    Ok(out)
}

/// `S_Ψ = Σⱼ wⱼ Ψ(xⱼ) Ψ(xⱼ)ᴴ`, Hermitian positive semidefinite by construction.
pub fn frame_operator(family: &VectorFamily) -> ComplexMatrix {
    let d = family.dim();
    let mut s = ComplexMatrix::zeros(d, d);
    for (j, node) in family.space.nodes().iter().enumerate() {
        let row = family.row(j);
        for a in 0..d {
            let pa = row[a] * node.weight;
            for b in a..d {
                s[(a, b)] += pa * row[b].conj();
            }
        }
    }
    for a in 0..d {
        s[(a, a)] = C64::new(s[(a, a)].re, 0.0);
        for b in a + 1..d {
            s[(b, a)] = s[(a, b)].conj();
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Frame,
    BesselOnly,
    LowerOnly,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Redundancy {
    Finite(usize),
    Infinite,
}

/// Thresholds that turn computed bounds into a [`Classification`].
///
/// The lower inequality holds when `m > relative_floor · M` and
/// `m ≥ lower_floor`; the upper one when `M ≤ upper_ceiling`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePolicy {
    pub relative_floor: f64,
    pub lower_floor: f64,
    pub upper_ceiling: f64,
    pub rank: RankPolicy,
}

impl Default for FramePolicy {
    fn default() -> Self {
        FramePolicy {
            relative_floor: 1e-8,
            lower_floor: 0.0,
            upper_ceiling: f64::INFINITY,
            rank: RankPolicy::default(),
        }
    }
}

impl FramePolicy {
    pub fn with_rank(rank: RankPolicy) -> Self {
        FramePolicy { rank, ..Self::default() }
    }

    pub fn classify(&self, lower: f64, upper: f64) -> Classification {
        let lower_ok = lower > self.relative_floor * upper && lower >= self.lower_floor;
        let upper_ok = upper <= self.upper_ceiling;
        match (lower_ok, upper_ok) {
            (true, true) => Classification::Frame,
            (false, true) => Classification::BesselOnly,
            (true, false) => Classification::LowerOnly,
            (false, false) => Classification::Neither,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    pub nodes: usize,
    pub dim: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub rank: usize,
    pub redundancy: Redundancy,
    /// Fredholm index of `C_Ψ`, `−R(Ψ)` when the redundancy is finite.
    pub index: Option<i64>,
    /// `M / m`; infinite when `m = 0`.
    pub condition: f64,
    pub classification: Classification,
    /// Zero redundancy on a family made only of quadrature cells with no
    /// repeated rows. A zero-redundancy frame forces an atomic space, so
    /// this configuration cannot survive refinement.
    pub zero_redundancy_on_continuum: bool,
}

pub fn frame_bounds(family: &VectorFamily) -> FrameReport {
    frame_bounds_with(family, &FramePolicy::default())
}

pub fn frame_bounds_with(family: &VectorFamily, policy: &FramePolicy) -> FrameReport {
    let eig = hermitian_eig(&frame_operator(family)).expect("frame operator is Hermitian by construction");
    let lower = eig.min().max(0.0);
    let upper = eig.max().max(0.0);
    let rank = numerics::rank(family.members(), &policy.rank);
    let n = family.len();
    let redundancy = n - rank;
    let condition = if lower > 0.0 { upper / lower } else { f64::INFINITY };
    let all_cells = family.space.nodes().iter().all(|node| node.provenance == Provenance::QuadratureCell);
    let zero_redundancy_on_continuum =
        redundancy == 0 && all_cells && split(family, DEFAULT_ROW_TOLERANCE).discrete.is_empty();
    FrameReport {
        nodes: n,
        dim: family.dim(),
        lower_bound: lower,
        upper_bound: upper,
        rank,
        redundancy: Redundancy::Finite(redundancy),
        index: Some(rank as i64 - n as i64),
        condition,
        classification: policy.classify(lower, upper),
        zero_redundancy_on_continuum,
    }
}

/// `S_Ψ⁻¹` for a frame; refuses when the lower bound is below the policy floor.
pub(crate) fn inverse_frame_operator(family: &VectorFamily, policy: &FramePolicy) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(&frame_operator(family))?;
    let (lower, upper) = (eig.min(), eig.max());
    if !(lower > policy.relative_floor * upper && lower > 0.0) {
        return Err(Error::NotAFrame { lower, upper });
    }
    Ok(eig.apply_function(|x| 1.0 / x))
}

/// The canonical dual `S_Ψ⁻¹Ψ`.
pub fn canonical_dual(family: &VectorFamily) -> Result<VectorFamily> {
    let inv = inverse_frame_operator(family, &FramePolicy::default())?;
    // row j of the dual is (S⁻¹ψⱼ)ᵀ, i.e. members · (S⁻¹)ᵀ
    let members = family.members.mul(&inv.transpose());
    VectorFamily::new(family.space.clone(), members)
}

/// `K_Ψ(x, y) = ⟨S_Ψ⁻¹Ψ(y), Ψ(x)⟩`, the kernel of the orthogonal projection
/// onto `Ran C_Ψ`.
pub fn kernel_matrix(family: &VectorFamily) -> Result<KernelTable> {
    let inv = inverse_frame_operator(family, &FramePolicy::default())?;
    let c = family.analysis_matrix();
    let entries = c.mul(&inv).mul(&c.adjoint());
    Ok(KernelTable::new(family.space.clone(), entries, KernelGeometry::Plain))
}

/// `(𝒦F)(x) = Σ_y w_y K(x, y) F(y)`.
pub fn kernel_project(kernel: &KernelTable, f: &CoefficientFunction) -> Result<CoefficientFunction> {
    kernel.integrate(f)
}

pub const DEFAULT_ROW_TOLERANCE: f64 = 1e-12;

/// One vector of the discrete part, with the nodes it was merged from.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMember {
    pub vector: Vec<C64>,
    pub nodes: Vec<usize>,
    /// `μ(A)` of the merged set.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub discrete: Vec<DiscreteMember>,
    /// Nodes left in the strictly continuous part, in input order.
    pub continuous_nodes: Vec<usize>,
    /// `None` when every node went into the discrete part.
    pub continuous: Option<VectorFamily>,
}

impl Split {
    pub fn discrete_vectors(&self) -> Vec<Vec<C64>> {
        self.discrete.iter().map(|m| m.vector.clone()).collect()
    }

    /// `‖C_{Ψc} f‖²_μ + Σᵢ |⟨f, ψᵢ⟩|²`.
    pub fn energy(&self, f: &[C64]) -> Result<f64> {
        let mut total: f64 = self.discrete.iter().map(|m| inner(f, &m.vector).norm_sqr()).sum();
        if let Some(c) = &self.continuous {
            total += analysis(c, f)?.norm_sq_mu(&c.weights());
        }
        Ok(total)
    }

    /// `Σᵢ ψᵢψᵢᴴ + S_{Ψc}`; equals `S_Ψ` when the merged rows were equal.
    pub fn merged_frame_operator(&self, dim: usize) -> ComplexMatrix {
        let mut s = match &self.continuous {
            Some(c) => frame_operator(c),
            None => ComplexMatrix::zeros(dim, dim),
        };
        for m in &self.discrete {
            for a in 0..dim {
                for b in 0..dim {
                    s[(a, b)] += m.vector[a] * m.vector[b].conj();
                }
            }
        }
        s
    }
}

/// Splits `Ψ = Ψ_d ∪ Ψ_c`.
///
/// Atoms and maximal groups of quadrature cells whose rows agree entrywise
/// within `row_tolerance` collapse to `ψ = μ(A)^{-1/2} Σ_{x∈A} w_x Ψ(x)`;
/// remaining cells form the strictly continuous part.
pub fn split(family: &VectorFamily, row_tolerance: f64) -> Split {
    let nodes = family.space.nodes();
    let n = family.len();
    let mut assigned = vec![false; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        assigned[i] = true;
        if nodes[i].provenance == Provenance::Atom {
            groups.push(vec![i]);
            continue;
        }
        let mut group = vec![i];
        for j in i + 1..n {
            if assigned[j] || nodes[j].provenance != Provenance::QuadratureCell {
                continue;
            }
            if group.iter().all(|&g| rows_equal(family.row(g), family.row(j), row_tolerance)) {
                group.push(j);
                assigned[j] = true;
            }
        }
        groups.push(group);
    }

    let mut discrete = Vec::new();
    let mut continuous_nodes = Vec::new();
    for group in groups {
        let first = group[0];
        if nodes[first].provenance == Provenance::QuadratureCell && group.len() == 1 {
            continuous_nodes.push(first);
            continue;
        }
        let weight: f64 = group.iter().map(|&g| nodes[g].weight).sum();
        let mut vector = vec![C64::new(0.0, 0.0); family.dim()];
        for &g in &group {
            for (v, p) in vector.iter_mut().zip(family.row(g)) {
                *v += p * nodes[g].weight;
            }
        }
        let scale = 1.0 / weight.sqrt();
        vector.iter_mut().for_each(|v| *v *= scale);
        discrete.push(DiscreteMember { vector, nodes: group, weight });
    }
    continuous_nodes.sort_unstable();

    let continuous = if continuous_nodes.is_empty() {
        None
    } else {
        let space = family.space.select(&continuous_nodes).expect("subset of a valid space");
        let rows: Vec<Vec<C64>> = continuous_nodes.iter().map(|&j| family.row(j).to_vec()).collect();
        Some(VectorFamily::from_rows(space, &rows).expect("rows of a valid family"))
    };
    Split { discrete, continuous_nodes, continuous }
}

fn rows_equal(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x.re - y.re).abs() <= tol && (x.im - y.im).abs() <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendPoint {
    pub size: usize,
    pub lower: f64,
    pub upper: f64,
    pub classification: Classification,
}

/// Frame bounds across a sequence of truncations.
///
/// Finite truncations are frames, so the infinite-dimensional behaviour shows
/// up only as drift: the first size is the baseline and is classified by the
/// default policy; every later size is classified against the baseline's
/// bounds (a lower bound that fell below the baseline's, or an upper bound
/// that rose above it, fails the corresponding inequality).
pub fn semiframe_trend<B>(mut builder: B, sizes: &[usize]) -> Result<Vec<TrendPoint>>
where
    B: FnMut(usize) -> Result<VectorFamily>,
{
    let mut out = Vec::with_capacity(sizes.len());
    let mut baseline: Option<FramePolicy> = None;
    for &size in sizes {
        let family = builder(size)?;
        let eig = hermitian_eig(&frame_operator(&family))?;
        let (lower, upper) = (eig.min().max(0.0), eig.max().max(0.0));
        let policy = match baseline {
            Some(p) => p,
            None => {
                let slack = 1e-9;
                let p = FramePolicy {
                    lower_floor: lower * (1.0 - slack),
                    upper_ceiling: upper * (1.0 + slack),
                    ..FramePolicy::default()
                };
                baseline = Some(p);
                FramePolicy::default()
            }
        };
        out.push(TrendPoint { size, lower, upper, classification: policy.classify(lower, upper) });
    }
    Ok(out)
}

/// `‖Ψ(xⱼ)‖²` per node.
pub fn node_energies(family: &VectorFamily) -> Vec<f64> {
    (0..family.len()).map(|j| norm_sq(family.row(j))).collect()
}

//! Reproducing pairs `(Ψ, Φ)`: the resolution operator
//! `S_{Ψ,Φ} = T_Φ C_Ψ`, the `⟨·,·⟩_Φ` geometry on coefficient functions, the
//! kernels `R_{Ψ,Φ}` and `K_{Ψ,Φ}`, and partner constructions.
//!
//! Every coefficient function has a bounded pairing against `Φ` on a finite
//! node set, so `T_Φ` is the weighted synthesis map on all of them.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::frames::{analysis, frame_operator, synthesis, CoefficientFunction, VectorFamily};
use crate::numerics::{self, hermitian_eig, inner, operator_norm, pinv, svd, ComplexMatrix, RankPolicy};
use crate::rkhs::{KernelGeometry, KernelTable};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPolicy {
    /// `S_{Ψ,Φ}` counts as invertible when its condition number is at most this.
    pub condition_threshold: f64,
    pub rank: RankPolicy,
}

impl Default for PairPolicy {
    fn default() -> Self {
        PairPolicy { condition_threshold: 1e10, rank: RankPolicy::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionReport {
    pub operator: ComplexMatrix,
    pub condition: f64,
    pub invertible: bool,
    pub inverse: Option<ComplexMatrix>,
}

impl ResolutionReport {
    fn require_inverse(&self) -> Result<&ComplexMatrix> {
        self.inverse.as_ref().ok_or(Error::NotInvertible { condition: self.condition })
    }
}

fn check_pair(psi: &VectorFamily, phi: &VectorFamily) -> Result<()> {
    if !psi.same_space(phi) {
        return Err(Error::SpaceMismatch);
    }
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), found: phi.dim() });
    }
    Ok(())
}

/// `S_{Ψ,Φ} f = Σⱼ wⱼ ⟨f, Ψ(xⱼ)⟩ Φ(xⱼ)`.
pub fn resolution_operator(psi: &VectorFamily, phi: &VectorFamily) -> Result<ResolutionReport> {
    resolution_operator_with(psi, phi, &PairPolicy::default())
}

pub fn resolution_operator_with(
    psi: &VectorFamily,
    phi: &VectorFamily,
    policy: &PairPolicy,
) -> Result<ResolutionReport> {
    check_pair(psi, phi)?;
    let operator = phi.synthesis_matrix().mul(&psi.analysis_matrix());
    let condition = numerics::condition_number(&operator);
    let invertible = condition <= policy.condition_threshold;
    let inverse = invertible.then(|| pinv(&operator, &policy.rank));
    Ok(ResolutionReport { operator, condition, invertible, inverse })
}

/// `T_Φ F = Σⱼ wⱼ Fⱼ Φ(xⱼ)`.
pub fn t_phi(phi: &VectorFamily, f: &CoefficientFunction) -> Result<Vec<C64>> {
    synthesis(phi, f)
}

/// `R(Φ) = dim ker T_Φ`.
pub fn pair_redundancy(phi: &VectorFamily) -> usize {
    pair_redundancy_with(phi, &RankPolicy::default())
}

pub fn pair_redundancy_with(phi: &VectorFamily, policy: &RankPolicy) -> usize {
    phi.len() - numerics::rank(&phi.synthesis_matrix(), policy)
}

/// `R(Φ)` across a sequence of refinements; an empirical probe only.
pub fn redundancy_probe<B>(mut builder: B, sizes: &[usize]) -> Result<Vec<(usize, usize, usize, usize)>>
where
    B: FnMut(usize) -> Result<VectorFamily>,
{
    sizes
        .iter()
        .map(|&size| {
            let phi = builder(size)?;
            Ok((size, phi.len(), phi.dim(), pair_redundancy(&phi)))
        })
        .collect()
}

/// The sesquilinear form `⟨F, G⟩_Φ = ⟨T_Φ F, T_Φ G⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiGeometry {
    base: VectorFamily,
    gram: ComplexMatrix,
}

impl PhiGeometry {
    pub fn new(phi: &VectorFamily) -> Self {
        // gram[x, y] = wₓ w_y ⟨Φ(x), Φ(y)⟩
        let t = phi.synthesis_matrix();
        let gram = t.transpose().mul(&t.conj());
        PhiGeometry { base: phi.clone(), gram }
    }

    pub fn base(&self) -> &VectorFamily {
        &self.base
    }

    /// Weighted Gram table, so that `⟨F, G⟩_Φ = Σ F(x) gram[x, y] conj(G(y))`.
    pub fn gram(&self) -> &ComplexMatrix {
        &self.gram
    }
}

pub fn phi_inner(geometry: &PhiGeometry, f: &CoefficientFunction, g: &CoefficientFunction) -> Result<C64> {
    let tf = t_phi(&geometry.base, f)?;
    let tg = t_phi(&geometry.base, g)?;
    Ok(inner(&tf, &tg))
}

/// `R_{Ψ,Φ}(x, y) = ⟨S_{Ψ,Φ}⁻¹Φ(y), Ψ(x)⟩`; the induced operator is the
/// projection onto `Ran C_Ψ` along `ker T_Φ`.
pub fn pair_kernel_r(psi: &VectorFamily, phi: &VectorFamily) -> Result<KernelTable> {
    let report = resolution_operator(psi, phi)?;
    let inv = report.require_inverse()?;
    let entries = psi.analysis_matrix().mul(inv).mul(&phi.members().transpose());
    Ok(KernelTable::new(psi.space().clone(), entries, KernelGeometry::Oblique))
}

/// The kernel of `(Ran C_Ψ, ‖·‖_Φ)`: with `uₓ = S_{Φ,Ψ}⁻¹Ψ(x)`,
/// `K[x, y] = ⟨u_y, uₓ⟩`, so column `x` is `y ↦ ⟨uₓ, u_y⟩`.
pub fn pair_kernel_k(psi: &VectorFamily, phi: &VectorFamily) -> Result<KernelTable> {
    let report = resolution_operator(psi, phi)?;
    let inv = report.require_inverse()?;
    // S_{Φ,Ψ}⁻¹ = (S_{Ψ,Φ}⁻¹)ᴴ; columns of u are the uₓ
    let u = inv.adjoint().mul(&psi.members().transpose());
    let mut entries = u.adjoint().mul(&u);
    let n = entries.rows();
    for x in 0..n {
        entries[(x, x)] = C64::new(entries[(x, x)].re, 0.0);
        for y in x + 1..n {
            entries[(y, x)] = entries[(x, y)].conj();
        }
    }
    Ok(KernelTable::new(psi.space().clone(), entries, KernelGeometry::PhiWeighted(PhiGeometry::new(phi))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameTransfer {
    /// `Hᵢ = C_Ψ gᵢ`.
    pub functions: Vec<CoefficientFunction>,
    /// `hᵢ = T_Φ Hᵢ = S_{Ψ,Φ} gᵢ`.
    pub companions: Vec<Vec<C64>>,
    /// Frame bounds of `{gᵢ}` in `ℂᵈ`.
    pub source_bounds: (f64, f64),
    /// Frame bounds of `{Hᵢ}` in `(Ran C_Ψ, ⟨·,·⟩_Φ)`.
    pub bounds: (f64, f64),
    /// `[m_g / ‖S⁻¹‖², M_g ‖S‖²]`.
    pub interval: (f64, f64),
}

impl FrameTransfer {
    pub fn within_interval(&self, tolerance: f64) -> bool {
        let (lo, hi) = self.interval;
        self.bounds.0 >= lo * (1.0 - tolerance) && self.bounds.1 <= hi * (1.0 + tolerance)
    }
}

fn vector_frame_bounds(vectors: &[Vec<C64>], d: usize) -> Result<(f64, f64)> {
    let mut s = ComplexMatrix::zeros(d, d);
    for v in vectors {
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: v.len() });
        }
        for a in 0..d {
            for b in 0..d {
                s[(a, b)] += v[a] * v[b].conj();
            }
        }
    }
    let eig = hermitian_eig(&s.symmetrized())?;
    Ok((eig.min().max(0.0), eig.max().max(0.0)))
}

/// Push a frame `{gᵢ}` of `ℂᵈ` to `Hᵢ = C_Ψ gᵢ`, a frame of `Ran C_Ψ` in the
/// `Φ` geometry.
pub fn frame_transfer(psi: &VectorFamily, phi: &VectorFamily, g: &[Vec<C64>]) -> Result<FrameTransfer> {
    let report = resolution_operator(psi, phi)?;
    report.require_inverse()?;
    let d = psi.dim();
    let source_bounds = vector_frame_bounds(g, d)?;
    if !(source_bounds.0 > 1e-8 * source_bounds.1 && source_bounds.0 > 0.0) {
        return Err(Error::NotAFrame { lower: source_bounds.0, upper: source_bounds.1 });
    }
    let mut functions = Vec::with_capacity(g.len());
    let mut companions = Vec::with_capacity(g.len());
    for gi in g {
        let h = analysis(psi, gi)?;
        companions.push(t_phi(phi, &h)?);
        functions.push(h);
    }
    // T_Φ is an isometry from (Ran C_Ψ, ‖·‖_Φ) onto ℂᵈ
    let bounds = vector_frame_bounds(&companions, d)?;
    let s = svd(&report.operator);
    let s_max = s.max();
    let s_min = s.singular_values.last().copied().unwrap_or(0.0);
    let interval = (source_bounds.0 * s_min * s_min, source_bounds.1 * s_max * s_max);
    Ok(FrameTransfer { functions, companions, source_bounds, bounds, interval })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedDual {
    pub dual: VectorFamily,
    /// `Θₙ = P V* eₙ`.
    pub theta: Vec<CoefficientFunction>,
    /// Bessel bound of `{Θₙ}` in `L²(μ)`.
    pub theta_bessel_bound: f64,
    /// `‖V‖²` with `V` the pseudoinverse of the weighted analysis map.
    pub pinv_norm_squared: f64,
    /// Upper frame bound of the dual.
    pub dual_bessel_bound: f64,
}

/// `Φ(x) = Σₙ conj(Θₙ(x)) eₙ` with `Θₙ = P V* eₙ`, where `V` inverts `C_Ψ`
/// on its range and `P` projects onto `Ran C_Ψ`.
pub fn lower_semiframe_dual(psi: &VectorFamily) -> Result<CorrectedDual> {
    let policy = RankPolicy::default();
    let d = psi.dim();
    let n = psi.len();
    let weights = psi.weights();
    let sqrt_w: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let c_hat = psi.weighted_analysis_matrix();
    let rank = numerics::rank(&c_hat, &policy);
    if rank < d {
        return Err(Error::NotInjective { rank, dim: d });
    }
    let c_hat_pinv = pinv(&c_hat, &policy);
    // P in weighted coordinates, from the left singular vectors of Ĉ
    let u = svd(&c_hat).u;
    let p_hat = ComplexMatrix::from_fn(n, n, |x, y| (0..d).map(|k| u[(x, k)] * u[(y, k)].conj()).sum());
    // V* eₙ = W^{-1/2} (Ĉ⁺)ᴴ eₙ
    let theta_hat = p_hat.mul(&c_hat_pinv.adjoint());
    let theta = ComplexMatrix::from_fn(n, d, |j, a| theta_hat[(j, a)] / sqrt_w[j]);
    let dual = VectorFamily::new(psi.space().clone(), theta.conj())?;

    let theta_bessel_bound = operator_norm(&theta_hat).powi(2);
    let pinv_norm_squared = operator_norm(&c_hat_pinv).powi(2);
    let dual_bessel_bound = hermitian_eig(&frame_operator(&dual))?.max();
    Ok(CorrectedDual {
        dual,
        theta: (0..d).map(|a| CoefficientFunction(theta.column(a))).collect(),
        theta_bessel_bound,
        pinv_norm_squared,
        dual_bessel_bound,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partner {
    pub partner: VectorFamily,
    /// Minimal-norm solutions `ℰᵢ` of `T_Φ ℰᵢ = eᵢ`.
    pub preimages: Vec<CoefficientFunction>,
    /// `Σᵢ |ℰᵢ(xⱼ)|²` per node.
    pub node_sums: Vec<f64>,
}

/// `Ψ(x) = Σᵢ conj(ℰᵢ(x)) eᵢ`, which makes `S_{Ψ,Φ} = I`.
pub fn reproducing_partner(phi: &VectorFamily) -> Result<Partner> {
    let policy = RankPolicy::default();
    let d = phi.dim();
    let n = phi.len();
    let sqrt_w: Vec<f64> = phi.weights().iter().map(|w| w.sqrt()).collect();
    // T_Φ W^{-1/2}, an operator on unweighted ℂⁿ
    let t_hat = ComplexMatrix::from_fn(d, n, |a, j| phi.members()[(j, a)] * sqrt_w[j]);
    let rank = numerics::rank(&t_hat, &policy);
    if rank < d {
        return Err(Error::NotSurjective { rank, dim: d });
    }
    let g = pinv(&t_hat, &policy);
    let e = ComplexMatrix::from_fn(n, d, |j, i| g[(j, i)] / sqrt_w[j]);
    let partner = VectorFamily::new(phi.space().clone(), e.conj())?;
    let node_sums = (0..n).map(|j| numerics::norm_sq(e.row(j))).collect();
    Ok(Partner { partner, preimages: (0..d).map(|i| CoefficientFunction(e.column(i))).collect(), node_sums })
}

#![allow(dead_code)]

use framelab_core::frames::{CoefficientFunction, VectorFamily};
use framelab_core::measure::{DiscretizedSpace, Node};
use framelab_core::numerics::ComplexMatrix;
use framelab_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c64(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    (0..d).map(|_| c64(rng)).collect()
}

pub fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    let v = vector(rng, d);
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Atoms with weights drawn from `[0.5, 1.5)`.
pub fn weighted_space(rng: &mut ChaCha8Rng, n: usize) -> DiscretizedSpace {
    DiscretizedSpace::new((0..n).map(|i| Node::atom(format!("{i}"), rng.gen_range(0.5..1.5))).collect()).unwrap()
}

pub fn family_on(rng: &mut ChaCha8Rng, space: &DiscretizedSpace, d: usize) -> VectorFamily {
    let members = ComplexMatrix::from_fn(space.len(), d, |_, _| c64(rng));
    VectorFamily::new(space.clone(), members).unwrap()
}

pub fn random_family(rng: &mut ChaCha8Rng, n: usize, d: usize) -> VectorFamily {
    let space = weighted_space(rng, n);
    family_on(rng, &space, d)
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Modified Gram-Schmidt with one re-orthogonalization pass; columns whose
/// residual falls below `drop * (original norm)` are discarded.
pub fn gram_schmidt(columns: &[Vec<C64>], drop: f64) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for col in columns {
        let norm0 = dot(col, col).re.sqrt();
        let mut v = col.clone();
        for _ in 0..2 {
            for q in &out {
                let p = dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= p * qi;
                }
            }
        }
        let nv = dot(&v, &v).re.sqrt();
        if nv > drop * norm0 && nv > 0.0 {
            out.push(v.into_iter().map(|z| z / nv).collect());
        }
    }
    out
}

/// `K(x, y)` of the μ-orthogonal projection onto the span of `functions`,
/// assembled from a Gram-Schmidt basis of `W^{1/2}F`.
pub fn projector_kernel(functions: &[Vec<C64>], weights: &[f64]) -> ComplexMatrix {
    let n = weights.len();
    let sqrt_w: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let scaled: Vec<Vec<C64>> = functions.iter().map(|f| f.iter().zip(&sqrt_w).map(|(v, s)| v * s).collect()).collect();
    let q = gram_schmidt(&scaled, 1e-9);
    ComplexMatrix::from_fn(n, n, |x, y| {
        let s: C64 = q.iter().map(|col| col[x] * col[y].conj()).sum();
        s / (sqrt_w[x] * sqrt_w[y])
    })
}

/// Columns of the analysis matrix, i.e. `C_Ψ eₐ`.
pub fn analysis_columns(family: &VectorFamily) -> Vec<Vec<C64>> {
    (0..family.dim()).map(|a| (0..family.len()).map(|j| family.members()[(j, a)].conj()).collect()).collect()
}

/// `Σⱼ wⱼ Φ(xⱼ) conj(Ψ(xⱼ))ᵀ` by direct summation.
pub fn brute_resolution(psi: &VectorFamily, phi: &VectorFamily) -> ComplexMatrix {
    let d = psi.dim();
    let w = psi.weights();
    ComplexMatrix::from_fn(d, d, |a, b| {
        (0..psi.len()).map(|j| phi.members()[(j, a)] * psi.members()[(j, b)].conj() * w[j]).sum()
    })
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn identity_gap(a: &ComplexMatrix) -> f64 {
    max_abs_diff(a, &ComplexMatrix::identity(a.rows()))
}

pub fn to_function(v: Vec<C64>) -> CoefficientFunction {
    CoefficientFunction(v)
}

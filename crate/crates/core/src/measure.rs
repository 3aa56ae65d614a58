//! Measure spaces `(X, μ)` built from atoms and diffuse segments, their
//! atomic/diffuse decomposition, equal-measure subsets and midpoint
//! discretization.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Density of a diffuse segment: `c` or `c·r^(k−1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    Constant { c: f64 },
    Power { c: f64, k: f64 },
}

impl Density {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Density::Constant { c } => c,
            Density::Power { c, k } => c * r.powf(k - 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub label: String,
    pub weight: f64,
}

impl Atom {
    pub fn new(label: impl Into<String>, weight: f64) -> Self {
        Atom { label: label.into(), weight }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub density: Density,
}

impl Segment {
    pub fn new(lo: f64, hi: f64, density: Density) -> Self {
        Segment { lo, hi, density }
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        Segment::new(lo, hi, Density::Constant { c: 1.0 })
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidMeasure(format!("segment [{}, {}] must satisfy lo < hi", self.lo, self.hi)));
        }
        match self.density {
            Density::Constant { c } if c.is_finite() && c >= 0.0 => Ok(()),
            Density::Power { c, k } if c.is_finite() && c >= 0.0 && k.is_finite() && k > 0.0 => {
                if self.lo < 0.0 {
                    Err(Error::InvalidMeasure(String::from("power densities need lo >= 0")))
                } else {
                    Ok(())
                }
            }
            _ => Err(Error::InvalidMeasure(String::from("density parameters out of range"))),
        }
    }

    /// `μ([lo, t])` for `lo ≤ t ≤ hi`.
    pub fn measure_to(&self, t: f64) -> f64 {
        let d = t - self.lo;
        match self.density {
            Density::Constant { c } => c * d,
            Density::Power { c, k } => {
                if self.lo == 0.0 {
                    c * t.powf(k) / k
                } else {
                    // lo^k · ((1 + d/lo)^k − 1) without cancellation
                    c * self.lo.powf(k) * (k * (d / self.lo).ln_1p()).exp_m1() / k
                }
            }
        }
    }

    pub fn measure(&self) -> f64 {
        self.measure_to(self.hi)
    }

    /// `μ([a, b])` for `lo ≤ a ≤ b ≤ hi`.
    pub fn measure_between(&self, a: f64, b: f64) -> f64 {
        self.measure_to(b) - self.measure_to(a)
    }

    /// Smallest `t` with `μ([lo, t]) = b`, by closed-form inversion of the
    /// cumulative density.
    fn invert(&self, b: f64) -> f64 {
        let t = match self.density {
            Density::Constant { c } => {
                if c == 0.0 {
                    self.lo
                } else {
                    self.lo + b / c
                }
            }
            Density::Power { c, k } => {
                if c == 0.0 {
                    self.lo
                } else if self.lo == 0.0 {
                    (b * k / c).powf(1.0 / k)
                } else {
                    let rel = b * k / (c * self.lo.powf(k));
                    self.lo + self.lo * (rel.ln_1p() / k).exp_m1()
                }
            }
        };
        t.min(self.hi).max(self.lo)
    }
}

/// A finite measure space: atoms plus pairwise disjoint diffuse segments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasureSpace {
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
}

impl MeasureSpace {
    pub fn new(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self> {
        for a in &atoms {
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(Error::InvalidMeasure(format!("atom '{}' needs positive finite weight", a.label)));
            }
        }
        for s in &segments {
            s.validate()?;
        }
        let mut sorted: Vec<&Segment> = segments.iter().collect();
        sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in sorted.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::InvalidMeasure(String::from("segments overlap")));
            }
        }
        let space = MeasureSpace { atoms, segments };
        if !space.total_measure().is_finite() {
            return Err(Error::InvalidMeasure(String::from("total measure is not finite")));
        }
        Ok(space)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.segments.is_empty()
    }

    pub fn atomic_measure(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn diffuse_measure(&self) -> f64 {
        self.segments.iter().map(Segment::measure).sum()
    }

    /// `μ(X) = μ_a(X) + μ_c(X)`.
    pub fn total_measure(&self) -> f64 {
        self.atomic_measure() + self.diffuse_measure()
    }
}

/// Splits `μ = μ_a + μ_c` into its atomic and diffuse parts.
pub fn decompose(space: &MeasureSpace) -> (MeasureSpace, MeasureSpace) {
    (
        MeasureSpace { atoms: space.atoms.clone(), segments: Vec::new() },
        MeasureSpace { atoms: Vec::new(), segments: space.segments.clone() },
    )
}

/// Inverse of [`decompose`]: the union of two spaces, rejected when segments
/// would overlap.
pub fn merge(a: &MeasureSpace, b: &MeasureSpace) -> Result<MeasureSpace> {
    let atoms = a.atoms.iter().chain(&b.atoms).cloned().collect();
    let segments = a.segments.iter().chain(&b.segments).copied().collect();
    MeasureSpace::new(atoms, segments)
}

/// A subinterval `[lo, t]` of segment `segment_index` with `μ([lo, t]) = b`.
pub fn sierpinski_subset(space: &MeasureSpace, segment_index: usize, b: f64) -> Result<(f64, f64)> {
    let seg = space
        .segments
        .get(segment_index)
        .ok_or_else(|| Error::InvalidMeasure(format!("no segment with index {segment_index}")))?;
    let available = seg.measure();
    if !(b >= 0.0 && b <= available) {
        return Err(Error::OutOfRange { requested: b, available });
    }
    if b == 0.0 {
        return Ok((seg.lo, seg.lo));
    }
    if b == available {
        return Ok((seg.lo, seg.hi));
    }
    Ok((seg.lo, seg.invert(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureClass {
    /// No diffuse part.
    Atomic,
    /// No atoms.
    NonAtomic,
    /// Both atoms and a diffuse part: not atomic, yet not free of atoms.
    AnAtomic,
}

pub fn classify(space: &MeasureSpace) -> MeasureClass {
    match (space.atoms.is_empty(), space.segments.is_empty()) {
        (_, true) => MeasureClass::Atomic,
        (true, false) => MeasureClass::NonAtomic,
        (false, false) => MeasureClass::AnAtomic,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Atom,
    QuadratureCell,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodePoint {
    Real(f64),
    Label(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub point: NodePoint,
    pub weight: f64,
    pub provenance: Provenance,
}

impl Node {
    pub fn atom(label: impl Into<String>, weight: f64) -> Self {
        Node { point: NodePoint::Label(label.into()), weight, provenance: Provenance::Atom }
    }

    pub fn cell(point: f64, weight: f64) -> Self {
        Node { point: NodePoint::Real(point), weight, provenance: Provenance::QuadratureCell }
    }
}

/// Finite carrier on which `∫ f dμ` becomes `Σ wⱼ f(xⱼ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedSpace {
    nodes: Vec<Node>,
}

impl DiscretizedSpace {
    pub fn new(nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidMeasure(String::from("a discretized space needs at least one node")));
        }
        if let Some(bad) = nodes.iter().find(|n| !(n.weight.is_finite() && n.weight > 0.0)) {
            return Err(Error::InvalidMeasure(format!("node weight {} is not positive", bad.weight)));
        }
        Ok(DiscretizedSpace { nodes })
    }

    /// `n` atoms labelled `0..n` with the given common weight (counting
    /// measure when `weight = 1`).
    pub fn atoms(n: usize, weight: f64) -> Result<Self> {
        Self::new((0..n).map(|i| Node::atom(format!("{i}"), weight)).collect())
    }

    /// `n` equal cells of `[lo, hi]` with Lebesgue weights.
    pub fn uniform_cells(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let space = MeasureSpace::new(Vec::new(), alloc::vec![Segment::uniform(lo, hi)])?;
        discretize(&space, n)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.weight).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// Sub-space made of the listed nodes (in the given order).
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        Self::new(indices.iter().map(|&i| self.nodes[i].clone()).collect())
    }
}

/// Midpoint quadrature: atoms pass through, each segment is cut into
/// `cells_per_segment` cells of equal measure, one node per cell at its
/// midpoint.
pub fn discretize(space: &MeasureSpace, cells_per_segment: usize) -> Result<DiscretizedSpace> {
    if cells_per_segment == 0 {
        return Err(Error::InvalidMeasure(String::from("cells_per_segment must be at least 1")));
    }
    let mut nodes: Vec<Node> = space.atoms.iter().map(|a| Node::atom(a.label.clone(), a.weight)).collect();
    for (index, seg) in space.segments.iter().enumerate() {
        let total = seg.measure();
        if total == 0.0 {
            // zero density carries no mass, and nodes must have positive weight
            continue;
        }
        let cell = total / cells_per_segment as f64;
        let mut left = seg.lo;
        for i in 1..=cells_per_segment {
            let right =
                if i == cells_per_segment { seg.hi } else { sierpinski_subset(space, index, cell * i as f64)?.1 };
            nodes.push(Node::cell(0.5 * (left + right), cell));
            left = right;
        }
    }
    DiscretizedSpace::new(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit() -> MeasureSpace {
        MeasureSpace::new(vec![], vec![Segment::uniform(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn decompose_partitions() {
        let s = MeasureSpace::new(vec![Atom::new("p", 0.5)], vec![Segment::uniform(0.0, 1.0)]).unwrap();
        let (a, d) = decompose(&s);
        assert_eq!(a.atoms(), &[Atom::new("p", 0.5)]);
        assert!(a.segments().is_empty());
        assert_eq!(d.segments(), s.segments());
        assert!(d.atoms().is_empty());
        assert_eq!(merge(&a, &d).unwrap(), s);

        let only_atoms = MeasureSpace::new(vec![Atom::new("a", 1.0)], vec![]).unwrap();
        let (a, d) = decompose(&only_atoms);
        assert_eq!(a, only_atoms);
        assert!(d.is_empty());
    }

    #[test]
    fn mixed_decomposition_resums() {
        let s = MeasureSpace::new(
            vec![Atom::new("a", 0.125), Atom::new("b", 2.5), Atom::new("c", 0.75)],
            vec![Segment::uniform(0.0, 1.0), Segment::new(2.0, 3.0, Density::Power { c: 2.0, k: 2.0 })],
        )
        .unwrap();
        let (a, d) = decompose(&s);
        assert_eq!(a.total_measure() + d.total_measure(), s.total_measure());
        assert!((s.total_measure() - (3.375 + 1.0 + 5.0)).abs() < 1e-12);
    }

    #[test]
    fn sierpinski_examples() {
        let (lo, hi) = sierpinski_subset(&unit(), 0, 0.3).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 0.3).abs() < 1e-15);

        let (lo, hi) = sierpinski_subset(&unit(), 0, 0.0).unwrap();
        assert_eq!(lo, hi);

        let pw = MeasureSpace::new(vec![], vec![Segment::new(0.0, 2.0, Density::Power { c: 1.0, k: 2.0 })]).unwrap();
        let (_, hi) = sierpinski_subset(&pw, 0, 1.0).unwrap();
        assert!((hi - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sierpinski_out_of_range() {
        assert!(matches!(sierpinski_subset(&unit(), 0, 1.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(sierpinski_subset(&unit(), 0, -0.1), Err(Error::OutOfRange { .. })));
        assert!(sierpinski_subset(&unit(), 3, 0.1).is_err());
    }

    #[test]
    fn discretize_examples() {
        let d = discretize(&unit(), 4).unwrap();
        let points: Vec<_> = d.nodes().iter().map(|n| n.point.clone()).collect();
        assert_eq!(
            points,
            vec![NodePoint::Real(0.125), NodePoint::Real(0.375), NodePoint::Real(0.625), NodePoint::Real(0.875)]
        );
        assert!(d.weights().iter().all(|&w| w == 0.25));
        assert!(d.nodes().iter().all(|n| n.provenance == Provenance::QuadratureCell));

        let atoms = MeasureSpace::new(vec![Atom::new("x", 1.0), Atom::new("y", 3.0)], vec![]).unwrap();
        let d = discretize(&atoms, 5).unwrap();
        assert_eq!(d.nodes(), &[Node::atom("x", 1.0), Node::atom("y", 3.0)]);

        let mixed = MeasureSpace::new(vec![Atom::new("p", 2.0)], vec![Segment::uniform(0.0, 1.0)]).unwrap();
        let d = discretize(&mixed, 2).unwrap();
        assert_eq!(d.weights(), vec![2.0, 0.5, 0.5]);
        assert_eq!(d.nodes()[0].provenance, Provenance::Atom);
    }

    #[test]
    fn discretize_rejects_zero_cells_and_empty_space() {
        assert!(discretize(&unit(), 0).is_err());
        assert!(discretize(&MeasureSpace::default(), 3).is_err());
    }

    #[test]
    fn classification() {
        let atoms = MeasureSpace::new(vec![Atom::new("x", 1.0)], vec![]).unwrap();
        let mixed = MeasureSpace::new(vec![Atom::new("x", 1.0)], vec![Segment::uniform(0.0, 1.0)]).unwrap();
        assert_eq!(classify(&atoms), MeasureClass::Atomic);
        assert_eq!(classify(&unit()), MeasureClass::NonAtomic);
        assert_eq!(classify(&mixed), MeasureClass::AnAtomic);
    }

    #[test]
    fn validation() {
        assert!(MeasureSpace::new(vec![Atom::new("x", 0.0)], vec![]).is_err());
        assert!(MeasureSpace::new(vec![], vec![Segment::uniform(1.0, 1.0)]).is_err());
        assert!(MeasureSpace::new(vec![], vec![Segment::uniform(0.0, 1.0), Segment::uniform(0.5, 2.0)]).is_err());
        assert!(MeasureSpace::new(vec![], vec![Segment::new(-1.0, 1.0, Density::Power { c: 1.0, k: 2.0 })]).is_err());
        assert!(MeasureSpace::new(vec![], vec![Segment::uniform(0.0, 1.0), Segment::uniform(1.0, 2.0)]).is_ok());
    }
}

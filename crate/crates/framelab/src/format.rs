//! JSON documents for measure spaces, families, reports and kernels.
//!
//! Complex numbers are `[re, im]` pairs; matrices are flat row-major lists of
//! pairs next to their shape.

use serde::{Deserialize, Serialize};

use framelab_core::frames::{Classification, FrameReport, Redundancy, Split, TrendPoint, VectorFamily};
use framelab_core::gallery::GallerySpec;
use framelab_core::measure::{
    discretize, Atom, Density, DiscretizedSpace, MeasureSpace, Node, NodePoint, Provenance, Segment,
};
use framelab_core::numerics::ComplexMatrix;
use framelab_core::pairs::ResolutionReport;
use framelab_core::rkhs::{BlowupRow, KernelGeometry, KernelTable};
use framelab_core::C64;

use crate::error::{AppError, Result};

pub type Pair = [f64; 2];

pub fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

pub fn complex(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DensityDoc {
    Const { c: f64 },
    Power { c: f64, k: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomDoc {
    pub label: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentDoc {
    pub lo: f64,
    pub hi: f64,
    pub density: DensityDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDoc {
    #[serde(default)]
    pub atoms: Vec<AtomDoc>,
    #[serde(default)]
    pub segments: Vec<SegmentDoc>,
}

impl MeasureDoc {
    pub fn from_space(space: &MeasureSpace) -> Self {
        MeasureDoc {
            atoms: space.atoms().iter().map(|a| AtomDoc { label: a.label.clone(), weight: a.weight }).collect(),
            segments: space
                .segments()
                .iter()
                .map(|s| SegmentDoc {
                    lo: s.lo,
                    hi: s.hi,
                    density: match s.density {
                        Density::Constant { c } => DensityDoc::Const { c },
                        Density::Power { c, k } => DensityDoc::Power { c, k },
                    },
                })
                .collect(),
        }
    }

    pub fn to_space(&self) -> Result<MeasureSpace> {
        let atoms = self.atoms.iter().map(|a| Atom::new(a.label.clone(), a.weight)).collect();
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let density = match s.density {
                    DensityDoc::Const { c } => Density::Constant { c },
                    DensityDoc::Power { c, k } => Density::Power { c, k },
                };
                Segment::new(s.lo, s.hi, density)
            })
            .collect();
        Ok(MeasureSpace::new(atoms, segments)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProvenanceDoc {
    Atom,
    Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub weight: f64,
    pub provenance: ProvenanceDoc,
}

/// A discretized space, given either node by node or as a measure space plus
/// a cell count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceDoc {
    Nodes { nodes: Vec<NodeDoc> },
    Measure { measure: MeasureDoc, cells: usize },
}

impl SpaceDoc {
    pub fn from_space(space: &DiscretizedSpace) -> Self {
        let nodes = space
            .nodes()
            .iter()
            .map(|n| {
                let (point, label) = match &n.point {
                    NodePoint::Real(x) => (Some(*x), None),
                    NodePoint::Label(s) => (None, Some(s.clone())),
                };
                let provenance = match n.provenance {
                    Provenance::Atom => ProvenanceDoc::Atom,
                    Provenance::QuadratureCell => ProvenanceDoc::Cell,
                };
                NodeDoc { point, label, weight: n.weight, provenance }
            })
            .collect();
        SpaceDoc::Nodes { nodes }
    }

    pub fn to_space(&self) -> Result<DiscretizedSpace> {
        match self {
            SpaceDoc::Measure { measure, cells } => Ok(discretize(&measure.to_space()?, *cells)?),
            SpaceDoc::Nodes { nodes } => {
                let nodes = nodes
                    .iter()
                    .enumerate()
                    .map(|(i, n)| match n.provenance {
                        ProvenanceDoc::Atom => {
                            Ok(Node::atom(n.label.clone().unwrap_or_else(|| i.to_string()), n.weight))
                        }
                        ProvenanceDoc::Cell => {
                            let x = n.point.ok_or_else(|| AppError::invalid(format!("cell node {i} has no point")))?;
                            Ok(Node::cell(x, n.weight))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(DiscretizedSpace::new(nodes)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MembersDoc {
    Rows(Vec<Vec<Pair>>),
    Flat(Vec<Pair>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub space: SpaceDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub members: MembersDoc,
}

impl FamilyDoc {
    pub fn from_family(family: &VectorFamily) -> Self {
        FamilyDoc {
            space: SpaceDoc::from_space(family.space()),
            dim: Some(family.dim()),
            members: MembersDoc::Flat(family.members().entries().iter().copied().map(pair).collect()),
        }
    }

    pub fn to_family(&self) -> Result<VectorFamily> {
        let space = self.space.to_space()?;
        let n = space.len();
        let members = match &self.members {
            MembersDoc::Rows(rows) => {
                let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().copied().map(complex).collect()).collect();
                if rows.len() != n {
                    return Err(AppError::invalid(format!("{} member rows for {n} nodes", rows.len())));
                }
                ComplexMatrix::from_rows(&rows)?
            }
            MembersDoc::Flat(flat) => {
                let d = match self.dim {
                    Some(d) => d,
                    None if n > 0 && flat.len() % n == 0 => flat.len() / n,
                    None => return Err(AppError::invalid("flat members need a \"dim\" field")),
                };
                if flat.len() != n * d {
                    return Err(AppError::invalid(format!(
                        "{} member entries for {n} nodes of dimension {d}",
                        flat.len()
                    )));
                }
                ComplexMatrix::from_row_major(n, d, flat.iter().copied().map(complex).collect())?
            }
        };
        Ok(VectorFamily::new(space, members)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Pair>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixDoc { rows: m.rows(), cols: m.cols(), entries: m.entries().iter().copied().map(pair).collect() }
    }
}

fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::Frame => "frame",
        Classification::BesselOnly => "bessel-only",
        Classification::LowerOnly => "lower-only",
        Classification::Neither => "neither",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameReportDoc {
    pub nodes: usize,
    pub dim: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub rank: usize,
    /// `null` for infinite redundancy.
    pub redundancy: Option<usize>,
    pub index: Option<i64>,
    /// `null` when the lower bound vanishes.
    pub condition: Option<f64>,
    pub classification: &'static str,
    pub zero_redundancy_on_continuum: bool,
}

impl From<&FrameReport> for FrameReportDoc {
    fn from(r: &FrameReport) -> Self {
        FrameReportDoc {
            nodes: r.nodes,
            dim: r.dim,
            lower_bound: r.lower_bound,
            upper_bound: r.upper_bound,
            rank: r.rank,
            redundancy: match r.redundancy {
                Redundancy::Finite(k) => Some(k),
                Redundancy::Infinite => None,
            },
            index: r.index,
            condition: r.condition.is_finite().then_some(r.condition),
            classification: classification_name(r.classification),
            zero_redundancy_on_continuum: r.zero_redundancy_on_continuum,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionDoc {
    pub operator: MatrixDoc,
    pub condition: Option<f64>,
    pub invertible: bool,
    pub inverse: Option<MatrixDoc>,
}

impl From<&ResolutionReport> for ResolutionDoc {
    fn from(r: &ResolutionReport) -> Self {
        ResolutionDoc {
            operator: MatrixDoc::from_matrix(&r.operator),
            condition: r.condition.is_finite().then_some(r.condition),
            invertible: r.invertible,
            inverse: r.inverse.as_ref().map(MatrixDoc::from_matrix),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelDoc {
    pub geometry: &'static str,
    pub space: SpaceDoc,
    pub entries: MatrixDoc,
}

impl From<&KernelTable> for KernelDoc {
    fn from(k: &KernelTable) -> Self {
        KernelDoc {
            geometry: match k.geometry() {
                KernelGeometry::Plain => "plain",
                KernelGeometry::PhiWeighted(_) => "phi-weighted",
                KernelGeometry::Oblique => "oblique",
            },
            space: SpaceDoc::from_space(k.nodes()),
            entries: MatrixDoc::from_matrix(k.entries()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMemberDoc {
    pub vector: Vec<Pair>,
    pub nodes: Vec<usize>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitDoc {
    pub discrete: Vec<DiscreteMemberDoc>,
    pub continuous_nodes: Vec<usize>,
    pub continuous: Option<FamilyDoc>,
}

impl From<&Split> for SplitDoc {
    fn from(s: &Split) -> Self {
        SplitDoc {
            discrete: s
                .discrete
                .iter()
                .map(|m| DiscreteMemberDoc {
                    vector: m.vector.iter().copied().map(pair).collect(),
                    nodes: m.nodes.clone(),
                    weight: m.weight,
                })
                .collect(),
            continuous_nodes: s.continuous_nodes.clone(),
            continuous: s.continuous.as_ref().map(FamilyDoc::from_family),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendDoc {
    pub size: usize,
    pub lower: f64,
    pub upper: f64,
    pub classification: &'static str,
}

impl From<&TrendPoint> for TrendDoc {
    fn from(p: &TrendPoint) -> Self {
        TrendDoc { size: p.size, lower: p.lower, upper: p.upper, classification: classification_name(p.classification) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupDoc {
    pub n: usize,
    pub max_diag: f64,
    pub min_diag: f64,
    pub codimension: usize,
}

impl From<&BlowupRow> for BlowupDoc {
    fn from(r: &BlowupRow) -> Self {
        BlowupDoc { n: r.n, max_diag: r.max_diagonal, min_diag: r.min_diagonal, codimension: r.codimension }
    }
}

/// Gallery specs as JSON: `{"kind": "torus", "dim": 16, "grid": 64}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GalleryDoc {
    Orthonormal {
        dim: usize,
    },
    Torus {
        dim: usize,
        grid: usize,
    },
    Affine {
        cells: usize,
        grid: usize,
        #[serde(default = "one")]
        power: u32,
        #[serde(default = "one_f")]
        rate: f64,
    },
    Delta {
        size: usize,
    },
    DoubledOnb {
        dim: usize,
    },
    AugmentedOnb {
        dim: usize,
    },
    Mercedes,
    Random {
        nodes: usize,
        dim: usize,
        seed: u64,
    },
}

fn one() -> u32 {
    1
}

fn one_f() -> f64 {
    1.0
}

impl From<&GalleryDoc> for GallerySpec {
    fn from(d: &GalleryDoc) -> Self {
        match *d {
            GalleryDoc::Orthonormal { dim } => GallerySpec::Orthonormal { dim },
            GalleryDoc::Torus { dim, grid } => GallerySpec::TorusUpperSemiframe { dim, grid },
            GalleryDoc::Affine { cells, grid, power, rate } => GallerySpec::AffineCoherent { cells, grid, power, rate },
            GalleryDoc::Delta { size } => GallerySpec::DeltaCounterexample { size },
            GalleryDoc::DoubledOnb { dim } => GallerySpec::DoubledOnb { dim },
            GalleryDoc::AugmentedOnb { dim } => GallerySpec::AugmentedOnb { dim },
            GalleryDoc::Mercedes => GallerySpec::MercedesBenz,
            GalleryDoc::Random { nodes, dim, seed } => GallerySpec::RandomFrame { nodes, dim, seed },
        }
    }
}

//! Scene and foliation files (JSON) and Wavefront OBJ export.
//!
//! Floats are written with 17 significant digits so that every binary64
//! value survives a write/parse cycle unchanged.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use thiserror::Error;

use crate::foliation::{leaf, DirectingPath, Foliation};
use crate::geometry::{CrookedPlane, Mesh, MinPoint, Piece};
use crate::lorentz::{normalize_spacelike, LVec3};

/// Accepted deviation of a scene direction from unit length.
pub const SCENE_UNIT_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl FormatError {
    pub fn kind(&self) -> &'static str {
        match self {
            FormatError::Parse(_) => "ParseError",
            FormatError::Schema(_) => "SchemaError",
            FormatError::Geometry(_) => "GeometryError",
            FormatError::Io(_) => "IoError",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneRecord {
    pub vertex: [f64; 3],
    pub direction: [f64; 3],
}

impl PlaneRecord {
    pub fn from_plane(plane: &CrookedPlane) -> Self {
        PlaneRecord { vertex: plane.vertex().to_array(), direction: plane.direction().to_array() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub planes: Vec<PlaneRecord>,
}

impl Scene {
    /// Crooked planes of the scene, directions renormalized when off unit
    /// length by more than rounding.
    pub fn crooked_planes(&self) -> Result<Vec<CrookedPlane>, FormatError> {
        self.planes
            .iter()
            .enumerate()
            .map(|(i, rec)| {
                let geo = |msg: String| FormatError::Geometry(format!("plane {i}: {msg}"));
                let vertex = MinPoint::try_from(rec.vertex).map_err(|e| geo(e.to_string()))?;
                let mut dir = LVec3::try_from(rec.direction).map_err(|e| geo(e.to_string()))?;
                let q = dir.quadratic();
                if (q - 1.0).abs() > SCENE_UNIT_TOL {
                    return Err(geo(format!("direction is not unit spacelike (self-product {q})")));
                }
                if (q - 1.0).abs() > 1e-12 {
                    dir = normalize_spacelike(&dir).map_err(|e| geo(e.to_string()))?;
                }
                CrookedPlane::new(vertex, dir).map_err(|e| geo(e.to_string()))
            })
            .collect()
    }

    pub fn from_planes(planes: &[CrookedPlane]) -> Self {
        Scene { planes: planes.iter().map(PlaneRecord::from_plane).collect() }
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}

fn parse_strict<T: for<'de> Deserialize<'de>>(text: &[u8]) -> Result<T, FormatError> {
    let value: serde_json::Value = serde_json::from_slice(text).map_err(|e| FormatError::Parse(e.to_string()))?;
    serde_json::from_value(value).map_err(|e| FormatError::Schema(e.to_string()))
}

/// Parses and checks a scene file.
pub fn parse_scene(text: &[u8]) -> Result<Scene, FormatError> {
    let scene: Scene = parse_strict(text)?;
    scene.crooked_planes()?;
    Ok(scene)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Knot {
    pub t: f64,
    pub u: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathDescriptor {
    Interp { u0: [f64; 3], u1: [f64; 3] },
    Sampled { knots: Vec<Knot> },
}

impl PathDescriptor {
    pub fn from_path(path: &DirectingPath) -> Self {
        match path {
            DirectingPath::Interp { u0, u1 } => PathDescriptor::Interp { u0: u0.to_array(), u1: u1.to_array() },
            DirectingPath::Sampled { times, knots, .. } => PathDescriptor::Sampled {
                knots: times.iter().zip(knots).map(|(&t, u)| Knot { t, u: u.to_array() }).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    pub n: u32,
    pub coefficients: [f64; 6],
    pub delta: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeafSample {
    pub t: f64,
    pub vertex: [f64; 3],
    pub direction: [f64; 3],
}

impl LeafSample {
    pub fn plane(&self) -> Result<CrookedPlane, FormatError> {
        let geo = |e: crate::Error| FormatError::Geometry(format!("sample t = {}: {e}", self.t));
        let vertex = MinPoint::try_from(self.vertex).map_err(geo)?;
        let dir = LVec3::try_from(self.direction).map_err(geo)?;
        CrookedPlane::new(vertex, dir).map_err(geo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoliationFile {
    pub path: PathDescriptor,
    pub solver: SolverBlock,
    pub samples: Vec<LeafSample>,
}

impl FoliationFile {
    /// Samples the foliation at `samples` uniformly spaced times.
    pub fn from_foliation(fol: &Foliation, samples: usize) -> crate::Result<Self> {
        let samples = samples.max(2);
        let basis = fol.curve().basis();
        let leaves = (0..samples)
            .map(|i| {
                let t = if i + 1 == samples { 1.0 } else { i as f64 / (samples - 1) as f64 };
                let plane = leaf(fol, t)?;
                Ok(LeafSample { t, vertex: plane.vertex().to_array(), direction: plane.direction().to_array() })
            })
            .collect::<crate::Result<Vec<_>>>()?;
        Ok(FoliationFile {
            path: PathDescriptor::from_path(fol.path()),
            solver: SolverBlock {
                n: basis.n,
                coefficients: basis.coeffs,
                delta: basis.delta,
                residual: fol.solver_residual(),
            },
            samples: leaves,
        })
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }

    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

pub fn parse_foliation(text: &[u8]) -> Result<FoliationFile, FormatError> {
    let file: FoliationFile = parse_strict(text)?;
    for s in &file.samples {
        s.plane()?;
    }
    Ok(file)
}

/// Pretty JSON whose floats carry exactly 17 significant digits.
struct DigitsFormatter(PrettyFormatter<'static>);

impl Formatter for DigitsFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", format_f64(value))
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// 17 significant digits in scientific notation.
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, DigitsFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serializer emits UTF-8")
}

/// Writes one mesh as Wavefront OBJ (`v`, `g` and `f` records only).
pub fn write_obj<W: Write>(mesh: &Mesh, out: &mut W) -> io::Result<()> {
    for p in &mesh.vertices {
        let [x, y, z] = p.to_array();
        writeln!(out, "v {} {} {}", format_f64(x), format_f64(y), format_f64(z))?;
    }
    for piece in [Piece::Stem, Piece::WingPlus, Piece::WingMinus] {
        let faces: Vec<&[usize; 3]> = mesh
            .triangles
            .iter()
            .zip(&mesh.piece_tags)
            .filter(|(_, tag)| **tag == piece)
            .map(|(tri, _)| tri)
            .collect();
        if faces.is_empty() {
            continue;
        }
        writeln!(out, "g {}", piece.group_name())?;
        for [a, b, c] in faces {
            writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1)?;
        }
    }
    Ok(())
}

/// Writes `leaf_000.obj`, `leaf_001.obj`, ... into `dir`.
pub fn export_obj(meshes: &[Mesh], dir: &Path) -> Result<Vec<PathBuf>, FormatError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(meshes.len());
    for (i, mesh) in meshes.iter().enumerate() {
        let path = dir.join(format!("leaf_{i:03}.obj"));
        let mut out = io::BufWriter::new(fs::File::create(&path)?);
        write_obj(mesh, &mut out)?;
        out.flush()?;
        written.push(path);
    }
    Ok(written)
}

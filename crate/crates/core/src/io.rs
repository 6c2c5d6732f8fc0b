//! File formats: JSON models, query lists, and the serialized probability
//! map. All exact values travel as decimal or `num/den` strings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::point::Point;
use crate::model::{Group, ModelKind, Site, UncertainPointSet};
use crate::probmap::ProbabilityMap;
use crate::scalar::{format_rat, parse_decimal, Rat};

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub dimension: usize,
    pub model: String,
    pub points: Vec<ModelGroup>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelGroup {
    pub sites: Vec<ModelSite>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelSite {
    pub coords: Vec<String>,
    pub prob: String,
}

impl ModelFile {
    pub fn to_model(&self) -> Result<UncertainPointSet> {
        let kind = match self.model.as_str() {
            "unipoint" => ModelKind::Unipoint,
            "multipoint" => ModelKind::Multipoint,
            other => {
                return Err(Error::Parse(format!(
                    "unknown model kind {other:?} (expected unipoint or multipoint)"
                )))
            }
        };
        let mut groups = Vec::with_capacity(self.points.len());
        for g in &self.points {
            let mut sites = Vec::with_capacity(g.sites.len());
            for s in &g.sites {
                let coords = s
                    .coords
                    .iter()
                    .map(|c| parse_decimal(c))
                    .collect::<Result<Vec<Rat>>>()?;
                if coords.len() != self.dimension {
                    return Err(Error::DimensionMismatch {
                        expected: self.dimension,
                        got: coords.len(),
                    });
                }
                sites.push(Site {
                    point: Point::new(coords),
                    prob: parse_decimal(&s.prob)?,
                });
            }
            groups.push(Group { sites });
        }
        Ok(UncertainPointSet::new(self.dimension, kind, groups))
    }

    pub fn from_model(model: &UncertainPointSet) -> ModelFile {
        ModelFile {
            dimension: model.dimension,
            model: match model.kind {
                ModelKind::Unipoint => "unipoint".into(),
                ModelKind::Multipoint => "multipoint".into(),
            },
            points: model
                .groups
                .iter()
                .map(|g| ModelGroup {
                    sites: g
                        .sites
                        .iter()
                        .map(|s| ModelSite {
                            coords: s.point.coords().iter().map(format_rat).collect(),
                            prob: format_rat(&s.prob),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

pub fn load_model(json: &str) -> Result<UncertainPointSet> {
    let file: ModelFile = serde_json::from_str(json)?;
    file.to_model()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct QueryFile {
    pub queries: Vec<Vec<String>>,
}

pub fn load_queries(json: &str, dimension: usize) -> Result<Vec<Point>> {
    let file: QueryFile = serde_json::from_str(json)?;
    file.queries
        .iter()
        .map(|q| {
            if q.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: q.len(),
                });
            }
            let coords = q
                .iter()
                .map(|c| parse_decimal(c))
                .collect::<Result<Vec<Rat>>>()?;
            Ok(Point::new(coords))
        })
        .collect()
}

/// Versioned probability-map file: the arrangement data plus per-face
/// probabilities; checkpoints rebuild on load.
#[derive(Debug, Serialize, Deserialize)]
pub struct ProbMapFile {
    pub format_version: u32,
    pub lines: Vec<ProbMapLine>,
    pub events: Vec<ProbMapEvent>,
    pub initial_order: Vec<usize>,
    pub timelines: Vec<Vec<(usize, usize)>>,
    pub face_probs: Vec<String>,
    pub face_seeds: Vec<ProbMapFaceSeed>,
    pub face_vertices: Vec<Vec<Vec<String>>>,
    pub site_points: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProbMapLine {
    pub m: String,
    pub c: String,
    pub si: usize,
    pub sj: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProbMapEvent {
    pub x: String,
    pub y: String,
    pub lines: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProbMapFaceSeed {
    pub below: Option<usize>,
    pub above: Option<usize>,
    pub created_at: Option<usize>,
    pub closed_at: Option<usize>,
}

pub const PROB_MAP_FORMAT_VERSION: u32 = 1;

pub fn point_to_strings(p: &Point) -> Vec<String> {
    p.coords().iter().map(format_rat).collect()
}

pub fn point_from_strings(strs: &[String]) -> Result<Point> {
    let coords = strs
        .iter()
        .map(|c| parse_decimal(c))
        .collect::<Result<Vec<Rat>>>()?;
    Ok(Point::new(coords))
}

impl ProbabilityMap {
    pub fn to_file(&self) -> ProbMapFile {
        self.export_file()
    }

    pub fn from_file(file: ProbMapFile) -> Result<ProbabilityMap> {
        if file.format_version != PROB_MAP_FORMAT_VERSION {
            return Err(Error::Serde(format!(
                "unsupported probability-map format version {}",
                file.format_version
            )));
        }
        ProbabilityMap::import_file(file)
    }
}

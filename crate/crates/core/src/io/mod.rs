//! Dataset files and report serialization.
//!
//! Datasets are JSON documents of the form
//!
//! ```json
//! {
//!   "kind": "distribution",
//!   "grid_size": 100,
//!   "groups": [
//!     {"name": "a", "subjects": [
//!       {"id": "s1", "observations": [{"samples": [0.3, 1.2]}, {"quantiles": [...]}]}
//!     ]}
//!   ]
//! }
//! ```
//!
//! with observation tags `vector`, `quantiles`, `samples`, `laplacian`,
//! `composite` (`{"parts": [...]}`) and `index` (precomputed mode, with a
//! top-level `distances` matrix).

mod report;

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Group, Subject};
use crate::error::{Error, Result};
use crate::metric::{
    quantile_from_samples, CompositeObject, EuclideanVector, GraphLaplacian, IndexedPoint,
    MetricObject, PrecomputedSpace, QuantileDistribution, RawSampleDistribution, DEFAULT_GRID_SIZE,
};

pub use report::{
    study_csv, test_report_csv, to_json, BaselineConfig, BaselineReport, GroupRecord, StudyFile,
    TestRecord, TestReport, TOOL_NAME, TOOL_VERSION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Distribution,
    Laplacian,
    Vector,
    Composite,
    Precomputed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile {
    pub kind: DatasetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    /// Optional `[lo, hi]` bound checked against every distribution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<f64>>>,
    pub groups: Vec<GroupRecordFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupRecordFile {
    pub name: String,
    pub subjects: Vec<SubjectRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubjectRecord {
    pub id: String,
    pub observations: Vec<ObservationRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservationRecord {
    Vector(Vec<f64>),
    Quantiles(Vec<f64>),
    Samples(Vec<f64>),
    Laplacian(Vec<Vec<f64>>),
    Composite { parts: Vec<ObservationRecord> },
    Index(usize),
}

impl ObservationRecord {
    fn tag(&self) -> &'static str {
        match self {
            ObservationRecord::Vector(_) => "vector",
            ObservationRecord::Quantiles(_) => "quantiles",
            ObservationRecord::Samples(_) => "samples",
            ObservationRecord::Laplacian(_) => "laplacian",
            ObservationRecord::Composite { .. } => "composite",
            ObservationRecord::Index(_) => "index",
        }
    }

    fn allowed(&self, kind: DatasetKind) -> bool {
        matches!(
            (kind, self),
            (DatasetKind::Vector, ObservationRecord::Vector(_))
                | (DatasetKind::Distribution, ObservationRecord::Quantiles(_))
                | (DatasetKind::Distribution, ObservationRecord::Samples(_))
                | (DatasetKind::Laplacian, ObservationRecord::Laplacian(_))
                | (DatasetKind::Composite, ObservationRecord::Composite { .. })
                | (DatasetKind::Precomputed, ObservationRecord::Index(_))
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Replace each Laplacian `K` by `(K + K^T) / 2` before validation.
    pub symmetrize: bool,
}

/// Reads and validates a JSON dataset file.
pub fn load_dataset(path: impl AsRef<Path>, opts: LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_dataset(&text, opts)
}

/// Parses a JSON dataset document; schema errors carry the JSON path of the
/// offending value.
pub fn parse_dataset(text: &str, opts: LoadOptions) -> Result<Dataset> {
    let mut de = serde_json::Deserializer::from_str(text);
    let file: DatasetFile =
        serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    de.end().map_err(|e| Error::Parse {
        path: ".".into(),
        message: e.to_string(),
    })?;
    decode(&file, opts)
}

/// Builds a [`Dataset`] from its file representation.
pub fn decode(file: &DatasetFile, opts: LoadOptions) -> Result<Dataset> {
    let grid = file.grid_size.unwrap_or(DEFAULT_GRID_SIZE);
    let space = match (&file.distances, file.kind) {
        (Some(rows), _) => Some(Arc::new(
            PrecomputedSpace::from_rows(rows).map_err(|e| as_validation(e, "distances"))?,
        )),
        (None, DatasetKind::Precomputed) => {
            return Err(Error::validation(
                "distances",
                "precomputed datasets need a top-level distance matrix",
            ))
        }
        (None, _) => None,
    };
    if file.groups.is_empty() {
        return Err(Error::validation("groups", "dataset has no groups"));
    }
    let ctx = DecodeCtx {
        grid,
        support: file.support,
        symmetrize: opts.symmetrize,
        space,
    };
    let groups = file
        .groups
        .iter()
        .map(|g| {
            if g.subjects.is_empty() {
                return Err(Error::validation(
                    format!("group '{}'", g.name),
                    "group has no subjects",
                ));
            }
            let subjects = g
                .subjects
                .iter()
                .map(|s| {
                    let here = format!("group '{}'/subject '{}'", g.name, s.id);
                    if s.observations.is_empty() {
                        return Err(Error::validation(here, "subject has no observations"));
                    }
                    let obs = s
                        .observations
                        .iter()
                        .enumerate()
                        .map(|(l, o)| {
                            let loc = format!("{here}/observation {l}");
                            if !o.allowed(file.kind) {
                                return Err(Error::validation(
                                    loc,
                                    format!(
                                        "'{}' observation in a {:?} dataset",
                                        o.tag(),
                                        file.kind
                                    ),
                                ));
                            }
                            ctx.object(o, true).map_err(|e| as_validation(e, &loc))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Subject::new(s.id.clone(), obs)
                })
                .collect::<Result<Vec<_>>>()?;
            Group::new(g.name.clone(), subjects)
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(groups)
}

struct DecodeCtx {
    grid: usize,
    support: Option<[f64; 2]>,
    symmetrize: bool,
    space: Option<Arc<PrecomputedSpace>>,
}

impl DecodeCtx {
    fn object(&self, o: &ObservationRecord, top: bool) -> Result<MetricObject> {
        Ok(match o {
            ObservationRecord::Vector(x) => MetricObject::Vector(EuclideanVector::new(x.clone())?),
            ObservationRecord::Quantiles(q) => {
                self.distribution(QuantileDistribution::new(q.clone())?)?
            }
            ObservationRecord::Samples(s) => {
                let raw = RawSampleDistribution::new(s.clone())?;
                self.distribution(quantile_from_samples(&raw, self.grid)?)?
            }
            ObservationRecord::Laplacian(rows) => {
                MetricObject::Laplacian(GraphLaplacian::from_rows(rows, self.symmetrize)?)
            }
            ObservationRecord::Composite { parts } => {
                if !top {
                    return Err(Error::Domain("composite objects cannot be nested".into()));
                }
                let parts = parts
                    .iter()
                    .enumerate()
                    .map(|(i, p)| match p {
                        ObservationRecord::Index(_) => Err(Error::Domain(
                            "index observations cannot be composite parts".into(),
                        )),
                        _ => self
                            .object(p, false)
                            .map_err(|e| as_validation(e, &format!("part {i}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                MetricObject::Composite(CompositeObject::new(parts)?)
            }
            ObservationRecord::Index(u) => {
                let space = self.space.clone().ok_or_else(|| {
                    Error::Domain("index observation without a distance matrix".into())
                })?;
                MetricObject::Indexed(IndexedPoint::new(space, *u)?)
            }
        })
    }

    fn distribution(&self, q: QuantileDistribution) -> Result<MetricObject> {
        if let Some([lo, hi]) = self.support {
            q.check_support(lo, hi)?;
        }
        Ok(MetricObject::Distribution(q))
    }
}

fn as_validation(e: Error, location: &str) -> Error {
    match e {
        Error::Validation { .. } => e.context(location),
        other => Error::validation(location, other.to_string()),
    }
}

/// File representation of a dataset. Distributions are written as quantile
/// arrays; precomputed datasets carry their distance matrix.
pub fn encode(dataset: &Dataset) -> Result<DatasetFile> {
    let first = dataset
        .observations()
        .next()
        .ok_or_else(|| Error::Domain("empty dataset".into()))?;
    let kind = match first {
        MetricObject::Distribution(_) => DatasetKind::Distribution,
        MetricObject::Laplacian(_) => DatasetKind::Laplacian,
        MetricObject::Vector(_) => DatasetKind::Vector,
        MetricObject::Composite(_) => DatasetKind::Composite,
        MetricObject::Indexed(_) => DatasetKind::Precomputed,
    };
    let (grid_size, distances) = match first {
        MetricObject::Distribution(q) => (Some(q.grid_size()), None),
        MetricObject::Indexed(p) => {
            let space = p.space();
            if dataset.observations().any(|o| match o {
                MetricObject::Indexed(q) => !Arc::ptr_eq(q.space(), space),
                _ => true,
            }) {
                return Err(Error::Domain(
                    "indexed observations refer to different spaces".into(),
                ));
            }
            (None, Some(space.rows()))
        }
        _ => (None, None),
    };
    let groups = dataset
        .groups()
        .iter()
        .map(|g| GroupRecordFile {
            name: g.name().to_string(),
            subjects: g
                .subjects()
                .iter()
                .map(|s| SubjectRecord {
                    id: s.id().to_string(),
                    observations: s.observations().iter().map(record).collect(),
                })
                .collect(),
        })
        .collect();
    Ok(DatasetFile {
        kind,
        grid_size,
        support: None,
        distances,
        groups,
    })
}

fn record(o: &MetricObject) -> ObservationRecord {
    match o {
        MetricObject::Distribution(q) => ObservationRecord::Quantiles(q.values().to_vec()),
        MetricObject::Laplacian(k) => ObservationRecord::Laplacian(k.rows()),
        MetricObject::Vector(v) => ObservationRecord::Vector(v.coords().to_vec()),
        MetricObject::Composite(c) => ObservationRecord::Composite {
            parts: c.parts().iter().map(record).collect(),
        },
        MetricObject::Indexed(p) => ObservationRecord::Index(p.index()),
    }
}

/// Writes `dataset` as a JSON dataset file.
pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let text = to_json(&encode(dataset)?)?;
    std::fs::write(path.as_ref(), text)
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
}

/// Reads vector data in long format: columns `group`, `subject`, `repeat`
/// followed by one column per coordinate. Groups and subjects keep their
/// order of first appearance; repeats are ordered by the `repeat` column.
pub fn load_vector_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_vector_csv(file)
}

type CsvSubject = (String, Vec<(i64, Vec<f64>)>);

pub fn read_vector_csv<R: std::io::Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::Reader::from_reader(reader);
    let parse = |row: usize, message: String| Error::Parse {
        path: format!("row {row}"),
        message,
    };
    let headers = rdr.headers().map_err(|e| parse(0, e.to_string()))?.clone();
    let expected = ["group", "subject", "repeat"];
    if headers.len() < 4 || headers.iter().take(3).ne(expected.iter().copied()) {
        return Err(parse(
            0,
            "header must be group,subject,repeat followed by coordinate columns".into(),
        ));
    }
    let mut groups: Vec<(String, Vec<CsvSubject>)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| parse(row, e.to_string()))?;
        let repeat: i64 = rec[2]
            .trim()
            .parse()
            .map_err(|_| parse(row, format!("repeat '{}' is not an integer", &rec[2])))?;
        let coords = rec
            .iter()
            .skip(3)
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| parse(row, format!("coordinate '{v}' is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        let gi = match groups.iter().position(|(g, _)| g == &rec[0]) {
            Some(gi) => gi,
            None => {
                groups.push((rec[0].to_string(), Vec::new()));
                groups.len() - 1
            }
        };
        let subjects = &mut groups[gi].1;
        let si = match subjects.iter().position(|(s, _)| s == &rec[1]) {
            Some(si) => si,
            None => {
                subjects.push((rec[1].to_string(), Vec::new()));
                subjects.len() - 1
            }
        };
        if subjects[si].1.iter().any(|(r, _)| *r == repeat) {
            return Err(Error::validation(
                format!("group '{}'/subject '{}'", &rec[0], &rec[1]),
                format!("repeat {repeat} appears twice"),
            ));
        }
        subjects[si].1.push((repeat, coords));
    }
    let groups = groups
        .into_iter()
        .map(|(name, subjects)| {
            let subjects = subjects
                .into_iter()
                .map(|(id, mut reps)| {
                    reps.sort_by_key(|(r, _)| *r);
                    let obs = reps
                        .into_iter()
                        .map(|(r, c)| {
                            EuclideanVector::new(c)
                                .map(MetricObject::Vector)
                                .map_err(|e| {
                                    as_validation(
                                        e,
                                        &format!("group '{name}'/subject '{id}'/repeat {r}"),
                                    )
                                })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Subject::new(id, obs)
                })
                .collect::<Result<Vec<_>>>()?;
            Group::new(name, subjects)
        })
        .collect::<Result<Vec<_>>>()?;
    if groups.is_empty() {
        return Err(Error::validation("dataset", "file has no data rows"));
    }
    Dataset::new(groups)
}

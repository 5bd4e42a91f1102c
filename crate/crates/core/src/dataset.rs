//! Subjects, groups and datasets of repeatedly observed metric objects.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::metric::{distance_matrix, IndexedPoint, MetricObject, ObjectSchema, PrecomputedSpace};

/// One subject with `r_i >= 1` exchangeable repeated observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Subject {
    id: String,
    observations: Vec<MetricObject>,
}

impl Subject {
    pub fn new(id: impl Into<String>, observations: Vec<MetricObject>) -> Result<Self> {
        let id = id.into();
        if observations.is_empty() {
            return Err(Error::validation(
                format!("subject '{id}'"),
                "subject has no observations",
            ));
        }
        Ok(Self { id, observations })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn observations(&self) -> &[MetricObject] {
        &self.observations
    }

    /// Number of repeated measures `r_i`.
    pub fn repeats(&self) -> usize {
        self.observations.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    name: String,
    subjects: Vec<Subject>,
}

impl Group {
    pub fn new(name: impl Into<String>, subjects: Vec<Subject>) -> Result<Self> {
        let name = name.into();
        if subjects.is_empty() {
            return Err(Error::validation(
                format!("group '{name}'"),
                "group has no subjects",
            ));
        }
        Ok(Self { name, subjects })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn subjects(&self) -> &[Subject] {
        &self.subjects
    }

    /// `N_j`, the number of observations in the group.
    pub fn n_obs(&self) -> usize {
        self.subjects.iter().map(Subject::repeats).sum()
    }

    pub fn observations(&self) -> impl Iterator<Item = &MetricObject> {
        self.subjects.iter().flat_map(|s| s.observations.iter())
    }
}

/// `k` groups of subjects whose observations all share one [`ObjectSchema`].
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    groups: Vec<Group>,
    schema: ObjectSchema,
}

impl Dataset {
    pub fn new(groups: Vec<Group>) -> Result<Self> {
        let first = groups
            .first()
            .ok_or_else(|| Error::validation("dataset", "dataset has no groups"))?;
        let schema = first.subjects[0].observations[0].schema();
        for g in &groups {
            for s in &g.subjects {
                for (l, o) in s.observations.iter().enumerate() {
                    let found = o.schema();
                    if found != schema {
                        return Err(Error::validation(
                            format!("group '{}'/subject '{}'/observation {l}", g.name, s.id),
                            format!("object schema {found} differs from dataset schema {schema}"),
                        ));
                    }
                }
            }
        }
        Ok(Self { groups, schema })
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn schema(&self) -> &ObjectSchema {
        &self.schema
    }

    /// Total number of observations `N`.
    pub fn n_obs(&self) -> usize {
        self.groups.iter().map(Group::n_obs).sum()
    }

    pub fn observations(&self) -> impl Iterator<Item = &MetricObject> {
        self.groups.iter().flat_map(|g| g.observations())
    }

    /// Replaces every observation by an index into the matrix of all
    /// pairwise distances, each computed once.
    pub fn to_precomputed(&self) -> Result<Dataset> {
        let (n, flat) = distance_matrix(self)?.into_flat();
        let space = Arc::new(PrecomputedSpace::new(n, flat)?);
        self.reindexed(space)
    }

    /// Same dataset with every distance multiplied by `c > 0`, expressed in
    /// precomputed mode.
    pub fn to_precomputed_scaled(&self, c: f64) -> Result<Dataset> {
        let (n, flat) = distance_matrix(self)?.into_flat();
        let space = Arc::new(PrecomputedSpace::new(n, flat)?.scaled(c));
        self.reindexed(space)
    }

    fn reindexed(&self, space: Arc<PrecomputedSpace>) -> Result<Dataset> {
        let mut next = 0usize;
        let groups = self
            .groups
            .iter()
            .map(|g| {
                let subjects = g
                    .subjects
                    .iter()
                    .map(|s| {
                        let obs = s
                            .observations
                            .iter()
                            .map(|_| {
                                let p = IndexedPoint::new(space.clone(), next);
                                next += 1;
                                p.map(MetricObject::Indexed)
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
}

//! Versioned JSON job documents: named spaces, measures, transfunctions,
//! rings and series, plus run parameters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{SeriesRepresentation, SeriesTerm};
use crate::measure::{AtomSet, BanachSpace, MeasurableSpace, PositiveMeasure, SignedMeasure, VectorMeasure};
use crate::ring::{ring_closure, RingSetFunction, SetRing};
use crate::transfunction::{Property, Rule, Transfunction};

pub const SCHEMA_VERSION: u32 = 1;

/// A space given by name or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Named(String),
    Inline(MeasurableSpace),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    pub space: SpaceRef,
    /// Atom masses. Exactly one of `mass` and `density` is given.
    #[serde(default)]
    pub mass: Option<Vec<f64>>,
    /// Cell densities on a grid space; mass is density times cell width.
    #[serde(default)]
    pub density: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorMeasureDoc {
    pub space: SpaceRef,
    pub codomain: BanachSpace,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransfunctionDoc {
    pub domain: SpaceRef,
    pub codomain: SpaceRef,
    pub rule: Rule,
    #[serde(default)]
    pub declared: Vec<Property>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesTermDoc {
    pub vector: Vec<f64>,
    pub mass: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDoc {
    pub space: SpaceRef,
    pub codomain: BanachSpace,
    pub terms: Vec<SeriesTermDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignedValue {
    pub set: AtomSet,
    pub value: Vec<f64>,
}

/// A set function on the ring, either induced by atom weights (additive)
/// or assigned member by member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingFunctionDoc {
    pub codomain: BanachSpace,
    #[serde(default)]
    pub weights: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub assignment: Option<Vec<AssignedValue>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingDoc {
    pub ground: SpaceRef,
    pub generators: Vec<AtomSet>,
    #[serde(default)]
    pub function: Option<RingFunctionDoc>,
    /// Sets to write as signed sums of members.
    #[serde(default)]
    pub represent: Vec<AtomSet>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub transfunction: Option<String>,
    pub measure: Option<String>,
    #[serde(default)]
    pub measures: Vec<String>,
    pub vector_measure: Option<String>,
    pub series: Option<String>,
    pub ring: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub eps: Option<f64>,
    pub tol: Option<f64>,
    pub mass_scale: Option<f64>,
    pub max_terms: Option<usize>,
    /// Also run the signed-extension property clauses.
    #[serde(default)]
    pub verify: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobDocument {
    pub version: u32,
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub spaces: BTreeMap<String, MeasurableSpace>,
    #[serde(default)]
    pub measures: BTreeMap<String, MeasureDoc>,
    #[serde(default)]
    pub vector_measures: BTreeMap<String, VectorMeasureDoc>,
    #[serde(default)]
    pub transfunctions: BTreeMap<String, TransfunctionDoc>,
    #[serde(default)]
    pub series: BTreeMap<String, SeriesDoc>,
    #[serde(default)]
    pub rings: BTreeMap<String, RingDoc>,
    #[serde(default)]
    pub params: Params,
}

fn doc_error(path: impl Into<String>, err: impl ToString) -> Error {
    Error::Document {
        path: path.into(),
        message: err.to_string(),
    }
}

/// Parses and version-checks a document; errors carry the JSON path.
pub fn parse(text: &str) -> Result<JobDocument> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: JobDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        doc_error(path, e.into_inner())
    })?;
    if doc.version != SCHEMA_VERSION {
        return Err(doc_error(
            "version",
            format!("unsupported version {}, expected {SCHEMA_VERSION}", doc.version),
        ));
    }
    Ok(doc)
}

/// The entry named by `param`, or the only entry if there is exactly one.
fn pick<'a, T>(map: &'a BTreeMap<String, T>, param: Option<&str>, section: &str, param_name: &str) -> Result<(&'a str, &'a T)> {
    match param {
        Some(name) => map
            .get_key_value(name)
            .map(|(k, v)| (k.as_str(), v))
            .ok_or_else(|| doc_error(format!("params.{param_name}"), format!("no {section} entry named `{name}`"))),
        None if map.len() == 1 => {
            let (k, v) = map.iter().next().expect("one entry");
            Ok((k.as_str(), v))
        }
        None => Err(doc_error(
            format!("params.{param_name}"),
            format!("{} {section} entries; name one", map.len()),
        )),
    }
}

impl JobDocument {
    pub fn resolve_space(&self, space: &SpaceRef, path: &str) -> Result<MeasurableSpace> {
        match space {
            SpaceRef::Inline(s) => Ok(s.clone()),
            SpaceRef::Named(name) => self
                .spaces
                .get(name)
                .cloned()
                .ok_or_else(|| doc_error(path, format!("unknown space `{name}`"))),
        }
    }

    pub fn signed_measure(&self, name: &str) -> Result<SignedMeasure> {
        let path = format!("measures.{name}");
        let doc = self
            .measures
            .get(name)
            .ok_or_else(|| doc_error("params", format!("unknown measure `{name}`")))?;
        let space = self.resolve_space(&doc.space, &format!("{path}.space"))?;
        match (&doc.mass, &doc.density) {
            (Some(mass), None) => SignedMeasure::new(space, mass.clone()).map_err(|e| doc_error(format!("{path}.mass"), e)),
            (None, Some(density)) => PositiveMeasure::from_density(space, density)
                .map(|m| m.to_signed())
                .map_err(|e| doc_error(format!("{path}.density"), e)),
            _ => Err(doc_error(path, "give exactly one of `mass` and `density`")),
        }
    }

    pub fn positive_measure(&self, name: &str) -> Result<PositiveMeasure> {
        self.signed_measure(name)?
            .to_positive()
            .map_err(|e| doc_error(format!("measures.{name}"), e))
    }

    pub fn vector_measure(&self, name: &str) -> Result<VectorMeasure> {
        let path = format!("vector_measures.{name}");
        let doc = self
            .vector_measures
            .get(name)
            .ok_or_else(|| doc_error("params", format!("unknown vector measure `{name}`")))?;
        let space = self.resolve_space(&doc.space, &format!("{path}.space"))?;
        VectorMeasure::new(space, doc.codomain, doc.values.clone()).map_err(|e| doc_error(format!("{path}.values"), e))
    }

    pub fn transfunction(&self, name: &str) -> Result<Transfunction> {
        let path = format!("transfunctions.{name}");
        let doc = self
            .transfunctions
            .get(name)
            .ok_or_else(|| doc_error("params", format!("unknown transfunction `{name}`")))?;
        let domain = self.resolve_space(&doc.domain, &format!("{path}.domain"))?;
        let codomain = self.resolve_space(&doc.codomain, &format!("{path}.codomain"))?;
        Transfunction::new(domain, codomain, doc.rule.clone())
            .map(|t| t.with_declared(doc.declared.iter().copied()))
            .map_err(|e| doc_error(format!("{path}.rule"), e))
    }

    pub fn series_representation(&self, name: &str) -> Result<SeriesRepresentation> {
        let path = format!("series.{name}");
        let doc = self
            .series
            .get(name)
            .ok_or_else(|| doc_error("params", format!("unknown series `{name}`")))?;
        let space = self.resolve_space(&doc.space, &format!("{path}.space"))?;
        let terms = doc
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let measure = PositiveMeasure::new(space.clone(), t.mass.clone())
                    .map_err(|e| doc_error(format!("{path}.terms[{i}].mass"), e))?;
                Ok(SeriesTerm {
                    vector: t.vector.clone(),
                    measure,
                })
            })
            .collect::<Result<_>>()?;
        SeriesRepresentation::new(space, doc.codomain, terms).map_err(|e| doc_error(format!("{path}.terms"), e))
    }

    pub fn ring(&self, name: &str) -> Result<(SetRing, Option<RingSetFunction>)> {
        let path = format!("rings.{name}");
        let doc = self
            .rings
            .get(name)
            .ok_or_else(|| doc_error("params", format!("unknown ring `{name}`")))?;
        let ground = self.resolve_space(&doc.ground, &format!("{path}.ground"))?;
        let ring = ring_closure(&ground, &doc.generators).map_err(|e| doc_error(format!("{path}.generators"), e))?;
        let function = match &doc.function {
            None => None,
            Some(f) => {
                let fpath = format!("{path}.function");
                Some(match (&f.weights, &f.assignment) {
                    (Some(w), None) => RingSetFunction::induced(ring.clone(), f.codomain, w)
                        .map_err(|e| doc_error(format!("{fpath}.weights"), e))?,
                    (None, Some(a)) => RingSetFunction::from_assignment(
                        ring.clone(),
                        f.codomain,
                        a.iter().map(|v| (v.set.clone(), v.value.clone())).collect(),
                    )
                    .map_err(|e| doc_error(format!("{fpath}.assignment"), e))?,
                    _ => return Err(doc_error(fpath, "give exactly one of `weights` and `assignment`")),
                })
            }
        };
        Ok((ring, function))
    }

    pub fn pick_transfunction(&self) -> Result<(String, Transfunction)> {
        let (name, _) = pick(&self.transfunctions, self.params.transfunction.as_deref(), "transfunctions", "transfunction")?;
        Ok((name.to_owned(), self.transfunction(name)?))
    }

    pub fn pick_measure(&self) -> Result<(String, SignedMeasure)> {
        let (name, _) = pick(&self.measures, self.params.measure.as_deref(), "measures", "measure")?;
        Ok((name.to_owned(), self.signed_measure(name)?))
    }

    pub fn pick_vector_measure(&self) -> Result<(String, VectorMeasure)> {
        let (name, _) = pick(
            &self.vector_measures,
            self.params.vector_measure.as_deref(),
            "vector_measures",
            "vector_measure",
        )?;
        Ok((name.to_owned(), self.vector_measure(name)?))
    }

    pub fn pick_series(&self) -> Result<Option<(String, SeriesRepresentation)>> {
        if self.params.series.is_none() && self.series.is_empty() {
            return Ok(None);
        }
        let (name, _) = pick(&self.series, self.params.series.as_deref(), "series", "series")?;
        Ok(Some((name.to_owned(), self.series_representation(name)?)))
    }

    pub fn pick_ring(&self) -> Result<(String, SetRing, Option<RingSetFunction>)> {
        let (name, _) = pick(&self.rings, self.params.ring.as_deref(), "rings", "ring")?;
        let (ring, f) = self.ring(name)?;
        Ok((name.to_owned(), ring, f))
    }

    /// `params.measures` if given, otherwise every measure in name order.
    pub fn positive_family(&self) -> Result<Vec<(String, PositiveMeasure)>> {
        let names: Vec<String> = if self.params.measures.is_empty() {
            self.measures.keys().cloned().collect()
        } else {
            self.params.measures.clone()
        };
        names
            .into_iter()
            .map(|n| {
                let m = self.positive_measure(&n)?;
                Ok((n, m))
            })
            .collect()
    }

    pub fn represent_targets(&self, ring_name: &str) -> Vec<AtomSet> {
        self.rings.get(ring_name).map(|r| r.represent.clone()).unwrap_or_default()
    }
}

//! JSON model files.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "name": "example",
//!   "phi": ["p0", "p1", ...],
//!   "group": {
//!     "elements": [{"name": "e", "action": [0, 1, ...]},
//!                  {"name": "r", "action": "(p0 p1 p2)(p3 p4)"}],
//!     "cayley": [[0, 1], [1, 0]]
//!   },
//!   "experiments": [{"label": "a", "values": {"p0": "+", ...},
//!                    "value_order": ["+", "-"], "eigenvalues": {"+": 1, "-": -1}}],
//!   "connections": [{"from": "a", "to": "b", "element": "r"}],
//!   "reference": "a"
//! }
//! ```
//!
//! Without `cayley` the listed element actions are closed under composition;
//! elements found by the closure are named by the product of their discovery
//! word (`"r*s"`).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{compose, is_permutation, FiniteGroup, GroupAction, PointId};
use crate::model::{Experiment, ExperimentCatalog, ExperimentModel};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub phi: Vec<String>,
    pub group: GroupSpec,
    pub experiments: Vec<ExperimentSpec>,
    #[serde(default)]
    pub connections: Vec<ConnectionSpec>,
    pub reference: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub elements: Vec<ElementSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cayley: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub name: String,
    pub action: PermSpec,
}

/// A permutation of Φ in index-array form (`[2, 0, 1]`: point 0 goes to
/// point 2) or in cycle notation over point ids (`"(p0 p2 p1)"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PermSpec {
    Indices(Vec<usize>),
    Cycles(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub label: String,
    /// Point id -> value.
    pub values: BTreeMap<String, String>,
    /// Value order; defaults to order of first appearance along `phi`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_order: Option<Vec<String>>,
    /// Defaults to 1, 2, ..., n in value order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSpec {
    pub from: String,
    pub to: String,
    pub element: String,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    /// Pretty JSON with a trailing newline; stable for a given `ModelFile`.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model file serializes");
        s.push('\n');
        s
    }

    pub fn into_model(self) -> Result<ExperimentModel> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Parse {
                path: "format_version".into(),
                message: format!("unsupported version {}", self.format_version),
            });
        }
        if self.phi.is_empty() {
            return Err(Error::InvalidModel("phi is empty".into()));
        }
        let point_index: HashMap<&str, PointId> = self.phi.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
        if point_index.len() != self.phi.len() {
            return Err(Error::Parse { path: "phi".into(), message: "duplicate point id".into() });
        }

        let mut perms = Vec::with_capacity(self.group.elements.len());
        for (i, el) in self.group.elements.iter().enumerate() {
            let path = format!("group.elements[{i}].action");
            let perm = parse_perm(&el.action, &point_index, self.phi.len(), &path, &el.name)?;
            perms.push(perm);
        }
        let names: Vec<String> = self.group.elements.iter().map(|e| e.name.clone()).collect();
        let (names, perms, group) = match &self.group.cayley {
            Some(table) => {
                let group = FiniteGroup::from_cayley(names.clone(), table.clone())?;
                (names, perms, group)
            }
            None => close_group(names, perms)?,
        };
        let group = Arc::new(group);
        let action = GroupAction::new(group.clone(), self.phi.clone(), perms)?;

        let mut experiments = Vec::with_capacity(self.experiments.len());
        for (i, spec) in self.experiments.iter().enumerate() {
            experiments.push(build_experiment(spec, &self.phi, &point_index, i)?);
        }
        let label_index: HashMap<&str, usize> =
            experiments.iter().enumerate().map(|(i, e)| (e.label(), i)).collect();
        let mut connections = BTreeMap::new();
        for (i, c) in self.connections.iter().enumerate() {
            let path = format!("connections[{i}]");
            let a = *label_index.get(c.from.as_str()).ok_or_else(|| Error::UnresolvedReference {
                path: format!("{path}.from"),
                name: c.from.clone(),
            })?;
            let b = *label_index.get(c.to.as_str()).ok_or_else(|| Error::UnresolvedReference {
                path: format!("{path}.to"),
                name: c.to.clone(),
            })?;
            let g = names.iter().position(|n| n == &c.element).ok_or_else(|| Error::UnresolvedReference {
                path: format!("{path}.element"),
                name: c.element.clone(),
            })?;
            if connections.insert((a, b), g).is_some() {
                return Err(Error::Parse {
                    path,
                    message: format!("connection ({}, {}) declared twice", c.from, c.to),
                });
            }
        }
        let reference = *label_index.get(self.reference.as_str()).ok_or_else(|| Error::UnresolvedReference {
            path: "reference".into(),
            name: self.reference.clone(),
        })?;
        let catalog = ExperimentCatalog::new(experiments, connections, reference)?;
        ExperimentModel::new(self.name, action, catalog)
    }

    /// Canonical file for a model: index-array actions, explicit Cayley table,
    /// explicit value orders and eigenvalues.
    pub fn from_model(model: &ExperimentModel) -> Self {
        let group = model.group();
        let action = model.action();
        let elements = group
            .elements()
            .map(|g| ElementSpec {
                name: group.name(g).to_string(),
                action: PermSpec::Indices(action.perm(g).to_vec()),
            })
            .collect();
        let experiments = model
            .experiments()
            .iter()
            .map(|e| ExperimentSpec {
                label: e.label().to_string(),
                values: action
                    .points()
                    .iter()
                    .enumerate()
                    .map(|(p, id)| (id.clone(), e.values()[e.value_at(p)].clone()))
                    .collect(),
                value_order: Some(e.values().to_vec()),
                eigenvalues: Some(e.values().iter().cloned().zip(e.eigenvalues().iter().copied()).collect()),
            })
            .collect();
        let exps = model.experiments();
        let connections = model
            .catalog()
            .declared_connections()
            .iter()
            .map(|(&(a, b), &g)| ConnectionSpec {
                from: exps[a].label().to_string(),
                to: exps[b].label().to_string(),
                element: group.name(g).to_string(),
            })
            .collect();
        ModelFile {
            format_version: FORMAT_VERSION,
            name: model.name().to_string(),
            description: None,
            phi: action.points().to_vec(),
            group: GroupSpec { elements, cayley: Some(group.cayley().to_vec()) },
            experiments,
            connections,
            reference: exps[model.reference()].label().to_string(),
        }
    }
}

fn parse_perm(
    spec: &PermSpec,
    point_index: &HashMap<&str, PointId>,
    n: usize,
    path: &str,
    element: &str,
) -> Result<Vec<PointId>> {
    let perm = match spec {
        PermSpec::Indices(v) => v.clone(),
        PermSpec::Cycles(text) => {
            let mut perm: Vec<PointId> = (0..n).collect();
            let mut touched = BTreeSet::new();
            for cycle in text.split(')') {
                let cycle = cycle.trim();
                if cycle.is_empty() {
                    continue;
                }
                let body = cycle.strip_prefix('(').ok_or_else(|| Error::Parse {
                    path: path.into(),
                    message: format!("malformed cycle `{cycle}`"),
                })?;
                let ids: Vec<PointId> = body
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        point_index.get(t).copied().ok_or_else(|| Error::UnresolvedReference {
                            path: path.into(),
                            name: t.to_string(),
                        })
                    })
                    .collect::<Result<_>>()?;
                for (k, &p) in ids.iter().enumerate() {
                    if !touched.insert(p) {
                        return Err(Error::UnfaithfulAction {
                            element: element.into(),
                            reason: format!("point `{}` appears in two cycles", text),
                        });
                    }
                    perm[p] = ids[(k + 1) % ids.len()];
                }
            }
            perm
        }
    };
    if perm.len() != n || !is_permutation(&perm) {
        return Err(Error::UnfaithfulAction {
            element: element.into(),
            reason: format!("{path} is not a bijection of the {n} points"),
        });
    }
    Ok(perm)
}

fn close_group(names: Vec<String>, perms: Vec<Vec<PointId>>) -> Result<(Vec<String>, Vec<Vec<PointId>>, FiniteGroup)> {
    let mut by_perm: HashMap<&Vec<PointId>, &str> = HashMap::new();
    for (name, p) in names.iter().zip(&perms) {
        if let Some(prev) = by_perm.insert(p, name) {
            return Err(Error::UnfaithfulAction {
                element: name.clone(),
                reason: format!("acts exactly like `{prev}`"),
            });
        }
    }
    let mut all_names = names.clone();
    let mut all_perms = perms.clone();
    let mut index: HashMap<Vec<PointId>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let n = perms.first().map_or(0, Vec::len);
    let ident: Vec<PointId> = (0..n).collect();
    if !index.contains_key(&ident) {
        let mut name = "e".to_string();
        while all_names.contains(&name) {
            name.push('\'');
        }
        index.insert(ident.clone(), all_perms.len());
        all_names.push(name);
        all_perms.push(ident);
    }
    let mut frontier = 0;
    while frontier < all_perms.len() {
        for s in 0..perms.len() {
            let gs = compose(&all_perms[frontier], &perms[s]);
            if !index.contains_key(&gs) {
                index.insert(gs.clone(), all_perms.len());
                all_names.push(format!("{}*{}", all_names[frontier], names[s]));
                all_perms.push(gs);
            }
        }
        frontier += 1;
    }
    let cayley = all_perms
        .iter()
        .map(|g| all_perms.iter().map(|h| index[&compose(g, h)]).collect())
        .collect();
    let group = FiniteGroup::from_cayley(all_names.clone(), cayley)?;
    Ok((all_names, all_perms, group))
}

fn build_experiment(
    spec: &ExperimentSpec,
    phi: &[String],
    point_index: &HashMap<&str, PointId>,
    i: usize,
) -> Result<Experiment> {
    let path = format!("experiments[{i}]");
    for key in spec.values.keys() {
        if !point_index.contains_key(key.as_str()) {
            return Err(Error::UnresolvedReference { path: format!("{path}.values"), name: key.clone() });
        }
    }
    let mut raw = Vec::with_capacity(phi.len());
    for p in phi {
        let v = spec.values.get(p).ok_or_else(|| Error::Parse {
            path: format!("{path}.values"),
            message: format!("no value for point `{p}`"),
        })?;
        raw.push(v.clone());
    }
    let order = match &spec.value_order {
        Some(order) => {
            let listed: BTreeSet<_> = order.iter().collect();
            if let Some(v) = raw.iter().find(|v| !listed.contains(v)) {
                return Err(Error::UnresolvedReference { path: format!("{path}.value_order"), name: v.clone() });
            }
            order.clone()
        }
        None => {
            let mut order: Vec<String> = Vec::new();
            for v in &raw {
                if !order.contains(v) {
                    order.push(v.clone());
                }
            }
            order
        }
    };
    let eigenvalues = match &spec.eigenvalues {
        Some(map) => {
            if let Some(k) = map.keys().find(|k| !order.contains(k)) {
                return Err(Error::UnresolvedReference { path: format!("{path}.eigenvalues"), name: k.clone() });
            }
            order
                .iter()
                .map(|v| {
                    map.get(v).copied().ok_or_else(|| Error::Parse {
                        path: format!("{path}.eigenvalues"),
                        message: format!("no eigenvalue for value `{v}`"),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        None => (1..=order.len()).map(|k| k as f64).collect(),
    };
    let assignment = raw.iter().map(|v| order.iter().position(|o| o == v).expect("checked above")).collect();
    Experiment::new(spec.label.clone(), order, eigenvalues, assignment)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ExperimentModel> {
    let text = std::fs::read_to_string(path)?;
    ModelFile::from_json(&text)?.into_model()
}

pub fn save_model(model: &ExperimentModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, ModelFile::from_model(model).to_json())?;
    Ok(())
}

/// SHA-256 of the canonical model file.
pub fn model_hash(model: &ExperimentModel) -> String {
    let text = ModelFile::from_model(model).to_json();
    hex::encode(Sha256::digest(text.as_bytes()))
}

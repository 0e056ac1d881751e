//! Exhaustive check of the structural assumptions on an experiment model.

use serde::{Deserialize, Serialize};

use crate::group::is_permutation;
use crate::model::ExperimentModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Warning,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub id: String,
    pub statement: String,
    pub status: Status,
    pub detail: String,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionFact {
    pub from: String,
    pub to: String,
    pub element: String,
    /// `from` value -> `to` value, when the connection is valid.
    pub value_map: Option<Vec<(String, String)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentFacts {
    pub label: String,
    pub induced_subgroup: Vec<String>,
    pub induced_subgroup_order: usize,
    pub block_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub model: String,
    pub assumptions: Vec<AssumptionCheck>,
    pub experiments: Vec<ExperimentFacts>,
    pub connections: Vec<ConnectionFact>,
    pub group_order: usize,
    pub generated_order: usize,
    /// `⟨∪ G^a⟩ = G`
    pub generation_status: bool,
    /// Whether all experiments declare the same multiset of eigenvalues.
    pub eigenvalue_spectra_agree: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.assumptions.iter().all(|a| a.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.assumptions.iter().filter(|a| a.status == status).count()
    }

    pub fn check(&self, id: &str) -> Option<&AssumptionCheck> {
        self.assumptions.iter().find(|a| a.id == id)
    }
}

struct Builder {
    checks: Vec<AssumptionCheck>,
}

impl Builder {
    fn push(&mut self, id: &str, statement: &str, status: Status, detail: String, witnesses: Vec<String>) {
        self.checks.push(AssumptionCheck {
            id: id.into(),
            statement: statement.into(),
            status,
            detail,
            witnesses,
        });
    }
}

fn status_of(failures: &[String]) -> Status {
    if failures.is_empty() {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Checks the ten model assumptions by enumeration. Failures are report
/// entries; the function itself never fails.
pub fn validate_assumptions(model: &ExperimentModel) -> ValidationReport {
    let group = model.group();
    let action = model.action();
    let exps = model.experiments();
    let n_exp = exps.len();
    let mut b = Builder { checks: Vec::with_capacity(10) };

    // 1
    let few_values: Vec<String> = exps
        .iter()
        .filter(|e| e.value_count() < 2)
        .map(|e| e.label().to_string())
        .collect();
    b.push(
        "experiments",
        "there is a set of mutually exclusive experiments, each with its own parameter",
        status_of(&few_values),
        format!("{n_exp} experiment(s): {}", exps.iter().map(|e| e.label()).collect::<Vec<_>>().join(", ")),
        few_values,
    );

    // 2
    let mut tp_fail = Vec::new();
    if let Some((g, h)) = action.action_law_violation() {
        tp_fail.push(format!("action law fails for ({}, {})", group.name(g), group.name(h)));
    }
    for e in exps {
        if e.assignment().len() != model.point_count() {
            tp_fail.push(format!("{} is not total", e.label()));
        }
    }
    b.push(
        "total_parameter",
        "each parameter is a function of a total parameter on which a group acts",
        status_of(&tp_fail),
        format!("|Φ| = {}, |G| = {}, right action verified on all {} pairs", model.point_count(), group.order(), group.order() * group.order()),
        tp_fail,
    );

    // 3
    let mut facts = Vec::with_capacity(n_exp);
    let mut subgroups = Vec::with_capacity(n_exp);
    let mut trivial = Vec::new();
    let mut not_sub = Vec::new();
    for (a, e) in exps.iter().enumerate() {
        match model.derive_induced_subgroup(a) {
            Ok(sub) => {
                if sub.trivial {
                    trivial.push(e.label().to_string());
                }
                facts.push(ExperimentFacts {
                    label: e.label().into(),
                    induced_subgroup: sub.elements.iter().map(|&g| group.name(g).to_string()).collect(),
                    induced_subgroup_order: sub.elements.len(),
                    block_sizes: e.blocks().iter().map(Vec::len).collect(),
                });
                subgroups.push(sub.elements);
            }
            Err(_) => {
                not_sub.push(e.label().to_string());
                subgroups.push(vec![group.identity()]);
                facts.push(ExperimentFacts {
                    label: e.label().into(),
                    induced_subgroup: vec![],
                    induced_subgroup_order: 0,
                    block_sizes: e.blocks().iter().map(Vec::len).collect(),
                });
            }
        }
    }
    let (status, detail, witnesses) = if !not_sub.is_empty() {
        (Status::Fail, "compatible element set is not a subgroup".to_string(), not_sub)
    } else if !trivial.is_empty() {
        (Status::Warning, "induced subgroup is trivial".to_string(), trivial)
    } else {
        let orders: Vec<String> = facts.iter().map(|f| format!("|G^{}| = {}", f.label, f.induced_subgroup_order)).collect();
        (Status::Pass, orders.join(", "), vec![])
    };
    b.push(
        "induced_subgroups",
        "for each experiment a nontrivial subgroup G^a induces a transformation of its parameter",
        status,
        detail,
        witnesses,
    );

    // 4
    let mut conn_fail = Vec::new();
    let mut connections = Vec::new();
    for a in 0..n_exp {
        for c in 0..n_exp {
            let la = exps[a].label();
            let lc = exps[c].label();
            match model.connection(a, c) {
                None => conn_fail.push(format!("missing connection ({la}, {lc})")),
                Some(g) => {
                    let beta = model.value_bijection(a, c, g);
                    if beta.is_none() {
                        let why = match model.connection_witness(a, c, g) {
                            Some((p, q)) => format!(
                                "({la}, {lc}) via {}: points {} and {} separate",
                                group.name(g),
                                action.points()[p],
                                action.points()[q]
                            ),
                            None => format!("({la}, {lc}) via {}: value sets differ", group.name(g)),
                        };
                        conn_fail.push(why);
                    }
                    connections.push(ConnectionFact {
                        from: la.into(),
                        to: lc.into(),
                        element: group.name(g).into(),
                        value_map: beta.map(|beta| {
                            beta.iter()
                                .enumerate()
                                .map(|(i, &j)| (exps[a].values()[i].clone(), exps[c].values()[j].clone()))
                                .collect()
                        }),
                    });
                }
            }
        }
    }
    b.push(
        "connections",
        "for each pair a, b some g_ab transforms λ^a into λ^b",
        status_of(&conn_fail),
        format!("{} ordered pairs checked", n_exp * n_exp),
        conn_fail,
    );

    // 5
    let mut cocycle_fail = Vec::new();
    for a in 0..n_exp {
        if model.connection(a, a) != Some(group.identity()) {
            cocycle_fail.push(format!("g_{0}{0} is not the identity", exps[a].label()));
        }
    }
    for a in 0..n_exp {
        for bb in 0..n_exp {
            for c in 0..n_exp {
                if let (Some(ab), Some(bc), Some(ac)) = (model.connection(a, bb), model.connection(bb, c), model.connection(a, c)) {
                    if group.mul(ab, bc) != ac {
                        cocycle_fail.push(format!("({}, {}, {})", exps[a].label(), exps[bb].label(), exps[c].label()));
                    }
                }
            }
        }
    }
    b.push(
        "cocycle",
        "g_ac = g_ab g_bc for all triples",
        status_of(&cocycle_fail),
        format!("{} triples checked", n_exp * n_exp * n_exp),
        cocycle_fail,
    );

    // 6
    let counts: Vec<String> = exps.iter().map(|e| format!("{}: {}", e.label(), e.value_count())).collect();
    b.push(
        "finite_values",
        "each parameter takes finitely many values",
        Status::Pass,
        counts.join(", "),
        vec![],
    );

    // 7
    let phi_status = if model.point_count() > 0 { Status::Pass } else { Status::Fail };
    b.push(
        "locally_compact",
        "the total parameter space is locally compact",
        phi_status,
        format!("finite discrete space with {} points", model.point_count()),
        vec![],
    );

    // 8
    let non_bijective: Vec<String> = group
        .elements()
        .filter(|&g| !is_permutation(action.perm(g)))
        .map(|g| group.name(g).to_string())
        .collect();
    b.push(
        "invariant_measure",
        "the action has a right invariant measure",
        status_of(&non_bijective),
        "counting measure; every element acts by a bijection".into(),
        non_bijective,
    );

    // 9
    let mut group_fail = Vec::new();
    let g_count = group.order();
    'assoc: for x in 0..g_count {
        for y in 0..g_count {
            for z in 0..g_count {
                if group.mul(group.mul(x, y), z) != group.mul(x, group.mul(y, z)) {
                    group_fail.push(format!("associativity ({}, {}, {})", group.name(x), group.name(y), group.name(z)));
                    break 'assoc;
                }
            }
        }
    }
    for g in 0..g_count {
        if group.mul(g, group.inv(g)) != group.identity() {
            group_fail.push(format!("inverse of {}", group.name(g)));
        }
    }
    b.push(
        "compact_group",
        "the group is compact",
        status_of(&group_fail),
        format!("finite group of order {g_count}"),
        group_fail,
    );

    // 10
    let union: Vec<_> = subgroups.iter().flatten().copied().collect();
    let generated = group.closure(&union);
    let generates = generated.len() == g_count;
    let missing: Vec<String> = group
        .elements()
        .filter(|g| generated.binary_search(g).is_err())
        .map(|g| group.name(g).to_string())
        .collect();
    b.push(
        "generation",
        "the subgroups G^a generate G",
        if generates { Status::Pass } else { Status::Warning },
        format!("|⟨∪ G^a⟩| = {} of {}", generated.len(), g_count),
        missing,
    );

    let spectrum = |e: &crate::model::Experiment| {
        let mut v = e.eigenvalues().to_vec();
        v.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        v
    };
    let eigenvalue_spectra_agree = exps.windows(2).all(|w| spectrum(&w[0]) == spectrum(&w[1]));

    ValidationReport {
        model: model.name().to_string(),
        assumptions: b.checks,
        experiments: facts,
        connections,
        group_order: g_count,
        generated_order: generated.len(),
        generation_status: generates,
        eigenvalue_spectra_agree,
    }
}

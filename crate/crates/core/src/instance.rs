//! Unit-commitment instances: generators, demand nodes, horizon and the
//! per-period uncertainty budgets. Instances are plain data and immutable
//! once validated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{norm, NormOrder};

fn one() -> u32 {
    1
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

fn is_one(v: &u32) -> bool {
    *v == 1
}

fn is_false(v: &bool) -> bool {
    !*v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub id: String,
    /// Fixed cost per committed period.
    pub commit_cost: f64,
    pub energy_cost: f64,
    pub cap_max: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub cap_min: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub no_load_cost: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub startup_cost: f64,
    /// Absent means no ramp limit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub startup_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shutdown_rate: Option<f64>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub min_up: u32,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub min_down: u32,
    #[serde(default, skip_serializing_if = "is_false")]
    pub initial_on: bool,
}

impl GeneratorSpec {
    /// A single-period style generator with only fixed and energy costs.
    pub fn simple(id: &str, commit_cost: f64, energy_cost: f64, cap_max: f64) -> Self {
        GeneratorSpec {
            id: id.to_string(),
            commit_cost,
            energy_cost,
            cap_max,
            cap_min: 0.0,
            no_load_cost: 0.0,
            startup_cost: 0.0,
            ramp_rate: None,
            startup_rate: None,
            shutdown_rate: None,
            min_up: 1,
            min_down: 1,
            initial_on: false,
        }
    }

    /// Cost charged in every period the unit is on.
    pub fn fixed_cost_per_period(&self) -> f64 {
        self.commit_cost + self.no_load_cost
    }

    pub fn has_ramp_limits(&self) -> bool {
        self.ramp_rate.is_some() || self.startup_rate.is_some() || self.shutdown_rate.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandNode {
    pub id: String,
    pub expected_load: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintySpec {
    #[serde(rename = "norm")]
    pub norm_order: NormOrder,
    pub gamma_q: Vec<f64>,
    pub delta_p: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UCInstance {
    pub generators: Vec<GeneratorSpec>,
    pub demand_nodes: Vec<DemandNode>,
    pub periods: usize,
    pub uncertainty: UncertaintySpec,
}

/// Residual load per period and node, residual capacity per period and generator.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationVector {
    pub load_residual: Vec<Vec<f64>>,
    pub capacity_residual: Vec<Vec<f64>>,
}

impl RealizationVector {
    pub fn zeros(inst: &UCInstance) -> Self {
        RealizationVector {
            load_residual: vec![vec![0.0; inst.n_nodes()]; inst.periods],
            capacity_residual: vec![vec![0.0; inst.n_gens()]; inst.periods],
        }
    }

    pub fn in_sets(&self, inst: &UCInstance, tol: f64) -> bool {
        let order = inst.uncertainty.norm_order;
        (0..inst.periods).all(|t| {
            norm(&self.load_residual[t], order) <= inst.gamma(t) + tol
                && norm(&self.capacity_residual[t], order) <= inst.delta(t) + tol
        })
    }
}

impl UCInstance {
    pub fn n_gens(&self) -> usize {
        self.generators.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.demand_nodes.len()
    }

    pub fn total_load(&self, t: usize) -> f64 {
        self.demand_nodes.iter().map(|n| n.expected_load[t]).sum()
    }

    pub fn gamma(&self, t: usize) -> f64 {
        self.uncertainty.gamma_q[t]
    }

    pub fn delta(&self, t: usize) -> f64 {
        self.uncertainty.delta_p[t]
    }

    pub fn norm_order(&self) -> NormOrder {
        self.uncertainty.norm_order
    }

    pub fn generator_index(&self, id: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.id == id)
    }

    /// Copy with the given budgets; a single value is broadcast to every period.
    pub fn with_budgets(&self, gamma_q: &[f64], delta_p: &[f64]) -> Result<UCInstance> {
        let mut out = self.clone();
        out.uncertainty.gamma_q = broadcast(gamma_q, self.periods, "gamma_q")?;
        out.uncertainty.delta_p = broadcast(delta_p, self.periods, "delta_p")?;
        out.validate()?;
        Ok(out)
    }

    pub fn with_norm(&self, order: NormOrder) -> UCInstance {
        let mut out = self.clone();
        out.uncertainty.norm_order = order;
        out
    }

    /// Copy with all budgets set to zero.
    pub fn deterministic(&self) -> UCInstance {
        let mut out = self.clone();
        out.uncertainty.gamma_q = vec![0.0; self.periods];
        out.uncertainty.delta_p = vec![0.0; self.periods];
        out
    }

    pub fn is_deterministic(&self) -> bool {
        (0..self.periods).all(|t| self.gamma(t) == 0.0 && self.delta(t) == 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.periods < 1 {
            return Err(Error::validation("periods >= 1", "horizon is empty"));
        }
        if self.generators.is_empty() {
            return Err(Error::validation(
                "at least one generator",
                "no generators given",
            ));
        }
        if self.demand_nodes.is_empty() {
            return Err(Error::validation(
                "at least one demand node",
                "no demand nodes given",
            ));
        }
        for g in &self.generators {
            let checks = [
                (g.commit_cost >= 0.0, "commit_cost >= 0"),
                (g.energy_cost >= 0.0, "energy_cost >= 0"),
                (g.cap_min >= 0.0, "cap_min >= 0"),
                (g.cap_min <= g.cap_max, "cap_min <= cap_max"),
                (g.no_load_cost >= 0.0, "no_load_cost >= 0"),
                (g.startup_cost >= 0.0, "startup_cost >= 0"),
                (g.ramp_rate.is_none_or(|r| r >= 0.0), "ramp_rate >= 0"),
                (g.startup_rate.is_none_or(|r| r >= 0.0), "startup_rate >= 0"),
                (
                    g.shutdown_rate.is_none_or(|r| r >= 0.0),
                    "shutdown_rate >= 0",
                ),
            ];
            for (ok, rule) in checks {
                if !ok {
                    return Err(Error::validation(rule, format!("generator {}", g.id)));
                }
            }
            let nums = [
                g.commit_cost,
                g.energy_cost,
                g.cap_max,
                g.cap_min,
                g.no_load_cost,
                g.startup_cost,
            ];
            if nums.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation(
                    "finite values",
                    format!("generator {}", g.id),
                ));
            }
        }
        for n in &self.demand_nodes {
            if n.expected_load.len() != self.periods {
                return Err(Error::validation(
                    "expected_load has one value per period",
                    format!(
                        "node {} has {} values for {} periods",
                        n.id,
                        n.expected_load.len(),
                        self.periods
                    ),
                ));
            }
            if n.expected_load
                .iter()
                .any(|q| !(q.is_finite() && *q >= 0.0))
            {
                return Err(Error::validation(
                    "expected_load >= 0",
                    format!("node {}", n.id),
                ));
            }
        }
        let u = &self.uncertainty;
        for (name, v) in [("gamma_q", &u.gamma_q), ("delta_p", &u.delta_p)] {
            if v.len() != self.periods {
                return Err(Error::validation(
                    &format!("{name} has one value per period"),
                    format!("{} values for {} periods", v.len(), self.periods),
                ));
            }
            if v.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
                return Err(Error::validation(
                    &format!("{name} >= 0"),
                    "negative budget",
                ));
            }
        }
        Ok(())
    }
}

fn broadcast(v: &[f64], periods: usize, name: &str) -> Result<Vec<f64>> {
    match v.len() {
        1 => Ok(vec![v[0]; periods]),
        n if n == periods => Ok(v.to_vec()),
        n => Err(Error::Dimension(format!(
            "{name} has {n} values but the instance has {periods} periods"
        ))),
    }
}

/// Parses and validates an instance document.
pub fn load_instance(document: &str) -> Result<UCInstance> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let inst: UCInstance = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = inner.to_string();
        // Missing fields are reported one level above the field itself.
        let field = match message.split('`').nth(1) {
            Some(name) if message.starts_with("missing field") => {
                if path == "." {
                    name.to_string()
                } else {
                    format!("{path}.{name}")
                }
            }
            _ => path,
        };
        Error::Parse { field, message }
    })?;
    inst.validate()?;
    Ok(inst)
}

pub fn to_document(inst: &UCInstance) -> String {
    serde_json::to_string_pretty(inst).expect("instance serializes")
}

pub const BUILTIN_NAMES: [&str; 3] = ["scarf", "scarf-capacity", "chen-multiperiod"];

pub fn builtin_instance(name: &str) -> Result<UCInstance> {
    let inst = match name {
        "scarf" => scarf(20.0, 0.0),
        "scarf-capacity" => scarf(20.0, 0.5),
        "chen-multiperiod" => chen(),
        other => return Err(Error::UnknownInstance(other.to_string())),
    };
    inst.validate()?;
    Ok(inst)
}

fn scarf(gamma: f64, delta: f64) -> UCInstance {
    let mut generators = Vec::new();
    for i in 0..8 {
        let id = format!("G{}", i + 1);
        generators.push(if i < 2 {
            GeneratorSpec::simple(&id, 53.0, 3.0, 16.0)
        } else {
            GeneratorSpec::simple(&id, 30.0, 2.0, 7.0)
        });
    }
    let demand_nodes = [8.0, 8.0, 3.0, 5.0, 16.0]
        .iter()
        .enumerate()
        .map(|(j, q)| DemandNode {
            id: format!("N{}", j + 1),
            expected_load: vec![*q],
        })
        .collect();
    UCInstance {
        generators,
        demand_nodes,
        periods: 1,
        uncertainty: UncertaintySpec {
            norm_order: NormOrder::One,
            gamma_q: vec![gamma],
            delta_p: vec![delta],
        },
    }
}

fn chen() -> UCInstance {
    let mut g1 = GeneratorSpec::simple("G1", 0.0, 10.0, 100.0);
    g1.initial_on = true;
    let g2 = GeneratorSpec {
        cap_min: 20.0,
        no_load_cost: 30.0,
        startup_cost: 1000.0,
        ramp_rate: Some(5.0),
        startup_rate: Some(22.5),
        shutdown_rate: Some(35.0),
        ..GeneratorSpec::simple("G2", 0.0, 50.0, 35.0)
    };
    let totals = [95.0, 100.0, 130.0];
    let demand_nodes = (0..3)
        .map(|j| DemandNode {
            id: format!("N{}", j + 1),
            expected_load: totals.iter().map(|q| q / 3.0).collect(),
        })
        .collect();
    UCInstance {
        generators: vec![g1, g2],
        demand_nodes,
        periods: 3,
        uncertainty: UncertaintySpec {
            norm_order: NormOrder::One,
            gamma_q: vec![10.0, 10.0, 2.0],
            delta_p: vec![0.0, 7.5, 0.5],
        },
    }
}

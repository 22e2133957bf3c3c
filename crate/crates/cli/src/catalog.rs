//! The built-in scenario catalog behind `verify-paper`, plus the JSON codec
//! that lets `--catalog FILE` swap in a custom list. Each scenario is a
//! self-contained check with a pass/fail verdict and a detail line.

use crate::json::{self, JsonError};
use flasque_core::arith::{BaseField, FieldTowerSpec, TowerVariant};
use flasque_core::brauer::{dihedral_connector, r_count};
use flasque_core::family::{verify_family, TorusFamilyParams};
use flasque_core::gmod::{quasitrivial_cover, FiniteGModule, FiniteGroup};
use flasque_core::tate::{check_flasque_resolution, construct_flasque_resolution, is_coflasque};
use num_rational::BigRational;
use serde_json::{json, Value};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioKind {
    /// Full structural verification of the lattice family at (s, s0).
    LatticeFamily { s: u32, s0: u32 },
    /// R-equivalence class count with an expected value.
    RClasses {
        tower: FieldTowerSpec,
        expected_r: u64,
    },
    /// Flasque resolution of the kernel lattice of a cyclic module with
    /// inversion action must be flasque and coflasque.
    InversionCover { modulus: u64 },
    /// Connector polynomial identities for one (a, b) pair.
    Connector { a: BigRational, b: BigRational },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
}

#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

pub fn builtin_catalog() -> Vec<Scenario> {
    let mut out = Vec::new();
    for (s, s0) in [(3u32, 1u32), (3, 2), (4, 4), (5, 8)] {
        out.push(Scenario {
            name: format!("lattice_family_s{}_s0_{}", s, s0),
            kind: ScenarioKind::LatticeFamily { s, s0 },
        });
    }
    out.push(Scenario {
        name: "rclasses_q_sqrt17_s3".into(),
        kind: ScenarioKind::RClasses {
            tower: FieldTowerSpec::new(BaseField::Quadratic(17), 3, TowerVariant::Constant)
                .expect("valid tower"),
            expected_r: 2,
        },
    });
    out.push(Scenario {
        name: "rclasses_q_s3".into(),
        kind: ScenarioKind::RClasses {
            tower: FieldTowerSpec::new(BaseField::Rational, 3, TowerVariant::Constant)
                .expect("valid tower"),
            expected_r: 1,
        },
    });
    out.push(Scenario {
        name: "rclasses_q3_twisted_a3_s3".into(),
        kind: ScenarioKind::RClasses {
            tower: FieldTowerSpec::new(BaseField::PAdic(3), 3, TowerVariant::Twisted { a: 3 })
                .expect("valid tower"),
            expected_r: 2,
        },
    });
    for modulus in [3u64, 5] {
        out.push(Scenario {
            name: format!("inversion_cover_c{}", modulus),
            kind: ScenarioKind::InversionCover { modulus },
        });
    }
    out.push(Scenario {
        name: "connector_6_3".into(),
        kind: ScenarioKind::Connector {
            a: BigRational::from_integer(6.into()),
            b: BigRational::from_integer(3.into()),
        },
    });
    out
}

pub fn run_scenario(scenario: &Scenario) -> ScenarioOutcome {
    let (pass, detail) = match &scenario.kind {
        ScenarioKind::LatticeFamily { s, s0 } => {
            match TorusFamilyParams::with_canonical_m(*s, *s0, 1).and_then(|p| verify_family(&p)) {
                Ok(report) => {
                    let detail = report
                        .items
                        .iter()
                        .map(|i| {
                            // informational items keep their detail in the line
                            if i.pass && i.name != "xs_action_table" {
                                format!("{}: ok", i.name)
                            } else {
                                format!("{}: {}", i.name, i.detail)
                            }
                        })
                        .collect::<Vec<_>>()
                        .join("; ");
                    (report.pass(), detail)
                }
                Err(e) => (false, e.to_string()),
            }
        }
        ScenarioKind::RClasses { tower, expected_r } => match r_count(tower) {
            Ok(report) => (
                report.r == *expected_r,
                format!("r = {}, expected {}", report.r, expected_r),
            ),
            Err(e) => (false, e.to_string()),
        },
        ScenarioKind::InversionCover { modulus } => {
            let c2 = Arc::new(FiniteGroup::abelian_from_invariants(&[2]).expect("C2"));
            let result = FiniteGModule::cyclic(c2, *modulus, &[-1])
                .map_err(|e| e.to_string())
                .and_then(|a| quasitrivial_cover(&a).map_err(|e| e.to_string()))
                .and_then(|cover| {
                    construct_flasque_resolution(&cover.xt).map_err(|e| e.to_string())
                });
            match result {
                Ok(res) => {
                    let check = check_flasque_resolution(&res.inclusion, &res.restriction);
                    let coflasque = is_coflasque(&res.xs);
                    (
                        check.pass() && coflasque,
                        format!(
                            "resolution pass = {}, kernel coflasque = {}",
                            check.pass(),
                            coflasque
                        ),
                    )
                }
                Err(e) => (false, e),
            }
        }
        ScenarioKind::Connector { a, b } => match dihedral_connector(a, b) {
            Ok(c) => {
                use num_traits::{One, Zero};
                let ok = c.q.eval(&BigRational::zero()).is_one()
                    && c.q.eval(&BigRational::one()) == *b
                    && c.p.eval(&BigRational::zero()) == -BigRational::one()
                    && c.p.eval(&BigRational::one()) == *a
                    && c.p.degree() <= 2
                    && c.q.mul(&c.linear_factor) == c.p;
                (ok, format!("q = {}, p = {}", c.q, c.p))
            }
            Err(e) => (false, e.to_string()),
        },
    };
    ScenarioOutcome {
        name: scenario.name.clone(),
        pass,
        detail,
    }
}

pub fn catalog_to_value(scenarios: &[Scenario]) -> Value {
    Value::Array(
        scenarios
            .iter()
            .map(|s| {
                let kind = match &s.kind {
                    ScenarioKind::LatticeFamily { s, s0 } => {
                        json!({"lattice_family": {"s": s, "s0": s0}})
                    }
                    ScenarioKind::RClasses { tower, expected_r } => json!({
                        "rclasses": {
                            "tower": json::tower_to_value(tower),
                            "expected_r": expected_r,
                        }
                    }),
                    ScenarioKind::InversionCover { modulus } => {
                        json!({"inversion_cover": {"modulus": modulus}})
                    }
                    ScenarioKind::Connector { a, b } => json!({
                        "connector": {
                            "a": json::fraction_to_string(a),
                            "b": json::fraction_to_string(b),
                        }
                    }),
                };
                json!({"name": s.name, "kind": kind})
            })
            .collect(),
    )
}

pub fn catalog_from_value(v: &Value) -> Result<Vec<Scenario>, JsonError> {
    let arr = v
        .as_array()
        .ok_or_else(|| JsonError("catalog must be an array".into()))?;
    let mut out = Vec::new();
    let mut names = std::collections::BTreeSet::new();
    for item in arr {
        let name = item["name"]
            .as_str()
            .ok_or_else(|| JsonError("scenario.name missing".into()))?
            .to_string();
        if !names.insert(name.clone()) {
            return Err(JsonError(format!("duplicate scenario name {:?}", name)));
        }
        let kind = &item["kind"];
        let kind = if let Some(v) = kind.get("lattice_family") {
            ScenarioKind::LatticeFamily {
                s: v["s"]
                    .as_u64()
                    .ok_or_else(|| JsonError("lattice_family.s missing".into()))?
                    as u32,
                s0: v["s0"]
                    .as_u64()
                    .ok_or_else(|| JsonError("lattice_family.s0 missing".into()))?
                    as u32,
            }
        } else if let Some(v) = kind.get("rclasses") {
            ScenarioKind::RClasses {
                tower: json::tower_from_value(&v["tower"])?,
                expected_r: v["expected_r"]
                    .as_u64()
                    .ok_or_else(|| JsonError("rclasses.expected_r missing".into()))?,
            }
        } else if let Some(v) = kind.get("inversion_cover") {
            ScenarioKind::InversionCover {
                modulus: v["modulus"]
                    .as_u64()
                    .ok_or_else(|| JsonError("inversion_cover.modulus missing".into()))?,
            }
        } else if let Some(v) = kind.get("connector") {
            ScenarioKind::Connector {
                a: json::fraction_from_string(
                    v["a"]
                        .as_str()
                        .ok_or_else(|| JsonError("connector.a missing".into()))?,
                )?,
                b: json::fraction_from_string(
                    v["b"]
                        .as_str()
                        .ok_or_else(|| JsonError("connector.b missing".into()))?,
                )?,
            }
        } else {
            return Err(JsonError(format!("unknown scenario kind in {:?}", name)));
        };
        out.push(Scenario { name, kind });
    }
    Ok(out)
}

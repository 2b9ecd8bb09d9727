//! Stable JSON encodings for groups, automata, configurations and
//! group-ring elements.
//!
//! Group descriptors accept three forms: `{"type":"Z"}`, an explicit
//! `{"type":"finite","order":n,"table":[[...]]}` with the row-major
//! multiplication table, and `{"type":"builder","name":...,"args":[...]}`
//! for the cyclic, dihedral, symmetric and product constructions. Groups
//! always serialize back to the explicit form. Rule tables are listed in
//! mixed-radix order over the sorted memory set, least significant digit
//! first.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::group::{Element, ElementSet, FiniteGroup, Group, GroupError};
use crate::groupring::{GroupRing, PrimeField, RingElement, RingError};
use crate::symbolic::{
    CellularAutomaton, Configuration, LocalRule, Pattern, PeriodicConfiguration, SftDescriptor,
    Symbol, SymbolicError,
};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum GroupWire {
    #[serde(rename = "Z")]
    Z,
    Finite {
        order: usize,
        table: Vec<Vec<usize>>,
    },
    Builder {
        name: String,
        args: Vec<Value>,
    },
}

pub fn group_to_value(group: &Group) -> Value {
    let wire = match group {
        Group::Integers => GroupWire::Z,
        Group::Finite(f) => {
            let n = f.order();
            let table = (0..n)
                .map(|row| f.table()[row * n..(row + 1) * n].to_vec())
                .collect();
            GroupWire::Finite { order: n, table }
        }
    };
    serde_json::to_value(wire).expect("group wire form serializes")
}

pub fn group_from_value(value: &Value) -> Result<Group, JsonError> {
    let wire: GroupWire = serde_json::from_value(value.clone())?;
    match wire {
        GroupWire::Z => Ok(Group::Integers),
        GroupWire::Finite { order, table } => {
            let flat: Vec<usize> = table.into_iter().flatten().collect();
            Ok(Group::Finite(FiniteGroup::from_table(order, flat)?))
        }
        GroupWire::Builder { name, args } => {
            let int_arg = |i: usize| -> Result<usize, JsonError> {
                args.get(i)
                    .and_then(Value::as_u64)
                    .map(|v| v as usize)
                    .ok_or_else(|| {
                        JsonError::Schema(format!("builder {name} expects integer argument {i}"))
                    })
            };
            match name.as_str() {
                "cyclic" => Ok(Group::cyclic(int_arg(0)?)?),
                "dihedral" => Ok(Group::dihedral(int_arg(0)?)?),
                "symmetric" => Ok(Group::symmetric(int_arg(0)?)?),
                "product" => {
                    if args.len() != 2 {
                        return Err(JsonError::Schema(
                            "product builder expects two group descriptors".into(),
                        ));
                    }
                    let g1 = group_from_value(&args[0])?;
                    let g2 = group_from_value(&args[1])?;
                    Ok(Group::product(&g1, &g2)?)
                }
                other => Err(JsonError::Schema(format!("unknown builder {other:?}"))),
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct AutomatonWire {
    group: Value,
    alphabet: usize,
    memory: Vec<i64>,
    rule: Vec<Symbol>,
}

pub fn automaton_to_value(ca: &CellularAutomaton) -> Value {
    let wire = AutomatonWire {
        group: group_to_value(ca.group()),
        alphabet: ca.alphabet(),
        memory: ca.memory().iter().map(|e| e.0).collect(),
        rule: ca.rule().table().to_vec(),
    };
    serde_json::to_value(wire).expect("automaton wire form serializes")
}

pub fn automaton_from_value(value: &Value) -> Result<CellularAutomaton, JsonError> {
    let wire: AutomatonWire = serde_json::from_value(value.clone())?;
    let group = group_from_value(&wire.group)?;
    let memory = ElementSet::from_ids(&wire.memory);
    if memory.len() != wire.memory.len() {
        return Err(JsonError::Schema(
            "memory set contains duplicate elements".into(),
        ));
    }
    let rule = LocalRule::new(wire.alphabet, memory, wire.rule)?;
    Ok(CellularAutomaton::new(group, rule)?)
}

pub fn automaton_from_str(text: &str) -> Result<CellularAutomaton, JsonError> {
    automaton_from_value(&serde_json::from_str(text)?)
}

#[derive(Serialize, Deserialize)]
struct PatternWire {
    domain: Vec<i64>,
    values: Vec<Symbol>,
}

pub fn pattern_to_value(p: &Pattern) -> Value {
    let wire = PatternWire {
        domain: p.domain().iter().map(|e| e.0).collect(),
        values: p.values().to_vec(),
    };
    serde_json::to_value(wire).expect("pattern wire form serializes")
}

pub fn pattern_from_value(value: &Value) -> Result<Pattern, JsonError> {
    let wire: PatternWire = serde_json::from_value(value.clone())?;
    let domain = ElementSet::from_ids(&wire.domain);
    if domain.len() != wire.domain.len() {
        return Err(JsonError::Schema("pattern domain has duplicates".into()));
    }
    // values are paired with the domain as written, then sorted
    let mut pairs: Vec<(i64, Symbol)> = wire.domain.into_iter().zip(wire.values).collect();
    pairs.sort_by_key(|&(d, _)| d);
    let values = pairs.into_iter().map(|(_, v)| v).collect();
    Ok(Pattern::new(domain, values)?)
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ConfigurationWire {
    Total {
        values: Vec<Symbol>,
    },
    Periodic {
        left: Vec<Symbol>,
        center: Vec<Symbol>,
        right: Vec<Symbol>,
        #[serde(default)]
        start: i64,
    },
}

pub fn configuration_to_value(x: &Configuration) -> Value {
    let wire = match x {
        Configuration::Total(v) => ConfigurationWire::Total { values: v.clone() },
        Configuration::Periodic(p) => ConfigurationWire::Periodic {
            left: p.left().to_vec(),
            center: p.center().to_vec(),
            right: p.right().to_vec(),
            start: p.start(),
        },
    };
    serde_json::to_value(wire).expect("configuration wire form serializes")
}

pub fn configuration_from_value(value: &Value) -> Result<Configuration, JsonError> {
    let wire: ConfigurationWire = serde_json::from_value(value.clone())?;
    match wire {
        ConfigurationWire::Total { values } => Ok(Configuration::Total(values)),
        ConfigurationWire::Periodic {
            left,
            center,
            right,
            start,
        } => Ok(Configuration::Periodic(PeriodicConfiguration::new(
            left, center, right, start,
        )?)),
    }
}

#[derive(Serialize, Deserialize)]
struct SftWire {
    window: Vec<i64>,
    forbidden: Vec<Vec<Symbol>>,
}

pub fn sft_to_value(sft: &SftDescriptor) -> Value {
    let wire = SftWire {
        window: sft.window().iter().map(|e| e.0).collect(),
        forbidden: sft.forbidden().to_vec(),
    };
    serde_json::to_value(wire).expect("sft wire form serializes")
}

pub fn sft_from_value(value: &Value) -> Result<SftDescriptor, JsonError> {
    let wire: SftWire = serde_json::from_value(value.clone())?;
    let window = ElementSet::from_ids(&wire.window);
    if window.len() != wire.window.len() {
        return Err(JsonError::Schema("window has duplicates".into()));
    }
    Ok(SftDescriptor::new(window, wire.forbidden)?)
}

#[derive(Serialize, Deserialize)]
struct RingElementWire {
    p: u64,
    group: Value,
    terms: Vec<(i64, u64)>,
}

pub fn ring_element_to_value(ring: &GroupRing, f: &RingElement) -> Value {
    let wire = RingElementWire {
        p: ring.field().characteristic(),
        group: group_to_value(ring.group()),
        terms: f.terms().map(|(e, c)| (e.0, c)).collect(),
    };
    serde_json::to_value(wire).expect("ring element wire form serializes")
}

/// Parses a ring element file into its ring context and element.
pub fn ring_element_from_value(value: &Value) -> Result<(GroupRing, RingElement), JsonError> {
    let wire: RingElementWire = serde_json::from_value(value.clone())?;
    let group = group_from_value(&wire.group)?;
    let field = PrimeField::new(wire.p)?;
    let ring = GroupRing::new(group, field);
    let terms: Vec<(Element, u64)> = wire.terms.iter().map(|&(e, c)| (Element(e), c)).collect();
    let element = ring.element(&terms)?;
    Ok((ring, element))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_descriptor_roundtrip() {
        for g in [
            Group::Integers,
            Group::cyclic(4).unwrap(),
            Group::symmetric(3).unwrap(),
        ] {
            let v = group_to_value(&g);
            assert_eq!(group_from_value(&v).unwrap(), g);
        }
    }

    #[test]
    fn builder_descriptors() {
        let v: Value = serde_json::json!({"type":"builder","name":"cyclic","args":[4]});
        assert_eq!(group_from_value(&v).unwrap(), Group::cyclic(4).unwrap());
        let v: Value = serde_json::json!({
            "type":"builder","name":"product",
            "args":[{"type":"builder","name":"cyclic","args":[2]},
                    {"type":"builder","name":"cyclic","args":[2]}]
        });
        let c2 = Group::cyclic(2).unwrap();
        assert_eq!(
            group_from_value(&v).unwrap(),
            Group::product(&c2, &c2).unwrap()
        );
        let v: Value = serde_json::json!({"type":"Z"});
        assert_eq!(group_from_value(&v).unwrap(), Group::Integers);
    }

    #[test]
    fn automaton_roundtrip_and_schema_errors() {
        let v = serde_json::json!({
            "group": {"type": "Z"},
            "alphabet": 2,
            "memory": [0, 1],
            "rule": [0, 1, 1, 0]
        });
        let ca = automaton_from_value(&v).unwrap();
        assert_eq!(ca.alphabet(), 2);
        let back = automaton_to_value(&ca);
        assert_eq!(automaton_from_value(&back).unwrap(), ca);

        // wrong rule length is a schema-level failure
        let bad = serde_json::json!({
            "group": {"type": "Z"},
            "alphabet": 2,
            "memory": [0, 1],
            "rule": [0, 1, 1]
        });
        assert!(automaton_from_value(&bad).is_err());
    }

    #[test]
    fn configuration_forms() {
        let v =
            serde_json::json!({"kind":"periodic","left":[0],"center":[1],"right":[0],"start":5});
        let x = configuration_from_value(&v).unwrap();
        assert_eq!(x.get(Element(5)), 1);
        assert_eq!(x.get(Element(4)), 0);
        // start defaults to 0
        let v = serde_json::json!({"kind":"periodic","left":[0],"center":[],"right":[1]});
        let x = configuration_from_value(&v).unwrap();
        assert_eq!(x.get(Element(0)), 1);
        assert_eq!(x.get(Element(-1)), 0);
        let v = serde_json::json!({"kind":"total","values":[0,1,0]});
        let x = configuration_from_value(&v).unwrap();
        assert_eq!(x.get(Element(1)), 1);
    }

    #[test]
    fn ring_element_roundtrip() {
        let ring = GroupRing::new(Group::cyclic(2).unwrap(), PrimeField::new(3).unwrap());
        let f = ring.element(&[(Element(1), 2)]).unwrap();
        let v = ring_element_to_value(&ring, &f);
        let (ring2, f2) = ring_element_from_value(&v).unwrap();
        assert_eq!(ring2.field().characteristic(), 3);
        assert_eq!(f, f2);
    }
}

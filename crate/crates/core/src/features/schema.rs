use serde::{Deserialize, Serialize};

/// Schema version; bump whenever names or their order change.
pub const SCHEMA_VERSION: u32 = 1;

/// Measures computed on the master formula and on the monitor aggregate.
pub const BASE_FEATURES: [&str; 10] = [
    "conjuncts",
    "disjuncts",
    "height",
    "temporal_ops",
    "trueness",
    "system_control",
    "system_control_prop",
    "obligation_trueness",
    "obligation_system_control",
    "obligation_system_control_prop",
];

pub const EDGE_FEATURES: [&str; 6] = [
    "priority",
    "progress",
    "one_step",
    "discharge_front",
    "discharge_any",
    "monitors_delta",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateClass {
    NoMonitors,
    MasterStable,
    Other,
}

impl StateClass {
    pub const ALL: [StateClass; 3] = [
        StateClass::NoMonitors,
        StateClass::MasterStable,
        StateClass::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateClass::NoMonitors => "no_monitors",
            StateClass::MasterStable => "master_stable",
            StateClass::Other => "other",
        }
    }
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Master,
    Monitors,
    Edge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub name: String,
    pub scope: Scope,
    /// Rescaled per state to [0,1].
    pub normalized: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub version: u32,
    pub features: Vec<FeatureDescriptor>,
}

impl Default for FeatureSchema {
    fn default() -> Self {
        Self::standard()
    }
}

impl FeatureSchema {
    /// Base features (successor value and delta) for the master and the
    /// monitor aggregate, followed by the edge features.
    pub fn standard() -> Self {
        let mut features = Vec::new();
        for (scope, prefix) in [(Scope::Master, "master"), (Scope::Monitors, "monitors")] {
            for b in BASE_FEATURES {
                for kind in ["succ", "delta"] {
                    features.push(FeatureDescriptor {
                        name: format!("{prefix}.{b}.{kind}"),
                        scope,
                        normalized: true,
                    });
                }
            }
        }
        for b in EDGE_FEATURES {
            let normalized = b == "monitors_delta";
            features.push(FeatureDescriptor {
                name: format!("edge.{b}"),
                scope: Scope::Edge,
                normalized,
            });
        }
        FeatureSchema {
            version: SCHEMA_VERSION,
            features,
        }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Positions used by the model of a state class. States without
    /// monitors see the master block plus priority and one-step; states with
    /// a stable master see the monitor block and the edge features.
    pub fn class_indices(&self, class: StateClass) -> Vec<usize> {
        self.features
            .iter()
            .enumerate()
            .filter(|(_, f)| match class {
                StateClass::NoMonitors => {
                    f.scope == Scope::Master
                        || f.name == "edge.priority"
                        || f.name == "edge.one_step"
                }
                StateClass::MasterStable => f.scope != Scope::Master,
                StateClass::Other => true,
            })
            .map(|(i, _)| i)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn schema_shape() {
        let s = FeatureSchema::standard();
        assert_eq!(s.len(), 46);
        let names: BTreeSet<&str> = s.names().collect();
        assert_eq!(names.len(), s.len());
        assert_eq!(s.class_indices(StateClass::Other).len(), 46);
        assert_eq!(s.class_indices(StateClass::NoMonitors).len(), 22);
        assert_eq!(s.class_indices(StateClass::MasterStable).len(), 26);
    }
}

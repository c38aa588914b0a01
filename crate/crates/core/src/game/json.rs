//! Native JSON game format (see `docs/game.schema.json`).

use serde::{Deserialize, Serialize};

use super::{Edge, GameError, ParityGame, Player, VertexId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameDocument {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    pub initial: VertexId,
    pub max_priority: u32,
    /// Semantic metadata written by the translation; absent for plain games.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantics: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub owner: Player,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub source: VertexId,
    pub target: VertexId,
    pub priority: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuation: Option<Vec<String>>,
}

impl GameDocument {
    pub fn from_game(g: &ParityGame) -> Self {
        GameDocument {
            vertices: g
                .owners()
                .iter()
                .map(|&owner| VertexDoc {
                    owner,
                    kind: None,
                    label: None,
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    source: e.source,
                    target: e.target,
                    priority: e.priority,
                    valuation: None,
                })
                .collect(),
            initial: g.initial(),
            max_priority: g.max_priority(),
            semantics: None,
        }
    }

    pub fn to_game(&self) -> Result<ParityGame, GameError> {
        ParityGame::new(
            self.vertices.iter().map(|v| v.owner).collect(),
            self.edges
                .iter()
                .map(|e| Edge {
                    source: e.source,
                    target: e.target,
                    priority: e.priority,
                })
                .collect(),
            self.initial,
            self.max_priority,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::example_game;
    use super::*;

    #[test]
    fn round_trip() {
        let g = example_game();
        let text = serde_json::to_string(&GameDocument::from_game(&g)).unwrap();
        let doc: GameDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(doc.to_game().unwrap(), g);
    }

    #[test]
    fn invalid_documents_are_rejected() {
        let doc: GameDocument = serde_json::from_str(
            r#"{"vertices":[{"owner":"system"}],"edges":[],"initial":0,"max_priority":0}"#,
        )
        .unwrap();
        assert_eq!(doc.to_game(), Err(GameError::DeadEnd(0)));
    }
}

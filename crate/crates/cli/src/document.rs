//! JSON graph documents:
//! `{"vertices": [..], "edges": [{"id": .., "ends": [a, b]}], "source"?: .., "terminal"?: ..}`.

use serde::{Deserialize, Serialize};
use symanzik::graph::{Edge, GraphError, Multigraph, SourceTerminalGraph};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub id: String,
    pub ends: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminal: Option<String>,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: GraphError },
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("source and terminal must be given together")]
    HalfMarked,
}

impl GraphDocument {
    pub fn from_graph(g: &Multigraph) -> GraphDocument {
        GraphDocument {
            vertices: g.vertices().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeEntry { id: e.id.clone(), ends: [e.ends.0.clone(), e.ends.1.clone()] })
                .collect(),
            source: None,
            terminal: None,
        }
    }

    pub fn from_marked(h: &SourceTerminalGraph) -> GraphDocument {
        GraphDocument {
            source: Some(h.source().to_string()),
            terminal: Some(h.terminal().to_string()),
            ..GraphDocument::from_graph(h.graph())
        }
    }

    pub fn graph(&self) -> Result<Multigraph, GraphError> {
        let edges = self.edges.iter().map(|e| Edge::new(e.id.clone(), e.ends[0].clone(), e.ends[1].clone())).collect();
        Multigraph::new(self.vertices.iter().cloned(), edges)
    }

    /// The marked graph, or `None` when the document has no source/terminal.
    pub fn marked(&self) -> Result<Option<SourceTerminalGraph>, DocumentError> {
        match (&self.source, &self.terminal) {
            (Some(s), Some(t)) => Ok(Some(SourceTerminalGraph::new(self.graph()?, s.clone(), t.clone())?)),
            (None, None) => Ok(None),
            _ => Err(DocumentError::HalfMarked),
        }
    }

    /// Parses and validates; validation errors carry the line of the
    /// offending name in `text`.
    pub fn parse(text: &str) -> Result<GraphDocument, DocumentError> {
        let doc: GraphDocument = serde_json::from_str(text)?;
        doc.graph().map_err(DocumentError::from).and_then(|_| doc.marked()).map_err(|e| match e {
            DocumentError::Graph(source) => DocumentError::Invalid { line: offending_line(text, &source), source },
            other => other,
        })?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}

/// Line of the last occurrence of the quoted name an error refers to.
fn offending_line(text: &str, err: &GraphError) -> usize {
    let name = match err {
        GraphError::DuplicateVertex(n)
        | GraphError::DuplicateEdge(n)
        | GraphError::UnknownVertex(n)
        | GraphError::UnknownEdge(n) => n,
        _ => return 1,
    };
    let quoted = serde_json::to_string(name).expect("string serializes");
    text.rfind(&quoted).map_or(1, |at| text[..at].matches('\n').count() + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"vertices":["a","b"],"edges":[{"id":"x","ends":["a","b"]},{"id":"y","ends":["a","b"]}],"source":"a","terminal":"b"}"#;
        let doc = GraphDocument::parse(text).unwrap();
        assert_eq!(GraphDocument::parse(&doc.to_json()).unwrap(), doc);
        assert_eq!(GraphDocument::from_marked(&doc.marked().unwrap().unwrap()), doc);
    }

    #[test]
    fn duplicate_edge_reports_line() {
        let text = "{\"vertices\": [\"a\", \"b\"],\n \"edges\": [\n  {\"id\": \"x\", \"ends\": [\"a\", \"b\"]},\n  {\"id\": \"x\", \"ends\": [\"a\", \"b\"]}\n]}";
        match GraphDocument::parse(text).unwrap_err() {
            DocumentError::Invalid { line, .. } => assert_eq!(line, 4),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = GraphDocument::parse("{\n\"vertices\": [\"a\",]\n}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(GraphDocument::parse(r#"{"vertices":["a"],"edges":[],"source":"a"}"#).is_err());
    }
}

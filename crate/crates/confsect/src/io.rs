//! JSON file formats for graphs, points and components.

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use confsect_core::geometry::{Component, Configuration, Point};
use confsect_core::graph::{EdgeSpec, Graph, GraphSpec};
use confsect_core::{catalog, rational};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeFile>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EdgeFile {
    pub id: String,
    pub tail: String,
    pub head: String,
}

impl From<&GraphSpec> for GraphFile {
    fn from(s: &GraphSpec) -> Self {
        GraphFile {
            vertices: s.vertices.clone(),
            edges: s
                .edges
                .iter()
                .map(|e| EdgeFile { id: e.name.clone(), tail: e.tail.clone(), head: e.head.clone() })
                .collect(),
        }
    }
}

impl From<GraphFile> for GraphSpec {
    fn from(f: GraphFile) -> Self {
        GraphSpec {
            vertices: f.vertices,
            edges: f.edges.into_iter().map(|e| EdgeSpec::new(&e.id, &e.tail, &e.head)).collect(),
        }
    }
}

pub fn graph_to_json(g: &Graph) -> Value {
    serde_json::to_value(GraphFile::from(&g.to_spec())).expect("plain data")
}

pub fn graph_from_json(v: Value, suppress2: bool) -> Result<Graph> {
    let file: GraphFile = serde_json::from_value(v).context("malformed graph JSON")?;
    let mut spec = GraphSpec::from(file);
    if suppress2 {
        spec.suppress_degree_two();
    }
    Ok(spec.build()?)
}

/// Loads `catalog:<name>` or a graph JSON file.
pub fn load_graph(arg: &str, suppress2: bool) -> Result<Graph> {
    if let Some(name) = arg.strip_prefix("catalog:") {
        return catalog::by_name(name).ok_or_else(|| anyhow!("unknown catalog graph `{name}`"));
    }
    let text = fs::read_to_string(Path::new(arg)).with_context(|| format!("reading {arg}"))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {arg}"))?;
    graph_from_json(v, suppress2)
}

pub fn point_to_json(g: &Graph, p: &Point) -> Value {
    match p {
        Point::Vertex(v) => json!({ "vertex": g.vertex_name(*v) }),
        Point::Edge(e, t) => json!({ "edge": g.edge_name(*e), "t": rational::format(t) }),
    }
}

pub fn point_from_json(g: &Graph, v: &Value) -> Result<Point> {
    if let Some(name) = v.get("vertex").and_then(Value::as_str) {
        return Ok(Point::Vertex(g.vertex_by_name(name).ok_or_else(|| anyhow!("unknown vertex `{name}`"))?));
    }
    let name = v.get("edge").and_then(Value::as_str).ok_or_else(|| anyhow!("point needs `vertex` or `edge`"))?;
    let e = g.edge_by_name(name).ok_or_else(|| anyhow!("unknown edge `{name}`"))?;
    let t = v.get("t").and_then(Value::as_str).ok_or_else(|| anyhow!("edge point needs a rational `t`"))?;
    let t = rational::parse(t).ok_or_else(|| anyhow!("bad rational `{t}`"))?;
    let p = Point::Edge(e, t);
    p.validate(g)?;
    Ok(p)
}

pub fn configuration_to_json(g: &Graph, x: &Configuration) -> Value {
    Value::Array(x.points().iter().map(|p| point_to_json(g, p)).collect())
}

pub fn configuration_from_json(g: &Graph, v: &Value) -> Result<Configuration> {
    let Some(items) = v.as_array() else { bail!("configuration must be an array of points") };
    let pts = items.iter().map(|p| point_from_json(g, p)).collect::<Result<Vec<_>>>()?;
    Ok(Configuration::new(g, pts)?)
}

pub fn component_to_json(g: &Graph, c: &Component) -> Value {
    json!({
        "vertices": c.vertices.iter().map(|v| g.vertex_name(*v)).collect::<Vec<_>>(),
        "pieces": c.pieces.iter().map(|p| json!({
            "edge": g.edge_name(p.edge),
            "lo": rational::format(&p.lo),
            "hi": rational::format(&p.hi),
        })).collect::<Vec<_>>(),
    })
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
            r => r.context("writing to stdout"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use confsect_core::rational::q;

    #[test]
    fn graph_round_trip() {
        let g = catalog::theta();
        let back = graph_from_json(graph_to_json(&g), false).unwrap();
        assert_eq!(back.to_spec(), g.to_spec());
    }

    #[test]
    fn degree_two_needs_the_flag() {
        let v = json!({"vertices":["a","b","c"],"edges":[
            {"id":"x","tail":"a","head":"b"},{"id":"y","tail":"b","head":"c"},{"id":"z","tail":"c","head":"a"}]});
        assert!(graph_from_json(v.clone(), false).is_err());
        assert!(graph_from_json(v, true).unwrap().is_circle());
    }

    #[test]
    fn points_round_trip() {
        let g = catalog::theta();
        for p in [Point::Vertex(g.vertex_by_name("a").unwrap()), Point::Edge(g.edge_by_name("e2").unwrap(), q(1, 4))] {
            assert_eq!(point_from_json(&g, &point_to_json(&g, &p)).unwrap(), p);
        }
        assert_eq!(point_to_json(&g, &Point::Edge(g.edge_by_name("e1").unwrap(), q(1, 4))), json!({"edge":"e1","t":"1/4"}));
        assert!(point_from_json(&g, &json!({"edge":"e1","t":"1"})).is_err());
        assert!(point_from_json(&g, &json!({"vertex":"zz"})).is_err());
    }

    #[test]
    fn catalog_prefix() {
        assert!(load_graph("catalog:theta", false).is_ok());
        assert!(load_graph("catalog:nope", false).is_err());
    }
}

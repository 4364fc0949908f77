//! JSON readers and writers for the file formats used by the command line.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::parametric::{format_rational, parse_rational, ParametricProfile, Rational};
use crate::polygon::{ConvexPolygon, Point};
use crate::poset::{GraphEdge, ParamWeight, WeightedGraph, WeightedPoset};
use crate::semiorder::{SemiItem, Semiorder, Utility};
use crate::witness::Witness;

#[derive(Serialize, Deserialize)]
struct ElementJson {
    id: String,
    weight: (i64, i64),
}

#[derive(Serialize, Deserialize)]
struct PosetJson {
    elements: Vec<ElementJson>,
    #[serde(default)]
    relations: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    id: String,
    ends: (String, String),
    weight: (i64, i64),
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<ElementJson>,
    #[serde(default)]
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct PolygonJson {
    vertices: Vec<(i64, i64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witnesses: Option<Vec<Vec<String>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
struct ItemJson {
    id: String,
    utility: Number,
    weight: (i64, i64),
}

#[derive(Deserialize)]
struct SemiorderJson {
    items: Vec<ItemJson>,
}

#[derive(Serialize, Deserialize)]
struct PieceJson {
    vertex: (i64, i64),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<String>>,
    from: String,
    to: String,
}

#[derive(Serialize, Deserialize)]
struct ProfileJson {
    pieces: Vec<PieceJson>,
}

fn weight_of((a, b): (i64, i64)) -> ParamWeight {
    ParamWeight::new(a, b)
}

pub fn parse_poset(text: &str) -> Result<WeightedPoset> {
    let raw: PosetJson = serde_json::from_str(text)?;
    WeightedPoset::new(raw.elements.into_iter().map(|e| (e.id, weight_of(e.weight))).collect(), &raw.relations)
}

/// Elements in index order; relations are the cover pairs.
pub fn poset_to_json(p: &WeightedPoset) -> Value {
    let raw = PosetJson {
        elements: (0..p.len()).map(|i| ElementJson { id: p.id(i).to_string(), weight: (p.weight(i).a, p.weight(i).b) }).collect(),
        relations: p.covers().iter().map(|&(x, y)| (p.id(x).to_string(), p.id(y).to_string())).collect(),
    };
    serde_json::to_value(raw).expect("plain data serializes")
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let raw: GraphJson = serde_json::from_str(text)?;
    Ok(WeightedGraph {
        vertices: raw.vertices.into_iter().map(|v| (v.id, weight_of(v.weight))).collect(),
        edges: raw.edges.into_iter().map(|e| GraphEdge { id: e.id, ends: [e.ends.0, e.ends.1], weight: weight_of(e.weight) }).collect(),
    })
}

pub fn graph_to_json(g: &WeightedGraph) -> Value {
    let raw = GraphJson {
        vertices: g.vertices.iter().map(|(id, w)| ElementJson { id: id.clone(), weight: (w.a, w.b) }).collect(),
        edges: g
            .edges
            .iter()
            .map(|e| EdgeJson { id: e.id.clone(), ends: (e.ends[0].clone(), e.ends[1].clone()), weight: (e.weight.a, e.weight.b) })
            .collect(),
    };
    serde_json::to_value(raw).expect("plain data serializes")
}

/// Sorted member ids of a witness.
pub fn witness_names(w: &Witness, ids: &[String]) -> Vec<String> {
    let mut v = w.expand();
    v.sort_unstable();
    v.into_iter().map(|i| ids[i].clone()).collect()
}

fn witness_from_names(names: &[String], index: &HashMap<&str, usize>) -> Result<Witness> {
    let idx = names.iter().map(|n| index.get(n.as_str()).copied().ok_or_else(|| Error::UnknownId(n.clone()))).collect::<Result<Vec<_>>>()?;
    Ok(Witness::leaf(idx))
}

fn id_index(ids: &[String]) -> HashMap<&str, usize> {
    ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect()
}

/// Witness indices are translated through `ids`.
pub fn polygon_to_json(p: &ConvexPolygon, ids: &[String]) -> Value {
    let raw = PolygonJson {
        vertices: p.vertices().iter().map(|v| (v.x, v.y)).collect(),
        witnesses: p.witnesses().map(|ws| ws.iter().map(|w| witness_names(w, ids)).collect()),
    };
    serde_json::to_value(raw).expect("plain data serializes")
}

/// Inverse of [`polygon_to_json`]; rejects non-canonical vertex lists.
pub fn parse_polygon(text: &str, ids: &[String]) -> Result<ConvexPolygon> {
    let raw: PolygonJson = serde_json::from_str(text)?;
    let index = id_index(ids);
    let witnesses = raw
        .witnesses
        .map(|ws| ws.iter().map(|names| witness_from_names(names, &index)).collect::<Result<Vec<_>>>())
        .transpose()?;
    ConvexPolygon::try_from_canonical(raw.vertices.into_iter().map(|(x, y)| Point::new(x, y)).collect(), witnesses)
}

fn parse_utility(u: &Number) -> Result<Utility> {
    match u {
        Number::Int(k) => Ok(Utility::from_integer(*k)),
        Number::Text(s) => {
            let r = parse_rational(s)?;
            let conv = |x: &i128| i64::try_from(*x).map_err(|_| Error::Parse(format!("utility `{s}` is out of range")));
            Ok(Utility::new(conv(r.numer())?, conv(r.denom())?))
        }
    }
}

pub fn parse_semiorder(text: &str) -> Result<Semiorder> {
    let raw: SemiorderJson = serde_json::from_str(text)?;
    let items = raw
        .items
        .into_iter()
        .map(|it| Ok(SemiItem { utility: parse_utility(&it.utility)?, id: it.id, weight: weight_of(it.weight) }))
        .collect::<Result<Vec<_>>>()?;
    Semiorder::new(items)
}

/// Items in utility order, utilities as `p/q` strings.
pub fn semiorder_to_json(s: &Semiorder) -> Value {
    let items: Vec<Value> = s
        .items()
        .iter()
        .map(|it| {
            let u = Rational::new(*it.utility.numer() as i128, *it.utility.denom() as i128);
            json!({"id": it.id, "utility": format_rational(Some(u), false), "weight": [it.weight.a, it.weight.b]})
        })
        .collect();
    json!({ "items": items })
}

pub fn profile_to_json(prof: &ParametricProfile, ids: &[String]) -> Value {
    let pieces = prof
        .pieces
        .iter()
        .enumerate()
        .map(|(i, pc)| {
            let (from, to) = prof.interval(i);
            PieceJson {
                vertex: (pc.vertex.x, pc.vertex.y),
                witness: pc.witness.as_ref().map(|w| witness_names(w, ids)),
                from: format_rational(from, true),
                to: format_rational(to, false),
            }
        })
        .collect();
    serde_json::to_value(ProfileJson { pieces }).expect("plain data serializes")
}

pub fn parse_profile(text: &str, ids: &[String]) -> Result<ParametricProfile> {
    let raw: ProfileJson = serde_json::from_str(text)?;
    let index = id_index(ids);
    let mut pieces = Vec::with_capacity(raw.pieces.len());
    let mut breakpoints = Vec::new();
    let n = raw.pieces.len();
    for (i, pc) in raw.pieces.into_iter().enumerate() {
        let bound = |s: &str, inf: &str, is_end: bool| -> Result<Option<Rational>> {
            if is_end {
                if s != inf {
                    return Err(Error::Parse(format!("piece {i}: expected `{inf}`, found `{s}`")));
                }
                Ok(None)
            } else {
                parse_rational(s).map(Some)
            }
        };
        let from = bound(&pc.from, "-inf", i == 0)?;
        bound(&pc.to, "+inf", i + 1 == n)?;
        if let Some(b) = from {
            if breakpoints.last().is_some_and(|&l| l >= b) {
                return Err(Error::Parse(format!("piece {i}: breakpoints must increase")));
            }
            breakpoints.push(b);
        }
        let witness = pc.witness.as_deref().map(|names| witness_from_names(names, &index)).transpose()?;
        pieces.push(crate::parametric::Piece { vertex: Point::new(pc.vertex.0, pc.vertex.1), witness });
    }
    if pieces.is_empty() {
        return Err(Error::Parse("profile has no pieces".into()));
    }
    Ok(ParametricProfile { pieces, breakpoints })
}

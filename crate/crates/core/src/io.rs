//! JSON instance schema.

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Flavor, LdcInstance};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Vec<[usize; 2]>>,
    pub init_colors: Vec<u64>,
    pub m: u64,
    pub color_space: Vec<u64>,
    pub lists: Vec<Vec<u64>>,
    pub defects: Vec<BTreeMap<u64, u64>>,
    pub flavor: Flavor,
    #[serde(default)]
    pub g: u64,
}

impl InstanceJson {
    pub fn from_parts(graph: &ColoredGraph, inst: &LdcInstance) -> Self {
        InstanceJson {
            n: graph.n(),
            edges: graph.edges().map(|(u, v)| [u, v]).collect(),
            orientation: graph.is_oriented().then(|| graph.arcs().into_iter().map(|(u, v)| [u, v]).collect()),
            init_colors: graph.init_colors().to_vec(),
            m: graph.m(),
            color_space: inst.color_space().to_vec(),
            lists: inst.lists().iter().map(|l| l.iter().map(|e| e.0).collect()).collect(),
            defects: inst.lists().iter().map(|l| l.iter().copied().collect()).collect(),
            flavor: inst.flavor(),
            g: inst.g(),
        }
    }

    pub fn into_parts(self) -> Result<(ColoredGraph, LdcInstance)> {
        if self.lists.len() != self.n || self.defects.len() != self.n {
            return Err(Error::InvalidInstance("lists/defects length differs from n".into()));
        }
        let edges: Vec<_> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let mut graph = ColoredGraph::new(self.n, &edges)?.with_init_colors(self.init_colors, self.m)?;
        if let Some(arcs) = self.orientation {
            let arcs: Vec<_> = arcs.iter().map(|a| (a[0], a[1])).collect();
            graph = graph.with_orientation(&arcs)?;
        }
        let mut lists = Vec::with_capacity(self.n);
        for (v, (colors, defects)) in self.lists.iter().zip(&self.defects).enumerate() {
            if defects.keys().any(|x| !colors.contains(x)) {
                return Err(Error::InvalidInstance(format!("node {v} has a defect for a color outside its list")));
            }
            let list = colors
                .iter()
                .map(|x| {
                    defects.get(x).map(|&d| (*x, d)).ok_or_else(|| {
                        Error::InvalidInstance(format!("node {v} lacks a defect for color {x}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            lists.push(list);
        }
        let inst = LdcInstance::new(self.color_space, lists, self.flavor, self.g)?;
        Ok((graph, inst))
    }
}

pub fn instance_to_json(graph: &ColoredGraph, inst: &LdcInstance) -> String {
    serde_json::to_string_pretty(&InstanceJson::from_parts(graph, inst)).expect("serializable")
}

pub fn instance_from_json(text: &str) -> Result<(ColoredGraph, LdcInstance)> {
    serde_json::from_str::<InstanceJson>(text)?.into_parts()
}

//! JSON document describing a submanifold by sampled chart grids.

use serde::{Deserialize, Serialize};

use super::{sample_chart, Chart, Submanifold};

pub const SUBMANIFOLD_SCHEMA: &str = "hypiso-submanifold-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartDocument {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Samples per parameter; points are cell centres in row order, dimension 0 fastest.
    pub grid: usize,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmanifoldDocument {
    pub schema: String,
    pub label: String,
    pub k: usize,
    pub n: usize,
    pub contains_origin: bool,
    pub totally_geodesic: bool,
    pub candidate_density_points: Vec<Vec<f64>>,
    pub interior_charts: Vec<ChartDocument>,
    pub ideal_charts: Vec<ChartDocument>,
}

fn chart_document(chart: &Chart, grid: usize) -> ChartDocument {
    ChartDocument {
        lo: chart.domain.lo.clone(),
        hi: chart.domain.hi.clone(),
        grid,
        points: sample_chart(chart, grid)
            .into_iter()
            .map(|p| p.iter().copied().collect())
            .collect(),
    }
}

impl SubmanifoldDocument {
    pub fn new(sigma: &Submanifold, grid: usize) -> Self {
        SubmanifoldDocument {
            schema: SUBMANIFOLD_SCHEMA.to_string(),
            label: sigma.label.clone(),
            k: sigma.k,
            n: sigma.n,
            contains_origin: sigma.contains_origin,
            totally_geodesic: sigma.totally_geodesic,
            candidate_density_points: sigma
                .candidate_density_points
                .iter()
                .map(|p| p.coords().iter().copied().collect())
                .collect(),
            interior_charts: sigma
                .interior_charts
                .iter()
                .map(|c| chart_document(c, grid))
                .collect(),
            ideal_charts: sigma
                .ideal_charts
                .iter()
                .map(|c| chart_document(c, grid))
                .collect(),
        }
    }
}

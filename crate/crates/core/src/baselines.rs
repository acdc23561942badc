//! Label-free aggregation of the grades an item received.

use crate::error::{Error, Result};
use crate::graph::SoanGraph;

fn collect_grades(graph: &SoanGraph, item_ids: &[usize]) -> Result<Vec<Vec<f64>>> {
    let by_item = graph.grades_by_item();
    item_ids
        .iter()
        .map(|&i| match by_item.get(i) {
            None => Err(Error::UnknownItem(i.to_string())),
            Some(g) if g.is_empty() => Err(Error::NoAssessments(graph.item_ids[i].clone())),
            Some(g) => Ok(g.clone()),
        })
        .collect()
}

/// Shifted by the first grade, so equal grades average to themselves exactly.
pub fn mean(grades: &[f64]) -> f64 {
    let pivot = grades[0];
    pivot + grades.iter().map(|g| g - pivot).sum::<f64>() / grades.len() as f64
}

/// Midpoint of the two central values for even counts.
pub fn median(grades: &[f64]) -> f64 {
    let mut sorted = grades.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

pub fn average_predict(graph: &SoanGraph, item_ids: &[usize]) -> Result<Vec<f64>> {
    Ok(collect_grades(graph, item_ids)?.iter().map(|g| mean(g)).collect())
}

pub fn median_predict(graph: &SoanGraph, item_ids: &[usize]) -> Result<Vec<f64>> {
    Ok(collect_grades(graph, item_ids)?.iter().map(|g| median(g)).collect())
}

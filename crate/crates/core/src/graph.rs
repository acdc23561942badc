//! The social-ownership-assessment multigraph.
//!
//! Users and items are addressed by contiguous indices assigned in
//! lexicographic order of their string ids, so the same input always yields
//! the same layout.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Users, items and the three weighted relations between them.
///
/// `social` is `n x n`, `ownership` and `assessment` are `n x m`. Absent
/// assessment entries mean "not assessed"; a stored `0.0` is a real grade.
#[derive(Clone, Debug, PartialEq)]
pub struct SoanGraph {
    pub user_ids: Vec<String>,
    pub item_ids: Vec<String>,
    pub social: CsrMatrix,
    pub ownership: CsrMatrix,
    pub assessment: CsrMatrix,
}

impl SoanGraph {
    /// Assembles a graph from index-addressed matrices and checks every
    /// structural invariant.
    pub fn from_parts(
        user_ids: Vec<String>,
        item_ids: Vec<String>,
        social: CsrMatrix,
        ownership: CsrMatrix,
        assessment: CsrMatrix,
    ) -> Result<Self> {
        let graph = SoanGraph {
            user_ids,
            item_ids,
            social,
            ownership,
            assessment,
        };
        let report = graph.validate();
        if let Some(issue) = report.fatal.first() {
            return Err(Error::validation(issue.to_string()));
        }
        Ok(graph)
    }

    pub fn n_users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.item_ids.binary_search_by(|s| s.as_str().cmp(id)).ok()
    }

    pub fn user_index(&self, id: &str) -> Option<usize> {
        self.user_ids.binary_search_by(|s| s.as_str().cmp(id)).ok()
    }

    /// Grades received by each item, in grader index order.
    pub fn grades_by_item(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); self.n_items()];
        for (_, i, g) in self.assessment.triplets() {
            out[i].push(g);
        }
        out
    }

    /// Undirected social edge count (each stored pair counted once).
    pub fn social_edge_count(&self) -> usize {
        self.social.nnz() / 2
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

/// Incrementally collects string-keyed edges, then resolves them into a
/// [`SoanGraph`].
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    users: BTreeSet<String>,
    items: BTreeSet<String>,
    assessments: Vec<(String, String, f64)>,
    ownerships: Vec<(String, String, f64)>,
    social: Vec<(String, String, f64)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a user that may have no edges.
    pub fn user(&mut self, id: impl Into<String>) -> &mut Self {
        self.users.insert(id.into());
        self
    }

    /// Declares an item that may have no edges.
    pub fn item(&mut self, id: impl Into<String>) -> &mut Self {
        self.items.insert(id.into());
        self
    }

    pub fn assessment(
        &mut self,
        grader: impl Into<String>,
        item: impl Into<String>,
        grade: f64,
    ) -> &mut Self {
        self.assessments.push((grader.into(), item.into(), grade));
        self
    }

    pub fn ownership(
        &mut self,
        user: impl Into<String>,
        item: impl Into<String>,
        share: f64,
    ) -> &mut Self {
        self.ownerships.push((user.into(), item.into(), share));
        self
    }

    pub fn social(
        &mut self,
        a: impl Into<String>,
        b: impl Into<String>,
        weight: f64,
    ) -> &mut Self {
        self.social.push((a.into(), b.into(), weight));
        self
    }

    pub fn build(&self) -> Result<SoanGraph> {
        for (kind, list) in [
            ("assessment", &self.assessments),
            ("ownership", &self.ownerships),
            ("social", &self.social),
        ] {
            for (a, b, w) in list {
                if !unit_weight(*w) {
                    return Err(Error::validation(format!(
                        "{kind} weight out of [0,1] in ({a}, {b}, {w})"
                    )));
                }
            }
        }
        for (a, b, _) in &self.social {
            if a == b {
                return Err(Error::validation(format!("social self-edge on user `{a}`")));
            }
        }

        let mut users = self.users.clone();
        let mut items = self.items.clone();
        for (u, i, _) in self.assessments.iter().chain(&self.ownerships) {
            users.insert(u.clone());
            items.insert(i.clone());
        }
        for (a, b, _) in &self.social {
            users.insert(a.clone());
            users.insert(b.clone());
        }
        let user_ids: Vec<String> = users.into_iter().collect();
        let item_ids: Vec<String> = items.into_iter().collect();
        let user_ix: HashMap<&str, usize> = index_map(&user_ids);
        let item_ix: HashMap<&str, usize> = index_map(&item_ids);
        let (n, m) = (user_ids.len(), item_ids.len());

        let bipartite = |relation: &'static str, list: &[(String, String, f64)]| {
            let triplets = list
                .iter()
                .map(|(u, i, w)| (user_ix[u.as_str()], item_ix[i.as_str()], *w))
                .collect();
            CsrMatrix::from_triplets(n, m, triplets).map_err(|(r, c)| Error::DuplicateEntry {
                relation,
                row: user_ids[r].clone(),
                col: item_ids[c].clone(),
            })
        };
        let assessment = bipartite("assessment", &self.assessments)?;
        let ownership = bipartite("ownership", &self.ownerships)?;

        let social_triplets = self
            .social
            .iter()
            .flat_map(|(a, b, w)| {
                let (a, b) = (user_ix[a.as_str()], user_ix[b.as_str()]);
                [(a, b, *w), (b, a, *w)]
            })
            .collect();
        let social = CsrMatrix::from_triplets(n, n, social_triplets).map_err(|(r, c)| {
            Error::DuplicateEntry {
                relation: "social",
                row: user_ids[r].clone(),
                col: user_ids[c].clone(),
            }
        })?;

        SoanGraph::from_parts(user_ids, item_ids, social, ownership, assessment)
    }
}

/// Builds a graph from plain edge lists.
pub fn build_graph(
    assessments: &[(&str, &str, f64)],
    ownerships: &[(&str, &str, f64)],
    social: &[(&str, &str, f64)],
) -> Result<SoanGraph> {
    let mut b = GraphBuilder::new();
    for &(u, i, g) in assessments {
        b.assessment(u, i, g);
    }
    for &(u, i, s) in ownerships {
        b.ownership(u, i, s);
    }
    for &(x, y, w) in social {
        b.social(x, y, w);
    }
    b.build()
}

fn index_map(ids: &[String]) -> HashMap<&str, usize> {
    ids.iter().enumerate().map(|(k, s)| (s.as_str(), k)).collect()
}

pub(crate) fn unit_weight(w: f64) -> bool {
    w.is_finite() && (0.0..=1.0).contains(&w)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Issue {
    Dimension(String),
    Asymmetric { a: String, b: String },
    SocialSelfLoop(String),
    WeightOutOfRange {
        relation: &'static str,
        row: String,
        col: String,
        value: f64,
    },
    /// Item with neither assessments nor owners.
    IsolatedItem(String),
    /// Item nobody graded; average/median cannot score it.
    UnassessedItem(String),
    IsolatedUser(String),
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::Dimension(msg) => write!(f, "dimension mismatch: {msg}"),
            Issue::Asymmetric { a, b } => {
                write!(f, "social matrix not symmetric between `{a}` and `{b}`")
            }
            Issue::SocialSelfLoop(u) => write!(f, "social self-loop on user `{u}`"),
            Issue::WeightOutOfRange {
                relation,
                row,
                col,
                value,
            } => write!(f, "{relation} weight out of [0,1] in ({row}, {col}, {value})"),
            Issue::IsolatedItem(i) => write!(f, "item `{i}` has no assessments and no owners"),
            Issue::UnassessedItem(i) => write!(f, "item `{i}` has no assessments"),
            Issue::IsolatedUser(u) => write!(f, "user `{u}` has no edges"),
        }
    }
}

/// Fatal issues break graph invariants; warnings flag nodes that carry no
/// information.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub fatal: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.fatal.is_empty() && self.warnings.is_empty()
    }

    pub fn is_ok(&self) -> bool {
        self.fatal.is_empty()
    }
}

pub fn validate(graph: &SoanGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    let (n, m) = (graph.n_users(), graph.n_items());
    let shapes = [
        ("social", &graph.social, n, n),
        ("ownership", &graph.ownership, n, m),
        ("assessment", &graph.assessment, n, m),
    ];
    for (name, mat, rows, cols) in shapes {
        if mat.nrows() != rows || mat.ncols() != cols {
            report.fatal.push(Issue::Dimension(format!(
                "{name} is {}x{}, expected {rows}x{cols}",
                mat.nrows(),
                mat.ncols()
            )));
        }
    }
    if !report.fatal.is_empty() {
        return report;
    }

    let uid = |k: usize| graph.user_ids[k].clone();
    let iid = |k: usize| graph.item_ids[k].clone();
    for (r, c, v) in graph.social.triplets() {
        if r == c {
            report.fatal.push(Issue::SocialSelfLoop(uid(r)));
        } else if r < c && graph.social.get(c, r) != Some(v) {
            report.fatal.push(Issue::Asymmetric { a: uid(r), b: uid(c) });
        } else if r > c && graph.social.get(c, r).is_none() {
            report.fatal.push(Issue::Asymmetric { a: uid(c), b: uid(r) });
        }
        if !unit_weight(v) {
            report.fatal.push(Issue::WeightOutOfRange {
                relation: "social",
                row: uid(r),
                col: uid(c),
                value: v,
            });
        }
    }
    for (relation, mat) in [
        ("ownership", &graph.ownership),
        ("assessment", &graph.assessment),
    ] {
        for (r, c, v) in mat.triplets() {
            if !unit_weight(v) {
                report.fatal.push(Issue::WeightOutOfRange {
                    relation,
                    row: uid(r),
                    col: iid(c),
                    value: v,
                });
            }
        }
    }

    let mut graded = vec![false; m];
    let mut owned = vec![false; m];
    let mut user_active = vec![false; n];
    for (u, i, _) in graph.assessment.triplets() {
        graded[i] = true;
        user_active[u] = true;
    }
    for (u, i, _) in graph.ownership.triplets() {
        owned[i] = true;
        user_active[u] = true;
    }
    for (u, active) in user_active.iter_mut().enumerate() {
        *active |= graph.social.row_nnz(u) > 0;
    }
    for i in 0..m {
        match (graded[i], owned[i]) {
            (false, false) => report.warnings.push(Issue::IsolatedItem(iid(i))),
            (false, true) => report.warnings.push(Issue::UnassessedItem(iid(i))),
            _ => {}
        }
    }
    for (u, active) in user_active.iter().enumerate() {
        if !active {
            report.warnings.push(Issue::IsolatedUser(uid(u)));
        }
    }
    report
}

/// True valuations of items; `None` marks an item whose value is unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    values: Vec<Option<f64>>,
}

impl GroundTruth {
    pub fn new(values: Vec<Option<f64>>) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            if let Some(v) = v {
                if !unit_weight(*v) {
                    return Err(Error::validation(format!(
                        "ground truth for item {i} out of [0,1]: {v}"
                    )));
                }
            }
        }
        Ok(GroundTruth { values })
    }

    /// Every item known.
    pub fn full(values: Vec<f64>) -> Result<Self> {
        Self::new(values.into_iter().map(Some).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, item: usize) -> Option<f64> {
        self.values.get(item).copied().flatten()
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn known_ids(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i].is_some()).collect()
    }

    /// Looks up `ids`, failing on any unknown value.
    pub fn require(&self, ids: &[usize]) -> Result<Vec<f64>> {
        ids.iter()
            .map(|&i| {
                self.get(i)
                    .ok_or_else(|| Error::validation(format!("item {i} has no ground truth")))
            })
            .collect()
    }

    pub(crate) fn set(&mut self, item: usize, value: Option<f64>) {
        self.values[item] = value;
    }
}

/// Train/test partition over item indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub graph: SoanGraph,
    pub truth: GroundTruth,
    pub split: Split,
}

impl Dataset {
    /// A dataset with an empty split.
    pub fn new(graph: SoanGraph, truth: GroundTruth) -> Result<Self> {
        if truth.len() != graph.n_items() {
            return Err(Error::Dimension(format!(
                "ground truth has {} entries for {} items",
                truth.len(),
                graph.n_items()
            )));
        }
        Ok(Dataset {
            graph,
            truth,
            split: Split::default(),
        })
    }

    pub fn with_split(mut self, split: Split) -> Result<Self> {
        let m = self.graph.n_items();
        let mut seen = vec![false; m];
        for &i in split.train.iter().chain(&split.test) {
            if i >= m {
                return Err(Error::UnknownItem(i.to_string()));
            }
            if seen[i] {
                return Err(Error::validation(format!(
                    "item `{}` appears twice in the split",
                    self.graph.item_ids[i]
                )));
            }
            seen[i] = true;
            if self.truth.get(i).is_none() {
                return Err(Error::validation(format!(
                    "split item `{}` has no ground truth",
                    self.graph.item_ids[i]
                )));
            }
        }
        self.split = split;
        Ok(self)
    }
}

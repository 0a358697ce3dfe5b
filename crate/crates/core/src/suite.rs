//! Per-pattern invariant checks shared by the random suite and the tests.

use serde::Serialize;

use crate::eval::{heads_without_contact, stretch_violations};
use crate::graph::{build_graph, TopologyGraph};
use crate::grid::Loc;
use crate::oracle::{compare, simulate, Agreement, TracePoint};
use crate::pattern::StitchPattern;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub cols: usize,
    pub rows: usize,
    /// Evaluation error, if any; the remaining fields are empty then.
    pub error: Option<String>,
    pub agreement: Option<Agreement>,
    pub stretch_violations: usize,
    pub dangling_edges: usize,
    pub heads_without_contact: Vec<Loc>,
}

impl CaseReport {
    /// Evaluated, agrees with the simulator, respects the stretch bound and
    /// the graph is well formed.
    pub fn passes(&self) -> bool {
        self.error.is_none()
            && self.agreement.is_some_and(Agreement::agrees)
            && self.stretch_violations == 0
            && self.dangling_edges == 0
    }

    pub fn sound(&self) -> bool {
        self.error.is_none() && self.heads_without_contact.is_empty()
    }
}

fn dangling(graph: &TopologyGraph) -> usize {
    let has = |loc: Loc| graph.contacts().any(|n| n.loc() == loc);
    graph.edges.iter().filter(|e| !has(e.from) || !has(e.to)).count()
}

pub fn run_case(pattern: &StitchPattern) -> CaseReport {
    let mut report = CaseReport {
        cols: pattern.cols(),
        rows: pattern.rows(),
        error: None,
        agreement: None,
        stretch_violations: 0,
        dangling_edges: 0,
        heads_without_contact: Vec::new(),
    };
    let evaluated = crate::eval::evaluate(pattern)
        .and_then(|(grid, path)| build_graph(&grid, &path).map(|graph| (grid, path, graph)));
    let (grid, path, graph) = match evaluated {
        Ok(v) => v,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    let ours: Vec<TracePoint> = crate::eval::contact_trace(&grid, &path)
        .into_iter()
        .map(|e| TracePoint { i: e.i, j: e.j, stitch_row: e.stitch_row })
        .collect();
    report.agreement = Some(compare(&ours, &simulate(pattern).contacts));
    report.stretch_violations = stretch_violations(&grid).len();
    report.dangling_edges = dangling(&graph);
    report.heads_without_contact = heads_without_contact(&grid);
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub count: usize,
    pub passed: usize,
    pub exact: usize,
    pub sound: usize,
    pub failures: Vec<usize>,
}

pub fn summarize(reports: &[CaseReport]) -> SuiteSummary {
    SuiteSummary {
        count: reports.len(),
        passed: reports.iter().filter(|r| r.passes()).count(),
        exact: reports.iter().filter(|r| r.agreement == Some(Agreement::Exact)).count(),
        sound: reports.iter().filter(|r| r.sound()).count(),
        failures: reports.iter().enumerate().filter(|(_, r)| !r.passes()).map(|(k, _)| k).collect(),
    }
}

//! Structural checks on an ownership network.

use std::fmt;

use serde::Serialize;

use crate::network::{OwnershipNetwork, TaxpayerId};
use crate::scc::{decompose_graph, CorporateGraph};

pub const DEFAULT_ROW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FindingCode {
    ShareRange,
    RowSum,
    RowSumInexact,
    NoOwners,
    UnknownId,
    IndividualOwned,
    AbsorbingCycle,
}

impl FindingCode {
    pub fn as_str(self) -> &'static str {
        match self {
            FindingCode::ShareRange => "SHARE_RANGE",
            FindingCode::RowSum => "ROW_SUM",
            FindingCode::RowSumInexact => "ROW_SUM_INEXACT",
            FindingCode::NoOwners => "NO_OWNERS",
            FindingCode::UnknownId => "UNKNOWN_ID",
            FindingCode::IndividualOwned => "INDIVIDUAL_OWNED",
            FindingCode::AbsorbingCycle => "ABSORBING_CYCLE",
        }
    }
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: FindingCode,
    pub subjects: Vec<TaxpayerId>,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev} {}: {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn error_count(&self) -> usize {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Error)
            .count()
    }

    pub fn has(&self, code: FindingCode) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }
}

/// Checks share ranges, row sums, ownership coverage and that every
/// corporation eventually leaks income to individuals.
pub fn validate_network(net: &OwnershipNetwork, row_tol: f64) -> ValidationReport {
    let mut findings = Vec::new();
    let mut push = |severity, code, subjects: Vec<TaxpayerId>, message: String| {
        findings.push(Finding {
            severity,
            code,
            subjects,
            message,
        })
    };

    for d in net.dangling() {
        push(
            Severity::Error,
            FindingCode::UnknownId,
            vec![d.owned.clone(), d.owner.clone()],
            format!("record {} <- {} names an unregistered taxpayer", d.owned, d.owner),
        );
    }

    for i in 0..net.len() {
        let id = net.id(i);
        for (j, p) in net.row_iter(i) {
            if !(0.0..=1.0).contains(&p) {
                push(
                    Severity::Error,
                    FindingCode::ShareRange,
                    vec![id.clone(), net.id(j).clone()],
                    format!("share {p} of {id} held by {} is outside [0, 1]", net.id(j)),
                );
            }
        }

        let (owners, shares) = net.row(i);
        if !net.is_corporation(i) {
            if !owners.is_empty() {
                push(
                    Severity::Error,
                    FindingCode::IndividualOwned,
                    vec![id.clone()],
                    format!("individual {id} appears as the owned party in {} record(s)", owners.len()),
                );
            }
            continue;
        }
        if owners.is_empty() {
            push(
                Severity::Error,
                FindingCode::NoOwners,
                vec![id.clone()],
                format!("corporation {id} has no owners"),
            );
            continue;
        }
        let sum: f64 = shares.iter().sum();
        let dev = (sum - 1.0).abs();
        if !(dev <= row_tol) {
            push(
                Severity::Error,
                FindingCode::RowSum,
                vec![id.clone()],
                format!("shares of {id} sum to {sum}"),
            );
        } else if dev > 0.0 {
            push(
                Severity::Warning,
                FindingCode::RowSumInexact,
                vec![id.clone()],
                format!("shares of {id} sum to {sum} (within tolerance)"),
            );
        }
    }

    // A closed corporate set contains a terminal component of the corporate
    // graph. Such a component absorbs income unless one member has an
    // individual owner.
    let cg = CorporateGraph::new(net);
    let dec = decompose_graph(net, &cg);
    for (pos, comp) in dec.iter().enumerate() {
        if !comp.has_internal_edge {
            continue;
        }
        let terminal = comp.members.iter().all(|&u| {
            net.row_iter(u)
                .filter(|&(_, p)| p > 0.0)
                .all(|(v, _)| !net.is_corporation(v) || dec.component_of(v) == Some(pos))
        });
        if !terminal {
            continue;
        }
        let leaks = comp.members.iter().any(|&u| {
            net.row_iter(u)
                .any(|(v, p)| p > 0.0 && !net.is_corporation(v))
        });
        if !leaks {
            let subjects: Vec<TaxpayerId> = comp.member_ids(net).cloned().collect();
            let shown: Vec<&str> = subjects.iter().take(5).map(|s| s.as_str()).collect();
            push(
                Severity::Error,
                FindingCode::AbsorbingCycle,
                subjects.clone(),
                format!(
                    "corporations {{{}{}}} distribute only among themselves",
                    shown.join(", "),
                    if subjects.len() > 5 { ", ..." } else { "" }
                ),
            );
        }
    }

    let passed = !findings.iter().any(|f| f.severity == Severity::Error);
    ValidationReport { findings, passed }
}

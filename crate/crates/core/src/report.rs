//! JSON and plain-text rendering of run reports.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::engine::SolveReport;
use crate::error::Result;
use crate::io::create;
use crate::stats::NetworkStats;
use crate::validate::ValidationReport;

pub trait Report: Serialize {
    fn render_text(&self) -> String;

    fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn histogram(out: &mut String, name: &str, h: &std::collections::BTreeMap<usize, usize>) {
    let parts: Vec<String> = h.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    let _ = writeln!(out, "{name:<34} {}", parts.join(" "));
}

impl Report for SolveReport {
    fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "algorithm                          {}", self.algorithm);
        let _ = writeln!(s, "converged                          {}", self.converged);
        let _ = writeln!(s, "taxpayers / corporations           {} / {}", self.n_taxpayers, self.n_corporations);
        let _ = writeln!(s, "outer iterations                   {}", self.outer_iterations);
        if self.schedule_steps > 0 {
            let _ = writeln!(s, "schedule prefix steps              {}", self.schedule_steps);
        }
        if let Some(eps) = self.epsilon {
            let _ = writeln!(s, "epsilon                            {eps:e}");
        }
        if self.n_components > 0 {
            let _ = writeln!(s, "components (matrix path)           {} ({})", self.n_components, self.n_matrix_components);
        }
        let _ = writeln!(s, "linear solves                      {}", self.linear_solves);
        let _ = writeln!(s, "largest solve                      {}", self.max_solve_size);
        let _ = writeln!(s, "redo passes                        {}", self.redo_total);
        histogram(&mut s, "solve sizes", &self.solve_sizes);
        let _ = writeln!(s, "fixed-point residual               {:e}", self.fixed_point_residual);
        let _ = writeln!(s, "conservation error                 {:e}", self.conservation_error);
        let _ = writeln!(s, "wall time (ms)                     {:.3}", self.wall_time_ms);
        s
    }
}

impl Report for NetworkStats {
    fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "individuals                        {}", self.n_individuals);
        let _ = writeln!(s, "corporations                       {}", self.n_corporations);
        let _ = writeln!(s, "links                              {}", self.n_links);
        let _ = writeln!(
            s,
            "links to individuals               {} ({:.1}%)",
            self.n_links_to_individuals,
            100.0 * self.fraction_links_to_individuals
        );
        let _ = writeln!(s, "corporations owned per corporation {:.2}", self.mean_corporations_owned_per_corporation);
        let _ = writeln!(
            s,
            "owners per corporation             {:.2} ({:.2} individuals, {:.2} corporations)",
            self.mean_owners_per_corporation,
            self.mean_individual_owners_per_corporation,
            self.mean_corporate_owners_per_corporation
        );
        let _ = writeln!(s, "corporations owned per individual  {:.2}", self.mean_corporations_owned_per_individual);
        let _ = writeln!(s, "strongly connected components      {}", self.n_sccs);
        let _ = writeln!(s, "  with more than one corporation   {}", self.n_nontrivial_sccs);
        let _ = writeln!(s, "  largest                          {}", self.largest_scc);
        let _ = writeln!(s, "  largest, mean internal degree    {:.2}", self.largest_scc_mean_internal_degree);
        histogram(&mut s, "scc sizes", &self.scc_size_histogram);
        let w = &self.weak_corporate;
        let _ = writeln!(
            s,
            "weak components (corporate)        {} (largest {} corporations over {} sccs; {:.0}% hold <= 3)",
            w.count,
            w.largest_corporations,
            w.largest_scc_count,
            100.0 * w.fraction_at_most_three_corporations
        );
        let w = &self.weak_with_individuals;
        let _ = writeln!(s, "weak components (all taxpayers)    {} (largest {} taxpayers)", w.count, w.largest);
        let _ = writeln!(s, "trivial components                 {}", self.trivial_components);
        s
    }
}

impl Report for ValidationReport {
    fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "validation {}", if self.passed { "passed" } else { "FAILED" });
        for f in &self.findings {
            let _ = writeln!(s, "  {f}");
        }
        s
    }
}

/// Writes `report` to `path`: plain text when the extension is `txt`,
/// JSON otherwise.
pub fn write_report<R: Report>(report: &R, path: &Path) -> Result<()> {
    let body = if path.extension().is_some_and(|e| e == "txt") {
        report.render_text()
    } else {
        let mut j = report.to_json()?;
        j.push('\n');
        j
    };
    let mut w = create(path)?;
    w.write_all(body.as_bytes())?;
    w.flush()?;
    Ok(())
}

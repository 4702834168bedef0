//! Dirichlet solve of a problem file.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use liouville_core::dirichlet::{residual, solve, DirichletProblem};
use liouville_core::io::{parse_problem_with_limit, ProblemFile};
use liouville_core::VertexField;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub problem: ProblemFile,
    pub u: VertexField,
    pub residual: f64,
}

pub fn solve_file(path: &Path, max_vertices: usize) -> Result<Solution, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let problem = parse_problem_with_limit(&text, max_vertices)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let dirichlet = DirichletProblem::new(
        &problem.graph,
        &problem.potential,
        problem.interior.iter().copied(),
        problem.f.clone(),
        problem.g.clone(),
    )?;
    let u = solve(&dirichlet)?;
    let residual = residual(&dirichlet, &u);
    Ok(Solution { problem, u, residual })
}

/// CSV with columns `vertex,distance,u`; the distance is the hop distance
/// to the root.
pub fn solution_csv(solution: &Solution) -> String {
    let graph = &solution.problem.graph;
    let mut out = String::from("vertex,distance,u\n");
    for x in 0..graph.len() {
        let _ = writeln!(out, "{x},{},{:.16e}", graph.hop(x), solution.u[x]);
    }
    out
}

//! Weighted Boolean problems: parsing, arithmetization to pseudo-Boolean
//! polynomials, and quadratization to QUBO form.

mod parse;
mod poly;
mod qubo;

pub use parse::{parse_bop, BoolExpr, BooleanClause, BopProblem};
pub use poly::{arithmetize, arithmetize_expr, PseudoBooleanPolynomial};
pub use qubo::{
    aggregate, all_assignments, bop_to_qubo, brute_force_argmin, projected_argmin, quadratize,
    Penalty, QuboProblem, Substitution,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// A QUBO to be solved, with the Boolean problem it came from when there is
/// one. The source is kept as text so it survives a JSON round trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub qubo: QuboProblem,
    #[serde(default)]
    pub bop: Option<String>,
}

impl Problem {
    pub fn from_qubo(qubo: QuboProblem) -> Self {
        Self { qubo, bop: None }
    }

    /// Parses, arithmetizes and quadratizes a Boolean problem.
    pub fn from_bop_text(text: &str) -> Result<Self> {
        let bop = parse_bop(text)?;
        Ok(Self {
            qubo: bop_to_qubo(&bop)?,
            bop: Some(bop.to_text()),
        })
    }

    /// The parsed source problem, if any.
    pub fn source(&self) -> Option<Result<BopProblem>> {
        self.bop.as_deref().map(parse_bop)
    }

    /// Number of variables the user cares about (ancillas excluded).
    pub fn num_original(&self) -> usize {
        self.qubo.num_original
    }
}

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::parse::BopProblem;
use super::poly::{arithmetize, PseudoBooleanPolynomial};
use crate::error::{Error, Result};
use crate::graph::SymmetricMatrix;

/// Ancilla definition `ancilla = x_a * x_b`. Operands may themselves be
/// earlier ancillas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub ancilla: usize,
    pub a: usize,
    pub b: usize,
}

/// Penalty weight for the ancilla consistency terms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Penalty {
    /// `1 + sum |c|` over every term of the input polynomial.
    #[default]
    Auto,
    Fixed(f64),
}

/// `min x^T P x + constant_offset` over original variables `0..num_original`
/// followed by ancillas.
///
/// Linear coefficients sit on the diagonal of `P`; a quadratic coefficient
/// `c` on `x_i x_j` is split evenly as `P_ij = P_ji = c / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboProblem {
    pub matrix: SymmetricMatrix,
    pub num_original: usize,
    #[serde(default)]
    pub ancillas: Vec<Substitution>,
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub penalty: Option<f64>,
}

impl QuboProblem {
    /// Plain QUBO with no ancillas or offset.
    pub fn from_matrix(matrix: SymmetricMatrix) -> Self {
        Self {
            num_original: matrix.n(),
            matrix,
            ancillas: Vec::new(),
            offset: 0.0,
            penalty: None,
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// `x^T P x` (offset excluded).
    pub fn energy(&self, x: &[u8]) -> f64 {
        self.matrix.quadratic_form(x)
    }

    /// `x^T P x + offset`.
    pub fn objective(&self, x: &[u8]) -> f64 {
        self.energy(x) + self.offset
    }

    /// Extends an assignment of the original variables with consistent
    /// ancilla values.
    pub fn complete_assignment(&self, original: &[u8]) -> Vec<u8> {
        let mut x = original.to_vec();
        x.resize(self.n(), 0);
        for s in &self.ancillas {
            x[s.ancilla] = x[s.a] & x[s.b];
        }
        x
    }

    /// Projects a full assignment onto the original variables.
    pub fn strip_ancillas<'a>(&self, x: &'a [u8]) -> &'a [u8] {
        &x[..self.num_original]
    }
}

fn pack(poly: &PseudoBooleanPolynomial, n: usize) -> (SymmetricMatrix, f64) {
    let mut matrix = SymmetricMatrix::zeros(n);
    let mut offset = 0.0;
    for (vars, c) in poly.terms() {
        match *vars {
            [] => offset += c,
            [i] => matrix.add(i, i, c),
            [i, j] => matrix.add(i, j, c / 2.0),
            _ => unreachable!("packing requires degree <= 2"),
        }
    }
    (matrix, offset)
}

/// Reduces a multilinear polynomial to quadratic form by repeatedly
/// replacing a variable pair with an ancilla and adding the penalty
/// `M (x_a x_b - 2 x_a y - 2 x_b y + 3 y)`, which is zero iff `y = x_a x_b`.
///
/// The pair occurring in the most terms of degree >= 3 is substituted first,
/// ties going to the lexicographically smallest pair.
pub fn quadratize(poly: &PseudoBooleanPolynomial, penalty: Penalty) -> Result<QuboProblem> {
    let weight = match penalty {
        Penalty::Fixed(m) if !(m > 0.0 && m.is_finite()) => {
            return Err(Error::NonPositivePenalty(m))
        }
        Penalty::Fixed(m) => m,
        Penalty::Auto => 1.0 + poly.terms().map(|(_, c)| c.abs()).sum::<f64>(),
    };
    let num_original = poly.num_vars();
    let mut next_var = num_original;
    let mut work = poly.clone();
    let mut ancillas = Vec::new();

    loop {
        let mut pair_counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (vars, _) in work.terms().filter(|(v, _)| v.len() >= 3) {
            for (k, &a) in vars.iter().enumerate() {
                for &b in &vars[k + 1..] {
                    *pair_counts.entry((a, b)).or_default() += 1;
                }
            }
        }
        let Some(max) = pair_counts.values().copied().max() else {
            break;
        };
        let (a, b) = pair_counts
            .iter()
            .find(|(_, &c)| c == max)
            .map(|(&p, _)| p)
            .expect("max exists");
        let y = next_var;
        next_var += 1;

        let mut rewritten = PseudoBooleanPolynomial::zero(next_var);
        for (vars, c) in work.terms() {
            if vars.len() >= 3 && vars.contains(&a) && vars.contains(&b) {
                let mut replaced: Vec<usize> =
                    vars.iter().copied().filter(|&v| v != a && v != b).collect();
                replaced.push(y);
                rewritten.add_term(replaced, c);
            } else {
                rewritten.add_term(vars.to_vec(), c);
            }
        }
        rewritten.add_term(vec![a, b], weight);
        rewritten.add_term(vec![a, y], -2.0 * weight);
        rewritten.add_term(vec![b, y], -2.0 * weight);
        rewritten.add_term(vec![y], 3.0 * weight);
        work = rewritten;
        ancillas.push(Substitution { ancilla: y, a, b });
    }

    let (matrix, offset) = pack(&work, next_var);
    Ok(QuboProblem {
        matrix,
        num_original,
        penalty: (!ancillas.is_empty()).then_some(weight),
        ancillas,
        offset,
    })
}

/// `quadratize(sum_i w_i * arithmetize(f_i))` with the automatic penalty.
pub fn bop_to_qubo(problem: &BopProblem) -> Result<QuboProblem> {
    if problem.clauses.is_empty() {
        return Err(Error::Syntax {
            line: 1,
            column: 1,
            message: "no clauses".into(),
        });
    }
    let total = aggregate(problem);
    quadratize(&total, Penalty::Auto)
}

/// `sum_i w_i * arithmetize(f_i)` over all literals of the problem.
pub fn aggregate(problem: &BopProblem) -> PseudoBooleanPolynomial {
    let n = problem.num_vars();
    problem.clauses.iter().fold(PseudoBooleanPolynomial::zero(n), |acc, clause| {
        acc + arithmetize(clause) * clause.weight
    })
}

/// Every assignment of `0..n` variables, in ascending binary order with
/// variable 0 as the most significant bit.
pub fn all_assignments(n: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..1usize << n).map(move |z| (0..n).map(|i| ((z >> (n - 1 - i)) & 1) as u8).collect())
}

/// Brute-force minimizers of `f` over `{0,1}^n`, compared with an absolute
/// tolerance.
pub fn brute_force_argmin(n: usize, f: impl Fn(&[u8]) -> f64, tol: f64) -> (f64, Vec<Vec<u8>>) {
    let values: Vec<(Vec<u8>, f64)> = all_assignments(n).map(|x| {
        let v = f(&x);
        (x, v)
    }).collect();
    let min = values.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let set = values
        .into_iter()
        .filter(|(_, v)| (v - min).abs() <= tol)
        .map(|(x, _)| x)
        .collect();
    (min, set)
}

/// Original-variable projection of the QUBO's argmin set.
pub fn projected_argmin(q: &QuboProblem, tol: f64) -> (f64, BTreeSet<Vec<u8>>) {
    let (min, set) = brute_force_argmin(q.n(), |x| q.objective(x), tol);
    (min, set.iter().map(|x| q.strip_ancillas(x).to_vec()).collect())
}

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::parse::{BoolExpr, BooleanClause};

/// Multilinear polynomial over 0/1 variables. Monomials are sorted variable
/// sets (`x_i^2 = x_i` is applied on multiplication); zero terms are dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PseudoBooleanPolynomial {
    terms: BTreeMap<Vec<usize>, f64>,
    num_vars: usize,
}

impl PseudoBooleanPolynomial {
    pub fn zero(num_vars: usize) -> Self {
        Self {
            terms: BTreeMap::new(),
            num_vars,
        }
    }

    pub fn constant(c: f64, num_vars: usize) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(Vec::new(), c);
        p
    }

    pub fn variable(i: usize, num_vars: usize) -> Self {
        let mut p = Self::zero(num_vars.max(i + 1));
        p.add_term(vec![i], 1.0);
        p
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs; repeated
    /// variables inside a monomial collapse and like terms merge.
    pub fn from_terms(num_vars: usize, terms: impl IntoIterator<Item = (Vec<usize>, f64)>) -> Self {
        let mut p = Self::zero(num_vars);
        for (vars, c) in terms {
            p.add_term(vars, c);
        }
        p
    }

    pub fn add_term(&mut self, mut vars: Vec<usize>, coefficient: f64) {
        vars.sort_unstable();
        vars.dedup();
        if let Some(&max) = vars.last() {
            self.num_vars = self.num_vars.max(max + 1);
        }
        let value = self.terms.get(&vars).copied().unwrap_or(0.0) + coefficient;
        if value == 0.0 {
            self.terms.remove(&vars);
        } else {
            self.terms.insert(vars, value);
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, vars: &[usize]) -> f64 {
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn evaluate(&self, x: &[u8]) -> f64 {
        self.terms
            .iter()
            .filter(|(vars, _)| vars.iter().all(|&v| x[v] != 0))
            .map(|(_, &c)| c)
            .sum()
    }

    fn scale(mut self, s: f64) -> Self {
        if s == 0.0 {
            self.terms.clear();
        } else {
            for c in self.terms.values_mut() {
                *c *= s;
            }
        }
        self
    }
}

impl Add for PseudoBooleanPolynomial {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.num_vars = self.num_vars.max(rhs.num_vars);
        for (k, c) in rhs.terms {
            self.add_term(k, c);
        }
        self
    }
}

impl Neg for PseudoBooleanPolynomial {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Sub for PseudoBooleanPolynomial {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for &PseudoBooleanPolynomial {
    type Output = PseudoBooleanPolynomial;
    fn mul(self, rhs: Self) -> PseudoBooleanPolynomial {
        let mut out = PseudoBooleanPolynomial::zero(self.num_vars.max(rhs.num_vars));
        for (a, &ca) in &self.terms {
            for (b, &cb) in &rhs.terms {
                let mut vars = a.clone();
                vars.extend_from_slice(b);
                out.add_term(vars, ca * cb);
            }
        }
        out
    }
}

impl Mul<f64> for PseudoBooleanPolynomial {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

/// Truth value of a formula as a polynomial: `NOT a -> 1 - a`,
/// `a AND b -> ab`, `a OR b -> a + b - ab`.
pub fn arithmetize_expr(expr: &BoolExpr, num_vars: usize) -> PseudoBooleanPolynomial {
    match expr {
        BoolExpr::Var(i) => PseudoBooleanPolynomial::variable(*i, num_vars),
        BoolExpr::Not(e) => {
            PseudoBooleanPolynomial::constant(1.0, num_vars) - arithmetize_expr(e, num_vars)
        }
        BoolExpr::And(a, b) => &arithmetize_expr(a, num_vars) * &arithmetize_expr(b, num_vars),
        BoolExpr::Or(a, b) => {
            let pa = arithmetize_expr(a, num_vars);
            let pb = arithmetize_expr(b, num_vars);
            let both = &pa * &pb;
            pa + pb - both
        }
    }
}

/// Unweighted truth-value polynomial of a clause (the weight is applied by
/// the caller when aggregating).
pub fn arithmetize(clause: &BooleanClause) -> PseudoBooleanPolynomial {
    let n = clause.expr.variables().last().map_or(0, |&v| v + 1);
    arithmetize_expr(&clause.expr, n)
}

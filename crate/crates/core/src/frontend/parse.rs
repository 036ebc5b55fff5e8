//! Text format for weighted Boolean optimization problems.
//!
//! One clause per line, `<weight> : <expr>`, where
//!
//! ```text
//! expr   := term | expr OR term
//! term   := factor | term AND factor
//! factor := b<digits> | NOT factor | ( expr )
//! ```
//!
//! Keywords are case-insensitive and `#` starts a comment.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Boolean formula over densely numbered literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    Var(usize),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn var(i: usize) -> Self {
        BoolExpr::Var(i)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            BoolExpr::Var(i) => assignment[*i],
            BoolExpr::Not(e) => !e.eval(assignment),
            BoolExpr::And(a, b) => a.eval(assignment) && b.eval(assignment),
            BoolExpr::Or(a, b) => a.eval(assignment) || b.eval(assignment),
        }
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            BoolExpr::Var(i) => {
                out.insert(*i);
            }
            BoolExpr::Not(e) => e.collect_vars(out),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn map_vars(&self, f: &impl Fn(usize) -> usize) -> BoolExpr {
        match self {
            BoolExpr::Var(i) => BoolExpr::Var(f(*i)),
            BoolExpr::Not(e) => BoolExpr::not(e.map_vars(f)),
            BoolExpr::And(a, b) => BoolExpr::and(a.map_vars(f), b.map_vars(f)),
            BoolExpr::Or(a, b) => BoolExpr::or(a.map_vars(f), b.map_vars(f)),
        }
    }

    /// Renders the formula with the given literal labels (`b<label>`).
    pub fn display<'a>(&'a self, labels: &'a [u32]) -> impl fmt::Display + 'a {
        ExprDisplay { expr: self, labels }
    }
}

struct ExprDisplay<'a> {
    expr: &'a BoolExpr,
    labels: &'a [u32],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |e| ExprDisplay {
            expr: e,
            labels: self.labels,
        };
        match self.expr {
            BoolExpr::Var(i) => write!(f, "b{}", self.labels[*i]),
            BoolExpr::Not(e) => write!(f, "NOT {}", sub(e)),
            BoolExpr::And(a, b) => write!(f, "({} AND {})", sub(a), sub(b)),
            BoolExpr::Or(a, b) => write!(f, "({} OR {})", sub(a), sub(b)),
        }
    }
}

/// A weighted clause `w_i : f_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanClause {
    pub weight: f64,
    pub expr: BoolExpr,
}

/// Parsed problem: clauses over dense literal indices plus the original
/// label of each literal (`literals[k]` is the `<digits>` of `b<digits>`).
#[derive(Debug, Clone, PartialEq)]
pub struct BopProblem {
    pub clauses: Vec<BooleanClause>,
    pub literals: Vec<u32>,
}

impl BopProblem {
    pub fn num_vars(&self) -> usize {
        self.literals.len()
    }

    /// `sum_i w_i f_i(b)` with `True -> 1`, `False -> 0`.
    pub fn objective(&self, bits: &[u8]) -> f64 {
        let assignment: Vec<bool> = bits.iter().map(|&b| b != 0).collect();
        self.clauses
            .iter()
            .filter(|c| c.expr.eval(&assignment))
            .map(|c| c.weight)
            .sum()
    }

    /// Canonical text form, re-parseable by [`parse_bop`].
    pub fn to_text(&self) -> String {
        self.clauses
            .iter()
            .map(|c| format!("{} : {}\n", c.weight, c.expr.display(&self.literals)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Colon,
    LParen,
    RParen,
    And,
    Or,
    Not,
    Literal(u32),
}

struct Lexed {
    token: Token,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(line_no: usize, line: &str) -> Result<Vec<Lexed>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let token = match c {
            ':' => {
                i += 1;
                Token::Colon
            }
            '(' => {
                i += 1;
                Token::LParen
            }
            ')' => {
                i += 1;
                Token::RParen
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                let start = i;
                i += 1;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || matches!(chars[i], '.' | '-' | '+'))
                {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let value = text
                    .parse::<f64>()
                    .map_err(|_| syntax(line_no, column, format!("invalid number '{text}'")))?;
                Token::Number(value)
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let upper = word.to_ascii_uppercase();
                match upper.as_str() {
                    "AND" => Token::And,
                    "OR" => Token::Or,
                    "NOT" => Token::Not,
                    _ if upper.starts_with('B')
                        && upper.len() > 1
                        && upper[1..].chars().all(|d| d.is_ascii_digit()) =>
                    {
                        let label = upper[1..].parse::<u32>().map_err(|_| {
                            syntax(line_no, column, format!("literal index out of range '{word}'"))
                        })?;
                        Token::Literal(label)
                    }
                    _ => return Err(syntax(line_no, column, format!("unknown token '{word}'"))),
                }
            }
            other => return Err(syntax(line_no, column, format!("unknown token '{other}'"))),
        };
        out.push(Lexed { token, column });
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Lexed],
    pos: usize,
    line: usize,
    end_column: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|l| &l.token)
    }

    fn column(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|l| l.column)
            .unwrap_or(self.end_column)
    }

    fn expr(&mut self) -> Result<BoolExpr> {
        let mut lhs = self.term()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = BoolExpr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<BoolExpr> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = BoolExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<BoolExpr> {
        let column = self.column();
        match self.peek().cloned() {
            Some(Token::Literal(label)) => {
                self.pos += 1;
                Ok(BoolExpr::Var(label as usize))
            }
            Some(Token::Not) => {
                self.pos += 1;
                Ok(BoolExpr::not(self.factor()?))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(syntax(self.line, self.column(), "expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(t) => Err(syntax(self.line, column, format!("unexpected {t:?}"))),
            None => Err(syntax(self.line, column, "unexpected end of expression")),
        }
    }
}

/// Parses BOP text into clauses with literals renumbered densely in
/// ascending label order.
pub fn parse_bop(text: &str) -> Result<BopProblem> {
    let mut raw = Vec::new();
    for (idx, full_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = full_line.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let tokens = lex(line_no, line)?;
        let weight = match tokens.first() {
            Some(Lexed {
                token: Token::Number(w),
                ..
            }) => *w,
            Some(l) => return Err(syntax(line_no, l.column, "missing weight")),
            None => unreachable!("blank lines skipped"),
        };
        match tokens.get(1) {
            Some(Lexed {
                token: Token::Colon,
                ..
            }) => {}
            Some(l) => return Err(syntax(line_no, l.column, "expected ':' after weight")),
            None => return Err(syntax(line_no, line.len() + 1, "expected ':' after weight")),
        }
        let mut parser = Parser {
            tokens: &tokens[2..],
            pos: 0,
            line: line_no,
            end_column: line.trim_end().len() + 1,
        };
        let expr = parser.expr()?;
        if parser.pos < parser.tokens.len() {
            return Err(syntax(line_no, parser.column(), "unexpected trailing input"));
        }
        raw.push(BooleanClause { weight, expr });
    }
    if raw.is_empty() {
        return Err(syntax(1, 1, "no clauses"));
    }

    let labels: BTreeSet<usize> = raw.iter().flat_map(|c| c.expr.variables()).collect();
    let literals: Vec<u32> = labels.iter().map(|&l| l as u32).collect();
    let dense = |label: usize| labels.iter().position(|&l| l == label).expect("collected");
    let clauses = raw
        .into_iter()
        .map(|c| BooleanClause {
            weight: c.weight,
            expr: c.expr.map_vars(&dense),
        })
        .collect();
    Ok(BopProblem { clauses, literals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_and_clause() {
        let p = parse_bop("2.0 : (b1 AND b2)").unwrap();
        assert_eq!(p.literals, vec![1, 2]);
        assert_eq!(p.clauses.len(), 1);
        assert_eq!(p.clauses[0].weight, 2.0);
        assert_eq!(p.clauses[0].expr, BoolExpr::and(BoolExpr::var(0), BoolExpr::var(1)));
    }

    #[test]
    fn nested_clause_with_negation() {
        let p = parse_bop("1.0 : ((b1 AND b2) OR NOT b3)").unwrap();
        let expected = BoolExpr::or(
            BoolExpr::and(BoolExpr::var(0), BoolExpr::var(1)),
            BoolExpr::not(BoolExpr::var(2)),
        );
        assert_eq!(p.clauses[0].expr, expected);
        assert_eq!(p.num_vars(), 3);
    }

    #[test]
    fn dangling_operator_is_a_syntax_error() {
        let err = parse_bop("1.0 : b1 AND").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 1, column: 13, .. }), "{err}");
    }

    #[test]
    fn missing_weight_and_unknown_tokens() {
        assert!(matches!(
            parse_bop("b1 AND b2").unwrap_err(),
            Error::Syntax { column: 1, .. }
        ));
        assert!(matches!(
            parse_bop("1 : b1 XOR b2").unwrap_err(),
            Error::Syntax { column: 8, .. }
        ));
        assert!(matches!(
            parse_bop("1 : b1 & b2").unwrap_err(),
            Error::Syntax { column: 8, .. }
        ));
    }

    #[test]
    fn comments_case_and_dense_numbering() {
        let text = "# header\n\n1.5 : b7 or not B3  # trailing\n-2 : b3 and b10\n";
        let p = parse_bop(text).unwrap();
        assert_eq!(p.literals, vec![3, 7, 10]);
        assert_eq!(
            p.clauses[0].expr,
            BoolExpr::or(BoolExpr::var(1), BoolExpr::not(BoolExpr::var(0)))
        );
        assert_eq!(p.clauses[1].weight, -2.0);
        assert_eq!(p.clauses[1].expr, BoolExpr::and(BoolExpr::var(0), BoolExpr::var(2)));
    }

    #[test]
    fn errors_report_the_line() {
        let err = parse_bop("1 : b1\n1 : (b1 OR b2\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }), "{err}");
    }

    #[test]
    fn text_form_reparses() {
        let p = parse_bop("1.0 : ((b1 AND b2) OR NOT b3)\n0.5 : b2").unwrap();
        assert_eq!(parse_bop(&p.to_text()).unwrap(), p);
    }
}

//! A small expression language for event queries and property
//! formalizations over agent hypotheses.
//!
//! Grammar (case-insensitive keywords, `//` comments not supported):
//!
//! ```text
//! expr    := or
//! or      := and ( "or" and )*
//! and     := unary ( "and" unary )*
//! unary   := "not" unary | "(" expr ")" | atom
//! atom    := "prefers" "(" name "," name ")"
//!          | "u" "(" name ")" cmp number
//!          | "p_open" "(" name ")" cmp number
//!          | "k" cmp number
//!          | "alpha" cmp number
//!          | "type" ( "=" | "!=" ) typename
//! cmp     := "<" | "<=" | ">" | ">=" | "=" | "!="
//! ```
//!
//! `u(X)` is the total (immediate + delayed) utility of restaurant or
//! utility-group `X`; when `X` names a group with several member
//! restaurants the maximum member total is used, and `prefers(X, Y)`
//! compares those maxima strictly. `p_open(X)` is the prior probability
//! the agent assigns to restaurant `X` being open.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::agent::{AgentParams, AgentType};
use crate::world::RestaurantId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateError {
    pub message: String,
}

impl PredicateError {
    fn new(message: impl Into<String>) -> Self {
        PredicateError {
            message: message.into(),
        }
    }
}

impl fmt::Display for PredicateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "predicate error: {}", self.message)
    }
}

/// Resolves restaurant and utility-group names to restaurant ids.
#[derive(Clone, Debug, Default)]
pub struct NameTable {
    names: BTreeMap<String, Vec<RestaurantId>>,
}

impl NameTable {
    pub fn insert(&mut self, name: &str, ids: Vec<RestaurantId>) {
        self.names.insert(name.to_owned(), ids);
    }

    fn resolve(&self, name: &str) -> Result<&[RestaurantId], PredicateError> {
        self.names
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| PredicateError::new(alloc::format!("unknown name `{name}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl Cmp {
    fn apply(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Cmp::Lt => lhs < rhs,
            Cmp::Le => lhs <= rhs,
            Cmp::Gt => lhs > rhs,
            Cmp::Ge => lhs >= rhs,
            Cmp::Eq => lhs == rhs,
            Cmp::Ne => lhs != rhs,
        }
    }
}

/// A numeric quantity of one hypothesis.
#[derive(Clone, Debug, PartialEq)]
enum Scalar {
    Const(f64),
    /// Maximum total utility over the named restaurants.
    UtilityTotal(Vec<RestaurantId>),
    OpenProbability(RestaurantId),
    K,
    Alpha,
}

impl Scalar {
    fn eval(&self, params: &AgentParams) -> f64 {
        match self {
            Scalar::Const(v) => *v,
            Scalar::UtilityTotal(ids) => max_total(params, ids),
            Scalar::OpenProbability(id) => params.prior.open_probability(*id),
            Scalar::K => params.effective_k(),
            Scalar::Alpha => params.alpha,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Expr {
    Or(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Compare { lhs: Scalar, cmp: Cmp, rhs: Scalar },
    TypeIs { ty: AgentType, negated: bool },
    Prefers { a: Vec<RestaurantId>, b: Vec<RestaurantId> },
}

fn max_total(params: &AgentParams, ids: &[RestaurantId]) -> f64 {
    ids.iter()
        .map(|&id| params.utilities.total(id))
        .fold(f64::NEG_INFINITY, f64::max)
}

impl Expr {
    fn eval(&self, params: &AgentParams) -> bool {
        match self {
            Expr::Or(a, b) => a.eval(params) || b.eval(params),
            Expr::And(a, b) => a.eval(params) && b.eval(params),
            Expr::Not(e) => !e.eval(params),
            Expr::Compare { lhs, cmp, rhs } => cmp.apply(lhs.eval(params), rhs.eval(params)),
            Expr::TypeIs { ty, negated } => (params.agent_type == *ty) != *negated,
            // Strict comparison: equal totals count as not preferred.
            Expr::Prefers { a, b } => max_total(params, a) > max_total(params, b),
        }
    }
}

/// A named, parsed predicate over agent hypotheses.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyPredicate {
    pub name: String,
    expr: Expr,
}

impl PropertyPredicate {
    pub fn parse(name: &str, source: &str, names: &NameTable) -> Result<Self, PredicateError> {
        let tokens = tokenize(source)?;
        let mut parser = Parser { tokens, pos: 0, names };
        let expr = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(PredicateError::new(alloc::format!(
                "unexpected trailing input near `{}`",
                parser.tokens[parser.pos]
            )));
        }
        Ok(PropertyPredicate {
            name: name.to_owned(),
            expr,
        })
    }

    pub fn test(&self, params: &AgentParams) -> bool {
        self.expr.eval(params)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    Comma,
    Cmp(Cmp),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => f.write_str(s),
            Token::Number(n) => write!(f, "{n}"),
            Token::LParen => f.write_str("("),
            Token::RParen => f.write_str(")"),
            Token::Comma => f.write_str(","),
            Token::Cmp(_) => f.write_str("comparison"),
        }
    }
}

fn tokenize(source: &str) -> Result<Vec<Token>, PredicateError> {
    let mut tokens = Vec::new();
    let bytes = source.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            ',' => {
                tokens.push(Token::Comma);
                i += 1;
            }
            '<' | '>' | '=' | '!' => {
                let two = bytes.get(i + 1).map(|&b| b as char) == Some('=');
                let cmp = match (c, two) {
                    ('<', true) => Cmp::Le,
                    ('<', false) => Cmp::Lt,
                    ('>', true) => Cmp::Ge,
                    ('>', false) => Cmp::Gt,
                    ('=', _) => Cmp::Eq,
                    ('!', true) => Cmp::Ne,
                    ('!', false) => {
                        return Err(PredicateError::new("`!` must be followed by `=`"))
                    }
                    _ => unreachable!(),
                };
                i += if matches!(c, '=') && !two {
                    1
                } else if two {
                    2
                } else {
                    1
                };
                tokens.push(Token::Cmp(cmp));
            }
            c if c.is_ascii_digit() || c == '-' || c == '.' => {
                let start = i;
                i += 1;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || d == '-' || d == '+'
                    {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let text = &source[start..i];
                let value = parse_f64(text)
                    .ok_or_else(|| PredicateError::new(alloc::format!("bad number `{text}`")))?;
                tokens.push(Token::Number(value));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_alphanumeric() || d == '_' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token::Ident(source[start..i].to_owned()));
            }
            other => {
                return Err(PredicateError::new(alloc::format!(
                    "unexpected character `{other}`"
                )))
            }
        }
    }
    Ok(tokens)
}

fn parse_f64(text: &str) -> Option<f64> {
    text.parse::<f64>().ok()
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    names: &'a NameTable,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<&Token, PredicateError> {
        let t = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| PredicateError::new("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: &Token, what: &str) -> Result<(), PredicateError> {
        let got = self.next()?;
        if got == want {
            Ok(())
        } else {
            Err(PredicateError::new(alloc::format!(
                "expected {what}, found `{got}`"
            )))
        }
    }

    fn ident_is(&self, keyword: &str) -> bool {
        matches!(self.peek(), Some(Token::Ident(s)) if s.eq_ignore_ascii_case(keyword))
    }

    fn expr(&mut self) -> Result<Expr, PredicateError> {
        let mut lhs = self.and_expr()?;
        while self.ident_is("or") {
            self.pos += 1;
            let rhs = self.and_expr()?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, PredicateError> {
        let mut lhs = self.unary()?;
        while self.ident_is("and") {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, PredicateError> {
        if self.ident_is("not") {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        if matches!(self.peek(), Some(Token::LParen)) {
            self.pos += 1;
            let inner = self.expr()?;
            self.expect(&Token::RParen, "`)`")?;
            return Ok(inner);
        }
        self.atom()
    }

    fn name_argument(&mut self) -> Result<String, PredicateError> {
        self.expect(&Token::LParen, "`(`")?;
        let name = match self.next()? {
            Token::Ident(s) => s.clone(),
            other => {
                return Err(PredicateError::new(alloc::format!(
                    "expected a name, found `{other}`"
                )))
            }
        };
        self.expect(&Token::RParen, "`)`")?;
        Ok(name)
    }

    fn scalar(&mut self) -> Result<Scalar, PredicateError> {
        match self.next()?.clone() {
            Token::Number(n) => Ok(Scalar::Const(n)),
            Token::Ident(head) => match head.to_ascii_lowercase().as_str() {
                "u" => {
                    let name = self.name_argument()?;
                    Ok(Scalar::UtilityTotal(self.names.resolve(&name)?.to_vec()))
                }
                "p_open" => {
                    let name = self.name_argument()?;
                    match self.names.resolve(&name)? {
                        [single] => Ok(Scalar::OpenProbability(*single)),
                        _ => Err(PredicateError::new(alloc::format!(
                            "p_open(`{name}`) needs a single restaurant, not a group"
                        ))),
                    }
                }
                "k" => Ok(Scalar::K),
                "alpha" => Ok(Scalar::Alpha),
                other => Err(PredicateError::new(alloc::format!(
                    "unknown field `{other}`"
                ))),
            },
            other => Err(PredicateError::new(alloc::format!(
                "expected a value, found `{other}`"
            ))),
        }
    }

    fn atom(&mut self) -> Result<Expr, PredicateError> {
        if self.ident_is("prefers") {
            self.pos += 1;
            self.expect(&Token::LParen, "`(`")?;
            let a = match self.next()? {
                Token::Ident(s) => s.clone(),
                other => {
                    return Err(PredicateError::new(alloc::format!(
                        "expected a name, found `{other}`"
                    )))
                }
            };
            self.expect(&Token::Comma, "`,`")?;
            let b = match self.next()? {
                Token::Ident(s) => s.clone(),
                other => {
                    return Err(PredicateError::new(alloc::format!(
                        "expected a name, found `{other}`"
                    )))
                }
            };
            self.expect(&Token::RParen, "`)`")?;
            return Ok(Expr::Prefers {
                a: self.names.resolve(&a)?.to_vec(),
                b: self.names.resolve(&b)?.to_vec(),
            });
        }
        if self.ident_is("type") {
            self.pos += 1;
            let negated = match self.next()? {
                Token::Cmp(Cmp::Eq) => false,
                Token::Cmp(Cmp::Ne) => true,
                other => {
                    return Err(PredicateError::new(alloc::format!(
                        "type supports only `=` and `!=`, found `{other}`"
                    )))
                }
            };
            let ty = match self.next()? {
                Token::Ident(s) => AgentType::from_name(&s.to_ascii_lowercase()).ok_or_else(
                    || PredicateError::new(alloc::format!("unknown agent type `{s}`")),
                )?,
                other => {
                    return Err(PredicateError::new(alloc::format!(
                        "expected an agent type, found `{other}`"
                    )))
                }
            };
            return Ok(Expr::TypeIs { ty, negated });
        }
        let lhs = self.scalar()?;
        let cmp = match self.next()? {
            Token::Cmp(c) => *c,
            other => {
                return Err(PredicateError::new(alloc::format!(
                    "expected a comparison operator, found `{other}`"
                )))
            }
        };
        let rhs = self.scalar()?;
        Ok(Expr::Compare { lhs, cmp, rhs })
    }
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::world::{Cell, GridSpec, UtilityParams, WorldConfig};
    use alloc::string::ToString;
    use alloc::vec;

    fn toy_grid() -> GridSpec {
        GridSpec::new(
            4,
            4,
            [],
            [
                ("D1".to_string(), Cell::new(1, 0)),
                ("D2".to_string(), Cell::new(2, 0)),
                ("Veg".to_string(), Cell::new(3, 3)),
            ],
            Cell::new(0, 0),
            6,
        )
    }

    fn table(grid: &GridSpec) -> NameTable {
        let mut t = NameTable::default();
        for (i, r) in grid.restaurants().iter().enumerate() {
            t.insert(&r.name, vec![RestaurantId(i as u8)]);
        }
        t.insert(
            "Donut",
            vec![
                grid.restaurant_id("D1").unwrap(),
                grid.restaurant_id("D2").unwrap(),
            ],
        );
        t
    }

    fn params(grid: &GridSpec) -> AgentParams {
        AgentParams {
            prior: crate::belief::Belief::point_mass(WorldConfig::all_open(grid)),
            utilities: UtilityParams::new(
                grid,
                [("D1", 1.0, 0.0), ("D2", 2.0, 0.5), ("Veg", 3.0, 0.0)],
                -0.1,
            )
            .unwrap(),
            agent_type: AgentType::Naive,
            k: 1.0,
            alpha: 10.0,
        }
    }

    #[test]
    fn parses_and_evaluates_figure5_style_predicates() {
        let grid = toy_grid();
        let names = table(&grid);
        let p = params(&grid);

        let cases = [
            ("u(D2) > u(D1)", true),
            ("p_open(D1) < 0.15", false), // point mass on all-open: p = 1
            ("type = naive", true),
            ("type != naive", false),
            ("prefers(Veg, Donut)", true),  // 3.0 vs max(1.0, 2.5)
            ("prefers(Donut, Veg)", false),
            ("k >= 1 and alpha = 10", true),
            ("not (k < 1)", true),
            ("u(Donut) = 2.5", true), // group maximum
        ];
        for (src, want) in cases {
            let pred = PropertyPredicate::parse("case", src, &names).unwrap();
            assert_eq!(pred.test(&p), want, "{src}");
        }
    }

    #[test]
    fn prefers_is_strict_on_ties() {
        let grid = toy_grid();
        let names = table(&grid);
        let mut p = params(&grid);
        p.utilities =
            UtilityParams::new(&grid, [("D1", 3.0, 0.0), ("D2", 1.0, 0.0), ("Veg", 3.0, 0.0)], -0.1)
                .unwrap();
        let pred = PropertyPredicate::parse("tie", "prefers(Veg, Donut)", &names).unwrap();
        assert!(!pred.test(&p));
    }

    #[test]
    fn rejects_unknown_names_and_trailing_input() {
        let grid = toy_grid();
        let names = table(&grid);
        assert!(PropertyPredicate::parse("x", "u(Nowhere) > 1", &names).is_err());
        assert!(PropertyPredicate::parse("x", "k > 1 2", &names).is_err());
        assert!(PropertyPredicate::parse("x", "p_open(Donut) > 0.5", &names).is_err());
    }
}

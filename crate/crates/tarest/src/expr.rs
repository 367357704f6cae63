//! Regime functions parsed from expression strings.
//!
//! Regimes are written as expressions in one variable `x`, e.g. `"0.5*x"` or
//! `"tanh(x) - 0.25*x"`. The grammar is deliberately small:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | number | 'x' | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | tanh | exp | abs
//! ```
//!
//! Numbers are decimals with an optional exponent. Parse errors carry the byte
//! offset of the offending token; unknown identifiers and malformed argument
//! lists are reported as such rather than as generic syntax errors.

use crate::{Error, Result};
use std::fmt;

/// Unary functions admitted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tanh,
    Exp,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "tanh" => Some(Func::Tanh),
            "exp" => Some(Func::Exp),
            "abs" => Some(Func::Abs),
            _ => None,
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tanh => v.tanh(),
            Func::Exp => v.exp(),
            Func::Abs => v.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Abstract syntax tree of a regime expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Var,
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Number(v) => *v,
            Expr::Var => x,
            Expr::Neg(inner) => -inner.eval(x),
            Expr::Call(f, inner) => f.apply(inner.eval(x)),
            Expr::Binary(op, l, r) => {
                let (a, b) = (l.eval(x), r.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) => write!(f, "{v}"),
            Expr::Var => write!(f, "x"),
            Expr::Neg(inner) => {
                write!(f, "-")?;
                if inner.precedence() < 3 {
                    write!(f, "(")?;
                    inner.fmt_prec(f)?;
                    write!(f, ")")
                } else {
                    inner.fmt_prec(f)
                }
            }
            Expr::Call(func, inner) => {
                write!(f, "{}(", func.name())?;
                inner.fmt_prec(f)?;
                write!(f, ")")
            }
            Expr::Binary(op, l, r) => {
                // Left child keeps equal precedence (the grammar is
                // left-associative); the right child needs parentheses at equal
                // precedence so the reparse rebuilds the same tree.
                if l.precedence() < op.precedence() {
                    write!(f, "(")?;
                    l.fmt_prec(f)?;
                    write!(f, ")")?;
                } else {
                    l.fmt_prec(f)?;
                }
                write!(f, " {} ", op.symbol())?;
                if r.precedence() <= op.precedence() {
                    write!(f, "(")?;
                    r.fmt_prec(f)?;
                    write!(f, ")")
                } else {
                    r.fmt_prec(f)
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f)
    }
}

/// A parsed regime function: the AST plus the source it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeFunction {
    source: String,
    ast: Expr,
}

impl RegimeFunction {
    pub fn eval(&self, x: f64) -> f64 {
        self.ast.eval(x)
    }

    /// The source string the function was parsed from.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }
}

impl fmt::Display for RegimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

/// Parse an expression string into a [`RegimeFunction`].
pub fn parse_regime_expression(source: &str) -> Result<RegimeFunction> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        source_len: source.len(),
    };
    let ast = parser.expr()?;
    if let Some((tok, at)) = parser.peek() {
        return Err(Error::Parse {
            position: at,
            message: format!("unexpected {} after a complete expression", tok.describe()),
        });
    }
    Ok(RegimeFunction {
        source: source.to_string(),
        ast,
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
        }
    }
}

fn tokenize(source: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                out.push((Tok::Slash, i));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, i));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                // optional exponent part
                if i < bytes.len() && matches!(bytes[i] as char, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j] as char, '+' | '-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &source[start..i];
                let value: f64 = text.parse().map_err(|_| Error::Parse {
                    position: start,
                    message: format!("malformed number '{text}'"),
                })?;
                out.push((Tok::Num(value), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                out.push((Tok::Ident(source[start..i].to_string()), start));
            }
            other => {
                return Err(Error::Parse {
                    position: i,
                    message: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(Tok, usize)],
    pos: usize,
    source_len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<(&Tok, usize)> {
        self.tokens.get(self.pos).map(|(t, at)| (t, *at))
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let item = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        item
    }

    fn end_position(&self) -> usize {
        self.source_len
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut node = self.term()?;
        while let Some((tok, _)) = self.peek() {
            let op = match tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            node = Expr::Binary(op, Box::new(node), Box::new(rhs));
        }
        Ok(node)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut node = self.factor()?;
        while let Some((tok, _)) = self.peek() {
            let op = match tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            node = Expr::Binary(op, Box::new(node), Box::new(rhs));
        }
        Ok(node)
    }

    fn factor(&mut self) -> Result<Expr> {
        match self.bump() {
            Some((Tok::Minus, _)) => Ok(Expr::Neg(Box::new(self.factor()?))),
            Some((Tok::Num(v), _)) => Ok(Expr::Number(v)),
            Some((Tok::Ident(name), at)) => {
                if name == "x" {
                    return Ok(Expr::Var);
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(Error::Parse {
                        position: at,
                        message: format!(
                            "unknown identifier '{name}' (the variable is 'x'; functions are \
                             sin, cos, tanh, exp, abs)"
                        ),
                    });
                };
                match self.bump() {
                    Some((Tok::LParen, _)) => {}
                    other => {
                        let at = other.map_or(self.end_position(), |(_, p)| p);
                        return Err(Error::Parse {
                            position: at,
                            message: format!("function '{name}' needs a parenthesized argument"),
                        });
                    }
                }
                let arg = self.expr()?;
                match self.bump() {
                    Some((Tok::RParen, _)) => Ok(Expr::Call(func, Box::new(arg))),
                    Some((Tok::Comma, at)) => Err(Error::Parse {
                        position: at,
                        message: format!("function '{name}' takes exactly one argument"),
                    }),
                    other => {
                        let at = other.map_or(self.end_position(), |(t, p)| {
                            let _ = t;
                            p
                        });
                        Err(Error::Parse {
                            position: at,
                            message: format!("unclosed argument list of '{name}'"),
                        })
                    }
                }
            }
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((Tok::RParen, _)) => Ok(inner),
                    other => {
                        let at = other.map_or(self.end_position(), |(_, p)| p);
                        Err(Error::Parse {
                            position: at,
                            message: "unclosed parenthesis".into(),
                        })
                    }
                }
            }
            Some((tok, at)) => Err(Error::Parse {
                position: at,
                message: format!("expected a value, found {}", tok.describe()),
            }),
            None => Err(Error::Parse {
                position: self.end_position(),
                message: "expected a value, found end of input".into(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(src: &str) -> RegimeFunction {
        parse_regime_expression(src).unwrap()
    }

    #[test]
    fn linear_regime_evaluates() {
        assert_eq!(parse("0.5*x").eval(2.0), 1.0);
    }

    #[test]
    fn nonlinear_regime_evaluates() {
        assert_eq!(parse("tanh(x) - 0.25*x").eval(0.0), 0.0);
        let got = parse("0.3*x + 0.1*sin(2*x)").eval(1.0);
        assert_eq!(got, 0.3 + 0.1 * (2.0f64).sin());
    }

    #[test]
    fn division_and_nested_calls_evaluate() {
        let f = parse("exp(-abs(x)/2) + x/4");
        assert_eq!(f.eval(2.0), (-1.0f64).exp() + 0.5);
    }

    #[test]
    fn precedence_and_associativity_are_conventional() {
        assert_eq!(parse("2 - 3 - 4").eval(0.0), -5.0);
        assert_eq!(parse("2 + 3*4").eval(0.0), 14.0);
        assert_eq!(parse("(2 + 3)*4").eval(0.0), 20.0);
        assert_eq!(parse("8/4/2").eval(0.0), 1.0);
        assert_eq!(parse("--x").eval(3.0), 3.0);
    }

    #[test]
    fn exponent_numbers_parse() {
        assert_eq!(parse("1e-2*x").eval(10.0), 0.1);
        assert_eq!(parse("2.5E3").eval(0.0), 2500.0);
    }

    #[test]
    fn error_positions_point_at_the_problem() {
        match parse_regime_expression("0.5*x + $") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 8),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_regime_expression("0.5*") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_is_reported_as_such() {
        match parse_regime_expression("0.5*y") {
            Err(Error::Parse { position, message }) => {
                assert_eq!(position, 4);
                assert!(message.contains("unknown identifier 'y'"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_regime_expression("sinh(x)") {
            Err(Error::Parse { message, .. }) => {
                assert!(message.contains("unknown identifier 'sinh'"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn two_arguments_are_an_arity_error() {
        match parse_regime_expression("sin(x, 2)") {
            Err(Error::Parse { position, message }) => {
                assert_eq!(position, 5);
                assert!(message.contains("exactly one argument"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn function_without_parens_is_an_error() {
        assert!(parse_regime_expression("sin x").is_err());
        assert!(parse_regime_expression("sin").is_err());
    }

    #[test]
    fn trailing_tokens_are_an_error() {
        match parse_regime_expression("x x") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_numbers_are_an_error() {
        assert!(parse_regime_expression("1.2.3").is_err());
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(parse_regime_expression("").is_err());
        assert!(parse_regime_expression("   ").is_err());
    }

    #[test]
    fn printer_produces_minimal_parentheses() {
        let f = parse("0.5*x + 0.1*sin(2*x)");
        assert_eq!(f.to_string(), "0.5 * x + 0.1 * sin(2 * x)");
        let g = parse("-(x+1)*2");
        assert_eq!(g.to_string(), "-(x + 1) * 2");
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(Expr::Var),
            (0.0..100.0f64).prop_map(Expr::Number),
            Just(Expr::Number(0.0)),
        ];
        leaf.prop_recursive(5, 64, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (
                    prop_oneof![
                        Just(Func::Sin),
                        Just(Func::Cos),
                        Just(Func::Tanh),
                        Just(Func::Exp),
                        Just(Func::Abs)
                    ],
                    inner.clone()
                )
                    .prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
                (
                    prop_oneof![
                        Just(BinOp::Add),
                        Just(BinOp::Sub),
                        Just(BinOp::Mul),
                        Just(BinOp::Div)
                    ],
                    inner.clone(),
                    inner
                )
                    .prop_map(|(op, l, r)| Expr::Binary(op, Box::new(l), Box::new(r))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip_is_ast_identity(ast in arb_expr()) {
            let printed = ast.to_string();
            let reparsed = parse_regime_expression(&printed).unwrap();
            prop_assert_eq!(reparsed.ast(), &ast, "printed form: {}", printed);
        }
    }
}

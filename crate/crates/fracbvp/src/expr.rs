//! A small arithmetic expression language for supplying the weight h(t) and
//! the nonlinearity f(t, y) as text.
//!
//! Grammar (whitespace insignificant, no implicit multiplication):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          -- right-associative
//! atom   := number | 't' | 'y' | name '(' expr (',' expr)? ')' | '(' expr ')'
//! ```
//!
//! so `^` binds tighter than unary minus: `-t^2` is `-(t^2)`. Known
//! functions are `exp`, `ln`, `sqrt`, `abs` (one argument) and `min`, `max`
//! (two arguments).

use std::fmt;

use crate::error::ExprError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
    Min,
    Max,
}

impl Func {
    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            "min" => Some(Func::Min),
            "max" => Some(Func::Max),
            _ => None,
        }
    }
}

/// Parsed expression tree. Trees are immutable; identical input text yields
/// an identical tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    /// Parses `text` into a tree, reporting syntax errors with their 0-based
    /// column position.
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        let tokens = lex(text)?;
        let mut parser = Parser { tokens, pos: 0 };
        let expr = parser.expr()?;
        match parser.peek() {
            Token::End => Ok(expr),
            tok => Err(ExprError::Syntax {
                position: parser.peek_pos(),
                message: format!("unexpected {}", tok.describe()),
            }),
        }
    }

    /// Evaluates the tree at the given variable values. Domain violations
    /// (square roots or logarithms of negative numbers, `0^negative`,
    /// division by zero) are reported as errors rather than propagated as
    /// NaN.
    pub fn eval(&self, t: f64, y: f64) -> Result<f64, ExprError> {
        let v = match self {
            Expr::Number(x) => *x,
            Expr::Var(Var::T) => t,
            Expr::Var(Var::Y) => y,
            Expr::Neg(inner) => -inner.eval(t, y)?,
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval(t, y)?;
                let b = rhs.eval(t, y)?;
                apply_binary(*op, a, b)?
            }
            Expr::Call(func, args) => {
                let a = args[0].eval(t, y)?;
                match func {
                    Func::Exp => a.exp(),
                    Func::Ln => {
                        if a <= 0.0 {
                            return Err(eval_err(format!("ln of nonpositive value {a}")));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(eval_err(format!("sqrt of negative value {a}")));
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                    Func::Min => a.min(args[1].eval(t, y)?),
                    Func::Max => a.max(args[1].eval(t, y)?),
                }
            }
        };
        if v.is_nan() {
            return Err(eval_err("expression produced NaN".to_string()));
        }
        Ok(v)
    }

    /// True when the tree mentions the given variable.
    pub fn uses(&self, var: Var) -> bool {
        match self {
            Expr::Number(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(inner) => inner.uses(var),
            Expr::Binary(_, a, b) => a.uses(var) || b.uses(var),
            Expr::Call(_, args) => args.iter().any(|a| a.uses(var)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

fn eval_err(reason: String) -> ExprError {
    ExprError::Eval { reason }
}

fn apply_binary(op: BinOp, a: f64, b: f64) -> Result<f64, ExprError> {
    match op {
        BinOp::Add => Ok(a + b),
        BinOp::Sub => Ok(a - b),
        BinOp::Mul => Ok(a * b),
        BinOp::Div => {
            if b == 0.0 {
                return Err(eval_err("division by zero".to_string()));
            }
            Ok(a / b)
        }
        BinOp::Pow => {
            if a == 0.0 && b < 0.0 {
                return Err(eval_err("0 raised to a negative power".to_string()));
            }
            if a < 0.0 && b.fract() != 0.0 {
                return Err(eval_err(format!(
                    "negative base {a} raised to non-integer power {b}"
                )));
            }
            Ok(a.powf(b))
        }
    }
}

/// Prints a form that reparses to a structurally identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren(out: &mut fmt::Formatter<'_>, e: &Expr, need: bool) -> fmt::Result {
            if need {
                write!(out, "({e})")
            } else {
                write!(out, "{e}")
            }
        }
        match self {
            Expr::Number(x) => write!(out, "{x}"),
            Expr::Var(Var::T) => write!(out, "t"),
            Expr::Var(Var::Y) => write!(out, "y"),
            Expr::Neg(inner) => {
                write!(out, "-")?;
                paren(out, inner, inner.precedence() < self.precedence())
            }
            Expr::Binary(op, lhs, rhs) => {
                let prec = self.precedence();
                let (sym, left_strict, right_strict) = match op {
                    BinOp::Add => (" + ", false, false),
                    // right operand of - and / must bind strictly tighter
                    BinOp::Sub => (" - ", false, true),
                    BinOp::Mul => (" * ", false, false),
                    BinOp::Div => (" / ", false, true),
                    // ^ is right-associative, so the left side is strict
                    BinOp::Pow => ("^", true, false),
                };
                paren(
                    out,
                    lhs,
                    lhs.precedence() < prec || (left_strict && lhs.precedence() == prec),
                )?;
                write!(out, "{sym}")?;
                paren(
                    out,
                    rhs,
                    rhs.precedence() < prec || (right_strict && rhs.precedence() == prec),
                )
            }
            Expr::Call(func, args) => {
                write!(out, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(out, ", ")?;
                    }
                    write!(out, "{a}")?;
                }
                write!(out, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(x) => format!("number {x}"),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Comma => "`,`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '+' => push_simple(&mut tokens, Token::Plus, &mut i),
            '-' => push_simple(&mut tokens, Token::Minus, &mut i),
            '*' => push_simple(&mut tokens, Token::Star, &mut i),
            '/' => push_simple(&mut tokens, Token::Slash, &mut i),
            '^' => push_simple(&mut tokens, Token::Caret, &mut i),
            '(' => push_simple(&mut tokens, Token::LParen, &mut i),
            ')' => push_simple(&mut tokens, Token::RParen, &mut i),
            ',' => push_simple(&mut tokens, Token::Comma, &mut i),
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                // exponent part like 1e-3
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
                let lit = &text[start..i];
                let value = lit.parse::<f64>().map_err(|_| ExprError::Syntax {
                    position: start,
                    message: format!("malformed number `{lit}`"),
                })?;
                tokens.push((Token::Number(value), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                tokens.push((Token::Ident(text[start..i].to_string()), start));
            }
            other => {
                return Err(ExprError::Syntax {
                    position: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    tokens.push((Token::End, text.len()));
    Ok(tokens)
}

fn push_simple(tokens: &mut Vec<(Token, usize)>, tok: Token, i: &mut usize) {
    tokens.push((tok, *i));
    *i += 1;
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn peek_pos(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn advance(&mut self) -> (Token, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Token) -> Result<(), ExprError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(ExprError::Syntax {
                position: self.peek_pos(),
                message: format!("expected {}, found {}", tok.describe(), self.peek().describe()),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinOp::Mul,
                Token::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Token::Minus {
            self.advance();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if *self.peek() == Token::Caret {
            self.advance();
            // exponent parses at unary level, giving right associativity
            // and allowing forms like 2^-3
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let (tok, pos) = self.advance();
        match tok {
            Token::Number(x) => Ok(Expr::Number(x)),
            Token::Ident(name) => match name.as_str() {
                "t" => Ok(Expr::Var(Var::T)),
                "y" => Ok(Expr::Var(Var::Y)),
                _ => {
                    let func = Func::from_name(&name).ok_or(ExprError::UnknownIdentifier {
                        position: pos,
                        name: name.clone(),
                    })?;
                    self.expect(Token::LParen)?;
                    let mut args = vec![self.expr()?];
                    while *self.peek() == Token::Comma {
                        self.advance();
                        args.push(self.expr()?);
                    }
                    self.expect(Token::RParen)?;
                    if args.len() != func.arity() {
                        return Err(ExprError::Syntax {
                            position: pos,
                            message: format!(
                                "{} takes {} argument(s), got {}",
                                func.name(),
                                func.arity(),
                                args.len()
                            ),
                        });
                    }
                    Ok(Expr::Call(func, args))
                }
            },
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            other => Err(ExprError::Syntax {
                position: pos,
                message: format!("expected a value, found {}", other.describe()),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_str(text: &str, t: f64, y: f64) -> f64 {
        Expr::parse(text).unwrap().eval(t, y).unwrap()
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(eval_str("2*(3+4)", 0.0, 0.0), 14.0);
        assert_eq!(eval_str("y^2 + sqrt(y)", 0.0, 4.0), 18.0);
        assert_eq!(eval_str("-t^2", 3.0, 0.0), -9.0); // unary minus below ^
        assert_eq!(eval_str("2^3^2", 0.0, 0.0), 512.0); // right-associative
        assert_eq!(eval_str("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(eval_str("6 - 2 - 1", 0.0, 0.0), 3.0);
        assert_eq!(eval_str("exp(t)", 0.0, 0.0), 1.0);
        assert_eq!(eval_str("min(3, max(1, 2))", 0.0, 0.0), 2.0);
    }

    #[test]
    fn example_nonlinearity_at_first_interior_point() {
        // (1/100)·1.25·(1 + 1) = 0.025
        let v = eval_str("(1/100)*t*(y^0.5 + y^2)", 1.25, 1.0);
        assert!((v - 0.025).abs() < 1e-15);
    }

    #[test]
    fn sqrt_limit_at_zero() {
        assert_eq!(eval_str("y^0.5", 0.0, 0.0), 0.0);
        assert_eq!(eval_str("sqrt(y)", 0.0, 0.0), 0.0);
    }

    #[test]
    fn domain_violations_are_errors() {
        let sqrt = Expr::parse("sqrt(y)").unwrap();
        assert!(matches!(sqrt.eval(0.0, -1.0), Err(ExprError::Eval { .. })));
        let ln = Expr::parse("ln(t)").unwrap();
        assert!(ln.eval(-2.0, 0.0).is_err());
        assert!(ln.eval(0.0, 0.0).is_err());
        let div = Expr::parse("1/t").unwrap();
        assert!(div.eval(0.0, 0.0).is_err());
        let pow = Expr::parse("t^0.5").unwrap();
        assert!(pow.eval(-1.0, 0.0).is_err());
        let zero_pow = Expr::parse("t^-1").unwrap();
        assert!(zero_pow.eval(0.0, 0.0).is_err());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match Expr::parse("2*(3+4") {
            Err(ExprError::Syntax { position, .. }) => assert_eq!(position, 6),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match Expr::parse("2t") {
            Err(ExprError::Syntax { position, .. }) => assert_eq!(position, 1),
            other => panic!("expected syntax error (no implicit multiplication), got {other:?}"),
        }
        match Expr::parse("sin(t)") {
            Err(ExprError::UnknownIdentifier { name, position }) => {
                assert_eq!(name, "sin");
                assert_eq!(position, 0);
            }
            other => panic!("expected unknown identifier, got {other:?}"),
        }
        assert!(Expr::parse("").is_err());
        assert!(Expr::parse("min(1)").is_err());
    }

    #[test]
    fn identical_text_gives_identical_trees() {
        let a = Expr::parse("(1/100)*t*(y^0.5 + y^2)").unwrap();
        let b = Expr::parse("(1/100)*t*(y^0.5 + y^2)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn display_reparses_to_same_tree() {
        for text in [
            "2*(3+4)",
            "-t^2",
            "2^3^2",
            "1 - (2 - 3)",
            "6/(2/3)",
            "-(t+y)",
            "(1/100)*t*(y^0.5 + y^2)",
            "min(t, max(y, 1e-3))",
            "exp(-t)*ln(y+1)",
        ] {
            let tree = Expr::parse(text).unwrap();
            let printed = tree.to_string();
            let reparsed = Expr::parse(&printed).unwrap();
            assert_eq!(tree, reparsed, "text `{text}` printed as `{printed}`");
        }
    }

    #[test]
    fn uses_detects_variables() {
        let f = Expr::parse("t*(y+1)").unwrap();
        assert!(f.uses(Var::T));
        assert!(f.uses(Var::Y));
        let h = Expr::parse("exp(t)").unwrap();
        assert!(!h.uses(Var::Y));
    }
}

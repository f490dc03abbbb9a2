//! Lexer and recursive-descent parser for the formula grammar.
//!
//! Quantifiers are written `A x.`, `E x.`, `E= 2 x.`, `E<= 2 x.`; the
//! prefixes may be glued to the variable (`Ax.`, `ES.`), so variable names
//! must not begin with an uppercase `A` or `E`. Lowercase identifiers are
//! element variables, uppercase identifiers are set variables; `^E` marks an
//! edge element and `^ES` an edge set. Free variables are declared on
//! `free:` header lines before the formula.

use super::ast::*;
use super::{sort_check, Dialect, LogicError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident { name: String, suffix: Option<String> },
    Int(u32),
    Sym(&'static str),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, LogicError> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let chars: Vec<char> = content.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let mut push = |tok: Tok, len: usize| {
                out.push(Spanned { tok, line, col });
                len
            };
            i += match c {
                '(' => push(Tok::Sym("("), 1),
                ')' => push(Tok::Sym(")"), 1),
                '.' => push(Tok::Sym("."), 1),
                ',' => push(Tok::Sym(","), 1),
                '~' => push(Tok::Sym("~"), 1),
                '&' => push(Tok::Sym("&"), 1),
                '|' => push(Tok::Sym("|"), 1),
                '=' => push(Tok::Sym("="), 1),
                ':' => push(Tok::Sym(":"), 1),
                '-' => {
                    if chars.get(i + 1) == Some(&'>') {
                        push(Tok::Sym("->"), 2)
                    } else {
                        return Err(LogicError::Syntax {
                            line,
                            col,
                            message: "expected `->`".into(),
                        });
                    }
                }
                '<' => {
                    if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
                        push(Tok::Sym("<->"), 3)
                    } else if chars.get(i + 1) == Some(&'=') {
                        push(Tok::Sym("<="), 2)
                    } else {
                        return Err(LogicError::Syntax {
                            line,
                            col,
                            message: "expected `<->` or `<=`".into(),
                        });
                    }
                }
                _ if c.is_ascii_digit() => {
                    let start = i;
                    let mut j = i;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    let text: String = chars[start..j].iter().collect();
                    let value = text.parse().map_err(|_| LogicError::Syntax {
                        line,
                        col,
                        message: format!("integer `{text}` out of range"),
                    })?;
                    push(Tok::Int(value), j - start)
                }
                _ if c.is_ascii_alphabetic() => {
                    let start = i;
                    let mut j = i;
                    while j < chars.len()
                        && (chars[j].is_ascii_alphanumeric() || chars[j] == '_')
                    {
                        j += 1;
                    }
                    let name: String = chars[start..j].iter().collect();
                    let mut consumed = j - start;
                    let mut suffix = None;
                    if chars.get(j) == Some(&'^') {
                        let mut k = j + 1;
                        while k < chars.len() && chars[k].is_ascii_alphabetic() {
                            k += 1;
                        }
                        if k == j + 1 {
                            return Err(LogicError::Syntax {
                                line,
                                col: j + 2,
                                message: "expected sort suffix after `^`".into(),
                            });
                        }
                        suffix = Some(chars[j + 1..k].iter().collect());
                        consumed = k - start;
                    }
                    push(Tok::Ident { name, suffix }, consumed)
                }
                other => {
                    return Err(LogicError::Syntax {
                        line,
                        col,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            };
        }
    }
    Ok(out)
}

fn var_sort(name: &str, suffix: Option<&str>, line: usize, col: usize) -> Result<Sort, LogicError> {
    let upper = name.chars().next().is_some_and(|c| c.is_ascii_uppercase());
    match (upper, suffix) {
        (false, None) => Ok(Sort::VertexElem),
        (false, Some("E")) => Ok(Sort::EdgeElem),
        (true, None) | (true, Some("VS")) => Ok(Sort::VertexSet),
        (true, Some("ES")) => Ok(Sort::EdgeSet),
        _ => Err(LogicError::Syntax {
            line,
            col,
            message: format!(
                "bad variable `{name}^{}`: lowercase names are elements (suffix `^E` for edge \
                 elements), uppercase names are sets (suffix `^ES` for edge sets)",
                suffix.unwrap_or("")
            ),
        }),
    }
}

fn check_var_name(name: &str, line: usize, col: usize) -> Result<(), LogicError> {
    if name.starts_with('A') || name.starts_with('E') {
        return Err(LogicError::Syntax {
            line,
            col,
            message: format!(
                "variable `{name}` must not begin with `A` or `E` (reserved quantifier prefixes)"
            ),
        });
    }
    Ok(())
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn err_here(&self, message: String) -> LogicError {
        match self.peek() {
            Some(s) => LogicError::Syntax { line: s.line, col: s.col, message },
            None => LogicError::Syntax { line: 0, col: 0, message: format!("{message} (at end of input)") },
        }
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat_sym(&mut self, sym: &'static str) -> Result<(), LogicError> {
        match self.peek() {
            Some(Spanned { tok: Tok::Sym(s), .. }) if *s == sym => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err_here(format!("expected `{sym}`"))),
        }
    }

    fn expect_var(&mut self) -> Result<TypedVar, LogicError> {
        match self.bump() {
            Some(Spanned { tok: Tok::Ident { name, suffix }, line, col }) => {
                check_var_name(&name, line, col)?;
                let sort = var_sort(&name, suffix.as_deref(), line, col)?;
                Ok(TypedVar::new(name, sort))
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err_here("expected a variable".into()))
            }
        }
    }

    fn expect_int(&mut self) -> Result<u32, LogicError> {
        match self.bump() {
            Some(Spanned { tok: Tok::Int(v), .. }) => Ok(v),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err_here("expected an integer".into()))
            }
        }
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        if let Some(Spanned { tok: Tok::Ident { name, suffix }, line, col }) = self.peek().cloned()
        {
            let first = name.chars().next().unwrap();
            if first == 'A' || first == 'E' {
                self.pos += 1;
                let quantifier = if first == 'A' { Quantifier::Forall } else { Quantifier::Exists };
                if name.len() > 1 {
                    // glued form: `Ax.`, `ES.`, `Ee^E.`
                    let rest = &name[1..];
                    check_var_name(rest, line, col + 1)?;
                    let sort = var_sort(rest, suffix.as_deref(), line, col + 1)?;
                    self.eat_sym(".")?;
                    let body = self.formula()?;
                    return Ok(Formula::Quant(quantifier, TypedVar::new(rest, sort), Box::new(body)));
                }
                // counting forms are spelled with `E`
                if first == 'E' {
                    if let Some(Spanned { tok: Tok::Sym(s @ ("=" | "<=")), .. }) = self.peek() {
                        let kind =
                            if *s == "=" { CountKind::Exactly } else { CountKind::AtMost };
                        self.pos += 1;
                        let k = self.expect_int()?;
                        let var = self.expect_var()?;
                        if var.sort.is_set() {
                            return Err(LogicError::Syntax {
                                line,
                                col,
                                message: "counting quantifiers range over element variables".into(),
                            });
                        }
                        self.eat_sym(".")?;
                        let body = self.formula()?;
                        return Ok(Formula::Count(kind, k, var, Box::new(body)));
                    }
                }
                let var = self.expect_var()?;
                self.eat_sym(".")?;
                let body = self.formula()?;
                return Ok(Formula::Quant(quantifier, var, Box::new(body)));
            }
        }
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.imp()?;
        while matches!(self.peek(), Some(Spanned { tok: Tok::Sym("<->"), .. })) {
            self.pos += 1;
            let rhs = self.imp()?;
            lhs = iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.or()?;
        if matches!(self.peek(), Some(Spanned { tok: Tok::Sym("->"), .. })) {
            self.pos += 1;
            let rhs = self.imp()?; // right-associative
            return Ok(implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.and()?;
        while matches!(self.peek(), Some(Spanned { tok: Tok::Sym("|"), .. })) {
            self.pos += 1;
            lhs = or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.unary()?;
        while matches!(self.peek(), Some(Spanned { tok: Tok::Sym("&"), .. })) {
            self.pos += 1;
            lhs = and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        match self.peek() {
            Some(Spanned { tok: Tok::Sym("~"), .. }) => {
                self.pos += 1;
                Ok(not(self.unary()?))
            }
            Some(Spanned { tok: Tok::Sym("("), .. }) => {
                self.pos += 1;
                let inner = self.formula()?;
                self.eat_sym(")")?;
                Ok(inner)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, LogicError> {
        let spanned = self
            .bump()
            .ok_or_else(|| self.err_here("expected an atom".into()))?;
        let (name, line, col) = match &spanned.tok {
            Tok::Ident { name, suffix: None } => (name.clone(), spanned.line, spanned.col),
            Tok::Ident { name, suffix: Some(sfx) } => {
                return Err(LogicError::Syntax {
                    line: spanned.line,
                    col: spanned.col,
                    message: format!(
                        "sort suffix `{name}^{sfx}` is only written at binders and in `free:` \
                         declarations"
                    ),
                })
            }
            _ => {
                self.pos -= 1;
                return Err(self.err_here("expected an atom".into()));
            }
        };
        match name.as_str() {
            "true" => Ok(Formula::Const(true)),
            "false" => Ok(Formula::Const(false)),
            "adj" | "inc" => {
                self.eat_sym("(")?;
                let a = self.expect_plain_ident()?;
                self.eat_sym(",")?;
                let b = self.expect_plain_ident()?;
                self.eat_sym(")")?;
                if name == "adj" {
                    Ok(Formula::Adj(a, b))
                } else {
                    Ok(Formula::Inc(a, b))
                }
            }
            _ => {
                check_var_name(&name, line, col)?;
                match self.peek() {
                    Some(Spanned { tok: Tok::Sym("="), .. }) => {
                        self.pos += 1;
                        let rhs = self.expect_plain_ident()?;
                        Ok(Formula::Eq(name, rhs))
                    }
                    Some(Spanned { tok: Tok::Ident { name: kw, suffix: None }, .. })
                        if kw == "in" =>
                    {
                        self.pos += 1;
                        let set = self.expect_plain_ident()?;
                        Ok(Formula::In(name, set))
                    }
                    _ => Err(self.err_here(format!("expected `=` or `in` after `{name}`"))),
                }
            }
        }
    }

    fn expect_plain_ident(&mut self) -> Result<String, LogicError> {
        match self.bump() {
            Some(Spanned { tok: Tok::Ident { name, suffix: None }, line, col }) => {
                check_var_name(&name, line, col)?;
                Ok(name)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err_here("expected a variable name".into()))
            }
        }
    }
}

/// A parsed formula together with its declared free variables and detected
/// dialect.
#[derive(Debug, Clone)]
pub struct ParsedFormula {
    pub formula: Formula,
    pub free: Vec<TypedVar>,
    pub dialect: Dialect,
}

/// Parses formula text without a `free:` header (a sentence).
pub fn parse_formula(text: &str) -> Result<ParsedFormula, LogicError> {
    parse_with_free(text, Vec::new())
}

/// Parses a formula file: optional `free:` header lines, then the formula
/// (which may span several lines). `#` starts a comment.
pub fn parse_formula_file(text: &str) -> Result<ParsedFormula, LogicError> {
    let mut free = Vec::new();
    let mut body = String::new();
    let mut in_header = true;
    for (li, raw) in text.lines().enumerate() {
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = content.trim();
        if in_header && trimmed.starts_with("free:") {
            let decls = &trimmed["free:".len()..];
            for piece in decls.split([',', ' ']).filter(|p| !p.trim().is_empty()) {
                let piece = piece.trim();
                let (name, suffix) = match piece.split_once('^') {
                    Some((n, s)) => (n, Some(s)),
                    None => (piece, None),
                };
                check_var_name(name, li + 1, 1)?;
                let sort = var_sort(name, suffix, li + 1, 1)?;
                free.push(TypedVar::new(name, sort));
            }
            continue;
        }
        if !trimmed.is_empty() {
            in_header = false;
        }
        body.push_str(content);
        body.push('\n');
    }
    parse_with_free(&body, free)
}

fn parse_with_free(text: &str, free: Vec<TypedVar>) -> Result<ParsedFormula, LogicError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0 };
    let formula = parser.formula()?;
    if let Some(extra) = parser.peek() {
        return Err(LogicError::Syntax {
            line: extra.line,
            col: extra.col,
            message: "unexpected trailing input".into(),
        });
    }
    let dialect = sort_check(&formula, &free)?;
    Ok(ParsedFormula { formula, free, dialect })
}

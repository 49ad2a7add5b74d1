use super::formula::{Formula, Hypersequent, Sequent};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("empty input")]
    Empty,
}

impl ParseError {
    fn at(pos: usize, msg: impl Into<String>) -> Self {
        ParseError::Syntax {
            pos,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    Box,
    And,
    Or,
    LParen,
    RParen,
    Comma,
    Arrow,
    Bar,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("atom `{s}`"),
        Tok::Not => "`~`".into(),
        Tok::Box => "`[]`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Arrow => "`=>`".into(),
        Tok::Bar => "`//`".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&(_, d)) = it.peek() {
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                    name.push(d);
                    it.next();
                } else {
                    break;
                }
            }
            out.push((pos, Tok::Ident(name)));
            continue;
        }
        it.next();
        let tok = match c {
            '~' | '¬' => Tok::Not,
            '□' => Tok::Box,
            '&' | '∧' => Tok::And,
            '|' | '∨' => Tok::Or,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '⇒' => Tok::Arrow,
            '∥' => Tok::Bar,
            '[' => match it.next() {
                Some((_, ']')) => Tok::Box,
                _ => return Err(ParseError::at(pos, "expected `]` after `[`")),
            },
            '=' => match it.next() {
                Some((_, '>')) => Tok::Arrow,
                _ => return Err(ParseError::at(pos, "expected `>` after `=`")),
            },
            '/' => match it.next() {
                Some((_, '/')) => Tok::Bar,
                _ => return Err(ParseError::at(pos, "expected `//`")),
            },
            other => return Err(ParseError::at(pos, format!("unexpected character `{other}`"))),
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::at(self.pos(), format!("expected {wanted}, found {}", describe(t))),
            None => ParseError::at(self.end, format!("expected {wanted}, found end of input")),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.i += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Box) => {
                self.i += 1;
                Ok(self.unary()?.boxed())
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let f = self.formula()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.unexpected("`)`"));
                }
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                let f = Formula::atom(name);
                self.i += 1;
                Ok(f)
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn formula_list(&mut self, stop: &[Tok]) -> Result<Vec<Formula>, ParseError> {
        let mut out = Vec::new();
        match self.peek() {
            None => return Ok(out),
            Some(t) if stop.contains(t) => return Ok(out),
            _ => {}
        }
        out.push(self.formula()?);
        while self.eat(&Tok::Comma) {
            out.push(self.formula()?);
        }
        Ok(out)
    }

    fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let left = self.formula_list(&[Tok::Arrow])?;
        if !self.eat(&Tok::Arrow) {
            return Err(self.unexpected("`=>`"));
        }
        let right = self.formula_list(&[Tok::Bar])?;
        Ok(Sequent::new(left, right))
    }
}

fn parser(text: &str) -> Result<Parser, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(Parser {
        toks,
        i: 0,
        end: text.len(),
    })
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = parser(text)?;
    let f = p.formula()?;
    if p.peek().is_some() {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let mut p = parser(text)?;
    let s = p.sequent()?;
    if p.peek().is_some() {
        return Err(p.unexpected("end of input"));
    }
    Ok(s)
}

pub fn parse_hypersequent(text: &str) -> Result<Hypersequent, ParseError> {
    let mut p = parser(text)?;
    let mut comps = vec![p.sequent()?];
    while p.eat(&Tok::Bar) {
        comps.push(p.sequent()?);
    }
    if p.peek().is_some() {
        return Err(p.unexpected("`//` or end of input"));
    }
    Ok(Hypersequent::from_vec(comps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom() {
        assert_eq!(parse_formula("p").unwrap(), Formula::atom("p"));
        assert_eq!(parse_formula(" p1 ").unwrap(), Formula::atom("p1"));
    }

    #[test]
    fn precedence() {
        let f = parse_formula("~p & q | r").unwrap();
        let want = Formula::or(
            Formula::and(Formula::atom("p").neg(), Formula::atom("q")),
            Formula::atom("r"),
        );
        assert_eq!(f, want);
        let g = parse_formula("[]p & []q").unwrap();
        assert_eq!(
            g,
            Formula::and(Formula::atom("p").boxed(), Formula::atom("q").boxed())
        );
    }

    #[test]
    fn left_assoc() {
        let f = parse_formula("p & q & r").unwrap();
        let want = Formula::and(
            Formula::and(Formula::atom("p"), Formula::atom("q")),
            Formula::atom("r"),
        );
        assert_eq!(f, want);
        assert_eq!(f.to_string(), "p & q & r");
        let g = parse_formula("p | (q | r)").unwrap();
        assert_eq!(g.to_string(), "p | (q | r)");
    }

    #[test]
    fn unicode_connectives() {
        let a = parse_formula("¬□p ∧ q ∨ r").unwrap();
        let b = parse_formula("~[]p & q | r").unwrap();
        assert_eq!(a, b);
        let h = parse_hypersequent("□p ⇒ ∥ ⇒ p").unwrap();
        assert_eq!(h.len(), 2);
    }

    #[test]
    fn hypersequents() {
        let j = parse_hypersequent("=> p // => [](~[][]p & ~[][]q) // => q").unwrap();
        assert_eq!(j.len(), 3);
        assert!(j.components()[0].left.is_empty());
        let id = parse_hypersequent("p => p").unwrap();
        assert_eq!(id.len(), 1);
        let e = parse_hypersequent("=>").unwrap();
        assert!(e.components()[0].is_empty());
        let c = parse_hypersequent("[]~[](p&q) => // []p => // []q =>").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.to_string(), "[]~[](p & q) => // []p => // []q =>");
    }

    #[test]
    fn errors() {
        assert_eq!(parse_formula(""), Err(ParseError::Empty));
        assert_eq!(parse_hypersequent("   "), Err(ParseError::Empty));
        assert!(matches!(
            parse_formula("p &"),
            Err(ParseError::Syntax { pos: 3, .. })
        ));
        assert!(matches!(
            parse_formula("(p"),
            Err(ParseError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse_formula("p $ q"),
            Err(ParseError::Syntax { pos: 2, .. })
        ));
        assert!(parse_hypersequent("p // q").is_err());
        assert!(parse_hypersequent("p => q //").is_err());
        assert!(parse_formula("[p").is_err());
    }

    #[test]
    fn duplicate_formulas_collapse() {
        let s = parse_sequent("p, p, q => q, q").unwrap();
        assert_eq!(s.left.len(), 2);
        assert_eq!(s.right.len(), 1);
    }
}

use thiserror::Error;

use super::{pow, powseq, Formula, Logic};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at column {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("column {position}: consistency connective not in the signature of {logic}")]
    ConsistencyNotInSignature { position: usize, logic: Logic },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::ConsistencyNotInSignature { position, .. } => {
                *position
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u32),
    Not,
    Circ,
    And,
    Or,
    Imp,
    Caret,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(k) => format!("`{k}`"),
        Tok::Not => "`~`".into(),
        Tok::Circ => "`@`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Imp => "`->`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

/// Token positions are 1-based character columns.
fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '~' | '¬' => Tok::Not,
            '@' | '∘' => Tok::Circ,
            '&' | '∧' => Tok::And,
            '|' | '∨' => Tok::Or,
            '→' => Tok::Imp,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Imp
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..=i].iter().collect();
                let k = s.parse::<u32>().map_err(|_| ParseError::Syntax {
                    position: pos,
                    message: format!("exponent `{s}` is too large"),
                })?;
                Tok::Int(k)
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..=i].iter().collect())
            }
            other => {
                return Err(ParseError::Syntax {
                    position: pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, pos));
        i += 1;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    logic: Option<Logic>,
}

// Exponents beyond this are almost certainly typos; the tree would still be shared
// but every engine walks it.
const MAX_EXPONENT: u32 = 64;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.pos(),
            message: format!("expected {wanted}, found {}", describe(self.peek())),
        })
    }

    fn expect(&mut self, t: Tok, wanted: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.unexpected(wanted)
        }
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Imp {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.prefix()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.prefix()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::neg(self.prefix()?))
            }
            Tok::Circ => {
                if let Some(logic) = self.logic.filter(|l| !l.has_consistency()) {
                    return Err(ParseError::ConsistencyNotInSignature { position: self.pos(), logic });
                }
                self.bump();
                Ok(Formula::cons(self.prefix()?))
            }
            _ => self.postfix(),
        }
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(k) if k <= MAX_EXPONENT => Ok(k),
            Tok::Int(k) => Err(ParseError::Syntax {
                position: pos,
                message: format!("exponent {k} exceeds {MAX_EXPONENT}"),
            }),
            other => Err(ParseError::Syntax {
                position: pos,
                message: format!("expected an exponent, found {}", describe(&other)),
            }),
        }
    }

    fn postfix(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            if *self.peek() == Tok::LParen {
                self.bump();
                let k = self.exponent()?;
                self.expect(Tok::RParen, "`)`")?;
                f = powseq(&f, k);
            } else {
                let k = self.exponent()?;
                f = pow(&f, k);
            }
        }
        Ok(f)
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::var(&name))
            }
            Tok::LParen => {
                self.bump();
                let f = self.imp()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => self.unexpected("a formula"),
        }
    }
}

fn run(text: &str, logic: Option<Logic>) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0, logic };
    let f = p.imp()?;
    if *p.peek() != Tok::End {
        return p.unexpected("an operator or end of input");
    }
    Ok(f)
}

/// Parses `text`, rejecting `@` when `logic` lacks the consistency connective.
///
/// Postfix `^k` expands to `α^k` and `^(k)` to `α^(k)`; both bind tighter than
/// the prefix operators, so `~p^1` is `~(p^1)`.
pub fn parse(text: &str, logic: Logic) -> Result<Formula, ParseError> {
    run(text, Some(logic))
}

/// Parses without a signature check.
pub fn parse_unchecked(text: &str) -> Result<Formula, ParseError> {
    run(text, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(
            parse("~(p & ~p)", Logic::Cila).unwrap(),
            Formula::neg(Formula::and(v("p"), Formula::neg(v("p"))))
        );
        assert_eq!(
            parse("p -> q -> r", Logic::Cn(1)).unwrap(),
            Formula::imp(v("p"), Formula::imp(v("q"), v("r")))
        );
        let p1 = Formula::neg(Formula::and(v("p"), Formula::neg(v("p"))));
        assert_eq!(
            parse("p^2", Logic::Cn(2)).unwrap(),
            Formula::neg(Formula::and(p1.clone(), Formula::neg(p1)))
        );
    }

    #[test]
    fn precedence() {
        assert_eq!(parse_unchecked("p | q & r").unwrap().to_string(), "p | q & r");
        assert_eq!(
            parse_unchecked("p | q & r").unwrap(),
            Formula::or(v("p"), Formula::and(v("q"), v("r")))
        );
        assert_eq!(
            parse_unchecked("p & q & r").unwrap(),
            Formula::and(Formula::and(v("p"), v("q")), v("r"))
        );
        assert_eq!(parse_unchecked("~p^1").unwrap(), Formula::neg(pow(&v("p"), 1)));
        assert_eq!(parse_unchecked("(~p)^1").unwrap(), pow(&Formula::neg(v("p")), 1));
        assert_eq!(parse_unchecked("p^(2)").unwrap(), powseq(&v("p"), 2));
        assert_eq!(parse_unchecked("p^1^1").unwrap(), pow(&v("p"), 2));
    }

    #[test]
    fn unicode_aliases() {
        assert_eq!(
            parse_unchecked("¬p ∧ ∘q → p ∨ q").unwrap(),
            parse_unchecked("~p & @q -> p | q").unwrap()
        );
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("p & @q", Logic::Cn(2)).unwrap_err();
        assert_eq!(e, ParseError::ConsistencyNotInSignature { position: 5, logic: Logic::Cn(2) });
        assert_eq!(parse_unchecked("p & ").unwrap_err().position(), 5);
        assert_eq!(parse_unchecked("p $ q").unwrap_err().position(), 3);
        assert_eq!(parse_unchecked("(p").unwrap_err().position(), 3);
        assert!(parse_unchecked("p q").is_err());
        assert!(parse_unchecked("p^").is_err());
        assert!(parse_unchecked("p^999").is_err());
        assert!(parse_unchecked("").is_err());
    }

    #[test]
    fn identifiers() {
        assert_eq!(parse_unchecked("p_1 & q2").unwrap().atoms().len(), 2);
        assert!(parse_unchecked("_p").is_err());
    }
}

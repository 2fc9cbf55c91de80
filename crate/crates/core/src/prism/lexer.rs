use crate::error::{Error, Location, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Unsigned integer literal.
    Int(String),
    /// Unsigned decimal literal, possibly with exponent.
    Decimal(String),
    /// Quoted string, either quote kind.
    Str(String),
    LBracket,
    RBracket,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Colon,
    Comma,
    DotDot,
    Arrow,
    Prime,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Not,
    Implies,
    Question,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(s) | Tok::Decimal(s) => format!("number {s}"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::DotDot => "..",
            Tok::Arrow => "->",
            Tok::Prime => "'",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Not => "!",
            Tok::Implies => "=>",
            Tok::Question => "?",
            _ => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub loc: Location,
}

/// Tokenizes `text`. A `'` directly after an identifier is a prime;
/// elsewhere it opens a single-quoted string.
pub fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! advance {
        ($n:expr) => {{
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let loc = Location { line, column: col };
        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        if c == '/' && next == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                advance!(1);
            }
            continue;
        }
        if c == '/' && next == Some('*') {
            advance!(2);
            loop {
                if i >= chars.len() {
                    return Err(Error::Parse {
                        location: loc,
                        message: "unterminated comment".into(),
                    });
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    advance!(2);
                    break;
                }
                advance!(1);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance!(1);
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                loc,
            });
            if i < chars.len() && chars[i] == '\'' {
                out.push(Token {
                    tok: Tok::Prime,
                    loc: Location { line, column: col },
                });
                advance!(1);
            }
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && next.is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            let mut decimal = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance!(1);
            }
            // `..` is a range, not a decimal point
            if i < chars.len() && chars[i] == '.' && chars.get(i + 1) != Some(&'.') {
                decimal = true;
                advance!(1);
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance!(1);
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    decimal = true;
                    advance!(j - i);
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        advance!(1);
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: if decimal { Tok::Decimal(s) } else { Tok::Int(s) },
                loc,
            });
            continue;
        }
        if c == '"' || c == '\'' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j] != c && chars[j] != '\n' {
                j += 1;
            }
            if j >= chars.len() || chars[j] != c {
                return Err(Error::Parse {
                    location: loc,
                    message: "unterminated string".into(),
                });
            }
            let s: String = chars[start..j].iter().collect();
            advance!(j + 1 - i);
            out.push(Token {
                tok: Tok::Str(s),
                loc,
            });
            continue;
        }
        let two = next.map(|n| [c, n]);
        let (tok, len) = match two {
            Some(['.', '.']) => (Tok::DotDot, 2),
            Some(['-', '>']) => (Tok::Arrow, 2),
            Some(['!', '=']) => (Tok::Ne, 2),
            Some(['<', '=']) => (Tok::Le, 2),
            Some(['>', '=']) => (Tok::Ge, 2),
            Some(['=', '>']) => (Tok::Implies, 2),
            _ => {
                let t = match c {
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ';' => Tok::Semi,
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '=' => Tok::Eq,
                    '<' => Tok::Lt,
                    '>' => Tok::Gt,
                    '&' => Tok::And,
                    '|' => Tok::Or,
                    '!' => Tok::Not,
                    '?' => Tok::Question,
                    other => {
                        return Err(Error::Parse {
                            location: loc,
                            message: format!("unexpected character {other:?}"),
                        })
                    }
                };
                (t, 1)
            }
        };
        advance!(len);
        out.push(Token { tok, loc });
    }
    out.push(Token {
        tok: Tok::Eof,
        loc: Location { line, column: col },
    });
    Ok(out)
}

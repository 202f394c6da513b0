use super::{Diagnostic, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Ident,
    Str,
    Number,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Equals,
    Arrow,
    Eof,
}

impl TokenKind {
    pub(crate) fn describe(self) -> &'static str {
        match self {
            TokenKind::Ident => "identifier",
            TokenKind::Str => "string",
            TokenKind::Number => "number",
            TokenKind::LBrace => "`{`",
            TokenKind::RBrace => "`}`",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::Comma => "`,`",
            TokenKind::Semi => "`;`",
            TokenKind::Colon => "`:`",
            TokenKind::Equals => "`=`",
            TokenKind::Arrow => "`->`",
            TokenKind::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    /// Identifier name, unescaped string contents, or raw number text.
    pub text: String,
    pub span: SourceSpan,
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Cursor {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_next(&self) -> Option<char> {
        self.chars.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat_digits(&mut self, out: &mut String) -> usize {
        let mut n = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            out.push(c);
            self.bump();
            n += 1;
        }
        n
    }
}

pub(crate) fn lex(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor { chars: text.chars().collect(), pos: 0, line: 1, column: 1 };
    let mut tokens = Vec::new();
    let mut diags = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, column, start) = (cur.line, cur.column, cur.pos);
        let span_from = |cur: &Cursor| SourceSpan::new(line, column, cur.pos - start);

        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }

        let single = match c {
            '{' => Some(TokenKind::LBrace),
            '}' => Some(TokenKind::RBrace),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            ',' => Some(TokenKind::Comma),
            ';' => Some(TokenKind::Semi),
            ':' => Some(TokenKind::Colon),
            '=' => Some(TokenKind::Equals),
            _ => None,
        };
        if let Some(kind) = single {
            cur.bump();
            tokens.push(Token { kind, text: c.to_string(), span: span_from(&cur) });
            continue;
        }

        if c == '-' && cur.peek_next() == Some('>') {
            cur.bump();
            cur.bump();
            tokens.push(Token { kind: TokenKind::Arrow, text: "->".into(), span: span_from(&cur) });
            continue;
        }

        if c.is_ascii_digit() || (c == '-' && cur.peek_next().is_some_and(|n| n.is_ascii_digit())) {
            let mut raw = String::new();
            if c == '-' {
                raw.push('-');
                cur.bump();
            }
            cur.eat_digits(&mut raw);
            if cur.peek() == Some('/') {
                raw.push('/');
                cur.bump();
                if cur.eat_digits(&mut raw) == 0 {
                    diags.push(
                        Diagnostic::error("malformed rational: expected digits after `/`", span_from(&cur))
                            .expecting("digits"),
                    );
                    continue;
                }
            }
            tokens.push(Token { kind: TokenKind::Number, text: raw, span: span_from(&cur) });
            continue;
        }

        if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(c) = cur.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                name.push(c);
                cur.bump();
            }
            tokens.push(Token { kind: TokenKind::Ident, text: name, span: span_from(&cur) });
            continue;
        }

        if c == '"' {
            cur.bump();
            let mut value = String::new();
            let mut closed = false;
            while let Some(c) = cur.peek() {
                match c {
                    '"' => {
                        cur.bump();
                        closed = true;
                        break;
                    }
                    '\n' => break,
                    '\\' => {
                        cur.bump();
                        match cur.peek() {
                            Some(e @ ('"' | '\\')) => {
                                value.push(e);
                                cur.bump();
                            }
                            Some('n') => {
                                value.push('\n');
                                cur.bump();
                            }
                            _ => {
                                let here = SourceSpan::new(cur.line, cur.column - 1, 1);
                                diags.push(Diagnostic::error("unknown escape in string", here));
                            }
                        }
                    }
                    _ => {
                        value.push(c);
                        cur.bump();
                    }
                }
            }
            if closed {
                tokens.push(Token { kind: TokenKind::Str, text: value, span: span_from(&cur) });
            } else {
                diags.push(Diagnostic::error("unterminated string", span_from(&cur)).expecting("`\"`"));
            }
            continue;
        }

        cur.bump();
        let message = if c == '-' {
            "stray `-`: expected a number or `->`".to_string()
        } else {
            format!("unexpected character `{}`", c.escape_debug())
        };
        diags.push(Diagnostic::error(message, span_from(&cur)));
    }

    tokens.push(Token { kind: TokenKind::Eof, text: String::new(), span: SourceSpan::new(cur.line, cur.column, 0) });
    (tokens, diags)
}

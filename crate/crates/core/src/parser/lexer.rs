use crate::diagnostics::{Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tk {
    Ident(String),
    /// Run of operator characters such as `+` or `<*>`.
    Sym(String),
    /// Superscript copy index, e.g. `¹`.
    Sup(u32),
    /// Backquoted value literal.
    Lit(String),
    /// Punctuation and built-in symbols, ASCII aliases already mapped to
    /// their Unicode form.
    P(&'static str),
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tk: Tk,
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl Token {
    pub fn is(&self, p: &str) -> bool {
        matches!(&self.tk, Tk::P(q) if *q == p)
    }

    pub fn is_word(&self, w: &str) -> bool {
        matches!(&self.tk, Tk::Ident(s) if s == w)
    }

    pub fn text(&self) -> String {
        match &self.tk {
            Tk::Ident(s) | Tk::Sym(s) => s.clone(),
            Tk::Sup(n) => format!("^{n}"),
            Tk::Lit(s) => format!("`{s}`"),
            Tk::P(p) => p.to_string(),
            Tk::Eof => "end of input".to_string(),
        }
    }
}

const FIXED: &[(&str, &str)] = &[
    ("::=", "::="),
    ("<->", "≡"),
    ("->", "→"),
    ("!=", "≠"),
    ("\\/", "∪"),
    ("/\\", "∩"),
    ("[=", "[="),
    ("==", "=="),
    ("\\", "∖"),
    ("∪", "∪"),
    ("∩", "∩"),
    ("∖", "∖"),
    ("×", "×"),
    ("∈", "∈"),
    ("⊆", "⊆"),
    ("¬", "¬"),
    ("∧", "∧"),
    ("∨", "∨"),
    ("→", "→"),
    ("≡", "≡"),
    ("↔", "≡"),
    ("∀", "∀"),
    ("∃", "∃"),
    ("≠", "≠"),
    ("∅", "∅"),
    ("⊤", "⊤"),
    ("⊥", "⊥"),
    ("⊑", "[="),
    ("=", "="),
    ("|", "|"),
    (".", "."),
    (",", ","),
    (";", ";"),
    ("(", "("),
    (")", ")"),
    ("{", "{"),
    ("}", "}"),
    ("^", "^"),
    (":", ":"),
];

const SYMBOL_CHARS: &str = "+-*/<>~&@%?!";

fn superscript(c: char) -> Option<u32> {
    match c {
        '⁰' => Some(0),
        '¹' => Some(1),
        '²' => Some(2),
        '³' => Some(3),
        '⁴'..='⁹' => Some(c as u32 - '⁴' as u32 + 4),
        _ => None,
    }
}

pub fn is_ident_start(c: char) -> bool {
    (c.is_alphanumeric() && superscript(c).is_none()) || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    is_ident_start(c) || c == '\''
}

/// Tokenizes `src`; unknown characters are reported and skipped.
pub fn lex(src: &str, file: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let starts_with = |i: usize, pat: &str| {
        let mut k = i;
        for pc in pat.chars() {
            if chars.get(k) != Some(&pc) {
                return false;
            }
            k += 1;
        }
        true
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, col);
        let push = |tk: Tk, n: usize, toks: &mut Vec<Token>| {
            toks.push(Token {
                tk,
                line: start.0,
                col: start.1,
                len: n as u32,
            })
        };
        if let Some((pat, canon)) = FIXED.iter().find(|(p, _)| starts_with(i, p)) {
            let n = pat.chars().count();
            push(Tk::P(canon), n, &mut toks);
            i += n;
            col += n as u32;
            continue;
        }
        if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            push(Tk::Ident(s), j - i, &mut toks);
            col += (j - i) as u32;
            i = j;
            continue;
        }
        if superscript(c).is_some() {
            let mut j = i;
            let mut n = 0u32;
            while let Some(d) = chars.get(j).and_then(|&c| superscript(c)) {
                n = n.saturating_mul(10).saturating_add(d);
                j += 1;
            }
            push(Tk::Sup(n), j - i, &mut toks);
            col += (j - i) as u32;
            i = j;
            continue;
        }
        if c == '`' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != '`' && chars[j] != '\n' {
                j += 1;
            }
            if chars.get(j) != Some(&'`') {
                diags.push(Diagnostic::error(
                    "unterminated literal",
                    SourceSpan::new(file, line, col, (j - i) as u32),
                ));
                col += (j - i) as u32;
                i = j;
                continue;
            }
            let s: String = chars[i + 1..j].iter().collect();
            push(Tk::Lit(s), j + 1 - i, &mut toks);
            col += (j + 1 - i) as u32;
            i = j + 1;
            continue;
        }
        if SYMBOL_CHARS.contains(c) {
            let mut j = i;
            while j < chars.len() && SYMBOL_CHARS.contains(chars[j]) && !FIXED[..8].iter().any(|(p, _)| starts_with(j, p)) {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            push(Tk::Sym(s), j - i, &mut toks);
            col += (j - i) as u32;
            i = j;
            continue;
        }
        diags.push(Diagnostic::error(
            format!("unexpected character {c:?}"),
            SourceSpan::new(file, line, col, 1),
        ));
        i += 1;
        col += 1;
    }
    // End of input sits just past the last token so spans stay inside the text.
    let (line, col) = toks.last().map_or((1, 1), |t: &Token| (t.line, t.col + t.len));
    toks.push(Token {
        tk: Tk::Eof,
        line,
        col,
        len: 0,
    });
    (toks, diags)
}

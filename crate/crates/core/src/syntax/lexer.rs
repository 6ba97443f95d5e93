use super::error::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `name#k`: a name carrying a generation stamp.
    Stamped(String, u32),
    Num(u64),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: &[&str] = &[
    "=>", "->", "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "|", "=", ">", "!", "*",
];

pub const KEYWORDS: &[&str] = &[
    "region", "type", "fun", "def", "init", "nu", "emit", "present", "else", "match", "with",
    "then", "if", "pause",
];

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
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
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (tline, tcol) = (line, col);
        if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let tok = if chars.get(i) == Some(&'#') {
                let ds = i + 1;
                let mut j = ds;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == ds {
                    return Err(SyntaxError::at(line, col + (i - start), "expected digits after `#`"));
                }
                let digits: String = chars[ds..j].iter().collect();
                let stamp = digits
                    .parse()
                    .map_err(|_| SyntaxError::at(line, col, "stamp out of range"))?;
                i = j;
                Tok::Stamped(text, stamp)
            } else {
                Tok::Ident(text)
            };
            col += i - start;
            out.push(Token { tok, line: tline, col: tcol });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits
                .parse()
                .map_err(|_| SyntaxError::at(line, col, "number out of range"))?;
            col += i - start;
            out.push(Token { tok: Tok::Num(n), line: tline, col: tcol });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push(Token { tok: Tok::Sym(s), line: tline, col: tcol });
            }
            None => return Err(SyntaxError::at(line, col, format!("unexpected character `{c}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let toks = tokenize("def A(x) =>\n  s#3 // c\n 12").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("def".into()),
                Tok::Ident("A".into()),
                Tok::Sym("("),
                Tok::Ident("x".into()),
                Tok::Sym(")"),
                Tok::Sym("=>"),
                Tok::Stamped("s".into(), 3),
                Tok::Num(12),
                Tok::Eof
            ]
        );
        assert_eq!((toks[6].line, toks[6].col), (2, 3));
        assert_eq!((toks[7].line, toks[7].col), (3, 2));
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("def A() = 0 $").unwrap_err();
        assert_eq!(err.position(), Some((1, 13)));
    }
}

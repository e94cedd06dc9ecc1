//! Text format: `c * x0^e0*x2^e2` terms in descending graded-lex order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Monomial, MultiPoly, PolyError};

pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

pub(crate) fn format_poly(p: &MultiPoly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&c.abs().to_string());
        let vars: Vec<String> = m
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, e)| format!("{}^{}", names[i], e))
            .collect();
        if !vars.is_empty() {
            out.push_str(" * ");
            out.push_str(&vars.join("*"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, PolyError> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            d if d.is_ascii_digit() => {
                let st = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let txt: String = chars[st..i].iter().collect();
                out.push(Tok::Num(txt.parse().map_err(|_| PolyError::Parse(txt.clone()))?));
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let st = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[st..i].iter().collect()));
            }
            other => return Err(PolyError::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

/// Parse with an explicit variable-name table.
pub fn parse_poly(s: &str, names: &[String]) -> Result<MultiPoly, PolyError> {
    let lookup = |id: &str| names.iter().position(|n| n == id);
    parse_with(s, names.len(), &lookup)
}

/// Parse with variables named `x<i>` (or `T<i>`); the arity is the largest index plus one,
/// or `min_vars` if that is larger.
pub fn parse_poly_auto(s: &str, min_vars: usize) -> Result<MultiPoly, PolyError> {
    let toks = tokenize(s)?;
    let mut n = min_vars;
    for t in &toks {
        if let Tok::Ident(id) = t {
            let idx = auto_index(id).ok_or_else(|| PolyError::Parse(format!("unknown variable {id}")))?;
            n = n.max(idx + 1);
        }
    }
    parse_with(s, n, &auto_index)
}

/// Parse each non-blank line of `text`; `#` starts a comment.
pub fn parse_lines(text: &str, min_vars: usize) -> Result<Vec<MultiPoly>, PolyError> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| parse_poly_auto(l, min_vars))
        .collect()
}

fn auto_index(id: &str) -> Option<usize> {
    let rest = id.strip_prefix('x').or_else(|| id.strip_prefix('T'))?;
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

fn parse_with(s: &str, n: usize, lookup: &dyn Fn(&str) -> Option<usize>) -> Result<MultiPoly, PolyError> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(PolyError::Parse("empty polynomial".into()));
    }
    let mut p = MultiPoly::zero(n);
    let mut i = 0;
    let mut first = true;
    while i < toks.len() {
        let mut sign = BigRational::one();
        let mut saw_sign = false;
        while i < toks.len() && (toks[i] == Tok::Plus || toks[i] == Tok::Minus) {
            if toks[i] == Tok::Minus {
                sign = -sign;
            }
            saw_sign = true;
            i += 1;
        }
        if !first && !saw_sign {
            return Err(PolyError::Parse("missing operator between terms".into()));
        }
        first = false;
        if i >= toks.len() {
            return Err(PolyError::Parse("dangling sign".into()));
        }
        let mut coef = sign;
        let mut mono = vec![0u32; n];
        let mut expect_factor = true;
        while i < toks.len() && expect_factor {
            match &toks[i] {
                Tok::Num(a) => {
                    let mut v = BigRational::from_integer(a.clone());
                    i += 1;
                    if i < toks.len() && toks[i] == Tok::Slash {
                        i += 1;
                        match toks.get(i) {
                            Some(Tok::Num(b)) if !b.is_zero() => {
                                v /= BigRational::from_integer(b.clone());
                                i += 1;
                            }
                            _ => return Err(PolyError::Parse("bad denominator".into())),
                        }
                    }
                    coef *= v;
                }
                Tok::Ident(id) => {
                    let k = lookup(id).ok_or_else(|| PolyError::Parse(format!("unknown variable {id}")))?;
                    if k >= n {
                        return Err(PolyError::Parse(format!("variable {id} out of range")));
                    }
                    i += 1;
                    let mut e = 1u32;
                    if i < toks.len() && toks[i] == Tok::Caret {
                        i += 1;
                        match toks.get(i) {
                            Some(Tok::Num(b)) => {
                                e = u32::try_from(b.clone()).map_err(|_| PolyError::Parse("exponent too large".into()))?;
                                i += 1;
                            }
                            _ => return Err(PolyError::Parse("bad exponent".into())),
                        }
                    }
                    mono[k] += e;
                }
                _ => return Err(PolyError::Parse(format!("unexpected token {:?}", toks[i]))),
            }
            if i < toks.len() && toks[i] == Tok::Star {
                i += 1;
                expect_factor = true;
                if i >= toks.len() {
                    return Err(PolyError::Parse("dangling '*'".into()));
                }
            } else {
                expect_factor = false;
            }
        }
        p.add_term(Monomial(mono), coef);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn round_trip() {
        let names = default_names(3);
        let p = parse_poly("3 * x0^2*x1^1 - 1/2 * x2^1 + 7", &names).unwrap();
        let s = p.to_text(&names);
        assert_eq!(s, "3 * x0^2*x1^1 - 1/2 * x2^1 + 7");
        assert_eq!(parse_poly(&s, &names).unwrap(), p);
    }

    #[test]
    fn relaxed_input() {
        let p = parse_poly_auto("x0^3 + x1^3 - x2*x3*2", 0).unwrap();
        assert_eq!(p.nvars(), 4);
        assert_eq!(p.coeff(&Monomial(vec![0, 0, 1, 1])), rat(-2));
        let q = parse_poly_auto("-T0 + T1", 4).unwrap();
        assert_eq!(q.nvars(), 4);
        assert_eq!(q.to_text(&default_names(4)), "-1 * x0^1 + 1 * x1^1");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_poly_auto("x0 x1", 0).is_err());
        assert!(parse_poly_auto("x0 + ", 0).is_err());
        assert!(parse_poly_auto("y0", 0).is_err());
        assert!(parse_poly_auto("1/0", 0).is_err());
    }
}

//! Text syntax for points, shared by definition files, probe files and
//! certificates.
//!
//! Parsing is directed by the space:
//!
//! | space             | syntax                      | example      |
//! |-------------------|-----------------------------|--------------|
//! | finite-discrete   | label                       | `a`          |
//! | interval          | rational                    | `3/4`        |
//! | finite product    | coordinates, comma-separated| `a,1/2`      |
//! | countable product | prefix `;` tail anchor index| `1,0,1;0`    |
//!
//! Product coordinates that are themselves products are parenthesised,
//! e.g. `(a,b),(c,d)`. Outer parentheses are optional at top level.

use crate::product::ProductPoint;
use crate::rational::{parse_rational, ParseRationalError};
use crate::space::{Point, Space, SpaceError, SpaceKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NotationError {
    #[error("malformed point `{text}`: {reason}")]
    Syntax { text: String, reason: String },
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

fn syntax(text: &str, reason: impl Into<String>) -> NotationError {
    NotationError::Syntax {
        text: text.to_string(),
        reason: reason.into(),
    }
}

/// Renders `p` in the top-level syntax of `space`.
pub fn format_point(space: &Space, p: &Point) -> String {
    let mut out = String::new();
    write_point(space, p, true, &mut out);
    out
}

fn write_point(space: &Space, p: &Point, top: bool, out: &mut String) {
    match (space.kind(), p) {
        (SpaceKind::Finite(m), Point::Discrete(i)) if *i < m.len() => out.push_str(&m.labels()[*i]),
        (SpaceKind::FiniteProduct(fp), Point::Tuple(cs)) => {
            if !top {
                out.push('(');
            }
            for (k, (c, s)) in cs.iter().zip(fp.components()).enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_point(s, c, false, out);
            }
            if !top {
                out.push(')');
            }
        }
        (SpaceKind::CountableProduct(cp), Point::Sequence(pp)) => {
            if !top {
                out.push('(');
            }
            for (k, c) in pp.prefix.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_point(cp.component(k + 1), c, false, out);
            }
            out.push(';');
            out.push_str(&pp.tail_anchor.to_string());
            if !top {
                out.push(')');
            }
        }
        // Reals and anything malformed fall back to the structural form.
        _ => out.push_str(&p.to_string()),
    }
}

/// Parses and validates a point of `space`.
pub fn parse_point(space: &Space, text: &str) -> Result<Point, NotationError> {
    let p = parse_unchecked(space, text.trim())?;
    space.validate_point(&p)?;
    Ok(p)
}

fn strip_outer_parens(s: &str) -> &str {
    let bytes = s.as_bytes();
    if bytes.first() != Some(&b'(') || bytes.last() != Some(&b')') {
        return s;
    }
    let mut depth = 0i32;
    for (k, b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 && k + 1 != bytes.len() {
                    return s;
                }
            }
            _ => {}
        }
    }
    s[1..s.len() - 1].trim()
}

/// Splits on `sep` at parenthesis depth zero.
fn split_top(text: &str, sep: char) -> Result<Vec<&str>, NotationError> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (k, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(syntax(text, "unbalanced `)`"));
                }
            }
            c if c == sep && depth == 0 => {
                parts.push(text[start..k].trim());
                start = k + ch.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(syntax(text, "unbalanced `(`"));
    }
    parts.push(text[start..].trim());
    Ok(parts)
}

fn parse_unchecked(space: &Space, text: &str) -> Result<Point, NotationError> {
    match space.kind() {
        SpaceKind::Finite(_) => Ok(space.point(text)?),
        SpaceKind::Interval(_) => Ok(Point::Real(parse_rational(text)?)),
        SpaceKind::FiniteProduct(fp) => {
            let inner = strip_outer_parens(text);
            let parts = split_top(inner, ',')?;
            if parts.len() != fp.components().len() {
                return Err(syntax(
                    text,
                    format!("expected {} coordinates, found {}", fp.components().len(), parts.len()),
                ));
            }
            let coords = parts
                .iter()
                .zip(fp.components())
                .map(|(part, s)| parse_unchecked(s, part))
                .collect::<Result<_, _>>()?;
            Ok(Point::Tuple(coords))
        }
        SpaceKind::CountableProduct(cp) => {
            let inner = strip_outer_parens(text);
            let halves = split_top(inner, ';')?;
            if halves.len() != 2 {
                return Err(syntax(text, "expected `coordinates;tail-anchor`"));
            }
            let tail: usize = halves[1]
                .parse()
                .map_err(|_| syntax(text, format!("tail anchor `{}` is not an index", halves[1])))?;
            let prefix = if halves[0].is_empty() {
                Vec::new()
            } else {
                split_top(halves[0], ',')?
                    .iter()
                    .enumerate()
                    .map(|(k, part)| {
                        if part.is_empty() {
                            Err(syntax(text, format!("empty coordinate {}", k + 1)))
                        } else {
                            parse_unchecked(cp.component(k + 1), part)
                        }
                    })
                    .collect::<Result<_, _>>()?
            };
            Ok(Point::Sequence(ProductPoint::new(prefix, tail)))
        }
    }
}

//! The plain-text structure dialect.
//!
//! A structure block is introduced by an element-set line
//!
//! ```text
//! |A|=9, A(without commas)={oiabcdefg}. Constraints:
//! ```
//!
//! followed by constraint lines made of whitespace-separated tokens `x+y=z` or
//! `x@y=z`. Text after `;` is a comment. Any other line is prose: prose before
//! an element-set line is kept as that block's comments. An optional trailer
//!
//! ```text
//! Result for A=F_0:  |Sub(A)| = 254, whence
//! sigma(A) = |Sub(A)|*2^(8-|A|) =  127.0000000000000000 .
//! ```
//!
//! names the block and records a previously reported result.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("line {line}: unknown element {element:?}")]
    UnknownElement { line: usize, element: char },
    #[error("line {line}: conflicting constraints for the pair {left}{right}")]
    ConflictingConstraint { line: usize, left: char, right: char },
    #[error("line {0}: malformed line")]
    MalformedLine(usize),
    #[error("line {line}: element {element:?} listed twice")]
    DuplicateElement { line: usize, element: char },
    #[error("structure has no elements")]
    Empty,
    #[error("expected exactly one structure block, found {0}")]
    BlockCount(usize),
    #[error("invalid JSON structure: {0}")]
    Json(String),
}

impl SpecError {
    pub fn line(&self) -> Option<usize> {
        match *self {
            SpecError::UnknownElement { line, .. }
            | SpecError::ConflictingConstraint { line, .. }
            | SpecError::MalformedLine(line)
            | SpecError::DuplicateElement { line, .. } => Some(line),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpSymbol {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "@")]
    At,
}

impl OpSymbol {
    pub fn as_char(self) -> char {
        match self {
            OpSymbol::Plus => '+',
            OpSymbol::At => '@',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            '+' => Some(OpSymbol::Plus),
            '@' => Some(OpSymbol::At),
            _ => None,
        }
    }
}

/// `left op right = result`; serialised as a 4-tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(char, OpSymbol, char, char)", into = "(char, OpSymbol, char, char)")]
pub struct Constraint {
    pub left: char,
    pub op: OpSymbol,
    pub right: char,
    pub result: char,
}

impl From<(char, OpSymbol, char, char)> for Constraint {
    fn from((left, op, right, result): (char, OpSymbol, char, char)) -> Self {
        Constraint { left, op, right, result }
    }
}

impl From<Constraint> for (char, OpSymbol, char, char) {
    fn from(c: Constraint) -> Self {
        (c.left, c.op, c.right, c.result)
    }
}

impl Constraint {
    fn parse(token: &str) -> Option<Constraint> {
        let cs: Vec<char> = token.chars().collect();
        if cs.len() != 5 || cs[3] != '=' {
            return None;
        }
        Some(Constraint { left: cs[0], op: OpSymbol::from_char(cs[1])?, right: cs[2], result: cs[4] })
    }

    fn looks_like(token: &str) -> bool {
        token.contains('=') && (token.contains('+') || token.contains('@'))
    }
}

/// A result line previously reported for a block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportedResult {
    pub sub_count: u64,
    /// The sigma value exactly as printed, if a sigma line followed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureSpec {
    pub name: String,
    pub elements: Vec<char>,
    pub constraints: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comments: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reported: Option<ReportedResult>,
}

impl StructureSpec {
    /// Validates a spec that did not come through the text parser (e.g. JSON).
    pub fn check(&self) -> Result<(), SpecError> {
        if self.elements.is_empty() {
            return Err(SpecError::Empty);
        }
        for (i, &e) in self.elements.iter().enumerate() {
            if self.elements[..i].contains(&e) || e.is_whitespace() {
                return Err(SpecError::DuplicateElement { line: 0, element: e });
            }
        }
        let mut seen: Vec<(char, char, char)> = Vec::new();
        for c in &self.constraints {
            for e in [c.left, c.right, c.result] {
                if !self.elements.contains(&e) {
                    return Err(SpecError::UnknownElement { line: 0, element: e });
                }
            }
            let (l, r) = (c.left.min(c.right), c.left.max(c.right));
            if seen.iter().any(|&(a, b, z)| a == l && b == r && z != c.result) {
                return Err(SpecError::ConflictingConstraint { line: 0, left: l, right: r });
            }
            seen.push((l, r, c.result));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<StructureSpec, SpecError> {
        let spec: StructureSpec = serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))?;
        spec.check()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialises")
    }
}

/// Parses exactly one block.
pub fn parse_spec(text: &str) -> Result<StructureSpec, SpecError> {
    let mut blocks = parse_specs(text)?;
    if blocks.len() != 1 {
        return Err(SpecError::BlockCount(blocks.len()));
    }
    Ok(blocks.pop().unwrap())
}

/// Parses every block of a multi-structure file.
pub fn parse_specs(text: &str) -> Result<Vec<StructureSpec>, SpecError> {
    const ELEMENT_MARK: &str = "A(without commas)={";
    let mut blocks: Vec<StructureSpec> = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    // (left, right) -> (result, line) for the open block
    let mut seen: Vec<(char, char, char)> = Vec::new();
    let mut named_by_trailer = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split(';').next().unwrap_or("");
        let trimmed = raw.trim();

        if let Some(at) = body.find(ELEMENT_MARK) {
            finish(&mut blocks, named_by_trailer);
            named_by_trailer = false;
            seen.clear();
            let elements = parse_element_line(body, at + ELEMENT_MARK.len(), line)?;
            let comments: Vec<String> = std::mem::take(&mut pending);
            blocks.push(StructureSpec {
                name: String::new(),
                elements,
                constraints: Vec::new(),
                comments,
                reported: None,
            });
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("Result for A=") {
            let block = blocks.last_mut().ok_or(SpecError::MalformedLine(line))?;
            let (name, tail) = match rest.find(":  |Sub(A)| = ") {
                Some(p) => (&rest[..p], Some(&rest[p + ":  |Sub(A)| = ".len()..])),
                None => (rest.strip_suffix(':').ok_or(SpecError::MalformedLine(line))?, None),
            };
            block.name = name.to_string();
            named_by_trailer = true;
            if let Some(tail) = tail {
                let digits = tail.split(',').next().unwrap_or("").trim();
                let sub_count = digits.parse().map_err(|_| SpecError::MalformedLine(line))?;
                block.reported = Some(ReportedResult { sub_count, sigma: None });
            }
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("sigma(A) = |Sub(A)|*2^(8-|A|) =") {
            let block = blocks.last_mut().ok_or(SpecError::MalformedLine(line))?;
            let value = rest.trim().trim_end_matches('.').trim();
            match &mut block.reported {
                Some(r) if !value.is_empty() => r.sigma = Some(value.to_string()),
                _ => return Err(SpecError::MalformedLine(line)),
            }
            continue;
        }

        let tokens: Vec<&str> = body.split_whitespace().collect();
        let shaped = tokens.iter().filter(|t| Constraint::looks_like(t)).count();
        if tokens.is_empty() || shaped == 0 {
            if !trimmed.is_empty() && !trimmed.starts_with(';') {
                pending.push(raw.to_string());
            }
            continue;
        }
        if shaped != tokens.len() {
            return Err(SpecError::MalformedLine(line));
        }
        let block = blocks.last_mut().ok_or(SpecError::MalformedLine(line))?;
        for t in tokens {
            let c = Constraint::parse(t).ok_or(SpecError::MalformedLine(line))?;
            for e in [c.left, c.right, c.result] {
                if !block.elements.contains(&e) {
                    return Err(SpecError::UnknownElement { line, element: e });
                }
            }
            let (l, r) = (c.left.min(c.right), c.left.max(c.right));
            if seen.iter().any(|&(a, b, z)| a == l && b == r && z != c.result) {
                return Err(SpecError::ConflictingConstraint { line, left: l, right: r });
            }
            seen.push((l, r, c.result));
            block.constraints.push(c);
        }
    }
    finish(&mut blocks, named_by_trailer);
    Ok(blocks)
}

fn finish(blocks: &mut [StructureSpec], named_by_trailer: bool) {
    let count = blocks.len();
    if let Some(b) = blocks.last_mut() {
        if !named_by_trailer && b.name.is_empty() {
            b.name = b
                .comments
                .first()
                .map(|c| c.trim().to_string())
                .unwrap_or_else(|| format!("block {count}"));
        }
    }
}

fn parse_element_line(body: &str, start: usize, line: usize) -> Result<Vec<char>, SpecError> {
    let rest = &body[start..];
    let close = rest.find('}').ok_or(SpecError::MalformedLine(line))?;
    let mut elements = Vec::new();
    for c in rest[..close].chars() {
        if c.is_whitespace() || c == ',' {
            return Err(SpecError::MalformedLine(line));
        }
        if elements.contains(&c) {
            return Err(SpecError::DuplicateElement { line, element: c });
        }
        elements.push(c);
    }
    if elements.is_empty() {
        return Err(SpecError::MalformedLine(line));
    }
    // An optional "|A|=n," prefix must agree with the element count.
    if let Some(p) = body.find("|A|=") {
        let digits: String = body[p + 4..].chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.parse::<usize>().ok() != Some(elements.len()) {
            return Err(SpecError::MalformedLine(line));
        }
    }
    Ok(elements)
}

/// The two report lines printed after counting a block.
pub fn render_result(name: &str, sub_count: impl fmt::Display, sigma: impl fmt::Display) -> String {
    format!("Result for A={name}:  |Sub(A)| = {sub_count}, whence\nsigma(A) = |Sub(A)|*2^(8-|A|) = {sigma:>21} .\n")
}

/// Renders a block in the dialect; `parse_spec(&render_spec(s)) == s` for
/// named specs with non-empty element sets.
pub fn render_spec(spec: &StructureSpec) -> String {
    let mut out = String::new();
    for c in &spec.comments {
        out.push_str(c);
        out.push('\n');
    }
    let elements: String = spec.elements.iter().collect();
    writeln!(out, "|A|={}, A(without commas)={{{}}}. Constraints:", spec.elements.len(), elements).unwrap();
    for chunk in spec.constraints.chunks(8) {
        let line: Vec<String> = chunk
            .iter()
            .map(|c| format!("{}{}{}={}", c.left, c.op.as_char(), c.right, c.result))
            .collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    match &spec.reported {
        Some(r) => match &r.sigma {
            Some(s) => out.push_str(&render_result(&spec.name, r.sub_count, s)),
            None => writeln!(out, "Result for A={}:  |Sub(A)| = {}, whence", spec.name, r.sub_count).unwrap(),
        },
        None => writeln!(out, "Result for A={}:", spec.name).unwrap(),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgroupoid::PartialGroupoid;

    const A0_BLOCK: &str = "\
A_0 is the 8-element boolean join-semilattice with edges
 oa ab oc Ai Bi Ci aB aC bA bC cA cB
|A|=8, A(without commas)={oiabcABC}. Constraints:
a+b=C a+c=B a+A=i  b+c=A b+B=i  c+C=i  A+B=i   A+C=i   B+C=i
Result for A=A_0:  |Sub(A)| = 122, whence
sigma(A) = |Sub(A)|*2^(8-|A|) =  122.0000000000000000 .
";

    #[test]
    fn minimal_block() {
        let s = parse_spec("A(without commas)={oiab}\na+b=i\n").unwrap();
        assert_eq!(s.elements, vec!['o', 'i', 'a', 'b']);
        assert_eq!(s.constraints.len(), 1);
        assert_eq!(s.name, "block 1");
    }

    #[test]
    fn conflicting_constraints() {
        let err = parse_spec("A(without commas)={oiab}\na+b=i\nb+a=o\n").unwrap_err();
        assert_eq!(err, SpecError::ConflictingConstraint { line: 3, left: 'a', right: 'b' });
    }

    #[test]
    fn unknown_and_malformed() {
        assert_eq!(
            parse_spec("A(without commas)={oiab}\na+x=i\n").unwrap_err(),
            SpecError::UnknownElement { line: 2, element: 'x' }
        );
        assert_eq!(parse_spec("A(without commas)={oiab}\na+b=i b+o\n").unwrap_err(), SpecError::MalformedLine(2));
        assert_eq!(parse_spec("a+b=i\n").unwrap_err(), SpecError::MalformedLine(1));
        assert_eq!(parse_spec("|A|=3, A(without commas)={oiab}\n").unwrap_err(), SpecError::MalformedLine(1));
        assert_eq!(parse_spec("A(without commas)={oiab\n").unwrap_err(), SpecError::MalformedLine(1));
        assert_eq!(parse_spec("nothing here\n").unwrap_err(), SpecError::BlockCount(0));
        assert_eq!(parse_spec("A(without commas)={aa}\n").unwrap_err().line(), Some(1));
    }

    #[test]
    fn full_a0_block() {
        let s = parse_spec(A0_BLOCK).unwrap();
        assert_eq!(s.name, "A_0");
        assert_eq!(s.elements.len(), 8);
        assert_eq!(s.constraints.len(), 9);
        assert_eq!(s.comments.len(), 2);
        let r = s.reported.as_ref().unwrap();
        assert_eq!(r.sub_count, 122);
        assert_eq!(r.sigma.as_deref(), Some("122.0000000000000000"));
        assert_eq!(PartialGroupoid::from_spec(&s).unwrap().dom_len(), 9);
    }

    #[test]
    fn comments_after_semicolons_are_ignored() {
        let s = parse_spec(
            "|A|=9, A(without commas)={abcdefghi}. Constraints:\n\
             a+b=e a+d=h b+c=f c+d=g f+g=i\n \
             b+g=i ; since b+g=b+c+g=f+g=i\n\
             ; a whole comment line a+b=c\n",
        )
        .unwrap();
        assert_eq!(s.constraints.len(), 6);
    }

    #[test]
    fn dual_dialect_uses_at() {
        let s = parse_spec(
            "|A|=9, A(without commas)={oiabcdefg}. Constraints:\n\
             a@b=o a@c=o  a@d=o  a@f=o  a@g=o  b@c=o  b@d=o  c@d=o c@e=o\n\
             c@g=o  d@e=o  d@f=o   e@f=b  e@g=b   f@g=b\n",
        )
        .unwrap();
        assert!(s.constraints.iter().all(|c| c.op == OpSymbol::At));
        assert_eq!(PartialGroupoid::from_spec(&s).unwrap().dom_len(), 15);
    }

    #[test]
    fn empty_constraint_block() {
        let s = parse_spec("|A|=3, A(without commas)={xyz}. Constraints:\n").unwrap();
        assert!(s.constraints.is_empty());
        assert_eq!(PartialGroupoid::from_spec(&s).unwrap().dom_len(), 0);
    }

    #[test]
    fn render_round_trip() {
        let s = parse_spec(A0_BLOCK).unwrap();
        assert_eq!(parse_spec(&render_spec(&s)).unwrap(), s);
        let mut unnamed = s.clone();
        unnamed.reported = None;
        assert_eq!(parse_spec(&render_spec(&unnamed)).unwrap(), unnamed);
    }

    #[test]
    fn json_form() {
        let s = parse_spec(A0_BLOCK).unwrap();
        let json = s.to_json();
        assert!(json.contains("[\n      \"a\",\n      \"+\",\n      \"b\",\n      \"C\"\n    ]"));
        assert_eq!(StructureSpec::from_json(&json).unwrap(), s);
        let bad = r#"{"name":"x","elements":["a"],"constraints":[["a","+","b","a"]]}"#;
        assert_eq!(StructureSpec::from_json(bad).unwrap_err(), SpecError::UnknownElement { line: 0, element: 'b' });
        assert!(matches!(StructureSpec::from_json("{"), Err(SpecError::Json(_))));
    }
}

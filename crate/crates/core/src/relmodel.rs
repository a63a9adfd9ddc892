//! Relational model: constants, ground atoms and instances partitioned into
//! endogenous and exogenous tuples.
//!
//! Instances are read from and written to a small line-oriented text format:
//!
//! ```text
//! % comments run to the end of the line
//! @endogenous
//! Author(John, TKDE).
//! @exogenous
//! Journal(TKDE, XML, 30).
//! ```
//!
//! Facts listed before any section header are endogenous.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::syntax::{self, Cursor, TokenKind};

/// An element of the database domain, compared by its canonical text.
///
/// A bare integer token and a quoted string with the same spelling denote the
/// same constant.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constant(Arc<str>);

impl Constant {
    pub fn new(value: impl AsRef<str>) -> Self {
        Constant(Arc::from(value.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn is_bare(&self) -> bool {
        syntax::is_identifier(&self.0) || syntax::is_canonical_integer(&self.0)
    }

    /// Renders the constant for a program file, where identifiers starting
    /// with an uppercase letter would otherwise read as variables.
    pub fn fmt_in_program(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let upper = self.0.chars().next().is_some_and(|c| c.is_ascii_uppercase());
        if self.is_bare() && !upper {
            f.write_str(&self.0)
        } else {
            write_quoted(f, &self.0)
        }
    }
}

fn write_quoted(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            '\r' => f.write_str("\\r")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("\"")
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bare() {
            f.write_str(&self.0)
        } else {
            write_quoted(f, &self.0)
        }
    }
}

impl fmt::Debug for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for Constant {
    fn from(s: &str) -> Self {
        Constant::new(s)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate(Arc<str>);

impl Predicate {
    pub fn new(name: impl AsRef<str>) -> Self {
        Predicate(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Predicate {
    fn from(s: &str) -> Self {
        Predicate::new(s)
    }
}

/// A ground atom (a database tuple).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Predicate,
    pub args: Vec<Constant>,
}

impl Atom {
    pub fn new(predicate: impl Into<Predicate>, args: impl IntoIterator<Item = Constant>) -> Self {
        Atom {
            predicate: predicate.into(),
            args: args.into_iter().collect(),
        }
    }

    /// Shorthand for tests and fixtures: every argument becomes a constant.
    pub fn from_strs(predicate: &str, args: &[&str]) -> Self {
        Atom::new(predicate, args.iter().map(Constant::new))
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, arg) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{arg}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Atom {
    type Err = Error;

    /// Parses a single fact such as `Author(John,TODS)`; the trailing dot is optional.
    fn from_str(s: &str) -> Result<Self> {
        let mut cursor = Cursor::new(s)?;
        let atom = parse_fact(&mut cursor)?;
        cursor.eat(&TokenKind::Dot);
        if !cursor.is_done() {
            return Err(cursor.error_here("unexpected input after fact"));
        }
        Ok(atom)
    }
}

/// Parses a comma-separated list of constants, e.g. an answer tuple `John,XML`.
/// The empty string yields the empty tuple.
pub fn parse_constants(s: &str) -> Result<Vec<Constant>> {
    let mut cursor = Cursor::new(s)?;
    let mut out = Vec::new();
    if cursor.is_done() {
        return Ok(out);
    }
    loop {
        out.push(parse_constant(&mut cursor)?);
        if !cursor.eat(&TokenKind::Comma) {
            break;
        }
    }
    if !cursor.is_done() {
        return Err(cursor.error_here("expected `,` between constants"));
    }
    Ok(out)
}

fn parse_constant(cursor: &mut Cursor) -> Result<Constant> {
    match cursor.peek().map(|t| t.kind.clone()) {
        Some(TokenKind::Ident(s)) | Some(TokenKind::Integer(s)) | Some(TokenKind::Str(s)) => {
            cursor.next();
            Ok(Constant::new(s))
        }
        Some(other) => Err(cursor.error_here(format!("expected a constant, found {}", other.describe()))),
        None => Err(cursor.error_here("expected a constant, found end of input")),
    }
}

fn parse_fact(cursor: &mut Cursor) -> Result<Atom> {
    let predicate = match cursor.peek().map(|t| t.kind.clone()) {
        Some(TokenKind::Ident(name)) => {
            cursor.next();
            Predicate::new(name)
        }
        Some(other) => {
            return Err(cursor.error_here(format!("expected a predicate name, found {}", other.describe())))
        }
        None => return Err(cursor.error_here("expected a fact, found end of input")),
    };
    let mut args = Vec::new();
    if cursor.eat(&TokenKind::LParen) && !cursor.eat(&TokenKind::RParen) {
        loop {
            args.push(parse_constant(cursor)?);
            if cursor.eat(&TokenKind::Comma) {
                continue;
            }
            cursor.expect(&TokenKind::RParen)?;
            break;
        }
    }
    Ok(Atom { predicate, args })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Section {
    Endogenous,
    Exogenous,
}

/// A database instance `D = Dn ∪ Dx` with disjoint endogenous and exogenous parts.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Instance {
    endogenous: BTreeSet<Atom>,
    exogenous: BTreeSet<Atom>,
}

impl Instance {
    pub fn new(
        endogenous: impl IntoIterator<Item = Atom>,
        exogenous: impl IntoIterator<Item = Atom>,
    ) -> Result<Self> {
        let mut builder = InstanceBuilder::default();
        for atom in endogenous {
            builder.add(atom, Section::Endogenous)?;
        }
        for atom in exogenous {
            builder.add(atom, Section::Exogenous)?;
        }
        Ok(builder.build())
    }

    pub fn all_endogenous(atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        Instance::new(atoms, std::iter::empty())
    }

    pub fn builder() -> InstanceBuilder {
        InstanceBuilder::default()
    }

    pub fn endogenous(&self) -> &BTreeSet<Atom> {
        &self.endogenous
    }

    pub fn exogenous(&self) -> &BTreeSet<Atom> {
        &self.exogenous
    }

    /// All atoms of `D`, endogenous first, each part in canonical order.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> + Clone {
        self.endogenous.iter().chain(self.exogenous.iter())
    }

    pub fn atom_set(&self) -> BTreeSet<Atom> {
        self.atoms().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.endogenous.len() + self.exogenous.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.endogenous.contains(atom) || self.exogenous.contains(atom)
    }

    pub fn is_endogenous(&self, atom: &Atom) -> bool {
        self.endogenous.contains(atom)
    }

    pub fn section_of(&self, atom: &Atom) -> Option<Section> {
        if self.endogenous.contains(atom) {
            Some(Section::Endogenous)
        } else if self.exogenous.contains(atom) {
            Some(Section::Exogenous)
        } else {
            None
        }
    }

    /// The same atoms with every tuple endogenous.
    pub fn to_all_endogenous(&self) -> Instance {
        Instance {
            endogenous: self.atom_set(),
            exogenous: BTreeSet::new(),
        }
    }

    /// `D ∖ removed`, keeping each remaining atom in its section.
    pub fn without(&self, removed: &BTreeSet<Atom>) -> Instance {
        Instance {
            endogenous: self.endogenous.difference(removed).cloned().collect(),
            exogenous: self.exogenous.difference(removed).cloned().collect(),
        }
    }

    pub fn active_domain(&self) -> BTreeSet<Constant> {
        active_domain(self)
    }
}

/// All constants occurring in some atom of the instance.
pub fn active_domain(instance: &Instance) -> BTreeSet<Constant> {
    instance.atoms().flat_map(|a| a.args.iter().cloned()).collect()
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "@endogenous")?;
        for atom in &self.endogenous {
            writeln!(f, "{atom}.")?;
        }
        if !self.exogenous.is_empty() {
            writeln!(f, "@exogenous")?;
            for atom in &self.exogenous {
                writeln!(f, "{atom}.")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Instance")
            .field("endogenous", &self.endogenous)
            .field("exogenous", &self.exogenous)
            .finish()
    }
}

impl FromStr for Instance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_instance(s)
    }
}

/// Incremental construction with arity and partition checks.
#[derive(Debug, Clone, Default)]
pub struct InstanceBuilder {
    arities: BTreeMap<Predicate, usize>,
    endogenous: BTreeSet<Atom>,
    exogenous: BTreeSet<Atom>,
}

impl InstanceBuilder {
    pub fn add(&mut self, atom: Atom, section: Section) -> Result<&mut Self> {
        match self.arities.get(&atom.predicate) {
            Some(&expected) if expected != atom.arity() => {
                return Err(Error::ArityConflict {
                    predicate: atom.predicate.clone(),
                    expected,
                    found: atom.arity(),
                })
            }
            Some(_) => {}
            None => {
                self.arities.insert(atom.predicate.clone(), atom.arity());
            }
        }
        let (own, other) = match section {
            Section::Endogenous => (&mut self.endogenous, &self.exogenous),
            Section::Exogenous => (&mut self.exogenous, &self.endogenous),
        };
        if other.contains(&atom) {
            return Err(Error::PartitionViolation(atom));
        }
        own.insert(atom);
        Ok(self)
    }

    pub fn endogenous(&mut self, atom: Atom) -> Result<&mut Self> {
        self.add(atom, Section::Endogenous)
    }

    pub fn exogenous(&mut self, atom: Atom) -> Result<&mut Self> {
        self.add(atom, Section::Exogenous)
    }

    pub fn build(self) -> Instance {
        Instance {
            endogenous: self.endogenous,
            exogenous: self.exogenous,
        }
    }
}

/// Parses the instance text format.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut cursor = Cursor::new(text)?;
    let mut builder = InstanceBuilder::default();
    let mut section = Section::Endogenous;
    while let Some(token) = cursor.peek().cloned() {
        if let TokenKind::Directive(name) = &token.kind {
            let alone_before = cursor.previous().is_none_or(|p| p.line < token.line);
            let alone_after = cursor.peek_at(1).is_none_or(|n| n.line > token.line);
            if !alone_before || !alone_after {
                return Err(Error::syntax(
                    token.line,
                    token.column,
                    "section headers must stand on their own line",
                ));
            }
            section = match name.as_str() {
                "endogenous" => Section::Endogenous,
                "exogenous" => Section::Exogenous,
                other => {
                    return Err(Error::syntax(
                        token.line,
                        token.column,
                        format!("unknown section `@{other}`"),
                    ))
                }
            };
            cursor.next();
            continue;
        }
        let atom = parse_fact(&mut cursor)?;
        cursor.expect(&TokenKind::Dot)?;
        builder.add(atom, section)?;
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE_ONE: &str = "\
@endogenous
Author(Joe,TKDE).
Author(John,TKDE).
Author(Tom,TKDE).
Author(John,TODS).
Journal(TKDE,XML,30).
Journal(TKDE,CUBE,31).
Journal(TODS,XML,32).
";

    #[test]
    fn single_fact() {
        let inst = parse_instance("@endogenous\nAuthor(John,TODS).").unwrap();
        assert_eq!(inst.endogenous().len(), 1);
        assert!(inst.exogenous().is_empty());
        assert!(inst.is_endogenous(&Atom::from_strs("Author", &["John", "TODS"])));
    }

    #[test]
    fn example_one_tables() {
        let inst = parse_instance(EXAMPLE_ONE).unwrap();
        assert_eq!(inst.endogenous().len(), 7);
        assert_eq!(inst.exogenous().len(), 0);
    }

    #[test]
    fn duplicate_across_sections_is_rejected() {
        let err = parse_instance("R(a,b).\n@exogenous\nR(a,b).").unwrap_err();
        assert_eq!(err, Error::PartitionViolation(Atom::from_strs("R", &["a", "b"])));
    }

    #[test]
    fn facts_default_to_endogenous() {
        let inst = parse_instance("R(a).\n@exogenous\nS(b).\n@endogenous\nT(c).").unwrap();
        assert_eq!(inst.endogenous().len(), 2);
        assert_eq!(inst.exogenous().len(), 1);
    }

    #[test]
    fn arity_conflict() {
        let err = parse_instance("R(a).\nR(a,b).").unwrap_err();
        assert!(matches!(err, Error::ArityConflict { expected: 1, found: 2, .. }));
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_instance("R(a).\nR(b c).").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, column: 5, .. }), "{err:?}");
        let err = parse_instance("R(a)").unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }));
    }

    #[test]
    fn header_must_be_alone() {
        assert!(parse_instance("R(a). @exogenous\nS(b).").is_err());
        assert!(parse_instance("@bogus\nS(b).").is_err());
    }

    #[test]
    fn active_domain_examples() {
        let inst = parse_instance(EXAMPLE_ONE).unwrap();
        let expected: BTreeSet<Constant> = [
            "John", "Joe", "Tom", "TODS", "TKDE", "XML", "CUBE", "30", "31", "32",
        ]
        .into_iter()
        .map(Constant::new)
        .collect();
        assert_eq!(active_domain(&inst), expected);
        assert!(active_domain(&Instance::default()).is_empty());
        let inst = parse_instance("R(a,a).").unwrap();
        assert_eq!(active_domain(&inst), [Constant::new("a")].into_iter().collect());
    }

    #[test]
    fn quoted_and_bare_integers_coincide() {
        let inst = parse_instance("R(30).\nR(\"30\").\nR(030).").unwrap();
        assert_eq!(inst.len(), 1);
    }

    #[test]
    fn printing_quotes_when_needed() {
        let inst = parse_instance("R(\"hello world\", \"007\", x_1, 12).").unwrap();
        let text = inst.to_string();
        assert!(text.contains("R(\"007\",\"hello world\",x_1,12)") || text.contains("\"hello world\""));
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn atom_from_str() {
        let atom: Atom = "Author(John,TODS)".parse().unwrap();
        assert_eq!(atom, Atom::from_strs("Author", &["John", "TODS"]));
        let atom: Atom = "ans.".parse().unwrap();
        assert_eq!(atom.arity(), 0);
        assert!("R(a) junk".parse::<Atom>().is_err());
    }

    #[test]
    fn constants_list() {
        assert_eq!(
            parse_constants("John,XML").unwrap(),
            vec![Constant::new("John"), Constant::new("XML")]
        );
        assert!(parse_constants("").unwrap().is_empty());
        assert!(parse_constants("a b").is_err());
    }
}

//! Program text format: `Head :- B1, ..., Bm.` one rule at a time, `%` comments.
//! Terms starting with an uppercase letter are variables; identifiers, integers
//! and quoted strings are constants.

use crate::error::{Error, Result};
use crate::relmodel::{Constant, Predicate};
use crate::syntax::{Cursor, TokenKind};

use super::{Literal, Program, Rule, Term, Variable};

fn parse_term(cursor: &mut Cursor) -> Result<Term> {
    match cursor.peek().map(|t| t.kind.clone()) {
        Some(TokenKind::Ident(name)) => {
            cursor.next();
            if name.starts_with(|c: char| c.is_ascii_uppercase()) {
                Ok(Term::Var(Variable::new(name)))
            } else {
                Ok(Term::Const(Constant::new(name)))
            }
        }
        Some(TokenKind::Integer(s)) | Some(TokenKind::Str(s)) => {
            cursor.next();
            Ok(Term::Const(Constant::new(s)))
        }
        Some(other) => Err(cursor.error_here(format!("expected a term, found {}", other.describe()))),
        None => Err(cursor.error_here("expected a term, found end of input")),
    }
}

fn parse_literal(cursor: &mut Cursor) -> Result<Literal> {
    let predicate = match cursor.peek().map(|t| t.kind.clone()) {
        Some(TokenKind::Ident(name)) => {
            cursor.next();
            Predicate::new(name)
        }
        Some(other) => {
            return Err(cursor.error_here(format!("expected a predicate, found {}", other.describe())))
        }
        None => return Err(cursor.error_here("expected a predicate, found end of input")),
    };
    let mut terms = Vec::new();
    if cursor.eat(&TokenKind::LParen) && !cursor.eat(&TokenKind::RParen) {
        loop {
            terms.push(parse_term(cursor)?);
            if cursor.eat(&TokenKind::Comma) {
                continue;
            }
            cursor.expect(&TokenKind::RParen)?;
            break;
        }
    }
    Ok(Literal { predicate, terms })
}

/// Parses rules without choosing an answer predicate.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>> {
    let mut cursor = Cursor::new(text)?;
    let mut rules = Vec::new();
    while !cursor.is_done() {
        if let Some(TokenKind::Directive(d)) = cursor.peek().map(|t| t.kind.clone()) {
            return Err(cursor.error_here(format!("unexpected directive `@{d}` in a program")));
        }
        let head = parse_literal(&mut cursor)?;
        if cursor.peek().is_some_and(|t| t.kind == TokenKind::Dot) {
            return Err(cursor.error_here("facts are not allowed in programs; put them in an instance file"));
        }
        cursor.expect(&TokenKind::Implies)?;
        let mut body = vec![parse_literal(&mut cursor)?];
        while cursor.eat(&TokenKind::Comma) {
            body.push(parse_literal(&mut cursor)?);
        }
        cursor.expect(&TokenKind::Dot)?;
        rules.push(Rule::new(head, body)?);
    }
    Ok(rules)
}

/// Parses a program whose answer predicate is `Ans` when some rule defines it,
/// and `ans` otherwise.
pub fn parse_program(text: &str) -> Result<Program> {
    let rules = parse_rules(text)?;
    let defines = |name: &str| rules.iter().any(|r| r.head().predicate.name() == name);
    let answer = if defines("Ans") {
        "Ans"
    } else if defines("ans") {
        "ans"
    } else {
        return Err(Error::NoAnswerRule);
    };
    Program::new(rules, answer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunctive_query() {
        let p = parse_program("Ans(N,T) :- Author(N,J), Journal(J,T,P).").unwrap();
        assert_eq!(p.rules().len(), 1);
        assert_eq!(p.answer_predicate().name(), "Ans");
        assert_eq!(p.answer_arity(), 2);
        assert_eq!(p.rules()[0].body().len(), 2);
    }

    #[test]
    fn boolean_program() {
        let p = parse_program("ans :- R(X,Y), S(Y).").unwrap();
        assert!(p.is_boolean());
        assert_eq!(p.answer_predicate().name(), "ans");
    }

    #[test]
    fn unsafe_rule() {
        let err = parse_program("Ans(X) :- R(Y).").unwrap_err();
        assert!(matches!(err, Error::UnsafeRule { ref variable, .. } if variable == "X"));
    }

    #[test]
    fn missing_answer_rule() {
        assert_eq!(parse_program("T(X) :- R(X).").unwrap_err(), Error::NoAnswerRule);
    }

    #[test]
    fn facts_rejected() {
        assert!(matches!(parse_program("R(a)."), Err(Error::Syntax { .. })));
    }

    #[test]
    fn duplicates_are_dropped() {
        let p = parse_program("ans :- R(X).\nans :- R(X).\n% comment\nans :- S(a).").unwrap();
        assert_eq!(p.rules().len(), 2);
    }

    #[test]
    fn display_round_trips() {
        let text = "T(X,Y) :- E(X,\"Bob\"), F(Y, 3, c).\nAns(X) :- T(X,X).\n";
        let p = parse_program(text).unwrap();
        let printed = p.to_string();
        assert_eq!(parse_program(&printed).unwrap(), p);
    }

    #[test]
    fn arity_conflict_in_program() {
        assert!(matches!(
            parse_program("ans :- R(X), R(X,Y)."),
            Err(Error::ArityConflict { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_program("ans :- R(X)\nans :- S(X).").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, column: 1, .. }), "{err:?}");
    }
}

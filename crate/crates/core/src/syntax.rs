//! Formulas in negation normal form, the surface language with full negation
//! and implication, a parser for the ASCII grammar, and the syntactic
//! measures (polarized variables, agents, modal depth) used elsewhere.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An agent name. Agents are compared by name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Agent(pub String);

impl Agent {
    pub fn new(name: impl Into<String>) -> Self {
        Agent(name.into())
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A propositional atom, compared by name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Atom(pub String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Self {
        Atom(name.into())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Polarity of a variable occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
        }
    }
}

/// A formula in negation normal form: negation occurs only on atoms.
///
/// The derived ordering is total and used wherever a deterministic formula
/// order is needed (sequent components are `BTreeSet<Formula>`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Bottom,
    Top,
    Lit { atom: Atom, positive: bool },
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Box(Agent, Box<Formula>),
    Dia(Agent, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Lit {
            atom: Atom::new(name),
            positive: true,
        }
    }

    pub fn natom(name: impl Into<String>) -> Self {
        Formula::Lit {
            atom: Atom::new(name),
            positive: false,
        }
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn boxed(a: impl Into<String>, f: Formula) -> Self {
        Formula::Box(Agent::new(a), Box::new(f))
    }

    pub fn dia(a: impl Into<String>, f: Formula) -> Self {
        Formula::Dia(Agent::new(a), Box::new(f))
    }

    /// NNF implication `f -> g`, i.e. `negate(f) | g`.
    pub fn implies(f: Formula, g: Formula) -> Self {
        Formula::or(negate(&f), g)
    }

    /// True iff a `Lit` node occurs anywhere in the formula.
    pub fn contains_literal(&self) -> bool {
        match self {
            Formula::Bottom | Formula::Top => false,
            Formula::Lit { .. } => true,
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.contains_literal() || r.contains_literal()
            }
            Formula::Box(_, b) | Formula::Dia(_, b) => b.contains_literal(),
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Bottom | Formula::Top | Formula::Lit { .. } => 1,
            Formula::And(l, r) | Formula::Or(l, r) => 1 + l.size() + r.size(),
            Formula::Box(_, b) | Formula::Dia(_, b) => 1 + b.size(),
        }
    }

    /// All distinct subformulas, including the formula itself.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        fn walk(f: &Formula, out: &mut BTreeSet<Formula>) {
            if !out.insert(f.clone()) {
                return;
            }
            match f {
                Formula::Bottom | Formula::Top | Formula::Lit { .. } => {}
                Formula::And(l, r) | Formula::Or(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                Formula::Box(_, b) | Formula::Dia(_, b) => walk(b, out),
            }
        }
        walk(self, &mut out);
        out
    }
}

/// NNF negation: dualize connectives and modalities, flip literals.
/// An involution: `negate(negate(f)) == f`.
pub fn negate(f: &Formula) -> Formula {
    match f {
        Formula::Bottom => Formula::Top,
        Formula::Top => Formula::Bottom,
        Formula::Lit { atom, positive } => Formula::Lit {
            atom: atom.clone(),
            positive: !positive,
        },
        Formula::And(l, r) => Formula::or(negate(l), negate(r)),
        Formula::Or(l, r) => Formula::and(negate(l), negate(r)),
        Formula::Box(a, b) => Formula::Dia(a.clone(), Box::new(negate(b))),
        Formula::Dia(a, b) => Formula::Box(a.clone(), Box::new(negate(b))),
    }
}

/// Variables occurring with the given polarity.
pub fn vars(f: &Formula, polarity: Polarity) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    fn walk(f: &Formula, polarity: Polarity, out: &mut BTreeSet<Atom>) {
        match f {
            Formula::Bottom | Formula::Top => {}
            Formula::Lit { atom, positive } => {
                let occurs_pos = *positive;
                let wanted = matches!(polarity, Polarity::Pos);
                if occurs_pos == wanted {
                    out.insert(atom.clone());
                }
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                walk(l, polarity, out);
                walk(r, polarity, out);
            }
            Formula::Box(_, b) | Formula::Dia(_, b) => walk(b, polarity, out),
        }
    }
    walk(f, polarity, &mut out);
    out
}

/// All variables of the formula, regardless of polarity.
pub fn all_vars(f: &Formula) -> BTreeSet<Atom> {
    let mut v = vars(f, Polarity::Pos);
    v.extend(vars(f, Polarity::Neg));
    v
}

/// Agents indexing any modality of the formula.
pub fn agents(f: &Formula) -> BTreeSet<Agent> {
    let mut out = BTreeSet::new();
    fn walk(f: &Formula, out: &mut BTreeSet<Agent>) {
        match f {
            Formula::Bottom | Formula::Top | Formula::Lit { .. } => {}
            Formula::And(l, r) | Formula::Or(l, r) => {
                walk(l, out);
                walk(r, out);
            }
            Formula::Box(a, b) | Formula::Dia(a, b) => {
                out.insert(a.clone());
                walk(b, out);
            }
        }
    }
    walk(f, &mut out);
    out
}

/// Modal depth: maximal nesting of modalities.
pub fn modal_depth(f: &Formula) -> usize {
    match f {
        Formula::Bottom | Formula::Top | Formula::Lit { .. } => 0,
        Formula::And(l, r) | Formula::Or(l, r) => modal_depth(l).max(modal_depth(r)),
        Formula::Box(_, b) | Formula::Dia(_, b) => modal_depth(b) + 1,
    }
}

/// Constant simplification. Rewrites to a fixed point of the unit laws for
/// conjunction and disjunction together with the S5 equivalences collapsing
/// modalities over constants. The result contains no constant under a
/// modality and no constant as a proper subformula of a connective.
pub fn simplify_constants(f: &Formula) -> Formula {
    match f {
        Formula::Bottom | Formula::Top | Formula::Lit { .. } => f.clone(),
        Formula::And(l, r) => {
            let l = simplify_constants(l);
            let r = simplify_constants(r);
            match (&l, &r) {
                (Formula::Bottom, _) | (_, Formula::Bottom) => Formula::Bottom,
                (Formula::Top, _) => r,
                (_, Formula::Top) => l,
                _ => Formula::and(l, r),
            }
        }
        Formula::Or(l, r) => {
            let l = simplify_constants(l);
            let r = simplify_constants(r);
            match (&l, &r) {
                (Formula::Top, _) | (_, Formula::Top) => Formula::Top,
                (Formula::Bottom, _) => r,
                (_, Formula::Bottom) => l,
                _ => Formula::or(l, r),
            }
        }
        Formula::Box(a, b) => match simplify_constants(b) {
            Formula::Top => Formula::Top,
            Formula::Bottom => Formula::Bottom,
            b => Formula::Box(a.clone(), Box::new(b)),
        },
        Formula::Dia(a, b) => match simplify_constants(b) {
            Formula::Top => Formula::Top,
            Formula::Bottom => Formula::Bottom,
            b => Formula::Dia(a.clone(), Box::new(b)),
        },
    }
}

// Printing precedence levels: `|` = 1, `&` = 2, unary and atoms = 3.
fn fmt_prec(f: &Formula, prec: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let level = match f {
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        _ => 3,
    };
    if level < prec {
        write!(out, "(")?;
    }
    match f {
        Formula::Bottom => write!(out, "false")?,
        Formula::Top => write!(out, "true")?,
        Formula::Lit { atom, positive } => {
            if !positive {
                write!(out, "~")?;
            }
            write!(out, "{atom}")?;
        }
        Formula::Or(l, r) => {
            fmt_prec(l, 1, out)?;
            write!(out, " | ")?;
            fmt_prec(r, 2, out)?;
        }
        Formula::And(l, r) => {
            fmt_prec(l, 2, out)?;
            write!(out, " & ")?;
            fmt_prec(r, 3, out)?;
        }
        Formula::Box(a, b) => {
            write!(out, "[{a}]")?;
            fmt_prec(b, 3, out)?;
        }
        Formula::Dia(a, b) => {
            write!(out, "<{a}>")?;
            fmt_prec(b, 3, out)?;
        }
    }
    if level < prec {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    /// Emits the same ASCII grammar the parser accepts; parenthesized only
    /// where precedence demands, so `to_nnf(parse(f.to_string())) == f`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 1, f)
    }
}

/// Full-language parse tree: negation on arbitrary subformulas, implication
/// as a connective. Produced only by the parser; converted to [`Formula`]
/// before any other module sees it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceFormula {
    Bottom,
    Top,
    Atom(Atom),
    Not(Box<SurfaceFormula>),
    And(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Or(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Implies(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Box(Agent, Box<SurfaceFormula>),
    Dia(Agent, Box<SurfaceFormula>),
}

/// Conversion to negation normal form. Implication is rewritten to
/// `~f | g`, negation pushed to atoms by the De Morgan dualities.
pub fn to_nnf(sf: &SurfaceFormula) -> Formula {
    fn go(sf: &SurfaceFormula, positive: bool) -> Formula {
        match sf {
            SurfaceFormula::Bottom => {
                if positive {
                    Formula::Bottom
                } else {
                    Formula::Top
                }
            }
            SurfaceFormula::Top => {
                if positive {
                    Formula::Top
                } else {
                    Formula::Bottom
                }
            }
            SurfaceFormula::Atom(a) => Formula::Lit {
                atom: a.clone(),
                positive,
            },
            SurfaceFormula::Not(b) => go(b, !positive),
            SurfaceFormula::And(l, r) => {
                if positive {
                    Formula::and(go(l, true), go(r, true))
                } else {
                    Formula::or(go(l, false), go(r, false))
                }
            }
            SurfaceFormula::Or(l, r) => {
                if positive {
                    Formula::or(go(l, true), go(r, true))
                } else {
                    Formula::and(go(l, false), go(r, false))
                }
            }
            SurfaceFormula::Implies(l, r) => {
                // f -> g  :=  ~f | g
                if positive {
                    Formula::or(go(l, false), go(r, true))
                } else {
                    Formula::and(go(l, true), go(r, false))
                }
            }
            SurfaceFormula::Box(a, b) => {
                if positive {
                    Formula::Box(a.clone(), Box::new(go(b, true)))
                } else {
                    Formula::Dia(a.clone(), Box::new(go(b, false)))
                }
            }
            SurfaceFormula::Dia(a, b) => {
                if positive {
                    Formula::Dia(a.clone(), Box::new(go(b, true)))
                } else {
                    Formula::Box(a.clone(), Box::new(go(b, false)))
                }
            }
        }
    }
    go(sf, true)
}

/// Parse error with source position (1-based line and column).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    True,
    False,
    Not,
    AndOp,
    OrOp,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Less,
    Greater,
    Eof,
}

#[derive(Debug, Clone)]
struct SpannedToken {
    token: Token,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<SpannedToken>, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut advance = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            advance(&mut chars);
            continue;
        }
        let token = match c {
            '~' => {
                advance(&mut chars);
                Token::Not
            }
            '&' => {
                advance(&mut chars);
                Token::AndOp
            }
            '|' => {
                advance(&mut chars);
                Token::OrOp
            }
            '(' => {
                advance(&mut chars);
                Token::LParen
            }
            ')' => {
                advance(&mut chars);
                Token::RParen
            }
            '[' => {
                advance(&mut chars);
                Token::LBracket
            }
            ']' => {
                advance(&mut chars);
                Token::RBracket
            }
            '<' => {
                advance(&mut chars);
                Token::Less
            }
            '>' => {
                advance(&mut chars);
                Token::Greater
            }
            '-' => {
                advance(&mut chars);
                match chars.peek() {
                    Some('>') => {
                        advance(&mut chars);
                        Token::Arrow
                    }
                    _ => {
                        return Err(ParseError {
                            line: tline,
                            col: tcol,
                            message: "unknown token `-` (expected `->`)".into(),
                        })
                    }
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(advance(&mut chars));
                    } else {
                        break;
                    }
                }
                match name.as_str() {
                    "true" => Token::True,
                    "false" => Token::False,
                    _ => Token::Ident(name),
                }
            }
            c => {
                return Err(ParseError {
                    line: tline,
                    col: tcol,
                    message: format!("unknown token `{c}`"),
                })
            }
        };
        tokens.push(SpannedToken {
            token,
            line: tline,
            col: tcol,
        });
    }
    tokens.push(SpannedToken {
        token: Token::Eof,
        line,
        col,
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<SpannedToken>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &SpannedToken {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> SpannedToken {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    // implies := or ("->" implies)?   (right-associative)
    fn implies(&mut self) -> Result<SurfaceFormula, ParseError> {
        let left = self.or()?;
        if self.peek().token == Token::Arrow {
            self.bump();
            let right = self.implies()?;
            Ok(SurfaceFormula::Implies(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    // or := and ("|" and)*   (left-associative)
    fn or(&mut self) -> Result<SurfaceFormula, ParseError> {
        let mut f = self.and()?;
        while self.peek().token == Token::OrOp {
            self.bump();
            let r = self.and()?;
            f = SurfaceFormula::Or(Box::new(f), Box::new(r));
        }
        Ok(f)
    }

    // and := unary ("&" unary)*   (left-associative)
    fn and(&mut self) -> Result<SurfaceFormula, ParseError> {
        let mut f = self.unary()?;
        while self.peek().token == Token::AndOp {
            self.bump();
            let r = self.unary()?;
            f = SurfaceFormula::And(Box::new(f), Box::new(r));
        }
        Ok(f)
    }

    fn agent_name(&mut self) -> Result<Agent, ParseError> {
        match self.peek().token.clone() {
            Token::Ident(name) => {
                self.bump();
                Ok(Agent(name))
            }
            _ => Err(self.error("expected agent name")),
        }
    }

    fn unary(&mut self) -> Result<SurfaceFormula, ParseError> {
        match self.peek().token.clone() {
            Token::Not => {
                self.bump();
                Ok(SurfaceFormula::Not(Box::new(self.unary()?)))
            }
            Token::LBracket => {
                self.bump();
                let agent = self.agent_name()?;
                if self.peek().token != Token::RBracket {
                    return Err(self.error("expected `]`"));
                }
                self.bump();
                Ok(SurfaceFormula::Box(agent, Box::new(self.unary()?)))
            }
            Token::Less => {
                self.bump();
                let agent = self.agent_name()?;
                if self.peek().token != Token::Greater {
                    return Err(self.error("expected `>`"));
                }
                self.bump();
                Ok(SurfaceFormula::Dia(agent, Box::new(self.unary()?)))
            }
            Token::True => {
                self.bump();
                Ok(SurfaceFormula::Top)
            }
            Token::False => {
                self.bump();
                Ok(SurfaceFormula::Bottom)
            }
            Token::Ident(name) => {
                self.bump();
                Ok(SurfaceFormula::Atom(Atom(name)))
            }
            Token::LParen => {
                self.bump();
                let f = self.implies()?;
                if self.peek().token != Token::RParen {
                    return Err(self.error("expected `)`"));
                }
                self.bump();
                Ok(f)
            }
            Token::Eof => Err(self.error("unexpected end of input")),
            _ => Err(self.error("expected formula")),
        }
    }
}

/// Parse a formula in the ASCII grammar: `true`, `false`, identifiers,
/// `~F`, `F & F`, `F | F`, `F -> F`, `[agent]F`, `<agent>F`, parentheses.
pub fn parse(text: &str) -> Result<SurfaceFormula, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let f = parser.implies()?;
    if parser.peek().token != Token::Eof {
        return Err(parser.error("trailing input after formula"));
    }
    Ok(f)
}

/// Parse and normalize in one step.
pub fn parse_nnf(text: &str) -> Result<Formula, ParseError> {
    Ok(to_nnf(&parse(text)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn parse_respects_precedence() {
        let f = parse("[a]p -> p").unwrap();
        assert_eq!(
            f,
            SurfaceFormula::Implies(
                Box::new(SurfaceFormula::Box(
                    Agent::new("a"),
                    Box::new(SurfaceFormula::Atom(Atom::new("p")))
                )),
                Box::new(SurfaceFormula::Atom(Atom::new("p")))
            )
        );

        let f = parse("<a>~p").unwrap();
        assert_eq!(
            f,
            SurfaceFormula::Dia(
                Agent::new("a"),
                Box::new(SurfaceFormula::Not(Box::new(SurfaceFormula::Atom(
                    Atom::new("p")
                ))))
            )
        );

        // & binds tighter than |
        assert_eq!(parse_nnf("p & q | r").unwrap(), {
            Formula::or(Formula::and(p(), q()), Formula::atom("r"))
        });
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse("p &\n  ?q").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
        assert!(err.message.contains("unknown token"));

        assert!(parse("p - q").is_err());
        assert!(parse("p q").is_err());
        assert!(parse("(p").is_err());
    }

    #[test]
    fn nnf_pushes_negation_to_atoms() {
        assert_eq!(parse_nnf("~[a]p").unwrap(), Formula::dia("a", Formula::natom("p")));
        assert_eq!(parse_nnf("~~p").unwrap(), p());
        assert_eq!(
            parse_nnf("~(p & true)").unwrap(),
            Formula::or(Formula::natom("p"), Formula::Bottom)
        );
    }

    #[test]
    fn negate_examples() {
        assert_eq!(
            negate(&Formula::boxed("a", p())),
            Formula::dia("a", Formula::natom("p"))
        );
        assert_eq!(negate(&Formula::Bottom), Formula::Top);
        assert_eq!(
            negate(&Formula::or(p(), Formula::natom("q"))),
            Formula::and(Formula::natom("p"), q())
        );
    }

    #[test]
    fn polarized_vars() {
        let f = Formula::and(p(), Formula::natom("p"));
        assert_eq!(vars(&f, Polarity::Pos), [Atom::new("p")].into());
        assert_eq!(vars(&f, Polarity::Neg), [Atom::new("p")].into());

        let f = Formula::boxed("a", Formula::natom("q"));
        assert!(vars(&f, Polarity::Pos).is_empty());
        assert_eq!(vars(&f, Polarity::Neg), [Atom::new("q")].into());

        assert!(vars(&Formula::Top, Polarity::Pos).is_empty());
    }

    #[test]
    fn agents_and_depth() {
        let f = Formula::boxed("a", Formula::dia("b", p()));
        assert_eq!(agents(&f), [Agent::new("a"), Agent::new("b")].into());
        assert_eq!(modal_depth(&f), 2);

        assert!(agents(&Formula::or(p(), Formula::natom("q"))).is_empty());
        assert_eq!(
            agents(&Formula::dia("a", Formula::and(p(), Formula::boxed("a", q())))),
            [Agent::new("a")].into()
        );

        assert_eq!(modal_depth(&p()), 0);
        assert_eq!(modal_depth(&Formula::and(p(), Formula::boxed("a", q()))), 1);
    }

    #[test]
    fn simplify_constants_examples() {
        assert_eq!(simplify_constants(&Formula::boxed("a", Formula::Top)), Formula::Top);
        assert_eq!(
            simplify_constants(&Formula::and(Formula::or(p(), Formula::Bottom), Formula::Top)),
            p()
        );
        assert_eq!(
            simplify_constants(&Formula::dia("a", Formula::or(Formula::Bottom, Formula::Bottom))),
            Formula::Bottom
        );
    }

    fn no_stray_constants(f: &Formula) -> bool {
        fn proper(f: &Formula) -> bool {
            // within a compound context, constants must not appear
            match f {
                Formula::Bottom | Formula::Top => false,
                _ => go(f),
            }
        }
        fn go(f: &Formula) -> bool {
            match f {
                Formula::Bottom | Formula::Top | Formula::Lit { .. } => true,
                Formula::And(l, r) | Formula::Or(l, r) => proper(l) && proper(r),
                Formula::Box(_, b) | Formula::Dia(_, b) => proper(b),
            }
        }
        go(f)
    }

    pub(crate) fn arb_formula(atoms: &'static [&'static str], agents: &'static [&'static str]) -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::Bottom),
            Just(Formula::Top),
            proptest::sample::select(atoms).prop_map(Formula::atom),
            proptest::sample::select(atoms).prop_map(Formula::natom),
        ];
        leaf.prop_recursive(4, 24, 2, move |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
                (proptest::sample::select(agents), inner.clone())
                    .prop_map(|(a, b)| Formula::boxed(a, b)),
                (proptest::sample::select(agents), inner)
                    .prop_map(|(a, b)| Formula::dia(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn negate_is_involution(f in arb_formula(&["p", "q"], &["a", "b"])) {
            prop_assert_eq!(negate(&negate(&f)), f);
        }

        #[test]
        fn negate_swaps_polarities(f in arb_formula(&["p", "q"], &["a", "b"])) {
            let n = negate(&f);
            prop_assert_eq!(vars(&n, Polarity::Pos), vars(&f, Polarity::Neg));
            prop_assert_eq!(vars(&n, Polarity::Neg), vars(&f, Polarity::Pos));
            prop_assert_eq!(agents(&n), agents(&f));
            prop_assert_eq!(modal_depth(&n), modal_depth(&f));
        }

        #[test]
        fn print_parse_round_trip(f in arb_formula(&["p", "q", "r_1"], &["a", "b"])) {
            let text = f.to_string();
            let back = parse_nnf(&text).unwrap();
            prop_assert_eq!(back, f);
        }

        #[test]
        fn simplified_has_no_stray_constants(f in arb_formula(&["p"], &["a"])) {
            let s = simplify_constants(&f);
            prop_assert!(no_stray_constants(&s));
            prop_assert!(vars(&s, Polarity::Pos).is_subset(&vars(&f, Polarity::Pos)));
            prop_assert!(vars(&s, Polarity::Neg).is_subset(&vars(&f, Polarity::Neg)));
            prop_assert!(agents(&s).is_subset(&agents(&f)));
        }
    }
}

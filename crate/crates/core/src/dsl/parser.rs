//! Recursive-descent parser for `.sns` files.
//!
//! Parsing happens in three passes: syntax (tokens to a spanned tree, with
//! item-level error recovery), lowering (name resolution into a [`Cao`]) and
//! validation, whose violations are reported at the span of the offending
//! text.

use std::collections::{BTreeMap, HashMap};

use super::lexer::{lex, Token, TokenKind};
use super::{Diagnostic, Diagnostics, SourceSpan};
use crate::model::{
    validate_cao, Cao, CarryKind, Change, Image, Location, Mode, Operand, Operator, Override, ScheduleError, Violation,
    ViolationKind,
};
use crate::rational::{Rational, RationalError};

/// A successfully parsed document and any warnings it produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub cao: Cao,
    pub warnings: Vec<Diagnostic>,
}

pub fn parse(text: &str) -> Result<Cao, Diagnostics> {
    parse_with_warnings(text).map(|p| p.cao)
}

pub fn parse_with_warnings(text: &str) -> Result<Parsed, Diagnostics> {
    let (tokens, mut diags) = lex(text);
    let mut parser = Parser { tokens: &tokens, pos: 0, diags: Vec::new() };
    let document = parser.document();
    diags.append(&mut parser.diags);

    let finish = |mut diags: Vec<Diagnostic>| {
        diags.sort_by_key(|d| d.span);
        diags
    };

    let document = match document {
        Some(doc) if !diags.iter().any(Diagnostic::is_error) => doc,
        _ => return Err(Diagnostics(finish(diags))),
    };

    let (cao, spans) = lower(document, &mut diags);
    if !diags.iter().any(Diagnostic::is_error) {
        for violation in validate_cao(&cao).violations {
            let span = spans.locate(&violation);
            diags.push(Diagnostic::error(violation.kind.to_string(), span));
        }
    }

    let diags = finish(diags);
    if diags.iter().any(Diagnostic::is_error) {
        Err(Diagnostics(diags))
    } else {
        Ok(Parsed { cao, warnings: diags })
    }
}

#[derive(Debug, Clone)]
struct Spanned<T> {
    value: T,
    span: SourceSpan,
}

struct Document {
    name: String,
    mode: Mode,
    kind: CarryKind,
    items: Vec<Item>,
}

enum Item {
    Entity {
        names: Vec<Spanned<String>>,
        value: Spanned<Rational>,
    },
    Operator {
        keyword: SourceSpan,
        kind: Option<CarryKind>,
        operands: Vec<(Spanned<String>, Spanned<Rational>)>,
        images: Vec<(Spanned<String>, Spanned<Rational>)>,
    },
    Schedule {
        step: Spanned<u64>,
        overrides: Vec<OverrideItem>,
    },
}

struct OverrideItem {
    operator: Spanned<usize>,
    change: ChangeItem,
}

enum ChangeItem {
    Radix(Spanned<String>, Spanned<Rational>),
    Coeff(Spanned<String>, Spanned<Rational>),
    Enabled(Spanned<bool>),
}

type PResult<T> = Result<T, ()>;

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> &'t Token {
        let token = &self.tokens[self.pos];
        if token.kind != TokenKind::Eof {
            self.pos += 1;
        }
        token
    }

    fn found(token: &Token) -> String {
        match token.kind {
            TokenKind::Ident => format!("`{}`", token.text),
            TokenKind::Number => format!("`{}`", token.text),
            TokenKind::Str => "string".to_string(),
            other => other.describe().to_string(),
        }
    }

    fn fail<T>(&mut self, expected: &str) -> PResult<T> {
        let token = self.peek();
        self.diags.push(
            Diagnostic::error(format!("expected {expected}, found {}", Self::found(token)), token.span)
                .expecting(expected),
        );
        Err(())
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<&'t Token> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            self.fail(kind.describe())
        }
    }

    fn at_keyword(&self, keyword: &str) -> bool {
        let token = self.peek();
        token.kind == TokenKind::Ident && token.text == keyword
    }

    fn expect_keyword(&mut self, keyword: &str) -> PResult<SourceSpan> {
        if self.at_keyword(keyword) {
            Ok(self.advance().span)
        } else {
            self.fail(&format!("`{keyword}`"))
        }
    }

    fn one_of<T: Copy>(&mut self, choices: &[(&str, T)]) -> PResult<Spanned<T>> {
        let token = self.peek();
        if token.kind == TokenKind::Ident {
            if let Some((_, value)) = choices.iter().find(|(k, _)| *k == token.text) {
                self.advance();
                return Ok(Spanned { value: *value, span: token.span });
            }
        }
        let expected: Vec<String> = choices.iter().map(|(k, _)| format!("`{k}`")).collect();
        self.fail(&expected.join(" or "))
    }

    fn name(&mut self) -> PResult<Spanned<String>> {
        let token = self.expect(TokenKind::Ident)?;
        Ok(Spanned { value: token.text.clone(), span: token.span })
    }

    fn rational(&mut self) -> PResult<Spanned<Rational>> {
        let token = self.expect(TokenKind::Number)?;
        match token.text.parse::<Rational>() {
            Ok(value) => Ok(Spanned { value, span: token.span }),
            Err(RationalError::ZeroDenominator) => {
                self.diags.push(Diagnostic::error("zero denominator", token.span));
                Err(())
            }
            Err(e) => {
                self.diags.push(Diagnostic::error(e.to_string(), token.span));
                Err(())
            }
        }
    }

    fn integer<T: std::str::FromStr>(&mut self) -> PResult<Spanned<T>> {
        let token = self.peek();
        if token.kind != TokenKind::Number || !token.text.bytes().all(|b| b.is_ascii_digit()) {
            return self.fail("non-negative integer");
        }
        self.advance();
        match token.text.parse::<T>() {
            Ok(value) => Ok(Spanned { value, span: token.span }),
            Err(_) => {
                self.diags.push(Diagnostic::error("integer out of range", token.span));
                Err(())
            }
        }
    }

    /// Skips to the end of the current item: past the next top-level `;`,
    /// over any balanced `{ ... }` block, or up to an unmatched `}`.
    fn recover(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek().kind {
                TokenKind::Eof => return,
                TokenKind::Semi if depth == 0 => {
                    self.advance();
                    return;
                }
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                    if depth == 0 {
                        self.advance();
                        return;
                    }
                }
                _ => {}
            }
            self.advance();
        }
    }

    fn document(&mut self) -> Option<Document> {
        let header = (|| -> PResult<(String, Mode, CarryKind)> {
            self.expect_keyword("cao")?;
            let name = self.expect(TokenKind::Str)?.text.clone();
            let mut mode = Mode::QPlus;
            if self.at_keyword("mode") {
                self.advance();
                mode = self.one_of(&[("qplus", Mode::QPlus), ("qminus", Mode::QMinus)])?.value;
            }
            let mut kind = CarryKind::RationalExact;
            if self.at_keyword("kind") {
                self.advance();
                kind = self.carry_kind()?.value;
            }
            self.expect(TokenKind::LBrace)?;
            Ok((name, mode, kind))
        })();
        let (name, mode, kind) = header.ok()?;

        let mut items = Vec::new();
        loop {
            let token = self.peek();
            let item = match token.kind {
                TokenKind::RBrace => break,
                TokenKind::Eof => {
                    let _ = self.fail::<()>("`}`");
                    return None;
                }
                TokenKind::Ident if token.text == "entity" => self.entity(),
                TokenKind::Ident if token.text == "op" => self.operator(),
                TokenKind::Ident if token.text == "at" => self.schedule(),
                _ => self.fail("`entity`, `op` or `at`"),
            };
            match item {
                Ok(item) => items.push(item),
                Err(()) => self.recover(),
            }
        }
        self.advance();
        if self.peek().kind != TokenKind::Eof {
            let _ = self.fail::<()>("end of input");
        }
        Some(Document { name, mode, kind, items })
    }

    fn carry_kind(&mut self) -> PResult<Spanned<CarryKind>> {
        self.one_of(&[("rational", CarryKind::RationalExact), ("integer", CarryKind::IntegerFloor)])
    }

    fn entity(&mut self) -> PResult<Item> {
        self.expect_keyword("entity")?;
        let mut names = vec![self.name()?];
        while self.peek().kind == TokenKind::Comma {
            self.advance();
            names.push(self.name()?);
        }
        self.expect(TokenKind::Equals)?;
        let value = self.rational()?;
        self.expect(TokenKind::Semi)?;
        Ok(Item::Entity { names, value })
    }

    fn terms(&mut self) -> PResult<Vec<(Spanned<String>, Spanned<Rational>)>> {
        self.expect(TokenKind::LParen)?;
        let mut terms = Vec::new();
        loop {
            let name = self.name()?;
            self.expect(TokenKind::Colon)?;
            let value = self.rational()?;
            terms.push((name, value));
            match self.peek().kind {
                TokenKind::Comma => {
                    self.advance();
                }
                TokenKind::RParen => {
                    self.advance();
                    return Ok(terms);
                }
                _ => return self.fail("`,` or `)`"),
            }
        }
    }

    fn operator(&mut self) -> PResult<Item> {
        let keyword = self.expect_keyword("op")?;
        let kind = if self.peek().kind == TokenKind::Ident { Some(self.carry_kind()?.value) } else { None };
        let operands = self.terms()?;
        self.expect(TokenKind::Arrow)?;
        let images = self.terms()?;
        self.expect(TokenKind::Semi)?;
        Ok(Item::Operator { keyword, kind, operands, images })
    }

    fn schedule(&mut self) -> PResult<Item> {
        self.expect_keyword("at")?;
        let step = self.integer::<u64>()?;
        self.expect(TokenKind::LBrace)?;
        let mut overrides = Vec::new();
        loop {
            match self.peek().kind {
                TokenKind::RBrace => {
                    self.advance();
                    break;
                }
                TokenKind::Eof => return self.fail("`}`"),
                _ => match self.override_item() {
                    Ok(o) => overrides.push(o),
                    Err(()) => self.recover(),
                },
            }
        }
        Ok(Item::Schedule { step, overrides })
    }

    fn override_item(&mut self) -> PResult<OverrideItem> {
        self.expect_keyword("op")?;
        let operator = self.integer::<usize>()?;
        let which = self.one_of(&[("radix", 0u8), ("coeff", 1), ("enabled", 2)])?.value;
        let change = match which {
            0 | 1 => {
                let name = self.name()?;
                self.expect(TokenKind::Equals)?;
                let value = self.rational()?;
                if which == 0 {
                    ChangeItem::Radix(name, value)
                } else {
                    ChangeItem::Coeff(name, value)
                }
            }
            _ => {
                self.expect(TokenKind::Equals)?;
                ChangeItem::Enabled(self.one_of(&[("true", true), ("false", false)])?)
            }
        };
        self.expect(TokenKind::Semi)?;
        Ok(OverrideItem { operator, change })
    }
}

struct OverrideSpans {
    operator: SourceSpan,
    target: SourceSpan,
    value: SourceSpan,
}

/// Source positions of everything validation can complain about.
#[derive(Default)]
struct SpanMap {
    entity_names: Vec<SourceSpan>,
    entity_values: Vec<SourceSpan>,
    operators: Vec<SourceSpan>,
    operand_names: Vec<Vec<SourceSpan>>,
    radices: Vec<Vec<SourceSpan>>,
    image_names: Vec<Vec<SourceSpan>>,
    coefficients: Vec<Vec<SourceSpan>>,
    overrides: HashMap<(u64, usize), OverrideSpans>,
}

impl SpanMap {
    fn locate(&self, violation: &Violation) -> SourceSpan {
        match violation.location {
            Location::Entity(e) => match violation.kind {
                ViolationKind::NegativeCardinal { .. } => self.entity_values[e],
                _ => self.entity_names[e],
            },
            Location::Operator(o) => self.operators[o],
            Location::Operand { operator, position } => match violation.kind {
                ViolationKind::NonPositiveRadix { .. } => self.radices[operator][position],
                _ => self.operand_names[operator][position],
            },
            Location::Image { operator, position } => match violation.kind {
                ViolationKind::NegativeCoefficient { .. } => self.coefficients[operator][position],
                _ => self.image_names[operator][position],
            },
            Location::Override { step, position } => {
                let spans = &self.overrides[&(step, position)];
                match &violation.kind {
                    ViolationKind::Schedule(ScheduleError::UnknownOperator { .. }) => spans.operator,
                    ViolationKind::Schedule(ScheduleError::NotAnOperand { .. } | ScheduleError::NotAnImage { .. }) => {
                        spans.target
                    }
                    _ => spans.value,
                }
            }
        }
    }
}

fn lower(document: Document, diags: &mut Vec<Diagnostic>) -> (Cao, SpanMap) {
    let mut cao = Cao::new(document.name).with_mode(document.mode).with_default_kind(document.kind);
    let mut spans = SpanMap::default();
    let mut index: HashMap<String, usize> = HashMap::new();

    for item in &document.items {
        if let Item::Entity { names, value } = item {
            for name in names {
                let e = cao.add_entity(name.value.clone(), value.value.clone());
                index.entry(name.value.clone()).or_insert(e);
                spans.entity_names.push(name.span);
                spans.entity_values.push(value.span);
            }
        }
    }

    let resolve = |name: &Spanned<String>, diags: &mut Vec<Diagnostic>| -> Option<usize> {
        let found = index.get(&name.value).copied();
        if found.is_none() {
            diags.push(Diagnostic::error(format!("unknown entity `{}`", name.value), name.span));
        }
        found
    };

    let mut schedule_positions: BTreeMap<u64, usize> = BTreeMap::new();
    let mut step_spans: HashMap<u64, SourceSpan> = HashMap::new();
    for item in &document.items {
        match item {
            Item::Entity { .. } => {}
            Item::Operator { keyword, kind, operands: operand_terms, images: image_terms } => {
                let operands: Vec<Operand> = operand_terms
                    .iter()
                    .filter_map(|(name, radix)| {
                        resolve(name, diags).map(|entity| Operand { entity, radix: radix.value.clone() })
                    })
                    .collect();
                let images: Vec<Image> = image_terms
                    .iter()
                    .filter_map(|(name, coeff)| {
                        resolve(name, diags).map(|entity| Image { entity, coefficient: coeff.value.clone() })
                    })
                    .collect();
                let operator = match Operator::new(kind.unwrap_or(document.kind), operands, images) {
                    Ok(op) => op,
                    // Only reachable after an unresolved name, which is already reported.
                    Err(_) => continue,
                };
                cao.add_operator(operator);
                spans.operators.push(*keyword);
                spans.operand_names.push(operand_terms.iter().map(|(n, _)| n.span).collect());
                spans.radices.push(operand_terms.iter().map(|(_, r)| r.span).collect());
                spans.image_names.push(image_terms.iter().map(|(n, _)| n.span).collect());
                spans.coefficients.push(image_terms.iter().map(|(_, c)| c.span).collect());
            }
            Item::Schedule { step, overrides } => {
                if let Some(first) = step_spans.get(&step.value) {
                    diags.push(Diagnostic::warning(
                        format!(
                            "step {} already has an `at` block (line {}); overrides are merged in order",
                            step.value, first.line
                        ),
                        step.span,
                    ));
                } else {
                    step_spans.insert(step.value, step.span);
                }
                for o in overrides {
                    let (change, target, value) = match &o.change {
                        ChangeItem::Radix(name, v) => match resolve(name, diags) {
                            Some(entity) => (Change::Radix { entity, value: v.value.clone() }, name.span, v.span),
                            None => continue,
                        },
                        ChangeItem::Coeff(name, v) => match resolve(name, diags) {
                            Some(entity) => (Change::Coefficient { entity, value: v.value.clone() }, name.span, v.span),
                            None => continue,
                        },
                        ChangeItem::Enabled(flag) => (Change::Enabled(flag.value), flag.span, flag.span),
                    };
                    let position = schedule_positions.entry(step.value).or_insert(0);
                    spans
                        .overrides
                        .insert((step.value, *position), OverrideSpans { operator: o.operator.span, target, value });
                    *position += 1;
                    cao.schedule.push(step.value, Override { operator: o.operator.value, change });
                }
            }
        }
    }

    (cao, spans)
}

//! Typed expression evaluation for the `eval` command.
//!
//! Grammar, in precedence order (loosest first):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' integer)?
//! atom   := rational | 't' '^' '{' group '}' | name '(' expr ')' | '(' expr ')'
//! name   := log | exp | inv | v | vG | chi
//! ```
//!
//! Values are typed: rationals and series mix freely, `v` produces a group
//! element or infinity, `vG` an index point, and `chi` maps group elements.
//! Interval-valued results (non-monic logs and exponentials of constants)
//! print with their enclosure but cannot feed further operations.

use std::fmt::Write as _;

use hahnlog_core::{
    assemble_log, ExtValue, FactorTerm, GroupElement, IndexPoint, LogComponents, PrecisionPolicy,
    Rational, ResidueLogMode, ResidueTerm, Series, Universe, ZetaMap,
};

use crate::config::{ModeChoice, RunConfig};

/// Result of evaluating an expression.
#[derive(Clone, Debug)]
pub enum Value {
    Num(Rational),
    Ser(Series<GroupElement>),
    Gel(GroupElement),
    Point(IndexPoint),
    Infinite,
    /// A series plus or times an out-of-band rational enclosure.
    WithInterval { series: Series<GroupElement>, lo: Rational, hi: Rational, combine: char },
}

pub struct Evaluator {
    u: Universe,
    log: LogComponents,
    zeta: ZetaMap,
    order: u32,
}

type EvalResult = Result<Value, String>;

impl Evaluator {
    pub fn new(u: &Universe, config: &RunConfig) -> Result<Self, String> {
        let mode = match config.mode {
            ModeChoice::Monic => ResidueLogMode::Monic,
            ModeChoice::Interval => {
                ResidueLogMode::Interval { width: config.interval_width.clone() }
            }
        };
        let policy = PrecisionPolicy::new(config.taylor_order)
            .map_err(|e| format!("invalid taylor order: {e}"))?;
        Ok(Evaluator {
            u: u.clone(),
            log: assemble_log(u, mode, policy),
            zeta: ZetaMap::new(u),
            order: config.taylor_order,
        })
    }

    pub fn eval(&self, src: &str) -> EvalResult {
        let mut p = Parser { src, pos: 0 };
        p.skip_ws();
        let v = self.expr(&mut p)?;
        p.skip_ws();
        if p.pos < src.len() {
            return Err(p.fail("unexpected trailing input"));
        }
        Ok(v)
    }

    pub fn render(&self, v: &Value) -> String {
        match v {
            Value::Num(q) => q.to_string(),
            Value::Ser(s) => s.to_string(),
            Value::Gel(g) => g.to_string(),
            Value::Point(p) => format!("({})", p.rendered(&self.u)),
            Value::Infinite => "infinity".into(),
            Value::WithInterval { series, lo, hi, combine } => {
                let mut out = String::new();
                let _ = write!(out, "{series} {combine} r, r in [{lo}, {hi}]");
                out
            }
        }
    }

    fn expr(&self, p: &mut Parser) -> EvalResult {
        let negate = p.eat('-');
        let mut acc = self.term(p)?;
        if negate {
            acc = self.negate(acc, p)?;
        }
        loop {
            p.skip_ws();
            if p.eat('+') {
                let rhs = self.term(p)?;
                acc = self.add(acc, rhs, p)?;
            } else if p.eat('-') {
                let rhs = self.term(p)?;
                let rhs = self.negate(rhs, p)?;
                acc = self.add(acc, rhs, p)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&self, p: &mut Parser) -> EvalResult {
        let mut acc = self.factor(p)?;
        loop {
            p.skip_ws();
            if p.eat('*') {
                let rhs = self.factor(p)?;
                acc = self.mul(acc, rhs, p)?;
            } else if p.eat('/') {
                let rhs = self.factor(p)?;
                acc = self.div(acc, rhs, p)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&self, p: &mut Parser) -> EvalResult {
        let base = self.atom(p)?;
        p.skip_ws();
        if !p.eat('^') {
            return Ok(base);
        }
        p.skip_ws();
        let n: i32 = p.int()?.try_into().map_err(|_| p.fail("power out of range"))?;
        match base {
            Value::Num(q) => {
                if q == Rational::from_integer(0.into()) && n <= 0 {
                    return Err(p.fail("zero cannot be raised to a nonpositive power"));
                }
                let mut acc = Rational::from_integer(1.into());
                for _ in 0..n.unsigned_abs() {
                    acc *= &q;
                }
                if n < 0 {
                    acc = Rational::from_integer(1.into()) / acc;
                }
                Ok(Value::Num(acc))
            }
            Value::Ser(s) => s.pow(n, self.order).map(Value::Ser).map_err(|e| p.fail(e)),
            other => Err(p.fail(format!("cannot raise {} to a power", kind(&other)))),
        }
    }

    fn atom(&self, p: &mut Parser) -> EvalResult {
        p.skip_ws();
        if p.eat('(') {
            let v = self.expr(p)?;
            p.skip_ws();
            p.expect(')')?;
            return Ok(v);
        }
        if p.peek().is_some_and(|c| c.is_ascii_digit()) {
            return Ok(Value::Num(p.rational()?));
        }
        // A lone `t^{...}` monomial; any other identifier is a function.
        if p.peek_str("t^{") {
            p.pos += 3;
            let inner_start = p.pos;
            let Some(close) = p.src[p.pos..].find('}') else {
                return Err(p.fail("unterminated exponent brace"));
            };
            let inner = &p.src[inner_start..inner_start + close];
            let g = GroupElement::parse(&self.u, inner).map_err(|e| match e {
                hahnlog_core::Error::Parse { pos, msg } => {
                    Parser { src: p.src, pos: inner_start + pos }.fail(msg)
                }
                other => p.fail(other),
            })?;
            p.pos = inner_start + close + 1;
            return Ok(Value::Ser(Series::monomial(g, Rational::from_integer(1.into()))));
        }
        let name = p.ident()?;
        p.skip_ws();
        p.expect('(')?;
        let arg = self.expr(p)?;
        p.skip_ws();
        p.expect(')')?;
        self.apply(&name, arg, p)
    }

    fn apply(&self, name: &str, arg: Value, p: &Parser) -> EvalResult {
        match name {
            "log" => {
                let s = self.promote(arg, p)?;
                let out = self.log.full_log(&s).map_err(|e| p.fail(e))?;
                let series = out.in_band().map_err(|e| p.fail(e))?;
                match out.residue {
                    ResidueTerm::Zero => Ok(Value::Ser(series)),
                    ResidueTerm::LogInterval { lo, hi } => {
                        Ok(Value::WithInterval { series, lo, hi, combine: '+' })
                    }
                }
            }
            "exp" => {
                let s = self.promote(arg, p)?;
                let out = self.log.full_exp(&s).map_err(|e| p.fail(e))?;
                let series = out.in_band().map_err(|e| p.fail(e))?;
                match out.factor {
                    FactorTerm::One => Ok(Value::Ser(series)),
                    FactorTerm::ExpInterval { lo, hi } => {
                        Ok(Value::WithInterval { series, lo, hi, combine: '*' })
                    }
                }
            }
            "inv" => match arg {
                Value::Num(q) => {
                    if q == Rational::from_integer(0.into()) {
                        Err(p.fail("division by zero"))
                    } else {
                        Ok(Value::Num(Rational::from_integer(1.into()) / q))
                    }
                }
                other => {
                    let s = self.promote(other, p)?;
                    s.invert(self.order).map(Value::Ser).map_err(|e| p.fail(e))
                }
            },
            "v" => {
                let s = self.promote(arg, p)?;
                match s.valuation().map_err(|e| p.fail(e))? {
                    ExtValue::Infinity => Ok(Value::Infinite),
                    ExtValue::Finite(g) => Ok(Value::Gel(g)),
                }
            }
            "vG" => {
                let g = match arg {
                    Value::Gel(g) => g,
                    other => match self.apply("v", other, p)? {
                        Value::Gel(g) => g,
                        _ => return Err(p.fail("vG of zero is undefined")),
                    },
                };
                g.arch_class().map(Value::Point).map_err(|e| p.fail(e))
            }
            "chi" => {
                let g = match arg {
                    Value::Gel(g) => g,
                    other => match self.apply("v", other, p)? {
                        Value::Gel(g) => g,
                        _ => return Err(p.fail("chi of zero is undefined")),
                    },
                };
                self.zeta.chi(&g).map(Value::Gel).map_err(|e| p.fail(e))
            }
            other => Err(p.fail(format!("unknown function {other:?}"))),
        }
    }

    // Rationals promote to constant series; everything else must already be
    // a series.
    fn promote(&self, v: Value, p: &Parser) -> Result<Series<GroupElement>, String> {
        match v {
            Value::Num(q) => Ok(Series::constant_in(&self.u, q)),
            Value::Ser(s) => Ok(s),
            other => Err(p.fail(format!("expected a series, found {}", kind(&other)))),
        }
    }

    fn negate(&self, v: Value, p: &Parser) -> EvalResult {
        match v {
            Value::Num(q) => Ok(Value::Num(-q)),
            Value::Ser(s) => Ok(Value::Ser(s.negated())),
            Value::Gel(g) => Ok(Value::Gel(g.negated())),
            other => Err(p.fail(format!("cannot negate {}", kind(&other)))),
        }
    }

    fn add(&self, a: Value, b: Value, p: &Parser) -> EvalResult {
        match (a, b) {
            (Value::Num(x), Value::Num(y)) => Ok(Value::Num(x + y)),
            (Value::Gel(x), Value::Gel(y)) => {
                x.checked_add(&y).map(Value::Gel).map_err(|e| p.fail(e))
            }
            (a, b) => {
                let (x, y) = (self.promote(a, p)?, self.promote(b, p)?);
                x.checked_add(&y).map(Value::Ser).map_err(|e| p.fail(e))
            }
        }
    }

    fn mul(&self, a: Value, b: Value, p: &Parser) -> EvalResult {
        match (a, b) {
            (Value::Num(x), Value::Num(y)) => Ok(Value::Num(x * y)),
            (Value::Num(q), Value::Ser(s)) | (Value::Ser(s), Value::Num(q)) => {
                Ok(Value::Ser(s.scale(&q)))
            }
            (Value::Num(q), Value::Gel(g)) | (Value::Gel(g), Value::Num(q)) => {
                Ok(Value::Gel(g.scale(&q)))
            }
            (a, b) => {
                let (x, y) = (self.promote(a, p)?, self.promote(b, p)?);
                x.mul(&y).map(Value::Ser).map_err(|e| p.fail(e))
            }
        }
    }

    fn div(&self, a: Value, b: Value, p: &Parser) -> EvalResult {
        match (a, b) {
            (Value::Num(x), Value::Num(y)) => {
                if y == Rational::from_integer(0.into()) {
                    Err(p.fail("division by zero"))
                } else {
                    Ok(Value::Num(x / y))
                }
            }
            (a, b) => {
                let x = self.promote(a, p)?;
                let inv = self
                    .promote(b, p)?
                    .invert(self.order)
                    .map_err(|e| p.fail(e))?;
                x.mul(&inv).map(Value::Ser).map_err(|e| p.fail(e))
            }
        }
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Num(_) => "a rational",
        Value::Ser(_) => "a series",
        Value::Gel(_) => "a group element",
        Value::Point(_) => "an index point",
        Value::Infinite => "infinity",
        Value::WithInterval { .. } => "an interval-valued result",
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn fail(&self, msg: impl ToString) -> String {
        format!("parse error at byte {}: {}", self.pos, msg.to_string())
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_str(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.fail(format!("expected {c:?}")))
        }
    }

    fn int(&mut self) -> Result<i64, String> {
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| Parser { src: self.src, pos: start }.fail("expected an integer"))
    }

    fn rational(&mut self) -> Result<Rational, String> {
        let n = self.int()?;
        if self.peek() == Some('/') {
            let save = self.pos;
            self.pos += 1;
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                let d = self.int()?;
                if d == 0 {
                    return Err(self.fail("zero denominator"));
                }
                return Ok(Rational::new(n.into(), d.into()));
            }
            // A `/` followed by a non-digit is series division, not a
            // rational literal.
            self.pos = save;
        }
        Ok(Rational::from_integer(n.into()))
    }

    fn ident(&mut self) -> Result<String, String> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.fail("expected an expression"));
        }
        Ok(self.src[start..self.pos].to_string())
    }
}

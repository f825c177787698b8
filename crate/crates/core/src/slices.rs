//! Exterior probability of angular slices of a disc.
//!
//! A slice `Γ_λ(I)` is the sector `{|w| ≤ λ, arg w ∈ I}`. Its measure is the
//! normalized contour integral of `1/w` over the boundary arc, which reduces
//! to `|I| / 2π` and does not depend on `λ`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Slack allowed when checking that endpoints lie in `[-π, π]`.
const ANGLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SliceError {
    #[error("invalid interval [{lo}, {hi}]: need -pi <= lo <= hi <= pi")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("slices live on discs of different radius ({a} vs {b})")]
    ScaleMismatch { a: f64, b: f64 },
    #[error("radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("arc quadrature needs at least 8 nodes, got {0}")]
    TooFewNodes(usize),
}

/// Angular interval with independent open/closed endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularInterval {
    lo: f64,
    hi: f64,
    lo_open: bool,
    hi_open: bool,
}

impl AngularInterval {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Result<Self, SliceError> {
        if !(lo.is_finite() && hi.is_finite()) || lo < -PI - ANGLE_SLACK || hi > PI + ANGLE_SLACK || lo > hi {
            return Err(SliceError::InvalidInterval { lo, hi });
        }
        Ok(Self { lo: lo.max(-PI), hi: hi.min(PI), lo_open, hi_open })
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self, SliceError> {
        Self::new(lo, hi, true, true)
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self, SliceError> {
        Self::new(lo, hi, false, false)
    }

    /// The whole circle `(-π, π]`.
    pub fn full() -> Self {
        Self { lo: -PI, hi: PI, lo_open: true, hi_open: false }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo_open(&self) -> bool {
        self.lo_open
    }

    pub fn hi_open(&self) -> bool {
        self.hi_open
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// True when the interval contains no angle at all.
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    pub fn contains(&self, theta: f64) -> bool {
        let above = if self.lo_open { theta > self.lo } else { theta >= self.lo };
        let below = if self.hi_open { theta < self.hi } else { theta <= self.hi };
        above && below
    }

    /// `self ⊆ other` as point sets.
    pub fn is_subset_of(&self, other: &AngularInterval) -> bool {
        if self.is_empty() {
            return true;
        }
        let lo_ok = self.lo > other.lo || (self.lo == other.lo && (self.lo_open || !other.lo_open));
        let hi_ok = self.hi < other.hi || (self.hi == other.hi && (self.hi_open || !other.hi_open));
        lo_ok && hi_ok
    }

    pub fn intersect(&self, other: &AngularInterval) -> Option<AngularInterval> {
        let (lo, lo_open) = match self.lo.total_cmp(&other.lo) {
            std::cmp::Ordering::Greater => (self.lo, self.lo_open),
            std::cmp::Ordering::Less => (other.lo, other.lo_open),
            std::cmp::Ordering::Equal => (self.lo, self.lo_open || other.lo_open),
        };
        let (hi, hi_open) = match self.hi.total_cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi, self.hi_open),
            std::cmp::Ordering::Greater => (other.hi, other.hi_open),
            std::cmp::Ordering::Equal => (self.hi, self.hi_open || other.hi_open),
        };
        let out = AngularInterval { lo, hi, lo_open, hi_open };
        (!out.is_empty()).then_some(out)
    }

    /// `self \ other`, at most two pieces, in increasing order.
    pub fn subtract(&self, other: &AngularInterval) -> Vec<AngularInterval> {
        let Some(cut) = self.intersect(other) else {
            return if self.is_empty() { vec![] } else { vec![*self] };
        };
        let left = AngularInterval { lo: self.lo, hi: cut.lo, lo_open: self.lo_open, hi_open: !cut.lo_open };
        let right = AngularInterval { lo: cut.hi, hi: self.hi, lo_open: !cut.hi_open, hi_open: self.hi_open };
        [left, right].into_iter().filter(|p| !p.is_empty()).collect()
    }

    /// Whether the union with `next` (which starts no earlier) is one interval.
    fn joins(&self, next: &AngularInterval) -> bool {
        self.hi > next.lo || (self.hi == next.lo && (!self.hi_open || !next.lo_open))
    }
}

impl fmt::Display for AngularInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

/// The sector `Γ_λ(I)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slice {
    lambda: f64,
    interval: AngularInterval,
}

impl Slice {
    pub fn new(lambda: f64, interval: AngularInterval) -> Result<Self, SliceError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(SliceError::InvalidRadius(lambda));
        }
        Ok(Self { lambda, interval })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn interval(&self) -> &AngularInterval {
        &self.interval
    }
}

/// Finite disjoint union of slices of one disc, kept sorted and merged so
/// that equal sets have equal representations.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceSet {
    lambda: f64,
    components: Vec<AngularInterval>,
}

impl SliceSet {
    pub fn empty(lambda: f64) -> Result<Self, SliceError> {
        Self::from_intervals(lambda, Vec::new())
    }

    pub fn full(lambda: f64) -> Result<Self, SliceError> {
        Self::from_intervals(lambda, vec![AngularInterval::full()])
    }

    /// Canonicalizes an arbitrary (possibly overlapping) list of intervals.
    pub fn from_intervals(lambda: f64, intervals: Vec<AngularInterval>) -> Result<Self, SliceError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(SliceError::InvalidRadius(lambda));
        }
        let mut items: Vec<_> = intervals.into_iter().filter(|i| !i.is_empty()).collect();
        // Closed left endpoints sort first so merging keeps them.
        items.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.lo_open.cmp(&b.lo_open)));
        let mut components: Vec<AngularInterval> = Vec::with_capacity(items.len());
        for item in items {
            match components.last_mut() {
                Some(last) if last.joins(&item) => {
                    if item.hi > last.hi {
                        last.hi = item.hi;
                        last.hi_open = item.hi_open;
                    } else if item.hi == last.hi {
                        last.hi_open &= item.hi_open;
                    }
                }
                _ => components.push(item),
            }
        }
        Ok(Self { lambda, components })
    }

    pub fn from_slice(s: &Slice) -> Self {
        Self::from_intervals(s.lambda, vec![s.interval]).expect("slice radius already validated")
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn components(&self) -> &[AngularInterval] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.components.iter().map(|i| i.length()).sum::<f64>() / (2.0 * PI)
    }

    fn check_scale(&self, other: &SliceSet) -> Result<(), SliceError> {
        if self.lambda == other.lambda {
            Ok(())
        } else {
            Err(SliceError::ScaleMismatch { a: self.lambda, b: other.lambda })
        }
    }

    pub fn union(&self, other: &SliceSet) -> Result<SliceSet, SliceError> {
        self.check_scale(other)?;
        let all = self.components.iter().chain(&other.components).copied().collect();
        Self::from_intervals(self.lambda, all)
    }

    pub fn intersect(&self, other: &SliceSet) -> Result<SliceSet, SliceError> {
        self.check_scale(other)?;
        let pieces = self
            .components
            .iter()
            .flat_map(|a| other.components.iter().filter_map(move |b| a.intersect(b)))
            .collect();
        Self::from_intervals(self.lambda, pieces)
    }

    pub fn subtract(&self, other: &SliceSet) -> Result<SliceSet, SliceError> {
        self.check_scale(other)?;
        let mut remaining = self.components.clone();
        for b in &other.components {
            remaining = remaining.iter().flat_map(|a| a.subtract(b)).collect();
        }
        Self::from_intervals(self.lambda, remaining)
    }
}

impl fmt::Display for SliceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<_> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `μ_λ(Γ_λ(I)) = |I| / 2π`.
pub fn slice_measure(s: &Slice) -> f64 {
    s.interval.length() / (2.0 * PI)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceOp {
    Intersect,
    Subtract,
}

pub fn slice_algebra(a: &Slice, b: &Slice, op: SliceOp) -> Result<SliceSet, SliceError> {
    let (sa, sb) = (SliceSet::from_slice(a), SliceSet::from_slice(b));
    match op {
        SliceOp::Intersect => sa.intersect(&sb),
        SliceOp::Subtract => sa.subtract(&sb),
    }
}

/// Product measure on the poly-disc, one factor per coordinate.
pub fn product_measure(factors: &[SliceSet]) -> f64 {
    factors.iter().map(SliceSet::measure).product()
}

/// Midpoint-rule value of `(1/2πi) ∮ dw/w` along the arc of `s`.
pub fn arc_integral_check(s: &Slice, nodes: usize) -> Result<Complex64, SliceError> {
    if nodes < 8 {
        return Err(SliceError::TooFewNodes(nodes));
    }
    let iv = s.interval;
    let h = iv.length() / nodes as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..nodes {
        let theta = iv.lo + (m as f64 + 0.5) * h;
        let w = Complex64::from_polar(s.lambda, theta);
        let dw = Complex64::i() * w * h;
        sum += dw / w;
    }
    Ok(sum / (2.0 * PI * Complex64::i()))
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("bad interval at offset {offset}: {message}")]
pub struct IntervalParseError {
    pub offset: usize,
    pub message: String,
}

/// Parses `"lo:hi"` with optional brackets, e.g. `"0:pi/2"` or `"[-pi/3:pi/3)"`.
/// Endpoints accept `+ - * /`, parentheses, decimal numbers and `pi`.
/// Without brackets the interval is `(lo, hi]`.
pub fn parse_interval(text: &str) -> Result<AngularInterval, IntervalParseError> {
    let err = |offset: usize, message: &str| IntervalParseError { offset, message: message.to_string() };
    let bytes = text.as_bytes();
    let start = text.len() - text.trim_start().len();
    let end = text.trim_end().len();
    if start >= end {
        return Err(err(text.len(), "empty interval"));
    }

    // A ':' at depth 1 means the outer pair is an interval bracket, not grouping.
    let mut depth = 0i32;
    let mut colon = None;
    let mut colon_depth = 0;
    for (i, &b) in bytes.iter().enumerate().take(end).skip(start) {
        match b {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            b':' if colon.is_none() => {
                colon = Some(i);
                colon_depth = depth;
            }
            b':' => return Err(err(i, "more than one ':'")),
            _ => {}
        }
    }
    let colon = colon.ok_or_else(|| err(end, "expected ':'"))?;
    let (mut lo_open, mut hi_open) = (true, false);
    let (mut body_start, mut body_end) = (start, end);
    if colon_depth == 1 {
        lo_open = match bytes[start] {
            b'(' => true,
            b'[' => false,
            _ => return Err(err(start, "expected '(' or '['")),
        };
        hi_open = match bytes[end - 1] {
            b')' => true,
            b']' => false,
            _ => return Err(err(end - 1, "expected ')' or ']'")),
        };
        body_start += 1;
        body_end -= 1;
    } else if colon_depth != 0 {
        return Err(err(colon, "unbalanced brackets"));
    }

    let lo = AngleParser::new(text, body_start, colon).parse()?;
    let hi = AngleParser::new(text, colon + 1, body_end).parse()?;
    AngularInterval::new(lo, hi, lo_open, hi_open).map_err(|e| err(start, &e.to_string()))
}

/// Recursive descent over `expr := term (('+'|'-') term)*`,
/// `term := factor (('*'|'/') factor)*`, `factor := num | pi | '(' expr ')' | '-' factor`.
struct AngleParser<'a> {
    src: &'a [u8],
    pos: usize,
    end: usize,
}

impl<'a> AngleParser<'a> {
    fn new(text: &'a str, pos: usize, end: usize) -> Self {
        Self { src: text.as_bytes(), pos, end }
    }

    fn fail<T>(&self, message: &str) -> Result<T, IntervalParseError> {
        Err(IntervalParseError { offset: self.pos, message: message.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.end && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        (self.pos < self.end).then(|| self.src[self.pos])
    }

    fn parse(mut self) -> Result<f64, IntervalParseError> {
        let v = self.expr()?;
        if self.peek().is_some() {
            return self.fail("unexpected character");
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<f64, IntervalParseError> {
        let mut v = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            v = if op == b'+' { v + rhs } else { v - rhs };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<f64, IntervalParseError> {
        let mut v = self.factor()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            v = if op == b'*' { v * rhs } else { v / rhs };
        }
        Ok(v)
    }

    fn factor(&mut self) -> Result<f64, IntervalParseError> {
        match self.peek() {
            None => self.fail("expected a number, 'pi' or '('"),
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.fail("expected ')'");
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'p') => {
                if self.src[self.pos..self.end].starts_with(b"pi") {
                    self.pos += 2;
                    Ok(PI)
                } else {
                    self.fail("expected 'pi'")
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.end && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                s.parse::<f64>().or_else(|_| {
                    self.pos = start;
                    self.fail("malformed number")
                })
            }
            Some(_) => self.fail("expected a number, 'pi' or '('"),
        }
    }
}

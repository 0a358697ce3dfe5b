//! Stitch vocabulary, the pattern file format and the structural rules a
//! pattern must satisfy before it can be evaluated.
//!
//! Patterns are stored bottom-up: stitch row `0` is knitted first. The text
//! format lists rows top-down so that a file reads like the fabric it
//! describes, and [`StitchPattern::parse`] reverses the order.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{PatternError, Result};

/// Needle-direction of a transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    fn sign(self) -> i32 {
        match self {
            Direction::Left => -1,
            Direction::Right => 1,
        }
    }
}

/// One machine-independent stitch instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Stitch {
    Knit,
    Purl,
    Tuck,
    Miss,
    Empty,
    /// A knit whose head loop is then moved `magnitude` needles sideways.
    Transfer {
        direction: Direction,
        magnitude: u8,
    },
}

impl Stitch {
    /// Largest number of needles a loop can be moved by one transfer.
    pub const MAX_TRANSFER: u8 = 3;

    pub fn transfer(direction: Direction, magnitude: u8) -> Option<Stitch> {
        (1..=Self::MAX_TRANSFER).contains(&magnitude).then_some(Stitch::Transfer { direction, magnitude })
    }

    /// Signed needle offset of a transfer, zero for everything else.
    pub fn needle_shift(self) -> i32 {
        match self {
            Stitch::Transfer { direction, magnitude } => direction.sign() * magnitude as i32,
            _ => 0,
        }
    }

    pub fn is_knit_or_purl(self) -> bool {
        matches!(self, Stitch::Knit | Stitch::Purl)
    }

    /// Stitches that pull a new loop through the held loops.
    pub fn forms_loop_through(self) -> bool {
        matches!(self, Stitch::Knit | Stitch::Purl | Stitch::Transfer { .. })
    }

    pub fn token(self) -> &'static str {
        match self {
            Stitch::Knit => "K",
            Stitch::Purl => "P",
            Stitch::Tuck => "T",
            Stitch::Miss => "M",
            Stitch::Empty => "E",
            Stitch::Transfer { direction: Direction::Left, magnitude: 1 } => "TL1",
            Stitch::Transfer { direction: Direction::Left, magnitude: 2 } => "TL2",
            Stitch::Transfer { direction: Direction::Left, .. } => "TL3",
            Stitch::Transfer { direction: Direction::Right, magnitude: 1 } => "TR1",
            Stitch::Transfer { direction: Direction::Right, magnitude: 2 } => "TR2",
            Stitch::Transfer { direction: Direction::Right, .. } => "TR3",
        }
    }
}

impl FromStr for Stitch {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        let stitch = match s {
            "K" => Stitch::Knit,
            "P" => Stitch::Purl,
            "T" => Stitch::Tuck,
            "M" => Stitch::Miss,
            "E" => Stitch::Empty,
            _ => {
                let (direction, rest) = if let Some(rest) = s.strip_prefix("TL") {
                    (Direction::Left, rest)
                } else if let Some(rest) = s.strip_prefix("TR") {
                    (Direction::Right, rest)
                } else {
                    return Err(());
                };
                let magnitude = match rest {
                    "1" => 1,
                    "2" => 2,
                    "3" => 3,
                    _ => return Err(()),
                };
                Stitch::Transfer { direction, magnitude }
            }
        };
        Ok(stitch)
    }
}

impl fmt::Display for Stitch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Direction the yarn carrier travels while knitting a stitch row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CarryDirection {
    LeftToRight,
    RightToLeft,
}

impl CarryDirection {
    /// Row parity alone decides the direction: the yarn starts on the left.
    pub fn of_row(row: usize) -> CarryDirection {
        if row.is_multiple_of(2) {
            CarryDirection::LeftToRight
        } else {
            CarryDirection::RightToLeft
        }
    }
}

/// A validated-shape `cols × rows` grid of stitch instructions.
///
/// `(m, n)` addresses needle column `m` in stitch row `n`, with `n = 0`
/// the first knitted (bottom) row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StitchPattern {
    cols: usize,
    rows: usize,
    cells: Vec<Stitch>,
}

impl StitchPattern {
    /// Builds a pattern from bottom-up rows.
    pub fn from_rows(rows: Vec<Vec<Stitch>>) -> Result<StitchPattern> {
        let height = rows.len();
        let width = rows.first().map(Vec::len).unwrap_or(0);
        if height == 0 || width == 0 {
            return Err(PatternError::EmptyFile.into());
        }
        let mut cells = Vec::with_capacity(width * height);
        for (n, row) in rows.into_iter().enumerate() {
            if row.len() != width {
                return Err(
                    PatternError::RaggedRows { line: height - n, expected: width, got: row.len() }.into()
                );
            }
            cells.extend(row);
        }
        Ok(StitchPattern { cols: width, rows: height, cells })
    }

    pub fn filled(cols: usize, rows: usize, stitch: Stitch) -> Result<StitchPattern> {
        Self::from_rows(vec![vec![stitch; cols]; rows])
    }

    /// Parses the text format: whitespace separated tokens, one stitch row
    /// per line, top row first, `#` starts a comment.
    pub fn parse(text: &str) -> Result<StitchPattern> {
        let mut rows = Vec::new();
        let mut width = None;
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            let mut row = Vec::with_capacity(tokens.len());
            for (col, token) in tokens.iter().enumerate() {
                let stitch = token.parse::<Stitch>().map_err(|_| PatternError::UnknownToken {
                    token: token.to_string(),
                    line,
                    col: col + 1,
                })?;
                row.push(stitch);
            }
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(PatternError::RaggedRows { line, expected: w, got: row.len() }.into())
                }
                _ => {}
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(PatternError::EmptyFile.into());
        }
        rows.reverse();
        Self::from_rows(rows)
    }

    /// Inverse of [`parse`](Self::parse), without comments.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in (0..self.rows).rev() {
            let line: Vec<&str> = self.row(n).iter().map(|s| s.token()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Needle columns (`M`).
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Stitch rows (`N`).
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn stitch_count(&self) -> usize {
        self.cells.len()
    }

    pub fn get(&self, m: usize, n: usize) -> Stitch {
        self.cells[n * self.cols + m]
    }

    /// Out-of-range lookups answer `None` instead of panicking.
    pub fn try_get(&self, m: isize, n: isize) -> Option<Stitch> {
        if m < 0 || n < 0 || m as usize >= self.cols || n as usize >= self.rows {
            None
        } else {
            Some(self.get(m as usize, n as usize))
        }
    }

    pub fn set(&mut self, m: usize, n: usize, stitch: Stitch) {
        self.cells[n * self.cols + m] = stitch;
    }

    pub fn row(&self, n: usize) -> &[Stitch] {
        &self.cells[n * self.cols..(n + 1) * self.cols]
    }

    pub fn carry_direction(&self, n: usize) -> Result<CarryDirection> {
        if n >= self.rows {
            return Err(PatternError::IndexOutOfRange { row: n, rows: self.rows }.into());
        }
        Ok(CarryDirection::of_row(n))
    }

    /// Columns of row `n` in the order the carrier visits them.
    pub fn knitting_order(&self, n: usize) -> Vec<usize> {
        match CarryDirection::of_row(n) {
            CarryDirection::LeftToRight => (0..self.cols).collect(),
            CarryDirection::RightToLeft => (0..self.cols).rev().collect(),
        }
    }

    /// The first `rows` stitch rows as a pattern of their own.
    pub fn truncated(&self, rows: usize) -> StitchPattern {
        let rows = rows.clamp(1, self.rows);
        StitchPattern { cols: self.cols, rows, cells: self.cells[..rows * self.cols].to_vec() }
    }

    /// Repeats this pattern as a block until it covers `cols × rows`.
    pub fn tiled(&self, cols: usize, rows: usize) -> StitchPattern {
        let mut cells = Vec::with_capacity(cols * rows);
        for n in 0..rows {
            for m in 0..cols {
                cells.push(self.get(m % self.cols, n % self.rows));
            }
        }
        StitchPattern { cols, rows, cells }
    }
}

impl fmt::Display for StitchPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for StitchPattern {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        StitchPattern::parse(s)
    }
}

/// Identifies a structural rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    /// Boundary stitches are Knit or Purl, or an edge transfer next to Empty cells.
    R1,
    /// Empty stitches lie on the outside of the fabric.
    R2,
    /// Transfers keep their loops on needles that knit in the next row.
    R3,
    /// Tuck/Miss columns pull a loop up at most three rows.
    R4,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub m: usize,
    pub n: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at ({}, {}): {}", self.rule, self.m, self.n, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(mut violations: Vec<Violation>) -> ValidationReport {
        violations.sort_by_key(|v| (v.rule, v.n, v.m));
        ValidationReport { ok: violations.is_empty(), violations }
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Longest run of Tuck/Miss stitches a held loop can be pulled through.
pub const MAX_VERTICAL_STRETCH: usize = 3;

/// Checks the structural rules. Violations are data; this never fails.
pub fn validate(p: &StitchPattern) -> ValidationReport {
    let mut violations = Vec::new();
    boundary_rule(p, &mut violations);
    empty_rule(p, &mut violations);
    transfer_rule(p, &mut violations);
    stretch_rule(p, &mut violations);
    ValidationReport::from_violations(violations)
}

fn boundary_rule(p: &StitchPattern, out: &mut Vec<Violation>) {
    let last_row = p.rows() - 1;
    for n in 0..p.rows() {
        let row = p.row(n);
        let Some(left) = row.iter().position(|s| *s != Stitch::Empty) else {
            continue;
        };
        let right = row.iter().rposition(|s| *s != Stitch::Empty).unwrap_or(left);
        let top_or_bottom = n == 0 || n == last_row;
        for (m, &stitch) in row.iter().enumerate().take(right + 1).skip(left) {
            let on_side = m == left || m == right;
            if stitch == Stitch::Empty || !(on_side || top_or_bottom) {
                continue;
            }
            if stitch.is_knit_or_purl() {
                continue;
            }
            if !top_or_bottom && is_edge_idiom(p, m, n, m == left) {
                continue;
            }
            out.push(Violation { rule: Rule::R1, m, n, message: format!("{stitch} on the fabric boundary") });
        }
    }
}

/// Increase: an edge transfer moving its loop outward onto the Empty needle
/// beside it. Decrease: an edge transfer moving its loop inward, leaving an
/// Empty stitch above.
fn is_edge_idiom(p: &StitchPattern, m: usize, n: usize, left_edge: bool) -> bool {
    let shift = p.get(m, n).needle_shift();
    if shift == 0 {
        return false;
    }
    let outward = if left_edge { -1 } else { 1 };
    let (mi, ni) = (m as isize, n as isize);
    if shift.signum() == outward {
        p.try_get(mi + outward as isize, ni) == Some(Stitch::Empty)
    } else {
        p.try_get(mi, ni + 1) == Some(Stitch::Empty)
    }
}

fn empty_rule(p: &StitchPattern, out: &mut Vec<Violation>) {
    for n in 0..p.rows() {
        for m in 0..p.cols() {
            if p.get(m, n) != Stitch::Empty {
                continue;
            }
            let (mi, ni) = (m as isize, n as isize);
            let enclosed = [(mi - 1, ni), (mi + 1, ni), (mi, ni - 1), (mi, ni + 1)]
                .into_iter()
                .all(|(a, b)| matches!(p.try_get(a, b), Some(s) if s != Stitch::Empty));
            if enclosed {
                out.push(Violation {
                    rule: Rule::R2,
                    m,
                    n,
                    message: "Empty stitch enclosed by stitches".into(),
                });
            }
        }
    }
}

fn transfer_rule(p: &StitchPattern, out: &mut Vec<Violation>) {
    for n in 0..p.rows() {
        for m in 0..p.cols() {
            let stitch = p.get(m, n);
            let shift = stitch.needle_shift();
            if shift == 0 {
                continue;
            }
            let dest = m as isize + shift as isize;
            let message = if dest < 0 || dest >= p.cols() as isize {
                Some(format!("{stitch} moves its loop off the needle bed"))
            } else if p.try_get(dest, n as isize + 1) == Some(Stitch::Empty) {
                Some(format!("{stitch} moves its loop onto an Empty stitch"))
            } else {
                None
            };
            if let Some(message) = message {
                out.push(Violation { rule: Rule::R3, m, n, message });
            }
        }
    }
}

fn stretch_rule(p: &StitchPattern, out: &mut Vec<Violation>) {
    for m in 0..p.cols() {
        let mut run = 0;
        for n in 0..p.rows() {
            if matches!(p.get(m, n), Stitch::Tuck | Stitch::Miss) {
                run += 1;
                if run == MAX_VERTICAL_STRETCH + 1 {
                    out.push(Violation {
                        rule: Rule::R4,
                        m,
                        n,
                        message: format!("loop pulled up more than {MAX_VERTICAL_STRETCH} rows by Tuck/Miss"),
                    });
                }
            } else {
                run = 0;
            }
        }
    }
}

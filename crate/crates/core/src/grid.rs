//! The contact-neighborhood (CN) grid.
//!
//! An `M × N` stitch pattern owns a `2M × (N + 1)` grid of cells. Stitch
//! `(m, n)` writes the four cells `(2m, n)`, `(2m + 1, n)` (its legs, the
//! "lower pair") and `(2m, n + 1)`, `(2m + 1, n + 1)` (its head, the "upper
//! pair"). Every cell stores `(ST, AV, MV)`:
//!
//! * `ST` is location based: the stitch that actualizes whatever CN ends up
//!   here (`K`, `P`, or nothing).
//! * `AV` and `MV` describe the CN created here: its actualization state and
//!   its first movement step away from this location.
//!
//! Population is strictly local. The only non-local bits are the downward
//! scan when a Tuck/Miss lands above a Miss and the bounded neighborhood scan
//! that finds CNs moved onto a location being knitted.

use std::fmt;

use serde::Serialize;

use crate::error::{PopulationError, Result};
use crate::pattern::{Stitch, StitchPattern};

/// Location-based stitch type mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StitchMark {
    None,
    K,
    P,
}

impl StitchMark {
    pub fn actualizes(self) -> bool {
        self != StitchMark::None
    }

    fn token(self) -> &'static str {
        match self {
            StitchMark::None => "null",
            StitchMark::K => "K",
            StitchMark::P => "P",
        }
    }
}

/// Actualization value of the CN created at a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Actualization {
    /// Potential: a loop head waiting to be knitted through.
    Pcn,
    /// Actualized: a real yarn crossing.
    Acn,
    /// Unanchored: a loop whose legs are not held down (yet).
    Uacn,
    /// No CN here.
    E,
}

impl Actualization {
    fn token(self) -> &'static str {
        match self {
            Actualization::Pcn => "PCN",
            Actualization::Acn => "ACN",
            Actualization::Uacn => "UACN",
            Actualization::E => "E",
        }
    }

    pub fn is_cn(self) -> bool {
        self != Actualization::E
    }
}

/// One movement step `[Δi, Δj]` in CN grid units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Movement {
    pub di: i32,
    pub dj: i32,
}

impl Movement {
    pub const ZERO: Movement = Movement { di: 0, dj: 0 };
    /// The shift written above a Miss: the yarn sits one row down.
    pub const DOWN: Movement = Movement { di: 0, dj: -1 };

    pub fn new(di: i32, dj: i32) -> Movement {
        Movement { di, dj }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CnCell {
    pub st: StitchMark,
    pub av: Actualization,
    /// `None` only for cells no writer ever touched.
    pub mv: Option<Movement>,
}

impl CnCell {
    pub const EMPTY: CnCell = CnCell { st: StitchMark::None, av: Actualization::E, mv: None };
    pub const CAST_ON: CnCell =
        CnCell { st: StitchMark::None, av: Actualization::Pcn, mv: Some(Movement::ZERO) };

    pub fn new(st: StitchMark, av: Actualization, mv: Movement) -> CnCell {
        CnCell { st, av, mv: Some(mv) }
    }

    /// `Δi`, treating an untouched cell as stationary.
    pub fn di(&self) -> i32 {
        self.mv.map_or(0, |m| m.di)
    }

    pub fn dj(&self) -> i32 {
        self.mv.map_or(0, |m| m.dj)
    }
}

impl fmt::Display for CnCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mv {
            Some(mv) => write!(f, "({},{},[{},{}])", self.st.token(), self.av.token(), mv.di, mv.dj),
            None => write!(f, "({},{},[null,null])", self.st.token(), self.av.token()),
        }
    }
}

/// A CN grid location `(i, j)`; also the identity of the CN created there.
pub type Loc = (usize, usize);

/// Where a movement chain ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    Settled(Loc),
    /// The cell was never written; it holds no CN to move.
    NotInstantiated,
    /// The chain leaves the grid or cycles without reaching a knitted cell.
    Diverged,
}

impl Resolution {
    pub fn settled(self) -> Option<Loc> {
        match self {
            Resolution::Settled(loc) => Some(loc),
            _ => None,
        }
    }
}

/// Half-width of the neighborhood a CN can travel: three needles.
pub const REACH_I: usize = 6;
/// Rows a CN can be pulled upward.
pub const REACH_J: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnGrid {
    width: usize,
    height: usize,
    cells: Vec<CnCell>,
    pattern: StitchPattern,
}

impl CnGrid {
    /// A fresh grid: row 0 holds cast-on PCNs, everything else is Empty.
    pub fn allocate(pattern: &StitchPattern) -> CnGrid {
        let width = 2 * pattern.cols();
        let height = pattern.rows() + 1;
        let mut cells = vec![CnCell::EMPTY; width * height];
        cells[..width].fill(CnCell::CAST_ON);
        CnGrid { width, height, cells, pattern: pattern.clone() }
    }

    /// Allocates and populates in one go.
    pub fn build(pattern: &StitchPattern) -> Result<CnGrid> {
        let mut grid = CnGrid::allocate(pattern);
        grid.populate()?;
        Ok(grid)
    }

    /// Writes every stitch in knitting order: rows bottom-up, each row in
    /// the direction the carrier travels.
    pub fn populate(&mut self) -> Result<()> {
        for n in 0..self.pattern.rows() {
            for m in self.pattern.knitting_order(n) {
                self.apply_stitch(m, n)?;
            }
        }
        Ok(())
    }

    /// Writes one stitch instruction: lower pair first, then upper pair.
    pub fn apply_stitch(&mut self, m: usize, n: usize) -> Result<()> {
        let stitch = self.pattern.get(m, n);
        let pair = [2 * m, 2 * m + 1];
        match stitch {
            Stitch::Empty => {}
            Stitch::Knit | Stitch::Purl | Stitch::Transfer { .. } => {
                let mark = if stitch == Stitch::Purl { StitchMark::P } else { StitchMark::K };
                let shift = 2 * stitch.needle_shift();
                let mut held = [false; 2];
                for (k, &i) in pair.iter().enumerate() {
                    held[k] = self.knit_lower(i, n, mark)?;
                }
                for (k, &i) in pair.iter().enumerate() {
                    self.knit_upper(i, n, held[k], shift)?;
                }
            }
            Stitch::Tuck | Stitch::Miss => {
                for &i in &pair {
                    self.pull_up_lower(i, n)?;
                }
                let upper = if stitch == Stitch::Tuck {
                    CnCell::new(StitchMark::None, Actualization::Uacn, Movement::ZERO)
                } else {
                    CnCell::new(StitchMark::None, Actualization::E, Movement::DOWN)
                };
                for &i in &pair {
                    self.set(i, n + 1, upper);
                }
            }
        }
        Ok(())
    }

    /// Knit/Purl writer for one CN column of a stitch: the lower cell
    /// `(i, j)` and the upper cell `(i, j + 1)`.
    pub fn write_knit_purl(&mut self, i: usize, j: usize, mark: StitchMark) -> Result<()> {
        let held = self.knit_lower(i, j, mark)?;
        self.knit_upper(i, j, held, 0)
    }

    /// Transfer writer: a knit whose head CN is shifted by `di` CN columns.
    pub fn write_transfer(&mut self, i: usize, j: usize, mark: StitchMark, di: i32) -> Result<()> {
        let held = self.knit_lower(i, j, mark)?;
        self.knit_upper(i, j, held, di)
    }

    pub fn write_tuck(&mut self, i: usize, j: usize) -> Result<()> {
        self.pull_up_lower(i, j)?;
        self.set(i, j + 1, CnCell::new(StitchMark::None, Actualization::Uacn, Movement::ZERO));
        Ok(())
    }

    pub fn write_miss(&mut self, i: usize, j: usize) -> Result<()> {
        self.pull_up_lower(i, j)?;
        self.set(i, j + 1, CnCell::new(StitchMark::None, Actualization::E, Movement::DOWN));
        Ok(())
    }

    /// Lower cell of a Knit/Purl/Transfer. Returns whether a CN is held at
    /// `(i, j)` afterwards, which decides PCN vs UACN for the cell above.
    fn knit_lower(&mut self, i: usize, j: usize, mark: StitchMark) -> Result<bool> {
        let cell = self.cell(i, j);
        let av = match (cell.av, cell.mv) {
            // Knitting an Empty needle: nothing to actualize.
            (Actualization::E, None) => Actualization::E,
            (Actualization::E, Some(Movement { di: 0, dj: -1 })) => Actualization::E,
            (Actualization::Pcn, Some(Movement { di: 0, dj: 0 })) => Actualization::Acn,
            (Actualization::Pcn, Some(Movement { dj: 0, .. })) => Actualization::Pcn,
            // A transferred CN already actualized at its destination.
            (Actualization::Acn, Some(Movement { dj: 0, di })) if di != 0 => Actualization::Acn,
            (Actualization::Uacn, Some(Movement { dj: 0, .. })) => {
                if self.anchored_locally(i, j) {
                    Actualization::Acn
                } else {
                    Actualization::Uacn
                }
            }
            _ => return Err(conflict(i, j, "knit over a cell with no matching precondition")),
        };
        let mv = cell.mv.unwrap_or(Movement::ZERO);
        self.set(i, j, CnCell::new(mark, av, mv));
        let stays = av == Actualization::Acn && mv.di == 0;

        let mut moved_here = false;
        for loc in self.arrivals(i, j) {
            moved_here = true;
            let arriving = self.cell_mut(loc.0, loc.1);
            if arriving.av == Actualization::Pcn {
                arriving.av = Actualization::Acn;
            }
        }
        Ok(stays || moved_here)
    }

    fn knit_upper(&mut self, i: usize, j: usize, held: bool, di: i32) -> Result<()> {
        let target = i as isize + di as isize;
        if target < 0 || target >= self.width as isize {
            return Err(PopulationError::TransferOutOfBounds { i, j: j + 1, shift: di }.into());
        }
        let av = if held { Actualization::Pcn } else { Actualization::Uacn };
        self.set(i, j + 1, CnCell::new(StitchMark::None, av, Movement::new(di, 0)));
        Ok(())
    }

    /// Lower cell of a Tuck or Miss: the held CN is pulled up one row.
    fn pull_up_lower(&mut self, i: usize, j: usize) -> Result<()> {
        let cell = self.cell(i, j);
        match (cell.av, cell.mv) {
            (Actualization::Pcn | Actualization::Uacn, Some(Movement { di, dj: 0 })) => {
                self.set(i, j, CnCell::new(cell.st, cell.av, Movement::new(di, 1)));
                Ok(())
            }
            // The needle was emptied by a transfer that has already landed.
            (Actualization::Acn, Some(Movement { di, dj: 0 })) if di != 0 => {
                self.set(i, j, CnCell::new(cell.st, cell.av, Movement::new(di, 1)));
                Ok(())
            }
            (Actualization::E, Some(Movement { di: 0, dj: -1 })) => self.propagate_miss_column(i, j),
            _ => Err(conflict(i, j, "tuck/miss over a cell with no matching precondition")),
        }
    }

    /// A Tuck or Miss above a Miss pulls the held loop one more row: the
    /// first pulled-up cell below `(i, j)` gains one unit of `Δj`.
    pub fn propagate_miss_column(&mut self, i: usize, j: usize) -> Result<()> {
        for below in (0..j).rev() {
            let cell = self.cell_mut(i, below);
            if let Some(mv) = cell.mv.as_mut() {
                if mv.dj >= 1 {
                    mv.dj += 1;
                    return Ok(());
                }
            }
        }
        Err(PopulationError::NoPositiveDeltaJBelow { i, j }.into())
    }

    /// A UACN is anchored after all if a diagonal neighbor one row down is an
    /// ACN that stayed where it was made.
    pub fn anchored_locally(&self, i: usize, j: usize) -> bool {
        if j == 0 {
            return false;
        }
        [i.checked_sub(1), i.checked_add(1)].into_iter().flatten().filter(|&x| x < self.width).any(|x| {
            self.cell(x, j - 1).av == Actualization::Acn
                && self.resolve(x, j - 1) == Resolution::Settled((x, j - 1))
        })
    }

    /// CNs other than the one created at `(i, j)` whose movement chain
    /// currently ends at `(i, j)`.
    fn arrivals(&self, i: usize, j: usize) -> Vec<Loc> {
        self.neighborhood(i, j)
            .filter(|&loc| loc != (i, j))
            .filter(|&(x, y)| self.cell(x, y).av.is_cn())
            .filter(|&(x, y)| self.resolve(x, y) == Resolution::Settled((i, j)))
            .collect()
    }

    /// Every location within reach of `(i, j)`: columns `i ± 6`, rows
    /// `j - 3 ..= j`, clipped to the grid.
    pub fn neighborhood(&self, i: usize, j: usize) -> impl Iterator<Item = Loc> {
        let i_lo = i.saturating_sub(REACH_I);
        let i_hi = (i + REACH_I).min(self.width - 1);
        let j_lo = j.saturating_sub(REACH_J);
        (j_lo..=j).flat_map(move |y| (i_lo..=i_hi).map(move |x| (x, y)))
    }

    /// Follows the movement chain of the CN created at `(i, j)`: one
    /// horizontal hop if it has one, then vertical hops until a cell that
    /// carries a stitch mark. CNs in the last row never move.
    pub fn resolve(&self, i: usize, j: usize) -> Resolution {
        let last = self.last_row();
        if j == last {
            return Resolution::Settled((i, j));
        }
        let cell = self.cell(i, j);
        let Some(mv) = cell.mv else {
            return Resolution::NotInstantiated;
        };
        let (x, y) = if mv.di != 0 {
            (i as isize + mv.di as isize, j as isize)
        } else {
            (i as isize, j as isize + mv.dj as isize)
        };
        self.resolve_from(x, y)
    }

    fn resolve_from(&self, x: isize, mut y: isize) -> Resolution {
        let last = self.last_row() as isize;
        // Recent rows visited: a Tuck/Miss stack still waiting for its
        // closing row cycles through a handful of cells.
        let mut seen = [isize::MIN; 16];
        for step in 0..=2 * self.height + 2 {
            if x < 0 || y < 0 || x >= self.width as isize || y > last || seen.contains(&y) {
                return Resolution::Diverged;
            }
            seen[step % seen.len()] = y;
            let loc = (x as usize, y as usize);
            let cell = self.cell(loc.0, loc.1);
            if cell.st.actualizes() || y == last {
                return Resolution::Settled(loc);
            }
            match cell.mv {
                Some(mv) if mv.dj != 0 => y += mv.dj as isize,
                _ => return Resolution::Diverged,
            }
        }
        Resolution::Diverged
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn last_row(&self) -> usize {
        self.height - 1
    }

    pub fn pattern(&self) -> &StitchPattern {
        &self.pattern
    }

    pub fn contains(&self, i: isize, j: isize) -> bool {
        i >= 0 && j >= 0 && (i as usize) < self.width && (j as usize) < self.height
    }

    pub fn cell(&self, i: usize, j: usize) -> CnCell {
        self.cells[j * self.width + i]
    }

    pub fn cells(&self) -> impl Iterator<Item = (Loc, CnCell)> + '_ {
        self.cells.iter().enumerate().map(|(k, c)| ((k % self.width, k / self.width), *c))
    }

    fn cell_mut(&mut self, i: usize, j: usize) -> &mut CnCell {
        &mut self.cells[j * self.width + i]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, cell: CnCell) {
        self.cells[j * self.width + i] = cell;
    }

    pub(crate) fn set_av(&mut self, i: usize, j: usize, av: Actualization) {
        self.cell_mut(i, j).av = av;
    }

    /// One line per CN row, top row first, cells joined by ` | `.
    /// Cells that differ from `other`, as `(loc, ours, theirs)`. Grids of
    /// different shape compare over the common region.
    pub fn diff(&self, other: &CnGrid) -> Vec<(Loc, CnCell, CnCell)> {
        let mut out = Vec::new();
        for j in 0..self.height.min(other.height) {
            for i in 0..self.width.min(other.width) {
                let (a, b) = (self.cell(i, j), other.cell(i, j));
                if a != b {
                    out.push(((i, j), a, b));
                }
            }
        }
        out
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for j in (0..self.height).rev() {
            let row: Vec<String> = (0..self.width).map(|i| self.cell(i, j).to_string()).collect();
            out.push_str(&row.join(" | "));
            out.push('\n');
        }
        out
    }
}

fn conflict(i: usize, j: usize, reason: &'static str) -> crate::error::Error {
    PopulationError::PopulationConflict { i, j, reason }.into()
}

//! Yarn tracing and the two on-demand location queries.
//!
//! The yarn is walked in the all-Knit "square wave" order: for every stitch
//! the first leg, both head CNs, then the second leg, row by row in the
//! carrier's direction. A visited location joins the yarn path only if the
//! yarn really touches something there; everything else is skipped.

use serde::Serialize;

use crate::error::{EvalError, Result};
use crate::grid::{Actualization, CnGrid, Loc, Movement, Resolution};

/// One location along the yarn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct YarnPathEntry {
    pub i: usize,
    pub j: usize,
    #[serde(rename = "stitchRow")]
    pub stitch_row: usize,
}

impl YarnPathEntry {
    pub fn loc(&self) -> Loc {
        (self.i, self.j)
    }

    /// Legs sit on the stitch row they belong to, heads one row above.
    pub fn is_leg(&self) -> bool {
        self.j == self.stitch_row
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct YarnPath {
    pub entries: Vec<YarnPathEntry>,
}

impl YarnPath {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, YarnPathEntry> {
        self.entries.iter()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("path serializes")
    }
}

/// Position of the square-wave walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WaveCursor {
    pub i: usize,
    pub j: usize,
    pub leg: bool,
    pub stitch_row: usize,
}

impl WaveCursor {
    pub const START: WaveCursor = WaveCursor { i: 0, j: 0, leg: true, stitch_row: 0 };
}

/// True when the cursor is the trailing leg of its row and the yarn turns
/// up to the next row.
pub fn border_cn(width: usize, i: usize, j: usize, leg: bool) -> bool {
    leg && if j.is_multiple_of(2) { i == width - 1 } else { i == 0 }
}

/// Next location of the all-Knit yarn for a cursor that is not on a border.
///
/// Left to right, stitch pair `(a, a + 1)` is visited as leg `(a, r)`,
/// head `(a, r + 1)`, head `(a + 1, r + 1)`, leg `(a + 1, r)`. Right to
/// left mirrors it starting from `a + 1`.
pub fn square_wave(i: usize, j: usize, leg: bool, stitch_row: usize) -> (usize, usize) {
    let first_of_pair = if stitch_row.is_multiple_of(2) { i.is_multiple_of(2) } else { i % 2 == 1 };
    let step = |i: usize| if stitch_row.is_multiple_of(2) { i + 1 } else { i - 1 };
    match (leg, first_of_pair) {
        (true, true) => (i, j + 1),
        (true, false) => (step(i), j),
        (false, true) => (step(i), j),
        (false, false) => (i, j - 1),
    }
}

pub fn next_cn(width: usize, c: WaveCursor) -> WaveCursor {
    if border_cn(width, c.i, c.j, c.leg) {
        return WaveCursor { i: c.i, j: c.j + 1, leg: true, stitch_row: c.stitch_row + 1 };
    }
    let (i, j) = square_wave(c.i, c.j, c.leg, c.stitch_row);
    WaveCursor { i, j, leg: j == c.stitch_row, stitch_row: c.stitch_row }
}

/// Where the CN created at `(i, j)` ends up.
pub fn final_location(g: &CnGrid, i: usize, j: usize) -> Result<Loc> {
    match g.resolve(i, j) {
        Resolution::Settled(loc) => Ok(loc),
        // Untouched cells hold nothing that could move.
        Resolution::NotInstantiated => Ok((i, j)),
        Resolution::Diverged => Err(EvalError::EvaluationDiverged { i, j }.into()),
    }
}

/// Every actualized CN whose final location is `(i, j)`.
pub fn acns_at(g: &CnGrid, i: usize, j: usize) -> Vec<Loc> {
    g.neighborhood(i, j)
        .filter(|&(x, y)| g.cell(x, y).av == Actualization::Acn)
        .filter(|&(x, y)| g.resolve(x, y) == Resolution::Settled((i, j)))
        .collect()
}

/// Traces the yarn through a populated grid.
///
/// UACN heads that turn out to be anchored further along the yarn are
/// promoted in place (to PCN in the last row, ACN elsewhere); no other cell
/// is modified.
pub fn follow_the_yarn(g: &mut CnGrid) -> Result<YarnPath> {
    let rows = g.pattern().rows();
    let width = g.width();
    let mut path = YarnPath::default();
    let mut cursor = WaveCursor::START;
    while cursor.stitch_row < rows {
        if add_to_list(g, cursor, &path)? {
            let loc = if cursor.leg { (cursor.i, cursor.j) } else { final_location(g, cursor.i, cursor.j)? };
            path.entries.push(YarnPathEntry { i: loc.0, j: loc.1, stitch_row: cursor.stitch_row });
        }
        cursor = next_cn(width, cursor);
    }
    Ok(path)
}

/// Decides whether the CN under the cursor belongs on the yarn path.
pub fn add_to_list(g: &mut CnGrid, c: WaveCursor, path: &YarnPath) -> Result<bool> {
    if c.leg {
        return Ok(is_contact(g, (c.i, c.j)));
    }
    match g.cell(c.i, c.j).av {
        Actualization::E => Ok(false),
        Actualization::Pcn | Actualization::Acn => Ok(true),
        Actualization::Uacn => {
            let neighbor = if c.i.is_multiple_of(2) == (c.j % 2 == 1) {
                last_contact(g, path)
            } else {
                next_contact(g, c)?
            };
            let (_, final_j) = final_location(g, c.i, c.j)?;
            match neighbor {
                Some((_, n)) if n < final_j => {
                    let promoted = if c.j == g.last_row() { Actualization::Pcn } else { Actualization::Acn };
                    g.set_av(c.i, c.j, promoted);
                    Ok(true)
                }
                _ => Ok(false),
            }
        }
    }
}

/// Does the path entry mark a real crossing (as opposed to a free loop head)?
pub fn is_contact(g: &CnGrid, loc: Loc) -> bool {
    g.neighborhood(loc.0, loc.1)
        .any(|(x, y)| g.cell(x, y).av == Actualization::Acn && g.resolve(x, y) == Resolution::Settled(loc))
}

/// The yarn behind the cursor: latest path entry that is a crossing.
fn last_contact(g: &CnGrid, path: &YarnPath) -> Option<Loc> {
    path.entries.iter().rev().map(YarnPathEntry::loc).find(|&loc| is_contact(g, loc))
}

/// The yarn ahead of the cursor: the next location the walk would add that
/// is a crossing. Pending UACN heads are not candidates.
fn next_contact(g: &CnGrid, from: WaveCursor) -> Result<Option<Loc>> {
    let rows = g.pattern().rows();
    let mut c = next_cn(g.width(), from);
    while c.stitch_row < rows {
        let candidate = if c.leg {
            Some((c.i, c.j))
        } else {
            match g.cell(c.i, c.j).av {
                Actualization::Pcn | Actualization::Acn => Some(final_location(g, c.i, c.j)?),
                _ => None,
            }
        };
        if let Some(loc) = candidate {
            if is_contact(g, loc) {
                return Ok(Some(loc));
            }
        }
        c = next_cn(g.width(), c);
    }
    Ok(None)
}

/// Path entries whose location holds at least one ACN, in yarn order.
pub fn contact_trace(g: &CnGrid, path: &YarnPath) -> Vec<YarnPathEntry> {
    path.iter().copied().filter(|e| is_contact(g, e.loc())).collect()
}

/// Populates and traces in one step.
pub fn evaluate(pattern: &crate::pattern::StitchPattern) -> Result<(CnGrid, YarnPath)> {
    let mut grid = CnGrid::build(pattern)?;
    let path = follow_the_yarn(&mut grid)?;
    Ok((grid, path))
}

/// Head CNs below the top row whose final location holds no ACN, i.e. loop
/// heads nothing was pulled through.
pub fn heads_without_contact(g: &CnGrid) -> Vec<Loc> {
    g.cells()
        .filter(|&((_, j), cell)| j > 0 && j < g.last_row() && cell.av.is_cn())
        .filter(|&((i, j), _)| match g.resolve(i, j) {
            Resolution::Settled((x, y)) => !is_contact(g, (x, y)),
            _ => true,
        })
        .map(|(loc, _)| loc)
        .collect()
}

/// A CN that moved further than a loop can stretch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StretchViolation {
    pub cn: Loc,
    pub final_location: Loc,
}

/// Checks every CN against the reach limits: three needles sideways, three
/// rows up, never down.
pub fn stretch_violations(g: &CnGrid) -> Vec<StretchViolation> {
    g.cells()
        .filter(|(_, cell)| cell.av.is_cn() && cell.mv.is_some())
        .filter_map(|((i, j), _)| {
            let (fi, fj) = match g.resolve(i, j) {
                Resolution::Settled(loc) => loc,
                // Never written, or parked on a needle that stays out of work.
                Resolution::NotInstantiated => return None,
                Resolution::Diverged if g.cell(i, j).mv == Some(Movement::default()) => return None,
                Resolution::Diverged => return Some(StretchViolation { cn: (i, j), final_location: (i, j) }),
            };
            let di = fi.abs_diff(i);
            let ok = di <= crate::grid::REACH_I && fj >= j && fj - j <= crate::grid::REACH_J;
            (!ok).then_some(StretchViolation { cn: (i, j), final_location: (fi, fj) })
        })
        .collect()
}

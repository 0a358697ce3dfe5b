//! A second, independent way to get the same answer.
//!
//! Instead of movement vectors and chain resolution, this simulates the
//! needle bed: every needle holds a stack of loops, loops are physically
//! moved by transfers and left in place by tucks and misses, and a loop's
//! final location is simply where it is standing when a new loop is pulled
//! through it. The anchoring rules for loose loops are the same ones the
//! grid uses; everything positional is worked out from scratch.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::pattern::{Stitch, StitchPattern};

pub type Loc = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LoopState {
    Potential,
    Anchored,
    Loose,
}

/// Half of a loop head; each loop contributes a left and a right half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HalfLoop {
    /// Cell the half was created at.
    pub origin: Loc,
    pub state: LoopState,
    pub transferred: bool,
    /// Where a loop was pulled through it, or where it rests at the end.
    pub rest: Option<Loc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TracePoint {
    pub i: usize,
    pub j: usize,
    pub stitch_row: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Simulation {
    pub halves: Vec<HalfLoop>,
    /// Every location the yarn was found to touch, in yarn order.
    pub path: Vec<TracePoint>,
    /// `path` restricted to locations holding at least one anchored half.
    pub contacts: Vec<TracePoint>,
}

impl Simulation {
    pub fn anchored_at(&self, loc: Loc) -> usize {
        self.halves.iter().filter(|h| h.rest == Some(loc) && h.state == LoopState::Anchored).count()
    }
}

struct Bed {
    rows: usize,
    halves: Vec<HalfLoop>,
    by_origin: HashMap<Loc, usize>,
    needles: Vec<Vec<[usize; 2]>>,
    /// Halves anchored where they were made.
    anchored_in_place: HashSet<Loc>,
}

impl Bed {
    fn new(cols: usize, rows: usize) -> Bed {
        let mut bed = Bed {
            rows,
            halves: Vec::new(),
            by_origin: HashMap::new(),
            needles: vec![Vec::new(); cols],
            anchored_in_place: HashSet::new(),
        };
        for k in 0..cols {
            let lp = bed.new_loop(k, 0, LoopState::Potential);
            bed.needles[k].push(lp);
        }
        bed
    }

    fn new_loop(&mut self, needle: usize, row: usize, state: LoopState) -> [usize; 2] {
        [0, 1].map(|h| {
            let origin = (2 * needle + h, row);
            self.halves.push(HalfLoop { origin, state, transferred: false, rest: None });
            self.by_origin.insert(origin, self.halves.len() - 1);
            self.halves.len() - 1
        })
    }

    fn anchored_nearby(&self, i: usize, n: usize) -> bool {
        n > 0 && [i.wrapping_sub(1), i + 1].iter().any(|&x| self.anchored_in_place.contains(&(x, n - 1)))
    }

    /// Pull a new loop through everything on needle `m`.
    fn knit(&mut self, m: usize, n: usize, shift: i32, moves: &mut Vec<([usize; 2], usize)>) {
        let stack = std::mem::take(&mut self.needles[m]);
        let mut holds = [false; 2];
        for (h, hold) in holds.iter_mut().enumerate() {
            let i = 2 * m + h;
            let mut native_stays = false;
            let native = self.by_origin.get(&(i, n)).copied();
            if let Some(id) = native {
                let half = self.halves[id];
                let state = match (half.state, half.transferred) {
                    (LoopState::Potential, false) => LoopState::Anchored,
                    (LoopState::Loose, _) if self.anchored_nearby(i, n) => LoopState::Anchored,
                    (s, _) => s,
                };
                self.halves[id].state = state;
                if !half.transferred && state == LoopState::Anchored {
                    self.anchored_in_place.insert((i, n));
                    native_stays = true;
                }
            }
            let mut arrived = false;
            for lp in &stack {
                let id = lp[h];
                self.halves[id].rest = Some((i, n));
                if Some(id) == native {
                    continue;
                }
                arrived = true;
                if self.halves[id].state == LoopState::Potential {
                    self.halves[id].state = LoopState::Anchored;
                }
            }
            *hold = native_stays || arrived;
        }
        let lp = [0, 1].map(|h| {
            let state = if holds[h] { LoopState::Potential } else { LoopState::Loose };
            let origin = (2 * m + h, n + 1);
            self.halves.push(HalfLoop { origin, state, transferred: false, rest: None });
            self.by_origin.insert(origin, self.halves.len() - 1);
            self.halves.len() - 1
        });
        if shift != 0 && n + 1 < self.rows {
            for id in lp {
                self.halves[id].transferred = true;
            }
            moves.push((lp, (m as i32 + shift) as usize));
        } else {
            self.needles[m].push(lp);
        }
    }
}

/// Runs the pattern on a simulated needle bed and traces the yarn.
pub fn simulate(pattern: &StitchPattern) -> Simulation {
    let (cols, rows) = (pattern.cols(), pattern.rows());
    let mut bed = Bed::new(cols, rows);
    for n in 0..rows {
        let mut moves = Vec::new();
        for m in pattern.knitting_order(n) {
            match pattern.get(m, n) {
                Stitch::Empty | Stitch::Miss => {}
                Stitch::Tuck => {
                    let lp = bed.new_loop(m, n + 1, LoopState::Loose);
                    bed.needles[m].push(lp);
                }
                s => {
                    let shift = s.needle_shift();
                    if m as i32 + shift < 0 || m as i32 + shift >= cols as i32 {
                        // Off the bed: leave it on its own needle.
                        bed.knit(m, n, 0, &mut moves);
                    } else {
                        bed.knit(m, n, shift, &mut moves);
                    }
                }
            }
        }
        for (lp, dest) in moves {
            bed.needles[dest].push(lp);
        }
    }
    for (k, stack) in bed.needles.iter().enumerate() {
        for lp in stack {
            for (h, &id) in lp.iter().enumerate() {
                let half = &mut bed.halves[id];
                half.rest = Some(if half.origin.1 == rows { half.origin } else { (2 * k + h, rows) });
            }
        }
    }
    let mut sim = Simulation { halves: bed.halves, ..Default::default() };
    let by_origin = bed.by_origin;
    walk(pattern, &mut sim, &by_origin);
    sim
}

#[derive(Clone, Copy)]
enum Point {
    Leg(Loc),
    Head(Loc),
}

fn yarn_points(pattern: &StitchPattern) -> Vec<(Point, usize)> {
    let mut out = Vec::new();
    for n in 0..pattern.rows() {
        for m in pattern.knitting_order(n) {
            let (a, b) = if n % 2 == 0 { (2 * m, 2 * m + 1) } else { (2 * m + 1, 2 * m) };
            out.push((Point::Leg((a, n)), n));
            out.push((Point::Head((a, n + 1)), n));
            out.push((Point::Head((b, n + 1)), n));
            out.push((Point::Leg((b, n)), n));
        }
    }
    out
}

fn walk(pattern: &StitchPattern, sim: &mut Simulation, by_origin: &HashMap<Loc, usize>) {
    let top = pattern.rows();
    let mut anchored: BTreeMap<Loc, usize> = BTreeMap::new();
    for h in &sim.halves {
        if h.state == LoopState::Anchored {
            *anchored.entry(h.rest.expect("every half rests")).or_default() += 1;
        }
    }
    let is_contact = |a: &BTreeMap<Loc, usize>, loc: Loc| a.get(&loc).is_some_and(|&c| c > 0);
    let points = yarn_points(pattern);
    let mut path: Vec<TracePoint> = Vec::new();
    for (k, &(point, row)) in points.iter().enumerate() {
        let loc = match point {
            Point::Leg(loc) => is_contact(&anchored, loc).then_some(loc),
            Point::Head(cell) => {
                let Some(&id) = by_origin.get(&cell) else { continue };
                let half = sim.halves[id];
                let rest = half.rest.expect("every half rests");
                match half.state {
                    LoopState::Potential | LoopState::Anchored => Some(rest),
                    LoopState::Loose => {
                        let looks_back = (cell.0 % 2 == 0) == (cell.1 % 2 == 1);
                        let neighbor = if looks_back {
                            path.iter().rev().map(|p| (p.i, p.j)).find(|&l| is_contact(&anchored, l))
                        } else {
                            points[k + 1..].iter().find_map(|&(p, _)| {
                                let cand = match p {
                                    Point::Leg(l) => Some(l),
                                    Point::Head(c) => by_origin.get(&c).and_then(|&id| {
                                        let h = sim.halves[id];
                                        (h.state != LoopState::Loose).then(|| h.rest.unwrap())
                                    }),
                                };
                                cand.filter(|&l| is_contact(&anchored, l))
                            })
                        };
                        match neighbor {
                            Some((_, nj)) if nj < rest.1 => {
                                if cell.1 == top {
                                    sim.halves[id].state = LoopState::Potential;
                                } else {
                                    sim.halves[id].state = LoopState::Anchored;
                                    *anchored.entry(rest).or_default() += 1;
                                }
                                Some(rest)
                            }
                            _ => None,
                        }
                    }
                }
            }
        };
        if let Some((i, j)) = loc {
            path.push(TracePoint { i, j, stitch_row: row });
        }
    }
    sim.contacts = path.iter().copied().filter(|p| is_contact(&anchored, (p.i, p.j))).collect();
    sim.path = path;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Agreement {
    /// Same locations in the same order.
    Exact,
    /// Same set of locations within every stitch row.
    PerRow,
    Differ,
}

impl Agreement {
    pub fn agrees(self) -> bool {
        self != Agreement::Differ
    }
}

pub fn compare(a: &[TracePoint], b: &[TracePoint]) -> Agreement {
    if a == b {
        return Agreement::Exact;
    }
    let rows = |t: &[TracePoint]| {
        let mut by_row: BTreeMap<usize, std::collections::BTreeSet<Loc>> = BTreeMap::new();
        for p in t {
            by_row.entry(p.stitch_row).or_default().insert((p.i, p.j));
        }
        by_row
    };
    if rows(a) == rows(b) {
        Agreement::PerRow
    } else {
        Agreement::Differ
    }
}

/// Outcome of running both the grid evaluator and the simulator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Differential {
    pub agreement: Agreement,
    pub evaluator: Vec<TracePoint>,
    pub oracle: Vec<TracePoint>,
}

pub fn differential(pattern: &StitchPattern) -> crate::Result<Differential> {
    let (grid, path) = crate::eval::evaluate(pattern)?;
    let evaluator: Vec<TracePoint> = crate::eval::contact_trace(&grid, &path)
        .into_iter()
        .map(|e| TracePoint { i: e.i, j: e.j, stitch_row: e.stitch_row })
        .collect();
    let oracle = simulate(pattern).contacts;
    Ok(Differential { agreement: compare(&evaluator, &oracle), evaluator, oracle })
}

//! Seeded random patterns for differential and property suites.
//!
//! A pattern is a 5×5 randomized block framed by one stitch of Knit on every
//! side, so boundary rules always hold and only the interior is exercised.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pattern::{validate, Direction, Stitch, StitchPattern};

pub const BLOCK: usize = 5;
pub const FRAMED: usize = BLOCK + 2;

/// Which interior cells are randomized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Template {
    /// Every interior cell.
    Full,
    /// Interior cells on one color of a checkerboard; the rest stay Knit.
    Checker,
}

impl Template {
    fn picks(self, m: usize, n: usize) -> bool {
        match self {
            Template::Full => true,
            Template::Checker => (m + n).is_multiple_of(2),
        }
    }
}

pub const VOCABULARY: [Stitch; 5] = [
    Stitch::Knit,
    Stitch::Transfer { direction: Direction::Right, magnitude: 1 },
    Stitch::Transfer { direction: Direction::Left, magnitude: 1 },
    Stitch::Tuck,
    Stitch::Miss,
];

/// Draws until the pattern validates. Same seed, same pattern.
pub fn random_pattern(seed: u64, template: Template) -> StitchPattern {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let p = draw(&mut rng, template);
        if validate(&p).ok {
            return p;
        }
    }
}

fn draw(rng: &mut impl Rng, template: Template) -> StitchPattern {
    let mut p = StitchPattern::filled(FRAMED, FRAMED, Stitch::Knit).expect("non-empty");
    for n in 1..=BLOCK {
        for m in 1..=BLOCK {
            if template.picks(m, n) {
                p.set(m, n, *VOCABULARY.choose(rng).expect("non-empty"));
            }
        }
    }
    p
}

/// `count` patterns, alternating templates, seeded from `base`.
pub fn suite(base: u64, count: usize) -> Vec<StitchPattern> {
    (0..count as u64)
        .map(|k| {
            let template = if k.is_multiple_of(2) { Template::Full } else { Template::Checker };
            random_pattern(base.wrapping_add(k), template)
        })
        .collect()
}

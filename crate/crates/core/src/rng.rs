//! The single seeded random stream of a game.
//!
//! Algorithm: ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed with
//! `seed_from_u64(seed)`. Rules draws use stream 0; text selection for a room
//! uses stream 1 of the same key, so picking a text never perturbs the rules
//! stream. Bounded integers come from `Rng::gen_range` and shuffles from
//! `SliceRandom::shuffle` (Fisher-Yates), both from `rand` 0.8.
//!
//! Draw order within a game:
//! 1. `new_game`: shuffle the event deck, then the power deck.
//! 2. `draw_task`: strategy index in 0..5, then point-value index.
//! 3. each reroll: one index among the remaining alternatives.
//! 4. `roll_and_move`: one draw in 1..=6 per die.
//! 5. reshuffles of an exhausted deck, at the moment a draw needs them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const RULES_STREAM: u64 = 0;
const TEXT_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GameRng(ChaCha8Rng);

impl GameRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, RULES_STREAM)
    }

    /// Stream used to choose texts for the game seeded with `seed`.
    pub fn text_stream(seed: u64) -> Self {
        Self::with_stream(seed, TEXT_STREAM)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        GameRng(rng)
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n)
    }

    pub fn die(&mut self) -> u8 {
        self.0.gen_range(1..=6)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.0);
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.gen()
    }
}

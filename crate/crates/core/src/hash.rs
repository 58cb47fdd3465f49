//! Canonical 64-bit state hash.
//!
//! The hash is FNV-1a (64-bit, offset basis `0xcbf29ce484222325`, prime
//! `0x100000001b3`) over the compact JSON serialization of the value. Every
//! collection in [`GameState`] is a `Vec`, `BTreeMap` or `BTreeSet` and
//! structs serialize fields in declaration order, so the byte string is
//! canonical.

use serde::Serialize;

use crate::game::GameState;

const OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
const PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(OFFSET_BASIS, |h, b| (h ^ *b as u64).wrapping_mul(PRIME))
}

pub fn canonical_hash<T: Serialize>(value: &T) -> u64 {
    let bytes = serde_json::to_vec(value).expect("game values always serialize");
    fnv1a64(&bytes)
}

/// Hash of a game state as 16 lowercase hex digits.
pub fn state_hash(state: &GameState) -> String {
    format!("{:016x}", canonical_hash(state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::tests::game;

    #[test]
    fn fnv_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn equal_states_hash_equal() {
        assert_eq!(state_hash(&game(3, 5)), state_hash(&game(3, 5)));
        assert_ne!(state_hash(&game(3, 5)), state_hash(&game(3, 6)));
        assert_eq!(state_hash(&game(4, 5)).len(), 16);
    }
}

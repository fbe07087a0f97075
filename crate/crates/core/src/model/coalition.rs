use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Zero-based index of a base player. Displayed one-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Player(pub usize);

impl Player {
    pub fn index(self) -> usize {
        self.0
    }

    /// The one-based number used in game files and rendered output.
    pub fn number(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Maximum number of base players a game may declare.
pub const MAX_PLAYERS: usize = 64;

/// A nonempty set of base players, stored as a bitmask.
///
/// `Ord` is the canonical coalition order: size ascending, then
/// lexicographic on the sorted member list. Every tie-break between
/// coalitions goes through this order.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Coalition(u64);

impl Coalition {
    pub fn singleton(p: Player) -> Self {
        assert!(p.0 < MAX_PLAYERS, "player index out of range");
        Coalition(1 << p.0)
    }

    /// Builds a coalition from members; `None` when empty or out of range.
    pub fn from_players<I: IntoIterator<Item = Player>>(players: I) -> Option<Self> {
        let mut bits = 0u64;
        for p in players {
            if p.0 >= MAX_PLAYERS {
                return None;
            }
            bits |= 1 << p.0;
        }
        (bits != 0).then_some(Coalition(bits))
    }

    /// The grand coalition over `n` players.
    pub fn grand(n: usize) -> Self {
        assert!(n > 0 && n <= MAX_PLAYERS);
        if n == MAX_PLAYERS {
            Coalition(u64::MAX)
        } else {
            Coalition((1u64 << n) - 1)
        }
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_singleton(self) -> bool {
        self.len() == 1
    }

    pub fn contains(self, p: Player) -> bool {
        p.0 < MAX_PLAYERS && self.0 & (1 << p.0) != 0
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Coalition) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Coalition) -> Coalition {
        Coalition(self.0 | other.0)
    }

    /// Members in ascending order.
    pub fn members(self) -> impl Iterator<Item = Player> {
        let bits = self.0;
        (0..MAX_PLAYERS).filter(move |i| bits & (1 << i) != 0).map(Player)
    }

    pub fn min_member(self) -> Player {
        Player(self.0.trailing_zeros() as usize)
    }
}

impl Ord for Coalition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.members().cmp(other.members()))
    }
}

impl PartialOrd for Coalition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Singletons render as a bare number, larger coalitions as `{1,3}`.
impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_singleton() {
            return write!(f, "{}", self.min_member());
        }
        f.write_str("{")?;
        for (k, p) in self.members().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.members().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Coalition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.members().map(|p| p.number()))
    }
}

impl<'de> Deserialize<'de> for Coalition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let numbers = Vec::<usize>::deserialize(d)?;
        if numbers.contains(&0) {
            return Err(serde::de::Error::custom("players are numbered from 1"));
        }
        Coalition::from_players(numbers.into_iter().map(|n| Player(n - 1)))
            .ok_or_else(|| serde::de::Error::custom("coalition must be nonempty"))
    }
}

/// Pairwise-disjoint coalitions covering all base players.
///
/// Blocks are kept sorted by smallest member, so equal partitions compare
/// and hash equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Coalition>,
}

impl Partition {
    /// Every player independent.
    pub fn singletons(n: usize) -> Self {
        Partition { blocks: (0..n).map(|i| Coalition::singleton(Player(i))).collect() }
    }

    /// `P_C`: the members of `c` merged, everyone else alone.
    pub fn merged(n: usize, c: Coalition) -> Self {
        Self::singletons(n).merge(c)
    }

    /// Validates disjointness and coverage of `0..n`.
    pub fn from_blocks(n: usize, blocks: Vec<Coalition>) -> Option<Self> {
        let mut seen = 0u64;
        for b in &blocks {
            if b.bits() & seen != 0 {
                return None;
            }
            seen |= b.bits();
        }
        if n == 0 || seen != Coalition::grand(n).bits() {
            return None;
        }
        let mut blocks = blocks;
        blocks.sort_by_key(|b| b.min_member());
        Some(Partition { blocks })
    }

    pub fn blocks(&self) -> &[Coalition] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn player_count(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// The block containing `p`.
    pub fn block_of(&self, p: Player) -> Coalition {
        *self.blocks.iter().find(|b| b.contains(p)).expect("partition covers every player")
    }

    /// The block that contains every member of `c`, if one exists.
    pub fn block_containing(&self, c: Coalition) -> Option<Coalition> {
        self.blocks.iter().copied().find(|b| c.is_subset_of(*b))
    }

    /// Merges every block that intersects `c` into a single block.
    pub fn merge(&self, c: Coalition) -> Partition {
        let mut merged = c;
        let mut rest = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            if b.is_disjoint(c) {
                rest.push(*b);
            } else {
                merged = merged.union(*b);
            }
        }
        rest.push(merged);
        rest.sort_by_key(|b| b.min_member());
        Partition { blocks: rest }
    }

    pub fn non_singleton_blocks(&self) -> impl Iterator<Item = Coalition> + '_ {
        self.blocks.iter().copied().filter(|b| !b.is_singleton())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.blocks.iter()).finish()
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.blocks.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(members: &[usize]) -> Coalition {
        Coalition::from_players(members.iter().map(|&m| Player(m - 1))).unwrap()
    }

    #[test]
    fn canonical_order_is_size_then_lexicographic() {
        let mut v = vec![c(&[1, 2, 3]), c(&[2, 3]), c(&[1]), c(&[1, 3]), c(&[1, 2])];
        v.sort();
        assert_eq!(v, vec![c(&[1]), c(&[1, 2]), c(&[1, 3]), c(&[2, 3]), c(&[1, 2, 3])]);
    }

    #[test]
    fn display_matches_bracket_notation() {
        assert_eq!(c(&[2]).to_string(), "2");
        assert_eq!(c(&[1, 3]).to_string(), "{1,3}");
        assert_eq!(Partition::merged(3, c(&[1, 3])).to_string(), "{1,3},2");
    }

    #[test]
    fn merge_absorbs_intersecting_blocks() {
        let p = Partition::merged(4, c(&[1, 2]));
        let q = p.merge(c(&[2, 4]));
        assert_eq!(q.blocks(), &[c(&[1, 2, 4]), c(&[3])]);
        assert_eq!(q.block_containing(c(&[1, 4])), Some(c(&[1, 2, 4])));
        assert_eq!(q.block_containing(c(&[1, 3])), None);
    }

    #[test]
    fn from_blocks_rejects_overlap_and_gaps() {
        assert!(Partition::from_blocks(3, vec![c(&[1, 2]), c(&[2, 3])]).is_none());
        assert!(Partition::from_blocks(3, vec![c(&[1, 2])]).is_none());
        assert!(Partition::from_blocks(3, vec![c(&[3]), c(&[1, 2])]).is_some());
    }

    #[test]
    fn empty_coalition_is_rejected() {
        assert!(Coalition::from_players(std::iter::empty()).is_none());
    }
}

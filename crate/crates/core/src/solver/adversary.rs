use crate::game::ProbePartition;

use super::SolvedStates;

/// Deterministic omniscient-robber answer.
///
/// Classes outside the cop-winning region are preferred, largest first;
/// when every class is winning the answer with the highest rank is taken,
/// then the largest. Remaining ties go to the class holding the smallest
/// vertex. Without solved states every non-singleton class counts as
/// outside the winning region.
pub fn adversarial_answer(partition: &ProbePartition, solved: Option<&SolvedStates>) -> u32 {
    // sort key: (outside W, rank, size, -smallest vertex), maximised
    let key = |c: &crate::VertexSet| {
        let rank = if c.is_singleton() {
            Some(0)
        } else {
            match solved {
                Some(s) => s.rank(c),
                None => None,
            }
        };
        let outside = rank.is_none();
        (
            outside,
            rank.unwrap_or(0),
            c.len(),
            std::cmp::Reverse(c.first().unwrap_or(0)),
        )
    };
    partition
        .classes
        .iter()
        .max_by_key(|(_, c)| key(c))
        .map(|(d, _)| *d)
        .expect("partition of a nonempty set has a class")
}

use serde::{Deserialize, Serialize};

use super::RoutingError;
use crate::types::NodeId;

/// `C_ID` header field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodeId {
    Data,
    Error,
    Acknowledge,
}

/// Identifies one raw message produced by a source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MessageId {
    pub source: NodeId,
    pub seq: u32,
}

/// `S_N`: unique per data part of a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SequenceNumber {
    pub message: MessageId,
    pub part: u32,
}

/// One data part with its routing header. The first four fields form the
/// header; bystanders only need `next_node` to discard the frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataPacket {
    pub code_id: CodeId,
    pub next_node: NodeId,
    pub sequence_number: SequenceNumber,
    /// Nodes visited so far.
    pub visited_count: u32,
    pub destination: NodeId,
    /// Total parts `M` of the message.
    pub part_count: u32,
    pub payload: Vec<u8>,
}

impl DataPacket {
    pub fn part_index(&self) -> u32 {
        self.sequence_number.part
    }
}

/// Splits `raw` into `m` parts whose sizes differ by at most one byte, larger
/// parts first. With `m > raw.len()` the trailing parts are empty.
pub fn split_payload(raw: &[u8], m: usize) -> Result<Vec<Vec<u8>>, RoutingError> {
    if raw.is_empty() || m == 0 {
        return Err(RoutingError::InvalidSplit);
    }
    let base = raw.len() / m;
    let extra = raw.len() % m;
    let mut parts = Vec::with_capacity(m);
    let mut at = 0;
    for i in 0..m {
        let len = base + usize::from(i < extra);
        parts.push(raw[at..at + len].to_vec());
        at += len;
    }
    Ok(parts)
}

pub fn reassemble<B: AsRef<[u8]>>(parts: &[B]) -> Vec<u8> {
    parts
        .iter()
        .flat_map(|p| p.as_ref().iter().copied())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn split_examples() {
        let raw: Vec<u8> = (0..10).collect();
        assert_eq!(split_payload(&raw, 1).unwrap(), vec![raw.clone()]);
        let parts = split_payload(&raw, 3).unwrap();
        assert_eq!(
            parts.iter().map(Vec::len).collect::<Vec<_>>(),
            vec![4, 3, 3]
        );
        assert_eq!(reassemble(&parts), raw);
        let parts = split_payload(&[1, 2], 4).unwrap();
        assert_eq!(parts, vec![vec![1], vec![2], vec![], vec![]]);
        assert_eq!(split_payload(&[], 2), Err(RoutingError::InvalidSplit));
        assert_eq!(split_payload(&[1], 0), Err(RoutingError::InvalidSplit));
    }

    proptest! {
        #[test]
        fn split_round_trip(raw in prop::collection::vec(any::<u8>(), 1..512), m in 1usize..=16) {
            let parts = split_payload(&raw, m).unwrap();
            prop_assert_eq!(parts.len(), m);
            let max = parts.iter().map(Vec::len).max().unwrap();
            let min = parts.iter().map(Vec::len).min().unwrap();
            prop_assert!(max - min <= 1);
            prop_assert_eq!(reassemble(&parts), raw);
        }
    }
}

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::model::graph::PartyId;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Recipient {
    Party(PartyId),
    Board,
}

impl fmt::Display for Recipient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipient::Party(p) => write!(f, "P{p}"),
            Recipient::Board => f.write_str("board"),
        }
    }
}

impl fmt::Debug for Recipient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Recipient {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Recipient::Party(p) => s.serialize_u64(*p as u64),
            Recipient::Board => s.serialize_str("board"),
        }
    }
}

impl<'de> Deserialize<'de> for Recipient {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Party(usize),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Party(p) => Ok(Recipient::Party(p)),
            Raw::Name(s) if s == "board" => Ok(Recipient::Board),
            Raw::Name(s) => Err(serde::de::Error::custom(format!("unknown recipient {s:?}"))),
        }
    }
}

/// Framing metadata of a record. Labels are free; only payload bits count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Label {
    Plain,
    /// A point-to-point message of source protocol `protocol` written on a
    /// board.
    Routed { protocol: usize, recipient: PartyId },
    /// The XOR of a multiplexed group, identified by the compiler's group
    /// index.
    Multiplexed { group: usize },
    /// The output bit of one instance.
    Output { instance: usize },
}

/// One message: `m_{sender→recipient,round}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MessageRecord {
    pub round: usize,
    pub sender: PartyId,
    pub recipient: Recipient,
    pub payload: BitString,
    pub label: Label,
}

impl fmt::Display for MessageRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t={} P{}→{} {} {:?}",
            self.round, self.sender, self.recipient, self.payload, self.label
        )
    }
}

/// A message a rule wants to send in the current round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outgoing {
    pub recipient: Recipient,
    pub payload: BitString,
    pub label: Label,
}

impl Outgoing {
    pub fn to_party(recipient: PartyId, payload: BitString) -> Self {
        Outgoing {
            recipient: Recipient::Party(recipient),
            payload,
            label: Label::Plain,
        }
    }

    pub fn to_board(payload: BitString, label: Label) -> Self {
        Outgoing {
            recipient: Recipient::Board,
            payload,
            label,
        }
    }
}

/// The full record of one execution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub records: Vec<MessageRecord>,
    /// `outputs[i - 1]` is the output for instance `i`.
    pub outputs: Vec<bool>,
    pub total_bits: usize,
}

impl Transcript {
    pub fn new(records: Vec<MessageRecord>, outputs: Vec<bool>) -> Self {
        let total_bits = records.iter().map(|r| r.payload.len()).sum();
        Transcript {
            records,
            outputs,
            total_bits,
        }
    }

    /// Bits per `(sender, recipient)` channel.
    pub fn channel_bits(&self) -> BTreeMap<(PartyId, Recipient), usize> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            *out.entry((r.sender, r.recipient)).or_insert(0) += r.payload.len();
        }
        out
    }

    /// Records received by `party` (point-to-point models).
    pub fn received_by(&self, party: PartyId) -> Vec<MessageRecord> {
        self.records
            .iter()
            .filter(|r| r.recipient == Recipient::Party(party))
            .copied()
            .collect()
    }
}

/// Reads one output bit per instance from `Output` records on a board.
pub fn board_outputs(records: &[MessageRecord], ell: usize) -> Result<Vec<bool>> {
    let mut out: Vec<Option<bool>> = vec![None; ell];
    for r in records {
        if let Label::Output { instance } = r.label {
            let slot = out.get_mut(instance.wrapping_sub(1)).ok_or_else(|| {
                Error::Model(format!("output record for instance {instance} of {ell}"))
            })?;
            if r.payload.len() != 1 || slot.is_some() {
                return Err(Error::Model(format!(
                    "instance {instance} needs exactly one 1-bit output record"
                )));
            }
            *slot = Some(r.payload.get(0));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::Model(format!("no output written for instance {}", i + 1))))
        .collect()
}

//! Concrete protocols: XOR-block protocols for arbitrary `f`, several
//! equality protocols, and the restricted-view protocols that feed the
//! multiplexing compilers.

mod equality;
mod forwarding;
mod xor_blocks;

pub use equality::{
    eq_multi, eq_two_bit, eq_relay, relay_filtering_set, relay_graph, myopic_eq,
};
pub use forwarding::{
    forwarding, forwarding_graph, forwarding_multiplexing_set, forwarding_permutation, forwarding_variant,
};
pub use xor_blocks::{blocked_xor, diagonal_xor};

use serde::{Deserialize, Serialize};

use crate::combinatorics::Permutation;
use crate::error::{Error, Result};
use crate::model::{ProtocolSpec, TruthTable};

/// A named protocol constructor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProtocolFamily {
    pub name: &'static str,
    pub summary: &'static str,
    /// Takes an explicit `f` rather than computing `EQ_k`.
    pub takes_function: bool,
}

pub const FAMILIES: [ProtocolFamily; 7] = [
    ProtocolFamily {
        name: "diagonal-xor",
        summary: "f on k-1 instances via one XOR of the diagonal, n + k - 1 bits",
        takes_function: true,
    },
    ProtocolFamily {
        name: "blocked-xor",
        summary: "f on ell instances in blocks of k-1, ell*n/(k-1) + ell bits",
        takes_function: true,
    },
    ProtocolFamily {
        name: "eq2",
        summary: "EQ_k on the board with 2 bits",
        takes_function: false,
    },
    ProtocolFamily {
        name: "eq-multi",
        summary: "EQ_k on (k-1)/2 instances with 1 + (k-1)/2 bits",
        takes_function: false,
    },
    ProtocolFamily {
        name: "forward",
        summary: "f in NOF_G where P_k forwards x_i to P_i (variant i)",
        takes_function: true,
    },
    ProtocolFamily {
        name: "eq-relay",
        summary: "EQ_k in NOF_G with 1 bit from P_k to P_2",
        takes_function: false,
    },
    ProtocolFamily {
        name: "myopic-eq",
        summary: "EQ_k along a myopic chain, k - 2 bits",
        takes_function: false,
    },
];

pub fn family(name: &str) -> Option<&'static ProtocolFamily> {
    FAMILIES.iter().find(|f| f.name == name)
}

/// Constructor parameters for [`build`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub k: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    /// Required by families that take a function.
    #[serde(skip)]
    pub f: Option<TruthTable>,
    /// `Q^i` of the `forwarding` family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<usize>,
    /// Chain order of `myopic-eq`; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Permutation>,
}

/// Builds a protocol by family name.
pub fn build(name: &str, p: &ProtocolParams) -> Result<ProtocolSpec> {
    let fam = family(name).ok_or_else(|| {
        let names: Vec<_> = FAMILIES.iter().map(|f| f.name).collect();
        Error::domain(format!("unknown protocol {name:?}; known: {}", names.join(", ")))
    })?;
    let f = || -> Result<&TruthTable> {
        let f = p
            .f
            .as_ref()
            .ok_or_else(|| Error::domain(format!("protocol {name} needs a truth table")))?;
        if (f.k(), f.n()) != (p.k, p.n) {
            return Err(Error::domain(format!(
                "truth table has k={}, n={}; protocol asked for k={}, n={}",
                f.k(),
                f.n(),
                p.k,
                p.n
            )));
        }
        Ok(f)
    };
    match fam.name {
        "diagonal-xor" => diagonal_xor(f()?, p.k),
        "blocked-xor" => {
            let ell = p
                .ell
                .ok_or_else(|| Error::domain("blocked_xor needs an instance count"))?;
            blocked_xor(f()?, p.k, ell)
        }
        "eq2" => eq_two_bit(p.k, p.n),
        "eq-multi" => eq_multi(p.k, p.n),
        "forward" => forwarding_variant(f()?, p.k, p.variant.unwrap_or(1)),
        "eq-relay" => eq_relay(p.k, p.n),
        "myopic-eq" => {
            let order = p.order.clone().unwrap_or_else(|| Permutation::identity(p.k));
            myopic_eq(p.k, p.n, &order)
        }
        other => unreachable!("family table lists {other}"),
    }
}

/// The function a family computes: `f` itself, or `EQ_k`.
pub fn reference_function(name: &str, p: &ProtocolParams) -> Result<TruthTable> {
    match family(name) {
        Some(fam) if fam.takes_function => p
            .f
            .clone()
            .ok_or_else(|| Error::domain(format!("protocol {name} needs a truth table"))),
        Some(_) => TruthTable::equality(p.k, p.n),
        None => Err(Error::domain(format!("unknown protocol {name:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_builds_every_family() {
        let f3 = TruthTable::equality(3, 1).unwrap();
        for fam in FAMILIES {
            let k = if fam.name == "myopic-eq" { 4 } else if fam.takes_function { 3 } else { 5 };
            let p = ProtocolParams {
                k,
                n: 1,
                ell: Some(2),
                f: Some(if k == 3 { f3.clone() } else { TruthTable::equality(k, 1).unwrap() }),
                ..Default::default()
            };
            let spec = build(fam.name, &p).unwrap();
            assert_eq!(spec.k(), k, "{}", fam.name);
        }
    }

    #[test]
    fn unknown_name_and_missing_table() {
        let p = ProtocolParams { k: 3, n: 1, ..Default::default() };
        assert!(build("nope", &p).is_err());
        assert!(build("diagonal-xor", &p).is_err());
    }
}

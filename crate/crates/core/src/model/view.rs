use std::collections::BTreeMap;

use crate::bits::BitString;
use crate::combinatorics::Permutation;
use crate::error::{Error, Result};
use crate::model::graph::{PartyId, RestrictionGraph};
use crate::model::input::InputMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Visible(BitString),
    /// Outside the owner's view.
    Hidden,
    /// Inside the owner's view, but the party simulating the owner cannot
    /// see it (its own forehead).
    Unavailable,
}

/// The inputs a party sees, across one or more instances.
///
/// Reading an input outside the view is a [`Error::Legality`]; the type is
/// the only channel through which protocol rules touch inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct View {
    owner: PartyId,
    k: usize,
    ell: usize,
    slots: Vec<Slot>,
}

impl View {
    /// `VIEW_{party,G}` for a single instance of `x`.
    pub fn compute(
        graph: &RestrictionGraph,
        x: &InputMatrix,
        instance: usize,
        party: PartyId,
    ) -> Result<Self> {
        check_shape(graph, x)?;
        graph.check_party(party)?;
        if instance == 0 || instance > x.ell() {
            return Err(Error::domain(format!(
                "instance {instance} outside [1,{}]",
                x.ell()
            )));
        }
        let mask = graph.neighbor_mask(party);
        let slots = (1..=x.k())
            .map(|j| {
                if mask >> (j - 1) & 1 == 1 {
                    Slot::Visible(x.get(instance, j))
                } else {
                    Slot::Hidden
                }
            })
            .collect();
        Ok(View {
            owner: party,
            k: x.k(),
            ell: 1,
            slots,
        })
    }

    /// The party's view of every instance of `x`.
    pub fn compute_all(graph: &RestrictionGraph, x: &InputMatrix, party: PartyId) -> Result<Self> {
        check_shape(graph, x)?;
        graph.check_party(party)?;
        let mask = graph.neighbor_mask(party);
        let mut slots = Vec::with_capacity(x.ell() * x.k());
        for i in 1..=x.ell() {
            for j in 1..=x.k() {
                slots.push(if mask >> (j - 1) & 1 == 1 {
                    Slot::Visible(x.get(i, j))
                } else {
                    Slot::Hidden
                });
            }
        }
        Ok(View {
            owner: party,
            k: x.k(),
            ell: x.ell(),
            slots,
        })
    }

    /// A view with nothing visible, handed to rules that may only read
    /// communication (board output rules).
    pub fn blind(k: usize, ell: usize) -> Self {
        View {
            owner: 0,
            k,
            ell,
            slots: vec![Slot::Hidden; k * ell],
        }
    }

    /// `owner`'s single-instance view under `graph`, rebuilt from what
    /// `observer` can see in `instance`. Entries the owner sees but the
    /// observer does not become unavailable: reading them is a soundness
    /// error rather than a legality error.
    pub fn simulate(
        observer: &View,
        graph: &RestrictionGraph,
        owner: PartyId,
        instance: usize,
    ) -> Result<Self> {
        graph.check_party(owner)?;
        if graph.k() != observer.k || instance == 0 || instance > observer.ell {
            return Err(Error::domain("simulated view does not fit the observer"));
        }
        let mask = graph.neighbor_mask(owner);
        let base = (instance - 1) * observer.k;
        let slots = (1..=observer.k)
            .map(|j| {
                if mask >> (j - 1) & 1 == 0 {
                    Slot::Hidden
                } else {
                    match observer.slots[base + j - 1] {
                        Slot::Visible(b) => Slot::Visible(b),
                        Slot::Hidden | Slot::Unavailable => Slot::Unavailable,
                    }
                }
            })
            .collect();
        Ok(View {
            owner,
            k: observer.k,
            ell: 1,
            slots,
        })
    }

    /// The view `pi^{-1}(owner)` has of the relabeled input `pi^{-1}(x)`,
    /// where party `j` of the relabeled input carries `x_{pi(j)}`.
    pub fn relabeled(&self, pi: &Permutation) -> Self {
        let inv = pi.inverse();
        let mut slots = Vec::with_capacity(self.slots.len());
        for i in 0..self.ell {
            for j in 1..=self.k {
                slots.push(self.slots[i * self.k + pi.apply(j) - 1]);
            }
        }
        View {
            owner: if self.owner == 0 { 0 } else { inv.apply(self.owner) },
            k: self.k,
            ell: self.ell,
            slots,
        }
    }

    pub fn owner(&self) -> PartyId {
        self.owner
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `x_party` in the first (usually only) instance.
    pub fn get(&self, party: PartyId) -> Result<BitString> {
        self.get_at(1, party)
    }

    pub fn get_at(&self, instance: usize, party: PartyId) -> Result<BitString> {
        if instance == 0 || instance > self.ell || party == 0 || party > self.k {
            return Err(Error::domain(format!(
                "x[{instance},{party}] outside a {}x{} view",
                self.ell, self.k
            )));
        }
        match self.slots[(instance - 1) * self.k + party - 1] {
            Slot::Visible(b) => Ok(b),
            Slot::Hidden => Err(Error::Legality {
                party: self.owner,
                instance,
                input: party,
            }),
            Slot::Unavailable => Err(Error::Soundness(format!(
                "simulating party {} needs x[{instance},{party}], which the simulating party cannot see",
                self.owner
            ))),
        }
    }

    pub fn sees(&self, party: PartyId) -> bool {
        party >= 1
            && party <= self.k
            && !matches!(self.slots[party - 1], Slot::Hidden)
    }

    /// Visible entries of one instance keyed by party.
    pub fn visible(&self, instance: usize) -> BTreeMap<PartyId, BitString> {
        (1..=self.k)
            .filter_map(|j| match self.slots.get((instance - 1) * self.k + j - 1) {
                Some(Slot::Visible(b)) => Some((j, *b)),
                _ => None,
            })
            .collect()
    }
}

fn check_shape(graph: &RestrictionGraph, x: &InputMatrix) -> Result<()> {
    if graph.k() != x.k() {
        return Err(Error::domain(format!(
            "graph has {} parties, input has {}",
            graph.k(),
            x.k()
        )));
    }
    Ok(())
}

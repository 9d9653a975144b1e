use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinatorics::Permutation;
use crate::error::{Error, Result};
use crate::model::{PartyId, RestrictionGraph};

/// Which requirement a certificate broke.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// Good-triplet condition 1: every permutation in `R` fixes the sender.
    SenderFixed,
    /// Good-triplet condition 2: the images of `b` are `|R|` distinct parties the
    /// sender does not see, excluding `a` and `b`.
    AlternativesUnseen,
    /// Good-triplet condition 3: under each `π_r`, the other recipients stay outside
    /// the sender's view in `G_{π_r}`.
    PermutedViewsBlind,
    /// Filtering triplet: `B` avoids `N(a)`, `a` and `b`.
    FilterUnseen,
    /// Set-level: a sender is never a (possibly alternative) recipient of
    /// another triplet.
    SenderNotRecipient,
    /// Set-level: recipient sets are pairwise disjoint.
    DisjointRecipients,
    /// Binding condition 1: the permutations in `U` place `s` at the position.
    BindingSender,
    /// Binding condition 2: the successors are pairwise distinct.
    BindingDistinctSuccessors,
    /// Binding condition 3: no successor appears before the position in any
    /// permutation of `U`.
    BindingFreshSuccessors,
    /// Repetitive set: a sender never receives a multiplexed message.
    RepetitiveSenderNotSuccessor,
    /// Repetitive set: triplets sharing position and sender use disjoint `U`.
    RepetitiveDisjointIndices,
}

impl Condition {
    /// Number of the condition inside its own definition.
    pub fn number(&self) -> u8 {
        match self {
            Condition::SenderFixed | Condition::BindingSender => 1,
            Condition::AlternativesUnseen | Condition::BindingDistinctSuccessors => 2,
            Condition::PermutedViewsBlind | Condition::BindingFreshSuccessors => 3,
            Condition::FilterUnseen => 1,
            Condition::SenderNotRecipient | Condition::RepetitiveSenderNotSuccessor => 1,
            Condition::DisjointRecipients | Condition::RepetitiveDisjointIndices => 2,
        }
    }
}

/// The first violated condition, with the 1-based positions of the
/// triplets involved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub triplets: Vec<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} (condition {}) on triplet(s) {:?}: {}",
            self.condition,
            self.condition.number(),
            self.triplets,
            self.detail
        )
    }
}

/// `Ok(())` when a certificate holds, otherwise its first violation.
pub type Verdict = std::result::Result<(), Violation>;

fn violation(condition: Condition, triplets: Vec<usize>, detail: String) -> Verdict {
    Err(Violation {
        condition,
        triplets,
        detail,
    })
}

/// `(a, b, R)`: multiplex `a`'s messages to `b` in protocol 1 with its
/// messages to `π_r(b)` in protocols `r ∈ R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(usize, usize, Vec<usize>)", into = "(usize, usize, Vec<usize>)")]
pub struct MultiplexTriplet {
    pub a: PartyId,
    pub b: PartyId,
    pub r: BTreeSet<usize>,
}

impl MultiplexTriplet {
    pub fn new(a: PartyId, b: PartyId, r: impl IntoIterator<Item = usize>) -> Result<Self> {
        let r: BTreeSet<usize> = r.into_iter().collect();
        if a == b {
            return Err(Error::domain(format!("triplet sender and recipient are both {a}")));
        }
        if r.is_empty() {
            return Err(Error::domain(format!(
                "triplet ({a},{b},∅) has an empty index set; omit it instead"
            )));
        }
        Ok(MultiplexTriplet { a, b, r })
    }

    /// `MAP_{Π,b,R}`.
    pub fn images(&self, perms: &[Permutation]) -> BTreeSet<PartyId> {
        self.r.iter().map(|&r| perms[r - 1].apply(self.b)).collect()
    }
}

impl TryFrom<(usize, usize, Vec<usize>)> for MultiplexTriplet {
    type Error = Error;
    fn try_from((a, b, r): (usize, usize, Vec<usize>)) -> Result<Self> {
        MultiplexTriplet::new(a, b, r)
    }
}

impl From<MultiplexTriplet> for (usize, usize, Vec<usize>) {
    fn from(t: MultiplexTriplet) -> Self {
        (t.a, t.b, t.r.into_iter().collect())
    }
}

/// `(a, b, B)`, with `B` ordered: `(B)_j` is its `j`-th element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(usize, usize, Vec<usize>)", into = "(usize, usize, Vec<usize>)")]
pub struct FilteringTriplet {
    pub a: PartyId,
    pub b: PartyId,
    pub set: Vec<PartyId>,
}

impl FilteringTriplet {
    pub fn new(a: PartyId, b: PartyId, set: Vec<PartyId>) -> Result<Self> {
        if a == b {
            return Err(Error::domain(format!("triplet sender and recipient are both {a}")));
        }
        let distinct: BTreeSet<_> = set.iter().collect();
        if distinct.len() != set.len() {
            return Err(Error::domain(format!("filtering set {set:?} repeats a party")));
        }
        Ok(FilteringTriplet { a, b, set })
    }

    fn footprint(&self) -> BTreeSet<PartyId> {
        self.set.iter().copied().chain([self.b]).collect()
    }
}

impl TryFrom<(usize, usize, Vec<usize>)> for FilteringTriplet {
    type Error = Error;
    fn try_from((a, b, set): (usize, usize, Vec<usize>)) -> Result<Self> {
        FilteringTriplet::new(a, b, set)
    }
}

impl From<FilteringTriplet> for (usize, usize, Vec<usize>) {
    fn from(t: FilteringTriplet) -> Self {
        (t.a, t.b, t.set)
    }
}

/// `(pos, s, U)`: party `s` speaks at chain position `pos` in every
/// protocol of `U`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize, Vec<usize>)", into = "(usize, usize, Vec<usize>)")]
pub struct BindingTriplet {
    pub pos: usize,
    pub sender: PartyId,
    pub set: BTreeSet<usize>,
}

impl BindingTriplet {
    pub fn new(pos: usize, sender: PartyId, set: impl IntoIterator<Item = usize>) -> Self {
        BindingTriplet {
            pos,
            sender,
            set: set.into_iter().collect(),
        }
    }

    /// `{π_u(pos + 1) : u ∈ U}`.
    pub fn successors(&self, perms: &[Permutation]) -> BTreeSet<PartyId> {
        self.set.iter().map(|&u| perms[u - 1].apply(self.pos + 1)).collect()
    }
}

impl From<(usize, usize, Vec<usize>)> for BindingTriplet {
    fn from((pos, sender, set): (usize, usize, Vec<usize>)) -> Self {
        BindingTriplet::new(pos, sender, set)
    }
}

impl From<BindingTriplet> for (usize, usize, Vec<usize>) {
    fn from(t: BindingTriplet) -> Self {
        (t.pos, t.sender, t.set.into_iter().collect())
    }
}

fn check_perms(perms: &[Permutation], k: usize) -> Result<()> {
    for p in perms {
        p.check_arity(k)?;
    }
    Ok(())
}

fn check_party(p: PartyId, k: usize) -> Result<()> {
    if p == 0 || p > k {
        return Err(Error::domain(format!("party {p} outside [1,{k}]")));
    }
    Ok(())
}

fn check_indices(set: &BTreeSet<usize>, ell: usize) -> Result<()> {
    if let Some(&bad) = set.iter().find(|&&r| r == 0 || r > ell) {
        return Err(Error::domain(format!("protocol index {bad} outside [1,{ell}]")));
    }
    Ok(())
}

/// Whether `t` is a good triplet for `perms` and `graph`.
pub fn is_good_triplet(
    t: &MultiplexTriplet,
    perms: &[Permutation],
    graph: &RestrictionGraph,
) -> Result<Verdict> {
    good_at(t, perms, graph, 1)
}

fn good_at(
    t: &MultiplexTriplet,
    perms: &[Permutation],
    graph: &RestrictionGraph,
    position: usize,
) -> Result<Verdict> {
    let k = graph.k();
    check_perms(perms, k)?;
    check_party(t.a, k)?;
    check_party(t.b, k)?;
    check_indices(&t.r, perms.len())?;
    let at = || vec![position];

    for &r in &t.r {
        let image = perms[r - 1].apply(t.a);
        if image != t.a {
            return Ok(violation(
                Condition::SenderFixed,
                at(),
                format!("π_{r} maps sender {} to {image}", t.a),
            ));
        }
    }

    let images = t.images(perms);
    let unseen = graph.non_neighbors(t.a);
    if images.len() != t.r.len() {
        return Ok(violation(
            Condition::AlternativesUnseen,
            at(),
            format!("images of {} under R are {images:?}, not {} distinct parties", t.b, t.r.len()),
        ));
    }
    if images.contains(&t.a) || images.contains(&t.b) {
        return Ok(violation(
            Condition::AlternativesUnseen,
            at(),
            format!("images {images:?} contain the sender or the recipient"),
        ));
    }
    if let Some(seen) = images.iter().find(|p| !unseen.contains(p)) {
        return Ok(violation(
            Condition::AlternativesUnseen,
            at(),
            format!("alternative recipient {seen} is seen by sender {}", t.a),
        ));
    }

    for &r in &t.r {
        let pi = &perms[r - 1];
        let permuted = graph.permuted(pi)?;
        let target = pi.apply(t.b);
        for p in images.iter().copied().chain([t.b]).filter(|&p| p != target) {
            if permuted.has_edge(t.a, p) {
                return Ok(violation(
                    Condition::PermutedViewsBlind,
                    at(),
                    format!("under π_{r} = {pi}, sender {} sees recipient {p}", t.a),
                ));
            }
        }
    }
    Ok(Ok(()))
}

/// Whether `set` is a multiplexing set for `perms` and `graph`.
pub fn is_multiplexing_set(
    set: &[MultiplexTriplet],
    perms: &[Permutation],
    graph: &RestrictionGraph,
) -> Result<Verdict> {
    for (i, t) in set.iter().enumerate() {
        if let Err(v) = good_at(t, perms, graph, i + 1)? {
            return Ok(Err(v));
        }
    }
    let footprints: Vec<BTreeSet<PartyId>> = set
        .iter()
        .map(|t| t.images(perms).into_iter().chain([t.b]).collect())
        .collect();
    for i in 0..set.len() {
        for j in 0..set.len() {
            if i == j {
                continue;
            }
            if footprints[j].contains(&set[i].a) {
                return Ok(violation(
                    Condition::SenderNotRecipient,
                    vec![i + 1, j + 1],
                    format!("sender {} receives multiplexed messages of triplet {}", set[i].a, j + 1),
                ));
            }
            if i < j && !footprints[i].is_disjoint(&footprints[j]) {
                return Ok(violation(
                    Condition::DisjointRecipients,
                    vec![i + 1, j + 1],
                    format!(
                        "recipient sets {:?} and {:?} overlap",
                        footprints[i], footprints[j]
                    ),
                ));
            }
        }
    }
    Ok(Ok(()))
}

/// Result of checking a filtering set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilteringAnalysis {
    pub verdict: Verdict,
    /// Per sender `a`, the sum of `|B|` over its triplets.
    pub loads: BTreeMap<PartyId, usize>,
    /// `R(S)`: the largest load (0 for an empty set).
    pub r_max: usize,
    /// Valid and `R(S) ≤ ell - 1`.
    pub ell_filtering: bool,
}

/// Checks a filtering set for `graph` and whether it is `ell`-filtering.
pub fn is_filtering_set(
    set: &[FilteringTriplet],
    graph: &RestrictionGraph,
    ell: usize,
) -> Result<FilteringAnalysis> {
    let k = graph.k();
    let mut verdict = Ok(());
    for (i, t) in set.iter().enumerate() {
        check_party(t.a, k)?;
        check_party(t.b, k)?;
        for &p in &t.set {
            check_party(p, k)?;
        }
        if verdict.is_err() {
            continue;
        }
        if t.set.contains(&t.a) || t.set.contains(&t.b) {
            verdict = violation(
                Condition::FilterUnseen,
                vec![i + 1],
                format!("B = {:?} contains the sender or the recipient", t.set),
            );
        } else if let Some(p) = t.set.iter().find(|&&p| graph.has_edge(t.a, p)) {
            verdict = violation(
                Condition::FilterUnseen,
                vec![i + 1],
                format!("{p} ∈ B is seen by sender {}", t.a),
            );
        }
    }
    if verdict.is_ok() {
        'pairs: for i in 0..set.len() {
            for j in 0..set.len() {
                if i == j {
                    continue;
                }
                let fj = set[j].footprint();
                if fj.contains(&set[i].a) {
                    verdict = violation(
                        Condition::SenderNotRecipient,
                        vec![i + 1, j + 1],
                        format!("sender {} lies in {{b}} ∪ B of triplet {}", set[i].a, j + 1),
                    );
                    break 'pairs;
                }
                if i < j && !set[i].footprint().is_disjoint(&fj) {
                    verdict = violation(
                        Condition::DisjointRecipients,
                        vec![i + 1, j + 1],
                        format!("{{b}} ∪ B of triplets {} and {} overlap", i + 1, j + 1),
                    );
                    break 'pairs;
                }
            }
        }
    }
    let mut loads = BTreeMap::new();
    for t in set {
        *loads.entry(t.a).or_insert(0) += t.set.len();
    }
    let r_max = loads.values().copied().max().unwrap_or(0);
    let ell_filtering = verdict.is_ok() && ell >= 1 && r_max < ell;
    Ok(FilteringAnalysis {
        verdict,
        loads,
        r_max,
        ell_filtering,
    })
}

/// Whether `t` is binding for `perms`.
pub fn is_binding_triplet(t: &BindingTriplet, perms: &[Permutation]) -> Result<Verdict> {
    binding_at(t, perms, 1)
}

fn binding_at(t: &BindingTriplet, perms: &[Permutation], position: usize) -> Result<Verdict> {
    let k = perms
        .first()
        .map(|p| p.k())
        .ok_or_else(|| Error::domain("binding triplets need at least one permutation"))?;
    check_perms(perms, k)?;
    check_party(t.sender, k)?;
    if t.pos == 0 || t.pos >= k {
        return Err(Error::domain(format!(
            "chain position {} outside [1,{}]",
            t.pos,
            k - 1
        )));
    }
    check_indices(&t.set, perms.len())?;
    let at = || vec![position];

    for &u in &t.set {
        let speaker = perms[u - 1].apply(t.pos);
        if speaker != t.sender {
            return Ok(violation(
                Condition::BindingSender,
                at(),
                format!("π_{u} puts party {speaker} at position {}, not {}", t.pos, t.sender),
            ));
        }
    }
    let successors = t.successors(perms);
    if successors.len() != t.set.len() {
        return Ok(violation(
            Condition::BindingDistinctSuccessors,
            at(),
            format!("successors {successors:?} are not {} distinct parties", t.set.len()),
        ));
    }
    for &u in &t.set {
        for before in 1..t.pos {
            let p = perms[u - 1].apply(before);
            if successors.contains(&p) {
                return Ok(violation(
                    Condition::BindingFreshSuccessors,
                    at(),
                    format!("successor {p} precedes position {} in π_{u}", t.pos),
                ));
            }
        }
    }
    Ok(Ok(()))
}

/// Whether `set` is a repetitive set for `perms`.
pub fn is_repetitive_set(set: &[BindingTriplet], perms: &[Permutation]) -> Result<Verdict> {
    for (i, t) in set.iter().enumerate() {
        if let Err(v) = binding_at(t, perms, i + 1)? {
            return Ok(Err(v));
        }
    }
    for i in 0..set.len() {
        for j in 0..set.len() {
            if i == j {
                continue;
            }
            let (t1, t2) = (&set[i], &set[j]);
            if t2.successors(perms).contains(&t1.sender) {
                return Ok(violation(
                    Condition::RepetitiveSenderNotSuccessor,
                    vec![i + 1, j + 1],
                    format!("sender {} receives a multiplexed message of triplet {}", t1.sender, j + 1),
                ));
            }
            if i < j && t1.pos == t2.pos && t1.sender == t2.sender && !t1.set.is_disjoint(&t2.set) {
                return Ok(violation(
                    Condition::RepetitiveDisjointIndices,
                    vec![i + 1, j + 1],
                    format!("index sets {:?} and {:?} overlap", t1.set, t2.set),
                ));
            }
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perms(v: &[&[usize]]) -> Vec<Permutation> {
        v.iter().map(|p| Permutation::new(p.to_vec()).unwrap()).collect()
    }

    fn forwarding() -> (RestrictionGraph, Vec<Permutation>, MultiplexTriplet) {
        let g = RestrictionGraph::new(4, [(4, 1), (1, 2), (1, 3), (1, 4)]).unwrap();
        let p = perms(&[&[1, 2, 3, 4], &[2, 3, 1, 4], &[3, 1, 2, 4]]);
        (g, p, MultiplexTriplet::new(4, 1, [2, 3]).unwrap())
    }

    #[test]
    fn forwarding_triplet_is_good() {
        let (g, p, t) = forwarding();
        assert_eq!(is_good_triplet(&t, &p, &g).unwrap(), Ok(()));
        assert_eq!(is_multiplexing_set(&[t], &p, &g).unwrap(), Ok(()));
    }

    #[test]
    fn moved_sender_breaks_condition_one() {
        let (g, _, _) = forwarding();
        let p = perms(&[&[1, 2, 3, 4], &[2, 3, 4, 1]]);
        let t = MultiplexTriplet::new(4, 1, [2]).unwrap();
        let v = is_good_triplet(&t, &p, &g).unwrap().unwrap_err();
        assert_eq!(v.condition, Condition::SenderFixed);
        assert_eq!(v.condition.number(), 1);
    }

    #[test]
    fn seen_alternative_breaks_condition_two() {
        // sender 4 sees party 2, and π_2 sends b = 1 to 2
        let g = RestrictionGraph::new(4, [(4, 2)]).unwrap();
        let p = perms(&[&[1, 2, 3, 4], &[2, 1, 3, 4]]);
        let t = MultiplexTriplet::new(4, 1, [2]).unwrap();
        let v = is_good_triplet(&t, &p, &g).unwrap().unwrap_err();
        assert_eq!(v.condition, Condition::AlternativesUnseen);
    }

    #[test]
    fn permuted_view_breaks_condition_three() {
        let t = MultiplexTriplet::new(4, 1, [2]).unwrap();
        // π_2 = (3,2,1,4): MAP = {3}, and G_π keeps 4 → 2
        let p = perms(&[&[1, 2, 3, 4], &[3, 2, 1, 4]]);
        let g = RestrictionGraph::new(4, [(4, 2)]).unwrap();
        assert_eq!(is_good_triplet(&t, &p, &g).unwrap(), Ok(()));
        // 4 → 1 becomes 4 → 3, which is π_2(b) itself
        let g = RestrictionGraph::new(4, [(4, 1)]).unwrap();
        assert_eq!(is_good_triplet(&t, &p, &g).unwrap(), Ok(()));
        // π_2 = (3,1,2,4) turns 4 → 2 into 4 → 1, and b = 1 is a co-recipient
        let p = perms(&[&[1, 2, 3, 4], &[3, 1, 2, 4]]);
        let g = RestrictionGraph::new(4, [(4, 2)]).unwrap();
        let v = is_good_triplet(&t, &p, &g).unwrap().unwrap_err();
        assert_eq!(v.condition, Condition::PermutedViewsBlind);
    }

    #[test]
    fn good_triplet_ignores_order_of_r() {
        let (g, p, _) = forwarding();
        let a = MultiplexTriplet::new(4, 1, [3, 2]).unwrap();
        let b = MultiplexTriplet::new(4, 1, [2, 3]).unwrap();
        assert_eq!(a, b);
        assert_eq!(is_good_triplet(&a, &p, &g).unwrap(), is_good_triplet(&b, &p, &g).unwrap());
    }

    #[test]
    fn empty_r_is_rejected() {
        assert!(MultiplexTriplet::new(4, 1, []).is_err());
    }

    #[test]
    fn empty_sets_are_valid() {
        let (g, p, _) = forwarding();
        assert_eq!(is_multiplexing_set(&[], &p, &g).unwrap(), Ok(()));
        let f = is_filtering_set(&[], &g, 1).unwrap();
        assert!(f.ell_filtering);
        assert_eq!(is_repetitive_set(&[], &p).unwrap(), Ok(()));
    }

    #[test]
    fn shared_recipient_breaks_multiplexing_set() {
        let g = RestrictionGraph::empty(5).unwrap();
        let p = perms(&[&[1, 2, 3, 4, 5], &[1, 3, 2, 4, 5]]);
        let t1 = MultiplexTriplet::new(1, 2, [2]).unwrap();
        let t2 = MultiplexTriplet::new(4, 2, [2]).unwrap();
        // t2 alone: π_2 must fix 4 (it does) and map 2 to 3
        assert_eq!(is_good_triplet(&t2, &p, &g).unwrap(), Ok(()));
        let v = is_multiplexing_set(&[t1, t2], &p, &g).unwrap().unwrap_err();
        assert_eq!(v.condition, Condition::DisjointRecipients);
        assert_eq!(v.triplets, vec![1, 2]);
    }

    #[test]
    fn two_sender_filtering_set() {
        let g = RestrictionGraph::new(9, [(1, 2), (1, 5), (7, 8)]).unwrap();
        let s = vec![
            FilteringTriplet::new(1, 2, vec![3, 4]).unwrap(),
            FilteringTriplet::new(1, 5, vec![6]).unwrap(),
            FilteringTriplet::new(7, 8, vec![9]).unwrap(),
        ];
        let f = is_filtering_set(&s, &g, 4).unwrap();
        assert_eq!(f.verdict, Ok(()));
        assert_eq!(f.loads, BTreeMap::from([(1, 3), (7, 1)]));
        assert_eq!(f.r_max, 3);
        assert!(f.ell_filtering);
        assert!(!is_filtering_set(&s, &g, 3).unwrap().ell_filtering);
    }

    #[test]
    fn b_inside_its_own_set_is_rejected() {
        let g = RestrictionGraph::empty(3).unwrap();
        let s = vec![FilteringTriplet::new(1, 2, vec![2]).unwrap()];
        let f = is_filtering_set(&s, &g, 2).unwrap();
        assert_eq!(f.verdict.unwrap_err().condition, Condition::FilterUnseen);
        assert!(!f.ell_filtering);
    }

    #[test]
    fn relay_filtering_set_k5() {
        let k = 5;
        let edges = (1..=k)
            .flat_map(|i| (1..=k).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && !(i == k && (4..k).contains(&j)));
        let g = RestrictionGraph::new(k, edges).unwrap();
        let s = vec![FilteringTriplet::new(5, 2, vec![4]).unwrap()];
        let f = is_filtering_set(&s, &g, 2).unwrap();
        assert_eq!(f.verdict, Ok(()));
        assert!(f.ell_filtering);
    }

    #[test]
    fn binding_triplets() {
        let p = perms(&[&[1, 2, 3, 4, 5], &[4, 2, 5, 1, 3]]);
        let t = BindingTriplet::new(2, 2, [1, 2]);
        assert_eq!(is_binding_triplet(&t, &p).unwrap(), Ok(()));
        assert_eq!(is_repetitive_set(&[t], &p).unwrap(), Ok(()));
        // singleton U only needs the sender in place
        assert_eq!(is_binding_triplet(&BindingTriplet::new(3, 5, [2]), &p).unwrap(), Ok(()));

        let q = perms(&[&[1, 2, 3], &[1, 3, 2]]);
        let v = is_binding_triplet(&BindingTriplet::new(2, 2, [1, 2]), &q)
            .unwrap()
            .unwrap_err();
        assert_eq!(v.condition, Condition::BindingSender);
        assert_eq!(is_binding_triplet(&BindingTriplet::new(1, 1, [1, 2]), &q).unwrap(), Ok(()));
        assert!(is_binding_triplet(&BindingTriplet::new(3, 1, [1]), &q).is_err());
    }

    #[test]
    fn binding_failures_two_and_three() {
        // same successor in both
        let p = perms(&[&[1, 2, 3, 4], &[4, 2, 3, 1]]);
        let v = is_binding_triplet(&BindingTriplet::new(2, 2, [1, 2]), &p).unwrap().unwrap_err();
        assert_eq!(v.condition, Condition::BindingDistinctSuccessors);
        // successor of one is a predecessor in the other
        let p = perms(&[&[1, 2, 3, 4], &[3, 2, 1, 4]]);
        let v = is_binding_triplet(&BindingTriplet::new(2, 2, [1, 2]), &p).unwrap().unwrap_err();
        assert_eq!(v.condition, Condition::BindingFreshSuccessors);
    }

    #[test]
    fn repetitive_set_failures() {
        let p = perms(&[&[1, 2, 3, 4, 5], &[4, 2, 5, 1, 3]]);
        // (2,2,{1,2}) sends to {3,5}; (3,3,{1}) has sender 3, a successor above
        let s = vec![BindingTriplet::new(2, 2, [1, 2]), BindingTriplet::new(3, 3, [1])];
        let v = is_repetitive_set(&s, &p).unwrap().unwrap_err();
        assert_eq!(v.condition, Condition::RepetitiveSenderNotSuccessor);

        let s = vec![BindingTriplet::new(2, 2, [1, 2]), BindingTriplet::new(2, 2, [2])];
        let v = is_repetitive_set(&s, &p).unwrap().unwrap_err();
        assert_eq!(v.condition, Condition::RepetitiveDisjointIndices);
    }

    #[test]
    fn triplet_json_is_ordered_arrays() {
        let t: FilteringTriplet = serde_json::from_str("[1,2,[4,3]]").unwrap();
        assert_eq!(t.set, vec![4, 3]);
        let m: MultiplexTriplet = serde_json::from_str("[7,8,[2]]").unwrap();
        assert_eq!(serde_json::to_string(&m).unwrap(), "[7,8,[2]]");
        assert!(serde_json::from_str::<MultiplexTriplet>("[7,8,[]]").is_err());
    }
}

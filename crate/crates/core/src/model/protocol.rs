use std::fmt;
use std::sync::Arc;

use crate::bits::BitString;
use crate::combinatorics::Permutation;
use crate::error::{Error, Result};
use crate::model::graph::{PartyId, RestrictionGraph};
use crate::model::input::Shape;
use crate::model::message::{MessageRecord, Outgoing, Recipient};
use crate::model::pattern::CommPattern;
use crate::model::view::View;

/// The communication model a protocol runs in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    /// Classic NOF: everyone sees all foreheads but their own, and every
    /// message is written on a shared board.
    Board,
    /// `NOF_G`: views restricted by the graph, point-to-point channels.
    Restricted(RestrictionGraph),
    /// `MYOPIC_π`: one-way chain in the order of the permutation.
    Myopic(Permutation),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Board => "nof-board",
            Model::Restricted(_) => "nof-g",
            Model::Myopic(_) => "myopic",
        }
    }
}

/// What a party's rule may consult when choosing its messages in a round.
pub struct PartyContext<'a> {
    pub party: PartyId,
    pub round: usize,
    pub view: &'a View,
    /// Everything the party received in earlier rounds: the whole board in
    /// the board model, its incoming point-to-point messages otherwise.
    pub history: &'a [MessageRecord],
}

impl PartyContext<'_> {
    /// Payload received from `sender` in `round`, if any.
    pub fn received(&self, sender: PartyId, round: usize) -> Option<BitString> {
        self.history
            .iter()
            .find(|r| r.sender == sender && r.round == round)
            .map(|r| r.payload)
    }
}

/// Input to the output rule once all rounds are over.
pub struct OutputContext<'a> {
    /// `None` for board protocols, whose output is read off the board.
    pub party: Option<PartyId>,
    pub view: &'a View,
    pub history: &'a [MessageRecord],
}

/// The deterministic next-message and output rules of a protocol.
pub trait Rules: Send + Sync {
    fn messages(&self, ctx: &PartyContext<'_>) -> Result<Vec<Outgoing>>;

    /// One bit per instance.
    fn output(&self, ctx: &OutputContext<'_>) -> Result<Vec<bool>>;
}

/// An executable protocol: model, shape, round count, rules and (for
/// oblivious protocols) the declared communication pattern.
#[derive(Clone)]
pub struct ProtocolSpec {
    name: String,
    model: Model,
    shape: Shape,
    rounds: usize,
    output_party: Option<PartyId>,
    pattern: Option<CommPattern>,
    view_graph: RestrictionGraph,
    rules: Arc<dyn Rules>,
}

impl ProtocolSpec {
    /// Point-to-point models also need [`ProtocolSpec::with_output_party`]
    /// before they can run.
    pub fn new(
        name: impl Into<String>,
        model: Model,
        shape: Shape,
        rounds: usize,
        rules: Arc<dyn Rules>,
    ) -> Result<Self> {
        let view_graph = match &model {
            Model::Board => RestrictionGraph::complete(shape.k)?,
            Model::Restricted(g) => g.clone(),
            Model::Myopic(order) => RestrictionGraph::myopic(order)?,
        };
        if view_graph.k() != shape.k {
            return Err(Error::domain(format!(
                "model acts on {} parties, shape has {}",
                view_graph.k(),
                shape.k
            )));
        }
        let output_party = match &model {
            Model::Myopic(order) => {
                if rounds != shape.k - 1 {
                    return Err(Error::Model(format!(
                        "a myopic chain over {} parties has {} rounds, not {rounds}",
                        shape.k,
                        shape.k - 1
                    )));
                }
                Some(order.apply(shape.k))
            }
            _ => None,
        };
        Ok(ProtocolSpec {
            name: name.into(),
            model,
            shape,
            rounds,
            output_party,
            pattern: None,
            view_graph,
            rules,
        })
    }

    pub fn with_output_party(mut self, party: PartyId) -> Result<Self> {
        match &self.model {
            Model::Board => {
                return Err(Error::Model(
                    "board protocols publish their output on the board".into(),
                ))
            }
            Model::Myopic(order) if order.apply(self.shape.k) != party => {
                return Err(Error::Model(format!(
                    "the last party of the chain, P{}, announces the output",
                    order.apply(self.shape.k)
                )))
            }
            _ => {}
        }
        self.view_graph.check_party(party)?;
        self.output_party = Some(party);
        Ok(self)
    }

    pub fn with_pattern(mut self, pattern: CommPattern) -> Self {
        self.pattern = Some(pattern);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn k(&self) -> usize {
        self.shape.k
    }

    pub fn n(&self) -> usize {
        self.shape.n
    }

    pub fn ell(&self) -> usize {
        self.shape.ell
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn output_party(&self) -> Option<PartyId> {
        self.output_party
    }

    pub fn pattern(&self) -> Option<&CommPattern> {
        self.pattern.as_ref()
    }

    /// The graph deciding views: `G` itself, the complete graph for the
    /// board model, or the chain view graph for myopic protocols.
    pub fn view_graph(&self) -> &RestrictionGraph {
        &self.view_graph
    }

    pub fn rules(&self) -> &dyn Rules {
        self.rules.as_ref()
    }

    pub(crate) fn shared_rules(&self) -> Arc<dyn Rules> {
        Arc::clone(&self.rules)
    }

    /// Checks one outgoing message against the model's channel rules.
    pub(crate) fn check_outgoing(&self, round: usize, sender: PartyId, out: &Outgoing) -> Result<()> {
        match (&self.model, out.recipient) {
            (Model::Board, Recipient::Board) => Ok(()),
            (Model::Board, Recipient::Party(_)) => Err(Error::Model(format!(
                "{}: board protocols have no private channels (P{sender}, round {round})",
                self.name
            ))),
            (_, Recipient::Board) => Err(Error::Model(format!(
                "{}: point-to-point protocol wrote on a board (P{sender}, round {round})",
                self.name
            ))),
            (model, Recipient::Party(j)) => {
                self.view_graph.check_party(j)?;
                if j == sender {
                    return Err(Error::Model(format!("P{sender} sent a message to itself")));
                }
                if let Model::Myopic(order) = model {
                    let on_chain = round < self.shape.k
                        && order.apply(round) == sender
                        && order.apply(round + 1) == j;
                    if !out.payload.is_empty() && !on_chain {
                        return Err(Error::Model(format!(
                            "{}: myopic round {round} message P{sender}→P{j} leaves the chain {order}",
                            self.name
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for ProtocolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProtocolSpec")
            .field("name", &self.name)
            .field("model", &self.model)
            .field("shape", &self.shape)
            .field("rounds", &self.rounds)
            .field("output_party", &self.output_party)
            .field("oblivious", &self.pattern.is_some())
            .finish()
    }
}

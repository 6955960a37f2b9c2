//! Deterministic in-memory sensor network: nodes hold share envelopes, fail,
//! get captured, and are polled to rebuild stored data.

mod scenario;

pub use scenario::{
    parse_scenario, run_scenario, CollectReport, Event, Scenario, ScenarioError, ScenarioOutcome, StoreKind,
};

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::addressing::{self, AddressingError, PlacementSeed};
use crate::codec::{Scheme, ShareEnvelope};
use crate::composite::{self, CompositeKey};
use crate::partition::GroupId;
use crate::pipeline::{self, JoinOutput, PipelineError, SplitPlan, SplitScheme};

/// Composite keys generated inside the simulator.
pub const SIM_KEY_BITS: u64 = 128;
pub const SIM_KEY_EXPONENT: u32 = 65537;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("a network needs at least one node")]
    EmptyNetwork,
    #[error("no node {id} in a network of {size}")]
    UnknownNode { id: u64, size: u64 },
    #[error("no group {0}")]
    UnknownGroup(GroupId),
    #[error("envelopes do not form one share group")]
    MixedEnvelopes,
    #[error("group {0} is already stored")]
    DuplicateGroup(GroupId),
    #[error("unrecoverable: {available} distinct shares reachable, {needed} needed")]
    Unrecoverable { available: usize, needed: usize },
    #[error("shares rebuilt only the ciphertext; the composite key is not held")]
    CiphertextOnly,
    #[error("recovered data does not match the stored digest")]
    DigestMismatch,
    #[error(transparent)]
    Addressing(#[from] AddressingError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Composite(#[from] composite::CompositeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeStatus {
    Up,
    Failed,
    Captured,
}

impl NodeStatus {
    fn code(self) -> u8 {
        match self {
            NodeStatus::Up => 0,
            NodeStatus::Failed => 1,
            NodeStatus::Captured => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensorNode {
    id: u64,
    status: NodeStatus,
    store: BTreeMap<(GroupId, u16), ShareEnvelope>,
}

impl SensorNode {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn status(&self) -> NodeStatus {
        self.status
    }

    pub fn store(&self) -> &BTreeMap<(GroupId, u16), ShareEnvelope> {
        &self.store
    }

    /// What a collector gets back; failed and captured nodes answer nothing.
    fn reachable(&self) -> bool {
        self.status == NodeStatus::Up
    }
}

#[derive(Debug, Clone)]
struct GroupRecord {
    scheme: Scheme,
    k: usize,
    stored: usize,
    placement: Vec<u64>,
    /// SHA-256 of the data, known when the network split it itself.
    digest: Option<PlacementSeed>,
    key: Option<CompositeKey>,
    key_captured: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimReport {
    pub stored: usize,
    pub retrievable: bool,
    pub shares_available: usize,
    pub shares_needed: usize,
    pub adversary_shares: usize,
    pub adversary_learns_data: bool,
}

#[derive(Debug, Clone)]
pub struct Network {
    seed: PlacementSeed,
    nodes: Vec<SensorNode>,
    groups: BTreeMap<GroupId, GroupRecord>,
    adversary: BTreeMap<(GroupId, u16), ShareEnvelope>,
    rng: ChaCha20Rng,
}

impl Network {
    /// N up-nodes. The seed also drives every random choice the network
    /// makes for [`Network::store_data`].
    pub fn new(size: u64, seed: PlacementSeed) -> Result<Self, SimError> {
        if size == 0 {
            return Err(SimError::EmptyNetwork);
        }
        let nodes = (0..size)
            .map(|id| SensorNode {
                id,
                status: NodeStatus::Up,
                store: BTreeMap::new(),
            })
            .collect();
        Ok(Network {
            seed,
            nodes,
            groups: BTreeMap::new(),
            adversary: BTreeMap::new(),
            rng: ChaCha20Rng::from_seed(seed.0),
        })
    }

    pub fn size(&self) -> u64 {
        self.nodes.len() as u64
    }

    pub fn nodes(&self) -> &[SensorNode] {
        &self.nodes
    }

    pub fn node(&self, id: u64) -> Result<&SensorNode, SimError> {
        self.nodes
            .get(id as usize)
            .ok_or(SimError::UnknownNode { id, size: self.size() })
    }

    fn node_mut(&mut self, id: u64) -> Result<&mut SensorNode, SimError> {
        let size = self.size();
        self.nodes
            .get_mut(id as usize)
            .ok_or(SimError::UnknownNode { id, size })
    }

    pub fn groups(&self) -> impl Iterator<Item = GroupId> + '_ {
        self.groups.keys().copied()
    }

    /// Nodes holding the group's envelopes, in share order.
    pub fn placement(&self, group: GroupId) -> Result<&[u64], SimError> {
        Ok(&self.record(group)?.placement)
    }

    pub fn group_scheme(&self, group: GroupId) -> Result<Scheme, SimError> {
        Ok(self.record(group)?.scheme)
    }

    fn record(&self, group: GroupId) -> Result<&GroupRecord, SimError> {
        self.groups.get(&group).ok_or(SimError::UnknownGroup(group))
    }

    /// Stores envelope j on node `sensor_sequence(seed, len, N)[j]`.
    pub fn scatter(&mut self, envelopes: &[ShareEnvelope], seed: &PlacementSeed) -> Result<Vec<u64>, SimError> {
        let first = envelopes.first().ok_or(SimError::MixedEnvelopes)?;
        let group = first.group_id;
        if envelopes
            .iter()
            .any(|e| e.group_id != group || e.scheme != first.scheme || e.k != first.k)
        {
            return Err(SimError::MixedEnvelopes);
        }
        if self.groups.contains_key(&group) {
            return Err(SimError::DuplicateGroup(group));
        }
        let placement = addressing::sensor_sequence(seed, envelopes.len(), self.size())?;
        for (env, &id) in envelopes.iter().zip(&placement) {
            let node = &mut self.nodes[id as usize];
            let slot = (group, env.share_index);
            node.store.insert(slot, env.clone());
            if node.status == NodeStatus::Captured {
                self.adversary.insert(slot, env.clone());
            }
        }
        self.groups.insert(
            group,
            GroupRecord {
                scheme: first.scheme,
                k: first.k.into(),
                stored: envelopes.len(),
                placement: placement.clone(),
                digest: None,
                key: None,
                key_captured: false,
            },
        );
        Ok(placement)
    }

    /// Splits, scatters under the data's own digest, and keeps the composite
    /// key with the owner.
    pub fn store_data(&mut self, data: &[u8], plan: &SplitPlan) -> Result<GroupId, SimError> {
        let (group, envelopes) = pipeline::split_bytes(data, plan, &mut self.rng)?;
        let digest = addressing::derive_seed(data);
        self.scatter(&envelopes, &digest)?;
        let record = self.groups.get_mut(&group).expect("just scattered");
        record.digest = Some(digest);
        if let SplitScheme::Composite(key) = &plan.scheme {
            record.key = Some(key.clone());
        }
        Ok(group)
    }

    /// Generates a composite key from the network's random stream.
    pub fn generate_key(&mut self) -> Result<CompositeKey, SimError> {
        Ok(composite::keygen(
            SIM_KEY_BITS,
            &BigUint::from(SIM_KEY_EXPONENT),
            &mut self.rng,
        )?)
    }

    pub fn fail_node(&mut self, id: u64) -> Result<(), SimError> {
        self.node_mut(id)?.status = NodeStatus::Failed;
        Ok(())
    }

    /// The adversary takes a copy of everything the node holds, whatever its
    /// state. Nothing is deleted.
    pub fn capture_node(&mut self, id: u64) -> Result<(), SimError> {
        let node = self.node_mut(id)?;
        node.status = NodeStatus::Captured;
        let copied: Vec<_> = node.store.iter().map(|(s, e)| (*s, e.clone())).collect();
        self.adversary.extend(copied);
        Ok(())
    }

    pub fn capture_key(&mut self, group: GroupId) -> Result<(), SimError> {
        self.groups
            .get_mut(&group)
            .ok_or(SimError::UnknownGroup(group))?
            .key_captured = true;
        Ok(())
    }

    fn reachable_shares(&self, group: GroupId) -> Vec<ShareEnvelope> {
        self.nodes
            .iter()
            .filter(|n| n.reachable())
            .flat_map(|n| n.store.iter())
            .filter(|((g, _), _)| *g == group)
            .map(|(_, e)| e.clone())
            .collect()
    }

    /// Polls up-nodes for the group's shares and rebuilds the bytes.
    pub fn collect_and_reconstruct(&self, group: GroupId) -> Result<Vec<u8>, SimError> {
        let record = self.record(group)?;
        let shares = self.reachable_shares(group);
        if shares.is_empty() {
            return Err(SimError::Unrecoverable {
                available: 0,
                needed: record.k,
            });
        }
        let data = match pipeline::join_envelopes(&shares, record.key.as_ref()) {
            Ok(JoinOutput::Data(data)) => data,
            Ok(JoinOutput::Ciphertext(_)) => return Err(SimError::CiphertextOnly),
            Ok(JoinOutput::Datum(_)) => return Err(SimError::MixedEnvelopes),
            Err(PipelineError::Unrecoverable { available, needed }) => {
                return Err(SimError::Unrecoverable { available, needed })
            }
            Err(PipelineError::Redundancy(crate::RedundancyError::NotEnoughShares { available, needed })) => {
                return Err(SimError::Unrecoverable { available, needed })
            }
            Err(e) => return Err(e.into()),
        };
        if record.digest.is_some_and(|d| d != addressing::derive_seed(&data)) {
            return Err(SimError::DigestMismatch);
        }
        Ok(data)
    }

    pub fn adversary_shares(&self, group: GroupId) -> usize {
        self.adversary.keys().filter(|(g, _)| *g == group).count()
    }

    pub fn adversary_report(&self, group: GroupId) -> Result<SimReport, SimError> {
        let record = self.record(group)?;
        let adversary_shares = self.adversary_shares(group);
        let mut available: Vec<u16> = self.reachable_shares(group).iter().map(|e| e.share_index).collect();
        available.sort_unstable();
        available.dedup();
        let threshold_met = adversary_shares >= record.k;
        let adversary_learns_data = match record.scheme {
            Scheme::Composite => threshold_met && record.key_captured,
            _ => threshold_met,
        };
        Ok(SimReport {
            stored: record.stored,
            retrievable: self.collect_and_reconstruct(group).is_ok(),
            shares_available: available.len(),
            shares_needed: record.k,
            adversary_shares,
            adversary_learns_data,
        })
    }

    /// Envelopes held per node; the simulator does no load balancing.
    pub fn share_counts(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.store.len()).collect()
    }

    /// SHA-256 over the topology: tag, N, seed, then per node its id, status
    /// code, store size and stored (group, index) slots.
    pub fn fingerprint(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"rootsplit-net");
        h.update(self.size().to_be_bytes());
        h.update(self.seed.0);
        for node in &self.nodes {
            h.update(node.id.to_be_bytes());
            h.update([node.status.code()]);
            h.update((node.store.len() as u32).to_be_bytes());
            for (group, index) in node.store.keys() {
                h.update(group.0);
                h.update(index.to_be_bytes());
            }
        }
        h.finalize().into()
    }
}

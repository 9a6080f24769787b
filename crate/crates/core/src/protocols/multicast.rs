//! The four coordinate-aware multi-broadcast protocols, each a schedule for [`PipelineNode`].

use super::backbone::{compute_backbone, Backbone, Role};
use super::common::{bits_for, Dilution};
use super::pipeline::{Level, PipelineNode, Plan, Setup};
use crate::engine::{KnowledgeView, Protocol, ProtocolError, Setting};
use crate::network::{RumorId, StationId};
use crate::scalar::Real;
use crate::selectors::shared_ssf;
use crate::sinr::{min_dilution, pivotal_box, safe_dilution_constant, GridCoord, SinrParams};
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

/// Dilution for one transmitter per pivotal box. At least 5 so that the sub-round of a message
/// identifies the sender's box among the boxes in range.
pub fn box_dilution<T: Real>(p: &SinrParams<T>) -> Dilution {
    Dilution { delta: safe_dilution_constant(p).max(5) }
}

/// Slots for gathering: every source speaks its rumors, names its children and hands over.
pub fn gather_slots(k: usize) -> u64 {
    3 * k as u64 + 1
}

fn base_plan<T: Real>(view: &KnowledgeView<'_, T>) -> Plan<T> {
    let p = view.params();
    let mut plan = Plan::new(box_dilution(p), view.id_space());
    let x = view.k().min(view.n()).max(1) as u32;
    plan.collect = Some(shared_ssf(view.id_space(), x));
    plan.gather_slots = gather_slots(view.k());
    plan
}

fn setup<T: Real>(
    view: &KnowledgeView<'_, T>,
    rumors: &BTreeSet<RumorId>,
    neighbors: Option<BTreeMap<StationId, GridCoord>>,
    roles: Option<BTreeSet<Role>>,
) -> Result<Setup<T>, ProtocolError> {
    let pos = view.own_position()?;
    Ok(Setup {
        id: view.id(),
        pos,
        cell: pivotal_box(pos, view.params()),
        n: view.n(),
        own: rumors.iter().copied().collect(),
        neighbors,
        roles,
    })
}

fn neighbor_boxes<T: Real>(view: &KnowledgeView<'_, T>) -> Result<BTreeMap<StationId, GridCoord>, ProtocolError> {
    Ok(view.neighbors_with_positions()?.into_iter().map(|(id, q)| (id, pivotal_box(q, view.params()))).collect())
}

/// Per-run cache of work derived from the full topology, keyed by a fingerprint of the instance.
#[derive(Debug, Default)]
struct TopologyCache<T> {
    slot: Mutex<Option<(u64, Arc<Plan<T>>, Arc<Backbone>)>>,
}

fn fingerprint<T: Real>(view: &KnowledgeView<'_, T>, tag: u8) -> Result<u64, ProtocolError> {
    let mut h = DefaultHasher::new();
    tag.hash(&mut h);
    (view.k(), view.id_space()).hash(&mut h);
    let p = view.params();
    for v in [p.alpha, p.beta, p.noise, p.epsilon, p.power] {
        v.to_f64_lossy().to_bits().hash(&mut h);
    }
    for s in view.network()?.stations() {
        (s.id.0, s.pos.x.to_f64_lossy().to_bits(), s.pos.y.to_f64_lossy().to_bits()).hash(&mut h);
    }
    Ok(h.finish())
}

impl<T: Real> TopologyCache<T> {
    fn get(
        &self,
        view: &KnowledgeView<'_, T>,
        tag: u8,
        make: impl FnOnce(&Backbone) -> Result<Plan<T>, ProtocolError>,
    ) -> Result<(Arc<Plan<T>>, Arc<Backbone>), ProtocolError> {
        let key = fingerprint(view, tag)?;
        let mut slot = self.slot.lock().expect("cache poisoned");
        if let Some((k, plan, bb)) = slot.as_ref() {
            if *k == key {
                return Ok((plan.clone(), bb.clone()));
            }
        }
        let bb = Arc::new(compute_backbone(view.network()?, view.params(), view.graph()?));
        let plan = Arc::new(make(&bb)?.finish());
        *slot = Some((key, plan.clone(), bb.clone()));
        Ok((plan, bb))
    }
}

fn full_node<T: Real>(
    view: &KnowledgeView<'_, T>,
    rumors: &BTreeSet<RumorId>,
    plan: Arc<Plan<T>>,
    bb: &Backbone,
) -> Result<PipelineNode<T>, ProtocolError> {
    let roles = bb.roles_of(view.id()).into_iter().collect();
    let s = setup(view, rumors, Some(neighbor_boxes(view)?), Some(roles))?;
    Ok(PipelineNode::new(plan, s))
}

fn full_push<T: Real>(view: &KnowledgeView<'_, T>, bb: &Backbone) -> Result<u64, ProtocolError> {
    let d = bb.diameter(view.graph()?).unwrap_or(view.n());
    Ok(d as u64 + 2 * view.k() as u64 + 2)
}

/// Full topology, granularity-independent: collect, gather, push along the precomputed backbone.
#[derive(Debug, Default)]
pub struct CentralGranIndependent {
    cache: TopologyCache<f64>,
    cache32: TopologyCache<f32>,
}

/// Full topology, granularity-dependent: granularity doubling replaces the collect step.
#[derive(Debug, Default)]
pub struct CentralGranDependent {
    cache: TopologyCache<f64>,
    cache32: TopologyCache<f32>,
}

/// Neighbours with coordinates: the backbone is built in wake-up epochs spreading from sources.
#[derive(Debug, Clone, Default)]
pub struct LocalMulticast;

/// Own coordinates only: neighbourhoods are discovered in id-slot passes before the backbone is built.
#[derive(Debug, Clone, Default)]
pub struct GeneralMulticast;

trait Caches<T> {
    fn cache(&self) -> &TopologyCache<T>;
}

macro_rules! caches {
    ($ty:ty) => {
        impl Caches<f64> for $ty {
            fn cache(&self) -> &TopologyCache<f64> {
                &self.cache
            }
        }
        impl Caches<f32> for $ty {
            fn cache(&self) -> &TopologyCache<f32> {
                &self.cache32
            }
        }
    };
}
caches!(CentralGranIndependent);
caches!(CentralGranDependent);

/// Plan for the full-topology protocol without doubling.
pub fn cgi_plan<T: Real>(view: &KnowledgeView<'_, T>, bb: &Backbone) -> Result<Plan<T>, ProtocolError> {
    let mut plan = base_plan(view);
    plan.push_invocations = full_push(view, bb)?;
    Ok(plan)
}

/// Doubling levels from cells of side `gamma / h` (h the least power of two `>= g`) up to the
/// pivotal grid.
pub fn doubling_levels<T: Real>(p: &SinrParams<T>, g: f64) -> Result<(T, Vec<Level<T>>), ProtocolError> {
    let mut h: u64 = 1;
    while (h as f64) < g {
        h *= 2;
    }
    let base = p.gamma() / T::lit(h as f64);
    let mut levels = Vec::new();
    let mut side = base;
    while side < p.gamma() {
        side = side * T::lit(2.0);
        let reach = side * T::lit(2.0).sqrt();
        let delta = min_dilution(p, side, reach, 1)
            .ok_or_else(|| ProtocolError::Contract("no dilution separates doubling cells".into()))?;
        let span = (p.range() / side).ceil().to_f64_lossy() as u64;
        let modulus = (2 * span + 3).next_power_of_two();
        levels.push(Level { side, dil: Dilution { delta }, modulus_bits: bits_for(modulus - 1) as u8 });
    }
    Ok((base, levels))
}

pub fn cgd_plan<T: Real>(view: &KnowledgeView<'_, T>, bb: &Backbone) -> Result<Plan<T>, ProtocolError> {
    let mut plan = base_plan(view);
    plan.collect = None;
    let (base, levels) = doubling_levels(view.params(), view.granularity()?)?;
    plan.base_side = base;
    plan.levels = levels;
    plan.push_invocations = full_push(view, bb)?;
    Ok(plan)
}

pub fn local_plan<T: Real>(view: &KnowledgeView<'_, T>) -> Result<Plan<T>, ProtocolError> {
    let mut plan = base_plan(view);
    let (d, delta) = (view.diameter()? as u64, view.max_degree()? as u64);
    plan.epochs = d + 1;
    plan.wake_slots = delta + 1;
    plan.mask_slots = delta + 1;
    // backbone paths between leaders take at most three hops per box crossed
    plan.push_invocations = 3 * d + 2 + 2 * view.k() as u64 + 2;
    Ok(plan.finish())
}

pub fn general_plan<T: Real>(view: &KnowledgeView<'_, T>) -> Plan<T> {
    let mut plan = base_plan(view);
    let n = view.n() as u64;
    plan.discovery_passes = n;
    plan.epochs = 1;
    plan.mask_slots = n;
    plan.push_invocations = n + 2 * view.k() as u64 + 1;
    plan.finish()
}

macro_rules! central {
    ($ty:ty, $name:literal, $tag:literal, $plan:ident) => {
        impl<T: Real> Protocol<T> for $ty
        where
            $ty: Caches<T>,
        {
            type Node = PipelineNode<T>;

            fn name(&self) -> &'static str {
                $name
            }

            fn setting(&self) -> Setting {
                Setting::FullTopology
            }

            fn build(&self, view: &KnowledgeView<'_, T>, rumors: &BTreeSet<RumorId>) -> Result<PipelineNode<T>, ProtocolError> {
                let (plan, bb) = self.cache().get(view, $tag, |bb| $plan(view, bb))?;
                full_node(view, rumors, plan, &bb)
            }
        }
    };
}
central!(CentralGranIndependent, "central-gran-independent", 1, cgi_plan);
central!(CentralGranDependent, "central-gran-dependent", 2, cgd_plan);

impl<T: Real> Protocol<T> for LocalMulticast {
    type Node = PipelineNode<T>;

    fn name(&self) -> &'static str {
        "local-multicast"
    }

    fn setting(&self) -> Setting {
        Setting::NeighborsWithCoords
    }

    fn build(&self, view: &KnowledgeView<'_, T>, rumors: &BTreeSet<RumorId>) -> Result<PipelineNode<T>, ProtocolError> {
        let plan = Arc::new(local_plan(view)?);
        Ok(PipelineNode::new(plan, setup(view, rumors, Some(neighbor_boxes(view)?), None)?))
    }
}

impl<T: Real> Protocol<T> for GeneralMulticast {
    type Node = PipelineNode<T>;

    fn name(&self) -> &'static str {
        "general-multicast"
    }

    fn setting(&self) -> Setting {
        Setting::OwnCoordsOnly
    }

    fn build(&self, view: &KnowledgeView<'_, T>, rumors: &BTreeSet<RumorId>) -> Result<PipelineNode<T>, ProtocolError> {
        let plan = Arc::new(general_plan(view));
        Ok(PipelineNode::new(plan, setup(view, rumors, None, None)?))
    }
}

//! The colored-graph building environment: connected graphs grown from the
//! empty state by first-node / add-node / add-edge actions, with stop legal
//! everywhere else. State identity is the canonical form in every symmetry
//! mode; the modes differ only in how actions are grouped into classes.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::gfn::{BackwardClass, ClassDesc, ClassEnv, StepOutcome};
use crate::graphsym::classes::{action_classes_oracle, action_classes_pe, apply_action};
use crate::graphsym::pe::{compute_features, node_key, pair_key, tagged, PeConfig, PeKey};
use crate::graphsym::{canonical_form, canonicalize, ActionClass, ColoredGraph, GraphAction};

use super::reward::RewardKind;

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSymmetry {
    /// Every concrete action is its own class (multiplicity 1); backward
    /// actions are likewise ungrouped. Reproduces the uncorrected baseline.
    Vanilla,
    /// Exact grouping by isomorphism of the successor (forward) or parent
    /// (backward) graph.
    Oracle,
    /// Approximate grouping by positional encodings.
    Pe(PeConfig),
}

impl GraphSymmetry {
    pub fn name(&self) -> &'static str {
        match self {
            GraphSymmetry::Vanilla => "vanilla",
            GraphSymmetry::Oracle => "oracle",
            GraphSymmetry::Pe(_) => "pe",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphEnvConfig {
    pub n_max: usize,
    pub n_colors: usize,
    pub reward: RewardKind,
    pub r0: f64,
    pub symmetry: GraphSymmetry,
}

impl Default for GraphEnvConfig {
    fn default() -> Self {
        GraphEnvConfig {
            n_max: 7,
            n_colors: 2,
            reward: RewardKind::Counting,
            r0: 0.1,
            symmetry: GraphSymmetry::Oracle,
        }
    }
}

/// All legal actions of a state, in a fixed order: first-node colors at
/// n = 0; otherwise add-node in (attach, color) order, then add-edge over
/// non-adjacent pairs, then stop.
pub fn graph_legal_actions(g: &ColoredGraph, n_max: usize, n_colors: usize) -> Vec<GraphAction> {
    let mut acts = Vec::new();
    if g.n() == 0 {
        for color in 0..n_colors as u8 {
            acts.push(GraphAction::AddFirstNode { color });
        }
        return acts;
    }
    if g.n() < n_max {
        for attach in 0..g.n() {
            for color in 0..n_colors as u8 {
                acts.push(GraphAction::AddNode { attach, color });
            }
        }
    }
    for (u, v) in g.non_edges() {
        acts.push(GraphAction::AddEdge { u, v });
    }
    acts.push(GraphAction::Stop);
    acts
}

/// Concrete backward moves of a state: removal of a degree-1 node (with its
/// edge), or removal of an edge whose deletion keeps the graph connected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BackwardMove {
    RemoveNode(usize),
    RemoveEdge(usize, usize),
}

pub fn graph_backward_moves(g: &ColoredGraph) -> Vec<BackwardMove> {
    let mut moves = Vec::new();
    for v in 0..g.n() {
        if g.degree(v) == 1 || g.n() == 1 {
            moves.push(BackwardMove::RemoveNode(v));
        }
    }
    for (u, v) in g.edges() {
        // a pendant edge is a bridge; its removal is a node removal instead
        if g.degree(u) > 1 && g.degree(v) > 1 && g.connected_without_edge(u, v) {
            moves.push(BackwardMove::RemoveEdge(u, v));
        }
    }
    moves
}

fn backward_parent(g: &ColoredGraph, m: BackwardMove) -> ColoredGraph {
    match m {
        BackwardMove::RemoveNode(v) => g.remove_node(v),
        BackwardMove::RemoveEdge(u, v) => {
            let mut h = g.clone();
            h.remove_edge(u, v);
            h
        }
    }
}

/// Cached per-state structure: forward classes with per-member successor
/// transitions, and backward classes with parent links.
struct StateInfo {
    classes: Vec<ClassDesc>,
    /// `member_steps[c][m]` — successor state index key and backward class
    /// for member `m` of forward class `c` (empty vec for the stop class).
    member_steps: Vec<Vec<(ColoredGraph, usize)>>,
    backward: Vec<BackwardClass<ColoredGraph>>,
    fwd_slots: Vec<Vec<u32>>,
    bwd_slots: Vec<Vec<u32>>,
}

/// The environment. States handed out are always canonical graphs; `step`
/// re-canonicalizes and resolves which backward class of the successor
/// undoes the applied action.
pub struct GraphEnv {
    pub cfg: GraphEnvConfig,
    info: RefCell<HashMap<Vec<u8>, Rc<StateInfo>>>,
}

impl GraphEnv {
    pub fn new(cfg: GraphEnvConfig) -> Self {
        assert!(cfg.n_max >= 1 && cfg.n_colors >= 1);
        GraphEnv { cfg, info: RefCell::new(HashMap::new()) }
    }

    pub fn actions(&self, g: &ColoredGraph) -> Vec<GraphAction> {
        graph_legal_actions(g, self.cfg.n_max, self.cfg.n_colors)
    }

    fn partition(&self, g: &ColoredGraph, actions: &[GraphAction]) -> Vec<ActionClass> {
        match &self.cfg.symmetry {
            GraphSymmetry::Vanilla => (0..actions.len())
                .map(|i| ActionClass { members: vec![i] })
                .collect(),
            GraphSymmetry::Oracle => {
                action_classes_oracle(g, actions).expect("state within canonicalization bounds")
            }
            GraphSymmetry::Pe(pe) => action_classes_pe(g, actions, pe),
        }
    }

    /// Groups the backward moves of `g` per the symmetry mode and resolves
    /// each member's parent plus the forward class inside that parent that
    /// leads back to (the class of) `g`.
    fn backward_classes(&self, g: &ColoredGraph) -> Vec<BackwardClass<ColoredGraph>> {
        let moves = graph_backward_moves(g);
        let key_of_self = canonical_form(g).expect("in bounds");
        // group moves by mode
        let groups: Vec<Vec<usize>> = match &self.cfg.symmetry {
            GraphSymmetry::Vanilla => (0..moves.len()).map(|i| vec![i]).collect(),
            GraphSymmetry::Oracle => {
                group_indices(moves.iter().map(|&m| {
                    canonical_form(&backward_parent(g, m)).expect("in bounds")
                }))
            }
            GraphSymmetry::Pe(pe) => {
                let feats = compute_features(g, pe);
                group_indices(moves.iter().map(|&m| -> PeKey {
                    match m {
                        BackwardMove::RemoveNode(v) => {
                            let mut k = node_key(pe, &feats, v);
                            k.push(u64::from(g.color(v)));
                            tagged(11, k)
                        }
                        BackwardMove::RemoveEdge(u, v) => tagged(12, pair_key(pe, &feats, u, v)),
                    }
                }))
            }
        };
        groups
            .into_iter()
            .map(|members| {
                let mut links: Vec<(ColoredGraph, usize, u32)> = Vec::new();
                for &mi in &members {
                    let (parent, _) = canonicalize(&backward_parent(g, moves[mi])).expect("in bounds");
                    let fclass = self.class_into(&parent, &key_of_self);
                    match links.iter_mut().find(|(p, c, _)| *c == fclass && same_graph(p, &parent)) {
                        Some(link) => link.2 += 1,
                        None => links.push((parent, fclass, 1)),
                    }
                }
                BackwardClass { links }
            })
            .collect()
    }

    /// Index of the forward class of (canonical) `parent` whose successors
    /// are in the state identified by `child_key`. In PE mode a class may
    /// group non-isomorphic successors, so every member is checked.
    fn class_into(&self, parent: &ColoredGraph, child_key: &[u8]) -> usize {
        let info = self.state_info(parent);
        for (c, steps) in info.member_steps.iter().enumerate() {
            for (succ, _) in steps {
                if canonical_form(succ).expect("in bounds") == child_key {
                    return c;
                }
            }
        }
        unreachable!("child not reachable from parent");
    }

    fn state_info(&self, g: &ColoredGraph) -> Rc<StateInfo> {
        let key = canonical_form(g).expect("in bounds");
        if let Some(info) = self.info.borrow().get(&key) {
            return Rc::clone(info);
        }
        let info = Rc::new(self.build_info(g));
        self.info.borrow_mut().insert(key, Rc::clone(&info));
        info
    }

    fn build_info(&self, g: &ColoredGraph) -> StateInfo {
        let actions = self.actions(g);
        let partition = self.partition(g, &actions);
        let classes: Vec<ClassDesc> = partition
            .iter()
            .map(|c| ClassDesc {
                multiplicity: c.multiplicity(),
                is_stop: matches!(actions[c.members[0]], GraphAction::Stop),
            })
            .collect();
        let member_steps: Vec<Vec<(ColoredGraph, usize)>> = partition
            .iter()
            .map(|class| {
                class
                    .members
                    .iter()
                    .filter_map(|&ai| {
                        let raw = apply_action(g, &actions[ai])?;
                        let (succ, old_to_new) = canonicalize(&raw).expect("in bounds");
                        let inverse = match actions[ai] {
                            GraphAction::AddFirstNode { .. } => BackwardMove::RemoveNode(old_to_new[0]),
                            GraphAction::AddNode { .. } => {
                                BackwardMove::RemoveNode(old_to_new[raw.n() - 1])
                            }
                            GraphAction::AddEdge { u, v } => {
                                let (a, b) = (old_to_new[u], old_to_new[v]);
                                BackwardMove::RemoveEdge(a.min(b), a.max(b))
                            }
                            GraphAction::Stop => unreachable!(),
                        };
                        let bclass = self.backward_class_of(&succ, inverse);
                        Some((succ, bclass))
                    })
                    .collect()
            })
            .collect();
        let backward = self.backward_classes(g);
        let (fwd_slots, bwd_slots) = self.slots(g, &partition, &actions);
        StateInfo { classes, member_steps, backward, fwd_slots, bwd_slots }
    }

    /// Which backward class of `g` contains the given concrete move.
    fn backward_class_of(&self, g: &ColoredGraph, wanted: BackwardMove) -> usize {
        let moves = graph_backward_moves(g);
        let idx = moves
            .iter()
            .position(|&m| m == wanted)
            .expect("inverse move must be legal in the successor");
        match &self.cfg.symmetry {
            GraphSymmetry::Vanilla => idx,
            GraphSymmetry::Oracle => {
                let keys: Vec<Vec<u8>> = moves
                    .iter()
                    .map(|&m| canonical_form(&backward_parent(g, m)).expect("in bounds"))
                    .collect();
                group_position(&keys, idx)
            }
            GraphSymmetry::Pe(pe) => {
                let feats = compute_features(g, pe);
                let keys: Vec<PeKey> = moves
                    .iter()
                    .map(|&m| match m {
                        BackwardMove::RemoveNode(v) => {
                            let mut k = node_key(pe, &feats, v);
                            k.push(u64::from(g.color(v)));
                            tagged(11, k)
                        }
                        BackwardMove::RemoveEdge(u, v) => tagged(12, pair_key(pe, &feats, u, v)),
                    })
                    .collect();
                group_position(&keys, idx)
            }
        }
    }

    fn slots(
        &self,
        g: &ColoredGraph,
        partition: &[ActionClass],
        actions: &[GraphAction],
    ) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
        let fwd = partition
            .iter()
            .map(|c| c.members.iter().map(|&ai| self.action_slot(&actions[ai])).collect())
            .collect();
        let moves = graph_backward_moves(g);
        let bwd_groups: Vec<Vec<usize>> = match &self.cfg.symmetry {
            GraphSymmetry::Vanilla => (0..moves.len()).map(|i| vec![i]).collect(),
            GraphSymmetry::Oracle => group_indices(moves.iter().map(|&m| {
                canonical_form(&backward_parent(g, m)).expect("in bounds")
            })),
            GraphSymmetry::Pe(pe) => {
                let feats = compute_features(g, pe);
                group_indices(moves.iter().map(|&m| match m {
                    BackwardMove::RemoveNode(v) => {
                        let mut k = node_key(pe, &feats, v);
                        k.push(u64::from(g.color(v)));
                        tagged(11, k)
                    }
                    BackwardMove::RemoveEdge(u, v) => tagged(12, pair_key(pe, &feats, u, v)),
                }))
            }
        };
        let bwd = bwd_groups
            .into_iter()
            .map(|ms| ms.into_iter().map(|mi| self.backward_slot(moves[mi])).collect())
            .collect();
        (fwd, bwd)
    }

    fn pair_slot(&self, u: usize, v: usize) -> u32 {
        // rank of (u, v), u < v, in lexicographic pair order over n_max nodes
        let n = self.cfg.n_max;
        (u * n - u * (u + 1) / 2 + (v - u - 1)) as u32
    }

    fn action_slot(&self, a: &GraphAction) -> u32 {
        let node_block = (self.cfg.n_max * self.cfg.n_colors) as u32;
        match *a {
            GraphAction::AddFirstNode { color } => u32::from(color),
            GraphAction::AddNode { attach, color } => {
                (attach * self.cfg.n_colors) as u32 + u32::from(color)
            }
            GraphAction::AddEdge { u, v } => node_block + self.pair_slot(u, v),
            GraphAction::Stop => self.fwd_slots() as u32 - 1,
        }
    }

    fn backward_slot(&self, m: BackwardMove) -> u32 {
        match m {
            BackwardMove::RemoveNode(v) => v as u32,
            BackwardMove::RemoveEdge(u, v) => self.cfg.n_max as u32 + self.pair_slot(u, v),
        }
    }
}

fn same_graph(a: &ColoredGraph, b: &ColoredGraph) -> bool {
    a == b
}

fn group_indices<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> Vec<Vec<usize>> {
    let mut class_of: HashMap<K, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, k) in keys.enumerate() {
        match class_of.entry(k) {
            std::collections::hash_map::Entry::Occupied(e) => groups[*e.get()].push(i),
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

fn group_position<K: std::hash::Hash + Eq + Clone>(keys: &[K], idx: usize) -> usize {
    let groups = group_indices(keys.iter().cloned());
    groups
        .iter()
        .position(|g| g.contains(&idx))
        .expect("index grouped")
}

impl ClassEnv for GraphEnv {
    type State = ColoredGraph;

    fn initial_state(&self) -> ColoredGraph {
        ColoredGraph::empty()
    }

    fn classes(&self, s: &ColoredGraph) -> Vec<ClassDesc> {
        self.state_info(s).classes.clone()
    }

    fn step(&self, s: &ColoredGraph, class: usize, member: u32) -> StepOutcome<ColoredGraph> {
        let info = self.state_info(s);
        let (succ, bclass) = info.member_steps[class][member as usize].clone();
        StepOutcome { state: succ, backward_class: bclass }
    }

    fn backward(&self, s: &ColoredGraph) -> Vec<BackwardClass<ColoredGraph>> {
        self.state_info(s).backward.clone()
    }

    fn reward(&self, s: &ColoredGraph) -> f64 {
        self.cfg.reward.eval(s, self.cfg.r0).expect("reward defined where stop is legal")
    }

    fn stop_legal(&self, s: &ColoredGraph) -> bool {
        s.n() >= 1
    }

    fn key(&self, s: &ColoredGraph) -> Vec<u8> {
        canonical_form(s).expect("in bounds")
    }

    fn grade(&self, s: &ColoredGraph) -> u64 {
        ((s.n() as u64) << 32) | s.edge_count() as u64
    }

    fn max_len(&self) -> usize {
        // grow to n_max nodes, then complete the graph, then stop
        let n = self.cfg.n_max;
        n + n * (n - 1) / 2 + 1
    }

    fn input_len(&self) -> usize {
        let n = self.cfg.n_max;
        n * self.cfg.n_colors + n * (n - 1) / 2
    }

    fn encode(&self, s: &ColoredGraph) -> Vec<f64> {
        let n = self.cfg.n_max;
        let mut x = vec![0.0; self.input_len()];
        for v in 0..s.n() {
            x[v * self.cfg.n_colors + s.color(v) as usize] = 1.0;
        }
        let base = n * self.cfg.n_colors;
        for (u, v) in s.edges() {
            x[base + self.pair_slot(u, v) as usize] = 1.0;
        }
        x
    }

    fn fwd_slots(&self) -> usize {
        let n = self.cfg.n_max;
        n * self.cfg.n_colors + n * (n - 1) / 2 + 1
    }

    fn bwd_slots(&self) -> usize {
        let n = self.cfg.n_max;
        n + n * (n - 1) / 2
    }

    fn fwd_class_slots(&self, s: &ColoredGraph) -> Vec<Vec<u32>> {
        self.state_info(s).fwd_slots.clone()
    }

    fn bwd_class_slots(&self, s: &ColoredGraph) -> Vec<Vec<u32>> {
        self.state_info(s).bwd_slots.clone()
    }
}

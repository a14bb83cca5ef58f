//! Streaming composition of kernel instances over bounded FIFO channels.
//!
//! Graphs follow Kahn-network discipline: every node is a deterministic
//! sequential process that blocks on its inputs in a fixed order, so the
//! output streams do not depend on the simulation schedule. Feedback edges
//! are rejected up front. Two composition patterns are supported, a linear
//! pipeline and a split-join, with round-robin distribution and collection
//! done by explicit `split`/`join` router nodes.
//!
//! The functional simulator fires nodes in rounds; the round order can be
//! seeded to exercise different interleavings, and a round in which nothing
//! can fire while tokens remain is reported as a deadlock naming the
//! blocked channel.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cycle_model::{estimate_cycles, CalibrationProfile, CycleEstimate, LoopSchedule, Style};
use crate::stencil::{
    Coeffs3x3, ResponseMode, StreamingConvState, SOBEL_GX_PAPER, SOBEL_GX_STANDARD,
    SOBEL_GY_PAPER, SOBEL_GY_STANDARD,
};

pub type Token = i32;

/// Named coefficient set or explicit matrices for a conv node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvKernelChoice {
    SobelStandard,
    SobelPaper,
    Custom {
        gx: [[i32; 3]; 3],
        gy: [[i32; 3]; 3],
    },
}

impl Default for ConvKernelChoice {
    fn default() -> Self {
        ConvKernelChoice::SobelStandard
    }
}

impl ConvKernelChoice {
    fn resolve(&self) -> Result<(Coeffs3x3, Coeffs3x3), DataflowError> {
        match self {
            ConvKernelChoice::SobelStandard => Ok((SOBEL_GX_STANDARD, SOBEL_GY_STANDARD)),
            ConvKernelChoice::SobelPaper => Ok((SOBEL_GX_PAPER, SOBEL_GY_PAPER)),
            ConvKernelChoice::Custom { gx, gy } => {
                let gx =
                    Coeffs3x3::new(*gx).map_err(|e| DataflowError::InvalidKind(e.to_string()))?;
                let gy =
                    Coeffs3x3::new(*gy).map_err(|e| DataflowError::InvalidKind(e.to_string()))?;
                Ok((gx, gy))
            }
        }
    }
}

/// Pointwise operation applied token by token.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum PointwiseOp {
    Scale { factor: i32 },
    Offset { delta: i32 },
    Abs,
    Clamp { min: i32, max: i32 },
}

impl PointwiseOp {
    pub fn apply(&self, x: Token) -> Token {
        match *self {
            PointwiseOp::Scale { factor } => x.saturating_mul(factor),
            PointwiseOp::Offset { delta } => x.saturating_add(delta),
            PointwiseOp::Abs => x.saturating_abs(),
            PointwiseOp::Clamp { min, max } => x.clamp(min, max),
        }
    }
}

/// What one instance computes. Conv consumes pixels 0..=255 in raster
/// order and emits the full raw response raster; threshold maps values to
/// 0/255 against a cut; split/join are the round-robin routers used by the
/// split-join pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum NodeKind {
    #[serde(rename = "conv2d_stream")]
    Conv2dStream {
        width: usize,
        height: usize,
        #[serde(default)]
        kernel: ConvKernelChoice,
    },
    Threshold {
        value: i32,
    },
    Passthrough,
    Pointwise {
        #[serde(flatten)]
        op: PointwiseOp,
    },
    Split {
        arity: usize,
    },
    Join {
        arity: usize,
    },
}

impl NodeKind {
    pub fn input_ports(&self) -> usize {
        match self {
            NodeKind::Join { arity } => *arity,
            _ => 1,
        }
    }

    pub fn output_ports(&self) -> usize {
        match self {
            NodeKind::Split { arity } => *arity,
            _ => 1,
        }
    }

    fn validate(&self) -> Result<(), DataflowError> {
        match self {
            NodeKind::Conv2dStream {
                width,
                height,
                kernel,
            } => {
                if *width < 3 || *height < 3 {
                    return Err(DataflowError::InvalidKind(format!(
                        "conv2d_stream needs width and height >= 3, got {width}x{height}"
                    )));
                }
                kernel.resolve()?;
                Ok(())
            }
            NodeKind::Pointwise {
                op: PointwiseOp::Clamp { min, max },
            } if min > max => Err(DataflowError::InvalidKind(format!(
                "clamp min {min} > max {max}"
            ))),
            NodeKind::Split { arity } | NodeKind::Join { arity } if *arity < 2 => Err(
                DataflowError::InvalidKind(format!("split/join arity must be >= 2, got {arity}")),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelInstance {
    pub id: String,
    pub kind: NodeKind,
}

/// One endpoint of a channel or external binding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortRef {
    pub instance: String,
    #[serde(default)]
    pub port: usize,
}

impl PortRef {
    pub fn new(instance: &str, port: usize) -> Self {
        PortRef {
            instance: instance.to_string(),
            port,
        }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.instance, self.port)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FifoChannel {
    pub from: PortRef,
    pub to: PortRef,
    pub depth: usize,
}

/// Role bindings for the supported composition patterns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PatternDescription {
    Pipeline {
        stages: Vec<String>,
    },
    SplitJoin {
        split: String,
        branches: Vec<Vec<String>>,
        join: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamGraph {
    pub instances: Vec<KernelInstance>,
    pub channels: Vec<FifoChannel>,
    pub pattern: PatternDescription,
    pub input: PortRef,
    pub output: PortRef,
}

#[derive(Debug)]
pub enum DataflowError {
    DuplicateId(String),
    UnknownInstance(String),
    BadPort(PortRef),
    InvalidKind(String),
    BadDepth {
        channel: String,
    },
    /// A port with no channel or binding, or with more than one.
    DanglingPort {
        port: String,
        detail: String,
    },
    UnreachableInstance(String),
    /// Feedback is unsupported.
    CycleDetected(String),
    PatternMismatch(String),
    /// Conv nodes only accept pixel tokens 0..=255.
    InvalidPixelToken {
        instance: String,
        value: Token,
    },
    Deadlock {
        instance: String,
        waiting_on: String,
    },
    Json(String),
    Estimate(String),
}

impl fmt::Display for DataflowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataflowError::DuplicateId(id) => write!(f, "duplicate instance id \"{id}\""),
            DataflowError::UnknownInstance(id) => write!(f, "unknown instance \"{id}\""),
            DataflowError::BadPort(p) => write!(f, "port {p} out of range"),
            DataflowError::InvalidKind(msg) => write!(f, "invalid kernel instance: {msg}"),
            DataflowError::BadDepth { channel } => {
                write!(f, "channel {channel} must have depth >= 1")
            }
            DataflowError::DanglingPort { port, detail } => {
                write!(f, "dangling port {port}: {detail}")
            }
            DataflowError::UnreachableInstance(id) => {
                write!(f, "instance \"{id}\" is unreachable from the external input")
            }
            DataflowError::CycleDetected(id) => write!(
                f,
                "cycle detected through instance \"{id}\"; feedback is unsupported"
            ),
            DataflowError::PatternMismatch(msg) => write!(f, "pattern mismatch: {msg}"),
            DataflowError::InvalidPixelToken { instance, value } => write!(
                f,
                "instance \"{instance}\" got pixel token {value} outside 0..=255"
            ),
            DataflowError::Deadlock {
                instance,
                waiting_on,
            } => write!(
                f,
                "deadlock: instance \"{instance}\" blocked on channel {waiting_on} with tokens undrained"
            ),
            DataflowError::Json(msg) => write!(f, "bad graph json: {msg}"),
            DataflowError::Estimate(msg) => write!(f, "cannot estimate: {msg}"),
        }
    }
}

impl std::error::Error for DataflowError {}

impl StreamGraph {
    pub fn from_json(text: &str) -> Result<Self, DataflowError> {
        serde_json::from_str(text).map_err(|e| DataflowError::Json(e.to_string()))
    }

    fn instance_index(&self, id: &str) -> Result<usize, DataflowError> {
        self.instances
            .iter()
            .position(|i| i.id == id)
            .ok_or_else(|| DataflowError::UnknownInstance(id.to_string()))
    }
}

/// Structural and pattern checks, in order: ids and kinds, channel
/// endpoints and depths, cycle detection, port exactness including the
/// external bindings, reachability from the input, pattern conformance.
pub fn validate_graph(graph: &StreamGraph) -> Result<(), DataflowError> {
    let mut seen = std::collections::HashSet::new();
    for inst in &graph.instances {
        if inst.id.is_empty() {
            return Err(DataflowError::InvalidKind("empty instance id".into()));
        }
        if !seen.insert(inst.id.clone()) {
            return Err(DataflowError::DuplicateId(inst.id.clone()));
        }
        inst.kind.validate()?;
    }
    if graph.instances.is_empty() {
        return Err(DataflowError::PatternMismatch(
            "graph has no instances".into(),
        ));
    }

    let port_in_range = |p: &PortRef, output: bool| -> Result<usize, DataflowError> {
        let idx = graph.instance_index(&p.instance)?;
        let limit = if output {
            graph.instances[idx].kind.output_ports()
        } else {
            graph.instances[idx].kind.input_ports()
        };
        if p.port >= limit {
            return Err(DataflowError::BadPort(p.clone()));
        }
        Ok(idx)
    };
    for ch in &graph.channels {
        port_in_range(&ch.from, true)?;
        port_in_range(&ch.to, false)?;
        if ch.depth == 0 {
            return Err(DataflowError::BadDepth {
                channel: format!("{} -> {}", ch.from, ch.to),
            });
        }
    }
    port_in_range(&graph.input, false)?;
    port_in_range(&graph.output, true)?;

    // Cycle check on the instance digraph induced by the channels.
    let n = graph.instances.len();
    let mut adj = vec![Vec::new(); n];
    for ch in &graph.channels {
        let fi = graph.instance_index(&ch.from.instance)?;
        let ti = graph.instance_index(&ch.to.instance)?;
        adj[fi].push(ti);
    }
    // 0 = unvisited, 1 = on stack, 2 = done.
    let mut state = vec![0u8; n];
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state[start] = 1;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if *next < adj[node].len() {
                let succ = adj[node][*next];
                *next += 1;
                match state[succ] {
                    0 => {
                        state[succ] = 1;
                        stack.push((succ, 0));
                    }
                    1 => {
                        return Err(DataflowError::CycleDetected(
                            graph.instances[succ].id.clone(),
                        ))
                    }
                    _ => {}
                }
            } else {
                state[node] = 2;
                stack.pop();
            }
        }
    }

    // Every port connected exactly once, counting the external bindings.
    let mut in_feeds: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    let mut out_feeds: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    for ch in &graph.channels {
        let fi = graph.instance_index(&ch.from.instance)?;
        let ti = graph.instance_index(&ch.to.instance)?;
        *out_feeds.entry((fi, ch.from.port)).or_insert(0) += 1;
        *in_feeds.entry((ti, ch.to.port)).or_insert(0) += 1;
    }
    let ii = graph.instance_index(&graph.input.instance)?;
    *in_feeds.entry((ii, graph.input.port)).or_insert(0) += 1;
    let oi = graph.instance_index(&graph.output.instance)?;
    *out_feeds.entry((oi, graph.output.port)).or_insert(0) += 1;
    for (idx, inst) in graph.instances.iter().enumerate() {
        for port in 0..inst.kind.input_ports() {
            match in_feeds.get(&(idx, port)).copied().unwrap_or(0) {
                1 => {}
                0 => {
                    return Err(DataflowError::DanglingPort {
                        port: format!("{}.{port} (input)", inst.id),
                        detail: "no channel or binding feeds it".into(),
                    })
                }
                k => {
                    return Err(DataflowError::DanglingPort {
                        port: format!("{}.{port} (input)", inst.id),
                        detail: format!("{k} producers connected"),
                    })
                }
            }
        }
        for port in 0..inst.kind.output_ports() {
            match out_feeds.get(&(idx, port)).copied().unwrap_or(0) {
                1 => {}
                0 => {
                    return Err(DataflowError::DanglingPort {
                        port: format!("{}.{port} (output)", inst.id),
                        detail: "no channel or binding drains it".into(),
                    })
                }
                k => {
                    return Err(DataflowError::DanglingPort {
                        port: format!("{}.{port} (output)", inst.id),
                        detail: format!("{k} consumers connected"),
                    })
                }
            }
        }
    }

    // Reachability from the externally fed instance.
    let mut reach = vec![false; n];
    let mut queue = VecDeque::from([ii]);
    reach[ii] = true;
    while let Some(node) = queue.pop_front() {
        for &succ in &adj[node] {
            if !reach[succ] {
                reach[succ] = true;
                queue.push_back(succ);
            }
        }
    }
    for (idx, r) in reach.iter().enumerate() {
        if !r {
            return Err(DataflowError::UnreachableInstance(
                graph.instances[idx].id.clone(),
            ));
        }
    }

    validate_pattern(graph)
}

fn expect_channel(graph: &StreamGraph, from: &PortRef, to: &PortRef) -> Result<(), DataflowError> {
    let found = graph
        .channels
        .iter()
        .any(|ch| ch.from == *from && ch.to == *to);
    if found {
        Ok(())
    } else {
        Err(DataflowError::PatternMismatch(format!(
            "expected a channel {from} -> {to}"
        )))
    }
}

fn validate_pattern(graph: &StreamGraph) -> Result<(), DataflowError> {
    match &graph.pattern {
        PatternDescription::Pipeline { stages } => {
            if stages.is_empty() {
                return Err(DataflowError::PatternMismatch(
                    "pipeline has no stages".into(),
                ));
            }
            if stages.len() != graph.instances.len() {
                return Err(DataflowError::PatternMismatch(format!(
                    "pipeline binds {} stages but the graph has {} instances",
                    stages.len(),
                    graph.instances.len()
                )));
            }
            for id in stages {
                let idx = graph.instance_index(id)?;
                let kind = &graph.instances[idx].kind;
                if kind.input_ports() != 1 || kind.output_ports() != 1 {
                    return Err(DataflowError::PatternMismatch(format!(
                        "pipeline stage \"{id}\" must be single-input single-output"
                    )));
                }
            }
            if graph.channels.len() != stages.len() - 1 {
                return Err(DataflowError::PatternMismatch(format!(
                    "pipeline of {} stages needs {} channels, got {}",
                    stages.len(),
                    stages.len() - 1,
                    graph.channels.len()
                )));
            }
            for pair in stages.windows(2) {
                expect_channel(
                    graph,
                    &PortRef::new(&pair[0], 0),
                    &PortRef::new(&pair[1], 0),
                )?;
            }
            if graph.input != PortRef::new(&stages[0], 0) {
                return Err(DataflowError::PatternMismatch(
                    "external input must feed the first stage".into(),
                ));
            }
            if graph.output != PortRef::new(stages.last().expect("nonempty"), 0) {
                return Err(DataflowError::PatternMismatch(
                    "external output must drain the last stage".into(),
                ));
            }
            Ok(())
        }
        PatternDescription::SplitJoin {
            split,
            branches,
            join,
        } => {
            let si = graph.instance_index(split)?;
            let ji = graph.instance_index(join)?;
            let arity = branches.len();
            match &graph.instances[si].kind {
                NodeKind::Split { arity: a } if *a == arity => {}
                _ => {
                    return Err(DataflowError::PatternMismatch(format!(
                        "\"{split}\" must be a split of arity {arity}"
                    )))
                }
            }
            match &graph.instances[ji].kind {
                NodeKind::Join { arity: a } if *a == arity => {}
                _ => {
                    return Err(DataflowError::PatternMismatch(format!(
                        "\"{join}\" must be a join of arity {arity}"
                    )))
                }
            }
            let mut bound = 2usize;
            for (b, branch) in branches.iter().enumerate() {
                if branch.is_empty() {
                    return Err(DataflowError::PatternMismatch(format!(
                        "branch {b} is empty"
                    )));
                }
                expect_channel(graph, &PortRef::new(split, b), &PortRef::new(&branch[0], 0))?;
                for pair in branch.windows(2) {
                    expect_channel(
                        graph,
                        &PortRef::new(&pair[0], 0),
                        &PortRef::new(&pair[1], 0),
                    )?;
                }
                expect_channel(
                    graph,
                    &PortRef::new(branch.last().expect("nonempty"), 0),
                    &PortRef::new(join, b),
                )?;
                bound += branch.len();
            }
            if bound != graph.instances.len() {
                return Err(DataflowError::PatternMismatch(format!(
                    "pattern binds {} instances but the graph has {}",
                    bound,
                    graph.instances.len()
                )));
            }
            if graph.input != PortRef::new(split, 0) {
                return Err(DataflowError::PatternMismatch(
                    "external input must feed the split".into(),
                ));
            }
            if graph.output != PortRef::new(join, 0) {
                return Err(DataflowError::PatternMismatch(
                    "external output must drain the join".into(),
                ));
            }
            Ok(())
        }
    }
}

/// Simulation products: the drained output stream and the peak occupancy
/// of every channel (parallel to `graph.channels`).
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub outputs: Vec<Token>,
    pub channel_peaks: Vec<usize>,
}

struct Chan {
    q: VecDeque<Token>,
    cap: usize,
    closed: bool,
    peak: usize,
}

impl Chan {
    fn can_push(&self) -> bool {
        self.q.len() < self.cap
    }

    fn push(&mut self, t: Token) {
        debug_assert!(self.can_push(), "FIFO overflow");
        self.q.push_back(t);
        self.peak = self.peak.max(self.q.len());
    }

    fn starved(&self) -> bool {
        self.q.is_empty() && self.closed
    }
}

enum NodeState {
    Conv {
        state: StreamingConvState,
        consumed: usize,
        total: usize,
        trailing: usize,
    },
    Map(NodeKind),
    Split { next: usize },
    Join { next: usize },
}

struct SimNode {
    id: String,
    state: NodeState,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    done: bool,
}

/// Tiny deterministic generator for schedule shuffling (splitmix64).
struct ScheduleRng(u64);

impl ScheduleRng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}

/// Runs the graph to completion on one input stream. The result is
/// schedule-independent; `schedule_seed` only perturbs the firing order.
pub fn run_functional_seeded(
    graph: &StreamGraph,
    input: &[Token],
    schedule_seed: u64,
) -> Result<RunResult, DataflowError> {
    validate_graph(graph)?;

    let n = graph.instances.len();
    // Real channels first, then one pseudo channel for the external input
    // and one for the external output; the pseudo channels are unbounded
    // so the externals never throttle the graph.
    let mut chans: Vec<Chan> = graph
        .channels
        .iter()
        .map(|c| Chan {
            q: VecDeque::new(),
            cap: c.depth,
            closed: false,
            peak: 0,
        })
        .collect();
    let ext_in = chans.len();
    chans.push(Chan {
        q: input.iter().copied().collect(),
        cap: usize::MAX,
        closed: true,
        peak: input.len(),
    });
    let ext_out = chans.len();
    chans.push(Chan {
        q: VecDeque::new(),
        cap: usize::MAX,
        closed: false,
        peak: 0,
    });

    let mut nodes: Vec<SimNode> = Vec::with_capacity(n);
    for inst in &graph.instances {
        let mut inputs = vec![usize::MAX; inst.kind.input_ports()];
        let mut outputs = vec![usize::MAX; inst.kind.output_ports()];
        for (ci, ch) in graph.channels.iter().enumerate() {
            if ch.to.instance == inst.id {
                inputs[ch.to.port] = ci;
            }
            if ch.from.instance == inst.id {
                outputs[ch.from.port] = ci;
            }
        }
        if graph.input.instance == inst.id {
            inputs[graph.input.port] = ext_in;
        }
        if graph.output.instance == inst.id {
            outputs[graph.output.port] = ext_out;
        }
        debug_assert!(inputs.iter().all(|&c| c != usize::MAX));
        debug_assert!(outputs.iter().all(|&c| c != usize::MAX));
        let state = match &inst.kind {
            NodeKind::Conv2dStream {
                width,
                height,
                kernel,
            } => {
                let (gx, gy) = kernel.resolve()?;
                NodeState::Conv {
                    state: StreamingConvState::new(*width, *height, gx, gy, ResponseMode::Raw)
                        .map_err(|e| DataflowError::InvalidKind(e.to_string()))?,
                    consumed: 0,
                    total: width * height,
                    trailing: width + 1,
                }
            }
            NodeKind::Split { .. } => NodeState::Split { next: 0 },
            NodeKind::Join { .. } => NodeState::Join { next: 0 },
            other => NodeState::Map(other.clone()),
        };
        nodes.push(SimNode {
            id: inst.id.clone(),
            state,
            inputs,
            outputs,
            done: false,
        });
    }

    let mut rng = ScheduleRng(schedule_seed.wrapping_mul(2).wrapping_add(1));
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        // Seeded Fisher-Yates so different seeds exercise different
        // interleavings.
        for i in (1..order.len()).rev() {
            let j = (rng.next() % (i as u64 + 1)) as usize;
            order.swap(i, j);
        }
        let mut progress = false;
        for &ni in &order {
            if nodes[ni].done {
                continue;
            }
            while fire_once(&mut nodes[ni], &mut chans)? {
                progress = true;
            }
            if nodes[ni].done {
                for &c in &nodes[ni].outputs {
                    chans[c].closed = true;
                }
            }
        }
        if nodes.iter().all(|nd| nd.done) {
            break;
        }
        if !progress {
            let (instance, waiting_on) = describe_block(graph, &nodes, &chans, ext_in);
            return Err(DataflowError::Deadlock {
                instance,
                waiting_on,
            });
        }
    }

    let outputs: Vec<Token> = chans[ext_out].q.iter().copied().collect();
    let channel_peaks: Vec<usize> = chans[..graph.channels.len()]
        .iter()
        .map(|c| c.peak)
        .collect();
    for (ci, peak) in channel_peaks.iter().enumerate() {
        debug_assert!(
            *peak <= graph.channels[ci].depth,
            "FIFO safety violated on channel {ci}"
        );
    }
    Ok(RunResult {
        outputs,
        channel_peaks,
    })
}

/// Runs with the default schedule.
pub fn run_functional(graph: &StreamGraph, input: &[Token]) -> Result<RunResult, DataflowError> {
    run_functional_seeded(graph, input, 0)
}

/// Fires one elementary step of a node if possible. Returns whether any
/// state changed; marks the node done when its stream is finished.
fn fire_once(node: &mut SimNode, chans: &mut [Chan]) -> Result<bool, DataflowError> {
    match &mut node.state {
        NodeState::Map(kind) => {
            let ic = node.inputs[0];
            let oc = node.outputs[0];
            if chans[ic].starved() {
                node.done = true;
                return Ok(false);
            }
            if chans[ic].q.is_empty() || !chans[oc].can_push() {
                return Ok(false);
            }
            let x = chans[ic].q.pop_front().expect("checked nonempty");
            let y = match kind {
                NodeKind::Passthrough => x,
                NodeKind::Threshold { value } => {
                    if x >= *value {
                        255
                    } else {
                        0
                    }
                }
                NodeKind::Pointwise { op } => op.apply(x),
                _ => unreachable!("map state only holds pointwise kinds"),
            };
            chans[oc].push(y);
            Ok(true)
        }
        NodeState::Conv {
            state,
            consumed,
            total,
            trailing,
        } => {
            let ic = node.inputs[0];
            let oc = node.outputs[0];
            if *consumed < *total {
                // When the upstream ends early this node stays blocked on
                // its input and the scheduler reports the deadlock.
                if chans[ic].q.is_empty() || !chans[oc].can_push() {
                    return Ok(false);
                }
                let x = chans[ic].q.pop_front().expect("checked nonempty");
                if !(0..=255).contains(&x) {
                    return Err(DataflowError::InvalidPixelToken {
                        instance: node.id.clone(),
                        value: x,
                    });
                }
                *consumed += 1;
                let out = state
                    .push_pixel(x as u8)
                    .map_err(|e| DataflowError::InvalidKind(e.to_string()))?;
                if let Some(o) = out {
                    chans[oc].push(o.value);
                }
                Ok(true)
            } else if *trailing > 0 {
                if !chans[oc].can_push() {
                    return Ok(false);
                }
                // The centers never reached by the lagging cursor are all
                // borders; flush their zeros to complete the raster.
                chans[oc].push(0);
                *trailing -= 1;
                if *trailing == 0 {
                    node.done = true;
                }
                Ok(true)
            } else {
                node.done = true;
                Ok(false)
            }
        }
        NodeState::Split { next } => {
            let ic = node.inputs[0];
            if chans[ic].starved() {
                node.done = true;
                return Ok(false);
            }
            let oc = node.outputs[*next];
            if chans[ic].q.is_empty() || !chans[oc].can_push() {
                return Ok(false);
            }
            let x = chans[ic].q.pop_front().expect("checked nonempty");
            chans[oc].push(x);
            *next = (*next + 1) % node.outputs.len();
            Ok(true)
        }
        NodeState::Join { next } => {
            let ic = node.inputs[*next];
            if chans[ic].starved() {
                // Strict round-robin: finished only when every input ended.
                if node.inputs.iter().all(|&c| chans[c].starved()) {
                    node.done = true;
                }
                return Ok(false);
            }
            let oc = node.outputs[0];
            if chans[ic].q.is_empty() || !chans[oc].can_push() {
                return Ok(false);
            }
            let x = chans[ic].q.pop_front().expect("checked nonempty");
            chans[oc].push(x);
            *next = (*next + 1) % node.inputs.len();
            Ok(true)
        }
    }
}

/// Finds a blocked node and the channel it waits on, for deadlock reports.
fn describe_block(
    graph: &StreamGraph,
    nodes: &[SimNode],
    chans: &[Chan],
    ext_in: usize,
) -> (String, String) {
    let chan_name = |ci: usize| -> String {
        if ci >= graph.channels.len() {
            if ci == ext_in {
                "<external input>".to_string()
            } else {
                "<external output>".to_string()
            }
        } else {
            let ch = &graph.channels[ci];
            format!("{} -> {}", ch.from, ch.to)
        }
    };
    for node in nodes {
        if node.done {
            continue;
        }
        let want_input = match &node.state {
            NodeState::Join { next } => node.inputs[*next],
            _ => node.inputs[0],
        };
        if chans[want_input].q.is_empty() {
            return (node.id.clone(), chan_name(want_input));
        }
        for &oc in &node.outputs {
            if !chans[oc].can_push() {
                return (node.id.clone(), chan_name(oc));
            }
        }
    }
    ("<unknown>".to_string(), "<unknown>".to_string())
}

/// Steady-state cycles and fill latency for a graph. A pipeline completes
/// in the slowest stage's steady-state cycles plus the sum of all fill
/// latencies; a split-join uses its critical branch's fill. `input_tokens`
/// sizes the pointwise stages; a conv stage pins it to `width * height`.
pub fn estimate_graph_cycles(
    graph: &StreamGraph,
    profile: &CalibrationProfile,
    input_tokens: usize,
) -> Result<CycleEstimate, DataflowError> {
    validate_graph(graph)?;
    let node_costs = |id: &str, tokens: usize| -> Result<(u64, u64), DataflowError> {
        let idx = graph.instance_index(id)?;
        match &graph.instances[idx].kind {
            NodeKind::Conv2dStream { width, height, .. } => {
                if *width * *height != tokens {
                    return Err(DataflowError::Estimate(format!(
                        "conv \"{id}\" consumes {} tokens but the stream carries {tokens}",
                        width * height
                    )));
                }
                let schedule =
                    LoopSchedule::conv(Style::Restructured, *width as u32, *height as u32)
                        .map_err(|e| DataflowError::Estimate(e.to_string()))?;
                let e = estimate_cycles(&schedule, profile);
                Ok((e.cycles, e.latency))
            }
            // Pointwise stages and routers move one token per cycle with
            // negligible fill.
            _ => Ok((tokens as u64, 0)),
        }
    };
    match &graph.pattern {
        PatternDescription::Pipeline { stages } => {
            let mut steady_max = 0u64;
            let mut fill_sum = 0u64;
            for id in stages {
                let (steady, fill) = node_costs(id, input_tokens)?;
                steady_max = steady_max.max(steady);
                fill_sum += fill;
            }
            Ok(CycleEstimate {
                cycles: steady_max + fill_sum,
                latency: fill_sum,
            })
        }
        PatternDescription::SplitJoin {
            split,
            branches,
            join,
        } => {
            let arity = branches.len().max(1);
            let per_branch = input_tokens.div_ceil(arity);
            let mut steady_max = node_costs(split, input_tokens)?.0;
            steady_max = steady_max.max(node_costs(join, input_tokens)?.0);
            let mut fill_critical = 0u64;
            for branch in branches {
                let mut fill = 0u64;
                for id in branch {
                    let (steady, f) = node_costs(id, per_branch)?;
                    steady_max = steady_max.max(steady);
                    fill += f;
                }
                fill_critical = fill_critical.max(fill);
            }
            Ok(CycleEstimate {
                cycles: steady_max + fill_critical,
                latency: fill_critical,
            })
        }
    }
}

/// Convenience constructor for a linear pipeline with uniform FIFO depth.
pub fn pipeline(instances: Vec<KernelInstance>, depth: usize) -> StreamGraph {
    let stages: Vec<String> = instances.iter().map(|i| i.id.clone()).collect();
    let channels = instances
        .windows(2)
        .map(|pair| FifoChannel {
            from: PortRef::new(&pair[0].id, 0),
            to: PortRef::new(&pair[1].id, 0),
            depth,
        })
        .collect();
    let input = PortRef::new(&stages[0], 0);
    let output = PortRef::new(stages.last().expect("nonempty"), 0);
    StreamGraph {
        instances,
        channels,
        pattern: PatternDescription::Pipeline { stages },
        input,
        output,
    }
}

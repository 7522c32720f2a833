//! Robber movement laws and cop policies.
//!
//! The robber is not a player: its movement law is fixed before the game and
//! known to both cops. Laws are stationary Markovian over the joint token
//! positions `(x1, x2, x3)`; the oblivious and state-deterministic forms are
//! special cases. States not listed in a law default to "stay in place".
//!
//! Cop policies produced by the solvers use the same keying: a policy for
//! player `i` maps `(x1, x2, x3)` to a move (or move distribution) for token
//! `i`, with the same stay default. The sequential engine consults a policy
//! only on that player's turns, so the turn component never appears in keys.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, Vertex};

/// Joint token positions `(x1, x2, x3)` used as strategy and policy keys.
pub type StateKey = (Vertex, Vertex, Vertex);

/// Distributions must sum to one within this tolerance.
pub const DISTRIBUTION_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("line {line}: cannot parse `{text}`: {reason}")]
    Parse {
        line: usize,
        text: String,
        reason: String,
    },
    #[error("vertex {v} out of range 1..={n}")]
    VertexOutOfRange { v: Vertex, n: u32 },
    #[error("illegal robber move from {from}: destination {dest} is not in N[{from}]")]
    IllegalObliviousMove { from: Vertex, dest: Vertex },
    #[error("illegal robber move at state ({x1}, {x2}, {x3}): destination {dest} is not in N[{x3}]")]
    IllegalStateMove {
        x1: Vertex,
        x2: Vertex,
        x3: Vertex,
        dest: Vertex,
    },
    #[error("duplicate entry for state ({x1}, {x2}, {x3}) destination {dest}")]
    DuplicateEntry {
        x1: Vertex,
        x2: Vertex,
        x3: Vertex,
        dest: Vertex,
    },
    #[error("negative probability {p} at state ({x1}, {x2}, {x3}) destination {dest}")]
    NegativeProbability {
        x1: Vertex,
        x2: Vertex,
        x3: Vertex,
        dest: Vertex,
        p: f64,
    },
    #[error("probabilities at state ({x1}, {x2}, {x3}) sum to {sum}, expected 1")]
    DistributionSum {
        x1: Vertex,
        x2: Vertex,
        x3: Vertex,
        sum: f64,
    },
    #[error("missing `robber <kind>` header")]
    MissingHeader,
    #[error("missing `cop <player> <kind>` header")]
    MissingPolicyHeader,
}

/// Fixed, publicly known movement law for the robber token.
#[derive(Debug, Clone)]
pub enum RobberStrategy {
    /// Destination depends only on the robber's own location.
    Oblivious(BTreeMap<Vertex, Vertex>),
    /// Destination depends on the full joint position.
    StateDeterministic(BTreeMap<StateKey, Vertex>),
    /// Distribution over legal destinations per joint position.
    StationaryMarkov(BTreeMap<StateKey, Vec<(Vertex, f64)>>),
}

impl RobberStrategy {
    /// The robber that never moves.
    pub fn identity() -> Self {
        RobberStrategy::Oblivious(BTreeMap::new())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            RobberStrategy::Oblivious(_) => "oblivious",
            RobberStrategy::StateDeterministic(_) => "state",
            RobberStrategy::StationaryMarkov(_) => "markov",
        }
    }

    pub fn is_oblivious_deterministic(&self) -> bool {
        matches!(self, RobberStrategy::Oblivious(_))
    }

    pub fn as_oblivious(&self) -> Option<&BTreeMap<Vertex, Vertex>> {
        match self {
            RobberStrategy::Oblivious(m) => Some(m),
            _ => None,
        }
    }

    /// Oblivious destination from `x3`, honoring the stay default.
    /// Only meaningful for the oblivious kind.
    pub fn oblivious_move(&self, x3: Vertex) -> Option<Vertex> {
        self.as_oblivious()
            .map(|m| m.get(&x3).copied().unwrap_or(x3))
    }

    /// Builds an oblivious law, validating move legality.
    pub fn oblivious(map: BTreeMap<Vertex, Vertex>, g: &Graph) -> Result<Self, StrategyError> {
        for (&from, &dest) in &map {
            check_vertex(g, from)?;
            check_vertex(g, dest)?;
            if !g.closed_unchecked(from).contains(dest) {
                return Err(StrategyError::IllegalObliviousMove { from, dest });
            }
        }
        Ok(RobberStrategy::Oblivious(map))
    }

    /// Builds a state-deterministic law, validating move legality.
    pub fn state_deterministic(
        map: BTreeMap<StateKey, Vertex>,
        g: &Graph,
    ) -> Result<Self, StrategyError> {
        for (&(x1, x2, x3), &dest) in &map {
            for v in [x1, x2, x3, dest] {
                check_vertex(g, v)?;
            }
            if !g.closed_unchecked(x3).contains(dest) {
                return Err(StrategyError::IllegalStateMove { x1, x2, x3, dest });
            }
        }
        Ok(RobberStrategy::StateDeterministic(map))
    }

    /// Builds a stochastic law, validating legality, nonnegativity and sums.
    pub fn stationary_markov(
        map: BTreeMap<StateKey, Vec<(Vertex, f64)>>,
        g: &Graph,
    ) -> Result<Self, StrategyError> {
        let mut sorted = BTreeMap::new();
        for ((x1, x2, x3), mut entries) in map {
            for v in [x1, x2, x3] {
                check_vertex(g, v)?;
            }
            entries.sort_by_key(|&(dest, _)| dest);
            let mut sum = 0.0;
            for &(dest, p) in &entries {
                check_vertex(g, dest)?;
                if !g.closed_unchecked(x3).contains(dest) {
                    return Err(StrategyError::IllegalStateMove { x1, x2, x3, dest });
                }
                if p < 0.0 {
                    return Err(StrategyError::NegativeProbability { x1, x2, x3, dest, p });
                }
                sum += p;
            }
            if entries.windows(2).any(|w| w[0].0 == w[1].0) {
                let dup = entries
                    .windows(2)
                    .find(|w| w[0].0 == w[1].0)
                    .map(|w| w[0].0)
                    .unwrap();
                return Err(StrategyError::DuplicateEntry { x1, x2, x3, dest: dup });
            }
            if (sum - 1.0).abs() > DISTRIBUTION_TOL {
                return Err(StrategyError::DistributionSum { x1, x2, x3, sum });
            }
            sorted.insert((x1, x2, x3), entries);
        }
        Ok(RobberStrategy::StationaryMarkov(sorted))
    }

    /// Robber move distribution at the joint position, as a probability
    /// vector aligned with the sorted closed neighborhood `N[x3]`.
    ///
    /// Deterministic kinds yield a point mass; the stay default covers every
    /// state not listed in the law.
    pub fn move_distribution(
        &self,
        g: &Graph,
        x1: Vertex,
        x2: Vertex,
        x3: Vertex,
    ) -> Vec<(Vertex, f64)> {
        let nbhd = g.closed_unchecked(x3);
        let point_mass = |dest: Vertex| -> Vec<(Vertex, f64)> {
            nbhd.iter()
                .map(|v| (v, if v == dest { 1.0 } else { 0.0 }))
                .collect()
        };
        match self {
            RobberStrategy::Oblivious(m) => point_mass(m.get(&x3).copied().unwrap_or(x3)),
            RobberStrategy::StateDeterministic(m) => {
                point_mass(m.get(&(x1, x2, x3)).copied().unwrap_or(x3))
            }
            RobberStrategy::StationaryMarkov(m) => match m.get(&(x1, x2, x3)) {
                None => point_mass(x3),
                Some(entries) => nbhd
                    .iter()
                    .map(|v| {
                        let p = entries
                            .iter()
                            .find(|&&(dest, _)| dest == v)
                            .map(|&(_, p)| p)
                            .unwrap_or(0.0);
                        (v, p)
                    })
                    .collect(),
            },
        }
    }

    /// Parses the strategy text format against a loaded graph.
    ///
    /// Header `robber <kind>` with kind in {oblivious, state, markov}, then
    /// `m <x3> <dest>` lines (oblivious), `m <x1> <x2> <x3> <dest>` lines
    /// (state), or `p <x1> <x2> <x3> <dest> <prob>` lines (markov). `#`
    /// comments and blank lines are ignored; unlisted states stay.
    pub fn load(text: &str, g: &Graph) -> Result<Self, StrategyError> {
        enum Kind {
            Oblivious,
            State,
            Markov,
        }
        let mut kind: Option<Kind> = None;
        let mut oblivious = BTreeMap::new();
        let mut state = BTreeMap::new();
        let mut markov: BTreeMap<StateKey, Vec<(Vertex, f64)>> = BTreeMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_err = |reason: &str| StrategyError::Parse {
                line: line_no,
                text: line.to_string(),
                reason: reason.to_string(),
            };
            match (fields[0], &kind) {
                ("robber", None) => {
                    if fields.len() != 2 {
                        return Err(parse_err("expected `robber <kind>`"));
                    }
                    kind = Some(match fields[1] {
                        "oblivious" => Kind::Oblivious,
                        "state" => Kind::State,
                        "markov" => Kind::Markov,
                        _ => return Err(parse_err("kind must be oblivious, state or markov")),
                    });
                }
                ("robber", Some(_)) => return Err(parse_err("duplicate header")),
                (_, None) => return Err(StrategyError::MissingHeader),
                ("m", Some(Kind::Oblivious)) => {
                    let [x3, dest] = parse_ints::<2>(&fields[1..], &parse_err)?;
                    if oblivious.insert(x3, dest).is_some() {
                        return Err(StrategyError::DuplicateEntry { x1: 0, x2: 0, x3, dest });
                    }
                }
                ("m", Some(Kind::State)) => {
                    let [x1, x2, x3, dest] = parse_ints::<4>(&fields[1..], &parse_err)?;
                    if state.insert((x1, x2, x3), dest).is_some() {
                        return Err(StrategyError::DuplicateEntry { x1, x2, x3, dest });
                    }
                }
                ("p", Some(Kind::Markov)) => {
                    if fields.len() != 6 {
                        return Err(parse_err("expected `p <x1> <x2> <x3> <dest> <prob>`"));
                    }
                    let [x1, x2, x3, dest] = parse_ints::<4>(&fields[1..5], &parse_err)?;
                    let p: f64 = fields[5]
                        .parse()
                        .map_err(|_| parse_err("probability is not a number"))?;
                    markov.entry((x1, x2, x3)).or_default().push((dest, p));
                }
                _ => return Err(parse_err("unexpected line for this strategy kind")),
            }
        }

        match kind.ok_or(StrategyError::MissingHeader)? {
            Kind::Oblivious => RobberStrategy::oblivious(oblivious, g),
            Kind::State => RobberStrategy::state_deterministic(state, g),
            Kind::Markov => RobberStrategy::stationary_markov(markov, g),
        }
    }
}

fn check_vertex(g: &Graph, v: Vertex) -> Result<(), StrategyError> {
    if v == 0 || v > g.vertex_count() {
        Err(StrategyError::VertexOutOfRange {
            v,
            n: g.vertex_count(),
        })
    } else {
        Ok(())
    }
}

fn parse_ints<const N: usize>(
    fields: &[&str],
    err: &impl Fn(&str) -> StrategyError,
) -> Result<[Vertex; N], StrategyError> {
    if fields.len() < N {
        return Err(err("too few fields"));
    }
    let mut out = [0; N];
    for (slot, field) in out.iter_mut().zip(fields) {
        *slot = field.parse().map_err(|_| err("field is not an integer"))?;
    }
    Ok(out)
}

/// Which cop a policy belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn number(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Player> {
        match n {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// This player's token position within a joint position.
    pub fn own_position(self, x1: Vertex, x2: Vertex) -> Vertex {
        match self {
            Player::One => x1,
            Player::Two => x2,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.number())
    }
}

/// Stationary Markovian cop strategy, keyed like robber laws.
#[derive(Debug, Clone)]
pub enum PolicyKind {
    Deterministic(BTreeMap<StateKey, Vertex>),
    Mixed(BTreeMap<StateKey, Vec<(Vertex, f64)>>),
}

#[derive(Debug, Clone)]
pub struct CopPolicy {
    pub player: Player,
    pub kind: PolicyKind,
}

/// A single rule violation found by [`CopPolicy::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyViolation {
    IllegalMove {
        state: StateKey,
        own: Vertex,
        dest: Vertex,
    },
    OutOfRange {
        state: StateKey,
        v: Vertex,
    },
    NegativeWeight {
        state: StateKey,
        dest: Vertex,
        weight: f64,
    },
    BadSum {
        state: StateKey,
        sum: f64,
    },
}

impl fmt::Display for PolicyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyViolation::IllegalMove { state, own, dest } => write!(
                f,
                "at state {state:?}: destination {dest} is not in N[{own}]"
            ),
            PolicyViolation::OutOfRange { state, v } => {
                write!(f, "at state {state:?}: vertex {v} out of range")
            }
            PolicyViolation::NegativeWeight { state, dest, weight } => write!(
                f,
                "at state {state:?}: destination {dest} has negative weight {weight}"
            ),
            PolicyViolation::BadSum { state, sum } => {
                write!(f, "at state {state:?}: weights sum to {sum}, expected 1")
            }
        }
    }
}

impl CopPolicy {
    /// The policy that always stays in place.
    pub fn stay(player: Player) -> Self {
        CopPolicy {
            player,
            kind: PolicyKind::Deterministic(BTreeMap::new()),
        }
    }

    pub fn deterministic(player: Player, map: BTreeMap<StateKey, Vertex>) -> Self {
        CopPolicy {
            player,
            kind: PolicyKind::Deterministic(map),
        }
    }

    pub fn mixed(player: Player, map: BTreeMap<StateKey, Vec<(Vertex, f64)>>) -> Self {
        let map = map
            .into_iter()
            .map(|(k, mut v)| {
                v.sort_by_key(|&(dest, _)| dest);
                (k, v)
            })
            .collect();
        CopPolicy {
            player,
            kind: PolicyKind::Mixed(map),
        }
    }

    /// Positive-probability moves at a joint position, sorted by destination.
    /// Unlisted states yield the stay move with probability one.
    pub fn move_support(&self, x1: Vertex, x2: Vertex, x3: Vertex) -> Vec<(Vertex, f64)> {
        let own = self.player.own_position(x1, x2);
        match &self.kind {
            PolicyKind::Deterministic(map) => {
                vec![(map.get(&(x1, x2, x3)).copied().unwrap_or(own), 1.0)]
            }
            PolicyKind::Mixed(map) => match map.get(&(x1, x2, x3)) {
                None => vec![(own, 1.0)],
                Some(entries) => entries.iter().copied().filter(|&(_, p)| p > 0.0).collect(),
            },
        }
    }

    /// Full list of rule violations; empty means the policy is valid.
    pub fn validate(&self, g: &Graph) -> Vec<PolicyViolation> {
        let n = g.vertex_count();
        let mut violations = Vec::new();
        let check_state = |state: StateKey, violations: &mut Vec<PolicyViolation>| -> bool {
            let (x1, x2, x3) = state;
            for v in [x1, x2, x3] {
                if v == 0 || v > n {
                    violations.push(PolicyViolation::OutOfRange { state, v });
                    return false;
                }
            }
            true
        };
        match &self.kind {
            PolicyKind::Deterministic(map) => {
                for (&state, &dest) in map {
                    if !check_state(state, &mut violations) {
                        continue;
                    }
                    let own = self.player.own_position(state.0, state.1);
                    if dest == 0 || dest > n {
                        violations.push(PolicyViolation::OutOfRange { state, v: dest });
                    } else if !g.closed_unchecked(own).contains(dest) {
                        violations.push(PolicyViolation::IllegalMove { state, own, dest });
                    }
                }
            }
            PolicyKind::Mixed(map) => {
                for (&state, entries) in map {
                    if !check_state(state, &mut violations) {
                        continue;
                    }
                    let own = self.player.own_position(state.0, state.1);
                    let mut sum = 0.0;
                    for &(dest, w) in entries {
                        if dest == 0 || dest > n {
                            violations.push(PolicyViolation::OutOfRange { state, v: dest });
                            continue;
                        }
                        if !g.closed_unchecked(own).contains(dest) {
                            violations.push(PolicyViolation::IllegalMove { state, own, dest });
                        }
                        if w < 0.0 {
                            violations.push(PolicyViolation::NegativeWeight {
                                state,
                                dest,
                                weight: w,
                            });
                        }
                        sum += w;
                    }
                    if (sum - 1.0).abs() > DISTRIBUTION_TOL {
                        violations.push(PolicyViolation::BadSum { state, sum });
                    }
                }
            }
        }
        violations
    }

    /// Renders one `cop <player> <kind>` block in the policy text format.
    /// Deterministic policies reuse the `state` line format, mixed policies
    /// the `markov` one.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.kind {
            PolicyKind::Deterministic(map) => {
                out.push_str(&format!("cop {} state\n", self.player.number()));
                for (&(x1, x2, x3), &dest) in map {
                    out.push_str(&format!("m {x1} {x2} {x3} {dest}\n"));
                }
            }
            PolicyKind::Mixed(map) => {
                out.push_str(&format!("cop {} markov\n", self.player.number()));
                for (&(x1, x2, x3), entries) in map {
                    for &(dest, p) in entries {
                        out.push_str(&format!("p {x1} {x2} {x3} {dest} {p:.16e}\n"));
                    }
                }
            }
        }
        out
    }
}

/// Parses a policy file containing one or more `cop <player> <kind>` blocks.
pub fn parse_policy_file(text: &str) -> Result<Vec<CopPolicy>, StrategyError> {
    let mut policies: Vec<CopPolicy> = Vec::new();
    let mut current: Option<(Player, PolicyKind)> = None;

    let flush = |current: &mut Option<(Player, PolicyKind)>, policies: &mut Vec<CopPolicy>| {
        if let Some((player, kind)) = current.take() {
            policies.push(CopPolicy { player, kind });
        }
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |reason: &str| StrategyError::Parse {
            line: line_no,
            text: line.to_string(),
            reason: reason.to_string(),
        };
        match fields[0] {
            "cop" => {
                flush(&mut current, &mut policies);
                if fields.len() != 3 {
                    return Err(parse_err("expected `cop <player> <kind>`"));
                }
                let player = fields[1]
                    .parse::<u8>()
                    .ok()
                    .and_then(Player::from_number)
                    .ok_or_else(|| parse_err("player must be 1 or 2"))?;
                let kind = match fields[2] {
                    "state" => PolicyKind::Deterministic(BTreeMap::new()),
                    "markov" => PolicyKind::Mixed(BTreeMap::new()),
                    _ => return Err(parse_err("kind must be state or markov")),
                };
                current = Some((player, kind));
            }
            "m" => match &mut current {
                Some((_, PolicyKind::Deterministic(map))) => {
                    let [x1, x2, x3, dest] = parse_ints::<4>(&fields[1..], &parse_err)?;
                    if map.insert((x1, x2, x3), dest).is_some() {
                        return Err(StrategyError::DuplicateEntry { x1, x2, x3, dest });
                    }
                }
                _ => return Err(parse_err("`m` line outside a deterministic block")),
            },
            "p" => match &mut current {
                Some((_, PolicyKind::Mixed(map))) => {
                    if fields.len() != 6 {
                        return Err(parse_err("expected `p <x1> <x2> <x3> <dest> <prob>`"));
                    }
                    let [x1, x2, x3, dest] = parse_ints::<4>(&fields[1..5], &parse_err)?;
                    let p: f64 = fields[5]
                        .parse()
                        .map_err(|_| parse_err("probability is not a number"))?;
                    let entries = map.entry((x1, x2, x3)).or_default();
                    if entries.iter().any(|&(d, _)| d == dest) {
                        return Err(StrategyError::DuplicateEntry { x1, x2, x3, dest });
                    }
                    entries.push((dest, p));
                }
                _ => return Err(parse_err("`p` line outside a mixed block")),
            },
            _ => return Err(parse_err("unknown line tag")),
        }
    }
    flush(&mut current, &mut policies);
    if policies.is_empty() {
        return Err(StrategyError::MissingPolicyHeader);
    }
    Ok(policies)
}

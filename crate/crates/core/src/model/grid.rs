use super::config::*;

/// A (node, layer) pair of the time-expanded graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeNode {
    pub node: usize,
    pub layer: usize,
}

/// One copy of an arc in time. Layers index `TimeExpandedNetwork::times`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedEdge {
    /// Index into `ScenarioConfig::arcs`; `None` for implicit holdovers.
    pub arc: Option<usize>,
    pub kind: ArcKind,
    pub from: usize,
    pub to: usize,
    pub depart: usize,
    pub arrive: usize,
    pub delta_v: f64,
    pub launch_priced: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeExpandedNetwork {
    /// Grid days, 0..=horizon in steps.
    pub times: Vec<u32>,
    pub num_nodes: usize,
    pub edges: Vec<ExpandedEdge>,
}

impl TimeExpandedNetwork {
    pub fn time_nodes(&self) -> impl Iterator<Item = TimeNode> + '_ {
        (0..self.num_nodes).flat_map(move |node| (0..self.times.len()).map(move |layer| TimeNode { node, layer }))
    }

    pub fn num_time_nodes(&self) -> usize {
        self.num_nodes * self.times.len()
    }
}

/// Arc time of flight in grid layers: rounded up, never below one step for
/// arcs that take time.
pub fn tof_layers(tof: u32, step: u32) -> usize {
    tof.div_ceil(step) as usize
}

/// Departure days open for an arc under the window rules of `player`
/// (`None` = windows that apply to everybody). `None` result means always open.
fn open_days(cfg: &ScenarioConfig, arc: &NetworkArc, player: Option<&str>) -> Option<Vec<[u32; 2]>> {
    let windows = &cfg.time_grid.mission_windows;
    let matches = |w: &&MissionWindow| w.from == arc.from && w.to == arc.to;
    let own: Vec<&MissionWindow> =
        windows.iter().filter(matches).filter(|w| player.is_some() && w.player.as_deref() == player).collect();
    let chosen: Vec<&MissionWindow> =
        if own.is_empty() { windows.iter().filter(matches).filter(|w| w.player.is_none()).collect() } else { own };
    if chosen.is_empty() {
        return None;
    }
    let horizon = cfg.time_grid.horizon;
    let mut out = Vec::new();
    for w in chosen {
        for iv in &w.open {
            let mut shift = 0;
            loop {
                if iv[0] + shift > horizon {
                    break;
                }
                out.push([iv[0] + shift, iv[1] + shift]);
                match w.repeat_every {
                    Some(r) if r > 0 => shift += r,
                    _ => break,
                }
            }
        }
    }
    Some(out)
}

/// Time-expanded graph using the windows shared by all players.
pub fn expand_time_grid(cfg: &ScenarioConfig) -> TimeExpandedNetwork {
    expand_for_player(cfg, None)
}

/// Time-expanded graph under the windows seen by one player.
pub fn expand_for_player(cfg: &ScenarioConfig, player: Option<&str>) -> TimeExpandedNetwork {
    let step = cfg.time_grid.step;
    let n_layers = (cfg.time_grid.horizon / step) as usize + 1;
    let times: Vec<u32> = (0..n_layers as u32).map(|k| k * step).collect();
    let mut edges = Vec::new();
    let mut explicit_hold = vec![false; cfg.nodes.len()];
    for (k, arc) in cfg.arcs.iter().enumerate() {
        let (Some(from), Some(to)) = (cfg.node_index(&arc.from), cfg.node_index(&arc.to)) else {
            continue;
        };
        let dt = match arc.kind {
            ArcKind::Holdover => {
                explicit_hold[from] = true;
                1
            }
            _ => tof_layers(arc.tof, step),
        };
        let open = open_days(cfg, arc, player);
        for depart in 0..n_layers {
            let arrive = depart + dt;
            if arrive >= n_layers {
                continue;
            }
            let day = times[depart];
            if let Some(intervals) = &open {
                // a window opens the grid cell [day, day + step) it overlaps
                if !intervals.iter().any(|iv| iv[0] < day + step && day <= iv[1]) {
                    continue;
                }
            }
            edges.push(ExpandedEdge {
                arc: Some(k),
                kind: arc.kind,
                from,
                to,
                depart,
                arrive,
                delta_v: arc.delta_v,
                launch_priced: arc.launch_priced || arc.kind == ArcKind::Launch,
            });
        }
    }
    for node in 0..cfg.nodes.len() {
        if explicit_hold[node] {
            continue;
        }
        for depart in 0..n_layers.saturating_sub(1) {
            edges.push(ExpandedEdge {
                arc: None,
                kind: ArcKind::Holdover,
                from: node,
                to: node,
                depart,
                arrive: depart + 1,
                delta_v: 0.0,
                launch_priced: false,
            });
        }
    }
    TimeExpandedNetwork { times, num_nodes: cfg.nodes.len(), edges }
}

/// A demand or supply pinned to a grid layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridDemand {
    pub player: usize,
    pub commodity: usize,
    pub at: TimeNode,
    pub amount: f64,
}

/// Maps a day to a grid layer: supplies round up (available no earlier than
/// stated), demands round down (due no later than stated).
pub fn layer_for(day: u32, amount: f64, step: u32) -> usize {
    if amount >= 0.0 {
        day.div_ceil(step) as usize
    } else {
        (day / step) as usize
    }
}

/// Expands repeat and `all` entries of one player's own demands into
/// explicit per-layer entries.
pub fn expand_demands(cfg: &ScenarioConfig, player: usize) -> Vec<GridDemand> {
    let step = cfg.time_grid.step;
    let horizon = cfg.time_grid.horizon;
    let n_layers = (horizon / step) as usize + 1;
    let mut out = Vec::new();
    for d in &cfg.players[player].own_demands {
        let (Some(commodity), Some(node)) = (cfg.commodity_index(&d.commodity), cfg.node_index(&d.node)) else {
            continue;
        };
        match d.time {
            TimeSpec::Keyword(TimeKeyword::All) => {
                for layer in 0..n_layers {
                    out.push(GridDemand { player, commodity, at: TimeNode { node, layer }, amount: d.amount });
                }
            }
            TimeSpec::Day(day) => {
                let mut t = day;
                while t <= horizon {
                    let layer = layer_for(t, d.amount, step).min(n_layers - 1);
                    out.push(GridDemand { player, commodity, at: TimeNode { node, layer }, amount: d.amount });
                    match d.repeat_every {
                        Some(r) if r > 0 => t += r,
                        _ => break,
                    }
                }
            }
        }
    }
    out
}

//! The STIT cell-division process in a bounded convex window.
//!
//! Production path: every live cell `C` carries an exponential clock of
//! rate `Λ([C])` and is split, when it rings, by a line drawn from
//! `Λ([C] ∩ ·)/Λ([C])`. The tree construction with window-rate clocks,
//! where a line may miss the cell it was attached to, is available as
//! [`Construction::WindowRate`] and yields the same law.
//!
//! Each cell owns a random stream keyed by its lineage path, so a run is a
//! deterministic function of the seed, and runs to different horizons with
//! the same seed are prefixes of one another.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Side;
use crate::measure::DirectionalMeasure;
use crate::rng;
use crate::{CompactSet, Hyperplane, Point, Polygon, GEOM_EPS};

/// Hard cap on split events per run.
pub const EVENT_CAP: u64 = 10_000_000;

const ROOT_KEY: u64 = 1;
const SPLIT_ATTEMPTS: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// Per-cell rate `Λ([C])`; every drawn line splits its cell.
    #[default]
    CellRate,
    /// i.i.d. clocks of rate `Λ([W])` with lines drawn on the whole window.
    WindowRate,
}

#[derive(Clone, Debug)]
pub struct SimulationParams {
    pub window: Polygon,
    pub time: f64,
    pub measure: DirectionalMeasure,
    pub seed: u64,
    pub retain_lineage: bool,
    pub construction: Construction,
}

impl SimulationParams {
    pub fn new(window: Polygon, time: f64, measure: DirectionalMeasure, seed: u64) -> Self {
        SimulationParams {
            window,
            time,
            measure,
            seed,
            retain_lineage: false,
            construction: Construction::CellRate,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.measure.validate()?;
        if !(self.window.is_proper() && self.window.area() > 0.0) {
            return Err(Error::NonPositiveArea);
        }
        if !(self.time.is_finite() && self.time >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time {} must be finite and >= 0",
                self.time
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub id: u64,
    pub parent_id: Option<u64>,
    pub polygon: Polygon,
    pub birth_time: f64,
    /// `None` while the cell is alive.
    pub death_time: Option<f64>,
    pub splitting_hyperplane: Option<Hyperplane>,
}

/// A chord created by a split, with its creation time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InternalEdge {
    pub a: Point,
    pub b: Point,
    pub time: f64,
}

impl InternalEdge {
    pub fn segment(&self) -> Polygon {
        Polygon::segment(self.a, self.b)
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }
}

/// State of the process at a fixed time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "TessellationDump", from = "TessellationDump")]
pub struct Tessellation {
    pub window: Polygon,
    pub time: f64,
    /// Cells alive at `time`, ordered by id.
    pub live_cells: Vec<Cell>,
    /// Cells that died before `time`, when lineage retention is on.
    pub lineage: Option<Vec<Cell>>,
    pub internal_edges: Vec<InternalEdge>,
    /// Number of clock events processed.
    pub events: u64,
}

struct Pending {
    cell: Cell,
    key: u64,
    death: f64,
    rng: ChaCha8Rng,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    // BinaryHeap is a max-heap: reverse for earliest death first, ties by id
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .death
            .total_cmp(&self.death)
            .then_with(|| other.cell.id.cmp(&self.cell.id))
    }
}

/// Incremental simulator; [`simulate`] is the one-shot entry point.
pub struct Simulator {
    window: Polygon,
    measure: DirectionalMeasure,
    seed: u64,
    construction: Construction,
    window_rate: f64,
    now: f64,
    pending: BinaryHeap<Pending>,
    dead: Option<Vec<Cell>>,
    edges: Vec<InternalEdge>,
    next_id: u64,
    events: u64,
}

impl Simulator {
    pub fn new(params: &SimulationParams) -> Result<Self> {
        params.validate()?;
        let window_rate = params.measure.lambda_hit_convex(&params.window);
        if window_rate.is_nan() || window_rate <= 0.0 {
            return Err(Error::DegenerateWindow);
        }
        let mut sim = Simulator {
            window: params.window.clone(),
            measure: params.measure.clone(),
            seed: params.seed,
            construction: params.construction,
            window_rate,
            now: 0.0,
            pending: BinaryHeap::new(),
            dead: params.retain_lineage.then(Vec::new),
            edges: Vec::new(),
            next_id: 1,
            events: 0,
        };
        let root = Cell {
            id: 0,
            parent_id: None,
            polygon: params.window.clone(),
            birth_time: 0.0,
            death_time: None,
            splitting_hyperplane: None,
        };
        sim.schedule(root, ROOT_KEY);
        Ok(sim)
    }

    pub fn time(&self) -> f64 {
        self.now
    }

    fn schedule(&mut self, cell: Cell, key: u64) {
        let mut rng = rng::stream(self.seed, key);
        let rate = match self.construction {
            Construction::CellRate => self.measure.lambda_hit_convex(&cell.polygon),
            Construction::WindowRate => self.window_rate,
        };
        let wait: f64 = rng.sample(Exp1);
        let death = if rate > 0.0 {
            cell.birth_time + wait / rate
        } else {
            f64::INFINITY
        };
        self.pending.push(Pending { cell, key, death, rng });
    }

    fn spawn(&mut self, parent: &Pending, tag: u64, polygon: Polygon) {
        let cell = Cell {
            id: self.next_id,
            parent_id: Some(parent.cell.id),
            polygon,
            birth_time: parent.death,
            death_time: None,
            splitting_hyperplane: None,
        };
        self.next_id += 1;
        self.schedule(cell, rng::derive(parent.key, tag));
    }

    /// Runs the process forward to time `t`.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        if t.is_nan() || t < self.now {
            return Err(Error::InvalidParameter(format!(
                "cannot advance from {} back to {t}",
                self.now
            )));
        }
        while self.pending.peek().is_some_and(|p| p.death <= t) {
            let p = self.pending.pop().expect("peeked");
            self.fire(p)?;
        }
        self.now = t;
        Ok(())
    }

    fn fire(&mut self, mut p: Pending) -> Result<()> {
        self.events += 1;
        if self.events > EVENT_CAP {
            return Err(Error::EventCap(EVENT_CAP));
        }
        let sample_region = match self.construction {
            Construction::CellRate => p.cell.polygon.clone(),
            Construction::WindowRate => self.window.clone(),
        };
        let attempts = match self.construction {
            Construction::CellRate => SPLIT_ATTEMPTS,
            Construction::WindowRate => 1,
        };
        let mut split = None;
        for _ in 0..attempts {
            let gamma = self.measure.sample_hitting(&sample_region, &mut p.rng)?;
            let minus = p.cell.polygon.clip(&gamma, Side::Minus);
            let plus = p.cell.polygon.clip(&gamma, Side::Plus);
            match (minus, plus) {
                (Some(m), Some(q)) if m.is_proper() && q.is_proper() => {
                    split = Some((gamma, m, q));
                    break;
                }
                (m, q) => {
                    if self.construction == Construction::WindowRate {
                        // the line missed the cell: it lives on as its own only child
                        let tag = if m.is_some() { 0 } else { 1 };
                        let _ = q;
                        self.retire(&p, Some(gamma));
                        self.spawn(&p, tag, p.cell.polygon.clone());
                        return Ok(());
                    }
                }
            }
        }
        let Some((gamma, minus, plus)) = split else {
            // only sliver cuts were drawn; the clock restarts
            let cell = Cell {
                birth_time: p.death,
                ..p.cell.clone()
            };
            self.schedule(cell, rng::derive(p.key, 2));
            return Ok(());
        };
        if let Some((a, b)) = p.cell.polygon.chord(&gamma) {
            self.edges.push(InternalEdge { a, b, time: p.death });
        }
        self.retire(&p, Some(gamma));
        self.spawn(&p, 0, minus);
        self.spawn(&p, 1, plus);
        Ok(())
    }

    fn retire(&mut self, p: &Pending, gamma: Option<Hyperplane>) {
        if let Some(dead) = self.dead.as_mut() {
            let mut cell = p.cell.clone();
            cell.death_time = Some(p.death);
            cell.splitting_hyperplane = gamma;
            dead.push(cell);
        }
    }

    pub fn snapshot(&self) -> Tessellation {
        let mut live_cells: Vec<Cell> = self.pending.iter().map(|p| p.cell.clone()).collect();
        live_cells.sort_by_key(|c| c.id);
        Tessellation {
            window: self.window.clone(),
            time: self.now,
            live_cells,
            lineage: self.dead.clone(),
            internal_edges: self.edges.clone(),
            events: self.events,
        }
    }
}

/// Runs the cell-division process to `params.time`.
pub fn simulate(params: &SimulationParams) -> Result<Tessellation> {
    let mut sim = Simulator::new(params)?;
    sim.advance_to(params.time)?;
    Ok(sim.snapshot())
}

impl Tessellation {
    pub fn total_area(&self) -> f64 {
        self.live_cells.iter().map(|c| c.polygon.area()).sum()
    }

    /// `|Σ area(cells) - area(window)| / area(window)`.
    pub fn area_defect(&self) -> f64 {
        let w = self.window.area();
        (self.total_area() - w).abs() / w
    }

    fn require_interior(&self, k: &CompactSet) -> Result<()> {
        if k.vertices().all(|v| self.window.boundary_offset(v) < -GEOM_EPS) {
            Ok(())
        } else {
            Err(Error::QueryNotInterior)
        }
    }

    /// Does some internal edge meet `k`? `k` must lie in the window's interior.
    pub fn hits_internal(&self, k: &CompactSet) -> Result<bool> {
        self.hits_internal_at(k, f64::INFINITY)
    }

    /// As [`hits_internal`](Self::hits_internal), counting only edges created by time `t`.
    pub fn hits_internal_at(&self, k: &CompactSet, t: f64) -> Result<bool> {
        self.require_interior(k)?;
        Ok(self
            .internal_edges
            .iter()
            .filter(|e| e.time <= t)
            .any(|e| k.intersects_polygon(&e.segment())))
    }

    /// Whether a single live cell holds `k` strictly inside.
    pub fn contained_in_single_cell(&self, k: &CompactSet) -> Result<bool> {
        self.require_interior(k)?;
        Ok(self
            .live_cells
            .iter()
            .any(|c| k.vertices().all(|v| c.polygon.boundary_offset(v) < -GEOM_EPS)))
    }

    /// Restriction to a sub-window.
    pub fn restrict(&self, sub: &Polygon) -> Result<Tessellation> {
        if !(sub.is_proper() && sub.area() > 0.0) {
            return Err(Error::NonPositiveArea);
        }
        if !sub.vertices().iter().all(|&v| self.window.contains_point(v, GEOM_EPS)) {
            return Err(Error::WindowNotContained);
        }
        let clip_cells = |cells: &[Cell]| -> Vec<Cell> {
            cells
                .iter()
                .filter_map(|c| {
                    let poly = c.polygon.clip_to(sub)?;
                    poly.is_proper().then(|| Cell {
                        polygon: poly,
                        ..c.clone()
                    })
                })
                .collect()
        };
        let internal_edges = self
            .internal_edges
            .iter()
            .filter_map(|e| {
                let seg = e.segment().clip_to(sub)?;
                match seg.vertices() {
                    [a, b] => Some(InternalEdge {
                        a: *a,
                        b: *b,
                        time: e.time,
                    }),
                    _ => None,
                }
            })
            .collect();
        Ok(Tessellation {
            window: sub.clone(),
            time: self.time,
            live_cells: clip_cells(&self.live_cells),
            lineage: self.lineage.as_deref().map(clip_cells),
            internal_edges,
            events: self.events,
        })
    }

    /// Nests an independent STIT of time `extra` (measure `measure`) in every live cell.
    pub fn nest(&self, extra: f64, measure: &DirectionalMeasure, seed: u64) -> Result<Tessellation> {
        let nested: Vec<Tessellation> = self
            .live_cells
            .par_iter()
            .map(|c| {
                simulate(&SimulationParams::new(
                    c.polygon.clone(),
                    extra,
                    measure.clone(),
                    rng::derive(seed, c.id),
                ))
            })
            .collect::<Result<_>>()?;

        let mut next_id = self
            .live_cells
            .iter()
            .chain(self.lineage.iter().flatten())
            .map(|c| c.id)
            .max()
            .unwrap_or(0)
            + 1;
        let mut live_cells = Vec::new();
        let mut internal_edges = self.internal_edges.clone();
        let mut events = self.events;
        for (outer, inner) in self.live_cells.iter().zip(&nested) {
            events += inner.events;
            if inner.live_cells.len() == 1 {
                live_cells.push(outer.clone());
                continue;
            }
            for c in &inner.live_cells {
                live_cells.push(Cell {
                    id: next_id,
                    parent_id: Some(outer.id),
                    polygon: c.polygon.clone(),
                    birth_time: self.time + c.birth_time,
                    death_time: None,
                    splitting_hyperplane: None,
                });
                next_id += 1;
            }
            internal_edges.extend(inner.internal_edges.iter().map(|e| InternalEdge {
                time: self.time + e.time,
                ..*e
            }));
        }
        Ok(Tessellation {
            window: self.window.clone(),
            time: self.time + extra,
            live_cells,
            lineage: None,
            internal_edges,
            events,
        })
    }

    /// All coordinates multiplied by `s`; time unchanged.
    pub fn rescale(&self, s: f64) -> Result<Tessellation> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParameter(format!("scale {s} must be positive")));
        }
        let scale_cells = |cells: &[Cell]| -> Vec<Cell> {
            cells
                .iter()
                .map(|c| Cell {
                    polygon: c.polygon.scale(s),
                    splitting_hyperplane: c.splitting_hyperplane.map(|g| g.scale(s)),
                    ..c.clone()
                })
                .collect()
        };
        Ok(Tessellation {
            window: self.window.scale(s),
            time: self.time,
            live_cells: scale_cells(&self.live_cells),
            lineage: self.lineage.as_deref().map(scale_cells),
            internal_edges: self
                .internal_edges
                .iter()
                .map(|e| InternalEdge {
                    a: e.a * s,
                    b: e.b * s,
                    time: e.time,
                })
                .collect(),
            events: self.events,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CellDump {
    id: u64,
    parent: Option<u64>,
    birth: f64,
    polygon: Polygon,
}

#[derive(Serialize, Deserialize)]
struct TessellationDump {
    window: Polygon,
    time: f64,
    cells: Vec<CellDump>,
    internal_edges: Vec<[Point; 2]>,
    edge_times: Vec<f64>,
    #[serde(default)]
    events: u64,
}

impl From<Tessellation> for TessellationDump {
    fn from(t: Tessellation) -> Self {
        TessellationDump {
            window: t.window,
            time: t.time,
            cells: t
                .live_cells
                .into_iter()
                .map(|c| CellDump {
                    id: c.id,
                    parent: c.parent_id,
                    birth: c.birth_time,
                    polygon: c.polygon,
                })
                .collect(),
            internal_edges: t.internal_edges.iter().map(|e| [e.a, e.b]).collect(),
            edge_times: t.internal_edges.iter().map(|e| e.time).collect(),
            events: t.events,
        }
    }
}

impl From<TessellationDump> for Tessellation {
    fn from(d: TessellationDump) -> Self {
        let times = d.edge_times.iter().copied().chain(std::iter::repeat(0.0));
        Tessellation {
            window: d.window,
            time: d.time,
            live_cells: d
                .cells
                .into_iter()
                .map(|c| Cell {
                    id: c.id,
                    parent_id: c.parent,
                    polygon: c.polygon,
                    birth_time: c.birth,
                    death_time: None,
                    splitting_hyperplane: None,
                })
                .collect(),
            lineage: None,
            internal_edges: d
                .internal_edges
                .iter()
                .zip(times)
                .map(|(&[a, b], time)| InternalEdge { a, b, time })
                .collect(),
            events: d.events,
        }
    }
}

//! Circled two-color singular diagrams on four vertices.
//!
//! A diagram marks each vertex pair with a `z`-stroke, a `w`-stroke, both
//! (`x`) or nothing, and each vertex with a `z`-circle, `w`-circle, both or
//! nothing. Checking runs in two tiers:
//!
//! * purely combinatorial predicates on edges and circles;
//! * a search over closeness structures. Being `z`-close is an equivalence
//!   relation on vertices, so a closeness structure is a pair of set
//!   partitions. With four vertices there are `15 × 15` of them, which makes
//!   exhaustive search exact where propagation would only approximate it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::massconds::MassConditionId;

pub const VERTICES: usize = 4;
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

const CATALOG_TEXT: &str = include_str!("../data/catalog.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("bad diagram encoding '{0}'")]
    BadEncoding(String),
    #[error("bad catalog line {line}: {reason}")]
    BadCatalog { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrderMode {
    EqualOrder,
    NonEqualOrder,
}

impl FromStr for OrderMode {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "equal" | "equalorder" => Ok(OrderMode::EqualOrder),
            "nonequal" | "nonequalorder" => Ok(OrderMode::NonEqualOrder),
            _ => Err(DiagramError::BadEncoding(s.to_string())),
        }
    }
}

impl fmt::Display for OrderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderMode::EqualOrder => "equal",
            OrderMode::NonEqualOrder => "nonequal",
        })
    }
}

/// Stroke or circle content. The discriminants give the encoding order
/// `- < z < w < x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mark {
    None = 0,
    Z = 1,
    W = 2,
    ZW = 3,
}

impl Mark {
    pub const ALL: [Mark; 4] = [Mark::None, Mark::Z, Mark::W, Mark::ZW];

    pub fn has(self, c: Color) -> bool {
        match c {
            Color::Z => matches!(self, Mark::Z | Mark::ZW),
            Color::W => matches!(self, Mark::W | Mark::ZW),
        }
    }

    pub fn is_single(self) -> bool {
        matches!(self, Mark::Z | Mark::W)
    }

    pub fn symbol(self) -> char {
        ['-', 'z', 'w', 'x'][self as usize]
    }

    pub fn from_symbol(c: char) -> Option<Mark> {
        match c {
            '-' => Some(Mark::None),
            'z' => Some(Mark::Z),
            'w' => Some(Mark::W),
            'x' => Some(Mark::ZW),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Z,
    W,
}

impl Color {
    const BOTH: [Color; 2] = [Color::Z, Color::W];
}

pub fn pair_slot(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    PAIRS.iter().position(|&p| p == (a, b)).expect("distinct vertices below 4")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Diagram {
    pub order_mode: OrderMode,
    pub edges: [Mark; 6],
    pub circles: [Mark; 4],
}

impl Diagram {
    pub fn parse(mode: OrderMode, text: &str) -> Result<Self, DiagramError> {
        let bad = || DiagramError::BadEncoding(text.to_string());
        let (e, c) = text.trim().split_once(' ').ok_or_else(bad)?;
        let marks = |s: &str| s.chars().map(Mark::from_symbol).collect::<Option<Vec<_>>>();
        let edges: [Mark; 6] = marks(e).ok_or_else(bad)?.try_into().map_err(|_| bad())?;
        let circles: [Mark; 4] = marks(c.trim()).ok_or_else(bad)?.try_into().map_err(|_| bad())?;
        Ok(Diagram { order_mode: mode, edges, circles })
    }

    pub fn encoding(&self) -> String {
        let e: String = self.edges.iter().map(|m| m.symbol()).collect();
        let c: String = self.circles.iter().map(|m| m.symbol()).collect();
        format!("{e} {c}")
    }

    pub fn edge(&self, i: usize, j: usize) -> Mark {
        self.edges[pair_slot(i, j)]
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, Mark)> + '_ {
        (0..VERTICES)
            .filter(move |&u| u != v)
            .map(move |u| (u, self.edge(v, u)))
            .filter(|(_, m)| *m != Mark::None)
    }

    /// Number of `c`-strokes at `v` (a `zw`-edge counts for both colors).
    pub fn strokes(&self, v: usize, c: Color) -> usize {
        self.neighbors(v).filter(|(_, m)| m.has(c)).count()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    /// Connected components with respect to edges of any type.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = [usize::MAX; VERTICES];
        let mut comps = Vec::new();
        for s in 0..VERTICES {
            if label[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut stack = vec![s];
            let mut members = Vec::new();
            label[s] = id;
            while let Some(v) = stack.pop() {
                members.push(v);
                for (u, _) in self.neighbors(v) {
                    if label[u] == usize::MAX {
                        label[u] = id;
                        stack.push(u);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps
    }

    /// Image under the relabeling `v ↦ perm[v]`.
    pub fn permuted(&self, perm: &[usize; 4]) -> Diagram {
        let mut out = *self;
        for (slot, &(i, j)) in PAIRS.iter().enumerate() {
            out.edges[pair_slot(perm[i], perm[j])] = self.edges[slot];
        }
        for v in 0..VERTICES {
            out.circles[perm[v]] = self.circles[v];
        }
        out
    }

    fn code(&self) -> [Mark; 10] {
        let mut c = [Mark::None; 10];
        c[..6].copy_from_slice(&self.edges);
        c[6..].copy_from_slice(&self.circles);
        c
    }

    /// Least relabeling in the `- < z < w < x` order.
    pub fn canonical(&self) -> Diagram {
        PERMUTATIONS
            .iter()
            .map(|p| self.permuted(p))
            .min_by_key(|d| d.code())
            .expect("24 permutations")
    }

    pub fn class_key(&self) -> String {
        self.canonical().encoding()
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding())
    }
}

pub const PERMUTATIONS: [[usize; 4]; 24] = {
    let mut out = [[0; 4]; 24];
    let mut n = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                if a != b && a != c && b != c {
                    out[n] = [a, b, c, 6 - a - b - c];
                    n += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Accepted,
    Rejected(String),
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

/// Which rule tiers to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tiers {
    CombinatorialOnly,
    Full,
}

// ---------- tier 1 ----------

fn rule_2a(d: &Diagram) -> bool {
    PAIRS.iter().enumerate().all(|(s, &(i, j))| {
        d.edges[s] != Mark::ZW || d.degree(i) > 1 || d.degree(j) > 1
    })
}

fn rule_2b(d: &Diagram) -> bool {
    (0..VERTICES).all(|v| {
        let zw: Vec<usize> = d.neighbors(v).filter(|(_, m)| *m == Mark::ZW).map(|(u, _)| u).collect();
        zw.iter()
            .enumerate()
            .all(|(a, &u)| zw[a + 1..].iter().all(|&t| d.edge(u, t) == Mark::ZW))
    })
}

fn triangles() -> impl Iterator<Item = [usize; 3]> {
    (0..VERTICES).map(|skip| {
        let mut t = [0; 3];
        let mut k = 0;
        for v in (0..VERTICES).filter(|&v| v != skip) {
            t[k] = v;
            k += 1;
        }
        t
    })
}

fn rule_2c(d: &Diagram) -> bool {
    triangles().all(|[a, b, c]| {
        let e = [d.edge(a, b), d.edge(a, c), d.edge(b, c)];
        e.contains(&Mark::None) || (e[0] == e[1] && e[1] == e[2])
    })
}

fn rule_2g(d: &Diagram) -> bool {
    d.edges.iter().filter(|m| **m == Mark::ZW).count() != 1
}

/// The three 4-cycles of K4; entries 0/1 and 2/3 are opposite edges.
const QUADS: [[(usize, usize); 4]; 3] = [
    [(0, 1), (2, 3), (1, 2), (0, 3)],
    [(0, 1), (2, 3), (1, 3), (0, 2)],
    [(0, 2), (1, 3), (1, 2), (0, 3)],
];

fn quads() -> impl Iterator<Item = [usize; 4]> {
    QUADS.iter().map(|q| q.map(|(a, b)| pair_slot(a, b)))
}

fn rule_2h(d: &Diagram) -> bool {
    quads().all(|q| {
        let e = q.map(|s| d.edges[s]);
        e.contains(&Mark::None) || (e[0] == e[1] && e[2] == e[3])
    })
}

fn rule_1a(d: &Diagram) -> bool {
    for v in 0..VERTICES {
        let circled = d.circles[v] != Mark::None;
        let deg = d.degree(v);
        // a lone single-colored stroke must end at a circle
        if !circled && deg == 1 && d.neighbors(v).all(|(_, m)| m.is_single()) {
            return false;
        }
        if circled && deg == 0 {
            return false;
        }
        for c in Color::BOTH {
            let other = if c == Color::Z { Color::W } else { Color::Z };
            if d.circles[v].has(c) && !d.circles[v].has(other) && d.strokes(v, c) == 0 && d.strokes(v, other) > 0 {
                return false;
            }
        }
    }
    Color::BOTH.iter().all(|&c| d.edges.iter().any(|m| m.has(c)))
}

fn rule_1f(d: &Diagram) -> bool {
    d.components().iter().all(|comp| {
        let edges: Vec<Mark> = comp
            .iter()
            .flat_map(|&i| comp.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .map(|(i, j)| d.edge(i, j))
            .filter(|m| *m != Mark::None)
            .collect();
        edges.is_empty() || Color::BOTH.iter().all(|&c| edges.iter().any(|m| m.has(c)))
    })
}

fn rule_1g(d: &Diagram) -> bool {
    (0..VERTICES).all(|v| {
        let lone_single = d.degree(v) == 1 && d.neighbors(v).all(|(_, m)| m.is_single());
        !lone_single || d.circles[v] == Mark::ZW
    })
}

/// An uncircled vertex has `Σ_k m_k Z_kj` and `Σ_k m_k W_kj` both below
/// leading order, so it cannot carry exactly one stroke of either color.
fn rule_2d(d: &Diagram) -> bool {
    (0..VERTICES).all(|v| {
        d.circles[v] != Mark::None || Color::BOTH.iter().all(|&c| d.strokes(v, c) != 1)
    })
}

/// A vertex circled in one color only has both stroke sums at leading
/// order, so strokes of both colors emanate from it.
fn rule_2e(d: &Diagram) -> bool {
    (0..VERTICES).all(|v| {
        !d.circles[v].is_single() || Color::BOTH.iter().all(|&c| d.strokes(v, c) > 0)
    })
}

fn rule_3a(d: &Diagram) -> bool {
    let shape_ok = d.edges.iter().all(|m| matches!(m, Mark::None | Mark::Z))
        && d.circles.iter().all(|m| *m == Mark::None);
    shape_ok
        && d.edges.contains(&Mark::Z)
        && (0..VERTICES).all(|v| d.strokes(v, Color::Z) != 1)
}

type Predicate = fn(&Diagram) -> bool;

const TIER1_EQUAL: [(&str, Predicate); 10] = [
    ("2a", rule_2a),
    ("2b", rule_2b),
    ("2c", rule_2c),
    ("2g", rule_2g),
    ("2h", rule_2h),
    ("1a", rule_1a),
    ("1f", rule_1f),
    ("1g", rule_1g),
    ("2d", rule_2d),
    ("2e", rule_2e),
];

fn tier1(d: &Diagram) -> Result<(), &'static str> {
    match d.order_mode {
        OrderMode::NonEqualOrder => {
            if rule_3a(d) {
                Ok(())
            } else {
                Err("3a")
            }
        }
        OrderMode::EqualOrder => {
            for (name, rule) in TIER1_EQUAL {
                if !rule(d) {
                    return Err(name);
                }
            }
            Ok(())
        }
    }
}

// ---------- tier 2 ----------

/// Set partitions of four vertices as restricted growth strings.
pub const PARTITIONS: [[u8; 4]; 15] = [
    [0, 0, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
    [0, 0, 1, 1],
    [0, 0, 1, 2],
    [0, 1, 0, 0],
    [0, 1, 0, 1],
    [0, 1, 0, 2],
    [0, 1, 1, 0],
    [0, 1, 1, 1],
    [0, 1, 1, 2],
    [0, 1, 2, 0],
    [0, 1, 2, 1],
    [0, 1, 2, 2],
    [0, 1, 2, 3],
];

/// Ordered stages of the closeness search; a candidate failing at stage
/// `k` reports the stage name.
const STAGES: [&str; 6] = ["estimate-2", "1b", "1d", "1e", "2f", "2g-observation"];

fn partition_for(c: Color, zp: &[u8; 4], wp: &[u8; 4]) -> [u8; 4] {
    match c {
        Color::Z => *zp,
        Color::W => *wp,
    }
}

fn other(c: Color) -> Color {
    match c {
        Color::Z => Color::W,
        Color::W => Color::Z,
    }
}

fn check_candidate(d: &Diagram, comps: &[Vec<usize>], zp: &[u8; 4], wp: &[u8; 4]) -> Result<(), usize> {
    // a z-stroke forces w-closeness, a w-stroke z-closeness
    for (s, &(i, j)) in PAIRS.iter().enumerate() {
        for c in Color::BOTH {
            let p = partition_for(other(c), zp, wp);
            if d.edges[s].has(c) && p[i] != p[j] {
                return Err(0);
            }
        }
    }
    // vertices close to the origin form exactly the uncircled class
    for c in Color::BOTH {
        let p = partition_for(c, zp, wp);
        let uncircled: Vec<usize> = (0..VERTICES).filter(|&v| !d.circles[v].has(c)).collect();
        if uncircled.windows(2).any(|w| p[w[0]] != p[w[1]]) {
            return Err(1);
        }
        for i in 0..VERTICES {
            for j in i + 1..VERTICES {
                if p[i] == p[j] && d.circles[i].has(c) != d.circles[j].has(c) {
                    return Err(1);
                }
            }
        }
    }
    // circled vertices of a component are not all mutually close
    for c in Color::BOTH {
        let p = partition_for(c, zp, wp);
        for comp in comps {
            let mut classes: Vec<u8> = comp.iter().filter(|&&v| d.circles[v].has(c)).map(|&v| p[v]).collect();
            if classes.is_empty() {
                continue;
            }
            classes.sort_unstable();
            classes.dedup();
            if classes.len() < 2 {
                return Err(2);
            }
        }
    }
    // circles in a component iff it has a maximal stroke of that color
    for c in Color::BOTH {
        let p = partition_for(c, zp, wp);
        for comp in comps {
            let circled = comp.iter().any(|&v| d.circles[v].has(c));
            let maximal = comp.iter().any(|&i| {
                comp.iter().any(|&j| i < j && d.edge(i, j).has(c) && p[i] != p[j])
            });
            if circled != maximal {
                return Err(3);
            }
        }
    }
    // a single-colored edge surrounded by its own color only is not maximal
    for (s, &(i, j)) in PAIRS.iter().enumerate() {
        let m = d.edges[s];
        if !m.is_single() {
            continue;
        }
        let only_same = |v: usize| d.neighbors(v).all(|(_, e)| e == m);
        let c = if m == Mark::Z { Color::Z } else { Color::W };
        let p = partition_for(c, zp, wp);
        if only_same(i) && only_same(j) && p[i] != p[j] {
            return Err(4);
        }
    }
    // a vanishing minimal distance is attained by at least two pairs;
    // r_ij can only vanish if i, j are both z- and w-close, and does
    // vanish when they are also joined by a stroke
    let possibly: Vec<usize> = (0..6)
        .filter(|&s| {
            let (i, j) = PAIRS[s];
            zp[i] == zp[j] && wp[i] == wp[j]
        })
        .collect();
    let definitely = possibly.iter().filter(|&&s| d.edges[s] != Mark::None).count();
    if definitely >= 1 && possibly.len() == 1 {
        return Err(5);
    }
    Ok(())
}

/// Isolated quadrilateral with differently typed opposite pairs and all
/// vertices circled must carry a single circle type.
fn rule_2i(d: &Diagram) -> bool {
    let present = d.edges.iter().filter(|m| **m != Mark::None).count();
    if present != 4 {
        return true;
    }
    for q in quads() {
        let e = q.map(|s| d.edges[s]);
        if e.contains(&Mark::None) {
            continue;
        }
        if e[0] != e[2] && d.circles.iter().all(|m| *m != Mark::None) {
            return d.circles.iter().all(|m| *m == d.circles[0]);
        }
    }
    true
}

/// Two `zw`-edges whose four endpoints are circled in one color only may not
/// be joined by a single edge of that color.
fn rule_2j(d: &Diagram) -> bool {
    let zw: Vec<usize> = (0..6).filter(|&s| d.edges[s] == Mark::ZW).collect();
    let rest: Vec<usize> = (0..6).filter(|&s| d.edges[s].is_single()).collect();
    if zw.len() != 2 || rest.len() != 1 {
        return true;
    }
    let (a, b) = (PAIRS[zw[0]], PAIRS[zw[1]]);
    if a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1 {
        return true;
    }
    let single = d.edges[rest[0]];
    !d.circles.iter().all(|m| *m == single)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tri {
    True,
    False,
    Free,
}

/// Closeness facts common to every admissible closeness structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloseState {
    pub z_close: [Tri; 6],
    pub w_close: [Tri; 6],
    /// Number of admissible (z, w) partition pairs.
    pub candidates: usize,
}

impl CloseState {
    /// Whether some admissible structure makes the stroke on `slot` maximal
    /// in color `c`.
    pub fn maximal_possible(&self, slot: usize, c: Color) -> bool {
        let t = match c {
            Color::Z => self.z_close[slot],
            Color::W => self.w_close[slot],
        };
        t != Tri::True
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("contradiction via rule {0}")]
pub struct Contradiction(pub String);

fn merge(acc: &mut Option<[Tri; 6]>, p: &[u8; 4]) {
    let now: [Tri; 6] = std::array::from_fn(|s| {
        let (i, j) = PAIRS[s];
        if p[i] == p[j] {
            Tri::True
        } else {
            Tri::False
        }
    });
    match acc {
        None => *acc = Some(now),
        Some(a) => {
            for s in 0..6 {
                if a[s] != now[s] {
                    a[s] = Tri::Free;
                }
            }
        }
    }
}

/// Admissible closeness structures of `d`, summarized three-valuedly.
pub fn propagate_closeness(d: &Diagram) -> Result<CloseState, Contradiction> {
    let comps = d.components();
    let mut z_acc = None;
    let mut w_acc = None;
    let mut n = 0;
    let mut furthest = 0;
    for zp in &PARTITIONS {
        for wp in &PARTITIONS {
            match check_candidate(d, &comps, zp, wp) {
                Ok(()) => {
                    n += 1;
                    merge(&mut z_acc, zp);
                    merge(&mut w_acc, wp);
                }
                Err(k) => furthest = furthest.max(k),
            }
        }
    }
    match (z_acc, w_acc) {
        (Some(z_close), Some(w_close)) => Ok(CloseState { z_close, w_close, candidates: n }),
        _ => Err(Contradiction(STAGES[furthest].to_string())),
    }
}

fn tier2(d: &Diagram) -> Result<(), String> {
    if d.order_mode == OrderMode::NonEqualOrder {
        return Ok(());
    }
    if !rule_2i(d) {
        return Err("2i".into());
    }
    if !rule_2j(d) {
        return Err("2j".into());
    }
    propagate_closeness(d).map(|_| ()).map_err(|c| c.0)
}

pub fn check_rules_with(d: &Diagram, tiers: Tiers) -> Verdict {
    if let Err(r) = tier1(d) {
        return Verdict::Rejected(r.to_string());
    }
    if tiers == Tiers::Full {
        if let Err(r) = tier2(d) {
            return Verdict::Rejected(r);
        }
    }
    Verdict::Accepted
}

pub fn check_rules(d: &Diagram) -> Verdict {
    check_rules_with(d, Tiers::Full)
}

// ---------- catalog ----------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub representative: Diagram,
    pub mass_condition: Option<MassConditionId>,
}

pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>, DiagramError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let bad = |reason: &str| DiagramError::BadCatalog { line: n + 1, reason: reason.to_string() };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(bad("expected 4 tab-separated columns"));
        }
        let mode: OrderMode = cols[1].parse().map_err(|_| bad("order mode"))?;
        let representative = Diagram::parse(mode, cols[2]).map_err(|_| bad("encoding"))?;
        let mass_condition = match cols[3].trim() {
            "-" => None,
            s => Some(s.parse().map_err(|_| bad("mass condition"))?),
        };
        out.push(CatalogEntry { name: cols[0].to_string(), representative, mass_condition });
    }
    Ok(out)
}

/// The shipped four-vertex catalog.
pub fn catalog() -> Vec<CatalogEntry> {
    parse_catalog(CATALOG_TEXT).expect("shipped catalog parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Classification {
    /// Names sharing the class (several names can share one diagram).
    Named(Vec<CatalogEntry>),
    Unnamed,
}

pub fn classify(d: &Diagram) -> Classification {
    let key = d.class_key();
    let hits: Vec<CatalogEntry> = catalog()
        .into_iter()
        .filter(|e| e.representative.order_mode == d.order_mode && e.representative.class_key() == key)
        .collect();
    if hits.is_empty() {
        Classification::Unnamed
    } else {
        Classification::Named(hits)
    }
}

// ---------- enumeration ----------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramClass {
    /// Least encoding over vertex relabelings.
    pub key: String,
    pub representative: Diagram,
    /// Accepted raw diagrams in this class.
    pub members: usize,
    pub names: Vec<String>,
    pub mass_conditions: Vec<MassConditionId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub order_mode: OrderMode,
    pub raw_total: usize,
    pub raw_accepted: usize,
    /// Rejections per first violated rule.
    pub rejected_by: BTreeMap<String, usize>,
    pub classes: Vec<DiagramClass>,
    /// Keys of accepted classes missing from the catalog.
    pub unnamed: Vec<String>,
    /// Catalog names with no accepted class.
    pub missing: Vec<String>,
}

fn raw_diagram(mode: OrderMode, index: usize) -> Diagram {
    match mode {
        OrderMode::EqualOrder => {
            let mut edges = [Mark::None; 6];
            let mut circles = [Mark::None; 4];
            let mut k = index;
            for e in edges.iter_mut() {
                *e = Mark::ALL[k % 4];
                k /= 4;
            }
            for c in circles.iter_mut() {
                *c = Mark::ALL[k % 4];
                k /= 4;
            }
            Diagram { order_mode: mode, edges, circles }
        }
        OrderMode::NonEqualOrder => {
            let edges = std::array::from_fn(|s| if index >> s & 1 == 1 { Mark::Z } else { Mark::None });
            Diagram { order_mode: mode, edges, circles: [Mark::None; 4] }
        }
    }
}

pub fn raw_count(mode: OrderMode) -> usize {
    match mode {
        OrderMode::EqualOrder => 4usize.pow(10),
        OrderMode::NonEqualOrder => 1 << 6,
    }
}

/// Enumerate, filter and classify every raw diagram of `mode`.
pub fn enumerate_report(mode: OrderMode, tiers: Tiers) -> EnumerationReport {
    let total = raw_count(mode);
    let verdicts: Vec<(Diagram, Verdict)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let d = raw_diagram(mode, i);
            (d, check_rules_with(&d, tiers))
        })
        .collect();

    let mut rejected_by = BTreeMap::new();
    let mut classes: BTreeMap<[Mark; 10], DiagramClass> = BTreeMap::new();
    let mut accepted = 0;
    for (d, v) in verdicts {
        match v {
            Verdict::Rejected(r) => *rejected_by.entry(r).or_insert(0) += 1,
            Verdict::Accepted => {
                accepted += 1;
                let canon = d.canonical();
                classes
                    .entry(canon.code())
                    .or_insert_with(|| DiagramClass {
                        key: canon.encoding(),
                        representative: canon,
                        members: 0,
                        names: Vec::new(),
                        mass_conditions: Vec::new(),
                    })
                    .members += 1;
            }
        }
    }

    let cat: Vec<CatalogEntry> = catalog().into_iter().filter(|e| e.representative.order_mode == mode).collect();
    let mut unnamed = Vec::new();
    for class in classes.values_mut() {
        for e in cat.iter().filter(|e| e.representative.class_key() == class.key) {
            class.names.push(e.name.clone());
            if let Some(m) = e.mass_condition {
                if !class.mass_conditions.contains(&m) {
                    class.mass_conditions.push(m);
                }
            }
        }
        if class.names.is_empty() {
            unnamed.push(class.key.clone());
        }
    }
    let missing = cat
        .iter()
        .filter(|e| !classes.values().any(|c| c.names.contains(&e.name)))
        .map(|e| e.name.clone())
        .collect();

    EnumerationReport {
        order_mode: mode,
        raw_total: total,
        raw_accepted: accepted,
        rejected_by,
        classes: classes.into_values().collect(),
        unnamed,
        missing,
    }
}

/// Canonical representatives of the accepted classes.
pub fn enumerate(mode: OrderMode) -> Vec<Diagram> {
    enumerate_report(mode, Tiers::Full)
        .classes
        .into_iter()
        .map(|c| c.representative)
        .collect()
}
